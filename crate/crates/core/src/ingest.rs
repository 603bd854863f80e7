//! Ingestion of report-level or pre-aggregated AE counts and of flat
//! group → AE mappings.
//!
//! Term and vaccine matching is case-insensitive after trimming. The AE
//! universe is whatever appears in the count data; group members outside it
//! are dropped with a warning.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::io::Read;

use log::warn;
use serde::Serialize;

use crate::error::{AeError, Result};

/// Canonical matching key for AE terms and vaccine codes.
pub fn term_key(s: &str) -> String {
    s.trim().to_lowercase()
}

/// One (report, vaccine, AE) mention.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReportRecord {
    pub report_id: String,
    pub vaccine: String,
    pub ae_term: String,
}

impl ReportRecord {
    pub fn new(report_id: &str, vaccine: &str, ae_term: &str) -> Result<Self> {
        let (r, v, a) = (report_id.trim(), vaccine.trim(), ae_term.trim());
        if r.is_empty() || v.is_empty() || a.is_empty() {
            return Err(AeError::Format(format!(
                "empty field in report record ({report_id:?}, {vaccine:?}, {ae_term:?})"
            )));
        }
        Ok(Self {
            report_id: r.to_string(),
            vaccine: v.to_string(),
            ae_term: a.to_string(),
        })
    }
}

/// The 2×N table of per-AE counts for one target vaccine.
///
/// `n1[i]` counts reports mentioning both the target vaccine and AE `i`,
/// `ndot[i]` all reports mentioning AE `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContingencyTable {
    ae_terms: Vec<String>,
    n1: Vec<u64>,
    ndot: Vec<u64>,
    n1_total: u64,
    n_total: u64,
}

impl ContingencyTable {
    pub fn new(
        ae_terms: Vec<String>,
        n1: Vec<u64>,
        ndot: Vec<u64>,
        n1_total: u64,
        n_total: u64,
    ) -> Result<Self> {
        if ae_terms.len() != n1.len() || n1.len() != ndot.len() {
            return Err(AeError::Format(format!(
                "column lengths differ: {} terms, {} n1, {} ndot",
                ae_terms.len(),
                n1.len(),
                ndot.len()
            )));
        }
        if ae_terms.is_empty() {
            return Err(AeError::EmptyInput("table has no AE terms".into()));
        }
        if n1_total > n_total {
            return Err(AeError::Consistency {
                term: "<totals>".into(),
                detail: format!("n1_total {n1_total} exceeds n_total {n_total}"),
            });
        }
        let mut seen = HashSet::with_capacity(ae_terms.len());
        for (i, term) in ae_terms.iter().enumerate() {
            if term.trim().is_empty() {
                return Err(AeError::Format(format!("empty AE term at position {i}")));
            }
            if !seen.insert(term_key(term)) {
                return Err(AeError::Format(format!("duplicate AE term `{term}`")));
            }
            let fail = |detail: String| AeError::Consistency {
                term: term.clone(),
                detail,
            };
            if n1[i] > ndot[i] {
                return Err(fail(format!("n1i {} exceeds ndoti {}", n1[i], ndot[i])));
            }
            if ndot[i] > n_total {
                return Err(fail(format!("ndoti {} exceeds n_total {n_total}", ndot[i])));
            }
            if n1[i] > n1_total {
                return Err(fail(format!("n1i {} exceeds n1_total {n1_total}", n1[i])));
            }
        }
        Ok(Self {
            ae_terms,
            n1,
            ndot,
            n1_total,
            n_total,
        })
    }

    pub fn len(&self) -> usize {
        self.ae_terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ae_terms.is_empty()
    }

    pub fn ae_terms(&self) -> &[String] {
        &self.ae_terms
    }

    pub fn n1(&self) -> &[u64] {
        &self.n1
    }

    pub fn ndot(&self) -> &[u64] {
        &self.ndot
    }

    pub fn n1_total(&self) -> u64 {
        self.n1_total
    }

    pub fn n_total(&self) -> u64 {
        self.n_total
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        let key = term_key(term);
        self.ae_terms.iter().position(|t| term_key(t) == key)
    }

    /// Same margins, different target-vaccine counts. Used for null replicates.
    pub fn with_n1(&self, n1: Vec<u64>) -> Result<Self> {
        let total = n1.iter().sum::<u64>().max(self.n1_total);
        Self::new(
            self.ae_terms.clone(),
            n1,
            self.ndot.clone(),
            total,
            self.n_total,
        )
    }

    /// Reorders AEs; `order[k]` is the old index placed at position `k`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            ae_terms: order.iter().map(|&i| self.ae_terms[i].clone()).collect(),
            n1: order.iter().map(|&i| self.n1[i]).collect(),
            ndot: order.iter().map(|&i| self.ndot[i]).collect(),
            n1_total: self.n1_total,
            n_total: self.n_total,
        }
    }

    /// Aggregated-file serialization, readable back by [`parse_aggregated`].
    pub fn to_aggregated_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "#totals,n1_total={},n_total={}",
            self.n1_total, self.n_total
        );
        out.push_str("ae_term,n1i,ndoti\n");
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(Vec::new());
        for i in 0..self.len() {
            w.write_record([
                self.ae_terms[i].as_str(),
                &self.n1[i].to_string(),
                &self.ndot[i].to_string(),
            ])
            .expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf8"));
        out
    }
}

/// A named set of AE indices into a [`ContingencyTable`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AeGroup {
    pub name: String,
    pub members: Vec<usize>,
}

impl AeGroup {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Membership mask over `n` AEs.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &i in &self.members {
            m[i] = true;
        }
        m
    }
}

/// Flat ontology mapping. Every group satisfies `1 <= N_G < N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupMap {
    n_terms: usize,
    groups: Vec<AeGroup>,
}

impl GroupMap {
    pub fn new(n_terms: usize, groups: Vec<AeGroup>) -> Result<Self> {
        let mut names = HashSet::new();
        let mut out = Vec::with_capacity(groups.len());
        for mut g in groups {
            if !names.insert(g.name.clone()) {
                return Err(AeError::InvalidGroup {
                    name: g.name,
                    detail: "duplicate group name".into(),
                });
            }
            g.members.sort_unstable();
            g.members.dedup();
            if let Some(&bad) = g.members.iter().find(|&&i| i >= n_terms) {
                return Err(AeError::InvalidGroup {
                    name: g.name,
                    detail: format!("member index {bad} out of range for {n_terms} AEs"),
                });
            }
            check_group_size(&g.name, g.members.len(), n_terms)?;
            out.push(g);
        }
        Ok(Self {
            n_terms,
            groups: out,
        })
    }

    pub fn groups(&self) -> &[AeGroup] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn get(&self, name: &str) -> Option<&AeGroup> {
        self.groups.iter().find(|g| g.name == name)
    }

    /// Same groups after the table has been reordered by `order`
    /// (see [`ContingencyTable::permuted`]).
    pub fn permuted(&self, order: &[usize]) -> Self {
        let mut inverse = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        let groups = self
            .groups
            .iter()
            .map(|g| {
                let mut members: Vec<usize> = g.members.iter().map(|&i| inverse[i]).collect();
                members.sort_unstable();
                AeGroup {
                    name: g.name.clone(),
                    members,
                }
            })
            .collect();
        Self {
            n_terms: self.n_terms,
            groups,
        }
    }
}

pub(crate) fn check_group_size(name: &str, n_g: usize, n: usize) -> Result<()> {
    if n_g == 0 || n_g >= n {
        return Err(AeError::InvalidGroup {
            name: name.to_string(),
            detail: format!("group size {n_g} must satisfy 1 <= N_G < N = {n}"),
        });
    }
    Ok(())
}

/// Why a group from the mapping file was not analyzed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupExclusion {
    /// No member term occurs in the count data.
    Empty,
    /// The group covers every AE in the table, leaving an empty complement.
    CoversAll,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupParse {
    pub groups: GroupMap,
    /// (group, term) pairs whose term has no count data.
    pub dropped_terms: Vec<(String, String)>,
    pub excluded: Vec<(String, GroupExclusion)>,
}

fn header_positions(
    headers: &csv::StringRecord,
    required: &[&str],
) -> Result<Vec<usize>> {
    required
        .iter()
        .map(|col| {
            headers
                .iter()
                .position(|h| h.trim().eq_ignore_ascii_case(col))
                .ok_or_else(|| {
                    AeError::Format(format!(
                        "missing header column `{col}` (expected {})",
                        required.join(",")
                    ))
                })
        })
        .collect()
}

fn reader<R: Read>(raw: R, delimiter: u8) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(raw)
}

fn field<'r>(rec: &'r csv::StringRecord, pos: usize, line: u64, col: &str) -> Result<&'r str> {
    match rec.get(pos).map(str::trim) {
        Some(s) if !s.is_empty() => Ok(s),
        _ => Err(AeError::Format(format!("line {line}: empty `{col}` field"))),
    }
}

/// Builds the 2×N table from report-level rows `report_id,vaccine,ae_term`.
///
/// A report counts once per AE and once per vaccine however many rows
/// repeat it; a report "mentions both" the target and AE `i` when its
/// vaccine set contains the target and its AE set contains `i`.
pub fn parse_reports<R: Read>(raw: R, delimiter: u8, target_vaccine: &str) -> Result<ContingencyTable> {
    let mut rdr = reader(raw, delimiter);
    let headers = match rdr.headers() {
        Ok(h) if !h.is_empty() && !(h.len() == 1 && h[0].is_empty()) => h.clone(),
        Ok(_) => return Err(AeError::EmptyInput("reports file has no header".into())),
        Err(e) => return Err(e.into()),
    };
    let pos = header_positions(&headers, &["report_id", "vaccine", "ae_term"])?;

    let target = term_key(target_vaccine);
    let mut reports: HashMap<String, (bool, BTreeSet<String>)> = HashMap::new();
    // Display spelling per AE key: lexicographically smallest variant, so the
    // output does not depend on row order.
    let mut spelling: BTreeMap<String, String> = BTreeMap::new();
    let mut rows = 0usize;

    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let record = ReportRecord::new(
            field(&rec, pos[0], line, "report_id")?,
            field(&rec, pos[1], line, "vaccine")?,
            field(&rec, pos[2], line, "ae_term")?,
        )?;
        rows += 1;
        let key = term_key(&record.ae_term);
        spelling
            .entry(key.clone())
            .and_modify(|s| {
                if record.ae_term < *s {
                    *s = record.ae_term.clone();
                }
            })
            .or_insert_with(|| record.ae_term.clone());
        let entry = reports.entry(record.report_id).or_default();
        entry.0 |= term_key(&record.vaccine) == target;
        entry.1.insert(key);
    }

    if rows == 0 {
        return Err(AeError::EmptyInput("reports file has no data rows".into()));
    }
    let index: HashMap<&str, usize> = spelling
        .keys()
        .enumerate()
        .map(|(i, k)| (k.as_str(), i))
        .collect();
    let n = spelling.len();
    let mut n1 = vec![0u64; n];
    let mut ndot = vec![0u64; n];
    let mut n1_total = 0u64;
    for (is_target, aes) in reports.values() {
        if *is_target {
            n1_total += 1;
        }
        for ae in aes {
            let i = index[ae.as_str()];
            ndot[i] += 1;
            if *is_target {
                n1[i] += 1;
            }
        }
    }
    if n1_total == 0 {
        return Err(AeError::NoTarget(target_vaccine.trim().to_string()));
    }
    ContingencyTable::new(
        spelling.into_values().collect(),
        n1,
        ndot,
        n1_total,
        reports.len() as u64,
    )
}

/// Explicit table margins for aggregated input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Totals {
    pub n1_total: u64,
    pub n_total: u64,
}

fn parse_count(s: &str, what: &str, term: &str) -> Result<u64> {
    s.trim().parse::<u64>().map_err(|_| {
        AeError::Format(format!(
            "AE `{term}`: {what} must be a non-negative integer, got `{s}`"
        ))
    })
}

fn parse_totals_line(line: &str, delimiter: u8) -> Result<Totals> {
    let mut n1_total = None;
    let mut n_total = None;
    for part in line
        .trim_start_matches("#totals")
        .split(|c: char| c == delimiter as char || c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
    {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| AeError::Format(format!("malformed #totals entry `{part}`")))?;
        let v = parse_count(v, k, "<totals>")?;
        match k.trim() {
            "n1_total" => n1_total = Some(v),
            "n_total" => n_total = Some(v),
            other => return Err(AeError::Format(format!("unknown #totals key `{other}`"))),
        }
    }
    match (n1_total, n_total) {
        (Some(n1_total), Some(n_total)) => Ok(Totals { n1_total, n_total }),
        _ => Err(AeError::Format(
            "#totals line must give both n1_total and n_total".into(),
        )),
    }
}

/// Reads pre-aggregated counts `ae_term,n1i,ndoti`.
///
/// Totals come from `totals` when given, otherwise from a
/// `#totals,n1_total=<int>,n_total=<int>` comment line.
pub fn parse_aggregated<R: Read>(mut raw: R, delimiter: u8, totals: Option<Totals>) -> Result<ContingencyTable> {
    let mut text = String::new();
    raw.read_to_string(&mut text)?;
    if text.trim().is_empty() {
        return Err(AeError::EmptyInput("aggregated file is empty".into()));
    }
    let mut file_totals = None;
    for line in text.lines() {
        let l = line.trim();
        if l.starts_with("#totals") {
            file_totals = Some(parse_totals_line(l, delimiter)?);
        }
    }
    let totals = totals.or(file_totals).ok_or_else(|| {
        AeError::Format("totals missing: pass n1_total/n_total or add a #totals line".into())
    })?;

    let mut rdr = reader(text.as_bytes(), delimiter);
    let headers = rdr.headers()?.clone();
    let pos = header_positions(&headers, &["ae_term", "n1i", "ndoti"])?;
    let (mut terms, mut n1, mut ndot) = (Vec::new(), Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let term = field(&rec, pos[0], line, "ae_term")?.to_string();
        let a = parse_count(field(&rec, pos[1], line, "n1i")?, "n1i", &term)?;
        let b = parse_count(field(&rec, pos[2], line, "ndoti")?, "ndoti", &term)?;
        terms.push(term);
        n1.push(a);
        ndot.push(b);
    }
    if terms.is_empty() {
        return Err(AeError::EmptyInput("aggregated file has no data rows".into()));
    }
    ContingencyTable::new(terms, n1, ndot, totals.n1_total, totals.n_total)
}

/// Reads `group,ae_term` rows and resolves members against `table`.
pub fn parse_groups<R: Read>(raw: R, delimiter: u8, table: &ContingencyTable) -> Result<GroupParse> {
    let mut rdr = reader(raw, delimiter);
    let headers = rdr.headers()?.clone();
    let pos = header_positions(&headers, &["group", "ae_term"])?;
    let index: HashMap<String, usize> = table
        .ae_terms()
        .iter()
        .enumerate()
        .map(|(i, t)| (term_key(t), i))
        .collect();

    let mut members: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    let mut dropped = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let group = field(&rec, pos[0], line, "group")?.to_string();
        let term = field(&rec, pos[1], line, "ae_term")?;
        let set = members.entry(group.clone()).or_default();
        match index.get(&term_key(term)) {
            Some(&i) => {
                set.insert(i);
            }
            None => {
                warn!("group `{group}`: AE term `{term}` has no count data; dropped");
                dropped.push((group, term.to_string()));
            }
        }
    }

    let n = table.len();
    let mut groups = Vec::new();
    let mut excluded = Vec::new();
    for (name, set) in members {
        if set.is_empty() {
            warn!("group `{name}` has no members in the count data; excluded");
            excluded.push((name, GroupExclusion::Empty));
        } else if set.len() >= n {
            warn!("group `{name}` covers all {n} AEs (empty complement); excluded");
            excluded.push((name, GroupExclusion::CoversAll));
        } else {
            groups.push(AeGroup {
                name,
                members: set.into_iter().collect(),
            });
        }
    }
    Ok(GroupParse {
        groups: GroupMap::new(n, groups)?,
        dropped_terms: dropped,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reports(text: &str, target: &str) -> Result<ContingencyTable> {
        parse_reports(text.as_bytes(), b',', target)
    }

    #[test]
    fn tallies_distinct_reports() {
        let t = reports(
            "report_id,vaccine,ae_term\nr1,V,A\nr1,V,B\nr2,W,A\nr3,V,A\n",
            "V",
        )
        .unwrap();
        assert_eq!(t.ae_terms(), ["A", "B"]);
        assert_eq!(t.n1(), [2, 1]);
        assert_eq!(t.ndot(), [3, 1]);
        assert_eq!(t.n1_total(), 2);
        assert_eq!(t.n_total(), 3);
    }

    #[test]
    fn single_and_duplicated_rows() {
        let one = reports("report_id,vaccine,ae_term\nr1,V,A\n", "V").unwrap();
        assert_eq!(one.n1(), [1]);
        assert_eq!(one.ndot(), [1]);
        assert_eq!((one.n1_total(), one.n_total()), (1, 1));
        let dup = reports("report_id,vaccine,ae_term\nr1,V,A\nr1,V,A\n", "V").unwrap();
        assert_eq!(one, dup);
    }

    #[test]
    fn matching_ignores_case_and_whitespace() {
        let t = reports(
            "report_id,vaccine,ae_term\nr1, flu4 ,Headache\nr2,FLU4,  headache\n",
            "FLU4",
        )
        .unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.n1(), [2]);
        assert_eq!(t.ae_terms(), ["Headache"]);
    }

    #[test]
    fn report_errors() {
        assert!(matches!(
            reports("report_id,vaccine\nr1,V\n", "V"),
            Err(AeError::Format(_))
        ));
        assert!(matches!(
            reports("report_id,vaccine,ae_term\n", "V"),
            Err(AeError::EmptyInput(_))
        ));
        assert!(matches!(reports("", "V"), Err(AeError::EmptyInput(_))));
        assert!(matches!(
            reports("report_id,vaccine,ae_term\nr1,W,A\n", "V"),
            Err(AeError::NoTarget(_))
        ));
        assert!(matches!(
            reports("report_id,vaccine,ae_term\nr1,,A\n", "V"),
            Err(AeError::Format(_))
        ));
    }

    #[test]
    fn tab_delimited_reports() {
        let t = parse_reports("report_id\tvaccine\tae_term\nr1\tV\tA\n".as_bytes(), b'\t', "V").unwrap();
        assert_eq!(t.n1(), [1]);
    }

    #[test]
    fn aggregated_direct_construction() {
        let t = parse_aggregated(
            "ae_term,n1i,ndoti\nA,5,10\nB,0,7\n".as_bytes(),
            b',',
            Some(Totals { n1_total: 5, n_total: 17 }),
        )
        .unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.n1(), [5, 0]);
        assert_eq!(t.ndot(), [10, 7]);
    }

    #[test]
    fn aggregated_totals_comment_line() {
        let t = parse_aggregated(
            "#totals,n1_total=5,n_total=17\nae_term,n1i,ndoti\nA,5,10\nB,0,7\n".as_bytes(),
            b',',
            None,
        )
        .unwrap();
        assert_eq!((t.n1_total(), t.n_total()), (5, 17));
    }

    #[test]
    fn aggregated_errors() {
        let totals = Some(Totals { n1_total: 10, n_total: 20 });
        let err = parse_aggregated("ae_term,n1i,ndoti\nA,8,5\n".as_bytes(), b',', totals).unwrap_err();
        match err {
            AeError::Consistency { term, .. } => assert_eq!(term, "A"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_aggregated("".as_bytes(), b',', totals),
            Err(AeError::EmptyInput(_))
        ));
        assert!(matches!(
            parse_aggregated("ae_term,n1i,ndoti\nA,-1,5\n".as_bytes(), b',', totals),
            Err(AeError::Format(_))
        ));
        assert!(matches!(
            parse_aggregated("ae_term,n1i,ndoti\nA,1.5,5\n".as_bytes(), b',', totals),
            Err(AeError::Format(_))
        ));
        assert!(matches!(
            parse_aggregated("ae_term,n1i,ndoti\nA,1,5\n".as_bytes(), b',', None),
            Err(AeError::Format(_))
        ));
        assert!(matches!(
            parse_aggregated("ae_term,n1i,ndoti\nA,1,5\na,1,5\n".as_bytes(), b',', totals),
            Err(AeError::Format(_))
        ));
    }

    fn abcd() -> ContingencyTable {
        ContingencyTable::new(
            ["A", "B", "C", "D"].map(String::from).to_vec(),
            vec![1, 2, 0, 1],
            vec![3, 4, 2, 2],
            4,
            10,
        )
        .unwrap()
    }

    #[test]
    fn groups_intersect_with_table() {
        let parsed = parse_groups(
            "group,ae_term\nG1,A\nG1,B\nG2,C\nG2,Z\n".as_bytes(),
            b',',
            &abcd(),
        )
        .unwrap();
        assert_eq!(parsed.groups.get("G1").unwrap().members, [0, 1]);
        assert_eq!(parsed.groups.get("G2").unwrap().members, [2]);
        assert_eq!(parsed.dropped_terms, [("G2".to_string(), "Z".to_string())]);
        assert!(parsed.excluded.is_empty());
    }

    #[test]
    fn groups_excluded_when_empty_or_full() {
        let parsed = parse_groups(
            "group,ae_term\nAll,A\nAll,B\nAll,C\nAll,D\nNone,Z\nOk,a\n".as_bytes(),
            b',',
            &abcd(),
        )
        .unwrap();
        assert_eq!(parsed.groups.len(), 1);
        assert_eq!(parsed.groups.groups()[0].name, "Ok");
        assert!(parsed
            .excluded
            .contains(&("All".to_string(), GroupExclusion::CoversAll)));
        assert!(parsed
            .excluded
            .contains(&("None".to_string(), GroupExclusion::Empty)));
    }

    #[test]
    fn groups_missing_columns() {
        assert!(matches!(
            parse_groups("name,term\nG1,A\n".as_bytes(), b',', &abcd()),
            Err(AeError::Format(_))
        ));
    }

    #[test]
    fn group_map_rejects_bad_sizes() {
        assert!(GroupMap::new(3, vec![AeGroup { name: "g".into(), members: vec![] }]).is_err());
        assert!(GroupMap::new(2, vec![AeGroup { name: "g".into(), members: vec![0, 1] }]).is_err());
        assert!(GroupMap::new(2, vec![AeGroup { name: "g".into(), members: vec![2] }]).is_err());
    }
}
