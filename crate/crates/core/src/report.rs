//! CSV and JSON serialization of test results.
//!
//! A CSV result file holds three sections separated by blank lines: groups,
//! AEs, and the significant AEs of every enriched group.

use std::fmt::Write as _;

use serde::Serialize;

use crate::aefisher::FisherResult;
use crate::aeks::EnrichmentResult;
use crate::ingest::GroupMap;
use crate::scalar::{Num, Scalar};

pub const AEKS_GROUP_HEADER: &str = "group,es,ks,p0_in,p0_out,gate,p_value,q_value";
pub const AEKS_AE_HEADER: &str = "ae_term,rr,p_value,q_value";
pub const FISHER_GROUP_HEADER: &str = "group,es,or_g,gate,p_value,q_value";
pub const FISHER_AE_HEADER: &str = "ae_term,p_value,q_value,odds_ratio,signaled";
pub const ENRICHED_HEADER: &str = "enriched_group,significant_ae";

/// An enriched group and its significant member AEs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnrichedGroup {
    pub group: String,
    pub significant_aes: Vec<String>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn listing<F: Fn(usize) -> bool>(
    groups: &GroupMap,
    enriched: impl Fn(usize) -> bool,
    significant: F,
    terms: impl Fn(usize) -> String,
) -> Vec<EnrichedGroup> {
    groups
        .groups()
        .iter()
        .enumerate()
        .filter(|(k, _)| enriched(*k))
        .map(|(_, g)| {
            let mut aes: Vec<String> = g.members.iter().filter(|&&i| significant(i)).map(|&i| terms(i)).collect();
            aes.sort();
            EnrichedGroup {
                group: g.name.clone(),
                significant_aes: aes,
            }
        })
        .collect()
}

/// AEKS: groups with `q < q_cut`, listing members with AE-level `q < q_cut`.
pub fn aeks_enriched<T: Scalar>(res: &EnrichmentResult<T>, groups: &GroupMap, q_cut: f64) -> Vec<EnrichedGroup> {
    listing(
        groups,
        |k| res.groups[k].q_value.to_f64_lossy() < q_cut,
        |i| res.aes[i].q_value.to_f64_lossy() < q_cut,
        |i| res.aes[i].ae_term.clone(),
    )
}

/// AEFisher: groups with `q < q_cut`, listing signaled members.
pub fn fisher_enriched<T: Scalar>(res: &FisherResult<T>, groups: &GroupMap, q_cut: f64) -> Vec<EnrichedGroup> {
    listing(
        groups,
        |k| res.groups[k].q_value.to_f64_lossy() < q_cut,
        |i| res.aes.rows[i].signaled,
        |i| res.aes.rows[i].ae_term.clone(),
    )
}

fn push_header(out: &mut String, header: Option<&str>) {
    if let Some(h) = header {
        let _ = writeln!(out, "# {h}");
    }
}

fn push_enriched(out: &mut String, enriched: &[EnrichedGroup]) {
    out.push('\n');
    out.push_str(ENRICHED_HEADER);
    out.push('\n');
    for e in enriched {
        for ae in &e.significant_aes {
            let _ = writeln!(out, "{},{}", csv_field(&e.group), csv_field(ae));
        }
    }
}

pub fn aeks_csv<T: Scalar>(res: &EnrichmentResult<T>, enriched: &[EnrichedGroup], header: Option<&str>) -> String {
    let mut out = String::new();
    push_header(&mut out, header);
    out.push_str(AEKS_GROUP_HEADER);
    out.push('\n');
    for g in &res.groups {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            csv_field(&g.group),
            Num(g.es),
            Num(g.ks),
            Num(g.p0_in),
            Num(g.p0_out),
            g.gate,
            Num(g.p_value),
            Num(g.q_value)
        );
    }
    out.push('\n');
    out.push_str(AEKS_AE_HEADER);
    out.push('\n');
    for a in &res.aes {
        let _ = writeln!(out, "{},{},{},{}", csv_field(&a.ae_term), Num(a.rr), Num(a.p_value), Num(a.q_value));
    }
    push_enriched(&mut out, enriched);
    out
}

pub fn fisher_csv<T: Scalar>(res: &FisherResult<T>, enriched: &[EnrichedGroup], header: Option<&str>) -> String {
    let mut out = String::new();
    push_header(&mut out, header);
    out.push_str(FISHER_GROUP_HEADER);
    out.push('\n');
    for g in &res.groups {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_field(&g.group),
            Num(g.es),
            Num(g.or_g),
            g.gate,
            Num(g.p_value),
            Num(g.q_value)
        );
    }
    out.push('\n');
    out.push_str(FISHER_AE_HEADER);
    out.push('\n');
    for a in &res.aes.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            csv_field(&a.ae_term),
            Num(a.p_value),
            Num(a.q_value),
            Num(a.odds_ratio),
            a.signaled
        );
    }
    push_enriched(&mut out, enriched);
    out
}

#[derive(Serialize)]
struct JsonReport<'a, G, A> {
    #[serde(skip_serializing_if = "Option::is_none")]
    header: Option<&'a str>,
    groups: &'a [G],
    aes: &'a [A],
    enriched: &'a [EnrichedGroup],
}

pub fn aeks_json<T: Scalar + Serialize>(
    res: &EnrichmentResult<T>,
    enriched: &[EnrichedGroup],
    header: Option<&str>,
) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(&JsonReport {
        header,
        groups: &res.groups,
        aes: &res.aes,
        enriched,
    })?;
    s.push('\n');
    Ok(s)
}

pub fn fisher_json<T: Scalar + Serialize>(
    res: &FisherResult<T>,
    enriched: &[EnrichedGroup],
    header: Option<&str>,
) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(&JsonReport {
        header,
        groups: &res.groups,
        aes: &res.aes.rows,
        enriched,
    })?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aeks::{AeResult, AeksGroupResult};
    use crate::ingest::AeGroup;

    #[test]
    fn sections_and_quoting() {
        let res = EnrichmentResult {
            groups: vec![AeksGroupResult {
                group: "Nose, throat".into(),
                size: 1,
                es: 0.5f64,
                ks: 0.5,
                p0_in: 0.0,
                p0_out: 0.25,
                gate: true,
                p_value: 0.01,
                q_value: 0.01,
            }],
            aes: vec![
                AeResult { ae_term: "Rhinitis".into(), rr: 0.75, p_value: 0.001, q_value: 0.002 },
                AeResult { ae_term: "Rash".into(), rr: 0.1, p_value: 0.9, q_value: 0.9 },
            ],
        };
        let gm = GroupMap::new(2, vec![AeGroup { name: "Nose, throat".into(), members: vec![0] }]).unwrap();
        let enriched = aeks_enriched(&res, &gm, 0.1);
        assert_eq!(enriched[0].significant_aes, vec!["Rhinitis".to_string()]);
        let csv = aeks_csv(&res, &enriched, None);
        let sections: Vec<&str> = csv.split("\n\n").collect();
        assert_eq!(sections.len(), 3);
        assert!(sections[0].starts_with(AEKS_GROUP_HEADER));
        assert!(sections[0].contains("\"Nose, throat\",0.5,0.5,0,0.25,true,0.01,0.01"));
        assert!(sections[1].starts_with(AEKS_AE_HEADER));
        assert_eq!(sections[2], "enriched_group,significant_ae\n\"Nose, throat\",Rhinitis\n");
        let json = aeks_json(&res, &enriched, Some("v")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["enriched"][0]["significant_aes"][0], "Rhinitis");
    }
}
