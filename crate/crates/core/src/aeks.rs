//! AEKS: Kolmogorov–Smirnov enrichment over tie sets of reporting ratios,
//! gated on zero-count proportions, with a conditional multinomial null.
//!
//! Reporting ratios are exact fractions `n1/ndot`; ties, running sums, gates
//! and null exceedances are all decided in integer arithmetic. Floating-point
//! values only appear in the reported statistics.

use std::cmp::Ordering;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{AeError, Result};
use crate::ingest::{check_group_size, AeGroup, ContingencyTable, GroupMap};
use crate::scalar::Scalar;
use crate::stats::{bh_qvalues, NullModel, RngStream};

/// Per-AE reporting ratios `n1[i] / ndot[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RrVector {
    values: Vec<Ratio<u64>>,
}

impl RrVector {
    pub fn values(&self) -> &[Ratio<u64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self, i: usize) -> bool {
        *self.values[i].numer() == 0
    }

    pub fn to_scalars<T: Scalar>(&self) -> Vec<T> {
        self.values
            .iter()
            .map(|r| T::ratio(*r.numer(), *r.denom()))
            .collect()
    }
}

/// Maximum-likelihood reporting ratios. Fails on any AE with `ndot = 0`.
pub fn compute_rr(table: &ContingencyTable) -> Result<RrVector> {
    let values = table
        .n1()
        .iter()
        .zip(table.ndot())
        .zip(table.ae_terms())
        .map(|((&a, &n), term)| {
            if n == 0 {
                Err(AeError::DegenerateAe(term.clone()))
            } else {
                Ok(Ratio::new(a, n))
            }
        })
        .collect::<Result<_>>()?;
    Ok(RrVector { values })
}

/// AEs partitioned into tie sets, highest ratio first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedList {
    tie_sets: Vec<Vec<usize>>,
    tie_of: Vec<usize>,
    // cum[j] = number of AEs in tie sets 0..=j
    cum: Vec<u64>,
}

impl RankedList {
    /// Ranks by any totally ordered key, descending.
    pub fn from_keys<K: Ord>(keys: &[K]) -> Self {
        let mut order: Vec<usize> = (0..keys.len()).collect();
        order.sort_by(|&i, &j| keys[j].cmp(&keys[i]).then(i.cmp(&j)));
        Self::from_sorted(&order, |i, j| keys[i] == keys[j])
    }

    fn from_sorted(order: &[usize], same: impl Fn(usize, usize) -> bool) -> Self {
        let mut tie_sets: Vec<Vec<usize>> = Vec::new();
        let mut tie_of = vec![0; order.len()];
        let mut cum = Vec::new();
        for (pos, &i) in order.iter().enumerate() {
            let new_set = match tie_sets.last() {
                Some(last) => !same(last[0], i),
                None => true,
            };
            if new_set {
                tie_sets.push(Vec::new());
                cum.push(pos as u64);
            }
            let j = tie_sets.len() - 1;
            tie_sets[j].push(i);
            tie_of[i] = j;
            cum[j] = pos as u64 + 1;
        }
        Self {
            tie_sets,
            tie_of,
            cum,
        }
    }

    /// Every AE in its own position, in the given order (no ties).
    pub fn strict(order: &[usize]) -> Self {
        Self::from_sorted(order, |_, _| false)
    }

    pub fn tie_sets(&self) -> &[Vec<usize>] {
        &self.tie_sets
    }

    /// Number of distinct ratios, `J`.
    pub fn n_tie_sets(&self) -> usize {
        self.tie_sets.len()
    }

    pub fn n_items(&self) -> usize {
        self.tie_of.len()
    }

    pub fn tie_of(&self, i: usize) -> usize {
        self.tie_of[i]
    }
}

/// Tie-set ranking on exact ratios.
pub fn rank_with_ties(rr: &RrVector) -> RankedList {
    RankedList::from_keys(&rr.values)
}

/// Ranking straight from counts; `n1[i]/ndot[i]` compared by
/// cross-multiplication. All `ndot` must be positive.
pub(crate) fn rank_counts(n1: &[u64], ndot: &[u64], order: &mut Vec<usize>) -> RankedList {
    let cmp = |i: usize, j: usize| -> Ordering {
        (n1[i] as u128 * ndot[j] as u128).cmp(&(n1[j] as u128 * ndot[i] as u128))
    };
    order.clear();
    order.extend(0..n1.len());
    order.sort_unstable_by(|&i, &j| cmp(j, i).then(i.cmp(&j)));
    RankedList::from_sorted(order, |i, j| cmp(i, j) == Ordering::Equal)
}

/// `max_j (hits_j·(N−N_G) − misses_j·N_G)` over tie-set boundaries, floored
/// at 0 (the value at `j = J`). Dividing by `N_G·(N−N_G)` gives KS(G).
///
/// Between two tie sets holding members only misses accumulate, so the
/// maximum is attained at a tie set that contains a member, or at J.
pub(crate) fn ks_numerator(ranks: &RankedList, members: &[usize], scratch: &mut Vec<usize>) -> i64 {
    let n = ranks.n_items() as i64;
    let n_g = members.len() as i64;
    scratch.clear();
    scratch.extend(members.iter().map(|&i| ranks.tie_of[i]));
    scratch.sort_unstable();
    let mut best = 0i64;
    let mut hits = 0i64;
    let mut k = 0;
    while k < scratch.len() {
        let j = scratch[k];
        while k < scratch.len() && scratch[k] == j {
            hits += 1;
            k += 1;
        }
        let misses = ranks.cum[j] as i64 - hits;
        best = best.max(hits * (n - n_g) - misses * n_g);
    }
    best
}

fn validated_members(ranks: &RankedList, group: &[usize]) -> Result<Vec<usize>> {
    let mut members = group.to_vec();
    members.sort_unstable();
    members.dedup();
    let n = ranks.n_items();
    if let Some(&bad) = members.iter().find(|&&i| i >= n) {
        return Err(AeError::InvalidGroup {
            name: String::new(),
            detail: format!("member index {bad} out of range for {n} AEs"),
        });
    }
    check_group_size("", members.len(), n)?;
    Ok(members)
}

/// KS(G): the largest amount by which the in-group fraction leads the
/// out-of-group fraction, evaluated at tie-set boundaries.
pub fn ks_statistic<T: Scalar>(ranks: &RankedList, group: &[usize]) -> Result<T> {
    let members = validated_members(ranks, group)?;
    let num = ks_numerator(ranks, &members, &mut Vec::new());
    let n_g = members.len() as u64;
    Ok(T::ratio(num as u64, n_g * (ranks.n_items() as u64 - n_g)))
}

/// Zero-RR proportions inside and outside a group and the gate
/// `p0_in <= p0_out`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroGate<T> {
    pub p0_in: T,
    pub p0_out: T,
    pub gate: bool,
}

/// Exact gate from zero counts: `z_in/N_G <= z_out/(N−N_G)`.
#[inline]
pub(crate) fn gate_exact(zeros_in: u64, zeros_total: u64, n_g: u64, n: u64) -> bool {
    zeros_in as u128 * (n - n_g) as u128 <= (zeros_total - zeros_in) as u128 * n_g as u128
}

pub(crate) fn zero_gate_counts<T: Scalar>(zeros_in: u64, zeros_total: u64, n_g: u64, n: u64) -> ZeroGate<T> {
    ZeroGate {
        p0_in: T::ratio(zeros_in, n_g),
        p0_out: T::ratio(zeros_total - zeros_in, n - n_g),
        gate: gate_exact(zeros_in, zeros_total, n_g, n),
    }
}

pub fn zero_gate<T: Scalar>(rr: &RrVector, group: &[usize]) -> Result<ZeroGate<T>> {
    let n = rr.len();
    let mut members = group.to_vec();
    members.sort_unstable();
    members.dedup();
    if let Some(&bad) = members.iter().find(|&&i| i >= n) {
        return Err(AeError::InvalidGroup {
            name: String::new(),
            detail: format!("member index {bad} out of range for {n} AEs"),
        });
    }
    check_group_size("", members.len(), n)?;
    let zeros_total = (0..n).filter(|&i| rr.is_zero(i)).count() as u64;
    let zeros_in = members.iter().filter(|&&i| rr.is_zero(i)).count() as u64;
    Ok(zero_gate_counts(zeros_in, zeros_total, members.len() as u64, n as u64))
}

/// Composite AEKS score for one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupScore<T> {
    pub ks: T,
    pub p0_in: T,
    pub p0_out: T,
    pub gate: bool,
    pub es: T,
}

/// `ES(G) = KS(G) · I(p0_in <= p0_out)`.
pub fn enrichment_score<T: Scalar>(table: &ContingencyTable, group: &[usize]) -> Result<GroupScore<T>> {
    let rr = compute_rr(table)?;
    let ranks = rank_with_ties(&rr);
    let ks: T = ks_statistic(&ranks, group)?;
    let z: ZeroGate<T> = zero_gate(&rr, group)?;
    Ok(GroupScore {
        ks,
        p0_in: z.p0_in,
        p0_out: z.p0_out,
        gate: z.gate,
        es: if z.gate { ks } else { T::zero() },
    })
}

/// Monte Carlo / permutation settings shared by both tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonteCarloConfig {
    pub replicates: usize,
    pub seed: u64,
    /// Report `(1 + k) / (1 + M)` instead of `k / M`.
    pub pseudo_count: bool,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            replicates: 5000,
            seed: 0,
            pseudo_count: false,
        }
    }
}

impl MonteCarloConfig {
    pub fn new(replicates: usize, seed: u64) -> Self {
        Self {
            replicates,
            seed,
            pseudo_count: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(AeError::Config("replicates must be >= 1".into()));
        }
        Ok(())
    }

    pub(crate) fn p_value<T: Scalar>(&self, exceed: u64) -> T {
        let m = self.replicates as u64;
        if self.pseudo_count {
            T::ratio(exceed + 1, m + 1)
        } else {
            T::ratio(exceed, m)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AeksGroupResult<T> {
    pub group: String,
    pub size: usize,
    pub es: T,
    pub ks: T,
    pub p0_in: T,
    pub p0_out: T,
    pub gate: bool,
    pub p_value: T,
    pub q_value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AeResult<T> {
    pub ae_term: String,
    pub rr: T,
    pub p_value: T,
    pub q_value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnrichmentResult<T> {
    pub groups: Vec<AeksGroupResult<T>>,
    pub aes: Vec<AeResult<T>>,
}

/// Observed integer statistics of one group.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ExactGroupStat {
    pub ks_num: i64,
    pub zeros_in: u64,
    pub gate: bool,
}

impl ExactGroupStat {
    pub fn es_num(&self) -> i64 {
        if self.gate {
            self.ks_num
        } else {
            0
        }
    }
}

pub(crate) fn exact_group_stats(
    n1: &[u64],
    ranks: &RankedList,
    groups: &[AeGroup],
    scratch: &mut Vec<usize>,
) -> Vec<ExactGroupStat> {
    let n = n1.len() as u64;
    let zeros_total = n1.iter().filter(|&&x| x == 0).count() as u64;
    groups
        .iter()
        .map(|g| {
            let zeros_in = g.members.iter().filter(|&&i| n1[i] == 0).count() as u64;
            ExactGroupStat {
                ks_num: ks_numerator(ranks, &g.members, scratch),
                zeros_in,
                gate: gate_exact(zeros_in, zeros_total, g.members.len() as u64, n),
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
struct Exceedances {
    groups: Vec<u64>,
    aes: Vec<u64>,
}

impl Exceedances {
    fn new(n_groups: usize, n_aes: usize) -> Self {
        Self {
            groups: vec![0; n_groups],
            aes: vec![0; n_aes],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.groups.iter_mut().zip(other.groups) {
            *a += b;
        }
        for (a, b) in self.aes.iter_mut().zip(other.aes) {
            *a += b;
        }
        self
    }
}

/// Full AEKS test: observed scores, conditional multinomial null with
/// `cfg.replicates` draws, group and per-AE p-values and BH q-values.
///
/// Replicate `m` draws from stream `(cfg.seed, m)`; results do not depend on
/// how replicates are spread over rayon workers.
pub fn aeks_test<T: Scalar>(
    table: &ContingencyTable,
    groups: &GroupMap,
    cfg: &MonteCarloConfig,
) -> Result<EnrichmentResult<T>> {
    cfg.validate()?;
    if groups.n_terms() != table.len() {
        return Err(AeError::Config(format!(
            "group map built for {} AEs, table has {}",
            groups.n_terms(),
            table.len()
        )));
    }
    let rr = compute_rr(table)?;
    let n = table.len();
    let ndot = table.ndot();
    let obs_n1 = table.n1();
    let mut order = Vec::new();
    let ranks = rank_counts(obs_n1, ndot, &mut order);
    let obs = exact_group_stats(obs_n1, &ranks, groups.groups(), &mut Vec::new());
    let model = NullModel::from_table(table)?;

    let counts = (0..cfg.replicates as u64)
        .into_par_iter()
        .fold(
            || (Exceedances::new(groups.len(), n), vec![0u64; n], Vec::new(), Vec::new()),
            |(mut acc, mut n1, mut order, mut scratch), m| {
                let mut rng = RngStream::new(cfg.seed, m).rng();
                model.sample_into(&mut rng, &mut n1);
                let ranks = rank_counts(&n1, ndot, &mut order);
                let stats = exact_group_stats(&n1, &ranks, groups.groups(), &mut scratch);
                for (k, (s, o)) in stats.iter().zip(&obs).enumerate() {
                    if s.es_num() >= o.es_num() {
                        acc.groups[k] += 1;
                    }
                }
                for i in 0..n {
                    if n1[i] >= obs_n1[i] {
                        acc.aes[i] += 1;
                    }
                }
                (acc, n1, order, scratch)
            },
        )
        .map(|(acc, ..)| acc)
        .reduce(|| Exceedances::new(groups.len(), n), Exceedances::merge);

    let zeros_total = obs_n1.iter().filter(|&&x| x == 0).count() as u64;
    let group_p: Vec<T> = counts.groups.iter().map(|&k| cfg.p_value(k)).collect();
    let group_q = bh_qvalues(&group_p);
    let group_results = groups
        .groups()
        .iter()
        .zip(&obs)
        .enumerate()
        .map(|(k, (g, s))| {
            let n_g = g.members.len() as u64;
            let denom = n_g * (n as u64 - n_g);
            let z: ZeroGate<T> = zero_gate_counts(s.zeros_in, zeros_total, n_g, n as u64);
            AeksGroupResult {
                group: g.name.clone(),
                size: g.members.len(),
                es: T::ratio(s.es_num() as u64, denom),
                ks: T::ratio(s.ks_num as u64, denom),
                p0_in: z.p0_in,
                p0_out: z.p0_out,
                gate: s.gate,
                p_value: group_p[k],
                q_value: group_q[k],
            }
        })
        .collect();

    let ae_p: Vec<T> = counts.aes.iter().map(|&k| cfg.p_value(k)).collect();
    let ae_q = bh_qvalues(&ae_p);
    let rr_t: Vec<T> = rr.to_scalars();
    let aes = (0..n)
        .map(|i| AeResult {
            ae_term: table.ae_terms()[i].clone(),
            rr: rr_t[i],
            p_value: ae_p[i],
            q_value: ae_q[i],
        })
        .collect();

    Ok(EnrichmentResult {
        groups: group_results,
        aes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n1: &[u64], ndot: &[u64]) -> ContingencyTable {
        let terms = (0..n1.len()).map(|i| format!("AE{i}")).collect();
        let n1_total = n1.iter().sum();
        let n_total = ndot.iter().sum::<u64>() * 2;
        ContingencyTable::new(terms, n1.to_vec(), ndot.to_vec(), n1_total, n_total).unwrap()
    }

    #[test]
    fn rr_examples() {
        let rr = compute_rr(&table(&[5, 0, 3], &[10, 7, 3])).unwrap();
        assert_eq!(rr.to_scalars::<f64>(), vec![0.5, 0.0, 1.0]);
        assert!(rr.is_zero(1));
    }

    #[test]
    fn rr_rejects_zero_total() {
        let t = ContingencyTable::new(vec!["X".into(), "Y".into()], vec![0, 1], vec![0, 2], 1, 4).unwrap();
        match compute_rr(&t) {
            Err(AeError::DegenerateAe(term)) => assert_eq!(term, "X"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tie_sets() {
        let rr = compute_rr(&table(&[1, 2, 1], &[2, 4, 5])).unwrap();
        let r = rank_with_ties(&rr);
        assert_eq!(r.tie_sets(), &[vec![0, 1], vec![2]]);
        let all = rank_with_ties(&compute_rr(&table(&[1, 1, 1], &[3, 3, 3])).unwrap());
        assert_eq!(all.n_tie_sets(), 1);
        // 1/3 and 2/6 are one tie set
        let exact = rank_with_ties(&compute_rr(&table(&[1, 2], &[3, 6])).unwrap());
        assert_eq!(exact.tie_sets(), &[vec![0, 1]]);
    }

    #[test]
    fn zero_ratios_with_different_totals_tie() {
        let r = rank_with_ties(&compute_rr(&table(&[0, 0, 1], &[7, 3, 9])).unwrap());
        assert_eq!(r.tie_sets(), &[vec![2], vec![0, 1]]);
    }

    #[test]
    fn rank_counts_matches_ratio_ranking() {
        let n1 = [3, 0, 2, 6, 1, 0, 4];
        let nd = [9, 4, 6, 18, 7, 2, 5];
        let by_ratio = rank_with_ties(&compute_rr(&table(&n1, &nd)).unwrap());
        let by_counts = rank_counts(&n1, &nd, &mut Vec::new());
        assert_eq!(by_ratio, by_counts);
    }

    #[test]
    fn ks_examples() {
        // four distinct ratios, group = the top two
        let r = rank_with_ties(&compute_rr(&table(&[4, 3, 2, 1], &[5, 5, 5, 5])).unwrap());
        assert_eq!(ks_statistic::<f64>(&r, &[0, 1]).unwrap(), 1.0);
        let tied = rank_with_ties(&compute_rr(&table(&[1, 1, 1, 1], &[5, 5, 5, 5])).unwrap());
        assert_eq!(ks_statistic::<f64>(&tied, &[0, 1]).unwrap(), 0.0);
        // ranked (g, x, g, x, x): max at i=3 is 2/2 - 1/3
        let r5 = rank_with_ties(&compute_rr(&table(&[5, 4, 3, 2, 1], &[6, 6, 6, 6, 6])).unwrap());
        let ks: f64 = ks_statistic(&r5, &[0, 2]).unwrap();
        assert!((ks - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ks_rejects_bad_groups() {
        let r = rank_with_ties(&compute_rr(&table(&[1, 2], &[3, 3])).unwrap());
        assert!(ks_statistic::<f64>(&r, &[]).is_err());
        assert!(ks_statistic::<f64>(&r, &[0, 1]).is_err());
        assert!(ks_statistic::<f64>(&r, &[5]).is_err());
    }

    #[test]
    fn gate_examples() {
        let rr = compute_rr(&table(&[0, 0, 1, 2], &[3, 3, 3, 3])).unwrap();
        assert!(!zero_gate::<f64>(&rr, &[0, 1]).unwrap().gate);
        let no_zero = compute_rr(&table(&[1, 2, 1], &[3, 3, 3])).unwrap();
        let z: ZeroGate<f64> = zero_gate(&no_zero, &[0]).unwrap();
        assert_eq!((z.p0_in, z.p0_out, z.gate), (0.0, 0.0, true));
        // group {2 zeros of 4}, complement {1 zero of 6}
        let rr = compute_rr(&table(&[0, 0, 1, 1, 0, 1, 1, 1, 1, 1], &[2; 10])).unwrap();
        let z: ZeroGate<f64> = zero_gate(&rr, &[0, 1, 2, 3]).unwrap();
        assert_eq!(z.p0_in, 0.5);
        assert!((z.p0_out - 1.0 / 6.0).abs() < 1e-15);
        assert!(!z.gate);
    }

    #[test]
    fn enrichment_score_composes() {
        let top = table(&[4, 3, 2, 1], &[5, 5, 5, 5]);
        let s: GroupScore<f64> = enrichment_score(&top, &[0, 1]).unwrap();
        assert_eq!((s.es, s.gate), (1.0, true));

        let gated = table(&[0, 0, 3, 1], &[5, 5, 5, 5]);
        let s: GroupScore<f64> = enrichment_score(&gated, &[0, 1]).unwrap();
        assert!(!s.gate);
        assert_eq!(s.es, 0.0);

        let five = table(&[5, 4, 3, 2, 1], &[6, 6, 6, 6, 6]);
        let s: GroupScore<f64> = enrichment_score(&five, &[0, 2]).unwrap();
        assert!(s.gate);
        assert!((s.es - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_score_has_unit_p_value() {
        let t = table(&[0, 0, 3, 1, 2, 5], &[5, 5, 5, 5, 5, 5]);
        let groups = GroupMap::new(6, vec![AeGroup { name: "g".into(), members: vec![0, 1] }]).unwrap();
        let res: EnrichmentResult<f64> = aeks_test(&t, &groups, &MonteCarloConfig::new(200, 1)).unwrap();
        assert_eq!(res.groups[0].es, 0.0);
        assert_eq!(res.groups[0].p_value, 1.0);
    }

    #[test]
    fn config_rejects_zero_replicates() {
        let t = table(&[1, 2], &[3, 3]);
        let groups = GroupMap::new(2, vec![AeGroup { name: "g".into(), members: vec![0] }]).unwrap();
        let cfg = MonteCarloConfig::new(0, 1);
        assert!(matches!(aeks_test::<f64>(&t, &groups, &cfg), Err(AeError::Config(_))));
    }

    #[test]
    fn pseudo_count_is_strictly_positive() {
        let cfg = MonteCarloConfig { replicates: 99, seed: 0, pseudo_count: true };
        assert_eq!(cfg.p_value::<f64>(0), 0.01);
        assert_eq!(MonteCarloConfig::new(100, 0).p_value::<f64>(0), 0.0);
    }
}
