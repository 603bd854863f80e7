//! The four methods compared in the simulation study.
//!
//! Baselines:
//! - GSEA-style: running-sum KS with tied ratios put in random order and no
//!   zero gate, assessed on the same multinomial null as AEKS.
//! - Plain Fisher: one-sided exact test of signaled × membership, no gate.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::aefisher::{aefisher_test, classify_signals, membership_2x2, AeSignalTable, FisherOptions, SignalRule};
use crate::aeks::{aeks_test, ks_numerator, rank_counts, MonteCarloConfig, RankedList};
use crate::error::Result;
use crate::ingest::{ContingencyTable, GroupMap};
use crate::scalar::Scalar;
use crate::stats::{derive_seed, fisher_exact, ExactOdds, NullModel, OddsCorrection, RngStream, Sidedness};

use super::generate::SimDataset;

const TIE_BREAK_TAG: u64 = 0x7469_6573;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Aeks,
    Gsea,
    AeFisher,
    Fisher,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Aeks, Method::Gsea, Method::AeFisher, Method::Fisher];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Aeks => "aeks",
            Method::Gsea => "gsea",
            Method::AeFisher => "aefisher",
            Method::Fisher => "fisher",
        }
    }

    /// The baseline each proposed method is compared against.
    pub fn baseline(&self) -> Option<Method> {
        match self {
            Method::Aeks => Some(Method::Gsea),
            Method::AeFisher => Some(Method::Fisher),
            _ => None,
        }
    }
}

/// Per-group p-values (the ROC ranking score; smaller is more enriched)
/// plus the observed statistic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodScores<T> {
    pub method: Method,
    pub p_values: Vec<T>,
    pub statistics: Vec<T>,
}

/// Ranking with ties broken by a random order within each tie set.
fn shuffled_ranking(n1: &[u64], ndot: &[u64], stream: RngStream, order: &mut Vec<usize>) -> RankedList {
    let tied = rank_counts(n1, ndot, order);
    let mut rng = stream.rng();
    order.clear();
    for set in tied.tie_sets() {
        let start = order.len();
        order.extend_from_slice(set);
        order[start..].shuffle(&mut rng);
    }
    RankedList::strict(order)
}

fn tie_stream(seed: u64, index: u64) -> RngStream {
    RngStream::new(derive_seed(seed, TIE_BREAK_TAG), index)
}

/// Observed GSEA-baseline KS per group (random tie order, no gate).
pub fn gsea_baseline_ks<T: Scalar>(table: &ContingencyTable, groups: &GroupMap, seed: u64) -> Vec<T> {
    let n = table.len() as u64;
    let ranks = shuffled_ranking(table.n1(), table.ndot(), tie_stream(seed, 0), &mut Vec::new());
    let mut scratch = Vec::new();
    groups
        .groups()
        .iter()
        .map(|g| {
            let n_g = g.len() as u64;
            T::ratio(ks_numerator(&ranks, &g.members, &mut scratch) as u64, n_g * (n - n_g))
        })
        .collect()
}

/// GSEA-baseline p-values on the AEKS multinomial null. Null draws use the
/// same streams as [`aeks_test`] with the same config.
pub fn gsea_baseline_test<T: Scalar>(table: &ContingencyTable, groups: &GroupMap, cfg: &MonteCarloConfig) -> Result<Vec<T>> {
    cfg.validate()?;
    let n = table.len();
    let ndot = table.ndot();
    let obs_ranks = shuffled_ranking(table.n1(), ndot, tie_stream(cfg.seed, 0), &mut Vec::new());
    let mut scratch = Vec::new();
    let obs: Vec<i64> = groups
        .groups()
        .iter()
        .map(|g| ks_numerator(&obs_ranks, &g.members, &mut scratch))
        .collect();
    let model = NullModel::from_table(table)?;
    let exceed = (0..cfg.replicates as u64)
        .into_par_iter()
        .fold(
            || (vec![0u64; groups.len()], vec![0u64; n], Vec::new(), Vec::new()),
            |(mut acc, mut n1, mut order, mut scratch), m| {
                model.sample_into(&mut RngStream::new(cfg.seed, m).rng(), &mut n1);
                let ranks = shuffled_ranking(&n1, ndot, tie_stream(cfg.seed, m + 1), &mut order);
                for (k, g) in groups.groups().iter().enumerate() {
                    if ks_numerator(&ranks, &g.members, &mut scratch) >= obs[k] {
                        acc[k] += 1;
                    }
                }
                (acc, n1, order, scratch)
            },
        )
        .map(|(acc, ..)| acc)
        .reduce(
            || vec![0u64; groups.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(exceed.iter().map(|&k| cfg.p_value(k)).collect())
}

/// Plain Fisher baseline: one-sided exact p-value of signaled × membership.
pub fn fisher_baseline_pvalues<T: Scalar>(signals: &AeSignalTable<T>, groups: &GroupMap) -> Vec<T> {
    let n = signals.len() as u64;
    let s_total = signals.n_signaled() as u64;
    groups
        .groups()
        .iter()
        .map(|g| {
            let s_in = g.members.iter().filter(|&&i| signals.rows[i].signaled).count() as u64;
            fisher_exact(&membership_2x2(s_in, g.len() as u64, s_total, n), Sidedness::Greater)
        })
        .collect()
}

/// Runs AEKS, the GSEA baseline, AEFisher and the plain Fisher baseline.
pub fn run_methods<T: Scalar>(ds: &SimDataset, cfg: &MonteCarloConfig) -> Result<Vec<MethodScores<T>>> {
    let rule = SignalRule::default();
    let aeks = aeks_test::<T>(&ds.table, &ds.groups, cfg)?;
    let gsea_p = gsea_baseline_test::<T>(&ds.table, &ds.groups, cfg)?;
    let gsea_ks = gsea_baseline_ks::<T>(&ds.table, &ds.groups, cfg.seed);
    let aefisher = aefisher_test::<T>(&ds.table, &ds.groups, &rule, &FisherOptions::default(), cfg)?;
    let signals = classify_signals::<T>(&ds.table, &rule, Sidedness::Greater)?;
    let fisher_p = fisher_baseline_pvalues(&signals, &ds.groups);
    let fisher_or = ds
        .groups
        .groups()
        .iter()
        .map(|g| {
            let s_in = g.members.iter().filter(|&&i| signals.rows[i].signaled).count() as u64;
            let t = membership_2x2(s_in, g.len() as u64, signals.n_signaled() as u64, signals.len() as u64);
            ExactOdds::from_table(&t, OddsCorrection::Haldane).to_scalar()
        })
        .collect();

    Ok(vec![
        MethodScores {
            method: Method::Aeks,
            p_values: aeks.groups.iter().map(|g| g.p_value).collect(),
            statistics: aeks.groups.iter().map(|g| g.es).collect(),
        },
        MethodScores {
            method: Method::Gsea,
            p_values: gsea_p,
            statistics: gsea_ks,
        },
        MethodScores {
            method: Method::AeFisher,
            p_values: aefisher.groups.iter().map(|g| g.p_value).collect(),
            statistics: aefisher.groups.iter().map(|g| g.es).collect(),
        },
        MethodScores {
            method: Method::Fisher,
            p_values: fisher_p,
            statistics: fisher_or,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aeks::AeksGroupResult;
    use crate::ingest::AeGroup;
    use crate::simulate::generate::{generate, SimConfig};

    #[test]
    fn no_ties_no_zeros_matches_aeks() {
        let n1 = [9, 1, 8, 2, 7, 3, 6, 4];
        let ndot = [10u64; 8];
        let terms = (0..8).map(|i| format!("A{i}")).collect();
        let t = ContingencyTable::new(terms, n1.to_vec(), ndot.to_vec(), 40, 100).unwrap();
        let groups = GroupMap::new(
            8,
            vec![
                AeGroup { name: "a".into(), members: vec![0, 2, 4] },
                AeGroup { name: "b".into(), members: vec![1, 3] },
            ],
        )
        .unwrap();
        let gsea: Vec<f64> = gsea_baseline_ks(&t, &groups, 11);
        let aeks = aeks_test::<f64>(&t, &groups, &MonteCarloConfig::new(10, 1)).unwrap();
        let ks: Vec<f64> = aeks.groups.iter().map(|g: &AeksGroupResult<f64>| g.ks).collect();
        assert_eq!(gsea, ks);
    }

    #[test]
    fn gate_isolated_from_baseline() {
        // group "z" holds all zeros but also the top ratios
        let n1 = [9, 8, 0, 0, 2, 2, 1, 1];
        let ndot = [10u64; 8];
        let terms = (0..8).map(|i| format!("A{i}")).collect();
        let t = ContingencyTable::new(terms, n1.to_vec(), ndot.to_vec(), 23, 100).unwrap();
        let groups = GroupMap::new(8, vec![AeGroup { name: "z".into(), members: vec![0, 1, 2, 3] }]).unwrap();
        let aeks = aeks_test::<f64>(&t, &groups, &MonteCarloConfig::new(10, 1)).unwrap();
        assert!(!aeks.groups[0].gate);
        assert_eq!(aeks.groups[0].es, 0.0);
        let gsea: Vec<f64> = gsea_baseline_ks(&t, &groups, 3);
        assert!(gsea[0] > 0.0);
        assert_eq!(gsea[0], aeks.groups[0].ks);
    }

    #[test]
    fn seeded_methods_reproducible() {
        let cfg = SimConfig { n_groups: 20, ..SimConfig::default() };
        let ds = generate(&cfg, 0).unwrap();
        let mc = MonteCarloConfig::new(50, 9);
        let a = run_methods::<f64>(&ds, &mc).unwrap();
        let b = run_methods::<f64>(&ds, &mc).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        assert!(a.iter().all(|m| m.p_values.len() == 20));
    }
}
