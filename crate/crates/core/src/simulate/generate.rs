use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::error::{AeError, Result};
use crate::ingest::{AeGroup, ContingencyTable, GroupMap};
use crate::stats::{derive_seed, RngStream};

use super::surrogate::Surrogates;

const GENERATE_TAG: u64 = 0x6745_4e45;

// n_total = ceil(N_TOTAL_SCALE * sum(ndot)) keeps sum(r_i) below 1.
const N_TOTAL_SCALE: f64 = 1.2;

/// Simulation design. Defaults: 150 groups, N_G ≥ 10, 10% enriched; enriched
/// groups have p0 ~ U(0.1, 0.3) and λ > 0.3; un-enriched groups are either
/// variant A (p0 ~ U(0.4, 0.6), λ unconstrained) or variant B
/// (λ < 0.4, p0 ~ U(0.1, 0.6)).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub n_groups: usize,
    pub min_group_size: u64,
    pub enriched_frac: f64,
    pub enriched_p0_range: (f64, f64),
    pub enriched_rate_min: f64,
    pub unenriched_a_p0_range: (f64, f64),
    pub unenriched_b_rate_max: f64,
    pub unenriched_b_p0_range: (f64, f64),
    /// Probability that an un-enriched group follows variant A.
    pub variant_a_prob: f64,
    /// Number of datasets.
    pub replicates: usize,
    pub seed: u64,
    #[serde(skip)]
    pub surrogates: Surrogates,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_groups: 150,
            min_group_size: 10,
            enriched_frac: 0.10,
            enriched_p0_range: (0.1, 0.3),
            enriched_rate_min: 0.3,
            unenriched_a_p0_range: (0.4, 0.6),
            unenriched_b_rate_max: 0.4,
            unenriched_b_p0_range: (0.1, 0.6),
            variant_a_prob: 0.5,
            replicates: 10,
            seed: 0,
            surrogates: Surrogates::default(),
        }
    }
}

fn valid_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(AeError::Config(format!("{name} range ({lo}, {hi}) must lie in [0, 1] with lo <= hi")));
    }
    Ok(())
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_groups < 2 {
            return Err(AeError::Config("need at least 2 groups".into()));
        }
        if self.min_group_size < 1 {
            return Err(AeError::Config("min_group_size must be >= 1".into()));
        }
        if !(self.enriched_frac > 0.0 && self.enriched_frac < 1.0) {
            return Err(AeError::Config(format!("enriched_frac {} not in (0, 1)", self.enriched_frac)));
        }
        let k = self.n_enriched();
        if k == 0 || k == self.n_groups {
            return Err(AeError::Config(format!(
                "enriched_frac {} gives {k} enriched of {} groups; need both classes",
                self.enriched_frac, self.n_groups
            )));
        }
        valid_range("enriched_p0", self.enriched_p0_range)?;
        valid_range("unenriched_a_p0", self.unenriched_a_p0_range)?;
        valid_range("unenriched_b_p0", self.unenriched_b_p0_range)?;
        if !(0.0..1.0).contains(&self.enriched_rate_min) {
            return Err(AeError::Config("enriched_rate_min must lie in [0, 1)".into()));
        }
        if !(self.unenriched_b_rate_max > 0.0 && self.unenriched_b_rate_max <= 1.0) {
            return Err(AeError::Config("unenriched_b_rate_max must lie in (0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.variant_a_prob) {
            return Err(AeError::Config("variant_a_prob must lie in [0, 1]".into()));
        }
        if self.replicates < 1 {
            return Err(AeError::Config("replicates must be >= 1".into()));
        }
        Ok(())
    }

    pub fn n_enriched(&self) -> usize {
        (self.enriched_frac * self.n_groups as f64).round() as usize
    }
}

/// A synthetic table with ground-truth group labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SimDataset {
    pub table: ContingencyTable,
    pub groups: GroupMap,
    pub truth: Vec<bool>,
}

struct GroupRecipe {
    p0: (f64, f64),
    rate: (f64, f64),
}

/// Generates dataset `dataset` of the design; groups are disjoint and cover
/// every AE.
pub fn generate(cfg: &SimConfig, dataset: u64) -> Result<SimDataset> {
    cfg.validate()?;
    let mut rng = RngStream::new(derive_seed(cfg.seed, GENERATE_TAG), dataset).rng();
    let s = &cfg.surrogates;

    let sizes = (0..cfg.n_groups)
        .map(|_| s.group_size(&mut rng, cfg.min_group_size))
        .collect::<Result<Vec<_>>>()?;
    let mut truth = vec![false; cfg.n_groups];
    for g in index::sample(&mut rng, cfg.n_groups, cfg.n_enriched()) {
        truth[g] = true;
    }

    let n: usize = sizes.iter().sum::<u64>() as usize;
    let width = n.to_string().len().max(4);
    let gwidth = cfg.n_groups.to_string().len().max(3);
    let mut terms = Vec::with_capacity(n);
    let mut n1 = Vec::with_capacity(n);
    let mut ndot = Vec::with_capacity(n);
    let mut groups = Vec::with_capacity(cfg.n_groups);

    for (g, &size) in sizes.iter().enumerate() {
        let recipe = if truth[g] {
            GroupRecipe {
                p0: cfg.enriched_p0_range,
                rate: (cfg.enriched_rate_min, 1.0),
            }
        } else if rng.random_bool(cfg.variant_a_prob) {
            GroupRecipe {
                p0: cfg.unenriched_a_p0_range,
                rate: (0.0, 1.0),
            }
        } else {
            GroupRecipe {
                p0: cfg.unenriched_b_p0_range,
                rate: (0.0, cfg.unenriched_b_rate_max),
            }
        };
        let p0 = if recipe.p0.0 < recipe.p0.1 {
            rng.random_range(recipe.p0.0..recipe.p0.1)
        } else {
            recipe.p0.0
        };
        let n_zero = ((p0 * size as f64).round() as usize).min(size as usize);
        let mut is_zero = vec![false; size as usize];
        is_zero[..n_zero].fill(true);
        is_zero.shuffle(&mut rng);

        let start = terms.len();
        for zero in is_zero {
            let total = s.total(&mut rng)?;
            let count = if zero {
                0
            } else {
                let lambda = s.rate(&mut rng, recipe.rate.0, recipe.rate.1)?;
                let mean = total as f64 * lambda;
                if mean > 0.0 {
                    let x: f64 = Poisson::new(mean).expect("positive mean").sample(&mut rng);
                    (x as u64).min(total)
                } else {
                    0
                }
            };
            terms.push(format!("AE{:0width$}", terms.len() + 1));
            n1.push(count);
            ndot.push(total);
        }
        groups.push(AeGroup {
            name: format!("G{:0gwidth$}", g + 1),
            members: (start..terms.len()).collect(),
        });
    }

    let n1_total: u64 = n1.iter().sum();
    let n_total = (N_TOTAL_SCALE * ndot.iter().sum::<u64>() as f64).ceil() as u64;
    let table = ContingencyTable::new(terms, n1, ndot, n1_total.max(1), n_total)?;
    let groups = GroupMap::new(n, groups)?;
    Ok(SimDataset { table, groups, truth })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_design_counts() {
        let ds = generate(&SimConfig::default(), 0).unwrap();
        assert_eq!(ds.groups.len(), 150);
        assert_eq!(ds.truth.iter().filter(|&&t| t).count(), 15);
        assert!(ds.groups.groups().iter().all(|g| g.len() >= 10));
        let covered: usize = ds.groups.groups().iter().map(|g| g.len()).sum();
        assert_eq!(covered, ds.table.len());
        let sum_ndot: u64 = ds.table.ndot().iter().sum();
        assert!(sum_ndot <= ds.table.n_total());
        assert_eq!(ds.table.n1_total(), ds.table.n1().iter().sum::<u64>());
    }

    #[test]
    fn deterministic_per_seed_and_index() {
        let cfg = SimConfig { n_groups: 20, ..SimConfig::default() };
        assert_eq!(generate(&cfg, 3).unwrap(), generate(&cfg, 3).unwrap());
        assert_ne!(generate(&cfg, 3).unwrap().table, generate(&cfg, 4).unwrap().table);
    }

    #[test]
    fn enriched_groups_follow_recipe() {
        let cfg = SimConfig::default();
        let ds = generate(&cfg, 1).unwrap();
        for (g, &enriched) in ds.groups.groups().iter().zip(&ds.truth) {
            let zeros = g.members.iter().filter(|&&i| ds.table.n1()[i] == 0).count() as f64;
            let frac = zeros / g.len() as f64;
            if enriched {
                // designated zeros plus the odd Poisson zero
                assert!(frac >= 0.1 - 0.5 / g.len() as f64, "{frac}");
            }
        }
    }

    #[test]
    fn config_errors() {
        assert!(SimConfig { enriched_frac: 0.0, ..SimConfig::default() }.validate().is_err());
        assert!(SimConfig { enriched_frac: 1.0, ..SimConfig::default() }.validate().is_err());
        assert!(SimConfig { replicates: 0, ..SimConfig::default() }.validate().is_err());
        assert!(SimConfig { enriched_p0_range: (0.5, 0.2), ..SimConfig::default() }.validate().is_err());
        assert!(SimConfig { n_groups: 4, ..SimConfig::default() }.validate().is_err());
    }
}
