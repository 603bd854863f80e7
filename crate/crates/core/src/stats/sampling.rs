use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{AeError, Result};
use crate::ingest::ContingencyTable;

use super::rng::RngStream;

/// Conditional multinomial null for the target-vaccine counts.
///
/// Category probabilities are `r_i = ndot[i] / n_total`, kept as the integer
/// weights `ndot[i]` and renormalized by their sum when sampling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullModel {
    weights: Vec<u64>,
    suffix: Vec<u64>,
    n_total: u64,
    trials: u64,
}

impl NullModel {
    pub fn new(weights: Vec<u64>, n_total: u64, trials: u64) -> Result<Self> {
        let mut suffix = vec![0u64; weights.len() + 1];
        for i in (0..weights.len()).rev() {
            suffix[i] = suffix[i + 1] + weights[i];
        }
        if trials > 0 && suffix[0] == 0 {
            return Err(AeError::Config(
                "null model has positive trials but no probability mass".into(),
            ));
        }
        if n_total == 0 {
            return Err(AeError::Config("null model needs n_total > 0".into()));
        }
        Ok(Self {
            weights,
            suffix,
            n_total,
            trials,
        })
    }

    pub fn from_table(table: &ContingencyTable) -> Result<Self> {
        Self::new(table.ndot().to_vec(), table.n_total(), table.n1_total())
    }

    /// `r_i = ndot[i] / n_total` as stated, before renormalization.
    pub fn probs(&self) -> Vec<f64> {
        self.weights
            .iter()
            .map(|&w| w as f64 / self.n_total as f64)
            .collect()
    }

    /// Renormalized category probabilities actually used for sampling.
    pub fn normalized_probs(&self) -> Vec<f64> {
        let s = self.suffix[0] as f64;
        self.weights.iter().map(|&w| w as f64 / s).collect()
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Draws into `out` using an existing generator.
    #[allow(clippy::needless_range_loop)]
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [u64]) {
        debug_assert_eq!(out.len(), self.weights.len());
        out.fill(0);
        let mut left = self.trials;
        for i in 0..self.weights.len() {
            if left == 0 {
                break;
            }
            let w = self.weights[i];
            if w == 0 {
                continue;
            }
            let rest = self.suffix[i];
            if w == rest {
                out[i] = left;
                break;
            }
            let p = w as f64 / rest as f64;
            let x = Binomial::new(left, p)
                .expect("conditional probability lies in (0, 1)")
                .sample(rng);
            out[i] = x;
            left -= x;
        }
    }
}

/// One multinomial draw of `model.trials()` counts over the categories.
pub fn multinomial_sample(model: &NullModel, stream: RngStream) -> Vec<u64> {
    let mut out = vec![0; model.len()];
    model.sample_into(&mut stream.rng(), &mut out);
    out
}
