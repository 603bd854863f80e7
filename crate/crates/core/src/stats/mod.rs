//! Statistical primitives shared by both enrichment tests.

mod fdr;
mod fisher;
mod rng;
mod sampling;

pub use fdr::bh_qvalues;
pub use fisher::{fisher_exact, odds_ratio, ExactOdds, OddsCorrection, Sidedness, TwoByTwo};
pub use rng::{derive_seed, RngStream};
pub use sampling::{multinomial_sample, NullModel};
