//! Adverse-event group enrichment for vaccine safety count data.
//!
//! Two tests are provided over a 2×N table of per-AE report counts and a flat
//! group → AE mapping:
//!
//! - [`aeks`]: a tie-aware Kolmogorov–Smirnov running-sum score on reporting
//!   ratios, gated on the proportion of zero counts, with significance from a
//!   conditional multinomial null.
//! - [`aefisher`]: per-AE exact tests and BH signal calls, a zero-gated group
//!   odds ratio, and a permutation null.
//!
//! [`simulate`] generates synthetic datasets with known enriched groups and
//! compares both tests against classic GSEA-style and plain Fisher baselines
//! through ROC curves.
//!
//! Statistics are generic over [`Scalar`] (`f32` or `f64`); reporting ratios
//! are exact fractions. The aliases at the crate root fix the scalar to `f64`.

pub mod aefisher;
pub mod aeks;
pub mod error;
pub mod ingest;
pub mod report;
pub mod scalar;
pub mod simulate;
pub mod stats;

pub use aefisher::{
    aefisher_test, ae_2x2, classify_signals, group_es, FisherOptions, PermutationScheme, SignalRule,
};
pub use aeks::{
    aeks_test, compute_rr, enrichment_score, ks_statistic, rank_with_ties, zero_gate, MonteCarloConfig,
    RankedList, RrVector,
};
pub use error::{AeError, Result};
pub use ingest::{parse_aggregated, parse_groups, parse_reports, AeGroup, ContingencyTable, GroupMap, Totals};
pub use scalar::{Num, Scalar};
pub use stats::{Sidedness, TwoByTwo};

pub type GroupScore = aeks::GroupScore<f64>;
pub type ZeroGate = aeks::ZeroGate<f64>;
pub type EnrichmentResult = aeks::EnrichmentResult<f64>;
pub type AeksGroupResult = aeks::AeksGroupResult<f64>;
pub type AeResult = aeks::AeResult<f64>;
pub type AeSignal = aefisher::AeSignal<f64>;
pub type AeSignalTable = aefisher::AeSignalTable<f64>;
pub type FisherGroupScore = aefisher::FisherGroupScore<f64>;
pub type FisherGroupResult = aefisher::FisherGroupResult<f64>;
pub type FisherResult = aefisher::FisherResult<f64>;
pub type RocCurve = simulate::RocCurve<f64>;

pub type EnrichmentResult32 = aeks::EnrichmentResult<f32>;
pub type FisherResult32 = aefisher::FisherResult<f32>;
