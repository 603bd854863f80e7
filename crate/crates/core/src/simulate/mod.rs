//! Simulation study: synthetic AE tables with known enriched groups, the two
//! enrichment tests against their classic baselines, and ROC summaries.

mod benchmark;
mod generate;
mod methods;
mod roc;
mod surrogate;

pub use benchmark::{benchmark, paired_comparison, BenchmarkReport, MethodSummary, PairedTest};
pub use generate::{generate, SimConfig, SimDataset};
pub use methods::{fisher_baseline_pvalues, gsea_baseline_ks, gsea_baseline_test, run_methods, Method, MethodScores};
pub use roc::{roc, RocCurve, RocPoint};
pub use surrogate::{read_empirical, Surrogates};
