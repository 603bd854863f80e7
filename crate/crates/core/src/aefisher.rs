//! AEFisher: per-AE exact tests, BH-based signal calls, and a zero-gated
//! group odds ratio assessed by permutation.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::aeks::{compute_rr, gate_exact, zero_gate_counts, MonteCarloConfig, RrVector, ZeroGate};
use crate::error::{AeError, Result};
use crate::ingest::{check_group_size, ContingencyTable, GroupMap};
use crate::scalar::Scalar;
use crate::stats::{
    bh_qvalues, fisher_exact, odds_ratio, ExactOdds, OddsCorrection, RngStream, Sidedness, TwoByTwo,
};

/// Signal thresholds: an AE is signaled when `q < q_cut` and `OR > or_cut`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalRule {
    pub q_cut: f64,
    pub or_cut: f64,
}

impl Default for SignalRule {
    fn default() -> Self {
        Self {
            q_cut: 0.1,
            or_cut: 1.5,
        }
    }
}

impl SignalRule {
    pub fn validate(&self) -> Result<()> {
        if !(self.q_cut > 0.0 && self.q_cut < 1.0) {
            return Err(AeError::Config(format!("q_cut {} not in (0, 1)", self.q_cut)));
        }
        if !(self.or_cut > 0.0 && self.or_cut.is_finite()) {
            return Err(AeError::Config(format!("or_cut {} must be positive", self.or_cut)));
        }
        Ok(())
    }
}

/// How the permutation null moves per-AE records against group membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationScheme {
    /// Signal status and zero status travel together.
    #[default]
    JointRecord,
    /// Only signal labels are shuffled; the zero gate stays at its observed value.
    LabelOnly,
}

/// Vaccine × AE table for AE `i`, built so every margin matches the 2×N table:
/// `[[n1, n1_total − n1], [ndot − n1, (n_total − n1_total) − (ndot − n1)]]`.
pub fn ae_2x2(table: &ContingencyTable, i: usize) -> Result<TwoByTwo> {
    let term = &table.ae_terms()[i];
    let n1 = table.n1()[i];
    let ndot = table.ndot()[i];
    let bad = |detail: &str| AeError::Consistency {
        term: term.clone(),
        detail: detail.to_string(),
    };
    let b = table
        .n1_total()
        .checked_sub(n1)
        .ok_or_else(|| bad("n1i exceeds n1_total"))?;
    let c = ndot.checked_sub(n1).ok_or_else(|| bad("n1i exceeds ndoti"))?;
    let d = (table.n_total() - table.n1_total())
        .checked_sub(c)
        .ok_or_else(|| bad("ndoti - n1i exceeds n_total - n1_total"))?;
    Ok(TwoByTwo::new(n1, b, c, d))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AeSignal<T> {
    pub ae_term: String,
    pub p_value: T,
    pub q_value: T,
    pub odds_ratio: T,
    pub signaled: bool,
    pub zero_rr: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AeSignalTable<T> {
    pub rows: Vec<AeSignal<T>>,
}

impl<T> AeSignalTable<T> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_signaled(&self) -> usize {
        self.rows.iter().filter(|r| r.signaled).count()
    }
}

/// Exact test per AE, BH across all AEs, then the signal rule.
pub fn classify_signals<T: Scalar>(
    table: &ContingencyTable,
    rule: &SignalRule,
    sidedness: Sidedness,
) -> Result<AeSignalTable<T>> {
    rule.validate()?;
    let tables = (0..table.len())
        .map(|i| ae_2x2(table, i))
        .collect::<Result<Vec<_>>>()?;
    let p: Vec<T> = tables.par_iter().map(|t| fisher_exact(t, sidedness)).collect();
    let q = bh_qvalues(&p);
    let rows = tables
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let or: T = odds_ratio(t, OddsCorrection::Haldane)?;
            let zero_rr = t.a == 0;
            let signaled = !zero_rr
                && q[i].to_f64_lossy() < rule.q_cut
                && or.to_f64_lossy() > rule.or_cut;
            Ok(AeSignal {
                ae_term: table.ae_terms()[i].clone(),
                p_value: p[i],
                q_value: q[i],
                odds_ratio: or,
                signaled,
                zero_rr,
            })
        })
        .collect::<Result<_>>()?;
    Ok(AeSignalTable { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherGroupScore<T> {
    pub or_g: T,
    pub gate: bool,
    pub es: T,
}

/// Signaled × membership table for a group with `signaled_in` of `n_g`
/// members signaled and `signaled_total` signaled overall.
pub fn membership_2x2(signaled_in: u64, n_g: u64, signaled_total: u64, n: u64) -> TwoByTwo {
    TwoByTwo::new(
        signaled_in,
        n_g - signaled_in,
        signaled_total - signaled_in,
        (n - n_g) - (signaled_total - signaled_in),
    )
}

fn exact_es(signaled_in: u64, zeros_in: u64, n_g: u64, s_total: u64, z_total: u64, n: u64) -> ExactOdds {
    if gate_exact(zeros_in, z_total, n_g, n) {
        ExactOdds::from_table(&membership_2x2(signaled_in, n_g, s_total, n), OddsCorrection::Haldane)
    } else {
        ExactOdds::ZERO
    }
}

/// `ES(G) = OR^G · I(p0_in <= p0_out)` with a Haldane-corrected OR^G.
pub fn group_es<T: Scalar>(
    signals: &AeSignalTable<T>,
    group: &[usize],
    rr: &RrVector,
) -> Result<FisherGroupScore<T>> {
    let n = signals.len();
    if rr.len() != n {
        return Err(AeError::Config(format!(
            "signal table has {n} AEs, RR vector {}",
            rr.len()
        )));
    }
    let mut members = group.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.iter().any(|&i| i >= n) {
        return Err(AeError::InvalidGroup {
            name: String::new(),
            detail: "member index out of range".into(),
        });
    }
    check_group_size("", members.len(), n)?;
    let s_total = signals.n_signaled() as u64;
    let s_in = members.iter().filter(|&&i| signals.rows[i].signaled).count() as u64;
    let z_total = (0..n).filter(|&i| rr.is_zero(i)).count() as u64;
    let z_in = members.iter().filter(|&&i| rr.is_zero(i)).count() as u64;
    let n_g = members.len() as u64;
    let or_g = ExactOdds::from_table(
        &membership_2x2(s_in, n_g, s_total, n as u64),
        OddsCorrection::Haldane,
    );
    let gate = gate_exact(z_in, z_total, n_g, n as u64);
    let or_g: T = or_g.to_scalar();
    Ok(FisherGroupScore {
        or_g,
        gate,
        es: if gate { or_g } else { T::zero() },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FisherGroupResult<T> {
    pub group: String,
    pub size: usize,
    pub es: T,
    pub or_g: T,
    pub gate: bool,
    pub p0_in: T,
    pub p0_out: T,
    pub p_value: T,
    pub q_value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FisherResult<T> {
    pub groups: Vec<FisherGroupResult<T>>,
    pub aes: AeSignalTable<T>,
}

/// Options beyond the signal rule and Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct FisherOptions {
    pub sidedness: Sidedness,
    pub scheme: PermutationScheme,
}

/// Full AEFisher test.
///
/// Replicate `m` shuffles the per-AE records with stream `(cfg.seed, m)` and
/// recomputes every group's gated OR on the fixed membership pattern.
pub fn aefisher_test<T: Scalar>(
    table: &ContingencyTable,
    groups: &GroupMap,
    rule: &SignalRule,
    opts: &FisherOptions,
    cfg: &MonteCarloConfig,
) -> Result<FisherResult<T>> {
    cfg.validate()?;
    if groups.n_terms() != table.len() {
        return Err(AeError::Config(format!(
            "group map built for {} AEs, table has {}",
            groups.n_terms(),
            table.len()
        )));
    }
    let signals: AeSignalTable<T> = classify_signals(table, rule, opts.sidedness)?;
    let rr = compute_rr(table)?;
    let n = table.len();
    let signaled: Vec<bool> = signals.rows.iter().map(|r| r.signaled).collect();
    let zero: Vec<bool> = (0..n).map(|i| rr.is_zero(i)).collect();
    let s_total = signaled.iter().filter(|&&s| s).count() as u64;
    let z_total = zero.iter().filter(|&&z| z).count() as u64;

    let observed: Vec<(u64, u64, ExactOdds)> = groups
        .groups()
        .iter()
        .map(|g| {
            let s_in = g.members.iter().filter(|&&i| signaled[i]).count() as u64;
            let z_in = g.members.iter().filter(|&&i| zero[i]).count() as u64;
            let es = exact_es(s_in, z_in, g.len() as u64, s_total, z_total, n as u64);
            (s_in, z_in, es)
        })
        .collect();

    let exceed = (0..cfg.replicates as u64)
        .into_par_iter()
        .fold(
            || (vec![0u64; groups.len()], Vec::<usize>::with_capacity(n)),
            |(mut acc, mut perm), m| {
                perm.clear();
                perm.extend(0..n);
                perm.shuffle(&mut RngStream::new(cfg.seed, m).rng());
                for (k, g) in groups.groups().iter().enumerate() {
                    let s_in = g.members.iter().filter(|&&i| signaled[perm[i]]).count() as u64;
                    let z_in = match opts.scheme {
                        PermutationScheme::JointRecord => {
                            g.members.iter().filter(|&&i| zero[perm[i]]).count() as u64
                        }
                        PermutationScheme::LabelOnly => observed[k].1,
                    };
                    let es = exact_es(s_in, z_in, g.len() as u64, s_total, z_total, n as u64);
                    if es >= observed[k].2 {
                        acc[k] += 1;
                    }
                }
                (acc, perm)
            },
        )
        .map(|(acc, _)| acc)
        .reduce(
            || vec![0u64; groups.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    let p: Vec<T> = exceed.iter().map(|&k| cfg.p_value(k)).collect();
    let q = bh_qvalues(&p);
    let results = groups
        .groups()
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let (s_in, z_in, es) = observed[k];
            let n_g = g.len() as u64;
            let or_g = ExactOdds::from_table(
                &membership_2x2(s_in, n_g, s_total, n as u64),
                OddsCorrection::Haldane,
            );
            let z: ZeroGate<T> = zero_gate_counts(z_in, z_total, n_g, n as u64);
            FisherGroupResult {
                group: g.name.clone(),
                size: g.len(),
                es: es.to_scalar(),
                or_g: or_g.to_scalar(),
                gate: z.gate,
                p0_in: z.p0_in,
                p0_out: z.p0_out,
                p_value: p[k],
                q_value: q[k],
            }
        })
        .collect();

    Ok(FisherResult {
        groups: results,
        aes: signals,
    })
}
