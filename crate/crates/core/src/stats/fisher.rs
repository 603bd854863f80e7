//! Fisher's exact test and odds ratios on 2×2 tables.
//!
//! The hypergeometric PMF is built from the ratio recurrence in log space over
//! the whole support and normalized with log-sum-exp, so no factorial is
//! ever formed and margins in the millions neither overflow nor underflow.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{AeError, Result};
use crate::scalar::Scalar;

/// `[[a, b], [c, d]]`; `a` is exposed-with-event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TwoByTwo {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl TwoByTwo {
    pub fn new(a: u64, b: u64, c: u64, d: u64) -> Self {
        Self { a, b, c, d }
    }

    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    fn has_zero(&self) -> bool {
        self.a == 0 || self.b == 0 || self.c == 0 || self.d == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    /// Upper tail in `a`: evidence of positive association.
    #[default]
    Greater,
    /// Sum over tables no more probable than the observed one.
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OddsCorrection {
    None,
    /// Add 0.5 to every cell when any cell is zero.
    #[default]
    Haldane,
}

// Relative tolerance when comparing PMF values in the two-sided test.
const TWO_SIDED_REL_TOL: f64 = 1e-7;

/// Log-PMF over the support `lo..=hi` of `a` given all margins.
fn log_pmf_support(t: &TwoByTwo) -> (u64, Vec<f64>) {
    let row1 = t.a + t.b;
    let col1 = t.a + t.c;
    let n = t.total();
    let lo = (row1 + col1).saturating_sub(n);
    let hi = row1.min(col1);
    let mut lw = Vec::with_capacity((hi - lo + 1) as usize);
    let mut cur = 0.0f64;
    lw.push(cur);
    for k in lo..hi {
        // w(k+1)/w(k) = (col1-k)(row1-k) / ((k+1)(n-col1-row1+k+1))
        let num = (col1 - k) as f64 * (row1 - k) as f64;
        let den = (k + 1) as f64 * (n + k + 1 - col1 - row1) as f64;
        cur += (num / den).ln();
        lw.push(cur);
    }
    let max = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + lw.iter().map(|&x| (x - max).exp()).sum::<f64>().ln();
    for x in &mut lw {
        *x -= lse;
    }
    (lo, lw)
}

/// Fisher's exact test conditioning on all four margins.
///
/// Degenerate margins (`a+c = 0` or `b+d = 0`) give `p = 1`.
pub fn fisher_exact<T: Scalar>(t: &TwoByTwo, sidedness: Sidedness) -> T {
    if t.a + t.c == 0 || t.b + t.d == 0 {
        return T::one();
    }
    let (lo, lp) = log_pmf_support(t);
    let obs = (t.a - lo) as usize;
    let p = match sidedness {
        Sidedness::Greater => lp[obs..].iter().map(|&x| x.exp()).sum::<f64>(),
        Sidedness::TwoSided => {
            let cut = lp[obs] + TWO_SIDED_REL_TOL.ln_1p();
            lp.iter().filter(|&&x| x <= cut).map(|&x| x.exp()).sum::<f64>()
        }
    };
    T::of(p.clamp(0.0, 1.0))
}

/// Sample odds ratio `(a·d)/(b·c)`.
///
/// Without correction, `b·c = 0 < a·d` yields `+inf` and `0/0` is an error.
pub fn odds_ratio<T: Scalar>(t: &TwoByTwo, correction: OddsCorrection) -> Result<T> {
    let odds = ExactOdds::from_table(t, correction);
    match (odds.num, odds.den) {
        (0, 0) => Err(AeError::UndefinedOddsRatio),
        (_, 0) => Ok(T::infinity()),
        (num, den) => Ok(T::of(num as f64 / den as f64)),
    }
}

/// Odds ratio kept as an exact integer fraction so that null replicates can
/// be compared against the observed value without rounding.
///
/// The Haldane-corrected form is stored doubled: `(2a+1)(2d+1) / ((2b+1)(2c+1))`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExactOdds {
    pub num: u128,
    pub den: u128,
}

impl ExactOdds {
    pub fn from_table(t: &TwoByTwo, correction: OddsCorrection) -> Self {
        let (a, b, c, d) = (t.a as u128, t.b as u128, t.c as u128, t.d as u128);
        if correction == OddsCorrection::Haldane && t.has_zero() {
            Self {
                num: (2 * a + 1) * (2 * d + 1),
                den: (2 * b + 1) * (2 * c + 1),
            }
        } else {
            Self {
                num: a * d,
                den: b * c,
            }
        }
    }

    pub const ZERO: ExactOdds = ExactOdds { num: 0, den: 1 };

    pub fn to_scalar<T: Scalar>(&self) -> T {
        if self.den == 0 {
            if self.num == 0 {
                T::nan()
            } else {
                T::infinity()
            }
        } else {
            T::of(self.num as f64 / self.den as f64)
        }
    }
}

impl PartialEq for ExactOdds {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExactOdds {}

impl PartialOrd for ExactOdds {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactOdds {
    fn cmp(&self, other: &Self) -> Ordering {
        match (
            self.num.checked_mul(other.den),
            other.num.checked_mul(self.den),
        ) {
            (Some(l), Some(r)) => l.cmp(&r),
            _ => {
                let l = self.num as f64 / self.den as f64;
                let r = other.num as f64 / other.den as f64;
                l.total_cmp(&r)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: u64, b: u64, c: u64, d: u64) -> TwoByTwo {
        TwoByTwo::new(a, b, c, d)
    }

    #[test]
    fn greater_tail_small_table() {
        // C(4,3)C(4,1)/C(8,4) + C(4,4)C(4,0)/C(8,4) = (16 + 1)/70
        let p: f64 = fisher_exact(&t(3, 1, 1, 3), Sidedness::Greater);
        assert!((p - 17.0 / 70.0).abs() < 1e-14);
    }

    #[test]
    fn minimum_table_has_unit_tail() {
        let p: f64 = fisher_exact(&t(0, 5, 5, 0), Sidedness::Greater);
        assert!((p - 1.0).abs() < 1e-14);
    }

    #[test]
    fn symmetric_two_sided_is_one() {
        let p: f64 = fisher_exact(&t(2, 2, 2, 2), Sidedness::TwoSided);
        assert!((p - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_sided_known_value() {
        // [[3,1],[1,3]]: tables with pmf <= pmf(3) are a in {0,1,3,4}: (1+16+16+1)/70
        let p: f64 = fisher_exact(&t(3, 1, 1, 3), Sidedness::TwoSided);
        assert!((p - 34.0 / 70.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_margins() {
        assert_eq!(fisher_exact::<f64>(&t(0, 3, 0, 4), Sidedness::Greater), 1.0);
        assert_eq!(fisher_exact::<f64>(&t(3, 0, 4, 0), Sidedness::TwoSided), 1.0);
    }

    #[test]
    fn large_margins_stay_finite() {
        let p: f64 = fisher_exact(&t(400, 100_000, 1_000, 1_500_000), Sidedness::Greater);
        assert!(p.is_finite() && p < 1e-100);
        let p: f64 = fisher_exact(&t(60, 100_000, 1_000, 1_500_000), Sidedness::Greater);
        assert!(p > 0.5 && p <= 1.0);
    }

    #[test]
    fn odds_ratio_examples() {
        assert_eq!(odds_ratio::<f64>(&t(2, 2, 2, 2), OddsCorrection::None).unwrap(), 1.0);
        assert_eq!(odds_ratio::<f64>(&t(4, 1, 1, 4), OddsCorrection::None).unwrap(), 16.0);
        let h: f64 = odds_ratio(&t(3, 0, 2, 5), OddsCorrection::Haldane).unwrap();
        assert!((h - 15.4).abs() < 1e-12);
        // no zero cell: correction is not applied
        assert_eq!(odds_ratio::<f64>(&t(4, 1, 1, 4), OddsCorrection::Haldane).unwrap(), 16.0);
    }

    #[test]
    fn odds_ratio_degenerate() {
        assert!(odds_ratio::<f64>(&t(3, 0, 2, 5), OddsCorrection::None).unwrap().is_infinite());
        assert!(matches!(
            odds_ratio::<f64>(&t(0, 0, 2, 5), OddsCorrection::None),
            Err(AeError::UndefinedOddsRatio)
        ));
        assert_eq!(odds_ratio::<f64>(&t(0, 3, 2, 5), OddsCorrection::None).unwrap(), 0.0);
    }

    #[test]
    fn exact_odds_ordering() {
        let x = ExactOdds { num: 2, den: 6 };
        let y = ExactOdds { num: 1, den: 3 };
        assert_eq!(x, y);
        assert!(ExactOdds { num: 7, den: 2 } > x);
        assert!(ExactOdds::ZERO < y);
    }
}
