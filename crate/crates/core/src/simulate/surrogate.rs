//! Default sampling distributions for group sizes, AE totals and reporting
//! rates, with user-supplied empirical pools as overrides.

use std::io::Read;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, LogNormal};

use crate::error::{AeError, Result};

pub(crate) const GROUP_SIZE_MEDIAN: f64 = 20.0;
pub(crate) const GROUP_SIZE_SIGMA: f64 = 0.7;
pub(crate) const GROUP_SIZE_MAX: u64 = 150;
pub(crate) const TOTAL_MIN: u64 = 20;
pub(crate) const TOTAL_MAX: u64 = 50_000;
pub(crate) const TOTAL_TAIL_INDEX: f64 = 1.2;

// (weight, low, high) components of the default rate pool.
pub(crate) const RATE_MIXTURE: [(f64, f64, f64); 3] = [(0.3, 0.0, 0.3), (0.3, 0.3, 0.6), (0.4, 0.6, 1.0)];

// Rejection sampling gives up after this many draws.
const MAX_REJECTIONS: usize = 1_000_000;

/// Optional empirical pools replacing the bundled defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Surrogates {
    pub group_sizes: Option<Vec<u64>>,
    pub totals: Option<Vec<u64>>,
    pub rates: Option<Vec<f64>>,
}

/// Reads one value per line; blank lines, `#` comments and a non-numeric
/// first line (header) are skipped.
pub fn read_empirical<T: FromStr, R: Read>(mut raw: R) -> Result<Vec<T>> {
    let mut text = String::new();
    raw.read_to_string(&mut text)?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let l = line.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        match l.parse::<T>() {
            Ok(v) => out.push(v),
            Err(_) if k == 0 => continue,
            Err(_) => return Err(AeError::Format(format!("line {}: cannot parse `{l}`", k + 1))),
        }
    }
    if out.is_empty() {
        return Err(AeError::EmptyInput("empirical distribution file has no values".into()));
    }
    Ok(out)
}

fn reject<R: Rng + ?Sized, T>(rng: &mut R, mut draw: impl FnMut(&mut R) -> T, ok: impl Fn(&T) -> bool, what: &str) -> Result<T> {
    for _ in 0..MAX_REJECTIONS {
        let x = draw(rng);
        if ok(&x) {
            return Ok(x);
        }
    }
    Err(AeError::Config(format!("cannot draw {what} satisfying the constraint")))
}

impl Surrogates {
    pub(crate) fn group_size<R: Rng + ?Sized>(&self, rng: &mut R, min: u64) -> Result<u64> {
        match &self.group_sizes {
            Some(pool) => {
                let ok: Vec<u64> = pool.iter().copied().filter(|&s| s >= min).collect();
                if ok.is_empty() {
                    return Err(AeError::Config(format!("no empirical group size >= {min}")));
                }
                Ok(ok[rng.random_range(0..ok.len())])
            }
            None => {
                let max = GROUP_SIZE_MAX.max(min);
                let ln = LogNormal::new(GROUP_SIZE_MEDIAN.ln(), GROUP_SIZE_SIGMA).expect("valid log-normal");
                reject(rng, |r| ln.sample(r).round() as u64, |&s| s >= min && s <= max, "group size")
            }
        }
    }

    pub(crate) fn total<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u64> {
        match &self.totals {
            Some(pool) => {
                let ok: Vec<u64> = pool.iter().copied().filter(|&s| s >= 1).collect();
                if ok.is_empty() {
                    return Err(AeError::Config("no positive empirical AE total".into()));
                }
                Ok(ok[rng.random_range(0..ok.len())])
            }
            None => reject(
                rng,
                |r| {
                    let u: f64 = r.random_range(f64::EPSILON..1.0);
                    (TOTAL_MIN as f64 * u.powf(-1.0 / TOTAL_TAIL_INDEX)).floor() as u64
                },
                |&x| (TOTAL_MIN..=TOTAL_MAX).contains(&x),
                "AE total",
            ),
        }
    }

    /// Rate drawn from the pool restricted to `lo < λ < hi`.
    pub(crate) fn rate<R: Rng + ?Sized>(&self, rng: &mut R, lo: f64, hi: f64) -> Result<f64> {
        let ok = |x: &f64| *x > lo && *x < hi;
        match &self.rates {
            Some(pool) => {
                let ok: Vec<f64> = pool.iter().copied().filter(ok).collect();
                if ok.is_empty() {
                    return Err(AeError::Config(format!("no empirical rate in ({lo}, {hi})")));
                }
                Ok(ok[rng.random_range(0..ok.len())])
            }
            None => reject(
                rng,
                |r| {
                    let mut u: f64 = r.random();
                    for &(w, a, b) in &RATE_MIXTURE {
                        if u < w {
                            return r.random_range(a..b);
                        }
                        u -= w;
                    }
                    let (_, a, b) = RATE_MIXTURE[RATE_MIXTURE.len() - 1];
                    r.random_range(a..b)
                },
                ok,
                "rate",
            ),
        }
    }
}
