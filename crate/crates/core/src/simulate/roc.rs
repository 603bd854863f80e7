use serde::Serialize;

use crate::error::{AeError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint<T> {
    pub fpr: T,
    pub tpr: T,
    /// Score at which this vertex is reached; ±inf for the origin.
    pub threshold: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve<T> {
    pub points: Vec<RocPoint<T>>,
    pub auc: T,
}

/// Threshold sweep over `scores`. With `ascending`, smaller scores rank as
/// more positive (p-values); otherwise larger scores do. Equal scores share
/// one vertex, so ties contribute a diagonal segment.
pub fn roc<T: Scalar>(truth: &[bool], scores: &[T], ascending: bool) -> Result<RocCurve<T>> {
    if truth.len() != scores.len() {
        return Err(AeError::UndefinedRoc(format!(
            "{} labels but {} scores",
            truth.len(),
            scores.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(AeError::UndefinedRoc("NaN score".into()));
    }
    let pos = truth.iter().filter(|&&t| t).count();
    let neg = truth.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(AeError::UndefinedRoc("need at least one positive and one negative".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| {
        let o = scores[i].partial_cmp(&scores[j]).expect("no NaN");
        if ascending {
            o
        } else {
            o.reverse()
        }
    });

    let (p_t, n_t) = (T::of(pos as f64), T::of(neg as f64));
    let start = if ascending { T::neg_infinity() } else { T::infinity() };
    let mut points = vec![RocPoint {
        fpr: T::zero(),
        tpr: T::zero(),
        threshold: start,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc2 = 0u128; // twice the area in units of 1/(pos·neg)
    let mut k = 0;
    while k < order.len() {
        let s = scores[order[k]];
        let (tp0, fp0) = (tp, fp);
        while k < order.len() && scores[order[k]] == s {
            if truth[order[k]] {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        auc2 += ((fp - fp0) * (tp + tp0)) as u128;
        points.push(RocPoint {
            fpr: T::of(fp as f64) / n_t,
            tpr: T::of(tp as f64) / p_t,
            threshold: s,
        });
    }
    let auc = T::of(auc2 as f64 / (2.0 * pos as f64 * neg as f64));
    Ok(RocCurve { points, auc })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_separation() {
        let r = roc(&[true, true, false, false], &[0.01, 0.02, 0.5, 0.9], true).unwrap();
        assert_eq!(r.auc, 1.0);
    }

    #[test]
    fn constant_scores_give_diagonal() {
        let r = roc(&[true, false, true, false, false], &[0.3; 5], true).unwrap();
        assert_eq!(r.auc, 0.5);
        assert_eq!(r.points.len(), 2);
        assert_eq!((r.points[1].fpr, r.points[1].tpr), (1.0, 1.0));
    }

    #[test]
    fn descending_example() {
        // truth (1,0,1,0), scores (0.9,0.8,0.7,0.1) with larger = more positive
        let r = roc(&[true, false, true, false], &[0.9, 0.8, 0.7, 0.1], false).unwrap();
        assert_eq!(r.auc, 0.75);
        let path: Vec<(f64, f64)> = r.points.iter().map(|p| (p.fpr, p.tpr)).collect();
        assert_eq!(path, vec![(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]);
    }

    #[test]
    fn degenerate_truth_is_error() {
        assert!(matches!(roc(&[true, true], &[0.1, 0.2], true), Err(AeError::UndefinedRoc(_))));
        assert!(roc(&[true], &[0.1, 0.2], true).is_err());
    }
}
