use crate::scalar::Scalar;

/// Benjamini–Hochberg step-up q-values, returned in input order.
///
/// `q_(i) = min_{j >= i} m * p_(j) / j`, capped at 1, where `p_(j)` is the
/// j-th smallest p-value. Inputs must lie in `[0, 1]`.
pub fn bh_qvalues<T: Scalar>(pvals: &[T]) -> Vec<T> {
    let m = pvals.len();
    if m == 0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| {
        pvals[i]
            .partial_cmp(&pvals[j])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let m_t = T::of(m as f64);
    let mut q = vec![T::zero(); m];
    let mut running = T::one();
    for (rank0, &idx) in order.iter().enumerate().rev() {
        let adj = m_t * pvals[idx] / T::of((rank0 + 1) as f64);
        running = running.min(adj);
        q[idx] = running;
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_up_example() {
        let q = bh_qvalues(&[0.01, 0.02, 0.03, 0.04]);
        for v in q {
            assert!((v - 0.04f64).abs() < 1e-15);
        }
    }

    #[test]
    fn singleton_and_cap() {
        assert_eq!(bh_qvalues(&[0.37f64]), vec![0.37]);
        assert_eq!(bh_qvalues(&[1.0f64, 1.0]), vec![1.0, 1.0]);
        assert!(bh_qvalues::<f64>(&[]).is_empty());
        assert_eq!(bh_qvalues(&[0.9f64, 0.8]), vec![0.9, 0.9]);
    }

    #[test]
    fn original_order_preserved() {
        let q = bh_qvalues(&[0.04f32, 0.001, 0.5]);
        assert!((q[1] - 0.003).abs() < 1e-6);
        assert!((q[0] - 0.06).abs() < 1e-6);
        assert!((q[2] - 0.5).abs() < 1e-6);
    }
}
