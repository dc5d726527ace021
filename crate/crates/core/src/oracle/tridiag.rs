//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection.

#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off_sq: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl SymTridiagonal {
    /// `off[i]` couples rows i and i+1.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length");
        let n = diag.len();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let r = if i > 0 { off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { off[i].abs() } else { 0.0 };
            lo = lo.min(diag[i] - r);
            hi = hi.max(diag[i] + r);
        }
        let off_sq = off.iter().map(|o| o * o).collect();
        Self { diag, off_sq, lo, hi }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below x.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for (i, d) in self.diag.iter().enumerate() {
            let prev = if i == 0 { 0.0 } else { self.off_sq[i - 1] / q };
            q = d - x - prev;
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + x.abs() + f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The k-th eigenvalue in ascending order (0-based).
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len());
        let pad = 1e-12 * (self.hi - self.lo).abs().max(1.0);
        let (mut a, mut b) = (self.lo - pad, self.hi + pad);
        loop {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                return mid;
            }
            if self.count_below(mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
    }

    /// Eigenvalues with ascending indices in `from..to`.
    pub fn eigenvalues_range(&self, from: usize, to: usize) -> Vec<f64> {
        (from..to).map(|k| self.eigenvalue(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn discrete_laplacian() {
        let n = 50;
        let m = SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]);
        for k in [0, 7, 49] {
            let exact = 2.0 - 2.0 * (PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((m.eigenvalue(k) - exact).abs() < 1e-13);
        }
        assert_eq!(m.count_below(-0.1), 0);
        assert_eq!(m.count_below(4.1), n);
    }

    #[test]
    fn single_entry() {
        let m = SymTridiagonal::new(vec![3.5], vec![]);
        assert_eq!(m.eigenvalue(0), 3.5);
    }
}
