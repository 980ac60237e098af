//! Dense Householder reduction, implicit-shift QL and Sturm counting on
//! symmetric tridiagonal matrices.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: `diag[0..n]`, `off[0..n-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal length");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Reduces a dense symmetric row-major matrix to tridiagonal form with
    /// Householder reflections. The input is consumed as workspace.
    pub fn from_dense(mut a: Vec<f64>, n: usize) -> Self {
        assert_eq!(a.len(), n * n);
        let mut off = vec![0.0; n.saturating_sub(1)];
        let mut v = vec![0.0; n];
        let mut p = vec![0.0; n];
        for k in 0..n.saturating_sub(2) {
            let lo = k + 1;
            let norm = (lo..n).map(|i| a[i * n + k].powi(2)).sum::<f64>().sqrt();
            if norm == 0.0 {
                off[k] = 0.0;
                continue;
            }
            let x0 = a[lo * n + k];
            let alpha = if x0 >= 0.0 { -norm } else { norm };
            for i in lo..n {
                v[i] = a[i * n + k];
            }
            v[lo] -= alpha;
            let vtv: f64 = (lo..n).map(|i| v[i] * v[i]).sum();
            off[k] = alpha;
            if vtv == 0.0 {
                continue;
            }
            let beta = 2.0 / vtv;
            // p = β B v on the trailing block
            for i in lo..n {
                let row = &a[i * n + lo..i * n + n];
                p[i] = beta * row.iter().zip(&v[lo..n]).map(|(x, y)| x * y).sum::<f64>();
            }
            let kappa = 0.5 * beta * (lo..n).map(|i| v[i] * p[i]).sum::<f64>();
            for i in lo..n {
                p[i] -= kappa * v[i];
            }
            // B -= v pᵀ + p vᵀ
            for i in lo..n {
                let (vi, pi) = (v[i], p[i]);
                let row = &mut a[i * n + lo..i * n + n];
                for (j, x) in row.iter_mut().enumerate() {
                    *x -= vi * p[lo + j] + pi * v[lo + j];
                }
            }
        }
        if n >= 2 {
            off[n - 2] = a[(n - 1) * n + n - 2];
        }
        let diag = (0..n).map(|i| a[i * n + i]).collect();
        Self { diag, off }
    }

    /// Smallest representable pivot magnitude used by the Sturm recurrences.
    fn pivot_floor(&self) -> f64 {
        let emax = self.off.iter().fold(1.0f64, |m, e| m.max(e * e));
        f64::MIN_POSITIVE * emax
    }

    /// Number of eigenvalues `<= e`.
    ///
    /// Runs the Sturm recurrence on `e·I - T`; the negative pivots count the
    /// eigenvalues strictly above `e`. A vanishing pivot is replaced by a
    /// positive floor so that eigenvalues equal to `e` are counted as `<= e`.
    pub fn count_below(&self, e: f64) -> usize {
        let n = self.len();
        if n == 0 {
            return 0;
        }
        let floor = self.pivot_floor();
        let mut above = 0;
        let mut q = e - self.diag[0];
        for i in 0..n {
            if i > 0 {
                q = (e - self.diag[i]) - self.off[i - 1] * self.off[i - 1] / q;
            }
            if q.abs() < floor {
                q = floor;
            }
            if q < 0.0 {
                above += 1;
            }
        }
        n - above
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection to full precision.
    pub fn kth_eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        let pad = 1e-12 * (lo.abs().max(hi.abs()).max(1.0));
        lo -= pad;
        hi += pad;
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// All eigenvalues by implicit-shift QL, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.len();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);
        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() + dd == dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence {
                        iterations: iter,
                        lo: d[l],
                        hi: d[m],
                    });
                }
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
                let mut deflated = false;
                for i in (l..m).rev() {
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if deflated {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
        d.sort_by(f64::total_cmp);
        Ok(d)
    }

    /// Unit eigenvector for an eigenvalue estimate `theta` at the bottom of the
    /// spectrum, by inverse iteration with a shift just below `theta`.
    pub(crate) fn lowest_eigenvector(&self, theta: f64) -> Vec<f64> {
        let n = self.len();
        let scale = self.diag.iter().chain(&self.off).fold(1.0f64, |m, x| m.max(x.abs()));
        let shift = theta - 1e-10 * scale;
        let mut x = vec![1.0; n];
        let mut pivots = vec![0.0; n];
        let mut y = vec![0.0; n];
        for _ in 0..4 {
            // LDLᵀ solve of (T - shift) y = x; positive definite for shift below the spectrum
            for i in 0..n {
                let a = self.diag[i] - shift;
                if i == 0 {
                    pivots[0] = a;
                    y[0] = x[0];
                } else {
                    let l = self.off[i - 1] / pivots[i - 1];
                    pivots[i] = a - l * self.off[i - 1];
                    y[i] = x[i] - l * y[i - 1];
                }
            }
            for i in (0..n).rev() {
                let mut val = y[i] / pivots[i];
                if i + 1 < n {
                    val -= self.off[i] / pivots[i] * x[i + 1];
                }
                x[i] = val;
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in &mut x {
                *v /= norm;
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn laplacian_1d(m: usize) -> Tridiagonal {
        Tridiagonal::new(vec![2.0; m], vec![-1.0; m - 1])
    }

    #[test]
    fn ql_matches_closed_form() {
        let m = 40;
        let ev = laplacian_1d(m).eigenvalues().unwrap();
        for (k, &lambda) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / (m + 1) as f64).cos();
            assert!((lambda - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn sturm_counts_ties_as_below() {
        let t = laplacian_1d(3);
        assert_eq!(t.count_below(0.0), 0);
        assert_eq!(t.count_below(1.0), 1);
        assert_eq!(t.count_below(2.0), 2);
        assert_eq!(t.count_below(10.0), 3);
    }

    #[test]
    fn sturm_handles_split_matrix() {
        let t = Tridiagonal::new(vec![1.0, 5.0, 3.0], vec![0.0, 0.0]);
        assert_eq!(t.count_below(0.5), 0);
        assert_eq!(t.count_below(1.0), 1);
        assert_eq!(t.count_below(3.5), 2);
        assert_eq!(t.eigenvalues().unwrap(), vec![1.0, 3.0, 5.0]);
    }

    #[test]
    fn householder_preserves_spectrum() {
        let n = 5;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = 1.0 / (1 + i + j) as f64;
            }
        }
        let t = Tridiagonal::from_dense(a, n);
        let ev = t.eigenvalues().unwrap();
        // Hilbert matrix H5: trace and largest eigenvalue
        let trace: f64 = (0..n).map(|i| 1.0 / (1 + 2 * i) as f64).sum();
        assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-13);
        assert!((ev[4] - 1.567050691098231).abs() < 1e-12);
    }

    #[test]
    fn bisection_eigenvalue() {
        let t = laplacian_1d(3);
        assert!((t.kth_eigenvalue(0) - (2.0 - 2f64.sqrt())).abs() < 1e-14);
        assert!((t.kth_eigenvalue(2) - (2.0 + 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn inverse_iteration_vector() {
        let t = laplacian_1d(6);
        let theta = t.kth_eigenvalue(0);
        let v = t.lowest_eigenvector(theta);
        for (i, x) in v.iter().enumerate() {
            let exact = ((i + 1) as f64 * PI / 7.0).sin() * (2.0f64 / 7.0).sqrt();
            assert!((x.abs() - exact).abs() < 1e-10);
        }
    }
}
