use super::tridiagonal::Tridiagonal;
use crate::error::{Error, Result};
use crate::lattice::HamiltonianMatrix;

/// Lowest Ritz pair estimate from a Lanczos run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOutcome {
    /// Smallest Ritz value, an upper bound on the smallest eigenvalue.
    pub value: f64,
    /// `β_k |s_k|`: some eigenvalue lies within this distance of `value`.
    pub residual_bound: f64,
    pub steps: usize,
}

/// Lanczos with full reorthogonalization for the bottom of the spectrum.
///
/// The start vector is the normalized all-ones vector. The Hamiltonians built
/// here have non-positive off-diagonals on a connected lattice, so their ground
/// state is strictly positive and overlaps it.
pub fn lanczos_smallest(h: &HamiltonianMatrix, max_steps: usize, tol: f64) -> Result<LanczosOutcome> {
    let n = h.dimension();
    if n == 0 {
        return Err(Error::ZeroVector);
    }
    let steps_cap = max_steps.min(n).max(1);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps_cap);
    let mut alpha = Vec::with_capacity(steps_cap);
    let mut beta: Vec<f64> = Vec::with_capacity(steps_cap);
    let mut q = vec![1.0 / (n as f64).sqrt(); n];
    let mut w = vec![0.0; n];
    let mut last = LanczosOutcome {
        value: f64::NAN,
        residual_bound: f64::INFINITY,
        steps: 0,
    };
    for step in 0..steps_cap {
        h.mul_vec_into(&q, &mut w);
        let a: f64 = w.iter().zip(&q).map(|(x, y)| x * y).sum();
        alpha.push(a);
        basis.push(q.clone());
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for v in &basis {
                let c: f64 = w.iter().zip(v).map(|(x, y)| x * y).sum();
                for (x, y) in w.iter_mut().zip(v) {
                    *x -= c * y;
                }
            }
        }
        let b = w.iter().map(|x| x * x).sum::<f64>().sqrt();

        let t = Tridiagonal::new(alpha.clone(), beta.clone());
        let theta = t.kth_eigenvalue(0);
        let s = t.lowest_eigenvector(theta);
        let bound = b * s[s.len() - 1].abs();
        last = LanczosOutcome {
            value: theta,
            residual_bound: bound,
            steps: step + 1,
        };
        let scale = h.norm_inf().max(1.0);
        if bound <= 0.5 * tol || b <= 1e-14 * scale {
            if b <= 1e-14 * scale {
                last.residual_bound = 0.0;
            }
            return Ok(last);
        }
        beta.push(b);
        for (qi, wi) in q.iter_mut().zip(&w) {
            *qi = wi / b;
        }
    }
    if last.steps == n {
        // the Krylov space is the whole space; Ritz values are eigenvalues
        return Ok(last);
    }
    Err(Error::NoConvergence {
        iterations: last.steps,
        lo: last.value - last.residual_bound,
        hi: last.value,
    })
}
