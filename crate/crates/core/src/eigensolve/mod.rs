//! Spectra, eigenvalue counting and the bottom of the spectrum.
//!
//! Counting goes through a per-matrix [`SpectralCounter`]: the matrix is reduced
//! to tridiagonal form once (directly when it already is tridiagonal, by
//! Householder reflections up to the dense cap) and every shift is then a
//! single O(n) Sturm sweep. Above the dense cap, shifts are counted by the
//! inertia of a banded LDLᵀ factorization instead.

mod band;
mod lanczos;
mod tridiagonal;

pub use lanczos::{lanczos_smallest, LanczosOutcome};
pub use tridiagonal::Tridiagonal;

use band::BandMatrix;

use crate::error::{invalid, Error, Result};
use crate::lattice::HamiltonianMatrix;

/// Default dimension limit for dense Householder reduction.
pub const DENSE_CAP: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dense,
    Sturm,
    Lanczos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub method: Method,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    /// `#{λ <= e}` by binary search.
    pub fn count_below(&self, e: f64) -> usize {
        self.eigenvalues.partition_point(|&l| l <= e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub dense_cap: usize,
    pub max_bisection_steps: usize,
    pub lanczos_max_steps: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            dense_cap: DENSE_CAP,
            max_bisection_steps: 200,
            lanczos_max_steps: 500,
        }
    }
}

/// All eigenvalues via Householder tridiagonalization and implicit-shift QL.
pub fn dense_spectrum(h: &HamiltonianMatrix) -> Result<SpectrumResult> {
    dense_spectrum_capped(h, DENSE_CAP)
}

pub fn dense_spectrum_capped(h: &HamiltonianMatrix, cap: usize) -> Result<SpectrumResult> {
    let n = h.dimension();
    if n > cap {
        return Err(Error::DenseCap { dimension: n, cap });
    }
    let t = Tridiagonal::from_dense(h.to_dense(), n);
    Ok(SpectrumResult {
        eigenvalues: t.eigenvalues()?,
        method: Method::Dense,
    })
}

/// Full spectrum: dense up to the cap, Sturm bisection for larger tridiagonal matrices.
pub fn spectrum(h: &HamiltonianMatrix, opts: &EigenOptions) -> Result<SpectrumResult> {
    if h.dimension() <= opts.dense_cap {
        return dense_spectrum_capped(h, opts.dense_cap);
    }
    match h.tridiagonal_parts() {
        Some((diag, off)) => {
            let t = Tridiagonal::new(diag, off);
            Ok(SpectrumResult {
                eigenvalues: (0..t.len()).map(|k| t.kth_eigenvalue(k)).collect(),
                method: Method::Sturm,
            })
        }
        None => Err(Error::DenseCap {
            dimension: h.dimension(),
            cap: opts.dense_cap,
        }),
    }
}

#[derive(Debug, Clone)]
enum CounterKind {
    Tridiagonal(Tridiagonal),
    Banded(BandMatrix),
}

/// Reusable eigenvalue counter for one immutable matrix.
#[derive(Debug, Clone)]
pub struct SpectralCounter {
    kind: CounterKind,
    dim: usize,
    bounds: (f64, f64),
}

impl SpectralCounter {
    pub fn new(h: &HamiltonianMatrix) -> Self {
        Self::with_options(h, &EigenOptions::default())
    }

    pub fn with_options(h: &HamiltonianMatrix, opts: &EigenOptions) -> Self {
        let dim = h.dimension();
        let kind = if let Some((diag, off)) = h.tridiagonal_parts() {
            CounterKind::Tridiagonal(Tridiagonal::new(diag, off))
        } else if dim <= opts.dense_cap {
            CounterKind::Tridiagonal(Tridiagonal::from_dense(h.to_dense(), dim))
        } else {
            CounterKind::Banded(BandMatrix::from_sparse(h))
        };
        Self {
            kind,
            dim,
            bounds: h.gershgorin_bounds(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// The cached tridiagonal form, when one was built.
    pub fn tridiagonal(&self) -> Option<&Tridiagonal> {
        match &self.kind {
            CounterKind::Tridiagonal(t) => Some(t),
            CounterKind::Banded(_) => None,
        }
    }

    /// Number of eigenvalues `<= e`.
    pub fn count_below(&self, e: f64) -> usize {
        if e.is_nan() {
            return 0;
        }
        match &self.kind {
            CounterKind::Tridiagonal(t) => t.count_below(e),
            CounterKind::Banded(b) => b.count_below(e),
        }
    }

    pub fn counts(&self, energies: &[f64]) -> Vec<usize> {
        energies.iter().map(|&e| self.count_below(e)).collect()
    }

    /// Smallest eigenvalue to within `tol` by bisection on the counting function.
    pub fn bisect_smallest(&self, tol: f64, max_steps: usize) -> Result<f64> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(invalid("tol", "must be positive"));
        }
        if self.dim == 0 {
            return Err(Error::ZeroVector);
        }
        let (glo, ghi) = self.bounds;
        let pad = 1e-9 * glo.abs().max(ghi.abs()).max(1.0);
        let (mut lo, mut hi) = (glo - pad, ghi + pad);
        let mut steps = 0;
        while hi - lo > tol {
            if steps == max_steps {
                return Err(Error::NoConvergence { iterations: steps, lo, hi });
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Err(Error::NoConvergence { iterations: steps, lo, hi });
            }
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
            steps += 1;
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Number of eigenvalues `<= e`. Builds a throwaway counter; reuse a
/// [`SpectralCounter`] when querying many shifts of one matrix.
pub fn count_below(h: &HamiltonianMatrix, e: f64) -> usize {
    SpectralCounter::new(h).count_below(e)
}

/// Smallest eigenvalue to within `tol`.
pub fn smallest_eigenvalue(h: &HamiltonianMatrix, tol: f64) -> Result<f64> {
    smallest_eigenvalue_with(h, tol, &EigenOptions::default())
}

/// Bisection on the Sturm count when a tridiagonal form is affordable;
/// otherwise Lanczos, accepted only if one inertia count confirms that no
/// eigenvalue lies below `value - tol`.
pub fn smallest_eigenvalue_with(h: &HamiltonianMatrix, tol: f64, opts: &EigenOptions) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(invalid("tol", "must be positive"));
    }
    if h.is_tridiagonal() || h.dimension() <= opts.dense_cap {
        return SpectralCounter::with_options(h, opts).bisect_smallest(tol, opts.max_bisection_steps);
    }
    let outcome = lanczos_smallest(h, opts.lanczos_max_steps, tol)?;
    let band = BandMatrix::from_sparse(h);
    let lo = outcome.value - tol;
    if band.count_below(lo) != 0 {
        return Err(Error::NoConvergence {
            iterations: outcome.steps,
            lo,
            hi: outcome.value,
        });
    }
    Ok(outcome.value)
}
