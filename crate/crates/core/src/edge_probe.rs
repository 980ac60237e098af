//! Numerical counterparts of the spectral-edge argument: basepoints whose
//! particles are pairwise far apart, tensor-product trial states supported
//! around them, and disorder scans of the ground-state energy.
//!
//! On such a trial state the interaction diagonal vanishes identically, so the
//! interacting and non-interacting operators act on it in exactly the same way.

use rayon::prelude::*;

use crate::disorder::{sample_field, DisorderSpec, PotentialField};
use crate::eigensolve::smallest_eigenvalue;
use crate::error::{invalid, Error, Result};
use crate::lattice::{
    build_interaction_diagonal, build_laplacian, build_potential_diagonal, make_grid_capped, BoxOperators,
    DiagonalField, HamiltonianMatrix, LatticeCube, ModelConfig, ModelParams,
};

/// Integer basepoints `C·(1, 2, …, n·d)` with `C = r0 + 2km + 1`, read as
/// `n` particle positions in `ℤ^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatedBasepoints {
    pub n: usize,
    pub d: usize,
    pub r0: usize,
    pub k: usize,
    pub m: usize,
    pub scale: usize,
    pub positions: Vec<Vec<usize>>,
}

pub fn separated_basepoints(n: usize, d: usize, r0: usize, k: usize, m: usize) -> Result<SeparatedBasepoints> {
    for (name, v) in [("n", n), ("d", d), ("k", k), ("m", m)] {
        if v == 0 {
            return Err(invalid(name, "must be positive"));
        }
    }
    let scale = r0 + 2 * k * m + 1;
    let positions = (0..n)
        .map(|i| (0..d).map(|a| scale * (i * d + a + 1)).collect())
        .collect();
    Ok(SeparatedBasepoints {
        n,
        d,
        r0,
        k,
        m,
        scale,
        positions,
    })
}

impl SeparatedBasepoints {
    /// Smallest pairwise max-norm distance; `None` for a single particle.
    pub fn min_separation(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let dist = self.positions[i]
                    .iter()
                    .zip(&self.positions[j])
                    .map(|(a, b)| a.abs_diff(*b))
                    .max()
                    .unwrap_or(0);
                best = Some(best.map_or(dist, |b| b.min(dist)));
            }
        }
        best
    }

    /// Membership in `{min_{i≠j} |x_i - x_j| > r0 + 2km}`.
    pub fn is_separated(&self) -> bool {
        self.min_separation()
            .is_none_or(|s| s > self.r0 + 2 * self.k * self.m)
    }

    /// Side of the support cube `{|y - x_j| < k·m}` in lattice sites.
    pub fn support_side(&self) -> usize {
        2 * self.k * self.m - 1
    }
}

/// Tensor product of per-particle sine bumps on disjoint support cubes.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylTrialState {
    /// Unit-norm single-particle factors on the `m^d` grid sites.
    pub factors: Vec<Vec<f64>>,
    /// Lower corner of each particle's support cube, in grid coordinates.
    pub corners: Vec<Vec<usize>>,
    pub bump_side: usize,
    /// Unit-norm product vector on the `m^(n·d)` configurations.
    pub vector: Vec<f64>,
}

fn support_extent(basepoints: &SeparatedBasepoints, bump_side: usize) -> (i64, i64) {
    let back = ((bump_side - 1) / 2) as i64;
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for p in &basepoints.positions {
        for &x in p {
            lo = lo.min(x as i64 - back);
            hi = hi.max(x as i64 - back + bump_side as i64 - 1);
        }
    }
    (lo, hi)
}

/// Smallest grid side holding every support cube once the basepoints are
/// translated so the lowest support coordinate sits at 0.
pub fn required_grid_side(basepoints: &SeparatedBasepoints, bump_side: usize) -> usize {
    let (lo, hi) = support_extent(basepoints, bump_side);
    (hi - lo + 1) as usize
}

fn sine_bump(t: usize, side: usize) -> f64 {
    (std::f64::consts::PI * (t + 1) as f64 / (side + 1) as f64).sin()
}

/// Builds `φ = φ_1 ⊗ … ⊗ φ_n` with each factor the product of 1-D Dirichlet
/// ground profiles on a cube of `bump_side` sites around its basepoint.
pub fn build_trial_state(
    cube: &LatticeCube,
    basepoints: &SeparatedBasepoints,
    bump_side: usize,
) -> Result<WeylTrialState> {
    let p = cube.params();
    if p.n != basepoints.n || p.d != basepoints.d {
        return Err(invalid("basepoints", "particle count or dimension differs from the grid"));
    }
    if bump_side == 0 {
        return Err(invalid("bump_side", "must be positive"));
    }
    let required = required_grid_side(basepoints, bump_side);
    if required > p.m {
        return Err(Error::SupportOverflow {
            required,
            actual: p.m,
        });
    }
    let (shift, _) = support_extent(basepoints, bump_side);
    let back = ((bump_side - 1) / 2) as i64;
    let corners: Vec<Vec<usize>> = basepoints
        .positions
        .iter()
        .map(|x| x.iter().map(|&c| (c as i64 - back - shift) as usize).collect())
        .collect();

    let sites = cube.single_particle_sites();
    let factors: Vec<Vec<f64>> = corners
        .iter()
        .map(|corner| {
            let mut f: Vec<f64> = (0..sites)
                .map(|s| {
                    cube.site_coords(s)
                        .iter()
                        .zip(corner)
                        .map(|(&g, &c)| {
                            if g >= c && g < c + bump_side {
                                sine_bump(g - c, bump_side)
                            } else {
                                0.0
                            }
                        })
                        .product()
                })
                .collect();
            let norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in &mut f {
                *v /= norm;
            }
            f
        })
        .collect();

    let vector = (0..cube.dimension())
        .map(|i| {
            factors
                .iter()
                .enumerate()
                .map(|(j, f)| f[cube.particle_site(i, j)])
                .product()
        })
        .collect();
    Ok(WeylTrialState {
        factors,
        corners,
        bump_side,
        vector,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighQuotient {
    /// `<φ, Hφ> / <φ, φ>`.
    pub quotient: f64,
    /// `‖Hφ‖ / ‖φ‖`.
    pub residual: f64,
}

pub fn rayleigh_quotient(h: &HamiltonianMatrix, state: &[f64]) -> Result<RayleighQuotient> {
    if state.len() != h.dimension() {
        return Err(Error::DimensionMismatch {
            expected: h.dimension(),
            actual: state.len(),
        });
    }
    let nn: f64 = state.iter().map(|v| v * v).sum();
    if nn == 0.0 {
        return Err(Error::ZeroVector);
    }
    let hv = h.mul_vec(state);
    let num: f64 = hv.iter().zip(state).map(|(a, b)| a * b).sum();
    let hh: f64 = hv.iter().map(|v| v * v).sum();
    Ok(RayleighQuotient {
        quotient: num / nn,
        residual: (hh / nn).sqrt(),
    })
}

/// `<φ, Uφ>` for a diagonal interaction.
pub fn interaction_energy(interaction: &DiagonalField, state: &[f64]) -> f64 {
    interaction
        .values()
        .iter()
        .zip(state)
        .map(|(u, v)| u * v * v)
        .sum()
}

/// Right-hand side `Σ_j ‖H_j φ_j‖ Π_{l≠j} ‖φ_l‖` of the triangle-inequality
/// bound on `‖H₀ φ‖`, with `H_j` the single-particle operator on the same grid
/// and field.
pub fn tensor_residual_bound(cube: &LatticeCube, field: &PotentialField, state: &WeylTrialState) -> Result<f64> {
    let p = cube.params();
    let single = make_grid_capped(ModelParams::new(p.d, 1, p.m, p.h), usize::MAX)?;
    let h1 = crate::lattice::assemble_hamiltonian(
        &build_laplacian(&single),
        &build_potential_diagonal(&single, field)?,
        &DiagonalField::zeros(single.dimension()),
        false,
    )?;
    let norms: Vec<f64> = state
        .factors
        .iter()
        .map(|f| f.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let mut total = 0.0;
    for (j, f) in state.factors.iter().enumerate() {
        let hf = h1.mul_vec(f);
        let rest: f64 = norms
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != j)
            .map(|(_, v)| v)
            .product();
        total += hf.iter().map(|v| v * v).sum::<f64>().sqrt() * rest;
    }
    Ok(total)
}

/// One Weyl-probe evaluation on a grid sized for the `(k, m)` basepoints.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylRow {
    pub k: usize,
    pub m: usize,
    pub grid_side: usize,
    pub quotient: f64,
    pub residual: f64,
    pub interaction_energy: f64,
    /// `Uφ = 0` entry-wise.
    pub interaction_vanishes: bool,
    /// `Hφ = H₀φ` entry-wise.
    pub actions_equal: bool,
    /// `‖H₀φ‖` and the tensor-sum bound on it.
    pub free_residual: f64,
    pub residual_bound: f64,
}

/// Builds the separated trial state for `(k, m)`, with support cubes of radius
/// `k·m`, and evaluates it against realization `realization` of `spec`.
pub fn weyl_probe(
    model: &ModelConfig,
    k: usize,
    m: usize,
    spec: &DisorderSpec,
    realization: usize,
) -> Result<WeylRow> {
    let r0_sites = (model.kernel.range / model.h).ceil() as usize;
    let basepoints = separated_basepoints(model.n, model.d, r0_sites, k, m)?;
    let bump = basepoints.support_side();
    let grid_side = required_grid_side(&basepoints, bump);
    let cube = model.cube_for_sites(grid_side)?;
    let state = build_trial_state(&cube, &basepoints, bump)?;
    let field = sample_field(spec, cube.single_particle_sites(), realization)?;
    let ops = BoxOperators::new(model, cube)?;
    let h = ops.hamiltonian(&field, true)?;
    let h0 = ops.hamiltonian(&field, false)?;
    let rq = rayleigh_quotient(&h, &state.vector)?;
    let h_phi = h.mul_vec(&state.vector);
    let h0_phi = h0.mul_vec(&state.vector);
    let free_residual = h0_phi.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(WeylRow {
        k,
        m,
        grid_side,
        quotient: rq.quotient,
        residual: rq.residual,
        interaction_energy: interaction_energy(&ops.interaction, &state.vector),
        interaction_vanishes: ops
            .interaction
            .values()
            .iter()
            .zip(&state.vector)
            .all(|(u, v)| u * v == 0.0),
        actions_equal: h_phi == h0_phi,
        free_residual,
        residual_bound: tensor_residual_bound(&ops.cube, &field, &state)?,
    })
}

/// Median and interquartile range of the smallest eigenvalue over realizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRow {
    pub side: f64,
    pub sites: usize,
    pub median: f64,
    pub iqr: f64,
    pub realizations: usize,
}

/// Linear-interpolation quantile of sorted data (the common "type 7" rule).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Smallest eigenvalue of every realization for one box, in index order.
pub fn edge_samples(model: &ModelConfig, side: f64, spec: &DisorderSpec, tol: f64) -> Result<Vec<f64>> {
    let cube = model.cube_for_side(side)?;
    let ops = BoxOperators::new(model, cube)?;
    (0..spec.realizations)
        .into_par_iter()
        .map(|k| {
            let field = sample_field(spec, ops.cube.single_particle_sites(), k)?;
            smallest_eigenvalue(&ops.hamiltonian(&field, true)?, tol)
        })
        .collect()
}

pub fn edge_scan(model: &ModelConfig, sides: &[f64], spec: &DisorderSpec, tol: f64) -> Result<Vec<EdgeRow>> {
    spec.validate()?;
    if spec.realizations == 0 {
        return Err(invalid("R", "at least one realization is required"));
    }
    let mut sorted_sides = sides.to_vec();
    sorted_sides.sort_by(f64::total_cmp);
    sorted_sides
        .into_iter()
        .map(|side| {
            let mut samples = edge_samples(model, side, spec, tol)?;
            samples.sort_by(f64::total_cmp);
            Ok(EdgeRow {
                side,
                sites: model.sites_for_side(side)?,
                median: quantile(&samples, 0.5),
                iqr: quantile(&samples, 0.75) - quantile(&samples, 0.25),
                realizations: samples.len(),
            })
        })
        .collect()
}

/// Pair-interaction diagonal for the basepoint grid; exposed for tests that
/// check locality directly.
pub fn interaction_on_grid(cube: &LatticeCube, model: &ModelConfig) -> Result<DiagonalField> {
    build_interaction_diagonal(cube, &model.kernel)
}
