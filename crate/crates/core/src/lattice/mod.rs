//! Finite-volume lattice discretization of `H = -Δ + U + V` for `n` particles
//! in `d` dimensions, with zero Dirichlet data one spacing outside the grid.
//!
//! Configurations are enumerated row-major over the `n·d` integer coordinates,
//! particle-major: particle `i` owns coordinates `i·d .. (i+1)·d`. A flat index
//! therefore decomposes as `Σ_i site_i · (m^d)^(n-1-i)` where `site_i` is the
//! row-major single-particle site of particle `i`.

mod kernel;
mod matrix;

pub use kernel::{InteractionKernel, KernelShape, Norm};
pub use matrix::HamiltonianMatrix;

use crate::disorder::PotentialField;
use crate::error::{invalid, Error, Result};

/// Default upper bound on `m^(n·d)` accepted by [`make_grid`].
pub const DEFAULT_DIMENSION_CAP: usize = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Spatial dimension per particle.
    pub d: usize,
    /// Particle count.
    pub n: usize,
    /// Interior sites per axis.
    pub m: usize,
    /// Lattice spacing.
    pub h: f64,
}

impl ModelParams {
    pub fn new(d: usize, n: usize, m: usize, h: f64) -> Self {
        Self { d, n, m, h }
    }

    /// Number of coordinate axes, `n·d`.
    pub fn axes(&self) -> usize {
        self.n * self.d
    }

    /// Physical side length `m·h`.
    pub fn side_length(&self) -> f64 {
        self.m as f64 * self.h
    }

    /// Physical volume `(m·h)^(n·d)`.
    pub fn volume(&self) -> f64 {
        self.side_length().powi(self.axes() as i32)
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(invalid("d", "must be positive"));
        }
        if self.n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        if self.m == 0 {
            return Err(invalid("m", "must be positive"));
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(invalid("h", "must be finite and positive"));
        }
        Ok(())
    }
}

/// Index/coordinate bookkeeping for one finite box.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeCube {
    params: ModelParams,
    dim: usize,
    sites: usize,
}

pub fn make_grid(params: ModelParams) -> Result<LatticeCube> {
    make_grid_capped(params, DEFAULT_DIMENSION_CAP)
}

pub fn make_grid_capped(params: ModelParams, cap: usize) -> Result<LatticeCube> {
    params.validate()?;
    let exponent = params.axes();
    let dimension = (params.m as u128).checked_pow(exponent as u32).unwrap_or(u128::MAX);
    if dimension > cap as u128 {
        return Err(Error::DimensionCap {
            m: params.m,
            exponent,
            dimension,
            cap,
        });
    }
    Ok(LatticeCube {
        params,
        dim: dimension as usize,
        sites: params.m.pow(params.d as u32),
    })
}

impl LatticeCube {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Total number of configurations, `m^(n·d)`.
    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Number of single-particle sites, `m^d`.
    pub fn single_particle_sites(&self) -> usize {
        self.sites
    }

    /// Stride of coordinate axis `axis` in the flat index.
    pub fn stride(&self, axis: usize) -> usize {
        self.params.m.pow((self.params.axes() - 1 - axis) as u32)
    }

    pub fn coords(&self, index: usize) -> Vec<usize> {
        let m = self.params.m;
        let axes = self.params.axes();
        let mut out = vec![0; axes];
        let mut rest = index;
        for a in (0..axes).rev() {
            out[a] = rest % m;
            rest /= m;
        }
        out
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.params.axes());
        coords.iter().fold(0, |acc, &c| acc * self.params.m + c)
    }

    /// Physical position of an integer coordinate; the Dirichlet boundary
    /// sits at positions `0` and `(m+1)·h`.
    pub fn position(&self, coordinate: usize) -> f64 {
        self.params.h * (coordinate + 1) as f64
    }

    /// Single-particle site occupied by `particle` in configuration `index`.
    pub fn particle_site(&self, index: usize, particle: usize) -> usize {
        let block = self.sites.pow((self.params.n - 1 - particle) as u32);
        (index / block) % self.sites
    }

    /// The `d` integer coordinates of a single-particle site.
    pub fn site_coords(&self, site: usize) -> Vec<usize> {
        let m = self.params.m;
        let d = self.params.d;
        let mut out = vec![0; d];
        let mut rest = site;
        for k in (0..d).rev() {
            out[k] = rest % m;
            rest /= m;
        }
        out
    }

    /// Configuration index of the given per-particle sites.
    pub fn configuration(&self, sites: &[usize]) -> usize {
        debug_assert_eq!(sites.len(), self.params.n);
        sites.iter().fold(0, |acc, &s| acc * self.sites + s)
    }
}

/// Non-negative diagonal term (`V` sum or pair interaction sum).
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalField {
    values: Vec<f64>,
}

impl DiagonalField {
    pub fn zeros(dim: usize) -> Self {
        Self {
            values: vec![0.0; dim],
        }
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("values", "diagonal entries must be finite and non-negative"));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Second-order central-difference `-Δ` with zero Dirichlet boundary,
/// a Kronecker sum of `n·d` tridiagonal factors scaled by `1/h²`.
pub fn build_laplacian(cube: &LatticeCube) -> HamiltonianMatrix {
    let p = cube.params();
    let axes = p.axes();
    let inv_h2 = 1.0 / (p.h * p.h);
    let diag = (2 * axes) as f64 * inv_h2;
    let strides: Vec<usize> = (0..axes).map(|a| cube.stride(a)).collect();
    let rows = (0..cube.dimension())
        .map(|i| {
            let mut row = Vec::with_capacity(2 * axes + 1);
            row.push((i, diag));
            for &s in &strides {
                let c = (i / s) % p.m;
                if c > 0 {
                    row.push((i - s, -inv_h2));
                }
                if c + 1 < p.m {
                    row.push((i + s, -inv_h2));
                }
            }
            row
        })
        .collect();
    HamiltonianMatrix::from_rows(rows, false)
}

/// `V(x_1) + ... + V(x_n)` on every configuration.
pub fn build_potential_diagonal(cube: &LatticeCube, field: &PotentialField) -> Result<DiagonalField> {
    let v = field.values();
    if v.len() != cube.single_particle_sites() {
        return Err(Error::FieldLength {
            expected: cube.single_particle_sites(),
            actual: v.len(),
        });
    }
    let n = cube.params().n;
    let values = (0..cube.dimension())
        .map(|i| (0..n).map(|p| v[cube.particle_site(i, p)]).sum())
        .collect();
    Ok(DiagonalField { values })
}

/// `Σ_{i<j} U(|x_i - x_j|)` on every configuration.
pub fn build_interaction_diagonal(cube: &LatticeCube, kernel: &InteractionKernel) -> Result<DiagonalField> {
    kernel.validate()?;
    let p = cube.params();
    if kernel.is_null() || p.n < 2 {
        return Ok(DiagonalField::zeros(cube.dimension()));
    }
    let coords: Vec<Vec<usize>> = (0..cube.single_particle_sites())
        .map(|s| cube.site_coords(s))
        .collect();
    let mut sites = vec![0; p.n];
    let values = (0..cube.dimension())
        .map(|i| {
            for (k, s) in sites.iter_mut().enumerate() {
                *s = cube.particle_site(i, k);
            }
            let mut total = 0.0;
            for a in 0..p.n {
                for b in a + 1..p.n {
                    total += kernel.value(kernel.distance(&coords[sites[a]], &coords[sites[b]], p.h));
                }
            }
            total
        })
        .collect();
    Ok(DiagonalField { values })
}

/// `laplacian + diag(potential) + [include_interaction]·diag(interaction)`.
///
/// The potential is added before the interaction so that configurations with
/// zero interaction carry bit-identical diagonals in `H` and `H₀`.
pub fn assemble_hamiltonian(
    laplacian: &HamiltonianMatrix,
    potential: &DiagonalField,
    interaction: &DiagonalField,
    include_interaction: bool,
) -> Result<HamiltonianMatrix> {
    let dim = laplacian.dimension();
    for field in [potential, interaction] {
        if field.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: field.len(),
            });
        }
    }
    let mut h = laplacian.clone();
    h.add_diagonal(potential.values());
    if include_interaction {
        h.add_diagonal(interaction.values());
    }
    h.set_interacting(include_interaction);
    Ok(h)
}

/// Model block shared by the estimators: everything except the box size and
/// the disorder.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub d: usize,
    pub n: usize,
    pub h: f64,
    pub kernel: InteractionKernel,
    pub dimension_cap: usize,
}

impl ModelConfig {
    pub fn new(d: usize, n: usize, h: f64) -> Self {
        Self {
            d,
            n,
            h,
            kernel: InteractionKernel::none(),
            dimension_cap: DEFAULT_DIMENSION_CAP,
        }
    }

    pub fn with_kernel(mut self, kernel: InteractionKernel) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn with_dimension_cap(mut self, cap: usize) -> Self {
        self.dimension_cap = cap;
        self
    }

    /// Sites per axis for a physical side length; `side / h` must be a positive integer.
    pub fn sites_for_side(&self, side: f64) -> Result<usize> {
        if !(side.is_finite() && side > 0.0 && self.h > 0.0) {
            return Err(Error::NonIntegerSide { side, spacing: self.h });
        }
        let ratio = side / self.h;
        let m = ratio.round();
        if m < 1.0 || (ratio - m).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::NonIntegerSide { side, spacing: self.h });
        }
        Ok(m as usize)
    }

    pub fn params_for_sites(&self, m: usize) -> ModelParams {
        ModelParams::new(self.d, self.n, m, self.h)
    }

    pub fn cube_for_side(&self, side: f64) -> Result<LatticeCube> {
        let m = self.sites_for_side(side)?;
        self.cube_for_sites(m)
    }

    pub fn cube_for_sites(&self, m: usize) -> Result<LatticeCube> {
        self.kernel.validate()?;
        make_grid_capped(self.params_for_sites(m), self.dimension_cap)
    }
}

/// Precomputed field-independent pieces of one box: Laplacian and interaction diagonal.
#[derive(Debug, Clone)]
pub struct BoxOperators {
    pub cube: LatticeCube,
    pub laplacian: HamiltonianMatrix,
    pub interaction: DiagonalField,
}

impl BoxOperators {
    pub fn new(model: &ModelConfig, cube: LatticeCube) -> Result<Self> {
        let laplacian = build_laplacian(&cube);
        let interaction = build_interaction_diagonal(&cube, &model.kernel)?;
        Ok(Self {
            cube,
            laplacian,
            interaction,
        })
    }

    pub fn hamiltonian(&self, field: &PotentialField, include_interaction: bool) -> Result<HamiltonianMatrix> {
        let potential = build_potential_diagonal(&self.cube, field)?;
        assemble_hamiltonian(&self.laplacian, &potential, &self.interaction, include_interaction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(d: usize, n: usize, m: usize, h: f64) -> LatticeCube {
        make_grid(ModelParams::new(d, n, m, h)).unwrap()
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(cube(1, 1, 3, 1.0).dimension(), 3);
        let c = cube(1, 2, 8, 0.5);
        assert_eq!(c.dimension(), 64);
        assert_eq!(c.params().side_length(), 4.0);
        assert_eq!(c.params().volume(), 16.0);
        assert_eq!(cube(2, 2, 4, 1.0).dimension(), 256);
    }

    #[test]
    fn grid_cap_names_dimension() {
        let err = make_grid_capped(ModelParams::new(2, 3, 10, 1.0), 1000).unwrap_err();
        assert!(matches!(err, Error::DimensionCap { dimension: 1_000_000, .. }));
        assert!(err.to_string().contains("10^6"));
    }

    #[test]
    fn grid_rejects_degenerate_params() {
        assert!(make_grid(ModelParams::new(0, 1, 3, 1.0)).is_err());
        assert!(make_grid(ModelParams::new(1, 0, 3, 1.0)).is_err());
        assert!(make_grid(ModelParams::new(1, 1, 0, 1.0)).is_err());
        assert!(make_grid(ModelParams::new(1, 1, 3, 0.0)).is_err());
    }

    #[test]
    fn index_coordinate_bijection() {
        let c = cube(2, 2, 3, 1.0);
        for i in 0..c.dimension() {
            assert_eq!(c.index(&c.coords(i)), i);
            let sites: Vec<usize> = (0..2).map(|p| c.particle_site(i, p)).collect();
            assert_eq!(c.configuration(&sites), i);
        }
        assert_eq!(c.position(0), 1.0);
    }

    #[test]
    fn laplacian_1d_entries() {
        let l = build_laplacian(&cube(1, 1, 3, 1.0));
        assert_eq!(l.to_dense(), vec![2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
    }

    #[test]
    fn laplacian_structure() {
        let c = cube(2, 2, 3, 0.5);
        let l = build_laplacian(&c);
        assert!(l.is_symmetric());
        for i in 0..c.dimension() {
            let mut off = 0;
            for (j, v) in l.row(i) {
                if j == i {
                    assert_eq!(v, 8.0 * 4.0);
                } else {
                    assert_eq!(v, -4.0);
                    off += 1;
                }
            }
            assert!(off <= 8);
        }
    }

    #[test]
    fn halving_spacing_quadruples_entries() {
        let a = build_laplacian(&cube(1, 2, 4, 0.3)).to_dense();
        let b = build_laplacian(&cube(1, 2, 4, 0.15)).to_dense();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(4.0 * x, *y);
        }
    }

    #[test]
    fn potential_diagonal_examples() {
        let c = cube(1, 2, 2, 1.0);
        let f = PotentialField::new(0, vec![0.3, 0.7]);
        let bv = build_potential_diagonal(&c, &f).unwrap();
        assert_eq!(bv.values()[c.configuration(&[0, 1])], 1.0);

        let zero = build_potential_diagonal(&c, &PotentialField::new(0, vec![0.0; 2])).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));

        let c3 = cube(1, 3, 3, 1.0);
        let bv3 = build_potential_diagonal(&c3, &PotentialField::new(0, vec![0.25; 3])).unwrap();
        assert!(bv3.values().iter().all(|&v| v == 0.75));

        let err = build_potential_diagonal(&c, &PotentialField::new(0, vec![0.0; 3])).unwrap_err();
        assert_eq!(err, Error::FieldLength { expected: 2, actual: 3 });
    }

    #[test]
    fn interaction_diagonal_examples() {
        let k = InteractionKernel::hard_sphere(1.0, 2.0);
        let c = cube(1, 2, 6, 1.0);
        let bu = build_interaction_diagonal(&c, &k).unwrap();
        assert_eq!(bu.values()[c.configuration(&[0, 5])], 0.0);
        assert_eq!(bu.values()[c.configuration(&[0, 1])], 1.0);

        let c3 = cube(1, 3, 6, 1.0);
        let bu3 = build_interaction_diagonal(&c3, &k).unwrap();
        assert_eq!(bu3.values()[c3.configuration(&[0, 1, 2])], 3.0);
    }

    #[test]
    fn single_particle_has_no_interaction() {
        let k = InteractionKernel::hard_sphere(1.0, 5.0);
        let bu = build_interaction_diagonal(&cube(2, 1, 3, 1.0), &k).unwrap();
        assert!(bu.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn assemble_identity_and_flag() {
        let c = cube(1, 2, 3, 1.0);
        let l = build_laplacian(&c);
        let zero = DiagonalField::zeros(c.dimension());
        assert_eq!(assemble_hamiltonian(&l, &zero, &zero, true).unwrap().to_dense(), l.to_dense());

        let bu = DiagonalField::from_values((0..9).map(|i| i as f64).collect()).unwrap();
        let h0 = assemble_hamiltonian(&l, &zero, &bu, false).unwrap();
        assert_eq!(h0.to_dense(), l.to_dense());
        assert!(!h0.includes_interaction());
        let h = assemble_hamiltonian(&l, &zero, &bu, true).unwrap();
        assert!(h.includes_interaction());
        assert_eq!(h.get(4, 4), 4.0 + 4.0);

        let short = DiagonalField::zeros(3);
        assert!(matches!(
            assemble_hamiltonian(&l, &short, &zero, false),
            Err(Error::DimensionMismatch { expected: 9, actual: 3 })
        ));
    }

    #[test]
    fn sides_to_sites() {
        let model = ModelConfig::new(1, 1, 0.5);
        assert_eq!(model.sites_for_side(4.0).unwrap(), 8);
        assert!(model.sites_for_side(4.2).is_err());
        assert!(model.sites_for_side(0.0).is_err());
    }
}
