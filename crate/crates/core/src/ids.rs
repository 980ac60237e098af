//! Finite-volume integrated density of states, Lifshitz-tail fits and the
//! interacting versus non-interacting comparison.
//!
//! The per-volume IDS of one box is `#{λ <= E} / (m·h)^(n·d)`; the normalized
//! value `Ñ = N·h^(n·d) = #{λ <= E} / m^(n·d)` is the fraction of states and
//! lies in `[0, 1]`.

use rayon::prelude::*;

use crate::disorder::{sample_field, DisorderSpec};
use crate::eigensolve::{EigenOptions, SpectralCounter, SpectrumResult};
use crate::error::{invalid, Error, Result};
use crate::lattice::{BoxOperators, ModelConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct IdsRecord {
    /// Physical side length `L = m·h`.
    pub side: f64,
    pub sites: usize,
    /// Mean `N_L(E)` per unit volume, one entry per grid energy.
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub realizations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdsCurve {
    pub energies: Vec<f64>,
    pub records: Vec<IdsRecord>,
    pub d: usize,
    pub n: usize,
    pub h: f64,
}

impl IdsCurve {
    /// `h^(n·d)`, the factor turning `N` into the state fraction `Ñ`.
    pub fn normalization(&self) -> f64 {
        self.h.powi((self.n * self.d) as i32)
    }

    pub fn normalized(&self, record: usize) -> Vec<f64> {
        let s = self.normalization();
        self.records[record].mean.iter().map(|v| v * s).collect()
    }

    /// Record of the largest box.
    pub fn largest(&self) -> Option<(usize, &IdsRecord)> {
        self.records
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.side.total_cmp(&b.1.side))
    }
}

fn validate_energies(energies: &[f64]) -> Result<()> {
    if energies.is_empty() {
        return Err(invalid("energies", "grid is empty"));
    }
    if energies.iter().any(|e| !e.is_finite()) {
        return Err(invalid("energies", "grid values must be finite"));
    }
    if energies.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("energies", "grid must be strictly ascending"));
    }
    Ok(())
}

fn box_volume(model: &ModelConfig, sites: usize) -> f64 {
    (sites as f64 * model.h).powi((model.n * model.d) as i32)
}

/// Mean and standard error (sample deviation over `√R`) of per-realization
/// densities, accumulated in realization order.
fn aggregate(per_realization: &[Vec<f64>], points: usize) -> (Vec<f64>, Vec<f64>) {
    let r = per_realization.len();
    let mut mean = vec![0.0; points];
    for row in per_realization {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= r as f64;
    }
    let stderr = if r < 2 {
        vec![0.0; points]
    } else {
        (0..points)
            .map(|j| {
                let ss: f64 = per_realization.iter().map(|row| (row[j] - mean[j]).powi(2)).sum();
                (ss / (r - 1) as f64).sqrt() / (r as f64).sqrt()
            })
            .collect()
    };
    (mean, stderr)
}

/// Eigenvalue counts `#{λ <= E}` for one realization on one box.
pub fn realization_counts(
    ops: &BoxOperators,
    spec: &DisorderSpec,
    realization: usize,
    energies: &[f64],
    include_interaction: bool,
) -> Result<Vec<usize>> {
    let field = sample_field(spec, ops.cube.single_particle_sites(), realization)?;
    let h = ops.hamiltonian(&field, include_interaction)?;
    Ok(SpectralCounter::with_options(&h, &EigenOptions::default()).counts(energies))
}

/// Per-volume IDS of a single realization on a box of side `side`.
pub fn single_realization_ids(
    model: &ModelConfig,
    side: f64,
    energies: &[f64],
    spec: &DisorderSpec,
    realization: usize,
) -> Result<Vec<f64>> {
    validate_energies(energies)?;
    let cube = model.cube_for_side(side)?;
    let sites = cube.params().m;
    let ops = BoxOperators::new(model, cube)?;
    let volume = box_volume(model, sites);
    let counts = realization_counts(&ops, spec, realization, energies, true)?;
    Ok(counts.iter().map(|&c| c as f64 / volume).collect())
}

/// Disorder-averaged IDS of the interacting operator for each side length.
///
/// Realizations may run concurrently on the current rayon pool; results are
/// aggregated in index order, so the output does not depend on the pool size.
pub fn estimate_ids(model: &ModelConfig, sides: &[f64], energies: &[f64], spec: &DisorderSpec) -> Result<IdsCurve> {
    validate_energies(energies)?;
    spec.validate()?;
    if spec.realizations == 0 {
        return Err(invalid("R", "at least one realization is required"));
    }
    let mut records = Vec::with_capacity(sides.len());
    for &side in sides {
        let cube = model.cube_for_side(side)?;
        let sites = cube.params().m;
        let ops = BoxOperators::new(model, cube)?;
        let volume = box_volume(model, sites);
        let densities = (0..spec.realizations)
            .into_par_iter()
            .map(|k| {
                realization_counts(&ops, spec, k, energies, true)
                    .map(|c| c.iter().map(|&x| x as f64 / volume).collect::<Vec<f64>>())
            })
            .collect::<Result<Vec<_>>>()?;
        let (mean, stderr) = aggregate(&densities, energies.len());
        records.push(IdsRecord {
            side,
            sites,
            mean,
            stderr,
            realizations: spec.realizations,
        });
    }
    Ok(IdsCurve {
        energies: energies.to_vec(),
        records,
        d: model.d,
        n: model.n,
        h: model.h,
    })
}

/// Which grid points enter the tail fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitWindow {
    /// Grid points with `lo <= Ñ <= hi` above the edge.
    Normalized { lo: f64, hi: f64 },
    /// Grid energies in `[lo, hi]`; every such point must have `0 < Ñ < 1`.
    Energy { lo: f64, hi: f64 },
}

impl Default for FitWindow {
    fn default() -> Self {
        FitWindow::Normalized { lo: 1e-6, hi: 1e-1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LifshitzFit {
    /// Slope of `ln(-ln Ñ)` against `ln(E - E₀)`; `-d/2` for a Lifshitz tail.
    pub slope: f64,
    pub intercept: f64,
    /// `exp(intercept)`.
    pub gamma_hat: f64,
    /// Smallest and largest energy used.
    pub window_lo: f64,
    pub window_hi: f64,
    pub residual_rms: f64,
    pub edge: f64,
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 4;

/// Least-squares fit of `ln(-ln Ñ) = ln γ + s·ln(E - E₀)`.
pub fn fit_tail(energies: &[f64], normalized: &[f64], edge: f64, window: FitWindow) -> Result<LifshitzFit> {
    if energies.len() != normalized.len() {
        return Err(Error::DimensionMismatch {
            expected: energies.len(),
            actual: normalized.len(),
        });
    }
    let selected: Vec<(f64, f64)> = match window {
        FitWindow::Normalized { lo, hi } => {
            if !(lo > 0.0 && hi < 1.0 && lo <= hi) {
                return Err(invalid("window", "normalized window must satisfy 0 < lo <= hi < 1"));
            }
            energies
                .iter()
                .zip(normalized)
                .filter(|&(&e, &v)| e > edge && v >= lo && v <= hi)
                .map(|(&e, &v)| (e, v))
                .collect()
        }
        FitWindow::Energy { lo, hi } => {
            if lo.is_nan() || lo <= edge || hi < lo {
                return Err(Error::FitWindow {
                    reason: format!("window [{lo}, {hi}] must lie strictly above the edge {edge}"),
                    energies: vec![],
                });
            }
            let inside: Vec<(f64, f64)> = energies
                .iter()
                .zip(normalized)
                .filter(|&(&e, _)| e >= lo && e <= hi)
                .map(|(&e, &v)| (e, v))
                .collect();
            let offending: Vec<f64> = inside
                .iter()
                .filter(|&&(_, v)| !(v > 0.0 && v < 1.0))
                .map(|&(e, _)| e)
                .collect();
            if !offending.is_empty() {
                return Err(Error::FitWindow {
                    reason: "normalized IDS must lie strictly inside (0, 1)".into(),
                    energies: offending,
                });
            }
            inside
        }
    };
    if selected.len() < MIN_FIT_POINTS {
        return Err(Error::FitWindow {
            reason: format!(
                "{} grid points in window, at least {MIN_FIT_POINTS} required",
                selected.len()
            ),
            energies: selected.iter().map(|p| p.0).collect(),
        });
    }
    let xs: Vec<f64> = selected.iter().map(|&(e, _)| (e - edge).ln()).collect();
    let ys: Vec<f64> = selected.iter().map(|&(_, v)| (-v.ln()).ln()).collect();
    let k = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / k;
    let ybar = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    if sxx == 0.0 {
        return Err(Error::FitWindow {
            reason: "all window energies coincide".into(),
            energies: selected.iter().map(|p| p.0).collect(),
        });
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let residual_rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(LifshitzFit {
        slope,
        intercept,
        gamma_hat: intercept.exp(),
        window_lo: selected.first().map(|p| p.0).unwrap_or(f64::NAN),
        window_hi: selected.last().map(|p| p.0).unwrap_or(f64::NAN),
        residual_rms,
        edge,
        points: selected.len(),
    })
}

/// Tail fit on the largest box of `curve`.
pub fn fit_lifshitz(curve: &IdsCurve, edge: f64, window: FitWindow) -> Result<LifshitzFit> {
    let (idx, _) = curve
        .largest()
        .ok_or_else(|| invalid("curve", "no IDS records to fit"))?;
    fit_tail(&curve.energies, &curve.normalized(idx), edge, window)
}

/// Largest number of index tuples [`free_ids_by_convolution`] will enumerate.
pub const CONVOLUTION_CAP: u128 = 10_000_000;

/// `#{(k_1, …, k_n) : λ_{k_1} + … + λ_{k_n} <= E}` by exhaustive enumeration.
pub fn free_ids_by_convolution(single: &SpectrumResult, n: usize, e: f64) -> Result<u64> {
    let len = single.eigenvalues.len();
    let size = (len as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > CONVOLUTION_CAP {
        return Err(Error::EnumerationCap {
            size,
            cap: CONVOLUTION_CAP,
        });
    }
    if n == 0 || len == 0 {
        return Ok(u64::from(0.0 <= e && n == 0));
    }
    let lambda = &single.eigenvalues;
    let mut idx = vec![0usize; n];
    let mut count = 0u64;
    loop {
        let sum = idx.iter().fold(0.0, |acc, &k| acc + lambda[k]);
        if sum <= e {
            count += 1;
        }
        // odometer increment
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(count);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < len {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Counts of the interacting and non-interacting operator built from the same field.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedCounts {
    pub interacting: Vec<usize>,
    pub free: Vec<usize>,
}

impl PairedCounts {
    pub fn dominated(&self) -> bool {
        self.interacting.iter().zip(&self.free).all(|(a, b)| a <= b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedBox {
    pub side: f64,
    pub sites: usize,
    pub volume: f64,
    /// One entry per realization, in index order.
    pub realizations: Vec<PairedCounts>,
}

/// Paired interacting/free counts on a shared energy grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedIds {
    pub energies: Vec<f64>,
    pub boxes: Vec<PairedBox>,
    pub d: usize,
    pub n: usize,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub side: f64,
    pub sites: usize,
    pub energy: f64,
    pub interacting: f64,
    pub free: f64,
    pub delta: f64,
    /// Standard error of the paired difference.
    pub stderr: f64,
    pub realizations: usize,
}

pub fn paired_ids(model: &ModelConfig, sides: &[f64], energies: &[f64], spec: &DisorderSpec) -> Result<PairedIds> {
    validate_energies(energies)?;
    spec.validate()?;
    if spec.realizations == 0 {
        return Err(invalid("R", "at least one realization is required"));
    }
    let mut boxes = Vec::with_capacity(sides.len());
    for &side in sides {
        let cube = model.cube_for_side(side)?;
        let sites = cube.params().m;
        let ops = BoxOperators::new(model, cube)?;
        let realizations = (0..spec.realizations)
            .into_par_iter()
            .map(|k| -> Result<PairedCounts> {
                let field = sample_field(spec, ops.cube.single_particle_sites(), k)?;
                let interacting = SpectralCounter::new(&ops.hamiltonian(&field, true)?).counts(energies);
                let free = SpectralCounter::new(&ops.hamiltonian(&field, false)?).counts(energies);
                Ok(PairedCounts { interacting, free })
            })
            .collect::<Result<Vec<_>>>()?;
        boxes.push(PairedBox {
            side,
            sites,
            volume: box_volume(model, sites),
            realizations,
        });
    }
    Ok(PairedIds {
        energies: energies.to_vec(),
        boxes,
        d: model.d,
        n: model.n,
        h: model.h,
    })
}

impl PairedIds {
    fn curve(&self, pick: impl Fn(&PairedCounts) -> &[usize]) -> IdsCurve {
        let records = self
            .boxes
            .iter()
            .map(|b| {
                let densities: Vec<Vec<f64>> = b
                    .realizations
                    .iter()
                    .map(|r| pick(r).iter().map(|&c| c as f64 / b.volume).collect())
                    .collect();
                let (mean, stderr) = aggregate(&densities, self.energies.len());
                IdsRecord {
                    side: b.side,
                    sites: b.sites,
                    mean,
                    stderr,
                    realizations: b.realizations.len(),
                }
            })
            .collect();
        IdsCurve {
            energies: self.energies.clone(),
            records,
            d: self.d,
            n: self.n,
            h: self.h,
        }
    }

    pub fn interacting_curve(&self) -> IdsCurve {
        self.curve(|r| &r.interacting)
    }

    pub fn free_curve(&self) -> IdsCurve {
        self.curve(|r| &r.free)
    }

    /// Number of (box, realization) pairs where some grid energy has
    /// more interacting than free eigenvalues below it.
    pub fn dominance_violations(&self) -> usize {
        self.boxes
            .iter()
            .flat_map(|b| &b.realizations)
            .filter(|r| !r.dominated())
            .count()
    }

    /// `Δ(L) = |mean N_int - mean N_free|` at one grid energy.
    pub fn compare_at(&self, energy_index: usize) -> Vec<CompareRow> {
        let energy = self.energies[energy_index];
        self.boxes
            .iter()
            .map(|b| {
                let rows: Vec<Vec<f64>> = b
                    .realizations
                    .iter()
                    .map(|r| {
                        let i = r.interacting[energy_index] as f64 / b.volume;
                        let f = r.free[energy_index] as f64 / b.volume;
                        vec![i, f, i - f]
                    })
                    .collect();
                let (mean, stderr) = aggregate(&rows, 3);
                CompareRow {
                    side: b.side,
                    sites: b.sites,
                    energy,
                    interacting: mean[0],
                    free: mean[1],
                    delta: (mean[0] - mean[1]).abs(),
                    stderr: stderr[2],
                    realizations: b.realizations.len(),
                }
            })
            .collect()
    }
}

/// Paired comparison of the interacting and free IDS at `energy`.
pub fn compare_free_vs_interacting(
    model: &ModelConfig,
    energy: f64,
    sides: &[f64],
    spec: &DisorderSpec,
) -> Result<Vec<CompareRow>> {
    Ok(paired_ids(model, sides, &[energy], spec)?.compare_at(0))
}

/// Lowest grid energy whose normalized IDS lies in `[lo, hi]`.
pub fn select_probe_energy(energies: &[f64], normalized: &[f64], lo: f64, hi: f64) -> Option<(usize, f64)> {
    energies
        .iter()
        .zip(normalized)
        .position(|(_, &v)| v >= lo && v <= hi)
        .map(|i| (i, energies[i]))
}
