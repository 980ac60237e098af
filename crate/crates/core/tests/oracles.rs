//! Spectral routines checked against independent references: closed forms,
//! nalgebra's dense symmetric eigensolver and brute-force enumeration.

use anderson_mp::eigensolve::{smallest_eigenvalue_with, EigenOptions};
use anderson_mp::ids::free_ids_by_convolution;
use anderson_mp::{
    build_laplacian, dense_spectrum, make_grid, sample_field, smallest_eigenvalue, BoxOperators, DisorderSpec,
    Distribution, HamiltonianMatrix, InteractionKernel, ModelConfig, ModelParams, SpectralCounter,
};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

fn random_hamiltonian(rng: &mut StdRng, d: usize, n: usize, m: usize, interacting: bool) -> HamiltonianMatrix {
    let kernel = InteractionKernel::hard_sphere(rng.random_range(0.0..2.0), 1.0);
    let model = ModelConfig::new(d, n, rng.random_range(0.5..1.5)).with_kernel(kernel);
    let cube = model.cube_for_sites(m).unwrap();
    let spec = DisorderSpec::new(Distribution::Uniform { v_max: 1.0 }, rng.random(), 1);
    let field = sample_field(&spec, cube.single_particle_sites(), 0).unwrap();
    BoxOperators::new(&model, cube)
        .unwrap()
        .hamiltonian(&field, interacting)
        .unwrap()
}

fn nalgebra_eigen(h: &HamiltonianMatrix) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let n = h.dimension();
    SymmetricEigen::new(DMatrix::from_row_slice(n, n, &h.to_dense()))
}

#[test]
fn dirichlet_laplacian_closed_form() {
    for m in [3, 8, 32] {
        for h in [1.0, 0.5] {
            let lap = build_laplacian(&make_grid(ModelParams::new(1, 1, m, h)).unwrap());
            let s = dense_spectrum(&lap).unwrap();
            for (k, &got) in s.eigenvalues.iter().enumerate() {
                let exact = (2.0 - 2.0 * ((k + 1) as f64 * PI / (m + 1) as f64).cos()) / (h * h);
                assert!((got - exact).abs() <= 1e-10 * exact, "m={m} h={h} k={k}");
            }
        }
    }
}

#[test]
fn kronecker_sum_of_laplacians() {
    let single = dense_spectrum(&build_laplacian(&make_grid(ModelParams::new(1, 1, 3, 1.0)).unwrap())).unwrap();
    let pair = dense_spectrum(&build_laplacian(&make_grid(ModelParams::new(1, 2, 3, 1.0)).unwrap())).unwrap();
    let mut sums: Vec<f64> = single
        .eigenvalues
        .iter()
        .flat_map(|a| single.eigenvalues.iter().map(move |b| a + b))
        .collect();
    sums.sort_by(f64::total_cmp);
    for (a, b) in pair.eigenvalues.iter().zip(&sums) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn dense_spectrum_matches_nalgebra_with_small_residuals() {
    let mut rng = StdRng::seed_from_u64(10);
    for (d, n, m) in [(1, 2, 5), (2, 1, 6), (1, 3, 4), (2, 2, 3)] {
        let h = random_hamiltonian(&mut rng, d, n, m, true);
        let ours = dense_spectrum(&h).unwrap();
        let reference = nalgebra_eigen(&h);
        let mut theirs: Vec<(f64, usize)> = reference
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        theirs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let norm = h.norm_inf();
        for (k, &(lambda_ref, col)) in theirs.iter().enumerate() {
            let lambda = ours.eigenvalues[k];
            assert!((lambda - lambda_ref).abs() < 1e-10 * norm.max(1.0));
            // spot-check residual of the recomputed pair
            let v: Vec<f64> = reference.eigenvectors.column(col).iter().copied().collect();
            let hv = h.mul_vec(&v);
            let r = hv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
            assert!(r <= 1e-8 * norm, "residual {r}");
        }
    }
}

#[test]
fn count_below_agrees_with_dense_counting() {
    let mut rng = StdRng::seed_from_u64(11);
    for trial in 0..100 {
        let (d, n, m) = if trial % 2 == 0 {
            (1, 2, rng.random_range(2..=8))
        } else {
            (2, 2, rng.random_range(2..=4))
        };
        let interacting = rng.random_bool(0.5);
        let h = random_hamiltonian(&mut rng, d, n, m, interacting);
        let spectrum = dense_spectrum(&h).unwrap();
        let counter = SpectralCounter::new(&h);
        let (lo, hi) = h.gershgorin_bounds();
        let e = rng.random_range(lo - 1.0..hi + 1.0);
        assert_eq!(counter.count_below(e), spectrum.count_below(e), "trial {trial} E={e}");
    }
}

#[test]
fn counting_is_shift_covariant() {
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..30 {
        let h = random_hamiltonian(&mut rng, 1, 2, 6, true);
        let c = rng.random_range(-3.0..3.0);
        let shifted = SpectralCounter::new(&h.shifted(c));
        let plain = SpectralCounter::new(&h);
        for _ in 0..10 {
            let e = rng.random_range(0.0..6.0);
            let (a, b) = (plain.count_below(e), shifted.count_below(e + c));
            // only rounding-level ties may differ; none are expected for random shifts
            assert_eq!(a, b, "c={c} e={e}");
        }
    }
}

#[test]
fn smallest_eigenvalue_matches_dense_minimum() {
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..10 {
        let h = random_hamiltonian(&mut rng, 1, 2, 6, true);
        let exact = dense_spectrum(&h).unwrap().min().unwrap();
        let got = smallest_eigenvalue(&h, 1e-9).unwrap();
        assert!((got - exact).abs() <= 1e-9);
    }
}

#[test]
fn lanczos_route_matches_dense_minimum() {
    let mut rng = StdRng::seed_from_u64(14);
    let opts = EigenOptions {
        dense_cap: 100,
        ..EigenOptions::default()
    };
    for (d, n, m) in [(2, 2, 5), (1, 3, 7)] {
        let h = random_hamiltonian(&mut rng, d, n, m, true);
        let exact = dense_spectrum(&h).unwrap().min().unwrap();
        let got = smallest_eigenvalue_with(&h, 1e-8, &opts).unwrap();
        assert!((got - exact).abs() <= 1e-8, "{got} vs {exact}");
        let counter = SpectralCounter::with_options(&h, &opts);
        let spectrum = dense_spectrum(&h).unwrap();
        for e in [exact - 0.1, exact + 0.5, exact + 2.0] {
            assert_eq!(counter.count_below(e), spectrum.count_below(e));
        }
    }
}

#[test]
fn free_spectrum_is_sum_of_single_particle_spectra() {
    let mut rng = StdRng::seed_from_u64(15);
    for _ in 0..5 {
        let m = 4;
        let spec = DisorderSpec::new(Distribution::Uniform { v_max: 1.0 }, rng.random(), 1);
        let one = ModelConfig::new(1, 1, 1.0);
        let two = ModelConfig::new(1, 2, 1.0).with_kernel(InteractionKernel::hard_sphere(1.0, 1.0));
        let field = sample_field(&spec, m, 0).unwrap();
        let h1 = BoxOperators::new(&one, one.cube_for_sites(m).unwrap())
            .unwrap()
            .hamiltonian(&field, false)
            .unwrap();
        let h0 = BoxOperators::new(&two, two.cube_for_sites(m).unwrap())
            .unwrap()
            .hamiltonian(&field, false)
            .unwrap();
        let s1 = dense_spectrum(&h1).unwrap();
        let s2 = dense_spectrum(&h0).unwrap();
        let mut sums: Vec<f64> = s1
            .eigenvalues
            .iter()
            .flat_map(|a| s1.eigenvalues.iter().map(move |b| a + b))
            .collect();
        sums.sort_by(f64::total_cmp);
        for (a, b) in s2.eigenvalues.iter().zip(&sums) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}

#[test]
fn convolution_count_equals_free_operator_count() {
    let mut rng = StdRng::seed_from_u64(16);
    for (n, m) in [(2, 7), (2, 10), (3, 6)] {
        let spec = DisorderSpec::new(Distribution::Uniform { v_max: 1.0 }, rng.random(), 1);
        let field = sample_field(&spec, m, 0).unwrap();
        let one = ModelConfig::new(1, 1, 1.0);
        let many = ModelConfig::new(1, n, 1.0);
        let s1 = dense_spectrum(
            &BoxOperators::new(&one, one.cube_for_sites(m).unwrap())
                .unwrap()
                .hamiltonian(&field, false)
                .unwrap(),
        )
        .unwrap();
        let h0 = BoxOperators::new(&many, many.cube_for_sites(m).unwrap())
            .unwrap()
            .hamiltonian(&field, false)
            .unwrap();
        let counter = SpectralCounter::new(&h0);
        for _ in 0..20 {
            let e = rng.random_range(0.0..(4.0 * n as f64 + n as f64));
            assert_eq!(
                free_ids_by_convolution(&s1, n, e).unwrap(),
                counter.count_below(e) as u64,
                "n={n} m={m} E={e}"
            );
        }
    }
}

#[test]
fn nonnegative_diagonals_raise_the_bottom() {
    let mut rng = StdRng::seed_from_u64(17);
    let lap = build_laplacian(&make_grid(ModelParams::new(1, 2, 4, 1.0)).unwrap());
    let floor = dense_spectrum(&lap).unwrap().min().unwrap();
    for _ in 0..20 {
        let spec = DisorderSpec::new(Distribution::Uniform { v_max: 1.0 }, rng.random(), 1);
        let kernel = InteractionKernel::hard_sphere(rng.random_range(0.0..2.0), 1.0);
        let model = ModelConfig::new(1, 2, 1.0).with_kernel(kernel);
        let field = sample_field(&spec, 4, 0).unwrap();
        let ops = BoxOperators::new(&model, model.cube_for_sites(4).unwrap()).unwrap();
        let min = dense_spectrum(&ops.hamiltonian(&field, true).unwrap()).unwrap().min().unwrap();
        assert!(min >= floor - 1e-12);
    }
}
