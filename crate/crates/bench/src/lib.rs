//! Benchmark fixtures shared by the criterion targets.

use anderson_mp::{sample_field, BoxOperators, DisorderSpec, Distribution, HamiltonianMatrix, InteractionKernel, ModelConfig};

/// Interacting Hamiltonian on `m` sites per axis for one fixed realization.
pub fn hamiltonian(d: usize, n: usize, m: usize) -> HamiltonianMatrix {
    let model = ModelConfig::new(d, n, 1.0).with_kernel(InteractionKernel::hard_sphere(1.0, 1.0));
    let cube = model.cube_for_sites(m).expect("bench sizes fit the dimension cap");
    let spec = DisorderSpec::new(Distribution::Uniform { v_max: 1.0 }, 1, 1);
    let field = sample_field(&spec, cube.single_particle_sites(), 0).expect("realization 0 exists");
    BoxOperators::new(&model, cube)
        .and_then(|ops| ops.hamiltonian(&field, true))
        .expect("valid bench model")
}
