//! Finite-lattice realizations of the multi-particle Anderson Hamiltonian
//! `H = -Δ + U + V` and the numerical checks built on them: eigenvalue
//! counting, the integrated density of states, Lifshitz-tail fits and
//! probes of the bottom of the spectrum.

pub mod disorder;
pub mod edge_probe;
pub mod eigensolve;
pub mod error;
pub mod ids;
pub mod lattice;

pub use disorder::{sample_field, stream_realizations, DisorderSpec, Distribution, PotentialField};
pub use eigensolve::{
    count_below, dense_spectrum, smallest_eigenvalue, EigenOptions, Method, SpectralCounter, SpectrumResult,
};
pub use error::{Error, Result};
pub use ids::{
    compare_free_vs_interacting, estimate_ids, fit_lifshitz, fit_tail, free_ids_by_convolution, paired_ids,
    CompareRow, FitWindow, IdsCurve, IdsRecord, LifshitzFit, PairedIds,
};
pub use lattice::{
    assemble_hamiltonian, build_interaction_diagonal, build_laplacian, build_potential_diagonal, make_grid,
    BoxOperators, DiagonalField, HamiltonianMatrix, InteractionKernel, KernelShape, LatticeCube, ModelConfig,
    ModelParams, Norm,
};
