//! Simulation toolkit for quantum annealing and QAOA on the number
//! partitioning problem (NPP).
//!
//! The problem Hamiltonian is the rank-one spin glass `(Σ ã_i σ^z_i)²` with
//! `ã_i = a_i / 2^n`. Everything here works on exact statevectors of up to
//! 20 qubits; dense linear algebra is reserved for spectra and the
//! counterdiabatic analysis at small sizes.
//!
//! Basis convention used throughout: in basis index `b`, bit `i` set to 0
//! means spin `s_i = +1`, bit set to 1 means `s_i = -1`. See [`linalg::spin`].

extern crate openblas_src;

pub mod anneal;
pub mod cd;
pub mod error;
pub mod experiment;
pub mod hamiltonians;
pub mod instances;
pub mod linalg;
pub mod metrics;
pub mod optimizer;
pub mod qaoa;
pub mod rng;
pub mod spectra;

pub use anneal::{evolve, evolve_dense_reference, QaConfig, QaResult, Splitting};
pub use error::{Error, Result};
pub use hamiltonians::{
    build_adaptive_hp, build_hp, build_ht, AdaptiveWeights, DriveSpec, ProblemHamiltonian,
    ScheduleSpec,
};
pub use instances::{generate_instance, load_instances, save_instances, solve_exact, GroundTruth, NppInstance};
pub use linalg::{C64, DenseHermitian, DiagonalOp, StateVector};
pub use optimizer::{multistart_minimize, Algorithm, OptOutcome, OptProblem};
pub use qaoa::{QaoaParams, QaoaResult};
pub use spectra::{count_quasi_optimal, scan_gap, SpectralScan};
