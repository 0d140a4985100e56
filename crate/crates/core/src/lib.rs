//! Selected configuration interaction ground states and the quantum circuits
//! that prepare them.
//!
//! The crate is organized bottom-up:
//!
//! * [`determinants`]: occupation bit-strings, excitations, fermionic signs.
//! * [`hamiltonians`]: integral models (FCIDUMP, Hubbard in site and
//!   plane-wave bases) and Hamiltonian matrix elements.
//! * [`solver`]: Davidson diagonalization, the adaptive grow/rank/prune
//!   iteration, second-order perturbative corrections, exact diagonalization.
//! * [`analysis`]: overlaps, cumulative weights, one-particle density
//!   matrices, natural orbitals, integral rotation, overlap extrapolation.
//! * [`stateprep`]: auxiliary-qubit state-preparation circuits, determinant
//!   ordering, and statevector verification.
//! * [`cli`]: configuration files and the `run`/`prep`/`rotate`/`report`
//!   commands behind the `asci` binary.

pub mod analysis;
pub mod cli;
pub mod determinants;
pub mod error;
pub mod hamiltonians;
pub mod solver;
pub mod stateprep;

pub use determinants::{Determinant, Excitation, OrbitalSet, Spin, SpinOrbital};
pub use error::{Error, Result};
pub use hamiltonians::{IntegralModel, LatticeSpec, Momentum};
