//! Exact numerics for a truncated dipole-conserving boson chain: tiling
//! combinatorics, frustration-free ground states, sparse spectra and
//! analytic gap bounds.

pub mod bounds;
pub mod error;
pub mod exec;
pub mod fock;
pub mod hamiltonian;
pub mod matrix;
pub mod spectra;
pub mod states;
pub mod tiling;
pub mod tolerances;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Exec;
pub use fock::{Bc, Config, Sector, SparseState};
pub use hamiltonian::{Hamiltonian, Params};
pub use matrix::SparseMatrix;
pub use spectra::SolverOptions;
pub use tiling::{Family, Tile, Tiling};
