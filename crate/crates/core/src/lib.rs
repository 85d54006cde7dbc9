//! Measurement scheduling for partial tomography of qubit and fermionic
//! reduced density matrices.
//!
//! The crate builds sets of simultaneously measurable operators ("cliques")
//! that together contain every k-local qubit operator or every 2k-Majorana
//! operator, synthesizes Jordan–Wigner measurement circuits for them, and
//! ships the exhaustive oracles used to check coverage, commutation and
//! circuit correctness at desk scale.
//!
//! Majorana modes are 0-based throughout: mode `2j` and `2j + 1` belong to
//! fermion (and qubit) `j`.

pub mod algebra;
pub mod circuits;
pub mod error;
pub mod majorana_cover;
pub mod qubit_cover;
pub mod schedule;
pub mod symmetry_cover;
pub mod tuple_iter;
pub mod verify;

pub use algebra::{jw_map, MajoranaMonomial, PauliLetter, PauliString};
pub use error::{Error, Result};
