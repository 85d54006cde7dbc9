//! Exact Pauli and Majorana operator algebra and the Jordan–Wigner map
//! between them.

mod jordan_wigner;
mod majorana;
mod pauli;

pub use jordan_wigner::{jw_map, jw_single};
pub use majorana::{majorana_commutes, MajoranaMonomial};
pub use pauli::{pauli_commutes, pauli_multiply, PauliLetter, PauliString};
