use crate::algebra::{MajoranaMonomial, PauliLetter, PauliString};
use crate::error::{Error, Result};

/// Jordan–Wigner image of the single Majorana `γ_mode` on `n_fermions` qubits.
///
/// `γ_{2j} ↦ Z_0…Z_{j-1} X_j` and `γ_{2j+1} ↦ −Z_0…Z_{j-1} Y_j`. The sign on
/// the odd image fixes `iγ_{2j}γ_{2j+1} = Z_j`.
pub fn jw_single(mode: usize, n_fermions: usize) -> Result<PauliString> {
    if mode >= 2 * n_fermions {
        return Err(Error::Dimension {
            expected: 2 * n_fermions,
            found: mode + 1,
        });
    }
    let j = mode / 2;
    let mut p = PauliString::identity(n_fermions);
    for q in 0..j {
        p.set_letter(q, PauliLetter::Z)?;
    }
    if mode % 2 == 0 {
        p.set_letter(j, PauliLetter::X)?;
        Ok(p)
    } else {
        p.set_letter(j, PauliLetter::Y)?;
        Ok(p.negated())
    }
}

/// Jordan–Wigner image of a Majorana monomial, phase included.
pub fn jw_map(m: &MajoranaMonomial, n_fermions: usize) -> Result<PauliString> {
    let mut out = PauliString::identity(n_fermions);
    for &mode in m.modes() {
        out = out.multiply(&jw_single(mode, n_fermions)?)?;
    }
    Ok(out.times_i_pow(m.phase()))
}
