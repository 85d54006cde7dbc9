use proptest::prelude::*;
use tomosched::algebra::{jw_map, jw_single, MajoranaMonomial, PauliLetter, PauliString};

const N: usize = 5;

fn pauli() -> impl Strategy<Value = PauliString> {
    (prop::collection::vec(0u8..4, N), 0u8..4).prop_map(|(ls, phase)| {
        let letters: Vec<PauliLetter> = ls
            .into_iter()
            .map(|l| [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z][l as usize])
            .collect();
        PauliString::from_letters(&letters).with_phase(phase)
    })
}

fn monomial() -> impl Strategy<Value = MajoranaMonomial> {
    prop::collection::vec(0usize..2 * N, 0..7).prop_map(|seq| MajoranaMonomial::product(&seq))
}

proptest! {
    #[test]
    fn pauli_product_is_associative(a in pauli(), b in pauli(), c in pauli()) {
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn pauli_commutation_matches_products(a in pauli(), b in pauli()) {
        let ab = a.multiply(&b).unwrap();
        let ba = b.multiply(&a).unwrap();
        if a.commutes_with(&b).unwrap() {
            prop_assert_eq!(ab, ba);
        } else {
            prop_assert_eq!(ab, ba.negated());
        }
    }

    #[test]
    fn pauli_squares_to_phase(a in pauli()) {
        let sq = a.multiply(&a).unwrap();
        prop_assert_eq!(sq.weight(), 0);
    }

    #[test]
    fn pauli_text_round_trip(a in pauli()) {
        prop_assert_eq!(a.to_string().parse::<PauliString>().unwrap(), a);
    }

    #[test]
    fn jordan_wigner_is_a_homomorphism(a in monomial(), b in monomial()) {
        let lhs = jw_map(&a.multiply(&b), N).unwrap();
        let rhs = jw_map(&a, N).unwrap().multiply(&jw_map(&b, N).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn jordan_wigner_preserves_commutation(a in monomial(), b in monomial()) {
        let (pa, pb) = (jw_map(&a, N).unwrap(), jw_map(&b, N).unwrap());
        prop_assert_eq!(a.commutes_with(&b), pa.commutes_with(&pb).unwrap());
    }

    #[test]
    fn hermitian_monomials_map_to_hermitian_paulis(modes in prop::collection::btree_set(0usize..2 * N, 0..7)) {
        let modes: Vec<usize> = modes.into_iter().collect();
        let m = MajoranaMonomial::hermitian(&modes).unwrap();
        prop_assert!(m.is_hermitian());
        prop_assert!(jw_map(&m, N).unwrap().is_hermitian());
    }

    #[test]
    fn monomial_text_round_trip(a in monomial()) {
        prop_assert_eq!(a.to_string().parse::<MajoranaMonomial>().unwrap(), a);
    }
}

#[test]
fn single_majoranas_satisfy_the_clifford_algebra() {
    for i in 0..2 * N {
        let gi = jw_single(i, N).unwrap();
        assert_eq!(gi.multiply(&gi).unwrap(), PauliString::identity(N));
        for j in 0..i {
            assert!(!gi.commutes_with(&jw_single(j, N).unwrap()).unwrap());
        }
    }
}

#[test]
fn pair_operators_on_one_qubit_are_z() {
    for q in 0..N {
        let z = PauliString::single(N, q, PauliLetter::Z).unwrap();
        assert_eq!(jw_map(&MajoranaMonomial::pair(2 * q, 2 * q + 1).unwrap(), N).unwrap(), z);
    }
}
