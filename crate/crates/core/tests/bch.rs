mod common;

use common::*;
use proptest::prelude::*;
use rfgrowth::field::{int, rational, Rational};
use rfgrowth::lie_ring::LieRingDescription;

fn vec_strategy(dim: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-8i64..=8, 1i64..=6).prop_map(|(n, d)| rational(n, d)), dim)
}

fn neg(v: &[Rational]) -> Vec<Rational> {
    v.iter().map(|x| -x).collect()
}

#[test]
fn free_class4_satisfies_jacobi() {
    assert_eq!(free_class4().violation(), None);
    assert_eq!(upper5().violation(), None);
}

#[test]
fn upper_triangular_bracket_is_the_commutator() {
    let l = upper5();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
    for _ in 0..50 {
        let (v, w) = (random_vector(&mut rng, 10), random_vector(&mut rng, 10));
        let (a, b) = (mat_from(&v), mat_from(&w));
        let ab = mat_mul(&a, &b);
        let ba = mat_mul(&b, &a);
        let comm: Vec<Vec<Rational>> = (0..5).map(|i| (0..5).map(|j| &ab[i][j] - &ba[i][j]).collect()).collect();
        assert_eq!(l.bracket(&v, &w).unwrap(), mat_to(&comm));
    }
}

fn check_ring(l: &LieRingDescription, x: &[Rational], y: &[Rational], z: &[Rational]) -> Result<(), TestCaseError> {
    let xy = l.bch_multiply(x, y).unwrap();
    let yz = l.bch_multiply(y, z).unwrap();
    prop_assert_eq!(l.bch_multiply(&xy, z).unwrap(), l.bch_multiply(x, &yz).unwrap());
    prop_assert_eq!(l.bch_multiply(x, &neg(x)).unwrap(), l.zero());
    prop_assert_eq!(l.bch_multiply(&l.zero(), x).unwrap(), x.to_vec());
    let mut acc = l.zero();
    for _ in 0..3 {
        acc = l.bch_multiply(&acc, x).unwrap();
    }
    prop_assert_eq!(acc, l.bch_power(x, &int(3)).unwrap());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heisenberg_group_law(x in vec_strategy(3), y in vec_strategy(3), z in vec_strategy(3)) {
        check_ring(&heisenberg_ring(), &x, &y, &z)?;
    }

    #[test]
    fn free_class4_group_law(x in vec_strategy(8), y in vec_strategy(8), z in vec_strategy(8)) {
        check_ring(&free_class4(), &x, &y, &z)?;
    }

    #[test]
    fn bch_is_log_of_matrix_product(x in vec_strategy(10), y in vec_strategy(10)) {
        let l = upper5();
        let expected = mat_to(&mat_log(&mat_mul(&mat_exp(&mat_from(&x)), &mat_exp(&mat_from(&y)))));
        prop_assert_eq!(l.bch_multiply(&x, &y).unwrap(), expected);
    }

    #[test]
    fn fractional_powers_compose(x in vec_strategy(8), s in -5i64..=5, t in 1i64..=5) {
        let l = free_class4();
        let a = l.bch_power(&x, &rational(s, t)).unwrap();
        let b = l.bch_power(&x, &rational(1, t)).unwrap();
        prop_assert_eq!(l.bch_multiply(&a, &b).unwrap(), l.bch_power(&x, &rational(s + 1, t)).unwrap());
    }
}
