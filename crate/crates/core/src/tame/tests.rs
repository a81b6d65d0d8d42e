use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::endo::{compose, is_symplectic, jacobian};
use crate::fixtures;

fn q(v: i64) -> Rational {
    Rational::from_int(v)
}

#[test]
fn eval_examples() {
    assert!(eval_word(&TameWord::empty(3)).unwrap().is_identity());

    let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
    let w = TameWord::new(2, vec![ElementaryGen::shift(0, q(1), &y * &y).unwrap()]).unwrap();
    assert_eq!(eval_word(&w).unwrap(), fixtures::shift_xy());

    let t = eval_word(&fixtures::transvection_word()).unwrap();
    let p = Poly::var(2, 1);
    assert_eq!(t.images(), &[&x + &(&p * &p).scale(&q(3)), p][..]);
}

#[test]
fn eval_order_is_left_to_right_product() {
    let w = fixtures::shift_word();
    let gs: Vec<PolyEndo> = w.factors().iter().map(|g| g.to_endo().unwrap()).collect();
    let expected = compose(&gs[0], &compose(&gs[1], &gs[2]).unwrap()).unwrap();
    assert_eq!(eval_word(&w).unwrap(), expected);
}

#[test]
fn invert_examples() {
    let y = Poly::var(2, 1);
    let w = TameWord::new(2, vec![ElementaryGen::shift(0, q(1), &y * &y).unwrap()]).unwrap();
    let inv = invert_word(&w).unwrap();
    assert_eq!(inv.factors(), &[ElementaryGen::shift(0, q(1), -(&y * &y)).unwrap()][..]);

    let w = fixtures::shift_word();
    let inv = invert_word(&w).unwrap();
    assert_eq!(inv.len(), 3);
    assert_eq!(inv.factors()[0], w.factors()[2].inverse().unwrap());
    assert_eq!(inv.factors()[2], w.factors()[0].inverse().unwrap());
    assert_eq!(invert_word(&inv).unwrap(), w);
    assert!(compose(&eval_word(&inv).unwrap(), &eval_word(&w).unwrap()).unwrap().is_identity());

    let half = ElementaryGen::shift(1, q(2), Poly::var(2, 0).pow(2)).unwrap().inverse().unwrap();
    assert_eq!(half, ElementaryGen::shift(1, Rational::new(1, 2), Poly::var(2, 0).pow(2).scale(&Rational::new(-1, 2))).unwrap());
}

#[test]
fn generator_validation() {
    let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
    assert!(ElementaryGen::shift(0, q(1), &x * &y).is_err());
    assert!(ElementaryGen::shift(0, q(0), y.clone()).is_err());
    assert!(ElementaryGen::shift(0, q(1), &y + &Poly::one(2)).is_err());
    assert!(ElementaryGen::shift(2, q(1), y.clone()).is_err());
    let bad_tx = ElementaryGen::TransvectionX { generator: &x * &y };
    assert!(bad_tx.validate().is_err());
    let linear_tx = ElementaryGen::TransvectionX { generator: y.clone() };
    assert!(linear_tx.validate().is_err());
    let singular = ElementaryGen::Linear { matrix: QMatrix::from_i64(&[&[1, 2], &[2, 4]]) };
    assert!(singular.validate().is_err());
    let not_sp = ElementaryGen::SympLinear { matrix: QMatrix::from_i64(&[&[2, 0], &[0, 1]]) };
    assert_eq!(not_sp.validate(), Err(Error::NotSymplecticMatrix));
    let mixed = TameWord::new(2, vec![ElementaryGen::Linear { matrix: QMatrix::identity(3) }]);
    assert_eq!(mixed, Err(Error::ArityMismatch { word: 2, factor: 3 }));
}

#[test]
fn sp_matrix_examples() {
    assert!(is_sp_matrix(&QMatrix::identity(4)).unwrap());
    assert!(is_sp_matrix(&QMatrix::from_i64(&[&[0, 1], &[-1, 0]])).unwrap());
    assert!(!is_sp_matrix(&QMatrix::from_i64(&[&[2, 0], &[0, 1]])).unwrap());
    assert_eq!(is_sp_matrix(&QMatrix::identity(3)), Err(Error::OddVariableCount(3)));
    assert!(is_sp_matrix(&standard_form(2)).unwrap());
}

#[test]
fn sp_matrix_matches_bracket_preservation() {
    let m = QMatrix::from_i64(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[1, 2, 1, 0], &[2, -1, 0, 1]]);
    assert!(is_sp_matrix(&m).unwrap());
    let f = PolyEndo::from_linear(&m).unwrap();
    assert!(is_symplectic(&f, 2, None).unwrap().is_symplectic());
    let asym = QMatrix::from_i64(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 1, 1, 0], &[0, 0, 0, 1]]);
    assert!(!is_sp_matrix(&asym).unwrap());
    assert!(!is_symplectic(&PolyEndo::from_linear(&asym).unwrap(), 2, None).unwrap().is_symplectic());
}

fn completes(l: &Poly) {
    let a = symplectic_complete(l).unwrap();
    assert!(is_sp_matrix(&a).unwrap());
    let images = PolyEndo::from_linear(&a).unwrap().into_images();
    let n = l.nvars() / 2;
    assert_eq!(l.substitute(&images).unwrap(), Poly::var(2 * n, n));
}

#[test]
fn symplectic_complete_examples() {
    assert!(symplectic_complete(&Poly::var(2, 1)).unwrap().is_identity());
    assert!(symplectic_complete(&Poly::var(4, 2)).unwrap().is_identity());
    assert_eq!(symplectic_complete(&Poly::var(2, 0)).unwrap(), QMatrix::from_i64(&[&[0, -1], &[1, 0]]));
    completes(&Poly::var(2, 0));
    completes(&(&Poly::var(2, 0) + &Poly::var(2, 1)));
    completes(&Poly::var(6, 4));
    assert!(symplectic_complete(&Poly::zero(2)).is_err());
    assert!(symplectic_complete(&Poly::var(2, 0).pow(2)).is_err());
}

#[test]
fn word_json_round_trip() {
    for w in [fixtures::shift_word(), fixtures::symplectic_word(), fixtures::transvection_word()] {
        let s = serde_json::to_string(&w).unwrap();
        let back: TameWord = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
    }
    let s = serde_json::to_string(&fixtures::transvection_word()).unwrap();
    assert!(s.contains(r#""kind":"transvection_x""#));
    let sp = TameWord::new(2, vec![ElementaryGen::SympLinear { matrix: QMatrix::from_i64(&[&[0, 1], &[-1, 0]]) }]).unwrap();
    assert!(serde_json::to_string(&sp).unwrap().contains(r#""kind":"splinear","matrix":[["0/1","1/1"],["-1/1","0/1"]]"#));
    let bad = r#"{"arity":2,"factors":[{"kind":"shift","target":0,"scale":"1","addend":{"nvars":2,"terms":[{"c":"1","e":[1,0]}]}}]}"#;
    assert!(serde_json::from_str::<TameWord>(bad).is_err());
}

#[test]
fn trace_defect_detects_nonconstant_jacobian() {
    let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
    let f = PolyEndo::new(vec![&x + &(&x * &y), y.clone()]).unwrap();
    assert_eq!(trace_defect(&f).unwrap(), y);
    assert!(trace_defect(&fixtures::nagata()).unwrap().is_zero());
}

fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inverse_word_composes_to_identity(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Up to three nonlinear factors interleaved with up to three linear ones.
        let base = fixtures::random_tame_word(&mut rng, 3, 3, 2);
        let mut factors = base.factors().to_vec();
        for _ in 0..rng.gen_range(0..=3) {
            let at = rng.gen_range(0..=factors.len());
            factors.insert(at, ElementaryGen::Linear { matrix: fixtures::random_unimodular(&mut rng, 3) });
        }
        let w = TameWord::new(3, factors).unwrap();
        let inv = invert_word(&w).unwrap();
        let f = eval_word(&w).unwrap();
        let g = eval_word(&inv).unwrap();
        prop_assert!(compose(&g, &f).unwrap().is_identity());
        prop_assert_eq!(invert_word(&inv).unwrap(), w);
    }

    #[test]
    fn jacobian_is_constant(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = fixtures::random_tame_word(&mut rng, 3, 3, 2);
        let j = jacobian(&eval_word(&w).unwrap());
        prop_assert!(j.is_constant() && !j.is_zero());
        let unit = TameWord::new(3, w.factors().iter().filter(|g| match g {
            ElementaryGen::Shift { scale, .. } => scale.is_one(),
            ElementaryGen::Linear { matrix } => matrix.det().unwrap().is_one(),
            _ => true,
        }).cloned().collect()).unwrap();
        prop_assert_eq!(jacobian(&eval_word(&unit).unwrap()), Poly::one(3));
    }

    #[test]
    fn symplectic_words_are_symplectic(seed in seeds(), n in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = fixtures::random_symplectic_word(&mut rng, n, 3, 3);
        prop_assert!(w.is_symplectic());
        let f = eval_word(&w).unwrap();
        prop_assert!(is_symplectic(&f, n, None).unwrap().is_symplectic());
        prop_assert_eq!(jacobian(&f), Poly::one(2 * n));
    }

    #[test]
    fn traceless_after_normalization(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = fixtures::random_tame_word(&mut rng, 3, 3, 2);
        let f = eval_word(&w).unwrap();
        let a = crate::endo::linear_part(&f);
        let lin_inv = PolyEndo::from_linear(&a.inverse().unwrap()).unwrap();
        let g = compose(&lin_inv, &f).unwrap();
        prop_assert!(trace_defect(&g).unwrap().is_zero());
    }

    #[test]
    fn completion_postconditions(coeffs in prop::collection::vec(-3i64..=3, 2..=6)) {
        let nv = coeffs.len() / 2 * 2;
        prop_assume!(coeffs[..nv].iter().any(|&c| c != 0));
        let mut l = Poly::zero(nv);
        for (i, c) in coeffs[..nv].iter().enumerate() {
            l.add_term(Monomial::var(nv, i), &q(*c));
        }
        completes(&l);
    }
}
