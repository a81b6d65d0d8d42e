use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::endo::{compose_truncated, endo_height, formal_inverse, is_symplectic, linear_part};
use crate::fixtures;
use crate::linalg::QMatrix;
use crate::tame::{eval_word, eval_word_truncated, invert_word, ElementaryGen, TameWord};

fn q(v: i64) -> Rational {
    Rational::from_int(v)
}

fn expand(terms: &[(Rational, Poly)], nvars: usize, d: u32) -> Poly {
    terms.iter().fold(Poly::zero(nvars), |acc, (c, l)| &acc + &l.pow(d).scale(c))
}

#[test]
fn vandermonde_bases() {
    let nodes = vandermonde_power_basis(2);
    assert_eq!(nodes, vec![q(1), q(2), q(3)]);
    let m = power_coefficient_matrix(2, &nodes);
    assert_eq!(m, QMatrix::from_i64(&[&[1, 2, 1], &[1, 4, 4], &[1, 6, 9]]));
    assert_eq!(m.det().unwrap(), q(4));
    assert_eq!(power_coefficient_matrix(1, &vandermonde_power_basis(1)), QMatrix::from_i64(&[&[1, 1], &[1, 2]]));
    for d in 1..=8 {
        let m = power_coefficient_matrix(d, &vandermonde_power_basis(d));
        assert_eq!(m.rank(), d as usize + 1);
        assert!(!m.det().unwrap().is_zero());
    }
}

#[test]
fn normalize_examples() {
    let a = QMatrix::from_i64(&[&[2, 1], &[1, 1]]);
    let (g, r) = anick_normalize_linear(&PolyEndo::from_linear(&a).unwrap()).unwrap();
    assert_eq!(g, ElementaryGen::Linear { matrix: a });
    assert!(r.is_identity());

    let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
    let phi = PolyEndo::new(vec![&x.scale(&q(2)) + &(&y * &y), y.scale(&Rational::new(1, 2))]).unwrap();
    let (_, r) = anick_normalize_linear(&phi).unwrap();
    assert!(linear_part(&r).is_identity());
    assert_eq!(r.image(0), &(&x + &(&y * &y).scale(&Rational::new(1, 2))));

    let nagata = fixtures::nagata();
    let (g, r) = anick_normalize_linear(&nagata).unwrap();
    assert_eq!(g, ElementaryGen::Linear { matrix: QMatrix::identity(3) });
    assert_eq!(r, nagata);

    let singular = PolyEndo::new(vec![&x * &x, y]).unwrap();
    assert_eq!(anick_normalize_linear(&singular).unwrap_err(), Error::SingularLinearPart);
}

#[test]
fn elimination_blocks_match_their_triples() {
    let v = |i| Poly::var(3, i);
    let (x, y, z) = (v(0), v(1), v(2));
    let phi = PolyEndo::new(vec![
        &(&x + &(&x * &y)) + &(&(&y * &y) * &z).scale(&q(3)),
        &y - &(&x * &z),
        &z + &(&y * &x),
    ])
    .unwrap();
    for k in [2, 3] {
        let (word, blocks) = anick::blocks_of_round(&phi, k).unwrap();
        let mut factors = word.factors().iter();
        for b in &blocks {
            let expected = match b.form {
                Some(_) => {
                    let triple: Vec<_> = factors.by_ref().take(3).cloned().collect();
                    eval_word(&TameWord::new(3, triple).unwrap()).unwrap()
                }
                None => factors.next().unwrap().to_endo().unwrap(),
            };
            assert_eq!(b.to_endo(), expected);
        }
        assert!(factors.next().is_none());
    }
}

#[test]
fn anick_round_examples() {
    let (w, r) = anick_eliminate_degree(&fixtures::shift_xy(), 2).unwrap();
    assert!(r.is_identity());
    let y = Poly::var(2, 1);
    assert_eq!(w.factors(), &[ElementaryGen::shift(0, q(1), &y * &y).unwrap()][..]);

    assert!(matches!(anick_eliminate_degree(&fixtures::shift_xy(), 1), Err(Error::Precondition(_))));
    assert!(matches!(anick_eliminate_degree(&fixtures::shift_xy(), 3), Err(Error::Precondition(_))));

    let cubic = PolyEndo::new(vec![&Poly::var(2, 0) + &y.pow(3), y.clone()]).unwrap();
    let (w, r) = anick_eliminate_degree(&cubic, 2).unwrap();
    assert!(w.is_empty());
    assert_eq!(r, cubic);
}

#[test]
fn anick_rejects_nonconstant_jacobian() {
    let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
    let bad = PolyEndo::new(vec![&x + &(&x * &x), y.clone()]).unwrap();
    assert_eq!(anick_approximate(&bad, 5).unwrap_err(), Error::NonConstantJacobian { degree: 1 });
    let err = anick_eliminate_degree(&bad, 2).unwrap_err();
    assert!(matches!(err, Error::Internal(_)));
}

#[test]
fn anick_nagata() {
    let nagata = fixtures::nagata();
    let (w, report) = anick_approximate(&nagata, 6).unwrap();
    assert!(report.success);
    assert!(report.final_height.at_least(6));
    assert!(!report.linear_factor);
    let approx = eval_word_truncated(&w, Some(5)).unwrap();
    assert_eq!(approx, nagata.truncate(5));
    let residual = compose_truncated(&eval_word_truncated(&invert_word(&w).unwrap(), Some(6)).unwrap(), &nagata, Some(6)).unwrap();
    assert_eq!(residual, report.final_residual);
    for pair in report.rounds.windows(2) {
        assert!(pair[0].k < pair[1].k);
    }
}

#[test]
fn anick_trivial_inputs() {
    let (w, report) = anick_approximate(&PolyEndo::identity(3), 8).unwrap();
    assert!(w.is_empty());
    assert!(report.rounds.is_empty());
    assert!(report.success);

    let a = QMatrix::from_i64(&[&[2, 1], &[1, 1]]);
    let lin = PolyEndo::from_linear(&a).unwrap();
    let (w, report) = anick_approximate(&lin, 2).unwrap();
    assert_eq!(w.factors(), &[ElementaryGen::Linear { matrix: a }][..]);
    assert!(report.success && report.linear_factor);

    let (w, report) = anick_approximate(&fixtures::shift_xy(), 2).unwrap();
    assert!(w.is_empty() && report.success && report.rounds.is_empty());
}

#[test]
fn report_json_shape() {
    let (_, report) = anick_approximate(&fixtures::nagata(), 5).unwrap();
    let v: serde_json::Value = serde_json::to_value(&report).unwrap();
    let r0 = &v["rounds"][0];
    for key in ["k", "height_before", "height_after", "factors_appended", "max_coeff_bits"] {
        assert!(r0[key].is_u64(), "{key}");
    }
    assert!(r0.get("stalled").is_none());
    assert!(r0.get("residual").is_none());
    assert_eq!(v["target"], 5);
    assert_eq!(v["kind"], "poly");
}

#[test]
fn closedness_examples() {
    let (x, p) = (Poly::var(2, 0), Poly::var(2, 1));
    assert!(check_closedness(&[p.pow(2).scale(&q(3))], &[Poly::zero(2)]).unwrap());
    assert!(check_closedness(&[x.pow(2)], &[(&x * &p).scale(&q(2))]).unwrap());
    assert!(!check_closedness(&[x.pow(2)], &[(&x * &p).scale(&q(-2))]).unwrap());

    let v = |i| Poly::var(4, i);
    let (x1, x2, p1, p2) = (v(0), v(1), v(2), v(3));
    // f = (p1 p2, p1 p2) is not a p-gradient.
    let f = [&p1 * &p2, &p1 * &p2];
    let z = [Poly::zero(4), Poly::zero(4)];
    assert!(!check_closedness(&f, &z).unwrap());
    let g = [&x1 * &x2, &x1 * &x2];
    assert!(!check_closedness(&z, &g).unwrap());
    assert!(check_closedness(&z, &[(&x1 * &x2).scale(&q(2)), x1.pow(2)]).unwrap());

    assert!(matches!(check_closedness(&[&x + &x.pow(2)], &[Poly::zero(2)]), Err(Error::Inhomogeneous(_))));
    assert!(matches!(check_closedness(&[x.pow(2)], &[p.pow(3)]), Err(Error::Inhomogeneous(_))));
}

#[test]
fn generating_function_examples() {
    let (x, p) = (Poly::var(2, 0), Poly::var(2, 1));
    assert_eq!(generating_function(&[p.pow(2).scale(&q(3))], &[Poly::zero(2)], 2).unwrap(), p.pow(3));
    assert_eq!(generating_function(&[x.pow(2)], &[(&x * &p).scale(&q(2))], 2).unwrap(), &x.pow(2) * &p);
    assert!(generating_function(&[Poly::zero(2)], &[Poly::zero(2)], 2).unwrap().is_zero());
    assert!(matches!(
        generating_function(&[x.pow(2)], &[(&x * &p).scale(&q(-2))], 2),
        Err(Error::ClosednessFailure(_))
    ));
}

#[test]
fn linear_power_examples() {
    let (x, p) = (Poly::var(2, 0), Poly::var(2, 1));
    assert_eq!(decompose_linear_powers(&x.pow(2)).unwrap(), vec![(q(1), x.clone())]);
    let xp = &x * &p;
    let dec = decompose_linear_powers(&xp).unwrap();
    assert_eq!(expand(&dec, 2, 2), xp);
    let x2p = &x.pow(2) * &p;
    let dec = decompose_linear_powers(&x2p).unwrap();
    assert_eq!(expand(&dec, 2, 3), x2p);
    assert!(decompose_linear_powers(&Poly::zero(2)).unwrap().is_empty());
    assert!(decompose_linear_powers(&(&x + &xp)).is_err());
}

#[test]
fn symp_blocks_match_their_triples() {
    // A mixed cubic potential forces conjugated transvections.
    let v = |i| Poly::var(4, i);
    let (x1, x2, p1, p2) = (v(0), v(1), v(2), v(3));
    let big_f = &(&x1 * &p2) * &x2 + &(&p1 * &p1) * &x2;
    for (c, l) in decompose_linear_powers(&big_f).unwrap() {
        let a = crate::tame::symplectic_complete(&l).unwrap();
        let block = Block { form: Some(l.clone()), power: 2, coeff: Poly::constant(4, &c * &q(3)), dir: a.row(0).to_vec() };
        let triple = TameWord::new(
            4,
            vec![
                ElementaryGen::SympLinear { matrix: a.clone() },
                ElementaryGen::TransvectionX { generator: p1.pow(3).scale(&c) },
                ElementaryGen::SympLinear { matrix: a.inverse().unwrap() },
            ],
        )
        .unwrap();
        assert_eq!(block.to_endo(), eval_word(&triple).unwrap());
    }
}

fn expand_shears(pieces: &[(Vec<Rational>, Poly)], nv: usize) -> Poly {
    let n = nv / 2;
    let mut acc = Poly::zero(nv);
    for (s, g) in pieces {
        let subs: Vec<Poly> = (0..nv)
            .map(|u| if u < n { Poly::var(nv, u) } else { &Poly::var(nv, u) + &Poly::var(nv, u - n).scale(&s[u - n]) })
            .collect();
        acc = &acc + &g.substitute(&subs).unwrap();
    }
    acc
}

#[test]
fn shear_decomposition() {
    let v = |i| Poly::var(4, i);
    let (x1, x2, p1, p2) = (v(0), v(1), v(2), v(3));
    let big_f = &(&(&x1 * &p2) * &x2) + &(&(&p1 * &p1) * &x2);
    let pieces = decompose_shears(&big_f).unwrap();
    assert_eq!(expand_shears(&pieces, 4), big_f);
    for (s, g) in &pieces {
        assert!((0..2).all(|i| !g.depends_on(i)));
        assert!(s.iter().all(|v| !v.is_negative()));
    }
    // x p = ((p + x)^2 - p^2 - x^2)/2 in disguise: nodes 0, 1, 2.
    let xp = &Poly::var(2, 0) * &Poly::var(2, 1);
    let pieces = decompose_shears(&xp).unwrap();
    assert_eq!(expand_shears(&pieces, 2), xp);
    assert!(pieces.len() <= 3);
    assert!(decompose_shears(&Poly::zero(4)).unwrap().is_empty());
    assert!(decompose_shears(&(&x1 + &(&x1 * &p1))).is_err());
    assert!(decompose_shears(&Poly::var(3, 0)).is_err());
}

#[test]
fn shear_blocks_match_their_triples() {
    let v = |i| Poly::var(4, i);
    let (x1, x2, p1, p2) = (v(0), v(1), v(2), v(3));
    let big_f = &(&(&x1 * &p2) * &x2) + &(&(&p1 * &p1) * &x2);
    for (s, g) in decompose_shears(&big_f).unwrap() {
        let a = symp::shear_matrix(&s, true);
        assert!(crate::tame::is_sp_matrix(&a).unwrap());
        let block = symp::ShearBlock::new(&s, &g).unwrap();
        let triple = TameWord::new(
            4,
            vec![
                ElementaryGen::SympLinear { matrix: a.clone() },
                ElementaryGen::TransvectionX { generator: g.clone() },
                ElementaryGen::SympLinear { matrix: symp::shear_matrix(&s, false) },
            ],
        )
        .unwrap();
        let endo = eval_word(&triple).unwrap();
        assert_eq!(block.to_endo(), endo);
        let id: Vec<Poly> = (0..4).map(|u| Poly::var(4, u)).collect();
        let back = block.apply_inverse(endo.images(), None).unwrap();
        assert_eq!(back, id);
    }
}

#[test]
fn symp_round_examples() {
    let (x, p) = (Poly::var(2, 0), Poly::var(2, 1));
    let sigma = PolyEndo::new(vec![&x + &p.pow(2).scale(&q(3)), p.clone()]).unwrap();
    let (w, r) = symp_eliminate_degree(&sigma, 2).unwrap();
    assert_eq!(w.factors(), &[ElementaryGen::TransvectionX { generator: p.pow(3) }][..]);
    assert!(r.is_identity());

    let cubic = PolyEndo::new(vec![&x + &p.pow(3), p.clone()]).unwrap();
    let (w, r) = symp_eliminate_degree(&cubic, 2).unwrap();
    assert!(w.is_empty());
    assert_eq!(r, cubic);

    let bad = PolyEndo::new(vec![&x + &p.pow(2), &p + &(&x * &p)]).unwrap();
    assert!(matches!(symp_eliminate_degree(&bad, 2), Err(Error::ClosednessFailure(_))));
}

#[test]
fn symp_trivial_inputs() {
    let (w, report) = symp_approximate(&PolyEndo::identity(4), 8).unwrap();
    assert!(w.is_empty() && report.success);

    let s = QMatrix::from_i64(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[1, 2, 1, 0], &[2, -1, 0, 1]]);
    let (w, report) = symp_approximate(&PolyEndo::from_linear(&s).unwrap(), 8).unwrap();
    assert_eq!(w.factors(), &[ElementaryGen::SympLinear { matrix: s }][..]);
    assert!(report.rounds.is_empty() && report.final_height.is_infinite());

    assert!(matches!(symp_approximate(&fixtures::non_symplectic(), 4), Err(Error::NotSymplectic(_))));
    assert_eq!(symp_approximate(&PolyEndo::identity(3), 4).unwrap_err(), Error::OddVariableCount(3));
}

#[test]
fn symp_fixture_word() {
    let w0 = fixtures::symplectic_word();
    let sigma = eval_word(&w0).unwrap();
    let (w, report) = symp_approximate(&sigma, 7).unwrap();
    assert!(report.success);
    assert!(w.is_symplectic());
    assert_eq!(eval_word_truncated(&w, Some(6)).unwrap(), sigma.truncate(6));
    for round in &report.rounds {
        assert!(is_symplectic(&round.residual, 2, Some(6)).unwrap().is_symplectic());
        let big_f = round.generating_function.as_ref().unwrap();
        assert_eq!(big_f.degree(), Some(round.k + 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shears_re_expand(f in crate::poly::tests::arb_poly(4, 4, 5), d in 1u32..=4) {
        let f = f.homogeneous_component(d);
        prop_assert_eq!(expand_shears(&decompose_shears(&f).unwrap(), 4), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn linear_powers_reexpand(f in crate::poly::tests::arb_poly(4, 4, 4), d in 1u32..5) {
        let f = f.homogeneous_component(d);
        let dec = decompose_linear_powers(&f).unwrap();
        prop_assert_eq!(expand(&dec, 4, d), f);
    }

    #[test]
    fn anick_round_on_random_words(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = fixtures::random_tame_word(&mut rng, 3, 3, 3);
        let (_, phi) = anick_normalize_linear(&eval_word_truncated(&w, Some(9)).unwrap()).unwrap();
        if let Height::Finite(k) = phi.height_from_identity() {
            let (round, r) = anick_eliminate_degree_truncated(&phi, k, 9).unwrap();
            prop_assert!(r.height_from_identity().at_least(k + 1));
            let cap = Some(9);
            let back = compose_truncated(&eval_word_truncated(&round, cap).unwrap(), &r, cap).unwrap();
            prop_assert_eq!(back, phi.truncate(9));
        }
    }

    #[test]
    fn anick_driver_on_random_words(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = fixtures::random_tame_word(&mut rng, 3, 4, 3);
        let phi = eval_word_truncated(&w, Some(6)).unwrap();
        let (out, report) = anick_approximate(&phi, 6).unwrap();
        prop_assert!(report.success);
        prop_assert_eq!(eval_word_truncated(&out, Some(5)).unwrap(), phi.truncate(5));
        let inv = eval_word_truncated(&invert_word(&out).unwrap(), Some(5)).unwrap();
        prop_assert_eq!(inv, formal_inverse(&phi, 5).unwrap().truncate(5));
    }

    #[test]
    fn symp_driver_on_random_words(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = fixtures::random_symplectic_word(&mut rng, 2, 3, 3);
        let sigma = eval_word_truncated(&w, Some(5)).unwrap();
        let (out, report) = symp_approximate(&sigma, 5).unwrap();
        prop_assert!(report.success);
        prop_assert!(out.is_symplectic());
        prop_assert_eq!(eval_word_truncated(&out, Some(4)).unwrap(), sigma.truncate(4));
        for round in &report.rounds {
            prop_assert!(is_symplectic(&round.residual, 2, Some(4)).unwrap().is_symplectic());
            let big_f = round.generating_function.as_ref().unwrap();
            let dev = report.rounds.iter().find(|r| r.k == round.k).unwrap();
            prop_assert!(dev.height_after.at_least(round.k + 1));
            prop_assert!(big_f.is_homogeneous());
        }
        let h = endo_height(&report.final_residual, &PolyEndo::identity(4)).unwrap();
        prop_assert!(h.at_least(5));
    }
}
