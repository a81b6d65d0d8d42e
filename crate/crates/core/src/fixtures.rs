//! Named sample inputs and seeded random generators for tests and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::endo::{EndoFile, PolyEndo};
use crate::linalg::QMatrix;
use crate::poly::{Monomial, Poly};
use crate::rational::Rational;
use crate::tame::{ElementaryGen, TameWord};

fn var(n: usize, i: usize) -> Poly {
    Poly::var(n, i)
}

/// The Nagata automorphism of `Q[x, y, z]`, written with `t = x^2 - yz`:
/// `(x + t z, y + 2 t x + t^2 z, z)`. It preserves `t` and has Jacobian 1.
pub fn nagata() -> PolyEndo {
    let (x, y, z) = (var(3, 0), var(3, 1), var(3, 2));
    let t = &(&x * &x) - &(&y * &z);
    let two = Rational::from_int(2);
    PolyEndo::new(vec![
        &x + &(&t * &z),
        &(&y + &(&t * &x).scale(&two)) + &(&(&t * &t) * &z),
        z,
    ])
    .expect("valid fixture")
}

/// `(x + y^2, y)`.
pub fn shift_xy() -> PolyEndo {
    let (x, y) = (var(2, 0), var(2, 1));
    PolyEndo::new(vec![&x + &(&y * &y), y]).expect("valid fixture")
}

/// `(x + p^2, p)` for `n = 1`.
pub fn symplectic_shear() -> PolyEndo {
    let (x, p) = (var(2, 0), var(2, 1));
    PolyEndo::new(vec![&x + &(&p * &p), p]).expect("valid fixture")
}

/// `(x + p^2, p + x^2)` for `n = 1`; `{p + x^2, x + p^2} = 1 - 4xp`.
pub fn non_symplectic() -> PolyEndo {
    let (x, p) = (var(2, 0), var(2, 1));
    PolyEndo::new(vec![&x + &(&p * &p), &p + &(&x * &x)]).expect("valid fixture")
}

/// `[TransvectionX(p^3)]` for `n = 1`, evaluating to `(x + 3p^2, p)`.
pub fn transvection_word() -> TameWord {
    let p = var(2, 1);
    TameWord::new(2, vec![ElementaryGen::TransvectionX { generator: p.pow(3) }]).expect("valid fixture")
}

/// A three-factor symplectic word for `n = 2`.
pub fn symplectic_word() -> TameWord {
    let v = |i| var(4, i);
    let (x1, x2, p1, p2) = (v(0), v(1), v(2), v(3));
    let shear = QMatrix::from_i64(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[1, 2, 1, 0], &[2, -1, 0, 1]]);
    TameWord::new(
        4,
        vec![
            ElementaryGen::TransvectionX { generator: &(&p1 * &p1) * &p2 },
            ElementaryGen::SympLinear { matrix: shear },
            ElementaryGen::TransvectionP { generator: &x1.pow(3) - &(&x1 * &x2.pow(2)) },
        ],
    )
    .expect("valid fixture")
}

/// A shift word in three variables mixing a linear factor.
pub fn shift_word() -> TameWord {
    let v = |i| var(3, i);
    let (x, y, z) = (v(0), v(1), v(2));
    let a = QMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[1, 0, 1]]);
    TameWord::new(
        3,
        vec![
            ElementaryGen::shift(0, Rational::one(), &(&y * &z) + &z.pow(3)).expect("valid"),
            ElementaryGen::Linear { matrix: a },
            ElementaryGen::shift(2, Rational::from_int(2), &(&x * &x) - &y.pow(2)).expect("valid"),
        ],
    )
    .expect("valid fixture")
}

/// A bundled fixture: either an endomorphism file or a word.
#[derive(Clone, Debug)]
pub enum Fixture {
    Endo(EndoFile),
    Word(TameWord),
}

pub const FIXTURE_NAMES: &[&str] = &[
    "identity",
    "nagata",
    "shift",
    "symplectic-shear",
    "non-symplectic",
    "transvection-word",
    "symplectic-word",
    "shift-word",
];

pub fn by_name(name: &str) -> Option<Fixture> {
    Some(match name {
        "identity" => Fixture::Endo(EndoFile::from_endo(&PolyEndo::identity(2), Some(1))),
        "nagata" => Fixture::Endo(EndoFile::from_endo(&nagata(), None)),
        "shift" => Fixture::Endo(EndoFile::from_endo(&shift_xy(), None)),
        "symplectic-shear" => Fixture::Endo(EndoFile::from_endo(&symplectic_shear(), Some(1))),
        "non-symplectic" => Fixture::Endo(EndoFile::from_endo(&non_symplectic(), Some(1))),
        "transvection-word" => Fixture::Word(transvection_word()),
        "symplectic-word" => Fixture::Word(symplectic_word()),
        "shift-word" => Fixture::Word(shift_word()),
        _ => return None,
    })
}

fn small_nonzero<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Rational {
    loop {
        let v = rng.gen_range(-bound..=bound);
        if v != 0 {
            return Rational::from_int(v);
        }
    }
}

/// Random polynomial in the variables `vars` with `1..=max_terms` terms of
/// degree in `min_deg..=max_deg` and small integer coefficients.
pub fn random_poly<R: Rng + ?Sized>(
    rng: &mut R,
    nvars: usize,
    vars: &[usize],
    min_deg: u32,
    max_deg: u32,
    max_terms: usize,
) -> Poly {
    let mut p = Poly::zero(nvars);
    while p.is_zero() {
        for _ in 0..rng.gen_range(1..=max_terms) {
            let deg = rng.gen_range(min_deg..=max_deg);
            let mut exps = vec![0u16; nvars];
            for _ in 0..deg {
                exps[*vars.choose(rng).expect("nonempty block")] += 1;
            }
            p.add_term(Monomial::from_exponents(exps), &small_nonzero(rng, 3));
        }
    }
    p
}

/// Random invertible integer matrix as a product of elementary row operations
/// and a sign/permutation, so its determinant is `±1`.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QMatrix {
    let mut m = QMatrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..n + 1 {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = small_nonzero(rng, 2);
        for col in 0..n {
            let add = &c * &m[(j, col)];
            m[(i, col)] += &add;
        }
    }
    m
}

/// Random symplectic matrix as a product of symmetric shears
/// `[[I, 0], [S, I]]` and `[[I, S], [0, I]]`.
pub fn random_sp_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QMatrix {
    let mut m = QMatrix::identity(2 * n);
    for round in 0..2 {
        let mut s = QMatrix::identity(2 * n);
        for i in 0..n {
            for j in i..n {
                let c = Rational::from_int(rng.gen_range(-1..=1));
                let (r, col) = if round == 0 { (n + i, j) } else { (i, n + j) };
                let (r2, col2) = if round == 0 { (n + j, i) } else { (j, n + i) };
                s[(r, col)] = c.clone();
                s[(r2, col2)] = c;
            }
        }
        m = m.mul(&s).expect("square");
    }
    m
}

/// Random tame word in `n` variables: `Linear` factors with determinant `±1`
/// and `Shift` factors with scale in `{1, -1, 2}` and addends of degree
/// `1..=max_deg`.
pub fn random_tame_word<R: Rng + ?Sized>(rng: &mut R, n: usize, max_factors: usize, max_deg: u32) -> TameWord {
    let len = rng.gen_range(1..=max_factors);
    let mut factors = Vec::with_capacity(len);
    for _ in 0..len {
        if n > 1 && rng.gen_bool(0.7) {
            let target = rng.gen_range(0..n);
            let others: Vec<usize> = (0..n).filter(|&i| i != target).collect();
            let addend = random_poly(rng, n, &others, 1, max_deg, 3);
            let scale = Rational::from_int(*[1, 1, -1, 2].choose(rng).expect("nonempty"));
            factors.push(ElementaryGen::Shift { target, scale, addend });
        } else {
            factors.push(ElementaryGen::Linear { matrix: random_unimodular(rng, n) });
        }
    }
    TameWord::new(n, factors).expect("generated factors are valid")
}

/// Random symplectic word in `2n` variables mixing `SympLinear` factors and
/// transvections with generators of degree `2..=max_deg`.
pub fn random_symplectic_word<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_factors: usize,
    max_deg: u32,
) -> TameWord {
    let nv = 2 * n;
    let xs: Vec<usize> = (0..n).collect();
    let ps: Vec<usize> = (n..nv).collect();
    let len = rng.gen_range(1..=max_factors);
    let mut factors = Vec::with_capacity(len);
    for _ in 0..len {
        let g = match rng.gen_range(0..5) {
            0 => ElementaryGen::SympLinear { matrix: random_sp_matrix(rng, n) },
            1 | 2 => ElementaryGen::TransvectionX { generator: random_poly(rng, nv, &ps, 2, max_deg, 3) },
            _ => ElementaryGen::TransvectionP { generator: random_poly(rng, nv, &xs, 2, max_deg, 3) },
        };
        factors.push(g);
    }
    TameWord::new(nv, factors).expect("generated factors are valid")
}
