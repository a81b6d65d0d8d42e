//! Symplectic linear algebra for the bracket `{p_i, x_j} = δ_ij`.

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::poly::{Monomial, Poly};
use crate::rational::Rational;

/// `J = [[0, -I], [I, 0]]`, the Gram matrix `J_uv = {z_u, z_v}` of the
/// generators `z = (x_1..x_n, p_1..p_n)`.
pub fn standard_form(n: usize) -> QMatrix {
    let mut j = QMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = Rational::from_int(-1);
        j[(n + i, i)] = Rational::one();
    }
    j
}

/// `AᵀJA = J`, exactly. Equivalent to the linear change `z -> zA`
/// preserving the bracket.
pub fn is_sp_matrix(a: &QMatrix) -> Result<bool> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    if a.rows() % 2 != 0 {
        return Err(Error::OddVariableCount(a.rows()));
    }
    let j = standard_form(a.rows() / 2);
    Ok(a.transpose().mul(&j)?.mul(a)? == j)
}

fn pairing(j: &QMatrix, u: &[Rational], v: &[Rational]) -> Rational {
    let jv = j.mul_vec(v);
    u.iter().zip(&jv).fold(Rational::zero(), |acc, (a, b)| acc + a * b)
}

fn axpy(v: &mut [Rational], c: &Rational, w: &[Rational]) {
    for (a, b) in v.iter_mut().zip(w) {
        *a += &(c * b);
    }
}

/// Symplectic `A` such that substituting the change `z -> zA` into `ℓ`
/// gives `p_1`. Built by symplectic Gram–Schmidt: the columns of `A⁻¹` form
/// a symplectic basis whose `p_1` slot is the coefficient vector of `ℓ`.
pub fn symplectic_complete(l: &Poly) -> Result<QMatrix> {
    let nv = l.nvars();
    if nv % 2 != 0 {
        return Err(Error::OddVariableCount(nv));
    }
    if nv == 0 || l.is_zero() {
        return Err(Error::Precondition("linear form is zero".into()));
    }
    if !l.is_homogeneous() || l.degree() != Some(1) {
        return Err(Error::Inhomogeneous("expected a linear form".into()));
    }
    let n = nv / 2;
    let j = standard_form(n);
    let a: Vec<Rational> = (0..nv).map(|i| l.coeff(&Monomial::var(nv, i))).collect();
    let unit = |i: usize| -> Vec<Rational> {
        (0..nv).map(|k| if k == i { Rational::one() } else { Rational::zero() }).collect()
    };

    let mut cols: Vec<Option<Vec<Rational>>> = vec![None; nv];
    // Pairs (e, f) with <f, e> = 1; e fills an x slot, f the matching p slot.
    let mut pairs: Vec<(Vec<Rational>, Vec<Rational>)> = Vec::new();

    let partner = (0..nv)
        .map(unit)
        .find_map(|b| {
            let c = pairing(&j, &a, &b);
            (!c.is_zero()).then(|| {
                let inv = c.recip().expect("nonzero");
                b.iter().map(|x| x * &inv).collect::<Vec<_>>()
            })
        })
        .ok_or(Error::Internal("no partner for a nonzero vector".into()))?;
    pairs.push((partner, a));

    let project = |v: &[Rational], pairs: &[(Vec<Rational>, Vec<Rational>)]| -> Vec<Rational> {
        let mut w = v.to_vec();
        for (e, f) in pairs {
            let ve = pairing(&j, &w, e);
            let vf = pairing(&j, &w, f);
            axpy(&mut w, &vf, e);
            axpy(&mut w, &-ve, f);
        }
        w
    };

    while pairs.len() < n {
        let cands: Vec<Vec<Rational>> = (0..nv).map(|i| project(&unit(i), &pairs)).collect();
        let (ei, e) = cands
            .iter()
            .enumerate()
            .find(|(_, c)| c.iter().any(|x| !x.is_zero()))
            .ok_or(Error::Internal("symplectic complement collapsed".into()))?;
        let f = cands
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != ei)
            .find_map(|(_, d)| {
                let c = pairing(&j, d, e);
                (!c.is_zero()).then(|| {
                    let inv = c.recip().expect("nonzero");
                    d.iter().map(|x| x * &inv).collect::<Vec<_>>()
                })
            })
            .ok_or(Error::Internal("degenerate symplectic complement".into()))?;
        pairs.push((e.clone(), f));
    }

    for (i, (e, f)) in pairs.into_iter().enumerate() {
        cols[i] = Some(e);
        cols[n + i] = Some(f);
    }
    let mut m = QMatrix::zeros(nv, nv);
    for (c, col) in cols.into_iter().enumerate() {
        for (r, v) in col.expect("all slots filled").into_iter().enumerate() {
            m[(r, c)] = v;
        }
    }
    if !is_sp_matrix(&m)? {
        return Err(Error::Internal("symplectic completion produced a non-symplectic basis".into()));
    }
    m.inverse()
}
