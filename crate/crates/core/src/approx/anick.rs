use std::collections::BTreeMap;

use super::{check_constant_jacobian, max_bits, ApproxReport, Block, RoundRecord};
use crate::approx::vandermonde::{power_coefficient_matrix, vandermonde_power_basis};
use crate::endo::{compose_truncated, linear_part, PolyEndo};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::poly::{Height, Poly};
use crate::rational::Rational;
use crate::tame::{ElementaryGen, TameWord};

/// Splits off the linear part: returns `Linear(A)` and `Linear(A⁻¹) ∘ φ`,
/// whose linear part is the identity.
pub fn anick_normalize_linear(phi: &PolyEndo) -> Result<(ElementaryGen, PolyEndo)> {
    let a = linear_part(phi);
    let a_inv = a.inverse().map_err(|_| Error::SingularLinearPart)?;
    let residual = compose_truncated(&PolyEndo::from_linear(&a_inv)?, phi, None)?;
    Ok((ElementaryGen::Linear { matrix: a }, residual))
}

/// One elimination round: a word `w` whose evaluation matches the degree-`k`
/// part of `φ`, and the residual `eval(w)⁻¹ ∘ φ` of height `>= k + 1`.
/// The residual is exact, so its degree can grow quickly with the number of
/// factors; see [`anick_eliminate_degree_truncated`].
pub fn anick_eliminate_degree(phi: &PolyEndo, k: u32) -> Result<(TameWord, PolyEndo)> {
    let (w, r, _) = eliminate(phi, k, None)?;
    Ok((w, r))
}

/// As [`anick_eliminate_degree`], with the residual truncated at degree `cap`.
pub fn anick_eliminate_degree_truncated(phi: &PolyEndo, k: u32, cap: u32) -> Result<(TameWord, PolyEndo)> {
    let (w, r, _) = eliminate(phi, k, Some(cap))?;
    Ok((w, r))
}

struct Round {
    word: TameWord,
    blocks: Vec<Block>,
}

impl Round {
    fn push_shift(&mut self, target: usize, addend: Poly) {
        let n = addend.nvars();
        let mut dir = vec![Rational::zero(); n];
        dir[target] = Rational::one();
        self.blocks.push(Block { form: None, power: 0, coeff: addend.clone(), dir });
        self.word.push_unchecked(ElementaryGen::Shift { target, scale: Rational::one(), addend });
    }
}

/// `x_a -> x_a - μ x_b`, other generators fixed.
fn psi(n: usize, a: usize, b: usize, mu: &Rational) -> QMatrix {
    let mut m = QMatrix::identity(n);
    m[(b, a)] = -mu;
    m
}

/// Removes the degree-`k` part of image `a` using the pair `(a, b)`; image `b`
/// absorbs the compensating terms.
fn eliminate_pair(v: &mut [Poly], a: usize, b: usize, round: &mut Round) -> Result<()> {
    let n = v.len();
    let mut groups: BTreeMap<u32, BTreeMap<u32, Poly>> = BTreeMap::new();
    for (m, c) in v[a].terms() {
        let (p, q) = (m.exponent(a) as u32, m.exponent(b) as u32);
        let rest = m.with_exponent(a, 0).with_exponent(b, 0);
        groups
            .entry(p + q)
            .or_default()
            .entry(q)
            .or_insert_with(|| Poly::zero(n))
            .add_term(rest, c);
    }
    let xa = Poly::var(n, a);
    let xb = Poly::var(n, b);
    for (d, lambda) in groups {
        if d == 0 {
            let addend = lambda.into_values().next().expect("nonempty group");
            v[a] = &v[a] - &addend;
            round.push_shift(a, addend);
            continue;
        }
        let nodes = vandermonde_power_basis(d);
        let solve = power_coefficient_matrix(d, &nodes).transpose().inverse()?;
        let zero = Poly::zero(n);
        for (i, mu) in nodes.iter().enumerate() {
            let mut c = Poly::zero(n);
            for q in 0..=d {
                c.add_assign_scaled(lambda.get(&q).unwrap_or(&zero), &solve[(i, q as usize)]);
            }
            if c.is_zero() {
                continue;
            }
            let mu_inv = mu.recip().expect("nodes are nonzero");
            let l = &xa + &xb.scale(mu);
            let shift = (&c * &xa.pow(d)).scale(&-&mu_inv);
            round.word.push_unchecked(ElementaryGen::Linear { matrix: psi(n, a, b, mu) });
            round.word.push_unchecked(ElementaryGen::Shift { target: b, scale: Rational::one(), addend: shift });
            round.word.push_unchecked(ElementaryGen::Linear { matrix: psi(n, a, b, &-mu) });
            let field = &c * &l.pow(d);
            v[a] = &v[a] - &field;
            v[b].add_assign_scaled(&field, &mu_inv);
            let mut dir = vec![Rational::zero(); n];
            dir[a] = Rational::one();
            dir[b] = -&mu_inv;
            round.blocks.push(Block { form: Some(l), power: d, coeff: c, dir });
        }
    }
    if !v[a].is_zero() {
        return Err(Error::Internal(format!("degree part of x{} survived its elimination", a + 1)));
    }
    Ok(())
}

pub(crate) fn eliminate(phi: &PolyEndo, k: u32, cap: Option<u32>) -> Result<(TameWord, PolyEndo, u32)> {
    let n = phi.nvars();
    if k < 2 {
        return Err(Error::Precondition(format!("elimination degree {k} < 2")));
    }
    if !phi.height_from_identity().at_least(k) {
        return Err(Error::Precondition(format!("residual height is below {k}")));
    }
    let mut v = phi.deviation(k);
    let mut round = Round { word: TameWord::empty(n), blocks: Vec::new() };
    let mut stalled = 0u32;
    loop {
        let nonzero: Vec<usize> = (0..n).filter(|&i| !v[i].is_zero()).collect();
        if nonzero.len() < 2 {
            break;
        }
        eliminate_pair(&mut v, nonzero[0], nonzero[1], &mut round)?;
        if v.iter().filter(|p| !p.is_zero()).count() >= nonzero.len() {
            stalled += 1;
            if stalled as usize > n {
                return Err(Error::Internal("pair elimination does not terminate".into()));
            }
        }
    }
    if let Some(j) = (0..n).find(|&i| !v[i].is_zero()) {
        let g = std::mem::replace(&mut v[j], Poly::zero(n));
        if g.depends_on(j) {
            return Err(Error::Internal(format!(
                "remaining degree-{k} part of x{} depends on x{}: the Jacobian is not constant",
                j + 1,
                j + 1
            )));
        }
        round.push_shift(j, g);
    }
    let mut r: Vec<Poly> = match cap {
        Some(c) => phi.images().iter().map(|p| p.truncate(c)).collect(),
        None => phi.images().to_vec(),
    };
    for b in &round.blocks {
        r = b.apply_inverse(&r, cap)?;
    }
    let residual = PolyEndo::from_images_unchecked(r);
    if !residual.height_from_identity().at_least(k + 1) {
        return Err(Error::Internal(format!("round {k} left a residual of height {k}")));
    }
    Ok((round.word, residual, stalled))
}

/// Tame word `w` with `Ht(eval(w)⁻¹ ∘ φ - id) >= target`. The first factor is
/// the linear part of `φ` unless it is the identity.
pub fn anick_approximate(phi: &PolyEndo, target: u32) -> Result<(TameWord, ApproxReport)> {
    let n = phi.nvars();
    let cap = target.max(1);
    let jet = phi.truncate(cap);
    check_constant_jacobian(&jet, cap - 1)?;
    let (lin, normalized) = anick_normalize_linear(&jet)?;
    let mut word = TameWord::empty(n);
    let linear_factor = !matches!(&lin, ElementaryGen::Linear { matrix } if matrix.is_identity());
    if linear_factor {
        word.push_unchecked(lin);
    }
    let mut residual = normalized.truncate(cap);
    let mut rounds = Vec::new();
    if target > 2 {
        while let Height::Finite(k) = residual.height_from_identity() {
            if k >= target {
                break;
            }
            let (w, r, stalled) = eliminate(&residual, k, Some(cap))?;
            rounds.push(RoundRecord {
                k,
                height_before: Height::Finite(k),
                height_after: r.height_from_identity(),
                factors_appended: w.len(),
                max_coeff_bits: max_bits(&w).max(r.max_coeff_bits()),
                stalled: (stalled > 0).then_some(stalled),
                residual: r.clone(),
                generating_function: None,
            });
            word.extend(w)?;
            residual = r;
        }
    }
    let final_height = residual.height_from_identity();
    let report = ApproxReport {
        kind: "poly",
        target,
        truncation: cap,
        linear_factor,
        word_length: word.len(),
        rounds,
        success: final_height.at_least(target),
        final_height,
        final_residual: residual,
    };
    Ok((word, report))
}

#[cfg(test)]
pub(crate) fn blocks_of_round(phi: &PolyEndo, k: u32) -> Result<(TameWord, Vec<Block>)> {
    let n = phi.nvars();
    let mut v = phi.deviation(k);
    let mut round = Round { word: TameWord::empty(n), blocks: Vec::new() };
    let nonzero: Vec<usize> = (0..n).filter(|&i| !v[i].is_zero()).collect();
    if nonzero.len() >= 2 {
        eliminate_pair(&mut v, nonzero[0], nonzero[1], &mut round)?;
    }
    Ok((round.word, round.blocks))
}
