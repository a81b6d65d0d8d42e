use std::collections::BTreeMap;

use num_integer::Integer;

use super::{max_bits, power_coefficient_matrix, ApproxReport, RoundRecord};
use crate::endo::{compose_truncated, is_symplectic, linear_part, PolyEndo};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::poly::{substitute_all, Height, Monomial, Poly};
use crate::rational::{binomial, factorial, Rational};
use crate::tame::{is_sp_matrix, ElementaryGen, TameWord};

fn common_degree(polys: &[&Poly]) -> Result<Option<u32>> {
    let mut deg = None;
    for p in polys.iter().filter(|p| !p.is_zero()) {
        if !p.is_homogeneous() {
            return Err(Error::Inhomogeneous(p.to_string()));
        }
        match (deg, p.degree()) {
            (None, d) => deg = d,
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Inhomogeneous(format!("mixed degrees {a} and {b}")));
            }
            _ => {}
        }
    }
    Ok(deg)
}

fn check_shape(f: &[Poly], g: &[Poly]) -> Result<usize> {
    let n = f.len();
    if g.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: g.len() });
    }
    for p in f.iter().chain(g) {
        if p.nvars() != 2 * n {
            return Err(Error::NvarsMismatch { left: 2 * n, right: p.nvars() });
        }
    }
    Ok(n)
}

/// The integrability conditions for a common potential `F` with
/// `dF/dp_i = f_i` and `dF/dx_i = g_i`:
/// `df_i/dp_j = df_j/dp_i`, `dg_i/dx_j = dg_j/dx_i` and `df_i/dx_j = dg_j/dp_i`.
pub fn check_closedness(f: &[Poly], g: &[Poly]) -> Result<bool> {
    let n = check_shape(f, g)?;
    let all: Vec<&Poly> = f.iter().chain(g).collect();
    common_degree(&all)?;
    for i in 0..n {
        for j in 0..n {
            if i < j {
                if f[i].partial(n + j)? != f[j].partial(n + i)? {
                    return Ok(false);
                }
                if g[i].partial(j)? != g[j].partial(i)? {
                    return Ok(false);
                }
            }
            if f[i].partial(j)? != g[j].partial(n + i)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Homogeneous potential `F = (Σ x_i g_i + Σ p_i f_i) / (k + 1)` of degree
/// `k + 1`, checked against both gradient identities.
pub fn generating_function(f: &[Poly], g: &[Poly], k: u32) -> Result<Poly> {
    let n = check_shape(f, g)?;
    let all: Vec<&Poly> = f.iter().chain(g).collect();
    if let Some(d) = common_degree(&all)? {
        if d != k {
            return Err(Error::Inhomogeneous(format!("expected degree {k}, found {d}")));
        }
    }
    if !check_closedness(f, g)? {
        return Err(Error::ClosednessFailure(format!("degree-{k} components admit no common potential")));
    }
    let nv = 2 * n;
    let mut acc = Poly::zero(nv);
    for i in 0..n {
        acc = &acc + &(&Poly::var(nv, i) * &g[i]);
        acc = &acc + &(&Poly::var(nv, n + i) * &f[i]);
    }
    let big_f = acc.scale(&Rational::new(1, k as i64 + 1));
    for i in 0..n {
        if big_f.partial(n + i)? != f[i] || big_f.partial(i)? != g[i] {
            return Err(Error::ClosednessFailure("potential fails the gradient identities".into()));
        }
    }
    Ok(big_f)
}

/// `F = Σ c_m ℓ_m^d` for homogeneous `F` of degree `d >= 1`, via the
/// polarization identity
/// `y_1 .. y_d = (1 / (2^d d!)) Σ_ε ε_1 .. ε_d (ε_1 y_1 + .. + ε_d y_d)^d`
/// applied to every monomial. Forms are primitive integer vectors with
/// positive leading coefficient.
pub fn decompose_linear_powers(f: &Poly) -> Result<Vec<(Rational, Poly)>> {
    let nv = f.nvars();
    let d = match common_degree(&[f])? {
        None => return Ok(Vec::new()),
        Some(0) => return Err(Error::Precondition("constant polynomial has no linear-power form".into())),
        Some(d) => d,
    };
    let norm = (&Rational::from_int(2).pow(d) * &factorial(d)).recip().expect("nonzero");
    let mut acc: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
    for (m, c) in f.terms() {
        let exps: Vec<u32> = m.exponents().iter().map(|&e| e as u32).collect();
        let mut minus = vec![0u32; nv];
        loop {
            let s: Vec<i64> = exps.iter().zip(&minus).map(|(&a, &k)| a as i64 - 2 * k as i64).collect();
            if s.iter().any(|&x| x != 0) {
                let mut weight = c * &norm;
                for (&a, &k) in exps.iter().zip(&minus) {
                    weight *= &binomial(a, k);
                    if k % 2 == 1 {
                        weight = -weight;
                    }
                }
                let g = s.iter().fold(0i64, |acc, &x| acc.gcd(&x));
                let lead = *s.iter().find(|&&x| x != 0).expect("nonzero form");
                let unit = if lead < 0 { -g } else { g };
                let form: Vec<i64> = s.iter().map(|&x| x / unit).collect();
                weight *= &Rational::from_int(unit).pow(d);
                *acc.entry(form).or_insert_with(Rational::zero) += &weight;
            }
            // Odometer over 0..=a_i.
            let mut i = 0;
            while i < nv {
                if minus[i] < exps[i] {
                    minus[i] += 1;
                    break;
                }
                minus[i] = 0;
                i += 1;
            }
            if i == nv {
                break;
            }
        }
    }
    Ok(acc
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(form, c)| {
            let mut l = Poly::zero(nv);
            for (i, &a) in form.iter().enumerate() {
                l.add_term(Monomial::var(nv, i), &Rational::from_int(a));
            }
            (c, l)
        })
        .collect())
}

/// `F = Σ_S G_S(p_1 + s_1 x_1, .., p_n + s_n x_n)` for homogeneous `F`, with
/// each `G_S` a polynomial in `p` alone and integer shifts `0 <= s_i <= d`.
/// Each pair `(x_i, p_i)` is split by the Vandermonde system
/// `x^a p^(c-a) = Σ_j λ_j (p + j x)^c`.
pub fn decompose_shears(f: &Poly) -> Result<Vec<(Vec<Rational>, Poly)>> {
    let nv = f.nvars();
    if nv % 2 != 0 {
        return Err(Error::OddVariableCount(nv));
    }
    let n = nv / 2;
    if common_degree(&[f])?.is_none() {
        return Ok(Vec::new());
    }
    let mut weights: BTreeMap<u32, QMatrix> = BTreeMap::new();
    let mut pieces: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
    for (m, c) in f.terms() {
        let mut lams: Vec<Vec<Rational>> = Vec::with_capacity(n);
        let mut p_exps = vec![0u16; nv];
        for i in 0..n {
            let (a, b) = (m.exponent(i) as u32, m.exponent(n + i) as u32);
            let deg = a + b;
            p_exps[n + i] = deg as u16;
            if !weights.contains_key(&deg) {
                let nodes: Vec<Rational> = (0..=deg as i64).map(Rational::from_int).collect();
                weights.insert(deg, power_coefficient_matrix(deg, &nodes).transpose().inverse()?);
            }
            lams.push(weights[&deg].column(a as usize));
        }
        let mono = Monomial::from_exponents(p_exps);
        let mut j = vec![0u32; n];
        loop {
            let mut w = c.clone();
            for i in 0..n {
                w *= &lams[i][j[i] as usize];
            }
            if !w.is_zero() {
                pieces.entry(j.clone()).or_insert_with(|| Poly::zero(nv)).add_term(mono.clone(), &w);
            }
            let mut i = 0;
            while i < n {
                if (j[i] as usize) + 1 < lams[i].len() {
                    j[i] += 1;
                    break;
                }
                j[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    Ok(pieces
        .into_iter()
        .filter(|(_, g)| !g.is_zero())
        .map(|(j, g)| (j.into_iter().map(|v| Rational::from_int(v as i64)).collect(), g))
        .collect())
}

/// `[[I, -S], [0, I]]` (or `[[I, S], [0, I]]`) for `S = diag(shifts)`. The
/// negative one `A` satisfies `(p_i + s_i x_i)(zA) = p_i`.
pub(crate) fn shear_matrix(shifts: &[Rational], negative: bool) -> QMatrix {
    let n = shifts.len();
    let mut a = QMatrix::identity(2 * n);
    for (i, s) in shifts.iter().enumerate() {
        a[(i, n + i)] = if negative { -s } else { s.clone() };
    }
    a
}

/// Time-one flow of `H = G(ℓ)`, `ℓ_i = p_i + s_i x_i`:
/// `x_j += ∂_j G(ℓ)`, `p_j -= s_j ∂_j G(ℓ)`. The forms `ℓ_i` Poisson-commute,
/// so the flow is `id + X_H` and its inverse is `id - X_H`.
pub(crate) struct ShearBlock {
    shifts: Vec<Rational>,
    grads: Vec<Poly>,
}

impl ShearBlock {
    pub fn new(shifts: &[Rational], g: &Poly) -> Result<Self> {
        let n = shifts.len();
        let grads = (0..n).map(|i| g.partial(n + i)).collect::<Result<Vec<_>>>()?;
        Ok(ShearBlock { shifts: shifts.to_vec(), grads })
    }

    fn field_at(&self, r: &[Poly], cap: Option<u32>) -> Result<Vec<Poly>> {
        let n = self.shifts.len();
        let mut subs = vec![Poly::zero(2 * n); 2 * n];
        for (i, s) in self.shifts.iter().enumerate() {
            let mut l = r[n + i].clone();
            if !s.is_zero() {
                l.add_assign_scaled(&r[i], s);
            }
            subs[n + i] = l;
        }
        substitute_all(&self.grads, &subs, cap)
    }

    #[cfg(test)]
    pub fn to_endo(&self) -> PolyEndo {
        let nv = 2 * self.shifts.len();
        let id: Vec<Poly> = (0..nv).map(|u| Poly::var(nv, u)).collect();
        let v = self.field_at(&id, None).expect("shapes agree");
        PolyEndo::new(self.shift_by(&id, &v, Rational::one())).expect("origin preserving")
    }

    fn shift_by(&self, r: &[Poly], v: &[Poly], sign: Rational) -> Vec<Poly> {
        let n = self.shifts.len();
        let mut out = r.to_vec();
        for i in 0..n {
            out[i].add_assign_scaled(&v[i], &sign);
            if !self.shifts[i].is_zero() {
                out[n + i].add_assign_scaled(&v[i], &-(&sign * &self.shifts[i]));
            }
        }
        out
    }

    /// `block⁻¹ ∘ r = r - X_H(r)`.
    pub fn apply_inverse(&self, r: &[Poly], cap: Option<u32>) -> Result<Vec<Poly>> {
        let v = self.field_at(r, cap)?;
        Ok(self.shift_by(r, &v, -Rational::one()))
    }
}

pub(crate) struct SympRound {
    pub word: TameWord,
    pub residual: PolyEndo,
    pub generating_function: Poly,
}

/// One symplectic elimination round: the degree-`k` deviation is the
/// Hamiltonian field of a potential `F` of degree `k + 1`, realized by
/// transvections for the pure-block parts of `F` and by conjugated
/// transvections `A ∘ TransvectionX(G_S) ∘ A⁻¹` for each piece of
/// [`decompose_shears`] of the mixed part, where `A` is the shear
/// `p ↦ p - S x`.
pub fn symp_eliminate_degree(sigma: &PolyEndo, k: u32) -> Result<(TameWord, PolyEndo)> {
    let r = eliminate(sigma, k, None)?;
    Ok((r.word, r.residual))
}

/// As [`symp_eliminate_degree`], with the residual truncated at degree `cap`.
pub fn symp_eliminate_degree_truncated(sigma: &PolyEndo, k: u32, cap: u32) -> Result<(TameWord, PolyEndo)> {
    let r = eliminate(sigma, k, Some(cap))?;
    Ok((r.word, r.residual))
}

pub(crate) fn eliminate(sigma: &PolyEndo, k: u32, cap: Option<u32>) -> Result<SympRound> {
    let nv = sigma.nvars();
    if nv % 2 != 0 {
        return Err(Error::OddVariableCount(nv));
    }
    let n = nv / 2;
    if k < 2 {
        return Err(Error::Precondition(format!("elimination degree {k} < 2")));
    }
    if !sigma.height_from_identity().at_least(k) {
        return Err(Error::Precondition(format!("residual height is below {k}")));
    }
    let dev = sigma.deviation(k);
    let f = &dev[..n];
    let g: Vec<Poly> = dev[n..].iter().map(|v| -v).collect();
    let big_f = generating_function(f, &g, k)?;

    let (mut f_x, mut f_p, mut f_mix) = (Poly::zero(nv), Poly::zero(nv), Poly::zero(nv));
    for (m, c) in big_f.terms() {
        let in_x = (0..n).any(|i| m.exponent(i) > 0);
        let in_p = (n..nv).any(|i| m.exponent(i) > 0);
        let target = match (in_x, in_p) {
            (true, false) => &mut f_x,
            (false, true) => &mut f_p,
            _ => &mut f_mix,
        };
        target.add_term(m.clone(), c);
    }

    let mut word = TameWord::empty(nv);
    let mut r: Vec<Poly> = match cap {
        Some(c) => sigma.images().iter().map(|p| p.truncate(c)).collect(),
        None => sigma.images().to_vec(),
    };
    let apply_gen = |gen: ElementaryGen, r: &mut Vec<Poly>, word: &mut TameWord| -> Result<()> {
        let inv = gen.inverse()?.to_endo()?;
        *r = compose_truncated(&inv, &PolyEndo::from_images_unchecked(std::mem::take(r)), cap)?.into_images();
        word.push_unchecked(gen);
        Ok(())
    };
    if !f_p.is_zero() {
        apply_gen(ElementaryGen::TransvectionX { generator: f_p }, &mut r, &mut word)?;
    }
    if !f_x.is_zero() {
        apply_gen(ElementaryGen::TransvectionP { generator: -f_x }, &mut r, &mut word)?;
    }
    for (shifts, g) in decompose_shears(&f_mix)? {
        let block = ShearBlock::new(&shifts, &g)?;
        if shifts.iter().all(Rational::is_zero) {
            word.push_unchecked(ElementaryGen::TransvectionX { generator: g });
        } else {
            let a = shear_matrix(&shifts, true);
            word.push_unchecked(ElementaryGen::SympLinear { matrix: a });
            word.push_unchecked(ElementaryGen::TransvectionX { generator: g });
            word.push_unchecked(ElementaryGen::SympLinear { matrix: shear_matrix(&shifts, false) });
        }
        r = block.apply_inverse(&r, cap)?;
    }
    let residual = PolyEndo::from_images_unchecked(r);
    if !residual.height_from_identity().at_least(k + 1) {
        return Err(Error::Internal(format!("symplectic round {k} left a residual of height {k}")));
    }
    Ok(SympRound { word, residual, generating_function: big_f })
}

/// Symplectic tame word `w` with `Ht(eval(w)⁻¹ ∘ σ - id) >= target`. The first
/// factor is the linear part of `σ` unless it is the identity.
pub fn symp_approximate(sigma: &PolyEndo, target: u32) -> Result<(TameWord, ApproxReport)> {
    let nv = sigma.nvars();
    if nv % 2 != 0 {
        return Err(Error::OddVariableCount(nv));
    }
    let n = nv / 2;
    let cap = target.max(1);
    let jet = sigma.truncate(cap);
    let check = is_symplectic(&jet, n, Some(cap - 1))?;
    if !check.is_symplectic() {
        return Err(Error::NotSymplectic(check.describe().join("; ")));
    }
    let s = linear_part(&jet);
    if !is_sp_matrix(&s)? {
        return Err(Error::Internal("linear part of a symplectic map is not in Sp(2n)".into()));
    }
    let s_inv = s.inverse()?;
    let mut residual = compose_truncated(&PolyEndo::from_linear(&s_inv)?, &jet, Some(cap))?;
    let mut word = TameWord::empty(nv);
    let linear_factor = !s.is_identity();
    if linear_factor {
        word.push_unchecked(ElementaryGen::SympLinear { matrix: s });
    }
    let mut rounds = Vec::new();
    if target > 2 {
        while let Height::Finite(k) = residual.height_from_identity() {
            if k >= target {
                break;
            }
            let r = eliminate(&residual, k, Some(cap))?;
            rounds.push(RoundRecord {
                k,
                height_before: Height::Finite(k),
                height_after: r.residual.height_from_identity(),
                factors_appended: r.word.len(),
                max_coeff_bits: max_bits(&r.word).max(r.residual.max_coeff_bits()),
                stalled: None,
                residual: r.residual.clone(),
                generating_function: Some(r.generating_function),
            });
            word.extend(r.word)?;
            residual = r.residual;
        }
    }
    let final_height = residual.height_from_identity();
    let report = ApproxReport {
        kind: "symp",
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
