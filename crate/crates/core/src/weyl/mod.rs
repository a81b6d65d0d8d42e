//! The Weyl algebra `W_n` over `Q[ħ]` in normal order.
//!
//! Generators `x̂_1..x̂_n, p̂_1..p̂_n` with `[p̂_i, x̂_j] = ħ δ_ij`, each block
//! commuting internally. Elements are stored as sums of `x̂^a p̂^b ħ^s`
//! with every `x̂` to the left of every `p̂`. The standard Weyl algebra is
//! the specialization `ħ = 1`; the `ħ^0` part is the commutative symbol.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Height, Monomial, Poly};
use crate::rational::{binomial, factorial, Rational};

mod lift;
mod moyal;

pub use lift::{
    check_weyl_relations, check_weyl_relations_formal, classical_symbol, lift_generator, lift_word,
    RelationViolation, WeylEndo, WeylReport,
};
pub use moyal::{moyal_star, HbarPoly};

/// Normal-ordered monomial `x̂^ex p̂^ep ħ^eh`; ordered by total degree in
/// the generators first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct WeylMonomial {
    degree: u32,
    ex: Vec<u16>,
    ep: Vec<u16>,
    eh: u16,
}

impl WeylMonomial {
    pub fn new(ex: Vec<u16>, ep: Vec<u16>, eh: u16) -> Self {
        let degree = ex.iter().chain(&ep).map(|&e| e as u32).sum();
        WeylMonomial { degree, ex, ep, eh }
    }

    pub fn one(n: usize) -> Self {
        Self::new(vec![0; n], vec![0; n], 0)
    }

    /// Total degree in `x̂, p̂`, ignoring `ħ`.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn ex(&self) -> &[u16] {
        &self.ex
    }

    pub fn ep(&self) -> &[u16] {
        &self.ep
    }

    pub fn eh(&self) -> u16 {
        self.eh
    }

    /// The commutative monomial in `(x_1..x_n, p_1..p_n)`.
    pub fn symbol(&self) -> Monomial {
        Monomial::from_exponents(self.ex.iter().chain(&self.ep).copied())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeylElement {
    n: usize,
    terms: BTreeMap<WeylMonomial, Rational>,
}

impl WeylElement {
    pub fn zero(n: usize) -> Self {
        WeylElement { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rational::one())
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut e = Self::zero(n);
        e.add_term(WeylMonomial::one(n), &c);
        e
    }

    pub fn x(n: usize, i: usize) -> Self {
        let mut ex = vec![0; n];
        ex[i] = 1;
        Self::monomial(WeylMonomial::new(ex, vec![0; n], 0), Rational::one())
    }

    pub fn p(n: usize, i: usize) -> Self {
        let mut ep = vec![0; n];
        ep[i] = 1;
        Self::monomial(WeylMonomial::new(vec![0; n], ep, 0), Rational::one())
    }

    /// `ħ` as a central element.
    pub fn hbar(n: usize) -> Self {
        Self::monomial(WeylMonomial::new(vec![0; n], vec![0; n], 1), Rational::one())
    }

    /// Generator `z_u` of `(x̂_1..x̂_n, p̂_1..p̂_n)`.
    pub fn generator(n: usize, u: usize) -> Self {
        if u < n {
            Self::x(n, u)
        } else {
            Self::p(n, u - n)
        }
    }

    pub fn monomial(m: WeylMonomial, c: Rational) -> Self {
        let n = m.ex.len();
        let mut e = Self::zero(n);
        e.add_term(m, &c);
        e
    }

    /// Normal-ordered quantization: each commutative monomial in
    /// `(x_1..x_n, p_1..p_n)` becomes `x̂^a p̂^b`.
    pub fn from_poly(p: &Poly) -> Result<Self> {
        let nv = p.nvars();
        if nv % 2 != 0 {
            return Err(Error::OddVariableCount(nv));
        }
        let n = nv / 2;
        let mut e = Self::zero(n);
        for (m, c) in p.terms() {
            let exps = m.exponents();
            e.add_term(WeylMonomial::new(exps[..n].to_vec(), exps[n..].to_vec(), 0), c);
        }
        Ok(e)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WeylMonomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &WeylMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: WeylMonomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &WeylElement, c: &Rational) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), &(v * c));
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut e = Self::zero(self.n);
        e.add_assign_scaled(self, c);
        e
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::NvarsMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut e = self.clone();
        e.add_assign_scaled(other, &Rational::one());
        Ok(e)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut e = self.clone();
        e.add_assign_scaled(other, &-Rational::one());
        Ok(e)
    }

    /// Total degree in the generators; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree).max()
    }

    /// Height of the normal-ordered representation (ħ ignored).
    pub fn height(&self) -> Height {
        self.terms.keys().map(|m| m.degree).min().map_or(Height::Infinite, Height::Finite)
    }

    /// Terms of generator degree exactly `k`.
    pub fn homogeneous_component(&self, k: u32) -> Self {
        let terms = self.terms.iter().filter(|(m, _)| m.degree == k).map(|(m, c)| (m.clone(), c.clone())).collect();
        WeylElement { n: self.n, terms }
    }

    /// Specialization `ħ = 1`.
    pub fn at_hbar_one(&self) -> Self {
        let mut e = Self::zero(self.n);
        for (m, c) in &self.terms {
            e.add_term(WeylMonomial::new(m.ex.clone(), m.ep.clone(), 0), c);
        }
        e
    }

    /// The `ħ^s` coefficient as an `ħ`-free element.
    pub fn hbar_coefficient(&self, s: u16) -> Self {
        let mut e = Self::zero(self.n);
        for (m, c) in self.terms.iter().filter(|(m, _)| m.eh == s) {
            e.add_term(WeylMonomial::new(m.ex.clone(), m.ep.clone(), 0), c);
        }
        e
    }

    pub fn max_hbar_power(&self) -> u16 {
        self.terms.keys().map(|m| m.eh).max().unwrap_or(0)
    }

    /// Commutative symbol of the `ħ^0` part.
    pub fn classical_limit(&self) -> Poly {
        let mut p = Poly::zero(2 * self.n);
        for (m, c) in self.terms.iter().filter(|(m, _)| m.eh == 0) {
            p.add_term(m.symbol(), c);
        }
        p
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if idx > 0 {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            let mut factors: Vec<String> = Vec::new();
            let pieces = m.ex.iter().chain(&m.ep).enumerate();
            for (u, &e) in pieces {
                match e {
                    0 => {}
                    1 => factors.push(names[u].clone()),
                    _ => factors.push(format!("{}^{}", names[u], e)),
                }
            }
            match m.eh {
                0 => {}
                1 => factors.push("h".into()),
                e => factors.push(format!("h^{e}")),
            }
            if factors.is_empty() {
                out.push_str(&a.to_string());
            } else {
                if !a.is_one() {
                    out.push_str(&a.to_string());
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.n).map(|i| format!("X{i}")).chain((1..=self.n).map(|i| format!("P{i}"))).collect();
        f.write_str(&self.to_string_with(&names))
    }
}

/// Product of two normal-ordered monomials:
/// `p̂^b x̂^c = Σ_k ħ^|k| Π_i C(b_i, k_i) C(c_i, k_i) k_i! x̂^(c-k) p̂^(b-k)`.
fn mul_monomials(a: &WeylMonomial, ca: &Rational, b: &WeylMonomial, cb: &Rational, out: &mut WeylElement) {
    let n = a.ex.len();
    let base = ca * cb;
    let limits: Vec<u16> = (0..n).map(|i| a.ep[i].min(b.ex[i])).collect();
    let mut k = vec![0u16; n];
    loop {
        let mut c = base.clone();
        let mut total = 0u16;
        for i in 0..n {
            if k[i] > 0 {
                let (bi, ci, ki) = (a.ep[i] as u32, b.ex[i] as u32, k[i] as u32);
                c *= &(&(&binomial(bi, ki) * &binomial(ci, ki)) * &factorial(ki));
                total += k[i];
            }
        }
        let ex = (0..n).map(|i| a.ex[i] + b.ex[i] - k[i]).collect();
        let ep = (0..n).map(|i| a.ep[i] + b.ep[i] - k[i]).collect();
        out.add_term(WeylMonomial::new(ex, ep, a.eh + b.eh + total), &c);
        let mut i = 0;
        while i < n {
            if k[i] < limits[i] {
                k[i] += 1;
                break;
            }
            k[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
}

/// Exact product, renormalized to normal order.
pub fn weyl_mul(a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
    a.check(b)?;
    let mut out = WeylElement::zero(a.n);
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            mul_monomials(ma, ca, mb, cb, &mut out);
        }
    }
    Ok(out)
}

/// `ab - ba`.
pub fn weyl_commutator(a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
    weyl_mul(a, b)?.try_sub(&weyl_mul(b, a)?)
}

pub fn weyl_pow(a: &WeylElement, e: u32) -> WeylElement {
    let mut acc = WeylElement::one(a.n);
    for _ in 0..e {
        acc = weyl_mul(&acc, a).expect("same rank");
    }
    acc
}

#[derive(Serialize, Deserialize)]
struct WeylTermJson {
    c: Rational,
    ex: Vec<u16>,
    ep: Vec<u16>,
    #[serde(default, skip_serializing_if = "is_zero_u16")]
    eh: u16,
}

fn is_zero_u16(v: &u16) -> bool {
    *v == 0
}

#[derive(Serialize, Deserialize)]
struct WeylJson {
    n: usize,
    terms: Vec<WeylTermJson>,
}

impl Serialize for WeylElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| WeylTermJson { c: c.clone(), ex: m.ex.clone(), ep: m.ep.clone(), eh: m.eh })
            .collect();
        WeylJson { n: self.n, terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeylElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = WeylJson::deserialize(d)?;
        let mut e = WeylElement::zero(j.n);
        for t in j.terms {
            if t.ex.len() != j.n || t.ep.len() != j.n {
                return Err(serde::de::Error::custom(format!("exponent vectors must have length {}", j.n)));
            }
            e.add_term(WeylMonomial::new(t.ex, t.ep, t.eh), &t.c);
        }
        Ok(e)
    }
}
