//! Sparse multivariate polynomials over Q.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose ordering is graded
//! lexicographic. Iteration therefore runs from the lowest total degree up,
//! which the truncated kernels rely on to stop early.

mod det;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use det::det_poly;

pub type Exponents = SmallVec<[u16; 8]>;

/// Exponent vector with cached total degree. The derived ordering compares
/// the degree first, then the exponents lexicographically: graded lex.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial {
    degree: u32,
    exps: Exponents,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial { degree: 0, exps: SmallVec::from_elem(0, nvars) }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Self::one(nvars);
        m.exps[i] = 1;
        m.degree = 1;
        m
    }

    pub fn from_exponents<I: IntoIterator<Item = u16>>(exps: I) -> Self {
        let exps: Exponents = exps.into_iter().collect();
        let degree = exps.iter().map(|&e| e as u32).sum();
        Monomial { degree, exps }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn exponent(&self, i: usize) -> u16 {
        self.exps[i]
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Monomial { degree: self.degree + other.degree, exps }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `self / other`, assuming `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Monomial {
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a - b).collect();
        Monomial { degree: self.degree - other.degree, exps }
    }

    /// Drops the exponent of variable `i`, returning it and the rest.
    pub fn without(&self, i: usize) -> (u16, Monomial) {
        let mut m = self.clone();
        let e = m.exps[i];
        m.exps[i] = 0;
        m.degree -= e as u32;
        (e, m)
    }

    pub fn with_exponent(&self, i: usize, e: u16) -> Monomial {
        let mut m = self.clone();
        m.degree = m.degree - m.exps[i] as u32 + e as u32;
        m.exps[i] = e;
        m
    }
}

/// Height (lowest nonzero degree) or degree sentinel; `Infinite` sorts last.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Height {
    Finite(u32),
    Infinite,
}

impl Height {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Height::Infinite)
    }

    pub fn finite(&self) -> Option<u32> {
        match self {
            Height::Finite(h) => Some(*h),
            Height::Infinite => None,
        }
    }

    pub fn at_least(&self, k: u32) -> bool {
        *self >= Height::Finite(k)
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(h) => write!(f, "{h}"),
            Height::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range for {nvars} variables");
        Self::term(Monomial::var(nvars, i), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut p = Poly::zero(m.nvars());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds from `(coefficient, exponents)` pairs, merging duplicates.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Vec<u16>)>,
    {
        let mut p = Poly::zero(nvars);
        for (c, e) in terms {
            if e.len() != nvars {
                return Err(Error::NvarsMismatch { left: nvars, right: e.len() });
            }
            p.add_term(Monomial::from_exponents(e), &c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
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

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one(self.nvars))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree == 0)
    }

    /// Largest-in-order term.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree)
    }

    /// Lowest degree carrying a nonzero term; `Infinite` for zero.
    pub fn height(&self) -> Height {
        self.terms.keys().next().map_or(Height::Infinite, |m| Height::Finite(m.degree))
    }

    pub fn homogeneous_component(&self, k: u32) -> Poly {
        self.filter_terms(|m| m.degree == k)
    }

    /// Keeps the terms of degree `<= max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Poly {
        self.filter_terms(|m| m.degree <= max_degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        match (self.terms.keys().next(), self.terms.keys().next_back()) {
            (Some(a), Some(b)) => a.degree == b.degree,
            _ => true,
        }
    }

    fn filter_terms(&self, keep: impl Fn(&Monomial) -> bool) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| keep(m))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Poly { nvars: self.nvars, terms }
    }

    /// Whether any term has a positive exponent in variable `i`.
    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.exps[i] > 0)
    }

    pub fn max_coeff_bits(&self) -> u64 {
        self.terms.values().map(Rational::bits).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.nvars(), self.nvars);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_nvars(&self, other: &Poly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::NvarsMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        out.add_assign_scaled(other, &Rational::one());
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        out.add_assign_scaled(other, &-Rational::one());
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_nvars(other)?;
        Ok(self.mul_truncated(other, None))
    }

    /// `self += c * other`.
    pub fn add_assign_scaled(&mut self, other: &Poly, c: &Rational) {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            if c.is_one() {
                self.add_term(m.clone(), v);
            } else {
                self.add_term(m.clone(), &(v * c));
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        Poly { nvars: self.nvars, terms }
    }

    /// Product, dropping every term of degree above `cap`.
    pub fn mul_truncated(&self, other: &Poly, cap: Option<u32>) -> Poly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            let room = match cap {
                Some(c) if ma.degree > c => break,
                Some(c) => Some(c - ma.degree),
                None => None,
            };
            for (mb, cb) in &other.terms {
                if matches!(room, Some(r) if mb.degree > r) {
                    break;
                }
                let c = ca * cb;
                match acc.entry(ma.mul(mb)) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += &c;
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly { nvars: self.nvars, terms: acc }
    }

    pub fn pow_truncated(&self, e: u32, cap: Option<u32>) -> Poly {
        let mut acc = Poly::one(self.nvars);
        if let Some(c) = cap {
            acc = acc.truncate(c);
        }
        for _ in 0..e {
            acc = acc.mul_truncated(self, cap);
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Poly {
        self.pow_truncated(e, None)
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Result<Poly> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange { index: i, nvars: self.nvars });
        }
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exps[i];
            if e > 0 {
                out.terms.insert(m.with_exponent(i, e - 1), c * &Rational::from_int(e as i64));
            }
        }
        Ok(out)
    }

    /// Replaces `x_i` by `images[i]`.
    pub fn substitute(&self, images: &[Poly]) -> Result<Poly> {
        self.substitute_truncated(images, None)
    }

    /// Substitution keeping only terms of degree `<= cap`. When every image
    /// has zero constant term, monomials of degree above `cap` are skipped
    /// outright since they cannot contribute.
    pub fn substitute_truncated(&self, images: &[Poly], cap: Option<u32>) -> Result<Poly> {
        let mut out = substitute_all(std::slice::from_ref(self), images, cap)?;
        Ok(out.pop().unwrap())
    }

    fn substitute_with(&self, powers: &mut PowerCache<'_>, target: usize, min_height: u32) -> Poly {
        let cap = powers.cap;
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            if let Some(cap) = cap {
                if (m.degree as u64) * (min_height as u64) > cap as u64 {
                    continue;
                }
            }
            let mut acc = Poly::constant(target, c.clone());
            for (i, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    acc = acc.mul_truncated(powers.get(i, e), cap);
                    if acc.is_zero() {
                        break;
                    }
                }
            }
            out.add_assign_scaled(&acc, &Rational::one());
        }
        out
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in m.exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            if factors.is_empty() {
                s.push_str(&a.to_string());
            } else {
                if !a.is_one() {
                    s.push_str(&a.to_string());
                    s.push('*');
                }
                s.push_str(&factors.join("*"));
            }
        }
        s
    }
}

/// Default variable names: `x, y, z` for up to three variables, `x1..xN` beyond.
pub fn default_names(nvars: usize) -> Vec<String> {
    if nvars <= 3 {
        ["x", "y", "z"][..nvars].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=nvars).map(|i| format!("x{i}")).collect()
    }
}

/// Names `x1..xn, p1..pn` for a phase space of half-dimension `n`.
pub fn symplectic_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).chain((1..=n).map(|i| format!("p{i}"))).collect()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&default_names(self.nvars)))
    }
}

/// Substitutes the same images into several polynomials, sharing the power cache.
pub fn substitute_all(polys: &[Poly], images: &[Poly], cap: Option<u32>) -> Result<Vec<Poly>> {
    let Some(first) = images.first() else {
        for p in polys {
            if p.nvars != 0 {
                return Err(Error::LengthMismatch { expected: p.nvars, got: 0 });
            }
        }
        return Ok(polys.to_vec());
    };
    let target = first.nvars;
    for p in images {
        if p.nvars != target {
            return Err(Error::NvarsMismatch { left: target, right: p.nvars });
        }
    }
    for p in polys {
        if p.nvars != images.len() {
            return Err(Error::LengthMismatch { expected: p.nvars, got: images.len() });
        }
    }
    let min_height = images
        .iter()
        .map(|p| p.height().finite().unwrap_or(u32::MAX))
        .min()
        .unwrap_or(0);
    let mut powers = PowerCache::new(images, cap);
    Ok(polys.iter().map(|p| p.substitute_with(&mut powers, target, min_height)).collect())
}

/// Lazily built truncated powers of substitution images.
pub(crate) struct PowerCache<'a> {
    images: &'a [Poly],
    cap: Option<u32>,
    powers: Vec<Vec<Poly>>,
}

impl<'a> PowerCache<'a> {
    pub(crate) fn new(images: &'a [Poly], cap: Option<u32>) -> Self {
        PowerCache { images, cap, powers: vec![Vec::new(); images.len()] }
    }

    pub(crate) fn get(&mut self, i: usize, e: u16) -> &Poly {
        let e = e as usize;
        let list = &mut self.powers[i];
        if list.is_empty() {
            list.push(self.images[i].truncate(self.cap.unwrap_or(u32::MAX)));
        }
        while list.len() < e {
            let next = list.last().unwrap().mul_truncated(&self.images[i], self.cap);
            list.push(next);
        }
        &list[e - 1]
    }
}

/// `{f, g} = sum_i (df/dp_i dg/dx_i - df/dx_i dg/dp_i)` over variables
/// ordered `x_1..x_n, p_1..p_n`, so that `{p_i, x_j} = delta_ij`.
pub fn poisson_bracket(f: &Poly, g: &Poly, n: usize) -> Result<Poly> {
    poisson_bracket_truncated(f, g, n, None)
}

pub fn poisson_bracket_truncated(f: &Poly, g: &Poly, n: usize, cap: Option<u32>) -> Result<Poly> {
    f.check_nvars(g)?;
    if f.nvars % 2 != 0 {
        return Err(Error::OddVariableCount(f.nvars));
    }
    if f.nvars != 2 * n {
        return Err(Error::NvarsMismatch { left: f.nvars, right: 2 * n });
    }
    let mut out = Poly::zero(f.nvars);
    for i in 0..n {
        let (xi, pi) = (i, n + i);
        let t1 = f.partial(pi)?.mul_truncated(&g.partial(xi)?, cap);
        let t2 = f.partial(xi)?.mul_truncated(&g.partial(pi)?, cap);
        out.add_assign_scaled(&t1, &Rational::one());
        out.add_assign_scaled(&t2, &-Rational::one());
    }
    Ok(out)
}

macro_rules! poly_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl $tr<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                self.$imp(rhs).expect("variable count mismatch")
            }
        }
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                self.$method(&rhs)
            }
        }
    };
}

poly_binop!(Add, add, try_add);
poly_binop!(Sub, sub, try_sub);
poly_binop!(Mul, mul, try_mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Wire form: `{"nvars": N, "terms": [{"c": "num/den", "e": [..]}]}`.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct PolyJson {
    pub nvars: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TermJson {
    pub c: Rational,
    pub e: Vec<u16>,
}

impl From<&Poly> for PolyJson {
    fn from(p: &Poly) -> Self {
        let terms = p
            .terms
            .iter()
            .map(|(m, c)| TermJson { c: c.clone(), e: m.exps.to_vec() })
            .collect();
        PolyJson { nvars: p.nvars, terms }
    }
}

impl TryFrom<PolyJson> for Poly {
    type Error = Error;
    fn try_from(j: PolyJson) -> Result<Poly> {
        Poly::from_terms(j.nvars, j.terms.into_iter().map(|t| (t.c, t.e)))
            .map_err(|e| Error::Parse(format!("polynomial: {e}")))
    }
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Poly::try_from(PolyJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
