//! Degree-by-degree elimination of polynomial automorphisms and
//! symplectomorphisms by tame words.
//!
//! Drivers work on the jet of the input truncated at the target degree `K`;
//! the returned word `w` satisfies `Ht(eval(w)⁻¹ ∘ φ - id) >= K`, which only
//! depends on that jet.

use serde::Serialize;

use crate::endo::{jacobian_truncated, EndoFile, PolyEndo};
use crate::error::{Error, Result};
use crate::poly::{Height, Monomial, Poly};
use crate::rational::Rational;

mod anick;
mod symp;
mod vandermonde;

pub use anick::{anick_approximate, anick_eliminate_degree, anick_eliminate_degree_truncated, anick_normalize_linear};
pub use symp::{
    check_closedness, decompose_linear_powers, decompose_shears, generating_function, symp_approximate, symp_eliminate_degree,
    symp_eliminate_degree_truncated,
};
pub use vandermonde::{power_coefficient_matrix, vandermonde_power_basis};

/// Trace of one elimination round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundRecord {
    pub k: u32,
    #[serde(serialize_with = "ser_height")]
    pub height_before: Height,
    #[serde(serialize_with = "ser_height")]
    pub height_after: Height,
    pub factors_appended: usize,
    pub max_coeff_bits: u64,
    /// Pair eliminations that failed to reduce the number of nonzero parts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stalled: Option<u32>,
    /// Residual jet after the round.
    #[serde(skip)]
    pub residual: PolyEndo,
    /// Generating function recovered in a symplectic round.
    #[serde(skip)]
    pub generating_function: Option<Poly>,
}

/// Per-degree trace of an elimination run. Heights are those of the
/// residual jet; an infinite height serializes as `null`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ApproxReport {
    pub kind: &'static str,
    pub target: u32,
    /// Degree at which the input was truncated.
    pub truncation: u32,
    pub linear_factor: bool,
    pub word_length: usize,
    pub rounds: Vec<RoundRecord>,
    #[serde(serialize_with = "ser_height")]
    pub final_height: Height,
    pub success: bool,
    #[serde(serialize_with = "ser_residual")]
    pub final_residual: PolyEndo,
}

fn ser_height<S: serde::Serializer>(h: &Height, s: S) -> std::result::Result<S::Ok, S::Error> {
    match h {
        Height::Finite(v) => s.serialize_some(v),
        Height::Infinite => s.serialize_none(),
    }
}

fn ser_residual<S: serde::Serializer>(f: &PolyEndo, s: S) -> std::result::Result<S::Ok, S::Error> {
    EndoFile::from_endo(f, None).serialize(s)
}

/// `id + coeff · form^power · dir`, with `form(dir) = 0` and `coeff` constant
/// along `dir`. Its inverse is `id - coeff · form^power · dir`.
#[derive(Clone, Debug)]
pub(crate) struct Block {
    pub form: Option<Poly>,
    pub power: u32,
    pub coeff: Poly,
    pub dir: Vec<Rational>,
}

impl Block {
    #[cfg(test)]
    fn field(&self) -> Poly {
        match &self.form {
            Some(l) => &self.coeff * &l.pow(self.power),
            None => self.coeff.clone(),
        }
    }

    /// The block as an endomorphism.
    #[cfg(test)]
    pub fn to_endo(&self) -> PolyEndo {
        let n = self.dir.len();
        let t = self.field();
        let images = (0..n)
            .map(|i| {
                let mut p = t.scale(&self.dir[i]);
                p.add_term(Monomial::var(n, i), &Rational::one());
                p
            })
            .collect();
        PolyEndo::new(images).expect("origin preserving")
    }

    /// `block⁻¹ ∘ r`, i.e. `r - dir · coeff(r) · form(r)^power`.
    pub fn apply_inverse(&self, r: &[Poly], cap: Option<u32>) -> Result<Vec<Poly>> {
        let n = r.len();
        let cr = self.coeff.substitute_truncated(r, cap)?;
        let t = match &self.form {
            Some(l) => {
                let mut lr = Poly::zero(n);
                for (i, ri) in r.iter().enumerate() {
                    let c = l.coeff(&Monomial::var(n, i));
                    if !c.is_zero() {
                        lr.add_assign_scaled(ri, &c);
                    }
                }
                cr.mul_truncated(&lr.pow_truncated(self.power, cap), cap)
            }
            None => cr,
        };
        Ok(r.iter()
            .zip(&self.dir)
            .map(|(ri, w)| {
                if w.is_zero() {
                    ri.clone()
                } else {
                    let mut out = ri.clone();
                    out.add_assign_scaled(&t, &-w);
                    out
                }
            })
            .collect())
    }
}

/// Checks that the Jacobian of `jet` is a nonzero constant up to degree `cap`.
pub(crate) fn check_constant_jacobian(jet: &PolyEndo, cap: u32) -> Result<Rational> {
    let j = jacobian_truncated(jet, cap)?;
    if let Some(k) = (1..=cap).find(|&k| !j.homogeneous_component(k).is_zero()) {
        return Err(Error::NonConstantJacobian { degree: k });
    }
    let c = j.constant_term();
    if c.is_zero() {
        return Err(Error::SingularLinearPart);
    }
    Ok(c)
}

pub(crate) fn max_bits(w: &crate::tame::TameWord) -> u64 {
    use crate::tame::ElementaryGen::*;
    w.factors()
        .iter()
        .map(|g| match g {
            Linear { matrix } | SympLinear { matrix } => {
                matrix.to_rows().iter().flatten().map(Rational::bits).max().unwrap_or(0)
            }
            Shift { scale, addend, .. } => scale.bits().max(addend.max_coeff_bits()),
            TransvectionX { generator } | TransvectionP { generator } => generator.max_coeff_bits(),
        })
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests;
