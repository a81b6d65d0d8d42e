use serde::{Deserialize, Serialize};

use super::{weyl_commutator, weyl_mul, WeylElement};
use crate::endo::PolyEndo;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::tame::{ElementaryGen, TameWord};

/// Endomorphism of `W_n` given by the images of `x̂_1..x̂_n, p̂_1..p̂_n`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "WeylEndoJson")]
pub struct WeylEndo {
    n: usize,
    images: Vec<WeylElement>,
}

#[derive(Deserialize)]
struct WeylEndoJson {
    n: usize,
    images: Vec<WeylElement>,
}

impl TryFrom<WeylEndoJson> for WeylEndo {
    type Error = Error;
    fn try_from(j: WeylEndoJson) -> Result<Self> {
        WeylEndo::new(j.n, j.images)
    }
}

impl WeylEndo {
    pub fn new(n: usize, images: Vec<WeylElement>) -> Result<Self> {
        if images.len() != 2 * n {
            return Err(Error::LengthMismatch { expected: 2 * n, got: images.len() });
        }
        if let Some(e) = images.iter().find(|e| e.rank() != n) {
            return Err(Error::NvarsMismatch { left: n, right: e.rank() });
        }
        Ok(WeylEndo { n, images })
    }

    pub fn identity(n: usize) -> Self {
        WeylEndo { n, images: (0..2 * n).map(|u| WeylElement::generator(n, u)).collect() }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn images(&self) -> &[WeylElement] {
        &self.images
    }

    /// Image of `x̂_i`.
    pub fn x_image(&self, i: usize) -> &WeylElement {
        &self.images[i]
    }

    /// Image of `p̂_i`.
    pub fn p_image(&self, i: usize) -> &WeylElement {
        &self.images[self.n + i]
    }

    /// Image of `a` under `self`: each normal-ordered monomial
    /// `x̂^a p̂^b ħ^s` maps to `X^a P^b ħ^s` in that order.
    pub fn apply(&self, a: &WeylElement) -> Result<WeylElement> {
        if a.rank() != self.n {
            return Err(Error::NvarsMismatch { left: self.n, right: a.rank() });
        }
        let n = self.n;
        let mut cache: Vec<Vec<WeylElement>> = vec![Vec::new(); 2 * n];
        let mut out = WeylElement::zero(n);
        for (m, c) in a.terms() {
            let mut t = WeylElement::constant(n, c.clone());
            for (u, &e) in m.ex().iter().chain(m.ep()).enumerate() {
                if e > 0 {
                    let pw = power(&mut cache[u], &self.images[u], e as usize);
                    t = weyl_mul(&t, pw)?;
                }
            }
            for _ in 0..m.eh() {
                t = weyl_mul(&t, &WeylElement::hbar(n))?;
            }
            out.add_assign_scaled(&t, &Rational::one());
        }
        Ok(out)
    }

    /// `self ∘ other`: the images of `self` with `other` substituted.
    pub fn compose(&self, other: &WeylEndo) -> Result<WeylEndo> {
        if self.n != other.n {
            return Err(Error::NvarsMismatch { left: self.n, right: other.n });
        }
        let images = self.images.iter().map(|e| other.apply(e)).collect::<Result<Vec<_>>>()?;
        Ok(WeylEndo { n: self.n, images })
    }

    /// Specialization `ħ = 1` of every image.
    pub fn at_hbar_one(&self) -> WeylEndo {
        WeylEndo { n: self.n, images: self.images.iter().map(WeylElement::at_hbar_one).collect() }
    }
}

fn power<'a>(list: &'a mut Vec<WeylElement>, base: &WeylElement, e: usize) -> &'a WeylElement {
    if list.is_empty() {
        list.push(base.clone());
    }
    while list.len() < e {
        let next = weyl_mul(list.last().unwrap(), base).expect("same rank");
        list.push(next);
    }
    &list[e - 1]
}

/// Verbatim lift of a symplectic generator.
pub fn lift_generator(g: &ElementaryGen) -> Result<WeylEndo> {
    if !g.is_symplectic_kind() {
        return Err(Error::InvalidGenerator(format!("cannot lift a {} factor to the Weyl algebra", g.kind())));
    }
    let f = g.to_endo()?;
    let n = f.nvars() / 2;
    let images = f.images().iter().map(WeylElement::from_poly).collect::<Result<Vec<_>>>()?;
    WeylEndo::new(n, images)
}

/// Lift of a symplectic word, composed in the same order as `eval_word`.
/// `ħ` is kept formal so that the `ħ^0` part is the classical map.
pub fn lift_word(w: &TameWord) -> Result<WeylEndo> {
    let nv = w.arity();
    if nv % 2 != 0 {
        return Err(Error::OddVariableCount(nv));
    }
    let mut acc = WeylEndo::identity(nv / 2);
    for g in w.factors().iter().rev() {
        acc = lift_generator(g)?.compose(&acc)?;
    }
    Ok(acc)
}

/// Commutator-relation failure; `got` is the computed commutator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationViolation {
    pub relation: String,
    pub i: usize,
    pub j: usize,
    pub got: WeylElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeylReport {
    pub ok: bool,
    pub hbar: &'static str,
    pub violations: Vec<RelationViolation>,
}

impl WeylReport {
    pub fn describe(&self) -> Vec<String> {
        self.violations
            .iter()
            .map(|v| format!("[{}] with i={}, j={}: got {}", v.relation, v.i + 1, v.j + 1, v.got))
            .collect()
    }
}

fn relations(e: &WeylEndo, formal: bool) -> Result<WeylReport> {
    let n = e.n;
    let unit = if formal { WeylElement::hbar(n) } else { WeylElement::one(n) };
    let comm = |a: &WeylElement, b: &WeylElement| -> Result<WeylElement> {
        let c = weyl_commutator(a, b)?;
        Ok(if formal { c } else { c.at_hbar_one() })
    };
    let zero = WeylElement::zero(n);
    let mut violations = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let c = comm(e.p_image(i), e.x_image(j))?;
            let want = if i == j { &unit } else { &zero };
            if &c != want {
                violations.push(RelationViolation { relation: "P_i, X_j".into(), i, j, got: c });
            }
        }
        for j in i + 1..n {
            let c = comm(e.x_image(i), e.x_image(j))?;
            if !c.is_zero() {
                violations.push(RelationViolation { relation: "X_i, X_j".into(), i, j, got: c });
            }
            let c = comm(e.p_image(i), e.p_image(j))?;
            if !c.is_zero() {
                violations.push(RelationViolation { relation: "P_i, P_j".into(), i, j, got: c });
            }
        }
    }
    Ok(WeylReport { ok: violations.is_empty(), hbar: if formal { "formal" } else { "1" }, violations })
}

/// Canonical relations in the standard Weyl algebra (`ħ = 1`):
/// `[P_i, X_j] = δ_ij`, `[X_i, X_j] = 0`, `[P_i, P_j] = 0`.
pub fn check_weyl_relations(e: &WeylEndo) -> Result<WeylReport> {
    relations(e, false)
}

/// Same relations over `Q[ħ]`, with `[P_i, X_i] = ħ`.
pub fn check_weyl_relations_formal(e: &WeylEndo) -> Result<WeylReport> {
    relations(e, true)
}

/// Normal-ordered symbol of the `ħ^0` part of each image.
pub fn classical_symbol(e: &WeylEndo) -> Result<PolyEndo> {
    PolyEndo::new(e.images.iter().map(WeylElement::classical_limit).collect())
}
