use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{factorial, Rational};

/// Truncated series `Σ_{m ≤ L} ħ^m f_m` with `f_m` in `2n` commuting
/// variables `(x_1..x_n, p_1..p_n)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "HbarJson")]
pub struct HbarPoly {
    #[serde(rename = "L")]
    order: u32,
    coeffs: Vec<Poly>,
}

#[derive(Deserialize)]
struct HbarJson {
    #[serde(rename = "L")]
    order: u32,
    coeffs: Vec<Poly>,
}

impl TryFrom<HbarJson> for HbarPoly {
    type Error = Error;
    fn try_from(j: HbarJson) -> Result<Self> {
        let nv = j.coeffs.first().map(Poly::nvars).ok_or_else(|| Error::Parse("coeffs must not be empty".into()))?;
        HbarPoly::new(nv, j.order, j.coeffs)
    }
}

impl HbarPoly {
    /// Pads or rejects `coeffs` to exactly `L + 1` entries.
    pub fn new(nvars: usize, order: u32, mut coeffs: Vec<Poly>) -> Result<Self> {
        if nvars % 2 != 0 {
            return Err(Error::OddVariableCount(nvars));
        }
        if let Some(p) = coeffs.iter().find(|p| p.nvars() != nvars) {
            return Err(Error::NvarsMismatch { left: nvars, right: p.nvars() });
        }
        let len = order as usize + 1;
        if coeffs.len() > len {
            if coeffs[len..].iter().any(|p| !p.is_zero()) {
                return Err(Error::Precondition(format!("nonzero coefficient beyond order {order}")));
            }
            coeffs.truncate(len);
        }
        coeffs.resize(len, Poly::zero(nvars));
        Ok(HbarPoly { order, coeffs })
    }

    /// `f + O(ħ^{L+1})`.
    pub fn classical(f: &Poly, order: u32) -> Result<Self> {
        Self::new(f.nvars(), order, vec![f.clone()])
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.coeffs[0].nvars()
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> &Poly {
        &self.coeffs[m]
    }

    pub fn try_sub(&self, other: &HbarPoly) -> Result<HbarPoly> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.try_sub(b)).collect::<Result<_>>()?;
        Ok(HbarPoly { order: self.order, coeffs })
    }

    fn check(&self, other: &HbarPoly) -> Result<()> {
        if self.order != other.order {
            return Err(Error::Precondition(format!("truncation mismatch: {} vs {}", self.order, other.order)));
        }
        if self.nvars() != other.nvars() {
            return Err(Error::NvarsMismatch { left: self.nvars(), right: other.nvars() });
        }
        Ok(())
    }
}

fn partial_multi(f: &Poly, vars: &[usize], beta: &[u16]) -> Result<Poly> {
    let mut out = f.clone();
    for (&v, &b) in vars.iter().zip(beta) {
        for _ in 0..b {
            if out.is_zero() {
                return Ok(out);
            }
            out = out.partial(v)?;
        }
    }
    Ok(out)
}

/// Moyal product
/// `f ⋆ g = Σ_m (ħ/2)^m / m! Π^m(f, g)`, `Π = Σ_i (∂_{p_i} ⊗ ∂_{x_i} − ∂_{x_i} ⊗ ∂_{p_i})`,
/// truncated at `ħ^L`. With this sign `f ⋆ g − g ⋆ f = ħ{f, g} + O(ħ³)`.
pub fn moyal_star(f: &HbarPoly, g: &HbarPoly, order: u32) -> Result<HbarPoly> {
    f.check(g)?;
    if order != f.order {
        return Err(Error::Precondition(format!("truncation mismatch: {} vs {}", f.order, order)));
    }
    let nv = f.nvars();
    let n = nv / 2;
    // Slot j < n pairs (∂p_j on f, ∂x_j on g) with sign +1; slot n + j the reverse with −1.
    let left: Vec<usize> = (0..n).map(|j| n + j).chain(0..n).collect();
    let right: Vec<usize> = (0..n).chain((0..n).map(|j| n + j)).collect();
    let half = Rational::new(1, 2);
    let mut coeffs = vec![Poly::zero(nv); order as usize + 1];
    for m in 0..=order {
        let betas = compositions(nv, m);
        for a in 0..=(order - m) {
            for b in 0..=(order - m - a) {
                let (fa, gb) = (&f.coeffs[a as usize], &g.coeffs[b as usize]);
                if fa.is_zero() || gb.is_zero() {
                    continue;
                }
                let slot = &mut coeffs[(a + b + m) as usize];
                for beta in &betas {
                    let df = partial_multi(fa, &left, beta)?;
                    if df.is_zero() {
                        continue;
                    }
                    let dg = partial_multi(gb, &right, beta)?;
                    if dg.is_zero() {
                        continue;
                    }
                    let mut w = half.pow(m);
                    for (j, &bj) in beta.iter().enumerate() {
                        if bj > 0 {
                            w *= &factorial(bj as u32).recip().expect("nonzero");
                            if j >= n && bj % 2 == 1 {
                                w = -w;
                            }
                        }
                    }
                    slot.add_assign_scaled(&df.mul_truncated(&dg, None), &w);
                }
            }
        }
    }
    Ok(HbarPoly { order, coeffs })
}

/// All `β ∈ N^slots` with `|β| = m`.
fn compositions(slots: usize, m: u32) -> Vec<Vec<u16>> {
    fn rec(slots: usize, m: u32, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if cur.len() + 1 == slots {
            cur.push(m as u16);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=m {
            cur.push(v as u16);
            rec(slots, m - v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if slots == 0 {
        if m == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(slots, m, &mut Vec::new(), &mut out);
    out
}
