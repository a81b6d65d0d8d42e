//! Elementary generators and tame words.
//!
//! A word `[g_1, .., g_m]` evaluates to `g_1 ∘ g_2 ∘ .. ∘ g_m` under the
//! composition convention of [`crate::endo::compose`].

use serde::{Deserialize, Serialize};

use crate::endo::{compose_truncated, PolyEndo};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::poly::{Height, Monomial, Poly};
use crate::rational::Rational;

mod sp;
pub use sp::{is_sp_matrix, standard_form, symplectic_complete};

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElementaryGen {
    /// `(x_1..x_N) -> (x_1..x_N) A`.
    Linear { matrix: QMatrix },
    /// `x_target -> scale * x_target + addend`, other generators fixed.
    Shift { target: usize, scale: Rational, addend: Poly },
    /// A linear change with matrix in `Sp(2n, Q)`.
    #[serde(rename = "splinear")]
    SympLinear { matrix: QMatrix },
    /// `x_i -> x_i + dF/dp_i` for `F` in the p-block.
    TransvectionX { generator: Poly },
    /// `p_i -> p_i + dG/dx_i` for `G` in the x-block.
    TransvectionP { generator: Poly },
}

impl ElementaryGen {
    pub fn shift(target: usize, scale: Rational, addend: Poly) -> Result<Self> {
        let g = ElementaryGen::Shift { target, scale, addend };
        g.validate()?;
        Ok(g)
    }

    pub fn arity(&self) -> usize {
        match self {
            ElementaryGen::Linear { matrix } | ElementaryGen::SympLinear { matrix } => matrix.rows(),
            ElementaryGen::Shift { addend, .. } => addend.nvars(),
            ElementaryGen::TransvectionX { generator } | ElementaryGen::TransvectionP { generator } => {
                generator.nvars()
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ElementaryGen::Linear { .. } => "linear",
            ElementaryGen::Shift { .. } => "shift",
            ElementaryGen::SympLinear { .. } => "splinear",
            ElementaryGen::TransvectionX { .. } => "transvection_x",
            ElementaryGen::TransvectionP { .. } => "transvection_p",
        }
    }

    /// Symplectic kinds are the ones allowed in a symplectic word.
    pub fn is_symplectic_kind(&self) -> bool {
        matches!(
            self,
            ElementaryGen::SympLinear { .. } | ElementaryGen::TransvectionX { .. } | ElementaryGen::TransvectionP { .. }
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGenerator(msg));
        match self {
            ElementaryGen::Linear { matrix } => {
                if !matrix.is_square() {
                    return Err(Error::NonSquare { rows: matrix.rows(), cols: matrix.cols() });
                }
                if matrix.det()?.is_zero() {
                    return bad("linear factor is singular".into());
                }
            }
            ElementaryGen::SympLinear { matrix } => {
                if !is_sp_matrix(matrix)? {
                    return Err(Error::NotSymplecticMatrix);
                }
            }
            ElementaryGen::Shift { target, scale, addend } => {
                if *target >= addend.nvars() {
                    return Err(Error::IndexOutOfRange { index: *target, nvars: addend.nvars() });
                }
                if scale.is_zero() {
                    return bad("shift scale is zero".into());
                }
                if addend.depends_on(*target) {
                    return bad(format!("shift addend depends on its target x{}", target + 1));
                }
                if !addend.constant_term().is_zero() {
                    return bad("shift addend has a constant term".into());
                }
            }
            ElementaryGen::TransvectionX { generator } | ElementaryGen::TransvectionP { generator } => {
                let nv = generator.nvars();
                if nv % 2 != 0 {
                    return Err(Error::OddVariableCount(nv));
                }
                let n = nv / 2;
                let (block, name) = match self {
                    ElementaryGen::TransvectionX { .. } => (n..nv, "p"),
                    _ => (0..n, "x"),
                };
                if (0..nv).any(|i| !block.contains(&i) && generator.depends_on(i)) {
                    return bad(format!("transvection generator must depend on the {name}-block only"));
                }
                if !generator.height().at_least(2) {
                    return bad("transvection generator must have height >= 2".into());
                }
            }
        }
        Ok(())
    }

    /// The generator as an endomorphism.
    pub fn to_endo(&self) -> Result<PolyEndo> {
        let nv = self.arity();
        let images = match self {
            ElementaryGen::Linear { matrix } | ElementaryGen::SympLinear { matrix } => {
                return PolyEndo::from_linear(matrix)
            }
            ElementaryGen::Shift { target, scale, addend } => {
                let mut images: Vec<Poly> = (0..nv).map(|i| Poly::var(nv, i)).collect();
                let mut t = addend.clone();
                t.add_term(Monomial::var(nv, *target), scale);
                images[*target] = t;
                images
            }
            ElementaryGen::TransvectionX { generator } => {
                let n = nv / 2;
                let mut images: Vec<Poly> = (0..nv).map(|i| Poly::var(nv, i)).collect();
                for (i, img) in images.iter_mut().enumerate().take(n) {
                    *img = &*img + &generator.partial(n + i)?;
                }
                images
            }
            ElementaryGen::TransvectionP { generator } => {
                let n = nv / 2;
                let mut images: Vec<Poly> = (0..nv).map(|i| Poly::var(nv, i)).collect();
                for i in 0..n {
                    images[n + i] = &images[n + i] + &generator.partial(i)?;
                }
                images
            }
        };
        PolyEndo::new(images)
    }

    /// Exact inverse generator.
    pub fn inverse(&self) -> Result<Self> {
        Ok(match self {
            ElementaryGen::Linear { matrix } => ElementaryGen::Linear { matrix: matrix.inverse()? },
            ElementaryGen::SympLinear { matrix } => ElementaryGen::SympLinear { matrix: matrix.inverse()? },
            ElementaryGen::Shift { target, scale, addend } => {
                let inv = scale.recip().ok_or_else(|| Error::InvalidGenerator("shift scale is zero".into()))?;
                ElementaryGen::Shift { target: *target, addend: addend.scale(&-&inv), scale: inv }
            }
            ElementaryGen::TransvectionX { generator } => ElementaryGen::TransvectionX { generator: -generator },
            ElementaryGen::TransvectionP { generator } => ElementaryGen::TransvectionP { generator: -generator },
        })
    }
}

/// A finite product of elementary generators of a common arity.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "WordJson", into = "WordJson")]
pub struct TameWord {
    arity: usize,
    factors: Vec<ElementaryGen>,
}

#[derive(Serialize, Deserialize)]
struct WordJson {
    arity: usize,
    factors: Vec<ElementaryGen>,
}

impl TryFrom<WordJson> for TameWord {
    type Error = Error;
    fn try_from(w: WordJson) -> Result<Self> {
        TameWord::new(w.arity, w.factors)
    }
}

impl From<TameWord> for WordJson {
    fn from(w: TameWord) -> Self {
        WordJson { arity: w.arity, factors: w.factors }
    }
}

impl TameWord {
    /// Validates every factor and the shared arity.
    pub fn new(arity: usize, factors: Vec<ElementaryGen>) -> Result<Self> {
        for g in &factors {
            if g.arity() != arity {
                return Err(Error::ArityMismatch { word: arity, factor: g.arity() });
            }
            g.validate()?;
        }
        Ok(TameWord { arity, factors })
    }

    pub fn empty(arity: usize) -> Self {
        TameWord { arity, factors: Vec::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn factors(&self) -> &[ElementaryGen] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_symplectic(&self) -> bool {
        self.arity % 2 == 0 && self.factors.iter().all(ElementaryGen::is_symplectic_kind)
    }

    pub fn push(&mut self, g: ElementaryGen) -> Result<()> {
        if g.arity() != self.arity {
            return Err(Error::ArityMismatch { word: self.arity, factor: g.arity() });
        }
        g.validate()?;
        self.factors.push(g);
        Ok(())
    }

    pub fn extend(&mut self, other: TameWord) -> Result<()> {
        if other.arity != self.arity {
            return Err(Error::ArityMismatch { word: self.arity, factor: other.arity });
        }
        self.factors.extend(other.factors);
        Ok(())
    }

    pub(crate) fn push_unchecked(&mut self, g: ElementaryGen) {
        debug_assert!(g.validate().is_ok());
        self.factors.push(g);
    }
}

/// `g_1 ∘ .. ∘ g_m`, exact.
pub fn eval_word(w: &TameWord) -> Result<PolyEndo> {
    eval_word_truncated(w, None)
}

/// Evaluation keeping terms of degree `<= cap` only.
pub fn eval_word_truncated(w: &TameWord, cap: Option<u32>) -> Result<PolyEndo> {
    let mut acc = PolyEndo::identity(w.arity);
    for g in w.factors.iter().rev() {
        acc = compose_truncated(&g.to_endo()?, &acc, cap)?;
    }
    Ok(match cap {
        Some(c) => acc.truncate(c),
        None => acc,
    })
}

/// Reversed list of factor inverses.
pub fn invert_word(w: &TameWord) -> Result<TameWord> {
    let factors = w.factors.iter().rev().map(ElementaryGen::inverse).collect::<Result<Vec<_>>>()?;
    Ok(TameWord { arity: w.arity, factors })
}

/// Degree-`(k-1)` component of `Tr(dH_i/dx_j)` for `f = id + H`, where
/// `k = Ht(H)`; zero whenever `f` has constant Jacobian.
pub fn trace_defect(f: &PolyEndo) -> Result<Poly> {
    let n = f.nvars();
    let k = match f.height_from_identity() {
        Height::Finite(k) if k >= 2 => k,
        _ => return Ok(Poly::zero(n)),
    };
    let mut tr = Poly::zero(n);
    for (i, c) in f.deviation(k).iter().enumerate() {
        tr = &tr + &c.partial(i)?;
    }
    Ok(tr)
}

#[cfg(test)]
mod tests;
