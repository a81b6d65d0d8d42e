//! Polynomial endomorphisms as tuples of generator images.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::poly::{
    default_names, det_poly, poisson_bracket, poisson_bracket_truncated, substitute_all, symplectic_names,
    Height, Monomial, Poly,
};
use crate::rational::Rational;

/// Origin-preserving endomorphism `x_i -> images[i]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PolyEndo {
    images: Vec<Poly>,
}

impl PolyEndo {
    /// Validates the image count, variable counts and zero constant terms.
    pub fn new(images: Vec<Poly>) -> Result<Self> {
        let n = images.len();
        for (i, p) in images.iter().enumerate() {
            if p.nvars() != n {
                return Err(Error::NvarsMismatch { left: n, right: p.nvars() });
            }
            if !p.constant_term().is_zero() {
                return Err(Error::ConstantTerm { index: i });
            }
        }
        Ok(PolyEndo { images })
    }

    pub fn identity(n: usize) -> Self {
        PolyEndo { images: (0..n).map(|i| Poly::var(n, i)).collect() }
    }

    /// The linear change `(x_1..x_N) -> (x_1..x_N) A`, i.e. `x_j -> sum_i a_ij x_i`.
    pub fn from_linear(a: &QMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NonSquare { rows: a.rows(), cols: a.cols() });
        }
        let n = a.rows();
        let images = (0..n)
            .map(|j| {
                let mut p = Poly::zero(n);
                for i in 0..n {
                    p.add_term(Monomial::var(n, i), &a[(i, j)]);
                }
                p
            })
            .collect();
        Ok(PolyEndo { images })
    }

    pub fn nvars(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Poly {
        &self.images[i]
    }

    pub fn into_images(self) -> Vec<Poly> {
        self.images
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.nvars())
    }

    /// Drops every term above `max_degree` in each image.
    pub fn truncate(&self, max_degree: u32) -> PolyEndo {
        PolyEndo { images: self.images.iter().map(|p| p.truncate(max_degree)).collect() }
    }

    /// Degree-`k` part of `f(x_i) - x_i` for each generator.
    pub fn deviation(&self, k: u32) -> Vec<Poly> {
        let n = self.nvars();
        self.images
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let mut c = p.homogeneous_component(k);
                if k == 1 {
                    c.add_term(Monomial::var(n, i), &-Rational::one());
                }
                c
            })
            .collect()
    }

    /// `Ht(f - id)`.
    pub fn height_from_identity(&self) -> Height {
        self.images
            .iter()
            .enumerate()
            .map(|(i, p)| (p - &Poly::var(self.nvars(), i)).height())
            .min()
            .unwrap_or(Height::Infinite)
    }

    pub fn max_coeff_bits(&self) -> u64 {
        self.images.iter().map(Poly::max_coeff_bits).max().unwrap_or(0)
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        let parts: Vec<String> = self.images.iter().map(|p| p.to_string_with(names)).collect();
        format!("({})", parts.join(", "))
    }

    pub(crate) fn from_images_unchecked(images: Vec<Poly>) -> Self {
        PolyEndo { images }
    }
}

impl fmt::Display for PolyEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&default_names(self.nvars())))
    }
}

fn check_same(f: &PolyEndo, g: &PolyEndo) -> Result<()> {
    if f.nvars() != g.nvars() {
        return Err(Error::NvarsMismatch { left: f.nvars(), right: g.nvars() });
    }
    Ok(())
}

/// `f ∘ g` as point maps: `(f ∘ g)(x_i) = f(x_i)` with `g`'s images substituted.
pub fn compose(f: &PolyEndo, g: &PolyEndo) -> Result<PolyEndo> {
    compose_truncated(f, g, None)
}

/// Composition keeping terms of degree `<= cap`. For origin-preserving maps the
/// truncated result only depends on the truncations of `f` and `g`.
pub fn compose_truncated(f: &PolyEndo, g: &PolyEndo, cap: Option<u32>) -> Result<PolyEndo> {
    check_same(f, g)?;
    let images = substitute_all(&f.images, &g.images, cap)?;
    Ok(PolyEndo { images })
}

/// Entries `d f(x_i) / d x_j` of an arbitrary tuple of polynomials.
pub fn jacobian_matrix_of(images: &[Poly]) -> Result<Vec<Vec<Poly>>> {
    images
        .iter()
        .map(|p| (0..images.len()).map(|j| p.partial(j)).collect())
        .collect()
}

pub fn jacobian_of(images: &[Poly]) -> Result<Poly> {
    if images.is_empty() {
        return Ok(Poly::one(0));
    }
    det_poly(&jacobian_matrix_of(images)?)
}

/// `Det[d f(x_i)/d x_j]`, exact.
pub fn jacobian(f: &PolyEndo) -> Poly {
    jacobian_of(&f.images).expect("images are square by construction")
}

/// Jacobian determinant keeping only components of degree `<= cap`. For a map
/// truncated at degree `D` the result is exact up to degree `D - 1`.
pub fn jacobian_truncated(f: &PolyEndo, cap: u32) -> Result<Poly> {
    let m = jacobian_matrix_of(&f.images)?
        .into_iter()
        .map(|row| row.into_iter().map(|p| p.truncate(cap)).collect())
        .collect::<Vec<Vec<Poly>>>();
    if m.len() > 6 {
        return Ok(det_poly(&m)?.truncate(cap));
    }
    let cols: Vec<usize> = (0..m.len()).collect();
    Ok(laplace(&m, 0, &cols, cap, f.nvars()))
}

fn laplace(m: &[Vec<Poly>], row: usize, cols: &[usize], cap: u32, nvars: usize) -> Poly {
    if cols.is_empty() {
        return Poly::one(nvars);
    }
    let mut acc = Poly::zero(nvars);
    for (pos, &c) in cols.iter().enumerate() {
        if m[row][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = laplace(m, row + 1, &rest, cap, nvars);
        let term = m[row][c].mul_truncated(&minor, Some(cap));
        let sign = if pos % 2 == 0 { Rational::one() } else { -Rational::one() };
        acc.add_assign_scaled(&term, &sign);
    }
    acc
}

/// `min_i Ht(f(x_i) - g(x_i))`.
pub fn endo_height(f: &PolyEndo, g: &PolyEndo) -> Result<Height> {
    check_same(f, g)?;
    Ok(f.images
        .iter()
        .zip(&g.images)
        .map(|(a, b)| (a - b).height())
        .min()
        .unwrap_or(Height::Infinite))
}

/// `exp(-Ht(f - g))`, zero when `f == g`.
pub fn metric(f: &PolyEndo, g: &PolyEndo) -> Result<f64> {
    Ok(match endo_height(f, g)? {
        Height::Finite(h) => (-(h as f64)).exp(),
        Height::Infinite => 0.0,
    })
}

/// Matrix `A` with `a_ij` the coefficient of `x_i` in `f(x_j)`, so the linear
/// part of `f` is `(x_1..x_N) A`.
pub fn linear_part(f: &PolyEndo) -> QMatrix {
    let n = f.nvars();
    let mut a = QMatrix::zeros(n, n);
    for (j, p) in f.images.iter().enumerate() {
        for i in 0..n {
            a[(i, j)] = p.coeff(&Monomial::var(n, i));
        }
    }
    a
}

/// Truncated two-sided inverse: `g` with `Ht(g∘f - id) > cutoff` and
/// `Ht(f∘g - id) > cutoff`, built by fixed-point correction one degree at a time.
pub fn formal_inverse(f: &PolyEndo, cutoff: u32) -> Result<PolyEndo> {
    let n = f.nvars();
    let a_inv = linear_part(f).inverse().map_err(|_| Error::SingularLinearPart)?;
    let higher: Vec<Poly> = f
        .images
        .iter()
        .map(|p| {
            let mut h = p.clone();
            for i in 0..n {
                h.add_term(Monomial::var(n, i), &-p.coeff(&Monomial::var(n, i)));
            }
            h.truncate(cutoff)
        })
        .collect();
    let vars: Vec<Poly> = (0..n).map(|i| Poly::var(n, i)).collect();
    let mut g = PolyEndo::from_linear(&a_inv)?;
    for _ in 0..cutoff {
        let hg = substitute_all(&higher, &g.images, Some(cutoff))?;
        let rhs: Vec<Poly> = vars.iter().zip(&hg).map(|(x, h)| x - h).collect();
        let images = (0..n)
            .map(|i| {
                let mut acc = Poly::zero(n);
                for (j, r) in rhs.iter().enumerate() {
                    acc.add_assign_scaled(r, &a_inv[(j, i)]);
                }
                acc
            })
            .collect();
        g = PolyEndo { images };
    }
    Ok(g)
}

/// A generator pair whose bracket is not preserved.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct BracketViolation {
    pub first: usize,
    pub second: usize,
    /// Height of `{f(u), f(v)} - {u, v}`.
    pub height: u32,
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct SymplecticReport {
    pub n: usize,
    /// Degree up to which brackets were compared, `None` for all degrees.
    pub cutoff: Option<u32>,
    pub violations: Vec<BracketViolation>,
}

impl SymplecticReport {
    pub fn is_symplectic(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn describe(&self) -> Vec<String> {
        let names = symplectic_names(self.n);
        self.violations
            .iter()
            .map(|v| format!("{{{}, {}}} violated at height {}", names[v.first], names[v.second], v.height))
            .collect()
    }
}

/// Checks `{f(u), f(v)} = {u, v}` for every generator pair. With a cutoff
/// only the bracket components of degree `<= cutoff` are compared; a jet of
/// the map truncated at degree `D` determines them exactly for `cutoff = D - 1`.
pub fn is_symplectic(f: &PolyEndo, n: usize, cutoff: Option<u32>) -> Result<SymplecticReport> {
    let nv = f.nvars();
    if nv % 2 != 0 {
        return Err(Error::OddVariableCount(nv));
    }
    if nv != 2 * n {
        return Err(Error::NvarsMismatch { left: nv, right: 2 * n });
    }
    let mut report = SymplecticReport { n, cutoff, violations: Vec::new() };
    for u in 0..nv {
        for v in u + 1..nv {
            let got = poisson_bracket_truncated(&f.images[u], &f.images[v], n, cutoff)?;
            let expected = poisson_bracket(&Poly::var(nv, u), &Poly::var(nv, v), n)?;
            let mut defect = &got - &expected;
            if let Some(c) = cutoff {
                defect = defect.truncate(c);
            }
            if let Height::Finite(h) = defect.height() {
                report.violations.push(BracketViolation { first: u, second: v, height: h });
            }
        }
    }
    Ok(report)
}

/// Endomorphism file schema: `{"nvars": N, "symplectic_n": n?, "images": [..]}`.
/// Images are kept raw so validation can report on malformed maps.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct EndoFile {
    pub nvars: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symplectic_n: Option<usize>,
    pub images: Vec<Poly>,
}

impl EndoFile {
    pub fn from_endo(f: &PolyEndo, symplectic_n: Option<usize>) -> Self {
        EndoFile { nvars: f.nvars(), symplectic_n, images: f.images.clone() }
    }

    /// Structural checks only: counts and variable arity.
    pub fn validate_shape(&self) -> Result<()> {
        if self.images.len() != self.nvars {
            return Err(Error::LengthMismatch { expected: self.nvars, got: self.images.len() });
        }
        for p in &self.images {
            if p.nvars() != self.nvars {
                return Err(Error::NvarsMismatch { left: self.nvars, right: p.nvars() });
            }
        }
        if let Some(n) = self.symplectic_n {
            if 2 * n != self.nvars {
                return Err(Error::NvarsMismatch { left: self.nvars, right: 2 * n });
            }
        }
        Ok(())
    }

    pub fn to_endo(&self) -> Result<PolyEndo> {
        self.validate_shape()?;
        PolyEndo::new(self.images.clone())
    }
}
