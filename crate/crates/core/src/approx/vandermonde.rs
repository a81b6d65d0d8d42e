use crate::linalg::QMatrix;
use crate::rational::{binomial, Rational};

/// Nodes `1, .., d + 1`: the powers `(x + μ_i y)^d` form a basis of the
/// binary forms of degree `d`.
pub fn vandermonde_power_basis(d: u32) -> Vec<Rational> {
    (1..=d as i64 + 1).map(Rational::from_int).collect()
}

/// Row `i` holds the coefficients of `(x + μ_i y)^d` on `x^(d-q) y^q`,
/// `q = 0..d`, namely `C(d, q) μ_i^q`.
pub fn power_coefficient_matrix(d: u32, nodes: &[Rational]) -> QMatrix {
    let rows = nodes
        .iter()
        .map(|mu| (0..=d).map(|q| &binomial(d, q) * &mu.pow(q)).collect())
        .collect();
    QMatrix::from_rows(rows).expect("rectangular by construction")
}
