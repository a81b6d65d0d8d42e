use super::{Monomial, Poly};
use crate::error::{Error, Result};
use crate::rational::Rational;

impl Poly {
    /// Exact quotient `self / divisor`; fails unless the division leaves no remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Result<Poly> {
        self.check_nvars(divisor)?;
        let (dm, dc) = match divisor.leading() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(Error::InexactDivision),
        };
        let dc_inv = dc.recip().expect("leading coefficient is nonzero");
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((m, c)) = rem.leading() {
            if !dm.divides(m) {
                return Err(Error::InexactDivision);
            }
            let t: Monomial = m.div(&dm);
            let q = c * &dc_inv;
            let step = Poly::term(t.clone(), q.clone());
            rem = &rem - &step.mul_truncated(divisor, None);
            quot.add_term(t, &q);
        }
        Ok(quot)
    }
}

/// Determinant by fraction-free (Bareiss) elimination with row pivoting.
pub fn det_poly(m: &[Vec<Poly>]) -> Result<Poly> {
    let size = m.len();
    for row in m {
        if row.len() != size {
            return Err(Error::NonSquare { rows: size, cols: row.len() });
        }
    }
    let nvars = match m.first().and_then(|r| r.first()) {
        Some(p) => p.nvars(),
        None => return Err(Error::NonSquare { rows: 0, cols: 0 }),
    };
    for p in m.iter().flatten() {
        if p.nvars() != nvars {
            return Err(Error::NvarsMismatch { left: nvars, right: p.nvars() });
        }
    }
    let mut a: Vec<Vec<Poly>> = m.to_vec();
    let mut negate = false;
    let mut prev = Poly::one(nvars);
    for k in 0..size.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..size).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return Ok(Poly::zero(nvars)),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev)?;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[size - 1][size - 1].clone();
    Ok(if negate { det.scale(&-Rational::one()) } else { det })
}
