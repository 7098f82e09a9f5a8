//! Exact linear algebra over an abstract field, plus a small generic
//! polynomial type for coefficient work in field extensions.

use crate::rational::Rational;
use crate::surd::Surd;
use crate::{Error, Result};
use num_traits::Zero;

pub trait Field: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self>;
    fn is_zero(&self) -> bool;
}

impl Field for Rational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn inv(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.recip())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Field for Surd {
    fn zero() -> Self {
        Surd::zero()
    }
    fn one() -> Self {
        Surd::from_integer(1)
    }
    fn add(&self, rhs: &Self) -> Self {
        Surd::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Surd::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Surd::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        Surd::neg(self)
    }
    fn inv(&self) -> Result<Self> {
        self.inverse()
    }
    fn is_zero(&self) -> bool {
        Surd::is_zero(self)
    }
}

/// Reduce `[A | b]` in place to row echelon form; returns pivot columns.
fn eliminate<F: Field>(rows: &mut [Vec<F>]) -> Result<Vec<usize>> {
    let nrows = rows.len();
    let ncols = if nrows == 0 { 0 } else { rows[0].len() };
    let mut pivots = vec![];
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..nrows).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].inv()?;
        for c in col..ncols {
            rows[rank][c] = rows[rank][c].mul(&inv);
        }
        for i in 0..nrows {
            if i == rank || rows[i][col].is_zero() {
                continue;
            }
            let factor = rows[i][col].clone();
            for c in col..ncols {
                let delta = factor.mul(&rows[rank][c]);
                rows[i][c] = rows[i][c].sub(&delta);
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    Ok(pivots)
}

/// One solution of `A x = b` with free variables set to zero, or `None` if
/// the system is inconsistent.
pub fn solve<F: Field>(a: &[Vec<F>], b: &[F]) -> Result<Option<Vec<F>>> {
    let ncols = a.first().map_or(0, |r| r.len());
    let mut rows: Vec<Vec<F>> = a
        .iter()
        .zip(b)
        .map(|(r, rhs)| {
            let mut row = r.clone();
            row.push(rhs.clone());
            row
        })
        .collect();
    let pivots = eliminate(&mut rows)?;
    // Inconsistent iff some pivot lands in the augmented column.
    if pivots.iter().any(|&c| c == ncols) {
        return Ok(None);
    }
    let mut x = vec![F::zero(); ncols];
    for (row, &col) in rows.iter().zip(&pivots) {
        x[col] = row[ncols].clone();
    }
    Ok(Some(x))
}

/// Basis of the kernel of `A`, one vector per free column.
pub fn nullspace<F: Field>(a: &[Vec<F>]) -> Result<Vec<Vec<F>>> {
    let ncols = a.first().map_or(0, |r| r.len());
    let mut rows: Vec<Vec<F>> = a.to_vec();
    let pivots = eliminate(&mut rows)?;
    let mut basis = vec![];
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![F::zero(); ncols];
        v[free] = F::one();
        for (row, &col) in rows.iter().zip(&pivots) {
            v[col] = row[free].neg();
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Dense polynomial over an arbitrary field, low degree first.
#[derive(Clone, PartialEq, Debug)]
pub struct FPoly<F: Field> {
    coeffs: Vec<F>,
}

impl<F: Field> FPoly<F> {
    pub fn zero() -> Self {
        FPoly { coeffs: vec![] }
    }

    pub fn from_coeffs(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        FPoly { coeffs }
    }

    pub fn constant(c: F) -> Self {
        FPoly::from_coeffs(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(F::zero)
    }

    #[cfg(test)]
    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        FPoly::from_coeffs((0..n).map(|i| self.coeff(i).add(&rhs.coeff(i))).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        FPoly::from_coeffs((0..n).map(|i| self.coeff(i).sub(&rhs.coeff(i))).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return FPoly::zero();
        }
        let mut coeffs = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        FPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &F) -> Self {
        FPoly::from_coeffs(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return FPoly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            let mut acc = F::zero();
            for _ in 0..i {
                acc = acc.add(c);
            }
            out.push(acc);
        }
        FPoly::from_coeffs(out)
    }

    #[cfg(test)]
    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }
}
