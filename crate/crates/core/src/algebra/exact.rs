//! Exact integer and Gaussian-integer matrices for lattice elements.

use super::{AffineElement, FieldTag, GroupElement, MatrixElement};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

impl GaussianInt {
    pub const ZERO: GaussianInt = GaussianInt { re: 0, im: 0 };
    pub const ONE: GaussianInt = GaussianInt { re: 1, im: 0 };
    pub const I: GaussianInt = GaussianInt { re: 0, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        GaussianInt { re, im }
    }

    pub const fn int(re: i64) -> Self {
        GaussianInt { re, im: 0 }
    }

    pub fn norm(self) -> i64 {
        self.re * self.re + self.im * self.im
    }

    pub fn conj(self) -> Self {
        GaussianInt::new(self.re, -self.im)
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_unit(self) -> bool {
        self.norm() == 1
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re as f64, self.im as f64)
    }

    /// Inverse of a unit.
    pub fn unit_inverse(self) -> Option<Self> {
        if self.is_unit() {
            Some(self.conj())
        } else {
            None
        }
    }

    /// Quotient rounded to the nearest Gaussian integer (Euclidean division).
    pub fn div_round(self, d: Self) -> Self {
        let n = d.norm() as i128;
        let num = self * d.conj();
        let round = |x: i64| -> i64 {
            let x = x as i128;
            // nearest integer to x / n, ties toward +inf
            let q = (2 * x + n).div_euclid(2 * n);
            q as i64
        };
        GaussianInt::new(round(num.re), round(num.im))
    }

    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        (self.re, self.im).cmp(&(other.re, other.im))
    }
}

impl Add for GaussianInt {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        GaussianInt::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussianInt {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        GaussianInt::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for GaussianInt {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        GaussianInt::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Neg for GaussianInt {
    type Output = Self;
    fn neg(self) -> Self {
        GaussianInt::new(-self.re, -self.im)
    }
}

/// Returns `(g, s, t)` with `a s + b t = g = gcd(a, b) ≥ 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Returns `(g, s, t)` with `a s + b t = g`, `g` a gcd of `a, b` in Z[i].
pub fn gaussian_ext_gcd(a: GaussianInt, b: GaussianInt) -> (GaussianInt, GaussianInt, GaussianInt) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (GaussianInt::ONE, GaussianInt::ZERO);
    let (mut t0, mut t1) = (GaussianInt::ZERO, GaussianInt::ONE);
    while !r1.is_zero() {
        let q = r0.div_round(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0, s0, t0)
}

/// Square matrix with entries in Z (zero imaginary parts) or Z[i].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    n: usize,
    field: FieldTag,
    entries: Vec<GaussianInt>,
}

impl ExactMatrix {
    pub fn new(n: usize, field: FieldTag, entries: Vec<GaussianInt>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: entries.len() });
        }
        if field == FieldTag::Real && entries.iter().any(|z| z.im != 0) {
            return Err(Error::InvalidParameter("integer matrix with imaginary entries".into()));
        }
        Ok(ExactMatrix { n, field, entries })
    }

    pub fn integer(n: usize, entries: &[i64]) -> Result<Self> {
        Self::new(n, FieldTag::Real, entries.iter().map(|&x| GaussianInt::int(x)).collect())
    }

    pub fn gaussian(n: usize, entries: Vec<GaussianInt>) -> Result<Self> {
        Self::new(n, FieldTag::Complex, entries)
    }

    pub fn identity(n: usize, field: FieldTag) -> Self {
        let mut e = vec![GaussianInt::ZERO; n * n];
        for i in 0..n {
            e[i * n + i] = GaussianInt::ONE;
        }
        ExactMatrix { n, field, entries: e }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn entries(&self) -> &[GaussianInt] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> GaussianInt {
        self.entries[i * self.n + j]
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let n = self.n;
        let mut e = vec![GaussianInt::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = GaussianInt::ZERO;
                for k in 0..n {
                    acc = acc + self.get(i, k) * other.get(k, j);
                }
                e[i * n + j] = acc;
            }
        }
        let field = if self.field == FieldTag::Complex || other.field == FieldTag::Complex {
            FieldTag::Complex
        } else {
            FieldTag::Real
        };
        Ok(ExactMatrix { n, field, entries: e })
    }

    fn minor(&self, row: usize, col: usize) -> ExactMatrix {
        let n = self.n;
        let mut e = Vec::with_capacity((n - 1) * (n - 1));
        for i in 0..n {
            if i == row {
                continue;
            }
            for j in 0..n {
                if j != col {
                    e.push(self.get(i, j));
                }
            }
        }
        ExactMatrix { n: n - 1, field: self.field, entries: e }
    }

    /// Exact determinant by cofactor expansion (sizes here are at most 4).
    pub fn det(&self) -> GaussianInt {
        match self.n {
            0 => GaussianInt::ONE,
            1 => self.entries[0],
            2 => self.entries[0] * self.entries[3] - self.entries[1] * self.entries[2],
            n => {
                let mut acc = GaussianInt::ZERO;
                for j in 0..n {
                    let term = self.get(0, j) * self.minor(0, j).det();
                    acc = if j % 2 == 0 { acc + term } else { acc - term };
                }
                acc
            }
        }
    }

    /// Inverse of a matrix with unit determinant, via the adjugate.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        let dinv = det.unit_inverse().ok_or(Error::Singular)?;
        let n = self.n;
        if n == 1 {
            return Ok(ExactMatrix { n, field: self.field, entries: vec![dinv] });
        }
        let mut e = vec![GaussianInt::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(j, i).det();
                let c = if (i + j) % 2 == 0 { c } else { -c };
                e[i * n + j] = c * dinv;
            }
        }
        Ok(ExactMatrix { n, field: self.field, entries: e })
    }

    pub fn max_modulus(&self) -> f64 {
        self.entries.iter().map(|z| (z.norm() as f64).sqrt()).fold(0.0, f64::max)
    }

    pub fn to_matrix(&self) -> MatrixElement {
        let e = self.entries.iter().map(|z| z.to_complex()).collect();
        MatrixElement::new(self.n, self.field, e).expect("exact entries are finite")
    }

    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.entries.iter().zip(&other.entries) {
            match a.lex_cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactAffine {
    pub linear: ExactMatrix,
    pub translation: Vec<GaussianInt>,
}

impl ExactAffine {
    pub fn new(linear: ExactMatrix, translation: Vec<GaussianInt>) -> Result<Self> {
        if translation.len() != linear.dim() {
            return Err(Error::DimensionMismatch { expected: linear.dim(), got: translation.len() });
        }
        Ok(ExactAffine { linear, translation })
    }

    pub fn to_affine(&self) -> AffineElement {
        AffineElement::new(self.linear.to_matrix(), self.translation.iter().map(|z| z.to_complex()).collect())
            .expect("exact entries are finite")
    }

    /// `(A, v)⁻¹ = (A⁻¹, -A⁻¹ v)`.
    pub fn inverse(&self) -> Result<Self> {
        let inv = self.linear.inverse()?;
        let n = inv.dim();
        let t = (0..n)
            .map(|i| {
                let mut acc = GaussianInt::ZERO;
                for j in 0..n {
                    acc = acc + inv.get(i, j) * self.translation[j];
                }
                -acc
            })
            .collect();
        Ok(ExactAffine { linear: inv, translation: t })
    }
}

/// An element of one of the supported lattices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LatticeElement {
    Linear(ExactMatrix),
    Affine(ExactAffine),
}

impl LatticeElement {
    pub fn to_group_element(&self) -> GroupElement {
        match self {
            LatticeElement::Linear(m) => GroupElement::Linear(m.to_matrix()),
            LatticeElement::Affine(a) => GroupElement::Affine(a.to_affine()),
        }
    }

    pub fn field(&self) -> FieldTag {
        match self {
            LatticeElement::Linear(m) => m.field(),
            LatticeElement::Affine(a) => a.linear.field(),
        }
    }

    /// Flat integer encoding: linear part row-major, then translation.
    /// Gaussian entries contribute `(re, im)` pairs.
    pub fn flat_entries(&self) -> Vec<i64> {
        let (lin, tr): (&[GaussianInt], &[GaussianInt]) = match self {
            LatticeElement::Linear(m) => (m.entries(), &[]),
            LatticeElement::Affine(a) => (a.linear.entries(), &a.translation),
        };
        let complex = self.field() == FieldTag::Complex;
        let mut out = Vec::new();
        for z in lin.iter().chain(tr) {
            out.push(z.re);
            if complex {
                out.push(z.im);
            }
        }
        out
    }

    pub fn linear(&self) -> &ExactMatrix {
        match self {
            LatticeElement::Linear(m) => m,
            LatticeElement::Affine(a) => &a.linear,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_gcd_identity() {
        for a in -20i64..=20 {
            for b in -20i64..=20 {
                let (g, s, t) = ext_gcd(a, b);
                assert_eq!(a * s + b * t, g);
                assert!(g >= 0);
                if g != 0 {
                    assert_eq!(a % g, 0);
                    assert_eq!(b % g, 0);
                }
            }
        }
    }

    #[test]
    fn gaussian_gcd_identity() {
        for ar in -6..=6 {
            for ai in -6..=6 {
                for br in -4..=4 {
                    for bi in -4..=4 {
                        let a = GaussianInt::new(ar, ai);
                        let b = GaussianInt::new(br, bi);
                        let (g, s, t) = gaussian_ext_gcd(a, b);
                        assert_eq!(a * s + b * t, g);
                    }
                }
            }
        }
    }

    #[test]
    fn exact_inverse_of_sl3() {
        let m = ExactMatrix::integer(3, &[1, 2, 0, 0, 1, 3, 1, 0, 1]).unwrap();
        assert_eq!(m.det(), GaussianInt::int(7));
        let u = ExactMatrix::integer(3, &[1, 2, 3, 0, 1, 4, 0, 0, 1]).unwrap();
        let inv = u.inverse().unwrap();
        assert_eq!(u.mul(&inv).unwrap(), ExactMatrix::identity(3, FieldTag::Real));
    }
}
