//! Matrix and affine group elements over R or C, norm gauges and the
//! logarithmic gauge `D(g) = log max(‖g‖, 1)`.

mod exact;

pub use exact::{ext_gcd, gaussian_ext_gcd, ExactAffine, ExactMatrix, GaussianInt, LatticeElement};

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldTag {
    Real,
    Complex,
}

/// Submultiplicative-up-to-constants matrix norms used as gauges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum NormGauge {
    #[default]
    MaxEntry,
    Frobenius,
    Operator,
}

impl NormGauge {
    pub fn key(self) -> &'static str {
        match self {
            NormGauge::MaxEntry => "max-entry",
            NormGauge::Frobenius => "frobenius",
            NormGauge::Operator => "operator",
        }
    }

    pub fn from_key(s: &str) -> Result<Self> {
        match s {
            "max-entry" | "max" | "maxentry" => Ok(NormGauge::MaxEntry),
            "frobenius" | "frob" => Ok(NormGauge::Frobenius),
            "operator" | "op" => Ok(NormGauge::Operator),
            _ => Err(Error::UnknownKey { kind: "gauge", key: s.to_string() }),
        }
    }

    pub fn code(self) -> u8 {
        match self {
            NormGauge::MaxEntry => 0,
            NormGauge::Frobenius => 1,
            NormGauge::Operator => 2,
        }
    }

    pub fn from_code(c: u8) -> Result<Self> {
        match c {
            0 => Ok(NormGauge::MaxEntry),
            1 => Ok(NormGauge::Frobenius),
            2 => Ok(NormGauge::Operator),
            _ => Err(Error::UnknownKey { kind: "gauge code", key: c.to_string() }),
        }
    }
}

/// Square matrix over R or C. Real matrices keep zero imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixElement {
    n: usize,
    field: FieldTag,
    entries: Vec<Complex64>,
    unimodular: bool,
}

const UNIMODULAR_TOL: f64 = 1e-9;

impl MatrixElement {
    pub fn new(n: usize, field: FieldTag, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: entries.len() });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        if field == FieldTag::Real && entries.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidParameter("real matrix with imaginary entries".into()));
        }
        let mut m = MatrixElement { n, field, entries, unimodular: false };
        m.unimodular = (m.det() - Complex64::new(1.0, 0.0)).norm() < UNIMODULAR_TOL;
        Ok(m)
    }

    pub fn real(n: usize, entries: &[f64]) -> Result<Self> {
        Self::new(n, FieldTag::Real, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn complex(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        Self::new(n, FieldTag::Complex, entries)
    }

    pub fn identity(n: usize, field: FieldTag) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        MatrixElement { n, field, entries, unimodular: true }
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut e = vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            e[i * n + i] = *v;
        }
        Self::real(n, &e)
    }

    /// Block diagonal `diag(a, b)`; used for product groups acting by pairs.
    pub fn block_diagonal(a: &MatrixElement, b: &MatrixElement) -> Result<Self> {
        if a.field != b.field {
            return Err(Error::IncompatibleElements("block diagonal of mixed fields".into()));
        }
        let n = a.n + b.n;
        let mut e = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..a.n {
            for j in 0..a.n {
                e[i * n + j] = a.get(i, j);
            }
        }
        for i in 0..b.n {
            for j in 0..b.n {
                e[(a.n + i) * n + a.n + j] = b.get(i, j);
            }
        }
        let mut m = MatrixElement::new(n, a.field, e)?;
        m.unimodular = a.unimodular && b.unimodular;
        Ok(m)
    }

    /// Extract a square diagonal block starting at `offset`.
    pub fn block(&self, offset: usize, size: usize) -> Result<Self> {
        if offset + size > self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: offset + size });
        }
        let mut e = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                e.push(self.get(offset + i, offset + j));
            }
        }
        MatrixElement::new(size, self.field, e)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn is_unimodular(&self) -> bool {
        self.unimodular
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    /// Real parts row-major; only meaningful for real matrices.
    pub fn real_entries(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.re).collect()
    }

    fn joint_field(&self, other: &Self) -> FieldTag {
        if self.field == FieldTag::Complex || other.field == FieldTag::Complex {
            FieldTag::Complex
        } else {
            FieldTag::Real
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let n = self.n;
        let mut e = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    e[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        if e.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix product"));
        }
        Ok(MatrixElement {
            n,
            field: self.joint_field(other),
            entries: e,
            unimodular: self.unimodular && other.unimodular,
        })
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.len() });
        }
        Ok((0..self.n)
            .map(|i| (0..self.n).map(|j| self.entries[i * self.n + j] * v[j]).sum())
            .collect())
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut e = self.entries.clone();
        for i in 0..n {
            for j in 0..n {
                e[j * n + i] = self.entries[i * n + j];
            }
        }
        MatrixElement { n, field: self.field, entries: e, unimodular: self.unimodular }
    }

    pub fn scale(&self, s: f64) -> Self {
        let entries: Vec<Complex64> = self.entries.iter().map(|z| z * s).collect();
        let mut m = MatrixElement { n: self.n, field: self.field, entries, unimodular: false };
        m.unimodular = (m.det() - Complex64::new(1.0, 0.0)).norm() < UNIMODULAR_TOL;
        m
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(MatrixElement { n: self.n, field: self.joint_field(other), entries, unimodular: false })
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.n, self.n, &self.entries)
    }

    fn to_nalgebra_real(&self) -> DMatrix<f64> {
        DMatrix::from_row_iterator(self.n, self.n, self.entries.iter().map(|z| z.re))
    }

    pub fn det(&self) -> Complex64 {
        match self.n {
            0 => Complex64::new(1.0, 0.0),
            1 => self.entries[0],
            2 => self.entries[0] * self.entries[3] - self.entries[1] * self.entries[2],
            _ => {
                if self.field == FieldTag::Real {
                    Complex64::new(self.to_nalgebra_real().determinant(), 0.0)
                } else {
                    self.to_nalgebra().determinant()
                }
            }
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let entries: Vec<Complex64> = if self.field == FieldTag::Real {
            let inv = self.to_nalgebra_real().try_inverse().ok_or(Error::Singular)?;
            let mut out = Vec::with_capacity(self.n * self.n);
            for i in 0..self.n {
                for j in 0..self.n {
                    out.push(Complex64::new(inv[(i, j)], 0.0));
                }
            }
            out
        } else {
            let inv = self.to_nalgebra().try_inverse().ok_or(Error::Singular)?;
            let mut out = Vec::with_capacity(self.n * self.n);
            for i in 0..self.n {
                for j in 0..self.n {
                    out.push(inv[(i, j)]);
                }
            }
            out
        };
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Singular);
        }
        Ok(MatrixElement { n: self.n, field: self.field, entries, unimodular: self.unimodular })
    }

    pub fn norm(&self, gauge: NormGauge) -> f64 {
        match gauge {
            NormGauge::MaxEntry => self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max),
            NormGauge::Frobenius => self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            NormGauge::Operator => {
                if self.n == 0 {
                    return 0.0;
                }
                if self.field == FieldTag::Real {
                    self.to_nalgebra_real().singular_values().max()
                } else {
                    self.to_nalgebra().singular_values().max()
                }
            }
        }
    }
}

/// `x ↦ A x + v` with the composition law of the semidirect product.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineElement {
    linear: MatrixElement,
    translation: Vec<Complex64>,
}

impl AffineElement {
    pub fn new(linear: MatrixElement, translation: Vec<Complex64>) -> Result<Self> {
        if translation.len() != linear.dim() {
            return Err(Error::DimensionMismatch { expected: linear.dim(), got: translation.len() });
        }
        if translation.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("translation"));
        }
        Ok(AffineElement { linear, translation })
    }

    pub fn linear(&self) -> &MatrixElement {
        &self.linear
    }

    pub fn translation(&self) -> &[Complex64] {
        &self.translation
    }

    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut y = self.linear.mul_vec(x)?;
        for (yi, vi) in y.iter_mut().zip(&self.translation) {
            *yi += vi;
        }
        Ok(y)
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        let linear = self.linear.mul(&other.linear)?;
        let translation = self.apply(&other.translation)?;
        AffineElement::new(linear, translation)
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self.linear.inverse()?;
        let t = inv.mul_vec(&self.translation)?;
        AffineElement::new(inv, t.into_iter().map(|z| -z).collect())
    }

    /// The `(n+1)×(n+1)` matrix `[[A, v], [0, 1]]`.
    pub fn embed(&self) -> MatrixElement {
        let n = self.linear.dim();
        let m = n + 1;
        let mut e = vec![Complex64::new(0.0, 0.0); m * m];
        for i in 0..n {
            for j in 0..n {
                e[i * m + j] = self.linear.get(i, j);
            }
            e[i * m + n] = self.translation[i];
        }
        e[n * m + n] = Complex64::new(1.0, 0.0);
        MatrixElement {
            n: m,
            field: self.linear.field(),
            entries: e,
            unimodular: self.linear.is_unimodular(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    Linear(MatrixElement),
    Affine(AffineElement),
}

impl GroupElement {
    pub fn as_matrix(&self) -> Option<&MatrixElement> {
        match self {
            GroupElement::Linear(m) => Some(m),
            GroupElement::Affine(_) => None,
        }
    }

    pub fn as_affine(&self) -> Option<&AffineElement> {
        match self {
            GroupElement::Affine(a) => Some(a),
            GroupElement::Linear(_) => None,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(match self {
            GroupElement::Linear(m) => GroupElement::Linear(m.inverse()?),
            GroupElement::Affine(a) => GroupElement::Affine(a.inverse()?),
        })
    }

    /// The matrix whose norm defines the gauge (affine elements are embedded).
    pub fn gauge_matrix(&self) -> MatrixElement {
        match self {
            GroupElement::Linear(m) => m.clone(),
            GroupElement::Affine(a) => a.embed(),
        }
    }

    pub fn norm(&self, gauge: NormGauge) -> f64 {
        match self {
            GroupElement::Linear(m) => m.norm(gauge),
            GroupElement::Affine(a) => a.embed().norm(gauge),
        }
    }
}

/// Group product `g·h`.
pub fn multiply(g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    match (g, h) {
        (GroupElement::Linear(a), GroupElement::Linear(b)) => Ok(GroupElement::Linear(a.mul(b)?)),
        (GroupElement::Affine(a), GroupElement::Affine(b)) => Ok(GroupElement::Affine(a.compose(b)?)),
        _ => Err(Error::IncompatibleElements("cannot multiply linear and affine elements".into())),
    }
}

/// `D(g) = log max(‖g‖, 1)`.
pub fn gauge_value(g: &GroupElement, gauge: NormGauge) -> Result<f64> {
    let n = g.norm(gauge);
    if !n.is_finite() {
        return Err(Error::NonFinite("gauge"));
    }
    Ok(n.max(1.0).ln())
}

/// Largest observed `D(u g v) - D(g)` over triples `(u, g, v)` with `u, v`
/// drawn from a compact set.
pub fn check_distortion(
    samples: &[(GroupElement, GroupElement, GroupElement)],
    gauge: NormGauge,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for (u, g, v) in samples {
        let ugv = multiply(&multiply(u, g)?, v)?;
        let diff = gauge_value(&ugv, gauge)? - gauge_value(g, gauge)?;
        worst = worst.max(diff);
    }
    Ok(worst)
}

/// A random unimodular matrix near the identity: entries of `I + E` with
/// `E` uniform in `[-spread, spread]`, rescaled to determinant one.
pub fn random_unimodular<R: Rng + ?Sized>(
    n: usize,
    field: FieldTag,
    spread: f64,
    rng: &mut R,
) -> MatrixElement {
    loop {
        let mut e = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let re = rng.gen_range(-spread..=spread) + if i == j { 1.0 } else { 0.0 };
                let im = match field {
                    FieldTag::Real => 0.0,
                    FieldTag::Complex => rng.gen_range(-spread..=spread),
                };
                e[i * n + j] = Complex64::new(re, im);
            }
        }
        let Ok(mut m) = MatrixElement::new(n, field, e) else { continue };
        let det = m.det();
        if det.norm() < 1e-3 {
            continue;
        }
        match field {
            FieldTag::Real => {
                if det.re < 0.0 {
                    for j in 0..n {
                        m.entries[j] = -m.entries[j];
                    }
                }
                let s = det.re.abs().powf(-1.0 / n as f64);
                return m.scale(s);
            }
            FieldTag::Complex => {
                let root = det.powf(1.0 / n as f64);
                let entries = m.entries.iter().map(|z| z / root).collect();
                if let Ok(out) = MatrixElement::new(n, field, entries) {
                    return out;
                }
            }
        }
    }
}

/// A random orthogonal matrix from the QR factorisation of a uniform matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> MatrixElement {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let q = m.qr().q();
    let mut e = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            e.push(q[(i, j)]);
        }
    }
    MatrixElement::real(n, &e).expect("orthogonal factor is finite")
}
