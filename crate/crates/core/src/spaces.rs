//! The catalog of homogeneous varieties `X = G/H` with their actions,
//! membership tests, metrics and samplers.

use crate::algebra::{
    random_unimodular, AffineElement, FieldTag, GroupElement, MatrixElement, NormGauge,
};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Relative tolerance for membership and action-law checks.
pub const MEMBERSHIP_TOL: f64 = 1e-7;

/// A point of an ambient coordinate space, flattened to real coordinates.
/// Complex coordinates are stored as consecutive `(re, im)` pairs and
/// matrix-valued points row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

/// Sampling window. Affine spaces sample coordinates in `[lo, hi]` (moduli in
/// `[lo, hi]` for complex coordinates); matrix spaces perturb the identity by
/// entries in `[-s, s]` with `s = max(|lo|, |hi|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub const UNIT: Window = Window { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidParameter(format!("bad window [{lo}, {hi}]")));
        }
        Ok(Window { lo, hi })
    }

    fn spread(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpaceKind {
    /// `R²` under `SL2(R) ⋉ R²`.
    RealPlaneAffine,
    /// `C²` under `SL2(C) ⋉ C²`.
    ComplexPlaneAffine,
    /// Ternary quadratic forms of a fixed signature and determinant under
    /// `Q ↦ g⁻ᵀ Q g⁻¹`.
    TernaryForms { positive: u8, negative: u8, det: f64 },
    /// `{A ∈ Mat3(R) : det A = k}` under `(g, h)·A = g A h⁻¹`.
    DeterminantVariety { k: f64 },
    /// `{J ∈ Mat4(R) : J² = -I}` under conjugation.
    ComplexStructures,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Space {
    pub kind: SpaceKind,
    /// Norm on ambient coordinates used by `distance`.
    pub norm: NormGauge,
}

fn parse_number(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::InvalidParameter(format!("cannot parse number `{s}`")))
}

impl Space {
    pub fn new(kind: SpaceKind) -> Result<Self> {
        let space = Space { kind, norm: NormGauge::Frobenius };
        space.validate()?;
        Ok(space)
    }

    pub fn with_norm(mut self, norm: NormGauge) -> Self {
        self.norm = norm;
        self
    }

    fn validate(&self) -> Result<()> {
        match self.kind {
            SpaceKind::TernaryForms { positive, negative, det } => {
                if positive + negative != 3 || positive == 0 || negative == 0 {
                    return Err(Error::InvalidParameter("ternary forms need an indefinite signature (p, q), p + q = 3".into()));
                }
                if det == 0.0 || !det.is_finite() {
                    return Err(Error::InvalidParameter("ternary forms need a nonzero determinant".into()));
                }
                let sign = if negative % 2 == 0 { 1.0 } else { -1.0 };
                if det.signum() != sign {
                    return Err(Error::InvalidParameter(format!(
                        "determinant {det} is incompatible with signature ({positive}, {negative})"
                    )));
                }
                Ok(())
            }
            SpaceKind::DeterminantVariety { k } => {
                if k == 0.0 || !k.is_finite() {
                    return Err(Error::InvalidParameter("determinant variety needs k ≠ 0".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Parse a stable catalog key.
    ///
    /// `ternary-forms-sig(p,q)-det<k>`: `k` may be given as a magnitude, the
    /// sign then follows from the signature.
    pub fn from_key(key: &str) -> Result<Self> {
        let unknown = || Error::UnknownKey { kind: "space", key: key.to_string() };
        let kind = match key {
            "real-plane-affine" => SpaceKind::RealPlaneAffine,
            "complex-plane-affine" => SpaceKind::ComplexPlaneAffine,
            "complex-structures-r4" | "complex-structures" => SpaceKind::ComplexStructures,
            _ => {
                if let Some(rest) = key.strip_prefix("ternary-forms-sig(") {
                    let (sig, det) = rest.split_once(")-det").ok_or_else(unknown)?;
                    let (p, q) = sig.split_once(',').ok_or_else(unknown)?;
                    let positive: u8 = p.trim().parse().map_err(|_| unknown())?;
                    let negative: u8 = q.trim().parse().map_err(|_| unknown())?;
                    let mut det = parse_number(det)?;
                    if det > 0.0 && negative % 2 == 1 {
                        det = -det;
                    }
                    SpaceKind::TernaryForms { positive, negative, det }
                } else if let Some(rest) = key.strip_prefix("determinant-variety-n3-k") {
                    SpaceKind::DeterminantVariety { k: parse_number(rest)? }
                } else {
                    return Err(unknown());
                }
            }
        };
        Space::new(kind)
    }

    pub fn key(&self) -> String {
        match self.kind {
            SpaceKind::RealPlaneAffine => "real-plane-affine".into(),
            SpaceKind::ComplexPlaneAffine => "complex-plane-affine".into(),
            SpaceKind::TernaryForms { positive, negative, det } => {
                format!("ternary-forms-sig({positive},{negative})-det{}", det.abs())
            }
            SpaceKind::DeterminantVariety { k } => format!("determinant-variety-n3-k{k}"),
            SpaceKind::ComplexStructures => "complex-structures-r4".into(),
        }
    }

    /// Real dimension of the variety.
    pub fn dimension(&self) -> usize {
        match self.kind {
            SpaceKind::RealPlaneAffine => 2,
            SpaceKind::ComplexPlaneAffine => 4,
            SpaceKind::TernaryForms { .. } => 5,
            SpaceKind::DeterminantVariety { .. } => 8,
            SpaceKind::ComplexStructures => 9,
        }
    }

    /// Number of real ambient coordinates.
    pub fn ambient_len(&self) -> usize {
        match self.kind {
            SpaceKind::RealPlaneAffine => 2,
            SpaceKind::ComplexPlaneAffine => 4,
            SpaceKind::TernaryForms { .. } | SpaceKind::DeterminantVariety { .. } => 9,
            SpaceKind::ComplexStructures => 16,
        }
    }

    fn matrix_side(&self) -> Option<usize> {
        match self.kind {
            SpaceKind::TernaryForms { .. } | SpaceKind::DeterminantVariety { .. } => Some(3),
            SpaceKind::ComplexStructures => Some(4),
            _ => None,
        }
    }

    fn check_len(&self, x: &Point) -> Result<()> {
        if x.0.len() != self.ambient_len() {
            return Err(Error::DimensionMismatch { expected: self.ambient_len(), got: x.0.len() });
        }
        if x.0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("point coordinates"));
        }
        Ok(())
    }

    fn as_matrix(&self, x: &Point) -> Result<MatrixElement> {
        let n = self.matrix_side().expect("matrix-valued space");
        MatrixElement::real(n, &x.0)
    }

    /// Membership with relative tolerance `MEMBERSHIP_TOL`.
    pub fn contains(&self, x: &Point) -> bool {
        if self.check_len(x).is_err() {
            return false;
        }
        match self.kind {
            SpaceKind::RealPlaneAffine | SpaceKind::ComplexPlaneAffine => true,
            SpaceKind::TernaryForms { positive, det, .. } => {
                let Ok(q) = self.as_matrix(x) else { return false };
                let scale = q.norm(NormGauge::MaxEntry).max(1.0);
                let asym = q.sub(&q.transpose()).map(|d| d.norm(NormGauge::MaxEntry)).unwrap_or(f64::INFINITY);
                if asym > MEMBERSHIP_TOL * scale {
                    return false;
                }
                if (q.det().re - det).abs() > MEMBERSHIP_TOL * scale.powi(3).max(det.abs()) {
                    return false;
                }
                let m = DMatrix::from_row_slice(3, 3, &x.0);
                let sym = (&m + m.transpose()) * 0.5;
                let eig = SymmetricEigen::new(sym).eigenvalues;
                eig.iter().filter(|&&l| l > 0.0).count() == positive as usize
            }
            SpaceKind::DeterminantVariety { k } => {
                let Ok(a) = self.as_matrix(x) else { return false };
                let scale = a.norm(NormGauge::MaxEntry).max(1.0);
                (a.det().re - k).abs() <= MEMBERSHIP_TOL * scale.powi(3).max(k.abs())
            }
            SpaceKind::ComplexStructures => {
                let Ok(j) = self.as_matrix(x) else { return false };
                let scale = j.norm(NormGauge::MaxEntry).max(1.0);
                let Ok(j2) = j.mul(&j) else { return false };
                let plus_i = j2.entries().iter().enumerate().map(|(idx, z)| {
                    let diag = if idx / 4 == idx % 4 { 1.0 } else { 0.0 };
                    (z.re + diag).abs()
                });
                plus_i.fold(0.0, f64::max) <= MEMBERSHIP_TOL * scale * scale
            }
        }
    }

    fn require_member(&self, x: &Point) -> Result<()> {
        self.check_len(x)?;
        if !self.contains(x) {
            return Err(Error::OffVariety(self.key()));
        }
        Ok(())
    }

    fn split_pair(&self, g: &MatrixElement) -> Result<(MatrixElement, MatrixElement)> {
        if g.dim() != 6 {
            return Err(Error::DimensionMismatch { expected: 6, got: g.dim() });
        }
        for i in 0..6 {
            for j in 0..6 {
                if (i < 3) != (j < 3) && g.get(i, j).norm() != 0.0 {
                    return Err(Error::IncompatibleElements(
                        "determinant-variety elements are block diagonal pairs (g, h)".into(),
                    ));
                }
            }
        }
        Ok((g.block(0, 3)?, g.block(3, 3)?))
    }

    /// `g · x`.
    pub fn apply_action(&self, g: &GroupElement, x: &Point) -> Result<Point> {
        self.require_member(x)?;
        self.act_unchecked(g, x)
    }

    /// `g⁻¹ · x`.
    pub fn apply_inverse_action(&self, g: &GroupElement, x: &Point) -> Result<Point> {
        self.apply_action(&g.inverse()?, x)
    }

    fn act_unchecked(&self, g: &GroupElement, x: &Point) -> Result<Point> {
        let wrong = |what: &str| Error::IncompatibleElements(format!("{} expects {what}", self.key()));
        match self.kind {
            SpaceKind::RealPlaneAffine => {
                let a = g.as_affine().ok_or_else(|| wrong("an affine element"))?;
                if a.linear().dim() != 2 || a.linear().field() != FieldTag::Real {
                    return Err(wrong("a real 2-dimensional affine element"));
                }
                let v: Vec<Complex64> = x.0.iter().map(|&c| Complex64::new(c, 0.0)).collect();
                Ok(Point(a.apply(&v)?.iter().map(|z| z.re).collect()))
            }
            SpaceKind::ComplexPlaneAffine => {
                let a = g.as_affine().ok_or_else(|| wrong("an affine element"))?;
                if a.linear().dim() != 2 {
                    return Err(wrong("a 2-dimensional affine element"));
                }
                let v = vec![Complex64::new(x.0[0], x.0[1]), Complex64::new(x.0[2], x.0[3])];
                let y = a.apply(&v)?;
                Ok(Point(vec![y[0].re, y[0].im, y[1].re, y[1].im]))
            }
            SpaceKind::TernaryForms { .. } => {
                let m = g.as_matrix().ok_or_else(|| wrong("a 3×3 matrix"))?;
                if m.dim() != 3 {
                    return Err(wrong("a 3×3 matrix"));
                }
                let inv = m.inverse()?;
                let q = self.as_matrix(x)?;
                let out = inv.transpose().mul(&q)?.mul(&inv)?;
                Ok(Point(out.real_entries()))
            }
            SpaceKind::DeterminantVariety { .. } => {
                let m = g.as_matrix().ok_or_else(|| wrong("a block-diagonal pair"))?;
                let (gl, gr) = self.split_pair(m)?;
                let a = self.as_matrix(x)?;
                let out = gl.mul(&a)?.mul(&gr.inverse()?)?;
                Ok(Point(out.real_entries()))
            }
            SpaceKind::ComplexStructures => {
                let m = g.as_matrix().ok_or_else(|| wrong("a 4×4 matrix"))?;
                if m.dim() != 4 {
                    return Err(wrong("a 4×4 matrix"));
                }
                let j = self.as_matrix(x)?;
                let out = m.mul(&j)?.mul(&m.inverse()?)?;
                Ok(Point(out.real_entries()))
            }
        }
    }

    /// Ambient distance `‖x - y‖` under `self.norm`.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_len(x)?;
        self.check_len(y)?;
        let diff: Vec<f64> = x.0.iter().zip(&y.0).map(|(a, b)| a - b).collect();
        Ok(match self.kind {
            SpaceKind::RealPlaneAffine => vector_norm(&diff, self.norm, false),
            SpaceKind::ComplexPlaneAffine => vector_norm(&diff, self.norm, true),
            _ => {
                let n = self.matrix_side().unwrap();
                MatrixElement::real(n, &diff)?.norm(self.norm)
            }
        })
    }

    /// A base point of the variety.
    pub fn base_point(&self) -> Point {
        match self.kind {
            SpaceKind::RealPlaneAffine => Point(vec![0.0; 2]),
            SpaceKind::ComplexPlaneAffine => Point(vec![0.0; 4]),
            SpaceKind::TernaryForms { positive, det, .. } => {
                let s = det.abs().cbrt();
                let mut e = vec![0.0; 9];
                for i in 0..3 {
                    e[i * 4] = if i < positive as usize { s } else { -s };
                }
                Point(e)
            }
            SpaceKind::DeterminantVariety { k } => Point(vec![k, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]),
            SpaceKind::ComplexStructures => Point(standard_complex_structure()),
        }
    }

    /// A random point drawn from the window.
    pub fn random_point<R: Rng + ?Sized>(&self, window: Window, rng: &mut R) -> Point {
        match self.kind {
            SpaceKind::RealPlaneAffine => {
                Point((0..2).map(|_| rng.gen_range(window.lo..=window.hi)).collect())
            }
            SpaceKind::ComplexPlaneAffine => {
                let mut c = Vec::with_capacity(4);
                for _ in 0..2 {
                    let (lo2, hi2) = (window.lo.max(0.0).powi(2), window.hi.max(0.0).powi(2));
                    let r = rng.gen_range(lo2..=hi2).sqrt();
                    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
                    c.push(r * phi.cos());
                    c.push(r * phi.sin());
                }
                Point(c)
            }
            _ => {
                let g = self.random_group_element(window.spread(), rng);
                self.act_unchecked(&g, &self.base_point()).expect("sampled element acts on the base point")
            }
        }
    }

    /// A random element of the acting group near the identity.
    pub fn random_group_element<R: Rng + ?Sized>(&self, spread: f64, rng: &mut R) -> GroupElement {
        match self.kind {
            SpaceKind::RealPlaneAffine => {
                let a = random_unimodular(2, FieldTag::Real, spread, rng);
                let v = (0..2).map(|_| Complex64::new(rng.gen_range(-spread..=spread), 0.0)).collect();
                GroupElement::Affine(AffineElement::new(a, v).unwrap())
            }
            SpaceKind::ComplexPlaneAffine => {
                let a = random_unimodular(2, FieldTag::Complex, spread, rng);
                let v = (0..2)
                    .map(|_| Complex64::new(rng.gen_range(-spread..=spread), rng.gen_range(-spread..=spread)))
                    .collect();
                GroupElement::Affine(AffineElement::new(a, v).unwrap())
            }
            SpaceKind::TernaryForms { .. } => GroupElement::Linear(random_unimodular(3, FieldTag::Real, spread, rng)),
            SpaceKind::DeterminantVariety { .. } => {
                let g = random_unimodular(3, FieldTag::Real, spread, rng);
                let h = random_unimodular(3, FieldTag::Real, spread, rng);
                GroupElement::Linear(MatrixElement::block_diagonal(&g, &h).unwrap())
            }
            SpaceKind::ComplexStructures => GroupElement::Linear(random_unimodular(4, FieldTag::Real, spread, rng)),
        }
    }

    /// `dist(g x, g y) / dist(x, y)`, the local metric distortion of `g`.
    pub fn metric_distortion(&self, g: &GroupElement, x: &Point, y: &Point) -> Result<f64> {
        let d = self.distance(x, y)?;
        if d == 0.0 {
            return Err(Error::Degenerate("coincident points".into()));
        }
        Ok(self.distance(&self.apply_action(g, x)?, &self.apply_action(g, y)?)? / d)
    }
}

/// `J0 = [[0, -I], [I, 0]]` in `Mat4(R)`.
pub fn standard_complex_structure() -> Vec<f64> {
    let mut e = vec![0.0; 16];
    e[2] = -1.0;
    e[4 + 3] = -1.0;
    e[2 * 4] = 1.0;
    e[3 * 4 + 1] = 1.0;
    e
}

/// Norm of a coordinate vector; complex vectors are `(re, im)` pairs.
pub fn vector_norm(v: &[f64], norm: NormGauge, complex: bool) -> f64 {
    match norm {
        NormGauge::MaxEntry => {
            if complex {
                v.chunks(2).map(|c| c[0].hypot(c[1])).fold(0.0, f64::max)
            } else {
                v.iter().map(|x| x.abs()).fold(0.0, f64::max)
            }
        }
        NormGauge::Frobenius | NormGauge::Operator => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
    }
}

/// Every catalog entry with its default parameters.
pub fn catalog() -> Vec<Space> {
    [
        "real-plane-affine",
        "complex-plane-affine",
        "ternary-forms-sig(2,1)-det1",
        "determinant-variety-n3-k1",
        "complex-structures-r4",
    ]
    .iter()
    .map(|k| Space::from_key(k).expect("catalog keys parse"))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn keys_round_trip() {
        for s in catalog() {
            assert_eq!(Space::from_key(&s.key()).unwrap().kind, s.kind);
        }
    }

    #[test]
    fn signature_sign_is_checked() {
        assert!(Space::new(SpaceKind::TernaryForms { positive: 2, negative: 1, det: 1.0 }).is_err());
        let s = Space::from_key("ternary-forms-sig(2,1)-det1").unwrap();
        assert_eq!(s.kind, SpaceKind::TernaryForms { positive: 2, negative: 1, det: -1.0 });
    }

    #[test]
    fn samples_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for s in catalog() {
            for _ in 0..20 {
                let x = s.random_point(Window::new(-0.4, 0.4).unwrap(), &mut rng);
                assert!(s.contains(&x), "{}", s.key());
            }
        }
    }
}
