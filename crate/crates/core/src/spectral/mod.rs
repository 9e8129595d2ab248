//! Root data, the integrability criterion for restrictions of
//! representations, Ξ and Howe–Tan bounds, and temperedness certificates.

mod certify;
mod xi;

pub use certify::{certify_by_id, certify_temperedness, temperedness_catalog, Certificate, TemperednessCase, TemperingMethod};
pub use xi::{howe_tan_psi, truncated_xi_moment, xi2_numeric};

use crate::error::{Error, Result};
use crate::volume::{FieldLabel, GroupDescriptor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One type-A factor `SL_n(F)`: `n` ambient coordinates summing to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeA {
    pub n: usize,
    pub field: FieldLabel,
}

/// Root datum of a product of type-A groups, in concatenated ambient
/// coordinates of the Cartan subalgebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootDatum {
    pub factors: Vec<TypeA>,
}

/// A linear functional on Cartan coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterFunctional {
    pub coeffs: Vec<f64>,
}

impl CharacterFunctional {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

impl RootDatum {
    pub fn special_linear(n: usize, field: FieldLabel) -> Self {
        RootDatum { factors: vec![TypeA { n, field }] }
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.n).sum()
    }

    /// Rank: dimension of the Cartan subalgebra.
    pub fn rank(&self) -> usize {
        self.factors.iter().map(|f| f.n - 1).sum()
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.factors.len());
        let mut acc = 0;
        for f in &self.factors {
            off.push(acc);
            acc += f.n;
        }
        off
    }

    /// Half-sum of positive roots with multiplicity.
    pub fn rho(&self) -> CharacterFunctional {
        let mut coeffs = Vec::with_capacity(self.dim());
        for f in &self.factors {
            let m = f.field.multiplicity() as f64;
            for i in 1..=f.n {
                coeffs.push(m * ((f.n as f64 + 1.0) / 2.0 - i as f64));
            }
        }
        CharacterFunctional { coeffs }
    }

    /// Weyl-group representative in the closed positive chamber: each
    /// factor's block sorted in decreasing order.
    pub fn dominant_projection(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let mut out = x.to_vec();
        for (f, off) in self.factors.iter().zip(self.offsets()) {
            out[off..off + f.n].sort_by(|a, b| b.total_cmp(a));
        }
        Ok(out)
    }

    /// Extreme rays of the positive chamber: fundamental coweights per factor.
    pub fn extreme_rays(&self) -> Vec<Vec<f64>> {
        let mut rays = Vec::new();
        for (f, off) in self.factors.iter().zip(self.offsets()) {
            for k in 1..f.n {
                let mut v = vec![0.0; self.dim()];
                for i in 0..f.n {
                    let base = if i < k { 1.0 } else { 0.0 };
                    v[off + i] = base - k as f64 / f.n as f64;
                }
                rays.push(v);
            }
        }
        rays
    }
}

/// `n(p)`: least integer `≥ p/2`.
pub fn n_of_p(p: f64) -> Result<usize> {
    if !(p >= 2.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("integrability exponent must be ≥ 2, got {p}")));
    }
    Ok((p / 2.0 - 1e-12).ceil().max(1.0) as usize)
}

/// `p⁺(G)`, uniform integrability exponent of non-trivial irreducible
/// representations, known here for `SL_n(F)` with `n ≥ 3`.
pub fn p_plus(group: &GroupDescriptor) -> Option<f64> {
    match group {
        GroupDescriptor::SpecialLinear { n, .. } if *n >= 3 => Some(2.0 * (*n as f64 - 1.0)),
        _ => None,
    }
}

/// How `H` sits in `G`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inclusion {
    /// `H = G = SL_n(F)`.
    Identity { n: usize, field: FieldLabel },
    /// `SL2(F)` acting on `F^n` with irreducible blocks of the given sizes.
    Sl2Image { blocks: Vec<usize>, field: FieldLabel },
    /// `Δ(SL_n(F)) ⊂ SL_n(F)^copies`.
    Diagonal { n: usize, field: FieldLabel, copies: usize },
    /// `SL_n(C) ⊂ SL_{2n}(R)` by restriction of scalars.
    Realified { n: usize },
    /// `SL2(F)^copies` block diagonal in `SL_{2 copies}(F)`.
    BlockSl2 { copies: usize, field: FieldLabel },
    /// `H = SL_n(F)` inside `SL_n(F) ⋉ F^n`.
    Affine { n: usize, field: FieldLabel },
}

impl Inclusion {
    pub fn subgroup_datum(&self) -> RootDatum {
        match self {
            Inclusion::Identity { n, field } | Inclusion::Diagonal { n, field, .. } | Inclusion::Affine { n, field } => {
                RootDatum::special_linear(*n, *field)
            }
            Inclusion::Sl2Image { field, .. } => RootDatum::special_linear(2, *field),
            Inclusion::Realified { n } => RootDatum::special_linear(*n, FieldLabel::Complex),
            Inclusion::BlockSl2 { copies, field } => {
                RootDatum { factors: vec![TypeA { n: 2, field: *field }; *copies] }
            }
        }
    }

    /// Root datum of the semisimple ambient group (the Levi factor for affine
    /// groups).
    pub fn ambient_datum(&self) -> RootDatum {
        match self {
            Inclusion::Identity { n, field } | Inclusion::Affine { n, field } => RootDatum::special_linear(*n, *field),
            Inclusion::Sl2Image { blocks, field } => RootDatum::special_linear(blocks.iter().sum(), *field),
            Inclusion::Diagonal { n, field, copies } => RootDatum { factors: vec![TypeA { n: *n, field: *field }; *copies] },
            Inclusion::Realified { n } => RootDatum::special_linear(2 * n, FieldLabel::Real),
            Inclusion::BlockSl2 { copies, field } => RootDatum::special_linear(2 * copies, *field),
        }
    }

    pub fn ambient_group(&self) -> GroupDescriptor {
        match self {
            Inclusion::Identity { n, field } | Inclusion::Affine { n, field } => {
                GroupDescriptor::SpecialLinear { n: *n, field: *field }
            }
            Inclusion::Sl2Image { blocks, field } => {
                GroupDescriptor::SpecialLinear { n: blocks.iter().sum(), field: *field }
            }
            Inclusion::Diagonal { n, field, copies } => {
                GroupDescriptor::Product(vec![GroupDescriptor::SpecialLinear { n: *n, field: *field }; *copies])
            }
            Inclusion::Realified { n } => GroupDescriptor::SpecialLinear { n: 2 * n, field: FieldLabel::Real },
            Inclusion::BlockSl2 { copies, field } => GroupDescriptor::SpecialLinear { n: 2 * copies, field: *field },
        }
    }

    pub fn subgroup(&self) -> GroupDescriptor {
        match self {
            Inclusion::Identity { n, field } | Inclusion::Affine { n, field } => {
                GroupDescriptor::SpecialLinear { n: *n, field: *field }
            }
            Inclusion::Sl2Image { blocks, field } => GroupDescriptor::Sl2Image { blocks: blocks.clone(), field: *field },
            Inclusion::Diagonal { n, field, copies } => GroupDescriptor::Diagonal { n: *n, field: *field, copies: *copies },
            Inclusion::Realified { n } => GroupDescriptor::SpecialLinear { n: *n, field: FieldLabel::Complex },
            Inclusion::BlockSl2 { copies, field } => {
                GroupDescriptor::Product(vec![GroupDescriptor::SpecialLinear { n: 2, field: *field }; *copies])
            }
        }
    }

    /// The linear map `ι` from subgroup Cartan coordinates to ambient ones.
    pub fn embed(&self, x: &[f64]) -> Result<Vec<f64>> {
        let h = self.subgroup_datum();
        if x.len() != h.dim() {
            return Err(Error::DimensionMismatch { expected: h.dim(), got: x.len() });
        }
        Ok(match self {
            Inclusion::Identity { .. } | Inclusion::Affine { .. } | Inclusion::BlockSl2 { .. } => x.to_vec(),
            Inclusion::Diagonal { copies, .. } => x.repeat(*copies),
            Inclusion::Realified { .. } => x.iter().flat_map(|v| [*v, *v]).collect(),
            Inclusion::Sl2Image { blocks, .. } => {
                let s = (x[0] - x[1]) / 2.0;
                let mut out = Vec::new();
                for &k in blocks {
                    for i in 0..k {
                        out.push((k as f64 - 1.0 - 2.0 * i as f64) * s);
                    }
                }
                out
            }
        })
    }

    /// Irreducible abelian modules of dimension ≥ 2 normalised by every SL2
    /// factor, as `(factor, module dimension)`; `None` unless each factor has one.
    pub fn kazhdan_modules(&self) -> Option<Vec<usize>> {
        match self {
            Inclusion::Affine { n: 2, .. } => Some(vec![2]),
            Inclusion::Sl2Image { blocks, .. } => {
                let top = *blocks.iter().max()?;
                (blocks.len() >= 2 && top >= 2).then(|| {
                    let other = blocks.iter().copied().filter(|&b| b != top).max().unwrap_or(top);
                    vec![top + other - 1]
                })
            }
            Inclusion::BlockSl2 { copies, .. } if *copies >= 2 => Some(vec![2; *copies]),
            _ => None,
        }
    }
}

/// Outcome of the integrability check with the worst direction found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    pub integrable: bool,
    /// Largest value of the exponent functional found on unit chamber
    /// directions. Its sign is exact; its size is a lower estimate.
    pub max_exponent: f64,
    pub witness: Vec<f64>,
}

/// Candidate vertices of every Weyl cell of `ι(A_H⁺)`: chamber directions
/// where `rank - 1` independent constraints (chamber walls or coordinate
/// ties of `ι(x)`) are active.
fn cell_vertices(inc: &Inclusion) -> Result<Vec<Vec<f64>>> {
    let h = inc.subgroup_datum();
    let g = inc.ambient_datum();
    let rays = h.extreme_rays();
    let r = rays.len();
    let images: Vec<Vec<f64>> = rays.iter().map(|v| inc.embed(v)).collect::<Result<_>>()?;
    // constraints on chamber coefficients c ∈ R^r_{≥0}
    let mut constraints: Vec<Vec<f64>> = (0..r).map(|i| (0..r).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut off = 0;
    for f in &g.factors {
        for a in off..off + f.n {
            for b in a + 1..off + f.n {
                constraints.push(images.iter().map(|im| im[a] - im[b]).collect());
            }
        }
        off += f.n;
    }
    let mut verts: Vec<Vec<f64>> = Vec::new();
    let mut push = |c: Vec<f64>| {
        if c.iter().any(|v| *v < -1e-12) {
            return;
        }
        let x: Vec<f64> = (0..h.dim()).map(|k| c.iter().zip(&rays).map(|(ci, ray)| ci * ray[k]).sum()).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            verts.push(x.iter().map(|v| v / norm).collect());
        }
    };
    if r == 1 {
        push(vec![1.0]);
        return Ok(verts);
    }
    let m = constraints.len();
    let mut idx: Vec<usize> = (0..r - 1).collect();
    loop {
        let a = nalgebra::DMatrix::from_fn(r - 1, r, |i, j| constraints[idx[i]][j]);
        // kernel of an (r-1)×r matrix of full rank: signed maximal minors
        let null: Vec<f64> = (0..r)
            .map(|j| {
                let minor = a.clone().remove_column(j).determinant();
                if j % 2 == 0 { minor } else { -minor }
            })
            .collect();
        let size = null.iter().map(|v| v * v).sum::<f64>().sqrt();
        if size > 1e-10 {
            for sign in [1.0, -1.0] {
                let c: Vec<f64> = null.iter().map(|v| v * sign / size).collect();
                let feasible = constraints.iter().take(r).all(|row| row.iter().zip(&c).map(|(p, q)| p * q).sum::<f64>() >= -1e-12);
                if feasible {
                    push(c);
                }
            }
        }
        // next combination
        let mut i = r - 1;
        loop {
            if i == 0 {
                return Ok(verts);
            }
            i -= 1;
            if idx[i] < m - (r - 1 - i) {
                idx[i] += 1;
                for j in i + 1..r - 1 {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn max_over_chamber<F: Fn(&[f64]) -> Result<f64>>(inc: &Inclusion, phi: F) -> Result<(f64, Vec<f64>)> {
    let mut dirs = inc.subgroup_datum().extreme_rays();
    for d in dirs.iter_mut() {
        let n = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        d.iter_mut().for_each(|v| *v /= n);
    }
    dirs.extend(cell_vertices(inc)?);
    // redundant random directions inside the chamber
    let rays = inc.subgroup_datum().extreme_rays();
    let mut rng = ChaCha8Rng::seed_from_u64(SAFETY_NET_SEED);
    for _ in 0..SAFETY_NET_SAMPLES {
        let c: Vec<f64> = rays.iter().map(|_| rng.gen::<f64>()).collect();
        let mut x: Vec<f64> = (0..rays[0].len()).map(|k| c.iter().zip(&rays).map(|(ci, r)| ci * r[k]).sum()).collect();
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-12 {
            x.iter_mut().for_each(|v| *v /= n);
            dirs.push(x);
        }
    }
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for d in dirs {
        let v = phi(&d)?;
        if v > best.0 {
            best = (v, d);
        }
    }
    Ok(best)
}

const STRICT_TOL: f64 = 1e-9;
const SAFETY_NET_SAMPLES: usize = 512;
const SAFETY_NET_SEED: u64 = 0x5eed;

/// Integrability criterion for restricting an `L^{p+}` representation of `G`
/// to `H`: the functional
/// `φ(x) = -(2/n(p)) ρ_G(dom ι(x)) + 2 ρ_H(x)` must be strictly negative on
/// every nonzero direction of `A_H⁺`. Since `φ` is linear on each Weyl cell,
/// checking cell vertices is exact.
pub fn integrability_criterion(inc: &Inclusion, p: f64) -> Result<IntegrabilityReport> {
    let np = n_of_p(p)? as f64;
    let g = inc.ambient_datum();
    let h = inc.subgroup_datum();
    let (rho_g, rho_h) = (g.rho(), h.rho());
    let (max_exponent, witness) = max_over_chamber(inc, |x| {
        let dom = g.dominant_projection(&inc.embed(x)?)?;
        Ok(-(2.0 / np) * rho_g.eval(&dom) + 2.0 * rho_h.eval(x))
    })?;
    Ok(IntegrabilityReport { integrable: max_exponent < -STRICT_TOL, max_exponent, witness })
}

/// Integrability of the strongly orthogonal Howe–Tan bound
/// `∏_{i ≤ n/2} Ξ₂(t_i - t_{n+1-i})` for `G = SL_n(R)`: its `(2+η)`-th power
/// against the Cartan density of `H` is finite for every `η > 0` iff
/// `-Σ_i (t_i - t_{n+1-i})(dom ι x) + 2 ρ_H(x) ≤ 0` on the chamber.
pub fn howe_tan_integrability(inc: &Inclusion) -> Result<Option<IntegrabilityReport>> {
    let g = inc.ambient_datum();
    if g.factors.len() != 1 || g.factors[0].field != FieldLabel::Real || g.factors[0].n < 3 {
        return Ok(None);
    }
    let n = g.factors[0].n;
    let rho_h = inc.subgroup_datum().rho();
    let (max_exponent, witness) = max_over_chamber(inc, |x| {
        let dom = g.dominant_projection(&inc.embed(x)?)?;
        let spread: f64 = (0..n / 2).map(|i| dom[i] - dom[n - 1 - i]).sum();
        Ok(-spread + 2.0 * rho_h.eval(x))
    })?;
    Ok(Some(IntegrabilityReport { integrable: max_exponent <= STRICT_TOL, max_exponent, witness }))
}
