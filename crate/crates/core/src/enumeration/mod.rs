//! Enumeration of lattice elements in norm balls `{γ ∈ Γ : ‖γ‖ ≤ T}`.
//!
//! Balls for the Frobenius and operator gauges are obtained by filtering the
//! max-entry ball of the same radius, which contains them.

pub mod cache;
pub mod gauss;
pub mod sl2;
pub mod sl3;

use crate::algebra::{ExactAffine, ExactMatrix, FieldTag, GaussianInt, LatticeElement, NormGauge};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::ControlFlow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LatticeId {
    /// SL2(Z) acting linearly.
    Sl2Z,
    /// SL2(Z) ⋉ Z².
    Sl2ZAffine,
    /// SL2(Z[i]) ⋉ Z[i]².
    Sl2GaussAffine,
    /// SL3(Z).
    Sl3Z,
}

impl LatticeId {
    pub const ALL: [LatticeId; 4] =
        [LatticeId::Sl2Z, LatticeId::Sl2ZAffine, LatticeId::Sl2GaussAffine, LatticeId::Sl3Z];

    pub fn key(self) -> &'static str {
        match self {
            LatticeId::Sl2Z => "sl2z",
            LatticeId::Sl2ZAffine => "sl2z-affine",
            LatticeId::Sl2GaussAffine => "sl2zi-affine",
            LatticeId::Sl3Z => "sl3z",
        }
    }

    pub fn from_key(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.key() == s)
            .ok_or_else(|| Error::UnknownKey { kind: "lattice", key: s.to_string() })
    }

    pub fn code(self) -> u8 {
        Self::ALL.iter().position(|&l| l == self).unwrap() as u8
    }

    pub fn from_code(c: u8) -> Result<Self> {
        Self::ALL
            .get(c as usize)
            .copied()
            .ok_or_else(|| Error::UnknownKey { kind: "lattice code", key: c.to_string() })
    }

    /// Size of the linear part.
    pub fn linear_dim(self) -> usize {
        match self {
            LatticeId::Sl3Z => 3,
            _ => 2,
        }
    }

    pub fn field(self) -> FieldTag {
        match self {
            LatticeId::Sl2GaussAffine => FieldTag::Complex,
            _ => FieldTag::Real,
        }
    }

    pub fn is_affine(self) -> bool {
        matches!(self, LatticeId::Sl2ZAffine | LatticeId::Sl2GaussAffine)
    }

    /// Integers per element in the flat encoding.
    pub fn flat_len(self) -> usize {
        let n = self.linear_dim();
        let per = if self.field() == FieldTag::Complex { 2 } else { 1 };
        let entries = if self.is_affine() { n * n + n } else { n * n };
        entries * per
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub id: LatticeId,
    pub gauge: NormGauge,
}

impl LatticeSpec {
    pub fn new(id: LatticeId, gauge: NormGauge) -> Self {
        LatticeSpec { id, gauge }
    }

    /// The gauge norm of an element (affine elements through their embedding).
    pub fn norm_of(&self, g: &LatticeElement) -> f64 {
        exact_norm(g, self.gauge)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum OverflowPolicy {
    #[default]
    Error,
    Truncate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationBudget {
    pub max_elements: Option<usize>,
    pub on_overflow: OverflowPolicy,
}

impl EnumerationBudget {
    pub const UNLIMITED: EnumerationBudget =
        EnumerationBudget { max_elements: None, on_overflow: OverflowPolicy::Error };

    pub fn capped(max_elements: usize, on_overflow: OverflowPolicy) -> Self {
        EnumerationBudget { max_elements: Some(max_elements), on_overflow }
    }
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self::UNLIMITED
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    pub elements: Vec<LatticeElement>,
    /// Set when the budget cut the stream short under `OverflowPolicy::Truncate`.
    pub truncated: bool,
}

/// Exact norm for the max-entry and Frobenius gauges, floating for the
/// operator gauge.
pub fn exact_norm(g: &LatticeElement, gauge: NormGauge) -> f64 {
    let (lin, tr): (&[GaussianInt], &[GaussianInt]) = match g {
        LatticeElement::Linear(m) => (m.entries(), &[]),
        LatticeElement::Affine(a) => (a.linear.entries(), &a.translation),
    };
    match gauge {
        NormGauge::MaxEntry => {
            let m = lin.iter().chain(tr).map(|z| z.norm()).max().unwrap_or(0);
            let m = if g_is_affine(g) { m.max(1) } else { m };
            (m as f64).sqrt()
        }
        NormGauge::Frobenius => {
            let s: i64 = lin.iter().chain(tr).map(|z| z.norm()).sum::<i64>() + i64::from(g_is_affine(g));
            (s as f64).sqrt()
        }
        NormGauge::Operator => g.to_group_element().norm(NormGauge::Operator),
    }
}

fn g_is_affine(g: &LatticeElement) -> bool {
    matches!(g, LatticeElement::Affine(_))
}

fn linear_matrix(id: LatticeId, raw: &[GaussianInt]) -> ExactMatrix {
    let n = id.linear_dim();
    ExactMatrix::new(n, id.field(), raw.to_vec()).expect("enumerated entries have the right shape")
}

/// Visit the linear parts of `id` whose own gauge norm is `≤ radius`.
pub fn visit_linear_parts<F>(id: LatticeId, gauge: NormGauge, radius: f64, mut f: F) -> ControlFlow<()>
where
    F: FnMut(ExactMatrix) -> ControlFlow<()>,
{
    if !(radius >= 1.0) {
        return ControlFlow::Continue(());
    }
    let keep = |m: &ExactMatrix| -> bool {
        gauge == NormGauge::MaxEntry || exact_norm(&LatticeElement::Linear(m.clone()), gauge) <= radius
    };
    match id {
        LatticeId::Sl2Z | LatticeId::Sl2ZAffine => sl2::visit(radius.floor() as i64, |e| {
            let m = linear_matrix(id, &e.map(GaussianInt::int));
            if keep(&m) {
                f(m)?;
            }
            ControlFlow::Continue(())
        }),
        LatticeId::Sl2GaussAffine => gauss::visit(radius, |e| {
            let m = linear_matrix(id, &e);
            if keep(&m) {
                f(m)?;
            }
            ControlFlow::Continue(())
        }),
        LatticeId::Sl3Z => sl3::visit(radius.floor() as i64, |e| {
            let m = linear_matrix(id, &e.map(GaussianInt::int));
            if keep(&m) {
                f(m)?;
            }
            ControlFlow::Continue(())
        }),
    }
}

/// Translation vectors with every coordinate in the max-entry ball of `radius`.
fn translation_box(field: FieldTag, n: usize, radius: f64) -> Vec<Vec<GaussianInt>> {
    let coords: Vec<GaussianInt> = match field {
        FieldTag::Real => {
            let r = radius.floor() as i64;
            (-r..=r).map(GaussianInt::int).collect()
        }
        FieldTag::Complex => gauss::disc(radius),
    };
    let mut out: Vec<Vec<GaussianInt>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * coords.len());
        for prefix in &out {
            for c in &coords {
                let mut v = prefix.clone();
                v.push(*c);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Visit `{γ ∈ Γ : ‖γ‖ ≤ radius}` in lexicographic order of the flat encoding.
pub fn visit<F>(spec: LatticeSpec, radius: f64, mut f: F) -> ControlFlow<()>
where
    F: FnMut(LatticeElement) -> ControlFlow<()>,
{
    if !spec.id.is_affine() {
        return visit_linear_parts(spec.id, spec.gauge, radius, |m| f(LatticeElement::Linear(m)));
    }
    if !(radius >= 1.0) {
        return ControlFlow::Continue(());
    }
    let n = spec.id.linear_dim();
    let translations = translation_box(spec.id.field(), n, radius);
    // every gauge dominates max-entry, so the max-entry ball is a superset
    visit_linear_parts(spec.id, NormGauge::MaxEntry, radius, |m| {
        for t in &translations {
            let g = LatticeElement::Affine(ExactAffine { linear: m.clone(), translation: t.clone() });
            if spec.gauge == NormGauge::MaxEntry || exact_norm(&g, spec.gauge) <= radius {
                f(g)?;
            }
        }
        ControlFlow::Continue(())
    })
}

/// Materialise the ball, honouring the budget.
pub fn enumerate(spec: LatticeSpec, radius: f64, budget: EnumerationBudget) -> Result<Enumeration> {
    if radius.is_nan() {
        return Err(Error::InvalidParameter("radius is NaN".into()));
    }
    let mut elements = Vec::new();
    let mut overflow = false;
    let _ = visit(spec, radius, |g| {
        if budget.max_elements.is_some_and(|cap| elements.len() >= cap) {
            overflow = true;
            return ControlFlow::Break(());
        }
        elements.push(g);
        ControlFlow::Continue(())
    });
    if overflow {
        match budget.on_overflow {
            OverflowPolicy::Error => return Err(Error::BudgetExceeded(budget.max_elements.unwrap())),
            OverflowPolicy::Truncate => return Ok(Enumeration { elements, truncated: true }),
        }
    }
    Ok(Enumeration { elements, truncated: false })
}

/// Linear parts of an affine lattice (or the lattice itself when linear)
/// with gauge norm `≤ radius`.
pub fn enumerate_affine_linear_parts(
    spec: LatticeSpec,
    radius: f64,
    budget: EnumerationBudget,
) -> Result<Enumeration> {
    let mut elements = Vec::new();
    let mut overflow = false;
    let _ = visit_linear_parts(spec.id, spec.gauge, radius, |m| {
        if budget.max_elements.is_some_and(|cap| elements.len() >= cap) {
            overflow = true;
            return ControlFlow::Break(());
        }
        elements.push(LatticeElement::Linear(m));
        ControlFlow::Continue(())
    });
    if overflow {
        match budget.on_overflow {
            OverflowPolicy::Error => return Err(Error::BudgetExceeded(budget.max_elements.unwrap())),
            OverflowPolicy::Truncate => return Ok(Enumeration { elements, truncated: true }),
        }
    }
    Ok(Enumeration { elements, truncated: false })
}

/// Number of linear parts with gauge norm `≤ radius`.
pub fn count_linear_parts(id: LatticeId, gauge: NormGauge, radius: f64) -> u64 {
    if !(radius >= 1.0) {
        return 0;
    }
    if gauge == NormGauge::MaxEntry {
        return match id {
            LatticeId::Sl2Z | LatticeId::Sl2ZAffine => sl2::count(radius.floor() as i64),
            LatticeId::Sl2GaussAffine => gauss::count(radius),
            LatticeId::Sl3Z => sl3::count(radius.floor() as i64),
        };
    }
    let mut n = 0u64;
    let _ = visit_linear_parts(id, gauge, radius, |_| {
        n += 1;
        ControlFlow::Continue(())
    });
    n
}

/// `|{γ ∈ Γ : ‖γ‖ ≤ radius}|`.
pub fn count(spec: LatticeSpec, radius: f64) -> u64 {
    if !spec.id.is_affine() {
        return count_linear_parts(spec.id, spec.gauge, radius);
    }
    if spec.gauge == NormGauge::MaxEntry {
        if !(radius >= 1.0) {
            return 0;
        }
        let n = spec.id.linear_dim() as u32;
        let per_coord = match spec.id.field() {
            FieldTag::Real => 2 * radius.floor() as u64 + 1,
            FieldTag::Complex => gauss::disc(radius).len() as u64,
        };
        return count_linear_parts(spec.id, NormGauge::MaxEntry, radius) * per_coord.pow(n);
    }
    let mut n = 0u64;
    let _ = visit(spec, radius, |_| {
        n += 1;
        ControlFlow::Continue(())
    });
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ball_sizes() {
        let spec = LatticeSpec::new(LatticeId::Sl2Z, NormGauge::MaxEntry);
        assert_eq!(count(spec, 0.5), 0);
        // max entry 1: 20 elements of SL2(Z)
        assert_eq!(count(spec, 1.0), 20);
        let e = enumerate(spec, 1.0, EnumerationBudget::UNLIMITED).unwrap();
        assert_eq!(e.elements.len(), 20);
    }

    #[test]
    fn keys_round_trip() {
        for id in LatticeId::ALL {
            assert_eq!(LatticeId::from_key(id.key()).unwrap(), id);
            assert_eq!(LatticeId::from_code(id.code()).unwrap(), id);
        }
    }
}
