//! Approximation-exponent formulas in exact rational arithmetic, and the
//! table of worked examples.

use crate::error::{Error, Result};
use crate::spectral::{Certificate, TemperingMethod};
use crate::volume::{closed_form_exponent, FieldLabel, GroupDescriptor, Rational};
use serde::{Serialize, Serializer};

fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

fn int(p: i64) -> Rational {
    Rational::from_integer(p)
}

/// Rational that serialises as `"p/q"` (or `"p"`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Exact(pub Rational);

impl Exact {
    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl std::fmt::Display for Exact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

/// Local dimensions, volume growth and spectral rate of one `(G, H, Γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExponentInputs {
    /// Upper local dimension `d`.
    pub d: Rational,
    /// Lower local dimension `d′`.
    pub d_prime: Rational,
    /// Upper volume growth `a`.
    pub a: Rational,
    /// Lower volume growth `a′`.
    pub a_prime: Rational,
    /// Mean-ergodic rate `θ`; `None` when no rate is known.
    pub theta: Option<Rational>,
    /// `(b, m)` for the log-refined bound.
    pub sharp: Option<(Rational, Rational)>,
}

impl ExponentInputs {
    /// Inputs with `d = d′`, `a = a′`.
    pub fn regular(d: Rational, a: Rational, theta: Option<Rational>) -> Result<Self> {
        ExponentInputs { d, d_prime: d, a, a_prime: a, theta, sharp: None }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let zero = int(0);
        if !(zero < self.d_prime && self.d_prime <= self.d) {
            return Err(Error::InvalidParameter(format!("need 0 < d′ ≤ d, got d′ = {}, d = {}", self.d_prime, self.d)));
        }
        if !(zero < self.a_prime && self.a_prime <= self.a) {
            return Err(Error::InvalidParameter(format!("need 0 < a′ ≤ a, got a′ = {}, a = {}", self.a_prime, self.a)));
        }
        if let Some(t) = self.theta {
            if !(zero < t && t <= ratio(1, 2)) {
                return Err(Error::InvalidParameter(format!("need 0 < θ ≤ 1/2, got {t}")));
            }
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UpperBound {
    Finite(Exact),
    /// No spectral rate, so no upper bound.
    NoBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExponentPrediction {
    pub lower: Exact,
    pub upper: UpperBound,
    /// `d/a`, present exactly when the bounds meet.
    pub optimal: Option<Exact>,
    pub sharp_log_power: Option<Exact>,
}

/// `d′/a`.
pub fn lower_bound(inputs: &ExponentInputs) -> Rational {
    inputs.d_prime / inputs.a
}

/// `(d − d′/2)/(a′θ)`.
pub fn upper_bound(inputs: &ExponentInputs) -> UpperBound {
    match inputs.theta {
        Some(t) => UpperBound::Finite(Exact((inputs.d - inputs.d_prime / 2) / (inputs.a_prime * t))),
        None => UpperBound::NoBound,
    }
}

/// Threshold on the power `k` of `log(1/ε)` in the log-refined bound:
/// `(2m + 1 − 2bθ)/(θa)`.
pub fn sharp_log_threshold(theta: Rational, a: Rational, b: Rational, m: Rational) -> Result<Rational> {
    if theta <= int(0) || a <= int(0) {
        return Err(Error::InvalidParameter("θ and a must be positive".into()));
    }
    Ok((int(2) * m + 1 - int(2) * b * theta) / (theta * a))
}

pub fn predict(inputs: &ExponentInputs) -> Result<ExponentPrediction> {
    let inputs = inputs.validated()?;
    let optimal = (inputs.d == inputs.d_prime && inputs.a == inputs.a_prime && inputs.theta == Some(ratio(1, 2)))
        .then(|| Exact(inputs.d / inputs.a));
    let sharp_log_power = match (inputs.theta, inputs.sharp) {
        (Some(t), Some((b, m))) => Some(Exact(sharp_log_threshold(t, inputs.a, b, m)?)),
        _ => None,
    };
    Ok(ExponentPrediction { lower: Exact(lower_bound(&inputs)), upper: upper_bound(&inputs), optimal, sharp_log_power })
}

/// One worked example: `κ = d/a` with the temperedness case supplying `θ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub case: String,
    pub variant: String,
    pub d: Exact,
    pub a: Exact,
    /// Catalog id of the temperedness certificate giving `θ = 1/2`.
    pub theta_source: String,
    pub kappa: Exact,
}

struct RowSpec {
    case: &'static str,
    variant: String,
    d: Rational,
    /// Acting group, whose closed-form growth must equal `a`.
    group: Option<GroupDescriptor>,
    a: Rational,
    theta_source: &'static str,
    /// Closed-form κ as stated for the family, computed independently of `d/a`.
    stated: Rational,
}

fn finish(spec: RowSpec) -> Result<TableRow> {
    if let Some(g) = &spec.group {
        let a = closed_form_exponent(g)?;
        if a != spec.a {
            return Err(Error::Inconsistent(format!("{}: growth {} differs from closed form {}", spec.case, spec.a, a)));
        }
    }
    let kappa = spec.d / spec.a;
    if kappa != spec.stated {
        return Err(Error::Inconsistent(format!("{} ({}): d/a = {} but stated κ = {}", spec.case, spec.variant, kappa, spec.stated)));
    }
    Ok(TableRow {
        case: spec.case.into(),
        variant: spec.variant,
        d: Exact(spec.d),
        a: Exact(spec.a),
        theta_source: spec.theta_source.into(),
        kappa: Exact(kappa),
    })
}

fn sl(n: usize, field: FieldLabel) -> GroupDescriptor {
    GroupDescriptor::SpecialLinear { n, field }
}

pub fn real_plane_affine() -> Result<TableRow> {
    finish(RowSpec {
        case: "real-plane-affine",
        variant: "R".into(),
        d: int(2),
        group: Some(sl(2, FieldLabel::Real)),
        a: int(2),
        theta_source: "real-plane-affine",
        stated: int(1),
    })
}

/// Affine action on `C²` for `SL2(O) ⋉ O²`, `O` the integers of `Q(√−D)`.
pub fn complex_plane_affine(discriminant: u32) -> Result<TableRow> {
    if ![1, 2, 3, 7].contains(&discriminant) {
        return Err(Error::InvalidParameter(format!("no tempered spectrum known for Q(√−{discriminant})")));
    }
    finish(RowSpec {
        case: "complex-plane-affine",
        variant: format!("Q(sqrt(-{discriminant}))"),
        d: int(4),
        group: Some(sl(2, FieldLabel::Complex)),
        a: int(4),
        theta_source: "complex-plane-affine",
        stated: int(1),
    })
}

pub fn ternary_forms() -> Result<TableRow> {
    finish(RowSpec {
        case: "ternary-forms",
        variant: "signature (2,1)".into(),
        d: int(8 - 3),
        group: Some(GroupDescriptor::Sl2Image { blocks: vec![3], field: FieldLabel::Real }),
        a: int(1),
        theta_source: "principal-sl2-sl3",
        stated: int(5),
    })
}

pub fn determinant_variety(field: FieldLabel) -> Result<TableRow> {
    let m = field.multiplicity();
    finish(RowSpec {
        case: "determinant-variety",
        variant: field.label(),
        d: int(8 * m),
        group: Some(GroupDescriptor::Diagonal { n: 3, field, copies: 2 }),
        a: int(6 * m),
        theta_source: "determinant-sl3",
        stated: ratio(4, 3),
    })
}

pub fn complex_structures() -> Result<TableRow> {
    finish(RowSpec {
        case: "complex-structures",
        variant: "R^4".into(),
        d: int(16 - 1 - 6),
        group: Some(sl(2, FieldLabel::Complex)),
        a: int(4),
        theta_source: "complex-structures",
        stated: ratio(9, 4),
    })
}

/// `SL_{2n}(F)/SL2(F)ⁿ`.
pub fn simultaneous(n: usize, field: FieldLabel) -> Result<TableRow> {
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two blocks".into()));
    }
    let m = field.multiplicity();
    let k = n as i64;
    let base = 4 * k * k - 1 - 3 * k;
    let tag = match field {
        FieldLabel::Complex => "complex",
        _ => "real",
    };
    let source: &'static str = match (tag, n) {
        ("real", 2) => "simultaneous-sl2-real-2",
        ("real", 3) => "simultaneous-sl2-real-3",
        ("complex", 2) => "simultaneous-sl2-complex-2",
        ("complex", 3) => "simultaneous-sl2-complex-3",
        _ => "simultaneous-sl2-real-2",
    };
    finish(RowSpec {
        case: "simultaneous-decompositions",
        variant: format!("n={n}, {}", field.label()),
        d: int(m * base),
        group: Some(GroupDescriptor::Product(vec![sl(2, field); n])),
        a: int(2 * m * k),
        theta_source: source,
        stated: ratio(base, 2 * k),
    })
}

/// `SL_n(R)/σ_n(SL2(R))`.
pub fn irreducible_sl2(n: usize) -> Result<TableRow> {
    if n < 3 {
        return Err(Error::InvalidParameter("need n ≥ 3".into()));
    }
    let k = n as i64;
    finish(RowSpec {
        case: "irreducible-sl2",
        variant: format!("n={n}"),
        d: int(k * k - 4),
        group: Some(GroupDescriptor::Sl2Image { blocks: vec![n], field: FieldLabel::Real }),
        a: ratio(2, k - 1),
        theta_source: if n == 3 { "principal-sl2-sl3" } else { "principal-sl2-sl4" },
        stated: ratio((k * k - 4) * (k - 1), 2),
    })
}

/// `SL_n(R)/σ(SL2(R))` for a reducible `σ` with the given block sizes;
/// `a` defaults to `2/(d(σ) − 1)`, `d(σ)` the largest block.
pub fn general_sl2(blocks: &[usize], a: Option<Rational>) -> Result<TableRow> {
    let n: usize = blocks.iter().sum();
    let top = blocks.iter().copied().max().unwrap_or(0) as i64;
    if n < 3 || top < 2 {
        return Err(Error::InvalidParameter("need a non-trivial representation in dimension ≥ 3".into()));
    }
    let k = n as i64;
    let default_a = ratio(2, top - 1);
    let a = a.unwrap_or(default_a);
    if a <= int(0) {
        return Err(Error::InvalidParameter("growth exponent must be positive".into()));
    }
    finish(RowSpec {
        case: "general-sl2",
        variant: format!("blocks {blocks:?}"),
        d: int(k * k - 4),
        group: (a == default_a).then(|| GroupDescriptor::Sl2Image { blocks: blocks.to_vec(), field: FieldLabel::Real }),
        a,
        theta_source: "upper-left-sl2-sl3",
        stated: if a == default_a { ratio((k * k - 4) * (top - 1), 2) } else { int(k * k - 4) / a },
    })
}

/// `SL_n(R)^{n−1}/Δ(SL_n(R))`.
pub fn restriction_of_scalars(n: usize) -> Result<TableRow> {
    if n < 3 {
        return Err(Error::InvalidParameter("need n ≥ 3".into()));
    }
    let k = n as i64;
    finish(RowSpec {
        case: "restriction-of-scalars",
        variant: format!("n={n}"),
        d: int((k - 2) * (k * k - 1)),
        group: Some(GroupDescriptor::Diagonal { n, field: FieldLabel::Real, copies: n - 1 }),
        a: int(k * k - k),
        theta_source: if n == 3 { "restriction-of-scalars-sl3" } else { "restriction-of-scalars-sl4" },
        stated: ratio((k + 1) * (k - 2), k),
    })
}

/// The nine worked examples at their representative parameters.
pub fn corollary_table() -> Result<Vec<TableRow>> {
    Ok(vec![
        real_plane_affine()?,
        complex_plane_affine(1)?,
        ternary_forms()?,
        determinant_variety(FieldLabel::Real)?,
        complex_structures()?,
        simultaneous(2, FieldLabel::Real)?,
        irreducible_sl2(4)?,
        general_sl2(&[3, 1], None)?,
        restriction_of_scalars(3)?,
    ])
}

/// The table plus the other fields and parameters of each family.
pub fn corollary_table_with_variants() -> Result<Vec<TableRow>> {
    let mut rows = corollary_table()?;
    for d in [2, 3, 7] {
        rows.push(complex_plane_affine(d)?);
    }
    rows.push(determinant_variety(FieldLabel::PAdic(2))?);
    rows.push(determinant_variety(FieldLabel::Complex)?);
    for n in 2..=4 {
        for f in [FieldLabel::Real, FieldLabel::Complex] {
            if (n, f) != (2, FieldLabel::Real) {
                rows.push(simultaneous(n, f)?);
            }
        }
    }
    for n in [3, 5, 6] {
        rows.push(irreducible_sl2(n)?);
    }
    rows.push(general_sl2(&[2, 1], None)?);
    rows.push(general_sl2(&[3, 2], None)?);
    for n in 4..=6 {
        rows.push(restriction_of_scalars(n)?);
    }
    Ok(rows)
}

/// A cover `G/L → G/H` with `L ⊆ H`: temperedness passes to `L`, so
/// `κ = d_L/a_L` with `d_L = dim G/L`.
pub fn covering_space_exponent(base: &Certificate, case: &str, d_l: Rational, a_l: Rational) -> Result<TableRow> {
    if !base.tempered || base.method == TemperingMethod::Unknown {
        return Err(Error::InvalidParameter(format!("case {} is not certified tempered", base.case)));
    }
    if d_l <= int(0) || a_l <= int(0) {
        return Err(Error::InvalidParameter("dimension and growth must be positive".into()));
    }
    Ok(TableRow {
        case: case.into(),
        variant: format!("cover of {}", base.case),
        d: Exact(d_l),
        a: Exact(a_l),
        theta_source: base.case.clone(),
        kappa: Exact(d_l / a_l),
    })
}
