//! Catalog of `(G, H, Γ)` cases and the ordered rule chain that decides
//! temperedness of `L²₀(Γ\G)` restricted to `H`.

use super::{howe_tan_integrability, integrability_criterion, n_of_p, p_plus, Inclusion};
use crate::error::{Error, Result};
use crate::volume::{FieldLabel, GroupDescriptor};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TemperingMethod {
    Kazhdan,
    TensorPower,
    Integrability,
    L1Tempered,
    DirectlyKnown,
    Unknown,
}

/// One catalogued case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperednessCase {
    pub id: String,
    pub description: String,
    pub inclusion: Inclusion,
    /// Lattice class, e.g. "any" or "irreducible".
    pub lattice: String,
    /// `H` is known to be `(G, K)`-tempered in `L¹`.
    pub l1_tempered: bool,
    /// Temperedness of the automorphic representation is known outright.
    pub directly_known: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub case: String,
    pub method: TemperingMethod,
    pub tempered: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<f64>>,
    pub provenance: String,
}

impl Certificate {
    fn tempered(case: &str, method: TemperingMethod, witness: Option<Vec<f64>>, provenance: String) -> Self {
        Certificate { case: case.into(), method, tempered: true, theta: Some(0.5), witness, provenance }
    }
}

fn case(id: &str, description: &str, inclusion: Inclusion, lattice: &str) -> TemperednessCase {
    TemperednessCase {
        id: id.into(),
        description: description.into(),
        inclusion,
        lattice: lattice.into(),
        l1_tempered: false,
        directly_known: false,
    }
}

/// Every catalogued case.
pub fn temperedness_catalog() -> Vec<TemperednessCase> {
    use FieldLabel::{Complex, Real};
    let mut cat = vec![
        case("real-plane-affine", "SL2(R) in SL2(R) ⋉ R^2", Inclusion::Affine { n: 2, field: Real }, "any"),
        case("complex-plane-affine", "SL2(C) in SL2(C) ⋉ C^2", Inclusion::Affine { n: 2, field: Complex }, "any"),
        case("determinant-sl3", "diagonal SL3(R) in SL3(R)^2", Inclusion::Diagonal { n: 3, field: Real, copies: 2 }, "irreducible"),
        case("complex-structures", "SL2(C) in SL4(R)", Inclusion::Realified { n: 2 }, "any"),
        case("upper-left-sl2-sl3", "upper-left SL2(R) in SL3(R)", Inclusion::Sl2Image { blocks: vec![2, 1], field: Real }, "any"),
    ];
    for n in 3..=6 {
        let mut c = case(
            &format!("principal-sl2-sl{n}"),
            &format!("irreducible SL2(R) in SL{n}(R)"),
            Inclusion::Sl2Image { blocks: vec![n], field: Real },
            "any",
        );
        c.l1_tempered = n >= 4;
        cat.push(c);
    }
    for copies in 2..=3 {
        for (field, tag) in [(Real, "real"), (Complex, "complex")] {
            cat.push(case(
                &format!("simultaneous-sl2-{tag}-{copies}"),
                &format!("SL2({})^{copies} block diagonal in SL{}({})", field.label(), 2 * copies, field.label()),
                Inclusion::BlockSl2 { copies, field },
                "any",
            ));
        }
    }
    for n in 3..=4 {
        cat.push(case(
            &format!("restriction-of-scalars-sl{n}"),
            &format!("diagonal SL{n}(R) in SL{n}(R)^{}", n - 1),
            Inclusion::Diagonal { n, field: Real, copies: n - 1 },
            "irreducible",
        ));
    }
    let mut gauss = case("gaussian-sl2", "SL2(Z[i]) in SL2(C)", Inclusion::Identity { n: 2, field: Complex }, "SL2(Z[i])");
    gauss.directly_known = true;
    cat.push(gauss);
    cat.push(case("generic-sl2", "generic lattice in SL2(R)", Inclusion::Identity { n: 2, field: Real }, "generic"));
    cat
}

fn kazhdan(c: &TemperednessCase) -> Option<Certificate> {
    let modules = c.inclusion.kazhdan_modules()?;
    Some(Certificate::tempered(
        &c.id,
        TemperingMethod::Kazhdan,
        None,
        format!("each SL2 factor normalises an abelian module without invariant vectors (dimensions {modules:?})"),
    ))
}

fn tensor_power(c: &TemperednessCase) -> Result<Option<Certificate>> {
    let Inclusion::Diagonal { n, field, copies } = c.inclusion else { return Ok(None) };
    if c.lattice != "irreducible" {
        return Ok(None);
    }
    let Some(p) = p_plus(&GroupDescriptor::SpecialLinear { n, field }) else { return Ok(None) };
    let needed = n_of_p(p)?;
    if copies < needed {
        return Ok(None);
    }
    let mut note = format!("p+(SL{n}) = {p}, n(p+) = {needed} ≤ {copies} copies");
    if n == 3 {
        note.push_str("; SL3 is sometimes quoted with n = 4, read here as p+ = 4 so n = 2");
    }
    Ok(Some(Certificate::tempered(&c.id, TemperingMethod::TensorPower, None, note)))
}

fn integrability(c: &TemperednessCase) -> Result<(Option<Certificate>, Option<Vec<f64>>)> {
    if matches!(c.inclusion, Inclusion::Affine { .. }) {
        return Ok((None, None));
    }
    let Some(p) = p_plus(&c.inclusion.ambient_group()) else { return Ok((None, None)) };
    let report = integrability_criterion(&c.inclusion, p)?;
    if report.integrable {
        let note = format!("exponent functional at p = {p} has maximum {:.4} < 0 on the chamber", report.max_exponent);
        return Ok((Some(Certificate::tempered(&c.id, TemperingMethod::Integrability, Some(report.witness), note)), None));
    }
    if let Some(ht) = howe_tan_integrability(&c.inclusion)? {
        if ht.integrable {
            let note = format!(
                "strongly orthogonal Ξ-product bound: exponent maximum {:.4} ≤ 0, so L^(2+η) for every η > 0",
                ht.max_exponent
            );
            return Ok((Some(Certificate::tempered(&c.id, TemperingMethod::Integrability, Some(ht.witness), note)), None));
        }
    }
    Ok((None, Some(report.witness)))
}

/// Run the rule chain Kazhdan, tensor power, integrability, `L¹` flag,
/// directly known; the first success gives `θ = 1/2`.
pub fn certify_temperedness(c: &TemperednessCase) -> Result<Certificate> {
    if let Some(cert) = kazhdan(c) {
        return Ok(cert);
    }
    if let Some(cert) = tensor_power(c)? {
        return Ok(cert);
    }
    let (cert, failed_witness) = integrability(c)?;
    if let Some(cert) = cert {
        return Ok(cert);
    }
    if c.l1_tempered {
        return Ok(Certificate::tempered(&c.id, TemperingMethod::L1Tempered, None, "catalog: (G,K)-tempered in L1".into()));
    }
    if c.directly_known {
        return Ok(Certificate::tempered(
            &c.id,
            TemperingMethod::DirectlyKnown,
            None,
            "catalog: no exceptional eigenvalues".into(),
        ));
    }
    Ok(Certificate {
        case: c.id.clone(),
        method: TemperingMethod::Unknown,
        tempered: false,
        theta: None,
        witness: failed_witness,
        provenance: "no rule applies".into(),
    })
}

pub fn certify_by_id(id: &str) -> Result<Certificate> {
    let c = temperedness_catalog()
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownKey { kind: "temperedness case", key: id.into() })?;
    certify_temperedness(&c)
}
