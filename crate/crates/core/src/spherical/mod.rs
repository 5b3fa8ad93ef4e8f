//! Spherical descriptors: structure data of a real spherical space together
//! with the derived compression cone, edge, real rank, `ρ_u` and wavefront
//! verdict.

mod catalog;
mod file;

pub use catalog::{catalog, catalog_names, catalog_source};
pub use file::{parse_descriptor, parse_descriptor_str};

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::cones::{edge_and_rays, project_quotient, Cone, Quotient, Subspace};
use crate::error::{Error, Result};
use crate::linalg::{self, Q, QVec};
use crate::rootsys::{negative_chamber, RootDatum};

/// One ideal `g_j` of `g`, with the coordinates of `a` and the simple roots
/// it owns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ideal {
    pub label: String,
    /// Real dimension of the ideal.
    pub dim: usize,
    pub simple: bool,
    pub compact: bool,
    pub coords: Vec<usize>,
    pub simple_roots: Vec<usize>,
}

/// A block of `h`: `dim` dimensions spread over the listed ideals. The
/// intersection `h ∩ ⊕_I g_j` is the sum of the blocks supported inside `I`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HBlock {
    pub dim: usize,
    pub support: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct Flags {
    pub h_reductive: bool,
    pub unimodular: bool,
    pub symmetric: bool,
}

/// Reduced space `G/H_I` for a basic factorization along the ideals `ideals`,
/// named by a catalog entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientLink {
    pub ideals: Vec<String>,
    pub descriptor: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphericalDescriptor {
    pub name: String,
    pub description: String,
    pub datum: RootDatum,
    pub a_h: Subspace,
    /// Indices into `datum.positive_roots()`.
    pub sigma_u: Vec<usize>,
    pub monoid_generators: Vec<QVec>,
    pub ideals: Vec<Ideal>,
    pub h_blocks: Vec<HBlock>,
    pub flags: Flags,
    pub realization: Option<String>,
    pub quotients: Vec<QuotientLink>,
}

impl SphericalDescriptor {
    pub fn dim_g(&self) -> usize {
        self.ideals.iter().map(|i| i.dim).sum()
    }

    pub fn dim_h(&self) -> usize {
        self.h_blocks.iter().map(|b| b.dim).sum()
    }

    /// `dim(h ∩ ⊕_{j∈I} g_j)`.
    pub fn dim_h_within(&self, labels: &BTreeSet<String>) -> usize {
        self.h_blocks.iter().filter(|b| b.support.iter().all(|s| labels.contains(s))).map(|b| b.dim).sum()
    }

    pub fn ideal(&self, label: &str) -> Option<&Ideal> {
        self.ideals.iter().find(|i| i.label == label)
    }

    pub fn quotient(&self) -> Quotient {
        Quotient::new(&self.a_h, self.datum.gram())
    }

    pub fn real_rank(&self) -> usize {
        self.datum.ambient_dim() - self.a_h.dim()
    }
}

/// Half the multiplicity-weighted sum of the roots of `u`, unchecked.
pub fn rho_u_unchecked(desc: &SphericalDescriptor) -> QVec {
    desc.datum.half_sum(desc.sigma_u.iter().copied())
}

/// `ρ_u`, rejected when it does not vanish on `a_H`.
pub fn rho_u(desc: &SphericalDescriptor) -> Result<QVec> {
    let r = rho_u_unchecked(desc);
    if !desc.a_h.annihilated_by(&r) {
        return Err(Error::Validation(vec![format!(
            "rho_u = {} does not vanish on a_H (non-unimodular data)",
            linalg::Show(&r)
        )]));
    }
    Ok(r)
}

/// Whether `target` (simple-root coefficients) is a nonnegative integer
/// combination of `parts`.
fn in_monoid(target: &[Q], parts: &[QVec]) -> bool {
    if target.iter().all(Zero::is_zero) {
        return true;
    }
    if target.iter().any(|x| x.is_negative()) {
        return false;
    }
    let Some((first, rest)) = parts.split_first() else {
        return false;
    };
    let mut remaining = target.to_vec();
    loop {
        if in_monoid(&remaining, rest) {
            return true;
        }
        remaining = linalg::sub(&remaining, first);
        if remaining.iter().any(|x| x.is_negative()) || linalg::is_zero(first) {
            return false;
        }
    }
}

/// Violated invariants, empty when the descriptor is consistent.
pub fn validate(desc: &SphericalDescriptor) -> Vec<String> {
    let mut out = Vec::new();
    let n = desc.datum.ambient_dim();
    let npos = desc.datum.positive_roots().len();
    let nsimple = desc.datum.simple_roots().len();
    if desc.a_h.ambient() != n {
        out.push(format!("a_H lives in dimension {} but a has dimension {n}", desc.a_h.ambient()));
        return out;
    }
    for &i in &desc.sigma_u {
        if i >= npos {
            out.push(format!("sigma_u index {i} out of range (0..{npos})"));
        }
    }
    let sigma: BTreeSet<usize> = desc.sigma_u.iter().copied().collect();
    if sigma.len() != desc.sigma_u.len() {
        out.push("sigma_u contains repeated indices".into());
    }
    let parts: Vec<QVec> = sigma
        .iter()
        .filter(|&&i| i < npos)
        .filter_map(|&i| desc.datum.simple_coefficients(&desc.datum.positive_roots()[i].covector))
        .collect();
    for (k, nu) in desc.monoid_generators.iter().enumerate() {
        if nu.len() != n {
            out.push(format!("monoid generator {k} has length {} (expected {n})", nu.len()));
            continue;
        }
        if !desc.a_h.annihilated_by(nu) {
            out.push(format!("monoid generator {k} = {} does not vanish on a_H", linalg::Show(nu)));
        }
        match desc.datum.simple_coefficients(nu) {
            Some(c) if in_monoid(&c, &parts) => {}
            _ => out.push(format!(
                "monoid generator {k} = {} is not a nonnegative integer combination of sigma_u roots",
                linalg::Show(nu)
            )),
        }
    }
    if sigma.iter().all(|&i| i < npos) {
        let r = rho_u_unchecked(desc);
        if !desc.a_h.annihilated_by(&r) {
            out.push(format!("rho_u = {} does not vanish on a_H", linalg::Show(&r)));
        }
    }
    let mut labels = BTreeSet::new();
    let mut coords = BTreeSet::new();
    let mut simples = BTreeSet::new();
    for ideal in &desc.ideals {
        if !labels.insert(ideal.label.clone()) {
            out.push(format!("ideal label `{}` repeated", ideal.label));
        }
        if ideal.dim == 0 {
            out.push(format!("ideal `{}` has dimension 0", ideal.label));
        }
        for &c in &ideal.coords {
            if c >= n || !coords.insert(c) {
                out.push(format!("ideal `{}` coordinate {c} out of range or shared", ideal.label));
            }
        }
        for &s in &ideal.simple_roots {
            if s >= nsimple || !simples.insert(s) {
                out.push(format!("ideal `{}` simple root {s} out of range or shared", ideal.label));
            }
        }
    }
    if !desc.ideals.is_empty() && simples.len() != nsimple {
        out.push("ideals do not partition the simple roots".into());
    }
    for (k, b) in desc.h_blocks.iter().enumerate() {
        for s in &b.support {
            if !labels.contains(s) {
                out.push(format!("h block {k} refers to unknown ideal `{s}`"));
            }
        }
    }
    if !desc.ideals.is_empty() && desc.dim_h() > desc.dim_g() {
        out.push(format!("dim h = {} exceeds dim g = {}", desc.dim_h(), desc.dim_g()));
    }
    for q in &desc.quotients {
        for s in &q.ideals {
            if !labels.contains(s) {
                out.push(format!("quotient link refers to unknown ideal `{s}`"));
            }
        }
    }
    out
}

/// Checks [`validate`] and turns violations into an error.
pub fn ensure_valid(desc: &SphericalDescriptor) -> Result<()> {
    let v = validate(desc);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(v))
    }
}

/// `{X ∈ a_Z | ν(X) <= 0 for ν ∈ Λ}` in quotient coordinates.
pub fn compression_cone(desc: &SphericalDescriptor) -> Cone {
    let quot = desc.quotient();
    let rows: Vec<QVec> = desc.monoid_generators.iter().map(|nu| linalg::neg(&quot.restrict_covector(nu))).collect();
    Cone::from_inequalities(quot.dim(), &rows)
}

/// Image of the negative chamber `a^-` in `a_Z`.
pub fn projected_chamber(desc: &SphericalDescriptor) -> Cone {
    project_quotient(&negative_chamber(&desc.datum), &desc.a_h, desc.datum.gram()).1
}

pub fn is_wavefront(desc: &SphericalDescriptor) -> bool {
    projected_chamber(desc) == compression_cone(desc)
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub real_rank: usize,
    pub compression_cone: Cone,
    pub edge: Subspace,
    pub wavefront: bool,
    #[serde(serialize_with = "linalg::ser::qvec")]
    pub rho_u: QVec,
}

pub fn rank_and_edge(desc: &SphericalDescriptor) -> Result<StructureReport> {
    let cone = compression_cone(desc);
    let (edge, _) = edge_and_rays(&cone);
    Ok(StructureReport {
        real_rank: desc.real_rank(),
        wavefront: is_wavefront(desc),
        rho_u: rho_u(desc)?,
        edge,
        compression_cone: cone,
    })
}

/// The descriptor of `Z × ℝ` obtained by adding one central coordinate.
pub fn quasiaffine_extension(desc: &SphericalDescriptor) -> SphericalDescriptor {
    let n = desc.datum.ambient_dim();
    let pad = |v: &QVec| {
        let mut w = v.clone();
        w.push(Q::zero());
        w
    };
    let mut label = "center".to_string();
    while desc.ideal(&label).is_some() {
        label.push('\'');
    }
    let mut ideals = desc.ideals.clone();
    ideals.push(Ideal { label, dim: 1, simple: false, compact: false, coords: vec![n], simple_roots: vec![] });
    SphericalDescriptor {
        name: format!("{}+center", desc.name),
        description: format!("{} times a central line", desc.name),
        datum: desc.datum.with_central(1),
        a_h: Subspace::new(n + 1, &desc.a_h.basis().iter().map(pad).collect::<Vec<_>>()),
        sigma_u: desc.sigma_u.clone(),
        monoid_generators: desc.monoid_generators.iter().map(pad).collect(),
        ideals,
        h_blocks: desc.h_blocks.clone(),
        flags: desc.flags,
        realization: None,
        quotients: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{qf, qvec};
    use crate::rootsys::{standard_datum, Series};

    #[test]
    fn monoid_membership() {
        let parts = vec![qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])];
        assert!(in_monoid(&qvec(&[2, 3]), &parts));
        assert!(!in_monoid(&qvec(&[-1, 0]), &parts));
        assert!(!in_monoid(&[qf(1, 2), linalg::q(0)], &parts));
        assert!(!in_monoid(&qvec(&[1, 0]), &[qvec(&[0, 1])]));
    }

    #[test]
    fn group_case_is_chamber() {
        let d = catalog("sl3_gk").unwrap();
        let chamber = negative_chamber(&standard_datum(Series::A, 2, None).unwrap());
        assert_eq!(compression_cone(&d), chamber);
        assert!(is_wavefront(&d));
    }

    #[test]
    fn empty_monoid_gives_whole_space() {
        let mut d = catalog("sl2_gk").unwrap();
        d.monoid_generators.clear();
        let c = compression_cone(&d);
        assert_eq!(c, Cone::full(1));
        let rep = rank_and_edge(&d).unwrap();
        assert_eq!(rep.edge.dim(), 1);
    }

    #[test]
    fn rho_u_examples() {
        assert_eq!(rho_u(&catalog("dS2").unwrap()).unwrap(), qvec(&[1]));
        let sl3 = catalog("sl3_gk").unwrap();
        let r = rho_u(&sl3).unwrap();
        let simple = sl3.datum.simple_roots();
        assert_eq!(r, linalg::add(&simple[0], &simple[1]));
        let mut empty = catalog("dS2").unwrap();
        empty.sigma_u.clear();
        empty.monoid_generators.clear();
        assert_eq!(rho_u(&empty).unwrap(), qvec(&[0]));
    }

    #[test]
    fn validation_flags_bad_generator_and_rho() {
        let mut d = catalog("group_sl2").unwrap();
        d.monoid_generators.push(qvec(&[2, 0]));
        let v = validate(&d);
        assert!(v.iter().any(|m| m.contains("does not vanish on a_H")), "{v:?}");
        let mut d = catalog("group_sl2").unwrap();
        d.sigma_u = vec![0];
        d.monoid_generators.clear();
        let v = validate(&d);
        assert!(v.iter().any(|m| m.starts_with("rho_u")), "{v:?}");
        assert!(rho_u(&d).is_err());
    }

    #[test]
    fn quasiaffine_adds_a_line() {
        let d = catalog("dS2").unwrap();
        let e = quasiaffine_extension(&d);
        assert!(validate(&e).is_empty());
        let rep = rank_and_edge(&e).unwrap();
        assert_eq!(rep.real_rank, 2);
        assert_eq!(rep.edge.dim(), 1);
        assert!(!rep.compression_cone.is_pointed());
        let e2 = quasiaffine_extension(&e);
        assert_eq!(rank_and_edge(&e2).unwrap().edge.dim(), 2);
    }
}
