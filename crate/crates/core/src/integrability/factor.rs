//! Factorizations `h_I = h + ⊕_{j∈I} g_j` and the property (I) induction.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{is_interior_dual, lp_threshold, ExponentProfile, Threshold};
use crate::error::Result;
use crate::spherical::{catalog, is_wavefront, SphericalDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Improper,
    ProperBasic,
    CoCompact,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationRecord {
    pub subset: Vec<String>,
    pub dim_h_star: usize,
    pub classification: Classification,
    /// Catalogued reduced space `G/H_I`, when known.
    pub reduced: Option<String>,
}

impl FactorizationRecord {
    pub fn is_proper(&self) -> bool {
        matches!(self.classification, Classification::ProperBasic | Classification::CoCompact)
    }
}

fn reduced_for(desc: &SphericalDescriptor, subset: &BTreeSet<String>) -> Option<String> {
    desc.quotients
        .iter()
        .find(|q| q.ideals.iter().cloned().collect::<BTreeSet<_>>() == *subset)
        .map(|q| q.descriptor.clone())
}

/// All `2^k` subsets of ideals, in binary counting order of the ideal list.
pub fn enumerate_factorizations(desc: &SphericalDescriptor) -> Vec<FactorizationRecord> {
    let k = desc.ideals.len();
    let dim_g = desc.dim_g();
    let dim_h = desc.dim_h();
    (0u64..1 << k)
        .map(|mask| {
            let chosen: Vec<_> = desc.ideals.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, d)| d).collect();
            let labels: BTreeSet<String> = chosen.iter().map(|d| d.label.clone()).collect();
            let added: usize = chosen.iter().map(|d| d.dim).sum();
            let dim_h_star = dim_h + added - desc.dim_h_within(&labels);
            let classification = if dim_h_star == dim_h {
                Classification::Improper
            } else if dim_h_star == dim_g {
                Classification::Full
            } else if chosen.iter().all(|d| d.compact) {
                Classification::CoCompact
            } else {
                Classification::ProperBasic
            };
            FactorizationRecord {
                subset: chosen.iter().map(|d| d.label.clone()).collect(),
                dim_h_star,
                reduced: reduced_for(desc, &labels),
                classification,
            }
        })
        .collect()
}

/// Spectral input: per-ideal nontriviality (in the order of the descriptor's
/// ideals) and the exponent profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectral {
    pub nontrivial: Vec<bool>,
    pub profile: ExponentProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unimodularity {
    /// Reductive or co-compact stabilizer.
    Implied,
    NumericallyVerified,
    NotVerified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum Step {
    /// Enlarge `h` by the ideals on which the representation is trivial and
    /// pass to the reduced space.
    Basic { space: String, ideals: Vec<String>, dim_h_star: usize, reduced: String, unimodularity: Unimodularity },
    /// Representation nontrivial on every ideal: the threshold applies.
    CoCompact { space: String, p_star: Threshold, unimodularity: Unimodularity },
    /// Trivial representation: `H_η = G`.
    PointSpace { space: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Conclusion {
    Holds { p_star: Threshold },
    AnyP,
    HypothesesNotMet { reason: String },
    Undecided { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyTrace {
    pub steps: Vec<Step>,
    pub conclusion: Conclusion,
}

fn hypotheses(desc: &SphericalDescriptor) -> Option<String> {
    if !desc.flags.h_reductive {
        Some(format!("{}: h is not flagged reductive", desc.name))
    } else if !is_wavefront(desc) {
        Some(format!("{} is not wavefront", desc.name))
    } else {
        None
    }
}

/// Follows the induction: strip the ideals where the representation is
/// trivial through basic factorizations, then apply the threshold on the
/// remaining space.
pub fn property_i_check(desc: &SphericalDescriptor, spectral: &Spectral) -> Result<PropertyTrace> {
    let mut steps = Vec::new();
    let conclusion = run(desc, spectral, &mut steps)?;
    Ok(PropertyTrace { steps, conclusion })
}

fn run(desc: &SphericalDescriptor, spectral: &Spectral, steps: &mut Vec<Step>) -> Result<Conclusion> {
    if let Some(reason) = hypotheses(desc) {
        return Ok(Conclusion::HypothesesNotMet { reason });
    }
    if spectral.nontrivial.len() != desc.ideals.len() {
        return Ok(Conclusion::Undecided {
            reason: format!("{} nontriviality flags for {} ideals", spectral.nontrivial.len(), desc.ideals.len()),
        });
    }
    let unimodularity = if desc.flags.h_reductive || desc.flags.unimodular { Unimodularity::Implied } else { Unimodularity::NotVerified };
    if spectral.nontrivial.iter().all(|&b| !b) {
        steps.push(Step::PointSpace { space: desc.name.clone() });
        return Ok(Conclusion::AnyP);
    }
    if spectral.nontrivial.iter().all(|&b| b) {
        let parts: Vec<Vec<usize>> = desc.ideals.iter().map(|i| i.simple_roots.clone()).collect();
        if !is_interior_dual(&spectral.profile.lambda_v, &desc.datum, &parts, &spectral.nontrivial)? {
            return Ok(Conclusion::Undecided { reason: "Λ_V is not in the interior of the dual cone".into() });
        }
        let t = lp_threshold(desc, &spectral.profile)?;
        steps.push(Step::CoCompact { space: desc.name.clone(), p_star: t.p_star.clone(), unimodularity: Unimodularity::Implied });
        return Ok(match t.p_star {
            Threshold::None => Conclusion::Undecided { reason: "no finite exponent on the compression cone".into() },
            p => Conclusion::Holds { p_star: p },
        });
    }
    let trivial: BTreeSet<String> = desc
        .ideals
        .iter()
        .zip(&spectral.nontrivial)
        .filter(|(_, &nt)| !nt)
        .map(|(i, _)| i.label.clone())
        .collect();
    let Some(reduced_name) = reduced_for(desc, &trivial) else {
        return Ok(Conclusion::Undecided {
            reason: format!("reduced space for {:?} is not catalogued", trivial.iter().collect::<Vec<_>>()),
        });
    };
    let reduced = catalog(&reduced_name)?;
    let keep: Vec<usize> = desc
        .ideals
        .iter()
        .zip(&spectral.nontrivial)
        .filter(|(_, &nt)| nt)
        .flat_map(|(i, _)| i.coords.iter().copied())
        .collect();
    if keep.len() != reduced.datum.ambient_dim() {
        return Ok(Conclusion::Undecided {
            reason: format!("reduced space {reduced_name} does not match the remaining coordinates"),
        });
    }
    let added: usize = desc.ideals.iter().filter(|i| trivial.contains(&i.label)).map(|i| i.dim).sum();
    steps.push(Step::Basic {
        space: desc.name.clone(),
        ideals: trivial.iter().cloned().collect(),
        dim_h_star: desc.dim_h() + added - desc.dim_h_within(&trivial),
        reduced: reduced_name,
        unimodularity,
    });
    let sub = Spectral {
        nontrivial: vec![true; reduced.ideals.len()],
        profile: ExponentProfile {
            lambda_v: keep.iter().map(|&c| spectral.profile.lambda_v[c].clone()).collect(),
            d_v: spectral.profile.d_v,
        },
    };
    run(&reduced, &sub, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, qvec};

    #[test]
    fn triple_has_three_proper_factorizations() {
        let d = catalog("triple_sl2").unwrap();
        let recs = enumerate_factorizations(&d);
        assert_eq!(recs.len(), 8);
        let proper: Vec<_> = recs.iter().filter(|r| r.is_proper()).collect();
        assert_eq!(proper.len(), 3);
        for r in proper {
            assert_eq!(r.subset.len(), 1);
            assert_eq!(r.dim_h_star, 6);
            assert_eq!(r.classification, Classification::ProperBasic);
            assert_eq!(r.reduced.as_deref(), Some("group_sl2"));
        }
        assert_eq!(recs[0].classification, Classification::Improper);
        assert_eq!(recs[0].dim_h_star, 3);
    }

    #[test]
    fn pair_has_none() {
        let d = catalog("pair_sl2").unwrap();
        assert!(enumerate_factorizations(&d).iter().all(|r| !r.is_proper()));
    }

    fn spectral(nontrivial: Vec<bool>, lambda: Vec<i64>) -> Spectral {
        Spectral { nontrivial, profile: ExponentProfile { lambda_v: qvec(&lambda), d_v: 0 } }
    }

    #[test]
    fn triple_all_nontrivial() {
        let d = catalog("triple_sl2").unwrap();
        let tr = property_i_check(&d, &spectral(vec![true; 3], vec![1, 1, 1])).unwrap();
        assert_eq!(tr.steps.len(), 1);
        assert!(matches!(tr.steps[0], Step::CoCompact { .. }));
        assert!(matches!(tr.conclusion, Conclusion::Holds { p_star: Threshold::Finite(_) } | Conclusion::Holds { p_star: Threshold::All }));
    }

    #[test]
    fn triple_trivial_on_first_ideal() {
        let d = catalog("triple_sl2").unwrap();
        let tr = property_i_check(&d, &spectral(vec![false, true, true], vec![0, 1, 1])).unwrap();
        match &tr.steps[..] {
            [Step::Basic { ideals, dim_h_star, reduced, .. }, Step::CoCompact { space, p_star, .. }] => {
                assert_eq!(ideals, &vec!["g1".to_string()]);
                assert_eq!(*dim_h_star, 6);
                assert_eq!(reduced, "group_sl2");
                assert_eq!(space, "group_sl2");
                assert_eq!(*p_star, Threshold::Finite(q(2)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trivial_representation_is_point_space() {
        let d = catalog("triple_sl2").unwrap();
        let tr = property_i_check(&d, &spectral(vec![false; 3], vec![0, 0, 0])).unwrap();
        assert_eq!(tr.conclusion, Conclusion::AnyP);
        assert!(matches!(tr.steps[..], [Step::PointSpace { .. }]));
    }

    #[test]
    fn non_wavefront_hypotheses() {
        let d = catalog("so8c_g2").unwrap();
        let tr = property_i_check(&d, &spectral(vec![true], vec![1, 1, 1, 1])).unwrap();
        assert!(matches!(tr.conclusion, Conclusion::HypothesesNotMet { .. }));
    }
}
