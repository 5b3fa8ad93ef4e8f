//! Exponents of representations, matrix-coefficient bounds, and the `L^p`
//! threshold over the compression cone.

mod factor;

pub use factor::{
    enumerate_factorizations, property_i_check, Classification, Conclusion, FactorizationRecord, PropertyTrace,
    Spectral, Step, Unimodularity,
};

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::cones::lp::{self, Constraint, LpOutcome};
use crate::cones::Exponent;
use crate::error::{Error, Result};
use crate::linalg::{self, Q, QVec};
use crate::rootsys::{dual_basis, RootDatum};
use crate::spherical::{compression_cone, is_wavefront, rho_u, SphericalDescriptor};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightList {
    weights: Vec<QVec>,
}

impl WeightList {
    pub fn new(weights: Vec<QVec>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("weight list must be nonempty".into()));
        }
        let n = weights[0].len();
        if weights.iter().any(|w| w.len() != n) {
            return Err(Error::Dimension("weights of different lengths".into()));
        }
        Ok(WeightList { weights })
    }

    pub fn weights(&self) -> &[QVec] {
        &self.weights
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentProfile {
    #[serde(serialize_with = "linalg::ser::qvec")]
    pub lambda_v: QVec,
    pub d_v: u32,
}

/// `Λ_V = Σ_i max_j μ_j(H_i) · α_i`.
pub fn lambda_v(wl: &WeightList, datum: &RootDatum) -> Result<QVec> {
    let h = dual_basis(datum)?;
    if wl.weights[0].len() != datum.ambient_dim() {
        return Err(Error::Dimension("weights do not live on a".into()));
    }
    let mut out = linalg::zeros(datum.ambient_dim());
    for (hi, ai) in h.iter().zip(datum.simple_roots()) {
        let m = wl.weights.iter().map(|mu| linalg::dot(mu, hi)).max().expect("nonempty");
        out = linalg::add(&out, &linalg::scale(&m, ai));
    }
    Ok(out)
}

/// Values `Λ(H_i)`, i.e. the simple-root coefficients of `Λ`.
pub fn coroot_values(lambda: &[Q], datum: &RootDatum) -> Result<QVec> {
    datum.simple_coefficients(lambda).ok_or_else(|| {
        Error::InvalidArgument(format!("{} is not in the span of the simple roots", linalg::Show(lambda)))
    })
}

/// Strict positivity of `Λ(H_i)` on every simple root of every ideal flagged
/// nontrivial. `parts[j]` lists the simple-root indices of ideal `j`.
pub fn is_interior_dual(lambda: &[Q], datum: &RootDatum, parts: &[Vec<usize>], nontrivial: &[bool]) -> Result<bool> {
    if parts.len() != nontrivial.len() {
        return Err(Error::Dimension("one nontriviality flag per ideal expected".into()));
    }
    let vals = coroot_values(lambda, datum)?;
    Ok(parts
        .iter()
        .zip(nontrivial)
        .filter(|(_, &nt)| nt)
        .all(|(p, _)| p.iter().all(|&i| vals[i].is_positive())))
}

/// [`is_interior_dual`] for a simple group with a nontrivial representation.
pub fn is_interior_dual_simple(lambda: &[Q], datum: &RootDatum) -> Result<bool> {
    let all: Vec<usize> = (0..datum.rank()).collect();
    is_interior_dual(lambda, datum, &[all], &[true])
}

/// `e^{Λ(X)} (1 + ||X||)^d` for `X ∈ a^-`.
pub fn coefficient_bound(profile: &ExponentProfile, datum: &RootDatum, x: &[Q]) -> Result<f64> {
    if x.len() != datum.ambient_dim() || profile.lambda_v.len() != x.len() {
        return Err(Error::Dimension("X and Λ_V must live on a".into()));
    }
    if datum.simple_roots().iter().any(|a| linalg::dot(a, x).is_positive()) {
        return Err(Error::OutsideChamber);
    }
    let norm = linalg::to_f64(&datum.norm_sq(x)).sqrt();
    let e = linalg::to_f64(&linalg::dot(&profile.lambda_v, x));
    Ok(e.exp() * (1.0 + norm).powi(profile.d_v as i32))
}

/// Value of the best lift into `a^-`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lift {
    Value(Q),
    /// The fiber is unbounded in a direction where `Λ` decreases.
    MinusInfinity,
}

impl Lift {
    pub fn to_f64(&self) -> f64 {
        match self {
            Lift::Value(v) => linalg::to_f64(v),
            Lift::MinusInfinity => f64::NEG_INFINITY,
        }
    }
}

impl Serialize for Lift {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Lift::Value(v) => s.serialize_str(&v.to_string()),
            Lift::MinusInfinity => s.serialize_str("-inf"),
        }
    }
}

/// Fiber of the quotient map over `x` as `{lift(x) + B_H t}` with the
/// chamber constraints in `t`.
fn fiber_constraints(desc: &SphericalDescriptor, base: &[Q]) -> Vec<Constraint> {
    let bh = desc.a_h.basis();
    desc.datum
        .simple_roots()
        .iter()
        .map(|a| Constraint::new(bh.iter().map(|b| -linalg::dot(a, b)).collect(), linalg::dot(a, base)))
        .collect()
}

/// `min { Λ(X̃) | X̃ ∈ a^-, X̃ ≡ X mod a_H }` for `X` in quotient coordinates.
pub fn lifted_exponent(desc: &SphericalDescriptor, lambda: &[Q], x: &[Q]) -> Result<Lift> {
    if !is_wavefront(desc) {
        return Err(Error::NotWavefront);
    }
    lifted_exponent_unchecked(desc, lambda, x)
}

fn lifted_exponent_unchecked(desc: &SphericalDescriptor, lambda: &[Q], x: &[Q]) -> Result<Lift> {
    let quot = desc.quotient();
    if x.len() != quot.dim() || lambda.len() != desc.datum.ambient_dim() {
        return Err(Error::Dimension("X in quotient coordinates, Λ on a".into()));
    }
    let base = quot.lift(x);
    let c: QVec = desc.a_h.basis().iter().map(|b| linalg::dot(lambda, b)).collect();
    match lp::minimize(&c, &fiber_constraints(desc, &base)) {
        LpOutcome::Optimal { value, .. } => Ok(Lift::Value(value + linalg::dot(lambda, &base))),
        LpOutcome::Unbounded => Ok(Lift::MinusInfinity),
        LpOutcome::Infeasible => Err(Error::InfeasibleLift(format!(
            "no point of the negative chamber lies over {}",
            linalg::Show(x)
        ))),
    }
}

/// Linear pieces (covectors in quotient coordinates) whose maximum is the
/// lifted exponent on the projected chamber. Empty when the lift is
/// unbounded below.
pub fn lifted_exponent_pieces(desc: &SphericalDescriptor, lambda: &[Q]) -> Result<Vec<QVec>> {
    let quot = desc.quotient();
    let bh = desc.a_h.basis();
    let simple = desc.datum.simple_roots();
    let r = simple.len();
    // Dual polyhedron {y >= 0, Σ y_i (−α_i∘B_H) = Λ∘B_H}.
    let eqs: Vec<Constraint> = bh
        .iter()
        .map(|b| Constraint::new(simple.iter().map(|a| -linalg::dot(a, b)).collect(), linalg::dot(lambda, b)))
        .collect();
    let ineqs: Vec<Constraint> = (0..r).map(|i| Constraint::new(linalg::unit(r, i), Q::zero())).collect();
    let verts = lp::vertices(r, &eqs, &ineqs);
    let mut pieces: Vec<QVec> = verts
        .iter()
        .map(|y| {
            let mut cov = lambda.to_vec();
            for (yi, a) in y.iter().zip(simple) {
                cov = linalg::add(&cov, &linalg::scale(yi, a));
            }
            quot.complement_basis().iter().map(|b| linalg::dot(&cov, b)).collect()
        })
        .collect();
    pieces.sort();
    pieces.dedup();
    Ok(pieces)
}

/// Convex piecewise-linear exponent `p·lift − 2ρ_u` for lattice sums.
pub fn threshold_exponent(desc: &SphericalDescriptor, lambda: &[Q], p: f64) -> Result<Exponent> {
    let quot = desc.quotient();
    let two_rho = linalg::vec_to_f64(&quot.restrict_covector(&linalg::scale(&linalg::q(2), &rho_u(desc)?)));
    let pieces = lifted_exponent_pieces(desc, lambda)?;
    if pieces.is_empty() {
        return Err(Error::InvalidArgument("lifted exponent is unbounded below".into()));
    }
    Ok(Exponent {
        pieces: pieces
            .iter()
            .map(|pc| linalg::vec_to_f64(pc).iter().zip(&two_rho).map(|(a, r)| p * a - r).collect())
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Threshold {
    /// Infimum of admissible exponents; admissible are all `p > value`.
    Finite(Q),
    /// No finite exponent works.
    None,
    /// Already `p = 1` works.
    All,
}

impl Threshold {
    pub fn to_f64(&self) -> Option<f64> {
        match self {
            Threshold::Finite(v) => Some(linalg::to_f64(v)),
            _ => None,
        }
    }
}

impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Threshold::Finite(v) => s.serialize_str(&v.to_string()),
            Threshold::None => s.serialize_str("none"),
            Threshold::All => s.serialize_str("all"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorRow {
    #[serde(serialize_with = "linalg::ser::qvec")]
    pub generator: QVec,
    /// Unit-norm representative on the cross-section.
    pub direction: Vec<f64>,
    pub lift: Lift,
    pub two_rho_u: String,
    /// `2ρ_u / lift`, the exponent at which `e_p` vanishes on this generator.
    pub ratio: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub p_star: Threshold,
    pub p_star_f64: Option<f64>,
    /// Rows attaining the threshold (or witnessing "none").
    pub maximizers: Vec<usize>,
    pub generators: Vec<GeneratorRow>,
}

/// `inf{p >= 1 | p·lift(X) − 2ρ_u(X) < 0 on the compression cone minus 0}`.
///
/// The lift is convex and positively homogeneous, so negativity on the cone
/// is decided on its generators (rays and both signs of lineality vectors).
pub fn lp_threshold(desc: &SphericalDescriptor, profile: &ExponentProfile) -> Result<ThresholdReport> {
    if !is_wavefront(desc) {
        return Err(Error::NotWavefront);
    }
    let cone = compression_cone(desc);
    let quot = desc.quotient();
    let two_rho = quot.restrict_covector(&linalg::scale(&linalg::q(2), &rho_u(desc)?));
    let mut gens = cone.rays().to_vec();
    for l in cone.lineality().basis() {
        gens.push(l.clone());
        gens.push(linalg::neg(l));
    }
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    let mut none_witness = Vec::new();
    let mut best: Option<Q> = None;
    for (k, g) in gens.iter().enumerate() {
        let lift = lifted_exponent_unchecked(desc, &profile.lambda_v, g)?;
        let r = linalg::dot(&two_rho, g);
        let ratio = match &lift {
            Lift::Value(l) if l.is_negative() => Some(&r / l),
            Lift::Value(l) if l.is_zero() && r.is_positive() => None,
            Lift::Value(_) => {
                none_witness.push(k);
                None
            }
            Lift::MinusInfinity => None,
        };
        if let Some(rt) = &ratio {
            if best.as_ref().map_or(true, |b| rt > b) {
                best = Some(rt.clone());
            }
        }
        let nrm = linalg::to_f64(&linalg::bilinear(quot.gram(), g, g)).sqrt();
        rows.push(GeneratorRow {
            direction: linalg::vec_to_f64(g).iter().map(|v| v / nrm).collect(),
            generator: g.clone(),
            lift,
            two_rho_u: r.to_string(),
            ratio: ratio.as_ref().map(ToString::to_string),
        });
        ratios.push(ratio);
    }
    let (p_star, maximizers) = if !none_witness.is_empty() {
        (Threshold::None, none_witness)
    } else {
        match best {
            Some(b) if b >= Q::from_integer(1.into()) => {
                let arg = ratios.iter().enumerate().filter(|(_, r)| r.as_ref() == Some(&b)).map(|(i, _)| i).collect();
                (Threshold::Finite(b), arg)
            }
            _ => (Threshold::All, Vec::new()),
        }
    };
    Ok(ThresholdReport { p_star_f64: p_star.to_f64(), p_star, maximizers, generators: rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, qvec};
    use crate::rootsys::{standard_datum, Series};
    use crate::spherical::catalog;

    fn profile(lambda: QVec) -> ExponentProfile {
        ExponentProfile { lambda_v: lambda, d_v: 0 }
    }

    #[test]
    fn lambda_v_examples() {
        let a1 = standard_datum(Series::A, 1, None).unwrap();
        assert_eq!(lambda_v(&WeightList::new(vec![qvec(&[0])]).unwrap(), &a1).unwrap(), qvec(&[0]));
        let rho = a1.rho();
        let wl = WeightList::new(vec![linalg::neg(&rho), rho.clone()]).unwrap();
        assert_eq!(lambda_v(&wl, &a1).unwrap(), rho);
        // A2: μ1 has coroot values (1, -1), μ2 has (0, 2)
        let a2 = standard_datum(Series::A, 2, None).unwrap();
        let s = a2.simple_roots();
        let mu1 = linalg::sub(&s[0], &s[1]);
        let mu2 = linalg::scale(&q(2), &s[1]);
        let lv = lambda_v(&WeightList::new(vec![mu1, mu2]).unwrap(), &a2).unwrap();
        assert_eq!(coroot_values(&lv, &a2).unwrap(), qvec(&[1, 2]));
    }

    #[test]
    fn interior_dual_examples() {
        let a1 = standard_datum(Series::A, 1, None).unwrap();
        assert!(is_interior_dual_simple(&a1.rho(), &a1).unwrap());
        assert!(!is_interior_dual_simple(&qvec(&[0]), &a1).unwrap());
        let a2 = standard_datum(Series::A, 2, None).unwrap();
        let h = dual_basis(&a2).unwrap();
        // Λ with Λ(H1) = 1, Λ(H2) = 0 is the fundamental weight direction
        let lam = a2.simple_roots()[0].clone();
        assert_eq!(linalg::dot(&lam, &h[1]), q(0));
        assert!(!is_interior_dual_simple(&lam, &a2).unwrap());
    }

    #[test]
    fn bound_examples() {
        let a1 = standard_datum(Series::A, 1, None).unwrap();
        let p = profile(a1.rho());
        assert_eq!(coefficient_bound(&p, &a1, &qvec(&[0])).unwrap(), 1.0);
        let h1 = dual_basis(&a1).unwrap()[0].clone();
        // ρ(H1) = 1/2 for the dual basis; the coroot (x = 1) has ρ = 1
        let x = linalg::scale(&q(-2), &h1);
        assert!((coefficient_bound(&p, &a1, &x).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        let coroot = qvec(&[-2]);
        assert!((coefficient_bound(&p, &a1, &coroot).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        let p1 = ExponentProfile { lambda_v: a1.rho(), d_v: 1 };
        let v = coefficient_bound(&p1, &a1, &coroot).unwrap();
        assert!((v - (-2.0f64).exp() * (1.0 + 8f64.sqrt())).abs() < 1e-12);
        assert!(matches!(coefficient_bound(&p, &a1, &qvec(&[1])), Err(Error::OutsideChamber)));
    }

    #[test]
    fn trivial_lift_when_a_h_is_zero() {
        let d = catalog("sl2_gk").unwrap();
        assert_eq!(lifted_exponent(&d, &qvec(&[3]), &qvec(&[-2])).unwrap(), Lift::Value(q(-6)));
        assert_eq!(lifted_exponent(&d, &qvec(&[3]), &qvec(&[0])).unwrap(), Lift::Value(q(0)));
    }

    #[test]
    fn lift_in_group_case() {
        // group_sl2: a_Z coordinate c ↦ c(1,1); fiber c(1,1) + t(1,-1) in a^-
        let d = catalog("group_sl2").unwrap();
        let lam = qvec(&[1, 0]);
        // X = -1: fiber points (-1+t, -1-t) with |t| <= 1; min of x1 is -2
        assert_eq!(lifted_exponent(&d, &lam, &qvec(&[-1])).unwrap(), Lift::Value(q(-2)));
        let pieces = lifted_exponent_pieces(&d, &lam).unwrap();
        let best = pieces.iter().map(|p| linalg::dot(p, &qvec(&[-1]))).max().unwrap();
        assert_eq!(best, q(-2));
    }

    #[test]
    fn non_wavefront_rejected() {
        let d = catalog("so8c_g2").unwrap();
        let p = profile(d.datum.rho());
        assert!(matches!(lp_threshold(&d, &p), Err(Error::NotWavefront)));
        assert!(matches!(lifted_exponent(&d, &p.lambda_v, &qvec(&[0, 0])), Err(Error::NotWavefront)));
    }

    #[test]
    fn sl2_thresholds() {
        let d = catalog("sl2_gk").unwrap();
        let rho = d.datum.rho();
        let t = lp_threshold(&d, &profile(rho.clone())).unwrap();
        assert_eq!(t.p_star, Threshold::Finite(q(2)));
        assert_eq!(t.maximizers, vec![0]);
        let t2 = lp_threshold(&d, &profile(linalg::scale(&q(2), &rho))).unwrap();
        assert_eq!(t2.p_star, Threshold::Finite(q(1)));
        let t3 = lp_threshold(&d, &profile(linalg::scale(&q(4), &rho))).unwrap();
        assert_eq!(t3.p_star, Threshold::All);
        let t4 = lp_threshold(&d, &profile(linalg::neg(&rho))).unwrap();
        assert_eq!(t4.p_star, Threshold::None);
        let t5 = lp_threshold(&d, &profile(qvec(&[0]))).unwrap();
        assert_eq!(t5.p_star, Threshold::None);
    }

    #[test]
    fn d_v_does_not_move_threshold() {
        let d = catalog("triple_sl2").unwrap();
        let rho = d.datum.rho();
        let a = lp_threshold(&d, &ExponentProfile { lambda_v: rho.clone(), d_v: 0 }).unwrap();
        let b = lp_threshold(&d, &ExponentProfile { lambda_v: rho, d_v: 5 }).unwrap();
        assert_eq!(a.p_star, b.p_star);
    }

    #[test]
    fn triple_threshold_with_rho() {
        let d = catalog("triple_sl2").unwrap();
        let t = lp_threshold(&d, &profile(d.datum.rho())).unwrap();
        assert!(matches!(t.p_star, Threshold::Finite(_)), "{:?}", t.p_star);
    }
}
