//! Lattices, lattice points in cones, and exponential-polynomial sums over
//! them with a convergence verdict.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use super::Cone;
use crate::error::{Error, Result};
use crate::linalg::{self, Q, QVec};

/// Relative threshold on the last three doubling increments.
pub const EMPIRICAL_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    /// Lattice generators (the columns of the basis matrix).
    generators: Vec<QVec>,
    inverse: Vec<QVec>,
}

impl Lattice {
    pub fn new(generators: Vec<QVec>) -> Result<Lattice> {
        let n = generators.len();
        if n == 0 || generators.iter().any(|g| g.len() != n) {
            return Err(Error::Dimension("lattice basis must be square".into()));
        }
        let m = linalg::transpose(&generators, n);
        let inverse = linalg::inverse(&m).ok_or(Error::Singular)?;
        Ok(Lattice { generators, inverse })
    }

    pub fn standard(n: usize) -> Lattice {
        Lattice::new(linalg::identity(n)).expect("identity is invertible")
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[QVec] {
        &self.generators
    }

    pub fn point(&self, z: &[i64]) -> QVec {
        let mut out = linalg::zeros(self.dim());
        for (&zi, g) in z.iter().zip(&self.generators) {
            out = linalg::add(&out, &linalg::scale(&linalg::q(zi), g));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Norm {
    Euclidean,
    Sup,
    Gram(Vec<QVec>),
}

impl Norm {
    fn eval(&self, x: &[f64], gram: Option<&[Vec<f64>]>) -> f64 {
        match self {
            Norm::Euclidean => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Norm::Sup => x.iter().fold(0.0, |m, v| m.max(v.abs())),
            Norm::Gram(_) => {
                let g = gram.expect("gram cached");
                let mut s = 0.0;
                for (i, gi) in g.iter().enumerate() {
                    for (j, gij) in gi.iter().enumerate() {
                        s += x[i] * gij * x[j];
                    }
                }
                s.max(0.0).sqrt()
            }
        }
    }

    /// Bound on `|x_j|` for `||x|| <= 1`.
    fn coordinate_bounds(&self, n: usize) -> Result<Vec<f64>> {
        Ok(match self {
            Norm::Euclidean | Norm::Sup => vec![1.0; n],
            Norm::Gram(g) => {
                let inv = linalg::inverse(g).ok_or(Error::Singular)?;
                (0..n).map(|j| linalg::to_f64(&inv[j][j]).sqrt()).collect()
            }
        })
    }
}

/// Integer enumeration plan for `Γ ∩ C ∩ {||x|| <= R}`.
struct Plan {
    dim: usize,
    bounds: Vec<i64>,
    /// Facet rows in lattice coordinates, scaled to integers: `row·z >= 0`.
    facets: Vec<Vec<i128>>,
    equalities: Vec<Vec<i128>>,
    basis_f64: Vec<Vec<f64>>,
    gram_f64: Option<Vec<Vec<f64>>>,
}

fn integer_row(row: &[Q]) -> Vec<i128> {
    let mut l = BigInt::one();
    for x in row {
        l = l.lcm(x.denom());
    }
    row.iter()
        .map(|x| (x * Q::from_integer(l.clone())).to_integer().to_i128().expect("row fits in i128"))
        .collect()
}

impl Plan {
    fn new(lat: &Lattice, cone: &Cone, radius: f64, norm: &Norm) -> Result<Plan> {
        let n = lat.dim();
        if cone.ambient_dim() != n {
            return Err(Error::Dimension(format!("cone in dim {} vs lattice dim {n}", cone.ambient_dim())));
        }
        let to_z = |row: &QVec| -> Vec<i128> {
            let zrow: QVec = lat.generators.iter().map(|g| linalg::dot(row, g)).collect();
            integer_row(&zrow)
        };
        let facets = cone.facets().iter().map(to_z).collect();
        let equalities = cone.equalities().basis().iter().map(to_z).collect();
        let cb = norm.coordinate_bounds(n)?;
        let bounds = (0..n)
            .map(|i| {
                let s: f64 = (0..n).map(|j| linalg::to_f64(&lat.inverse[i][j]).abs() * cb[j]).sum();
                (s * radius + 1e-9).floor() as i64
            })
            .collect();
        let basis_f64 = (0..n).map(|i| lat.generators.iter().map(|g| linalg::to_f64(&g[i])).collect()).collect();
        let gram_f64 = match norm {
            Norm::Gram(g) => Some(g.iter().map(|r| linalg::vec_to_f64(r)).collect()),
            _ => None,
        };
        Ok(Plan { dim: n, bounds, facets, equalities, basis_f64, gram_f64 })
    }

    fn member(&self, z: &[i64]) -> bool {
        let ev = |row: &Vec<i128>| row.iter().zip(z).map(|(a, &b)| a * b as i128).sum::<i128>();
        self.equalities.iter().all(|r| ev(r) == 0) && self.facets.iter().all(|r| ev(r) >= 0)
    }

    fn coords(&self, z: &[i64]) -> Vec<f64> {
        self.basis_f64.iter().map(|row| row.iter().zip(z).map(|(a, &b)| a * b as f64).sum()).collect()
    }

    /// Visits every candidate with fixed leading coordinate `first`, in
    /// lexicographic order of the remaining coordinates.
    fn for_each_with_first(&self, first: i64, mut f: impl FnMut(&[i64])) {
        let n = self.dim;
        let mut z: Vec<i64> = self.bounds.iter().map(|b| -b).collect();
        z[0] = first;
        loop {
            f(&z);
            let mut k = n - 1;
            loop {
                if k == 0 {
                    return;
                }
                if z[k] < self.bounds[k] {
                    z[k] += 1;
                    break;
                }
                z[k] = -self.bounds[k];
                k -= 1;
            }
        }
    }
}

/// Lattice points of `Γ` in `C` with `||x|| <= radius`, ordered
/// lexicographically by lattice coordinates.
pub fn lattice_points(lat: &Lattice, cone: &Cone, radius: f64, norm: &Norm) -> Result<Vec<QVec>> {
    if !radius.is_finite() || radius < 0.0 {
        return Err(Error::InvalidArgument(format!("radius must be finite and nonnegative, got {radius}")));
    }
    let plan = Plan::new(lat, cone, radius, norm)?;
    let mut out = Vec::new();
    for first in -plan.bounds[0]..=plan.bounds[0] {
        plan.for_each_with_first(first, |z| {
            if plan.member(z) && norm.eval(&plan.coords(z), plan.gram_f64.as_deref()) <= radius + 1e-12 {
                out.push(lat.point(z));
            }
        });
    }
    Ok(out)
}

/// A convex piecewise-linear exponent `x ↦ max_k λ_k(x)`. A single piece is
/// an ordinary linear form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exponent {
    pub pieces: Vec<Vec<f64>>,
}

impl Exponent {
    pub fn linear(lambda: Vec<f64>) -> Exponent {
        Exponent { pieces: vec![lambda] }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converges,
    Diverges,
    EmpiricalConverges,
    EmpiricalDiverges,
}

impl Verdict {
    pub fn converges(self) -> bool {
        matches!(self, Verdict::Converges | Verdict::EmpiricalConverges)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictBasis {
    Analytic,
    Empirical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumReport {
    /// `(radius, partial sum over ||x|| <= radius)` at doubling radii.
    pub partial_sums: Vec<(f64, f64)>,
    pub verdict: Verdict,
    pub verdict_basis: VerdictBasis,
    pub points: u64,
}

impl SumReport {
    /// Differences between consecutive partial sums.
    pub fn increments(&self) -> Vec<(f64, f64)> {
        self.partial_sums.windows(2).map(|w| (w[1].0, w[1].1 - w[0].1)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SumOptions {
    pub norm: Norm,
    /// Skip the analytic decision and always apply the doubling test.
    pub force_empirical: bool,
}

impl Default for SumOptions {
    fn default() -> Self {
        SumOptions { norm: Norm::Euclidean, force_empirical: false }
    }
}

fn doubling_radii(r_max: f64) -> Vec<f64> {
    let mut radii = Vec::new();
    let mut r = 1.0;
    while r <= r_max {
        radii.push(r);
        r *= 2.0;
    }
    if radii.last().map_or(true, |&l| l < r_max) {
        radii.push(r_max);
    }
    radii
}

/// Doubling test on a sequence of partial sums.
pub fn empirical_verdict(partial_sums: &[(f64, f64)]) -> Verdict {
    if partial_sums.iter().any(|(_, s)| !s.is_finite()) || partial_sums.len() < 4 {
        return Verdict::EmpiricalDiverges;
    }
    let total = partial_sums.last().unwrap().1.abs();
    let inc: Vec<f64> = partial_sums.windows(2).map(|w| (w[1].1 - w[0].1).abs()).collect();
    if inc[inc.len() - 3..].iter().all(|&d| d < EMPIRICAL_REL_TOL * total) {
        Verdict::EmpiricalConverges
    } else {
        Verdict::EmpiricalDiverges
    }
}

fn analytic_verdict(cone: &Cone, exponent: &Exponent, m: f64) -> Option<Verdict> {
    let gens: Vec<Vec<f64>> = cone.generators().iter().map(|g| linalg::vec_to_f64(g)).collect();
    let piece_val = |p: &Vec<f64>, g: &Vec<f64>| p.iter().zip(g).map(|(a, b)| a * b).sum::<f64>();
    let tol = |g: &Vec<f64>| {
        let scale = exponent.pieces.iter().flat_map(|p| p.iter()).fold(1.0f64, |a, b| a.max(b.abs()));
        1e-12 * scale * g.iter().fold(1.0f64, |a, b| a.max(b.abs()))
    };
    let phi = |g: &Vec<f64>| exponent.eval(g);

    let all_zero = gens.iter().all(|g| phi(g).abs() <= tol(g));
    let some_piece_vanishes = exponent.pieces.iter().any(|p| gens.iter().all(|g| piece_val(p, g).abs() <= tol(g)));
    if all_zero && some_piece_vanishes {
        return Some(if m < -(cone.span_dim() as f64) { Verdict::Converges } else { Verdict::Diverges });
    }
    if gens.iter().any(|g| phi(g) > tol(g)) {
        return Some(Verdict::Diverges);
    }
    let rays: Vec<Vec<f64>> = cone.rays().iter().map(|g| linalg::vec_to_f64(g)).collect();
    if cone.is_pointed() {
        if rays.iter().all(|r| phi(r) < -tol(r)) {
            return Some(Verdict::Converges);
        }
        return None;
    }
    // Nonzero edge on which the exponent vanishes: the summand does not decay
    // along edge translates unless the polynomial factor does.
    if m >= 0.0 {
        return Some(Verdict::Diverges);
    }
    None
}

/// `sum over x in Γ ∩ C of e^{λ(x)} (1 + ||x||)^m` with Euclidean norm.
pub fn weighted_cone_sum(lat: &Lattice, cone: &Cone, lambda: &[f64], m: f64, r_max: f64) -> Result<SumReport> {
    weighted_cone_sum_with(lat, cone, &Exponent::linear(lambda.to_vec()), m, r_max, &SumOptions::default())
}

pub fn weighted_cone_sum_with(
    lat: &Lattice,
    cone: &Cone,
    exponent: &Exponent,
    m: f64,
    r_max: f64,
    opts: &SumOptions,
) -> Result<SumReport> {
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(Error::InvalidArgument(format!("R_max must be positive and finite, got {r_max}")));
    }
    if exponent.pieces.iter().any(|p| p.len() != lat.dim()) {
        return Err(Error::Dimension("exponent length differs from lattice dimension".into()));
    }
    let plan = Plan::new(lat, cone, r_max, &opts.norm)?;
    let radii = doubling_radii(r_max);
    let nb = radii.len();
    // One shell accumulator per leading coordinate; combined in order so the
    // result does not depend on scheduling.
    let per_first: Vec<(Vec<f64>, u64)> = (-plan.bounds[0]..=plan.bounds[0])
        .into_par_iter()
        .map(|first| {
            let mut shells = vec![0.0; nb];
            let mut count = 0u64;
            plan.for_each_with_first(first, |z| {
                if !plan.member(z) {
                    return;
                }
                let x = plan.coords(z);
                let r = opts.norm.eval(&x, plan.gram_f64.as_deref());
                if r > r_max + 1e-12 {
                    return;
                }
                let k = radii.iter().position(|&rk| r <= rk + 1e-12).unwrap_or(nb - 1);
                shells[k] += exponent.eval(&x).exp() * (1.0 + r).powf(m);
                count += 1;
            });
            (shells, count)
        })
        .collect();
    let mut shells = vec![0.0; nb];
    let mut points = 0;
    for (s, c) in per_first {
        for (acc, v) in shells.iter_mut().zip(s) {
            *acc += v;
        }
        points += c;
    }
    let mut running = 0.0;
    let partial_sums: Vec<(f64, f64)> = radii
        .iter()
        .zip(&shells)
        .map(|(&r, &s)| {
            running += s;
            (r, running)
        })
        .collect();
    let analytic = if opts.force_empirical { None } else { analytic_verdict(cone, exponent, m) };
    let (verdict, verdict_basis) = match analytic {
        Some(v) => (v, VerdictBasis::Analytic),
        None => (empirical_verdict(&partial_sums), VerdictBasis::Empirical),
    };
    Ok(SumReport { partial_sums, verdict, verdict_basis, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qvec;

    fn neg_orthant(n: usize) -> Cone {
        let rows: Vec<QVec> = (0..n).map(|i| linalg::neg(&linalg::unit(n, i))).collect();
        Cone::from_inequalities(n, &rows)
    }

    #[test]
    fn half_line_points() {
        let pts = lattice_points(&Lattice::standard(1), &neg_orthant(1), 3.0, &Norm::Euclidean).unwrap();
        assert_eq!(pts, vec![qvec(&[-3]), qvec(&[-2]), qvec(&[-1]), qvec(&[0])]);
    }

    #[test]
    fn orthant_sup_norm_points() {
        let pts = lattice_points(&Lattice::standard(2), &neg_orthant(2), 2.0, &Norm::Sup).unwrap();
        // exhaustive: the 3x3 block {-2,-1,0}^2
        let mut brute = Vec::new();
        for a in -2..=0 {
            for b in -2..=0 {
                brute.push(qvec(&[a, b]));
            }
        }
        assert_eq!(pts, brute);
    }

    #[test]
    fn zero_cone_has_origin_only() {
        let pts = lattice_points(&Lattice::standard(2), &Cone::zero(2), 5.0, &Norm::Euclidean).unwrap();
        assert_eq!(pts, vec![qvec(&[0, 0])]);
    }

    #[test]
    fn scaled_lattice_with_gram_norm() {
        let lat = Lattice::new(vec![qvec(&[2, 0]), qvec(&[1, 1])]).unwrap();
        let gram = vec![qvec(&[2, 0]), qvec(&[0, 1])];
        let pts = lattice_points(&lat, &Cone::full(2), 3.0, &Norm::Gram(gram.clone())).unwrap();
        // brute force over a generous box
        let mut brute = 0;
        for a in -10i64..=10 {
            for b in -10i64..=10 {
                let x = [2.0 * a as f64 + b as f64, b as f64];
                if (2.0 * x[0] * x[0] + x[1] * x[1]).sqrt() <= 3.0 {
                    brute += 1;
                }
            }
        }
        assert_eq!(pts.len(), brute);
    }

    #[test]
    fn geometric_series() {
        let rep = weighted_cone_sum(&Lattice::standard(1), &neg_orthant(1), &[1.0], 0.0, 256.0).unwrap();
        let expect = 1.0 / (1.0 - (-1.0f64).exp());
        let (_, last) = *rep.partial_sums.last().unwrap();
        assert!((last - expect).abs() < 1e-12, "{last} vs {expect}");
        assert!((expect - 1.5820).abs() < 1e-4);
        assert_eq!(rep.verdict, Verdict::Converges);
        assert_eq!(rep.verdict_basis, VerdictBasis::Analytic);
        assert_eq!(empirical_verdict(&rep.partial_sums), Verdict::EmpiricalConverges);
    }

    #[test]
    fn constant_summand_diverges() {
        let rep = weighted_cone_sum(&Lattice::standard(1), &neg_orthant(1), &[0.0], 0.0, 16.0).unwrap();
        assert_eq!(rep.verdict, Verdict::Diverges);
        assert_eq!(empirical_verdict(&rep.partial_sums), Verdict::EmpiricalDiverges);
    }

    #[test]
    fn polynomial_decay_threshold() {
        let c = neg_orthant(2);
        let conv = weighted_cone_sum(&Lattice::standard(2), &c, &[0.0, 0.0], -3.0, 32.0).unwrap();
        assert_eq!(conv.verdict, Verdict::Converges);
        let div = weighted_cone_sum(&Lattice::standard(2), &c, &[0.0, 0.0], -2.0, 32.0).unwrap();
        assert_eq!(div.verdict, Verdict::Diverges);
    }

    #[test]
    fn growing_ray_diverges() {
        let c = neg_orthant(2);
        let rep = weighted_cone_sum(&Lattice::standard(2), &c, &[1.0, -0.5], -10.0, 8.0).unwrap();
        assert_eq!(rep.verdict, Verdict::Diverges);
    }

    #[test]
    fn mixed_case_is_empirical() {
        // half-plane x <= 0 with exponent x: vanishes on the edge, decays across it
        let c = Cone::from_inequalities(2, &[qvec(&[-1, 0])]);
        let rep = weighted_cone_sum(&Lattice::standard(2), &c, &[1.0, 0.0], -3.0, 16.0).unwrap();
        assert_eq!(rep.verdict_basis, VerdictBasis::Empirical);
        let rep0 = weighted_cone_sum(&Lattice::standard(2), &c, &[1.0, 0.0], 0.0, 8.0).unwrap();
        assert_eq!(rep0.verdict, Verdict::Diverges);
    }

    #[test]
    fn rejects_nonpositive_radius() {
        assert!(weighted_cone_sum(&Lattice::standard(1), &neg_orthant(1), &[0.0], 0.0, 0.0).is_err());
        assert!(weighted_cone_sum(&Lattice::standard(1), &neg_orthant(1), &[0.0], 0.0, -1.0).is_err());
    }

    #[test]
    fn piecewise_exponent() {
        let e = Exponent { pieces: vec![vec![1.0, 0.5], vec![0.5, 1.0]] };
        assert_eq!(e.eval(&[-2.0, -4.0]), -4.0);
        let rep = weighted_cone_sum_with(
            &Lattice::standard(2),
            &neg_orthant(2),
            &e,
            0.0,
            64.0,
            &SumOptions::default(),
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Converges);
    }
}
