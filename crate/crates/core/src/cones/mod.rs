//! Rational polyhedral cones.
//!
//! A [`Cone`] always carries both descriptions in canonical minimal form:
//! a lineality basis plus extreme rays modulo lineality, and the dual pair of
//! equalities plus facet normals. Conversion uses the double-description
//! method (Motzkin's incremental algorithm with the combinatorial adjacency
//! test); dimensions here are tiny, so no pruning tricks are needed.

mod lattice;
pub mod lp;

pub use lattice::{
    empirical_verdict, lattice_points, weighted_cone_sum, weighted_cone_sum_with, Exponent, Lattice, Norm,
    SumOptions, SumReport, Verdict, VerdictBasis,
};

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::linalg::{self, Q, QVec};

/// A linear subspace of `Q^n`, stored as a reduced row echelon basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<QVec>,
}

impl Subspace {
    pub fn new(ambient: usize, spanning: &[QVec]) -> Self {
        Subspace { ambient, basis: linalg::rref(spanning, ambient).0 }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: linalg::identity(ambient) }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[QVec] {
        &self.basis
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        linalg::rank(&rows, self.ambient) == self.dim()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// `{x | xᵀ G s = 0 for all s}`.
    pub fn orthogonal_complement(&self, gram: &[QVec]) -> Subspace {
        let rows: Vec<QVec> = self.basis.iter().map(|s| linalg::vec_mat(s, gram)).collect();
        Subspace::new(self.ambient, &linalg::nullspace(&rows, self.ambient))
    }

    /// True when every covector vanishes on the subspace.
    pub fn annihilated_by(&self, covector: &[Q]) -> bool {
        self.basis.iter().all(|b| linalg::dot(b, covector).is_zero())
    }
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.basis.iter().map(|r| linalg::fmt_qvec(r)).collect();
        rows.serialize(s)
    }
}

/// Incremental double description of `{x | row·x >= 0 for all rows}`.
/// Returns a lineality basis and the extreme rays modulo lineality.
fn double_description(dim: usize, rows: &[QVec]) -> (Vec<QVec>, Vec<QVec>) {
    let mut lin = linalg::identity(dim);
    let mut rays: Vec<QVec> = Vec::new();
    let mut processed: Vec<QVec> = Vec::new();
    for a in rows {
        if linalg::is_zero(a) {
            continue;
        }
        if let Some(k) = lin.iter().position(|l| !linalg::dot(a, l).is_zero()) {
            let mut l0 = lin.remove(k);
            let mut al0 = linalg::dot(a, &l0);
            if al0.is_negative() {
                l0 = linalg::neg(&l0);
                al0 = -al0;
            }
            let kill = |v: &QVec| {
                let c = linalg::dot(a, v) / &al0;
                linalg::sub(v, &linalg::scale(&c, &l0))
            };
            lin = lin.iter().map(kill).collect();
            rays = rays.iter().map(|r| linalg::primitive(&kill(r))).collect();
            rays.push(linalg::primitive(&l0));
        } else {
            let vals: Vec<Q> = rays.iter().map(|r| linalg::dot(a, r)).collect();
            let tight: Vec<BTreeSet<usize>> = rays
                .iter()
                .map(|r| (0..processed.len()).filter(|&i| linalg::dot(&processed[i], r).is_zero()).collect())
                .collect();
            let mut next: Vec<QVec> = Vec::new();
            for (i, r) in rays.iter().enumerate() {
                if !vals[i].is_negative() {
                    next.push(r.clone());
                }
            }
            for p in (0..rays.len()).filter(|&i| vals[i].is_positive()) {
                for n in (0..rays.len()).filter(|&i| vals[i].is_negative()) {
                    let common: BTreeSet<usize> = tight[p].intersection(&tight[n]).copied().collect();
                    let adjacent = (0..rays.len())
                        .filter(|&o| o != p && o != n)
                        .all(|o| !common.is_subset(&tight[o]));
                    if adjacent {
                        let v = linalg::sub(
                            &linalg::scale(&vals[p], &rays[n]),
                            &linalg::scale(&vals[n], &rays[p]),
                        );
                        next.push(linalg::primitive(&v));
                    }
                }
            }
            rays = next;
        }
        processed.push(a.clone());
    }
    (lin, rays)
}

/// Canonical rays: reduced modulo the lineality space (Euclidean complement),
/// primitive integer scaling, deduplicated and sorted.
fn canonical_rays(lin: &Subspace, rays: &[QVec]) -> Vec<QVec> {
    let dim = lin.ambient();
    let onb = linalg::identity(dim);
    let perp = lin.orthogonal_complement(&onb);
    let mut out: BTreeSet<QVec> = BTreeSet::new();
    for r in rays {
        let reduced = euclidean_projection(&perp, lin, r);
        if !linalg::is_zero(&reduced) {
            out.insert(linalg::primitive(&reduced));
        }
    }
    out.into_iter().collect()
}

/// Component of `v` in `target` along the complementary subspace `along`.
fn euclidean_projection(target: &Subspace, along: &Subspace, v: &[Q]) -> QVec {
    if along.dim() == 0 {
        return v.to_vec();
    }
    if target.dim() == 0 {
        return linalg::zeros(v.len());
    }
    // v = sum t_i target_i + sum s_j along_j; solve the square system.
    let cols: Vec<&QVec> = target.basis().iter().chain(along.basis()).collect();
    let n = v.len();
    let m: Vec<QVec> = (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    let coeffs = linalg::solve(&m, v).expect("complementary subspaces span the space");
    let mut out = linalg::zeros(n);
    for (c, b) in coeffs.iter().zip(target.basis()) {
        out = linalg::add(&out, &linalg::scale(c, b));
    }
    out
}

#[derive(Debug, Clone)]
pub struct Cone {
    dim: usize,
    lineality: Subspace,
    rays: Vec<QVec>,
    equalities: Subspace,
    facets: Vec<QVec>,
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.lineality == other.lineality && self.rays == other.rays
    }
}

impl Eq for Cone {}

fn generator_constraints(lin: &Subspace, rays: &[QVec]) -> Vec<QVec> {
    let mut rows: Vec<QVec> = rays.to_vec();
    for l in lin.basis() {
        rows.push(l.clone());
        rows.push(linalg::neg(l));
    }
    rows
}

impl Cone {
    /// `{x | row·x >= 0 for every row}`.
    pub fn from_inequalities(dim: usize, rows: &[QVec]) -> Cone {
        let (lin, rays) = double_description(dim, rows);
        Self::from_parts(dim, &lin, &rays)
    }

    /// Conic hull of `rays` plus the linear span of `lines`.
    pub fn from_generators(dim: usize, rays: &[QVec], lines: &[QVec]) -> Cone {
        let lin = Subspace::new(dim, lines);
        let constraints = generator_constraints(&lin, rays);
        let (eq, facets) = double_description(dim, &constraints);
        Self::from_parts(dim, &eq, &facets).dual()
    }

    fn from_parts(dim: usize, lin: &[QVec], rays: &[QVec]) -> Cone {
        let lineality = Subspace::new(dim, lin);
        let rays = canonical_rays(&lineality, rays);
        let (eq, facets) = double_description(dim, &generator_constraints(&lineality, &rays));
        let equalities = Subspace::new(dim, &eq);
        let facets = canonical_rays(&equalities, &facets);
        Cone { dim, lineality, rays, equalities, facets }
    }

    pub fn full(dim: usize) -> Cone {
        Cone::from_inequalities(dim, &[])
    }

    pub fn zero(dim: usize) -> Cone {
        Cone::from_generators(dim, &[], &[])
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Extreme rays modulo the lineality space, canonical primitive scaling.
    pub fn rays(&self) -> &[QVec] {
        &self.rays
    }

    pub fn lineality(&self) -> &Subspace {
        &self.lineality
    }

    /// Facet normals `f` (the cone satisfies `f·x >= 0`), modulo equalities.
    pub fn facets(&self) -> &[QVec] {
        &self.facets
    }

    pub fn equalities(&self) -> &Subspace {
        &self.equalities
    }

    /// Inequality rows `r·x >= 0` describing the cone (equalities split in two).
    pub fn inequality_rows(&self) -> Vec<QVec> {
        generator_constraints(&self.equalities, &self.facets)
    }

    /// Rays together with `±` each lineality basis vector.
    pub fn generators(&self) -> Vec<QVec> {
        generator_constraints(&self.lineality, &self.rays)
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.equalities.basis().iter().all(|e| linalg::dot(e, x).is_zero())
            && self.facets.iter().all(|f| !linalg::dot(f, x).is_negative())
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.generators().iter().all(|g| self.contains(g))
    }

    /// Dimension of the linear span.
    pub fn span_dim(&self) -> usize {
        self.dim - self.equalities.dim()
    }

    pub fn span(&self) -> Subspace {
        Subspace::new(self.dim, &self.generators())
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.dim() == 0
    }

    /// `{lambda | lambda(x) >= 0 for all x in the cone}`.
    pub fn dual(&self) -> Cone {
        Cone {
            dim: self.dim,
            lineality: self.equalities.clone(),
            rays: self.facets.clone(),
            equalities: self.lineality.clone(),
            facets: self.rays.clone(),
        }
    }
}

impl Serialize for Cone {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let fmt = |v: &[QVec]| v.iter().map(|r| linalg::fmt_qvec(r)).collect::<Vec<_>>();
        let mut st = s.serialize_struct("Cone", 5)?;
        st.serialize_field("ambient_dim", &self.dim)?;
        st.serialize_field("lineality", &self.lineality)?;
        st.serialize_field("rays", &fmt(&self.rays))?;
        st.serialize_field("equalities", &self.equalities)?;
        st.serialize_field("facets", &fmt(&self.facets))?;
        st.end()
    }
}

pub fn dual_cone(c: &Cone) -> Cone {
    c.dual()
}

/// Lineality space (the edge) and extreme rays modulo it.
pub fn edge_and_rays(c: &Cone) -> (Subspace, Vec<QVec>) {
    (c.lineality().clone(), c.rays().to_vec())
}

/// The quotient `a / S` realized on the gram-orthogonal complement of `S`.
#[derive(Debug, Clone)]
pub struct Quotient {
    ambient: usize,
    kernel: Subspace,
    /// Complement basis vectors, expressed in the ambient coordinates.
    basis: Vec<QVec>,
    gram: Vec<QVec>,
    ambient_gram: Vec<QVec>,
}

impl Quotient {
    pub fn new(kernel: &Subspace, gram: &[QVec]) -> Quotient {
        let ambient = kernel.ambient();
        let rows: Vec<QVec> = kernel.basis().iter().map(|s| linalg::vec_mat(s, gram)).collect();
        let basis = linalg::nullspace(&rows, ambient);
        let qgram = basis.iter().map(|b| basis.iter().map(|c| linalg::bilinear(gram, b, c)).collect()).collect();
        Quotient { ambient, kernel: kernel.clone(), basis, gram: qgram, ambient_gram: gram.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn kernel(&self) -> &Subspace {
        &self.kernel
    }

    pub fn complement_basis(&self) -> &[QVec] {
        &self.basis
    }

    /// Inner product in quotient coordinates.
    pub fn gram(&self) -> &[QVec] {
        &self.gram
    }

    /// Quotient coordinates of the class of `x`.
    pub fn project(&self, x: &[Q]) -> QVec {
        if self.basis.is_empty() {
            return Vec::new();
        }
        let rhs: QVec = self.basis.iter().map(|b| linalg::bilinear(&self.ambient_gram, b, x)).collect();
        linalg::solve(&self.gram, &rhs).expect("gram restricted to complement is definite")
    }

    /// The complement representative of quotient coordinates `c`.
    pub fn lift(&self, c: &[Q]) -> QVec {
        let mut out = linalg::zeros(self.ambient);
        for (ci, b) in c.iter().zip(&self.basis) {
            out = linalg::add(&out, &linalg::scale(ci, b));
        }
        out
    }

    /// A covector vanishing on the kernel, written in quotient coordinates.
    pub fn restrict_covector(&self, nu: &[Q]) -> QVec {
        self.basis.iter().map(|b| linalg::dot(nu, b)).collect()
    }

    /// Pulls a quotient covector back to a covector on the ambient space
    /// (vanishing on the kernel).
    pub fn pullback_covector(&self, mu: &[Q]) -> QVec {
        // mu(project(x)) as a linear form in x: project = Gq^{-1} Bᵀ G x.
        let ginv = linalg::inverse(&self.gram).unwrap_or_default();
        let w = linalg::vec_mat(mu, &ginv);
        let mut out = linalg::zeros(self.ambient);
        for (wi, b) in w.iter().zip(&self.basis) {
            out = linalg::add(&out, &linalg::scale(wi, &linalg::vec_mat(b, &self.ambient_gram)));
        }
        out
    }
}

/// Image of `c` under the quotient map by `s` (complement coordinates with
/// respect to `gram`).
pub fn project_quotient(c: &Cone, s: &Subspace, gram: &[QVec]) -> (Quotient, Cone) {
    let quot = Quotient::new(s, gram);
    let rays: Vec<QVec> = c.rays().iter().map(|r| quot.project(r)).collect();
    let lines: Vec<QVec> = c.lineality().basis().iter().map(|l| quot.project(l)).collect();
    let image = Cone::from_generators(quot.dim(), &rays, &lines);
    (quot, image)
}
