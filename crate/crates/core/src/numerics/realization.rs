//! Matrix realizations of catalog spaces.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;

/// How the stabilizer `H` is parametrized for membership searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HKind {
    /// `H = SO(2)`, angles in `[0, π)` suffice up to the center.
    Circle,
    /// `H = exp(ℝ (E + F))`.
    Hyperbolic,
    /// `H = G`; the space is a point.
    Everything,
    /// Other stabilizers; no membership search.
    Other,
}

#[derive(Debug, Clone)]
pub struct MatrixRealization {
    pub name: String,
    /// Catalog descriptor described by this realization.
    pub descriptor: String,
    pub n: usize,
    pub g: Vec<Mat>,
    pub h: Vec<Mat>,
    /// `a[i]` realizes the i-th catalog coordinate of `a`.
    pub a: Vec<Mat>,
    pub n_plus: Vec<Mat>,
    pub k: Vec<Mat>,
    /// Root vectors spanning `ū` (the negatives of `Σ_u`).
    pub u_bar: Vec<Mat>,
    /// Minimal parabolic subalgebra `p = m + a + n`.
    pub p: Vec<Mat>,
    pub h_kind: HKind,
    /// For the `SL(2,ℝ)` spaces: the element of `sl(2)` fixed by `H`.
    pub base_vector: Option<Mat>,
    /// Whether `H = K` so that polar coordinates come from singular values.
    pub riemannian: bool,
    /// Coefficients of `ρ_u` in catalog coordinates.
    pub rho_u: Vec<f64>,
    /// Gram matrix on `a` in catalog coordinates.
    pub gram: Vec<Vec<f64>>,
}

pub(crate) fn unit(n: usize, i: usize, j: usize) -> Mat {
    let mut m = Mat::zeros(n, n);
    m[(i, j)] = 1.0;
    m
}

fn diag(v: &[f64]) -> Mat {
    Mat::from_diagonal(&nalgebra::DVector::from_column_slice(v))
}

fn sl_n(n: usize) -> (Vec<Mat>, Vec<Mat>, Vec<Mat>, Vec<Mat>, Vec<Mat>) {
    let mut a = Vec::new();
    for i in 0..n - 1 {
        let mut d = vec![0.0; n];
        d[i] = 1.0;
        d[n - 1] = -1.0;
        a.push(diag(&d));
    }
    let mut n_plus = Vec::new();
    let mut n_minus = Vec::new();
    let mut k = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            n_plus.push(unit(n, i, j));
            n_minus.push(unit(n, j, i));
            k.push(unit(n, i, j) - unit(n, j, i));
        }
    }
    let mut g = a.clone();
    g.extend(n_plus.iter().cloned());
    g.extend(n_minus.iter().cloned());
    (g, a, n_plus, n_minus, k)
}

fn sl2(name: &str, h: Mat, h_kind: HKind, base: Mat, riemannian: bool) -> MatrixRealization {
    let (g, a, n_plus, n_minus, k) = sl_n(2);
    let mut p = a.clone();
    p.extend(n_plus.iter().cloned());
    MatrixRealization {
        name: name.into(),
        descriptor: name.into(),
        n: 2,
        g,
        h: vec![h],
        a,
        n_plus,
        k,
        u_bar: n_minus,
        p,
        h_kind,
        base_vector: Some(base),
        riemannian,
        rho_u: vec![1.0],
        gram: vec![vec![2.0]],
    }
}

fn sl3_gk() -> MatrixRealization {
    let (g, a, n_plus, n_minus, k) = sl_n(3);
    let mut p = a.clone();
    p.extend(n_plus.iter().cloned());
    MatrixRealization {
        name: "sl3_gk".into(),
        descriptor: "sl3_gk".into(),
        n: 3,
        g,
        h: k.clone(),
        a,
        n_plus,
        k,
        u_bar: n_minus,
        p,
        h_kind: HKind::Other,
        base_vector: None,
        riemannian: true,
        // ρ = α1 + α2 = (2, 1) in the coordinates (x1, x2), x3 = −x1 − x2
        rho_u: vec![2.0, 1.0],
        gram: vec![vec![2.0, 1.0], vec![1.0, 2.0]],
    }
}

/// `SL(2,ℝ)/SL(2,ℝ)`: `Σ_u = ∅`, every ball is the whole space.
fn point() -> MatrixRealization {
    let (g, a, n_plus, _, k) = sl_n(2);
    let mut p = a.clone();
    p.extend(n_plus.iter().cloned());
    MatrixRealization {
        name: "point".into(),
        descriptor: "point".into(),
        n: 2,
        h: g.clone(),
        g,
        a,
        n_plus,
        k,
        u_bar: Vec::new(),
        p,
        h_kind: HKind::Everything,
        base_vector: None,
        riemannian: false,
        rho_u: vec![0.0],
        gram: vec![vec![2.0]],
    }
}

pub fn realization_names() -> Vec<&'static str> {
    vec!["sl2_gk", "dS2", "sl3_gk", "point"]
}

pub fn realization(name: &str) -> Result<MatrixRealization> {
    let e = unit(2, 0, 1);
    let f = unit(2, 1, 0);
    match name {
        "sl2_gk" => Ok(sl2("sl2_gk", &e - &f, HKind::Circle, &e - &f, true)),
        "dS2" => Ok(sl2("dS2", &e + &f, HKind::Hyperbolic, &e + &f, false)),
        "sl3_gk" => Ok(sl3_gk()),
        "point" => Ok(point()),
        other => Err(Error::UnknownEntry {
            name: other.into(),
            available: realization_names().iter().map(|s| s.to_string()).collect(),
        }),
    }
}

impl MatrixRealization {
    /// `Σ x_i a_i`.
    pub fn a_element(&self, x: &[f64]) -> Result<Mat> {
        if x.len() != self.a.len() {
            return Err(Error::Dimension(format!("{} coordinates for rank {}", x.len(), self.a.len())));
        }
        let mut m = Mat::zeros(self.n, self.n);
        for (xi, ai) in x.iter().zip(&self.a) {
            m += ai * *xi;
        }
        Ok(m)
    }

    /// `exp(Σ x_i a_i)`; `a` is diagonal so the exponential is entrywise.
    pub fn exp_a(&self, x: &[f64]) -> Result<Mat> {
        let m = self.a_element(x)?;
        Ok(Mat::from_diagonal(&m.diagonal().map(f64::exp)))
    }

    pub fn rho_u_at(&self, x: &[f64]) -> f64 {
        self.rho_u.iter().zip(x).map(|(r, v)| r * v).sum()
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, gi) in self.gram.iter().enumerate() {
            for (j, gij) in gi.iter().enumerate() {
                s += x[i] * gij * x[j];
            }
        }
        s.max(0.0).sqrt()
    }

    /// Element of `H` at parameter `s` for one-parameter stabilizers.
    pub fn h_element(&self, s: f64) -> Result<Mat> {
        match self.h_kind {
            HKind::Circle => Ok(Mat::from_row_slice(2, 2, &[s.cos(), s.sin(), -s.sin(), s.cos()])),
            HKind::Hyperbolic => Ok(Mat::from_row_slice(2, 2, &[s.cosh(), s.sinh(), s.sinh(), s.cosh()])),
            _ => Err(Error::Unsupported(format!("{} has no one-parameter stabilizer", self.name))),
        }
    }
}
