//! Restricted root data with exact rational coordinates.
//!
//! Roots are covectors on `a`, stored in the coordinates of `a`; the gram
//! matrix is the inner product on `a` itself. The classical series use
//! standard coordinates (with `A_n` realized on the first `n` coordinates of
//! the trace-zero diagonal), `G2` uses coordinates dual to its simple roots.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cones::Cone;
use crate::error::{Error, Result};
use crate::linalg::{self, q, qf, Q, QVec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Series {
    A,
    B,
    C,
    D,
    G2,
}

impl std::str::FromStr for Series {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Series::A),
            "B" => Ok(Series::B),
            "C" => Ok(Series::C),
            "D" => Ok(Series::D),
            "G2" | "G" => Ok(Series::G2),
            other => Err(Error::InvalidDatum(format!("unknown series `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositiveRoot {
    #[serde(serialize_with = "crate::linalg::ser::qvec")]
    pub covector: QVec,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootDatum {
    ambient_dim: usize,
    simple_roots: Vec<QVec>,
    positive_roots: Vec<PositiveRoot>,
    gram: Vec<QVec>,
}

impl RootDatum {
    /// Builds a datum from explicit data and checks the structural invariants.
    pub fn new(simple_roots: Vec<QVec>, positive_roots: Vec<PositiveRoot>, gram: Vec<QVec>) -> Result<Self> {
        let ambient_dim = gram.len();
        if ambient_dim == 0 {
            return Err(Error::InvalidDatum("empty gram matrix".into()));
        }
        if simple_roots.is_empty() {
            return Err(Error::InvalidDatum("no simple roots".into()));
        }
        for row in &gram {
            if row.len() != ambient_dim {
                return Err(Error::InvalidDatum("gram matrix is not square".into()));
            }
        }
        for i in 0..ambient_dim {
            for j in 0..ambient_dim {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidDatum("gram matrix is not symmetric".into()));
                }
            }
        }
        // Sylvester: leading principal minors positive.
        for k in 1..=ambient_dim {
            let minor: Vec<QVec> = gram[..k].iter().map(|r| r[..k].to_vec()).collect();
            if !det(&minor).is_positive() {
                return Err(Error::InvalidDatum("gram matrix is not positive definite".into()));
            }
        }
        if simple_roots.iter().chain(positive_roots.iter().map(|r| &r.covector)).any(|r| r.len() != ambient_dim) {
            return Err(Error::InvalidDatum("root covector has wrong length".into()));
        }
        if linalg::rank(&simple_roots, ambient_dim) != simple_roots.len() {
            return Err(Error::InvalidDatum("simple roots are linearly dependent".into()));
        }
        let datum = RootDatum { ambient_dim, simple_roots, positive_roots, gram };
        for (i, r) in datum.positive_roots.iter().enumerate() {
            if r.multiplicity == 0 {
                return Err(Error::InvalidDatum(format!("positive root {i} has multiplicity 0")));
            }
            match datum.simple_coefficients(&r.covector) {
                Some(c) if c.iter().all(|x| !x.is_negative() && x.is_integer()) => {}
                _ => {
                    return Err(Error::InvalidDatum(format!(
                        "positive root {i} is not a nonnegative integer combination of simple roots"
                    )))
                }
            }
        }
        for (i, s) in datum.simple_roots.iter().enumerate() {
            if !datum.positive_roots.iter().any(|r| &r.covector == s) {
                return Err(Error::InvalidDatum(format!("simple root {i} is missing from the positive roots")));
            }
        }
        Ok(datum)
    }

    pub fn rank(&self) -> usize {
        self.simple_roots.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn simple_roots(&self) -> &[QVec] {
        &self.simple_roots
    }

    pub fn positive_roots(&self) -> &[PositiveRoot] {
        &self.positive_roots
    }

    pub fn gram(&self) -> &[QVec] {
        &self.gram
    }

    /// Coefficients of `nu` in the simple roots, if `nu` lies in their span.
    pub fn simple_coefficients(&self, nu: &[Q]) -> Option<QVec> {
        let n = self.rank();
        // Columns = simple roots; solve sum c_i alpha_i = nu.
        let rows: Vec<QVec> = (0..self.ambient_dim)
            .map(|j| {
                let mut r: QVec = self.simple_roots.iter().map(|a| a[j].clone()).collect();
                r.push(nu[j].clone());
                r
            })
            .collect();
        let (red, pivots) = linalg::rref(&rows, n + 1);
        if pivots.contains(&n) {
            return None;
        }
        let mut c = linalg::zeros(n);
        for (row, &p) in red.iter().zip(&pivots) {
            c[p] = row[n].clone();
        }
        Some(c)
    }

    /// Half the multiplicity-weighted sum of all positive roots.
    pub fn rho(&self) -> QVec {
        self.half_sum(0..self.positive_roots.len())
    }

    pub fn half_sum(&self, roots: impl IntoIterator<Item = usize>) -> QVec {
        let mut acc = linalg::zeros(self.ambient_dim);
        for i in roots {
            let r = &self.positive_roots[i];
            acc = linalg::add(&acc, &linalg::scale(&q(r.multiplicity as i64), &r.covector));
        }
        linalg::scale(&qf(1, 2), &acc)
    }

    pub fn with_multiplicities(mut self, multiplicities: &[u32]) -> Result<Self> {
        if multiplicities.len() != self.positive_roots.len() {
            return Err(Error::InvalidDatum(format!(
                "expected {} multiplicities, got {}",
                self.positive_roots.len(),
                multiplicities.len()
            )));
        }
        if multiplicities.contains(&0) {
            return Err(Error::InvalidDatum("multiplicities must be positive".into()));
        }
        for (r, &m) in self.positive_roots.iter_mut().zip(multiplicities) {
            r.multiplicity = m;
        }
        Ok(self)
    }

    pub fn with_uniform_multiplicity(self, m: u32) -> Result<Self> {
        let ms = vec![m; self.positive_roots.len()];
        self.with_multiplicities(&ms)
    }

    /// Orthogonal direct sum of data (block-diagonal coordinates).
    pub fn product(factors: &[RootDatum]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidDatum("empty product".into()));
        }
        let dim: usize = factors.iter().map(|f| f.ambient_dim).sum();
        let mut simple = Vec::new();
        let mut positive = Vec::new();
        let mut gram = vec![linalg::zeros(dim); dim];
        let mut off = 0;
        for f in factors {
            let embed = |v: &QVec| {
                let mut out = linalg::zeros(dim);
                out[off..off + f.ambient_dim].clone_from_slice(v);
                out
            };
            simple.extend(f.simple_roots.iter().map(embed));
            positive.extend(f.positive_roots.iter().map(|r| PositiveRoot {
                covector: embed(&r.covector),
                multiplicity: r.multiplicity,
            }));
            for i in 0..f.ambient_dim {
                for j in 0..f.ambient_dim {
                    gram[off + i][off + j] = f.gram[i][j].clone();
                }
            }
            off += f.ambient_dim;
        }
        RootDatum::new(simple, positive, gram)
    }

    /// Appends `extra` central coordinates on which every root vanishes.
    pub fn with_central(&self, extra: usize) -> Self {
        let dim = self.ambient_dim + extra;
        let pad = |v: &QVec| {
            let mut out = v.clone();
            out.resize(dim, Q::zero());
            out
        };
        let mut gram: Vec<QVec> = self.gram.iter().map(pad).collect();
        for i in self.ambient_dim..dim {
            gram.push(linalg::unit(dim, i));
        }
        RootDatum {
            ambient_dim: dim,
            simple_roots: self.simple_roots.iter().map(pad).collect(),
            positive_roots: self
                .positive_roots
                .iter()
                .map(|r| PositiveRoot { covector: pad(&r.covector), multiplicity: r.multiplicity })
                .collect(),
            gram,
        }
    }

    /// Squared norm of a vector of `a` under the gram matrix.
    pub fn norm_sq(&self, x: &[Q]) -> Q {
        linalg::bilinear(&self.gram, x, x)
    }
}

fn det(m: &[QVec]) -> Q {
    let n = m.len();
    let mut a: Vec<QVec> = m.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        for i in c + 1..n {
            let f = &a[i][c] / &a[c][c];
            let pr = a[c].clone();
            for (x, y) in a[i].iter_mut().zip(&pr) {
                *x -= &f * y;
            }
        }
    }
    d
}

/// Standard positive system of the given type and rank.
pub fn standard_datum(series: Series, n: usize, multiplicities: Option<&[u32]>) -> Result<RootDatum> {
    let bad = || Error::InvalidDatum(format!("invalid series/rank pair {series:?}{n}"));
    let (simple, positive, gram) = match series {
        Series::A => {
            if n < 1 {
                return Err(bad());
            }
            // e_i for i <= n are coordinates; e_{n+1} = -(x_1 + ... + x_n).
            let e = |i: usize| -> QVec {
                if i < n {
                    linalg::unit(n, i)
                } else {
                    vec![q(-1); n]
                }
            };
            let simple: Vec<QVec> = (0..n).map(|i| linalg::sub(&e(i), &e(i + 1))).collect();
            let mut pos = Vec::new();
            for i in 0..=n {
                for j in i + 1..=n {
                    pos.push(linalg::sub(&e(i), &e(j)));
                }
            }
            // Trace form restricted to the first n diagonal entries.
            let gram = (0..n)
                .map(|i| (0..n).map(|j| if i == j { q(2) } else { q(1) }).collect())
                .collect();
            (simple, pos, gram)
        }
        Series::B | Series::C | Series::D => {
            let min = if series == Series::D { 2 } else { 1 };
            if n < min {
                return Err(bad());
            }
            let e = |i: usize| linalg::unit(n, i);
            let mut simple: Vec<QVec> = (0..n - 1).map(|i| linalg::sub(&e(i), &e(i + 1))).collect();
            match series {
                Series::B => simple.push(e(n - 1)),
                Series::C => simple.push(linalg::scale(&q(2), &e(n - 1))),
                _ => simple.push(linalg::add(&e(n - 2), &e(n - 1))),
            }
            let mut pos = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    pos.push(linalg::sub(&e(i), &e(j)));
                    pos.push(linalg::add(&e(i), &e(j)));
                }
                match series {
                    Series::B => pos.push(e(i)),
                    Series::C => pos.push(linalg::scale(&q(2), &e(i))),
                    _ => {}
                }
            }
            (simple, pos, linalg::identity(n))
        }
        Series::G2 => {
            if n != 2 {
                return Err(bad());
            }
            let simple = vec![linalg::qvec(&[1, 0]), linalg::qvec(&[0, 1])];
            let pos = [[1, 0], [0, 1], [1, 1], [2, 1], [3, 1], [3, 2]]
                .iter()
                .map(|c| linalg::qvec(c))
                .collect();
            // Inverse of the root inner products ((1, -3/2), (-3/2, 3)).
            let gram = vec![vec![q(4), q(2)], vec![q(2), qf(4, 3)]];
            (simple, pos, gram)
        }
    };
    let positive = positive.into_iter().map(|covector| PositiveRoot { covector, multiplicity: 1 }).collect();
    let datum = RootDatum::new(simple, positive, gram)?;
    match multiplicities {
        Some(m) => datum.with_multiplicities(m),
        None => Ok(datum),
    }
}

/// The vectors `H_i` of `a` with `alpha_j(H_i) = delta_ij`.
pub fn dual_basis(datum: &RootDatum) -> Result<Vec<QVec>> {
    if datum.ambient_dim != datum.rank() {
        return Err(Error::NotSemisimple { ambient: datum.ambient_dim, rank: datum.rank() });
    }
    let inv = linalg::inverse(&datum.simple_roots).ok_or(Error::Singular)?;
    // Columns of the inverse are the H_i.
    Ok(linalg::transpose(&inv, datum.rank()))
}

/// Closed negative Weyl chamber `{X | alpha(X) <= 0 for every simple alpha}`.
pub fn negative_chamber(datum: &RootDatum) -> Cone {
    let rows: Vec<QVec> = datum.simple_roots.iter().map(|a| linalg::neg(a)).collect();
    Cone::from_inequalities(datum.ambient_dim, &rows)
}
