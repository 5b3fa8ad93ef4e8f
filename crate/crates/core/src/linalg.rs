//! Exact rational linear algebra on small dense vectors and matrices.
//!
//! Everything here works over `BigRational`; dimensions in this crate never
//! exceed a handful, so row reduction without pivoting heuristics is fine.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// A rational vector (or covector; the distinction is carried by context).
pub type QVec = Vec<Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(xs: &[i64]) -> QVec {
    xs.iter().map(|&x| q(x)).collect()
}

pub fn zeros(n: usize) -> QVec {
    vec![Q::zero(); n]
}

pub fn unit(n: usize, i: usize) -> QVec {
    let mut v = zeros(n);
    v[i] = Q::one();
    v
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: &Q, a: &[Q]) -> QVec {
    a.iter().map(|x| c * x).collect()
}

pub fn neg(a: &[Q]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero(a: &[Q]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn vec_to_f64(a: &[Q]) -> Vec<f64> {
    a.iter().map(to_f64).collect()
}

/// `M v` for a row-major matrix.
pub fn mat_vec(m: &[QVec], v: &[Q]) -> QVec {
    m.iter().map(|row| dot(row, v)).collect()
}

/// `vᵀ M` for a row-major matrix.
pub fn vec_mat(v: &[Q], m: &[QVec]) -> QVec {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| v.iter().zip(m).fold(Q::zero(), |acc, (x, row)| acc + x * &row[j]))
        .collect()
}

pub fn transpose(m: &[QVec], cols: usize) -> Vec<QVec> {
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Quadratic form `aᵀ G b`.
pub fn bilinear(g: &[QVec], a: &[Q], b: &[Q]) -> Q {
    dot(a, &mat_vec(g, b))
}

/// Scales a nonzero vector to the unique primitive integer vector with the
/// same direction (positive multiples only).
pub fn primitive(v: &[Q]) -> QVec {
    if is_zero(v) {
        return v.to_vec();
    }
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    ints.into_iter().map(|x| Q::from_integer(x / &g)).collect()
}

/// Reduced row echelon form. Returns the reduced nonzero rows and the pivot
/// column of each.
pub fn rref(rows: &[QVec], cols: usize) -> (Vec<QVec>, Vec<usize>) {
    let mut m: Vec<QVec> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        m[r] = scale(&inv, &m[r]);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pr = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[QVec], cols: usize) -> usize {
    rref(rows, cols).1.len()
}

/// Basis of `{x | row·x = 0 for every row}`, one vector per free column, in
/// increasing free-column order.
pub fn nullspace(rows: &[QVec], cols: usize) -> Vec<QVec> {
    let (r, pivots) = rref(rows, cols);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = zeros(cols);
        v[free] = Q::one();
        for (row, &pc) in r.iter().zip(&pivots) {
            v[pc] = -row[free].clone();
        }
        out.push(v);
    }
    out
}

/// Solves the square system `M x = b`, `None` when `M` is singular.
pub fn solve(m: &[QVec], b: &[Q]) -> Option<QVec> {
    let n = m.len();
    let aug: Vec<QVec> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, n + 1);
    if pivots.len() != n || pivots.iter().any(|&p| p == n) {
        return None;
    }
    Some(r.iter().map(|row| row[n].clone()).collect())
}

pub fn inverse(m: &[QVec]) -> Option<Vec<QVec>> {
    let n = m.len();
    let cols: Vec<QVec> = (0..n).map(|i| solve(m, &unit(n, i))).collect::<Option<_>>()?;
    Some(transpose(&cols, n))
}

pub fn identity(n: usize) -> Vec<QVec> {
    (0..n).map(|i| unit(n, i)).collect()
}

pub fn parse_q(s: &str) -> Result<Q> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        Ok(Q::new(n, d))
    } else {
        BigInt::from_str(t)
            .map(Q::from_integer)
            .map_err(|_| Error::Parse(format!("bad rational `{s}`")))
    }
}

/// Comma separated rationals, e.g. `1/2, 0, -1`.
pub fn parse_qvec(s: &str) -> Result<QVec> {
    s.split(',').map(parse_q).collect()
}

pub struct Show<'a>(pub &'a [Q]);

impl fmt::Display for Show<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

pub fn fmt_qvec(v: &[Q]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

/// Serde helpers writing rationals as strings such as `"-1/2"`.
pub mod ser {
    use super::{Q, QVec};
    use serde::ser::{SerializeSeq, Serializer};

    pub fn qvec<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn qmat<S: Serializer>(m: &[QVec], s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
        s.collect_seq(rows)
    }
}

pub fn sign(x: &Q) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_plane() {
        let ns = nullspace(&[qvec(&[1, 1, 0])], 3);
        assert_eq!(ns, vec![qvec(&[-1, 1, 0]), qvec(&[0, 0, 1])]);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = vec![qvec(&[2, 1]), qvec(&[1, 1])];
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![qvec(&[1, -1]), qvec(&[-1, 2])]);
        assert!(inverse(&[qvec(&[1, 2]), qvec(&[2, 4])]).is_none());
    }

    #[test]
    fn primitive_scaling() {
        assert_eq!(primitive(&[qf(1, 2), qf(-3, 4)]), qvec(&[2, -3]));
        assert_eq!(primitive(&[q(0), q(-6)]), qvec(&[0, -1]));
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_qvec("1/2, -3, 0").unwrap(), vec![qf(1, 2), q(-3), q(0)]);
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }
}
