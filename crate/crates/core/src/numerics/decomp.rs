//! Iwasawa and polar decompositions.

use nalgebra::DVector;

use super::realization::{Mat, MatrixRealization};
use crate::error::{Error, Result};

/// Largest singular value.
pub fn op_norm(m: &Mat) -> f64 {
    if m.nrows() == 2 && m.ncols() == 2 {
        let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let f = a * a + b * b + c * c + d * d;
        let det = a * d - b * c;
        let disc = (f * f - 4.0 * det * det).max(0.0).sqrt();
        return ((f + disc) / 2.0).sqrt();
    }
    m.clone().svd(false, false).singular_values.max()
}

#[derive(Debug, Clone)]
pub struct Iwasawa {
    pub k: Mat,
    pub a: Mat,
    pub n: Mat,
}

/// `g = k a n` with `k` orthogonal, `a` positive diagonal and `n` unipotent
/// upper triangular.
pub fn iwasawa(g: &Mat) -> Result<Iwasawa> {
    let size = g.nrows();
    if g.ncols() != size {
        return Err(Error::Dimension("square matrix expected".into()));
    }
    let qr = g.clone().qr();
    let (mut q, mut r) = (qr.q(), qr.r());
    let scale = g.norm().max(f64::MIN_POSITIVE);
    for i in 0..size {
        if r[(i, i)].abs() <= 1e-14 * scale {
            return Err(Error::Singular);
        }
        if r[(i, i)] < 0.0 {
            q.column_mut(i).neg_mut();
            r.row_mut(i).neg_mut();
        }
    }
    let d = r.diagonal();
    let mut n = r.clone();
    for i in 0..size {
        let di = d[i];
        n.row_mut(i).iter_mut().for_each(|x| *x /= di);
    }
    Ok(Iwasawa { k: q, a: Mat::from_diagonal(&d), n })
}

/// Polar coordinate of `g·z₀` for `G/K`: log singular values in ascending
/// order, truncated to catalog coordinates.
pub fn polar_coordinate(g: &Mat, real: &MatrixRealization) -> Result<Vec<f64>> {
    if !real.riemannian {
        return Err(Error::Unsupported(format!("polar coordinates for {}", real.name)));
    }
    let size = real.n;
    if g.nrows() != size || g.ncols() != size {
        return Err(Error::Dimension(format!("expected a {size}x{size} matrix")));
    }
    let svd = g.clone().svd(true, true);
    let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v requested"));
    let mut idx: Vec<usize> = (0..size).collect();
    let s = &svd.singular_values;
    idx.sort_by(|&i, &j| s[i].total_cmp(&s[j]));
    if s[idx[0]] <= 0.0 {
        return Err(Error::Singular);
    }
    let logs: Vec<f64> = idx.iter().map(|&i| s[i].ln()).collect();
    // residual: g = U' exp(X) V' with U', V' ∈ SO(n) after reordering
    let mut up = Mat::zeros(size, size);
    let mut vp = Mat::zeros(size, size);
    for (c, &i) in idx.iter().enumerate() {
        up.set_column(c, &u.column(i));
        vp.set_row(c, &vt.row(i));
    }
    if up.determinant() < 0.0 {
        up.column_mut(0).neg_mut();
        vp.row_mut(0).neg_mut();
    }
    let sigma = Mat::from_diagonal(&DVector::from_iterator(size, logs.iter().map(|l| l.exp())));
    let resid = (&up * sigma * &vp - g).norm() / g.norm();
    if resid > 1e-8 {
        return Err(Error::NonConvergence(format!("polar reconstruction residual {resid:e}")));
    }
    let det_log: f64 = logs.iter().sum();
    if det_log.abs() > 1e-8 * (1.0 + logs.iter().map(|l| l.abs()).sum::<f64>()) {
        return Err(Error::InvalidArgument("polar coordinates need determinant one".into()));
    }
    Ok(logs[..size - 1].to_vec())
}
