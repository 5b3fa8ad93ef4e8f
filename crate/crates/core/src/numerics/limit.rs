//! Limits of `Ad(exp tX) h` in the Grassmannian, the open-orbit rank test,
//! and the unimodularity test for subalgebras.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::realization::{Mat, MatrixRealization};
use crate::error::{Error, Result};

pub const RANK_TOL: f64 = 1e-8;
pub const CLOSURE_TOL: f64 = 1e-10;

fn vectorize(ms: &[Mat]) -> DMatrix<f64> {
    let rows = ms.first().map_or(0, |m| m.len());
    DMatrix::from_fn(rows, ms.len(), |i, j| ms[j].as_slice()[i])
}

/// Orthonormal basis (columns) of the column span, by SVD with a relative
/// cutoff.
fn orth(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let scaled = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] / m.column(j).norm().max(f64::MIN_POSITIVE));
    let svd = scaled.svd(true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.max();
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > RANK_TOL * smax.max(1.0))
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(m.nrows(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

pub fn numerical_rank(ms: &[Mat]) -> usize {
    orth(&vectorize(ms)).ncols()
}

/// Chordal distance `(Σ sin² θ_i)^{1/2}` over principal angles, computed
/// from projection residuals.
pub fn grassmann_distance(a: &[Mat], b: &[Mat]) -> Result<f64> {
    let qa = orth(&vectorize(a));
    let qb = orth(&vectorize(b));
    if qa.ncols() != qb.ncols() {
        return Err(Error::Dimension(format!("subspaces of dimension {} and {}", qa.ncols(), qb.ncols())));
    }
    let resid = &qa - &qb * (qb.transpose() * &qa);
    Ok(resid.norm())
}

fn ad(g: &Mat, x: &Mat) -> Result<Mat> {
    let ginv = g.clone().try_inverse().ok_or(Error::Singular)?;
    Ok(g * x * ginv)
}

/// `h ∩ z_g(a)` for the subspace `a` of the realization, as matrices.
fn h_cap_l(real: &MatrixRealization) -> Vec<Mat> {
    // Columns: the brackets [a_i, h_j] for all i, stacked, one column per h_j.
    let m = DMatrix::from_fn(real.a.len() * real.n * real.n, real.h.len(), |r, j| {
        let (i, e) = (r / (real.n * real.n), r % (real.n * real.n));
        let br = &real.a[i] * &real.h[j] - &real.h[j] * &real.a[i];
        br.as_slice()[e]
    });
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("v requested");
    let smax = svd.singular_values.max().max(1.0);
    let k = real.h.len();
    let mut null = Vec::new();
    for i in 0..k {
        let s = if i < svd.singular_values.len() { svd.singular_values[i] } else { 0.0 };
        if s <= RANK_TOL * smax {
            let coeffs = vt.row(i);
            let mut v = Mat::zeros(real.n, real.n);
            for (c, hj) in coeffs.iter().zip(&real.h) {
                v += hj * *c;
            }
            null.push(v);
        }
    }
    null
}

/// `h_lim = ū + (h ∩ l)`.
pub fn limit_subalgebra(real: &MatrixRealization) -> Result<Vec<Mat>> {
    let mut out = real.u_bar.clone();
    out.extend(h_cap_l(real));
    if numerical_rank(&out) != real.h.len() {
        return Err(Error::Dimension(format!(
            "dim h_lim = {} differs from dim h = {}",
            numerical_rank(&out),
            real.h.len()
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitRow {
    pub t: f64,
    pub distance: f64,
}

pub fn subalgebra_limit_scan(real: &MatrixRealization, x: &[f64], ts: &[f64]) -> Result<Vec<LimitRow>> {
    let h_lim = limit_subalgebra(real)?;
    let xa = real.a_element(x)?;
    ts.iter()
        .map(|&t| {
            let g = Mat::from_diagonal(&(&xa * t).diagonal().map(f64::exp));
            let moved = real.h.iter().map(|h| ad(&g, h)).collect::<Result<Vec<_>>>()?;
            Ok(LimitRow { t, distance: grassmann_distance(&moved, &h_lim)? })
        })
        .collect()
}

/// `dim(p + Ad(x)h) = dim g`.
pub fn sphericality_check(real: &MatrixRealization, x: &Mat) -> Result<bool> {
    sphericality_check_with(real, &real.h, x)
}

pub fn sphericality_check_with(real: &MatrixRealization, h: &[Mat], x: &Mat) -> Result<bool> {
    let mut all = real.p.clone();
    for hj in h {
        all.push(ad(x, hj)?);
    }
    Ok(numerical_rank(&all) == numerical_rank(&real.g))
}

/// `tr(ad X|_h) = 0` for every basis element, after checking closure.
pub fn unimodularity_check(basis: &[Mat]) -> Result<bool> {
    if basis.is_empty() {
        return Ok(true);
    }
    let v = vectorize(basis);
    let q = orth(&v);
    if q.ncols() != basis.len() {
        return Err(Error::InvalidArgument("subalgebra basis is linearly dependent".into()));
    }
    let scale = basis.iter().map(|b| b.norm()).fold(0.0, f64::max).max(1.0);
    let lsq = v.clone().svd(true, true);
    let mut traces = vec![0.0; basis.len()];
    for (i, xi) in basis.iter().enumerate() {
        for (j, xj) in basis.iter().enumerate() {
            let br = xi * xj - xj * xi;
            let bv = DVector::from_column_slice(br.as_slice());
            let resid = (&bv - &q * (q.transpose() * &bv)).norm();
            if resid > CLOSURE_TOL * scale * scale {
                return Err(Error::NotClosed(resid));
            }
            let coeffs = lsq.solve(&bv, 1e-14).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            traces[i] += coeffs[j];
        }
    }
    Ok(traces.iter().all(|t| t.abs() <= CLOSURE_TOL * scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::realization::{realization, unit};

    #[test]
    fn ds2_limit_is_f() {
        let r = realization("dS2").unwrap();
        let lim = limit_subalgebra(&r).unwrap();
        assert_eq!(lim.len(), 1);
        let rows = subalgebra_limit_scan(&r, &[-1.0], &[0.0, 5.0, 10.0, 20.0]).unwrap();
        assert!(rows[3].distance < 1e-6, "{rows:?}");
        assert!(rows[2].distance < rows[1].distance);
        let opposite = subalgebra_limit_scan(&r, &[1.0], &[0.0, 5.0, 20.0]).unwrap();
        assert!(opposite.iter().all(|r| r.distance > 1e-2));
        let still = subalgebra_limit_scan(&r, &[0.0], &[0.0, 10.0]).unwrap();
        assert_eq!(still[0].distance, still[1].distance);
    }

    #[test]
    fn sphericality_examples() {
        let ds2 = realization("dS2").unwrap();
        assert!(sphericality_check(&ds2, &Mat::identity(2, 2)).unwrap());
        let gk = realization("sl2_gk").unwrap();
        assert!(sphericality_check(&gk, &Mat::identity(2, 2)).unwrap());
        assert!(!sphericality_check_with(&gk, &gk.p.clone(), &Mat::identity(2, 2)).unwrap());
        let sl3 = realization("sl3_gk").unwrap();
        assert!(sphericality_check(&sl3, &Mat::identity(3, 3)).unwrap());
    }

    #[test]
    fn unimodularity_examples() {
        let gk = realization("sl2_gk").unwrap();
        assert!(unimodularity_check(&gk.h).unwrap());
        let sl3 = realization("sl3_gk").unwrap();
        assert!(unimodularity_check(&sl3.h).unwrap());
        let borel = vec![gk.a[0].clone(), unit(2, 0, 1)];
        assert!(!unimodularity_check(&borel).unwrap());
        let mut achi = vec![Mat::from_diagonal(&DVector::from_vec(vec![1.0, 0.3, -1.3]))];
        achi.extend(sl3.n_plus.iter().cloned());
        assert!(!unimodularity_check(&achi).unwrap());
        let not_closed = vec![unit(2, 0, 1), unit(2, 1, 0)];
        assert!(matches!(unimodularity_check(&not_closed), Err(Error::NotClosed(_))));
    }
}
