//! Ball volumes `vol_Z(B·exp(X)·z₀)` by Monte Carlo, growth scans and the
//! weights `w`, `v`.
//!
//! The two `SL(2,ℝ)` spaces are modeled as adjoint orbits `Ad(G)Y₀` in
//! `sl(2) ≅ ℝ^{2,1}`, where `Y = [[x, y+z], [y−z, −x]]`. In cylindrical
//! coordinates `(z, θ)` the invariant measure is `dz dθ`, and the region is
//! invariant under `K`, which rotates `θ`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::decomp::{op_norm, polar_coordinate};
use super::realization::{HKind, Mat, MatrixRealization};
use crate::error::{Error, Result};

const CHUNK: usize = 1024;
pub const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallSpec {
    pub radius: f64,
}

impl BallSpec {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 1.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("ball radius must exceed 1, got {radius}")));
        }
        Ok(BallSpec { radius })
    }

    pub fn contains(&self, g: &Mat) -> bool {
        let inv = match g.clone().try_inverse() {
            Some(i) => i,
            None => return false,
        };
        op_norm(g).max(op_norm(&inv)) <= self.radius
    }
}

pub(super) fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `min_{h∈H} max(||g h e^{−X}||, ||e^X h^{-1} g^{-1}||)`, the smallest ball
/// radius with `g·z₀ ∈ B·exp(X)·z₀`. Stops early once `stop_below` is
/// reached.
pub fn translate_radius(real: &MatrixRealization, g: &Mat, x: &[f64], stop_below: f64) -> Result<f64> {
    let ex = real.exp_a(x)?;
    let emx = Mat::from_diagonal(&ex.diagonal().map(|v| 1.0 / v));
    let ginv = g.clone().try_inverse().ok_or(Error::Singular)?;
    let eval = |h: &Mat, hinv: &Mat| op_norm(&(g * h * &emx)).max(op_norm(&(&ex * hinv * &ginv)));
    match real.h_kind {
        HKind::Everything => Ok(1.0),
        HKind::Circle | HKind::Hyperbolic => {
            let f = |s: f64| {
                let h = real.h_element(s).expect("one-parameter H");
                let hinv = real.h_element(-s).expect("one-parameter H");
                eval(&h, &hinv)
            };
            let (lo, hi, steps) = if real.h_kind == HKind::Circle {
                (0.0, PI, 72)
            } else {
                // expand the bracket until the minimum is interior
                let mut l = 2.0;
                loop {
                    let best = grid_best(&f, -l, l, 40);
                    if best.0 > 0 && best.0 < 40 || l > 64.0 {
                        break;
                    }
                    l *= 2.0;
                }
                (-l, l, 40)
            };
            let (i, v) = grid_best(&f, lo, hi, steps);
            if v <= stop_below {
                return Ok(v);
            }
            let step = (hi - lo) / steps as f64;
            let c = lo + i as f64 * step;
            Ok(golden_min(&f, c - step, c + step, 60).1.min(v))
        }
        HKind::Other => Err(Error::Unsupported(format!("membership search for {}", real.name))),
    }
}

fn grid_best(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> (usize, f64) {
    (0..=steps)
        .map(|i| (i, f(lo + (hi - lo) * i as f64 / steps as f64)))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc })
}

pub fn in_translated_ball(real: &MatrixRealization, g: &Mat, x: &[f64], ball: &BallSpec) -> Result<bool> {
    Ok(translate_radius(real, g, x, ball.radius)? <= ball.radius)
}

/// An element `g = k_φ a_s` with `Ad(g)Y₀` at cylindrical position `(z, θ)`.
fn orbit_representative(real: &MatrixRealization, z: f64, theta: f64) -> Mat {
    let s = match real.h_kind {
        HKind::Circle => z.max(1.0).acosh() / 2.0,
        _ => z.asinh() / 2.0,
    };
    // Ad(k_φ) rotates (x, y) by −2φ; Ad(a_s)Y₀ sits at θ = π/2.
    let phi = (PI / 2.0 - theta) / 2.0;
    let k = Mat::from_row_slice(2, 2, &[phi.cos(), phi.sin(), -phi.sin(), phi.cos()]);
    let a = Mat::from_row_slice(2, 2, &[s.exp(), 0.0, 0.0, (-s).exp()]);
    k * a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub analytic_reference: Option<f64>,
}

/// Exact volume for `SL(2,ℝ)/SO(2)`: an annulus of hyperbolic radii
/// `|d₀ ± 2 log R|` about the base point, `d₀ = 2|x|`.
fn sl2_gk_reference(x: f64, ball: &BallSpec) -> f64 {
    let d0 = 2.0 * x.abs();
    let r0 = 2.0 * ball.radius.ln();
    let inner = if d0 > r0 { (d0 - r0).cosh() } else { 1.0 };
    2.0 * PI * ((d0 + r0).cosh() - inner)
}

/// Monte Carlo estimate of `vol_Z(B·exp(X)·z₀)` with deterministic chunked
/// sampling.
pub fn ball_volume(
    real: &MatrixRealization,
    x: &[f64],
    ball: &BallSpec,
    n_samples: usize,
    seed: u64,
) -> Result<VolumeEstimate> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!("need at least {MIN_SAMPLES} samples, got {n_samples}")));
    }
    let ex = real.exp_a(x)?;
    if real.h_kind == HKind::Everything {
        return Ok(VolumeEstimate { estimate: 1.0, stderr: 0.0, analytic_reference: Some(1.0) });
    }
    let Some(y0) = real.base_vector.clone() else {
        return Err(Error::Unsupported(format!("volume sampling for {}", real.name)));
    };
    let exinv = ex.clone().try_inverse().ok_or(Error::Singular)?;
    let yx = &ex * y0 * exinv;
    let zmax = ball.radius * ball.radius * yx.norm() / 2f64.sqrt();
    let zmin = if real.h_kind == HKind::Circle { 1.0 } else { -zmax };
    let span = zmax - zmin;
    let chunks = n_samples.div_ceil(CHUNK);
    let hits: Vec<Result<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(n_samples - c * CHUNK);
            let mut h = 0u64;
            for _ in 0..count {
                let z = zmin + span * rng.gen::<f64>();
                let theta = 2.0 * PI * rng.gen::<f64>();
                let g = orbit_representative(real, z, theta);
                if in_translated_ball(real, &g, x, ball)? {
                    h += 1;
                }
            }
            Ok(h)
        })
        .collect();
    let mut total = 0u64;
    for h in hits {
        total += h?;
    }
    let p = total as f64 / n_samples as f64;
    let vol = 2.0 * PI * span;
    let analytic_reference = (real.name == "sl2_gk").then(|| sl2_gk_reference(x[0], ball));
    Ok(VolumeEstimate { estimate: vol * p, stderr: vol * (p * (1.0 - p) / n_samples as f64).sqrt(), analytic_reference })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub t: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub analytic_reference: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthScan {
    pub rows: Vec<ScanRow>,
    pub slope: f64,
    pub slope_stderr: f64,
    /// `−2ρ_u(direction)`.
    pub expected_slope: f64,
}

/// Least-squares slope and its standard error.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let resid: f64 = xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let se = if xs.len() > 2 && sxx > 0.0 { (resid / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    (slope, se)
}

pub fn growth_scan(
    real: &MatrixRealization,
    direction: &[f64],
    ts: &[f64],
    ball: &BallSpec,
    n_samples: usize,
    seed: u64,
) -> Result<GrowthScan> {
    if ts.len() < 2 {
        return Err(Error::InvalidArgument("growth scan needs at least two values of t".into()));
    }
    let mut rows = Vec::new();
    for (i, &t) in ts.iter().enumerate() {
        let x: Vec<f64> = direction.iter().map(|d| d * t).collect();
        let sub_seed = seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let v = ball_volume(real, &x, ball, n_samples, sub_seed)?;
        if !(v.estimate > 0.0) {
            return Err(Error::NonConvergence(format!("zero volume estimate at t = {t}; increase samples")));
        }
        rows.push(ScanRow { t, estimate: v.estimate, stderr: v.stderr, analytic_reference: v.analytic_reference });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.estimate.ln()).collect();
    let (slope, slope_stderr) = fit_slope(&xs, &ys);
    Ok(GrowthScan { rows, slope, slope_stderr, expected_slope: -2.0 * real.rho_u_at(direction) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightSample {
    pub x: Vec<f64>,
    pub w_value: f64,
    pub v_value: f64,
}

/// `w = ||X||`, `v = e^{−2ρ_u(X)}` at the polar coordinate of `g·z₀`.
pub fn weights_at(g: &Mat, real: &MatrixRealization) -> Result<WeightSample> {
    let x = polar_coordinate(g, real)?;
    Ok(WeightSample { w_value: real.norm(&x), v_value: (-2.0 * real.rho_u_at(&x)).exp(), x })
}

/// `sup{||X|| : X = −s·H, g·z₀ ∈ B·exp(X)·z₀}` by a scan in `s` (rank one).
pub fn sup_weight(g: &Mat, real: &MatrixRealization, ball: &BallSpec) -> Result<f64> {
    if real.a.len() != 1 {
        return Err(Error::Unsupported("sup-based weight only in rank one".into()));
    }
    let proxy = weights_at(g, real)?;
    let h_norm = real.norm(&[1.0]);
    let s_max = proxy.w_value / h_norm + 2.0 * ball.radius.ln() + 1.0;
    let step = 0.005;
    let mut best = None;
    let mut s = 0.0;
    while s <= s_max {
        if in_translated_ball(real, g, &[-s], ball)? {
            best = Some(s);
        }
        s += step;
    }
    best.map(|s| s * h_norm).ok_or_else(|| Error::NonConvergence("no admissible translate found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2_from_xyz(x: f64, y: f64, z: f64) -> Mat {
        Mat::from_row_slice(2, 2, &[x, y + z, y - z, -x])
    }
    use crate::numerics::realization::realization;

    #[test]
    fn representative_hits_cylinder_point() {
        for name in ["sl2_gk", "dS2"] {
            let r = realization(name).unwrap();
            let y0 = r.base_vector.clone().unwrap();
            for (z, th) in [(1.7, 0.3), (4.0, 2.5), (2.2, 5.9)] {
                let g = orbit_representative(&r, z, th);
                let y = &g * &y0 * g.clone().try_inverse().unwrap();
                let rad = if name == "sl2_gk" { (z * z - 1.0).sqrt() } else { (z * z + 1.0).sqrt() };
                let want = sl2_from_xyz(rad * th.cos(), rad * th.sin(), z);
                assert!((y - want).norm() < 1e-9, "{name} {z} {th}");
            }
        }
    }

    #[test]
    fn base_point_is_in_ball() {
        let r = realization("sl2_gk").unwrap();
        let b = BallSpec::new(2.0).unwrap();
        assert!(in_translated_ball(&r, &Mat::identity(2, 2), &[0.0], &b).unwrap());
        let far = r.exp_a(&[-3.0]).unwrap();
        assert!(!in_translated_ball(&r, &far, &[0.0], &b).unwrap());
        assert!(in_translated_ball(&r, &far, &[-3.0], &b).unwrap());
        assert!(BallSpec::new(1.0).is_err());
    }

    #[test]
    fn sl2_gk_volume_matches_annulus() {
        let r = realization("sl2_gk").unwrap();
        let b = BallSpec::new(2.0).unwrap();
        for x in [0.0, -1.0] {
            let v = ball_volume(&r, &[x], &b, 20_000, 11).unwrap();
            let exact = v.analytic_reference.unwrap();
            assert!((v.estimate - exact).abs() < 4.0 * v.stderr + 1e-9, "{x}: {} vs {exact} ± {}", v.estimate, v.stderr);
        }
        assert!(ball_volume(&r, &[0.0], &b, 999, 1).is_err());
    }

    #[test]
    fn volume_is_deterministic() {
        let r = realization("dS2").unwrap();
        let b = BallSpec::new(2.0).unwrap();
        let a = ball_volume(&r, &[-0.5], &b, 3000, 5).unwrap();
        let c = ball_volume(&r, &[-0.5], &b, 3000, 5).unwrap();
        assert_eq!(a.estimate.to_bits(), c.estimate.to_bits());
        assert!(a.estimate > 0.0);
    }

    #[test]
    fn weights_at_examples() {
        let r = realization("sl2_gk").unwrap();
        let base = weights_at(&Mat::identity(2, 2), &r).unwrap();
        assert!(base.w_value.abs() < 1e-12 && (base.v_value - 1.0).abs() < 1e-12);
        let t = 1.3;
        let s = weights_at(&r.exp_a(&[-t]).unwrap(), &r).unwrap();
        assert!((s.w_value - t * 2f64.sqrt()).abs() < 1e-10);
        assert!((s.v_value - (2.0 * t).exp()).abs() < 1e-9);
    }

    #[test]
    fn slope_fit() {
        let (s, se) = fit_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((s - 2.0).abs() < 1e-12 && se < 1e-12);
    }
}
