//! Weighted `L²` and sup seminorms of radial functions on rank-one
//! Riemannian realizations.
//!
//! A point of the negative chamber is `x = −r` with `r ≥ 0`. The radial
//! density is `|sinh 2ρ_u(x)|`, the weights are `w = ‖x‖` and
//! `v = e^{−2ρ_u(x)}`. Integrands are evaluated in log scale so that
//! tails far out do not overflow.

use std::sync::Arc;

use serde::Serialize;

use super::realization::MatrixRealization;
use super::volume::golden_min;
use crate::error::{Error, Result};

/// Radial test functions, given through `ln |f|`.
#[derive(Clone)]
pub enum Profile {
    /// `exp(−(w/σ)²)`.
    Gaussian { sigma: f64 },
    /// `v^{−1/2} (1 + w)^{−k}`.
    PowerDecay { k: f64 },
    /// `v^{−a} exp(−c w)`.
    ExpDecay { a: f64, c: f64 },
    /// `ln |f|` as a function of `(w, ln v)`.
    Custom { name: String, ln_f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> },
}

impl std::fmt::Debug for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl Profile {
    pub fn label(&self) -> String {
        match self {
            Profile::Gaussian { sigma } => format!("gaussian(sigma={sigma})"),
            Profile::PowerDecay { k } => format!("power(k={k})"),
            Profile::ExpDecay { a, c } => format!("exp(a={a},c={c})"),
            Profile::Custom { name, .. } => name.clone(),
        }
    }

    /// Parses `gaussian[:σ]`, `power:k` or `exp:a:c`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts
                .get(i)
                .ok_or_else(|| Error::InvalidArgument(format!("profile '{s}' is missing a parameter")))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidArgument(format!("profile '{s}': {e}")))
        };
        match parts[0].trim() {
            "gaussian" => Ok(Profile::Gaussian { sigma: if parts.len() > 1 { num(1)? } else { 1.0 } }),
            "power" => Ok(Profile::PowerDecay { k: num(1)? }),
            "exp" => Ok(Profile::ExpDecay { a: num(1)?, c: num(2)? }),
            other => Err(Error::InvalidArgument(format!("unknown profile '{other}' (gaussian, power, exp)"))),
        }
    }

    pub fn ln_abs(&self, w: f64, ln_v: f64) -> f64 {
        match self {
            Profile::Gaussian { sigma } => -(w / sigma).powi(2),
            Profile::PowerDecay { k } => -0.5 * ln_v - k * (1.0 + w).ln(),
            Profile::ExpDecay { a, c } => -a * ln_v - c * w,
            Profile::Custom { ln_f, .. } => ln_f(w, ln_v),
        }
    }
}

/// Radial data `(w, ln v, ln J)` at distance `r` from the base point.
struct Radial {
    two_rho: f64,
    norm: f64,
}

impl Radial {
    fn new(real: &MatrixRealization) -> Result<Self> {
        if real.a.len() != 1 || !real.riemannian {
            return Err(Error::Unsupported(format!(
                "seminorm quadrature needs a rank-one Riemannian realization, got {}",
                real.name
            )));
        }
        Ok(Radial { two_rho: 2.0 * real.rho_u[0].abs(), norm: real.norm(&[1.0]) })
    }

    fn w(&self, r: f64) -> f64 {
        self.norm * r
    }

    fn ln_v(&self, r: f64) -> f64 {
        self.two_rho * r
    }

    fn ln_density(&self, r: f64) -> f64 {
        let t = self.two_rho * r;
        if t <= 0.0 {
            return f64::NEG_INFINITY;
        }
        // ln sinh t = t − ln 2 + ln(1 − e^{−2t})
        t - std::f64::consts::LN_2 + (-(-2.0 * t).exp()).ln_1p()
    }
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || !delta.is_finite() {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    // Coarse pass to set an absolute scale for the tolerance.
    let n = 16;
    let h = (b - a) / n as f64;
    let samples: Vec<f64> = (0..=n).map(|i| f(a + h * i as f64)).collect();
    let scale = samples.iter().map(|s| s.abs()).fold(0.0, f64::max) * (b - a);
    let tol = (rel_tol * scale).max(f64::MIN_POSITIVE);
    let mut total = 0.0;
    for i in 0..n / 2 {
        let (x0, x2) = (a + h * (2 * i) as f64, a + h * (2 * i + 2) as f64);
        let (f0, f1, f2) = (samples[2 * i], samples[2 * i + 1], samples[2 * i + 2]);
        let whole = (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2);
        total += simpson(f, x0, x2, f0, f1, f2, whole, tol / (n / 2) as f64, 14);
    }
    total
}

const MAX_DOUBLINGS: usize = 900;
const DIVERGENT_RATIO: f64 = 0.999;

/// `∫_0^∞ exp(g(r)) dr` over the pieces `[0, 1]`, `[1, 2]`, `[2, 4]`, ….
/// Returns `+∞` when the piece ratios settle at or above `0.999`; the
/// remaining tail is extrapolated geometrically once the ratios stabilize.
fn radial_integral(g: &impl Fn(f64) -> f64) -> Result<f64> {
    let f = |r: f64| g(r).exp();
    let mut total = adaptive_simpson(&f, 0.0, 1.0, 1e-12);
    let mut pieces: Vec<f64> = Vec::new();
    let mut a = 1.0;
    for _ in 0..MAX_DOUBLINGS {
        let piece = adaptive_simpson(&f, a, 2.0 * a, 1e-12);
        if !piece.is_finite() {
            return Ok(f64::INFINITY);
        }
        total += piece;
        pieces.push(piece);
        a *= 2.0;
        if piece <= 1e-16 * total {
            return Ok(total);
        }
        let k = pieces.len();
        if k >= 4 {
            let q = pieces[k - 1] / pieces[k - 2];
            let q_prev = pieces[k - 2] / pieces[k - 3];
            if !q.is_finite() || !q_prev.is_finite() {
                continue;
            }
            if q >= DIVERGENT_RATIO && q_prev >= DIVERGENT_RATIO && k >= 8 {
                return Ok(f64::INFINITY);
            }
            if q < DIVERGENT_RATIO && (q - q_prev).abs() <= 1e-6 * q.max(1e-300) {
                return Ok(total + piece * q / (1.0 - q));
            }
        }
    }
    Err(Error::NonConvergence(format!("radial integral unsettled after {MAX_DOUBLINGS} doublings")))
}

/// `p_n(f) = (∫ |f|² (1+w)^{2n} J dr)^{1/2}`.
pub fn p_seminorm(profile: &Profile, n: f64, real: &MatrixRealization) -> Result<f64> {
    let rad = Radial::new(real)?;
    let g = |r: f64| {
        let w = rad.w(r);
        2.0 * profile.ln_abs(w, rad.ln_v(r)) + 2.0 * n * (1.0 + w).ln() + rad.ln_density(r)
    };
    Ok(radial_integral(&g)?.sqrt())
}

/// `q_m(f) = sup |f| √v (1+w)^m`; `+∞` when still increasing far out.
pub fn q_seminorm(profile: &Profile, m: f64, real: &MatrixRealization) -> Result<f64> {
    let rad = Radial::new(real)?;
    let g = |r: f64| {
        let w = rad.w(r);
        profile.ln_abs(w, rad.ln_v(r)) + 0.5 * rad.ln_v(r) + m * (1.0 + w).ln()
    };
    let mut grid: Vec<f64> = (0..=4000).map(|i| i as f64 * 2e-3).collect();
    let mut r = 8.0;
    while r < 1e6 {
        r *= 1.05;
        grid.push(r);
    }
    let values: Vec<f64> = grid.iter().map(|&r| g(r)).collect();
    let (imax, &gmax) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");
    let last = values.len() - 1;
    // Rounding in the cancelling log terms grows with r.
    let r_last = grid[last];
    let slack = 1e-9 * (1.0 + rad.ln_v(r_last) + m.abs() * (1.0 + rad.w(r_last)).ln() + values[last].abs());
    if values[last] > values[last - 1] + slack {
        return Ok(f64::INFINITY);
    }
    let lo = grid[imax.saturating_sub(1)];
    let hi = grid[(imax + 1).min(last)];
    let (_, neg) = golden_min(&|r| -g(r), lo, hi, 80);
    Ok((-neg).max(gmax).exp())
}

/// `C(n, m) = (∫ v^{−1} (1+w)^{−2(m−n)} J dr)^{1/2}`, so that
/// `p_n(f) ≤ C(n, m) q_m(f)` for every `f`.
pub fn comparison_constant(n: f64, m: f64, real: &MatrixRealization) -> Result<f64> {
    let rad = Radial::new(real)?;
    let g = |r: f64| -rad.ln_v(r) - 2.0 * (m - n) * (1.0 + rad.w(r)).ln() + rad.ln_density(r);
    Ok(radial_integral(&g)?.sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct Seminorms {
    pub profile: String,
    pub n: f64,
    pub m: f64,
    pub p_n: f64,
    pub q_m: f64,
}

pub fn schwartz_seminorms(profile: &Profile, n: f64, m: f64, real: &MatrixRealization) -> Result<Seminorms> {
    Ok(Seminorms {
        profile: profile.label(),
        n,
        m,
        p_n: p_seminorm(profile, n, real)?,
        q_m: q_seminorm(profile, m, real)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::realization::realization;

    #[test]
    fn gaussian_is_finite() {
        let r = realization("sl2_gk").unwrap();
        let s = schwartz_seminorms(&Profile::Gaussian { sigma: 1.0 }, 0.0, 3.0, &r).unwrap();
        assert!(s.p_n > 0.0 && s.p_n.is_finite());
        assert!(s.q_m.is_finite());
        // ∫ e^{−4r²} sinh 2r dr with w = √2 r
        let direct = adaptive_simpson(&|t: f64| (-4.0 * t * t).exp() * (2.0 * t).sinh(), 0.0, 10.0, 1e-13);
        assert!((s.p_n * s.p_n - direct).abs() < 1e-9 * direct);
    }

    #[test]
    fn power_decay_threshold() {
        let r = realization("sl2_gk").unwrap();
        // f² J (1+w)^{2n} ~ (1+w)^{2n−2k}/2; finite iff 2k − 2n > 1.
        for (k, n, finite) in [(2.0, 0.0, true), (2.0, 1.0, true), (2.0, 1.5, false), (1.0, 0.5, false), (3.0, 2.4, true)] {
            let p = p_seminorm(&Profile::PowerDecay { k }, n, &r).unwrap();
            assert_eq!(p.is_finite(), finite, "k={k} n={n} p={p}");
        }
        // Closed form for k = 2, n = 0: ∫ (1+√2 r)^{−4} (1 − e^{−4r})/2 dr.
        let p = p_seminorm(&Profile::PowerDecay { k: 2.0 }, 0.0, &r).unwrap();
        let s2 = 2f64.sqrt();
        let first = 1.0 / (3.0 * s2);
        let second = adaptive_simpson(&|t: f64| (1.0 + s2 * t).powi(-4) * (-4.0 * t).exp(), 0.0, 40.0, 1e-13);
        let oracle = 0.5 * (first - second);
        assert!((p * p - oracle).abs() < 1e-8 * oracle, "{} vs {oracle}", p * p);
    }

    #[test]
    fn sup_seminorm() {
        let r = realization("sl2_gk").unwrap();
        let q = q_seminorm(&Profile::PowerDecay { k: 2.0 }, 2.0, &r).unwrap();
        assert!((q - 1.0).abs() < 1e-9);
        assert!(q_seminorm(&Profile::PowerDecay { k: 2.0 }, 2.5, &r).unwrap().is_infinite());
        let g = q_seminorm(&Profile::Gaussian { sigma: 1.0 }, 0.0, &r).unwrap();
        // max of e^{−2r²+r}: r = 1/4
        assert!((g - (0.125f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn comparison_holds() {
        let r = realization("sl2_gk").unwrap();
        let c = comparison_constant(0.0, 2.0, &r).unwrap();
        let prof = Profile::PowerDecay { k: 2.0 };
        let p = p_seminorm(&prof, 0.0, &r).unwrap();
        let q = q_seminorm(&prof, 2.0, &r).unwrap();
        // equality case
        assert!((p - c * q).abs() < 1e-8 * p, "p={p} c={c} q={q}");
        assert!(comparison_constant(0.0, 0.5, &r).unwrap().is_infinite());
    }

    #[test]
    fn rejects_higher_rank() {
        let r = realization("sl3_gk").unwrap();
        assert!(matches!(p_seminorm(&Profile::Gaussian { sigma: 1.0 }, 0.0, &r), Err(Error::Unsupported(_))));
        assert!(Profile::parse("power:2").is_ok() && Profile::parse("bogus").is_err());
    }
}
