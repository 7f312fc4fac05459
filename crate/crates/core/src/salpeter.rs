//! Point interaction for the one-dimensional operator `sqrt(-d^2/dx^2 + 1)`.
//!
//! The self-adjoint extensions of the operator restricted away from the
//! origin form a one-parameter family. The parameter is fixed by the
//! subtracted bound-state condition
//!
//! `g(E) = (1/2 pi) int dp [1/(w(p) - E) - 1/(w(p) + 1)] = alpha`, `w = sqrt(p^2 + 1)`,
//!
//! so that `alpha = 0` is the extension with a bound state at `E = -1`. The
//! bound state itself is `psi(x) = int dp e^{ipx} / (w(p) - E)`, which grows
//! like `-2 ln|x|` at the origin.

use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::{composite, graded_edges, GaussLegendre};
use crate::roots::{bisect, secant};

fn rule() -> GaussLegendre {
    GaussLegendre::new(16)
}

fn check_energy(e: f64) -> Result<()> {
    if e.is_nan() || e >= 1.0 {
        return Err(Error::domain("energy must lie below the continuum edge 1"));
    }
    if !e.is_finite() {
        return Err(Error::domain("energy must be finite"));
    }
    Ok(())
}

/// `cosh t - E` written without cancellation for `E` near 1.
fn gap_to(t: f64, gap: f64) -> f64 {
    let s = (0.5 * t).sinh();
    2.0 * s * s + gap
}

/// `g(E)`, the subtracted bound-state function. With `p = sinh t` it is
/// `(1/pi) int_0^inf cosh t (E + 1) / ((cosh t - E)(cosh t + 1)) dt`.
pub fn dispersion(e: f64) -> Result<f64> {
    check_energy(e)?;
    if e == -1.0 {
        return Ok(0.0);
    }
    let gap = 1.0 - e;
    let h0 = (0.05 * gap.sqrt()).min(0.25);
    let t_max = (2.0 + 2.0 * e.abs()).ln() + 40.0;
    let edges = graded_edges(t_max, h0, 1.15, 0.5);
    let body = composite(&rule(), &edges, |t| {
        let c = t.cosh();
        c * (e + 1.0) / (gap_to(t, gap) * (c + 1.0))
    });
    // beyond t_max the integrand is 2 (E + 1) e^{-t}
    let tail = 2.0 * (e + 1.0) * (-t_max).exp();
    Ok((body + tail) / PI)
}

/// `K_0(x) = int_0^inf exp(-x cosh t) dt` for `x > 0`.
pub fn bessel_k0(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    let t_max = (1.0 + 40.0 / x).acosh().max(1.0);
    let h = (1.0 / x.sqrt()).min(0.5);
    let edges = graded_edges(t_max, h, 1.0, h);
    composite(&rule(), &edges, |t| (-x * (t.cosh() - 1.0)).exp()) * (-x).exp()
}

/// `int_0^inf exp(-x cosh t) / (sinh^2 t + E^2) dt`, `E != 0`.
fn cut_remainder(x: f64, e: f64) -> f64 {
    let t_max = (1.0 + 40.0 / x).acosh().max(20.0);
    let h_max = (1.0 / x.sqrt()).min(0.5);
    let edges = graded_edges(t_max, (0.25 * e.abs()).min(h_max), 1.3, h_max);
    composite(&rule(), &edges, |t| {
        let s = t.sinh();
        (-x * t.cosh()).exp() / (s * s + e * e)
    })
}

/// Unnormalized `int dp e^{ipx} / (w(p) - E)`, evaluated from the branch cut
/// on `p = i y`, `y > 1`, plus the pole at `p = i sqrt(1 - E^2)` when `E > 0`.
pub fn raw_profile(x: f64, e: f64) -> Result<f64> {
    check_energy(e)?;
    let x = x.abs();
    if x == 0.0 {
        return Ok(f64::INFINITY);
    }
    let mut v = 2.0 * bessel_k0(x);
    if e != 0.0 {
        v -= 2.0 * e * e * cut_remainder(x, e);
    }
    if e > 0.0 {
        let kappa = (1.0 - e * e).sqrt();
        v += 2.0 * PI * e * (-kappa * x).exp() / kappa;
    }
    Ok(v)
}

/// `int |psi_raw|^2 dx = 4 pi int_0^inf dp / (w - E)^2`.
fn raw_norm_squared(e: f64) -> f64 {
    let gap = 1.0 - e;
    let h0 = (0.05 * gap.sqrt()).min(0.25);
    let t_max = (2.0 + 2.0 * e.abs()).ln() + 40.0;
    let edges = graded_edges(t_max, h0, 1.15, 0.5);
    4.0 * PI
        * composite(&rule(), &edges, |t| {
            let d = gap_to(t, gap);
            t.cosh() / (d * d)
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootMethod {
    Bisection,
    Secant,
}

/// Bracket `[lo, hi]` of energies with `g(lo) <= alpha <= g(hi)`.
fn energy_bracket(alpha: f64) -> Result<(f64, f64)> {
    if !alpha.is_finite() {
        return Err(Error::invalid("extension parameter must be finite"));
    }
    if alpha >= 0.0 {
        for k in 1..=26 {
            let hi = 1.0 - 4f64.powi(-k);
            if dispersion(hi)? >= alpha {
                return Ok((-1.0, hi));
            }
        }
        Err(Error::no_convergence(
            "bound-state energy closer to the continuum than double precision resolves",
            alpha,
        ))
    } else {
        let mut beta = 1.0;
        while beta <= 512.0 {
            let lo = -beta.cosh();
            if dispersion(lo)? <= alpha {
                return Ok((lo, -1.0));
            }
            beta *= 2.0;
        }
        Err(Error::no_convergence("bound-state energy below representable range", alpha))
    }
}

/// Solves `g(E) = alpha`.
pub fn solve_energy(alpha: f64, method: RootMethod) -> Result<f64> {
    let (lo, hi) = energy_bracket(alpha)?;
    match method {
        RootMethod::Bisection => {
            let tol = 1e-15 * lo.abs().max(1.0);
            let mut err = None;
            let b = bisect(
                |e| match dispersion(e) {
                    Ok(g) => g - alpha,
                    Err(x) => {
                        err.get_or_insert(x);
                        f64::NAN
                    }
                },
                lo,
                hi,
                tol,
            )?;
            match err {
                Some(e) => Err(e),
                None => Ok(b.value),
            }
        }
        RootMethod::Secant => {
            // E = 1 - e^y keeps every iterate below the continuum edge
            let energy = |y: f64| 1.0 - y.exp();
            let h = |y: f64| dispersion(energy(y)).map_or(f64::NAN, |g| g - alpha);
            let y = secant(h, (1.0 - lo).ln(), (1.0 - hi).ln(), 1e-14, 200)?;
            Ok(energy(y))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SalpeterBoundState {
    pub alpha: f64,
    pub energy: f64,
    /// `|E_bisection - E_secant| / max(1, |E|)`
    pub solver_spread: f64,
    /// Multiplier turning the raw profile into a unit vector.
    pub normalization: f64,
    /// `(x, psi(x))`, symmetric about the origin.
    pub samples: Vec<(f64, f64)>,
}

impl SalpeterBoundState {
    pub fn profile(&self, x: f64) -> Result<f64> {
        Ok(self.normalization * raw_profile(x, self.energy)?)
    }
}

/// Bound state of the extension labelled by `alpha`. Every finite `alpha`
/// has exactly one, since `g` increases from `-inf` to `+inf` on `E < 1`.
pub fn bound_state(alpha: f64) -> Result<SalpeterBoundState> {
    let energy = solve_energy(alpha, RootMethod::Bisection)?;
    let other = solve_energy(alpha, RootMethod::Secant)?;
    let normalization = raw_norm_squared(energy).sqrt().recip();
    let mut positive = Vec::with_capacity(101);
    for i in 0..=100 {
        let x = 10f64.powf(-4.0 + 5.0 * i as f64 / 100.0);
        positive.push((x, normalization * raw_profile(x, energy)?));
    }
    let mut samples: Vec<(f64, f64)> = positive.iter().rev().map(|&(x, v)| (-x, v)).collect();
    samples.extend(positive);
    Ok(SalpeterBoundState {
        alpha,
        energy,
        solver_spread: (energy - other).abs() / energy.abs().max(1.0),
        normalization,
        samples,
    })
}

/// Number of solutions of `g(E) = alpha` below threshold, counted as sign
/// changes on a grid running from `-cosh 600` up to `1 - 2^-48`.
pub fn count_bound_states(alpha: f64) -> Result<usize> {
    if !alpha.is_finite() {
        return Err(Error::invalid("alpha must be finite"));
    }
    let mut grid: Vec<f64> = (0..=200).rev().map(|k| -(3.0 * k as f64).cosh()).collect();
    grid.extend((1..=60).map(|k| 1.0 - 2f64.powf(-0.8 * k as f64)));
    let mut count = 0;
    let mut prev = dispersion(grid[0])? - alpha;
    for &e in &grid[1..] {
        let cur = dispersion(e)? - alpha;
        if (cur > 0.0) != (prev > 0.0) {
            count += 1;
        }
        prev = cur;
    }
    Ok(count)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub c: f64,
    pub d: f64,
    /// `|psi - c ln x - d|_2 / |psi|_2` over the fitted samples.
    pub residual: f64,
    pub points: usize,
}

/// Least-squares fit `psi(x) = c ln|x| + d` on `x in [1e-4, 1e-3] * l`, with
/// `l = min(1, 1/|E|)` the length scale of the state.
pub fn log_boundary_check(state: &SalpeterBoundState, points: usize) -> Result<LogFit> {
    if points < 3 {
        return Err(Error::invalid("log fit needs at least three points"));
    }
    let scale = (1.0 / state.energy.abs()).min(1.0);
    let mut xs = Vec::with_capacity(points);
    let mut ys = Vec::with_capacity(points);
    for i in 0..points {
        let x = scale * 10f64.powf(-4.0 + i as f64 / (points - 1) as f64);
        xs.push(x.ln());
        ys.push(state.profile(x)?);
    }
    let n = points as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = xs.iter().map(|a| (a - mx).powi(2)).sum();
    let c = sxy / sxx;
    let d = my - c * mx;
    let res: f64 = xs.iter().zip(&ys).map(|(a, b)| (b - c * a - d).powi(2)).sum();
    let norm: f64 = ys.iter().map(|b| b * b).sum();
    let fit = LogFit {
        c,
        d,
        residual: (res / norm).sqrt(),
        points,
    };
    if !(fit.c.is_finite() && fit.d.is_finite() && fit.residual.is_finite()) {
        return Err(Error::no_convergence("logarithmic boundary fit", fit.residual));
    }
    Ok(fit)
}
