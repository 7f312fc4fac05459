//! Regularized two-body interactions: scaled short-range potentials, their
//! weak limits, zero-energy scattering and the s-wave Birman-Schwinger kernel.
//!
//! Units are `hbar = 2 mu = 1`, so the radial zero-energy equation for
//! `u(r) = r psi(r)` is `u'' = V u`.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::roots::{brent, Bracket};

const FOUR_PI: f64 = 4.0 * core::f64::consts::PI;

/// A compactly supported radial function.
pub trait Potential {
    fn eval(&self, r: f64) -> f64;
    fn support(&self) -> f64;
}

/// Radial profile, attractive for positive coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `1` on `r <= R`.
    SquareWell,
    /// `exp(-r^2 / width^2)`, truncated at `R`.
    Gaussian { width: f64 },
    /// `exp(-r / range)`, truncated at `R`.
    Exponential { range: f64 },
}

/// `V(r) = -g shape(r)` on `r <= support_radius`, zero beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialPotential {
    pub shape: Shape,
    pub coupling: f64,
    pub support_radius: f64,
}

impl RadialPotential {
    pub fn new(shape: Shape, coupling: f64, support_radius: f64) -> Result<Self> {
        let p = Self {
            shape,
            coupling,
            support_radius,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn square_well(coupling: f64, radius: f64) -> Result<Self> {
        Self::new(Shape::SquareWell, coupling, radius)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.support_radius > 0.0 && self.support_radius.is_finite()) {
            return Err(Error::invalid("support radius must be positive and finite"));
        }
        if !self.coupling.is_finite() {
            return Err(Error::invalid("coupling must be finite"));
        }
        match self.shape {
            Shape::SquareWell => Ok(()),
            Shape::Gaussian { width: s } | Shape::Exponential { range: s } => {
                if s > 0.0 && s.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid("shape length must be positive"))
                }
            }
        }
    }

    pub fn with_coupling(&self, coupling: f64) -> Self {
        Self { coupling, ..*self }
    }

    /// The profile without coupling or sign.
    pub fn profile(&self, r: f64) -> f64 {
        if r > self.support_radius {
            return 0.0;
        }
        match self.shape {
            Shape::SquareWell => 1.0,
            Shape::Gaussian { width } => (-(r * r) / (width * width)).exp(),
            Shape::Exponential { range } => (-r / range).exp(),
        }
    }
}

impl Potential for RadialPotential {
    fn eval(&self, r: f64) -> f64 {
        -self.coupling * self.profile(r)
    }

    fn support(&self) -> f64 {
        self.support_radius
    }
}

/// Power of `1/eps` multiplying the dilated potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingExponent {
    /// `eps^-3`: preserves the L1 norm (contact scaling).
    Contact,
    /// `eps^-3/2`: preserves the L2 norm (point-interaction scaling).
    Point,
}

impl ScalingExponent {
    pub fn power(self) -> f64 {
        match self {
            ScalingExponent::Contact => 3.0,
            ScalingExponent::Point => 1.5,
        }
    }
}

/// `V_eps(r) = eps^-p V(r / eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledPotential {
    pub base: RadialPotential,
    pub eps: f64,
    pub exponent: ScalingExponent,
}

impl ScaledPotential {
    pub fn prefactor(&self) -> f64 {
        self.eps.powf(-self.exponent.power())
    }
}

impl Potential for ScaledPotential {
    fn eval(&self, r: f64) -> f64 {
        self.prefactor() * self.base.eval(r / self.eps)
    }

    fn support(&self) -> f64 {
        self.eps * self.base.support_radius
    }
}

pub fn scale_potential(base: RadialPotential, eps: f64, exponent: ScalingExponent) -> Result<ScaledPotential> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid("eps must be positive"));
    }
    base.validate()?;
    Ok(ScaledPotential { base, eps, exponent })
}

fn radial_rule() -> GaussLegendre {
    GaussLegendre::new(16)
}

/// `int_0^R f(r) dr` on equal panels.
fn radial_integral<F: FnMut(f64) -> f64>(support: f64, panels: usize, mut f: F) -> f64 {
    let rule = radial_rule();
    let h = support / panels as f64;
    (0..panels)
        .map(|i| rule.integrate(i as f64 * h, (i + 1) as f64 * h, &mut f))
        .sum()
}

/// `int |V| d^3x`.
pub fn l1_norm<P: Potential>(v: &P) -> f64 {
    radial_integral(v.support(), 64, |r| FOUR_PI * r * r * v.eval(r).abs())
}

/// `(int V^2 d^3x)^(1/2)`.
pub fn l2_norm<P: Potential>(v: &P) -> f64 {
    radial_integral(v.support(), 64, |r| FOUR_PI * r * r * v.eval(r).powi(2)).sqrt()
}

/// `int V d^3x`.
pub fn volume_integral<P: Potential>(v: &P) -> f64 {
    radial_integral(v.support(), 64, |r| FOUR_PI * r * r * v.eval(r))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakLimitCheck {
    pub eps: Vec<f64>,
    /// `int V_eps(|x|) f(x) d^3x`
    pub integrals: Vec<f64>,
    /// `|int V_eps f - f(0) int V|`
    pub errors: Vec<f64>,
    /// Least-squares slope of `ln error` against `ln eps`; `None` when some
    /// error vanishes.
    pub slope: Option<f64>,
}

/// Pairs `int V_eps(|x|) f(x) d^3x` with `f(0) int V(|x|) d^3x` along an
/// eps sequence. The integral is taken in the dilated variable
/// `x = eps y`, so constant `f` reproduces the base integral exactly for the
/// contact scaling.
pub fn weak_limit_check<F: Fn([f64; 3]) -> f64>(
    base: &RadialPotential,
    exponent: ScalingExponent,
    eps: &[f64],
    f: F,
) -> Result<WeakLimitCheck> {
    base.validate()?;
    if eps.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::invalid("eps must be positive"));
    }
    let mu = GaussLegendre::new(24);
    let nphi = 24;
    let f0 = f([0.0; 3]);
    let base_integral = volume_integral(base);
    let reference = f0 * base_integral;
    let mut integrals = Vec::with_capacity(eps.len());
    let mut errors = Vec::with_capacity(eps.len());
    for &e in eps {
        let angular = |r: f64| -> f64 {
            let mut acc = 0.0;
            for (c, wc) in mu.mapped(-1.0, 1.0) {
                let st = (1.0 - c * c).max(0.0).sqrt();
                let mut ring = 0.0;
                for j in 0..nphi {
                    let ph = core::f64::consts::TAU * j as f64 / nphi as f64;
                    ring += f([e * r * st * ph.cos(), e * r * st * ph.sin(), e * r * c]) - f0;
                }
                acc += wc * ring * core::f64::consts::TAU / nphi as f64;
            }
            acc
        };
        let inner = radial_integral(base.support_radius, 64, |r| r * r * base.eval(r) * angular(r));
        let scale = e.powf(3.0 - exponent.power());
        let deviation = scale * inner + (scale - 1.0) * reference;
        if !deviation.is_finite() {
            return Err(Error::no_convergence("weak-limit quadrature", f64::INFINITY));
        }
        integrals.push(reference + deviation);
        errors.push(deviation.abs());
    }
    let slope = loglog_slope(eps, &errors);
    Ok(WeakLimitCheck {
        eps: eps.to_vec(),
        integrals,
        errors,
        slope,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.len() != y.len() || y.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringOptions {
    pub steps: usize,
    /// `|a| / R` above which the potential counts as resonant.
    pub divergence: f64,
    /// Relative change of `a` allowed when the step is halved.
    pub rel_tol: f64,
}

impl Default for ScatteringOptions {
    fn default() -> Self {
        Self {
            steps: 4000,
            divergence: 1e6,
            rel_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringResult {
    pub a: f64,
    pub resonant: bool,
    /// Change of `a` between step `h` and `h/2`.
    pub step_change: f64,
    /// `(r, u(r))` on the integration grid, subsampled, normalized to
    /// `u'(0) = 1`.
    pub u_solution: Vec<(f64, f64)>,
}

/// RK4 for `u'' = V u` on `[0, R]` with `u(0) = 0`, `u'(0) = 1`.
fn integrate_zero_energy<P: Potential>(v: &P, steps: usize, keep: usize) -> (f64, f64, Vec<(f64, f64)>) {
    let r_max = v.support();
    let h = r_max / steps as f64;
    let (mut u, mut du) = (0.0, 1.0);
    let stride = (steps / keep.max(1)).max(1);
    let mut samples = Vec::with_capacity(keep + 2);
    samples.push((0.0, 0.0));
    for i in 0..steps {
        let r = i as f64 * h;
        let v0 = v.eval(r);
        let vm = v.eval(r + 0.5 * h);
        let v1 = v.eval((r + h).min(r_max));
        let k1u = du;
        let k1d = v0 * u;
        let k2u = du + 0.5 * h * k1d;
        let k2d = vm * (u + 0.5 * h * k1u);
        let k3u = du + 0.5 * h * k2d;
        let k3d = vm * (u + 0.5 * h * k2u);
        let k4u = du + h * k3d;
        let k4d = v1 * (u + h * k3u);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        if (i + 1) % stride == 0 || i + 1 == steps {
            samples.push(((i + 1) as f64 * h, u));
        }
    }
    (u, du, samples)
}

fn length_from(r: f64, u: f64, du: f64) -> f64 {
    if du == 0.0 {
        f64::INFINITY
    } else {
        r - u / du
    }
}

/// Zero-energy scattering length from the exact exterior solution
/// `u = c (r - a)`.
pub fn scattering_length<P: Potential>(v: &P, opts: &ScatteringOptions) -> Result<ScatteringResult> {
    if opts.steps < 2 {
        return Err(Error::invalid("scattering integration needs at least two steps"));
    }
    let r = v.support();
    let (u1, d1, _) = integrate_zero_energy(v, opts.steps, 1);
    let (u2, d2, samples) = integrate_zero_energy(v, 2 * opts.steps, 200);
    if !(u2.is_finite() && d2.is_finite()) {
        return Err(Error::no_convergence("zero-energy radial integration", f64::INFINITY));
    }
    let a = length_from(r, u2, d2);
    let a_coarse = length_from(r, u1, d1);
    let resonant = !a.is_finite() || a.abs() > opts.divergence * r;
    let step_change = if resonant { 0.0 } else { (a - a_coarse).abs() };
    if !resonant && step_change > opts.rel_tol * a.abs().max(r) {
        return Err(Error::no_convergence("scattering length under step halving", step_change));
    }
    Ok(ScatteringResult {
        a,
        resonant,
        step_change,
        u_solution: samples,
    })
}

/// `u'(R)` of the zero-energy solution; vanishes at a resonance.
fn edge_slope(base: &RadialPotential, g: f64, steps: usize) -> f64 {
    integrate_zero_energy(&base.with_coupling(g), steps, 1).1
}

/// The smallest coupling `g* > 0` at which the zero-energy solution is flat
/// outside the support (`1/a = 0`), searched on `(0, g_max]`.
pub fn tune_to_resonance(base: &RadialPotential, g_max: f64, tol: f64) -> Result<Bracket> {
    base.validate()?;
    if !(g_max > 0.0) {
        return Err(Error::invalid("g_max must be positive"));
    }
    let steps = 4000;
    let samples = 400;
    let mut prev = (0.0, edge_slope(base, 0.0, steps));
    for i in 1..=samples {
        let g = g_max * i as f64 / samples as f64;
        let cur = (g, edge_slope(base, g, steps));
        if (cur.1 > 0.0) != (prev.1 > 0.0) {
            return brent(|g| edge_slope(base, g, steps), prev.0, cur.0, tol);
        }
        prev = cur;
    }
    Err(Error::invalid("no zero-energy resonance below g_max"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsGrid {
    pub panels: usize,
    pub order: usize,
}

impl Default for BsGrid {
    fn default() -> Self {
        Self { panels: 48, order: 8 }
    }
}

/// s-wave Green function of `-d^2/dr^2 + kappa^2` with Dirichlet condition
/// at the origin.
fn radial_green(kappa: f64, r: f64, rp: f64) -> f64 {
    let (lo, hi) = if r < rp { (r, rp) } else { (rp, r) };
    if kappa == 0.0 {
        lo
    } else if kappa * lo < 1e-8 {
        lo * (-kappa * (hi - lo)).exp()
    } else {
        // sinh(k lo) e^{-k hi} / k without overflow
        0.5 * ((-kappa * (hi - lo)).exp() - (-kappa * (hi + lo)).exp()) / kappa
    }
}

/// Largest eigenvalue of `|V|^(1/2) (-Delta + lambda)^(-1) |V|^(1/2)` on the
/// s-wave sector, by Nystrom discretization on the support.
pub fn bs_top_eigenvalue<P: Potential>(v: &P, lambda: f64, grid: &BsGrid) -> Result<f64> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda must be non-negative"));
    }
    if grid.panels == 0 || grid.order == 0 {
        return Err(Error::invalid("empty Birman-Schwinger grid"));
    }
    let rule = GaussLegendre::new(grid.order);
    let r_max = v.support();
    let h = r_max / grid.panels as f64;
    let mut nodes = Vec::with_capacity(grid.panels * grid.order);
    for i in 0..grid.panels {
        nodes.extend(rule.mapped(i as f64 * h, (i + 1) as f64 * h));
    }
    let amp: Vec<f64> = nodes.iter().map(|&(r, w)| (v.eval(r).abs() * w).sqrt()).collect();
    let kappa = lambda.sqrt();
    let n = nodes.len();
    let k = DMatrix::from_fn(n, n, |i, j| amp[i] * radial_green(kappa, nodes[i].0, nodes[j].0) * amp[j]);
    let eig = k.symmetric_eigen();
    eig.eigenvalues
        .iter()
        .copied()
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))))
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::no_convergence("Birman-Schwinger eigenvalues", f64::NAN))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsScalingRow {
    pub eps: f64,
    pub mu_top: f64,
    /// `mu_top(eps) / mu_top(1)`
    pub ratio: f64,
    /// `eps^-1` (contact) or `eps^(1/2)` (point)
    pub expected_ratio: f64,
}

/// Zero-energy Birman-Schwinger eigenvalue along an eps sequence.
pub fn bs_scaling_study(
    base: &RadialPotential,
    eps: &[f64],
    exponent: ScalingExponent,
    grid: &BsGrid,
) -> Result<Vec<BsScalingRow>> {
    let mu1 = bs_top_eigenvalue(base, 0.0, grid)?;
    eps.iter()
        .map(|&e| {
            let v = scale_potential(*base, e, exponent)?;
            let mu = bs_top_eigenvalue(&v, 0.0, grid)?;
            Ok(BsScalingRow {
                eps: e,
                mu_top: mu,
                ratio: mu / mu1,
                expected_ratio: e.powf(2.0 - exponent.power()),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn well(g: f64) -> RadialPotential {
        RadialPotential::square_well(g, 1.0).unwrap()
    }

    #[test]
    fn square_well_scattering_length() {
        let k = PI / 4.0;
        let res = scattering_length(&well(k * k), &ScatteringOptions::default()).unwrap();
        let want = 1.0 - k.tan() / k;
        assert!((res.a - want).abs() < 1e-10, "{} vs {want}", res.a);
        assert!(!res.resonant);
    }

    #[test]
    fn free_scattering_length_is_zero() {
        let res = scattering_length(&well(0.0), &ScatteringOptions::default()).unwrap();
        assert!(res.a.abs() < 1e-12);
        assert!(!res.resonant);
    }

    #[test]
    fn square_well_resonance() {
        let b = tune_to_resonance(&well(1.0), 5.0, 1e-12).unwrap();
        assert!((b.value - PI * PI / 4.0).abs() < 1e-8, "{b:?}");
        let opts = ScatteringOptions::default();
        let above = scattering_length(&well(b.value * (1.0 + 1e-4)), &opts).unwrap();
        let below = scattering_length(&well(b.value * (1.0 - 1e-4)), &opts).unwrap();
        assert!(above.a > 1e3 && below.a < -1e3, "{} {}", above.a, below.a);
        let at = scattering_length(&well(b.value), &opts).unwrap();
        assert!(at.resonant);
    }

    #[test]
    fn norms_under_scaling() {
        let base = RadialPotential::new(Shape::Gaussian { width: 1.0 }, 2.0, 5.0).unwrap();
        let l1 = l1_norm(&base);
        let l2 = l2_norm(&base);
        for e in [0.5, 0.1, 0.01] {
            let c = scale_potential(base, e, ScalingExponent::Contact).unwrap();
            assert!((l1_norm(&c) / l1 - 1.0).abs() < 1e-10);
            let p = scale_potential(base, e, ScalingExponent::Point).unwrap();
            assert!((l2_norm(&p) / l2 - 1.0).abs() < 1e-10);
            assert!((l1_norm(&p) / l1 - e.powf(1.5)).abs() < 1e-10);
        }
    }

    #[test]
    fn weak_limit_constant_and_gaussian() {
        let base = well(1.0);
        let eps = [0.2, 0.1, 0.05, 0.025];
        let c = weak_limit_check(&base, ScalingExponent::Contact, &eps, |_| 1.0).unwrap();
        assert!(c.errors.iter().all(|&e| e == 0.0));
        let g = weak_limit_check(&base, ScalingExponent::Contact, &eps, |x| {
            (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp()
        })
        .unwrap();
        let slope = g.slope.unwrap();
        assert!((slope - 2.0).abs() < 0.05, "{slope}");
        let p = weak_limit_check(&base, ScalingExponent::Point, &eps, |_| 1.0).unwrap();
        assert!(p.integrals.windows(2).all(|w| w[1].abs() < w[0].abs()));
    }

    #[test]
    fn bs_eigenvalue_one_at_resonance() {
        let mu = bs_top_eigenvalue(&well(PI * PI / 4.0), 0.0, &BsGrid::default()).unwrap();
        assert!((mu - 1.0).abs() < 1e-3, "{mu}");
        let mu1 = bs_top_eigenvalue(&well(PI * PI / 4.0), 1.0, &BsGrid::default()).unwrap();
        assert!(mu1 < mu);
    }

    #[test]
    fn bs_dilation_identities() {
        let base = well(1.0);
        let grid = BsGrid::default();
        let c = bs_scaling_study(&base, &[0.5], ScalingExponent::Contact, &grid).unwrap();
        assert!((c[0].ratio - 2.0).abs() < 1e-9);
        let p = bs_scaling_study(&base, &[0.25], ScalingExponent::Point, &grid).unwrap();
        assert!((p[0].ratio - 0.5).abs() < 1e-9);
    }
}
