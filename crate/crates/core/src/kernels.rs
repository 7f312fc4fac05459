//! Momentum-space kernels of the three-body contact problem.
//!
//! Conventions: the identical pair has unit mass, the third particle has mass
//! `m`, and `hbar = 1`. Kernels are homogeneous of degree `-2` in the pair of
//! momenta, the kinetic weight is homogeneous of degree `1`.

use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::{legendre_p, GaussLegendre};

/// A three-momentum.
pub type Momentum3 = [f64; 3];

/// Exchange statistics of the identical pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    #[serde(alias = "fermion")]
    Fermionic,
    #[serde(alias = "boson")]
    Bosonic,
}

impl Symmetry {
    /// Parity of the angular momentum sectors that interact.
    pub fn interacts_in(self, l: u32) -> bool {
        match self {
            Symmetry::Fermionic => !l.is_multiple_of(2),
            Symmetry::Bosonic => l.is_multiple_of(2),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Symmetry::Fermionic => "fermion",
            Symmetry::Bosonic => "boson",
        }
    }
}

impl core::str::FromStr for Symmetry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fermion" | "fermionic" | "f" => Ok(Symmetry::Fermionic),
            "boson" | "bosonic" | "b" => Ok(Symmetry::Bosonic),
            other => Err(Error::invalid(alloc::format!(
                "unknown symmetry '{other}', expected fermion or boson"
            ))),
        }
    }
}

/// Mass of the distinguished third particle in units of the pair mass.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct MassParam(f64);

impl MassParam {
    pub fn new(m: f64) -> Result<Self> {
        if m.is_finite() && m > 0.0 {
            Ok(MassParam(m))
        } else {
            Err(Error::invalid(alloc::format!(
                "mass parameter must be positive and finite, got {m}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `c = 2/(1+m)`, the coefficient of `p.q` in the exchange denominator.
    pub fn exchange_coefficient(self) -> f64 {
        2.0 / (1.0 + self.0)
    }
}

impl TryFrom<f64> for MassParam {
    type Error = Error;

    fn try_from(m: f64) -> Result<Self> {
        MassParam::new(m)
    }
}

impl From<MassParam> for f64 {
    fn from(m: MassParam) -> f64 {
        m.0
    }
}

fn dot(a: &Momentum3, b: &Momentum3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm2(a: &Momentum3) -> f64 {
    dot(a, a)
}

/// The exchange form kernel
/// `c (p.q) / ((p^2+q^2)^2 - c^2 (p.q)^2)` with `c = 2/(1+m)`; the bosonic
/// kernel carries the opposite sign.
pub fn q2_kernel(p: &Momentum3, q: &Momentum3, m: MassParam, sym: Symmetry) -> Result<f64> {
    let pp = norm2(p);
    let qq = norm2(q);
    if pp + qq == 0.0 {
        return Err(Error::domain("q2_kernel is singular at p = q = 0"));
    }
    let c = m.exchange_coefficient();
    let pq = dot(p, q);
    let a = pp + qq;
    let value = c * pq / (a * a - c * c * pq * pq);
    Ok(match sym {
        Symmetry::Fermionic => value,
        Symmetry::Bosonic => -value,
    })
}

/// `a(m) = 2 pi^2 m/(m+1)`.
pub fn kinetic_coefficient(m: MassParam) -> f64 {
    2.0 * PI * PI * m.get() / (m.get() + 1.0)
}

/// `a(m) |p|`.
pub fn kinetic_weight(p: &Momentum3, m: MassParam) -> f64 {
    kinetic_coefficient(m) * norm2(p).sqrt()
}

/// Coupling of the exchange term relative to the kinetic weight,
/// `kappa(m) = sqrt(m/(m+2))`.
pub fn exchange_strength(m: MassParam) -> f64 {
    let m = m.get();
    (m / (m + 2.0)).sqrt()
}

/// Channel exchange kernel as a function of `|p|`, `|q|` and `u = cos(p, q)`.
///
/// This is the (anti)symmetrized exchange propagator
/// `-kappa/2 [1/(p^2+q^2-c pq u) +/- 1/(p^2+q^2+c pq u)]`, written without
/// the cancellation between the two terms. For fermions it equals
/// `-kappa * q2_kernel`.
pub fn channel_kernel(p: f64, q: f64, u: f64, m: MassParam, sym: Symmetry) -> f64 {
    let c = m.exchange_coefficient();
    let a = p * p + q * q;
    let b = c * p * q * u;
    let d = a * a - b * b;
    let kappa = exchange_strength(m);
    match sym {
        Symmetry::Fermionic => -kappa * b / d,
        Symmetry::Bosonic => -kappa * a / d,
    }
}

/// Partial-wave projection `K_l(p,q) = 2 pi int_{-1}^{1} P_l(u) K(p,q,u) du`
/// with a fixed Gauss–Legendre rule.
pub fn legendre_project<K>(kernel: K, l: u32, p: f64, q: f64, rule: &GaussLegendre) -> f64
where
    K: Fn(f64, f64, f64) -> f64,
{
    let l = l as usize;
    let sum: f64 = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&u, &w)| w * legendre_p(l, u) * kernel(p, q, u))
        .sum();
    2.0 * PI * sum
}

/// Quadrature order adequate for projecting the channel kernel at the
/// momentum ratio `r`.
///
/// The integrand has poles at `u = +/- z` with `z = (1+r^2)/(c r) >= 1+m`; the
/// Gauss–Legendre error decays like `rho^(-2n)` with `rho = z + sqrt(z^2-1)`.
pub fn projection_order(l: u32, m: MassParam, r: f64) -> usize {
    let c = m.exchange_coefficient();
    let z = (1.0 + r * r) / (c * r);
    let rho = z + (z * z - 1.0).sqrt();
    let need = (20.0 / rho.ln()).ceil();
    let need = if need.is_finite() { need as usize } else { 4096 };
    need.max(32).max(4 * l as usize).div_ceil(8).min(512) * 8
}

/// Integrand used for projecting the channel kernel onto `P_l`.
///
/// With `z = (p^2+q^2)/(c p q)` the channel kernel is a combination of
/// `1/(z -/+ u)`. Subtracting the first `l` terms of their expansion in `u/z`
/// changes the kernel by a polynomial of degree `< l` in `u`, which is
/// orthogonal to `P_l`, and leaves `-kappa (u/z)^l / ((p^2+q^2)(1 - u^2/z^2))`.
/// The projection is the same, but without cancellation when `z` is large.
pub fn reduced_channel_integrand(l: u32, p: f64, q: f64, u: f64, m: MassParam) -> f64 {
    let c = m.exchange_coefficient();
    let a = p * p + q * q;
    let x = u * c / (p / q + q / p);
    -exchange_strength(m) * x.powi(l as i32) / (a * (1.0 - x * x))
}

/// Projected channel kernel `K_l(p, q)` with an order adapted to `(p, q)`.
///
/// Returns `0` exactly in sectors where the pair statistics forbid exchange.
pub fn projected_channel_kernel(l: u32, p: f64, q: f64, m: MassParam, sym: Symmetry) -> f64 {
    Projector::new(l, m, sym).eval(p, q)
}

#[derive(Debug, Clone)]
struct WeightedRule {
    order: usize,
    nodes: alloc::vec::Vec<f64>,
    // 2 pi w_k P_l(u_k)
    weights: alloc::vec::Vec<f64>,
}

/// Evaluates `K_l(p, q)` for one channel, keeping the quadrature rules it
/// has built.
#[derive(Debug, Clone)]
pub struct Projector {
    l: u32,
    m: MassParam,
    sym: Symmetry,
    rules: alloc::vec::Vec<WeightedRule>,
}

impl Projector {
    pub fn new(l: u32, m: MassParam, sym: Symmetry) -> Self {
        Self {
            l,
            m,
            sym,
            rules: alloc::vec::Vec::new(),
        }
    }

    fn rule(&mut self, order: usize) -> &WeightedRule {
        let idx = match self.rules.iter().position(|r| r.order == order) {
            Some(i) => i,
            None => {
                let gl = GaussLegendre::new(order);
                let l = self.l as usize;
                let weights = gl
                    .nodes()
                    .iter()
                    .zip(gl.weights())
                    .map(|(&u, &w)| 2.0 * PI * w * legendre_p(l, u))
                    .collect();
                self.rules.push(WeightedRule {
                    order,
                    nodes: gl.nodes().to_vec(),
                    weights,
                });
                self.rules.len() - 1
            }
        };
        &self.rules[idx]
    }

    /// `K_l(p, q)`.
    pub fn eval(&mut self, p: f64, q: f64) -> f64 {
        if !self.sym.interacts_in(self.l) {
            return 0.0;
        }
        let (l, m) = (self.l, self.m);
        let order = projection_order(l, m, q / p);
        let rule = self.rule(order);
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&u, &w)| w * reduced_channel_integrand(l, p, q, u, m))
            .sum()
    }
}

/// Partial-wave kernel of `1/|x|` in momentum space,
/// `Q_l((p^2+q^2)/(2pq)) / (pi p q)`.
pub fn coulomb_kernel(l: u32, p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && q > 0.0) {
        return Err(Error::domain("coulomb_kernel needs positive momenta"));
    }
    let d = (p - q) * (p - q) / (2.0 * p * q);
    if d <= 1e-14 {
        return Err(Error::domain(
            "coulomb_kernel is logarithmically singular on the diagonal p = q",
        ));
    }
    Ok(crate::quad::legendre_q_shifted(l as usize, d) / (PI * p * q))
}

/// Configuration-space Coulomb coefficient `C(m)` of the comparison operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulombCoefficient {
    pub value: f64,
    pub symmetry: Symmetry,
    pub m: MassParam,
}

/// `4 pi (1+m)/m` for the bosonic channel, `(1+m)/(8 pi (2m+m^2))` for the
/// fermionic one.
pub fn coulomb_coefficient(m: MassParam, sym: Symmetry) -> CoulombCoefficient {
    let mv = m.get();
    let value = match sym {
        Symmetry::Bosonic => 4.0 * PI * (1.0 + mv) / mv,
        Symmetry::Fermionic => (1.0 + mv) / (8.0 * PI * (2.0 * mv + mv * mv)),
    };
    CoulombCoefficient {
        value,
        symmetry: sym,
        m,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::legendre_q;

    fn mass(m: f64) -> MassParam {
        MassParam::new(m).unwrap()
    }

    #[test]
    fn q2_kernel_reference_values() {
        let e = [1.0, 0.0, 0.0];
        let v = q2_kernel(&e, &e, mass(1.0), Symmetry::Fermionic).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        let perp = q2_kernel(&[1.0, 0.0, 0.0], &[0.0, 3.0, 0.0], mass(1.0), Symmetry::Fermionic);
        assert_eq!(perp.unwrap(), 0.0);
        assert!(q2_kernel(&[0.0; 3], &[0.0; 3], mass(1.0), Symmetry::Bosonic).is_err());
    }

    #[test]
    fn kinetic_weight_reference_values() {
        assert_eq!(kinetic_weight(&[0.0; 3], mass(3.0)), 0.0);
        let v = kinetic_weight(&[0.0, 1.0, 0.0], mass(1.0));
        assert!((v - PI * PI).abs() < 1e-14);
    }

    #[test]
    fn fermion_channel_kernel_is_scaled_q2() {
        let m = mass(0.3);
        let p = [0.4, -1.0, 0.2];
        let q = [1.3, 0.1, 0.7];
        let pn = norm2(&p).sqrt();
        let qn = norm2(&q).sqrt();
        let u = dot(&p, &q) / (pn * qn);
        let lit = q2_kernel(&p, &q, m, Symmetry::Fermionic).unwrap();
        let ch = channel_kernel(pn, qn, u, m, Symmetry::Fermionic);
        assert!((ch + exchange_strength(m) * lit).abs() < 1e-15);
    }

    /// Closed form of the projection: `int P_l(u)/(z-u) du = 2 Q_l(z)`.
    fn projected_oracle(l: u32, p: f64, q: f64, m: MassParam, sym: Symmetry) -> f64 {
        if !sym.interacts_in(l) {
            return 0.0;
        }
        let c = m.exchange_coefficient();
        let b = c * p * q;
        let z = (p * p + q * q) / b;
        -exchange_strength(m) * 4.0 * PI * legendre_q(l as usize, z) / b
    }

    #[test]
    fn projection_matches_legendre_q_closed_form() {
        for &mv in &[0.02, 0.1, 1.0, 7.0] {
            for l in 0..5 {
                for sym in [Symmetry::Fermionic, Symmetry::Bosonic] {
                    for &r in &[0.01, 0.3, 1.0, 2.5, 40.0] {
                        let m = mass(mv);
                        let got = projected_channel_kernel(l, 1.0, r, m, sym);
                        let want = projected_oracle(l, 1.0, r, m, sym);
                        assert!(
                            (got - want).abs() <= 1e-10 * want.abs() + 1e-14,
                            "m={mv} l={l} {sym:?} r={r}: {got} vs {want}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn reduced_integrand_projects_like_the_raw_kernel() {
        let m = mass(0.4);
        for l in 0..6 {
            for sym in [Symmetry::Fermionic, Symmetry::Bosonic] {
                if !sym.interacts_in(l) {
                    continue;
                }
                let rule = GaussLegendre::new(96);
                let raw = legendre_project(|p, q, u| channel_kernel(p, q, u, m, sym), l, 1.0, 1.7, &rule);
                let red = projected_channel_kernel(l, 1.0, 1.7, m, sym);
                assert!((raw - red).abs() < 1e-13 * red.abs().max(1e-3), "l={l} {raw} {red}");
            }
        }
    }

    #[test]
    fn literal_projection_matches_double_order() {
        let m = mass(1.0);
        let k = |p: f64, q: f64, u: f64| {
            q2_kernel(&[p, 0.0, 0.0], &[q * u, q * (1.0 - u * u).sqrt(), 0.0], m, Symmetry::Fermionic)
                .unwrap()
        };
        let a = legendre_project(k, 1, 1.0, 1.0, &GaussLegendre::new(32));
        let b = legendre_project(k, 1, 1.0, 1.0, &GaussLegendre::new(64));
        assert!((a - b).abs() < 1e-10);
        let even = legendre_project(|_, _, u| 1.0 / (3.0 - u * u), 3, 1.0, 1.0, &GaussLegendre::new(32));
        assert!(even.abs() < 1e-15);
    }

    #[test]
    fn coulomb_kernel_reference_values() {
        let v = coulomb_kernel(0, 1.0, 2.0).unwrap();
        assert!((v - (3.0f64).ln() / (2.0 * PI)).abs() < 1e-14);
        assert_eq!(coulomb_kernel(2, 1.0, 2.0), coulomb_kernel(2, 2.0, 1.0));
        assert!(coulomb_kernel(2, 1.0 + 1e-8, 1.0).is_err());
    }

    #[test]
    fn coulomb_coefficient_reference_values() {
        let b = coulomb_coefficient(mass(1.0), Symmetry::Bosonic).value;
        assert!((b - 8.0 * PI).abs() < 1e-13);
        let f = coulomb_coefficient(mass(1.0), Symmetry::Fermionic).value;
        assert!((f - 1.0 / (12.0 * PI)).abs() < 1e-15);
        for sym in [Symmetry::Fermionic, Symmetry::Bosonic] {
            let mut prev = f64::INFINITY;
            for k in 0..40 {
                let m = 1e-3 * 1.3f64.powi(k);
                let v = coulomb_coefficient(mass(m), sym).value;
                assert!(v < prev);
                prev = v;
            }
        }
    }
}
