//! Quadrature rules and special functions shared by the kernel, channel and
//! spectral code.
//!
//! Everything here is deterministic and allocation-light: Gauss–Legendre rules
//! are computed by Newton iteration on the three-term recurrence, the
//! double-exponential rule is generated on the fly.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// `P_n(x)` and `P_n'(x)` by upward recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Legendre polynomial `P_l(x)`.
pub fn legendre_p(l: usize, x: f64) -> f64 {
    match l {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=l {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}

/// Legendre function of the second kind `Q_l(z)` for real `z > 1`.
pub fn legendre_q(l: usize, z: f64) -> f64 {
    legendre_q_shifted(l, z - 1.0)
}

/// `Q_l(1 + d)` for `d > 0`, taking the distance to the cut directly so that
/// arguments extremely close to `z = 1` keep their precision.
///
/// Near the cut the forward recurrence is stable enough for moderate `l`;
/// further out the hypergeometric series in `1/z^2` is used instead.
pub fn legendre_q_shifted(l: usize, d: f64) -> f64 {
    debug_assert!(d > 0.0);
    let z = 1.0 + d;
    if d < 0.1 {
        let q0 = 0.5 * ((2.0 + d) / d).ln();
        if l == 0 {
            return q0;
        }
        let (mut a, mut b) = (q0, z * q0 - 1.0);
        for k in 1..l {
            let kf = k as f64;
            let c = ((2.0 * kf + 1.0) * z * b - kf * a) / (kf + 1.0);
            a = b;
            b = c;
        }
        return b;
    }
    // Q_l(z) = 2 prod_{k<=l} k/(k+1/2) (2z)^-(l+1) 2F1((l+1)/2, (l+2)/2; l+3/2; 1/z^2)
    let lf = l as f64;
    let mut pref = 1.0 / (2.0 * z);
    let mut coef = 2.0;
    for k in 1..=l {
        let kf = k as f64;
        coef *= kf / (kf + 0.5);
        pref /= 2.0 * z;
    }
    let x = 1.0 / (z * z);
    let (a, b, c) = (0.5 * (lf + 1.0), 0.5 * (lf + 2.0), lf + 1.5);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..100_000 {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    coef * pref * sum
}

/// A node of the tanh-sinh rule on `[a, b]`: abscissa, distances to both
/// endpoints (each accurate to full relative precision), and weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointNode {
    pub x: f64,
    pub from_a: f64,
    pub from_b: f64,
    pub w: f64,
}

/// Tanh-sinh (double-exponential) nodes on a finite interval with step
/// `2^-levels`.
///
/// Handles integrable endpoint singularities such as `ln|x - a|`. Each node
/// carries its distance to the nearer endpoint so that integrands crowding an
/// endpoint keep full relative precision.
pub fn tanh_sinh_nodes(a: f64, b: f64, levels: u32) -> Vec<EndpointNode> {
    let half = 0.5 * (b - a);
    let h = 1.0 / (1u64 << levels) as f64;
    let n = (4.0 / h) as i64;
    let mut out = Vec::with_capacity(2 * n as usize + 1);
    for k in -n..=n {
        let t = k as f64 * h;
        let u = 0.5 * PI * t.sinh();
        let cu = u.cosh();
        // 1 + tanh(u) and 1 - tanh(u) without cancellation
        let ep = 1.0 / ((-u).exp() * cu);
        let em = 1.0 / (u.exp() * cu);
        let w = 0.5 * PI * t.cosh() / (cu * cu) * h * half;
        let from_a = half * ep;
        let from_b = half * em;
        if from_a <= 0.0 || from_b <= 0.0 || w == 0.0 {
            continue;
        }
        let x = if from_a < from_b { a + from_a } else { b - from_b };
        out.push(EndpointNode { x, from_a, from_b, w });
    }
    out
}

/// Tanh-sinh integral of `f(x, x - a, b - x)` over `[a, b]`.
pub fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(a: f64, b: f64, levels: u32, mut f: F) -> f64 {
    tanh_sinh_nodes(a, b, levels)
        .iter()
        .map(|n| n.w * f(n.x, n.from_a, n.from_b))
        .sum()
}

/// Composite Gauss–Legendre integration over consecutive panels given by
/// their boundaries.
pub fn composite<F: FnMut(f64) -> f64>(rule: &GaussLegendre, edges: &[f64], mut f: F) -> f64 {
    edges
        .windows(2)
        .map(|e| rule.integrate(e[0], e[1], &mut f))
        .sum()
}

/// Panel edges on `[0, t_max]` starting at width `h0`, growing by `growth`
/// per panel and never exceeding `h_max`.
pub fn graded_edges(t_max: f64, h0: f64, growth: f64, h_max: f64) -> Vec<f64> {
    let mut edges = alloc::vec![0.0];
    let mut t = 0.0;
    let mut h = h0.min(h_max);
    while t < t_max {
        t = (t + h).min(t_max);
        edges.push(t);
        h = (h * growth).min(h_max);
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(7);
        // degree 13 is the limit for 7 nodes
        let got = rule.integrate(-1.0, 2.0, |x| x.powi(13) - 3.0 * x.powi(4));
        let exact = (2f64.powi(14) - 1.0) / 14.0 - 3.0 * (32.0 + 1.0) / 5.0;
        assert!((got - exact).abs() < 1e-10 * exact.abs());
        let w: f64 = rule.weights().iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn large_rules_stay_accurate() {
        let rule = GaussLegendre::new(600);
        let got = rule.integrate(0.0, PI, |x| x.sin());
        assert!((got - 2.0).abs() < 1e-13);
        for w in rule.nodes().windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn legendre_q_closed_forms() {
        let z: f64 = 1.25;
        let q0 = 0.5 * ((z + 1.0) / (z - 1.0)).ln();
        assert!((legendre_q(0, z) - q0).abs() < 1e-15);
        let q1 = z * q0 - 1.0;
        assert!((legendre_q(1, z) - q1).abs() < 1e-14);
        let q2 = 0.5 * (3.0 * z * z - 1.0) * q0 - 1.5 * z;
        assert!((legendre_q(2, z) - q2).abs() < 1e-13);
    }

    #[test]
    fn legendre_q_branches_agree() {
        // Q_l(z) = 1/2 ∫ P_l(u)/(z-u) du, compare both evaluation branches
        let rule = GaussLegendre::new(200);
        for l in 0..7 {
            for &z in &[1.05, 1.09, 1.11, 1.5, 3.0, 40.0] {
                let direct = 0.5 * rule.integrate(-1.0, 1.0, |u| legendre_p(l, u) / (z - u));
                let got = legendre_q(l, z);
                assert!(
                    (got - direct).abs() < 1e-11 * direct.abs().max(1e-300) + 1e-15,
                    "l={l} z={z} got={got} direct={direct}"
                );
            }
        }
    }

    #[test]
    fn tanh_sinh_handles_log_endpoint() {
        // ∫_0^1 ln x dx = -1
        let got = tanh_sinh(0.0, 1.0, 6, |_, da, _| da.ln());
        assert!((got + 1.0).abs() < 1e-12, "{got}");
        // ∫_0^1 x^-1/2 dx = 2
        let got = tanh_sinh(0.0, 1.0, 6, |_, da, _| 1.0 / da.sqrt());
        assert!((got - 2.0).abs() < 1e-10, "{got}");
    }
}
