//! Monte-Carlo estimates of the four-fermion quadratic forms in Krein space.
//!
//! Test functions are `phi(k, s) = amplitude * P(k, s) * exp(-(alpha k^2 + beta s^2 + gamma k.s))`
//! with `k, s` in `R^3` and `P` a polynomial of degree at most two. The three
//! forms are
//!
//! * `C0 = 2 pi^2 int |phi(k,s)|^2 sqrt(3/4 (k^2+s^2) + 1/2 k.s)`, the lifted
//!   kinetic energy,
//! * `C1 = -int phi(k,s) phi(w-u, -w-u) / (w^2 + 3/4 (k^2+s^2) + 1/2 k.s)`
//!   with `u = (k+s)/2`, the interaction of two separate pairs,
//! * `C2 = int phi(k,w) phi(k,s) / (k^2+s^2+w^2+k.s+k.w+s.w)`, the exchange
//!   term of a triplet.
//!
//! Each integrand is a polynomial times a Gaussian times a bounded weight, so
//! the Gaussian is sampled exactly (independently along the three spatial
//! axes) and the estimator averages the remaining factor.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3};
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

type V3 = [f64; 3];

fn dot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Polynomial prefactor of a test function. The axis is `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polynomial {
    /// `1`
    One,
    /// `k.s`
    KDotS,
    /// `k^2 + s^2`
    NormSum,
    /// `k_z s_z`
    AxialProduct,
    /// `(k_z + s_z)^2`
    AxialSumSquared,
    /// `k_z - s_z`
    AxialDifference,
    /// `k^2 - s^2`
    NormDifference,
    /// `k_z^2 - s_z^2`
    AxialSquareDifference,
}

impl Polynomial {
    pub fn eval(self, k: &V3, s: &V3) -> f64 {
        match self {
            Polynomial::One => 1.0,
            Polynomial::KDotS => dot(k, s),
            Polynomial::NormSum => dot(k, k) + dot(s, s),
            Polynomial::AxialProduct => k[2] * s[2],
            Polynomial::AxialSumSquared => (k[2] + s[2]) * (k[2] + s[2]),
            Polynomial::AxialDifference => k[2] - s[2],
            Polynomial::NormDifference => dot(k, k) - dot(s, s),
            Polynomial::AxialSquareDifference => k[2] * k[2] - s[2] * s[2],
        }
    }

    pub fn degree(self) -> i32 {
        match self {
            Polynomial::One => 0,
            Polynomial::AxialDifference => 1,
            _ => 2,
        }
    }

    /// Parity under `k <-> s`.
    pub fn parity(self) -> Parity {
        match self {
            Polynomial::AxialDifference | Polynomial::NormDifference | Polynomial::AxialSquareDifference => {
                Parity::Antisymmetric
            }
            _ => Parity::Symmetric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction4 {
    pub name: String,
    #[serde(default = "one")]
    pub amplitude: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub polynomial: Polynomial,
}

fn one() -> f64 {
    1.0
}

impl TestFunction4 {
    pub fn new(name: &str, alpha: f64, gamma: f64, polynomial: Polynomial) -> Self {
        Self {
            name: String::from(name),
            amplitude: 1.0,
            alpha,
            beta: alpha,
            gamma,
            polynomial,
        }
    }

    /// Positive definiteness of the Gaussian and `alpha = beta`, which the
    /// exchange parity requires.
    pub fn validate(&self) -> Result<()> {
        let finite = [self.amplitude, self.alpha, self.beta, self.gamma]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid(alloc::format!("{}: non-finite parameter", self.name)));
        }
        if !(self.alpha > 0.0 && self.beta > 0.0 && 4.0 * self.alpha * self.beta > self.gamma * self.gamma) {
            return Err(Error::invalid(alloc::format!(
                "{}: Gaussian form must be positive definite (alpha, beta > 0, 4 alpha beta > gamma^2)",
                self.name
            )));
        }
        if self.alpha != self.beta {
            return Err(Error::invalid(alloc::format!(
                "{}: exchange parity needs alpha = beta",
                self.name
            )));
        }
        Ok(())
    }

    pub fn parity(&self) -> Parity {
        self.polynomial.parity()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0
    }

    /// `phi(k, s)`.
    pub fn eval(&self, k: &V3, s: &V3) -> f64 {
        let q = self.alpha * dot(k, k) + self.beta * dot(s, s) + self.gamma * dot(k, s);
        self.amplitude * self.polynomial.eval(k, s) * (-q).exp()
    }

    /// The dilated function `phi(lambda k, lambda s)` as a member of the family.
    pub fn rescaled(&self, lambda: f64) -> Self {
        let l2 = lambda * lambda;
        Self {
            name: self.name.clone(),
            amplitude: self.amplitude * lambda.powi(self.polynomial.degree()),
            alpha: self.alpha * l2,
            beta: self.beta * l2,
            gamma: self.gamma * l2,
            polynomial: self.polynomial,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    C0,
    C1,
    C2,
}

impl FormKind {
    pub const ALL: [FormKind; 3] = [FormKind::C0, FormKind::C1, FormKind::C2];

    fn index(self) -> u64 {
        match self {
            FormKind::C0 => 0,
            FormKind::C1 => 1,
            FormKind::C2 => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FormKind::C0 => "C0",
            FormKind::C1 => "C1",
            FormKind::C2 => "C2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
    /// `std_error > |value|`: the estimate is not resolved from zero.
    pub noise_dominated: bool,
}

/// Gaussian `exp(-x^T P x)` on `R^(3d)`, `d` variables per spatial axis,
/// sampled by `x = L^-T z / sqrt(2)` with `P = L L^T`.
struct AxisGaussian<const D: usize> {
    /// `(2P)^(-1/2)`-type factor, lower triangular, row-major.
    factor: [[f64; D]; D],
    /// `int exp(-x^T P x) dx` over all `3D` coordinates.
    mass: f64,
}

impl AxisGaussian<2> {
    fn new(p: Matrix2<f64>) -> Result<Self> {
        let cov = (p * 2.0)
            .try_inverse()
            .ok_or_else(|| Error::invalid("degenerate proposal covariance"))?;
        let l = cov
            .cholesky()
            .ok_or_else(|| Error::invalid("degenerate proposal covariance"))?
            .l();
        let mut factor = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                factor[i][j] = l[(i, j)];
            }
        }
        let per_axis = PI / p.determinant().sqrt();
        Ok(Self {
            factor,
            mass: per_axis * per_axis * per_axis,
        })
    }
}

impl AxisGaussian<3> {
    fn new(p: Matrix3<f64>) -> Result<Self> {
        let cov = (p * 2.0)
            .try_inverse()
            .ok_or_else(|| Error::invalid("degenerate proposal covariance"))?;
        let l = cov
            .cholesky()
            .ok_or_else(|| Error::invalid("degenerate proposal covariance"))?
            .l();
        let mut factor = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                factor[i][j] = l[(i, j)];
            }
        }
        let per_axis = PI.powf(1.5) / p.determinant().sqrt();
        Ok(Self {
            factor,
            mass: per_axis * per_axis * per_axis,
        })
    }
}

impl<const D: usize> AxisGaussian<D> {
    /// Draws `D` three-vectors.
    fn sample(&self, rng: &mut ChaCha8Rng) -> [V3; D] {
        let mut out = [[0.0; 3]; D];
        for axis in 0..3 {
            let mut z = [0.0; D];
            for zi in z.iter_mut() {
                *zi = StandardNormal.sample(rng);
            }
            for i in 0..D {
                let mut v = 0.0;
                for j in 0..=i {
                    v += self.factor[i][j] * z[j];
                }
                out[i][axis] = v;
            }
        }
        out
    }
}

/// Running mean and variance (Welford).
#[derive(Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

fn rng_for(seed: u64, member: u64, kind: FormKind) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(member * 3 + kind.index());
    rng
}

/// Estimate of one form on one test function. `member` selects an
/// independent random stream for the same seed.
pub fn estimate_form(phi: &TestFunction4, kind: FormKind, n: u64, seed: u64, member: u64) -> Result<FormEstimate> {
    phi.validate()?;
    if n < 2 {
        return Err(Error::invalid("Monte-Carlo estimate needs at least two samples"));
    }
    if phi.is_zero() {
        return Ok(FormEstimate {
            value: 0.0,
            std_error: 0.0,
            n_samples: n,
            seed,
            noise_dominated: false,
        });
    }
    let (a, b, g) = (phi.alpha, phi.beta, phi.gamma);
    let amp2 = phi.amplitude * phi.amplitude;
    let poly = phi.polynomial;
    let mut rng = rng_for(seed, member, kind);
    let mut acc = Moments::default();
    let scale;
    match kind {
        FormKind::C0 => {
            let p = Matrix2::new(2.0 * a, g, g, 2.0 * b);
            let gauss = AxisGaussian::<2>::new(p)?;
            scale = 2.0 * PI * PI * amp2 * gauss.mass;
            for _ in 0..n {
                let [k, s] = gauss.sample(&mut rng);
                let pk = poly.eval(&k, &s);
                let w = (0.75 * (dot(&k, &k) + dot(&s, &s)) + 0.5 * dot(&k, &s)).sqrt();
                acc.push(pk * pk * w);
            }
        }
        FormKind::C1 => {
            let t = 0.25 * (a + b + g);
            let p = Matrix3::new(
                a + t,
                0.5 * g + t,
                0.5 * (b - a),
                0.5 * g + t,
                b + t,
                0.5 * (b - a),
                0.5 * (b - a),
                0.5 * (b - a),
                a + b - g,
            );
            let gauss = AxisGaussian::<3>::new(p)?;
            scale = -amp2 * gauss.mass;
            for _ in 0..n {
                let [k, s, w] = gauss.sample(&mut rng);
                let u = [0.5 * (k[0] + s[0]), 0.5 * (k[1] + s[1]), 0.5 * (k[2] + s[2])];
                let x = [w[0] - u[0], w[1] - u[1], w[2] - u[2]];
                let y = [-w[0] - u[0], -w[1] - u[1], -w[2] - u[2]];
                let den = dot(&w, &w) + 0.75 * (dot(&k, &k) + dot(&s, &s)) + 0.5 * dot(&k, &s);
                acc.push(poly.eval(&k, &s) * poly.eval(&x, &y) / den);
            }
        }
        FormKind::C2 => {
            let p = Matrix3::new(2.0 * a, 0.5 * g, 0.5 * g, 0.5 * g, b, 0.0, 0.5 * g, 0.0, b);
            let gauss = AxisGaussian::<3>::new(p)?;
            scale = amp2 * gauss.mass;
            for _ in 0..n {
                let [k, s, w] = gauss.sample(&mut rng);
                let den = dot(&k, &k) + dot(&s, &s) + dot(&w, &w) + dot(&k, &s) + dot(&k, &w) + dot(&s, &w);
                acc.push(poly.eval(&k, &w) * poly.eval(&k, &s) / den);
            }
        }
    }
    let value = scale * acc.mean;
    let std_error = scale.abs() * acc.std_error();
    Ok(FormEstimate {
        value,
        std_error,
        n_samples: n,
        seed,
        noise_dominated: std_error > value.abs(),
    })
}

pub fn c0_form(phi: &TestFunction4, n: u64, seed: u64) -> Result<FormEstimate> {
    estimate_form(phi, FormKind::C0, n, seed, 0)
}

pub fn c1_form(phi: &TestFunction4, n: u64, seed: u64) -> Result<FormEstimate> {
    estimate_form(phi, FormKind::C1, n, seed, 0)
}

pub fn c2_form(phi: &TestFunction4, n: u64, seed: u64) -> Result<FormEstimate> {
    estimate_form(phi, FormKind::C2, n, seed, 0)
}

/// A linear combination of independent estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Combination {
    pub value: f64,
    pub std_error: f64,
}

impl Combination {
    fn of(terms: &[(f64, &FormEstimate)]) -> Self {
        let value = terms.iter().map(|(c, e)| c * e.value).sum();
        let var: f64 = terms.iter().map(|(c, e)| (c * e.std_error).powi(2)).sum();
        Self {
            value,
            std_error: var.sqrt(),
        }
    }

    /// `value >= -z * std_error`.
    pub fn nonnegative_within(&self, z: f64) -> bool {
        self.value >= -z * self.std_error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberReport {
    pub index: usize,
    pub name: String,
    pub parity: Parity,
    pub c0: FormEstimate,
    pub c1: FormEstimate,
    pub c2: FormEstimate,
    /// `C0 + C1/2`
    pub kinetic_plus_half_pair: Combination,
    /// `C0 + C1 + C2`
    pub total: Combination,
    /// Antisymmetric members: `|C1| <= 3 sigma`.
    pub pair_term_vanishes: Option<bool>,
    /// Symmetric members: `C2 - |C1|/2 >= -3 sigma` (reported, not asserted).
    pub triplet_dominates_half_pair: Option<bool>,
    /// Symmetric members: `C0 + C1/2 >= -3 sigma`.
    pub kinetic_plus_half_pair_positive: Option<bool>,
    /// `C0 + C1 + C2 >= -3 sigma`.
    pub total_positive: bool,
}

impl MemberReport {
    /// All asserted properties hold.
    pub fn passed(&self) -> bool {
        self.total_positive
            && self.pair_term_vanishes.unwrap_or(true)
            && self.kinetic_plus_half_pair_positive.unwrap_or(true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub members: Vec<MemberReport>,
    pub n_samples: u64,
    pub seed: u64,
    pub z: f64,
}

impl PositivityReport {
    pub fn passed(&self) -> bool {
        self.members.iter().all(MemberReport::passed)
    }
}

pub const SIGMA_LEVEL: f64 = 3.0;
pub const MIN_FAMILY: usize = 20;

/// Evaluates one member of the family; members are independent and may run
/// concurrently.
pub fn evaluate_member(index: usize, phi: &TestFunction4, n: u64, seed: u64) -> Result<MemberReport> {
    let z = SIGMA_LEVEL;
    let c0 = estimate_form(phi, FormKind::C0, n, seed, index as u64)?;
    let c1 = estimate_form(phi, FormKind::C1, n, seed, index as u64)?;
    let c2 = estimate_form(phi, FormKind::C2, n, seed, index as u64)?;
    let kp = Combination::of(&[(1.0, &c0), (0.5, &c1)]);
    let total = Combination::of(&[(1.0, &c0), (1.0, &c1), (1.0, &c2)]);
    let parity = phi.parity();
    let sym = parity == Parity::Symmetric;
    let dominance = Combination {
        value: c2.value - 0.5 * c1.value.abs(),
        std_error: (c2.std_error.powi(2) + 0.25 * c1.std_error.powi(2)).sqrt(),
    };
    Ok(MemberReport {
        index,
        name: phi.name.clone(),
        parity,
        pair_term_vanishes: (!sym).then(|| c1.value.abs() <= z * c1.std_error),
        triplet_dominates_half_pair: sym.then(|| dominance.nonnegative_within(z)),
        kinetic_plus_half_pair_positive: sym.then(|| kp.nonnegative_within(z)),
        total_positive: total.nonnegative_within(z),
        c0,
        c1,
        c2,
        kinetic_plus_half_pair: kp,
        total,
    })
}

/// Checks the positivity properties on every member of the family.
pub fn positivity_suite(family: &[TestFunction4], n: u64, seed: u64) -> Result<PositivityReport> {
    if family.len() < MIN_FAMILY {
        return Err(Error::invalid(alloc::format!(
            "positivity suite needs at least {MIN_FAMILY} members, got {}",
            family.len()
        )));
    }
    let members = family
        .iter()
        .enumerate()
        .map(|(i, phi)| evaluate_member(i, phi, n, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(PositivityReport {
        members,
        n_samples: n,
        seed,
        z: SIGMA_LEVEL,
    })
}
