//! Mellin diagonalization of the homogeneous channel operators.
//!
//! On the power functions `psi(p) = p^(-2+is)` the channel operator acts as
//! multiplication by `F_l(s) = a(m) + int K_l(1, r) r^(is) dr`. Writing
//! `r = e^t`, the integrand `g(t) = K_l(1, e^t) e^t` depends on `t` only through
//! `cosh t` and decays like `e^(-(l+1)|t|) (1 + O(e^(-2|t|)))`, so the symbol is
//! analytic in the strip `|Im s| < l + 1`. The integral is split into
//! composite Gauss–Legendre panels on `[-T, T]` and an exact exponential tail.
//!
//! Thresholds in the mass ratio:
//! * `m*` solves `F_l(0; m) = 0`; below it `F_l` has real zeros `+/- s0` and the
//!   channel is in the limit-circle regime,
//! * `m**` is where the imaginary-axis zero `i sigma` reaches `sigma = 1`;
//!   between the two thresholds the channel has deficiency, above it the form
//!   is regular.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kernels::{kinetic_coefficient, MassParam, Projector, Symmetry};
use crate::quad::{graded_edges, legendre_q_shifted, tanh_sinh_nodes, GaussLegendre};
use crate::roots::{sign_changes, try_brent};

pub const DEFAULT_L_MAX: u32 = 6;

/// Angular momentum sector, pair statistics and mass ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub l: u32,
    pub sym: Symmetry,
    pub m: MassParam,
}

impl Channel {
    pub fn new(l: u32, sym: Symmetry, m: f64) -> Result<Self> {
        Self::with_l_max(l, sym, m, DEFAULT_L_MAX)
    }

    pub fn with_l_max(l: u32, sym: Symmetry, m: f64, l_max: u32) -> Result<Self> {
        if l > l_max {
            return Err(Error::invalid(alloc::format!(
                "angular momentum l = {l} exceeds l_max = {l_max}"
            )));
        }
        Ok(Self {
            l,
            sym,
            m: MassParam::new(m)?,
        })
    }

    /// Whether the exchange term is present in this sector.
    pub fn interacts(&self) -> bool {
        self.sym.interacts_in(self.l)
    }

    /// Half-width of the analyticity strip of the symbol.
    pub fn strip(&self) -> f64 {
        self.l as f64 + 1.0
    }
}

/// Quadrature parameters of the Mellin integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolOptions {
    /// Gauss–Legendre nodes per panel.
    pub panel_order: usize,
    /// Ratio of successive panel widths.
    pub growth: f64,
    /// Split point between panels and the analytic tail.
    pub t_split: f64,
}

impl Default for SymbolOptions {
    fn default() -> Self {
        Self {
            panel_order: 16,
            growth: 1.2,
            t_split: 20.0,
        }
    }
}

/// A symmetric line rule on `[-T, T]` stored as its positive half.
#[derive(Debug, Clone)]
struct LineRule {
    t: Vec<f64>,
    w: Vec<f64>,
}

impl LineRule {
    fn panels(edges: &[f64], order: usize) -> Self {
        let rule = GaussLegendre::new(order);
        let mut t = Vec::new();
        let mut w = Vec::new();
        for e in edges.windows(2) {
            for (x, wx) in rule.mapped(e[0], e[1]) {
                t.push(x);
                w.push(wx);
            }
        }
        Self { t, w }
    }
}

/// Panel width cap that keeps every oscillation of `e^(ist)` resolved.
fn max_panel(max_re_s: f64) -> f64 {
    if max_re_s > 0.0 {
        (PI / max_re_s).min(1.0)
    } else {
        1.0
    }
}

/// Fourier integral `int g(t) e^(ist) dt` over the real line from samples of
/// `g` at `+/- t_k` and the tail amplitudes `g(+/-T) e^((l+1)T)`.
#[derive(Debug, Clone)]
struct LineIntegral {
    rule: LineRule,
    g_pos: Vec<f64>,
    g_neg: Vec<f64>,
    tail_pos: f64,
    tail_neg: f64,
    t_split: f64,
    decay: f64,
    max_re_s: f64,
}

impl LineIntegral {
    fn eval(&self, s: Complex64) -> Result<Complex64> {
        let sigma = s.im;
        if sigma.abs() >= self.decay {
            return Err(Error::domain(alloc::format!(
                "Im s = {sigma} outside the convergence strip |Im s| < {}",
                self.decay
            )));
        }
        if s.re.abs() > self.max_re_s * (1.0 + 1e-12) {
            return Err(Error::invalid(alloc::format!(
                "Re s = {} beyond the resolved range {}",
                s.re,
                self.max_re_s
            )));
        }
        let i = Complex64::i();
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..self.rule.t.len() {
            let t = self.rule.t[k];
            let e = (i * s * t).exp();
            let em = (-i * s * t).exp();
            acc += self.rule.w[k] * (self.g_pos[k] * e + self.g_neg[k] * em);
        }
        let big_t = self.t_split;
        let l1 = self.decay;
        acc += self.tail_pos * ((i * s - l1) * big_t).exp() / (l1 - i * s);
        acc += self.tail_neg * ((-i * s - l1) * big_t).exp() / (l1 + i * s);
        Ok(acc)
    }
}

/// The symbol `F_l(s; m)` of one channel, with the `t`-samples of the kernel
/// precomputed for repeated evaluation.
#[derive(Debug, Clone)]
pub struct ChannelSymbol {
    channel: Channel,
    kinetic: f64,
    line: Option<LineIntegral>,
}

impl ChannelSymbol {
    /// Prepares the symbol for `|Re s| <= max_re_s`.
    pub fn new(ch: Channel, max_re_s: f64) -> Self {
        Self::with_options(ch, max_re_s, &SymbolOptions::default())
    }

    pub fn with_options(ch: Channel, max_re_s: f64, opts: &SymbolOptions) -> Self {
        let kinetic = kinetic_coefficient(ch.m);
        if !ch.interacts() {
            return Self {
                channel: ch,
                kinetic,
                line: None,
            };
        }
        let m = ch.m.get();
        // width of the peak of g near t = 0
        let theta = (1.0 / (1.0 + m)).acos();
        let h0 = (0.5 * theta).min(0.25);
        let h_max = max_panel(max_re_s);
        let edges = graded_edges(opts.t_split, h0, opts.growth, h_max);
        let rule = LineRule::panels(&edges, opts.panel_order);
        let mut proj = Projector::new(ch.l, ch.m, ch.sym);
        let mut g = |t: f64| {
            let r = t.exp();
            proj.eval(1.0, r) * r
        };
        let g_pos: Vec<f64> = rule.t.iter().map(|&t| g(t)).collect();
        let g_neg: Vec<f64> = rule.t.iter().map(|&t| g(-t)).collect();
        let decay = ch.strip();
        let big_t = opts.t_split;
        let tail_pos = g(big_t) * (decay * big_t).exp();
        let tail_neg = g(-big_t) * (decay * big_t).exp();
        Self {
            channel: ch,
            kinetic,
            line: Some(LineIntegral {
                rule,
                g_pos,
                g_neg,
                tail_pos,
                tail_neg,
                t_split: big_t,
                decay,
                max_re_s: max_re_s.max(0.0),
            }),
        }
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn kinetic(&self) -> f64 {
        self.kinetic
    }

    /// `F_l(s; m)`.
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        match &self.line {
            None => {
                if s.im.abs() >= self.channel.strip() {
                    return Err(Error::domain("Im s outside the convergence strip"));
                }
                Ok(Complex64::new(self.kinetic, 0.0))
            }
            Some(line) => Ok(self.kinetic + line.eval(s)?),
        }
    }

    /// `F_l(s)` for real `s`; the imaginary part vanishes up to rounding.
    pub fn real(&self, s: f64) -> Result<f64> {
        Ok(self.eval(Complex64::new(s, 0.0))?.re)
    }

    /// `F_l(i sigma)`.
    pub fn imaginary_axis(&self, sigma: f64) -> Result<f64> {
        Ok(self.eval(Complex64::new(0.0, sigma))?.re)
    }
}

/// `F_l(s; m)` at a single point.
pub fn mellin_symbol(ch: Channel, s: Complex64) -> Result<Complex64> {
    ChannelSymbol::new(ch, s.re.abs()).eval(s)
}

/// Sampled symbol on the real axis and on the imaginary segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MellinTable {
    pub channel: Channel,
    pub s_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub sigma_grid: Vec<f64>,
    pub sigma_values: Vec<f64>,
    /// Largest `|Im F(s)|` over the real grid.
    pub max_imag: f64,
    pub s0: Option<f64>,
    pub sigma_root: Option<f64>,
}

fn check_ascending(xs: &[f64], name: &str) -> Result<()> {
    if xs.windows(2).any(|w| w[1] <= w[0]) || xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(alloc::format!("{name} must be strictly ascending")));
    }
    Ok(())
}

/// Default real grid `[0, 20]` with 2001 points.
pub fn default_s_grid() -> Vec<f64> {
    (0..=2000).map(|k| k as f64 * 0.01).collect()
}

/// Default imaginary grid: 100 points in `(0, 1)`.
pub fn default_sigma_grid() -> Vec<f64> {
    (1..=100).map(|k| k as f64 * 0.0099).collect()
}

pub fn mellin_table(ch: Channel, s_grid: &[f64], sigma_grid: &[f64]) -> Result<MellinTable> {
    check_ascending(s_grid, "s grid")?;
    check_ascending(sigma_grid, "sigma grid")?;
    let max_s = s_grid.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let sym = ChannelSymbol::new(ch, max_s);
    let mut values = Vec::with_capacity(s_grid.len());
    let mut max_imag = 0.0f64;
    for &s in s_grid {
        let v = sym.eval(Complex64::new(s, 0.0))?;
        max_imag = max_imag.max(v.im.abs());
        values.push(v.re);
    }
    let sigma_values = sigma_grid
        .iter()
        .map(|&x| sym.imaginary_axis(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(MellinTable {
        channel: ch,
        s_grid: s_grid.to_vec(),
        values,
        sigma_grid: sigma_grid.to_vec(),
        sigma_values,
        max_imag,
        s0: efimov_exponent(ch)?,
        sigma_root: find_sigma_root(ch)?,
    })
}

/// Upper end of the imaginary segment searched for the exponent `sigma`.
pub const SIGMA_MAX: f64 = 1.0;
const SIGMA_SAMPLES: usize = 32;
const SIGMA_TOL: f64 = 1e-10;

/// Zero `i sigma` of the symbol on the imaginary segment `0 < sigma < 1`.
///
/// Returns `None` when the symbol does not change sign on the segment, which
/// includes the limit-circle case `F_l(0) <= 0`.
pub fn find_sigma_root(ch: Channel) -> Result<Option<f64>> {
    let sym = ChannelSymbol::new(ch, 0.0);
    sigma_root_of(&sym)
}

fn sigma_root_of(sym: &ChannelSymbol) -> Result<Option<f64>> {
    let ch = sym.channel();
    let f0 = sym.imaginary_axis(0.0)?;
    if f0 <= 0.0 {
        return Ok(None);
    }
    let top = SIGMA_MAX.min(ch.strip() * (1.0 - 1e-3));
    let xs: Vec<f64> = (0..=SIGMA_SAMPLES)
        .map(|k| top * k as f64 / SIGMA_SAMPLES as f64)
        .collect();
    let ys = xs
        .iter()
        .map(|&x| sym.imaginary_axis(x))
        .collect::<Result<Vec<_>>>()?;
    let changes = sign_changes(&xs, &ys);
    match changes.len() {
        0 => Ok(None),
        1 => {
            let (_, lo, hi) = changes[0];
            let b = try_brent(|x| sym.imaginary_axis(x), lo, hi, SIGMA_TOL)?;
            Ok(Some(b.value))
        }
        n => Err(Error::Ambiguous(alloc::format!(
            "{n} sign changes of F(i sigma) on (0, {top})"
        ))),
    }
}

const S_STEP: f64 = 0.02;

/// Smallest positive real zero `s0` of the symbol, present only in the
/// limit-circle regime. Successive Krein-space eigenvalues of the channel
/// operator then have ratio `exp(pi/s0)`, physical energies `exp(2 pi/s0)`.
pub fn efimov_exponent(ch: Channel) -> Result<Option<f64>> {
    if !ch.interacts() {
        return Ok(None);
    }
    for &s_max in &[10.0, 60.0] {
        let sym = ChannelSymbol::new(ch, s_max);
        if sym.real(0.0)? > 0.0 {
            return Ok(None);
        }
        let mut s = 0.0;
        while s < s_max {
            let next = (s + S_STEP).min(s_max);
            let v = sym.real(next)?;
            if v > 0.0 {
                let b = try_brent(|x| sym.real(x), s, next, 1e-13)?;
                return Ok(Some(b.value));
            }
            s = next;
        }
    }
    Err(Error::no_convergence(
        "no real zero of the symbol found below s = 60",
        f64::NAN,
    ))
}

/// Spectral regime of a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Regular,
    Deficiency,
    LimitCircle,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Regular => "regular",
            Regime::Deficiency => "deficiency",
            Regime::LimitCircle => "limit_circle",
        }
    }
}

/// Regime with the root that decides it: `s0` for limit circle, `sigma` for
/// deficiency (and for regular channels with a root inside the segment).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeClass {
    pub tag: Regime,
    pub sigma_or_s0: Option<f64>,
}

/// Classification from the symbol at the channel's own mass:
/// `F(0) <= 0` is limit circle, a zero `i sigma` with `sigma < 1` is deficiency,
/// anything else is regular.
pub fn classify_regime(ch: Channel) -> Result<RegimeClass> {
    if !ch.interacts() {
        return Ok(RegimeClass {
            tag: Regime::Regular,
            sigma_or_s0: None,
        });
    }
    let sym = ChannelSymbol::new(ch, 0.0);
    if sym.real(0.0)? <= 0.0 {
        return Ok(RegimeClass {
            tag: Regime::LimitCircle,
            sigma_or_s0: efimov_exponent(ch)?,
        });
    }
    match sigma_root_of(&sym)? {
        Some(sigma) => Ok(RegimeClass {
            tag: Regime::Deficiency,
            sigma_or_s0: Some(sigma),
        }),
        None => Ok(RegimeClass {
            tag: Regime::Regular,
            sigma_or_s0: None,
        }),
    }
}

/// Location of a threshold in the mass ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Threshold {
    Bracketed { value: f64, lo: f64, hi: f64 },
    /// The defining condition does not change sign below the ceiling.
    AboveCeiling { ceiling: f64 },
    /// The condition already holds at the floor of the search range.
    BelowFloor { floor: f64 },
}

impl Threshold {
    pub fn value(&self) -> Option<f64> {
        match self {
            Threshold::Bracketed { value, .. } => Some(*value),
            _ => None,
        }
    }

    /// Whether the threshold is known to lie strictly below `x`.
    pub fn known_below(&self, x: f64) -> bool {
        match *self {
            Threshold::Bracketed { hi, .. } => hi < x,
            Threshold::BelowFloor { floor } => floor <= x,
            Threshold::AboveCeiling { .. } => false,
        }
    }

    /// Whether the threshold is known to lie strictly above `x`.
    pub fn known_above(&self, x: f64) -> bool {
        match *self {
            Threshold::Bracketed { lo, .. } => lo > x,
            Threshold::AboveCeiling { ceiling } => ceiling >= x,
            Threshold::BelowFloor { .. } => false,
        }
    }

    /// Relative width of the bracket, zero when unbracketed.
    pub fn relative_width(&self) -> f64 {
        match *self {
            Threshold::Bracketed { value, lo, hi } => (hi - lo) / value,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub l: u32,
    pub sym: Symmetry,
    pub m_star: Threshold,
    pub m_doublestar: Threshold,
    pub method: String,
}

/// Search range and tolerance for threshold bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOptions {
    pub m_floor: f64,
    pub m_ceiling: f64,
    /// Relative bracket width in `m`.
    pub rel_tol: f64,
    pub samples_per_decade: usize,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            m_floor: 1e-3,
            m_ceiling: 1e3,
            rel_tol: 1e-9,
            samples_per_decade: 6,
        }
    }
}

/// Locates the unique upward sign change of `f` on `[lo, hi]` in `ln m`.
fn mass_threshold<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
    opts: &ThresholdOptions,
    what: &str,
) -> Result<Threshold> {
    let decades = (hi / lo).log10().max(0.0);
    let n = ((decades * opts.samples_per_decade as f64).ceil() as usize).max(2);
    let xs: Vec<f64> = (0..=n)
        .map(|k| lo.ln() + (hi / lo).ln() * k as f64 / n as f64)
        .collect();
    let mut ys = Vec::with_capacity(xs.len());
    for &x in &xs {
        ys.push(f(x.exp())?);
    }
    if ys[0] > 0.0 && ys.iter().all(|&y| y > 0.0) {
        return Ok(Threshold::BelowFloor { floor: lo });
    }
    if ys.iter().all(|&y| y <= 0.0) {
        return Ok(Threshold::AboveCeiling { ceiling: hi });
    }
    let changes = sign_changes(&xs, &ys);
    if changes.len() != 1 || ys[changes[0].0] > 0.0 {
        return Err(Error::Ambiguous(alloc::format!(
            "{what}: expected one upward sign change on [{lo}, {hi}], found {}",
            changes.len()
        )));
    }
    let (_, a, b) = changes[0];
    let bracket = try_brent(|x| f(x.exp()), a, b, opts.rel_tol)?;
    Ok(Threshold::Bracketed {
        value: bracket.value.exp(),
        lo: bracket.lo.exp(),
        hi: bracket.hi.exp(),
    })
}

/// `m*_l` from `F_l(0; m) = 0` and `m**_l` from `F_l(i; m) = 0`.
pub fn find_thresholds(l: u32, sym: Symmetry, opts: &ThresholdOptions) -> Result<ThresholdRecord> {
    if !(opts.m_floor > 0.0 && opts.m_ceiling > opts.m_floor) {
        return Err(Error::invalid("threshold search needs 0 < m_floor < m_ceiling"));
    }
    let at = |m: f64, sigma: f64| -> Result<f64> {
        let ch = Channel::with_l_max(l, sym, m, u32::MAX)?;
        ChannelSymbol::new(ch, 0.0).imaginary_axis(sigma)
    };
    let m_star = mass_threshold(|m| at(m, 0.0), opts.m_floor, opts.m_ceiling, opts, "m*")?;
    let m_doublestar = match m_star {
        Threshold::BelowFloor { floor } => {
            if l == 0 || at(floor, SIGMA_MAX)? > 0.0 {
                Threshold::BelowFloor { floor }
            } else {
                mass_threshold(|m| at(m, SIGMA_MAX), floor, opts.m_ceiling, opts, "m**")?
            }
        }
        Threshold::AboveCeiling { ceiling } => Threshold::AboveCeiling { ceiling },
        // for l = 0 the segment end sigma = 1 is the strip edge, where the
        // attractive symbol diverges to -infinity
        Threshold::Bracketed { .. } if l == 0 => Threshold::AboveCeiling {
            ceiling: opts.m_ceiling,
        },
        Threshold::Bracketed { hi, .. } => {
            mass_threshold(|m| at(m, SIGMA_MAX), hi, opts.m_ceiling, opts, "m**")?
        }
    };
    Ok(ThresholdRecord {
        l,
        sym,
        m_star,
        m_doublestar,
        method: String::from(
            "Brent bisection in ln m on F_l(0;m) = 0 and F_l(i;m) = 0 after a log-grid sign scan",
        ),
    })
}

/// Momentum-space symbol of `sqrt(-Laplacian) - C/|x|` in sector `l`,
/// `1 - C M_l(s)`.
#[derive(Debug, Clone)]
pub struct CoulombSymbol {
    l: u32,
    line: LineIntegral,
}

impl CoulombSymbol {
    pub fn new(l: u32, max_re_s: f64) -> Self {
        let opts = SymbolOptions::default();
        // g(t) = Q_l(cosh t)/pi, logarithmic at t = 0
        let ts = tanh_sinh_nodes(0.0, 1.0, 6);
        let mut t = Vec::new();
        let mut w = Vec::new();
        let mut g_pos = Vec::new();
        for n in &ts {
            let d = 2.0 * (0.5 * n.from_a).sinh().powi(2);
            t.push(n.x);
            w.push(n.w);
            g_pos.push(legendre_q_shifted(l as usize, d) / PI);
        }
        let h_max = max_panel(max_re_s);
        let edges: Vec<f64> = graded_edges(opts.t_split - 1.0, 0.25_f64.min(h_max), opts.growth, h_max)
            .into_iter()
            .map(|e| e + 1.0)
            .collect();
        let panels = LineRule::panels(&edges, opts.panel_order);
        let g = |t: f64| legendre_q_shifted(l as usize, 2.0 * (0.5 * t).sinh().powi(2)) / PI;
        for (&x, &wx) in panels.t.iter().zip(&panels.w) {
            t.push(x);
            w.push(wx);
            g_pos.push(g(x));
        }
        let decay = l as f64 + 1.0;
        let big_t = opts.t_split;
        let tail = g(big_t) * (decay * big_t).exp();
        Self {
            l,
            line: LineIntegral {
                rule: LineRule { t, w },
                g_neg: g_pos.clone(),
                g_pos,
                tail_pos: tail,
                tail_neg: tail,
                t_split: big_t,
                decay,
                max_re_s: max_re_s.max(0.0),
            },
        }
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// `M_l(s) = int k_l(1, r) r^(is) dr`.
    pub fn coulomb_part(&self, s: Complex64) -> Result<Complex64> {
        self.line.eval(s)
    }

    pub fn eval(&self, c: f64, s: Complex64) -> Result<Complex64> {
        Ok(1.0 - c * self.coulomb_part(s)?)
    }
}

/// `1 - C M_l(s)` at a single point.
pub fn hr_symbol(l: u32, c: f64, s: Complex64) -> Result<Complex64> {
    if !(c > 0.0) {
        return Err(Error::invalid("Coulomb coefficient must be positive"));
    }
    CoulombSymbol::new(l, s.re.abs()).eval(c, s)
}

/// Critical couplings of the comparison operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HrThresholds {
    pub l: u32,
    /// Largest `C` with a nonnegative symbol on the real axis.
    pub c_doublestar: f64,
    /// `C` at which the imaginary-axis zero reaches `sigma = 1/2`.
    pub c_star: f64,
}

/// `M_l` is real, even and maximal at `s = 0` on the real axis, and increasing
/// along the imaginary axis, so both thresholds are reciprocals of `M_l`.
pub fn hr_thresholds(l: u32) -> Result<HrThresholds> {
    let sym = CoulombSymbol::new(l, 0.0);
    let m0 = sym.coulomb_part(Complex64::new(0.0, 0.0))?.re;
    let mh = sym.coulomb_part(Complex64::new(0.0, 0.5))?.re;
    Ok(HrThresholds {
        l,
        c_doublestar: 1.0 / m0,
        c_star: 1.0 / mh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(l: u32, sym: Symmetry, m: f64) -> Channel {
        Channel::new(l, sym, m).unwrap()
    }

    /// Bosonic l = 0 symbol in closed form:
    /// `a - kappa 4 pi^2 / (c s) sinh(phi s) / cosh(pi s/2)`, `sin phi = 1/(1+m)`.
    fn boson_s_wave(m: f64, s: f64) -> f64 {
        let mp = MassParam::new(m).unwrap();
        let a = kinetic_coefficient(mp);
        let kappa = (m / (m + 2.0)).sqrt();
        let c = 2.0 / (1.0 + m);
        let phi = (1.0 / (1.0 + m)).asin();
        let ratio = if s == 0.0 { phi } else { (phi * s).sinh() / s };
        a - kappa * 4.0 * PI * PI / c * ratio / (0.5 * PI * s).cosh()
    }

    #[test]
    fn boson_s_wave_matches_closed_form() {
        for &m in &[0.05, 0.5, 1.0, 3.0, 20.0] {
            let sym = ChannelSymbol::new(ch(0, Symmetry::Bosonic, m), 12.0);
            for &s in &[0.0, 0.3, 1.0, 2.5, 7.0, 12.0] {
                let got = sym.real(s).unwrap();
                let want = boson_s_wave(m, s);
                assert!((got - want).abs() < 1e-10, "m={m} s={s}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn golden_symbol_values() {
        let f = |l, sym, m| mellin_symbol(ch(l, sym, m), Complex64::new(0.0, 0.0)).unwrap().re;
        assert!((f(0, Symmetry::Bosonic, 1.0) + 2.06472).abs() < 1e-4);
        assert!((f(1, Symmetry::Fermionic, 1.0) - 8.5187).abs() < 1e-3);
        for (m, want) in [(0.01, -0.04486), (0.05, 0.64609), (0.1, 1.5275), (1.0, 9.8254)] {
            assert!((f(3, Symmetry::Fermionic, m) - want).abs() < 1e-4, "l=3 m={m}");
        }
        for (m, want) in [(0.1, 1.2197), (1.0, 9.6426), (5.0, 16.418)] {
            assert!((f(2, Symmetry::Bosonic, m) - want).abs() < 1e-3, "boson l=2 m={m}");
        }
        let free = f(2, Symmetry::Fermionic, 0.05);
        assert!((free - kinetic_coefficient(MassParam::new(0.05).unwrap())).abs() < 1e-15);
    }

    #[test]
    fn efimov_exponents() {
        let s0 = efimov_exponent(ch(0, Symmetry::Bosonic, 1.0)).unwrap().unwrap();
        assert!((s0 - 0.413_697_326_6).abs() < 1e-8, "{s0}");
        let s0 = efimov_exponent(ch(0, Symmetry::Bosonic, 0.5)).unwrap().unwrap();
        assert!((s0 - 0.623_840_791_4).abs() < 1e-8, "{s0}");
        let s0 = efimov_exponent(ch(1, Symmetry::Fermionic, 0.05)).unwrap().unwrap();
        assert!((s0 - 1.085_811_522_6).abs() < 1e-8, "{s0}");
        assert_eq!(efimov_exponent(ch(1, Symmetry::Fermionic, 1.0)).unwrap(), None);
    }

    #[test]
    fn fermion_p_wave_thresholds() {
        let rec = find_thresholds(1, Symmetry::Fermionic, &ThresholdOptions::default()).unwrap();
        let ms = rec.m_star.value().unwrap();
        let mss = rec.m_doublestar.value().unwrap();
        assert!((ms - 0.073_491_770_48).abs() < 1e-8, "{ms}");
        assert!((mss - 0.116_028_435_9).abs() < 1e-8, "{mss}");
        assert!(rec.m_star.relative_width() < 1e-6);
        assert!(rec.m_doublestar.relative_width() < 1e-6);
    }

    #[test]
    fn sigma_root_between_thresholds() {
        let sigma = find_sigma_root(ch(1, Symmetry::Fermionic, 0.0812143)).unwrap().unwrap();
        assert!((sigma - 0.5).abs() < 1e-5, "{sigma}");
        assert_eq!(find_sigma_root(ch(1, Symmetry::Fermionic, 10.0)).unwrap(), None);
    }

    #[test]
    fn regimes() {
        let r = classify_regime(ch(0, Symmetry::Bosonic, 1.0)).unwrap();
        assert_eq!(r.tag, Regime::LimitCircle);
        let r = classify_regime(ch(1, Symmetry::Fermionic, 1.0)).unwrap();
        assert_eq!(r.tag, Regime::Regular);
        let r = classify_regime(ch(1, Symmetry::Bosonic, 1.0)).unwrap();
        assert_eq!(r.tag, Regime::Regular);
        let r = classify_regime(ch(1, Symmetry::Fermionic, 0.1)).unwrap();
        assert_eq!(r.tag, Regime::Deficiency);
        let r = classify_regime(ch(1, Symmetry::Fermionic, 0.05)).unwrap();
        assert_eq!(r.tag, Regime::LimitCircle);
    }

    #[test]
    fn coulomb_s_wave_closed_form() {
        // M_0(s) = tanh(pi s/2)/s, M_0(i sigma) = tan(pi sigma/2)/sigma
        let sym = CoulombSymbol::new(0, 8.0);
        for &s in &[0.0f64, 0.4, 1.0, 3.0, 8.0] {
            let got = sym.coulomb_part(Complex64::new(s, 0.0)).unwrap();
            let want = if s == 0.0 { PI / 2.0 } else { (0.5 * PI * s).tanh() / s };
            assert!((got.re - want).abs() < 1e-11, "s={s} {got} {want}");
            assert!(got.im.abs() < 1e-13);
        }
        for &x in &[0.2f64, 0.5, 0.9] {
            let got = sym.coulomb_part(Complex64::new(0.0, x)).unwrap().re;
            let want = (0.5 * PI * x).tan() / x;
            assert!((got - want).abs() < 1e-10, "sigma={x}");
        }
        let th = hr_thresholds(0).unwrap();
        assert!((th.c_doublestar - 2.0 / PI).abs() < 1e-10);
        assert!((th.c_star - 0.5).abs() < 1e-10);
    }
}
