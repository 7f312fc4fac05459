//! Channel operators discretized on logarithmic momentum grids.
//!
//! A grid is a composite Gauss–Legendre rule in `t = ln p` with equal panels,
//! so it has uniform resolution per e-fold and `sum_i w_i / p_i` reproduces
//! `ln(p_max/p_min)` exactly. In the variables `x_i = sqrt(w_i) p_i psi(p_i)` the
//! channel form becomes the symmetric matrix
//! `M_ij = a p_i delta_ij + sqrt(w_i) p_i K_l(p_i, p_j) p_j sqrt(w_j)`.
//!
//! The negative eigenvalues of a limit-circle channel form a geometric ladder
//! spanning many decades, far beyond the relative accuracy of a dense
//! eigensolver applied to `M`. They are refined one by one through the inertia
//! of the congruent matrices `S(sigma) = C (M - sigma) C` with
//! `C_ii = (a p_i + |sigma|)^(-1/2)`, whose entries are all of order one.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[allow(unused_imports)]
use num_traits::Float;

use crate::channels::{Channel, Threshold};
use crate::error::{Error, Result};
use crate::kernels::{kinetic_coefficient, Projector, Symmetry};
use crate::quad::GaussLegendre;
use crate::roots::{brent, try_bisect};

pub const MIN_GRID_POINTS: usize = 16;
const PANEL_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub p_min: f64,
    pub p_max: f64,
    pub n: usize,
}

/// `n` Gauss–Legendre nodes in `ln p`, eight per panel (the first few panels
/// take one extra node when `n` is not a multiple of eight).
pub fn build_grid(p_min: f64, p_max: f64, n: usize) -> Result<RadialGrid> {
    if !(p_min > 0.0 && p_max > p_min && p_max.is_finite()) {
        return Err(Error::invalid(alloc::format!(
            "grid needs 0 < p_min < p_max, got [{p_min}, {p_max}]"
        )));
    }
    if n < MIN_GRID_POINTS {
        return Err(Error::invalid(alloc::format!(
            "grid needs at least {MIN_GRID_POINTS} points, got {n}"
        )));
    }
    let panels = n / PANEL_ORDER;
    let extra = n % PANEL_ORDER;
    let (t0, t1) = (p_min.ln(), p_max.ln());
    let h = (t1 - t0) / panels as f64;
    let base = GaussLegendre::new(PANEL_ORDER);
    let wide = GaussLegendre::new(PANEL_ORDER + 1);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 0..panels {
        let rule = if k < extra { &wide } else { &base };
        let a = t0 + h * k as f64;
        for (t, w) in rule.mapped(a, a + h) {
            let p = t.exp();
            nodes.push(p);
            weights.push(w * p);
        }
    }
    Ok(RadialGrid {
        nodes,
        weights,
        p_min,
        p_max,
        n,
    })
}

/// Grid of `density` nodes per e-fold on `[p_min, p_max]`.
pub fn grid_with_density(p_min: f64, p_max: f64, density: f64) -> Result<RadialGrid> {
    let n = ((p_max / p_min).ln() * density).ceil() as usize;
    build_grid(p_min, p_max, n.max(MIN_GRID_POINTS))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub entries: DMatrix<f64>,
    pub channel: Channel,
    pub grid: RadialGrid,
    /// The kinetic diagonal `a p_i`.
    pub kinetic: Vec<f64>,
}

impl ChannelMatrix {
    /// Largest `|M_ij - M_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        let m = &self.entries;
        let n = m.nrows();
        let mut d = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                d = d.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        d
    }
}

/// Symmetrized quadrature matrix of `a p + K` for an arbitrary kernel.
pub fn discretize_kernel<K: FnMut(f64, f64) -> f64>(kinetic: f64, mut kernel: K, grid: &RadialGrid) -> DMatrix<f64> {
    let n = grid.n;
    let s: Vec<f64> = grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .map(|(&p, &w)| w.sqrt() * p)
        .collect();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = s[i] * kernel(grid.nodes[i], grid.nodes[j]) * s[j];
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m[(i, i)] += kinetic * grid.nodes[i];
    }
    m
}

pub fn discretize_channel(ch: Channel, grid: &RadialGrid) -> ChannelMatrix {
    let a = kinetic_coefficient(ch.m);
    let mut proj = Projector::new(ch.l, ch.m, ch.sym);
    let entries = discretize_kernel(a, |p, q| proj.eval(p, q), grid);
    ChannelMatrix {
        entries,
        channel: ch,
        kinetic: grid.nodes.iter().map(|&p| a * p).collect(),
        grid: grid.clone(),
    }
}

fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Ascending eigenvalues of `S(sigma) = C (M - sigma) C`.
#[doc(hidden)]
pub fn scaled_spectrum(m: &DMatrix<f64>, kinetic: &[f64], sigma: f64) -> Vec<f64> {
    let n = m.nrows();
    let c: Vec<f64> = kinetic.iter().map(|&k| 1.0 / (k + sigma.abs()).sqrt()).collect();
    let mut s = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let mut v = m[(i, j)];
            if i == j {
                v -= sigma;
            }
            s[(i, j)] = c[i] * v * c[j];
        }
    }
    sorted_eigenvalues(&s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    /// Geometric mean of `E_(k+1)/E_k` over the retained levels.
    pub ratio: f64,
    /// Spread of the individual ratios (standard deviation).
    pub uncertainty: f64,
    /// Number of levels the estimate is built from.
    pub levels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    /// All eigenvalues, ascending. The negative ones are refined to full
    /// relative accuracy, the rest come from the dense solver.
    pub eigenvalues: Vec<f64>,
    pub n_negative: usize,
    pub ratio_estimate: Option<RatioEstimate>,
    pub cutoffs: (f64, f64),
}

impl SpectralResult {
    /// Negative eigenvalues, most negative first.
    pub fn negative(&self) -> &[f64] {
        &self.eigenvalues[..self.n_negative]
    }

    pub fn lowest(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Relative accuracy of refined negative eigenvalues.
const LEVEL_TOL: f64 = 1e-10;

/// Eigenvalues of the channel matrix with every negative one refined to
/// relative accuracy independent of its magnitude.
pub fn negative_spectrum(mat: &ChannelMatrix) -> Result<SpectralResult> {
    let m = &mat.entries;
    let kin = &mat.kinetic;
    if kin.iter().any(|&k| !(k > 0.0)) {
        return Err(Error::invalid("kinetic diagonal must be positive"));
    }
    let mut eigenvalues = sorted_eigenvalues(m);
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::no_convergence("dense symmetric eigensolver", f64::NAN));
    }
    let t0 = scaled_spectrum(m, kin, 0.0);
    let count = t0.iter().take_while(|&&v| v < 0.0).count();
    let levels = refine_levels(m, kin, count, &eigenvalues)?;
    eigenvalues[..count].copy_from_slice(&levels);
    // the dense tail has absolute accuracy ~eps |M|; inertia proves it is
    // nonnegative, so rounding noise below zero is clamped
    for v in &mut eigenvalues[count..] {
        *v = v.max(0.0);
    }
    let ratio_estimate = efimov_ratio(&eigenvalues[..count]);
    Ok(SpectralResult {
        eigenvalues,
        n_negative: count,
        ratio_estimate,
        cutoffs: (mat.grid.p_min, mat.grid.p_max),
    })
}

/// Solves `lambda_k(S(-e^u)) = 0` for every `k < count`, sharing the inertia
/// information of each evaluation among all levels.
fn refine_levels(m: &DMatrix<f64>, kin: &[f64], count: usize, dense: &[f64]) -> Result<Vec<f64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let scale = m.camax();
    let mut lo = alloc::vec![f64::NEG_INFINITY; count];
    let mut hi = alloc::vec![f64::INFINITY; count];
    let update = |u: f64, spec: &[f64], lo: &mut [f64], hi: &mut [f64]| {
        for k in 0..count {
            if spec[k] < 0.0 {
                lo[k] = lo[k].max(u);
            } else {
                hi[k] = hi[k].min(u);
            }
        }
    };
    // global bracket: below |E_1| bound and above every level
    let top = (2.0 * dense[0].abs()).max(1e-300).ln();
    let spec = scaled_spectrum(m, kin, -top.exp());
    update(top, &spec, &mut lo, &mut hi);
    let mut bottom = (kin[0] * 1e-6).ln();
    loop {
        let spec = scaled_spectrum(m, kin, -bottom.exp());
        update(bottom, &spec, &mut lo, &mut hi);
        if spec[count - 1] < 0.0 {
            break;
        }
        bottom -= 10.0;
        if bottom < -700.0 {
            return Err(Error::no_convergence("bracketing the shallowest level", f64::NAN));
        }
    }
    // dense eigenvalues are accurate for the deep levels; seed tight brackets
    for k in 0..count {
        let e = dense[k];
        if e < 0.0 && e.abs() > 1e3 * f64::EPSILON * scale {
            let u = e.abs().ln();
            let d = 1e-6_f64.max(100.0 * f64::EPSILON * scale / e.abs());
            for cand in [u - d, u + d] {
                if cand > lo[k] && cand < hi[k] {
                    let spec = scaled_spectrum(m, kin, -cand.exp());
                    update(cand, &spec, &mut lo, &mut hi);
                }
            }
        }
    }
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        if hi[k] - lo[k] > LEVEL_TOL {
            let (a, b) = (lo[k], hi[k]);
            let lo_ref = &mut lo;
            let hi_ref = &mut hi;
            let r = brent(
                |u| {
                    let spec = scaled_spectrum(m, kin, -u.exp());
                    for j in 0..count {
                        if spec[j] < 0.0 {
                            lo_ref[j] = lo_ref[j].max(u);
                        } else {
                            hi_ref[j] = hi_ref[j].min(u);
                        }
                    }
                    -spec[k]
                },
                a,
                b,
                LEVEL_TOL,
            )?;
            out.push(-r.value.exp());
        } else {
            out.push(-(0.5 * (lo[k] + hi[k])).exp());
        }
    }
    out.sort_by(|a, b| a.total_cmp(b));
    Ok(out)
}

/// Geometric ratio of a ladder of negative eigenvalues (most negative first),
/// excluding up to two levels next to each cutoff.
pub fn efimov_ratio(negative: &[f64]) -> Option<RatioEstimate> {
    let n = negative.len();
    if n < 3 || negative.iter().any(|&e| !(e < 0.0)) {
        return None;
    }
    let drop = 2.min((n - 2) / 2);
    let kept = &negative[drop..n - drop];
    let logs: Vec<f64> = kept.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    let var = if logs.len() > 1 {
        logs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (logs.len() - 1) as f64
    } else {
        0.0
    };
    let ratio = mean.exp();
    Some(RatioEstimate {
        ratio,
        uncertainty: ratio * var.sqrt(),
        levels: kept.len(),
    })
}

/// Behaviour of the lowest eigenvalue under growing ultraviolet cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanDiagnosis {
    /// The lowest eigenvalue stays bounded: regular or deficiency channel.
    Bounded,
    /// The lowest eigenvalue grows like the cutoff: limit-circle channel.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffScan {
    pub results: Vec<SpectralResult>,
    /// `d ln|E_min| / d ln p_max` between the first and last cutoff, when both
    /// lowest eigenvalues are negative.
    pub growth_exponent: Option<f64>,
    pub diagnosis: ScanDiagnosis,
}

/// Spectra for an ascending sequence of ultraviolet cutoffs at fixed
/// infrared cutoff and node density.
pub fn cutoff_scan(ch: Channel, p_min: f64, p_max_sequence: &[f64], density: f64) -> Result<CutoffScan> {
    if p_max_sequence.is_empty() || p_max_sequence.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("cutoff sequence must be non-empty and ascending"));
    }
    let mut results = Vec::with_capacity(p_max_sequence.len());
    for &p_max in p_max_sequence {
        let grid = grid_with_density(p_min, p_max, density)?;
        results.push(negative_spectrum(&discretize_channel(ch, &grid))?);
    }
    let first = results[0].lowest();
    let last = results[results.len() - 1].lowest();
    let span = (p_max_sequence[p_max_sequence.len() - 1] / p_max_sequence[0]).ln();
    let growth_exponent = if first < 0.0 && last < 0.0 && span > 0.0 {
        Some((last / first).ln() / span)
    } else {
        None
    };
    let diagnosis = match growth_exponent {
        Some(g) if g > 0.5 => ScanDiagnosis::Unbounded,
        _ => ScanDiagnosis::Bounded,
    };
    Ok(CutoffScan {
        results,
        growth_exponent,
        diagnosis,
    })
}

/// Lowest eigenvalue of `diag(p)^(-1/2) M diag(p)^(-1/2)` on a grid of `length`
/// e-folds. As the length grows it decreases to `min_s F_l(s)`.
pub fn dilation_lowest(ch: Channel, length: f64, density: f64) -> Result<f64> {
    let grid = grid_with_density((-0.5 * length).exp(), (0.5 * length).exp(), density)?;
    let mat = discretize_channel(ch, &grid);
    Ok(scaled_spectrum(&mat.entries, &mat.kinetic, 0.0)[0] * kinetic_coefficient(ch.m))
}

/// `min_s F_l(s)` extrapolated from three grid lengths with
/// `lambda(L) = F + A/L^2 + B/L^3`.
pub fn extrapolated_symbol_minimum(ch: Channel, lengths: [f64; 3], density: f64) -> Result<f64> {
    let mut a = nalgebra::Matrix3::zeros();
    let mut b = nalgebra::Vector3::zeros();
    for (r, &len) in lengths.iter().enumerate() {
        a[(r, 0)] = 1.0;
        a[(r, 1)] = len.powi(-2);
        a[(r, 2)] = len.powi(-3);
        b[r] = dilation_lowest(ch, len, density)?;
    }
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::invalid("grid lengths must be distinct"))?;
    Ok(x[0])
}

/// Decay exponent `sigma` of the zero-energy response to a source at the
/// infrared end: in the middle of the grid `psi(p) ~ p^(-2-sigma)`.
pub fn zero_energy_exponent(ch: Channel, length: f64, density: f64) -> Result<f64> {
    let grid = grid_with_density((-0.5 * length).exp(), (0.5 * length).exp(), density)?;
    let mat = discretize_channel(ch, &grid);
    let n = grid.n;
    let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let mut rhs = DVector::zeros(n);
    for i in 0..PANEL_ORDER.min(n) {
        rhs[i] = sw[i];
    }
    let chol = nalgebra::Cholesky::new(mat.entries.clone()).ok_or_else(|| {
        Error::Unsupported(String::from(
            "zero-energy response needs a positive channel matrix (channel is limit circle)",
        ))
    })?;
    let x = chol.solve(&rhs);
    let t0 = grid.p_min.ln();
    let (lo, hi) = (t0 + 0.35 * length, t0 + 0.65 * length);
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut k = 0.0;
    for i in 0..n {
        let t = grid.nodes[i].ln();
        if t < lo || t > hi {
            continue;
        }
        let psi = x[i] / (sw[i] * grid.nodes[i]);
        if !(psi > 0.0) {
            return Err(Error::no_convergence("zero-energy response changes sign", psi));
        }
        let y = psi.ln();
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        k += 1.0;
    }
    let slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    Ok(-slope - 2.0)
}

/// Resolution of the spectral threshold scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub density: f64,
    pub lengths: [f64; 3],
    pub response_length: f64,
    /// Relative bracket width in `m`.
    pub rel_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            density: 12.0,
            lengths: [16.0, 24.0, 32.0],
            response_length: 40.0,
            rel_tol: 1e-4,
        }
    }
}

/// Independent estimates of `m*` (sign of the extrapolated symbol minimum)
/// and `m**` (zero-energy exponent reaching 1), by bisection in `ln m` on
/// `[m_lo, m_hi]`.
pub fn scan_thresholds(
    l: u32,
    sym: Symmetry,
    m_lo: f64,
    m_hi: f64,
    opts: &ScanOptions,
) -> Result<(Threshold, Threshold)> {
    if !(m_lo > 0.0 && m_hi > m_lo) {
        return Err(Error::invalid("scan needs 0 < m_lo < m_hi"));
    }
    let chan = |m: f64| Channel::with_l_max(l, sym, m, u32::MAX);
    let tol = opts.rel_tol;
    let star = try_bisect(
        |x| extrapolated_symbol_minimum(chan(x.exp())?, opts.lengths, opts.density),
        m_lo.ln(),
        m_hi.ln(),
        tol,
    )?;
    let dstar = try_bisect(
        |x| Ok(zero_energy_exponent(chan(x.exp())?, opts.response_length, opts.density)? - 1.0),
        star.hi,
        m_hi.ln(),
        tol,
    )?;
    let to_threshold = |b: crate::roots::Bracket| Threshold::Bracketed {
        value: b.value.exp(),
        lo: b.lo.exp(),
        hi: b.hi.exp(),
    };
    Ok((to_threshold(star), to_threshold(dstar)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(l: u32, sym: Symmetry, m: f64) -> Channel {
        Channel::new(l, sym, m).unwrap()
    }

    #[test]
    fn grid_contract() {
        let g = build_grid(1e-3, 1e3, 200).unwrap();
        assert_eq!(g.nodes.len(), 200);
        assert!(g.nodes.iter().all(|&p| p > 1e-3 && p < 1e3));
        let log_measure: f64 = g.nodes.iter().zip(&g.weights).map(|(p, w)| w / p).sum();
        assert!((log_measure - (1e6f64).ln()).abs() < 1e-10);
        // nodes per decade within 10 % of uniform
        for d in 0..6 {
            let lo = 1e-3 * 10f64.powi(d);
            let c = g.nodes.iter().filter(|&&p| p >= lo && p < 10.0 * lo).count();
            assert!((c as f64 - 200.0 / 6.0).abs() <= 0.1 * 200.0 / 6.0 + 1.0, "{c}");
        }
        assert!(build_grid(1e-3, 1e3, 8).is_err());
        assert!(build_grid(1.0, 0.5, 32).is_err());
    }

    #[test]
    fn kinetic_only_matrix() {
        let g = build_grid(0.1, 10.0, 32).unwrap();
        let m = discretize_kernel(2.0, |_, _| 0.0, &g);
        for i in 0..32 {
            assert_eq!(m[(i, i)], 2.0 * g.nodes[i]);
        }
        let chm = discretize_channel(ch(1, Symmetry::Bosonic, 1.0), &g);
        let res = negative_spectrum(&chm).unwrap();
        assert_eq!(res.n_negative, 0);
        assert_eq!(chm.symmetry_defect(), 0.0);
    }

    #[test]
    fn synthetic_ladder_ratio() {
        let r: f64 = 0.37;
        let e: Vec<f64> = (0..9).map(|k| -r.powi(k)).collect();
        let est = efimov_ratio(&e).unwrap();
        assert!((est.ratio - r).abs() < 1e-14);
        assert!(est.uncertainty < 1e-14);
        assert!(efimov_ratio(&e[..2]).is_none());
    }

    #[test]
    fn heavy_fermion_channel_is_positive() {
        let g = build_grid(1e-4, 1e4, 160).unwrap();
        let res = negative_spectrum(&discretize_channel(ch(1, Symmetry::Fermionic, 10.0), &g)).unwrap();
        assert_eq!(res.n_negative, 0);
        assert!(res.lowest() > 0.0);
    }

    #[test]
    fn dilation_covariance() {
        let c = ch(0, Symmetry::Bosonic, 1.0);
        let g1 = build_grid(1e-6, 1e6, 120).unwrap();
        let g2 = build_grid(4e-6, 4e6, 120).unwrap();
        let r1 = negative_spectrum(&discretize_channel(c, &g1)).unwrap();
        let r2 = negative_spectrum(&discretize_channel(c, &g2)).unwrap();
        assert_eq!(r1.n_negative, r2.n_negative);
        for (a, b) in r1.negative().iter().zip(r2.negative()) {
            assert!((b / a - 4.0).abs() < 1e-8, "{a} {b}");
        }
    }
}
