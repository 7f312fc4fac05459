//! Reduction of an N-body contact graph to its three- and four-body parts.
//!
//! Every pair of contact edges is either V shaped (the edges share a
//! particle) or H shaped (the edges are disjoint). V components are
//! three-body channels and take their regime from the channel symbol; H
//! components are two-pair four-body problems, known to be positive for
//! equal-mass spin-1/2 fermions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

#[allow(unused_imports)]
use num_traits::Float;

use crate::channels::{classify_regime, Channel, Regime, RegimeClass, DEFAULT_L_MAX};
use crate::error::{Error, Result};
use crate::kernels::Symmetry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistics {
    Boson,
    Fermion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub mass: f64,
    pub statistics: Statistics,
    /// Spin projection (a half-integer), if the species carries spin.
    #[serde(default)]
    pub spin: Option<f64>,
}

impl Particle {
    /// Same species: equal mass, statistics and spin projection.
    pub fn identical(&self, other: &Particle) -> bool {
        self.mass == other.mass && self.statistics == other.statistics && self.spin == other.spin
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactGraph {
    pub particles: Vec<Particle>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphReport {
    pub violations: Vec<String>,
}

impl GraphReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks indices, masses, duplicate and self edges, and Pauli exclusion of
/// s-wave contact between identical fermions.
pub fn validate_graph(g: &ContactGraph) -> GraphReport {
    let mut violations = Vec::new();
    for (i, p) in g.particles.iter().enumerate() {
        if !(p.mass > 0.0 && p.mass.is_finite()) {
            violations.push(format!("particle {i}: mass must be positive and finite"));
        }
        if let Some(s) = p.spin {
            if !(s.is_finite() && (2.0 * s).fract() == 0.0) {
                violations.push(format!("particle {i}: spin projection must be a half-integer"));
            }
        }
    }
    let n = g.particles.len();
    let mut seen = BTreeMap::new();
    for (k, &[a, b]) in g.edges.iter().enumerate() {
        if a >= n || b >= n {
            violations.push(format!("edge {k}: index out of range ({a}, {b}) for {n} particles"));
            continue;
        }
        if a == b {
            violations.push(format!("edge {k}: self-edge on particle {a}"));
            continue;
        }
        let key = (a.min(b), a.max(b));
        if let Some(first) = seen.insert(key, k) {
            violations.push(format!("edge {k}: duplicates edge {first}"));
        }
        let (pa, pb) = (&g.particles[a], &g.particles[b]);
        if pa.statistics == Statistics::Fermion && pa.identical(pb) {
            violations.push(format!(
                "edge {k}: identical fermions {a} and {b} have no s-wave contact"
            ));
        }
    }
    GraphReport { violations }
}

/// Two edges `(center, legs[0])`, `(center, legs[1])`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VComponent {
    pub center: usize,
    pub legs: [usize; 2],
}

/// Two vertex-disjoint edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HComponent {
    pub pair1: [usize; 2],
    pub pair2: [usize; 2],
}

fn normalized_edges(g: &ContactGraph) -> Vec<[usize; 2]> {
    let mut e: Vec<[usize; 2]> = g.edges.iter().map(|&[a, b]| [a.min(b), a.max(b)]).collect();
    e.sort_unstable();
    e.dedup();
    e
}

/// All V and H shaped pairs of edges, in a canonical order.
pub fn enumerate_components(g: &ContactGraph) -> Result<(Vec<VComponent>, Vec<HComponent>)> {
    let report = validate_graph(g);
    if !report.is_valid() {
        return Err(Error::invalid(report.violations.join("; ")));
    }
    let edges = normalized_edges(g);
    let mut vs = Vec::new();
    let mut hs = Vec::new();
    for (i, e) in edges.iter().enumerate() {
        for f in &edges[i + 1..] {
            let shared: Vec<usize> = e.iter().copied().filter(|x| f.contains(x)).collect();
            match shared.as_slice() {
                [c] => {
                    let a = if e[0] == *c { e[1] } else { e[0] };
                    let b = if f[0] == *c { f[1] } else { f[0] };
                    vs.push(VComponent {
                        center: *c,
                        legs: [a.min(b), a.max(b)],
                    });
                }
                [] => {
                    let (p, q) = if e < f { (*e, *f) } else { (*f, *e) };
                    hs.push(HComponent { pair1: p, pair2: q });
                }
                _ => unreachable!("edges are deduplicated"),
            }
        }
    }
    vs.sort_unstable();
    hs.sort_unstable();
    Ok((vs, hs))
}

/// Source of channel regimes.
pub trait ChannelOracle {
    fn regime(&mut self, ch: Channel) -> Result<RegimeClass>;
    fn l_max(&self) -> u32;
}

/// Regimes from the Mellin symbol, cached per channel.
#[derive(Debug, Clone, Default)]
pub struct MellinOracle {
    cache: BTreeMap<(u32, bool, u64), RegimeClass>,
}

impl ChannelOracle for MellinOracle {
    fn regime(&mut self, ch: Channel) -> Result<RegimeClass> {
        let key = (ch.l, ch.sym == Symmetry::Bosonic, ch.m.get().to_bits());
        if let Some(r) = self.cache.get(&key) {
            return Ok(*r);
        }
        let r = classify_regime(ch)?;
        self.cache.insert(key, r);
        Ok(r)
    }

    fn l_max(&self) -> u32 {
        DEFAULT_L_MAX
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    BoundedBelowWithBoundStates,
    Efimov,
    OutOfComputedTable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::BoundedBelowWithBoundStates => "bounded_below_with_bound_states",
            Verdict::Efimov => "efimov",
            Verdict::OutOfComputedTable => "out of computed table",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VEntry {
    pub component: VComponent,
    pub symmetry: Option<Symmetry>,
    /// `M_center / M_leg`
    pub mass_ratio: Option<f64>,
    /// Most singular regime over the interacting sectors `l <= l_max`.
    pub regime: Option<Regime>,
    /// Sector that decides the regime.
    pub l: Option<u32>,
    pub s0: Option<f64>,
    /// `exp(-pi / s0)`, ratio of consecutive levels of the channel operator.
    pub ladder_ratio: Option<f64>,
    /// `exp(-2 pi / s0)`, ratio of consecutive three-body energies.
    pub energy_ratio: Option<f64>,
    pub verdict: Verdict,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HEntry {
    pub component: HComponent,
    pub verdict: Verdict,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPrediction {
    pub v_components: Vec<VEntry>,
    pub h_components: Vec<HEntry>,
    pub verdict: Verdict,
}

fn severity(r: Regime) -> u8 {
    match r {
        Regime::Regular => 0,
        Regime::Deficiency => 1,
        Regime::LimitCircle => 2,
    }
}

fn v_entry<O: ChannelOracle>(g: &ContactGraph, v: VComponent, oracle: &mut O) -> Result<VEntry> {
    let c = &g.particles[v.center];
    let (a, b) = (&g.particles[v.legs[0]], &g.particles[v.legs[1]]);
    let mut entry = VEntry {
        component: v,
        symmetry: None,
        mass_ratio: None,
        regime: None,
        l: None,
        s0: None,
        ladder_ratio: None,
        energy_ratio: None,
        verdict: Verdict::OutOfComputedTable,
        note: None,
    };
    if !a.identical(b) {
        entry.note = Some(String::from("legs are distinguishable particles"));
        return Ok(entry);
    }
    let sym = match a.statistics {
        Statistics::Boson => Symmetry::Bosonic,
        Statistics::Fermion => Symmetry::Fermionic,
    };
    let m = c.mass / a.mass;
    entry.symmetry = Some(sym);
    entry.mass_ratio = Some(m);
    let mut worst: Option<(u32, RegimeClass)> = None;
    for l in 0..=oracle.l_max() {
        if !sym.interacts_in(l) {
            continue;
        }
        let ch = Channel::with_l_max(l, sym, m, oracle.l_max())?;
        let r = oracle.regime(ch)?;
        if worst.is_none_or(|(_, w)| severity(r.tag) > severity(w.tag)) {
            worst = Some((l, r));
        }
    }
    let (l, r) = worst.ok_or_else(|| Error::invalid("no interacting sector below l_max"))?;
    entry.regime = Some(r.tag);
    entry.l = Some(l);
    entry.verdict = match r.tag {
        Regime::Regular => Verdict::Stable,
        Regime::Deficiency => Verdict::BoundedBelowWithBoundStates,
        Regime::LimitCircle => Verdict::Efimov,
    };
    if r.tag == Regime::LimitCircle {
        entry.s0 = r.sigma_or_s0;
        if let Some(s0) = r.sigma_or_s0 {
            entry.ladder_ratio = Some((-core::f64::consts::PI / s0).exp());
            entry.energy_ratio = Some((-2.0 * core::f64::consts::PI / s0).exp());
        }
    }
    Ok(entry)
}

fn h_entry(g: &ContactGraph, h: HComponent) -> HEntry {
    let ids = [h.pair1[0], h.pair1[1], h.pair2[0], h.pair2[1]];
    let ps: Vec<&Particle> = ids.iter().map(|&i| &g.particles[i]).collect();
    let equal_mass_fermions = ps
        .iter()
        .all(|p| p.statistics == Statistics::Fermion && p.mass == ps[0].mass);
    let half = |p: &Particle| matches!(p.spin, Some(s) if s.abs() == 0.5);
    let opposite = |i: usize, j: usize| ps[i].spin.zip(ps[j].spin).is_some_and(|(a, b)| a == -b);
    if equal_mass_fermions && ps.iter().all(|p| half(p)) && opposite(0, 1) && opposite(2, 3) {
        HEntry {
            component: h,
            verdict: Verdict::Stable,
            note: None,
        }
    } else {
        HEntry {
            component: h,
            verdict: Verdict::OutOfComputedTable,
            note: Some(String::from(
                "only two pairs of equal-mass spin-1/2 fermions with opposite spins in each pair are tabulated",
            )),
        }
    }
}

/// Union of the component verdicts: any Efimov channel makes the system
/// Efimov; otherwise any untabulated component leaves it undecided;
/// otherwise deficiency channels add bound states to a stable system.
pub fn predict_spectrum<O: ChannelOracle>(g: &ContactGraph, oracle: &mut O) -> Result<SpectrumPrediction> {
    let (vs, hs) = enumerate_components(g)?;
    let v_components = vs
        .into_iter()
        .map(|v| v_entry(g, v, oracle))
        .collect::<Result<Vec<_>>>()?;
    let h_components: Vec<HEntry> = hs.into_iter().map(|h| h_entry(g, h)).collect();
    let verdicts = || {
        v_components
            .iter()
            .map(|e| e.verdict)
            .chain(h_components.iter().map(|e| e.verdict))
    };
    let verdict = if verdicts().any(|v| v == Verdict::Efimov) {
        Verdict::Efimov
    } else if verdicts().any(|v| v == Verdict::OutOfComputedTable) {
        Verdict::OutOfComputedTable
    } else if verdicts().any(|v| v == Verdict::BoundedBelowWithBoundStates) {
        Verdict::BoundedBelowWithBoundStates
    } else {
        Verdict::Stable
    };
    Ok(SpectrumPrediction {
        v_components,
        h_components,
        verdict,
    })
}
