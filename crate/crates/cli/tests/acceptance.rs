//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero when any gating criterion fails.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use contact_core::approx::{
    bs_scaling_study, bs_top_eigenvalue, tune_to_resonance, weak_limit_check, BsGrid, RadialPotential,
    ScalingExponent,
};
use contact_core::assembly::{
    enumerate_components, predict_spectrum, ContactGraph, MellinOracle, Particle, Statistics, Verdict,
};
use contact_core::channels::{
    classify_regime, efimov_exponent, find_thresholds, mellin_symbol, mellin_table, Channel, Regime,
    ThresholdOptions, DEFAULT_L_MAX,
};
use contact_core::fourbody::{positivity_suite, Parity};
use contact_core::kernels::Symmetry;
use contact_core::salpeter::{bound_state, count_bound_states, dispersion, log_boundary_check};
use contact_core::spectra::{discretize_channel, grid_with_density, negative_spectrum, scan_thresholds, ScanOptions};
use contact_spectra::inputs::{load_manifest, load_potentials};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn corpus() -> Vec<RadialPotential> {
    load_potentials(&data("potentials.json"))
        .unwrap()
        .iter()
        .map(|p| p.potential().unwrap())
        .collect()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn symbol_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_imag = 0.0f64;
    let mut worst_even = 0.0f64;
    for _ in 0..50 {
        let l = rng.random_range(0..=4u32);
        let sym = if rng.random_bool(0.5) { Symmetry::Bosonic } else { Symmetry::Fermionic };
        let m = rng.random_range(0.05..=10.0);
        let s = rng.random_range(-10.0..=10.0);
        let ch = Channel::new(l, sym, m).map_err(|e| e.to_string())?;
        let fp = mellin_symbol(ch, Complex64::new(s, 0.0)).map_err(|e| e.to_string())?;
        let fm = mellin_symbol(ch, Complex64::new(-s, 0.0)).map_err(|e| e.to_string())?;
        worst_imag = worst_imag.max(fp.im.abs());
        worst_even = worst_even.max((fp - fm).norm());
    }
    check(
        worst_imag < 1e-10 && worst_even < 1e-10,
        format!("max |Im F| = {worst_imag:.2e}, max |F(s) - F(-s)| = {worst_even:.2e}"),
    )
}

fn regime_facts() -> Outcome {
    let opts = ThresholdOptions::default();
    let mut notes = Vec::new();
    let mut ok = true;
    for l in 1..=3 {
        let r = find_thresholds(l, Symmetry::Fermionic, &opts).map_err(|e| e.to_string())?;
        let below = r.m_doublestar.known_below(1.0);
        ok &= below;
        notes.push(format!("fermion m**_{l} {:?}", r.m_doublestar));
    }
    let b = find_thresholds(0, Symmetry::Bosonic, &opts).map_err(|e| e.to_string())?;
    ok &= b.m_star.known_above(1.0);
    notes.push(format!("boson m*_0 {:?}", b.m_star));
    let unit = classify_regime(Channel::new(0, Symmetry::Bosonic, 1.0).unwrap()).map_err(|e| e.to_string())?;
    ok &= unit.tag == Regime::LimitCircle;
    notes.push(format!("boson l=0 m=1 {}", unit.tag.as_str()));
    let s_grid: Vec<f64> = (0..=400).map(|k| 0.05 * k as f64).collect();
    let mut min_f = f64::INFINITY;
    for l in (1..=DEFAULT_L_MAX).step_by(2) {
        let ch = Channel::new(l, Symmetry::Fermionic, 1.0).unwrap();
        let t = mellin_table(ch, &s_grid, &[0.5]).map_err(|e| e.to_string())?;
        min_f = t.values.iter().chain(&t.sigma_values).fold(min_f, |a, &b| a.min(b));
        ok &= classify_regime(ch).map_err(|e| e.to_string())?.tag == Regime::Regular;
    }
    ok &= min_f > 0.0;
    notes.push(format!("equal-mass fermion min F = {min_f:.4}"));
    check(ok, notes.join("; "))
}

fn efimov_cross_check() -> Outcome {
    let points = [
        (Symmetry::Bosonic, 0, 1.0, 70.0f64, 4.0),
        (Symmetry::Bosonic, 0, 0.5, 50.0, 6.0),
        (Symmetry::Fermionic, 1, 0.05, 32.0, 16.0),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (sym, l, m, length, density) in points {
        let t0 = Instant::now();
        let ch = Channel::new(l, sym, m).unwrap();
        let s0 = efimov_exponent(ch)
            .map_err(|e| e.to_string())?
            .ok_or("channel has no Efimov exponent")?;
        let grid = grid_with_density((-0.5 * length).exp(), (0.5 * length).exp(), density).map_err(|e| e.to_string())?;
        let res = negative_spectrum(&discretize_channel(ch, &grid)).map_err(|e| e.to_string())?;
        let est = res.ratio_estimate.ok_or("fewer than three negative levels")?;
        let expected = (-2.0 * PI / s0).exp();
        let rel = (est.ratio * est.ratio / expected - 1.0).abs();
        let secs = t0.elapsed().as_secs_f64();
        ok &= rel < 0.01 && secs < 120.0;
        notes.push(format!(
            "{} l={l} m={m}: {} levels, rel {rel:.1e} ({secs:.1}s)",
            sym.as_str(),
            res.n_negative
        ));
    }
    check(ok, notes.join("; "))
}

fn threshold_cross_validation() -> (Outcome, String) {
    let run = || -> Result<(f64, f64, f64, f64), String> {
        let r = find_thresholds(1, Symmetry::Fermionic, &ThresholdOptions::default()).map_err(|e| e.to_string())?;
        let s = r.m_star.value().ok_or("m* not bracketed")?;
        let d = r.m_doublestar.value().ok_or("m** not bracketed")?;
        let (ss, sd) = scan_thresholds(1, Symmetry::Fermionic, 0.5 * s, 2.0 * d, &ScanOptions::default())
            .map_err(|e| e.to_string())?;
        Ok((s, d, ss.value().unwrap(), sd.value().unwrap()))
    };
    match run() {
        Ok((s, d, ss, sd)) => {
            let (r1, r2) = ((ss / s - 1.0).abs(), (sd / d - 1.0).abs());
            let note = format!(
                "1/m*_1 = {:.4} against the published 13.6 (rel {:.1e}, reference only)",
                1.0 / s,
                (1.0 / s / 13.6 - 1.0).abs()
            );
            (
                check(
                    r1 < 5e-3 && r2 < 5e-3,
                    format!("m*_1 {s:.6} vs {ss:.6} (rel {r1:.1e}); m**_1 {d:.6} vs {sd:.6} (rel {r2:.1e})"),
                ),
                note,
            )
        }
        Err(e) => (Err(e), String::new()),
    }
}

fn dilation_identities() -> Outcome {
    let eps = [1.0, 0.5, 0.25, 0.1];
    let grid = BsGrid::default();
    let mut worst = 0.0f64;
    for base in corpus() {
        for exponent in [ScalingExponent::Contact, ScalingExponent::Point] {
            for row in bs_scaling_study(&base, &eps, exponent, &grid).map_err(|e| e.to_string())? {
                worst = worst.max((row.ratio / row.expected_ratio - 1.0).abs());
            }
        }
    }
    check(worst < 1e-6, format!("max relative deviation {worst:.2e}"))
}

fn resonance_coherence() -> Outcome {
    let exact = PI * PI / 4.0;
    let base = RadialPotential::square_well(1.0, 1.0).unwrap();
    let tuned = tune_to_resonance(&base, 50.0, 1e-12).map_err(|e| e.to_string())?;
    let rel_tuned = (tuned.value / exact - 1.0).abs();
    // mu_top is linear in g at zero energy
    let mu1 = bs_top_eigenvalue(&base, 0.0, &BsGrid::default()).map_err(|e| e.to_string())?;
    let crossing = 1.0 / mu1;
    let rel_cross = (crossing / exact - 1.0).abs();
    check(
        rel_tuned < 1e-6 && rel_cross < 1e-3,
        format!("g* tuned rel {rel_tuned:.1e}, mu_top = 1 crossing rel {rel_cross:.1e}"),
    )
}

fn weak_limit() -> Outcome {
    let eps = [0.2, 0.1, 0.05, 0.025];
    let mut ok = true;
    let mut notes = Vec::new();
    for base in corpus() {
        let g = weak_limit_check(&base, ScalingExponent::Contact, &eps, |x| {
            (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp()
        })
        .map_err(|e| e.to_string())?;
        let slope = g.slope.ok_or("vanishing error")?;
        let flat = weak_limit_check(&base, ScalingExponent::Contact, &eps, |_| 1.0).map_err(|e| e.to_string())?;
        let zero = flat.errors.iter().all(|&e| e == 0.0);
        ok &= (slope - 2.0).abs() <= 0.2 && zero;
        notes.push(format!("slope {slope:.3}{}", if zero { "" } else { " (f = 1 nonzero)" }));
    }
    check(ok, notes.join(", "))
}

fn fourbody_suite() -> Outcome {
    let t0 = Instant::now();
    let family = load_manifest(&data("fourbody_manifest.json")).map_err(|e| e.to_string())?.members;
    let report = positivity_suite(&family, 1_000_000, 20240601).map_err(|e| e.to_string())?;
    let antisym = report.members.iter().filter(|m| m.parity == Parity::Antisymmetric).count();
    let worst_c1 = report
        .members
        .iter()
        .filter(|m| m.parity == Parity::Antisymmetric)
        .map(|m| m.c1.value.abs() / m.c1.std_error.max(f64::MIN_POSITIVE))
        .fold(0.0f64, f64::max);
    let failed: Vec<&str> = report.members.iter().filter(|m| !m.passed()).map(|m| m.name.as_str()).collect();
    let secs = t0.elapsed().as_secs_f64();
    check(
        report.members.len() == 20 && failed.is_empty() && secs < 600.0,
        format!(
            "{} members ({antisym} antisymmetric), max |C1|/sigma {worst_c1:.2}, failures {failed:?} ({secs:.1}s)",
            report.members.len()
        ),
    )
}

fn unitary_gas(n: usize) -> ContactGraph {
    let up = Particle {
        mass: 1.0,
        statistics: Statistics::Fermion,
        spin: Some(0.5),
    };
    let down = Particle { spin: Some(-0.5), ..up };
    let half = n / 2;
    let particles = (0..n).map(|i| if i < half { up } else { down }).collect();
    let edges = (0..half).flat_map(|i| (half..n).map(move |j| [i, j])).collect();
    ContactGraph { particles, edges }
}

fn species() -> Vec<Particle> {
    let p = |mass, statistics, spin| Particle { mass, statistics, spin };
    vec![
        p(1.0, Statistics::Fermion, Some(0.5)),
        p(1.0, Statistics::Fermion, Some(-0.5)),
        p(0.05, Statistics::Fermion, Some(0.5)),
        p(1.0, Statistics::Boson, None),
        p(12.0, Statistics::Boson, None),
    ]
}

fn random_graph(rng: &mut ChaCha8Rng) -> ContactGraph {
    let sp = species();
    let n = rng.random_range(2..=10usize);
    let particles: Vec<Particle> = (0..n).map(|_| sp[rng.random_range(0..sp.len())]).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let pauli = particles[i].statistics == Statistics::Fermion && particles[i].identical(&particles[j]);
            if rng.random_bool(0.35) && !pauli {
                edges.push([i, j]);
            }
        }
    }
    ContactGraph { particles, edges }
}

fn brute_force_matches(g: &ContactGraph) -> bool {
    let Ok((vs, hs)) = enumerate_components(g) else {
        return false;
    };
    let e = &g.edges;
    let mut v_ref = BTreeSet::new();
    let mut h_ref = BTreeSet::new();
    for a in 0..e.len() {
        for b in a + 1..e.len() {
            let shared: Vec<usize> = e[a].iter().copied().filter(|x| e[b].contains(x)).collect();
            if let [c] = shared[..] {
                let x = e[a][0] + e[a][1] - c;
                let y = e[b][0] + e[b][1] - c;
                v_ref.insert((c, x.min(y), x.max(y)));
            } else {
                h_ref.insert((e[a].min(e[b]), e[a].max(e[b])));
            }
        }
    }
    let v_got: BTreeSet<_> = vs.iter().map(|v| (v.center, v.legs[0], v.legs[1])).collect();
    let h_got: BTreeSet<_> = hs.iter().map(|h| (h.pair1, h.pair2)).collect();
    vs.len() == v_ref.len() && hs.len() == h_ref.len() && v_got == v_ref && h_got == h_ref
}

fn assembly() -> Outcome {
    let mut oracle = MellinOracle::default();
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [4, 6, 8] {
        let p = predict_spectrum(&unitary_gas(n), &mut oracle).map_err(|e| e.to_string())?;
        ok &= p.verdict == Verdict::Stable;
        notes.push(format!("N={n} {}", p.verdict.as_str()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut mismatches = 0;
    let mut changed = 0;
    let sp = species();
    for _ in 0..200 {
        let g = random_graph(&mut rng);
        if !brute_force_matches(&g) {
            mismatches += 1;
        }
        let before = predict_spectrum(&g, &mut oracle).map_err(|e| e.to_string())?;
        let mut h = g.clone();
        h.particles.push(sp[rng.random_range(0..sp.len())]);
        let after = predict_spectrum(&h, &mut oracle).map_err(|e| e.to_string())?;
        if before != after {
            changed += 1;
        }
    }
    for n in [4, 6, 8] {
        let mut h = unitary_gas(n);
        h.particles.push(sp[3]);
        ok &= predict_spectrum(&h, &mut oracle).map_err(|e| e.to_string())?.verdict == Verdict::Stable;
    }
    ok &= mismatches == 0 && changed == 0;
    notes.push(format!("enumeration mismatches {mismatches}/200, isolated-particle changes {changed}/200"));
    check(ok, notes.join("; "))
}

fn salpeter() -> Outcome {
    let energies: Vec<f64> = (0..20)
        .map(|k| {
            let t = k as f64 / 19.0;
            // from E = -50 through the gap region up to E = 0.99
            -50.0 * (1.0 - t).powi(3) + 0.99 * t
        })
        .collect();
    let mut worst_round = 0.0f64;
    let mut worst_fit = 0.0f64;
    let mut counts_ok = true;
    for &e in &energies {
        let alpha = dispersion(e).map_err(|e| e.to_string())?;
        let state = bound_state(alpha).map_err(|e| e.to_string())?;
        worst_round = worst_round.max((state.energy - e).abs() / e.abs().max(1.0));
        let fit = log_boundary_check(&state, 40).map_err(|e| e.to_string())?;
        worst_fit = worst_fit.max(fit.residual);
        counts_ok &= fit.c != 0.0 && count_bound_states(alpha).map_err(|e| e.to_string())? == 1;
    }
    check(
        worst_round < 1e-10 && worst_fit < 1e-3 && counts_ok,
        format!(
            "round trip {worst_round:.1e}, log-fit residual {worst_fit:.1e}, one bound state each: {counts_ok}"
        ),
    )
}

fn full_suite(dir: &Path, threads: Option<&str>) -> Result<(), String> {
    let s = |p: PathBuf| p.to_str().unwrap().to_string();
    let manifest = s(data("fourbody_manifest.json"));
    let potentials = s(data("potentials.json"));
    let graph = s(data("unitary4.json"));
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("symbol.csv", vec!["symbol", "--sym", "fermion", "--l", "1", "--m", "0.1", "--s-points", "201"]),
        ("thresholds.csv", vec!["thresholds", "--sym", "fermion", "--l", "1", "--method", "both"]),
        ("spectrum.csv", vec!["spectrum", "--sym", "boson", "--l", "0", "--m", "1", "--pmin", "1e-12", "--pmax", "1e12", "--n", "200"]),
        ("efimov.csv", vec!["efimov", "--sym", "fermion", "--l", "1", "--m", "0.05"]),
        ("fourbody.csv", vec!["fourbody", "--manifest", &manifest, "--n", "100000", "--seed", "5"]),
        ("converge.csv", vec!["converge", "--potential", &potentials, "--eps", "1,0.5,0.25,0.1", "--exponent", "3"]),
        ("scatter.csv", vec!["scatter", "--potential", &potentials, "--tune"]),
        ("assemble.json", vec!["assemble", "--graph", &graph]),
        ("salpeter.csv", vec!["salpeter", "--alpha=-2,-0.5,0,1,5"]),
    ];
    for (file, args) in runs {
        let out = dir.join(file);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_contact-spectra"));
        cmd.args(&args).arg("--out").arg(&out);
        if let Some(t) = threads {
            cmd.env("CONTACT_SPECTRA_THREADS", t);
        }
        let o = cmd.output().map_err(|e| e.to_string())?;
        if !o.status.success() {
            return Err(format!("{file}: {}", String::from_utf8_lossy(&o.stderr)));
        }
    }
    Ok(())
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    full_suite(a.path(), None)?;
    full_suite(b.path(), Some("1"))?;
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let mut differing = Vec::new();
    for name in &names {
        let x = std::fs::read(a.path().join(name)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.path().join(name)).map_err(|e| e.to_string())?;
        if x != y {
            differing.push(name.to_string_lossy().into_owned());
        }
    }
    check(
        differing.is_empty() && names.len() == 18,
        format!("{} files compared across thread counts, differing {differing:?}", names.len()),
    )
}

fn main() {
    let mut failures = 0;
    let mut report = |n: usize, f: &dyn Fn() -> Outcome| {
        let t0 = Instant::now();
        let outcome = f();
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {n}: PASS [{secs:.1}s] {d}"),
            Err(d) => {
                failures += 1;
                println!("criterion {n}: FAIL [{secs:.1}s] {d}");
            }
        }
    };
    report(1, &symbol_sanity);
    report(2, &regime_facts);
    report(3, &efimov_cross_check);
    let (c4, note) = threshold_cross_validation();
    report(4, &|| c4.clone());
    if !note.is_empty() {
        println!("criterion 4 note: {note}");
    }
    report(5, &dilation_identities);
    report(6, &resonance_coherence);
    report(7, &weak_limit);
    report(8, &fourbody_suite);
    report(9, &assembly);
    report(10, &salpeter);
    report(11, &determinism);
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
