use contact_core::approx::{
    bs_top_eigenvalue, scale_potential, scattering_length, tune_to_resonance, BsGrid, ScatteringOptions,
};
use contact_core::assembly::{predict_spectrum, validate_graph, MellinOracle, SpectrumPrediction};
use contact_core::channels::{
    classify_regime, find_thresholds, mellin_table, Channel, Regime, Threshold, ThresholdOptions, ThresholdRecord,
};
use contact_core::fourbody::{evaluate_member, MemberReport, MIN_FAMILY, SIGMA_LEVEL};
use contact_core::kernels::Symmetry;
use contact_core::salpeter::{bound_state, count_bound_states, log_boundary_check};
use contact_core::spectra::{build_grid, discretize_channel, negative_spectrum, scan_thresholds, ScanOptions};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::CliError;
use crate::inputs::{load_graph, load_manifest, load_potentials};
use crate::output::{Artifact, Cell, Table};

type Res<T> = Result<T, CliError>;

fn positive(name: &str, v: f64) -> Res<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::bad_args(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn channel(c: &ChannelArgs) -> Res<Channel> {
    positive("m", c.m)?;
    Ok(Channel::new(c.l, c.sym.into(), c.m)?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable result")
}

pub fn execute(cmd: &Command) -> Res<Artifact> {
    match cmd {
        Command::Symbol(a) => symbol(a),
        Command::Thresholds(a) => thresholds(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Efimov(a) => efimov(a),
        Command::Fourbody(a) => fourbody(a),
        Command::Converge(a) => converge(a),
        Command::Scatter(a) => scatter(a),
        Command::Assemble(a) => assemble(a),
        Command::Salpeter(a) => salpeter(a),
    }
}

fn symbol(a: &SymbolArgs) -> Res<Artifact> {
    let ch = channel(&a.channel)?;
    positive("s-max", a.s_max)?;
    if a.s_points < 2 || a.sigma_points < 1 {
        return Err(CliError::bad_args("--s-points must be >= 2 and --sigma-points >= 1"));
    }
    let s_grid: Vec<f64> = (0..a.s_points)
        .map(|k| a.s_max * k as f64 / (a.s_points - 1) as f64)
        .collect();
    let strip = ch.strip();
    let sigma_grid: Vec<f64> = (1..=a.sigma_points)
        .map(|k| strip * k as f64 / (a.sigma_points + 1) as f64)
        .collect();
    let t = mellin_table(ch, &s_grid, &sigma_grid)?;
    let mut table = Table::new(&["axis", "x", "value"]);
    for (x, v) in t.s_grid.iter().zip(&t.values) {
        table.push(vec![Cell::text("real"), Cell::Float(*x), Cell::Float(*v)]);
    }
    for (x, v) in t.sigma_grid.iter().zip(&t.sigma_values) {
        table.push(vec![Cell::text("imag"), Cell::Float(*x), Cell::Float(*v)]);
    }
    let summary = json!({
        "f_at_zero": t.values[0],
        "s0": t.s0,
        "sigma_root": t.sigma_root,
        "max_imag": t.max_imag,
    });
    Ok(Artifact {
        table,
        json: to_value(&t),
        summary,
    })
}

fn threshold_cells(t: &Threshold) -> Vec<Cell> {
    let kind = match t {
        Threshold::Bracketed { .. } => "bracketed",
        Threshold::AboveCeiling { .. } => "above_ceiling",
        Threshold::BelowFloor { .. } => "below_floor",
    };
    let (v, lo, hi) = match *t {
        Threshold::Bracketed { value, lo, hi } => (Some(value), Some(lo), Some(hi)),
        Threshold::AboveCeiling { ceiling } => (None, Some(ceiling), None),
        Threshold::BelowFloor { floor } => (None, None, Some(floor)),
    };
    let width = matches!(t, Threshold::Bracketed { .. }).then(|| t.relative_width());
    vec![Cell::text(kind), Cell::opt(v), Cell::opt(lo), Cell::opt(hi), Cell::opt(width)]
}

fn thresholds(a: &ThresholdArgs) -> Res<Artifact> {
    let sym: Symmetry = a.sym.into();
    positive("m-floor", a.m_floor)?;
    positive("m-ceiling", a.m_ceiling)?;
    positive("rel-tol", a.rel_tol)?;
    let mut records: Vec<ThresholdRecord> = Vec::new();
    let mellin = if a.method != ThresholdMethod::Scan {
        let opts = ThresholdOptions {
            m_floor: a.m_floor,
            m_ceiling: a.m_ceiling,
            rel_tol: a.rel_tol,
            ..ThresholdOptions::default()
        };
        let r = find_thresholds(a.l, sym, &opts)?;
        records.push(r.clone());
        Some(r)
    } else {
        None
    };
    if a.method != ThresholdMethod::Mellin {
        let window = match (a.scan_lo, a.scan_hi, &mellin) {
            (Some(lo), Some(hi), _) => (lo, hi),
            (lo, hi, Some(r)) => match (r.m_star.value(), r.m_doublestar.value()) {
                (Some(s), Some(d)) => (lo.unwrap_or(0.5 * s), hi.unwrap_or(2.0 * d)),
                _ => {
                    return Err(CliError::unsupported(format!(
                        "cutoff scan needs both Mellin thresholds bracketed, got m* {:?} and m** {:?}",
                        r.m_star, r.m_doublestar
                    )))
                }
            },
            _ => return Err(CliError::bad_args("--method scan needs --scan-lo and --scan-hi")),
        };
        positive("scan-lo", window.0)?;
        let opts = ScanOptions {
            density: a.scan_density,
            rel_tol: a.scan_rel_tol,
            ..ScanOptions::default()
        };
        let (star, dstar) = scan_thresholds(a.l, sym, window.0, window.1, &opts)?;
        records.push(ThresholdRecord {
            l: a.l,
            sym,
            m_star: star,
            m_doublestar: dstar,
            method: "cutoff_scan".into(),
        });
    }
    let mut table = Table::new(&[
        "l",
        "sym",
        "method",
        "m_star_kind",
        "m_star",
        "m_star_lo",
        "m_star_hi",
        "m_star_rel_width",
        "m_doublestar_kind",
        "m_doublestar",
        "m_doublestar_lo",
        "m_doublestar_hi",
        "m_doublestar_rel_width",
    ]);
    for r in &records {
        let mut row = vec![
            Cell::Int(r.l as i64),
            Cell::text(r.sym.as_str()),
            Cell::text(if r.method == "cutoff_scan" { "scan" } else { "mellin" }),
        ];
        row.extend(threshold_cells(&r.m_star));
        row.extend(threshold_cells(&r.m_doublestar));
        table.push(row);
    }
    let mut summary = json!({ "records": records.len() });
    if let Some(s) = records[0].m_star.value() {
        summary["inverse_m_star"] = json!(1.0 / s);
    }
    if records.len() == 2 {
        let rel = |x: Option<f64>, y: Option<f64>| x.zip(y).map(|(x, y)| (x - y).abs() / x);
        summary["m_star_rel_diff"] = json!(rel(records[0].m_star.value(), records[1].m_star.value()));
        summary["m_doublestar_rel_diff"] =
            json!(rel(records[0].m_doublestar.value(), records[1].m_doublestar.value()));
    }
    Ok(Artifact {
        table,
        json: to_value(&records),
        summary,
    })
}

fn spectrum(a: &SpectrumArgs) -> Res<Artifact> {
    let ch = channel(&a.channel)?;
    positive("pmin", a.pmin)?;
    positive("pmax", a.pmax)?;
    let grid = build_grid(a.pmin, a.pmax, a.n)?;
    let mat = discretize_channel(ch, &grid);
    let res = negative_spectrum(&mat)?;
    let mut table = Table::new(&["index", "eigenvalue", "negative", "ratio"]);
    for (k, &e) in res.eigenvalues.iter().enumerate() {
        let neg = k < res.n_negative;
        let ratio = (neg && k > 0).then(|| e / res.eigenvalues[k - 1]);
        table.push(vec![Cell::Int(k as i64), Cell::Float(e), Cell::Bool(neg), Cell::opt(ratio)]);
    }
    let summary = json!({
        "n": grid.n,
        "n_negative": res.n_negative,
        "ladder_ratio": res.ratio_estimate.map(|r| r.ratio),
        "ladder_ratio_uncertainty": res.ratio_estimate.map(|r| r.uncertainty),
        "energy_ratio": res.ratio_estimate.map(|r| r.ratio * r.ratio),
        "levels": res.ratio_estimate.map(|r| r.levels),
    });
    Ok(Artifact {
        table,
        json: to_value(&res),
        summary,
    })
}

fn efimov(a: &EfimovArgs) -> Res<Artifact> {
    let ch = channel(&a.channel)?;
    let r = classify_regime(ch)?;
    let s0 = (r.tag == Regime::LimitCircle).then_some(r.sigma_or_s0).flatten();
    let sigma = (r.tag == Regime::Deficiency).then_some(r.sigma_or_s0).flatten();
    let pi = std::f64::consts::PI;
    let ladder = s0.map(|s| (-pi / s).exp());
    let energy = s0.map(|s| (-2.0 * pi / s).exp());
    let mut table = Table::new(&["l", "sym", "m", "regime", "s0", "sigma", "ladder_ratio", "energy_ratio"]);
    table.push(vec![
        Cell::Int(ch.l as i64),
        Cell::text(ch.sym.as_str()),
        Cell::Float(ch.m.get()),
        Cell::text(r.tag.as_str()),
        Cell::opt(s0),
        Cell::opt(sigma),
        Cell::opt(ladder),
        Cell::opt(energy),
    ]);
    let v = json!({
        "l": ch.l, "sym": ch.sym, "m": ch.m.get(), "regime": r.tag,
        "s0": s0, "sigma": sigma, "ladder_ratio": ladder, "energy_ratio": energy,
    });
    Ok(Artifact {
        table,
        json: v.clone(),
        summary: v,
    })
}

fn check_cell(c: Option<bool>) -> Cell {
    match c {
        Some(true) => Cell::text("pass"),
        Some(false) => Cell::text("fail"),
        None => Cell::Empty,
    }
}

fn fourbody(a: &FourbodyArgs) -> Res<Artifact> {
    let manifest = load_manifest(&a.manifest)?;
    if manifest.members.len() < MIN_FAMILY {
        return Err(CliError::bad_args(format!(
            "manifest has {} members, the suite needs at least {MIN_FAMILY}",
            manifest.members.len()
        )));
    }
    if a.n < 2 {
        return Err(CliError::bad_args("--n must be at least 2"));
    }
    for m in &manifest.members {
        m.validate()?;
    }
    let reports: Vec<MemberReport> = manifest
        .members
        .par_iter()
        .enumerate()
        .map(|(i, phi)| evaluate_member(i, phi, a.n, a.seed))
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&[
        "member", "name", "parity", "form", "value", "std_error", "noise_dominated", "check", "pass",
    ]);
    for r in &reports {
        let parity = match r.parity {
            contact_core::fourbody::Parity::Symmetric => "symmetric",
            contact_core::fourbody::Parity::Antisymmetric => "antisymmetric",
        };
        let mut row = |form: &str, value: f64, err: f64, noisy: Option<bool>, check: &str, pass: Option<bool>| {
            table.push(vec![
                Cell::Int(r.index as i64),
                Cell::text(r.name.clone()),
                Cell::text(parity),
                Cell::text(form),
                Cell::Float(value),
                Cell::Float(err),
                noisy.map_or(Cell::Empty, Cell::Bool),
                if pass.is_some() { Cell::text(check) } else { Cell::Empty },
                check_cell(pass),
            ]);
        };
        row("C0", r.c0.value, r.c0.std_error, Some(r.c0.noise_dominated), "", None);
        row("C1", r.c1.value, r.c1.std_error, Some(r.c1.noise_dominated), "vanishes", r.pair_term_vanishes);
        row(
            "C2",
            r.c2.value,
            r.c2.std_error,
            Some(r.c2.noise_dominated),
            "exceeds_half_abs_c1 (reported)",
            r.triplet_dominates_half_pair,
        );
        let kp = r.kinetic_plus_half_pair;
        row("C0+C1/2", kp.value, kp.std_error, None, "nonnegative", r.kinetic_plus_half_pair_positive);
        row("C0+C1+C2", r.total.value, r.total.std_error, None, "nonnegative", Some(r.total_positive));
    }
    let failures: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.name.as_str()).collect();
    let summary = json!({
        "members": reports.len(),
        "n_samples": a.n,
        "sigma_level": SIGMA_LEVEL,
        "passed": failures.is_empty(),
        "failures": failures,
    });
    Ok(Artifact {
        table,
        json: json!({ "n_samples": a.n, "seed": a.seed, "members": to_value(&reports) }),
        summary,
    })
}

fn converge(a: &ConvergeArgs) -> Res<Artifact> {
    let corpus = load_potentials(&a.potential)?;
    for &e in &a.eps {
        positive("eps", e)?;
    }
    if !(a.lambda >= 0.0 && a.lambda.is_finite()) {
        return Err(CliError::bad_args("--lambda must be non-negative"));
    }
    let grid = BsGrid {
        panels: a.panels,
        order: a.order,
    };
    let exponent = a.exponent.0;
    let mut jobs = Vec::new();
    for (pi, p) in corpus.iter().enumerate() {
        let base = p.potential()?;
        for &e in &a.eps {
            jobs.push((pi, base, e));
        }
    }
    let base_mu: Vec<f64> = corpus
        .par_iter()
        .map(|p| Ok(bs_top_eigenvalue(&p.potential()?, a.lambda, &grid)?))
        .collect::<Res<_>>()?;
    let rows: Vec<(usize, f64, f64, f64, bool)> = jobs
        .par_iter()
        .map(|&(pi, base, e)| {
            let v = scale_potential(base, e, exponent)?;
            let mu = bs_top_eigenvalue(&v, a.lambda, &grid)?;
            let sc = scattering_length(&v, &ScatteringOptions::default())?;
            Ok((pi, e, mu, sc.a, sc.resonant))
        })
        .collect::<Res<_>>()?;
    let mut table = Table::new(&[
        "potential", "eps", "lambda", "mu_top", "ratio", "expected_ratio", "a", "resonant",
    ]);
    let mut worst = 0.0f64;
    let mut out = Vec::new();
    for &(pi, e, mu, sa, res) in &rows {
        let ratio = mu / base_mu[pi];
        let expected = (a.lambda == 0.0).then(|| e.powf(2.0 - exponent.power()));
        if let Some(x) = expected {
            worst = worst.max((ratio / x - 1.0).abs());
        }
        table.push(vec![
            Cell::text(corpus[pi].name.clone()),
            Cell::Float(e),
            Cell::Float(a.lambda),
            Cell::Float(mu),
            Cell::Float(ratio),
            Cell::opt(expected),
            Cell::Float(sa),
            Cell::Bool(res),
        ]);
        out.push(json!({
            "potential": corpus[pi].name, "eps": e, "lambda": a.lambda, "mu_top": mu,
            "ratio": ratio, "expected_ratio": expected, "a": sa, "resonant": res,
        }));
    }
    Ok(Artifact {
        table,
        json: Value::Array(out),
        summary: json!({ "rows": rows.len(), "max_dilation_rel_error": (a.lambda == 0.0).then_some(worst) }),
    })
}

fn scatter(a: &ScatterArgs) -> Res<Artifact> {
    let corpus = load_potentials(&a.potential)?;
    let opts = ScatteringOptions {
        steps: a.steps,
        ..ScatteringOptions::default()
    };
    let rows: Vec<Value> = corpus
        .par_iter()
        .map(|p| {
            let v = p.potential()?;
            let r = scattering_length(&v, &opts)?;
            let tuned = if a.tune { Some(tune_to_resonance(&v, a.g_max, 1e-12)?) } else { None };
            Ok(json!({
                "potential": p.name, "coupling": v.coupling, "a": r.a, "resonant": r.resonant,
                "step_change": r.step_change,
                "g_star": tuned.map(|b| b.value), "g_lo": tuned.map(|b| b.lo), "g_hi": tuned.map(|b| b.hi),
            }))
        })
        .collect::<Res<_>>()?;
    let mut table = Table::new(&["potential", "coupling", "a", "resonant", "step_change", "g_star", "g_lo", "g_hi"]);
    let f = |v: &Value, k: &str| Cell::opt(v[k].as_f64());
    for r in &rows {
        table.push(vec![
            Cell::text(r["potential"].as_str().unwrap_or_default()),
            f(r, "coupling"),
            // a may be infinite at an exact resonance, which JSON cannot hold
            r["a"].as_f64().map_or(Cell::Float(f64::INFINITY), Cell::Float),
            Cell::Bool(r["resonant"].as_bool().unwrap_or(false)),
            f(r, "step_change"),
            f(r, "g_star"),
            f(r, "g_lo"),
            f(r, "g_hi"),
        ]);
    }
    Ok(Artifact {
        table,
        json: Value::Array(rows.clone()),
        summary: json!({ "potentials": rows.len() }),
    })
}

fn assemble(a: &AssembleArgs) -> Res<Artifact> {
    let g = load_graph(&a.graph)?;
    let report = validate_graph(&g);
    if !report.is_valid() {
        return Err(CliError::bad_args(format!("invalid graph: {}", report.violations.join("; "))));
    }
    let p: SpectrumPrediction = predict_spectrum(&g, &mut MellinOracle::default())?;
    let mut table = Table::new(&[
        "kind", "particles", "symmetry", "mass_ratio", "regime", "l", "s0", "energy_ratio", "verdict",
    ]);
    for v in &p.v_components {
        let c = v.component;
        table.push(vec![
            Cell::text("V"),
            Cell::text(format!("{}:{}+{}", c.center, c.legs[0], c.legs[1])),
            v.symmetry.map_or(Cell::Empty, |s| Cell::text(s.as_str())),
            Cell::opt(v.mass_ratio),
            v.regime.map_or(Cell::Empty, |r| Cell::text(r.as_str())),
            v.l.map_or(Cell::Empty, |l| Cell::Int(l as i64)),
            Cell::opt(v.s0),
            Cell::opt(v.energy_ratio),
            Cell::text(v.verdict.as_str()),
        ]);
    }
    for h in &p.h_components {
        let c = h.component;
        table.push(vec![
            Cell::text("H"),
            Cell::text(format!("{}-{}|{}-{}", c.pair1[0], c.pair1[1], c.pair2[0], c.pair2[1])),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::text(h.verdict.as_str()),
        ]);
    }
    table.push(vec![
        Cell::text("total"),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::text(p.verdict.as_str()),
    ]);
    let summary = json!({
        "verdict": p.verdict.as_str(),
        "v_components": p.v_components.len(),
        "h_components": p.h_components.len(),
    });
    Ok(Artifact {
        table,
        json: to_value(&p),
        summary,
    })
}

fn salpeter(a: &SalpeterArgs) -> Res<Artifact> {
    if a.fit_points < 3 {
        return Err(CliError::bad_args("--fit-points must be at least 3"));
    }
    let rows: Vec<Value> = a
        .alpha
        .par_iter()
        .map(|&alpha| {
            let s = bound_state(alpha)?;
            let fit = log_boundary_check(&s, a.fit_points)?;
            let count = count_bound_states(alpha)?;
            Ok(json!({
                "alpha": alpha, "energy": s.energy, "c": fit.c, "d": fit.d, "residual": fit.residual,
                "solver_spread": s.solver_spread, "bound_states": count,
            }))
        })
        .collect::<Res<_>>()?;
    let mut table = Table::new(&["alpha", "energy", "c", "d", "residual", "solver_spread", "bound_states"]);
    for r in &rows {
        let f = |k: &str| Cell::opt(r[k].as_f64());
        table.push(vec![
            f("alpha"),
            f("energy"),
            f("c"),
            f("d"),
            f("residual"),
            f("solver_spread"),
            Cell::Int(r["bound_states"].as_i64().unwrap_or(0)),
        ]);
    }
    Ok(Artifact {
        table,
        json: Value::Array(rows.clone()),
        summary: json!({ "states": rows.len() }),
    })
}
