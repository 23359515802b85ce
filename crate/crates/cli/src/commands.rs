use std::fmt::Write as _;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use selfsim::cellmodel::{
    check_bounded_geometry, check_symmetry, phi_s_step, Axiom, CellAddress, CellError, CellSpec, SelfSimilarGraph, VertexRef,
};
use selfsim::dynamics::{
    backward_orbit, classify_julia, exceptional_set, julia_from_tree, spectrum_from_trees, DynamicsConfig, OrbitTree,
    SpectrumReport,
};
use selfsim::green::{
    check_functional_equation_numeric, evaluate_green, shell_conductance_check, singularity_probe, GreenOptions, GreenQuery,
};
use selfsim::oracle::{functional_equation_series_check, sample_f_vertices, verify_decimation_identities};
use selfsim::ratfun::{ComplexPoint, Precision, RationalFunction};
use selfsim::transfer::{check_fixed_points, compute_transfer_with, TransferSet};

use crate::args::{caps, Cli, Command, DynamicsArgs, GreenArgs, OracleArgs, OrbitMode, ProbeArgs};
use crate::output::{check_cap, load_spec, CliError, CsvRow, LoadedSpec, Output, Provenance};

pub fn run(cli: &Cli) -> Result<i32, CliError> {
    check_cap("precision", cli.precision, caps::PRECISION_BITS)?;
    let precision = Precision::from_bits(cli.precision);
    let (name, spec_arg, parameters) = match &cli.command {
        Command::Validate(a) => ("validate", &a.spec, serde_json::to_value(a)?),
        Command::Functions(a) => ("functions", &a.spec, serde_json::to_value(a)?),
        Command::Oracle(a) => ("oracle", &a.spec.spec, serde_json::to_value(a)?),
        Command::Dynamics(a) => ("dynamics", &a.spec.spec, serde_json::to_value(a)?),
        Command::Spectrum(a) => ("spectrum", &a.spec.spec, serde_json::to_value(a)?),
        Command::Green(a) => ("green", &a.spec.spec, serde_json::to_value(a)?),
        Command::Probe(a) => ("probe", &a.spec.spec, serde_json::to_value(a)?),
    };
    let loaded = load_spec(spec_arg)?;
    let out = Output {
        dir: cli.out.clone(),
        json: cli.json,
        provenance: Provenance {
            tool: "selfsim",
            version: env!("CARGO_PKG_VERSION"),
            command: name,
            spec: loaded.source.clone(),
            spec_sha256: loaded.sha256.clone(),
            seed: cli.seed,
            precision_bits: precision.bits(),
            parameters,
        },
    };
    match &cli.command {
        Command::Validate(_) => validate(&loaded, &out),
        Command::Functions(_) => functions(&loaded, precision, &out),
        Command::Oracle(a) => oracle(&loaded, a, precision, cli.seed, &out),
        Command::Dynamics(a) => dynamics(&loaded, a, precision, &out),
        Command::Spectrum(a) => spectrum(&loaded, a, precision, &out),
        Command::Green(a) => green(&loaded, a, precision, &out),
        Command::Probe(a) => probe(&loaded, a, precision, &out),
    }
}

fn stem(cmd: &str, spec: &CellSpec) -> String {
    format!("{cmd}-{}", spec.name())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Serialize)]
struct Check {
    check: String,
    status: Status,
    detail: String,
}

#[derive(Debug, Serialize)]
struct ValidateReport {
    passed: bool,
    checks: Vec<Check>,
}

const AXIOMS: [(Axiom, &str); 7] = [
    (Axiom::Format, "format"),
    (Axiom::F1, "(F1) boundary vertices pairwise non-adjacent"),
    (Axiom::F2, "(F2) cliques share at most one vertex"),
    (Axiom::S1, "(S1) union of complete graphs on theta vertices"),
    (Axiom::Connectivity, "connectivity"),
    (Axiom::Substitution, "substitution maps"),
    (Axiom::Origin, "origin data"),
];

fn structural_checks(spec: &CellSpec) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let sym = check_symmetry(spec)?;
    let yes_no = |b: bool| if b { Status::Pass } else { Status::Fail };
    checks.push(Check {
        check: "(S2) automorphisms act transitively on the boundary".into(),
        status: yes_no(sym.simply_symmetric),
        detail: format!("{} witnesses", sym.witnesses.len()),
    });
    checks.push(Check {
        check: "(S3) automorphisms act doubly transitively on the boundary".into(),
        status: yes_no(sym.doubly_symmetric),
        detail: String::new(),
    });
    let geo = check_bounded_geometry(spec);
    let detail = geo.interior_neighbours.iter().map(|(v, k)| format!("{v}: {k}")).collect::<Vec<_>>().join(", ");
    checks.push(Check {
        check: format!("bounded geometry (theta - 1 = {} interior neighbours per boundary vertex)", geo.required),
        status: yes_no(geo.bounded),
        detail,
    });
    let mut contraction = true;
    for len in 1..=3 {
        let target = CellAddress::origin(spec, len);
        for a in CellAddress::all(spec.mu(), len) {
            let mut cur = a;
            for _ in 0..len {
                cur = phi_s_step(&cur, spec)?;
            }
            contraction &= cur == target;
        }
    }
    checks.push(Check {
        check: "contraction onto the origin cell".into(),
        status: yes_no(contraction),
        detail: "all addresses of length <= 3".into(),
    });
    Ok(checks)
}

fn validate(loaded: &LoadedSpec, out: &Output) -> Result<i32, CliError> {
    let mut checks = Vec::new();
    let parsed = loaded.parse();
    let spec_name;
    match &parsed {
        Ok(spec) => {
            spec_name = spec.name().to_string();
            for (_, label) in AXIOMS {
                checks.push(Check { check: label.into(), status: Status::Pass, detail: String::new() });
            }
            checks.extend(structural_checks(spec)?);
        }
        Err(CliError::Core(selfsim::Error::Cell(CellError::Invalid(violations)))) => {
            spec_name = "unnamed".into();
            let malformed = violations.iter().any(|v| v.axiom == Axiom::Format);
            for (axiom, label) in AXIOMS {
                let msgs: Vec<&str> = violations.iter().filter(|v| v.axiom == axiom).map(|v| v.message.as_str()).collect();
                let status = if !msgs.is_empty() {
                    Status::Fail
                } else if malformed && axiom != Axiom::Format {
                    Status::Skipped
                } else {
                    Status::Pass
                };
                checks.push(Check { check: label.into(), status, detail: msgs.join("; ") });
            }
        }
        Err(CliError::Core(selfsim::Error::Cell(CellError::Syntax(msg)))) => {
            spec_name = "unnamed".into();
            checks.push(Check { check: "format".into(), status: Status::Fail, detail: msg.clone() });
        }
        Err(_) => return parsed.map(|_| 0),
    }
    let passed = checks.iter().all(|c| c.status == Status::Pass);
    let mut text = String::new();
    for c in &checks {
        let tag = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skip",
        };
        let _ = write!(text, "{tag:<5} {}", c.check);
        if !c.detail.is_empty() {
            let _ = write!(text, ": {}", c.detail);
        }
        text.push('\n');
    }
    let _ = writeln!(text, "result: {}", if passed { "pass" } else { "FAIL" });
    out.report(&format!("validate-{spec_name}"), &text, &ValidateReport { passed, checks })?;
    Ok(if passed { 0 } else { 1 })
}

fn int_json(c: &BigInt) -> Value {
    i64::try_from(c).map(Value::from).unwrap_or_else(|_| Value::String(c.to_string()))
}

fn ratfun_json(r: &RationalFunction) -> Value {
    let (n, d) = r.integer_form();
    json!({
        "text": r.to_string(),
        "numerator": n.iter().map(int_json).collect::<Vec<_>>(),
        "denominator": d.iter().map(int_json).collect::<Vec<_>>(),
    })
}

fn ratfun_text(label: &str, r: &RationalFunction) -> String {
    let (n, d) = r.integer_form();
    let list = |v: &[BigInt]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
    format!("{label} = {r}\n    numerator   [{}]\n    denominator [{}]\n", list(&n), list(&d))
}

fn points_text(pts: &[ComplexPoint]) -> String {
    if pts.is_empty() {
        "(none)".into()
    } else {
        pts.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
    }
}

fn transfer(loaded: &LoadedSpec, precision: Precision) -> Result<(CellSpec, TransferSet), CliError> {
    let spec = loaded.parse()?;
    let t = compute_transfer_with(&spec, precision)?;
    Ok((spec, t))
}

fn functions(loaded: &LoadedSpec, precision: Precision, out: &Output) -> Result<i32, CliError> {
    let (spec, t) = transfer(loaded, precision)?;
    let name = |v: usize| spec.vertex_name(v).to_string();
    let fp = check_fixed_points(&t);
    let mut text = String::new();
    text.push_str(&ratfun_text("d", &t.d));
    text.push_str(&ratfun_text("f", &t.f));
    let mut h = Vec::new();
    for (&(x, y), r) in &t.h {
        text.push_str(&ratfun_text(&format!("h({}, {})", name(x), name(y)), r));
        h.push(json!({ "x": name(x), "y": name(y), "h": ratfun_json(r) }));
    }
    let mut h_tilde = Vec::new();
    for (&(w, y), r) in &t.h_tilde {
        text.push_str(&ratfun_text(&format!("h~({}, {})", name(w), name(y)), r));
        h_tilde.push(json!({ "w": name(w), "y": name(y), "h_tilde": ratfun_json(r) }));
    }
    let _ = writeln!(text, "poles(f)    {}", points_text(&t.poles_f));
    let _ = writeln!(text, "poles(cell) {}", points_text(&t.poles_cell));
    let _ = writeln!(text, "zeroes(f)   {}", points_text(&t.zeroes_f));
    let _ = writeln!(
        text,
        "d(0) = 0 with order {} (boundary diameter {}), d(1) = {}, d'(1) = {}",
        fp.order_at_zero,
        fp.diam_boundary,
        fp.d_at_one.as_deref().unwrap_or("pole"),
        fp.d_prime_at_one.as_deref().unwrap_or("pole"),
    );
    let value = json!({
        "d": ratfun_json(&t.d),
        "f": ratfun_json(&t.f),
        "h": h,
        "h_tilde": h_tilde,
        "poles_f": t.poles_f,
        "poles_cell": t.poles_cell,
        "zeroes_f": t.zeroes_f,
        "fixed_points": fp,
    });
    out.report(&stem("functions", &spec), &text, &value)?;
    Ok(0)
}

#[derive(Debug, Serialize)]
struct NumericSample {
    v: String,
    w: String,
    z: ComplexPoint,
    residual: f64,
    bound: f64,
    within_bound: bool,
}

fn oracle(loaded: &LoadedSpec, a: &OracleArgs, precision: Precision, seed: u64, out: &Output) -> Result<i32, CliError> {
    check_cap("level", a.level, caps::ORACLE_LEVEL)?;
    let spec = loaded.parse()?;
    let decimation = verify_decimation_identities(&spec, a.level)?;
    let series = functional_equation_series_check(&spec, a.order)?;
    let mut text = String::new();
    let _ = writeln!(text, "n-cell identities, n = 1..={}", a.level);
    let ok = |b: bool| if b { "ok" } else { "FAIL" };
    for l in &decimation.levels {
        let _ = writeln!(
            text,
            "  n = {}: {} vertices, transition {}, return product {}, inner {}",
            l.n,
            l.vertices,
            ok(l.transition),
            ok(l.return_product),
            ok(l.inner)
        );
        if let Some(m) = &l.mismatch {
            let _ = writeln!(text, "    first mismatch: {m}");
        }
    }
    if let Some(s) = &decimation.stopped {
        let _ = writeln!(text, "  stopped: {s}");
    }
    let _ = writeln!(
        text,
        "functional equation series to order {}: {} pairs, {} mismatches",
        a.order,
        series.pairs,
        series.mismatches.len()
    );
    if let Some(m) = series.mismatches.first() {
        let _ = writeln!(
            text,
            "  first mismatch: G({}, {}) coefficient {}: direct {} vs decomposed {}",
            m.v, m.w, m.coefficient, m.direct, m.decomposed
        );
    }

    let mut samples = Vec::new();
    if a.samples > 0 {
        let g = SelfSimilarGraph::new(&spec);
        let t = compute_transfer_with(&spec, precision)?;
        let verts = sample_f_vertices(&g, 2 * spec.diam_boundary())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..a.samples {
            let v = &verts[rng.random_range(0..verts.len())];
            let w = &verts[rng.random_range(0..verts.len())];
            let r = 0.9 * rng.random::<f64>().sqrt();
            let arg = std::f64::consts::TAU * rng.random::<f64>();
            let z = ComplexPoint::new(r * arg.cos(), r * arg.sin());
            let (vr, wr) = (VertexRef::from_key(&g, v), VertexRef::from_key(&g, w));
            let res = check_functional_equation_numeric(&g, &t, &vr, &wr, z, &GreenOptions::default())?;
            samples.push(NumericSample {
                v: vr.to_string(),
                w: wr.to_string(),
                z,
                residual: res.residual,
                bound: res.bound,
                within_bound: res.within_bound(),
            });
        }
        let bad = samples.iter().filter(|s| !s.within_bound).count();
        let _ = writeln!(text, "numeric functional equation at {} seeded points: {} outside the bound", samples.len(), bad);
        for s in samples.iter().filter(|s| !s.within_bound).take(1) {
            let _ = writeln!(text, "  first failure: G({}, {}) at {}: residual {:e} > bound {:e}", s.v, s.w, s.z, s.residual, s.bound);
        }
    }
    let passed = decimation.passed() && series.passed() && samples.iter().all(|s| s.within_bound);
    let _ = writeln!(text, "result: {}", if passed { "pass" } else { "FAIL" });
    let value = json!({
        "passed": passed,
        "decimation": decimation,
        "series": series,
        "numeric": samples,
    });
    out.report(&stem("oracle", &spec), &text, &value)?;
    Ok(if passed { 0 } else { 2 })
}

fn dynamics_config(a: &DynamicsArgs) -> Result<DynamicsConfig, CliError> {
    check_cap("depth", a.depth, caps::DYNAMICS_DEPTH)?;
    check_cap("budget", a.budget, caps::BUDGET)?;
    if !(a.dedup_radius > 0.0 && a.dedup_radius < 1e-3) {
        return Err(CliError::Invalid(format!("dedup radius {} must lie in (0, 1e-3)", a.dedup_radius)));
    }
    Ok(DynamicsConfig { dedup_radius: a.dedup_radius, budget: a.budget, ..DynamicsConfig::default() })
}

#[derive(Debug, Serialize)]
struct TreeSummary {
    seeds: Vec<ComplexPoint>,
    reached_depth: usize,
    points: usize,
    non_real: usize,
    candidates: usize,
    truncated: bool,
    max_residual: f64,
    residual_failures: usize,
}

impl TreeSummary {
    fn of(t: &OrbitTree) -> Self {
        Self {
            seeds: t.seeds.clone(),
            reached_depth: t.reached_depth,
            points: t.points.len(),
            non_real: t.non_real.len(),
            candidates: t.candidates,
            truncated: t.truncated,
            max_residual: t.max_residual,
            residual_failures: t.residual_failures,
        }
    }

    fn text(&self, label: &str) -> String {
        format!(
            "{label}: seeds {}, depth {}, {} real points ({} preimages before dedup), {} non-real, truncated {}, max residual {:e}, residual failures {}\n",
            points_text(&self.seeds),
            self.reached_depth,
            self.points,
            self.candidates,
            self.non_real,
            self.truncated,
            self.max_residual,
            self.residual_failures
        )
    }
}

fn tree_rows(t: &OrbitTree, kind: &'static str, rows: &mut Vec<CsvRow>) {
    for p in t.points.iter().chain(&t.non_real) {
        rows.push(CsvRow { z: p.z, depth: p.depth, kind });
    }
}

fn dynamics(loaded: &LoadedSpec, a: &DynamicsArgs, precision: Precision, out: &Output) -> Result<i32, CliError> {
    let config = dynamics_config(a)?;
    let (spec, t) = transfer(loaded, precision)?;
    check_fixed_points(&t).require()?;
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut value = json!({ "parameters": config });
    if a.mode != OrbitMode::Exceptional {
        let tree = backward_orbit(&t.d, &[ComplexPoint::real(1.0)], a.depth, &config)?;
        let j = julia_from_tree(&tree, &config);
        let class = classify_julia(&j, config.min_classify_depth);
        let summary = TreeSummary::of(&tree);
        text.push_str(&summary.text("julia"));
        let _ = writeln!(
            text,
            "  largest gap {:.6} (circle coordinate), largest gap on the window {:.6}, gaps above {}: {}",
            j.stats.hull_gap, j.stats.window_gap, config.gap_resolution, j.stats.gaps_above_resolution
        );
        let _ = writeln!(text, "  classification: {} (heuristic): {}", class.verdict, class.evidence);
        value["julia"] = json!({ "tree": summary, "stats": j.stats, "history": j.history, "classification": class });
        tree_rows(&tree, "julia", &mut rows);
    }
    if a.mode != OrbitMode::Julia {
        let tree = exceptional_set(&t, a.depth, &config)?;
        let summary = TreeSummary::of(&tree);
        text.push_str(&summary.text("exceptional"));
        value["exceptional"] = json!({ "tree": summary });
        tree_rows(&tree, "exceptional", &mut rows);
    }
    let name = stem("dynamics", &spec);
    if out.dir.is_some() {
        out.csv(&name, &rows)?;
        out.report(&name, &text, &value)?;
    } else {
        // stdout carries the points; the summary goes to stderr
        out.csv(&name, &rows)?;
        eprint!("{text}");
    }
    Ok(0)
}

fn range_text(xs: &[f64]) -> String {
    match (xs.first(), xs.last()) {
        (Some(a), Some(b)) => format!("[{a}, {b}]"),
        _ => "(empty)".into(),
    }
}

/// Largest negative and smallest positive finite point: the set avoids the open interval between them.
fn avoided_interval(pts: &[ComplexPoint]) -> Option<(f64, f64)> {
    let re: Vec<f64> = pts.iter().filter_map(ComplexPoint::finite).map(|c| c.re).collect();
    let lo = re.iter().copied().filter(|&x| x < 0.0).fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    let hi = re.iter().copied().filter(|&x| x > 0.0).fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.min(x))));
    lo.zip(hi)
}

fn spectrum_text(r: &SpectrumReport) -> String {
    let mut text = String::new();
    let inner: Vec<ComplexPoint> = r
        .inner
        .points
        .iter()
        .map(|&x| ComplexPoint::real(x))
        .chain(r.inner.has_infinity.then_some(ComplexPoint::Infinity))
        .collect();
    let outer = r.outer_points();
    let _ = writeln!(text, "depth {}", r.depth);
    for (label, pts, stats) in [("inner", &inner, &r.inner.stats), ("outer", &outer, &r.outer_stats)] {
        let avoid = avoided_interval(pts)
            .map(|(a, b)| format!("points lie in the extended real line minus ({a}, {b})"))
            .unwrap_or_else(|| "points do not straddle 0".into());
        let _ = writeln!(
            text,
            "{label} bound: {} points{}; {avoid}; largest gap {:.6} (circle coordinate), {:.6} on the window",
            pts.len(),
            if pts.iter().any(ComplexPoint::is_infinite) { " including inf" } else { "" },
            stats.hull_gap,
            stats.window_gap
        );
    }
    let _ = writeln!(text, "Laplacian form (1 - 1/z): inner {}, outer {}", range_text(&r.laplacian_inner()), range_text(&r.laplacian_outer()));
    let _ = writeln!(text, "classification: {} (heuristic): {}", r.classification.verdict, r.classification.evidence);
    if !r.inner.non_real.is_empty() || !r.exceptional_non_real.is_empty() {
        let _ = writeln!(text, "non-real points: {} inner, {} exceptional", r.inner.non_real.len(), r.exceptional_non_real.len());
    }
    if r.inner.truncated || r.exceptional_truncated {
        let _ = writeln!(text, "budget reached: the bounds are truncated");
    }
    if let Some(n) = &r.note {
        let _ = writeln!(text, "note: {n}");
    }
    text
}

fn spectrum(loaded: &LoadedSpec, a: &DynamicsArgs, precision: Precision, out: &Output) -> Result<i32, CliError> {
    let config = dynamics_config(a)?;
    let (spec, t) = transfer(loaded, precision)?;
    check_fixed_points(&t).require()?;
    let j_tree = backward_orbit(&t.d, &[ComplexPoint::real(1.0)], a.depth, &config)?;
    let d_tree = exceptional_set(&t, a.depth, &config)?;
    let report = spectrum_from_trees(&j_tree, &d_tree, a.depth, &config);
    let name = stem("spectrum", &spec);
    let value = json!({
        "depth": report.depth,
        "inner": { "points": report.inner.points.len(), "has_infinity": report.inner.has_infinity, "stats": report.inner.stats, "history": report.inner.history },
        "outer": { "extra_points": report.outer_extra.len(), "stats": report.outer_stats },
        "laplacian_inner_range": [report.laplacian_inner().first(), report.laplacian_inner().last()],
        "laplacian_outer_range": [report.laplacian_outer().first(), report.laplacian_outer().last()],
        "classification": report.classification,
        "non_real": { "inner": report.inner.non_real, "exceptional": report.exceptional_non_real },
        "truncated": report.inner.truncated || report.exceptional_truncated,
        "note": report.note,
        "parameters": report.parameters,
    });
    out.report(&name, &spectrum_text(&report), &value)?;
    if out.dir.is_some() {
        let mut rows = Vec::new();
        tree_rows(&j_tree, "julia", &mut rows);
        for p in d_tree.points.iter().chain(&d_tree.non_real) {
            if d_tree.non_real.contains(p) || report.outer_extra.contains(&p.z) {
                rows.push(CsvRow { z: p.z, depth: p.depth, kind: "exceptional" });
            }
        }
        out.csv(&name, &rows)?;
    }
    Ok(0)
}

fn parse_vertex(s: &str) -> Result<VertexRef, CliError> {
    Ok(s.parse::<VertexRef>()?)
}

fn green(loaded: &LoadedSpec, a: &GreenArgs, precision: Precision, out: &Output) -> Result<i32, CliError> {
    check_cap("series cap", a.series_cap, caps::SERIES_CAP)?;
    check_cap("max iterations", a.max_iter, caps::MAX_ITER)?;
    let z: ComplexPoint = a.z.parse().map_err(|e| CliError::Invalid(format!("{e}")))?;
    let (x, y) = (parse_vertex(&a.x)?, parse_vertex(&a.y)?);
    let (spec, t) = transfer(loaded, precision)?;
    let g = SelfSimilarGraph::new(&spec);
    let q = GreenQuery {
        x: x.clone(),
        y: y.clone(),
        z,
        target_accuracy: a.acc,
        base_radius: a.base_radius,
        series_cap: a.series_cap,
        max_iter: a.max_iter,
    };
    let v = evaluate_green(&g, &t, &q)?;
    let text = format!(
        "G({x}, {y} | {z}) = {}\nerror bound {:e}\ncontinuation depth n = {}\nseries terms {}, base pairs {}\n",
        ComplexPoint::Finite(v.value),
        v.error_bound,
        v.depth,
        v.terms,
        v.pairs
    );
    out.report(&stem("green", &spec), &text, &v)?;
    Ok(0)
}

fn probe(loaded: &LoadedSpec, a: &ProbeArgs, precision: Precision, out: &Output) -> Result<i32, CliError> {
    check_cap("k", a.k_max, caps::PROBE_K)?;
    check_cap("shells", a.shells, caps::SHELLS)?;
    if a.k_max < 2 {
        return Err(CliError::Invalid("k must be at least 2".into()));
    }
    let (x, y) = (parse_vertex(&a.x)?, parse_vertex(&a.y)?);
    let (spec, t) = transfer(loaded, precision)?;
    let g = SelfSimilarGraph::new(&spec);
    let sing = singularity_probe(&g, &t, &x, &y, a.k_max)?;
    let shells = shell_conductance_check(&g, a.shells)?;
    let mut text = String::new();
    let _ = writeln!(text, "G({x}, {y} | r) for r = 1 - 2^-k");
    for s in &sing.samples {
        let _ = writeln!(text, "  k = {:>2}  r = {:<22} G = {:<22} (error bound {:e})", s.k, s.r, s.value, s.error_bound);
    }
    let _ = writeln!(text, "monotone {}, diverging {}", sing.monotone, sing.diverging);
    let _ = writeln!(text, "fitted growth exponent {:.4} (log G against log(1 - r))", sing.growth_exponent);
    let _ = writeln!(text, "pole-like (integer exponent) {}", sing.pole_like);
    let _ = writeln!(text, "first-passage F({x}, {y} | r) at the last sample {:.8}", sing.first_passage);
    let _ = writeln!(
        text,
        "shell conductances a_1..a_{}: {:?} (bound {}, bounded {})",
        a.shells, shells.a, shells.bound, shells.bounded
    );
    let value = json!({ "singularity": sing, "shells": shells });
    out.report(&stem("probe", &spec), &text, &value)?;
    Ok(0)
}
