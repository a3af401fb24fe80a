use std::f64::consts::TAU;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use rough_bernoulli::bernoulli::{
    compare_to_effective, solve_free_boundary, BernoulliParams, EffectiveComparison, UpdateRule,
};
use rough_bernoulli::cell::{
    compute_b0, decay_check, solve_cell, trace_mean, CellOptions, DEFAULT_M_TRUNC,
};
use rough_bernoulli::geometry::{
    point_segment_distance, AnnulusBounds, CurveDistances, RoughnessProfile, StarCurve,
};
use rough_bernoulli::io::{
    fmt, parse_curve, parse_profile, write_csv, write_curve_csv, write_header, write_polyline_csv,
};
use rough_bernoulli::radial::{solve_radius, RadialSolution};

use crate::settings::Settings;
use crate::Failure;

type Header = Vec<(String, String)>;

const CELL_NS: usize = 513;
const CELL_NTHETA: usize = 512;

fn lambda_half() -> f64 {
    2.0 * (-0.5f64).exp()
}

fn lambda_eighth() -> f64 {
    8.0 * (-0.125f64).exp()
}

fn shape(s: &Settings) -> Result<(RoughnessProfile<f64>, String), Failure> {
    let name = s.raw("shape").unwrap_or("h1").to_string();
    let p = match name.as_str() {
        "h1" => RoughnessProfile::h1(),
        "h2" => RoughnessProfile::h2(),
        "zero" => RoughnessProfile::zero(),
        other => match other.strip_prefix("file:") {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read profile {path}: {e}")))?;
                parse_profile(&text)?
            }
            None => {
                return Err(Failure::Usage(format!(
                    "unknown shape `{other}` (expected h1, h2, zero or file:PATH)"
                )))
            }
        },
    };
    Ok((p, name))
}

fn out_dir(s: &Settings) -> Result<PathBuf, Failure> {
    let dir = PathBuf::from(s.raw("out").unwrap_or("out"));
    fs::create_dir_all(&dir)
        .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn provenance(command: &str, entries: &[(&str, String)]) -> Header {
    let mut h = vec![
        (
            "program".to_string(),
            format!("rough-bernoulli {}", env!("CARGO_PKG_VERSION")),
        ),
        ("command".to_string(), command.to_string()),
    ];
    h.extend(entries.iter().map(|(k, v)| (k.to_string(), v.clone())));
    h
}

fn eps_value(text: &str) -> Result<f64, Failure> {
    text.parse()
        .map_err(|e| Failure::Usage(format!("invalid eps `{text}`: {e}")))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest angular node count step compatible with every eps in the list.
fn grid_unit(p: &RoughnessProfile<f64>, eps: &[f64]) -> Result<usize, Failure> {
    let mut unit = 1;
    for &e in eps {
        let k = rough_bernoulli::geometry::reciprocal_integer(e)?;
        unit = unit / gcd(unit, k) * k;
    }
    if p.has_kink_at_pi() {
        // even node count per period
        unit *= 2;
    }
    Ok(unit)
}

/// Boundary-fitted mesh with arc and radial spacing close to `dx`.
fn mesh_for_spacing(dx: f64, unit: usize, gap: f64) -> (usize, usize) {
    let ntheta = ((TAU / dx / unit as f64).round() as usize).max(1) * unit;
    let nr = ((gap / dx).round() as usize).max(8) + 1;
    (nr, ntheta.max(8))
}

fn b0_for(s: &Settings, p: &RoughnessProfile<f64>, lambda: f64) -> Result<(f64, String), Failure> {
    if let Some(b0) = s.get_opt::<f64>("b0")? {
        return Ok((b0, "given".into()));
    }
    let m = s.get("mtrunc", DEFAULT_M_TRUNC)?;
    let c = solve_cell(
        p,
        &CellOptions {
            m_trunc: m,
            n_s: CELL_NS,
            n_theta: CELL_NTHETA,
            ..CellOptions::default()
        },
    )?;
    let rho0 = solve_radius(lambda, 1.0)?;
    let w = compute_b0(lambda, rho0, trace_mean(&c))?;
    Ok((
        w.b0,
        format!("cell problem, mtrunc {m}, {CELL_NS}x{CELL_NTHETA}"),
    ))
}

fn update_rule(s: &Settings) -> Result<UpdateRule, Failure> {
    match s.raw("update").unwrap_or("preconditioned") {
        "preconditioned" => Ok(UpdateRule::Preconditioned),
        "plain" => Ok(UpdateRule::Plain),
        other => Err(Failure::Usage(format!(
            "unknown update rule `{other}` (expected preconditioned or plain)"
        ))),
    }
}

struct SolveSetup {
    params: BernoulliParams<f64>,
    b0: f64,
    b0_source: String,
    label: String,
}

fn solve_setup(s: &Settings, default_lambda: f64, eps_list: &[f64]) -> Result<SolveSetup, Failure> {
    let (p, label) = shape(s)?;
    let lambda = s.get("lambda", default_lambda)?;
    let eps = eps_list[0];
    let gap = solve_radius(lambda, 1.0)? - 1.0;
    let (nr_d, nt_d) = mesh_for_spacing(3e-3, grid_unit(&p, eps_list)?, gap);
    let nr = s.get("nr", nr_d.min(129))?;
    let ntheta = s.get("ntheta", nt_d)?;
    let (b0, b0_source) = b0_for(s, &p, lambda)?;
    let mut params = BernoulliParams::new(lambda, p, eps, nr, ntheta).with_b0(b0);
    params.tau = s.get("tau", 1.0)?;
    params.tol = s.get("tol", 1e-8)?;
    params.max_iter = s.get("max-iter", 200)?;
    params.update = update_rule(s)?;
    params.filter = s.flag("filter")?;
    params.validate()?;
    Ok(SolveSetup {
        params,
        b0,
        b0_source,
        label,
    })
}

fn params_header(command: &str, st: &SolveSetup) -> Header {
    let p = &st.params;
    provenance(
        command,
        &[
            ("shape", st.label.clone()),
            ("lambda", fmt(p.lambda)),
            ("eps", fmt(p.eps)),
            ("nr", p.nr.to_string()),
            ("ntheta", p.ntheta.to_string()),
            ("tau", fmt(p.tau)),
            ("tol", fmt(p.tol)),
            ("max_iter", p.max_iter.to_string()),
            ("update", format!("{:?}", p.update).to_lowercase()),
            ("gradient_filter", p.filter.to_string()),
            ("linear_tol", fmt(p.linear.tol)),
            ("b0", fmt(st.b0)),
            ("b0_source", st.b0_source.clone()),
        ],
    )
}

pub fn cell(s: &Settings) -> Result<(), Failure> {
    let (p, label) = shape(s)?;
    let opts = CellOptions {
        m_trunc: s.get("mtrunc", DEFAULT_M_TRUNC)?,
        n_s: s.get("nr", CELL_NS)?,
        n_theta: s.get("ntheta", CELL_NTHETA)?,
        ..CellOptions::default()
    };
    let lambda = s.get("lambda", lambda_half())?;
    let mu = s.get("mu", 0.9)?;
    let dump = s.flag("dump")?;
    let dir = out_dir(s)?;
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Failure::Usage(format!("mu must lie in (0, 1), got {mu}")));
    }
    let rho0 = solve_radius(lambda, 1.0)?;
    let c = solve_cell(&p, &opts)?;
    let mean = trace_mean(&c);
    let w = compute_b0(lambda, rho0, mean)?;
    let decay = decay_check(&c, mu)?;

    let header = provenance(
        "cell",
        &[
            ("shape", label),
            ("mtrunc", fmt(opts.m_trunc)),
            ("n_s", opts.n_s.to_string()),
            ("n_theta", opts.n_theta.to_string()),
            ("linear_tol", fmt(opts.solver.tol)),
            ("lambda", fmt(lambda)),
            ("rho0", fmt(rho0)),
        ],
    );
    let mut f = create(&dir, "cell_trace.csv")?;
    write_csv(
        &mut f,
        &header,
        &["theta", "trace"],
        c.trace().into_iter().map(|(t, v)| vec![t, v]),
    )?;
    f.flush()?;

    let mut dh = header.clone();
    dh.push(("mu".into(), fmt(mu)));
    dh.push(("decay_constant".into(), fmt(decay.constant)));
    dh.push(("monotone".into(), decay.monotone.to_string()));
    let mut f = create(&dir, "cell_decay.csv")?;
    let rows = decay
        .samples
        .iter()
        .map(|&(r, d)| vec![r, d, decay.constant * (-mu * r).exp()]);
    write_csv(&mut f, &dh, &["R", "deviation", "bound"], rows)?;
    f.flush()?;

    let mut f = create(&dir, "cell_summary.txt")?;
    write_header(&mut f, &header)?;
    writeln!(f, "trace_mean = {}", fmt(mean))?;
    writeln!(f, "b0 = {}", fmt(w.b0))?;
    writeln!(f, "decay_constant = {}", fmt(decay.constant))?;
    writeln!(f, "decay_monotone = {}", decay.monotone)?;
    writeln!(f, "iterations = {}", c.stats().iterations)?;
    f.flush()?;

    if dump {
        let mut f = create(&dir, "cell_grid.txt")?;
        c.dump(&mut f)?;
        f.flush()?;
    }

    println!("trace_mean {mean:.5}");
    println!("b0 {:.5}", w.b0);
    println!(
        "decay_constant {:.5} (mu = {mu}, monotone = {})",
        decay.constant, decay.monotone
    );
    Ok(())
}

pub fn radial(s: &Settings) -> Result<(), Failure> {
    let lambda = s.get("lambda", lambda_half())?;
    let b0 = s.get_opt::<f64>("b0")?;
    let eps = match s.raw("eps") {
        Some(t) => eps_value(t)?,
        None => 0.0,
    };
    let sol = match b0 {
        Some(b0) => RadialSolution::corrected(lambda, b0, eps)?,
        None => RadialSolution::unperturbed(lambda)?,
    };
    let dir = out_dir(s)?;
    let header = provenance(
        "radial",
        &[
            ("lambda", fmt(lambda)),
            ("b0", b0.map_or("none".into(), fmt)),
            ("eps", fmt(eps)),
            ("rho", fmt(sol.rho)),
            ("rhs", fmt(sol.rhs)),
            ("offset", fmt(sol.offset)),
        ],
    );
    let n = 101;
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let r = if k + 1 == n {
            sol.rho
        } else {
            1.0 + (sol.rho - 1.0) * k as f64 / (n - 1) as f64
        };
        rows.push(vec![r, sol.eval_u(r)?, sol.eval_du_dr(r)?]);
    }
    let mut f = create(&dir, "radial_profile.csv")?;
    write_csv(&mut f, &header, &["r", "u", "du_dr"], rows)?;
    f.flush()?;
    println!("rho {}", fmt(sol.rho));
    println!("rhs {}", fmt(sol.rhs));
    println!("offset {}", fmt(sol.offset));
    println!("outer_gradient {}", fmt(sol.outer_gradient()));
    Ok(())
}

pub fn solve(s: &Settings) -> Result<(), Failure> {
    let eps = eps_value(s.raw("eps").unwrap_or("0.1"))?;
    let st = solve_setup(s, lambda_half(), &[eps])?;
    let dir = out_dir(s)?;
    let state = solve_free_boundary(&st.params)?;
    let cmp = compare_to_effective(&state, &st.params, st.b0)?;
    let header = params_header("solve", &st);

    let mut f = create(&dir, "solve_boundary.csv")?;
    write_curve_csv(&mut f, &header, &state.outer)?;
    f.flush()?;
    let mut f = create(&dir, "solve_history.csv")?;
    let rows = state
        .history
        .iter()
        .enumerate()
        .map(|(k, &r)| vec![k as f64, r]);
    write_csv(&mut f, &header, &["iteration", "residual"], rows)?;
    f.flush()?;

    let mut f = create(&dir, "solve_summary.txt")?;
    write_header(&mut f, &header)?;
    let lines = summary_lines(&state.residual, state.iteration, &cmp);
    for l in &lines {
        writeln!(f, "{l}")?;
    }
    f.flush()?;
    for l in &lines {
        println!("{l}");
    }
    Ok(())
}

fn summary_lines(residual: &f64, iterations: usize, cmp: &EffectiveComparison<f64>) -> Vec<String> {
    let (c, b) = (&cmp.corrected, &cmp.baseline);
    vec![
        format!("iterations = {iterations}"),
        format!("residual = {}", fmt(*residual)),
        format!("rho_eps0 = {}", fmt(c.radius)),
        format!("rho0 = {}", fmt(b.radius)),
        format!("corrected_dh = {}", fmt(c.dh)),
        format!("corrected_d1 = {}", fmt(c.d1)),
        format!("corrected_d2 = {}", fmt(c.d2)),
        format!("corrected_dh_over_eps = {}", fmt(c.dh_over_eps)),
        format!("corrected_dh_over_eps2 = {}", fmt(c.dh_over_eps2)),
        format!("baseline_dh = {}", fmt(b.dh)),
        format!("baseline_d1 = {}", fmt(b.d1)),
        format!("baseline_d2 = {}", fmt(b.d2)),
        format!("baseline_dh_over_eps = {}", fmt(b.dh_over_eps)),
    ]
}

#[derive(Clone, Copy, Debug)]
struct MeshRow {
    spacing: Option<f64>,
    nr: usize,
    ntheta: usize,
}

fn parse_meshes(s: &Settings, unit: usize, gap: f64) -> Result<Vec<MeshRow>, Failure> {
    s.list("meshes", "6e-3,3e-3,1.5e-3")
        .iter()
        .map(|m| {
            if let Some((a, b)) = m.split_once(['x', 'X']) {
                let nr = a
                    .parse()
                    .map_err(|_| Failure::Usage(format!("invalid mesh `{m}`")))?;
                let ntheta = b
                    .parse()
                    .map_err(|_| Failure::Usage(format!("invalid mesh `{m}`")))?;
                Ok(MeshRow {
                    spacing: None,
                    nr,
                    ntheta,
                })
            } else {
                let dx: f64 = m
                    .parse()
                    .map_err(|_| Failure::Usage(format!("invalid mesh `{m}`")))?;
                if !(dx > 0.0 && dx < 1.0) {
                    return Err(Failure::Usage(format!("mesh spacing {dx} out of range")));
                }
                let (nr, ntheta) = mesh_for_spacing(dx, unit, gap);
                Ok(MeshRow {
                    spacing: Some(dx),
                    nr,
                    ntheta,
                })
            }
        })
        .collect()
}

pub fn table(s: &Settings) -> Result<(), Failure> {
    let eps_list: Vec<f64> = s
        .list("eps", "0.1,0.05,0.025")
        .iter()
        .map(|e| eps_value(e))
        .collect::<Result<_, _>>()?;
    if eps_list.is_empty() {
        return Err(Failure::Usage("empty eps list".into()));
    }
    let mut st = solve_setup(s, lambda_half(), &eps_list)?;
    // tables are mesh limited
    st.params.tol = s.get("tol", 1e-6)?;
    let gap = solve_radius(st.params.lambda, 1.0)? - 1.0;
    let unit = grid_unit(&st.params.profile, &eps_list)?;
    let meshes = parse_meshes(s, unit, gap)?;
    let mut jobs = Vec::new();
    for (mi, m) in meshes.iter().enumerate() {
        for (ei, &eps) in eps_list.iter().enumerate() {
            let mut p = st.params.clone();
            p.eps = eps;
            p.nr = m.nr;
            p.ntheta = m.ntheta;
            p.validate()?;
            jobs.push((mi, ei, p));
        }
    }
    let dir = out_dir(s)?;
    let b0 = st.b0;
    let results: Vec<Option<EffectiveComparison<f64>>> = jobs
        .par_iter()
        .map(|(_, _, p)| {
            solve_free_boundary(p)
                .and_then(|state| compare_to_effective(&state, p, b0))
                .ok()
        })
        .collect();

    let mut header = params_header("table", &st);
    header.retain(|(k, _)| !matches!(k.as_str(), "eps" | "nr" | "ntheta"));
    header.push((
        "mesh_mapping".into(),
        "ntheta = nearest multiple of the period unit to 2 pi / dx; nr = (rho0 - 1) / dx + 1"
            .into(),
    ));
    let mut cols = vec!["dx".to_string(), "nr".into(), "ntheta".into()];
    cols.extend(eps_list.iter().map(|e| format!("dh_over_eps2[eps={e}]")));
    cols.extend(
        eps_list
            .iter()
            .map(|e| format!("baseline_dh_over_eps[eps={e}]")),
    );
    cols.extend(
        eps_list
            .iter()
            .map(|e| format!("corrected_dh_over_eps[eps={e}]")),
    );

    let mut f = create(&dir, "table.csv")?;
    write_header(&mut f, &header)?;
    writeln!(f, "{}", cols.join(","))?;
    let mut failed = 0;
    let mut printed = Vec::new();
    for (mi, m) in meshes.iter().enumerate() {
        let mut row = vec![
            m.spacing.map_or("-".into(), fmt),
            m.nr.to_string(),
            m.ntheta.to_string(),
        ];
        let cells: Vec<Option<EffectiveComparison<f64>>> = jobs
            .iter()
            .zip(&results)
            .filter(|((j, _, _), _)| *j == mi)
            .map(|(_, r)| *r)
            .collect();
        failed += cells.iter().filter(|c| c.is_none()).count();
        for pick in 0..3 {
            for c in &cells {
                row.push(match c {
                    Some(c) => fmt(match pick {
                        0 => c.corrected.dh_over_eps2,
                        1 => c.baseline.dh_over_eps,
                        _ => c.corrected.dh_over_eps,
                    }),
                    None => "FAILED".into(),
                });
            }
        }
        writeln!(f, "{}", row.join(","))?;
        printed.push(row);
    }
    f.flush()?;
    println!("{}", cols.join(","));
    for row in printed {
        println!("{}", row.join(","));
    }
    if failed > 0 {
        return Err(Failure::Numeric(format!("{failed} table cell(s) failed")));
    }
    Ok(())
}

/// Box around the `θ ≈ 0` part of both boundaries, `(xmin, xmax, ymin, ymax)`.
fn zoom_window(inner: &StarCurve<f64>, outer: &StarCurve<f64>) -> [f64; 4] {
    let half = TAU / 32.0;
    let r_lo = inner.min_radius();
    let r_hi = outer.max_radius();
    let pad = 0.02 * r_hi;
    [
        r_lo * half.cos() - pad,
        r_hi + pad,
        -r_hi * half.sin(),
        r_hi * half.sin(),
    ]
}

pub fn figure(s: &Settings) -> Result<(), Failure> {
    let eps = eps_value(s.raw("eps").unwrap_or("0.1"))?;
    let st = solve_setup(s, lambda_eighth(), &[eps])?;
    let dir = out_dir(s)?;
    let state = solve_free_boundary(&st.params)?;
    let inner = st.params.inner()?;
    let amplitude = state.outer.max_radius() - state.outer.min_radius();
    let zoom = zoom_window(&inner, &state.outer);
    let mut header = params_header("figure", &st);
    header.push(("residual".into(), fmt(state.residual)));
    header.push(("outer_amplitude".into(), fmt(amplitude)));
    header.push((
        "zoom".into(),
        zoom.iter().map(|v| fmt(*v)).collect::<Vec<_>>().join(","),
    ));
    let mut f = create(&dir, "figure_inner.csv")?;
    write_polyline_csv(&mut f, &header, &inner)?;
    f.flush()?;
    let mut f = create(&dir, "figure_outer.csv")?;
    write_polyline_csv(&mut f, &header, &state.outer)?;
    f.flush()?;
    println!("iterations {}", state.iteration);
    println!("residual {}", fmt(state.residual));
    println!("outer_amplitude {}", fmt(amplitude));
    println!("zoom {}", zoom.map(fmt).join(","));
    Ok(())
}

/// Distance from the origin to the nearest edge of the closed polyline.
fn inner_clearance(c: &StarCurve<f64>) -> f64 {
    let pts = c.points();
    let n = pts.len();
    (0..n)
        .map(|i| point_segment_distance([0.0, 0.0], pts[i], pts[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

pub fn metrics(a: &Path, b: &Path, delta: Option<f64>, mbound: Option<f64>) -> Result<(), Failure> {
    let read = |p: &Path| -> Result<StarCurve<f64>, Failure> {
        let text = fs::read_to_string(p)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))?;
        parse_curve(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
    };
    let ca = read(a)?;
    let cb = read(b)?;
    let d = CurveDistances::between(&ca, &cb);
    let delta = delta.unwrap_or_else(|| inner_clearance(&ca).min(inner_clearance(&cb)));
    let m = mbound.unwrap_or_else(|| ca.max_radius().max(cb.max_radius()));
    println!("d1 {}", fmt(d.d1));
    println!("d2 {}", fmt(d.d2));
    println!("hausdorff {}", fmt(d.hausdorff));
    println!("delta {}", fmt(delta));
    println!("mbound {}", fmt(m));
    match AnnulusBounds::new(delta, m) {
        Ok(bounds) => {
            let [s1, s2, s3] = d.equivalence_slack(&bounds);
            println!("slack_hausdorff_le_d1 {}", fmt(s1));
            println!("slack_d2_le_scaled_hausdorff {}", fmt(s2));
            println!("slack_d1_le_scaled_d2 {}", fmt(s3));
        }
        // concentric circles of equal radius and similar degenerate classes
        Err(_) => println!("slack unavailable (degenerate class bounds)"),
    }
    Ok(())
}
