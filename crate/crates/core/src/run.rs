//! Scenario execution. [`run`] is free of side effects apart from reading
//! the input trace of `blowup-analyze`; writing artifacts is left to the
//! caller.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::axisym::{self, liouville_monitors, AxisymStepper};
use crate::blowup::{classify, leray_rate, BlowupTrace, BlowupType};
use crate::config::{RunConfig, Scenario};
use crate::error::{Error, Result};
use crate::fields::io::{fmt_f64, write_csv};
use crate::fields::{refined_sup_abs, taylor_green, AxisymGrid, Spectral, TorusGrid, VectorField};
use crate::kernels::{log_scales, verify_decay, KernelKind};
use crate::mild::datum::{abc_flow, erf_profile, random_band};
use crate::mild::{decompose, picard_solve, smoothing_diagnostic, vorticity_residual, PicardOptions, Trajectory};
use crate::parabolic::{harnack_stability_probe, HarnackProbe, ParabolicProblem, ProbeFamily, ProbeOptions, Region};

/// One named field file.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile {
    pub name: String,
    pub contents: String,
}

/// Everything a run produces. The report always embeds the resolved
/// configuration under `"config"`; tables carry it as `#` comment lines.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: Value,
    pub table: Option<String>,
    pub fields: Vec<FieldFile>,
}

impl RunOutput {
    /// Report as pretty JSON with a trailing newline.
    pub fn report_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).unwrap_or_else(|_| "{}".into());
        s.push('\n');
        s
    }

    /// All field files concatenated into one text.
    pub fn fields_text(&self) -> String {
        self.fields.iter().map(|f| f.contents.as_str()).collect()
    }
}

/// Options that do not belong to the scenario schema.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunContext {
    pub jobs: Option<usize>,
}

pub fn run(config: &RunConfig, ctx: RunContext) -> Result<RunOutput> {
    let mut out = match config.scenario {
        Scenario::TaylorGreen => taylor_green_run(config)?,
        Scenario::MildSolve => mild_solve(config)?,
        Scenario::HarnackProbe => harnack(config, ctx)?,
        Scenario::AxisymRun => axisym_run(config)?,
        Scenario::BlowupAnalyze => blowup_analyze(config)?,
        Scenario::KernelTable => kernel_table(config)?,
    };
    if let Value::Object(m) = &mut out.report {
        m.insert("config".into(), config.to_json());
    }
    Ok(out)
}

fn row(values: &[f64]) -> String {
    let cells: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
    cells.join(",") + "\n"
}

fn table(config: &RunConfig, extra: &str, header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = extra.to_string();
    s.push_str(&config.comment_lines());
    s.push_str(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
    }
    s
}

fn picard_options(config: &RunConfig) -> PicardOptions {
    let mut opts = PicardOptions::new(config.f64("T"));
    opts.dt = config.auto_f64("dt");
    opts.tol = config.f64("tol");
    opts.max_iter = config.usize("max_iter");
    opts
}

fn torus_field_files(traj: &Trajectory, stem: &str) -> Result<Vec<FieldFile>> {
    let picks: Vec<&VectorField> = match (traj.fields.first(), traj.fields.last()) {
        (Some(a), Some(b)) if traj.len() > 1 => vec![a, b],
        (Some(a), _) => vec![a],
        _ => vec![],
    };
    picks
        .into_iter()
        .enumerate()
        .map(|(k, f)| {
            let mut buf = Vec::new();
            write_csv(&mut buf, std::slice::from_ref(f))?;
            Ok(FieldFile {
                name: format!("{stem}_{k}.csv"),
                contents: String::from_utf8_lossy(&buf).into_owned(),
            })
        })
        .collect()
}

fn sup_vorticity(sp: &Spectral, f: &VectorField) -> Result<f64> {
    if f.dim() == 2 {
        Ok(sp.curl2d(f)?.sup_norm())
    } else {
        Ok(sp.curl3d(f)?.sup_norm())
    }
}

fn taylor_green_run(config: &RunConfig) -> Result<RunOutput> {
    let n = config.usize("N");
    let grid = TorusGrid::square(n).map_err(|e| Error::config("N", e.to_string()))?;
    let a = config.f64("amplitude");
    let u0 = taylor_green(grid, a, 0.0)?;
    let (traj, report) = picard_solve(&u0, &picard_options(config))?;
    if !report.converged {
        return Err(Error::Solver {
            message: report.message.clone().unwrap_or_else(|| "Picard iteration did not converge".into()),
            residual: report.increments.last().copied().unwrap_or(f64::NAN),
        });
    }
    let sp = Spectral::new(grid);
    let mut rows = Vec::new();
    let (mut sup_error, mut omega_error, mut refined_omega_error) = (0.0f64, 0.0f64, 0.0f64);
    for f in &traj.fields {
        let decay = (-2.0 * f.time).exp();
        let exact = taylor_green(grid, a * decay, f.time)?;
        let err = f.sup_distance(&exact);
        let omega = sp.curl2d(f)?;
        let s_omega = omega.sup_norm();
        let w_err = (s_omega - 2.0 * a.abs() * decay).abs();
        refined_omega_error = refined_omega_error.max((refined_sup_abs(&omega) - 2.0 * a.abs() * decay).abs());
        sup_error = sup_error.max(err);
        omega_error = omega_error.max(w_err);
        rows.push(row(&[f.time, f.sup_norm(), s_omega, err, w_err]));
    }
    let smoothing = smoothing_diagnostic(&traj, 1, 0)?;
    let residual = vorticity_residual(&traj)?;
    Ok(RunOutput {
        report: json!({
            "scenario": "taylor-green",
            "sup_error": sup_error,
            "omega_error": omega_error,
            "refined_omega_error": refined_omega_error,
            "smoothing_k1_l0": smoothing,
            "vorticity_residual": residual,
            "picard": report,
        }),
        table: Some(table(config, "", "t,h,sup_omega,sup_error,omega_error", rows)),
        fields: torus_field_files(&traj, "taylor_green")?,
    })
}

fn mild_solve(config: &RunConfig) -> Result<RunOutput> {
    let n = config.usize("N");
    let datum = config.str("datum");
    let dim = match datum {
        "abc" => 3,
        "taylor-green" => 2,
        _ => config.usize("dim"),
    };
    if !(dim == 2 || dim == 3) {
        return Err(Error::config("dim", format!("must be 2 or 3, got {dim}")));
    }
    if datum == "taylor-green" && config.usize("dim") != 2 {
        return Err(Error::config("dim", "taylor-green datum is two-dimensional"));
    }
    if datum == "abc" && config.usize("dim") != 3 && config.usize("dim") != 2 {
        return Err(Error::config("dim", "abc datum is three-dimensional"));
    }
    let grid = TorusGrid::new(dim, n, 2.0 * PI).map_err(|e| Error::config("N", e.to_string()))?;
    let a = config.f64("amplitude");
    let u0 = match datum {
        "taylor-green" => taylor_green(grid, 1.0, 0.0)?,
        "abc" => abc_flow(grid, 1.0, 1.0, 1.0)?,
        "random-band" => random_band(grid, config.seed, config.f64("k_lo"), config.f64("k_hi"))
            .map_err(|e| Error::config("k_hi", e.to_string()))?,
        _ => erf_profile(grid)?,
    }
    .scaled(a);
    let (traj, report) = picard_solve(&u0, &picard_options(config))?;
    if !report.converged {
        return Err(Error::Solver {
            message: report.message.clone().unwrap_or_else(|| "Picard iteration did not converge".into()),
            residual: report.increments.last().copied().unwrap_or(f64::NAN),
        });
    }
    let (k, l) = (config.usize("smoothing_k"), config.usize("smoothing_l"));
    let smoothing = smoothing_diagnostic(&traj, k, l).map_err(|e| Error::config("smoothing_k", e.to_string()))?;
    let parts = decompose(&traj, true, f64::INFINITY)?;
    let b_prime_sup = parts.b_prime.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let sp = Spectral::new(grid);
    let mut rows = Vec::new();
    for f in &traj.fields {
        rows.push(row(&[f.time, f.sup_norm(), sup_vorticity(&sp, f)?]));
    }
    let mut report_json = json!({
        "scenario": "mild-solve",
        "datum": datum,
        "dim": dim,
        "ratios": report.ratios,
        "increments": report.increments,
        "defect": report.defect,
        "smoothing": { "k": k, "l": l, "value": smoothing },
        "decomposition": {
            "heat_residual": parts.heat_residual,
            "b_prime_sup": b_prime_sup,
            "reconstruction_error": parts.reconstruction_error,
        },
        "picard": report,
    });
    if datum == "taylor-green" {
        let (mut sup_error, mut omega_error) = (0.0f64, 0.0f64);
        for f in &traj.fields {
            let decay = (-2.0 * f.time).exp();
            sup_error = sup_error.max(f.sup_distance(&u0.scaled(decay)));
            omega_error = omega_error.max((sup_vorticity(&sp, f)? - 2.0 * a.abs() * decay).abs());
        }
        report_json["oracle"] = json!({ "sup_error": sup_error, "omega_error": omega_error });
    }
    if dim == 2 {
        report_json["vorticity_residual"] = serde_json::to_value(vorticity_residual(&traj)?)
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    Ok(RunOutput {
        report: report_json,
        table: Some(table(config, "", "t,h,sup_omega", rows)),
        fields: torus_field_files(&traj, "mild")?,
    })
}

/// Broadcast a one-entry list to `dim` entries.
fn corner(config: &RunConfig, key: &str, dim: usize) -> Result<Vec<f64>> {
    let v = config.list(key);
    match v.len() {
        1 => Ok(vec![v[0]; dim]),
        d if d == dim => Ok(v),
        d => Err(Error::config(key, format!("has {d} entries, domain has dimension {dim}"))),
    }
}

fn harnack(config: &RunConfig, ctx: RunContext) -> Result<RunOutput> {
    let lower = config.list("lower");
    let dim = lower.len();
    if !(dim == 1 || dim == 2) {
        return Err(Error::config("lower", format!("dimension must be 1 or 2, got {dim}")));
    }
    let lower = corner(config, "lower", dim)?;
    let upper = corner(config, "upper", dim)?;
    let at = |key: &str, e: Error| Error::config(key, e.to_string());
    let k_set = Region::new(&corner(config, "k_lower", dim)?, &corner(config, "k_upper", dim)?)
        .map_err(|e| at("k_lower", e))?;
    let omega_prime = Region::new(&corner(config, "omega_lower", dim)?, &corner(config, "omega_upper", dim)?)
        .map_err(|e| at("omega_lower", e))?;
    let deltas = config.list("deltas");
    if deltas.iter().any(|d| !(*d > 0.0 && *d < 1.0)) {
        return Err(Error::config("deltas", "every delta must lie in (0, 1)"));
    }
    let horizon = config.f64("T");
    let drift = config.f64("drift");
    let problem = ParabolicProblem::constant(&lower, &upper, horizon, 0.0).with_drift(move |_, _| [drift, 0.0]);
    let probe = HarnackProbe {
        k_set,
        omega_prime,
        tau: config.f64("tau"),
        deltas,
    };
    let opts = ProbeOptions {
        nodes: config.usize("nodes"),
        dt: config.auto_f64("dt"),
        windows: config.list("windows"),
        levels: config.list("levels"),
        jobs: ctx.jobs,
    };
    let t = harnack_stability_probe(&problem, &probe, &opts)?;
    let violations: usize = t.members.iter().map(|m| m.max_principle_violations).sum();
    let rows = t.rows.iter().map(|r| {
        format!("{},{},{},{}\n", r.family.label(), fmt_f64(r.delta), fmt_f64(r.epsilon), r.qualifying)
    });
    let constant_eps = t.epsilons(ProbeFamily::Constant).iter().fold(0.0f64, |m, (_, e)| m.max(*e));
    Ok(RunOutput {
        report: json!({
            "scenario": "harnack-probe",
            "monotone": t.is_monotone(),
            "constant_epsilon": constant_eps,
            "max_principle_violations": violations,
            "probe": probe,
            "table": t,
        }),
        table: Some(table(config, "", "family,delta,epsilon,qualifying", rows)),
        fields: Vec::new(),
    })
}

fn axisym_run(config: &RunConfig) -> Result<RunOutput> {
    let (z_min, z_max) = (config.f64("z_min"), config.f64("z_max"));
    if !(z_max > z_min) {
        return Err(Error::config("z_max", format!("must exceed z_min = {z_min}")));
    }
    let grid = AxisymGrid::new(config.f64("r_max"), z_min, z_max, config.usize("nr"), config.usize("nz"))
        .map_err(|e| Error::config("nr", e.to_string()))?;
    let (amp, sigma, zc) = (config.f64("amplitude"), config.f64("sigma"), config.f64("z_center"));
    let initial = match config.str("case") {
        "swirl-bump" => axisym::scenarios::swirl_bump(grid, amp, sigma, zc)?,
        "no-swirl-bump" => axisym::scenarios::no_swirl_bump(grid, amp, sigma, zc)?,
        "coupled-bump" => axisym::scenarios::coupled_bump(grid, amp, config.f64("vorticity"), sigma)?,
        _ => axisym::scenarios::rigid_rotation(grid)?,
    };
    let dt = config.f64("dt");
    let (steps, every) = (config.usize("steps"), config.usize("every"));
    let stepper = AxisymStepper::new(grid, dt, config.bool("swirl_source"))?;
    let mut states = vec![initial.clone()];
    let mut cur = initial;
    let mut max_u_theta = 0.0f64;
    for k in 1..=steps {
        cur = stepper.step(&cur)?;
        max_u_theta = cur.u_theta().iter().fold(max_u_theta, |m, v| m.max(v.abs()));
        if k % every == 0 || k == steps {
            states.push(cur.clone());
        }
    }
    let mon = liouville_monitors(&states, dt);
    let fields = states
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let mut contents = String::new();
            let _ = writeln!(contents, "# t = {}", fmt_f64(s.time));
            contents.push_str(&axisym::fields_csv(s));
            FieldFile {
                name: format!("axisym_{k:04}.csv"),
                contents,
            }
        })
        .collect();
    let first = &mon.rows[0];
    let last = &mon.rows[mon.rows.len() - 1];
    let csv = mon.to_csv();
    let mut lines = csv.lines();
    let header = lines.next().unwrap_or_default().to_string();
    Ok(RunOutput {
        report: json!({
            "scenario": "axisym-run",
            "steps": steps,
            "sup_f_nonincreasing": mon.sup_f_nonincreasing,
            "sup_eta_nonincreasing": mon.sup_eta_nonincreasing,
            "excluded_rings": mon.excluded_rings,
            "sup_f": [first.sup_f, last.sup_f],
            "sup_eta": [first.sup_eta, last.sup_eta],
            "max_u_theta": max_u_theta,
            "max_cfl": mon.rows.iter().fold(0.0f64, |m, r| m.max(r.cfl)),
        }),
        table: Some(table(config, "", &header, lines.map(|l| format!("{l}\n")).collect::<Vec<_>>())),
        fields,
    })
}

/// Parse a trace CSV: `#` lines are skipped, the first other line names the
/// columns. Returns `(t, h, sup_rho_u)`.
pub fn read_trace(text: &str) -> Result<(Vec<f64>, Vec<f64>, Option<Vec<f64>>)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Parse("trace file has no header".into()))?
        .split(',')
        .map(str::trim)
        .collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let (ti, hi) = match (col("t"), col("h")) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Parse(format!("trace needs columns t and h, found {}", header.join(",")))),
    };
    let ri = col("sup_rho_u");
    let (mut t, mut h, mut r) = (Vec::new(), Vec::new(), Vec::new());
    for (n, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != header.len() {
            return Err(Error::Parse(format!("row {}: {} cells for {} columns", n + 1, cells.len(), header.len())));
        }
        let num = |i: usize| {
            cells[i]
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("row {}: '{}' is not a number", n + 1, cells[i])))
        };
        t.push(num(ti)?);
        h.push(num(hi)?);
        if let Some(i) = ri {
            r.push(num(i)?);
        }
    }
    Ok((t, h, ri.map(|_| r)))
}

fn blowup_analyze(config: &RunConfig) -> Result<RunOutput> {
    let path = config.str("traj");
    let text = std::fs::read_to_string(path).map_err(|e| Error::config("traj", format!("cannot read '{path}': {e}")))?;
    let (t, h, rho) = read_trace(&text)?;
    let blowup_time = config.f64("T");
    let trace = BlowupTrace::from_series(t, h)?
        .with_candidate(blowup_time)
        .map_err(|e| Error::config("T", e.to_string()))?;
    let window = config.usize("window");
    let class = classify(&trace, blowup_time, window)?;
    let leray = leray_rate(&trace, blowup_time)?;
    let c_fit = match class.kind {
        BlowupType::TypeI { c_fit } => json!(c_fit),
        _ => Value::Null,
    };
    let sup_sqrt_u: Vec<f64> = trace
        .times
        .iter()
        .zip(&trace.h)
        .map(|(s, h)| h * (blowup_time - s).sqrt())
        .collect();
    let sup_rho_u = match rho {
        Some(v) => json!({ "series": v }),
        None => json!({ "not_applicable": "trace has no sup_rho_u column" }),
    };
    Ok(RunOutput {
        report: json!({
            "type": class.kind.label(),
            "C_fit": c_fit,
            "leray_rate_inf": leray.infimum,
            "window": class.window,
            "slope": class.slope,
            "no_leray_blowup": leray.no_leray_blowup,
            "monitors": {
                "times": trace.times,
                "sup_sqrt_u": { "series": sup_sqrt_u },
                "sup_rho_u": sup_rho_u,
            },
        }),
        table: None,
        fields: Vec::new(),
    })
}

fn kernel_table(config: &RunConfig) -> Result<RunOutput> {
    let kind: KernelKind = config.str("kind").parse()?;
    let n = config.usize("n");
    if !(n == 2 || n == 3) {
        return Err(Error::config("n", format!("must be 2 or 3, got {n}")));
    }
    let (lo, hi, count) = config.range("scales");
    let fit = verify_decay(kind, n, &log_scales(lo, hi, count)).map_err(|e| Error::config("scales", e.to_string()))?;
    let extra = format!(
        "# kind = {kind:?}\n# n = {n}\n# fitted_slope = {}\n# expected_slope = {}\n",
        fmt_f64(fit.slope),
        fmt_f64(fit.expected_slope)
    );
    let rows = (0..fit.scales.len()).map(|k| row(&[fit.scales[k], fit.max_abs[k], fit.bound_ratio[k]]));
    let t = table(config, &extra, "scale,max_abs,bound_ratio", rows.collect::<Vec<_>>());
    Ok(RunOutput {
        report: json!({
            "scenario": "kernel-table",
            "kind": format!("{kind:?}"),
            "n": n,
            "fitted_slope": fit.slope,
            "expected_slope": fit.expected_slope,
            "fit": fit,
        }),
        table: Some(t),
        fields: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(s: Scenario, kv: &[(&str, &str)]) -> RunConfig {
        let e: Vec<(String, String)> = kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        RunConfig::resolve(s, &e, None).unwrap()
    }

    #[test]
    fn taylor_green_matches_the_decaying_mode() {
        let c = cfg(Scenario::TaylorGreen, &[("N", "16"), ("T", "0.25"), ("dt", "0.03125")]);
        let out = run(&c, RunContext::default()).unwrap();
        assert!(out.report["sup_error"].as_f64().unwrap() < 1e-6);
        assert!(out.report["omega_error"].as_f64().unwrap() < 1e-6);
        assert_eq!(out.report["config"]["params"]["N"], json!(16));
        let t = out.table.unwrap();
        assert!(t.contains("# N = 16\n"));
        assert!(t.contains("\nt,h,sup_omega,sup_error,omega_error\n"));
        // 9 snapshots plus 8 config lines, 2 header comments and the column line
        assert_eq!(t.lines().filter(|l| !l.starts_with('#')).count(), 10);
        assert_eq!(out.fields.len(), 2);
    }

    #[test]
    fn reruns_are_byte_identical() {
        let c = cfg(Scenario::MildSolve, &[("datum", "random-band"), ("N", "16"), ("T", "0.1"), ("dt", "0.025")]);
        let a = run(&c, RunContext::default()).unwrap();
        let b = run(&c, RunContext { jobs: Some(1) }).unwrap();
        assert_eq!(a.report_text(), b.report_text());
        assert_eq!(a.table, b.table);
        assert_eq!(a.fields_text(), b.fields_text());
    }

    #[test]
    fn kernel_table_reports_the_slope() {
        let c = cfg(Scenario::KernelTable, &[("kind", "Kijk"), ("n", "3"), ("scales", "1:100:20")]);
        let out = run(&c, RunContext::default()).unwrap();
        let slope = out.report["fitted_slope"].as_f64().unwrap();
        assert!((slope + 4.0).abs() < 0.2, "{slope}");
        let t = out.table.unwrap();
        assert!(t.starts_with("# kind = Kijk\n# n = 3\n# fitted_slope = "));
        assert_eq!(t.lines().filter(|l| !l.starts_with('#')).count(), 21);
    }

    #[test]
    fn blowup_analyze_reads_a_trace() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        let mut text = String::from("# synthetic\nt,h\n");
        for k in 0..40 {
            let t = 1.0 - 0.5 * 0.85f64.powi(k);
            text.push_str(&format!("{t},{}\n", (1.0 - t).powf(-0.5)));
        }
        std::fs::write(&path, text).unwrap();
        let c = cfg(Scenario::BlowupAnalyze, &[("traj", path.to_str().unwrap()), ("T", "1.0")]);
        let out = run(&c, RunContext::default()).unwrap();
        assert_eq!(out.report["type"], "TypeI");
        assert!((out.report["C_fit"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(out.report["window"], 16);
        assert!(out.report["monitors"]["sup_rho_u"]["not_applicable"].is_string());
        assert!(out.table.is_none());
    }

    #[test]
    fn trace_parsing_rejects_bad_input() {
        assert!(matches!(read_trace("x,y\n1,2\n"), Err(Error::Parse(_))));
        assert!(matches!(read_trace("t,h\n1,oops\n"), Err(Error::Parse(_))));
        let (t, h, r) = read_trace("t,h,sup_rho_u\n0,1,2\n0.5,2,3\n").unwrap();
        assert_eq!((t, h, r), (vec![0.0, 0.5], vec![1.0, 2.0], Some(vec![2.0, 3.0])));
    }

    #[test]
    fn axisym_and_harnack_runs_emit_tables() {
        let c = cfg(
            Scenario::AxisymRun,
            &[("nr", "17"), ("nz", "33"), ("steps", "10"), ("every", "5"), ("dt", "0.005")],
        );
        let out = run(&c, RunContext::default()).unwrap();
        assert_eq!(out.report["sup_f_nonincreasing"], true);
        assert_eq!(out.fields.len(), 3);
        assert!(out.table.unwrap().contains("\nt,sup_f,inf_f,sup_eta,sup_rho_u,cfl\n"));

        let c = cfg(Scenario::HarnackProbe, &[("nodes", "21"), ("deltas", "0.5,0.1"), ("levels", "0,1")]);
        let out = run(&c, RunContext { jobs: Some(2) }).unwrap();
        assert_eq!(out.report["monotone"], true);
        assert_eq!(out.report["constant_epsilon"], json!(0.0));
        assert_eq!(out.report["max_principle_violations"], 0);
    }

    #[test]
    fn geometry_errors_name_a_key() {
        let c = cfg(Scenario::HarnackProbe, &[("lower", "-1,-1"), ("upper", "1,1,1")]);
        match run(&c, RunContext::default()) {
            Err(Error::Config { key, .. }) => assert_eq!(key.as_deref(), Some("upper")),
            r => panic!("{r:?}"),
        }
        let c = cfg(Scenario::TaylorGreen, &[("N", "15")]);
        assert!(matches!(run(&c, RunContext::default()), Err(Error::Config { .. })));
    }
}
