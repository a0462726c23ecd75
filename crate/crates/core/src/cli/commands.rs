//! The five subcommands. Each returns `Err(Failure)` carrying the exit code.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use serde_json::json;

use super::config::{parse, Loaded};
use super::output::{csv, write_atomic};
use super::*;
use crate::blowup::{self, TIME_SCALE};
use crate::delayode::{integrate, IntegratorConfig};
use crate::energy::{energy, EnergyGrid};
use crate::error::Error;
use crate::field::reconstruct;
use crate::freewave;
use crate::model::{ChargeTrajectory, Point3, Scenario, Status, ADMISSIBILITY_TOL};
use crate::quadrature::SphereQuadrature;
use crate::resolvent::resolvent_identity_residual;

type CmdResult = std::result::Result<(), Failure>;

fn fail(code: i32) -> impl Fn(Error) -> Failure {
    move |e| {
        let code = match e {
            Error::NotScalar | Error::NotReal => EXIT_NOT_SCALAR,
            _ => code,
        };
        Failure::new(code, e.to_string())
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure::new(EXIT_IO, e.to_string())
}

fn load(path: &Path) -> std::result::Result<(Loaded, Scenario), Failure> {
    let bytes = fs::read(path).map_err(io)?;
    let loaded = parse(&bytes).map_err(fail(EXIT_CONFIG))?;
    let scenario = loaded.config.scenario().map_err(fail(EXIT_CONFIG))?;
    Ok((loaded, scenario))
}

fn run_integration(scenario: &Scenario, cfg: &IntegratorConfig) -> std::result::Result<ChargeTrajectory, Failure> {
    cfg.validate(scenario).map_err(fail(EXIT_CONFIG))?;
    integrate(scenario, cfg).map_err(fail(EXIT_INTEGRATION))
}

fn write_json(path: &Path, v: &serde_json::Value) -> CmdResult {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    s.push('\n');
    write_atomic(path, s.as_bytes()).map_err(io)
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn parse_point(s: &str) -> std::result::Result<Point3, Failure> {
    let v: Vec<f64> = s.split(',').map(|p| p.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|e| Failure::new(EXIT_CONFIG, format!("bad point {s:?}: {e}")))?;
    if v.len() != 3 {
        return Err(Failure::new(EXIT_CONFIG, format!("point {s:?} needs three coordinates")));
    }
    Ok(Point3::new(v[0], v[1], v[2]))
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, Failure> {
    let v: Vec<f64> = s.split(',').map(|p| p.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|e| Failure::new(EXIT_CONFIG, format!("bad number {s:?}: {e}")))?;
    match v.as_slice() {
        [re] => Ok(Complex64::new(*re, 0.0)),
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(Failure::new(EXIT_CONFIG, format!("{s:?} is neither `re` nor `re,im`"))),
    }
}

pub fn cmd_simulate(config: &Path, out: &Path) -> CmdResult {
    let (loaded, scenario) = load(config)?;
    let cfg = loaded.config.integrator();
    let traj = run_integration(&scenario, &cfg)?;
    let n = scenario.dim();
    let mut header = vec!["t".to_string()];
    for j in 0..n {
        for k in ["zeta", "zetadot", "trace"] {
            header.push(format!("{k}_{j}_re"));
            header.push(format!("{k}_{j}_im"));
        }
    }
    let rows: Vec<Vec<String>> = (0..traj.len())
        .map(|i| {
            let mut r = vec![num(traj.times[i])];
            for j in 0..n {
                for v in [traj.zeta[i][j], traj.zetadot[i][j], traj.forcing[i][j]] {
                    r.push(num(v.re));
                    r.push(num(v.im));
                }
            }
            r
        })
        .collect();
    write_atomic(&out.join("charges.csv"), csv(&loaded.sha256, &header, &rows).as_bytes()).map_err(io)?;
    let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let report = json!({
        "config_sha256": loaded.sha256,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "status": traj.status.label(),
        "lifespan": traj.lifespan(),
        "lifespan_normalized": traj.lifespan() * TIME_SCALE,
        "samples": traj.len(),
        "tolerances": {
            "step": cfg.step,
            "local_tol": cfg.local_tol,
            "escape_threshold": cfg.escape_threshold,
            "quad_order": cfg.quad_order,
            "admissibility_tol": ADMISSIBILITY_TOL,
        },
        "config": loaded.raw,
        "timestamp": { "unix_seconds": ts },
    });
    write_json(&out.join("report.json"), &report)
}

pub fn cmd_analyze_blowup(config: &Path, out: &Path) -> CmdResult {
    let (loaded, scenario) = load(config)?;
    let cfg = loaded.config.integrator();
    let spec = loaded.config.analysis.blowup.clone().unwrap_or_default();
    let bound = spec.bound.unwrap_or(100.0);
    let levels = spec.levels.unwrap_or(4);
    let (mut report, k) = blowup::analyze(&scenario, cfg.quad_order, levels, bound).map_err(fail(EXIT_CONFIG))?;
    // A direct run for the observed lifespan and the terminal asymptote.
    let simulation = match cfg.validate(&scenario).and_then(|_| integrate(&scenario, &cfg)) {
        Ok(traj) => {
            report.fitted = blowup::fit_blowup_asymptote(&traj, 0).ok();
            json!({
                "status": traj.status.label(),
                "lifespan_physical": traj.lifespan(),
                "lifespan_normalized": traj.lifespan() * TIME_SCALE,
            })
        }
        Err(e) => json!({ "status": "failed", "error": e.to_string() }),
    };
    let t_upper_normalized = match report.verdict {
        blowup::Verdict::BlowupUp(t) | blowup::Verdict::BlowupDown(t) => Some(t),
        _ => None,
    };
    let v = json!({
        "config_sha256": loaded.sha256,
        "report": report,
        "k_estimate": k,
        "t_upper_normalized": t_upper_normalized,
        "t_upper_physical": report.t_upper_physical,
        "simulation": simulation,
    });
    write_json(&out.join("blowup.json"), &v)
}

pub fn cmd_field_slice(config: &Path, t: f64, from: &str, to: &str, samples: usize, out: &Path) -> CmdResult {
    let (loaded, scenario) = load(config)?;
    let (a, b) = (parse_point(from)?, parse_point(to)?);
    if samples < 2 {
        return Err(Failure::new(EXIT_CONFIG, "field slice needs at least two samples"));
    }
    if t < 0.0 {
        return Err(Failure::new(EXIT_LIFESPAN, "negative times are outside the computed history"));
    }
    let cfg = loaded.config.integrator();
    let traj = run_integration(&scenario, &cfg)?;
    if t > traj.lifespan() && !matches!(traj.status, Status::Escaped(_)) {
        return Err(Failure::new(EXIT_LIFESPAN, format!("t = {t} beyond the computed range [0, {}]", traj.t_end())));
    }
    let quad = SphereQuadrature::new(cfg.quad_order).map_err(fail(EXIT_CONFIG))?;
    let set = &scenario.set;
    let mut rows = Vec::with_capacity(samples);
    for i in 0..samples {
        let s = i as f64 / (samples - 1) as f64;
        let x = a + (b - a) * s;
        let v = match reconstruct(&traj, &scenario.data, set, t, x, &quad) {
            Ok(v) => v,
            Err(e @ (Error::OutsideDomain { .. } | Error::HistoryRange { .. })) => return Err(Failure::new(EXIT_LIFESPAN, e.to_string())),
            Err(e) => return Err(fail(EXIT_CONFIG)(e)),
        };
        let inside = set.points().iter().any(|&y| t.abs() >= x.distance(y));
        rows.push(vec![num(x.0[0]), num(x.0[1]), num(x.0[2]), num(v.re), num(v.im), (if inside { "inside" } else { "outside" }).to_string()]);
    }
    let header: Vec<String> = ["x1", "x2", "x3", "phi_re", "phi_im", "region"].iter().map(|s| s.to_string()).collect();
    write_atomic(&out.join("field.csv"), csv(&loaded.sha256, &header, &rows).as_bytes()).map_err(io)?;
    let script = format!(
        "# config_sha256={}\nimport csv\nimport matplotlib.pyplot as plt\n\nrows = [r for r in csv.reader(open(\"field.csv\")) if not r[0].startswith(\"#\")][1:]\ns = range(len(rows))\nplt.plot(s, [float(r[3]) for r in rows], label=\"Re phi\")\nplt.plot(s, [float(r[4]) for r in rows], label=\"Im phi\")\nplt.xlabel(\"sample along slice\")\nplt.title(\"t = {}\")\nplt.legend()\nplt.savefig(\"field.png\")\n",
        loaded.sha256, t
    );
    write_atomic(&out.join("plot_field.py"), script.as_bytes()).map_err(io)
}

pub fn cmd_energy_audit(config: &Path, times: &str, out: &Path) -> CmdResult {
    let (loaded, scenario) = load(config)?;
    if !scenario.field.is_gradient() {
        return Err(Failure::new(EXIT_NON_GRADIENT, "energy audit needs a gradient-type nonlinearity"));
    }
    let times: Vec<f64> = times
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Failure::new(EXIT_CONFIG, format!("bad times: {e}")))?;
    if times.is_empty() || times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Failure::new(EXIT_CONFIG, "times must be non-negative"));
    }
    let t_last = times.iter().copied().fold(0.0, f64::max);
    let spec = loaded.config.analysis.energy.clone();
    let d = EnergyGrid::default();
    let grid = EnergyGrid {
        shells: spec.as_ref().and_then(|s| s.shells).unwrap_or(d.shells),
        angular_order: spec.as_ref().and_then(|s| s.angular_order).unwrap_or(d.angular_order),
        kirchhoff_order: spec.as_ref().and_then(|s| s.kirchhoff_order).unwrap_or(d.kirchhoff_order),
        ..d
    };
    let radius = spec.as_ref().map(|s| s.radius).unwrap_or(t_last + 8.0);
    let mut cfg = loaded.config.integrator();
    cfg.t_max = cfg.t_max.max(t_last + 4.0 * grid.h_t);
    let traj = run_integration(&scenario, &cfg)?;
    let mut rows = Vec::new();
    for &t in &times {
        if t + 2.0 * grid.h_t > traj.t_end() && t != 0.0 {
            return Err(Failure::new(EXIT_LIFESPAN, format!("t = {t} beyond the computed range [0, {}]", traj.t_end())));
        }
        let e = energy(&traj, &scenario.data, &scenario.set, &scenario.field, t, radius, &grid).map_err(|e| match e {
            Error::Variant { .. } => Failure::new(EXIT_NON_GRADIENT, e.to_string()),
            Error::HistoryRange { .. } | Error::OutsideDomain { .. } => Failure::new(EXIT_LIFESPAN, e.to_string()),
            e => fail(EXIT_INTEGRATION)(e),
        })?;
        rows.push([t, e.kinetic, e.elastic, e.matrix_term, e.potential, e.total, e.truncation].iter().map(|v| num(*v)).collect());
    }
    let header: Vec<String> = ["t", "kinetic", "elastic", "matrix_term", "potential", "total", "trunc_est"].iter().map(|s| s.to_string()).collect();
    write_atomic(&out.join("energy.csv"), csv(&loaded.sha256, &header, &rows).as_bytes()).map_err(io)
}

pub fn cmd_resolvent_check(config: &Path, z: &str, w: &str, out: &Path) -> CmdResult {
    let (loaded, scenario) = load(config)?;
    let (z, w) = (parse_complex(z)?, parse_complex(w)?);
    let probe = loaded.config.resolvent_probe().map_err(fail(EXIT_CONFIG))?;
    let c = scenario.set.centroid();
    let points: Vec<Point3> = match loaded.config.analysis.resolvent.as_ref().and_then(|r| r.points.clone()) {
        Some(p) => p.into_iter().map(Point3).collect(),
        None => [[0.5, 0.0, 0.0], [-0.3, 0.7, 0.2], [1.2, -0.8, 0.5]].into_iter().map(|p| c + Point3(p)).collect(),
    };
    let r = resolvent_identity_residual(&scenario.field, &scenario.set, z, w, &probe, &points).map_err(fail(EXIT_INTEGRATION))?;
    let v = json!({
        "config_sha256": loaded.sha256,
        "z": [z.re, z.im],
        "w": [w.re, w.im],
        "points": points.iter().map(|p| p.0).collect::<Vec<_>>(),
        "printed_form_residual": r.printed,
        "standard_form_residual": r.standard,
        "newton_iterations": r.newton_iterations,
    });
    write_json(&out.join("resolvent.json"), &v)
}

/// Free field along the same slice, for cross-checks of the region flag.
pub fn free_slice(scenario: &Scenario, t: f64, points: &[Point3], quad_order: usize) -> crate::Result<Vec<Complex64>> {
    let quad = SphereQuadrature::new(quad_order)?;
    points.iter().map(|&x| freewave::free_field(&scenario.data, &scenario.set, t, x, &quad)).collect()
}
