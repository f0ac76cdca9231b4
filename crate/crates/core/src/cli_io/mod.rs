//! Run configuration, command implementations and output formats for the
//! `boltzmann` command-line tool.
//!
//! Every command writes to a caller-supplied sink so that output is testable
//! and identical for identical configurations.

mod selftest;
mod svg;

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{
    angle_of, derive_params, empirical_rotation_number, is_nonempty, rotation_number,
    LevelSetParams, RealLocusClass,
};
use crate::error::Error;
use crate::periodicity::{find_periodic_locus, period3_residual, period3_scale};
use crate::poincare::{iterate_orbit, sample_level_set, ConfigPoint, IterateOptions, Orbit};

pub use selftest::{run_selftest, SuiteResult};
pub use svg::{class_map_svg, level_set_svg, physical_svg};

/// Column header of the orbit table.
pub const ORBIT_COLUMNS: [&str; 9] = [
    "step", "x", "A1", "A2", "L", "D_resid", "E_check", "theta", "eps",
];

/// Default number of collisions for the empirical rotation number.
pub const EMPIRICAL_STEPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Command {
    Classify,
    Orbit,
    Rotation,
    PeriodScan,
    Render,
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// What an orbit SVG shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum View {
    /// Physical plane: wall, centre and the Kepler arcs between collisions.
    Physical,
    /// The real locus projected to `(A₁, L)` with the iterates marked.
    LevelSet,
}

/// Parameter rectangle `[d_min, d_max] × [e_min, e_max]` sampled `n × n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub d_min: f64,
    pub d_max: f64,
    pub e_min: f64,
    pub e_max: f64,
    pub n: usize,
}

impl Grid {
    /// Parses `Dmin:Dmax:Emin:Emax:n`.
    pub fn parse(s: &str) -> Result<Grid, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 5 {
            return Err(CliError::Usage(format!(
                "grid `{s}` is not Dmin:Dmax:Emin:Emax:n"
            )));
        }
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad number `{t}` in grid")))
        };
        let n = parts[4]
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("bad cell count `{}` in grid", parts[4])))?;
        let g = Grid {
            d_min: num(parts[0])?,
            d_max: num(parts[1])?,
            e_min: num(parts[2])?,
            e_max: num(parts[3])?,
            n,
        };
        if n == 0 || !(g.d_min < g.d_max) || !(g.e_min <= g.e_max) {
            return Err(CliError::Usage(format!("grid `{s}` is empty")));
        }
        Ok(g)
    }

    /// Sample values along D, endpoints included.
    pub fn d_values(&self) -> Vec<f64> {
        axis(self.d_min, self.d_max, self.n)
    }

    pub fn e_values(&self) -> Vec<f64> {
        axis(self.e_min, self.e_max, self.n)
    }
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub d: Option<f64>,
    pub e: Option<f64>,
    /// Collisions to iterate; command default when absent.
    pub n_steps: Option<usize>,
    pub n_samples: usize,
    pub seed: u64,
    pub out_path: Option<PathBuf>,
    pub format: Format,
    pub view: View,
    pub grid: Option<Grid>,
    pub p_list: Vec<usize>,
    pub tol: f64,
    /// Makes `selftest` report a failing suite.
    pub force_fail: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            d: None,
            e: None,
            n_steps: None,
            n_samples: 100,
            seed: 1,
            out_path: None,
            format: Format::Csv,
            view: View::Physical,
            grid: None,
            p_list: vec![3],
            tol: 1e-9,
            force_fail: false,
        }
    }

    fn parameters(&self) -> Result<(f64, f64), CliError> {
        match (self.d, self.e) {
            (Some(d), Some(e)) if d.is_finite() && e.is_finite() => Ok((d, e)),
            (Some(_), Some(_)) => Err(CliError::Usage("D and E must be finite".into())),
            _ => Err(CliError::Usage(format!(
                "{:?} needs both --D and --E",
                self.command
            ))),
        }
    }

    /// Checks command-specific requirements before anything runs.
    pub fn validate(&self) -> Result<(), CliError> {
        match self.command {
            Command::Classify | Command::Orbit => {
                self.parameters()?;
            }
            Command::Rotation => {
                if self.grid.is_none() {
                    self.parameters()?;
                }
            }
            Command::PeriodScan => {
                if self.grid.is_none() && self.e.is_none() {
                    return Err(CliError::Usage("period-scan needs --E or --grid".into()));
                }
                if self.p_list.is_empty() {
                    return Err(CliError::Usage(
                        "period-scan needs a non-empty --p-list".into(),
                    ));
                }
            }
            Command::Render | Command::Selftest => {}
        }
        if !(self.tol > 0.0) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        if self.format == Format::Svg && !matches!(self.command, Command::Orbit | Command::Render) {
            return Err(CliError::Usage(format!(
                "{:?} has no SVG output",
                self.command
            )));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// A check failed; the message says which.
    CheckFailed(String),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::CheckFailed(_) => 1,
        }
    }
}

/// Fixed-width float formatting: 17 significant digits, `NaN` as an empty field.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    cfg.validate()?;
    log::debug!("running {:?}", cfg.command);
    match cfg.command {
        Command::Classify => cmd_classify(cfg, out),
        Command::Orbit => cmd_orbit(cfg, out),
        Command::Rotation => cmd_rotation(cfg, out),
        Command::PeriodScan => cmd_period_scan(cfg, out),
        Command::Render => cmd_render(cfg, out),
        Command::Selftest => cmd_selftest(cfg, out),
    }
}

#[derive(Debug, Serialize)]
struct ClassifyReport {
    d: f64,
    e: f64,
    class: RealLocusClass,
    canonical_class: RealLocusClass,
    mirrored: bool,
    r: Option<f64>,
    k2: Option<f64>,
    s0: Option<f64>,
    c2: Option<f64>,
    nonempty: bool,
    alpha: Option<f64>,
    flips_component: Option<bool>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn build_classify(d: f64, e: f64) -> ClassifyReport {
    let p = derive_params(d, e);
    let rot = rotation_number(&p).ok();
    ClassifyReport {
        d,
        e,
        class: p.class,
        canonical_class: p.canonical_class,
        mirrored: p.mirrored,
        r: finite(p.r),
        k2: finite(p.k2),
        s0: finite(p.s0),
        c2: finite(p.c2),
        nonempty: is_nonempty(&p),
        alpha: rot.map(|r| r.alpha),
        flips_component: rot.map(|r| r.flips_component),
    }
}

pub fn cmd_classify(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let (d, e) = cfg.parameters()?;
    let rep = build_classify(d, e);
    match cfg.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &rep)?;
            writeln!(out)?;
        }
        _ => {
            let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
            writeln!(out, "key,value")?;
            writeln!(out, "D,{}", fmt_f64(rep.d))?;
            writeln!(out, "E,{}", fmt_f64(rep.e))?;
            writeln!(out, "class,{}", rep.class)?;
            writeln!(out, "canonical_class,{}", rep.canonical_class)?;
            writeln!(out, "mirrored,{}", rep.mirrored)?;
            writeln!(out, "R,{}", opt(rep.r))?;
            writeln!(out, "k2,{}", opt(rep.k2))?;
            writeln!(out, "s0,{}", opt(rep.s0))?;
            writeln!(out, "C2,{}", opt(rep.c2))?;
            writeln!(out, "nonempty,{}", rep.nonempty)?;
            writeln!(out, "alpha,{}", opt(rep.alpha))?;
            writeln!(
                out,
                "flips_component,{}",
                rep.flips_component
                    .map(|f| f.to_string())
                    .unwrap_or_default()
            )?;
        }
    }
    Ok(Outcome::Ok)
}

/// One row of the orbit table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitRow {
    pub step: usize,
    pub x: f64,
    pub a1: f64,
    pub a2: f64,
    pub l: f64,
    /// `D` recomputed from the point minus the nominal `D`.
    pub d_resid: f64,
    /// Defect of `2EL² = |A|² − 1` at the point.
    pub e_check: f64,
    pub theta: f64,
    pub eps: u8,
}

pub fn orbit_rows(orbit: &Orbit) -> Vec<OrbitRow> {
    let p = &orbit.params;
    orbit
        .points
        .iter()
        .enumerate()
        .map(|(step, c)| {
            let angle = angle_of(*c, p).ok();
            OrbitRow {
                step,
                x: c.x,
                a1: c.a1,
                a2: c.a2,
                l: c.angular_momentum(p),
                d_resid: c.measured_d(p) - p.d,
                e_check: c.energy_defect(p),
                theta: angle.map_or(f64::NAN, |a| a.theta),
                eps: angle.map_or(0, |a| a.eps),
            }
        })
        .collect()
}

pub fn write_orbit_csv(rows: &[OrbitRow], out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ORBIT_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.step.to_string(),
            fmt_f64(r.x),
            fmt_f64(r.a1),
            fmt_f64(r.a2),
            fmt_f64(r.l),
            fmt_f64(r.d_resid),
            fmt_f64(r.e_check),
            fmt_f64(r.theta),
            r.eps.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Starting point of command orbits: the first seeded sample.
pub fn start_point(params: &LevelSetParams, seed: u64) -> Result<ConfigPoint, Error> {
    Ok(sample_level_set(params, 1, seed)?[0])
}

pub fn cmd_orbit(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let (d, e) = cfg.parameters()?;
    let params = derive_params(d, e);
    params.regime()?;
    let steps = cfg.n_steps.unwrap_or(6);
    let c0 = start_point(&params, cfg.seed)?;
    let (orbit, outcome) = match iterate_orbit(c0, &params, steps, &IterateOptions::default()) {
        Ok(o) => (o, Outcome::Ok),
        Err(Error::OrbitAbort {
            step,
            reason,
            partial,
        }) => {
            let msg = format!(
                "orbit aborted at step {step} (last valid step {}): {reason}",
                step - 1
            );
            log::error!("{msg}");
            (*partial, Outcome::CheckFailed(msg))
        }
        Err(err) => return Err(err.into()),
    };
    match cfg.format {
        Format::Csv => write_orbit_csv(&orbit_rows(&orbit), out)?,
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                params: &'a LevelSetParams,
                rows: Vec<OrbitRow>,
            }
            serde_json::to_writer_pretty(
                &mut *out,
                &Doc {
                    params: &orbit.params,
                    rows: orbit_rows(&orbit),
                },
            )?;
            writeln!(out)?;
        }
        Format::Svg => {
            let doc = match cfg.view {
                View::Physical => physical_svg(&orbit)?,
                View::LevelSet => level_set_svg(&orbit)?,
            };
            out.write_all(doc.as_bytes())?;
        }
    }
    Ok(outcome)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationRow {
    pub d: f64,
    pub e: f64,
    pub class: RealLocusClass,
    pub alpha: Option<f64>,
    pub alpha_empirical: Option<f64>,
    pub difference: Option<f64>,
}

/// Analytic and empirical rotation numbers at one parameter point; the
/// difference is taken on the circle.
pub fn rotation_row(d: f64, e: f64, steps: usize, seed: u64) -> RotationRow {
    let params = derive_params(d, e);
    let alpha = rotation_number(&params).ok().map(|r| r.alpha);
    let empirical = alpha.and_then(|_| {
        let c0 = start_point(&params, seed).ok()?;
        empirical_rotation_number(&params, c0, steps).ok()
    });
    let difference = match (alpha, empirical) {
        (Some(a), Some(b)) => {
            let x = a - b;
            Some(x - x.round())
        }
        _ => None,
    };
    RotationRow {
        d,
        e,
        class: params.class,
        alpha,
        alpha_empirical: empirical,
        difference,
    }
}

pub fn cmd_rotation(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let steps = cfg.n_steps.unwrap_or(EMPIRICAL_STEPS);
    let rows: Vec<RotationRow> = match cfg.grid {
        Some(g) => {
            let cells: Vec<(f64, f64)> = g
                .e_values()
                .into_iter()
                .flat_map(|e| g.d_values().into_iter().map(move |d| (d, e)))
                .collect();
            cells
                .par_iter()
                .map(|&(d, e)| rotation_row(d, e, steps, cfg.seed))
                .collect()
        }
        None => {
            let (d, e) = cfg.parameters()?;
            let row = rotation_row(d, e, steps, cfg.seed);
            if row.alpha.is_none() {
                return Err(CliError::Numeric(
                    rotation_number(&derive_params(d, e)).unwrap_err(),
                ));
            }
            vec![row]
        }
    };
    match cfg.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &rows)?;
            writeln!(out)?;
        }
        _ => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["D", "E", "class", "alpha", "alpha_empirical", "difference"])?;
            let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
            for r in &rows {
                w.write_record([
                    fmt_f64(r.d),
                    fmt_f64(r.e),
                    r.class.to_string(),
                    opt(r.alpha),
                    opt(r.alpha_empirical),
                    opt(r.difference),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(Outcome::Ok)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub e: f64,
    pub p: usize,
    pub d_root: f64,
    pub period3_residual: f64,
}

/// Periodic loci for each `E` and `p`; `period3_residual` is the relative
/// value of the period-three polynomial at the root.
pub fn period_scan(
    e_values: &[f64],
    p_list: &[usize],
    d_range: (f64, f64),
    tol: f64,
) -> Vec<ScanRow> {
    let jobs: Vec<(f64, usize)> = e_values
        .iter()
        .flat_map(|&e| p_list.iter().map(move |&p| (e, p)))
        .collect();
    jobs.par_iter()
        .map(|&(e, p)| {
            find_periodic_locus(e, p, d_range, tol)
                .into_iter()
                .map(|d| ScanRow {
                    e,
                    p,
                    d_root: d,
                    period3_residual: period3_residual(d, e) / period3_scale(d, e),
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub fn cmd_period_scan(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let (e_values, d_range) = match (cfg.grid, cfg.e) {
        (Some(g), None) => (g.e_values(), (g.d_min, g.d_max)),
        (Some(g), Some(e)) => (vec![e], (g.d_min, g.d_max)),
        (None, Some(e)) => (vec![e], (-6.0, 6.0)),
        (None, None) => unreachable!("validated"),
    };
    if cfg.p_list.contains(&1) {
        log::warn!("p = 1 only occurs on the excluded boundary D + 2E = 0; no rows");
    }
    if cfg.p_list.contains(&2) {
        log::warn!("p = 2 requires 1 + 2DE + 4E^2 = 0, which is excluded; no rows");
    }
    let tol = cfg.tol.min(1e-10);
    let rows = period_scan(&e_values, &cfg.p_list, d_range, tol);
    match cfg.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &rows)?;
            writeln!(out)?;
        }
        _ => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["E", "p", "D_root", "period3_residual"])?;
            for r in &rows {
                w.write_record([
                    fmt_f64(r.e),
                    r.p.to_string(),
                    fmt_f64(r.d_root),
                    fmt_f64(r.period3_residual),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(Outcome::Ok)
}

/// Default class-map window.
pub const RENDER_WINDOW: Grid = Grid {
    d_min: -4.0,
    d_max: 4.0,
    e_min: -2.0,
    e_max: 2.0,
    n: 160,
};

pub fn cmd_render(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let g = cfg.grid.unwrap_or(RENDER_WINDOW);
    match cfg.format {
        Format::Svg => out.write_all(class_map_svg(&g).as_bytes())?,
        _ => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["D", "E", "class"])?;
            for e in g.e_values() {
                for d in g.d_values() {
                    w.write_record([
                        fmt_f64(d),
                        fmt_f64(e),
                        derive_params(d, e).class.to_string(),
                    ])?;
                }
            }
            w.flush()?;
        }
    }
    Ok(Outcome::Ok)
}

pub fn cmd_selftest(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let results = run_selftest(cfg.seed, cfg.force_fail);
    let mut failed = Vec::new();
    for r in &results {
        writeln!(
            out,
            "{:<16} {} {}",
            r.name,
            if r.passed { "ok  " } else { "FAIL" },
            r.detail
        )?;
        if !r.passed {
            failed.push(r.name);
        }
    }
    writeln!(
        out,
        "{} of {} suites passed",
        results.len() - failed.len(),
        results.len()
    )?;
    if failed.is_empty() {
        Ok(Outcome::Ok)
    } else {
        Ok(Outcome::CheckFailed(format!(
            "failed suites: {}",
            failed.join(", ")
        )))
    }
}
