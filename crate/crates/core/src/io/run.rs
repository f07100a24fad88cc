//! Subcommands: each one runs a module pipeline from a [`RunConfig`] and
//! writes its tables (and optionally SVGs) into an output directory.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::fit::{self, BallisticMode, FitResult, Window};
use crate::model::ModelParams;
use crate::otoc::{
    backward_pass, otoc_series, reversal_ratio_series, ForwardTrajectory, Insertion, OtocSeries,
    SeriesOptions, StoragePolicy, TrajectoryOptions,
};
use crate::phase::{evolve_tracked, find_lambda_c, scan_diagram, Classification};

use super::config::{FitKind, PlotKind, RunConfig};
use super::svg::{HeatPlot, LinePlot, Series};
use super::table::{read_table, write_atomic, write_table, Column, ResultTable, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Evolve,
    Otoc,
    PhaseScan,
    LambdaC,
    Fit,
    Plot,
}

impl Task {
    pub const ALL: [Task; 6] = [
        Task::Evolve,
        Task::Otoc,
        Task::PhaseScan,
        Task::LambdaC,
        Task::Fit,
        Task::Plot,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Task::Evolve => "evolve",
            Task::Otoc => "otoc",
            Task::PhaseScan => "phase-scan",
            Task::LambdaC => "lambda-c",
            Task::Fit => "fit",
            Task::Plot => "plot",
        }
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::ConfigSyntax {
                line: 0,
                message: format!("unknown subcommand `{s}`"),
            })
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Files written by a run, in creation order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    task: Task,
    out: &'a Path,
    written: RunOutput,
}

impl Ctx<'_> {
    fn stamp(&self, table: &mut ResultTable) {
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        table.set_meta("tool", "ptkr");
        table.set_meta("version", env!("CARGO_PKG_VERSION"));
        table.set_meta("task", self.task.as_str());
        table.set_meta("config_sha256", self.cfg.hash());
        table.set_meta("created_unix", created.to_string());
    }

    fn table(&mut self, name: &str, mut table: ResultTable) -> Result<()> {
        self.stamp(&mut table);
        let path = self.out.join(name);
        write_table(&path, &table)?;
        self.written.files.push(path);
        Ok(())
    }

    fn svg(&mut self, name: &str, svg: String) -> Result<()> {
        let path = self.out.join(name);
        write_atomic(&path, svg.as_bytes())?;
        self.written.files.push(path);
        Ok(())
    }
}

/// Runs one subcommand. On success every artifact is in `out`; a failing
/// run may still leave the tables it completed.
pub fn run_subcommand(task: Task, cfg: &RunConfig, out: &Path) -> Result<RunOutput> {
    let mut ctx = Ctx {
        cfg,
        task,
        out,
        written: RunOutput::default(),
    };
    write_atomic(&out.join("run.conf"), cfg.to_text().as_bytes())?;
    match task {
        Task::Evolve => evolve(&mut ctx)?,
        Task::Otoc => otoc(&mut ctx)?,
        Task::PhaseScan => phase_scan(&mut ctx)?,
        Task::LambdaC => lambda_c(&mut ctx)?,
        Task::Fit => run_fit(&mut ctx)?,
        Task::Plot => plot(&mut ctx)?,
    }
    Ok(ctx.written)
}

/// Machine-readable failure record.
pub fn error_record(err: &Error) -> serde_json::Value {
    serde_json::json!({
        "status": err.exit_code(),
        "kind": err.kind(),
        "message": err.to_string(),
    })
}

fn basis(cfg: &RunConfig) -> Result<BasisSpec> {
    BasisSpec::new(cfg.n_modes, cfg.model.hbar_eff)
}

fn tail_limit(cfg: &RunConfig) -> Option<f64> {
    (cfg.otoc.tail_limit > 0.0).then_some(cfg.otoc.tail_limit)
}

fn line_svg(title: &str, table: &ResultTable, x: &str, ys: &[&str], log: bool) -> Result<String> {
    let series = ys
        .iter()
        .map(|y| {
            Ok(Series {
                label: (*y).into(),
                points: table.pairs(x, y)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LinePlot {
        title: title.into(),
        x_label: x.into(),
        y_label: ys.join(", "),
        log_x: log,
        log_y: log,
        series,
    }
    .render())
}

fn evolve(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let params = cfg.params()?;
    let basis = basis(cfg)?;
    let snapshots: BTreeSet<usize> = cfg.evolve.snapshots.iter().copied().collect();
    let mut table = ResultTable::new(vec![
        Column::int("t"),
        Column::real("log_norm"),
        Column::real("mean_p"),
        Column::real("mean_p2"),
        Column::real("mean_p4"),
    ]);
    let mut rows = Vec::with_capacity(cfg.schedule.t_max + 1);
    let mut densities = Vec::new();
    evolve_tracked(params, basis, cfg.sigma, cfg.schedule.t_max, |t, state, ln| {
        let m = state.moments();
        rows.push(vec![t.into(), ln.into(), m.mean_p.into(), m.mean_p2.into(), m.mean_p4.into()]);
        if snapshots.contains(&t) {
            densities.push((t, state.clone()));
        }
    })?;
    for row in rows {
        table.push_row(row)?;
    }
    for (t, state) in densities {
        ctx.table(&format!("density_t{t}.csv"), momentum_table(&[("density", &state)])?)?;
        ctx.table(&format!("angle_t{t}.csv"), angle_table(&[("density", &state)])?)?;
    }
    if cfg.output.svg {
        let svg = line_svg("log norm", &table, "t", &["log_norm"], false)?;
        ctx.svg("evolve.svg", svg)?;
    }
    ctx.table("evolve.csv", table)
}

/// `p` plus one normalized momentum density column per named state.
fn momentum_table(states: &[(&str, &crate::WaveState)]) -> Result<ResultTable> {
    let mut cols = vec![Column::real("p")];
    cols.extend(states.iter().map(|(name, _)| Column::real(name)));
    let mut table = ResultTable::new(cols);
    let profiles: Vec<Vec<(f64, f64)>> = states.iter().map(|(_, s)| s.momentum_profile()).collect();
    for i in 0..profiles[0].len() {
        let mut row = vec![Value::Real(profiles[0][i].0)];
        row.extend(profiles.iter().map(|p| Value::Real(p[i].1)));
        table.push_row(row)?;
    }
    Ok(table)
}

fn angle_table(states: &[(&str, &crate::WaveState)]) -> Result<ResultTable> {
    let mut cols = vec![Column::real("theta")];
    cols.extend(states.iter().map(|(name, _)| Column::real(name)));
    let mut table = ResultTable::new(cols);
    let dens: Vec<Vec<f64>> = states.iter().map(|(_, s)| s.observables().angle_density).collect();
    let thetas = states[0].1.basis().angles();
    for (i, theta) in thetas.into_iter().enumerate() {
        let mut row = vec![Value::Real(theta)];
        row.extend(dens.iter().map(|d| Value::Real(d[i])));
        table.push_row(row)?;
    }
    Ok(table)
}

fn otoc_table(series: &OtocSeries) -> Result<ResultTable> {
    let mut cols = vec![Column::int("t_n"), Column::real("c1"), Column::real("c2")];
    cols.extend(Column::complex("c3"));
    cols.extend([
        Column::real("c"),
        Column::real("p2_reversed"),
        Column::real("norm_reversed"),
        Column::real("delta_12"),
        Column::real("delta_13"),
    ]);
    let mut table = ResultTable::new(cols);
    table.set_meta("kick_strength", format!("{:?}", series.params.kick_strength));
    table.set_meta("non_hermiticity", format!("{:?}", series.params.non_hermiticity));
    table.set_meta("hbar_eff", format!("{:?}", series.params.hbar_eff));
    table.set_meta("n_modes", series.n_modes.to_string());
    for s in series.samples() {
        let p = &s.point;
        let [re, im] = Value::complex(p.c3);
        table.push_row(vec![
            p.t_n.into(),
            p.c1.into(),
            p.c2.into(),
            re,
            im,
            p.c.into(),
            s.p2_reversed.into(),
            s.norm_reversed.into(),
            p.delta_12().into(),
            p.delta_13().into(),
        ])?;
    }
    Ok(table)
}

fn series_options(cfg: &RunConfig) -> SeriesOptions {
    SeriesOptions {
        tail_limit: tail_limit(cfg),
        ..Default::default()
    }
}

fn otoc(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let params = cfg.params()?;
    let basis = basis(cfg)?;
    let series = otoc_series(params, basis, cfg.sigma, &cfg.sample_times(), &series_options(cfg))?;
    let table = otoc_table(&series)?;
    if cfg.output.svg {
        let svg = line_svg("OTOC", &table, "t_n", &["c", "c1", "c2"], true)?;
        ctx.svg("otoc.svg", svg)?;
    }
    ctx.table("otoc.csv", table)?;
    if let Some((_, err)) = series.failures().next() {
        return Err(err.clone());
    }
    if !cfg.otoc.k_scan.is_empty() {
        k_scan(ctx, basis)?;
    }
    if let Some(t_n) = cfg.otoc.trace_at {
        trace(ctx, params, basis, t_n)?;
    }
    Ok(())
}

/// Saturated OTOC `C-bar` (mean over the last half of the schedule) per
/// kick strength.
fn k_scan(ctx: &mut Ctx, basis: BasisSpec) -> Result<()> {
    let cfg = ctx.cfg;
    let window = Window::last_half(cfg.schedule.t_max as f64);
    let mut table = ResultTable::new(vec![
        Column::real("kick_strength"),
        Column::real("c_bar"),
        Column::real("norm_reversed_bar"),
    ]);
    for &k in &cfg.otoc.k_scan {
        let params = ModelParams::new(k, cfg.model.non_hermiticity, cfg.model.hbar_eff)?;
        let series =
            otoc_series(params, basis, cfg.sigma, &cfg.sample_times(), &series_options(cfg))?;
        if let Some((_, err)) = series.failures().next() {
            return Err(err.clone());
        }
        let c = fit::time_avg(&series.column(0, usize::MAX, |s| s.point.c), window)?;
        let nr = fit::time_avg(&series.column(0, usize::MAX, |s| s.norm_reversed), window)?;
        table.push_row(vec![k.into(), c.into(), nr.into()])?;
    }
    ctx.table("k_scan.csv", table)
}

/// Forward and backward moments around one reversal, the reversal ratio,
/// and densities at `t_n` and at the end of the reversal.
fn trace(ctx: &mut Ctx, params: ModelParams, basis: BasisSpec, t_n: usize) -> Result<()> {
    let cfg = ctx.cfg;
    let traj = ForwardTrajectory::build(
        params,
        basis,
        cfg.sigma,
        t_n,
        TrajectoryOptions {
            storage: StoragePolicy::At(BTreeSet::from([t_n])),
            tail_limit: tail_limit(cfg),
        },
    )?;
    let pass = backward_pass(&traj, t_n, Insertion::Momentum)?;
    let mut table = ResultTable::new(vec![
        Column::int("time"),
        Column::text("leg"),
        Column::real("mean_p"),
        Column::real("mean_p2"),
        Column::real("norm_sqr"),
    ]);
    for (t, m) in traj.psi_moments().iter().enumerate() {
        table.push_row(vec![
            t.into(),
            "forward".into(),
            m.mean_p.into(),
            m.mean_p2.into(),
            m.norm_sqr.into(),
        ])?;
    }
    for b in &pass.series {
        table.push_row(vec![
            b.doubled_time.into(),
            "backward".into(),
            b.mean_p.into(),
            b.mean_p2.into(),
            b.norm_sqr.into(),
        ])?;
    }
    ctx.table("trace.csv", table)?;

    let mut ratio = ResultTable::new(vec![
        Column::int("time"),
        Column::int("doubled_time"),
        Column::real("ratio"),
    ]);
    for r in reversal_ratio_series(&traj, &pass) {
        ratio.push_row(vec![r.time.into(), r.doubled_time.into(), r.ratio.into()])?;
    }
    ctx.table("reversal_ratio.csv", ratio)?;

    let (forward, _) = traj.states_at(t_n)?;
    let kicked = forward.apply_p()?;
    let states = [
        ("forward", &forward),
        ("kicked", &kicked),
        ("reversed", &pass.psi_r),
    ];
    ctx.table("trace_density.csv", momentum_table(&states)?)?;
    ctx.table("trace_angle.csv", angle_table(&states)?)
}

fn classification_row(k: f64, lambda: f64, c: &Classification) -> Vec<Value> {
    vec![
        k.into(),
        lambda.into(),
        c.mu.into(),
        c.r_squared.into(),
        c.log_norm_bar.into(),
        c.label.as_str().into(),
        c.t_max.into(),
        c.n_modes.into(),
    ]
}

fn classification_columns() -> Vec<Column> {
    vec![
        Column::real("kick_strength"),
        Column::real("non_hermiticity"),
        Column::real("mu"),
        Column::real("r_squared"),
        Column::real("log_norm_bar"),
        Column::text("label"),
        Column::int("t_max"),
        Column::int("n_modes"),
    ]
}

fn phase_scan(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    if cfg.phase.k_axis.is_empty() {
        return Err(Error::MissingKey("phase.k_axis".into()));
    }
    if cfg.phase.lambda_axis.is_empty() {
        return Err(Error::MissingKey("phase.lambda_axis".into()));
    }
    let diagram = scan_diagram(
        &cfg.phase.k_axis,
        &cfg.phase.lambda_axis,
        cfg.model.hbar_eff,
        &cfg.classifier(),
    )?;
    let mut table = ResultTable::new(classification_columns());
    table.set_meta("hbar_eff", format!("{:?}", diagram.hbar_eff));
    table.set_meta("mu_threshold", format!("{:?}", diagram.mu_threshold));
    for cell in &diagram.cells {
        table.push_row(classification_row(
            cell.kick_strength,
            cell.non_hermiticity,
            &cell.classification,
        ))?;
    }
    if cfg.output.svg {
        let svg = HeatPlot {
            title: "growth rate".into(),
            x_label: "non_hermiticity".into(),
            y_label: "kick_strength".into(),
            cells: diagram
                .cells
                .iter()
                .map(|c| (c.non_hermiticity, c.kick_strength, c.classification.mu))
                .collect(),
        }
        .render();
        ctx.svg("phase.svg", svg)?;
    }
    ctx.table("phase.csv", table)
}

fn lambda_c(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let p = &cfg.phase;
    let result = find_lambda_c(
        cfg.model.kick_strength,
        cfg.model.hbar_eff,
        p.lambda_lo,
        p.lambda_hi,
        p.lambda_tol,
        &cfg.classifier(),
    )?;
    let mut table = ResultTable::new(vec![
        Column::real("kick_strength"),
        Column::real("hbar_eff"),
        Column::real("lambda_c"),
        Column::real("bracket_lo"),
        Column::real("bracket_hi"),
        Column::int("evaluations"),
    ]);
    table.push_row(vec![
        cfg.model.kick_strength.into(),
        cfg.model.hbar_eff.into(),
        result.lambda_c.into(),
        result.bracket.0.into(),
        result.bracket.1.into(),
        result.evaluations.len().into(),
    ])?;
    ctx.table("lambda_c.csv", table)?;
    let mut evals = ResultTable::new(classification_columns());
    for (lambda, c) in &result.evaluations {
        evals.push_row(classification_row(cfg.model.kick_strength, *lambda, c))?;
    }
    ctx.table("lambda_c_evaluations.csv", evals)
}

fn input_table(key: &str, input: &Option<String>) -> Result<ResultTable> {
    let path = input.as_ref().ok_or_else(|| Error::MissingKey(key.into()))?;
    read_table(Path::new(path))
}

fn fit_window(cfg: &RunConfig, default: Window) -> Window {
    match (cfg.fit.window_lo, cfg.fit.window_hi) {
        (None, None) => default,
        (lo, hi) => Window::new(lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY)),
    }
}

/// Runs the configured fit on `(x, y)` pairs.
pub fn fit_pairs(cfg: &RunConfig, pts: &[(f64, f64)]) -> Result<FitResult> {
    let x_max = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let window = |default| fit_window(cfg, default);
    match cfg.fit.kind {
        FitKind::PowerLaw => fit::fit_power_law(pts, window(Window::power_law_default(x_max))),
        FitKind::BallisticQuadratic => fit::fit_ballistic_rate(
            pts,
            BallisticMode::Quadratic,
            window(Window::power_law_default(x_max)),
        ),
        FitKind::BallisticLinear => fit::fit_ballistic_rate(
            pts,
            BallisticMode::Linear,
            window(Window::power_law_default(x_max)),
        ),
        FitKind::TimeAvg => {
            let w = window(Window::last_half(x_max));
            let value = fit::time_avg(pts, w)?;
            let sel = w.select(pts);
            Ok(FitResult {
                value,
                prefactor: f64::NAN,
                r_squared: f64::NAN,
                window: Window::new(sel[0].0, sel[sel.len() - 1].0),
                points: sel.len(),
            })
        }
        FitKind::KScaling => fit::k_scaling_exponent(&window(Window::ALL).select(pts)),
        FitKind::Localization => fit::fit_localization_length(&window(Window::ALL).select(pts)),
    }
}

fn run_fit(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let input = input_table("fit.input", &cfg.fit.input)?;
    let pts = input.pairs(&cfg.fit.x, &cfg.fit.y)?;
    let r = fit_pairs(cfg, &pts)?;
    let mut table = ResultTable::new(vec![
        Column::text("kind"),
        Column::text("x"),
        Column::text("y"),
        Column::real("value"),
        Column::real("prefactor"),
        Column::real("r_squared"),
        Column::real("window_lo"),
        Column::real("window_hi"),
        Column::int("points"),
    ]);
    table.push_row(vec![
        cfg.fit.kind.as_str().into(),
        cfg.fit.x.as_str().into(),
        cfg.fit.y.as_str().into(),
        r.value.into(),
        r.prefactor.into(),
        r.r_squared.into(),
        r.window.lo.into(),
        r.window.hi.into(),
        r.points.into(),
    ])?;
    ctx.table("fit.csv", table)
}

fn plot(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let p = &cfg.plot;
    let input = input_table("plot.input", &p.input)?;
    let svg = match p.kind {
        PlotKind::Line => LinePlot {
            title: p.title.clone(),
            x_label: p.x.clone(),
            y_label: p.y.join(", "),
            log_x: p.log_x,
            log_y: p.log_y,
            series: p
                .y
                .iter()
                .map(|y| {
                    Ok(Series {
                        label: y.clone(),
                        points: input.pairs(&p.x, y)?,
                    })
                })
                .collect::<Result<_>>()?,
        }
        .render(),
        PlotKind::Heat => {
            let xs = input.numeric(&p.x)?;
            let ys = input.numeric(&p.y[0])?;
            let values = heat_values(&input, &p.value)?;
            HeatPlot {
                title: p.title.clone(),
                x_label: p.x.clone(),
                y_label: p.y[0].clone(),
                cells: xs
                    .into_iter()
                    .zip(ys)
                    .zip(values)
                    .map(|((x, y), v)| (x, y, v))
                    .collect(),
            }
            .render()
        }
    };
    let stem = input
        .meta("task")
        .map_or_else(|| "plot".to_string(), |t| format!("{t}_plot"));
    ctx.svg(&format!("{stem}.svg"), svg)
}

/// Numeric columns as-is; text columns as the rank of each distinct label.
fn heat_values(table: &ResultTable, name: &str) -> Result<Vec<f64>> {
    match table.numeric(name) {
        Ok(v) => Ok(v),
        Err(_) => {
            let labels = table.text(name)?;
            let mut distinct = labels.clone();
            distinct.sort();
            distinct.dedup();
            Ok(labels
                .iter()
                .map(|l| distinct.iter().position(|d| d == l).unwrap_or(0) as f64)
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_names_round_trip() {
        for t in Task::ALL {
            assert_eq!(t.as_str().parse::<Task>().unwrap(), t);
        }
        assert!("simulate".parse::<Task>().is_err());
    }

    #[test]
    fn error_record_fields() {
        let rec = error_record(&Error::GridOverflow {
            step: 7,
            tail_mass: 1e-6,
            limit: 1e-8,
        });
        assert_eq!(rec["status"], 3);
        assert_eq!(rec["kind"], "grid_overflow");
    }
}
