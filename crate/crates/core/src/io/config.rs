//! Line-oriented run configuration.
//!
//! One `section.key = value` pair per line; `#` starts a comment, blank
//! lines are ignored. Lists are comma-separated. Unknown keys are rejected.
//!
//! ```text
//! model.kick_strength = 6.0
//! model.non_hermiticity = 0.9
//! model.hbar_eff = 0.3
//! schedule.t_max = 1000   # kicks
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::otoc::{linear_schedule, log_schedule, DEFAULT_SAMPLE_COUNT};
use crate::phase::{ClassifierConfig, DEFAULT_MU_THRESHOLD};

pub const DEFAULT_N_MODES: usize = 8192;
pub const DEFAULT_SIGMA: f64 = 10.0;
pub const DEFAULT_T_MAX: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    PowerLaw,
    BallisticQuadratic,
    BallisticLinear,
    TimeAvg,
    KScaling,
    Localization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Line,
    Heat,
}

macro_rules! keyword_enum {
    ($ty:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$($ty::$variant),+];

            pub fn as_str(&self) -> &'static str {
                match self {
                    $($ty::$variant => $text),+
                }
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($text => Ok($ty::$variant),)+
                    _ => Err(format!(
                        "expected one of {}",
                        [$($text),+].join(", ")
                    )),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

keyword_enum!(ScheduleKind { Linear => "linear", Log => "log" });
keyword_enum!(FitKind {
    PowerLaw => "power_law",
    BallisticQuadratic => "ballistic_quadratic",
    BallisticLinear => "ballistic_linear",
    TimeAvg => "time_avg",
    KScaling => "k_scaling",
    Localization => "localization",
});
keyword_enum!(PlotKind { Line => "line", Heat => "heat" });

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSection {
    pub kick_strength: f64,
    pub non_hermiticity: f64,
    pub hbar_eff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSection {
    pub t_max: usize,
    pub kind: ScheduleKind,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveSection {
    /// Times at which momentum and angle densities are written.
    pub snapshots: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OtocSection {
    /// Kick strengths for a saturated-OTOC scan; empty disables it.
    pub k_scan: Vec<f64>,
    /// `t_n` of a full forward/backward trace; none disables it.
    pub trace_at: Option<usize>,
    /// Tail-mass guard; `0` disables it.
    pub tail_limit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSection {
    pub mu_threshold: f64,
    pub max_t_max: usize,
    pub max_modes: usize,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub lambda_tol: f64,
    pub k_axis: Vec<f64>,
    pub lambda_axis: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitSection {
    pub input: Option<String>,
    pub kind: FitKind,
    pub x: String,
    pub y: String,
    pub window_lo: Option<f64>,
    pub window_hi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSection {
    pub input: Option<String>,
    pub kind: PlotKind,
    pub x: String,
    /// Line plots: one series per column. Heat plots: the row coordinate.
    pub y: Vec<String>,
    /// Heat plots only: the cell value.
    pub value: String,
    pub log_x: bool,
    pub log_y: bool,
    pub title: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSection {
    pub dir: String,
    /// Also emit an SVG next to each table.
    pub svg: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSection,
    pub n_modes: usize,
    pub sigma: f64,
    pub schedule: ScheduleSection,
    pub evolve: EvolveSection,
    pub otoc: OtocSection,
    pub phase: PhaseSection,
    pub fit: FitSection,
    pub plot: PlotSection,
    pub output: OutputSection,
}

impl RunConfig {
    /// Defaults for everything but the model.
    pub fn with_model(kick_strength: f64, non_hermiticity: f64, hbar_eff: f64) -> Self {
        Self {
            model: ModelSection {
                kick_strength,
                non_hermiticity,
                hbar_eff,
            },
            n_modes: DEFAULT_N_MODES,
            sigma: DEFAULT_SIGMA,
            schedule: ScheduleSection {
                t_max: DEFAULT_T_MAX,
                kind: ScheduleKind::Log,
                count: DEFAULT_SAMPLE_COUNT,
            },
            evolve: EvolveSection { snapshots: vec![] },
            otoc: OtocSection {
                k_scan: vec![],
                trace_at: None,
                tail_limit: crate::state::TAIL_MASS_LIMIT,
            },
            phase: PhaseSection {
                mu_threshold: DEFAULT_MU_THRESHOLD,
                max_t_max: 8000,
                max_modes: 1 << 18,
                lambda_lo: 0.0,
                lambda_hi: 0.3,
                lambda_tol: 1e-4,
                k_axis: vec![],
                lambda_axis: vec![],
            },
            fit: FitSection {
                input: None,
                kind: FitKind::PowerLaw,
                x: "t_n".into(),
                y: "c".into(),
                window_lo: None,
                window_hi: None,
            },
            plot: PlotSection {
                input: None,
                kind: PlotKind::Line,
                x: "t_n".into(),
                y: vec!["c".into()],
                value: "mu".into(),
                log_x: false,
                log_y: false,
                title: String::new(),
            },
            output: OutputSection {
                dir: "out".into(),
                svg: false,
            },
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(
            self.model.kick_strength,
            self.model.non_hermiticity,
            self.model.hbar_eff,
        )
    }

    pub fn sample_times(&self) -> Vec<usize> {
        match self.schedule.kind {
            ScheduleKind::Linear => linear_schedule(self.schedule.t_max, self.schedule.count),
            ScheduleKind::Log => log_schedule(self.schedule.t_max, self.schedule.count),
        }
    }

    pub fn classifier(&self) -> ClassifierConfig {
        ClassifierConfig {
            sigma: self.sigma,
            t_max: self.schedule.t_max,
            max_t_max: self.phase.max_t_max,
            mu_threshold: self.phase.mu_threshold,
            n_modes: self.n_modes,
            max_modes: self.phase.max_modes,
        }
    }

    /// Canonical text form: every key, fixed order. Parsing it gives back
    /// an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |key: &str, value: String| {
            let _ = writeln!(out, "{key} = {value}");
        };
        put("model.kick_strength", real(self.model.kick_strength));
        put("model.non_hermiticity", real(self.model.non_hermiticity));
        put("model.hbar_eff", real(self.model.hbar_eff));
        put("basis.n_modes", self.n_modes.to_string());
        put("initial.sigma", real(self.sigma));
        put("schedule.t_max", self.schedule.t_max.to_string());
        put("schedule.kind", self.schedule.kind.to_string());
        put("schedule.count", self.schedule.count.to_string());
        put("evolve.snapshots", list(&self.evolve.snapshots, |t| t.to_string()));
        put("otoc.k_scan", list(&self.otoc.k_scan, |k| real(*k)));
        if let Some(t) = self.otoc.trace_at {
            put("otoc.trace_at", t.to_string());
        }
        put("otoc.tail_limit", real(self.otoc.tail_limit));
        put("phase.mu_threshold", real(self.phase.mu_threshold));
        put("phase.max_t_max", self.phase.max_t_max.to_string());
        put("phase.max_modes", self.phase.max_modes.to_string());
        put("phase.lambda_lo", real(self.phase.lambda_lo));
        put("phase.lambda_hi", real(self.phase.lambda_hi));
        put("phase.lambda_tol", real(self.phase.lambda_tol));
        put("phase.k_axis", list(&self.phase.k_axis, |k| real(*k)));
        put("phase.lambda_axis", list(&self.phase.lambda_axis, |l| real(*l)));
        if let Some(input) = &self.fit.input {
            put("fit.input", input.clone());
        }
        put("fit.kind", self.fit.kind.to_string());
        put("fit.x", self.fit.x.clone());
        put("fit.y", self.fit.y.clone());
        if let Some(lo) = self.fit.window_lo {
            put("fit.window_lo", real(lo));
        }
        if let Some(hi) = self.fit.window_hi {
            put("fit.window_hi", real(hi));
        }
        if let Some(input) = &self.plot.input {
            put("plot.input", input.clone());
        }
        put("plot.kind", self.plot.kind.to_string());
        put("plot.x", self.plot.x.clone());
        put("plot.y", self.plot.y.join(", "));
        put("plot.value", self.plot.value.clone());
        put("plot.log_x", self.plot.log_x.to_string());
        put("plot.log_y", self.plot.log_y.to_string());
        put("plot.title", self.plot.title.clone());
        put("output.dir", self.output.dir.clone());
        put("output.svg", self.output.svg.to_string());
        out
    }

    /// Hex SHA-256 of [`RunConfig::to_text`].
    pub fn hash(&self) -> String {
        Sha256::digest(self.to_text().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn real(x: f64) -> String {
    format!("{x:?}")
}

fn list<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(", ")
}

/// Raw `key -> (value, line)` pairs; line 0 marks a command-line override.
#[derive(Debug, Default)]
struct Raw {
    entries: BTreeMap<String, (String, usize)>,
}

impl Raw {
    fn parse(text: &str) -> Result<Self> {
        let mut raw = Raw::default();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = split_pair(body).map_err(|message| Error::ConfigSyntax {
                line: line_no,
                message,
            })?;
            if raw.entries.contains_key(&key) {
                return Err(Error::ConfigSyntax {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
            raw.entries.insert(key, (value, line_no));
        }
        Ok(raw)
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn parsed<T>(
        &mut self,
        key: &str,
        parse: impl Fn(&str) -> std::result::Result<T, String>,
    ) -> Result<Option<(T, usize)>> {
        match self.take(key) {
            None => Ok(None),
            Some((value, line)) => parse(&value)
                .map(|v| Some((v, line)))
                .map_err(|reason| Error::ConfigValue {
                    key: key.into(),
                    line,
                    reason,
                }),
        }
    }

    fn value<T: FromStr>(&mut self, key: &str, default: T) -> Result<(T, usize)>
    where
        T::Err: fmt::Display,
    {
        Ok(self
            .parsed(key, |s| s.parse::<T>().map_err(|e| format!("`{s}`: {e}")))?
            .unwrap_or((default, 0)))
    }

    fn optional<T: FromStr>(&mut self, key: &str) -> Result<Option<(T, usize)>>
    where
        T::Err: fmt::Display,
    {
        self.parsed(key, |s| s.parse::<T>().map_err(|e| format!("`{s}`: {e}")))
    }

    fn required<T: FromStr>(&mut self, key: &str) -> Result<(T, usize)>
    where
        T::Err: fmt::Display,
    {
        self.optional(key)?
            .ok_or_else(|| Error::MissingKey(key.into()))
    }

    fn list<T: FromStr>(&mut self, key: &str) -> Result<(Vec<T>, usize)>
    where
        T::Err: fmt::Display,
    {
        Ok(self
            .parsed(key, |s| {
                s.split(',')
                    .map(str::trim)
                    .filter(|item| !item.is_empty())
                    .map(|item| item.parse::<T>().map_err(|e| format!("`{item}`: {e}")))
                    .collect()
            })?
            .unwrap_or((Vec::new(), 0)))
    }

    fn text(&mut self, key: &str, default: &str) -> (String, usize) {
        self.take(key).unwrap_or((default.into(), 0))
    }
}

fn split_pair(body: &str) -> std::result::Result<(String, String), String> {
    let (key, value) = body
        .split_once('=')
        .ok_or_else(|| format!("expected `key = value`, got `{body}`"))?;
    let key = key.trim();
    let valid = !key.is_empty()
        && key
            .split('.')
            .all(|part| !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'));
    if !valid {
        return Err(format!("malformed key `{key}`"));
    }
    Ok((key.to_string(), value.trim().to_string()))
}

fn check(ok: bool, key: &str, line: usize, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::ConfigValue {
            key: key.into(),
            line,
            reason: reason.into(),
        })
    }
}

fn increasing(axis: &[f64]) -> bool {
    axis.windows(2).all(|w| w[0] < w[1]) && axis.iter().all(|x| x.is_finite())
}

/// Parses and validates a config.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, &[])
}

/// Like [`parse_config`], with `key = value` overrides applied on top.
pub fn parse_config_with(text: &str, overrides: &[(String, String)]) -> Result<RunConfig> {
    let mut raw = Raw::parse(text)?;
    for (key, value) in overrides {
        let (key, value) = split_pair(&format!("{key} = {value}")).map_err(|message| {
            Error::ConfigSyntax { line: 0, message }
        })?;
        raw.entries.insert(key, (value, 0));
    }
    if let Some(key) = raw.entries.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(Error::UnknownKey {
            key: key.clone(),
            line: raw.entries[key].1,
        });
    }

    let (kick_strength, l) = raw.required::<f64>("model.kick_strength")?;
    check(kick_strength.is_finite(), "model.kick_strength", l, "must be finite")?;
    let (non_hermiticity, l) = raw.value("model.non_hermiticity", 0.0f64)?;
    check(
        non_hermiticity.is_finite() && non_hermiticity >= 0.0,
        "model.non_hermiticity",
        l,
        "must be finite and >= 0",
    )?;
    let (hbar_eff, l) = raw.required::<f64>("model.hbar_eff")?;
    check(hbar_eff.is_finite() && hbar_eff > 0.0, "model.hbar_eff", l, "must be finite and > 0")?;
    let mut cfg = RunConfig::with_model(kick_strength, non_hermiticity, hbar_eff);

    let (n, l) = raw.value("basis.n_modes", DEFAULT_N_MODES)?;
    check(n >= 4 && n % 2 == 0, "basis.n_modes", l, "must be even and >= 4")?;
    cfg.n_modes = n;
    let (sigma, l) = raw.value("initial.sigma", DEFAULT_SIGMA)?;
    check(sigma.is_finite() && sigma > 0.0, "initial.sigma", l, "must be finite and > 0")?;
    cfg.sigma = sigma;

    let (t_max, l) = raw.value("schedule.t_max", DEFAULT_T_MAX)?;
    check(t_max >= 1, "schedule.t_max", l, "must be >= 1")?;
    cfg.schedule.t_max = t_max;
    cfg.schedule.kind = raw.value("schedule.kind", ScheduleKind::Log)?.0;
    let (count, l) = raw.value("schedule.count", DEFAULT_SAMPLE_COUNT)?;
    check(count >= 1, "schedule.count", l, "must be >= 1")?;
    cfg.schedule.count = count;

    let (snapshots, l) = raw.list::<usize>("evolve.snapshots")?;
    check(
        snapshots.iter().all(|&t| t <= t_max),
        "evolve.snapshots",
        l,
        "snapshot beyond schedule.t_max",
    )?;
    cfg.evolve.snapshots = snapshots;

    let (k_scan, l) = raw.list::<f64>("otoc.k_scan")?;
    check(increasing(&k_scan), "otoc.k_scan", l, "must be strictly increasing")?;
    cfg.otoc.k_scan = k_scan;
    if let Some((t, l)) = raw.optional::<usize>("otoc.trace_at")? {
        check(t >= 1 && t <= t_max, "otoc.trace_at", l, "must lie in 1..=schedule.t_max")?;
        cfg.otoc.trace_at = Some(t);
    }
    let (tail, l) = raw.value("otoc.tail_limit", cfg.otoc.tail_limit)?;
    check(tail.is_finite() && tail >= 0.0, "otoc.tail_limit", l, "must be finite and >= 0")?;
    cfg.otoc.tail_limit = tail;

    let (mu, l) = raw.value("phase.mu_threshold", DEFAULT_MU_THRESHOLD)?;
    check(mu.is_finite() && mu > 0.0, "phase.mu_threshold", l, "must be finite and > 0")?;
    cfg.phase.mu_threshold = mu;
    let (max_t, l) = raw.value("phase.max_t_max", cfg.phase.max_t_max.max(t_max))?;
    check(max_t >= t_max, "phase.max_t_max", l, "must be >= schedule.t_max")?;
    cfg.phase.max_t_max = max_t;
    let (max_modes, l) = raw.value("phase.max_modes", cfg.phase.max_modes.max(n))?;
    check(max_modes >= n, "phase.max_modes", l, "must be >= basis.n_modes")?;
    cfg.phase.max_modes = max_modes;
    let (lo, _) = raw.value("phase.lambda_lo", cfg.phase.lambda_lo)?;
    let (hi, l) = raw.value("phase.lambda_hi", cfg.phase.lambda_hi)?;
    check(
        lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi,
        "phase.lambda_hi",
        l,
        "need 0 <= phase.lambda_lo < phase.lambda_hi",
    )?;
    cfg.phase.lambda_lo = lo;
    cfg.phase.lambda_hi = hi;
    let (tol, l) = raw.value("phase.lambda_tol", cfg.phase.lambda_tol)?;
    check(tol.is_finite() && tol > 0.0, "phase.lambda_tol", l, "must be finite and > 0")?;
    cfg.phase.lambda_tol = tol;
    let (k_axis, l) = raw.list::<f64>("phase.k_axis")?;
    check(increasing(&k_axis), "phase.k_axis", l, "must be strictly increasing")?;
    cfg.phase.k_axis = k_axis;
    let (lambda_axis, l) = raw.list::<f64>("phase.lambda_axis")?;
    check(
        increasing(&lambda_axis) && lambda_axis.iter().all(|&x| x >= 0.0),
        "phase.lambda_axis",
        l,
        "must be strictly increasing and >= 0",
    )?;
    cfg.phase.lambda_axis = lambda_axis;

    cfg.fit.input = raw.take("fit.input").map(|v| v.0);
    cfg.fit.kind = raw.value("fit.kind", FitKind::PowerLaw)?.0;
    cfg.fit.x = raw.text("fit.x", "t_n").0;
    cfg.fit.y = raw.text("fit.y", "c").0;
    cfg.fit.window_lo = raw.optional::<f64>("fit.window_lo")?.map(|v| v.0);
    if let Some((hi, l)) = raw.optional::<f64>("fit.window_hi")? {
        check(
            cfg.fit.window_lo.map_or(true, |lo| lo < hi),
            "fit.window_hi",
            l,
            "must exceed fit.window_lo",
        )?;
        cfg.fit.window_hi = Some(hi);
    }

    cfg.plot.input = raw.take("plot.input").map(|v| v.0);
    cfg.plot.kind = raw.value("plot.kind", PlotKind::Line)?.0;
    cfg.plot.x = raw.text("plot.x", "t_n").0;
    let (y, l) = raw.list::<String>("plot.y")?;
    if l != 0 {
        check(!y.is_empty(), "plot.y", l, "needs at least one column")?;
        cfg.plot.y = y;
    }
    cfg.plot.value = raw.text("plot.value", "mu").0;
    cfg.plot.log_x = raw.value("plot.log_x", false)?.0;
    cfg.plot.log_y = raw.value("plot.log_y", false)?.0;
    cfg.plot.title = raw.text("plot.title", "").0;

    cfg.output.dir = raw.text("output.dir", "out").0;
    cfg.output.svg = raw.value("output.svg", false)?.0;

    debug_assert!(raw.entries.is_empty(), "unconsumed keys: {:?}", raw.entries);
    Ok(cfg)
}

pub const KNOWN_KEYS: &[&str] = &[
    "model.kick_strength",
    "model.non_hermiticity",
    "model.hbar_eff",
    "basis.n_modes",
    "initial.sigma",
    "schedule.t_max",
    "schedule.kind",
    "schedule.count",
    "evolve.snapshots",
    "otoc.k_scan",
    "otoc.trace_at",
    "otoc.tail_limit",
    "phase.mu_threshold",
    "phase.max_t_max",
    "phase.max_modes",
    "phase.lambda_lo",
    "phase.lambda_hi",
    "phase.lambda_tol",
    "phase.k_axis",
    "phase.lambda_axis",
    "fit.input",
    "fit.kind",
    "fit.x",
    "fit.y",
    "fit.window_lo",
    "fit.window_hi",
    "plot.input",
    "plot.kind",
    "plot.x",
    "plot.y",
    "plot.value",
    "plot.log_x",
    "plot.log_y",
    "plot.title",
    "output.dir",
    "output.svg",
];
