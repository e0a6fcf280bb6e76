//! Run configuration shared by every subcommand.
//!
//! A config file is plain `key=value` text, one pair per line, with `#`
//! comments. Its keys are the long flag names with `-` replaced by `_`, so
//! `--theta-u pi/4` and `theta_u=pi/4` mean the same thing. Flags given on the
//! command line override the file.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use qbigraph::analytic::Correlator;
use qbigraph::params::{format_angle, parse_angle, AngleAxis};
use qbigraph::{NoiseModel, SideAngles, VertexId};

use crate::CliError;

/// Which backend a command evaluates with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodChoice {
    Analytic,
    Exact,
    Sampled,
}

impl MethodChoice {
    pub fn name(self) -> &'static str {
        match self {
            MethodChoice::Analytic => "analytic",
            MethodChoice::Exact => "exact",
            MethodChoice::Sampled => "sampled",
        }
    }
}

impl FromStr for MethodChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "analytic" => Ok(MethodChoice::Analytic),
            "exact" => Ok(MethodChoice::Exact),
            "sampled" => Ok(MethodChoice::Sampled),
            other => Err(format!(
                "unknown method {other:?} (expected analytic, exact or sampled)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Text => "text",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            other => Err(format!(
                "unknown format {other:?} (expected json, csv or text)"
            )),
        }
    }
}

/// The quantity a sweep evaluates at each grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Entanglement(VertexId),
    Correlator(Correlator),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Entanglement(q) => write!(f, "entanglement:{}", q.0),
            Target::Correlator(c) => f.write_str(c.name()),
        }
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(q) = s.strip_prefix("entanglement:") {
            let q = q
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("bad qubit index in target {s:?}"))?;
            return Ok(Target::Entanglement(VertexId(q)));
        }
        Correlator::from_name(s).map(Target::Correlator).ok_or_else(|| {
            format!("unknown target {s:?} (expected entanglement:<qubit>, cxx_all, cx_U, czz_all or cz_V)")
        })
    }
}

/// Two swept angles over a shared `start..=stop` grid with spacing `step`.
///
/// The remaining two angles keep their values from [`RunConfig::angles`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSpec {
    pub axes: (AngleAxis, AngleAxis),
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub target: Target,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            axes: (AngleAxis::ThetaU, AngleAxis::ThetaV),
            start: 0.0,
            stop: std::f64::consts::PI,
            step: std::f64::consts::PI / 16.0,
            target: Target::Entanglement(VertexId(0)),
        }
    }
}

impl SweepSpec {
    /// Points along one axis. A trailing point within `1e-9·step` of `stop` is kept.
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let nan = self.step.is_nan() || self.start.is_nan() || self.stop.is_nan();
        if nan || self.step <= 0.0 || self.start > self.stop {
            return Err(CliError::InvalidSweepRange {
                start: self.start,
                stop: self.stop,
                step: self.step,
            });
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|i| self.start + i as f64 * self.step).collect())
    }
}

pub(crate) fn parse_axes(s: &str) -> Result<(AngleAxis, AngleAxis), CliError> {
    let invalid = |reason: String| CliError::InvalidSweepAxis {
        axes: s.to_string(),
        reason,
    };
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        return Err(invalid("expected two comma-separated axis names".into()));
    };
    let a: AngleAxis = a.parse().map_err(invalid)?;
    let b: AngleAxis = b.parse().map_err(invalid)?;
    if a == b {
        return Err(invalid(format!("{a} is listed twice")));
    }
    Ok((a, b))
}

/// Every setting a run depends on.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub graph: Option<PathBuf>,
    /// Uniform angles, used unless `params` names a per-qubit file.
    pub angles: SideAngles,
    pub params: Option<PathBuf>,
    pub shots: Option<u64>,
    pub seed: u64,
    pub noise: NoiseModel,
    /// `None` picks `sampled` when `shots` is set and `analytic` otherwise.
    pub method: Option<MethodChoice>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub round: bool,
    pub qubit: Option<usize>,
    pub sweep: SweepSpec,
}

pub const DEFAULT_SHOTS: u64 = 1024;

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            graph: None,
            angles: SideAngles::all(std::f64::consts::FRAC_PI_4),
            params: None,
            shots: None,
            seed: 0,
            noise: NoiseModel::ideal(),
            method: None,
            out: None,
            format: None,
            round: false,
            qubit: None,
            sweep: SweepSpec::default(),
        }
    }
}

/// Config keys in the order they are written.
pub const KEYS: [&str; 19] = [
    "graph", "theta_u", "phi_u", "theta_v", "phi_v", "params", "shots", "seed", "noise", "method",
    "out", "format", "round", "qubit", "axes", "start", "stop", "step", "target",
];

/// Shortest text that parses back to exactly `value`, preferring `pi` fractions.
pub fn angle_text(value: f64) -> String {
    let pretty = format_angle(value);
    match parse_angle(&pretty) {
        Ok(v) if v == value => pretty,
        _ => format!("{value}"),
    }
}

fn axis_of(key: &str) -> Option<AngleAxis> {
    match key {
        "theta_u" => Some(AngleAxis::ThetaU),
        "phi_u" => Some(AngleAxis::PhiU),
        "theta_v" => Some(AngleAxis::ThetaV),
        "phi_v" => Some(AngleAxis::PhiV),
        _ => None,
    }
}

impl RunConfig {
    /// Applies one `key=value` setting. Keys may use `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let bad = |msg: String| CliError::Config {
            key: key.clone(),
            message: msg,
        };
        if let Some(axis) = axis_of(&key) {
            let v = parse_angle(value).map_err(|e| bad(e.to_string()))?;
            self.angles.set(axis, v);
            return Ok(());
        }
        match key.as_str() {
            "graph" => self.graph = Some(PathBuf::from(value)),
            "params" => self.params = Some(PathBuf::from(value)),
            "shots" => {
                let n: u64 = value
                    .parse()
                    .map_err(|_| bad(format!("bad shot count {value:?}")))?;
                if n == 0 {
                    return Err(bad("shots must be positive".into()));
                }
                self.shots = Some(n);
            }
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| bad(format!("bad seed {value:?}")))?
            }
            "noise" => {
                self.noise = value
                    .parse()
                    .map_err(|e: qbigraph::noise::NoiseError| bad(e.to_string()))?
            }
            "method" => self.method = Some(value.parse().map_err(bad)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = Some(value.parse().map_err(bad)?),
            "round" => {
                self.round = value
                    .parse()
                    .map_err(|_| bad(format!("expected true or false, found {value:?}")))?
            }
            "qubit" => {
                self.qubit = Some(
                    value
                        .parse()
                        .map_err(|_| bad(format!("bad qubit index {value:?}")))?,
                )
            }
            "axes" => self.sweep.axes = parse_axes(value)?,
            "start" => self.sweep.start = parse_angle(value).map_err(|e| bad(e.to_string()))?,
            "stop" => self.sweep.stop = parse_angle(value).map_err(|e| bad(e.to_string()))?,
            "step" => self.sweep.step = parse_angle(value).map_err(|e| bad(e.to_string()))?,
            "target" => self.sweep.target = value.parse().map_err(bad)?,
            _ => return Err(bad("unknown key".into())),
        }
        Ok(())
    }

    /// Applies every line of a config file on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| CliError::Config {
                key: format!("line {}", i + 1),
                message: format!("expected key=value, found {raw:?}"),
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Settings as ordered `(key, value)` pairs. Unset optional keys are omitted.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let mut out = Vec::with_capacity(KEYS.len());
        for key in KEYS {
            let value = match key {
                "graph" => path(&self.graph),
                "params" => path(&self.params),
                "out" => path(&self.out),
                "shots" => self.shots.map(|n| n.to_string()),
                "seed" => Some(self.seed.to_string()),
                "noise" => Some(if self.noise.is_ideal() {
                    "ideal".to_string()
                } else {
                    self.noise.to_string()
                }),
                "method" => self.method.map(|m| m.name().to_string()),
                "format" => self.format.map(|f| f.name().to_string()),
                "round" => Some(self.round.to_string()),
                "qubit" => self.qubit.map(|q| q.to_string()),
                "axes" => Some(format!("{},{}", self.sweep.axes.0, self.sweep.axes.1)),
                "start" => Some(angle_text(self.sweep.start)),
                "stop" => Some(angle_text(self.sweep.stop)),
                "step" => Some(angle_text(self.sweep.step)),
                "target" => Some(self.sweep.target.to_string()),
                k => axis_of(k).map(|a| angle_text(self.angles.get(a))),
            };
            if let Some(v) = value {
                out.push((key, v));
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        self.pairs()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    /// The method a command will use when none was requested explicitly.
    pub fn effective_method(&self) -> MethodChoice {
        self.method.unwrap_or(if self.shots.is_some() {
            MethodChoice::Sampled
        } else {
            MethodChoice::Analytic
        })
    }

    pub fn shots_or_default(&self) -> u64 {
        self.shots.unwrap_or(DEFAULT_SHOTS)
    }
}
