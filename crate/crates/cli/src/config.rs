//! Run configuration: `key = value` files merged with command-line overrides.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use fireball_core::{IntegratorConfig, ModelKind, PhysicalParams, State};

use crate::CliError;

const KEYS: &[&str] = &[
    "model",
    "X",
    "Y",
    "Z",
    "Xdot",
    "Ydot",
    "Zdot",
    "t_start",
    "t_end",
    "rel_tol",
    "abs_tol",
    "max_step",
    "initial_step",
    "sample_interval",
    "out",
    "format",
    "compare",
    "symmetry",
    "hydro",
    "drift_bound",
    "n0",
    "T0",
    "X0",
    "Y0",
    "Z0",
    "mass",
    "H",
    "I",
    "t0",
    "phi0",
    "sign0",
];

/// Raw settings in the order they were applied; later entries win.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut settings = Settings::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", n + 1)))?;
            settings.set(key.trim(), value.trim())?;
        }
        Ok(settings)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), CliError> {
        let key = key.replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("unknown key `{key}`")));
        }
        self.values.insert(key, value.into());
        Ok(())
    }

    pub fn merge(&mut self, other: &Settings) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| CliError::Config(format!("`{key}` must be a finite number, got `{v}`")))
            })
            .transpose()
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some("true" | "1" | "yes" | "on") => Ok(true),
            Some("false" | "0" | "no" | "off") => Ok(false),
            Some(v) => Err(CliError::Config(format!("`{key}` must be a boolean, got `{v}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Closed-form parameters for the `analytic` command.
#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyticParams {
    pub h: Option<f64>,
    pub invariant: Option<f64>,
    pub t0: Option<f64>,
    pub phi0: Option<f64>,
    pub sign0: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelKind,
    pub t_start: f64,
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
    pub integrator: IntegratorConfig,
    /// Closed-form comparison; off for `simulate`, on for `verify` unless set.
    pub compare: Option<bool>,
    pub symmetry: bool,
    pub hydro: bool,
    pub drift_bound: f64,
    pub params: PhysicalParams,
    pub analytic: AnalyticParams,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let model: ModelKind = s
            .get("model")
            .ok_or(CliError::MissingModel)?
            .parse()
            .map_err(|e: fireball_core::Error| CliError::Config(e.to_string()))?;

        let names = [("X", "Xdot"), ("Y", "Ydot"), ("Z", "Zdot")];
        let mut q = Vec::new();
        let mut qdot = Vec::new();
        for (i, (pos, vel)) in names.iter().enumerate() {
            if i < model.dim() {
                q.push(s.number(pos)?.unwrap_or(1.0));
                qdot.push(s.number(vel)?.unwrap_or(0.0));
            } else if s.get(pos).is_some() || s.get(vel).is_some() {
                let hint = if model == ModelKind::EllipticThreeD { " (Z follows X)" } else { "" };
                return Err(CliError::Config(format!("`{pos}`/`{vel}` are not used by the {model} model{hint}")));
            }
        }

        let defaults = IntegratorConfig::default();
        let integrator = IntegratorConfig {
            rel_tol: s.number("rel_tol")?.unwrap_or(defaults.rel_tol),
            abs_tol: s.number("abs_tol")?.unwrap_or(defaults.abs_tol),
            max_step: s.number("max_step")?.unwrap_or(defaults.max_step),
            initial_step: s.number("initial_step")?.unwrap_or(defaults.initial_step),
            t_end: s.number("t_end")?.unwrap_or(defaults.t_end),
            sample_interval: s.number("sample_interval")?.unwrap_or(defaults.sample_interval),
        };
        let t_start = s.number("t_start")?.unwrap_or(0.0);
        integrator.validate(t_start).map_err(|e| CliError::Config(e.to_string()))?;

        let mut params = PhysicalParams::unit(model);
        params.n0 = s.number("n0")?.unwrap_or(params.n0);
        params.t0 = s.number("T0")?.unwrap_or(params.t0);
        params.x0 = s.number("X0")?.unwrap_or(params.x0);
        params.mass = s.number("mass")?.unwrap_or(params.mass);
        if let Some(y0) = s.number("Y0")? {
            params.y0 = Some(y0);
        }
        if let Some(z0) = s.number("Z0")? {
            params.z0 = Some(z0);
        }
        params.validate(model).map_err(|e| CliError::Config(e.to_string()))?;

        let drift_bound = s.number("drift_bound")?.unwrap_or(1e-8);
        if !(drift_bound > 0.0) {
            return Err(CliError::Config(format!("`drift_bound` must be positive, got {drift_bound}")));
        }
        let sign0 = s.number("sign0")?;
        if sign0.is_some_and(|v| v != 1.0 && v != -1.0) {
            return Err(CliError::Config("`sign0` must be 1 or -1".into()));
        }

        let format = match s.get("format") {
            None => None,
            Some("csv") => Some(Format::Csv),
            Some("json") => Some(Format::Json),
            Some(v) => return Err(CliError::Config(format!("`format` must be csv or json, got `{v}`"))),
        };

        let config = RunConfig {
            model,
            t_start,
            q,
            qdot,
            integrator,
            compare: s.get("compare").map(|_| s.flag("compare", false)).transpose()?,
            symmetry: s.flag("symmetry", true)?,
            hydro: s.flag("hydro", true)?,
            drift_bound,
            params,
            analytic: AnalyticParams {
                h: s.number("H")?,
                invariant: s.number("I")?,
                t0: s.number("t0")?,
                phi0: s.number("phi0")?,
                sign0,
            },
            out: s.get("out").map(PathBuf::from),
            format,
        };
        config.initial_state()?;
        Ok(config)
    }

    pub fn initial_state(&self) -> Result<State, CliError> {
        State::new(self.model, self.t_start, &self.q, &self.qdot).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Space-separated `key=value` summary for the `#` metadata line.
    pub fn metadata(&self, command: &str) -> String {
        let c = &self.integrator;
        format!(
            "schema=1 command={command} model={} t_start={} t_end={} rel_tol={:e} abs_tol={:e} sample_interval={}",
            self.model, self.t_start, c.t_end, c.rel_tol, c.abs_tol, c.sample_interval
        )
    }
}
