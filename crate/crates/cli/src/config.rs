//! `key = value` run configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub event_tol: f64,
    pub sweep_steps: usize,
    pub sturm_n: usize,
    pub geometry_grid: usize,
    pub y_max: f64,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            abs_tol: 1e-15,
            event_tol: 1e-12,
            sweep_steps: 999,
            sturm_n: 128,
            geometry_grid: 64,
            y_max: 50.0,
            output_dir: PathBuf::from("."),
            format: OutputFormat::Csv,
            workers: 4,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "rel_tol" => self.rel_tol = parse_value(key, value)?,
            "abs_tol" => self.abs_tol = parse_value(key, value)?,
            "event_tol" => self.event_tol = parse_value(key, value)?,
            "sweep_steps" => self.sweep_steps = parse_value(key, value)?,
            "sturm_n" => self.sturm_n = parse_value(key, value)?,
            "geometry_grid" => self.geometry_grid = parse_value(key, value)?,
            "y_max" => self.y_max = parse_value(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "format" => self.format = parse_value(key, value)?,
            "workers" => self.workers = parse_value(key, value)?,
            other => return Err(CliError::Usage(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Parses the `key = value` format; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", n + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("event_tol", self.event_tol),
            ("y_max", self.y_max),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("sweep_steps", self.sweep_steps),
            ("sturm_n", self.sturm_n),
            ("geometry_grid", self.geometry_grid),
            ("workers", self.workers),
        ] {
            if v < 1 {
                return Err(CliError::Usage(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rel_tol = {:?}", self.rel_tol)?;
        writeln!(f, "abs_tol = {:?}", self.abs_tol)?;
        writeln!(f, "event_tol = {:?}", self.event_tol)?;
        writeln!(f, "sweep_steps = {}", self.sweep_steps)?;
        writeln!(f, "sturm_n = {}", self.sturm_n)?;
        writeln!(f, "geometry_grid = {}", self.geometry_grid)?;
        writeln!(f, "y_max = {:?}", self.y_max)?;
        writeln!(f, "output_dir = {}", self.output_dir.display())?;
        writeln!(f, "format = {}", self.format)?;
        writeln!(f, "workers = {}", self.workers)
    }
}
