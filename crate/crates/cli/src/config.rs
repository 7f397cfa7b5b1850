//! Flat `key = value` configuration files with per-experiment defaults.
//!
//! Unknown keys and constraint-violating values are rejected before any
//! computation starts. The fully resolved configuration is echoed into every
//! output file as an audit trail.

use bsasym_core::sources::SourceTerm;
use bsasym_core::stencils::{Limiter, StencilParams};
use bsasym_core::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Fmcf,
    ImcfTruncated,
    Eikonal,
}

impl SchemeKind {
    fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Fmcf => "fmcf",
            SchemeKind::ImcfTruncated => "imcf_truncated",
            SchemeKind::Eikonal => "eikonal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    RadialCone,
    L1Cone,
    TwinCones,
    BallIndicator,
    TwinBalls,
    RadialTable,
}

impl SourceKind {
    fn as_str(self) -> &'static str {
        match self {
            SourceKind::RadialCone => "radial_cone",
            SourceKind::L1Cone => "l1_cone",
            SourceKind::TwinCones => "twin_cones",
            SourceKind::BallIndicator => "ball_indicator",
            SourceKind::TwinBalls => "twin_balls",
            SourceKind::RadialTable => "radial_table",
        }
    }
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub experiment: String,
    pub grid_r: f64,
    pub grid_n: u32,
    pub scheme: SchemeKind,
    pub dt_factor: f64,
    pub eps: f64,
    pub rho: f64,
    pub lambda: f64,
    pub lambda_max: f64,
    pub delta: f64,
    pub limiter: Limiter,
    pub t_final: f64,
    pub sample_interval: f64,
    pub source_kind: SourceKind,
    pub source_r: f64,
    pub source_r0: f64,
    pub source_offset: f64,
    pub source_table_path: Option<String>,
    pub sweep_param: String,
    pub sweep_start: f64,
    pub sweep_stop: f64,
    pub sweep_step: f64,
    pub tk_tau0: f64,
    pub tk_levels: u32,
    pub out_dir: String,
    pub desk: bool,
}

impl Config {
    /// Reference defaults, specialized per experiment.
    pub fn defaults(experiment: &str) -> Result<Self> {
        let mut cfg = Config {
            experiment: experiment.to_string(),
            grid_r: 2.56,
            grid_n: 128,
            scheme: SchemeKind::Fmcf,
            dt_factor: 0.2,
            eps: 1e-3,
            rho: 1e-2,
            lambda: 0.5,
            lambda_max: 5.05,
            delta: 1.0,
            limiter: Limiter::Printed,
            t_final: 40.0,
            sample_interval: 0.5,
            source_kind: SourceKind::RadialCone,
            source_r: 1.6,
            source_r0: 1.2,
            source_offset: 0.0,
            source_table_path: None,
            sweep_param: "r".into(),
            sweep_start: 0.8,
            sweep_stop: 1.6,
            sweep_step: 0.2,
            tk_tau0: 0.1,
            tk_levels: 3,
            out_dir: "out".into(),
            desk: false,
        };
        match experiment {
            "ex1" => {}
            "ex2" => {
                cfg.source_kind = SourceKind::L1Cone;
                cfg.sweep_start = 0.8;
                cfg.sweep_stop = 2.0;
                cfg.sweep_step = 0.1;
            }
            "ex3" => {
                cfg.source_kind = SourceKind::TwinCones;
                cfg.sweep_param = "offset".into();
                cfg.sweep_start = 0.0;
                cfg.sweep_stop = 2.0;
                cfg.sweep_step = 0.25;
            }
            "volcano" => {
                cfg.scheme = SchemeKind::ImcfTruncated;
                cfg.dt_factor = 0.025;
                cfg.source_kind = SourceKind::BallIndicator;
                cfg.source_r0 = 0.2;
                cfg.t_final = 2.5;
                cfg.sample_interval = 1.25;
            }
            "twin" => {
                cfg.scheme = SchemeKind::ImcfTruncated;
                cfg.dt_factor = 0.025;
                cfg.source_kind = SourceKind::TwinBalls;
                cfg.source_r0 = 0.2;
                cfg.source_offset = 0.8;
                cfg.t_final = 2.5;
                cfg.sample_interval = 1.25;
            }
            "tk" => {
                cfg.source_r = 1.2;
                cfg.t_final = 1.0;
            }
            "radial" => {
                cfg.t_final = 5.0;
            }
            "invariants" => {
                cfg.grid_n = 64;
                cfg.t_final = 10.0;
                cfg.sample_interval = 0.25;
            }
            other => {
                return Err(Error::Config(format!("unknown experiment '{other}'")));
            }
        }
        Ok(cfg)
    }

    /// Applies `key = value` lines from a config file.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{}:{}: expected 'key = value', got '{raw}'",
                    path.display(),
                    lineno + 1
                )));
            };
            self.apply_pair(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        }
        Ok(())
    }

    fn apply_pair(&mut self, key: &str, value: &str) -> Result<()> {
        fn num(value: &str) -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("not a number: '{value}'")))
        }
        match key {
            "grid.R" => self.grid_r = num(value)?,
            "grid.N" => {
                self.grid_n = value
                    .parse()
                    .map_err(|_| Error::Config(format!("not a count: '{value}'")))?
            }
            "solver.scheme" => {
                self.scheme = match value {
                    "fmcf" => SchemeKind::Fmcf,
                    "imcf_truncated" => SchemeKind::ImcfTruncated,
                    "eikonal" => SchemeKind::Eikonal,
                    other => return Err(Error::Config(format!("unknown scheme '{other}'"))),
                }
            }
            "solver.dt_factor" => self.dt_factor = num(value)?,
            "solver.eps" => self.eps = num(value)?,
            "solver.rho" => self.rho = num(value)?,
            "solver.lambda" => self.lambda = num(value)?,
            "solver.Lambda" => self.lambda_max = num(value)?,
            "solver.delta" => self.delta = num(value)?,
            "solver.limiter" => {
                self.limiter = match value {
                    "printed" => Limiter::Printed,
                    "minmod" => Limiter::Minmod,
                    other => return Err(Error::Config(format!("unknown limiter '{other}'"))),
                }
            }
            "run.T" => self.t_final = num(value)?,
            "run.sample_interval" => self.sample_interval = num(value)?,
            "source.kind" => {
                self.source_kind = match value {
                    "radial_cone" => SourceKind::RadialCone,
                    "l1_cone" => SourceKind::L1Cone,
                    "twin_cones" => SourceKind::TwinCones,
                    "ball_indicator" => SourceKind::BallIndicator,
                    "twin_balls" => SourceKind::TwinBalls,
                    "radial_table" => SourceKind::RadialTable,
                    other => return Err(Error::Config(format!("unknown source kind '{other}'"))),
                }
            }
            "source.r" => self.source_r = num(value)?,
            "source.R0" => self.source_r0 = num(value)?,
            "source.offset" => self.source_offset = num(value)?,
            "source.table_path" => self.source_table_path = Some(value.to_string()),
            "sweep.param" => self.sweep_param = value.to_string(),
            "sweep.start" => self.sweep_start = num(value)?,
            "sweep.stop" => self.sweep_stop = num(value)?,
            "sweep.step" => self.sweep_step = num(value)?,
            "tk.tau0" => self.tk_tau0 = num(value)?,
            "tk.levels" => {
                self.tk_levels = value
                    .parse()
                    .map_err(|_| Error::Config(format!("not a count: '{value}'")))?
            }
            "output.dir" => self.out_dir = value.to_string(),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Switches to the reduced grid and horizon used for quick runs.
    pub fn apply_desk(&mut self) {
        self.desk = true;
        self.grid_n = 64;
        if self.experiment != "volcano" && self.experiment != "twin" && self.experiment != "tk" {
            self.t_final = 10.0;
        }
    }

    /// Validates every derived quantity by constructing it.
    pub fn validate(&self) -> Result<()> {
        bsasym_core::grid::GridSpec::new(self.grid_r, self.grid_n)?;
        StencilParams::new(self.eps, self.rho)?;
        if !(self.dt_factor > 0.0 && self.dt_factor.is_finite()) {
            return Err(Error::Config(format!(
                "solver.dt_factor must be positive, got {}",
                self.dt_factor
            )));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("run.T must be >= 0, got {}", self.t_final)));
        }
        if !(self.sample_interval > 0.0) {
            return Err(Error::Config(format!(
                "run.sample_interval must be positive, got {}",
                self.sample_interval
            )));
        }
        if self.scheme == SchemeKind::ImcfTruncated && !(self.lambda < self.lambda_max) {
            return Err(Error::Config(format!(
                "solver.lambda = {} must be below solver.Lambda = {}",
                self.lambda, self.lambda_max
            )));
        }
        if self.scheme == SchemeKind::Eikonal && !(self.delta > 0.0) {
            return Err(Error::Config(format!(
                "solver.delta must be positive, got {}",
                self.delta
            )));
        }
        if !(self.sweep_step > 0.0 && self.sweep_stop >= self.sweep_start) {
            return Err(Error::Config(
                "sweep needs step > 0 and stop >= start".into(),
            ));
        }
        if self.sweep_param != "r" && self.sweep_param != "offset" {
            return Err(Error::Config(format!(
                "sweep.param must be 'r' or 'offset', got '{}'",
                self.sweep_param
            )));
        }
        if self.tk_levels == 0 || self.tk_tau0 <= 0.0 {
            return Err(Error::Config("tk needs tau0 > 0 and at least one level".into()));
        }
        self.source(None)?;
        Ok(())
    }

    pub fn grid_spec(&self) -> bsasym_core::grid::GridSpec {
        bsasym_core::grid::GridSpec::new(self.grid_r, self.grid_n).expect("validated")
    }

    pub fn dt(&self) -> f64 {
        let dx = self.grid_spec().spacing();
        self.dt_factor * dx * dx
    }

    pub fn solver_config(&self) -> Result<bsasym_core::solvers::SolverConfig> {
        let scheme = match self.scheme {
            SchemeKind::Fmcf => bsasym_core::solvers::Scheme::Fmcf,
            SchemeKind::ImcfTruncated => bsasym_core::solvers::Scheme::ImcfTruncated {
                lambda: self.lambda,
                lambda_max: self.lambda_max,
            },
            SchemeKind::Eikonal => bsasym_core::solvers::Scheme::Eikonal { delta: self.delta },
        };
        let stencil = StencilParams::new(self.eps, self.rho)?;
        Ok(bsasym_core::solvers::SolverConfig::new(scheme, self.dt(), stencil)?
            .with_limiter(self.limiter))
    }

    /// Builds the source term; `sweep_value` overrides the swept parameter.
    pub fn source(&self, sweep_value: Option<f64>) -> Result<SourceTerm> {
        let r = if self.sweep_param == "r" {
            sweep_value.unwrap_or(self.source_r)
        } else {
            self.source_r
        };
        let offset = if self.sweep_param == "offset" {
            sweep_value.unwrap_or(self.source_offset)
        } else {
            self.source_offset
        };
        let src = match self.source_kind {
            SourceKind::RadialCone => SourceTerm::RadialCone { r },
            SourceKind::L1Cone => SourceTerm::L1Cone { r },
            SourceKind::TwinCones => SourceTerm::TwinCones {
                r0: self.source_r0,
                offset,
            },
            SourceKind::BallIndicator => SourceTerm::BallIndicator { r0: self.source_r0 },
            SourceKind::TwinBalls => SourceTerm::TwinBalls {
                r0: self.source_r0,
                offset,
            },
            SourceKind::RadialTable => {
                let path = self.source_table_path.as_ref().ok_or_else(|| {
                    Error::Config("source.table_path is required for radial_table".into())
                })?;
                load_radial_table(Path::new(path))?
            }
        };
        src.validate()?;
        Ok(src)
    }

    pub fn sweep_values(&self) -> Vec<f64> {
        let mut values = Vec::new();
        let mut v = self.sweep_start;
        while v <= self.sweep_stop + 1e-9 * self.sweep_step {
            values.push(v);
            v = self.sweep_start + (values.len() as f64) * self.sweep_step;
        }
        values
    }

    /// Canonical one-line rendering, echoed into every output file.
    pub fn echo(&self) -> String {
        let mut map = BTreeMap::new();
        map.insert("experiment", self.experiment.clone());
        map.insert("grid.R", format!("{}", self.grid_r));
        map.insert("grid.N", format!("{}", self.grid_n));
        map.insert("solver.scheme", self.scheme.as_str().into());
        map.insert("solver.dt_factor", format!("{}", self.dt_factor));
        map.insert("solver.eps", format!("{}", self.eps));
        map.insert("solver.rho", format!("{}", self.rho));
        map.insert("solver.lambda", format!("{}", self.lambda));
        map.insert("solver.Lambda", format!("{}", self.lambda_max));
        map.insert("solver.delta", format!("{}", self.delta));
        map.insert(
            "solver.limiter",
            match self.limiter {
                Limiter::Printed => "printed".into(),
                Limiter::Minmod => "minmod".into(),
            },
        );
        map.insert("run.T", format!("{}", self.t_final));
        map.insert("run.sample_interval", format!("{}", self.sample_interval));
        map.insert("source.kind", self.source_kind.as_str().into());
        map.insert("source.r", format!("{}", self.source_r));
        map.insert("source.R0", format!("{}", self.source_r0));
        map.insert("source.offset", format!("{}", self.source_offset));
        if let Some(p) = &self.source_table_path {
            map.insert("source.table_path", p.clone());
        }
        map.insert("sweep.param", self.sweep_param.clone());
        map.insert("sweep.start", format!("{}", self.sweep_start));
        map.insert("sweep.stop", format!("{}", self.sweep_stop));
        map.insert("sweep.step", format!("{}", self.sweep_step));
        map.insert("tk.tau0", format!("{}", self.tk_tau0));
        map.insert("tk.levels", format!("{}", self.tk_levels));
        map.insert("output.dir", self.out_dir.clone());
        map.insert("desk", format!("{}", self.desk));
        let mut line = String::from("# config:");
        for (k, v) in map {
            let _ = write!(line, " {k}={v}");
        }
        line
    }
}

/// Reads a two-column `radius,value` CSV with strictly increasing radii.
pub fn load_radial_table(path: &Path) -> Result<SourceTerm> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut radii = Vec::new();
    let mut values = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("radius") {
            continue;
        }
        let mut cols = line.split(',');
        let parse = |tok: Option<&str>| -> Result<f64> {
            tok.map(str::trim)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| {
                    Error::Config(format!("{}:{}: bad table row", path.display(), lineno + 1))
                })
        };
        radii.push(parse(cols.next())?);
        values.push(parse(cols.next())?);
    }
    SourceTerm::radial_table(radii, values)
}
