//! Run configuration: a flat `key = value` file with `#` comments, explicit
//! unit suffixes for SI quantities, plus command-line overrides.

use std::path::{Path, PathBuf};

use crate::field::{FieldParams, SpacetimePoint, UnitMode, DEFAULT_R_MIN};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format '{other}' (csv|json)"))),
        }
    }
}

/// Grid specification: explicit axis values, or a symmetric extent with a
/// fixed resolution for the spatial axes.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl GridSpec {
    /// All grid points in deterministic order: t-major, then x, y, z.
    pub fn points(&self) -> Vec<SpacetimePoint> {
        let mut out = Vec::with_capacity(self.t.len() * self.x.len() * self.y.len() * self.z.len());
        for &t in &self.t {
            for &x in &self.x {
                for &y in &self.y {
                    for &z in &self.z {
                        out.push(SpacetimePoint::new(t, x, y, z));
                    }
                }
            }
        }
        out
    }

    pub fn record_count(&self) -> usize {
        self.t.len() * self.x.len() * self.y.len() * self.z.len()
    }
}

#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Ceiling for analytic residuals (relative).
    pub analytic: f64,
    /// Ceiling for the decomposition reconstruction error (relative).
    pub decomposition: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { analytic: 1e-10, decomposition: 1e-12 }
    }
}

/// Everything a command run needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mass: f64,
    pub kappa: f64,
    pub units: UnitMode,
    pub r_min: f64,
    pub seed: u64,
    /// Random sample count for the verify/crosscheck suites.
    pub samples: usize,
    /// Log-uniform radial range of the random sampler.
    pub r_range: (f64, f64),
    /// Uniform time range of the random sampler.
    pub t_range: (f64, f64),
    /// Screening constants exercised by the verify suite.
    pub kappas: Vec<f64>,
    pub tolerances: Tolerances,
    pub grid: GridSpec,
    pub fd_steps: Vec<f64>,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mass: 1.0,
            kappa: 0.0,
            units: UnitMode::Natural,
            r_min: DEFAULT_R_MIN,
            seed: 42,
            samples: 1000,
            r_range: (0.1, 10.0),
            t_range: (0.0, 10.0),
            kappas: vec![0.0, 0.3],
            tolerances: Tolerances::default(),
            grid: GridSpec { t: vec![0.0], x: vec![1.0], y: vec![0.0], z: vec![0.0] },
            fd_steps: vec![1e-2, 5e-3, 2.5e-3],
            format: OutputFormat::Csv,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> Result<FieldParams> {
        Ok(FieldParams::new(self.mass, self.kappa, self.units)
            .map_err(|e| Error::Config(e.to_string()))?
            .with_r_min(self.r_min))
    }

    pub fn params_with_kappa(&self, kappa: f64) -> Result<FieldParams> {
        Ok(FieldParams::new(self.mass, kappa, self.units)
            .map_err(|e| Error::Config(e.to_string()))?
            .with_r_min(self.r_min))
    }

    /// Reject grids that touch the excluded ball around the origin.
    pub fn validated_grid(&self) -> Result<&GridSpec> {
        for p in self.grid.points() {
            if p.r() < self.r_min {
                return Err(Error::Config(format!(
                    "grid point ({}, {}, {}) has r = {:.3e} < r_min = {:.3e}",
                    p.x,
                    p.y,
                    p.z,
                    p.r(),
                    self.r_min
                )));
            }
        }
        Ok(&self.grid)
    }

    pub fn parse_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        // two passes so that `units` is known before suffixed quantities
        for (idx, line) in text.lines().enumerate() {
            let (key, value) = match split_line(line, idx + 1)? {
                Some(kv) => kv,
                None => continue,
            };
            if key == "units" {
                cfg.units = parse_units(value, idx + 1)?;
            }
        }
        let mut grid_extent: Option<f64> = None;
        let mut grid_resolution: Option<usize> = None;
        let mut explicit_axes = [false; 3];
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let (key, value) = match split_line(line, line_no)? {
                Some(kv) => kv,
                None => continue,
            };
            match key {
                "units" => {}
                "mass" => cfg.mass = quantity(value, cfg.units, "kg", line_no)?,
                "kappa" => cfg.kappa = quantity(value, cfg.units, "/m", line_no)?,
                "r_min" => cfg.r_min = quantity(value, cfg.units, "m", line_no)?,
                "seed" => cfg.seed = int(value, line_no)?,
                "samples" => cfg.samples = int(value, line_no)? as usize,
                "r_low" => cfg.r_range.0 = quantity(value, cfg.units, "m", line_no)?,
                "r_high" => cfg.r_range.1 = quantity(value, cfg.units, "m", line_no)?,
                "t_low" => cfg.t_range.0 = quantity(value, cfg.units, "s", line_no)?,
                "t_high" => cfg.t_range.1 = quantity(value, cfg.units, "s", line_no)?,
                "kappas" => cfg.kappas = list(value, cfg.units, "/m", line_no)?,
                "tol_analytic" => cfg.tolerances.analytic = number(value, line_no)?,
                "tol_decomposition" => cfg.tolerances.decomposition = number(value, line_no)?,
                "grid_t" => cfg.grid.t = list(value, cfg.units, "s", line_no)?,
                "grid_x" => {
                    cfg.grid.x = list(value, cfg.units, "m", line_no)?;
                    explicit_axes[0] = true;
                }
                "grid_y" => {
                    cfg.grid.y = list(value, cfg.units, "m", line_no)?;
                    explicit_axes[1] = true;
                }
                "grid_z" => {
                    cfg.grid.z = list(value, cfg.units, "m", line_no)?;
                    explicit_axes[2] = true;
                }
                "grid_extent" => grid_extent = Some(quantity(value, cfg.units, "m", line_no)?),
                "grid_resolution" => grid_resolution = Some(int(value, line_no)? as usize),
                "fd_steps" => cfg.fd_steps = list(value, cfg.units, "m", line_no)?,
                "format" => cfg.format = value.parse()?,
                "output" => cfg.output = Some(PathBuf::from(value)),
                other => {
                    return Err(Error::Config(format!("line {line_no}: unknown key '{other}'")))
                }
            }
        }
        if let Some(extent) = grid_extent {
            let resolution = grid_resolution.unwrap_or(3);
            if resolution < 1 {
                return Err(Error::Config("grid_resolution must be >= 1".into()));
            }
            let axis = linspace(-extent, extent, resolution);
            for (k, explicit) in explicit_axes.iter().enumerate() {
                if !explicit {
                    match k {
                        0 => cfg.grid.x = axis.clone(),
                        1 => cfg.grid.y = axis.clone(),
                        _ => cfg.grid.z = axis.clone(),
                    }
                }
            }
        }
        Ok(cfg)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![(lo + hi) / 2.0];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn split_line(line: &str, line_no: usize) -> Result<Option<(&str, &str)>> {
    let stripped = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
    .trim();
    if stripped.is_empty() {
        return Ok(None);
    }
    match stripped.split_once('=') {
        Some((key, value)) => Ok(Some((key.trim(), value.trim()))),
        None => Err(Error::Config(format!("line {line_no}: expected 'key = value', got '{stripped}'"))),
    }
}

fn parse_units(value: &str, line_no: usize) -> Result<UnitMode> {
    match value {
        "natural" => Ok(UnitMode::Natural),
        "si" => Ok(UnitMode::Si),
        other => Err(Error::Config(format!("line {line_no}: unknown units '{other}' (natural|si)"))),
    }
}

fn number(value: &str, line_no: usize) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("line {line_no}: '{value}' is not a number")))
}

fn int(value: &str, line_no: usize) -> Result<u64> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("line {line_no}: '{value}' is not an integer")))
}

// A quantity with an optional unit suffix. SI values may carry the expected
// suffix ("9.1e-31 kg"); natural values must be bare.
fn quantity(value: &str, units: UnitMode, suffix: &str, line_no: usize) -> Result<f64> {
    match value.rsplit_once(char::is_whitespace) {
        Some((num, tail)) if !tail.is_empty() && tail.parse::<f64>().is_err() => {
            match units {
                UnitMode::Si if tail == suffix => number(num.trim(), line_no),
                UnitMode::Si => Err(Error::Config(format!(
                    "line {line_no}: expected suffix '{suffix}', got '{tail}'"
                ))),
                UnitMode::Natural => Err(Error::Config(format!(
                    "line {line_no}: unit suffix '{tail}' not allowed in natural units"
                ))),
            }
        }
        _ => number(value, line_no),
    }
}

fn list(value: &str, units: UnitMode, suffix: &str, line_no: usize) -> Result<Vec<f64>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|item| quantity(item.trim(), units, suffix, line_no))
        .collect()
}
