use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::StrokeMode;
use crate::error::{Error, Result};

/// Values taken by one sweep parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Scalar(f64),
    List(Vec<f64>),
    Grid { min: f64, max: f64, count: usize },
}

impl Axis {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            Axis::Scalar(x) => vec![*x],
            Axis::List(xs) => xs.clone(),
            Axis::Grid { min, max, count } => {
                if *count == 0 {
                    return Err(Error::Config("grid count must be positive".into()));
                }
                if *count == 1 {
                    vec![*min]
                } else {
                    let step = (max - min) / (*count - 1) as f64;
                    // Multiply rather than accumulate so nodes are exact.
                    (0..*count).map(|k| if k + 1 == *count { *max } else { min + step * k as f64 }).collect()
                }
            }
        };
        if v.is_empty() {
            return Err(Error::Config("axis has no values".into()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("axis values must be finite".into()));
        }
        Ok(v)
    }
}

impl From<f64> for Axis {
    fn from(x: f64) -> Self {
        Axis::Scalar(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsConfig {
    /// Coupling `g/2π` in Hz.
    pub g_hz: f64,
    /// Cavity decay `κ/2π` in Hz.
    pub kappa_hz: Axis,
    pub g_tau: Axis,
    pub n_pair: Axis,
    /// Detuning `δ/2π` in Hz.
    pub delta_hz: Axis,
    /// Cycle sweep `[δ_final, 0]` in Hz.
    pub delta_range: [f64; 2],
    /// Atomic frequency `ω_a/2π` in Hz; defaults to the 791 nm line.
    pub omega_a_hz: Option<f64>,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self {
            g_hz: 334e3,
            kappa_hz: Axis::Scalar(74e3),
            g_tau: Axis::Scalar(0.03),
            n_pair: Axis::Scalar(1.0),
            delta_hz: Axis::Scalar(0.0),
            delta_range: [-1e6, 0.0],
            omega_a_hz: None,
        }
    }
}

/// Amplitudes of `a|ee⟩ + b(|ge⟩ + e^{iφ}|eg⟩) + c|gg⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StateConfig {
    pub a: Axis,
    pub b: Axis,
    pub c: Axis,
    pub phi: Axis,
}

impl Default for StateConfig {
    fn default() -> Self {
        Self { a: 1.0.into(), b: 1.0.into(), c: 1.0.into(), phi: 0.0.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    NSs,
    NTh,
    Concurrence,
    Eta,
    WNet,
    TR,
    TEff,
}

impl Quantity {
    pub const ALL: [Quantity; 7] = [
        Quantity::NSs,
        Quantity::NTh,
        Quantity::Concurrence,
        Quantity::Eta,
        Quantity::WNet,
        Quantity::TR,
        Quantity::TEff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::NSs => "n_ss",
            Quantity::NTh => "n_th",
            Quantity::Concurrence => "concurrence",
            Quantity::Eta => "eta",
            Quantity::WNet => "w_net",
            Quantity::TR => "t_r",
            Quantity::TEff => "t_eff",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub quantities: Vec<Quantity>,
    pub svg: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            csv: None,
            quantities: vec![Quantity::NSs, Quantity::NTh, Quantity::Concurrence, Quantity::Eta],
            svg: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Closed-form steady-state moments.
    Moments,
    /// Numerical steady state of the truncated density matrix.
    FullDensityMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrokeConfig {
    Entry,
    Pointwise,
}

impl From<StrokeConfig> for StrokeMode {
    fn from(s: StrokeConfig) -> Self {
        match s {
            StrokeConfig::Entry => StrokeMode::EntryValues,
            StrokeConfig::Pointwise => StrokeMode::Pointwise,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub mode: Mode,
    /// Fock dimension for density-matrix work; 0 selects it automatically.
    pub fock_dim: usize,
    /// Steady-state residual tolerance.
    pub tol: f64,
    /// Population allowed in the top Fock levels.
    pub tail_tol: f64,
    /// Worker threads; 0 uses all cores.
    pub threads: usize,
    /// Quadrature nodes per cycle stroke.
    pub steps: usize,
    pub stroke: StrokeConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Moments,
            fock_dim: 0,
            tol: 1e-9,
            tail_tol: 1e-6,
            threads: 0,
            steps: 200,
            stroke: StrokeConfig::Entry,
        }
    }
}

/// Settings of the numerical convergence study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergeConfig {
    /// Fock dimensions for the truncation study.
    pub fock_dims: Vec<usize>,
    /// Values of `gτ` for the exact-versus-second-order comparison.
    pub order_g_tau: Vec<f64>,
    pub order_dim: usize,
    pub order_samples: usize,
    /// Values of `gτ` contrasted across the detuning axis.
    pub contrast_g_tau: Vec<f64>,
    pub contrast_delta_hz: Axis,
    pub seed: u64,
}

impl Default for ConvergeConfig {
    fn default() -> Self {
        Self {
            fock_dims: vec![4, 6, 8, 10, 12, 14, 16, 20, 24],
            order_g_tau: vec![0.04, 0.02, 0.01, 0.005],
            order_dim: 8,
            order_samples: 16,
            contrast_g_tau: vec![0.03, 0.17],
            contrast_delta_hz: Axis::Grid { min: -1e6, max: 1e6, count: 41 },
            seed: 7,
        }
    }
}

/// Complete description of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub name: Option<String>,
    pub description: Option<String>,
    pub physics: PhysicsConfig,
    pub state: StateConfig,
    pub outputs: OutputConfig,
    pub run: RunConfig,
    pub converge: ConvergeConfig,
}

/// Names of the sweepable parameters, in row (and CSV column) order.
pub const AXIS_NAMES: [&str; 8] = ["a", "b", "c", "phi", "g_tau", "n_pair", "delta_hz", "kappa_hz"];

impl SweepConfig {
    /// Parses a TOML document and applies `key=value` overrides, where keys
    /// are dotted paths (`physics.g_tau`) and values TOML literals.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        for item in overrides {
            apply_override(&mut table, item)?;
        }
        let cfg: SweepConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Self::from_toml_with_overrides(text, &[])
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_with_overrides(&text, overrides)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn axes(&self) -> [&Axis; 8] {
        [
            &self.state.a,
            &self.state.b,
            &self.state.c,
            &self.state.phi,
            &self.physics.g_tau,
            &self.physics.n_pair,
            &self.physics.delta_hz,
            &self.physics.kappa_hz,
        ]
    }

    /// Names of the axes holding more than one value.
    pub fn varying_axes(&self) -> Result<Vec<&'static str>> {
        let mut out = Vec::new();
        for (name, axis) in AXIS_NAMES.iter().zip(self.axes()) {
            if axis.values()?.len() > 1 {
                out.push(*name);
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        let varying = self.varying_axes()?;
        if varying.len() > 2 {
            return Err(Error::Config(format!(
                "at most two swept axes are allowed, found {}",
                varying.join(", ")
            )));
        }
        let p = &self.physics;
        if !(p.g_hz > 0.0 && p.g_hz.is_finite()) {
            return Err(Error::Config("physics.g_hz must be positive".into()));
        }
        let [lo, hi] = p.delta_range;
        if !(lo < hi && lo.is_finite() && hi == 0.0) {
            return Err(Error::Config("physics.delta_range must be [negative, 0]".into()));
        }
        if self.run.steps < 2 {
            return Err(Error::Config("run.steps must be at least 2".into()));
        }
        if self.run.tol.is_nan() || self.run.tol <= 0.0 || self.run.tail_tol.is_nan() || self.run.tail_tol <= 0.0 {
            return Err(Error::Config("run tolerances must be positive".into()));
        }
        if self.run.fock_dim == 1 {
            return Err(Error::Config("run.fock_dim must be 0 (auto) or at least 2".into()));
        }
        if self.outputs.quantities.is_empty() {
            return Err(Error::Config("outputs.quantities must not be empty".into()));
        }
        Ok(())
    }
}

fn apply_override(table: &mut toml::Table, item: &str) -> Result<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{item}` is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_owned()),
    };
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| Error::Config(format!("empty key in `{item}`")))?;
    let mut cur = table;
    for part in parts {
        let entry = cur
            .entry(part.to_owned())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{part}` in `{key}` is not a section")))?;
    }
    cur.insert(last.to_owned(), value);
    Ok(())
}
