use std::fmt::Write as _;

use log::warn;
use rayon::prelude::*;

use super::config::{Mode, Quantity, SweepConfig, AXIS_NAMES};
use crate::atoms::{build_pure_family, concurrence, AtomPairState, PureFamilyParams};
use crate::cavity::{auto_fock_dim, steady_state_moments, steady_state_numeric, SteadyOptions};
use crate::engine::{
    effective_temperature, efficiency_closed_form, run_cycle_with, write_cycle_csv, CycleResult,
    StrokeMode,
};
use crate::error::{Error, Result};
use crate::reservoir::{reservoir_temperature, InteractionParams, ReservoirCoefficients};
use crate::units::{hz_to_rad, wavelength_to_rad, DEFAULT_WAVELENGTH};

/// One point of a sweep grid, in the units of the configuration file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub phi: f64,
    pub g_tau: f64,
    pub n_pair: f64,
    pub delta_hz: f64,
    pub kappa_hz: f64,
}

impl SweepPoint {
    pub fn axis_values(&self) -> [f64; 8] {
        [self.a, self.b, self.c, self.phi, self.g_tau, self.n_pair, self.delta_hz, self.kappa_hz]
    }

    pub fn value(&self, axis: &str) -> f64 {
        let i = AXIS_NAMES.iter().position(|n| *n == axis).expect("known axis");
        self.axis_values()[i]
    }

    pub fn atoms(&self) -> Result<AtomPairState> {
        build_pure_family(PureFamilyParams::new(self.a, self.b, self.c, self.phi))
    }

    /// Interaction parameters in angular units.
    pub fn params(&self, config: &SweepConfig) -> Result<InteractionParams> {
        let g = hz_to_rad(config.physics.g_hz);
        let omega_a = config.physics.omega_a_hz.map_or_else(|| wavelength_to_rad(DEFAULT_WAVELENGTH), hz_to_rad);
        InteractionParams::new(
            g,
            self.g_tau / g,
            hz_to_rad(self.kappa_hz),
            hz_to_rad(self.delta_hz),
            self.n_pair,
            omega_a,
        )
    }
}

/// Grid points in row order: the first axis varies slowest.
pub fn grid_points(config: &SweepConfig) -> Result<Vec<SweepPoint>> {
    let axes: Vec<Vec<f64>> = config.axes().iter().map(|a| a.values()).collect::<Result<_>>()?;
    let total: usize = axes.iter().map(Vec::len).product();
    let mut out = Vec::with_capacity(total);
    for mut k in 0..total {
        let mut v = [0.0; 8];
        for i in (0..8).rev() {
            let n = axes[i].len();
            v[i] = axes[i][k % n];
            k /= n;
        }
        out.push(SweepPoint {
            a: v[0],
            b: v[1],
            c: v[2],
            phi: v[3],
            g_tau: v[4],
            n_pair: v[5],
            delta_hz: v[6],
            kappa_hz: v[7],
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowFlag {
    Ok,
    /// `γ ≤ 0`: no steady state exists.
    AboveThreshold,
    /// The point could not be evaluated (invalid state or solver failure).
    Failed,
}

impl RowFlag {
    pub fn label(self) -> &'static str {
        match self {
            RowFlag::Ok => "ok",
            RowFlag::AboveThreshold => "above_threshold",
            RowFlag::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub point: SweepPoint,
    pub flag: RowFlag,
    /// Requested quantities, in configuration order.
    pub values: Vec<f64>,
}

/// Evaluates the requested quantities at one point. Never fails: problems
/// are reported through the row flag with NaN values (concurrence, which is
/// a property of the fuel alone, is kept for above-threshold rows).
pub fn evaluate_point(point: &SweepPoint, config: &SweepConfig) -> Row {
    let quantities = &config.outputs.quantities;
    let nan_row = |flag, conc: Option<f64>| Row {
        point: *point,
        flag,
        values: quantities
            .iter()
            .map(|q| match (q, conc) {
                (Quantity::Concurrence, Some(c)) => c,
                _ => f64::NAN,
            })
            .collect(),
    };
    let (atoms, params) = match point.atoms().and_then(|a| Ok((a, point.params(config)?))) {
        Ok(v) => v,
        Err(e) => {
            warn!("point {point:?}: {e}");
            return nan_row(RowFlag::Failed, None);
        }
    };
    let conc = concurrence(&atoms).ok();
    let coeffs = ReservoirCoefficients::evaluate(&atoms, &params);
    if !coeffs.is_below_threshold() {
        return nan_row(RowFlag::AboveThreshold, conc);
    }
    match evaluate_quantities(&atoms, &params, &coeffs, conc, config) {
        Ok(values) => Row { point: *point, flag: RowFlag::Ok, values },
        Err(e) => {
            warn!("point {point:?}: {e}");
            nan_row(RowFlag::Failed, conc)
        }
    }
}

fn evaluate_quantities(
    atoms: &AtomPairState,
    params: &InteractionParams,
    coeffs: &ReservoirCoefficients,
    conc: Option<f64>,
    config: &SweepConfig,
) -> Result<Vec<f64>> {
    let (n_ss, n_th) = match config.run.mode {
        Mode::Moments => {
            let m = steady_state_moments(coeffs)?;
            (m.n_ss, m.n_th)
        }
        Mode::FullDensityMatrix => {
            let dim = match config.run.fock_dim {
                0 => auto_fock_dim(&steady_state_moments(coeffs)?)?,
                d => d,
            };
            let opts = SteadyOptions {
                tol: config.run.tol,
                tail_tolerance: Some(config.run.tail_tol),
                ..Default::default()
            };
            let hot = steady_state_numeric(coeffs, dim, &opts)?;
            let cold = steady_state_numeric(&coeffs.without_drive(), dim, &opts)?;
            (hot.mean_photon(), cold.mean_photon())
        }
    };
    let sweep_width = hz_to_rad(-config.physics.delta_range[0]);
    let delta_final = -sweep_width;
    config
        .outputs
        .quantities
        .iter()
        .map(|q| {
            Ok(match q {
                Quantity::NSs => n_ss,
                Quantity::NTh => n_th,
                Quantity::Concurrence => conc.unwrap_or(f64::NAN),
                Quantity::Eta => match config.run.mode {
                    Mode::Moments => efficiency_closed_form(coeffs, params)?,
                    Mode::FullDensityMatrix if n_ss > 0.0 => 1.0 - n_th / n_ss,
                    Mode::FullDensityMatrix => 0.0,
                },
                Quantity::WNet => match (config.run.mode, StrokeMode::from(config.run.stroke)) {
                    (Mode::Moments, mode) => {
                        run_cycle_with(atoms, params, delta_final, config.run.steps, mode)?.0.w_net
                    }
                    // Stroke-entry values from the numerical steady states.
                    (Mode::FullDensityMatrix, _) => (n_ss - n_th) * sweep_width,
                },
                Quantity::TR => reservoir_temperature(coeffs, params.omega_a).unwrap_or(f64::NAN),
                Quantity::TEff => match effective_temperature(params.omega_a - params.delta, n_ss, n_th) {
                    Ok(t) => t,
                    Err(Error::DivergentTemperature) => f64::INFINITY,
                    Err(e) => return Err(e),
                },
            })
        })
        .collect()
}

/// Formats a float for CSV output: scientific notation, 12 significant
/// digits, negative zero written as zero.
pub fn fmt_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// Result of a sweep.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<Row>,
    pub csv: String,
}

impl SweepOutput {
    pub fn flagged(&self) -> usize {
        self.rows.iter().filter(|r| r.flag != RowFlag::Ok).count()
    }
}

pub(crate) fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Evaluates every grid point on a pool of `config.run.threads` workers and
/// renders the CSV. Row order and contents do not depend on the pool width.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput> {
    config.validate()?;
    let points = grid_points(config)?;
    let rows: Vec<Row> =
        thread_pool(config.run.threads)?.install(|| points.par_iter().map(|p| evaluate_point(p, config)).collect());
    let csv = render_sweep_csv(&rows, &config.outputs.quantities);
    Ok(SweepOutput { rows, csv })
}

pub fn render_sweep_csv(rows: &[Row], quantities: &[Quantity]) -> String {
    let mut out = String::new();
    let header: Vec<&str> = AXIS_NAMES
        .iter()
        .copied()
        .chain(std::iter::once("flag"))
        .chain(quantities.iter().map(|q| q.name()))
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let mut fields: Vec<String> = row.point.axis_values().iter().map(|&x| fmt_float(x)).collect();
        fields.push(row.flag.label().to_owned());
        fields.extend(row.values.iter().map(|&x| fmt_float(x)));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// One cycle of a cycle run.
#[derive(Debug)]
pub struct CycleRun {
    pub point: SweepPoint,
    pub result: Result<CycleResult>,
}

#[derive(Debug)]
pub struct CycleOutput {
    pub runs: Vec<CycleRun>,
    /// Cycle traces, prefixed by the values of the swept axes.
    pub csv: String,
    /// One line per cycle: heats, work, efficiencies and temperatures.
    pub summary: String,
    /// `(label, [(ω_c offset, n̄)])` loops for plotting.
    pub loops: Vec<(String, Vec<(f64, f64)>)>,
}

impl CycleOutput {
    pub fn failures(&self) -> usize {
        self.runs.iter().filter(|r| r.result.is_err()).count()
    }
}

/// Runs one engine cycle per grid point, sweeping `δ` over
/// `physics.delta_range` with the configured stroke mode.
pub fn run_cycle_preset(config: &SweepConfig) -> Result<CycleOutput> {
    config.validate()?;
    let varying = config.varying_axes()?;
    let points = grid_points(config)?;
    let delta_final = hz_to_rad(config.physics.delta_range[0]);
    let mode = StrokeMode::from(config.run.stroke);
    let traced: Vec<_> = thread_pool(config.run.threads)?.install(|| {
        points
            .par_iter()
            .map(|p| {
                let r = p
                    .atoms()
                    .and_then(|a| run_cycle_with(&a, &p.params(config)?, delta_final, config.run.steps, mode));
                (*p, r)
            })
            .collect()
    });

    let mut csv = String::new();
    let mut summary = String::from("point,q23,q41,w_net,eta,eta_closed_form,t_eff_hot,t_eff_cold,q12,q34\n");
    let mut loops = Vec::new();
    let mut runs = Vec::new();
    let prefix_header: String = varying.iter().map(|n| format!("{n},")).collect();
    for (k, (point, r)) in traced.into_iter().enumerate() {
        let prefix: String = varying.iter().map(|n| format!("{},", fmt_float(point.value(n)))).collect();
        let label = if varying.is_empty() {
            "cycle".to_owned()
        } else {
            varying.iter().map(|n| format!("{n}={}", point.value(n))).collect::<Vec<_>>().join(" ")
        };
        match r {
            Ok((result, pts)) => {
                let mut buf = Vec::new();
                write_cycle_csv(&pts, &mut buf).expect("in-memory write");
                let text = String::from_utf8(buf).expect("utf-8");
                let mut lines = text.lines();
                let header = lines.next().unwrap_or_default();
                if csv.is_empty() {
                    let _ = writeln!(csv, "{prefix_header}{header}");
                }
                for line in lines {
                    let _ = writeln!(csv, "{prefix}{line}");
                }
                let t = |x: Option<f64>| fmt_float(x.unwrap_or(f64::INFINITY));
                let _ = writeln!(
                    summary,
                    "{k},{},{},{},{},{},{},{},{},{}",
                    fmt_float(result.q23),
                    fmt_float(result.q41),
                    fmt_float(result.w_net),
                    fmt_float(result.eta),
                    fmt_float(result.eta_closed_form),
                    t(result.t_eff_hot),
                    t(result.t_eff_cold),
                    fmt_float(result.q12),
                    fmt_float(result.q34),
                );
                let path = pts
                    .iter()
                    .map(|p| {
                        let n = match p.stage {
                            crate::engine::Stage::Heating | crate::engine::Stage::Compression => p.n_th,
                            _ => p.n_ss,
                        };
                        (p.omega_c_offset, n)
                    })
                    .collect();
                loops.push((label, path));
                runs.push(CycleRun { point, result: Ok(result) });
            }
            Err(e) => {
                warn!("cycle at {label}: {e}");
                runs.push(CycleRun { point, result: Err(e) });
            }
        }
    }
    if csv.is_empty() {
        let _ = writeln!(csv, "{prefix_header}stage,delta,omega_c_offset,n_ss,n_th,q_cum,w_cum");
    }
    Ok(CycleOutput { runs, csv, summary, loops })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::presets::preset_config;

    #[test]
    fn grid_order_is_first_axis_slowest() {
        let cfg = SweepConfig::from_toml("state.a = [1, 2]\nstate.b = [3, 4, 5]\n").unwrap();
        let pts = grid_points(&cfg).unwrap();
        let ab: Vec<(f64, f64)> = pts.iter().map(|p| (p.a, p.b)).collect();
        assert_eq!(ab, vec![(1.0, 3.0), (1.0, 4.0), (1.0, 5.0), (2.0, 3.0), (2.0, 4.0), (2.0, 5.0)]);
    }

    #[test]
    fn above_threshold_rows_are_flagged() {
        // Fully excited pairs with strong pumping and weak cavity loss.
        let cfg = SweepConfig::from_toml(
            "state.a = 1\nstate.b = 0\nstate.c = 0\nphysics.n_pair = [0.001, 50]\nphysics.kappa_hz = 1e3\noutputs.quantities = [\"n_ss\", \"concurrence\", \"eta\"]\n",
        )
        .unwrap();
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.rows[0].flag, RowFlag::Ok);
        assert_eq!(out.rows[1].flag, RowFlag::AboveThreshold);
        assert!(out.rows[1].values[0].is_nan());
        assert_eq!(out.rows[1].values[1], 0.0);
        assert_eq!(out.flagged(), 1);
        assert!(out.csv.lines().nth(2).unwrap().contains(",above_threshold,NaN,"));
    }

    #[test]
    fn invalid_state_is_flagged_failed() {
        let cfg = SweepConfig::from_toml("state.a = 0\nstate.b = 0\nstate.c = 0\n").unwrap();
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.rows[0].flag, RowFlag::Failed);
    }

    #[test]
    fn csv_rows_reproducible_from_library() {
        let cfg = preset_config("fig5", &["state.b = [0.5, 2.5]".into()]).unwrap();
        let out = run_sweep(&cfg).unwrap();
        let header = out.csv.lines().next().unwrap();
        assert_eq!(header, "a,b,c,phi,g_tau,n_pair,delta_hz,kappa_hz,flag,eta,concurrence,n_ss,n_th");
        for (row, line) in out.rows.iter().zip(out.csv.lines().skip(1)) {
            let fields: Vec<f64> = line.split(',').take(8).map(|s| s.parse().unwrap()).collect();
            let p = SweepPoint {
                a: fields[0],
                b: fields[1],
                c: fields[2],
                phi: fields[3],
                g_tau: fields[4],
                n_pair: fields[5],
                delta_hz: fields[6],
                kappa_hz: fields[7],
            };
            assert_eq!(evaluate_point(&p, &cfg).values, row.values);
        }
    }

    #[test]
    fn full_density_matrix_mode_agrees_with_moments() {
        let base = "physics.kappa_hz = 740e3\nphysics.g_tau = 0.01\noutputs.quantities = [\"n_ss\", \"n_th\", \"eta\", \"w_net\"]\n";
        let m = run_sweep(&SweepConfig::from_toml(base).unwrap()).unwrap();
        let dm = run_sweep(&SweepConfig::from_toml(&format!("{base}run.mode = \"full_density_matrix\"\n")).unwrap()).unwrap();
        for (x, y) in m.rows[0].values.iter().zip(&dm.rows[0].values) {
            assert!((x - y).abs() < 1e-6 * x.abs().max(1e-3), "{x} vs {y}");
        }
    }

    #[test]
    fn cycle_preset_two_loops() {
        let cfg = preset_config("fig2", &["run.steps = 20".into()]).unwrap();
        let out = run_cycle_preset(&cfg).unwrap();
        assert_eq!(out.runs.len(), 2);
        assert_eq!(out.failures(), 0);
        assert!(out.csv.starts_with("n_pair,stage,delta,omega_c_offset,n_ss,n_th,q_cum,w_cum\n"));
        let w: Vec<f64> = out.runs.iter().map(|r| r.result.as_ref().unwrap().w_net).collect();
        assert!(w[1] > w[0]);
        assert_eq!(out.loops.len(), 2);
    }
}
