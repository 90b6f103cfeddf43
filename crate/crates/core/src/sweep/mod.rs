//! Parameter sweeps: configuration, presets, parallel evaluation with
//! deterministic CSV output, cycle traces and convergence studies.

mod config;
mod converge;
mod presets;
mod run;
pub mod svg;

pub use config::{
    Axis, ConvergeConfig, Mode, OutputConfig, PhysicsConfig, Quantity, RunConfig, StateConfig,
    StrokeConfig, SweepConfig, AXIS_NAMES,
};
pub use converge::{
    fit_loglog_slope, order_residuals, random_cavity_state, random_pure_family, run_convergence_study,
    ConvergeOutput, ConvergeRow, CONVERGE_DIM_BUDGET,
};
pub use presets::{find_preset, preset_config, Preset, PresetKind, PRESETS};
pub use run::{
    evaluate_point, fmt_float, grid_points, render_sweep_csv, run_cycle_preset, run_sweep, CycleOutput,
    CycleRun, Row, RowFlag, SweepOutput, SweepPoint,
};

/// SVG rendering of a sweep: line plots when at most one axis is a grid
/// (extra list axes become separate series), a heat map of the first
/// quantity over two grids.
pub fn sweep_svg(config: &SweepConfig, output: &SweepOutput) -> crate::Result<String> {
    let varying = config.varying_axes()?;
    let quantities = &config.outputs.quantities;
    let title = config.name.clone().unwrap_or_else(|| "sweep".into());
    let col = |r: &Row, q: usize| r.values[q];
    match varying.as_slice() {
        [] | [_] => {
            let x_axis = varying.first().copied().unwrap_or("a");
            let series = quantities
                .iter()
                .enumerate()
                .map(|(k, q)| (q.name().to_owned(), output.rows.iter().map(|r| (r.point.value(x_axis), col(r, k))).collect()))
                .collect::<Vec<_>>();
            Ok(svg::line_plot(&title, x_axis, "value", &series))
        }
        [first, second] => {
            let counts: Vec<usize> =
                config.axes().iter().map(|a| a.values().map(|v| v.len()).unwrap_or(1)).collect();
            let idx = |n: &str| AXIS_NAMES.iter().position(|a| *a == n).expect("axis");
            let grid = |n: &str| matches!(config.axes()[idx(n)], Axis::Grid { .. });
            if grid(first) && grid(second) {
                let xs = config.axes()[idx(first)].values()?;
                let ys = config.axes()[idx(second)].values()?;
                let values: Vec<Vec<f64>> =
                    output.rows.chunks(ys.len()).map(|chunk| chunk.iter().map(|r| col(r, 0)).collect()).collect();
                Ok(svg::heatmap(&format!("{title}: {}", quantities[0]), first, second, &xs, &ys, &values))
            } else {
                // The axis with fewer values labels the series.
                let (series_axis, x_axis) =
                    if counts[idx(first)] <= counts[idx(second)] { (*first, *second) } else { (*second, *first) };
                let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
                for r in &output.rows {
                    let label = format!("{} {series_axis}={}", quantities[0], r.point.value(series_axis));
                    let entry = match series.iter_mut().find(|(l, _)| *l == label) {
                        Some(e) => e,
                        None => {
                            series.push((label, Vec::new()));
                            series.last_mut().expect("pushed")
                        }
                    };
                    entry.1.push((r.point.value(x_axis), col(r, 0)));
                }
                Ok(svg::line_plot(&title, x_axis, quantities[0].name(), &series))
            }
        }
        _ => unreachable!("validated to at most two axes"),
    }
}

/// SVG of cycle loops in the `(ω_c − ω_a, n̄)` plane.
pub fn cycle_svg(output: &CycleOutput) -> String {
    svg::line_plot("engine cycle", "omega_c - omega_a (rad/s)", "photon number", &output.loops)
}
