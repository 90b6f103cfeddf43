use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use super::config::SweepConfig;
use super::run::{fmt_float, grid_points, thread_pool};
use crate::atoms::{build_pure_family, AtomPairState, PureFamilyParams};
use crate::cavity::{
    exact_map, steady_state_moments, steady_state_numeric, superoperator_second_order, CavityState,
    JointUnitary, SteadyOptions,
};
use crate::error::{Error, Result};
use crate::linalg::max_abs;
use crate::reservoir::{reservoir_coefficients, InteractionParams};
use crate::units::hz_to_rad;
use crate::C64;

/// Largest Fock dimension accepted by the truncation study.
pub const CONVERGE_DIM_BUDGET: usize = 48;

/// Random member of the pure-state family with amplitudes in `[0, 2)`.
pub fn random_pure_family<R: Rng>(rng: &mut R) -> AtomPairState {
    loop {
        let p = PureFamilyParams::new(
            2.0 * rng.random::<f64>(),
            2.0 * rng.random::<f64>(),
            2.0 * rng.random::<f64>(),
            std::f64::consts::TAU * rng.random::<f64>(),
        );
        if let Ok(s) = build_pure_family(p) {
            return s;
        }
    }
}

/// Random mixed cavity state supported on levels `0..levels` of a
/// `dim`-dimensional space.
pub fn random_cavity_state<R: Rng>(rng: &mut R, dim: usize, levels: usize) -> Result<CavityState> {
    if levels == 0 || levels > dim {
        return Err(Error::InvalidParameter(format!("{levels} levels in dimension {dim}")));
    }
    let g = DMatrix::from_fn(levels, levels, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let m = &g * g.adjoint();
    let tr: f64 = (0..levels).map(|k| m[(k, k)].re).sum();
    let mut rho = DMatrix::zeros(dim, dim);
    rho.view_mut((0, 0), (levels, levels)).copy_from(&(m / C64::new(tr, 0.0)));
    CavityState::new(rho)
}

/// Largest element-wise difference between the exact collision map and its
/// second-order expansion over `samples` random inputs, for each `gτ`.
///
/// Cavity inputs are supported two levels below the truncation so that the
/// exact map is unaffected by it. The same inputs are used for every `gτ`.
pub fn order_residuals(
    g_taus: &[f64],
    dim: usize,
    samples: usize,
    delta_tau: f64,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if dim < 4 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let inputs: Vec<(AtomPairState, CavityState)> = (0..samples)
        .map(|_| Ok((random_pure_family(&mut rng), random_cavity_state(&mut rng, dim, dim - 2)?)))
        .collect::<Result<_>>()?;
    g_taus
        .iter()
        .map(|&gt| {
            let g = 1.0;
            let params = InteractionParams::new(g, gt / g, 0.0, delta_tau / (gt / g), 1.0, 0.0)?;
            let u = JointUnitary::new(&params, dim)?;
            let mut worst: f64 = 0.0;
            for (atoms, cavity) in &inputs {
                let exact = exact_map(cavity, atoms, &u)?;
                let approx = superoperator_second_order(cavity, atoms, &params)?;
                worst = worst.max(max_abs(&(exact.state.matrix() - approx.matrix())));
            }
            Ok((gt, worst))
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// One line of the convergence report.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeRow {
    /// `fock_dim`, `order` or `interaction_time_<gτ>`.
    pub study: String,
    pub x: f64,
    pub n_ss: f64,
    pub n_th: f64,
    pub tail_mass: f64,
    pub residual: f64,
    pub slope: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergeOutput {
    pub rows: Vec<ConvergeRow>,
    pub slope: f64,
    pub csv: String,
}

/// Runs three studies at the first grid point of the configuration:
///
/// * `fock_dim`: numerical `n̄_ss` against the Fock dimension, with the tail
///   population and the relative deviation from the closed-form moments;
/// * `order`: exact-versus-second-order collision-map residual against `gτ`
///   with the fitted log–log slope;
/// * `interaction_time_<gτ>`: `n̄_ss` and `n̄_th` across detuning for each
///   contrasted interaction time.
pub fn run_convergence_study(config: &SweepConfig) -> Result<ConvergeOutput> {
    config.validate()?;
    let cc = &config.converge;
    if let Some(&d) = cc.fock_dims.iter().find(|&&d| d > CONVERGE_DIM_BUDGET) {
        return Err(Error::DimensionBudget { required: d, budget: CONVERGE_DIM_BUDGET });
    }
    let point = grid_points(config)?[0];
    let atoms = point.atoms()?;
    let params = point.params(config)?;
    let coeffs = reservoir_coefficients(&atoms, &params)?;
    let moments = steady_state_moments(&coeffs)?;
    let pool = thread_pool(config.run.threads)?;
    let nan = f64::NAN;

    let opts = SteadyOptions { tol: config.run.tol, tail_tolerance: None, ..Default::default() };
    let mut rows: Vec<ConvergeRow> = pool.install(|| {
        cc.fock_dims
            .par_iter()
            .map(|&d| {
                let hot = steady_state_numeric(&coeffs, d, &opts)?;
                let cold = steady_state_numeric(&coeffs.without_drive(), d, &opts)?;
                Ok(ConvergeRow {
                    study: "fock_dim".into(),
                    x: d as f64,
                    n_ss: hot.mean_photon(),
                    n_th: cold.mean_photon(),
                    tail_mass: hot.tail_mass(),
                    residual: (hot.mean_photon() - moments.n_ss).abs() / moments.n_ss,
                    slope: nan,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let delta_tau = params.delta * params.tau;
    let residuals = order_residuals(&cc.order_g_tau, cc.order_dim, cc.order_samples, delta_tau, cc.seed)?;
    let slope = fit_loglog_slope(&residuals);
    rows.extend(residuals.iter().map(|&(gt, r)| ConvergeRow {
        study: "order".into(),
        x: gt,
        n_ss: nan,
        n_th: nan,
        tail_mass: nan,
        residual: r,
        slope,
    }));

    let deltas = cc.contrast_delta_hz.values()?;
    for &gt in &cc.contrast_g_tau {
        for &dhz in &deltas {
            let p = params.with_delta(hz_to_rad(dhz));
            let p = InteractionParams { tau: gt / p.g, ..p };
            let (n_ss, n_th) = match reservoir_coefficients(&atoms, &p).and_then(|c| steady_state_moments(&c)) {
                Ok(m) => (m.n_ss, m.n_th),
                Err(Error::AboveThreshold { .. }) => (nan, nan),
                Err(e) => return Err(e),
            };
            rows.push(ConvergeRow {
                study: format!("interaction_time_{gt}"),
                x: dhz,
                n_ss,
                n_th,
                tail_mass: nan,
                residual: nan,
                slope: nan,
            });
        }
    }

    let mut csv = String::from("study,x,n_ss,n_th,tail_mass,residual,slope\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.study,
            fmt_float(r.x),
            fmt_float(r.n_ss),
            fmt_float(r.n_th),
            fmt_float(r.tail_mass),
            fmt_float(r.residual),
            fmt_float(r.slope)
        );
    }
    Ok(ConvergeOutput { rows, slope, csv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::presets::preset_config;

    #[test]
    fn slope_fit_recovers_power_law() {
        let pts: Vec<(f64, f64)> = [0.1, 0.2, 0.4].iter().map(|&x: &f64| (x, 5.0 * x.powi(3))).collect();
        assert!((fit_loglog_slope(&pts) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = StdRng::seed_from_u64(1);
        let s = random_cavity_state(&mut rng, 8, 6).unwrap();
        assert_eq!(s.tail_mass(), 0.0);
        assert!(s.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn convergence_preset() {
        let cfg = preset_config(
            "converge",
            &["converge.fock_dims = [6, 12, 20]".into(), "converge.contrast_delta_hz = [0.0]".into()],
        )
        .unwrap();
        let out = run_convergence_study(&cfg).unwrap();
        assert!((2.7..=3.3).contains(&out.slope), "slope {}", out.slope);
        let dims: Vec<&ConvergeRow> = out.rows.iter().filter(|r| r.study == "fock_dim").collect();
        let last = dims.last().unwrap();
        assert!(last.tail_mass < 1e-6 && last.residual < 1e-6);
        let t = |gt: &str| out.rows.iter().find(|r| r.study == format!("interaction_time_{gt}")).unwrap().n_th;
        assert!(t("0.17") > 2.0 * t("0.03"));
        assert!(out.csv.starts_with("study,x,n_ss,n_th,tail_mass,residual,slope\n"));
    }

    #[test]
    fn dimension_budget_enforced() {
        let cfg = preset_config("converge", &["converge.fock_dims = [400]".into()]).unwrap();
        assert!(matches!(run_convergence_study(&cfg), Err(Error::DimensionBudget { .. })));
    }
}
