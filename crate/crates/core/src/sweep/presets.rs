//! Built-in configurations for the standard parameter scans: cycle loops,
//! fuel-parameter surfaces, phase interference and interaction-time studies.

use super::config::SweepConfig;
use crate::error::{Error, Result};

/// What a preset is run with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetKind {
    Sweep,
    Cycle,
    Converge,
}

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub kind: PresetKind,
    pub description: &'static str,
    pub toml: &'static str,
}

const FIG2: &str = r#"
name = "fig2"
description = "Cycle loops in the (omega_c, n) plane for N_pair = 1 and 2"
physics.g_hz = 334e3
physics.kappa_hz = 74e3
physics.g_tau = 0.17
physics.n_pair = [1, 2]
physics.delta_range = [-1e6, 0]
state.a = 1
state.b = 5
state.c = 1
state.phi = 0
outputs.csv = "fig2_cycle.csv"
run.steps = 200
run.stroke = "pointwise"
"#;

const FIG3: &str = r#"
name = "fig3"
description = "n_ss, n_th, concurrence and efficiency over the (a, b) plane, c = 1"
physics.g_hz = 334e3
physics.kappa_hz = 74e3
physics.g_tau = 0.03
physics.n_pair = 2
state.a = { min = 0, max = 6, count = 61 }
state.b = { min = 0, max = 6, count = 61 }
state.c = 1
state.phi = 0
outputs.csv = "fig3.csv"
outputs.quantities = ["n_ss", "n_th", "concurrence", "eta"]
"#;

const FIG4: &str = r#"
name = "fig4"
description = "Efficiency against the relative phase phi in [0, 4 pi] for b = 0.25 and 2"
physics.g_hz = 334e3
physics.kappa_hz = 74e3
physics.g_tau = 0.03
physics.n_pair = 2
state.a = 1
state.b = [0.25, 2]
state.c = 1
state.phi = { min = 0, max = 12.566370614359172, count = 401 }
outputs.csv = "fig4.csv"
outputs.quantities = ["eta", "n_ss", "n_th", "concurrence"]
"#;

const FIG5: &str = r#"
name = "fig5"
description = "Efficiency and concurrence against b for a = c = 1, N_pair = 1 and 2"
physics.g_hz = 334e3
physics.kappa_hz = 74e3
physics.g_tau = 0.03
physics.n_pair = [1, 2]
state.a = 1
state.b = { min = 0, max = 6, count = 601 }
state.c = 1
state.phi = 0
outputs.csv = "fig5.csv"
outputs.quantities = ["eta", "concurrence", "n_ss", "n_th"]
"#;

const FIG7A: &str = r#"
name = "fig7a"
description = "Efficiency against a for b = 1, c = 0, N_pair = 1 and 2"
physics.g_hz = 334e3
physics.kappa_hz = 74e3
physics.g_tau = 0.03
physics.n_pair = [1, 2]
state.a = { min = 0, max = 6, count = 601 }
state.b = 1
state.c = 0
state.phi = 0
outputs.csv = "fig7a.csv"
outputs.quantities = ["eta", "concurrence", "n_ss", "n_th"]
"#;

const FIG7B: &str = r#"
name = "fig7b"
description = "Efficiency against c for a = 0, b = 1, N_pair = 1 and 2"
physics.g_hz = 334e3
physics.kappa_hz = 74e3
physics.g_tau = 0.03
physics.n_pair = [1, 2]
state.a = 0
state.b = 1
state.c = { min = 0, max = 6, count = 601 }
state.phi = 0
outputs.csv = "fig7b.csv"
outputs.quantities = ["eta", "concurrence", "n_ss", "n_th"]
"#;

const FIG9: &str = r#"
name = "fig9"
description = "n_ss and n_th against detuning for interaction times g tau = 0.03 and 0.17"
physics.g_hz = 334e3
physics.kappa_hz = 74e3
physics.g_tau = [0.03, 0.17]
physics.n_pair = 1
physics.delta_hz = { min = -1e6, max = 1e6, count = 401 }
state.a = 1
state.b = 5
state.c = 1
state.phi = 0
outputs.csv = "fig9.csv"
outputs.quantities = ["n_ss", "n_th"]
"#;

const CONVERGE: &str = r#"
name = "converge"
description = "Fock truncation, collision-map order and interaction-time studies"
physics.g_hz = 334e3
physics.kappa_hz = 740e3
physics.g_tau = 0.01
physics.n_pair = 1
state.a = 1
state.b = 1
state.c = 1
state.phi = 0
outputs.csv = "converge.csv"
run.mode = "full_density_matrix"
converge.fock_dims = [4, 6, 8, 10, 12, 14, 16, 20, 24]
converge.order_g_tau = [0.04, 0.02, 0.01, 0.005]
converge.order_dim = 8
converge.order_samples = 16
converge.contrast_g_tau = [0.03, 0.17]
converge.contrast_delta_hz = { min = -1e6, max = 1e6, count = 41 }
"#;

pub const PRESETS: [Preset; 8] = [
    Preset { name: "fig2", kind: PresetKind::Cycle, description: "cycle loops for N_pair = 1, 2", toml: FIG2 },
    Preset { name: "fig3", kind: PresetKind::Sweep, description: "(a, b) surfaces at c = 1", toml: FIG3 },
    Preset { name: "fig4", kind: PresetKind::Sweep, description: "phase interference, phi in [0, 4 pi]", toml: FIG4 },
    Preset { name: "fig5", kind: PresetKind::Sweep, description: "efficiency vs b at a = c = 1", toml: FIG5 },
    Preset { name: "fig7a", kind: PresetKind::Sweep, description: "efficiency vs a at b = 1, c = 0", toml: FIG7A },
    Preset { name: "fig7b", kind: PresetKind::Sweep, description: "efficiency vs c at a = 0, b = 1", toml: FIG7B },
    Preset { name: "fig9", kind: PresetKind::Sweep, description: "n_ss, n_th vs detuning for two g tau", toml: FIG9 },
    Preset { name: "converge", kind: PresetKind::Converge, description: "truncation, order and interaction-time studies", toml: CONVERGE },
];

/// Aliases accepted in addition to the canonical names.
const ALIASES: [(&str, &str); 3] = [("fig_phase", "fig4"), ("fig9_converge", "converge"), ("cycle", "fig2")];

pub fn find_preset(name: &str) -> Result<&'static Preset> {
    let canonical = ALIASES.iter().find(|(alias, _)| *alias == name).map_or(name, |(_, c)| c);
    PRESETS
        .iter()
        .find(|p| p.name == canonical)
        .ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))
}

/// Configuration of a preset with overrides applied.
pub fn preset_config(name: &str, overrides: &[String]) -> Result<SweepConfig> {
    SweepConfig::from_toml_with_overrides(find_preset(name)?.toml, overrides)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses() {
        for p in PRESETS {
            let cfg = preset_config(p.name, &[]).unwrap();
            assert_eq!(cfg.name.as_deref(), Some(p.name));
        }
        assert_eq!(find_preset("fig_phase").unwrap().name, "fig4");
        assert!(find_preset("fig99").is_err());
    }

    #[test]
    fn fig3_grid_shape() {
        let cfg = preset_config("fig3", &[]).unwrap();
        assert_eq!(cfg.varying_axes().unwrap(), vec!["a", "b"]);
        assert_eq!(cfg.state.a.values().unwrap().len(), 61);
    }
}
