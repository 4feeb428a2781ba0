//! Grid sweeps through the generic switch.

use std::collections::BTreeMap;

use rayon::prelude::*;

use qswitch::cvcase::oracle::{CvFamily, CvScenario};
use qswitch::cvcase::{DisplacementParams, SqueezeParams};
use qswitch::qubitcase::{qubit_state, u2_unitary, RotationParams, U2Params};
use qswitch::states::{
    hamiltonian_control, hamiltonian_qubit_system, BlochState, ControlHamiltonianParams,
    QubitSystemParams, ThermalParams,
};
use qswitch::switchcore::{
    activation_conditions, activation_report, measure_control, n_m_closed, system_scalars,
    ActivationReport, Control, SwitchScenario,
};
use qswitch::Error;

use crate::config::{Family, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::table::{Cell, Table};

/// Unit label for a configuration parameter.
pub fn unit_of(name: &str) -> &'static str {
    match name {
        "beta" => "1/energy",
        "omega" | "t_abs" => "energy",
        n if n.ends_with("_abs") => "1",
        _ => "rad",
    }
}

/// Measurement outcome at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredPoint {
    pub n_m: f64,
    /// `None` when N_M is at or below the post-selection threshold.
    pub delta_sm: Option<f64>,
    pub superposed: bool,
    pub interference: bool,
    pub negative_interference: bool,
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub report: ActivationReport,
    pub measured: Option<MeasuredPoint>,
}

fn get(p: &BTreeMap<String, f64>, name: &str) -> f64 {
    p.get(name).copied().unwrap_or(0.0)
}

fn u2_params(p: &BTreeMap<String, f64>, prefix: &str) -> U2Params {
    U2Params {
        alpha: get(p, &format!("{prefix}_alpha")),
        lambda: get(p, &format!("{prefix}_lambda")),
        gamma: get(p, &format!("{prefix}_gamma")),
        delta: get(p, &format!("{prefix}_delta")),
    }
}

fn bloch(p: &BTreeMap<String, f64>, theta: &str, phi: &str) -> Result<BlochState> {
    BlochState::new(get(p, theta), get(p, phi))
        .map_err(|e| CliError::field(format!("params.{theta}/{phi}"), e.to_string()))
}

fn model<T>(r: qswitch::Result<T>, field: &str) -> Result<T> {
    r.map_err(|e| CliError::field(field, e.to_string()))
}

/// Switch scenario for one set of parameter values.
pub fn scenario(cfg: &ScenarioConfig, p: &BTreeMap<String, f64>) -> Result<SwitchScenario> {
    let (beta, omega) = (get(p, "beta"), get(p, "omega"));
    let t = model(
        ControlHamiltonianParams::new(omega, get(p, "t_abs"), get(p, "t_phase")),
        "params.t_abs",
    )?;
    let control = bloch(p, "theta_c", "phi_c")?;
    match cfg.family {
        Family::Rotations | Family::U2 => {
            let (u1, u2) = if cfg.family == Family::Rotations {
                model(
                    RotationParams::new(get(p, "alpha_x"), get(p, "alpha_y")),
                    "params.alpha_x/alpha_y",
                )?
                .unitaries()
            } else {
                (
                    u2_unitary(&u2_params(p, "u1")),
                    u2_unitary(&u2_params(p, "u2")),
                )
            };
            Ok(SwitchScenario::new(
                model(qubit_state(omega, beta), "params.beta")?,
                Control::Pure(control),
                u1,
                u2,
                hamiltonian_qubit_system(model(QubitSystemParams::new(omega), "params.omega")?),
                hamiltonian_control(t),
            )?)
        }
        Family::Displacements | Family::DispSqueeze => {
            let cv = cv_scenario(cfg, p, t, control)?;
            let n_max = match cfg.n_max {
                Some(n) => n,
                None => model(cv.default_n_max(), "params.beta")?,
            };
            model(cv.switch(n_max), "n_max")
        }
    }
}

fn cv_scenario(
    cfg: &ScenarioConfig,
    p: &BTreeMap<String, f64>,
    t: ControlHamiltonianParams,
    control: BlochState,
) -> Result<CvScenario> {
    let thermal = model(
        ThermalParams::new(get(p, "beta"), get(p, "omega")),
        "params.beta",
    )?;
    let family = if cfg.family == Family::Displacements {
        CvFamily::Displacements(
            model(
                DisplacementParams::new(get(p, "alpha1_abs"), get(p, "alpha1_phase")),
                "params.alpha1_abs",
            )?,
            model(
                DisplacementParams::new(get(p, "alpha2_abs"), get(p, "alpha2_phase")),
                "params.alpha2_abs",
            )?,
        )
    } else {
        CvFamily::DispSqueeze(
            model(
                DisplacementParams::new(get(p, "alpha_abs"), get(p, "alpha_phase")),
                "params.alpha_abs",
            )?,
            model(
                SqueezeParams::new(get(p, "z_abs"), get(p, "z_phase")),
                "params.z_abs",
            )?,
        )
    };
    Ok(CvScenario {
        thermal,
        family,
        t,
        control,
        measurement: None,
    })
}

/// Activation report and, with a measurement configured, the conditioned values.
pub fn evaluate(cfg: &ScenarioConfig, p: &BTreeMap<String, f64>) -> Result<SweepPoint> {
    let s = scenario(cfg, p)?;
    let report = activation_report(&s)?;
    let measured = if cfg.has_measurement() {
        let m = bloch(p, "theta_m", "phi_m")?;
        let c = bloch(p, "theta_c", "phi_c")?;
        let sc = system_scalars(&s.rho_s, &s.u1, &s.u2, &s.h_s);
        let cond = activation_conditions(sc.delta_f(), &c, &m);
        let (n_m, delta_sm) = match measure_control(&s, &m) {
            Ok(r) => (r.n_m, Some(r.delta_sm)),
            Err(Error::NearZeroPostSelection { n_m }) => {
                (n_m.max(n_m_closed(sc.chi, &c, &m)), None)
            }
            Err(e) => return Err(e.into()),
        };
        Some(MeasuredPoint {
            n_m,
            delta_sm,
            superposed: cond.superposed,
            interference: cond.interference,
            negative_interference: cond.negative_interference,
        })
    } else {
        None
    };
    Ok(SweepPoint { report, measured })
}

/// One row per grid point, row-major over the sweep axes.
pub fn run_sweep(cfg: &ScenarioConfig) -> Result<Table> {
    cfg.validate()?;
    let grid = cfg.grid();
    let points: Vec<SweepPoint> = grid
        .par_iter()
        .map(|p| evaluate(cfg, p))
        .collect::<Result<_>>()?;
    let names: Vec<&String> = grid[0].keys().collect();
    let mut table = Table::new();
    for name in &names {
        table.column(name.as_str(), unit_of(name));
    }
    table
        .column("chi_re", "1")
        .column("chi_im", "1")
        .column("delta_qs", "energy")
        .column("delta_s", "energy")
        .column("delta_c", "energy");
    let measured = cfg.has_measurement();
    if measured {
        table
            .column("n_m", "1")
            .column("delta_sm", "energy")
            .column("superposed", "flag")
            .column("interference", "flag")
            .column("negative_interference", "flag")
            .column("divergent", "flag");
    }
    for (p, point) in grid.iter().zip(&points) {
        let r = &point.report;
        let mut row: Vec<Cell> = names.iter().map(|n| Cell::Num(p[n.as_str()])).collect();
        row.extend([
            Cell::Num(r.chi.re),
            Cell::Num(r.chi.im),
            Cell::Num(r.delta_qs),
            Cell::Num(r.delta_s),
            Cell::Num(r.delta_c),
        ]);
        if let Some(m) = point.measured {
            row.extend([
                Cell::Num(m.n_m),
                Cell::opt(m.delta_sm),
                m.superposed.into(),
                m.interference.into(),
                m.negative_interference.into(),
                m.delta_sm.is_none().into(),
            ]);
        } else if measured {
            unreachable!("measurement configured but not evaluated");
        }
        table.push(row);
    }
    Ok(table)
}
