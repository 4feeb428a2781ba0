//! U(2) searches driven by a config.

use std::collections::BTreeMap;

use qswitch::qubitcase::{minimize_delta_qs_u2, minimize_delta_sm_u2, U2Minimum};
use qswitch::states::{BlochState, ControlHamiltonianParams};

use crate::config::{Family, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::sweep::unit_of;
use crate::table::{Cell, Table};

pub const DEFAULT_BUDGET: usize = 32_000;

fn angles(p: &BTreeMap<String, f64>, theta: &str, phi: &str) -> Result<BlochState> {
    BlochState::new(p[theta], p[phi])
        .map_err(|e| CliError::field(format!("params.{theta}/{phi}"), e.to_string()))
}

/// Minimum at one parameter point: Δ_{S,M} with a measurement, Δ_QS otherwise.
pub fn minimize_point(cfg: &ScenarioConfig, p: &BTreeMap<String, f64>) -> Result<U2Minimum> {
    let budget = cfg.budget.unwrap_or(DEFAULT_BUDGET);
    let c = angles(p, "theta_c", "phi_c")?;
    let res = if cfg.has_measurement() {
        let m = angles(p, "theta_m", "phi_m")?;
        minimize_delta_sm_u2(p["omega"], p["beta"], &c, &m, budget, cfg.seed)
    } else {
        let t = ControlHamiltonianParams::new(p["omega"], p["t_abs"], p["t_phase"])
            .map_err(|e| CliError::field("params.t_abs", e.to_string()))?;
        minimize_delta_qs_u2(&t, p["beta"], &c, budget, cfg.seed)
    };
    res.map_err(|e| CliError::field("budget", e.to_string()))
}

/// One row per grid point with the minimum, the optimal angles and the seed.
pub fn run_minimize(cfg: &ScenarioConfig) -> Result<Table> {
    cfg.validate()?;
    if cfg.family != Family::U2 {
        return Err(CliError::field(
            "family",
            format!("minimize needs family `u2`, found `{}`", cfg.family.name()),
        ));
    }
    let grid = cfg.grid();
    let names: Vec<String> = grid[0]
        .keys()
        .filter(|k| !k.starts_with("u1_") && !k.starts_with("u2_"))
        .cloned()
        .collect();
    let mut table = Table::new();
    for n in &names {
        table.column(n.as_str(), unit_of(n));
    }
    let objective = if cfg.has_measurement() {
        "min_delta_sm"
    } else {
        "min_delta_qs"
    };
    table.column(objective, "energy");
    for k in ["u1", "u2"] {
        for a in ["lambda", "gamma", "delta"] {
            table.column(format!("{k}_{a}"), "rad");
        }
    }
    table
        .column("chi_re", "1")
        .column("chi_im", "1")
        .column("epsilon", "1")
        .column("f", "1")
        .column("g", "1")
        .column("n_m", "1")
        .column("divergent_evals", "count")
        .column("evals", "count")
        .column("seed", "count");
    for p in &grid {
        let m = minimize_point(cfg, p)?;
        let mut row: Vec<Cell> = names.iter().map(|n| Cell::Num(p[n])).collect();
        row.push(Cell::Num(m.value));
        for u in [m.u1, m.u2] {
            row.extend([Cell::Num(u.lambda), Cell::Num(u.gamma), Cell::Num(u.delta)]);
        }
        row.extend([
            Cell::Num(m.chi.re),
            Cell::Num(m.chi.im),
            Cell::opt(m.epsilon),
            Cell::Num(m.f),
            Cell::Num(m.g),
            Cell::opt(m.n_m),
            Cell::Int(m.divergent_evals as i64),
            Cell::Int(m.evals as i64),
            Cell::Text(m.seed.to_string()),
        ]);
        table.push(row);
    }
    Ok(table)
}
