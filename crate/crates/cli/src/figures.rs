//! Datasets for the nine reference plots.
//!
//! | id   | content |
//! |------|---------|
//! | fig1 | rotation pair: Δ_QS against β for several |t| |
//! | fig2 | rotation pair at β → 0: argmin over φ_M (left), Δ_{S,M} against φ_M (right) |
//! | fig3 | U(2) pairs: min Δ_QS against |t| for β ∈ {0, 0.1, 0.2} and three θ |
//! | fig4 | U(2) pairs: min Δ_{S,M} at eight φ_M for β ∈ {0, 0.1, 0.2} |
//! | fig5 | displacement pair: Δ_QS over (|α1|, |α2|) |
//! | fig6 | displacement pair, |α1| = |α2|: Δ_QS against |α| with |α|_min |
//! | fig7 | displacement and squeeze: Δ_QS over (|α|, |z|) |
//! | fig8 | displacement and squeeze: Δ_{S,M} over (|α|, |z|) for ξ − 2φ ∈ {0, π} |
//! | fig9 | displacement and squeeze at β = ∞: Δ_{S,M} against |α| = |z| |
//!
//! The U(2) searches run with seed 0 and a budget of 32000 evaluations.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use qswitch::cvcase::{
    alpha_min, delta_qs_disp_squeeze, delta_qs_displacements, delta_qs_displacements_simplified,
    delta_sm_aligned, printed, Conditioned, DisplacementParams, SqueezeAlignment, SqueezeParams,
};
use qswitch::optim::golden_section;
use qswitch::qubitcase::{
    delta_qs_rotations_closed, delta_sm_rotations_beta0, minimize_delta_qs_u2,
    minimize_delta_sm_u2, qubit_state, RotationParams,
};
use qswitch::states::{BlochState, ControlHamiltonianParams, ThermalParams};
use qswitch::switchcore::{chi, n_m_closed};
use qswitch::{tolerance, Error};

use crate::error::{CliError, Result};
use crate::table::{zero_crossings, Cell, Table};

pub const SEED: u64 = 0;
pub const BUDGET: usize = 32_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FigureId(u8);

impl FigureId {
    pub fn all() -> impl Iterator<Item = FigureId> {
        (1..=9).map(FigureId)
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn file_name(self) -> String {
        format!("{self}.csv")
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fig{}", self.0)
    }
}

impl FromStr for FigureId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.strip_prefix("fig").and_then(|n| n.parse::<u8>().ok()) {
            Some(n @ 1..=9) if s == format!("fig{n}") => Ok(FigureId(n)),
            _ => Err(CliError::UnknownFigure(s.to_string())),
        }
    }
}

pub fn emit(id: FigureId) -> Result<Table> {
    match id.0 {
        1 => fig1(),
        2 => fig2(),
        3 => fig3(),
        4 => fig4(),
        5 => fig5(),
        6 => fig6(),
        7 => fig7(),
        8 => fig8(),
        9 => fig9(),
        _ => unreachable!("figure ids are validated on construction"),
    }
}

fn steps(count: usize, step: f64) -> Vec<f64> {
    (0..count).map(|k| k as f64 * step).collect()
}

fn plus() -> BlochState {
    BlochState::plus()
}

fn conditioned(r: qswitch::Result<Conditioned>) -> Result<(Option<f64>, Option<f64>)> {
    match r {
        Ok(c) => Ok((Some(c.n_m), Some(c.delta_sm))),
        Err(Error::NearZeroPostSelection { n_m }) => Ok((Some(n_m), None)),
        Err(e) => Err(e.into()),
    }
}

fn fig1() -> Result<Table> {
    let r = RotationParams::new(FRAC_PI_2, PI)?;
    let mut table = Table::with_columns(&[
        ("t_abs", "energy"),
        ("beta", "1/energy"),
        ("delta_qs", "energy"),
    ]);
    for t_abs in steps(6, 0.1) {
        let t = ControlHamiltonianParams::new(1.0, t_abs, 0.0)?;
        for k in 0..=100 {
            let beta = k as f64 / 10.0;
            let v = delta_qs_rotations_closed(beta, &t, &r, &plus());
            table.push(vec![t_abs.into(), beta.into(), v.into()]);
        }
    }
    Ok(table)
}

/// N_M and Δ_{S,M} for α_x = α_y = α at β = 0, |+⟩ control, θ_M = π/2.
fn rotation_beta0(alpha: f64, phi_m: f64) -> Result<(f64, Option<f64>)> {
    let r = RotationParams::new(alpha, alpha)?;
    let (u1, u2) = r.unitaries();
    let x = chi(&u1, &u2, &qubit_state(1.0, 0.0)?)?;
    let m = BlochState::new(FRAC_PI_2, phi_m)?;
    let n_m = n_m_closed(x, &plus(), &m);
    if n_m <= tolerance::NM {
        return Ok((n_m, None));
    }
    Ok((
        n_m,
        Some(delta_sm_rotations_beta0(1.0, alpha, FRAC_PI_2, phi_m)?),
    ))
}

fn fig2() -> Result<Table> {
    let mut table = Table::with_columns(&[
        ("panel", "label"),
        ("alpha", "rad"),
        ("phi_m", "rad"),
        ("n_m", "1"),
        ("delta_sm", "energy"),
        ("divergent", "flag"),
    ]);
    let grid = 720;
    let h = TAU / grid as f64;
    let alphas: Vec<f64> = (1..400)
        .filter(|&k| k != 200)
        .map(|k| k as f64 * PI / 200.0)
        .collect();
    let left: Vec<(f64, f64)> = alphas
        .par_iter()
        .map(|&alpha| {
            let objective = |phi: f64| {
                rotation_beta0(alpha, phi.rem_euclid(TAU))
                    .ok()
                    .and_then(|(_, v)| v)
                    .unwrap_or(f64::INFINITY)
            };
            let (k, _) = (0..grid).map(|k| (k, objective(k as f64 * h))).fold(
                (0, f64::INFINITY),
                |best, cur| if cur.1 < best.1 { cur } else { best },
            );
            let centre = k as f64 * h;
            let (x, _) = golden_section(objective, centre - h, centre + h, 1e-12);
            (alpha, x.rem_euclid(TAU))
        })
        .collect();
    for (alpha, phi) in left {
        let (n_m, v) = rotation_beta0(alpha, phi)?;
        table.push(vec![
            "left".into(),
            alpha.into(),
            phi.into(),
            n_m.into(),
            Cell::opt(v),
            v.is_none().into(),
        ]);
    }
    for k in [1.0, 2.0, 3.0, 4.0, 5.0] {
        let alpha = k * PI / 6.0;
        for j in 0..180 {
            let phi = j as f64 * PI / 90.0;
            let (n_m, v) = rotation_beta0(alpha, phi)?;
            table.push(vec![
                "right".into(),
                alpha.into(),
                phi.into(),
                n_m.into(),
                Cell::opt(v),
                v.is_none().into(),
            ]);
        }
    }
    Ok(table)
}

fn fig3() -> Result<Table> {
    let mut table = Table::with_columns(&[
        ("beta", "1/energy"),
        ("theta", "rad"),
        ("t_abs", "energy"),
        ("min_delta_qs", "energy"),
        ("slope_line", "energy"),
        ("epsilon", "1"),
        ("evals", "count"),
        ("seed", "count"),
    ]);
    for beta in [0.0, 0.1, 0.2] {
        for theta in [0.0, PI / 6.0, PI / 3.0] {
            for t_abs in steps(9, 0.25) {
                let t = ControlHamiltonianParams::new(1.0, t_abs, theta)?;
                let m = minimize_delta_qs_u2(&t, beta, &plus(), BUDGET, SEED)?;
                table.push(vec![
                    beta.into(),
                    theta.into(),
                    t_abs.into(),
                    m.value.into(),
                    (-2.0 * theta.cos() * t_abs).into(),
                    Cell::opt(m.epsilon),
                    Cell::Int(m.evals as i64),
                    Cell::Int(SEED as i64),
                ]);
            }
        }
    }
    Ok(table)
}

fn fig4() -> Result<Table> {
    let mut table = Table::with_columns(&[
        ("beta", "1/energy"),
        ("phi_m", "rad"),
        ("min_delta_sm", "energy"),
        ("n_m", "1"),
        ("f", "1"),
        ("g", "1"),
        ("divergent_evals", "count"),
        ("evals", "count"),
        ("seed", "count"),
    ]);
    for beta in [0.0, 0.1, 0.2] {
        for k in 0..8 {
            let phi_m = k as f64 * PI / 4.0;
            let m = BlochState::new(FRAC_PI_2, phi_m)?;
            let res = minimize_delta_sm_u2(1.0, beta, &plus(), &m, BUDGET, SEED)?;
            table.push(vec![
                beta.into(),
                phi_m.into(),
                res.value.into(),
                Cell::opt(res.n_m),
                res.f.into(),
                res.g.into(),
                Cell::Int(res.divergent_evals as i64),
                Cell::Int(res.evals as i64),
                Cell::Int(SEED as i64),
            ]);
        }
    }
    Ok(table)
}

fn fig5() -> Result<Table> {
    let mut table = Table::with_columns(&[
        ("t_abs", "energy"),
        ("alpha1_abs", "1"),
        ("alpha2_abs", "1"),
        ("delta_qs", "energy"),
        ("contour", "flag"),
    ]);
    let axis = steps(41, 0.05);
    for t_abs in [0.5, 1.0, 2.0] {
        let t = ControlHamiltonianParams::new(1.0, t_abs, 0.0)?;
        let mut values = Vec::new();
        for &a1 in &axis {
            for &a2 in &axis {
                let d1 = DisplacementParams::new(a1, FRAC_PI_2)?;
                let d2 = DisplacementParams::new(a2, 0.0)?;
                values.push((a1, a2, delta_qs_displacements(&t, &d1, &d2, &plus())));
            }
        }
        let crossings = zero_crossings(
            &values.iter().map(|v| Some(v.2)).collect::<Vec<_>>(),
            axis.len(),
        );
        for ((a1, a2, v), c) in values.into_iter().zip(crossings) {
            table.push(vec![t_abs.into(), a1.into(), a2.into(), v.into(), c.into()]);
        }
    }
    Ok(table)
}

fn fig6() -> Result<Table> {
    let mut table = Table::with_columns(&[
        ("t_abs", "energy"),
        ("alpha_abs", "1"),
        ("delta_qs", "energy"),
        ("alpha_min", "1"),
    ]);
    for t_abs in [0.5, 1.0, 2.0, 5.0] {
        let amin = match alpha_min(1.0, t_abs) {
            Ok(a) => Some(a),
            Err(Error::NoSolution(_)) => None,
            Err(e) => return Err(e.into()),
        };
        for a in steps(201, 0.01) {
            let v = delta_qs_displacements_simplified(1.0, t_abs, a);
            table.push(vec![t_abs.into(), a.into(), v.into(), Cell::opt(amin)]);
        }
    }
    Ok(table)
}

fn fig7() -> Result<Table> {
    let mut table = Table::with_columns(&[
        ("t_abs", "energy"),
        ("alpha_abs", "1"),
        ("z_abs", "1"),
        ("delta_qs", "energy"),
        ("contour", "flag"),
    ]);
    let thermal = ThermalParams::new(1.0, 1.0)?;
    let alphas = steps(51, 0.05);
    let zs = steps(51, 0.03);
    for t_abs in [0.0, 20.0, 30.0] {
        let t = ControlHamiltonianParams::new(1.0, t_abs, 0.0)?;
        let mut values = Vec::new();
        for &a in &alphas {
            for &z in &zs {
                let d = DisplacementParams::new(a, 0.0)?;
                let s = SqueezeParams::new(z, 0.0)?;
                values.push((a, z, delta_qs_disp_squeeze(&thermal, &t, &d, &s, &plus())));
            }
        }
        let crossings = zero_crossings(
            &values.iter().map(|v| Some(v.2)).collect::<Vec<_>>(),
            zs.len(),
        );
        for ((a, z, v), c) in values.into_iter().zip(crossings) {
            table.push(vec![t_abs.into(), a.into(), z.into(), v.into(), c.into()]);
        }
    }
    Ok(table)
}

const MEASUREMENT_PHASES: [f64; 4] = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];

fn alignment_label(a: SqueezeAlignment) -> &'static str {
    match a {
        SqueezeAlignment::Aligned => "0",
        SqueezeAlignment::Opposed => "pi",
    }
}

/// Δ_{S,M} rows for ξ − 2φ ∈ {0, π}, φ_M ∈ {0, π/2, π, 3π/2} over an (|α|, |z|) list.
fn aligned_rows(
    thermal: &ThermalParams,
    points: &[(f64, f64)],
    inner: usize,
    table: &mut Table,
    contour: bool,
) -> Result<()> {
    for alignment in [SqueezeAlignment::Aligned, SqueezeAlignment::Opposed] {
        for phi_m in MEASUREMENT_PHASES {
            let m = BlochState::new(FRAC_PI_2, phi_m)?;
            let mut block = Vec::with_capacity(points.len());
            for &(a, z) in points {
                let (n_m, v) =
                    conditioned(delta_sm_aligned(thermal, a, z, alignment, &plus(), &m))?;
                let shown = match alignment {
                    SqueezeAlignment::Aligned => printed::delta_sm_xi0(thermal, a, z, &plus(), &m),
                    SqueezeAlignment::Opposed => printed::delta_sm_xipi(thermal, a, z, &plus(), &m),
                };
                let (_, pv) = conditioned(shown)?;
                block.push((a, z, n_m, v, pv));
            }
            let crossings = zero_crossings(&block.iter().map(|b| b.3).collect::<Vec<_>>(), inner);
            for ((a, z, n_m, v, pv), c) in block.into_iter().zip(crossings) {
                let mut row = vec![
                    alignment_label(alignment).into(),
                    phi_m.into(),
                    a.into(),
                    z.into(),
                    Cell::opt(n_m),
                    Cell::opt(v),
                    v.is_none().into(),
                ];
                if contour {
                    row.push(c.into());
                }
                row.extend([Cell::opt(pv), pv.is_none().into()]);
                table.push(row);
            }
        }
    }
    Ok(())
}

fn fig8() -> Result<Table> {
    let mut table = Table::with_columns(&[
        ("xi_minus_2phi", "label"),
        ("phi_m", "rad"),
        ("alpha_abs", "1"),
        ("z_abs", "1"),
        ("n_m", "1"),
        ("delta_sm", "energy"),
        ("divergent", "flag"),
        ("contour", "flag"),
        ("printed_delta_sm", "energy"),
        ("printed_divergent", "flag"),
    ]);
    let thermal = ThermalParams::new(1.0, 1.0)?;
    let axis = steps(31, 0.05);
    let points: Vec<(f64, f64)> = axis
        .iter()
        .flat_map(|&a| axis.iter().map(move |&z| (a, z)))
        .collect();
    aligned_rows(&thermal, &points, axis.len(), &mut table, true)?;
    Ok(table)
}

fn fig9() -> Result<Table> {
    let mut table = Table::with_columns(&[
        ("xi_minus_2phi", "label"),
        ("phi_m", "rad"),
        ("alpha_abs", "1"),
        ("z_abs", "1"),
        ("n_m", "1"),
        ("delta_sm", "energy"),
        ("divergent", "flag"),
        ("printed_delta_sm", "energy"),
        ("printed_divergent", "flag"),
    ]);
    let thermal = ThermalParams::new(f64::INFINITY, 1.0)?;
    let points: Vec<(f64, f64)> = steps(151, 0.01).into_iter().map(|r| (r, r)).collect();
    aligned_rows(&thermal, &points, points.len(), &mut table, false)?;
    Ok(table)
}

/// Outcome of comparing a regenerated dataset with its baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct Regression {
    pub identical: bool,
    /// Same header and shape, every numeric cell within tolerance and every
    /// other cell equal.
    pub within_tolerance: bool,
    pub max_gap: f64,
}

/// Closed-form datasets are held to 1e−8 per cell.
pub const REGRESSION_TOL: f64 = 1e-8;

pub fn compare(baseline: &str, fresh: &str, tol: f64) -> Result<Regression> {
    let read = |s: &str| -> Result<Vec<csv::StringRecord>> {
        Ok(csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(s.as_bytes())
            .records()
            .collect::<std::result::Result<_, _>>()?)
    };
    let (a, b) = (read(baseline)?, read(fresh)?);
    let mut ok = a.len() == b.len();
    let mut max_gap = 0.0f64;
    for (ra, rb) in a.iter().zip(&b) {
        ok &= ra.len() == rb.len();
        for (x, y) in ra.iter().zip(rb) {
            match (x.parse::<f64>(), y.parse::<f64>()) {
                (Ok(u), Ok(v)) if u.is_finite() && v.is_finite() => {
                    let gap = (u - v).abs();
                    max_gap = max_gap.max(gap);
                    ok &= gap <= tol;
                }
                _ => ok &= x == y,
            }
        }
    }
    Ok(Regression {
        identical: baseline == fresh,
        within_tolerance: ok,
        max_gap,
    })
}
