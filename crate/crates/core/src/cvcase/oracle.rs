//! Truncated-Fock evaluation of the closed forms through the generic switch.

use super::{
    chi_disp_squeeze, chi_displacements, delta_f_disp_squeeze, delta_qs_disp_squeeze,
    delta_qs_displacements, delta_sm_disp_squeeze, displacement_matrix, e12_disp_squeeze,
    e21_disp_squeeze, e_s_thermal, gamma_braiding, gap_on_columns, n_max_rule, safe_subspace_dim,
    squeeze_matrix, DisplacementParams, SqueezeParams,
};
use crate::error::{Error, Result};
use crate::qmat::{ComplexMatrix, DensityMatrix, UnitaryOperator, C64, ONE};
use crate::states::{
    hamiltonian_control, hamiltonian_fock, BlochState, ControlHamiltonianParams, ThermalParams,
};
use crate::switchcore::{
    activation_report, measure_control, n_m_closed, system_scalars, Control, SwitchScenario,
};
use crate::tolerance;

/// Which pair (U1, U2) acts on the mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CvFamily {
    /// U1 = D(α1), U2 = D(α2).
    Displacements(DisplacementParams, DisplacementParams),
    /// U1 = D(α), U2 = S(z).
    DispSqueeze(DisplacementParams, SqueezeParams),
    /// U1 = U2 = I.
    Identity,
}

impl CvFamily {
    /// Displacement and squeeze strengths fed to the cutoff rule.
    pub fn strengths(&self) -> (f64, f64) {
        match self {
            CvFamily::Displacements(a, b) => (a.alpha_abs + b.alpha_abs, 0.0),
            CvFamily::DispSqueeze(a, s) => (a.alpha_abs, s.z_abs),
            CvFamily::Identity => (0.0, 0.0),
        }
    }

    /// Truncated (U1, U2) on levels 0..=n_max.
    pub fn unitaries(&self, n_max: usize) -> Result<(UnitaryOperator, UnitaryOperator)> {
        let (u1, u2) = match self {
            CvFamily::Displacements(a, b) => (
                displacement_matrix(a.alpha(), n_max),
                displacement_matrix(b.alpha(), n_max),
            ),
            CvFamily::DispSqueeze(a, s) => (
                displacement_matrix(a.alpha(), n_max),
                squeeze_matrix(s.z(), n_max),
            ),
            CvFamily::Identity => (
                ComplexMatrix::identity(n_max + 1),
                ComplexMatrix::identity(n_max + 1),
            ),
        };
        Ok((UnitaryOperator::new(u1)?, UnitaryOperator::new(u2)?))
    }
}

/// A full continuous-variable switch experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvScenario {
    pub thermal: ThermalParams,
    pub family: CvFamily,
    pub t: ControlHamiltonianParams,
    pub control: BlochState,
    pub measurement: Option<BlochState>,
}

impl CvScenario {
    pub fn default_n_max(&self) -> Result<usize> {
        let (a, z) = self.family.strengths();
        n_max_rule(a, z, &self.thermal)
    }

    pub fn switch(&self, n_max: usize) -> Result<SwitchScenario> {
        let (u1, u2) = self.family.unitaries(n_max)?;
        SwitchScenario::new(
            truncated_thermal(&self.thermal, n_max)?,
            Control::Pure(self.control),
            u1,
            u2,
            hamiltonian_fock(self.thermal.omega, n_max),
            hamiltonian_control(self.t),
        )
    }
}

/// Thermal oscillator on levels 0..=n_max, renormalized, with no tail check.
pub fn truncated_thermal(thermal: &ThermalParams, n_max: usize) -> Result<DensityMatrix> {
    if thermal.beta == 0.0 {
        return Err(Error::InvalidParameter(
            "beta = 0 thermal oscillator state is not normalizable".into(),
        ));
    }
    let x = thermal.boltzmann();
    let mut pops: Vec<f64> = (0..=n_max).map(|n| x.powi(n as i32)).collect();
    let z: f64 = pops.iter().sum();
    pops.iter_mut().for_each(|q| *q /= z);
    Ok(DensityMatrix::from_trusted(ComplexMatrix::from_real_diag(
        &pops,
    )))
}

/// Quantities compared between the closed forms and the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvValues {
    pub chi: C64,
    /// E12 − E_S.
    pub delta_12: f64,
    /// E21 − E_S.
    pub delta_21: f64,
    /// F_S − χE_S.
    pub delta_f: C64,
    pub delta_qs: f64,
    /// `None` when the post-selection probability is below tolerance.
    pub delta_sm: Option<f64>,
}

pub const QUANTITIES: [&str; 6] = [
    "chi", "delta_12", "delta_21", "delta_f", "delta_qs", "delta_sm",
];

impl CvValues {
    /// Values in the order of [`QUANTITIES`]; `None` for a missing Δ_{S,M}.
    pub fn entries(&self) -> [Option<C64>; 6] {
        [
            Some(self.chi),
            Some(C64::new(self.delta_12, 0.0)),
            Some(C64::new(self.delta_21, 0.0)),
            Some(self.delta_f),
            Some(C64::new(self.delta_qs, 0.0)),
            self.delta_sm.map(|v| C64::new(v, 0.0)),
        ]
    }
}

/// Closed-form values of the scenario.
pub fn closed_values(s: &CvScenario) -> Result<CvValues> {
    let c = &s.control;
    match s.family {
        CvFamily::Displacements(a1, a2) => {
            let chi = chi_displacements(&a1, &a2);
            let shift = s.thermal.omega * (a1.alpha() + a2.alpha()).norm_sqr();
            Ok(CvValues {
                chi,
                delta_12: shift,
                delta_21: shift,
                delta_f: chi * shift,
                delta_qs: delta_qs_displacements(&s.t, &a1, &a2, c),
                delta_sm: s
                    .measurement
                    .filter(|m| n_m_closed(chi, c, m) > tolerance::NM)
                    .map(|_| shift),
            })
        }
        CvFamily::DispSqueeze(a, z) => {
            let th = &s.thermal;
            let e_s = e_s_thermal(th);
            let delta_sm = match s.measurement {
                None => None,
                Some(m) => match delta_sm_disp_squeeze(th, &a, &z, c, &m) {
                    Ok(v) => Some(v.delta_sm),
                    Err(Error::NearZeroPostSelection { .. }) => None,
                    Err(e) => return Err(e),
                },
            };
            Ok(CvValues {
                chi: chi_disp_squeeze(&a, &z, th),
                delta_12: e12_disp_squeeze(&a, &z, th) - e_s,
                delta_21: e21_disp_squeeze(&a, &z, th) - e_s,
                delta_f: delta_f_disp_squeeze(&a, &z, th),
                delta_qs: delta_qs_disp_squeeze(th, &s.t, &a, &z, c),
                delta_sm,
            })
        }
        CvFamily::Identity => Ok(CvValues {
            chi: ONE,
            delta_12: 0.0,
            delta_21: 0.0,
            delta_f: C64::new(0.0, 0.0),
            delta_qs: 0.0,
            delta_sm: s
                .measurement
                .filter(|m| n_m_closed(ONE, c, m) > tolerance::NM)
                .map(|_| 0.0),
        }),
    }
}

/// The same quantities from the generic switch on levels 0..=n_max.
pub fn oracle_values(s: &CvScenario, n_max: usize) -> Result<CvValues> {
    let sw = s.switch(n_max)?;
    let sc = system_scalars(&sw.rho_s, &sw.u1, &sw.u2, &sw.h_s);
    let report = activation_report(&sw)?;
    let delta_sm = match s.measurement {
        None => None,
        Some(m) => match measure_control(&sw, &m) {
            Ok(r) => Some(r.delta_sm),
            Err(Error::NearZeroPostSelection { .. }) => None,
            Err(e) => return Err(e),
        },
    };
    Ok(CvValues {
        chi: sc.chi,
        delta_12: sc.delta_12(),
        delta_21: sc.delta_21(),
        delta_f: sc.delta_f(),
        delta_qs: report.delta_qs,
        delta_sm,
    })
}

/// One line of the convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleRow {
    pub n_max: usize,
    pub quantity: &'static str,
    pub oracle: Option<C64>,
    pub closed: Option<C64>,
    /// |oracle − closed|; `None` when only one side is defined.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockOracleReport {
    pub rows: Vec<OracleRow>,
    pub closed: CvValues,
    /// Oracle values at the largest cutoff.
    pub converged_values: CvValues,
    /// Largest gap at the largest cutoff.
    pub final_gap: f64,
    /// Every gap at the largest cutoff is below the oracle tolerance and
    /// both sides agree on whether Δ_{S,M} is defined.
    pub converged: bool,
    /// Past the first cutoff where all gaps fall below tolerance, no gap grows
    /// by more than rounding.
    pub monotone: bool,
}

/// Closed forms against the oracle at each cutoff in `schedule`.
pub fn fock_oracle_report(s: &CvScenario, schedule: &[usize]) -> Result<FockOracleReport> {
    report_against(s, schedule, &closed_values(s)?)
}

/// As [`fock_oracle_report`], against externally supplied closed values.
pub fn report_against(
    s: &CvScenario,
    schedule: &[usize],
    closed: &CvValues,
) -> Result<FockOracleReport> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty n_max schedule".into()));
    }
    let closed_entries = closed.entries();
    let mut rows = Vec::with_capacity(schedule.len() * QUANTITIES.len());
    let mut per_cutoff = Vec::with_capacity(schedule.len());
    let mut last = None;
    let mut mismatch = false;
    for &n_max in schedule {
        let values = oracle_values(s, n_max)?;
        let mut worst = 0.0f64;
        for (k, quantity) in QUANTITIES.iter().enumerate() {
            let oracle = values.entries()[k];
            let cl = closed_entries[k];
            let gap = match (oracle, cl) {
                (Some(o), Some(c)) => Some((o - c).norm()),
                _ => None,
            };
            if oracle.is_some() != cl.is_some() && n_max == *schedule.last().unwrap() {
                mismatch = true;
            }
            worst = worst.max(gap.unwrap_or(0.0));
            rows.push(OracleRow {
                n_max,
                quantity,
                oracle,
                closed: cl,
                gap,
            });
        }
        per_cutoff.push(rows[rows.len() - QUANTITIES.len()..].to_vec());
        last = Some((values, worst));
    }
    let (converged_values, final_gap) = last.expect("schedule is non-empty");
    let scale = 1.0
        + closed_entries
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
    let floor = 1e-12 * scale;
    let knee = per_cutoff.iter().position(|r| {
        r.iter()
            .all(|row| row.gap.is_none_or(|g| g < tolerance::ORACLE))
    });
    let monotone = match knee {
        None => false,
        Some(k) => per_cutoff[k..].windows(2).all(|w| {
            w[0].iter().zip(&w[1]).all(|(a, b)| match (a.gap, b.gap) {
                (Some(x), Some(y)) => y <= x.max(floor),
                _ => true,
            })
        }),
    };
    Ok(FockOracleReport {
        rows,
        closed: *closed,
        converged_values,
        final_gap,
        converged: final_gap < tolerance::ORACLE && !mismatch,
        monotone,
    })
}

/// Gap of D(α2)D(α1) = χ D(α1)D(α2) on the safe subspace, with its dimension.
pub fn weyl_identity_gap(
    a1: &DisplacementParams,
    a2: &DisplacementParams,
    n_max: usize,
) -> (f64, usize) {
    let d1 = displacement_matrix(a1.alpha(), n_max);
    let d2 = displacement_matrix(a2.alpha(), n_max);
    let lhs = d2.matmul(&d1);
    let rhs = d1.matmul(&d2).scale(chi_displacements(a1, a2));
    let k = safe_subspace_dim(&[&d2, &d1]).min(safe_subspace_dim(&[&d1, &d2]));
    (gap_on_columns(&lhs, &rhs, k), k)
}

/// Gap of D(α)S(z) = S(z)D(γ) on the safe subspace, with its dimension.
pub fn braiding_identity_gap(
    a: &DisplacementParams,
    s: &SqueezeParams,
    n_max: usize,
) -> (f64, usize) {
    let d = displacement_matrix(a.alpha(), n_max);
    let sq = squeeze_matrix(s.z(), n_max);
    let dg = displacement_matrix(gamma_braiding(a, s).gamma, n_max);
    let lhs = d.matmul(&sq);
    let rhs = sq.matmul(&dg);
    let k = safe_subspace_dim(&[&d, &sq]).min(safe_subspace_dim(&[&sq, &dg]));
    (gap_on_columns(&lhs, &rhs, k), k)
}

/// tr{S D ρ S† D† H_S} evaluated on the truncated space.
pub fn f_s_trace(
    a: &DisplacementParams,
    s: &SqueezeParams,
    thermal: &ThermalParams,
    n_max: usize,
) -> Result<C64> {
    let sw = CvScenario {
        thermal: *thermal,
        family: CvFamily::DispSqueeze(*a, *s),
        t: ControlHamiltonianParams::new(thermal.omega, 0.0, 0.0)?,
        control: BlochState::plus(),
        measurement: None,
    }
    .switch(n_max)?;
    Ok(system_scalars(&sw.rho_s, &sw.u1, &sw.u2, &sw.h_s).f_s)
}
