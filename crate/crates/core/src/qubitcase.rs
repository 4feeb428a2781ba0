//! Qubit system with H_S = diag(0, ω): axis rotations in closed form and
//! general U(2) pairs by numerical minimization.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::optim::{self, Domain, MultiStartOptions};
use crate::qmat::{ComplexMatrix, DensityMatrix, HermitianOperator, UnitaryOperator, C64};
use crate::states::{
    gibbs_qubit, hamiltonian_control, hamiltonian_qubit_system, BlochState,
    ControlHamiltonianParams, QubitSystemParams, ThermalParams,
};
use crate::switchcore::{
    activation_conditions, activation_report, delta_s_c, delta_sm_closed, n_m_closed,
    system_scalars, ActivationConditions, Control, SwitchScenario, SystemScalars,
};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// e^{−iσ·angle/2}.
pub fn rotation_unitary(axis: Axis, angle: f64) -> UnitaryOperator {
    let (s, c) = (angle / 2.0).sin_cos();
    let (c, ms) = (C64::new(c, 0.0), C64::new(0.0, -s));
    let m = match axis {
        Axis::X => [c, ms, ms, c],
        Axis::Y => [c, C64::new(-s, 0.0), C64::new(s, 0.0), c],
        Axis::Z => [c + ms, C64::new(0.0, 0.0), C64::new(0.0, 0.0), c - ms],
    };
    UnitaryOperator::from_trusted(ComplexMatrix::from_row_major(2, 2, m.to_vec()).expect("2x2"))
}

/// U1 = R_x(α_x), U2 = R_y(α_y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationParams {
    pub alpha_x: f64,
    pub alpha_y: f64,
}

impl RotationParams {
    pub fn new(alpha_x: f64, alpha_y: f64) -> Result<Self> {
        for a in [alpha_x, alpha_y] {
            if !(0.0..=TAU).contains(&a) {
                return Err(Error::InvalidParameter(format!(
                    "rotation angle {a} outside [0, 2pi]"
                )));
            }
        }
        Ok(Self { alpha_x, alpha_y })
    }

    pub fn unitaries(&self) -> (UnitaryOperator, UnitaryOperator) {
        (
            rotation_unitary(Axis::X, self.alpha_x),
            rotation_unitary(Axis::Y, self.alpha_y),
        )
    }
}

/// Thermal qubit; β = 0 gives exactly I/2.
pub fn qubit_state(omega: f64, beta: f64) -> Result<DensityMatrix> {
    Ok(gibbs_qubit(ThermalParams::new(beta, omega)?))
}

fn tanh_half(beta: f64, omega: f64) -> f64 {
    if beta == f64::INFINITY {
        1.0
    } else {
        (0.5 * beta * omega).tanh()
    }
}

/// 1/cosh²(βω/2), zero at β = ∞.
fn sech2_half(beta: f64, omega: f64) -> f64 {
    if beta == f64::INFINITY {
        0.0
    } else {
        1.0 / (0.5 * beta * omega).cosh().powi(2)
    }
}

/// Closed-form Δ_QS for the rotation pair on a thermal qubit.
pub fn delta_qs_rotations_closed(
    beta: f64,
    t: &ControlHamiltonianParams,
    r: &RotationParams,
    c: &BlochState,
) -> f64 {
    let w = t.omega;
    let (sx, cx) = r.alpha_x.sin_cos();
    let (sy, cy) = r.alpha_y.sin_cos();
    let ph = t.t_phase + c.phi;
    let st = c.theta.sin();
    0.5 * w * ((1.0 - cx * cy) + (t.t_abs / w) * sx * sy * st * ph.sin()) * tanh_half(beta, w)
        - 2.0
            * t.t_abs
            * ph.cos()
            * st
            * (r.alpha_x / 2.0).sin().powi(2)
            * (r.alpha_y / 2.0).sin().powi(2)
}

/// Closed form next to the generic switch computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationDeltaQs {
    pub closed: f64,
    pub generic: f64,
    /// `|closed − generic| ≤ tol_energy`.
    pub agrees: bool,
}

pub fn rotation_scenario(
    beta: f64,
    t: &ControlHamiltonianParams,
    r: &RotationParams,
    c: &BlochState,
) -> Result<SwitchScenario> {
    let (u1, u2) = r.unitaries();
    SwitchScenario::new(
        qubit_state(t.omega, beta)?,
        Control::Pure(*c),
        u1,
        u2,
        hamiltonian_qubit_system(QubitSystemParams::new(t.omega)?),
        hamiltonian_control(*t),
    )
}

pub fn delta_qs_rotations(
    beta: f64,
    t: &ControlHamiltonianParams,
    r: &RotationParams,
    c: &BlochState,
) -> Result<RotationDeltaQs> {
    let closed = delta_qs_rotations_closed(beta, t, r, c);
    let generic = activation_report(&rotation_scenario(beta, t, r, c)?)?.delta_qs;
    Ok(RotationDeltaQs {
        closed,
        generic,
        agrees: (closed - generic).abs() <= tolerance::ENERGY,
    })
}

/// Δ_F = F_S − χE_S for the rotation pair, in closed form.
pub fn delta_f_rotations(omega: f64, beta: f64, r: &RotationParams) -> C64 {
    let (sx, cx) = r.alpha_x.sin_cos();
    let (sy, cy) = r.alpha_y.sin_cos();
    C64::new(
        0.5 * omega * tanh_half(beta, omega) * (1.0 - cx * cy),
        -0.25 * omega * sx * sy * sech2_half(beta, omega),
    )
}

/// The three activation conditions specialized to the rotation pair.
pub fn activation_conditions_rotations(
    omega: f64,
    beta: f64,
    r: &RotationParams,
    c: &BlochState,
    m: &BlochState,
) -> ActivationConditions {
    activation_conditions(delta_f_rotations(omega, beta, r), c, m)
}

/// Δ_{S,M} at β → 0 for α_x = α_y = α, control |+⟩ and measurement (θ_M, φ_M).
pub fn delta_sm_rotations_beta0(omega: f64, alpha: f64, theta_m: f64, phi_m: f64) -> Result<f64> {
    let sa = alpha.sin();
    if sa.abs() < 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} is a multiple of pi"
        )));
    }
    if !(theta_m > 0.0 && theta_m < PI) {
        return Err(Error::InvalidParameter(format!(
            "theta_M = {theta_m} outside ]0, pi["
        )));
    }
    let cot = alpha.cos() / sa;
    let csc = 1.0 / sa;
    let den = 2.0 * phi_m.cos() + 4.0 * phi_m.cos() * cot * csc + 4.0 * csc * csc / theta_m.sin();
    Ok(omega * phi_m.sin() / den)
}

/// e^{iα} R_z(λ) R_y(γ) R_z(δ).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct U2Params {
    pub alpha: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl U2Params {
    pub fn from_angles(x: &[f64]) -> Self {
        Self {
            alpha: 0.0,
            lambda: x[0],
            gamma: x[1],
            delta: x[2],
        }
    }
}

pub fn u2_unitary(p: &U2Params) -> UnitaryOperator {
    rotation_unitary(Axis::Z, p.lambda)
        .compose(&rotation_unitary(Axis::Y, p.gamma))
        .compose(&rotation_unitary(Axis::Z, p.delta))
        .with_phase(p.alpha)
}

/// Qubit problem shared by the U(2) searches.
#[derive(Debug, Clone)]
struct QubitProblem {
    rho: DensityMatrix,
    h_s: HermitianOperator,
}

impl QubitProblem {
    fn new(omega: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            rho: qubit_state(omega, beta)?,
            h_s: hamiltonian_qubit_system(QubitSystemParams::new(omega)?),
        })
    }

    fn scalars(&self, x: &[f64]) -> SystemScalars {
        let u1 = u2_unitary(&U2Params::from_angles(&x[0..3]));
        let u2 = u2_unitary(&U2Params::from_angles(&x[3..6]));
        system_scalars(&self.rho, &u1, &u2, &self.h_s)
    }
}

/// Best U(2) pair found by the multi-start search.
#[derive(Debug, Clone, PartialEq)]
pub struct U2Minimum {
    pub value: f64,
    pub u1: U2Params,
    pub u2: U2Params,
    pub evals: usize,
    pub seed: u64,
    pub chi: C64,
    pub delta_f: C64,
    /// ε defined by Δ_QS = ((ε − 12)/16)·cosθ·|t|; `None` when cosθ·|t| = 0.
    pub epsilon: Option<f64>,
    /// f = −32 Im Δ_F / ω.
    pub f: f64,
    /// g = 32 Re χ.
    pub g: f64,
    /// N_M at the optimum, when a measurement was involved.
    pub n_m: Option<f64>,
    /// Evaluations rejected because N_M fell below the post-selection threshold.
    pub divergent_evals: usize,
}

fn search_options(budget: usize, seed: u64) -> Result<MultiStartOptions> {
    if budget < 1000 {
        return Err(Error::InvalidParameter(format!(
            "budget {budget} is below the minimum of 1000 evaluations"
        )));
    }
    Ok(MultiStartOptions {
        budget,
        evals_per_start: 500,
        seed,
        initial_step: 0.6,
    })
}

fn finish(
    problem: &QubitProblem,
    omega: f64,
    x: &[f64],
    value: f64,
    evals: usize,
    seed: u64,
) -> U2Minimum {
    let sc = problem.scalars(x);
    U2Minimum {
        value,
        u1: U2Params::from_angles(&x[0..3]),
        u2: U2Params::from_angles(&x[3..6]),
        evals,
        seed,
        chi: sc.chi,
        delta_f: sc.delta_f(),
        epsilon: None,
        f: -32.0 * sc.delta_f().im / omega,
        g: 32.0 * sc.chi.re,
        n_m: None,
        divergent_evals: 0,
    }
}

/// Minimizes Δ_QS over (λ1, γ1, δ1, λ2, γ2, δ2) ∈ [0, 2π)^6.
pub fn minimize_delta_qs_u2(
    t: &ControlHamiltonianParams,
    beta: f64,
    c: &BlochState,
    budget: usize,
    seed: u64,
) -> Result<U2Minimum> {
    let opts = search_options(budget, seed)?;
    let problem = QubitProblem::new(t.omega, beta)?;
    let h_c = hamiltonian_control(*t);
    let rho_c = c.to_density();
    let f = |x: &[f64]| {
        let (ds, dc) = delta_s_c(&problem.scalars(x), rho_c.matrix(), h_c.matrix());
        ds + dc
    };
    let res = optim::multistart(&f, &Domain::torus(6, 0.0, TAU), &opts);
    let mut out = finish(
        &problem,
        t.omega,
        &res.best.x,
        res.best.value,
        res.total_evals,
        seed,
    );
    let slope = t.t_phase.cos() * t.t_abs;
    if slope.abs() > 1e-12 {
        out.epsilon = Some(16.0 * res.best.value / slope + 12.0);
    }
    Ok(out)
}

/// Minimizes Δ_{S,M} for the given control and measurement. Points whose
/// post-selection probability is at or below threshold are excluded and counted.
pub fn minimize_delta_sm_u2(
    omega: f64,
    beta: f64,
    c: &BlochState,
    m: &BlochState,
    budget: usize,
    seed: u64,
) -> Result<U2Minimum> {
    let opts = search_options(budget, seed)?;
    let problem = QubitProblem::new(omega, beta)?;
    let divergent = std::sync::atomic::AtomicUsize::new(0);
    let f = |x: &[f64]| match delta_sm_closed(&problem.scalars(x), c, m) {
        Some((_, v)) => v,
        None => {
            divergent.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            f64::INFINITY
        }
    };
    let res = optim::multistart(&f, &Domain::torus(6, 0.0, TAU), &opts);
    if !res.best.value.is_finite() {
        return Err(Error::NearZeroPostSelection { n_m: 0.0 });
    }
    let mut out = finish(
        &problem,
        omega,
        &res.best.x,
        res.best.value,
        res.total_evals,
        seed,
    );
    out.n_m = Some(n_m_closed(out.chi, c, m));
    out.divergent_evals = divergent.into_inner();
    Ok(out)
}

/// Minimizes f = −32 Im Δ_F / ω over U(2) pairs.
pub fn minimize_f_u2(omega: f64, beta: f64, budget: usize, seed: u64) -> Result<U2Minimum> {
    let opts = search_options(budget, seed)?;
    let problem = QubitProblem::new(omega, beta)?;
    let f = |x: &[f64]| -32.0 * problem.scalars(x).delta_f().im / omega;
    let res = optim::multistart(&f, &Domain::torus(6, 0.0, TAU), &opts);
    Ok(finish(
        &problem,
        omega,
        &res.best.x,
        res.best.value,
        res.total_evals,
        seed,
    ))
}

/// Δ_{S,M} of a rotation pair through the generic measured switch.
pub fn delta_sm_rotations_generic(
    beta: f64,
    t: &ControlHamiltonianParams,
    r: &RotationParams,
    c: &BlochState,
    m: &BlochState,
) -> Result<f64> {
    let s = rotation_scenario(beta, t, r, c)?;
    Ok(crate::switchcore::measure_control(&s, m)?.delta_sm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::DensityMatrix;

    fn params(t_abs: f64, t_phase: f64) -> ControlHamiltonianParams {
        ControlHamiltonianParams::new(1.0, t_abs, t_phase).unwrap()
    }

    #[test]
    fn rotation_examples() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            assert!(
                rotation_unitary(axis, 0.0)
                    .matrix()
                    .max_abs_diff(&ComplexMatrix::identity(2))
                    < 1e-16
            );
            let full = rotation_unitary(axis, TAU);
            assert!(
                full.matrix()
                    .max_abs_diff(&ComplexMatrix::identity(2).scale_real(-1.0))
                    < 1e-15
            );
        }
        let flipped = rotation_unitary(Axis::Y, PI).matrix().column(0);
        assert!((flipped[1].norm_sqr() - 1.0).abs() < 1e-15);
        let via_expm = crate::qmat::expm(&crate::qmat::pauli_x().scale(C64::new(0.0, -0.35)));
        assert!(
            rotation_unitary(Axis::X, 0.7)
                .matrix()
                .max_abs_diff(&via_expm)
                < 1e-15
        );
    }

    #[test]
    fn closed_form_matches_generic() {
        let cases = [
            (
                0.7,
                params(0.8, 0.3),
                1.1,
                2.9,
                BlochState::new(1.2, 4.0).unwrap(),
            ),
            (0.0, params(1.5, 2.0), 0.4, 0.9, BlochState::plus()),
            (
                f64::INFINITY,
                params(0.2, 5.0),
                3.0,
                6.0,
                BlochState::new(2.7, 0.1).unwrap(),
            ),
        ];
        for (beta, t, ax, ay, c) in cases {
            let r = RotationParams::new(ax, ay).unwrap();
            let d = delta_qs_rotations(beta, &t, &r, &c).unwrap();
            assert!(d.agrees, "{d:?}");
        }
    }

    #[test]
    fn identity_rotations_do_nothing() {
        let r = RotationParams::new(0.0, 0.0).unwrap();
        let d = delta_qs_rotations(1.0, &params(1.0, 0.0), &r, &BlochState::plus()).unwrap();
        assert_eq!(d.closed, 0.0);
    }

    #[test]
    fn delta_f_closed_form_matches_scalars() {
        for (beta, ax, ay) in [(0.7, 1.0, 2.0), (0.0, 0.3, 2.2), (f64::INFINITY, 2.5, 0.6)] {
            let r = RotationParams::new(ax, ay).unwrap();
            let (u1, u2) = r.unitaries();
            let rho = qubit_state(1.0, beta).unwrap();
            let h = hamiltonian_qubit_system(QubitSystemParams::new(1.0).unwrap());
            let sc = system_scalars(&rho, &u1, &u2, &h);
            assert!((sc.delta_f() - delta_f_rotations(1.0, beta, &r)).norm() < 1e-14);
        }
    }

    #[test]
    fn condition_examples() {
        let r = RotationParams::new(1.3, 1.3).unwrap();
        let c = BlochState::plus();
        // β → 0 with equal angles: (ii) fails exactly when tan ψ = 0
        let m0 = BlochState::new(PI / 2.0, 0.0).unwrap();
        assert!(!activation_conditions_rotations(1.0, 0.0, &r, &c, &m0).interference);
        let m = BlochState::new(PI / 2.0, 1.0).unwrap();
        assert!(activation_conditions_rotations(1.0, 0.0, &r, &c, &m).interference);
        // θ_C = π/2, φ_C = 0: (iii) holds for φ_M in ]π, 2π[ only
        for k in 1..40 {
            let phi = TAU * k as f64 / 40.0;
            if (phi - PI).abs() < 1e-12 {
                continue;
            }
            let m = BlochState::new(PI / 2.0, phi).unwrap();
            let conds = activation_conditions_rotations(1.0, 0.0, &r, &c, &m);
            assert_eq!(conds.negative_interference, phi > PI, "phi = {phi}");
        }
        let pole = BlochState::zero();
        assert!(!activation_conditions_rotations(1.0, 0.5, &r, &c, &pole).superposed);
    }

    #[test]
    fn beta0_measurement_formula() {
        assert_eq!(
            delta_sm_rotations_beta0(1.0, PI / 2.0, PI / 2.0, 0.0).unwrap(),
            0.0
        );
        assert!(
            delta_sm_rotations_beta0(1.0, PI / 2.0, PI / 2.0, PI)
                .unwrap()
                .abs()
                < 1e-16
        );
        assert!(delta_sm_rotations_beta0(1.0, PI, PI / 2.0, 1.0).is_err());
        assert!(delta_sm_rotations_beta0(1.0, 1.0, 0.0, 1.0).is_err());
        let t = params(0.0, 0.0);
        for (alpha, theta_m, phi_m) in [(1.0, 1.2, 0.7), (2.0, PI / 2.0, 4.0), (0.6, 2.5, 5.5)] {
            let r = RotationParams::new(alpha, alpha).unwrap();
            let m = BlochState::new(theta_m, phi_m).unwrap();
            let generic = delta_sm_rotations_generic(0.0, &t, &r, &BlochState::plus(), &m).unwrap();
            let closed = delta_sm_rotations_beta0(1.0, alpha, theta_m, phi_m).unwrap();
            assert!((generic - closed).abs() < 1e-12, "{generic} vs {closed}");
        }
    }

    #[test]
    fn u2_examples() {
        let id = u2_unitary(&U2Params::default());
        assert!(id.matrix().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-16);
        let ry = u2_unitary(&U2Params {
            gamma: PI,
            ..Default::default()
        });
        assert!(
            ry.matrix()
                .max_abs_diff(rotation_unitary(Axis::Y, PI).matrix())
                < 1e-16
        );
        let p = U2Params {
            alpha: 0.4,
            lambda: 1.1,
            gamma: 2.3,
            delta: 5.0,
        };
        let m = u2_unitary(&p);
        let det = m.matrix()[(0, 0)] * m.matrix()[(1, 1)] - m.matrix()[(0, 1)] * m.matrix()[(1, 0)];
        assert!((det.norm() - 1.0).abs() < 1e-15);
        assert!(UnitaryOperator::new(m.matrix().clone()).is_ok());
    }

    #[test]
    fn u2_minimum_small_budget_is_deterministic() {
        let t = params(1.0, 0.0);
        let a = minimize_delta_qs_u2(&t, 0.0, &BlochState::plus(), 2000, 3).unwrap();
        let b = minimize_delta_qs_u2(&t, 0.0, &BlochState::plus(), 2000, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.value < 0.0);
        assert!(minimize_delta_qs_u2(&t, 0.0, &BlochState::plus(), 10, 3).is_err());
    }

    #[test]
    fn maximally_mixed_at_zero_beta() {
        let rho = qubit_state(1.0, 0.0).unwrap();
        assert_eq!(rho, DensityMatrix::maximally_mixed(2));
    }
}
