//! The switch channel and its energy bookkeeping.
//!
//! Joint operators live on system ⊗ control, so a joint basis index is
//! `2 * s + c`. `V0 = U2 U1` acts when the control reads `|0⟩` and
//! `V1 = U1 U2` when it reads `|1⟩`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::optim::{self, Domain, NelderMeadOptions};
use crate::qmat::{
    kron, partial_trace, ComplexMatrix, DensityMatrix, HermitianOperator, Subsystem,
    UnitaryOperator, C64, ONE, ZERO,
};
use crate::states::BlochState;
use crate::tolerance;

/// Control preparation.
#[derive(Debug, Clone, PartialEq)]
pub enum Control {
    Pure(BlochState),
    Mixed(DensityMatrix),
}

impl Control {
    pub fn density(&self) -> DensityMatrix {
        match self {
            Control::Pure(b) => b.to_density(),
            Control::Mixed(rho) => rho.clone(),
        }
    }
}

/// One switch experiment.
#[derive(Debug, Clone)]
pub struct SwitchScenario {
    pub rho_s: DensityMatrix,
    pub control: Control,
    pub u1: UnitaryOperator,
    pub u2: UnitaryOperator,
    pub h_s: HermitianOperator,
    pub h_c: HermitianOperator,
}

impl SwitchScenario {
    pub fn new(
        rho_s: DensityMatrix,
        control: Control,
        u1: UnitaryOperator,
        u2: UnitaryOperator,
        h_s: HermitianOperator,
        h_c: HermitianOperator,
    ) -> Result<Self> {
        let d = rho_s.dim();
        for found in [u1.dim(), u2.dim(), h_s.dim()] {
            if found != d {
                return Err(Error::DimensionMismatch { expected: d, found });
            }
        }
        if h_c.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: h_c.dim(),
            });
        }
        if let Control::Mixed(rho_c) = &control {
            if rho_c.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: rho_c.dim(),
                });
            }
        }
        Ok(Self {
            rho_s,
            control,
            u1,
            u2,
            h_s,
            h_c,
        })
    }

    pub fn dim(&self) -> usize {
        self.rho_s.dim()
    }

    pub fn rho_c(&self) -> DensityMatrix {
        self.control.density()
    }

    fn orders(&self) -> (ComplexMatrix, ComplexMatrix) {
        let (u1, u2) = (self.u1.matrix(), self.u2.matrix());
        (u2.matmul(u1), u1.matmul(u2))
    }
}

fn projector(k: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(2, 2);
    p[(k, k)] = ONE;
    p
}

/// `U2U1 ⊗ |0⟩⟨0| + U1U2 ⊗ |1⟩⟨1|`.
pub fn build_switch_unitary(u1: &UnitaryOperator, u2: &UnitaryOperator) -> Result<UnitaryOperator> {
    if u1.dim() != u2.dim() {
        return Err(Error::DimensionMismatch {
            expected: u1.dim(),
            found: u2.dim(),
        });
    }
    let v0 = u2.matrix().matmul(u1.matrix());
    let v1 = u1.matrix().matmul(u2.matrix());
    let u = &kron(&v0, &projector(0)) + &kron(&v1, &projector(1));
    Ok(UnitaryOperator::from_trusted(u))
}

/// Cross-map scalar χ = tr{U2 U1 ρ U2† U1†}.
pub fn chi(u1: &UnitaryOperator, u2: &UnitaryOperator, rho_s: &DensityMatrix) -> Result<C64> {
    let d = rho_s.dim();
    for found in [u1.dim(), u2.dim()] {
        if found != d {
            return Err(Error::DimensionMismatch { expected: d, found });
        }
    }
    let v0 = u2.matrix().matmul(u1.matrix());
    let v1 = u1.matrix().matmul(u2.matrix());
    Ok(rho_s.matrix().sandwich(&v0, &v1).trace())
}

/// Joint output state `U_QS (ρ_S ⊗ ρ_C) U_QS†`.
pub fn post_switch_state(s: &SwitchScenario) -> DensityMatrix {
    let u = build_switch_unitary(&s.u1, &s.u2).expect("scenario dims validated");
    let joint = kron(s.rho_s.matrix(), s.rho_c().matrix());
    DensityMatrix::from_trusted(joint.conjugate_by(u.matrix()))
}

/// Joint output state assembled block by block, `Σ_ij ρ_C[i,j] V_i ρ_S V_j† ⊗ |i⟩⟨j|`.
pub fn post_switch_state_expansion(s: &SwitchScenario) -> DensityMatrix {
    let (v0, v1) = s.orders();
    let v = [v0, v1];
    let rho_c = s.rho_c();
    let mut out = ComplexMatrix::zeros(2 * s.dim(), 2 * s.dim());
    for i in 0..2 {
        for j in 0..2 {
            let mut e = ComplexMatrix::zeros(2, 2);
            e[(i, j)] = rho_c.matrix()[(i, j)];
            let block = s.rho_s.matrix().sandwich(&v[i], &v[j]);
            out = &out + &kron(&block, &e);
        }
    }
    DensityMatrix::from_trusted(out)
}

/// Scalars needed by the scalar energy expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemScalars {
    pub chi: C64,
    /// tr{ρ H_S}.
    pub e_s: f64,
    /// tr{U2U1 ρ U1†U2† H_S}.
    pub e12: f64,
    /// tr{U1U2 ρ U2†U1† H_S}.
    pub e21: f64,
    /// tr{U2U1 ρ U2†U1† H_S}.
    pub f_s: C64,
}

impl SystemScalars {
    pub fn delta_12(&self) -> f64 {
        self.e12 - self.e_s
    }

    pub fn delta_21(&self) -> f64 {
        self.e21 - self.e_s
    }

    /// Δ_F = F_S − χ E_S.
    pub fn delta_f(&self) -> C64 {
        self.f_s - self.chi * self.e_s
    }
}

/// χ, E_S, E12, E21 and F_S from system-side algebra only.
pub fn system_scalars(
    rho_s: &DensityMatrix,
    u1: &UnitaryOperator,
    u2: &UnitaryOperator,
    h_s: &HermitianOperator,
) -> SystemScalars {
    let (u1, u2, h) = (u1.matrix(), u2.matrix(), h_s.matrix());
    let v0 = u2.matmul(u1);
    let v1 = u1.matmul(u2);
    let rho = rho_s.matrix();
    let rho_v1 = rho.matmul(&v1.adjoint());
    let cross = v0.matmul(&rho_v1);
    SystemScalars {
        chi: cross.trace(),
        e_s: rho.trace_product(h).re,
        e12: rho.conjugate_by(&v0).trace_product(h).re,
        e21: v1.matmul(&rho_v1).trace_product(h).re,
        f_s: cross.trace_product(h),
    }
}

/// Pre-measurement energy changes given the scalars and the control.
///
/// Returns `(Δ_S, Δ_C)` from the expansion `E_SC′ = p0 E12 + p1 E21 + E_C + 2Re{⟨0|ρ_C|1⟩⟨1|H_C|0⟩(χ−1)}`.
pub fn delta_s_c(sc: &SystemScalars, rho_c: &ComplexMatrix, h_c: &ComplexMatrix) -> (f64, f64) {
    let p0 = rho_c[(0, 0)].re;
    let p1 = rho_c[(1, 1)].re;
    let delta_s = p0 * sc.e12 + p1 * sc.e21 - sc.e_s;
    let delta_c = 2.0 * (rho_c[(0, 1)] * h_c[(1, 0)] * (sc.chi - ONE)).re;
    (delta_s, delta_c)
}

/// Every pre-measurement scalar of one scenario.
#[derive(Debug, Clone)]
pub struct ActivationReport {
    pub chi: C64,
    pub e_s: f64,
    pub e_c: f64,
    pub e12: f64,
    pub e21: f64,
    pub f_s: C64,
    /// E_SC′ from the joint state.
    pub e_sc_prime: f64,
    pub delta_qs: f64,
    pub delta_s: f64,
    pub delta_c: f64,
    pub delta_c_min: f64,
    pub tilde_rho_s: DensityMatrix,
    pub tilde_rho_c: DensityMatrix,
    /// Ẽ_S + Ẽ_C.
    pub tilde_energy: f64,
    /// Largest disagreement between the direct and expanded routes.
    pub route_gap: f64,
}

/// Phase rotation diag(1, ±e^{−iφ}).
fn phase_unitary(sign: f64, phi: f64) -> ComplexMatrix {
    ComplexMatrix::from_diag(&[ONE, C64::from_polar(sign, -phi)])
}

/// ρ̃_C = (1+|χ|)/2 U₊ρ_CU₊† + (1−|χ|)/2 U₋ρ_CU₋† with U± = diag(1, ±e^{−i arg χ}).
pub fn tilde_control(rho_c: &DensityMatrix, chi: C64) -> DensityMatrix {
    let (r, phi) = chi.to_polar();
    let r = r.min(1.0);
    let plus = rho_c.matrix().conjugate_by(&phase_unitary(1.0, phi));
    let minus = rho_c.matrix().conjugate_by(&phase_unitary(-1.0, phi));
    DensityMatrix::from_trusted(
        &plus.scale_real(0.5 * (1.0 + r)) + &minus.scale_real(0.5 * (1.0 - r)),
    )
}

/// ρ̃_S = p0 U2U1ρU1†U2† + p1 U1U2ρU2†U1†.
pub fn tilde_system(s: &SwitchScenario) -> DensityMatrix {
    let rho_c = s.rho_c();
    let p0 = rho_c.matrix()[(0, 0)].re;
    let p1 = rho_c.matrix()[(1, 1)].re;
    let (v0, v1) = s.orders();
    let a = s.rho_s.matrix().conjugate_by(&v0).scale_real(p0);
    let b = s.rho_s.matrix().conjugate_by(&v1).scale_real(p1);
    DensityMatrix::from_trusted(&a + &b)
}

/// Computes every pre-measurement quantity twice, once from the joint state and
/// once from the scalar expansion, and fails if the two disagree.
pub fn activation_report(s: &SwitchScenario) -> Result<ActivationReport> {
    let d = s.dim();
    let rho_c = s.rho_c();
    let sc = system_scalars(&s.rho_s, &s.u1, &s.u2, &s.h_s);
    let e_c = rho_c.expectation(&s.h_c);

    // direct route on the 2d-dimensional joint space
    let joint = post_switch_state(s);
    let h_sc = s.h_s.non_interacting_sum(&s.h_c);
    let e_sc_prime = joint.expectation(&h_sc);
    let e_sc = kron(s.rho_s.matrix(), rho_c.matrix())
        .trace_product(h_sc.matrix())
        .re;
    let delta_qs = e_sc_prime - e_sc;
    let rho_s_out = partial_trace(&joint, d, 2, Subsystem::A)?;
    let rho_c_out = partial_trace(&joint, d, 2, Subsystem::B)?;
    let delta_s_direct = rho_s_out.expectation(&s.h_s) - sc.e_s;
    let delta_c_direct = rho_c_out.expectation(&s.h_c) - e_c;

    // scalar expansion
    let (delta_s, delta_c) = delta_s_c(&sc, rho_c.matrix(), s.h_c.matrix());

    let tilde_rho_c = tilde_control(&rho_c, sc.chi);
    let tilde_rho_s = tilde_system(s);
    let tilde_energy = tilde_rho_s.expectation(&s.h_s) + tilde_rho_c.expectation(&s.h_c);

    let gaps = [
        ("delta_s", (delta_s - delta_s_direct).abs()),
        ("delta_c", (delta_c - delta_c_direct).abs()),
        ("delta_qs", (delta_qs - delta_s - delta_c).abs()),
        ("tilde energy", (tilde_energy - e_sc_prime).abs()),
    ];
    let scale = 1.0 + s.h_s.matrix().max_abs() + s.h_c.matrix().max_abs();
    let mut route_gap = 0.0f64;
    for (what, gap) in gaps {
        if gap > tolerance::ENERGY * scale {
            return Err(Error::CrossCheck { what, gap });
        }
        route_gap = route_gap.max(gap);
    }

    Ok(ActivationReport {
        chi: sc.chi,
        e_s: sc.e_s,
        e_c,
        e12: sc.e12,
        e21: sc.e21,
        f_s: sc.f_s,
        e_sc_prime,
        delta_qs,
        delta_s,
        delta_c,
        delta_c_min: delta_c_min_value(s.h_c.matrix(), sc.chi),
        tilde_rho_s,
        tilde_rho_c,
        tilde_energy,
        route_gap,
    })
}

/// Δ_C of a pure control at Bloch angles (θ, φ).
pub fn delta_c_bloch(h_c: &ComplexMatrix, chi: C64, theta: f64, phi: f64) -> f64 {
    let coherence = C64::from_polar(0.5 * theta.sin(), -phi);
    2.0 * (coherence * h_c[(1, 0)] * (chi - ONE)).re
}

fn delta_c_min_value(h_c: &ComplexMatrix, chi: C64) -> f64 {
    -(h_c[(1, 0)] * (chi - ONE)).norm()
}

/// Control-optimal Δ_C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaCMin {
    /// −|⟨1|H_C|0⟩(χ−1)|.
    pub value: f64,
    /// Optimal coherence ⟨0|ρ_C|1⟩.
    pub coherence: C64,
    pub control: BlochState,
    /// Best value of a numerical search over Bloch angles.
    pub numeric: f64,
}

/// Minimum of Δ_C over control states, analytic and numerically confirmed.
///
/// A qubit coherence is bounded by 1/2, so the optimum is a pure state on the
/// equator with its phase opposite to that of ⟨1|H_C|0⟩(χ−1).
pub fn delta_c_min(h_c: &HermitianOperator, chi: C64) -> Result<DeltaCMin> {
    if h_c.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: h_c.dim(),
        });
    }
    let h = h_c.matrix();
    let w = h[(1, 0)] * (chi - ONE);
    let value = -w.norm();
    let phi = if w.norm() == 0.0 {
        0.0
    } else {
        (w.arg() + PI).rem_euclid(TAU)
    };
    let control = BlochState::wrapped(PI / 2.0, phi)?;
    let numeric = delta_c_min_numeric(h, chi);
    if (numeric - value).abs() > tolerance::OPT {
        return Err(Error::CrossCheck {
            what: "delta_c_min",
            gap: (numeric - value).abs(),
        });
    }
    Ok(DeltaCMin {
        value,
        coherence: C64::from_polar(0.5, -phi),
        control,
        numeric,
    })
}

/// Grid over (θ, φ) followed by simplex refinement.
pub fn delta_c_min_numeric(h_c: &ComplexMatrix, chi: C64) -> f64 {
    let f = |x: &[f64]| delta_c_bloch(h_c, chi, x[0], x[1]);
    let (nt, np) = (16, 32);
    let mut best = (f64::INFINITY, [0.0, 0.0]);
    for i in 0..=nt {
        for j in 0..np {
            let x = [PI * i as f64 / nt as f64, TAU * j as f64 / np as f64];
            let v = f(&x);
            if v < best.0 {
                best = (v, x);
            }
        }
    }
    let domain = Domain::torus(2, 0.0, TAU);
    let opts = NelderMeadOptions {
        max_evals: 400,
        initial_step: 0.1,
        ..Default::default()
    };
    optim::nelder_mead(&f, &best.1, &domain, &opts)
        .value
        .min(best.0)
}

/// −√2|⟨1|H_C|0⟩(χ−1)|, the value quoted in the literature for the control optimum.
pub fn printed_delta_c_min(h_c: &HermitianOperator, chi: C64) -> f64 {
    -(2f64.sqrt()) * (h_c.matrix()[(1, 0)] * (chi - ONE)).norm()
}

/// The three necessary conditions for a negative post-measurement energy change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActivationConditions {
    /// sinθ_C ≠ 0 and sinθ_M ≠ 0.
    pub superposed: bool,
    /// Re{Δ_F e^{iψ}} ≠ 0.
    pub interference: bool,
    /// sinθ_C sinθ_M Re{Δ_F e^{iψ}} < 0.
    pub negative_interference: bool,
}

impl ActivationConditions {
    pub fn all(&self) -> bool {
        self.superposed && self.interference && self.negative_interference
    }
}

const CONDITION_TOL: f64 = 1e-12;

/// Relative phase ψ = φ_M − φ_C entering every interference term.
pub fn interference_phase(c: &BlochState, m: &BlochState) -> f64 {
    m.phi - c.phi
}

/// Evaluates the conditions from Δ_F and the two Bloch states.
pub fn activation_conditions(delta_f: C64, c: &BlochState, m: &BlochState) -> ActivationConditions {
    let (sc, sm) = (c.theta.sin(), m.theta.sin());
    let psi = interference_phase(c, m);
    // Re{Δ_F e^{iψ}} written as a cross product, free of tangent poles
    let x = delta_f.re * psi.cos() - delta_f.im * psi.sin();
    ActivationConditions {
        superposed: sc.abs() > CONDITION_TOL && sm.abs() > CONDITION_TOL,
        interference: x.abs() > CONDITION_TOL,
        negative_interference: sc * sm * x < 0.0,
    }
}

/// Outcome probability N_M of projecting the control on `m`.
pub fn n_m_closed(chi: C64, c: &BlochState, m: &BlochState) -> f64 {
    let psi = interference_phase(c, m);
    0.5 * (1.0
        + c.theta.cos() * m.theta.cos()
        + c.theta.sin() * m.theta.sin() * (chi * C64::from_polar(1.0, psi)).re)
}

/// Δ_{S,M} from the order-resolved scalars.
///
/// Returns `None` when N_M ≤ tolerance (divergent post-selection).
pub fn delta_sm_closed(sc: &SystemScalars, c: &BlochState, m: &BlochState) -> Option<(f64, f64)> {
    let n = n_m_closed(sc.chi, c, m);
    if n <= tolerance::NM {
        return None;
    }
    let cc = (c.theta / 2.0).cos().powi(2) * (m.theta / 2.0).cos().powi(2);
    let ss = (c.theta / 2.0).sin().powi(2) * (m.theta / 2.0).sin().powi(2);
    let psi = interference_phase(c, m);
    let coh = 0.5 * c.theta.sin() * m.theta.sin() * (sc.delta_f() * C64::from_polar(1.0, psi)).re;
    Some((n, (cc * sc.delta_12() + ss * sc.delta_21() + coh) / n))
}

/// Result of a projective measurement of the control.
#[derive(Debug, Clone)]
pub struct MeasurementReport {
    pub n_m: f64,
    pub rho_sm: DensityMatrix,
    pub delta_12: f64,
    pub delta_21: f64,
    pub f_s: C64,
    pub delta_f: C64,
    pub delta_sm: f64,
    pub conditions: ActivationConditions,
    /// Largest disagreement between the projection and expansion routes.
    pub route_gap: f64,
}

/// Projects the control of the switched state on `m` and renormalizes.
pub fn measure_control(s: &SwitchScenario, m: &BlochState) -> Result<MeasurementReport> {
    let c = match &s.control {
        Control::Pure(b) => *b,
        Control::Mixed(_) => {
            return Err(Error::InvalidParameter(
                "control measurement requires a pure control state".into(),
            ))
        }
    };
    let d = s.dim();
    let sc = system_scalars(&s.rho_s, &s.u1, &s.u2, &s.h_s);

    // projection route
    let joint = post_switch_state(s);
    let mk = m.ket();
    let bra = ComplexMatrix::from_fn(1, 2, |_, j| mk[j].conj());
    let proj = kron(&ComplexMatrix::identity(d), &bra);
    let unnorm = joint.matrix().sandwich(&proj, &proj);
    let n_m = unnorm.trace().re;
    if n_m <= tolerance::NM {
        return Err(Error::NearZeroPostSelection { n_m });
    }
    let rho_sm = unnorm.scale_real(1.0 / n_m);

    // four-term expansion
    let ck = c.ket();
    let amp = [mk[0].conj() * ck[0], mk[1].conj() * ck[1]];
    let (v0, v1) = s.orders();
    let v = [v0, v1];
    let mut expanded = ComplexMatrix::zeros(d, d);
    for i in 0..2 {
        for j in 0..2 {
            let w = amp[i] * amp[j].conj();
            if w == ZERO {
                continue;
            }
            expanded = &expanded + &s.rho_s.matrix().sandwich(&v[i], &v[j]).scale(w);
        }
    }
    let n_closed = n_m_closed(sc.chi, &c, m);
    let expanded = expanded.scale_real(1.0 / n_closed);

    let rho_sm = DensityMatrix::from_trusted(rho_sm);
    let direct = rho_sm.expectation(&s.h_s) - sc.e_s;
    let (_, closed) =
        delta_sm_closed(&sc, &c, m).ok_or(Error::NearZeroPostSelection { n_m: n_closed })?;

    let energy_scale = 1.0 + s.h_s.matrix().max_abs();
    let state_gap = expanded.max_abs_diff(rho_sm.matrix());
    let gaps = [
        ("rho_sm", state_gap * n_m),
        ("n_m", (n_closed - n_m).abs()),
        ("delta_sm", (direct - closed).abs() * n_m),
    ];
    let mut route_gap = 0.0f64;
    for (what, gap) in gaps {
        if gap > tolerance::ENERGY * energy_scale {
            return Err(Error::CrossCheck { what, gap });
        }
        route_gap = route_gap.max(gap);
    }

    Ok(MeasurementReport {
        n_m,
        rho_sm,
        delta_12: sc.delta_12(),
        delta_21: sc.delta_21(),
        f_s: sc.f_s,
        delta_f: sc.delta_f(),
        delta_sm: direct,
        conditions: activation_conditions(sc.delta_f(), &c, m),
        route_gap,
    })
}
