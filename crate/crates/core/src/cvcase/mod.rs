//! Single bosonic mode, H_S = ω(a†a + 1/2), with displacement and squeeze unitaries.
//!
//! Closed forms live here; [`oracle`] evaluates the same quantities on a
//! truncated Fock space through the generic switch, and [`printed`] keeps the
//! uncorrected expressions that disagree with that oracle.

pub mod oracle;
pub mod printed;

use crate::error::{Error, Result};
use crate::qmat::{expm, ComplexMatrix, UnitaryOperator, C64, ONE};
use crate::states::{BlochState, ControlHamiltonianParams, ThermalParams};
use crate::switchcore::{interference_phase, n_m_closed};
use crate::tolerance;

/// α = |α| e^{iφ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementParams {
    pub alpha_abs: f64,
    pub alpha_phase: f64,
}

impl DisplacementParams {
    pub fn new(alpha_abs: f64, alpha_phase: f64) -> Result<Self> {
        if !alpha_abs.is_finite() || !alpha_phase.is_finite() {
            return Err(Error::NonFinite);
        }
        if alpha_abs < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "|alpha| = {alpha_abs} is negative"
            )));
        }
        Ok(Self {
            alpha_abs,
            alpha_phase,
        })
    }

    pub fn alpha(&self) -> C64 {
        C64::from_polar(self.alpha_abs, self.alpha_phase)
    }
}

/// z = |z| e^{iξ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    pub z_abs: f64,
    pub z_phase: f64,
}

impl SqueezeParams {
    pub fn new(z_abs: f64, z_phase: f64) -> Result<Self> {
        if !z_abs.is_finite() || !z_phase.is_finite() {
            return Err(Error::NonFinite);
        }
        if z_abs < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "|z| = {z_abs} is negative"
            )));
        }
        Ok(Self { z_abs, z_phase })
    }

    pub fn z(&self) -> C64 {
        C64::from_polar(self.z_abs, self.z_phase)
    }
}

/// Displacement after commuting through a squeeze, D(α)S(z) = S(z)D(γ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BraidedGamma {
    pub gamma: C64,
}

/// Annihilation operator on levels 0..=n_max.
pub fn annihilation(n_max: usize) -> ComplexMatrix {
    let n = n_max + 1;
    ComplexMatrix::from_fn(n, n, |r, c| {
        if c == r + 1 {
            C64::new((c as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn creation(n_max: usize) -> ComplexMatrix {
    annihilation(n_max).adjoint()
}

/// e^{αa† − α*a} without any truncation check.
pub fn displacement_matrix(alpha: C64, n_max: usize) -> ComplexMatrix {
    let a = annihilation(n_max);
    let g = &creation(n_max).scale(alpha) - &a.scale(alpha.conj());
    expm(&g)
}

/// e^{(z a†² − z* a²)/2} without any truncation check.
pub fn squeeze_matrix(z: C64, n_max: usize) -> ComplexMatrix {
    let a = annihilation(n_max);
    let ad = a.adjoint();
    let g = &ad.matmul(&ad).scale(z * 0.5) - &a.matmul(&a).scale(z.conj() * 0.5);
    expm(&g)
}

/// Norm of the part of a column vector on the top tenth of the levels.
pub fn edge_norm(v: &[C64]) -> f64 {
    let n = v.len();
    let top = (n / 10).max(1);
    v[n - top..]
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn check_vacuum_leak(u: &ComplexMatrix, what: &str) -> Result<()> {
    let leak = edge_norm(&u.column(0));
    if leak > tolerance::FOCK_LEAK {
        return Err(Error::TruncationInadequate(format!(
            "{what}: vacuum image has amplitude {leak:e} near the cutoff"
        )));
    }
    Ok(())
}

/// D(α) on levels 0..=n_max.
pub fn displacement_op(p: &DisplacementParams, n_max: usize) -> Result<UnitaryOperator> {
    let m = displacement_matrix(p.alpha(), n_max);
    check_vacuum_leak(&m, "displacement")?;
    UnitaryOperator::new(m)
}

/// S(z) on levels 0..=n_max.
pub fn squeeze_op(p: &SqueezeParams, n_max: usize) -> Result<UnitaryOperator> {
    let m = squeeze_matrix(p.z(), n_max);
    check_vacuum_leak(&m, "squeeze")?;
    UnitaryOperator::new(m)
}

/// Number of lowest levels whose images stay clear of the cutoff through every
/// factor of `chain` (applied right to left).
pub fn safe_subspace_dim(chain: &[&ComplexMatrix]) -> usize {
    let n = chain[0].rows();
    let mut k = 0;
    'levels: for j in 0..n {
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[j] = ONE;
        for m in chain.iter().rev() {
            v = apply(m, &v);
            if edge_norm(&v) > tolerance::FOCK_LEAK {
                break 'levels;
            }
        }
        k = j + 1;
    }
    k
}

fn apply(m: &ComplexMatrix, v: &[C64]) -> Vec<C64> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| m[(r, c)] * v[c]).sum())
        .collect()
}

/// Largest entry of `lhs − rhs` on the first `k` columns.
pub fn gap_on_columns(lhs: &ComplexMatrix, rhs: &ComplexMatrix, k: usize) -> f64 {
    let mut worst = 0.0f64;
    for c in 0..k {
        for r in 0..lhs.rows() {
            worst = worst.max((lhs[(r, c)] - rhs[(r, c)]).norm());
        }
    }
    worst
}

/// Fock cutoff for the given displacement and squeeze strengths:
/// max(40, ⌈4(|α|e^{|z|} + √⟨n⟩)²⌉ + n_thermal + n_squeeze + 20). n_thermal keeps
/// the Boltzmann tail below tolerance; n_squeeze does the same for the
/// tanh|z|^n tail of a squeezed photon distribution.
pub fn n_max_rule(alpha_abs: f64, z_abs: f64, thermal: &ThermalParams) -> Result<usize> {
    if thermal.beta == 0.0 {
        return Err(Error::InvalidParameter(
            "beta = 0 has no finite Fock truncation".into(),
        ));
    }
    let log_tol = (1.0 / tolerance::TRUNC).ln();
    let n = thermal.mean_occupation();
    let spread = (4.0 * (alpha_abs * z_abs.exp() + n.sqrt()).powi(2)).ceil() as usize;
    let thermal_levels = if thermal.is_zero_temperature() {
        0
    } else {
        (log_tol / (thermal.beta * thermal.omega)).ceil() as usize
    };
    let squeeze_levels = if z_abs > 0.0 {
        (log_tol / -z_abs.tanh().ln()).ceil() as usize
    } else {
        0
    };
    Ok((spread + thermal_levels + squeeze_levels + 20).max(40))
}

// ---- displacement pair ----

/// χ = e^{α1*α2 − α1α2*}.
pub fn chi_displacements(a1: &DisplacementParams, a2: &DisplacementParams) -> C64 {
    let x = a1.alpha().conj() * a2.alpha();
    C64::new(0.0, 2.0 * x.im).exp()
}

/// Δ_QS = ω|α′|² + |t| sinθ_C [cos(θ + φ_C + 2|α1||α2| sin(φ1−φ2)) − cos(θ + φ_C)].
pub fn delta_qs_displacements(
    t: &ControlHamiltonianParams,
    a1: &DisplacementParams,
    a2: &DisplacementParams,
    c: &BlochState,
) -> f64 {
    let shift = (a1.alpha() + a2.alpha()).norm_sqr();
    let phase = t.t_phase + c.phi;
    let kappa = 2.0 * a1.alpha_abs * a2.alpha_abs * (a1.alpha_phase - a2.alpha_phase).sin();
    t.omega * shift + t.t_abs * c.theta.sin() * ((phase + kappa).cos() - phase.cos())
}

/// Δ_QS for |α1| = |α2| = |α|, φ1 − φ2 = θ_C = π/2, θ = φ_C = 0.
pub fn delta_qs_displacements_simplified(omega: f64, t_abs: f64, alpha_abs: f64) -> f64 {
    let x = alpha_abs * alpha_abs;
    2.0 * (omega * x - t_abs * x.sin().powi(2))
}

/// Stationary point sqrt((π − arcsin(ω/|t|))/2) of the simplified Δ_QS.
pub fn alpha_min(omega: f64, t_abs: f64) -> Result<f64> {
    if t_abs < omega {
        return Err(Error::NoSolution(format!(
            "|t| = {t_abs} < omega = {omega}: no stationary point"
        )));
    }
    Ok(((std::f64::consts::PI - (omega / t_abs).asin()) / 2.0).sqrt())
}

/// Δ_{S,M} = ω|α1 + α2|², whatever the control and measurement.
pub fn delta_sm_displacements(a1: &DisplacementParams, a2: &DisplacementParams, omega: f64) -> f64 {
    omega * (a1.alpha() + a2.alpha()).norm_sqr()
}

// ---- displacement then squeeze: U1 = D(α), U2 = S(z) ----

/// γ = |α|e^{iφ} cosh|z| − |α|e^{i(ξ−φ)} sinh|z|.
pub fn gamma_braiding(a: &DisplacementParams, s: &SqueezeParams) -> BraidedGamma {
    let (r, xi, phi) = (s.z_abs, s.z_phase, a.alpha_phase);
    let gamma = C64::from_polar(a.alpha_abs * r.cosh(), phi)
        - C64::from_polar(a.alpha_abs * r.sinh(), xi - phi);
    BraidedGamma { gamma }
}

/// ⟨β|α⟩ for coherent states.
pub fn coherent_overlap(bra: C64, ket: C64) -> C64 {
    (bra.conj() * ket - 0.5 * ket.norm_sqr() - 0.5 * bra.norm_sqr()).exp()
}

/// χ = ⟨γ|α⟩ e^{−⟨n⟩|α−γ|²}.
pub fn chi_disp_squeeze(a: &DisplacementParams, s: &SqueezeParams, thermal: &ThermalParams) -> C64 {
    let alpha = a.alpha();
    let gamma = gamma_braiding(a, s).gamma;
    let n = thermal.mean_occupation();
    coherent_overlap(gamma, alpha) * (-n * (alpha - gamma).norm_sqr()).exp()
}

/// E_S = ω(⟨n⟩ + 1/2).
pub fn e_s_thermal(thermal: &ThermalParams) -> f64 {
    thermal.omega * (thermal.mean_occupation() + 0.5)
}

/// E12 = tr{S D ρ D† S† H_S} = ω[|α|²(cosh2|z| + cos(ξ−2φ) sinh2|z|) + (⟨n⟩+1/2) cosh2|z|].
pub fn e12_disp_squeeze(a: &DisplacementParams, s: &SqueezeParams, thermal: &ThermalParams) -> f64 {
    let r2 = 2.0 * s.z_abs;
    let n = thermal.mean_occupation();
    let x = a.alpha_abs * a.alpha_abs;
    let rel = s.z_phase - 2.0 * a.alpha_phase;
    thermal.omega * (x * (r2.cosh() + rel.cos() * r2.sinh()) + (n + 0.5) * r2.cosh())
}

/// E21 = tr{D S ρ S† D† H_S} = ω[|α|² + (⟨n⟩+1/2) cosh2|z|].
pub fn e21_disp_squeeze(a: &DisplacementParams, s: &SqueezeParams, thermal: &ThermalParams) -> f64 {
    let n = thermal.mean_occupation();
    thermal.omega * (a.alpha_abs * a.alpha_abs + (n + 0.5) * (2.0 * s.z_abs).cosh())
}

/// F_S = tr{S D ρ S† D† H_S}
///     = ωχ[cosh2|z| (u v + ⟨n⟩ + 1/2) + (sinh2|z|/2)(e^{iξ}u² + e^{−iξ}v²)],
/// u = γ* − ⟨n⟩(α−γ)*, v = α + ⟨n⟩(α−γ).
pub fn f_s_disp_squeeze(a: &DisplacementParams, s: &SqueezeParams, thermal: &ThermalParams) -> C64 {
    let alpha = a.alpha();
    let gamma = gamma_braiding(a, s).gamma;
    let n = thermal.mean_occupation();
    let chi = chi_disp_squeeze(a, s, thermal);
    let d = alpha - gamma;
    let u = gamma.conj() - d.conj() * n;
    let v = alpha + d * n;
    let r2 = 2.0 * s.z_abs;
    let xi = C64::from_polar(1.0, s.z_phase);
    chi * thermal.omega
        * (r2.cosh() * (u * v + n + 0.5) + 0.5 * r2.sinh() * (xi * u * u + xi.conj() * v * v))
}

/// Δ_F = F_S − χ E_S.
pub fn delta_f_disp_squeeze(
    a: &DisplacementParams,
    s: &SqueezeParams,
    thermal: &ThermalParams,
) -> C64 {
    f_s_disp_squeeze(a, s, thermal) - chi_disp_squeeze(a, s, thermal) * e_s_thermal(thermal)
}

/// Δ_QS = cos²(θ_C/2)E12 + sin²(θ_C/2)E21 − E_S + |t| sinθ_C Re{e^{−i(θ+φ_C)}(χ−1)}.
pub fn delta_qs_disp_squeeze(
    thermal: &ThermalParams,
    t: &ControlHamiltonianParams,
    a: &DisplacementParams,
    s: &SqueezeParams,
    c: &BlochState,
) -> f64 {
    let p0 = (c.theta / 2.0).cos().powi(2);
    let p1 = (c.theta / 2.0).sin().powi(2);
    let delta_s = p0 * e12_disp_squeeze(a, s, thermal) + p1 * e21_disp_squeeze(a, s, thermal)
        - e_s_thermal(thermal);
    let chi = chi_disp_squeeze(a, s, thermal);
    let delta_c =
        t.t_abs * c.theta.sin() * (C64::from_polar(1.0, -(t.t_phase + c.phi)) * (chi - ONE)).re;
    delta_s + delta_c
}

/// Post-measurement value and the probability it was conditioned on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conditioned {
    pub n_m: f64,
    pub delta_sm: f64,
}

fn conditioned(
    n_m: f64,
    delta_12: f64,
    delta_21: f64,
    delta_f: C64,
    c: &BlochState,
    m: &BlochState,
) -> Result<Conditioned> {
    if n_m <= tolerance::NM {
        return Err(Error::NearZeroPostSelection { n_m });
    }
    let cc = (c.theta / 2.0).cos().powi(2) * (m.theta / 2.0).cos().powi(2);
    let ss = (c.theta / 2.0).sin().powi(2) * (m.theta / 2.0).sin().powi(2);
    let psi = interference_phase(c, m);
    let coh = 0.5 * c.theta.sin() * m.theta.sin() * (delta_f * C64::from_polar(1.0, psi)).re;
    Ok(Conditioned {
        n_m,
        delta_sm: (cc * delta_12 + ss * delta_21 + coh) / n_m,
    })
}

/// General Δ_{S,M} for the displacement-squeeze pair.
pub fn delta_sm_disp_squeeze(
    thermal: &ThermalParams,
    a: &DisplacementParams,
    s: &SqueezeParams,
    c: &BlochState,
    m: &BlochState,
) -> Result<Conditioned> {
    let e_s = e_s_thermal(thermal);
    let chi = chi_disp_squeeze(a, s, thermal);
    conditioned(
        n_m_closed(chi, c, m),
        e12_disp_squeeze(a, s, thermal) - e_s,
        e21_disp_squeeze(a, s, thermal) - e_s,
        delta_f_disp_squeeze(a, s, thermal),
        c,
        m,
    )
}

/// ξ − 2φ ∈ {0, π}, written as the sign s = ±1 of cos(ξ − 2φ).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqueezeAlignment {
    /// ξ − 2φ = 0.
    Aligned,
    /// ξ − 2φ = π.
    Opposed,
}

impl SqueezeAlignment {
    pub fn sign(self) -> f64 {
        match self {
            SqueezeAlignment::Aligned => 1.0,
            SqueezeAlignment::Opposed => -1.0,
        }
    }

    /// Squeeze phase ξ matching a displacement phase φ.
    pub fn squeeze_phase(self, alpha_phase: f64) -> f64 {
        match self {
            SqueezeAlignment::Aligned => 2.0 * alpha_phase,
            SqueezeAlignment::Opposed => 2.0 * alpha_phase + std::f64::consts::PI,
        }
    }
}

/// Real scalars of the aligned or opposed configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignedScalars {
    pub chi: f64,
    pub delta_12: f64,
    pub delta_21: f64,
    pub delta_f: f64,
}

/// χ, Δ12, Δ21, Δ_F when ξ − 2φ ∈ {0, π}. Here γ = α e^{−s|z|} and all four are real.
pub fn aligned_scalars(
    thermal: &ThermalParams,
    alpha_abs: f64,
    z_abs: f64,
    alignment: SqueezeAlignment,
) -> AlignedScalars {
    let w = thermal.omega;
    let sgn = alignment.sign();
    let n = if thermal.is_zero_temperature() {
        0.0
    } else {
        thermal.mean_occupation()
    };
    let x = alpha_abs * alpha_abs;
    let r2 = 2.0 * z_abs;
    let e = (-sgn * z_abs).exp();
    let chi = (-0.5 * x * (1.0 - e).powi(2) * (2.0 * n + 1.0)).exp();
    let p = e * (1.0 + n) - n;
    let q = 1.0 + n - n * e;
    let f_s =
        w * chi * (r2.cosh() * (x * p * q + n + 0.5) + sgn * 0.5 * r2.sinh() * x * (p * p + q * q));
    let e_s = w * (n + 0.5);
    AlignedScalars {
        chi,
        delta_12: w * (x * (r2.cosh() + sgn * r2.sinh()) + (n + 0.5) * (r2.cosh() - 1.0)),
        delta_21: w * (x + (n + 0.5) * (r2.cosh() - 1.0)),
        delta_f: f_s - chi * e_s,
    }
}

/// Δ_{S,M} for ξ − 2φ = 0 (`Aligned`) or π (`Opposed`).
pub fn delta_sm_aligned(
    thermal: &ThermalParams,
    alpha_abs: f64,
    z_abs: f64,
    alignment: SqueezeAlignment,
    c: &BlochState,
    m: &BlochState,
) -> Result<Conditioned> {
    let sc = aligned_scalars(thermal, alpha_abs, z_abs, alignment);
    let psi = interference_phase(c, m);
    let n_m = 0.5
        * (1.0
            + c.theta.cos() * m.theta.cos()
            + c.theta.sin() * m.theta.sin() * sc.chi * psi.cos());
    conditioned(
        n_m,
        sc.delta_12,
        sc.delta_21,
        C64::new(sc.delta_f, 0.0),
        c,
        m,
    )
}

pub fn delta_sm_xi0(
    thermal: &ThermalParams,
    alpha_abs: f64,
    z_abs: f64,
    c: &BlochState,
    m: &BlochState,
) -> Result<Conditioned> {
    delta_sm_aligned(thermal, alpha_abs, z_abs, SqueezeAlignment::Aligned, c, m)
}

pub fn delta_sm_xipi(
    thermal: &ThermalParams,
    alpha_abs: f64,
    z_abs: f64,
    c: &BlochState,
    m: &BlochState,
) -> Result<Conditioned> {
    delta_sm_aligned(thermal, alpha_abs, z_abs, SqueezeAlignment::Opposed, c, m)
}
