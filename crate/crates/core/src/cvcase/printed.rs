//! Uncorrected expressions for the displacement-squeeze pair.
//!
//! These use the interference phase φ_C + φ_M and differ from the closed forms
//! in the parent module. They exist so the differences can be measured against
//! the truncated-Fock oracle; nothing else in the crate calls them.

use super::{chi_disp_squeeze, gamma_braiding, Conditioned, DisplacementParams, SqueezeParams};
use crate::error::{Error, Result};
use crate::qmat::{C64, ONE};
use crate::states::{BlochState, ControlHamiltonianParams, ThermalParams};
use crate::tolerance;

/// E12 − E21 = ω|α|² cos(ξ−2φ) sinh2|z|.
pub fn e12_minus_e21(omega: f64, a: &DisplacementParams, s: &SqueezeParams) -> f64 {
    omega * a.alpha_abs.powi(2) * (s.z_phase - 2.0 * a.alpha_phase).cos() * (2.0 * s.z_abs).sinh()
}

/// F_S = ωχ(1/2 + γ*α + (1 + 2γ*α − |α|² − |γ|²)⟨n⟩ − |α−γ|²⟨n⟩²).
pub fn f_s(a: &DisplacementParams, s: &SqueezeParams, thermal: &ThermalParams) -> C64 {
    let alpha = a.alpha();
    let gamma = gamma_braiding(a, s).gamma;
    let n = thermal.mean_occupation();
    let ga = gamma.conj() * alpha;
    let chi = chi_disp_squeeze(a, s, thermal);
    chi * thermal.omega
        * (0.5 + ga + (ONE + 2.0 * ga - alpha.norm_sqr() - gamma.norm_sqr()) * n
            - (alpha - gamma).norm_sqr() * n * n)
}

/// Δ_F = ωχ(γ*α + (2γ*α − |γ|² − |α|²)⟨n⟩ − |α−γ|²⟨n⟩²).
pub fn delta_f(a: &DisplacementParams, s: &SqueezeParams, thermal: &ThermalParams) -> C64 {
    let alpha = a.alpha();
    let gamma = gamma_braiding(a, s).gamma;
    let n = thermal.mean_occupation();
    let ga = gamma.conj() * alpha;
    let chi = chi_disp_squeeze(a, s, thermal);
    chi * thermal.omega
        * (ga + (2.0 * ga - gamma.norm_sqr() - alpha.norm_sqr()) * n
            - (alpha - gamma).norm_sqr() * n * n)
}

/// Δ_QS as displayed, including the leading +ω/2 and the phase e^{i(φ_C−θ)}.
pub fn delta_qs(
    thermal: &ThermalParams,
    t: &ControlHamiltonianParams,
    a: &DisplacementParams,
    s: &SqueezeParams,
    c: &BlochState,
) -> f64 {
    let w = thermal.omega;
    let r = s.z_abs;
    let x = a.alpha_abs.powi(2);
    let n = thermal.mean_occupation();
    let chi = chi_disp_squeeze(a, s, thermal);
    w / 2.0
        + w * x
        + w * (2.0 * r).cosh() / 2.0
        + 2.0 * w * n * r.sinh().powi(2)
        + w * x
            * (c.theta / 2.0).cos().powi(2)
            * (s.z_phase - 2.0 * a.alpha_phase).cos()
            * (2.0 * r).sinh()
        + t.t_abs * c.theta.sin() * (C64::from_polar(1.0, c.phi - t.t_phase) * (chi - ONE)).re
}

fn finish(n_m: f64, numerator: f64) -> Result<Conditioned> {
    if n_m <= tolerance::NM {
        return Err(Error::NearZeroPostSelection { n_m });
    }
    Ok(Conditioned {
        n_m,
        delta_sm: numerator / n_m,
    })
}

fn leading_terms(
    thermal: &ThermalParams,
    alpha_abs: f64,
    z_abs: f64,
    c: &BlochState,
    m: &BlochState,
) -> f64 {
    let n = thermal.mean_occupation();
    thermal.omega / 4.0
        * (1.0 + c.theta.cos() * m.theta.cos())
        * (2.0 * alpha_abs.powi(2) + (2.0 * n + 1.0) * ((2.0 * z_abs).cosh() - 1.0))
}

fn cc(c: &BlochState, m: &BlochState) -> f64 {
    (c.theta / 2.0).cos().powi(2) * (m.theta / 2.0).cos().powi(2)
}

fn ss(c: &BlochState, m: &BlochState) -> f64 {
    c.theta.sin() * m.theta.sin()
}

/// N_M with the phase φ_C + φ_M.
pub fn n_m(chi: C64, c: &BlochState, m: &BlochState) -> f64 {
    0.5 * (1.0
        + c.theta.cos() * m.theta.cos()
        + ss(c, m) * (chi * C64::from_polar(1.0, c.phi + m.phi)).re)
}

/// General displayed Δ_{S,M}.
pub fn delta_sm(
    thermal: &ThermalParams,
    a: &DisplacementParams,
    s: &SqueezeParams,
    c: &BlochState,
    m: &BlochState,
) -> Result<Conditioned> {
    let chi = chi_disp_squeeze(a, s, thermal);
    let numerator = leading_terms(thermal, a.alpha_abs, s.z_abs, c, m)
        + thermal.omega
            * a.alpha_abs.powi(2)
            * cc(c, m)
            * (s.z_phase - 2.0 * a.alpha_phase).cos()
            * (2.0 * s.z_abs).sinh()
        + 0.5 * ss(c, m) * (delta_f(a, s, thermal) * C64::from_polar(1.0, c.phi + m.phi)).re;
    finish(n_m(chi, c, m), numerator)
}

/// Displayed Δ_{S,M}^0 with its normalization N_M^0.
pub fn delta_sm_xi0(
    thermal: &ThermalParams,
    alpha_abs: f64,
    z_abs: f64,
    c: &BlochState,
    m: &BlochState,
) -> Result<Conditioned> {
    let (w, r, x) = (thermal.omega, z_abs, alpha_abs.powi(2));
    let n = thermal.mean_occupation();
    let (e1, e2) = (r.exp(), (2.0 * r).exp());
    let damping = (-2.0 * r - x * (-r).exp() * (2.0 * n + 1.0) * (r.cosh() - 1.0)).exp();
    let bracket = n * n * (e2 - 2.0 * e1 + 1.0) + n * (e2 - 2.0 * e1 + x * (-2.0 * r).exp()) - e1;
    let cos_psi = (c.phi + m.phi).cos();
    let numerator = leading_terms(thermal, alpha_abs, r, c, m)
        + w * x * cc(c, m) * (2.0 * r).sinh()
        - w * x / 2.0 * ss(c, m) * damping * bracket * cos_psi;
    let overlap = (-2.0 * x * (r / 2.0).sinh().powi(2) * (r.cosh() - r.sinh())).exp();
    let n_m = 0.5 * (1.0 + c.theta.cos() * m.theta.cos() + ss(c, m) * overlap * cos_psi);
    finish(n_m, numerator)
}

/// Displayed Δ_{S,M}^π with its normalization N_M^π.
pub fn delta_sm_xipi(
    thermal: &ThermalParams,
    alpha_abs: f64,
    z_abs: f64,
    c: &BlochState,
    m: &BlochState,
) -> Result<Conditioned> {
    let (w, r, x) = (thermal.omega, z_abs, alpha_abs.powi(2));
    let n = thermal.mean_occupation();
    let (e1, e2) = (r.exp(), (2.0 * r).exp());
    let damping = (-x / 2.0 * (e1 - 1.0).powi(2) * (2.0 * n + 1.0)).exp();
    let bracket = n * n * (e2 - 2.0 * e1 + 1.0) + n * (x * (4.0 * r).exp() - 2.0 * e1 + 1.0) - e1;
    let cos_psi = (c.phi + m.phi).cos();
    let numerator = leading_terms(thermal, alpha_abs, r, c, m)
        - w * x * cc(c, m) * (2.0 * r).sinh()
        - w * x / 2.0 * ss(c, m) * damping * bracket * cos_psi;
    let n_m = 0.5 * (1.0 + c.theta.cos() * m.theta.cos() + ss(c, m) * damping * cos_psi);
    finish(n_m, numerator)
}
