//! States, Hamiltonians, passivity and ergotropy.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::qmat::{ComplexMatrix, DensityMatrix, HermitianOperator, UnitaryOperator, C64, ZERO};
use crate::tolerance;

/// Pure qubit state cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub theta: f64,
    pub phi: f64,
}

impl BlochState {
    /// θ ∈ [0, π], φ ∈ [0, 2π).
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::NonFinite);
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} outside [0, pi]"
            )));
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::InvalidParameter(format!(
                "phi = {phi} outside [0, 2pi)"
            )));
        }
        Ok(Self { theta, phi })
    }

    /// Accepts any finite angles and maps them onto the canonical ranges.
    pub fn wrapped(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut theta = theta.rem_euclid(TAU);
        let mut phi = phi;
        if theta > PI {
            theta = TAU - theta;
            phi += PI;
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub fn zero() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
        }
    }

    pub fn one() -> Self {
        Self {
            theta: PI,
            phi: 0.0,
        }
    }

    /// |+⟩ = (|0⟩ + |1⟩)/√2.
    pub fn plus() -> Self {
        Self {
            theta: PI / 2.0,
            phi: 0.0,
        }
    }

    /// |−⟩ = (|0⟩ − |1⟩)/√2.
    pub fn minus() -> Self {
        Self {
            theta: PI / 2.0,
            phi: PI,
        }
    }

    pub fn ket(&self) -> [C64; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        [C64::new(c, 0.0), C64::from_polar(s, self.phi)]
    }

    /// Orthogonal partner, `|m⊥⟩`.
    pub fn orthogonal(&self) -> Self {
        Self {
            theta: PI - self.theta,
            phi: (self.phi + PI).rem_euclid(TAU),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        let k = self.ket();
        DensityMatrix::from_trusted(ComplexMatrix::outer(&k, &k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSystemParams {
    pub omega: f64,
}

impl QubitSystemParams {
    pub fn new(omega: f64) -> Result<Self> {
        check_omega(omega)?;
        Ok(Self { omega })
    }
}

/// Control Hamiltonian [[0, t], [t*, ω]] with t = |t| e^{iθ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlHamiltonianParams {
    pub omega: f64,
    pub t_abs: f64,
    pub t_phase: f64,
}

impl ControlHamiltonianParams {
    pub fn new(omega: f64, t_abs: f64, t_phase: f64) -> Result<Self> {
        check_omega(omega)?;
        if !t_abs.is_finite() || !t_phase.is_finite() {
            return Err(Error::NonFinite);
        }
        if t_abs < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "|t| = {t_abs} is negative"
            )));
        }
        Ok(Self {
            omega,
            t_abs,
            t_phase,
        })
    }

    pub fn t(&self) -> C64 {
        C64::from_polar(self.t_abs, self.t_phase)
    }
}

/// Inverse temperature and level spacing. `beta = f64::INFINITY` is the ground-state limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalParams {
    pub beta: f64,
    pub omega: f64,
}

impl ThermalParams {
    pub fn new(beta: f64, omega: f64) -> Result<Self> {
        check_omega(omega)?;
        if beta.is_nan() || beta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "beta = {beta} must be >= 0"
            )));
        }
        Ok(Self { beta, omega })
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.beta == f64::INFINITY
    }

    /// Boltzmann ratio e^{−βω}.
    pub fn boltzmann(&self) -> f64 {
        (-self.beta * self.omega).exp()
    }

    /// ⟨n⟩ = 1/(e^{βω} − 1); infinite at β = 0.
    pub fn mean_occupation(&self) -> f64 {
        if self.is_zero_temperature() {
            0.0
        } else {
            1.0 / (self.beta * self.omega).exp_m1()
        }
    }

    /// Default Fock cutoff max(20, ⌈ln(1/tol)/(βω)⌉ + 10).
    pub fn default_n_max(&self) -> Result<usize> {
        if self.beta == 0.0 {
            return Err(Error::InvalidParameter(
                "beta = 0 has no finite Fock truncation".into(),
            ));
        }
        if self.is_zero_temperature() {
            return Ok(20);
        }
        let n = ((1.0 / tolerance::TRUNC).ln() / (self.beta * self.omega)).ceil() + 10.0;
        Ok((n as usize).max(20))
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if !omega.is_finite() {
        return Err(Error::NonFinite);
    }
    if omega <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "omega = {omega} must be > 0"
        )));
    }
    Ok(())
}

/// Thermal qubit diag(1/(1+e^{−βω}), e^{−βω}/(1+e^{−βω})).
pub fn gibbs_qubit(p: ThermalParams) -> DensityMatrix {
    let x = p.boltzmann();
    let excited = x / (1.0 + x);
    DensityMatrix::from_trusted(ComplexMatrix::from_real_diag(&[1.0 - excited, excited]))
}

/// Thermal oscillator on the levels 0..=n_max, renormalized after truncation.
pub fn gibbs_fock(p: ThermalParams, n_max: usize) -> Result<DensityMatrix> {
    if p.beta == 0.0 {
        return Err(Error::InvalidParameter(
            "beta = 0 thermal oscillator state is not normalizable".into(),
        ));
    }
    let x = p.boltzmann();
    let tail = x.powi(n_max as i32 + 1);
    if tail > tolerance::TRUNC {
        return Err(Error::TruncationInadequate(format!(
            "thermal tail {tail:e} at n_max = {n_max}"
        )));
    }
    let mut pops: Vec<f64> = (0..=n_max).map(|n| x.powi(n as i32)).collect();
    let z: f64 = pops.iter().sum();
    pops.iter_mut().for_each(|q| *q /= z);
    Ok(DensityMatrix::from_trusted(ComplexMatrix::from_real_diag(
        &pops,
    )))
}

/// H_S = diag(0, ω).
pub fn hamiltonian_qubit_system(p: QubitSystemParams) -> HermitianOperator {
    HermitianOperator::from_real_diag(&[0.0, p.omega])
}

/// H_C = [[0, t], [t*, ω]].
pub fn hamiltonian_control(p: ControlHamiltonianParams) -> HermitianOperator {
    let t = p.t();
    HermitianOperator::from_trusted(
        ComplexMatrix::from_row_major(2, 2, vec![ZERO, t, t.conj(), C64::new(p.omega, 0.0)])
            .expect("2x2"),
    )
}

/// H_S = ω(n + 1/2) on the levels 0..=n_max.
pub fn hamiltonian_fock(omega: f64, n_max: usize) -> HermitianOperator {
    let diag: Vec<f64> = (0..=n_max).map(|n| omega * (n as f64 + 0.5)).collect();
    HermitianOperator::from_real_diag(&diag)
}

/// Gibbs state e^{−βH}/Z of an arbitrary Hamiltonian; β = ∞ gives the
/// uniform mixture over the ground space.
pub fn gibbs_state(h: &HermitianOperator, beta: f64) -> DensityMatrix {
    let eig = h.eig();
    let weights = gibbs_weights(&eig.values, beta);
    let v = &eig.vectors;
    let diag = ComplexMatrix::from_real_diag(&weights);
    DensityMatrix::from_trusted(v.matmul(&diag).matmul(&v.adjoint()))
}

fn gibbs_weights(energies: &[f64], beta: f64) -> Vec<f64> {
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = if beta == f64::INFINITY {
        energies
            .iter()
            .map(|&e| if e - e0 <= tolerance::EIG { 1.0 } else { 0.0 })
            .collect()
    } else {
        energies.iter().map(|&e| (-beta * (e - e0)).exp()).collect()
    };
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / z).collect()
}

fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

fn check_dims(rho: &DensityMatrix, h: &HermitianOperator) -> Result<()> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// Energy of the passive state with the spectrum of `rho`: Σ r↓_k ε↑_k.
pub fn passive_energy(rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
    check_dims(rho, h)?;
    let r = rho.eigenvalues();
    let e = h.eig().values;
    Ok(r.iter().rev().zip(&e).map(|(p, x)| p * x).sum())
}

/// Maximal unitarily extractable work tr(ρH) − Σ r↓_k ε↑_k.
pub fn ergotropy(rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
    let passive = passive_energy(rho, h)?;
    Ok(rho.expectation(h) - passive)
}

/// Outcome of a passivity test.
#[derive(Debug, Clone)]
pub struct PassivityCheck {
    pub passive: bool,
    pub ergotropy: f64,
    /// Unitary taking `rho` to its passive counterpart; `None` when passive.
    pub witness: Option<UnitaryOperator>,
}

pub fn is_passive(rho: &DensityMatrix, h: &HermitianOperator, tol: f64) -> Result<PassivityCheck> {
    check_dims(rho, h)?;
    let erg = ergotropy(rho, h)?;
    if erg <= tol {
        return Ok(PassivityCheck {
            passive: true,
            ergotropy: erg,
            witness: None,
        });
    }
    let d = rho.dim();
    let state = rho.eig();
    let energy = h.eig();
    // k-th largest population onto the k-th lowest level
    let mut w = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let src = state.vectors.column(d - 1 - k);
        let dst = energy.vectors.column(k);
        w = &w + &ComplexMatrix::outer(&dst, &src);
    }
    Ok(PassivityCheck {
        passive: false,
        ergotropy: erg,
        witness: Some(UnitaryOperator::from_trusted(w)),
    })
}

/// Entropy-matched Gibbs bound on the ergotropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsBound {
    /// Inverse temperature whose Gibbs state has the entropy of `rho`.
    pub beta_star: f64,
    /// tr(ρH) − tr(σ_{β*} H).
    pub bound: f64,
}

const BETA_LO: f64 = 1e-8;
const BETA_HI: f64 = 1e8;
const ENTROPY_TOL: f64 = 1e-10;

pub fn ergotropy_gibbs_bound(rho: &DensityMatrix, h: &HermitianOperator) -> Result<GibbsBound> {
    check_dims(rho, h)?;
    let target = rho.entropy();
    let energies = h.eig().values;
    let energy_at = |beta: f64| -> f64 {
        gibbs_weights(&energies, beta)
            .iter()
            .zip(&energies)
            .map(|(w, e)| w * e)
            .sum()
    };
    let entropy_at = |beta: f64| shannon(&gibbs_weights(&energies, beta));
    let e_rho = rho.expectation(h);

    let d = rho.dim() as f64;
    if target >= d.ln() - ENTROPY_TOL || target >= entropy_at(BETA_LO) {
        return Ok(GibbsBound {
            beta_star: 0.0,
            bound: e_rho - energies.iter().sum::<f64>() / d,
        });
    }
    if target <= entropy_at(BETA_HI) {
        return Ok(GibbsBound {
            beta_star: f64::INFINITY,
            bound: e_rho - energy_at(f64::INFINITY),
        });
    }
    // S(σ_β) decreases in β; bisect in ln β.
    let (mut lo, mut hi) = (BETA_LO.ln(), BETA_HI.ln());
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let s = entropy_at(mid.exp());
        if (s - target).abs() <= ENTROPY_TOL || hi - lo < 1e-15 {
            let beta_star = mid.exp();
            return Ok(GibbsBound {
                beta_star,
                bound: e_rho - energy_at(beta_star),
            });
        }
        if s > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::RootSolveFailed(format!(
        "entropy match for S = {target} did not converge"
    )))
}
