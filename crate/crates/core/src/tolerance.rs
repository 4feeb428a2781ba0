//! Absolute tolerances shared by every module. Energies are in units of ω.

/// Hermiticity of operators and density matrices.
pub const HERM: f64 = 1e-10;
/// Unit trace of density matrices.
pub const TRACE: f64 = 1e-10;
/// U†U = 1.
pub const UNITARY: f64 = 1e-10;
/// Smallest admissible eigenvalue of a density matrix is `-PSD`.
pub const PSD: f64 = 1e-9;
/// Eigendecomposition reconstruction error.
pub const EIG: f64 = 1e-9;
/// Agreement between independent computation routes of an energy.
pub const ENERGY: f64 = 1e-8;
/// Post-selection probabilities at or below this are reported as divergent.
pub const NM: f64 = 1e-12;
/// Thermal tail weight dropped by Fock truncation.
pub const TRUNC: f64 = 1e-12;
/// Optimizer-recovered constants.
pub const OPT: f64 = 1e-4;
/// Closed form vs truncated-Fock oracle.
pub const ORACLE: f64 = 1e-6;
/// Leakage onto the top tenth of a truncated Fock space that still counts as "safe".
pub const FOCK_LEAK: f64 = 1e-10;
