//! Invariant suites behind `qswitch verify`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::Path;
use std::time::Instant;

use itertools::Itertools;
use rand::Rng;
use rayon::prelude::*;

use qswitch::cvcase::oracle::{
    closed_values, fock_oracle_report, report_against, weyl_identity_gap, CvFamily, CvScenario,
};
use qswitch::cvcase::{DisplacementParams, SqueezeParams};
use qswitch::qmat::{
    expm, kron, partial_trace_matrix, ComplexMatrix, DensityMatrix, HermitianOperator, Subsystem,
    C64,
};
use qswitch::qubitcase::{
    delta_qs_rotations, minimize_delta_qs_u2, minimize_delta_sm_u2, minimize_f_u2, RotationParams,
};
use qswitch::sample::{
    self, haar_unitary, random_bloch, random_control_params, random_density, random_hermitian,
    random_passive_scenario, random_passive_state,
};
use qswitch::states::{
    ergotropy, gibbs_state, hamiltonian_control, hamiltonian_fock, BlochState,
    ControlHamiltonianParams, ThermalParams,
};
use qswitch::switchcore::{activation_report, Control, SwitchScenario};

use crate::figures::{self, FigureId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

/// Deliberate defects used to check that the suites can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    None,
    /// Conjugates the closed-form χ handed to the oracle comparison.
    ChiSign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{tag} {:<14} {} ({:.1}s)",
            self.name, self.detail, self.seconds
        )
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions<'a> {
    pub level: Level,
    pub seed: u64,
    pub mutation: Mutation,
    pub baselines: &'a Path,
}

pub fn run_verify(opts: &VerifyOptions<'_>) -> Vec<SuiteResult> {
    let full = opts.level == Level::Full;
    let seed = opts.seed;
    let mut out = vec![
        timed("qmat", || qmat_suite(seed)),
        timed("ergotropy", || ergotropy_suite(seed)),
        timed("passivity", || {
            passivity_suite(seed, if full { 10_000 } else { 1_000 })
        }),
        timed("decomposition", || decomposition_suite(seed, 200)),
        timed("rotations", || {
            rotation_suite(seed, if full { 1_000 } else { 200 })
        }),
        timed("u2_minima", || u2_suite(seed, full)),
        timed("weyl", weyl_suite),
        timed("cv_oracle", || cv_oracle_suite(full, opts.mutation)),
    ];
    if full {
        out.push(timed("figures", || figure_suite(opts.baselines)));
    }
    out
}

fn timed(name: &'static str, f: impl FnOnce() -> (bool, String)) -> SuiteResult {
    let start = Instant::now();
    let (passed, detail) = f();
    SuiteResult {
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn qmat_suite(seed: u64) -> (bool, String) {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let d = rng.gen_range(2..9);
        let h = random_hermitian(d, &mut rng);
        worst = worst.max(h.eig().reconstruct().max_abs_diff(h.matrix()));
        let u = expm(&h.matrix().scale(C64::new(0.0, -1.0)));
        worst = worst.max(u.unitarity_defect());
        let a = random_density(d, &mut rng);
        let b = random_density(2, &mut rng);
        let joint = kron(a.matrix(), b.matrix());
        let back = partial_trace_matrix(&joint, d, 2, Subsystem::A).expect("dims");
        worst = worst.max(back.max_abs_diff(a.matrix()));
    }
    (worst < 1e-9, format!("max defect {worst:.2e}"))
}

/// Lowest energy reachable by unitaries that permute the eigenvectors of ρ
/// onto those of H.
fn brute_force_ergotropy(rho: &DensityMatrix, h: &HermitianOperator) -> f64 {
    let d = rho.dim();
    let (r, e) = (rho.eig().vectors, h.eig().vectors);
    let passive = (0..d)
        .permutations(d)
        .map(|p| {
            let u = ComplexMatrix::from_fn(d, d, |a, b| {
                (0..d).map(|i| e[(a, p[i])] * r[(b, i)].conj()).sum()
            });
            rho.matrix().conjugate_by(&u).trace_product(h.matrix()).re
        })
        .fold(f64::INFINITY, f64::min);
    rho.expectation(h) - passive
}

fn ergotropy_suite(seed: u64) -> (bool, String) {
    let mut rng = sample::rng(seed ^ 0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let h = random_hermitian(4, &mut rng);
        let rho = random_density(4, &mut rng);
        let e = ergotropy(&rho, &h).expect("valid");
        worst = worst.max((e - brute_force_ergotropy(&rho, &h)).abs());
        let g = gibbs_state(&h, rng.gen_range(0.1..5.0));
        worst = worst.max(ergotropy(&g, &h).expect("valid").abs());
    }
    (worst < 1e-10, format!("max gap {worst:.2e}"))
}

/// Passive oscillator state on `d` levels with Haar unitaries.
fn passive_fock_scenario<R: Rng>(d: usize, rng: &mut R) -> SwitchScenario {
    let h_s = hamiltonian_fock(rng.gen_range(0.1..2.0), d - 1);
    let rho_s = random_passive_state(&h_s, rng);
    let h_c = hamiltonian_control(random_control_params(rng));
    let rho_c = random_passive_state(&h_c, rng);
    let u1 = haar_unitary(d, rng);
    let u2 = haar_unitary(d, rng);
    SwitchScenario::new(rho_s, Control::Mixed(rho_c), u1, u2, h_s, h_c).expect("dims agree")
}

/// Random passive scenario number `i`: a qubit, a random d-level system or a
/// truncated oscillator, with d ≤ 30.
pub fn passivity_case(seed: u64, i: u64) -> SwitchScenario {
    let mut rng = sample::rng(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i));
    match i % 3 {
        0 => random_passive_scenario(2, &mut rng),
        1 => {
            let d = rng.gen_range(3..=30);
            random_passive_scenario(d, &mut rng)
        }
        _ => {
            let d = rng.gen_range(2..=30);
            passive_fock_scenario(d, &mut rng)
        }
    }
}

pub fn passivity_suite(seed: u64, cases: u64) -> (bool, String) {
    let worst = (0..cases)
        .into_par_iter()
        .map(|i| {
            activation_report(&passivity_case(seed, i))
                .map(|r| r.delta_qs)
                .unwrap_or(f64::NEG_INFINITY)
        })
        .reduce(|| f64::INFINITY, f64::min);
    (
        worst >= -1e-8,
        format!("{cases} scenarios, min delta_qs {worst:.3e}"),
    )
}

fn decomposition_suite(seed: u64, cases: u64) -> (bool, String) {
    let worst = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample::rng(seed ^ (i << 20));
            let d = rng.gen_range(1..6);
            let s = SwitchScenario {
                control: Control::Pure(random_bloch(&mut rng)),
                ..random_passive_scenario(d, &mut rng)
            };
            let r = activation_report(&s).expect("valid");
            let tilde_trace = (r.tilde_rho_c.matrix().trace().re - 1.0).abs();
            let tilde_psd = (-r.tilde_rho_c.eigenvalues()[0]).max(0.0);
            [
                (r.delta_qs - r.delta_s - r.delta_c).abs(),
                (r.tilde_energy - r.e_sc_prime).abs(),
                r.route_gap,
                tilde_trace,
                tilde_psd,
            ]
            .into_iter()
            .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    (
        worst < 1e-8,
        format!("{cases} scenarios, max defect {worst:.2e}"),
    )
}

fn rotation_suite(seed: u64, cases: u64) -> (bool, String) {
    let mut rng = sample::rng(seed ^ 0xa11);
    let mut worst = 0.0f64;
    let mut zero_coupling_min = f64::INFINITY;
    for _ in 0..cases {
        let beta = if rng.gen_bool(0.1) {
            f64::INFINITY
        } else {
            rng.gen_range(0.0..10.0)
        };
        let t = random_control_params(&mut rng);
        let r = RotationParams::new(
            rng.gen_range(0.0..std::f64::consts::TAU),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )
        .expect("in range");
        let c = random_bloch(&mut rng);
        let v = delta_qs_rotations(beta, &t, &r, &c).expect("valid");
        worst = worst.max((v.closed - v.generic).abs());
        let t0 = ControlHamiltonianParams::new(t.omega, 0.0, 0.0).expect("valid");
        let z = delta_qs_rotations(beta, &t0, &r, &c).expect("valid");
        zero_coupling_min = zero_coupling_min.min(z.closed);
    }
    (
        worst <= 1e-8 && zero_coupling_min >= -1e-12,
        format!("{cases} points, max gap {worst:.2e}, min at |t|=0 {zero_coupling_min:.2e}"),
    )
}

fn u2_suite(seed: u64, full: bool) -> (bool, String) {
    let budget = if full { 32_000 } else { 8_000 };
    let plus = BlochState::plus();
    let mut ok = true;
    let mut notes = Vec::new();
    for beta in [0.0, 0.1, 0.2] {
        let t = ControlHamiltonianParams::new(1.0, 1.0, 0.0).expect("valid");
        let m = minimize_delta_qs_u2(&t, beta, &plus, budget, seed).expect("budget");
        let eps = m.epsilon.unwrap_or(f64::NAN);
        ok &= ((eps + 20.0) / 20.0).abs() <= 0.02;
        notes.push(format!("eps(beta={beta})={eps:.4}"));
    }
    let f = minimize_f_u2(1.0, 0.0, budget, seed).expect("budget").value;
    ok &= ((f + 16.0) / 16.0).abs() <= 0.02;
    notes.push(format!("min f={f:.4}"));
    if full {
        let at = |phi: f64| {
            let m = BlochState::new(FRAC_PI_2, phi).expect("valid");
            minimize_delta_sm_u2(1.0, 0.0, &plus, &m, budget, seed)
                .expect("budget")
                .value
        };
        let flat: Vec<f64> = [PI / 4.0, FRAC_PI_2, 3.0 * PI / 4.0]
            .into_iter()
            .map(at)
            .collect();
        let ends = [at(0.0), at(PI)];
        ok &= ends.iter().all(|v| v.abs() <= 1e-4);
        let mean = flat.iter().sum::<f64>() / 3.0;
        let std = (flat.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 3.0).sqrt();
        ok &= std <= 1e-3 * mean.abs();
        notes.push(format!(
            "min dSM at 0,pi {:.1e},{:.1e}; flat mean {mean:.4}",
            ends[0], ends[1]
        ));
    }
    (ok, notes.join(", "))
}

fn weyl_suite() -> (bool, String) {
    let a1 = DisplacementParams::new(0.8, 0.4).expect("valid");
    let a2 = DisplacementParams::new(0.6, 2.1).expect("valid");
    let (gap, k) = weyl_identity_gap(&a1, &a2, 80);
    (
        gap < 1e-10 && k >= 20,
        format!("gap {gap:.2e} on {k} levels"),
    )
}

fn cv_scenarios(full: bool) -> Vec<CvScenario> {
    let plus = BlochState::plus();
    let m = BlochState::new(FRAC_PI_2, 0.7).expect("valid");
    let t = ControlHamiltonianParams::new(1.0, 1.5, 0.3).expect("valid");
    let mut out = vec![CvScenario {
        thermal: ThermalParams::new(1.0, 1.0).expect("valid"),
        family: CvFamily::Displacements(
            DisplacementParams::new(0.9, 1.2).expect("valid"),
            DisplacementParams::new(0.7, 0.1).expect("valid"),
        ),
        t,
        control: plus,
        measurement: Some(m),
    }];
    let (alphas, zs): (&[f64], &[f64]) = if full {
        (&[0.5, 1.0, 1.5], &[0.4, 0.8])
    } else {
        (&[1.0], &[0.5])
    };
    for beta in [1.0, f64::INFINITY] {
        for &a in alphas {
            for &z in zs {
                out.push(CvScenario {
                    thermal: ThermalParams::new(beta, 1.0).expect("valid"),
                    family: CvFamily::DispSqueeze(
                        DisplacementParams::new(a, 0.4).expect("valid"),
                        SqueezeParams::new(z, 1.9).expect("valid"),
                    ),
                    t,
                    control: BlochState::new(1.1, 0.2).expect("valid"),
                    measurement: Some(m),
                });
            }
        }
    }
    out
}

fn cv_oracle_suite(full: bool, mutation: Mutation) -> (bool, String) {
    let scenarios = cv_scenarios(full);
    let results: Vec<Result<(bool, f64), String>> = scenarios
        .par_iter()
        .map(|s| {
            let n = s.default_n_max().map_err(|e| e.to_string())?;
            let schedule = [n - 20, n];
            let report = match mutation {
                Mutation::None => fock_oracle_report(s, &schedule),
                Mutation::ChiSign => {
                    let mut closed = closed_values(s).map_err(|e| e.to_string())?;
                    closed.chi = closed.chi.conj();
                    report_against(s, &schedule, &closed)
                }
            }
            .map_err(|e| e.to_string())?;
            Ok((report.converged, report.final_gap))
        })
        .collect();
    let mut ok = true;
    let mut worst = 0.0f64;
    for r in results {
        match r {
            Ok((conv, gap)) => {
                ok &= conv;
                worst = worst.max(gap);
            }
            Err(_) => ok = false,
        }
    }
    (
        ok,
        format!("{} scenarios, max gap {worst:.2e}", scenarios.len()),
    )
}

fn figure_suite(baselines: &Path) -> (bool, String) {
    let mut failed = Vec::new();
    for id in FigureId::all() {
        let path = baselines.join(id.file_name());
        let ok = std::fs::read_to_string(&path).ok().and_then(|base| {
            let fresh = figures::emit(id).and_then(|t| t.to_csv()).ok()?;
            figures::compare(&base, &fresh, figures::REGRESSION_TOL).ok()
        });
        if !matches!(ok, Some(r) if r.within_tolerance) {
            failed.push(id.to_string());
        }
    }
    if failed.is_empty() {
        (true, "9 figures within tolerance".into())
    } else {
        (false, format!("regressed: {}", failed.join(" ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_matches_spectral() {
        let mut rng = sample::rng(1);
        let h = random_hermitian(3, &mut rng);
        let rho = random_density(3, &mut rng);
        let e = ergotropy(&rho, &h).unwrap();
        assert!((e - brute_force_ergotropy(&rho, &h)).abs() < 1e-10);
    }

    #[test]
    fn chi_mutation_is_caught() {
        assert!(cv_oracle_suite(false, Mutation::None).0);
        assert!(!cv_oracle_suite(false, Mutation::ChiSign).0);
    }

    #[test]
    fn passivity_cases_cover_all_kinds() {
        let dims: Vec<usize> = (0..6).map(|i| passivity_case(0, i).dim()).collect();
        assert_eq!(dims[0], 2);
        assert!(dims.iter().all(|&d| (2..=30).contains(&d)));
    }
}
