//! Seeded random states, operators and scenarios for property sweeps.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use std::f64::consts::{PI, TAU};

use crate::qmat::{ComplexMatrix, DensityMatrix, HermitianOperator, UnitaryOperator, C64};
use crate::states::{hamiltonian_control, BlochState, ControlHamiltonianParams};
use crate::switchcore::{Control, SwitchScenario};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitaryOperator {
    let qr = gaussian_matrix(d, rng).to_nalgebra().qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = ComplexMatrix::from_nalgebra(&q);
    for c in 0..d {
        let rc = r[(c, c)];
        let phase = if rc.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            rc / rc.norm()
        };
        for row in 0..d {
            u[(row, c)] *= phase;
        }
    }
    UnitaryOperator::from_trusted(u)
}

/// Hermitian matrix (G + G†)/2 with Gaussian G.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator {
    let g = gaussian_matrix(d, rng);
    HermitianOperator::from_trusted((&g + &g.adjoint()).scale_real(0.5))
}

/// Probability vector, flat on the simplex.
pub fn random_probabilities<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut p: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let z: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= z);
    p
}

/// Random full-rank state.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let p = random_probabilities(d, rng);
    let u = haar_unitary(d, rng);
    DensityMatrix::from_trusted(ComplexMatrix::from_real_diag(&p).conjugate_by(u.matrix()))
}

/// Random state passive with respect to `h`: populations sorted against the
/// energy eigenbasis.
pub fn random_passive_state<R: Rng + ?Sized>(h: &HermitianOperator, rng: &mut R) -> DensityMatrix {
    let mut p = random_probabilities(h.dim(), rng);
    p.sort_by(|a, b| b.total_cmp(a));
    let eig = h.eig();
    DensityMatrix::from_trusted(ComplexMatrix::from_real_diag(&p).conjugate_by(&eig.vectors))
}

pub fn random_bloch<R: Rng + ?Sized>(rng: &mut R) -> BlochState {
    let theta = (1.0 - 2.0 * rng.gen::<f64>()).acos();
    BlochState::new(theta, rng.gen_range(0.0..TAU)).expect("in range")
}

/// H_C = [[0, t], [t*, ω]] with ω ∈ (0.1, 2], |t| ∈ [0, 2), random arg t.
pub fn random_control_params<R: Rng + ?Sized>(rng: &mut R) -> ControlHamiltonianParams {
    ControlHamiltonianParams::new(
        0.1 + 1.9 * (1.0 - rng.gen::<f64>()),
        2.0 * rng.gen::<f64>(),
        rng.gen_range(-PI..PI),
    )
    .expect("valid ranges")
}

/// Switch experiment with passive system and control states, Haar U1 and
/// U2, and a random system Hamiltonian of dimension `d`.
pub fn random_passive_scenario<R: Rng + ?Sized>(d: usize, rng: &mut R) -> SwitchScenario {
    let h_s = random_hermitian(d, rng);
    let rho_s = random_passive_state(&h_s, rng);
    let h_c = hamiltonian_control(random_control_params(rng));
    let rho_c = random_passive_state(&h_c, rng);
    let u1 = haar_unitary(d, rng);
    let u2 = haar_unitary(d, rng);
    SwitchScenario::new(rho_s, Control::Mixed(rho_c), u1, u2, h_s, h_c).expect("dims agree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::is_passive;

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut r = rng(7);
        for d in [1, 2, 5, 30] {
            let u = haar_unitary(d, &mut r);
            assert!(u.matrix().unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn passive_samples_are_passive() {
        let mut r = rng(3);
        for d in [2, 3, 6] {
            let h = random_hermitian(d, &mut r);
            let rho = random_passive_state(&h, &mut r);
            assert!(is_passive(&rho, &h, 1e-10).unwrap().passive);
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let a = haar_unitary(4, &mut rng(11));
        let b = haar_unitary(4, &mut rng(11));
        assert_eq!(a.matrix(), b.matrix());
    }
}
