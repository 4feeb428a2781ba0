//! Derivative-free minimization: Nelder–Mead simplex, seeded multi-start over a
//! box or torus, and golden-section search in one dimension.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Best point found by a minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    pub initial_step: f64,
    /// Stop once the simplex values spread less than this.
    pub f_tol: f64,
    /// and the simplex diameter is below this.
    pub x_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 500,
            initial_step: 0.5,
            f_tol: 1e-15,
            x_tol: 1e-10,
        }
    }
}

/// Coordinate domain. On a torus, coordinates are wrapped before every evaluation,
/// so the simplex may drift freely across the period.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Box(Vec<(f64, f64)>),
    Torus(Vec<(f64, f64)>),
}

impl Domain {
    pub fn torus(dim: usize, lo: f64, hi: f64) -> Self {
        Domain::Torus(vec![(lo, hi); dim])
    }

    pub fn dim(&self) -> usize {
        self.bounds().len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        match self {
            Domain::Box(b) | Domain::Torus(b) => b,
        }
    }

    /// Maps a free coordinate vector into the domain.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Domain::Torus(b) => x
                .iter()
                .zip(b)
                .map(|(&v, &(lo, hi))| {
                    let w = lo + (v - lo).rem_euclid(hi - lo);
                    if w >= hi {
                        lo
                    } else {
                        w
                    }
                })
                .collect(),
            Domain::Box(b) => x
                .iter()
                .zip(b)
                .map(|(&v, &(lo, hi))| v.clamp(lo, hi))
                .collect(),
        }
    }
}

/// Nelder–Mead with standard coefficients. The returned point is the best
/// evaluation seen, already projected into `domain`.
pub fn nelder_mead<F>(f: &F, x0: &[f64], domain: &Domain, opts: &NelderMeadOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let n = x0.len();
    assert_eq!(n, domain.dim(), "start point dimension");
    let mut evals = 0usize;
    let mut best_x = domain.project(x0);
    let mut best_v = f64::INFINITY;
    let eval = |x: &[f64], evals: &mut usize, best_x: &mut Vec<f64>, best_v: &mut f64| {
        let p = domain.project(x);
        let v = f(&p);
        let v = if v.is_nan() { f64::INFINITY } else { v };
        *evals += 1;
        if v < *best_v {
            *best_v = v;
            *best_x = p;
        }
        v
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    for v in &simplex {
        if evals >= opts.max_evals {
            break;
        }
        values.push(eval(v, &mut evals, &mut best_x, &mut best_v));
    }
    if values.len() < n + 1 {
        return Minimum {
            x: best_x,
            value: best_v,
            evals,
        };
    }

    while evals < opts.max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&k| simplex[k].clone()).collect();
        values = order.iter().map(|&k| values[k]).collect();

        let spread = values[n] - values[0];
        let diameter = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread.abs() <= opts.f_tol && diameter <= opts.x_tol {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(1.0);
        let fr = eval(&xr, &mut evals, &mut best_x, &mut best_v);
        if fr < values[0] {
            if evals >= opts.max_evals {
                simplex[n] = xr;
                values[n] = fr;
                break;
            }
            let xe = along(2.0);
            let fe = eval(&xe, &mut evals, &mut best_x, &mut best_v);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        if evals >= opts.max_evals {
            break;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(0.5);
            let fc = eval(&xc, &mut evals, &mut best_x, &mut best_v);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = eval(&xc, &mut evals, &mut best_x, &mut best_v);
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        // shrink toward the best vertex
        for k in 1..=n {
            if evals >= opts.max_evals {
                break;
            }
            let shrunk: Vec<f64> = simplex[k]
                .iter()
                .zip(&simplex[0])
                .map(|(v, b)| b + 0.5 * (v - b))
                .collect();
            values[k] = eval(&shrunk, &mut evals, &mut best_x, &mut best_v);
            simplex[k] = shrunk;
        }
    }

    Minimum {
        x: best_x,
        value: best_v,
        evals,
    }
}

/// Radical inverse of `index` in the given prime base.
fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut out = 0.0;
    let mut scale = inv;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Point `index` (0-based) of the Halton sequence in `[0,1)^dim`.
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "halton supports up to 16 dimensions");
    PRIMES[..dim]
        .iter()
        .map(|&b| radical_inverse(index + 1, b))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiStartOptions {
    /// Total evaluation budget shared by all starts.
    pub budget: usize,
    pub evals_per_start: usize,
    pub seed: u64,
    pub initial_step: f64,
}

impl Default for MultiStartOptions {
    fn default() -> Self {
        Self {
            budget: 64 * 500,
            evals_per_start: 500,
            seed: 0,
            initial_step: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiStartResult {
    pub best: Minimum,
    /// Index of the start that produced `best`.
    pub start: usize,
    pub starts: usize,
    pub total_evals: usize,
}

/// Start points: a Halton sequence under a seeded random shift (mod 1),
/// scaled to the domain bounds.
pub fn start_points(domain: &Domain, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let dim = domain.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    (0..count)
        .map(|k| {
            halton(k as u64, dim)
                .iter()
                .zip(&shift)
                .zip(domain.bounds())
                .map(|((u, s), &(lo, hi))| lo + (u + s).fract() * (hi - lo))
                .collect()
        })
        .collect()
}

/// Runs Nelder–Mead from seeded low-discrepancy starts in parallel. Starts are
/// prefixes of one sequence, so a larger budget never loses the incumbent;
/// ties are broken by the lower start index, so the result is schedule-independent.
pub fn multistart<F>(f: &F, domain: &Domain, opts: &MultiStartOptions) -> MultiStartResult
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    assert!(opts.evals_per_start > 0 && opts.budget > 0);
    let full = opts.budget / opts.evals_per_start;
    let rest = opts.budget % opts.evals_per_start;
    let count = full + usize::from(rest > 0);
    let starts = start_points(domain, count, opts.seed);
    let runs: Vec<Minimum> = starts
        .par_iter()
        .enumerate()
        .map(|(k, x0)| {
            let nm = NelderMeadOptions {
                max_evals: if k < full { opts.evals_per_start } else { rest },
                initial_step: opts.initial_step,
                ..NelderMeadOptions::default()
            };
            nelder_mead(f, x0, domain, &nm)
        })
        .collect();
    let total_evals = runs.iter().map(|m| m.evals).sum();
    let (start, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.value < a.1.value { b } else { a })
        .expect("at least one start");
    MultiStartResult {
        best,
        start,
        starts: count,
        total_evals,
    }
}

/// Golden-section search for a minimum of a unimodal function on `[a, b]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn halton_first_points() {
        assert_eq!(halton(0, 2), vec![0.5, 1.0 / 3.0]);
        assert_eq!(halton(1, 2), vec![0.25, 2.0 / 3.0]);
        let p = halton(2, 3);
        assert!((p[0] - 0.75).abs() < 1e-15 && (p[2] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let dom = Domain::Box(vec![(-5.0, 5.0); 2]);
        let opts = NelderMeadOptions {
            max_evals: 4000,
            ..Default::default()
        };
        let m = nelder_mead(&f, &[-1.2, 1.0], &dom, &opts);
        assert!(m.value < 1e-10, "{m:?}");
        assert!(m.evals <= 4000);
    }

    #[test]
    fn torus_wraps_across_period() {
        // minimum sits exactly on the seam at 0 ≡ 2π
        let f = |x: &[f64]| -x[0].cos() - x[1].cos();
        let dom = Domain::torus(2, 0.0, TAU);
        let m = nelder_mead(&f, &[6.0, 0.3], &dom, &NelderMeadOptions::default());
        assert!((m.value + 2.0).abs() < 1e-10);
        assert!(m.x.iter().all(|&v| (0.0..TAU).contains(&v)));
    }

    #[test]
    fn multistart_is_deterministic_and_monotone() {
        let f = |x: &[f64]| {
            (x[0] * 3.0).sin() * (x[1] * 2.0).cos() + 0.1 * (x[0] - PI).powi(2) + (x[2]).sin()
        };
        let dom = Domain::torus(3, 0.0, TAU);
        let mut prev = f64::INFINITY;
        for budget in [300, 1000, 2500, 6000] {
            let opts = MultiStartOptions {
                budget,
                evals_per_start: 200,
                seed: 7,
                ..Default::default()
            };
            let a = multistart(&f, &dom, &opts);
            let b = multistart(&f, &dom, &opts);
            assert_eq!(a, b);
            assert!(a.best.value <= prev);
            assert!(a.total_evals <= budget);
            prev = a.best.value;
        }
    }

    #[test]
    fn golden_section_parabola() {
        let (x, fx) = golden_section(|x| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }
}
