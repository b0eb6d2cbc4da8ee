//! The classical standard map under the same kick schedules.
//!
//! `P' = P + K sin(theta)`, `theta' = theta + P' (mod 2 pi)`, with `K` taken
//! from the schedule letter at each step.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::obs::{fit_power_law, ExponentFit};
use crate::rng::XorShift64Star;
use crate::seqgen::KickSequence;

/// Particles per parallel work unit. Fixed so reductions do not depend on the
/// thread count.
const CHUNK: usize = 256;

/// Default ensemble size.
pub const DEFAULT_PARTICLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub theta: f64,
    pub momentum: f64,
}

fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2 pi
    if t >= TAU {
        0.0
    } else {
        t
    }
}

pub fn standard_map_step(particle: Particle, k: f64) -> Particle {
    let momentum = particle.momentum + k * particle.theta.sin();
    Particle {
        theta: wrap_angle(particle.theta + momentum),
        momentum,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalEnsemble {
    pub particles: Vec<Particle>,
    pub seed: u64,
    pub sequence: KickSequence,
}

/// `<P^2>` after the recorded steps.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSeries {
    pub steps: Vec<u64>,
    pub mean_p2: Vec<f64>,
}

impl ClassicalEnsemble {
    /// `count` particles with `theta` uniform on `[0, 2 pi)` and `P = 0`.
    pub fn new(count: usize, seed: u64, sequence: KickSequence) -> Self {
        let mut rng = XorShift64Star::new(seed);
        let particles = (0..count)
            .map(|_| Particle {
                theta: wrap_angle(TAU * rng.next_f64()),
                momentum: 0.0,
            })
            .collect();
        Self {
            particles,
            seed,
            sequence,
        }
    }

    /// `K1`, the strength behind letter `A`.
    pub fn k1(&self) -> f64 {
        self.sequence.kappa1
    }

    pub fn k2(&self) -> f64 {
        self.sequence.kappa2
    }

    pub fn mean_p2(&self) -> f64 {
        chunked_mean_p2(&self.particles)
    }
}

fn chunked_mean_p2(particles: &[Particle]) -> f64 {
    let partial: Vec<f64> = particles
        .par_chunks(CHUNK)
        .map(|c| c.iter().map(|p| p.momentum * p.momentum).sum())
        .collect();
    partial.iter().sum::<f64>() / particles.len() as f64
}

/// Applies `n_steps` kicks and records `<P^2>` at `record_steps`.
pub fn ensemble_evolve(
    ensemble: &mut ClassicalEnsemble,
    n_steps: usize,
    record_steps: &[u64],
) -> Result<ClassicalSeries> {
    if ensemble.sequence.len() < n_steps {
        return Err(Error::InvalidSequence(format!(
            "schedule has {} kicks, {} requested",
            ensemble.sequence.len(),
            n_steps
        )));
    }
    if record_steps.windows(2).any(|w| w[0] >= w[1])
        || record_steps.iter().any(|&s| s < 1 || s > n_steps as u64)
    {
        return Err(Error::InvalidRecordSteps(format!(
            "record steps must be increasing within [1, {n_steps}]"
        )));
    }
    let kicks: Vec<f64> = ensemble.sequence.strengths().take(n_steps).collect();
    let count = ensemble.particles.len();

    // each chunk runs the whole schedule; partial sums are combined in chunk order
    let partials: Vec<Vec<f64>> = ensemble
        .particles
        .par_chunks_mut(CHUNK)
        .map(|chunk| {
            let mut sums = Vec::with_capacity(record_steps.len());
            let mut next = record_steps.iter().peekable();
            for (j, &k) in kicks.iter().enumerate() {
                for p in chunk.iter_mut() {
                    *p = standard_map_step(*p, k);
                }
                if next.peek() == Some(&&(j as u64 + 1)) {
                    sums.push(chunk.iter().map(|p| p.momentum * p.momentum).sum::<f64>());
                    next.next();
                }
            }
            sums
        })
        .collect();

    let mean_p2 = (0..record_steps.len())
        .map(|i| partials.iter().map(|s| s[i]).sum::<f64>() / count as f64)
        .collect();
    Ok(ClassicalSeries {
        steps: record_steps.to_vec(),
        mean_p2,
    })
}

/// Exponent of `sqrt(<P^2>) ~ n^c` over the default window.
pub fn classical_exponent(series: &ClassicalSeries) -> Result<ExponentFit> {
    let rms: Vec<f64> = series.mean_p2.iter().map(|v| v.sqrt()).collect();
    fit_power_law(&series.steps, &rms, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obs::log_spaced_steps;
    use crate::seqgen::{KickSequence, Letter};
    use std::f64::consts::PI;

    fn periodic(k: f64, n: usize) -> KickSequence {
        KickSequence::periodic(&[Letter::A], k, k, n).unwrap()
    }

    #[test]
    fn kick_at_zero_angle() {
        let p = standard_map_step(
            Particle {
                theta: 0.0,
                momentum: 7.0,
            },
            3.0,
        );
        assert_eq!(p.momentum, 7.0);
        assert!((p.theta - (7.0 - TAU)).abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_fixed_point() {
        let start = Particle {
            theta: PI,
            momentum: 0.0,
        };
        let p = standard_map_step(start, 0.9);
        assert!(p.momentum.abs() < 1e-15);
        assert!((p.theta - PI).abs() < 1e-15);
    }

    #[test]
    fn free_rotation_without_kicks() {
        let p = standard_map_step(
            Particle {
                theta: 1.0,
                momentum: 2.5,
            },
            0.0,
        );
        assert_eq!(p.momentum, 2.5);
        assert!((p.theta - 3.5).abs() < 1e-15);
        assert!((0.0..TAU).contains(&wrap_angle(-1e-18)));
    }

    #[test]
    fn jacobian_is_unimodular() {
        let mut rng = XorShift64Star::new(5);
        let h = 1e-6;
        for _ in 0..200 {
            let theta = 0.5 + 5.0 * rng.next_f64();
            let momentum = 4.0 * rng.next_f64() - 2.0;
            let k = 3.0 * rng.next_f64();
            // unwrapped map so finite differences do not straddle the cut
            let f = |t: f64, p: f64| {
                let p2 = p + k * t.sin();
                (t + p2, p2)
            };
            let (tp, pp) = f(theta + h, momentum);
            let (tm, pm) = f(theta - h, momentum);
            let (tq, pq) = f(theta, momentum + h);
            let (tr, pr) = f(theta, momentum - h);
            let a = (tp - tm) / (2.0 * h);
            let b = (tq - tr) / (2.0 * h);
            let c = (pp - pm) / (2.0 * h);
            let d = (pq - pr) / (2.0 * h);
            assert!((a * d - b * c - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn no_kicks_constant_mean_p2() {
        let mut e = ClassicalEnsemble::new(1000, 1, periodic(0.0, 100));
        let s = ensemble_evolve(&mut e, 100, &[1, 50, 100]).unwrap();
        assert_eq!(s.mean_p2, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn deterministic_from_seed() {
        let seq = KickSequence::fibonacci(0.5, 0.8, 500);
        let mut a = ClassicalEnsemble::new(1000, 9, seq.clone());
        let mut b = ClassicalEnsemble::new(1000, 9, seq);
        let steps = log_spaced_steps(500, 16);
        let sa = ensemble_evolve(&mut a, 500, &steps).unwrap();
        let sb = ensemble_evolve(&mut b, 500, &steps).unwrap();
        assert_eq!(sa, sb);
        assert_eq!(a.particles, b.particles);
        assert_eq!(sa.mean_p2.last().copied(), Some(a.mean_p2()));
    }

    #[test]
    fn initial_angles_uniform() {
        let e = ClassicalEnsemble::new(10_000, 3, periodic(0.5, 1));
        let mean = e.particles.iter().map(|p| p.theta).sum::<f64>() / 1e4;
        assert!((mean - PI).abs() < 0.05);
        assert!(e.particles.iter().all(|p| p.momentum == 0.0));
    }

    #[test]
    fn rejects_short_schedule() {
        let mut e = ClassicalEnsemble::new(10, 3, periodic(0.5, 5));
        assert!(ensemble_evolve(&mut e, 10, &[10]).is_err());
        assert!(ensemble_evolve(&mut e, 5, &[6]).is_err());
    }

    #[test]
    fn subcritical_periodic_is_confined() {
        let mut e = ClassicalEnsemble::new(2000, 11, periodic(0.5, 2000));
        let s = ensemble_evolve(&mut e, 2000, &[100, 500, 1000, 2000]).unwrap();
        let max = s.mean_p2.iter().copied().fold(0.0, f64::max);
        assert!(max < 10.0 * s.mean_p2[0]);
    }
}
