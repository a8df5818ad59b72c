//! Schrödinger evolution under `H(t) = (1 − λ(t)) H_D + λ(t) H_P`.
//!
//! The production integrator never materializes `H(t)`: each step factors
//! into exact sub-unitaries, a product of single-qubit X rotations for the
//! drive and a diagonal phase for the problem term.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::hamiltonians::{build_hp, build_ht, DriveSpec, ProblemHamiltonian, ScheduleSpec};
use crate::instances::NppInstance;
use crate::linalg::{apply_diagonal_phase, apply_matrix, apply_x_rotations, unitary_exp, StateVector};
use crate::metrics::{approximation_error, success_probability};

pub const DEFAULT_TOTAL_TIME: f64 = 50.0;
pub const DEFAULT_STEPS: usize = 1000;
pub const MAX_DENSE_QUBITS: usize = 6;

/// Composition scheme for one time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Splitting {
    /// Second-order Strang: half drive, full phase, half drive, with λ
    /// evaluated at the step midpoint.
    #[default]
    Strang,
    /// Fourth-order Suzuki composition of five Strang substeps.
    Suzuki4,
}

impl Splitting {
    pub fn order(self) -> u32 {
        match self {
            Splitting::Strang => 2,
            Splitting::Suzuki4 => 4,
        }
    }

    /// Substep fractions of one step.
    fn stages(self) -> &'static [f64] {
        const STRANG: [f64; 1] = [1.0];
        // p = 1 / (4 − 4^{1/3}); stages p, p, 1 − 4p, p, p.
        const P: f64 = 0.414_490_771_794_375_7;
        const SUZUKI: [f64; 5] = [P, P, 1.0 - 4.0 * P, P, P];
        match self {
            Splitting::Strang => &STRANG,
            Splitting::Suzuki4 => &SUZUKI,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaConfig {
    pub schedule: ScheduleSpec,
    pub drive: DriveSpec,
    /// Base step; the run uses `ceil(T / dt)` equal steps.
    pub dt: f64,
    pub method: Splitting,
}

impl QaConfig {
    /// Linear schedule, uniform drive, `dt = T / 1000`, Strang splitting.
    pub fn standard(n: usize, total_time: f64) -> Result<Self> {
        Ok(QaConfig {
            schedule: ScheduleSpec::linear(total_time)?,
            drive: DriveSpec::uniform(n),
            dt: total_time / DEFAULT_STEPS as f64,
            method: Splitting::Strang,
        })
    }

    pub fn total_time(&self) -> f64 {
        self.schedule.total_time()
    }

    pub fn steps(&self) -> usize {
        ((self.total_time() / self.dt) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= self.total_time()) {
            return Err(domain(format!("step {} outside (0, T = {}]", self.dt, self.total_time())));
        }
        if self.drive.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.drive.n() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct QaResult {
    pub final_state: StateVector,
    /// `E(T) = ⟨ψ(T)|H_P|ψ(T)⟩`.
    pub energy: f64,
    pub epsilon: f64,
    pub p_success: f64,
    pub wall_time: Duration,
    pub steps: usize,
    pub config: QaConfig,
    pub instance_seed: u64,
}

/// Split-operator propagation of `state` over `[0, total_time]` in `steps`
/// equal steps, with the schedule supplied as a closure.
pub fn propagate_split(
    state: &mut StateVector,
    hp: &ProblemHamiltonian,
    drive: &DriveSpec,
    total_time: f64,
    steps: usize,
    method: Splitting,
    lambda: impl Fn(f64) -> f64,
) -> Result<()> {
    let n = state.n();
    if hp.n() != n || drive.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: hp.n().max(drive.n()) });
    }
    let h = total_time / steps as f64;
    let stages = method.stages();
    let mut angles = vec![0.0; n];
    // Drive weight (1 − λ)·τ/2 of the last half-step, folded into the next one.
    let mut pending = 0.0;
    let total = steps * stages.len();
    let mut counter = 0;

    for k in 0..steps {
        let mut t = k as f64 * h;
        for &frac in stages {
            let tau = frac * h;
            let lam = lambda(t + 0.5 * tau);
            let half = 0.5 * (1.0 - lam) * tau;
            rotate(state, drive, &mut angles, pending + half)?;
            apply_diagonal_phase(state, hp.op(), lam * tau)?;
            pending = half;
            t += tau;
            counter += 1;
            if counter % 256 == 0 && !state.norm_sqr().is_finite() {
                return Err(Error::IntegratorFailure { step: counter, total });
            }
        }
    }
    rotate(state, drive, &mut angles, pending)?;
    if !state.is_finite() {
        return Err(Error::IntegratorFailure { step: total, total });
    }
    Ok(())
}

fn rotate(state: &mut StateVector, drive: &DriveSpec, angles: &mut [f64], weight: f64) -> Result<()> {
    for (a, &hi) in angles.iter_mut().zip(drive.h()) {
        *a = weight * hi;
    }
    apply_x_rotations(state, angles)
}

/// Reference propagation: per step, the exact exponential of the dense
/// midpoint Hamiltonian. Only for `n ≤ 6`.
pub fn propagate_dense(
    state: &mut StateVector,
    hp: &ProblemHamiltonian,
    drive: &DriveSpec,
    total_time: f64,
    steps: usize,
    lambda: impl Fn(f64) -> f64,
) -> Result<()> {
    if state.n() > MAX_DENSE_QUBITS {
        return Err(domain(format!("dense reference limited to {MAX_DENSE_QUBITS} qubits")));
    }
    let h = total_time / steps as f64;
    for k in 0..steps {
        let lam = lambda((k as f64 + 0.5) * h);
        let u = unitary_exp(&build_ht(hp, drive, lam)?, h)?;
        *state = apply_matrix(&u, state)?;
    }
    Ok(())
}

fn finish(
    state: StateVector,
    hp: &ProblemHamiltonian,
    cfg: &QaConfig,
    seed: u64,
    started: Instant,
) -> Result<QaResult> {
    let energy = hp.op().expectation(&state)?;
    Ok(QaResult {
        epsilon: approximation_error(energy, hp.e_min(), hp.e_max()),
        p_success: success_probability(&state, hp.ground_indices()),
        energy,
        final_state: state,
        wall_time: started.elapsed(),
        steps: cfg.steps(),
        config: cfg.clone(),
        instance_seed: seed,
    })
}

/// Anneals from `|+⟩^⊗n` and reports `E(T)`, `ε` and `P_S`.
pub fn evolve(inst: &NppInstance, cfg: &QaConfig) -> Result<QaResult> {
    evolve_with(&build_hp(inst), cfg, inst.seed())
}

/// [`evolve`] with a prebuilt problem Hamiltonian (the optimizer hot path).
pub fn evolve_with(hp: &ProblemHamiltonian, cfg: &QaConfig, seed: u64) -> Result<QaResult> {
    let started = Instant::now();
    cfg.validate(hp.n())?;
    let mut state = StateVector::plus(hp.n());
    let sched = &cfg.schedule;
    propagate_split(&mut state, hp, &cfg.drive, cfg.total_time(), cfg.steps(), cfg.method, |t| {
        sched.lambda_at(t)
    })?;
    finish(state, hp, cfg, seed, started)
}

/// Dense-matrix oracle integrator (`n ≤ 6`), same step count as `cfg`.
pub fn evolve_dense_reference(inst: &NppInstance, cfg: &QaConfig) -> Result<QaResult> {
    let started = Instant::now();
    let hp = build_hp(inst);
    cfg.validate(hp.n())?;
    let mut state = StateVector::plus(hp.n());
    let sched = &cfg.schedule;
    propagate_dense(&mut state, &hp, &cfg.drive, cfg.total_time(), cfg.steps(), |t| sched.lambda_at(t))?;
    finish(state, &hp, cfg, inst.seed(), started)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::generate_instance;
    use crate::linalg::{fidelity, flip_all};

    fn cfg_with(n: usize, t: f64, steps: usize) -> QaConfig {
        let mut c = QaConfig::standard(n, t).unwrap();
        c.dt = t / steps as f64;
        c
    }

    #[test]
    fn vanishing_time_keeps_plus_state() {
        let inst = generate_instance(5, 1).unwrap();
        let r = evolve(&inst, &QaConfig::standard(5, 1e-6).unwrap()).unwrap();
        assert!(fidelity(&r.final_state, &StateVector::plus(5)).unwrap() > 1.0 - 1e-10);
        let d = build_hp(&inst).degeneracy() as f64;
        assert!((r.p_success - d / 32.0).abs() < 1e-8);
    }

    #[test]
    fn two_qubit_anneals_match_external_propagator() {
        // Reference values from an independent 4×4 propagation
        // (matrix exponential of the midpoint Hamiltonian, 20000 steps).
        for (numbers, want) in [([1u64, 1], 0.816_217_923_841_308), ([3, 1], 0.993_876_244_840_381_6)] {
            let inst = NppInstance::new(numbers.to_vec(), 0).unwrap();
            let mut cfg = QaConfig::standard(2, 50.0).unwrap();
            cfg.dt = 50.0 / 20000.0;
            let r = evolve(&inst, &cfg).unwrap();
            assert!((r.p_success - want).abs() < 1e-6, "{numbers:?}: {}", r.p_success);
            assert!((r.final_state.norm_sqr() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn matches_dense_reference() {
        for (n, seed, t) in [(4usize, 3u64, 5.0), (3, 8, 20.0), (4, 11, 50.0)] {
            let inst = generate_instance(n, seed).unwrap();
            let cfg = cfg_with(n, t, (t / 1e-3) as usize);
            let fast = evolve(&inst, &cfg).unwrap();
            let slow = evolve_dense_reference(&inst, &cfg).unwrap();
            assert!(
                (fast.p_success - slow.p_success).abs() < 1e-6,
                "n={n} T={t}: {} vs {}",
                fast.p_success,
                slow.p_success
            );
        }
    }

    #[test]
    fn pinned_lambda_reference_cases() {
        let inst = generate_instance(3, 2).unwrap();
        let hp = build_hp(&inst);
        let drive = DriveSpec::uniform(3);

        let mut s = StateVector::plus(3);
        propagate_dense(&mut s, &hp, &drive, 4.0, 40, |_| 0.0).unwrap();
        assert!(fidelity(&s, &StateVector::plus(3)).unwrap() > 1.0 - 1e-12);

        let mut rng = crate::rng::Rng::new(5);
        let amps = (0..8).map(|_| crate::C64::new(rng.uniform_f64(), rng.uniform_f64())).collect();
        let mut s = StateVector::from_amps(3, amps).unwrap();
        s.normalize();
        let p0 = s.probabilities();
        propagate_dense(&mut s, &hp, &drive, 4.0, 40, |_| 1.0).unwrap();
        for (a, b) in s.probabilities().iter().zip(&p0) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn step_halving_converges() {
        for seed in [1u64, 2] {
            let inst = generate_instance(6, seed).unwrap();
            let coarse = evolve(&inst, &QaConfig::standard(6, 50.0).unwrap()).unwrap();
            let fine = evolve(&inst, &cfg_with(6, 50.0, 2 * DEFAULT_STEPS)).unwrap();
            assert!(
                (coarse.epsilon - fine.epsilon).abs() < 1e-6,
                "seed {seed}: {} vs {}",
                coarse.epsilon,
                fine.epsilon
            );
        }
    }

    #[test]
    fn suzuki_agrees_with_fine_strang() {
        let inst = generate_instance(5, 4).unwrap();
        let mut cfg = cfg_with(5, 20.0, 200);
        cfg.method = Splitting::Suzuki4;
        let s4 = evolve(&inst, &cfg).unwrap();
        let fine = evolve(&inst, &cfg_with(5, 20.0, 20_000)).unwrap();
        assert!(fidelity(&s4.final_state, &fine.final_state).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn norm_and_flip_symmetry() {
        let inst = generate_instance(6, 9).unwrap();
        let r = evolve(&inst, &cfg_with(6, 50.0, 1000)).unwrap();
        assert!((r.final_state.norm_sqr() - 1.0).abs() < 1e-8);
        let p = r.final_state.probabilities();
        for b in 0..64 {
            assert!((p[b] - p[flip_all(b, 6)]).abs() < 1e-8);
        }
        assert!((0.0..=1.0).contains(&r.epsilon));
        assert!((0.0..=1.0).contains(&r.p_success));
    }

    #[test]
    fn success_grows_with_time() {
        let inst = generate_instance(4, 6).unwrap();
        let ps: Vec<f64> = [1.0, 5.0, 20.0, 100.0]
            .iter()
            .map(|&t| evolve(&inst, &QaConfig::standard(4, t).unwrap()).unwrap().p_success)
            .collect();
        for w in ps.windows(2) {
            assert!(w[1] >= w[0] - 1e-3, "{ps:?}");
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let inst = generate_instance(3, 1).unwrap();
        let mut cfg = QaConfig::standard(3, 10.0).unwrap();
        cfg.dt = 20.0;
        assert!(evolve(&inst, &cfg).is_err());
        let cfg = QaConfig::standard(4, 10.0).unwrap();
        assert!(evolve(&inst, &cfg).is_err());
        let big = generate_instance(7, 1).unwrap();
        assert!(evolve_dense_reference(&big, &QaConfig::standard(7, 1.0).unwrap()).is_err());
    }
}
