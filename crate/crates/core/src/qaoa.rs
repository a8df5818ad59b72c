//! Standard and adaptive QAOA ansatz states.
//!
//! Layer `k` applies `e^{−iγ_k H_phase}` and then `e^{−iβ_k H_D}` with the
//! uniform drive. `H_phase` is `H_P` for the standard ansatz and
//! `H_NPP(α) = (Σ α_i σ^z_i)²` for the adaptive one, with a single α vector
//! shared by all layers. The cost is always measured against the original
//! `H_P`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::hamiltonians::{adaptive_diag_into, build_hp, AdaptiveWeights, ProblemHamiltonian};
use crate::instances::NppInstance;
use crate::linalg::{apply_diagonal_phase, apply_x_rotations, DiagonalOp, StateVector};
use crate::metrics::{approximation_error, success_probability};

pub const BETA_MAX: f64 = FRAC_PI_2;
pub const GAMMA_MAX: f64 = PI;
pub const ALPHA_BOUND: f64 = AdaptiveWeights::BOUND;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Present for the adaptive ansatz.
    pub alpha: Option<Vec<f64>>,
}

impl QaoaParams {
    pub fn standard(beta: Vec<f64>, gamma: Vec<f64>) -> Self {
        QaoaParams { beta, gamma, alpha: None }
    }

    pub fn adaptive(beta: Vec<f64>, gamma: Vec<f64>, alpha: Vec<f64>) -> Self {
        QaoaParams { beta, gamma, alpha: Some(alpha) }
    }

    pub fn depth(&self) -> usize {
        self.beta.len()
    }

    pub fn is_adaptive(&self) -> bool {
        self.alpha.is_some()
    }

    /// Splits an optimizer vector laid out as `[β_1..β_p, γ_1..γ_p, α_1..α_n]`.
    pub fn from_flat(x: &[f64], p: usize, adaptive: bool) -> Self {
        let beta = x[..p].to_vec();
        let gamma = x[p..2 * p].to_vec();
        let alpha = adaptive.then(|| x[2 * p..].to_vec());
        QaoaParams { beta, gamma, alpha }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut x = self.beta.clone();
        x.extend_from_slice(&self.gamma);
        if let Some(a) = &self.alpha {
            x.extend_from_slice(a);
        }
        x
    }

    fn check_shape(&self, n: usize) -> Result<()> {
        if self.gamma.len() != self.beta.len() {
            return Err(Error::DimensionMismatch { expected: self.beta.len(), got: self.gamma.len() });
        }
        if let Some(a) = &self.alpha {
            if a.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: a.len() });
            }
        }
        if self.to_flat().iter().any(|v| !v.is_finite()) {
            return Err(domain("QAOA parameters must be finite"));
        }
        Ok(())
    }

    /// `β_k ∈ [0, π/2]`, `γ_k ∈ [0, π]`, `α_i ∈ [−½, ½]`.
    pub fn validate(&self, n: usize) -> Result<()> {
        self.check_shape(n)?;
        if let Some(b) = self.beta.iter().find(|b| !(0.0..=BETA_MAX).contains(*b)) {
            return Err(domain(format!("beta {b} outside [0, π/2]")));
        }
        if let Some(g) = self.gamma.iter().find(|g| !(0.0..=GAMMA_MAX).contains(*g)) {
            return Err(domain(format!("gamma {g} outside [0, π]")));
        }
        if let Some(a) = self.alpha.iter().flatten().find(|a| a.abs() > ALPHA_BOUND) {
            return Err(domain(format!("alpha {a} outside [-0.5, 0.5]")));
        }
        Ok(())
    }
}

/// `T_QAOA = Σ_k (β_k + γ_k)`.
pub fn duration(params: &QaoaParams) -> f64 {
    params.beta.iter().sum::<f64>() + params.gamma.iter().sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaResult {
    pub energy: f64,
    pub epsilon: f64,
    pub p_success: f64,
    pub t_total: f64,
    pub n_eval: u64,
    pub params: QaoaParams,
}

/// Evaluator bound to one problem Hamiltonian.
#[derive(Debug, Clone)]
pub struct Qaoa {
    hp: ProblemHamiltonian,
}

impl Qaoa {
    pub fn new(inst: &NppInstance) -> Self {
        Qaoa { hp: build_hp(inst) }
    }

    pub fn from_hp(hp: ProblemHamiltonian) -> Self {
        Qaoa { hp }
    }

    pub fn hp(&self) -> &ProblemHamiltonian {
        &self.hp
    }

    pub fn n(&self) -> usize {
        self.hp.n()
    }

    pub fn state(&self, params: &QaoaParams) -> Result<StateVector> {
        params.validate(self.n())?;
        self.state_unbounded(params)
    }

    /// Same circuit without the parameter box; shape is still checked.
    pub fn state_unbounded(&self, params: &QaoaParams) -> Result<StateVector> {
        let n = self.n();
        params.check_shape(n)?;
        let deformed;
        let phase_op = match &params.alpha {
            None => self.hp.op(),
            Some(alpha) => {
                let mut diag = vec![0.0; 1 << n];
                adaptive_diag_into(alpha, &mut diag);
                deformed = DiagonalOp::new(n, diag)?;
                &deformed
            }
        };
        let mut state = StateVector::plus(n);
        let mut angles = vec![0.0; n];
        for (&beta, &gamma) in params.beta.iter().zip(&params.gamma) {
            apply_diagonal_phase(&mut state, phase_op, gamma)?;
            // e^{−iβ H_D} with H_D = −Σσ^x: rotation angle +β on every qubit.
            angles.iter_mut().for_each(|a| *a = beta);
            apply_x_rotations(&mut state, &angles)?;
        }
        Ok(state)
    }

    /// `E = ⟨ψ|H_P|ψ⟩` in the (bounded) ansatz state.
    pub fn cost(&self, params: &QaoaParams) -> Result<f64> {
        let s = self.state(params)?;
        self.hp.op().expectation(&s)
    }

    pub fn cost_unbounded(&self, params: &QaoaParams) -> Result<f64> {
        let s = self.state_unbounded(params)?;
        self.hp.op().expectation(&s)
    }

    pub fn evaluate(&self, params: &QaoaParams) -> Result<QaoaResult> {
        let s = self.state(params)?;
        let energy = self.hp.op().expectation(&s)?;
        Ok(QaoaResult {
            energy,
            epsilon: approximation_error(energy, self.hp.e_min(), self.hp.e_max()),
            p_success: success_probability(&s, self.hp.ground_indices()),
            t_total: duration(params),
            n_eval: 0,
            params: params.clone(),
        })
    }
}

pub fn ansatz_state(inst: &NppInstance, params: &QaoaParams) -> Result<StateVector> {
    Qaoa::new(inst).state(params)
}

pub fn cost(inst: &NppInstance, params: &QaoaParams) -> Result<f64> {
    Qaoa::new(inst).cost(params)
}

#[cfg(test)]
mod tests {
    use nalgebra::DVector;

    use super::*;
    use crate::hamiltonians::{drive_matrix, DriveSpec};
    use crate::instances::generate_instance;
    use crate::linalg::{fidelity, flip_all, unitary_exp, DenseHermitian, C64};
    use crate::rng::Rng;

    fn random_params(rng: &mut Rng, p: usize, alpha_n: Option<usize>) -> QaoaParams {
        let beta = (0..p).map(|_| rng.uniform_in(0.0, BETA_MAX)).collect();
        let gamma = (0..p).map(|_| rng.uniform_in(0.0, GAMMA_MAX)).collect();
        let alpha = alpha_n.map(|n| (0..n).map(|_| rng.uniform_in(-0.5, 0.5)).collect());
        QaoaParams { beta, gamma, alpha }
    }

    #[test]
    fn empty_circuit_is_uniform() {
        let inst = generate_instance(5, 2).unwrap();
        let q = Qaoa::new(&inst);
        let p0 = QaoaParams::standard(vec![], vec![]);
        let r = q.evaluate(&p0).unwrap();
        let mean = q.hp().diag().iter().sum::<f64>() / 32.0;
        assert!((r.energy - mean).abs() < 1e-12);
        assert!((r.p_success - q.hp().degeneracy() as f64 / 32.0).abs() < 1e-12);
        assert_eq!(r.t_total, 0.0);
    }

    #[test]
    fn durations() {
        let h = FRAC_PI_2;
        assert_eq!(duration(&QaoaParams::standard(vec![h; 3], vec![h; 3])), 3.0 * PI);
        let p = QaoaParams::standard(vec![0.1, 0.2], vec![0.3, 0.4]);
        assert!((duration(&p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_dense_two_qubit_oracle() {
        let inst = NppInstance::new(vec![3, 1], 0).unwrap();
        let q = Qaoa::new(&inst);
        let hd = DenseHermitian::new(drive_matrix(&DriveSpec::uniform(2))).unwrap();
        let hp = q.hp().op().to_dense();
        let mut rng = Rng::new(17);
        for _ in 0..5 {
            let params = random_params(&mut rng, 1, None);
            let ud = unitary_exp(&hd, params.beta[0]).unwrap();
            let up = unitary_exp(&hp, params.gamma[0]).unwrap();
            let psi0 = DVector::from_element(4, C64::new(0.5, 0.0));
            let psi = &ud * (&up * psi0);
            let e = (psi.adjoint() * hp.matrix() * &psi)[(0, 0)].re;
            assert!((q.cost(&params).unwrap() - e).abs() < 1e-12);
        }
    }

    #[test]
    fn bound_violations_are_domain_errors() {
        let inst = generate_instance(3, 1).unwrap();
        let q = Qaoa::new(&inst);
        assert!(q.state(&QaoaParams::standard(vec![2.0], vec![0.1])).is_err());
        assert!(q.state(&QaoaParams::standard(vec![0.1], vec![3.5])).is_err());
        assert!(q.state(&QaoaParams::adaptive(vec![0.1], vec![0.1], vec![0.6, 0.0, 0.0])).is_err());
        assert!(q.state(&QaoaParams::adaptive(vec![0.1], vec![0.1], vec![0.0])).is_err());
        assert!(q.state(&QaoaParams::standard(vec![0.1, 0.2], vec![0.1])).is_err());
        assert!(q.state_unbounded(&QaoaParams::standard(vec![-2.0], vec![-5.0])).is_ok());
    }

    #[test]
    fn adaptive_reduces_to_standard_at_instance_weights() {
        let mut rng = Rng::new(3);
        for seed in 0..10 {
            let inst = generate_instance(4 + seed as usize % 4, seed).unwrap();
            let q = Qaoa::new(&inst);
            let std = random_params(&mut rng, 1 + seed as usize % 3, None);
            let ada = QaoaParams { alpha: Some(inst.weights().to_vec()), ..std.clone() };
            // Weights above 0.5 lie outside the optimizer box, so the
            // reduction is checked without it.
            let f = fidelity(&q.state(&std).unwrap(), &q.state_unbounded(&ada).unwrap()).unwrap();
            assert!(f > 1.0 - 1e-12);
            assert!((q.cost(&std).unwrap() - q.cost_unbounded(&ada).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_weights_rescale_the_phase_angle() {
        // H_NPP(sã) = s² H_P, so (β, γ, sã) matches the standard (β, s²γ).
        let inst = generate_instance(5, 21).unwrap();
        let q = Qaoa::new(&inst);
        let s = 0.5 / inst.weights().iter().copied().fold(0.0, f64::max);
        let alpha: Vec<f64> = inst.weights().iter().map(|w| w * s).collect();
        let ada = QaoaParams::adaptive(vec![0.3, 0.7], vec![0.9, 2.0], alpha);
        let std = QaoaParams::standard(vec![0.3, 0.7], vec![0.9 * s * s, 2.0 * s * s]);
        let f = fidelity(&q.state(&ada).unwrap(), &q.state_unbounded(&std).unwrap()).unwrap();
        assert!(f > 1.0 - 1e-12);
    }

    #[test]
    fn symmetries_of_the_standard_cost() {
        let mut rng = Rng::new(5);
        for seed in 0..10 {
            let inst = generate_instance(3 + seed as usize % 4, 100 + seed).unwrap();
            let q = Qaoa::new(&inst);
            let p = random_params(&mut rng, 1 + seed as usize % 3, None);
            let e = q.cost_unbounded(&p).unwrap();
            let neg = QaoaParams::standard(
                p.beta.iter().map(|b| -b).collect(),
                p.gamma.iter().map(|g| -g).collect(),
            );
            assert!((q.cost_unbounded(&neg).unwrap() - e).abs() < 1e-10);
            for k in 0..p.depth() {
                let mut shifted = p.clone();
                shifted.beta[k] += FRAC_PI_2;
                assert!((q.cost_unbounded(&shifted).unwrap() - e).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn populations_are_flip_symmetric() {
        let mut rng = Rng::new(8);
        let inst = generate_instance(5, 8).unwrap();
        let q = Qaoa::new(&inst);
        for adaptive in [false, true] {
            let p = random_params(&mut rng, 3, adaptive.then_some(5));
            let probs = q.state(&p).unwrap().probabilities();
            for b in 0..32 {
                assert!((probs[b] - probs[flip_all(b, 5)]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn flat_layout_round_trip() {
        let p = QaoaParams::adaptive(vec![0.1, 0.2], vec![0.3, 0.4], vec![0.5, -0.5, 0.0]);
        let x = p.to_flat();
        assert_eq!(x.len(), 7);
        assert_eq!(QaoaParams::from_flat(&x, 2, true), p);
    }
}
