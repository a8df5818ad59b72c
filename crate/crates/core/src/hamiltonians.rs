//! Problem, drive, interpolating and α-deformed Hamiltonians, and the
//! sine-series annealing schedule.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::instances::NppInstance;
use crate::linalg::{DenseHermitian, DiagonalOp, C64};

/// `H_P = (Σ_i ã_i σ^z_i)²`, stored as its diagonal.
///
/// The `i = j` terms are kept, so every level carries the constant offset
/// `Σ ã_i²` relative to the off-diagonal-only form.
#[derive(Debug, Clone)]
pub struct ProblemHamiltonian {
    diag: DiagonalOp,
    e_min: f64,
    e_max: f64,
    ground_indices: Vec<usize>,
}

impl ProblemHamiltonian {
    pub fn n(&self) -> usize {
        self.diag.n()
    }

    pub fn op(&self) -> &DiagonalOp {
        &self.diag
    }

    pub fn diag(&self) -> &[f64] {
        self.diag.diag()
    }

    pub fn e_min(&self) -> f64 {
        self.e_min
    }

    pub fn e_max(&self) -> f64 {
        self.e_max
    }

    /// Basis indices attaining `e_min`, ascending.
    pub fn ground_indices(&self) -> &[usize] {
        &self.ground_indices
    }

    pub fn degeneracy(&self) -> usize {
        self.ground_indices.len()
    }
}

/// Signed sums `Σ_i w_i s_i(b)` for all `b`, one addition per entry.
pub(crate) fn signed_sums(weights: &[f64], out: &mut [f64]) {
    debug_assert_eq!(out.len(), 1 << weights.len());
    out[0] = weights.iter().sum();
    for b in 1..out.len() {
        let low = b.trailing_zeros() as usize;
        out[b] = out[b & (b - 1)] - 2.0 * weights[low];
    }
}

pub fn build_hp(inst: &NppInstance) -> ProblemHamiltonian {
    let n = inst.n();
    let range = inst.range_a() as f64;
    // Integer differences keep every entry exactly (d/A)², the same
    // expression the classical oracle's min_diff produces.
    let diag: Vec<f64> = (0..1usize << n)
        .map(|b| {
            let d = inst.signed_difference(b).unsigned_abs() as f64 / range;
            d * d
        })
        .collect();
    let e_min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let e_max = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ground_indices = (0..diag.len()).filter(|&b| diag[b] == e_min).collect();
    ProblemHamiltonian {
        diag: DiagonalOp::new(n, diag).expect("finite by construction"),
        e_min,
        e_max,
        ground_indices,
    }
}

/// Transverse drive strengths, `H_D = −Σ_i h_i σ^x_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    h: Vec<f64>,
}

impl DriveSpec {
    pub fn uniform(n: usize) -> Self {
        DriveSpec { h: vec![1.0; n] }
    }

    /// Requires `0 < h_i ≤ 1`.
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if let Some(bad) = h.iter().find(|&&x| !(x > 0.0 && x <= 1.0)) {
            return Err(domain(format!("drive strength {bad} outside (0, 1]")));
        }
        Ok(DriveSpec { h })
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn total_strength(&self) -> f64 {
        self.h.iter().sum()
    }
}

/// `λ(t) = t/T + Σ_m b_m sin(mπt/T)`, `m = 1..=C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    total_time: f64,
    b: Vec<f64>,
}

impl ScheduleSpec {
    pub fn linear(total_time: f64) -> Result<Self> {
        Self::new(total_time, vec![])
    }

    pub fn new(total_time: f64, b: Vec<f64>) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(domain(format!("total time {total_time} must be positive")));
        }
        if let Some(bad) = b.iter().find(|x| !(-1.0..=1.0).contains(*x)) {
            return Err(domain(format!("sine coefficient {bad} outside [-1, 1]")));
        }
        Ok(ScheduleSpec { total_time, b })
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.b
    }

    pub fn lambda(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.total_time).contains(&t) {
            return Err(domain(format!("time {t} outside [0, {}]", self.total_time)));
        }
        Ok(self.lambda_at(t))
    }

    /// Unchecked evaluation; may leave `[0, 1]` between the endpoints.
    pub fn lambda_at(&self, t: f64) -> f64 {
        if t == self.total_time {
            return 1.0;
        }
        let x = t / self.total_time;
        x + self
            .b
            .iter()
            .enumerate()
            .map(|(m, bm)| bm * ((m + 1) as f64 * PI * x).sin())
            .sum::<f64>()
    }

    /// `dλ/dt`.
    pub fn lambda_dot(&self, t: f64) -> f64 {
        let x = t / self.total_time;
        (1.0 + self
            .b
            .iter()
            .enumerate()
            .map(|(m, bm)| {
                let w = (m + 1) as f64 * PI;
                bm * w * (w * x).cos()
            })
            .sum::<f64>())
            / self.total_time
    }

    /// Extremes of `λ` over `[0, T]` sampled on `samples + 1` points.
    pub fn lambda_range(&self, samples: usize) -> (f64, f64) {
        let samples = samples.max(1);
        (0..=samples)
            .map(|k| self.lambda_at(self.total_time * k as f64 / samples as f64))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), l| (lo.min(l), hi.max(l)))
    }
}

pub fn schedule_lambda(sched: &ScheduleSpec, t: f64) -> Result<f64> {
    sched.lambda(t)
}

/// Weights of the deformed phase Hamiltonian `H_NPP(α) = (Σ α_i σ^z_i)²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveWeights {
    pub alpha: Vec<f64>,
}

impl AdaptiveWeights {
    pub const BOUND: f64 = 0.5;

    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(domain("adaptive weights must be finite"));
        }
        Ok(AdaptiveWeights { alpha })
    }

    pub fn within_bounds(&self) -> bool {
        self.alpha.iter().all(|a| a.abs() <= Self::BOUND)
    }
}

pub fn build_adaptive_hp(inst: &NppInstance, w: &AdaptiveWeights) -> Result<DiagonalOp> {
    if w.alpha.len() != inst.n() {
        return Err(Error::DimensionMismatch { expected: inst.n(), got: w.alpha.len() });
    }
    let mut diag = vec![0.0; 1 << inst.n()];
    adaptive_diag_into(&w.alpha, &mut diag);
    DiagonalOp::new(inst.n(), diag)
}

/// Fills `out[b] = (Σ_i α_i s_i(b))²`.
pub(crate) fn adaptive_diag_into(alpha: &[f64], out: &mut [f64]) {
    signed_sums(alpha, out);
    out.iter_mut().for_each(|x| *x *= *x);
}

/// Dense `H_D = −Σ h_i σ^x_i`.
pub fn drive_matrix(drive: &DriveSpec) -> DMatrix<C64> {
    let n = drive.n();
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        for (i, &h) in drive.h().iter().enumerate() {
            m[(b ^ (1 << i), b)] -= C64::new(h, 0.0);
        }
    }
    m
}

/// Dense `H(λ) = (1 − λ) H_D + λ H_P`. Only spectra and the counterdiabatic
/// analysis materialize this; time evolution works on the factors.
pub fn build_ht(hp: &ProblemHamiltonian, drive: &DriveSpec, lam: f64) -> Result<DenseHermitian> {
    if !lam.is_finite() {
        return Err(domain("schedule value must be finite"));
    }
    if drive.n() != hp.n() {
        return Err(Error::DimensionMismatch { expected: hp.n(), got: drive.n() });
    }
    let mut m = drive_matrix(drive) * C64::new(1.0 - lam, 0.0);
    for (b, &d) in hp.diag().iter().enumerate() {
        m[(b, b)] += C64::new(lam * d, 0.0);
    }
    DenseHermitian::new(m)
}
