//! Multi-start bounded Nelder–Mead.
//!
//! Every restart runs an independent simplex search inside the parameter
//! box; trial points are projected onto the box. Start points come from a
//! seeded [`Rng`] and are all drawn before any restart runs, so results do
//! not depend on scheduling. Every objective call is counted, including
//! the initial simplex and shrink steps.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::instances::NppInstance;
use crate::rng::{derive_seed, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Standard annealing: linear schedule, uniform drive, nothing to optimize.
    Qa,
    /// Annealing with a sine-series path.
    QaPath,
    /// Annealing with per-qubit drive strengths.
    QaFields,
    Qaoa,
    QaoaAdaptive,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Qa,
        Algorithm::QaPath,
        Algorithm::QaFields,
        Algorithm::Qaoa,
        Algorithm::QaoaAdaptive,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Qa => "qa",
            Algorithm::QaPath => "qa-path",
            Algorithm::QaFields => "qa-fields",
            Algorithm::Qaoa => "qaoa",
            Algorithm::QaoaAdaptive => "qaoa-adaptive",
        }
    }

    pub fn is_qaoa(self) -> bool {
        matches!(self, Algorithm::Qaoa | Algorithm::QaoaAdaptive)
    }

    pub fn default_restarts(self) -> usize {
        match self {
            Algorithm::Qa => 0,
            Algorithm::QaPath | Algorithm::QaFields => 50,
            Algorithm::Qaoa | Algorithm::QaoaAdaptive => 200,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| domain(format!("unknown algorithm `{s}`")))
    }
}

/// Sine cutoff of the variational annealing path.
pub const DEFAULT_CUTOFF: usize = 6;
/// Realization of the open bound `h_i > 0`.
pub const FIELD_FLOOR: f64 = 1e-6;
pub const DEFAULT_MAX_EVAL: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptProblem {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub restarts: usize,
    pub max_eval_per_start: usize,
    pub seed: u64,
    /// Stop when every vertex is within this distance (max-norm) of the best.
    pub x_tol: f64,
    /// Stop when the simplex values spread less than this.
    pub f_tol: f64,
    /// Initial simplex edge as a fraction of each box width.
    pub initial_step: f64,
    /// Fixed coordinates for the first start; `None` entries stay random.
    pub first_start_hint: Option<Vec<Option<f64>>>,
}

impl OptProblem {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, restarts: usize, seed: u64) -> Result<Self> {
        let p = OptProblem {
            lower,
            upper,
            restarts,
            max_eval_per_start: DEFAULT_MAX_EVAL,
            seed,
            x_tol: 1e-6,
            f_tol: 1e-9,
            initial_step: 0.1,
            first_start_hint: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.len() != self.upper.len() {
            return Err(domain("bound vectors differ in length"));
        }
        if self.lower.is_empty() {
            return Err(domain("problem has no parameters"));
        }
        for (l, u) in self.lower.iter().zip(&self.upper) {
            if !(l.is_finite() && u.is_finite() && l <= u) {
                return Err(domain(format!("invalid bound pair [{l}, {u}]")));
            }
        }
        if self.restarts == 0 {
            return Err(domain("at least one restart is required"));
        }
        if self.max_eval_per_start <= self.dim() {
            return Err(domain("evaluation budget cannot cover the initial simplex"));
        }
        if let Some(h) = &self.first_start_hint {
            if h.len() != self.dim() {
                return Err(domain("start hint has the wrong length"));
            }
        }
        Ok(())
    }

    /// Scales the restart count by `budget` (at least one restart remains).
    pub fn scaled(mut self, budget: f64) -> Self {
        self.restarts = ((self.restarts as f64 * budget).round() as usize).max(1);
        self
    }

    fn project(&self, x: &mut [f64]) {
        for ((v, l), u) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(*l, *u);
        }
    }

    /// Start points in restart order.
    pub fn start_points(&self) -> Vec<Vec<f64>> {
        let mut rng = Rng::new(self.seed);
        (0..self.restarts)
            .map(|r| {
                let mut x: Vec<f64> = self
                    .lower
                    .iter()
                    .zip(&self.upper)
                    .map(|(&l, &u)| rng.uniform_in(l, u))
                    .collect();
                if r == 0 {
                    if let Some(hint) = &self.first_start_hint {
                        for (v, h) in x.iter_mut().zip(hint) {
                            if let Some(h) = h {
                                *v = *h;
                            }
                        }
                        self.project(&mut x);
                    }
                }
                x
            })
            .collect()
    }
}

/// Bounds, budgets and seeding for one algorithm on one instance.
///
/// `depth` is the sine cutoff `C` for [`Algorithm::QaPath`], the layer count
/// `p` for the QAOA variants, and ignored for [`Algorithm::QaFields`].
pub fn default_problem_for(algo: Algorithm, inst: &NppInstance, depth: usize) -> Result<OptProblem> {
    let n = inst.n();
    let seed = derive_seed(inst.seed(), &[algo as u64, depth as u64]);
    let restarts = algo.default_restarts();
    match algo {
        Algorithm::Qa => Err(domain("standard annealing has no variational parameters")),
        // The first restart starts from the standard protocol (linear path,
        // uniform unit fields), which both families contain.
        Algorithm::QaPath => {
            let mut prob = OptProblem::new(vec![-1.0; depth], vec![1.0; depth], restarts, seed)?;
            prob.first_start_hint = Some(vec![Some(0.0); depth]);
            Ok(prob)
        }
        Algorithm::QaFields => {
            let mut prob = OptProblem::new(vec![FIELD_FLOOR; n], vec![1.0; n], restarts, seed)?;
            prob.first_start_hint = Some(vec![Some(1.0); n]);
            Ok(prob)
        }
        Algorithm::Qaoa | Algorithm::QaoaAdaptive => {
            let mut lower = vec![0.0; 2 * depth];
            let mut upper: Vec<f64> = vec![FRAC_PI_2; depth];
            upper.extend(vec![PI; depth]);
            if algo == Algorithm::Qaoa {
                return OptProblem::new(lower, upper, restarts, seed);
            }
            lower.extend(vec![-0.5; n]);
            upper.extend(vec![0.5; n]);
            let mut prob = OptProblem::new(lower, upper, restarts, seed)?;
            // The instance weights rescaled onto the box edge: the deformed
            // phase is then s²·H_P, the standard landscape with γ stretched.
            let w = inst.weights();
            let s = 0.5 / w.iter().copied().fold(0.0, f64::max);
            let mut hint = vec![None; 2 * depth];
            hint.extend(w.iter().map(|&w| Some(w * s)));
            prob.first_start_hint = Some(hint);
            Ok(prob)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartTrace {
    pub start: Vec<f64>,
    pub best_params: Vec<f64>,
    /// `+∞` when the restart was aborted.
    pub final_value: f64,
    pub evals: u64,
    pub aborted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptOutcome {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub n_eval_total: u64,
    pub restarts: Vec<RestartTrace>,
}

impl OptOutcome {
    /// Best value over the first `k` restarts.
    pub fn best_after(&self, k: usize) -> f64 {
        self.restarts[..k.min(self.restarts.len())]
            .iter()
            .map(|r| r.final_value)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn multistart_minimize<F>(prob: &OptProblem, objective: F) -> Result<OptOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    prob.validate()?;
    let starts = prob.start_points();
    let restarts: Vec<RestartTrace> = starts
        .into_par_iter()
        .map(|x0| nelder_mead(prob, &objective, x0))
        .collect();

    let n_eval_total = restarts.iter().map(|r| r.evals).sum();
    let best = restarts
        .iter()
        .filter(|r| !r.aborted)
        .min_by(|a, b| a.final_value.total_cmp(&b.final_value))
        .ok_or_else(|| domain("every restart hit a non-finite objective value"))?;
    Ok(OptOutcome {
        best_params: best.best_params.clone(),
        best_value: best.final_value,
        n_eval_total,
        restarts,
    })
}

struct Counted<'a, F> {
    f: &'a F,
    evals: u64,
    budget: u64,
}

impl<F: Fn(&[f64]) -> f64> Counted<'_, F> {
    fn exhausted(&self) -> bool {
        self.evals >= self.budget
    }

    fn call(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        (self.f)(x)
    }
}

/// Reflection, expansion, contraction and shrink coefficients. Dimension
/// dependent above two parameters (Gao & Han), classic values otherwise.
fn coefficients(dim: usize) -> (f64, f64, f64, f64) {
    if dim <= 2 {
        (1.0, 2.0, 0.5, 0.5)
    } else {
        let d = dim as f64;
        (1.0, 1.0 + 2.0 / d, 0.75 - 0.5 / d, 1.0 - 1.0 / d)
    }
}

fn nelder_mead<F: Fn(&[f64]) -> f64>(prob: &OptProblem, f: &F, x0: Vec<f64>) -> RestartTrace {
    let dim = prob.dim();
    let (alpha, gamma, rho, sigma) = coefficients(dim);
    let mut fun = Counted { f, evals: 0, budget: prob.max_eval_per_start as u64 };
    let aborted = |start: Vec<f64>, evals| RestartTrace {
        best_params: start.clone(),
        start,
        final_value: f64::INFINITY,
        evals,
        aborted: true,
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = fun.call(&x0);
    if !v0.is_finite() {
        return aborted(x0, fun.evals);
    }
    simplex.push((x0.clone(), v0));
    for j in 0..dim {
        let mut x = x0.clone();
        let step = prob.initial_step * (prob.upper[j] - prob.lower[j]);
        x[j] = if x[j] + step <= prob.upper[j] { x[j] + step } else { x[j] - step };
        prob.project(&mut x);
        let v = fun.call(&x);
        if !v.is_finite() {
            return aborted(x0, fun.evals);
        }
        simplex.push((x, v));
    }

    let try_point = |fun: &mut Counted<'_, F>, x: Vec<f64>| -> Option<(Vec<f64>, f64)> {
        let v = fun.call(&x);
        v.is_finite().then_some((x, v))
    };

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0];
        let spread = simplex[dim].1 - best.1;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread < prob.f_tol || diameter < prob.x_tol || fun.exhausted() {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            centroid.iter_mut().zip(x).for_each(|(c, v)| *c += v / dim as f64);
        }
        let worst = simplex[dim].clone();
        let along = |t: f64| -> Vec<f64> {
            let mut x: Vec<f64> = centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect();
            prob.project(&mut x);
            x
        };

        let Some(reflected) = try_point(&mut fun, along(alpha)) else {
            return aborted(x0, fun.evals);
        };
        if reflected.1 < simplex[0].1 {
            if fun.exhausted() {
                simplex[dim] = reflected;
                continue;
            }
            let Some(expanded) = try_point(&mut fun, along(alpha * gamma)) else {
                return aborted(x0, fun.evals);
            };
            simplex[dim] = if expanded.1 < reflected.1 { expanded } else { reflected };
            continue;
        }
        if reflected.1 < simplex[dim - 1].1 {
            simplex[dim] = reflected;
            continue;
        }
        if fun.exhausted() {
            if reflected.1 < worst.1 {
                simplex[dim] = reflected;
            }
            continue;
        }
        let outside = reflected.1 < worst.1;
        let t = if outside { alpha * rho } else { -rho };
        let Some(contracted) = try_point(&mut fun, along(t)) else {
            return aborted(x0, fun.evals);
        };
        let accept = if outside { contracted.1 <= reflected.1 } else { contracted.1 < worst.1 };
        if accept {
            simplex[dim] = contracted;
            continue;
        }
        // Shrink toward the best vertex.
        let anchor = simplex[0].0.clone();
        for k in 1..=dim {
            if fun.exhausted() {
                break;
            }
            let mut x: Vec<f64> = anchor
                .iter()
                .zip(&simplex[k].0)
                .map(|(a, v)| a + sigma * (v - a))
                .collect();
            prob.project(&mut x);
            let Some(point) = try_point(&mut fun, x) else {
                return aborted(x0, fun.evals);
            };
            simplex[k] = point;
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (best_params, final_value) = simplex.swap_remove(0);
    RestartTrace { start: x0, best_params, final_value, evals: fun.evals, aborted: false }
}
