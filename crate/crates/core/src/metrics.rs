//! Figures of merit shared by the annealing and QAOA engines.

use crate::linalg::StateVector;

/// `ε = 1 − (E_max − E)/(E_max − E_min)`, clamped to `[0, 1]`.
///
/// A flat spectrum (`E_max == E_min`) has nothing to approximate and
/// reports 0.
pub fn approximation_error(energy: f64, e_min: f64, e_max: f64) -> f64 {
    let width = e_max - e_min;
    if width <= 0.0 {
        return 0.0;
    }
    (1.0 - (e_max - energy) / width).clamp(0.0, 1.0)
}

/// Total probability on the degenerate ground manifold.
pub fn success_probability(state: &StateVector, ground_indices: &[usize]) -> f64 {
    ground_indices
        .iter()
        .map(|&b| state.amps()[b].norm_sqr())
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Success probability per objective evaluation, `I_eff = P_S / N_eval`.
pub fn optimization_efficiency(p_success: f64, n_eval: u64) -> f64 {
    if n_eval == 0 {
        return f64::NAN;
    }
    p_success / n_eval as f64
}

/// `R_eff = I'_eff / I_eff` (adaptive over standard).
pub fn efficiency_ratio(adaptive: f64, standard: f64) -> f64 {
    adaptive / standard
}
