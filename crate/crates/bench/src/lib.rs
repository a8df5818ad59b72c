//! Fixtures shared by the kernel benchmarks.

use nppqo::{generate_instance, NppInstance, QaoaParams};

/// Fixed instance per size so runs are comparable across commits.
pub fn instance(n: usize) -> NppInstance {
    generate_instance(n, 0xbe4c_0000 + n as u64).expect("size within range")
}

/// Mid-box standard circuit parameters of depth `p`.
pub fn qaoa_params(p: usize) -> QaoaParams {
    QaoaParams::standard(vec![0.4; p], vec![1.1; p])
}

/// Adaptive parameters with the instance weights rescaled into the α box.
pub fn adaptive_params(inst: &NppInstance, p: usize) -> QaoaParams {
    let top = inst.weights().iter().copied().fold(0.0, f64::max);
    let alpha = inst.weights().iter().map(|w| w * 0.5 / top).collect();
    QaoaParams::adaptive(vec![0.4; p], vec![1.1; p], alpha)
}
