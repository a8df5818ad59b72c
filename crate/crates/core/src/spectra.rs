//! Low-lying spectrum of `H(λ)`: relevant gap and quasi-optimal counts.
//!
//! `H(λ)` is real symmetric and commutes with the global spin flip, so each
//! λ is solved as two blocks of dimension `2^(n−1)` (flip-even and flip-odd)
//! whose lowest levels are merged. The λ = 1 endpoint is read off the
//! diagonal exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::hamiltonians::{build_hp, DriveSpec, ProblemHamiltonian};
use crate::instances::NppInstance;
use crate::linalg::lowest_eigenvalues_symmetric;

pub const MAX_SPECTRAL_QUBITS: usize = 12;
pub const DEFAULT_GRID_POINTS: usize = 201;
pub const MIN_GRID_POINTS: usize = 11;
pub const DEFAULT_DELTA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub grid_points: usize,
    /// Inclusive λ interval; λ = 1 is always added to the grid.
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub delta: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { grid_points: DEFAULT_GRID_POINTS, lambda_min: 0.0, lambda_max: 1.0, delta: DEFAULT_DELTA }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralScan {
    pub lambda_grid: Vec<f64>,
    /// Lowest `min(D + 2, 2^n)` levels at each grid point, ascending.
    pub levels: Vec<Vec<f64>>,
    /// `min_λ (E_D(λ) − E_0(λ))`; infinite when every state is a ground state.
    pub relevant_gap: f64,
    pub argmin_lambda: f64,
    pub d: usize,
    /// Diagonal gap `E_D − E_0` of the problem Hamiltonian.
    pub problem_gap: f64,
    pub n_quasi: usize,
    pub delta: f64,
}

impl SpectralScan {
    pub fn gap_at(&self, idx: usize) -> f64 {
        self.levels[idx].get(self.d).map_or(f64::INFINITY, |e| e - self.levels[idx][0])
    }
}

/// Relevant gap over `λ ∈ [0, 1]` on a uniform grid.
pub fn scan_gap(inst: &NppInstance, drive: &DriveSpec, grid_points: usize) -> Result<SpectralScan> {
    scan_gap_with(inst, drive, &ScanOptions { grid_points, ..ScanOptions::default() })
}

pub fn scan_gap_with(inst: &NppInstance, drive: &DriveSpec, opts: &ScanOptions) -> Result<SpectralScan> {
    let n = inst.n();
    if n > MAX_SPECTRAL_QUBITS {
        return Err(domain(format!("spectral scans support at most {MAX_SPECTRAL_QUBITS} qubits, got {n}")));
    }
    if drive.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: drive.n() });
    }
    if opts.grid_points < MIN_GRID_POINTS {
        return Err(domain(format!("grid needs at least {MIN_GRID_POINTS} points")));
    }
    if !(opts.lambda_min.is_finite() && opts.lambda_max.is_finite() && opts.lambda_min <= opts.lambda_max) {
        return Err(domain("invalid λ interval"));
    }
    if !(opts.delta > 0.0) {
        return Err(domain("δ must be positive"));
    }

    let hp = build_hp(inst);
    let d = hp.degeneracy();
    let k = (d + 2).min(1 << n);
    let lambda_grid = grid(opts);
    let levels = lambda_grid
        .par_iter()
        .map(|&lam| levels_at(&hp, drive, lam, k))
        .collect::<Result<Vec<_>>>()?;

    let gap = |lv: &Vec<f64>| lv.get(d).map_or(f64::INFINITY, |e| e - lv[0]);
    let (mut relevant_gap, mut argmin_lambda) = (f64::INFINITY, lambda_grid[0]);
    for (lam, lv) in lambda_grid.iter().zip(&levels) {
        let g = gap(lv);
        if g < relevant_gap {
            relevant_gap = g;
            argmin_lambda = *lam;
        }
    }
    let problem_gap = gap(&diagonal_levels(&hp, k));
    Ok(SpectralScan {
        lambda_grid,
        levels,
        relevant_gap: relevant_gap.max(0.0),
        argmin_lambda,
        d,
        problem_gap,
        n_quasi: count_quasi_optimal(inst, opts.delta),
        delta: opts.delta,
    })
}

fn grid(opts: &ScanOptions) -> Vec<f64> {
    let m = opts.grid_points - 1;
    let (lo, hi) = (opts.lambda_min, opts.lambda_max);
    let mut g: Vec<f64> = (0..=m).map(|j| lo + (hi - lo) * j as f64 / m as f64).collect();
    g[m] = hi;
    if lo == hi {
        g.truncate(1);
    }
    if !g.contains(&1.0) {
        let at = g.partition_point(|&x| x < 1.0);
        g.insert(at, 1.0);
    }
    g
}

fn diagonal_levels(hp: &ProblemHamiltonian, k: usize) -> Vec<f64> {
    let mut v = hp.diag().to_vec();
    v.sort_by(f64::total_cmp);
    v.truncate(k);
    v
}

/// Lowest `k` eigenvalues of `H(λ)`.
pub fn levels_at(hp: &ProblemHamiltonian, drive: &DriveSpec, lam: f64, k: usize) -> Result<Vec<f64>> {
    if lam == 1.0 {
        return Ok(diagonal_levels(hp, k));
    }
    let n = hp.n();
    let half = 1usize << (n - 1);
    let mut all = Vec::with_capacity(2 * k);
    for parity in [1.0, -1.0] {
        let mut block = flip_sector(hp, drive, lam, parity);
        all.extend(lowest_eigenvalues_symmetric(&mut block, half, k)?);
    }
    all.sort_by(f64::total_cmp);
    all.truncate(k);
    Ok(all)
}

/// `H(λ)` restricted to the flip sector of the given parity, column-major,
/// in the basis `(|r⟩ ± |r̄⟩)/√2` with the top bit of `r` clear.
fn flip_sector(hp: &ProblemHamiltonian, drive: &DriveSpec, lam: f64, parity: f64) -> Vec<f64> {
    let n = hp.n();
    let half = 1usize << (n - 1);
    let low_mask = half - 1;
    let h = drive.h();
    let mut m = vec![0.0; half * half];
    for r in 0..half {
        m[r * half + r] += lam * hp.diag()[r];
        for (i, &hi) in h[..n - 1].iter().enumerate() {
            m[r * half + (r ^ (1 << i))] -= (1.0 - lam) * hi;
        }
        // Flipping the top spin maps |r⟩ to the partner of r ^ low_mask.
        m[r * half + (r ^ low_mask)] -= parity * (1.0 - lam) * h[n - 1];
    }
    m
}

/// Basis states `b` with `e_min < H_P[b] ≤ e_min + δ`; ground states excluded.
pub fn count_quasi_optimal(inst: &NppInstance, delta: f64) -> usize {
    let hp = build_hp(inst);
    let e0 = hp.e_min();
    hp.diag().iter().filter(|&&e| e > e0 && e <= e0 + delta).count()
}

/// Distinct energy values in `(e_min, e_min + δ]`.
pub fn count_quasi_levels(inst: &NppInstance, delta: f64) -> usize {
    let hp = build_hp(inst);
    let e0 = hp.e_min();
    let mut v: Vec<f64> = hp.diag().iter().copied().filter(|&e| e > e0 && e <= e0 + delta).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}
