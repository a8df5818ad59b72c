//! Statevectors and the handful of kernels everything else is built on.

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

use crate::error::{domain, Error, Result};

/// Spin value of qubit `i` in basis index `b`: bit 0 → +1, bit 1 → −1.
///
/// This is the only place the convention is spelled out; every Hamiltonian
/// builder and the classical oracle go through it (or the equivalent bit test).
#[inline]
pub fn spin(b: usize, i: usize) -> f64 {
    if b >> i & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Basis index with every spin reversed.
#[inline]
pub fn flip_all(b: usize, n: usize) -> usize {
    !b & ((1usize << n) - 1)
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Complex amplitudes over the `2^n` computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|+⟩^⊗n`, the ground state of any positive transverse drive.
    pub fn plus(n: usize) -> Self {
        let dim = 1usize << n;
        let a = C64::new((dim as f64).sqrt().recip(), 0.0);
        StateVector { n, amps: vec![a; dim] }
    }

    pub fn basis(n: usize, b: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[b] = C64::new(1.0, 0.0);
        StateVector { n, amps }
    }

    pub fn from_amps(n: usize, amps: Vec<C64>) -> Result<Self> {
        check_dim(1 << n, amps.len())?;
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn normalize(&mut self) {
        let s = self.norm_sqr().sqrt().recip();
        self.amps.iter_mut().for_each(|a| *a *= s);
    }

    pub fn is_finite(&self) -> bool {
        self.amps.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Resets to `|+⟩^⊗n` without reallocating.
    pub fn reset_plus(&mut self) {
        let a = C64::new((self.dim() as f64).sqrt().recip(), 0.0);
        self.amps.iter_mut().for_each(|x| *x = a);
    }
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(inner_product(a, b)?.norm_sqr())
}

/// `Σ_b conj(a_b) · b_b`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<C64> {
    check_dim(a.dim(), b.dim())?;
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// An operator diagonal in the computational basis (any σ^z-only Hamiltonian).
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOp {
    n: usize,
    diag: Vec<f64>,
}

impl DiagonalOp {
    pub fn new(n: usize, diag: Vec<f64>) -> Result<Self> {
        check_dim(1 << n, diag.len())?;
        if diag.iter().any(|d| !d.is_finite()) {
            return Err(domain("diagonal operator has non-finite entries"));
        }
        Ok(DiagonalOp { n, diag })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// `⟨ψ|D|ψ⟩`.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        check_dim(self.diag.len(), state.dim())?;
        Ok(self
            .diag
            .iter()
            .zip(state.amps())
            .map(|(d, a)| d * a.norm_sqr())
            .sum())
    }

    pub fn to_dense(&self) -> DenseHermitian {
        let dim = self.diag.len();
        let m = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                C64::new(self.diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        DenseHermitian { m }
    }
}

/// `amps[b] ← amps[b] · exp(−i · angle · diag[b])`.
pub fn apply_diagonal_phase(state: &mut StateVector, op: &DiagonalOp, angle: f64) -> Result<()> {
    check_dim(op.diag.len(), state.dim())?;
    if angle == 0.0 {
        return Ok(());
    }
    for (a, &d) in state.amps.iter_mut().zip(&op.diag) {
        let (s, c) = (angle * d).sin_cos();
        *a *= C64::new(c, -s);
    }
    Ok(())
}

/// Applies `exp(+i θ_i σ^x_i)` to every qubit `i`.
///
/// With `H_D = −Σ h_i σ^x_i`, `exp(−i t H_D)` is this call with `θ_i = t h_i`.
/// Implemented as `n` stride-`2^i` butterfly passes.
pub fn apply_x_rotations(state: &mut StateVector, angles: &[f64]) -> Result<()> {
    check_dim(state.n, angles.len())?;
    for (i, &theta) in angles.iter().enumerate() {
        if theta == 0.0 {
            continue;
        }
        let (s, c) = theta.sin_cos();
        let is = C64::new(0.0, s);
        let stride = 1usize << i;
        for block in state.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let x0 = *a0;
                let x1 = *a1;
                *a0 = x0 * c + is * x1;
                *a1 = is * x0 + x1 * c;
            }
        }
    }
    Ok(())
}

/// Dense Hermitian matrix, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHermitian {
    m: DMatrix<C64>,
}

pub const HERMITIAN_TOL: f64 = 1e-12;

impl DenseHermitian {
    /// Wraps `m` after checking `‖M − M†‖_max < 1e-12` (relative to `max(1, ‖M‖_max)`).
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() {
            return Err(domain(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
        }
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let dev = hermitian_deviation(&m);
        if dev >= HERMITIAN_TOL * scale {
            return Err(domain(format!("matrix is not Hermitian (deviation {dev:e})")));
        }
        Ok(DenseHermitian { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }
}

pub fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    /// `f(M) = V f(Λ) V†` for a scalar function with complex output.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
        let mut scaled = self.vectors.clone();
        for (k, &lam) in self.values.iter().enumerate() {
            let fk = f(lam);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= fk);
        }
        &scaled * self.vectors.adjoint()
    }
}

pub const MAX_EIG_DIM: usize = 4096;

/// Full eigen-decomposition through LAPACK `zheev`.
pub fn eig_hermitian(h: &DenseHermitian) -> Result<HermitianEigen> {
    let n = h.dim();
    if n > MAX_EIG_DIM {
        return Err(domain(format!("dimension {n} exceeds {MAX_EIG_DIM}")));
    }
    if n == 0 {
        return Ok(HermitianEigen { values: vec![], vectors: DMatrix::zeros(0, 0) });
    }
    let mut a: Vec<C64> = h.m.as_slice().to_vec();
    let mut w = vec![0.0; n];
    let mut rwork = vec![0.0; (3 * n).saturating_sub(2).max(1)];
    let mut info = 0;
    let ni = n as i32;

    let mut query = [C64::new(0.0, 0.0)];
    // SAFETY: slices are sized per the LAPACK contract; lwork = -1 is a size query.
    unsafe { lapack::zheev(b'V', b'U', ni, &mut a, ni, &mut w, &mut query, -1, &mut rwork, &mut info) };
    if info != 0 {
        return Err(Error::Lapack { routine: "zheev", info });
    }
    let lwork = (query[0].re as usize).max(2 * n);
    let mut work = vec![C64::new(0.0, 0.0); lwork];
    // SAFETY: as above with a workspace of the queried size.
    unsafe { lapack::zheev(b'V', b'U', ni, &mut a, ni, &mut w, &mut work, lwork as i32, &mut rwork, &mut info) };
    if info != 0 {
        return Err(Error::Lapack { routine: "zheev", info });
    }
    Ok(HermitianEigen {
        values: w,
        vectors: DMatrix::from_vec(n, n, a),
    })
}

/// The `k` smallest eigenvalues of a real symmetric matrix (column-major,
/// upper triangle referenced), ascending, through LAPACK `dsyevr`.
///
/// `a` is overwritten.
pub fn lowest_eigenvalues_symmetric(a: &mut [f64], dim: usize, k: usize) -> Result<Vec<f64>> {
    check_dim(dim * dim, a.len())?;
    let k = k.min(dim);
    if k == 0 {
        return Ok(vec![]);
    }
    let ni = dim as i32;
    let mut m = 0;
    let mut w = vec![0.0; dim];
    let mut z = [0.0];
    let mut isuppz = vec![0i32; 2 * dim];
    let mut info = 0;
    let mut wq = [0.0];
    let mut iwq = [0i32];
    // SAFETY: jobz = 'N' never touches z; lwork = liwork = -1 is a size query.
    unsafe {
        lapack::dsyevr(
            b'N', b'I', b'U', ni, a, ni, 0.0, 0.0, 1, k as i32, 0.0, &mut m, &mut w, &mut z, 1,
            &mut isuppz, &mut wq, -1, &mut iwq, -1, &mut info,
        )
    };
    if info != 0 {
        return Err(Error::Lapack { routine: "dsyevr", info });
    }
    let lwork = (wq[0] as usize).max(26 * dim);
    let liwork = (iwq[0] as usize).max(10 * dim);
    let mut work = vec![0.0; lwork];
    let mut iwork = vec![0i32; liwork];
    // SAFETY: workspaces sized from the query above.
    unsafe {
        lapack::dsyevr(
            b'N', b'I', b'U', ni, a, ni, 0.0, 0.0, 1, k as i32, 0.0, &mut m, &mut w, &mut z, 1,
            &mut isuppz, &mut work, lwork as i32, &mut iwork, liwork as i32, &mut info,
        )
    };
    if info != 0 {
        return Err(Error::Lapack { routine: "dsyevr", info });
    }
    w.truncate(m as usize);
    Ok(w)
}

/// `exp(−i t H)` via eigen-decomposition.
pub fn unitary_exp(h: &DenseHermitian, t: f64) -> Result<DMatrix<C64>> {
    let eig = eig_hermitian(h)?;
    Ok(eig.apply_fn(|lam| C64::new(0.0, -t * lam).exp()))
}

pub fn commutator(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a * b - b * a
}

pub fn apply_matrix(m: &DMatrix<C64>, state: &StateVector) -> Result<StateVector> {
    check_dim(m.ncols(), state.dim())?;
    let v = nalgebra::DVector::from_column_slice(state.amps());
    let out = m * v;
    StateVector::from_amps(state.n, out.as_slice().to_vec())
}
