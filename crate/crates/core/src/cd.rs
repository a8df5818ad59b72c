//! Counterdiabatic analysis: nested-commutator gauge potentials, the
//! variational action and the second-order BCH reading of one QAOA layer.
//!
//! This is verification tooling for small systems. Operators are built in
//! a flip-mask representation that is exact and cheap for the Hamiltonians
//! involved (a diagonal plus single-spin flips), and converted to dense
//! matrices only for output.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, Error, Result};
use crate::hamiltonians::{build_hp, drive_matrix, DriveSpec};
use crate::instances::NppInstance;
use crate::linalg::{unitary_exp, DenseHermitian, C64};

pub const MAX_AGP_QUBITS: usize = 6;
pub const MAX_AGP_ORDER: usize = 3;
/// Size limit for [`first_order_coefficient`], which never forms dense matrices.
pub const MAX_FIRST_ORDER_QUBITS: usize = 12;
pub const MAX_PAULI_QUBITS: usize = 4;

/// Operator `X` stored as `X|a⟩ = Σ_m c_m(a) |a ⊕ m⟩` over flip masks `m`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct FlipOp {
    n: usize,
    terms: BTreeMap<usize, Vec<C64>>,
}

impl FlipOp {
    fn zero(n: usize) -> Self {
        FlipOp { n, terms: BTreeMap::new() }
    }

    fn diagonal(n: usize, d: &[f64]) -> Self {
        let mut op = FlipOp::zero(n);
        op.terms.insert(0, d.iter().map(|&x| C64::new(x, 0.0)).collect());
        op.prune();
        op
    }

    /// `−Σ_i h_i σ^x_i`.
    fn drive(h: &[f64]) -> Self {
        let n = h.len();
        let mut op = FlipOp::zero(n);
        for (i, &hi) in h.iter().enumerate() {
            op.terms.insert(1 << i, vec![C64::new(-hi, 0.0); 1 << n]);
        }
        op.prune();
        op
    }

    fn dim(&self) -> usize {
        1 << self.n
    }

    fn prune(&mut self) {
        self.terms.retain(|_, v| v.iter().any(|c| *c != C64::new(0.0, 0.0)));
    }

    fn scaled_sum(&self, s: f64, other: &FlipOp, t: f64) -> FlipOp {
        let mut out = FlipOp::zero(self.n);
        for (src, k) in [(self, s), (other, t)] {
            for (&m, col) in &src.terms {
                let dst = out.terms.entry(m).or_insert_with(|| vec![C64::new(0.0, 0.0); col.len()]);
                dst.iter_mut().zip(col).for_each(|(d, c)| *d += c * k);
            }
        }
        out.prune();
        out
    }

    fn mul(&self, rhs: &FlipOp) -> FlipOp {
        let dim = self.dim();
        let mut out = FlipOp::zero(self.n);
        for (&m2, ycol) in &rhs.terms {
            for (&m1, xcol) in &self.terms {
                let dst = out.terms.entry(m1 ^ m2).or_insert_with(|| vec![C64::new(0.0, 0.0); dim]);
                for a in 0..dim {
                    dst[a] += xcol[a ^ m2] * ycol[a];
                }
            }
        }
        out.prune();
        out
    }

    fn commutator(&self, rhs: &FlipOp) -> FlipOp {
        self.mul(rhs).scaled_sum(1.0, &rhs.mul(self), -1.0)
    }

    /// `Tr(self · rhs)` without forming the product.
    fn trace_product(&self, rhs: &FlipOp) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (m, ycol) in &rhs.terms {
            if let Some(xcol) = self.terms.get(m) {
                acc += ycol.iter().enumerate().map(|(a, y)| y * xcol[a ^ m]).sum::<C64>();
            }
        }
        acc
    }

    fn frobenius_sqr(&self) -> f64 {
        self.terms.values().flatten().map(|c| c.norm_sqr()).sum()
    }

    fn to_dense(&self) -> DMatrix<C64> {
        let dim = self.dim();
        let mut out = DMatrix::zeros(dim, dim);
        for (&m, col) in &self.terms {
            for (a, c) in col.iter().enumerate() {
                out[(a ^ m, a)] += c;
            }
        }
        out
    }
}

/// First-order-and-up nested-commutator gauge potential at one λ,
/// `A = i Σ_k α_k O_{2k−1}` with `O_1 = [H, ∂_λH]`, `O_{2k+1} = [H, [H, O_{2k−1}]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgpAnsatz {
    pub order: usize,
    pub lambda: f64,
    pub coefficients: Vec<f64>,
    /// Anti-Hermitian `O_1, O_3, …`.
    pub operators: Vec<DMatrix<C64>>,
    /// Raised when the normal equations were rank deficient and the
    /// minimal-norm solution was returned.
    pub singular: bool,
    /// `S = Tr G²` at the returned coefficients.
    pub action: f64,
}

struct Parts {
    h: FlipOp,
    dh: FlipOp,
    ops: Vec<FlipOp>,
}

fn parts(hp_diag: &[f64], drive: &[f64], lam: f64, order: usize) -> Parts {
    let n = drive.len();
    let hp = FlipOp::diagonal(n, hp_diag);
    let hd = FlipOp::drive(drive);
    let h = hd.scaled_sum(1.0 - lam, &hp, lam);
    let dh = hp.scaled_sum(1.0, &hd, -1.0);
    let mut ops = vec![h.commutator(&dh)];
    for k in 1..order {
        let next = h.commutator(&h.commutator(&ops[k - 1]));
        ops.push(next);
    }
    Parts { h, dh, ops }
}

/// `S(α) = Tr G²` with `G = ∂_λH − Σ_k α_k [O_{2k−1}, H]`.
fn action(p: &Parts, alpha: &[f64]) -> f64 {
    let mut g = p.dh.clone();
    for (o, &a) in p.ops.iter().zip(alpha) {
        g = g.scaled_sum(1.0, &o.commutator(&p.h), -a);
    }
    g.trace_product(&g).re
}

/// Stationary point of the quadratic action: `Σ_k Tr(M_j M_k) α_k = Tr(∂_λH M_j)`.
fn solve_action(p: &Parts) -> (Vec<f64>, bool) {
    let ms: Vec<FlipOp> = p.ops.iter().map(|o| o.commutator(&p.h)).collect();
    let l = ms.len();
    let gram = DMatrix::from_fn(l, l, |j, k| ms[j].trace_product(&ms[k]).re);
    let rhs = DVector::from_fn(l, |j, _| p.dh.trace_product(&ms[j]).re);
    let svd = gram.svd(true, true);
    let top = svd.singular_values.max();
    let eps = 1e-12 * top;
    let rank = svd.singular_values.iter().filter(|&&s| s > eps && s > 0.0).count();
    if rank == 0 {
        return (vec![0.0; l], true);
    }
    let alpha = svd.solve(&rhs, eps.max(f64::MIN_POSITIVE)).expect("U and V were computed");
    (alpha.iter().copied().collect(), rank < l)
}

fn check_agp_request(n: usize, drive: &[f64], lam: f64, order: usize) -> Result<()> {
    if n > MAX_AGP_QUBITS {
        return Err(domain(format!("gauge potentials are built densely for at most {MAX_AGP_QUBITS} qubits")));
    }
    if drive.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: drive.len() });
    }
    if !(1..=MAX_AGP_ORDER).contains(&order) {
        return Err(domain(format!("order must be in 1..={MAX_AGP_ORDER}")));
    }
    if !lam.is_finite() {
        return Err(domain("λ must be finite"));
    }
    Ok(())
}

pub fn build_agp(inst: &NppInstance, drive: &DriveSpec, lam: f64, order: usize) -> Result<AgpAnsatz> {
    let hp = build_hp(inst);
    build_agp_from_parts(hp.diag(), drive.h(), lam, order)
}

/// As [`build_agp`] for an arbitrary diagonal problem term and drive
/// strengths (zero strengths allowed).
pub fn build_agp_from_parts(hp_diag: &[f64], drive: &[f64], lam: f64, order: usize) -> Result<AgpAnsatz> {
    let n = drive.len();
    check_agp_request(n, drive, lam, order)?;
    if hp_diag.len() != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, got: hp_diag.len() });
    }
    let p = parts(hp_diag, drive, lam, order);
    let (coefficients, singular) = solve_action(&p);
    Ok(AgpAnsatz {
        order,
        lambda: lam,
        action: action(&p, &coefficients),
        operators: p.ops.iter().map(FlipOp::to_dense).collect(),
        coefficients,
        singular,
    })
}

pub fn minimize_action(inst: &NppInstance, drive: &DriveSpec, lam: f64, order: usize) -> Result<Vec<f64>> {
    Ok(build_agp(inst, drive, lam, order)?.coefficients)
}

/// `S(α)` for given coefficients, exposed so callers can probe the quadratic.
pub fn action_at(inst: &NppInstance, drive: &DriveSpec, lam: f64, alpha: &[f64]) -> Result<f64> {
    check_agp_request(inst.n(), drive.h(), lam, alpha.len())?;
    let p = parts(build_hp(inst).diag(), drive.h(), lam, alpha.len());
    Ok(action(&p, alpha))
}

/// First-order coefficient `α_1 = Tr(O_1²) / Tr(M_1²)` for larger systems.
///
/// `O_1 = [H_D, H_P]` does not depend on λ, and
/// `Tr(∂_λH [O_1, H]) = Tr(O_1²) ≤ 0`, so `α_1 ≤ 0` whenever it is defined.
pub fn first_order_coefficient(inst: &NppInstance, drive: &DriveSpec, lam: f64) -> Result<f64> {
    let n = inst.n();
    if n > MAX_FIRST_ORDER_QUBITS {
        return Err(domain(format!("first-order coefficient supports at most {MAX_FIRST_ORDER_QUBITS} qubits")));
    }
    if drive.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: drive.n() });
    }
    let p = parts(build_hp(inst).diag(), drive.h(), lam, 1);
    let m = p.ops[0].commutator(&p.h);
    let denom = m.frobenius_sqr();
    if denom == 0.0 {
        return Err(domain("first-order action is flat in α"));
    }
    Ok(-p.ops[0].frobenius_sqr() / denom)
}

/// Pauli expansion `O = Σ_P c_P P` with `c_P = Tr(P O) / 2^n`; entries with
/// `|c_P| ≤ tol` are dropped. Labels list qubit 0 first.
pub fn pauli_decomposition(op: &DMatrix<C64>, n: usize, tol: f64) -> Result<Vec<(String, C64)>> {
    if n > MAX_PAULI_QUBITS {
        return Err(domain(format!("Pauli decomposition supports at most {MAX_PAULI_QUBITS} qubits")));
    }
    let dim = 1usize << n;
    if op.nrows() != dim || op.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: op.nrows() });
    }
    let mut out = Vec::new();
    for code in 0..(1usize << (2 * n)) {
        let paulis: Vec<u8> = (0..n).map(|q| (code >> (2 * q) & 3) as u8).collect();
        // Tr(P O) = Σ_{a,b} P[b, a] O[a, b]
        let mut tr = C64::new(0.0, 0.0);
        for a in 0..dim {
            for b in 0..dim {
                let pe = pauli_element(&paulis, b, a);
                if pe != C64::new(0.0, 0.0) {
                    tr += pe * op[(a, b)];
                }
            }
        }
        let c = tr / dim as f64;
        if c.norm() > tol {
            let label = paulis.iter().map(|&p| ['I', 'X', 'Y', 'Z'][p as usize]).collect();
            out.push((label, c));
        }
    }
    Ok(out)
}

/// `⟨row|P|col⟩` for a Pauli string; basis bit 0 is the `σ^z = +1` state.
fn pauli_element(paulis: &[u8], row: usize, col: usize) -> C64 {
    let mut v = C64::new(1.0, 0.0);
    for (q, &p) in paulis.iter().enumerate() {
        let (r, c) = ((row >> q) & 1, (col >> q) & 1);
        let e = match (p, r, c) {
            (0, r, c) if r == c => C64::new(1.0, 0.0),
            (1, r, c) if r != c => C64::new(1.0, 0.0),
            (2, 0, 1) => C64::new(0.0, -1.0),
            (2, 1, 0) => C64::new(0.0, 1.0),
            (3, 0, 0) => C64::new(1.0, 0.0),
            (3, 1, 1) => C64::new(-1.0, 0.0),
            _ => return C64::new(0.0, 0.0),
        };
        v *= e;
    }
    v
}

/// True when every string has exactly one `Y` and one `Z` and nothing else.
pub fn is_yz_two_body(terms: &[(String, C64)]) -> bool {
    terms.iter().all(|(label, _)| {
        let y = label.matches('Y').count();
        let z = label.matches('Z').count();
        y == 1 && z == 1 && label.chars().filter(|&c| c != 'I').count() == 2
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BchReport {
    pub beta: f64,
    pub gamma: f64,
    /// `e^{−iβH_D} e^{−iγH_P}`.
    pub exact_product: DMatrix<C64>,
    /// `e^{−iH_eff}`, `H_eff = βH_D + γH_P − (iβγ/2)[H_D, H_P]`.
    pub effective: DMatrix<C64>,
    pub frobenius_error: f64,
}

/// One uniform-drive QAOA layer against its second-order BCH exponent.
pub fn bch_check(inst: &NppInstance, beta: f64, gamma: f64) -> Result<BchReport> {
    let n = inst.n();
    if n > MAX_AGP_QUBITS {
        return Err(domain(format!("BCH check is dense and limited to {MAX_AGP_QUBITS} qubits")));
    }
    if !(beta.is_finite() && gamma.is_finite()) {
        return Err(domain("angles must be finite"));
    }
    let hp = build_hp(inst);
    let hd = drive_matrix(&DriveSpec::uniform(n));
    let hp_m = DMatrix::from_diagonal(&DVector::from_iterator(
        1 << n,
        hp.diag().iter().map(|&d| C64::new(d, 0.0)),
    ));
    let phase = DMatrix::from_diagonal(&DVector::from_iterator(
        1 << n,
        hp.diag().iter().map(|&d| C64::new(0.0, -gamma * d).exp()),
    ));
    let exact_product = unitary_exp(&DenseHermitian::new(hd.clone())?, beta)? * phase;

    let c = &hd * &hp_m - &hp_m * &hd;
    let heff = hd * C64::new(beta, 0.0) + hp_m * C64::new(gamma, 0.0) - c * C64::new(0.0, beta * gamma / 2.0);
    let effective = unitary_exp(&DenseHermitian::new(heff)?, 1.0)?;
    let frobenius_error = (&exact_product - &effective).norm();
    Ok(BchReport { beta, gamma, exact_product, effective, frobenius_error })
}

/// The `[H_D, H_P]` coefficient of `H_eff` is `−iβγ/2`; the counterdiabatic
/// term contributes `i λ̇ α_1 [H_D, H_P]`. True when the real prefactors agree in sign.
pub fn sign_correspondence(alpha1: f64, lambda_dot: f64, beta: f64, gamma: f64) -> bool {
    let bch = -beta * gamma / 2.0;
    let cd = alpha1 * lambda_dot;
    bch != 0.0 && cd != 0.0 && bch.signum() == cd.signum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::build_ht;
    use crate::instances::generate_instance;
    use crate::linalg::{commutator, hermitian_deviation};

    fn inst(numbers: &[u64]) -> NppInstance {
        NppInstance::new(numbers.to_vec(), 0).unwrap()
    }

    fn dense_hp(i: &NppInstance) -> DMatrix<C64> {
        build_hp(i).op().to_dense().into_matrix()
    }

    #[test]
    fn first_operator_matches_dense_commutator() {
        let i = inst(&[3, 1]);
        let drive = DriveSpec::uniform(2);
        let agp = build_agp(&i, &drive, 0.5, 1).unwrap();
        let h = build_ht(&build_hp(&i), &drive, 0.5).unwrap().into_matrix();
        let dh = dense_hp(&i) - drive_matrix(&drive);
        let oracle = commutator(&h, &dh);
        assert!((&agp.operators[0] - oracle).norm() < 1e-14);
    }

    #[test]
    fn flip_ops_agree_with_dense_algebra() {
        let i = generate_instance(4, 11).unwrap();
        let drive = DriveSpec::new(vec![0.2, 0.9, 0.5, 1.0]).unwrap();
        let agp = build_agp(&i, &drive, 0.3, 3).unwrap();
        let h = build_ht(&build_hp(&i), &drive, 0.3).unwrap().into_matrix();
        let dh = dense_hp(&i) - drive_matrix(&drive);
        let o1 = commutator(&h, &dh);
        let o3 = commutator(&h, &commutator(&h, &o1));
        let o5 = commutator(&h, &commutator(&h, &o3));
        for (got, want) in agp.operators.iter().zip([o1, o3, o5]) {
            assert!((got - &want).norm() <= 1e-12 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn endpoint_identity() {
        let i = generate_instance(3, 2).unwrap();
        let drive = DriveSpec::uniform(3);
        let o1 = &build_agp(&i, &drive, 1.0, 1).unwrap().operators[0];
        let hp = dense_hp(&i);
        let want = -commutator(&hp, &drive_matrix(&drive));
        assert!((o1 - want).norm() < 1e-14);
    }

    #[test]
    fn vanishing_problem_term_gives_zero_operator() {
        let agp = build_agp_from_parts(&[0.0; 8], &[1.0; 3], 0.4, 1).unwrap();
        assert_eq!(agp.operators[0].norm(), 0.0);
        assert!(agp.singular);
    }

    #[test]
    fn vanishing_drive_flags_flat_action() {
        let i = inst(&[3, 1]);
        let hp = build_hp(&i);
        let agp = build_agp_from_parts(hp.diag(), &[0.0, 0.0], 0.5, 1).unwrap();
        assert!(agp.singular);
        assert_eq!(agp.coefficients, vec![0.0]);
        // S = Tr(H_P²) regardless of α.
        let s0: f64 = hp.diag().iter().map(|d| d * d).sum();
        assert!((agp.action - s0).abs() < 1e-14);
    }

    #[test]
    fn first_coefficient_is_negative_on_small_example() {
        let a = minimize_action(&inst(&[3, 1]), &DriveSpec::uniform(2), 0.5, 1).unwrap();
        assert!(a[0] < 0.0);
    }

    #[test]
    fn first_coefficient_is_the_grid_minimum() {
        let i = generate_instance(4, 5).unwrap();
        let drive = DriveSpec::uniform(4);
        let a1 = minimize_action(&i, &drive, 0.6, 1).unwrap()[0];
        let (mut best, mut arg) = (f64::INFINITY, 0.0);
        let (lo, hi, steps) = (-4.0 * a1.abs() - 1.0, 4.0 * a1.abs() + 1.0, 4000);
        for j in 0..=steps {
            let a = lo + (hi - lo) * j as f64 / steps as f64;
            let s = action_at(&i, &drive, 0.6, &[a]).unwrap();
            if s < best {
                best = s;
                arg = a;
            }
        }
        assert!((arg - a1).abs() <= (hi - lo) / steps as f64);
        assert!(action_at(&i, &drive, 0.6, &[a1]).unwrap() <= best + 1e-12);
    }

    #[test]
    fn higher_orders_never_increase_the_action() {
        let i = generate_instance(4, 8).unwrap();
        let drive = DriveSpec::uniform(4);
        let s: Vec<f64> = (1..=3).map(|l| build_agp(&i, &drive, 0.5, l).unwrap().action).collect();
        let s0 = action_at(&i, &drive, 0.5, &[0.0]).unwrap();
        assert!(s[0] <= s0 && s[1] <= s[0] * (1.0 + 1e-9) && s[2] <= s[1] * (1.0 + 1e-9), "{s0} {s:?}");
    }

    #[test]
    fn scalable_coefficient_matches_dense_path() {
        for seed in 0..4 {
            let i = generate_instance(5, seed).unwrap();
            let drive = DriveSpec::uniform(5);
            for lam in [0.25, 0.5, 0.75] {
                let a = minimize_action(&i, &drive, lam, 1).unwrap()[0];
                let b = first_order_coefficient(&i, &drive, lam).unwrap();
                assert!((a - b).abs() <= 1e-12 * a.abs(), "{a} vs {b}");
                assert!(b < 0.0);
            }
        }
    }

    #[test]
    fn i_times_operators_are_hermitian() {
        let i = generate_instance(5, 3).unwrap();
        let agp = build_agp(&i, &DriveSpec::uniform(5), 0.4, 2).unwrap();
        for o in &agp.operators {
            let io = o * C64::new(0.0, 1.0);
            assert!(hermitian_deviation(&io) <= 1e-12 * (1.0 + o.norm()));
        }
    }

    #[test]
    fn first_operator_is_yz_two_body() {
        for n in 2..=4 {
            let i = generate_instance(n, 17).unwrap();
            let agp = build_agp(&i, &DriveSpec::uniform(n), 0.5, 1).unwrap();
            let terms = pauli_decomposition(&agp.operators[0], n, 1e-12).unwrap();
            assert!(!terms.is_empty());
            assert!(is_yz_two_body(&terms), "{terms:?}");
            assert!(terms.iter().all(|(_, c)| c.re.abs() < 1e-12));
        }
    }

    #[test]
    fn pauli_decomposition_reconstructs_z() {
        // σ^z on qubit 1 of two qubits: diag(1, 1, −1, −1).
        let m = DMatrix::from_diagonal(&DVector::from_vec(
            [1.0, 1.0, -1.0, -1.0].iter().map(|&x| C64::new(x, 0.0)).collect(),
        ));
        let terms = pauli_decomposition(&m, 2, 1e-14).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0, "IZ");
        assert!((terms[0].1 - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn bch_identity_at_zero() {
        let r = bch_check(&inst(&[3, 1]), 0.0, 0.0).unwrap();
        assert!(r.frobenius_error < 1e-14);
        assert!((&r.exact_product - DMatrix::<C64>::identity(4, 4)).norm() < 1e-14);
    }

    #[test]
    fn bch_remainder_is_third_order() {
        let i = generate_instance(4, 2).unwrap();
        for (b, g) in [(0.1, 0.1), (0.08, 0.05), (0.03, 0.1)] {
            let e1 = bch_check(&i, b, g).unwrap().frobenius_error;
            let e2 = bch_check(&i, b / 2.0, g / 2.0).unwrap().frobenius_error;
            assert!(e2 <= e1 / 4.0 * 1.25, "{e1} {e2}");
        }
    }

    #[test]
    fn bch_small_angle_regression() {
        let e = bch_check(&inst(&[3, 1]), 0.05, 0.05).unwrap().frobenius_error;
        assert!(e < 1e-4, "{e}");
    }

    #[test]
    fn bch_sign_matches_counterdiabatic_sign() {
        let i = generate_instance(4, 4).unwrap();
        let a1 = minimize_action(&i, &DriveSpec::uniform(4), 0.5, 1).unwrap()[0];
        assert!(sign_correspondence(a1, 1.0, 0.3, 0.2));
        assert!(!sign_correspondence(-a1, 1.0, 0.3, 0.2));
    }

    #[test]
    fn size_and_order_guards() {
        let big = generate_instance(7, 0).unwrap();
        assert!(build_agp(&big, &DriveSpec::uniform(7), 0.5, 1).is_err());
        assert!(bch_check(&big, 0.1, 0.1).is_err());
        let i = generate_instance(3, 0).unwrap();
        assert!(build_agp(&i, &DriveSpec::uniform(3), 0.5, 4).is_err());
        assert!(build_agp(&i, &DriveSpec::uniform(3), 0.5, 0).is_err());
        assert!(first_order_coefficient(&big, &DriveSpec::uniform(7), 0.5).unwrap() < 0.0);
    }
}
