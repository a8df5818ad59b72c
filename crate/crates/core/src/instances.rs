//! Random NPP instances at bit density κ = 1, the exhaustive classical
//! oracle, and the `npp v1` instance-bank file format.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::flip_all;
use crate::rng::Rng;

pub const MAX_QUBITS: usize = 20;

/// A set of `n` positive integers drawn from `{1, …, 2^n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NppInstance {
    n: usize,
    numbers: Vec<u64>,
    weights: Vec<f64>,
    seed: u64,
}

impl NppInstance {
    /// Builds an instance from explicit integers; `n` is `numbers.len()` and
    /// the range is `A = 2^n`.
    pub fn new(numbers: Vec<u64>, seed: u64) -> Result<Self> {
        let n = numbers.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(domain(format!("instance size {n} outside 1..={MAX_QUBITS}")));
        }
        let range = 1u64 << n;
        if let Some(bad) = numbers.iter().find(|&&a| a == 0 || a > range) {
            return Err(domain(format!("number {bad} outside 1..={range}")));
        }
        // a_i / 2^n is exact in binary floating point.
        let weights = numbers.iter().map(|&a| a as f64 / range as f64).collect();
        Ok(NppInstance { n, numbers, weights, seed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn numbers(&self) -> &[u64] {
        &self.numbers
    }

    /// Rescaled weights `ã_i = a_i / A`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `A = 2^(κ n)` with κ = 1.
    pub fn range_a(&self) -> u64 {
        1u64 << self.n
    }

    /// Signed difference `Σ a_i s_i(b)` for basis index `b`.
    pub fn signed_difference(&self, b: usize) -> i64 {
        self.numbers
            .iter()
            .enumerate()
            .map(|(i, &a)| if b >> i & 1 == 0 { a as i64 } else { -(a as i64) })
            .sum()
    }
}

/// Classical ground truth of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Minimal `|Σ_P a_i − Σ_P̄ a_j|` in integer units.
    pub min_diff: u64,
    /// Basis indices (see [`crate::linalg::spin`]) of all optimal sign
    /// vectors, ascending. Closed under global flip.
    pub optimal_bitstrings: Vec<usize>,
    pub degeneracy: usize,
    pub is_perfect: bool,
}

/// Draws `n` integers i.i.d. uniform on `{1, …, 2^n}`.
///
/// The stream is xoshiro256** seeded with SplitMix64(`seed`); see
/// [`crate::rng`]. The same `(n, seed)` pair always yields the same instance.
pub fn generate_instance(n: usize, seed: u64) -> Result<NppInstance> {
    if n == 0 || n > MAX_QUBITS {
        return Err(domain(format!("instance size {n} outside 1..={MAX_QUBITS}")));
    }
    let mut rng = Rng::new(seed);
    let range = 1u64 << n;
    let numbers = (0..n).map(|_| rng.uniform_int(1, range)).collect();
    NppInstance::new(numbers, seed)
}

/// Exhaustive enumeration over all `2^n` sign vectors.
pub fn solve_exact(inst: &NppInstance) -> GroundTruth {
    let n = inst.n();
    let dim = 1usize << n;
    let total: i64 = inst.numbers().iter().map(|&a| a as i64).sum();

    // Gray-code walk: one sign flip per step.
    let mut diff = total;
    let mut best = u64::MAX;
    let mut optimal = Vec::new();
    let mut code = 0usize;
    for k in 0..dim {
        if k > 0 {
            let bit = k.trailing_zeros() as usize;
            let a = inst.numbers()[bit] as i64;
            if code >> bit & 1 == 0 {
                diff -= 2 * a;
            } else {
                diff += 2 * a;
            }
            code ^= 1 << bit;
        }
        let d = diff.unsigned_abs();
        if d < best {
            best = d;
            optimal.clear();
        }
        if d == best {
            optimal.push(code);
        }
    }
    optimal.sort_unstable();
    debug_assert!(optimal
        .iter()
        .all(|&b| optimal.binary_search(&flip_all(b, n)).is_ok()));

    GroundTruth {
        min_diff: best,
        degeneracy: optimal.len(),
        optimal_bitstrings: optimal,
        is_perfect: best <= 1,
    }
}

const HEADER: &str = "npp v1";

/// Serializes a bank in the `npp v1` line format.
pub fn format_instances(set: &[NppInstance]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for inst in set {
        let numbers: Vec<String> = inst.numbers().iter().map(u64::to_string).collect();
        writeln!(
            out,
            "n={} seed={} kappa=1 numbers={}",
            inst.n(),
            inst.seed(),
            numbers.join(",")
        )
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn save_instances(set: &[NppInstance], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_instances(set)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_instances(path: impl AsRef<Path>) -> Result<Vec<NppInstance>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_instances(&text, path)
}

/// Parses an `npp v1` bank. `origin` only labels error messages.
pub fn parse_instances(text: &str, origin: &Path) -> Result<Vec<NppInstance>> {
    let err = |line: usize, field: &str, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        field: field.to_string(),
        message,
    };

    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((_, HEADER)) => {}
        Some((no, other)) => return Err(err(no, "header", format!("expected `{HEADER}`, found `{other}`"))),
        None => return Err(err(1, "header", "empty file".into())),
    }

    let mut set = Vec::new();
    for (no, line) in lines {
        let mut n = None;
        let mut seed = None;
        let mut numbers = None;
        for token in line.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| err(no, token, "expected key=value".into()))?;
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|e| err(no, "n", e.to_string()))?),
                "seed" => seed = Some(value.parse::<u64>().map_err(|e| err(no, "seed", e.to_string()))?),
                "kappa" => {
                    if value != "1" {
                        return Err(err(no, "kappa", format!("only kappa=1 is supported, found {value}")));
                    }
                }
                "numbers" => {
                    let parsed = value
                        .split(',')
                        .map(|v| v.parse::<u64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| err(no, "numbers", e.to_string()))?;
                    numbers = Some(parsed);
                }
                other => return Err(err(no, other, "unknown field".into())),
            }
        }
        let n = n.ok_or_else(|| err(no, "n", "missing".into()))?;
        let seed = seed.ok_or_else(|| err(no, "seed", "missing".into()))?;
        let numbers = numbers.ok_or_else(|| err(no, "numbers", "missing".into()))?;
        if numbers.len() != n {
            return Err(err(no, "numbers", format!("expected {n} integers, found {}", numbers.len())));
        }
        let inst = NppInstance::new(numbers, seed).map_err(|e| err(no, "numbers", e.to_string()))?;
        set.push(inst);
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use std::path::PathBuf;

    use super::*;

    fn no_path() -> PathBuf {
        PathBuf::from("<memory>")
    }

    fn inst(numbers: &[u64]) -> NppInstance {
        NppInstance::new(numbers.to_vec(), 0).unwrap()
    }

    /// Independent oracle: direct evaluation of every sign vector.
    fn brute_force(numbers: &[u64]) -> (u64, Vec<usize>) {
        let n = numbers.len();
        let diffs: Vec<u64> = (0..1usize << n)
            .map(|b| {
                let s: i64 = (0..n)
                    .map(|i| if b >> i & 1 == 0 { numbers[i] as i64 } else { -(numbers[i] as i64) })
                    .sum();
                s.unsigned_abs()
            })
            .collect();
        let min = *diffs.iter().min().unwrap();
        let arg = (0..diffs.len()).filter(|&b| diffs[b] == min).collect();
        (min, arg)
    }

    #[test]
    fn small_examples() {
        let gt = solve_exact(&inst(&[3, 1]));
        assert_eq!((gt.min_diff, gt.degeneracy), (2, 2));
        assert_eq!(gt.optimal_bitstrings, vec![0b01, 0b10]);
        assert!(!gt.is_perfect);

        let gt = solve_exact(&inst(&[1, 1]));
        assert_eq!((gt.min_diff, gt.degeneracy, gt.is_perfect), (0, 2, true));

        let gt = solve_exact(&NppInstance::new(vec![5, 3, 2], 0).unwrap());
        assert_eq!((gt.min_diff, gt.degeneracy), (0, 2));
    }

    #[test]
    fn gray_walk_matches_brute_force() {
        for seed in 0..40 {
            let n = 1 + (seed as usize % 12);
            let inst = generate_instance(n, seed).unwrap();
            let gt = solve_exact(&inst);
            let (min, arg) = brute_force(inst.numbers());
            assert_eq!(gt.min_diff, min);
            assert_eq!(gt.optimal_bitstrings, arg);
            assert_eq!(gt.degeneracy % 2, 0);
        }
    }

    #[test]
    fn generation_ranges_and_determinism() {
        let a = generate_instance(6, 11).unwrap();
        assert_eq!(a.numbers().len(), 6);
        assert!(a.numbers().iter().all(|&x| (1..=64).contains(&x)));
        for seed in 0..50 {
            let one = generate_instance(1, seed).unwrap();
            assert!(matches!(one.numbers()[0], 1 | 2));
        }
        assert_eq!(generate_instance(8, 7).unwrap(), generate_instance(8, 7).unwrap());
        assert!(generate_instance(0, 1).is_err());
        assert!(generate_instance(21, 1).is_err());
    }

    #[test]
    fn weights_are_exact_ratios() {
        let i = generate_instance(10, 5).unwrap();
        for (&a, &w) in i.numbers().iter().zip(i.weights()) {
            assert_eq!(w * 1024.0, a as f64);
        }
    }

    #[test]
    fn bank_round_trip() {
        let set: Vec<_> = (0..10).map(|k| generate_instance(6 + k % 5, k as u64).unwrap()).collect();
        let text = format_instances(&set);
        assert!(text.starts_with("npp v1\n"));
        assert_eq!(parse_instances(&text, &no_path()).unwrap(), set);
    }

    #[test]
    fn parse_rejects_zero_and_names_line() {
        let text = "npp v1\n# bank\nn=2 seed=1 kappa=1 numbers=1,2\nn=2 seed=2 kappa=1 numbers=0,3\n";
        match parse_instances(text, &no_path()) {
            Err(Error::Parse { line, field, .. }) => {
                assert_eq!(line, 4);
                assert_eq!(field, "numbers");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_accepts_full_size_ten() {
        let nums: Vec<String> = [1u64, 1024, 512, 3, 77, 900, 12, 5, 640, 1000].iter().map(u64::to_string).collect();
        let text = format!("npp v1\nn=10 seed=9 kappa=1 numbers={}\n", nums.join(","));
        let set = parse_instances(&text, &no_path()).unwrap();
        assert_eq!(set[0].n(), 10);
    }

    #[test]
    fn parse_rejects_bad_header_and_count() {
        assert!(parse_instances("npp v2\n", &no_path()).is_err());
        assert!(parse_instances("npp v1\nn=3 seed=1 kappa=1 numbers=1,2\n", &no_path()).is_err());
        assert!(parse_instances("npp v1\nn=2 seed=1 kappa=2 numbers=1,2\n", &no_path()).is_err());
    }
}
