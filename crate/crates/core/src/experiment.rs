//! Experiment orchestration: instance banks, per-cell runs, aggregates,
//! minimal depths, efficiency ratios and spectral rows.
//!
//! Cells are independent and evaluated with rayon; every collection keeps
//! its input order, so outputs are deterministic for a fixed configuration.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anneal::{evolve_with, QaConfig, DEFAULT_TOTAL_TIME};
use crate::error::{domain, Result};
use crate::hamiltonians::{build_hp, DriveSpec, ProblemHamiltonian, ScheduleSpec};
use crate::instances::{generate_instance, NppInstance};
use crate::metrics::{efficiency_ratio, optimization_efficiency};
use crate::optimizer::{default_problem_for, multistart_minimize, Algorithm, OptProblem, DEFAULT_CUTOFF, DEFAULT_MAX_EVAL};
use crate::qaoa::{duration, Qaoa, QaoaParams};
use crate::rng::derive_seed;
use crate::spectra::{count_quasi_levels, scan_gap_with, ScanOptions, DEFAULT_DELTA, DEFAULT_GRID_POINTS};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SUCCESS_THRESHOLD: f64 = 0.99;
/// Samples used to find the λ range swept by an optimized path.
const PATH_RANGE_SAMPLES: usize = 2001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub sizes: Vec<usize>,
    pub instances_per_size: usize,
    pub seed: u64,
    pub total_time: f64,
    pub cutoff: usize,
    pub p_min: usize,
    pub p_max: usize,
    pub delta: f64,
    /// Overrides the per-algorithm restart count when set.
    pub restarts: Option<usize>,
    /// Multiplies the restart count.
    pub budget: f64,
    pub max_eval_per_start: usize,
    pub grid_points: usize,
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            algorithm: Algorithm::Qa,
            sizes: vec![6, 7, 8, 9, 10],
            instances_per_size: 10,
            seed: 2024,
            total_time: DEFAULT_TOTAL_TIME,
            cutoff: DEFAULT_CUTOFF,
            p_min: 1,
            p_max: 10,
            delta: DEFAULT_DELTA,
            restarts: None,
            budget: 1.0,
            max_eval_per_start: DEFAULT_MAX_EVAL,
            grid_points: DEFAULT_GRID_POINTS,
            jobs: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n == 0 || n > crate::instances::MAX_QUBITS) {
            return Err(domain("sizes must be non-empty and within 1..=20"));
        }
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            return Err(domain("T must be positive"));
        }
        if self.cutoff == 0 {
            return Err(domain("C must be at least 1"));
        }
        if self.p_min == 0 || self.p_min > self.p_max {
            return Err(domain("depth range must satisfy 1 ≤ p_min ≤ p_max"));
        }
        if !(self.delta > 0.0) {
            return Err(domain("δ must be positive"));
        }
        if !(self.budget > 0.0 && self.budget.is_finite()) {
            return Err(domain("budget must be positive"));
        }
        if self.restarts == Some(0) {
            return Err(domain("restarts must be positive"));
        }
        Ok(())
    }

    /// Optimizer setup for one cell after overrides and budget scaling.
    pub fn problem(&self, algo: Algorithm, inst: &NppInstance, depth: usize) -> Result<OptProblem> {
        let mut prob = default_problem_for(algo, inst, depth)?;
        if let Some(r) = self.restarts {
            prob.restarts = r;
        }
        prob.max_eval_per_start = self.max_eval_per_start;
        Ok(prob.scaled(self.budget))
    }

    pub fn depths(&self, algo: Algorithm) -> Vec<Option<usize>> {
        if algo.is_qaoa() {
            (self.p_min..=self.p_max).map(Some).collect()
        } else {
            vec![None]
        }
    }
}

/// `count` instances per size, each seeded from `(seed, n, k)`.
pub fn generate_bank(sizes: &[usize], count: usize, seed: u64) -> Result<Vec<NppInstance>> {
    let mut bank = Vec::with_capacity(sizes.len() * count);
    for &n in sizes {
        for k in 0..count {
            bank.push(generate_instance(n, derive_seed(seed, &[n as u64, k as u64]))?);
        }
    }
    Ok(bank)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub n: usize,
    pub instance_seed: u64,
    pub p: Option<usize>,
    pub energy: f64,
    pub epsilon: f64,
    pub p_success: f64,
    /// `T` for annealing, `T_QAOA` for circuits.
    pub duration: f64,
    pub n_eval: u64,
    pub wall_time: f64,
    pub code_version: String,
    /// Optimized parameters in the optimizer's flat layout.
    pub params: Vec<f64>,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn efficiency(&self) -> f64 {
        optimization_efficiency(self.p_success, self.n_eval)
    }

    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

fn annealing_config(hp: &ProblemHamiltonian, t: f64, algo: Algorithm, x: &[f64]) -> Result<QaConfig> {
    let mut cfg = QaConfig::standard(hp.n(), t)?;
    match algo {
        Algorithm::QaPath => cfg.schedule = ScheduleSpec::new(t, x.to_vec())?,
        Algorithm::QaFields => cfg.drive = DriveSpec::new(x.to_vec())?,
        _ => {}
    }
    Ok(cfg)
}

/// Runs one (algorithm, instance, depth) cell. Failures are recorded on the
/// row instead of aborting the sweep.
pub fn run_cell(cfg: &ExperimentConfig, algo: Algorithm, inst: &NppInstance, depth: Option<usize>) -> RunRecord {
    let started = Instant::now();
    let mut rec = RunRecord {
        algorithm: algo,
        n: inst.n(),
        instance_seed: inst.seed(),
        p: depth,
        energy: f64::NAN,
        epsilon: f64::NAN,
        p_success: f64::NAN,
        duration: f64::NAN,
        n_eval: 0,
        wall_time: 0.0,
        code_version: CODE_VERSION.to_string(),
        params: vec![],
        error: None,
    };
    if let Err(e) = fill_cell(cfg, algo, inst, depth, &mut rec) {
        rec.error = Some(e.to_string());
    }
    rec.wall_time = started.elapsed().as_secs_f64();
    rec
}

fn fill_cell(
    cfg: &ExperimentConfig,
    algo: Algorithm,
    inst: &NppInstance,
    depth: Option<usize>,
    rec: &mut RunRecord,
) -> Result<()> {
    let hp = build_hp(inst);
    let t = cfg.total_time;
    match algo {
        Algorithm::Qa => {
            let r = evolve_with(&hp, &annealing_config(&hp, t, algo, &[])?, inst.seed())?;
            (rec.energy, rec.epsilon, rec.p_success, rec.duration) = (r.energy, r.epsilon, r.p_success, t);
        }
        Algorithm::QaPath | Algorithm::QaFields => {
            let prob = cfg.problem(algo, inst, cfg.cutoff)?;
            let out = multistart_minimize(&prob, |x| {
                annealing_config(&hp, t, algo, x)
                    .and_then(|c| evolve_with(&hp, &c, inst.seed()))
                    .map_or(f64::NAN, |r| r.energy)
            })?;
            let r = evolve_with(&hp, &annealing_config(&hp, t, algo, &out.best_params)?, inst.seed())?;
            (rec.energy, rec.epsilon, rec.p_success, rec.duration) = (r.energy, r.epsilon, r.p_success, t);
            rec.n_eval = out.n_eval_total;
            rec.params = out.best_params;
        }
        Algorithm::Qaoa | Algorithm::QaoaAdaptive => {
            let p = depth.ok_or_else(|| domain("circuit runs need a depth"))?;
            let adaptive = algo == Algorithm::QaoaAdaptive;
            let engine = Qaoa::from_hp(hp);
            let prob = cfg.problem(algo, inst, p)?;
            let out = multistart_minimize(&prob, |x| {
                engine.cost(&QaoaParams::from_flat(x, p, adaptive)).unwrap_or(f64::NAN)
            })?;
            let params = QaoaParams::from_flat(&out.best_params, p, adaptive);
            let r = engine.evaluate(&params)?;
            (rec.energy, rec.epsilon, rec.p_success) = (r.energy, r.epsilon, r.p_success);
            rec.duration = duration(&params);
            rec.n_eval = out.n_eval_total;
            rec.params = out.best_params;
        }
    }
    Ok(())
}

/// All cells of `cfg.algorithm` over `bank`, in (instance, depth) order.
pub fn run_sweep(cfg: &ExperimentConfig, bank: &[NppInstance]) -> Vec<RunRecord> {
    run_algorithm(cfg, cfg.algorithm, bank)
}

pub fn run_algorithm(cfg: &ExperimentConfig, algo: Algorithm, bank: &[NppInstance]) -> Vec<RunRecord> {
    let cells: Vec<(&NppInstance, Option<usize>)> = bank
        .iter()
        .filter(|i| cfg.sizes.contains(&i.n()))
        .flat_map(|i| cfg.depths(algo).into_iter().map(move |d| (i, d)))
        .collect();
    let mut rows: Vec<RunRecord> = cells.into_par_iter().map(|(i, d)| run_cell(cfg, algo, i, d)).collect();
    sort_records(&mut rows);
    rows
}

/// Orders rows by (algorithm, n, depth, instance seed).
pub fn sort_records(rows: &mut [RunRecord]) {
    rows.sort_by(|a, b| {
        (a.algorithm, a.n, a.p, a.instance_seed).cmp(&(b.algorithm, b.n, b.p, b.instance_seed))
    });
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub algorithm: Algorithm,
    pub n: usize,
    pub p: Option<usize>,
    pub count: usize,
    pub failures: usize,
    pub mean_epsilon: f64,
    pub mean_p_success: f64,
    pub mean_duration: f64,
    pub mean_n_eval: f64,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if c == 0 {
        f64::NAN
    } else {
        s / c as f64
    }
}

/// Per (algorithm, n, depth) means over successful rows.
pub fn aggregate(rows: &[RunRecord]) -> Vec<AggregateRow> {
    let mut keys: Vec<(Algorithm, usize, Option<usize>)> = rows.iter().map(|r| (r.algorithm, r.n, r.p)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(algorithm, n, p)| {
            let group: Vec<&RunRecord> =
                rows.iter().filter(|r| (r.algorithm, r.n, r.p) == (algorithm, n, p)).collect();
            let ok: Vec<&&RunRecord> = group.iter().filter(|r| !r.failed()).collect();
            AggregateRow {
                algorithm,
                n,
                p,
                count: ok.len(),
                failures: group.len() - ok.len(),
                mean_epsilon: mean(ok.iter().map(|r| r.epsilon)),
                mean_p_success: mean(ok.iter().map(|r| r.p_success)),
                mean_duration: mean(ok.iter().map(|r| r.duration)),
                mean_n_eval: mean(ok.iter().map(|r| r.n_eval as f64)),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinDepthRow {
    pub algorithm: Algorithm,
    pub n: usize,
    /// Smallest depth whose mean success probability reaches the threshold.
    pub p_min: Option<usize>,
    pub mean_duration: f64,
}

pub fn min_depths(aggregates: &[AggregateRow], threshold: f64) -> Vec<MinDepthRow> {
    let mut keys: Vec<(Algorithm, usize)> =
        aggregates.iter().filter(|a| a.p.is_some()).map(|a| (a.algorithm, a.n)).collect();
    keys.dedup();
    keys.into_iter()
        .map(|(algorithm, n)| {
            let hit = aggregates
                .iter()
                .filter(|a| a.algorithm == algorithm && a.n == n && a.mean_p_success >= threshold)
                .min_by_key(|a| a.p);
            MinDepthRow {
                algorithm,
                n,
                p_min: hit.and_then(|a| a.p),
                mean_duration: hit.map_or(f64::NAN, |a| a.mean_duration),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyRow {
    pub n: usize,
    pub p: usize,
    pub pairs: usize,
    pub mean_i_eff_standard: f64,
    pub mean_i_eff_adaptive: f64,
    /// Ratio of the mean efficiencies.
    pub r_eff: f64,
    pub baseline: f64,
}

/// Pairs adaptive and standard circuit rows on identical (instance, depth)
/// cells and reports `R_eff` per (n, p).
pub fn efficiency_table(rows: &[RunRecord]) -> Vec<EfficiencyRow> {
    let mut pairs: Vec<(usize, usize, f64, f64)> = Vec::new();
    for a in rows.iter().filter(|r| r.algorithm == Algorithm::QaoaAdaptive && !r.failed()) {
        let partner = rows.iter().find(|s| {
            s.algorithm == Algorithm::Qaoa && !s.failed() && s.instance_seed == a.instance_seed && s.n == a.n && s.p == a.p
        });
        if let (Some(s), Some(p)) = (partner, a.p) {
            pairs.push((a.n, p, s.efficiency(), a.efficiency()));
        }
    }
    let mut keys: Vec<(usize, usize)> = pairs.iter().map(|x| (x.0, x.1)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(n, p)| {
            let cell: Vec<_> = pairs.iter().filter(|x| (x.0, x.1) == (n, p)).collect();
            let std = mean(cell.iter().map(|x| x.2));
            let ada = mean(cell.iter().map(|x| x.3));
            EfficiencyRow {
                n,
                p,
                pairs: cell.len(),
                mean_i_eff_standard: std,
                mean_i_eff_adaptive: ada,
                r_eff: efficiency_ratio(ada, std),
                baseline: 1.0,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriveSetting {
    Standard,
    QaPath,
    QaFields,
}

impl DriveSetting {
    pub const ALL: [DriveSetting; 3] = [DriveSetting::Standard, DriveSetting::QaPath, DriveSetting::QaFields];

    pub fn algorithm(self) -> Algorithm {
        match self {
            DriveSetting::Standard => Algorithm::Qa,
            DriveSetting::QaPath => Algorithm::QaPath,
            DriveSetting::QaFields => Algorithm::QaFields,
        }
    }

    pub fn tag(self) -> &'static str {
        self.algorithm().tag()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectraRecord {
    pub n: usize,
    pub instance_seed: u64,
    pub setting: DriveSetting,
    pub relevant_gap: f64,
    pub argmin_lambda: f64,
    pub problem_gap: f64,
    pub degeneracy: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub delta: f64,
    /// Micro-states in `(E_0, E_0 + δ]`.
    pub n_quasi: usize,
    /// Distinct levels in the same window.
    pub n_quasi_levels: usize,
    /// Success probability of the matching annealing run.
    pub p_success: f64,
    pub error: Option<String>,
}

impl SpectraRecord {
    pub fn bound_holds(&self) -> bool {
        self.relevant_gap <= self.problem_gap
    }
}

/// Spectral row for one drive setting, given that setting's annealing run.
pub fn spectra_row(cfg: &ExperimentConfig, inst: &NppInstance, setting: DriveSetting, run: &RunRecord) -> SpectraRecord {
    let mut rec = SpectraRecord {
        n: inst.n(),
        instance_seed: inst.seed(),
        setting,
        relevant_gap: f64::NAN,
        argmin_lambda: f64::NAN,
        problem_gap: f64::NAN,
        degeneracy: 0,
        lambda_min: 0.0,
        lambda_max: 1.0,
        delta: cfg.delta,
        n_quasi: 0,
        n_quasi_levels: count_quasi_levels(inst, cfg.delta),
        p_success: run.p_success,
        error: run.error.clone(),
    };
    if rec.error.is_some() {
        return rec;
    }
    let result = (|| -> Result<()> {
        let mut opts = ScanOptions { grid_points: cfg.grid_points, delta: cfg.delta, ..ScanOptions::default() };
        let drive = match setting {
            DriveSetting::QaFields => DriveSpec::new(run.params.clone())?,
            _ => DriveSpec::uniform(inst.n()),
        };
        if setting == DriveSetting::QaPath {
            let sched = ScheduleSpec::new(cfg.total_time, run.params.clone())?;
            (opts.lambda_min, opts.lambda_max) = sched.lambda_range(PATH_RANGE_SAMPLES);
        }
        let scan = scan_gap_with(inst, &drive, &opts)?;
        rec.relevant_gap = scan.relevant_gap;
        rec.argmin_lambda = scan.argmin_lambda;
        rec.problem_gap = scan.problem_gap;
        rec.degeneracy = scan.d;
        rec.lambda_min = opts.lambda_min;
        rec.lambda_max = opts.lambda_max;
        rec.n_quasi = scan.n_quasi;
        Ok(())
    })();
    if let Err(e) = result {
        rec.error = Some(e.to_string());
    }
    rec
}

/// Annealing runs for all three drive settings followed by their spectra,
/// in (instance, setting) order.
pub fn run_spectra(cfg: &ExperimentConfig, bank: &[NppInstance]) -> (Vec<RunRecord>, Vec<SpectraRecord>) {
    let cells: Vec<(&NppInstance, DriveSetting)> = bank
        .iter()
        .filter(|i| cfg.sizes.contains(&i.n()))
        .flat_map(|i| DriveSetting::ALL.into_iter().map(move |s| (i, s)))
        .collect();
    let out: Vec<(RunRecord, SpectraRecord)> = cells
        .into_par_iter()
        .map(|(i, s)| {
            let run = run_cell(cfg, s.algorithm(), i, None);
            let row = spectra_row(cfg, i, s, &run);
            (run, row)
        })
        .collect();
    let (mut runs, mut specs): (Vec<_>, Vec<_>) = out.into_iter().unzip();
    sort_records(&mut runs);
    specs.sort_by_key(|s| (s.n, s.instance_seed, s.setting));
    (runs, specs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(algo: Algorithm) -> ExperimentConfig {
        ExperimentConfig {
            algorithm: algo,
            sizes: vec![3, 4],
            instances_per_size: 2,
            restarts: Some(2),
            max_eval_per_start: 60,
            p_max: 2,
            total_time: 5.0,
            grid_points: 21,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn bank_is_deterministic_and_sized() {
        let a = generate_bank(&[6, 7], 10, 1).unwrap();
        assert_eq!(a.len(), 20);
        assert_eq!(a, generate_bank(&[6, 7], 10, 1).unwrap());
        assert!(a[..10].iter().all(|i| i.n() == 6));
        assert!(generate_bank(&[6], 0, 1).unwrap().is_empty());
    }

    #[test]
    fn default_config_matches_reference_settings() {
        let c = ExperimentConfig::default();
        assert_eq!(c.total_time, 50.0);
        assert_eq!(c.cutoff, 6);
        assert_eq!((c.p_min, c.p_max), (1, 10));
        assert_eq!(c.delta, 0.1);
        assert_eq!(c.instances_per_size, 10);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn sweeps_produce_one_row_per_cell() {
        let bank = generate_bank(&[3, 4], 2, 5).unwrap();
        for algo in Algorithm::ALL {
            let cfg = quick(algo);
            let rows = run_sweep(&cfg, &bank);
            let per_inst = if algo.is_qaoa() { 2 } else { 1 };
            assert_eq!(rows.len(), 4 * per_inst, "{algo}");
            assert!(rows.iter().all(|r| !r.failed()), "{rows:?}");
            assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.p_success)));
            if algo != Algorithm::Qa {
                assert!(rows.iter().all(|r| r.n_eval > 0));
            }
        }
    }

    #[test]
    fn aggregates_are_member_means() {
        let bank = generate_bank(&[3, 4], 2, 6).unwrap();
        let rows = run_sweep(&quick(Algorithm::Qaoa), &bank);
        for agg in aggregate(&rows) {
            let members: Vec<_> = rows.iter().filter(|r| r.n == agg.n && r.p == agg.p).collect();
            let m = members.iter().map(|r| r.p_success).sum::<f64>() / members.len() as f64;
            assert!((agg.mean_p_success - m).abs() < 1e-12);
            assert_eq!(agg.count, members.len());
        }
    }

    #[test]
    fn efficiency_pairs_identical_cells() {
        let bank = generate_bank(&[3], 2, 7).unwrap();
        let mut rows = run_sweep(&quick(Algorithm::Qaoa), &bank);
        rows.extend(run_sweep(&quick(Algorithm::QaoaAdaptive), &bank));
        let table = efficiency_table(&rows);
        assert_eq!(table.len(), 2);
        for row in &table {
            assert_eq!(row.pairs, 2);
            assert_eq!(row.baseline, 1.0);
            assert!((row.r_eff - row.mean_i_eff_adaptive / row.mean_i_eff_standard).abs() < 1e-15);
        }
    }

    #[test]
    fn min_depth_finds_first_hit() {
        let row = |p, ps| AggregateRow {
            algorithm: Algorithm::QaoaAdaptive,
            n: 6,
            p: Some(p),
            count: 1,
            failures: 0,
            mean_epsilon: 0.0,
            mean_p_success: ps,
            mean_duration: p as f64,
            mean_n_eval: 1.0,
        };
        let rows = vec![row(1, 0.5), row(2, 0.995), row(3, 0.98), row(4, 0.999)];
        let m = min_depths(&rows, SUCCESS_THRESHOLD);
        assert_eq!(m[0].p_min, Some(2));
        assert_eq!(m[0].mean_duration, 2.0);
        assert_eq!(min_depths(&rows[..1], SUCCESS_THRESHOLD)[0].p_min, None);
    }

    #[test]
    fn spectra_rows_cover_three_settings() {
        let bank = generate_bank(&[4], 2, 8).unwrap();
        let (runs, specs) = run_spectra(&quick(Algorithm::Qa), &bank);
        assert_eq!(runs.len(), 6);
        assert_eq!(specs.len(), 6);
        for s in &specs {
            assert!(s.error.is_none(), "{s:?}");
            assert!(s.bound_holds());
            assert!(s.lambda_min <= s.lambda_max);
        }
    }

    #[test]
    fn variants_never_lose_to_the_standard_anneal() {
        // The first restart starts at the standard protocol and the best
        // value over a restart never exceeds its start value.
        let cfg = ExperimentConfig { restarts: Some(1), max_eval_per_start: 20, ..quick(Algorithm::Qa) };
        for inst in generate_bank(&[4, 5], 2, 3).unwrap() {
            let base = run_cell(&cfg, Algorithm::Qa, &inst, None).energy;
            for algo in [Algorithm::QaPath, Algorithm::QaFields] {
                let r = run_cell(&cfg, algo, &inst, None);
                assert!(r.energy <= base + 1e-12, "{algo}: {} > {base}", r.energy);
            }
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = [
            ExperimentConfig { sizes: vec![], ..ExperimentConfig::default() },
            ExperimentConfig { total_time: 0.0, ..ExperimentConfig::default() },
            ExperimentConfig { p_min: 3, p_max: 2, ..ExperimentConfig::default() },
            ExperimentConfig { delta: -1.0, ..ExperimentConfig::default() },
            ExperimentConfig { budget: 0.0, ..ExperimentConfig::default() },
        ];
        assert!(bad.iter().all(|c| c.validate().is_err()));
    }
}
