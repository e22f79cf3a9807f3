//! Monte Carlo estimation of the expected spectral distribution `F = E F_A`,
//! of `E ||F_A - F||_inf`, and of its tail, with the closed-form bounds those
//! quantities are compared against.
//!
//! Per-sample work runs on the rayon pool; results are collected in sample
//! index order and reduced sequentially, so every number is independent of
//! the worker count.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::format::{fmt17, num, num_array};
use crate::linalg::{check_hermitian, eigenvalues_hermitian, singular_values, Spectrum};
use crate::linalg::{DenseMatrix, JACOBI_MAX_SWEEPS, JACOBI_TOL};
use crate::oracle::{self, binomial, ENUMERATION_CAP};
use crate::sampling::{self, principal_submatrix, random_k_subset, row_submatrix, SeedPlan, SubsetSample};
use crate::spectra::{average_cdfs, esd, sup_distance, StepCdf};
use crate::{Error, Result};

/// Which spectrum of a sampled submatrix is studied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Eigenvalues of a `k x k` principal submatrix of a Hermitian `M`.
    Eigen,
    /// Singular values of a `k x cols` row submatrix of any `M`.
    Singular,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Eigen => "eigen",
            Mode::Singular => "singular",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eigen" => Ok(Mode::Eigen),
            "singular" => Ok(Mode::Singular),
            other => Err(Error::invalid(format!("unknown mode {other:?}"))),
        }
    }
}

/// Checks `M`, `k`, and `mode` are compatible; returns the ambient order `n`
/// (the number of rows subsets are drawn from).
pub fn validate_input(m: &DenseMatrix, k: usize, mode: Mode) -> Result<usize> {
    let n = m.rows();
    if mode == Mode::Eigen {
        check_hermitian(m)?;
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k = {k} must satisfy 1 <= k <= n = {n}")));
    }
    Ok(n)
}

/// Spectrum studied for the submatrix selected by `s`.
pub fn subset_spectrum(m: &DenseMatrix, s: &SubsetSample, mode: Mode) -> Result<Spectrum> {
    match mode {
        Mode::Eigen => eigenvalues_hermitian(&principal_submatrix(m, s)?),
        Mode::Singular => singular_values(&row_submatrix(m, s)?),
    }
}

fn sample_esd(m: &DenseMatrix, n: usize, k: usize, mode: Mode, plan: &SeedPlan, index: u64) -> Result<StepCdf> {
    let mut rng = plan.stream(index);
    let subset = random_k_subset(n, k, &mut rng)?;
    Ok(esd(&subset_spectrum(m, &subset, mode)?))
}

fn sample_esds(m: &DenseMatrix, k: usize, mode: Mode, streams: Range<u64>, master_seed: u64) -> Result<Vec<StepCdf>> {
    let n = validate_input(m, k, mode)?;
    if streams.is_empty() {
        return Err(Error::invalid("need at least one sample"));
    }
    let plan = SeedPlan::new(master_seed);
    streams.into_par_iter().map(|i| sample_esd(m, n, k, mode, &plan, i)).collect()
}

fn equal_weights(count: usize) -> Vec<f64> {
    vec![1.0 / count as f64; count]
}

/// Estimate of `F = E F_A` from `n_samples` draws (streams `0..n_samples`).
pub fn estimate_f(m: &DenseMatrix, k: usize, mode: Mode, n_samples: usize, master_seed: u64) -> Result<StepCdf> {
    estimate_f_streams(m, k, mode, 0..n_samples as u64, master_seed)
}

/// Same as [`estimate_f`] over an explicit range of stream indices.
pub fn estimate_f_streams(
    m: &DenseMatrix,
    k: usize,
    mode: Mode,
    streams: Range<u64>,
    master_seed: u64,
) -> Result<StepCdf> {
    let esds = sample_esds(m, k, mode, streams, master_seed)?;
    average_cdfs(&esds, &equal_weights(esds.len()))
}

/// Estimated distribution of `||F_A - F||_inf`.
#[derive(Clone, Debug)]
pub struct EstimateReport {
    pub mode: Mode,
    pub n: usize,
    pub k: usize,
    pub n_samples: usize,
    pub master_seed: u64,
    /// Average of the sampled ESDs.
    pub f_hat: StepCdf,
    pub mean_supnorm: f64,
    /// Standard error of `mean_supnorm`.
    pub mean_stderr: f64,
    /// `(probability, value)` pairs for 0.5, 0.9, 0.99.
    pub supnorm_quantiles: Vec<(f64, f64)>,
    pub metadata: String,
    /// Per-sample sup distances in sample order.
    pub samples: Vec<f64>,
}

impl EstimateReport {
    pub fn to_json(&self) -> Value {
        let mut quantiles = Map::new();
        for &(p, v) in &self.supnorm_quantiles {
            quantiles.insert(format!("{p}"), num(v));
        }
        json!({
            "mode": self.mode.as_str(),
            "n": self.n,
            "k": self.k,
            "n_samples": self.n_samples,
            "master_seed": self.master_seed,
            "F_hat": self.f_hat.to_json(),
            "mean_supnorm": num(self.mean_supnorm),
            "mean_stderr": num(self.mean_stderr),
            "sqrt_k_times_mean": num(self.mean_supnorm * (self.k as f64).sqrt()),
            "mean_bound": num(theorem1_mean_bound(self.k)),
            "supnorm_quantiles": Value::Object(quantiles),
            "metadata": self.metadata,
        })
    }
}

/// Eigensolver and PRNG description embedded in every report.
pub fn solver_metadata() -> String {
    format!(
        "prng: {}; eigensolver: cyclic Jacobi, off-diagonal tol {} relative to Frobenius norm, max {} sweeps",
        sampling::PRNG_NAME,
        fmt17(JACOBI_TOL),
        JACOBI_MAX_SWEEPS
    )
}

/// Linear-interpolation quantile of sorted data.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Samples `n_samples` submatrices and measures each ESD against `reference`.
pub fn estimate_supnorm(
    m: &DenseMatrix,
    k: usize,
    mode: Mode,
    n_samples: usize,
    master_seed: u64,
    reference: &StepCdf,
) -> Result<EstimateReport> {
    let n = validate_input(m, k, mode)?;
    let esds = sample_esds(m, k, mode, 0..n_samples as u64, master_seed)?;
    let samples: Vec<f64> = esds.par_iter().map(|f| sup_distance(f, reference)).collect();
    let f_hat = average_cdfs(&esds, &equal_weights(esds.len()))?;

    let count = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / count;
    let var = if samples.len() > 1 {
        samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0)
    } else {
        0.0
    };
    let mut sorted = samples.clone();
    sorted.sort_by(f64::total_cmp);
    let supnorm_quantiles = [0.5, 0.9, 0.99].iter().map(|&p| (p, quantile_sorted(&sorted, p))).collect();

    Ok(EstimateReport {
        mode,
        n,
        k,
        n_samples,
        master_seed,
        f_hat,
        mean_supnorm: mean,
        mean_stderr: (var / count).sqrt(),
        supnorm_quantiles,
        metadata: solver_metadata(),
        samples,
    })
}

/// How the reference `F` of a run was obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum ReferenceKind {
    /// Full enumeration of all `C(n, k)` subsets.
    Exact { subsets: u128 },
    /// Independent Monte Carlo estimate.
    Estimated { master_seed: u64, n_samples: usize },
    /// Known closed form, named.
    ClosedForm(&'static str),
}

impl ReferenceKind {
    pub fn to_json(&self) -> Value {
        match self {
            ReferenceKind::Exact { subsets } => json!({ "kind": "exact", "subsets": subsets.to_string() }),
            ReferenceKind::Estimated { master_seed, n_samples } => {
                json!({ "kind": "estimated", "master_seed": master_seed, "n_samples": n_samples })
            }
            ReferenceKind::ClosedForm(name) => json!({ "kind": "closed-form", "name": name }),
        }
    }
}

/// Master seed of the independent reference run.
pub fn reference_seed(master_seed: u64) -> u64 {
    // "REFERENC"
    sampling::splitmix64_mix(master_seed ^ 0x5245_4645_5245_4E43)
}

/// Exact `F` when `C(n, k)` is within the enumeration cap, otherwise an
/// estimate with ten times the samples on an independent seed.
pub fn default_reference(
    m: &DenseMatrix,
    k: usize,
    mode: Mode,
    n_samples: usize,
    master_seed: u64,
) -> Result<(StepCdf, ReferenceKind)> {
    let n = validate_input(m, k, mode)?;
    let subsets = binomial(n, k);
    if subsets <= ENUMERATION_CAP {
        Ok((oracle::exact_f(m, k, mode)?, ReferenceKind::Exact { subsets }))
    } else {
        let seed = reference_seed(master_seed);
        let count = n_samples.saturating_mul(10);
        Ok((estimate_f(m, k, mode, count, seed)?, ReferenceKind::Estimated { master_seed: seed, n_samples: count }))
    }
}

/// Empirical tail against the tail bound on a grid of `r` values.
#[derive(Clone, Debug, PartialEq)]
pub struct TailCurve {
    pub k: usize,
    pub r_grid: Vec<f64>,
    pub empirical: Vec<f64>,
    pub bound: Vec<f64>,
    /// Binomial standard error of each empirical value; 0 for exact curves.
    pub stderr: Vec<f64>,
    pub n_samples: usize,
}

impl TailCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,empirical,bound,stderr\n");
        for i in 0..self.r_grid.len() {
            let row = [self.r_grid[i], self.empirical[i], self.bound[i], self.stderr[i]].map(fmt17);
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "n_samples": self.n_samples,
            "r_grid": num_array(&self.r_grid),
            "empirical": num_array(&self.empirical),
            "bound": num_array(&self.bound),
            "bound_raw": num_array(&self.r_grid.iter().map(|&r| theorem1_tail_bound_raw(self.k, r)).collect::<Vec<_>>()),
            "stderr": num_array(&self.stderr),
        })
    }
}

pub(crate) fn validate_r_grid(r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty() || r_grid.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::invalid("r grid must be nonempty, finite, and nonnegative"));
    }
    if r_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("r grid must be increasing"));
    }
    Ok(())
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Fraction of samples with `||F_A - F|| >= k^(-1/2) + r`, per grid point.
pub fn empirical_tail(report: &EstimateReport, r_grid: &[f64]) -> Result<TailCurve> {
    validate_r_grid(r_grid)?;
    let count = report.samples.len() as f64;
    let offset = 1.0 / (report.k as f64).sqrt();
    let mut empirical = Vec::with_capacity(r_grid.len());
    let mut stderr = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let hits = report.samples.iter().filter(|&&v| v >= offset + r).count();
        let p = hits as f64 / count;
        empirical.push(p);
        stderr.push((p * (1.0 - p) / count).sqrt());
    }
    Ok(TailCurve {
        k: report.k,
        r_grid: r_grid.to_vec(),
        empirical,
        bound: r_grid.iter().map(|&r| theorem1_tail_bound(report.k, r)).collect(),
        stderr,
        n_samples: report.samples.len(),
    })
}

/// `12 sqrt(k) exp(-r sqrt(k/8))`, unclamped.
pub fn theorem1_tail_bound_raw(k: usize, r: f64) -> f64 {
    let k = k as f64;
    12.0 * k.sqrt() * (-r * (k / 8.0).sqrt()).exp()
}

/// Tail bound on `P(||F_A - F|| >= k^(-1/2) + r)`, clamped to a probability.
pub fn theorem1_tail_bound(k: usize, r: f64) -> f64 {
    theorem1_tail_bound_raw(k, r).min(1.0)
}

/// `(13 + sqrt(8) ln k) / sqrt(k)`, unclamped.
pub fn theorem1_mean_bound(k: usize) -> f64 {
    let k = k as f64;
    (13.0 + 8f64.sqrt() * k.ln()) / k.sqrt()
}

/// `6 exp(-r sqrt(k) / sqrt(8))`, unclamped.
pub fn pointwise_tail_bound_raw(k: usize, r: f64) -> f64 {
    6.0 * (-r * (k as f64).sqrt() / 8f64.sqrt()).exp()
}

/// Bound on `P(|F_A(x) - F(x)| >= r)`, clamped to a probability.
pub fn pointwise_tail_bound(k: usize, r: f64) -> f64 {
    pointwise_tail_bound_raw(k, r).min(1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailViolation {
    pub r: f64,
    pub empirical: f64,
    pub bound: f64,
    pub stderr: f64,
}

/// Grid points where the empirical tail exceeds the bound by more than three
/// binomial standard errors. Empty means the bound held.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TailComparison {
    pub violations: Vec<TailViolation>,
}

impl TailComparison {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "violations": self.violations.iter().map(|v| json!({
                "r": num(v.r),
                "empirical": num(v.empirical),
                "bound": num(v.bound),
                "stderr": num(v.stderr),
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn compare_tail(curve: &TailCurve) -> TailComparison {
    let violations = (0..curve.r_grid.len())
        .filter(|&i| curve.empirical[i] > curve.bound[i] + 3.0 * curve.stderr[i])
        .map(|i| TailViolation {
            r: curve.r_grid[i],
            empirical: curve.empirical[i],
            bound: curve.bound[i],
            stderr: curve.stderr[i],
        })
        .collect();
    TailComparison { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{half_ones_diagonal, random_general, random_symmetric, EntryDist};
    use approx::assert_abs_diff_eq;

    #[test]
    fn bound_values() {
        assert_eq!(theorem1_tail_bound(100, 0.0), 1.0);
        assert_abs_diff_eq!(theorem1_tail_bound_raw(100, 0.0), 120.0, epsilon = 1e-12);
        // 120 exp(-2 sqrt(12.5)) = 0.10191908456630...
        assert_abs_diff_eq!(theorem1_tail_bound(100, 2.0), 0.101919084566300, epsilon = 1e-12);
        for k in [1, 4, 100, 10_000] {
            for i in 0..50 {
                let (r1, r2) = (i as f64 * 0.1, (i + 1) as f64 * 0.1);
                assert!(theorem1_tail_bound(k, r1) >= theorem1_tail_bound(k, r2));
                assert!(pointwise_tail_bound(k, r1) >= pointwise_tail_bound(k, r2));
                for b in [theorem1_tail_bound(k, r1), pointwise_tail_bound(k, r1)] {
                    assert!((0.0..=1.0).contains(&b));
                }
            }
            assert_eq!(theorem1_tail_bound(k, 0.0), 1.0);
        }
        assert_eq!(theorem1_mean_bound(1), 13.0);
        assert_abs_diff_eq!(theorem1_mean_bound(100), 2.6026, epsilon = 1e-4);
        assert_abs_diff_eq!(theorem1_mean_bound(1_000_000), 0.0521, epsilon = 1e-4);
        assert_eq!(pointwise_tail_bound(5, 0.0), 1.0);
        assert_eq!(pointwise_tail_bound(8, 1.0), 1.0);
        assert_abs_diff_eq!(pointwise_tail_bound(800, 1.0), 2.7240e-4, epsilon = 1e-7);
    }

    #[test]
    fn constant_diagonal_gives_single_atom() {
        let m = DenseMatrix::diagonal(&[2.5; 7]);
        for samples in [1, 10, 100] {
            let f = estimate_f(&m, 3, Mode::Eigen, samples, 1).unwrap();
            assert_eq!(f, StepCdf::point_mass(2.5));
        }
        let report = estimate_supnorm(&m, 3, Mode::Eigen, 200, 4, &StepCdf::point_mass(2.5)).unwrap();
        assert!(report.samples.iter().all(|&v| v == 0.0));
        let curve = empirical_tail(&report, &linspace(0.0, 1.0, 11)).unwrap();
        assert!(curve.empirical.iter().all(|&p| p == 0.0));
        assert!(compare_tail(&curve).passed());
    }

    #[test]
    fn full_subset_returns_matrix_esd() {
        let m = random_symmetric(5, 3, EntryDist::Gaussian);
        let f = estimate_f(&m, 5, Mode::Eigen, 20, 0).unwrap();
        let want = esd(&eigenvalues_hermitian(&m).unwrap());
        assert_eq!(f.jumps(), want.jumps());
        for (a, b) in f.cum().iter().zip(want.cum()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn half_ones_estimate_near_one_half() {
        let m = half_ones_diagonal(4);
        let samples = 40_000;
        let f = estimate_f(&m, 2, Mode::Eigen, samples, 99).unwrap();
        let sigma = (0.25f64 / samples as f64).sqrt();
        // F_A(0) = 1 - h/2 with mean 1/2 and per-sample variance 1/12
        let per_sample_sigma = (1.0 / 12.0 / samples as f64).sqrt();
        assert!((f.eval(0.5) - 0.5).abs() <= 3.0 * per_sample_sigma.max(sigma), "{}", f.eval(0.5));
        assert_eq!(f.eval(1.0), 1.0);
    }

    #[test]
    fn self_fit_is_biased_low() {
        let m = random_symmetric(12, 5, EntryDist::Gaussian);
        let exact = oracle::exact_f(&m, 4, Mode::Eigen).unwrap();
        let own = estimate_f(&m, 4, Mode::Eigen, 300, 7).unwrap();
        let against_exact = estimate_supnorm(&m, 4, Mode::Eigen, 300, 7, &exact).unwrap();
        let against_own = estimate_supnorm(&m, 4, Mode::Eigen, 300, 7, &own).unwrap();
        let independent = estimate_f(&m, 4, Mode::Eigen, 300, 8).unwrap();
        let against_indep = estimate_supnorm(&m, 4, Mode::Eigen, 300, 7, &independent).unwrap();
        assert!(against_own.mean_supnorm < against_indep.mean_supnorm);
        assert_eq!(against_exact.f_hat, own);
    }

    #[test]
    fn split_runs_mix_back_together() {
        let m = random_symmetric(9, 2, EntryDist::Pm1);
        let (n1, n2) = (37u64, 63u64);
        let whole = estimate_f(&m, 3, Mode::Eigen, (n1 + n2) as usize, 11).unwrap();
        let a = estimate_f_streams(&m, 3, Mode::Eigen, 0..n1, 11).unwrap();
        let b = estimate_f_streams(&m, 3, Mode::Eigen, n1..n1 + n2, 11).unwrap();
        let total = (n1 + n2) as f64;
        let mixed = average_cdfs(&[a, b], &[n1 as f64 / total, n2 as f64 / total]).unwrap();
        assert_eq!(whole.jumps(), mixed.jumps());
        for (x, y) in whole.cum().iter().zip(mixed.cum()) {
            assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let m = random_symmetric(15, 6, EntryDist::Gaussian);
        let reference = estimate_f(&m, 5, Mode::Eigen, 500, 1).unwrap();
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| estimate_supnorm(&m, 5, Mode::Eigen, 400, 2, &reference).unwrap())
        };
        let (one, many) = (run(1), run(4));
        assert_eq!(one.samples, many.samples);
        assert_eq!(one.f_hat, many.f_hat);
        assert_eq!(one.mean_supnorm.to_bits(), many.mean_supnorm.to_bits());
    }

    #[test]
    fn shift_leaves_distances_unchanged() {
        let m = random_symmetric(10, 12, EntryDist::Gaussian);
        let shifted = m.shifted(0.5).unwrap();
        let ref_a = estimate_f(&m, 4, Mode::Eigen, 400, 100).unwrap();
        let ref_b = estimate_f(&shifted, 4, Mode::Eigen, 400, 100).unwrap();
        let a = estimate_supnorm(&m, 4, Mode::Eigen, 300, 3, &ref_a).unwrap();
        let b = estimate_supnorm(&shifted, 4, Mode::Eigen, 300, 3, &ref_b).unwrap();
        assert!((a.mean_supnorm - b.mean_supnorm).abs() <= 1e-12);
        let grid = linspace(0.0, 1.0, 11);
        assert_eq!(empirical_tail(&a, &grid).unwrap().empirical, empirical_tail(&b, &grid).unwrap().empirical);
    }

    #[test]
    fn singular_mode_accepts_rectangular_input() {
        let m = random_general(6, 9, 4);
        let f = estimate_f(&m, 3, Mode::Singular, 50, 0).unwrap();
        assert!(f.jumps().iter().all(|&x| x >= 0.0));
        assert!(estimate_f(&m, 3, Mode::Eigen, 50, 0).is_err());
    }

    #[test]
    fn tail_edge_cases() {
        let m = random_symmetric(8, 1, EntryDist::Gaussian);
        let reference = oracle::exact_f(&m, 4, Mode::Eigen).unwrap();
        let report = estimate_supnorm(&m, 4, Mode::Eigen, 500, 9, &reference).unwrap();
        let curve = empirical_tail(&report, &[0.0, 0.25, 0.6, 2.0]).unwrap();
        // k^{-1/2} + r > 1 for r = 0.6, 2
        assert_eq!(curve.empirical[2], 0.0);
        assert_eq!(curve.empirical[3], 0.0);
        assert!(curve.empirical.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(curve.bound[0], 1.0);
        assert!(empirical_tail(&report, &[0.5, 0.1]).is_err());
        assert!(empirical_tail(&report, &[-0.1]).is_err());
    }

    #[test]
    fn reporter_flags_synthetic_failure() {
        let k = 10_000;
        let r_grid = linspace(0.0, 1.0, 5);
        let curve = TailCurve {
            k,
            bound: r_grid.iter().map(|&r| theorem1_tail_bound(k, r)).collect(),
            empirical: vec![1.0; 5],
            stderr: vec![0.0; 5],
            r_grid,
            n_samples: 100,
        };
        let cmp = compare_tail(&curve);
        assert_eq!(cmp.violations.len(), 4);
        assert!(!cmp.passed());
    }

    #[test]
    fn tail_csv_layout() {
        let curve = TailCurve {
            k: 4,
            r_grid: vec![0.0],
            empirical: vec![0.5],
            bound: vec![1.0],
            stderr: vec![0.25],
            n_samples: 4,
        };
        assert_eq!(
            curve.to_csv(),
            "r,empirical,bound,stderr\n0.0000000000000000e0,5.0000000000000000e-1,1.0000000000000000e0,2.5000000000000000e-1\n"
        );
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("eigen".parse::<Mode>().unwrap(), Mode::Eigen);
        assert_eq!("singular".parse::<Mode>().unwrap(), Mode::Singular);
        assert!("both".parse::<Mode>().is_err());
    }
}
