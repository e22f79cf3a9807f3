//! The random-transpositions walk on `S_n` for small `n`: kernel, spectral
//! gap, Dirichlet form, the `|||f|||_inf` functional, the ESD observable
//! `f(pi) = F_{A(pi)}(x)`, and exhaustive concentration checks.
//!
//! Permutations are arrays `pi[0..n]`; `pi tau` for the transposition
//! `tau = (I J)` is `pi` with positions `I` and `J` swapped. States are
//! indexed by lexicographic rank.

use std::collections::HashMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::format::num;
use crate::linalg::{eigenvalues_hermitian, gram, numerical_rank, DenseMatrix, Spectrum};
use crate::montecarlo::{validate_input, Mode};
use crate::sampling::{principal_submatrix, row_submatrix, SubsetSample};
use crate::spectra::{esd, sup_distance};
use crate::{Error, Result};

/// Largest `n` with a dense `n! x n!` kernel.
pub const MAX_DENSE_N: usize = 6;
/// Largest `n` for ranks and matrix-free functionals.
pub const MAX_PERM_N: usize = 8;

/// Slack in the `4 / (kn)` estimate.
pub const TRIPLE_NORM_SLACK: f64 = 1e-12;

/// Relative tolerance for `numerical_rank` in [`rank_step_check`].
pub const RANK_TOL: f64 = 1e-10;

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn check_perm_n(n: usize) -> Result<()> {
    if !(1..=MAX_PERM_N).contains(&n) {
        return Err(Error::invalid(format!("n = {n} outside 1..={MAX_PERM_N}")));
    }
    Ok(())
}

fn check_dense_n(n: usize) -> Result<()> {
    if !(2..=MAX_DENSE_N).contains(&n) {
        return Err(Error::invalid(format!("n = {n} outside 2..={MAX_DENSE_N}")));
    }
    Ok(())
}

/// Lexicographic rank of a permutation of `0..n`.
pub fn rank_perm(perm: &[usize]) -> Result<usize> {
    let n = perm.len();
    check_perm_n(n)?;
    let mut seen = vec![false; n];
    let mut rank = 0;
    for (i, &p) in perm.iter().enumerate() {
        if p >= n || seen[p] {
            return Err(Error::invalid(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        let smaller_unused = seen[..p].iter().filter(|&&s| !s).count();
        rank += smaller_unused * factorial(n - 1 - i);
        seen[p] = true;
    }
    Ok(rank)
}

/// Inverse of [`rank_perm`].
pub fn unrank_perm(n: usize, rank: usize) -> Result<Vec<usize>> {
    check_perm_n(n)?;
    if rank >= factorial(n) {
        return Err(Error::invalid(format!("rank {rank} out of range for n = {n}")));
    }
    let mut pool: Vec<usize> = (0..n).collect();
    let mut rest = rank;
    let mut perm = Vec::with_capacity(n);
    for i in 0..n {
        let f = factorial(n - 1 - i);
        perm.push(pool.remove(rest / f));
        rest %= f;
    }
    Ok(perm)
}

/// A permutation of `0..n` identified by its lexicographic rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermIndex {
    n: usize,
    rank: usize,
}

impl PermIndex {
    pub fn new(n: usize, rank: usize) -> Result<Self> {
        check_perm_n(n)?;
        if rank >= factorial(n) {
            return Err(Error::invalid(format!("rank {rank} out of range for n = {n}")));
        }
        Ok(PermIndex { n, rank })
    }

    pub fn from_perm(perm: &[usize]) -> Result<Self> {
        Ok(PermIndex { n: perm.len(), rank: rank_perm(perm)? })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn to_perm(&self) -> Vec<usize> {
        unrank_perm(self.n, self.rank).expect("valid index")
    }
}

/// The `n(n-1)/2` transpositions `(I, J)`, `I < J`.
pub fn transpositions(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// `table[x * t + j]` is the rank of `x tau_j` for the `t` transpositions.
fn neighbor_table(n: usize) -> &'static [usize] {
    static TABLES: [OnceLock<Vec<usize>>; MAX_PERM_N + 1] = [const { OnceLock::new() }; MAX_PERM_N + 1];
    TABLES[n].get_or_init(|| {
        let taus = transpositions(n);
        (0..factorial(n))
            .into_par_iter()
            .flat_map_iter(|x| {
                let perm = unrank_perm(n, x).expect("rank in range");
                taus.iter()
                    .map(|&(i, j)| {
                        let mut next = perm.clone();
                        next.swap(i, j);
                        rank_perm(&next).expect("permutation")
                    })
                    .collect::<Vec<_>>()
            })
            .collect()
    })
}

/// Real function on `S_n`, indexed by lexicographic rank.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionOnSn {
    n: usize,
    values: Vec<f64>,
}

impl FunctionOnSn {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_perm_n(n)?;
        if values.len() != factorial(n) {
            return Err(Error::DimensionMismatch(format!("{} values for {n}! states", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("function values must be finite"));
        }
        Ok(FunctionOnSn { n, values })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        check_perm_n(n)?;
        Self::new(n, vec![c; factorial(n)])
    }

    /// Evaluates `g` on every permutation array.
    pub fn from_fn(n: usize, g: impl Fn(&[usize]) -> f64) -> Result<Self> {
        check_perm_n(n)?;
        let values = (0..factorial(n)).map(|r| g(&unrank_perm(n, r).expect("rank in range"))).collect();
        Self::new(n, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, c: f64) -> FunctionOnSn {
        FunctionOnSn { n: self.n, values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Dense transition matrix of the walk.
pub fn kernel_matrix(n: usize) -> Result<DenseMatrix> {
    check_dense_n(n)?;
    let states = factorial(n);
    let t = n * (n - 1) / 2;
    let table = neighbor_table(n);
    let step = 2.0 / (n * n) as f64;
    let mut k = DenseMatrix::zeros(states, states, crate::linalg::Field::Real);
    for x in 0..states {
        k.set(x, x, 1.0 / n as f64, 0.0);
        for &y in &table[x * t..(x + 1) * t] {
            k.set(x, y, step, 0.0);
        }
    }
    Ok(k)
}

/// Kernel health and spectral gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkReport {
    pub n: usize,
    pub row_sum_error: f64,
    /// `max |Pi(x,y) - Pi(y,x)|`; with uniform `mu` this is detailed balance.
    pub reversibility_error: f64,
    pub invariance_error: f64,
    pub gap: f64,
    pub gap_theory: f64,
}

impl WalkReport {
    /// Kernel errors within `kernel_tol` and gap within `gap_tol` of `2/n`.
    pub fn passes(&self, kernel_tol: f64, gap_tol: f64) -> bool {
        self.row_sum_error <= kernel_tol
            && self.reversibility_error <= kernel_tol
            && self.invariance_error <= kernel_tol
            && (self.gap - self.gap_theory).abs() <= gap_tol
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "row_sum_error": num(self.row_sum_error),
            "reversibility_error": num(self.reversibility_error),
            "invariance_error": num(self.invariance_error),
            "gap": num(self.gap),
            "gap_theory": num(self.gap_theory),
        })
    }
}

fn second_eigenvalue_gap(sym: &DenseMatrix) -> Result<f64> {
    let eig = eigenvalues_hermitian(sym)?;
    let v = eig.values();
    Ok(1.0 - v[v.len() - 2])
}

/// `1 - lambda_2` of the kernel; cached per `n`.
pub fn spectral_gap(n: usize) -> Result<f64> {
    static GAPS: [OnceLock<f64>; MAX_DENSE_N + 1] = [const { OnceLock::new() }; MAX_DENSE_N + 1];
    check_dense_n(n)?;
    if let Some(&g) = GAPS[n].get() {
        return Ok(g);
    }
    let g = second_eigenvalue_gap(&kernel_matrix(n)?)?;
    Ok(*GAPS[n].get_or_init(|| g))
}

pub fn verify_kernel(n: usize) -> Result<WalkReport> {
    let k = kernel_matrix(n)?;
    let mut report = verify_kernel_matrix(n, &k, false)?;
    report.gap = spectral_gap(n)?;
    Ok(report)
}

/// Checks an arbitrary candidate kernel. The gap is read from the symmetric
/// part `(K + K^T)/2`, which is `K` itself for a valid kernel.
pub fn verify_kernel_matrix(n: usize, k: &DenseMatrix, compute_gap: bool) -> Result<WalkReport> {
    check_dense_n(n)?;
    let states = factorial(n);
    if k.rows() != states || k.cols() != states {
        return Err(Error::DimensionMismatch(format!("kernel must be {states}x{states}")));
    }
    let mu = 1.0 / states as f64;
    let mut row_sum_error: f64 = 0.0;
    let mut reversibility_error: f64 = 0.0;
    let mut invariance_error: f64 = 0.0;
    for x in 0..states {
        let row: f64 = (0..states).map(|y| k.get(x, y)).sum();
        row_sum_error = row_sum_error.max((row - 1.0).abs());
        let inflow: f64 = (0..states).map(|y| k.get(y, x) * mu).sum();
        invariance_error = invariance_error.max((inflow - mu).abs());
        for y in x + 1..states {
            reversibility_error = reversibility_error.max((k.get(x, y) - k.get(y, x)).abs());
        }
    }
    let gap = if compute_gap {
        let mut sym = k.clone();
        for x in 0..states {
            for y in 0..states {
                sym.set(x, y, 0.5 * (k.get(x, y) + k.get(y, x)), 0.0);
            }
        }
        second_eigenvalue_gap(&sym)?
    } else {
        f64::NAN
    };
    Ok(WalkReport {
        n,
        row_sum_error,
        reversibility_error,
        invariance_error,
        gap,
        gap_theory: 2.0 / n as f64,
    })
}

/// Per-state `sum_y (f(x) - f(y))^2 Pi(x, y)`, matrix-free.
fn local_energies(f: &FunctionOnSn) -> Vec<f64> {
    let n = f.n;
    if n < 2 {
        return vec![0.0; f.values.len()];
    }
    let t = n * (n - 1) / 2;
    let table = neighbor_table(n);
    let step = 2.0 / (n * n) as f64;
    (0..f.values.len())
        .map(|x| {
            let fx = f.values[x];
            step * table[x * t..(x + 1) * t].iter().map(|&y| (fx - f.values[y]).powi(2)).sum::<f64>()
        })
        .collect()
}

/// `E(f, f) = 1/2 sum_{x,y} (f(x) - f(y))^2 Pi(x, y) mu(x)`.
pub fn dirichlet_form(f: &FunctionOnSn) -> f64 {
    0.5 * local_energies(f).iter().sum::<f64>() / f.values.len() as f64
}

pub fn variance_mu(f: &FunctionOnSn) -> f64 {
    let mean = f.mean();
    f.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / f.values.len() as f64
}

/// `sqrt(1/2 max_x sum_y (f(x) - f(y))^2 Pi(x, y))`.
pub fn triple_norm(f: &FunctionOnSn) -> f64 {
    (0.5 * local_energies(f).into_iter().fold(0.0, f64::max)).sqrt()
}

/// Spectra of `A(pi)` for every k-set of first entries, keyed by bit mask.
#[derive(Clone, Debug)]
pub struct SubsetSpectra {
    n: usize,
    k: usize,
    /// mask of `{pi_1..pi_k}` per rank
    masks: Vec<u64>,
    spectra: HashMap<u64, Spectrum>,
}

/// Eigen mode: eigenvalues of the principal submatrix. Singular mode:
/// eigenvalues of `A A*` for the row submatrix.
fn observable_spectrum(m: &DenseMatrix, s: &SubsetSample, mode: Mode) -> Result<Spectrum> {
    match mode {
        Mode::Eigen => eigenvalues_hermitian(&principal_submatrix(m, s)?),
        Mode::Singular => eigenvalues_hermitian(&gram(&row_submatrix(m, s)?)),
    }
}

fn ordered_spectrum(m: &DenseMatrix, order: &[usize], mode: Mode) -> Result<Spectrum> {
    match mode {
        Mode::Eigen => eigenvalues_hermitian(&m.select(order, order)),
        Mode::Singular => {
            let cols: Vec<usize> = (0..m.cols()).collect();
            eigenvalues_hermitian(&gram(&m.select(order, &cols)))
        }
    }
}

impl SubsetSpectra {
    /// Builds the cache and checks that the spectrum of `A(pi)`, taken in
    /// `pi` order, matches the one of the sorted index set for every `pi`.
    pub fn build(m: &DenseMatrix, k: usize, mode: Mode) -> Result<Self> {
        let n = validate_input(m, k, mode)?;
        if n > MAX_DENSE_N {
            return Err(Error::invalid(format!("matrix order {n} exceeds {MAX_DENSE_N}")));
        }
        let perms: Vec<Vec<usize>> = (0..factorial(n)).map(|r| unrank_perm(n, r)).collect::<Result<_>>()?;
        let masks: Vec<u64> = perms.iter().map(|p| p[..k].iter().fold(0, |acc, &i| acc | (1u64 << i))).collect();
        let mut spectra = HashMap::new();
        for &mask in &masks {
            if let std::collections::hash_map::Entry::Vacant(slot) = spectra.entry(mask) {
                let indices: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let s = SubsetSample::new(n, indices)?;
                slot.insert(observable_spectrum(m, &s, mode)?);
            }
        }
        let scale = 1.0 + spectra.values().map(|s| s.min().abs().max(s.max().abs())).fold(0.0, f64::max);
        let mismatch = perms
            .par_iter()
            .zip(&masks)
            .map(|(p, mask)| -> Result<Option<Vec<usize>>> {
                let ordered = ordered_spectrum(m, &p[..k], mode)?;
                let canonical = &spectra[mask];
                let worst = ordered.values().iter().zip(canonical.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                Ok((worst > 1e-10 * scale).then(|| p.clone()))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .next();
        if let Some(p) = mismatch {
            return Err(Error::Verification(format!("spectrum of A(pi) depends on the order of {:?}", &p[..k])));
        }
        Ok(SubsetSpectra { n, k, masks, spectra })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `f(pi) = F_{A(pi)}(x)`.
    pub fn observable(&self, x: f64) -> FunctionOnSn {
        let values = self.masks.iter().map(|mask| esd_at(&self.spectra[mask], x)).collect();
        FunctionOnSn { n: self.n, values }
    }

    /// Every value of every cached spectrum, ascending and deduplicated.
    pub fn all_values(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.spectra.values().flat_map(|s| s.values().iter().copied()).collect();
        all.sort_by(f64::total_cmp);
        all.dedup();
        all
    }
}

fn esd_at(s: &Spectrum, x: f64) -> f64 {
    s.values().partition_point(|&v| v <= x) as f64 / s.count() as f64
}

/// `f(pi) = F_{A(pi)}(x)` with `A(pi) = M(pi_1..pi_k; pi_1..pi_k)` (eigen) or
/// the Gram matrix of rows `pi_1..pi_k` (singular).
pub fn esd_observable(m: &DenseMatrix, k: usize, x: f64, mode: Mode) -> Result<FunctionOnSn> {
    Ok(SubsetSpectra::build(m, k, mode)?.observable(x))
}

/// Checks `|||f_x|||^2 <= 4/(kn)` for every `x` in the grid; returns the
/// largest `kn |||f_x|||^2`.
pub fn verify_triple_norm_bound(m: &DenseMatrix, k: usize, x_grid: &[f64], mode: Mode) -> Result<f64> {
    let cache = SubsetSpectra::build(m, k, mode)?;
    triple_norm_bound_with(&cache, x_grid)
}

pub fn triple_norm_bound_with(cache: &SubsetSpectra, x_grid: &[f64]) -> Result<f64> {
    let kn = (cache.k * cache.n) as f64;
    let mut worst: f64 = 0.0;
    let mut offending = Vec::new();
    for &x in x_grid {
        let t2 = triple_norm(&cache.observable(x)).powi(2);
        if t2 > 4.0 / kn + TRIPLE_NORM_SLACK {
            offending.push(x);
        }
        worst = worst.max(kn * t2);
    }
    if !offending.is_empty() {
        return Err(Error::Verification(format!("|||f|||^2 > 4/(kn) at x = {offending:?}")));
    }
    Ok(worst)
}

/// Superlevel measure against `3 exp(-r sqrt(gap) / 2)` at one `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LedouxPoint {
    pub r: f64,
    pub measure: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LedouxReport {
    /// Factor applied so that `|||f|||_inf = 1` (1 for constant `f`).
    pub scale: f64,
    pub gap: f64,
    pub points: Vec<LedouxPoint>,
}

impl LedouxReport {
    pub fn passed(&self) -> bool {
        self.points.iter().all(|p| p.pass)
    }
}

/// Exact `mu(f >= E f + r)` for `f` rescaled to `|||f|||_inf = 1`.
pub fn verify_ledoux_tail(f: &FunctionOnSn, r_grid: &[f64]) -> Result<LedouxReport> {
    let gap = spectral_gap(f.n)?;
    let norm = triple_norm(f);
    let scale = if norm > 0.0 { 1.0 / norm } else { 1.0 };
    let g = f.scaled(scale);
    let mean = g.mean();
    let total = g.values.len() as f64;
    let points = r_grid
        .iter()
        .map(|&r| {
            let measure = g.values.iter().filter(|&&v| v >= mean + r).count() as f64 / total;
            let bound = 3.0 * (-r * gap.sqrt() / 2.0).exp();
            LedouxPoint { r, measure, bound, pass: measure <= bound }
        })
        .collect();
    Ok(LedouxReport { scale, gap, points })
}

/// Effect of one transposition on the sampled submatrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankStep {
    pub rank_diff: usize,
    pub f_gap_max: f64,
    /// `A(sigma) == A(sigma tau)` entrywise.
    pub identical: bool,
}

/// Compares `A(sigma)` and `A(sigma tau)`, both taken in `sigma` order.
pub fn rank_step_check(m: &DenseMatrix, k: usize, sigma: &[usize], tau: (usize, usize), mode: Mode) -> Result<RankStep> {
    let n = validate_input(m, k, mode)?;
    if sigma.len() != n {
        return Err(Error::DimensionMismatch(format!("sigma has length {}, matrix order {n}", sigma.len())));
    }
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || std::mem::replace(&mut seen[s], true) {
            return Err(Error::invalid("sigma is not a permutation"));
        }
    }
    let (i, j) = tau;
    if i == j || i >= n || j >= n {
        return Err(Error::invalid(format!("({i} {j}) is not a transposition of 0..{n}")));
    }
    let mut swapped = sigma.to_vec();
    swapped.swap(i, j);

    let build = |order: &[usize]| match mode {
        Mode::Eigen => m.select(order, order),
        Mode::Singular => m.select(order, &(0..m.cols()).collect::<Vec<_>>()),
    };
    let (a, b) = (build(&sigma[..k]), build(&swapped[..k]));
    let diff = a.sub(&b)?;
    let rank_diff = numerical_rank(&diff, RANK_TOL)?;
    let spectrum = |x: &DenseMatrix| match mode {
        Mode::Eigen => eigenvalues_hermitian(x),
        Mode::Singular => eigenvalues_hermitian(&gram(x)),
    };
    let f_gap_max = sup_distance(&esd(&spectrum(&a)?), &esd(&spectrum(&b)?));
    Ok(RankStep { rank_diff, f_gap_max, identical: a == b })
}
