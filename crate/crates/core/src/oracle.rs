//! Exhaustive computations over all `C(n, k)` subsets, and the closed-form
//! hypergeometric analysis of the half-ones example.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::format::{fmt17, num};
use crate::linalg::{DenseMatrix, Spectrum};
use crate::montecarlo::{self, theorem1_tail_bound, validate_input, Mode, TailCurve};
use crate::sampling::SubsetSample;
use crate::spectra::{esd, quantile_grid, sup_distance, StepCdf};
use crate::{Error, Result};

/// Default limit on the number of subsets an exact computation may visit.
pub const ENUMERATION_CAP: u128 = 2_000_000;

/// Atoms of an [`ExactDistribution`] closer than this are merged.
pub const ATOM_MERGE_TOL: f64 = 1e-12;

const BLOCK: usize = 4096;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c * (n - i) / (i + 1) is exact since c * (n - i) = C(n, i+1) * (i + 1)
        c = match c.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    c
}

/// Lexicographic iterator over the k-subsets of `{0, .., n-1}`.
#[derive(Clone, Debug)]
pub struct Subsets {
    n: usize,
    next: Option<Vec<usize>>,
}

impl Iterator for Subsets {
    type Item = SubsetSample;

    fn next(&mut self) -> Option<SubsetSample> {
        let current = self.next.take()?;
        let k = current.len();
        let mut succ = current.clone();
        // rightmost position that can still move right
        if let Some(i) = (0..k).rev().find(|&i| succ[i] < self.n - k + i) {
            succ[i] += 1;
            for j in i + 1..k {
                succ[j] = succ[j - 1] + 1;
            }
            self.next = Some(succ);
        }
        Some(SubsetSample::from_sorted_unchecked(self.n, current))
    }
}

/// All k-subsets in lexicographic order, refusing when there are more than
/// [`ENUMERATION_CAP`].
pub fn enumerate_subsets(n: usize, k: usize) -> Result<Subsets> {
    enumerate_subsets_with_cap(n, k, ENUMERATION_CAP)
}

pub fn enumerate_subsets_with_cap(n: usize, k: usize, cap: u128) -> Result<Subsets> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k = {k} must satisfy 1 <= k <= n = {n}")));
    }
    let count = binomial(n, k);
    if count > cap {
        return Err(Error::EnumerationCap { count, cap });
    }
    Ok(Subsets { n, next: Some((0..k).collect()) })
}

/// Spectra of every subset's submatrix, stored flat in lexicographic order.
#[derive(Clone, Debug)]
pub struct ExactEnsemble {
    mode: Mode,
    n: usize,
    k: usize,
    stride: usize,
    values: Vec<f64>,
}

impl ExactEnsemble {
    pub fn build(m: &DenseMatrix, k: usize, mode: Mode) -> Result<Self> {
        Self::build_with_cap(m, k, mode, ENUMERATION_CAP)
    }

    pub fn build_with_cap(m: &DenseMatrix, k: usize, mode: Mode, cap: u128) -> Result<Self> {
        let n = validate_input(m, k, mode)?;
        let mut subsets = enumerate_subsets_with_cap(n, k, cap)?;
        let mut values = Vec::new();
        let mut stride = 0;
        loop {
            let block: Vec<SubsetSample> = subsets.by_ref().take(BLOCK).collect();
            if block.is_empty() {
                break;
            }
            let spectra: Vec<Spectrum> =
                block.par_iter().map(|s| montecarlo::subset_spectrum(m, s, mode)).collect::<Result<_>>()?;
            for s in spectra {
                stride = s.count();
                values.extend_from_slice(s.values());
            }
        }
        Ok(ExactEnsemble { mode, n, k, stride, values })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn subset_count(&self) -> usize {
        self.values.len() / self.stride
    }

    /// Ascending spectrum of the `i`-th subset in lexicographic order.
    pub fn spectrum(&self, i: usize) -> &[f64] {
        &self.values[i * self.stride..(i + 1) * self.stride]
    }

    fn subset_esd(&self, i: usize) -> StepCdf {
        // spectra were validated on construction
        esd(&Spectrum::new(self.spectrum(i).to_vec()).expect("validated spectrum"))
    }

    /// All spectral values of all subsets, ascending.
    pub fn pooled_values(&self) -> Vec<f64> {
        let mut all = self.values.clone();
        all.sort_by(f64::total_cmp);
        all
    }

    /// Exact `F = E F_A`: every subset has the same number of values, so the
    /// equal-weight average of the subset ESDs is the ESD of the pooled values.
    pub fn reference(&self) -> StepCdf {
        esd(&Spectrum::new(self.values.clone()).expect("validated spectrum"))
    }

    /// `sup_distance(F_A, reference)` for every subset, in lexicographic order.
    pub fn supnorm_values(&self, reference: &StepCdf) -> Vec<f64> {
        (0..self.subset_count()).into_par_iter().map(|i| sup_distance(&self.subset_esd(i), reference)).collect()
    }

    pub fn supnorm_distribution(&self, reference: &StepCdf) -> ExactDistribution {
        ExactDistribution::from_equally_likely(self.supnorm_values(reference))
    }

    /// Exact `P(|F_A(x) - F(x)| >= r)` with `F = reference`.
    pub fn pointwise_tail(&self, reference: &StepCdf, x: f64, r: f64) -> f64 {
        let fx = reference.eval(x);
        let hits = (0..self.subset_count())
            .filter(|&i| {
                let below = self.spectrum(i).partition_point(|&v| v <= x);
                (below as f64 / self.stride as f64 - fx).abs() >= r
            })
            .count();
        hits as f64 / self.subset_count() as f64
    }
}

/// Finite law given by `(value, probability)` atoms with increasing values.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactDistribution {
    atoms: Vec<(f64, f64)>,
}

impl ExactDistribution {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("distribution needs at least one atom"));
        }
        if atoms.iter().any(|&(v, p)| !v.is_finite() || !(p > 0.0)) {
            return Err(Error::invalid("atoms need finite values and positive probabilities"));
        }
        if atoms.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::invalid("atom values must be strictly increasing"));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(ExactDistribution { atoms })
    }

    /// Law of one of `values` picked uniformly; values within
    /// [`ATOM_MERGE_TOL`] of the first value of a run share an atom.
    pub fn from_equally_likely(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        let total = values.len() as f64;
        let mut atoms: Vec<(f64, f64)> = Vec::new();
        let mut i = 0;
        while i < values.len() {
            let v = values[i];
            let start = i;
            while i < values.len() && values[i] - v <= ATOM_MERGE_TOL {
                i += 1;
            }
            atoms.push((v, (i - start) as f64 / total));
        }
        ExactDistribution { atoms }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(v, p)| v * p).sum()
    }

    /// `P(V >= t)`.
    pub fn tail(&self, t: f64) -> f64 {
        let start = self.atoms.partition_point(|a| a.0 < t);
        self.atoms[start..].iter().map(|a| a.1).sum::<f64>().min(1.0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,probability\n");
        for &(v, p) in &self.atoms {
            out.push_str(&format!("{},{}\n", fmt17(v), fmt17(p)));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "atoms": self.atoms.iter().map(|&(v, p)| json!([num(v), num(p)])).collect::<Vec<_>>(),
            "mean": num(self.mean()),
        })
    }
}

/// Exact `F = E F_A` by enumeration.
pub fn exact_f(m: &DenseMatrix, k: usize, mode: Mode) -> Result<StepCdf> {
    Ok(ExactEnsemble::build(m, k, mode)?.reference())
}

/// Exact law of `||F_A - F||_inf` against the exact `F`.
pub fn exact_supnorm_distribution(m: &DenseMatrix, k: usize, mode: Mode) -> Result<ExactDistribution> {
    let ensemble = ExactEnsemble::build(m, k, mode)?;
    Ok(ensemble.supnorm_distribution(&ensemble.reference()))
}

/// Exact `P(|F_A(x) - F(x)| >= r)`.
pub fn exact_pointwise_tail(m: &DenseMatrix, k: usize, x: f64, r: f64, mode: Mode) -> Result<f64> {
    let ensemble = ExactEnsemble::build(m, k, mode)?;
    Ok(ensemble.pointwise_tail(&ensemble.reference(), x, r))
}

/// Exact tail `P(||F_A - F|| >= k^(-1/2) + r)` on a grid, next to the bound.
pub fn exact_tail_curve(dist: &ExactDistribution, k: usize, r_grid: &[f64], n_subsets: usize) -> Result<TailCurve> {
    montecarlo::validate_r_grid(r_grid)?;
    let offset = 1.0 / (k as f64).sqrt();
    Ok(TailCurve {
        k,
        r_grid: r_grid.to_vec(),
        empirical: r_grid.iter().map(|&r| dist.tail(offset + r)).collect(),
        bound: r_grid.iter().map(|&r| theorem1_tail_bound(k, r)).collect(),
        stderr: vec![0.0; r_grid.len()],
        n_samples: n_subsets,
    })
}

/// pmf of the number of marked items among `k` draws without replacement
/// from `n` items of which `d` are marked, indexed by `h = 0..=k`.
pub fn hypergeometric_pmf(n: usize, d: usize, k: usize) -> Result<Vec<f64>> {
    if d > n || k > n {
        return Err(Error::invalid(format!("hypergeometric parameters need d, k <= n (n={n}, d={d}, k={k})")));
    }
    let lo = k.saturating_sub(n - d);
    let hi = k.min(d);
    // ratio p(h+1)/p(h)
    let ratio = |h: usize| ((d - h) as f64 * (k - h) as f64) / ((h + 1) as f64 * (n - d - k + h + 1) as f64);
    let mode = ((k + 1) as f64 * (d + 1) as f64 / (n + 2) as f64).floor() as usize;
    let mode = mode.clamp(lo, hi);

    let mut pmf = vec![0.0; k + 1];
    pmf[mode] = 1.0;
    for h in mode..hi {
        pmf[h + 1] = pmf[h] * ratio(h);
    }
    for h in (lo..mode).rev() {
        pmf[h] = pmf[h + 1] / ratio(h);
    }
    let total: f64 = pmf.iter().sum();
    pmf.iter_mut().for_each(|p| *p /= total);
    Ok(pmf)
}

fn halfones_check(n: usize, k: usize) -> Result<usize> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k = {k} must satisfy 1 <= k <= n = {n}")));
    }
    Ok(n / 2)
}

/// Exact `E ||F_A - F||_inf` for `half_ones_diagonal(n)`: the two CDFs
/// differ only on `[0, 1)`, by `|d/n - H/k|` with `H` hypergeometric.
pub fn halfones_exact_mean(n: usize, k: usize) -> Result<f64> {
    let d = halfones_check(n, k)?;
    let pmf = hypergeometric_pmf(n, d, k)?;
    let p = d as f64 / n as f64;
    Ok(pmf.iter().enumerate().map(|(h, w)| w * (p - h as f64 / k as f64).abs()).sum())
}

/// Exact `F` for `half_ones_diagonal(n)`: mass `1 - d/n` at 0, `d/n` at 1.
pub fn halfones_exact_f(n: usize, k: usize) -> Result<StepCdf> {
    let d = halfones_check(n, k)?;
    if d == 0 {
        return Ok(StepCdf::point_mass(0.0));
    }
    StepCdf::new(vec![0.0, 1.0], vec![1.0 - d as f64 / n as f64, 1.0])
}

/// Outcome of the quantile-grid chaining bound `||G - F|| <= 1/l + delta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainingCheck {
    pub delta: f64,
    pub bound: f64,
    pub distance: f64,
    pub holds: bool,
}

/// `delta` is the largest one-sided discrepancy of `G` against `F` at the
/// `l`-quantile grid of `F`, from the right and from the left.
pub fn chaining_check(f: &StepCdf, g: &StepCdf, l: usize) -> Result<ChainingCheck> {
    let grid = quantile_grid(f, l)?;
    let delta = grid
        .iter()
        .map(|&t| (g.eval(t) - f.eval(t)).abs().max((g.eval_left(t) - f.eval_left(t)).abs()))
        .fold(0.0, f64::max);
    let bound = 1.0 / l as f64 + delta;
    let distance = sup_distance(g, f);
    Ok(ChainingCheck { delta, bound, distance, holds: distance <= bound + 1e-12 })
}
