//! Step CDFs: empirical spectral distributions, exact Kolmogorov distance,
//! mixtures, quantile grids, and the two-sample KS test.

use serde_json::{json, Value};

use crate::format::{fmt17, num, num_array};
use crate::linalg::Spectrum;
use crate::{Error, Result};

/// Right-continuous step distribution function.
///
/// `eval(x)` is `cum[i]` for the largest `i` with `jumps[i] <= x`, and 0
/// below the first jump.
#[derive(Clone, Debug, PartialEq)]
pub struct StepCdf {
    jumps: Vec<f64>,
    cum: Vec<f64>,
}

impl StepCdf {
    /// Validates and wraps jump locations and cumulative values.
    pub fn new(jumps: Vec<f64>, cum: Vec<f64>) -> Result<Self> {
        if jumps.is_empty() || jumps.len() != cum.len() {
            return Err(Error::invalid("step CDF needs equally many jumps and values, at least one"));
        }
        if jumps.iter().chain(&cum).any(|v| !v.is_finite()) {
            return Err(Error::invalid("step CDF has a non-finite value"));
        }
        if jumps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("jump locations must be strictly increasing"));
        }
        if cum.windows(2).any(|w| w[0] > w[1]) || cum[0] <= 0.0 {
            return Err(Error::invalid("cumulative values must be positive and nondecreasing"));
        }
        if (cum[cum.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("total mass {} differs from 1", cum[cum.len() - 1])));
        }
        Ok(StepCdf { jumps, cum })
    }

    /// Single atom at `x`.
    pub fn point_mass(x: f64) -> Self {
        StepCdf { jumps: vec![x], cum: vec![1.0] }
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn cum(&self) -> &[f64] {
        &self.cum
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.jumps.partition_point(|&j| j <= x) {
            0 => 0.0,
            i => self.cum[i - 1],
        }
    }

    /// Left limit `F(x-)`.
    pub fn eval_left(&self, x: f64) -> f64 {
        match self.jumps.partition_point(|&j| j < x) {
            0 => 0.0,
            i => self.cum[i - 1],
        }
    }

    /// Mass placed exactly at each jump.
    pub fn masses(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let prev = std::iter::once(0.0).chain(self.cum.iter().copied());
        self.jumps.iter().zip(&self.cum).zip(prev).map(|((&x, &c), p)| (x, c - p))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,F\n");
        for (x, c) in self.jumps.iter().zip(&self.cum) {
            out.push_str(&fmt17(*x));
            out.push(',');
            out.push_str(&fmt17(*c));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == "x,F" => {}
            Some((i, _)) => return Err(Error::Parse { line: i + 1, message: "expected header \"x,F\"".into() }),
            None => return Err(Error::Parse { line: 1, message: "empty input".into() }),
        }
        let (mut jumps, mut cum) = (Vec::new(), Vec::new());
        for (i, line) in lines {
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| Error::Parse { line: i + 1, message: format!("{s:?}: {e}") })
            };
            let (x, c) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse { line: i + 1, message: "expected two fields".into() })?;
            jumps.push(parse(x)?);
            cum.push(parse(c)?);
        }
        StepCdf::new(jumps, cum)
    }

    pub fn to_json(&self) -> Value {
        json!({ "jumps": num_array(&self.jumps), "cum": num_array(&self.cum) })
    }
}

/// Two-sample Kolmogorov-Smirnov outcome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    /// `sqrt(a b / (a + b)) * statistic`
    pub lambda: f64,
    pub p_value: f64,
}

impl KsResult {
    pub fn to_json(&self) -> Value {
        json!({
            "statistic": num(self.statistic),
            "lambda": num(self.lambda),
            "p_value": num(self.p_value),
            "distribution": "asymptotic Kolmogorov, no small-sample correction",
        })
    }
}

/// Empirical spectral distribution `#{i: lambda_i <= x} / count`.
pub fn esd(s: &Spectrum) -> StepCdf {
    let values = s.values();
    let count = values.len();
    let mut jumps = Vec::new();
    let mut cum = Vec::new();
    let mut i = 0;
    while i < count {
        let v = values[i];
        while i < count && values[i] == v {
            i += 1;
        }
        jumps.push(v);
        cum.push(i as f64 / count as f64);
    }
    StepCdf { jumps, cum }
}

/// Exact `sup_x |F(x) - G(x)|`.
///
/// Between consecutive jumps of one function the other is monotone, so the
/// supremum is attained at a jump of either function, from the left or the
/// right. Scanning the jumps of the function with fewer of them and
/// evaluating both one-sided differences there gives the same value as the
/// full union scan, in `O(m log n)`.
pub fn sup_distance(f: &StepCdf, g: &StepCdf) -> f64 {
    let (few, many) = if f.jumps.len() <= g.jumps.len() { (f, g) } else { (g, f) };
    let mut worst: f64 = 0.0;
    let mut prev = 0.0;
    for (&x, &c) in few.jumps.iter().zip(&few.cum) {
        worst = worst.max((c - many.eval(x)).abs());
        worst = worst.max((prev - many.eval_left(x)).abs());
        prev = c;
    }
    worst
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Finite mixture `sum_i w_i F_i`.
///
/// Inputs with zero weight contribute no jumps.
pub fn average_cdfs(cdfs: &[StepCdf], weights: &[f64]) -> Result<StepCdf> {
    if cdfs.is_empty() {
        return Err(Error::invalid("cannot average an empty list of CDFs"));
    }
    if cdfs.len() != weights.len() {
        return Err(Error::DimensionMismatch(format!("{} CDFs but {} weights", cdfs.len(), weights.len())));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::invalid("weights must be finite and nonnegative"));
    }
    let mut total = CompensatedSum::default();
    weights.iter().for_each(|&w| total.add(w));
    if (total.value() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("weights sum to {}, not 1", total.value())));
    }

    let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(cdfs.iter().map(|c| c.jumps.len()).sum());
    for (cdf, &w) in cdfs.iter().zip(weights) {
        if w > 0.0 {
            atoms.extend(cdf.masses().map(|(x, m)| (x, w * m)));
        }
    }
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut jumps: Vec<f64> = Vec::new();
    let mut cum: Vec<f64> = Vec::new();
    let mut acc = CompensatedSum::default();
    for (x, m) in atoms {
        acc.add(m);
        if jumps.last() == Some(&x) {
            *cum.last_mut().unwrap() = acc.value();
        } else {
            jumps.push(x);
            cum.push(acc.value());
        }
    }
    // rounding in an individual mass can make a later partial sum dip below
    // an earlier one by an ulp
    for i in 1..cum.len() {
        if cum[i] < cum[i - 1] {
            cum[i] = cum[i - 1];
        }
    }
    StepCdf::new(jumps, cum)
}

/// Asymptotic Kolmogorov survival function
/// `Q(l) = 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 l^2)`, with `Q(0) = 1`.
///
/// For `l < 0.2` the alternating series converges slowly; the equivalent
/// theta-function form `1 - sqrt(2 pi)/l sum_{j>=1} exp(-(2j-1)^2 pi^2 / (8 l^2))`
/// is used there instead.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let q = if lambda < 0.2 {
        let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * lambda * lambda);
        let mut s = 0.0;
        for j in 1.. {
            let odd = (2 * j - 1) as f64;
            let term = (-odd * odd * c).exp();
            s += term;
            if term < 1e-12 * s.max(f64::MIN_POSITIVE) || term == 0.0 {
                break;
            }
        }
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s
    } else {
        let mut s = 0.0;
        for j in 1.. {
            let jf = j as f64;
            let term = (-2.0 * jf * jf * lambda * lambda).exp();
            if term < 1e-12 {
                break;
            }
            if j % 2 == 1 {
                s += term;
            } else {
                s -= term;
            }
        }
        2.0 * s
    };
    q.clamp(0.0, 1.0)
}

/// Two-sample KS test between CDFs built from `a` and `b` observations.
pub fn ks_two_sample(f: &StepCdf, a: usize, g: &StepCdf, b: usize) -> Result<KsResult> {
    if a == 0 || b == 0 {
        return Err(Error::invalid("KS sample sizes must be positive"));
    }
    let statistic = sup_distance(f, g);
    let (a, b) = (a as f64, b as f64);
    let lambda = (a * b / (a + b)).sqrt() * statistic;
    Ok(KsResult { statistic, lambda, p_value: kolmogorov_q(lambda) })
}

/// `t_i = inf{x : F(x) >= i/l}` for `i = 1..l-1`.
pub fn quantile_grid(f: &StepCdf, l: usize) -> Result<Vec<f64>> {
    if l < 2 {
        return Err(Error::invalid("quantile grid needs l >= 2"));
    }
    let last = f.jumps.len() - 1;
    Ok((1..l)
        .map(|i| {
            let level = i as f64 / l as f64;
            let idx = f.cum.partition_point(|&c| c < level).min(last);
            f.jumps[idx]
        })
        .collect())
}
