//! Uniform k-subsets, submatrix extraction, and reproducible seed streams.
//!
//! Sample `i` of a run draws from its own xoshiro256++ stream, seeded from
//! `derive_sample_seed(master, i)`. Nothing about the stream depends on
//! which worker runs the sample or in what order, which is what makes
//! parallel Monte Carlo bit-reproducible.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::linalg::DenseMatrix;
use crate::{Error, Result};

/// Per-sample generator.
pub type SampleRng = Xoshiro256PlusPlus;

/// Name recorded in output metadata.
pub const PRNG_NAME: &str = "xoshiro256++ seeded by four splitmix64 outputs; \
    stream seed = mix(master ^ mix(i + 1)) with mix the splitmix64 finalizer";

/// The splitmix64 output function applied to a single state advance.
pub fn splitmix64_mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_sample_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64_mix(master_seed ^ splitmix64_mix(index.wrapping_add(1)))
}

/// Counter-style seed plan: stream `i` is a pure function of `(master, i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedPlan {
    pub master_seed: u64,
}

impl SeedPlan {
    pub fn new(master_seed: u64) -> Self {
        SeedPlan { master_seed }
    }

    pub fn seed(&self, index: u64) -> u64 {
        derive_sample_seed(self.master_seed, index)
    }

    pub fn stream(&self, index: u64) -> SampleRng {
        SampleRng::seed_from_u64(self.seed(index))
    }
}

/// Sorted k-subset of `{0, .., n-1}`; printed 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsetSample {
    n: usize,
    indices: Vec<usize>,
}

impl SubsetSample {
    /// Sorts `indices` (0-based) and checks they are distinct and below `n`.
    pub fn new(n: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if indices.is_empty() || indices.len() > n {
            return Err(Error::invalid(format!("subset size {} not in 1..={n}", indices.len())));
        }
        if indices.windows(2).any(|w| w[0] == w[1]) || indices[indices.len() - 1] >= n {
            return Err(Error::invalid("subset indices must be distinct and in range"));
        }
        Ok(SubsetSample { n, indices })
    }

    pub(crate) fn from_sorted_unchecked(n: usize, indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        SubsetSample { n, indices }
    }

    pub fn full(n: usize) -> Self {
        SubsetSample { n, indices: (0..n).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    /// 0-based indices, ascending.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i + 1).collect()
    }

    /// Bit mask of the selected indices (`n <= 64`).
    pub fn mask(&self) -> u64 {
        debug_assert!(self.n <= 64);
        self.indices.iter().fold(0, |m, &i| m | (1 << i))
    }
}

/// Uniform integer in `0..range` from exactly one 64-bit draw
/// (multiply-shift; bias at most `range / 2^64`).
#[inline]
fn bounded(rng: &mut impl RngCore, range: usize) -> usize {
    ((rng.next_u64() as u128 * range as u128) >> 64) as usize
}

/// Uniform k-subset of `{0, .., n-1}` from the first `k` steps of a
/// Fisher-Yates shuffle. Always consumes exactly `k` draws.
pub fn random_k_subset(n: usize, k: usize, rng: &mut impl RngCore) -> Result<SubsetSample> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k = {k} must satisfy 1 <= k <= n = {n}")));
    }
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + bounded(rng, n - i);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool.sort_unstable();
    Ok(SubsetSample::from_sorted_unchecked(n, pool))
}

/// `M(i_1..i_k; i_1..i_k)`.
pub fn principal_submatrix(m: &DenseMatrix, s: &SubsetSample) -> Result<DenseMatrix> {
    if !m.is_square() || m.rows() != s.n {
        return Err(Error::DimensionMismatch(format!(
            "subset of order {} applied to a {}x{} matrix",
            s.n,
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.select(&s.indices, &s.indices))
}

/// `M(i_1..i_k; 1..cols)`.
pub fn row_submatrix(m: &DenseMatrix, s: &SubsetSample) -> Result<DenseMatrix> {
    if m.rows() != s.n {
        return Err(Error::DimensionMismatch(format!(
            "row subset of order {} applied to a matrix with {} rows",
            s.n,
            m.rows()
        )));
    }
    let cols: Vec<usize> = (0..m.cols()).collect();
    Ok(m.select(&s.indices, &cols))
}
