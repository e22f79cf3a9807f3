//! Named matrices, reproducible random matrices, and the text matrix format.
//!
//! File format: a header line `rows cols field` with `field` one of `real` or
//! `complex`, then one line per row with `cols` whitespace-separated entries.
//! A complex entry is written `re,im` without spaces. Lines starting with
//! `#` are comments.

use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::format::fmt17;
use crate::linalg::{DenseMatrix, Field};
use crate::sampling::SampleRng;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryDist {
    Gaussian,
    /// Symmetric random signs.
    Pm1,
}

impl EntryDist {
    pub fn as_str(self) -> &'static str {
        match self {
            EntryDist::Gaussian => "gaussian",
            EntryDist::Pm1 => "pm1",
        }
    }

    fn draw(self, rng: &mut impl Rng) -> f64 {
        match self {
            EntryDist::Gaussian => rng.sample(StandardNormal),
            EntryDist::Pm1 => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// Description of an input matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum EnsembleSpec {
    RwCovariance { n: usize },
    HalfOnes { n: usize },
    RandomSymmetric { n: usize, seed: u64, dist: EntryDist },
    /// Rectangular matrix with i.i.d. Gaussian entries; not Hermitian.
    RandomGeneral { rows: usize, cols: usize, seed: u64 },
    File { path: PathBuf },
}

impl EnsembleSpec {
    pub fn build(&self) -> Result<DenseMatrix> {
        let positive = |n: usize| {
            if n == 0 {
                Err(Error::invalid("matrix order must be at least 1"))
            } else {
                Ok(n)
            }
        };
        match self {
            EnsembleSpec::RwCovariance { n } => Ok(rw_covariance(positive(*n)?)),
            EnsembleSpec::HalfOnes { n } => Ok(half_ones_diagonal(positive(*n)?)),
            EnsembleSpec::RandomSymmetric { n, seed, dist } => Ok(random_symmetric(positive(*n)?, *seed, *dist)),
            EnsembleSpec::RandomGeneral { rows, cols, seed } => {
                Ok(random_general(positive(*rows)?, positive(*cols)?, *seed))
            }
            EnsembleSpec::File { path } => load_matrix(path),
        }
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnsembleSpec::RwCovariance { n } => write!(f, "rw-covariance(n={n})"),
            EnsembleSpec::HalfOnes { n } => write!(f, "half-ones(n={n})"),
            EnsembleSpec::RandomSymmetric { n, seed, dist } => {
                write!(f, "random-symmetric(n={n}, seed={seed}, dist={})", dist.as_str())
            }
            EnsembleSpec::RandomGeneral { rows, cols, seed } => {
                write!(f, "random-general(rows={rows}, cols={cols}, seed={seed})")
            }
            EnsembleSpec::File { path } => write!(f, "file({})", path.display()),
        }
    }
}

/// Covariance of a simple random walk: entry `(i, j) = min(i, j)`, 1-based.
pub fn rw_covariance(n: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n, n, Field::Real);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, (i.min(j) + 1) as f64, 0.0);
        }
    }
    m
}

/// Diagonal with `floor(n/2)` leading ones, zeros elsewhere.
pub fn half_ones_diagonal(n: usize) -> DenseMatrix {
    let d = n / 2;
    let diag: Vec<f64> = (0..n).map(|i| if i < d { 1.0 } else { 0.0 }).collect();
    DenseMatrix::diagonal(&diag)
}

/// Real symmetric matrix whose upper triangle (row by row) is i.i.d. from
/// `dist`, using the stream `xoshiro256++(seed)`.
pub fn random_symmetric(n: usize, seed: u64, dist: EntryDist) -> DenseMatrix {
    let mut rng = SampleRng::seed_from_u64(seed);
    let mut m = DenseMatrix::zeros(n, n, Field::Real);
    for i in 0..n {
        for j in i..n {
            let v = dist.draw(&mut rng);
            m.set(i, j, v, 0.0);
            m.set(j, i, v, 0.0);
        }
    }
    m
}

/// Real `rows x cols` matrix with i.i.d. standard Gaussian entries.
pub fn random_general(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = SampleRng::seed_from_u64(seed);
    let data = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    DenseMatrix::from_real(rows, cols, data).expect("dimensions are consistent")
}

pub fn write_matrix(m: &DenseMatrix) -> String {
    let mut out = format!("{} {} {}\n", m.rows(), m.cols(), m.field().as_str());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| {
                let (re, im) = m.entry(i, j);
                match m.field() {
                    Field::Real => fmt17(re),
                    Field::Complex => format!("{},{}", fmt17(re), fmt17(im)),
                }
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, message: "missing header".into() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let bad_header = |message: String| Error::Parse { line: hline, message };
    if fields.len() != 3 {
        return Err(bad_header(format!("expected \"rows cols field\", got {header:?}")));
    }
    let dim = |s: &str| -> Result<usize> {
        match s.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(bad_header(format!("invalid dimension {s:?}"))),
        }
    };
    let rows = dim(fields[0])?;
    let cols = dim(fields[1])?;
    let field = match fields[2] {
        "real" => Field::Real,
        "complex" => Field::Complex,
        other => return Err(bad_header(format!("unknown field {other:?}"))),
    };

    let number = |line: usize, s: &str| -> Result<f64> {
        let v: f64 = s.parse().map_err(|_| Error::Parse { line, message: format!("cannot parse number {s:?}") })?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Parse { line, message: format!("non-finite entry {s:?}") })
        }
    };

    let mut data = Vec::with_capacity(rows * cols * if field == Field::Complex { 2 } else { 1 });
    let mut seen = 0;
    for (line, text) in lines {
        if seen == rows {
            return Err(Error::Parse { line, message: format!("more than {rows} data rows") });
        }
        let entries: Vec<&str> = text.split_whitespace().collect();
        if entries.len() != cols {
            return Err(Error::Parse { line, message: format!("expected {cols} entries, found {}", entries.len()) });
        }
        for e in entries {
            match field {
                Field::Real => data.push(number(line, e)?),
                Field::Complex => {
                    let (re, im) = e
                        .split_once(',')
                        .ok_or_else(|| Error::Parse { line, message: format!("complex entry {e:?} is not re,im") })?;
                    data.push(number(line, re)?);
                    data.push(number(line, im)?);
                }
            }
        }
        seen += 1;
    }
    if seen != rows {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            message: format!("expected {rows} data rows, found {seen}"),
        });
    }
    DenseMatrix::new(rows, cols, field, data)
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn save_matrix(m: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_matrix(m))?;
    Ok(())
}
