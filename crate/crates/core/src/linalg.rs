//! Dense matrices and from-scratch spectral decompositions.
//!
//! Everything here targets orders up to a few hundred. Eigenvalues of real
//! symmetric matrices come from cyclic Jacobi rotations; complex Hermitian
//! matrices go through the real symmetric embedding `[[X, -Y], [Y, X]]`, which
//! doubles every eigenvalue's multiplicity and leaves the spectral
//! distribution unchanged.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative off-diagonal Frobenius norm at which a Jacobi run is converged.
pub const JACOBI_TOL: f64 = 1e-12;
/// Hard cap on full Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Relative asymmetry accepted by [`eigenvalues_hermitian`].
pub const HERMITIAN_REL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    fn width(self) -> usize {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

/// Row-major dense matrix over the reals or the complex numbers.
///
/// Complex entries are stored as interleaved `(re, im)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, field: Field, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!("matrix dimensions must be positive, got {rows}x{cols}")));
        }
        let expected = rows * cols * field.width();
        if data.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} {} matrix needs {expected} values, got {}",
                field.as_str(),
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("non-finite entry at storage offset {pos}")));
        }
        Ok(DenseMatrix { rows, cols, field, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Self::new(rows, cols, Field::Real, data)
    }

    /// Builds a real matrix from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != ncols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(nrows, ncols, Field::Real, data)
    }

    /// Builds a complex matrix from rows of `(re, im)` pairs.
    pub fn from_complex_rows<R: AsRef<[(f64, f64)]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != ncols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().flat_map(|&(re, im)| [re, im]))
            .collect();
        Self::new(nrows, ncols, Field::Complex, data)
    }

    pub fn zeros(rows: usize, cols: usize, field: Field) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        DenseMatrix { rows, cols, field, data: vec![0.0; rows * cols * field.width()] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n, Field::Real);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Raw storage in row-major order.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Entry `(i, j)` as `(re, im)`; the imaginary part is 0 for real matrices.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> (f64, f64) {
        debug_assert!(i < self.rows && j < self.cols);
        match self.field {
            Field::Real => (self.data[i * self.cols + j], 0.0),
            Field::Complex => {
                let o = 2 * (i * self.cols + j);
                (self.data[o], self.data[o + 1])
            }
        }
    }

    /// Real part of entry `(i, j)`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entry(i, j).0
    }

    /// Sets entry `(i, j)`. The imaginary part is ignored for real matrices.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, re: f64, im: f64) {
        match self.field {
            Field::Real => self.data[i * self.cols + j] = re,
            Field::Complex => {
                let o = 2 * (i * self.cols + j);
                self.data[o] = re;
                self.data[o + 1] = im;
            }
        }
    }

    /// Largest entry modulus; 0 for the zero matrix.
    pub fn max_abs(&self) -> f64 {
        match self.field {
            Field::Real => self.data.iter().fold(0.0, |m, x| m.max(x.abs())),
            Field::Complex => self.data.chunks_exact(2).fold(0.0, |m, c| m.max(c[0].hypot(c[1]))),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.cols, self.rows, self.field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let (re, im) = self.entry(i, j);
                out.set(j, i, re, -im);
            }
        }
        out
    }

    pub fn to_complex(&self) -> DenseMatrix {
        match self.field {
            Field::Complex => self.clone(),
            Field::Real => DenseMatrix {
                rows: self.rows,
                cols: self.cols,
                field: Field::Complex,
                data: self.data.iter().flat_map(|&x| [x, 0.0]).collect(),
            },
        }
    }

    /// `self - other`; the result is complex if either operand is.
    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot subtract {}x{} from {}x{}",
                other.rows, other.cols, self.rows, self.cols
            )));
        }
        let (a, b) = if self.field == other.field {
            (self.clone(), other.clone())
        } else {
            (self.to_complex(), other.to_complex())
        };
        let data = a.data.iter().zip(&b.data).map(|(x, y)| x - y).collect();
        Ok(DenseMatrix { data, ..a })
    }

    /// `self + c I`.
    pub fn shifted(&self, c: f64) -> Result<DenseMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            let (re, im) = out.entry(i, i);
            out.set(i, i, re + c, im);
        }
        Ok(out)
    }

    /// `P M P^T` where `P` sends basis vector `perm[i]` to `i`, i.e. the
    /// result has entry `(a, b) = M[perm[a]][perm[b]]`.
    pub fn permuted_symmetric(&self, perm: &[usize]) -> Result<DenseMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        if perm.len() != self.rows {
            return Err(Error::DimensionMismatch("permutation length differs from matrix order".into()));
        }
        let n = self.rows;
        let mut out = DenseMatrix::zeros(n, n, self.field);
        for a in 0..n {
            for b in 0..n {
                let (re, im) = self.entry(perm[a], perm[b]);
                out.set(a, b, re, im);
            }
        }
        Ok(out)
    }

    /// Submatrix keeping the listed rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(rows.len(), cols.len(), self.field);
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                let (re, im) = self.entry(i, j);
                out.set(a, b, re, im);
            }
        }
        out
    }
}

/// Eigenvalues or singular values, sorted ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts `values` ascending. Fails on an empty or non-finite input.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("spectrum contains a non-finite value"));
        }
        values.sort_by(f64::total_cmp);
        Ok(Spectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Drops the `m` largest values. Fails if nothing would remain.
    pub fn without_top(&self, m: usize) -> Result<Spectrum> {
        if m >= self.values.len() {
            return Err(Error::invalid(format!(
                "cannot exclude {m} of {} values",
                self.values.len()
            )));
        }
        Ok(Spectrum { values: self.values[..self.values.len() - m].to_vec() })
    }
}

fn max_asymmetry(m: &DenseMatrix) -> f64 {
    let n = m.rows;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let (a, b) = m.entry(i, j);
            let (c, d) = m.entry(j, i);
            // m[i][j] - conj(m[j][i])
            worst = worst.max((a - c).hypot(b + d));
        }
    }
    worst
}

pub fn is_hermitian(m: &DenseMatrix, tol: f64) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    Ok(max_asymmetry(m) <= tol)
}

/// Errors unless `m` is square and Hermitian to within
/// `HERMITIAN_REL_TOL * max|m_ij|`.
pub fn check_hermitian(m: &DenseMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let max_abs = m.max_abs();
    let scale = if max_abs == 0.0 { 1.0 } else { max_abs };
    let tol = HERMITIAN_REL_TOL * scale;
    let asym = max_asymmetry(m);
    if asym > tol {
        return Err(Error::NotHermitian { asymmetry: asym, tol });
    }
    Ok(())
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues_hermitian(m: &DenseMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    check_hermitian(m)?;
    let n = m.rows;
    match m.field {
        Field::Real => {
            let mut a = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    a[i * n + j] = 0.5 * (m.get(i, j) + m.get(j, i));
                }
            }
            Spectrum::new(jacobi_eigenvalues(&mut a, n)?)
        }
        Field::Complex => {
            let size = 2 * n;
            let mut a = vec![0.0; size * size];
            for i in 0..n {
                for j in 0..n {
                    let (x1, y1) = m.entry(i, j);
                    let (x2, y2) = m.entry(j, i);
                    let x = 0.5 * (x1 + x2);
                    let y = 0.5 * (y1 - y2);
                    a[i * size + j] = x;
                    a[(i + n) * size + (j + n)] = x;
                    a[i * size + (j + n)] = -y;
                    a[(i + n) * size + j] = y;
                }
            }
            let mut doubled = jacobi_eigenvalues(&mut a, size)?;
            doubled.sort_by(f64::total_cmp);
            let halved = doubled.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect();
            Spectrum::new(halved)
        }
    }
}

/// Cyclic Jacobi on a full row-major symmetric array, returning the
/// (unsorted) diagonal once the off-diagonal mass is negligible.
fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Result<Vec<f64>> {
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = JACOBI_TOL * total;
    for sweep in 0..=JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= target {
            return Ok((0..n).map(|i| a[i * n + i]).collect());
        }
        if sweep == JACOBI_MAX_SWEEPS {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // entries this small no longer move either diagonal element
                if sweep > 3 && app.abs() + 100.0 * apq.abs() == app.abs() && aqq.abs() + 100.0 * apq.abs() == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for j in 0..n {
                    if j == p || j == q {
                        continue;
                    }
                    let ajp = a[p * n + j];
                    let ajq = a[q * n + j];
                    let np = c * ajp - s * ajq;
                    let nq = s * ajp + c * ajq;
                    a[p * n + j] = np;
                    a[q * n + j] = nq;
                    a[j * n + p] = np;
                    a[j * n + q] = nq;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS })
}

/// `A A*`, mirrored from the upper triangle so it is exactly Hermitian.
pub fn gram(a: &DenseMatrix) -> DenseMatrix {
    let (r, c) = (a.rows, a.cols);
    let mut out = DenseMatrix::zeros(r, r, a.field);
    for i in 0..r {
        for j in i..r {
            let (mut re, mut im) = (0.0, 0.0);
            for l in 0..c {
                let (x1, y1) = a.entry(i, l);
                let (x2, y2) = a.entry(j, l);
                // (x1 + i y1)(x2 - i y2)
                re += x1 * x2 + y1 * y2;
                im += y1 * x2 - x1 * y2;
            }
            if i == j {
                im = 0.0;
            }
            out.set(i, j, re, im);
            out.set(j, i, re, -im);
        }
    }
    out
}

/// Singular values as square roots of the eigenvalues of `A A*`.
///
/// A tall input is transposed first, so the result has `min(rows, cols)`
/// values.
pub fn singular_values(a: &DenseMatrix) -> Result<Spectrum> {
    let wide;
    let a = if a.rows > a.cols {
        wide = a.adjoint();
        &wide
    } else {
        a
    };
    let eig = eigenvalues_hermitian(&gram(a))?;
    // A A* is PSD; negative eigenvalues are rounding noise of order eps * |A|^2
    let values = eig.values().iter().map(|&v| v.max(0.0).sqrt()).collect();
    Spectrum::new(values)
}

/// Number of singular values above `rel_tol * max(rows, cols) * sigma_max`.
///
/// Singular values are read off the Hermitian dilation `[[0, A], [A*, 0]]`,
/// whose eigenvalues are `±sigma_i` plus zeros. Unlike the Gram route this
/// keeps small singular values accurate to working precision, which matters
/// for rank decisions.
pub fn numerical_rank(a: &DenseMatrix, rel_tol: f64) -> Result<usize> {
    if rel_tol < 0.0 {
        return Err(Error::invalid("rel_tol must be nonnegative"));
    }
    if a.max_abs() == 0.0 {
        return Ok(0);
    }
    let (r, c) = (a.rows, a.cols);
    let size = r + c;
    let mut h = DenseMatrix::zeros(size, size, a.field);
    for i in 0..r {
        for j in 0..c {
            let (re, im) = a.entry(i, j);
            h.set(i, r + j, re, im);
            h.set(r + j, i, re, -im);
        }
    }
    let eig = eigenvalues_hermitian(&h)?;
    let sigma_max = eig.max();
    let cutoff = rel_tol * r.max(c) as f64 * sigma_max;
    Ok(eig.values().iter().filter(|&&v| v > cutoff).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn random_symmetric(n: usize, rng: &mut impl Rng) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n, n, Field::Real);
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.random_range(-1.0..1.0);
                m.set(i, j, v, 0.0);
                m.set(j, i, v, 0.0);
            }
        }
        m
    }

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n, n, Field::Complex);
        for i in 0..n {
            for j in i..n {
                let re: f64 = rng.random_range(-1.0..1.0);
                let im: f64 = if i == j { 0.0 } else { rng.random_range(-1.0..1.0) };
                m.set(i, j, re, im);
                m.set(j, i, re, -im);
            }
        }
        m
    }

    fn complex_example() -> DenseMatrix {
        DenseMatrix::from_complex_rows(&[[(1.0, 0.0), (0.0, 1.0)], [(0.0, -1.0), (2.0, 0.0)]]).unwrap()
    }

    #[test]
    fn hermitian_checks() {
        assert!(is_hermitian(&DenseMatrix::identity(2), 0.0).unwrap());
        let upper = DenseMatrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert!(!is_hermitian(&upper, 1e-12).unwrap());
        assert!(is_hermitian(&complex_example(), 1e-12).unwrap());
        let rect = DenseMatrix::zeros(2, 3, Field::Real);
        let err = is_hermitian(&rect, 0.0).unwrap_err();
        assert!(err.to_string().contains("not square"));
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(DenseMatrix::from_real(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::from_real(1, 1, vec![f64::NAN]).is_err());
        assert!(DenseMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn small_spectra() {
        let swap = DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let s = eigenvalues_hermitian(&swap).unwrap();
        assert_abs_diff_eq!(s.values()[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.values()[1], 1.0, epsilon = 1e-14);

        // characteristic polynomial x^2 - 3x + 1
        let rw = DenseMatrix::from_rows(&[[1.0, 1.0], [1.0, 2.0]]).unwrap();
        let s = eigenvalues_hermitian(&rw).unwrap();
        assert_abs_diff_eq!(s.values()[0], (3.0 - 5f64.sqrt()) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.values()[1], (3.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-14);

        let d = DenseMatrix::diagonal(&[1.0, 0.0, 1.0, 0.0]);
        assert_eq!(eigenvalues_hermitian(&d).unwrap().values(), &[0.0, 0.0, 1.0, 1.0]);

        let one = DenseMatrix::from_rows(&[[7.5]]).unwrap();
        assert_eq!(eigenvalues_hermitian(&one).unwrap().values(), &[7.5]);
    }

    #[test]
    fn complex_hermitian_spectrum() {
        // trace 3, det 1: eigenvalues (3 -+ sqrt 5)/2
        let s = eigenvalues_hermitian(&complex_example()).unwrap();
        assert_eq!(s.count(), 2);
        assert_abs_diff_eq!(s.values()[0], (3.0 - 5f64.sqrt()) / 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(s.values()[1], (3.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-13);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = DenseMatrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let err = eigenvalues_hermitian(&m).unwrap_err();
        assert!(err.to_string().contains("not Hermitian"));
    }

    #[test]
    fn trace_is_preserved() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(11);
        for n in [1, 2, 5, 17, 40] {
            let m = random_symmetric(n, &mut rng);
            let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
            let s = eigenvalues_hermitian(&m).unwrap();
            let sum: f64 = s.values().iter().sum();
            assert!((sum - trace).abs() <= 1e-9 * n as f64 * m.max_abs(), "n={n}");
        }
    }

    #[test]
    fn similarity_and_shift_invariance() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
        for n in [2, 7, 20] {
            let m = random_symmetric(n, &mut rng);
            let scale = m.max_abs();
            let base = eigenvalues_hermitian(&m).unwrap();
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let pm = eigenvalues_hermitian(&m.permuted_symmetric(&perm).unwrap()).unwrap();
            for (a, b) in base.values().iter().zip(pm.values()) {
                assert!((a - b).abs() <= 1e-8 * scale);
            }
            let eps = 0.125;
            let shifted = eigenvalues_hermitian(&m.shifted(eps).unwrap()).unwrap();
            for (a, b) in base.values().iter().zip(shifted.values()) {
                assert!((b - a - eps).abs() <= 1e-9 * scale.max(1.0));
            }
        }
    }

    #[test]
    fn doubling_embedding_matches_real_part_for_real_input() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(8);
        let m = random_symmetric(6, &mut rng);
        let real = eigenvalues_hermitian(&m).unwrap();
        let cplx = eigenvalues_hermitian(&m.to_complex()).unwrap();
        for (a, b) in real.values().iter().zip(cplx.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn doubling_embedding_pairs_eigenvalues() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(21);
        for n in 1..=10 {
            let m = random_hermitian(n, &mut rng);
            let scale = m.max_abs();
            let size = 2 * n;
            let mut a = vec![0.0; size * size];
            for i in 0..n {
                for j in 0..n {
                    let (x, y) = m.entry(i, j);
                    a[i * size + j] = x;
                    a[(i + n) * size + (j + n)] = x;
                    a[i * size + (j + n)] = -y;
                    a[(i + n) * size + j] = y;
                }
            }
            let mut doubled = jacobi_eigenvalues(&mut a, size).unwrap();
            doubled.sort_by(f64::total_cmp);
            let halved = eigenvalues_hermitian(&m).unwrap();
            for (i, v) in halved.values().iter().enumerate() {
                assert!((doubled[2 * i] - v).abs() <= 1e-8 * scale);
                assert!((doubled[2 * i + 1] - v).abs() <= 1e-8 * scale);
            }
            // trace check on the complex side
            let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
            let sum: f64 = halved.values().iter().sum();
            assert!((sum - trace).abs() <= 1e-9 * n as f64 * scale);
        }
    }

    #[test]
    fn gram_examples() {
        let row = DenseMatrix::from_rows(&[[1.0, 2.0, 2.0]]).unwrap();
        assert_eq!(gram(&row), DenseMatrix::from_rows(&[[9.0]]).unwrap());
        assert_eq!(gram(&DenseMatrix::identity(2)), DenseMatrix::identity(2));
        let a = DenseMatrix::from_rows(&[[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(gram(&a), DenseMatrix::from_rows(&[[2.0, 0.0], [0.0, 1.0]]).unwrap());
        let g = gram(&complex_example());
        assert!(is_hermitian(&g, 0.0).unwrap());
    }

    #[test]
    fn singular_value_examples() {
        assert_eq!(singular_values(&DenseMatrix::identity(3)).unwrap().values(), &[1.0, 1.0, 1.0]);
        let d = DenseMatrix::from_rows(&[[3.0, 0.0], [0.0, 4.0]]).unwrap();
        let s = singular_values(&d).unwrap();
        assert_abs_diff_eq!(s.values()[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.values()[1], 4.0, epsilon = 1e-14);
        let ones = DenseMatrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let s = singular_values(&ones).unwrap();
        assert_abs_diff_eq!(s.values()[0], 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(s.values()[1], 2.0, epsilon = 1e-14);
        let tall = DenseMatrix::from_rows(&[[3.0], [4.0]]).unwrap();
        assert_abs_diff_eq!(singular_values(&tall).unwrap().values()[0], 5.0, epsilon = 1e-14);
    }

    #[test]
    fn singular_values_invariances() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        let (r, c) = (4, 7);
        let data: Vec<f64> = (0..r * c * 2).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = DenseMatrix::new(r, c, Field::Complex, data).unwrap();
        let scale = a.max_abs();
        let base = singular_values(&a).unwrap();

        let permuted = a.select(&[2, 0, 3, 1], &(0..c).collect::<Vec<_>>());
        let s = singular_values(&permuted).unwrap();
        for (x, y) in base.values().iter().zip(s.values()) {
            assert!((x - y).abs() <= 1e-8 * scale);
        }

        // multiply row 1 by e^{i 0.7}
        let (cs, sn) = (0.7f64.cos(), 0.7f64.sin());
        let mut rotated = a.clone();
        for j in 0..c {
            let (re, im) = a.entry(1, j);
            rotated.set(1, j, re * cs - im * sn, re * sn + im * cs);
        }
        let s = singular_values(&rotated).unwrap();
        for (x, y) in base.values().iter().zip(s.values()) {
            assert!((x - y).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn hermitian_singular_values_are_absolute_eigenvalues() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(9);
        let m = random_symmetric(9, &mut rng);
        let mut abs: Vec<f64> = eigenvalues_hermitian(&m).unwrap().values().iter().map(|v| v.abs()).collect();
        abs.sort_by(f64::total_cmp);
        let s = singular_values(&m).unwrap();
        for (x, y) in abs.iter().zip(s.values()) {
            assert!((x - y).abs() <= 1e-8 * m.max_abs());
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&DenseMatrix::zeros(4, 4, Field::Real), 1e-12).unwrap(), 0);
        assert_eq!(numerical_rank(&DenseMatrix::identity(4), 1e-12).unwrap(), 4);
        let v = [1.0, 2.0, 3.0];
        let outer: Vec<Vec<f64>> = v.iter().map(|a| v.iter().map(|b| a * b).collect()).collect();
        assert_eq!(numerical_rank(&DenseMatrix::from_rows(&outer).unwrap(), 1e-12).unwrap(), 1);
        let rect = DenseMatrix::from_rows(&[[1.0, 0.0, 1.0], [2.0, 0.0, 2.0]]).unwrap();
        assert_eq!(numerical_rank(&rect, 1e-12).unwrap(), 1);
        assert!(numerical_rank(&DenseMatrix::identity(2), -1.0).is_err());
    }

    #[test]
    fn without_top_drops_largest() {
        let s = Spectrum::new(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.without_top(1).unwrap().values(), &[1.0, 2.0]);
        assert!(s.without_top(3).is_err());
        assert!(Spectrum::new(vec![]).is_err());
    }
}
