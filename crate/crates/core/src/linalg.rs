//! Dense complex linear algebra for small bipartite systems.
//!
//! Everything operates on [`ComplexMatrix`], a row-major dense matrix of
//! `Complex64`. Target dimensions are tiny (subsystem dimensions up to ~8,
//! joint dimensions up to ~64), so every algorithm is a plain O(n³) loop —
//! no blocking, no sparsity.
//!
//! Bipartite indexing is A-major throughout: the joint basis index of
//! |i⟩_A ⊗ |k⟩_B is `i * dims.b + k`, so a two-qubit matrix has rows ordered
//! |00⟩, |01⟩, |10⟩, |11⟩.

use num_complex::Complex64;
use std::fmt;

use crate::error::{Error, Result};

mod eigen;

pub use eigen::{hermitian_eigensystem, simultaneous_diagonalizer};

/// Which subsystem of a bipartite state an operation targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::A => write!(f, "A"),
            Party::B => write!(f, "B"),
        }
    }
}

/// Subsystem dimensions (dA, dB) of a bipartite Hilbert space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dims {
    pub a: usize,
    pub b: usize,
}

impl Dims {
    pub fn new(a: usize, b: usize) -> Dims {
        Dims { a, b }
    }

    /// Joint dimension dA·dB.
    pub fn total(&self) -> usize {
        self.a * self.b
    }

    pub fn swapped(&self) -> Dims {
        Dims {
            a: self.b,
            b: self.a,
        }
    }

    pub fn dim_of(&self, party: Party) -> usize {
        match party {
            Party::A => self.a,
            Party::B => self.b,
        }
    }

    /// Dimensions where positivity of the partial transpose is equivalent to
    /// separability: 2x2, 2x3 and 3x2.
    pub fn ppt_is_exact(&self) -> bool {
        matches!((self.a, self.b), (2, 2) | (2, 3) | (3, 2))
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.a, self.b)
    }
}

/// Numerical tolerance with an absolute floor and a component relative to the
/// Frobenius norm of whatever is being compared.
///
/// The underlying theory is exact; tolerances exist only to absorb floating
/// point rounding, so both defaults are 1e-9.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub absolute: f64,
    pub relative: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            absolute: 1e-9,
            relative: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(absolute: f64, relative: f64) -> Result<Tolerance> {
        if !absolute.is_finite() || !relative.is_finite() || absolute < 0.0 || relative < 0.0 {
            return Err(Error::BadTolerance);
        }
        Ok(Tolerance { absolute, relative })
    }

    /// Same value for both components (the CLI's `--tol` flag).
    pub fn uniform(tol: f64) -> Result<Tolerance> {
        Tolerance::new(tol, tol)
    }

    /// Effective threshold at the given scale: `max(absolute, relative · scale)`.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.absolute.max(self.relative * scale)
    }
}

/// Dense row-major matrix of double-precision complex numbers.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from a row-major entry buffer. Fails when the buffer length does
    /// not match or any entry is non-finite.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<ComplexMatrix> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries ({}x{})", rows * cols, rows, cols),
                actual: format!("{} entries", entries.len()),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(ComplexMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn<F>(rows: usize, cols: usize, mut f: F) -> ComplexMatrix
    where
        F: FnMut(usize, usize) -> Complex64,
    {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        ComplexMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// Convenience builder from nested real rows (imaginary parts zero).
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<ComplexMatrix> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch {
                    expected: format!("{} columns", ncols),
                    actual: format!("{} columns", row.len()),
                });
            }
            entries.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        ComplexMatrix::new(nrows, ncols, entries)
    }

    /// Diagonal matrix from real values.
    pub fn diagonal(values: &[f64]) -> ComplexMatrix {
        let n = values.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j] = value;
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| x + y)
            .collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| x - y)
            .collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> ComplexMatrix {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Matrix product. Inner dimensions must match.
    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, other.rows,
            "inner dimensions must match for multiplication"
        );
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    /// g · self · g† for a transformation g.
    pub fn conjugated_by(&self, g: &ComplexMatrix) -> ComplexMatrix {
        g.mul(self).mul(&g.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise absolute difference to `other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// ‖self − self†‖_F, zero exactly for Hermitian matrices.
    pub fn hermitian_residual(&self) -> f64 {
        assert!(self.is_square());
        let mut sum = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self.get(i, j) - self.get(j, i).conj();
                sum += d.norm_sqr();
            }
        }
        sum.sqrt()
    }

    pub fn is_hermitian(&self, tol: &Tolerance) -> bool {
        self.is_square() && self.hermitian_residual() <= tol.threshold(self.frobenius_norm())
    }

    /// Frobenius norm of the strictly off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    sum += self.get(i, j).norm_sqr();
                }
            }
        }
        sum.sqrt()
    }

    /// ‖self†·self − 𝟙‖_F, zero exactly for unitary matrices.
    pub fn unitarity_residual(&self) -> f64 {
        assert!(self.is_square());
        self.adjoint()
            .mul(self)
            .distance(&ComplexMatrix::identity(self.rows))
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ComplexMatrix {
    /// Fixed six-decimal rendering, one row per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                // normalize -0.0 so text output is stable
                let re = if z.re == 0.0 { 0.0 } else { z.re };
                let im = if z.im == 0.0 { 0.0 } else { z.im };
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:.6}{:+.6}i", re, im)?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Kronecker product with `a`'s indices major:
/// `out[(i·rb + k), (j·cb + l)] = a[i,j] · b[k,l]`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(ra * rb, ca * cb, |r, c| {
        let (i, k) = (r / rb, r % rb);
        let (j, l) = (c / cb, c % cb);
        a.get(i, j) * b.get(k, l)
    })
}

fn check_bipartite(rho: &ComplexMatrix, dims: Dims) -> Result<()> {
    let n = dims.total();
    if rho.rows() != n || rho.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0} matrix for dims {1}", n, dims),
            actual: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    Ok(())
}

/// Partial trace of a bipartite matrix. `keep = A` returns the dA×dA matrix
/// tr_B ρ; `keep = B` returns the dB×dB matrix tr_A ρ. The trace is preserved.
pub fn partial_trace(rho: &ComplexMatrix, dims: Dims, keep: Party) -> Result<ComplexMatrix> {
    check_bipartite(rho, dims)?;
    let (da, db) = (dims.a, dims.b);
    let out = match keep {
        Party::A => ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| rho.get(i * db + k, j * db + k)).sum()
        }),
        Party::B => ComplexMatrix::from_fn(db, db, |k, l| {
            (0..da).map(|i| rho.get(i * db + k, i * db + l)).sum()
        }),
    };
    Ok(out)
}

/// Transposition of the chosen subsystem's indices only. Involutive, trace-
/// and Hermiticity-preserving.
pub fn partial_transpose(rho: &ComplexMatrix, dims: Dims, which: Party) -> Result<ComplexMatrix> {
    check_bipartite(rho, dims)?;
    let db = dims.b;
    let out = ComplexMatrix::from_fn(dims.total(), dims.total(), |r, c| {
        let (i, k) = (r / db, r % db);
        let (j, l) = (c / db, c % db);
        match which {
            // transpose B: swap k <-> l
            Party::B => rho.get(i * db + l, j * db + k),
            // transpose A: swap i <-> j
            Party::A => rho.get(j * db + k, i * db + l),
        }
    });
    Ok(out)
}

/// Reorder a bipartite matrix so the parties swap roles: the output has
/// dims (dB, dA) and satisfies `out[(k,i),(l,j)] = rho[(i,k),(j,l)]`.
pub fn swap_subsystems(rho: &ComplexMatrix, dims: Dims) -> Result<ComplexMatrix> {
    check_bipartite(rho, dims)?;
    let (da, db) = (dims.a, dims.b);
    let out = ComplexMatrix::from_fn(dims.total(), dims.total(), |r, c| {
        let (k, i) = (r / da, r % da);
        let (l, j) = (c / da, c % da);
        rho.get(i * db + k, j * db + l)
    });
    Ok(out)
}

/// Scale-aware commutation test: true iff ‖ab − ba‖_F lies within the
/// tolerance at scale ‖a‖_F·‖b‖_F.
pub fn commutes(a: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            expected: "two square matrices of equal dimension".to_string(),
            actual: format!("{}x{} and {}x{}", a.rows(), a.cols(), b.rows(), b.cols()),
        });
    }
    let commutator = a.mul(b).sub(&b.mul(a));
    let scale = a.frobenius_norm() * b.frobenius_norm();
    Ok(commutator.frobenius_norm() <= tol.threshold(scale))
}

/// Predicate: Hermitian within tolerance, trace within tolerance of 1, and
/// minimum eigenvalue ≥ −tolerance.
pub fn is_density_matrix(a: &ComplexMatrix, tol: &Tolerance) -> bool {
    density_matrix_violation(a, tol).is_none()
}

/// Like [`is_density_matrix`] but reports why validation failed.
pub fn density_matrix_violation(a: &ComplexMatrix, tol: &Tolerance) -> Option<String> {
    if !a.is_square() {
        return Some(format!("not square: {}x{}", a.rows(), a.cols()));
    }
    // checked explicitly: NaN would sail through every `>` comparison below
    if a.entries()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Some("non-finite entries".to_string());
    }
    let scale = a.frobenius_norm();
    let herm = a.hermitian_residual();
    if herm > tol.threshold(scale) {
        return Some(format!("not Hermitian (asymmetry {:.3e})", herm));
    }
    let tr = a.trace();
    let tr_dev = (tr.re - 1.0).hypot(tr.im);
    if tr_dev > tol.threshold(1.0) {
        return Some(format!("trace {:.12} is not 1", tr.re));
    }
    let (eigenvalues, _) = match hermitian_eigensystem(a, tol) {
        Ok(es) => es,
        Err(e) => return Some(format!("eigendecomposition failed: {e}")),
    };
    let min = eigenvalues.first().copied().unwrap_or(0.0);
    if min < -tol.threshold(scale) {
        return Some(format!("negative eigenvalue {:.3e}", min));
    }
    None
}
