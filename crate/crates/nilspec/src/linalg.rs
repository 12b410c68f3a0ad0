//! Dense real linear algebra kernel.
//!
//! Row-major [`Matrix`] with the handful of factorizations the geometry
//! modules need: a cyclic-Jacobi symmetric eigensolver, Faddeev–LeVerrier
//! characteristic polynomials (floating point and exact rational), a
//! one-sided-Jacobi nullspace, LU solves, and orthogonal polar factors.
//! Everything is deterministic and hand-rolled; the matrices involved are
//! tiny (dimension ≤ 64), so robustness and reproducibility win over speed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::Deserialize;

use crate::{Error, Result};

/// Centralized tolerance configuration.
///
/// All structural checks compare against `structural * scale` where
/// `scale = max(1, ‖input‖_F)`; spectral residuals use `spectral`;
/// value comparisons use `comparison` (relative).
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub structural: f64,
    pub spectral: f64,
    pub comparison: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            structural: 1e-12,
            spectral: 1e-10,
            comparison: 1e-9,
        }
    }
}

impl Tolerances {
    /// Scale factor used by relative structural checks.
    pub fn scale_of(m: &Matrix) -> f64 {
        f64::max(1.0, m.frobenius_norm())
    }
}

/// Dense real matrix, row-major storage: `entries[i * cols + j] = M[i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl Matrix {
    /// Creates a matrix from row-major data.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "entry count {} does not match {}x{}",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(Matrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::Shape("matrix dimensions must be positive".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let entries = rows.iter().flatten().copied().collect();
        Matrix::new(rows.len(), cols, entries)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Diagonal square matrix from the given diagonal entries.
    pub fn diag(d: &[f64]) -> Self {
        let mut m = Matrix::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Matrix product. Panics on incompatible shapes; the public operations
    /// validate dimensions before reaching this.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.entries[i * other.cols + j] += a * other.get(l, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| v.iter().enumerate().map(|(j, x)| self.get(i, j) * x).sum())
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, a| f64::max(m, a.abs()))
    }

    pub fn trace(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "trace of non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn check_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "expected square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    /// Max over (i,j) of |Mᵢⱼ − Mⱼᵢ|.
    pub fn symmetry_violation(&self) -> f64 {
        let mut v = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                v = v.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        v
    }

    /// Max over (i,j) of |Mᵢⱼ + Mⱼᵢ| (diagonal included).
    pub fn skew_violation(&self) -> f64 {
        let mut v = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                v = v.max((self.get(i, j) + self.get(j, i)).abs());
            }
        }
        v
    }

    pub fn is_symmetric(&self, tols: &Tolerances) -> bool {
        self.is_square() && self.symmetry_violation() <= tols.structural * Tolerances::scale_of(self)
    }

    pub fn check_symmetric(&self, tols: &Tolerances) -> Result<()> {
        self.check_square()?;
        let bound = tols.structural * Tolerances::scale_of(self);
        let v = self.symmetry_violation();
        if v <= bound {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "matrix is not symmetric (violation {v:.3e} > {bound:.3e})"
            )))
        }
    }

    pub fn is_skew_symmetric(&self, tols: &Tolerances) -> bool {
        self.is_square() && self.skew_violation() <= tols.structural * Tolerances::scale_of(self)
    }

    pub fn check_skew_symmetric(&self, tols: &Tolerances) -> Result<()> {
        self.check_square()?;
        let bound = tols.structural * Tolerances::scale_of(self);
        let v = self.skew_violation();
        if v <= bound {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "matrix is not skew-symmetric (violation {v:.3e} > {bound:.3e})"
            )))
        }
    }

    /// ‖MᵀM − I‖_F, the deviation from orthogonality.
    pub fn orthogonality_violation(&self) -> f64 {
        let n = self.cols;
        self.transpose().mul(self).sub(&Matrix::identity(n)).frobenius_norm()
    }

    pub fn is_orthogonal(&self, tols: &Tolerances) -> bool {
        self.is_square() && self.orthogonality_violation() <= tols.spectral
    }

    pub fn check_orthogonal(&self, tols: &Tolerances) -> Result<()> {
        self.check_square()?;
        let v = self.orthogonality_violation();
        if v <= tols.spectral {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "matrix is not orthogonal (violation {v:.3e} > {:.3e})",
                tols.spectral
            )))
        }
    }

    /// Solves `self * x = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.check_square()?;
        let n = self.rows;
        if rhs.len() != n {
            return Err(Error::Shape("rhs length mismatch".into()));
        }
        let mut a = self.entries.clone();
        let mut x = rhs.to_vec();
        for col in 0..n {
            let mut piv = col;
            for r in (col + 1)..n {
                if a[r * n + col].abs() > a[piv * n + col].abs() {
                    piv = r;
                }
            }
            if a[piv * n + col].abs() <= f64::EPSILON * self.frobenius_norm().max(1.0) {
                return Err(Error::Numerical("singular matrix in solve".into()));
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                x.swap(col, piv);
            }
            let d = a[col * n + col];
            for r in (col + 1)..n {
                let f = a[r * n + col] / d;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
                x[r] -= f * x[col];
            }
        }
        for col in (0..n).rev() {
            let mut s = x[col];
            for j in (col + 1)..n {
                s -= a[col * n + j] * x[j];
            }
            x[col] = s / a[col * n + col];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.check_square()?;
        let n = self.rows;
        let mut inv = Matrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = self.solve(&e)?;
            for (i, v) in col.into_iter().enumerate() {
                inv.set(i, j, v);
            }
        }
        Ok(inv)
    }

    /// Determinant by LU with partial pivoting.
    pub fn determinant(&self) -> Result<f64> {
        self.check_square()?;
        let n = self.rows;
        let mut a = self.entries.clone();
        let mut det = 1.0;
        for col in 0..n {
            let mut piv = col;
            for r in (col + 1)..n {
                if a[r * n + col].abs() > a[piv * n + col].abs() {
                    piv = r;
                }
            }
            if a[piv * n + col] == 0.0 {
                return Ok(0.0);
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let d = a[col * n + col];
            det *= d;
            for r in (col + 1)..n {
                let f = a[r * n + col] / d;
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
            }
        }
        Ok(det)
    }
}

/// Monic characteristic polynomial coefficients, highest power first.
///
/// For an `n×n` matrix the vector has length `n + 1` and leading entry
/// exactly `1`, so `coeffs = [1, c₁, …, cₙ]` represents
/// `λⁿ + c₁λⁿ⁻¹ + … + cₙ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeffs {
    coeffs: Vec<f64>,
}

impl PolyCoeffs {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &c| acc * lambda + c)
    }

    /// Monic polynomial with the given roots, for cross-checks.
    pub fn from_roots(roots: &[f64]) -> PolyCoeffs {
        let mut coeffs = vec![1.0];
        for &r in roots {
            coeffs.push(0.0);
            for i in (1..coeffs.len()).rev() {
                coeffs[i] -= r * coeffs[i - 1];
            }
        }
        PolyCoeffs { coeffs }
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and an orthogonal matrix whose
/// columns are the matching eigenvectors, so `S·V = V·diag(d)`.
/// Deterministic: no randomness, fixed sweep order, stable sort.
pub fn sym_eigen(s: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let tols = Tolerances::default();
    s.check_symmetric(&tols)?;
    let n = s.rows();
    let norm = s.frobenius_norm();
    let mut a = s.clone();
    let mut v = Matrix::identity(n);
    const MAX_SWEEPS: usize = 100;

    let off = |a: &Matrix| -> f64 {
        let mut t = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                t += 2.0 * a.get(i, j) * a.get(i, j);
            }
        }
        t.sqrt()
    };

    let mut converged = n <= 1 || off(&a) <= 1e-14 * norm.max(1.0);
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                // rows p,q of A
                for j in 0..n {
                    let ap = a.get(p, j);
                    let aq = a.get(q, j);
                    a.set(p, j, c * ap - sn * aq);
                    a.set(q, j, sn * ap + c * aq);
                }
                // columns p,q of A and of the accumulated V
                for i in 0..n {
                    let ap = a.get(i, p);
                    let aq = a.get(i, q);
                    a.set(i, p, c * ap - sn * aq);
                    a.set(i, q, sn * ap + c * aq);
                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v.set(i, p, c * vp - sn * vq);
                    v.set(i, q, sn * vp + c * vq);
                }
            }
        }
        converged = off(&a) <= 1e-14 * norm.max(1.0);
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).total_cmp(&a.get(j, j)));
    let evals: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut vecs = Matrix::zeros(n, n);
    for (newj, &oldj) in order.iter().enumerate() {
        for i in 0..n {
            vecs.set(i, newj, v.get(i, oldj));
        }
    }
    Ok((evals, vecs))
}

/// Monic characteristic polynomial of a square matrix, `det(λI − M)`,
/// by the Faddeev–LeVerrier recursion.
pub fn char_poly(m: &Matrix) -> Result<PolyCoeffs> {
    m.check_square()?;
    let n = m.rows();
    if n > 64 {
        return Err(Error::Shape(format!("dimension {n} exceeds supported 64")));
    }
    let mut coeffs = vec![1.0];
    let mut work = m.clone();
    for q in 1..=n {
        let c = -work.trace() / q as f64;
        coeffs.push(c);
        if q < n {
            let mut shifted = work;
            for i in 0..n {
                shifted.set(i, i, shifted.get(i, i) + c);
            }
            work = m.mul(&shifted);
        }
    }
    Ok(PolyCoeffs { coeffs })
}

/// Orthonormal nullspace basis by one-sided Jacobi orthogonalization.
///
/// Returns `(rank, basis)` where every basis vector `v` satisfies
/// `‖M·v‖ ≤ tol·‖M‖_F` and `rank + basis.len() == cols`. One-sided Jacobi
/// computes singular values without forming MᵀM, so genuine null vectors
/// come out with residuals near machine precision.
pub fn nullspace(m: &Matrix, tol: f64) -> Result<(usize, Vec<Vec<f64>>)> {
    if tol <= 0.0 {
        return Err(Error::InvalidInput("nullspace tolerance must be positive".into()));
    }
    let (rows, cols) = (m.rows(), m.cols());
    let norm = m.frobenius_norm();
    let mut a = m.clone();
    let mut v = Matrix::identity(cols);
    let tiny = (f64::EPSILON * norm.max(1.0)).powi(2);
    const MAX_SWEEPS: usize = 100;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..rows {
                    let x = a.get(i, p);
                    let y = a.get(i, q);
                    app += x * x;
                    aqq += y * y;
                    apq += x * y;
                }
                if apq.abs() <= 1e-15 * (app * aqq).sqrt() || app <= tiny || aqq <= tiny {
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for i in 0..rows {
                    let x = a.get(i, p);
                    let y = a.get(i, q);
                    a.set(i, p, c * x - sn * y);
                    a.set(i, q, sn * x + c * y);
                }
                for i in 0..cols {
                    let x = v.get(i, p);
                    let y = v.get(i, q);
                    v.set(i, p, c * x - sn * y);
                    v.set(i, q, sn * x + c * y);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut basis = Vec::new();
    let mut rank = 0;
    for j in 0..cols {
        let sigma = (0..rows).map(|i| a.get(i, j).powi(2)).sum::<f64>().sqrt();
        if sigma <= tol * norm {
            basis.push(v.col(j));
        } else {
            rank += 1;
        }
    }
    Ok((rank, basis))
}

/// Orthogonal polar factor `U` of `M = U·P` with `P` symmetric positive
/// definite: eigendecomposition of `MᵀM` for the bulk, then Newton steps
/// `U ← ½(U + U⁻ᵀ)` until `U` is orthogonal to machine precision (the eigen
/// route alone degrades on ill-conditioned inputs).
pub fn polar_orthogonal(m: &Matrix) -> Result<Matrix> {
    m.check_square()?;
    let gram = m.transpose().mul(m);
    let (evals, v) = sym_eigen(&gram)?;
    let floor = 1e-24 * gram.frobenius_norm().max(1.0);
    if evals.iter().any(|&l| l <= floor) {
        return Err(Error::Numerical("polar factor of a near-singular matrix".into()));
    }
    let inv_sqrt = Matrix::diag(&evals.iter().map(|&l| 1.0 / l.sqrt()).collect::<Vec<_>>());
    let mut u = m.mul(&v).mul(&inv_sqrt).mul(&v.transpose());
    for _ in 0..8 {
        if u.orthogonality_violation() <= 1e-14 * (u.rows() as f64) {
            return Ok(u);
        }
        let inv_t = u.inverse()?.transpose();
        u = u.add(&inv_t).scale(0.5);
    }
    Err(Error::Numerical("polar factor refinement did not converge".into()))
}

/// Seeded random orthogonal matrix: Gaussian entries, then the polar factor.
pub fn random_orthogonal(n: usize, rng: &mut impl Rng) -> Matrix {
    loop {
        let g = Matrix::from_fn(n, n, |_, _| {
            // Box-Muller
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        });
        if let Ok(q) = polar_orthogonal(&g) {
            return q;
        }
    }
}

// ---------------------------------------------------------------------------
// vector helpers

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalized(a: &[f64]) -> Result<Vec<f64>> {
    let n = norm(a);
    if n == 0.0 {
        return Err(Error::InvalidInput("cannot normalize the zero vector".into()));
    }
    Ok(a.iter().map(|x| x / n).collect())
}

// ---------------------------------------------------------------------------
// exact rational arithmetic

/// Dense matrix over arbitrary-precision rationals, for the exact mode.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "entry count {} does not match {}x{}",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(RationalMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: vec![BigRational::zero(); rows * cols],
        }
    }

    /// Exact conversion from a floating-point matrix (every finite f64 is
    /// rational). Fails on NaN or infinite entries.
    pub fn from_float(m: &Matrix) -> Result<Self> {
        let entries = m
            .entries()
            .iter()
            .map(|&x| {
                BigRational::from_float(x)
                    .ok_or_else(|| Error::InvalidInput("non-finite entry".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        RationalMatrix::new(m.rows(), m.cols(), entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_skew_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if self.get(i, j) + self.get(j, i) != BigRational::zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = RationalMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l).clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j) + &a * other.get(l, j);
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &BigRational) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    pub fn add(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn trace(&self) -> BigRational {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn to_float(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).to_f64().unwrap_or(f64::NAN)
        })
    }
}

/// Exact monic characteristic polynomial, highest power first, by the
/// Faddeev–LeVerrier recursion over the rationals.
pub fn char_poly_exact(m: &RationalMatrix) -> Result<Vec<BigRational>> {
    if m.rows() != m.cols() {
        return Err(Error::Shape(format!(
            "expected square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let one = BigRational::from_integer(BigInt::from(1));
    let mut coeffs = vec![one];
    let mut work = m.clone();
    for q in 1..=n {
        let c = -work.trace() / BigRational::from_integer(BigInt::from(q as i64));
        coeffs.push(c.clone());
        if q < n {
            let mut shifted = work;
            for i in 0..n {
                let d = shifted.get(i, i) + &c;
                shifted.set(i, i, d);
            }
            work = m.mul(&shifted);
        }
    }
    Ok(coeffs)
}

// ---------------------------------------------------------------------------
// JSON input format

/// A matrix parsed from JSON, carrying both the floating-point view and the
/// exact rational view (entries given as `"p/q"` strings stay exact).
#[derive(Debug, Clone)]
pub struct ParsedMatrix {
    pub numeric: Matrix,
    pub exact: RationalMatrix,
}

#[derive(Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<EntryJson>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EntryJson {
    Num(f64),
    Frac(String),
}

fn parse_fraction(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let q: BigInt = q
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if q.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(p, q))
}

fn matrix_from_parts(raw: MatrixJson) -> Result<ParsedMatrix> {
    let mut exact_entries = Vec::with_capacity(raw.entries.len());
    for e in &raw.entries {
        let r = match e {
            EntryJson::Num(x) => BigRational::from_float(*x)
                .ok_or_else(|| Error::Parse("non-finite matrix entry".into()))?,
            EntryJson::Frac(s) => parse_fraction(s)?,
        };
        exact_entries.push(r);
    }
    let exact = RationalMatrix::new(raw.rows, raw.cols, exact_entries)?;
    let numeric = exact.to_float();
    Ok(ParsedMatrix { numeric, exact })
}

/// Parses `{"rows":R,"cols":C,"entries":[...]}`; entries are numbers or
/// `"p/q"` strings.
pub fn matrix_from_json_str(s: &str) -> Result<ParsedMatrix> {
    let raw: MatrixJson =
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    matrix_from_parts(raw)
}

pub fn matrix_from_json_value(v: &serde_json::Value) -> Result<ParsedMatrix> {
    let raw: MatrixJson = serde_json::from_value(v.clone())
        .map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    matrix_from_parts(raw)
}
