//! Dense complex linear algebra used by every other module.
//!
//! Tensor products use lexicographic basis ordering: in `kron(a, b)` the
//! index of `a` is the most significant digit, so a two-qubit column order is
//! |00⟩, |01⟩, |10⟩, |11⟩.
//!
//! All tolerances are absolute and stated at the call site.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum entry-wise Hermitian deviation accepted by [`hermitian_eig`].
pub const EIG_HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `[-CLAMP_TOL, 0)` are treated as round-off and clamped to 0.
pub const CLAMP_TOL: f64 = 1e-10;
/// Validation tolerances for [`DensityOperator::new`].
pub const DENSITY_HERMITIAN_TOL: f64 = 1e-12;
pub const DENSITY_TRACE_TOL: f64 = 1e-12;

const JACOBI_REL_TOL: f64 = 1e-12;
/// Eigenvalues with magnitude below this fraction of the spectral radius are
/// round-off and treated as exact zeros before taking square roots.
const ROUNDOFF_REL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A column vector of complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    amplitudes: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            amplitudes: vec![ZERO; dim],
        }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// ⟨self|other⟩, conjugating `self`.
    pub fn inner(&self, other: &ComplexVector) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&self, factor: Complex64) -> ComplexVector {
        ComplexVector::new(self.amplitudes.iter().map(|z| z * factor).collect())
    }

    /// Tensor product with the left factor most significant.
    pub fn kron(&self, other: &ComplexVector) -> ComplexVector {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            out.extend(other.amplitudes.iter().map(|b| a * b));
        }
        ComplexVector::new(out)
    }

    /// The rank-one operator |self⟩⟨self|.
    pub fn outer(&self) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, n, |r, c| self.amplitudes[r] * self.amplitudes[c].conj())
    }

    pub fn max_abs_diff(&self, other: &ComplexVector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.amplitudes[i]
    }
}

/// Dense row-major complex matrix, possibly rectangular.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Real matrix from nested rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        Self::from_fn(n_rows, n_cols, |r, c| Complex64::new(rows[r][c], 0.0))
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |r, c| if r == c { values[r] } else { ZERO })
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

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn dagger(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector shape mismatch");
        let amps = (0..self.rows)
            .map(|r| self.row(r).iter().zip(v.amplitudes()).map(|(a, b)| a * b).sum())
            .collect();
        ComplexVector::new(amps)
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "matrix shape mismatch"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max |A - A†| entry-wise. Infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// max |U†U - I| entry-wise.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.dagger()
            .matmul(self)
            .max_abs_diff(&ComplexMatrix::identity(self.rows))
    }

    /// Numerical rank: number of singular values above `tol`, via the
    /// eigenvalues of A A†.
    pub fn rank(&self, tol: f64) -> usize {
        let gram = self.matmul(&self.dagger());
        match hermitian_eig(&gram) {
            Ok(eig) => eig.values.iter().filter(|&&v| v > tol * tol).count(),
            Err(_) => 0,
        }
    }

    /// Nonzero entries as (row, col, value), row-major.
    pub fn nonzeros(&self) -> Vec<(usize, usize, Complex64)> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                let z = self[(r, c)];
                if z != ZERO {
                    out.push((r, c, z));
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Kronecker product, left factor most significant.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a[(i, j)];
            if x == ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Conjugate transpose.
pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.dagger()
}

/// A validated density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "density operator must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let dev = matrix.hermitian_deviation();
        if dev > DENSITY_HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let eig = hermitian_eig(&matrix)?;
        if let Some(&min) = eig.values.first() {
            if min < -CLAMP_TOL {
                return Err(Error::NegativeEigenvalue(min));
            }
        }
        Ok(Self { matrix })
    }

    /// |v⟩⟨v| for a vector normalized to unit length within 1e-12.
    pub fn from_pure(v: &ComplexVector) -> Result<Self> {
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { matrix: v.outer() })
    }

    /// Trusted constructor for operators that are valid by construction
    /// (convex mixtures of normalized pure states, partial traces).
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// U ρ U†.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> DensityOperator {
        DensityOperator::from_trusted(u.matmul(&self.matrix).matmul(&u.dagger()))
    }

    /// ⟨v|ρ|v⟩, real part.
    pub fn expectation(&self, v: &ComplexVector) -> f64 {
        v.inner(&self.matrix.apply(v)).re
    }
}

/// Row-major strides for a list of subsystem dimensions.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Reduced density operator on the subsystems listed in `keep` (kept in their
/// original order).
pub fn partial_trace(rho: &DensityOperator, dims: &[usize], keep: &[usize]) -> Result<DensityOperator> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {dims:?} do not multiply to {}",
            rho.dim()
        )));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "invalid kept subsystems {keep:?} for {} subsystems",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let full_strides = strides(dims);

    // Offsets of every multi-index over a subset of subsystems.
    let offsets = |subset: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize];
        for &s in subset {
            let mut next = Vec::with_capacity(out.len() * dims[s]);
            for &o in &out {
                for x in 0..dims[s] {
                    next.push(o + x * full_strides[s]);
                }
            }
            out = next;
        }
        out
    };
    let kept_off = offsets(&keep);
    let traced_off = offsets(&traced);

    let n = kept_off.len();
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(n, n);
    for (r, &kr) in kept_off.iter().enumerate() {
        for (c, &kc) in kept_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_off {
                acc += m[(kr + t, kc + t)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(DensityOperator::from_trusted(out))
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered like `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// V Λ V†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let lambda: Vec<Complex64> = self.values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.vectors
            .matmul(&ComplexMatrix::diagonal(&lambda))
            .matmul(&self.vectors.dagger())
    }
}

/// Cyclic complex Jacobi eigensolver.
///
/// Stops once the off-diagonal Frobenius norm drops to `1e-12 * ‖A‖_F`.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let dev = a.hermitian_deviation();
    if dev > EIG_HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let n = a.rows();
    // Work on the Hermitian part.
    let mut w = ComplexMatrix::from_fn(n, n, |r, c| (a[(r, c)] + a[(c, r)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = w.frobenius_norm();

    let off_norm = |w: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    s += w[(r, c)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = scale == 0.0 || n < 2;
    let mut sweeps = 0;
    while !converged {
        if off_norm(&w) <= JACOBI_REL_TOL * scale {
            converged = true;
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            break;
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = w[(p, q)];
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                let phase = apq / b;
                let app = w[(p, p)].re;
                let aqq = w[(q, q)].re;
                let theta = (aqq - app) / (2.0 * b);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = diag(1, e^{-iφ}) · [[c, s], [-s, c]] on the (p, q) plane.
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(s, 0.0);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;

                for k in 0..n {
                    let akp = w[(k, p)];
                    let akq = w[(k, q)];
                    w[(k, p)] = akp * jpp + akq * jqp;
                    w[(k, q)] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = w[(p, k)];
                    let aqk = w[(q, k)];
                    w[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    w[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
                w[(p, q)] = ZERO;
                w[(q, p)] = ZERO;
                w[(p, p)] = Complex64::new(w[(p, p)].re, 0.0);
                w[(q, q)] = Complex64::new(w[(q, q)].re, 0.0);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| w[(x, x)].re.total_cmp(&w[(y, y)].re));
    let values = order.iter().map(|&k| w[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

fn clamp_eigenvalue(x: f64) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::NegativeEigenvalue(x))
    }
}

/// Clamps a PSD spectrum: round-off-sized values become 0, negatives down to
/// `-CLAMP_TOL` become 0, anything more negative is an error.
fn psd_spectrum(values: &[f64]) -> Result<Vec<f64>> {
    let radius = values.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let floor = ROUNDOFF_REL * radius;
    values
        .iter()
        .map(|&x| if x.abs() <= floor { Ok(0.0) } else { clamp_eigenvalue(x) })
        .collect()
}

/// Principal square root of a positive semidefinite Hermitian matrix.
pub fn sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    let roots = psd_spectrum(&eig.values)?
        .into_iter()
        .map(|y| Complex64::new(y.sqrt(), 0.0))
        .collect::<Vec<_>>();
    Ok(eig
        .vectors
        .matmul(&ComplexMatrix::diagonal(&roots))
        .matmul(&eig.vectors.dagger()))
}

/// Uhlmann fidelity Tr √(√ρ σ √ρ), evaluated through eigendecompositions.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity between dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let root = sqrt_psd(rho.matrix())?;
    let inner = root.matmul(sigma.matrix()).matmul(&root);
    let n = inner.rows();
    let inner = ComplexMatrix::from_fn(n, n, |r, c| (inner[(r, c)] + inner[(c, r)].conj()) * 0.5);
    let eig = hermitian_eig(&inner)?;
    Ok(psd_spectrum(&eig.values)?.iter().map(|x| x.sqrt()).sum())
}

/// Fidelity against a pure reference |φ⟩: √⟨φ|σ|φ⟩.
pub fn fidelity_pure(phi: &ComplexVector, sigma: &DensityOperator) -> Result<f64> {
    if phi.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity between dims {} and {}",
            phi.dim(),
            sigma.dim()
        )));
    }
    Ok(clamp_eigenvalue(sigma.expectation(phi))?.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_density(rng: &mut ChaCha8Rng, n: usize) -> DensityOperator {
        let g = random_matrix(rng, n, n);
        let m = g.matmul(&g.dagger());
        let tr = m.trace().re;
        DensityOperator::new(m.scale(c(1.0 / tr, 0.0))).unwrap()
    }

    fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        // Eigenvectors of a random Hermitian matrix.
        let g = random_matrix(rng, n, n);
        let h = g.add(&g.dagger());
        hermitian_eig(&h).unwrap().vectors
    }

    #[test]
    fn kron_identities() {
        assert_eq!(
            kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)),
            ComplexMatrix::identity(4)
        );
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let one = ComplexMatrix::from_real_rows(&[&[1.0]]);
        assert_eq!(kron(&x, &one), x);
    }

    #[test]
    fn kron_matches_index_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 2, 4);
        let b = random_matrix(&mut rng, 3, 2);
        let k = kron(&a, &b);
        assert_eq!((k.rows(), k.cols()), (6, 8));
        for i in 0..2 {
            for j in 0..4 {
                for p in 0..3 {
                    for q in 0..2 {
                        assert_eq!(k[(i * 3 + p, j * 2 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn dagger_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 3, 5);
        assert_eq!(dagger(&dagger(&a)), a);
        assert_eq!(dagger(&ComplexMatrix::identity(4)), ComplexMatrix::identity(4));
    }

    #[test]
    fn partial_trace_of_bell_pair_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = ComplexVector::from_real(&[s, 0.0, 0.0, s]);
        let rho = DensityOperator::from_pure(&psi).unwrap();
        let reduced = partial_trace(&rho, &[2, 2], &[1]).unwrap();
        assert!(
            reduced
                .matrix()
                .max_abs_diff(DensityOperator::maximally_mixed(2).matrix())
                < 1e-15
        );
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_density(&mut rng, 2);
        let b = random_density(&mut rng, 3);
        let ab = DensityOperator::new(kron(a.matrix(), b.matrix())).unwrap();
        let ra = partial_trace(&ab, &[2, 3], &[0]).unwrap();
        let rb = partial_trace(&ab, &[2, 3], &[1]).unwrap();
        assert!(ra.matrix().max_abs_diff(a.matrix()) < 1e-12);
        assert!(rb.matrix().max_abs_diff(b.matrix()) < 1e-12);
    }

    #[test]
    fn partial_trace_tripartite_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let dims = [2, 3, 2];
        let v = ComplexVector::new(
            (0..12)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        );
        let v = v.scale(c(1.0 / v.norm(), 0.0));
        let rho = DensityOperator::from_pure(&v).unwrap();
        let reduced = partial_trace(&rho, &dims, &[2]).unwrap();
        // Direct summation: ρ_C[c, c'] = Σ_{a,b} ψ[a,b,c] ψ*[a,b,c'].
        for cc in 0..2 {
            for cp in 0..2 {
                let mut acc = ZERO;
                for a in 0..2 {
                    for b in 0..3 {
                        acc += v[a * 6 + b * 2 + cc] * v[a * 6 + b * 2 + cp].conj();
                    }
                }
                assert!((reduced.matrix()[(cc, cp)] - acc).norm() < 1e-14);
            }
        }
        assert!((reduced.matrix().trace() - ONE).norm() < 1e-12);
        assert!(hermitian_eig(reduced.matrix()).unwrap().values[0] > -1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let rho = DensityOperator::maximally_mixed(6);
        assert!(matches!(
            partial_trace(&rho, &[2, 2], &[0]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(partial_trace(&rho, &[2, 3], &[]).is_err());
    }

    #[test]
    fn eig_simple_cases() {
        let e = hermitian_eig(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        let e = hermitian_eig(&ComplexMatrix::diagonal(&[c(0.8, 0.0), c(0.2, 0.0)])).unwrap();
        assert!((e.values[0] - 0.2).abs() < 1e-15 && (e.values[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn eig_random_hermitian_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let g = random_matrix(&mut rng, 8, 8);
            let h = g.add(&g.dagger());
            let e = hermitian_eig(&h).unwrap();
            assert!(e.reconstruct().max_abs_diff(&h) <= 1e-9);
            assert!(e.vectors.unitarity_residual() <= 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn density_validation() {
        let bad_trace = ComplexMatrix::identity(2);
        assert!(matches!(DensityOperator::new(bad_trace), Err(Error::InvalidTrace(_))));
        let negative = ComplexMatrix::diagonal(&[c(1.5, 0.0), c(-0.5, 0.0)]);
        assert!(matches!(
            DensityOperator::new(negative),
            Err(Error::NegativeEigenvalue(_))
        ));
        let non_herm = ComplexMatrix::new(2, 2, vec![c(0.5, 0.0), c(0.1, 0.0), ZERO, c(0.5, 0.0)]).unwrap();
        assert!(matches!(DensityOperator::new(non_herm), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn fidelity_reference_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random_density(&mut rng, 4);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);

        let zero = DensityOperator::from_pure(&ComplexVector::from_real(&[1.0, 0.0])).unwrap();
        let one = DensityOperator::from_pure(&ComplexVector::from_real(&[0.0, 1.0])).unwrap();
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-12);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus_v = ComplexVector::from_real(&[s, s]);
        let plus = DensityOperator::from_pure(&plus_v).unwrap();
        let mixed = DensityOperator::maximally_mixed(2);
        assert!((fidelity(&plus, &mixed).unwrap() - s).abs() < 1e-12);
        assert!((fidelity_pure(&plus_v, &mixed).unwrap() - s).abs() < 1e-12);
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let a = DensityOperator::maximally_mixed(2);
        let b = DensityOperator::maximally_mixed(3);
        assert!(fidelity(&a, &b).is_err());
    }

    #[test]
    fn fidelity_symmetric_and_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in [2, 3, 5, 8] {
            let rho = random_density(&mut rng, n);
            let sigma = random_density(&mut rng, n);
            let f = fidelity(&rho, &sigma).unwrap();
            assert!((f - fidelity(&sigma, &rho).unwrap()).abs() < 1e-9);
            let u = random_unitary(&mut rng, n);
            let fu = fidelity(&rho.conjugate_by(&u), &sigma.conjugate_by(&u)).unwrap();
            assert!((f - fu).abs() < 1e-9);
            assert!((0.0..=1.0 + 1e-9).contains(&f));
        }
    }

    #[test]
    fn fidelity_paths_agree_on_pure_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for n in [2, 4, 8] {
            let v = ComplexVector::new(
                (0..n)
                    .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect(),
            );
            let v = v.scale(c(1.0 / v.norm(), 0.0));
            let rho = DensityOperator::from_pure(&v).unwrap();
            let sigma = random_density(&mut rng, n);
            let general = fidelity(&rho, &sigma).unwrap();
            let shortcut = fidelity_pure(&v, &sigma).unwrap();
            assert!((general - shortcut).abs() < 1e-10, "{general} vs {shortcut}");
        }
    }
}
