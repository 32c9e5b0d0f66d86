//! Dense square complex matrices.
//!
//! Every algebra element with a matrix carrier lives here. The Hermitian
//! eigensolver is a cyclic complex Jacobi iteration; singular values, operator
//! norms, Schatten norms and unitary exponentials are all derived from it.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const HERMITIAN_RTOL: f64 = 1e-12;
const JACOBI_RTOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;
const MAX_EIG_DIM: usize = 2048;

/// A `dim x dim` complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: entries.len(),
                right: dim * dim,
            });
        }
        if let Some(pos) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(format!(
                "entry ({}, {})",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self::from_complex_diag(
            &diag.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>(),
        )
    }

    pub fn from_complex_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Builds a matrix from real rows, panicking on ragged input. Test helper.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| {
            assert_eq!(rows[i].len(), dim, "ragged rows");
            Complex64::new(rows[i][j], 0.0)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.entries[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { dim: n, entries: out })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| self[(j, i)].conj())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm of `a - a*`, an upper bound of its operator norm.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= HERMITIAN_RTOL * (1.0 + self.max_abs())
    }

    /// `(a + a*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix dimensions must agree")
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix dimensions must agree")
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix dimensions must agree")
    }
}

pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.matmul(b)
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

/// Spectral decomposition `A = V diag(eigenvalues) V*` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `j` is the eigenvector of `eigenvalues[j]`.
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V diag(g(λ)) V*`.
    pub fn apply(&self, mut g: impl FnMut(f64) -> Complex64) -> ComplexMatrix {
        let values: Vec<Complex64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        self.apply_values(&values)
    }

    /// `V diag(values) V*` for precomputed spectral values.
    pub fn apply_values(&self, values: &[Complex64]) -> ComplexMatrix {
        let n = self.vectors.dim();
        assert_eq!(values.len(), n);
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += v[(i, k)] * values[k] * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|l| Complex64::new(l, 0.0))
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Inputs within the Hermiticity tolerance are symmetrized before the
/// iteration starts.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    if n > MAX_EIG_DIM {
        return Err(Error::InvalidParameter(format!(
            "dimension {n} exceeds the eigensolver limit {MAX_EIG_DIM}"
        )));
    }
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_RTOL * (1.0 + a.max_abs()) {
        return Err(Error::NotHermitian { deviation: defect });
    }
    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius();
    let target = JACOBI_RTOL * scale;

    let off_mass = |m: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut off = off_mass(&m);
    let mut sweeps = 0;
    while off > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        off = off_mass(&m);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(EigenDecomposition { eigenvalues, vectors })
}

/// One complex Jacobi rotation annihilating `m[p][q]`.
///
/// With `m[p][q] = r e^{iφ}` the unitary is `U = diag(1, e^{-iφ}) R` on the
/// `(p, q)` plane, `R` the real rotation for the symmetric 2x2 block
/// `[[app, r], [r, aqq]]`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = m.dim();
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let phase = apq / r; // e^{iφ}
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let e_minus = phase.conj(); // e^{-iφ}

    // Columns: M <- M U.
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * c - mkq * e_minus * s;
        m[(k, q)] = mkp * s + mkq * e_minus * c;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * e_minus * s;
        v[(k, q)] = vkp * s + vkq * e_minus * c;
    }
    // Rows: M <- U* M.
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = mpk * c - mqk * phase * s;
        m[(q, k)] = mpk * s + mqk * phase * c;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(app - t * r, 0.0);
    m[(q, q)] = Complex64::new(aqq + t * r, 0.0);
}

/// `a* a`, exactly Hermitian by construction.
fn gram(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let mut g = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += a[(k, i)].conj() * a[(k, j)];
            }
            g[(i, j)] = acc;
            g[(j, i)] = acc.conj();
        }
        g[(i, i)].im = 0.0;
    }
    g
}

/// Singular values in descending order, via the eigenvalues of `a* a`.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let eig = hermitian_eig(&gram(a))?;
    Ok(eig
        .eigenvalues
        .iter()
        .rev()
        .map(|&l| l.max(0.0).sqrt())
        .collect())
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    if a.max_abs() == 0.0 {
        return 0.0;
    }
    // Scaling keeps the Gram matrix away from overflow and underflow.
    let s = a.max_abs();
    let scaled = a.scale_real(1.0 / s);
    let sv = singular_values(&scaled).expect("Gram matrices are Hermitian and small");
    sv[0] * s
}

/// `(Σ σ_i^p)^{1/p}`; `p = f64::INFINITY` gives the operator norm.
pub fn schatten_norm(a: &ComplexMatrix, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("Schatten exponent {p} < 1")));
    }
    let s = a.max_abs();
    if s == 0.0 {
        return Ok(0.0);
    }
    let sv = singular_values(&a.scale_real(1.0 / s))?;
    if p.is_infinite() {
        return Ok(sv[0] * s);
    }
    let top = sv[0];
    if top == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = sv.iter().map(|&x| (x / top).powf(p)).sum();
    Ok(top * sum.powf(1.0 / p) * s)
}

/// `e^{ita} = V diag(e^{itλ}) V*` for Hermitian `a`.
pub fn mat_exp_hermitian(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    Ok(eig.apply(|l| Complex64::from_polar(1.0, t * l)))
}

/// Wire format: `{"dim": n, "entries": [[re, im], ...]}`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            dim: m.dim(),
            entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        ComplexMatrix::new(
            j.dim,
            j.entries.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
        )
    }
}

impl ComplexMatrix {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: MatrixJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        j.try_into()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&MatrixJson::from(self)).expect("finite matrices serialize")
    }
}
