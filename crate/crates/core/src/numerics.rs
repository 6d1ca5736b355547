//! Numerical kernels: a cyclic Jacobi eigensolver for small complex Hermitian
//! matrices and the Shannon entropy kernel.
//!
//! Everything here works in natural-log units (nats). Eigenvalues in
//! `[-EIGEN_CLIP, 0)` are treated as rounding noise and clamped to zero
//! before entropy evaluation; anything more negative is reported.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues in `[-EIGEN_CLIP, 0)` are clamped to zero.
pub const EIGEN_CLIP: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Real eigenvalues of a Hermitian matrix, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Eigenvalues with `[-clip, 0)` mapped to zero.
    pub fn clamped(&self, clip: f64) -> Result<Vec<f64>> {
        self.values
            .iter()
            .map(|&v| {
                if v >= 0.0 {
                    Ok(v)
                } else if v >= -clip {
                    Ok(0.0)
                } else {
                    Err(Error::NotPositive { min_eigenvalue: v })
                }
            })
            .collect()
    }

    /// Entropy of the clamped spectrum in nats.
    pub fn entropy(&self) -> Result<f64> {
        entropy_kernel(&self.clamped(EIGEN_CLIP)?)
    }
}

/// Full decomposition `H = V diag(values) V^dagger`; column `i` of `vectors`
/// belongs to `spectrum.values()[i]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub spectrum: Spectrum,
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.spectrum.len();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.spectrum.values().iter().enumerate() {
            for i in 0..n {
                scaled[(i, j)] *= lambda;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

/// Largest entrywise `|H_ij - conj(H_ji)|`.
pub fn hermitian_deviation(h: &CMatrix) -> f64 {
    let n = h.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..h.ncols().min(n) {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_hermitian(h: &CMatrix, tol: f64) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(Error::NonSquare {
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    let deviation = hermitian_deviation(h);
    if deviation > tol || !deviation.is_finite() {
        return Err(Error::NonHermitian { deviation });
    }
    Ok(())
}

/// Eigenvalues of a Hermitian matrix, sorted descending.
pub fn hermitian_spectrum(h: &CMatrix, tol: f64) -> Result<Spectrum> {
    hermitian_eigen(h, tol).map(|e| e.spectrum)
}

/// Eigenvalues and eigenvectors of a Hermitian matrix by cyclic Jacobi
/// rotations. The input is symmetrized before iterating, so asymmetry up to
/// `tol` is averaged out rather than propagated.
pub fn hermitian_eigen(h: &CMatrix, tol: f64) -> Result<Eigen> {
    check_hermitian(h, tol)?;
    let n = h.nrows();
    let mut a = CMatrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let mut v = CMatrix::identity(n, n);

    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = f64::EPSILON * f64::EPSILON * scale * scale;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Eigen {
        spectrum: Spectrum { values },
        vectors,
    })
}

/// One Jacobi step zeroing `a[p][q]`: a phase on column `q` makes the pivot
/// real, then a real Givens rotation annihilates it.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let magnitude = apq.norm();
    if magnitude == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // skip pivots already negligible relative to the diagonal
    if magnitude < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = (apq / magnitude).conj();
    let tau = (aqq - app) / (2.0 * magnitude);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // U restricted to (p, q): [[c, s], [-s e, c e]] with e = phase
    let u_qp = -phase * s;
    let u_qq = phase * c;
    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * u_qp;
        a[(k, q)] = akp * s + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * u_qp.conj();
        a[(q, k)] = apk * s + aqk * u_qq.conj();
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * u_qp;
        v[(k, q)] = vkp * s + vkq * u_qq;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

/// `-x ln x` with the `0 ln 0 = 0` convention.
#[inline]
pub(crate) fn entropy_term(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.ln()
    } else {
        0.0
    }
}

/// Shannon entropy `-sum x ln x` in nats.
///
/// Values in `[-EIGEN_CLIP, 0)` count as zero; more negative values are an
/// error.
pub fn entropy_kernel(values: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &x in values {
        if x < -EIGEN_CLIP || x.is_nan() {
            return Err(Error::NegativeInput { value: x });
        }
        total += entropy_term(x);
    }
    Ok(total.max(0.0))
}
