//! Classical probability vectors, density matrices, and seeded samplers.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::numerics::{self, CMatrix, Eigen, Spectrum};

/// Validation thresholds shared by every state constructor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Probability entries in `[-probability_clip, 0)` are clamped to zero.
    pub probability_clip: f64,
    /// Allowed `|sum p - 1|`.
    pub normalization: f64,
    /// Allowed entrywise `|rho - rho^dagger|`.
    pub hermitian: f64,
    /// Allowed `|Tr rho - 1|`.
    pub trace: f64,
    /// Eigenvalues in `[-eigen_clip, 0)` count as zero.
    pub eigen_clip: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            probability_clip: 1e-12,
            normalization: 1e-9,
            hermitian: 1e-10,
            trace: 1e-9,
            eigen_clip: numerics::EIGEN_CLIP,
        }
    }
}

/// Nonnegative components summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        validate_probability_vector_with(raw, &Tolerances::default())
    }

    /// Wraps components already known to be a distribution (marginals,
    /// tomogram diagonals); only clamps tiny negatives.
    pub(crate) fn from_trusted(mut raw: Vec<f64>) -> Self {
        for x in &mut raw {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        Self(raw)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    /// The basis vector with all weight on component `index` (0-based).
    pub fn basis(n: usize, index: usize) -> Self {
        let mut v = vec![0.0; n];
        v[index] = 1.0;
        Self(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        shannon_entropy(self)
    }
}

pub fn validate_probability_vector(raw: Vec<f64>) -> Result<ProbabilityVector> {
    validate_probability_vector_with(raw, &Tolerances::default())
}

pub fn validate_probability_vector_with(mut raw: Vec<f64>, tol: &Tolerances) -> Result<ProbabilityVector> {
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (index, x) in raw.iter_mut().enumerate() {
        if !x.is_finite() || *x < -tol.probability_clip {
            return Err(Error::NegativeEntry { index, value: *x });
        }
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let sum: f64 = raw.iter().sum();
    if (sum - 1.0).abs() > tol.normalization {
        return Err(Error::NotNormalized { sum });
    }
    Ok(ProbabilityVector(raw))
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(raw: CMatrix) -> Result<Self> {
        validate_density_matrix_with(raw, &Tolerances::default())
    }

    /// Wraps a matrix that is a density matrix by construction (partial
    /// traces, embeddings, unitary conjugates). Hermiticity is enforced
    /// exactly; nothing else is checked.
    pub(crate) fn from_trusted(raw: CMatrix) -> Self {
        Self(hermitian_part(&raw))
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(Self(CMatrix::identity(n, n) * Complex64::new(1.0 / n as f64, 0.0)))
    }

    pub fn from_diagonal(p: &ProbabilityVector) -> Self {
        let d = DVector::from_iterator(p.len(), p.as_slice().iter().map(|&x| Complex64::new(x, 0.0)));
        Self(CMatrix::from_diagonal(&d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// `rho[(row, col)]` with 0-based indices.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }

    pub fn spectrum(&self) -> Spectrum {
        // exactly Hermitian by construction
        numerics::hermitian_spectrum(&self.0, f64::INFINITY).expect("square Hermitian storage")
    }

    pub fn eigen(&self) -> Eigen {
        numerics::hermitian_eigen(&self.0, f64::INFINITY).expect("square Hermitian storage")
    }

    pub fn entropy(&self) -> Result<f64> {
        von_neumann_entropy(self)
    }

    /// `u rho u^dagger`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        Ok(Self::from_trusted(u * &self.0 * u.adjoint()))
    }

    /// Entrywise complex conjugate (equivalently the transpose).
    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut out = CMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    for i in 0..n {
        out[(i, i)].im = 0.0;
    }
    out
}

pub fn validate_density_matrix(raw: CMatrix) -> Result<DensityMatrix> {
    validate_density_matrix_with(raw, &Tolerances::default())
}

pub fn validate_density_matrix_with(raw: CMatrix, tol: &Tolerances) -> Result<DensityMatrix> {
    if raw.nrows() == 0 {
        return Err(Error::EmptyInput);
    }
    let spectrum = numerics::hermitian_spectrum(&raw, tol.hermitian)?;
    let trace = raw.trace();
    if (trace - Complex64::new(1.0, 0.0)).norm() > tol.trace {
        return Err(Error::TraceNotOne { trace: trace.re });
    }
    if spectrum.min() < -tol.eigen_clip {
        return Err(Error::NotPositive {
            min_eigenvalue: spectrum.min(),
        });
    }
    Ok(DensityMatrix(hermitian_part(&raw)))
}

/// `H = -sum p ln p` in nats.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    p.0.iter().map(|&x| numerics::entropy_term(x)).sum::<f64>().max(0.0)
}

/// `S = -Tr rho ln rho` in nats, via the eigenvalues of `rho`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    rho.spectrum().entropy()
}

/// `v v^dagger / |v|^2`.
pub fn pure_state_density(amplitudes: &[Complex64]) -> Result<DensityMatrix> {
    let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    if amplitudes.is_empty() || norm_sqr <= 0.0 || !norm_sqr.is_finite() {
        return Err(Error::ZeroVector);
    }
    let n = amplitudes.len();
    let m = CMatrix::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj() / norm_sqr);
    Ok(DensityMatrix::from_trusted(m))
}

/// Seeded ChaCha stream. Equal `(seed, stream)` pairs give equal draws.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// A fresh source on another stream of the same seed.
    pub fn fork(&self, stream: u64) -> Self {
        Self::new(self.seed, stream)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Uniform draw from the probability simplex (normalized exponentials).
pub fn sample_probability_vector(n: usize, rng: &mut RandomSource) -> Result<ProbabilityVector> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng.rng())).collect();
    let total: f64 = draws.iter().sum();
    Ok(ProbabilityVector(draws.into_iter().map(|x| x / total).collect()))
}

/// Ginibre state `G G^dagger / Tr(G G^dagger)` with `G` an `n x rank`
/// complex Gaussian matrix.
pub fn sample_density_matrix(n: usize, rank: usize, rng: &mut RandomSource) -> Result<DensityMatrix> {
    if rank == 0 || rank > n {
        return Err(Error::BadRank { rank, dim: n });
    }
    let r = rng.rng();
    let g = CMatrix::from_fn(n, rank, |_, _| {
        Complex64::new(StandardNormal.sample(&mut *r), StandardNormal.sample(&mut *r))
    });
    let m = &g * g.adjoint();
    let trace = m.trace().re;
    Ok(DensityMatrix::from_trusted(m / Complex64::new(trace, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn probability_validation() {
        assert!(validate_probability_vector(vec![0.5, 0.5]).is_ok());
        assert!(matches!(
            validate_probability_vector(vec![0.5, 0.6]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            validate_probability_vector(vec![1.1, -0.1]),
            Err(Error::NegativeEntry { index: 1, .. })
        ));
        let clamped = validate_probability_vector(vec![1.0, -5e-13]).unwrap();
        assert_eq!(clamped.as_slice(), &[1.0, 0.0]);
        let raw = vec![1.0 / 7.0; 7];
        assert_eq!(validate_probability_vector(raw.clone()).unwrap().as_slice(), &raw[..]);
        assert!(matches!(validate_probability_vector(vec![]), Err(Error::EmptyInput)));
    }

    #[test]
    fn density_validation() {
        let half = CMatrix::identity(2, 2) * c(0.5);
        assert!(validate_density_matrix(half).is_ok());
        let bad = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.2), c(-0.2)]));
        assert!(matches!(validate_density_matrix(bad), Err(Error::NotPositive { .. })));
        let bad = CMatrix::identity(2, 2);
        assert!(matches!(validate_density_matrix(bad), Err(Error::TraceNotOne { .. })));
        let mut bad = CMatrix::identity(2, 2) * c(0.5);
        bad[(0, 1)] = c(0.1);
        assert!(matches!(validate_density_matrix(bad), Err(Error::NonHermitian { .. })));
        assert!(matches!(
            validate_density_matrix(CMatrix::zeros(2, 3)),
            Err(Error::NonSquare { .. })
        ));
    }

    #[test]
    fn ginibre_states_validate() {
        let mut rng = RandomSource::new(5, 0);
        for rank in 1..=7 {
            let rho = sample_density_matrix(7, rank, &mut rng).unwrap();
            assert!(validate_density_matrix(rho.matrix().clone()).is_ok());
        }
        assert!(matches!(
            sample_density_matrix(3, 4, &mut rng),
            Err(Error::BadRank { .. })
        ));
        assert!(matches!(
            sample_density_matrix(3, 0, &mut rng),
            Err(Error::BadRank { .. })
        ));
    }

    #[test]
    fn shannon_examples() {
        let uniform = ProbabilityVector::uniform(7).unwrap();
        assert!((shannon_entropy(&uniform) - 7f64.ln()).abs() < 1e-12);
        assert_eq!(shannon_entropy(&ProbabilityVector::basis(7, 0)), 0.0);
        let p = [0.3, 0.2, 0.15, 0.1, 0.1, 0.1, 0.05];
        let mut direct = 0.0;
        for x in p {
            direct -= x * f64::ln(x);
        }
        let h = shannon_entropy(&ProbabilityVector::new(p.to_vec()).unwrap());
        assert!((h - direct).abs() < 1e-14);
    }

    #[test]
    fn von_neumann_examples() {
        let half = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((von_neumann_entropy(&half).unwrap() - 2f64.ln()).abs() < 1e-12);

        let mut rng = RandomSource::new(9, 0);
        let pure = sample_density_matrix(6, 1, &mut rng).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-10);

        let p = ProbabilityVector::new(vec![0.5, 0.3, 0.2]).unwrap();
        let rho = DensityMatrix::from_diagonal(&p);
        assert!((von_neumann_entropy(&rho).unwrap() - shannon_entropy(&p)).abs() < 1e-10);
    }

    #[test]
    fn simplex_sampling() {
        let mut rng = RandomSource::new(1, 0);
        assert_eq!(sample_probability_vector(1, &mut rng).unwrap().as_slice(), &[1.0]);

        let a = sample_probability_vector(7, &mut RandomSource::new(42, 3)).unwrap();
        let b = sample_probability_vector(7, &mut RandomSource::new(42, 3)).unwrap();
        assert_eq!(a, b);
        assert!((a.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let other = sample_probability_vector(7, &mut RandomSource::new(42, 4)).unwrap();
        assert_ne!(a, other);

        // flat Dirichlet(1,1,1) has mean 1/3 per component
        let mut rng = RandomSource::new(2024, 0);
        let mut mean = [0.0; 3];
        let draws = 10_000;
        for _ in 0..draws {
            let p = sample_probability_vector(3, &mut rng).unwrap();
            for (m, x) in mean.iter_mut().zip(p.as_slice()) {
                *m += x / draws as f64;
            }
        }
        for m in mean {
            assert!((m - 1.0 / 3.0).abs() < 0.01, "mean {m}");
        }
    }

    #[test]
    fn ginibre_determinism_and_rank() {
        let a = sample_density_matrix(7, 7, &mut RandomSource::new(17, 0)).unwrap();
        let b = sample_density_matrix(7, 7, &mut RandomSource::new(17, 0)).unwrap();
        assert_eq!(a, b);
        assert!(a.spectrum().min() >= -1e-10);

        let rho = sample_density_matrix(5, 2, &mut RandomSource::new(3, 1)).unwrap();
        let above = rho.spectrum().values().iter().filter(|&&v| v > 1e-10).count();
        assert_eq!(above, 2);
    }

    #[test]
    fn pure_states() {
        let rho = pure_state_density(&[c(1.0), c(0.0)]).unwrap();
        assert_eq!(rho.diagonal(), vec![1.0, 0.0]);
        assert_eq!(rho.get(0, 1), c(0.0));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = pure_state_density(&[c(s), c(s)]).unwrap();
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert!((plus.get(i, j) - c(0.5)).norm() < 1e-15);
        }
        assert!(matches!(pure_state_density(&[c(0.0), c(0.0)]), Err(Error::ZeroVector)));
    }
}
