//! Spin tomograms `w(m, n) = <m| u^dagger rho u |m>` and the tomogram
//! inequality presets for spins 2 and 3.
//!
//! Rotations use the z-y-z Euler convention,
//! `R(alpha, beta, gamma) = exp(-i alpha Jz) d(beta) exp(-i gamma Jz)`, with
//! levels ordered by ascending `m`. The tomogram along `n = (theta, phi)`
//! measures `Jz` after rotating the state by `R(phi, theta, 0)^dagger`, so
//! `theta = 0` reads off the diagonal of `rho` and the result does not
//! depend on `gamma`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequalities::{GroupingSpec, InequalityKind};
use crate::numerics::CMatrix;
use crate::placements::{bipartition, lex_placement, IndexPlacement};
use crate::states::{DensityMatrix, ProbabilityVector};

/// Largest supported multiplet (2j + 1).
pub const MAX_DIMENSION: usize = 16;

const FACTORIALS: [f64; MAX_DIMENSION] = {
    let mut table = [1.0; MAX_DIMENSION];
    let mut i = 1;
    while i < MAX_DIMENSION {
        table[i] = table[i - 1] * i as f64;
        i += 1;
    }
    table
};

/// Spin `j`, stored as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Spin {
    two_j: usize,
}

impl Spin {
    pub fn from_twice(two_j: usize) -> Result<Self> {
        if two_j + 1 > MAX_DIMENSION {
            return Err(Error::BadSpin { two_j });
        }
        Ok(Self { two_j })
    }

    pub fn from_dimension(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIMENSION {
            return Err(Error::BadDimension(dim));
        }
        Ok(Self { two_j: dim - 1 })
    }

    pub fn twice(self) -> usize {
        self.two_j
    }

    pub fn j(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.two_j + 1
    }

    /// Projection of level `index`: `m = -j + index`.
    pub fn m(self, index: usize) -> f64 {
        index as f64 - self.j()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }
}

/// Wigner small-d matrix `d_{m'm}(beta) = <j m'| exp(-i beta Jy) |j m>` from
/// the factorial sum.
pub fn wigner_small_d(spin: Spin, beta: f64) -> DMatrix<f64> {
    let two_j = spin.twice();
    let n = spin.dim();
    let (s, c) = (0.5 * beta).sin_cos();
    let f = |k: usize| FACTORIALS[k];
    DMatrix::from_fn(n, n, |a, b| {
        // a = j + m', b = j + m
        let norm = (f(a) * f(two_j - a) * f(b) * f(two_j - b)).sqrt();
        let lo = b.saturating_sub(a);
        let hi = b.min(two_j - a);
        let mut sum = 0.0;
        for k in lo..=hi {
            let sign = if (k + a - b) % 2 == 0 { 1.0 } else { -1.0 };
            let denom = f(b - k) * f(k) * f(two_j - a - k) * f(k + a - b);
            let cos_pow = (two_j + b - a - 2 * k) as i32;
            let sin_pow = (2 * k + a - b) as i32;
            sum += sign * c.powi(cos_pow) * s.powi(sin_pow) / denom;
        }
        norm * sum
    })
}

/// `exp(-i alpha Jz) d(beta) exp(-i gamma Jz)`.
pub fn rotation_unitary(spin: Spin, angles: EulerAngles) -> CMatrix {
    let d = wigner_small_d(spin, angles.beta);
    let phase = |angle: f64, m: f64| Complex64::from_polar(1.0, -angle * m);
    CMatrix::from_fn(spin.dim(), spin.dim(), |a, b| {
        phase(angles.alpha, spin.m(a)) * d[(a, b)] * phase(angles.gamma, spin.m(b))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tomogram {
    pub spin: Spin,
    pub theta: f64,
    pub phi: f64,
    /// Indexed by ascending `m`.
    pub w: ProbabilityVector,
}

/// On-disk tomogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomogramRecord {
    pub j: f64,
    pub theta: f64,
    pub phi: f64,
    pub w: Vec<f64>,
}

impl From<&Tomogram> for TomogramRecord {
    fn from(t: &Tomogram) -> Self {
        Self {
            j: t.spin.j(),
            theta: t.theta,
            phi: t.phi,
            w: t.w.as_slice().to_vec(),
        }
    }
}

impl TryFrom<TomogramRecord> for Tomogram {
    type Error = Error;

    fn try_from(r: TomogramRecord) -> Result<Self> {
        let spin = Spin::from_dimension(r.w.len())?;
        if (spin.j() - r.j).abs() > 1e-12 {
            return Err(Error::DimensionMismatch {
                expected: spin.dim(),
                found: (2.0 * r.j + 1.0).round() as usize,
            });
        }
        Ok(Self {
            spin,
            theta: r.theta,
            phi: r.phi,
            w: ProbabilityVector::new(r.w)?,
        })
    }
}

/// Spin-projection distribution of `rho` along `(theta, phi)`.
pub fn compute_tomogram(rho: &DensityMatrix, theta: f64, phi: f64) -> Result<Tomogram> {
    let spin = Spin::from_dimension(rho.dim())?;
    let u = rotation_unitary(spin, EulerAngles::new(phi, theta, 0.0));
    let m = rho.matrix();
    let n = spin.dim();
    let w = (0..n)
        .map(|level| {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..n {
                let left = u[(a, level)].conj();
                for b in 0..n {
                    acc += left * m[(a, b)] * u[(b, level)];
                }
            }
            acc.re
        })
        .collect();
    Ok(Tomogram {
        spin,
        theta,
        phi,
        w: ProbabilityVector::from_trusted(w),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Generated from a placement; valid by construction.
    Derived,
    /// Transcribed from a published formula; audit only.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresetKind {
    pub inequality: InequalityKind,
    pub variant: Variant,
}

impl PresetKind {
    pub const SA_DERIVED: Self = Self::new(InequalityKind::Subadditivity, Variant::Derived);
    pub const SA_PRINTED: Self = Self::new(InequalityKind::Subadditivity, Variant::Printed);
    pub const SSA_DERIVED: Self = Self::new(InequalityKind::StrongSubadditivity, Variant::Derived);
    pub const SSA_PRINTED: Self = Self::new(InequalityKind::StrongSubadditivity, Variant::Printed);

    pub const fn new(inequality: InequalityKind, variant: Variant) -> Self {
        Self { inequality, variant }
    }
}

/// Spin-2 placement onto a 2x3 lattice leaving cell (2,2) empty:
/// m = -2, -1, 0 fill the first row, m = 1, 2 the outer cells of the second.
pub fn spin2_placement() -> IndexPlacement {
    IndexPlacement::from_coords(
        vec![2, 3],
        &[vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 2]],
    )
    .expect("fixed spin-2 placement")
}

/// The placement behind each derived preset.
pub fn preset_placement(spin: Spin, inequality: InequalityKind) -> Result<IndexPlacement> {
    match (spin.twice(), inequality) {
        (4, InequalityKind::Subadditivity) => Ok(spin2_placement()),
        (4, InequalityKind::StrongSubadditivity) => lex_placement(5, &[2, 2, 2]),
        // axis 1 against axes (2,3): keeps the printed pair groups of m
        (6, InequalityKind::Subadditivity) => bipartition(&lex_placement(7, &[2, 2, 2])?, &[0]),
        (6, InequalityKind::StrongSubadditivity) => lex_placement(7, &[2, 2, 2]),
        (two_j, _) => Err(Error::UnsupportedSpin { two_j }),
    }
}

/// Tomogram inequality over indices `1..=2j+1` (ascending `m`).
pub fn preset_grouping(spin: Spin, kind: PresetKind) -> Result<GroupingSpec> {
    let two_j = spin.twice();
    if two_j != 4 && two_j != 6 {
        return Err(Error::UnsupportedSpin { two_j });
    }
    match kind.variant {
        Variant::Derived => {
            let placement = preset_placement(spin, kind.inequality)?;
            let label = format!(
                "spin-{} tomogram {}, derived",
                two_j / 2,
                match kind.inequality {
                    InequalityKind::Subadditivity => "subadditivity",
                    InequalityKind::StrongSubadditivity => "strong subadditivity",
                }
            );
            Ok(GroupingSpec::derived(&placement)?.with_label(label))
        }
        Variant::Printed => {
            let name = match (two_j, kind.inequality) {
                (4, InequalityKind::Subadditivity) => "appendix_j2",
                (6, InequalityKind::Subadditivity) => "sub1_printed",
                (6, InequalityKind::StrongSubadditivity) => "appendix_j3",
                _ => return Err(Error::UnsupportedSpin { two_j }),
            };
            Ok(crate::inequalities::bundled_spec(name).expect("bundled printed spec"))
        }
    }
}
