//! Embedding an `N`-level object into a padded `n1 x n2 (x n3)` lattice.
//!
//! A placement assigns each component index to a distinct lattice cell;
//! unassigned cells hold exact zeros. Once embedded, a probability vector
//! becomes a joint table with ordinary marginals, and a density matrix
//! becomes a multipartite state with ordinary partial traces.
//!
//! Cells are ordered lexicographically with the first axis most significant,
//! so `lex(8, [2, 2, 2])` sends component 5 (1-based) to cell `(2, 1, 1)`.
//! Axis numbers and cells are 0-based in the Rust API; the JSON placement
//! format is 1-based.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::CMatrix;
use crate::states::{DensityMatrix, ProbabilityVector};
use num_complex::Complex64;

pub const MAX_AXES: usize = 3;
/// Largest lattice for which portrait matrices are materialized.
pub const MAX_PORTRAIT_CELLS: usize = 16;

fn lattice_size(shape: &[usize]) -> usize {
    shape.iter().product()
}

fn check_shape(shape: &[usize]) -> Result<()> {
    if shape.is_empty() || shape.len() > MAX_AXES || shape.contains(&0) {
        return Err(Error::BadShape(shape.to_vec()));
    }
    Ok(())
}

/// Splits a flat lattice index into per-axis coordinates.
pub fn unflatten(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut out = vec![0; shape.len()];
    for axis in (0..shape.len()).rev() {
        out[axis] = flat % shape[axis];
        flat /= shape[axis];
    }
    out
}

pub fn flatten(coords: &[usize], shape: &[usize]) -> usize {
    coords.iter().zip(shape).fold(0, |acc, (&c, &n)| acc * n + c)
}

/// Sorted, deduplicated axis list; errors on empty or out-of-range input.
/// `proper` additionally rejects keeping every axis.
fn normalize_axes(keep: &[usize], arity: usize, proper: bool) -> Result<Vec<usize>> {
    let mut axes = keep.to_vec();
    axes.sort_unstable();
    axes.dedup();
    let bad = axes.is_empty()
        || axes.len() != keep.len()
        || axes.iter().any(|&a| a >= arity)
        || (proper && axes.len() == arity);
    if bad {
        return Err(Error::BadAxes {
            axes: keep.to_vec(),
            arity,
        });
    }
    Ok(axes)
}

/// Projection of lattice cells onto a subset of axes.
#[derive(Debug, Clone)]
struct AxisSplit {
    kept_shape: Vec<usize>,
    /// For each flat cell: (flat index over kept axes, flat index over dropped axes).
    parts: Vec<(usize, usize)>,
}

impl AxisSplit {
    fn new(shape: &[usize], keep: &[usize]) -> Self {
        let kept_shape: Vec<usize> = keep.iter().map(|&a| shape[a]).collect();
        let dropped: Vec<usize> = (0..shape.len()).filter(|a| !keep.contains(a)).collect();
        let dropped_shape: Vec<usize> = dropped.iter().map(|&a| shape[a]).collect();
        let parts = (0..lattice_size(shape))
            .map(|flat| {
                let coords = unflatten(flat, shape);
                let k: Vec<usize> = keep.iter().map(|&a| coords[a]).collect();
                let d: Vec<usize> = dropped.iter().map(|&a| coords[a]).collect();
                (flatten(&k, &kept_shape), flatten(&d, &dropped_shape))
            })
            .collect();
        Self { kept_shape, parts }
    }

    fn kept_size(&self) -> usize {
        lattice_size(&self.kept_shape)
    }
}

/// Injective assignment of component indices to lattice cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexPlacement {
    shape: Vec<usize>,
    cells: Vec<usize>,
}

impl IndexPlacement {
    /// Builds a placement from flat (lexicographic) cell indices, one per
    /// component.
    pub fn from_flat(shape: Vec<usize>, cells: Vec<usize>) -> Result<Self> {
        check_shape(&shape)?;
        let size = lattice_size(&shape);
        if cells.is_empty() {
            return Err(Error::EmptyInput);
        }
        if cells.len() > size {
            return Err(Error::ShapeTooSmall {
                n: cells.len(),
                cells: size,
            });
        }
        let mut seen = vec![false; size];
        for (k, &cell) in cells.iter().enumerate() {
            if cell >= size {
                return Err(Error::BadAssignment(format!(
                    "component {} mapped outside the lattice",
                    k + 1
                )));
            }
            if std::mem::replace(&mut seen[cell], true) {
                return Err(Error::BadAssignment(format!(
                    "component {} shares a cell with an earlier component",
                    k + 1
                )));
            }
        }
        Ok(Self { shape, cells })
    }

    /// Builds a placement from 0-based per-axis coordinates.
    pub fn from_coords(shape: Vec<usize>, coords: &[Vec<usize>]) -> Result<Self> {
        check_shape(&shape)?;
        let mut cells = Vec::with_capacity(coords.len());
        for (k, c) in coords.iter().enumerate() {
            if c.len() != shape.len() || c.iter().zip(&shape).any(|(&x, &n)| x >= n) {
                return Err(Error::BadAssignment(format!(
                    "cell {:?} of component {} does not fit shape {:?}",
                    c,
                    k + 1,
                    shape
                )));
            }
            cells.push(flatten(c, &shape));
        }
        Self::from_flat(shape, cells)
    }

    pub fn n(&self) -> usize {
        self.cells.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn arity(&self) -> usize {
        self.shape.len()
    }

    pub fn lattice_size(&self) -> usize {
        lattice_size(&self.shape)
    }

    /// Flat cell index of every component.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    /// 0-based coordinates of component `k` (0-based).
    pub fn coords(&self, k: usize) -> Vec<usize> {
        unflatten(self.cells[k], &self.shape)
    }

    pub fn is_lexicographic(&self) -> bool {
        self.cells.iter().enumerate().all(|(k, &c)| k == c)
    }

    /// Components (0-based) grouped by their projection onto `keep`, one
    /// group per kept level in lexicographic order. Levels no component
    /// reaches produce empty groups.
    pub fn groups(&self, keep: &[usize]) -> Result<Vec<Vec<usize>>> {
        let keep = normalize_axes(keep, self.arity(), false)?;
        let split = AxisSplit::new(&self.shape, &keep);
        let mut groups = vec![Vec::new(); split.kept_size()];
        for (k, &cell) in self.cells.iter().enumerate() {
            groups[split.parts[cell].0].push(k);
        }
        Ok(groups)
    }

    /// Which kept levels receive at least one assigned cell.
    pub fn occupied_levels(&self, keep: &[usize]) -> Result<Vec<bool>> {
        Ok(self.groups(keep)?.iter().map(|g| !g.is_empty()).collect())
    }
}

/// Component `k` written big-endian in the mixed radix of `shape`.
pub fn lex_placement(n: usize, shape: &[usize]) -> Result<IndexPlacement> {
    check_shape(shape)?;
    let size = lattice_size(shape);
    if n > size {
        return Err(Error::ShapeTooSmall { n, cells: size });
    }
    IndexPlacement::from_flat(shape.to_vec(), (0..n).collect())
}

/// Component `k` takes the cell `base` gives to `sigma[k]` (all 0-based).
pub fn permuted_placement(base: &IndexPlacement, sigma: &[usize]) -> Result<IndexPlacement> {
    let n = base.n();
    let mut seen = vec![false; n];
    if sigma.len() != n || sigma.iter().any(|&s| s >= n || std::mem::replace(&mut seen[s], true)) {
        return Err(Error::NotAPermutation(n));
    }
    Ok(IndexPlacement {
        shape: base.shape.clone(),
        cells: sigma.iter().map(|&s| base.cells[s]).collect(),
    })
}

/// Merges the axes of `placement` into two: `first` (in the given order)
/// against the remaining axes (in ascending order).
pub fn bipartition(placement: &IndexPlacement, first: &[usize]) -> Result<IndexPlacement> {
    let arity = placement.arity();
    let mut sorted = first.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.is_empty() || sorted.len() != first.len() || sorted.len() >= arity || sorted[sorted.len() - 1] >= arity {
        return Err(Error::BadAxes {
            axes: first.to_vec(),
            arity,
        });
    }
    let rest: Vec<usize> = (0..arity).filter(|a| !first.contains(a)).collect();
    let shape_of = |axes: &[usize]| -> Vec<usize> { axes.iter().map(|&a| placement.shape[a]).collect() };
    let (first_shape, rest_shape) = (shape_of(first), shape_of(&rest));
    let coords: Vec<Vec<usize>> = (0..placement.n())
        .map(|k| {
            let c = placement.coords(k);
            let pick = |axes: &[usize]| -> Vec<usize> { axes.iter().map(|&a| c[a]).collect() };
            vec![flatten(&pick(first), &first_shape), flatten(&pick(&rest), &rest_shape)]
        })
        .collect();
    IndexPlacement::from_coords(vec![lattice_size(&first_shape), lattice_size(&rest_shape)], &coords)
}

/// On-disk placement: 1-based cells, `assignment` omitted for lexicographic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementFile {
    pub shape: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<Vec<usize>>>,
    /// Component count for lexicographic placements; defaults to the
    /// lattice size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl PlacementFile {
    pub fn resolve(&self) -> Result<IndexPlacement> {
        match &self.assignment {
            None => lex_placement(self.n.unwrap_or_else(|| lattice_size(&self.shape)), &self.shape),
            Some(cells) => {
                let coords = cells
                    .iter()
                    .map(|c| {
                        c.iter()
                            .map(|&x| {
                                x.checked_sub(1)
                                    .ok_or_else(|| Error::BadAssignment("cells are 1-based".to_string()))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let placement = IndexPlacement::from_coords(self.shape.clone(), &coords)?;
                if let Some(n) = self.n {
                    if n != placement.n() {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            found: placement.n(),
                        });
                    }
                }
                Ok(placement)
            }
        }
    }
}

impl From<&IndexPlacement> for PlacementFile {
    fn from(p: &IndexPlacement) -> Self {
        Self {
            shape: p.shape.clone(),
            assignment: Some(
                (0..p.n())
                    .map(|k| p.coords(k).into_iter().map(|x| x + 1).collect())
                    .collect(),
            ),
            n: None,
        }
    }
}

/// Probabilities indexed by lattice cells (flat, lexicographic).
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl JointTable {
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at 0-based coordinates.
    pub fn get(&self, coords: &[usize]) -> f64 {
        self.values[flatten(coords, &self.shape)]
    }

    pub fn entropy(&self) -> f64 {
        ProbabilityVector::from_trusted(self.values.clone()).entropy()
    }
}

pub fn embed_vector(p: &ProbabilityVector, placement: &IndexPlacement) -> Result<JointTable> {
    if p.len() != placement.n() {
        return Err(Error::DimensionMismatch {
            expected: placement.n(),
            found: p.len(),
        });
    }
    let mut values = vec![0.0; placement.lattice_size()];
    for (&x, &cell) in p.as_slice().iter().zip(placement.cells()) {
        values[cell] = x;
    }
    Ok(JointTable {
        shape: placement.shape.clone(),
        values,
    })
}

/// Sums the table over every axis not in `keep`; the result is flattened
/// over the kept axes in lexicographic order.
pub fn marginal_table(table: &JointTable, keep: &[usize]) -> Result<ProbabilityVector> {
    let keep = normalize_axes(keep, table.shape.len(), true)?;
    let split = AxisSplit::new(&table.shape, &keep);
    let mut out = vec![0.0; split.kept_size()];
    for (&x, &(k, _)) in table.values.iter().zip(&split.parts) {
        out[k] += x;
    }
    Ok(ProbabilityVector::from_trusted(out))
}

/// A density matrix over a lattice, with its axis dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapedDensity {
    shape: Vec<usize>,
    rho: DensityMatrix,
}

impl ShapedDensity {
    pub fn new(shape: Vec<usize>, rho: DensityMatrix) -> Result<Self> {
        check_shape(&shape)?;
        if lattice_size(&shape) != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: lattice_size(&shape),
                found: rho.dim(),
            });
        }
        Ok(Self { shape, rho })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn into_density(self) -> DensityMatrix {
        self.rho
    }
}

/// Places `rho_jk` at (cell of j, cell of k); rows and columns of
/// unassigned cells are zero.
pub fn embed_density(rho: &DensityMatrix, placement: &IndexPlacement) -> Result<ShapedDensity> {
    if rho.dim() != placement.n() {
        return Err(Error::DimensionMismatch {
            expected: placement.n(),
            found: rho.dim(),
        });
    }
    let d = placement.lattice_size();
    let mut m = CMatrix::zeros(d, d);
    for (j, &cj) in placement.cells().iter().enumerate() {
        for (k, &ck) in placement.cells().iter().enumerate() {
            m[(cj, ck)] = rho.get(j, k);
        }
    }
    Ok(ShapedDensity {
        shape: placement.shape.clone(),
        rho: DensityMatrix::from_trusted(m),
    })
}

/// Partial trace over every axis not in `keep`. Keeping all axes returns
/// the input unchanged.
pub fn partial_trace(state: &ShapedDensity, keep: &[usize]) -> Result<ShapedDensity> {
    let keep = normalize_axes(keep, state.shape.len(), false)?;
    let split = AxisSplit::new(&state.shape, &keep);
    let d_out = split.kept_size();
    let mut out = CMatrix::zeros(d_out, d_out);
    let m = state.rho.matrix();
    for (i, &(ki, di)) in split.parts.iter().enumerate() {
        for (j, &(kj, dj)) in split.parts.iter().enumerate() {
            if di == dj {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(ShapedDensity {
        shape: split.kept_shape,
        rho: DensityMatrix::from_trusted(out),
    })
}

/// 0/1 matrix acting on row-major vectorizations: `vec(Tr_dropped rho) =
/// M vec(rho)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortraitMatrix {
    shape: Vec<usize>,
    keep: Vec<usize>,
    d_in: usize,
    d_out: usize,
    entries: Vec<u8>,
}

impl PortraitMatrix {
    /// `(d_out^2, d_in^2)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.d_out * self.d_out, self.d_in * self.d_in)
    }

    pub fn kept_shape(&self) -> Vec<usize> {
        self.keep.iter().map(|&a| self.shape[a]).collect()
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.entries[row * self.d_in * self.d_in + col]
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.entries
            .chunks(self.d_in * self.d_in)
            .map(|row| row.iter().map(|&x| x as usize).sum())
            .collect()
    }

    pub fn to_matrix(&self) -> nalgebra::DMatrix<f64> {
        let (rows, cols) = self.dims();
        nalgebra::DMatrix::from_row_iterator(rows, cols, self.entries.iter().map(|&x| x as f64))
    }
}

pub fn portrait_matrix(placement: &IndexPlacement, keep: &[usize]) -> Result<PortraitMatrix> {
    let keep = normalize_axes(keep, placement.arity(), false)?;
    let d_in = placement.lattice_size();
    if d_in > MAX_PORTRAIT_CELLS {
        return Err(Error::PortraitTooLarge(d_in));
    }
    let split = AxisSplit::new(placement.shape(), &keep);
    let d_out = split.kept_size();
    let mut entries = vec![0u8; d_out * d_out * d_in * d_in];
    for (i, &(ki, di)) in split.parts.iter().enumerate() {
        for (j, &(kj, dj)) in split.parts.iter().enumerate() {
            if di == dj {
                let row = ki * d_out + kj;
                let col = i * d_in + j;
                entries[row * d_in * d_in + col] = 1;
            }
        }
    }
    Ok(PortraitMatrix {
        shape: placement.shape.to_vec(),
        keep,
        d_in,
        d_out,
        entries,
    })
}

/// Embeds `rho`, vectorizes it row-major, multiplies by `portrait`, and
/// reshapes the result.
pub fn apply_portrait(
    portrait: &PortraitMatrix,
    rho: &DensityMatrix,
    placement: &IndexPlacement,
) -> Result<DensityMatrix> {
    if portrait.shape != placement.shape() {
        return Err(Error::ShapeMismatch);
    }
    let embedded = embed_density(rho, placement)?;
    let m = embedded.rho.matrix();
    let d_in = portrait.d_in;
    let vectorized: Vec<Complex64> = (0..d_in * d_in).map(|idx| m[(idx / d_in, idx % d_in)]).collect();
    let d_out = portrait.d_out;
    let mut out = CMatrix::zeros(d_out, d_out);
    for (row, coeffs) in portrait.entries.chunks(d_in * d_in).enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&bit, &z) in coeffs.iter().zip(&vectorized) {
            if bit == 1 {
                acc += z;
            }
        }
        out[(row / d_out, row % d_out)] = acc;
    }
    Ok(DensityMatrix::from_trusted(out))
}

/// Drops levels flagged unoccupied (structural zeros from padding).
pub fn compress_zero_levels(rho: &DensityMatrix, occupied: &[bool]) -> Result<DensityMatrix> {
    if occupied.len() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: occupied.len(),
        });
    }
    let kept: Vec<usize> = (0..occupied.len()).filter(|&i| occupied[i]).collect();
    let m = rho.matrix();
    let out = CMatrix::from_fn(kept.len(), kept.len(), |i, j| m[(kept[i], kept[j])]);
    Ok(DensityMatrix::from_trusted(out))
}

pub fn compress_zero_entries(p: &ProbabilityVector, occupied: &[bool]) -> Result<ProbabilityVector> {
    if occupied.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: occupied.len(),
        });
    }
    Ok(ProbabilityVector::from_trusted(
        p.as_slice()
            .iter()
            .zip(occupied)
            .filter(|(_, &o)| o)
            .map(|(&x, _)| x)
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{sample_density_matrix, sample_probability_vector, RandomSource};

    fn one_based(p: &IndexPlacement, k: usize) -> Vec<usize> {
        p.coords(k - 1).into_iter().map(|x| x + 1).collect()
    }

    #[test]
    fn lex_reproduces_eight_component_map() {
        let p = lex_placement(8, &[2, 2, 2]).unwrap();
        let expected = [
            [1, 1, 1],
            [1, 1, 2],
            [1, 2, 1],
            [1, 2, 2],
            [2, 1, 1],
            [2, 1, 2],
            [2, 2, 1],
            [2, 2, 2],
        ];
        for (k, cell) in expected.iter().enumerate() {
            assert_eq!(one_based(&p, k + 1), cell.to_vec());
        }
    }

    #[test]
    fn lex_seven_leaves_last_cell_empty() {
        let p = lex_placement(7, &[2, 2, 2]).unwrap();
        assert_eq!(p.n(), 7);
        assert!(!p.cells().contains(&7));
        let four = lex_placement(4, &[2, 2]).unwrap();
        assert_eq!(one_based(&four, 3), vec![2, 1]);
        assert!(matches!(lex_placement(9, &[2, 2, 2]), Err(Error::ShapeTooSmall { .. })));
        assert!(matches!(lex_placement(2, &[2, 2, 2, 2]), Err(Error::BadShape(_))));
    }

    #[test]
    fn permutations() {
        let base = lex_placement(7, &[2, 2, 2]).unwrap();
        assert_eq!(permuted_placement(&base, &[0, 1, 2, 3, 4, 5, 6]).unwrap(), base);
        let two = lex_placement(2, &[2, 1]).unwrap();
        let swapped = permuted_placement(&two, &[1, 0]).unwrap();
        assert_eq!(swapped.cells(), &[1, 0]);
        assert!(matches!(
            permuted_placement(&two, &[0, 0]),
            Err(Error::NotAPermutation(2))
        ));
        assert!(permuted_placement(&two, &[0]).is_err());
    }

    #[test]
    fn bipartitions() {
        let lex = lex_placement(7, &[2, 2, 2]).unwrap();
        let first = bipartition(&lex, &[0]).unwrap();
        assert_eq!(first, lex_placement(7, &[2, 4]).unwrap());
        let middle = bipartition(&lex, &[1]).unwrap();
        assert_eq!(middle.shape(), &[2, 4]);
        // component 5 = (2,1,1) goes to row 1, column (a,c) = (2,1) -> 3rd
        assert_eq!(middle.coords(4), vec![0, 2]);
        assert!(bipartition(&lex, &[0, 1, 2]).is_err());
        assert!(bipartition(&lex, &[]).is_err());
        assert!(bipartition(&lex, &[3]).is_err());
    }

    #[test]
    fn placement_file_round_trip() {
        let p = permuted_placement(&lex_placement(5, &[2, 3]).unwrap(), &[4, 2, 0, 1, 3]).unwrap();
        let file = PlacementFile::from(&p);
        let json = serde_json::to_string(&file).unwrap();
        let back: PlacementFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.resolve().unwrap(), p);

        let lex: PlacementFile = serde_json::from_str(r#"{"shape":[2,2,2]}"#).unwrap();
        assert_eq!(lex.resolve().unwrap(), lex_placement(8, &[2, 2, 2]).unwrap());
        let dup: PlacementFile = serde_json::from_str(r#"{"shape":[2,2],"assignment":[[1,1],[1,1]]}"#).unwrap();
        assert!(matches!(dup.resolve(), Err(Error::BadAssignment(_))));
        let zero: PlacementFile = serde_json::from_str(r#"{"shape":[2,2],"assignment":[[0,1]]}"#).unwrap();
        assert!(zero.resolve().is_err());
    }

    #[test]
    fn embedding_and_marginals() {
        let raw: Vec<f64> = (1..=8).map(|k| k as f64 / 36.0).collect();
        let p = ProbabilityVector::new(raw.clone()).unwrap();
        let t = embed_vector(&p, &lex_placement(8, &[2, 2, 2]).unwrap()).unwrap();
        assert_eq!(t.get(&[1, 0, 0]), raw[4]);
        let pk = |k: usize| raw[k - 1];

        let m12 = marginal_table(&t, &[0, 1]).unwrap();
        let expect = [pk(1) + pk(2), pk(3) + pk(4), pk(5) + pk(6), pk(7) + pk(8)];
        assert_eq!(m12.as_slice(), &expect);
        let m23 = marginal_table(&t, &[1, 2]).unwrap();
        let expect = [pk(1) + pk(5), pk(2) + pk(6), pk(3) + pk(7), pk(4) + pk(8)];
        assert_eq!(m23.as_slice(), &expect);
        let m2 = marginal_table(&t, &[1]).unwrap();
        assert!((m2.as_slice()[0] - (pk(1) + pk(2) + pk(5) + pk(6))).abs() < 1e-15);
        assert!((m2.as_slice()[1] - (pk(3) + pk(4) + pk(7) + pk(8))).abs() < 1e-15);

        assert!(matches!(marginal_table(&t, &[0, 1, 2]), Err(Error::BadAxes { .. })));
        assert!(matches!(marginal_table(&t, &[]), Err(Error::BadAxes { .. })));
        assert!(matches!(marginal_table(&t, &[3]), Err(Error::BadAxes { .. })));
        assert!(matches!(marginal_table(&t, &[1, 1]), Err(Error::BadAxes { .. })));
    }

    #[test]
    fn seven_component_table_has_zero_corner() {
        let p = sample_probability_vector(7, &mut RandomSource::new(1, 0)).unwrap();
        let t = embed_vector(&p, &lex_placement(7, &[2, 2, 2]).unwrap()).unwrap();
        assert_eq!(t.get(&[1, 1, 1]), 0.0);
        assert!((t.values().iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let one = ProbabilityVector::new(vec![1.0]).unwrap();
        let t = embed_vector(&one, &lex_placement(1, &[1, 1]).unwrap()).unwrap();
        assert_eq!(t.values(), &[1.0]);

        assert!(matches!(
            embed_vector(&one, &lex_placement(2, &[2, 1]).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn density_embedding() {
        let rho = sample_density_matrix(7, 7, &mut RandomSource::new(4, 0)).unwrap();
        let e = embed_density(&rho, &lex_placement(7, &[2, 2, 2]).unwrap()).unwrap();
        let m = e.density().matrix();
        for i in 0..8 {
            assert_eq!(m[(7, i)], Complex64::new(0.0, 0.0));
            assert_eq!(m[(i, 7)], Complex64::new(0.0, 0.0));
        }
        assert!((e.density().entropy().unwrap() - rho.entropy().unwrap()).abs() < 1e-10);

        let rho8 = sample_density_matrix(8, 8, &mut RandomSource::new(4, 1)).unwrap();
        let e8 = embed_density(&rho8, &lex_placement(8, &[2, 2, 2]).unwrap()).unwrap();
        assert_eq!(e8.density(), &rho8);
    }

    #[test]
    fn trivial_portrait_is_identity() {
        let p = lex_placement(2, &[2]).unwrap();
        let m = portrait_matrix(&p, &[0]).unwrap();
        assert_eq!(m.dims(), (4, 4));
        assert_eq!(m.to_matrix(), nalgebra::DMatrix::<f64>::identity(4, 4));
    }

    #[test]
    fn bipartite_portrait_row_counts() {
        let p = lex_placement(4, &[2, 2]).unwrap();
        let m = portrait_matrix(&p, &[0]).unwrap();
        assert!(m.row_sums().iter().all(|&s| s == 2));
        for shape in [vec![2, 2, 2], vec![2, 4], vec![3, 2]] {
            let p = lex_placement(lattice_size(&shape), &shape).unwrap();
            for keep in [vec![0], vec![1], vec![0, 1], vec![1, 2], vec![0, 2], vec![2]] {
                if keep.iter().any(|&a| a >= shape.len()) {
                    continue;
                }
                let m = portrait_matrix(&p, &keep).unwrap();
                let dropped: usize = (0..shape.len())
                    .filter(|a| !keep.contains(a))
                    .map(|a| shape[a])
                    .product();
                assert!(m.row_sums().iter().all(|&s| s == dropped));
                // every input entry feeds at most one output entry
                let (rows, cols) = m.dims();
                for col in 0..cols {
                    let hits: u32 = (0..rows).map(|r| m.get(r, col) as u32).sum();
                    assert!(hits <= 1);
                }
            }
        }
        assert!(matches!(
            portrait_matrix(&lex_placement(18, &[3, 3, 2]).unwrap(), &[0]),
            Err(Error::PortraitTooLarge(18))
        ));
    }

    #[test]
    fn portrait_of_maximally_mixed() {
        let p = lex_placement(8, &[2, 2, 2]).unwrap();
        let m = portrait_matrix(&p, &[1]).unwrap();
        let out = apply_portrait(&m, &DensityMatrix::maximally_mixed(8).unwrap(), &p).unwrap();
        assert_eq!(out, DensityMatrix::maximally_mixed(2).unwrap());
        let other = lex_placement(6, &[2, 3]).unwrap();
        assert!(matches!(
            apply_portrait(&m, &DensityMatrix::maximally_mixed(6).unwrap(), &other),
            Err(Error::ShapeMismatch)
        ));
    }

    #[test]
    fn product_state_portrait_is_factor() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = [Complex64::new(s, 0.0), Complex64::new(0.0, s)];
        let b = [
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -0.8),
        ];
        let product: Vec<Complex64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        let rho = crate::states::pure_state_density(&product).unwrap();
        let p = lex_placement(6, &[2, 3]).unwrap();
        let out = apply_portrait(&portrait_matrix(&p, &[1]).unwrap(), &rho, &p).unwrap();
        let expected = crate::states::pure_state_density(&b).unwrap();
        let diff = (out.matrix() - expected.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-15);
    }

    #[test]
    fn compression_is_structural() {
        let rho = sample_density_matrix(5, 5, &mut RandomSource::new(8, 0)).unwrap();
        let p = lex_placement(5, &[2, 2, 2]).unwrap();
        let e = embed_density(&rho, &p).unwrap();
        let r12 = partial_trace(&e, &[0, 1]).unwrap();
        let mask = p.occupied_levels(&[0, 1]).unwrap();
        assert_eq!(mask, vec![true, true, true, false]);
        let c = compress_zero_levels(r12.density(), &mask).unwrap();
        assert_eq!(c.dim(), 3);
        let s_full = r12.density().entropy().unwrap();
        assert!((c.entropy().unwrap() - s_full).abs() < 1e-12);
        assert_eq!(p.occupied_levels(&[1, 2]).unwrap(), vec![true; 4]);

        let p8 = lex_placement(8, &[2, 2, 2]).unwrap();
        let rho8 = sample_density_matrix(8, 3, &mut RandomSource::new(8, 1)).unwrap();
        let r = partial_trace(&embed_density(&rho8, &p8).unwrap(), &[0, 2]).unwrap();
        let mask = p8.occupied_levels(&[0, 2]).unwrap();
        assert_eq!(&compress_zero_levels(r.density(), &mask).unwrap(), r.density());
    }

    #[test]
    fn diagonal_consistency() {
        let mut rng = RandomSource::new(77, 0);
        for shape in [vec![2, 2, 2], vec![2, 4], vec![3, 2]] {
            let n = lattice_size(&shape) - 1;
            let placement = lex_placement(n, &shape).unwrap();
            let p = sample_probability_vector(n, &mut rng).unwrap();
            let table = embed_vector(&p, &placement).unwrap();
            let state = embed_density(&DensityMatrix::from_diagonal(&p), &placement).unwrap();
            for keep in [vec![0], vec![1]] {
                let marg = marginal_table(&table, &keep).unwrap();
                let diag = partial_trace(&state, &keep).unwrap().density().diagonal();
                for (a, b) in marg.as_slice().iter().zip(&diag) {
                    assert!((a - b).abs() <= 1e-13);
                }
                assert!((marg.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn partial_trace_axes_errors() {
        let p = lex_placement(4, &[2, 2]).unwrap();
        let e = embed_density(&DensityMatrix::maximally_mixed(4).unwrap(), &p).unwrap();
        assert!(matches!(partial_trace(&e, &[]), Err(Error::BadAxes { .. })));
        assert!(matches!(partial_trace(&e, &[2]), Err(Error::BadAxes { .. })));
        assert_eq!(partial_trace(&e, &[0, 1]).unwrap(), e);
    }
}
