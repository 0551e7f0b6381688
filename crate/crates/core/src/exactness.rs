//! Strong exactness: the 2-parameter square condition on every slice and the
//! limit/colimit conditions on every cube.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::GridPoint;
use crate::linalg::{image_basis, kernel_basis, Matrix, Subspace};
use crate::module::{GridModule, SliceModule};

/// A commutative square
///
/// ```text
///   B --g1--> D
///   ^         ^
///   f1        g2
///   |         |
///   A --f2--> C
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct SquareDiagram {
    pub f1: Matrix,
    pub f2: Matrix,
    pub g1: Matrix,
    pub g2: Matrix,
}

impl SquareDiagram {
    pub fn new(f1: Matrix, f2: Matrix, g1: Matrix, g2: Matrix) -> Result<Self> {
        let shape_err =
            |what: &str| Error::NotCommutative(format!("square shapes disagree at {what}"));
        if f1.cols() != f2.cols() {
            return Err(shape_err("A"));
        }
        if g1.cols() != f1.rows() {
            return Err(shape_err("B"));
        }
        if g2.cols() != f2.rows() {
            return Err(shape_err("C"));
        }
        if g1.rows() != g2.rows() {
            return Err(shape_err("D"));
        }
        if &g1 * &f1 != &g2 * &f2 {
            return Err(Error::NotCommutative("g1·f1 ≠ g2·f2".into()));
        }
        Ok(SquareDiagram { f1, f2, g1, g2 })
    }

    /// The square of `m` with lower corner `x` and upper corner `y`, which
    /// differ on `axes.0` and `axes.1` only. `B` is reached along `axes.0`.
    pub fn from_module(
        m: &GridModule,
        x: GridPoint,
        y: GridPoint,
        axes: (usize, usize),
    ) -> Result<Self> {
        let b = x.with(axes.0, y.0[axes.0]);
        let c = x.with(axes.1, y.0[axes.1]);
        if b.with(axes.1, y.0[axes.1]) != y {
            return Err(Error::InvalidGrid(format!(
                "{x} and {y} do not span a square on axes ({},{})",
                axes.0 + 1,
                axes.1 + 1
            )));
        }
        SquareDiagram::new(
            m.transition(x, b)?,
            m.transition(x, c)?,
            m.transition(b, y)?,
            m.transition(c, y)?,
        )
    }

    pub fn dims(&self) -> [usize; 4] {
        [
            self.f1.cols(),
            self.f1.rows(),
            self.f2.rows(),
            self.g1.rows(),
        ]
    }

    /// `(f1, f2)ᵀ : A → B ⊕ C`.
    fn stacked_f(&self) -> Matrix {
        self.f1.vstack(&self.f2).expect("same source")
    }

    /// `(g1 | −g2) : B ⊕ C → D`.
    fn difference_g(&self) -> Matrix {
        self.g1.hstack(&self.g2.neg()).expect("same target")
    }
}

/// Exactness of `A → B ⊕ C → D` at the middle term, decided by comparing
/// the image and kernel subspaces directly.
pub fn square_exact(sq: &SquareDiagram) -> bool {
    image_basis(&sq.stacked_f()) == kernel_basis(&sq.difference_g())
}

/// Surjectivity of the induced map `A → B ×_D C`.
///
/// The pullback is built as a subspace of `B ⊕ C` with a canonical basis;
/// coordinates in that basis are read off the pivot columns, which turns
/// the induced map into an explicit matrix whose rank is compared with the
/// pullback dimension.
pub fn square_pullback_surjective(sq: &SquareDiagram) -> bool {
    let pullback = kernel_basis(&sq.difference_g());
    let f = sq.stacked_f();
    let induced = f.select_rows(pullback.pivots());
    induced.rank() == pullback.dim()
}

/// Injectivity of the induced map `B ⊔_A C → D`.
///
/// The pushout is realised as a complement `W` of the relation subspace
/// `{(f1 a, −f2 a)}` in `B ⊕ C`; the induced map is injective iff
/// `(g1 | g2)` is injective on `W`.
pub fn square_pushout_injective(sq: &SquareDiagram) -> bool {
    let field = sq.f1.field();
    let relations = image_basis(&sq.f1.vstack(&sq.f2.neg()).expect("same source"));
    let total = relations.ambient_dim();
    let quotient = relations
        .complement_in(&Subspace::full(field, total))
        .expect("relations live in B ⊕ C");
    let g = sq.g1.hstack(&sq.g2).expect("same target");
    (&g * &quotient.basis().transpose()).rank() == quotient.dim()
}

/// A cube-shaped diagram. Corner `mask` takes the upper coordinate on every
/// axis whose bit is set; `edge(mask, axis)` maps corner `mask` to corner
/// `mask | 1 << axis`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeDiagram {
    dims: [usize; 8],
    edges: [[Option<Matrix>; 3]; 8],
}

const TOP: usize = 0b111;

impl CubeDiagram {
    pub fn new(dims: [usize; 8], edges: [[Option<Matrix>; 3]; 8]) -> Result<Self> {
        for mask in 0..8 {
            for axis in 0..3 {
                let bit = 1 << axis;
                let expected = mask & bit == 0;
                match &edges[mask][axis] {
                    Some(e) if expected => {
                        if e.shape() != (dims[mask | bit], dims[mask]) {
                            return Err(Error::NotCommutative(format!(
                                "cube edge {mask:03b}+{axis} has shape {:?}",
                                e.shape()
                            )));
                        }
                    }
                    None if !expected => {}
                    _ => {
                        return Err(Error::NotCommutative(format!(
                            "cube edge {mask:03b}+{axis} presence mismatch"
                        )))
                    }
                }
            }
        }
        let cube = CubeDiagram { dims, edges };
        for mask in 0..8 {
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let (bi, bj) = (1 << i, 1 << j);
                if mask & (bi | bj) != 0 {
                    continue;
                }
                let via_i = cube.edge(mask | bi, j) * cube.edge(mask, i);
                let via_j = cube.edge(mask | bj, i) * cube.edge(mask, j);
                if via_i != via_j {
                    return Err(Error::NotCommutative(format!(
                        "cube face at {mask:03b} on axes ({},{})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(cube)
    }

    /// The cube of `m` spanned by `s ≤ t`. Repeated coordinates are allowed
    /// and give degenerate cubes with identity edges.
    pub fn from_module(m: &GridModule, s: GridPoint, t: GridPoint) -> Result<Self> {
        if !s.le(t) {
            return Err(Error::NotOrdered {
                s: s.to_string(),
                t: t.to_string(),
            });
        }
        let dims = std::array::from_fn(|mask| m.dim(s.corner(t, mask)));
        let mut edges: [[Option<Matrix>; 3]; 8] = Default::default();
        for (mask, row) in edges.iter_mut().enumerate() {
            for (axis, slot) in row.iter_mut().enumerate() {
                if mask & (1 << axis) == 0 {
                    let from = s.corner(t, mask);
                    let to = s.corner(t, mask | 1 << axis);
                    *slot = Some(m.transition(from, to)?);
                }
            }
        }
        CubeDiagram::new(dims, edges)
    }

    pub fn dims(&self) -> [usize; 8] {
        self.dims
    }

    pub fn edge(&self, mask: usize, axis: usize) -> &Matrix {
        self.edges[mask][axis].as_ref().expect("edge exists")
    }

    /// Composite map from corner `from` to corner `to ⊇ from`, adding axes
    /// in increasing order.
    pub fn map(&self, from: usize, to: usize) -> Matrix {
        debug_assert_eq!(from & to, from);
        let field = self.field();
        let mut acc = Matrix::identity(field, self.dims[from]);
        let mut cur = from;
        for axis in 0..3 {
            let bit = 1 << axis;
            if to & bit != 0 && cur & bit == 0 {
                acc = self.edge(cur, axis) * &acc;
                cur |= bit;
            }
        }
        acc
    }

    fn field(&self) -> crate::linalg::Field {
        self.edges[0][0].as_ref().expect("bottom edge").field()
    }

    /// Covering relations `T → T ∪ {axis}` with `T` restricted by `keep`.
    fn arrows(keep: impl Fn(usize, usize) -> bool) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for mask in 0..8 {
            for axis in 0..3 {
                if mask & (1 << axis) == 0 && keep(mask, mask | 1 << axis) {
                    out.push((mask, axis));
                }
            }
        }
        out
    }

    fn offsets(&self, spaces: &[usize]) -> (Vec<usize>, usize) {
        let mut offsets = vec![usize::MAX; 8];
        let mut total = 0;
        for &mask in spaces {
            offsets[mask] = total;
            total += self.dims[mask];
        }
        (offsets, total)
    }
}

/// Surjectivity of `ψ: X(∅) → lim over nonempty subsets`.
///
/// The limit is the kernel of `E : ⊕_{T≠∅} X(T) → ⊕_{arrows} X(target)`,
/// `(x_T) ↦ (x_{T'} − ρ x_T)` over the nine covering relations among
/// nonempty subsets.
pub fn cube_psi_surjective(c: &CubeDiagram) -> bool {
    let field = c.field();
    let upper: Vec<usize> = (1..8).collect();
    let (col_off, cols) = c.offsets(&upper);
    let arrows = CubeDiagram::arrows(|from, _| from != 0);
    debug_assert_eq!(arrows.len(), 9);
    let rows: usize = arrows.iter().map(|&(m, a)| c.dims[m | 1 << a]).sum();
    let mut e = Matrix::zeros(field, rows, cols);
    let mut r = 0;
    for &(mask, axis) in &arrows {
        let target = mask | 1 << axis;
        e.write_block(r, col_off[target], &Matrix::identity(field, c.dims[target]));
        e.write_block(r, col_off[mask], &c.edge(mask, axis).neg());
        r += c.dims[target];
    }
    let limit_dim = cols - e.rank();

    let mut psi = Matrix::zeros(field, cols, c.dims[0]);
    for &mask in &upper {
        psi.write_block(col_off[mask], 0, &c.map(0, mask));
    }
    psi.rank() == limit_dim
}

/// Injectivity of `φ: colim over proper subsets → X(S)`.
///
/// The colimit is the cokernel of `D : ⊕_{arrows} X(source) → ⊕_{T≠S} X(T)`
/// over the nine covering relations among proper subsets; `φ` is injective
/// iff `im D` fills the kernel of the summed map into the top corner.
pub fn cube_phi_injective(c: &CubeDiagram) -> bool {
    let field = c.field();
    let lower: Vec<usize> = (0..TOP).collect();
    let (row_off, rows) = c.offsets(&lower);
    let arrows = CubeDiagram::arrows(|_, to| to != TOP);
    debug_assert_eq!(arrows.len(), 9);
    let cols: usize = arrows.iter().map(|&(m, _)| c.dims[m]).sum();
    let mut d = Matrix::zeros(field, rows, cols);
    let mut col = 0;
    for &(mask, axis) in &arrows {
        let target = mask | 1 << axis;
        d.write_block(row_off[mask], col, &Matrix::identity(field, c.dims[mask]));
        d.write_block(row_off[target], col, &c.edge(mask, axis).neg());
        col += c.dims[mask];
    }

    let mut phi_hat = Matrix::zeros(field, c.dims[TOP], rows);
    for &mask in &lower {
        phi_hat.write_block(0, row_off[mask], &c.map(mask, TOP));
    }
    d.rank() == rows - phi_hat.rank()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExactnessMode {
    /// Every comparable pair of points.
    #[default]
    Exhaustive,
    /// Unit squares and unit cubes only. A heuristic: it is not known to be
    /// equivalent to the exhaustive condition.
    UnitCells,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CubeCondition {
    Psi,
    Phi,
}

impl fmt::Display for CubeCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CubeCondition::Psi => "psi",
            CubeCondition::Phi => "phi",
        })
    }
}

/// A non-exact square inside a slice; corners are full grid points.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SliceFailure {
    pub axis: usize,
    pub index: usize,
    pub lower: GridPoint,
    pub upper: GridPoint,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CubeFailure {
    pub s: GridPoint,
    pub t: GridPoint,
    pub condition: CubeCondition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub overall: bool,
    pub mode: ExactnessMode,
    pub slice_failures: Vec<SliceFailure>,
    pub cube_failures: Vec<CubeFailure>,
}

impl ExactnessReport {
    pub fn failure_count(&self) -> usize {
        self.slice_failures.len() + self.cube_failures.len()
    }
}

impl fmt::Display for ExactnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "strongly exact: {}",
            if self.overall { "yes" } else { "no" }
        )?;
        for s in &self.slice_failures {
            writeln!(
                f,
                "square failure: slice axis {} = {}, {} -> {}",
                s.axis + 1,
                s.index + 1,
                s.lower,
                s.upper
            )?;
        }
        for c in &self.cube_failures {
            writeln!(f, "{} failure: s={} t={}", c.condition, c.s, c.t)?;
        }
        Ok(())
    }
}

/// Non-exact squares of a slice, as `(lower, upper)` pairs in the slice's
/// own coordinates. Squares with a repeated coordinate are always exact and
/// are skipped.
pub fn slice_strongly_exact(
    slice: &SliceModule,
    mode: ExactnessMode,
) -> Vec<(GridPoint, GridPoint)> {
    let m = &slice.module;
    let axes = slice.free_axes();
    let g = m.grid();
    let mut failures = Vec::new();
    for x in g.points() {
        for y in g.points() {
            let (di, dj) = (
                y.0[axes.0] as isize - x.0[axes.0] as isize,
                y.0[axes.1] as isize - x.0[axes.1] as isize,
            );
            let wanted = match mode {
                ExactnessMode::Exhaustive => di > 0 && dj > 0,
                ExactnessMode::UnitCells => di == 1 && dj == 1,
            };
            if !wanted {
                continue;
            }
            let sq = SquareDiagram::from_module(m, x, y, axes).expect("valid slice commutes");
            if !square_exact(&sq) {
                failures.push((x, y));
            }
        }
    }
    failures
}

/// Decides 3-parameter strong exactness of a valid module.
///
/// Pairs `s ≤ t` that agree on one axis are plane squares and are covered by
/// the slice checks; pairs that agree on two axes impose no condition. The
/// cube conditions are evaluated on the pairs with `s < t` on every axis.
pub fn check_strong_exactness(m: &GridModule, mode: ExactnessMode) -> Result<ExactnessReport> {
    let validation = m.validate();
    if !validation.is_valid() {
        return Err(Error::InvalidModule(Box::new(validation)));
    }
    let g = m.grid();
    let cells = g.cells();

    let slices: Vec<(usize, usize)> = (0..3)
        .flat_map(|axis| (0..cells[axis]).map(move |i| (axis, i)))
        .collect();
    let mut slice_failures: Vec<SliceFailure> = slices
        .par_iter()
        .flat_map_iter(|&(axis, index)| {
            let slice = m.restrict_slice(axis, index).expect("index in range");
            slice_strongly_exact(&slice, mode)
                .into_iter()
                .map(move |(x, y)| SliceFailure {
                    axis,
                    index,
                    lower: x.with(axis, index),
                    upper: y.with(axis, index),
                })
        })
        .collect();
    slice_failures.sort();

    let pairs: Vec<(GridPoint, GridPoint)> = g
        .ordered_pairs()
        .into_iter()
        .filter(|&(s, t)| match mode {
            ExactnessMode::Exhaustive => s.strictly_below(t),
            ExactnessMode::UnitCells => (0..3).all(|i| t.0[i] == s.0[i] + 1),
        })
        .collect();
    let mut cube_failures: Vec<CubeFailure> = pairs
        .par_iter()
        .flat_map_iter(|&(s, t)| {
            let cube = CubeDiagram::from_module(m, s, t).expect("valid module commutes");
            let psi = cube_psi_surjective(&cube);
            let phi = cube_phi_injective(&cube);
            [
                (!psi).then_some(CubeFailure {
                    s,
                    t,
                    condition: CubeCondition::Psi,
                }),
                (!phi).then_some(CubeFailure {
                    s,
                    t,
                    condition: CubeCondition::Phi,
                }),
            ]
            .into_iter()
            .flatten()
        })
        .collect();
    cube_failures.sort();

    Ok(ExactnessReport {
        overall: slice_failures.is_empty() && cube_failures.is_empty(),
        mode,
        slice_failures,
        cube_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;

    fn f() -> Field {
        Field::default()
    }

    fn all_three(sq: &SquareDiagram) -> [bool; 3] {
        [
            square_exact(sq),
            square_pullback_surjective(sq),
            square_pushout_injective(sq),
        ]
    }

    #[test]
    fn zero_square_is_exact() {
        let z = Matrix::zeros(f(), 0, 0);
        let sq = SquareDiagram::new(z.clone(), z.clone(), z.clone(), z).unwrap();
        assert_eq!(all_three(&sq), [true; 3]);
    }

    #[test]
    fn two_lines_into_a_plane() {
        // A = 0, B = C = k, D = k², g1 = (1,0)ᵀ, g2 = (0,1)ᵀ.
        let fld = f();
        let sq = SquareDiagram::new(
            Matrix::zeros(fld, 1, 0),
            Matrix::zeros(fld, 1, 0),
            Matrix::column(fld, &[1, 0]),
            Matrix::column(fld, &[0, 1]),
        )
        .unwrap();
        assert_eq!(all_three(&sq), [true; 3]);
    }

    #[test]
    fn missing_pullback_is_not_exact() {
        // A = 0, B = C = D = k with identities: the pullback is k.
        let fld = f();
        let id = Matrix::identity(fld, 1);
        let sq = SquareDiagram::new(
            Matrix::zeros(fld, 1, 0),
            Matrix::zeros(fld, 1, 0),
            id.clone(),
            id,
        )
        .unwrap();
        assert_eq!(all_three(&sq), [false; 3]);
    }

    #[test]
    fn pullback_square_is_exact() {
        // B = C = k, D = k with g1 = g2 = id; A = pullback = k with f1 = f2 = id.
        let id = Matrix::identity(f(), 1);
        let sq = SquareDiagram::new(id.clone(), id.clone(), id.clone(), id).unwrap();
        assert_eq!(all_three(&sq), [true; 3]);
    }

    #[test]
    fn non_commuting_square_is_rejected() {
        let fld = f();
        let id = Matrix::identity(fld, 1);
        let z = Matrix::zeros(fld, 1, 1);
        assert!(matches!(
            SquareDiagram::new(id.clone(), id.clone(), id, z),
            Err(Error::NotCommutative(_))
        ));
    }

    fn zero_cube() -> CubeDiagram {
        let fld = f();
        let mut edges: [[Option<Matrix>; 3]; 8] = Default::default();
        for (mask, row) in edges.iter_mut().enumerate() {
            for (axis, slot) in row.iter_mut().enumerate() {
                if mask & (1 << axis) == 0 {
                    *slot = Some(Matrix::zeros(fld, 0, 0));
                }
            }
        }
        CubeDiagram::new([0; 8], edges).unwrap()
    }

    #[test]
    fn zero_cube_passes_both() {
        let c = zero_cube();
        assert!(cube_psi_surjective(&c));
        assert!(cube_phi_injective(&c));
    }
}
