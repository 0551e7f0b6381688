//! Persistence modules on a finite 3-D cell grid.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridPoint};
use crate::linalg::{Field, Matrix};

/// A pointwise finite-dimensional module on a [`Grid`]: a dimension at every
/// point and one step map per axis from `t` to `t + e_axis`.
///
/// Composite maps `ρ_s^t` are obtained with [`GridModule::transition`] and
/// memoized in a thread-safe cache.
pub struct GridModule {
    field: Field,
    grid: Grid,
    dims: Vec<usize>,
    /// `steps[axis][index(t)]` is `None` exactly when `t` sits on the last
    /// cell of `axis`.
    steps: [Vec<Option<Matrix>>; 3],
    cache: RwLock<HashMap<(usize, usize), Matrix>>,
}

/// One defect found by [`GridModule::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Problem {
    /// A step map whose shape disagrees with the endpoint dimensions.
    Shape {
        axis: usize,
        at: GridPoint,
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// The square spanned by axes `axes` at lower corner `at` does not commute.
    NonCommuting { at: GridPoint, axes: (usize, usize) },
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Problem::Shape {
                axis,
                at,
                expected,
                found,
            } => write!(
                f,
                "step map on axis {} at {at} has shape {}x{}, expected {}x{}",
                axis + 1,
                found.0,
                found.1,
                expected.0,
                expected.1
            ),
            Problem::NonCommuting { at, axes } => write!(
                f,
                "square on axes ({},{}) at {at} does not commute",
                axes.0 + 1,
                axes.1 + 1
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub problems: Vec<Problem>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.problems.is_empty()
    }
}

/// A 2-parameter restriction of a [`GridModule`]: `axis` is fixed to cell
/// `index` and the stored module has a single cell along that axis.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceModule {
    pub axis: usize,
    pub index: usize,
    pub module: GridModule,
}

impl SliceModule {
    /// The two free axes, in increasing order.
    pub fn free_axes(&self) -> (usize, usize) {
        match self.axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        }
    }
}

impl GridModule {
    /// Assembles a module from raw parts. Shapes and commutativity are not
    /// checked here; see [`GridModule::validate`].
    pub fn from_parts(
        field: Field,
        grid: Grid,
        dims: Vec<usize>,
        steps: [Vec<Option<Matrix>>; 3],
    ) -> Result<Self> {
        if dims.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                op: "module dims",
                left: grid.len(),
                right: dims.len(),
            });
        }
        for (axis, maps) in steps.iter().enumerate() {
            if maps.len() != grid.len() {
                return Err(Error::DimensionMismatch {
                    op: "module step maps",
                    left: grid.len(),
                    right: maps.len(),
                });
            }
            for t in grid.points() {
                let present = maps[grid.index(t)].is_some();
                if present != grid.has_step(axis, t) {
                    return Err(Error::InvalidGrid(format!(
                        "step map on axis {} at {t} must be {}",
                        axis + 1,
                        if present { "absent" } else { "present" }
                    )));
                }
            }
        }
        Ok(GridModule {
            field,
            grid,
            dims,
            steps,
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// Builds a module from a dimension function and a step-map function.
    /// `step(axis, t)` is called for every `t` with `t + e_axis` on the grid.
    pub fn from_fn(
        field: Field,
        grid: Grid,
        dim: impl Fn(GridPoint) -> usize,
        mut step: impl FnMut(usize, GridPoint) -> Matrix,
    ) -> Self {
        let dims = grid.points().map(&dim).collect();
        let steps = [0, 1, 2].map(|axis| {
            grid.points()
                .map(|t| grid.has_step(axis, t).then(|| step(axis, t)))
                .collect()
        });
        GridModule::from_parts(field, grid, dims, steps).expect("from_fn produces complete parts")
    }

    pub fn zero(field: Field, grid: Grid) -> Self {
        Self::from_fn(field, grid, |_| 0, |_, _| Matrix::zeros(field, 0, 0))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn dim(&self, t: GridPoint) -> usize {
        self.dims[self.grid.index(t)]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// The stored map `t → t + e_axis`, if that step exists.
    pub fn step(&self, axis: usize, t: GridPoint) -> Option<&Matrix> {
        self.steps[axis][self.grid.index(t)].as_ref()
    }

    /// Replaces one step map. Clears the transition cache.
    pub fn set_step(&mut self, axis: usize, t: GridPoint, m: Matrix) -> Result<()> {
        if !self.grid.contains(t) || !self.grid.has_step(axis, t) {
            return Err(Error::IndexOutOfRange {
                axis: axis + 1,
                index: t.0[axis] + 1,
                max: self.grid.cells()[axis] - 1,
            });
        }
        let idx = self.grid.index(t);
        self.steps[axis][idx] = Some(m);
        self.cache.get_mut().expect("cache lock poisoned").clear();
        Ok(())
    }

    /// Lists every shape mismatch and non-commuting adjacent square.
    pub fn validate(&self) -> ValidationReport {
        let g = self.grid;
        let mut problems = Vec::new();
        let mut shapes_ok = true;
        for axis in 0..3 {
            for t in g.points().filter(|&t| g.has_step(axis, t)) {
                let m = self.step(axis, t).expect("present by construction");
                let expected = (self.dim(t.step(axis)), self.dim(t));
                if m.shape() != expected || m.field() != self.field {
                    shapes_ok = false;
                    problems.push(Problem::Shape {
                        axis,
                        at: t,
                        expected,
                        found: m.shape(),
                    });
                }
            }
        }
        if !shapes_ok {
            return ValidationReport { problems };
        }
        for t in g.points() {
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                if !(g.has_step(i, t) && g.has_step(j, t)) {
                    continue;
                }
                let via_i = self.step(j, t.step(i)).unwrap() * self.step(i, t).unwrap();
                let via_j = self.step(i, t.step(j)).unwrap() * self.step(j, t).unwrap();
                if via_i != via_j {
                    problems.push(Problem::NonCommuting {
                        at: t,
                        axes: (i, j),
                    });
                }
            }
        }
        ValidationReport { problems }
    }

    /// `ρ_s^t`, composed along axis 1, then 2, then 3.
    pub fn transition(&self, s: GridPoint, t: GridPoint) -> Result<Matrix> {
        if !self.grid.contains(s) || !self.grid.contains(t) || !s.le(t) {
            return Err(Error::NotOrdered {
                s: s.to_string(),
                t: t.to_string(),
            });
        }
        Ok(self.transition_unchecked(s, t))
    }

    pub(crate) fn transition_unchecked(&self, s: GridPoint, t: GridPoint) -> Matrix {
        if s == t {
            return Matrix::identity(self.field, self.dim(s));
        }
        let key = (self.grid.index(s), self.grid.index(t));
        if let Some(m) = self.cache.read().expect("cache lock poisoned").get(&key) {
            return m.clone();
        }
        let axis = (0..3).find(|&i| s.0[i] < t.0[i]).expect("s < t");
        let next = s.step(axis);
        let step = self.step(axis, s).expect("step inside grid");
        let m = if next == t {
            step.clone()
        } else {
            &self.transition_unchecked(next, t) * step
        };
        self.cache
            .write()
            .expect("cache lock poisoned")
            .insert(key, m.clone());
        m
    }

    /// Restriction to the plane where `axis` equals cell `index` (0-based).
    pub fn restrict_slice(&self, axis: usize, index: usize) -> Result<SliceModule> {
        let cells = self.grid.cells();
        if axis > 2 || index >= cells[axis] {
            return Err(Error::IndexOutOfRange {
                axis: axis + 1,
                index: index + 1,
                max: cells.get(axis).copied().unwrap_or(0),
            });
        }
        let mut sub_cells = cells;
        sub_cells[axis] = 1;
        let sub = Grid::new(sub_cells)?;
        let lift = |t: GridPoint| t.with(axis, index);
        let module = GridModule::from_fn(
            self.field,
            sub,
            |t| self.dim(lift(t)),
            |ax, t| self.step(ax, lift(t)).expect("free axis step").clone(),
        );
        Ok(SliceModule {
            axis,
            index,
            module,
        })
    }

    /// Pointwise dual on the reversed grid: the value at `t` is the dual of
    /// the value at the mirror point, and each step map is the transpose of
    /// the opposite-direction map.
    pub fn dualize(&self) -> GridModule {
        let g = self.grid;
        GridModule::from_fn(
            self.field,
            g,
            |t| self.dim(g.reverse(t)),
            |axis, t| {
                // t → t+e_axis in the dual is rev(t) - e_axis → rev(t) here.
                let upper = g.reverse(t);
                let lower = upper.with(axis, upper.0[axis] - 1);
                self.step(axis, lower).expect("mirrored step").transpose()
            },
        )
    }

    pub fn direct_sum(&self, other: &GridModule) -> Result<GridModule> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{} vs {}",
                self.grid, other.grid
            )));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.prime(),
                right: other.field.prime(),
            });
        }
        Ok(GridModule::from_fn(
            self.field,
            self.grid,
            |t| self.dim(t) + other.dim(t),
            |axis, t| {
                self.step(axis, t)
                    .unwrap()
                    .block_diag(other.step(axis, t).unwrap())
            },
        ))
    }

    /// Conjugates every step map by seeded random changes of basis,
    /// `ρ ↦ P_{t+e} · ρ · P_t⁻¹`. The result is isomorphic to `self`.
    pub fn basis_twist(&self, seed: u64) -> GridModule {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let change: Vec<(Matrix, Matrix)> = self
            .grid
            .points()
            .map(|t| {
                let p = Matrix::random_invertible(self.field, self.dim(t), &mut rng);
                let inv = p.inverse().expect("sampled invertible");
                (p, inv)
            })
            .collect();
        let g = self.grid;
        GridModule::from_fn(
            self.field,
            g,
            |t| self.dim(t),
            |axis, t| {
                let (_, src_inv) = &change[g.index(t)];
                let (dst, _) = &change[g.index(t.step(axis))];
                &(dst * self.step(axis, t).unwrap()) * src_inv
            },
        )
    }

    /// Reinterprets every entry modulo a different prime.
    pub fn with_field(&self, field: Field) -> GridModule {
        GridModule::from_fn(
            field,
            self.grid,
            |t| self.dim(t),
            |axis, t| {
                let m = self.step(axis, t).unwrap();
                Matrix::from_vec(field, m.rows(), m.cols(), m.entries().to_vec())
                    .expect("same shape")
            },
        )
    }
}

impl Clone for GridModule {
    fn clone(&self) -> Self {
        GridModule {
            field: self.field,
            grid: self.grid,
            dims: self.dims.clone(),
            steps: self.steps.clone(),
            cache: RwLock::new(HashMap::new()),
        }
    }
}

impl PartialEq for GridModule {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.grid == other.grid
            && self.dims == other.dims
            && self.steps == other.steps
    }
}

impl fmt::Debug for GridModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridModule")
            .field("prime", &self.field.prime())
            .field("grid", &self.grid)
            .field("dims", &self.dims)
            .finish_non_exhaustive()
    }
}
