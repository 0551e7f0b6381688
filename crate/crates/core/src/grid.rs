use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite 3-D grid of cells, `cells[i]` cells along axis `i`.
///
/// Points are 0-based internally and in files; they render 1-based, so the
/// first cell on each axis prints as `1`. The first cell of an axis stands
/// for the ray down to −∞ and the last one for the ray up to +∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    cells: [usize; 3],
}

/// A cell index triple. Ordered lexicographically; the product order is
/// [`GridPoint::le`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridPoint(pub [usize; 3]);

impl GridPoint {
    pub const ORIGIN: GridPoint = GridPoint([0, 0, 0]);

    #[inline]
    pub fn coords(self) -> [usize; 3] {
        self.0
    }

    /// Componentwise `self ≤ other`.
    #[inline]
    pub fn le(self, other: GridPoint) -> bool {
        (0..3).all(|i| self.0[i] <= other.0[i])
    }

    /// Componentwise strict on every axis.
    #[inline]
    pub fn strictly_below(self, other: GridPoint) -> bool {
        (0..3).all(|i| self.0[i] < other.0[i])
    }

    /// `self + e_axis`.
    #[inline]
    pub fn step(self, axis: usize) -> GridPoint {
        let mut c = self.0;
        c[axis] += 1;
        GridPoint(c)
    }

    #[inline]
    pub fn with(self, axis: usize, value: usize) -> GridPoint {
        let mut c = self.0;
        c[axis] = value;
        GridPoint(c)
    }

    /// Corner of the cube spanned by `self ≤ upper`: axis `i` takes the
    /// upper coordinate iff bit `i` of `mask` is set.
    #[inline]
    pub fn corner(self, upper: GridPoint, mask: usize) -> GridPoint {
        let mut c = self.0;
        for (i, slot) in c.iter_mut().enumerate() {
            if mask & (1 << i) != 0 {
                *slot = upper.0[i];
            }
        }
        GridPoint(c)
    }

    /// 1-based coordinates, as used in rendered reports.
    pub fn one_based(self) -> [usize; 3] {
        self.0.map(|x| x + 1)
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.one_based();
        write!(f, "({a},{b},{c})")
    }
}

impl Grid {
    pub fn new(cells: [usize; 3]) -> Result<Self> {
        if cells.contains(&0) {
            return Err(Error::InvalidGrid(format!(
                "every axis needs at least one cell, got {cells:?}"
            )));
        }
        Ok(Grid { cells })
    }

    #[inline]
    pub fn cells(&self) -> [usize; 3] {
        self.cells
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: GridPoint) -> bool {
        (0..3).all(|i| t.0[i] < self.cells[i])
    }

    /// Flat index, axis 1 slowest.
    #[inline]
    pub fn index(&self, t: GridPoint) -> usize {
        debug_assert!(self.contains(t));
        let [_, m2, m3] = self.cells;
        (t.0[0] * m2 + t.0[1]) * m3 + t.0[2]
    }

    #[inline]
    pub fn point(&self, index: usize) -> GridPoint {
        let [_, m2, m3] = self.cells;
        GridPoint([index / (m2 * m3), (index / m3) % m2, index % m3])
    }

    /// All points in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = GridPoint> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Whether `t + e_axis` is still on the grid.
    #[inline]
    pub fn has_step(&self, axis: usize, t: GridPoint) -> bool {
        t.0[axis] + 1 < self.cells[axis]
    }

    /// Mirror image of `t` under reversal of every axis.
    pub fn reverse(&self, t: GridPoint) -> GridPoint {
        GridPoint([0, 1, 2].map(|i| self.cells[i] - 1 - t.0[i]))
    }

    /// All comparable pairs `s ≤ t`, lexicographic in `(s, t)`.
    pub fn ordered_pairs(&self) -> Vec<(GridPoint, GridPoint)> {
        let pts: Vec<_> = self.points().collect();
        let mut out = Vec::new();
        for &s in &pts {
            for &t in &pts {
                if s.le(t) {
                    out.push((s, t));
                }
            }
        }
        out
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.cells;
        write!(f, "{a}x{b}x{c}")
    }
}
