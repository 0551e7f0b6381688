//! Cuboids, blocks and their classification on a finite grid.
//!
//! Cut positions live in `0..=m` on an axis with `m` cells: position `p`
//! separates cells `0..p` from cells `p..m`. An axis interval `a < b` covers
//! cells `a..b`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridPoint};

/// Cells `a..b` of one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AxisInterval {
    pub a: usize,
    pub b: usize,
}

impl AxisInterval {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a >= b {
            return Err(Error::InvalidBlock(format!("empty interval {a}..{b}")));
        }
        Ok(AxisInterval { a, b })
    }

    #[inline]
    pub fn contains(self, cell: usize) -> bool {
        self.a <= cell && cell < self.b
    }
}

/// A product of three axis intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cuboid {
    pub a: [usize; 3],
    pub b: [usize; 3],
}

impl Cuboid {
    pub fn new(grid: Grid, a: [usize; 3], b: [usize; 3]) -> Result<Self> {
        let m = grid.cells();
        for i in 0..3 {
            if a[i] >= b[i] || b[i] > m[i] {
                return Err(Error::InvalidBlock(format!(
                    "axis {} cuts {}..{} invalid for {} cells",
                    i + 1,
                    a[i],
                    b[i],
                    m[i]
                )));
            }
        }
        Ok(Cuboid { a, b })
    }

    pub fn full(grid: Grid) -> Self {
        Cuboid {
            a: [0; 3],
            b: grid.cells(),
        }
    }

    pub fn interval(&self, axis: usize) -> AxisInterval {
        AxisInterval {
            a: self.a[axis],
            b: self.b[axis],
        }
    }

    pub fn fits(&self, grid: Grid) -> bool {
        let m = grid.cells();
        (0..3).all(|i| self.a[i] < self.b[i] && self.b[i] <= m[i])
    }

    #[inline]
    pub fn contains(&self, t: GridPoint) -> bool {
        (0..3).all(|i| self.interval(i).contains(t.0[i]))
    }

    pub fn min_corner(&self) -> GridPoint {
        GridPoint(self.a)
    }

    pub fn is_full(&self, grid: Grid) -> bool {
        *self == Cuboid::full(grid)
    }

    /// The cuboid under the axis reversal `x ↦ m − 1 − x`.
    pub fn reversed(&self, grid: Grid) -> Cuboid {
        let m = grid.cells();
        Cuboid {
            a: std::array::from_fn(|i| m[i] - self.b[i]),
            b: std::array::from_fn(|i| m[i] - self.a[i]),
        }
    }

    /// The class of this cuboid if it is a block, with precedence
    /// birth > death > strict layer.
    pub fn classify(&self, grid: Grid) -> Option<BlockClass> {
        let m = grid.cells();
        if (0..3).all(|i| self.b[i] == m[i]) {
            return Some(BlockClass::Birth);
        }
        if self.a.iter().all(|&a| a == 0) {
            return Some(BlockClass::Death);
        }
        (0..3)
            .find(|&i| {
                (0..3).all(|j| j == i || (self.a[j] == 0 && self.b[j] == m[j]))
                    && 1 <= self.a[i]
                    && self.b[i] < m[i]
            })
            .map(BlockClass::Layer)
    }
}

impl fmt::Display for Cuboid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{}]x[{},{}]x[{},{}]",
            self.a[0], self.b[0], self.a[1], self.b[1], self.a[2], self.b[2]
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockClass {
    /// Strict layer bounded on the given axis and full on the other two.
    Layer(usize),
    Birth,
    Death,
}

impl fmt::Display for BlockClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockClass::Layer(i) => write!(f, "layer{}", i + 1),
            BlockClass::Birth => f.write_str("birth"),
            BlockClass::Death => f.write_str("death"),
        }
    }
}

impl FromStr for BlockClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "birth" => Ok(BlockClass::Birth),
            "death" => Ok(BlockClass::Death),
            "layer1" => Ok(BlockClass::Layer(0)),
            "layer2" => Ok(BlockClass::Layer(1)),
            "layer3" => Ok(BlockClass::Layer(2)),
            other => Err(format!("unknown block class {other:?}")),
        }
    }
}

impl Serialize for BlockClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BlockClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Bookkeeping groups used when splitting a module into the part carried by
/// death blocks and the rest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PartitionTag {
    B1,
    B2,
    B3,
    B4,
    B5,
}

/// A classified cuboid. Ordered by its cut positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block {
    pub a: [usize; 3],
    pub b: [usize; 3],
    pub class: BlockClass,
}

impl Block {
    pub fn new(grid: Grid, a: [usize; 3], b: [usize; 3]) -> Result<Self> {
        let cuboid = Cuboid::new(grid, a, b)?;
        let class = cuboid
            .classify(grid)
            .ok_or_else(|| Error::InvalidBlock(format!("{cuboid} is not a block on {grid}")))?;
        Ok(Block { a, b, class })
    }

    pub fn full(grid: Grid) -> Self {
        Block {
            a: [0; 3],
            b: grid.cells(),
            class: BlockClass::Birth,
        }
    }

    pub fn cuboid(&self) -> Cuboid {
        Cuboid {
            a: self.a,
            b: self.b,
        }
    }

    /// Whether the cuts fit `grid` and the stored class is the right one.
    pub fn is_valid_on(&self, grid: Grid) -> bool {
        let c = self.cuboid();
        c.fits(grid) && c.classify(grid) == Some(self.class)
    }

    #[inline]
    pub fn contains(&self, t: GridPoint) -> bool {
        self.cuboid().contains(t)
    }

    pub fn min_corner(&self) -> GridPoint {
        GridPoint(self.a)
    }

    pub fn partition_tag(&self) -> PartitionTag {
        match self.class {
            BlockClass::Layer(0) => PartitionTag::B1,
            BlockClass::Layer(1) => PartitionTag::B2,
            BlockClass::Layer(_) => PartitionTag::B3,
            BlockClass::Death => PartitionTag::B4,
            BlockClass::Birth => PartitionTag::B5,
        }
    }

    /// The block under axis reversal, reclassified.
    pub fn reversed(&self, grid: Grid) -> Block {
        let c = self.cuboid().reversed(grid);
        Block {
            a: c.a,
            b: c.b,
            class: c.classify(grid).expect("reversal maps blocks to blocks"),
        }
    }

    /// Number of grid points in the block.
    pub fn volume(&self) -> usize {
        (0..3).map(|i| self.b[i] - self.a[i]).product()
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.class, self.cuboid())
    }
}

/// All blocks of `grid`, each cell set once, sorted by cut positions.
pub fn enumerate_blocks(grid: Grid) -> Vec<Block> {
    let m = grid.cells();
    let mut out = Vec::new();
    for a0 in 0..m[0] {
        for a1 in 0..m[1] {
            for a2 in 0..m[2] {
                for b0 in a0 + 1..=m[0] {
                    for b1 in a1 + 1..=m[1] {
                        for b2 in a2 + 1..=m[2] {
                            let c = Cuboid {
                                a: [a0, a1, a2],
                                b: [b0, b1, b2],
                            };
                            if let Some(class) = c.classify(grid) {
                                out.push(Block {
                                    a: c.a,
                                    b: c.b,
                                    class,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// `2∏m − 1 + Σ C(m_i − 1, 2)`.
pub fn block_count(grid: Grid) -> usize {
    let m = grid.cells();
    let prod: usize = m.iter().product();
    let layers: usize = m
        .iter()
        .map(|&k| if k >= 3 { (k - 1) * (k - 2) / 2 } else { 0 })
        .sum();
    2 * prod - 1 + layers
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(m: [usize; 3]) -> Grid {
        Grid::new(m).unwrap()
    }

    #[test]
    fn single_cell_grid_has_one_block() {
        let g = grid([1, 1, 1]);
        let blocks = enumerate_blocks(g);
        assert_eq!(blocks, vec![Block::full(g)]);
        assert_eq!(blocks[0].partition_tag(), PartitionTag::B5);
    }

    #[test]
    fn two_cell_line() {
        let g = grid([2, 1, 1]);
        let blocks = enumerate_blocks(g);
        assert_eq!(blocks.len(), 3);
        assert!(blocks.contains(&Block::full(g)));
        assert!(blocks.contains(&Block::new(g, [1, 0, 0], [2, 1, 1]).unwrap()));
        let death = Block::new(g, [0, 0, 0], [1, 1, 1]).unwrap();
        assert_eq!(death.class, BlockClass::Death);
        assert!(blocks.contains(&death));
    }

    #[test]
    fn cube_of_side_two_has_fifteen() {
        let g = grid([2, 2, 2]);
        let blocks = enumerate_blocks(g);
        let births = blocks
            .iter()
            .filter(|b| b.class == BlockClass::Birth)
            .count();
        let deaths = blocks
            .iter()
            .filter(|b| b.class == BlockClass::Death)
            .count();
        assert_eq!((births, deaths, blocks.len()), (8, 7, 15));
    }

    #[test]
    fn counts_match_formula_and_are_distinct() {
        for m1 in 1..=4 {
            for m2 in 1..=4 {
                for m3 in 1..=4 {
                    let g = grid([m1, m2, m3]);
                    let blocks = enumerate_blocks(g);
                    assert_eq!(blocks.len(), block_count(g), "{g}");
                    let mut sorted = blocks.clone();
                    sorted.sort();
                    sorted.dedup_by_key(|b| b.cuboid());
                    assert_eq!(sorted, blocks);
                }
            }
        }
    }

    #[test]
    fn membership_and_corner() {
        let g = grid([2, 2, 2]);
        let b = Block::new(g, [1, 0, 0], [2, 2, 2]).unwrap();
        assert_eq!(b.min_corner(), GridPoint([1, 0, 0]));
        assert_eq!(b.min_corner().to_string(), "(2,1,1)");
        assert!(b.contains(b.min_corner()));
        assert!(!b.contains(GridPoint([0, 1, 1])));
        assert!(g.points().all(|t| Block::full(g).contains(t)));
    }

    #[test]
    fn tags_and_layers() {
        let g = grid([3, 4, 3]);
        let layer = Block::new(g, [0, 1, 0], [3, 3, 3]).unwrap();
        assert_eq!(layer.class, BlockClass::Layer(1));
        assert_eq!(layer.partition_tag(), PartitionTag::B2);
        let death = Block::new(g, [0, 0, 0], [3, 2, 3]).unwrap();
        assert_eq!(death.partition_tag(), PartitionTag::B4);
        assert!(Block::new(g, [1, 1, 0], [2, 2, 3]).is_err());
    }

    #[test]
    fn reversal_swaps_birth_and_death() {
        let g = grid([3, 3, 2]);
        for b in enumerate_blocks(g) {
            let r = b.reversed(g);
            assert_eq!(r.reversed(g), b);
            match b.class {
                BlockClass::Birth if b.cuboid().is_full(g) => assert_eq!(r, b),
                BlockClass::Birth => assert_eq!(r.class, BlockClass::Death),
                BlockClass::Death => assert_eq!(r.class, BlockClass::Birth),
                BlockClass::Layer(i) => assert_eq!(r.class, BlockClass::Layer(i)),
            }
        }
    }

    #[test]
    fn serializes_with_class_name() {
        let g = grid([3, 3, 3]);
        let b = Block::new(g, [1, 0, 0], [2, 3, 3]).unwrap();
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(json, r#"{"a":[1,0,0],"b":[2,3,3],"class":"layer1"}"#);
        assert_eq!(serde_json::from_str::<Block>(&json).unwrap(), b);
    }
}
