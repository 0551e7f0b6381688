//! Modules with known structure: block modules, seeded random block sums,
//! a small non-decomposable cube, and perturbations for fuzzing.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blocks::{enumerate_blocks, Block, Cuboid};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridPoint};
use crate::linalg::{Field, Matrix};
use crate::module::GridModule;

/// The module that is one-dimensional on `c` with identity maps inside `c`
/// and zero everywhere else.
pub fn block_module(field: Field, grid: Grid, c: &Cuboid) -> GridModule {
    GridModule::from_fn(
        field,
        grid,
        |t| usize::from(c.contains(t)),
        |axis, t| {
            let (from, to) = (c.contains(t), c.contains(t.step(axis)));
            match (from, to) {
                (true, true) => Matrix::identity(field, 1),
                _ => Matrix::zeros(field, usize::from(to), usize::from(from)),
            }
        },
    )
}

/// A module together with the block multiset it was built from.
#[derive(Clone, Debug)]
pub struct GroundTruth {
    pub module: GridModule,
    /// Sorted by block.
    pub multiset: Vec<(Block, usize)>,
}

/// Direct sum of `k ∈ 1..=max_blocks` distinct random blocks, each with a
/// multiplicity in `1..=max_mult`. `max_blocks = 0` gives the zero module.
pub fn random_block_sum(
    field: Field,
    grid: Grid,
    seed: u64,
    max_blocks: usize,
    max_mult: usize,
) -> GroundTruth {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = enumerate_blocks(grid);
    let max_blocks = max_blocks.min(blocks.len());
    if max_blocks == 0 || max_mult == 0 {
        return GroundTruth {
            module: GridModule::zero(field, grid),
            multiset: Vec::new(),
        };
    }
    let k = rng.gen_range(1..=max_blocks);
    let mut multiset: Vec<(Block, usize)> = sample(&mut rng, blocks.len(), k)
        .into_iter()
        .map(|i| (blocks[i], rng.gen_range(1..=max_mult)))
        .collect();
    multiset.sort();
    let mut module = GridModule::zero(field, grid);
    for &(b, mult) in &multiset {
        let one = block_module(field, grid, &b.cuboid());
        for _ in 0..mult {
            module = module.direct_sum(&one).expect("same grid and field");
        }
    }
    GroundTruth { module, multiset }
}

/// A commutative cube on the `2×2×2` grid that is not a sum of block
/// modules: three lines at the upper corners of the middle layer meet in a
/// plane at the top through `f = (1,0)ᵀ`, `g = (0,1)ᵀ` and `h = (1,1)ᵀ`.
pub fn counterexample(field: Field) -> GridModule {
    let grid = Grid::new([2, 2, 2]).expect("valid grid");
    GridModule::from_fn(
        field,
        grid,
        |t| match t.0.iter().sum::<usize>() {
            0 | 1 => 0,
            2 => 1,
            _ => 2,
        },
        |axis, t| {
            let into_top = t.step(axis) == GridPoint([1, 1, 1]);
            match axis {
                0 if into_top => Matrix::column(field, &[1, 0]),
                1 if into_top => Matrix::column(field, &[0, 1]),
                2 if into_top => Matrix::column(field, &[1, 1]),
                _ => {
                    let rows = usize::from(t.step(axis).0.iter().sum::<usize>() >= 2);
                    let cols = usize::from(t.0.iter().sum::<usize>() >= 2);
                    Matrix::zeros(field, rows, cols)
                }
            }
        },
    )
}

/// Mutations tried before giving up.
pub const PERTURB_ATTEMPTS: usize = 200;

/// Changes one random entry of one step map and then restores
/// commutativity by re-solving for the upper edges of every square the
/// change broke, sweeping squares from the bottom of the grid upwards. The
/// mutated map itself is never changed again; mutations whose repair does
/// not converge are discarded and a fresh one is drawn.
pub fn perturb(m: &GridModule, seed: u64) -> Result<GridModule> {
    let g = m.grid();
    let candidates: Vec<(usize, GridPoint)> = (0..3)
        .flat_map(|axis| g.points().map(move |t| (axis, t)))
        .filter(|&(axis, t)| {
            m.step(axis, t)
                .is_some_and(|s| s.rows() > 0 && s.cols() > 0)
        })
        .collect();
    if candidates.is_empty() {
        return Ok(m.clone());
    }
    let field = m.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..PERTURB_ATTEMPTS {
        let (axis, t) = candidates[rng.gen_range(0..candidates.len())];
        let mut step = m.step(axis, t).expect("candidate").clone();
        let (r, c) = (rng.gen_range(0..step.rows()), rng.gen_range(0..step.cols()));
        let old = step.get(r, c);
        let new = (old + rng.gen_range(1..field.prime())) % field.prime();
        step.set(r, c, new);
        let mut out = m.clone();
        out.set_step(axis, t, step)?;
        if repair(&mut out, (axis, t)) {
            return Ok(out);
        }
    }
    Err(Error::PerturbBudgetExhausted(PERTURB_ATTEMPTS))
}

/// Squares `(t, i, j)` with `i < j` whose two paths disagree, ordered by
/// the level of `t`, then lexicographically.
fn broken_squares(m: &GridModule) -> Vec<(GridPoint, usize, usize)> {
    let g = m.grid();
    let mut out: Vec<_> = g
        .points()
        .flat_map(|t| [(t, 0, 1), (t, 0, 2), (t, 1, 2)])
        .filter(|&(t, i, j)| {
            g.has_step(i, t) && g.has_step(j, t) && {
                let via_i = m.step(j, t.step(i)).unwrap() * m.step(i, t).unwrap();
                let via_j = m.step(i, t.step(j)).unwrap() * m.step(j, t).unwrap();
                via_i != via_j
            }
        })
        .collect();
    out.sort_by_key(|&(t, i, j)| (t.0.iter().sum::<usize>(), t, i, j));
    out
}

/// Replaces the edge `x` (from the corner reached by `first`) so that
/// `x · first = other`, changing `x` as little as a particular solution
/// allows. Returns false when no such `x` exists.
fn solve_top_edge(x: &Matrix, first: &Matrix, other: &Matrix) -> Option<Matrix> {
    // x' = x + Δ with Δ · first = other − x · first.
    let residual = other.try_add(&(x * first).neg()).ok()?;
    let delta_t = first.transpose().solve(&residual.transpose())?;
    x.try_add(&delta_t.transpose()).ok()
}

fn repair(m: &mut GridModule, frozen: (usize, GridPoint)) -> bool {
    let max_sweeps = 4 * m.grid().len() + 8;
    for _ in 0..max_sweeps {
        let broken = broken_squares(m);
        let Some(&(t, i, j)) = broken.first() else {
            return true;
        };
        // Top edges: step_j at t+e_i and step_i at t+e_j.
        let mut fixed = false;
        for (top_axis, top_at, bottom_axis, other_top, other_bottom) in [
            (j, t.step(i), i, (i, t.step(j)), j),
            (i, t.step(j), j, (j, t.step(i)), i),
        ] {
            if (top_axis, top_at) == frozen {
                continue;
            }
            let x = m.step(top_axis, top_at).unwrap();
            let first = m.step(bottom_axis, t).unwrap();
            let other =
                m.step(other_top.0, other_top.1).unwrap() * m.step(other_bottom, t).unwrap();
            if let Some(new) = solve_top_edge(x, first, &other) {
                m.set_step(top_axis, top_at, new).expect("shape preserved");
                fixed = true;
                break;
            }
        }
        if !fixed {
            return false;
        }
    }
    broken_squares(m).is_empty()
}
