//! Image/kernel sections of cuboids, block multiplicities, explicit block
//! submodules and direct-sum verification.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blocks::{enumerate_blocks, AxisInterval, Block, Cuboid, PartitionTag};
use crate::error::{Error, Result};
use crate::exactness::{check_strong_exactness, ExactnessMode};
use crate::grid::{Grid, GridPoint};
use crate::linalg::{apply_to_subspace, image_basis, kernel_basis, Matrix, Subspace};
use crate::module::GridModule;

/// Per-axis images and kernels at `t` for one axis interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisLimits {
    /// Image from the first cell of the interval.
    pub im_plus: Subspace,
    /// Image from the cell just below the interval; zero if there is none.
    pub im_minus: Subspace,
    /// Kernel towards the cell just above the interval; everything if there
    /// is none.
    pub ker_plus: Subspace,
    /// Kernel towards the last cell of the interval.
    pub ker_minus: Subspace,
}

/// Per-axis sections at `t`, moving only along `axis`.
pub fn axis_limits(
    m: &GridModule,
    axis: usize,
    interval: AxisInterval,
    t: GridPoint,
) -> Result<AxisLimits> {
    let AxisInterval { a, b } = interval;
    let cells = m.grid().cells()[axis];
    if !interval.contains(t.0[axis]) || b > cells {
        return Err(Error::PointOutside {
            point: t.to_string(),
            region: format!("axis {} cells {}..{}", axis + 1, a + 1, b),
        });
    }
    let field = m.field();
    let n = m.dim(t);
    let im_plus = image_basis(&m.transition(t.with(axis, a), t)?);
    let im_minus = if a >= 1 {
        image_basis(&m.transition(t.with(axis, a - 1), t)?)
    } else {
        Subspace::zero(field, n)
    };
    let ker_plus = if b < cells {
        kernel_basis(&m.transition(t, t.with(axis, b))?)
    } else {
        Subspace::full(field, n)
    };
    let ker_minus = kernel_basis(&m.transition(t, t.with(axis, b - 1))?);
    Ok(AxisLimits {
        im_plus,
        im_minus,
        ker_plus,
        ker_minus,
    })
}

/// The combined sections of a cuboid at one of its points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSections {
    pub im_plus: Subspace,
    pub im_minus: Subspace,
    pub ker_plus: Subspace,
    pub ker_minus: Subspace,
    pub v_plus: Subspace,
    pub v_minus: Subspace,
    pub f_plus: Subspace,
    pub f_minus: Subspace,
    /// Intersection of the three per-axis `ker_plus`.
    pub k_plus: Subspace,
    pub axes: [AxisLimits; 3],
}

impl BlockSections {
    /// `dim V⁺ − dim V⁻`.
    pub fn count(&self) -> usize {
        self.v_plus.dim() - self.v_minus.dim()
    }
}

fn intersect_all<'a>(mut it: impl Iterator<Item = &'a Subspace>) -> Subspace {
    let first = it.next().expect("nonempty").clone();
    it.fold(first, |acc, s| acc.intersect(s).expect("same ambient"))
}

fn sum_all(field: crate::linalg::Field, n: usize, it: impl Iterator<Item = Subspace>) -> Subspace {
    it.fold(Subspace::zero(field, n), |acc, s| {
        acc.sum(&s).expect("same ambient")
    })
}

pub fn block_sections(m: &GridModule, c: &Cuboid, t: GridPoint) -> Result<BlockSections> {
    if !c.contains(t) || !c.fits(m.grid()) {
        return Err(Error::PointOutside {
            point: t.to_string(),
            region: c.to_string(),
        });
    }
    let axes: [AxisLimits; 3] = [
        axis_limits(m, 0, c.interval(0), t)?,
        axis_limits(m, 1, c.interval(1), t)?,
        axis_limits(m, 2, c.interval(2), t)?,
    ];
    let field = m.field();
    let n = m.dim(t);

    let im_plus = intersect_all(axes.iter().map(|l| &l.im_plus));
    let im_minus = sum_all(
        field,
        n,
        (0..3).map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            intersect_all([&axes[i].im_minus, &axes[j].im_plus, &axes[k].im_plus].into_iter())
        }),
    );
    let ker_minus = sum_all(field, n, axes.iter().map(|l| l.ker_minus.clone()));
    let k_plus = intersect_all(axes.iter().map(|l| &l.ker_plus));
    let ker_plus = ker_minus.sum(&k_plus)?;

    let v_plus = im_plus.intersect(&ker_plus)?;
    let v_minus = im_plus
        .intersect(&ker_minus)?
        .sum(&im_minus.intersect(&ker_plus)?)?;
    let f_plus = im_minus.sum(&v_plus)?;
    let f_minus = im_minus.sum(&v_minus)?;
    Ok(BlockSections {
        im_plus,
        im_minus,
        ker_plus,
        ker_minus,
        v_plus,
        v_minus,
        f_plus,
        f_minus,
        k_plus,
        axes,
    })
}

/// A module known to be 3-parameter strongly exact (exhaustive check).
#[derive(Clone, Debug)]
pub struct ExactModule {
    module: GridModule,
}

impl ExactModule {
    pub fn new(module: GridModule) -> Result<Self> {
        let report = check_strong_exactness(&module, ExactnessMode::Exhaustive)?;
        if !report.overall {
            return Err(Error::NotStronglyExact(Box::new(report)));
        }
        Ok(ExactModule { module })
    }

    pub fn module(&self) -> &GridModule {
        &self.module
    }

    pub fn into_inner(self) -> GridModule {
        self.module
    }
}

/// Multiplicity of the cuboid `c`: `dim V⁺ − dim V⁻` at its least point.
pub fn counting_dim(m: &ExactModule, c: &Cuboid) -> Result<usize> {
    Ok(block_sections(&m.module, c, c.min_corner())?.count())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Entry {
    #[serde(flatten)]
    pub block: Block,
    pub multiplicity: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimsCheck {
    pub at: GridPoint,
    pub dim: usize,
    pub counted: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub verified: bool,
    pub entries: Vec<Entry>,
    pub dims_check: Vec<DimsCheck>,
}

impl DecompositionReport {
    /// `(block, multiplicity)` pairs in report order.
    pub fn multiset(&self) -> Vec<(Block, usize)> {
        self.entries
            .iter()
            .map(|e| (e.block, e.multiplicity))
            .collect()
    }
}

impl fmt::Display for DecompositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<8} {:<9} {:<9} {:>4}", "class", "a", "b", "mult")?;
        for e in &self.entries {
            let [a1, a2, a3] = e.block.a;
            let [b1, b2, b3] = e.block.b;
            writeln!(
                f,
                "{:<8} {:<9} {:<9} {:>4}",
                e.block.class.to_string(),
                format!("{a1},{a2},{a3}"),
                format!("{b1},{b2},{b3}"),
                e.multiplicity
            )?;
        }
        let bad = self
            .dims_check
            .iter()
            .filter(|d| d.dim != d.counted)
            .count();
        writeln!(
            f,
            "conservation: {} ({} points, {} mismatched)",
            if self.verified { "ok" } else { "FAILED" },
            self.dims_check.len(),
            bad
        )
    }
}

fn conservation(grid: Grid, m: &GridModule, entries: &[Entry]) -> Vec<DimsCheck> {
    grid.points()
        .map(|t| DimsCheck {
            at: t,
            dim: m.dim(t),
            counted: entries
                .iter()
                .filter(|e| e.block.contains(t))
                .map(|e| e.multiplicity)
                .sum(),
        })
        .collect()
}

/// Block multiplicities of a strongly exact module, with the pointwise
/// dimension count as a consistency check.
pub fn decompose_exact(m: &ExactModule) -> DecompositionReport {
    let g = m.module.grid();
    let entries: Vec<Entry> = enumerate_blocks(g)
        .par_iter()
        .filter_map(|b| {
            let n = counting_dim(m, &b.cuboid()).expect("blocks fit their grid");
            (n > 0).then_some(Entry {
                block: *b,
                multiplicity: n,
            })
        })
        .collect();
    let dims_check = conservation(g, &m.module, &entries);
    DecompositionReport {
        verified: dims_check.iter().all(|d| d.dim == d.counted),
        entries,
        dims_check,
    }
}

/// Checks strong exactness, then decomposes.
pub fn decompose(m: &GridModule) -> Result<DecompositionReport> {
    Ok(decompose_exact(&ExactModule::new(m.clone())?))
}

/// A family of subspaces, one per grid point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Submodule {
    grid: Grid,
    spaces: Vec<Subspace>,
    /// The space the submodule is generated from, at the block's least point.
    pub generator: Option<Subspace>,
    pub block: Option<Block>,
}

impl Submodule {
    pub fn space(&self, t: GridPoint) -> &Subspace {
        &self.spaces[self.grid.index(t)]
    }

    pub fn dim(&self, t: GridPoint) -> usize {
        self.space(t).dim()
    }

    pub fn spaces(&self) -> &[Subspace] {
        &self.spaces
    }

    /// Whether every step map of `m` sends the space at `t` into the space
    /// at `t + e_axis`.
    pub fn is_closed(&self, m: &GridModule) -> bool {
        let g = self.grid;
        let closed = g.points().all(|t| {
            (0..3).filter(|&axis| g.has_step(axis, t)).all(|axis| {
                let step = m.step(axis, t).expect("step exists");
                apply_to_subspace(step, self.space(t))
                    .and_then(|img| img.is_subspace_of(self.space(t.step(axis))))
                    .unwrap_or(false)
            })
        });
        closed
    }
}

/// The generating space for `b` at its least point: a complement of the
/// part already accounted for by smaller sections.
fn generator_space(m: &GridModule, b: &Block) -> Result<Subspace> {
    let t0 = b.min_corner();
    let s = block_sections(m, &b.cuboid(), t0)?;
    let inner = match b.class {
        crate::blocks::BlockClass::Birth => return s.v_minus.complement_in(&s.v_plus),
        crate::blocks::BlockClass::Death => s.k_plus.clone(),
        crate::blocks::BlockClass::Layer(i) => s.axes[i].im_plus.intersect(&s.axes[i].ker_plus)?,
    };
    s.v_minus.intersect(&inner)?.complement_in(&inner)
}

/// Transports `generator` from the least point of `b` to every point of `b`
/// and checks that it is carried injectively inside `b` and dies on exit.
fn propagate(m: &GridModule, b: &Block, generator: Subspace) -> Result<Submodule> {
    let g = m.grid();
    let t0 = b.min_corner();
    let k = generator.dim();
    let spaces: Vec<Subspace> = g
        .points()
        .map(|t| {
            if b.contains(t) {
                apply_to_subspace(&m.transition(t0, t)?, &generator)
            } else {
                Ok(Subspace::zero(m.field(), m.dim(t)))
            }
        })
        .collect::<Result<_>>()?;
    for t in g.points().filter(|&t| b.contains(t)) {
        let here = &spaces[g.index(t)];
        if here.dim() != k {
            return Err(Error::Internal(format!(
                "block {b}: generator of dim {k} has dim {} at {t}",
                here.dim()
            )));
        }
        for axis in (0..3).filter(|&axis| g.has_step(axis, t)) {
            let next = t.step(axis);
            if !b.contains(next) {
                let out = apply_to_subspace(m.step(axis, t).expect("step"), here)?;
                if !out.is_zero() {
                    return Err(Error::Internal(format!(
                        "block {b}: submodule survives the step from {t} to {next}"
                    )));
                }
            }
        }
    }
    Ok(Submodule {
        grid: g,
        spaces,
        generator: Some(generator),
        block: Some(*b),
    })
}

/// The submodule generated by all copies of `b`.
pub fn extract_submodule(m: &ExactModule, b: &Block) -> Result<Submodule> {
    let module = &m.module;
    if !b.is_valid_on(module.grid()) {
        return Err(Error::InvalidBlock(format!("{b} on {}", module.grid())));
    }
    let generator = generator_space(module, b)?;
    let expected = counting_dim(m, &b.cuboid())?;
    if generator.dim() != expected {
        return Err(Error::Internal(format!(
            "block {b}: complement has dim {}, multiplicity is {expected}",
            generator.dim()
        )));
    }
    propagate(module, b, generator)
}

/// `Im⁺ ∩ Ker⁻` of the whole grid at every point.
pub fn tilde_module(m: &ExactModule) -> Submodule {
    let module = &m.module;
    let g = module.grid();
    let full = Cuboid::full(g);
    let spaces = g
        .points()
        .map(|t| {
            let s = block_sections(module, &full, t).expect("every point is in the grid");
            s.im_plus.intersect(&s.ker_minus).expect("same ambient")
        })
        .collect();
    Submodule {
        grid: g,
        spaces,
        generator: None,
        block: None,
    }
}

/// Whether `parts` are independent and together span the module, i.e. the
/// dimensions add up and the stacked bases have full rank at every point.
fn is_direct_sum(m: &GridModule, parts: &[&Submodule]) -> bool {
    m.grid().points().all(|t| {
        let n = m.dim(t);
        let total: usize = parts.iter().map(|p| p.dim(t)).sum();
        if total != n {
            return false;
        }
        let mut stacked = Matrix::zeros(m.field(), 0, n);
        for p in parts {
            stacked = stacked.vstack(p.space(t).basis()).expect("same ambient");
        }
        stacked.rank() == n
    })
}

/// Extracts every listed block, keeping as many generators as the reported
/// multiplicity, and checks that the pieces form a direct sum of the module.
pub fn verify_direct_sum(m: &ExactModule, report: &DecompositionReport) -> bool {
    let module = &m.module;
    let g = module.grid();
    let mut parts = Vec::with_capacity(report.entries.len());
    for e in &report.entries {
        if e.multiplicity == 0 || !e.block.is_valid_on(g) {
            return false;
        }
        let Ok(generator) = generator_space(module, &e.block) else {
            return false;
        };
        if generator.dim() < e.multiplicity {
            return false;
        }
        match propagate(module, &e.block, generator.truncate(e.multiplicity)) {
            Ok(sub) => parts.push(sub),
            Err(_) => return false,
        }
    }
    let refs: Vec<&Submodule> = parts.iter().collect();
    is_direct_sum(module, &refs)
}

/// Checks the split of the module into the whole-grid section `M̃` and the
/// layer and birth block submodules, and that `M̃` is exactly the sum of the
/// death block submodules.
pub fn tilde_split_holds(m: &ExactModule) -> Result<bool> {
    let module = &m.module;
    let tilde = tilde_module(m);
    if !tilde.is_closed(module) {
        return Ok(false);
    }
    let mut rest = Vec::new();
    let mut deaths = Vec::new();
    for e in decompose_exact(m).entries {
        let sub = extract_submodule(m, &e.block)?;
        if e.block.partition_tag() == PartitionTag::B4 {
            deaths.push(sub);
        } else {
            rest.push(sub);
        }
    }
    let mut parts: Vec<&Submodule> = vec![&tilde];
    parts.extend(rest.iter());
    if !is_direct_sum(module, &parts) {
        return Ok(false);
    }
    Ok(module.grid().points().all(|t| {
        let span = deaths
            .iter()
            .fold(Subspace::zero(module.field(), module.dim(t)), |acc, d| {
                acc.sum(d.space(t)).expect("same ambient")
            });
        &span == tilde.space(t)
    }))
}
