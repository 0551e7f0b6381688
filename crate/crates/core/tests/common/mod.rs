#![allow(dead_code)]

use std::collections::HashSet;

use blockcube::decomposer::{axis_limits, block_sections};
use blockcube::linalg::{apply_to_subspace, kernel_basis, preimage};
use blockcube::{
    enumerate_blocks, random_block_sum, AxisInterval, Block, CubeDiagram, Cuboid, Field, Grid,
    GridModule, GridPoint, Matrix, SquareDiagram, Subspace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Grid shapes used for random test modules, all small enough for
/// exhaustive checks.
pub const SHAPES: [[usize; 3]; 8] = [
    [3, 3, 3],
    [4, 3, 2],
    [2, 4, 3],
    [3, 2, 4],
    [4, 4, 2],
    [2, 2, 2],
    [3, 3, 1],
    [4, 1, 3],
];

/// A twisted random block sum and its multiset.
pub fn sample_exact(
    seed: u64,
    max_blocks: usize,
    max_mult: usize,
) -> (GridModule, Vec<(Block, usize)>) {
    let grid = Grid::new(SHAPES[seed as usize % SHAPES.len()]).unwrap();
    let truth = random_block_sum(Field::default(), grid, seed, max_blocks, max_mult);
    (truth.module.basis_twist(seed ^ 0x5eed), truth.multiset)
}

/// A random commuting square. `g1, g2` are random; `A` maps into the
/// pullback through a random matrix whose rank may fall short, and may
/// carry extra dimensions that map to zero.
pub fn random_square(rng: &mut ChaCha8Rng, field: Field) -> SquareDiagram {
    let (b, c, d) = (
        rng.gen_range(0..4),
        rng.gen_range(0..4),
        rng.gen_range(0..4),
    );
    let g1 = Matrix::random(field, d, b, rng);
    let g2 = Matrix::random(field, d, c, rng);
    let pullback = kernel_basis(&g1.hstack(&g2.neg()).unwrap());
    let k = pullback.dim();
    let a = rng.gen_range(0..=k + 2);
    // Sparse coefficients make rank deficits common.
    let mut coeff = Matrix::zeros(field, k, a);
    for i in 0..k {
        for j in 0..a {
            if rng.gen_bool(0.4) {
                coeff.set(i, j, rng.gen_range(1..field.prime()));
            }
        }
    }
    let f = &pullback.basis().transpose() * &coeff;
    let f1 = f.select_rows(0..b);
    let f2 = f.select_rows(b..b + c);
    SquareDiagram::new(f1, f2, g1, g2).unwrap()
}

/// Every vector of `GF(p)^n`.
fn all_vectors(p: u32, n: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (p as usize).pow(n as u32);
    (0..total).map(move |mut idx| {
        (0..n)
            .map(|_| {
                let x = (idx % p as usize) as u32;
                idx /= p as usize;
                x
            })
            .collect()
    })
}

const SINGLETONS: [usize; 3] = [0b001, 0b010, 0b100];
const PAIRS: [usize; 3] = [0b011, 0b101, 0b110];

/// Surjectivity of the map from the bottom corner to the compatible
/// families, by enumeration. A compatible family over the nonempty subsets
/// is fixed by its values at the three singletons, subject to agreement at
/// each pair.
pub fn brute_psi(c: &CubeDiagram, p: u32) -> bool {
    let d = c.dims();
    let n: usize = SINGLETONS.iter().map(|&s| d[s]).sum();
    let split = |v: &[u32]| -> [Vec<u32>; 3] {
        let (x1, rest) = v.split_at(d[SINGLETONS[0]]);
        let (x2, x3) = rest.split_at(d[SINGLETONS[1]]);
        [x1.to_vec(), x2.to_vec(), x3.to_vec()]
    };
    let compatible = all_vectors(p, n)
        .filter(|v| {
            let xs = split(v);
            PAIRS.iter().all(|&pair| {
                let inside: Vec<usize> = (0..3).filter(|&i| pair & SINGLETONS[i] != 0).collect();
                let (i, j) = (inside[0], inside[1]);
                c.map(SINGLETONS[i], pair).apply(&xs[i]) == c.map(SINGLETONS[j], pair).apply(&xs[j])
            })
        })
        .count();
    let images: HashSet<Vec<u32>> = all_vectors(p, d[0])
        .map(|x| {
            SINGLETONS
                .iter()
                .flat_map(|&s| c.map(0, s).apply(&x))
                .collect()
        })
        .collect();
    images.len() == compatible
}

/// Injectivity of the map from the colimit to the top corner, by
/// enumeration. The colimit over proper subsets is generated by the three
/// pairs, glued along the images of the singletons; injectivity means every
/// triple of pair elements summing to zero at the top is a sum of gluing
/// relations.
pub fn brute_phi(c: &CubeDiagram, p: u32) -> bool {
    let d = c.dims();
    let n: usize = PAIRS.iter().map(|&s| d[s]).sum();
    let offsets = [0, d[PAIRS[0]], d[PAIRS[0]] + d[PAIRS[1]]];
    let top = 0b111;
    let kernel = all_vectors(p, n)
        .filter(|v| {
            let mut acc = vec![0u32; d[top]];
            for (k, &pair) in PAIRS.iter().enumerate() {
                let part = &v[offsets[k]..offsets[k] + d[pair]];
                for (slot, y) in acc.iter_mut().zip(c.map(pair, top).apply(part)) {
                    *slot = (*slot + y) % p;
                }
            }
            acc.iter().all(|&x| x == 0)
        })
        .count();
    let m: usize = SINGLETONS.iter().map(|&s| d[s]).sum();
    let mut relations: HashSet<Vec<u32>> = HashSet::new();
    for v in all_vectors(p, m) {
        let mut out = vec![0u32; n];
        let mut off = 0;
        for &s in &SINGLETONS {
            let x = &v[off..off + d[s]];
            off += d[s];
            let containing: Vec<usize> = (0..3).filter(|&k| PAIRS[k] & s != 0).collect();
            // +x in the first pair containing s, −x in the second.
            for (sign, &k) in [1u32, p - 1].iter().zip(&containing) {
                let y = c.map(s, PAIRS[k]).apply(x);
                for (r, yv) in y.into_iter().enumerate() {
                    let slot = &mut out[offsets[k] + r];
                    *slot = (*slot + sign * yv) % p;
                }
            }
        }
        relations.insert(out);
    }
    relations.len() == kernel
}

/// Image of `ρ` restricted to `axis`, from cell `from` to `t`.
fn axis_image(m: &GridModule, axis: usize, from: usize, t: GridPoint) -> Subspace {
    image_basis_of(&m.transition(t.with(axis, from), t).unwrap())
}

fn image_basis_of(x: &Matrix) -> Subspace {
    blockcube::linalg::image_basis(x)
}

fn sum(field: Field, n: usize, parts: impl IntoIterator<Item = Subspace>) -> Subspace {
    parts
        .into_iter()
        .fold(Subspace::zero(field, n), |acc, s| acc.sum(&s).unwrap())
}

fn meet(parts: impl IntoIterator<Item = Subspace>) -> Subspace {
    let mut it = parts.into_iter();
    let first = it.next().unwrap();
    it.fold(first, |acc, s| acc.intersect(&s).unwrap())
}

fn le_pairs(g: Grid) -> Vec<(GridPoint, GridPoint)> {
    g.ordered_pairs()
}

/// The image of `ρ_s^t` is the intersection of the images from the three
/// corners next to `t`, and its kernel the sum of the kernels towards the
/// three corners next to `s`.
pub fn check_transition_splitting(m: &GridModule) -> Result<usize, String> {
    let mut checked = 0;
    for (s, t) in le_pairs(m.grid()) {
        let rho = m.transition(s, t).unwrap();
        let im = image_basis_of(&rho);
        let near_t = meet((0..3).map(|i| axis_image(m, i, s.0[i], t)));
        if im != near_t {
            return Err(format!("image splitting fails for {s} -> {t}"));
        }
        let ker = kernel_basis(&rho);
        let near_s = sum(
            m.field(),
            m.dim(s),
            (0..3).map(|i| kernel_basis(&m.transition(s, s.with(i, t.0[i])).unwrap())),
        );
        if ker != near_s {
            return Err(format!("kernel splitting fails for {s} -> {t}"));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Per-axis image section at `t` for lower cut `a` and sign.
fn im_section(m: &GridModule, axis: usize, a: usize, plus: bool, t: GridPoint) -> Subspace {
    let cells = m.grid().cells()[axis];
    let l = axis_limits(m, axis, AxisInterval::new(a, cells).unwrap(), t).unwrap();
    if plus {
        l.im_plus
    } else {
        l.im_minus
    }
}

/// Per-axis kernel section at `t` for upper cut `b` and sign.
fn ker_section(m: &GridModule, axis: usize, b: usize, plus: bool, t: GridPoint) -> Subspace {
    let l = axis_limits(m, axis, AxisInterval::new(0, b).unwrap(), t).unwrap();
    if plus {
        l.ker_plus
    } else {
        l.ker_minus
    }
}

const SIGNS: [[bool; 3]; 8] = [
    [true, true, true],
    [true, true, false],
    [true, false, true],
    [true, false, false],
    [false, true, true],
    [false, true, false],
    [false, false, true],
    [false, false, false],
];

fn triples(upto: [usize; 3]) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for x in 0..upto[0] {
        for y in 0..upto[1] {
            for z in 0..upto[2] {
                out.push([x, y, z]);
            }
        }
    }
    out
}

/// Transport of sign-mixed intersections of images forward and of sums of
/// kernels backward, for every sign triple.
pub fn check_sign_transport(m: &GridModule) -> Result<usize, String> {
    let g = m.grid();
    let cells = g.cells();
    let mut checked = 0;
    for (s, t) in le_pairs(g) {
        let rho = m.transition(s, t).unwrap();
        // Lower cuts a ≤ s.
        for a in triples(s.0.map(|x| x + 1)) {
            for signs in SIGNS {
                let at = |p: GridPoint| meet((0..3).map(|i| im_section(m, i, a[i], signs[i], p)));
                let lhs = apply_to_subspace(&rho, &at(s)).unwrap();
                if lhs != at(t) {
                    return Err(format!(
                        "image transport fails: {s} -> {t}, cuts {a:?}, signs {signs:?}"
                    ));
                }
                checked += 1;
            }
        }
        // Upper cuts b > t.
        let lo = t.0.map(|x| x + 1);
        for b in triples(cells.map(|m| m + 1)) {
            if (0..3).any(|i| b[i] < lo[i]) {
                continue;
            }
            for signs in SIGNS {
                let at = |p: GridPoint| {
                    sum(
                        m.field(),
                        m.dim(p),
                        (0..3).map(|i| ker_section(m, i, b[i], signs[i], p)),
                    )
                };
                let lhs = preimage(&rho, &at(t)).unwrap();
                if lhs != at(s) {
                    return Err(format!(
                        "kernel transport fails: {s} -> {t}, cuts {b:?}, signs {signs:?}"
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

pub fn all_cuboids(g: Grid) -> Vec<Cuboid> {
    let m = g.cells();
    let mut out = Vec::new();
    for a in triples(m) {
        for b in triples(m.map(|x| x + 1)) {
            if (0..3).all(|i| a[i] < b[i]) {
                out.push(Cuboid { a, b });
            }
        }
    }
    out
}

/// Combined sections move along transitions: images forward, kernels by
/// preimage, for `s ≤ t` inside each cuboid.
pub fn check_cuboid_transport(m: &GridModule) -> Result<usize, String> {
    let g = m.grid();
    let mut checked = 0;
    for c in all_cuboids(g) {
        let points: Vec<GridPoint> = g.points().filter(|&t| c.contains(t)).collect();
        let sections: Vec<_> = points
            .iter()
            .map(|&t| block_sections(m, &c, t).unwrap())
            .collect();
        for (i, &s) in points.iter().enumerate() {
            for (j, &t) in points.iter().enumerate() {
                if !s.le(t) {
                    continue;
                }
                let rho = m.transition(s, t).unwrap();
                let (x, y) = (&sections[i], &sections[j]);
                let ok = apply_to_subspace(&rho, &x.im_plus).unwrap() == y.im_plus
                    && apply_to_subspace(&rho, &x.im_minus).unwrap() == y.im_minus
                    && preimage(&rho, &y.ker_plus).unwrap() == x.ker_plus
                    && preimage(&rho, &y.ker_minus).unwrap() == x.ker_minus;
                if !ok {
                    return Err(format!("section transport fails on {c}: {s} -> {t}"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// A kernel section of one axis lies in the image sections of the other
/// two, with signs chosen by which sides of the cuts are empty.
pub fn check_kernel_in_images(m: &GridModule) -> Result<usize, String> {
    let g = m.grid();
    let cells = g.cells();
    let mut checked = 0;
    for c in all_cuboids(g) {
        for t in g.points().filter(|&t| c.contains(t)) {
            let s = block_sections(m, &c, t).unwrap();
            for i in 0..3 {
                let l = &s.axes[i];
                let ker = if c.b[i] < cells[i] {
                    &l.ker_plus
                } else {
                    &l.ker_minus
                };
                for j in (0..3).filter(|&j| j != i) {
                    let lj = &s.axes[j];
                    let im = if c.a[j] > 0 {
                        &lj.im_minus
                    } else {
                        &lj.im_plus
                    };
                    if !ker.is_subspace_of(im).unwrap() {
                        return Err(format!(
                            "kernel on axis {} not inside image on axis {} for {c} at {t}",
                            i + 1,
                            j + 1
                        ));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

/// `dim V⁺ − dim V⁻` takes one value on each block.
pub fn check_count_constancy(m: &GridModule) -> Result<usize, String> {
    let g = m.grid();
    let mut checked = 0;
    for b in enumerate_blocks(g) {
        let c = b.cuboid();
        let counts: HashSet<usize> = g
            .points()
            .filter(|&t| c.contains(t))
            .map(|t| block_sections(m, &c, t).unwrap().count())
            .collect();
        if counts.len() != 1 {
            return Err(format!("count varies over {b}: {counts:?}"));
        }
        checked += 1;
    }
    Ok(checked)
}
