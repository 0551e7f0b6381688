mod common;

use blockcube::decomposer::{block_sections, decompose_exact};
use blockcube::{
    block_module, counting_dim, decompose, enumerate_blocks, extract_submodule, tilde_module,
    tilde_split_holds, verify_direct_sum, Block, BlockClass, Cuboid, ExactModule, Field, Grid,
    GridModule, GridPoint,
};
use common::{rng, sample_exact};
use rand::Rng;

fn f() -> Field {
    Field::default()
}

fn exact(m: GridModule) -> ExactModule {
    ExactModule::new(m).unwrap()
}

#[test]
fn foreign_lower_cut_gives_equal_sections() {
    let g = Grid::new([3, 3, 3]).unwrap();
    let inner = Block::new(g, [1, 1, 1], [3, 3, 3]).unwrap();
    let outer = Block::new(g, [0, 1, 1], [3, 3, 3]).unwrap();
    let m = block_module(f(), g, &outer.cuboid());
    for t in g.points().filter(|&t| inner.contains(t)) {
        let s = block_sections(&m, &inner.cuboid(), t).unwrap();
        assert_eq!(s.v_plus, s.v_minus, "{t}");
        assert_eq!(s.v_plus.dim(), 1);
        let own = block_sections(&m, &outer.cuboid(), t).unwrap();
        assert_eq!((own.v_plus.dim(), own.v_minus.dim()), (1, 0));
    }
}

#[test]
fn zero_module_sections_vanish() {
    let g = Grid::new([2, 2, 3]).unwrap();
    let m = GridModule::zero(f(), g);
    for b in enumerate_blocks(g) {
        let s = block_sections(&m, &b.cuboid(), b.min_corner()).unwrap();
        assert!(s.v_plus.is_zero() && s.im_plus.is_zero() && s.ker_plus.is_zero());
    }
}

#[test]
fn multiplicity_of_doubled_block() {
    let g = Grid::new([3, 3, 2]).unwrap();
    let b = Block::new(g, [0, 1, 0], [3, 2, 2]).unwrap();
    assert_eq!(b.class, BlockClass::Layer(1));
    let one = block_module(f(), g, &b.cuboid());
    let two = exact(one.direct_sum(&one).unwrap());
    assert_eq!(counting_dim(&two, &b.cuboid()).unwrap(), 2);
    let r = decompose_exact(&two);
    assert_eq!(r.multiset(), vec![(b, 2)]);
}

#[test]
fn extraction_is_supported_on_the_block() {
    let g = Grid::new([3, 3, 3]).unwrap();
    let b1 = Block::new(g, [1, 0, 1], [3, 3, 3]).unwrap();
    let b2 = Block::new(g, [0, 0, 0], [2, 3, 2]).unwrap();
    let m = block_module(f(), g, &b1.cuboid())
        .direct_sum(&block_module(f(), g, &b2.cuboid()))
        .unwrap()
        .basis_twist(17);
    let em = exact(m);
    for b in [b1, b2] {
        let sub = extract_submodule(&em, &b).unwrap();
        assert!(sub.is_closed(em.module()));
        for t in g.points() {
            assert_eq!(sub.dim(t), usize::from(b.contains(t)), "{b} at {t}");
        }
    }
}

#[test]
fn death_submodule_dies_at_the_boundary() {
    let g = Grid::new([3, 2, 3]).unwrap();
    let d = Block::new(g, [0, 0, 0], [2, 2, 1]).unwrap();
    assert_eq!(d.class, BlockClass::Death);
    let m = block_module(f(), g, &d.cuboid())
        .direct_sum(&block_module(f(), g, &Cuboid::full(g)))
        .unwrap()
        .basis_twist(5);
    let em = exact(m);
    let sub = extract_submodule(&em, &d).unwrap();
    let gen = sub.generator.clone().unwrap();
    let corner = d.min_corner();
    for exit in [GridPoint([2, 0, 0]), GridPoint([0, 0, 1])] {
        let rho = em.module().transition(corner, exit).unwrap();
        assert!(blockcube::linalg::apply_to_subspace(&rho, &gen)
            .unwrap()
            .is_zero());
    }
}

#[test]
fn tilde_of_births_is_zero_and_of_a_death_block_is_everything() {
    let g = Grid::new([3, 3, 2]).unwrap();
    let births: Vec<Block> = enumerate_blocks(g)
        .into_iter()
        .filter(|b| b.class == BlockClass::Birth)
        .take(4)
        .collect();
    let mut m = GridModule::zero(f(), g);
    for b in &births {
        m = m.direct_sum(&block_module(f(), g, &b.cuboid())).unwrap();
    }
    let em = exact(m);
    assert!(tilde_module(&em).spaces().iter().all(|s| s.is_zero()));

    let d = Block::new(g, [0, 0, 0], [2, 3, 1]).unwrap();
    let em = exact(block_module(f(), g, &d.cuboid()));
    let tilde = tilde_module(&em);
    for t in g.points() {
        assert_eq!(tilde.dim(t), usize::from(d.contains(t)));
    }
    assert!(tilde_split_holds(&em).unwrap());
}

#[test]
fn twisted_sums_round_trip() {
    for seed in 0..30 {
        let (m, truth) = sample_exact(seed, 3, 2);
        let r = decompose(&m).unwrap();
        assert!(r.verified, "seed {seed}");
        assert_eq!(r.multiset(), truth, "seed {seed}");
        let em = exact(m);
        assert!(verify_direct_sum(&em, &r), "seed {seed}");
        assert!(tilde_split_holds(&em).unwrap(), "seed {seed}");
    }
}

#[test]
fn path_independence_of_transitions() {
    let mut r = rng(3);
    for seed in 0..10 {
        let (m, _) = sample_exact(seed, 3, 2);
        let g = m.grid();
        let pairs = g.ordered_pairs();
        for _ in 0..50 {
            let (s, t) = pairs[r.gen_range(0..pairs.len())];
            // Walk a random monotone path step by step.
            let mut acc = blockcube::Matrix::identity(m.field(), m.dim(s));
            let mut cur = s;
            while cur != t {
                let open: Vec<usize> = (0..3).filter(|&i| cur.0[i] < t.0[i]).collect();
                let axis = open[r.gen_range(0..open.len())];
                acc = m.step(axis, cur).unwrap() * &acc;
                cur = cur.step(axis);
            }
            assert_eq!(acc, m.transition(s, t).unwrap(), "{s} -> {t}");
        }
        for (s, t) in pairs.iter().copied().filter(|&(s, t)| s != t).take(200) {
            for u in g.points().filter(|&u| t.le(u)) {
                assert_eq!(
                    m.transition(s, u).unwrap(),
                    &m.transition(t, u).unwrap() * &m.transition(s, t).unwrap()
                );
            }
        }
    }
}

#[test]
fn dual_of_block_module_is_reversed_block() {
    let g = Grid::new([3, 2, 3]).unwrap();
    for b in enumerate_blocks(g) {
        let dual = block_module(f(), g, &b.cuboid()).dualize();
        assert_eq!(dual, block_module(f(), g, &b.reversed(g).cuboid()), "{b}");
    }
    let z = GridModule::zero(f(), g);
    assert_eq!(z.dualize(), z);
}

#[test]
fn twisting_preserves_structure() {
    for seed in 0..10 {
        let (m, _) = sample_exact(seed, 3, 2);
        let tw = m.basis_twist(seed + 100);
        assert!(tw.validate().is_valid());
        assert_eq!(tw.dims(), m.dims());
        let (a, b) = (exact(m), exact(tw));
        for blk in enumerate_blocks(a.module().grid()) {
            assert_eq!(
                counting_dim(&a, &blk.cuboid()).unwrap(),
                counting_dim(&b, &blk.cuboid()).unwrap()
            );
        }
    }
}
