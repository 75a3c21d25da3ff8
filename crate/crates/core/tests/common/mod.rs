//! Generators and exhaustive reference solvers shared by the integration
//! tests.
#![allow(dead_code)]

use clonelab::clones::is_contiguous_everywhere;
use clonelab::pqtree::{NodeKind, PqTree};
use clonelab::single_crossing::{is_single_crossing_wrt, VoterOrder};
use clonelab::synthesis::{implement_single_crossing, implement_single_peaked_tree, implement_tree, random_frontier, random_tree};
use clonelab::util::random_profile;
use clonelab::{declone, CandidateSet, Profile};
use rand::seq::SliceRandom;
use rand::Rng;

/// Calls `f` on every partition of `0..m` into non-empty blocks.
pub fn for_each_partition(m: usize, f: &mut dyn FnMut(&[CandidateSet])) {
    fn go(c: usize, m: usize, blocks: &mut Vec<Vec<usize>>, f: &mut dyn FnMut(&[CandidateSet])) {
        if c == m {
            let sets: Vec<CandidateSet> = blocks.iter().map(|b| CandidateSet::new(b.iter().copied())).collect();
            return f(&sets);
        }
        for i in 0..blocks.len() {
            blocks[i].push(c);
            go(c + 1, m, blocks, f);
            blocks[i].pop();
        }
        blocks.push(vec![c]);
        go(c + 1, m, blocks, f);
        blocks.pop();
    }
    go(0, m, &mut Vec::new(), f);
}

/// Largest candidate count over all partitions into clone sets whose
/// decloning satisfies `ok`.
pub fn best_partition_declone(p: &Profile, ok: &dyn Fn(&Profile) -> bool) -> usize {
    let mut best = 0;
    for_each_partition(p.m(), &mut |blocks| {
        if blocks.len() <= best || !blocks.iter().all(|b| is_contiguous_everywhere(p, b)) {
            return;
        }
        let sets: Vec<CandidateSet> = blocks.iter().filter(|b| b.len() >= 2).cloned().collect();
        let r = declone(p, &sets).expect("disjoint clone sets");
        if ok(&r.profile) {
            best = blocks.len();
        }
    });
    best
}

/// Exhaustive optimum for decloning under a fixed voter order.
pub fn best_fixed_order_count(p: &Profile, ord: &VoterOrder) -> usize {
    best_partition_declone(p, &|q| is_single_crossing_wrt(q, ord))
}

/// Every Q-node has internal children only at its ends.
pub fn has_sp_tree_shape(t: &PqTree) -> bool {
    (0..t.node_count()).all(|v| {
        let ch = t.children(v);
        t.kind(v) != NodeKind::Q || ch[1..ch.len() - 1].iter().all(|&u| t.is_leaf(u))
    })
}

/// Profile with a rich clone structure: a random tree implemented one of
/// three ways, plus a few random orders consistent with the tree.
pub fn synthesized_profile<R: Rng + ?Sized>(m: usize, rng: &mut R) -> (PqTree, Profile) {
    let t = random_tree(m, rng).expect("m >= 1");
    let base = match rng.gen_range(0..3) {
        0 => implement_tree(&t).expect("valid tree"),
        1 => implement_single_crossing(&clonelab::pqtree::tree_to_family(&t)).expect("valid tree"),
        _ if has_sp_tree_shape(&t) => implement_single_peaked_tree(&t).expect("restricted tree"),
        _ => implement_tree(&t).expect("valid tree"),
    };
    let extra = rng.gen_range(0..=3);
    let p = base.extended((0..extra).map(|_| random_frontier(&t, rng))).expect("same candidates");
    let mut orders = p.orders().to_vec();
    orders.shuffle(rng);
    (t, p.with_orders(orders).expect("same candidates"))
}

/// Either a uniform random profile or a synthesized one, half the time each.
pub fn mixed_profile<R: Rng + ?Sized>(max_m: usize, max_n: usize, rng: &mut R) -> Profile {
    let m = rng.gen_range(1..=max_m);
    if rng.gen_bool(0.5) {
        random_profile(m, rng.gen_range(1..=max_n), rng)
    } else {
        synthesized_profile(m, rng).1
    }
}

pub fn random_voter_order<R: Rng + ?Sized>(n: usize, rng: &mut R) -> VoterOrder {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    VoterOrder::new(v).expect("permutation")
}
