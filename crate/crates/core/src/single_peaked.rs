//! Single-peaked profiles: recognition, clone sets relative to an axis, and
//! decloning toward single-peakedness.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::clones::{all_clone_sets, is_clone_set, nontrivial_clone_sets};
use crate::election::{declone, peaks, CandidateId, DecloneResult, LinearOrder, Profile};
use crate::error::{Error, Result};
use crate::pqtree::{build_tree_unchecked, NodeKind, PqTree};
use crate::set::CandidateSet;
use crate::util::find_permutation;

/// A societal axis: candidates from left to right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Axis(LinearOrder);

impl Axis {
    pub fn new(order: Vec<CandidateId>) -> Result<Axis> {
        Ok(Axis(LinearOrder::new(order)?))
    }

    pub fn order(&self) -> &[CandidateId] {
        self.0.ranking()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn positions(&self) -> Vec<usize> {
        self.0.positions()
    }

    pub fn reversed(&self) -> Axis {
        Axis(self.0.reversed())
    }
}

/// Every prefix of the vote is an interval of the axis.
pub fn is_compatible(vote: &LinearOrder, axis: &Axis) -> bool {
    if vote.len() != axis.len() {
        return false;
    }
    let pos = axis.positions();
    let r = vote.ranking();
    let (mut lo, mut hi) = (pos[r[0]], pos[r[0]]);
    for (k, &c) in r.iter().enumerate().skip(1) {
        lo = lo.min(pos[c]);
        hi = hi.max(pos[c]);
        if hi - lo != k {
            return false;
        }
    }
    true
}

pub fn is_single_peaked_wrt(p: &Profile, axis: &Axis) -> bool {
    p.orders().iter().all(|o| is_compatible(o, axis))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Middle,
    Left,
    Right,
}

/// Axis under construction from both ends inward.
#[derive(Clone)]
struct Placement {
    left: Vec<CandidateId>,
    right: Vec<CandidateId>,
    side: Vec<Side>,
}

impl Placement {
    fn inner(&self, s: Side) -> Option<CandidateId> {
        match s {
            Side::Left => self.left.last().copied(),
            _ => self.right.last().copied(),
        }
    }

    /// Places `x` next to the innermost candidate on side `s` if no voter
    /// rules it out given the candidates placed so far.
    fn place(&mut self, p: &Profile, pos: &[Vec<usize>], x: CandidateId, s: Side) -> bool {
        let other = if s == Side::Left { Side::Right } else { Side::Left };
        let near = self.inner(s);
        for (v, o) in p.orders().iter().enumerate() {
            let pv = &pos[v];
            let peak_side = self.side[o.top()];
            let mut top = None;
            let mut last = None;
            for &c in o.ranking() {
                if self.side[c] == Side::Middle {
                    top.get_or_insert(c);
                    last = Some(c);
                }
            }
            if peak_side == s {
                let n = near.expect("peak on a side that has candidates");
                if pv[n] > pv[x] || top != Some(x) {
                    return false;
                }
            } else {
                if near.is_some_and(|n| pv[x] > pv[n]) {
                    return false;
                }
                if peak_side == other && last != Some(x) {
                    return false;
                }
            }
        }
        self.side[x] = s;
        match s {
            Side::Left => self.left.push(x),
            _ => self.right.push(x),
        }
        true
    }

    fn middle_count(&self) -> usize {
        self.side.iter().filter(|&&s| s == Side::Middle).count()
    }
}

/// A witness axis if `p` is single-peaked. Candidates ranked last among
/// the unplaced ones are placed at the axis ends, outside in.
pub fn is_single_peaked(p: &Profile) -> Option<Axis> {
    let m = p.m();
    let pos = p.positions();
    let mut st = Placement { left: Vec::new(), right: Vec::new(), side: vec![Side::Middle; m] };
    while st.middle_count() > 0 {
        let mut lasts: Vec<CandidateId> = p
            .orders()
            .iter()
            .map(|o| *o.ranking().iter().rev().find(|&&c| st.side[c] == Side::Middle).expect("middle is non-empty"))
            .collect();
        lasts.sort_unstable();
        lasts.dedup();
        st = match lasts[..] {
            [x] => {
                let mut a = st.clone();
                if a.place(p, &pos, x, Side::Left) {
                    a
                } else {
                    let mut b = st;
                    if !b.place(p, &pos, x, Side::Right) {
                        return None;
                    }
                    b
                }
            }
            [x, y] => {
                let mut a = st.clone();
                if a.place(p, &pos, x, Side::Left) && a.place(p, &pos, y, Side::Right) {
                    a
                } else {
                    let mut b = st;
                    if !(b.place(p, &pos, y, Side::Left) && b.place(p, &pos, x, Side::Right)) {
                        return None;
                    }
                    b
                }
            }
            _ => return None,
        };
    }
    let mut order = st.left;
    order.extend(st.right.into_iter().rev());
    let axis = Axis::new(order).expect("every candidate placed once");
    is_single_peaked_wrt(p, &axis).then_some(axis)
}

pub const BRUTE_FORCE_AXIS_LIMIT: usize = 8;

/// First axis in lexicographic order that all votes are compatible with.
pub fn brute_force_axis(p: &Profile) -> Result<Option<Axis>> {
    if p.m() > BRUTE_FORCE_AXIS_LIMIT {
        return Err(Error::TooLarge(format!("brute-force axis search needs m <= {BRUTE_FORCE_AXIS_LIMIT}, got {}", p.m())));
    }
    Ok(find_permutation(p.m(), |perm| {
        let axis = Axis::new(perm.to_vec()).expect("permutation");
        is_single_peaked_wrt(p, &axis)
    })
    .map(|perm| Axis::new(perm).expect("permutation")))
}

fn require_compatible(p: &Profile, ax: &Axis) -> Result<()> {
    if ax.len() != p.m() {
        return Err(Error::Precondition(format!("axis has {} candidates, profile has {}", ax.len(), p.m())));
    }
    if !is_single_peaked_wrt(p, ax) {
        return Err(Error::Precondition("profile is not single-peaked with respect to the axis".into()));
    }
    Ok(())
}

/// The leftmost and rightmost peaks along `ax`.
pub fn extreme_peaks(p: &Profile, ax: &Axis) -> Result<(CandidateId, CandidateId)> {
    require_compatible(p, ax)?;
    let pk = peaks(p);
    if pk.len() < 2 {
        return Err(Error::Precondition("fewer than two distinct peaks".into()));
    }
    let pos = ax.positions();
    let lo = pk.iter().min_by_key(|&c| pos[c]).expect("non-empty");
    let hi = pk.iter().max_by_key(|&c| pos[c]).expect("non-empty");
    Ok((lo, hi))
}

/// Split of the candidates around a clone set along an axis, in axis order
/// `a1 > d1 > p > d2 > a2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClonePartition {
    pub a1: CandidateSet,
    pub d1: CandidateSet,
    pub p: CandidateSet,
    pub d2: CandidateSet,
    pub a2: CandidateSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CloneType {
    First,
    Second,
}

fn axis_runs(ax: &Axis, d: &CandidateSet) -> Vec<(usize, usize)> {
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for (i, &c) in ax.order().iter().enumerate() {
        if d.contains(c) {
            match runs.last_mut() {
                Some(r) if r.1 + 1 == i => r.1 = i,
                _ => runs.push((i, i)),
            }
        }
    }
    runs
}

fn require_clone_on_axis(p: &Profile, ax: &Axis, d: &CandidateSet) -> Result<Vec<(usize, usize)>> {
    require_compatible(p, ax)?;
    if d.len() < 2 {
        return Err(Error::InvalidSet(format!("clone partition needs |D| >= 2, got {d}")));
    }
    if !is_clone_set(p, d)? {
        return Err(Error::NotClone(p.display_set(d)));
    }
    let runs = axis_runs(ax, d);
    if runs.len() > 2 {
        return Err(Error::Precondition(format!("{d} splits into {} runs on the axis", runs.len())));
    }
    Ok(runs)
}

pub fn clone_partition(p: &Profile, ax: &Axis, d: &CandidateSet) -> Result<ClonePartition> {
    let runs = require_clone_on_axis(p, ax, d)?;
    let o = ax.order();
    let set = |lo: usize, hi: usize| CandidateSet::new(o[lo..hi].iter().copied());
    let (first, last) = (runs[0], runs[runs.len() - 1]);
    Ok(match runs[..] {
        [(lo, hi)] => ClonePartition {
            a1: set(0, lo),
            d1: set(lo, lo + 1),
            p: CandidateSet::empty(),
            d2: set(lo + 1, hi + 1),
            a2: set(hi + 1, o.len()),
        },
        _ => ClonePartition {
            a1: set(0, first.0),
            d1: set(first.0, first.1 + 1),
            p: set(first.1 + 1, last.0),
            d2: set(last.0, last.1 + 1),
            a2: set(last.1 + 1, o.len()),
        },
    })
}

/// First type if `d` is an interval of the axis.
pub fn classify_clone_type(p: &Profile, ax: &Axis, d: &CandidateSet) -> Result<CloneType> {
    let runs = require_clone_on_axis(p, ax, d)?;
    Ok(if runs.len() == 1 { CloneType::First } else { CloneType::Second })
}

/// Black nodes are collapsed to a single candidate; white nodes are kept
/// open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeColoring {
    pub tree: PqTree,
    pub black: Vec<bool>,
}

impl TreeColoring {
    /// Every child of a black node is black.
    pub fn is_proper(&self) -> bool {
        (0..self.tree.node_count()).all(|v| !self.black[v] || self.tree.children(v).iter().all(|&c| self.black[c]))
    }

    pub fn to_dot(&self, name: &dyn Fn(CandidateId) -> String) -> String {
        self.tree.to_dot(name, Some(&self.black))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Split {
    First,
    Last,
}

/// Decloning state over the clone tree. A white Q-node with a split keeps
/// one end child open and collapses the remaining children together.
#[derive(Clone)]
struct Plan {
    black: Vec<bool>,
    split: Vec<Option<Split>>,
}

impl Plan {
    fn sets(&self, t: &PqTree) -> Vec<CandidateSet> {
        let mut out = Vec::new();
        let mut stack = vec![t.root()];
        while let Some(v) = stack.pop() {
            if t.is_leaf(v) {
                continue;
            }
            if self.black[v] {
                out.push(t.leaf_set(v));
                continue;
            }
            let ch = t.children(v);
            match self.split[v] {
                None => stack.extend(ch.iter().rev()),
                Some(s) => {
                    let (single, rest) = match s {
                        Split::First => (ch[0], &ch[1..]),
                        Split::Last => (ch[ch.len() - 1], &ch[..ch.len() - 1]),
                    };
                    out.push(rest.iter().fold(CandidateSet::empty(), |a, &u| a.union(&t.leaf_set(u))));
                    stack.push(single);
                }
            }
        }
        out
    }
}

struct Decloner<'a> {
    p: &'a Profile,
    t: PqTree,
    full: bool,
}

impl Decloner<'_> {
    fn decloned(&self, plan: &Plan) -> DecloneResult {
        declone(self.p, &plan.sets(&self.t)).expect("tree sets are disjoint clone sets")
    }

    fn is_sp(&self, plan: &Plan) -> bool {
        is_single_peaked(&self.decloned(plan).profile).is_some()
    }

    fn run(&self, start: usize, mut plan: Plan) -> Plan {
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            plan.black[v] = false;
            if self.t.is_leaf(v) {
                continue;
            }
            if self.is_sp(&plan) {
                queue.extend(self.t.children(v).iter().copied());
                continue;
            }
            plan.black[v] = true;
            if !self.full || self.t.kind(v) != NodeKind::Q {
                continue;
            }
            let ch = self.t.children(v);
            let mut best: Option<(usize, Plan)> = None;
            for (split, single) in [(Split::First, ch[0]), (Split::Last, ch[ch.len() - 1])] {
                let mut cand = plan.clone();
                cand.black[v] = false;
                cand.split[v] = Some(split);
                if !self.is_sp(&cand) {
                    continue;
                }
                let cand = self.run(single, cand);
                let count = self.decloned(&cand).candidate_count();
                if best.as_ref().is_none_or(|(c, _)| count > *c) {
                    best = Some((count, cand));
                }
            }
            if let Some((_, b)) = best {
                plan = b;
            }
        }
        plan
    }
}

fn run_decloner(p: &Profile, full: bool) -> (DecloneResult, TreeColoring) {
    let t = build_tree_unchecked(&all_clone_sets(p));
    let n = t.node_count();
    let d = Decloner { p, t, full };
    let plan = d.run(d.t.root(), Plan { black: vec![true; n], split: vec![None; n] });
    let result = d.decloned(&plan);
    (result, TreeColoring { tree: d.t, black: plan.black })
}

/// Greedy whitening of the clone tree in breadth-first order; optimal among
/// declonings that collapse whole subtrees.
pub fn basic_declone_sp(p: &Profile) -> (DecloneResult, TreeColoring) {
    run_decloner(p, false)
}

/// As [`basic_declone_sp`], but a Q-node that cannot be opened is split into
/// one end child and the block of its other children when that helps.
pub fn declone_sp(p: &Profile) -> DecloneResult {
    run_decloner(p, true).0
}

pub const BRUTE_FORCE_DECLONE_LIMIT: usize = 7;

/// Exhaustive search over sequences of clone-set collapses for a
/// single-peaked decloning with the most candidates.
pub fn brute_force_optimal_sp_declone(p: &Profile) -> Result<DecloneResult> {
    if p.m() > BRUTE_FORCE_DECLONE_LIMIT {
        return Err(Error::TooLarge(format!("brute-force decloning needs m <= {BRUTE_FORCE_DECLONE_LIMIT}, got {}", p.m())));
    }
    // Each state is a decloned profile plus the original set behind each of
    // its candidates.
    let start: Vec<CandidateSet> = (0..p.m()).map(CandidateSet::singleton).collect();
    let mut seen = HashSet::from([p.relabeled_key()]);
    let mut stack = vec![(p.clone(), start)];
    let mut best: Option<Vec<CandidateSet>> = None;
    while let Some((q, pre)) = stack.pop() {
        if best.as_ref().is_some_and(|b| b.len() >= q.m()) {
            continue;
        }
        if is_single_peaked(&q).is_some() {
            best = Some(pre);
            continue;
        }
        let mut collapses = nontrivial_clone_sets(&q);
        if q.m() > 1 {
            collapses.push(CandidateSet::range(0, q.m()));
        }
        for d in collapses {
            let r = declone(&q, std::slice::from_ref(&d)).expect("clone set of the profile");
            if !seen.insert(r.profile.relabeled_key()) {
                continue;
            }
            let next_pre = r.preimages().iter().map(|s| s.iter().fold(CandidateSet::empty(), |a, c| a.union(&pre[c]))).collect();
            stack.push((r.profile.without_names(), next_pre));
        }
    }
    let best = best.expect("collapsing everything is single-peaked");
    let sets: Vec<CandidateSet> = best.into_iter().filter(|s| s.len() >= 2).collect();
    declone(p, &sets)
}
