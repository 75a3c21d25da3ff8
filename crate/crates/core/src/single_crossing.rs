//! Single-crossing profiles: recognition, decloning under a fixed voter
//! order, exact decloning, and hard instances built from exact cover.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::clones::all_clone_sets;
use crate::election::{declone, CandidateId, DecloneResult, LinearOrder, Profile};
use crate::error::{Error, Result};
use crate::set::CandidateSet;
use crate::synthesis::slide;
use crate::util::find_permutation;

/// An order of the voters, first to last.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VoterOrder(LinearOrder);

impl VoterOrder {
    pub fn new(order: Vec<usize>) -> Result<VoterOrder> {
        Ok(VoterOrder(LinearOrder::new(order)?))
    }

    pub fn identity(n: usize) -> VoterOrder {
        VoterOrder(LinearOrder::identity(n))
    }

    pub fn voters(&self) -> &[usize] {
        self.0.ranking()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> VoterOrder {
        VoterOrder(self.0.reversed())
    }
}

/// Number of times each pair's preferred candidate switches along `ord`.
/// Entry `[a][b]` for `a < b`.
fn sign_changes(p: &Profile, ord: &VoterOrder) -> Vec<Vec<usize>> {
    let m = p.m();
    let pos = p.positions();
    let mut changes = vec![vec![0usize; m]; m];
    for w in ord.voters().windows(2) {
        let (pa, pb) = (&pos[w[0]], &pos[w[1]]);
        for a in 0..m {
            for b in a + 1..m {
                if (pa[a] < pa[b]) != (pb[a] < pb[b]) {
                    changes[a][b] += 1;
                }
            }
        }
    }
    changes
}

/// For every pair of candidates, the voters preferring one of them all come
/// before the voters preferring the other.
pub fn is_single_crossing_wrt(p: &Profile, ord: &VoterOrder) -> bool {
    if ord.len() != p.n() {
        return false;
    }
    sign_changes(p, ord).iter().all(|row| row.iter().all(|&c| c <= 1))
}

/// Pair-inversion bitsets relative to a reference voter.
struct Inversions {
    words: usize,
    bits: Vec<Vec<u64>>,
}

impl Inversions {
    fn new(p: &Profile, reference: usize) -> Inversions {
        let m = p.m();
        let base = p.order(reference).ranking();
        let pairs = m * m.saturating_sub(1) / 2;
        let words = pairs.div_ceil(64).max(1);
        let bits = p
            .orders()
            .iter()
            .map(|o| {
                let pv = o.positions();
                let mut b = vec![0u64; words];
                let mut k = 0;
                for i in 0..m {
                    for j in i + 1..m {
                        if pv[base[i]] > pv[base[j]] {
                            b[k / 64] |= 1 << (k % 64);
                        }
                        k += 1;
                    }
                }
                b
            })
            .collect();
        Inversions { words, bits }
    }

    fn count(&self, v: usize) -> u32 {
        self.bits[v].iter().map(|w| w.count_ones()).sum()
    }

    fn is_subset(&self, a: usize, b: usize) -> bool {
        (0..self.words).all(|w| self.bits[a][w] & !self.bits[b][w] == 0)
    }
}

/// Tries `first` as the first voter: voter `k` must come after voter `j`
/// whenever `k` has crossed some pair that `j` has not, so the inversion
/// sets must form a chain, which sorting by size then checks.
fn order_from(p: &Profile, first: usize) -> Option<VoterOrder> {
    let inv = Inversions::new(p, first);
    let mut voters: Vec<usize> = (0..p.n()).collect();
    voters.sort_by_key(|&v| (inv.count(v), v != first, v));
    if !voters.windows(2).all(|w| inv.is_subset(w[0], w[1])) {
        return None;
    }
    Some(VoterOrder::new(voters).expect("permutation of voters"))
}

/// A witness voter order if `p` is single-crossing.
///
/// Only a voter at one end of the order can go first. The voter farthest
/// (in swap distance) from voter 0 ranks like one end, and the voter
/// farthest from it ranks like the other, so only voters identical to
/// those two are tried, in index order.
pub fn is_single_crossing(p: &Profile) -> Option<VoterOrder> {
    if p.n() == 1 {
        return Some(VoterOrder::identity(1));
    }
    let farthest = |from: usize| {
        let inv = Inversions::new(p, from);
        (0..p.n()).max_by_key(|&v| (inv.count(v), std::cmp::Reverse(v))).expect("voters")
    };
    let e1 = farthest(0);
    let e2 = farthest(e1);
    let ends = [p.order(e1).ranking(), p.order(e2).ranking()];
    (0..p.n()).filter(|&v| ends.contains(&p.order(v).ranking())).find_map(|v| order_from(p, v)).filter(|o| is_single_crossing_wrt(p, o))
}

pub const BRUTE_FORCE_SC_LIMIT: usize = 8;

fn require_small(p: &Profile) -> Result<()> {
    if p.n() > BRUTE_FORCE_SC_LIMIT {
        return Err(Error::TooLarge(format!("brute-force voter order search needs n <= {BRUTE_FORCE_SC_LIMIT}, got {}", p.n())));
    }
    Ok(())
}

/// First voter order in lexicographic order that witnesses
/// single-crossingness.
pub fn brute_force_sc(p: &Profile) -> Result<Option<VoterOrder>> {
    require_small(p)?;
    let found = find_permutation(p.n(), |perm| is_single_crossing_wrt(p, &VoterOrder::new(perm.to_vec()).expect("permutation")));
    Ok(found.map(|v| VoterOrder::new(v).expect("permutation")))
}

/// Every witnessing voter order, by brute force.
pub fn all_sc_orders(p: &Profile) -> Result<Vec<VoterOrder>> {
    require_small(p)?;
    let mut out = Vec::new();
    find_permutation(p.n(), |perm| {
        let o = VoterOrder::new(perm.to_vec()).expect("permutation");
        if is_single_crossing_wrt(p, &o) {
            out.push(o);
        }
        false
    });
    Ok(out)
}

/// Smallest clone set containing `seed`: keeps adding candidates ranked
/// between two members by some voter.
pub fn clone_closure(p: &Profile, seed: &CandidateSet) -> CandidateSet {
    let pos = p.positions();
    let mut inside = vec![false; p.m()];
    for c in seed.iter() {
        inside[c] = true;
    }
    loop {
        let mut grew = false;
        for (o, pv) in p.orders().iter().zip(&pos) {
            let members = (0..p.m()).filter(|&c| inside[c]);
            let (lo, hi) = members.fold((usize::MAX, 0), |(lo, hi), c| (lo.min(pv[c]), hi.max(pv[c])));
            if lo == usize::MAX {
                break;
            }
            for &c in &o.ranking()[lo..=hi] {
                if !inside[c] {
                    inside[c] = true;
                    grew = true;
                }
            }
        }
        if !grew {
            return (0..p.m()).filter(|&c| inside[c]).collect();
        }
    }
}

/// Intermediate results of decloning under a fixed voter order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedOrderAnalysis {
    /// Pairs whose preference switches more than once along the order.
    pub violating_pairs: Vec<(CandidateId, CandidateId)>,
    /// Distinct closures of the violating pairs.
    pub closures: Vec<CandidateSet>,
    /// Whether every two closures are nested or disjoint.
    pub laminar: bool,
    /// Inclusion-maximal closures; these are the sets collapsed.
    pub collapsed: Vec<CandidateSet>,
}

pub fn is_laminar(sets: &[CandidateSet]) -> bool {
    sets.iter().enumerate().all(|(i, a)| sets[i + 1..].iter().all(|b| !a.bowtie(b)))
}

pub fn fixed_order_analysis(p: &Profile, ord: &VoterOrder) -> Result<FixedOrderAnalysis> {
    if ord.len() != p.n() {
        return Err(Error::Precondition(format!("voter order has {} voters, profile has {}", ord.len(), p.n())));
    }
    let changes = sign_changes(p, ord);
    let mut violating_pairs = Vec::new();
    for (a, row) in changes.iter().enumerate() {
        for (b, &c) in row.iter().enumerate().skip(a + 1) {
            if c > 1 {
                violating_pairs.push((a, b));
            }
        }
    }
    let mut closures: Vec<CandidateSet> = violating_pairs.iter().map(|&(a, b)| clone_closure(p, &CandidateSet::from([a, b]))).collect();
    closures.sort();
    closures.dedup();
    let laminar = is_laminar(&closures);
    // Two crossing closures always lie inside a third one, so the maximal
    // closures are pairwise disjoint.
    let collapsed: Vec<CandidateSet> = closures.iter().filter(|a| !closures.iter().any(|b| a.is_proper_subset(b))).cloned().collect();
    Ok(FixedOrderAnalysis { violating_pairs, closures, laminar, collapsed })
}

/// Collapses the fewest candidates needed to make `p` single-crossing with
/// respect to `ord`.
pub fn sc_declone_fixed(p: &Profile, ord: &VoterOrder) -> Result<DecloneResult> {
    let a = fixed_order_analysis(p, ord)?;
    declone(p, &a.collapsed)
}

pub const DEFAULT_EXACT_BUDGET: usize = 100_000;

/// Minimal clone sets with at least two members (the whole candidate set
/// counts when nothing smaller qualifies).
fn minimal_collapsible(p: &Profile) -> Vec<CandidateSet> {
    let f = all_clone_sets(p);
    let big: Vec<&CandidateSet> = f.iter().filter(|s| s.len() >= 2).collect();
    big.iter().filter(|a| !big.iter().any(|b| b.is_proper_subset(a))).map(|s| (*s).clone()).collect()
}

struct ExactSearch {
    k: usize,
    budget: usize,
    seen: HashSet<Vec<Vec<CandidateId>>>,
}

impl ExactSearch {
    fn visit(&mut self, q: &Profile, pre: &[CandidateSet]) -> Result<Option<Vec<CandidateSet>>> {
        if q.m() < self.k || !self.seen.insert(q.relabeled_key()) {
            return Ok(None);
        }
        if self.seen.len() > self.budget {
            return Err(Error::TooLarge(format!("exact search exceeded {} states", self.budget)));
        }
        if is_single_crossing(q).is_some() {
            return Ok(Some(pre.to_vec()));
        }
        for d in minimal_collapsible(q) {
            let r = declone(q, std::slice::from_ref(&d)).expect("clone set of the profile");
            let next: Vec<CandidateSet> =
                r.preimages().iter().map(|s| s.iter().fold(CandidateSet::empty(), |a, c| a.union(&pre[c]))).collect();
            if let Some(found) = self.visit(&r.profile.without_names(), &next)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }
}

/// A single-crossing decloning with at least `k` candidates, if one
/// exists. Explores collapse sequences depth first, one minimal clone set
/// at a time, skipping profiles already seen up to renaming; fails once more than
/// `budget` distinct profiles have been visited.
pub fn sc_declone_exact(p: &Profile, k: usize, budget: usize) -> Result<Option<DecloneResult>> {
    let mut search = ExactSearch { k, budget, seen: HashSet::new() };
    let start: Vec<CandidateSet> = (0..p.m()).map(CandidateSet::singleton).collect();
    let base = p.clone().without_names();
    match search.visit(&base, &start)? {
        None => Ok(None),
        Some(pre) => {
            let sets: Vec<CandidateSet> = pre.into_iter().filter(|s| s.len() >= 2).collect();
            declone(p, &sets).map(Some)
        }
    }
}

/// Exact cover by 3-sets over the base set `0..3k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct X3CInstance {
    pub k: usize,
    pub sets: Vec<[usize; 3]>,
}

impl X3CInstance {
    pub fn new(k: usize, sets: Vec<[usize; 3]>) -> Result<X3CInstance> {
        if k == 0 {
            return Err(Error::Precondition("k must be at least 1".into()));
        }
        if sets.is_empty() {
            return Err(Error::Precondition("instance has no sets".into()));
        }
        let mut norm = Vec::with_capacity(sets.len());
        for mut s in sets {
            s.sort_unstable();
            if s[0] == s[1] || s[1] == s[2] {
                return Err(Error::InvalidSet(format!("{s:?} has repeated elements")));
            }
            if s[2] >= 3 * k {
                return Err(Error::OutOfRange { id: s[2], m: 3 * k });
            }
            norm.push(s);
        }
        Ok(X3CInstance { k, sets: norm })
    }

    /// One set per line as three integers; `#` starts a comment. Without
    /// `k`, the base set is the smallest `0..3k` holding every element.
    pub fn parse(text: &str, k: Option<usize>) -> Result<X3CInstance> {
        let mut sets = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<usize> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().map_err(|_| Error::Parse { line: i + 1, msg: format!("not an element: {t:?}") }))
                .collect::<Result<_>>()?;
            match nums[..] {
                [a, b, c] => sets.push([a, b, c]),
                _ => return Err(Error::Parse { line: i + 1, msg: format!("expected 3 elements, got {}", nums.len()) }),
            }
        }
        let k = k.unwrap_or_else(|| sets.iter().flatten().max().map_or(1, |&mx| mx / 3 + 1));
        X3CInstance::new(k, sets)
    }

    /// Backtracking search for k pairwise disjoint sets.
    pub fn has_exact_cover(&self) -> bool {
        fn go(sets: &[[usize; 3]], covered: &mut [bool]) -> bool {
            let Some(e) = covered.iter().position(|&c| !c) else { return true };
            for s in sets.iter().filter(|s| s.contains(&e)) {
                if s.iter().all(|&x| !covered[x]) {
                    s.iter().for_each(|&x| covered[x] = true);
                    if go(sets, covered) {
                        return true;
                    }
                    s.iter().for_each(|&x| covered[x] = false);
                }
            }
            false
        }
        go(&self.sets, &mut vec![false; 3 * self.k])
    }
}

/// Which block of candidates encodes which set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct X3CGroup {
    pub set: [usize; 3],
    /// Index of the set in the input; padding repeats earlier sets.
    pub source: usize,
    pub candidates: CandidateSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct X3CReduction {
    pub profile: Profile,
    /// A single-crossing decloning with at least this many candidates
    /// exists iff the instance has an exact cover.
    pub target: usize,
    pub s: usize,
    pub groups: Vec<X3CGroup>,
}

impl X3CReduction {
    pub fn sidecar_json(&self) -> serde_json::Value {
        serde_json::json!({
            "s": self.s,
            "target": self.target,
            "candidates": self.profile.m(),
            "voters": self.profile.n(),
            "groups": self.groups,
        })
    }
}

/// Profile whose single-crossing declonings encode exact covers.
///
/// The sets are padded by repetition until there are `s > 3k` of them. Set
/// `j` gets a block `C_j` of `6s` candidates. The top level is a slide over
/// the blocks, each of its `s` voters copied `2s` times. Within block `j`,
/// voters follow a slide over `C_j` with voters `2j, 2j+1` swapped in each
/// third; the copy for element group `i` and copy `l` uses slide voter:
/// first before the set's smallest element, `l` at it, `2s` between the
/// first two elements, `2s + l` at the second, `4s` between the second and
/// third, `4s + l` at the third, and the last one after it.
pub fn x3c_reduction(inst: &X3CInstance) -> Result<X3CReduction> {
    let inst = X3CInstance::new(inst.k, inst.sets.clone())?;
    let k = inst.k;
    let mut padded: Vec<(usize, [usize; 3])> = inst.sets.iter().copied().enumerate().collect();
    while padded.len() <= 3 * k {
        let i = padded.len() % inst.sets.len();
        padded.push((i, inst.sets[i]));
    }
    let s = padded.len();
    let block = 6 * s;
    let top = slide(s)?;
    let inner = slide(block)?;

    let mut rankings = Vec::with_capacity(2 * s * s);
    for i in 0..s {
        for l in 0..2 * s {
            let mut r = Vec::with_capacity(s * block);
            for &j in top.order(i).ranking() {
                let [x, y, z] = padded[j].1;
                // 0-based slide voter of block j for this copy.
                let idx = if i < x {
                    0
                } else if i == x {
                    l
                } else if i < y {
                    2 * s - 1
                } else if i == y {
                    2 * s + l
                } else if i < z {
                    4 * s - 1
                } else if i == z {
                    4 * s + l
                } else {
                    6 * s - 1
                };
                let t = swap_pair(idx, j, s);
                r.extend(inner.order(t).ranking().iter().map(|&c| j * block + c));
            }
            rankings.push(r);
        }
    }
    let profile = Profile::from_rankings(rankings)?;
    let groups = padded
        .iter()
        .enumerate()
        .map(|(j, &(source, set))| X3CGroup { set, source, candidates: CandidateSet::range(j * block, (j + 1) * block) })
        .collect();
    Ok(X3CReduction { profile, target: block * k + (s - k), s, groups })
}

/// Swaps voters `2j` and `2j+1` of each third of a `6s`-voter slide.
fn swap_pair(idx: usize, j: usize, s: usize) -> usize {
    let third = 2 * s;
    let (base, off) = (idx / third * third, idx % third);
    if off == 2 * j {
        base + 2 * j + 1
    } else if off == 2 * j + 1 {
        base + 2 * j
    } else {
        idx
    }
}
