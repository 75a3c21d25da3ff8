//! Recognizing clone structures through axioms A1–A5.
//!
//! A1: every singleton and the ground set are present, the empty set is not.
//! A2: intersecting members have their union and intersection present.
//! A3: members with a nontrivial intersection have both differences present.
//! A4: every member has at most two proper minimal supersets.
//! A5: there is no bicycle chain.

use std::fmt;

use serde::Serialize;

use crate::election::CandidateId;
use crate::error::{Error, Result};
use crate::set::{CandidateSet, SetFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Axiom {
    A1,
    A2,
    A3,
    A4,
    A5,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<CandidateSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub verdict: bool,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        AxiomReport { verdict: violations.is_empty(), violations }
    }

    pub fn violates(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    pub fn witness(&self, axiom: Axiom) -> Option<&[CandidateSet]> {
        self.violations.iter().find(|v| v.axiom == axiom).map(|v| v.witness.as_slice())
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// A cyclic sequence of at least three sets where consecutive sets
/// intersect nontrivially, consecutive triples have empty intersection and
/// each set is covered by its two neighbours.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BicycleChain {
    pub chain: Vec<CandidateSet>,
}

impl BicycleChain {
    pub fn is_valid(&self) -> bool {
        let k = self.chain.len();
        if k < 3 {
            return false;
        }
        let mut sorted = self.chain.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != k {
            return false;
        }
        (0..k).all(|i| {
            let prev = &self.chain[(i + k - 1) % k];
            let cur = &self.chain[i];
            let next = &self.chain[(i + 1) % k];
            chain_step(prev, cur, next)
        })
    }
}

/// Conditions linking three consecutive sets of a bicycle chain, plus the
/// nontrivial intersection of the leading pair.
fn chain_step(x: &CandidateSet, y: &CandidateSet, z: &CandidateSet) -> bool {
    x.bowtie(y) && !x.intersection(y).intersects(z) && y.is_subset(&x.union(z))
}

pub fn check_axioms_a1_a4(f: &SetFamily) -> AxiomReport {
    let mut violations = Vec::new();
    let sets = f.sets();

    // A1
    let a1 = if let Some(e) = sets.iter().find(|s| s.is_empty()) {
        Some(vec![e.clone()])
    } else if let Some(c) = (0..f.ground_size()).find(|&c| !f.contains(&CandidateSet::singleton(c))) {
        Some(vec![CandidateSet::singleton(c)])
    } else if !f.contains(&f.ground()) {
        Some(vec![f.ground()])
    } else {
        None
    };
    if let Some(w) = a1 {
        violations.push(Violation { axiom: Axiom::A1, witness: w });
    }

    // A2, A3
    let mut a2 = None;
    let mut a3 = None;
    'pairs: for (i, x) in sets.iter().enumerate() {
        for y in &sets[i + 1..] {
            if !x.intersects(y) {
                continue;
            }
            if a2.is_none() && (!f.contains(&x.union(y)) || !f.contains(&x.intersection(y))) {
                a2 = Some(vec![x.clone(), y.clone()]);
            }
            if a3.is_none() && x.bowtie(y) && (!f.contains(&x.difference(y)) || !f.contains(&y.difference(x))) {
                a3 = Some(vec![x.clone(), y.clone()]);
            }
            if a2.is_some() && a3.is_some() {
                break 'pairs;
            }
        }
    }
    if let Some(w) = a2 {
        violations.push(Violation { axiom: Axiom::A2, witness: w });
    }
    if let Some(w) = a3 {
        violations.push(Violation { axiom: Axiom::A3, witness: w });
    }

    // A4
    for x in sets {
        let sup = minimal_supersets_of(f, x);
        if sup.len() > 2 {
            let mut w = vec![x.clone()];
            w.extend(sup);
            violations.push(Violation { axiom: Axiom::A4, witness: w });
            break;
        }
    }
    AxiomReport::from_violations(violations)
}

fn minimal_supersets_of(f: &SetFamily, x: &CandidateSet) -> Vec<CandidateSet> {
    let sup: Vec<&CandidateSet> = f.iter().filter(|z| x.is_proper_subset(z)).collect();
    sup.iter().filter(|z| !sup.iter().any(|y| y.is_proper_subset(z))).map(|z| (*z).clone()).collect()
}

pub fn minimal_proper_supersets(f: &SetFamily, x: &CandidateSet) -> Result<Vec<CandidateSet>> {
    if !f.contains(x) {
        return Err(Error::InvalidSet(format!("{x} is not a member of the family")));
    }
    Ok(minimal_supersets_of(f, x))
}

/// Searches for a bicycle chain. Chains of length three come from triple
/// enumeration; longer ones from a cycle in the graph on ordered pairs
/// (X, Y) with X ⋈ Y and edges (X, Y) → (Y, Z) whenever X, Y, Z can be
/// consecutive in a chain. Only validated chains are returned.
pub fn find_bicycle_chain(f: &SetFamily) -> Option<BicycleChain> {
    let sets: Vec<&CandidateSet> = f.iter().filter(|s| !s.is_empty()).collect();
    let k = sets.len();

    for a in 0..k {
        for b in a + 1..k {
            if !sets[a].bowtie(sets[b]) {
                continue;
            }
            for c in b + 1..k {
                for order in [[a, b, c], [a, c, b]] {
                    let chain = BicycleChain { chain: order.iter().map(|&i| sets[i].clone()).collect() };
                    if chain.is_valid() {
                        return Some(chain);
                    }
                }
            }
        }
    }

    let g = PairGraph::new(&sets);
    let cycle = g.find_cycle()?;
    let chain = BicycleChain { chain: cycle.iter().map(|&i| sets[i].clone()).collect() };
    if chain.is_valid() {
        return Some(chain);
    }
    // The cycle revisits a set; look for a chain with distinct sets among
    // the sets on cyclic components.
    g.exhaustive_chain().map(|c| BicycleChain { chain: c.iter().map(|&i| sets[i].clone()).collect() })
}

struct PairGraph<'a> {
    sets: &'a [&'a CandidateSet],
    /// vertex id -> (x, y)
    verts: Vec<(usize, usize)>,
    /// (x, y) -> vertex id
    index: Vec<Option<usize>>,
}

impl<'a> PairGraph<'a> {
    fn new(sets: &'a [&'a CandidateSet]) -> Self {
        let k = sets.len();
        let mut verts = Vec::new();
        let mut index = vec![None; k * k];
        for x in 0..k {
            for y in 0..k {
                if x != y && sets[x].bowtie(sets[y]) {
                    index[x * k + y] = Some(verts.len());
                    verts.push((x, y));
                }
            }
        }
        PairGraph { sets, verts, index }
    }

    fn successors(&self, v: usize) -> Vec<usize> {
        let k = self.sets.len();
        let (x, y) = self.verts[v];
        let xy = self.sets[x].intersection(self.sets[y]);
        (0..k)
            .filter_map(|z| {
                let w = self.index[y * k + z]?;
                let ok = !xy.intersects(self.sets[z]) && self.sets[y].is_subset(&self.sets[x].union(self.sets[z]));
                ok.then_some(w)
            })
            .collect()
    }

    /// Iterative DFS; on a back edge, unwinds the stack into the cycle's
    /// sequence of sets.
    fn find_cycle(&self) -> Option<Vec<usize>> {
        let nv = self.verts.len();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut color = vec![0u8; nv];
        for start in 0..nv {
            if color[start] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(start, self.successors(start), 0)];
            color[start] = 1;
            while let Some((v, succ, i)) = stack.last_mut() {
                if *i < succ.len() {
                    let w = succ[*i];
                    *i += 1;
                    match color[w] {
                        0 => {
                            color[w] = 1;
                            let s = self.successors(w);
                            stack.push((w, s, 0));
                        }
                        1 => {
                            let from = stack.iter().position(|(u, _, _)| *u == w).expect("on stack");
                            return Some(stack[from..].iter().map(|(u, _, _)| self.verts[*u].0).collect());
                        }
                        _ => {}
                    }
                } else {
                    color[*v] = 2;
                    stack.pop();
                }
            }
        }
        None
    }

    /// Depth-first enumeration of simple set sequences along graph edges,
    /// closing back to the start. Exponential; only reached for families
    /// that already fail another axiom.
    fn exhaustive_chain(&self) -> Option<Vec<usize>> {
        let k = self.sets.len();
        for s0 in 0..k {
            for s1 in 0..k {
                let Some(v) = self.index[s0 * k + s1] else { continue };
                let mut path = vec![s0, s1];
                let mut used = vec![false; k];
                used[s0] = true;
                used[s1] = true;
                if self.extend(v, &mut path, &mut used) {
                    return Some(path);
                }
            }
        }
        None
    }

    fn extend(&self, v: usize, path: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let k = self.sets.len();
        let s0 = path[0];
        for w in self.successors(v) {
            let z = self.verts[w].1;
            if z == s0 && path.len() >= 3 {
                // closing edge (last, s0) -> (s0, s1) must also exist
                let s1 = path[1];
                if let Some(first) = self.index[s0 * k + s1] {
                    if self.successors(w).contains(&first) {
                        return true;
                    }
                }
            }
            if used[z] || z < s0 {
                continue;
            }
            used[z] = true;
            path.push(z);
            if self.extend(w, path, used) {
                return true;
            }
            path.pop();
            used[z] = false;
        }
        false
    }
}

/// A1–A4 plus the absence of a bicycle chain. All violated axioms are
/// reported, each with its first witness.
pub fn is_clone_structure(f: &SetFamily) -> AxiomReport {
    let mut report = check_axioms_a1_a4(f);
    if let Some(chain) = find_bicycle_chain(f) {
        report.violations.push(Violation { axiom: Axiom::A5, witness: chain.chain });
        report.verdict = false;
    }
    report
}

/// Embeds `inner` into `outer` at candidate `at`. The embedded candidates
/// take ids `at..at + inner.m`; later candidates of `outer` shift up.
pub fn embed_family(outer: &SetFamily, at: CandidateId, inner: &SetFamily) -> Result<SetFamily> {
    let mo = outer.ground_size();
    let mi = inner.ground_size();
    if at >= mo {
        return Err(Error::OutOfRange { id: at, m: mo });
    }
    if mi == 0 {
        return Err(Error::InvalidSet("cannot embed an empty ground set".into()));
    }
    let shift = |c: CandidateId| if c < at { c } else { c + mi - 1 };
    let mut sets = Vec::new();
    for s in outer {
        let mut v: Vec<CandidateId> = s.iter().filter(|&c| c != at).map(shift).collect();
        if s.contains(at) {
            v.extend(at..at + mi);
        }
        sets.push(CandidateSet::new(v));
    }
    for s in inner {
        sets.push(s.iter().map(|c| c + at).collect());
    }
    SetFamily::new(mo + mi - 1, sets)
}

/// True iff `e` is a member of `f` that no member of `f` crosses.
pub fn is_support(f: &SetFamily, e: &CandidateSet) -> bool {
    f.contains(e) && f.iter().all(|x| x.is_subset(e) || e.is_subset(x) || !x.intersects(e))
}

/// The subfamily with support `e`, relabeled onto `0..|e|` by rank in `e`.
pub fn subfamily(f: &SetFamily, e: &CandidateSet) -> Result<SetFamily> {
    if !is_support(f, e) {
        return Err(Error::InvalidSet(format!("{e} is not a support of the family")));
    }
    let rank = |c: CandidateId| e.members().binary_search(&c).expect("member of support");
    SetFamily::new(e.len(), f.restrict(e).into_iter().map(|s| s.iter().map(rank).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(m: usize, sets: &[&[usize]]) -> SetFamily {
        SetFamily::new(m, sets.iter().map(|s| CandidateSet::new(s.iter().copied()))).unwrap()
    }

    /// a=0, x=1, y=2, c=3
    fn example_3_7() -> SetFamily {
        fam(4, &[&[0], &[1], &[2], &[1, 2], &[3], &[0, 1, 2], &[1, 2, 3], &[0, 1, 2, 3]])
    }

    #[test]
    fn string_passes() {
        for m in 1..7 {
            assert!(is_clone_structure(&SetFamily::string(m)).verdict, "m={m}");
            assert!(is_clone_structure(&SetFamily::fat(m)).verdict, "m={m}");
        }
    }

    #[test]
    fn powerset_fails_a4() {
        let r = check_axioms_a1_a4(&SetFamily::powerset(4));
        assert!(!r.verdict);
        let w = r.witness(Axiom::A4).unwrap();
        assert_eq!(w[0], CandidateSet::from([0]));
        assert_eq!(&w[1..4], &[CandidateSet::from([0, 1]), CandidateSet::from([0, 2]), CandidateSet::from([0, 3])]);
    }

    #[test]
    fn missing_singleton_fails_a1() {
        let f = fam(3, &[&[0], &[1], &[0, 1, 2]]);
        let r = check_axioms_a1_a4(&f);
        assert_eq!(r.witness(Axiom::A1), Some(&[CandidateSet::from([2])][..]));
        let with_empty = fam(1, &[&[], &[0]]);
        assert!(check_axioms_a1_a4(&with_empty).violates(Axiom::A1));
        let no_ground = fam(2, &[&[0], &[1]]);
        assert!(check_axioms_a1_a4(&no_ground).violates(Axiom::A1));
    }

    #[test]
    fn a2_and_a3_witnesses() {
        // {0,1} and {1,2} intersect but {0,1,2}... is the ground; {1} present.
        // Drop {0} difference: A3 fails, A1 too.
        let f = fam(4, &[&[0], &[1], &[2], &[3], &[0, 1], &[1, 2], &[0, 1, 2, 3]]);
        let r = check_axioms_a1_a4(&f);
        assert_eq!(r.witness(Axiom::A2), Some(&[CandidateSet::from([0, 1]), CandidateSet::from([1, 2])][..]));
        assert!(!r.violates(Axiom::A3));
        let g = fam(3, &[&[0], &[1], &[2], &[0, 1], &[0, 1, 2], &[1, 2, 0]]);
        assert!(check_axioms_a1_a4(&g).verdict);
    }

    #[test]
    fn minimal_supersets() {
        let s = SetFamily::string(3);
        assert_eq!(
            minimal_proper_supersets(&s, &CandidateSet::from([1])).unwrap(),
            vec![CandidateSet::from([0, 1]), CandidateSet::from([1, 2])]
        );
        let f = SetFamily::fat(4);
        assert_eq!(minimal_proper_supersets(&f, &CandidateSet::from([0])).unwrap(), vec![CandidateSet::range(0, 4)]);
        assert!(minimal_proper_supersets(&f, &CandidateSet::range(0, 4)).unwrap().is_empty());
        assert!(minimal_proper_supersets(&f, &CandidateSet::from([0, 1])).is_err());
    }

    #[test]
    fn triangle_chain_in_powerset_3() {
        let c = find_bicycle_chain(&SetFamily::powerset(3)).unwrap();
        assert!(c.is_valid());
        assert_eq!(c.chain, vec![CandidateSet::from([0, 1]), CandidateSet::from([0, 2]), CandidateSet::from([1, 2])]);
    }

    #[test]
    fn ring_has_chain() {
        for m in 3..8 {
            let r = is_clone_structure(&SetFamily::ring(m));
            assert!(!r.verdict);
            let w = r.witness(Axiom::A5).expect("A5 witness");
            assert!(BicycleChain { chain: w.to_vec() }.is_valid(), "m={m}");
        }
    }

    #[test]
    fn long_chain_found_through_pair_graph() {
        // Pairs around a 5-cycle: the only chain has length five.
        let sets: Vec<Vec<usize>> = (0..5).map(|i| vec![i, (i + 1) % 5]).collect();
        let mut all: Vec<CandidateSet> = sets.into_iter().map(CandidateSet::from).collect();
        all.extend((0..5).map(CandidateSet::singleton));
        let f = SetFamily::new(5, all).unwrap();
        let c = find_bicycle_chain(&f).unwrap();
        assert_eq!(c.chain.len(), 5);
        assert!(c.is_valid());
    }

    #[test]
    fn example_3_7_passes() {
        assert!(is_clone_structure(&example_3_7()).verdict);
    }

    #[test]
    fn embedding_matches_example_3_7() {
        // string {a,b,c} with b replaced by {x,y}
        let e = embed_family(&SetFamily::string(3), 1, &SetFamily::string(2)).unwrap();
        assert_eq!(e, example_3_7());
    }

    #[test]
    fn subfamily_extraction() {
        let f = example_3_7();
        assert!(is_support(&f, &CandidateSet::from([1, 2])));
        assert!(!is_support(&f, &CandidateSet::from([0, 1, 2])));
        assert_eq!(subfamily(&f, &CandidateSet::from([1, 2])).unwrap(), SetFamily::string(2));
        assert!(subfamily(&f, &CandidateSet::from([0, 1])).is_err());
    }
}
