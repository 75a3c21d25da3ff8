//! PQ-tree representation of clone structures.
//!
//! Every internal node's leaf set is a clone set. Under a Q-node, the
//! union of any run of consecutive children (shorter than all of them) is
//! a clone set as well; nothing else is.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::axioms::{is_clone_structure, is_support};
use crate::election::CandidateId;
use crate::error::{Error, Result};
use crate::set::{CandidateSet, SetFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf(CandidateId),
    P,
    Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PqNode {
    pub kind: NodeKind,
    pub children: Vec<usize>,
}

/// Arena-backed ordered tree.
#[derive(Clone, Debug)]
pub struct PqTree {
    nodes: Vec<PqNode>,
    root: usize,
}

/// Nested form of a tree, used for construction and comparison.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Leaf(CandidateId),
    P(Vec<Shape>),
    Q(Vec<Shape>),
}

impl Shape {
    fn min_leaf(&self) -> CandidateId {
        match self {
            Shape::Leaf(c) => *c,
            Shape::P(ch) | Shape::Q(ch) => ch.iter().map(Shape::min_leaf).min().expect("internal node has children"),
        }
    }

    /// Sorts P children by smallest leaf and orients each Q-node so that
    /// its first child holds the smaller of the two end-children minima.
    pub fn canonical(self) -> Shape {
        match self {
            Shape::Leaf(c) => Shape::Leaf(c),
            Shape::P(ch) => {
                let mut ch: Vec<Shape> = ch.into_iter().map(Shape::canonical).collect();
                ch.sort_by_key(Shape::min_leaf);
                Shape::P(ch)
            }
            Shape::Q(ch) => {
                let mut ch: Vec<Shape> = ch.into_iter().map(Shape::canonical).collect();
                if ch.first().map(Shape::min_leaf) > ch.last().map(Shape::min_leaf) {
                    ch.reverse();
                }
                Shape::Q(ch)
            }
        }
    }

    /// `(0 [1 2 3])`-style rendering: P in parentheses, Q in brackets.
    pub fn to_bracket(&self) -> String {
        match self {
            Shape::Leaf(c) => c.to_string(),
            Shape::P(ch) => format!("({})", ch.iter().map(Shape::to_bracket).collect::<Vec<_>>().join(" ")),
            Shape::Q(ch) => format!("[{}]", ch.iter().map(Shape::to_bracket).collect::<Vec<_>>().join(" ")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct NodeJson {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    candidate: Option<CandidateId>,
    #[serde(default)]
    children: Vec<NodeJson>,
}

impl PqTree {
    /// Builds and validates a tree from its nested form.
    pub fn from_shape(shape: &Shape) -> Result<PqTree> {
        fn push(nodes: &mut Vec<PqNode>, s: &Shape) -> usize {
            let (kind, ch) = match s {
                Shape::Leaf(c) => (NodeKind::Leaf(*c), &[][..]),
                Shape::P(ch) => (NodeKind::P, &ch[..]),
                Shape::Q(ch) => (NodeKind::Q, &ch[..]),
            };
            let id = nodes.len();
            nodes.push(PqNode { kind, children: Vec::new() });
            let children = ch.iter().map(|c| push(nodes, c)).collect();
            nodes[id].children = children;
            id
        }
        let mut nodes = Vec::new();
        let root = push(&mut nodes, shape);
        let t = PqTree { nodes, root };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.nodes.len()];
        let mut leaves = Vec::new();
        for (id, n) in self.nodes.iter().enumerate() {
            for &c in &n.children {
                if c >= self.nodes.len() || seen[c] || c == self.root {
                    return Err(Error::MalformedTree(format!("node {c} referenced twice or missing")));
                }
                seen[c] = true;
            }
            match n.kind {
                NodeKind::Leaf(c) => {
                    if !n.children.is_empty() {
                        return Err(Error::MalformedTree(format!("leaf {c} has children")));
                    }
                    leaves.push(c);
                }
                NodeKind::P if n.children.len() < 2 => {
                    return Err(Error::MalformedTree(format!("P-node {id} has fewer than 2 children")));
                }
                NodeKind::Q if n.children.len() < 3 => {
                    return Err(Error::MalformedTree(format!("Q-node {id} has fewer than 3 children")));
                }
                _ => {}
            }
        }
        leaves.sort_unstable();
        if leaves.iter().enumerate().any(|(i, &c)| i != c) {
            return Err(Error::MalformedTree("leaves must be labeled 0..m-1 without repeats".into()));
        }
        Ok(())
    }

    pub fn shape(&self) -> Shape {
        self.shape_at(self.root)
    }

    fn shape_at(&self, v: usize) -> Shape {
        let n = &self.nodes[v];
        let ch = || n.children.iter().map(|&c| self.shape_at(c)).collect();
        match n.kind {
            NodeKind::Leaf(c) => Shape::Leaf(c),
            NodeKind::P => Shape::P(ch()),
            NodeKind::Q => Shape::Q(ch()),
        }
    }

    pub fn canonicalize(&self) -> PqTree {
        PqTree::from_shape(&self.shape().canonical()).expect("canonical form of a valid tree is valid")
    }

    /// Equality up to P-node permutation and Q-node reversal.
    pub fn equivalent(&self, other: &PqTree) -> bool {
        self.shape().canonical() == other.shape().canonical()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, v: usize) -> &PqNode {
        &self.nodes[v]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.nodes[v].children
    }

    pub fn kind(&self, v: usize) -> NodeKind {
        self.nodes[v].kind
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        matches!(self.nodes[v].kind, NodeKind::Leaf(_))
    }

    /// Number of leaves.
    pub fn m(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Leaf(_))).count()
    }

    /// `parents()[v]` is the parent of `v`, `None` for the root.
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut p = vec![None; self.nodes.len()];
        for (v, n) in self.nodes.iter().enumerate() {
            for &c in &n.children {
                p[c] = Some(v);
            }
        }
        p
    }

    /// Leaves under `v` in left-to-right order.
    pub fn frontier_at(&self, v: usize) -> Vec<CandidateId> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            match self.nodes[u].kind {
                NodeKind::Leaf(c) => out.push(c),
                _ => stack.extend(self.nodes[u].children.iter().rev()),
            }
        }
        out
    }

    pub fn frontier(&self) -> Vec<CandidateId> {
        self.frontier_at(self.root)
    }

    pub fn leaf_set(&self, v: usize) -> CandidateSet {
        CandidateSet::new(self.frontier_at(v))
    }

    /// Node ids in breadth-first order from the root, children left to right.
    pub fn bfs(&self) -> Vec<usize> {
        let mut out = vec![self.root];
        let mut i = 0;
        while i < out.len() {
            out.extend(self.nodes[out[i]].children.iter().copied());
            i += 1;
        }
        out
    }

    fn to_node_json(&self) -> NodeJson {
        fn conv(t: &PqTree, v: usize) -> NodeJson {
            let n = &t.nodes[v];
            let (kind, candidate) = match n.kind {
                NodeKind::Leaf(c) => ("leaf", Some(c)),
                NodeKind::P => ("P", None),
                NodeKind::Q => ("Q", None),
            };
            NodeJson { kind: kind.into(), candidate, children: n.children.iter().map(|&c| conv(t, c)).collect() }
        }
        conv(self, self.root)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_node_json()).expect("tree serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_node_json()).expect("tree serializes")
    }

    pub fn from_json(text: &str) -> Result<PqTree> {
        fn conv(n: NodeJson) -> Result<Shape> {
            match n.kind.as_str() {
                "leaf" => match n.candidate {
                    Some(c) if n.children.is_empty() => Ok(Shape::Leaf(c)),
                    Some(_) => Err(Error::MalformedTree("leaf with children".into())),
                    None => Err(Error::MalformedTree("leaf without candidate".into())),
                },
                "P" | "Q" => {
                    let ch = n.children.into_iter().map(conv).collect::<Result<Vec<_>>>()?;
                    Ok(if n.kind == "P" { Shape::P(ch) } else { Shape::Q(ch) })
                }
                k => Err(Error::MalformedTree(format!("unknown node kind {k:?}"))),
            }
        }
        let root: NodeJson = serde_json::from_str(text)?;
        PqTree::from_shape(&conv(root)?)
    }

    /// Graphviz rendering: P-nodes as circles, Q-nodes as boxes. Nodes in
    /// `black` are filled.
    pub fn to_dot(&self, name: &dyn Fn(CandidateId) -> String, black: Option<&[bool]>) -> String {
        let mut out = String::from("digraph pqtree {\n  node [fontname=\"Helvetica\"];\n");
        for v in self.bfs() {
            let fill = match black {
                Some(b) if b[v] => ", style=filled, fillcolor=gray30, fontcolor=white",
                _ => "",
            };
            let _ = match self.nodes[v].kind {
                NodeKind::Leaf(c) => writeln!(out, "  n{v} [shape=plaintext, label=\"{}\"{fill}];", name(c)),
                NodeKind::P => writeln!(out, "  n{v} [shape=circle, label=\"P\"{fill}];"),
                NodeKind::Q => writeln!(out, "  n{v} [shape=box, label=\"Q\"{fill}];"),
            };
        }
        for v in self.bfs() {
            for &c in &self.nodes[v].children {
                let _ = writeln!(out, "  n{v} -> n{c};");
            }
        }
        out.push_str("}\n");
        out
    }
}

impl PartialEq for PqTree {
    fn eq(&self, other: &Self) -> bool {
        self.shape() == other.shape()
    }
}

impl Eq for PqTree {}

/// Dec(f): the supports of the irreducible proper subfamilies, or the
/// ground set itself when f is irreducible.
pub fn decomposition(f: &SetFamily) -> Result<Vec<CandidateSet>> {
    require_clone_structure(f)?;
    Ok(decomposition_unchecked(f))
}

fn require_clone_structure(f: &SetFamily) -> Result<()> {
    let r = is_clone_structure(f);
    if r.verdict {
        Ok(())
    } else {
        let tags: Vec<String> = r.violations.iter().map(|v| v.axiom.to_string()).collect();
        Err(Error::NotCloneStructure(format!("violates {}", tags.join(", "))))
    }
}

fn decomposition_unchecked(f: &SetFamily) -> Vec<CandidateSet> {
    let nontrivial: Vec<&CandidateSet> = f.iter().filter(|s| s.len() >= 2).collect();
    let minimal: Vec<&CandidateSet> = nontrivial.iter().filter(|s| !nontrivial.iter().any(|t| t.is_proper_subset(s))).copied().collect();
    let pairs: Vec<&CandidateSet> = f.iter().filter(|s| s.len() == 2).collect();

    let mut dec: Vec<CandidateSet> = Vec::new();
    for s in minimal {
        let support = if s.len() >= 3 {
            s.clone()
        } else {
            // Grow along 2-element sets to the longest string through s.
            let mut comp = s.clone();
            loop {
                let grown = pairs.iter().filter(|p| p.intersects(&comp)).fold(comp.clone(), |acc, p| acc.union(p));
                if grown == comp {
                    break;
                }
                comp = grown;
            }
            if !is_support(f, &comp) {
                continue;
            }
            comp
        };
        if !dec.contains(&support) {
            dec.push(support);
        }
    }
    dec.sort();
    for (i, a) in dec.iter().enumerate() {
        for b in &dec[i + 1..] {
            assert!(!a.intersects(b), "decomposition members {a} and {b} overlap");
        }
    }
    dec
}

pub fn build_tree(f: &SetFamily) -> Result<PqTree> {
    require_clone_structure(f)?;
    Ok(build_tree_unchecked(f))
}

/// As [`build_tree`] for families already known to be clone structures,
/// e.g. the clone sets of a profile.
pub fn build_tree_unchecked(f: &SetFamily) -> PqTree {
    let items: Vec<Shape> = (0..f.ground_size()).map(Shape::Leaf).collect();
    let shape = build_shape(f, items).canonical();
    PqTree::from_shape(&shape).expect("decomposition yields a valid tree")
}

/// `f` is over `0..items.len()`; element `i` stands for subtree `items[i]`.
fn build_shape(f: &SetFamily, items: Vec<Shape>) -> Shape {
    let k = items.len();
    if k == 1 {
        return items.into_iter().next().expect("one item");
    }
    let dec = decomposition_unchecked(f);
    assert!(!dec.is_empty(), "every clone structure has an irreducible subfamily");
    if dec.len() == 1 && dec[0].len() == k {
        return irreducible_shape(f, items);
    }

    let mut slots: Vec<Option<Shape>> = items.into_iter().map(Some).collect();
    // Each group of old elements becomes one new element, ordered by
    // smallest member.
    let mut groups: Vec<CandidateSet> = dec.clone();
    let covered: CandidateSet = dec.iter().fold(CandidateSet::empty(), |a, d| a.union(d));
    groups.extend((0..k).filter(|c| !covered.contains(*c)).map(CandidateSet::singleton));
    groups.sort_by_key(|g| g.min());

    let mut new_id = vec![0; k];
    let mut new_items = Vec::with_capacity(groups.len());
    for (g_id, g) in groups.iter().enumerate() {
        for c in g.iter() {
            new_id[c] = g_id;
        }
        if g.len() == 1 {
            new_items.push(slots[g.members()[0]].take().expect("unused slot"));
        } else {
            let sub = crate::axioms::subfamily(f, g).expect("decomposition member is a support");
            let sub_items = g.iter().map(|c| slots[c].take().expect("unused slot")).collect();
            new_items.push(build_shape(&sub, sub_items));
        }
    }
    let collapsed =
        f.iter().filter(|s| !dec.iter().any(|d| s.is_proper_subset(d))).map(|s| s.iter().map(|c| new_id[c]).collect::<CandidateSet>());
    let cf = SetFamily::new(groups.len(), collapsed).expect("collapsed ids in range");
    build_shape(&cf, new_items)
}

/// Depth-one tree for an irreducible family: a Q-node along the chain of
/// 2-element sets for a string of sausages, a P-node otherwise.
fn irreducible_shape(f: &SetFamily, items: Vec<Shape>) -> Shape {
    let k = items.len();
    let pairs: Vec<&CandidateSet> = f.iter().filter(|s| s.len() == 2).collect();
    if k == 2 || pairs.is_empty() {
        return Shape::P(items);
    }
    let mut adj: BTreeMap<CandidateId, Vec<CandidateId>> = BTreeMap::new();
    for p in &pairs {
        let (a, b) = (p.members()[0], p.members()[1]);
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let start = (0..k).find(|c| adj.get(c).map_or(0, Vec::len) == 1).expect("string has an end");
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while let Some(&next) = adj[&cur].iter().find(|&&x| x != prev) {
        order.push(next);
        prev = cur;
        cur = next;
    }
    assert_eq!(order.len(), k, "irreducible string must be a single path");
    let mut slots: Vec<Option<Shape>> = items.into_iter().map(Some).collect();
    Shape::Q(order.into_iter().map(|c| slots[c].take().expect("each item once")).collect())
}

pub fn tree_to_family(t: &PqTree) -> SetFamily {
    let mut sets = Vec::new();
    for v in 0..t.node_count() {
        sets.push(t.leaf_set(v));
        if t.kind(v) == NodeKind::Q {
            let ch: Vec<CandidateSet> = t.children(v).iter().map(|&c| t.leaf_set(c)).collect();
            let k = ch.len();
            for i in 0..k {
                let mut acc = ch[i].clone();
                for (j, next) in ch.iter().enumerate().skip(i + 1) {
                    acc = acc.union(next);
                    if j - i + 1 < k {
                        sets.push(acc.clone());
                    }
                }
            }
        }
    }
    SetFamily::new(t.m(), sets).expect("leaves are 0..m-1")
}

/// Membership test against the tree's clone family without building it.
pub fn is_clone_in_tree(t: &PqTree, x: &CandidateSet) -> bool {
    if x.is_empty() || x.max().is_some_and(|c| c >= t.m()) {
        return false;
    }
    // Count members of x under every node, bottom-up.
    let order = t.bfs();
    let mut count = vec![0usize; t.node_count()];
    let mut size = vec![0usize; t.node_count()];
    for &v in order.iter().rev() {
        match t.kind(v) {
            NodeKind::Leaf(c) => {
                size[v] = 1;
                count[v] = usize::from(x.contains(c));
            }
            _ => {
                size[v] = t.children(v).iter().map(|&c| size[c]).sum();
                count[v] = t.children(v).iter().map(|&c| count[c]).sum();
            }
        }
    }
    // Deepest node containing all of x.
    let mut v = t.root();
    while let Some(&c) = t.children(v).iter().find(|&&c| count[c] == x.len()) {
        v = c;
    }
    if count[v] == size[v] {
        return true;
    }
    if t.kind(v) != NodeKind::Q {
        return false;
    }
    let touched: Vec<usize> = t.children(v).iter().enumerate().filter(|(_, &c)| count[c] > 0).map(|(i, _)| i).collect();
    let consecutive = touched.windows(2).all(|w| w[1] == w[0] + 1);
    consecutive
        && touched.iter().all(|&i| {
            let c = t.children(v)[i];
            count[c] == size[c]
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Shape::{Leaf as L, P, Q};

    fn fam(m: usize, sets: &[&[usize]]) -> SetFamily {
        SetFamily::new(m, sets.iter().map(|s| CandidateSet::new(s.iter().copied()))).unwrap()
    }

    fn example_3_7() -> SetFamily {
        fam(4, &[&[0], &[1], &[2], &[1, 2], &[3], &[0, 1, 2], &[1, 2, 3], &[0, 1, 2, 3]])
    }

    fn fig3() -> PqTree {
        PqTree::from_shape(&Q(vec![L(0), P(vec![L(1), L(2)]), L(3)])).unwrap()
    }

    #[test]
    fn decomposition_examples() {
        let f = fam(4, &[&[0], &[1], &[2], &[3], &[1, 2], &[0, 1, 2, 3]]);
        assert_eq!(decomposition(&f).unwrap(), vec![CandidateSet::from([1, 2])]);
        assert_eq!(decomposition(&SetFamily::fat(4)).unwrap(), vec![CandidateSet::range(0, 4)]);
        assert_eq!(decomposition(&example_3_7()).unwrap(), vec![CandidateSet::from([1, 2])]);
        assert!(decomposition(&SetFamily::powerset(4)).is_err());
    }

    #[test]
    fn pair_runs_under_mixed_q_node_are_not_supports() {
        // Q(0, 1, P(2, 3)): {0,1} is a run, not a support.
        let t = PqTree::from_shape(&Q(vec![L(0), L(1), P(vec![L(2), L(3)])])).unwrap();
        let f = tree_to_family(&t);
        assert_eq!(decomposition(&f).unwrap(), vec![CandidateSet::from([2, 3])]);
        assert!(build_tree(&f).unwrap().equivalent(&t));
    }

    #[test]
    fn build_examples() {
        assert_eq!(build_tree(&example_3_7()).unwrap(), fig3());
        assert_eq!(build_tree(&SetFamily::string(4)).unwrap().shape(), Q(vec![L(0), L(1), L(2), L(3)]));
        assert_eq!(build_tree(&SetFamily::fat(4)).unwrap().shape(), P(vec![L(0), L(1), L(2), L(3)]));
        assert_eq!(build_tree(&SetFamily::string(2)).unwrap().shape(), P(vec![L(0), L(1)]));
        assert_eq!(build_tree(&SetFamily::string(1)).unwrap().shape(), L(0));
    }

    #[test]
    fn nested_build_roundtrip() {
        let t = PqTree::from_shape(&Q(vec![P(vec![L(0), Q(vec![L(1), L(4), L(5)])]), L(2), P(vec![L(3), L(6), L(7)])])).unwrap();
        let f = tree_to_family(&t);
        assert!(is_clone_structure(&f).verdict);
        assert!(build_tree(&f).unwrap().equivalent(&t));
    }

    #[test]
    fn tree_to_family_examples() {
        assert_eq!(tree_to_family(&fig3()), example_3_7());
        let leaf = PqTree::from_shape(&L(0)).unwrap();
        assert_eq!(tree_to_family(&leaf).sets(), &[CandidateSet::from([0])]);
        let p3 = PqTree::from_shape(&P(vec![L(0), L(1), L(2)])).unwrap();
        assert_eq!(tree_to_family(&p3), SetFamily::fat(3));
    }

    #[test]
    fn membership_in_tree() {
        let t = fig3();
        assert!(is_clone_in_tree(&t, &CandidateSet::from([0, 1, 2])));
        assert!(!is_clone_in_tree(&t, &CandidateSet::from([0, 3])));
        assert!(is_clone_in_tree(&t, &CandidateSet::range(0, 4)));
        assert!(!is_clone_in_tree(&t, &CandidateSet::from([0, 1])));
        assert!(is_clone_in_tree(&t, &CandidateSet::from([2])));
    }

    #[test]
    fn malformed_trees_rejected() {
        assert!(PqTree::from_shape(&Q(vec![L(0), L(1)])).is_err());
        assert!(PqTree::from_shape(&P(vec![L(0)])).is_err());
        assert!(PqTree::from_shape(&P(vec![L(0), L(2)])).is_err());
        assert!(PqTree::from_shape(&P(vec![L(0), L(0)])).is_err());
    }

    #[test]
    fn canonical_orientation() {
        let t = PqTree::from_shape(&Q(vec![L(3), P(vec![L(2), L(1)]), L(0)])).unwrap();
        assert_eq!(t.canonicalize(), fig3());
        assert!(t.equivalent(&fig3()));
        assert_eq!(fig3().shape().to_bracket(), "[0 (1 2) 3]");
    }

    #[test]
    fn json_roundtrip_and_dot() {
        let t = fig3();
        let j = t.to_json();
        assert_eq!(PqTree::from_json(&j).unwrap(), t);
        assert!(j.starts_with(r#"{"kind":"Q","children":[{"kind":"leaf","candidate":0"#), "{j}");
        let dot = t.to_dot(&|c| ["a", "x", "y", "c"][c].to_string(), None);
        assert!(dot.contains("shape=box, label=\"Q\""));
        assert!(dot.contains("shape=circle, label=\"P\""));
        assert!(dot.contains("label=\"y\""));
        assert!(PqTree::from_json(r#"{"kind":"R","children":[]}"#).is_err());
    }
}
