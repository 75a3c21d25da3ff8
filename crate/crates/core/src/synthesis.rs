//! Profiles that implement a given clone structure.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::axioms::{embed_family, is_clone_structure};
use crate::clones::all_clone_sets;
use crate::election::{CandidateId, LinearOrder, Profile};
use crate::error::{Error, Result};
use crate::pqtree::{build_tree, NodeKind, PqTree, Shape};
use crate::set::SetFamily;

fn profile(rankings: Vec<Vec<CandidateId>>) -> Profile {
    Profile::from_rankings(rankings).expect("constructed rankings are valid")
}

/// One voter ranking `0 ≻ 1 ≻ … ≻ m−1`.
pub fn implement_string(m: usize) -> Result<Profile> {
    if m == 0 {
        return Err(Error::Precondition("m must be at least 1".into()));
    }
    Ok(profile(vec![(0..m).collect()]))
}

/// Minimal profile whose clone structure is the fat sausage over `m`.
pub fn implement_fat(m: usize) -> Result<Profile> {
    match m {
        0 | 1 => Err(Error::Precondition(format!("fat sausage needs m >= 2, got {m}"))),
        2 => Ok(profile(vec![vec![0, 1]])),
        3 => Ok(profile(vec![vec![0, 1, 2], vec![1, 0, 2], vec![1, 2, 0]])),
        _ if m.is_multiple_of(2) => {
            let k = m / 2;
            let r2 = (0..k).flat_map(|i| [k + i, i]).collect();
            Ok(profile(vec![(0..m).collect(), r2]))
        }
        _ => {
            // x_i = i, y_i = k + i, z = 2k.
            let k = m / 2;
            let z = 2 * k;
            let mut r1: Vec<CandidateId> = (0..k).collect();
            r1.extend(k..2 * k - 1);
            r1.push(z);
            r1.push(2 * k - 1);
            let mut r2: Vec<CandidateId> = (0..k).flat_map(|i| [k + i, i]).collect();
            r2.push(z);
            Ok(profile(vec![r1, r2]))
        }
    }
}

/// The slide over `m` candidates: candidate 0 is the sliding candidate and
/// voter `i` ranks it in position `i`, the others in increasing order.
pub fn slide(m: usize) -> Result<Profile> {
    if m <= 2 {
        return Err(Error::Precondition(format!("slide needs m > 2, got {m}")));
    }
    let rankings = (0..m)
        .map(|i| {
            let mut r: Vec<CandidateId> = (1..m).collect();
            r.insert(i, 0);
            r
        })
        .collect();
    Ok(profile(rankings))
}

fn pad_to(p: &Profile, n: usize) -> Vec<Vec<CandidateId>> {
    let mut r = p.canonical_key();
    while r.len() < n {
        r.push(r.last().expect("profile has voters").clone());
    }
    r
}

/// Ids of `f` become `c..c + m_f`; ids of `e` above `c` shift up.
fn splice(e_rank: &[CandidateId], c: CandidateId, f_rank: &[CandidateId], m_f: usize) -> Vec<CandidateId> {
    let mut out = Vec::with_capacity(e_rank.len() + m_f - 1);
    for &x in e_rank {
        if x == c {
            out.extend(f_rank.iter().map(|&y| c + y));
        } else if x < c {
            out.push(x);
        } else {
            out.push(x + m_f - 1);
        }
    }
    out
}

fn combined_names(e: &Profile, c: CandidateId, f: &Profile) -> Option<Vec<String>> {
    let (en, fname) = (e.names()?, f.names()?);
    let mut names: Vec<String> = en[..c].to_vec();
    names.extend(fname.iter().cloned());
    names.extend(en[c + 1..].iter().cloned());
    Some(names)
}

/// Replaces candidate `c` of `e` by the candidates of `f`. The shorter
/// profile is padded by repeating its last voter. If the plain embedding
/// produces clone sets crossing the embedded block, `f`'s order in the
/// last voter is reversed, adding a voter first if there is only one.
pub fn compose(e: &Profile, c: CandidateId, f: &Profile) -> Result<Profile> {
    if c >= e.m() {
        return Err(Error::OutOfRange { id: c, m: e.m() });
    }
    let target = embed_family(&all_clone_sets(e), c, &all_clone_sets(f))?;
    let names = combined_names(e, c, f);
    let finish = |rankings: Vec<Vec<CandidateId>>| -> Result<Profile> {
        let p = Profile::from_rankings(rankings)?;
        match &names {
            Some(n) => p.clone().with_names(n.clone()).or(Ok(p)),
            None => Ok(p),
        }
    };

    let n = e.n().max(f.n());
    let er = pad_to(e, n);
    let fr = pad_to(f, n);
    let plain: Vec<Vec<CandidateId>> = er.iter().zip(&fr).map(|(a, b)| splice(a, c, b, f.m())).collect();
    let p = finish(plain)?;
    if all_clone_sets(&p) == target {
        return Ok(p);
    }

    let n = n.max(2);
    let er = pad_to(e, n);
    let fr = pad_to(f, n);
    let mut flipped: Vec<Vec<CandidateId>> = er.iter().zip(&fr).map(|(a, b)| splice(a, c, b, f.m())).collect();
    let mut last_f = fr[n - 1].clone();
    last_f.reverse();
    flipped[n - 1] = splice(&er[n - 1], c, &last_f, f.m());
    let p = finish(flipped)?;
    if all_clone_sets(&p) != target {
        return Err(Error::Precondition("composition left clone sets crossing the embedded block".into()));
    }
    Ok(p)
}

/// A profile over local ids plus the real candidate behind each local id.
struct Labeled {
    profile: Profile,
    labels: Vec<CandidateId>,
}

impl Labeled {
    fn relabel(self, m: usize) -> Profile {
        let rankings = self.profile.orders().iter().map(|o| o.ranking().iter().map(|&x| self.labels[x]).collect()).collect();
        let p = profile(rankings);
        debug_assert_eq!(p.m(), m);
        p
    }
}

fn build_labeled(
    t: &PqTree,
    v: usize,
    skeleton: &dyn Fn(NodeKind, usize) -> Profile,
    combine: &dyn Fn(&Profile, CandidateId, &Profile) -> Result<Profile>,
) -> Result<Labeled> {
    if let NodeKind::Leaf(c) = t.kind(v) {
        return Ok(Labeled { profile: profile(vec![vec![0]]), labels: vec![c] });
    }
    let ch = t.children(v);
    let mut cur = Labeled { profile: skeleton(t.kind(v), ch.len()), labels: vec![usize::MAX; ch.len()] };
    // Right to left, so the slots of children not yet placed keep their ids.
    for (i, &u) in ch.iter().enumerate().rev() {
        let sub = build_labeled(t, u, skeleton, combine)?;
        if sub.labels.len() == 1 {
            cur.labels[i] = sub.labels[0];
            continue;
        }
        let profile = combine(&cur.profile, i, &sub.profile)?;
        let mut labels = cur.labels[..i].to_vec();
        labels.extend(sub.labels);
        labels.extend_from_slice(&cur.labels[i + 1..]);
        cur = Labeled { profile, labels };
    }
    Ok(cur)
}

fn require_clone_structure(f: &SetFamily) -> Result<PqTree> {
    let report = is_clone_structure(f);
    if !report.verdict {
        let axioms: Vec<String> = report.violations.iter().map(|v| v.axiom.to_string()).collect();
        return Err(Error::NotCloneStructure(format!("violates {}", axioms.join(", "))));
    }
    build_tree(f)
}

/// Number of voters [`implement_family`] uses for the tree: 1 for a string
/// of sausages, 3 if some P-node has exactly three children, else 2.
pub fn voters_needed(t: &PqTree) -> usize {
    let internal: Vec<usize> = (0..t.node_count()).filter(|&v| !t.is_leaf(v)).collect();
    let is_string = match internal.as_slice() {
        [] => true,
        [v] => t.kind(*v) == NodeKind::Q || t.children(*v).len() == 2,
        _ => false,
    };
    if is_string {
        1
    } else if internal.iter().any(|&v| t.kind(v) == NodeKind::P && t.children(v).len() == 3) {
        3
    } else {
        2
    }
}

/// A profile with at most three voters whose clone structure is `f`.
pub fn implement_family(f: &SetFamily) -> Result<Profile> {
    let t = require_clone_structure(f)?;
    implement_tree(&t)
}

/// As [`implement_family`], starting from the tree.
pub fn implement_tree(t: &PqTree) -> Result<Profile> {
    if voters_needed(t) == 1 {
        return Ok(profile(vec![t.frontier()]));
    }
    let skeleton = |kind: NodeKind, k: usize| match kind {
        NodeKind::Q => implement_string(k).expect("k >= 3"),
        _ => implement_fat(k).expect("k >= 2"),
    };
    let p = build_labeled(t, t.root(), &skeleton, &compose)?.relabel(t.m());
    debug_assert!(p.n() <= voters_needed(t));
    Ok(p)
}

/// Embeds `q` at `c` of `r` so that the result stays single-crossing with
/// respect to voter order: with `q` first padded so its last voter is the
/// reverse of its first, the result is `r` with `q_1` substituted
/// throughout, followed by `r_n` with `q_2..q_n` substituted.
pub fn compose_single_crossing(r: &Profile, c: CandidateId, q: &Profile) -> Result<Profile> {
    if c >= r.m() {
        return Err(Error::OutOfRange { id: c, m: r.m() });
    }
    let mut qr = q.canonical_key();
    let mut first_rev = qr[0].clone();
    first_rev.reverse();
    if *qr.last().expect("profile has voters") != first_rev {
        qr.push(first_rev);
    }
    let mut rr = r.canonical_key();
    let n = rr.len().max(qr.len());
    while rr.len() < n {
        rr.push(rr.last().expect("voters").clone());
    }
    while qr.len() < n {
        qr.push(qr.last().expect("voters").clone());
    }
    let mut out: Vec<Vec<CandidateId>> = rr.iter().map(|a| splice(a, c, &qr[0], q.m())).collect();
    out.extend(qr[1..].iter().map(|b| splice(&rr[n - 1], c, b, q.m())));
    Profile::from_rankings(out)
}

/// A single-crossing profile whose clone structure is `f`.
pub fn implement_single_crossing(f: &SetFamily) -> Result<Profile> {
    let t = require_clone_structure(f)?;
    if voters_needed(&t) == 1 {
        return Ok(profile(vec![t.frontier()]));
    }
    let skeleton = |kind: NodeKind, k: usize| match kind {
        NodeKind::P if k >= 3 => slide(k).expect("k >= 3"),
        _ => implement_string(k).expect("k >= 2"),
    };
    Ok(build_labeled(&t, t.root(), &skeleton, &compose_single_crossing)?.relabel(t.m()))
}

/// A profile single-peaked on the tree's frontier whose clone structure is
/// the tree's family. Every Q-node may have internal children only at its
/// two ends.
pub fn implement_single_peaked_tree(t: &PqTree) -> Result<Profile> {
    for v in 0..t.node_count() {
        if t.kind(v) == NodeKind::Q {
            let ch = t.children(v);
            if let Some(&u) = ch[1..ch.len() - 1].iter().find(|&&u| !t.is_leaf(u)) {
                return Err(Error::Precondition(format!("Q-node has internal middle child over {}", t.leaf_set(u))));
            }
        }
    }
    let axis = t.frontier();
    if voters_needed(t) == 1 {
        return Ok(profile(vec![axis]));
    }
    let m = t.m();
    let mut pos = vec![0; m];
    for (i, &c) in axis.iter().enumerate() {
        pos[c] = i;
    }
    let parents = t.parents();

    let mut rankings: Vec<Vec<CandidateId>> = Vec::new();
    for v in 0..t.node_count() {
        let ch = t.children(v);
        let targets: Vec<usize> = match t.kind(v) {
            NodeKind::Leaf(_) => continue,
            NodeKind::P => ch.to_vec(),
            NodeKind::Q => vec![ch[0], ch[ch.len() - 1]],
        };
        let cv = t.frontier_at(v);
        let tail = ancestor_tail(t, &parents, v, &pos);
        for u in targets {
            let cu = t.frontier_at(u);
            let (lo, hi) = (pos[cu[0]], pos[cu[cu.len() - 1]]);
            let left: Vec<CandidateId> = cv.iter().rev().copied().filter(|&x| pos[x] < lo).collect();
            let right: Vec<CandidateId> = cv.iter().copied().filter(|&x| pos[x] > hi).collect();
            let rev_cu: Vec<CandidateId> = cu.iter().rev().copied().collect();
            for block in [&cu, &rev_cu] {
                for (first, second) in [(&left, &right), (&right, &left)] {
                    let mut r = block.to_vec();
                    r.extend(first.iter());
                    r.extend(second.iter());
                    r.extend(tail.iter());
                    rankings.push(r);
                }
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    rankings.retain(|r| seen.insert(r.clone()));
    Profile::from_rankings(rankings)
}

/// Candidates outside `C_v`, nearest ancestor level first; within a level,
/// the part left of the subtree (right to left) before the part right of it
/// (left to right).
fn ancestor_tail(t: &PqTree, parents: &[Option<usize>], v: usize, pos: &[usize]) -> Vec<CandidateId> {
    let mut out = Vec::new();
    let mut inner = t.frontier_at(v);
    let mut cur = v;
    while let Some(p) = parents[cur] {
        let cp = t.frontier_at(p);
        let (lo, hi) = (pos[inner[0]], pos[inner[inner.len() - 1]]);
        out.extend(cp.iter().rev().copied().filter(|&x| pos[x] < lo));
        out.extend(cp.iter().copied().filter(|&x| pos[x] > hi));
        inner = cp;
        cur = p;
    }
    out
}

/// A random PQ-tree over `m` leaves. Leaves are shuffled, then split into
/// random consecutive groups; nodes with three or more children are Q or P
/// with equal odds.
pub fn random_tree<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<PqTree> {
    if m == 0 {
        return Err(Error::Precondition("tree needs at least one leaf".into()));
    }
    fn grow<R: Rng + ?Sized>(items: &[CandidateId], rng: &mut R) -> Shape {
        if items.len() == 1 {
            return Shape::Leaf(items[0]);
        }
        let k = rng.gen_range(2..=items.len());
        let mut cuts: Vec<usize> = (1..items.len()).collect();
        cuts.shuffle(rng);
        let mut cuts = cuts[..k - 1].to_vec();
        cuts.sort_unstable();
        let mut children = Vec::with_capacity(k);
        let mut start = 0;
        for end in cuts.into_iter().chain([items.len()]) {
            children.push(grow(&items[start..end], rng));
            start = end;
        }
        if k >= 3 && rng.gen_bool(0.5) {
            Shape::Q(children)
        } else {
            Shape::P(children)
        }
    }
    let mut leaves: Vec<CandidateId> = (0..m).collect();
    leaves.shuffle(rng);
    PqTree::from_shape(&grow(&leaves, rng).canonical())
}

/// A uniformly random order consistent with the tree: P-node children are
/// shuffled and each Q-node is reversed with probability one half.
pub fn random_frontier<R: Rng + ?Sized>(t: &PqTree, rng: &mut R) -> LinearOrder {
    fn walk<R: Rng + ?Sized>(t: &PqTree, v: usize, rng: &mut R, out: &mut Vec<CandidateId>) {
        let mut ch = t.children(v).to_vec();
        match t.kind(v) {
            NodeKind::Leaf(c) => return out.push(c),
            NodeKind::P => ch.shuffle(rng),
            NodeKind::Q => {
                if rng.gen_bool(0.5) {
                    ch.reverse();
                }
            }
        }
        for u in ch {
            walk(t, u, rng, out);
        }
    }
    let mut out = Vec::with_capacity(t.m());
    walk(t, t.root(), rng, &mut out);
    LinearOrder::new(out).expect("frontier is a permutation")
}
