//! Candidate sets and set families.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::election::CandidateId;
use crate::error::{Error, Result};

/// A sorted, duplicate-free set of candidate ids.
///
/// Sets are ordered by size first and lexicographically second, which is
/// the canonical order used inside a [`SetFamily`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CandidateSet(Vec<CandidateId>);

impl CandidateSet {
    pub fn new<I: IntoIterator<Item = CandidateId>>(members: I) -> Self {
        let mut v: Vec<CandidateId> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        CandidateSet(v)
    }

    pub fn empty() -> Self {
        CandidateSet(Vec::new())
    }

    pub fn singleton(c: CandidateId) -> Self {
        CandidateSet(vec![c])
    }

    /// The set {lo, lo+1, ..., hi-1}.
    pub fn range(lo: CandidateId, hi: CandidateId) -> Self {
        CandidateSet((lo..hi).collect())
    }

    pub fn members(&self) -> &[CandidateId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<CandidateId> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> Option<CandidateId> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<CandidateId> {
        self.0.last().copied()
    }

    pub fn contains(&self, c: CandidateId) -> bool {
        self.0.binary_search(&c).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = CandidateId> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &CandidateSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() {
            if j == other.0.len() {
                return false;
            }
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => return false,
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                Ordering::Greater => j += 1,
            }
        }
        true
    }

    pub fn is_proper_subset(&self, other: &CandidateSet) -> bool {
        self.len() < other.len() && self.is_subset(other)
    }

    pub fn intersects(&self, other: &CandidateSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn union(&self, other: &CandidateSet) -> CandidateSet {
        let mut v = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            if j == other.0.len() || (i < self.0.len() && self.0[i] < other.0[j]) {
                v.push(self.0[i]);
                i += 1;
            } else if i == self.0.len() || other.0[j] < self.0[i] {
                v.push(other.0[j]);
                j += 1;
            } else {
                v.push(self.0[i]);
                i += 1;
                j += 1;
            }
        }
        CandidateSet(v)
    }

    pub fn intersection(&self, other: &CandidateSet) -> CandidateSet {
        CandidateSet(self.iter().filter(|&c| other.contains(c)).collect())
    }

    pub fn difference(&self, other: &CandidateSet) -> CandidateSet {
        CandidateSet(self.iter().filter(|&c| !other.contains(c)).collect())
    }

    /// Nontrivial intersection: the sets share a member and each has a
    /// member the other lacks.
    pub fn bowtie(&self, other: &CandidateSet) -> bool {
        self.intersects(other) && !self.is_subset(other) && !other.is_subset(self)
    }

    /// Renders the set using display names, e.g. `{a,b}`.
    pub fn display_with(&self, name: impl Fn(CandidateId) -> String) -> String {
        let parts: Vec<String> = self.iter().map(name).collect();
        format!("{{{}}}", parts.join(","))
    }
}

impl Ord for CandidateSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for CandidateSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CandidateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(|c| c.to_string()))
    }
}

impl FromIterator<CandidateId> for CandidateSet {
    fn from_iter<I: IntoIterator<Item = CandidateId>>(iter: I) -> Self {
        CandidateSet::new(iter)
    }
}

impl From<Vec<CandidateId>> for CandidateSet {
    fn from(v: Vec<CandidateId>) -> Self {
        CandidateSet::new(v)
    }
}

impl<const N: usize> From<[CandidateId; N]> for CandidateSet {
    fn from(v: [CandidateId; N]) -> Self {
        CandidateSet::new(v)
    }
}

/// A family of candidate sets over the ground set `0..m`, stored in
/// canonical order (size, then lexicographic) without duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetFamily {
    m: usize,
    sets: Vec<CandidateSet>,
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    m: usize,
    sets: Vec<Vec<CandidateId>>,
}

impl SetFamily {
    /// Builds a family, canonicalizing order and dropping duplicates.
    /// The empty set is accepted so that axiom checks can report it.
    pub fn new(m: usize, sets: impl IntoIterator<Item = CandidateSet>) -> Result<Self> {
        let mut sets: Vec<CandidateSet> = sets.into_iter().collect();
        for s in &sets {
            if let Some(mx) = s.max() {
                if mx >= m {
                    return Err(Error::OutOfRange { id: mx, m });
                }
            }
        }
        sets.sort();
        sets.dedup();
        Ok(SetFamily { m, sets })
    }

    pub fn ground_size(&self) -> usize {
        self.m
    }

    pub fn ground(&self) -> CandidateSet {
        CandidateSet::range(0, self.m)
    }

    pub fn sets(&self) -> &[CandidateSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, x: &CandidateSet) -> bool {
        self.sets.binary_search(x).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CandidateSet> {
        self.sets.iter()
    }

    /// All intervals `[i, j]` of `0..m`: the string of sausages.
    pub fn string(m: usize) -> Self {
        let mut sets = Vec::new();
        for i in 0..m {
            for j in i + 1..=m {
                sets.push(CandidateSet::range(i, j));
            }
        }
        SetFamily::new(m, sets).expect("intervals are in range")
    }

    /// Singletons plus the ground set: the fat sausage.
    pub fn fat(m: usize) -> Self {
        let mut sets: Vec<CandidateSet> = (0..m).map(CandidateSet::singleton).collect();
        sets.push(CandidateSet::range(0, m));
        SetFamily::new(m, sets).expect("singletons are in range")
    }

    /// Every non-empty subset of `0..m`.
    pub fn powerset(m: usize) -> Self {
        assert!(m < 20, "powerset family too large");
        let sets = (1u32..(1 << m)).map(|mask| (0..m).filter(|&i| mask >> i & 1 == 1).collect());
        SetFamily::new(m, sets).expect("subsets are in range")
    }

    /// All arcs of the cycle 0,1,...,m-1,0 plus the ground set: the ring
    /// of sausages.
    pub fn ring(m: usize) -> Self {
        let mut sets = vec![CandidateSet::range(0, m)];
        for start in 0..m {
            for len in 1..m {
                sets.push((0..len).map(|d| (start + d) % m).collect());
            }
        }
        SetFamily::new(m, sets).expect("arcs are in range")
    }

    /// The sets contained in `support`.
    pub fn restrict(&self, support: &CandidateSet) -> Vec<CandidateSet> {
        self.sets.iter().filter(|s| s.is_subset(support)).cloned().collect()
    }

    pub fn to_json(&self) -> String {
        let j = FamilyJson { m: self.m, sets: self.sets.iter().map(|s| s.members().to_vec()).collect() };
        serde_json::to_string(&j).expect("family serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "m": self.m,
            "sets": self.sets.iter().map(|s| s.members().to_vec()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: FamilyJson = serde_json::from_str(text)?;
        SetFamily::new(j.m, j.sets.into_iter().map(CandidateSet::new))
    }
}

impl<'a> IntoIterator for &'a SetFamily {
    type Item = &'a CandidateSet;
    type IntoIter = std::slice::Iter<'a, CandidateSet>;
    fn into_iter(self) -> Self::IntoIter {
        self.sets.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = CandidateSet::from([1, 2, 3]);
        let b = CandidateSet::from([3, 4]);
        assert_eq!(a.union(&b), CandidateSet::from([1, 2, 3, 4]));
        assert_eq!(a.intersection(&b), CandidateSet::from([3]));
        assert_eq!(a.difference(&b), CandidateSet::from([1, 2]));
        assert!(a.bowtie(&b));
        assert!(!a.bowtie(&CandidateSet::from([1, 2])));
        assert!(!a.bowtie(&CandidateSet::from([5])));
        assert!(CandidateSet::from([1, 3]).is_subset(&a));
        assert!(!CandidateSet::from([0, 3]).is_subset(&a));
    }

    #[test]
    fn canonical_order_is_size_then_lex() {
        let f = SetFamily::new(
            4,
            vec![
                CandidateSet::from([0, 1, 2, 3]),
                CandidateSet::from([2, 3]),
                CandidateSet::from([1]),
                CandidateSet::from([0, 3]),
                CandidateSet::from([1]),
            ],
        )
        .unwrap();
        let got: Vec<Vec<usize>> = f.iter().map(|s| s.members().to_vec()).collect();
        assert_eq!(got, vec![vec![1], vec![0, 3], vec![2, 3], vec![0, 1, 2, 3]]);
    }

    #[test]
    fn out_of_range_member_rejected() {
        assert!(SetFamily::new(2, vec![CandidateSet::from([2])]).is_err());
    }

    #[test]
    fn named_families_have_expected_sizes() {
        assert_eq!(SetFamily::string(4).len(), 10);
        assert_eq!(SetFamily::fat(4).len(), 5);
        assert_eq!(SetFamily::powerset(4).len(), 15);
        // 4 starts × 3 lengths + ground
        assert_eq!(SetFamily::ring(4).len(), 13);
        assert_eq!(SetFamily::ring(3), SetFamily::powerset(3));
    }

    #[test]
    fn json_roundtrip() {
        let f = SetFamily::string(3);
        let back = SetFamily::from_json(&f.to_json()).unwrap();
        assert_eq!(f, back);
        assert_eq!(f.to_json(), r#"{"m":3,"sets":[[0],[1],[2],[0,1],[1,2],[0,1,2]]}"#);
    }
}
