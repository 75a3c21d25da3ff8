//! Clone sets of a profile.

use crate::election::Profile;
use crate::error::{Error, Result};
use crate::set::{CandidateSet, SetFamily};

/// True iff the members of `x` are consecutive in every voter's order.
/// The empty set is reported as contiguous.
pub fn is_contiguous_everywhere(p: &Profile, x: &CandidateSet) -> bool {
    if x.len() <= 1 {
        return true;
    }
    let mut inside = vec![false; p.m()];
    for c in x.iter() {
        inside[c] = true;
    }
    p.orders().iter().all(|o| {
        let r = o.ranking();
        let first = r.iter().position(|&c| inside[c]).expect("non-empty set");
        r[first..first + x.len()].iter().all(|&c| inside[c])
    })
}

pub fn is_clone_set(p: &Profile, x: &CandidateSet) -> Result<bool> {
    if x.is_empty() {
        return Err(Error::InvalidSet("empty set".into()));
    }
    if let Some(mx) = x.max() {
        if mx >= p.m() {
            return Err(Error::OutOfRange { id: mx, m: p.m() });
        }
    }
    Ok(is_contiguous_everywhere(p, x))
}

/// All clone sets, found by scanning the intervals of voter 0's order and
/// tracking each voter's span incrementally. O(m²·n).
pub fn all_clone_sets(p: &Profile) -> SetFamily {
    let m = p.m();
    let pos = p.positions();
    let base = p.order(0).ranking();
    let mut sets = Vec::new();
    let mut lo = vec![0usize; p.n()];
    let mut hi = vec![0usize; p.n()];
    for i in 0..m {
        for (v, pv) in pos.iter().enumerate() {
            lo[v] = pv[base[i]];
            hi[v] = pv[base[i]];
        }
        for j in i..m {
            let c = base[j];
            let mut ok = true;
            for (v, pv) in pos.iter().enumerate() {
                lo[v] = lo[v].min(pv[c]);
                hi[v] = hi[v].max(pv[c]);
                ok &= hi[v] - lo[v] == j - i;
            }
            if ok {
                sets.push(CandidateSet::new(base[i..=j].iter().copied()));
            }
        }
    }
    SetFamily::new(m, sets).expect("members are candidates")
}

pub const BRUTE_FORCE_CLONE_LIMIT: usize = 16;

/// Exhaustive subset test; a reference implementation for small m.
pub fn brute_force_clone_sets(p: &Profile) -> Result<SetFamily> {
    let m = p.m();
    if m > BRUTE_FORCE_CLONE_LIMIT {
        return Err(Error::TooLarge(format!("brute-force clone detection needs m <= {BRUTE_FORCE_CLONE_LIMIT}, got {m}")));
    }
    let sets =
        (1u32..(1 << m)).map(|mask| CandidateSet::new((0..m).filter(|&c| mask >> c & 1 == 1))).filter(|s| is_contiguous_everywhere(p, s));
    SetFamily::new(m, sets)
}

/// Clone sets with at least two members and not equal to the ground set.
pub fn nontrivial_clone_sets(p: &Profile) -> Vec<CandidateSet> {
    all_clone_sets(p).iter().filter(|s| s.len() >= 2 && s.len() < p.m()).cloned().collect()
}
