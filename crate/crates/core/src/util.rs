//! Small combinatorial helpers shared by the brute-force oracles and the
//! generators.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::election::{LinearOrder, Profile};

/// Advances `v` to the next permutation in lexicographic order. Returns
/// false (leaving `v` sorted ascending) after the last one.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Calls `f` on every permutation of `0..n` in lexicographic order until it
/// returns true; returns that permutation.
pub fn find_permutation(n: usize, mut f: impl FnMut(&[usize]) -> bool) -> Option<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if f(&perm) {
            return Some(perm);
        }
        if !next_permutation(&mut perm) {
            return None;
        }
    }
}

/// `n` independent uniformly random orders over `m` candidates.
pub fn random_profile<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Profile {
    let orders = (0..n)
        .map(|_| {
            let mut r: Vec<usize> = (0..m).collect();
            r.shuffle(rng);
            LinearOrder::new(r).expect("shuffled identity is a permutation")
        })
        .collect();
    Profile::new(m, orders).expect("m, n positive")
}
