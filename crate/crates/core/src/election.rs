//! Candidates, rankings and profiles, plus decloning.
//!
//! Text format:
//!
//! ```text
//! # comment
//! 4 3
//! names: a,b,c,d
//! a,b,c,d
//! b,d,c,a
//! a,b,d,c
//! ```
//!
//! The `names:` line is optional; without it the orders list indices.
//! A JSON mirror `{"m": 4, "names": [...], "orders": [[0,1,2,3], ...]}` is
//! accepted wherever the text format is.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::CandidateSet;

/// Dense index into an election's candidate table.
pub type CandidateId = usize;

/// A strict ranking, most preferred first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<CandidateId>", into = "Vec<CandidateId>")]
pub struct LinearOrder(Vec<CandidateId>);

impl LinearOrder {
    /// Accepts `ranking` if it is a permutation of `0..ranking.len()`.
    pub fn new(ranking: Vec<CandidateId>) -> Result<Self> {
        let m = ranking.len();
        let mut seen = vec![false; m];
        for &c in &ranking {
            if c >= m {
                return Err(Error::InvalidOrder(format!("candidate {c} out of range (m = {m})")));
            }
            if seen[c] {
                return Err(Error::InvalidOrder(format!("candidate {c} repeated")));
            }
            seen[c] = true;
        }
        Ok(LinearOrder(ranking))
    }

    pub fn identity(m: usize) -> Self {
        LinearOrder((0..m).collect())
    }

    pub fn ranking(&self) -> &[CandidateId] {
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

    pub fn top(&self) -> CandidateId {
        self.0[0]
    }

    /// `pos[c]` is the rank of candidate `c` (0 = most preferred).
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (i, &c) in self.0.iter().enumerate() {
            pos[c] = i;
        }
        pos
    }

    pub fn reversed(&self) -> LinearOrder {
        let mut v = self.0.clone();
        v.reverse();
        LinearOrder(v)
    }
}

impl TryFrom<Vec<CandidateId>> for LinearOrder {
    type Error = Error;
    fn try_from(v: Vec<CandidateId>) -> Result<Self> {
        LinearOrder::new(v)
    }
}

impl From<LinearOrder> for Vec<CandidateId> {
    fn from(o: LinearOrder) -> Self {
        o.0
    }
}

pub fn reverse_order(r: &LinearOrder) -> LinearOrder {
    r.reversed()
}

/// A non-empty sequence of strict rankings over candidates `0..m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Profile {
    m: usize,
    names: Option<Vec<String>>,
    orders: Vec<LinearOrder>,
}

#[derive(Serialize, Deserialize)]
struct ProfileJson {
    m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
    orders: Vec<Vec<CandidateId>>,
}

impl Profile {
    pub fn new(m: usize, orders: Vec<LinearOrder>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidProfile("no candidates".into()));
        }
        if orders.is_empty() {
            return Err(Error::InvalidProfile("no voters".into()));
        }
        for (i, o) in orders.iter().enumerate() {
            if o.len() != m {
                return Err(Error::InvalidProfile(format!("order {} has length {}, expected {m}", i + 1, o.len())));
            }
        }
        Ok(Profile { m, names: None, orders })
    }

    /// Builds a profile from raw rankings; `m` is taken from the first.
    pub fn from_rankings(rankings: Vec<Vec<CandidateId>>) -> Result<Self> {
        let m = rankings.first().map_or(0, Vec::len);
        let orders = rankings.into_iter().map(LinearOrder::new).collect::<Result<Vec<_>>>()?;
        Profile::new(m, orders)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        validate_names(&names, self.m).map_err(Error::InvalidProfile)?;
        self.names = Some(names);
        Ok(self)
    }

    pub fn without_names(mut self) -> Self {
        self.names = None;
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[LinearOrder] {
        &self.orders
    }

    pub fn order(&self, voter: usize) -> &LinearOrder {
        &self.orders[voter]
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Display name of candidate `c`; its index when the profile is unnamed.
    pub fn name(&self, c: CandidateId) -> String {
        match &self.names {
            Some(n) => n[c].clone(),
            None => c.to_string(),
        }
    }

    pub fn display_set(&self, s: &CandidateSet) -> String {
        s.display_with(|c| self.name(c))
    }

    /// `positions()[v][c]` is the rank of `c` in voter `v`'s order.
    pub fn positions(&self) -> Vec<Vec<usize>> {
        self.orders.iter().map(LinearOrder::positions).collect()
    }

    /// Rankings without display names; used as a memoization key.
    pub fn canonical_key(&self) -> Vec<Vec<CandidateId>> {
        self.orders.iter().map(|o| o.ranking().to_vec()).collect()
    }

    /// Rankings relabeled so that voter 0 ranks `0, 1, 2, ...`; equal for
    /// profiles that differ only by renaming candidates.
    pub fn relabeled_key(&self) -> Vec<Vec<CandidateId>> {
        let pos = self.orders[0].positions();
        self.orders.iter().map(|o| o.ranking().iter().map(|&c| pos[c]).collect()).collect()
    }

    /// Returns the profile with `orders` replaced, keeping names.
    pub fn with_orders(&self, orders: Vec<LinearOrder>) -> Result<Self> {
        let p = Profile::new(self.m, orders)?;
        Ok(Profile { names: self.names.clone(), ..p })
    }

    /// Parses the text format or, if the input starts with `{`, the JSON
    /// mirror.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            return Profile::from_json(text);
        }
        parse_text(text)
    }

    /// Serializes to the text format: LF endings, no trailing whitespace.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.m, self.n());
        if let Some(names) = &self.names {
            let _ = writeln!(out, "names: {}", names.join(","));
        }
        for o in &self.orders {
            let row: Vec<String> = o.ranking().iter().map(|&c| self.name(c)).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ProfileJson { m: self.m, names: self.names.clone(), orders: self.canonical_key() })
            .expect("profile serializes")
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: ProfileJson = serde_json::from_str(text)?;
        let orders = j.orders.into_iter().map(LinearOrder::new).collect::<Result<Vec<_>>>()?;
        let p = Profile::new(j.m, orders)?;
        match j.names {
            Some(n) => p.with_names(n),
            None => Ok(p),
        }
    }

    /// Appends voters, keeping names.
    pub fn extended(&self, more: impl IntoIterator<Item = LinearOrder>) -> Result<Self> {
        let mut orders = self.orders.clone();
        orders.extend(more);
        self.with_orders(orders)
    }
}

fn validate_names(names: &[String], m: usize) -> std::result::Result<(), String> {
    if names.len() != m {
        return Err(format!("expected {m} names, got {}", names.len()));
    }
    let mut seen = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() || n.contains(',') || n.contains('#') || n.trim() != n {
            return Err(format!("invalid candidate name {n:?}"));
        }
        if let Some(j) = seen.insert(n.as_str(), i) {
            return Err(format!("duplicate candidate name {n:?} (positions {} and {})", j + 1, i + 1));
        }
    }
    Ok(())
}

fn parse_text(text: &str) -> Result<Profile> {
    // (physical line number, content without comment)
    let lines: Vec<(usize, &str)> =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim())).filter(|(_, l)| !l.is_empty()).collect();
    let mut it = lines.into_iter().peekable();

    let (hline, header) = it.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let bad_header = || Error::Parse { line: hline, msg: format!("malformed header {header:?}, expected `m n`") };
    if fields.len() != 2 {
        return Err(bad_header());
    }
    let m: usize = fields[0].parse().map_err(|_| bad_header())?;
    let n: usize = fields[1].parse().map_err(|_| bad_header())?;
    if m == 0 || n == 0 {
        return Err(Error::Parse { line: hline, msg: "m and n must be positive".into() });
    }

    let mut names = None;
    if let Some(&(line, l)) = it.peek() {
        if let Some(rest) = l.strip_prefix("names:") {
            let v: Vec<String> = rest.split(',').map(|s| s.trim().to_string()).collect();
            validate_names(&v, m).map_err(|msg| Error::Parse { line, msg })?;
            names = Some(v);
            it.next();
        }
    }
    let lookup: HashMap<&str, CandidateId> =
        names.as_ref().map(|v: &Vec<String>| v.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect()).unwrap_or_default();

    let mut orders = Vec::with_capacity(n);
    for k in 0..n {
        let (line, l) = it.next().ok_or(Error::Parse { line: text.lines().count() + 1, msg: format!("expected {n} orders, found {k}") })?;
        let tokens: Vec<&str> = l.split(',').map(str::trim).collect();
        if tokens.len() != m {
            return Err(Error::Parse { line, msg: format!("order {} has {} candidates, expected {m}", k + 1, tokens.len()) });
        }
        let mut seen = vec![false; m];
        let mut ranking = Vec::with_capacity(m);
        for tok in tokens {
            let c = match lookup.get(tok) {
                Some(&c) => c,
                None => match tok.parse::<usize>() {
                    Ok(c) if c < m => c,
                    _ => return Err(Error::Parse { line, msg: format!("order {}: unknown candidate {tok:?}", k + 1) }),
                },
            };
            if seen[c] {
                return Err(Error::Parse { line, msg: format!("order {}: duplicate candidate {tok:?}", k + 1) });
            }
            seen[c] = true;
            ranking.push(c);
        }
        orders.push(LinearOrder(ranking));
    }
    if let Some((line, _)) = it.next() {
        return Err(Error::Parse { line, msg: format!("more than {n} orders") });
    }
    let p = Profile::new(m, orders)?;
    Ok(Profile { names, ..p })
}

pub fn parse_profile(text: &str) -> Result<Profile> {
    Profile::parse(text)
}

/// Candidates ranked first by at least one voter.
pub fn peaks(p: &Profile) -> CandidateSet {
    p.orders().iter().map(LinearOrder::top).collect()
}

/// A decloned profile with the bookkeeping that links it to the original.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecloneResult {
    pub profile: Profile,
    /// Collapsed sets (original ids) and the fresh candidate each became.
    pub mapping: Vec<(CandidateSet, CandidateId)>,
    /// Original id of each surviving candidate mapped to its new id.
    pub survivors: BTreeMap<CandidateId, CandidateId>,
}

impl DecloneResult {
    pub fn identity(p: &Profile) -> Self {
        DecloneResult { profile: p.clone(), mapping: Vec::new(), survivors: (0..p.m()).map(|c| (c, c)).collect() }
    }

    pub fn candidate_count(&self) -> usize {
        self.profile.m()
    }

    /// The collapsed sets, in the order they were given.
    pub fn collapsed(&self) -> Vec<CandidateSet> {
        self.mapping.iter().map(|(s, _)| s.clone()).collect()
    }

    /// For each new candidate, the set of original candidates it stands for.
    pub fn preimages(&self) -> Vec<CandidateSet> {
        let mut out = vec![CandidateSet::empty(); self.profile.m()];
        for (&orig, &new) in &self.survivors {
            out[new] = CandidateSet::singleton(orig);
        }
        for (s, new) in &self.mapping {
            out[*new] = s.clone();
        }
        out
    }

    pub fn to_json_value(&self, original: &Profile) -> serde_json::Value {
        serde_json::json!({
            "candidates": self.profile.m(),
            "profile": self.profile.to_json_value(),
            "mapping": self.mapping.iter().map(|(s, c)| serde_json::json!({
                "set": s.members(),
                "names": s.iter().map(|x| original.name(x)).collect::<Vec<_>>(),
                "fresh": c,
            })).collect::<Vec<_>>(),
            "survivors": self.survivors.iter().map(|(o, n)| vec![*o, *n]).collect::<Vec<_>>(),
        })
    }
}

/// Replaces each set's contiguous block by a single fresh candidate, in one
/// pass. Survivors keep their relative numbering; fresh candidates are
/// appended in the order the sets are given.
pub fn declone(p: &Profile, sets: &[CandidateSet]) -> Result<DecloneResult> {
    let m = p.m();
    let mut owner: Vec<Option<usize>> = vec![None; m];
    for (k, s) in sets.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::InvalidSet("cannot declone the empty set".into()));
        }
        for c in s.iter() {
            if c >= m {
                return Err(Error::OutOfRange { id: c, m });
            }
            if let Some(j) = owner[c] {
                return Err(Error::Overlapping(p.display_set(&sets[j]), p.display_set(s)));
            }
            owner[c] = Some(k);
        }
    }
    for s in sets {
        if !crate::clones::is_contiguous_everywhere(p, s) {
            return Err(Error::NotClone(p.display_set(s)));
        }
    }

    let mut survivors = BTreeMap::new();
    let mut new_id = vec![0; m];
    let mut next = 0;
    for c in 0..m {
        if owner[c].is_none() {
            survivors.insert(c, next);
            new_id[c] = next;
            next += 1;
        }
    }
    let mapping: Vec<(CandidateSet, CandidateId)> = sets.iter().enumerate().map(|(k, s)| (s.clone(), next + k)).collect();
    let new_m = next + sets.len();

    let orders = p
        .orders()
        .iter()
        .map(|o| {
            let mut r = Vec::with_capacity(new_m);
            let mut emitted = vec![false; sets.len()];
            for &c in o.ranking() {
                match owner[c] {
                    None => r.push(new_id[c]),
                    Some(k) if !emitted[k] => {
                        emitted[k] = true;
                        r.push(next + k);
                    }
                    Some(_) => {}
                }
            }
            LinearOrder(r)
        })
        .collect();
    let mut profile = Profile::new(new_m, orders)?;
    if let Some(names) = p.names() {
        let mut nn: Vec<String> = survivors.keys().map(|&c| names[c].clone()).collect();
        for s in sets {
            let joined: Vec<&str> = s.iter().map(|c| names[c].as_str()).collect();
            nn.push(joined.join("+"));
        }
        // Joined names can collide with existing ones; fall back to indices.
        profile = match profile.clone().with_names(nn) {
            Ok(named) => named,
            Err(_) => profile,
        };
    }
    Ok(DecloneResult { profile, mapping, survivors })
}
