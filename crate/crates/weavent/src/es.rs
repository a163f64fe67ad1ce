//! Finite event structures with generator-based enabling.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

/// A set of events as a bitmask over event indices.
pub type EventSet = u64;

pub const MAX_EVENTS: usize = 64;

pub fn bit(i: usize) -> EventSet {
    1u64 << i
}

pub fn members(set: EventSet) -> impl Iterator<Item = usize> {
    let mut rest = set;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        }
    })
}

pub fn is_subset(a: EventSet, b: EventSet) -> bool {
    a & !b == 0
}

/// How incompatibility between events is expressed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conflict {
    /// Per-event mask of the events it conflicts with.
    Binary(Vec<EventSet>),
    /// The maximal consistent sets; consistency is downward closure.
    Consistency(Vec<EventSet>),
}

/// An event structure `⟨E, ⊢, #⟩` or `⟨E, ⊢, Con⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventStructure {
    names: Vec<String>,
    conflict: Conflict,
    enabling: Vec<(EventSet, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Classification {
    pub live: bool,
    pub stable: bool,
    pub prime: bool,
    pub connected: bool,
}

impl EventStructure {
    /// Builds a binary-conflict structure from index data.
    pub fn from_binary(
        names: Vec<String>,
        conflicts: &[(usize, usize)],
        enabling: Vec<(EventSet, usize)>,
    ) -> Result<Self> {
        let n = names.len();
        check_names(&names)?;
        let mut masks = vec![0; n];
        for &(a, b) in conflicts {
            if a >= n || b >= n {
                return Err(Error::InvalidEs("conflict refers to a missing event".into()));
            }
            if a == b {
                return Err(Error::InvalidEs(format!(
                    "conflict must be irreflexive, got `{}`",
                    names[a]
                )));
            }
            masks[a] |= bit(b);
            masks[b] |= bit(a);
        }
        let es = EventStructure {
            names,
            conflict: Conflict::Binary(masks),
            enabling: normalize_enabling(enabling),
        };
        es.check_enabling()?;
        Ok(es)
    }

    /// Builds a consistency-predicate structure; `consistent` lists generating sets.
    pub fn from_consistency(
        names: Vec<String>,
        consistent: Vec<EventSet>,
        enabling: Vec<(EventSet, usize)>,
    ) -> Result<Self> {
        check_names(&names)?;
        let full = full_mask(names.len());
        let mut sets: Vec<EventSet> = consistent.into_iter().collect();
        if sets.iter().any(|s| !is_subset(*s, full)) {
            return Err(Error::InvalidEs("consistent set refers to a missing event".into()));
        }
        for i in 0..names.len() {
            sets.push(bit(i));
        }
        let es = EventStructure {
            names,
            conflict: Conflict::Consistency(maximal_sets(sets)),
            enabling: normalize_enabling(enabling),
        };
        es.check_enabling()?;
        Ok(es)
    }

    /// Convenience constructor by event names.
    pub fn binary(events: &[&str], conflicts: &[(&str, &str)], enabling: &[(&[&str], &str)]) -> Result<Self> {
        let names: Vec<String> = events.iter().map(|s| s.to_string()).collect();
        let idx = |s: &str| {
            names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::UnknownEvent(s.to_string()))
        };
        let mut cs = Vec::new();
        for (a, b) in conflicts {
            cs.push((idx(a)?, idx(b)?));
        }
        let mut gens = Vec::new();
        for (needs, e) in enabling {
            let mut set = 0;
            for s in needs.iter() {
                set |= bit(idx(s)?);
            }
            gens.push((set, idx(e)?));
        }
        Self::from_binary(names, &cs, gens)
    }

    fn check_enabling(&self) -> Result<()> {
        let full = full_mask(self.len());
        for &(set, e) in &self.enabling {
            if e >= self.len() || !is_subset(set, full) {
                return Err(Error::InvalidEs("enabling refers to a missing event".into()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, e: usize) -> &str {
        &self.names[e]
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownEvent(name.to_string()))
    }

    pub fn set_of(&self, names: &[&str]) -> Result<EventSet> {
        let mut s = 0;
        for n in names {
            s |= bit(self.index(n)?);
        }
        Ok(s)
    }

    pub fn all(&self) -> EventSet {
        full_mask(self.len())
    }

    pub fn conflict(&self) -> &Conflict {
        &self.conflict
    }

    pub fn is_binary(&self) -> bool {
        matches!(self.conflict, Conflict::Binary(_))
    }

    /// Enabling generators `(X, e)`, reduced to minimal sets per event.
    pub fn enabling(&self) -> &[(EventSet, usize)] {
        &self.enabling
    }

    pub fn in_conflict(&self, a: usize, b: usize) -> bool {
        match &self.conflict {
            Conflict::Binary(m) => m[a] & bit(b) != 0,
            Conflict::Consistency(_) => !self.is_consistent(bit(a) | bit(b)),
        }
    }

    /// Unordered conflict pairs `(a, b)` with `a < b`.
    pub fn conflict_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                if self.in_conflict(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_consistent(&self, set: EventSet) -> bool {
        match &self.conflict {
            Conflict::Binary(m) => members(set).all(|e| m[e] & set == 0),
            Conflict::Consistency(max) => max.iter().any(|&m| is_subset(set, m)),
        }
    }

    pub fn enables(&self, set: EventSet, e: usize) -> bool {
        self.enabling
            .iter()
            .any(|&(g, t)| t == e && is_subset(g, set))
    }

    /// Least fixpoint: repeatedly add members enabled by what is already secured.
    pub fn is_secured(&self, set: EventSet) -> bool {
        let mut reached: EventSet = 0;
        loop {
            let mut grew = false;
            for e in members(set & !reached) {
                if self.enables(reached, e) {
                    reached |= bit(e);
                    grew = true;
                }
            }
            if !grew {
                return reached == set;
            }
        }
    }

    pub fn is_configuration(&self, set: EventSet) -> bool {
        is_subset(set, self.all()) && self.is_consistent(set) && self.is_secured(set)
    }

    /// All configurations, ordered by size and then by mask value.
    pub fn configurations(&self) -> Vec<EventSet> {
        let mut seen: BTreeSet<EventSet> = BTreeSet::new();
        let mut frontier = vec![0u64];
        seen.insert(0);
        while let Some(c) = frontier.pop() {
            for e in members(self.all() & !c) {
                let next = c | bit(e);
                if !seen.contains(&next) && self.enables(c, e) && self.is_consistent(next) {
                    seen.insert(next);
                    frontier.push(next);
                }
            }
        }
        let mut out: Vec<EventSet> = seen.into_iter().collect();
        out.sort_by_key(|s| (s.count_ones(), *s));
        out
    }

    /// Inclusion-minimal configurations enabling `e`.
    pub fn minimal_enablings(&self, e: usize) -> Vec<EventSet> {
        self.minimal_enablings_in(&self.configurations(), e)
    }

    pub fn minimal_enablings_in(&self, configs: &[EventSet], e: usize) -> Vec<EventSet> {
        let enabling: Vec<EventSet> = configs
            .iter()
            .copied()
            .filter(|&c| self.enables(c, e))
            .collect();
        enabling
            .iter()
            .copied()
            .filter(|&c| !enabling.iter().any(|&d| d != c && is_subset(d, c)))
            .collect()
    }

    pub fn classify(&self) -> Classification {
        let configs = self.configurations();
        let live = self.liveness_issues_in(&configs).is_empty();
        let mut stable = true;
        let mut prime = true;
        let mut connected = true;
        for e in 0..self.len() {
            let mins = self.minimal_enablings_in(&configs, e);
            if mins.len() > 1 {
                prime = false;
            }
            for (i, &x) in mins.iter().enumerate() {
                for &y in &mins[i + 1..] {
                    if self.is_consistent(x | y | bit(e)) && !self.enables(x & y, e) {
                        stable = false;
                    }
                }
            }
            if self.linked_components(&mins, e) > 1 {
                connected = false;
            }
        }
        Classification {
            live,
            stable,
            prime,
            connected,
        }
    }

    /// Number of components of the minimal enablings of `e` under pairwise consistency with `e`.
    pub fn linked_components(&self, mins: &[EventSet], e: usize) -> usize {
        let mut uf = UnionFind::new(mins.len());
        for i in 0..mins.len() {
            for j in i + 1..mins.len() {
                if self.is_consistent(mins[i] | mins[j] | bit(e)) {
                    uf.union(i, j);
                }
            }
        }
        uf.classes().1
    }

    /// Human readable reasons why the structure is not live; empty when live.
    pub fn liveness_issues(&self) -> Vec<String> {
        self.liveness_issues_in(&self.configurations())
    }

    fn liveness_issues_in(&self, configs: &[EventSet]) -> Vec<String> {
        let mut issues = Vec::new();
        let covered = configs.iter().fold(0, |acc, c| acc | c);
        for e in members(self.all() & !covered) {
            issues.push(format!("event `{}` occurs in no configuration", self.names[e]));
        }
        match &self.conflict {
            Conflict::Binary(_) => {
                for a in 0..self.len() {
                    for b in a + 1..self.len() {
                        let pair = bit(a) | bit(b);
                        let together = configs.iter().any(|&c| is_subset(pair, c));
                        if together == self.in_conflict(a, b) {
                            issues.push(format!(
                                "conflict between `{}` and `{}` is not saturated",
                                self.names[a], self.names[b]
                            ));
                        }
                    }
                }
            }
            Conflict::Consistency(max) => {
                for &m in max {
                    if !configs.iter().any(|&c| is_subset(m, c)) {
                        issues.push(format!(
                            "consistent set {} is contained in no configuration",
                            self.fmt_set(m)
                        ));
                    }
                }
            }
        }
        issues
    }

    /// Extends conflict to all pairs never found together in a configuration.
    pub fn saturate(&self) -> Result<EventStructure> {
        let configs = self.configurations();
        let covered = configs.iter().fold(0, |acc, c| acc | c);
        if let Some(e) = members(self.all() & !covered).next() {
            return Err(Error::NotLive(format!(
                "event `{}` occurs in no configuration",
                self.names[e]
            )));
        }
        let conflict = match &self.conflict {
            Conflict::Binary(_) => {
                let mut masks = vec![0; self.len()];
                for a in 0..self.len() {
                    for b in 0..self.len() {
                        let pair = bit(a) | bit(b);
                        if a != b && !configs.iter().any(|&c| is_subset(pair, c)) {
                            masks[a] |= bit(b);
                        }
                    }
                }
                Conflict::Binary(masks)
            }
            Conflict::Consistency(_) => Conflict::Consistency(maximal_sets(configs.clone())),
        };
        Ok(EventStructure {
            names: self.names.clone(),
            conflict,
            enabling: self.enabling.clone(),
        })
    }

    /// Renders a set as `{a,b}` with names sorted.
    pub fn fmt_set(&self, set: EventSet) -> String {
        let mut ns: Vec<&str> = members(set).map(|i| self.names[i].as_str()).collect();
        ns.sort();
        format!("{{{}}}", ns.join(","))
    }

    /// Renames events; `f` must be injective.
    pub fn renamed(&self, f: impl Fn(&str) -> String) -> Result<EventStructure> {
        let names: Vec<String> = self.names.iter().map(|n| f(n)).collect();
        check_names(&names)?;
        Ok(EventStructure {
            names,
            conflict: self.conflict.clone(),
            enabling: self.enabling.clone(),
        })
    }

    /// Reorders events by a permutation: new index `i` holds old event `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> EventStructure {
        let mut inv = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inv[old] = new;
        }
        let map = |s: EventSet| members(s).fold(0, |acc, e| acc | bit(inv[e]));
        let names = order.iter().map(|&o| self.names[o].clone()).collect();
        let conflict = match &self.conflict {
            Conflict::Binary(m) => Conflict::Binary(order.iter().map(|&o| map(m[o])).collect()),
            Conflict::Consistency(max) => Conflict::Consistency(maximal_sets(max.iter().map(|&s| map(s)).collect())),
        };
        let enabling = self.enabling.iter().map(|&(s, e)| (map(s), inv[e])).collect();
        EventStructure {
            names,
            conflict,
            enabling: normalize_enabling(enabling),
        }
    }
}

fn check_names(names: &[String]) -> Result<()> {
    if names.len() > MAX_EVENTS {
        return Err(Error::TooManyEvents(names.len()));
    }
    let mut seen = HashMap::new();
    for n in names {
        if n.is_empty() {
            return Err(Error::InvalidEs("event names must be nonempty".into()));
        }
        if seen.insert(n.as_str(), ()).is_some() {
            return Err(Error::DuplicateId(n.clone()));
        }
    }
    Ok(())
}

pub fn full_mask(n: usize) -> EventSet {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn normalize_enabling(gens: Vec<(EventSet, usize)>) -> Vec<(EventSet, usize)> {
    let mut by_event: BTreeMap<usize, Vec<EventSet>> = BTreeMap::new();
    for (s, e) in gens {
        by_event.entry(e).or_default().push(s);
    }
    let mut out = Vec::new();
    for (e, sets) in by_event {
        for s in minimal_sets(sets) {
            out.push((s, e));
        }
    }
    out
}

/// Keeps the inclusion-minimal sets, sorted and deduplicated.
fn minimal_sets(mut sets: Vec<EventSet>) -> Vec<EventSet> {
    sets.sort_by_key(|s| (s.count_ones(), *s));
    sets.dedup();
    let mut kept: Vec<EventSet> = Vec::new();
    for s in sets {
        if !kept.iter().any(|&k| is_subset(k, s)) {
            kept.push(s);
        }
    }
    kept
}

/// Keeps the inclusion-maximal sets, sorted and deduplicated.
pub fn maximal_sets(mut sets: Vec<EventSet>) -> Vec<EventSet> {
    sets.sort_by_key(|s| (std::cmp::Reverse(s.count_ones()), *s));
    sets.dedup();
    let mut kept: Vec<EventSet> = Vec::new();
    for s in sets {
        if !kept.iter().any(|&k| is_subset(s, k)) {
            kept.push(s);
        }
    }
    kept.sort();
    kept
}

/// Violation found while validating an event structure morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismViolation {
    pub condition: u8,
    pub witness: String,
}

/// Checks a partial map `f` (indexed by source event) against the morphism conditions.
pub fn validate_es_morphism(
    f: &[Option<usize>],
    src: &EventStructure,
    dst: &EventStructure,
) -> std::result::Result<(), MorphismViolation> {
    assert_eq!(f.len(), src.len(), "map must cover every source event");
    let image = |set: EventSet| -> EventSet {
        members(set).filter_map(|e| f[e]).fold(0, |acc, t| acc | bit(t))
    };
    let n = src.len();
    if src.is_binary() && dst.is_binary() {
        for a in 0..n {
            for b in 0..n {
                let (Some(fa), Some(fb)) = (f[a], f[b]) else { continue };
                if a != b && dst.in_conflict(fa, fb) && !src.in_conflict(a, b) {
                    return Err(MorphismViolation {
                        condition: 1,
                        witness: format!("{} and {}", src.name(a), src.name(b)),
                    });
                }
                if a < b && fa == fb && !src.in_conflict(a, b) {
                    return Err(MorphismViolation {
                        condition: 2,
                        witness: format!("{} and {}", src.name(a), src.name(b)),
                    });
                }
            }
        }
        for c in src.configurations() {
            for e in 0..n {
                let Some(fe) = f[e] else { continue };
                if src.enables(c, e) && !dst.enables(image(c), fe) {
                    return Err(MorphismViolation {
                        condition: 3,
                        witness: format!("{} enables {}", src.fmt_set(c), src.name(e)),
                    });
                }
            }
        }
    } else {
        let sets: Vec<EventSet> = match &src.conflict {
            Conflict::Binary(_) => src.configurations(),
            Conflict::Consistency(max) => max.clone(),
        };
        for s in sets {
            if !dst.is_consistent(image(s)) {
                return Err(MorphismViolation {
                    condition: 1,
                    witness: src.fmt_set(s),
                });
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                let (Some(fa), Some(fb)) = (f[a], f[b]) else { continue };
                if fa == fb && src.is_consistent(bit(a) | bit(b)) {
                    return Err(MorphismViolation {
                        condition: 2,
                        witness: format!("{} and {}", src.name(a), src.name(b)),
                    });
                }
            }
        }
        for &(g, e) in src.enabling() {
            let Some(fe) = f[e] else { continue };
            if src.is_consistent(g) && !dst.enables(image(g), fe) {
                return Err(MorphismViolation {
                    condition: 3,
                    witness: format!("{} enables {}", src.fmt_set(g), src.name(e)),
                });
            }
        }
    }
    Ok(())
}
