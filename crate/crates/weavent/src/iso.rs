//! Isomorphism search for event structures and finite posets.

use crate::domain::FiniteDomain;
use crate::es::{bit, members, Conflict, EventSet, EventStructure};

/// Backtracking search for a bijection `0..n → 0..n`.
/// `candidates[a]` lists admissible images of `a`; `compatible(map, a, x)` checks
/// assigning `a ↦ x` against the already assigned prefix; `complete` checks the full map.
pub fn search_bijection(
    candidates: &[Vec<usize>],
    compatible: impl Fn(&[usize], usize, usize) -> bool,
    complete: impl Fn(&[usize]) -> bool,
) -> Option<Vec<usize>> {
    let n = candidates.len();
    let mut map = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn go(
        k: usize,
        cands: &[Vec<usize>],
        map: &mut Vec<usize>,
        used: &mut [bool],
        compatible: &dyn Fn(&[usize], usize, usize) -> bool,
        complete: &dyn Fn(&[usize]) -> bool,
    ) -> bool {
        if k == cands.len() {
            return complete(map);
        }
        for &x in &cands[k] {
            if used[x] || !compatible(map, k, x) {
                continue;
            }
            used[x] = true;
            map.push(x);
            if go(k + 1, cands, map, used, compatible, complete) {
                return true;
            }
            map.pop();
            used[x] = false;
        }
        false
    }
    if go(0, candidates, &mut map, &mut used, &compatible, &complete) {
        Some(map)
    } else {
        None
    }
}

fn map_set(f: &[usize], s: EventSet) -> EventSet {
    members(s).fold(0, |acc, e| acc | bit(f[e]))
}

fn es_signature(es: &EventStructure, e: usize) -> (usize, Vec<u32>) {
    let deg = match es.conflict() {
        Conflict::Binary(m) => m[e].count_ones() as usize,
        Conflict::Consistency(max) => max.iter().filter(|&&s| s & bit(e) != 0).count(),
    };
    let mut sizes: Vec<u32> = es.minimal_enablings(e).iter().map(|s| s.count_ones()).collect();
    sizes.sort();
    (deg, sizes)
}

/// Bijection `f` (indexed by events of `a`) such that conflict (or consistency) and
/// the minimal enablings correspond exactly; `related(x, y, fx, fy)` may add a pairwise constraint.
pub fn es_isomorphism_with(
    a: &EventStructure,
    b: &EventStructure,
    related: impl Fn(usize, usize, usize, usize) -> bool,
) -> Option<Vec<usize>> {
    if a.len() != b.len() || a.is_binary() != b.is_binary() {
        return None;
    }
    let n = a.len();
    let sig_a: Vec<_> = (0..n).map(|e| es_signature(a, e)).collect();
    let sig_b: Vec<_> = (0..n).map(|e| es_signature(b, e)).collect();
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|e| (0..n).filter(|&x| sig_a[e] == sig_b[x]).collect())
        .collect();
    let mins_a: Vec<Vec<EventSet>> = (0..n).map(|e| a.minimal_enablings(e)).collect();
    let mins_b: Vec<Vec<EventSet>> = (0..n).map(|e| b.minimal_enablings(e)).collect();
    search_bijection(
        &candidates,
        |map, k, x| {
            (0..k).all(|j| {
                related(j, k, map[j], x)
                    && related(k, j, x, map[j])
                    && (!a.is_binary() || a.in_conflict(j, k) == b.in_conflict(map[j], x))
            })
        },
        |map| {
            if let (Conflict::Consistency(ma), Conflict::Consistency(mb)) = (a.conflict(), b.conflict()) {
                let mut img: Vec<EventSet> = ma.iter().map(|&s| map_set(map, s)).collect();
                img.sort();
                let mut other = mb.clone();
                other.sort();
                if img != other {
                    return false;
                }
            }
            (0..n).all(|e| {
                let mut img: Vec<EventSet> = mins_a[e].iter().map(|&s| map_set(map, s)).collect();
                img.sort();
                let mut other = mins_b[map[e]].clone();
                other.sort();
                img == other
            })
        },
    )
}

pub fn es_isomorphism(a: &EventStructure, b: &EventStructure) -> Option<Vec<usize>> {
    es_isomorphism_with(a, b, |_, _, _, _| true)
}

pub fn es_isomorphic(a: &EventStructure, b: &EventStructure) -> bool {
    es_isomorphism(a, b).is_some()
}

/// Order isomorphism between finite posets.
pub fn poset_isomorphism(a: &FiniteDomain, b: &FiniteDomain) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let n = a.len();
    let sig = |d: &FiniteDomain, x: usize| {
        (
            (0..n).filter(|&y| d.leq(y, x)).count(),
            (0..n).filter(|&y| d.leq(x, y)).count(),
            d.lower_covers(x).len(),
            d.upper_covers(x).len(),
        )
    };
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|x| (0..n).filter(|&y| sig(a, x) == sig(b, y)).collect())
        .collect();
    search_bijection(
        &candidates,
        |map, k, y| (0..k).all(|j| a.leq(j, k) == b.leq(map[j], y) && a.leq(k, j) == b.leq(y, map[j])),
        |_| true,
    )
}

pub fn poset_isomorphic(a: &FiniteDomain, b: &FiniteDomain) -> bool {
    poset_isomorphism(a, b).is_some()
}
