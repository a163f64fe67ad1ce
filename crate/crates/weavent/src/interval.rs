//! Covering pairs of a domain, their equivalence and the event structure they induce.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::domain::{DomainKind, FiniteDomain};
use crate::error::{Error, Result};
use crate::es::{bit, EventSet, EventStructure};
use crate::unionfind::UnionFind;

/// A covering pair `lower ≺ upper`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub lower: usize,
    pub upper: usize,
}

/// All covering pairs of `d`, sorted by index.
pub fn intervals(d: &FiniteDomain) -> Vec<Interval> {
    let mut out: Vec<Interval> = d.covers().into_iter().map(|(lower, upper)| Interval { lower, upper }).collect();
    out.sort();
    out
}

/// `a` is a translation of `b` along `b.lower`: `a.lower = a.upper ⊓ b.lower` and `a.upper ⊔ b.lower = b.upper`.
pub fn interval_leq(d: &FiniteDomain, a: Interval, b: Interval) -> bool {
    d.meet2(a.upper, b.lower) == Some(a.lower) && d.join2(a.upper, b.lower) == Some(b.upper)
}

/// Covering pairs partitioned by the symmetric and transitive closure of [`interval_leq`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalClasses {
    pub intervals: Vec<Interval>,
    pub class: Vec<usize>,
    pub count: usize,
}

impl IntervalClasses {
    pub fn members(&self, c: usize) -> Vec<Interval> {
        self.intervals
            .iter()
            .zip(&self.class)
            .filter(|(_, &k)| k == c)
            .map(|(&i, _)| i)
            .collect()
    }

    pub fn class_of(&self, i: Interval) -> Option<usize> {
        self.intervals.iter().position(|&x| x == i).map(|p| self.class[p])
    }

    pub fn equivalent(&self, a: Interval, b: Interval) -> bool {
        matches!((self.class_of(a), self.class_of(b)), (Some(x), Some(y)) if x == y)
    }

    /// Display name of a class: its first interval as `[lower,upper]`.
    pub fn name(&self, d: &FiniteDomain, c: usize) -> String {
        let i = self.members(c)[0];
        format!("[{},{}]", d.name(i.lower), d.name(i.upper))
    }
}

pub fn interval_classes(d: &FiniteDomain) -> IntervalClasses {
    let ints = intervals(d);
    let mut uf = UnionFind::new(ints.len());
    for (x, &a) in ints.iter().enumerate() {
        for (y, &b) in ints.iter().enumerate() {
            if x != y && interval_leq(d, a, b) {
                uf.union(x, y);
            }
        }
    }
    let (class, count) = uf.classes();
    IntervalClasses { intervals: ints, class, count }
}

/// Outcome of each axiom on a finite poset, with a witness for each failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub f: bool,
    pub c: bool,
    pub r: bool,
    pub v: bool,
    pub i: bool,
    pub witnesses: BTreeMap<String, String>,
}

impl AxiomReport {
    /// F, C, R and V together.
    pub fn binary_ok(&self) -> bool {
        self.f && self.c && self.r && self.v
    }

    pub fn first_failure(&self) -> Option<&'static str> {
        [("F", self.f), ("C", self.c), ("R", self.r), ("V", self.v)]
            .into_iter()
            .find(|(_, ok)| !ok)
            .map(|(n, _)| n)
    }
}

pub fn check_axioms(d: &FiniteDomain) -> AxiomReport {
    let classes = interval_classes(d);
    let ints = &classes.intervals;
    let cls = &classes.class;
    let show = |i: Interval| format!("[{},{}]", d.name(i.lower), d.name(i.upper));
    let mut witnesses = BTreeMap::new();

    let mut c = true;
    'c: for x in 0..d.len() {
        let ups = d.upper_covers(x);
        for (k, &y) in ups.iter().enumerate() {
            for &z in &ups[k + 1..] {
                if !d.is_consistent(&[y, z]) {
                    continue;
                }
                let ok = d.join2(y, z).is_some_and(|j| d.is_cover(y, j) && d.is_cover(z, j));
                if !ok {
                    c = false;
                    witnesses.insert("C".into(), format!("{} ≺ {}, {}", d.name(x), d.name(y), d.name(z)));
                    break 'c;
                }
            }
        }
    }

    let mut r = true;
    'r: for (p, a) in ints.iter().enumerate() {
        for (q, b) in ints.iter().enumerate().skip(p + 1) {
            if a.lower == b.lower && cls[p] == cls[q] {
                r = false;
                witnesses.insert("R".into(), format!("{} ~ {}", show(*a), show(*b)));
                break 'r;
            }
        }
    }

    let mut v = true;
    'v: for (p1, a1) in ints.iter().enumerate() {
        for (p2, a2) in ints.iter().enumerate() {
            if a1.lower != a2.lower || !d.is_consistent(&[a1.upper, a2.upper]) {
                continue;
            }
            for (q1, b1) in ints.iter().enumerate() {
                if cls[q1] != cls[p1] {
                    continue;
                }
                for (q2, b2) in ints.iter().enumerate() {
                    if b2.lower == b1.lower && cls[q2] == cls[p2] && !d.is_consistent(&[b1.upper, b2.upper]) {
                        v = false;
                        witnesses.insert(
                            "V".into(),
                            format!("{}, {} consistent but {}, {} not", show(*a1), show(*a2), show(*b1), show(*b2)),
                        );
                        break 'v;
                    }
                }
            }
        }
    }

    let mut i = true;
    'i: for (p, a) in ints.iter().enumerate() {
        for (q, b) in ints.iter().enumerate() {
            if cls[p] == cls[q] && d.leq(a.lower, b.lower) && !d.leq(a.upper, b.upper) {
                i = false;
                witnesses.insert("I".into(), format!("{} ~ {}", show(*a), show(*b)));
                break 'i;
            }
        }
    }

    AxiomReport { f: true, c, r, v, i, witnesses }
}

/// Interval classes of intervals ending below `x`.
fn classes_below(d: &FiniteDomain, classes: &IntervalClasses, x: usize) -> EventSet {
    classes
        .intervals
        .iter()
        .zip(&classes.class)
        .filter(|(i, _)| d.leq(i.upper, x))
        .fold(0, |acc, (_, &c)| acc | bit(c))
}

/// Event structure whose events are interval classes.
///
/// Coherent domains give binary conflict; bounded complete ones give the
/// consistent sets generated by maximal elements.
pub fn ev_wd(d: &FiniteDomain) -> Result<EventStructure> {
    let report = check_axioms(d);
    if let Some(axiom) = report.first_failure() {
        let witness = report.witnesses.get(axiom).cloned().unwrap_or_default();
        return Err(Error::AxiomFails(format!("{axiom}: {witness}")));
    }
    let classes = interval_classes(d);
    if classes.count > crate::es::MAX_EVENTS {
        return Err(Error::TooManyEvents(classes.count));
    }
    let names: Vec<String> = (0..classes.count).map(|c| classes.name(d, c)).collect();
    let gens: Vec<(EventSet, usize)> = classes
        .intervals
        .iter()
        .zip(&classes.class)
        .map(|(i, &c)| (classes_below(d, &classes, i.lower), c))
        .collect();
    match d.kind() {
        DomainKind::Coherent => {
            let mut conflicts = Vec::new();
            for a in 0..classes.count {
                for b in a + 1..classes.count {
                    let (ma, mb) = (classes.members(a), classes.members(b));
                    let together = ma.iter().any(|x| mb.iter().any(|y| d.is_consistent(&[x.upper, y.upper])));
                    if !together {
                        conflicts.push((a, b));
                    }
                }
            }
            EventStructure::from_binary(names, &conflicts, gens)
        }
        DomainKind::BoundedComplete => {
            let sets = (0..d.len())
                .filter(|&x| d.upper_covers(x).is_empty())
                .map(|m| classes_below(d, &classes, m))
                .collect();
            EventStructure::from_consistency(names, sets, gens)
        }
    }
}

/// The correspondence between interval classes and interchange classes of irreducibles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalCorrespondence {
    pub intervals: IntervalClasses,
    pub irreducible_classes: Vec<Vec<usize>>,
    /// Interval class to interchange class.
    pub zeta: Vec<usize>,
    /// Interchange class to interval class.
    pub iota: Vec<usize>,
}

/// Maps each interval class to the class of the minimal irreducibles it adds and back,
/// checking both maps are well defined and mutually inverse.
pub fn zeta(d: &FiniteDomain) -> Result<IntervalCorrespondence> {
    if let Some(i) = d.weak_prime_failure() {
        return Err(Error::NotWeakPrime(d.name(i).to_string()));
    }
    let ints = interval_classes(d);
    let irr_classes = d.interchange_classes();
    let index: HashMap<usize, usize> = d.class_index();
    let show = |i: Interval| format!("[{},{}]", d.name(i.lower), d.name(i.upper));

    let mut zeta: Vec<Option<usize>> = vec![None; ints.count];
    for (&i, &c) in ints.intervals.iter().zip(&ints.class) {
        let added = d.diff(i.upper, i.lower)?;
        let minimal = added.iter().copied().filter(|&j| !added.iter().any(|&x| x != j && d.leq(x, j)));
        for j in minimal {
            let k = index[&j];
            match zeta[c] {
                None => zeta[c] = Some(k),
                Some(prev) if prev != k => {
                    return Err(Error::InvalidDomain(format!("interval class of {} adds irreducibles of two classes", show(i))));
                }
                _ => {}
            }
        }
    }
    let zeta: Vec<usize> = zeta
        .into_iter()
        .enumerate()
        .map(|(c, z)| z.ok_or_else(|| Error::InvalidDomain(format!("interval class {c} adds no irreducible"))))
        .collect::<Result<_>>()?;

    let mut iota = Vec::with_capacity(irr_classes.len());
    for members in &irr_classes {
        let mut target = None;
        for &i in members {
            let c = ints
                .class_of(Interval { lower: d.pred(i)?, upper: i })
                .expect("irreducible covers its predecessor");
            if target.is_some_and(|t| t != c) {
                return Err(Error::InvalidDomain(format!(
                    "interchange class of `{}` spans two interval classes",
                    d.name(i)
                )));
            }
            target = Some(c);
        }
        iota.push(target.expect("classes are nonempty"));
    }

    let inverse = zeta.len() == iota.len()
        && zeta.iter().enumerate().all(|(c, &k)| iota[k] == c)
        && iota.iter().enumerate().all(|(k, &c)| zeta[c] == k);
    if !inverse {
        return Err(Error::InvalidDomain("interval and interchange classes are not in bijection".into()));
    }
    Ok(IntervalCorrespondence { intervals: ints, irreducible_classes: irr_classes, zeta, iota })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> FiniteDomain {
        let names: Vec<String> = (0..=n).map(|i| format!("x{i}")).collect();
        let rel: Vec<(usize, usize)> = (0..n).map(|i| (i, i + 1)).collect();
        FiniteDomain::validated(names, &rel, DomainKind::Coherent).unwrap()
    }

    fn m3() -> FiniteDomain {
        FiniteDomain::from_names(
            &["bot", "a", "b", "c", "top"],
            &[("bot", "a"), ("bot", "b"), ("bot", "c"), ("a", "top"), ("b", "top"), ("c", "top")],
            DomainKind::Coherent,
        )
        .unwrap()
    }

    #[test]
    fn chain_intervals_are_distinct_classes() {
        let d = chain(4);
        let c = interval_classes(&d);
        assert_eq!(c.intervals.len(), 4);
        assert_eq!(c.count, 4);
        let r = check_axioms(&d);
        assert!(r.binary_ok() && r.i);
    }

    #[test]
    fn m3_fails_r() {
        let r = check_axioms(&m3());
        assert!(r.c);
        assert!(!r.r);
        assert!(ev_wd(&m3()).is_err());
    }

    #[test]
    fn chain_gives_causal_chain() {
        let es = ev_wd(&chain(2)).unwrap();
        assert_eq!(es.len(), 2);
        assert_eq!(es.configurations().len(), 3);
    }

    #[test]
    fn zeta_on_chain() {
        let z = zeta(&chain(3)).unwrap();
        assert_eq!(z.zeta.len(), 3);
        for (c, &k) in z.zeta.iter().enumerate() {
            assert_eq!(z.iota[k], c);
        }
    }
}
