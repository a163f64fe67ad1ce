//! Passing between event structures and weak prime domains.

use crate::domain::{DomainKind, FiniteDomain};
use crate::error::{Error, Result};
use crate::es::{bit, is_subset, maximal_sets, members, EventSet, EventStructure};

/// The configurations of `es` ordered by inclusion, with the configuration behind each element.
pub fn configuration_domain(es: &EventStructure) -> Result<(FiniteDomain, Vec<EventSet>)> {
    if let Some(issue) = es.liveness_issues().into_iter().next() {
        return Err(Error::NotLive(issue));
    }
    let configs = es.configurations();
    Ok((domain_of_sets(es, &configs), configs))
}

pub fn dom_of_es(es: &EventStructure) -> Result<FiniteDomain> {
    configuration_domain(es).map(|(d, _)| d)
}

/// Inclusion order on a family of sets closed under single-event growth.
fn domain_of_sets(es: &EventStructure, sets: &[EventSet]) -> FiniteDomain {
    let names: Vec<String> = sets.iter().map(|&c| es.fmt_set(c)).collect();
    let mut rel = Vec::new();
    for (i, &a) in sets.iter().enumerate() {
        for (j, &b) in sets.iter().enumerate() {
            if a != b && is_subset(a, b) {
                rel.push((i, j));
            }
        }
    }
    let kind = if es.is_binary() {
        DomainKind::Coherent
    } else {
        DomainKind::BoundedComplete
    };
    FiniteDomain::new(names, &rel, kind).expect("inclusion is a partial order with least element")
}

/// Image of an event structure morphism on configurations.
pub fn dom_of_morphism(f: &[Option<usize>], src: &EventStructure, dst: &EventStructure) -> Result<Vec<usize>> {
    let (_, c1) = configuration_domain(src)?;
    let (_, c2) = configuration_domain(dst)?;
    c1.iter()
        .map(|&c| {
            let img = members(c).filter_map(|e| f[e]).fold(0, |acc, t| acc | bit(t));
            c2.iter().position(|&d| d == img).ok_or_else(|| {
                Error::InvalidMorphism(format!("image of {} is not a configuration", src.fmt_set(c)))
            })
        })
        .collect()
}

/// Event names synthesized for interchange classes.
pub fn class_names(d: &FiniteDomain, classes: &[Vec<usize>]) -> Vec<String> {
    classes
        .iter()
        .enumerate()
        .map(|(n, c)| format!("class{}:{}", n, d.name(c[0])))
        .collect()
}

fn require_weak_prime(d: &FiniteDomain) -> Result<()> {
    match d.weak_prime_failure() {
        Some(i) => Err(Error::NotWeakPrime(d.name(i).to_string())),
        None => Ok(()),
    }
}

/// Events are interchange classes of irreducibles; each irreducible `i` contributes
/// the enabling of its class by the classes below its predecessor.
pub fn ev_of_domain(d: &FiniteDomain) -> Result<EventStructure> {
    require_weak_prime(d)?;
    let classes = d.interchange_classes();
    let index = d.class_index();
    let names = class_names(d, &classes);
    let classes_of = |xs: &[usize]| xs.iter().fold(0u64, |acc, i| acc | bit(index[i]));
    if classes.len() > crate::es::MAX_EVENTS {
        return Err(Error::TooManyEvents(classes.len()));
    }
    let mut gens = Vec::new();
    for i in d.irreducibles() {
        let p = d.pred(i)?;
        gens.push((classes_of(&d.decompose(p)), index[&i]));
    }
    match d.kind() {
        DomainKind::Coherent => {
            let mut conflicts = Vec::new();
            for a in 0..classes.len() {
                for b in a + 1..classes.len() {
                    let together = classes[a]
                        .iter()
                        .any(|&i| classes[b].iter().any(|&j| d.is_consistent(&[i, j])));
                    if !together {
                        conflicts.push((a, b));
                    }
                }
            }
            EventStructure::from_binary(names, &conflicts, gens)
        }
        DomainKind::BoundedComplete => {
            let maximal: Vec<usize> = (0..d.len()).filter(|&x| d.upper_covers(x).is_empty()).collect();
            let sets = maximal.iter().map(|&m| classes_of(&d.decompose(m))).collect();
            EventStructure::from_consistency(names, sets, gens)
        }
    }
}

/// The connected event structure with the same domain of configurations.
pub fn connect_es(es: &EventStructure) -> Result<EventStructure> {
    ev_of_domain(&dom_of_es(es)?)
}

/// A prime event structure with an equivalence on its events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Epes {
    base: EventStructure,
    class: Vec<usize>,
    class_names: Vec<String>,
    causes: Vec<EventSet>,
}

impl Epes {
    /// `class[e]` indexes `class_names`; every class must be inhabited.
    pub fn new(base: EventStructure, class: Vec<usize>, class_names: Vec<String>) -> Result<Self> {
        if class.len() != base.len() {
            return Err(Error::InvalidEpes("one class per event required".into()));
        }
        for k in 0..class_names.len() {
            if !class.contains(&k) {
                return Err(Error::InvalidEpes(format!("class `{}` has no events", class_names[k])));
            }
        }
        if class.iter().any(|&k| k >= class_names.len()) {
            return Err(Error::InvalidEpes("class index out of range".into()));
        }
        if let Some(issue) = base.liveness_issues().into_iter().next() {
            return Err(Error::NotLive(issue));
        }
        let configs = base.configurations();
        let mut causes = Vec::with_capacity(base.len());
        for e in 0..base.len() {
            let mins = base.minimal_enablings_in(&configs, e);
            if mins.len() != 1 {
                return Err(Error::InvalidEpes(format!(
                    "base is not prime: `{}` has {} minimal enablings",
                    base.name(e),
                    mins.len()
                )));
            }
            causes.push(mins[0]);
        }
        let p = Epes {
            base,
            class,
            class_names,
            causes,
        };
        for e in 0..p.len() {
            if let Some(c) = members(p.causes[e]).find(|&c| p.class[c] == p.class[e]) {
                return Err(Error::InvalidEpes(format!(
                    "`{}` causes the equivalent `{}`",
                    p.base.name(c),
                    p.base.name(e)
                )));
            }
            if !p.is_saturated(p.causes[e] | bit(e)) {
                return Err(Error::InvalidEpes(format!(
                    "causes of `{}` with the event itself are not saturated",
                    p.base.name(e)
                )));
            }
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn base(&self) -> &EventStructure {
        &self.base
    }

    pub fn class(&self) -> &[usize] {
        &self.class
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn causes(&self, e: usize) -> EventSet {
        self.causes[e]
    }

    pub fn equivalent(&self, a: usize, b: usize) -> bool {
        self.class[a] == self.class[b]
    }

    /// `x` contains every event equivalent to a member whose causes lie in `x`,
    /// unless adding it would make `x` inconsistent.
    pub fn is_saturated(&self, x: EventSet) -> bool {
        members(x).all(|e| {
            (0..self.len()).all(|f| {
                !self.equivalent(e, f)
                    || x & bit(f) != 0
                    || !is_subset(self.causes[f], x)
                    || !self.base.is_consistent(x | bit(f))
            })
        })
    }

    /// Every pair of equivalent events is linked by a chain of consistent equivalent pairs.
    pub fn is_connected(&self) -> bool {
        let mut uf = crate::unionfind::UnionFind::new(self.len());
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                if self.equivalent(a, b) && !self.base.in_conflict(a, b) {
                    uf.union(a, b);
                }
            }
        }
        (0..self.len()).all(|a| (0..self.len()).all(|b| !self.equivalent(a, b) || uf.same(a, b)))
    }

    pub fn configurations(&self) -> Vec<EventSet> {
        self.base
            .configurations()
            .into_iter()
            .filter(|&c| self.is_saturated(c))
            .collect()
    }
}

/// The saturated configurations ordered by inclusion.
pub fn epes_dom(p: &Epes) -> FiniteDomain {
    domain_of_sets(&p.base, &p.configurations())
}

/// Irreducibles as events, with interchangeability closure as the equivalence.
pub fn epes_ev(d: &FiniteDomain) -> Result<Epes> {
    require_weak_prime(d)?;
    let irs = d.irreducibles();
    if irs.len() > crate::es::MAX_EVENTS {
        return Err(Error::TooManyEvents(irs.len()));
    }
    let names: Vec<String> = irs.iter().map(|&i| d.name(i).to_string()).collect();
    let pos = |x: usize| irs.iter().position(|&i| i == x).expect("irreducible");
    let set_of = |xs: &[usize]| xs.iter().fold(0u64, |acc, &x| acc | bit(pos(x)));
    let gens: Vec<(EventSet, usize)> = irs
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let below: Vec<usize> = irs.iter().copied().filter(|&j| j != i && d.leq(j, i)).collect();
            (set_of(&below), k)
        })
        .collect();
    let base = match d.kind() {
        DomainKind::Coherent => {
            let mut conflicts = Vec::new();
            for a in 0..irs.len() {
                for b in a + 1..irs.len() {
                    if !d.is_consistent(&[irs[a], irs[b]]) {
                        conflicts.push((a, b));
                    }
                }
            }
            EventStructure::from_binary(names, &conflicts, gens)?
        }
        DomainKind::BoundedComplete => {
            let sets = (0..d.len())
                .filter(|&x| d.upper_covers(x).is_empty())
                .map(|m| set_of(&d.decompose(m)))
                .collect();
            EventStructure::from_consistency(names, sets, gens)?
        }
    };
    let classes = d.interchange_classes();
    let index = d.class_index();
    let class = irs.iter().map(|i| index[i]).collect();
    Epes::new(base, class, class_names(d, &classes))
}

/// Quotient by the equivalence: a class is enabled by the classes of the causes of any member,
/// and two classes conflict when all their members do.
pub fn fuse(p: &Epes) -> Result<EventStructure> {
    let k = p.class_names.len();
    let lift = |s: EventSet| members(s).fold(0u64, |acc, e| acc | bit(p.class[e]));
    let gens = (0..p.len()).map(|e| (lift(p.causes[e]), p.class[e])).collect();
    let members_of: Vec<Vec<usize>> = (0..k)
        .map(|c| (0..p.len()).filter(|&e| p.class[e] == c).collect())
        .collect();
    match p.base.conflict() {
        crate::es::Conflict::Binary(_) => {
            let mut conflicts = Vec::new();
            for a in 0..k {
                for b in a + 1..k {
                    if members_of[a]
                        .iter()
                        .all(|&x| members_of[b].iter().all(|&y| p.base.in_conflict(x, y)))
                    {
                        conflicts.push((a, b));
                    }
                }
            }
            EventStructure::from_binary(p.class_names.clone(), &conflicts, gens)
        }
        crate::es::Conflict::Consistency(max) => {
            let sets = max.iter().map(|&m| lift(m)).collect();
            EventStructure::from_consistency(p.class_names.clone(), sets, gens)
        }
    }
}

/// One event per minimal enabling `C ⊢₀ e` (with `C ∪ {e}` consistent), named `e@C`,
/// caused by every such event whose history lies in `C`.
pub fn unfold(es: &EventStructure) -> Result<Epes> {
    if let Some(issue) = es.liveness_issues().into_iter().next() {
        return Err(Error::NotLive(issue));
    }
    let configs = es.configurations();
    let mut inst: Vec<(EventSet, usize)> = Vec::new();
    for e in 0..es.len() {
        for c in es.minimal_enablings_in(&configs, e) {
            if es.is_consistent(c | bit(e)) {
                inst.push((c, e));
            }
        }
    }
    if inst.len() > crate::es::MAX_EVENTS {
        return Err(Error::TooManyEvents(inst.len()));
    }
    let names: Vec<String> = inst
        .iter()
        .map(|&(c, e)| format!("{}@{}", es.name(e), es.fmt_set(c)))
        .collect();
    let history = |k: usize| inst[k].0 | bit(inst[k].1);
    let gens: Vec<(EventSet, usize)> = (0..inst.len())
        .map(|k| {
            let causes = (0..inst.len())
                .filter(|&j| j != k && is_subset(history(j), inst[k].0))
                .fold(0u64, |acc, j| acc | bit(j));
            (causes, k)
        })
        .collect();
    let base = match es.conflict() {
        crate::es::Conflict::Binary(_) => {
            let mut conflicts = Vec::new();
            for a in 0..inst.len() {
                for b in a + 1..inst.len() {
                    if !es.is_consistent(history(a) | history(b)) {
                        conflicts.push((a, b));
                    }
                }
            }
            EventStructure::from_binary(names, &conflicts, gens)?
        }
        crate::es::Conflict::Consistency(max) => {
            let sets = max
                .iter()
                .map(|&m| {
                    (0..inst.len())
                        .filter(|&k| is_subset(history(k), m))
                        .fold(0u64, |acc, k| acc | bit(k))
                })
                .collect();
            EventStructure::from_consistency(names, maximal_sets(sets), gens)?
        }
    };
    let class = inst.iter().map(|&(_, e)| e).collect();
    Epes::new(base, class, es.names().to_vec())
}

/// Isomorphism of the bases that maps classes onto classes.
pub fn epes_isomorphism(a: &Epes, b: &Epes) -> Option<Vec<usize>> {
    crate::iso::es_isomorphism_with(&a.base, &b.base, |x, y, fx, fy| a.equivalent(x, y) == b.equivalent(fx, fy))
}

/// Checks an event structure morphism that also reflects and preserves equivalence
/// on the events where both images are defined.
pub fn validate_epes_morphism(
    f: &[Option<usize>],
    src: &Epes,
    dst: &Epes,
) -> std::result::Result<(), crate::es::MorphismViolation> {
    crate::es::validate_es_morphism(f, &src.base, &dst.base)?;
    for a in 0..src.len() {
        for b in a + 1..src.len() {
            let (Some(fa), Some(fb)) = (f[a], f[b]) else { continue };
            if src.equivalent(a, b) != dst.equivalent(fa, fb) {
                return Err(crate::es::MorphismViolation {
                    condition: 4,
                    witness: format!("{} and {}", src.base.name(a), src.base.name(b)),
                });
            }
        }
    }
    Ok(())
}

/// For each unfolded source event `e@C` with `f(e)` defined, the unfolded target events
/// `f(e)@C'` with `C' ⊆ f(C)`; any of them is an admissible image.
pub fn unfold_morphism_choices(
    f: &[Option<usize>],
    src: &EventStructure,
    dst: &EventStructure,
) -> Result<Vec<(String, Vec<String>)>> {
    let us = unfold(src)?;
    let ud = unfold(dst)?;
    let configs_s = src.configurations();
    let configs_d = dst.configurations();
    let mut out = Vec::new();
    for e in 0..src.len() {
        let Some(fe) = f[e] else { continue };
        for c in src.minimal_enablings_in(&configs_s, e) {
            let name = format!("{}@{}", src.name(e), src.fmt_set(c));
            if us.base.index(&name).is_err() {
                continue;
            }
            let img = members(c).filter_map(|x| f[x]).fold(0u64, |acc, t| acc | bit(t));
            let choices = dst
                .minimal_enablings_in(&configs_d, fe)
                .into_iter()
                .filter(|&c2| is_subset(c2, img))
                .map(|c2| format!("{}@{}", dst.name(fe), dst.fmt_set(c2)))
                .filter(|n| ud.base.index(n).is_ok())
                .collect();
            out.push((name, choices));
        }
    }
    Ok(out)
}
