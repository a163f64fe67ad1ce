//! Finite posets standing for the compact elements of a domain.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::es::MorphismViolation;
use crate::unionfind::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    /// Every pairwise consistent subset has a join.
    Coherent,
    /// Every bounded subset has a join.
    BoundedComplete,
}

#[derive(Clone, Debug)]
pub struct FiniteDomain {
    names: Vec<String>,
    kind: DomainKind,
    leq: Vec<Vec<bool>>,
    lower: Vec<Vec<usize>>,
    upper: Vec<Vec<usize>>,
    bottom: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Algebraicity {
    pub irreducible_algebraic: bool,
    pub prime_algebraic: bool,
    pub weak_prime_algebraic: bool,
}

impl FiniteDomain {
    /// Builds the order generated by `relation` (pairs `x ⊑ y`, usually covers).
    /// Checks antisymmetry and the least element; joins are checked by [`validate`](Self::validate).
    pub fn new(names: Vec<String>, relation: &[(usize, usize)], kind: DomainKind) -> Result<Self> {
        let n = names.len();
        let mut seen = HashMap::new();
        for nm in &names {
            if seen.insert(nm.as_str(), ()).is_some() {
                return Err(Error::DuplicateId(nm.clone()));
            }
        }
        if n == 0 {
            return Err(Error::InvalidOrder("a domain needs a least element".into()));
        }
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in relation {
            if a >= n || b >= n {
                return Err(Error::InvalidOrder("relation refers to a missing element".into()));
            }
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::InvalidOrder(format!(
                        "cycle through `{}` and `{}`",
                        names[i], names[j]
                    )));
                }
            }
        }
        let bottom = (0..n)
            .find(|&b| (0..n).all(|x| leq[b][x]))
            .ok_or_else(|| Error::InvalidOrder("no least element".into()))?;
        let mut lower = vec![Vec::new(); n];
        let mut upper = vec![Vec::new(); n];
        for a in 0..n {
            for b in 0..n {
                if a != b && leq[a][b] && !(0..n).any(|c| c != a && c != b && leq[a][c] && leq[c][b]) {
                    lower[b].push(a);
                    upper[a].push(b);
                }
            }
        }
        Ok(FiniteDomain {
            names,
            kind,
            leq,
            lower,
            upper,
            bottom,
        })
    }

    /// Builds by element names and cover pairs.
    pub fn from_names(elements: &[&str], covers: &[(&str, &str)], kind: DomainKind) -> Result<Self> {
        let names: Vec<String> = elements.iter().map(|s| s.to_string()).collect();
        let idx = |s: &str| {
            names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::UnknownElement(s.to_string()))
        };
        let mut rel = Vec::new();
        for (a, b) in covers {
            rel.push((idx(a)?, idx(b)?));
        }
        Self::new(names, &rel, kind)
    }

    /// Order plus the join condition for the domain kind.
    pub fn validated(names: Vec<String>, relation: &[(usize, usize)], kind: DomainKind) -> Result<Self> {
        let d = Self::new(names, relation, kind)?;
        d.validate()?;
        Ok(d)
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

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn lower_covers(&self, x: usize) -> &[usize] {
        &self.lower[x]
    }

    pub fn upper_covers(&self, x: usize) -> &[usize] {
        &self.upper[x]
    }

    pub fn is_cover(&self, a: usize, b: usize) -> bool {
        self.upper[a].contains(&b)
    }

    /// All cover pairs, ordered by lower then upper index.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for &b in &self.upper[a] {
                out.push((a, b));
            }
        }
        out.sort();
        out
    }

    pub fn upper_bounds(&self, set: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&u| set.iter().all(|&x| self.leq[x][u]))
            .collect()
    }

    pub fn is_consistent(&self, set: &[usize]) -> bool {
        (0..self.len()).any(|u| set.iter().all(|&x| self.leq[x][u]))
    }

    pub fn join(&self, set: &[usize]) -> Option<usize> {
        let ubs = self.upper_bounds(set);
        ubs.iter()
            .copied()
            .find(|&u| ubs.iter().all(|&v| self.leq[u][v]))
    }

    pub fn join2(&self, a: usize, b: usize) -> Option<usize> {
        self.join(&[a, b])
    }

    pub fn meet(&self, set: &[usize]) -> Option<usize> {
        let lbs: Vec<usize> = (0..self.len())
            .filter(|&l| set.iter().all(|&x| self.leq[l][x]))
            .collect();
        lbs.iter()
            .copied()
            .find(|&l| lbs.iter().all(|&m| self.leq[m][l]))
    }

    pub fn meet2(&self, a: usize, b: usize) -> Option<usize> {
        self.meet(&[a, b])
    }

    /// Checks the join condition of the domain kind, naming a witness subset on failure.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        for a in 0..n {
            for b in a + 1..n {
                if self.is_consistent(&[a, b]) && self.join2(a, b).is_none() {
                    return Err(Error::InvalidDomain(format!(
                        "{{{},{}}} is bounded but has no least upper bound",
                        self.names[a], self.names[b]
                    )));
                }
            }
        }
        if self.kind == DomainKind::Coherent {
            let adj: Vec<Vec<bool>> = (0..n)
                .map(|a| (0..n).map(|b| a != b && self.is_consistent(&[a, b])).collect())
                .collect();
            let mut cliques = Vec::new();
            bron_kerbosch(&adj, Vec::new(), (0..n).collect(), Vec::new(), &mut cliques);
            for c in cliques {
                if !self.is_consistent(&c) {
                    let ns: Vec<&str> = c.iter().map(|&x| self.names[x].as_str()).collect();
                    return Err(Error::InvalidDomain(format!(
                        "{{{}}} is pairwise consistent but has no upper bound",
                        ns.join(",")
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_irreducible(&self, x: usize) -> bool {
        x != self.bottom && self.lower[x].len() == 1
    }

    /// Irreducibles in index order.
    pub fn irreducibles(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.is_irreducible(x)).collect()
    }

    /// The unique lower cover of an irreducible.
    pub fn pred(&self, i: usize) -> Result<usize> {
        if self.is_irreducible(i) {
            Ok(self.lower[i][0])
        } else {
            Err(Error::NotIrreducible(self.names[i].clone()))
        }
    }

    /// `ir(d)`: the irreducibles below `d`.
    pub fn decompose(&self, d: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.is_irreducible(i) && self.leq[i][d])
            .collect()
    }

    /// `ir(hi) \ ir(lo)`; requires `lo ⊑ hi`.
    pub fn diff(&self, hi: usize, lo: usize) -> Result<Vec<usize>> {
        if !self.leq[lo][hi] {
            return Err(Error::NotBelow(self.names[lo].clone(), self.names[hi].clone()));
        }
        Ok(self
            .decompose(hi)
            .into_iter()
            .filter(|&i| !self.leq[i][lo])
            .collect())
    }

    /// Prime elements, checked on joins of consistent pairs (enough for finite sets).
    pub fn primes(&self) -> Vec<usize> {
        let n = self.len();
        (0..n)
            .filter(|&p| {
                p != self.bottom
                    && (0..n).all(|a| {
                        (a..n).all(|b| match self.join2(a, b) {
                            Some(j) if self.leq[p][j] => self.leq[p][a] || self.leq[p][b],
                            _ => true,
                        })
                    })
            })
            .collect()
    }

    /// Interchangeability via `i ⊔ p(i') = p(i) ⊔ i' ≠ p(i) ⊔ p(i')` for consistent `i, i'`.
    pub fn interchangeable(&self, i: usize, j: usize) -> Result<bool> {
        let (pi, pj) = (self.pred(i)?, self.pred(j)?);
        if !self.is_consistent(&[i, j]) {
            return Ok(false);
        }
        let a = self.join2(i, pj);
        let b = self.join2(pi, j);
        let c = self.join2(pi, pj);
        Ok(a.is_some() && a == b && a != c)
    }

    /// Interchangeability quantified over every context `d` above both predecessors.
    pub fn interchangeable_in_context(&self, i: usize, j: usize) -> Result<bool> {
        let (pi, pj) = (self.pred(i)?, self.pred(j)?);
        if !self.is_consistent(&[i, j]) {
            return Ok(false);
        }
        let mut effective = false;
        for d in 0..self.len() {
            if !(self.leq[pi][d] && self.leq[pj][d]) {
                continue;
            }
            match (self.join2(d, i), self.join2(d, j)) {
                (Some(x), Some(y)) => {
                    if x != y {
                        return Ok(false);
                    }
                    if x != d {
                        effective = true;
                    }
                }
                _ => continue,
            }
        }
        Ok(effective)
    }

    /// Interchangeability by quantifying over downward closed sets of irreducibles.
    pub fn interchangeable_by_definition(&self, i: usize, j: usize) -> Result<bool> {
        self.pred(i)?;
        self.pred(j)?;
        let irs = self.irreducibles();
        let mut all_equal = true;
        let mut effective = false;
        for x in self.down_closed_irreducible_sets(&irs) {
            let with = |k: usize| {
                let mut s = x.clone();
                if !s.contains(&k) {
                    s.push(k);
                }
                s
            };
            let (xi, xj) = (with(i), with(j));
            if !self.is_down_closed_in(&xi, &irs) || !self.is_down_closed_in(&xj, &irs) {
                continue;
            }
            if !self.is_consistent(&xi) || !self.is_consistent(&xj) {
                continue;
            }
            let (ji, jj) = (self.join(&xi), self.join(&xj));
            if ji != jj {
                all_equal = false;
                break;
            }
            if self.join(&x) != ji {
                effective = true;
            }
        }
        Ok(all_equal && effective)
    }

    fn is_down_closed_in(&self, set: &[usize], irs: &[usize]) -> bool {
        set.iter()
            .all(|&x| irs.iter().all(|&y| !self.leq[y][x] || set.contains(&y)))
    }

    /// Every downward closed subset of the given irreducibles.
    fn down_closed_irreducible_sets(&self, irs: &[usize]) -> Vec<Vec<usize>> {
        let mut order: Vec<usize> = irs.to_vec();
        order.sort_by_key(|&x| (0..self.len()).filter(|&y| self.leq[y][x]).count());
        let mut out = Vec::new();
        let mut current = Vec::new();
        self.extend_down_closed(&order, 0, &mut current, &mut out);
        out
    }

    fn extend_down_closed(&self, order: &[usize], k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == order.len() {
            out.push(cur.clone());
            return;
        }
        let x = order[k];
        self.extend_down_closed(order, k + 1, cur, out);
        let below_ok = order[..k]
            .iter()
            .all(|&y| !(self.leq[y][x] && y != x) || cur.contains(&y));
        if below_ok {
            cur.push(x);
            self.extend_down_closed(order, k + 1, cur, out);
            cur.pop();
        }
    }

    /// Classes of the reflexive-transitive closure of interchangeability,
    /// ordered by their least member name, members sorted by name.
    pub fn interchange_classes(&self) -> Vec<Vec<usize>> {
        let irs = self.irreducibles();
        let mut uf = UnionFind::new(irs.len());
        for a in 0..irs.len() {
            for b in a + 1..irs.len() {
                if self.interchangeable(irs[a], irs[b]).unwrap_or(false) {
                    uf.union(a, b);
                }
            }
        }
        let (cls, k) = uf.classes();
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (pos, &c) in cls.iter().enumerate() {
            groups[c].push(irs[pos]);
        }
        for g in &mut groups {
            g.sort_by(|&a, &b| self.names[a].cmp(&self.names[b]));
        }
        groups.sort_by(|a, b| self.names[a[0]].cmp(&self.names[b[0]]));
        groups
    }

    /// Map from irreducible to its class index in [`interchange_classes`](Self::interchange_classes).
    pub fn class_index(&self) -> HashMap<usize, usize> {
        let mut m = HashMap::new();
        for (k, g) in self.interchange_classes().iter().enumerate() {
            for &i in g {
                m.insert(i, k);
            }
        }
        m
    }

    /// Weak primes: an irreducible `i` is one unless some join of a consistent set
    /// avoiding every element above an interchangeable partner of `i` lies above `i`.
    /// Such joins are exactly the closure of that avoiding set under consistent binary joins.
    pub fn weak_primes(&self) -> Vec<usize> {
        let n = self.len();
        let irs = self.irreducibles();
        irs.iter()
            .copied()
            .filter(|&i| {
                let partners: Vec<usize> = irs
                    .iter()
                    .copied()
                    .filter(|&j| j == i || self.interchangeable(i, j).unwrap_or(false))
                    .collect();
                let mut reach: BTreeSet<usize> = (0..n)
                    .filter(|&d| !partners.iter().any(|&j| self.leq[j][d]))
                    .collect();
                loop {
                    let cur: Vec<usize> = reach.iter().copied().collect();
                    let mut grew = false;
                    for (k, &a) in cur.iter().enumerate() {
                        for &b in &cur[k + 1..] {
                            if let Some(j) = self.join2(a, b) {
                                if reach.insert(j) {
                                    grew = true;
                                }
                            }
                        }
                    }
                    if !grew {
                        break;
                    }
                }
                !reach.iter().any(|&d| self.leq[i][d])
            })
            .collect()
    }

    /// Weak primes by enumerating every consistent subset; exponential, for small posets.
    pub fn weak_primes_by_definition(&self) -> Vec<usize> {
        let n = self.len();
        assert!(n <= 20, "exhaustive weak prime check limited to 20 elements");
        let irs = self.irreducibles();
        let mut joins: Vec<(u32, usize)> = Vec::new();
        for mask in 0u32..(1u32 << n) {
            let set: Vec<usize> = (0..n).filter(|&k| mask & (1 << k) != 0).collect();
            if let Some(j) = self.join(&set) {
                joins.push((mask, j));
            }
        }
        irs.iter()
            .copied()
            .filter(|&i| {
                let partners: Vec<usize> = irs
                    .iter()
                    .copied()
                    .filter(|&j| j == i || self.interchangeable(i, j).unwrap_or(false))
                    .collect();
                joins.iter().all(|&(mask, j)| {
                    !self.leq[i][j]
                        || (0..n).any(|d| mask & (1 << d) != 0 && partners.iter().any(|&p| self.leq[p][d]))
                })
            })
            .collect()
    }

    /// Primes by enumerating every pairwise consistent subset; exponential, for small posets.
    pub fn primes_by_definition(&self) -> Vec<usize> {
        let n = self.len();
        assert!(n <= 20, "exhaustive prime check limited to 20 elements");
        let mut joins: Vec<(u32, usize)> = Vec::new();
        for mask in 0u32..(1u32 << n) {
            let set: Vec<usize> = (0..n).filter(|&k| mask & (1 << k) != 0).collect();
            let pairwise = set
                .iter()
                .all(|&a| set.iter().all(|&b| self.is_consistent(&[a, b])));
            if pairwise {
                if let Some(j) = self.join(&set) {
                    joins.push((mask, j));
                }
            }
        }
        (0..n)
            .filter(|&p| {
                joins.iter().all(|&(mask, j)| {
                    !self.leq[p][j] || (0..n).any(|d| mask & (1 << d) != 0 && self.leq[p][d])
                })
            })
            .collect()
    }

    pub fn algebraicity(&self) -> Algebraicity {
        let irs = self.irreducibles();
        let irreducible_algebraic = (0..self.len()).all(|d| self.join(&self.decompose(d)) == Some(d));
        Algebraicity {
            irreducible_algebraic,
            prime_algebraic: self.primes() == irs,
            weak_prime_algebraic: self.weak_primes() == irs,
        }
    }

    /// First irreducible that is not a weak prime, if any.
    pub fn weak_prime_failure(&self) -> Option<usize> {
        let wp = self.weak_primes();
        self.irreducibles().into_iter().find(|i| !wp.contains(i))
    }

    pub fn is_weak_prime_algebraic(&self) -> bool {
        self.weak_prime_failure().is_none()
    }

    /// Same order with different element names.
    pub fn renamed(&self, names: Vec<String>) -> Result<FiniteDomain> {
        assert_eq!(names.len(), self.len());
        FiniteDomain::new(names, &self.covers(), self.kind)
    }
}

fn bron_kerbosch(adj: &[Vec<bool>], r: Vec<usize>, mut p: Vec<usize>, mut x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() && x.is_empty() {
        out.push(r);
        return;
    }
    let pivot = p.iter().chain(x.iter()).copied().next().unwrap();
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    for v in candidates {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.iter().copied().filter(|&w| adj[v][w]).collect();
        let x2 = x.iter().copied().filter(|&w| adj[v][w]).collect();
        bron_kerbosch(adj, r2, p2, x2, out);
        p.retain(|&w| w != v);
        x.push(v);
    }
}

/// Checks a total map between domains against the domain morphism conditions.
/// With `strict`, every cover must map to a cover; otherwise a cover may also collapse.
pub fn validate_domain_morphism(
    f: &[usize],
    d1: &FiniteDomain,
    d2: &FiniteDomain,
    strict: bool,
) -> std::result::Result<(), MorphismViolation> {
    assert_eq!(f.len(), d1.len(), "map must be total");
    let name = |x: usize| d1.name(x).to_string();
    for (a, b) in d1.covers() {
        let ok = d2.is_cover(f[a], f[b]) || (!strict && f[a] == f[b]);
        if !ok {
            return Err(MorphismViolation {
                condition: 1,
                witness: format!("{} ≺ {}", name(a), name(b)),
            });
        }
    }
    if f[d1.bottom()] != d2.bottom() {
        return Err(MorphismViolation {
            condition: 2,
            witness: "empty join".into(),
        });
    }
    let n = d1.len();
    for a in 0..n {
        for b in a + 1..n {
            let Some(j) = d1.join2(a, b) else { continue };
            if d2.join2(f[a], f[b]) != Some(f[j]) {
                return Err(MorphismViolation {
                    condition: 2,
                    witness: format!("{} ⊔ {}", name(a), name(b)),
                });
            }
        }
    }
    let both_prime = d1.algebraicity().prime_algebraic && d2.algebraicity().prime_algebraic;
    for a in 0..n {
        for b in 0..n {
            if a == b || !d1.is_consistent(&[a, b]) {
                continue;
            }
            let m = d1.meet2(a, b).expect("meets exist in domains");
            if (both_prime || d1.is_cover(m, a)) && d2.meet2(f[a], f[b]) != Some(f[m]) {
                return Err(MorphismViolation {
                    condition: 3,
                    witness: format!("{} ⊓ {}", name(a), name(b)),
                });
            }
        }
    }
    Ok(())
}
