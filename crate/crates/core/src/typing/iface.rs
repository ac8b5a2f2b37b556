use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::kernel::Sym;
use crate::policy::{FlatHierarchy, PermSet, Permission};

/// Δ: permissions exercised per private type. `t: ∅` entries are kept.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Delta(BTreeMap<Sym, PermSet>);

impl Delta {
    pub fn new() -> Self {
        Delta::default()
    }

    pub fn single(t: &Sym, perms: impl IntoIterator<Item = Permission>) -> Self {
        let mut d = Delta::new();
        d.touch(t);
        for p in perms {
            d.add(t, p);
        }
        d
    }

    /// Ensures an entry for `t` exists.
    pub fn touch(&mut self, t: &Sym) {
        self.0.entry(t.clone()).or_default();
    }

    pub fn add(&mut self, t: &Sym, p: Permission) {
        self.0.entry(t.clone()).or_default().insert(p);
    }

    /// ⊎, pointwise.
    pub fn merge(&mut self, other: &Delta) {
        for (t, ps) in &other.0 {
            let e = self.0.entry(t.clone()).or_default();
            *e = e.union(ps);
        }
    }

    pub fn union(&self, other: &Delta) -> Delta {
        let mut out = self.clone();
        out.merge(other);
        out
    }

    /// Δ*: every disseminate budget becomes ω.
    pub fn star(&self) -> Delta {
        Delta(
            self.0
                .iter()
                .map(|(t, ps)| (t.clone(), ps.star()))
                .collect(),
        )
    }

    pub fn get(&self, t: &Sym) -> Option<&PermSet> {
        self.0.get(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Sym, &PermSet)> {
        self.0.iter()
    }

    pub fn types(&self) -> BTreeSet<Sym> {
        self.0.keys().cloned().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// ≼, pointwise over the types of `self`.
    pub fn leq(&self, other: &Delta) -> bool {
        self.0
            .iter()
            .all(|(t, ps)| other.0.get(t).is_some_and(|qs| ps.leq(qs)))
    }
}

impl FromIterator<(Sym, PermSet)> for Delta {
    fn from_iter<I: IntoIterator<Item = (Sym, PermSet)>>(iter: I) -> Self {
        let mut d = Delta::new();
        for (t, ps) in iter {
            d.merge(&Delta(BTreeMap::from([(t, ps)])));
        }
        d
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.0.iter().map(|(t, ps)| format!("{t}: {ps}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Θ: an ordered multiset of `t: θ` entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Theta(Vec<(Sym, FlatHierarchy)>);

impl Theta {
    pub fn new() -> Self {
        Theta::default()
    }

    pub fn push(&mut self, t: Sym, theta: FlatHierarchy) {
        self.0.push((t, theta));
    }

    pub fn extend(&mut self, other: Theta) {
        self.0.extend(other.0);
    }

    pub fn entries(&self) -> &[(Sym, FlatHierarchy)] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Sym, FlatHierarchy)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entries ordered by type, then path, then permissions.
    pub fn sorted(&self) -> Theta {
        let mut v = self.0.clone();
        v.sort();
        Theta(v)
    }

    /// Adds `t: path[∅]` for every type in `types` missing at a path that
    /// already occurs in Θ.
    pub fn padded<'a>(&self, types: impl IntoIterator<Item = &'a Sym>) -> Theta {
        let types: Vec<&Sym> = types.into_iter().collect();
        let paths: BTreeSet<&Vec<Sym>> = self.0.iter().map(|(_, th)| &th.path).collect();
        let mut out = self.clone();
        for path in paths {
            for t in &types {
                if !self.0.iter().any(|(u, th)| u == *t && &th.path == path) {
                    out.0.push((
                        (*t).clone(),
                        FlatHierarchy {
                            path: path.clone(),
                            perms: PermSet::new(),
                        },
                    ));
                }
            }
        }
        out.sorted()
    }

    /// ≼: each entry of `self` is covered by a distinct entry of `other`
    /// with the same type and path.
    pub fn leq(&self, other: &Theta) -> bool {
        let n = other.0.len();
        let edges: Vec<Vec<usize>> = self
            .0
            .iter()
            .map(|(t, th)| {
                (0..n)
                    .filter(|&j| &other.0[j].0 == t && th.leq(&other.0[j].1))
                    .collect()
            })
            .collect();
        let mut owner: Vec<Option<usize>> = vec![None; n];
        (0..edges.len()).all(|i| augment(i, &edges, &mut owner, &mut vec![false; n]))
    }
}

fn augment(i: usize, edges: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &j in &edges[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        if owner[j].is_none_or(|k| augment(k, edges, owner, seen)) {
            owner[j] = Some(i);
            return true;
        }
    }
    false
}

impl FromIterator<(Sym, FlatHierarchy)> for Theta {
    fn from_iter<I: IntoIterator<Item = (Sym, FlatHierarchy)>>(iter: I) -> Self {
        Theta(iter.into_iter().collect())
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (t, th)) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{t}: {th}")?;
        }
        Ok(())
    }
}

/// Operands accepted by [`interface_leq`].
pub enum Iface<'a> {
    Perms(&'a PermSet),
    Delta(&'a Delta),
    Flat(&'a FlatHierarchy),
    Theta(&'a Theta),
}

/// ≼ on permission sets, Δ, θ or Θ. Mismatched kinds compare as false.
pub fn interface_leq(lhs: Iface<'_>, rhs: Iface<'_>) -> bool {
    match (lhs, rhs) {
        (Iface::Perms(a), Iface::Perms(b)) => a.leq(b),
        (Iface::Delta(a), Iface::Delta(b)) => a.leq(b),
        (Iface::Flat(a), Iface::Flat(b)) => a.leq(b),
        (Iface::Theta(a), Iface::Theta(b)) => a.leq(b),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::Lambda;

    fn s(x: &str) -> Sym {
        Sym::new(x)
    }

    #[test]
    fn delta_merge_adds_budgets() {
        let a = Delta::single(&s("t"), [Permission::disseminate("G", Lambda::ONE)]);
        let b = a.union(&a);
        assert_eq!(
            b.get(&s("t")).unwrap().disseminate_budget(&s("G")),
            Lambda::fin(2)
        );
        assert!(a.leq(&b));
        assert!(!b.leq(&a));
    }

    #[test]
    fn star_raises_budgets() {
        let a = Delta::single(
            &s("t"),
            [Permission::disseminate("G", Lambda::ONE), Permission::Read],
        );
        let st = a.star();
        assert_eq!(
            st.get(&s("t")).unwrap().disseminate_budget(&s("G")),
            Some(Lambda::Omega)
        );
        assert!(st.get(&s("t")).unwrap().contains(&Permission::Read));
    }

    #[test]
    fn theta_leq_is_injective() {
        let e = FlatHierarchy::new(&["G"], [Permission::Read]);
        let one: Theta = [(s("t"), e.clone())].into_iter().collect();
        let two: Theta = [(s("t"), e.clone()), (s("t"), e)].into_iter().collect();
        assert!(one.leq(&two));
        assert!(!two.leq(&one));
    }

    #[test]
    fn theta_leq_needs_same_path() {
        let a: Theta = [(s("t"), FlatHierarchy::new(&["G"], []))]
            .into_iter()
            .collect();
        let b: Theta = [(s("t"), FlatHierarchy::new(&["H"], [Permission::Read]))]
            .into_iter()
            .collect();
        assert!(!a.leq(&b));
        assert!(Theta::new().leq(&b));
    }

    #[test]
    fn padding_fills_missing_types() {
        let a: Theta = [(s("t"), FlatHierarchy::new(&["G"], [Permission::Read]))]
            .into_iter()
            .collect();
        let p = a.padded([&s("t"), &s("u")]);
        assert_eq!(p.len(), 2);
        assert!(a.leq(&p) && p.leq(&a.padded([&s("t"), &s("u")])));
    }
}
