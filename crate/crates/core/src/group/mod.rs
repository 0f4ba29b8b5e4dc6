//! Exact finite groups and their actions on finite configuration spaces.
//!
//! Elements are indices into the group's element list. Small groups
//! (`order ≤ TABLE_LIMIT`) built from tables or permutation generators carry
//! an explicit multiplication table; larger permutation groups compose the
//! underlying permutations on demand. Cyclic groups are always rule-backed.

mod action;
mod perm;

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use action::{ActionRule, ConfigSpace};
pub use perm::Permutation;

use crate::error::{Error, Result};

/// Largest order for which a full multiplication table is materialised.
pub const TABLE_LIMIT: usize = 4096;

/// Largest permutation group we are willing to enumerate.
pub const ENUMERATION_LIMIT: usize = 1 << 18;

/// Associativity is checked exhaustively up to this order, sampled above it.
const EXHAUSTIVE_CHECK_LIMIT: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupId(u64);

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G#{:016x}", self.0)
    }
}

/// An element of a particular [`FiniteGroup`].
///
/// Comparing elements of different groups is a category error: `==` and the
/// ordering operators panic on it. Use [`GroupElement::try_eq`] for a
/// fallible comparison.
#[derive(Clone, Copy, Debug)]
pub struct GroupElement {
    group: GroupId,
    index: usize,
}

impl GroupElement {
    pub fn group_id(&self) -> GroupId {
        self.group
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn try_eq(&self, other: &GroupElement) -> Result<bool> {
        if self.group != other.group {
            return Err(Error::GroupMismatch { left: self.group, right: other.group });
        }
        Ok(self.index == other.index)
    }
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        match self.try_eq(other) {
            Ok(eq) => eq,
            Err(e) => panic!("{e}"),
        }
    }
}

impl Eq for GroupElement {}

impl std::hash::Hash for GroupElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.group.hash(state);
        self.index.hash(state);
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        assert_eq!(self.group, other.group, "ordering elements of different groups");
        self.index.cmp(&other.index)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index)
    }
}

enum Kind {
    Cyclic,
    Table {
        table: Vec<u32>,
        inverses: Vec<u32>,
        identity: usize,
    },
    Permutation {
        perms: Vec<Permutation>,
        lookup: HashMap<Permutation, usize>,
        table: Option<Vec<u32>>,
        inverses: Vec<u32>,
    },
}

struct Inner {
    id: GroupId,
    name: String,
    order: usize,
    kind: Kind,
}

/// A finite group with exact composition. Cheap to clone; clones share storage.
#[derive(Clone)]
pub struct FiniteGroup {
    inner: Arc<Inner>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.inner.name)
            .field("order", &self.inner.order)
            .field("id", &self.inner.id)
            .finish()
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.inner.id == other.inner.id
    }
}

impl Eq for FiniteGroup {}

fn fingerprint<T: Hash>(value: &T) -> GroupId {
    let mut h = DefaultHasher::new();
    value.hash(&mut h);
    GroupId(h.finish())
}

impl FiniteGroup {
    /// The cyclic group Zₙ; element `k` is the residue `k`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("cyclic group of order 0".into()));
        }
        Ok(FiniteGroup {
            inner: Arc::new(Inner {
                id: fingerprint(&("cyclic", n)),
                name: format!("Z{n}"),
                order: n,
                kind: Kind::Cyclic,
            }),
        })
    }

    /// Builds a group from an explicit multiplication table,
    /// `table[g][h] = g ∘ h`, validating the group axioms.
    pub fn from_table(table: Vec<Vec<usize>>, identity: usize) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if n > TABLE_LIMIT {
            return Err(Error::InvalidGroup(format!("table order {n} exceeds {TABLE_LIMIT}")));
        }
        if identity >= n {
            return Err(Error::OutOfRange { index: identity, size: n });
        }
        let mut flat = Vec::with_capacity(n * n);
        for (g, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {g} has length {}", row.len())));
            }
            for &gh in row {
                if gh >= n {
                    return Err(Error::OutOfRange { index: gh, size: n });
                }
                flat.push(gh as u32);
            }
        }
        let at = |g: usize, h: usize| flat[g * n + h] as usize;
        for g in 0..n {
            if at(identity, g) != g || at(g, identity) != g {
                return Err(Error::InvalidGroup(format!("{identity} is not an identity for {g}")));
            }
        }
        let inverses = (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| at(g, h) == identity && at(h, g) == identity)
                    .map(|h| h as u32)
                    .ok_or_else(|| Error::InvalidGroup(format!("element {g} has no inverse")))
            })
            .collect::<Result<Vec<u32>>>()?;
        check_associative(n, at).map_err(Error::InvalidGroup)?;
        Ok(FiniteGroup {
            inner: Arc::new(Inner {
                id: fingerprint(&("table", identity, &flat)),
                name: format!("Table{n}"),
                order: n,
                kind: Kind::Table { table: flat, inverses, identity },
            }),
        })
    }

    /// The permutation group generated by `generators` on `degree` points.
    ///
    /// Elements are indexed in lexicographic order of their image tables, so
    /// the identity is always index 0.
    pub fn permutations(degree: usize, generators: &[Permutation]) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidGroup("permutation degree 0".into()));
        }
        for g in generators {
            if g.degree() != degree {
                return Err(Error::InvalidGroup(format!(
                    "generator {g} has degree {}, expected {degree}",
                    g.degree()
                )));
            }
        }
        let id = Permutation::identity(degree);
        let mut seen: std::collections::HashSet<Permutation> = [id.clone()].into_iter().collect();
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in generators {
                let q = g.compose(&p);
                if seen.insert(q.clone()) {
                    if seen.len() > ENUMERATION_LIMIT {
                        return Err(Error::InvalidGroup(format!(
                            "generated group exceeds {ENUMERATION_LIMIT} elements"
                        )));
                    }
                    queue.push_back(q);
                }
            }
        }
        let mut perms: Vec<Permutation> = seen.into_iter().collect();
        perms.sort();
        let lookup: HashMap<Permutation, usize> =
            perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let n = perms.len();
        let inverses = perms.iter().map(|p| lookup[&p.inverse()] as u32).collect();
        let table = (n <= TABLE_LIMIT).then(|| {
            let mut flat = Vec::with_capacity(n * n);
            for g in &perms {
                for h in &perms {
                    flat.push(lookup[&g.compose(h)] as u32);
                }
            }
            flat
        });
        Ok(FiniteGroup {
            inner: Arc::new(Inner {
                id: fingerprint(&("perm", degree, &perms)),
                name: format!("Perm{degree}[{n}]"),
                order: n,
                kind: Kind::Permutation { perms, lookup, table, inverses },
            }),
        })
    }

    /// The full symmetric group on `degree` points.
    pub fn symmetric(degree: usize) -> Result<Self> {
        let mut gens = Vec::new();
        if degree >= 2 {
            gens.push(Permutation::from_cycles(degree, &[[0, 1]])?);
            let cycle: Vec<usize> = (0..degree).collect();
            gens.push(Permutation::from_cycles(degree, &[cycle])?);
        }
        FiniteGroup::permutations(degree, &gens)
    }

    pub fn id(&self) -> GroupId {
        self.inner.id
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn order(&self) -> usize {
        self.inner.order
    }

    pub fn is_cyclic_rule(&self) -> bool {
        matches!(self.inner.kind, Kind::Cyclic)
    }

    /// Whether composition is backed by a materialised table.
    pub fn has_table(&self) -> bool {
        match &self.inner.kind {
            Kind::Cyclic => false,
            Kind::Table { .. } => true,
            Kind::Permutation { table, .. } => table.is_some(),
        }
    }

    pub fn identity(&self) -> GroupElement {
        let index = match &self.inner.kind {
            Kind::Table { identity, .. } => *identity,
            _ => 0,
        };
        self.wrap(index)
    }

    pub fn element(&self, index: usize) -> Result<GroupElement> {
        if index >= self.inner.order {
            return Err(Error::OutOfRange { index, size: self.inner.order });
        }
        Ok(self.wrap(index))
    }

    pub fn elements(&self) -> impl ExactSizeIterator<Item = GroupElement> + '_ {
        (0..self.inner.order).map(|i| self.wrap(i))
    }

    /// The underlying permutation, for permutation groups.
    pub fn permutation(&self, g: GroupElement) -> Result<Option<&Permutation>> {
        self.check(g)?;
        Ok(match &self.inner.kind {
            Kind::Permutation { perms, .. } => Some(&perms[g.index]),
            _ => None,
        })
    }

    /// Looks up the element corresponding to a permutation.
    pub fn element_of(&self, p: &Permutation) -> Option<GroupElement> {
        match &self.inner.kind {
            Kind::Permutation { lookup, .. } => lookup.get(p).map(|&i| self.wrap(i)),
            _ => None,
        }
    }

    /// Group product `g ∘ h`.
    pub fn compose(&self, g: GroupElement, h: GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.wrap(self.compose_index(g.index, h.index)))
    }

    pub fn inverse(&self, g: GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        let n = self.inner.order;
        let index = match &self.inner.kind {
            Kind::Cyclic => (n - g.index) % n,
            Kind::Table { inverses, .. } | Kind::Permutation { inverses, .. } => {
                inverses[g.index] as usize
            }
        };
        Ok(self.wrap(index))
    }

    /// Checks that `g` belongs to this group.
    pub fn check(&self, g: GroupElement) -> Result<()> {
        if g.group != self.inner.id {
            return Err(Error::GroupMismatch { left: self.inner.id, right: g.group });
        }
        debug_assert!(g.index < self.inner.order);
        Ok(())
    }

    pub(crate) fn compose_index(&self, g: usize, h: usize) -> usize {
        let n = self.inner.order;
        match &self.inner.kind {
            Kind::Cyclic => (g + h) % n,
            Kind::Table { table, .. } => table[g * n + h] as usize,
            Kind::Permutation { perms, lookup, table, .. } => match table {
                Some(t) => t[g * n + h] as usize,
                None => lookup[&perms[g].compose(&perms[h])],
            },
        }
    }

    fn wrap(&self, index: usize) -> GroupElement {
        GroupElement { group: self.inner.id, index }
    }
}

/// Exhaustive scan for small orders, a deterministic stride sample otherwise.
fn check_associative(n: usize, at: impl Fn(usize, usize) -> usize) -> std::result::Result<(), String> {
    let triples: Box<dyn Iterator<Item = (usize, usize, usize)>> = if n <= EXHAUSTIVE_CHECK_LIMIT {
        Box::new((0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c)))))
    } else {
        // 7919, 104729 and 1299709 are primes; the stride walks all residues.
        Box::new((0..20_000usize).map(move |k| (k * 7919 % n, k * 104_729 % n, k * 1_299_709 % n)))
    };
    for (a, b, c) in triples {
        if at(at(a, b), c) != at(a, at(b, c)) {
            return Err(format!("composition is not associative at ({a}, {b}, {c})"));
        }
    }
    Ok(())
}
