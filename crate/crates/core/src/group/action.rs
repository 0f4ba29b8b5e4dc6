use serde::{Deserialize, Serialize};

use super::{FiniteGroup, GroupElement, Kind};
use crate::error::{Error, Result};

/// How the group moves the points of a [`ConfigSpace`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ActionRule {
    /// Left multiplication of the group on its own elements.
    Regular,
    /// A cyclic group Zₙ acting on Zₘ by addition mod m; requires m | n.
    Modular { modulus: usize },
    /// Every element fixes every point.
    Trivial { points: usize },
    /// A permutation group acting on the points it permutes.
    Natural,
    /// Explicit table, `table[g][x] = g·x`.
    Table { table: Vec<Vec<usize>> },
}

/// A finite set of configurations `0..size` with a left group action.
#[derive(Clone, Debug)]
pub struct ConfigSpace {
    group: FiniteGroup,
    size: usize,
    rule: ActionRule,
}

impl ConfigSpace {
    pub fn new(group: FiniteGroup, rule: ActionRule) -> Result<Self> {
        let size = match &rule {
            ActionRule::Regular => group.order(),
            ActionRule::Modular { modulus } => {
                if !group.is_cyclic_rule() {
                    return Err(Error::InvalidAction("modular action needs a cyclic group".into()));
                }
                if *modulus == 0 || !group.order().is_multiple_of(*modulus) {
                    return Err(Error::InvalidAction(format!(
                        "Z{} does not act on Z{modulus} by addition",
                        group.order()
                    )));
                }
                *modulus
            }
            ActionRule::Trivial { points } => *points,
            ActionRule::Natural => match &group.inner.kind {
                Kind::Permutation { perms, .. } => perms[0].degree(),
                _ => return Err(Error::InvalidAction("natural action needs a permutation group".into())),
            },
            ActionRule::Table { table } => {
                if table.len() != group.order() {
                    return Err(Error::InvalidAction(format!(
                        "table has {} rows for a group of order {}",
                        table.len(),
                        group.order()
                    )));
                }
                table.first().map_or(0, Vec::len)
            }
        };
        let space = ConfigSpace { group, size, rule };
        if let ActionRule::Table { table } = &space.rule {
            space.validate_table(table)?;
        }
        Ok(space)
    }

    /// Zₙ acting on itself by addition: the lattice of translations.
    pub fn translations(n: usize) -> Result<Self> {
        ConfigSpace::new(FiniteGroup::cyclic(n)?, ActionRule::Regular)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rule(&self) -> &ActionRule {
        &self.rule
    }

    pub fn contains(&self, x: usize) -> bool {
        x < self.size
    }

    pub fn act(&self, g: GroupElement, x: usize) -> Result<usize> {
        self.group.check(g)?;
        if x >= self.size {
            return Err(Error::OutOfRange { index: x, size: self.size });
        }
        Ok(self.act_index(g.index(), x))
    }

    pub(crate) fn act_index(&self, g: usize, x: usize) -> usize {
        match &self.rule {
            ActionRule::Regular => self.group.compose_index(g, x),
            ActionRule::Modular { modulus } => (g + x) % modulus,
            ActionRule::Trivial { .. } => x,
            ActionRule::Natural => match &self.group.inner.kind {
                Kind::Permutation { perms, .. } => perms[g].apply(x),
                _ => unreachable!("validated at construction"),
            },
            ActionRule::Table { table } => table[g][x],
        }
    }

    /// The stabiliser subgroup `{h : h·x = x}`, in index order.
    pub fn stabiliser(&self, x: usize) -> Result<Vec<GroupElement>> {
        if x >= self.size {
            return Err(Error::OutOfRange { index: x, size: self.size });
        }
        Ok(self.group.elements().filter(|h| self.act_index(h.index(), x) == x).collect())
    }

    /// Points reachable from `x`, sorted.
    pub fn orbit(&self, x: usize) -> Result<Vec<usize>> {
        if x >= self.size {
            return Err(Error::OutOfRange { index: x, size: self.size });
        }
        let mut hit = vec![false; self.size];
        for g in 0..self.group.order() {
            hit[self.act_index(g, x)] = true;
        }
        Ok((0..self.size).filter(|&y| hit[y]).collect())
    }

    pub fn is_transitive(&self) -> bool {
        self.size == 0 || self.orbit(0).map(|o| o.len() == self.size).unwrap_or(false)
    }

    /// Transitive and free: the carrier of a perfect reference frame.
    pub fn is_regular(&self) -> bool {
        // transitive + |G| = |X| forces every stabiliser to be trivial
        self.size > 0 && self.is_transitive() && self.group.order() == self.size
    }

    fn validate_table(&self, table: &[Vec<usize>]) -> Result<()> {
        let n = self.size;
        for (g, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidAction(format!("row {g} has length {}", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&y| y >= n) {
                return Err(Error::OutOfRange { index: bad, size: n });
            }
        }
        let e = self.group.identity().index();
        if let Some(x) = (0..n).find(|&x| table[e][x] != x) {
            return Err(Error::InvalidAction(format!("identity moves point {x}")));
        }
        let order = self.group.order();
        for g in 0..order {
            for h in 0..order {
                let gh = self.group.compose_index(g, h);
                if let Some(x) = (0..n).find(|&x| table[g][table[h][x]] != table[gh][x]) {
                    return Err(Error::InvalidAction(format!(
                        "g·(h·x) ≠ (g∘h)·x for g={g}, h={h}, x={x}"
                    )));
                }
            }
        }
        Ok(())
    }
}
