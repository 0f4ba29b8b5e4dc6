//! The space of models: orbits under the symmetry group, sections
//! (representational conventions) and the counterpart relations they induce.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ConfigSpace, FiniteGroup, GroupElement};

/// One configuration of every subsystem: a point of Xᴺ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Model {
    configs: Vec<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    tags: BTreeMap<String, String>,
}

impl Model {
    /// An unvalidated model; [`ModelSpace::validate`] checks it against a space.
    pub fn new(configs: Vec<usize>) -> Self {
        Model { configs, tags: BTreeMap::new() }
    }

    pub fn with_tag(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.tags.insert(key.into(), value.into());
        self
    }

    pub fn configs(&self) -> &[usize] {
        &self.configs
    }

    pub fn config(&self, subsystem: usize) -> usize {
        self.configs[subsystem]
    }

    pub fn tags(&self) -> &BTreeMap<String, String> {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }
}

impl From<Vec<usize>> for Model {
    fn from(configs: Vec<usize>) -> Self {
        Model::new(configs)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.configs.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Names an orbit by its lexicographically smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrbitLabel(Model);

impl OrbitLabel {
    pub fn canonical(&self) -> &Model {
        &self.0
    }

    pub fn into_model(self) -> Model {
        self.0
    }
}

impl fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub orbit: Model,
    pub representative: Model,
}

/// How a section picks the representative of an orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SectionRule {
    /// The model on the orbit in which `subsystem` sits at `point`:
    /// the reference frame of that subsystem.
    SubsystemAt { subsystem: usize, point: usize },
    /// The orbit label itself.
    Canonical,
    /// A seeded, orbit-dependent arbitrary choice.
    Scrambled { seed: u64 },
    /// Explicit orbit → representative table. Orbits are canonical labels,
    /// sorted.
    Table { entries: Vec<TableEntry> },
}

/// A representational convention: one representative model per orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub rule: SectionRule,
}

impl Section {
    /// The frame of `subsystem`: it sits at point 0 on every orbit.
    pub fn frame_of(subsystem: usize) -> Self {
        Section {
            name: format!("frame[{subsystem}]"),
            rule: SectionRule::SubsystemAt { subsystem, point: 0 },
        }
    }

    pub fn canonical() -> Self {
        Section { name: "canonical".into(), rule: SectionRule::Canonical }
    }

    pub fn scrambled(seed: u64) -> Self {
        Section { name: format!("scrambled[{seed:#x}]"), rule: SectionRule::Scrambled { seed } }
    }
}

/// N subsystems sharing one configuration space; the group acts diagonally.
#[derive(Clone, Debug)]
pub struct ModelSpace {
    space: ConfigSpace,
    subsystems: usize,
}

impl ModelSpace {
    pub fn new(space: ConfigSpace, subsystems: usize) -> Result<Self> {
        if subsystems == 0 {
            return Err(Error::InvalidModel("at least one subsystem required".into()));
        }
        Ok(ModelSpace { space, subsystems })
    }

    /// N particles on the periodic lattice Zₙ under rigid translations.
    pub fn translations(n: usize, subsystems: usize) -> Result<Self> {
        ModelSpace::new(ConfigSpace::translations(n)?, subsystems)
    }

    pub fn config_space(&self) -> &ConfigSpace {
        &self.space
    }

    pub fn group(&self) -> &FiniteGroup {
        self.space.group()
    }

    pub fn subsystems(&self) -> usize {
        self.subsystems
    }

    /// Builds and validates a model.
    pub fn model(&self, configs: impl Into<Vec<usize>>) -> Result<Model> {
        let m = Model::new(configs.into());
        self.validate(&m)?;
        Ok(m)
    }

    pub fn validate(&self, m: &Model) -> Result<()> {
        if m.len() != self.subsystems {
            return Err(Error::InvalidModel(format!(
                "model has {} subsystems, expected {}",
                m.len(),
                self.subsystems
            )));
        }
        if let Some(&x) = m.configs.iter().find(|&&x| !self.space.contains(x)) {
            return Err(Error::OutOfRange { index: x, size: self.space.size() });
        }
        Ok(())
    }

    pub fn act(&self, g: GroupElement, m: &Model) -> Result<Model> {
        self.group().check(g)?;
        self.validate(m)?;
        Ok(self.act_index(g.index(), m))
    }

    fn act_index(&self, g: usize, m: &Model) -> Model {
        Model {
            configs: m.configs.iter().map(|&x| self.space.act_index(g, x)).collect(),
            tags: m.tags.clone(),
        }
    }

    /// The lexicographically minimal model on the orbit of `m`.
    pub fn orbit_label(&self, m: &Model) -> Result<OrbitLabel> {
        self.validate(m)?;
        let best = (0..self.group().order())
            .map(|g| self.act_index(g, m))
            .min()
            .expect("groups are non-empty");
        Ok(OrbitLabel(best))
    }

    /// Every `g` with `g·m1 = m2`, in index order.
    pub fn relating_elements(&self, m1: &Model, m2: &Model) -> Result<Vec<GroupElement>> {
        self.validate(m1)?;
        self.validate(m2)?;
        Ok(self
            .group()
            .elements()
            .filter(|g| m1.tags == m2.tags && self.act_index(g.index(), m1).configs == m2.configs)
            .collect())
    }

    /// The unique `g` with `g·m1 = m2`, `None` if the models are on different
    /// orbits, or an ambiguity error when the tuple stabiliser is nontrivial.
    pub fn relating_element(&self, m1: &Model, m2: &Model) -> Result<Option<GroupElement>> {
        let mut candidates = self.relating_elements(m1, m2)?;
        match candidates.len() {
            0 => Ok(None),
            1 => Ok(candidates.pop()),
            _ => Err(Error::Ambiguous { candidates }),
        }
    }

    pub fn tuple_stabiliser(&self, m: &Model) -> Result<Vec<GroupElement>> {
        self.relating_elements(m, m)
    }

    /// The representative `section` picks on orbit `orbit`.
    pub fn representative(&self, section: &Section, orbit: &OrbitLabel) -> Result<Model> {
        let canonical = orbit.canonical();
        self.validate(canonical)?;
        let undefined = |reason: String| Error::SectionUndefined { section: section.name.clone(), reason };
        match &section.rule {
            SectionRule::Canonical => Ok(canonical.clone()),
            SectionRule::SubsystemAt { subsystem, point } => {
                if *subsystem >= self.subsystems {
                    return Err(Error::OutOfRange { index: *subsystem, size: self.subsystems });
                }
                let mut hits: Vec<Model> = (0..self.group().order())
                    .map(|g| self.act_index(g, canonical))
                    .filter(|m| m.configs[*subsystem] == *point)
                    .collect();
                hits.sort();
                hits.dedup();
                match hits.len() {
                    1 => Ok(hits.pop().unwrap()),
                    0 => Err(undefined(format!("subsystem {subsystem} never reaches point {point}"))),
                    k => Err(undefined(format!(
                        "{k} distinct models put subsystem {subsystem} at {point} (nontrivial stabiliser)"
                    ))),
                }
            }
            SectionRule::Scrambled { seed } => {
                let mut h = *seed;
                for &x in &canonical.configs {
                    h = splitmix64(h ^ x as u64);
                }
                let g = (h % self.group().order() as u64) as usize;
                Ok(self.act_index(g, canonical))
            }
            SectionRule::Table { entries } => entries
                .binary_search_by(|e| e.orbit.cmp(canonical))
                .map(|i| entries[i].representative.clone())
                .map_err(|_| undefined(format!("orbit {orbit} has no table entry"))),
        }
    }

    /// Builds an explicit-table section. Keys may be any member of their
    /// orbit; each value must lie on the same orbit as its key.
    pub fn table_section(
        &self,
        name: impl Into<String>,
        pairs: impl IntoIterator<Item = (Model, Model)>,
    ) -> Result<Section> {
        let mut map = BTreeMap::new();
        for (key, rep) in pairs {
            let orbit = self.orbit_label(&key)?;
            if self.orbit_label(&rep)? != orbit {
                return Err(Error::InvalidModel(format!("representative {rep} is not on the orbit of {key}")));
            }
            if let Some(prev) = map.insert(orbit.into_model(), rep.clone()) {
                if prev != rep {
                    return Err(Error::InvalidModel(format!("orbit of {key} given two representatives")));
                }
            }
        }
        let entries = map
            .into_iter()
            .map(|(orbit, representative)| TableEntry { orbit, representative })
            .collect();
        Ok(Section { name: name.into(), rule: SectionRule::Table { entries } })
    }

    /// Re-validates a section read from a document, canonicalising table keys.
    pub fn check_section(&self, section: &Section) -> Result<Section> {
        match &section.rule {
            SectionRule::Table { entries } => self.table_section(
                section.name.clone(),
                entries.iter().map(|e| (e.orbit.clone(), e.representative.clone())),
            ),
            SectionRule::SubsystemAt { subsystem, point } => {
                if *subsystem >= self.subsystems {
                    return Err(Error::OutOfRange { index: *subsystem, size: self.subsystems });
                }
                if !self.space.contains(*point) {
                    return Err(Error::OutOfRange { index: *point, size: self.space.size() });
                }
                Ok(section.clone())
            }
            _ => Ok(section.clone()),
        }
    }

    /// All `g` with `g·m = σ(orbit(m))`.
    pub fn lowering_candidates(&self, section: &Section, m: &Model) -> Result<Vec<GroupElement>> {
        let rep = self.representative(section, &self.orbit_label(m)?)?;
        self.relating_elements(m, &rep)
    }

    /// `g_σ(m)`: the element carrying `m` down to the section.
    pub fn lowering_element(&self, section: &Section, m: &Model) -> Result<GroupElement> {
        let mut candidates = self.lowering_candidates(section, m)?;
        match candidates.len() {
            1 => Ok(candidates.pop().unwrap()),
            0 => Err(Error::Unrelated),
            _ => Err(Error::Ambiguous { candidates }),
        }
    }

    /// `Counter_σ(m1, m2) = g_σ(m2)⁻¹ ∘ g_σ(m1)`.
    pub fn counter(&self, section: &Section, m1: &Model, m2: &Model) -> Result<GroupElement> {
        let g = self.group();
        let down1 = self.lowering_element(section, m1)?;
        let down2 = self.lowering_element(section, m2)?;
        g.compose(g.inverse(down2)?, down1)
    }

    /// The full counterpart set when lowering elements are not unique.
    pub fn counter_candidates(&self, section: &Section, m1: &Model, m2: &Model) -> Result<Vec<GroupElement>> {
        let g = self.group();
        let down1 = self.lowering_candidates(section, m1)?;
        let down2 = self.lowering_candidates(section, m2)?;
        let mut out = Vec::with_capacity(down1.len() * down2.len());
        for &b in &down2 {
            let b_inv = g.inverse(b)?;
            for &a in &down1 {
                out.push(g.compose(b_inv, a)?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// The element taking `σ(orbit)` to `σ̃(orbit)`; depends on the orbit.
    pub fn convention_change(&self, from: &Section, to: &Section, orbit: &OrbitLabel) -> Result<GroupElement> {
        let a = self.representative(from, orbit)?;
        let b = self.representative(to, orbit)?;
        self.relating_element(&a, &b)?.ok_or(Error::Unrelated)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::ActionRule;

    fn z16(n: usize) -> ModelSpace {
        ModelSpace::translations(16, n).unwrap()
    }

    /// Brute-force minimum over all shifts, independent of `orbit_label`.
    fn min_shift(n: usize, configs: &[usize]) -> Vec<usize> {
        (0..n).map(|s| configs.iter().map(|&x| (x + s) % n).collect::<Vec<_>>()).min().unwrap()
    }

    #[test]
    fn orbit_labels() {
        let sp = z16(2);
        let label = |c: [usize; 2]| sp.orbit_label(&sp.model(c).unwrap()).unwrap().into_model();
        assert_eq!(label([0, 3]).configs(), &[0, 3]);
        assert_eq!(label([13, 0]).configs(), &[0, 3]);
        assert_eq!(min_shift(16, &[13, 0]), vec![0, 3]);
        let one = z16(1);
        for x in 0..16 {
            assert_eq!(one.orbit_label(&one.model([x]).unwrap()).unwrap().canonical().configs(), &[0]);
        }
    }

    #[test]
    fn relating_element_examples() {
        let sp = z16(2);
        let m = |c: [usize; 2]| sp.model(c).unwrap();
        assert_eq!(sp.relating_element(&m([0, 3]), &m([5, 8])).unwrap().unwrap().index(), 5);
        assert_eq!(sp.relating_element(&m([7, 2]), &m([7, 2])).unwrap().unwrap(), sp.group().identity());
        assert_eq!(sp.relating_element(&m([0, 3]), &m([0, 4])).unwrap(), None);
    }

    #[test]
    fn relating_element_ambiguous_on_clock() {
        let clock = ConfigSpace::new(FiniteGroup::cyclic(24).unwrap(), ActionRule::Modular { modulus: 12 }).unwrap();
        let sp = ModelSpace::new(clock, 2).unwrap();
        let a = sp.model([1, 4]).unwrap();
        let b = sp.model([3, 6]).unwrap();
        match sp.relating_element(&a, &b) {
            Err(Error::Ambiguous { candidates }) => {
                let idx: Vec<usize> = candidates.iter().map(|g| g.index()).collect();
                assert_eq!(idx, vec![2, 14]);
            }
            other => panic!("expected ambiguity, got {other:?}"),
        }
        // subsystem-0 frame cannot pin a unique lowering element either
        let err = sp.lowering_element(&Section::frame_of(0), &a).unwrap_err();
        assert!(matches!(err, Error::Ambiguous { .. }), "{err:?}");
        assert_eq!(sp.counter_candidates(&Section::frame_of(0), &a, &b).unwrap().len(), 2);
    }

    #[test]
    fn lowering_elements() {
        let sp = z16(2);
        let frame0 = Section::frame_of(0);
        let on = sp.model([0, 7]).unwrap();
        assert_eq!(sp.lowering_element(&frame0, &on).unwrap(), sp.group().identity());
        let m = sp.model([5, 8]).unwrap();
        assert_eq!(sp.lowering_element(&frame0, &m).unwrap().index(), 11);
        let g = sp.group().element(9).unwrap();
        let moved = sp.act(g, &on).unwrap();
        assert_eq!(sp.lowering_element(&frame0, &moved).unwrap(), sp.group().inverse(g).unwrap());
    }

    #[test]
    fn counter_examples() {
        let sp = z16(2);
        let frame0 = Section::frame_of(0);
        let m1 = sp.model([5, 8]).unwrap();
        let m2 = sp.model([2, 9]).unwrap();
        // lowering elements 11 and 14; 14⁻¹ = 2; 2 + 11 = 13
        assert_eq!(sp.lowering_element(&frame0, &m2).unwrap().index(), 14);
        assert_eq!(sp.counter(&frame0, &m1, &m2).unwrap().index(), 13);

        let a = sp.model([0, 3]).unwrap();
        let b = sp.model([0, 13]).unwrap();
        assert_eq!(sp.counter(&frame0, &a, &b).unwrap(), sp.group().identity());

        let g = sp.group().element(6).unwrap();
        for s in [Section::frame_of(0), Section::frame_of(1), Section::canonical(), Section::scrambled(99)] {
            assert_eq!(sp.counter(&s, &m1, &sp.act(g, &m1).unwrap()).unwrap(), g);
        }
    }

    #[test]
    fn convention_change_is_orbit_dependent() {
        let sp = z16(2);
        let (f0, f1) = (Section::frame_of(0), Section::frame_of(1));
        let o = |c: [usize; 2]| sp.orbit_label(&sp.model(c).unwrap()).unwrap();
        assert_eq!(sp.convention_change(&f0, &f0, &o([0, 3])).unwrap(), sp.group().identity());
        assert_eq!(sp.convention_change(&f0, &f1, &o([0, 3])).unwrap().index(), 13);
        assert_eq!(sp.convention_change(&f0, &f1, &o([0, 5])).unwrap().index(), 11);
    }

    #[test]
    fn table_sections() {
        let sp = z16(2);
        let s = sp
            .table_section(
                "t",
                [
                    (sp.model([4, 7]).unwrap(), sp.model([10, 13]).unwrap()),
                    (sp.model([0, 1]).unwrap(), sp.model([2, 3]).unwrap()),
                ],
            )
            .unwrap();
        let rep = sp.representative(&s, &sp.orbit_label(&sp.model([9, 12]).unwrap()).unwrap()).unwrap();
        assert_eq!(rep.configs(), &[10, 13]);
        let missing = sp.orbit_label(&sp.model([0, 5]).unwrap()).unwrap();
        assert!(matches!(sp.representative(&s, &missing), Err(Error::SectionUndefined { .. })));
        assert!(sp.table_section("bad", [(sp.model([0, 1]).unwrap(), sp.model([0, 2]).unwrap())]).is_err());

        let json = serde_json::to_string(&s).unwrap();
        let back: Section = serde_json::from_str(&json).unwrap();
        assert_eq!(sp.check_section(&back).unwrap(), s);
    }

    #[test]
    fn invalid_models_rejected() {
        let sp = z16(2);
        assert!(sp.model([0, 16]).is_err());
        assert!(sp.model(vec![0]).is_err());
        assert!(ModelSpace::translations(4, 0).is_err());
    }
}
