//! Superpositions of discretised spacetimes.
//!
//! A branch geometry is a finite set of point labels carrying scalar
//! observables, sets of four reference fields and worldlines. Reference
//! fields identify points across branches: the comparison map sends `p` to
//! the `q` where the field tuples agree. A quantum diffeomorphism relabels
//! the points of each branch by its own permutation and drags every field,
//! observable and worldline along.

pub mod curvature;

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use curvature::{curvature_fields, curvature_scenario, CurvatureScenario};

use crate::error::{Error, Result};
use crate::group::Permutation;
use crate::qstate::{NORM_TOLERANCE, PRUNE_THRESHOLD};

/// Observables compare equal within this tolerance.
pub const OBSERVABLE_TOLERANCE: f64 = 1e-12;

/// Four reference-field readings at one point, as integers in units of the
/// field set's scale.
pub type FieldTuple = [i64; 4];

/// Four scalar fields read jointly: point → 4-tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceFields {
    scale: i64,
    values: Vec<FieldTuple>,
}

impl ReferenceFields {
    /// `values[p]` is the reading at point `p`; the real value is `values[p] / scale`.
    pub fn new(scale: i64, values: Vec<FieldTuple>) -> Result<Self> {
        if scale <= 0 {
            return Err(Error::InvalidGeometry(format!("field scale {scale} must be positive")));
        }
        Ok(ReferenceFields { scale, values })
    }

    pub fn unit(values: Vec<FieldTuple>) -> Self {
        ReferenceFields { scale: 1, values }
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn values(&self) -> &[FieldTuple] {
        &self.values
    }

    pub fn value(&self, p: usize) -> Option<&FieldTuple> {
        self.values.get(p)
    }

    pub fn value_f64(&self, p: usize) -> Option<[f64; 4]> {
        let s = self.scale as f64;
        self.values.get(p).map(|v| v.map(|x| x as f64 / s))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_injective(&self) -> bool {
        detect_degenerate_frame(self).is_perfect()
    }

    /// tuple → point; fails on repeated tuples.
    fn inverse(&self, name: &str) -> Result<HashMap<FieldTuple, usize>> {
        let report = detect_degenerate_frame(self);
        if !report.is_perfect() {
            return Err(Error::DegenerateFrame { field: name.to_string(), groups: report.groups });
        }
        Ok(self.values.iter().enumerate().map(|(p, &v)| (v, p)).collect())
    }

    /// Pulls the fields back along `d`, so that the new reading at `d(p)`
    /// equals the old reading at `p`.
    pub fn pull_back(&self, d: &Permutation) -> ReferenceFields {
        let mut values = self.values.clone();
        for (p, v) in self.values.iter().enumerate() {
            values[d.apply(p)] = *v;
        }
        ReferenceFields { scale: self.scale, values }
    }
}

/// Groups of points sharing a field tuple. Empty iff the frame is perfect.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub groups: Vec<Vec<usize>>,
}

impl DegeneracyReport {
    pub fn is_perfect(&self) -> bool {
        self.groups.is_empty()
    }
}

/// Buckets points by field tuple and reports every bucket with ≥ 2 points.
pub fn detect_degenerate_frame(fields: &ReferenceFields) -> DegeneracyReport {
    let mut buckets: BTreeMap<FieldTuple, Vec<usize>> = BTreeMap::new();
    for (p, v) in fields.values.iter().enumerate() {
        buckets.entry(*v).or_default().push(p);
    }
    let mut groups: Vec<Vec<usize>> = buckets.into_values().filter(|g| g.len() > 1).collect();
    groups.sort();
    DegeneracyReport { groups }
}

/// One branch: points `0..point_count` with fields, observables, worldlines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchGeometry {
    point_count: usize,
    scalar_observables: BTreeMap<String, Vec<f64>>,
    field_sets: BTreeMap<String, ReferenceFields>,
    worldlines: BTreeMap<String, Vec<usize>>,
}

impl BranchGeometry {
    pub fn new(point_count: usize) -> Self {
        BranchGeometry {
            point_count,
            scalar_observables: BTreeMap::new(),
            field_sets: BTreeMap::new(),
            worldlines: BTreeMap::new(),
        }
    }

    pub fn with_fields(mut self, name: impl Into<String>, fields: ReferenceFields) -> Result<Self> {
        let name = name.into();
        if fields.len() != self.point_count {
            return Err(Error::InvalidGeometry(format!(
                "field set '{name}' has {} values for {} points",
                fields.len(),
                self.point_count
            )));
        }
        self.field_sets.insert(name, fields);
        Ok(self)
    }

    pub fn with_observable(mut self, name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.len() != self.point_count {
            return Err(Error::InvalidGeometry(format!(
                "observable '{name}' has {} values for {} points",
                values.len(),
                self.point_count
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGeometry(format!("observable '{name}' is not finite")));
        }
        self.scalar_observables.insert(name, values);
        Ok(self)
    }

    pub fn with_worldline(mut self, name: impl Into<String>, points: Vec<usize>) -> Result<Self> {
        if let Some(&p) = points.iter().find(|&&p| p >= self.point_count) {
            return Err(Error::OutOfRange { index: p, size: self.point_count });
        }
        self.worldlines.insert(name.into(), points);
        Ok(self)
    }

    /// Re-checks every invariant; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        let mut copy = BranchGeometry::new(self.point_count);
        for (k, f) in &self.field_sets {
            ReferenceFields::new(f.scale, Vec::new())?;
            copy = copy.with_fields(k.clone(), f.clone())?;
        }
        for (k, o) in &self.scalar_observables {
            copy = copy.with_observable(k.clone(), o.clone())?;
        }
        for (k, w) in &self.worldlines {
            copy = copy.with_worldline(k.clone(), w.clone())?;
        }
        Ok(())
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn fields(&self, name: &str) -> Result<&ReferenceFields> {
        self.field_sets.get(name).ok_or_else(|| Error::MissingField(name.to_string()))
    }

    pub fn observable(&self, name: &str) -> Result<&[f64]> {
        self.scalar_observables
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingObservable(name.to_string()))
    }

    pub fn worldline(&self, name: &str) -> Result<&[usize]> {
        self.worldlines
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingWorldline(name.to_string()))
    }

    pub fn field_names(&self) -> impl Iterator<Item = &str> {
        self.field_sets.keys().map(String::as_str)
    }

    pub fn observable_names(&self) -> impl Iterator<Item = &str> {
        self.scalar_observables.keys().map(String::as_str)
    }

    pub fn worldline_names(&self) -> impl Iterator<Item = &str> {
        self.worldlines.keys().map(String::as_str)
    }

    /// The geometry after relabelling points by `d`: everything that sat at
    /// `p` now sits at `d(p)`.
    pub fn pull_back(&self, d: &Permutation) -> Result<BranchGeometry> {
        if d.degree() != self.point_count {
            return Err(Error::ArityMismatch { expected: self.point_count, found: d.degree() });
        }
        let scalar_observables = self
            .scalar_observables
            .iter()
            .map(|(k, vals)| {
                let mut out = vals.clone();
                for (p, &v) in vals.iter().enumerate() {
                    out[d.apply(p)] = v;
                }
                (k.clone(), out)
            })
            .collect();
        let field_sets = self.field_sets.iter().map(|(k, f)| (k.clone(), f.pull_back(d))).collect();
        let worldlines = self
            .worldlines
            .iter()
            .map(|(k, w)| (k.clone(), w.iter().map(|&p| d.apply(p)).collect()))
            .collect();
        Ok(BranchGeometry { point_count: self.point_count, scalar_observables, field_sets, worldlines })
    }

    pub fn to_document(&self) -> Result<GeometryDocument> {
        let mut scale = None;
        for (k, f) in &self.field_sets {
            match scale {
                None => scale = Some(f.scale),
                Some(s) if s != f.scale => {
                    return Err(Error::InvalidGeometry(format!("field set '{k}' uses scale {} not {s}", f.scale)))
                }
                _ => {}
            }
        }
        Ok(GeometryDocument {
            point_count: self.point_count,
            field_scale: scale.unwrap_or(1),
            field_sets: self.field_sets.iter().map(|(k, f)| (k.clone(), f.values.clone())).collect(),
            observables: self.scalar_observables.clone(),
            worldlines: self.worldlines.clone(),
        })
    }

    pub fn from_document(doc: &GeometryDocument) -> Result<BranchGeometry> {
        let mut g = BranchGeometry::new(doc.point_count);
        for (k, v) in &doc.field_sets {
            g = g.with_fields(k.clone(), ReferenceFields::new(doc.field_scale, v.clone())?)?;
        }
        for (k, v) in &doc.observables {
            g = g.with_observable(k.clone(), v.clone())?;
        }
        for (k, v) in &doc.worldlines {
            g = g.with_worldline(k.clone(), v.clone())?;
        }
        Ok(g)
    }
}

/// On-disk form of a branch geometry. Field tuples are integers in units of
/// `1 / field_scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryDocument {
    pub point_count: usize,
    #[serde(default = "one")]
    pub field_scale: i64,
    #[serde(default)]
    pub field_sets: BTreeMap<String, Vec<FieldTuple>>,
    #[serde(default)]
    pub observables: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub worldlines: BTreeMap<String, Vec<usize>>,
}

fn one() -> i64 {
    1
}

/// Normalised superposition of branch geometries sharing one point count.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometrySuperposition {
    branches: Vec<(Complex64, BranchGeometry)>,
}

impl GeometrySuperposition {
    pub fn new(branches: Vec<(Complex64, BranchGeometry)>) -> Result<Self> {
        let first = branches.first().ok_or(Error::Empty)?.1.point_count;
        if let Some((_, g)) = branches.iter().find(|(_, g)| g.point_count != first) {
            return Err(Error::InvalidGeometry(format!(
                "branches have {} and {} points",
                first, g.point_count
            )));
        }
        let norm = branches.iter().map(|(a, _)| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let branches: Vec<_> = branches
            .into_iter()
            .map(|(a, g)| (a / norm, g))
            .filter(|(a, _)| a.norm() > PRUNE_THRESHOLD)
            .collect();
        let s = GeometrySuperposition { branches };
        debug_assert!((s.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
        Ok(s)
    }

    pub fn branches(&self) -> &[(Complex64, BranchGeometry)] {
        &self.branches
    }

    pub fn geometry(&self, i: usize) -> Result<&BranchGeometry> {
        self.branches
            .get(i)
            .map(|(_, g)| g)
            .ok_or(Error::OutOfRange { index: i, size: self.branches.len() })
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn point_count(&self) -> usize {
        self.branches[0].1.point_count
    }

    pub fn norm_sqr(&self) -> f64 {
        self.branches.iter().map(|(a, _)| a.norm_sqr()).sum()
    }

    /// Comparison maps from branch 0 to every other branch, induced by `field`.
    pub fn comparisons_to_base(&self, field: &str) -> Result<Vec<ComparisonMap>> {
        let base = &self.branches[0].1;
        self.branches[1..].iter().map(|(_, g)| build_comparison(base, g, field)).collect()
    }
}

/// A bijection from the points of one branch to those of another.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonMap {
    pairs: Vec<usize>,
    provenance: String,
}

impl ComparisonMap {
    pub fn identity(point_count: usize, provenance: impl Into<String>) -> Self {
        ComparisonMap { pairs: (0..point_count).collect(), provenance: provenance.into() }
    }

    pub fn from_pairs(pairs: Vec<usize>, provenance: impl Into<String>) -> Result<Self> {
        Permutation::from_images(pairs.clone())?;
        Ok(ComparisonMap { pairs, provenance: provenance.into() })
    }

    /// `pairs()[p]` is the counterpart of `p`.
    pub fn pairs(&self) -> &[usize] {
        &self.pairs
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn apply(&self, p: usize) -> Option<usize> {
        self.pairs.get(p).copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.iter().enumerate().all(|(p, &q)| p == q)
    }
}

/// One permutation of point labels per branch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumDiffeo {
    perms: Vec<Permutation>,
}

impl QuantumDiffeo {
    pub fn new(perms: Vec<Permutation>) -> Self {
        QuantumDiffeo { perms }
    }

    pub fn identity(branches: usize, point_count: usize) -> Self {
        QuantumDiffeo { perms: vec![Permutation::identity(point_count); branches] }
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn branch(&self, i: usize) -> Option<&Permutation> {
        self.perms.get(i)
    }

    pub fn is_identity(&self) -> bool {
        self.perms.iter().all(Permutation::is_identity)
    }
}

/// `C = (χ⁽²⁾)⁻¹ ∘ χ⁽¹⁾`: `p ↦ q` iff the named fields agree at `p` and `q`.
pub fn build_comparison(g1: &BranchGeometry, g2: &BranchGeometry, field: &str) -> Result<ComparisonMap> {
    let f1 = g1.fields(field)?;
    let f2 = g2.fields(field)?;
    if f1.scale != f2.scale {
        return Err(Error::InvalidGeometry(format!(
            "field set '{field}' uses scales {} and {}",
            f1.scale, f2.scale
        )));
    }
    let inv1 = f1.inverse(field)?;
    let inv2 = f2.inverse(field)?;
    let mut unmatched: Vec<FieldTuple> = f1
        .values
        .iter()
        .filter(|v| !inv2.contains_key(*v))
        .chain(f2.values.iter().filter(|v| !inv1.contains_key(*v)))
        .copied()
        .collect();
    if !unmatched.is_empty() {
        unmatched.sort();
        unmatched.dedup();
        return Err(Error::ValueSetMismatch { unmatched });
    }
    let pairs = f1.values.iter().map(|v| inv2[v]).collect();
    Ok(ComparisonMap { pairs, provenance: field.to_string() })
}

/// Applies `d⁽ⁱ⁾` in branch `i`, dragging all fields, observables and worldlines.
pub fn apply_quantum_diffeo(s: &GeometrySuperposition, d: &QuantumDiffeo) -> Result<GeometrySuperposition> {
    if d.perms.len() != s.len() {
        return Err(Error::ArityMismatch { expected: s.len(), found: d.perms.len() });
    }
    let branches = s
        .branches
        .iter()
        .zip(&d.perms)
        .map(|((a, g), p)| Ok((*a, g.pull_back(p)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GeometrySuperposition { branches })
}

/// `C' = d⁽²⁾ ∘ C ∘ (d⁽¹⁾)⁻¹`.
pub fn transform_comparison(c: &ComparisonMap, d: &QuantumDiffeo) -> Result<ComparisonMap> {
    let [d1, d2] = d.perms.as_slice() else {
        return Err(Error::ArityMismatch { expected: 2, found: d.perms.len() });
    };
    for p in [d1, d2] {
        if p.degree() != c.len() {
            return Err(Error::ArityMismatch { expected: c.len(), found: p.degree() });
        }
    }
    let mut pairs = vec![0; c.len()];
    for (p, &q) in c.pairs.iter().enumerate() {
        pairs[d1.apply(p)] = d2.apply(q);
    }
    Ok(ComparisonMap { pairs, provenance: c.provenance.clone() })
}

/// Result of changing to the frame of a field set.
#[derive(Clone, Debug)]
pub struct FrameAlignment {
    pub superposition: GeometrySuperposition,
    /// The per-branch relabelling that was applied.
    pub diffeo: QuantumDiffeo,
    /// Branch-0-to-branch-i comparison maps in the new frame; all identities.
    pub comparisons: Vec<ComparisonMap>,
}

impl FrameAlignment {
    /// The branch 0 → branch 1 map.
    pub fn comparison(&self) -> Option<&ComparisonMap> {
        self.comparisons.first()
    }
}

/// Moves into the frame of `field`: a quantum diffeomorphism that makes the
/// named fields equal `target` in every branch, then the comparison map they
/// induce, which is the identity.
pub fn qrf_change_to(s: &GeometrySuperposition, field: &str, target: &ReferenceFields) -> Result<FrameAlignment> {
    let target_inv = target.inverse("target")?;
    let mut perms = Vec::with_capacity(s.len());
    for (_, g) in &s.branches {
        let f = g.fields(field)?;
        if f.len() != target.len() {
            return Err(Error::ArityMismatch { expected: target.len(), found: f.len() });
        }
        if f.scale != target.scale {
            return Err(Error::InvalidGeometry(format!(
                "field set '{field}' uses scale {} but the target uses {}",
                f.scale, target.scale
            )));
        }
        let inv = f.inverse(field)?;
        let mut unmatched: Vec<FieldTuple> = f
            .values
            .iter()
            .filter(|v| !target_inv.contains_key(*v))
            .chain(target.values.iter().filter(|v| !inv.contains_key(*v)))
            .copied()
            .collect();
        if !unmatched.is_empty() {
            unmatched.sort();
            unmatched.dedup();
            return Err(Error::ValueSetMismatch { unmatched });
        }
        perms.push(Permutation::from_images(f.values.iter().map(|v| target_inv[v]).collect())?);
    }
    let diffeo = QuantumDiffeo::new(perms);
    let superposition = apply_quantum_diffeo(s, &diffeo)?;
    let comparisons = superposition.comparisons_to_base(field)?;
    debug_assert!(comparisons.iter().all(ComparisonMap::is_identity));
    Ok(FrameAlignment { superposition, diffeo, comparisons })
}

/// `(p, q)` is localised under `c` iff `q = c(p)`.
pub fn is_localised(p: usize, q: usize, c: &ComparisonMap) -> bool {
    c.apply(p) == Some(q)
}

/// The k-th crossing of two worldlines in each branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventCandidate {
    pub first: usize,
    pub second: usize,
}

/// Points of `line_a` also visited by `line_b`, in `line_a` order.
pub fn crossings(g: &BranchGeometry, line_a: &str, line_b: &str) -> Result<Vec<usize>> {
    let a = g.worldline(line_a)?;
    let b = g.worldline(line_b)?;
    let mut out: Vec<usize> = Vec::new();
    for &p in a {
        if b.contains(&p) && !out.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Pairs worldline crossings across two branches, in worldline order.
pub fn find_events(g1: &BranchGeometry, g2: &BranchGeometry, line_a: &str, line_b: &str) -> Result<Vec<EventCandidate>> {
    let c1 = crossings(g1, line_a, line_b)?;
    let c2 = crossings(g2, line_a, line_b)?;
    if c1.len() != c2.len() {
        return Err(Error::CrossingCountMismatch { first: c1.len(), second: c2.len() });
    }
    Ok(c1.into_iter().zip(c2).map(|(first, second)| EventCandidate { first, second }).collect())
}

/// `O⁽ⁱ⁾ ∘ (χ⁽ⁱ⁾)⁻¹` for every branch: an observable indexed by field values.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationalObservable {
    pub observable: String,
    pub field: String,
    per_branch: Vec<BTreeMap<FieldTuple, f64>>,
}

impl RelationalObservable {
    pub fn branches(&self) -> usize {
        self.per_branch.len()
    }

    pub fn evaluate(&self, branch: usize, x: &FieldTuple) -> Result<f64> {
        let map = self
            .per_branch
            .get(branch)
            .ok_or(Error::OutOfRange { index: branch, size: self.per_branch.len() })?;
        map.get(x).copied().ok_or(Error::OutsideImage(*x))
    }

    /// The value in every branch at field reading `x`.
    pub fn profile(&self, x: &FieldTuple) -> Result<Vec<f64>> {
        (0..self.per_branch.len()).map(|b| self.evaluate(b, x)).collect()
    }

    /// Whether all branches agree at `x` (base-branch comparison).
    pub fn is_definite(&self, x: &FieldTuple) -> Result<bool> {
        let values = self.profile(x)?;
        Ok(values.iter().all(|v| (v - values[0]).abs() <= OBSERVABLE_TOLERANCE))
    }

    /// The field readings where the observable is defined, shared by all branches.
    pub fn domain(&self, branch: usize) -> impl Iterator<Item = &FieldTuple> {
        self.per_branch.get(branch).into_iter().flat_map(|m| m.keys())
    }
}

pub fn dress(s: &GeometrySuperposition, observable: &str, field: &str) -> Result<RelationalObservable> {
    let per_branch = s
        .branches
        .iter()
        .map(|(_, g)| {
            let o = g.observable(observable)?;
            let f = g.fields(field)?;
            f.inverse(field)?;
            Ok(f.values.iter().zip(o).map(|(v, &x)| (*v, x)).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RelationalObservable { observable: observable.into(), field: field.into(), per_branch })
}

/// Whether `observable` takes the same value at the localised pair `(p, q)`.
pub fn definite_at(
    observable: &str,
    p: usize,
    q: usize,
    c: &ComparisonMap,
    g1: &BranchGeometry,
    g2: &BranchGeometry,
) -> Result<bool> {
    if !is_localised(p, q, c) {
        return Err(Error::NotLocalised { p, q });
    }
    let o1 = g1.observable(observable)?;
    let o2 = g2.observable(observable)?;
    let (a, b) = match (o1.get(p), o2.get(q)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::OutOfRange { index: p.max(q), size: o1.len().min(o2.len()) }),
    };
    Ok((a - b).abs() <= OBSERVABLE_TOLERANCE)
}

/// One row of a localisation scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalisationRow {
    /// Point of branch 0 in the original description.
    pub point: usize,
    /// Its counterpart in branch 1 under the first field set.
    pub counterpart: usize,
    /// Localised under the first field set's comparison after the frame change.
    pub localised_chi: bool,
    /// Localised under the second field set's comparison after the frame change.
    pub localised_chi_tilde: bool,
}

/// For every point `p` of branch 0 and its `chi`-counterpart `q`, changes to
/// the frame of `chi_tilde` (aligned to branch 0's readings) and reports
/// whether `(d⁽¹⁾(p), d⁽²⁾(q))` is localised under each field set.
pub fn localisation_scan(s: &GeometrySuperposition, chi: &str, chi_tilde: &str) -> Result<Vec<LocalisationRow>> {
    if s.len() != 2 {
        return Err(Error::ArityMismatch { expected: 2, found: s.len() });
    }
    let (g1, g2) = (s.geometry(0)?, s.geometry(1)?);
    let c_chi = build_comparison(g1, g2, chi)?;
    let aligned = qrf_change_to(s, chi_tilde, g1.fields(chi_tilde)?)?;
    let c_chi_moved = transform_comparison(&c_chi, &aligned.diffeo)?;
    let c_tilde = aligned.comparison().cloned().expect("two branches");
    let (d1, d2) = (&aligned.diffeo.perms[0], &aligned.diffeo.perms[1]);
    Ok(c_chi
        .pairs
        .iter()
        .enumerate()
        .map(|(p, &q)| {
            let (p2, q2) = (d1.apply(p), d2.apply(q));
            LocalisationRow {
                point: p,
                counterpart: q,
                localised_chi: is_localised(p2, q2, &c_chi_moved),
                localised_chi_tilde: is_localised(p2, q2, &c_tilde),
            }
        })
        .collect())
}
