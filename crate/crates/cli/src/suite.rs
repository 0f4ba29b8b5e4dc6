//! Seeded property campaigns.
//!
//! Each property draws its cases from its own ChaCha8 stream: the generator
//! is `ChaCha8Rng::seed_from_u64(seed)` with the stream id set to the 64-bit
//! FNV-1a hash of the property name. Adding or reordering properties never
//! changes another property's cases.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use qrf_core::model::TableEntry;
use qrf_core::spacetime::{
    apply_quantum_diffeo, build_comparison, definite_at, is_localised, qrf_change_to, transform_comparison,
};
use qrf_core::translation::relative_distance;
use qrf_core::{
    BranchGeometry, BranchState, Complex64, FiniteGroup, GeometrySuperposition, GroupElement, Model, ModelSpace,
    OrbitPolicy, Permutation, QuantumDiffeo, ReferenceFields, Section, SectionRule,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::report::{Check, RunReport};

/// The counterpart relation under test. Swappable so a broken variant can
/// be shown to produce a counterexample.
pub type CounterFn = fn(&ModelSpace, &Section, &Model, &Model) -> qrf_core::Result<GroupElement>;

pub fn reference_counter(space: &ModelSpace, s: &Section, m1: &Model, m2: &Model) -> qrf_core::Result<GroupElement> {
    space.counter(s, m1, m2)
}

/// `g(m2) ∘ g(m1)`: the counterpart relation with the inverse dropped.
pub fn counter_without_inverse(
    space: &ModelSpace,
    s: &Section,
    m1: &Model,
    m2: &Model,
) -> qrf_core::Result<GroupElement> {
    let g = space.group();
    g.compose(space.lowering_element(s, m2)?, space.lowering_element(s, m1)?)
}

type Outcome = Result<(), Value>;

struct Property {
    name: &'static str,
    run: fn(&mut ChaCha8Rng, CounterFn) -> Outcome,
}

const PROPERTIES: &[Property] = &[
    Property { name: "group_associativity", run: group_associativity },
    Property { name: "action_inverse", run: action_inverse },
    Property { name: "counter_identity", run: counter_identity },
    Property { name: "counter_on_section", run: counter_on_section },
    Property { name: "counter_recovers_element", run: counter_recovers_element },
    Property { name: "counter_composition", run: counter_composition },
    Property { name: "convention_change_conjugation", run: convention_change_conjugation },
    Property { name: "qrf_change_invariants", run: qrf_change_invariants },
    Property { name: "comparison_pullback_coherence", run: comparison_pullback_coherence },
    Property { name: "localisation_invariance", run: localisation_invariance },
    Property { name: "alignment_identity", run: alignment_identity },
    Property { name: "definiteness_invariance", run: definiteness_invariance },
];

pub fn property_names() -> Vec<&'static str> {
    PROPERTIES.iter().map(|p| p.name).collect()
}

fn fnv1a64(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// The generator for one property's cases.
pub fn property_rng(seed: u64, property: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a64(property));
    rng
}

pub fn verify_suite(seed: u64, cases: usize) -> CliResult<RunReport> {
    verify_suite_with(seed, cases, reference_counter)
}

/// Runs every property for `cases` cases and records pass counts and the
/// first counterexample of each.
pub fn verify_suite_with(seed: u64, cases: usize, counter: CounterFn) -> CliResult<RunReport> {
    verify_properties(seed, cases, &property_names(), counter)
}

/// Like [`verify_suite_with`], restricted to the named properties.
pub fn verify_properties(seed: u64, cases: usize, names: &[&str], counter: CounterFn) -> CliResult<RunReport> {
    if cases == 0 {
        return Err(CliError::validation("case count must be at least 1"));
    }
    if let Some(bad) = names.iter().find(|n| !PROPERTIES.iter().any(|p| p.name == **n)) {
        return Err(CliError::validation(format!("unknown property '{bad}'")));
    }
    let mut report = RunReport::new("property_suite");
    report.seed = Some(seed);
    for p in PROPERTIES.iter().filter(|p| names.contains(&p.name)) {
        let mut rng = property_rng(seed, p.name);
        let mut passed = 0usize;
        let mut witness = None;
        for case in 0..cases {
            match (p.run)(&mut rng, counter) {
                Ok(()) => passed += 1,
                Err(w) => {
                    if witness.is_none() {
                        witness = Some(json!({ "case": case, "input": w }));
                    }
                }
            }
        }
        let mut check = Check::new(format!("property:{}", p.name), passed == cases)
            .measure("cases", cases)
            .measure("passed", passed);
        check.witness = witness;
        report.push(check);
    }
    report.finish()
}

fn fail(what: &str, case: impl Serialize) -> Value {
    json!({ "violated": what, "case": case })
}

fn error(e: qrf_core::Error, case: impl Serialize) -> Value {
    json!({ "error": e.to_string(), "case": case })
}

macro_rules! tri {
    ($e:expr, $case:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return Err(error(e, &$case)),
        }
    };
}

// ---- groups ----

#[derive(Serialize)]
struct GroupCase {
    group: String,
    elements: [usize; 3],
}

fn random_group(rng: &mut ChaCha8Rng) -> FiniteGroup {
    static SYMMETRIC: OnceLock<Vec<FiniteGroup>> = OnceLock::new();
    if rng.random_bool(0.5) {
        FiniteGroup::cyclic(rng.random_range(1..=64)).expect("cyclic")
    } else {
        let groups = SYMMETRIC.get_or_init(|| (1..=5).map(|k| FiniteGroup::symmetric(k).expect("symmetric")).collect());
        groups[rng.random_range(0..groups.len())].clone()
    }
}

fn group_associativity(rng: &mut ChaCha8Rng, _: CounterFn) -> Outcome {
    let grp = random_group(rng);
    let idx = [0; 3].map(|_| rng.random_range(0..grp.order()));
    let case = GroupCase { group: grp.name().to_string(), elements: idx };
    let [a, b, c] = idx.map(|i| grp.element(i).expect("in range"));
    let l = tri!(grp.compose(a, b).and_then(|ab| grp.compose(ab, c)), case);
    let r = tri!(grp.compose(b, c).and_then(|bc| grp.compose(a, bc)), case);
    let e = grp.identity();
    let inv = tri!(grp.inverse(a).and_then(|ai| grp.compose(a, ai)), case);
    if l != r {
        return Err(fail("(a∘b)∘c = a∘(b∘c)", case));
    }
    if inv != e || tri!(grp.compose(e, a), case) != a {
        return Err(fail("identity and inverse", case));
    }
    Ok(())
}

fn action_inverse(rng: &mut ChaCha8Rng, _: CounterFn) -> Outcome {
    let n = rng.random_range(2..=64);
    let subsystems = rng.random_range(1..=4);
    let space = ModelSpace::translations(n, subsystems).expect("translations");
    let m = random_model(rng, n, subsystems);
    let g = rng.random_range(0..n);
    let case = json!({ "n": n, "model": m, "g": g });
    let grp = space.group();
    let g = grp.element(g).expect("in range");
    let back = tri!(space.act(g, &m).and_then(|gm| space.act(grp.inverse(g)?, &gm)), case);
    if back != m {
        return Err(fail("act(g⁻¹, act(g, m)) = m", case));
    }
    Ok(())
}

// ---- counterpart relations ----

#[derive(Serialize)]
struct CounterCase {
    n: usize,
    subsystems: usize,
    section: Section,
    models: Vec<Vec<usize>>,
    elements: Vec<usize>,
}

fn random_model(rng: &mut ChaCha8Rng, n: usize, subsystems: usize) -> Model {
    Model::new((0..subsystems).map(|_| rng.random_range(0..n)).collect())
}

/// A random section over Zₙ translations: canonical, scrambled, a particle
/// frame, or an explicit table over the orbits of `models`.
fn random_section(rng: &mut ChaCha8Rng, space: &ModelSpace, models: &[Model]) -> Section {
    match rng.random_range(0..4) {
        0 => Section::canonical(),
        1 => Section::scrambled(rng.random()),
        2 => Section::frame_of(rng.random_range(0..space.subsystems())),
        _ => {
            let n = space.group().order();
            let pairs: Vec<(Model, Model)> = models
                .iter()
                .map(|m| {
                    let g = space.group().element(rng.random_range(0..n)).expect("in range");
                    (m.clone(), space.act(g, m).expect("valid model"))
                })
                .collect();
            // models sharing an orbit must share a representative
            let mut seen: Vec<(Model, Model)> = Vec::new();
            let mut entries = Vec::new();
            for (key, rep) in pairs {
                let orbit = space.orbit_label(&key).expect("valid").into_model();
                match seen.iter().find(|(o, _)| *o == orbit) {
                    Some(_) => {}
                    None => {
                        seen.push((orbit.clone(), rep.clone()));
                        entries.push(TableEntry { orbit, representative: rep });
                    }
                }
            }
            entries.sort_by(|a, b| a.orbit.cmp(&b.orbit));
            Section { name: "random_table".into(), rule: SectionRule::Table { entries } }
        }
    }
}

/// Zₙ (n ≤ 64) on N ≤ 4 particles, three models, two group elements and a
/// section defined on every orbit involved.
fn counter_case(rng: &mut ChaCha8Rng, orbit_mates: bool) -> (ModelSpace, CounterCase, Vec<Model>, Vec<GroupElement>) {
    let n = rng.random_range(2..=64);
    let subsystems = rng.random_range(1..=4);
    let space = ModelSpace::translations(n, subsystems).expect("translations");
    let elements: Vec<usize> = (0..2).map(|_| rng.random_range(0..n)).collect();
    let grp = space.group().clone();
    let gs: Vec<GroupElement> = elements.iter().map(|&i| grp.element(i).expect("in range")).collect();
    let m1 = random_model(rng, n, subsystems);
    let mut models = vec![m1.clone()];
    if orbit_mates {
        models.push(space.act(gs[0], &m1).expect("valid"));
        models.push(space.act(gs[1], &m1).expect("valid"));
    } else {
        models.push(random_model(rng, n, subsystems));
        models.push(random_model(rng, n, subsystems));
    }
    // tables also cover orbits reached by acting on the models
    let section = random_section(rng, &space, &models);
    let case = CounterCase {
        n,
        subsystems,
        section,
        models: models.iter().map(|m| m.configs().to_vec()).collect(),
        elements,
    };
    (space, case, models, gs)
}

fn counter_identity(rng: &mut ChaCha8Rng, counter: CounterFn) -> Outcome {
    let (space, case, models, _) = counter_case(rng, false);
    for m in &models {
        if tri!(counter(&space, &case.section, m, m), case) != space.group().identity() {
            return Err(fail("counter(s, m, m) = e", case));
        }
    }
    Ok(())
}

fn counter_on_section(rng: &mut ChaCha8Rng, counter: CounterFn) -> Outcome {
    let (space, case, models, _) = counter_case(rng, false);
    let reps: Vec<Model> = tri!(
        models
            .iter()
            .map(|m| space.representative(&case.section, &space.orbit_label(m)?))
            .collect::<qrf_core::Result<Vec<_>>>(),
        case
    );
    for a in &reps {
        for b in &reps {
            if tri!(counter(&space, &case.section, a, b), case) != space.group().identity() {
                return Err(fail("counter on section representatives = e", case));
            }
        }
    }
    Ok(())
}

fn counter_recovers_element(rng: &mut ChaCha8Rng, counter: CounterFn) -> Outcome {
    let (space, case, models, gs) = counter_case(rng, false);
    let gm = tri!(space.act(gs[0], &models[0]), case);
    if tri!(counter(&space, &case.section, &models[0], &gm), case) != gs[0] {
        return Err(fail("counter(s, m, act(g, m)) = g", case));
    }
    Ok(())
}

fn counter_composition(rng: &mut ChaCha8Rng, counter: CounterFn) -> Outcome {
    let mates = rng.random_bool(0.5);
    let (space, case, models, _) = counter_case(rng, mates);
    let grp = space.group();
    let s = &case.section;
    let (m1, m2, m3) = (&models[0], &models[1], &models[2]);
    let direct = tri!(counter(&space, s, m1, m3), case);
    let via = tri!(
        counter(&space, s, m2, m3).and_then(|b| grp.compose(b, counter(&space, s, m1, m2)?)),
        case
    );
    if direct != via {
        return Err(fail("counter(m1, m3) = counter(m2, m3) ∘ counter(m1, m2)", case));
    }
    Ok(())
}

fn convention_change_conjugation(rng: &mut ChaCha8Rng, counter: CounterFn) -> Outcome {
    let (space, case, models, _) = counter_case(rng, false);
    let t = random_section(rng, &space, &models);
    let case = json!({ "case": case, "target_section": t });
    let s: Section = serde_json::from_value(case["case"]["section"].clone()).expect("round trip");
    let grp = space.group();
    let (m1, m2) = (&models[0], &models[1]);
    let rebuilt = tri!(
        (|| {
            let c1 = space.convention_change(&s, &t, &space.orbit_label(m1)?)?;
            let c2 = space.convention_change(&s, &t, &space.orbit_label(m2)?)?;
            let l1 = space.lowering_element(&s, m1)?;
            let l2 = space.lowering_element(&s, m2)?;
            grp.compose(grp.inverse(l2)?, grp.compose(grp.inverse(c2)?, grp.compose(c1, l1)?)?)
        })(),
        case
    );
    if tri!(counter(&space, &t, m1, m2), case) != rebuilt {
        return Err(fail("counter under the new section = conjugated old counter", case));
    }
    Ok(())
}

// ---- branch states ----

fn qrf_change_invariants(rng: &mut ChaCha8Rng, _: CounterFn) -> Outcome {
    let n = rng.random_range(4..=32);
    let subsystems = rng.random_range(2..=4);
    let space = ModelSpace::translations(n, subsystems).expect("translations");
    let old = rng.random_range(0..subsystems);
    let new = rng.random_range(0..subsystems);
    let (from, to) = (Section::frame_of(old), Section::frame_of(new));
    let count = rng.random_range(1..=4);
    let mut seen = BTreeSet::new();
    let mut entries = Vec::new();
    for _ in 0..count {
        let m = random_model(rng, n, subsystems);
        let amp = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let orbit = space.orbit_label(&m).expect("valid");
        if seen.insert(orbit.clone()) {
            entries.push((amp, space.representative(&from, &orbit).expect("regular action")));
        }
    }
    let case = json!({
        "n": n,
        "old_frame": old,
        "new_frame": new,
        "branches": entries.iter().map(|(a, m)| json!([a.re, a.im, m])).collect::<Vec<_>>(),
    });
    let st = tri!(BranchState::superpose(&space, entries, OrbitPolicy::RejectSameOrbit), case);
    let moved = tri!(st.qrf_change(&from, &to), case);
    if (moved.norm_sqr() - 1.0).abs() > 1e-9 {
        return Err(fail("norm preserved", case));
    }
    if !moved.frame_factorizes(new) {
        return Err(fail("new frame factorizes", case));
    }
    for (a, b) in st.branches().iter().zip(moved.branches()) {
        if a.orbit() != b.orbit() {
            return Err(fail("orbit labels preserved", case));
        }
        for i in 0..subsystems {
            for j in 0..subsystems {
                if relative_distance(n, &a.model, i, j) != relative_distance(n, &b.model, i, j) {
                    return Err(fail("relative distances preserved", case));
                }
            }
        }
    }
    let back = tri!(moved.qrf_change(&to, &from), case);
    if !back.approx_eq(&st, 1e-12) {
        return Err(fail("qrf_change round trip", case));
    }
    Ok(())
}

// ---- spacetimes ----

#[derive(Serialize)]
struct SpacetimeCase {
    points: usize,
    fields: [Vec<usize>; 2],
    observables: [Vec<f64>; 2],
    diffeo: [Vec<usize>; 2],
}

fn shuffled(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

fn tuple(x: usize) -> [i64; 4] {
    let x = x as i64;
    [x % 5, x / 5, 2 * x + 1, -x]
}

/// Two branches of ≤ 64 points with permuted injective fields, observables
/// drawn from a small value set, and a random quantum diffeo.
fn spacetime_case(rng: &mut ChaCha8Rng) -> (GeometrySuperposition, QuantumDiffeo, SpacetimeCase) {
    let n = rng.random_range(1..=64);
    let fields = [shuffled(rng, n), shuffled(rng, n)];
    let observables = [0, 1].map(|_| (0..n).map(|_| rng.random_range(0..3) as f64 * 0.5).collect::<Vec<_>>());
    let diffeo = [shuffled(rng, n), shuffled(rng, n)];
    let branch = |f: &[usize], o: &[f64]| {
        BranchGeometry::new(n)
            .with_fields("chi", ReferenceFields::unit(f.iter().map(|&x| tuple(x)).collect()))
            .and_then(|g| g.with_observable("o", o.to_vec()))
            .expect("consistent sizes")
    };
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let s = GeometrySuperposition::new(vec![
        (amp, branch(&fields[0], &observables[0])),
        (amp, branch(&fields[1], &observables[1])),
    ])
    .expect("normalisable");
    let d = QuantumDiffeo::new(diffeo.iter().map(|v| Permutation::from_images(v.clone()).expect("perm")).collect());
    (s, d, SpacetimeCase { points: n, fields, observables, diffeo })
}

fn comparison_pullback_coherence(rng: &mut ChaCha8Rng, _: CounterFn) -> Outcome {
    let (s, d, case) = spacetime_case(rng);
    let c = tri!(build_comparison(&s.branches()[0].1, &s.branches()[1].1, "chi"), case);
    let moved = tri!(apply_quantum_diffeo(&s, &d), case);
    let rebuilt = tri!(build_comparison(&moved.branches()[0].1, &moved.branches()[1].1, "chi"), case);
    if tri!(transform_comparison(&c, &d), case) != rebuilt {
        return Err(fail("transform_comparison = build_comparison on pulled-back fields", case));
    }
    let (o, o2) = (tri!(s.branches()[0].1.observable("o"), case), tri!(moved.branches()[0].1.observable("o"), case));
    if (0..case.points).any(|p| o2[d.perms()[0].apply(p)] != o[p]) {
        return Err(fail("scalar values ride along with their points", case));
    }
    Ok(())
}

fn localisation_invariance(rng: &mut ChaCha8Rng, _: CounterFn) -> Outcome {
    let (s, d, case) = spacetime_case(rng);
    let c = tri!(build_comparison(&s.branches()[0].1, &s.branches()[1].1, "chi"), case);
    let c2 = tri!(transform_comparison(&c, &d), case);
    let (d1, d2) = (&d.perms()[0], &d.perms()[1]);
    let n = case.points;
    for p in 0..n {
        for q in [c.apply(p).expect("total"), (p * 31 + 7) % n] {
            if is_localised(p, q, &c) != is_localised(d1.apply(p), d2.apply(q), &c2) {
                return Err(fail("localisation preserved by quantum diffeos", json!({ "case": case, "p": p, "q": q })));
            }
        }
    }
    Ok(())
}

fn alignment_identity(rng: &mut ChaCha8Rng, _: CounterFn) -> Outcome {
    let (s, _, case) = spacetime_case(rng);
    let target_order = shuffled(rng, case.points);
    let target = ReferenceFields::unit(target_order.iter().map(|&x| tuple(x)).collect());
    let case = json!({ "case": case, "target": target_order });
    let out = tri!(qrf_change_to(&s, "chi", &target), case);
    if !out.comparison().is_some_and(|c| c.is_identity()) {
        return Err(fail("aligned comparison is the identity", case));
    }
    for (_, g) in out.superposition.branches() {
        if tri!(g.fields("chi"), case) != &target {
            return Err(fail("aligned fields equal the target", case));
        }
    }
    Ok(())
}

fn definiteness_invariance(rng: &mut ChaCha8Rng, _: CounterFn) -> Outcome {
    let (s, d, case) = spacetime_case(rng);
    let (g1, g2) = (&s.branches()[0].1, &s.branches()[1].1);
    let c = tri!(build_comparison(g1, g2, "chi"), case);
    let moved = tri!(apply_quantum_diffeo(&s, &d), case);
    let (h1, h2) = (&moved.branches()[0].1, &moved.branches()[1].1);
    let c2 = tri!(transform_comparison(&c, &d), case);
    for p in 0..case.points {
        let q = c.apply(p).expect("total");
        let before = tri!(definite_at("o", p, q, &c, g1, g2), case);
        let after = tri!(definite_at("o", d.perms()[0].apply(p), d.perms()[1].apply(q), &c2, h1, h2), case);
        if before != after {
            return Err(fail("definiteness preserved by quantum diffeos", json!({ "case": case, "p": p })));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    #[test]
    fn small_run_passes() {
        let r = verify_suite(1, 100).unwrap();
        assert!(r.passed(), "{:#?}", r.checks.iter().filter(|c| c.status == Status::Fail).collect::<Vec<_>>());
        assert_eq!(r.checks.len(), PROPERTIES.len());
    }

    #[test]
    fn zero_cases_rejected() {
        assert!(matches!(verify_suite(1, 0), Err(CliError::Validation(_))));
    }

    #[test]
    fn mutant_counter_is_caught() {
        let r = verify_suite_with(7, 50, counter_without_inverse).unwrap();
        let c = r.check("property:counter_recovers_element").unwrap();
        assert_eq!(c.status, Status::Fail);
        assert!(c.witness.is_some());
        // properties that do not use the counter still pass
        assert_eq!(r.check("property:group_associativity").unwrap().status, Status::Pass);
    }

    #[test]
    fn streams_are_per_property() {
        let mut a = property_rng(5, "x");
        let mut b = property_rng(5, "y");
        let mut a2 = property_rng(5, "x");
        let (x, y, x2): (u64, u64, u64) = (a.random(), b.random(), a2.random());
        assert_eq!(x, x2);
        assert_ne!(x, y);
    }
}
