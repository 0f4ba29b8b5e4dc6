use std::collections::BTreeMap;
use std::time::Instant;

use qrf_core::spacetime::{
    build_comparison, detect_degenerate_frame, dress, find_events, localisation_scan, qrf_change_to,
    OBSERVABLE_TOLERANCE,
};
use qrf_core::translation::{
    build_earth_particle, mass_frame_direct, relative_distance, three_particle_report, to_mass_frame, MASS, PROBE,
};
use qrf_core::{BranchState, GeometrySuperposition};

use crate::config::{amplitude, Scenario, ScenarioConfig};
use crate::error::CliResult;
use crate::report::{Check, RunReport, Table};
use crate::suite::verify_suite;

/// Amplitude agreement for reproduced states.
pub const AMPLITUDE_TOLERANCE: f64 = 1e-12;
pub const ENTROPY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Replaces the seed of seeded scenarios.
    pub seed_override: Option<u64>,
    /// Adds wall-clock timings to the report.
    pub timings: bool,
}

pub fn run_scenario(config: &ScenarioConfig) -> CliResult<RunReport> {
    run_scenario_with(config, RunOptions::default())
}

pub fn run_scenario_with(config: &ScenarioConfig, opts: RunOptions) -> CliResult<RunReport> {
    config.validate()?;
    let start = Instant::now();
    let mut report = match &config.scenario {
        Scenario::TranslationTwoBody { .. } => two_body(config)?,
        Scenario::TranslationThreeBody { lattice_size, positions, alpha, beta } => {
            three_body(*lattice_size, *positions, *alpha, *beta)?
        }
        Scenario::SpacetimeSuperposition { .. } => spacetime(config)?,
        Scenario::PropertySuite { seed, cases } => verify_suite(opts.seed_override.unwrap_or(*seed), *cases)?,
    };
    if opts.timings {
        report.timings_ms = Some(BTreeMap::from([("total".to_string(), start.elapsed().as_secs_f64() * 1e3)]));
    }
    Ok(report)
}

fn state_table(table: &mut Table, frame: &str, st: &BranchState) {
    for (i, b) in st.branches().iter().enumerate() {
        let configs: Vec<String> = b.model.configs().iter().map(usize::to_string).collect();
        table.push(vec![
            frame.to_string(),
            i.to_string(),
            b.amplitude.re.to_string(),
            b.amplitude.im.to_string(),
            configs.join(" "),
        ]);
    }
}

fn max_amplitude_error(a: &BranchState, b: &BranchState) -> Option<f64> {
    if a.len() != b.len() || a.branches().iter().zip(b.branches()).any(|(x, y)| x.model != y.model) {
        return None;
    }
    Some(a.branches().iter().zip(b.branches()).map(|(x, y)| (x.amplitude - y.amplitude).norm()).fold(0.0, f64::max))
}

fn two_body(config: &ScenarioConfig) -> CliResult<RunReport> {
    let sc = config.translation_two_body()?;
    let n = sc.lattice_size;
    let probe = build_earth_particle(&sc)?;
    let mass = to_mass_frame(&probe, &sc)?;
    let direct = mass_frame_direct(&sc)?;
    let mut r = RunReport::new("translation_two_body");

    let err = max_amplitude_error(&mass, &direct);
    r.push(
        Check::new("mass_frame_reproduction", err.is_some_and(|e| e <= AMPLITUDE_TOLERANCE))
            .measure("configurations_match", err.is_some())
            .measure("max_amplitude_error", err)
            .tolerance(AMPLITUDE_TOLERANCE),
    );

    let distances = |st: &BranchState| -> Vec<i64> {
        st.branches().iter().map(|b| relative_distance(n, &b.model, MASS, PROBE)).collect()
    };
    let (before, after) = (distances(&probe), distances(&mass));
    r.push(
        Check::new("relative_distance_invariant", before == after)
            .measure("probe_frame", &before)
            .measure("mass_frame", &after),
    );

    let flips = probe.frame_factorizes(PROBE)
        && !probe.frame_factorizes(MASS)
        && mass.frame_factorizes(MASS)
        && !mass.frame_factorizes(PROBE);
    r.push(
        Check::new("superposition_frame_dependence", flips)
            .measure("probe_frame_mass_definite", probe.frame_factorizes(MASS))
            .measure("mass_frame_probe_definite", mass.frame_factorizes(PROBE)),
    );

    let back = mass.qrf_change(&qrf_core::Section::frame_of(MASS), &qrf_core::Section::frame_of(PROBE))?;
    r.push(Check::new("qrf_change_round_trip", back.approx_eq(&probe, AMPLITUDE_TOLERANCE)).tolerance(AMPLITUDE_TOLERANCE));

    let mut table = Table::new(&["frame", "branch", "re", "im", "configuration"]);
    state_table(&mut table, "probe", &probe);
    state_table(&mut table, "mass", &mass);
    r.tables.insert("states".into(), table);
    r.artifact("probe_frame", probe.to_document());
    r.artifact("mass_frame", mass.to_document());
    r.finish()
}

fn binary_entropy(p: f64) -> f64 {
    [p, 1.0 - p].iter().filter(|&&x| x > 0.0).map(|x| -x * x.log2()).sum()
}

fn three_body(n: usize, positions: [[usize; 3]; 2], alpha: [f64; 2], beta: [f64; 2]) -> CliResult<RunReport> {
    let (alpha, beta) = (amplitude(alpha), amplitude(beta));
    let rep = three_particle_report(n, positions, alpha, beta)?;
    let mut r = RunReport::new("translation_three_body");
    let (f1, f2) = (&rep.frames[0], &rep.frames[1]);
    r.push(
        Check::new("frame1_product_state", f1.entropy_bits.abs() <= ENTROPY_TOLERANCE)
            .measure("entropy_bits", f1.entropy_bits)
            .tolerance(ENTROPY_TOLERANCE),
    );
    // two branches with distinct particle-3 positions in frame 2 give the
    // binary entropy of the branch weights; equal positions give 0
    let p = alpha.norm_sqr() / (alpha.norm_sqr() + beta.norm_sqr());
    let distinct = f2.branches.len() == 2
        && f2.branches.iter().map(|b| b.positions[f2.entropy_subsystem - 1]).collect::<std::collections::BTreeSet<_>>().len() == 2;
    let expected = if distinct { binary_entropy(p) } else { 0.0 };
    r.push(
        Check::new("frame2_entropy_matches_weights", (f2.entropy_bits - expected).abs() <= ENTROPY_TOLERANCE)
            .measure("entropy_bits", f2.entropy_bits)
            .measure("expected_bits", expected)
            .tolerance(ENTROPY_TOLERANCE),
    );
    let mut table = Table::new(&["frame", "branch", "re", "im", "q1", "q2", "q3"]);
    for f in &rep.frames {
        for b in &f.branches {
            let mut row = vec![f.frame.to_string(), b.branch.to_string(), b.amplitude[0].to_string(), b.amplitude[1].to_string()];
            row.extend(b.positions.iter().map(i64::to_string));
            table.push(row);
        }
    }
    r.tables.insert("positions".into(), table);
    r.artifact("three_particle_report", &rep);
    r.finish()
}

fn spacetime(config: &ScenarioConfig) -> CliResult<RunReport> {
    let Scenario::SpacetimeSuperposition { field, alt_field, observables, worldlines, reference_model, .. } =
        &config.scenario
    else {
        unreachable!("dispatched on kind")
    };
    let s: GeometrySuperposition = config.superposition()?;
    let mut r = RunReport::new("spacetime_superposition");
    r.artifact("reference_model", reference_model);
    r.artifact("comparison_base_branch", 0);

    let fields: Vec<&String> = std::iter::once(field).chain(alt_field).collect();
    let mut perfect = BTreeMap::new();
    for f in &fields {
        let groups: Vec<_> = s
            .branches()
            .iter()
            .map(|(_, g)| detect_degenerate_frame(g.fields(f).expect("validated")).groups)
            .collect();
        let ok = groups.iter().all(Vec::is_empty);
        perfect.insert(f.to_string(), ok);
        r.push(Check::new(format!("perfect_frame:{f}"), ok).measure("degenerate_groups", &groups));
    }
    if !perfect[field.as_str()] {
        return r.finish();
    }

    let g1 = &s.branches()[0].1;
    let mut comparisons = Vec::new();
    for (i, (_, g)) in s.branches().iter().enumerate().skip(1) {
        match build_comparison(g1, g, field) {
            Ok(c) => {
                r.push(
                    Check::new(format!("comparison:{field}:0->{i}"), true)
                        .measure("map", c.pairs())
                        .measure("is_identity", c.is_identity()),
                );
                comparisons.push(c);
            }
            Err(e) => r.push(Check::new(format!("comparison:{field}:0->{i}"), false).detail(e.to_string())),
        }
    }
    if comparisons.len() + 1 != s.len() {
        return r.finish();
    }

    if let Some(alt) = alt_field.as_ref().filter(|a| perfect[a.as_str()]) {
        match qrf_change_to(&s, alt, g1.fields(alt).expect("validated")) {
            Ok(aligned) => {
                let all_identity = aligned.comparisons.iter().all(|c| c.is_identity());
                let superposed = aligned
                    .superposition
                    .branches()
                    .windows(2)
                    .any(|w| w[0].1.fields(field).ok() != w[1].1.fields(field).ok());
                r.push(
                    Check::new(format!("alignment_identity:{alt}"), all_identity)
                        .measure("diffeo", aligned.diffeo.perms().iter().map(|p| p.images().to_vec()).collect::<Vec<_>>())
                        .measure(&format!("{field}_superposed_after"), superposed),
                );
            }
            Err(e) => r.push(Check::new(format!("alignment_identity:{alt}"), false).detail(e.to_string())),
        }
        if s.len() == 2 {
            let scan = localisation_scan(&s, field, alt)?;
            let mut table = Table::new(&["point", "counterpart", "localised_chi", "localised_chi_tilde"]);
            for row in &scan {
                table.push(vec![
                    row.point.to_string(),
                    row.counterpart.to_string(),
                    row.localised_chi.to_string(),
                    row.localised_chi_tilde.to_string(),
                ]);
            }
            let delocalised = scan.iter().filter(|row| !row.localised_chi_tilde).count();
            r.push(
                Check::new("localisation_scan", scan.iter().all(|row| row.localised_chi))
                    .measure("points", scan.len())
                    .measure("delocalised_under_alt", delocalised),
            );
            r.tables.insert("localisation".into(), table);
        }
    }

    if !observables.is_empty() {
        let mut table = Table::new(&["observable", "point", "counterpart", "branch1_value", "branch2_value", "definite"]);
        let c = &comparisons[0];
        let g2 = &s.branches()[1].1;
        for o in observables {
            let (o1, o2) = (g1.observable(o).expect("validated"), g2.observable(o).expect("validated"));
            let mut definite = 0;
            for (p, &q) in c.pairs().iter().enumerate() {
                let d = (o1[p] - o2[q]).abs() <= OBSERVABLE_TOLERANCE;
                definite += d as usize;
                table.push(vec![o.clone(), p.to_string(), q.to_string(), o1[p].to_string(), o2[q].to_string(), d.to_string()]);
            }
            // dressing checks every branch against the base branch
            let dressed = dress(&s, o, field)?;
            let mut all_definite = 0;
            for x in dressed.domain(0) {
                all_definite += dressed.is_definite(x)? as usize;
            }
            r.push(
                Check::new(format!("dressed:{o}:{field}"), true)
                    .measure("definite_points_branch1", definite)
                    .measure("definite_points_all_branches", all_definite)
                    .measure("points", c.len())
                    .tolerance(OBSERVABLE_TOLERANCE),
            );
        }
        r.tables.insert("points".into(), table);
    }

    if let Some([a, b]) = worldlines {
        let g2 = &s.branches()[1].1;
        match find_events(g1, g2, a, b) {
            Ok(events) => {
                let localised = events.iter().filter(|e| comparisons[0].apply(e.first) == Some(e.second)).count();
                r.push(
                    Check::new(format!("events:{a}x{b}"), true)
                        .measure("events", events.iter().map(|e| [e.first, e.second]).collect::<Vec<_>>())
                        .measure("localised_under_field", localised),
                );
            }
            Err(e) => r.push(Check::new(format!("events:{a}x{b}"), false).detail(e.to_string())),
        }
    }
    r.finish()
}
