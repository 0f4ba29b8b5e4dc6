//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use qrf_cli::suite::{reference_counter, verify_properties};
use qrf_core::spacetime::curvature::{FIELD_R, FIELD_R_TILDE, RIEM2, WEYL2};
use qrf_core::spacetime::{
    apply_quantum_diffeo, build_comparison, curvature_scenario, definite_at, dress, is_localised, qrf_change_to,
    transform_comparison,
};
use qrf_core::translation::{build_earth_particle, mass_frame_direct, relative_distance, three_particle_report, to_mass_frame};
use qrf_core::{
    BranchGeometry, BranchState, Complex64, GeometrySuperposition, ModelSpace, OrbitPolicy, Permutation,
    QuantumDiffeo, ReferenceFields, Section, TranslationScenario,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_241_018;

const AMPLITUDE_TOL: f64 = 1e-12;
const ENTROPY_TOL_EXACT: f64 = 1e-9;
const ENTROPY_TOL_QUARTER: f64 = 1e-4;
const LIMIT_FRAME_CHANGE: Duration = Duration::from_secs(1);
const LIMIT_COUNTER_LAWS: Duration = Duration::from_secs(5);
const LIMIT_COMPARISON_LAW: Duration = Duration::from_secs(5);

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn c1_two_body_reproduction() -> Outcome {
    let (n, a) = (16usize, 3usize);
    let mut r = rng(1);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut configs_ok = true;
    for _ in 0..20 {
        let theta: f64 = r.random_range(0.05..std::f64::consts::FRAC_PI_2 - 0.05);
        let (p1, p2): (f64, f64) = (r.random_range(0.0..6.3), r.random_range(0.0..6.3));
        let alpha = Complex64::from_polar(theta.cos(), p1);
        let beta = Complex64::from_polar(theta.sin(), p2);
        let sc = TranslationScenario::new(n, alpha, beta, a).unwrap();
        let got = to_mass_frame(&build_earth_particle(&sc).unwrap(), &sc).unwrap();
        // M at the origin, P at +a with α and at −a with β; models are (P, M)
        let mut expected = vec![(vec![a, 0], alpha), (vec![n - a, 0], beta)];
        expected.sort_by(|x, y| x.0.cmp(&y.0));
        let mut seen: Vec<(Vec<usize>, Complex64)> =
            got.branches().iter().map(|b| (b.model.configs().to_vec(), b.amplitude)).collect();
        seen.sort_by(|x, y| x.0.cmp(&y.0));
        configs_ok &= seen.len() == 2 && seen.iter().zip(&expected).all(|(s, e)| s.0 == e.0);
        for (s, e) in seen.iter().zip(&expected) {
            worst = worst.max((s.1 - e.1).norm());
        }
        configs_ok &= got.approx_eq(&mass_frame_direct(&sc).unwrap(), AMPLITUDE_TOL);
    }
    let t = start.elapsed();
    (
        configs_ok && worst <= AMPLITUDE_TOL && t < LIMIT_FRAME_CHANGE,
        format!("20 draws, configurations exact: {configs_ok}, max amplitude error {worst:.1e} (tol {AMPLITUDE_TOL:.0e}), {t:.2?} (limit {LIMIT_FRAME_CHANGE:?})"),
    )
}

fn c2_counter_laws() -> Outcome {
    let names = ["counter_identity", "counter_on_section", "counter_recovers_element", "counter_composition"];
    let start = Instant::now();
    let report = verify_properties(SEED, 1000, &names, reference_counter).unwrap();
    let t = start.elapsed();
    let failures: u64 = report
        .checks
        .iter()
        .map(|c| c.measured["cases"].as_u64().unwrap() - c.measured["passed"].as_u64().unwrap())
        .sum();
    (
        failures == 0 && t < LIMIT_COUNTER_LAWS,
        format!("4 laws x 1000 cases on Zn (n<=64), N<=4, random sections: {failures} failures, {t:.2?} (limit {LIMIT_COUNTER_LAWS:?})"),
    )
}

fn c3_invariant_distances() -> Outcome {
    let mut r = rng(3);
    let mut mismatches = 0;
    let mut applied = 0;
    while applied < 500 {
        let n = r.random_range(4..=24);
        let subsystems = r.random_range(2..=4);
        let space = ModelSpace::translations(n, subsystems).unwrap();
        let (from, to) = (r.random_range(0..subsystems), r.random_range(0..subsystems));
        let (old, new) = (Section::frame_of(from), Section::frame_of(to));
        let mut entries: Vec<(Complex64, qrf_core::Model)> = Vec::new();
        for _ in 0..r.random_range(1..=4) {
            let configs: Vec<usize> = (0..subsystems).map(|_| r.random_range(0..n)).collect();
            let orbit = space.orbit_label(&space.model(configs).unwrap()).unwrap();
            let rep = space.representative(&old, &orbit).unwrap();
            if entries.iter().all(|(_, m)| space.orbit_label(m).unwrap() != orbit) {
                entries.push((Complex64::new(r.random_range(0.1..1.0), r.random_range(-1.0..1.0)), rep));
            }
        }
        let st = BranchState::superpose(&space, entries, OrbitPolicy::RejectSameOrbit).unwrap();
        let moved = st.qrf_change(&old, &new).unwrap();
        applied += 1;
        for (b0, b1) in st.branches().iter().zip(moved.branches()) {
            for i in 0..subsystems {
                for j in 0..subsystems {
                    if relative_distance(n, &b0.model, i, j) != relative_distance(n, &b1.model, i, j) {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    (mismatches == 0, format!("{applied} random frame changes, {mismatches} changed relative distances"))
}

/// Entropy of one particle from the frame-2 branch positions, by explicit
/// partial trace of a two-branch state and the 2x2 eigenvalue formula.
fn oracle_entropy(branches: &[(Complex64, Vec<i64>)], keep: usize) -> f64 {
    let mut basis: Vec<i64> = branches.iter().map(|b| b.1[keep]).collect();
    basis.sort();
    basis.dedup();
    let d = basis.len();
    let mut rho = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for (a, x) in branches {
        for (b, y) in branches {
            let rest = |v: &Vec<i64>| v.iter().enumerate().filter(|(s, _)| *s != keep).map(|(_, q)| *q).collect::<Vec<_>>();
            if rest(x) == rest(y) {
                let i = basis.iter().position(|&v| v == x[keep]).unwrap();
                let j = basis.iter().position(|&v| v == y[keep]).unwrap();
                rho[i][j] += a * b.conj();
            }
        }
    }
    let lambdas = if d == 1 {
        vec![rho[0][0].re]
    } else {
        let (p, q, off) = (rho[0][0].re, rho[1][1].re, rho[0][1].norm_sqr());
        let disc = (((p - q) / 2.0).powi(2) + off).sqrt();
        vec![(p + q) / 2.0 + disc, (p + q) / 2.0 - disc]
    };
    lambdas.iter().filter(|&&l| l > 1e-15).map(|l| -l * l.log2()).sum()
}

fn c4_entanglement() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (weight, target, tol) in [(0.5, 1.0, ENTROPY_TOL_EXACT), (0.25, 0.8113, ENTROPY_TOL_QUARTER)] {
        let alpha = Complex64::new(f64::sqrt(weight), 0.0);
        let beta = Complex64::new(f64::sqrt(1.0 - weight), 0.0);
        let rep = three_particle_report(16, [[0, 3, 7], [0, 5, 7]], alpha, beta).unwrap();
        let (f1, f2) = (&rep.frames[0], &rep.frames[1]);
        let branches: Vec<(Complex64, Vec<i64>)> = f2
            .branches
            .iter()
            .map(|b| (Complex64::new(b.amplitude[0], b.amplitude[1]), b.positions.clone()))
            .collect();
        let oracle = oracle_entropy(&branches, f2.entropy_subsystem - 1);
        ok &= f1.entropy_bits.abs() <= ENTROPY_TOL_EXACT
            && (f2.entropy_bits - target).abs() <= tol
            && (f2.entropy_bits - oracle).abs() <= ENTROPY_TOL_EXACT;
        parts.push(format!(
            "|alpha|^2={weight}: frame 1 {:.2e}, frame 2 {:.10} (target {target} +- {tol:.0e}, oracle {oracle:.10})",
            f1.entropy_bits, f2.entropy_bits
        ));
    }
    (ok, parts.join("; "))
}

fn shuffled(r: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(r);
    v
}

/// Two branches of up to 64 points with independently permuted injective
/// fields and an observable with few distinct values.
fn random_superposition(r: &mut ChaCha8Rng) -> (GeometrySuperposition, QuantumDiffeo) {
    let n = r.random_range(1..=64);
    let mut branches = Vec::new();
    for _ in 0..2 {
        let order = shuffled(r, n);
        let fields = ReferenceFields::new(
            4,
            order.iter().map(|&x| [x as i64, (x * x) as i64, 5, -(x as i64) * 3]).collect(),
        )
        .unwrap();
        let obs: Vec<f64> = (0..n).map(|_| r.random_range(0..2) as f64).collect();
        let g = BranchGeometry::new(n).with_fields("chi", fields).unwrap().with_observable("o", obs).unwrap();
        branches.push((Complex64::new(r.random_range(0.1..1.0), r.random_range(-1.0..1.0)), g));
    }
    let d = QuantumDiffeo::new((0..2).map(|_| Permutation::from_images(shuffled(r, n)).unwrap()).collect());
    (GeometrySuperposition::new(branches).unwrap(), d)
}

fn c5_comparison_law() -> Outcome {
    let mut r = rng(5);
    let start = Instant::now();
    let mut failures = 0;
    for _ in 0..200 {
        let (s, d) = random_superposition(&mut r);
        let c = build_comparison(s.geometry(0).unwrap(), s.geometry(1).unwrap(), "chi").unwrap();
        let moved = apply_quantum_diffeo(&s, &d).unwrap();
        let rebuilt = build_comparison(moved.geometry(0).unwrap(), moved.geometry(1).unwrap(), "chi").unwrap();
        failures += (transform_comparison(&c, &d).unwrap().pairs() != rebuilt.pairs()) as usize;
    }
    let t = start.elapsed();
    (
        failures == 0 && t < LIMIT_COMPARISON_LAW,
        format!("200 superpositions (<=64 points): {failures} map mismatches, {t:.2?} (limit {LIMIT_COMPARISON_LAW:?})"),
    )
}

fn c6_localisation() -> Outcome {
    let mut r = rng(6);
    let mut pairs = 0usize;
    let mut changed = 0usize;
    for _ in 0..200 {
        let (s, d) = random_superposition(&mut r);
        let c = build_comparison(s.geometry(0).unwrap(), s.geometry(1).unwrap(), "chi").unwrap();
        let c2 = transform_comparison(&c, &d).unwrap();
        let n = c.len();
        for p in 0..n {
            for q in 0..n {
                pairs += 1;
                let moved = is_localised(d.perms()[0].apply(p), d.perms()[1].apply(q), &c2);
                changed += (is_localised(p, q, &c) != moved) as usize;
            }
        }
    }

    let sc = curvature_scenario().unwrap();
    let (g1, g2) = (sc.superposition.geometry(0).unwrap(), sc.superposition.geometry(1).unwrap());
    let values_ok = g1.fields(FIELD_R).unwrap().value(sc.p) == Some(&[1, 2, 3, 4])
        && g2.fields(FIELD_R).unwrap().value(sc.q) == Some(&[1, 2, 3, 4])
        && g1.observable(RIEM2).unwrap()[sc.p] == 1.0
        && g2.observable(RIEM2).unwrap()[sc.q] == 2.0
        && g1.observable(WEYL2).unwrap()[sc.p] == 0.0
        && g2.observable(WEYL2).unwrap()[sc.q] == 1.0;
    let under_r = is_localised(sc.p, sc.q, &build_comparison(g1, g2, FIELD_R).unwrap());
    let under_rt = is_localised(sc.p, sc.q, &build_comparison(g1, g2, FIELD_R_TILDE).unwrap());
    (
        changed == 0 && values_ok && under_r && !under_rt,
        format!(
            "(a) {pairs} pairs over 200 diffeos, {changed} changed status; (b) curvature values as stated: {values_ok}, (p,q) localised under C_R: {under_r}, under C_R~: {under_rt}"
        ),
    )
}

fn c7_alignment() -> Outcome {
    let mut r = rng(7);
    let mut bad = 0;
    for _ in 0..100 {
        let (s, _) = random_superposition(&mut r);
        let n = s.point_count();
        let order = shuffled(&mut r, n);
        let target = ReferenceFields::new(
            4,
            order.iter().map(|&x| [x as i64, (x * x) as i64, 5, -(x as i64) * 3]).collect(),
        )
        .unwrap();
        let out = qrf_change_to(&s, "chi", &target).unwrap();
        let fields_ok = out.superposition.branches().iter().all(|(_, g)| g.fields("chi").unwrap() == &target);
        bad += !(fields_ok && out.comparison().unwrap().is_identity()) as usize;
    }
    let sc = curvature_scenario().unwrap();
    let g1 = sc.superposition.geometry(0).unwrap();
    let out = qrf_change_to(&sc.superposition, FIELD_R_TILDE, g1.fields(FIELD_R_TILDE).unwrap()).unwrap();
    let r_after: Vec<_> = out.superposition.branches().iter().map(|(_, g)| g.fields(FIELD_R).unwrap().clone()).collect();
    let superposed = r_after[0] != r_after[1];
    (
        bad == 0 && superposed,
        format!("100 random alignments, {bad} non-identity or target mismatch; R superposed after aligning R~: {superposed}"),
    )
}

fn c8_definiteness() -> Outcome {
    let mut r = rng(8);
    let mut changed = 0;
    let mut evaluations = 0;
    for _ in 0..200 {
        let (s, d) = random_superposition(&mut r);
        let (g1, g2) = (s.geometry(0).unwrap(), s.geometry(1).unwrap());
        let c = build_comparison(g1, g2, "chi").unwrap();
        let moved = apply_quantum_diffeo(&s, &d).unwrap();
        let (h1, h2) = (moved.geometry(0).unwrap(), moved.geometry(1).unwrap());
        let c2 = transform_comparison(&c, &d).unwrap();
        for p in 0..c.len() {
            let q = c.apply(p).unwrap();
            evaluations += 1;
            let before = definite_at("o", p, q, &c, g1, g2).unwrap();
            let after = definite_at("o", d.perms()[0].apply(p), d.perms()[1].apply(q), &c2, h1, h2).unwrap();
            changed += (before != after) as usize;
        }
    }
    let sc = curvature_scenario().unwrap();
    let x = [1, 2, 3, 4];
    let by_r = dress(&sc.superposition, RIEM2, FIELD_R).unwrap().is_definite(&x).unwrap();
    let by_rt = dress(&sc.superposition, RIEM2, FIELD_R_TILDE).unwrap().is_definite(&x).unwrap();
    (
        changed == 0 && by_r != by_rt,
        format!("{evaluations} evaluations over 200 diffeos, {changed} changed; Riem2 at (1,2,3,4) definite by R: {by_r}, by R~: {by_rt}"),
    )
}

fn c9_determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_qrf"))
            .args(["verify", "--seed", "42", "--cases", "1000"])
            .env_remove("QRF_SEED")
            .env_remove("QRF_OUT_DIR")
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    let ok = same && a.status.code() == Some(0) && b.status.code() == Some(0);
    (ok, format!("two runs of verify --seed 42 --cases 1000: {} bytes each, identical: {same}", a.stdout.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("two-body frame change reproduces the mass-frame state", c1_two_body_reproduction),
        ("counterpart laws", c2_counter_laws),
        ("relative distances invariant under frame changes", c3_invariant_distances),
        ("entanglement depends on the frame", c4_entanglement),
        ("comparison-map transformation law", c5_comparison_law),
        ("localisation diffeo-invariant and frame-dependent", c6_localisation),
        ("identity comparison after frame alignment", c7_alignment),
        ("definiteness invariant under quantum diffeos", c8_definiteness),
        ("verify reports are byte-identical", c9_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = f();
        failed += !ok as usize;
        println!("criterion {} [{}] {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
