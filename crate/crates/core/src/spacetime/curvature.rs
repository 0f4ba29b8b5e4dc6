//! A two-branch geometry whose reference fields are built from curvature
//! scalars. Two field sets are available: `R` uses `Riem² − Weyl²` as its
//! first component and `R_tilde` uses `Riem²`. They agree on which point of
//! branch 0 is `p` but disagree on its counterpart in branch 1.

use num_complex::Complex64;

use super::{BranchGeometry, FieldTuple, GeometrySuperposition, ReferenceFields};
use crate::error::Result;

/// Scalar names carried by each branch.
pub const RIEM2: &str = "riem2";
pub const WEYL2: &str = "weyl2";
pub const BOX_R: &str = "box_r";
pub const RIC2: &str = "ric2";
pub const BOX_WEYL2: &str = "box_weyl2";

/// Field set names.
pub const FIELD_R: &str = "R";
pub const FIELD_R_TILDE: &str = "R_tilde";

/// `(R, R̃)` at a point with the given integer curvature scalars.
pub fn curvature_fields(riem2: i64, weyl2: i64, box_r: i64, ric2: i64, box_weyl2: i64) -> (FieldTuple, FieldTuple) {
    ([riem2 - weyl2, box_r, ric2, box_weyl2], [riem2, box_r, ric2, box_weyl2])
}

#[derive(Clone, Debug)]
pub struct CurvatureScenario {
    pub superposition: GeometrySuperposition,
    /// Point of branch 0 where `R = (1, 2, 3, 4)`.
    pub p: usize,
    /// Point of branch 1 where `R = (1, 2, 3, 4)`.
    pub q: usize,
}

// (riem2, weyl2, box_r) per point; ric2 = 3 and box_weyl2 = 4 everywhere.
const BRANCH_0: [(i64, i64, i64); 3] = [(1, 0, 2), (2, 2, 2), (5, 1, 7)];
const BRANCH_1: [(i64, i64, i64); 3] = [(1, 1, 2), (5, 1, 7), (2, 1, 2)];

fn branch(points: &[(i64, i64, i64)], line_a: Vec<usize>, line_b: Vec<usize>) -> Result<BranchGeometry> {
    let (ric2, box_weyl2) = (3, 4);
    let (r, r_tilde): (Vec<_>, Vec<_>) = points
        .iter()
        .map(|&(riem2, weyl2, box_r)| curvature_fields(riem2, weyl2, box_r, ric2, box_weyl2))
        .unzip();
    let column = |f: fn(&(i64, i64, i64)) -> i64| points.iter().map(|x| f(x) as f64).collect::<Vec<_>>();
    BranchGeometry::new(points.len())
        .with_fields(FIELD_R, ReferenceFields::unit(r))?
        .with_fields(FIELD_R_TILDE, ReferenceFields::unit(r_tilde))?
        .with_observable(RIEM2, column(|x| x.0))?
        .with_observable(WEYL2, column(|x| x.1))?
        .with_observable(BOX_R, column(|x| x.2))?
        .with_observable(RIC2, vec![ric2 as f64; points.len()])?
        .with_observable(BOX_WEYL2, vec![box_weyl2 as f64; points.len()])?
        .with_worldline("a", line_a)?
        .with_worldline("b", line_b)
}

/// Equal-weight superposition of the two branches. The worldlines `a` and
/// `b` cross at `p` in branch 0 and at `q` in branch 1.
pub fn curvature_scenario() -> Result<CurvatureScenario> {
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let g0 = branch(&BRANCH_0, vec![1, 0], vec![2, 0])?;
    let g1 = branch(&BRANCH_1, vec![0, 2], vec![1, 2])?;
    Ok(CurvatureScenario { superposition: GeometrySuperposition::new(vec![(amp, g0), (amp, g1)])?, p: 0, q: 2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::{build_comparison, definite_at, dress, find_events, is_localised, localisation_scan, qrf_change_to};

    #[test]
    fn p_and_q_carry_the_same_r_values() {
        let s = curvature_scenario().unwrap();
        let (g0, g1) = (s.superposition.geometry(0).unwrap(), s.superposition.geometry(1).unwrap());
        assert_eq!(g0.fields(FIELD_R).unwrap().value(s.p), Some(&[1, 2, 3, 4]));
        assert_eq!(g1.fields(FIELD_R).unwrap().value(s.q), Some(&[1, 2, 3, 4]));
        assert_eq!(g0.observable(RIEM2).unwrap()[s.p], 1.0);
        assert_eq!(g1.observable(RIEM2).unwrap()[s.q], 2.0);
        assert_eq!(g0.observable(WEYL2).unwrap()[s.p], 0.0);
        assert_eq!(g1.observable(WEYL2).unwrap()[s.q], 1.0);
    }

    #[test]
    fn localised_under_r_not_under_r_tilde() {
        let s = curvature_scenario().unwrap();
        let (g0, g1) = (s.superposition.geometry(0).unwrap(), s.superposition.geometry(1).unwrap());
        let c_r = build_comparison(g0, g1, FIELD_R).unwrap();
        let c_rt = build_comparison(g0, g1, FIELD_R_TILDE).unwrap();
        assert_eq!(c_r.apply(s.p), Some(s.q));
        assert!(is_localised(s.p, s.q, &c_r));
        assert!(!is_localised(s.p, s.q, &c_rt));

        let aligned = qrf_change_to(&s.superposition, FIELD_R_TILDE, g0.fields(FIELD_R_TILDE).unwrap()).unwrap();
        let d = aligned.diffeo.perms();
        assert!(!is_localised(d[0].apply(s.p), d[1].apply(s.q), aligned.comparison().unwrap()));
        // R is superposed in the R̃ frame
        let moved = &aligned.superposition;
        assert_ne!(
            moved.geometry(0).unwrap().fields(FIELD_R).unwrap(),
            moved.geometry(1).unwrap().fields(FIELD_R).unwrap()
        );

        let scan = localisation_scan(&s.superposition, FIELD_R, FIELD_R_TILDE).unwrap();
        assert!(scan.iter().all(|r| r.localised_chi));
        assert!(scan.iter().any(|r| !r.localised_chi_tilde));
        for row in &scan {
            assert_eq!(row.localised_chi_tilde, c_rt.apply(row.point) == Some(row.counterpart));
        }
    }

    #[test]
    fn riem2_definiteness_depends_on_the_frame() {
        let s = curvature_scenario().unwrap();
        let (g0, g1) = (s.superposition.geometry(0).unwrap(), s.superposition.geometry(1).unwrap());
        let c_r = build_comparison(g0, g1, FIELD_R).unwrap();
        let c_rt = build_comparison(g0, g1, FIELD_R_TILDE).unwrap();
        assert!(!definite_at(RIEM2, s.p, s.q, &c_r, g0, g1).unwrap());
        let q_tilde = c_rt.apply(s.p).unwrap();
        assert!(definite_at(RIEM2, s.p, q_tilde, &c_rt, g0, g1).unwrap());
        assert!(definite_at(RIC2, s.p, s.q, &c_r, g0, g1).unwrap());

        let by_r = dress(&s.superposition, RIEM2, FIELD_R).unwrap();
        assert_eq!(by_r.profile(&[1, 2, 3, 4]).unwrap(), vec![1.0, 2.0]);
        let by_rt = dress(&s.superposition, RIEM2, FIELD_R_TILDE).unwrap();
        assert_eq!(by_rt.profile(&[1, 2, 3, 4]).unwrap(), vec![1.0, 1.0]);
        assert!(!by_r.is_definite(&[1, 2, 3, 4]).unwrap());
        assert!(by_rt.is_definite(&[1, 2, 3, 4]).unwrap());
    }

    #[test]
    fn worldlines_cross_at_p_and_q() {
        let s = curvature_scenario().unwrap();
        let (g0, g1) = (s.superposition.geometry(0).unwrap(), s.superposition.geometry(1).unwrap());
        let events = find_events(g0, g1, "a", "b").unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!((events[0].first, events[0].second), (s.p, s.q));
    }
}
