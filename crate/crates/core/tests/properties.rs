use proptest::prelude::*;
use qrf_core::group::ActionRule;
use qrf_core::spacetime::{
    apply_quantum_diffeo, build_comparison, definite_at, is_localised, qrf_change_to, transform_comparison,
};
use qrf_core::translation::relative_distance;
use qrf_core::{
    BranchGeometry, BranchState, Complex64, ConfigSpace, FiniteGroup, GeometrySuperposition, ModelSpace,
    OrbitPolicy, Permutation, QuantumDiffeo, ReferenceFields, Section,
};

fn section(kind: u8, seed: u64, subsystems: usize) -> Section {
    match kind % 3 {
        0 => Section::canonical(),
        1 => Section::scrambled(seed),
        _ => Section::frame_of(seed as usize % subsystems),
    }
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn sample_spaces() -> Vec<ConfigSpace> {
    vec![
        ConfigSpace::translations(7).unwrap(),
        ConfigSpace::new(FiniteGroup::cyclic(24).unwrap(), ActionRule::Modular { modulus: 12 }).unwrap(),
        ConfigSpace::new(FiniteGroup::symmetric(4).unwrap(), ActionRule::Natural).unwrap(),
        ConfigSpace::new(FiniteGroup::symmetric(3).unwrap(), ActionRule::Regular).unwrap(),
    ]
}

proptest! {
    #[test]
    fn action_inverse_undoes(which in 0usize..4, g in 0usize..24, x in 0usize..24) {
        let s = &sample_spaces()[which];
        let grp = s.group();
        let g = grp.element(g % grp.order()).unwrap();
        let x = x % s.size();
        let y = s.act(g, x).unwrap();
        prop_assert_eq!(s.act(grp.inverse(g).unwrap(), y).unwrap(), x);
    }

    #[test]
    fn stabiliser_conjugation_covariance(which in 0usize..4, g in 0usize..24, x in 0usize..24) {
        let s = &sample_spaces()[which];
        let grp = s.group();
        let g = grp.element(g % grp.order()).unwrap();
        let x = x % s.size();
        let g_inv = grp.inverse(g).unwrap();
        let mut conj: Vec<_> = s
            .stabiliser(x)
            .unwrap()
            .into_iter()
            .map(|h| grp.compose(g, grp.compose(h, g_inv).unwrap()).unwrap())
            .collect();
        conj.sort();
        prop_assert_eq!(s.stabiliser(s.act(g, x).unwrap()).unwrap(), conj);
    }

    #[test]
    fn counterpart_laws(
        n in 2usize..=64,
        subsystems in 1usize..=4,
        raw in proptest::collection::vec(0usize..64, 12),
        g in 0usize..64,
        kind in 0u8..3,
        seed in any::<u64>(),
    ) {
        let space = ModelSpace::translations(n, subsystems).unwrap();
        let grp = space.group().clone();
        let s = section(kind, seed, subsystems);
        let m = |k: usize| space.model(raw[k * 4..k * 4 + subsystems].iter().map(|x| x % n).collect::<Vec<_>>()).unwrap();
        let (m1, m2, m3) = (m(0), m(1), m(2));
        let g = grp.element(g % n).unwrap();
        let e = grp.identity();

        prop_assert_eq!(space.counter(&s, &m1, &m1).unwrap(), e);
        let gm1 = space.act(g, &m1).unwrap();
        prop_assert_eq!(space.counter(&s, &m1, &gm1).unwrap(), g);

        // composition law on one orbit
        let h = grp.element(raw[3] % n).unwrap();
        let hm1 = space.act(h, &m1).unwrap();
        let lhs = space.counter(&s, &m1, &hm1).unwrap();
        let rhs = grp.compose(space.counter(&s, &gm1, &hm1).unwrap(), space.counter(&s, &m1, &gm1).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);

        // on-section pairs relate trivially
        let rep = space.representative(&s, &space.orbit_label(&m2).unwrap()).unwrap();
        prop_assert_eq!(space.counter(&s, &rep, &rep).unwrap(), e);

        // orbit labels constant along orbits
        prop_assert_eq!(space.orbit_label(&gm1).unwrap(), space.orbit_label(&m1).unwrap());

        // convention change conjugation
        let t = section(kind + 1, seed.rotate_left(7), subsystems);
        let (o1, o2) = (space.orbit_label(&m1).unwrap(), space.orbit_label(&m3).unwrap());
        let c1 = space.convention_change(&s, &t, &o1).unwrap();
        let c2 = space.convention_change(&s, &t, &o2).unwrap();
        let l1 = space.lowering_element(&s, &m1).unwrap();
        let l2 = space.lowering_element(&s, &m3).unwrap();
        let inv = |x| grp.inverse(x).unwrap();
        let rebuilt = grp
            .compose(inv(l2), grp.compose(inv(c2), grp.compose(c1, l1).unwrap()).unwrap())
            .unwrap();
        prop_assert_eq!(space.counter(&t, &m1, &m3).unwrap(), rebuilt);
    }

    #[test]
    fn qrf_change_laws(
        n in 5usize..=16,
        raw in proptest::collection::vec((0usize..16, 0usize..16, 0usize..16, -1.0f64..1.0, -1.0f64..1.0), 1..5),
        from in 0usize..3,
        to in 0usize..3,
    ) {
        let space = ModelSpace::translations(n, 3).unwrap();
        let old = Section::frame_of(from);
        let new = Section::frame_of(to);
        let mut seen = std::collections::BTreeSet::new();
        let mut entries = Vec::new();
        for (a, b, c, re, im) in raw {
            let m = space.model(vec![a % n, b % n, c % n]).unwrap();
            let orbit = space.orbit_label(&m).unwrap();
            if seen.insert(orbit.clone()) {
                entries.push((Complex64::new(re, im), space.representative(&old, &orbit).unwrap()));
            }
        }
        let Ok(st) = BranchState::superpose(&space, entries, OrbitPolicy::RejectSameOrbit) else {
            return Ok(());
        };
        let moved = st.qrf_change(&old, &new).unwrap();
        prop_assert!((moved.norm_sqr() - 1.0).abs() < 1e-9);
        prop_assert!(moved.frame_factorizes(to));
        prop_assert!(moved.lies_on(&new).unwrap());
        for (b0, b1) in st.branches().iter().zip(moved.branches()) {
            prop_assert_eq!(b0.orbit(), b1.orbit());
            for (i, j) in [(0, 1), (1, 2), (0, 2)] {
                prop_assert_eq!(relative_distance(n, &b0.model, i, j), relative_distance(n, &b1.model, i, j));
            }
        }
        let back = moved.qrf_change(&new, &old).unwrap();
        prop_assert!(back.approx_eq(&st, 1e-12));
    }
}

fn random_fields(perm: &Permutation, offset: i64) -> ReferenceFields {
    ReferenceFields::unit(perm.images().iter().map(|&x| [x as i64 + offset, 3 * x as i64, -(x as i64), 7]).collect())
}

fn two_branch(p1: &Permutation, p2: &Permutation, obs: &[f64]) -> GeometrySuperposition {
    let n = p1.degree();
    let mk = |p: &Permutation, obs: Vec<f64>| {
        BranchGeometry::new(n)
            .with_fields("chi", random_fields(p, 0))
            .unwrap()
            .with_observable("o", obs)
            .unwrap()
    };
    let g1 = mk(p1, obs[..n].to_vec());
    let g2 = mk(p2, obs[n..].to_vec());
    GeometrySuperposition::new(vec![(Complex64::new(0.6, 0.0), g1), (Complex64::new(0.0, 0.8), g2)]).unwrap()
}

fn spacetime_case() -> impl Strategy<Value = (Permutation, Permutation, Permutation, Permutation, Vec<f64>)> {
    (1usize..=64).prop_flat_map(|n| {
        (
            permutation(n),
            permutation(n),
            permutation(n),
            permutation(n),
            proptest::collection::vec(prop_oneof![Just(0.0), Just(1.0), -5.0f64..5.0], 2 * n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn comparison_pullback_coherence((p1, p2, d1, d2, obs) in spacetime_case()) {
        let s = two_branch(&p1, &p2, &obs);
        let (g1, g2) = (s.geometry(0).unwrap(), s.geometry(1).unwrap());
        let c = build_comparison(g1, g2, "chi").unwrap();
        let d = QuantumDiffeo::new(vec![d1.clone(), d2.clone()]);
        let moved = apply_quantum_diffeo(&s, &d).unwrap();
        let (h1, h2) = (moved.geometry(0).unwrap(), moved.geometry(1).unwrap());
        let c2 = transform_comparison(&c, &d).unwrap();
        prop_assert_eq!(&c2, &build_comparison(h1, h2, "chi").unwrap());

        let n = p1.degree();
        for p in 0..n {
            // scalar values ride along with their points
            prop_assert_eq!(h1.observable("o").unwrap()[d1.apply(p)], g1.observable("o").unwrap()[p]);
            for q in [c.apply(p).unwrap(), (p * 7 + 3) % n] {
                prop_assert_eq!(is_localised(p, q, &c), is_localised(d1.apply(p), d2.apply(q), &c2));
            }
            let q = c.apply(p).unwrap();
            prop_assert_eq!(
                definite_at("o", p, q, &c, g1, g2).unwrap(),
                definite_at("o", d1.apply(p), d2.apply(q), &c2, h1, h2).unwrap()
            );
        }
    }

    #[test]
    fn alignment_gives_identity((p1, p2, t, _d, obs) in spacetime_case()) {
        let s = two_branch(&p1, &p2, &obs);
        let target = random_fields(&t, 0);
        let out = qrf_change_to(&s, "chi", &target).unwrap();
        prop_assert!(out.comparison().unwrap().is_identity());
        for (_, g) in out.superposition.branches() {
            prop_assert_eq!(g.fields("chi").unwrap(), &target);
        }
    }
}
