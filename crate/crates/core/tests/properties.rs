use hybrid_core::efficiency::{fosd, ordinal_dominance, ordinal_efficient_check, DominanceResult};
use hybrid_core::enumerate::TypeSpace;
use hybrid_core::incentives::{manipulation_gain, Verifier};
use hybrid_core::model::convex_combine;
use hybrid_core::rational::{int, ratio, zero};
use hybrid_core::UtilityVector;
use hybrid_core::{Allocation, Mechanism, MechanismSpec, PrefOrder, Profile, Rational, Reduction, Scope, Setting};
use proptest::prelude::*;

fn space() -> TypeSpace {
    TypeSpace::new(3)
}

fn profile3() -> impl Strategy<Value = Profile> {
    proptest::collection::vec(0..6usize, 3).prop_map(|idx| space().profile(&idx))
}

fn order3() -> impl Strategy<Value = PrefOrder> {
    (0..6usize).prop_map(|i| space().get(i).clone())
}

fn small_vec(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(0..8i64, len).prop_map(|v| v.into_iter().map(|k| ratio(k, 4)).collect())
}

fn beta() -> impl Strategy<Value = Rational> {
    (0..=12i64).prop_map(|k| ratio(k, 12))
}

fn base_mech() -> impl Strategy<Value = MechanismSpec> {
    prop_oneof![
        Just(MechanismSpec::Rsd),
        Just(MechanismSpec::Ps),
        Just(MechanismSpec::Nbm),
        Just(MechanismSpec::Abm),
        Just(MechanismSpec::Const),
    ]
}

/// A utility in URBI(r) consistent with `t`, built from the bottom rank up.
/// At r = 1 a zero slack would tie two objects, so it is bumped.
fn urbi_utility(t: &PrefOrder, r: &Rational, slack: &[Rational]) -> UtilityVector {
    let m = t.len();
    let mut values = vec![zero(); m];
    let mut below = zero();
    for k in (0..m - 1).rev() {
        let mut v = if below == zero() {
            int(1) + &slack[k]
        } else {
            &below / r + &slack[k]
        };
        if v == below {
            v += ratio(1, 4);
        }
        values[t.ranking()[k]] = v.clone();
        below = v;
    }
    UtilityVector::new(values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fosd_is_reflexive_and_mirrored(v in small_vec(3), w in small_vec(3), t in order3()) {
        prop_assert_eq!(fosd(&v, &v, &t).unwrap(), DominanceResult::Equal);
        prop_assert_eq!(fosd(&v, &w, &t).unwrap(), fosd(&w, &v, &t).unwrap().mirror());
    }

    #[test]
    fn fosd_is_transitive(u in small_vec(3), v in small_vec(3), w in small_vec(3), t in order3()) {
        let uv = fosd(&u, &v, &t).unwrap();
        let vw = fosd(&v, &w, &t).unwrap();
        if uv.weakly_dominates() && vw.weakly_dominates() {
            prop_assert!(fosd(&u, &w, &t).unwrap().weakly_dominates());
        }
    }

    /// Moving the mixing factor towards g changes the allocation by a positive
    /// multiple of g − f, so the comparison of two hybrids is exactly the
    /// comparison of g with f.
    #[test]
    fn hybrid_comparison_follows_components(
        f in base_mech(),
        g in base_mech(),
        p in profile3(),
        a in beta(),
        b in beta(),
    ) {
        prop_assume!(a < b);
        let s = Setting::unit(3, 3).unwrap();
        let fx = f.allocate(&s, &p).unwrap();
        let gx = g.allocate(&s, &p).unwrap();
        let low = convex_combine(&fx, &gx, &a).unwrap();
        let high = convex_combine(&fx, &gx, &b).unwrap();
        prop_assert_eq!(
            ordinal_dominance(&high, &low, &p).unwrap(),
            ordinal_dominance(&gx, &fx, &p).unwrap()
        );
    }

    #[test]
    fn certified_dominator_dominates(weights in proptest::collection::vec(0..4i64, 6), p in profile3()) {
        prop_assume!(weights.iter().any(|&w| w > 0));
        let s = Setting::unit(3, 3).unwrap();
        let x = mix_permutations(&weights);
        let check = ordinal_efficient_check(&x, &p, &s);
        match check.dominating {
            Some(y) => {
                prop_assert!(!check.efficient);
                y.validate(&s).unwrap();
                prop_assert_eq!(ordinal_dominance(&y, &x, &p).unwrap(), DominanceResult::StrictDominates);
            }
            None => prop_assert!(check.efficient),
        }
    }

    /// Sampled URBI(r) utilities never gain from a misreport when the exact
    /// verifier accepts r.
    #[test]
    fn verified_bound_holds_for_sampled_utilities(
        mech in base_mech(),
        rk in 1..=10i64,
        p in profile3(),
        agent in 0..3usize,
        slack in small_vec(2),
    ) {
        let s = Setting::unit(3, 3).unwrap();
        let r = ratio(rk, 10);
        let verifier = Verifier::new(&mech, &s, &Scope::Exhaustive(Reduction::None)).unwrap();
        let report = verifier.verify(&r).unwrap();
        prop_assume!(report.verdict);
        let u = urbi_utility(p.pref(agent), &r, &slack);
        for lie in space().types() {
            let gain = manipulation_gain(&u, &mech, &s, agent, &p, lie).unwrap();
            prop_assert!(gain <= zero(), "{} gains {} with {:?}", mech, gain, lie);
        }
    }
}

fn mix_permutations(weights: &[i64]) -> Allocation {
    let total: i64 = weights.iter().sum();
    let mut rows = vec![vec![zero(); 3]; 3];
    for (w, perm) in weights.iter().zip(space().types()) {
        for (agent, row) in rows.iter_mut().enumerate() {
            row[perm.ranking()[agent]] += ratio(*w, total);
        }
    }
    Allocation::from_rows(rows).unwrap()
}

/// Every bistochastic 3×3 matrix with entries in quarters.
fn quarter_grid() -> Vec<Allocation> {
    let rows: Vec<[i64; 3]> = (0..=4)
        .flat_map(|a| (0..=4 - a).map(move |b| [a, b, 4 - a - b]))
        .collect();
    let mut out = Vec::new();
    for r0 in &rows {
        for r1 in &rows {
            let r2: Vec<i64> = (0..3).map(|j| 4 - r0[j] - r1[j]).collect();
            if r2.iter().all(|&v| v >= 0) {
                let as_rat = |r: &[i64]| r.iter().map(|&v| ratio(v, 4)).collect::<Vec<_>>();
                out.push(Allocation::from_rows(vec![as_rat(r0), as_rat(r1), as_rat(&r2)]).unwrap());
            }
        }
    }
    out
}

#[test]
fn efficiency_check_agrees_with_grid_search() {
    let s = Setting::unit(3, 3).unwrap();
    let grid = quarter_grid();
    let sp = space();
    let mut checked = 0;
    for (i, x) in grid.iter().enumerate().step_by(7) {
        let p = sp.profile(&[i % 6, (i / 6) % 6, (i / 36) % 6]);
        let check = ordinal_efficient_check(x, &p, &s);
        if check.efficient {
            for y in &grid {
                assert_ne!(
                    ordinal_dominance(y, x, &p).unwrap(),
                    DominanceResult::StrictDominates,
                    "{} is declared efficient at {:?} but is dominated",
                    x.display(),
                    p
                );
            }
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn reductions_give_identical_reports() {
    let s = Setting::unit(3, 3).unwrap();
    for mech in [MechanismSpec::Ps, MechanismSpec::Abm, MechanismSpec::Nbm] {
        let reports: Vec<_> = [Reduction::None, Reduction::Anonymous, Reduction::AnonymousNeutral]
            .into_iter()
            .map(|red| {
                let v = Verifier::new(&mech, &s, &Scope::Exhaustive(red)).unwrap();
                [ratio(1, 2), ratio(3, 4), ratio(4, 5)].map(|r| v.verify(&r).unwrap().verdict)
            })
            .collect();
        assert!(reports.windows(2).all(|w| w[0] == w[1]), "{mech}: {reports:?}");
    }
}

#[test]
fn verification_is_deterministic() {
    let s = Setting::unit(3, 3).unwrap();
    let scope = Scope::Exhaustive(Reduction::None);
    let a = Verifier::new(&MechanismSpec::Abm, &s, &scope)
        .unwrap()
        .verify(&ratio(9, 10))
        .unwrap();
    let b = Verifier::new(&MechanismSpec::Abm, &s, &scope)
        .unwrap()
        .verify(&ratio(9, 10))
        .unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
