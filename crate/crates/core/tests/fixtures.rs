use hybrid_core::mechanisms::{nbm, ps, rank_value, rsd, RsdEngine};
use hybrid_core::rational::{int, ratio, Rational};
use hybrid_core::text::parse_profile;
use hybrid_core::{Allocation, Setting};

fn rows(rows: &[&[(i64, i64)]]) -> Allocation {
    Allocation::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&(p, q)| ratio(p, q)).collect())
            .collect(),
    )
    .unwrap()
}

#[test]
fn bogomolnaia_moulin_profile() {
    let s = Setting::new(4, 3, vec![1, 1, 2]).unwrap();
    let p = parse_profile(&s, "a>b>c;a>b>c;b>a>c;b>a>c").unwrap();
    let half = (1, 2);
    let zero = (0, 1);
    assert_eq!(
        ps(&p, &s),
        rows(&[
            &[half, zero, half],
            &[half, zero, half],
            &[zero, half, half],
            &[zero, half, half]
        ])
    );
    let lo = (1, 12);
    let hi = (5, 12);
    let expected = rows(&[&[hi, lo, half], &[hi, lo, half], &[lo, hi, half], &[lo, hi, half]]);
    for engine in [RsdEngine::Enumerate, RsdEngine::Recurse] {
        assert_eq!(rsd(&p, &s, engine, 1000).unwrap(), expected);
    }
}

#[test]
fn incomparable_profile() {
    let s = Setting::unit(3, 3).unwrap();
    let p = parse_profile(&s, "a>b>c;b>a>c;b>c>a").unwrap();
    let eat = rows(&[
        &[(3, 4), (0, 1), (1, 4)],
        &[(1, 4), (1, 2), (1, 4)],
        &[(0, 1), (1, 2), (1, 2)],
    ]);
    let serial = rows(&[
        &[(5, 6), (0, 1), (1, 6)],
        &[(1, 6), (1, 2), (1, 3)],
        &[(0, 1), (1, 2), (1, 2)],
    ]);
    assert_eq!(ps(&p, &s), eat);
    assert_eq!(rsd(&p, &s, RsdEngine::Recurse, 1000).unwrap(), serial);
}

#[test]
fn boston_six_agents() {
    let s = Setting::unit(6, 6).unwrap();
    let truth = parse_profile(
        &s,
        "a>b>c>d>e>f;a>b>c>d>e>f;c>b>f>d>a>e;c>b>f>d>a>e;c>b>f>d>a>e;c>b>f>d>a>e",
    )
    .unwrap();
    let lie = parse_profile(
        &s,
        "a>b>d>c>e>f;a>b>c>d>e>f;c>b>f>d>a>e;c>b>f>d>a>e;c>b>f>d>a>e;c>b>f>d>a>e",
    )
    .unwrap();
    let before: Vec<Rational> = vec![ratio(1, 2), ratio(1, 10), int(0), ratio(7, 30), ratio(1, 6), int(0)];
    let after: Vec<Rational> = vec![ratio(1, 2), ratio(1, 10), int(0), ratio(2, 5), int(0), int(0)];
    let serial = rsd(&truth, &s, RsdEngine::Recurse, 1000).unwrap();
    assert_eq!(serial.row(0), &before[..]);
    assert_eq!(rsd(&lie, &s, RsdEngine::Recurse, 1000).unwrap().row(0), &before[..]);
    assert_eq!(nbm(&truth, &s, 1000).unwrap().row(0), &before[..]);
    assert_eq!(nbm(&lie, &s, 1000).unwrap().row(0), &after[..]);
}

#[test]
fn rank_value_swap() {
    let s = Setting::unit(3, 3).unwrap();
    let v = vec![int(10), int(6), int(0)];
    let truth = parse_profile(&s, "a>b>c;c>a>b;c>a>b").unwrap();
    let lie = parse_profile(&s, "a>c>b;c>a>b;c>a>b").unwrap();
    assert_eq!(
        rank_value(&truth, &s, &v, 1000).unwrap().row(0),
        &[int(0), int(1), int(0)]
    );
    assert_eq!(
        rank_value(&lie, &s, &v, 1000).unwrap().row(0),
        &[int(1), int(0), int(0)]
    );
}
