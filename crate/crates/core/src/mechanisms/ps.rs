use num_traits::{One, Zero};

use crate::model::{Allocation, Profile, Setting};
use crate::rational::Rational;

/// Exhaustion events of one run of the eating procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EatingTrace {
    /// `(time, object)` in order of exhaustion; only objects exhausted
    /// by time 1 appear.
    pub exhaustions: Vec<(Rational, usize)>,
}

/// Probabilistic serial: every agent eats its best unexhausted object at
/// unit speed until time 1.
pub fn ps(profile: &Profile, setting: &Setting) -> Allocation {
    ps_with_times(profile, setting).0
}

pub fn ps_with_times(profile: &Profile, setting: &Setting) -> (Allocation, EatingTrace) {
    let n = profile.agents();
    let m = setting.objects();
    let mut x = Allocation::zeros(n, m);
    let mut remaining: Vec<Rational> = setting
        .capacities()
        .iter()
        .map(|&q| Rational::from_integer(q.into()))
        .collect();
    let mut exhausted = vec![false; m];
    // index into each agent's ranking of its current object
    let mut cursor = vec![0usize; n];
    let mut time = Rational::zero();
    let mut exhaustions = Vec::new();
    let end = Rational::one();
    while time < end {
        let mut eaters = vec![0u64; m];
        let mut current = vec![0usize; n];
        for i in 0..n {
            let ranking = profile.pref(i).ranking();
            while exhausted[ranking[cursor[i]]] {
                cursor[i] += 1;
            }
            current[i] = ranking[cursor[i]];
            eaters[current[i]] += 1;
        }
        let mut step = &end - &time;
        for j in 0..m {
            if eaters[j] > 0 {
                let until = &remaining[j] / Rational::from_integer(eaters[j].into());
                if until < step {
                    step = until;
                }
            }
        }
        for (i, &j) in current.iter().enumerate() {
            *x.get_mut(i, j) += &step;
        }
        time += &step;
        for j in 0..m {
            if eaters[j] > 0 {
                remaining[j] -= &step * Rational::from_integer(eaters[j].into());
                if remaining[j].is_zero() {
                    exhausted[j] = true;
                    exhaustions.push((time.clone(), j));
                }
            }
        }
    }
    (x, EatingTrace { exhaustions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::text::parse_profile;

    #[test]
    fn identical_rankings_share_equally() {
        let s = Setting::unit(3, 3).unwrap();
        let p = parse_profile(&s, "b>c>a;b>c>a;b>c>a").unwrap();
        let x = ps(&p, &s);
        for i in 0..3 {
            assert_eq!(x.row(i), &[ratio(1, 3), ratio(1, 3), ratio(1, 3)]);
        }
    }

    #[test]
    fn exhaustion_times() {
        let s = Setting::unit(3, 3).unwrap();
        let p = parse_profile(&s, "a>b>c;b>a>c;b>c>a").unwrap();
        let (x, trace) = ps_with_times(&p, &s);
        assert_eq!(x.row(0), &[ratio(3, 4), int(0), ratio(1, 4)]);
        assert_eq!(x.row(1), &[ratio(1, 4), ratio(1, 2), ratio(1, 4)]);
        let times: Vec<Rational> = trace.exhaustions.iter().map(|e| e.0.clone()).collect();
        assert_eq!(times, vec![ratio(1, 2), ratio(3, 4), int(1)]);
    }
}
