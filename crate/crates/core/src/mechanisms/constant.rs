use num_bigint::BigInt;

use crate::model::{Allocation, Setting};
use crate::rational::Rational;

/// Report-independent allocation giving every agent the share
/// `q_j / Σq` of object `j`. Rows sum to one and column `j` sums to
/// `n·q_j/Σq ≤ q_j`.
pub fn constant_equal_shares(setting: &Setting) -> Allocation {
    let supply = BigInt::from(setting.supply());
    let row: Vec<Rational> = setting
        .capacities()
        .iter()
        .map(|&q| Rational::new(BigInt::from(q), supply.clone()))
        .collect();
    let n = setting.agents();
    Allocation::from_flat(
        n,
        setting.objects(),
        row.iter().cycle().take(n * setting.objects()).cloned().collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn equal_shares() {
        let s = Setting::unit(3, 3).unwrap();
        let x = constant_equal_shares(&s);
        assert!(x.entries().iter().all(|p| *p == ratio(1, 3)));
        let s = Setting::unit(2, 2).unwrap();
        assert!(constant_equal_shares(&s).entries().iter().all(|p| *p == ratio(1, 2)));
        let s = Setting::new(2, 3, vec![1, 1, 2]).unwrap();
        let x = constant_equal_shares(&s);
        assert_eq!(x.row(1), &[ratio(1, 4), ratio(1, 4), ratio(1, 2)]);
        x.validate(&s).unwrap();
    }
}
