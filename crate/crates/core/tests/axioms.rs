mod common;

use common::{pooled_family, PooledFamily};
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn with_tables() -> impl Strategy<Value = (PooledFamily, Vec<f64>, Vec<f64>, f64, f64)> {
    pooled_family().prop_flat_map(|pf| {
        let k = pf.pool.len();
        (
            Just(pf),
            prop::collection::vec(-10.0f64..10.0, k),
            prop::collection::vec(-10.0f64..10.0, k),
            -5.0f64..5.0,
            0.0f64..5.0,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn sublinear_expectation_axioms((pf, f, g, c, lambda) in with_tables()) {
        let fam = pf.family();
        let phi = pf.lift(&f);
        let psi = pf.lift(&g);
        let e_phi = fam.upper_expect(&phi).unwrap();
        let e_psi = fam.upper_expect(&psi).unwrap();

        // monotonicity against the pointwise maximum
        let hi: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a.max(*b)).collect();
        let e_hi = fam.upper_expect(pf.lift(&hi)).unwrap();
        prop_assert!(e_hi >= e_phi - TOL && e_hi >= e_psi - TOL);

        // constant preservation
        prop_assert!((fam.upper_expect(|_| c).unwrap() - c).abs() <= TOL);

        // sub-additivity
        let e_sum = fam.upper_expect(|x| phi(x) + psi(x)).unwrap();
        prop_assert!(e_sum <= e_phi + e_psi + TOL);

        // positive homogeneity
        let e_scaled = fam.upper_expect(|x| lambda * phi(x)).unwrap();
        prop_assert!((e_scaled - lambda * e_phi).abs() <= TOL * (1.0 + lambda * e_phi.abs()));

        // conjugacy is exact
        let lower = fam.lower_expect(&phi).unwrap();
        prop_assert_eq!(lower, -fam.upper_expect(|x| -phi(x)).unwrap());
        prop_assert!(lower <= e_phi + TOL);
    }

    #[test]
    fn translation_by_constants((pf, f, _g, c, _l) in with_tables()) {
        let fam = pf.family();
        let phi = pf.lift(&f);
        let shifted = fam.upper_expect(|x| phi(x) + c).unwrap();
        prop_assert!((shifted - fam.upper_expect(&phi).unwrap() - c).abs() <= 1e-11);
    }
}
