use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use energylab::bsg::{bsg_extract, verify_bsg, VerifyMode};
use energylab::energy::{quarter_power_check, BRUTE_FORCE_CAP};
use energylab::set::affine_image;
use energylab::{energy, energy_bruteforce, EnergyLaw, FiniteSet, GroundField};

fn int_set(max: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::btree_set(-40i64..40, 1..max).prop_map(|s| s.into_iter().collect())
}

fn nonzero_set(max: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::btree_set(1i64..60, 1..max).prop_map(|s| s.into_iter().collect())
}

fn laws() -> impl Strategy<Value = EnergyLaw> {
    prop_oneof![Just(EnergyLaw::Add), Just(EnergyLaw::Mul)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_is_symmetric(a in nonzero_set(12), b in nonzero_set(12), law in laws()) {
        let (a, b) = (FiniteSet::rationals(&a), FiniteSet::rationals(&b));
        prop_assert_eq!(energy(&a, &b, law).unwrap(), energy(&b, &a, law).unwrap());
    }

    #[test]
    fn energy_matches_enumeration_mod_p(a in nonzero_set(14), b in nonzero_set(14), law in laws()) {
        let f = GroundField::prime(61).unwrap();
        let (a, b) = (FiniteSet::from_ints(f, &a).unwrap(), FiniteSet::from_ints(f, &b).unwrap());
        prop_assert_eq!(
            energy(&a, &b, law).unwrap(),
            energy_bruteforce(&a, &b, law, BRUTE_FORCE_CAP).unwrap()
        );
    }

    #[test]
    fn additive_energy_survives_affine_maps(a in int_set(16), scale in 1i64..9, shift in -20i64..20) {
        let q = GroundField::char0();
        let a = FiniteSet::rationals(&a);
        let image = affine_image(&a, &q.int(scale), &q.int(shift)).unwrap();
        prop_assert_eq!(
            energy(&a, &a, EnergyLaw::Add).unwrap(),
            energy(&image, &image, EnergyLaw::Add).unwrap()
        );
    }

    #[test]
    fn multiplicative_energy_survives_dilation(a in nonzero_set(16), scale in 1i64..9) {
        let q = GroundField::char0();
        let a = FiniteSet::rationals(&a);
        let image = affine_image(&a, &q.int(scale), &q.int(0)).unwrap();
        prop_assert_eq!(
            energy(&a, &a, EnergyLaw::Mul).unwrap(),
            energy(&image, &image, EnergyLaw::Mul).unwrap()
        );
    }

    #[test]
    fn energy_sits_between_trivial_bounds(a in nonzero_set(20), law in laws()) {
        let a = FiniteSet::rationals(&a);
        let n = a.len() as u128;
        let e = energy(&a, &a, law).unwrap().get();
        prop_assert!(2 * n * n - n <= e && e <= n * n * n);
    }

    #[test]
    fn quarter_power_holds_for_partitions(a in nonzero_set(24), labels in prop::collection::vec(0usize..4, 24), law in laws()) {
        let a = FiniteSet::rationals(&a);
        let parts: Vec<FiniteSet> = (0..4)
            .map(|j| a.filter_indexed(|i, _| labels[i] == j))
            .filter(|p| !p.is_empty())
            .collect();
        prop_assert!(quarter_power_check(&parts, law).unwrap().pass);
    }

    #[test]
    fn certificates_verify(a in int_set(12), k in 2u32..4) {
        let a = FiniteSet::rationals(&a);
        prop_assume!(a.len() >= 2);
        let c = bsg_extract(&a, k, EnergyLaw::Add).unwrap();
        prop_assert!(c.constants_hold());
        let v = verify_bsg(&c, &a, VerifyMode::auto(&c, 200, 1)).unwrap();
        prop_assert!(v.pass, "{:?}", v.counterexample);
        prop_assert!(c.big_k >= BigRational::from_integer(BigInt::from(1)));
    }
}
