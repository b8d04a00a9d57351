use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ellsheaf::birkhoff::{birkhoff_factor, random_elementary};
use ellsheaf::descriptors::{random_band, random_string, rotate, Descriptor};
use ellsheaf::sheaf_ops::{cohomology_formula, dual, tensor_bands};
use ellsheaf::stable::{certify_simple, cuspidal_simple_matrix, stable_band_triple, stable_sequence};
use ellsheaf::triples::{band_to_triple, cohomology, hom_dim, hom_dim_cuspidal, IsoResult, NodalTriple, Triple};
use ellsheaf::{Field, LaurentMatrix};

fn f5() -> Field {
    Field::Prime(5)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn birkhoff_recovers_diagonal(seed in any::<u64>(), r in 1usize..5, f in 0usize..2) {
        let field = if f == 0 { Field::Rational } else { Field::Prime(7) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let exps: Vec<i64> = (0..r).map(|i| (seed as i64 >> (3 * i)).rem_euclid(7) - 3).collect();
        let a = random_elementary(field, r, r, 1, false, &mut rng);
        let b = random_elementary(field, r, r, 1, true, &mut rng);
        let m = b.mul(&LaurentMatrix::diagonal(field, &exps)).mul(&a);
        let fac = birkhoff_factor(&m).unwrap();
        let mut want = exps.clone();
        want.sort_unstable();
        prop_assert_eq!(&fac.exponents, &want);
        prop_assert!(fac.verify(&m));
    }

    #[test]
    fn dual_is_an_involution(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = Descriptor::Band(random_band(f5(), n, 3, 3, 2, &mut rng));
        let s = Descriptor::String(random_string(n, 6, 3, &mut rng));
        for x in [b, s] {
            prop_assert_eq!(dual(&dual(&x)).canonical(), x.canonical());
            if matches!(x, Descriptor::Band(_)) {
                prop_assert_eq!(dual(&x).charge().degree, -x.charge().degree);
            }
        }
    }

    #[test]
    fn descriptor_json_round_trips(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = Descriptor::Band(random_band(Field::Rational, n, 3, 3, 2, &mut rng));
        let s = Descriptor::String(random_string(n, 6, 3, &mut rng));
        for x in [b, s] {
            prop_assert_eq!(Descriptor::from_json(Field::Rational, &x.to_json()).unwrap(), x);
        }
    }

    #[test]
    fn canonical_form_ignores_rotation(seed in any::<u64>(), n in 1usize..3, passes in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_band(f5(), n, 3, 2, 1, &mut rng);
        let c = Descriptor::Band(b.clone()).canonical();
        prop_assert_eq!(Descriptor::Band(rotate(&b, passes)).canonical(), c.clone());
        prop_assert_eq!(c.clone().canonical(), c);
    }

    #[test]
    fn formula_agrees_with_oracle(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_band(f5(), n, 3, 2, 2, &mut rng);
        prop_assert_eq!(cohomology_formula(&b), cohomology(&band_to_triple(&b)));
    }

    #[test]
    fn serre_and_hom_duality(seed in any::<u64>(), n in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = band_to_triple(&random_band(f5(), n, 2, 2, 1, &mut rng));
        let b = band_to_triple(&random_band(f5(), n, 2, 2, 1, &mut rng));
        let (da, db) = (a.dual().unwrap(), b.dual().unwrap());
        prop_assert_eq!(hom_dim(&a, &b), hom_dim(&db, &da));
        prop_assert_eq!(cohomology(&a).h1, cohomology(&da).h0);
        prop_assert_eq!(cohomology(&a).h1, hom_dim(&a, &NodalTriple::structure_sheaf(f5(), n)));
    }

    #[test]
    fn tensor_charge_is_multiplicative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_band(Field::Rational, 1, 3, 2, 2, &mut rng);
        let b = random_band(Field::Rational, 1, 3, 2, 2, &mut rng);
        let (ca, cb) = (a.charge(), b.charge());
        let c = tensor_bands(&a, &b).unwrap().charge();
        prop_assert_eq!(c.rank, ca.rank * cb.rank);
        prop_assert_eq!(c.degree, ca.rank * cb.degree + cb.rank * ca.degree);
    }

    #[test]
    fn stable_sequences_are_balanced(r in 1i64..40, d in -60i64..60) {
        prop_assume!(gcd(r, d) == 1);
        let s = stable_sequence(r, d).unwrap();
        prop_assert_eq!(s.sequence.len() as i64, r);
        prop_assert_eq!(s.sequence.iter().sum::<i64>(), d);
        prop_assert!(s.base.iter().all(|&x| x == 0 || x == 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn stable_bands_are_simple(r in 1i64..8, d in -8i64..8, lambda in 1i64..7) {
        prop_assume!(gcd(r, d) == 1);
        let t = stable_band_triple(r, d, &Field::Prime(7).int(lambda)).unwrap();
        prop_assert!(certify_simple(&t));
    }

    #[test]
    fn cuspidal_dual_is_simple_and_involutive(r in 1i64..6, d in -6i64..6, lambda in 0i64..7) {
        prop_assume!(gcd(r, d) == 1);
        let f = Field::Prime(7);
        let t = cuspidal_simple_matrix(r, d, &f.int(lambda)).unwrap();
        let dt = t.dual();
        prop_assert_eq!(dt.degree(), -t.degree());
        prop_assert!(certify_simple(&Triple::Cuspidal(dt.clone())));
        prop_assert_eq!(dt.dual().is_isomorphic(&t, 1), IsoResult::Isomorphic);
        prop_assert_eq!(hom_dim_cuspidal(&t, &t), 1);
    }
}
