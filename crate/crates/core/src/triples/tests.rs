use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::descriptors::{random_band, random_string, BandDescriptor, StringDescriptor};
use crate::poly::Poly;

fn q() -> Field {
    Field::Rational
}

fn f5() -> Field {
    Field::prime(5).unwrap()
}

fn m(field: Field, rows: &[&[i64]]) -> Mat {
    Mat::from_ints(field, rows)
}

#[test]
fn two_cycle_band_gluing_matrices() {
    let f = f5();
    let b = BandDescriptor::linear(2, vec![0, 1, 1, 3, 1, -2], 1, &f.int(3)).unwrap();
    let t = band_to_triple(&b);
    assert_eq!(t.degrees, vec![vec![0, 1, 1], vec![-2, 1, 3]]);
    assert_eq!(t.cols, vec![3, 3]);
    let id = Mat::identity(f, 3);
    assert_eq!(t.at_zero[0], id);
    assert_eq!(t.at_inf[0], id);
    assert_eq!(t.at_inf[1], m(f, &[&[3, 0, 0], &[0, 1, 0], &[0, 0, 1]]));
    assert_eq!(t.at_zero[1], m(f, &[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]));
}

#[test]
fn two_cycle_band_with_blocks() {
    let f = f5();
    let p = Poly::from_ints(f, &[2, 0, 1]);
    let b = BandDescriptor::new(2, vec![0, 1, 1, 3, 1, -2], 2, p.clone()).unwrap();
    let t = band_to_triple(&b);
    assert_eq!(t.cols, vec![12, 12]);
    let j = Mat::companion(&p.pow(2));
    assert_eq!(t.at_inf[1].block(0, 0, 4, 4), j);
    t.validate().unwrap();
}

#[test]
fn two_cycle_string_gluing_matrices() {
    let f = q();
    let s = StringDescriptor::new(2, vec![-1, 0, 1, -1, 1], 2).unwrap();
    let t = string_to_triple(&s, f);
    assert_eq!(t.degrees, vec![vec![-1, 0], vec![-1, 1, 1]]);
    assert_eq!(t.at_zero[0], m(f, &[&[0, 1, 0], &[1, 0, 0]]));
    assert_eq!(t.at_inf[0], m(f, &[&[0, 0, 1], &[0, 1, 0]]));
    assert_eq!(t.at_zero[1], Mat::identity(f, 3));
    assert_eq!(t.at_inf[1], Mat::identity(f, 3));
}

#[test]
fn compactifying_string() {
    let f = q();
    let t = string_to_triple(&StringDescriptor::new(1, vec![-1], 1).unwrap(), f);
    assert_eq!(t.at_zero[0], m(f, &[&[1, 0]]));
    assert_eq!(t.at_inf[0], m(f, &[&[0, 1]]));
    assert_eq!(cohomology(&t), Cohomology { h0: 0, h1: 0 });
}

#[test]
fn display_lists_labeled_matrices() {
    let t = string_to_triple(&StringDescriptor::new(1, vec![-1], 1).unwrap(), q());
    assert_eq!(t.to_string(), "M(L1, 0) [node 1]\n  [ 1 0 ]  -1\nM(L1, inf) [node 1]\n  [ 0 1 ]  -1\n");
}

#[test]
fn oracle_small_cases() {
    for n in 1..=4 {
        let o = NodalTriple::structure_sheaf(q(), n);
        assert_eq!(hom_dim(&o, &o), 1);
        assert_eq!(cohomology(&o), Cohomology { h0: 1, h1: 1 });
    }
    let f2 = band_to_triple(&BandDescriptor::unipotent(q(), 1, 2));
    assert_eq!(hom_dim(&f2, &f2), 2);
    for h in 1..=4 {
        let fh = band_to_triple(&BandDescriptor::unipotent(q(), 2, h));
        assert_eq!(cohomology(&fh), Cohomology { h0: 1, h1: 1 });
    }
    let o = NodalTriple::structure_sheaf(q(), 1);
    let l = band_to_triple(&BandDescriptor::linear(1, vec![1], 1, &q().int(4)).unwrap());
    assert_eq!(hom_dim(&o, &l), 1);
    assert_eq!(hom_dim(&l, &o), 0);
}

#[test]
fn isomorphism_checks() {
    let f = f5();
    let o = NodalTriple::structure_sheaf(f, 1);
    let l = band_to_triple(&BandDescriptor::linear(1, vec![0], 1, &f.int(2)).unwrap());
    assert_eq!(is_isomorphic(&o, &l, DEFAULT_ISO_SEED), IsoResult::NotIsomorphic);
    assert_eq!(is_isomorphic(&l, &l, DEFAULT_ISO_SEED), IsoResult::Isomorphic);
    let b = BandDescriptor::linear(2, vec![0, 1, 1, 3, 1, -2], 1, &f.int(3)).unwrap();
    let r = crate::descriptors::rotate(&b, 1);
    assert_eq!(is_isomorphic(&band_to_triple(&b), &band_to_triple(&r), 7), IsoResult::Isomorphic);
}

#[test]
fn rotations_are_isomorphic_over_rationals() {
    let b = BandDescriptor::linear(1, vec![0, 2, 1], 1, &q().int(-2)).unwrap();
    let t = band_to_triple(&b);
    for passes in 1..3 {
        let r = band_to_triple(&crate::descriptors::rotate(&b, passes));
        assert_eq!(is_isomorphic(&t, &r, DEFAULT_ISO_SEED), IsoResult::Isomorphic);
    }
}

#[test]
fn json_round_trip() {
    let f = f5();
    let b = BandDescriptor::linear(2, vec![0, 1, 1, 3, 1, -2], 1, &f.int(3)).unwrap();
    let t = band_to_triple(&b);
    assert_eq!(NodalTriple::from_json(f, &t.to_json()).unwrap(), t);
}

#[test]
fn pushforward_of_structure_sheaf() {
    let o2 = NodalTriple::structure_sheaf(Field::prime(2).unwrap(), 2);
    let p = o2.pushforward(2).unwrap();
    assert_eq!(p.at_zero[0], Mat::identity(p.field, 2));
    assert_eq!(p.at_inf[0], m(p.field, &[&[0, 1], &[1, 0]]));
    let f2 = band_to_triple(&BandDescriptor::unipotent(p.field, 1, 2));
    assert_eq!(is_isomorphic(&p, &f2, 1), IsoResult::Isomorphic);
    let q = o2.pushforward(2).unwrap();
    let o3 = NodalTriple::structure_sheaf(f5(), 2).pushforward(2).unwrap();
    assert_eq!(hom_dim(&q, &q), 2);
    assert_eq!(hom_dim(&o3, &o3), 2);
}

#[test]
fn dual_of_line_bundle() {
    let f = q();
    let b = BandDescriptor::linear(1, vec![2], 1, &f.int(3)).unwrap();
    let d = band_to_triple(&b).dual().unwrap();
    let expect = band_to_triple(&BandDescriptor::linear(1, vec![-2], 1, &f.int(3).inv().unwrap()).unwrap());
    assert_eq!(is_isomorphic(&d, &expect, DEFAULT_ISO_SEED), IsoResult::Isomorphic);
}

#[test]
fn cuspidal_oracle() {
    let f = q();
    let o = CuspidalTriple::structure_sheaf(f);
    assert_eq!(o.end_dim(), 1);
    assert_eq!(o.cohomology(), Cohomology { h0: 1, h1: 1 });
    let oo = o.direct_sum(&o);
    assert_eq!(oo.end_dim(), 4);
    let line = CuspidalTriple::new(f, vec![0], m(f, &[&[1]]), m(f, &[&[5]])).unwrap();
    assert_eq!(line.end_dim(), 1);
    assert_eq!(line.cohomology(), Cohomology { h0: 0, h1: 0 });
    assert_eq!(o.is_isomorphic(&line, 1), IsoResult::NotIsomorphic);
    let tf = CuspidalTriple::new(f, vec![0], m(f, &[&[1, 0]]), m(f, &[&[0, 1]])).unwrap();
    assert_eq!(tf.end_dim(), 1);
    assert_eq!(tf.cohomology().chi(), 1 + 2 - 2);
    assert_eq!(CuspidalTriple::from_json(f, &tf.to_json()).unwrap(), tf);
}

#[test]
fn cuspidal_dual() {
    let f = f5();
    let tf = CuspidalTriple::new(f, vec![0], m(f, &[&[1, 0]]), m(f, &[&[0, 1]])).unwrap();
    let d = tf.dual();
    assert!(!d.is_locally_free());
    assert_eq!(d.degree(), -tf.degree());
    assert_eq!(d.dual().is_isomorphic(&tf, 1), IsoResult::Isomorphic);
    let line = CuspidalTriple::new(f, vec![2], m(f, &[&[1]]), m(f, &[&[3]])).unwrap();
    let expect = CuspidalTriple::new(f, vec![-2], m(f, &[&[1]]), m(f, &[&[-3]])).unwrap();
    assert_eq!(line.dual().is_isomorphic(&expect, 1), IsoResult::Isomorphic);
    let o = CuspidalTriple::structure_sheaf(f);
    assert_eq!(o.dual(), o);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_triples_are_valid(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_band(f5(), n, 2, 3, 2, &mut rng);
        band_to_triple(&b).validate().unwrap();
        let s = random_string(n, 5, 3, &mut rng);
        string_to_triple(&s, f5()).validate().unwrap();
    }

    #[test]
    fn hom_is_additive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = band_to_triple(&random_band(f5(), 2, 2, 2, 1, &mut rng));
        let b = string_to_triple(&random_string(2, 3, 2, &mut rng), f5());
        let c = band_to_triple(&random_band(f5(), 2, 2, 2, 1, &mut rng));
        let ab = a.direct_sum(&b);
        prop_assert_eq!(hom_dim(&ab, &c), hom_dim(&a, &c) + hom_dim(&b, &c));
        prop_assert_eq!(hom_dim(&c, &ab), hom_dim(&c, &a) + hom_dim(&c, &b));
    }

    #[test]
    fn euler_characteristic_matches_degrees(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = string_to_triple(&random_string(n, 5, 3, &mut rng), q());
        let b = band_to_triple(&random_band(q(), n, 2, 3, 1, &mut rng));
        for t in [s, b] {
            let h = cohomology(&t);
            let fibers: usize = t.degrees.iter().map(|d| 2 * d.len()).sum();
            let chi: i64 = t.degrees.iter().flatten().map(|a| a + 1).sum::<i64>() + t.cols.iter().sum::<usize>() as i64 - fibers as i64;
            prop_assert_eq!(h.chi(), chi);
            prop_assert_eq!(h.h0, hom_dim(&NodalTriple::structure_sheaf(t.field, n), &t));
        }
    }
}
