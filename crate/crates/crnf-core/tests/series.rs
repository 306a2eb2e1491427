use crnf_core::rat::{gr, gr_i, gr_int, rat, GaussRat};
use crnf_core::series::{substitute_full, BigradedSeries, HoloSeries, Mono};
use crnf_core::testing::{random_holo, random_real_series, random_series};
use crnf_core::Error;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mono1(a: u8, b: u8, g: u8) -> Mono {
    Mono::new(&[a], &[b], &[g])
}

fn s1(cap: u32, terms: &[(Mono, GaussRat)]) -> BigradedSeries {
    BigradedSeries::from_terms(1, 1, 1, cap, terms.iter().map(|(m, c)| (0, m.clone(), c.clone())).collect::<Vec<_>>())
}

#[test]
fn arithmetic_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let phi = random_real_series(&mut rng, 2, 1, 1, 8, 3, 8, 6);
    assert_eq!(BigradedSeries::zero(2, 1, 1, 8).add(&phi), phi);
    let zz = s1(8, &[(mono1(1, 1, 0), gr_int(1))]);
    assert_eq!(zz.mul(&zz), s1(8, &[(mono1(2, 2, 0), gr_int(1))]));
    let lin = s1(1, &[(mono1(1, 0, 0), gr_int(1)), (mono1(0, 1, 0), gr_int(1))]);
    assert!(lin.mul(&lin).is_zero());
}

#[test]
fn mismatched_shapes_are_rejected() {
    let a = BigradedSeries::zero(1, 1, 1, 4);
    let b = BigradedSeries::zero(2, 1, 1, 4);
    assert!(matches!(a.try_add(&b), Err(Error::DimensionMismatch(_))));
    assert!(matches!(a.try_mul(&b), Err(Error::DimensionMismatch(_))));
}

#[test]
fn conjugation_examples() {
    let x = BigradedSeries::from_terms(2, 1, 1, 4, [(0, Mono::new(&[1, 0], &[0, 1], &[0]), gr_i())]);
    let want = BigradedSeries::from_terms(2, 1, 1, 4, [(0, Mono::new(&[0, 1], &[1, 0], &[0]), -gr_i())]);
    assert_eq!(x.conjugate(), want);
    let real = s1(6, &[(mono1(2, 1, 0), gr_int(1)), (mono1(1, 2, 0), gr_int(1))]);
    assert!(real.is_real_valued());
    assert_eq!(real.conjugate(), real);
    assert!(s1(6, &[(mono1(1, 1, 0), gr_int(1))]).is_real_valued());
    assert!(!s1(6, &[(mono1(1, 1, 0), gr_i())]).is_real_valued());
}

#[test]
fn extraction_examples() {
    let q = s1(8, &[(mono1(1, 1, 0), gr_int(1))]);
    let x = q.add(&s1(8, &[(mono1(2, 1, 1), gr_int(1))]));
    assert_eq!(x.extract_pq(1, 1), q);
    assert!(x.extract_pq(3, 0).is_zero());
}

#[test]
fn substitute_w_examples() {
    let v = s1(8, &[(mono1(1, 1, 0), gr_int(1))]);
    let w = HoloSeries::monomial(1, 1, 1, 8, 0, &[0], &[1], gr_int(1));
    let want = s1(8, &[(mono1(0, 0, 1), gr_int(1)), (mono1(1, 1, 0), gr_i())]);
    assert_eq!(w.substitute_w(&v, 1).unwrap(), want);

    // (u + i zz̄)² = u² + 2i u zz̄ − z²z̄².
    let w2 = HoloSeries::monomial(1, 1, 1, 8, 0, &[0], &[2], gr_int(1));
    let want = s1(8, &[(mono1(0, 0, 2), gr_int(1)), (mono1(1, 1, 1), gr(rat(0, 1), rat(2, 1))), (mono1(2, 2, 0), gr_int(-1))]);
    assert_eq!(w2.substitute_w(&v, 1).unwrap(), want);

    let zero = BigradedSeries::zero(1, 1, 1, 8);
    assert_eq!(w2.substitute_w(&zero, 1).unwrap(), s1(8, &[(mono1(0, 0, 2), gr_int(1))]));
}

#[test]
fn substitute_w_rejects_bad_arguments() {
    let w = HoloSeries::monomial(1, 1, 1, 8, 0, &[0], &[1], gr_int(1));
    let nonreal = s1(8, &[(mono1(1, 1, 0), gr_i())]);
    assert!(matches!(w.substitute_w(&nonreal, 1), Err(Error::NotRealValued(_))));
    let low = s1(8, &[(mono1(1, 0, 0), gr_int(1)), (mono1(0, 1, 0), gr_int(1))]);
    assert!(matches!(w.substitute_w(&low, 1), Err(Error::WeightTooLow { .. })));
}

#[test]
fn substitute_full_examples() {
    let v = s1(8, &[(mono1(1, 1, 0), gr_int(1))]);
    let f = HoloSeries::monomial(1, 1, 1, 8, 0, &[1], &[0], gr_int(1));
    let g = HoloSeries::monomial(1, 1, 1, 8, 0, &[0], &[1], gr_int(1)).add(&HoloSeries::monomial(1, 1, 1, 8, 0, &[0], &[2], gr_int(1)));
    let u = s1(8, &[(mono1(0, 0, 1), gr_int(1))]);
    let want = s1(8, &[(mono1(0, 0, 1), gr_int(1)), (mono1(0, 0, 2), gr_int(1)), (mono1(2, 2, 0), gr_int(-1))]);
    assert_eq!(substitute_full(&u, &f, &g, &v).unwrap(), want);
    assert!(substitute_full(&BigradedSeries::zero(1, 1, 1, 8), &f, &g, &v).unwrap().is_zero());
}

fn arb_series(seed: u64, real: bool) -> BigradedSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if real {
        random_real_series(&mut rng, 2, 2, 2, 7, 0, 7, 5)
    } else {
        random_series(&mut rng, 2, 2, 1, 7, 0, 7, 5)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_is_involutive_and_multiplicative(a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (arb_series(a, false), arb_series(b, false));
        prop_assert_eq!(x.conjugate().conjugate(), x.clone());
        prop_assert_eq!(x.mul(&y).conjugate(), x.conjugate().mul(&y.conjugate()));
        let r = arb_series(a, true);
        prop_assert_eq!(r.conjugate(), r);
    }

    #[test]
    fn products_respect_grading(a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (arb_series(a, false), arb_series(b, false));
        let p = x.mul(&y);
        for k in 0..=7 {
            let mut want = BigradedSeries::zero(2, 2, 1, 7);
            for i in 0..=k {
                want = want.add(&x.extract_wt(i).mul(&y.extract_wt(k - i)));
            }
            prop_assert_eq!(p.extract_wt(k), want);
        }
    }

    #[test]
    fn bidegree_pieces_partition(a in any::<u64>()) {
        let x = arb_series(a, true);
        let mut acc = BigradedSeries::zero(2, 2, 2, 7);
        for (p, q) in x.bidegrees() {
            acc = acc.add(&x.extract_pq(p, q));
        }
        prop_assert_eq!(acc, x);
    }

    #[test]
    fn substitute_w_is_additive(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(a);
        let g1 = random_holo(&mut rng, 2, 1, 1, 7, 0, 7, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(b);
        let g2 = random_holo(&mut rng, 2, 1, 1, 7, 0, 7, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(c);
        let v = random_real_series(&mut rng, 2, 1, 1, 7, 2, 6, 3);
        let lhs = g1.add(&g2).substitute_w(&v, 1).unwrap();
        let rhs = g1.substitute_w(&v, 1).unwrap().add(&g2.substitute_w(&v, 1).unwrap());
        prop_assert_eq!(lhs, rhs);
        let renamed = g1.substitute_w(&BigradedSeries::zero(2, 1, 1, 7), 1).unwrap();
        prop_assert_eq!(&renamed, g1.as_series());
        prop_assert!(!renamed.terms().iter().any(|(_, _, c)| c.is_zero()));
    }
}
