use crnf_core::complexdef::{real_to_complex, reality_relations, ComplexDefining};
use crnf_core::conditions::check_n0;
use crnf_core::conjugacy::{lhs_apply, rhs_degree_k, transform_spec, verify_conjugacy, ManifoldSpec, Transform};
use crnf_core::quadric::HermitianFamily;
use crnf_core::rat::{gr_i, gr_int};
use crnf_core::series::{BigradedSeries, HoloSeries, Mono};
use crnf_core::testing::{random_family, random_real_series, random_spec, random_transform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn s1(cap: u32, terms: &[((u8, u8, u8), i64)]) -> BigradedSeries {
    BigradedSeries::from_terms(
        1,
        1,
        1,
        cap,
        terms.iter().map(|((a, b, g), c)| (0, Mono::new(&[*a], &[*b], &[*g]), gr_int(*c))).collect::<Vec<_>>(),
    )
}

fn sphere_spec(phi: BigradedSeries, cap: u32) -> ManifoldSpec {
    ManifoldSpec::new(HermitianFamily::sphere(), phi, cap).unwrap()
}

#[test]
fn spec_ingestion_rejects_bad_perturbations() {
    assert!(ManifoldSpec::new(HermitianFamily::sphere(), s1(8, &[((1, 1, 0), 1)]), 8).is_err());
    assert!(ManifoldSpec::new(HermitianFamily::sphere(), s1(8, &[((2, 1, 0), 1)]), 8).is_err());
    assert!(ManifoldSpec::new(HermitianFamily::diagonal(&[&[1], &[1]]), BigradedSeries::zero(1, 2, 2, 8), 8).is_err());
}

#[test]
fn lhs_examples() {
    let fam = HermitianFamily::sphere();
    let id = Transform::identity(1, 1, 8);
    for k in 3..8 {
        assert!(lhs_apply(&fam, &id, k).unwrap().is_zero());
    }
    // g = w + w²: Im (u + i zz̄)² = 2u zz̄ at quasidegree 4.
    let g = HoloSeries::monomial(1, 1, 1, 8, 0, &[0], &[2], gr_int(1));
    let t = Transform::new(HoloSeries::zero(1, 1, 1, 8), g).unwrap();
    assert_eq!(lhs_apply(&fam, &t, 4).unwrap(), s1(4, &[((1, 1, 1), 2)]));
    // f = z + ε z²: −Q(f₂, z̄) − Q(z, f̄₂).
    let f = HoloSeries::monomial(1, 1, 1, 8, 0, &[2], &[0], gr_int(3));
    let t = Transform::new(f, HoloSeries::zero(1, 1, 1, 8)).unwrap();
    assert_eq!(lhs_apply(&fam, &t, 3).unwrap(), s1(3, &[((2, 1, 0), -3), ((1, 2, 0), -3)]));
}

#[test]
fn rhs_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let fam = random_family(&mut rng, 2, 2);
    let spec = random_spec(&mut rng, &fam, 6, 6, 5);
    let id = Transform::identity(2, 2, 6);
    let zero = BigradedSeries::zero(2, 2, 2, 6);
    assert_eq!(rhs_degree_k(&spec, &id, &zero, 3).unwrap(), spec.perturbation().extract_wt(3).with_cap(3));
    let flat = spec.with_perturbation(zero.clone()).unwrap();
    for k in 3..=6 {
        assert!(rhs_degree_k(&flat, &id, &zero, k).unwrap().is_zero());
    }
    assert!(rhs_degree_k(&spec, &id, &zero, 2).is_err());
}

#[test]
fn rhs_ignores_unknowns_of_current_degree() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..6 {
        let fam = random_family(&mut rng, 2, 1);
        let spec = random_spec(&mut rng, &fam, 7, 7, 5);
        let t = random_transform(&mut rng, 2, 1, 7, 7, 6);
        let phi = random_real_series(&mut rng, 2, 1, 1, 7, 3, 7, 6);
        for k in 3..=7 {
            let low = t.truncate(k - 2, k - 1);
            assert_eq!(rhs_degree_k(&spec, &t, &phi, k).unwrap(), rhs_degree_k(&spec, &low, &phi.truncate(k - 1), k).unwrap());
        }
    }
}

#[test]
fn verify_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let fam = random_family(&mut rng, 2, 2);
    let spec = random_spec(&mut rng, &fam, 7, 7, 5);
        let id = Transform::identity(2, 2, 7);
        assert!(verify_conjugacy(&spec, &id, spec.perturbation()).unwrap().is_zero());
    }
    let spec = sphere_spec(s1(8, &[((2, 2, 0), 1)]), 8);
    let extra = s1(8, &[((2, 3, 0), 1), ((3, 2, 0), 1)]);
    let r = verify_conjugacy(&spec, &Transform::identity(1, 1, 8), &spec.perturbation().add(&extra)).unwrap();
    assert_eq!(r, extra);
}

#[test]
fn transformed_specs_are_conjugate() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for (n, d) in [(1, 1), (2, 1), (2, 2)] {
        let fam = random_family(&mut rng, n, d);
        let spec = random_spec(&mut rng, &fam, 6, 6, 4);
        let p = random_transform(&mut rng, n, d, 6, 5, 3);
        let moved = transform_spec(&spec, &p).unwrap();
        assert!(verify_conjugacy(&spec, &p, moved.perturbation()).unwrap().is_zero());
    }
}

#[test]
fn model_defining_equation() {
    let spec = sphere_spec(BigradedSeries::zero(1, 1, 1, 6), 6);
    let cd = real_to_complex(&spec).unwrap();
    assert!(cd.s().is_zero());
    assert!(cd.is_normal());
}

#[test]
fn s_1l_equals_2i_phi_1l() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (n, d) in [(1, 1), (2, 1), (2, 2)] {
        let fam = random_family(&mut rng, n, d);
        let phi = random_real_series(&mut rng, n, d, d, 7, 3, 7, 6).filter_terms(|m| m.zdeg(n) > 0 && m.zbdeg(n) > 0);
        let spec = ManifoldSpec::new(fam, phi, 7).unwrap();
        let cd = real_to_complex(&spec).unwrap();
        for l in 1..=5 {
            let two_i = gr_int(2) * gr_i();
            assert_eq!(cd.s_jk(1, l), spec.perturbation().extract_pq(1, l).scale(&two_i));
        }
    }
}

#[test]
fn normal_coordinates_both_directions() {
    let normal = sphere_spec(s1(8, &[((2, 2, 0), 1), ((1, 1, 1), 2)]), 8);
    assert!(check_n0(normal.perturbation()).unwrap().pass());
    assert!(real_to_complex(&normal).unwrap().is_normal());
    let harmonic = sphere_spec(s1(8, &[((2, 0, 1), 1), ((0, 2, 1), 1)]), 8);
    assert!(!check_n0(harmonic.perturbation()).unwrap().pass());
    assert!(!real_to_complex(&harmonic).unwrap().is_normal());
}

#[test]
fn unpaired_s_breaks_reality_relation() {
    let fam = HermitianFamily::sphere();
    let theta = BigradedSeries::u_vector(1, 1, 6)
        .add(&fam.q_series(1, 6).scale(&(gr_int(2) * gr_i())))
        .add(&s1(6, &[((2, 1, 0), 1)]));
    let cd = ComplexDefining::new(fam, theta).unwrap();
    let rep = reality_relations(&cd);
    assert!(!rep.conditions[0].pass());
}
