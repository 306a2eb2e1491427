use crnf::probe::{bigdenom_probe, geometric_ratio, norm_growth, sigma_min_k, DegreeNorm, ProbeOp};
use crnf_core::conjugacy::Transform;
use crnf_core::diagnostics::ProbeConfig;
use crnf_core::quadric::HermitianFamily;
use crnf_core::rat::gr_int;
use crnf_core::series::{BigradedSeries, Mono};

#[test]
fn sigma_min_on_the_sphere() {
    let fam = HermitianFamily::sphere();
    // K(z) = z z̄ with ‖z‖ = 1 and ‖z z̄‖ = 1/√2.
    let s1 = sigma_min_k(&fam, 1).unwrap();
    assert!((s1.sigma_min - 0.5f64.sqrt()).abs() < 1e-12);
    assert!((s1.rescaled - 1.0).abs() < 1e-12);
    let s2 = sigma_min_k(&fam, 2).unwrap();
    assert!((s2.rescaled - 1.0).abs() < 1e-12);
}

#[test]
fn sigma_min_rejects_invalid_family() {
    let bad = HermitianFamily::diagonal(&[&[1, 0]]);
    assert!(sigma_min_k(&bad, 1).is_err());
}

#[test]
fn delta_cubed_rescaled_values_are_constant() {
    let fam = HermitianFamily::sphere();
    let cfg = ProbeConfig { m: vec![3], q: 0, i_min: 1, i_max: 12 };
    let t = bigdenom_probe(&fam, ProbeOp::DeltaCubed, &cfg).unwrap();
    // Singular value (i+3)(i+2)(i+1)/√20 after weighting, so the rescaled norm is √20.
    for v in t.rescaled(0) {
        assert!((v - 20f64.sqrt()).abs() < 1e-9, "{v}");
    }
    assert!(t.bounded());
    assert!(t.rows.iter().all(|r| !r.singular));
}

#[test]
fn single_degree_range_is_trivially_bounded() {
    let fam = HermitianFamily::sphere();
    let cfg = ProbeConfig { m: vec![2, 3], q: 0, i_min: 3, i_max: 3 };
    let t = bigdenom_probe(&fam, ProbeOp::L1Tilde, &cfg).unwrap();
    assert!(t.bounded());
    assert_eq!(t.rows.len(), 2);
}

#[test]
fn order_multi_index_must_match_the_operator() {
    let fam = HermitianFamily::sphere();
    let cfg = ProbeConfig { m: vec![3, 3], q: 0, i_min: 1, i_max: 2 };
    assert!(bigdenom_probe(&fam, ProbeOp::DeltaCubed, &cfg).is_err());
    let empty = ProbeConfig { m: vec![3], q: 0, i_min: 4, i_max: 2 };
    assert!(bigdenom_probe(&fam, ProbeOp::DeltaCubed, &empty).is_err());
}

#[test]
fn growth_of_zero_and_of_one_monomial() {
    let t = Transform::identity(1, 1, 8);
    let g = norm_growth(&BigradedSeries::zero(1, 1, 1, 8), &t);
    assert!(g.phi.iter().all(|e| e.norm == 0.0));
    assert_eq!(g.phi_ratio, None);

    // z²z̄u has quasidegree 5 and normalized weight 2!·1!·1!/3! = 1/3.
    let x = BigradedSeries::from_terms(1, 1, 1, 8, [(0, Mono::new(&[2], &[1], &[1]), gr_int(1))]);
    let g = norm_growth(&x, &t);
    let nonzero: Vec<&DegreeNorm> = g.phi.iter().filter(|e| e.norm > 0.0).collect();
    assert_eq!(nonzero.len(), 1);
    assert_eq!(nonzero[0].degree, 5);
    assert!((nonzero[0].norm - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
}

#[test]
fn planted_geometric_growth_is_recovered() {
    let rho = 1.7f64;
    let mut norms = Vec::new();
    for k in 2..=10u32 {
        norms.push(DegreeNorm { degree: 2 * k, norm: 0.3 * rho.powi(2 * k as i32) });
    }
    let r = geometric_ratio(&norms).unwrap();
    assert!((r - rho).abs() < 0.01 * rho);
}
