use crnf_core::appendix::appendix_crosscheck;
use crnf_core::conjugacy::ManifoldSpec;
use crnf_core::testing::{random_family, random_real_series, random_transform, random_w_rich_transform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn closed_forms_match_generic_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pqs = [(2, 0), (3, 0), (1, 1), (2, 1), (3, 1), (4, 1), (5, 1), (2, 2), (3, 2), (3, 3)];
    for i in 0..12 {
        let (n, d) = [(1, 1), (2, 1), (2, 2)][i % 3];
        let fam = random_family(&mut rng, n, d);
        let phi = random_real_series(&mut rng, n, d, d, 8, 2, 8, 6).filter_terms(|m| m.zdeg(n) > 0 && m.zbdeg(n) > 0);
        let phi = phi.filter_terms(|m| m.wt() >= 3);
        let spec = ManifoldSpec::new(fam, phi.clone(), 8).unwrap();
        let t = if i % 2 == 0 { random_transform(&mut rng, n, d, 8, 7, 4) } else { random_w_rich_transform(&mut rng, n, d, 8) };
        for pq in pqs {
            let (a, b) = appendix_crosscheck(&spec, &t, &phi, pq).unwrap();
            assert_eq!(a, b, "fixture {i} pq {pq:?}");
        }
    }
}
