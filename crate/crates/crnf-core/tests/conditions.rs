use crnf_core::conditions::{check_cm, check_n0, check_n1, check_nd, check_noff, check_space, Space};
use crnf_core::engine::RealSeriesBasis;
use crnf_core::fischer::{assemble_block, GradedPiece, OpId};
use crnf_core::linalg::Mat;
use crnf_core::quadric::HermitianFamily;
use crnf_core::rat::{gr_int, Rat};
use crnf_core::series::{BigradedSeries, Mono};
use crnf_core::testing::{random_family, small_gr};
use num_traits::Zero;
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

#[test]
fn n0_examples() {
    assert!(check_n0(&s1(8, &[((1, 1, 1), 1)])).unwrap().pass());
    let harmonic = s1(8, &[((2, 0, 0), 1), ((0, 2, 0), 1)]);
    let r = check_n0(&harmonic).unwrap();
    assert!(!r.pass());
    assert_eq!(r.conditions[0].residual, harmonic);
    assert!(!check_n0(&s1(8, &[((2, 0, 1), 1), ((0, 2, 1), 1)])).unwrap().pass());
    assert!(check_n0(&s1(8, &[((2, 0, 0), 1)])).is_err());
}

#[test]
fn n1_examples() {
    let fam = HermitianFamily::sphere();
    assert!(check_n1(&fam, &BigradedSeries::zero(1, 1, 1, 8), None).unwrap().pass());
    let r = check_n1(&fam, &s1(8, &[((2, 1, 0), 1), ((1, 2, 0), 1)]), None).unwrap();
    assert!(!r.pass());
    assert_eq!(r.checked_up_to, Some(8));
    assert_eq!(check_n1(&fam, &BigradedSeries::zero(1, 1, 1, 8), Some(5)).unwrap().checked_up_to, Some(5));

    // d = 2: Φ₂₁ from the null space of the K* block passes.
    let fam = HermitianFamily::diagonal(&[&[1, 1], &[1, -1]]);
    let src = GradedPiece::block(2, 2, 2, 2, 1, 0);
    let dst = GradedPiece::block(2, 2, 2, 2, 0, 0);
    let ks = assemble_block(OpId::KStar, &src, &dst, &fam).unwrap();
    let null = ks.matrix.null_space();
    assert!(!null.is_empty());
    let p = src.series(&null[0], 8);
    let phi = p.add(&p.conjugate());
    assert!(check_n1(&fam, &phi, None).unwrap().pass());
}

#[test]
fn nd_examples() {
    let fam = HermitianFamily::sphere();
    assert!(check_nd(&fam, &BigradedSeries::zero(1, 1, 1, 8)).unwrap().pass());
    let r = check_nd(&fam, &s1(8, &[((1, 1, 1), 1)])).unwrap();
    assert_eq!(r.conditions[0].residual, s1(8, &[((0, 0, 2), -6)]));
}

/// Real coordinates of the `(1,1)`, `(2,2)`, `(3,3)` parts of quasidegree `k` mapped to the
/// real and imaginary parts of both `N^d` residuals.
fn nd_system(fam: &HermitianFamily, k: u32) -> (RealSeriesBasis, Mat<Rat>) {
    let (n, d) = (fam.n(), fam.d());
    let basis = RealSeriesBasis::new(n, d, d, k, Some(0));
    let images: Vec<BigradedSeries> = (0..basis.dim())
        .map(|i| {
            let mut e = vec![Rat::zero(); basis.dim()];
            e[i] = Rat::from_integer(1.into());
            let phi = basis.series(&e, k);
            let r = check_nd(fam, &phi).unwrap();
            BigradedSeries::stack(r.conditions.iter().map(|c| c.residual.clone()).collect())
        })
        .collect();
    let mut keys: Vec<(usize, Mono)> = images.iter().flat_map(|x| x.terms().into_iter().map(|(j, m, _)| (j, m.clone()))).collect();
    keys.sort();
    keys.dedup();
    let mut m = Mat::zeros(2 * keys.len(), basis.dim());
    for (c, img) in images.iter().enumerate() {
        for (r, (j, mono)) in keys.iter().enumerate() {
            let v = img.coeff(*j, mono);
            m[(2 * r, c)] = v.re;
            m[(2 * r + 1, c)] = v.im;
        }
    }
    (basis, m)
}

#[test]
fn nd_passes_on_solved_block() {
    let fam = HermitianFamily::diagonal(&[&[1, 1]]);
    let (basis, m) = nd_system(&fam, 6);
    let mut found = false;
    for v in m.null_space() {
        let phi = basis.series(&v, 6);
        let p11 = phi.extract_pq(1, 1);
        if p11.is_zero() || phi.extract_pq(3, 3).is_zero() {
            continue;
        }
        found = true;
        assert!(check_nd(&fam, &phi).unwrap().pass());
    }
    assert!(found, "some null vector couples Φ₁₁ and Φ₃₃");
}

#[test]
fn noff_examples() {
    let fam = HermitianFamily::sphere();
    assert!(check_noff(&fam, &BigradedSeries::zero(1, 1, 1, 8)).unwrap().pass());
    assert!(check_noff(&fam, &s1(8, &[((2, 2, 1), 3)])).unwrap().pass());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut fails = 0;
    for _ in 0..10 {
        let fam = random_family(&mut rng, 2, 1);
        let block = GradedPiece::block(2, 1, 1, 2, 3, 1);
        let coords: Vec<_> = (0..block.dim()).map(|_| small_gr(&mut rng)).collect();
        let x = block.series(&coords, 9);
        let phi = x.add(&x.conjugate());
        if !check_noff(&fam, &phi).unwrap().pass() {
            fails += 1;
        }
    }
    assert_eq!(fails, 10);
}

#[test]
fn cm_examples() {
    let fam = HermitianFamily::sphere();
    assert!(check_cm(&fam, &BigradedSeries::zero(1, 1, 1, 8)).unwrap().pass());
    let r = check_cm(&fam, &s1(8, &[((2, 2, 1), 2)])).unwrap();
    assert!(!r.pass());
    assert_eq!(r.failing().next().unwrap().residual, s1(8, &[((1, 1, 1), 8)]));

    let fam2 = HermitianFamily::diagonal(&[&[1, 1]]);
    let traceless = BigradedSeries::from_terms(
        2,
        1,
        1,
        8,
        [
            (0, Mono::new(&[2, 0], &[0, 2], &[0]), gr_int(1)),
            (0, Mono::new(&[0, 2], &[2, 0], &[0]), gr_int(1)),
        ],
    );
    assert!(check_cm(&fam2, &traceless).unwrap().pass());
    assert!(check_cm(&HermitianFamily::diagonal(&[&[1, 1], &[1, -1]]), &BigradedSeries::zero(2, 2, 2, 4)).is_err());
}

#[test]
fn trace_is_injective_on_22_blocks_for_n1() {
    let fam = HermitianFamily::sphere();
    for r in 0..4 {
        let src = GradedPiece::block(1, 1, 1, 2, 2, r);
        let dst = GradedPiece::block(1, 1, 1, 1, 1, r);
        let t = assemble_block(OpId::CmTrace, &src, &dst, &fam).unwrap();
        assert!(t.matrix.null_space().is_empty());
    }
}

#[test]
fn weak_space_drops_off_diagonal() {
    let fam = HermitianFamily::sphere();
    let x = s1(8, &[((2, 3, 1), 1)]);
    let phi = x.add(&x.conjugate());
    let full = check_space(&fam, &phi, Space::Full).unwrap();
    let weak = check_space(&fam, &phi, Space::Weak).unwrap();
    assert!(weak.pass());
    assert!(!full.pass());
    assert!(full.failing().all(|c| c.name.starts_with("Noff")));
}
