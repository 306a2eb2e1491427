//! Seeded generators for random families, specs, series and transforms.

use alloc::vec::Vec;

use num_traits::Zero;
use rand::Rng;

use crate::conjugacy::{ManifoldSpec, Transform};
use crate::quadric::HermitianFamily;
use crate::rat::{gr, gr_int, GaussRat, Rat};
use crate::series::{monomials_of_weight, BigradedSeries, HoloSeries};

/// `p/q` with `|p| ≤ max`, `1 ≤ q ≤ 3`.
pub fn small_rat<R: Rng>(rng: &mut R, max: i64) -> Rat {
    Rat::new(rng.gen_range(-max..=max).into(), rng.gen_range(1..=3i64).into())
}

/// Nonzero Gaussian rational with small numerators.
pub fn small_gr<R: Rng>(rng: &mut R) -> GaussRat {
    loop {
        let c = gr(small_rat(rng, 3), small_rat(rng, 3));
        if !c.is_zero() {
            return c;
        }
    }
}

/// Random valid family with small Gaussian-integer entries. Needs `d ≤ n²`.
pub fn random_family<R: Rng>(rng: &mut R, n: usize, d: usize) -> HermitianFamily {
    assert!(d <= n * n, "no nondegenerate family with d > n^2");
    loop {
        let mut j = Vec::with_capacity(d);
        for _ in 0..d {
            let mut m = alloc::vec![alloc::vec![GaussRat::zero(); n]; n];
            for a in 0..n {
                m[a][a] = gr_int(rng.gen_range(-2..=2));
                for b in a + 1..n {
                    if rng.gen_bool(0.5) {
                        let c = gr(Rat::from_integer(rng.gen_range(-1..=1i64).into()), Rat::from_integer(rng.gen_range(-1..=1i64).into()));
                        m[b][a] = c.conj();
                        m[a][b] = c;
                    }
                }
            }
            j.push(m);
        }
        if let Ok(f) = HermitianFamily::new(n, j) {
            if f.check().is_ok() {
                return f;
            }
        }
    }
}

/// Sparse complex series with `terms` monomials of quasidegree in `kmin..=kmax`.
pub fn random_series<R: Rng>(rng: &mut R, n: usize, d: usize, s: usize, cap: u32, kmin: u32, kmax: u32, terms: usize) -> BigradedSeries {
    let mut out = BigradedSeries::zero(n, d, s, cap);
    for _ in 0..terms {
        let k = rng.gen_range(kmin..=kmax);
        let ms = monomials_of_weight(n, d, k, false);
        let m = ms[rng.gen_range(0..ms.len())].clone();
        let j = rng.gen_range(0..s);
        out = out.add(&BigradedSeries::from_terms(n, d, s, cap, [(j, m, small_gr(rng))]));
    }
    out
}

/// Sparse real-valued series: each drawn term is paired with its conjugate mirror.
pub fn random_real_series<R: Rng>(rng: &mut R, n: usize, d: usize, s: usize, cap: u32, kmin: u32, kmax: u32, terms: usize) -> BigradedSeries {
    let x = random_series(rng, n, d, s, cap, kmin, kmax, terms);
    x.add(&x.conjugate())
}

/// Sparse holomorphic series in `(z, w)` with values in `C^s`.
pub fn random_holo<R: Rng>(rng: &mut R, n: usize, d: usize, s: usize, cap: u32, kmin: u32, kmax: u32, terms: usize) -> HoloSeries {
    let mut out = BigradedSeries::zero(n, d, s, cap);
    for _ in 0..terms {
        let k = rng.gen_range(kmin..=kmax);
        let ms = monomials_of_weight(n, d, k, true);
        let m = ms[rng.gen_range(0..ms.len())].clone();
        let j = rng.gen_range(0..s);
        out = out.add(&BigradedSeries::from_terms(n, d, s, cap, [(j, m, small_gr(rng))]));
    }
    HoloSeries::new(out).expect("holomorphic by construction")
}

/// Spec with a sparse real perturbation of quasidegree `3..=kmax`.
pub fn random_spec<R: Rng>(rng: &mut R, family: &HermitianFamily, cap: u32, kmax: u32, terms: usize) -> ManifoldSpec {
    let (n, d) = (family.n(), family.d());
    let phi = random_real_series(rng, n, d, d, cap, 3, kmax.min(cap), terms);
    ManifoldSpec::new(family.clone(), phi, cap).expect("valid by construction")
}

/// Tangent-to-identity polynomial map with `terms` random terms in each of `f` and `g`.
pub fn random_transform<R: Rng>(rng: &mut R, n: usize, d: usize, cap: u32, kmax: u32, terms: usize) -> Transform {
    let top = kmax.min(cap);
    let f = random_holo(rng, n, d, n, cap, 2, top.max(2), terms);
    let g = random_holo(rng, n, d, d, cap, 3, top.max(3), terms);
    Transform::new(f, g).expect("orders by construction")
}

/// Holomorphic series whose coefficients `h_j(w)`, `j ≤ 3`, each receive a term of every
/// `w`-degree `1..=3` that fits under the cap. Exercises high `w`-derivatives.
pub fn random_w_rich_holo<R: Rng>(rng: &mut R, n: usize, d: usize, s: usize, cap: u32, min_wt: u32) -> HoloSeries {
    let mut out = BigradedSeries::zero(n, d, s, cap);
    for j in 0..=3u32 {
        for r in 0..=3u32 {
            let k = j + 2 * r;
            if k < min_wt || k > cap {
                continue;
            }
            let ms: Vec<_> = monomials_of_weight(n, d, k, true).into_iter().filter(|m| m.zdeg(n) == j).collect();
            let m = ms[rng.gen_range(0..ms.len())].clone();
            let c = rng.gen_range(0..s);
            out = out.add(&BigradedSeries::from_terms(n, d, s, cap, [(c, m, small_gr(rng))]));
        }
    }
    HoloSeries::new(out).expect("holomorphic by construction")
}

/// Transform built from [`random_w_rich_holo`] parts.
pub fn random_w_rich_transform<R: Rng>(rng: &mut R, n: usize, d: usize, cap: u32) -> Transform {
    let f = random_w_rich_holo(rng, n, d, n, cap, 2);
    let g = random_w_rich_holo(rng, n, d, d, cap, 3);
    Transform::new(f, g).expect("orders by construction")
}
