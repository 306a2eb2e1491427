//! Fischer inner products, finite graded blocks and exact projections.
//!
//! The standard weight of `z^α z̄^β u^γ` is `α!β!γ!`. The normalized weight is
//! `γ! · α!β!/(|α|+|β|)!`: normalized in the `(z, z̄)` directions with the transversal
//! variables kept at their standard weight, which makes the `1/(m+1)` form of `K*` an
//! exact adjoint.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{min_norm_solver, Mat};
use crate::quadric::HermitianFamily;
use crate::rat::{factorial, gr_int, gr_rat, multi_factorial, GaussRat, Rat};
use crate::series::{compositions, BigradedSeries, Mono};

/// Fischer weight of one monomial.
pub fn weight(m: &Mono, n: usize, normalized: bool) -> Rat {
    let a = multi_factorial(m.alpha(n));
    let b = multi_factorial(m.beta(n));
    let g = multi_factorial(m.gamma(n));
    if normalized {
        let tot = factorial(m.zdeg(n) + m.zbdeg(n));
        Rat::new(a * b * g, tot)
    } else {
        Rat::from_integer(a * b * g)
    }
}

/// `⟨a, b⟩ = Σ_j Σ_m w(m) a_{j,m} conj(b_{j,m})`; value components are orthogonal.
pub fn fischer_inner(a: &BigradedSeries, b: &BigradedSeries, normalized: bool) -> Result<GaussRat> {
    if a.n() != b.n() || a.d() != b.d() || a.s() != b.s() {
        return Err(Error::DimensionMismatch("Fischer product"));
    }
    let n = a.n();
    let mut acc = GaussRat::zero();
    for (pa, pb) in a.comps().iter().zip(b.comps()) {
        for (m, cb) in pb {
            if let Some(ca) = pa.get(m) {
                acc += ca * cb.conj() * gr_rat(weight(m, n, normalized));
            }
        }
    }
    Ok(acc)
}

/// Returns `(⟨D_γ f, g⟩, ⟨f, u^γ g⟩)` for the standard product. The two agree.
pub fn derivative_multiplication_adjoint_check(
    gamma: &[u8],
    f: &BigradedSeries,
    g: &BigradedSeries,
) -> Result<(GaussRat, GaussRat)> {
    let lhs = fischer_inner(&f.d_u_multi(gamma), g, false)?;
    let mut ug = g.with_cap(g.cap() + 2 * gamma.iter().map(|&x| x as u32).sum::<u32>());
    for (j, &k) in gamma.iter().enumerate() {
        for _ in 0..k {
            ug = ug.times_u(j);
        }
    }
    let rhs = fischer_inner(&f.with_cap(ug.cap()), &ug, false)?;
    Ok((lhs, rhs))
}

/// Ordered monomial basis of one finite graded block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPiece {
    pub n: usize,
    pub d: usize,
    pub s: usize,
    pub basis: Vec<(usize, Mono)>,
}

impl GradedPiece {
    /// Bidegree `(p, q)`, `u`-degree `r`, values in `C^s`.
    pub fn block(n: usize, d: usize, s: usize, p: u32, q: u32, r: u32) -> Self {
        let mut basis = Vec::new();
        for j in 0..s {
            for alpha in compositions(p, n) {
                for beta in compositions(q, n) {
                    for gamma in compositions(r, d) {
                        basis.push((j, Mono::new(&alpha, &beta, &gamma)));
                    }
                }
            }
        }
        GradedPiece { n, d, s, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn cap(&self) -> u32 {
        self.basis.iter().map(|(_, m)| m.wt()).max().unwrap_or(0)
    }

    pub fn element(&self, i: usize, cap: u32) -> BigradedSeries {
        let (j, m) = &self.basis[i];
        BigradedSeries::from_terms(self.n, self.d, self.s, cap, [(*j, m.clone(), gr_int(1))])
    }

    pub fn coords(&self, x: &BigradedSeries) -> Vec<GaussRat> {
        self.basis.iter().map(|(j, m)| x.coeff(*j, m)).collect()
    }

    pub fn series(&self, coords: &[GaussRat], cap: u32) -> BigradedSeries {
        let terms = self.basis.iter().zip(coords).map(|((j, m), c)| (*j, m.clone(), c.clone()));
        BigradedSeries::from_terms(self.n, self.d, self.s, cap, terms.collect::<Vec<_>>())
    }

    pub fn weights(&self, normalized: bool) -> Vec<Rat> {
        self.basis.iter().map(|(_, m)| weight(m, self.n, normalized)).collect()
    }

    /// True when every term of `x` lies in the span of the basis.
    pub fn contains(&self, x: &BigradedSeries) -> bool {
        x.terms().iter().all(|(j, m, _)| self.basis.iter().any(|(bj, bm)| bj == j && bm == *m))
    }
}

/// Operators available as exact block matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpId {
    K,
    KBar,
    KStar,
    KBarStar,
    Delta,
    DeltaStar,
    CmTrace,
}

/// Exact matrix of a complex-linear operator between two graded pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearBlockMap {
    pub domain: GradedPiece,
    pub codomain: GradedPiece,
    pub matrix: Mat<GaussRat>,
}

impl LinearBlockMap {
    pub fn compose(&self, first: &LinearBlockMap) -> Result<LinearBlockMap> {
        if first.codomain != self.domain {
            return Err(Error::DimensionMismatch("block composition"));
        }
        Ok(LinearBlockMap {
            domain: first.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: self.matrix.mul(&first.matrix),
        })
    }
}

fn apply_op(op: OpId, family: &HermitianFamily, x: &BigradedSeries) -> Result<BigradedSeries> {
    match op {
        OpId::K => family.k_apply(x, false),
        OpId::KBar => family.k_apply(x, true),
        OpId::KStar => family.kstar_apply(x, false),
        OpId::KBarStar => family.kstar_apply(x, true),
        OpId::Delta => Ok(family.delta_apply(x)),
        OpId::DeltaStar => Ok(family.deltastar_apply(x)),
        OpId::CmTrace => family.cm_trace(x, 1),
    }
}

/// Matrix of `op` from `src` to `dst`. Fails if some image leaves the span of `dst`.
pub fn assemble_block(op: OpId, src: &GradedPiece, dst: &GradedPiece, family: &HermitianFamily) -> Result<LinearBlockMap> {
    assemble_with(src, dst, |x| apply_op(op, family, x))
}

/// Matrix of an arbitrary linear map given as a closure on series.
pub fn assemble_with<F>(src: &GradedPiece, dst: &GradedPiece, f: F) -> Result<LinearBlockMap>
where
    F: Fn(&BigradedSeries) -> Result<BigradedSeries>,
{
    let cap = src.cap().max(dst.cap());
    let mut cols = Vec::with_capacity(src.dim());
    for i in 0..src.dim() {
        let img = f(&src.element(i, cap))?;
        if img.s() != dst.s || !dst.contains(&img) {
            return Err(Error::DimensionMismatch("operator image leaves the target block"));
        }
        cols.push(dst.coords(&img));
    }
    Ok(LinearBlockMap {
        domain: src.clone(),
        codomain: dst.clone(),
        matrix: Mat::from_cols(&cols, dst.dim()),
    })
}

/// Orthogonal split of `rhs` into `image(L) ⊕ image(L)^⊥` for the standard Fischer product.
///
/// Returns `(x, r)` with `L x + r = rhs`, `r ⟂ image(L)`, and `x ⟂ ker L`.
pub fn minimal_norm_solve(l: &LinearBlockMap, rhs: &[GaussRat]) -> (Vec<GaussRat>, Vec<GaussRat>) {
    let wd: Vec<GaussRat> = l.domain.weights(false).into_iter().map(gr_rat).collect();
    let wc: Vec<GaussRat> = l.codomain.weights(false).into_iter().map(gr_rat).collect();
    // Normal equations L^H Wc L x = L^H Wc rhs, minimal Wd-norm solution.
    let mut lh_wc = l.matrix.adjoint();
    for i in 0..lh_wc.rows {
        for j in 0..lh_wc.cols {
            let v = lh_wc[(i, j)].clone() * wc[j].clone();
            lh_wc[(i, j)] = v;
        }
    }
    let normal = lh_wc.mul(&l.matrix);
    let c = lh_wc.mul_vec(rhs);
    let x = min_norm_solver(&normal, &wd).solve(&c);
    let lx = l.matrix.mul_vec(&x);
    let r = rhs.iter().zip(lx).map(|(a, b)| a.clone() - b).collect();
    (x, r)
}

/// `Σ_{|α| = m} α!/|α|! ` style normalizer used by probes: the weight of `z^α` in
/// `H_{n,m}` for the normalized product.
pub fn normalized_holo_weight(alpha: &[u8]) -> Rat {
    let tot: u32 = alpha.iter().map(|&x| x as u32).sum();
    Rat::new(multi_factorial(alpha), factorial(tot))
}
