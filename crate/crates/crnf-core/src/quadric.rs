//! The Hermitian family defining the model quadric `Im w = Q(z, z̄)` and the structural
//! operators built from it.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, FamilyViolation, Result};
use crate::linalg::Mat;
use crate::rat::{gr_int, gr_rat, GaussRat, Rat};
use crate::series::{BigradedSeries, HoloSeries};

/// `Q_k(a, b̄) = b̄ᵗ J_k a` for `k = 1..d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianFamily {
    n: usize,
    d: usize,
    j: Vec<Vec<Vec<GaussRat>>>,
}

/// Outcome of [`HermitianFamily::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyReport {
    pub hermitian: bool,
    pub common_kernel_dim: usize,
    pub real_rank: usize,
    pub pass: bool,
}

impl HermitianFamily {
    /// Takes `d` matrices of size `n × n`, row-major. Only the shape is checked here.
    pub fn new(n: usize, j: Vec<Vec<Vec<GaussRat>>>) -> Result<Self> {
        let d = j.len();
        if n == 0 || d == 0 || j.iter().any(|m| m.len() != n || m.iter().any(|r| r.len() != n)) {
            return Err(Error::Family(FamilyViolation::Shape));
        }
        Ok(HermitianFamily { n, d, j })
    }

    /// Real diagonal family `J_k = diag(entries[k])`.
    pub fn diagonal(entries: &[&[i64]]) -> Self {
        let n = entries[0].len();
        let j = entries
            .iter()
            .map(|row| {
                (0..n)
                    .map(|a| (0..n).map(|b| if a == b { gr_int(row[a]) } else { GaussRat::zero() }).collect())
                    .collect()
            })
            .collect();
        HermitianFamily::new(n, j).expect("square diagonal family")
    }

    /// The sphere family `n = 1, d = 1, J = [1]`.
    pub fn sphere() -> Self {
        Self::diagonal(&[&[1]])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entry(&self, k: usize, a: usize, b: usize) -> &GaussRat {
        &self.j[k][a][b]
    }

    pub fn matrices(&self) -> &[Vec<Vec<GaussRat>>] {
        &self.j
    }

    /// Hermitian symmetry, trivial common kernel and real linear independence.
    pub fn validate(&self) -> FamilyReport {
        let (n, d) = (self.n, self.d);
        let hermitian = (0..d).all(|k| {
            (0..n).all(|a| (0..n).all(|b| self.j[k][a][b] == self.j[k][b][a].conj()))
        });
        let mut stacked = Mat::<GaussRat>::zeros(n * d, n);
        for k in 0..d {
            for a in 0..n {
                for b in 0..n {
                    stacked[(k * n + a, b)] = self.j[k][a][b].clone();
                }
            }
        }
        let common_kernel_dim = n - stacked.rank();
        let mut real = Mat::<Rat>::zeros(d, 2 * n * n);
        for k in 0..d {
            for a in 0..n {
                for b in 0..n {
                    real[(k, 2 * (a * n + b))] = self.j[k][a][b].re.clone();
                    real[(k, 2 * (a * n + b) + 1)] = self.j[k][a][b].im.clone();
                }
            }
        }
        let real_rank = real.rank();
        let pass = hermitian && common_kernel_dim == 0 && real_rank == d;
        FamilyReport { hermitian, common_kernel_dim, real_rank, pass }
    }

    /// Like [`validate`](Self::validate) but returns the first violated clause.
    pub fn check(&self) -> Result<()> {
        let r = self.validate();
        if !r.hermitian {
            let index = (0..self.d)
                .find(|&k| (0..self.n).any(|a| (0..self.n).any(|b| self.j[k][a][b] != self.j[k][b][a].conj())))
                .unwrap_or(0);
            return Err(Error::Family(FamilyViolation::NotHermitian { index }));
        }
        if r.common_kernel_dim != 0 {
            return Err(Error::Family(FamilyViolation::CommonKernel { dim: r.common_kernel_dim }));
        }
        if r.real_rank != self.d {
            return Err(Error::Family(FamilyViolation::LinearlyDependent { rank: r.real_rank }));
        }
        Ok(())
    }

    /// `Q(a, b)`: component `k` is `Σ_{p,q} b_p J_k[p][q] a_q`, where `b` fills the
    /// conjugated slot.
    pub fn eval_q(&self, a: &BigradedSeries, b: &BigradedSeries) -> Result<BigradedSeries> {
        let n = self.n;
        if a.s() != n || b.s() != n {
            return Err(Error::DimensionMismatch("eval_Q arguments must be C^n-valued"));
        }
        let cap = a.cap().min(b.cap());
        let mut out = Vec::with_capacity(self.d);
        for k in 0..self.d {
            let mut acc = BigradedSeries::zero(a.n(), a.d(), 1, cap);
            for q in 0..n {
                let mut row = BigradedSeries::zero(a.n(), a.d(), 1, cap);
                for p in 0..n {
                    let c = &self.j[k][p][q];
                    if !c.is_zero() {
                        row = row.add(&b.comp(p).scale(c));
                    }
                }
                if !row.is_zero() {
                    acc = acc.add(&row.mul(&a.comp(q)));
                }
            }
            out.push(acc);
        }
        Ok(BigradedSeries::stack(out))
    }

    /// `Q(z, z̄)` as a `d`-vector series.
    pub fn q_series(&self, d_vars: usize, cap: u32) -> BigradedSeries {
        let z = BigradedSeries::z_vector(self.n, d_vars, cap);
        let zb = BigradedSeries::zbar_vector(self.n, d_vars, cap);
        self.eval_q(&z, &zb).expect("shapes agree")
    }

    /// `K f = Q(f, z̄)`, or `K̄ f = Q(z, f)` when `conjugated` (then `f` is a series in `z̄, u`).
    pub fn k_apply(&self, f: &BigradedSeries, conjugated: bool) -> Result<BigradedSeries> {
        let (n, d) = (f.n(), f.d());
        if conjugated {
            self.eval_q(&BigradedSeries::z_vector(n, d, f.cap()), f)
        } else {
            self.eval_q(f, &BigradedSeries::zbar_vector(n, d, f.cap()))
        }
    }

    /// Adjoint of `K` for the normalized Fischer product: per `z`-homogeneity `m`,
    /// `(1/(m+1)) Σ_k J_k ∂_z̄ P_k`. With `conjugated`, the adjoint of `K̄`:
    /// `(1/(m+1)) Σ_k J_kᵀ ∂_z P_k` with `m` the `z̄`-degree.
    pub fn kstar_apply(&self, p: &BigradedSeries, conjugated: bool) -> Result<BigradedSeries> {
        let n = self.n;
        if p.s() != self.d {
            return Err(Error::DimensionMismatch("K* argument must be C^d-valued"));
        }
        let linear_ok = p.comps().iter().all(|c| {
            c.keys().all(|m| if conjugated { m.zdeg(n) == 1 } else { m.zbdeg(n) == 1 })
        });
        if !linear_ok {
            return Err(Error::Precondition(if conjugated {
                "K̄* needs a series linear in z"
            } else {
                "K* needs a series linear in z̄"
            }));
        }
        let mut out = Vec::with_capacity(n);
        for a in 0..n {
            let mut acc = BigradedSeries::zero(p.n(), p.d(), 1, p.cap());
            for k in 0..self.d {
                for b in 0..n {
                    let c = if conjugated { &self.j[k][b][a] } else { &self.j[k][a][b] };
                    if c.is_zero() {
                        continue;
                    }
                    let dp = if conjugated { p.comp(k).d_z(b) } else { p.comp(k).d_zbar(b) };
                    acc = acc.add(&dp.scale(c));
                }
            }
            out.push(acc);
        }
        let raw = BigradedSeries::stack(out);
        // Divide each term by (m + 1), m the remaining holomorphic degree.
        let terms = raw.terms().into_iter().map(|(j, m, c)| {
            let deg = if conjugated { m.zbdeg(n) } else { m.zdeg(n) };
            (j, m.clone(), c * gr_rat(Rat::new(1.into(), (deg as i64 + 1).into())))
        });
        Ok(BigradedSeries::from_terms(p.n(), p.d(), n, p.cap(), terms.collect::<Vec<_>>()))
    }

    /// `Δφ = Σ_j ∂_{u_j} φ · Q_j(z, z̄)`.
    pub fn delta_apply(&self, phi: &BigradedSeries) -> BigradedSeries {
        let q = self.q_series(phi.d(), phi.cap());
        let mut acc = BigradedSeries::zero(phi.n(), phi.d(), phi.s(), phi.cap());
        for j in 0..self.d {
            acc = acc.add(&phi.d_u(j).mul(&q.comp(j)));
        }
        acc
    }

    /// `Δ*φ = Σ_j u_j Σ_{a,b} conj(J_j[a][b]) ∂_{z̄_a} ∂_{z_b} φ`, the adjoint of `Δ` for the
    /// standard Fischer product.
    pub fn deltastar_apply(&self, phi: &BigradedSeries) -> BigradedSeries {
        let mut acc = BigradedSeries::zero(phi.n(), phi.d(), phi.s(), phi.cap());
        for j in 0..self.d {
            acc = acc.add(&self.trace_k(phi, j).times_u(j));
        }
        acc
    }

    /// `Σ_{a,b} conj(J_k[a][b]) ∂_{z̄_a} ∂_{z_b} φ`.
    fn trace_k(&self, phi: &BigradedSeries, k: usize) -> BigradedSeries {
        let n = self.n;
        let mut acc = BigradedSeries::zero(phi.n(), phi.d(), phi.s(), phi.cap());
        for a in 0..n {
            for b in 0..n {
                let c = &self.j[k][a][b];
                if !c.is_zero() {
                    acc = acc.add(&phi.d_zbar(a).d_z(b).scale(&c.conj()));
                }
            }
        }
        acc
    }

    /// `T^power φ` for `d = 1`.
    pub fn cm_trace(&self, phi: &BigradedSeries, power: u32) -> Result<BigradedSeries> {
        if self.d != 1 {
            return Err(Error::Precondition("the trace operator is defined for d = 1"));
        }
        let mut out = phi.clone();
        for _ in 0..power {
            out = self.trace_k(&out, 0);
        }
        Ok(out)
    }

    /// Matrix of `K` restricted to `C^n`-valued homogeneous polynomials of degree `m` in `z`,
    /// in the monomial bases of domain and codomain (see [`k_block_bases`]).
    pub fn k_block(&self, m: u32) -> (Mat<GaussRat>, Vec<(usize, crate::series::Mono)>, Vec<(usize, crate::series::Mono)>) {
        let (n, d) = (self.n, self.d);
        let (dom, cod) = k_block_bases(n, d, m);
        let mut mat = Mat::zeros(cod.len(), dom.len());
        for (col, (a, mono)) in dom.iter().enumerate() {
            let f = BigradedSeries::from_terms(n, d, n, m + 1, [(*a, mono.clone(), gr_int(1))]);
            let img = self.k_apply(&f, false).expect("shapes agree");
            for (row, (k, cm)) in cod.iter().enumerate() {
                mat[(row, col)] = img.coeff(*k, cm);
            }
        }
        (mat, dom, cod)
    }
}

/// Domain basis `(component a, z^α)` with `|α| = m`, and codomain basis
/// `(component k, z^α z̄_b)` for the block of `K` at `z`-degree `m`.
pub fn k_block_bases(n: usize, d: usize, m: u32) -> (Vec<(usize, crate::series::Mono)>, Vec<(usize, crate::series::Mono)>) {
    use crate::series::{compositions, Mono};
    let zero_n = vec![0u8; n];
    let zero_d = vec![0u8; d];
    let mut dom = Vec::new();
    for a in 0..n {
        for alpha in compositions(m, n) {
            dom.push((a, Mono::new(&alpha, &zero_n, &zero_d)));
        }
    }
    let mut cod = Vec::new();
    for k in 0..d {
        for alpha in compositions(m, n) {
            for b in 0..n {
                let mut beta = zero_n.clone();
                beta[b] = 1;
                cod.push((k, Mono::new(&alpha, &beta, &zero_d)));
            }
        }
    }
    (dom, cod)
}

/// `K` applied to a holomorphic series, as a convenience for callers holding `f`.
pub fn k_of_holo(family: &HermitianFamily, f: &HoloSeries) -> BigradedSeries {
    family.k_apply(f.as_series(), false).expect("f is C^n-valued")
}
