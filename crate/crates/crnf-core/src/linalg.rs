//! Dense exact linear algebra over `Q` and `Q(i)`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rat::{GaussRat, Rat};

/// Exact field with an involution (identity on `Q`, complex conjugation on `Q(i)`).
pub trait Field:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn conj(&self) -> Self;

    /// Field-specific elimination, used by [`rref`] when available.
    fn rref_special(_m: &Mat<Self>) -> Option<Rref<Self>> {
        None
    }

    /// Field-specific matrix product, used by [`Mat::mul`] when available.
    fn matmul_special(_a: &Mat<Self>, _b: &Mat<Self>) -> Option<Mat<Self>> {
        None
    }
}

impl Field for Rat {
    fn conj(&self) -> Self {
        self.clone()
    }

    fn rref_special(m: &Mat<Self>) -> Option<Rref<Self>> {
        Some(rref_fraction_free(m))
    }

    fn matmul_special(a: &Mat<Self>, b: &Mat<Self>) -> Option<Mat<Self>> {
        Some(matmul_integer(a, b))
    }
}

/// Integer vector and common denominator of a rational vector.
fn integer_scaled<'a>(xs: impl Iterator<Item = &'a Rat> + Clone) -> (Vec<BigInt>, BigInt) {
    let mut den = BigInt::one();
    for x in xs.clone() {
        if !x.denom().is_one() {
            den = den.lcm(x.denom());
        }
    }
    let v = xs.map(|x| if x.is_zero() { BigInt::zero() } else { x.numer() * (&den / x.denom()) }).collect();
    (v, den)
}

/// Rows of `a` and columns of `b` over common denominators: one reduction per entry.
fn matmul_integer(a: &Mat<Rat>, b: &Mat<Rat>) -> Mat<Rat> {
    let arows: Vec<_> = (0..a.rows).map(|i| integer_scaled(a.row(i).iter())).collect();
    let bcols: Vec<_> = (0..b.cols).map(|j| integer_scaled((0..b.rows).map(|k| &b[(k, j)]))).collect();
    let mut out = Mat::<Rat>::zeros(a.rows, b.cols);
    for (i, (ar, ad)) in arows.iter().enumerate() {
        let nz: Vec<usize> = (0..ar.len()).filter(|&k| !ar[k].is_zero()).collect();
        if nz.is_empty() {
            continue;
        }
        for (j, (bc, bd)) in bcols.iter().enumerate() {
            let mut acc = BigInt::zero();
            for &k in &nz {
                if !bc[k].is_zero() {
                    acc += &ar[k] * &bc[k];
                }
            }
            if !acc.is_zero() {
                out[(i, j)] = Rat::new(acc, ad * bd);
            }
        }
    }
    out
}

impl Field for GaussRat {
    fn conj(&self) -> Self {
        GaussRat::conj(self)
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Field> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            debug_assert_eq!(row.len(), cols);
            data.extend(row);
        }
        Mat { rows: r, cols, data }
    }

    pub fn from_cols(cols: &[Vec<T>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        if let Some(out) = T::matmul_special(self, other) {
            return out;
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc + a.clone() * b.clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn rank(&self) -> usize {
        rref(self.clone()).pivots.len()
    }

    /// Basis of the null space, one vector per free column.
    pub fn null_space(&self) -> Vec<Vec<T>> {
        let r = rref(self.clone());
        null_space_from_rref(&r)
    }
}

impl<T> core::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> core::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Reduced row echelon form with the pivot column of each nonzero row.
pub struct Rref<T> {
    pub m: Mat<T>,
    pub pivots: Vec<usize>,
    /// Original row index that produced each pivot row.
    pub pivot_rows: Vec<usize>,
}

/// Gauss-Jordan elimination. Also records which original rows were independent.
pub fn rref<T: Field>(m: Mat<T>) -> Rref<T> {
    match T::rref_special(&m) {
        Some(r) => r,
        None => rref_generic(m),
    }
}

fn rref_generic<T: Field>(mut m: Mat<T>) -> Rref<T> {
    let mut order: Vec<usize> = (0..m.rows).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
        if p != r {
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, r * m.cols + j);
            }
            order.swap(p, r);
        }
        let inv = T::one() / m[(r, c)].clone();
        for j in c..m.cols {
            if !m[(r, j)].is_zero() {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
        }
        for i in 0..m.rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone();
            for j in c..m.cols {
                if !m[(r, j)].is_zero() {
                    m[(i, j)] = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    // Rows 0..r of the reduced matrix span the row space; the row swaps above only moved
    // rows forward, so `order[..r]` names a set of original rows of full rank.
    let pivot_rows = order[..r].to_vec();
    Rref { m, pivots, pivot_rows }
}

/// Fraction-free Gauss-Jordan (Bareiss-Montante) on the rows scaled to integers. Every
/// intermediate entry is a minor, so each update divides exactly by the previous pivot.
/// Row scaling does not change the reduced form, which is recovered at the end.
fn rref_fraction_free(a: &Mat<Rat>) -> Rref<Rat> {
    let (rows, cols) = (a.rows, a.cols);
    let mut m: Vec<BigInt> = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let row = a.row(i);
        let mut den = BigInt::one();
        for x in row {
            if !x.denom().is_one() {
                den = den.lcm(x.denom());
            }
        }
        m.extend(row.iter().map(|x| if x.is_zero() { BigInt::zero() } else { x.numer() * (&den / x.denom()) }));
    }
    let mut order: Vec<usize> = (0..rows).collect();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i * cols + c].is_zero()) else { continue };
        if p != r {
            for j in 0..cols {
                m.swap(p * cols + j, r * cols + j);
            }
            order.swap(p, r);
        }
        let piv = m[r * cols + c].clone();
        let prow: Vec<BigInt> = m[r * cols..(r + 1) * cols].to_vec();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = m[i * cols + c].clone();
            let row = &mut m[i * cols..(i + 1) * cols];
            for j in 0..cols {
                let hit = !f.is_zero() && !prow[j].is_zero();
                if row[j].is_zero() && !hit {
                    continue;
                }
                let mut x = &piv * &row[j];
                if hit {
                    x -= &f * &prow[j];
                }
                row[j] = if prev.is_one() { x } else { x / &prev };
            }
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    let mut out = Mat::<Rat>::zeros(rows, cols);
    for (i, &pc) in pivots.iter().enumerate() {
        let p = m[i * cols + pc].clone();
        for j in 0..cols {
            let x = &m[i * cols + j];
            if !x.is_zero() {
                out[(i, j)] = Rat::new(x.clone(), p.clone());
            }
        }
    }
    Rref { m: out, pivots, pivot_rows: order[..r].to_vec() }
}

pub fn null_space_from_rref<T: Field>(r: &Rref<T>) -> Vec<Vec<T>> {
    let cols = r.m.cols;
    let mut is_pivot = vec![false; cols];
    for &p in &r.pivots {
        is_pivot[p] = true;
    }
    let mut out = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![T::zero(); cols];
        v[free] = T::one();
        for (i, &p) in r.pivots.iter().enumerate() {
            v[p] = -r.m[(i, free)].clone();
        }
        out.push(v);
    }
    out
}

/// Solves the square system `a x = b` for invertible `a`.
pub fn solve_square<T: Field>(a: &Mat<T>, b: &[T]) -> Option<Vec<T>> {
    let n = a.rows;
    let mut aug = Mat::zeros(n, n + 1);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n)] = b[i].clone();
    }
    let r = rref(aug);
    if r.pivots.len() != n || r.pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some((0..n).map(|i| r.m[(i, n)].clone()).collect())
}

/// Inverse of a square matrix.
pub fn inverse<T: Field>(a: &Mat<T>) -> Option<Mat<T>> {
    let n = a.rows;
    let mut aug = Mat::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n + i)] = T::one();
    }
    let r = rref(aug);
    if r.pivots.len() < n || r.pivots[n - 1] >= n {
        return None;
    }
    let mut inv = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv[(i, j)] = r.m[(i, n + j)].clone();
        }
    }
    Some(inv)
}

/// Pseudo-inverse for the minimal-norm solution of `a x = b`, where the norm on `x` is
/// `Σ w_j |x_j|²` with positive weights `w`.
///
/// Returns the independent row indices `P` and the matrix `X` with
/// `x = X · b[P]`; the result satisfies `a x = b` whenever the system is consistent, and
/// `x` is orthogonal (in the weighted product) to the null space of `a`.
pub struct MinNormSolver<T> {
    pub rows: Vec<usize>,
    pub x: Mat<T>,
    pub rank: usize,
}

pub fn min_norm_solver<T: Field>(a: &Mat<T>, weights: &[T]) -> MinNormSolver<T> {
    let r = rref(a.clone());
    let rows = r.pivot_rows.clone();
    let k = rows.len();
    if k == 0 {
        return MinNormSolver { rows, x: Mat::zeros(a.cols, 0), rank: 0 };
    }
    // A_P W⁻¹ A_P^* y = b_P, x = W⁻¹ A_P^* y.
    let mut winv_aph = Mat::zeros(a.cols, k);
    for (jj, &ri) in rows.iter().enumerate() {
        for c in 0..a.cols {
            let v = &a[(ri, c)];
            if !v.is_zero() {
                winv_aph[(c, jj)] = v.conj() / weights[c].clone();
            }
        }
    }
    let mut ap = Mat::zeros(k, a.cols);
    for (ii, &ri) in rows.iter().enumerate() {
        for c in 0..a.cols {
            ap[(ii, c)] = a[(ri, c)].clone();
        }
    }
    let gram = ap.mul(&winv_aph);
    let ginv = inverse(&gram).expect("Gram matrix of independent rows is invertible");
    MinNormSolver { rows, x: winv_aph.mul(&ginv), rank: k }
}

impl<T: Field> MinNormSolver<T> {
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let bp: Vec<T> = self.rows.iter().map(|&i| b[i].clone()).collect();
        self.x.mul_vec(&bp)
    }
}

/// Weighted inner product `Σ w_j x_j conj(y_j)`.
pub fn weighted_inner<T: Field>(x: &[T], y: &[T], w: &[T]) -> T {
    let mut acc = T::zero();
    for ((a, b), c) in x.iter().zip(y).zip(w) {
        if !a.is_zero() && !b.is_zero() {
            acc = acc + c.clone() * a.clone() * b.conj();
        }
    }
    acc
}
