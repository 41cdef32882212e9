use num_complex::Complex;
use rayon::prelude::*;

use crate::scalar::{Scalar, C};

/// Dense row-major complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat<T> {
    pub n: usize,
    pub data: Vec<C<T>>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LuError {
    #[error("matrix is singular at pivot {0}")]
    Singular(usize),
}

impl<T: Scalar> CMat<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C::new(T::zero(), T::zero()); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> C<T> {
        self.data[i * self.n + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut C<T> {
        &mut self.data[i * self.n + j]
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect() }
    }

    /// Linear combination Σ c_k M_k, all of the same size.
    pub fn lincomb(terms: &[(T, &Self)]) -> Self {
        let n = terms[0].1.n;
        let mut out = Self::zeros(n);
        for (c, m) in terms {
            for (o, &z) in out.data.iter_mut().zip(&m.data) {
                *o += z * *c;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        assert_eq!(n, other.n);
        let mut data = vec![C::new(T::zero(), T::zero()); n * n];
        data.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
            let a = &self.data[i * n..(i + 1) * n];
            for (k, &aik) in a.iter().enumerate() {
                if aik.re == T::zero() && aik.im == T::zero() {
                    continue;
                }
                let b = &other.data[k * n..(k + 1) * n];
                for (r, &bkj) in row.iter_mut().zip(b) {
                    *r += aik * bkj;
                }
            }
        });
        Self { n, data }
    }

    /// Row vector times matrix: yᵀ = xᵀ M.
    pub fn left_mul_vec(&self, x: &[C<T>]) -> Vec<C<T>> {
        let n = self.n;
        let mut y = vec![C::new(T::zero(), T::zero()); n];
        for (k, &xk) in x.iter().enumerate() {
            let row = &self.data[k * n..(k + 1) * n];
            for (yj, &m) in y.iter_mut().zip(row) {
                *yj += xk * m;
            }
        }
        y
    }

    pub fn mul_vec(&self, x: &[C<T>]) -> Vec<C<T>> {
        let n = self.n;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(x)
                    .fold(C::new(T::zero(), T::zero()), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn conj_transpose(&self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        m
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].norm()).fold(T::zero(), |a, b| a + b))
            .fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Solves A X = B in place of B with partial pivoting.
    pub fn solve(&self, b: &Self) -> Result<Self, LuError> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut x = b.data.clone();
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].norm();
            for r in col + 1..n {
                let v = a[r * n + col].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == T::zero() {
                return Err(LuError::Singular(col));
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                    x.swap(col * n + j, piv * n + j);
                }
            }
            let inv = C::new(T::one(), T::zero()) / a[col * n + col];
            let (top, bottom) = a.split_at_mut((col + 1) * n);
            let prow = &top[col * n..];
            let (xtop, xbottom) = x.split_at_mut((col + 1) * n);
            let xrow = &xtop[col * n..];
            bottom.par_chunks_mut(n).zip(xbottom.par_chunks_mut(n)).for_each(|(arow, xr)| {
                let f = arow[col] * inv;
                if f.re == T::zero() && f.im == T::zero() {
                    return;
                }
                for j in col..n {
                    arow[j] -= f * prow[j];
                }
                for j in 0..n {
                    xr[j] -= f * xrow[j];
                }
            });
        }
        for col in (0..n).rev() {
            let inv = C::new(T::one(), T::zero()) / a[col * n + col];
            for j in 0..n {
                x[col * n + j] *= inv;
            }
            let (xtop, xbottom) = x.split_at_mut(col * n);
            let xrow = &xbottom[..n];
            xtop.par_chunks_mut(n).enumerate().for_each(|(r, xr)| {
                let f = a[r * n + col];
                if f.re == T::zero() && f.im == T::zero() {
                    return;
                }
                for j in 0..n {
                    xr[j] -= f * xrow[j];
                }
            });
        }
        Ok(Self { n, data: x })
    }
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm<T: Scalar>(a: &CMat<T>) -> Result<CMat<T>, LuError> {
    let n = a.n;
    let theta13 = 5.371920351148152;
    let norm = a.norm1().f64();
    let s = if norm > theta13 { (norm / theta13).log2().ceil().max(0.0) as i32 } else { 0 };
    let a = a.scale(Complex::new(T::of(0.5f64.powi(s)), T::zero()));
    let b: Vec<T> = PADE13.iter().map(|&c| T::of(c)).collect();
    let id = CMat::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let u_inner = CMat::lincomb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)]);
    let u = a.matmul(&a6.matmul(&u_inner).add(&CMat::lincomb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &id)])));
    let v_inner = CMat::lincomb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)]);
    let v = a6.matmul(&v_inner).add(&CMat::lincomb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &id)]));
    let mut r = v.sub(&u).solve(&v.add(&u))?;
    for _ in 0..s {
        r = r.matmul(&r);
    }
    Ok(r)
}
