use crate::scalar::Scalar;

/// Solve a tridiagonal system with the Thomas algorithm.
///
/// `sub[i]` couples row `i + 1` to column `i`, `sup[i]` couples row `i` to column `i + 1`.
/// Intended for diagonally dominant systems; no pivoting.
pub fn solve_tridiag<T: Scalar>(sub: &[T], diag: &[T], sup: &[T], rhs: &[T]) -> Vec<T> {
    let n = diag.len();
    let mut c = vec![T::zero(); n];
    let mut x = vec![T::zero(); n];
    let mut beta = diag[0];
    x[0] = rhs[0] / beta;
    for i in 1..n {
        c[i] = sup[i - 1] / beta;
        beta = diag[i] - sub[i - 1] * c[i];
        x[i] = (rhs[i] - sub[i - 1] * x[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let t = c[i + 1] * x[i + 1];
        x[i] -= t;
    }
    x
}

/// LU factorization of a general tridiagonal matrix with partial pivoting.
pub struct TridiagLu<T> {
    dl: Vec<T>,
    d: Vec<T>,
    du: Vec<T>,
    du2: Vec<T>,
    swap: Vec<bool>,
}

impl<T: Scalar> TridiagLu<T> {
    /// Factor the matrix; exactly singular pivots are replaced by `tiny`.
    pub fn new(sub: &[T], diag: &[T], sup: &[T], tiny: T) -> Self {
        let n = diag.len();
        let mut dl = sub.to_vec();
        let mut d = diag.to_vec();
        let mut du = sup.to_vec();
        let mut du2 = vec![T::zero(); n.saturating_sub(2)];
        let mut swap = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == T::zero() {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] = d[i + 1] - fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swap[i] = true;
            }
        }
        if n > 0 && d[n - 1] == T::zero() {
            d[n - 1] = tiny;
        }
        TridiagLu { dl, d, du, du2, swap }
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - self.dl[i] * b[i];
            } else {
                let t = self.dl[i] * b[i];
                b[i + 1] -= t;
            }
        }
        b[n - 1] = b[n - 1] / self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

/// Eigenpairs of a symmetric tridiagonal matrix, eigenvalues ascending, unit-norm vectors.
#[derive(Debug, Clone)]
pub struct TridiagEigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
}

fn sturm_count<T: Scalar>(d: &[T], e2: &[T], x: T, tiny: T) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q == T::zero() {
        q = -tiny;
    }
    if q < T::zero() {
        count += 1;
    }
    for i in 1..d.len() {
        q = d[i] - x - e2[i - 1] / q;
        if q == T::zero() {
            q = -tiny;
        }
        if q < T::zero() {
            count += 1;
        }
    }
    count
}

/// All eigenpairs with eigenvalue in `[lo, hi)`, by Sturm bisection and inverse iteration.
pub fn tridiag_eigen_range<T: Scalar>(d: &[T], e: &[T], lo: T, hi: T) -> TridiagEigen<T> {
    let n = d.len();
    let e2: Vec<T> = e.iter().map(|&x| x * x).collect();
    let mut gl = T::infinity();
    let mut gu = T::neg_infinity();
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { T::zero() } + if i + 1 < n { e[i].abs() } else { T::zero() };
        gl = gl.min(d[i] - r);
        gu = gu.max(d[i] + r);
    }
    let scale = gl.abs().max(gu.abs()).max(T::one());
    let eps = T::epsilon();
    let tiny = eps * eps * scale;
    let lo = lo.max(gl - T::one());
    let hi = hi.min(gu + T::one());
    if lo >= hi {
        return TridiagEigen { values: vec![], vectors: vec![] };
    }
    let k_lo = sturm_count(d, &e2, lo, tiny);
    let k_hi = sturm_count(d, &e2, hi, tiny);

    let mut values = Vec::with_capacity(k_hi - k_lo);
    for k in k_lo..k_hi {
        let mut a = if let Some(&prev) = values.last() { prev } else { lo };
        let mut b = hi;
        for _ in 0..200 {
            let mid = (a + b) * T::of(0.5);
            if mid <= a || mid >= b || b - a <= T::of(2.0) * eps * a.abs().max(b.abs()) + tiny {
                break;
            }
            if sturm_count(d, &e2, mid, tiny) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        values.push((a + b) * T::of(0.5));
    }

    let mut vectors: Vec<Vec<T>> = Vec::with_capacity(values.len());
    let cluster = T::of(1e-3) * scale.sqrt();
    for (idx, &lam) in values.iter().enumerate() {
        let diag: Vec<T> = d.iter().map(|&x| x - lam).collect();
        let lu = TridiagLu::new(e, &diag, e, eps * scale);
        let mut y: Vec<T> = (0..n).map(|i| T::one() + T::of(0.25) * T::of_usize(i % 7) / T::of(7.0)).collect();
        for _ in 0..3 {
            lu.solve_in_place(&mut y);
            for j in (0..idx).rev() {
                if lam - values[j] > cluster {
                    break;
                }
                let p = crate::scalar::dot(&y, &vectors[j]);
                for (yi, &vi) in y.iter_mut().zip(&vectors[j]) {
                    *yi -= p * vi;
                }
            }
            let nrm = crate::scalar::norm2(&y).sqrt();
            for yi in y.iter_mut() {
                *yi /= nrm;
            }
        }
        vectors.push(y);
    }
    TridiagEigen { values, vectors }
}
