//! Time–energy kernels and exact-in-time quadrature weights.

use std::sync::OnceLock;

use crate::scalar::{cis, cis_m1, Scalar, C};
use crate::special::{ein, gauss_legendre, si_cin};

/// D(t) = i(e^{−i(ω_out−ω_k)t} − 1)/(ω_out − ω_k), equal to t at resonance.
pub fn d_kernel<T: Scalar>(omega_k: T, omega_out: T, t: T) -> C<T> {
    let x = omega_out - omega_k;
    if x == T::zero() {
        return C::new(t, T::zero());
    }
    let z = cis_m1(-x * t) / x;
    C::new(-z.im, z.re)
}

/// |D|² = 2(1 − cos xt)/x² written as 4 sin²(xt/2)/x².
pub fn d_kernel_sq<T: Scalar>(omega_k: T, omega_out: T, t: T) -> T {
    d_kernel(omega_k, omega_out, t).norm_sqr()
}

/// Explicit t²·sinc²(xt/2) form of |D|².
pub fn sinc2_form<T: Scalar>(omega_k: T, omega_out: T, t: T) -> T {
    let x = omega_out - omega_k;
    let y = x * t * T::of(0.5);
    if y == T::zero() {
        return t * t;
    }
    let s = y.sin() / y;
    t * t * s * s
}

/// D⁽²⁾(t) = (1 − ixt − e^{−ixt})/x² with x = ω_k − ω_out; t²/2 at x = 0.
pub fn d2_kernel<T: Scalar>(omega_k: T, omega_out: T, t: T) -> C<T> {
    let x = omega_k - omega_out;
    let y = x * t;
    if y.abs() < T::of(0.5) {
        // t² Σ_n (−iy)^n/(n+2)!
        let mut term = C::new(T::of(0.5), T::zero());
        let mut sum = term;
        let miy = C::new(T::zero(), -y);
        for n in 1..30 {
            term = term * miy / T::of_usize(n + 2);
            sum += term;
            if term.norm() < T::epsilon() * T::of(1e-3) {
                break;
            }
        }
        return sum * (t * t);
    }
    let e = cis_m1(-y);
    (C::new(-e.re, -y - e.im)) / (x * x)
}

fn gl10() -> &'static (Vec<f64>, Vec<f64>) {
    static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL.get_or_init(|| gauss_legendre(10))
}

/// h(δ) = (1 − e^{−iδt})/δ, equal to it at δ = 0.
fn h_kernel<T: Scalar>(delta: T, t: T) -> C<T> {
    if delta == T::zero() {
        return C::new(T::zero(), t);
    }
    let e = cis_m1(-delta * t);
    C::new(-e.re, -e.im) / delta
}

/// Weights w_n with ∫ G(δ) h(δ) dδ ≈ Σ w_n G(δ_n) for G piecewise linear on
/// the sorted nodes δ_n. Exact in t via the sine/cosine integrals.
pub fn filon_h_weights<T: Scalar>(deltas: &[T], t: T) -> Vec<C<T>> {
    let n = deltas.len();
    let mut w = vec![C::new(T::zero(), T::zero()); n];
    if t == T::zero() || n < 2 {
        return w;
    }
    let (gx, gw) = gl10();
    for i in 0..n - 1 {
        let (da, db) = (deltas[i], deltas[i + 1]);
        let span = db - da;
        if span <= T::zero() {
            continue;
        }
        let (wa, wb) = if da.abs().max(db.abs()) * t < T::one() {
            let mut wa = C::new(T::zero(), T::zero());
            let mut wb = wa;
            for (&xg, &wg) in gx.iter().zip(gw) {
                let s = T::of(0.5) * (T::one() + T::of(xg));
                let d = da + span * s;
                let hk = h_kernel(d, t) * (T::of(wg) * span * T::of(0.5));
                wa += hk * (T::one() - s);
                wb += hk * s;
            }
            (wa, wb)
        } else {
            let i0 = ein(db * t) - ein(da * t);
            let em = cis_m1(-span * t) * cis(-da * t);
            // em/(it) = −i·em/t
            let i1 = C::new(span + em.im / t, -em.re / t);
            ((i0 * db - i1) / span, (i1 - i0 * da) / span)
        };
        w[i] += wa;
        w[i + 1] += wb;
    }
    w
}

/// Weights w_n with ∫ F(δ)|D(δ)|² dδ ≈ Σ w_n F(δ_n) for F piecewise linear.
pub fn filon_sq_weights<T: Scalar>(deltas: &[T], t: T) -> Vec<T> {
    let n = deltas.len();
    let mut w = vec![T::zero(); n];
    if t == T::zero() || n < 2 {
        return w;
    }
    let (gx, gw) = gl10();
    let tf = t.f64();
    // antiderivatives of |D|² and δ|D|²
    let a0 = |d: f64| -> f64 {
        if d == 0.0 {
            return 0.0;
        }
        let (si, _) = si_cin((d * tf).abs());
        let s = (d * tf * 0.5).sin();
        -4.0 * s * s / d + 2.0 * tf * si * d.signum()
    };
    let a1 = |d: f64| -> f64 { 2.0 * si_cin((d * tf).abs()).1 };
    for i in 0..n - 1 {
        let (da, db) = (deltas[i], deltas[i + 1]);
        let span = db - da;
        if span <= T::zero() {
            continue;
        }
        let (wa, wb) = if da.abs().max(db.abs()) * t < T::one() {
            let mut wa = T::zero();
            let mut wb = T::zero();
            for (&xg, &wg) in gx.iter().zip(gw) {
                let s = T::of(0.5) * (T::one() + T::of(xg));
                let d = da + span * s;
                let k = d_kernel_sq(d, T::zero(), t) * T::of(wg) * span * T::of(0.5);
                wa += k * (T::one() - s);
                wb += k * s;
            }
            (wa, wb)
        } else {
            let (daf, dbf) = (da.f64(), db.f64());
            let i0 = a0(dbf) - a0(daf);
            let i1 = a1(dbf) - a1(daf);
            let sp = span.f64();
            (T::of((dbf * i0 - i1) / sp), T::of((i1 - daf * i0) / sp))
        };
        w[i] += wa;
        w[i + 1] += wb;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resonance_limits() {
        assert_eq!(d_kernel(2.0, 2.0, 3.0), C::new(3.0, 0.0));
        assert!((d_kernel_sq(2.0f64, 2.0 + 1e-9, 3.0) - 9.0).abs() < 1e-9);
        let d2 = d2_kernel(1.0f64, 1.0, 4.0);
        assert!((d2.re - 8.0).abs() < 1e-14 && d2.im.abs() < 1e-14);
    }

    #[test]
    fn d2_series_matches_closed_form_at_switch() {
        let t = 2.0;
        for &x in &[0.2499, 0.2501] {
            let a = d2_kernel(x, 0.0, t);
            let b = (C::new(1.0, -x * t) - cis(-x * t)) / (x * x);
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn filon_weights_integrate_constant_exactly() {
        // ∫_{-A}^{A} |D|² dδ = 2[A0(A)] with A0 odd.
        let t = 7.0;
        let nodes: Vec<f64> = (0..=400).map(|i| -30.0 + 0.15 * i as f64).collect();
        let w = filon_sq_weights(&nodes, t);
        let total: f64 = w.iter().sum();
        let (si, _) = si_cin(30.0 * t);
        let s = (30.0 * t * 0.5f64).sin();
        let want = 2.0 * (-4.0 * s * s / 30.0 + 2.0 * t * si);
        assert!((total - want).abs() < 1e-10 * want);
        // h: ∫ h dδ over symmetric range = Ein(At) − Ein(−At) = 2i Si(At)
        let wh = filon_h_weights(&nodes, t);
        let th: C<f64> = wh.iter().sum();
        assert!((th - C::new(0.0, 2.0 * si)).norm() < 1e-10);
    }
}
