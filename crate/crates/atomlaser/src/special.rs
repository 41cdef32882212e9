//! Sine/cosine integrals and Gauss–Legendre rules.

use crate::scalar::{Scalar, C};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Returns (Si(t), Cin(t)) for t ≥ 0, where Cin(t) = ∫₀ᵗ (1 − cos s)/s ds.
pub fn si_cin(t: f64) -> (f64, f64) {
    assert!(t >= 0.0, "si_cin expects t >= 0");
    if t <= 2.0 {
        let t2 = t * t;
        let (mut si, mut cin) = (0.0, 0.0);
        // term_n = (−1)^n t^{2n+1}/(2n+1)!
        let mut odd = t;
        let mut even = -1.0;
        let mut n = 0usize;
        loop {
            let k = 2 * n + 1;
            si += odd / k as f64;
            if n > 0 {
                cin += even / (2 * n) as f64;
            }
            let done = odd.abs() < 1e-18 * si.abs().max(1e-300) && n > 2;
            if done || n > 60 {
                break;
            }
            n += 1;
            even = -even * t2 / ((2 * n - 1) * (2 * n)) as f64;
            odd = -odd * t2 / ((2 * n) * (2 * n + 1)) as f64;
        }
        return (si, cin);
    }
    // Lentz continued fraction for E1(it).
    let tiny = 1e-300;
    let mut b = C::new(1.0, t);
    let mut c = C::new(1.0 / tiny, 0.0);
    let mut d = C::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 2..200 {
        let a = -(((i - 1) * (i - 1)) as f64);
        b += C::new(2.0, 0.0);
        d = C::new(1.0, 0.0) / (d * a + b);
        c = b + C::new(a, 0.0) / c;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
            break;
        }
    }
    h *= C::new(t.cos(), -t.sin());
    let ci = -h.re;
    let si = std::f64::consts::FRAC_PI_2 + h.im;
    (si, EULER_GAMMA + t.ln() - ci)
}

/// Cin(|y|) + i·sign(y)·Si(|y|), the antiderivative of (1 − e^{−iy})/y.
pub fn ein<T: Scalar>(y: T) -> C<T> {
    let yf = y.f64();
    let (si, cin) = si_cin(yf.abs());
    C::new(T::of(cin), T::of(si * yf.signum()))
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
