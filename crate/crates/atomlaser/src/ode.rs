//! Dormand–Prince 5(4) integrator that lands exactly on requested output times.

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OdeError {
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("step budget exhausted at t = {0}")]
    TooManySteps(f64),
    #[error("output times must be nondecreasing")]
    Times,
}

#[derive(Debug, Clone)]
pub struct OdeOutput<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    /// Time at which the stop predicate fired, if it did.
    pub stopped_at: Option<T>,
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5<T> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
}

impl<T: Scalar> Dopri5<T> {
    pub fn new(rtol: T, atol: T) -> Self {
        Self { rtol, atol, max_steps: 1_000_000 }
    }

    /// Integrates y' = f(t, y) from `times[0]`, recording y at each entry of `times`.
    /// Integration halts after the first accepted step where `stop(y)` holds.
    pub fn integrate<F, S>(&self, mut f: F, y0: &[T], times: &[T], stop: S) -> Result<OdeOutput<T>, OdeError>
    where
        F: FnMut(T, &[T], &mut [T]),
        S: Fn(&[T]) -> bool,
    {
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(OdeError::Times);
        }
        let n = y0.len();
        let mut out = OdeOutput { times: vec![], states: vec![], stopped_at: None };
        if times.is_empty() {
            return Ok(out);
        }
        let c = |x: f64| T::of(x);
        let (c2, c3, c4, c5) = (c(0.2), c(0.3), c(0.8), c(8.0 / 9.0));
        let a21 = c(0.2);
        let (a31, a32) = (c(3.0 / 40.0), c(9.0 / 40.0));
        let (a41, a42, a43) = (c(44.0 / 45.0), c(-56.0 / 15.0), c(32.0 / 9.0));
        let (a51, a52, a53, a54) = (c(19372.0 / 6561.0), c(-25360.0 / 2187.0), c(64448.0 / 6561.0), c(-212.0 / 729.0));
        let (a61, a62, a63, a64, a65) =
            (c(9017.0 / 3168.0), c(-355.0 / 33.0), c(46732.0 / 5247.0), c(49.0 / 176.0), c(-5103.0 / 18656.0));
        let (b1, b3, b4, b5, b6) =
            (c(35.0 / 384.0), c(500.0 / 1113.0), c(125.0 / 192.0), c(-2187.0 / 6784.0), c(11.0 / 84.0));
        let (e1, e3, e4, e5, e6, e7) = (
            c(71.0 / 57600.0),
            c(-71.0 / 16695.0),
            c(71.0 / 1920.0),
            c(-17253.0 / 339200.0),
            c(22.0 / 525.0),
            c(-1.0 / 40.0),
        );

        let mut t = times[0];
        let mut y = y0.to_vec();
        out.times.push(t);
        out.states.push(y.clone());
        if stop(&y) {
            out.stopped_at = Some(t);
            return Ok(out);
        }
        let t_end = *times.last().unwrap();
        let mut k1 = vec![T::zero(); n];
        let mut k2 = k1.clone();
        let mut k3 = k1.clone();
        let mut k4 = k1.clone();
        let mut k5 = k1.clone();
        let mut k6 = k1.clone();
        let mut k7 = k1.clone();
        let mut tmp = k1.clone();
        let mut ynew = k1.clone();
        f(t, &y, &mut k1);
        let span = (t_end - t).abs();
        let mut h = if span > T::zero() { span * c(1e-3) } else { T::one() };
        let mut next_out = 1usize;
        let mut steps = 0usize;
        while next_out < times.len() {
            let target = times[next_out];
            if target <= t {
                out.times.push(target);
                out.states.push(y.clone());
                next_out += 1;
                continue;
            }
            steps += 1;
            if steps > self.max_steps {
                return Err(OdeError::TooManySteps(t.f64()));
            }
            let hit = t + h >= target;
            let hs = if hit { target - t } else { h };
            if hs <= T::epsilon() * t.abs().max(T::one()) {
                return Err(OdeError::StepUnderflow(t.f64()));
            }
            for i in 0..n {
                tmp[i] = y[i] + hs * a21 * k1[i];
            }
            f(t + c2 * hs, &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
            }
            f(t + c3 * hs, &tmp, &mut k3);
            for i in 0..n {
                tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            }
            f(t + c4 * hs, &tmp, &mut k4);
            for i in 0..n {
                tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            }
            f(t + c5 * hs, &tmp, &mut k5);
            for i in 0..n {
                tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            }
            f(t + hs, &tmp, &mut k6);
            for i in 0..n {
                ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            }
            f(t + hs, &ynew, &mut k7);
            let mut err = T::zero();
            for i in 0..n {
                let ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(ynew[i].abs());
                err += (ei / sc) * (ei / sc);
            }
            err = (err / T::of_usize(n.max(1))).sqrt();
            if err <= T::one() {
                t = if hit { target } else { t + hs };
                std::mem::swap(&mut y, &mut ynew);
                std::mem::swap(&mut k1, &mut k7);
                if hit {
                    out.times.push(t);
                    out.states.push(y.clone());
                    next_out += 1;
                }
                if stop(&y) {
                    if !hit {
                        out.times.push(t);
                        out.states.push(y.clone());
                    }
                    out.stopped_at = Some(t);
                    return Ok(out);
                }
            }
            let fac = if err == T::zero() { c(5.0) } else { (c(0.9) * err.powf(c(-0.2))).min(c(5.0)).max(c(0.2)) };
            let grown = hs * fac;
            // do not let a short landing step shrink the working step
            h = if hit && err <= T::one() { h.max(grown) } else { grown };
        }
        Ok(out)
    }
}
