use rayon::prelude::*;

use super::elements::MatrixElementTable;
use super::quadrature::channel_grid;
use super::{ChannelKind, OutcouplingError};
use crate::scalar::{Scalar, C};
use crate::special::gauss_legendre;

/// Principal-value part of the long-time field, per requested channel.
#[derive(Debug, Clone)]
pub struct BoundComponent<T> {
    pub channels: Vec<usize>,
    /// B_η(x) = PV∫dω Σ_branch ρ φ λ/(ω − ω_out); |Ψ_bound| = |B_η|.
    pub profiles: Vec<Vec<C<T>>>,
    /// N0∫|B_0|² dx, when the condensate channel was requested.
    pub condensate_number: Option<T>,
    /// 2N0(λ(0)/ω_out^0)².
    pub condensate_estimate: Option<T>,
}

/// PV∫ f(ω)/(ω − ω0) dω over the sampled range by subtraction: trapezoid on
/// (f − f0)/(ω − ω0) plus f0·ln|(b − ω0)/(a − ω0)|. `f0` is f(ω0) and is
/// ignored when ω0 lies outside the samples.
pub fn pv_integral<T: Scalar>(omega: &[T], f: &[C<T>], omega0: T, f0: C<T>) -> C<T> {
    let c = pv_coefficients(omega, omega0);
    let mut s = C::new(T::zero(), T::zero());
    for (i, &ci) in c.weights.iter().enumerate() {
        s += f[i] * ci;
    }
    if c.inside {
        s += f0 * (c.log_term - c.weights.iter().copied().sum::<T>());
    }
    s
}

struct PvCoefficients<T> {
    weights: Vec<T>,
    log_term: T,
    inside: bool,
}

fn pv_coefficients<T: Scalar>(omega: &[T], omega0: T) -> PvCoefficients<T> {
    let n = omega.len();
    let a = omega[0];
    let b = omega[n - 1];
    let inside = omega0 > a && omega0 < b;
    let mut weights = vec![T::zero(); n];
    for i in 0..n - 1 {
        let half = (omega[i + 1] - omega[i]) * T::of(0.5);
        weights[i] += half;
        weights[i + 1] += half;
    }
    let mut hit = None;
    for (i, (w, &o)) in weights.iter_mut().zip(omega).enumerate() {
        if o == omega0 {
            hit = Some((i, *w));
            *w = T::zero();
        } else {
            *w /= o - omega0;
        }
    }
    // a sample on ω0 carries the derivative f'(ω0), taken by central difference
    if let Some((i, w)) = hit.filter(|&(i, _)| i > 0 && i + 1 < n) {
        let span = omega[i + 1] - omega[i - 1];
        weights[i + 1] += w / span;
        weights[i - 1] -= w / span;
    }
    let log_term = if inside { ((b - omega0) / (omega0 - a)).ln() } else { T::zero() };
    PvCoefficients { weights, log_term, inside }
}

/// Independent PV evaluation: Re∫ f(ω)(ω − ω0)/((ω − ω0)² + ε²) dω by
/// graded Gauss–Legendre panels, Richardson-extrapolated to ε → 0.
pub fn pv_regularized<F>(f: F, a: f64, b: f64, omega0: f64, eps: f64) -> C<f64>
where
    F: Fn(f64) -> C<f64> + Sync,
{
    let (gx, gw) = gauss_legendre(20);
    let eval = |e: f64| -> C<f64> {
        // panel edges graded geometrically towards ω0
        let mut edges = vec![a];
        let push_side = |from: f64, to: f64, edges: &mut Vec<f64>| {
            let len = (to - from).abs();
            let mut d = e * 0.25;
            let mut pts = vec![];
            while d < len {
                pts.push(d);
                d *= 1.5;
            }
            pts.into_iter().map(|d| if to > from { from + d } else { from - d }).for_each(|p| edges.push(p));
        };
        if omega0 > a && omega0 < b {
            let mut left = vec![];
            push_side(omega0, a, &mut left);
            left.reverse();
            edges.extend(left);
            edges.push(omega0);
            push_side(omega0, b, &mut edges);
        }
        edges.push(b);
        edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
        edges.dedup();
        edges
            .par_windows(2)
            .map(|w| {
                let (lo, hi) = (w[0], w[1]);
                let mut s = C::new(0.0, 0.0);
                for (x, wt) in gx.iter().zip(&gw) {
                    let om = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
                    let d = om - omega0;
                    s += f(om) * (wt * 0.5 * (hi - lo) * d / (d * d + e * e));
                }
                s
            })
            .reduce(|| C::new(0.0, 0.0), |p, q| p + q)
    };
    // error is a series in ε; two Richardson levels
    let v1 = eval(eps);
    let v2 = eval(eps / 2.0);
    let v3 = eval(eps / 4.0);
    let r1 = v2 * 2.0 - v1;
    let r2 = v3 * 2.0 - v2;
    (r2 * 4.0 - r1) / 3.0
}

/// Bound (principal-value) field of the requested channels.
pub fn bound_component<T: Scalar>(
    table: &MatrixElementTable<T>,
    requested: &[usize],
    n0: T,
    lambda_origin: T,
) -> Result<BoundComponent<T>, OutcouplingError> {
    for &c in requested {
        if table.omega_out(c) == T::zero() {
            return Err(OutcouplingError::Threshold(table.channels[c].kind.label()));
        }
    }
    let h = table.basis.x_half.len();
    let profiles = requested
        .par_iter()
        .map(|&c| {
            // refined window at a long nominal time, for spacing only
            let g = channel_grid(table, c, T::of(200.0), 400)?;
            let w0 = table.omega_out(c);
            let omegas: Vec<T> = g.nodes.iter().map(|n| n.omega).collect();
            let coef = pv_coefficients(&omegas, w0);
            let zero = C::new(T::zero(), T::zero());
            let mut sym = vec![zero; h];
            let mut anti = vec![zero; h];
            for i in 0..g.nodes.len() {
                let a = coef.weights[i] * g.nodes[i].rho;
                let (pe, po) = g.phi(table, i);
                let (ce, co) = (g.lam_e[i] * a, g.lam_o[i] * a);
                for k in 0..h {
                    sym[k] += ce * pe[k];
                    anti[k] += co * po[k];
                }
            }
            if coef.inside {
                let (pe, po) = table.basis.half_pair(w0);
                let (le, lo) = table.elements_at(c, w0);
                let rho = table.basis.node(w0).rho;
                let sub = coef.log_term - coef.weights.iter().copied().sum::<T>();
                for k in 0..h {
                    sym[k] += le * (rho * pe[k] * sub);
                    anti[k] += lo * (rho * po[k] * sub);
                }
            }
            let mut out = vec![zero; 2 * h];
            for k in 0..h {
                out[h + k] = sym[k] + anti[k];
                out[h - 1 - k] = sym[k] - anti[k];
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>, OutcouplingError>>()?;
    let cond = requested.iter().position(|&c| table.channels[c].kind == ChannelKind::Condensate);
    let condensate_number = cond.map(|i| n0 * profiles[i].iter().map(|z| z.norm_sqr()).sum::<T>() * table.basis.dx);
    let condensate_estimate = cond.map(|i| {
        let w0 = table.omega_out(requested[i]);
        T::of(2.0) * n0 * (lambda_origin / w0) * (lambda_origin / w0)
    });
    Ok(BoundComponent { channels: requested.to_vec(), profiles, condensate_number, condensate_estimate })
}
