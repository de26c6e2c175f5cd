//! Gauss-Legendre quadrature, including the improper-integral driver used
//! for the dimensional constants.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_jet(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_jet(n, x);
        nodes[n - 1 - k] = x;
        weights[n - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_jet(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn rule32() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(32))
}

/// Composite Gauss-Legendre with 32-point panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (nodes, weights) = rule32();
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        let mut panel = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            panel += w * f(mid + half * x);
        }
        sum += panel * half;
    }
    sum
}

/// Integral over the whole line of an exponentially decaying integrand:
/// `|f(t)| <= C e^{-decay_rate |t|}`. The truncation point grows until the
/// estimated tail is below 1e-14 of the running value; the panel count is
/// refined to an absolute accuracy target of 1e-12.
pub fn improper_quadrature<F: Fn(f64) -> f64>(f: F, decay_rate: f64) -> Result<f64> {
    if !(decay_rate > 0.0) {
        return Err(Error::Domain(format!(
            "improper quadrature needs a positive decay rate, got {decay_rate}"
        )));
    }
    let mut half_width = 8.0 / decay_rate.min(1.0);
    let mut value = 0.0;
    for _ in 0..16 {
        let panels = ((2.0 * half_width).ceil() as usize).clamp(8, 4096);
        let coarse = integrate(&f, -half_width, half_width, panels);
        let fine = integrate(&f, -half_width, half_width, 2 * panels);
        value = fine;
        let panel_err = (fine - coarse).abs();
        // tail bound from the observed edge values
        let tail = (f(half_width).abs() + f(-half_width).abs()) / decay_rate;
        if tail <= 1e-14 * value.abs().max(1e-3) && panel_err <= 1e-12 {
            return Ok(value);
        }
        if tail > 1e-14 * value.abs().max(1e-3) {
            half_width *= 1.5;
        }
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        // 32-point rule is exact through degree 63.
        let (nodes, weights) = gauss_legendre(32);
        let int_x2: f64 = nodes.iter().zip(&weights).map(|(x, w)| w * x * x).sum();
        assert_abs_diff_eq!(int_x2, 2.0 / 3.0, epsilon = 1e-14);
        let int_x20: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(x, w)| w * x.powi(20))
            .sum();
        assert_abs_diff_eq!(int_x20, 2.0 / 21.0, epsilon = 1e-14);
    }

    #[test]
    fn sech_moments() {
        // closed forms: pi/2 and 4/3
        let i3 = improper_quadrature(|t: f64| t.cosh().powi(-3), 2.0).unwrap();
        assert_abs_diff_eq!(i3, std::f64::consts::PI / 2.0, epsilon = 1e-12);
        let i4 = improper_quadrature(|t: f64| t.cosh().powi(-4), 2.0).unwrap();
        assert_abs_diff_eq!(i4, 4.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn weighted_sech_moment() {
        // int e^{-2s} sech^4 s ds = 2*int sech^2 - int sech^4 = 4 - 4/3 = 8/3.
        // Equivalently 2^{m-1} B(m/2+1, m/2-1) with m = 4.
        let v = improper_quadrature(|s: f64| (-2.0 * s).exp() * s.cosh().powi(-4), 2.0).unwrap();
        assert_abs_diff_eq!(v, 8.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_nonpositive_decay() {
        assert!(improper_quadrature(|_| 0.0, 0.0).is_err());
        assert!(improper_quadrature(|_| 0.0, -1.0).is_err());
    }
}
