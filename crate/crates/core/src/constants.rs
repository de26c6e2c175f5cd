//! Dimensional constants of the construction, computed by high-accuracy
//! quadrature and cross-checked against closed forms (hyperbolic-secant
//! moments reduce to Beta functions).
//!
//! Closed forms used as oracles:
//!   S_m   := int sech^m t dt            = sqrt(pi) Gamma(m/2) / Gamma((m+1)/2)
//!   E2_m  := int e^{-2t} sech^m t dt    = 2 S_{m-2} - S_m  (= 2^{m-1} B(m/2+1, m/2-1))
//! The second identity follows from e^{-2t} = cosh 2t - sinh 2t, the odd
//! part integrating to zero and cosh 2t = 2 cosh^2 t - 1.

use crate::error::Result;
use crate::params::Dimension;
use crate::quad::improper_quadrature;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstantKind {
    C1,
    C2,
    /// Mass normalization printed in the blow-up statement; see also
    /// [`bubble_energy`] for the Dirichlet energy carried by one bubble.
    C3,
    /// Leading coefficient of the minima law eps_{p,i}^2 ~ i eps C4.
    C4,
    /// Limit of e^{2 t_bar} beta along the return leg.
    C5,
    /// Additive constant of the time-to-maximum law.
    C6,
    /// (N-2)^2 C4 / 8.
    C7,
    /// Leading coefficient of the weighted tail integrals beta_{p,l}.
    C8,
}

impl ConstantKind {
    pub const ALL: [ConstantKind; 8] = [
        ConstantKind::C1,
        ConstantKind::C2,
        ConstantKind::C3,
        ConstantKind::C4,
        ConstantKind::C5,
        ConstantKind::C6,
        ConstantKind::C7,
        ConstantKind::C8,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ConstantKind::C1 => "C1",
            ConstantKind::C2 => "C2",
            ConstantKind::C3 => "C3",
            ConstantKind::C4 => "C4",
            ConstantKind::C5 => "C5",
            ConstantKind::C6 => "C6",
            ConstantKind::C7 => "C7",
            ConstantKind::C8 => "C8",
        }
    }
}

/// ln Gamma by the nine-term Lanczos approximation (relative error below
/// 1e-13 on the positive axis).
pub fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = G[0];
    let t = x + 7.5;
    for (i, g) in G.iter().enumerate().skip(1) {
        a += g / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn beta_fn(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Closed form of int sech^m t dt over the line.
pub fn sech_moment(m: f64) -> f64 {
    std::f64::consts::PI.sqrt() * (ln_gamma(m / 2.0) - ln_gamma((m + 1.0) / 2.0)).exp()
}

/// Closed form of int e^{-2t} sech^m t dt over the line (m > 2).
pub fn weighted_sech_moment(m: f64) -> f64 {
    2.0 * sech_moment(m - 2.0) - sech_moment(m)
}

/// Surface area of the unit sphere S^{N-1}.
pub fn sphere_area(n: u32) -> f64 {
    let nf = f64::from(n);
    2.0 * std::f64::consts::PI.powf(nf / 2.0) / (ln_gamma(nf / 2.0)).exp()
}

fn amplitude_sq(nf: f64) -> f64 {
    // (N(N-2)/4)^{(N-2)/2}, the square of the bubble amplitude factor
    (nf * (nf - 2.0) / 4.0).powf((nf - 2.0) / 2.0)
}

/// Quadrature route for every kind that is defined by an integral; the
/// algebraic kinds compose the quadrature values.
fn compute(kind: ConstantKind, n: u32) -> Result<f64> {
    let nf = Dimension::new(n)?.as_f64();
    let m = nf - 2.0;
    Ok(match kind {
        ConstantKind::C4 => {
            let s = improper_quadrature(|t: f64| t.cosh().powf(-m), m.min(2.0))?;
            amplitude_sq(nf) * m * m / (2.0 * (nf - 1.0)) * s
        }
        ConstantKind::C5 => {
            let s = improper_quadrature(|t: f64| (-2.0 * t).exp() * t.cosh().powf(-m), m - 2.0)?;
            amplitude_sq(nf) * s
        }
        ConstantKind::C6 => 2.0 / m * 2f64.ln() + 0.5 * (nf * m).ln(),
        ConstantKind::C7 => m * m * compute(ConstantKind::C4, n)? / 8.0,
        ConstantKind::C8 => {
            let c4 = compute(ConstantKind::C4, n)?;
            let c5 = compute(ConstantKind::C5, n)?;
            let c6 = compute(ConstantKind::C6, n)?;
            c4.powf(2.0 / m) * c5 * (-2.0 * c6).exp()
        }
        ConstantKind::C2 => compute(ConstantKind::C4, n)? / 2.0,
        ConstantKind::C1 => {
            let c4 = compute(ConstantKind::C4, n)?;
            let c8 = compute(ConstantKind::C8, n)?;
            2f64.powf(4.0 / m) * c8 / (m * c4.powf(2.0 / m))
        }
        ConstantKind::C3 => {
            // radial reduction of int (1+|x|^2)^{-(N+2)/2} via r = e^s
            let radial = improper_quadrature(
                |s: f64| ((nf * s).exp()) * (1.0 + (2.0 * s).exp()).powf(-(nf + 2.0) / 2.0),
                2.0,
            )?;
            (nf * m).powf((nf + 2.0) / 4.0) * sphere_area(n) * radial
        }
    })
}

/// Memoized constant lookup, keyed per (kind, N).
pub fn constant(kind: ConstantKind, n: u32) -> Result<f64> {
    static TABLE: OnceLock<Mutex<HashMap<(ConstantKind, u32), f64>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = table.lock().unwrap().get(&(kind, n)) {
        return Ok(v);
    }
    let v = compute(kind, n)?;
    table.lock().unwrap().insert((kind, n), v);
    Ok(v)
}

/// Closed-form oracle for the integral-defined kinds.
pub fn closed_form(kind: ConstantKind, n: u32) -> Result<f64> {
    let nf = Dimension::new(n)?.as_f64();
    let m = nf - 2.0;
    Ok(match kind {
        ConstantKind::C4 => amplitude_sq(nf) * m * m / (2.0 * (nf - 1.0)) * sech_moment(m),
        ConstantKind::C5 => amplitude_sq(nf) * weighted_sech_moment(m),
        ConstantKind::C3 => {
            // int_0^inf r^{N-1}(1+r^2)^{-(N+2)/2} dr = B(N/2, 1)/2 = 1/N
            (nf * m).powf((nf + 2.0) / 4.0) * sphere_area(n) * 0.5 * beta_fn(nf / 2.0, 1.0)
        }
        _ => constant(kind, n)?,
    })
}

/// Dirichlet energy of one standard bubble, int |grad U|^2 = S^{N/2}:
/// the weak-* mass actually carried per bubble by |grad u|^2 dx.
/// Closed form (N(N-2))^{N/2} pi^{N/2} Gamma(N/2)/Gamma(N), cross-checked
/// by quadrature of int U^{p_N + 1}.
pub fn bubble_energy(n: u32) -> Result<f64> {
    let nf = Dimension::new(n)?.as_f64();
    Ok((nf * (nf - 2.0)).powf(nf / 2.0)
        * std::f64::consts::PI.powf(nf / 2.0)
        * (ln_gamma(nf / 2.0) - ln_gamma(nf)).exp())
}

/// Quadrature route for [`bubble_energy`].
pub fn bubble_energy_quadrature(n: u32) -> Result<f64> {
    let nf = Dimension::new(n)?.as_f64();
    let radial = improper_quadrature(
        |s: f64| ((nf * s).exp()) * (1.0 + (2.0 * s).exp()).powf(-nf),
        2.0,
    )?;
    Ok((nf * (nf - 2.0)).powf(nf / 2.0) * sphere_area(n) * radial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn lanczos_matches_factorials() {
        for k in 1..=15u32 {
            let exact: f64 = (1..k).map(f64::from).product::<f64>().max(1.0);
            assert_relative_eq!(ln_gamma(f64::from(k)).exp(), exact, max_relative = 1e-13);
        }
        // half-integer: Gamma(1/2) = sqrt(pi)
        assert_relative_eq!(
            ln_gamma(0.5).exp(),
            std::f64::consts::PI.sqrt(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn n6_reference_values() {
        // C4 = 36 * (16/10) * (4/3) = 76.8
        assert_abs_diff_eq!(constant(ConstantKind::C4, 6).unwrap(), 76.8, epsilon = 1e-9);
        // C5 = 36 * (2*S_2 - S_4) = 36 * 8/3 = 96
        assert_abs_diff_eq!(constant(ConstantKind::C5, 6).unwrap(), 96.0, epsilon = 1e-9);
        // C6 = log(48)/2, so e^{-2 C6} = 1/48
        assert_abs_diff_eq!(
            constant(ConstantKind::C6, 6).unwrap(),
            48f64.ln() / 2.0,
            epsilon = 1e-13
        );
        // C8 = sqrt(76.8) * 96 / 48 = 2 sqrt(76.8)
        assert_abs_diff_eq!(
            constant(ConstantKind::C8, 6).unwrap(),
            2.0 * 76.8f64.sqrt(),
            epsilon = 1e-9
        );
        // C3 = 576 * pi^3 / 6 = 96 pi^3
        assert_relative_eq!(
            constant(ConstantKind::C3, 6).unwrap(),
            96.0 * std::f64::consts::PI.powi(3),
            max_relative = 1e-9
        );
        // C1 = C5/(N (N-2)^2) = 1 for N = 6
        assert_abs_diff_eq!(constant(ConstantKind::C1, 6).unwrap(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(constant(ConstantKind::C2, 6).unwrap(), 38.4, epsilon = 1e-9);
    }

    #[test]
    fn quadrature_matches_closed_forms_all_dimensions() {
        for n in 5..=10 {
            for kind in [ConstantKind::C3, ConstantKind::C4, ConstantKind::C5] {
                let q = constant(kind, n).unwrap();
                let c = closed_form(kind, n).unwrap();
                assert_relative_eq!(q, c, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn algebraic_relations_recomputed_independently() {
        for n in 5..=10 {
            let nf = f64::from(n);
            let m = nf - 2.0;
            let c4 = constant(ConstantKind::C4, n).unwrap();
            let c5 = constant(ConstantKind::C5, n).unwrap();
            let c6 = constant(ConstantKind::C6, n).unwrap();
            let c7 = constant(ConstantKind::C7, n).unwrap();
            let c8 = constant(ConstantKind::C8, n).unwrap();
            let c1 = constant(ConstantKind::C1, n).unwrap();
            let c2 = constant(ConstantKind::C2, n).unwrap();
            assert_relative_eq!(c7, m * m * c4 / 8.0, max_relative = 1e-14);
            assert_relative_eq!(c2, c4 / 2.0, max_relative = 1e-14);
            assert_relative_eq!(
                c8,
                c4.powf(2.0 / m) * c5 * (-2.0 * c6).exp(),
                max_relative = 1e-13
            );
            assert_relative_eq!(
                c1,
                2f64.powf(4.0 / m) * c8 / (m * c4.powf(2.0 / m)),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn bubble_energy_routes_agree() {
        for n in 5..=10 {
            assert_relative_eq!(
                bubble_energy(n).unwrap(),
                bubble_energy_quadrature(n).unwrap(),
                max_relative = 1e-11
            );
        }
        // N = 6: S^3 = 24^3 pi^3 / 60 = 230.4 pi^3
        assert_relative_eq!(
            bubble_energy(6).unwrap(),
            230.4 * std::f64::consts::PI.powi(3),
            max_relative = 1e-12
        );
    }

    #[test]
    fn rejects_low_dimension() {
        assert!(constant(ConstantKind::C4, 4).is_err());
    }
}
