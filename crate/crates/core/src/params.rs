//! Scalar parameters and closed-form profiles of the Emden-Fowler
//! reduction. Everything downstream reads these values from here; in
//! particular `p` is stored once and never recomputed from `eps`.

use crate::error::{Error, Result};

/// Space dimension, restricted to N >= 5. N = 4 needs a different scaling
/// of the linear term and is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n < 5 {
            return Err(Error::DimensionTooSmall(n));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    /// Critical Sobolev exponent (N+2)/(N-2).
    pub fn critical_exponent(self) -> f64 {
        (self.as_f64() + 2.0) / (self.as_f64() - 2.0)
    }
}

/// All scalar parameters derived from (N, eps) for the reduced ODE
/// v'' - a_p v' - b_p v + |v|^{p-1} v = 0.
#[derive(Debug, Clone, Copy)]
pub struct ExponentParams {
    pub n: u32,
    pub p: f64,
    pub eps: f64,
    pub a_p: f64,
    pub b_p: f64,
    /// Nontrivial stationary level, c_p^{p-1} = b_p.
    pub c_p: f64,
    /// Amplitude cap: the zero level of the Hamiltonian on the v-axis.
    pub d_p: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    /// Real part of the characteristic roots at the stationary level.
    pub spiral_real: f64,
    /// Imaginary part of those roots (0 when `spiral_ok` is false).
    pub spiral_imag: f64,
    /// Whether a_p^2 - 4(p-1) b_p < 0, i.e. the orbit spirals around c_p.
    pub spiral_ok: bool,
}

/// Populate every derived scalar from (N, eps).
pub fn derive_params(n: u32, eps: f64) -> Result<ExponentParams> {
    let dim = Dimension::new(n)?;
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::Domain(format!(
            "eps must be finite and >= 0, got {eps}"
        )));
    }
    let nf = dim.as_f64();
    let p = dim.critical_exponent() + eps;
    let pm1 = p - 1.0;
    let a_p = nf - 2.0 - 4.0 / pm1;
    let b_p = 2.0 / pm1 * (nf - 2.0 * p / pm1);
    if b_p <= 0.0 {
        return Err(Error::Domain(format!(
            "b_p = {b_p} <= 0, exponent p = {p} too small"
        )));
    }
    let c_p = b_p.powf(1.0 / pm1);
    let d_p = ((p + 1.0) / 2.0 * b_p).powf(1.0 / pm1);
    let gamma_plus = nf - 2.0 - 2.0 / pm1;
    let gamma_minus = -2.0 / pm1;
    let disc = a_p * a_p - 4.0 * pm1 * b_p;
    let spiral_ok = disc < 0.0;
    Ok(ExponentParams {
        n,
        p,
        eps,
        a_p,
        b_p,
        c_p,
        d_p,
        gamma_plus,
        gamma_minus,
        spiral_real: a_p / 2.0,
        spiral_imag: if spiral_ok { (-disc).sqrt() / 2.0 } else { 0.0 },
        spiral_ok,
    })
}

/// Phase-plane Hamiltonian H_p(x, y) = y^2/2 - b_p x^2/2 + x^{p+1}/(p+1).
/// Nondecreasing along orbits when p >= p_N.
pub fn hamiltonian(params: &ExponentParams, x: f64, y: f64) -> f64 {
    0.5 * y * y - 0.5 * params.b_p * x * x + x.abs().powf(params.p + 1.0) / (params.p + 1.0)
}

/// Characteristic roots (real part, imaginary part) of the linearization
/// at the stationary level c_p.
pub fn spiral_roots(params: &ExponentParams) -> Result<(f64, f64)> {
    if !params.spiral_ok {
        return Err(Error::SpiralCondition {
            a_p: params.a_p,
            b_p: params.b_p,
            p: params.p,
        });
    }
    Ok((params.spiral_real, params.spiral_imag))
}

/// The standard-bubble profile in cylindrical variables:
/// w0(t) = (N(N-2)/4)^{(N-2)/4} (cosh t)^{(2-N)/2}.
pub fn profile_w0(n: u32, t: f64) -> Result<f64> {
    let nf = Dimension::new(n)?.as_f64();
    Ok((nf * (nf - 2.0) / 4.0).powf((nf - 2.0) / 4.0) * t.cosh().powf((2.0 - nf) / 2.0))
}

/// Solution of the linearized equation with w(0) = 1, w'(0) = 0:
/// w_p = (gamma_+ e^{gamma_- t} - gamma_- e^{gamma_+ t})/(N-2),
/// and its first two derivatives.
pub fn profile_wp(params: &ExponentParams, t: f64, derivative_order: u32) -> Result<f64> {
    if derivative_order > 2 {
        return Err(Error::Domain(format!(
            "derivative order must be 0, 1 or 2, got {derivative_order}"
        )));
    }
    let (gp, gm) = (params.gamma_plus, params.gamma_minus);
    let k = derivative_order as i32;
    let nf = f64::from(params.n);
    Ok((gp * gm.powi(k) * (gm * t).exp() - gm * gp.powi(k) * (gp * t).exp()) / (nf - 2.0))
}

/// One spherical-harmonic mode: eigenvalue of the sphere Laplacian and the
/// indicial root of the linearized cylinder operator.
#[derive(Debug, Clone, Copy)]
pub struct SphereMode {
    pub order: u32,
    pub lambda_j: f64,
    pub gamma_j: f64,
}

pub fn sphere_mode(n: u32, order: u32) -> Result<SphereMode> {
    let nf = Dimension::new(n)?.as_f64();
    let k = f64::from(order);
    let lambda_j = k * (k + nf - 2.0);
    let gamma_j = (lambda_j + (nf - 2.0) * (nf - 2.0) / 4.0).sqrt();
    Ok(SphereMode {
        order,
        lambda_j,
        gamma_j,
    })
}

/// Linear-term size lambda = mu * eps^{(N-4)/(N-2)}.
pub fn lambda_from_mu(n: u32, eps: f64, mu: f64) -> Result<f64> {
    let nf = Dimension::new(n)?.as_f64();
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    Ok(mu * eps.powf((nf - 4.0) / (nf - 2.0)))
}
