//! The finite-dimensional reduced energy
//!   F(Lambda, x) = Lambda M(x) Lambda^T
//!                  - mu C1 sum Lambda_i^{4/(N-2)} + C2 sum l_i log Lambda_i
//! with analytic gradient and Hessian, a damped Newton critical-point
//! search, and the executable single-ball / exterior-pair / thin-annulus
//! scenarios.

use crate::constants::{constant, ConstantKind};
use crate::error::{Error, Result};
use crate::green::{image_jet, interaction_matrix, singular_jet, DomainGeometry};
use crate::linalg::{lu_solve, norm2, sym_eigen};
use crate::params::Dimension;

#[derive(Debug, Clone)]
pub struct ReducedConfiguration {
    pub geometry: DomainGeometry,
    pub n: u32,
    /// Positive weights, one per concentration point.
    pub lambda: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub mu: f64,
    /// Tower heights l_i.
    pub ells: Vec<u32>,
}

impl ReducedConfiguration {
    pub fn m(&self) -> usize {
        self.lambda.len()
    }

    /// Total number of degrees of freedom, m (N + 1).
    pub fn dof(&self) -> usize {
        self.m() * (self.n as usize + 1)
    }

    pub fn validate(&self) -> Result<()> {
        Dimension::new(self.n)?;
        if self.lambda.is_empty()
            || self.lambda.len() != self.points.len()
            || self.lambda.len() != self.ells.len()
        {
            return Err(Error::Domain("lambda/points/ells lengths disagree".into()));
        }
        for l in &self.lambda {
            if !(*l > 0.0) {
                return Err(Error::Domain(format!("lambda must be positive, got {l}")));
            }
        }
        for p in &self.points {
            if p.len() != self.n as usize {
                return Err(Error::Domain("point dimension mismatch".into()));
            }
            if !self.geometry.contains(p) {
                return Err(Error::Domain(format!("point {p:?} not interior")));
            }
        }
        Ok(())
    }

    fn coincident(&self) -> bool {
        let m = self.m();
        for i in 0..m {
            for j in (i + 1)..m {
                let d: f64 = self.points[i]
                    .iter()
                    .zip(&self.points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if d <= 1e-12 {
                    return true;
                }
            }
        }
        false
    }

    /// Pack (lambda, x) into one coordinate vector.
    fn pack(&self) -> Vec<f64> {
        let mut v = self.lambda.clone();
        for p in &self.points {
            v.extend_from_slice(p);
        }
        v
    }

    fn unpack(&self, v: &[f64]) -> ReducedConfiguration {
        let m = self.m();
        let n = self.n as usize;
        let mut cfg = self.clone();
        cfg.lambda = v[..m].to_vec();
        for i in 0..m {
            cfg.points[i] = v[m + i * n..m + (i + 1) * n].to_vec();
        }
        cfg
    }
}

/// Value of the reduced energy; the sentinel tags coincident points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyValue {
    Finite(f64),
    NegInfinity,
}

impl EnergyValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            EnergyValue::Finite(v) => Some(v),
            EnergyValue::NegInfinity => None,
        }
    }
}

pub fn evaluate_f(config: &ReducedConfiguration) -> Result<EnergyValue> {
    config.validate()?;
    if config.coincident() {
        return Ok(EnergyValue::NegInfinity);
    }
    let c1 = constant(ConstantKind::C1, config.n)?;
    let c2 = constant(ConstantKind::C2, config.n)?;
    let q = 4.0 / (f64::from(config.n) - 2.0);
    let mat = interaction_matrix(config.geometry, &config.points)?;
    let m = config.m();
    let mut value = 0.0;
    for i in 0..m {
        for j in 0..m {
            value += config.lambda[i] * mat.entries[i][j] * config.lambda[j];
        }
    }
    for i in 0..m {
        value -= config.mu * c1 * config.lambda[i].powf(q);
        value += c2 * f64::from(config.ells[i]) * config.lambda[i].ln();
    }
    Ok(EnergyValue::Finite(value))
}

/// Analytic gradient, ordered [dF/dLambda_1.., dF/dx_1 (N comps), ..].
pub fn gradient_f(config: &ReducedConfiguration) -> Result<Vec<f64>> {
    Ok(derivatives(config)?.1)
}

/// Analytic Hessian in the same ordering.
pub fn hessian_f(config: &ReducedConfiguration) -> Result<Vec<Vec<f64>>> {
    Ok(derivatives(config)?.2)
}

fn derivatives(config: &ReducedConfiguration) -> Result<(f64, Vec<f64>, Vec<Vec<f64>>)> {
    config.validate()?;
    if config.coincident() {
        return Err(Error::Degenerate("coincident concentration points".into()));
    }
    let nf = f64::from(config.n);
    let n = config.n as usize;
    let m = config.m();
    let dof = config.dof();
    let c1 = constant(ConstantKind::C1, config.n)?;
    let c2 = constant(ConstantKind::C2, config.n)?;
    let q = 4.0 / (nf - 2.0);
    let lam = &config.lambda;
    let pts = &config.points;

    let mut value = 0.0;
    let mut grad = vec![0.0; dof];
    let mut hess = vec![vec![0.0; dof]; dof];
    let xi = |i: usize, a: usize| m + i * n + a;

    // Robin diagonal terms Lambda_i^2 h(x_i)
    for i in 0..m {
        let jet = image_jet(nf, &pts[i], &pts[i]);
        let h = jet.value;
        // first and second total derivatives of x -> K(x, x)
        let dh: Vec<f64> = (0..n).map(|a| jet.grad_y[a] + jet.grad_z[a]).collect();
        let mut d2h = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in 0..n {
                d2h[a][b] =
                    jet.hess_yy[a][b] + jet.hess_zz[a][b] + jet.hess_yz[a][b] + jet.hess_yz[b][a];
            }
        }
        value += lam[i] * lam[i] * h;
        grad[i] += 2.0 * lam[i] * h;
        hess[i][i] += 2.0 * h;
        for a in 0..n {
            grad[xi(i, a)] += lam[i] * lam[i] * dh[a];
            hess[i][xi(i, a)] += 2.0 * lam[i] * dh[a];
            hess[xi(i, a)][i] += 2.0 * lam[i] * dh[a];
            for b in 0..n {
                hess[xi(i, a)][xi(i, b)] += lam[i] * lam[i] * d2h[a][b];
            }
        }
    }

    // interaction terms -2 Lambda_i Lambda_j G(x_i, x_j), i < j
    for i in 0..m {
        for j in (i + 1)..m {
            let si = singular_jet(nf, &pts[i], &pts[j]);
            let im = image_jet(nf, &pts[i], &pts[j]);
            let g = si.value - im.value;
            let gy: Vec<f64> = (0..n).map(|a| si.grad_y[a] - im.grad_y[a]).collect();
            let gz: Vec<f64> = (0..n).map(|a| si.grad_z[a] - im.grad_z[a]).collect();
            value -= 2.0 * lam[i] * lam[j] * g;
            grad[i] -= 2.0 * lam[j] * g;
            grad[j] -= 2.0 * lam[i] * g;
            hess[i][j] -= 2.0 * g;
            hess[j][i] -= 2.0 * g;
            for a in 0..n {
                grad[xi(i, a)] -= 2.0 * lam[i] * lam[j] * gy[a];
                grad[xi(j, a)] -= 2.0 * lam[i] * lam[j] * gz[a];
                // Lambda-x cross blocks
                hess[i][xi(i, a)] -= 2.0 * lam[j] * gy[a];
                hess[xi(i, a)][i] -= 2.0 * lam[j] * gy[a];
                hess[j][xi(i, a)] -= 2.0 * lam[i] * gy[a];
                hess[xi(i, a)][j] -= 2.0 * lam[i] * gy[a];
                hess[i][xi(j, a)] -= 2.0 * lam[j] * gz[a];
                hess[xi(j, a)][i] -= 2.0 * lam[j] * gz[a];
                hess[j][xi(j, a)] -= 2.0 * lam[i] * gz[a];
                hess[xi(j, a)][j] -= 2.0 * lam[i] * gz[a];
                for b in 0..n {
                    let gyy = si.hess_yy[a][b] - im.hess_yy[a][b];
                    let gzz = si.hess_zz[a][b] - im.hess_zz[a][b];
                    let gyz = si.hess_yz[a][b] - im.hess_yz[a][b];
                    hess[xi(i, a)][xi(i, b)] -= 2.0 * lam[i] * lam[j] * gyy;
                    hess[xi(j, a)][xi(j, b)] -= 2.0 * lam[i] * lam[j] * gzz;
                    hess[xi(i, a)][xi(j, b)] -= 2.0 * lam[i] * lam[j] * gyz;
                    hess[xi(j, b)][xi(i, a)] -= 2.0 * lam[i] * lam[j] * gyz;
                }
            }
        }
    }

    // Lambda-only terms
    for i in 0..m {
        let li = f64::from(config.ells[i]);
        value += -config.mu * c1 * lam[i].powf(q) + c2 * li * lam[i].ln();
        grad[i] += -config.mu * c1 * q * lam[i].powf(q - 1.0) + c2 * li / lam[i];
        hess[i][i] +=
            -config.mu * c1 * q * (q - 1.0) * lam[i].powf(q - 2.0) - c2 * li / (lam[i] * lam[i]);
    }

    Ok((value, grad, hess))
}

/// A certified critical point.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub config: ReducedConfiguration,
    pub value: f64,
    pub grad_norm: f64,
    /// Full-space Hessian spectrum, ascending.
    pub hessian_spectrum: Vec<f64>,
    pub min_abs_eig: f64,
    pub nondegenerate: bool,
    /// When true, the certification (grad_norm, nondegenerate) refers to
    /// the symmetry-reduced variables; the full Hessian spectrum then
    /// carries the rotational null directions.
    pub symmetry_reduced: bool,
    /// Spectrum of the reduced Hessian when `symmetry_reduced` is set.
    pub reduced_spectrum: Option<Vec<f64>>,
}

fn certify(config: &ReducedConfiguration) -> Result<CriticalPoint> {
    let (value, grad, hess) = derivatives(config)?;
    let eig = sym_eigen(&hess);
    let radius = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let min_abs = eig.values.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    Ok(CriticalPoint {
        config: config.clone(),
        value,
        grad_norm: norm2(&grad),
        hessian_spectrum: eig.values,
        min_abs_eig: min_abs,
        nondegenerate: min_abs >= 1e-8 * radius,
        symmetry_reduced: false,
        reduced_spectrum: None,
    })
}

/// Largest step fraction in [0, 1] keeping the configuration admissible
/// (positive weights, interior points), with a 10% margin to the boundary.
fn max_step_fraction(config: &ReducedConfiguration, dir: &[f64]) -> f64 {
    let m = config.m();
    let n = config.n as usize;
    let mut beta: f64 = 1.0;
    for i in 0..m {
        if dir[i] < 0.0 {
            beta = beta.min(-0.9 * config.lambda[i] / dir[i]);
        }
    }
    // shrink until interiority holds
    let interior = |b: f64| -> bool {
        for i in 0..m {
            let pt: Vec<f64> = (0..n)
                .map(|a| config.points[i][a] + b * dir[m + i * n + a])
                .collect();
            if !config.geometry.contains(&pt) || config.geometry.boundary_distance(&pt) < 1e-9 {
                return false;
            }
        }
        true
    };
    let mut guard = 0;
    while !interior(beta) && guard < 60 {
        beta *= 0.5;
        guard += 1;
    }
    if guard >= 60 {
        0.0
    } else {
        beta
    }
}

/// Damped Newton on the full (Lambda, x) vector, backtracking on |grad|^2,
/// with positivity and interiority enforced by step clipping.
pub fn find_critical(config0: &ReducedConfiguration, max_iter: usize) -> Result<CriticalPoint> {
    config0.validate()?;
    if config0.coincident() {
        return Err(Error::Degenerate("coincident starting points".into()));
    }
    let mut cfg = config0.clone();
    let mut tau = 0.0; // Levenberg shift used when the Hessian solve fails
    for _ in 0..max_iter {
        let (_, grad, hess) = derivatives(&cfg)?;
        let gnorm2 = grad.iter().map(|g| g * g).sum::<f64>();
        if gnorm2.sqrt() <= 1e-12 {
            return certify(&cfg);
        }
        let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
        let dir = loop {
            let mut shifted = hess.clone();
            if tau > 0.0 {
                for (i, row) in shifted.iter_mut().enumerate() {
                    row[i] += tau;
                }
            }
            match lu_solve(&shifted, &rhs) {
                Some(d) => break d,
                None => {
                    tau = if tau == 0.0 { 1e-8 } else { tau * 100.0 };
                    if tau > 1e8 {
                        return Err(Error::NonConvergence {
                            iterations: max_iter,
                            residual: gnorm2.sqrt(),
                        });
                    }
                }
            }
        };
        tau = 0.0;
        let beta_max = max_step_fraction(&cfg, &dir);
        if beta_max <= 1e-12 {
            return Err(Error::DomainExit);
        }
        // Armijo backtracking on |grad|^2
        let mut beta = beta_max;
        let mut accepted = None;
        for _ in 0..50 {
            let mut v = cfg.pack();
            for (vi, di) in v.iter_mut().zip(&dir) {
                *vi += beta * di;
            }
            let trial = cfg.unpack(&v);
            if trial.validate().is_ok() && !trial.coincident() {
                if let Ok(g) = gradient_f(&trial) {
                    let g2 = g.iter().map(|x| x * x).sum::<f64>();
                    if g2 <= (1.0 - 1e-4 * beta) * gnorm2 {
                        accepted = Some(trial);
                        break;
                    }
                }
            }
            beta *= 0.5;
        }
        match accepted {
            Some(next) => cfg = next,
            None => {
                // no descent: report the best point reached
                let cp = certify(&cfg)?;
                if cp.grad_norm <= 1e-10 {
                    return Ok(cp);
                }
                return Err(Error::NonConvergence {
                    iterations: max_iter,
                    residual: cp.grad_norm,
                });
            }
        }
    }
    let cp = certify(&cfg)?;
    if cp.grad_norm <= 1e-10 {
        Ok(cp)
    } else {
        Err(Error::NonConvergence {
            iterations: max_iter,
            residual: cp.grad_norm,
        })
    }
}

/// Single-point scenario in the unit ball: scan the radial derivative in
/// Lambda on a log grid at x = 0, bracket sign changes, polish by Newton.
/// Below the fold threshold in mu the list is empty.
pub fn scenario_ball(n: u32, ell: u32, mu: f64) -> Result<Vec<CriticalPoint>> {
    let nf = Dimension::new(n)?.as_f64();
    let c1 = constant(ConstantKind::C1, n)?;
    let c2 = constant(ConstantKind::C2, n)?;
    let q = 4.0 / (nf - 2.0);
    let li = f64::from(ell);
    // h(0) = 1 in the unit ball
    let phi = |l: f64| 2.0 * l - mu * c1 * q * l.powf(q - 1.0) + c2 * li / l;
    let dphi = |l: f64| 2.0 - mu * c1 * q * (q - 1.0) * l.powf(q - 2.0) - c2 * li / (l * l);
    let grid: Vec<f64> = (0..=600)
        .map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / 600.0))
        .collect();
    let mut roots: Vec<f64> = Vec::new();
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        if phi(a) * phi(b) < 0.0 {
            let mut lo = a;
            let mut hi = b;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if phi(lo) * phi(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let mut l = 0.5 * (lo + hi);
            for _ in 0..40 {
                let step = phi(l) / dphi(l);
                if !step.is_finite() {
                    break;
                }
                l -= step;
                if step.abs() <= 1e-15 * l {
                    break;
                }
            }
            if l.is_finite()
                && l > 0.0
                && phi(l).abs() <= 1e-10 * (1.0 + l)
                && !roots.iter().any(|r| (r - l).abs() <= 1e-9 * l)
            {
                roots.push(l);
            }
        }
    }
    let mut out = Vec::new();
    for l in roots {
        let cfg = ReducedConfiguration {
            geometry: DomainGeometry::UnitBall,
            n,
            lambda: vec![l],
            points: vec![vec![0.0; n as usize]],
            mu,
            ells: vec![ell],
        };
        out.push(certify(&cfg)?);
    }
    out.sort_by(|a, b| a.config.lambda[0].partial_cmp(&b.config.lambda[0]).unwrap());
    Ok(out)
}

/// Fold threshold in mu below which the single-ball scenario loses its
/// critical points. The radial derivative at x = 0 reads
/// phi(L) = 2 L - mu C1 q L^{q-1} + C2 l / L; the fold is where its
/// minimum over L crosses zero, located by bisection in mu with the inner
/// minimum refined by ternary search.
pub fn ball_fold_threshold(n: u32, ell: u32) -> Result<f64> {
    let nf = Dimension::new(n)?.as_f64();
    let c1 = constant(ConstantKind::C1, n)?;
    let c2 = constant(ConstantKind::C2, n)?;
    let q = 4.0 / (nf - 2.0);
    let li = f64::from(ell);
    let min_phi = |mu: f64| -> f64 {
        let phi = |l: f64| 2.0 * l - mu * c1 * q * l.powf(q - 1.0) + c2 * li / l;
        let mut best = f64::INFINITY;
        let mut best_l = 1.0;
        for k in 0..=600 {
            let l = 10f64.powf(-3.0 + 6.0 * k as f64 / 600.0);
            let v = phi(l);
            if v < best {
                best = v;
                best_l = l;
            }
        }
        let mut lo = best_l / 1.05;
        let mut hi = best_l * 1.05;
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if phi(m1) < phi(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        phi(0.5 * (lo + hi))
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut guard = 0;
    while min_phi(hi) > 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return Err(Error::Bracket(
                "no two-root regime found while doubling mu".into(),
            ));
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if min_phi(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Root of (2a)^{1-N} = a (a^2-1)^{1-N} + a (a^2+1)^{1-N} on (1, 100).
pub fn solve_a_star(n: u32) -> Result<f64> {
    let nf = Dimension::new(n)?.as_f64();
    let f = |a: f64| {
        (2.0 * a).powf(1.0 - nf)
            - a * (a * a - 1.0).powf(1.0 - nf)
            - a * (a * a + 1.0).powf(1.0 - nf)
    };
    let mut lo = 1.0 + 1e-9;
    let mut hi = 100.0;
    if !(f(lo) < 0.0 && f(hi) > 0.0) {
        return Err(Error::Bracket("a_star bracket has no sign change".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid {
            break;
        }
    }
    let a = 0.5 * (lo + hi);
    if f(a).abs() > 1e-13 {
        return Err(Error::NonConvergence {
            iterations: 200,
            residual: f(a).abs(),
        });
    }
    Ok(a)
}

/// radial profile of the exterior-pair functional restricted to the axis:
/// P(a) = (a^2-1)^{2-N} + (a^2+1)^{2-N} - (2a)^{2-N} and derivatives.
fn axis_profile(nf: f64, a: f64) -> (f64, f64, f64) {
    let e = 2.0 - nf;
    let u = a * a - 1.0;
    let v = a * a + 1.0;
    let w = 2.0 * a;
    let p = u.powf(e) + v.powf(e) - w.powf(e);
    let dp = e * (2.0 * a * u.powf(e - 1.0) + 2.0 * a * v.powf(e - 1.0) - 2.0 * w.powf(e - 1.0));
    let ddp = e
        * (2.0 * u.powf(e - 1.0)
            + 4.0 * a * a * (e - 1.0) * u.powf(e - 2.0)
            + 2.0 * v.powf(e - 1.0)
            + 4.0 * a * a * (e - 1.0) * v.powf(e - 2.0)
            - 4.0 * (e - 1.0) * w.powf(e - 2.0));
    (p, dp, ddp)
}

/// Antipodal two-point configuration in the exterior of the unit ball at
/// mu = 0, built from a_star, with the certification carried out in the
/// symmetry-reduced variables (Lambda, a). The rotational directions force
/// exact null eigenvalues of the full Hessian, so full-space nondegeneracy
/// is not available here.
pub fn scenario_exterior_pair(n: u32, ell1: u32) -> Result<CriticalPoint> {
    let nf = Dimension::new(n)?.as_f64();
    let c2 = constant(ConstantKind::C2, n)?;
    let a = solve_a_star(n)?;
    let e = 2.0 - nf;
    let denom = 2.0 * ((2.0 * a).powf(e) - (a * a - 1.0).powf(e) - (a * a + 1.0).powf(e));
    if denom <= 0.0 {
        return Err(Error::Construction(format!(
            "radicand denominator {denom} not positive at a_star = {a}"
        )));
    }
    let lam0 = (c2 * f64::from(ell1) / denom).sqrt();
    let mut x1 = vec![0.0; n as usize];
    x1[0] = a;
    let x2: Vec<f64> = x1.iter().map(|v| -v).collect();
    let cfg = ReducedConfiguration {
        geometry: DomainGeometry::ExteriorUnitBall,
        n,
        lambda: vec![lam0, lam0],
        points: vec![x1, x2],
        mu: 0.0,
        ells: vec![ell1, ell1],
    };
    let mut cp = certify(&cfg)?;
    // reduced functional Ft(L, a) = 2 L^2 P(a) + 2 C2 l log L
    let (p, dp, ddp) = axis_profile(nf, a);
    let li = f64::from(ell1);
    let g_l = 4.0 * lam0 * p + 2.0 * c2 * li / lam0;
    let g_a = 2.0 * lam0 * lam0 * dp;
    let h = vec![
        vec![4.0 * p - 2.0 * c2 * li / (lam0 * lam0), 4.0 * lam0 * dp],
        vec![4.0 * lam0 * dp, 2.0 * lam0 * lam0 * ddp],
    ];
    let eig = sym_eigen(&h);
    let radius = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min_abs = eig.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    cp.grad_norm = (g_l * g_l + g_a * g_a).sqrt();
    cp.min_abs_eig = min_abs;
    cp.nondegenerate = min_abs >= 1e-8 * radius;
    cp.symmetry_reduced = true;
    cp.reduced_spectrum = Some(eig.values);
    Ok(cp)
}

/// Value of the thin-annulus expansion of the reduced energy, with a
/// validity flag: the expansion assumes both points lie at distance of
/// order rho from the inner boundary.
#[derive(Debug, Clone, Copy)]
pub struct AnnulusValue {
    pub value: f64,
    pub expansion_warning: bool,
}

pub fn annulus_expanded_f(
    n: u32,
    rho: f64,
    ell1: u32,
    lambda: [f64; 2],
    s: f64,
    t: f64,
) -> Result<AnnulusValue> {
    let nf = Dimension::new(n)?.as_f64();
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::Domain(format!(
            "rho must lie in (0, 0.5), got {rho}"
        )));
    }
    if !(s > rho && s < 1.0 && t > rho && t < 1.0) {
        return Err(Error::Domain(
            "points must lie inside the annulus (rho, 1)".into(),
        ));
    }
    if !(lambda[0] > 0.0 && lambda[1] > 0.0) {
        return Err(Error::Domain("weights must be positive".into()));
    }
    let c2 = constant(ConstantKind::C2, n)?;
    let e = 2.0 - nf;
    let (sg, tu) = (s / rho, t / rho);
    let warning =
        !(1.0 + 1e-6..50.0).contains(&sg) || !(1.0 + 1e-6..50.0).contains(&tu) || rho > 0.2;
    // scaled radial terms: rho^{2-N} Lambda^2 ((s/rho)^2 - 1)^{2-N}
    let value = rho.powf(e)
        * (lambda[0] * lambda[0] * (sg * sg - 1.0).powf(e)
            + lambda[1] * lambda[1] * (tu * tu - 1.0).powf(e))
        - 2.0
            * lambda[0]
            * lambda[1]
            * ((s + t).powf(e) - rho.powf(e) * (1.0 + s * t / (rho * rho)).powf(e))
        + c2 * f64::from(ell1) * (lambda[0] * lambda[1]).ln();
    Ok(AnnulusValue {
        value,
        expansion_warning: warning,
    })
}

/// Critical point of the annulus expansion near the scaled exterior-pair
/// seed, located by Newton in the four symmetric variables.
#[derive(Debug, Clone)]
pub struct AnnulusCritical {
    pub lambda: [f64; 2],
    pub s: f64,
    pub t: f64,
    /// Gradient norm in the well-conditioned scaled variables.
    pub grad_norm: f64,
    pub hessian_spectrum: Vec<f64>,
    pub nondegenerate: bool,
    pub expansion_warning: bool,
}

/// Gradient and Hessian of the scaled 4-variable functional
/// W = l1^2 A(sg) + l2^2 A(tu) - 2 l1 l2 (B - C) + C2 l (log l1 + log l2).
fn scaled_annulus_jet(nf: f64, c2l: f64, v: &[f64; 4]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let e = 2.0 - nf;
    let (l1, l2, sg, tu) = (v[0], v[1], v[2], v[3]);
    let asg = (sg * sg - 1.0).powf(e);
    let atu = (tu * tu - 1.0).powf(e);
    let d_asg = e * 2.0 * sg * (sg * sg - 1.0).powf(e - 1.0);
    let d_atu = e * 2.0 * tu * (tu * tu - 1.0).powf(e - 1.0);
    let dd_asg = e
        * (2.0 * (sg * sg - 1.0).powf(e - 1.0)
            + 4.0 * sg * sg * (e - 1.0) * (sg * sg - 1.0).powf(e - 2.0));
    let dd_atu = e
        * (2.0 * (tu * tu - 1.0).powf(e - 1.0)
            + 4.0 * tu * tu * (e - 1.0) * (tu * tu - 1.0).powf(e - 2.0));
    let b = (sg + tu).powf(e);
    let db = e * (sg + tu).powf(e - 1.0);
    let ddb = e * (e - 1.0) * (sg + tu).powf(e - 2.0);
    let c = (1.0 + sg * tu).powf(e);
    let dc_s = e * tu * (1.0 + sg * tu).powf(e - 1.0);
    let dc_t = e * sg * (1.0 + sg * tu).powf(e - 1.0);
    let ddc_ss = e * (e - 1.0) * tu * tu * (1.0 + sg * tu).powf(e - 2.0);
    let ddc_tt = e * (e - 1.0) * sg * sg * (1.0 + sg * tu).powf(e - 2.0);
    let ddc_st =
        e * ((1.0 + sg * tu).powf(e - 1.0) + tu * (e - 1.0) * sg * (1.0 + sg * tu).powf(e - 2.0));
    let grad = vec![
        2.0 * l1 * asg - 2.0 * l2 * (b - c) + c2l / l1,
        2.0 * l2 * atu - 2.0 * l1 * (b - c) + c2l / l2,
        l1 * l1 * d_asg - 2.0 * l1 * l2 * (db - dc_s),
        l2 * l2 * d_atu - 2.0 * l1 * l2 * (db - dc_t),
    ];
    let hess = vec![
        vec![
            2.0 * asg - c2l / (l1 * l1),
            -2.0 * (b - c),
            2.0 * l1 * d_asg - 2.0 * l2 * (db - dc_s),
            -2.0 * l2 * (db - dc_t),
        ],
        vec![
            -2.0 * (b - c),
            2.0 * atu - c2l / (l2 * l2),
            -2.0 * l1 * (db - dc_s),
            2.0 * l2 * d_atu - 2.0 * l1 * (db - dc_t),
        ],
        vec![
            2.0 * l1 * d_asg - 2.0 * l2 * (db - dc_s),
            -2.0 * l1 * (db - dc_s),
            l1 * l1 * dd_asg - 2.0 * l1 * l2 * (ddb - ddc_ss),
            -2.0 * l1 * l2 * (ddb - ddc_st),
        ],
        vec![
            -2.0 * l2 * (db - dc_t),
            2.0 * l2 * d_atu - 2.0 * l1 * (db - dc_t),
            -2.0 * l1 * l2 * (ddb - ddc_st),
            l2 * l2 * dd_atu - 2.0 * l1 * l2 * (ddb - ddc_tt),
        ],
    ];
    (grad, hess)
}

pub fn annulus_critical(n: u32, rho: f64, ell1: u32) -> Result<AnnulusCritical> {
    let nf = Dimension::new(n)?.as_f64();
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::Domain(format!(
            "rho must lie in (0, 0.5), got {rho}"
        )));
    }
    let c2l = constant(ConstantKind::C2, n)? * f64::from(ell1);
    let a = solve_a_star(n)?;
    let e = 2.0 - nf;
    let denom = 2.0 * ((2.0 * a).powf(e) - (a * a - 1.0).powf(e) - (a * a + 1.0).powf(e));
    let lam0 = (c2l / denom).sqrt();
    let mut v = [lam0, lam0, a, a];
    for _ in 0..60 {
        let (g, h) = scaled_annulus_jet(nf, c2l, &v);
        if norm2(&g) <= 1e-12 * (1.0 + lam0) {
            break;
        }
        let rhs: Vec<f64> = g.iter().map(|x| -x).collect();
        let d = lu_solve(&h, &rhs)
            .ok_or_else(|| Error::Degenerate("singular scaled Hessian".into()))?;
        let mut step = 1.0f64;
        // keep sigma, tau above 1 and weights positive
        for k in 0..4 {
            let floor = if k < 2 {
                0.1 * v[k]
            } else {
                0.5 * (v[k] - 1.0)
            };
            if d[k] < 0.0 {
                step = step.min(-floor / d[k]).min(1.0);
            }
        }
        for k in 0..4 {
            v[k] += step * d[k];
        }
    }
    let (g, h) = scaled_annulus_jet(nf, c2l, &v);
    let grad_norm = norm2(&g);
    if grad_norm > 1e-9 * (1.0 + lam0) {
        return Err(Error::NonConvergence {
            iterations: 60,
            residual: grad_norm,
        });
    }
    let eig = sym_eigen(&h);
    let radius = eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let min_abs = eig.values.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    let scale = rho.powf((nf - 2.0) / 2.0);
    let s = rho * v[2];
    let t = rho * v[3];
    if !(s < 1.0 && t < 1.0) {
        return Err(Error::Domain(format!(
            "critical radii {s}, {t} leave the annulus"
        )));
    }
    Ok(AnnulusCritical {
        lambda: [scale * v[0], scale * v[1]],
        s,
        t,
        grad_norm,
        hessian_spectrum: eig.values,
        nondegenerate: min_abs >= 1e-8 * radius,
        expansion_warning: rho > 0.2,
    })
}

/// The mu = 0 scaling map (Lambda, l) -> (sqrt(k) Lambda, k l).
pub fn scale_configuration(config: &ReducedConfiguration, k: u32) -> ReducedConfiguration {
    let mut out = config.clone();
    let s = f64::from(k).sqrt();
    for l in &mut out.lambda {
        *l *= s;
    }
    for e in &mut out.ells {
        *e *= k;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn ball_config() -> ReducedConfiguration {
        ReducedConfiguration {
            geometry: DomainGeometry::UnitBall,
            n: 6,
            lambda: vec![1.0],
            points: vec![vec![0.0; 6]],
            mu: 0.0,
            ells: vec![1],
        }
    }

    #[test]
    fn center_value_is_one() {
        // H(0,0) = 1, log 1 = 0, mu = 0
        let v = evaluate_f(&ball_config()).unwrap().finite().unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn coincident_points_yield_sentinel() {
        let mut cfg = ball_config();
        cfg.lambda = vec![1.0, 1.0];
        cfg.points = vec![vec![0.0; 6], vec![0.0; 6]];
        cfg.ells = vec![1, 1];
        assert_eq!(evaluate_f(&cfg).unwrap(), EnergyValue::NegInfinity);
        assert!(matches!(gradient_f(&cfg), Err(Error::Degenerate(_))));
        assert!(matches!(find_critical(&cfg, 10), Err(Error::Degenerate(_))));
    }

    #[test]
    fn ball_mu_zero_has_positive_radial_derivative() {
        // dF/dLambda = 2 Lambda + C2 l / Lambda > 0 for all Lambda > 0
        let c2 = constant(ConstantKind::C2, 6).unwrap();
        for l in [0.01, 0.5, 3.0, 50.0] {
            let mut cfg = ball_config();
            cfg.lambda = vec![l];
            let g = gradient_f(&cfg).unwrap();
            assert_relative_eq!(g[0], 2.0 * l + c2 / l, max_relative = 1e-12);
            assert!(g[0] > 0.0);
        }
        assert!(scenario_ball(6, 1, 0.0).unwrap().is_empty());
    }

    #[test]
    fn application_one_two_roots() {
        let mu_star = ball_fold_threshold(6, 1).unwrap();
        // analytic fold for N = 6: the mu term is linear in Lambda, so the
        // stationarity condition is 2 L^2 - mu C1 L + C2 l = 0 and the fold
        // sits at mu = sqrt(8 C2) / C1
        let c1 = constant(ConstantKind::C1, 6).unwrap();
        let c2 = constant(ConstantKind::C2, 6).unwrap();
        assert_relative_eq!(mu_star, (8.0 * c2).sqrt() / c1, max_relative = 1e-6);
        let pts = scenario_ball(6, 1, 2.0 * mu_star).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts[0].config.lambda[0] < pts[1].config.lambda[0]);
        for p in &pts {
            assert!(p.nondegenerate, "spectrum {:?}", p.hessian_spectrum);
            assert!(p.grad_norm <= 1e-10);
        }
        assert!(scenario_ball(6, 1, 0.5 * mu_star).unwrap().is_empty());
    }

    #[test]
    fn newton_converges_from_scaled_start() {
        let mu = 2.0 * ball_fold_threshold(6, 1).unwrap();
        let pts = scenario_ball(6, 1, mu).unwrap();
        let mut start = pts[1].config.clone();
        start.lambda[0] *= 2.0;
        let cp = find_critical(&start, 60).unwrap();
        let targets: Vec<f64> = pts.iter().map(|p| p.config.lambda[0]).collect();
        assert!(
            targets
                .iter()
                .any(|t| (cp.config.lambda[0] - t).abs() <= 1e-8 * t),
            "landed at {} targets {:?}",
            cp.config.lambda[0],
            targets
        );
        // idempotence: restarting from the certified point barely moves
        let cp2 = find_critical(&cp.config, 60).unwrap();
        assert!((cp2.config.lambda[0] - cp.config.lambda[0]).abs() <= 1e-10);
    }

    #[test]
    fn value_matches_single_ball_display() {
        // F = Lambda^2/(1-|x|^2)^{N-2} - mu C1 Lambda^{4/(N-2)} + C2 l log Lambda
        let c1 = constant(ConstantKind::C1, 6).unwrap();
        let c2 = constant(ConstantKind::C2, 6).unwrap();
        let mut x = vec![0.0; 6];
        x[0] = 0.4;
        x[2] = -0.2;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        for (lam, mu, ell) in [(0.7, 2.5, 1u32), (3.0, -1.0, 3)] {
            let cfg = ReducedConfiguration {
                geometry: DomainGeometry::UnitBall,
                n: 6,
                lambda: vec![lam],
                points: vec![x.clone()],
                mu,
                ells: vec![ell],
            };
            let want = lam * lam / (1.0 - r2).powi(4) - mu * c1 * lam.powf(1.0)
                + c2 * f64::from(ell) * lam.ln();
            let got = evaluate_f(&cfg).unwrap().finite().unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-13);
        }
    }

    #[test]
    fn value_matches_exterior_pair_display() {
        // term-by-term form of the two-point functional outside the ball
        let c2 = constant(ConstantKind::C2, 6).unwrap();
        let (l1, l2) = (1.3, 0.8);
        let mut x1 = vec![0.0; 6];
        x1[0] = 1.7;
        x1[1] = 0.4;
        let mut x2 = vec![0.0; 6];
        x2[0] = -2.1;
        x2[3] = 0.9;
        let r1: f64 = x1.iter().map(|v| v * v).sum();
        let r2: f64 = x2.iter().map(|v| v * v).sum();
        let dist: f64 = x1
            .iter()
            .zip(&x2)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let inner: f64 = x1.iter().zip(&x2).map(|(a, b)| a * b).sum();
        let cfg = ReducedConfiguration {
            geometry: DomainGeometry::ExteriorUnitBall,
            n: 6,
            lambda: vec![l1, l2],
            points: vec![x1, x2],
            mu: 0.0,
            ells: vec![2, 2],
        };
        let want =
            l1 * l1 / (1.0 - r1).powi(4) + l2 * l2 / (1.0 - r2).powi(4) + c2 * 2.0 * (l1 * l2).ln()
                - 2.0 * l1 * l2 * (dist.powi(-4) - (1.0 + r1 * r2 - 2.0 * inner).powi(-2));
        let got = evaluate_f(&cfg).unwrap().finite().unwrap();
        assert_relative_eq!(got, want, max_relative = 1e-13);
    }

    #[test]
    fn newton_is_a_fixed_point_at_the_exterior_pair() {
        let cp = scenario_exterior_pair(6, 1).unwrap();
        let refined = find_critical(&cp.config, 3).unwrap();
        assert!(refined.grad_norm <= 1e-12, "grad {}", refined.grad_norm);
    }

    #[test]
    fn exterior_pair_certificate() {
        let a = solve_a_star(6).unwrap();
        assert!(a > 1.0 && a < 10.0);
        let cp = scenario_exterior_pair(6, 1).unwrap();
        assert!(cp.grad_norm <= 1e-8, "reduced gradient {}", cp.grad_norm);
        assert!(cp.symmetry_reduced);
        assert!(cp.nondegenerate);
        assert!(cp.config.lambda[0] > 0.0);
        assert_abs_diff_eq!(cp.config.lambda[0], cp.config.lambda[1], epsilon = 1e-12);
        // the full gradient also vanishes (rotational directions are flat)
        let g = gradient_f(&cp.config).unwrap();
        assert!(norm2(&g) <= 1e-8, "full gradient {}", norm2(&g));
    }

    #[test]
    fn scaling_law_moves_critical_points() {
        let cp = scenario_exterior_pair(6, 1).unwrap();
        for k in [2u32, 3] {
            let mapped = scale_configuration(&cp.config, k);
            let g = gradient_f(&mapped).unwrap();
            assert!(
                norm2(&g) <= 1e-10 * f64::from(k),
                "k={k} grad {}",
                norm2(&g)
            );
        }
    }

    #[test]
    fn annulus_critical_scales_like_a_star() {
        let a = solve_a_star(6).unwrap();
        let mut prev_err = f64::INFINITY;
        for rho in [1e-1, 1e-2, 1e-3] {
            let cr = annulus_critical(6, rho, 1).unwrap();
            assert!(cr.nondegenerate);
            let err = (cr.s / rho - a).abs() / a;
            assert!(err <= prev_err + 1e-12, "s/rho drifting away from a_star");
            prev_err = err;
            assert!(err < 1e-6, "s/rho = {} vs a_star = {}", cr.s / rho, a);
        }
    }

    #[test]
    fn annulus_value_matches_scaled_exterior_form() {
        // at the seed the expansion equals the scaled exterior functional
        // up to the additive C2 l (N-2) log rho shift
        let rho = 1e-2f64;
        let a = solve_a_star(6).unwrap();
        let cp = scenario_exterior_pair(6, 1).unwrap();
        let lam0 = cp.config.lambda[0];
        let scale = rho.powf(2.0);
        let val =
            annulus_expanded_f(6, rho, 1, [scale * lam0, scale * lam0], rho * a, rho * a).unwrap();
        assert!(!val.expansion_warning);
        let c2 = constant(ConstantKind::C2, 6).unwrap();
        let unscaled = evaluate_f(&cp.config).unwrap().finite().unwrap();
        // log(Lambda_1 Lambda_2) picks up (N-2) log rho over the two weights
        let shift = c2 * 4.0 * rho.ln();
        assert_relative_eq!(val.value, unscaled + shift, max_relative = 1e-10);
    }

    #[test]
    fn annulus_warning_flags_out_of_regime_points() {
        let v = annulus_expanded_f(6, 1e-2, 1, [1.0, 1.0], 0.9, 0.9).unwrap();
        assert!(v.expansion_warning);
        assert!(annulus_expanded_f(6, 1e-2, 1, [1.0, 1.0], 0.5e-2, 0.1).is_err());
    }
}
