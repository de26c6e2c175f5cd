//! Piecewise construction of l-tower radial profiles on the unit ball:
//! the reduced equation with the e^{-2t} linear term is solved segment by
//! segment between translates of the heteroclinic minima, Cauchy data are
//! matched at the interfaces by a 2x2 Newton per interface, and the result
//! is cross-validated against a direct amplitude-shooting oracle.

use crate::constants::{constant, ConstantKind};
use crate::error::{Error, Result};
use crate::ode::{integrate_system, DenseSolution, StepControl, System2};
use crate::params::{derive_params, lambda_from_mu, ExponentParams};
use crate::phase::{shoot_heteroclinic, HeteroclinicProfile, PhaseOde, Trajectory};

#[derive(Debug, Clone, Copy)]
pub struct MatchConfig {
    pub n: u32,
    pub eps: f64,
    /// Linear-term strength through lambda = mu eps^{(N-4)/(N-2)}.
    pub mu: f64,
    /// Tower height.
    pub ell: usize,
    /// Translation parameter: the innermost minimum sits at t = xi.
    pub xi: f64,
}

impl MatchConfig {
    pub fn validate(&self) -> Result<ExponentParams> {
        if !(self.eps > 0.0 && self.eps <= 0.1) {
            return Err(Error::Domain(format!(
                "eps must lie in (0, 0.1], got {}",
                self.eps
            )));
        }
        if self.ell == 0 {
            return Err(Error::Domain("tower height must be >= 1".into()));
        }
        let params = derive_params(self.n, self.eps)?;
        if !params.spiral_ok {
            return Err(Error::SpiralCondition {
                a_p: params.a_p,
                b_p: params.b_p,
                p: params.p,
            });
        }
        Ok(params)
    }

    pub fn lambda(&self) -> Result<f64> {
        lambda_from_mu(self.n, self.eps, self.mu)
    }
}

/// Interface grid T_0 = 0 < T_1 < ... < T_{2l-1}: translates of the
/// heteroclinic extrema shifted so the l-th minimum lands at xi.
pub fn build_grid(profile: &HeteroclinicProfile, ell: usize, xi: f64) -> Result<Vec<f64>> {
    let c = &profile.critical;
    if c.t_min.len() < ell || c.t_max.len() < ell {
        return Err(Error::ExtremaCount {
            requested: ell,
            found: c.t_min.len().min(c.t_max.len()),
        });
    }
    let base = c.t_min[ell - 1];
    let mut grid = vec![0.0; 2 * ell];
    for i in 1..ell {
        grid[2 * i] = c.t_min[ell - i - 1] - base + xi;
        grid[2 * i - 1] = c.t_max[ell - i] - base + xi;
    }
    grid[2 * ell - 1] = c.t_max[0] - base + xi;
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Domain(format!(
                "grid not strictly increasing: {grid:?} (xi = {xi} too negative?)"
            )));
        }
    }
    Ok(grid)
}

fn control(params: &ExponentParams) -> StepControl {
    StepControl {
        amplitude_guard: 10.0 * params.d_p,
        ..StepControl::default()
    }
}

/// Flow of the autonomous reduced equation from (value, 0) for `time`;
/// this is the chart (alpha, t) -> Cauchy data used by the matching.
fn flow_from_minimum(params: &ExponentParams, value: f64, time: f64) -> Result<[f64; 2]> {
    if time == 0.0 {
        return Ok([value, 0.0]);
    }
    let sys = PhaseOde {
        params: *params,
        lambda: 0.0,
    };
    let sol = integrate_system(&sys, 0.0, [value, 0.0], time, &control(params))?;
    Ok(sol.eval(time))
}

/// Truncation depth of the outermost segment.
fn outer_horizon(eps: f64) -> f64 {
    40f64.max(4.0 * (1.0 / eps).ln())
}

/// Heteroclinic time coordinate of the grid time t: tau = t - xi + t_min_l.
fn het_time(profile: &HeteroclinicProfile, ell: usize, xi: f64, t: f64) -> f64 {
    t - xi + profile.critical.t_min[ell - 1]
}

/// Decaying-tail seed of the normalized heteroclinic at time tau.
fn tail_seed(params: &ExponentParams, tau: f64) -> [f64; 2] {
    let (gm, gp, p) = (params.gamma_minus, params.gamma_plus, params.p);
    let c_corr = -1.0 / ((p * gm - gp) * (p - 1.0) * gm);
    [
        (gm * tau).exp() * (1.0 + c_corr * ((p - 1.0) * gm * tau).exp()),
        gm * (gm * tau).exp() + c_corr * p * gm * (p * gm * tau).exp(),
    ]
}

/// Solve the full equation (with the e^{-2t} term) on segment `i`.
///
/// For i <= l-2 the Cauchy data at the right node T_{2i+2} are the
/// autonomous flow of (eps_{p, l-1-i} + alpha, 0) for time `shift`, and the
/// segment is integrated backward to T_{2i}. The outermost segment i = l-1
/// carries no parameters: it is seeded on the heteroclinic tail at the
/// truncation horizon and integrated backward to T_{2l-2}, which keeps the
/// integration on the stable side.
pub fn solve_segment(
    config: &MatchConfig,
    profile: &HeteroclinicProfile,
    i: usize,
    alpha: f64,
    shift: f64,
) -> Result<Trajectory> {
    let params = config.validate()?;
    let lambda = config.lambda()?;
    let grid = build_grid(profile, config.ell, config.xi)?;
    segment_on_grid(config, profile, &params, lambda, &grid, i, alpha, shift)
}

#[allow(clippy::too_many_arguments)]
fn segment_on_grid(
    config: &MatchConfig,
    profile: &HeteroclinicProfile,
    params: &ExponentParams,
    lambda: f64,
    grid: &[f64],
    i: usize,
    alpha: f64,
    shift: f64,
) -> Result<Trajectory> {
    let ell = config.ell;
    if i >= ell {
        return Err(Error::Domain(format!(
            "segment index {i} out of range for ell = {ell}"
        )));
    }
    let sys = PhaseOde {
        params: *params,
        lambda,
    };
    let ctrl = control(params);
    let dense: DenseSolution = if i == ell - 1 {
        let t_left = grid[2 * ell - 2];
        let t_h = t_left + outer_horizon(config.eps);
        let tau_h = het_time(profile, ell, config.xi, t_h);
        let seed = tail_seed(params, tau_h);
        integrate_system(&sys, t_h, seed, t_left, &ctrl)?
    } else {
        let eps_val = profile.critical.epsv[ell - 2 - i];
        let data = flow_from_minimum(params, eps_val + alpha, shift)?;
        integrate_system(&sys, grid[2 * i + 2], data, grid[2 * i], &ctrl)?
    };
    Ok(Trajectory {
        params: *params,
        lambda_term: lambda,
        dense,
    })
}

/// The assembled piecewise solution.
#[derive(Debug, Clone)]
pub struct PiecewiseSolution {
    pub config: MatchConfig,
    pub params: ExponentParams,
    pub lambda: f64,
    pub grid: Vec<f64>,
    /// Segment i covers [T_{2i}, T_{2i+2}] (the last one up to the horizon).
    pub segments: Vec<Trajectory>,
    pub alphas: Vec<f64>,
    pub shifts: Vec<f64>,
    /// Max Cauchy-data jump over the interfaces.
    pub mismatch: f64,
    /// Set when |lambda e^{-2t}| exceeded b_p/2 somewhere on the domain.
    pub lambda_warning: bool,
    /// The heteroclinic minima values used as segment data.
    pub eps_values: Vec<f64>,
}

impl PiecewiseSolution {
    pub fn horizon(&self) -> f64 {
        self.segments.last().map(|s| s.t_max()).unwrap_or(0.0)
    }

    /// Evaluate the matched solution (v, dv) at t in [0, horizon].
    pub fn eval_v(&self, t: f64) -> Result<[f64; 2]> {
        for seg in &self.segments {
            if t <= seg.t_max() + 1e-12 && t >= seg.t_min() - 1e-12 {
                return Ok(seg.eval(t.clamp(seg.t_min(), seg.t_max())));
            }
        }
        Err(Error::Domain(format!("t = {t} outside the matched domain")))
    }
}

/// Match all interfaces, outermost first: per interface a 2x2 Newton with
/// forward-difference Jacobian (step 1e-8) determines (alpha_i, t_i) so the
/// segment-i Cauchy data at T_{2i+2} equal the already-built segment i+1 there.
pub fn match_all(config: &MatchConfig) -> Result<PiecewiseSolution> {
    let params = config.validate()?;
    let lambda = config.lambda()?;
    let ell = config.ell;
    let profile = shoot_heteroclinic(&params, ell)?;
    let grid = build_grid(&profile, ell, config.xi)?;
    let gamma = (1.0 + params.p / 2.0) / 2.0;
    let alpha_cap = config.eps.powf(gamma / 2.0);
    let shift_cap = config.eps.powf((gamma - 1.0) / 2.0);

    let mut segments: Vec<Option<Trajectory>> = vec![None; ell];
    segments[ell - 1] = Some(segment_on_grid(
        config,
        &profile,
        &params,
        lambda,
        &grid,
        ell - 1,
        0.0,
        0.0,
    )?);
    let mut alphas = vec![0.0; ell.saturating_sub(1)];
    let mut shifts = vec![0.0; ell.saturating_sub(1)];
    let mut mismatch: f64 = 0.0;

    for i in (0..ell.saturating_sub(1)).rev() {
        let t_node = grid[2 * i + 2];
        let target = segments[i + 1].as_ref().unwrap().eval(t_node);
        let eps_val = profile.critical.epsv[ell - 2 - i];
        let scale = target[0].abs().max(1.0e-3);
        let residual = |a: f64, s: f64| -> Result<[f64; 2]> {
            let d = flow_from_minimum(&params, eps_val + a, s)?;
            Ok([d[0] - target[0], d[1] - target[1]])
        };
        let mut a = 0.0f64;
        let mut s = 0.0f64;
        let mut r = residual(a, s)?;
        let mut converged = false;
        for _ in 0..20 {
            let rn = (r[0] * r[0] + r[1] * r[1]).sqrt();
            if rn <= 1e-12 * scale {
                converged = true;
                break;
            }
            let h = 1e-8;
            let ra = residual(a + h, s)?;
            let rs = residual(a, s + h)?;
            let j = [
                [(ra[0] - r[0]) / h, (rs[0] - r[0]) / h],
                [(ra[1] - r[1]) / h, (rs[1] - r[1]) / h],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.abs() < 1e-300 {
                break;
            }
            let da = (-r[0] * j[1][1] + r[1] * j[0][1]) / det;
            let ds = (-j[0][0] * r[1] + j[1][0] * r[0]) / det;
            let mut step = 1.0;
            // keep the flowed amplitude positive
            if da < 0.0 && eps_val + a + da <= 0.1 * eps_val {
                step = (0.9 * eps_val + a.min(0.0)) / (-da);
            }
            a += step * da;
            s += step * ds;
            r = residual(a, s)?;
        }
        let rn = (r[0] * r[0] + r[1] * r[1]).sqrt();
        if !converged && rn > 1e-10 * scale {
            return Err(Error::MatchingFailure {
                interface: i,
                residual: rn,
            });
        }
        if a.abs() > alpha_cap || s.abs() > shift_cap {
            return Err(Error::TrustRegion {
                interface: i,
                detail: format!(
                    "alpha = {a:.3e} (cap {alpha_cap:.3e}), t = {s:.3e} (cap {shift_cap:.3e})"
                ),
            });
        }
        alphas[i] = a;
        shifts[i] = s;
        mismatch = mismatch.max(rn);
        segments[i] = Some(segment_on_grid(
            config, &profile, &params, lambda, &grid, i, a, s,
        )?);
    }

    let segments: Vec<Trajectory> = segments.into_iter().map(|s| s.unwrap()).collect();
    // recompute the mismatch from the actual integrated segments
    for i in 0..ell.saturating_sub(1) {
        let t_node = grid[2 * i + 2];
        let a = segments[i].eval(t_node);
        let b = segments[i + 1].eval(t_node);
        mismatch = mismatch.max((a[0] - b[0]).abs().max((a[1] - b[1]).abs()));
    }
    // positivity of the inner segments
    for (i, seg) in segments.iter().enumerate().skip(1) {
        for (_, y) in seg.dense.nodes() {
            if y[0] <= 0.0 {
                return Err(Error::Construction(format!("segment {i} lost positivity")));
            }
        }
    }
    let lambda_warning = lambda.abs() > params.b_p / 2.0;
    let eps_values = profile.critical.epsv[..ell].to_vec();
    Ok(PiecewiseSolution {
        config: *config,
        params,
        lambda,
        grid,
        segments,
        alphas,
        shifts,
        mismatch,
        lambda_warning,
        eps_values,
    })
}

/// A sampled radial profile u(r) on (0, 1].
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub r_samples: Vec<f64>,
    pub u: Vec<f64>,
    pub lambda: f64,
    pub p: f64,
}

impl RadialProfile {
    /// Emden-Fowler variable w(r) = r^{2/(p-1)} u(r) at sample k.
    pub fn w(&self, k: usize) -> f64 {
        self.r_samples[k].powf(2.0 / (self.p - 1.0)) * self.u[k]
    }
}

/// Map the matched solution to the radial profile u(r) = r^{-2/(p-1)} v(-log r).
pub fn assemble_u(solution: &PiecewiseSolution, r_grid: &[f64]) -> Result<RadialProfile> {
    if r_grid.is_empty() {
        return Err(Error::Domain("empty radial grid".into()));
    }
    for w in r_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Domain(
                "radial grid must be strictly increasing".into(),
            ));
        }
    }
    if !(r_grid[0] > 0.0 && *r_grid.last().unwrap() <= 1.0) {
        return Err(Error::Domain("radial grid must lie in (0, 1]".into()));
    }
    let horizon = solution.horizon();
    if -r_grid[0].ln() > horizon {
        return Err(Error::Resolution(format!(
            "grid reaches r = {} below the resolved core r = {}",
            r_grid[0],
            (-horizon).exp()
        )));
    }
    let p = solution.params.p;
    let q = 2.0 / (p - 1.0);
    let mut u = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let t = -r.ln();
        let v = solution.eval_v(t)?[0];
        u.push(r.powf(-q) * v);
    }
    Ok(RadialProfile {
        r_samples: r_grid.to_vec(),
        u,
        lambda: solution.lambda,
        p,
    })
}

/// Radial equation u'' + (N-1)/r u' + lambda u + |u|^{p-1} u = 0 in r.
struct RadialOde {
    nf: f64,
    p: f64,
    lambda: f64,
}

impl System2 for RadialOde {
    fn rhs(&self, r: f64, y: [f64; 2]) -> [f64; 2] {
        [
            y[1],
            -(self.nf - 1.0) / r * y[1] - self.lambda * y[0] - y[0].abs().powf(self.p - 1.0) * y[0],
        ]
    }

    fn rhs_dot(&self, r: f64, y: [f64; 2], f: [f64; 2]) -> [f64; 2] {
        let a = (self.nf - 1.0) / r;
        [
            f[1],
            a / r * y[1]
                - a * f[1]
                - self.lambda * f[0]
                - self.p * y[0].abs().powf(self.p - 1.0) * f[0],
        ]
    }
}

/// Location (in r) of the `want`-th minimum of w = r^{2/(p-1)} u along the
/// outward integration, or None when u crosses zero first.
fn minima_of_w(
    sys: &RadialOde,
    q: f64,
    r0: f64,
    y0: [f64; 2],
    want: usize,
    r_ceiling: f64,
) -> Result<Option<Vec<f64>>> {
    let ctrl = StepControl {
        h_max: f64::INFINITY,
        ..StepControl::default()
    };
    let mut r = r0;
    let mut y = y0;
    let mut minima = Vec::new();
    let phi = |r: f64, y: [f64; 2]| q * y[0] + r * y[1];
    while r < r_ceiling && minima.len() < want {
        let r_next = (r * 3.0).min(r_ceiling);
        let sol = integrate_system(sys, r, y, r_next, &ctrl)?;
        let nodes = sol.nodes();
        for w in nodes.windows(2) {
            let (ra, ya) = w[0];
            let (rb, yb) = w[1];
            if ya[0] <= 0.0 {
                return Ok(None);
            }
            let pa = phi(ra, ya);
            let pb = phi(rb, yb);
            if pa * pb < 0.0 {
                let mut lo = ra;
                let mut hi = rb;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let ym = sol.eval(mid);
                    let pm = phi(mid, ym);
                    if pm.abs() <= 1e-13 * (1.0 + ym[0].abs()) || (hi - lo) < 1e-15 * mid {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if phi(lo, sol.eval(lo)) * pm <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let rc = 0.5 * (lo + hi);
                let yc = sol.eval(rc);
                // classify through the derivative of phi
                let f = sys.rhs(rc, yc);
                let dphi = (q + 1.0) * yc[1] + rc * f[1];
                if dphi > 0.0 {
                    minima.push(rc);
                    if minima.len() >= want {
                        break;
                    }
                }
            }
        }
        r = r_next;
        y = sol.eval(r_next);
        if y[0] <= 0.0 {
            return Ok(None);
        }
    }
    if minima.len() >= want {
        Ok(Some(minima))
    } else {
        Ok(None)
    }
}

/// Independent verification oracle: integrate the radial equation outward
/// from a series start at r0 = 1e-6 and isolate the branch whose l-th
/// minimum of the Emden-Fowler variable sits at r = 1. At lambda = 0 the
/// scaling symmetry u_s(r) = s^{2/(p-1)} u(s r) places the minimum exactly;
/// for lambda > 0 the amplitude is found by bisection.
pub fn shooting_oracle(n: u32, p: f64, lambda: f64, ell: usize) -> Result<RadialProfile> {
    let nf = crate::params::Dimension::new(n)?.as_f64();
    let p_crit = (nf + 2.0) / (nf - 2.0);
    if !(p > p_crit) {
        return Err(Error::Domain(format!(
            "exponent p = {p} must exceed {p_crit}"
        )));
    }
    if !(lambda >= 0.0) {
        return Err(Error::Domain("lambda must be nonnegative".into()));
    }
    if ell == 0 {
        return Err(Error::Domain("ell must be >= 1".into()));
    }
    let q = 2.0 / (p - 1.0);
    let sys = RadialOde { nf, p, lambda };
    let r0 = 1e-6;
    let start = |a: f64| -> [f64; 2] {
        let c = (a.powf(p) + lambda * a) / (2.0 * nf);
        [a - c * r0 * r0, -2.0 * c * r0]
    };
    // bump spacing in r grows like eps^{-2/(N-2)} per half-bump
    let eps_est = p - p_crit;
    let ceiling_for = |a: f64| -> f64 {
        let unit = a.powf(-(p - 1.0) / 2.0);
        let per_bump = (1.0 / eps_est).powf(2.0 / (nf - 2.0)).max(4.0);
        1e4 * unit * per_bump.powi(ell as i32 + 1)
    };

    let scale_profile = |s: f64, a: f64| -> Result<RadialProfile> {
        // resample u_s(r) = s^q u(s r) on a geometric grid of (0, 1]
        let sysr = RadialOde { nf, p, lambda };
        let ctrl = StepControl {
            h_max: f64::INFINITY,
            ..StepControl::default()
        };
        let sol = integrate_system(&sysr, r0, start(a), s * 1.0000001, &ctrl)?;
        let r_lo = (r0 / s * 1.000001).max(1e-9);
        let count = 2048;
        let mut r_samples = Vec::with_capacity(count);
        let mut u = Vec::with_capacity(count);
        for k in 0..count {
            let r = r_lo * (1.0 / r_lo).powf(k as f64 / (count - 1) as f64);
            let val = sol.eval((s * r).clamp(r0, sol.t_max()))[0];
            r_samples.push(r);
            u.push(s.powf(q) * val);
        }
        Ok(RadialProfile {
            r_samples,
            u,
            lambda,
            p,
        })
    };

    if lambda == 0.0 {
        let a = 1.0;
        let minima = minima_of_w(&sys, q, r0, start(a), ell, ceiling_for(a))?.ok_or_else(|| {
            Error::Bracket("branch lost positivity before the l-th minimum".into())
        })?;
        let s = minima[ell - 1];
        return scale_profile(s, a);
    }

    // lambda > 0: bisection in the amplitude on the boundary map log r*_l(A)
    let boundary = |a: f64| -> Result<Option<f64>> {
        Ok(minima_of_w(&sys, q, r0, start(a), ell, ceiling_for(a))?.map(|m| m[ell - 1].ln()))
    };
    let grid: Vec<f64> = (0..=56)
        .map(|k| 10f64.powf(-2.0 + 14.0 * k as f64 / 56.0))
        .collect();
    let mut bracket: Option<(f64, f64)> = None;
    let mut prev: Option<(f64, f64)> = None;
    for &a in &grid {
        if let Some(g) = boundary(a)? {
            if let Some((pa, pg)) = prev {
                if pg * g <= 0.0 {
                    bracket = Some((pa, a));
                    break;
                }
            }
            prev = Some((a, g));
        }
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        Error::Bracket("no sign change of the boundary map over the amplitude scan".into())
    })?;
    for _ in 0..80 {
        let mid = (lo * hi).sqrt();
        match boundary(mid)? {
            Some(g) => {
                let glo = boundary(lo)?.unwrap_or(1.0);
                if glo * g <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            None => {
                hi = mid;
            }
        }
        if (hi / lo - 1.0).abs() < 1e-13 {
            break;
        }
    }
    let a = (lo * hi).sqrt();
    let minima = minima_of_w(&sys, q, r0, start(a), ell, ceiling_for(a))?
        .ok_or_else(|| Error::Bracket("bisected branch lost positivity".into()))?;
    scale_profile(minima[ell - 1], a)
}

/// Two-coefficient boundary fit of the matched profile on the annulus
/// (r_eps/2, 2 r_eps): u ~ c0 + c1 r^{2-N}, weighted relatively so both
/// coefficients are identified despite the r^{2-N} dynamic range. `c0` has
/// the linear-term correction removed; `c0_raw` keeps it.
#[derive(Debug, Clone, Copy)]
pub struct ExpansionFit {
    pub c0: f64,
    pub c1: f64,
    pub residual: f64,
    pub c0_raw: f64,
}

pub fn expansion_check(profile: &RadialProfile, config: &MatchConfig) -> Result<ExpansionFit> {
    let nf = f64::from(config.n);
    let r_eps = config.eps.powf(2.0 / (nf * nf - 4.0));
    let lo = r_eps / 2.0;
    let hi = (2.0 * r_eps).min(0.999);
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for (r, u) in profile.r_samples.iter().zip(&profile.u) {
        if *r >= lo && *r <= hi {
            rows.push((*r, *u));
        }
    }
    if rows.len() < 16 {
        return Err(Error::Resolution(format!(
            "only {} samples on the annulus ({lo:.4}, {hi:.4})",
            rows.len()
        )));
    }
    // weighted normal equations, weights 1/u
    let mut m = [[0.0f64; 2]; 2];
    let mut b = [0.0f64; 2];
    for &(r, u) in &rows {
        let w = 1.0 / u.abs().max(1e-300);
        let phi = [w, w * r.powf(2.0 - nf)];
        let rhs = w * u;
        for a in 0..2 {
            for c in 0..2 {
                m[a][c] += phi[a] * phi[c];
            }
            b[a] += phi[a] * rhs;
        }
    }
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < 1e-300 {
        return Err(Error::Degenerate("singular boundary fit".into()));
    }
    let c0_raw = (b[0] * m[1][1] - b[1] * m[0][1]) / det;
    let c1 = (m[0][0] * b[1] - m[1][0] * b[0]) / det;
    let mut ss = 0.0;
    for &(r, u) in &rows {
        let model = c0_raw + c1 * r.powf(2.0 - nf);
        ss += ((u - model) / u).powi(2);
    }
    let residual = (ss / rows.len() as f64).sqrt();
    // linear-term correction of the constant coefficient
    let c4 = constant(ConstantKind::C4, config.n)?;
    let c8 = constant(ConstantKind::C8, config.n)?;
    let li = config.ell as f64;
    let mu_shift =
        -(li * config.eps).sqrt() * 4.0 * config.mu * c8 * li.powf((4.0 - nf) / (nf - 2.0))
            / ((nf - 2.0) * (nf - 2.0) * c4.sqrt())
            * ((nf - 6.0) * config.xi / 2.0).exp();
    Ok(ExpansionFit {
        c0: c0_raw - mu_shift,
        c1,
        residual,
        c0_raw,
    })
}
