//! Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) for second-order
//! scalar problems written as 2-dimensional first-order systems, with
//! quintic-Hermite dense output and bisection-based event location on the
//! derivative component.

use crate::error::{Error, Result};
use crate::quad;
use std::sync::OnceLock;

/// A 2-dimensional first-order system. `rhs_dot` is the time derivative of
/// `rhs` along the flow; it feeds the second-derivative data of the dense
/// interpolant.
pub trait System2 {
    fn rhs(&self, t: f64, y: [f64; 2]) -> [f64; 2];
    fn rhs_dot(&self, t: f64, y: [f64; 2], f: [f64; 2]) -> [f64; 2];
}

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    /// Abort with a blow-up error when |y0| exceeds this.
    pub amplitude_guard: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-12,
            atol: 1e-14,
            h_max: 2e-2,
            amplitude_guard: f64::INFINITY,
        }
    }
}

/// One accepted step with quintic interpolants for both components, stored
/// as monomial coefficients in s = (t - t0)/(t1 - t0).
#[derive(Debug, Clone)]
pub struct DenseStep {
    pub t0: f64,
    pub t1: f64,
    cy: [f64; 6],
    cd: [f64; 6],
}

impl DenseStep {
    #[allow(clippy::too_many_arguments)]
    fn from_jets(
        ta: f64,
        ya: [f64; 2],
        fa: [f64; 2],
        ga: [f64; 2],
        tb: f64,
        yb: [f64; 2],
        fb: [f64; 2],
        gb: [f64; 2],
    ) -> DenseStep {
        // order endpoints by time; jet data is direction-free
        let (t0, y0, f0, g0, t1, y1, f1, g1) = if ta <= tb {
            (ta, ya, fa, ga, tb, yb, fb, gb)
        } else {
            (tb, yb, fb, gb, ta, ya, fa, ga)
        };
        let h = t1 - t0;
        let build = |vl: f64, dl: f64, sl: f64, vr: f64, dr: f64, sr: f64| -> [f64; 6] {
            // two-point quintic Hermite from value / first / second derivative
            let (fl, gl) = (h * dl, h * h * sl);
            let (fr, gr) = (h * dr, h * h * sr);
            let a0 = vl;
            let a1 = fl;
            let a2 = 0.5 * gl;
            let ra = vr - (a0 + a1 + a2);
            let rb = fr - (a1 + 2.0 * a2);
            let rc = gr - 2.0 * a2;
            [
                a0,
                a1,
                a2,
                10.0 * ra - 4.0 * rb + 0.5 * rc,
                -15.0 * ra + 7.0 * rb - rc,
                6.0 * ra - 3.0 * rb + 0.5 * rc,
            ]
        };
        DenseStep {
            t0,
            t1,
            cy: build(y0[0], f0[0], g0[0], y1[0], f1[0], g1[0]),
            cd: build(y0[1], f0[1], g0[1], y1[1], f1[1], g1[1]),
        }
    }

    fn horner(c: &[f64; 6], s: f64) -> f64 {
        ((((c[5] * s + c[4]) * s + c[3]) * s + c[2]) * s + c[1]) * s + c[0]
    }

    fn horner_d(c: &[f64; 6], s: f64, h: f64) -> f64 {
        ((((5.0 * c[5] * s + 4.0 * c[4]) * s + 3.0 * c[3]) * s + 2.0 * c[2]) * s + c[1]) / h
    }

    pub fn eval(&self, t: f64) -> [f64; 2] {
        let s = (t - self.t0) / (self.t1 - self.t0);
        [Self::horner(&self.cy, s), Self::horner(&self.cd, s)]
    }

    /// Time derivatives of the two interpolants.
    pub fn eval_deriv(&self, t: f64) -> [f64; 2] {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        [
            Self::horner_d(&self.cy, s, h),
            Self::horner_d(&self.cd, s, h),
        ]
    }
}

/// Dense solution on an interval, steps ascending in t.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    steps: Vec<DenseStep>,
}

impl DenseSolution {
    pub fn t_min(&self) -> f64 {
        self.steps.first().map_or(f64::NAN, |s| s.t0)
    }

    pub fn t_max(&self) -> f64 {
        self.steps.last().map_or(f64::NAN, |s| s.t1)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_min() - 1e-12 && t <= self.t_max() + 1e-12
    }

    fn step_at(&self, t: f64) -> &DenseStep {
        let mut lo = 0usize;
        let mut hi = self.steps.len();
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.steps[mid].t0 <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        &self.steps[lo]
    }

    pub fn eval(&self, t: f64) -> [f64; 2] {
        self.step_at(t).eval(t)
    }

    pub fn eval_deriv(&self, t: f64) -> [f64; 2] {
        self.step_at(t).eval_deriv(t)
    }

    /// Node samples (t, y) at accepted step boundaries, ascending.
    pub fn nodes(&self) -> Vec<(f64, [f64; 2])> {
        let mut out: Vec<(f64, [f64; 2])> = Vec::with_capacity(self.steps.len() + 1);
        if let Some(first) = self.steps.first() {
            out.push((first.t0, first.eval(first.t0)));
        }
        for s in &self.steps {
            out.push((s.t1, s.eval(s.t1)));
        }
        out
    }

    /// Residual of the interpolant in the given system at time t:
    /// max of |y0' - y1| and |y1' - f_1(t, y)|.
    pub fn residual<S: System2>(&self, sys: &S, t: f64) -> f64 {
        let y = self.eval(t);
        let d = self.eval_deriv(t);
        let f = sys.rhs(t, y);
        (d[0] - y[1]).abs().max((d[1] - f[1]).abs())
    }

    /// Integrate g(t, y0, y1) over the whole span using a 7-point
    /// Gauss-Legendre rule per dense step.
    pub fn integral<G: Fn(f64, f64, f64) -> f64>(&self, g: G) -> f64 {
        self.integral_over(self.t_min(), self.t_max(), g)
    }

    pub fn integral_over<G: Fn(f64, f64, f64) -> f64>(&self, a: f64, b: f64, g: G) -> f64 {
        static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
        let (nodes, weights) = RULE.get_or_init(|| quad::gauss_legendre(7));
        let mut sum = 0.0;
        for s in &self.steps {
            let lo = s.t0.max(a);
            let hi = s.t1.min(b);
            if hi <= lo {
                continue;
            }
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            let mut panel = 0.0;
            for (x, w) in nodes.iter().zip(weights) {
                let t = mid + half * x;
                let y = s.eval(t);
                panel += w * g(t, y[0], y[1]);
            }
            sum += panel * half;
        }
        sum
    }

    /// Locate zeros of the derivative component by endpoint sign changes
    /// plus bisection on the dense interpolant, classifying each extremum
    /// through the interpolated second derivative.
    pub fn extrema(&self) -> Vec<Extremum> {
        let mut out: Vec<Extremum> = Vec::new();
        for s in &self.steps {
            let d0 = s.eval(s.t0)[1];
            let d1 = s.eval(s.t1)[1];
            let zero_tol = 1e-13;
            let mut record = |t: f64| {
                let y = s.eval(t);
                let curac = s.eval_deriv(t)[1];
                let kind = if curac > 0.0 {
                    ExtremumKind::Minimum
                } else {
                    ExtremumKind::Maximum
                };
                if out
                    .last()
                    .is_none_or(|last: &Extremum| (last.t - t).abs() > 1e-9)
                {
                    out.push(Extremum { t, v: y[0], kind });
                }
            };
            if d0.abs() <= zero_tol && s.t0 == self.t_min() {
                record(s.t0);
            }
            if d0 * d1 < 0.0 {
                let mut lo = s.t0;
                let mut hi = s.t1;
                let mut flo = d0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let fm = s.eval(mid)[1];
                    if fm.abs() <= 1e-12 || (hi - lo) < 1e-15 * (1.0 + mid.abs()) {
                        lo = mid;
                        break;
                    }
                    if flo * fm <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                record(0.5 * (lo + hi));
            } else if d1.abs() <= zero_tol && d0.abs() > zero_tol {
                record(s.t1);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Minimum,
    Maximum,
}

#[derive(Debug, Clone, Copy)]
pub struct Extremum {
    pub t: f64,
    pub v: f64,
    pub kind: ExtremumKind,
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate from (t0, y0) to t1 (either direction).
pub fn integrate_system<S: System2>(
    sys: &S,
    t0: f64,
    y0: [f64; 2],
    t1: f64,
    ctrl: &StepControl,
) -> Result<DenseSolution> {
    let span = t1 - t0;
    let mut steps: Vec<DenseStep> = Vec::new();
    if span == 0.0 || span.abs() < 1e-300 {
        // degenerate span: a single constant step
        let f = sys.rhs(t0, y0);
        let g = sys.rhs_dot(t0, y0, f);
        steps.push(DenseStep::from_jets(
            t0,
            y0,
            f,
            g,
            t0 + 1e-30_f64.copysign(1.0),
            y0,
            f,
            g,
        ));
        return Ok(DenseSolution { steps });
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut f = sys.rhs(t, y);
    let mut h = (ctrl.h_max.min(span.abs() / 4.0)).max(span.abs() * 1e-6) * dir;
    let h_floor = 1e-14 * span.abs().max(1.0) / 1e2;
    loop {
        if (t - t1) * dir >= 0.0 {
            break;
        }
        if ((t + h) - t1) * dir > 0.0 {
            h = t1 - t;
        }
        // stages
        let mut k = [[0.0f64; 2]; 7];
        k[0] = f;
        for stage in 0..6 {
            let mut ys = y;
            for comp in 0..2 {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(stage + 1) {
                    acc += A[stage][j] * kj[comp];
                }
                ys[comp] += h * acc;
            }
            k[stage + 1] = sys.rhs(t + C[stage] * h, ys);
        }
        // 5th-order solution is stage 6's argument (FSAL)
        let mut y_new = y;
        for comp in 0..2 {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(6) {
                acc += A[5][j] * kj[comp];
            }
            y_new[comp] += h * acc;
        }
        // embedded error estimate
        let mut err = 0.0f64;
        for comp in 0..2 {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[comp];
            }
            e *= h;
            let sc = ctrl.atol + ctrl.rtol * y[comp].abs().max(y_new[comp].abs());
            err = err.max((e / sc).abs());
        }
        if err <= 1.0 {
            let t_new = t + h;
            let f_new = k[6];
            let g_old = sys.rhs_dot(t, y, f);
            let g_new = sys.rhs_dot(t_new, y_new, f_new);
            steps.push(DenseStep::from_jets(
                t, y, f, g_old, t_new, y_new, f_new, g_new,
            ));
            t = t_new;
            y = y_new;
            f = f_new;
            if !y[0].is_finite() || !y[1].is_finite() || y[0].abs() > ctrl.amplitude_guard {
                return Err(Error::BlowUp {
                    t,
                    v: y[0],
                    dv: y[1],
                });
            }
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).clamp(-ctrl.h_max, ctrl.h_max);
        if h.abs() < h_floor {
            return Err(Error::StepUnderflow(t));
        }
    }
    if dir < 0.0 {
        steps.reverse();
    }
    Ok(DenseSolution { steps })
}

/// Integrate in the given direction until `want_minima` minima of y0 have
/// been located, then continue for `overshoot` more time units. `t_limit`
/// bounds the search horizon.
#[allow(clippy::too_many_arguments)]
pub fn integrate_until_minima<S: System2>(
    sys: &S,
    t0: f64,
    y0: [f64; 2],
    direction: f64,
    want_minima: usize,
    t_limit: f64,
    overshoot: f64,
    ctrl: &StepControl,
) -> Result<(DenseSolution, Vec<Extremum>)> {
    let dir = direction.signum();
    let mut target = t0 + dir * ((t_limit - t0).abs().min(8.0));
    let mut sol = integrate_system(sys, t0, y0, target, ctrl)?;
    loop {
        let minima = sol
            .extrema()
            .iter()
            .filter(|e| e.kind == ExtremumKind::Minimum && (e.t - t0).abs() > 1e-9)
            .count();
        if minima >= want_minima {
            break;
        }
        if ((target - t_limit) * dir) >= 0.0 {
            return Err(Error::ExtremaCount {
                requested: want_minima,
                found: minima,
            });
        }
        // extend
        let next = if dir > 0.0 {
            (target + 8.0).min(t_limit)
        } else {
            (target - 8.0).max(t_limit)
        };
        let (t_edge, y_edge) = edge_state(&sol, dir);
        let ext = integrate_system(sys, t_edge, y_edge, next, ctrl)?;
        sol = merge(sol, ext, dir);
        target = next;
    }
    // overshoot past the last located minimum
    if overshoot > 0.0 {
        let (t_edge, y_edge) = edge_state(&sol, dir);
        let stop = t_edge + dir * overshoot;
        if (stop - t_limit) * dir < 0.0 {
            let ext = integrate_system(sys, t_edge, y_edge, stop, ctrl)?;
            sol = merge(sol, ext, dir);
        }
    }
    let extrema = sol.extrema();
    Ok((sol, extrema))
}

fn edge_state(sol: &DenseSolution, dir: f64) -> (f64, [f64; 2]) {
    if dir > 0.0 {
        (sol.t_max(), sol.eval(sol.t_max()))
    } else {
        (sol.t_min(), sol.eval(sol.t_min()))
    }
}

/// Merge two dense solutions that share an endpoint.
pub fn merge(a: DenseSolution, b: DenseSolution, dir: f64) -> DenseSolution {
    let (mut lo, hi) = if dir > 0.0 { (a, b) } else { (b, a) };
    lo.steps.extend(hi.steps);
    DenseSolution { steps: lo.steps }
}
