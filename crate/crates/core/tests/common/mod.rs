//! Shared helpers for the integration suites: a deterministic generator
//! (the library itself uses no randomness) and finite-difference oracles
//! that stay independent of the analytic derivative paths they check.
//!
//! Each suite compiles its own copy and uses a subset.
#![allow(dead_code)]

use bubbletower::{evaluate_f, DomainGeometry, ReducedConfiguration};

pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

pub fn random_point(rng: &mut SplitMix, n: usize, geometry: DomainGeometry) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-9);
    let target = match geometry {
        DomainGeometry::UnitBall => rng.in_range(0.1, 0.7),
        DomainGeometry::ExteriorUnitBall => rng.in_range(1.3, 3.0),
    };
    for v in &mut x {
        *v *= target / r;
    }
    x
}

/// Admissible two-point configuration with separated points.
pub fn random_config(rng: &mut SplitMix, geometry: DomainGeometry) -> ReducedConfiguration {
    let n = 6usize;
    loop {
        let p1 = random_point(rng, n, geometry);
        let p2 = random_point(rng, n, geometry);
        let d: f64 = p1
            .iter()
            .zip(&p2)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if d < 0.35 {
            continue;
        }
        let cfg = ReducedConfiguration {
            geometry,
            n: 6,
            lambda: vec![rng.in_range(0.5, 3.0), rng.in_range(0.5, 3.0)],
            points: vec![p1, p2],
            mu: rng.in_range(-1.0, 5.0),
            ells: vec![
                1 + (rng.next_f64() * 3.0) as u32,
                1 + (rng.next_f64() * 3.0) as u32,
            ],
        };
        if cfg.validate().is_ok() {
            return cfg;
        }
    }
}

fn f_at(cfg: &ReducedConfiguration, v: &[f64]) -> f64 {
    let m = cfg.m();
    let n = cfg.n as usize;
    let mut c = cfg.clone();
    c.lambda = v[..m].to_vec();
    for i in 0..m {
        c.points[i] = v[m + i * n..m + (i + 1) * n].to_vec();
    }
    evaluate_f(&c).unwrap().finite().unwrap()
}

fn pack(cfg: &ReducedConfiguration) -> Vec<f64> {
    let mut v = cfg.lambda.clone();
    for p in &cfg.points {
        v.extend_from_slice(p);
    }
    v
}

/// Central-difference gradient of the reduced energy (step 1e-6).
pub fn fd_gradient(cfg: &ReducedConfiguration) -> Vec<f64> {
    let v = pack(cfg);
    let h = 1e-6;
    (0..v.len())
        .map(|k| {
            let mut vp = v.clone();
            let mut vm = v.clone();
            vp[k] += h;
            vm[k] -= h;
            (f_at(cfg, &vp) - f_at(cfg, &vm)) / (2.0 * h)
        })
        .collect()
}

/// Central second differences of the reduced energy (step 1e-4).
pub fn fd_hessian(cfg: &ReducedConfiguration) -> Vec<Vec<f64>> {
    let v = pack(cfg);
    let h = 1e-4;
    let dof = v.len();
    let f0 = f_at(cfg, &v);
    let mut out = vec![vec![0.0; dof]; dof];
    for i in 0..dof {
        let mut vp = v.clone();
        let mut vm = v.clone();
        vp[i] += h;
        vm[i] -= h;
        out[i][i] = (f_at(cfg, &vp) - 2.0 * f0 + f_at(cfg, &vm)) / (h * h);
        for j in (i + 1)..dof {
            let mut vpp = v.clone();
            let mut vpm = v.clone();
            let mut vmp = v.clone();
            let mut vmm = v.clone();
            vpp[i] += h;
            vpp[j] += h;
            vpm[i] += h;
            vpm[j] -= h;
            vmp[i] -= h;
            vmp[j] += h;
            vmm[i] -= h;
            vmm[j] -= h;
            let mixed = (f_at(cfg, &vpp) - f_at(cfg, &vpm) - f_at(cfg, &vmp) + f_at(cfg, &vmm))
                / (4.0 * h * h);
            out[i][j] = mixed;
            out[j][i] = mixed;
        }
    }
    out
}

/// Log-linear interpolation of a sampled radial profile.
pub fn interp_profile(rs: &[f64], us: &[f64], r: f64) -> f64 {
    let mut lo = 0;
    let mut hi = rs.len() - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if rs[mid] <= r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = (r.ln() - rs[lo].ln()) / (rs[hi].ln() - rs[lo].ln());
    us[lo] * (1.0 - t) + us[hi] * t
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

pub fn max_abs_mat(m: &[Vec<f64>]) -> f64 {
    m.iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |a, x| a.max(x.abs()))
}
