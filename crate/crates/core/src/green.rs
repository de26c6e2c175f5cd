//! Closed-form Green and Robin functions for the unit ball and the
//! exterior of the unit ball, their derivatives, and the interaction
//! matrix with its least eigenpair.
//!
//! Both geometries share the image kernel
//!   K(y, z) = (1 - 2<y,z> + |y|^2 |z|^2)^{(2-N)/2},
//! which is the regular part of Green's function in either case, and
//!   G(y, z) = |y - z|^{2-N} - K(y, z).

use crate::error::{Error, Result};
use crate::linalg::{self, sym_eigen};
use crate::params::Dimension;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainGeometry {
    UnitBall,
    ExteriorUnitBall,
}

impl DomainGeometry {
    /// Strict interiority test.
    pub fn contains(&self, x: &[f64]) -> bool {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match self {
            DomainGeometry::UnitBall => r2 < 1.0,
            DomainGeometry::ExteriorUnitBall => r2 > 1.0,
        }
    }

    /// Euclidean distance from an interior point to the unit sphere.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        match self {
            DomainGeometry::UnitBall => 1.0 - r,
            DomainGeometry::ExteriorUnitBall => r - 1.0,
        }
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if !self.contains(x) {
            return Err(Error::Domain(format!(
                "point {x:?} is not interior to {self:?}"
            )));
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Value, gradients and second derivatives of a kernel of the form
/// f(q(y, z)) with f(q) = q^{(2-N)/2}.
pub(crate) struct KernelJet {
    pub value: f64,
    pub grad_y: Vec<f64>,
    pub grad_z: Vec<f64>,
    pub hess_yy: Vec<Vec<f64>>,
    pub hess_zz: Vec<Vec<f64>>,
    /// d^2/(dy_i dz_j)
    pub hess_yz: Vec<Vec<f64>>,
}

/// Jet of the image kernel K(y, z) = q^{(2-N)/2}, q = 1 - 2<y,z> + |y|^2|z|^2.
pub(crate) fn image_jet(nf: f64, y: &[f64], z: &[f64]) -> KernelJet {
    let dim = y.len();
    let q = 1.0 - 2.0 * dot(y, z) + norm2(y) * norm2(z);
    let e = (2.0 - nf) / 2.0;
    let f0 = q.powf(e);
    let f1 = e * q.powf(e - 1.0);
    let f2 = e * (e - 1.0) * q.powf(e - 2.0);
    let qy: Vec<f64> = (0..dim).map(|i| 2.0 * (norm2(z) * y[i] - z[i])).collect();
    let qz: Vec<f64> = (0..dim).map(|i| 2.0 * (norm2(y) * z[i] - y[i])).collect();
    let mut hess_yy = vec![vec![0.0; dim]; dim];
    let mut hess_zz = vec![vec![0.0; dim]; dim];
    let mut hess_yz = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let qyy = if i == j { 2.0 * norm2(z) } else { 0.0 };
            let qzz = if i == j { 2.0 * norm2(y) } else { 0.0 };
            let qyz = 4.0 * y[i] * z[j] - if i == j { 2.0 } else { 0.0 };
            hess_yy[i][j] = f2 * qy[i] * qy[j] + f1 * qyy;
            hess_zz[i][j] = f2 * qz[i] * qz[j] + f1 * qzz;
            hess_yz[i][j] = f2 * qy[i] * qz[j] + f1 * qyz;
        }
    }
    KernelJet {
        value: f0,
        grad_y: qy.iter().map(|v| f1 * v).collect(),
        grad_z: qz.iter().map(|v| f1 * v).collect(),
        hess_yy,
        hess_zz,
        hess_yz,
    }
}

/// Jet of the singular kernel |y - z|^{2-N}.
pub(crate) fn singular_jet(nf: f64, y: &[f64], z: &[f64]) -> KernelJet {
    let dim = y.len();
    let d: Vec<f64> = y.iter().zip(z).map(|(a, b)| a - b).collect();
    let rho = norm2(&d);
    let e = (2.0 - nf) / 2.0;
    let f0 = rho.powf(e);
    let f1 = e * rho.powf(e - 1.0);
    let f2 = e * (e - 1.0) * rho.powf(e - 2.0);
    let ry: Vec<f64> = d.iter().map(|v| 2.0 * v).collect();
    let mut hess_yy = vec![vec![0.0; dim]; dim];
    let mut hess_zz = vec![vec![0.0; dim]; dim];
    let mut hess_yz = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let pair = f2 * ry[i] * ry[j];
            let diag = if i == j { 2.0 * f1 } else { 0.0 };
            hess_yy[i][j] = pair + diag;
            hess_zz[i][j] = pair + diag;
            hess_yz[i][j] = -(pair + diag);
        }
    }
    KernelJet {
        value: f0,
        grad_y: ry.iter().map(|v| f1 * v).collect(),
        grad_z: ry.iter().map(|v| -f1 * v).collect(),
        hess_yy,
        hess_zz,
        hess_yz,
    }
}

/// Regular part of Green's function (the limit z -> 0 in the ball gives 1
/// directly from the kernel form).
pub fn robin(geometry: DomainGeometry, y: &[f64], z: &[f64]) -> Result<f64> {
    let nf = Dimension::new(y.len() as u32)?.as_f64();
    geometry.check(y)?;
    geometry.check(z)?;
    let q = 1.0 - 2.0 * dot(y, z) + norm2(y) * norm2(z);
    Ok(q.powf((2.0 - nf) / 2.0))
}

/// Green's function G(y, z) = |y - z|^{2-N} - H(y, z).
pub fn green(geometry: DomainGeometry, y: &[f64], z: &[f64]) -> Result<f64> {
    let nf = Dimension::new(y.len() as u32)?.as_f64();
    geometry.check(y)?;
    geometry.check(z)?;
    let d2 = y.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    if d2 < 1e-24 {
        return Err(Error::Degenerate("green called on the diagonal".into()));
    }
    let q = 1.0 - 2.0 * dot(y, z) + norm2(y) * norm2(z);
    Ok(d2.powf((2.0 - nf) / 2.0) - q.powf((2.0 - nf) / 2.0))
}

/// Gradients of (G, H) in the first argument.
pub fn grad_fields(geometry: DomainGeometry, y: &[f64], z: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let nf = Dimension::new(y.len() as u32)?.as_f64();
    geometry.check(y)?;
    geometry.check(z)?;
    let d2 = y.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    if d2 < 1e-24 {
        return Err(Error::Degenerate(
            "grad_fields called on the diagonal".into(),
        ));
    }
    let im = image_jet(nf, y, z);
    let si = singular_jet(nf, y, z);
    let grad_g: Vec<f64> = si
        .grad_y
        .iter()
        .zip(&im.grad_y)
        .map(|(a, b)| a - b)
        .collect();
    Ok((grad_g, im.grad_y))
}

/// Interaction matrix: Robin values on the diagonal, -G off the diagonal.
#[derive(Debug, Clone)]
pub struct InteractionMatrix {
    pub points: Vec<Vec<f64>>,
    pub entries: Vec<Vec<f64>>,
    pub degenerate: bool,
}

impl InteractionMatrix {
    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.14e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

pub fn interaction_matrix(
    geometry: DomainGeometry,
    points: &[Vec<f64>],
) -> Result<InteractionMatrix> {
    if points.is_empty() {
        return Err(Error::Domain("need at least one point".into()));
    }
    for p in points {
        geometry.check(p)?;
    }
    let m = points.len();
    let mut degenerate = false;
    for i in 0..m {
        for j in (i + 1)..m {
            let d = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if d <= 1e-12 {
                degenerate = true;
            }
        }
    }
    let mut entries = vec![vec![0.0; m]; m];
    if !degenerate {
        for i in 0..m {
            entries[i][i] = robin(geometry, &points[i], &points[i])?;
            for j in (i + 1)..m {
                let g = -green(geometry, &points[i], &points[j])?;
                entries[i][j] = g;
                entries[j][i] = g;
            }
        }
    }
    Ok(InteractionMatrix {
        points: points.to_vec(),
        entries,
        degenerate,
    })
}

/// Least eigenvalue with the explicit degenerate sentinel.
#[derive(Debug, Clone, PartialEq)]
pub enum Rho {
    Finite(f64),
    NegInfinity,
}

#[derive(Debug, Clone)]
pub struct SpectralData {
    pub rho: Rho,
    /// Unit eigenvector with positive coordinates; absent for the sentinel.
    pub r_vec: Option<Vec<f64>>,
}

pub fn least_eigenpair(matrix: &InteractionMatrix) -> Result<SpectralData> {
    if matrix.degenerate {
        return Ok(SpectralData {
            rho: Rho::NegInfinity,
            r_vec: None,
        });
    }
    let eig = sym_eigen(&matrix.entries);
    let rho = eig.values[0];
    let mut v = eig.vectors[0].clone();
    // sign-normalize on the largest component
    let lead = v
        .iter()
        .cloned()
        .max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
        .unwrap_or(1.0);
    if lead < 0.0 {
        for x in &mut v {
            *x = -*x;
        }
    }
    if v.iter().any(|&x| x <= 0.0) {
        return Err(Error::PositivityViolation);
    }
    let n = linalg::norm2(&v);
    for x in &mut v {
        *x /= n;
    }
    Ok(SpectralData {
        rho: Rho::Finite(rho),
        r_vec: Some(v),
    })
}

/// Dirichlet-to-Neumann jump of one spherical-harmonic mode: the interior
/// extension scales as r^k, the decaying exterior one as r^{2-N-k}, so the
/// normalized jump is k - (2 - N - k) = 2k + N - 2, independent of radius.
pub fn harmonic_mode_dtn(n: u32, order: u32, radius: f64) -> Result<f64> {
    let nf = Dimension::new(n)?.as_f64();
    if order == 0 {
        return Err(Error::Domain(
            "mode order 0 is matched through the Green coefficient, not the DtN map".into(),
        ));
    }
    if !(radius > 0.0) {
        return Err(Error::Domain(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let interior = f64::from(order);
    let exterior = 2.0 - nf - f64::from(order);
    Ok(interior - exterior)
}
