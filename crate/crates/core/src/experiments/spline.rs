//! Surfaces of revolution that pinch into a thin spline: a unit sphere cap joined
//! by a short transition to a tube of radius `ε` ending in a small cap.
//!
//! The test function is `−c` on the sphere part and `sin(πx/4)` along the tube, so
//! its Rayleigh quotient tends to `(π/4)²` while the sphere keeps `λ₁ = 2`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::current::mesh::{icosphere, revolution_surface};
use crate::current::SimplicialCurrent;
use crate::energy::{integral, minmax_spectrum, rayleigh_quotient, SpectrumOptions};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct SplineParams {
    pub eps: Vec<f64>,
    /// Number of profile segments.
    pub profile_resolution: usize,
    pub angular_resolution: usize,
    /// Icosphere level of the comparison sphere.
    pub sphere_level: usize,
    pub spectrum: SpectrumOptions,
}

impl Default for SplineParams {
    fn default() -> Self {
        SplineParams {
            eps: vec![0.2, 0.1, 0.05],
            profile_resolution: 128,
            angular_resolution: 256,
            sphere_level: 4,
            spectrum: SpectrumOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SplineRecord {
    pub eps: f64,
    pub vertices: usize,
    pub triangles: usize,
    pub mass: f64,
    /// `(mass − 4π) / 4π`.
    pub mass_rel_gap: f64,
    pub c_eps: f64,
    pub rayleigh_quotient: f64,
    pub lambda1: f64,
    pub lambda1_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SphereRecord {
    pub level: usize,
    pub triangles: usize,
    pub mass: f64,
    pub lambda1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplineReport {
    pub params: SplineParams,
    /// `(π/4)²`.
    pub limit_quotient: f64,
    pub sphere: SphereRecord,
    pub records: Vec<SplineRecord>,
}

fn check(eps: f64, n: usize, m: usize) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 0.5), got {eps}")));
    }
    if n < 16 || m < 16 {
        return Err(Error::InvalidArgument(format!(
            "resolutions must be at least 16, got {n} x {m}"
        )));
    }
    Ok(())
}

/// Profile samples `(x, h(x))` with `n` segments spread by arclength over the four
/// pieces (big cap, linear transition, tube, small cap); breakpoints are samples.
pub fn spline_profile(eps: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    check(eps, n, 16)?;
    let theta0 = (1.0 - eps).acos();
    let knee = (2.0 * eps - eps * eps).sqrt();
    let lengths = [
        PI - theta0,
        ((2.0 * eps).powi(2) + (knee - eps).powi(2)).sqrt(),
        2.0 - 2.0 * eps,
        PI * eps / 2.0,
    ];
    let total: f64 = lengths.iter().sum();
    let mut counts: Vec<usize> = lengths
        .iter()
        .map(|l| ((n as f64 * l / total).round() as usize).max(2))
        .collect();
    let used: usize = counts.iter().sum();
    // the tube absorbs the rounding difference
    counts[2] = (counts[2] as isize + n as isize - used as isize).max(2) as usize;

    let mut pts = Vec::with_capacity(n + 1);
    let cap = |s: f64| {
        let th = PI + (theta0 - PI) * s;
        (-1.0 + th.cos(), th.sin().max(0.0))
    };
    for i in 0..counts[0] {
        pts.push(cap(i as f64 / counts[0] as f64));
    }
    pts[0] = (-2.0, 0.0);
    for i in 0..counts[1] {
        let s = i as f64 / counts[1] as f64;
        pts.push((-eps + 2.0 * eps * s, knee + (eps - knee) * s));
    }
    for i in 0..counts[2] {
        let s = i as f64 / counts[2] as f64;
        pts.push((eps + (2.0 - 2.0 * eps) * s, eps));
    }
    for i in 0..=counts[3] {
        let phi = PI / 2.0 * (1.0 - i as f64 / counts[3] as f64);
        pts.push((2.0 - eps + eps * phi.cos(), eps * phi.sin()));
    }
    let last = pts.len() - 1;
    pts[last] = (2.0, 0.0);
    Ok(pts)
}

pub fn spline_surface(eps: f64, n: usize, m: usize) -> Result<SimplicialCurrent> {
    check(eps, n, m)?;
    revolution_surface(&spline_profile(eps, n)?, m)
}

/// The mean-zero test function and its constant `c_ε`.
///
/// Vertex values are `g + c·h`, affine in `c`, so the constant comes from the exact
/// piecewise-linear integral.
pub fn spline_test_function(t: &SimplicialCurrent, eps: f64) -> Result<(Vec<f64>, f64)> {
    let (g, h): (Vec<f64>, Vec<f64>) = t
        .vertices()
        .points()
        .map(|p| {
            let x = p[0];
            if x >= eps {
                ((PI * x / 4.0).sin(), 0.0)
            } else {
                let s = ((x + eps) / (2.0 * eps)).clamp(0.0, 1.0);
                (s * (PI * eps / 4.0).sin(), -(1.0 - s))
            }
        })
        .unzip();
    let ih = integral(t, &h);
    if ih.abs() <= 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let c = -integral(t, &g) / ih;
    Ok((g.iter().zip(&h).map(|(a, b)| a + c * b).collect(), c))
}

pub fn spline_record(eps: f64, params: &SplineParams) -> Result<SplineRecord> {
    let t = spline_surface(eps, params.profile_resolution, params.angular_resolution)?;
    let (f, c) = spline_test_function(&t, eps)?;
    let rq = rayleigh_quotient(&t, &f, None)?;
    let spec = minmax_spectrum(&t, 1, None, &params.spectrum)?;
    let mass = t.mass();
    Ok(SplineRecord {
        eps,
        vertices: t.vertices().len(),
        triangles: t.cells().len(),
        mass,
        mass_rel_gap: (mass - 4.0 * PI) / (4.0 * PI),
        c_eps: c,
        rayleigh_quotient: rq,
        lambda1: spec.eigenvalues[0],
        lambda1_residual: spec.residuals[0],
    })
}

pub fn sphere_record(level: usize, opts: &SpectrumOptions) -> Result<SphereRecord> {
    let s = icosphere(level);
    let spec = minmax_spectrum(&s, 1, None, opts)?;
    Ok(SphereRecord {
        level,
        triangles: s.cells().len(),
        mass: s.mass(),
        lambda1: spec.eigenvalues[0],
    })
}

pub fn run_spline_experiment(params: &SplineParams) -> Result<SplineReport> {
    for &e in &params.eps {
        check(e, params.profile_resolution, params.angular_resolution)?;
    }
    let (sphere, records) = rayon::join(
        || sphere_record(params.sphere_level, &params.spectrum),
        || {
            params
                .eps
                .par_iter()
                .map(|&e| spline_record(e, params))
                .collect::<Result<Vec<_>>>()
        },
    );
    Ok(SplineReport {
        params: params.clone(),
        limit_quotient: (PI / 4.0).powi(2),
        sphere: sphere?,
        records: records?,
    })
}
