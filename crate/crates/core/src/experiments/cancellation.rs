//! Two unit cubes joined by a thin perforated sheet.
//!
//! The solid is `Q(2e₁) ∪ P_j ∪ Q(−2e₁)` where `Q(±2e₁) = [±2 − 1, ±2 + 1] × [−1, 1]²`
//! and `P_j = [−1, 1]² × [−4^{−j}, 4^{−j}]` minus the square holes of half-width
//! `4^{−j}` centred at `(k/2^j, l/2^j)` for `|k|, |l| < 2^j`. As `j` grows the sheet
//! collapses onto two oppositely oriented faces that cancel in the flat limit,
//! while the mass of those faces persists and the connected surface keeps a
//! positive first eigenvalue.

use rayon::prelude::*;
use serde::Serialize;

use crate::current::mesh::voxel_boundary;
use crate::current::SimplicialCurrent;
use crate::energy::{minmax_spectrum, SpectrumOptions};
use crate::error::{Error, Result};
use crate::flat::{flat_norm_of_chain, grid_complex, FlatOptions};

#[derive(Debug, Clone, Serialize)]
pub struct CancellationParams {
    pub j: Vec<u32>,
    /// Grid cells per unit length between geometric breakpoints.
    pub resolution: usize,
    /// Eigenvalues reported per surface.
    pub count: usize,
    /// Largest sheet box (in voxels) for which the flat LP is solved.
    pub lp_max_voxels: usize,
    pub spectrum: SpectrumOptions,
}

impl Default for CancellationParams {
    fn default() -> Self {
        CancellationParams {
            j: vec![1, 2],
            resolution: 8,
            count: 2,
            lp_max_voxels: 128,
            spectrum: SpectrumOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FlatProxy {
    /// Best available upper bound on the flat distance to the two-cube limit.
    pub value: f64,
    /// `lp-local-box` when the LP over the sheet box was solved, else `filling-volume`.
    pub witness: String,
    /// Volume of the sheet, which fills the difference.
    pub filling_volume: f64,
    pub lp_value: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CancellationRecord {
    pub j: u32,
    pub vertices: usize,
    pub triangles: usize,
    pub mass: f64,
    /// `mass(M̃_j) − mass(M̃)`.
    pub mass_gap: f64,
    pub eigenvalues: Vec<f64>,
    pub flat: FlatProxy,
}

#[derive(Debug, Clone, Serialize)]
pub struct CancellationReport {
    pub params: CancellationParams,
    pub limit_mass: f64,
    pub limit_eigenvalues: Vec<f64>,
    pub records: Vec<CancellationRecord>,
}

fn check(j: u32, resolution: usize) -> Result<()> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("resolution too coarse to realize any tunnel".into()));
    }
    if !(1..=4).contains(&j) {
        return Err(Error::InvalidArgument(format!("j must lie in 1..=4, got {j}")));
    }
    Ok(())
}

fn half_thickness(j: u32) -> f64 {
    0.25f64.powi(j as i32)
}

/// Sorted breakpoints of the sheet in one in-plane coordinate.
fn sheet_breaks(j: u32) -> Vec<f64> {
    let w = half_thickness(j);
    let p = 1i64 << j;
    let mut b = vec![-1.0, 1.0];
    for k in (-p + 1)..p {
        let c = k as f64 / p as f64;
        b.extend([c - w, c + w]);
    }
    b.sort_by(f64::total_cmp);
    b.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    b
}

/// Breakpoints refined so no interval exceeds `1/resolution`.
fn refine(breaks: &[f64], resolution: usize) -> Vec<f64> {
    let mut out = vec![breaks[0]];
    for w in breaks.windows(2) {
        let pieces = ((w[1] - w[0]) * resolution as f64 - 1e-9).ceil().max(1.0) as usize;
        for i in 1..=pieces {
            out.push(w[0] + (w[1] - w[0]) * i as f64 / pieces as f64);
        }
    }
    out
}

fn in_hole(j: u32, x: f64, y: f64) -> bool {
    let w = half_thickness(j);
    let p = (1i64 << j) as f64;
    let near = |v: f64| {
        let k = (v * p).round();
        k.abs() < p && (v - k / p).abs() < w
    };
    near(x) && near(y)
}

fn in_sheet(j: u32, p: [f64; 3]) -> bool {
    p[0].abs() < 1.0 && p[1].abs() < 1.0 && p[2].abs() < half_thickness(j) && !in_hole(j, p[0], p[1])
}

fn in_cubes(p: [f64; 3]) -> bool {
    (p[0].abs() - 2.0).abs() < 1.0 && p[1].abs() < 1.0 && p[2].abs() < 1.0
}

struct Axes([Vec<f64>; 3]);

impl Axes {
    fn new(j: u32, resolution: usize) -> Self {
        let mut xb = sheet_breaks(j);
        xb.insert(0, -3.0);
        xb.push(3.0);
        let yb = sheet_breaks(j);
        let w = half_thickness(j);
        let zb = vec![-1.0, -w, w, 1.0];
        Axes([refine(&xb, resolution), refine(&yb, resolution), refine(&zb, resolution)])
    }

    fn boundary(&self, inside: impl Fn([f64; 3]) -> bool) -> SimplicialCurrent {
        let a = &self.0;
        voxel_boundary([&a[0], &a[1], &a[2]], |i, k, l| {
            inside([
                0.5 * (a[0][i] + a[0][i + 1]),
                0.5 * (a[1][k] + a[1][k + 1]),
                0.5 * (a[2][l] + a[2][l + 1]),
            ])
        })
    }
}

/// `∂(Q(2e₁) ∪ P_j ∪ Q(−2e₁))`.
pub fn perforated_surface(j: u32, resolution: usize) -> Result<SimplicialCurrent> {
    check(j, resolution)?;
    Ok(Axes::new(j, resolution).boundary(|p| in_cubes(p) || in_sheet(j, p)))
}

/// `∂(Q(2e₁) ∪ Q(−2e₁))` on the same grid as [`perforated_surface`].
pub fn two_cubes(j: u32, resolution: usize) -> Result<SimplicialCurrent> {
    check(j, resolution)?;
    Ok(Axes::new(j, resolution).boundary(in_cubes))
}

/// Volume of `P_j`.
pub fn sheet_volume(j: u32) -> f64 {
    let w = half_thickness(j);
    let holes = ((1u64 << (j + 1)) - 1) as f64;
    2.0 * w * (4.0 - holes * holes * 4.0 * w * w)
}

/// Upper bound on the flat distance between `M̃_j` and `M̃`: the difference is
/// `∂P_j`, filled by `P_j` itself; for small `j` the LP over a uniform grid of the
/// sheet box may improve on that.
pub fn flat_proxy(j: u32, lp_max_voxels: usize) -> Result<FlatProxy> {
    let w = half_thickness(j);
    let per_side = (2.0 / w).round() as usize;
    let voxels = per_side * per_side * 2;
    let filling_volume = sheet_volume(j);
    let lp_value = if voxels <= lp_max_voxels {
        let axis = |lo: f64, cells: usize| -> Vec<f64> { (0..=cells).map(|i| lo + w * i as f64).collect() };
        let (xs, zs) = (axis(-1.0, per_side), axis(-w, 2));
        let chain = voxel_boundary([&xs, &xs, &zs], |a, b, c| {
            in_sheet(
                j,
                [
                    0.5 * (xs[a] + xs[a + 1]),
                    0.5 * (xs[b] + xs[b + 1]),
                    0.5 * (zs[c] + zs[c + 1]),
                ],
            )
        });
        let complex = grid_complex(&[-1.0, -1.0, -w], &[1.0, 1.0, w], &[per_side, per_side, 2], 2)?;
        let d = complex.embed(&chain)?;
        Some(flat_norm_of_chain(&d, &complex, FlatOptions::default())?.value)
    } else {
        None
    };
    let (value, witness) = match lp_value {
        Some(v) if v < filling_volume => (v, "lp-local-box"),
        Some(_) => (filling_volume, "lp-local-box"),
        None => (filling_volume, "filling-volume"),
    };
    Ok(FlatProxy {
        value,
        witness: witness.into(),
        filling_volume,
        lp_value,
    })
}

pub fn cancellation_record(j: u32, params: &CancellationParams, limit_mass: f64) -> Result<CancellationRecord> {
    let t = perforated_surface(j, params.resolution)?;
    let spec = minmax_spectrum(&t, params.count, None, &params.spectrum)?;
    let mass = t.mass();
    Ok(CancellationRecord {
        j,
        vertices: t.vertices().len(),
        triangles: t.cells().len(),
        mass,
        mass_gap: mass - limit_mass,
        eigenvalues: spec.eigenvalues,
        flat: flat_proxy(j, params.lp_max_voxels)?,
    })
}

pub fn run_cancellation_experiment(params: &CancellationParams) -> Result<CancellationReport> {
    for &j in &params.j {
        check(j, params.resolution)?;
    }
    if params.count == 0 {
        return Err(Error::InvalidArgument("eigenvalue count must be positive".into()));
    }
    let limit = two_cubes(1, params.resolution)?;
    let limit_mass = limit.mass();
    let (lim, records) = rayon::join(
        || minmax_spectrum(&limit, params.count, None, &params.spectrum),
        || {
            params
                .j
                .par_iter()
                .map(|&j| cancellation_record(j, params, limit_mass))
                .collect::<Result<Vec<_>>>()
        },
    );
    Ok(CancellationReport {
        params: params.clone(),
        limit_mass,
        limit_eigenvalues: lim?.eigenvalues,
        records: records?,
    })
}
