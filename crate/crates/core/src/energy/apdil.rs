//! Approximate local dilatation estimated from densities of the bad set
//! `D_x(t) = {y : |f(y) − f(x)| > t·|y − x|}` on shrinking balls.
//!
//! Each cell meeting `B_r(x)` is sampled uniformly, either over the cell itself or
//! over the disk cut from its affine plane by the ball, whichever is smaller.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::current::geometry::{dist, edge_matrix, orthonormal_frame, point_simplex_distance};
use crate::current::{Cell, SimplicialCurrent};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ApdilOptions {
    pub density_tol: f64,
    /// Samples drawn per cell and radius.
    pub samples_per_cell: usize,
    /// The density at a threshold is the maximum over this many smallest radii.
    pub tail: usize,
    pub seed: u64,
}

impl Default for ApdilOptions {
    fn default() -> Self {
        ApdilOptions {
            density_tol: 1e-3,
            samples_per_cell: 512,
            tail: 3,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ApdilEstimate {
    /// Smallest grid threshold with vanishing density; the largest grid value if none.
    pub value: f64,
    /// `densities[i][j]`: density of `D_x(t_grid[i])` at `radii[j]`.
    pub densities: Vec<Vec<f64>>,
    pub saturated: bool,
}

/// Default radii schedule `r0·2^{-j}` for `j = 0..=8`.
pub fn default_radii(r0: f64) -> Vec<f64> {
    (0..=8).map(|j| r0 * 0.5f64.powi(j)).collect()
}

/// Value of `f` at `x`, which must lie on a cell of the current.
fn locate(t: &SimplicialCurrent, f: &[f64], x: &[f64]) -> Result<f64> {
    if x.len() != t.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates, ambient dimension is {}",
            x.len(),
            t.ambient_dim()
        )));
    }
    for c in t.cells() {
        let pts = t.cell_points(c);
        let scale = crate::current::geometry::max_edge(&pts).max(1.0);
        if point_simplex_distance(x, &pts) <= 1e-9 * scale {
            let bary = barycentric(&pts, x);
            return Ok(c.vertices.iter().zip(&bary).map(|(&v, b)| f[v] * b).sum());
        }
    }
    Err(Error::NotOnSupport)
}

/// Barycentric coordinates of the orthogonal projection of `y` onto the cell's plane.
fn barycentric(pts: &[&[f64]], y: &[f64]) -> Vec<f64> {
    let k = pts.len() - 1;
    if k == 0 {
        return vec![1.0];
    }
    let e = edge_matrix(pts);
    let g = e.transpose() * &e;
    let d = DVector::from_iterator(y.len(), y.iter().zip(pts[0]).map(|(a, b)| a - b));
    let a = g.lu().solve(&(e.transpose() * d)).unwrap_or_else(|| DVector::zeros(k));
    let mut out = vec![1.0 - a.sum()];
    out.extend(a.iter());
    out
}

/// Unit-ball volume in dimension k.
fn omega(k: usize) -> f64 {
    let kf = k as f64;
    std::f64::consts::PI.powf(kf / 2.0) / gamma_half_integer(kf / 2.0 + 1.0)
}

fn gamma_half_integer(x: f64) -> f64 {
    // Γ at integers and half-integers is all that unit-ball volumes need
    let mut r = if (x - x.floor()).abs() < 1e-12 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut y = if (x - x.floor()).abs() < 1e-12 { 1.0 } else { 0.5 };
    while y < x - 1e-12 {
        r *= y;
        y += 1.0;
    }
    r
}

struct CellSampler<'a> {
    cell: &'a Cell,
    pts: Vec<&'a [f64]>,
    frame: DMatrix<f64>,
    origin_in_plane: Vec<f64>,
    weight: f64,
}

/// Mass of `D_x(t) ∩ B_r(x)` for every `t` in `t_grid`, sampled cell by cell.
fn bad_set_masses(
    t: &SimplicialCurrent,
    f: &[f64],
    x: &[f64],
    fx: f64,
    r: f64,
    t_grid: &[f64],
    opts: &ApdilOptions,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let k = t.dim();
    let mut out = vec![0.0; t_grid.len()];
    for cell in t.cells() {
        let pts = t.cell_points(cell);
        let dcell = point_simplex_distance(x, &pts);
        if dcell >= r {
            continue;
        }
        let (frame, _) = orthonormal_frame(&pts);
        let s = CellSampler {
            cell,
            origin_in_plane: pts[0].to_vec(),
            pts,
            frame,
            weight: cell.mult.unsigned_abs() as f64,
        };
        let cell_vol = t.cell_volume(cell);
        // disk cut from the cell's plane by the ball
        let rel: Vec<f64> = x.iter().zip(&s.origin_in_plane).map(|(a, b)| a - b).collect();
        let relv = DVector::from_column_slice(&rel);
        let coords = s.frame.transpose() * &relv;
        let proj: Vec<f64> = (&s.frame * &coords)
            .iter()
            .zip(&s.origin_in_plane)
            .map(|(a, b)| a + b)
            .collect();
        let h = dist(x, &proj);
        let rho = (r * r - h * h).max(0.0).sqrt();
        let disk_vol = omega(k) * rho.powi(k as i32);
        let use_disk = disk_vol < cell_vol;
        let vol = if use_disk { disk_vol } else { cell_vol };
        let mut hits = vec![0usize; t_grid.len()];
        let n = opts.samples_per_cell;
        for _ in 0..n {
            let (y, vals) = if use_disk {
                let u = sample_ball(k, rng);
                let offs = &s.frame * DVector::from_iterator(k, u.iter().map(|c| c * rho));
                let y: Vec<f64> = proj.iter().zip(offs.iter()).map(|(a, b)| a + b).collect();
                let bary = barycentric(&s.pts, &y);
                if bary.iter().any(|b| *b < 0.0) {
                    continue;
                }
                (y, bary)
            } else {
                let bary = sample_simplex(k, rng);
                let mut y = vec![0.0; x.len()];
                for (p, b) in s.pts.iter().zip(&bary) {
                    for (yi, pi) in y.iter_mut().zip(p.iter()) {
                        *yi += b * pi;
                    }
                }
                if dist(&y, x) >= r {
                    continue;
                }
                (y, bary)
            };
            let fy: f64 = s.cell.vertices.iter().zip(&vals).map(|(&v, b)| f[v] * b).sum();
            let d = dist(&y, x);
            if d == 0.0 {
                continue;
            }
            let ratio = jump(fy, fx) / d;
            for (hit, &tt) in hits.iter_mut().zip(t_grid) {
                if ratio > tt {
                    *hit += 1;
                }
            }
        }
        for (o, h) in out.iter_mut().zip(hits) {
            *o += s.weight * vol * h as f64 / n as f64;
        }
    }
    out
}

/// `|a − b|` with interpolation roundoff treated as zero.
fn jump(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d <= 1e-12 * a.abs().max(b.abs()).max(1.0) {
        0.0
    } else {
        d
    }
}

fn sample_simplex(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut e: Vec<f64> = (0..=k).map(|_| -rng.gen_range(f64::MIN_POSITIVE..1.0f64).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter_mut().for_each(|v| *v /= s);
    e
}

fn sample_ball(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if v.iter().map(|c| c * c).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

/// Smallest `t` in `t_grid` (sorted ascending) at which the upper density of
/// `‖T‖⌞D_x(t)` at `x`, read off the smallest radii, drops below the tolerance.
pub fn estimate_apdil(
    t: &SimplicialCurrent,
    f: &[f64],
    x: &[f64],
    radii: &[f64],
    t_grid: &[f64],
    opts: &ApdilOptions,
) -> Result<ApdilEstimate> {
    if f.len() != t.vertices().len() {
        return Err(Error::InvalidArgument("function length differs from vertex count".into()));
    }
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("radii must be positive and decreasing".into()));
    }
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("threshold grid must be nonempty and increasing".into()));
    }
    let fx = locate(t, f, x)?;
    let k = t.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut densities = vec![vec![0.0; radii.len()]; t_grid.len()];
    for (j, &r) in radii.iter().enumerate() {
        let masses = bad_set_masses(t, f, x, fx, r, t_grid, opts, &mut rng);
        let norm = omega(k) * r.powi(k as i32);
        for (i, m) in masses.iter().enumerate() {
            densities[i][j] = m / norm;
        }
    }
    let tail = opts.tail.clamp(1, radii.len());
    let upper = |row: &Vec<f64>| row[radii.len() - tail..].iter().fold(0.0f64, |a, b| a.max(*b));
    let found = densities.iter().position(|row| upper(row) < opts.density_tol);
    Ok(ApdilEstimate {
        value: t_grid[found.unwrap_or(t_grid.len() - 1)],
        densities,
        saturated: found.is_none(),
    })
}

/// `sup |f(y) − f(x)| / |y − x|` over support points in `B_r(x)`: vertices plus samples.
pub fn dilation_sup(
    t: &SimplicialCurrent,
    f: &[f64],
    x: &[f64],
    r: f64,
    samples_per_cell: usize,
    seed: u64,
) -> Result<f64> {
    let fx = locate(t, f, x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for cell in t.cells() {
        let pts = t.cell_points(cell);
        if point_simplex_distance(x, &pts) >= r {
            continue;
        }
        let mut consider = |y: &[f64], fy: f64| {
            let d = dist(y, x);
            if d > 1e-14 && d < r {
                best = best.max(jump(fy, fx) / d);
            }
        };
        for (p, &v) in pts.iter().zip(&cell.vertices) {
            consider(p, f[v]);
        }
        for _ in 0..samples_per_cell {
            let bary = sample_simplex(t.dim(), &mut rng);
            let mut y = vec![0.0; x.len()];
            for (p, b) in pts.iter().zip(&bary) {
                for (yi, pi) in y.iter_mut().zip(p.iter()) {
                    *yi += b * pi;
                }
            }
            let fy: f64 = cell.vertices.iter().zip(&bary).map(|(&v, b)| f[v] * b).sum();
            consider(&y, fy);
        }
    }
    Ok(best)
}
