//! Empirical harness for the local Poincaré-type inequality on patches.
//!
//! The left side is the mean oscillation of `f` over the cells lying inside the
//! cube `Q_r(x)` (first `k` coordinates); the right side is `r` times the average
//! of `|df|` over cells whose centroid lies in `B_R(x)` with `R = (3 + √k) r`.

use serde::Serialize;

use crate::current::geometry::point_simplex_distance;
use crate::current::SimplicialCurrent;
use crate::energy::{integral, dirichlet_energy};
use crate::error::{Error, Result};
use crate::john::NormRegistry;

#[derive(Debug, Clone, Serialize)]
pub struct PoincareRecord {
    pub lhs: f64,
    pub rhs_core: f64,
    /// `lhs / rhs_core`; zero when both vanish.
    pub ratio: f64,
    pub r: f64,
    pub big_radius: f64,
    pub good_cells: usize,
    pub ball_cells: usize,
}

fn sub_current(t: &SimplicialCurrent, keep: impl Fn(usize) -> bool) -> SimplicialCurrent {
    SimplicialCurrent::canonicalize(
        t.vertex_arc().clone(),
        t.dim(),
        t.cells()
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, c)| (c.vertices.clone(), c.mult, c.norm.clone())),
    )
}

/// `∫ |f − c| d‖G‖`, exact for piecewise-linear `f`.
fn abs_deviation(g: &SimplicialCurrent, f: &[f64], c: f64) -> Result<f64> {
    let shifted: Vec<f64> = f.iter().map(|v| v - c).collect();
    let active = g.active_vertices();
    let scale = active.iter().fold(1.0f64, |a, &i| a.max(f[i].abs()));
    if active.iter().all(|&i| shifted[i].abs() <= 1e-14 * scale) {
        return Ok(0.0);
    }
    let whole = integral(g, &shifted);
    let lower = match g.restrict_below(&shifted, 0.0) {
        Ok(l) => l,
        Err(Error::SliceThroughVertex { .. }) => {
            // the integral is Lipschitz in c, so average two nearby generic levels
            let h = 1e-9 * scale;
            return Ok(0.5 * (abs_deviation(g, f, c + h)? + abs_deviation(g, f, c - h)?));
        }
        Err(e) => return Err(e),
    };
    // crossings appended after the original vertices carry the value zero
    let mut ext = shifted;
    ext.resize(lower.vertices().len(), 0.0);
    let neg = integral(&lower, &ext);
    Ok(whole - 2.0 * neg)
}

pub fn poincare_ratio(
    t: &SimplicialCurrent,
    f: &[f64],
    x: &[f64],
    r: f64,
    norms: Option<&NormRegistry>,
) -> Result<PoincareRecord> {
    let k = t.dim();
    if k == 0 {
        return Err(Error::InvalidArgument("patch must have dimension at least 1".into()));
    }
    if x.len() != t.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates, ambient dimension is {}",
            x.len(),
            t.ambient_dim()
        )));
    }
    if f.len() != t.vertices().len() {
        return Err(Error::InvalidArgument("function length differs from vertex count".into()));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let big = (3.0 + (k as f64).sqrt()) * r;
    let boundary = t.boundary()?;
    if boundary
        .cells()
        .iter()
        .any(|c| point_simplex_distance(x, &boundary.cell_points(c)) <= big)
    {
        return Err(Error::PatchTooSmall { radius: big });
    }
    let inside_cube = |i: usize| {
        t.cell_points(&t.cells()[i])
            .iter()
            .all(|p| (0..k).all(|d| (p[d] - x[d]).abs() <= r * (1.0 + 1e-12)))
    };
    let in_ball = |i: usize| {
        let pts = t.cell_points(&t.cells()[i]);
        let np = pts.len() as f64;
        let d2: f64 = (0..x.len())
            .map(|d| {
                let c = pts.iter().map(|p| p[d]).sum::<f64>() / np;
                (c - x[d]).powi(2)
            })
            .sum();
        d2.sqrt() <= big
    };
    let g = sub_current(t, inside_cube);
    let b = sub_current(t, in_ball);
    let g_mass = g.mass();
    if g_mass <= 0.0 {
        return Err(Error::InvalidArgument("no cell lies inside the cube".into()));
    }
    let mean = integral(&g, f) / g_mass;
    let lhs = abs_deviation(&g, f, mean)? / g_mass;
    let b_mass = b.mass();
    let mut grad_int = 0.0;
    for cell in b.cells() {
        let single = SimplicialCurrent::canonicalize(
            b.vertex_arc().clone(),
            k,
            [(cell.vertices.clone(), cell.mult, cell.norm.clone())],
        );
        let vol = single.mass();
        let e = dirichlet_energy(&single, f, norms)?;
        // |df| is constant on the cell: energy = vol·|df|²
        grad_int += (e * vol).max(0.0).sqrt();
    }
    let rhs_core = r * grad_int / b_mass;
    let ratio = if rhs_core > 0.0 {
        lhs / rhs_core
    } else if lhs <= 1e-14 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(PoincareRecord {
        lhs,
        rhs_core,
        ratio,
        r,
        big_radius: big,
        good_cells: g.cells().len(),
        ball_cells: b.cells().len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::current::mesh;

    fn patch() -> SimplicialCurrent {
        mesh::square_patch([-1.5, -1.5], [2.5, 2.5], 80)
    }

    #[test]
    fn constant_function() {
        let t = patch();
        let f = vec![1.0; t.vertices().len()];
        let p = poincare_ratio(&t, &f, &[0.5, 0.5], 0.1, None).unwrap();
        assert!(p.lhs.abs() < 1e-14);
        assert_eq!(p.ratio, 0.0);
    }

    #[test]
    fn affine_function_matches_closed_form() {
        // f = x on the cube [0.4,0.6]²: mean deviation r/2, |df| = 1, ratio 1/2
        let t = patch();
        let f: Vec<f64> = t.vertices().points().map(|p| p[0]).collect();
        let p = poincare_ratio(&t, &f, &[0.5, 0.5], 0.1, None).unwrap();
        assert!((p.lhs - 0.05).abs() < 1e-9, "{}", p.lhs);
        assert!((p.ratio - 0.5).abs() < 1e-9);
    }

    #[test]
    fn patch_too_small() {
        let t = mesh::unit_square();
        let f = vec![0.0; 4];
        assert!(matches!(
            poincare_ratio(&t, &f, &[0.5, 0.5], 0.2, None),
            Err(Error::PatchTooSmall { .. })
        ));
    }

    #[test]
    fn abs_deviation_of_linear_function() {
        let t = mesh::segment_chain(4, 1.0);
        let f: Vec<f64> = t.vertices().points().map(|p| p[0]).collect();
        // ∫_0^1 |x − 0.3| = 0.045 + 0.245
        let v = abs_deviation(&t, &f, 0.3).unwrap();
        assert!((v - 0.29).abs() < 1e-14);
        // level through a vertex falls back to nearby levels
        let w = abs_deviation(&t, &f, 0.5).unwrap();
        assert!((w - 0.25).abs() < 1e-8);
    }
}
