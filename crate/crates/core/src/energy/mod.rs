//! Dirichlet energy of piecewise-linear functions, the stiffness/mass pencil and
//! the spectral quantities built on it.
//!
//! Functions are given by one value per vertex of the current's vertex set and are
//! linear on each cell. Untagged cells use the Euclidean metric. Cells tagged with
//! a norm id are measured in the orthonormal Gram–Schmidt frame of the cell, where
//! the ball's coordinates live: the scalar energy uses the ball's true dual norm,
//! while the quadratic pencil uses the John ellipsoid of the dual ball.

mod apdil;
mod cheeger;
mod eigen;
pub mod sparse;

pub use apdil::{default_radii, dilation_sup, estimate_apdil, ApdilEstimate, ApdilOptions};
pub use cheeger::{cheeger_upper_bound, Cut};
pub use eigen::{minmax_spectrum, EigenMethod, SpectrumOptions, SpectrumResult};
pub use sparse::CsrMatrix;

use nalgebra::{DMatrix, DVector};

use crate::current::geometry::{edge_matrix, orthonormal_frame};
use crate::current::{Cell, SimplicialCurrent};
use crate::error::{Error, Result};
use crate::john::{NormBall, NormRegistry};

/// Stiffness and mass matrices over the full vertex set.
#[derive(Debug, Clone)]
pub struct Pencil {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
}

/// Per-cell metric data for linear functions.
struct CellMetric<'a> {
    weight: f64,
    /// Quadratic form on vertex differences `f_i - f_0`.
    form: DMatrix<f64>,
    /// For tagged cells: map from differences to frame covector, and the ball.
    finsler: Option<(DMatrix<f64>, &'a NormBall)>,
}

fn cell_metric<'a>(
    t: &SimplicialCurrent,
    cell: &Cell,
    norms: Option<&'a NormRegistry>,
) -> Result<CellMetric<'a>> {
    let pts = t.cell_points(cell);
    let k = t.dim();
    let weight = cell.mult.unsigned_abs() as f64 * t.cell_volume(cell);
    if k == 0 {
        return Ok(CellMetric {
            weight,
            form: DMatrix::zeros(0, 0),
            finsler: None,
        });
    }
    match &cell.norm {
        None => {
            let e = edge_matrix(&pts);
            let g = e.transpose() * e;
            let form = g
                .try_inverse()
                .ok_or_else(|| Error::DegenerateCell {
                    cell: cell.vertices.clone(),
                    volume: 0.0,
                })?;
            Ok(CellMetric {
                weight,
                form,
                finsler: None,
            })
        }
        Some(id) => {
            let ball = norms.ok_or_else(|| Error::UnknownNorm(id.clone()))?.get(id)?;
            if ball.dim() != k {
                return Err(Error::DimensionMismatch(format!(
                    "norm {id:?} has dimension {}, cell dimension is {k}",
                    ball.dim()
                )));
            }
            let (_, r) = orthonormal_frame(&pts);
            let rinv = r.try_inverse().ok_or_else(|| Error::DegenerateCell {
                cell: cell.vertices.clone(),
                volume: 0.0,
            })?;
            let rinv_t = rinv.transpose();
            let form = &rinv * ball.dual_john_matrix() * &rinv_t;
            Ok(CellMetric {
                weight,
                form,
                finsler: Some((rinv_t, ball)),
            })
        }
    }
}

fn check_function(t: &SimplicialCurrent, f: &[f64]) -> Result<()> {
    if f.len() != t.vertices().len() {
        return Err(Error::InvalidArgument(format!(
            "function has {} values, current has {} vertices",
            f.len(),
            t.vertices().len()
        )));
    }
    if let Some(i) = t.active_vertices().into_iter().find(|&i| !f[i].is_finite()) {
        return Err(Error::InvalidArgument(format!("value at vertex {i} is not finite")));
    }
    Ok(())
}

fn differences(cell: &Cell, f: &[f64]) -> DVector<f64> {
    let f0 = f[cell.vertices[0]];
    DVector::from_iterator(cell.vertices.len() - 1, cell.vertices[1..].iter().map(|&v| f[v] - f0))
}

/// `∫|df|² d‖T‖` with the true (possibly Finsler) dual norm on tagged cells.
pub fn dirichlet_energy(t: &SimplicialCurrent, f: &[f64], norms: Option<&NormRegistry>) -> Result<f64> {
    check_function(t, f)?;
    if t.dim() == 0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for cell in t.cells() {
        let m = cell_metric(t, cell, norms)?;
        let d = differences(cell, f);
        let density = match &m.finsler {
            None => (d.transpose() * &m.form * &d)[(0, 0)],
            Some((rinv_t, ball)) => {
                let xi = rinv_t * &d;
                ball.dual_norm(xi.as_slice()).powi(2)
            }
        };
        total += m.weight * density;
    }
    Ok(total)
}

/// Quadratic comparison energy `fᵀ K f`, equal to the true energy on untagged cells.
pub fn quadratic_energy(t: &SimplicialCurrent, f: &[f64], norms: Option<&NormRegistry>) -> Result<f64> {
    check_function(t, f)?;
    if t.dim() == 0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for cell in t.cells() {
        let m = cell_metric(t, cell, norms)?;
        let d = differences(cell, f);
        total += m.weight * (d.transpose() * &m.form * &d)[(0, 0)];
    }
    Ok(total)
}

/// `∫f d‖T‖`, exact for piecewise-linear `f`.
pub fn integral(t: &SimplicialCurrent, f: &[f64]) -> f64 {
    let k1 = (t.dim() + 1) as f64;
    t.cells()
        .iter()
        .map(|c| {
            let w = c.mult.unsigned_abs() as f64 * t.cell_volume(c);
            w * c.vertices.iter().map(|&v| f[v]).sum::<f64>() / k1
        })
        .sum()
}

/// `∫f² d‖T‖`, exact for piecewise-linear `f`.
pub fn l2_norm_sq(t: &SimplicialCurrent, f: &[f64]) -> f64 {
    let k = t.dim() as f64;
    t.cells()
        .iter()
        .map(|c| {
            let w = c.mult.unsigned_abs() as f64 * t.cell_volume(c);
            let s: f64 = c.vertices.iter().map(|&v| f[v]).sum();
            let sq: f64 = c.vertices.iter().map(|&v| f[v] * f[v]).sum();
            w * (s * s + sq) / ((k + 1.0) * (k + 2.0))
        })
        .sum()
}

/// `E(f) / ∫(f - mean)² d‖T‖`.
pub fn rayleigh_quotient(t: &SimplicialCurrent, f: &[f64], norms: Option<&NormRegistry>) -> Result<f64> {
    check_function(t, f)?;
    let mass = t.mass();
    if mass <= 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let mean = integral(t, f) / mass;
    let g: Vec<f64> = f.iter().map(|x| x - mean).collect();
    let denom = l2_norm_sq(t, &g);
    if denom <= 1e-14 * mass * (1.0 + mean * mean) {
        return Err(Error::ZeroDenominator);
    }
    Ok(dirichlet_energy(t, &g, norms)? / denom)
}

/// Linear-element stiffness (John metric on tagged cells) and consistent mass matrices.
pub fn assemble_pencil(t: &SimplicialCurrent, norms: Option<&NormRegistry>) -> Result<Pencil> {
    let n = t.vertices().len();
    let k = t.dim();
    let mut kt = Vec::new();
    let mut mt = Vec::new();
    let mass_scale = 1.0 / (((k + 1) * (k + 2)) as f64);
    for cell in t.cells() {
        let m = cell_metric(t, cell, norms)?;
        let vs = &cell.vertices;
        for (a, &i) in vs.iter().enumerate() {
            for (b, &j) in vs.iter().enumerate() {
                let delta = if a == b { 2.0 } else { 1.0 };
                mt.push((i, j, m.weight * mass_scale * delta));
            }
        }
        if k == 0 {
            continue;
        }
        // Bᵀ form B with B = [-1 | I] acting on local vertex values
        let mut b = DMatrix::zeros(k, k + 1);
        for r in 0..k {
            b[(r, 0)] = -1.0;
            b[(r, r + 1)] = 1.0;
        }
        let local = b.transpose() * &m.form * &b * m.weight;
        for (a, &i) in vs.iter().enumerate() {
            for (c, &j) in vs.iter().enumerate() {
                kt.push((i, j, local[(a, c)]));
            }
        }
    }
    Ok(Pencil {
        stiffness: CsrMatrix::from_triplets(n, kt),
        mass: CsrMatrix::from_triplets(n, mt),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::current::mesh;

    #[test]
    fn segment_matrices() {
        let t = mesh::segment_chain(1, 1.0);
        let p = assemble_pencil(&t, None).unwrap();
        let k = p.stiffness.to_dense();
        let m = p.mass.to_dense();
        let ek = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let em = DMatrix::from_row_slice(2, 2, &[1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0]);
        assert!((k - ek).norm() < 1e-14);
        assert!((m - em).norm() < 1e-14);
    }

    #[test]
    fn energy_examples() {
        let seg = mesh::segment_chain(1, 1.0);
        let x: Vec<f64> = seg.vertices().points().map(|p| p[0]).collect();
        assert!((dirichlet_energy(&seg, &x, None).unwrap() - 1.0).abs() < 1e-14);
        assert!((rayleigh_quotient(&seg, &x, None).unwrap() - 12.0).abs() < 1e-10);
        let sq = mesh::unit_square().scale(2);
        let x: Vec<f64> = sq.vertices().points().map(|p| p[0]).collect();
        assert!((dirichlet_energy(&sq, &x, None).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(dirichlet_energy(&sq, &[3.0; 4], None).unwrap(), 0.0);
    }

    #[test]
    fn constant_has_zero_denominator() {
        let sq = mesh::unit_square();
        assert!(matches!(rayleigh_quotient(&sq, &[1.0; 4], None), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn pencil_matches_quadratures() {
        let t = mesh::square_patch([0.0, 0.0], [1.0, 2.0], 3).scale(3);
        let p = assemble_pencil(&t, None).unwrap();
        let f: Vec<f64> = t.vertices().points().map(|q| (3.0 * q[0]).sin() + q[1] * q[1]).collect();
        let e = dirichlet_energy(&t, &f, None).unwrap();
        assert!((p.stiffness.quad_form(&f) - e).abs() < 1e-10 * (1.0 + e));
        assert!((p.mass.quad_form(&f) - l2_norm_sq(&t, &f)).abs() < 1e-10);
        let ones = vec![1.0; f.len()];
        assert!(p.stiffness.mul_vec(&ones).iter().all(|v| v.abs() < 1e-12));
        assert!(p.stiffness.is_symmetric(1e-14));
    }

    #[test]
    fn circle_cosine_quotient() {
        let t = mesh::circle_polygon(256, 1.0);
        let f: Vec<f64> = t.vertices().points().map(|p| p[0]).collect();
        let r = rayleigh_quotient(&t, &f, None).unwrap();
        assert!((r - 1.0).abs() < 1e-3);
    }

    #[test]
    fn tagged_cell_needs_registry() {
        let vs = std::sync::Arc::new(
            crate::VertexSet::new(2, vec![vec![0., 0.], vec![1., 0.], vec![0., 1.]]).unwrap(),
        );
        let t = SimplicialCurrent::with_norms(vs, 2, vec![(vec![0, 1, 2], 1, Some("linf".to_string()))]).unwrap();
        assert!(matches!(
            dirichlet_energy(&t, &[0.0, 1.0, 0.0], None),
            Err(Error::UnknownNorm(_))
        ));
        let mut reg = NormRegistry::new();
        reg.insert("linf", NormBall::linf(2));
        // gradient (1, 1) in the frame: ℓ¹ dual norm 2, area 1/2
        let e = dirichlet_energy(&t, &[0.0, 1.0, 1.0], Some(&reg)).unwrap();
        assert!((e - 2.0).abs() < 1e-12);
        let q = quadratic_energy(&t, &[0.0, 1.0, 1.0], Some(&reg)).unwrap();
        assert!(q >= e - 1e-12 && q <= 2.0 * e + 1e-12);
    }
}
