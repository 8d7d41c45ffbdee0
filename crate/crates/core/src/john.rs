//! Centrally symmetric polytopal norm balls and their John ellipsoids.
//!
//! A ball is given by generators (its vertices up to redundancy). The dual ball's
//! generators are the facet normals, found by brute-force enumeration. The
//! maximal inscribed ellipsoid of a symmetric body is the polar of the minimal
//! enclosing ellipsoid of its polar, which Khachiyan's iteration computes from points.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SAME_POINT: f64 = 1e-12;
const FACET_SLACK: f64 = 1e-9;
pub const MVEE_TOL: f64 = 1e-8;
pub const MVEE_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone)]
pub struct NormBall {
    dim: usize,
    generators: Vec<DVector<f64>>,
    facets: Vec<DVector<f64>>,
    john_q: DMatrix<f64>,
    dual_john_q: DMatrix<f64>,
}

impl NormBall {
    /// Builds the ball `conv(±generators)`; missing negatives are added.
    pub fn new(dim: usize, generators: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DegenerateBall("dimension must be positive".into()));
        }
        let mut gens: Vec<DVector<f64>> = Vec::new();
        for g in generators {
            if g.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "generator has {} coordinates, ball dimension is {dim}",
                    g.len()
                )));
            }
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::DegenerateBall("non-finite generator".into()));
            }
            let v = DVector::from_vec(g);
            if v.norm() <= SAME_POINT {
                continue;
            }
            for w in [v.clone(), -v] {
                if !gens.iter().any(|u| (u - &w).norm() <= SAME_POINT) {
                    gens.push(w);
                }
            }
        }
        let span = DMatrix::from_columns(&gens);
        if gens.is_empty() || span.rank(1e-10) < dim {
            return Err(Error::DegenerateBall(format!(
                "generators do not span R^{dim}"
            )));
        }
        let facets = facet_normals(dim, &gens)?;
        let a = mvee_centered(&facets, None)?;
        let john_q = a
            .try_inverse()
            .ok_or_else(|| Error::DegenerateBall("dual ellipsoid is singular".into()))?;
        let p = mvee_centered(&gens, None)?;
        let dual_john_q = p
            .try_inverse()
            .ok_or_else(|| Error::DegenerateBall("enclosing ellipsoid is singular".into()))?;
        Ok(NormBall {
            dim,
            generators: gens,
            facets,
            john_q,
            dual_john_q,
        })
    }

    /// The ℓ∞ unit ball (cube vertices).
    pub fn linf(dim: usize) -> Self {
        let gens = (0..1usize << dim)
            .map(|mask| {
                (0..dim)
                    .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
                    .collect()
            })
            .collect();
        Self::new(dim, gens).expect("cube is a valid ball")
    }

    /// The ℓ¹ unit ball (cross-polytope).
    pub fn l1(dim: usize) -> Self {
        let gens = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(dim, gens).expect("cross-polytope is a valid ball")
    }

    /// Regular polygon with `m` vertices on the unit circle (`m` even keeps it symmetric).
    pub fn polygon(m: usize) -> Result<Self> {
        let gens = (0..m)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        Self::new(2, gens)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[DVector<f64>] {
        &self.generators
    }

    /// Facet normals `a` with the ball equal to `{v : |<a,v>| <= 1}`.
    pub fn dual_generators(&self) -> &[DVector<f64>] {
        &self.facets
    }

    /// Matrix `Q` of the maximal inscribed ellipsoid `{v : vᵀQv <= 1}`.
    pub fn john_matrix(&self) -> &DMatrix<f64> {
        &self.john_q
    }

    /// John matrix of the dual ball, used for quadratic comparison energies.
    pub fn dual_john_matrix(&self) -> &DMatrix<f64> {
        &self.dual_john_q
    }

    /// Recomputes the John matrix starting Khachiyan from random weights.
    pub fn john_matrix_from_seed(&self, seed: u64) -> Result<DMatrix<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..self.facets.len()).map(|_| rng.gen_range(0.1..1.0)).collect();
        mvee_centered(&self.facets, Some(&w))?
            .try_inverse()
            .ok_or_else(|| Error::DegenerateBall("dual ellipsoid is singular".into()))
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        norm_eval(self, v)
    }

    pub fn dual_norm(&self, xi: &[f64]) -> f64 {
        dual_norm_eval(self, xi)
    }

    pub fn john_norm(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        (v.transpose() * &self.john_q * &v)[(0, 0)].max(0.0).sqrt()
    }
}

/// Gauge of `v` with respect to the ball.
pub fn norm_eval(ball: &NormBall, v: &[f64]) -> f64 {
    assert_eq!(v.len(), ball.dim, "vector dimension differs from ball dimension");
    ball.facets
        .iter()
        .map(|a| a.iter().zip(v).map(|(x, y)| x * y).sum::<f64>().abs())
        .fold(0.0, f64::max)
}

/// Dual norm: the support function `max_g <ξ, g>`.
pub fn dual_norm_eval(ball: &NormBall, xi: &[f64]) -> f64 {
    assert_eq!(xi.len(), ball.dim, "covector dimension differs from ball dimension");
    ball.generators
        .iter()
        .map(|g| g.iter().zip(xi).map(|(x, y)| x * y).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Facet normals of a symmetric polytope from its generators.
fn facet_normals(dim: usize, gens: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    let mut facets: Vec<DVector<f64>> = Vec::new();
    let mut subset: Vec<usize> = (0..dim).collect();
    let m = gens.len();
    if m < dim {
        return Err(Error::DegenerateBall("too few generators".into()));
    }
    loop {
        let rows: Vec<_> = subset.iter().map(|&i| gens[i].transpose()).collect();
        let mat = DMatrix::from_rows(&rows);
        if let Some(inv) = mat.clone().try_inverse() {
            if (&mat * &inv - DMatrix::identity(dim, dim)).norm() < 1e-9 {
                let a = inv * DVector::from_element(dim, 1.0);
                let outside = gens.iter().any(|g| a.dot(g).abs() > 1.0 + FACET_SLACK);
                if !outside && !facets.iter().any(|f| (f - &a).norm() <= 1e-9 * (1.0 + a.norm())) {
                    facets.push(a);
                }
            }
        }
        // next combination in lexicographic order
        let mut i = dim;
        loop {
            if i == 0 {
                return finish(facets);
            }
            i -= 1;
            if subset[i] < m - dim + i {
                break;
            }
        }
        subset[i] += 1;
        for j in i + 1..dim {
            subset[j] = subset[j - 1] + 1;
        }
    }

    fn finish(facets: Vec<DVector<f64>>) -> Result<Vec<DVector<f64>>> {
        if facets.is_empty() {
            Err(Error::DegenerateBall("no facets found".into()))
        } else {
            Ok(facets)
        }
    }
}

/// Minimal-volume origin-centred ellipsoid `{x : xᵀAx <= 1}` enclosing symmetric `points`.
///
/// Khachiyan's iteration with Todd–Yildirim away steps; the result is rescaled so
/// every point is enclosed exactly.
pub fn mvee_centered(points: &[DVector<f64>], init: Option<&[f64]>) -> Result<DMatrix<f64>> {
    let m = points.len();
    let Some(n) = points.first().map(|p| p.len()) else {
        return Err(Error::DegenerateBall("no points".into()));
    };
    let nf = n as f64;
    let mut u: Vec<f64> = match init {
        Some(w) if w.len() == m && w.iter().all(|x| *x > 0.0) => {
            let s: f64 = w.iter().sum();
            w.iter().map(|x| x / s).collect()
        }
        _ => vec![1.0 / m as f64; m],
    };
    let mut xinv = DMatrix::zeros(n, n);
    for _ in 0..MVEE_MAX_ITER {
        let x = moment(points, &u, n);
        xinv = x
            .try_inverse()
            .ok_or_else(|| Error::DegenerateBall("points are not full-dimensional".into()))?;
        let mh: Vec<f64> = points.iter().map(|p| p.dot(&(&xinv * p))).collect();
        let (j, &mj) = mh
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        let (k, &mk) = mh
            .iter()
            .enumerate()
            .filter(|(i, _)| u[*i] > 0.0)
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("some weight positive");
        if mj <= nf * (1.0 + MVEE_TOL) && mk >= nf * (1.0 - MVEE_TOL) {
            break;
        }
        if mj - nf >= nf - mk {
            let step = (mj - nf) / (nf * (mj - 1.0));
            for w in &mut u {
                *w *= 1.0 - step;
            }
            u[j] += step;
        } else {
            let mut step = (mk - nf) / (nf * (mk - 1.0));
            let floor = -u[k] / (1.0 - u[k]);
            let drop = step <= floor;
            if drop {
                step = floor;
            }
            for w in &mut u {
                *w *= 1.0 - step;
            }
            u[k] += step;
            if drop {
                u[k] = 0.0;
            }
        }
    }
    let a = xinv / nf;
    let worst = points.iter().map(|p| p.dot(&(&a * p))).fold(0.0, f64::max);
    Ok(a / worst)
}

fn moment(points: &[DVector<f64>], u: &[f64], n: usize) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(n, n);
    for (p, &w) in points.iter().zip(u) {
        if w > 0.0 {
            x += w * p * p.transpose();
        }
    }
    x
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BallSpec {
    dim: usize,
    generators: Vec<Vec<f64>>,
}

/// Norm balls keyed by the ids used in SCM `norm <id>` tags.
#[derive(Debug, Clone, Default)]
pub struct NormRegistry {
    balls: BTreeMap<String, NormBall>,
}

impl NormRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: impl Into<String>, ball: NormBall) {
        self.balls.insert(id.into(), ball);
    }

    pub fn get(&self, id: &str) -> Result<&NormBall> {
        self.balls.get(id).ok_or_else(|| Error::UnknownNorm(id.to_string()))
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.balls.keys().map(String::as_str)
    }

    /// Parses `{id: {dim, generators: [[...], ...]}}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let specs: BTreeMap<String, BallSpec> = serde_json::from_str(text)?;
        let mut reg = Self::new();
        for (id, s) in specs {
            let ball = NormBall::new(s.dim, s.generators)
                .map_err(|e| Error::DegenerateBall(format!("{id}: {e}")))?;
            reg.insert(id, ball);
        }
        Ok(reg)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn square_gives_identity() {
        let b = NormBall::linf(2);
        assert_eq!(b.dual_generators().len(), 4);
        assert!(close(b.john_matrix(), &DMatrix::identity(2, 2), 1e-6));
    }

    #[test]
    fn cross_polytope_gives_two_identity() {
        let b = NormBall::l1(2);
        assert!(close(b.john_matrix(), &(DMatrix::identity(2, 2) * 2.0), 1e-6));
    }

    #[test]
    fn fine_polygon_is_nearly_round() {
        let b = NormBall::polygon(128).unwrap();
        assert!(close(b.john_matrix(), &DMatrix::identity(2, 2), 1e-3));
    }

    #[test]
    fn norm_examples() {
        let b = NormBall::linf(2);
        assert!((norm_eval(&b, &[1.0, 1.0]) - 1.0).abs() < 1e-12);
        assert!((dual_norm_eval(&b, &[1.0, 1.0]) - 2.0).abs() < 1e-12);
        assert!((norm_eval(&b, &[0.5, -2.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cube_in_three_dimensions() {
        let b = NormBall::linf(3);
        assert_eq!(b.dual_generators().len(), 6);
        assert!(close(b.john_matrix(), &DMatrix::identity(3, 3), 1e-6));
        // dual ball is the octahedron, whose John matrix is 3I
        assert!(close(b.dual_john_matrix(), &(DMatrix::identity(3, 3) * 3.0), 1e-6));
    }

    #[test]
    fn seeded_restarts_agree() {
        let b = NormBall::new(2, vec![vec![1.0, 0.2], vec![0.3, 1.0], vec![-0.7, 0.8]]).unwrap();
        let q0 = b.john_matrix().clone();
        for seed in 0..5 {
            assert!(close(&b.john_matrix_from_seed(seed).unwrap(), &q0, 1e-6));
        }
    }

    #[test]
    fn degenerate_ball_rejected() {
        assert!(NormBall::new(2, vec![vec![1.0, 1.0], vec![2.0, 2.0]]).is_err());
    }

    #[test]
    fn registry_round_trip() {
        let reg = NormRegistry::from_json(r#"{"linf": {"dim": 2, "generators": [[1,1],[1,-1]]}}"#).unwrap();
        let b = reg.get("linf").unwrap();
        assert_eq!(b.generators().len(), 4);
        assert!(matches!(reg.get("nope"), Err(Error::UnknownNorm(_))));
    }
}
