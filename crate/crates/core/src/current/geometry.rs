//! Small dense helpers for simplices embedded in R^N.

use nalgebra::{DMatrix, DVector};

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Edge vectors `p_i - p_0` as columns of an N x k matrix.
pub fn edge_matrix(points: &[&[f64]]) -> DMatrix<f64> {
    let n = points[0].len();
    let k = points.len() - 1;
    DMatrix::from_fn(n, k, |r, c| points[c + 1][r] - points[0][r])
}

/// Gram matrix `E^T E` of the edge vectors.
pub fn gram(points: &[&[f64]]) -> DMatrix<f64> {
    let e = edge_matrix(points);
    e.transpose() * e
}

/// k-dimensional Euclidean volume of the simplex spanned by `points` (k = len - 1).
pub fn simplex_volume(points: &[&[f64]]) -> f64 {
    let k = points.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let det = gram(points).determinant();
    if det <= 0.0 {
        return 0.0;
    }
    det.sqrt() / factorial(k)
}

/// Longest edge of a simplex; zero for a point.
pub fn max_edge(points: &[&[f64]]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.max(dist(points[i], points[j]));
        }
    }
    best
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Volume test relative to the cell's own length scale.
pub fn is_degenerate(points: &[&[f64]]) -> bool {
    let k = points.len() - 1;
    if k == 0 {
        return false;
    }
    let scale = max_edge(points);
    if scale == 0.0 {
        return true;
    }
    simplex_volume(points) <= 1e-12 * scale.powi(k as i32)
}

/// Modified Gram-Schmidt on the edge vectors: `E = F R` with `F` orthonormal (N x k)
/// and `R` upper triangular with positive diagonal.
pub fn orthonormal_frame(points: &[&[f64]]) -> (DMatrix<f64>, DMatrix<f64>) {
    let e = edge_matrix(points);
    let (n, k) = e.shape();
    let mut f = DMatrix::zeros(n, k);
    let mut r = DMatrix::zeros(k, k);
    for j in 0..k {
        let mut v: DVector<f64> = e.column(j).into_owned();
        for i in 0..j {
            let q = f.column(i);
            let c = q.dot(&v);
            r[(i, j)] = c;
            v -= q * c;
        }
        let norm = v.norm();
        r[(j, j)] = norm;
        f.set_column(j, &(v / norm));
    }
    (f, r)
}

/// Sign of the orientation of `piece` relative to `parent` when both are k-simplices
/// lying in the same affine k-plane.
pub fn relative_orientation(parent: &[&[f64]], piece: &[&[f64]]) -> f64 {
    let k = parent.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let e = edge_matrix(parent);
    let g = e.transpose() * &e;
    let p = edge_matrix(piece);
    let rhs = e.transpose() * p;
    let coords = g.lu().solve(&rhs).expect("parent cell is nondegenerate");
    coords.determinant().signum()
}

/// Euclidean distance from `x` to the simplex spanned by `points`.
pub fn point_simplex_distance(x: &[f64], points: &[&[f64]]) -> f64 {
    let k = points.len() - 1;
    if k == 0 {
        return dist(x, points[0]);
    }
    let e = edge_matrix(points);
    let g = e.transpose() * &e;
    let d = DVector::from_iterator(x.len(), x.iter().zip(points[0]).map(|(a, b)| a - b));
    if let Some(a) = g.clone().lu().solve(&(e.transpose() * &d)) {
        let a0 = 1.0 - a.sum();
        if a0 >= -1e-14 && a.iter().all(|&c| c >= -1e-14) {
            let proj = &e * &a;
            return (d - proj).norm();
        }
    }
    (0..points.len())
        .map(|drop| {
            let sub: Vec<&[f64]> = points
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop)
                .map(|(_, p)| *p)
                .collect();
            point_simplex_distance(x, &sub)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Permutation parity of sorting `v` ascending (+1 even, -1 odd). `v` must have no repeats.
pub fn sort_with_parity(v: &mut [usize]) -> i64 {
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    sign
}
