//! Flat distance between two k-currents inside a shared simplicial complex.
//!
//! The distance is `min M(u) + M(v)` over real chains with `t1 - t2 = u + boundary(v)`,
//! posed as a linear program over split variables `u = u+ - u-`, `v = v+ - v-`.

pub mod simplex;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;

use crate::current::geometry::{simplex_volume, sort_with_parity};
use crate::current::mesh::FreudenthalGrid;
use crate::current::{merge_vertex_sets, SimplicialCurrent, VertexSet};
use crate::error::{Error, Result};
use simplex::{LpScalar, StandardLp};

/// Ambient complex: oriented k-cells and (k+1)-cells (ascending vertex order is the
/// orientation) with the signed incidence of each (k+1)-cell on the k-cells.
#[derive(Debug, Clone)]
pub struct FlatComplex {
    vertices: Arc<VertexSet>,
    k: usize,
    k_cells: Vec<Vec<usize>>,
    k1_cells: Vec<Vec<usize>>,
    /// For each (k+1)-cell: (row, sign) pairs.
    incidence: Vec<Vec<(usize, i64)>>,
    k_index: HashMap<Vec<usize>, usize>,
    k_vol: Vec<f64>,
    k1_vol: Vec<f64>,
}

fn faces(cell: &[usize]) -> impl Iterator<Item = (Vec<usize>, i64)> + '_ {
    (0..cell.len()).map(move |i| {
        let f: Vec<usize> = cell
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, &v)| v)
            .collect();
        (f, if i % 2 == 0 { 1 } else { -1 })
    })
}

impl FlatComplex {
    /// Complex generated by the given (k+1)-cells and all their k-faces, plus any
    /// extra k-cells.
    pub fn new(
        vertices: Arc<VertexSet>,
        k: usize,
        k1_cells: Vec<Vec<usize>>,
        extra_k_cells: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if k + 1 > vertices.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "complex needs (k+1)-cells with k+1 = {} <= ambient {}",
                k + 1,
                vertices.ambient_dim()
            )));
        }
        let mut top: BTreeSet<Vec<usize>> = BTreeSet::new();
        for mut c in k1_cells {
            if c.len() != k + 2 || c.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidCurrent(format!("bad (k+1)-cell {c:?}")));
            }
            sort_with_parity(&mut c);
            top.insert(c);
        }
        let mut low: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in &top {
            for (f, _) in faces(c) {
                low.insert(f);
            }
        }
        for mut c in extra_k_cells {
            if c.len() != k + 1 || c.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidCurrent(format!("bad k-cell {c:?}")));
            }
            sort_with_parity(&mut c);
            low.insert(c);
        }
        let k_cells: Vec<Vec<usize>> = low.into_iter().collect();
        let k1_cells: Vec<Vec<usize>> = top.into_iter().collect();
        let k_index: HashMap<Vec<usize>, usize> =
            k_cells.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let incidence = k1_cells
            .iter()
            .map(|c| faces(c).map(|(f, s)| (k_index[&f], s)).collect())
            .collect();
        let vol = |c: &Vec<usize>| {
            let pts: Vec<&[f64]> = c.iter().map(|&v| vertices.point(v)).collect();
            simplex_volume(&pts)
        };
        let k_vol: Vec<f64> = k_cells.iter().map(vol).collect();
        let k1_vol: Vec<f64> = k1_cells.iter().map(vol).collect();
        if let Some(i) = k_vol.iter().position(|&v| !(v > 0.0)) {
            return Err(Error::DegenerateCell {
                cell: k_cells[i].clone(),
                volume: k_vol[i],
            });
        }
        if let Some(i) = k1_vol.iter().position(|&v| !(v > 0.0)) {
            return Err(Error::DegenerateCell {
                cell: k1_cells[i].clone(),
                volume: k1_vol[i],
            });
        }
        let cx = FlatComplex {
            vertices,
            k,
            k_cells,
            k1_cells,
            incidence,
            k_index,
            k_vol,
            k1_vol,
        };
        if !cx.boundary_squares_to_zero() {
            return Err(Error::InvalidCurrent("composed incidence is not zero".into()));
        }
        Ok(cx)
    }

    /// Complex whose (k+1)-cells are the cells of `t` (multiplicities ignored).
    pub fn from_current(t: &SimplicialCurrent) -> Result<Self> {
        if t.dim() == 0 {
            return Err(Error::InvalidArgument(
                "a complex needs cells of dimension >= 1".into(),
            ));
        }
        let cells = t.cells().iter().map(|c| c.vertices.clone()).collect();
        Self::new(t.vertex_arc().clone(), t.dim() - 1, cells, Vec::new())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertices(&self) -> &Arc<VertexSet> {
        &self.vertices
    }

    pub fn k_cells(&self) -> &[Vec<usize>] {
        &self.k_cells
    }

    pub fn k1_cells(&self) -> &[Vec<usize>] {
        &self.k1_cells
    }

    pub fn incidence(&self) -> &[Vec<(usize, i64)>] {
        &self.incidence
    }

    pub fn k_volumes(&self) -> &[f64] {
        &self.k_vol
    }

    pub fn k1_volumes(&self) -> &[f64] {
        &self.k1_vol
    }

    /// `boundary(boundary(c)) == 0` for every (k+1)-cell, checked through the incidence.
    pub fn boundary_squares_to_zero(&self) -> bool {
        if self.k == 0 {
            return self
                .incidence
                .iter()
                .all(|col| col.iter().map(|&(_, s)| s).sum::<i64>() == 0);
        }
        for col in &self.incidence {
            let mut acc: HashMap<Vec<usize>, i64> = HashMap::new();
            for &(row, s) in col {
                for (f, t) in faces(&self.k_cells[row]) {
                    *acc.entry(f).or_default() += s * t;
                }
            }
            if acc.values().any(|&v| v != 0) {
                return false;
            }
        }
        true
    }

    /// Coefficients of a k-current on `k_cells`, identifying vertices by coordinates.
    pub fn embed(&self, t: &SimplicialCurrent) -> Result<Vec<i64>> {
        if t.dim() != self.k || t.ambient_dim() != self.vertices.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "current of dim {} in R^{} does not fit a complex of k = {} in R^{}",
                t.dim(),
                t.ambient_dim(),
                self.k,
                self.vertices.ambient_dim()
            )));
        }
        let (_, map) = merge_vertex_sets(&self.vertices, t.vertex_arc());
        let mut out = vec![0i64; self.k_cells.len()];
        for c in t.cells() {
            let mut key: Vec<usize> = c.vertices.iter().map(|&v| map[v]).collect();
            let sign = sort_with_parity(&mut key);
            match self.k_index.get(&key) {
                Some(&i) => out[i] += sign * c.mult,
                None => {
                    let coords: Vec<Vec<f64>> = c
                        .vertices
                        .iter()
                        .map(|&v| t.vertices().point(v).to_vec())
                        .collect();
                    return Err(Error::MissingCell(format!("{:?} at {coords:?}", c.vertices)));
                }
            }
        }
        Ok(out)
    }

    /// The chain on `k_cells` given by real coefficients, rounded to integers.
    pub fn chain_to_current(&self, coeffs: &[i64]) -> SimplicialCurrent {
        let raw = self
            .k_cells
            .iter()
            .zip(coeffs)
            .filter(|(_, &m)| m != 0)
            .map(|(c, &m)| (c.clone(), m, None));
        SimplicialCurrent::canonicalize(self.vertices.clone(), self.k, raw.collect::<Vec<_>>())
    }

    /// `boundary(v)` on the k-cells.
    pub fn apply_boundary(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.k_cells.len()];
        for (j, col) in self.incidence.iter().enumerate() {
            if v[j] != 0.0 {
                for &(r, s) in col {
                    out[r] += s as f64 * v[j];
                }
            }
        }
        out
    }

    pub fn mass_k(&self, u: &[f64]) -> f64 {
        u.iter().zip(&self.k_vol).map(|(a, w)| a.abs() * w).sum()
    }

    pub fn mass_k1(&self, v: &[f64]) -> f64 {
        v.iter().zip(&self.k1_vol).map(|(a, w)| a.abs() * w).sum()
    }
}

/// Freudenthal-triangulated box with every (k+1)-face as a cell.
pub fn grid_complex(lo: &[f64], hi: &[f64], resolution: &[usize], k: usize) -> Result<FlatComplex> {
    let grid = FreudenthalGrid::new(lo.to_vec(), hi.to_vec(), resolution.to_vec())?;
    let n = grid.dim();
    if k + 1 > n {
        return Err(Error::DimensionMismatch(format!(
            "k + 1 = {} exceeds the grid dimension {n}",
            k + 1
        )));
    }
    let verts = Arc::new(grid.vertex_set());
    let mut cells: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (simplex, _) in grid.simplices() {
        for subset in subsets(simplex.len(), k + 2) {
            let mut c: Vec<usize> = subset.iter().map(|&i| simplex[i]).collect();
            c.sort_unstable();
            cells.insert(c);
        }
    }
    FlatComplex::new(verts, k, cells.into_iter().collect(), Vec::new())
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// Integral decomposition obtained by rounding the LP's `v` and solving for `u`.
#[derive(Debug, Clone, Serialize)]
pub struct RoundingWitness {
    pub value: f64,
    pub u: Vec<i64>,
    pub v: Vec<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlatNormCertificate {
    pub value: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Some coefficient of `u` or `v` is not an integer.
    pub fractional: bool,
    pub exact: bool,
    pub rounding: RoundingWitness,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FlatOptions {
    /// Solve in exact rational arithmetic (desk-scale instances only).
    pub exact: bool,
    pub max_pivots: Option<usize>,
}

/// Flat distance `d(t1, t2)` inside `complex`.
pub fn flat_distance(
    t1: &SimplicialCurrent,
    t2: &SimplicialCurrent,
    complex: &FlatComplex,
    opts: FlatOptions,
) -> Result<FlatNormCertificate> {
    let d1 = complex.embed(t1)?;
    let d2 = complex.embed(t2)?;
    let d: Vec<i64> = d1.iter().zip(&d2).map(|(a, b)| a - b).collect();
    flat_norm_of_chain(&d, complex, opts)
}

/// Flat norm of an integer chain given by its coefficients on `complex.k_cells()`.
pub fn flat_norm_of_chain(d: &[i64], complex: &FlatComplex, opts: FlatOptions) -> Result<FlatNormCertificate> {
    let m = complex.k_cells.len();
    let p = complex.k1_cells.len();
    if d.len() != m {
        return Err(Error::DimensionMismatch("chain length differs from k-cell count".into()));
    }
    let max_pivots = opts.max_pivots.unwrap_or(50 * (m + p) + 1000);
    let (u, v, pivots) = if opts.exact {
        solve_lp::<BigRational>(d, complex, max_pivots)?
    } else {
        solve_lp::<f64>(d, complex, max_pivots)?
    };
    let value = complex.mass_k(&u) + complex.mass_k1(&v);
    let is_int = |x: &f64| (x - x.round()).abs() <= 1e-9;
    let fractional = !(u.iter().all(is_int) && v.iter().all(is_int));

    let vr: Vec<i64> = v.iter().map(|x| x.round() as i64).collect();
    let dv = complex.apply_boundary(&vr.iter().map(|&x| x as f64).collect::<Vec<_>>());
    let ur: Vec<i64> = d.iter().zip(&dv).map(|(a, b)| a - b.round() as i64).collect();
    let rounding = RoundingWitness {
        value: complex.mass_k(&ur.iter().map(|&x| x as f64).collect::<Vec<_>>())
            + complex.mass_k1(&vr.iter().map(|&x| x as f64).collect::<Vec<_>>()),
        u: ur,
        v: vr,
    };
    Ok(FlatNormCertificate {
        value,
        u,
        v,
        fractional,
        exact: opts.exact,
        rounding,
        pivots,
    })
}

fn solve_lp<T: LpScalar>(d: &[i64], cx: &FlatComplex, max_pivots: usize) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let m = cx.k_cells.len();
    let p = cx.k1_cells.len();
    let n = 2 * m + 2 * p;
    let mut a = vec![vec![T::zero(); n]; m];
    let one = T::from_f64(1.0);
    for (r, row) in a.iter_mut().enumerate() {
        row[r] = one.clone();
        row[m + r] = -one.clone();
    }
    for (j, col) in cx.incidence.iter().enumerate() {
        for &(r, s) in col {
            a[r][2 * m + j] = T::from_f64(s as f64);
            a[r][2 * m + p + j] = T::from_f64(-s as f64);
        }
    }
    let mut b = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for r in 0..m {
        if d[r] < 0 {
            for x in a[r].iter_mut() {
                *x = -x.clone();
            }
            b.push(T::from_f64(-d[r] as f64));
            basis.push(m + r);
        } else {
            b.push(T::from_f64(d[r] as f64));
            basis.push(r);
        }
    }
    let c: Vec<T> = cx
        .k_vol
        .iter()
        .chain(&cx.k_vol)
        .chain(&cx.k1_vol)
        .chain(&cx.k1_vol)
        .map(|&w| T::from_f64(w))
        .collect();
    let sol = StandardLp { a, b, c }.solve(basis, max_pivots)?;
    let x: Vec<f64> = sol.x.iter().map(|v| v.to_f64()).collect();
    let u = (0..m).map(|i| x[i] - x[m + i]).collect();
    let v = (0..p).map(|j| x[2 * m + j] - x[2 * m + p + j]).collect();
    Ok((u, v, sol.pivots))
}

/// Both certificate invariants: `t1 - t2 = u + boundary(v)` coefficientwise and
/// `value = M(u) + M(v)`, each within `1e-9`.
pub fn verify_certificate(
    cert: &FlatNormCertificate,
    t1: &SimplicialCurrent,
    t2: &SimplicialCurrent,
    complex: &FlatComplex,
) -> bool {
    let (Ok(d1), Ok(d2)) = (complex.embed(t1), complex.embed(t2)) else {
        return false;
    };
    if cert.u.len() != complex.k_cells.len() || cert.v.len() != complex.k1_cells.len() {
        return false;
    }
    let dv = complex.apply_boundary(&cert.v);
    let ok_chain = d1
        .iter()
        .zip(&d2)
        .zip(cert.u.iter().zip(&dv))
        .all(|((a, b), (u, w))| ((a - b) as f64 - u - w).abs() <= 1e-9);
    let mass = complex.mass_k(&cert.u) + complex.mass_k1(&cert.v);
    ok_chain && (mass - cert.value).abs() <= 1e-9 && cert.value >= -1e-12
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::current::mesh;

    fn segment_at(height: f64, complex: &FlatComplex) -> SimplicialCurrent {
        let v = Arc::new(
            VertexSet::new(2, vec![vec![0.0, height], vec![1.0, height]]).unwrap(),
        );
        let s = SimplicialCurrent::new(v, 1, vec![(vec![0, 1], 1)]).unwrap();
        complex.embed(&s).unwrap();
        s
    }

    #[test]
    fn freudenthal_unit_square_counts() {
        let cx = grid_complex(&[0.0, 0.0], &[1.0, 1.0], &[1, 1], 1).unwrap();
        assert_eq!(cx.k1_cells().len(), 2);
        assert_eq!(cx.k_cells().len(), 5);
        assert_eq!(cx.vertices().len(), 4);
    }

    #[test]
    fn boundary_squared_zero_in_r3() {
        for k in 0..3 {
            let cx = grid_complex(&[0.0; 3], &[1.0; 3], &[4, 4, 4], k).unwrap();
            assert!(cx.boundary_squares_to_zero());
        }
        assert!(grid_complex(&[0.0; 2], &[1.0; 2], &[2, 2], 2).is_err());
    }

    #[test]
    fn identical_currents_have_zero_distance() {
        let cx = grid_complex(&[0.0, 0.0], &[1.0, 1.0], &[1, 1], 1).unwrap();
        let a = segment_at(0.0, &cx);
        let c = flat_distance(&a, &a, &cx, FlatOptions::default()).unwrap();
        assert_eq!(c.value, 0.0);
        assert!(c.u.iter().all(|&x| x == 0.0) && c.v.iter().all(|&x| x == 0.0));
        assert!(verify_certificate(&c, &a, &a, &cx));
    }

    #[test]
    fn parallel_segments() {
        for (t, want) in [(0.1, 0.3), (1.0, 2.0)] {
            let cx = grid_complex(&[0.0, 0.0], &[1.0, t], &[1, 1], 1).unwrap();
            let (a, b) = (segment_at(0.0, &cx), segment_at(t, &cx));
            for exact in [false, true] {
                let c = flat_distance(&a, &b, &cx, FlatOptions { exact, ..Default::default() }).unwrap();
                assert!((c.value - want).abs() < 1e-6, "t={t} exact={exact}: {}", c.value);
                assert!(verify_certificate(&c, &a, &b, &cx));
                assert!(!c.fractional);
            }
        }
    }

    #[test]
    fn tampered_certificate_fails() {
        let cx = grid_complex(&[0.0, 0.0], &[1.0, 0.1], &[1, 1], 1).unwrap();
        let (a, b) = (segment_at(0.0, &cx), segment_at(0.1, &cx));
        let mut c = flat_distance(&a, &b, &cx, FlatOptions::default()).unwrap();
        c.v[0] += 1.0;
        assert!(!verify_certificate(&c, &a, &b, &cx));
    }

    #[test]
    fn trivial_decomposition_is_feasible() {
        let cx = grid_complex(&[0.0, 0.0], &[1.0, 0.5], &[1, 1], 1).unwrap();
        let (a, b) = (segment_at(0.0, &cx), segment_at(0.5, &cx));
        let d: Vec<f64> = cx
            .embed(&a)
            .unwrap()
            .iter()
            .zip(cx.embed(&b).unwrap())
            .map(|(x, y)| (x - y) as f64)
            .collect();
        let value = cx.mass_k(&d);
        let cert = FlatNormCertificate {
            value,
            u: d.clone(),
            v: vec![0.0; cx.k1_cells().len()],
            fractional: false,
            exact: false,
            rounding: RoundingWitness { value, u: vec![], v: vec![] },
            pivots: 0,
        };
        assert!(verify_certificate(&cert, &a, &b, &cx));
        assert!((value - a.sub(&b).unwrap().mass()).abs() < 1e-12);
    }

    #[test]
    fn missing_cell_is_named() {
        let cx = grid_complex(&[0.0, 0.0], &[1.0, 1.0], &[1, 1], 1).unwrap();
        let v = Arc::new(VertexSet::new(2, vec![vec![0.0, 0.0], vec![0.5, 0.0]]).unwrap());
        let s = SimplicialCurrent::new(v, 1, vec![(vec![0, 1], 1)]).unwrap();
        let err = flat_distance(&s, &s, &cx, FlatOptions::default()).unwrap_err();
        assert!(err.to_string().contains("not part of the complex"));
    }

    #[test]
    fn polygon_fill_in_disk() {
        // coarse 8-gon: filling (area) beats keeping (perimeter)
        for n in [8usize, 64] {
            let poly = mesh::circle_polygon(n, 1.0);
            let mut pts = vec![vec![0.0, 0.0]];
            pts.extend(poly.vertices().points().map(|p| p.to_vec()));
            let verts = Arc::new(VertexSet::new(2, pts).unwrap());
            let tris = (0..n).map(|i| vec![0, 1 + i, 1 + (i + 1) % n]).collect();
            let cx = FlatComplex::new(verts.clone(), 1, tris, Vec::new()).unwrap();
            let zero = SimplicialCurrent::zero(poly.vertex_arc().clone(), 1);
            let c = flat_distance(&poly, &zero, &cx, FlatOptions::default()).unwrap();
            let area = 0.5 * n as f64 * (2.0 * std::f64::consts::PI / n as f64).sin();
            assert!((c.value - area.min(poly.mass())).abs() < 1e-9);
            if n == 64 {
                assert!((c.value - std::f64::consts::PI).abs() / std::f64::consts::PI < 0.02);
            }
        }
    }
}
