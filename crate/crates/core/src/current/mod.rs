//! Integer-multiplicity oriented simplicial chains in Euclidean space.
//!
//! A [`SimplicialCurrent`] is kept in canonical form at all times: every cell
//! stores its vertex indices in ascending order with the orientation folded
//! into the sign of the multiplicity, cells are sorted lexicographically, no
//! two cells share a vertex set and no multiplicity is zero.

mod clip;
pub mod geometry;
pub mod mesh;
pub mod scm;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use geometry::{is_degenerate, simplex_volume, sort_with_parity};

/// Tolerance used to identify vertices of different currents by their coordinates.
pub const VERTEX_MERGE_TOL: f64 = 1e-12;

/// Points in R^N, indexed `0..len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSet {
    ambient_dim: usize,
    coords: Vec<f64>,
}

impl VertexSet {
    pub fn new(ambient_dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * ambient_dim);
        for (i, p) in points.into_iter().enumerate() {
            if p.len() != ambient_dim {
                return Err(Error::DimensionMismatch(format!(
                    "vertex {i} has {} coordinates, expected {ambient_dim}",
                    p.len()
                )));
            }
            coords.extend(p);
        }
        Self::from_flat(ambient_dim, coords)
    }

    pub fn from_flat(ambient_dim: usize, coords: Vec<f64>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidCurrent("ambient dimension must be positive".into()));
        }
        if coords.len() % ambient_dim != 0 {
            return Err(Error::DimensionMismatch(
                "coordinate count is not a multiple of the ambient dimension".into(),
            ));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidCurrent(format!(
                "vertex {} has a non-finite coordinate",
                pos / ambient_dim
            )));
        }
        Ok(VertexSet { ambient_dim, coords })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.ambient_dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.ambient_dim..(i + 1) * self.ambient_dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks(self.ambient_dim)
    }

    pub(crate) fn flat(&self) -> &[f64] {
        &self.coords
    }
}

/// One oriented cell. `vertices` is ascending; orientation lives in the sign of `mult`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub vertices: Vec<usize>,
    pub mult: i64,
    pub norm: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SimplicialCurrent {
    vertices: Arc<VertexSet>,
    dim: usize,
    cells: Vec<Cell>,
}

impl SimplicialCurrent {
    /// Builds a current from oriented cells (tuple order is orientation).
    pub fn new(
        vertices: Arc<VertexSet>,
        dim: usize,
        cells: impl IntoIterator<Item = (Vec<usize>, i64)>,
    ) -> Result<Self> {
        Self::with_norms(
            vertices,
            dim,
            cells.into_iter().map(|(c, m)| (c, m, None)),
        )
    }

    pub fn with_norms(
        vertices: Arc<VertexSet>,
        dim: usize,
        cells: impl IntoIterator<Item = (Vec<usize>, i64, Option<String>)>,
    ) -> Result<Self> {
        if dim > vertices.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "cell dimension {dim} exceeds ambient dimension {}",
                vertices.ambient_dim()
            )));
        }
        let nv = vertices.len();
        let mut raw = Vec::new();
        for (cell, mult, norm) in cells {
            if cell.len() != dim + 1 {
                return Err(Error::InvalidCurrent(format!(
                    "cell {cell:?} has {} vertices, expected {}",
                    cell.len(),
                    dim + 1
                )));
            }
            if let Some(&bad) = cell.iter().find(|&&v| v >= nv) {
                return Err(Error::InvalidCurrent(format!(
                    "vertex index {bad} out of range (have {nv} vertices)"
                )));
            }
            let pts: Vec<&[f64]> = cell.iter().map(|&v| vertices.point(v)).collect();
            if is_degenerate(&pts) {
                return Err(Error::DegenerateCell {
                    cell,
                    volume: simplex_volume(&pts),
                });
            }
            raw.push((cell, mult, norm));
        }
        Ok(Self::canonicalize(vertices, dim, raw))
    }

    pub fn zero(vertices: Arc<VertexSet>, dim: usize) -> Self {
        SimplicialCurrent {
            vertices,
            dim,
            cells: Vec::new(),
        }
    }

    /// Canonical form without geometric validation. Cells with repeated vertices vanish.
    pub(crate) fn canonicalize(
        vertices: Arc<VertexSet>,
        dim: usize,
        raw: impl IntoIterator<Item = (Vec<usize>, i64, Option<String>)>,
    ) -> Self {
        let mut acc: BTreeMap<Vec<usize>, (i64, Option<String>)> = BTreeMap::new();
        for (mut cell, mult, norm) in raw {
            let sign = sort_with_parity(&mut cell);
            if cell.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            let entry = acc.entry(cell).or_insert((0, None));
            entry.0 += sign * mult;
            if entry.1.is_none() {
                entry.1 = norm;
            }
        }
        let cells = acc
            .into_iter()
            .filter(|(_, (m, _))| *m != 0)
            .map(|(vertices, (mult, norm))| Cell {
                vertices,
                mult,
                norm,
            })
            .collect();
        SimplicialCurrent {
            vertices,
            dim,
            cells,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices.ambient_dim()
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn vertex_arc(&self) -> &Arc<VertexSet> {
        &self.vertices
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn is_zero(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell_points(&self, cell: &Cell) -> Vec<&[f64]> {
        cell.vertices.iter().map(|&v| self.vertices.point(v)).collect()
    }

    pub fn cell_volume(&self, cell: &Cell) -> f64 {
        simplex_volume(&self.cell_points(cell))
    }

    /// Signed multiplicity of the oriented cell `verts` (zero when absent).
    pub fn coefficient(&self, verts: &[usize]) -> i64 {
        let mut key = verts.to_vec();
        let sign = sort_with_parity(&mut key);
        match self.cells.binary_search_by(|c| c.vertices.cmp(&key)) {
            Ok(i) => sign * self.cells[i].mult,
            Err(_) => 0,
        }
    }

    /// Sorted indices of vertices touched by some cell.
    pub fn active_vertices(&self) -> Vec<usize> {
        let mut seen = vec![false; self.vertices.len()];
        for c in &self.cells {
            for &v in &c.vertices {
                seen[v] = true;
            }
        }
        (0..seen.len()).filter(|&i| seen[i]).collect()
    }

    /// Total mass: sum of |mult| times Euclidean k-volume.
    pub fn mass(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| c.mult.unsigned_abs() as f64 * self.cell_volume(c))
            .fold(0.0, |a, b| a + b)
    }

    /// Simplicial boundary, canonical. Norm tags are not inherited.
    pub fn boundary(&self) -> Result<SimplicialCurrent> {
        if self.dim == 0 {
            return Err(Error::ZeroDimBoundary);
        }
        let mut raw = Vec::with_capacity(self.cells.len() * (self.dim + 1));
        for c in &self.cells {
            for i in 0..=self.dim {
                let face: Vec<usize> = c
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, &v)| v)
                    .collect();
                let sign = if i % 2 == 0 { 1 } else { -1 };
                raw.push((face, sign * c.mult, None));
            }
        }
        Ok(Self::canonicalize(self.vertices.clone(), self.dim - 1, raw))
    }

    pub fn scale(&self, s: i64) -> SimplicialCurrent {
        let raw = self
            .cells
            .iter()
            .map(|c| (c.vertices.clone(), c.mult * s, c.norm.clone()));
        Self::canonicalize(self.vertices.clone(), self.dim, raw)
    }

    pub fn neg(&self) -> SimplicialCurrent {
        self.scale(-1)
    }

    /// Chain sum. Vertices of `other` are identified with ours by coordinates.
    pub fn add(&self, other: &SimplicialCurrent) -> Result<SimplicialCurrent> {
        if self.dim != other.dim || self.ambient_dim() != other.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot add a {}-current in R^{} to a {}-current in R^{}",
                other.dim,
                other.ambient_dim(),
                self.dim,
                self.ambient_dim()
            )));
        }
        let (verts, map) = merge_vertex_sets(&self.vertices, &other.vertices);
        let raw = self
            .cells
            .iter()
            .map(|c| (c.vertices.clone(), c.mult, c.norm.clone()))
            .chain(other.cells.iter().map(|c| {
                (
                    c.vertices.iter().map(|&v| map[v]).collect(),
                    c.mult,
                    c.norm.clone(),
                )
            }))
            .collect::<Vec<_>>();
        Ok(Self::canonicalize(verts, self.dim, raw))
    }

    pub fn sub(&self, other: &SimplicialCurrent) -> Result<SimplicialCurrent> {
        self.add(&other.neg())
    }

    /// Push-forward under `x -> A x + b`, with `A` given row-major as `out_dim x N`.
    /// Returns the image and the number of cells dropped because they became degenerate.
    pub fn push_forward_affine(
        &self,
        a: &[f64],
        out_dim: usize,
        b: &[f64],
    ) -> Result<(SimplicialCurrent, usize)> {
        let n = self.ambient_dim();
        if a.len() != out_dim * n || b.len() != out_dim {
            return Err(Error::DimensionMismatch(format!(
                "affine map must be {out_dim}x{n} with offset of length {out_dim}"
            )));
        }
        if self.dim > out_dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot push a {}-current into R^{out_dim}",
                self.dim
            )));
        }
        let mut coords = Vec::with_capacity(self.vertices.len() * out_dim);
        for p in self.vertices.points() {
            for r in 0..out_dim {
                let row = &a[r * n..(r + 1) * n];
                coords.push(row.iter().zip(p).map(|(x, y)| x * y).sum::<f64>() + b[r]);
            }
        }
        let verts = Arc::new(VertexSet::from_flat(out_dim, coords)?);
        let mut dropped = 0;
        let mut raw = Vec::with_capacity(self.cells.len());
        for c in &self.cells {
            let pts: Vec<&[f64]> = c.vertices.iter().map(|&v| verts.point(v)).collect();
            if is_degenerate(&pts) {
                dropped += 1;
                continue;
            }
            raw.push((c.vertices.clone(), c.mult, c.norm.clone()));
        }
        Ok((Self::canonicalize(verts, self.dim, raw), dropped))
    }

    /// Uniform scaling about the origin.
    pub fn scaled(&self, s: f64) -> Result<SimplicialCurrent> {
        let n = self.ambient_dim();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = s;
        }
        Ok(self.push_forward_affine(&a, n, &vec![0.0; n])?.0)
    }

    /// Replace every multiplicity by `f(mult)`, keeping cells and tags.
    pub fn map_mults(&self, f: impl Fn(i64) -> i64) -> SimplicialCurrent {
        let raw = self
            .cells
            .iter()
            .map(|c| (c.vertices.clone(), f(c.mult), c.norm.clone()));
        Self::canonicalize(self.vertices.clone(), self.dim, raw)
    }

    /// Evaluate an affine functional `w(x) = grad . x + offset` at every vertex.
    pub fn affine_values(&self, grad: &[f64], offset: f64) -> Vec<f64> {
        self.vertices
            .points()
            .map(|p| p.iter().zip(grad).map(|(x, g)| x * g).sum::<f64>() + offset)
            .collect()
    }

    /// Equality as chains, identifying vertices by coordinates.
    pub fn chain_eq(&self, other: &SimplicialCurrent) -> bool {
        self.dim == other.dim
            && self.ambient_dim() == other.ambient_dim()
            && self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }
}

/// Union of two vertex sets; returns the merged set and the index map for `b`.
pub(crate) fn merge_vertex_sets(a: &Arc<VertexSet>, b: &Arc<VertexSet>) -> (Arc<VertexSet>, Vec<usize>) {
    if Arc::ptr_eq(a, b) || a.as_ref() == b.as_ref() {
        return (a.clone(), (0..b.len()).collect());
    }
    let n = a.ambient_dim();
    let key = |p: &[f64]| -> Vec<i64> {
        p.iter()
            .map(|x| (x / VERTEX_MERGE_TOL).floor() as i64)
            .collect()
    };
    let mut index: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in a.points().enumerate() {
        index.entry(key(p)).or_default().push(i);
    }
    let mut coords = a.flat().to_vec();
    let mut next = a.len();
    let mut map = Vec::with_capacity(b.len());
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let o = (code % 3) as i64 - 1;
                    code /= 3;
                    o
                })
                .collect()
        })
        .collect();
    for p in b.points() {
        let base = key(p);
        let mut found = None;
        'search: for off in &offsets {
            let k: Vec<i64> = base.iter().zip(off).map(|(x, o)| x + o).collect();
            if let Some(cands) = index.get(&k) {
                for &c in cands {
                    let q = &coords[c * n..(c + 1) * n];
                    if q.iter().zip(p).all(|(x, y)| (x - y).abs() <= VERTEX_MERGE_TOL) {
                        found = Some(c);
                        break 'search;
                    }
                }
            }
        }
        let idx = found.unwrap_or_else(|| {
            coords.extend_from_slice(p);
            index.entry(base).or_default().push(next);
            next += 1;
            next - 1
        });
        map.push(idx);
    }
    let merged = VertexSet {
        ambient_dim: n,
        coords,
    };
    (Arc::new(merged), map)
}
