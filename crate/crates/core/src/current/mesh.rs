//! Builders for the meshes used throughout: polygons, Freudenthal grids,
//! icospheres, surfaces of revolution, polar disks and voxel boundaries.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use super::{SimplicialCurrent, VertexSet};
use crate::error::{Error, Result};

fn build(ambient: usize, coords: Vec<f64>, dim: usize, cells: Vec<(Vec<usize>, i64)>) -> SimplicialCurrent {
    let v = Arc::new(VertexSet::from_flat(ambient, coords).expect("finite mesh coordinates"));
    SimplicialCurrent::new(v, dim, cells).expect("mesh builder produced a valid current")
}

/// Unit square `[0,1]^2` as two positively oriented triangles.
pub fn unit_square() -> SimplicialCurrent {
    build(
        2,
        vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0],
        2,
        vec![(vec![0, 1, 2], 1), (vec![0, 2, 3], 1)],
    )
}

/// Closed regular n-gon of the given radius in the plane, counterclockwise.
pub fn circle_polygon(n: usize, radius: f64) -> SimplicialCurrent {
    let mut coords = Vec::with_capacity(2 * n);
    for i in 0..n {
        let a = 2.0 * PI * i as f64 / n as f64;
        coords.push(radius * a.cos());
        coords.push(radius * a.sin());
    }
    let cells = (0..n).map(|i| (vec![i, (i + 1) % n], 1)).collect();
    build(2, coords, 1, cells)
}

/// `[0, length]` in R^1 split into `n` equal elements.
pub fn segment_chain(n: usize, length: f64) -> SimplicialCurrent {
    let coords = (0..=n).map(|i| length * i as f64 / n as f64).collect();
    let cells = (0..n).map(|i| (vec![i, i + 1], 1)).collect();
    build(1, coords, 1, cells)
}

/// Axis-aligned box `[lo, hi]` split into `res[d]` cells per axis, every cube cut into
/// `n!` simplices along monotone lattice paths (Freudenthal / Kuhn triangulation).
#[derive(Debug, Clone)]
pub struct FreudenthalGrid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub res: Vec<usize>,
}

impl FreudenthalGrid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, res: Vec<usize>) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() != res.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch("grid bounds and resolution disagree".into()));
        }
        if res.iter().any(|&r| r == 0) {
            return Err(Error::InvalidArgument("resolution must be at least 1".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(b > a)) {
            return Err(Error::InvalidArgument("grid bounds must satisfy lo < hi".into()));
        }
        Ok(FreudenthalGrid { lo, hi, res })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn node_index(&self, idx: &[usize]) -> usize {
        let mut out = 0;
        for d in 0..self.dim() {
            out = out * (self.res[d] + 1) + idx[d];
        }
        out
    }

    pub fn vertex_set(&self) -> VertexSet {
        let n = self.dim();
        let total: usize = self.res.iter().map(|r| r + 1).product();
        let mut coords = Vec::with_capacity(total * n);
        let mut idx = vec![0usize; n];
        for _ in 0..total {
            for d in 0..n {
                let s = idx[d] as f64 / self.res[d] as f64;
                coords.push(self.lo[d] + s * (self.hi[d] - self.lo[d]));
            }
            for d in (0..n).rev() {
                idx[d] += 1;
                if idx[d] <= self.res[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        VertexSet::from_flat(n, coords).expect("finite grid")
    }

    /// Top-dimensional simplices with the sign that makes each positively oriented.
    pub fn simplices(&self) -> Vec<(Vec<usize>, i64)> {
        let n = self.dim();
        let perms = permutations(n);
        let mut out = Vec::new();
        let mut cube = vec![0usize; n];
        let cubes: usize = self.res.iter().product();
        for _ in 0..cubes {
            for (perm, sign) in &perms {
                let mut p = cube.clone();
                let mut s = vec![self.node_index(&p)];
                for &axis in perm {
                    p[axis] += 1;
                    s.push(self.node_index(&p));
                }
                out.push((s, *sign));
            }
            for d in (0..n).rev() {
                cube[d] += 1;
                if cube[d] < self.res[d] {
                    break;
                }
                cube[d] = 0;
            }
        }
        out
    }

    /// The whole box as an n-current with multiplicity one.
    pub fn current(&self) -> SimplicialCurrent {
        let v = Arc::new(self.vertex_set());
        SimplicialCurrent::new(v, self.dim(), self.simplices()).expect("valid grid")
    }
}

/// All permutations of `0..n` with their signs.
pub(crate) fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out.into_iter()
        .map(|p| {
            let mut q = p.clone();
            let sign = super::geometry::sort_with_parity(&mut q);
            (p, sign)
        })
        .collect()
}

/// `[origin, origin + side]^n` at resolution `res`, as an n-current in R^n.
pub fn box_current(n: usize, res: usize, origin: &[f64], side: f64) -> SimplicialCurrent {
    let lo = origin.to_vec();
    let hi = origin.iter().map(|o| o + side).collect();
    FreudenthalGrid::new(lo, hi, vec![res; n]).expect("valid box").current()
}

/// Square patch `[lo0,hi0] x [lo1,hi1]` at `res x res`, as a 2-current in R^2.
pub fn square_patch(lo: [f64; 2], hi: [f64; 2], res: usize) -> SimplicialCurrent {
    FreudenthalGrid::new(lo.to_vec(), hi.to_vec(), vec![res, res])
        .expect("valid patch")
        .current()
}

/// Subdivided icosahedron projected to the unit sphere, outward oriented.
/// Level `l` has `20 * 4^l` triangles.
pub fn icosphere(level: usize) -> SimplicialCurrent {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let normalize = |p: [f64; 3]| {
        let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        [p[0] / n, p[1] / n, p[2] / n]
    };
    for p in pts.iter_mut() {
        *p = normalize(*p);
    }
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut mid = |a: usize, b: usize, pts: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let (p, q) = (pts[a], pts[b]);
                pts.push(normalize([
                    0.5 * (p[0] + q[0]),
                    0.5 * (p[1] + q[1]),
                    0.5 * (p[2] + q[2]),
                ]));
                pts.len() - 1
            })
        };
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut pts);
            let bc = mid(b, c, &mut pts);
            let ca = mid(c, a, &mut pts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let det = |a: [f64; 3], b: [f64; 3], c: [f64; 3]| {
        a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0])
    };
    let cells = faces
        .iter()
        .map(|&[a, b, c]| {
            let s = if det(pts[a], pts[b], pts[c]) > 0.0 { 1 } else { -1 };
            (vec![a, b, c], s)
        })
        .collect();
    build(3, pts.concat(), 2, cells)
}

/// Revolve the profile `y = h(x)` about the x-axis with `m` angular steps.
/// Samples with `h = 0` collapse to poles. The result is outward oriented.
pub fn revolution_surface(profile: &[(f64, f64)], m: usize) -> Result<SimplicialCurrent> {
    if profile.len() < 2 {
        return Err(Error::InvalidArgument(
            "profile needs at least 2 samples".into(),
        ));
    }
    if m < 3 {
        return Err(Error::InvalidArgument("angular resolution must be >= 3".into()));
    }
    if profile.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidArgument(
            "profile x must be strictly increasing".into(),
        ));
    }
    if profile.iter().any(|&(x, h)| !x.is_finite() || !h.is_finite() || h < 0.0) {
        return Err(Error::InvalidArgument("profile heights must be finite and >= 0".into()));
    }
    let pole = |h: f64| h <= 1e-14;
    let mut coords = Vec::new();
    let mut start = Vec::with_capacity(profile.len());
    let mut count = 0usize;
    for &(x, h) in profile {
        start.push(count);
        if pole(h) {
            coords.extend([x, 0.0, 0.0]);
            count += 1;
        } else {
            for j in 0..m {
                let a = 2.0 * PI * j as f64 / m as f64;
                coords.extend([x, h * a.cos(), h * a.sin()]);
            }
            count += m;
        }
    }
    let mut cells = Vec::new();
    for i in 0..profile.len() - 1 {
        let (p0, p1) = (pole(profile[i].1), pole(profile[i + 1].1));
        let (s0, s1) = (start[i], start[i + 1]);
        for j in 0..m {
            let jn = (j + 1) % m;
            match (p0, p1) {
                (false, false) => {
                    let (a, b, c, d) = (s0 + j, s0 + jn, s1 + j, s1 + jn);
                    cells.push((vec![a, b, c], 1));
                    cells.push((vec![b, d, c], 1));
                }
                (false, true) => cells.push((vec![s0 + j, s0 + jn, s1], 1)),
                (true, false) => cells.push((vec![s0, s1 + jn, s1 + j], 1)),
                (true, true) => {}
            }
        }
    }
    let v = Arc::new(VertexSet::from_flat(3, coords)?);
    SimplicialCurrent::new(v, 2, cells)
}

/// Polar-grid disk of radius `radius` in the plane `z = height` of R^3, centred at
/// `(cx, cy)`, oriented by the upward normal.
pub fn polar_disk(center: [f64; 2], height: f64, radius: f64, rings: usize, sectors: usize) -> SimplicialCurrent {
    let mut coords = vec![center[0], center[1], height];
    for r in 1..=rings {
        let rad = radius * r as f64 / rings as f64;
        for j in 0..sectors {
            let a = 2.0 * PI * j as f64 / sectors as f64;
            coords.extend([center[0] + rad * a.cos(), center[1] + rad * a.sin(), height]);
        }
    }
    let ring = |r: usize, j: usize| 1 + (r - 1) * sectors + (j % sectors);
    let mut cells = Vec::new();
    for j in 0..sectors {
        cells.push((vec![0, ring(1, j), ring(1, j + 1)], 1));
    }
    for r in 1..rings {
        for j in 0..sectors {
            let (a, b, c, d) = (ring(r, j), ring(r, j + 1), ring(r + 1, j), ring(r + 1, j + 1));
            cells.push((vec![a, c, d], 1));
            cells.push((vec![a, d, b], 1));
        }
    }
    build(3, coords, 2, cells)
}

/// Outward-oriented boundary of a union of boxes of a rectilinear grid.
/// `inside(i, j, k)` selects voxel `[xs[i],xs[i+1]] x [ys[j],ys[j+1]] x [zs[k],zs[k+1]]`.
/// Square faces are split along the diagonal joining their lowest and highest corners,
/// which matches the Freudenthal triangulation of the same grid.
pub fn voxel_boundary(
    axes: [&[f64]; 3],
    inside: impl Fn(usize, usize, usize) -> bool,
) -> SimplicialCurrent {
    let dims = [axes[0].len() - 1, axes[1].len() - 1, axes[2].len() - 1];
    let mut index: HashMap<[usize; 3], usize> = HashMap::new();
    let mut coords = Vec::new();
    let mut node = |p: [usize; 3], coords: &mut Vec<f64>| -> usize {
        let next = index.len();
        *index.entry(p).or_insert_with(|| {
            coords.extend([axes[0][p[0]], axes[1][p[1]], axes[2][p[2]]]);
            next
        })
    };
    let is_in = |p: [isize; 3]| -> bool {
        (0..3).all(|d| p[d] >= 0 && (p[d] as usize) < dims[d])
            && inside(p[0] as usize, p[1] as usize, p[2] as usize)
    };
    let mut cells = Vec::new();
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                if !inside(i, j, k) {
                    continue;
                }
                let v = [i, j, k];
                for d in 0..3 {
                    for s in [-1isize, 1] {
                        let mut nb = [i as isize, j as isize, k as isize];
                        nb[d] += s;
                        if is_in(nb) {
                            continue;
                        }
                        let (p, q) = match d {
                            0 => (1, 2),
                            1 => (0, 2),
                            _ => (0, 1),
                        };
                        // e_p x e_q = +e_d for (1,2),(0,1) and -e_d for (0,2)
                        let orient = if d == 1 { -1 } else { 1 };
                        let sign = if orient == s { 1 } else { -1 };
                        let mut base = v;
                        if s > 0 {
                            base[d] += 1;
                        }
                        let mut c10 = base;
                        c10[p] += 1;
                        let mut c01 = base;
                        c01[q] += 1;
                        let mut c11 = c10;
                        c11[q] += 1;
                        let (a, b, c, e) = (
                            node(base, &mut coords),
                            node(c10, &mut coords),
                            node(c11, &mut coords),
                            node(c01, &mut coords),
                        );
                        cells.push((vec![a, b, c], sign));
                        cells.push((vec![a, c, e], sign));
                    }
                }
            }
        }
    }
    build(3, coords, 2, cells)
}
