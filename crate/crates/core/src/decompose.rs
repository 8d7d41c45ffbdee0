//! Decomposition of integral 1-chains into unit-multiplicity paths and cycles.
//!
//! Every edge of multiplicity `m` is expanded into `|m|` parallel unit edges
//! directed by the sign of `m`. Paths are pulled first, each from the lowest
//! vertex that still has more outgoing than incoming edges, always following the
//! lowest-index unused outgoing edge. Whatever is left is balanced and splits
//! into closed walks.

use std::sync::Arc;

use serde::Serialize;

use crate::current::geometry::dist;
use crate::current::{SimplicialCurrent, VertexSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub closed: bool,
    /// Vertex sequence; a closed curve repeats its first vertex at the end.
    pub vertices: Vec<usize>,
    pub length: f64,
}

impl Curve {
    /// Number of unit edges traversed.
    pub fn edge_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().expect("curve has vertices")
    }

    pub fn to_current(&self, vertices: &Arc<VertexSet>) -> SimplicialCurrent {
        SimplicialCurrent::canonicalize(
            vertices.clone(),
            1,
            self.vertices.windows(2).map(|w| (vec![w[0], w[1]], 1, None)),
        )
    }

    /// Integer boundary mass: 2 for open curves, 0 for closed ones.
    pub fn boundary_mass(&self) -> i64 {
        if self.closed {
            0
        } else {
            2
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveDecomposition {
    pub curves: Vec<Curve>,
}

impl CurveDecomposition {
    pub fn open_count(&self) -> usize {
        self.curves.iter().filter(|c| !c.closed).count()
    }

    /// Sum of the curves as a chain over `vertices`.
    pub fn reassemble(&self, vertices: &Arc<VertexSet>) -> SimplicialCurrent {
        SimplicialCurrent::canonicalize(
            vertices.clone(),
            1,
            self.curves
                .iter()
                .flat_map(|c| c.vertices.windows(2).map(|w| (vec![w[0], w[1]], 1, None))),
        )
    }

    pub fn total_length(&self) -> f64 {
        self.curves.iter().map(|c| c.length).sum()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DecomposeOptions {
    /// Split closed walks (and loops inside paths) into vertex-simple cycles.
    pub simple: bool,
}

pub fn decompose(t: &SimplicialCurrent) -> Result<CurveDecomposition> {
    decompose_with(t, DecomposeOptions::default())
}

pub fn decompose_with(t: &SimplicialCurrent, opts: DecomposeOptions) -> Result<CurveDecomposition> {
    if t.dim() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "decomposition needs a 1-current, got dimension {}",
            t.dim()
        )));
    }
    let nv = t.vertices().len();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); nv];
    let mut balance = vec![0i64; nv];
    for c in t.cells() {
        let (a, b) = if c.mult > 0 {
            (c.vertices[0], c.vertices[1])
        } else {
            (c.vertices[1], c.vertices[0])
        };
        let m = c.mult.unsigned_abs() as usize;
        out[a].extend(std::iter::repeat_n(b, m));
        balance[a] -= c.mult.abs();
        balance[b] += c.mult.abs();
    }
    let total: i64 = balance.iter().sum();
    if total != 0 {
        return Err(Error::Imbalance(format!("boundary coefficients sum to {total}")));
    }
    // neighbours are consumed in order, so sort each list once for a deterministic walk
    for o in &mut out {
        o.sort_unstable();
    }
    let mut next = vec![0usize; nv];
    let take = |v: usize, next: &mut Vec<usize>| -> Option<usize> {
        let i = next[v];
        if i < out[v].len() {
            next[v] += 1;
            Some(out[v][i])
        } else {
            None
        }
    };

    let mut walks: Vec<(Vec<usize>, bool)> = Vec::new();
    for s in 0..nv {
        while balance[s] < 0 {
            let mut path = vec![s];
            let mut v = s;
            loop {
                let Some(w) = take(v, &mut next) else {
                    return Err(Error::Imbalance(format!("walk stuck at vertex {v}")));
                };
                path.push(w);
                v = w;
                if balance[v] > 0 {
                    break;
                }
            }
            balance[s] += 1;
            balance[v] -= 1;
            walks.push((path, false));
        }
    }
    for s in 0..nv {
        while next[s] < out[s].len() {
            let mut walk = vec![s];
            let mut v = s;
            loop {
                let Some(w) = take(v, &mut next) else {
                    return Err(Error::Imbalance(format!("cycle stuck at vertex {v}")));
                };
                walk.push(w);
                v = w;
                if v == s {
                    break;
                }
            }
            walks.push((walk, true));
        }
    }

    let verts = t.vertices();
    let mut curves = Vec::new();
    let mut emit = |vs: Vec<usize>, closed: bool| {
        let length = vs.windows(2).map(|w| dist(verts.point(w[0]), verts.point(w[1]))).sum();
        curves.push(Curve {
            closed,
            vertices: vs,
            length,
        });
    };
    for (walk, closed) in walks {
        if !opts.simple {
            emit(walk, closed);
            continue;
        }
        let (rest, loops) = split_simple(&walk);
        for l in loops {
            emit(l, true);
        }
        if !closed {
            emit(rest, false);
        }
    }
    Ok(CurveDecomposition { curves })
}

/// Peels vertex-simple loops off a walk; returns the simple remainder and the loops.
fn split_simple(walk: &[usize]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut stack: Vec<usize> = Vec::new();
    let mut loops = Vec::new();
    for &v in walk {
        if let Some(p) = stack.iter().position(|&u| u == v) {
            let mut l: Vec<usize> = stack.drain(p..).collect();
            l.push(v);
            loops.push(l);
        }
        stack.push(v);
    }
    (stack, loops)
}

/// Breakpoints `(s, σ(s))` of the unit-speed parametrization of a curve.
pub fn arc_length_parametrize(curve: &Curve, t: &SimplicialCurrent) -> Vec<(f64, Vec<f64>)> {
    let verts = t.vertices();
    let mut s = 0.0;
    let mut out = Vec::with_capacity(curve.vertices.len());
    for (i, &v) in curve.vertices.iter().enumerate() {
        if i > 0 {
            s += dist(verts.point(curve.vertices[i - 1]), verts.point(v));
        }
        out.push((s, verts.point(v).to_vec()));
    }
    out
}

/// Evaluates a parametrization from [`arc_length_parametrize`] at `s`, clamped to `[0, L]`.
pub fn point_at(samples: &[(f64, Vec<f64>)], s: f64) -> Vec<f64> {
    let Some(last) = samples.last() else {
        return Vec::new();
    };
    if s <= samples[0].0 {
        return samples[0].1.clone();
    }
    if s >= last.0 {
        return last.1.clone();
    }
    let i = samples.partition_point(|(si, _)| *si <= s).max(1);
    let (s0, p0) = &samples[i - 1];
    let (s1, p1) = &samples[i];
    let lam = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
    p0.iter().zip(p1).map(|(a, b)| a + lam * (b - a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_loop() -> SimplicialCurrent {
        let vs = Arc::new(
            VertexSet::new(2, vec![vec![0., 0.], vec![1., 0.], vec![1., 1.], vec![0., 1.]]).unwrap(),
        );
        SimplicialCurrent::new(vs, 1, vec![(vec![0, 1], 1), (vec![1, 2], 1), (vec![2, 3], 1), (vec![3, 0], 1)])
            .unwrap()
    }

    #[test]
    fn square_loop_is_one_cycle() {
        let t = square_loop();
        let d = decompose(&t).unwrap();
        assert_eq!(d.curves.len(), 1);
        assert!(d.curves[0].closed);
        assert!((d.curves[0].length - 4.0).abs() < 1e-12);
        let p = arc_length_parametrize(&d.curves[0], &t);
        assert_eq!(p.first().unwrap().1, p.last().unwrap().1);
        assert!((p.last().unwrap().0 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_path() {
        let vs = Arc::new(VertexSet::new(1, vec![vec![0.], vec![1.], vec![3.], vec![4.]]).unwrap());
        let t = SimplicialCurrent::new(vs.clone(), 1, vec![(vec![0, 1], 1), (vec![1, 2], 1), (vec![2, 3], 1)])
            .unwrap();
        let d = decompose(&t).unwrap();
        assert_eq!(d.curves.len(), 1);
        let c = &d.curves[0];
        assert!(!c.closed);
        assert_eq!((c.start(), c.end()), (0, 3));
        let b = c.to_current(&vs).boundary().unwrap();
        assert_eq!(b.coefficient(&[3]), 1);
        assert_eq!(b.coefficient(&[0]), -1);
        let s: Vec<f64> = arc_length_parametrize(c, &t).iter().map(|p| p.0).collect();
        assert_eq!(s, vec![0.0, 1.0, 3.0, 4.0]);
    }

    #[test]
    fn reversed_multiplicity_runs_backwards() {
        let vs = Arc::new(VertexSet::new(1, vec![vec![0.], vec![1.]]).unwrap());
        let t = SimplicialCurrent::new(vs.clone(), 1, vec![(vec![0, 1], -3)]).unwrap();
        let d = decompose(&t).unwrap();
        assert_eq!(d.curves.len(), 3);
        assert!(d.curves.iter().all(|c| c.vertices == vec![1, 0]));
        assert!(d.reassemble(&vs).chain_eq(&t));
    }

    #[test]
    fn split_simple_peels_loops() {
        let (rest, loops) = split_simple(&[0, 1, 2, 1, 3, 0]);
        assert_eq!(loops, vec![vec![1, 2, 1], vec![0, 1, 3, 0]]);
        assert_eq!(rest, vec![0]);
    }

    #[test]
    fn rejects_two_dimensional_input() {
        let sq = crate::current::mesh::unit_square();
        assert!(decompose(&sq).is_err());
    }

    #[test]
    fn point_at_interpolates() {
        let samples = vec![(0.0, vec![0.0]), (1.0, vec![1.0]), (3.0, vec![3.0])];
        assert_eq!(point_at(&samples, 2.0), vec![2.0]);
        assert_eq!(point_at(&samples, -1.0), vec![0.0]);
        assert_eq!(point_at(&samples, 9.0), vec![3.0]);
    }
}
