#![allow(dead_code)]

pub mod oracles;

use std::sync::Arc;

use currentlab::current::mesh::FreudenthalGrid;
use currentlab::flat::{grid_complex, FlatComplex};
use currentlab::{SimplicialCurrent, VertexSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unit grid `[0,1]^n` at resolution `res`.
pub fn grid(n: usize, res: usize) -> FreudenthalGrid {
    FreudenthalGrid::new(vec![0.0; n], vec![1.0; n], vec![res; n]).unwrap()
}

/// Oriented k-cells of the grid (ascending vertex order) and the shared vertex set.
pub fn grid_cells(n: usize, res: usize, k: usize) -> (Arc<VertexSet>, Vec<Vec<usize>>) {
    let g = grid(n, res);
    if k == n {
        let t = g.current();
        let cells = t.cells().iter().map(|c| c.vertices.clone()).collect();
        (t.vertex_arc().clone(), cells)
    } else {
        let cx = grid_complex(&vec![0.0; n], &vec![1.0; n], &vec![res; n], k).unwrap();
        (cx.vertices().clone(), cx.k_cells().to_vec())
    }
}

/// Random integer k-chain on the grid: each cell present with probability `density`,
/// multiplicity uniform in `±1..=max_mult`.
pub fn random_chain(r: &mut impl Rng, n: usize, res: usize, k: usize, density: f64, max_mult: i64) -> SimplicialCurrent {
    let (v, cells) = grid_cells(n, res, k);
    chain_on(r, v, &cells, k, density, max_mult)
}

pub fn chain_on(
    r: &mut impl Rng,
    v: Arc<VertexSet>,
    cells: &[Vec<usize>],
    k: usize,
    density: f64,
    max_mult: i64,
) -> SimplicialCurrent {
    let mut picked = Vec::new();
    for c in cells {
        if r.gen_bool(density) {
            let m = r.gen_range(1..=max_mult);
            picked.push((c.clone(), if r.gen_bool(0.5) { m } else { -m }));
        }
    }
    SimplicialCurrent::new(v, k, picked).unwrap()
}

/// Connected patch of the unit square with random positive multiplicities.
pub fn weighted_patch(r: &mut impl Rng, res: usize) -> SimplicialCurrent {
    let t = grid(2, res).current();
    let cells: Vec<_> = t.cells().iter().map(|c| (c.vertices.clone(), c.mult * r.gen_range(1..=4))).collect();
    SimplicialCurrent::new(t.vertex_arc().clone(), 2, cells).unwrap()
}

/// Random chain whose cells are a subset of the complex's k-cells.
pub fn complex_chain(r: &mut impl Rng, cx: &FlatComplex, density: f64, max_mult: i64) -> SimplicialCurrent {
    chain_on(r, cx.vertices().clone(), cx.k_cells(), cx.k(), density, max_mult)
}

/// Sum of `|coefficient|` of an integer chain.
pub fn integer_mass(t: &SimplicialCurrent) -> i64 {
    t.cells().iter().map(|c| c.mult.abs()).sum()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}
