//! Independent checks shared by the property suites and the acceptance run.

use currentlab::decompose::{decompose_with, DecomposeOptions};
use currentlab::flat::FlatComplex;
use currentlab::goodcuts::GridSet;
use currentlab::john::NormBall;
use currentlab::SimplicialCurrent;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

use super::integer_mass;

/// `∫ mass(slice(T, w, t)) dt` for affine `w`, by three-point Gauss rules between
/// consecutive vertex levels. The slice mass is a polynomial of degree below the
/// ambient dimension on each interval, so this is exact up to roundoff.
pub fn coarea_integral(t: &SimplicialCurrent, grad: &[f64]) -> Result<f64, String> {
    let mut breaks = t.affine_values(grad, 0.0);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let gauss = [(-(0.6f64).sqrt(), 5.0 / 9.0), (0.0, 8.0 / 9.0), ((0.6f64).sqrt(), 5.0 / 9.0)];
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for (x, wt) in gauss {
            let m = t.slice_by_affine(grad, 0.0, mid + half * x).map_err(|e| e.to_string())?.mass();
            total += half * wt * m;
        }
    }
    Ok(total)
}

/// Exact integer invariants of a curve decomposition.
pub fn decomposition_holds(t: &SimplicialCurrent, simple: bool) -> Result<(), String> {
    let d = decompose_with(t, DecomposeOptions { simple }).map_err(|e| e.to_string())?;
    let edges: usize = d.curves.iter().map(|c| c.edge_count()).sum();
    if edges as i64 != integer_mass(t) {
        return Err(format!("edges {edges} vs mass {}", integer_mass(t)));
    }
    let bd = if t.is_zero() { 0 } else { integer_mass(&t.boundary().unwrap()) };
    let curve_bd: i64 = d.curves.iter().map(|c| c.boundary_mass()).sum();
    if curve_bd != bd {
        return Err(format!("curve boundaries {curve_bd} vs {bd}"));
    }
    if 2 * d.open_count() as i64 != bd {
        return Err(format!("{} open curves for boundary mass {bd}", d.open_count()));
    }
    if !d.reassemble(t.vertex_arc()).chain_eq(t) {
        return Err("reassembly differs".into());
    }
    for c in &d.curves {
        if c.closed != (c.start() == c.end()) {
            return Err("closed flag disagrees with endpoints".into());
        }
        if integer_mass(&c.to_current(t.vertex_arc())) != c.edge_count() as i64 {
            return Err("curve cancels itself".into());
        }
    }
    Ok(())
}

/// Random `K ⊂ [m]^n` with at most `δ^n/2` of the cells removed, sometimes clustered.
pub fn random_grid(r: &mut impl Rng, n: usize, m: usize, delta: f64) -> GridSet {
    let total = m.pow(n as u32);
    let budget = (delta.powi(n as i32) / 2.0 * total as f64).floor() as usize;
    let remove = r.gen_range(0..=budget);
    let mut cells = vec![true; total];
    if r.gen_bool(0.5) {
        let mut idx: Vec<usize> = (0..total).collect();
        idx.shuffle(r);
        idx.into_iter().take(remove).for_each(|i| cells[i] = false);
    } else {
        // a contiguous run concentrates the holes in a few fibers
        let start = r.gen_range(0..total);
        (0..remove).for_each(|i| cells[(start + i) % total] = false);
    }
    GridSet::new(n, m, cells).unwrap()
}

/// The three good-cuts conclusions checked from scratch with integer counts.
pub fn cut_conclusions_hold(k_set: &GridSet, sets: &[GridSet], delta: f64) -> Result<(), String> {
    let (n, m) = (k_set.n, k_set.m);
    let total = m.pow(n as u32);
    let missing = k_set.cells.iter().filter(|b| !**b).count();
    let a_n = &sets[n - 1];
    if a_n.cells.iter().zip(&k_set.cells).any(|(a, k)| *a && !*k) {
        return Err("A^n leaves K".into());
    }
    let p = total as f64 * delta.powi(n as i32);
    for k in 1..=n {
        let a_k = &sets[k - 1];
        let size = m.pow(k as u32);
        let count = a_k.cells.iter().filter(|b| **b).count();
        // |A^k|/m^k > 1 − ε/δ^n with ε = missing/m^n
        let (lhs, rhs) = (count as f64 * p, size as f64 * (p - missing as f64));
        if !(lhs > rhs || (missing == 0 && lhs >= rhs)) {
            return Err(format!("measure of A^{k}: {count}/{size}"));
        }
        let block = m.pow((n - k) as u32);
        for x in 0..size {
            let c = a_n.cells[x * block..(x + 1) * block].iter().filter(|b| **b).count();
            if c > 0 && !a_k.cells[x] {
                return Err(format!("A^n not over A^{k} at {x}"));
            }
            if a_k.cells[x] && !(c as f64 > (1.0 - delta) * block as f64) {
                return Err(format!("thin fiber over A^{k} at {x}: {c}/{block}"));
            }
        }
    }
    Ok(())
}

pub fn unit_direction(r: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let l = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if l > 1e-3 {
            return v.iter().map(|x| x / l).collect();
        }
    }
}

/// `(1/√n)‖v‖_J ≤ ‖v‖ ≤ ‖v‖_J` on `count` random directions, up to the MVEE tolerance.
pub fn sandwich_holds(ball: &NormBall, r: &mut impl Rng, count: usize) -> Result<(), String> {
    let n = ball.dim();
    let s = (n as f64).sqrt();
    for _ in 0..count {
        let v = unit_direction(r, n);
        let (g, j) = (ball.norm(&v), ball.john_norm(&v));
        if !(j / s <= g * (1.0 + 1e-6) && g <= j * (1.0 + 1e-6)) {
            return Err(format!("v = {v:?}: gauge {g}, john {j}"));
        }
    }
    Ok(())
}

/// Flat norm of the chain `d` by enumerating every basis of the standard-form LP
/// `min Σ vol·(u⁺ + u⁻ + v⁺ + v⁻)` subject to `u⁺ − u⁻ + ∂(v⁺ − v⁻) = d`.
pub fn flat_norm_by_enumeration(d: &[i64], cx: &FlatComplex) -> f64 {
    let m = cx.k_cells().len();
    let p = cx.k1_cells().len();
    let n = 2 * m + 2 * p;
    let mut a = DMatrix::<f64>::zeros(m, n);
    for r in 0..m {
        a[(r, r)] = 1.0;
        a[(r, m + r)] = -1.0;
    }
    for (j, col) in cx.incidence().iter().enumerate() {
        for &(r, s) in col {
            a[(r, 2 * m + j)] = s as f64;
            a[(r, 2 * m + p + j)] = -(s as f64);
        }
    }
    let cost: Vec<f64> = cx
        .k_volumes()
        .iter()
        .chain(cx.k_volumes())
        .chain(cx.k1_volumes())
        .chain(cx.k1_volumes())
        .copied()
        .collect();
    let b = DVector::from_iterator(m, d.iter().map(|&x| x as f64));
    let mut best = f64::INFINITY;
    let mut cols: Vec<usize> = (0..m).collect();
    loop {
        let basis = a.select_columns(cols.iter());
        if let Some(x) = basis.clone().lu().solve(&b) {
            if (&basis * &x - &b).norm() < 1e-9 && x.iter().all(|&v| v >= -1e-12) {
                best = best.min(cols.iter().zip(x.iter()).map(|(&c, v)| cost[c] * v).sum());
            }
        }
        // next m-subset in lexicographic order
        let mut i = m;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if cols[i] < n - m + i {
                break;
            }
        }
        cols[i] += 1;
        for j in i + 1..m {
            cols[j] = cols[j - 1] + 1;
        }
    }
}
