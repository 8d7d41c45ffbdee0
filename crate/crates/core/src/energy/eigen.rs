//! Smallest eigenpairs of the pencil `K φ = λ M φ` on the mean-zero subspace.
//!
//! Small problems go through a dense Cholesky reduction to a standard symmetric
//! eigenproblem with the constant direction removed by a Householder reflection.
//! Large ones use shift-invert block subspace iteration with Rayleigh–Ritz
//! extraction, factoring `K - σM` once with an envelope Cholesky in RCM order.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::sparse::{rcm, CsrMatrix, EnvelopeCholesky};
use super::{assemble_pencil, Pencil};
use crate::current::SimplicialCurrent;
use crate::error::{Error, Result};
use crate::john::NormRegistry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenMethod {
    Auto,
    Dense,
    Subspace,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumOptions {
    pub method: EigenMethod,
    /// Active-vertex count up to which `Auto` picks the dense solver.
    pub dense_threshold: usize,
    /// Backward-error target `‖Kφ − λMφ‖ ≤ tol·(‖|K||φ|‖ + |λ|‖Mφ‖)`.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            method: EigenMethod::Auto,
            dense_threshold: 1000,
            tol: 1e-10,
            max_iter: 2000,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    /// One value per vertex of the current; inactive vertices hold zero.
    pub eigenvectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub method: EigenMethod,
    pub iterations: usize,
    pub converged: bool,
}

/// The `count` smallest min-max values with mass-orthonormal mean-zero eigenfunctions.
pub fn minmax_spectrum(
    t: &SimplicialCurrent,
    count: usize,
    norms: Option<&NormRegistry>,
    opts: &SpectrumOptions,
) -> Result<SpectrumResult> {
    let pencil = assemble_pencil(t, norms)?;
    spectrum_of_pencil(&pencil, &t.active_vertices(), count, opts)
}

/// Same as [`minmax_spectrum`] for an assembled pencil restricted to `active`.
pub fn spectrum_of_pencil(
    pencil: &Pencil,
    active: &[usize],
    count: usize,
    opts: &SpectrumOptions,
) -> Result<SpectrumResult> {
    let n = active.len();
    if n < 2 || count > n - 1 {
        return Err(Error::InvalidArgument(format!(
            "requested {count} eigenvalues but the mean-zero space has dimension {}",
            n.saturating_sub(1)
        )));
    }
    let k = pencil.stiffness.submatrix(active);
    let m = pencil.mass.submatrix(active);
    let method = match opts.method {
        EigenMethod::Auto if n <= opts.dense_threshold => EigenMethod::Dense,
        EigenMethod::Auto => EigenMethod::Subspace,
        other => other,
    };
    let block = (2 * count).max(count + 8);
    let (vals, vecs, iterations, method) = if method == EigenMethod::Dense || block >= n - 1 {
        let (v, w) = dense(&k, &m, count)?;
        (v, w, 0, EigenMethod::Dense)
    } else {
        let (v, w, it) = subspace(&k, &m, count, block, opts)?;
        (v, w, it, EigenMethod::Subspace)
    };
    let mut residuals = Vec::with_capacity(count);
    let mut converged = true;
    let mut eigenvectors = Vec::with_capacity(count);
    let full = pencil.stiffness.n();
    for (lam, mut phi) in vals.iter().zip(vecs) {
        fix_sign(&mut phi);
        let (res, backward) = residual(&k, &m, *lam, &phi);
        residuals.push(res);
        converged &= backward <= opts.tol;
        let mut out = vec![0.0; full];
        for (&i, v) in active.iter().zip(&phi) {
            out[i] = *v;
        }
        eigenvectors.push(out);
    }
    Ok(SpectrumResult {
        eigenvalues: vals,
        eigenvectors,
        residuals,
        method,
        iterations,
        converged,
    })
}

/// Relative residual `‖Kφ − λMφ‖/‖Mφ‖` and the normwise backward error.
fn residual(k: &CsrMatrix, m: &CsrMatrix, lam: f64, phi: &[f64]) -> (f64, f64) {
    let kp = k.mul_vec(phi);
    let mp = m.mul_vec(phi);
    let num = norm(&kp.iter().zip(&mp).map(|(a, b)| a - lam * b).collect::<Vec<_>>());
    (num / norm(&mp), num / (norm(&abs_mul(k, phi)) + lam.abs() * norm(&mp)))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `|K| |x|`, the roundoff scale of `Kx`.
fn abs_mul(k: &CsrMatrix, x: &[f64]) -> Vec<f64> {
    (0..k.n()).map(|i| k.row(i).map(|(j, v)| (v * x[j]).abs()).sum()).collect()
}

/// First entry that is not negligible becomes positive.
fn fix_sign(v: &mut [f64]) {
    let big = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * big) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn dense(k: &CsrMatrix, m: &CsrMatrix, count: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = k.n();
    let km = k.to_dense();
    let mm = m.to_dense();
    let l = mm
        .cholesky()
        .ok_or_else(|| Error::Eigen("mass matrix is not positive definite".into()))?
        .l();
    let x = l
        .solve_lower_triangular(&km)
        .ok_or_else(|| Error::Eigen("singular mass factor".into()))?;
    let c = l
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(|| Error::Eigen("singular mass factor".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    // Householder reflection sending the M-normalised constant to ±e_0
    let y = l.transpose() * DVector::from_element(n, 1.0);
    let mut v = &y / y.norm();
    v[0] += if v[0] >= 0.0 { 1.0 } else { -1.0 };
    let vv = v.dot(&v);
    let cv = &c * &v;
    let ch = &c - (&cv * v.transpose()) * (2.0 / vv);
    let hv = ch.transpose() * &v;
    let hch = &ch - (&v * hv.transpose()) * (2.0 / vv);
    let inner = hch.view((1, 1), (n - 1, n - 1)).into_owned();
    let inner = (&inner + inner.transpose()) * 0.5;
    let eig = SymmetricEigen::new(inner);
    let mut order: Vec<usize> = (0..n - 1).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lt = l.transpose();
    let mut vals = Vec::with_capacity(count);
    let mut vecs = Vec::with_capacity(count);
    for &i in order.iter().take(count) {
        let mut w = DVector::zeros(n);
        w.rows_mut(1, n - 1).copy_from(&eig.eigenvectors.column(i));
        let coef = 2.0 * v.dot(&w) / vv;
        w -= &v * coef;
        let phi = lt
            .solve_upper_triangular(&w)
            .ok_or_else(|| Error::Eigen("singular mass factor".into()))?;
        vals.push(eig.eigenvalues[i]);
        vecs.push(phi.iter().copied().collect());
    }
    Ok((vals, vecs))
}

struct ShiftInvert {
    perm: Vec<usize>,
    chol: EnvelopeCholesky,
}

impl ShiftInvert {
    fn new(a: &CsrMatrix) -> Result<Self> {
        let perm = rcm(a);
        let chol = EnvelopeCholesky::factor(&a.permuted(&perm))?;
        Ok(ShiftInvert { perm, chol })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        self.chol.solve_in_place(&mut x);
        let mut out = vec![0.0; b.len()];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = x[new];
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(a, b)| *a += alpha * b);
}

/// Two passes of modified Gram–Schmidt in the M inner product, against `c` first.
fn m_orthonormalize(y: &mut [Vec<f64>], my: &mut [Vec<f64>], c: &[f64], mc: &[f64], rng: &mut ChaCha8Rng, m: &CsrMatrix) {
    for _ in 0..2 {
        for j in 0..y.len() {
            let a = dot(&y[j], mc);
            axpy(&mut y[j], -a, c);
            axpy(&mut my[j], -a, mc);
            for i in 0..j {
                let (lo, hi) = y.split_at_mut(j);
                let (mlo, mhi) = my.split_at_mut(j);
                let a = dot(&hi[0], &mlo[i]);
                axpy(&mut hi[0], -a, &lo[i]);
                axpy(&mut mhi[0], -a, &mlo[i]);
            }
            let nrm = dot(&y[j], &my[j]).max(0.0).sqrt();
            if nrm > 1e-300 && nrm.is_finite() {
                y[j].iter_mut().for_each(|x| *x /= nrm);
                my[j].iter_mut().for_each(|x| *x /= nrm);
            } else {
                // collapsed direction: restart it randomly and redo the pass later
                y[j] = (0..c.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                my[j] = m.mul_vec(&y[j]);
            }
        }
    }
}

fn subspace(
    k: &CsrMatrix,
    m: &CsrMatrix,
    count: usize,
    block: usize,
    opts: &SpectrumOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, usize)> {
    let n = k.n();
    let trk = k.trace();
    let trm = m.trace();
    let sigma = -1e-6 * if trk > 0.0 { trk / trm } else { 1.0 };
    let op = ShiftInvert::new(&k.lin_comb(1.0, m, -sigma))?;
    let ones = vec![1.0; n];
    let mass = m.quad_form(&ones);
    let c: Vec<f64> = ones.iter().map(|x| x / mass.sqrt()).collect();
    let mc = m.mul_vec(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Vec<f64>> = (0..block)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let mut mx: Vec<Vec<f64>> = x.iter().map(|v| m.mul_vec(v)).collect();
    m_orthonormalize(&mut x, &mut mx, &c, &mc, &mut rng, m);
    let mut theta = vec![0.0; block];
    let mut still = 0;
    for it in 1..=opts.max_iter {
        let prev = theta.clone();
        let mut y: Vec<Vec<f64>> = mx.iter().map(|b| op.solve(b)).collect();
        let mut my: Vec<Vec<f64>> = y.iter().map(|v| m.mul_vec(v)).collect();
        m_orthonormalize(&mut y, &mut my, &c, &mc, &mut rng, m);
        let ky: Vec<Vec<f64>> = y.iter().map(|v| k.mul_vec(v)).collect();
        let kr = DMatrix::from_fn(block, block, |i, j| 0.5 * (dot(&y[i], &ky[j]) + dot(&y[j], &ky[i])));
        let eig = SymmetricEigen::new(kr);
        let mut order: Vec<usize> = (0..block).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let s = DMatrix::from_fn(block, block, |i, j| eig.eigenvectors[(i, order[j])]);
        for (j, &o) in order.iter().enumerate() {
            theta[j] = eig.eigenvalues[o];
        }
        let combine = |basis: &[Vec<f64>]| -> Vec<Vec<f64>> {
            (0..block)
                .map(|j| {
                    let mut out = vec![0.0; n];
                    for (i, b) in basis.iter().enumerate() {
                        axpy(&mut out, s[(i, j)], b);
                    }
                    out
                })
                .collect()
        };
        x = combine(&y);
        mx = combine(&my);
        let kx = combine(&ky);
        let done = (0..count).all(|j| {
            let num = norm(&kx[j].iter().zip(&mx[j]).map(|(a, b)| a - theta[j] * b).collect::<Vec<_>>());
            num <= 0.5 * opts.tol * (norm(&abs_mul(k, &x[j])) + theta[j].abs() * norm(&mx[j]))
        });
        // Ritz values frozen at roundoff level: further sweeps cannot help
        let frozen = (0..count).all(|j| (theta[j] - prev[j]).abs() <= 1e-14 * theta[j].abs().max(1e-300));
        still = if frozen { still + 1 } else { 0 };
        if done || still >= 3 || it == opts.max_iter {
            return Ok((theta[..count].to_vec(), x[..count].to_vec(), it));
        }
    }
    unreachable!("loop returns on the last iteration")
}
