//! Dense-tableau primal simplex for `min c.x  s.t.  A x = b, x >= 0` started from a
//! feasible identity basis.
//!
//! Pricing is Dantzig's most negative reduced cost; after any degenerate pivot the
//! solver switches to Bland's smallest-index rule until the objective strictly
//! improves again, which rules out cycling. Ratio-test ties always go to the
//! basic variable with the smallest index, so the result is deterministic.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub trait LpScalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Strictly positive beyond the working tolerance.
    fn is_pos(&self) -> bool;
    /// Strictly negative beyond the working tolerance.
    fn is_neg(&self) -> bool;
    fn is_exact() -> bool;
}

const F64_EPS: f64 = 1e-11;

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_pos(&self) -> bool {
        *self > F64_EPS
    }
    fn is_neg(&self) -> bool {
        *self < -F64_EPS
    }
    fn is_exact() -> bool {
        false
    }
}

impl LpScalar for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(BigInt::from(0)))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn is_exact() -> bool {
        true
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    pub basis: Vec<usize>,
    pub pivots: usize,
}

/// Equality-form LP with dense rows.
#[derive(Debug, Clone)]
pub struct StandardLp<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub c: Vec<T>,
}

impl<T: LpScalar> StandardLp<T> {
    /// Solve starting from `basis`, whose columns must form the identity and `b >= 0`.
    pub fn solve(&self, basis: Vec<usize>, max_pivots: usize) -> Result<LpSolution<T>> {
        let m = self.a.len();
        let n = self.c.len();
        if self.b.len() != m || basis.len() != m {
            return Err(Error::Lp("row count mismatch".into()));
        }
        if self.b.iter().any(|v| v.is_neg()) {
            return Err(Error::Lp("right-hand side must be nonnegative".into()));
        }
        let w = n + 1;
        // row-major tableau; last column is the rhs, last row the reduced costs
        let mut tab: Vec<T> = Vec::with_capacity((m + 1) * w);
        for (row, rhs) in self.a.iter().zip(&self.b) {
            if row.len() != n {
                return Err(Error::Lp("ragged constraint matrix".into()));
            }
            tab.extend(row.iter().cloned());
            tab.push(rhs.clone());
        }
        tab.extend(self.c.iter().cloned());
        tab.push(T::zero());
        for (r, &j) in basis.iter().enumerate() {
            let cj = tab[m * w + j].clone();
            if cj.is_pos() || cj.is_neg() {
                for col in 0..w {
                    let v = tab[m * w + col].clone() - cj.clone() * tab[r * w + col].clone();
                    tab[m * w + col] = v;
                }
            }
        }
        let mut basis = basis;
        let mut bland = false;
        let mut pivots = 0;
        loop {
            let obj = &tab[m * w..m * w + n];
            let entering = if bland {
                obj.iter().position(|v| v.is_neg())
            } else {
                let mut best: Option<usize> = None;
                for (j, v) in obj.iter().enumerate() {
                    if v.is_neg() && best.is_none_or(|b| *v < obj[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(e) = entering else { break };
            let mut leave: Option<(usize, T)> = None;
            for r in 0..m {
                let coef = &tab[r * w + e];
                if coef.is_pos() {
                    let ratio = tab[r * w + n].clone() / coef.clone();
                    let better = match &leave {
                        None => true,
                        Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((pr, step)) = leave else {
                return Err(Error::Lp("objective is unbounded below".into()));
            };
            bland = !step.is_pos();
            pivot(&mut tab, m, w, pr, e);
            basis[pr] = e;
            pivots += 1;
            if pivots > max_pivots {
                return Err(Error::Lp(format!("pivot limit {max_pivots} exceeded")));
            }
        }
        let mut x = vec![T::zero(); n];
        for (r, &j) in basis.iter().enumerate() {
            x[j] = tab[r * w + n].clone();
        }
        let objective = -tab[m * w + n].clone();
        Ok(LpSolution {
            x,
            objective,
            basis,
            pivots,
        })
    }
}

fn pivot<T: LpScalar>(tab: &mut [T], m: usize, w: usize, pr: usize, pc: usize) {
    let p = tab[pr * w + pc].clone();
    for col in 0..w {
        let v = tab[pr * w + col].clone() / p.clone();
        tab[pr * w + col] = v;
    }
    let prow: Vec<T> = tab[pr * w..(pr + 1) * w].to_vec();
    let nz: Vec<usize> = (0..w).filter(|&c| prow[c].is_pos() || prow[c].is_neg()).collect();
    for r in 0..=m {
        if r == pr {
            continue;
        }
        let f = tab[r * w + pc].clone();
        if !(f.is_pos() || f.is_neg()) {
            if T::is_exact() {
                continue;
            }
            tab[r * w + pc] = T::zero();
            continue;
        }
        for &c in &nz {
            let v = tab[r * w + c].clone() - f.clone() * prow[c].clone();
            tab[r * w + c] = v;
        }
        tab[r * w + pc] = T::zero();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_lp() {
        // min -x - y  s.t. x + s1 = 1, y + s2 = 2  (slacks s1, s2)
        let lp = StandardLp {
            a: vec![vec![1.0, 0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 1.0]],
            b: vec![1.0, 2.0],
            c: vec![-1.0, -1.0, 0.0, 0.0],
        };
        let s = lp.solve(vec![2, 3], 100).unwrap();
        assert!((s.objective + 3.0).abs() < 1e-12);
    }

    #[test]
    fn exact_matches_float() {
        let a = vec![vec![2.0, 1.0, 1.0, 0.0], vec![1.0, 3.0, 0.0, 1.0]];
        let b = vec![4.0, 6.0];
        let c = vec![-3.0, -2.0, 0.0, 0.0];
        let f = StandardLp { a: a.clone(), b: b.clone(), c: c.clone() }
            .solve(vec![2, 3], 100)
            .unwrap();
        let conv = |v: &Vec<f64>| v.iter().map(|&x| <BigRational as LpScalar>::from_f64(x)).collect::<Vec<_>>();
        let q = StandardLp {
            a: a.iter().map(conv).collect(),
            b: conv(&b),
            c: conv(&c),
        }
        .solve(vec![2, 3], 100)
        .unwrap();
        assert!((f.objective - LpScalar::to_f64(&q.objective)).abs() < 1e-12);
        // optimum at x = 6/5, y = 8/5: objective -34/5
        assert_eq!(q.objective, BigRational::new(BigInt::from(-34), BigInt::from(5)));
    }

    #[test]
    fn unbounded_detected() {
        let lp = StandardLp {
            a: vec![vec![1.0, -1.0]],
            b: vec![1.0],
            c: vec![0.0, -1.0],
        };
        assert!(lp.solve(vec![0], 10).is_err());
    }
}
