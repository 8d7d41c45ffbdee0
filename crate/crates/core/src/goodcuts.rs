//! Exact grid version of the good-cuts construction.
//!
//! A [`GridSet`] is a subset of the cells of `{0..m-1}^n`, stored row-major with
//! the first coordinate most significant, so the cells over a prefix `x ∈ [m]^k`
//! form one contiguous block of length `m^(n-k)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSet {
    pub n: usize,
    pub m: usize,
    #[serde(with = "bits")]
    pub cells: Vec<bool>,
}

mod bits {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Bit {
        B(bool),
        I(u8),
    }

    pub fn serialize<S: Serializer>(cells: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(cells.iter().map(|&b| u8::from(b)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let raw: Vec<Bit> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|b| match b {
                Bit::B(v) => Ok(v),
                Bit::I(0) => Ok(false),
                Bit::I(1) => Ok(true),
                Bit::I(other) => Err(serde::de::Error::custom(format!("cell value {other} is not 0 or 1"))),
            })
            .collect()
    }
}

impl GridSet {
    pub fn new(n: usize, m: usize, cells: Vec<bool>) -> Result<Self> {
        let g = GridSet { n, m, cells };
        g.validate()?;
        Ok(g)
    }

    pub fn full(n: usize, m: usize) -> Self {
        GridSet {
            n,
            m,
            cells: vec![true; m.pow(n as u32)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidArgument("grid dimension and resolution must be positive".into()));
        }
        let want = self
            .m
            .checked_pow(self.n as u32)
            .ok_or_else(|| Error::InvalidArgument("grid too large".into()))?;
        if self.cells.len() != want {
            return Err(Error::InvalidArgument(format!(
                "grid has {} cells, expected {want}",
                self.cells.len()
            )));
        }
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn density(&self) -> f64 {
        self.count() as f64 / self.len() as f64
    }

    /// Flat index of a multi-index.
    pub fn index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.m + i)
    }

    /// Number of members over each prefix of length `k` (in flat prefix order).
    fn fiber_counts(&self, k: usize) -> Vec<usize> {
        let block = self.m.pow((self.n - k) as u32);
        self.cells
            .chunks(block)
            .map(|c| c.iter().filter(|&&b| b).count())
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GoodCutsChecks {
    /// `|A^k| > 1 − ε/δ^n` (non-strict when ε = 0) for every k.
    pub measure: bool,
    /// `(A^k × grid) ∩ A^n = A^n` for every k.
    pub nested: bool,
    /// Fibers of `A^n` over points of `A^k` have density `> 1 − δ`.
    pub fibers: bool,
    /// `A^n ⊂ K`.
    pub inside: bool,
}

impl GoodCutsChecks {
    pub fn all(&self) -> bool {
        self.measure && self.nested && self.fibers && self.inside
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GoodCuts {
    pub delta: f64,
    pub epsilon: f64,
    /// `1 − ε/δ^n`.
    pub bound: f64,
    /// `A^1, …, A^n`; `sets[k-1]` lives on `{0..m-1}^k`.
    pub sets: Vec<GridSet>,
    pub measures: Vec<f64>,
    pub checks: GoodCutsChecks,
    pub warnings: Vec<String>,
}

pub fn good_cuts(k_set: &GridSet, delta: f64) -> Result<GoodCuts> {
    k_set.validate()?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
    }
    let n = k_set.n;
    let m = k_set.m;
    let total = k_set.len();
    let epsilon = (total - k_set.count()) as f64 / total as f64;
    let bound = 1.0 - epsilon / delta.powi(n as i32);
    let mut warnings = Vec::new();
    if epsilon >= delta.powi(n as i32) {
        warnings.push(format!(
            "epsilon {epsilon} is not below delta^n = {}; the measure bound is vacuous",
            delta.powi(n as i32)
        ));
    }

    // a_low[k-1] is A_k on [m]^k; k_cur walks K_{k+1} -> K_k
    let mut a_low: Vec<Vec<bool>> = vec![Vec::new(); n];
    let mut k_cur = k_set.cells.clone();
    for k in (1..n).rev() {
        let block = m.pow((n - k) as u32);
        let threshold = 1.0 - delta;
        let mut a_k = Vec::with_capacity(total / block);
        for chunk in k_cur.chunks_mut(block) {
            let dens = chunk.iter().filter(|&&b| b).count() as f64 / block as f64;
            let good = dens > threshold;
            if !good {
                chunk.iter_mut().for_each(|b| *b = false);
            }
            a_k.push(good);
        }
        a_low[k - 1] = a_k;
    }
    let a_n = GridSet {
        n,
        m,
        cells: k_cur,
    };
    let mut sets = Vec::with_capacity(n);
    for k in 1..n {
        let size = m.pow(k as u32);
        let cells = (0..size)
            .map(|x| (1..=k).all(|j| a_low[j - 1][x / m.pow((k - j) as u32)]))
            .collect();
        sets.push(GridSet { n: k, m, cells });
    }
    sets.push(a_n);
    let measures: Vec<f64> = sets.iter().map(GridSet::density).collect();
    let checks = verify(k_set, &sets, delta, epsilon, bound);
    if !checks.all() {
        warnings.push(format!("good-cuts conclusions violated: {checks:?}"));
    }
    Ok(GoodCuts {
        delta,
        epsilon,
        bound,
        sets,
        measures,
        checks,
        warnings,
    })
}

/// Direct verification of the three conclusions on the grid.
pub fn verify(k_set: &GridSet, sets: &[GridSet], delta: f64, epsilon: f64, bound: f64) -> GoodCutsChecks {
    let n = k_set.n;
    let m = k_set.m;
    let a_n = &sets[n - 1];
    let measure = sets.iter().all(|s| {
        let d = s.density();
        if epsilon > 0.0 {
            d > bound
        } else {
            d >= bound
        }
    });
    let inside = a_n.cells.iter().zip(&k_set.cells).all(|(a, k)| !a || *k);
    let mut nested = true;
    let mut fibers = true;
    for (k, a_k) in sets.iter().enumerate().map(|(i, s)| (i + 1, s)) {
        let block = m.pow((n - k) as u32);
        let counts = a_n.fiber_counts(k);
        for (x, &c) in counts.iter().enumerate() {
            if c > 0 && !a_k.cells[x] {
                nested = false;
            }
            if a_k.cells[x] && (c as f64 / block as f64) <= 1.0 - delta {
                fibers = false;
            }
        }
    }
    GoodCutsChecks {
        measure,
        nested,
        fibers,
        inside,
    }
}
