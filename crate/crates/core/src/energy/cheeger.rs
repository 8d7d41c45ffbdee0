//! Upper bounds on the Cheeger constant from explicit cuts.

use std::collections::BTreeSet;

use crate::current::SimplicialCurrent;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub enum Cut {
    /// Side A membership per cell, in the current's canonical cell order.
    Cells(Vec<bool>),
    /// Side A membership per vertex; a cell joins A when most of its vertices do.
    Vertices(Vec<bool>),
    /// Sublevel set `{w <= level}` of a piecewise-linear function.
    Level { values: Vec<f64>, level: f64 },
}

/// Interface mass and the masses of both sides for one cut.
pub fn cut_masses(t: &SimplicialCurrent, cut: &Cut) -> Result<(f64, f64, f64)> {
    let total = t.mass();
    let side = match cut {
        Cut::Level { values, level } => {
            if values.len() != t.vertices().len() {
                return Err(Error::InvalidArgument("level function length differs from vertex count".into()));
            }
            let below = t.restrict_below(values, *level)?.mass();
            let interface = t.slice_by_values(values, *level)?.mass();
            return Ok((interface, below, total - below));
        }
        Cut::Cells(mask) => {
            if mask.len() != t.cells().len() {
                return Err(Error::InvalidArgument("cell mask length differs from cell count".into()));
            }
            mask.clone()
        }
        Cut::Vertices(mask) => {
            if mask.len() != t.vertices().len() {
                return Err(Error::InvalidArgument("vertex mask length differs from vertex count".into()));
            }
            t.cells()
                .iter()
                .map(|c| 2 * c.vertices.iter().filter(|&&v| mask[v]).count() > c.vertices.len())
                .collect()
        }
    };
    if t.dim() == 0 {
        return Err(Error::InvalidArgument("cuts need a current of dimension at least 1".into()));
    }
    let pick = |want: bool| {
        SimplicialCurrent::canonicalize(
            t.vertex_arc().clone(),
            t.dim(),
            t.cells()
                .iter()
                .zip(&side)
                .filter(|(_, s)| **s == want)
                .map(|(c, _)| (c.vertices.clone(), c.mult, None)),
        )
    };
    let a = pick(true);
    let b = pick(false);
    // the interface is the part of ∂A on faces shared with side B
    let b_all: BTreeSet<Vec<usize>> = b
        .cells()
        .iter()
        .flat_map(|c| {
            (0..c.vertices.len()).map(move |drop| {
                let mut f = c.vertices.clone();
                f.remove(drop);
                f
            })
        })
        .collect();
    let da = a.boundary()?;
    let interface: f64 = da
        .cells()
        .iter()
        .filter(|c| b_all.contains(&c.vertices))
        .map(|c| c.mult.unsigned_abs() as f64 * da.cell_volume(c))
        .sum();
    Ok((interface, a.mass(), b.mass()))
}

/// `min over cuts of interface / min(side masses)`.
pub fn cheeger_upper_bound(t: &SimplicialCurrent, cuts: &[Cut]) -> Result<f64> {
    if cuts.is_empty() {
        return Err(Error::InvalidArgument("empty cut list".into()));
    }
    let mut best = f64::INFINITY;
    for (i, cut) in cuts.iter().enumerate() {
        let (interface, a, b) = cut_masses(t, cut)?;
        let small = a.min(b);
        if small <= 0.0 {
            return Err(Error::InvalidArgument(format!("cut {i} leaves one side empty")));
        }
        best = best.min(interface / small);
    }
    Ok(best)
}
