//! Upper semicontinuity of min-max values along built-in families `T_i → T`.
//!
//! For each `k ≤ K` the verdict is PASS when `λ_k(T_i) ≤ λ_k(T) + slack` for every
//! index past the burn-in, with `slack = slack_rel·λ_k(T) + slack_abs`.

use std::f64::consts::PI;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::cancellation::{cancellation_record, two_cubes, CancellationParams};
use super::spline::{spline_surface, SplineParams};
use crate::current::mesh::icosphere;
use crate::current::{SimplicialCurrent, VertexSet};
use crate::energy::{minmax_spectrum, SpectrumOptions};
use crate::error::{Error, Result};
use crate::flat::{flat_distance, grid_complex, FlatOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Spline,
    RefinedSphere,
    TranslatedChains,
    Cancellation,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Spline,
        Family::RefinedSphere,
        Family::TranslatedChains,
        Family::Cancellation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Spline => "spline",
            Family::RefinedSphere => "refined-sphere",
            Family::TranslatedChains => "translated-chains-in-complex",
            Family::Cancellation => "cancellation",
        }
    }

    /// First index that enters the verdict unless overridden.
    pub fn default_burn_in(self) -> usize {
        match self {
            Family::RefinedSphere => 2,
            _ => 0,
        }
    }

    /// Families violating the volume hypothesis are expected to fail.
    pub fn expected(self) -> &'static str {
        match self {
            Family::Cancellation => "fail-by-design",
            _ => "pass",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s || (s == "translated-chains" && *f == Family::TranslatedChains))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family '{s}'")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepParams {
    pub family: Family,
    /// Number of eigenvalues compared.
    pub count: usize,
    pub slack_rel: f64,
    pub slack_abs: f64,
    pub burn_in: Option<usize>,
    pub spline: SplineParams,
    pub sphere_levels: Vec<usize>,
    /// Translation offsets of the unit square loop.
    pub shifts: Vec<f64>,
    /// Segments per side of the loop used for spectra.
    pub loop_resolution: usize,
    pub cancellation: CancellationParams,
    pub spectrum: SpectrumOptions,
}

impl SweepParams {
    pub fn new(family: Family) -> Self {
        SweepParams {
            family,
            count: 1,
            slack_rel: 0.05,
            slack_abs: 0.05,
            burn_in: None,
            spline: SplineParams::default(),
            sphere_levels: vec![2, 3, 4, 5],
            shifts: vec![0.5, 0.25, 0.125],
            loop_resolution: 64,
            cancellation: CancellationParams::default(),
            spectrum: SpectrumOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub label: String,
    pub mass: f64,
    /// Upper bound on the flat distance to the limit, when one is computed.
    pub flat: Option<f64>,
    pub flat_witness: String,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepLimit {
    pub label: String,
    pub mass: f64,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub k: usize,
    pub limit: f64,
    pub slack: f64,
    /// `max λ_k(T_i) − λ_k(T)` past the burn-in.
    pub max_excess: f64,
    /// `max |λ_k(T_i)/λ_k(T) − 1|` past the burn-in (absolute deviation if `λ_k(T) ≈ 0`).
    pub max_rel_deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub params: SweepParams,
    pub family: String,
    pub burn_in: usize,
    pub expected: String,
    pub rows: Vec<SweepRow>,
    pub limit: SweepLimit,
    /// `mass(T_last) − mass(T)`.
    pub mass_gap: f64,
    pub verdicts: Vec<Verdict>,
    pub all_pass: bool,
}

/// Per-k verdicts from the table; pure so that slack monotonicity is checkable.
pub fn verdicts(rows: &[SweepRow], limit: &[f64], burn_in: usize, slack_rel: f64, slack_abs: f64) -> Result<Vec<Verdict>> {
    let tail: Vec<&SweepRow> = rows.iter().filter(|r| r.index >= burn_in).collect();
    if tail.is_empty() {
        return Err(Error::InvalidArgument(format!("no family member past burn-in {burn_in}")));
    }
    Ok(limit
        .iter()
        .enumerate()
        .map(|(i, &lam)| {
            let slack = slack_rel * lam.abs() + slack_abs;
            let max_excess = tail
                .iter()
                .map(|r| r.eigenvalues[i] - lam)
                .fold(f64::NEG_INFINITY, f64::max);
            let scale = if lam.abs() > 1e-8 { lam.abs() } else { 1.0 };
            let max_rel_deviation = tail
                .iter()
                .map(|r| (r.eigenvalues[i] - lam).abs() / scale)
                .fold(0.0, f64::max);
            Verdict {
                k: i + 1,
                limit: lam,
                slack,
                max_excess,
                max_rel_deviation,
                pass: max_excess <= slack,
            }
        })
        .collect())
}

/// `l(l+1)` with multiplicity `2l+1`, for `l ≥ 1`.
pub fn sphere_spectrum(count: usize) -> Vec<f64> {
    (1..)
        .flat_map(|l: usize| std::iter::repeat((l * (l + 1)) as f64).take(2 * l + 1))
        .take(count)
        .collect()
}

/// Volume enclosed by a closed outward-oriented triangulated surface.
fn enclosed_volume(t: &SimplicialCurrent) -> f64 {
    t.cells()
        .iter()
        .map(|c| {
            let p = t.cell_points(c);
            let det = p[0][0] * (p[1][1] * p[2][2] - p[1][2] * p[2][1])
                - p[0][1] * (p[1][0] * p[2][2] - p[1][2] * p[2][0])
                + p[0][2] * (p[1][0] * p[2][1] - p[1][1] * p[2][0]);
            c.mult as f64 * det / 6.0
        })
        .sum()
}

/// Boundary of `[x0, x0+1] × [0, 1]`, `n` segments per side, counterclockwise.
pub fn square_loop(x0: f64, n: usize) -> Result<SimplicialCurrent> {
    let mut pts = Vec::with_capacity(4 * n);
    let corners = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    for s in 0..4 {
        let (a, b) = (corners[s], corners[(s + 1) % 4]);
        for i in 0..n {
            let u = i as f64 / n as f64;
            pts.push(vec![x0 + a[0] + (b[0] - a[0]) * u, a[1] + (b[1] - a[1]) * u]);
        }
    }
    let m = pts.len();
    let v = Arc::new(VertexSet::new(2, pts)?);
    SimplicialCurrent::new(v, 1, (0..m).map(|i| (vec![i, (i + 1) % m], 1)))
}

fn spectrum(t: &SimplicialCurrent, count: usize, opts: &SpectrumOptions) -> Result<Vec<f64>> {
    Ok(minmax_spectrum(t, count, None, opts)?.eigenvalues)
}

fn rows_and_limit(p: &SweepParams) -> Result<(Vec<SweepRow>, SweepLimit)> {
    let k = p.count;
    match p.family {
        Family::Spline => {
            let sp = &p.spline;
            let limit_mesh = icosphere(sp.sphere_level);
            let rows = sp
                .eps
                .par_iter()
                .enumerate()
                .map(|(i, &e)| {
                    let t = spline_surface(e, sp.profile_resolution, sp.angular_resolution)?;
                    Ok(SweepRow {
                        index: i,
                        label: format!("eps={e}"),
                        mass: t.mass(),
                        flat: None,
                        flat_witness: "construction".into(),
                        eigenvalues: spectrum(&t, k, &p.spectrum)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let limit = SweepLimit {
                label: format!("icosphere level {}", sp.sphere_level),
                mass: limit_mesh.mass(),
                eigenvalues: spectrum(&limit_mesh, k, &p.spectrum)?,
            };
            Ok((rows, limit))
        }
        Family::RefinedSphere => {
            let ball = 4.0 * PI / 3.0;
            let rows = p
                .sphere_levels
                .par_iter()
                .enumerate()
                .map(|(i, &l)| {
                    let t = icosphere(l);
                    Ok(SweepRow {
                        index: i,
                        label: format!("level={l}"),
                        mass: t.mass(),
                        flat: Some(ball - enclosed_volume(&t)),
                        flat_witness: "filling-volume".into(),
                        eigenvalues: spectrum(&t, k, &p.spectrum)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let limit = SweepLimit {
                label: "unit sphere (analytic)".into(),
                mass: 4.0 * PI,
                eigenvalues: sphere_spectrum(k),
            };
            Ok((rows, limit))
        }
        Family::TranslatedChains => {
            if p.shifts.iter().any(|&d| !(d > 0.0 && (1.0 / d - (1.0 / d).round()).abs() < 1e-9)) {
                return Err(Error::InvalidArgument("shifts must be reciprocals of positive integers".into()));
            }
            let base = square_loop(0.0, p.loop_resolution)?;
            let rows = p
                .shifts
                .par_iter()
                .enumerate()
                .map(|(i, &d)| {
                    let t = square_loop(d, p.loop_resolution)?;
                    // flat distance of the coarse loops inside a grid of step d
                    let per = (1.0 / d).round() as usize;
                    let complex = grid_complex(&[-d, -d], &[1.0 + 2.0 * d, 1.0 + d], &[per + 3, per + 2], 1)?;
                    let cert = flat_distance(&square_loop(d, per)?, &square_loop(0.0, per)?, &complex, FlatOptions::default())?;
                    Ok(SweepRow {
                        index: i,
                        label: format!("shift={d}"),
                        mass: t.mass(),
                        flat: Some(cert.value),
                        flat_witness: "lp-shared-complex".into(),
                        eigenvalues: spectrum(&t, k, &p.spectrum)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let limit = SweepLimit {
                label: "unit square loop".into(),
                mass: base.mass(),
                eigenvalues: spectrum(&base, k, &p.spectrum)?,
            };
            Ok((rows, limit))
        }
        Family::Cancellation => {
            let cp = CancellationParams {
                count: k,
                spectrum: p.spectrum.clone(),
                ..p.cancellation.clone()
            };
            let limit_mesh = two_cubes(1, cp.resolution)?;
            let limit_mass = limit_mesh.mass();
            let rows = cp
                .j
                .par_iter()
                .enumerate()
                .map(|(i, &j)| {
                    let r = cancellation_record(j, &cp, limit_mass)?;
                    Ok(SweepRow {
                        index: i,
                        label: format!("j={j}"),
                        mass: r.mass,
                        flat: Some(r.flat.value),
                        flat_witness: r.flat.witness,
                        eigenvalues: r.eigenvalues,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let limit = SweepLimit {
                label: "two cube boundaries".into(),
                mass: limit_mass,
                eigenvalues: spectrum(&limit_mesh, k, &p.spectrum)?,
            };
            Ok((rows, limit))
        }
    }
}

pub fn run_semicontinuity_sweep(p: &SweepParams) -> Result<SweepReport> {
    if p.count == 0 {
        return Err(Error::InvalidArgument("eigenvalue count must be positive".into()));
    }
    if !(p.slack_rel >= 0.0 && p.slack_abs >= 0.0) {
        return Err(Error::InvalidArgument("slack must be non-negative".into()));
    }
    let burn_in = p.burn_in.unwrap_or(p.family.default_burn_in());
    let (rows, limit) = rows_and_limit(p)?;
    let verdicts = verdicts(&rows, &limit.eigenvalues, burn_in, p.slack_rel, p.slack_abs)?;
    let mass_gap = rows.last().map_or(0.0, |r| r.mass - limit.mass);
    Ok(SweepReport {
        params: p.clone(),
        family: p.family.name().into(),
        burn_in,
        expected: p.family.expected().into(),
        all_pass: verdicts.iter().all(|v| v.pass),
        rows,
        limit,
        mass_gap,
        verdicts,
    })
}
