//! Recovery of component distributions from the joint law of the extremes.
//!
//! The three-component schemes have pointwise closed forms
//! ([`recover_from_maxima`], [`recover_from_minima`], [`recover_from_minmax`]);
//! the scaled schemes are solved by ray telescoping
//! ([`recover_scaled_extremes`]). The generator is always an input.

mod closed_form;
mod demo;
mod telescoping;
mod uniqueness;

pub use closed_form::{recover_from_maxima, recover_from_minima, recover_from_minmax};
pub use demo::{single_max_nonuniqueness_demo, NonUniquenessDemo};
pub use telescoping::{
    recover_scaled_extremes, recover_scaled_extremes_with, solve_peeling, ExtremeKind, PeelValue, Support,
    TelescopeOptions,
};
pub use uniqueness::{check_uniqueness, UniquenessVerdict, DEFAULT_TOL};

use std::fmt::Write as _;

use crate::dist::{Distribution, Grid, GridCdf, LowerTail, RepairStats, UpperTail};
use crate::error::{Error, Result};

/// Floor applied to every denominator of a recovery formula.
pub const RECOVERY_FLOOR: f64 = 1e-12;

/// A known point `F0(x0) = q` of the shared component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    x0: f64,
    q: f64,
}

impl Anchor {
    pub fn new(x0: f64, q: f64) -> Result<Self> {
        if !x0.is_finite() {
            return Err(Error::InvalidAnchor(format!("x0 must be finite, got {x0}")));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidAnchor(format!("q must lie in (0, 1), got {q}")));
        }
        Ok(Self { x0, q })
    }

    /// Anchor at the `q`-quantile of `f0`.
    pub fn at_quantile(f0: &Distribution, q: f64) -> Result<Self> {
        let x0 = f0
            .quantile(q)
            .map_err(|e| Error::InvalidAnchor(e.to_string()))?;
        Self::new(x0, f0.cdf(x0))
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Recovered components and diagnostics.
#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    pub recovered: Vec<GridCdf>,
    /// Per-component sup-norm error at the grid points, once truth is attached.
    pub sup_errors: Option<Vec<f64>>,
    /// Values moved by the clamp to `[0, 1]` or the running maximum.
    pub clip_count: usize,
    pub repair_mass: f64,
    /// Grid points that failed the denominator floor and were filled in.
    pub excluded: usize,
    /// Largest telescoping chain over all components (0 for closed forms).
    pub iterations: usize,
    pub component_iterations: Vec<usize>,
    pub notes: Vec<String>,
    /// DKW half-width of the sample behind a plug-in run.
    pub dkw_bound: Option<f64>,
    /// `dkw_bound` times the amplification factor for divisions in recovery.
    pub error_budget: Option<f64>,
    truth: Option<Vec<Distribution>>,
}

impl ReconstructionReport {
    pub(crate) fn from_raw(grid: &Grid, raw: Vec<Vec<Option<f64>>>, notes: Vec<String>) -> Result<Self> {
        let mut recovered = Vec::with_capacity(raw.len());
        let mut clip_count = 0;
        let mut repair_mass = 0.0;
        let mut excluded = 0;
        let mut notes = notes;
        for (k, col) in raw.into_iter().enumerate() {
            let missing = col.iter().filter(|v| v.is_none()).count();
            let filled = fill_gaps(grid, &col).ok_or_else(|| {
                Error::Unrecoverable(format!(
                    "component {k}: every grid point fell below the floor {RECOVERY_FLOOR:e}"
                ))
            })?;
            if missing > 0 {
                notes.push(format!("component {k}: {missing} grid point(s) below floor, interpolated"));
            }
            excluded += missing;
            let (cdf, stats): (GridCdf, RepairStats) =
                GridCdf::repaired(grid.clone(), &filled, LowerTail::Zero, UpperTail::One)?;
            clip_count += stats.events;
            repair_mass += stats.mass;
            recovered.push(cdf);
        }
        Ok(Self {
            recovered,
            sup_errors: None,
            clip_count,
            repair_mass,
            excluded,
            iterations: 0,
            component_iterations: Vec::new(),
            notes,
            dkw_bound: None,
            error_budget: None,
            truth: None,
        })
    }

    /// Attaches the true components and fills `sup_errors`.
    pub fn with_truth(mut self, truth: &[Distribution]) -> Result<Self> {
        if truth.len() != self.recovered.len() {
            return Err(Error::ArityMismatch {
                expected: self.recovered.len(),
                got: truth.len(),
            });
        }
        self.sup_errors = Some(
            self.recovered
                .iter()
                .zip(truth)
                .map(|(r, t)| {
                    r.grid()
                        .points()
                        .iter()
                        .zip(r.values())
                        .map(|(&y, &v)| (v - t.cdf(y)).abs())
                        .fold(0.0, f64::max)
                })
                .collect(),
        );
        self.truth = Some(truth.to_vec());
        Ok(self)
    }

    pub fn truth(&self) -> Option<&[Distribution]> {
        self.truth.as_deref()
    }

    /// Sup-error of component `k` over grid points whose true CDF lies in
    /// `[lo, hi]`. `None` without truth or when no point qualifies.
    pub fn sup_error_in_quantile_range(&self, k: usize, lo: f64, hi: f64) -> Option<f64> {
        let t = self.truth.as_ref()?.get(k)?;
        let r = self.recovered.get(k)?;
        r.grid()
            .points()
            .iter()
            .zip(r.values())
            .filter(|(&y, _)| (lo..=hi).contains(&t.cdf(y)))
            .map(|(&y, &v)| (v - t.cdf(y)).abs())
            .reduce(f64::max)
    }

    pub fn max_sup_error(&self) -> Option<f64> {
        self.sup_errors
            .as_ref()
            .map(|e| e.iter().copied().fold(0.0, f64::max))
    }

    /// One row per component and grid point, then a `#summary,` footer.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("component,y,recovered,truth,abs_error\n");
        for (k, r) in self.recovered.iter().enumerate() {
            let t = self.truth.as_ref().map(|t| &t[k]);
            for (&y, &v) in r.grid().points().iter().zip(r.values()) {
                match t {
                    Some(t) => {
                        let tv = t.cdf(y);
                        let _ = writeln!(
                            out,
                            "{k},{},{},{},{}",
                            fmt_real(y),
                            fmt_real(v),
                            fmt_real(tv),
                            fmt_real((v - tv).abs())
                        );
                    }
                    None => {
                        let _ = writeln!(out, "{k},{},{},,", fmt_real(y), fmt_real(v));
                    }
                }
            }
        }
        out.push_str(&self.summary_line());
        out.push('\n');
        out
    }

    pub fn summary_line(&self) -> String {
        let mut s = String::from("#summary");
        match self.max_sup_error() {
            Some(e) => {
                let _ = write!(s, ",sup_error={}", fmt_real(e));
                for (k, e) in self.sup_errors.iter().flatten().enumerate() {
                    let _ = write!(s, ",sup_error_{k}={}", fmt_real(*e));
                }
            }
            None => s.push_str(",sup_error="),
        }
        let _ = write!(
            s,
            ",clip_count={},repair_mass={},excluded={},iterations={}",
            self.clip_count,
            fmt_real(self.repair_mass),
            self.excluded,
            self.iterations
        );
        if let Some(b) = self.dkw_bound {
            let _ = write!(s, ",dkw_bound={}", fmt_real(b));
        }
        if let Some(b) = self.error_budget {
            let _ = write!(s, ",error_budget={},budget_vacuous={}", fmt_real(b), b >= 1.0);
        }
        s
    }
}

/// Seventeen significant digits, `.` decimal point.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x > 0.0 {
        "inf".into()
    } else if x < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

/// Linear interpolation across `None` runs, constant beyond the ends.
fn fill_gaps(grid: &Grid, col: &[Option<f64>]) -> Option<Vec<f64>> {
    let known: Vec<usize> = (0..col.len()).filter(|&i| col[i].is_some()).collect();
    let (&first, &last) = (known.first()?, known.last()?);
    let x = grid.points();
    let mut out = vec![0.0; col.len()];
    for (i, o) in out.iter_mut().enumerate() {
        *o = match col[i] {
            Some(v) => v,
            None if i < first => col[first].unwrap(),
            None if i > last => col[last].unwrap(),
            None => {
                let r = known.partition_point(|&k| k < i);
                let (lo, hi) = (known[r - 1], known[r]);
                let w = (x[i] - x[lo]) / (x[hi] - x[lo]);
                let (vl, vh) = (col[lo].unwrap(), col[hi].unwrap());
                vl + w * (vh - vl)
            }
        };
    }
    Some(out)
}
