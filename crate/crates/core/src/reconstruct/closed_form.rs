use rayon::prelude::*;

use super::{Anchor, ReconstructionReport, RECOVERY_FLOOR};
use crate::dependence::{GeneratorKind, PointGenerator, RectGenerator};
use crate::dist::Grid;
use crate::error::{Error, Result};
use crate::forward::{minmax_rectangle, JointEval};

fn check_triple(g: &PointGenerator, kind: GeneratorKind) -> Result<()> {
    if g.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            got: g.arity(),
        });
    }
    if g.kind() != kind {
        return Err(Error::InvalidGenerator(format!(
            "expected a {kind:?} generator, got {:?}",
            g.kind()
        )));
    }
    Ok(())
}

type Triple = [Option<f64>; 3];

fn transpose(rows: Vec<Triple>) -> Vec<Vec<Option<f64>>> {
    (0..3).map(|k| rows.iter().map(|r| r[k]).collect()).collect()
}

/// Recovers `(F0, F1, F2)` from `G(y1, y2) = P(max(X0,X1) <= y1, max(X0,X2) <= y2)`:
///
/// ```text
/// F0(y) = G(y, inf) G(inf, y) eta(y, y, y) / G(y, y)
/// F1(y) = G(y, inf) / F0(y)
/// F2(y) = G(inf, y) / F0(y)
/// ```
///
/// Grid points with `G(y, y)` below the floor are filled from their neighbours.
pub fn recover_from_maxima(
    law: &dyn JointEval,
    g: &PointGenerator,
    grid: &Grid,
) -> Result<ReconstructionReport> {
    check_triple(g, GeneratorKind::MaxIndependent)?;
    let inf = f64::INFINITY;
    let rows = grid
        .points()
        .par_iter()
        .map(|&y| -> Result<Triple> {
            let diag = law.eval(y, y)?;
            if !(diag > RECOVERY_FLOOR) {
                return Ok([None; 3]);
            }
            let Ok(eta) = g.eval(&[y, y, y]) else {
                return Ok([None; 3]);
            };
            let m1 = law.eval(y, inf)?;
            let m2 = law.eval(inf, y)?;
            let f0 = m1 * m2 * eta / diag;
            if !(f0 > RECOVERY_FLOOR) {
                return Ok([Some(f0), None, None]);
            }
            Ok([Some(f0), Some(m1 / f0), Some(m2 / f0)])
        })
        .collect::<Result<Vec<_>>>()?;
    ReconstructionReport::from_raw(grid, transpose(rows), Vec::new())
}

/// Survival mirror of [`recover_from_maxima`] for
/// `S(y1, y2) = P(min(X0,X1) > y1, min(X0,X2) > y2)`:
/// `S0(y) = S(y, -inf) S(-inf, y) eta(y, y, y) / S(y, y)`.
pub fn recover_from_minima(
    law: &dyn JointEval,
    g: &PointGenerator,
    grid: &Grid,
) -> Result<ReconstructionReport> {
    check_triple(g, GeneratorKind::MinIndependent)?;
    let ninf = f64::NEG_INFINITY;
    let rows = grid
        .points()
        .par_iter()
        .map(|&y| -> Result<Triple> {
            let diag = law.eval(y, y)?;
            if !(diag > RECOVERY_FLOOR) {
                return Ok([None; 3]);
            }
            let Ok(eta) = g.eval(&[y, y, y]) else {
                return Ok([None; 3]);
            };
            let m1 = law.eval(y, ninf)?;
            let m2 = law.eval(ninf, y)?;
            let s0 = m1 * m2 * eta / diag;
            if !(s0 > RECOVERY_FLOOR) {
                return Ok([Some(1.0 - s0), None, None]);
            }
            Ok([Some(1.0 - s0), Some(1.0 - m1 / s0), Some(1.0 - m2 / s0)])
        })
        .collect::<Result<Vec<_>>>()?;
    ReconstructionReport::from_raw(grid, transpose(rows), Vec::new())
}

/// `|1 - rho|` below which a point is treated as singular.
const SINGULAR_TOL: f64 = 1e-9;

/// Recovers `(F0, F1, F2)` from `R(y1, y2) = P(min(X0,X1) > y1, max(X0,X2) <= y2)`
/// given the rectangle generator and an anchor `F0(x0) = q`.
///
/// With `A(y) = R(y, inf) = S0(y) S1(y)` and `B(y) = R(-inf, y) = F0(y) F2(y)`:
/// below the anchor `rho = R(y, x0) q / (eta A(y) B(x0))` equals
/// `(q - F0) / (1 - F0)`; above it `sigma = R(x0, y) (1 - q) / (eta A(x0) B(y))`
/// equals `1 - q / F0`. Then `S1 = A / S0` and `F2 = B / F0`.
pub fn recover_from_minmax(
    law: &dyn JointEval,
    g: &RectGenerator,
    anchor: Anchor,
    grid: &Grid,
) -> Result<ReconstructionReport> {
    if g.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            got: g.arity(),
        });
    }
    let (x0, q) = (anchor.x0(), anchor.q());
    let a_at = |y: f64| law.eval(y, f64::INFINITY);
    let b_at = |y: f64| law.eval(f64::NEG_INFINITY, y);
    let a_x0 = a_at(x0)?;
    let b_x0 = b_at(x0)?;
    if !(a_x0 > RECOVERY_FLOOR && b_x0 > RECOVERY_FLOOR) {
        return Err(Error::Unrecoverable(format!(
            "anchor x0 = {x0} has A(x0) = {a_x0:e}, B(x0) = {b_x0:e} below the floor"
        )));
    }

    let rows = grid
        .points()
        .par_iter()
        .map(|&y| -> Result<(Triple, bool)> {
            let a = a_at(y)?;
            let b = b_at(y)?;
            let f0 = if y == x0 {
                Some(q)
            } else if y < x0 {
                if !(a > RECOVERY_FLOOR) {
                    None
                } else {
                    let eta = g.eval(&minmax_rectangle(y, x0))?;
                    let rho = law.eval(y, x0)? * q / (eta * b_x0 * a);
                    if (1.0 - rho).abs() < SINGULAR_TOL {
                        return Ok(([None; 3], true));
                    }
                    Some((q - rho) / (1.0 - rho))
                }
            } else if !(b > RECOVERY_FLOOR) {
                None
            } else {
                let eta = g.eval(&minmax_rectangle(x0, y))?;
                let sigma = law.eval(x0, y)? * (1.0 - q) / (eta * a_x0 * b);
                if (1.0 - sigma).abs() < SINGULAR_TOL {
                    return Ok(([None; 3], true));
                }
                Some(q / (1.0 - sigma))
            };
            let Some(f0) = f0 else {
                return Ok(([None; 3], false));
            };
            let s0 = 1.0 - f0;
            let f1 = (s0 > RECOVERY_FLOOR).then(|| 1.0 - a / s0);
            let f2 = (f0 > RECOVERY_FLOOR).then(|| b / f0);
            Ok(([Some(f0), f1, f2], false))
        })
        .collect::<Result<Vec<_>>>()?;
    let singular = rows.iter().filter(|r| r.1).count();
    let mut notes = Vec::new();
    if singular > 0 {
        notes.push(format!("{singular} singular point(s) with rho near 1 skipped"));
    }
    ReconstructionReport::from_raw(grid, transpose(rows.into_iter().map(|r| r.0).collect()), notes)
}
