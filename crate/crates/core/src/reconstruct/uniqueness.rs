use crate::dist::Grid;
use crate::error::{Error, Result};
use crate::forward::JointExtremeLaw;

/// Default tolerance for closed-form laws.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Outcome of comparing two models of the same scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessVerdict {
    /// Sup of `|A - B|` over the probe lattice with infinite edges.
    pub joint_distance: f64,
    /// Per-component sup distance over the probe points.
    pub component_distances: Vec<f64>,
    pub component_distance: f64,
    /// Probe point attaining `joint_distance`.
    pub joint_witness: (f64, f64),
    /// Equal joint laws with components further apart than `10 * tol`.
    pub contradiction: bool,
    pub tol: f64,
}

impl UniquenessVerdict {
    pub fn joint_equal(&self) -> bool {
        self.joint_distance <= self.tol
    }
}

pub fn check_uniqueness(
    a: &JointExtremeLaw,
    b: &JointExtremeLaw,
    probe: &Grid,
    tol: f64,
) -> Result<UniquenessVerdict> {
    if a.scheme() != b.scheme() {
        return Err(Error::SchemeMismatch(format!(
            "{} vs {}",
            a.scheme(),
            b.scheme()
        )));
    }
    if a.scales() != b.scales() || a.components().len() != b.components().len() {
        return Err(Error::SchemeMismatch(
            "scale vectors or component counts differ".into(),
        ));
    }
    let mut axis = Vec::with_capacity(probe.len() + 2);
    axis.push(f64::NEG_INFINITY);
    axis.extend_from_slice(probe.points());
    axis.push(f64::INFINITY);

    let mut joint_distance = 0.0;
    let mut joint_witness = (axis[0], axis[0]);
    for &y1 in &axis {
        for &y2 in &axis {
            let d = (a.eval(y1, y2)? - b.eval(y1, y2)?).abs();
            if d > joint_distance {
                joint_distance = d;
                joint_witness = (y1, y2);
            }
        }
    }
    let component_distances: Vec<f64> = a
        .components()
        .iter()
        .zip(b.components())
        .map(|(fa, fb)| {
            probe
                .points()
                .iter()
                .map(|&y| (fa.cdf(y) - fb.cdf(y)).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let component_distance = component_distances.iter().copied().fold(0.0, f64::max);
    Ok(UniquenessVerdict {
        joint_distance,
        component_distance,
        component_distances,
        joint_witness,
        contradiction: joint_distance <= tol && component_distance > 10.0 * tol,
        tol,
    })
}
