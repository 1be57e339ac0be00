//! Dependence generators.
//!
//! A [`PointGenerator`] is the correction factor `eta(x_1, .., x_n)` of a
//! max-independent (joint CDF) or min-independent (joint survival) vector.
//! A [`RectGenerator`] is the set function on rectangles of a
//! quasi-independent vector.
//!
//! Only `eta > 0` is required of a point generator, together with the
//! boundary limit: 1 when any coordinate is `+inf` for max-independence and
//! 1 when any coordinate is `-inf` for min-independence. Generators ship
//! with exact values at infinite coordinates.

use std::fmt;
use std::sync::Arc;

use crate::dist::{split_args, split_call, Distribution, Grid};
use crate::error::{Error, Result};

/// Denominator floor inside generator formulas.
pub const GENERATOR_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    MaxIndependent,
    MinIndependent,
}

impl GeneratorKind {
    /// The coordinate value at which the generator must equal 1.
    pub fn neutral_point(self) -> f64 {
        match self {
            Self::MaxIndependent => f64::INFINITY,
            Self::MinIndependent => f64::NEG_INFINITY,
        }
    }
}

pub type PointFn = Arc<dyn Fn(&[f64]) -> Result<f64> + Send + Sync>;
pub type RectFn = Arc<dyn Fn(&[Interval]) -> Result<f64> + Send + Sync>;

/// Point-form generator of fixed arity.
#[derive(Clone)]
pub struct PointGenerator {
    arity: usize,
    kind: GeneratorKind,
    form: PointForm,
}

#[derive(Clone)]
enum PointForm {
    Independent,
    SharedComponent(Distribution),
    Fgm { theta: f64, reference: Distribution },
    Tabulated(Arc<Lattice2>),
    /// Arity-3 view of an arity-2 generator that ignores the first slot.
    Lifted(Box<PointGenerator>),
    Custom { label: String, f: PointFn },
}

impl fmt::Debug for PointGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointGenerator")
            .field("arity", &self.arity)
            .field("kind", &self.kind)
            .field("form", &self.label())
            .finish()
    }
}

impl PointGenerator {
    /// `eta == 1`: independent components.
    pub fn independent(arity: usize, kind: GeneratorKind) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidGenerator("arity must be >= 1".into()));
        }
        Ok(Self {
            arity,
            kind,
            form: PointForm::Independent,
        })
    }

    /// Generator of `(max(X0, X1), max(X0, X2))` for independent `X`s:
    /// `F0(min(y1, y2)) / (F0(y1) F0(y2))`.
    pub fn shared_component(f0: Distribution) -> Self {
        Self {
            arity: 2,
            kind: GeneratorKind::MaxIndependent,
            form: PointForm::SharedComponent(f0),
        }
    }

    /// Survival mirror for `(min(X0, X1), min(X0, X2))`:
    /// `S0(max(y1, y2)) / (S0(y1) S0(y2))`.
    pub fn shared_component_min(f0: Distribution) -> Self {
        Self {
            arity: 2,
            kind: GeneratorKind::MinIndependent,
            form: PointForm::SharedComponent(f0),
        }
    }

    /// Farlie-Gumbel-Morgenstern style factor. For max-independence
    /// `1 + theta * prod(1 - H(x_i))`, for min-independence
    /// `1 + theta * prod(H(x_i))`, with `H` a reference CDF and `|theta| < 1`.
    pub fn fgm(arity: usize, kind: GeneratorKind, theta: f64, reference: Distribution) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidGenerator("arity must be >= 1".into()));
        }
        if !(theta.abs() < 1.0) {
            return Err(Error::InvalidGenerator(format!(
                "fgm needs |theta| < 1, got {theta}"
            )));
        }
        Ok(Self {
            arity,
            kind,
            form: PointForm::Fgm { theta, reference },
        })
    }

    /// Bilinear interpolation on a square lattice (arity 2). Outside the
    /// lattice the nearest edge value is used, except at the neutral
    /// infinity of `kind`, where the value is 1.
    pub fn tabulated(lattice: Lattice2, kind: GeneratorKind) -> Self {
        Self {
            arity: 2,
            kind,
            form: PointForm::Tabulated(Arc::new(lattice)),
        }
    }

    /// Arbitrary closure.
    pub fn custom(
        arity: usize,
        kind: GeneratorKind,
        label: impl Into<String>,
        f: impl Fn(&[f64]) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            arity,
            kind,
            form: PointForm::Custom {
                label: label.into(),
                f: Arc::new(f),
            },
        }
    }

    /// Turns an arity-2 generator of `(Y1, Y2)` into the arity-3 form
    /// `eta(z, y1, y2) = eta(y1, y2)` used by the three-component schemes.
    /// Arity-3 generators are returned unchanged.
    pub fn lift_to_triple(self) -> Result<Self> {
        match self.arity {
            3 => Ok(self),
            2 => Ok(Self {
                arity: 3,
                kind: self.kind,
                form: PointForm::Lifted(Box::new(self)),
            }),
            n => Err(Error::ArityMismatch { expected: 2, got: n }),
        }
    }

    /// Rectangle form. Only the independent generator has one.
    pub fn lift_to_rect(&self) -> Result<RectGenerator> {
        match self.form {
            PointForm::Independent => Ok(RectGenerator::independent(self.arity)),
            _ => Err(Error::InvalidGenerator(format!(
                "{} has no rectangle form",
                self.label()
            ))),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn is_independent(&self) -> bool {
        matches!(self.form, PointForm::Independent)
    }

    pub fn label(&self) -> String {
        match &self.form {
            PointForm::Independent => "independent".into(),
            PointForm::SharedComponent(d) => format!("shared_component({d})"),
            PointForm::Fgm { theta, reference } => format!("fgm({theta},{reference})"),
            PointForm::Tabulated(l) => format!("tabulated({}x{})", l.points.len(), l.points.len()),
            PointForm::Lifted(inner) => format!("lifted({})", inner.label()),
            PointForm::Custom { label, .. } => label.clone(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: x.len(),
            });
        }
        match &self.form {
            PointForm::Independent => Ok(1.0),
            PointForm::SharedComponent(f0) => shared_eval(f0, self.kind, x[0], x[1]),
            PointForm::Fgm { theta, reference } => {
                let prod: f64 = match self.kind {
                    GeneratorKind::MaxIndependent => {
                        x.iter().map(|&xi| reference.survival(xi)).product()
                    }
                    GeneratorKind::MinIndependent => {
                        x.iter().map(|&xi| reference.cdf(xi)).product()
                    }
                };
                Ok(1.0 + theta * prod)
            }
            PointForm::Tabulated(lat) => {
                let n = self.kind.neutral_point();
                if x[0] == n || x[1] == n {
                    Ok(1.0)
                } else {
                    Ok(lat.eval(x[0], x[1]))
                }
            }
            PointForm::Lifted(inner) => inner.eval(&x[1..]),
            PointForm::Custom { f, .. } => f(x),
        }
    }
}

fn shared_eval(f0: &Distribution, kind: GeneratorKind, y1: f64, y2: f64) -> Result<f64> {
    let (num, d1, d2) = match kind {
        GeneratorKind::MaxIndependent => {
            if y1 == f64::INFINITY || y2 == f64::INFINITY {
                return Ok(1.0);
            }
            (f0.cdf(y1.min(y2)), f0.cdf(y1), f0.cdf(y2))
        }
        GeneratorKind::MinIndependent => {
            if y1 == f64::NEG_INFINITY || y2 == f64::NEG_INFINITY {
                return Ok(1.0);
            }
            (f0.survival(y1.max(y2)), f0.survival(y1), f0.survival(y2))
        }
    };
    let den = d1 * d2;
    if den <= GENERATOR_FLOOR {
        return Err(Error::GeneratorDomain {
            point: vec![y1, y2],
            reason: format!("denominator {den:e} below floor {GENERATOR_FLOOR:e}"),
        });
    }
    Ok(num / den)
}

/// Square lattice of generator values, `values[i][j]` at `(points[i], points[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice2 {
    points: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl Lattice2 {
    pub fn new(points: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        Grid::new(points.clone())?;
        if values.len() != points.len() || values.iter().any(|r| r.len() != points.len()) {
            return Err(Error::InvalidGenerator(format!(
                "lattice must be {0}x{0}",
                points.len()
            )));
        }
        if let Some(v) = values.iter().flatten().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidGenerator(format!(
                "lattice values must be finite and > 0, got {v}"
            )));
        }
        Ok(Self { points, values })
    }

    /// Header row of grid points, then one row of values per grid point.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let parse_row = |line: &str| -> Result<Vec<f64>> {
            line.split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("lattice cell {c:?}: {e}")))
                })
                .collect()
        };
        let header = rows
            .next()
            .ok_or_else(|| Error::Parse("empty lattice file".into()))?;
        let points = parse_row(header)?;
        let values = rows.map(parse_row).collect::<Result<Vec<_>>>()?;
        Self::new(points, values)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let (i, wx) = locate(&self.points, x);
        let (j, wy) = locate(&self.points, y);
        let v = &self.values;
        let top = v[i][j] * (1.0 - wy) + v[i][j + 1] * wy;
        let bot = v[i + 1][j] * (1.0 - wy) + v[i + 1][j + 1] * wy;
        top * (1.0 - wx) + bot * wx
    }
}

/// Segment index and weight, clamped to the lattice.
fn locate(points: &[f64], x: f64) -> (usize, f64) {
    let n = points.len();
    if x <= points[0] {
        return (0, 0.0);
    }
    if x >= points[n - 1] {
        return (n - 2, 1.0);
    }
    let i = points.partition_point(|&p| p <= x) - 1;
    (i, (x - points[i]) / (points[i + 1] - points[i]))
}

/// Half-open interval `(lo, hi]`; `hi = +inf` denotes `(lo, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn full() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn is_full(&self) -> bool {
        self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn prob(&self, d: &Distribution) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            (d.cdf(self.hi) - d.cdf(self.lo)).max(0.0)
        }
    }
}

/// Rectangle-form generator of a quasi-independent vector.
#[derive(Clone)]
pub struct RectGenerator {
    arity: usize,
    form: RectForm,
}

#[derive(Clone)]
enum RectForm {
    Independent,
    /// `1 + theta * prod(1 - nu(B_j))` for a reference law `nu`.
    Perturbed { theta: f64, reference: Distribution },
    Custom { label: String, f: RectFn },
}

impl fmt::Debug for RectGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RectGenerator")
            .field("arity", &self.arity)
            .field("form", &self.label())
            .finish()
    }
}

impl RectGenerator {
    pub fn independent(arity: usize) -> Self {
        Self {
            arity,
            form: RectForm::Independent,
        }
    }

    /// Equals 1 as soon as one side is the whole line, since `nu(R) = 1`.
    pub fn perturbed(arity: usize, theta: f64, reference: Distribution) -> Result<Self> {
        if !(theta.abs() < 1.0) {
            return Err(Error::InvalidGenerator(format!(
                "perturbed rectangle generator needs |theta| < 1, got {theta}"
            )));
        }
        Ok(Self {
            arity,
            form: RectForm::Perturbed { theta, reference },
        })
    }

    pub fn custom(
        arity: usize,
        label: impl Into<String>,
        f: impl Fn(&[Interval]) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            arity,
            form: RectForm::Custom {
                label: label.into(),
                f: Arc::new(f),
            },
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_independent(&self) -> bool {
        matches!(self.form, RectForm::Independent)
    }

    pub fn label(&self) -> String {
        match &self.form {
            RectForm::Independent => "independent".into(),
            RectForm::Perturbed { theta, reference } => format!("perturbed({theta},{reference})"),
            RectForm::Custom { label, .. } => label.clone(),
        }
    }

    pub fn eval(&self, rect: &[Interval]) -> Result<f64> {
        if rect.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: rect.len(),
            });
        }
        match &self.form {
            RectForm::Independent => Ok(1.0),
            RectForm::Perturbed { theta, reference } => {
                if rect.iter().any(Interval::is_full) {
                    return Ok(1.0);
                }
                let prod: f64 = rect.iter().map(|b| 1.0 - b.prob(reference)).product();
                Ok(1.0 + theta * prod)
            }
            RectForm::Custom { f, .. } => f(rect),
        }
    }
}

/// Result of [`rect_prob_from_generator`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectProbability {
    pub value: f64,
    /// The raw product fell outside `[0, 1]` and was clamped.
    pub clamped: bool,
}

/// `prod_j P(X_j in B_j) * eta(B_1 x .. x B_n)`, clamped to `[0, 1]`.
pub fn rect_prob_from_generator(
    marginals: &[Distribution],
    g: &RectGenerator,
    rect: &[Interval],
) -> Result<RectProbability> {
    if marginals.len() != g.arity() {
        return Err(Error::ArityMismatch {
            expected: g.arity(),
            got: marginals.len(),
        });
    }
    if rect.len() != g.arity() {
        return Err(Error::ArityMismatch {
            expected: g.arity(),
            got: rect.len(),
        });
    }
    let base: f64 = marginals
        .iter()
        .zip(rect)
        .map(|(d, b)| b.prob(d))
        .product();
    let raw = base * g.eval(rect)?;
    let value = raw.clamp(0.0, 1.0);
    Ok(RectProbability {
        value,
        clamped: value != raw,
    })
}

/// Probe-lattice summary of a point generator.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorReport {
    pub evaluated: usize,
    pub min: f64,
    pub max: f64,
    /// Every defined probe value is `> 0`.
    pub positive: bool,
    /// Every probe with one or more neutral-infinity coordinates gave 1.
    pub limits_ok: bool,
    pub max_limit_deviation: f64,
    /// Probe points where evaluation returned an error.
    pub undefined: usize,
}

impl GeneratorReport {
    pub fn passes(&self) -> bool {
        self.positive && self.limits_ok && self.undefined == 0
    }

    /// Whether all probe values lie in `(0, 1]`.
    pub fn within_unit_interval(&self) -> bool {
        self.min > 0.0 && self.max <= 1.0
    }
}

const LIMIT_TOL: f64 = 1e-12;

fn axis_subsample(points: &[f64], cap: usize) -> Vec<f64> {
    if points.len() <= cap {
        return points.to_vec();
    }
    let step = (points.len() - 1) as f64 / (cap - 1) as f64;
    (0..cap)
        .map(|i| points[((i as f64 * step).round() as usize).min(points.len() - 1)])
        .collect()
}

/// Evaluates `g` on `probe^n` (at most three independent axes; further
/// coordinates repeat the first three) and at every probe point with one
/// coordinate, and with all coordinates, moved to the neutral infinity.
pub fn validate_generator(g: &PointGenerator, probe: &Grid) -> GeneratorReport {
    let n = g.arity();
    let axes = n.min(3);
    let cap = match axes {
        1 => 1000,
        2 => 100,
        _ => 25,
    };
    let axis = axis_subsample(probe.points(), cap);
    let m = axis.len();
    let total = m.pow(axes as u32);
    let neutral = g.kind().neutral_point();

    let mut report = GeneratorReport {
        evaluated: 0,
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        positive: true,
        limits_ok: true,
        max_limit_deviation: 0.0,
        undefined: 0,
    };
    let mut point = vec![0.0; n];
    for idx in 0..total {
        let mut rem = idx;
        let mut base = [0.0; 3];
        for b in base.iter_mut().take(axes) {
            *b = axis[rem % m];
            rem /= m;
        }
        for (j, p) in point.iter_mut().enumerate() {
            *p = base[j % axes];
        }
        match g.eval(&point) {
            Ok(v) => {
                report.evaluated += 1;
                report.min = report.min.min(v);
                report.max = report.max.max(v);
                if !(v > 0.0) {
                    report.positive = false;
                }
            }
            Err(_) => report.undefined += 1,
        }
        for slot in 0..=n {
            let mut q = point.clone();
            if slot == n {
                q.iter_mut().for_each(|c| *c = neutral);
            } else {
                q[slot] = neutral;
            }
            let dev = match g.eval(&q) {
                Ok(v) => (v - 1.0).abs(),
                Err(_) => f64::INFINITY,
            };
            report.max_limit_deviation = report.max_limit_deviation.max(dev);
            if !(dev <= LIMIT_TOL) {
                report.limits_ok = false;
            }
        }
    }
    report
}

/// Parses a generator literal: `independent`, `shared_component(dist)`,
/// `shared_component_min(dist)`, `fgm(theta, dist)`, `fgm_min(theta, dist)`
/// or `tabulated(path)`. `arity` applies to the arity-free forms, and
/// `kind` to `independent` and `tabulated`.
pub fn parse_point_generator(
    spec: &str,
    arity: usize,
    kind: GeneratorKind,
    read_file: &dyn Fn(&str) -> Result<String>,
) -> Result<PointGenerator> {
    let s = spec.trim();
    if s == "independent" {
        return PointGenerator::independent(arity, kind);
    }
    let (name, inner) = split_call(s)?;
    let args = split_args(inner);
    let dist_arg = |i: usize| -> Result<Distribution> {
        args.get(i)
            .ok_or_else(|| Error::Parse(format!("{name} is missing argument {i} in {s:?}")))?
            .parse()
    };
    let theta_arg = || -> Result<f64> {
        args.first()
            .ok_or_else(|| Error::Parse(format!("{name} needs theta in {s:?}")))?
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("theta in {s:?}: {e}")))
    };
    match name {
        "independent" => PointGenerator::independent(arity, kind),
        "shared_component" => Ok(PointGenerator::shared_component(dist_arg(0)?)),
        "shared_component_min" => Ok(PointGenerator::shared_component_min(dist_arg(0)?)),
        "fgm" => PointGenerator::fgm(arity, GeneratorKind::MaxIndependent, theta_arg()?, dist_arg(1)?),
        "fgm_min" => PointGenerator::fgm(arity, GeneratorKind::MinIndependent, theta_arg()?, dist_arg(1)?),
        "tabulated" => {
            let text = read_file(inner.trim())?;
            Ok(PointGenerator::tabulated(Lattice2::from_csv_str(&text)?, kind))
        }
        other => Err(Error::Parse(format!("unknown generator {other:?}"))),
    }
}

/// Parses a rectangle generator literal: `independent` or
/// `perturbed(theta, dist)`.
pub fn parse_rect_generator(spec: &str, arity: usize) -> Result<RectGenerator> {
    let s = spec.trim();
    if s == "independent" {
        return Ok(RectGenerator::independent(arity));
    }
    let (name, inner) = split_call(s)?;
    let args = split_args(inner);
    match (name, args.as_slice()) {
        ("independent", []) => Ok(RectGenerator::independent(arity)),
        ("perturbed", [theta, dist]) => {
            let theta = theta
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("theta in {s:?}: {e}")))?;
            RectGenerator::perturbed(arity, theta, dist.parse()?)
        }
        _ => Err(Error::Parse(format!("unknown rectangle generator {s:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unif() -> Distribution {
        Distribution::uniform(0.0, 1.0).unwrap()
    }

    /// Midpoint rule on a product of intervals, for the rectangle oracle.
    fn integrate_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        (0..n).map(|i| f(a + h * (i as f64 + 0.5))).sum::<f64>() * h
    }

    #[test]
    fn shared_component_examples() {
        let g = PointGenerator::shared_component(unif());
        assert!((g.eval(&[0.5, 0.5]).unwrap() - 2.0).abs() < 1e-15);
        for y in [-3.0, 0.2, 0.7, 5.0] {
            assert_eq!(g.eval(&[f64::INFINITY, y]).unwrap(), 1.0);
            assert_eq!(g.eval(&[y, f64::INFINITY]).unwrap(), 1.0);
        }
        let e = Distribution::exponential(1.0).unwrap();
        let g = PointGenerator::shared_component(e);
        let expect = 1.0 / (1.0 - (-2.0f64).exp());
        assert!((g.eval(&[1.0, 2.0]).unwrap() - expect).abs() < 1e-14);
        assert!((expect - 1.1565).abs() < 1e-4);
        assert!(matches!(
            g.eval(&[-1.0, 2.0]),
            Err(Error::GeneratorDomain { .. })
        ));
    }

    /// P(Y1 <= 1, Y2 <= 2) / (F_Y1(1) F_Y2(2)) by integrating over the
    /// density of X0, with X0, X1, X2 ~ exponential(1) independent.
    #[test]
    fn shared_component_matches_integrated_law() {
        let f = |x: f64| 1.0 - (-x).exp();
        let joint = integrate_1d(|x0| (-x0).exp(), 0.0, 1.0, 20_000) * f(1.0) * f(2.0);
        let fy1 = f(1.0) * f(1.0);
        let fy2 = f(2.0) * f(2.0);
        let g = PointGenerator::shared_component(Distribution::exponential(1.0).unwrap());
        assert!((joint / (fy1 * fy2) - g.eval(&[1.0, 2.0]).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn independent_examples() {
        let g = PointGenerator::independent(2, GeneratorKind::MaxIndependent).unwrap();
        assert_eq!(g.eval(&[0.3, -7.0]).unwrap(), 1.0);
        let g = PointGenerator::independent(3, GeneratorKind::MaxIndependent).unwrap();
        assert_eq!(g.eval(&[f64::INFINITY, 0.0, 0.0]).unwrap(), 1.0);
        let r = g.lift_to_rect().unwrap();
        let rect = [Interval::new(0.0, 1.0), Interval::new(-1.0, 2.0), Interval::full()];
        assert_eq!(r.eval(&rect).unwrap(), 1.0);
        assert!(PointGenerator::independent(0, GeneratorKind::MaxIndependent).is_err());
        assert!(matches!(
            g.eval(&[1.0, 2.0]),
            Err(Error::ArityMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn validate_examples() {
        let grid = Grid::uniform(0.1, 0.9, 17).unwrap();
        let ind = PointGenerator::independent(2, GeneratorKind::MaxIndependent).unwrap();
        let r = validate_generator(&ind, &grid);
        assert!(r.passes());
        assert_eq!((r.min, r.max), (1.0, 1.0));

        let shared = PointGenerator::shared_component(unif());
        let r = validate_generator(&shared, &grid);
        assert!(r.passes(), "{r:?}");
        assert!(r.min >= 1.0);

        let zero_at = PointGenerator::custom(2, GeneratorKind::MaxIndependent, "hole", |x| {
            if x[0] == 0.5 && x[1] == 0.5 {
                Ok(0.0)
            } else {
                Ok(1.0)
            }
        });
        let r = validate_generator(&zero_at, &grid);
        assert!(!r.positive);
        assert!(r.limits_ok);
        assert!(!r.passes());
    }

    #[test]
    fn validate_flags_wrong_limit() {
        let grid = Grid::uniform(0.0, 1.0, 5).unwrap();
        let two = PointGenerator::custom(3, GeneratorKind::MaxIndependent, "two", |_| Ok(2.0));
        let r = validate_generator(&two, &grid);
        assert!(r.positive);
        assert!(!r.limits_ok);
        assert_eq!(r.max_limit_deviation, 1.0);
    }

    #[test]
    fn validate_high_arity_subsamples() {
        let grid = Grid::uniform(0.0, 1.0, 200).unwrap();
        let g = PointGenerator::fgm(
            5,
            GeneratorKind::MaxIndependent,
            0.5,
            Distribution::exponential(1.0).unwrap(),
        )
        .unwrap();
        let r = validate_generator(&g, &grid);
        assert_eq!(r.evaluated, 25usize.pow(3));
        assert!(r.passes());
    }

    #[test]
    fn shared_min_and_fgm_limits() {
        let grid = Grid::uniform(-2.0, 2.0, 21).unwrap();
        let g = PointGenerator::shared_component_min(Distribution::gumbel(0.0, 1.0).unwrap());
        let r = validate_generator(&g, &grid);
        assert!(r.passes(), "{r:?}");
        assert!(r.min >= 1.0 - 1e-15);
        let f = PointGenerator::fgm(
            3,
            GeneratorKind::MinIndependent,
            -0.7,
            Distribution::gumbel(0.0, 1.0).unwrap(),
        )
        .unwrap();
        assert!(validate_generator(&f, &grid).passes());
        assert!(PointGenerator::fgm(2, GeneratorKind::MaxIndependent, 1.0, unif()).is_err());
    }

    #[test]
    fn rect_prob_examples() {
        let m = vec![unif(), unif()];
        let g = RectGenerator::independent(2);
        let p = rect_prob_from_generator(&m, &g, &[Interval::new(0.0, 0.5), Interval::new(0.25, 1.0)])
            .unwrap();
        assert!((p.value - 0.375).abs() < 1e-15);
        assert!(!p.clamped);
        let p = rect_prob_from_generator(&m, &g, &[Interval::full(), Interval::full()]).unwrap();
        assert_eq!(p.value, 1.0);
        assert!(rect_prob_from_generator(&m[..1], &g, &[Interval::full()]).is_err());
    }

    #[test]
    fn rect_prob_clamps_and_counts() {
        let m = vec![unif(), unif()];
        let g = RectGenerator::custom(2, "big", |_| Ok(10.0));
        let p = rect_prob_from_generator(&m, &g, &[Interval::new(0.0, 0.5), Interval::full()]).unwrap();
        assert_eq!(p.value, 1.0);
        assert!(p.clamped);
    }

    /// P(y1 < X0 <= y2, X1 > y1, X2 <= y2) by a 3-D composite Simpson rule
    /// over the joint density of independent exponential(1), (2), (3) variables.
    #[test]
    fn rect_prob_matches_triple_integral() {
        let m = vec![
            Distribution::exponential(1.0).unwrap(),
            Distribution::exponential(2.0).unwrap(),
            Distribution::exponential(3.0).unwrap(),
        ];
        let (y1, y2) = (0.3, 1.1);
        let dens = |r: f64, x: f64| r * (-r * x).exp();
        let n = 200;
        let simpson = |lo: f64, hi: f64| -> Vec<(f64, f64)> {
            let h = (hi - lo) / n as f64;
            (0..=n)
                .map(|k| {
                    let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
                    (lo + h * k as f64, w * h / 3.0)
                })
                .collect()
        };
        let (a0, a1, a2) = (simpson(y1, y2), simpson(y1, y1 + 14.0), simpson(0.0, y2));
        let mut total = 0.0;
        for &(x0, w0) in &a0 {
            for &(x1, w1) in &a1 {
                for &(x2, w2) in &a2 {
                    total += w0 * w1 * w2 * dens(1.0, x0) * dens(2.0, x1) * dens(3.0, x2);
                }
            }
        }
        let p = rect_prob_from_generator(
            &m,
            &RectGenerator::independent(3),
            &[Interval::new(y1, y2), Interval::new(y1, f64::INFINITY), Interval::new(f64::NEG_INFINITY, y2)],
        )
        .unwrap();
        assert!((p.value - total).abs() < 1e-6, "{} vs {}", p.value, total);
    }

    #[test]
    fn perturbed_rect_full_side_is_one() {
        let g = RectGenerator::perturbed(3, 0.8, Distribution::gumbel(0.0, 1.0).unwrap()).unwrap();
        let r = [Interval::new(0.0, 1.0), Interval::full(), Interval::new(-1.0, 0.0)];
        assert_eq!(g.eval(&r).unwrap(), 1.0);
        let r = [Interval::new(0.0, 1.0), Interval::new(0.5, 3.0), Interval::new(-1.0, 0.0)];
        assert!(g.eval(&r).unwrap() > 1.0);
    }

    #[test]
    fn lattice_interpolates_and_parses() {
        let csv = "0,1\n1,2\n2,3\n";
        let lat = Lattice2::from_csv_str(csv).unwrap();
        assert!((lat.eval(0.5, 0.5) - 2.0).abs() < 1e-15);
        assert_eq!(lat.eval(-5.0, 9.0), 2.0);
        let g = PointGenerator::tabulated(lat, GeneratorKind::MaxIndependent);
        assert_eq!(g.eval(&[f64::INFINITY, 0.3]).unwrap(), 1.0);
        assert!(Lattice2::from_csv_str("0,1\n1,2\n").is_err());
        assert!(Lattice2::from_csv_str("0,1\n1,0\n1,1\n").is_err());
    }

    #[test]
    fn parse_literals() {
        let no_files = |p: &str| -> Result<String> { Err(Error::Parse(format!("no file {p}"))) };
        let g = parse_point_generator("shared_component(exponential(1))", 3, GeneratorKind::MaxIndependent, &no_files)
            .unwrap();
        assert_eq!(g.arity(), 2);
        assert_eq!(g.label(), "shared_component(exponential(1))");
        let g = parse_point_generator("independent", 4, GeneratorKind::MinIndependent, &no_files).unwrap();
        assert_eq!((g.arity(), g.kind()), (4, GeneratorKind::MinIndependent));
        let g = parse_point_generator("fgm(0.5, gumbel(0,1))", 3, GeneratorKind::MaxIndependent, &no_files).unwrap();
        assert_eq!(g.arity(), 3);
        let files = |_: &str| -> Result<String> { Ok("0,1\n1,1\n1,1\n".into()) };
        let g = parse_point_generator("tabulated(eta.csv)", 2, GeneratorKind::MaxIndependent, &files).unwrap();
        assert_eq!(g.eval(&[0.2, 0.4]).unwrap(), 1.0);
        assert!(parse_point_generator("tabulated(eta.csv)", 2, GeneratorKind::MaxIndependent, &no_files).is_err());
        assert!(parse_point_generator("copula(1)", 2, GeneratorKind::MaxIndependent, &no_files).is_err());
        assert!(parse_rect_generator("perturbed(0.3, uniform(0,1))", 3).is_ok());
        assert!(parse_rect_generator("perturbed(2, uniform(0,1))", 3).is_err());
    }

    #[test]
    fn lifted_ignores_first_slot() {
        let g = PointGenerator::shared_component(unif()).lift_to_triple().unwrap();
        assert_eq!(g.arity(), 3);
        assert_eq!(g.eval(&[0.1, 0.5, 0.5]).unwrap(), 2.0);
        assert_eq!(g.eval(&[0.4, 0.5, f64::INFINITY]).unwrap(), 1.0);
        assert!(PointGenerator::independent(4, GeneratorKind::MaxIndependent)
            .unwrap()
            .lift_to_triple()
            .is_err());
    }
}
