//! Joint laws of the observable pair `(Y1, Y2)`.
//!
//! | scheme       | `Y1`              | `Y2`              | evaluated quantity       |
//! |--------------|-------------------|-------------------|--------------------------|
//! | `Maxima3`    | `max(X0, X1)`     | `max(X0, X2)`     | `P(Y1 <= y1, Y2 <= y2)`  |
//! | `Minima3`    | `min(X0, X1)`     | `min(X0, X2)`     | `P(Y1 > y1, Y2 > y2)`    |
//! | `MinMax3`    | `min(X0, X1)`     | `max(X0, X2)`     | `P(Y1 > y1, Y2 <= y2)`   |
//! | `ScaledMax`  | `max(a_i X_i)`    | `max(b_i X_i)`    | `P(Y1 <= t, Y2 <= s)`    |
//! | `ScaledMin`  | `min(a_i X_i)`    | `min(b_i X_i)`    | `P(Y1 > t, Y2 > s)`      |
//!
//! Laws are closures over their components and generator; nothing is
//! tabulated, so evaluation at infinite arguments is exact.

use std::fmt;

use crate::dependence::{GeneratorKind, Interval, PointGenerator, RectGenerator};
use crate::dist::{Distribution, Grid, GridCdf, LowerTail, UpperTail};
use crate::error::{Error, Result};

/// Anything that evaluates a bivariate law at a point of the extended plane.
pub trait JointEval: Sync {
    fn eval(&self, y1: f64, y2: f64) -> Result<f64>;
}

impl<F> JointEval for F
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    fn eval(&self, y1: f64, y2: f64) -> Result<f64> {
        self(y1, y2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Maxima3,
    Minima3,
    MinMax3,
    ScaledMax,
    ScaledMin,
}

impl Scheme {
    pub fn mode(self) -> LawMode {
        match self {
            Self::Maxima3 | Self::ScaledMax => LawMode::Cdf,
            Self::Minima3 | Self::ScaledMin => LawMode::Survival,
            Self::MinMax3 => LawMode::Rectangle,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Maxima3 => "maxima3",
            Self::Minima3 => "minima3",
            Self::MinMax3 => "minmax3",
            Self::ScaledMax => "scaled_max_n",
            Self::ScaledMin => "scaled_min_n",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "maxima3" => Ok(Self::Maxima3),
            "minima3" => Ok(Self::Minima3),
            "minmax3" => Ok(Self::MinMax3),
            "scaled_max_n" | "scaled_max" => Ok(Self::ScaledMax),
            "scaled_min_n" | "scaled_min" => Ok(Self::ScaledMin),
            other => Err(Error::Parse(format!("unknown scheme {other:?}"))),
        }
    }

    pub fn is_scaled(self) -> bool {
        matches!(self, Self::ScaledMax | Self::ScaledMin)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a law's `eval` returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawMode {
    /// `P(Y1 <= y1, Y2 <= y2)`
    Cdf,
    /// `P(Y1 > y1, Y2 > y2)`
    Survival,
    /// `P(Y1 > y1, Y2 <= y2)`
    Rectangle,
}

/// Scale coefficients of the scaled schemes, with `c_i = b_i / a_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleVectors {
    a: Vec<f64>,
    b: Vec<f64>,
    /// Component indices sorted by ascending ratio.
    order: Vec<usize>,
}

/// Relative gap below which two ratios count as equal.
const RATIO_TOL: f64 = 1e-12;

impl ScaleVectors {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidScales(format!(
                "a has {} entries but b has {}",
                a.len(),
                b.len()
            )));
        }
        if a.is_empty() {
            return Err(Error::InvalidScales("empty scale vectors".into()));
        }
        if let Some(v) = a.iter().chain(&b).find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidScales(format!(
                "coefficients must be finite and > 0, got {v}"
            )));
        }
        let mut order: Vec<usize> = (0..a.len()).collect();
        order.sort_by(|&i, &j| (b[i] / a[i]).total_cmp(&(b[j] / a[j])));
        for w in order.windows(2) {
            let (ci, cj) = (b[w[0]] / a[w[0]], b[w[1]] / a[w[1]]);
            if cj - ci <= RATIO_TOL * cj {
                return Err(Error::InvalidScales(format!(
                    "ratio-distinctness violated: components {} and {} share b/a = {}",
                    w[0], w[1], ci
                )));
            }
        }
        Ok(Self { a, b, order })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn ratio(&self, i: usize) -> f64 {
        self.b[i] / self.a[i]
    }

    /// Component indices by ascending `b_i / a_i`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Both vectors multiplied by `lambda`.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        Self::new(
            self.a.iter().map(|x| x * lambda).collect(),
            self.b.iter().map(|x| x * lambda).collect(),
        )
    }

    /// Per-component `min(t / a_i, s / b_i)`.
    pub fn min_points(&self, t: f64, s: f64) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| (t / a).min(s / b))
            .collect()
    }

    /// Per-component `max(t / a_i, s / b_i)`.
    pub fn max_points(&self, t: f64, s: f64) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| (t / a).max(s / b))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub enum Generator {
    Point(PointGenerator),
    Rect(RectGenerator),
}

impl Generator {
    pub fn label(&self) -> String {
        match self {
            Self::Point(g) => g.label(),
            Self::Rect(g) => g.label(),
        }
    }
}

/// Joint law of `(Y1, Y2)` under one of the coupling schemes.
#[derive(Debug, Clone)]
pub struct JointExtremeLaw {
    scheme: Scheme,
    components: Vec<Distribution>,
    generator: Generator,
    scales: Option<ScaleVectors>,
}

fn require_point(g: &PointGenerator, arity: usize, kind: GeneratorKind) -> Result<()> {
    if g.arity() != arity {
        return Err(Error::ArityMismatch {
            expected: arity,
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

/// `G(y1, y2) = F0(m) F1(y1) F2(y2) eta(m, y1, y2)` with `m = min(y1, y2)`.
pub fn joint_cdf_maxima(
    f0: Distribution,
    f1: Distribution,
    f2: Distribution,
    g: PointGenerator,
) -> Result<JointExtremeLaw> {
    require_point(&g, 3, GeneratorKind::MaxIndependent)?;
    Ok(JointExtremeLaw {
        scheme: Scheme::Maxima3,
        components: vec![f0, f1, f2],
        generator: Generator::Point(g),
        scales: None,
    })
}

/// `S(y1, y2) = S0(m) S1(y1) S2(y2) eta(m, y1, y2)` with `m = max(y1, y2)`.
pub fn joint_survival_minima(
    f0: Distribution,
    f1: Distribution,
    f2: Distribution,
    g: PointGenerator,
) -> Result<JointExtremeLaw> {
    require_point(&g, 3, GeneratorKind::MinIndependent)?;
    Ok(JointExtremeLaw {
        scheme: Scheme::Minima3,
        components: vec![f0, f1, f2],
        generator: Generator::Point(g),
        scales: None,
    })
}

/// Law of `(min(X0, X1), max(X0, X2))` through `P(Y1 > y1, Y2 <= y2)`.
pub fn joint_rect_minmax(
    f0: Distribution,
    f1: Distribution,
    f2: Distribution,
    g: RectGenerator,
) -> Result<JointExtremeLaw> {
    if g.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            got: g.arity(),
        });
    }
    Ok(JointExtremeLaw {
        scheme: Scheme::MinMax3,
        components: vec![f0, f1, f2],
        generator: Generator::Rect(g),
        scales: None,
    })
}

/// `G(t, s) = prod_i F_i(min(t/a_i, s/b_i)) * eta(min-points)`.
pub fn joint_cdf_scaled_maxima(
    fs: Vec<Distribution>,
    sv: ScaleVectors,
    g: PointGenerator,
) -> Result<JointExtremeLaw> {
    scaled(Scheme::ScaledMax, fs, sv, g, GeneratorKind::MaxIndependent)
}

/// `S(t, s) = prod_i S_i(max(t/a_i, s/b_i)) * eta(max-points)`.
pub fn joint_survival_scaled_minima(
    fs: Vec<Distribution>,
    sv: ScaleVectors,
    g: PointGenerator,
) -> Result<JointExtremeLaw> {
    scaled(Scheme::ScaledMin, fs, sv, g, GeneratorKind::MinIndependent)
}

fn scaled(
    scheme: Scheme,
    fs: Vec<Distribution>,
    sv: ScaleVectors,
    g: PointGenerator,
    kind: GeneratorKind,
) -> Result<JointExtremeLaw> {
    if fs.len() != sv.len() {
        return Err(Error::InvalidScales(format!(
            "{} components but {} scale pairs",
            fs.len(),
            sv.len()
        )));
    }
    require_point(&g, fs.len(), kind)?;
    Ok(JointExtremeLaw {
        scheme,
        components: fs,
        generator: Generator::Point(g),
        scales: Some(sv),
    })
}

/// Value of [`rect_prob_minmax`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinMaxProb {
    pub value: f64,
    /// `y1 >= y2`: the event is empty and the value is 0.
    pub empty: bool,
}

/// `P(Y1 > y1, Y2 <= y2) = [F0(y2) - F0(y1)] S1(y1) F2(y2) eta(B0 x B1 x B2)`
/// with `B0 = (y1, y2]`, `B1 = (y1, inf)`, `B2 = (-inf, y2]`.
pub fn rect_prob_minmax(
    f0: &Distribution,
    f1: &Distribution,
    f2: &Distribution,
    g: &RectGenerator,
    y1: f64,
    y2: f64,
) -> Result<MinMaxProb> {
    if g.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            got: g.arity(),
        });
    }
    if y1 >= y2 {
        return Ok(MinMaxProb {
            value: 0.0,
            empty: true,
        });
    }
    let base = (f0.cdf(y2) - f0.cdf(y1)) * f1.survival(y1) * f2.cdf(y2);
    if base == 0.0 {
        return Ok(MinMaxProb {
            value: 0.0,
            empty: false,
        });
    }
    let rect = minmax_rectangle(y1, y2);
    Ok(MinMaxProb {
        value: base * g.eval(&rect)?,
        empty: false,
    })
}

/// `B0 x B1 x B2` of the min/max scheme.
pub fn minmax_rectangle(y1: f64, y2: f64) -> [Interval; 3] {
    [
        Interval::new(y1, y2),
        Interval::new(y1, f64::INFINITY),
        Interval::new(f64::NEG_INFINITY, y2),
    ]
}

impl JointExtremeLaw {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn mode(&self) -> LawMode {
        self.scheme.mode()
    }

    pub fn components(&self) -> &[Distribution] {
        &self.components
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn point_generator(&self) -> Option<&PointGenerator> {
        match &self.generator {
            Generator::Point(g) => Some(g),
            Generator::Rect(_) => None,
        }
    }

    pub fn rect_generator(&self) -> Option<&RectGenerator> {
        match &self.generator {
            Generator::Rect(g) => Some(g),
            Generator::Point(_) => None,
        }
    }

    pub fn scales(&self) -> Option<&ScaleVectors> {
        self.scales.as_ref()
    }

    fn point(&self) -> &PointGenerator {
        self.point_generator()
            .expect("point-generator scheme built with a point generator")
    }

    pub fn eval(&self, y1: f64, y2: f64) -> Result<f64> {
        let c = &self.components;
        match self.scheme {
            Scheme::Maxima3 => {
                let m = y1.min(y2);
                let base = c[0].cdf(m) * c[1].cdf(y1) * c[2].cdf(y2);
                if base == 0.0 {
                    return Ok(0.0);
                }
                Ok(base * self.point().eval(&[m, y1, y2])?)
            }
            Scheme::Minima3 => {
                let m = y1.max(y2);
                let base = c[0].survival(m) * c[1].survival(y1) * c[2].survival(y2);
                if base == 0.0 {
                    return Ok(0.0);
                }
                Ok(base * self.point().eval(&[m, y1, y2])?)
            }
            Scheme::MinMax3 => {
                let g = self
                    .rect_generator()
                    .expect("minmax3 built with a rectangle generator");
                Ok(rect_prob_minmax(&c[0], &c[1], &c[2], g, y1, y2)?.value)
            }
            Scheme::ScaledMax => {
                let sv = self.scales.as_ref().expect("scaled scheme has scales");
                let pts = sv.min_points(y1, y2);
                let base: f64 = c.iter().zip(&pts).map(|(d, &x)| d.cdf(x)).product();
                if base == 0.0 {
                    return Ok(0.0);
                }
                Ok(base * self.point().eval(&pts)?)
            }
            Scheme::ScaledMin => {
                let sv = self.scales.as_ref().expect("scaled scheme has scales");
                let pts = sv.max_points(y1, y2);
                let base: f64 = c.iter().zip(&pts).map(|(d, &x)| d.survival(x)).product();
                if base == 0.0 {
                    return Ok(0.0);
                }
                Ok(base * self.point().eval(&pts)?)
            }
        }
    }
}

impl JointEval for JointExtremeLaw {
    fn eval(&self, y1: f64, y2: f64) -> Result<f64> {
        JointExtremeLaw::eval(self, y1, y2)
    }
}

/// Distribution of `max(X0, Xi)` for independent `X0`, `Xi`, tabulated on
/// `grid`: `F0 * Fi`.
pub fn marginal_of_max(f0: &Distribution, fi: &Distribution, grid: &Grid) -> Distribution {
    let raw: Vec<f64> = grid.points().iter().map(|&y| f0.cdf(y) * fi.cdf(y)).collect();
    let (g, _) = GridCdf::repaired(grid.clone(), &raw, LowerTail::Zero, UpperTail::One)
        .expect("grid and values have matching lengths");
    g.into()
}

/// Probe-lattice checks of a bivariate law.
#[derive(Debug, Clone, PartialEq)]
pub struct JointReport {
    pub monotone_ok: bool,
    pub range_ok: bool,
    pub two_increasing_ok: bool,
    pub corners_ok: bool,
    pub frechet_ok: bool,
    /// Most negative rectangle mass seen.
    pub min_rect_mass: f64,
    pub failures: Vec<String>,
}

impl JointReport {
    pub fn passes(&self) -> bool {
        self.monotone_ok
            && self.range_ok
            && self.two_increasing_ok
            && self.corners_ok
            && self.frechet_ok
            && self.failures.is_empty()
    }
}

/// Absolute tolerance of every lattice check.
pub const JOINT_TOL: f64 = 1e-12;

/// Checks monotonicity in each argument, range, rectangle positivity,
/// corner limits and Frechet bounds on `{-inf} u probe u {+inf}` squared.
pub fn validate_joint(law: &dyn JointEval, mode: LawMode, probe: &Grid) -> JointReport {
    let mut axis = Vec::with_capacity(probe.len() + 2);
    axis.push(f64::NEG_INFINITY);
    axis.extend_from_slice(probe.points());
    axis.push(f64::INFINITY);
    let m = axis.len();

    let mut report = JointReport {
        monotone_ok: true,
        range_ok: true,
        two_increasing_ok: true,
        corners_ok: true,
        frechet_ok: true,
        min_rect_mass: 0.0,
        failures: Vec::new(),
    };

    let mut v = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            match law.eval(axis[i], axis[j]) {
                Ok(x) => v[i][j] = x,
                Err(e) => {
                    report.failures.push(format!("eval({}, {}): {e}", axis[i], axis[j]));
                    return report;
                }
            }
        }
    }

    // Sign of d/dy1 and d/dy2 by mode.
    let (s1, s2) = match mode {
        LawMode::Cdf => (1.0, 1.0),
        LawMode::Survival => (-1.0, -1.0),
        LawMode::Rectangle => (-1.0, 1.0),
    };
    let tol = JOINT_TOL;
    for i in 0..m {
        for j in 0..m {
            let x = v[i][j];
            if !(-tol..=1.0 + tol).contains(&x) {
                report.range_ok = false;
                report
                    .failures
                    .push(format!("value {x} outside [0,1] at ({}, {})", axis[i], axis[j]));
            }
            if i + 1 < m && s1 * (v[i + 1][j] - x) < -tol {
                report.monotone_ok = false;
                report
                    .failures
                    .push(format!("not monotone in y1 at ({}, {})", axis[i], axis[j]));
            }
            if j + 1 < m && s2 * (v[i][j + 1] - x) < -tol {
                report.monotone_ok = false;
                report
                    .failures
                    .push(format!("not monotone in y2 at ({}, {})", axis[i], axis[j]));
            }
            if i + 1 < m && j + 1 < m {
                // P(a1 < Y1 <= b1, a2 < Y2 <= b2) from the four corners.
                let mass = match mode {
                    LawMode::Cdf => v[i + 1][j + 1] - v[i][j + 1] - v[i + 1][j] + v[i][j],
                    LawMode::Survival => v[i][j] - v[i + 1][j] - v[i][j + 1] + v[i + 1][j + 1],
                    LawMode::Rectangle => {
                        (v[i][j + 1] - v[i + 1][j + 1]) - (v[i][j] - v[i + 1][j])
                    }
                };
                report.min_rect_mass = report.min_rect_mass.min(mass);
                if mass < -tol {
                    report.two_increasing_ok = false;
                    report.failures.push(format!(
                        "negative rectangle mass {mass:e} at cell ({}, {})",
                        axis[i], axis[j]
                    ));
                }
            }
        }
    }

    let last = m - 1;
    let mut corner = |ok: bool, what: &str| {
        if !ok {
            report.corners_ok = false;
            report.failures.push(format!("corner limit failed: {what}"));
        }
    };
    let near = |x: f64, y: f64| (x - y).abs() <= tol;
    match mode {
        LawMode::Cdf => {
            corner(near(v[last][last], 1.0), "G(+inf,+inf) = 1");
            corner((0..m).all(|k| near(v[0][k], 0.0) && near(v[k][0], 0.0)), "G(-inf,.) = G(.,-inf) = 0");
        }
        LawMode::Survival => {
            corner(near(v[0][0], 1.0), "S(-inf,-inf) = 1");
            corner(
                (0..m).all(|k| near(v[last][k], 0.0) && near(v[k][last], 0.0)),
                "S(+inf,.) = S(.,+inf) = 0",
            );
        }
        LawMode::Rectangle => {
            corner(near(v[0][last], 1.0), "R(-inf,+inf) = 1");
            corner(
                (0..m).all(|k| near(v[last][k], 0.0) && near(v[k][0], 0.0)),
                "R(+inf,.) = R(.,-inf) = 0",
            );
        }
    }

    // Frechet envelope against the two margins read off the edges.
    for i in 1..last {
        for j in 1..last {
            let (p, q) = match mode {
                LawMode::Cdf => (v[i][last], v[last][j]),
                LawMode::Survival => (v[i][0], v[0][j]),
                LawMode::Rectangle => (v[i][last], v[0][j]),
            };
            let lo = (p + q - 1.0).max(0.0);
            let hi = p.min(q);
            let x = v[i][j];
            if x < lo - tol || x > hi + tol {
                report.frechet_ok = false;
                report.failures.push(format!(
                    "Frechet bounds [{lo}, {hi}] violated by {x} at ({}, {})",
                    axis[i], axis[j]
                ));
            }
        }
    }
    report
}
