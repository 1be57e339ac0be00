//! Univariate laws on the extended real line.
//!
//! Two representations are provided: closed-form [`ParametricDist`] families
//! and piecewise-linear [`GridCdf`] tables. Both are wrapped by
//! [`Distribution`], which is the type the rest of the crate consumes.
//!
//! Every evaluation accepts `f64::INFINITY` and `f64::NEG_INFINITY` and
//! returns the exact limit there; nothing in the crate substitutes a large
//! finite number for an infinite argument.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution as _, Open01};
use rand::Rng;

use crate::error::{Error, Result};

/// A point of `[-inf, +inf]`. Never NaN, so it is totally ordered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedReal(f64);

impl ExtendedReal {
    pub const NEG_INFINITY: Self = Self(f64::NEG_INFINITY);
    pub const POS_INFINITY: Self = Self(f64::INFINITY);

    pub fn new(x: f64) -> Result<Self> {
        if x.is_nan() {
            return Err(Error::InvalidArgument("NaN is not an extended real".into()));
        }
        Ok(Self(x))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl Eq for ExtendedReal {}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl TryFrom<f64> for ExtendedReal {
    type Error = Error;
    fn try_from(x: f64) -> Result<Self> {
        Self::new(x)
    }
}

impl From<ExtendedReal> for f64 {
    fn from(x: ExtendedReal) -> f64 {
        x.0
    }
}

impl FromStr for ExtendedReal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(Self::POS_INFINITY),
            "-inf" | "-infinity" => Ok(Self::NEG_INFINITY),
            t => t
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("extended real {t:?}: {e}")))
                .and_then(Self::new),
        }
    }
}

/// Finite, strictly increasing evaluation points (at least two).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if let Some(bad) = points.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite grid point {bad}")));
        }
        if let Some(i) = points.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(format!(
                "points not strictly increasing at index {}: {} >= {}",
                i,
                points[i],
                points[i + 1]
            )));
        }
        Ok(Self { points })
    }

    /// `count` equally spaced points from `min` to `max` inclusive.
    pub fn uniform(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidGrid(format!("count must be >= 2, got {count}")));
        }
        if !(min < max) {
            return Err(Error::InvalidGrid(format!("min {min} must be < max {max}")));
        }
        let h = (max - min) / (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| min + h * i as f64).collect();
        points[count - 1] = max;
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Index `i` with `points[i] <= x < points[i + 1]`, for `x` inside the grid.
    fn segment(&self, x: f64) -> usize {
        let i = self.points.partition_point(|&p| p <= x);
        i.saturating_sub(1).min(self.points.len() - 2)
    }
}

/// Behaviour of a [`GridCdf`] to the left of its first grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerTail {
    /// The CDF is 0 below the grid.
    Zero,
    /// The CDF keeps its first tabulated value below the grid.
    ClampFirst,
}

/// Behaviour of a [`GridCdf`] to the right of its last grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperTail {
    /// The CDF is 1 above the grid.
    One,
    /// The CDF keeps its last tabulated value above the grid.
    ClampLast,
}

/// Piecewise-linear nondecreasing function on a grid, with explicit tails.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCdf {
    grid: Grid,
    values: Vec<f64>,
    lower_tail: LowerTail,
    upper_tail: UpperTail,
}

/// Bookkeeping from [`GridCdf::repaired`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RepairStats {
    /// Values moved by the running maximum or the clamp to `[0, 1]`.
    pub events: usize,
    /// Sum of absolute moves.
    pub mass: f64,
    /// Largest single move.
    pub max_move: f64,
}

impl GridCdf {
    pub fn new(
        grid: Grid,
        values: Vec<f64>,
        lower_tail: LowerTail,
        upper_tail: UpperTail,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidDistribution(format!(
                "value {v} outside [0, 1]"
            )));
        }
        if let Some(i) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidDistribution(format!(
                "values decrease at index {}: {} > {}",
                i,
                values[i],
                values[i + 1]
            )));
        }
        Ok(Self {
            grid,
            values,
            lower_tail,
            upper_tail,
        })
    }

    /// Builds a valid table from raw values by a running maximum followed by
    /// a clamp to `[0, 1]`. NaN entries are treated as 0.
    pub fn repaired(
        grid: Grid,
        raw: &[f64],
        lower_tail: LowerTail,
        upper_tail: UpperTail,
    ) -> Result<(Self, RepairStats)> {
        if raw.len() != grid.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} values for {} grid points",
                raw.len(),
                grid.len()
            )));
        }
        let mut stats = RepairStats::default();
        let mut values = Vec::with_capacity(raw.len());
        let mut running = f64::NEG_INFINITY;
        for &r in raw {
            let r0 = if r.is_nan() { 0.0 } else { r };
            running = running.max(r0);
            let v = running.clamp(0.0, 1.0);
            let moved = (v - r0).abs();
            if moved > 0.0 {
                stats.events += 1;
                stats.mass += moved;
                stats.max_move = stats.max_move.max(moved);
            }
            values.push(v);
        }
        Ok((Self::new(grid, values, lower_tail, upper_tail)?, stats))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lower_tail(&self) -> LowerTail {
        self.lower_tail
    }

    pub fn upper_tail(&self) -> UpperTail {
        self.upper_tail
    }

    pub fn eval(&self, x: f64) -> f64 {
        let pts = self.grid.points();
        let n = pts.len();
        if x < pts[0] {
            return match self.lower_tail {
                LowerTail::Zero => 0.0,
                LowerTail::ClampFirst => self.values[0],
            };
        }
        if x > pts[n - 1] {
            return match self.upper_tail {
                UpperTail::One => 1.0,
                UpperTail::ClampLast => self.values[n - 1],
            };
        }
        if x == pts[n - 1] {
            return self.values[n - 1];
        }
        let i = self.grid.segment(x);
        let (x0, x1) = (pts[i], pts[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        let w = (x - x0) / (x1 - x0);
        v0 + w * (v1 - v0)
    }

    /// Generalized inverse `inf { x : F(x) >= u }`. On a flat stretch the
    /// left endpoint is returned.
    pub fn quantile(&self, u: f64) -> f64 {
        let pts = self.grid.points();
        let n = pts.len();
        if self.values[0] >= u {
            return match self.lower_tail {
                LowerTail::Zero => pts[0],
                LowerTail::ClampFirst => f64::NEG_INFINITY,
            };
        }
        match self.values.iter().position(|&v| v >= u) {
            Some(i) => {
                let (v0, v1) = (self.values[i - 1], self.values[i]);
                let w = (u - v0) / (v1 - v0);
                (pts[i - 1] + w * (pts[i] - pts[i - 1])).min(pts[i])
            }
            None => match self.upper_tail {
                UpperTail::One => pts[n - 1],
                UpperTail::ClampLast => f64::INFINITY,
            },
        }
    }
}

/// Closed-form families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParametricDist {
    Uniform { lo: f64, hi: f64 },
    Exponential { rate: f64 },
    Weibull { shape: f64, scale: f64 },
    Gumbel { location: f64, scale: f64 },
    /// `F(x) = x^k` on `[0, 1]`.
    Power { exponent: f64 },
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidDistribution(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

impl ParametricDist {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidDistribution(format!(
                "uniform needs finite lo < hi, got ({lo}, {hi})"
            )));
        }
        Ok(Self::Uniform { lo, hi })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Ok(Self::Exponential {
            rate: positive("rate", rate)?,
        })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Ok(Self::Weibull {
            shape: positive("shape", shape)?,
            scale: positive("scale", scale)?,
        })
    }

    pub fn gumbel(location: f64, scale: f64) -> Result<Self> {
        if !location.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "gumbel location must be finite, got {location}"
            )));
        }
        Ok(Self::Gumbel {
            location,
            scale: positive("scale", scale)?,
        })
    }

    pub fn power(exponent: f64) -> Result<Self> {
        Ok(Self::Power {
            exponent: positive("exponent", exponent)?,
        })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        match *self {
            Self::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Self::Weibull { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-(x / scale).powf(shape)).exp_m1()
                }
            }
            Self::Gumbel { location, scale } => (-(-(x - location) / scale).exp()).exp(),
            Self::Power { exponent } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    x.powf(exponent)
                }
            }
        }
    }

    /// Closed-form inverse; `u` must lie in `(0, 1)`.
    fn inverse(&self, u: f64) -> f64 {
        match *self {
            Self::Uniform { lo, hi } => lo + u * (hi - lo),
            Self::Exponential { rate } => -(-u).ln_1p() / rate,
            Self::Weibull { shape, scale } => scale * (-(-u).ln_1p()).powf(1.0 / shape),
            Self::Gumbel { location, scale } => location - scale * (-u.ln()).ln(),
            Self::Power { exponent } => u.powf(1.0 / exponent),
        }
    }
}

impl fmt::Display for ParametricDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Uniform { lo, hi } => write!(f, "uniform({lo},{hi})"),
            Self::Exponential { rate } => write!(f, "exponential({rate})"),
            Self::Weibull { shape, scale } => write!(f, "weibull({shape},{scale})"),
            Self::Gumbel { location, scale } => write!(f, "gumbel({location},{scale})"),
            Self::Power { exponent } => write!(f, "power({exponent})"),
        }
    }
}

/// A univariate law: closed form or tabulated.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Parametric(ParametricDist),
    Grid(GridCdf),
}

impl From<ParametricDist> for Distribution {
    fn from(p: ParametricDist) -> Self {
        Self::Parametric(p)
    }
}

impl From<GridCdf> for Distribution {
    fn from(g: GridCdf) -> Self {
        Self::Grid(g)
    }
}

impl Distribution {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        ParametricDist::uniform(lo, hi).map(Self::from)
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        ParametricDist::exponential(rate).map(Self::from)
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        ParametricDist::weibull(shape, scale).map(Self::from)
    }

    pub fn gumbel(location: f64, scale: f64) -> Result<Self> {
        ParametricDist::gumbel(location, scale).map(Self::from)
    }

    pub fn power(exponent: f64) -> Result<Self> {
        ParametricDist::power(exponent).map(Self::from)
    }

    /// `F(x)`, exact at both infinities.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Parametric(p) => p.cdf(x),
            Self::Grid(g) => g.eval(x),
        }
    }

    /// `1 - F(x)`.
    pub fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// Generalized inverse `inf { x : F(x) >= u }` for `0 < u < 1`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "quantile level must lie in (0, 1), got {u}"
            )));
        }
        Ok(match self {
            Self::Parametric(p) => p.inverse(u),
            Self::Grid(g) => g.quantile(u),
        })
    }

    /// Inverse-transform draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = Open01.sample(rng);
        match self {
            Self::Parametric(p) => p.inverse(u),
            Self::Grid(g) => g.quantile(u),
        }
    }

    /// Tabulates the CDF on `grid`, with zero/one tails.
    pub fn discretize(&self, grid: &Grid) -> GridCdf {
        let raw: Vec<f64> = grid.points().iter().map(|&x| self.cdf(x)).collect();
        // Parametric CDFs are monotone already; the repair only guards
        // against rounding in user tables.
        GridCdf::repaired(grid.clone(), &raw, LowerTail::Zero, UpperTail::One)
            .map(|(g, _)| g)
            .expect("grid and values have matching lengths")
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Parametric(p) => p.fmt(f),
            Self::Grid(g) => write!(f, "grid({} points)", g.grid().len()),
        }
    }
}

/// Parses `family(p1,p2,...)`.
impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = split_call(s)?;
        let params: Vec<f64> = split_args(args)
            .into_iter()
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("parameter {a:?} in {s:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        let want = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "{name} takes {k} parameter(s), got {} in {s:?}",
                    params.len()
                )))
            }
        };
        match name {
            "uniform" => {
                want(2)?;
                Self::uniform(params[0], params[1])
            }
            "exponential" | "exp" => {
                want(1)?;
                Self::exponential(params[0])
            }
            "weibull" => {
                want(2)?;
                Self::weibull(params[0], params[1])
            }
            "gumbel" => {
                want(2)?;
                Self::gumbel(params[0], params[1])
            }
            "power" => {
                want(1)?;
                Self::power(params[0])
            }
            other => Err(Error::Parse(format!("unknown distribution family {other:?}"))),
        }
    }
}

/// Splits `name(inner)` into `("name", "inner")`.
pub(crate) fn split_call(s: &str) -> Result<(&str, &str)> {
    let s = s.trim();
    let open = s
        .find('(')
        .ok_or_else(|| Error::Parse(format!("expected name(...), got {s:?}")))?;
    if !s.ends_with(')') {
        return Err(Error::Parse(format!("unbalanced parentheses in {s:?}")));
    }
    Ok((s[..open].trim(), &s[open + 1..s.len() - 1]))
}

/// Splits on top-level commas, respecting nested parentheses.
pub(crate) fn split_args(s: &str) -> Vec<&str> {
    if s.trim().is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    /// Composite Simpson rule, used as an independent check of closed forms.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + h * i as f64);
        }
        s * h / 3.0
    }

    #[test]
    fn cdf_examples() {
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.cdf(0.5), 0.5);
        let e = Distribution::exponential(1.0).unwrap();
        assert_eq!(e.cdf(f64::INFINITY), 1.0);
        assert_eq!(e.cdf(f64::NEG_INFINITY), 0.0);
        let numeric = simpson(|x| (-x).exp(), 0.0, 1.0, 2000);
        close(e.cdf(1.0), numeric, 1e-12);
        close(e.cdf(1.0), 0.632_120_558_828_557_7, 1e-15);
    }

    #[test]
    fn survival_examples() {
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.survival(0.25), 0.75);
        assert_eq!(u.survival(f64::NEG_INFINITY), 1.0);
        let g = Distribution::gumbel(0.0, 1.0).unwrap();
        close(g.survival(0.0), 1.0 - (-1.0f64).exp(), 1e-15);
    }

    #[test]
    fn quantile_examples() {
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.quantile(0.5).unwrap(), 0.5);
        let e = Distribution::exponential(1.0).unwrap();
        close(e.quantile(1.0 - (-1.0f64).exp()).unwrap(), 1.0, 1e-14);
        let g = GridCdf::new(
            Grid::new(vec![0.0, 1.0]).unwrap(),
            vec![0.0, 1.0],
            LowerTail::Zero,
            UpperTail::One,
        )
        .unwrap();
        assert_eq!(Distribution::from(g).quantile(0.25).unwrap(), 0.25);
        assert!(u.quantile(0.0).is_err());
        assert!(u.quantile(1.0).is_err());
    }

    #[test]
    fn quantile_flat_segment_takes_left_endpoint() {
        let g = GridCdf::new(
            Grid::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap(),
            vec![0.0, 0.5, 0.5, 1.0],
            LowerTail::Zero,
            UpperTail::One,
        )
        .unwrap();
        assert_eq!(g.quantile(0.5), 1.0);
        close(g.quantile(0.75), 2.5, 1e-15);
    }

    #[test]
    fn sample_examples() {
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let x = u.sample(&mut rng);
            assert!(x > 0.0 && x < 1.0);
        }
        let e = Distribution::exponential(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let mean = (0..n).map(|_| e.sample(&mut rng)).sum::<f64>() / n as f64;
        close(mean, 1.0, 0.01);
        let a = e.sample(&mut ChaCha8Rng::seed_from_u64(5));
        let b = e.sample(&mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn discretize_examples() {
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        let d = u.discretize(&Grid::new(vec![0.0, 0.5, 1.0]).unwrap());
        assert_eq!(d.values(), &[0.0, 0.5, 1.0]);

        // h^2 max|f'| / 8 with h = 0.01 and f' = -e^{-x} bounded by 1.
        let e = Distribution::exponential(1.0).unwrap();
        let grid = Grid::uniform(0.0, 10.0, 1001).unwrap();
        let d = e.discretize(&grid);
        let worst = grid
            .points()
            .windows(2)
            .map(|w| {
                let m = 0.5 * (w[0] + w[1]);
                (d.eval(m) - e.cdf(m)).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-3, "{worst}");
        assert!(worst <= 0.01 * 0.01 / 8.0 + 1e-15, "{worst}");
    }

    #[test]
    fn grid_cdf_tails() {
        let g = GridCdf::new(
            Grid::new(vec![1.0, 2.0]).unwrap(),
            vec![0.2, 0.6],
            LowerTail::ClampFirst,
            UpperTail::ClampLast,
        )
        .unwrap();
        assert_eq!(g.eval(f64::NEG_INFINITY), 0.2);
        assert_eq!(g.eval(f64::INFINITY), 0.6);
        assert_eq!(g.quantile(0.1), f64::NEG_INFINITY);
        assert_eq!(g.quantile(0.9), f64::INFINITY);
        let h = GridCdf::new(
            Grid::new(vec![1.0, 2.0]).unwrap(),
            vec![0.2, 0.6],
            LowerTail::Zero,
            UpperTail::One,
        )
        .unwrap();
        assert_eq!(h.eval(f64::NEG_INFINITY), 0.0);
        assert_eq!(h.eval(0.99), 0.0);
        assert_eq!(h.eval(1.0), 0.2);
        assert_eq!(h.eval(2.5), 1.0);
        assert_eq!(h.eval(f64::INFINITY), 1.0);
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(Grid::new(vec![0.0]).is_err());
        assert!(Grid::new(vec![0.0, 0.0]).is_err());
        assert!(Grid::new(vec![0.0, f64::INFINITY]).is_err());
        assert!(Distribution::uniform(1.0, 1.0).is_err());
        assert!(Distribution::exponential(0.0).is_err());
        assert!(Distribution::weibull(-1.0, 1.0).is_err());
        assert!(Distribution::gumbel(0.0, 0.0).is_err());
        let g = Grid::new(vec![0.0, 1.0]).unwrap();
        assert!(GridCdf::new(g.clone(), vec![0.5, 0.4], LowerTail::Zero, UpperTail::One).is_err());
        assert!(GridCdf::new(g, vec![0.5, 1.4], LowerTail::Zero, UpperTail::One).is_err());
        assert!(ExtendedReal::new(f64::NAN).is_err());
    }

    #[test]
    fn repair_counts_moves() {
        let g = Grid::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let (cdf, stats) = GridCdf::repaired(
            g,
            &[-1e-16, 0.5, 0.5 - 1e-15, 1.0 + 2e-16],
            LowerTail::Zero,
            UpperTail::One,
        )
        .unwrap();
        assert_eq!(cdf.values(), &[0.0, 0.5, 0.5, 1.0]);
        assert_eq!(stats.events, 3);
        assert!(stats.max_move <= 1e-15 + 1e-30);
    }

    #[test]
    fn literals_parse() {
        let d: Distribution = "weibull(2, 1)".parse().unwrap();
        assert_eq!(d, Distribution::weibull(2.0, 1.0).unwrap());
        assert_eq!(d.to_string(), "weibull(2,1)");
        assert!("weibull(2)".parse::<Distribution>().is_err());
        assert!("cauchy(0,1)".parse::<Distribution>().is_err());
        assert!("exponential(-1)".parse::<Distribution>().is_err());
        let x: ExtendedReal = "-inf".parse().unwrap();
        assert_eq!(x, ExtendedReal::NEG_INFINITY);
        assert!(x < ExtendedReal::new(-1e308).unwrap());
    }
}
