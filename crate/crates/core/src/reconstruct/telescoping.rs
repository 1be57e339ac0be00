use std::cell::RefCell;
use std::collections::HashMap;

use super::ReconstructionReport;
use crate::dependence::{GeneratorKind, PointGenerator};
use crate::dist::Grid;
use crate::error::{Error, Result};
use crate::forward::{JointEval, ScaleVectors};

/// Which extreme the scaled law is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremeKind {
    /// `G(t, s) = P(max_i a_i X_i <= t, max_i b_i X_i <= s)`
    Max,
    /// `S(t, s) = P(min_i a_i X_i > t, min_i b_i X_i > s)`
    Min,
}

impl ExtremeKind {
    fn generator_kind(self) -> GeneratorKind {
        match self {
            Self::Max => GeneratorKind::MaxIndependent,
            Self::Min => GeneratorKind::MinIndependent,
        }
    }
}

/// Support assumption on the components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// `(0, inf)`; grid points must be positive.
    Positive,
    /// The whole line with no atom at 0; both half-lines are solved and
    /// joined by continuity at 0.
    RealLine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelescopeOptions {
    /// `1 - value` below which the chain is seeded with `log value = 0`.
    pub tail_tol: f64,
    /// Half-width of the gap around 0 bridged by continuity.
    pub zero_eps: f64,
    /// Lower bound on the iteration cap.
    pub min_cap: usize,
    /// Target spacing in `ln |x|` of the memo lattice used for peeled components.
    pub lattice_step: f64,
}

impl Default for TelescopeOptions {
    fn default() -> Self {
        Self {
            tail_tol: 1e-12,
            zero_eps: 1e-10,
            min_cap: 64,
            lattice_step: 1e-3,
        }
    }
}

/// `log F_i(x)` (max) or `log S_i(x)` (min) with the length of its own chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeelValue {
    pub log_value: f64,
    pub steps: usize,
    pub capped: bool,
}

impl PeelValue {
    const ONE: Self = Self {
        log_value: 0.0,
        steps: 0,
        capped: false,
    };
}

/// Ray used for component `i` on one half-line.
struct Band {
    tau: f64,
    /// Argument multiplier per step, `c_i / tau`.
    step: f64,
    /// Components that share the `s` argument with `i` on this ray.
    known: Vec<usize>,
}

enum Plan {
    /// Last in peeling order: read off `M1` after dividing out the rest.
    Direct(Vec<usize>),
    Chain(Band),
}

/// Memoized chain values at `sign * exp(k * ln_rho)`.
struct Lattice {
    ln_rho: f64,
    /// Index offset of one step; `step = exp(stride * ln_rho)`.
    stride: i64,
    nodes: HashMap<i64, PeelValue>,
}

struct Peeler<'a> {
    law: &'a dyn JointEval,
    sv: &'a ScaleVectors,
    g: &'a PointGenerator,
    kind: ExtremeKind,
    support: Support,
    opts: TelescopeOptions,
    /// Position of each component in ascending-ratio order.
    rank: Vec<usize>,
    span: f64,
    lattices: RefCell<HashMap<(usize, bool), Lattice>>,
}

impl<'a> Peeler<'a> {
    fn new(
        law: &'a dyn JointEval,
        sv: &'a ScaleVectors,
        g: &'a PointGenerator,
        kind: ExtremeKind,
        support: Support,
        opts: TelescopeOptions,
        span: f64,
    ) -> Result<Self> {
        if g.arity() != sv.len() {
            return Err(Error::ArityMismatch {
                expected: sv.len(),
                got: g.arity(),
            });
        }
        if g.kind() != kind.generator_kind() {
            return Err(Error::InvalidGenerator(format!(
                "{kind:?} scheme needs a {:?} generator",
                kind.generator_kind()
            )));
        }
        let mut rank = vec![0; sv.len()];
        for (r, &i) in sv.order().iter().enumerate() {
            rank[i] = r;
        }
        Ok(Self {
            law,
            sv,
            g,
            kind,
            support,
            opts,
            rank,
            span,
            lattices: RefCell::new(HashMap::new()),
        })
    }

    /// `log` of the law with the generator divided out.
    fn log_h(&self, t: f64, s: f64) -> Result<f64> {
        let pts = match self.kind {
            ExtremeKind::Max => self.sv.min_points(t, s),
            ExtremeKind::Min => self.sv.max_points(t, s),
        };
        let v = self.law.eval(t, s)? / self.g.eval(&pts)?;
        if !(v > 0.0) {
            return Err(Error::ShrinkDomain { at: t });
        }
        Ok(v.ln())
    }

    /// `log M1(t)`: the product of all component values at `t / a_j`.
    fn log_m1(&self, t: f64) -> Result<f64> {
        let s = match self.kind {
            ExtremeKind::Max => f64::INFINITY,
            ExtremeKind::Min => f64::NEG_INFINITY,
        };
        self.log_h(t, s)
    }

    fn plan(&self, i: usize, positive: bool) -> Plan {
        // Components above c_i take the s argument for max on t > 0 and for
        // min on t < 0; below c_i otherwise.
        let up = matches!(
            (self.kind, positive),
            (ExtremeKind::Max, true) | (ExtremeKind::Min, false)
        );
        let order = self.sv.order();
        let r = self.rank[i];
        let known: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&j| if up { self.rank[j] > r } else { self.rank[j] < r })
            .collect();
        let neighbour = if up {
            r.checked_sub(1).map(|p| order[p])
        } else {
            order.get(r + 1).copied()
        };
        match neighbour {
            None => Plan::Direct(known),
            Some(nb) => {
                let ci = self.sv.ratio(i);
                let tau = 0.5 * (ci + self.sv.ratio(nb));
                Plan::Chain(Band {
                    tau,
                    step: ci / tau,
                    known,
                })
            }
        }
    }

    fn normalize(&self, x: f64) -> Result<f64> {
        match self.support {
            Support::RealLine if x == 0.0 => Ok(self.opts.zero_eps),
            Support::Positive if !(x > 0.0) => Err(Error::ShrinkDomain { at: x }),
            _ => Ok(x),
        }
    }

    fn seed_level(&self) -> f64 {
        (1.0 - self.opts.tail_tol).ln()
    }

    fn cap(&self, step: f64) -> usize {
        let n = (self.span.ln() / step.ln().abs()).ceil().max(1.0) as usize;
        (10 * n).max(self.opts.min_cap)
    }

    fn bridges(&self, band: &Band, next: f64) -> bool {
        self.support == Support::RealLine && band.step < 1.0 && next.abs() < self.opts.zero_eps
    }

    /// Value of component `i` past the gap at 0, approached from `next`.
    fn bridge(&self, i: usize, next: f64) -> Result<f64> {
        Ok(self.value(i, -next.signum() * self.opts.zero_eps)?.log_value)
    }

    /// One telescoping increment `log V_i(u) - log V_i(u * step)` and `log M1(t)`.
    fn increment(&self, i: usize, u: f64, band: &Band) -> Result<(f64, f64)> {
        let (a, b) = (self.sv.a(), self.sv.b());
        let t = u * b[i] / band.tau;
        let m1 = self.log_m1(t)?;
        let mut d = self.log_h(t, band.tau * t)? - m1;
        for &j in &band.known {
            d -= self.value(j, band.tau * t / b[j])?.log_value - self.value(j, t / a[j])?.log_value;
        }
        Ok((d, m1))
    }

    fn direct(&self, i: usize, x: f64, known: &[usize]) -> Result<PeelValue> {
        let a = self.sv.a();
        let t = a[i] * x;
        let mut lv = self.log_m1(t)?;
        for &j in known {
            lv -= self.value(j, t / a[j])?.log_value;
        }
        Ok(PeelValue {
            log_value: lv,
            steps: 0,
            capped: false,
        })
    }

    /// Exact chain from `x`, with peeled components read from their lattices.
    fn exact(&self, i: usize, x: f64) -> Result<PeelValue> {
        let x = self.normalize(x)?;
        let band = match self.plan(i, x > 0.0) {
            Plan::Direct(known) => return self.direct(i, x, &known),
            Plan::Chain(band) => band,
        };
        let seed = self.seed_level();
        if self.log_m1(self.sv.a()[i] * x)? >= seed {
            return Ok(PeelValue::ONE);
        }
        let cap = self.cap(band.step);
        let (mut acc, mut steps, mut u) = (0.0, 0, x);
        loop {
            let (d, m1) = self.increment(i, u, &band)?;
            acc += d;
            steps += 1;
            let next = u * band.step;
            if m1 >= seed {
                break;
            }
            if self.bridges(&band, next) {
                acc += self.bridge(i, next)?;
                break;
            }
            if steps >= cap {
                return Ok(PeelValue {
                    log_value: acc,
                    steps,
                    capped: true,
                });
            }
            u = next;
        }
        Ok(PeelValue {
            log_value: acc,
            steps,
            capped: false,
        })
    }

    /// Component value at an arbitrary point, interpolated on its lattice.
    fn value(&self, i: usize, x: f64) -> Result<PeelValue> {
        let x = self.normalize(x)?;
        let positive = x > 0.0;
        let band = match self.plan(i, positive) {
            Plan::Direct(known) => return self.direct(i, x, &known),
            Plan::Chain(band) => band,
        };
        let ln_rho = self.lattice(i, positive, &band).0;
        let z = x.abs().ln() / ln_rho;
        let k = z.floor() as i64;
        let f = z - k as f64;
        let mut p = [0.0; 4];
        for (o, slot) in p.iter_mut().enumerate() {
            *slot = self.node(i, positive, &band, k - 1 + o as i64)?.log_value;
        }
        let centre = self.node(i, positive, &band, k)?;
        // Catmull-Rom through p[1], p[2].
        let v = 0.5
            * (2.0 * p[1]
                + (p[2] - p[0]) * f
                + (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) * f * f
                + (3.0 * (p[1] - p[2]) + p[3] - p[0]) * f * f * f);
        Ok(PeelValue {
            log_value: v.min(0.0),
            ..centre
        })
    }

    /// `(ln_rho, stride)` of the lattice for `i` on one half-line.
    fn lattice(&self, i: usize, positive: bool, band: &Band) -> (f64, i64) {
        let mut tables = self.lattices.borrow_mut();
        let l = tables.entry((i, positive)).or_insert_with(|| {
            let ls = band.step.ln();
            let m = (ls.abs() / self.opts.lattice_step).ceil().max(1.0);
            Lattice {
                ln_rho: ls.abs() / m,
                stride: if ls > 0.0 { m as i64 } else { -(m as i64) },
                nodes: HashMap::new(),
            }
        });
        (l.ln_rho, l.stride)
    }

    fn memo(&self, i: usize, positive: bool, k: i64) -> Option<PeelValue> {
        self.lattices.borrow().get(&(i, positive))?.nodes.get(&k).copied()
    }

    fn node(&self, i: usize, positive: bool, band: &Band, k: i64) -> Result<PeelValue> {
        if let Some(v) = self.memo(i, positive, k) {
            return Ok(v);
        }
        let (ln_rho, stride) = self.lattice(i, positive, band);
        let sign = if positive { 1.0 } else { -1.0 };
        let at = |k: i64| sign * (k as f64 * ln_rho).exp();
        let seed = self.seed_level();
        let cap = self.cap(band.step);

        let mut path = Vec::new();
        let mut cur = k;
        let base = if self.log_m1(self.sv.a()[i] * at(k))? >= seed {
            PeelValue::ONE
        } else {
            loop {
                let (d, m1) = self.increment(i, at(cur), band)?;
                path.push((cur, d));
                let next = cur + stride;
                if m1 >= seed {
                    break PeelValue::ONE;
                }
                if let Some(v) = self.memo(i, positive, next) {
                    break v;
                }
                if self.bridges(band, at(next)) {
                    break PeelValue {
                        log_value: self.bridge(i, at(next))?,
                        steps: 0,
                        capped: false,
                    };
                }
                if path.len() >= cap {
                    break PeelValue {
                        capped: true,
                        ..PeelValue::ONE
                    };
                }
                cur = next;
            }
        };

        let mut acc = base;
        let mut tables = self.lattices.borrow_mut();
        let nodes = &mut tables.get_mut(&(i, positive)).expect("lattice created above").nodes;
        if path.is_empty() {
            nodes.insert(k, base);
        }
        for &(idx, d) in path.iter().rev() {
            acc.log_value += d;
            acc.steps += 1;
            nodes.insert(idx, acc);
        }
        Ok(acc)
    }
}

/// `max |y| / min nonzero |y|` over the grid, widened to the zero gap on the
/// real line; at least `e`.
fn grid_span(grid: &Grid, support: Support, opts: &TelescopeOptions) -> f64 {
    let abs = grid.points().iter().map(|y| y.abs()).filter(|y| *y > 0.0);
    let mut lo = abs.clone().fold(f64::INFINITY, f64::min);
    let hi = abs.fold(0.0, f64::max);
    if support == Support::RealLine {
        lo = lo.min(opts.zero_eps);
    }
    if lo.is_finite() && hi > 0.0 {
        (hi / lo).max(std::f64::consts::E)
    } else {
        std::f64::consts::E
    }
}

/// Evaluates one component at one point by ray telescoping, peeling the
/// components whose ratio lies beyond it.
#[allow(clippy::too_many_arguments)]
pub fn solve_peeling(
    law: &dyn JointEval,
    sv: &ScaleVectors,
    g: &PointGenerator,
    kind: ExtremeKind,
    support: Support,
    component: usize,
    x: f64,
    opts: TelescopeOptions,
) -> Result<PeelValue> {
    if component >= sv.len() {
        return Err(Error::InvalidArgument(format!(
            "component {component} out of range for {} components",
            sv.len()
        )));
    }
    let grid = Grid::new(vec![x.abs().min(1.0) * 0.5, x.abs().max(1.0)])?;
    let span = grid_span(&grid, support, &opts);
    Peeler::new(law, sv, g, kind, support, opts, span)?.exact(component, x)
}

/// Recovers all `n` components of a scaled scheme on `grid`.
pub fn recover_scaled_extremes(
    law: &dyn JointEval,
    sv: &ScaleVectors,
    g: &PointGenerator,
    grid: &Grid,
    kind: ExtremeKind,
    support: Support,
) -> Result<ReconstructionReport> {
    recover_scaled_extremes_with(law, sv, g, grid, kind, support, TelescopeOptions::default())
}

pub fn recover_scaled_extremes_with(
    law: &dyn JointEval,
    sv: &ScaleVectors,
    g: &PointGenerator,
    grid: &Grid,
    kind: ExtremeKind,
    support: Support,
    opts: TelescopeOptions,
) -> Result<ReconstructionReport> {
    if support == Support::Positive && !(grid.min() > 0.0) {
        return Err(Error::ShrinkDomain { at: grid.min() });
    }
    let peeler = Peeler::new(law, sv, g, kind, support, opts, grid_span(grid, support, &opts))?;
    let n = sv.len();
    let mut raw = Vec::with_capacity(n);
    let mut component_iterations = Vec::with_capacity(n);
    let mut capped = 0;
    let mut underflow = 0;
    for i in 0..n {
        let mut col = Vec::with_capacity(grid.len());
        let mut longest = 0;
        for &y in grid.points() {
            // Underflow along a chain only excludes that grid point.
            match peeler.exact(i, y) {
                Ok(v) => {
                    longest = longest.max(v.steps);
                    capped += usize::from(v.capped);
                    col.push(Some(match kind {
                        ExtremeKind::Max => v.log_value.exp(),
                        ExtremeKind::Min => -v.log_value.exp_m1(),
                    }));
                }
                Err(Error::ShrinkDomain { .. }) => {
                    underflow += 1;
                    col.push(None);
                }
                Err(e) => return Err(e),
            }
        }
        if col.iter().all(Option::is_none) {
            return Err(Error::ShrinkDomain { at: grid.min() });
        }
        component_iterations.push(longest);
        raw.push(col);
    }
    let mut notes = Vec::new();
    if capped > 0 {
        notes.push(format!("{capped} chain(s) hit the iteration cap and were seeded early"));
    }
    if underflow > 0 {
        notes.push(format!("{underflow} chain(s) underflowed; consider a narrower grid"));
    }
    let mut report = ReconstructionReport::from_raw(grid, raw, notes)?;
    report.iterations = component_iterations.iter().copied().max().unwrap_or(0);
    report.component_iterations = component_iterations;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use crate::forward::{joint_cdf_scaled_maxima, joint_survival_scaled_minima};

    fn indep(n: usize, kind: GeneratorKind) -> PointGenerator {
        PointGenerator::independent(n, kind).unwrap()
    }

    #[test]
    fn single_component_reads_the_marginal() {
        let f = Distribution::exponential(1.5).unwrap();
        let sv = ScaleVectors::new(vec![1.0], vec![1.0]).unwrap();
        let g = indep(1, GeneratorKind::MaxIndependent);
        let law = joint_cdf_scaled_maxima(vec![f.clone()], sv.clone(), g.clone()).unwrap();
        let grid = Grid::uniform(0.1, 3.0, 20).unwrap();
        let rep = recover_scaled_extremes(&law, &sv, &g, &grid, ExtremeKind::Max, Support::Positive)
            .unwrap()
            .with_truth(&[f])
            .unwrap();
        assert!(rep.max_sup_error().unwrap() < 1e-14);
        assert_eq!(rep.iterations, 0);
    }

    #[test]
    fn two_components_exp_weibull() {
        let fs = vec![
            Distribution::exponential(1.0).unwrap(),
            Distribution::weibull(2.0, 1.0).unwrap(),
        ];
        let sv = ScaleVectors::new(vec![1.0, 1.0], vec![1.0, 2.0]).unwrap();
        let g = indep(2, GeneratorKind::MaxIndependent);
        let law = joint_cdf_scaled_maxima(fs.clone(), sv.clone(), g.clone()).unwrap();
        let grid = Grid::uniform(0.05, 6.0, 120).unwrap();
        let rep = recover_scaled_extremes(&law, &sv, &g, &grid, ExtremeKind::Max, Support::Positive)
            .unwrap()
            .with_truth(&fs)
            .unwrap();
        assert!(rep.max_sup_error().unwrap() < 1e-6, "{:?}", rep.sup_errors);
        assert!(rep.iterations <= 60, "{}", rep.iterations);
        assert!(rep.iterations > 0);
    }

    #[test]
    fn real_line_gumbel_triple() {
        let fs: Vec<_> = [0.0, 0.5, -0.5]
            .iter()
            .map(|&m| Distribution::gumbel(m, 2.0).unwrap())
            .collect();
        let sv = ScaleVectors::new(vec![1.0; 3], vec![1.0, 2.0, 4.0]).unwrap();
        let g = indep(3, GeneratorKind::MaxIndependent);
        let law = joint_cdf_scaled_maxima(fs.clone(), sv.clone(), g.clone()).unwrap();
        let grid = Grid::uniform(-4.0, 6.0, 81).unwrap();
        let rep = recover_scaled_extremes(&law, &sv, &g, &grid, ExtremeKind::Max, Support::RealLine)
            .unwrap()
            .with_truth(&fs)
            .unwrap();
        assert!(rep.max_sup_error().unwrap() < 1e-6, "{:?}", rep.sup_errors);
    }

    #[test]
    fn min_scheme_mirror() {
        let fs = vec![
            Distribution::exponential(1.0).unwrap(),
            Distribution::exponential(2.0).unwrap(),
            Distribution::weibull(1.5, 1.0).unwrap(),
        ];
        let sv = ScaleVectors::new(vec![1.0, 1.0, 2.0], vec![1.0, 3.0, 1.0]).unwrap();
        let g = indep(3, GeneratorKind::MinIndependent);
        let law = joint_survival_scaled_minima(fs.clone(), sv.clone(), g.clone()).unwrap();
        let grid = Grid::uniform(0.05, 3.0, 60).unwrap();
        let rep = recover_scaled_extremes(&law, &sv, &g, &grid, ExtremeKind::Min, Support::Positive)
            .unwrap()
            .with_truth(&fs)
            .unwrap();
        assert!(rep.max_sup_error().unwrap() < 1e-6, "{:?}", rep.sup_errors);
    }

    #[test]
    fn positive_support_rejects_nonpositive_grid() {
        let fs = vec![Distribution::exponential(1.0).unwrap(); 2];
        let sv = ScaleVectors::new(vec![1.0, 1.0], vec![1.0, 2.0]).unwrap();
        let g = indep(2, GeneratorKind::MaxIndependent);
        let law = joint_cdf_scaled_maxima(fs, sv.clone(), g.clone()).unwrap();
        let grid = Grid::uniform(-1.0, 1.0, 5).unwrap();
        assert!(matches!(
            recover_scaled_extremes(&law, &sv, &g, &grid, ExtremeKind::Max, Support::Positive),
            Err(Error::ShrinkDomain { .. })
        ));
    }

    #[test]
    fn wrong_kind_rejected() {
        let fs = vec![Distribution::exponential(1.0).unwrap(); 2];
        let sv = ScaleVectors::new(vec![1.0, 1.0], vec![1.0, 2.0]).unwrap();
        let g = indep(2, GeneratorKind::MaxIndependent);
        let law = joint_cdf_scaled_maxima(fs, sv.clone(), g.clone()).unwrap();
        let grid = Grid::uniform(0.1, 1.0, 5).unwrap();
        assert!(recover_scaled_extremes(&law, &sv, &g, &grid, ExtremeKind::Min, Support::Positive).is_err());
    }

    #[test]
    fn point_solver_matches_truth() {
        let fs = vec![
            Distribution::exponential(1.0).unwrap(),
            Distribution::exponential(0.5).unwrap(),
        ];
        let sv = ScaleVectors::new(vec![1.0, 1.0], vec![1.0, 2.0]).unwrap();
        let g = indep(2, GeneratorKind::MaxIndependent);
        let law = joint_cdf_scaled_maxima(fs.clone(), sv.clone(), g.clone()).unwrap();
        let v = solve_peeling(&law, &sv, &g, ExtremeKind::Max, Support::Positive, 1, 0.7, TelescopeOptions::default())
            .unwrap();
        assert!((v.log_value.exp() - fs[1].cdf(0.7)).abs() < 1e-9);
    }
}
