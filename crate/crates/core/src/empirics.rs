//! Monte Carlo sampling of the observable pair, empirical joint laws and
//! plug-in reconstruction.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dependence::{PointGenerator, RectGenerator};
use crate::dist::{Distribution, Grid};
use crate::error::{Error, Result};
use crate::forward::{JointEval, LawMode, ScaleVectors, Scheme};
use crate::reconstruct::{
    fmt_real, recover_from_maxima, recover_from_minima, recover_from_minmax, recover_scaled_extremes,
    Anchor, ExtremeKind, ReconstructionReport, Support,
};

/// Draws per substream; substream `k` covers draws `k*CHUNK .. (k+1)*CHUNK`.
const CHUNK: usize = 4096;

/// Multiplier on the DKW half-width for the divisions in recovery.
pub const AMPLIFICATION: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub pairs: Vec<(f64, f64)>,
    pub seed: u64,
    pub scheme: Scheme,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(48 * self.pairs.len() + 64);
        out.push_str("y1,y2\n");
        for &(a, b) in &self.pairs {
            let _ = writeln!(out, "{},{}", fmt_real(a), fmt_real(b));
        }
        let _ = writeln!(
            out,
            "#summary,n={},seed={},scheme={}",
            self.pairs.len(),
            self.seed,
            self.scheme
        );
        out
    }
}

/// Fills `n` draws from per-chunk ChaCha8 streams; the result does not
/// depend on the number of worker threads.
fn draw<F>(n: usize, seed: u64, f: F) -> Vec<(f64, f64)>
where
    F: Fn(&mut ChaCha8Rng) -> (f64, f64) + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let len = CHUNK.min(n - k * CHUNK);
            (0..len).map(|_| f(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

/// Independent `(X0, X1, X2)`, reduced to `(Y1, Y2)` per scheme.
pub fn sample_shared_component(
    f0: &Distribution,
    f1: &Distribution,
    f2: &Distribution,
    n: usize,
    seed: u64,
    scheme: Scheme,
) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be >= 1".into()));
    }
    let reduce: fn(f64, f64, f64) -> (f64, f64) = match scheme {
        Scheme::Maxima3 => |x0, x1, x2| (x0.max(x1), x0.max(x2)),
        Scheme::Minima3 => |x0, x1, x2| (x0.min(x1), x0.min(x2)),
        Scheme::MinMax3 => |x0, x1, x2| (x0.min(x1), x0.max(x2)),
        other => {
            return Err(Error::SchemeMismatch(format!(
                "shared-component sampling has no {other} form"
            )))
        }
    };
    let pairs = draw(n, seed, |rng| {
        let x0 = f0.sample(rng);
        let x1 = f1.sample(rng);
        let x2 = f2.sample(rng);
        reduce(x0, x1, x2)
    });
    Ok(SampleBatch { pairs, seed, scheme })
}

/// `(max_i a_i X_i, max_i b_i X_i)` for independent `X_i`.
pub fn sample_scaled_maxima(
    fs: &[Distribution],
    sv: &ScaleVectors,
    n: usize,
    seed: u64,
) -> Result<SampleBatch> {
    sample_scaled(fs, sv, n, seed, Scheme::ScaledMax)
}

/// `(min_i a_i X_i, min_i b_i X_i)` for independent `X_i`.
pub fn sample_scaled_minima(
    fs: &[Distribution],
    sv: &ScaleVectors,
    n: usize,
    seed: u64,
) -> Result<SampleBatch> {
    sample_scaled(fs, sv, n, seed, Scheme::ScaledMin)
}

fn sample_scaled(
    fs: &[Distribution],
    sv: &ScaleVectors,
    n: usize,
    seed: u64,
    scheme: Scheme,
) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be >= 1".into()));
    }
    if fs.len() != sv.len() {
        return Err(Error::InvalidScales(format!(
            "{} components but {} scale pairs",
            fs.len(),
            sv.len()
        )));
    }
    let max = scheme == Scheme::ScaledMax;
    let (a, b) = (sv.a(), sv.b());
    let pairs = draw(n, seed, |rng| {
        let init = if max { f64::NEG_INFINITY } else { f64::INFINITY };
        let (mut y1, mut y2) = (init, init);
        for (i, f) in fs.iter().enumerate() {
            let x = f.sample(rng);
            if max {
                y1 = y1.max(a[i] * x);
                y2 = y2.max(b[i] * x);
            } else {
                y1 = y1.min(a[i] * x);
                y2 = y2.min(b[i] * x);
            }
        }
        (y1, y2)
    });
    Ok(SampleBatch { pairs, seed, scheme })
}

/// Counts `#{Y1 <= x, Y2 <= y}` in `O(log^2 n)` with a merge-sort tree over
/// the pairs sorted by `Y1`.
#[derive(Debug, Clone)]
struct DominanceCounter {
    y1: Vec<f64>,
    y2_sorted: Vec<f64>,
    /// `levels[l]` holds `Y2` in `Y1` order, sorted within blocks of `2^l`.
    levels: Vec<Vec<f64>>,
}

impl DominanceCounter {
    fn new(pairs: &[(f64, f64)]) -> Self {
        let mut sorted = pairs.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let y1: Vec<f64> = sorted.iter().map(|p| p.0).collect();
        let mut level: Vec<f64> = sorted.iter().map(|p| p.1).collect();
        let mut y2_sorted = level.clone();
        y2_sorted.sort_by(f64::total_cmp);
        let mut levels = vec![level.clone()];
        let mut width = 1;
        while width < level.len() {
            width *= 2;
            for block in level.chunks_mut(width) {
                block.sort_by(f64::total_cmp);
            }
            levels.push(level.clone());
        }
        Self {
            y1,
            y2_sorted,
            levels,
        }
    }

    fn n(&self) -> usize {
        self.y1.len()
    }

    fn count_y1(&self, x: f64) -> usize {
        self.y1.partition_point(|&v| v <= x)
    }

    fn count_y2(&self, y: f64) -> usize {
        self.y2_sorted.partition_point(|&v| v <= y)
    }

    fn count_both(&self, x: f64, y: f64) -> usize {
        let k = self.count_y1(x);
        let mut start = 0;
        let mut total = 0;
        for l in (0..self.levels.len()).rev() {
            let w = 1usize << l;
            if k - start >= w {
                let block = &self.levels[l][start..start + w];
                total += block.partition_point(|&v| v <= y);
                start += w;
            }
        }
        total
    }
}

/// Step-function plug-in estimate of `G`, `S` or `R`.
#[derive(Debug, Clone)]
pub struct EmpiricalJointLaw {
    mode: LawMode,
    counter: DominanceCounter,
}

impl EmpiricalJointLaw {
    pub fn new(batch: &SampleBatch, mode: LawMode) -> Result<Self> {
        if batch.is_empty() {
            return Err(Error::EmptyBatch);
        }
        Ok(Self {
            mode,
            counter: DominanceCounter::new(&batch.pairs),
        })
    }

    pub fn mode(&self) -> LawMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.counter.n()
    }

    pub fn eval(&self, y1: f64, y2: f64) -> f64 {
        let c = &self.counter;
        let n = c.n();
        let count = match self.mode {
            LawMode::Cdf => c.count_both(y1, y2),
            LawMode::Survival => n + c.count_both(y1, y2) - c.count_y1(y1) - c.count_y2(y2),
            LawMode::Rectangle => c.count_y2(y2) - c.count_both(y1, y2),
        };
        count as f64 / n as f64
    }

    /// Empirical CDF of `Y1`.
    pub fn marginal_y1(&self, y: f64) -> f64 {
        self.counter.count_y1(y) as f64 / self.n() as f64
    }

    /// Empirical CDF of `Y2`.
    pub fn marginal_y2(&self, y: f64) -> f64 {
        self.counter.count_y2(y) as f64 / self.n() as f64
    }
}

impl JointEval for EmpiricalJointLaw {
    fn eval(&self, y1: f64, y2: f64) -> Result<f64> {
        Ok(EmpiricalJointLaw::eval(self, y1, y2))
    }
}

pub fn empirical_law(batch: &SampleBatch, mode: LawMode) -> Result<EmpiricalJointLaw> {
    EmpiricalJointLaw::new(batch, mode)
}

/// `sqrt(ln(2 / alpha) / (2 n))`; infinite for `n = 0`.
pub fn dkw_bound(n: usize, alpha: f64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// Scheme-specific side information for [`plugin_reconstruct`].
#[derive(Debug, Clone)]
pub enum PluginInputs {
    Maxima3(PointGenerator),
    Minima3(PointGenerator),
    MinMax3 { generator: RectGenerator, anchor: Anchor },
    Scaled {
        scales: ScaleVectors,
        generator: PointGenerator,
        support: Support,
    },
}

/// Recovers the components from the empirical law of `batch` and attaches
/// the DKW budget at level 0.05.
pub fn plugin_reconstruct(
    batch: &SampleBatch,
    inputs: &PluginInputs,
    grid: &Grid,
) -> Result<ReconstructionReport> {
    plugin_reconstruct_at(batch, inputs, grid, 0.05)
}

/// [`plugin_reconstruct`] with the DKW level `alpha` in `(0, 1)`.
pub fn plugin_reconstruct_at(
    batch: &SampleBatch,
    inputs: &PluginInputs,
    grid: &Grid,
    alpha: f64,
) -> Result<ReconstructionReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let law = EmpiricalJointLaw::new(batch, batch.scheme.mode())?;
    let mismatch = || {
        Error::SchemeMismatch(format!(
            "batch scheme {} does not match the supplied inputs",
            batch.scheme
        ))
    };
    let mut report = match (inputs, batch.scheme) {
        (PluginInputs::Maxima3(g), Scheme::Maxima3) => recover_from_maxima(&law, g, grid)?,
        (PluginInputs::Minima3(g), Scheme::Minima3) => recover_from_minima(&law, g, grid)?,
        (PluginInputs::MinMax3 { generator, anchor }, Scheme::MinMax3) => {
            recover_from_minmax(&law, generator, *anchor, grid)?
        }
        (
            PluginInputs::Scaled {
                scales,
                generator,
                support,
            },
            s @ (Scheme::ScaledMax | Scheme::ScaledMin),
        ) => {
            let kind = if s == Scheme::ScaledMax {
                ExtremeKind::Max
            } else {
                ExtremeKind::Min
            };
            recover_scaled_extremes(&law, scales, generator, grid, kind, *support)?
        }
        _ => return Err(mismatch()),
    };
    let bound = dkw_bound(batch.len(), alpha);
    report.dkw_bound = Some(bound);
    report.error_budget = Some(AMPLIFICATION * bound);
    if AMPLIFICATION * bound >= 1.0 {
        report
            .notes
            .push(format!("error budget {:.3} is vacuous at n = {}", AMPLIFICATION * bound, batch.len()));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dependence::GeneratorKind;
    use crate::forward::rect_prob_minmax;

    fn unif() -> Distribution {
        Distribution::uniform(0.0, 1.0).unwrap()
    }

    fn batch(pairs: Vec<(f64, f64)>) -> SampleBatch {
        SampleBatch {
            pairs,
            seed: 0,
            scheme: Scheme::Maxima3,
        }
    }

    #[test]
    fn counting_examples() {
        let b = batch(vec![(0.2, 0.3), (0.6, 0.7)]);
        let cdf = EmpiricalJointLaw::new(&b, LawMode::Cdf).unwrap();
        assert_eq!(cdf.eval(0.5, 0.5), 0.5);
        assert_eq!(cdf.eval(f64::INFINITY, f64::INFINITY), 1.0);
        let surv = EmpiricalJointLaw::new(&b, LawMode::Survival).unwrap();
        assert_eq!(surv.eval(f64::NEG_INFINITY, f64::NEG_INFINITY), 1.0);
        assert_eq!(surv.eval(0.5, 0.5), 0.5);
        let rect = EmpiricalJointLaw::new(&b, LawMode::Rectangle).unwrap();
        assert_eq!(rect.eval(0.1, 0.5), 0.5);
        assert_eq!(rect.eval(0.5, 0.5), 0.0);
    }

    #[test]
    fn empty_batch_rejected() {
        assert_eq!(
            EmpiricalJointLaw::new(&batch(vec![]), LawMode::Cdf).unwrap_err(),
            Error::EmptyBatch
        );
    }

    #[test]
    fn dominance_count_matches_brute_force() {
        let b = sample_shared_component(
            &Distribution::exponential(1.0).unwrap(),
            &Distribution::exponential(2.0).unwrap(),
            &Distribution::exponential(0.5).unwrap(),
            1000 + 37,
            9,
            Scheme::Maxima3,
        )
        .unwrap();
        let c = DominanceCounter::new(&b.pairs);
        for &(x, y) in &[(0.3, 0.7), (1.0, 1.0), (2.5, 0.1), (0.0, 5.0), (9.0, 9.0)] {
            let brute = b.pairs.iter().filter(|p| p.0 <= x && p.1 <= y).count();
            assert_eq!(c.count_both(x, y), brute);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_shared_component(&unif(), &unif(), &unif(), 4, 17, Scheme::Maxima3).unwrap();
        let b = sample_shared_component(&unif(), &unif(), &unif(), 4, 17, Scheme::Maxima3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        let c = sample_shared_component(&unif(), &unif(), &unif(), 4, 18, Scheme::Maxima3).unwrap();
        assert_ne!(a.pairs, c.pairs);
    }

    #[test]
    fn maxima_sample_matches_forward_value() {
        let b = sample_shared_component(&unif(), &unif(), &unif(), 100_000, 1, Scheme::Maxima3).unwrap();
        let law = EmpiricalJointLaw::new(&b, LawMode::Cdf).unwrap();
        assert!((law.eval(0.5, 0.5) - 0.125).abs() < 0.006);
    }

    #[test]
    fn minmax_sample_matches_rectangle_oracle() {
        let b = sample_shared_component(&unif(), &unif(), &unif(), 100_000, 2, Scheme::MinMax3).unwrap();
        let law = EmpiricalJointLaw::new(&b, LawMode::Rectangle).unwrap();
        let truth = rect_prob_minmax(&unif(), &unif(), &unif(), &RectGenerator::independent(3), 0.25, 0.75)
            .unwrap()
            .value;
        assert!((truth - 0.28125).abs() < 1e-15);
        assert!((law.eval(0.25, 0.75) - truth).abs() < 0.006);
    }

    #[test]
    fn scaled_sampling() {
        let sv = ScaleVectors::new(vec![1.0, 1.0], vec![1.0, 2.0]).unwrap();
        let b = sample_scaled_maxima(&[unif(), unif()], &sv, 100_000, 3).unwrap();
        let law = EmpiricalJointLaw::new(&b, LawMode::Cdf).unwrap();
        assert!((law.eval(0.5, 0.8) - 0.2).abs() < 0.006);

        let one = ScaleVectors::new(vec![1.0], vec![1.0]).unwrap();
        let b = sample_scaled_maxima(&[unif()], &one, 100, 3).unwrap();
        assert!(b.pairs.iter().all(|p| p.0 == p.1));
    }

    #[test]
    fn dkw_values() {
        assert!((dkw_bound(20_000, 0.05) - 0.00960).abs() < 1e-5);
        assert!((dkw_bound(1, 0.05) - 1.358).abs() < 1e-3);
        assert!((dkw_bound(100_000, 0.05) - 0.00430).abs() < 1e-5);
        assert!(dkw_bound(200, 0.5) < dkw_bound(100, 0.5));
    }

    #[test]
    fn tiny_sample_budget_is_vacuous() {
        let b = sample_shared_component(&unif(), &unif(), &unif(), 10, 5, Scheme::Maxima3).unwrap();
        let g = PointGenerator::independent(3, GeneratorKind::MaxIndependent).unwrap();
        let grid = Grid::uniform(0.2, 0.9, 8).unwrap();
        let rep = plugin_reconstruct(&b, &PluginInputs::Maxima3(g), &grid).unwrap();
        assert!(rep.error_budget.unwrap() >= 1.0);
        assert!(rep.summary_line().contains("budget_vacuous=true"));
    }

    #[test]
    fn plugin_rejects_mismatched_inputs() {
        let b = sample_shared_component(&unif(), &unif(), &unif(), 10, 5, Scheme::Maxima3).unwrap();
        let g = PointGenerator::independent(3, GeneratorKind::MinIndependent).unwrap();
        let grid = Grid::uniform(0.2, 0.9, 8).unwrap();
        assert!(matches!(
            plugin_reconstruct(&b, &PluginInputs::Minima3(g), &grid),
            Err(Error::SchemeMismatch(_))
        ));
    }
}
