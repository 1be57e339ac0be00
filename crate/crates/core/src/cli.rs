//! Experiment driver behind the `maxmin-ident` binary.
//!
//! A run is a pure function of the configuration (plus the `--seed` and
//! `--grid-count` overrides) and returns the text written to the output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::dependence::{
    parse_point_generator, parse_rect_generator, GeneratorKind, PointGenerator, RectGenerator,
};
use crate::dist::{Distribution, Grid, ParametricDist};
use crate::empirics::{
    plugin_reconstruct_at, sample_scaled_maxima, sample_scaled_minima, sample_shared_component,
    PluginInputs,
};
use crate::error::Error;
use crate::forward::{
    joint_cdf_maxima, joint_cdf_scaled_maxima, joint_rect_minmax, joint_survival_minima,
    joint_survival_scaled_minima, validate_joint, JointEval, JointExtremeLaw, LawMode, ScaleVectors,
    Scheme,
};
use crate::reconstruct::{
    check_uniqueness, fmt_real, recover_from_maxima, recover_from_minima, recover_from_minmax,
    recover_scaled_extremes, single_max_nonuniqueness_demo, Anchor, ExtremeKind, ReconstructionReport,
    Support, UniquenessVerdict, DEFAULT_TOL,
};

#[derive(Debug, Parser)]
#[command(name = "maxmin-ident", version, about = "Identifiability experiments for dependent maxima and minima")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; defaults to the config's `output`, then stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides every seed in the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the grid point count.
    #[arg(long, global = true)]
    pub grid_count: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Tabulate the joint law on the grid lattice.
    Forward,
    /// Recover the components from the joint law.
    Recover,
    /// Compare two models of the same scheme.
    Verify,
    /// Sample, estimate and recover.
    Mc,
    /// Single-maximum non-uniqueness demonstration.
    Demo,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalesConfig {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Either `x0` and `q`, or `quantile` of the first component.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorConfig {
    pub x0: Option<f64>,
    pub q: Option<f64>,
    pub quantile: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    0.05
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub tol: Option<f64>,
    /// Random-search mode: number of perturbed model pairs.
    pub trials: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: Option<String>,
    #[serde(default)]
    pub components: Vec<String>,
    pub generator: Option<String>,
    pub scales: Option<ScalesConfig>,
    pub anchor: Option<AnchorConfig>,
    /// `positive` (default) or `real_line`, for the scaled schemes.
    pub support: Option<String>,
    pub grid: GridConfig,
    pub mc: Option<McConfig>,
    /// Second component list for `verify`.
    pub compare: Option<Vec<String>>,
    pub compare_generator: Option<String>,
    pub verify: Option<VerifyConfig>,
    /// CSV of `y1,y2,value` rows used by `recover` instead of the forward model.
    pub law_table: Option<String>,
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Applies the command-line overrides.
    pub fn with_overrides(mut self, seed: Option<u64>, grid_count: Option<usize>) -> Self {
        if let Some(s) = seed {
            if let Some(mc) = self.mc.as_mut() {
                mc.seed = s;
            }
            if let Some(v) = self.verify.as_mut() {
                v.seed = s;
            }
        }
        if let Some(c) = grid_count {
            self.grid.count = c;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Unrecoverable(_) | Error::ShrinkDomain { .. } | Error::GeneratorDomain { .. } => {
                Self::Numerical(e.to_string())
            }
            _ => Self::Config(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Everything a run needs, resolved from the configuration.
struct Setup {
    scheme: Scheme,
    components: Vec<Distribution>,
    grid: Grid,
    base: PathBuf,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_components(list: &[String], field: &str) -> CliResult<Vec<Distribution>> {
    list.iter()
        .enumerate()
        .map(|(i, s)| {
            s.parse::<Distribution>()
                .map_err(|e| config_err(format!("{field}[{i}]: {e}")))
        })
        .collect()
}

fn build_grid(g: &GridConfig) -> CliResult<Grid> {
    if g.count < 2 {
        return Err(config_err(format!("grid.count must be >= 2, got {}", g.count)));
    }
    Grid::uniform(g.min, g.max, g.count).map_err(|e| config_err(format!("grid: {e}")))
}

fn setup(cfg: &ExperimentConfig, base: &Path) -> CliResult<Setup> {
    let name = cfg
        .scheme
        .as_deref()
        .ok_or_else(|| config_err("scheme: missing field"))?;
    let scheme = Scheme::parse(name).map_err(|e| config_err(format!("scheme: {e}")))?;
    let components = parse_components(&cfg.components, "components")?;
    if !scheme.is_scaled() && !components.is_empty() && components.len() != 3 {
        return Err(config_err(format!(
            "components: {scheme} needs 3 components, got {}",
            components.len()
        )));
    }
    Ok(Setup {
        scheme,
        components,
        grid: build_grid(&cfg.grid)?,
        base: base.to_path_buf(),
    })
}

fn reader(base: &Path) -> impl Fn(&str) -> crate::Result<String> + '_ {
    move |p: &str| {
        let path = base.join(p);
        fs::read_to_string(&path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
    }
}

fn point_generator(spec: Option<&str>, s: &Setup, arity: usize, kind: GeneratorKind) -> CliResult<PointGenerator> {
    let spec = spec.unwrap_or("independent");
    let read = reader(&s.base);
    let g = parse_point_generator(spec, arity, kind, &read).map_err(|e| config_err(format!("generator: {e}")))?;
    let g = if arity == 3 {
        g.lift_to_triple().map_err(|e| config_err(format!("generator: {e}")))?
    } else {
        g
    };
    if g.arity() != arity {
        return Err(config_err(format!(
            "generator: {spec} has arity {}, the scheme needs {arity}",
            g.arity()
        )));
    }
    if g.kind() != kind {
        return Err(config_err(format!("generator: {spec} is not {kind:?}")));
    }
    Ok(g)
}

fn rect_generator(spec: Option<&str>) -> CliResult<RectGenerator> {
    parse_rect_generator(spec.unwrap_or("independent"), 3).map_err(|e| config_err(format!("generator: {e}")))
}

fn scales(cfg: &ExperimentConfig, n: usize) -> CliResult<ScaleVectors> {
    let sc = cfg
        .scales
        .as_ref()
        .ok_or_else(|| config_err("scales: required for scaled schemes"))?;
    let sv = ScaleVectors::new(sc.a.clone(), sc.b.clone()).map_err(|e| config_err(format!("scales: {e}")))?;
    if sv.len() != n {
        return Err(config_err(format!(
            "scales: {} pairs for {n} components",
            sv.len()
        )));
    }
    Ok(sv)
}

fn support(cfg: &ExperimentConfig) -> CliResult<Support> {
    match cfg.support.as_deref() {
        None | Some("positive") => Ok(Support::Positive),
        Some("real_line") => Ok(Support::RealLine),
        Some(other) => Err(config_err(format!(
            "support: expected \"positive\" or \"real_line\", got {other:?}"
        ))),
    }
}

fn anchor(cfg: &ExperimentConfig, components: &[Distribution]) -> CliResult<Anchor> {
    let a = cfg
        .anchor
        .as_ref()
        .ok_or_else(|| config_err("anchor required for minmax3 recovery"))?;
    let res = match (a.x0, a.q, a.quantile) {
        (Some(x0), Some(q), None) => Anchor::new(x0, q),
        (None, None, Some(u)) => {
            let f0 = components
                .first()
                .ok_or_else(|| config_err("anchor.quantile needs components"))?;
            Anchor::at_quantile(f0, u)
        }
        _ => return Err(config_err("anchor: give either x0 and q, or quantile")),
    };
    res.map_err(|e| config_err(format!("anchor: {e}")))
}

fn scheme_generator_kind(scheme: Scheme) -> GeneratorKind {
    match scheme {
        Scheme::Minima3 | Scheme::ScaledMin => GeneratorKind::MinIndependent,
        _ => GeneratorKind::MaxIndependent,
    }
}

fn build_law(
    cfg: &ExperimentConfig,
    s: &Setup,
    components: Vec<Distribution>,
    generator: Option<&str>,
) -> CliResult<JointExtremeLaw> {
    if components.is_empty() {
        return Err(config_err("components: required"));
    }
    let kind = scheme_generator_kind(s.scheme);
    let law = match s.scheme {
        Scheme::Maxima3 | Scheme::Minima3 => {
            let g = point_generator(generator, s, 3, kind)?;
            let [f0, f1, f2]: [Distribution; 3] = components
                .try_into()
                .map_err(|_| config_err("components: need exactly 3"))?;
            if s.scheme == Scheme::Maxima3 {
                joint_cdf_maxima(f0, f1, f2, g)?
            } else {
                joint_survival_minima(f0, f1, f2, g)?
            }
        }
        Scheme::MinMax3 => {
            let g = rect_generator(generator)?;
            let [f0, f1, f2]: [Distribution; 3] = components
                .try_into()
                .map_err(|_| config_err("components: need exactly 3"))?;
            joint_rect_minmax(f0, f1, f2, g)?
        }
        Scheme::ScaledMax | Scheme::ScaledMin => {
            let n = components.len();
            let sv = scales(cfg, n)?;
            let g = point_generator(generator, s, n, kind)?;
            if s.scheme == Scheme::ScaledMax {
                joint_cdf_scaled_maxima(components, sv, g)?
            } else {
                joint_survival_scaled_minima(components, sv, g)?
            }
        }
    };
    Ok(law)
}

/// Forward law over `{edge} u grid` with mode-specific marginal edges.
pub fn run_forward(cfg: &ExperimentConfig, base: &Path) -> CliResult<String> {
    let s = setup(cfg, base)?;
    let law = build_law(cfg, &s, s.components.clone(), cfg.generator.as_deref())?;
    let mode = s.scheme.mode();
    let (e1, e2) = match mode {
        LawMode::Cdf => (f64::INFINITY, f64::INFINITY),
        LawMode::Survival => (f64::NEG_INFINITY, f64::NEG_INFINITY),
        LawMode::Rectangle => (f64::INFINITY, f64::NEG_INFINITY),
    };
    let pts = s.grid.points();
    let mut out = String::from("y1,y2,value\n");
    let mut rows = 0;
    let mut row = |out: &mut String, y1: f64, y2: f64| -> CliResult<()> {
        let v = law.eval(y1, y2)?;
        let _ = writeln!(out, "{},{},{}", fmt_real(y1), fmt_real(y2), fmt_real(v));
        rows += 1;
        Ok(())
    };
    for &y1 in pts {
        for &y2 in pts {
            row(&mut out, y1, y2)?;
        }
    }
    for &y in pts {
        row(&mut out, y, e1)?;
    }
    for &y in pts {
        row(&mut out, e2, y)?;
    }
    let report = validate_joint(&law, mode, &s.grid);
    let _ = writeln!(
        out,
        "#summary,scheme={},mode={mode:?},rows={rows},valid={}",
        s.scheme,
        report.passes()
    );
    Ok(out)
}

/// Joint law read from `y1,y2,value` rows: exact lookups at tabulated
/// points, bilinear in between.
struct TabulatedLaw {
    y1: Vec<f64>,
    y2: Vec<f64>,
    values: Vec<Vec<Option<f64>>>,
}

impl TabulatedLaw {
    fn from_csv(text: &str) -> CliResult<Self> {
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("y1") {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(config_err(format!("law_table line {}: expected y1,y2,value", n + 1)));
            }
            let num = |s: &str| -> CliResult<f64> {
                s.parse::<crate::dist::ExtendedReal>()
                    .map(f64::from)
                    .map_err(|e| config_err(format!("law_table line {}: {e}", n + 1)))
            };
            rows.push((num(f[0])?, num(f[1])?, num(f[2])?));
        }
        if rows.is_empty() {
            return Err(config_err("law_table: no rows"));
        }
        let axis = |sel: fn(&(f64, f64, f64)) -> f64| {
            let mut v: Vec<f64> = rows.iter().map(sel).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        let y1 = axis(|r| r.0);
        let y2 = axis(|r| r.1);
        let mut values = vec![vec![None; y2.len()]; y1.len()];
        for (a, b, v) in rows {
            let i = y1.partition_point(|x| *x < a);
            let j = y2.partition_point(|x| *x < b);
            values[i][j] = Some(v);
        }
        Ok(Self { y1, y2, values })
    }

    fn bracket(axis: &[f64], x: f64) -> (usize, usize, f64) {
        let k = axis.partition_point(|v| *v < x);
        if k < axis.len() && axis[k] == x {
            return (k, k, 0.0);
        }
        if k == 0 {
            return (0, 0, 0.0);
        }
        if k == axis.len() {
            return (k - 1, k - 1, 0.0);
        }
        let (lo, hi) = (axis[k - 1], axis[k]);
        if lo.is_finite() && hi.is_finite() {
            (k - 1, k, (x - lo) / (hi - lo))
        } else if lo.is_finite() {
            (k - 1, k - 1, 0.0)
        } else {
            (k, k, 0.0)
        }
    }
}

impl JointEval for TabulatedLaw {
    fn eval(&self, y1: f64, y2: f64) -> crate::Result<f64> {
        let (i0, i1, u) = Self::bracket(&self.y1, y1);
        let (j0, j1, w) = Self::bracket(&self.y2, y2);
        let get = |i: usize, j: usize| {
            self.values[i][j].ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "law table has no entry at ({}, {})",
                    self.y1[i], self.y2[j]
                ))
            })
        };
        let v00 = get(i0, j0)?;
        if i0 == i1 && j0 == j1 {
            return Ok(v00);
        }
        let (v10, v01, v11) = (get(i1, j0)?, get(i0, j1)?, get(i1, j1)?);
        Ok((1.0 - u) * (1.0 - w) * v00 + u * (1.0 - w) * v10 + (1.0 - u) * w * v01 + u * w * v11)
    }
}

fn recover_with(
    cfg: &ExperimentConfig,
    s: &Setup,
    law: &dyn JointEval,
) -> CliResult<ReconstructionReport> {
    let kind = scheme_generator_kind(s.scheme);
    let report = match s.scheme {
        Scheme::Maxima3 => {
            recover_from_maxima(law, &point_generator(cfg.generator.as_deref(), s, 3, kind)?, &s.grid)?
        }
        Scheme::Minima3 => {
            recover_from_minima(law, &point_generator(cfg.generator.as_deref(), s, 3, kind)?, &s.grid)?
        }
        Scheme::MinMax3 => recover_from_minmax(
            law,
            &rect_generator(cfg.generator.as_deref())?,
            anchor(cfg, &s.components)?,
            &s.grid,
        )?,
        Scheme::ScaledMax | Scheme::ScaledMin => {
            let n = cfg
                .scales
                .as_ref()
                .map(|sc| sc.a.len())
                .ok_or_else(|| config_err("scales: required for scaled schemes"))?;
            let sv = scales(cfg, n)?;
            let g = point_generator(cfg.generator.as_deref(), s, n, kind)?;
            let ek = if s.scheme == Scheme::ScaledMax {
                ExtremeKind::Max
            } else {
                ExtremeKind::Min
            };
            recover_scaled_extremes(law, &sv, &g, &s.grid, ek, support(cfg)?)?
        }
    };
    Ok(report)
}

fn attach_truth(report: ReconstructionReport, truth: &[Distribution]) -> CliResult<ReconstructionReport> {
    if truth.is_empty() {
        Ok(report)
    } else {
        report
            .with_truth(truth)
            .map_err(|e| config_err(format!("components: {e}")))
    }
}

pub fn run_recover(cfg: &ExperimentConfig, base: &Path) -> CliResult<String> {
    let s = setup(cfg, base)?;
    if s.scheme == Scheme::MinMax3 && cfg.anchor.is_none() {
        return Err(config_err("anchor required for minmax3 recovery"));
    }
    let report = match &cfg.law_table {
        Some(p) => {
            let text = reader(&s.base)(p).map_err(|e| config_err(format!("law_table: {e}")))?;
            recover_with(cfg, &s, &TabulatedLaw::from_csv(&text)?)?
        }
        None => {
            let law = build_law(cfg, &s, s.components.clone(), cfg.generator.as_deref())?;
            recover_with(cfg, &s, &law)?
        }
    };
    Ok(attach_truth(report, &s.components)?.to_csv())
}

fn verdict_label(v: &UniquenessVerdict) -> &'static str {
    if !v.joint_equal() {
        "joints differ"
    } else if v.contradiction {
        "contradiction"
    } else {
        "equal/equal"
    }
}

/// Random same-support perturbation of a parametric component.
fn perturb<R: Rng>(d: &Distribution, rng: &mut R) -> Distribution {
    let mut f = || (rng.gen_range(-0.7f64..0.7)).exp();
    let p = match d {
        Distribution::Parametric(p) => p,
        Distribution::Grid(_) => return d.clone(),
    };
    let out = match *p {
        ParametricDist::Uniform { lo, hi } if lo == 0.0 && hi == 1.0 => ParametricDist::power(f()),
        ParametricDist::Uniform { .. } => Ok(p.clone()),
        ParametricDist::Exponential { rate } => ParametricDist::exponential(rate * f()),
        ParametricDist::Weibull { shape, scale } => ParametricDist::weibull(shape * f(), scale * f()),
        ParametricDist::Gumbel { location, scale } => {
            let shift = f().ln();
            ParametricDist::gumbel(location + shift, scale * f())
        }
        ParametricDist::Power { exponent } => ParametricDist::power(exponent * f()),
    };
    out.map(Distribution::from).unwrap_or_else(|_| d.clone())
}

pub fn run_verify(cfg: &ExperimentConfig, base: &Path) -> CliResult<String> {
    let s = setup(cfg, base)?;
    let vc = cfg.verify.clone().unwrap_or(VerifyConfig {
        tol: None,
        trials: None,
        seed: 0,
    });
    let tol = vc.tol.unwrap_or(DEFAULT_TOL);
    if let Some(trials) = vc.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(vc.seed);
        let mut out = String::from("trial,joint_distance,component_distance,verdict\n");
        let mut contradictions = 0;
        for t in 0..trials {
            let a: Vec<_> = s.components.iter().map(|d| perturb(d, &mut rng)).collect();
            let b: Vec<_> = s.components.iter().map(|d| perturb(d, &mut rng)).collect();
            let la = build_law(cfg, &s, a, cfg.generator.as_deref())?;
            let lb = build_law(cfg, &s, b, cfg.generator.as_deref())?;
            let v = check_uniqueness(&la, &lb, &s.grid, tol)?;
            contradictions += usize::from(v.contradiction);
            let _ = writeln!(
                out,
                "{t},{},{},{}",
                fmt_real(v.joint_distance),
                fmt_real(v.component_distance),
                verdict_label(&v)
            );
        }
        let _ = writeln!(
            out,
            "#summary,mode=random,trials={trials},contradictions={contradictions},seed={}",
            vc.seed
        );
        return Ok(out);
    }
    let compare = cfg
        .compare
        .as_ref()
        .ok_or_else(|| config_err("compare: required unless verify.trials is set"))?;
    let other = parse_components(compare, "compare")?;
    let la = build_law(cfg, &s, s.components.clone(), cfg.generator.as_deref())?;
    let lb = build_law(
        cfg,
        &s,
        other,
        cfg.compare_generator.as_deref().or(cfg.generator.as_deref()),
    )?;
    let v = check_uniqueness(&la, &lb, &s.grid, tol)?;
    let mut out = String::from("metric,value\n");
    let _ = writeln!(out, "joint_distance,{}", fmt_real(v.joint_distance));
    let _ = writeln!(out, "joint_witness_y1,{}", fmt_real(v.joint_witness.0));
    let _ = writeln!(out, "joint_witness_y2,{}", fmt_real(v.joint_witness.1));
    for (k, d) in v.component_distances.iter().enumerate() {
        let _ = writeln!(out, "component_distance_{k},{}", fmt_real(*d));
    }
    let _ = writeln!(
        out,
        "#summary,verdict={},joint_distance={},component_distance={},contradiction={},tol={}",
        verdict_label(&v),
        fmt_real(v.joint_distance),
        fmt_real(v.component_distance),
        v.contradiction,
        fmt_real(tol)
    );
    Ok(out)
}

pub fn run_mc(cfg: &ExperimentConfig, base: &Path) -> CliResult<String> {
    let s = setup(cfg, base)?;
    let mc = cfg.mc.as_ref().ok_or_else(|| config_err("mc: required for the mc command"))?;
    if mc.n == 0 {
        return Err(config_err("mc.n must be >= 1"));
    }
    if !(mc.alpha > 0.0 && mc.alpha < 1.0) {
        return Err(config_err(format!("mc.alpha must lie in (0, 1), got {}", mc.alpha)));
    }
    if s.components.is_empty() {
        return Err(config_err("components: required"));
    }
    let generator = cfg.generator.as_deref().unwrap_or("independent");
    if generator.trim() != "independent" {
        return Err(config_err(
            "generator: sampling needs independent components; use \"independent\"",
        ));
    }
    let kind = scheme_generator_kind(s.scheme);
    let c = &s.components;
    let (batch, inputs) = match s.scheme {
        Scheme::Maxima3 | Scheme::Minima3 | Scheme::MinMax3 => {
            let batch = sample_shared_component(&c[0], &c[1], &c[2], mc.n, mc.seed, s.scheme)?;
            let inputs = match s.scheme {
                Scheme::Maxima3 => PluginInputs::Maxima3(PointGenerator::independent(3, kind)?),
                Scheme::Minima3 => PluginInputs::Minima3(PointGenerator::independent(3, kind)?),
                _ => PluginInputs::MinMax3 {
                    generator: RectGenerator::independent(3),
                    anchor: anchor(cfg, c)?,
                },
            };
            (batch, inputs)
        }
        Scheme::ScaledMax | Scheme::ScaledMin => {
            let sv = scales(cfg, c.len())?;
            let batch = if s.scheme == Scheme::ScaledMax {
                sample_scaled_maxima(c, &sv, mc.n, mc.seed)?
            } else {
                sample_scaled_minima(c, &sv, mc.n, mc.seed)?
            };
            let inputs = PluginInputs::Scaled {
                generator: PointGenerator::independent(c.len(), kind)?,
                scales: sv,
                support: support(cfg)?,
            };
            (batch, inputs)
        }
    };
    let report = plugin_reconstruct_at(&batch, &inputs, &s.grid, mc.alpha)?;
    let mut csv = attach_truth(report, c)?.to_csv();
    // Provenance on the footer.
    csv.pop();
    let _ = writeln!(csv, ",n={},seed={}", mc.n, mc.seed);
    Ok(csv)
}

pub fn run_demo(cfg: &ExperimentConfig, _base: &Path) -> CliResult<String> {
    let comps = parse_components(&cfg.components, "components")?;
    let [f0, f1]: [Distribution; 2] = comps
        .try_into()
        .map_err(|_| config_err("components: the demo needs exactly 2"))?;
    let grid = build_grid(&cfg.grid)?;
    Ok(single_max_nonuniqueness_demo(&f0, &f1, &grid).to_text())
}

pub fn run(command: Command, cfg: &ExperimentConfig, base: &Path) -> CliResult<String> {
    match command {
        Command::Forward => run_forward(cfg, base),
        Command::Recover => run_recover(cfg, base),
        Command::Verify => run_verify(cfg, base),
        Command::Mc => run_mc(cfg, base),
        Command::Demo => run_demo(cfg, base),
    }
}

/// Parses, runs and writes; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let result = (|| -> CliResult<()> {
        let path = cli.config.as_ref().ok_or_else(|| config_err("--config is required"))?;
        let cfg = ExperimentConfig::load(path)?.with_overrides(cli.seed, cli.grid_count);
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let text = run(cli.command, &cfg, &base)?;
        let out = cli.out.clone().or_else(|| cfg.output.as_ref().map(|o| base.join(o)));
        match out {
            Some(p) => fs::write(&p, text)
                .map_err(|e| config_err(format!("cannot write {}: {e}", p.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
