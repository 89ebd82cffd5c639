//! Monte Carlo estimates of the offloading metrics.
//!
//! Static users are uniform points of the cell. Moving users follow random
//! lines drawn from the invariant line measure `dp dθ`, restricted to lines
//! that meet the cell. Every line is cut at all boundary crossings of the
//! CQI regions and coverage sets, and each piece is classified at its
//! midpoint, so chord bookkeeping is exact.
//!
//! Random streams are keyed by (replication, purpose, chunk), so results
//! do not depend on the execution policy or thread count.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exec::Exec;
use crate::formulas::CellModel;
use crate::geometry::{ConvexShape, Interval, Intervals, Line, Point};
use crate::pointprocess::{
    conditioned_deployment_with, placement_halo, sample_deployment_with, Deployment,
    IntensityError, IntensityModel,
};

const POINT_CHUNK: usize = 4096;
const LINE_CHUNK: usize = 512;

const STREAM_DEPLOY: u64 = 1;
const STREAM_POINTS: u64 = 2;
const STREAM_LINES: u64 = 3;
const STREAM_OMEGA: u64 = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
    #[error(transparent)]
    Intensity(#[from] IntensityError),
}

/// How many APs each replication gets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LMode {
    /// Exactly `l` coverage sets meeting the cell.
    Fixed(usize),
    /// A Poisson realization on a halo around the cell; `l` is whatever
    /// meets the cell.
    Poisson,
}

/// Where `Ω_H` and `Ω_L` sit from one replication to the next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OmegaPlacement {
    /// As given in the intensity model.
    #[default]
    Fixed,
    /// Rotated rigidly about the cell center by a uniform angle.
    Rotated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub n_points: usize,
    pub n_lines: usize,
    pub n_replications: usize,
    pub seed: u64,
    pub l_mode: LMode,
    pub omega: OmegaPlacement,
    pub exec: Exec,
}

impl SimConfig {
    pub fn new(l_mode: LMode) -> Self {
        SimConfig {
            n_points: 100_000,
            n_lines: 10_000,
            n_replications: 1,
            seed: 1,
            l_mode,
            omega: OmegaPlacement::Fixed,
            exec: Exec::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.n_points == 0 {
            return Err(SimError::ZeroCount("n_points"));
        }
        if self.n_lines == 0 {
            return Err(SimError::ZeroCount("n_lines"));
        }
        if self.n_replications == 0 {
            return Err(SimError::ZeroCount("n_replications"));
        }
        Ok(())
    }
}

/// A Monte Carlo estimate and its standard error.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn new(mean: f64, stderr: f64) -> Self {
        Estimate { mean, stderr }
    }

    /// Mean and standard error of the mean of independent values.
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        if values.len() < 2 {
            return Estimate::new(mean, 0.0);
        }
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Estimate::new(mean, (var / n).sqrt())
    }

    /// `Σy / Σx` with the delta-method standard error.
    fn ratio(y: &[f64], x: &[f64]) -> Self {
        let n = x.len() as f64;
        let sx: f64 = x.iter().sum();
        let r = y.iter().sum::<f64>() / sx;
        if x.len() < 2 {
            return Estimate::new(r, 0.0);
        }
        let resid: f64 = y.iter().zip(x).map(|(y, x)| (y - r * x).powi(2)).sum();
        let se = (resid / (n * (n - 1.0))).sqrt() / (sx / n);
        Estimate::new(r, se)
    }

    fn proportion(hits: f64, n: f64) -> Self {
        let p = hits / n;
        Estimate::new(p, (p * (1.0 - p) / n).max(0.0).sqrt())
    }

    /// Number of standard errors between the estimate and `value`.
    pub fn z_score(&self, value: f64) -> f64 {
        (self.mean - value).abs() / self.stderr
    }
}

/// Sorted distinct rates: the only points where `q` can jump.
pub fn rate_levels(cell: &CellModel) -> Vec<f64> {
    let mut xs: Vec<f64> = cell.rates().to_vec();
    xs.push(cell.wlan_rate());
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn stream_rng(seed: u64, replication: u64, purpose: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((replication << 32) | (purpose << 28) | chunk);
    rng
}

/// Uniform grid over the cell's bounding box listing, per grid cell, the
/// coverage sets whose bounding boxes reach it.
pub struct CoverageIndex<'a> {
    shapes: &'a [ConvexShape],
    lo: Point,
    size: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl<'a> CoverageIndex<'a> {
    pub fn new(shapes: &'a [ConvexShape], lo: Point, hi: Point) -> Self {
        let width = (hi.x - lo.x).max(1e-9);
        let height = (hi.y - lo.y).max(1e-9);
        let typical = shapes
            .iter()
            .map(|s| 2.0 * s.bounding_radius())
            .fold(0.0, f64::max);
        let size = typical.max((width * height / 65_536.0).sqrt()).max(1e-9);
        let nx = ((width / size).ceil() as usize).max(1);
        let ny = ((height / size).ceil() as usize).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (i, s) in shapes.iter().enumerate() {
            let (a, b) = s.bbox();
            if b.x < lo.x || b.y < lo.y || a.x > hi.x || a.y > hi.y {
                continue;
            }
            let ix0 = (((a.x - lo.x) / size).floor().max(0.0) as usize).min(nx - 1);
            let ix1 = (((b.x - lo.x) / size).floor().max(0.0) as usize).min(nx - 1);
            let iy0 = (((a.y - lo.y) / size).floor().max(0.0) as usize).min(ny - 1);
            let iy1 = (((b.y - lo.y) / size).floor().max(0.0) as usize).min(ny - 1);
            for iy in iy0..=iy1 {
                for ix in ix0..=ix1 {
                    buckets[iy * nx + ix].push(i as u32);
                }
            }
        }
        CoverageIndex {
            shapes,
            lo,
            size,
            nx,
            ny,
            buckets,
        }
    }

    pub fn covered(&self, p: Point) -> bool {
        let fx = (p.x - self.lo.x) / self.size;
        let fy = (p.y - self.lo.y) / self.size;
        if fx < 0.0 || fy < 0.0 {
            return false;
        }
        let (ix, iy) = (fx as usize, fy as usize);
        if ix >= self.nx || iy >= self.ny {
            // points on the far edge of the box
            let ix = ix.min(self.nx - 1);
            let iy = iy.min(self.ny - 1);
            return self.bucket_covers(iy * self.nx + ix, p);
        }
        self.bucket_covers(iy * self.nx + ix, p)
    }

    fn bucket_covers(&self, bucket: usize, p: Point) -> bool {
        self.buckets[bucket]
            .iter()
            .any(|&i| self.shapes[i as usize].contains(p))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StaticEstimates {
    pub b_s: Estimate,
    /// `(x, q_s(x))` at each distinct rate.
    pub q_s: Vec<(f64, Estimate)>,
    pub p: Vec<Estimate>,
    pub p_wlan: Estimate,
    pub r_wlan: Estimate,
    pub points: usize,
}

/// Point counts per (band, covered) category.
#[derive(Clone, Debug, Default)]
struct StaticTally {
    covered: Vec<u64>,
    uncovered: Vec<u64>,
}

impl StaticTally {
    fn new(bands: usize) -> Self {
        StaticTally {
            covered: vec![0; bands],
            uncovered: vec![0; bands],
        }
    }

    fn merge(&mut self, other: &StaticTally) {
        for j in 0..self.covered.len() {
            self.covered[j] += other.covered[j];
            self.uncovered[j] += other.uncovered[j];
        }
    }

    fn estimates(&self, cell: &CellModel) -> StaticEstimates {
        let s_w = cell.wlan_rate();
        let rates = cell.rates();
        let categories: Vec<(f64, f64, bool)> = (0..rates.len())
            .flat_map(|j| {
                [
                    (self.covered[j] as f64, s_w, true),
                    (self.uncovered[j] as f64, rates[j], false),
                ]
            })
            .collect();
        let n: f64 = categories.iter().map(|c| c.0).sum();
        let b = categories.iter().map(|c| c.0 * c.1).sum::<f64>() / n;
        let var = if n > 1.0 {
            categories.iter().map(|c| c.0 * (c.1 - b).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let b_s = Estimate::new(b, (var / n).sqrt());
        let q_s = rate_levels(cell)
            .into_iter()
            .map(|x| {
                let hits: f64 = categories.iter().filter(|c| c.1 >= x).map(|c| c.0).sum();
                (x, Estimate::proportion(hits, n))
            })
            .collect();
        let p = self
            .covered
            .iter()
            .map(|&c| Estimate::proportion(c as f64, n))
            .collect();
        let cov: f64 = self.covered.iter().sum::<u64>() as f64;
        let p_wlan = Estimate::proportion(cov, n);
        // ratio of means of y = s_w·1(covered) over x = rate
        let r = s_w * cov / (b * n);
        let resid: f64 = categories
            .iter()
            .map(|c| {
                let y = if c.2 { s_w } else { 0.0 };
                c.0 * (y - r * c.1).powi(2)
            })
            .sum();
        let r_se = if n > 1.0 {
            (resid / (n * (n - 1.0))).sqrt() / b
        } else {
            0.0
        };
        StaticEstimates {
            b_s,
            q_s,
            p,
            p_wlan,
            r_wlan: Estimate::new(r, r_se),
            points: n as usize,
        }
    }
}

fn static_tally(
    cell: &CellModel,
    coverage: &[ConvexShape],
    n_points: usize,
    seed: u64,
    replication: u64,
    exec: Exec,
) -> StaticTally {
    let (lo, hi) = cell.outer().bbox();
    let index = CoverageIndex::new(coverage, lo, hi);
    let chunks = n_points.div_ceil(POINT_CHUNK);
    let parts = exec.map(chunks, |k| {
        let mut rng = stream_rng(seed, replication, STREAM_POINTS, k as u64);
        let count = POINT_CHUNK.min(n_points - k * POINT_CHUNK);
        let mut tally = StaticTally::new(cell.band_count());
        for _ in 0..count {
            let p = cell.outer().sample_uniform(&mut rng);
            let band = cell.band_of(p).unwrap_or(0);
            if index.covered(p) {
                tally.covered[band] += 1;
            } else {
                tally.uncovered[band] += 1;
            }
        }
        tally
    });
    let mut total = StaticTally::new(cell.band_count());
    for t in &parts {
        total.merge(t);
    }
    total
}

/// Static-user estimates for one deployment.
pub fn simulate_static(cell: &CellModel, deployment: &Deployment, cfg: &SimConfig) -> StaticEstimates {
    static_tally(cell, &deployment.coverages(), cfg.n_points, cfg.seed, 0, cfg.exec)
        .estimates(cell)
}

/// Everything measured along one line.
#[derive(Clone, Debug, PartialEq)]
pub struct LineTrace {
    /// Length of the line inside the cell.
    pub chord: f64,
    /// Covered length per band.
    pub covered: Vec<f64>,
    /// Uncovered length per band.
    pub uncovered: Vec<f64>,
    /// `Σ rate × length`.
    pub throughput: f64,
    /// Coverage-boundary crossings strictly inside the cell and outside
    /// every other coverage set.
    pub handovers: u32,
}

impl LineTrace {
    /// `|Σ pieces − chord|`, zero up to rounding.
    pub fn conservation_error(&self) -> f64 {
        let pieces: f64 = self.covered.iter().chain(&self.uncovered).sum();
        (pieces - self.chord).abs()
    }

    /// Length travelled at a rate of at least `x`.
    pub fn length_at_least(&self, cell: &CellModel, x: f64) -> f64 {
        let wlan = if cell.wlan_rate() >= x {
            self.covered.iter().sum()
        } else {
            0.0
        };
        let cellular: f64 = self
            .uncovered
            .iter()
            .zip(cell.rates())
            .filter(|(_, s)| **s >= x)
            .map(|(len, _)| len)
            .sum();
        wlan + cellular
    }
}

fn in_closed(ivs: &[Interval], t: f64) -> bool {
    ivs.iter().any(|&(a, b)| a <= t && t <= b)
}

fn in_open(ivs: &[Interval], t: f64) -> bool {
    ivs.iter().any(|&(a, b)| a < t && t < b)
}

/// Cuts `line` at every boundary crossing and classifies the pieces.
/// Returns `None` when the line misses the cell.
pub fn trace_line(cell: &CellModel, coverage: &[ConvexShape], line: &Line) -> Option<LineTrace> {
    let outer: Intervals = cell.outer().chord_intervals(line);
    let chord: f64 = outer.iter().map(|(a, b)| b - a).sum();
    if chord <= 0.0 {
        return None;
    }
    let regions: Vec<Intervals> = cell
        .regions()
        .iter()
        .skip(1)
        .map(|r| r.chord_intervals(line))
        .collect();
    let (lo, hi) = (outer[0].0, outer[outer.len() - 1].1);
    let mut hits: Vec<(usize, Intervals)> = Vec::new();
    for (i, d) in coverage.iter().enumerate() {
        if line.offset_of(d.center()).abs() > d.bounding_radius() {
            continue;
        }
        let ivs: Intervals = d
            .chord_intervals(line)
            .into_iter()
            .filter(|(a, b)| b > a && *b > lo && *a < hi)
            .collect();
        if !ivs.is_empty() {
            hits.push((i, ivs));
        }
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(2 * (1 + regions.len() + hits.len()));
    let mut push = |ivs: &Intervals| {
        for &(a, b) in ivs {
            cuts.push(a);
            cuts.push(b);
        }
    };
    push(&outer);
    regions.iter().for_each(&mut push);
    hits.iter().for_each(|(_, ivs)| push(ivs));
    cuts.retain(|t| *t >= lo && *t <= hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let bands = cell.band_count();
    let mut trace = LineTrace {
        chord,
        covered: vec![0.0; bands],
        uncovered: vec![0.0; bands],
        throughput: 0.0,
        handovers: 0,
    };
    for w in cuts.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        if !in_closed(&outer, mid) {
            continue;
        }
        let band = regions
            .iter()
            .rposition(|ivs| in_closed(ivs, mid))
            .map_or(0, |k| k + 1);
        if hits.iter().any(|(_, ivs)| in_closed(ivs, mid)) {
            trace.covered[band] += len;
            trace.throughput += cell.wlan_rate() * len;
        } else {
            trace.uncovered[band] += len;
            trace.throughput += cell.rates()[band] * len;
        }
    }
    for (k, (_, ivs)) in hits.iter().enumerate() {
        for &(a, b) in ivs {
            for t in [a, b] {
                if !in_open(&outer, t) {
                    continue;
                }
                let shadowed = hits
                    .iter()
                    .enumerate()
                    .any(|(m, (_, other))| m != k && in_closed(other, t));
                if !shadowed {
                    trace.handovers += 1;
                }
            }
        }
    }
    Some(trace)
}

/// A line from the invariant measure, conditioned on meeting the cell.
pub fn sample_line<R: Rng + ?Sized>(cell: &ConvexShape, rng: &mut R) -> Line {
    let c = cell.center();
    let reach = cell.bounding_radius();
    loop {
        let theta = rng.random::<f64>() * PI;
        let p = c.dot(Point::unit(theta)) + reach * (2.0 * rng.random::<f64>() - 1.0);
        let line = Line::new(theta, p);
        if cell.chord_length(&line) > 0.0 {
            return line;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicEstimates {
    pub b_d: Estimate,
    pub q_d: Vec<(f64, Estimate)>,
    pub t_d: Estimate,
    pub n_h: Estimate,
    pub mean_chord: Estimate,
    pub lines: usize,
    /// Largest per-line `|Σ pieces − chord| / chord`.
    pub max_conservation_error: f64,
}

fn trace_lines(
    cell: &CellModel,
    coverage: &[ConvexShape],
    n_lines: usize,
    seed: u64,
    replication: u64,
    exec: Exec,
) -> Vec<LineTrace> {
    let chunks = n_lines.div_ceil(LINE_CHUNK);
    exec.map(chunks, |k| {
        let mut rng = stream_rng(seed, replication, STREAM_LINES, k as u64);
        let count = LINE_CHUNK.min(n_lines - k * LINE_CHUNK);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let line = sample_line(cell.outer(), &mut rng);
            if let Some(t) = trace_line(cell, coverage, &line) {
                out.push(t);
            }
        }
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

fn dynamic_estimates(cell: &CellModel, traces: &[LineTrace]) -> DynamicEstimates {
    let chords: Vec<f64> = traces.iter().map(|t| t.chord).collect();
    let through: Vec<f64> = traces.iter().map(|t| t.throughput).collect();
    let hand: Vec<f64> = traces.iter().map(|t| t.handovers as f64).collect();
    let q_d = rate_levels(cell)
        .into_iter()
        .map(|x| {
            let above: Vec<f64> = traces.iter().map(|t| t.length_at_least(cell, x)).collect();
            (x, Estimate::ratio(&above, &chords))
        })
        .collect();
    DynamicEstimates {
        b_d: Estimate::ratio(&through, &chords),
        q_d,
        t_d: Estimate::from_samples(&through),
        n_h: Estimate::from_samples(&hand),
        mean_chord: Estimate::from_samples(&chords),
        lines: traces.len(),
        max_conservation_error: traces
            .iter()
            .map(|t| t.conservation_error() / t.chord)
            .fold(0.0, f64::max),
    }
}

/// Moving-user estimates for one deployment.
pub fn simulate_dynamic(
    cell: &CellModel,
    deployment: &Deployment,
    cfg: &SimConfig,
) -> DynamicEstimates {
    let traces = trace_lines(cell, &deployment.coverages(), cfg.n_lines, cfg.seed, 0, cfg.exec);
    dynamic_estimates(cell, &traces)
}

/// Mean handover count per line for one deployment.
pub fn simulate_handovers(cell: &CellModel, deployment: &Deployment, cfg: &SimConfig) -> Estimate {
    simulate_dynamic(cell, deployment, cfg).n_h
}

/// Cell, AP intensity and coverage template for replicated runs.
#[derive(Clone, Debug, PartialEq)]
pub struct SimScenario {
    pub cell: CellModel,
    pub intensity: IntensityModel,
    pub template: ConvexShape,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub b_s: Estimate,
    pub q_s: Vec<(f64, Estimate)>,
    pub p: Vec<Estimate>,
    pub p_wlan: Estimate,
    pub r_wlan: Estimate,
    pub b_d: Estimate,
    pub q_d: Vec<(f64, Estimate)>,
    pub t_d: Estimate,
    pub n_h: Estimate,
    pub mean_chord: Estimate,
    /// Average number of coverage sets meeting the cell.
    pub mean_l: f64,
    pub replications: usize,
    pub max_conservation_error: f64,
}

/// Static and dynamic estimates of one replication and its AP count.
type Replication = (StaticEstimates, DynamicEstimates, usize);

impl SimResult {
    fn single(s: StaticEstimates, d: DynamicEstimates, l: usize) -> Self {
        SimResult {
            b_s: s.b_s,
            q_s: s.q_s,
            p: s.p,
            p_wlan: s.p_wlan,
            r_wlan: s.r_wlan,
            b_d: d.b_d,
            q_d: d.q_d,
            t_d: d.t_d,
            n_h: d.n_h,
            mean_chord: d.mean_chord,
            mean_l: l as f64,
            replications: 1,
            max_conservation_error: d.max_conservation_error,
        }
    }

    /// Pools replications: mean of the per-replication estimates with the
    /// standard error taken from their spread.
    fn pooled(runs: &[Replication]) -> Self {
        if runs.len() == 1 {
            let (s, d, l) = runs[0].clone();
            return SimResult::single(s, d, l);
        }
        let pool = |f: &dyn Fn(&Replication) -> f64| {
            Estimate::from_samples(&runs.iter().map(f).collect::<Vec<_>>())
        };
        let pool_steps = |f: &dyn Fn(&Replication) -> &Vec<(f64, Estimate)>| {
            let first = f(&runs[0]);
            (0..first.len())
                .map(|k| (first[k].0, pool(&|r| f(r)[k].1.mean)))
                .collect::<Vec<_>>()
        };
        let bands = runs[0].0.p.len();
        SimResult {
            b_s: pool(&|r| r.0.b_s.mean),
            q_s: pool_steps(&|r| &r.0.q_s),
            p: (0..bands).map(|j| pool(&|r| r.0.p[j].mean)).collect(),
            p_wlan: pool(&|r| r.0.p_wlan.mean),
            r_wlan: pool(&|r| r.0.r_wlan.mean),
            b_d: pool(&|r| r.1.b_d.mean),
            q_d: pool_steps(&|r| &r.1.q_d),
            t_d: pool(&|r| r.1.t_d.mean),
            n_h: pool(&|r| r.1.n_h.mean),
            mean_chord: pool(&|r| r.1.mean_chord.mean),
            mean_l: runs.iter().map(|r| r.2 as f64).sum::<f64>() / runs.len() as f64,
            replications: runs.len(),
            max_conservation_error: runs
                .iter()
                .map(|r| r.1.max_conservation_error)
                .fold(0.0, f64::max),
        }
    }
}

fn rotated_intensity(
    model: &IntensityModel,
    about: Point,
    angle: f64,
) -> Result<IntensityModel, IntensityError> {
    let turn = |parts: &[ConvexShape]| -> Vec<ConvexShape> {
        parts
            .iter()
            .map(|s| s.placed((s.center() - about).rotate(angle) + about, angle))
            .collect()
    };
    IntensityModel::new(
        model.lambda0(),
        model.lambda_high(),
        model.lambda_low(),
        turn(model.omega_high()),
        turn(model.omega_low()),
    )
}

/// Draws the deployment used by replication `replication`.
pub fn replication_deployment(
    scenario: &SimScenario,
    cfg: &SimConfig,
    replication: u64,
) -> Result<Deployment, SimError> {
    let cell = scenario.cell.outer();
    let intensity = match cfg.omega {
        OmegaPlacement::Fixed => scenario.intensity.clone(),
        OmegaPlacement::Rotated => {
            let mut rng = stream_rng(cfg.seed, replication, STREAM_OMEGA, 0);
            let angle = rng.random::<f64>() * 2.0 * PI;
            rotated_intensity(&scenario.intensity, cell.center(), angle)?
        }
    };
    let mut rng = stream_rng(cfg.seed, replication, STREAM_DEPLOY, 0);
    Ok(match cfg.l_mode {
        LMode::Fixed(l) => {
            conditioned_deployment_with(&intensity, cell, l, &scenario.template, &mut rng)?
        }
        LMode::Poisson => {
            let halo = placement_halo(cell, &scenario.template);
            sample_deployment_with(&intensity, &halo, &scenario.template, &mut rng).meeting(cell)
        }
    })
}

/// Independent replications, each with its own deployment, pooled.
pub fn run_replications(scenario: &SimScenario, cfg: &SimConfig) -> Result<SimResult, SimError> {
    cfg.validate()?;
    let cell = &scenario.cell;
    // Parallelism goes to replications when there are several, otherwise
    // to the points and lines of the single run.
    let (outer, inner) = if cfg.n_replications > 1 {
        (cfg.exec, Exec::Sequential)
    } else {
        (Exec::Sequential, cfg.exec)
    };
    let runs = outer.map(cfg.n_replications, |r| {
        let dep = replication_deployment(scenario, cfg, r as u64)?;
        let cov = dep.coverages();
        let s = static_tally(cell, &cov, cfg.n_points, cfg.seed, r as u64, inner).estimates(cell);
        let d = dynamic_estimates(
            cell,
            &trace_lines(cell, &cov, cfg.n_lines, cfg.seed, r as u64, inner),
        );
        Ok((s, d, dep.len()))
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>, SimError>>()?;
    Ok(SimResult::pooled(&runs))
}

/// Random chords of `shape` from the conditioned invariant measure.
pub fn sample_chords(shape: &ConvexShape, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, 0, STREAM_LINES, 0);
    (0..n)
        .map(|_| shape.chord_length(&sample_line(shape, &mut rng)))
        .collect()
}
