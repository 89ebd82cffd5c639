use std::f64::consts::{PI, TAU};

use super::coverage::{coverage_terms, leave_one_out_products, BandCoverage, CoverageTerms};
use super::kinematic::{g1, g4, kinematic_measure};
use super::{CellModel, Mode, OverlapSummary, Rho};
use crate::geometry::Measures;

/// Above this many APs the inhomogeneous handover formula is known to
/// underestimate badly, and reports carry a warning.
pub const HANDOVER_WARNING_L: usize = 100;

/// Tail distribution `q(x) = P(rate ≥ x)` of a rate that only takes the
/// values in `points`. Stored as `(x_k, q(x_k))` with `x_k` ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    pub points: Vec<(f64, f64)>,
}

impl StepFunction {
    /// Builds the tail function of a discrete distribution given as
    /// `(value, weight)` pairs.
    pub fn from_masses(masses: &[(f64, f64)]) -> Self {
        let mut xs: Vec<f64> = masses.iter().map(|m| m.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let points = xs
            .iter()
            .map(|&x| {
                let q: f64 = masses.iter().filter(|m| m.0 >= x).map(|m| m.1).sum();
                (x, q.clamp(0.0, 1.0))
            })
            .collect();
        StepFunction { points }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.points
            .iter()
            .find(|p| p.0 >= x)
            .map(|p| p.1)
            .unwrap_or(0.0)
    }

    pub fn is_non_increasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].1 <= w[0].1)
    }
}

/// Every closed-form metric for one scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub mode: Mode,
    /// Number of APs whose coverage meets the cell.
    pub l: usize,
    /// Static available bandwidth (kbps).
    pub b_s: f64,
    pub q_s: StepFunction,
    /// Dynamic available bandwidth (kbps).
    pub b_d: f64,
    pub q_d: StepFunction,
    /// Mean total throughput per traversal (kbps·m).
    pub t_d: f64,
    /// Mean number of vertical handovers per traversal.
    pub n_h: f64,
    /// Per-band coverage probabilities.
    pub p: Vec<f64>,
    pub r_wlan: f64,
    pub p_wlan: f64,
    /// Some probability left `[0, 1]` and was clamped.
    pub clamped: bool,
    /// `n_h` comes from the inhomogeneous formula at a large `l`, where it
    /// is known to be unreliable.
    pub handover_warning: bool,
}

/// `Σ_j (p_j s_w + (w_j − p_j) s_j)`: the mean of a rate that is `s_w`
/// on the covered part of each band and `s_j` elsewhere.
fn mixed_mean(cov: &BandCoverage, rates: &[f64], s_w: f64) -> f64 {
    let p = cov.probabilities();
    let w = cov.weights();
    (0..rates.len())
        .map(|j| p[j] * s_w + (w[j] - p[j]) * rates[j])
        .sum()
}

fn mixed_tail(cov: &BandCoverage, rates: &[f64], s_w: f64) -> StepFunction {
    let p = cov.probabilities();
    let w = cov.weights();
    let mut masses = Vec::with_capacity(2 * rates.len());
    for j in 0..rates.len() {
        masses.push((s_w, p[j]));
        masses.push((rates[j], w[j] - p[j]));
    }
    StepFunction::from_masses(&masses)
}

/// `(π / L(C)) (s_w Σ covered_j + Σ s_j (band_j − covered_j))`
fn throughput(cov: &BandCoverage, rates: &[f64], s_w: f64, perimeter: f64) -> f64 {
    let covered: f64 = cov.covered.iter().sum();
    let uncovered: f64 = (0..rates.len())
        .map(|j| rates[j] * (cov.band[j] - cov.covered[j]))
        .sum();
    PI / perimeter * (s_w * covered + uncovered)
}

fn weights_homogeneous(ov: &OverlapSummary, aps: &[Measures]) -> CoverageTerms {
    let u: Vec<f64> = aps
        .iter()
        .map(|d| TAU * d.area / kinematic_measure(ov.cell, *d))
        .collect();
    coverage_terms(&u)
}

fn weights_inhomogeneous(ov: &OverlapSummary, aps: &[Measures], rho: Rho) -> CoverageTerms {
    let u: Vec<f64> = aps.iter().map(|d| TAU * d.area / g1(*d, ov, rho)).collect();
    coverage_terms(&u)
}

pub(crate) fn band_coverage(
    ov: &OverlapSummary,
    rho: Rho,
    aps: &[Measures],
    mode: Mode,
) -> BandCoverage {
    match mode {
        Mode::Baseline => BandCoverage::none(ov),
        Mode::Homogeneous => BandCoverage::homogeneous(ov, &weights_homogeneous(ov, aps)),
        Mode::Inhomogeneous => {
            BandCoverage::inhomogeneous(ov, &weights_inhomogeneous(ov, aps, rho), rho)
        }
    }
}

/// Per-band probability that a uniform user in C is in band j and covered
/// by some WLAN.
pub fn p_j(ov: &OverlapSummary, rho: Rho, aps: &[Measures], mode: Mode) -> Vec<f64> {
    band_coverage(ov, rho, aps, mode).probabilities()
}

/// `(B̃_s, q̃_s)` without any WLAN.
pub fn baseline_static(cell: &CellModel, ov: &OverlapSummary) -> (f64, StepFunction) {
    let none = BandCoverage::none(ov);
    (
        mixed_mean(&none, cell.rates(), cell.wlan_rate()),
        mixed_tail(&none, cell.rates(), cell.wlan_rate()),
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineDynamic {
    pub b_d: f64,
    pub q_d: StepFunction,
    pub t_d: f64,
}

/// `(B̃_d, q̃_d, T̃_d)` without any WLAN.
pub fn baseline_dynamic(cell: &CellModel, ov: &OverlapSummary) -> BaselineDynamic {
    let none = BandCoverage::none(ov);
    let (b_d, q_d) = dynamic_from(&none, cell);
    BaselineDynamic {
        b_d,
        q_d,
        t_d: throughput(&none, cell.rates(), cell.wlan_rate(), ov.cell.perimeter),
    }
}

/// `(B_s, q_s)` for a user standing at a uniform point of C.
pub fn static_bandwidth(
    cell: &CellModel,
    ov: &OverlapSummary,
    rho: Rho,
    aps: &[Measures],
    mode: Mode,
) -> (f64, StepFunction) {
    let cov = band_coverage(ov, rho, aps, mode);
    (
        mixed_mean(&cov, cell.rates(), cell.wlan_rate()),
        mixed_tail(&cov, cell.rates(), cell.wlan_rate()),
    )
}

/// Mean total throughput `T_d` over a random line crossing C.
pub fn mean_total_throughput(
    cell: &CellModel,
    ov: &OverlapSummary,
    rho: Rho,
    aps: &[Measures],
    mode: Mode,
) -> f64 {
    let cov = band_coverage(ov, rho, aps, mode);
    throughput(&cov, cell.rates(), cell.wlan_rate(), ov.cell.perimeter)
}

/// `B_d = T_d L(C) / (π|C|)` and `q_d`.
///
/// The mean chord of band j inside and outside the WLAN coverage is
/// `π/L(C)` times the corresponding expected area, so `B_d` is evaluated
/// band by band in the same form as `B_s`. This keeps `B_d = B_s` exact
/// rather than subject to the rounding of the divide.
pub fn dynamic_bandwidth(
    cell: &CellModel,
    ov: &OverlapSummary,
    rho: Rho,
    aps: &[Measures],
    mode: Mode,
) -> (f64, StepFunction) {
    dynamic_from(&band_coverage(ov, rho, aps, mode), cell)
}

/// Chord shares equal area shares, so the dynamic mixture has the same
/// weights as the static one.
fn dynamic_from(cov: &BandCoverage, cell: &CellModel) -> (f64, StepFunction) {
    (
        mixed_mean(cov, cell.rates(), cell.wlan_rate()),
        mixed_tail(cov, cell.rates(), cell.wlan_rate()),
    )
}

/// Mean number of vertical handovers `N_h` along a random line crossing C.
///
/// Homogeneous: `(4π|C|/L(C)) Σ_i L(D_i)/f(C,D_i) Π_{j≠i}(1 − 2π|D_j|/f(C,D_j))`.
/// Inhomogeneous: `|C|` becomes `|C| + ρ_H|C∩Ω_H| − ρ_L|C∩Ω_L|`, `f` becomes
/// `g_1`, and each uncovered factor picks up `g_4(C)`.
pub fn mean_handovers(ov: &OverlapSummary, rho: Rho, aps: &[Measures], mode: Mode) -> f64 {
    if aps.is_empty() {
        return 0.0;
    }
    match mode {
        Mode::Baseline => 0.0,
        Mode::Homogeneous => {
            let f: Vec<f64> = aps.iter().map(|d| kinematic_measure(ov.cell, *d)).collect();
            let u: Vec<f64> = aps.iter().zip(&f).map(|(d, f)| TAU * d.area / f).collect();
            let u = coverage_terms(&u).u;
            let others = leave_one_out_products(&u);
            let sum: f64 = (0..aps.len())
                .map(|i| aps[i].perimeter / f[i] * others[i])
                .sum();
            2.0 * TAU * ov.cell.area / ov.cell.perimeter * sum
        }
        Mode::Inhomogeneous => {
            let g: Vec<f64> = aps.iter().map(|d| g1(*d, ov, rho)).collect();
            let scale = g4(ov, rho);
            let v: Vec<f64> = aps
                .iter()
                .zip(&g)
                .map(|(d, g)| TAU * d.area * scale / g)
                .collect();
            let v = coverage_terms(&v).u;
            let others = leave_one_out_products(&v);
            let sum: f64 = (0..aps.len())
                .map(|i| aps[i].perimeter / g[i] * others[i])
                .sum();
            2.0 * TAU * ov.weighted_cell_area(rho) / ov.cell.perimeter * sum
        }
    }
}

/// `(r_WLAN, p_WLAN)`: share of delivered traffic carried by WLANs and the
/// probability a static user is covered.
pub fn offload_ratios(
    cell: &CellModel,
    ov: &OverlapSummary,
    rho: Rho,
    aps: &[Measures],
    mode: Mode,
) -> (f64, f64) {
    let cov = band_coverage(ov, rho, aps, mode);
    ratios_from(&cov, mixed_mean(&cov, cell.rates(), cell.wlan_rate()), cell.wlan_rate())
}

fn ratios_from(cov: &BandCoverage, b_s: f64, s_w: f64) -> (f64, f64) {
    let p_wlan: f64 = cov.probabilities().iter().sum::<f64>().clamp(0.0, 1.0);
    let r_wlan = (s_w * p_wlan / b_s).clamp(0.0, 1.0);
    (r_wlan, p_wlan)
}

/// Evaluates every metric. `aps` are the measures of the coverage sets
/// meeting the cell; they are ignored in baseline mode, and `ov`'s Ω terms
/// and `rho` are ignored in homogeneous mode.
pub fn evaluate(
    cell: &CellModel,
    ov: &OverlapSummary,
    rho: Rho,
    aps: &[Measures],
    mode: Mode,
) -> MetricsReport {
    let aps = if mode == Mode::Baseline { &[][..] } else { aps };
    let cov = band_coverage(ov, rho, aps, mode);
    let rates = cell.rates();
    let s_w = cell.wlan_rate();
    let b_s = mixed_mean(&cov, rates, s_w);
    let q_s = mixed_tail(&cov, rates, s_w);
    let (b_d, q_d) = dynamic_from(&cov, cell);
    let (r_wlan, p_wlan) = ratios_from(&cov, b_s, s_w);
    MetricsReport {
        mode,
        l: aps.len(),
        b_s,
        q_s,
        b_d,
        q_d,
        t_d: throughput(&cov, rates, s_w, ov.cell.perimeter),
        n_h: mean_handovers(ov, rho, aps, mode),
        p: cov.probabilities(),
        r_wlan,
        p_wlan,
        clamped: cov.clamped,
        handover_warning: mode == Mode::Inhomogeneous && aps.len() > HANDOVER_WARNING_L,
    }
}
