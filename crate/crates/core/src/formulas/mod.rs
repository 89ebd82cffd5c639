//! Closed-form offloading metrics.
//!
//! Units: bandwidths in kbps, lengths in meters, areas in m². Intensities
//! only enter through the dimensionless ratios ρ_H and ρ_L.
//!
//! Each metric has a homogeneous (exact) and an inhomogeneous
//! (approximate) variant. The inhomogeneous code is arranged so that with
//! ρ_H = ρ_L = 0 every intermediate reduces to the homogeneous one without
//! changing a single bit.

mod coverage;
pub mod explicit;
mod kinematic;
mod metrics;

use thiserror::Error;

use crate::geometry::{boundary_arc_in, overlap_area, ConvexShape, Measures, Point};

pub use coverage::{
    coverage_terms, elementary_symmetric, product_one_minus, BandCoverage, CoverageTerms,
    LOG_PRODUCT_THRESHOLD,
};
pub use kinematic::{
    containment_measure, eq_first, eq_second, equivalent_radius, g1, g2, g3, g4,
    kinematic_measure,
};
pub use metrics::{
    baseline_dynamic, baseline_static, dynamic_bandwidth, evaluate, mean_handovers,
    mean_total_throughput, offload_ratios, p_j, static_bandwidth, BaselineDynamic,
    MetricsReport, StepFunction, HANDOVER_WARNING_L,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("cell needs at least one region")]
    NoRegions,
    #[error("{regions} regions but {rates} rates")]
    RateCount { regions: usize, rates: usize },
    #[error("rate {0} must be positive and finite")]
    BadRate(f64),
    #[error("region {0} is not contained in region {1}")]
    NotNested(usize, usize),
    #[error("rho_h must be >= 0 and rho_l in [0, 1], got ({0}, {1})")]
    BadRho(f64, f64),
    #[error("overlap summary is inconsistent: {0}")]
    BadSummary(String),
}

/// Which family of formulas to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Homogeneous,
    Inhomogeneous,
    /// No WLANs at all.
    Baseline,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Homogeneous => "homogeneous",
            Mode::Inhomogeneous => "inhomogeneous",
            Mode::Baseline => "baseline",
        }
    }
}

/// Nested CQI regions `C_1 ⊇ … ⊇ C_n` with per-band rates and the WLAN rate.
#[derive(Clone, Debug, PartialEq)]
pub struct CellModel {
    regions: Vec<ConvexShape>,
    rates: Vec<f64>,
    wlan_rate: f64,
}

impl CellModel {
    pub fn new(
        regions: Vec<ConvexShape>,
        rates: Vec<f64>,
        wlan_rate: f64,
    ) -> Result<Self, ModelError> {
        if regions.is_empty() {
            return Err(ModelError::NoRegions);
        }
        if regions.len() != rates.len() {
            return Err(ModelError::RateCount {
                regions: regions.len(),
                rates: rates.len(),
            });
        }
        for &s in rates.iter().chain(std::iter::once(&wlan_rate)) {
            if !(s > 0.0 && s.is_finite()) {
                return Err(ModelError::BadRate(s));
            }
        }
        for i in 1..regions.len() {
            if !nested_in(&regions[i], &regions[i - 1]) {
                return Err(ModelError::NotNested(i, i - 1));
            }
        }
        Ok(CellModel {
            regions,
            rates,
            wlan_rate,
        })
    }

    /// Concentric disks about the origin.
    pub fn concentric_disks(
        radii: &[f64],
        rates: &[f64],
        wlan_rate: f64,
    ) -> Result<Self, crate::Error> {
        let regions = radii
            .iter()
            .map(|&r| ConvexShape::disk(Point::ORIGIN, r))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CellModel::new(regions, rates.to_vec(), wlan_rate)?)
    }

    /// Radii 1000/500/200/100 m, rates 300/750/1500/2000 kbps, WLAN 10000 kbps.
    pub fn reference() -> Self {
        CellModel::concentric_disks(
            &[1000.0, 500.0, 200.0, 100.0],
            &[300.0, 750.0, 1500.0, 2000.0],
            10_000.0,
        )
        .expect("reference cell is valid")
    }

    pub fn regions(&self) -> &[ConvexShape] {
        &self.regions
    }

    pub fn outer(&self) -> &ConvexShape {
        &self.regions[0]
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn wlan_rate(&self) -> f64 {
        self.wlan_rate
    }

    pub fn with_wlan_rate(&self, wlan_rate: f64) -> Result<Self, ModelError> {
        CellModel::new(self.regions.clone(), self.rates.clone(), wlan_rate)
    }

    pub fn band_count(&self) -> usize {
        self.regions.len()
    }

    /// Index of the CQI band containing `x` (the innermost region holding
    /// it), or `None` outside the cell.
    pub fn band_of(&self, x: Point) -> Option<usize> {
        if !self.regions[0].contains(x) {
            return None;
        }
        let mut band = 0;
        for (i, r) in self.regions.iter().enumerate().skip(1) {
            if r.contains(x) {
                band = i;
            } else {
                break;
            }
        }
        Some(band)
    }
}

/// Boundary sampling check that `inner ⊆ outer`.
fn nested_in(inner: &ConvexShape, outer: &ConvexShape) -> bool {
    if !outer.contains(inner.center()) {
        return false;
    }
    inner.boundary_pieces().iter().all(|piece| {
        (0..=64).all(|k| outer.contains(piece.point_at(k as f64 / 64.0)))
    })
}

/// Relative additional intensities of the high and low density regions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rho {
    pub high: f64,
    pub low: f64,
}

impl Rho {
    pub const ZERO: Rho = Rho {
        high: 0.0,
        low: 0.0,
    };

    pub fn new(high: f64, low: f64) -> Result<Self, ModelError> {
        if high >= 0.0 && high.is_finite() && (0.0..=1.0).contains(&low) {
            Ok(Rho { high, low })
        } else {
            Err(ModelError::BadRho(high, low))
        }
    }
}

/// Scalar geometric inputs the closed forms consume.
///
/// `region_high[j] = |C_{j+1} ∩ Ω_H|` (zero-based), likewise for `Ω_L`. The
/// band quantities are differences of consecutive entries with
/// `C_{n+1} = ∅`.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapSummary {
    pub cell: Measures,
    pub region_areas: Vec<f64>,
    pub region_high: Vec<f64>,
    pub region_low: Vec<f64>,
    /// `l_{∂C ∈ Ω_H}`
    pub arc_high: f64,
    /// `l_{∂C ∈ Ω_L}`
    pub arc_low: f64,
}

impl OverlapSummary {
    /// No Ω regions at all.
    pub fn homogeneous(cell: &CellModel) -> Self {
        let n = cell.band_count();
        OverlapSummary {
            cell: cell.outer().measures(),
            region_areas: cell.regions().iter().map(ConvexShape::area).collect(),
            region_high: vec![0.0; n],
            region_low: vec![0.0; n],
            arc_high: 0.0,
            arc_low: 0.0,
        }
    }

    /// Measures every overlap from explicit Ω geometry.
    pub fn from_geometry(
        cell: &CellModel,
        omega_high: &[ConvexShape],
        omega_low: &[ConvexShape],
    ) -> Self {
        let overlap_with = |region: &ConvexShape, parts: &[ConvexShape]| -> f64 {
            parts.iter().map(|w| overlap_area(region, w)).sum()
        };
        let arc_in = |parts: &[ConvexShape]| -> f64 {
            parts.iter().map(|w| boundary_arc_in(cell.outer(), w)).sum()
        };
        OverlapSummary {
            cell: cell.outer().measures(),
            region_areas: cell.regions().iter().map(ConvexShape::area).collect(),
            region_high: cell
                .regions()
                .iter()
                .map(|r| overlap_with(r, omega_high))
                .collect(),
            region_low: cell
                .regions()
                .iter()
                .map(|r| overlap_with(r, omega_low))
                .collect(),
            arc_high: arc_in(omega_high),
            arc_low: arc_in(omega_low),
        }
    }

    /// Ω given only through `|C ∩ Ω|` as fractions of `|C|` and the arc
    /// lengths. Each CQI region gets the same fraction of its own area.
    pub fn from_fractions(
        cell: &CellModel,
        frac_high: f64,
        frac_low: f64,
        arc_high: f64,
        arc_low: f64,
    ) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&frac_high)
            || !(0.0..=1.0).contains(&frac_low)
            || frac_high + frac_low > 1.0
        {
            return Err(ModelError::BadSummary(format!(
                "fractions ({frac_high}, {frac_low}) must be in [0, 1] and sum to at most 1"
            )));
        }
        let perimeter = cell.outer().perimeter();
        if !(0.0..=perimeter).contains(&arc_high)
            || !(0.0..=perimeter).contains(&arc_low)
            || arc_high + arc_low > perimeter
        {
            return Err(ModelError::BadSummary(format!(
                "arcs ({arc_high}, {arc_low}) must fit on a perimeter of {perimeter}"
            )));
        }
        let areas: Vec<f64> = cell.regions().iter().map(ConvexShape::area).collect();
        Ok(OverlapSummary {
            cell: cell.outer().measures(),
            region_high: areas.iter().map(|a| a * frac_high).collect(),
            region_low: areas.iter().map(|a| a * frac_low).collect(),
            region_areas: areas,
            arc_high,
            arc_low,
        })
    }

    /// Arc length a disk-shaped `Ω` of area `A` would cut from the cell
    /// boundary in the reference layout: `2√(2A/π)`.
    pub fn reference_arc(area: f64) -> f64 {
        2.0 * (2.0 * area / std::f64::consts::PI).sqrt()
    }

    pub fn band_count(&self) -> usize {
        self.region_areas.len()
    }

    fn band(values: &[f64], j: usize) -> f64 {
        values[j] - values.get(j + 1).copied().unwrap_or(0.0)
    }

    /// `|C_j| − |C_{j+1}|`
    pub fn band_area(&self, j: usize) -> f64 {
        Self::band(&self.region_areas, j)
    }

    pub fn band_high(&self, j: usize) -> f64 {
        Self::band(&self.region_high, j)
    }

    pub fn band_low(&self, j: usize) -> f64 {
        Self::band(&self.region_low, j)
    }

    /// `|C ∩ Ω_H|`
    pub fn cell_high(&self) -> f64 {
        self.region_high[0]
    }

    pub fn cell_low(&self) -> f64 {
        self.region_low[0]
    }

    /// `|C| + ρ_H|C∩Ω_H| − ρ_L|C∩Ω_L|`, proportional to the expected AP
    /// count over C.
    pub fn weighted_cell_area(&self, rho: Rho) -> f64 {
        self.cell.area + rho.high * self.cell_high() - rho.low * self.cell_low()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.region_areas.len();
        if n == 0 || self.region_high.len() != n || self.region_low.len() != n {
            return Err(ModelError::BadSummary("per-region vectors differ in length".into()));
        }
        let tol = 1e-9 * self.cell.area;
        for j in 0..n {
            let (a, h, l) = (self.band_area(j), self.band_high(j), self.band_low(j));
            if a < -tol || h < -tol || l < -tol || h + l > a + tol {
                return Err(ModelError::BadSummary(format!(
                    "band {j}: area {a}, high {h}, low {l}"
                )));
            }
        }
        if self.arc_high < 0.0
            || self.arc_low < 0.0
            || self.arc_high + self.arc_low > self.cell.perimeter * (1.0 + 1e-9)
        {
            return Err(ModelError::BadSummary("arc lengths exceed the perimeter".into()));
        }
        Ok(())
    }
}
