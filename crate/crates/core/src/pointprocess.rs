//! Three-level inhomogeneous Poisson process of access-point locations.
//!
//! Intensities are stored in points/km², the unit they are usually quoted
//! in; positions are in meters.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

use crate::formulas::Rho;
use crate::geometry::{intersects, overlap_area, ConvexShape, Point};

pub const M2_PER_KM2: f64 = 1e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntensityError {
    #[error("intensities must be finite and non-negative, got ({0}, {1}, {2})")]
    Negative(f64, f64, f64),
    #[error("intensities must satisfy lambda_l <= lambda0 <= lambda_h, got ({low}, {base}, {high})")]
    Order { low: f64, base: f64, high: f64 },
    #[error("high and low density regions overlap")]
    RegionsOverlap,
    #[error("relative intensities are undefined when lambda0 = 0")]
    ZeroBase,
    #[error("no positive intensity to sample from")]
    NothingToSample,
}

/// `λ(x) = λ_H` on `Ω_H`, `λ_L` on `Ω_L`, `λ_0` elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct IntensityModel {
    lambda0: f64,
    lambda_high: f64,
    lambda_low: f64,
    omega_high: Vec<ConvexShape>,
    omega_low: Vec<ConvexShape>,
}

impl IntensityModel {
    /// Intensities in points/km². The parts of `Ω_H` and `Ω_L` must be
    /// pairwise disjoint.
    pub fn new(
        lambda0: f64,
        lambda_high: f64,
        lambda_low: f64,
        omega_high: Vec<ConvexShape>,
        omega_low: Vec<ConvexShape>,
    ) -> Result<Self, IntensityError> {
        let ok = |x: f64| x >= 0.0 && x.is_finite();
        if !(ok(lambda0) && ok(lambda_high) && ok(lambda_low)) {
            return Err(IntensityError::Negative(lambda0, lambda_high, lambda_low));
        }
        if !(lambda_low <= lambda0 && lambda0 <= lambda_high) {
            return Err(IntensityError::Order {
                low: lambda_low,
                base: lambda0,
                high: lambda_high,
            });
        }
        let parts: Vec<&ConvexShape> = omega_high.iter().chain(&omega_low).collect();
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                let tol = 1e-9 * parts[i].area().min(parts[j].area());
                if overlap_area(parts[i], parts[j]) > tol {
                    return Err(IntensityError::RegionsOverlap);
                }
            }
        }
        Ok(IntensityModel {
            lambda0,
            lambda_high,
            lambda_low,
            omega_high,
            omega_low,
        })
    }

    pub fn homogeneous(lambda: f64) -> Result<Self, IntensityError> {
        IntensityModel::new(lambda, lambda, lambda, Vec::new(), Vec::new())
    }

    /// Builds `λ_H = λ_0(1+ρ_H)` and `λ_L = λ_0(1−ρ_L)`.
    pub fn from_rho(
        lambda0: f64,
        rho: Rho,
        omega_high: Vec<ConvexShape>,
        omega_low: Vec<ConvexShape>,
    ) -> Result<Self, IntensityError> {
        IntensityModel::new(
            lambda0,
            lambda0 * (1.0 + rho.high),
            lambda0 * (1.0 - rho.low),
            omega_high,
            omega_low,
        )
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn lambda_high(&self) -> f64 {
        self.lambda_high
    }

    pub fn lambda_low(&self) -> f64 {
        self.lambda_low
    }

    pub fn omega_high(&self) -> &[ConvexShape] {
        &self.omega_high
    }

    pub fn omega_low(&self) -> &[ConvexShape] {
        &self.omega_low
    }

    /// `λ(x)` in points/km².
    pub fn intensity_at(&self, x: Point) -> f64 {
        if self.omega_high.iter().any(|w| w.contains(x)) {
            self.lambda_high
        } else if self.omega_low.iter().any(|w| w.contains(x)) {
            self.lambda_low
        } else {
            self.lambda0
        }
    }

    /// Largest value `λ(x)` can take.
    pub fn max_intensity(&self) -> f64 {
        let mut m = self.lambda0;
        if !self.omega_high.is_empty() {
            m = m.max(self.lambda_high);
        }
        if !self.omega_low.is_empty() {
            m = m.max(self.lambda_low);
        }
        m
    }

    /// `ρ_H = (λ_H − λ_0)/λ_0`, `ρ_L = (λ_0 − λ_L)/λ_0`.
    pub fn rho(&self) -> Result<Rho, IntensityError> {
        if self.lambda0 <= 0.0 {
            return Err(IntensityError::ZeroBase);
        }
        Ok(Rho {
            high: (self.lambda_high - self.lambda0) / self.lambda0,
            low: (self.lambda0 - self.lambda_low) / self.lambda0,
        })
    }

    /// `(|A∩Ω_H|, |A∩Ω_L|)`
    pub fn overlaps(&self, region: &ConvexShape) -> (f64, f64) {
        let sum = |parts: &[ConvexShape]| parts.iter().map(|w| overlap_area(region, w)).sum();
        (sum(&self.omega_high), sum(&self.omega_low))
    }

    /// `∫_A λ(x) dx` in points (area in m², λ in points/km²).
    pub fn expected_count(&self, region: &ConvexShape) -> f64 {
        let (h, l) = self.overlaps(region);
        let rest = region.area() - h - l;
        (self.lambda0 * rest + self.lambda_high * h + self.lambda_low * l) / M2_PER_KM2
    }

    /// `λ_C`: mean intensity over `cell`, points/km².
    pub fn mean_intensity(&self, cell: &ConvexShape) -> f64 {
        self.expected_count(cell) * M2_PER_KM2 / cell.area()
    }

    /// `ρ_0 = λ_0 / λ_C`
    pub fn rho0(&self, cell: &ConvexShape) -> f64 {
        self.lambda0 / self.mean_intensity(cell)
    }
}

/// One access point: reference position, orientation and placed coverage set.
#[derive(Clone, Debug, PartialEq)]
pub struct AccessPoint {
    pub position: Point,
    pub orientation: f64,
    pub coverage: ConvexShape,
}

impl AccessPoint {
    /// Places `template` with its reference point at `position`, rotated
    /// by `orientation`.
    pub fn place(template: &ConvexShape, position: Point, orientation: f64) -> Self {
        AccessPoint {
            position,
            orientation,
            coverage: template.placed(position, orientation),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Deployment {
    pub aps: Vec<AccessPoint>,
    pub window: ConvexShape,
}

impl Deployment {
    pub fn empty(window: ConvexShape) -> Self {
        Deployment {
            aps: Vec::new(),
            window,
        }
    }

    pub fn len(&self) -> usize {
        self.aps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aps.is_empty()
    }

    /// The APs whose coverage meets `cell`.
    pub fn meeting(&self, cell: &ConvexShape) -> Deployment {
        Deployment {
            aps: self
                .aps
                .iter()
                .filter(|ap| intersects(&ap.coverage, cell))
                .cloned()
                .collect(),
            window: self.window.clone(),
        }
    }

    pub fn coverages(&self) -> Vec<ConvexShape> {
        self.aps.iter().map(|ap| ap.coverage.clone()).collect()
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as usize).unwrap_or(0)
}

/// Uniform point in `a ∩ b`, sampling from whichever is smaller.
fn sample_in_both<R: Rng + ?Sized>(a: &ConvexShape, b: &ConvexShape, rng: &mut R) -> Point {
    let (from, check) = if a.area() <= b.area() { (a, b) } else { (b, a) };
    loop {
        let p = from.sample_uniform(rng);
        if check.contains(p) {
            return p;
        }
    }
}

/// A realization of the process on `window` with `template` placed at
/// every point with an independent uniform orientation.
///
/// Counts are drawn independently for each part of `Ω_H`, each part of
/// `Ω_L` and the remainder of the window; positions are uniform within
/// each piece.
pub fn sample_deployment_with<R: Rng + ?Sized>(
    model: &IntensityModel,
    window: &ConvexShape,
    template: &ConvexShape,
    rng: &mut R,
) -> Deployment {
    let mut positions = Vec::new();
    let mut omega_area = 0.0;
    for (parts, lambda) in [
        (&model.omega_high, model.lambda_high),
        (&model.omega_low, model.lambda_low),
    ] {
        for part in parts {
            let area = overlap_area(part, window);
            omega_area += area;
            let n = poisson_count(lambda * area / M2_PER_KM2, rng);
            for _ in 0..n {
                positions.push(sample_in_both(part, window, rng));
            }
        }
    }
    let rest = (window.area() - omega_area).max(0.0);
    let n = poisson_count(model.lambda0 * rest / M2_PER_KM2, rng);
    let in_omega = |p: Point| {
        model.omega_high.iter().any(|w| w.contains(p))
            || model.omega_low.iter().any(|w| w.contains(p))
    };
    for _ in 0..n {
        loop {
            let p = window.sample_uniform(rng);
            if !in_omega(p) {
                positions.push(p);
                break;
            }
        }
    }
    let aps = positions
        .into_iter()
        .map(|p| AccessPoint::place(template, p, rng.random::<f64>() * TAU))
        .collect();
    Deployment {
        aps,
        window: window.clone(),
    }
}

pub fn sample_deployment(
    model: &IntensityModel,
    window: &ConvexShape,
    template: &ConvexShape,
    seed: u64,
) -> Deployment {
    sample_deployment_with(model, window, template, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Disk about `cell` large enough that every placement of `template`
/// meeting the cell has its reference point inside.
pub fn placement_halo(cell: &ConvexShape, template: &ConvexShape) -> ConvexShape {
    ConvexShape::disk(cell.center(), cell.bounding_radius() + template.bounding_radius())
        .expect("positive halo radius")
}

/// Exactly `l` APs, each independently drawn from the intensity restricted
/// to placements whose coverage meets `cell`.
///
/// Rejection sampling: a uniform position in the halo and a uniform
/// orientation are thinned by `λ(w)/max λ` and kept if the placed coverage
/// meets the cell.
pub fn conditioned_deployment_with<R: Rng + ?Sized>(
    model: &IntensityModel,
    cell: &ConvexShape,
    l: usize,
    template: &ConvexShape,
    rng: &mut R,
) -> Result<Deployment, IntensityError> {
    let halo = placement_halo(cell, template);
    if l == 0 {
        return Ok(Deployment::empty(halo));
    }
    let lmax = model.max_intensity();
    if lmax <= 0.0 {
        return Err(IntensityError::NothingToSample);
    }
    let mut aps = Vec::with_capacity(l);
    while aps.len() < l {
        let w = halo.sample_uniform(rng);
        let gamma = rng.random::<f64>() * TAU;
        let keep = rng.random::<f64>() * lmax;
        if keep >= model.intensity_at(w) {
            continue;
        }
        let ap = AccessPoint::place(template, w, gamma);
        if intersects(&ap.coverage, cell) {
            aps.push(ap);
        }
    }
    Ok(Deployment { aps, window: halo })
}

pub fn conditioned_deployment(
    model: &IntensityModel,
    cell: &ConvexShape,
    l: usize,
    template: &ConvexShape,
    seed: u64,
) -> Result<Deployment, IntensityError> {
    conditioned_deployment_with(model, cell, l, template, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A disk centered where the ray from the cell center at `angle` leaves
/// the cell, sized so it covers `fraction` of the cell's area. Used to put
/// `Ω_H` and `Ω_L` on the cell edge in synthetic scenarios.
pub fn edge_disk(cell: &ConvexShape, angle: f64, fraction: f64) -> Option<ConvexShape> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return None;
    }
    let c = cell.center();
    let dir = Point::unit(angle);
    let (mut lo, mut hi) = (0.0, 2.0 * cell.bounding_radius());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cell.contains(c + dir * mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let at = c + dir * lo;
    let target = fraction * cell.area();
    let (mut lo, mut hi) = (0.0, 4.0 * cell.bounding_radius());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let d = ConvexShape::disk(at, mid.max(f64::MIN_POSITIVE)).ok()?;
        if overlap_area(cell, &d) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ConvexShape::disk(at, 0.5 * (lo + hi)).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn disk(x: f64, y: f64, r: f64) -> ConvexShape {
        ConvexShape::disk(Point::new(x, y), r).unwrap()
    }

    #[test]
    fn intensity_levels() {
        let m = IntensityModel::new(
            20.0,
            80.0,
            0.0,
            vec![disk(500.0, 0.0, 100.0)],
            vec![disk(-500.0, 0.0, 100.0)],
        )
        .unwrap();
        assert_eq!(m.intensity_at(Point::new(500.0, 50.0)), 80.0);
        assert_eq!(m.intensity_at(Point::new(-500.0, 50.0)), 0.0);
        assert_eq!(m.intensity_at(Point::ORIGIN), 20.0);
        let rho = m.rho().unwrap();
        assert_eq!(rho.high, 3.0);
        assert_eq!(rho.low, 1.0);
    }

    #[test]
    fn validation() {
        assert!(IntensityModel::new(-1.0, 1.0, 0.0, vec![], vec![]).is_err());
        assert!(IntensityModel::new(5.0, 4.0, 0.0, vec![], vec![]).is_err());
        assert!(matches!(
            IntensityModel::new(1.0, 2.0, 0.5, vec![disk(0.0, 0.0, 10.0)], vec![disk(5.0, 0.0, 10.0)]),
            Err(IntensityError::RegionsOverlap)
        ));
        assert!(IntensityModel::homogeneous(0.0).unwrap().rho().is_err());
    }

    #[test]
    fn rho_identities() {
        let cell = disk(0.0, 0.0, 1000.0);
        let m = IntensityModel::new(
            23.87,
            61.3,
            7.1,
            vec![disk(900.0, 0.0, 300.0)],
            vec![disk(-900.0, 0.0, 250.0)],
        )
        .unwrap();
        let rho = m.rho().unwrap();
        assert_relative_eq!(m.lambda0() * (1.0 + rho.high), m.lambda_high(), max_relative = 1e-12);
        assert_relative_eq!(m.lambda0() * (1.0 - rho.low), m.lambda_low(), max_relative = 1e-12);
        let (h, l) = m.overlaps(&cell);
        let c = cell.area();
        let lc = (m.lambda0() * (c - h - l) + m.lambda_high() * h + m.lambda_low() * l) / c;
        assert_relative_eq!(m.mean_intensity(&cell), lc, max_relative = 1e-12);
        assert_relative_eq!(m.rho0(&cell), m.lambda0() / lc, max_relative = 1e-12);
        // λ_C|C| = λ_0(|C| + ρ_H H − ρ_L L)
        assert_relative_eq!(
            lc * c,
            m.lambda0() * (c + rho.high * h - rho.low * l),
            max_relative = 1e-12
        );
    }

    #[test]
    fn seed_determinism() {
        let m = IntensityModel::new(30.0, 90.0, 10.0, vec![disk(300.0, 0.0, 200.0)], vec![]).unwrap();
        let w = disk(0.0, 0.0, 1000.0);
        let t = ConvexShape::stadium(Point::ORIGIN, 50.0, 20.0, 0.0).unwrap();
        assert_eq!(sample_deployment(&m, &w, &t, 42), sample_deployment(&m, &w, &t, 42));
        assert_ne!(sample_deployment(&m, &w, &t, 42), sample_deployment(&m, &w, &t, 43));
        assert_eq!(
            conditioned_deployment(&m, &w, 20, &t, 5).unwrap(),
            conditioned_deployment(&m, &w, 20, &t, 5).unwrap()
        );
    }

    #[test]
    fn conditioned_empty_and_support() {
        let m = IntensityModel::homogeneous(10.0).unwrap();
        let cell = disk(0.0, 0.0, 1000.0);
        let d = disk(0.0, 0.0, 50.0);
        assert!(conditioned_deployment(&m, &cell, 0, &d, 1).unwrap().is_empty());
        let dep = conditioned_deployment(&m, &cell, 20_000, &d, 2).unwrap();
        assert!(dep.aps.iter().all(|ap| ap.position.norm() <= 1050.0 + 1e-9));
        // uniform on the disk of radius R + r: P(|w| ≤ R) = R²/(R+r)²
        let inside = dep.aps.iter().filter(|ap| ap.position.norm() <= 1000.0).count() as f64;
        let p = (1000.0f64 / 1050.0).powi(2);
        let n = dep.len() as f64;
        assert!((inside / n - p).abs() < 4.0 * (p * (1.0 - p) / n).sqrt());
    }

    #[test]
    fn edge_disk_covers_requested_fraction() {
        let cell = disk(0.0, 0.0, 1000.0);
        let w = edge_disk(&cell, 0.0, 0.3).unwrap();
        assert_relative_eq!(w.center().x, 1000.0, max_relative = 1e-9);
        assert_relative_eq!(overlap_area(&cell, &w), 0.3 * cell.area(), max_relative = 1e-9);
        assert!(edge_disk(&cell, 0.0, 1.0).is_none());
    }
}
