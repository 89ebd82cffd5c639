use std::f64::consts::TAU;

use super::{OverlapSummary, Rho};
use crate::geometry::Measures;

/// Measure of the rigid placements of `k1` that meet `k0`:
/// `2π(|K0| + |K1|) + L(K0)L(K1)`. With `k0` a point this is `2π|K1|`.
pub fn kinematic_measure(k0: Measures, k1: Measures) -> f64 {
    TAU * (k0.area + k1.area) + k0.perimeter * k1.perimeter
}

/// Measure of the placements of `k1` contained in `k0`:
/// `2π(|K0| + |K1|) − L(K0)L(K1)`.
///
/// Zero when `k1` is larger than `k0` in area or perimeter, since a convex
/// set cannot fit inside one with smaller area or perimeter. For disks
/// that is exactly the fit condition.
pub fn containment_measure(k1: Measures, k0: Measures) -> f64 {
    if k1.area > k0.area || k1.perimeter > k0.perimeter {
        return 0.0;
    }
    (TAU * (k0.area + k1.area) - k0.perimeter * k1.perimeter).max(0.0)
}

/// `r̂(K) = L(K) / 2π`
pub fn equivalent_radius(k: Measures) -> f64 {
    k.perimeter / TAU
}

/// `|K0 ∩ Ω| + r̂(K1)·l_{∂K0 ∈ Ω}`: the Ω-weighted part of the placement
/// measure of `K1` meeting `K0`.
pub fn eq_first(overlap: f64, rhat: f64, arc: f64) -> f64 {
    overlap + rhat * arc
}

/// `|K0 ∩ Ω| − r̂(K1)·l_{∂K0 ∈ Ω}`: the containment counterpart.
pub fn eq_second(overlap: f64, rhat: f64, arc: f64) -> f64 {
    overlap - rhat * arc
}

/// `f(C, D) + 2π(ρ_H(|C∩Ω_H| + r̂ l_H) − ρ_L(|C∩Ω_L| + r̂ l_L))`
pub fn g1(d: Measures, ov: &OverlapSummary, rho: Rho) -> f64 {
    let rhat = equivalent_radius(d);
    kinematic_measure(ov.cell, d)
        + TAU
            * (rho.high * eq_first(ov.cell_high(), rhat, ov.arc_high)
                - rho.low * eq_first(ov.cell_low(), rhat, ov.arc_low))
}

/// `|X| + |X∩Ω_H|((1+ρ_H)^k − 1) + |X∩Ω_L|((1−ρ_L)^k − 1)` for a set `X`
/// given by its area and its Ω overlaps.
pub fn g2(area: f64, high: f64, low: f64, k: u32, rho: Rho) -> f64 {
    let k = k.min(i32::MAX as u32) as i32;
    area + high * ((1.0 + rho.high).powi(k) - 1.0) + low * ((1.0 - rho.low).powi(k) - 1.0)
}

/// `L(D)(2π(|D| + |C|) − L(D)L(C) + 2πρ_H(|C∩Ω_H| − r̂ l_H) − 2πρ_L(|C∩Ω_L| − r̂ l_L))`
pub fn g3(d: Measures, ov: &OverlapSummary, rho: Rho) -> f64 {
    let rhat = equivalent_radius(d);
    d.perimeter
        * (TAU * (d.area + ov.cell.area) - d.perimeter * ov.cell.perimeter
            + TAU * rho.high * eq_second(ov.cell_high(), rhat, ov.arc_high)
            - TAU * rho.low * eq_second(ov.cell_low(), rhat, ov.arc_low))
}

/// `1 + (ρ_H λ_H |C∩Ω_H| − ρ_L λ_L |C∩Ω_L|) / (λ_C |C|)`.
///
/// With `λ_H = λ_0(1+ρ_H)`, `λ_L = λ_0(1−ρ_L)` and
/// `λ_C|C| = λ_0(|C| + ρ_H|C∩Ω_H| − ρ_L|C∩Ω_L|)` the base intensity cancels,
/// so only the ratios are needed.
pub fn g4(ov: &OverlapSummary, rho: Rho) -> f64 {
    1.0 + (rho.high * (1.0 + rho.high) * ov.cell_high()
        - rho.low * (1.0 - rho.low) * ov.cell_low())
        / ov.weighted_cell_area(rho)
}
