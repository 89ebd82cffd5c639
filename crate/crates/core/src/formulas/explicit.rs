//! Term-by-term evaluation of the alternating sums over the number of
//! overlapping coverage sets.
//!
//! The main formulas collapse these sums into products. This module keeps
//! the uncollapsed form: elementary symmetric polynomials of the per-AP
//! weights, each multiplied by `g_2(·, m)` and summed with alternating
//! signs. It is O(l²) and loses precision through cancellation for large
//! `l`, so it only serves as a cross-check.

use std::f64::consts::{PI, TAU};

use super::coverage::elementary_symmetric;
use super::kinematic::{g1, g2, g4, kinematic_measure};
use super::{CellModel, Mode, OverlapSummary, Rho};
use crate::geometry::Measures;

fn sign(m: usize) -> f64 {
    if m.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Effective ρ: homogeneous mode ignores Ω.
fn effective_rho(rho: Rho, mode: Mode) -> Rho {
    match mode {
        Mode::Inhomogeneous => rho,
        _ => Rho::ZERO,
    }
}

/// Per-AP weights `u_i = 2π|D_i| / g_1(C, D_i)` (or `/ f(C, D_i)`).
pub fn weights(ov: &OverlapSummary, rho: Rho, aps: &[Measures], mode: Mode) -> Vec<f64> {
    match mode {
        Mode::Baseline => Vec::new(),
        Mode::Homogeneous => aps
            .iter()
            .map(|d| TAU * d.area / kinematic_measure(ov.cell, *d))
            .collect(),
        Mode::Inhomogeneous => aps.iter().map(|d| TAU * d.area / g1(*d, ov, rho)).collect(),
    }
}

/// `p_j = Σ_{m=1}^{l} (−1)^{m−1} e_m(u) g_2(band_j, m) / |C|`
pub fn p_j(ov: &OverlapSummary, rho: Rho, aps: &[Measures], mode: Mode) -> Vec<f64> {
    let e = elementary_symmetric(&weights(ov, rho, aps, mode));
    let rho = effective_rho(rho, mode);
    (0..ov.band_count())
        .map(|j| {
            let sum: f64 = (1..e.len())
                .map(|m| {
                    -sign(m)
                        * e[m]
                        * g2(ov.band_area(j), ov.band_high(j), ov.band_low(j), m as u32, rho)
                })
                .sum();
            sum / ov.cell.area
        })
        .collect()
}

/// `T_d = (π/L(C)) Σ_{m=0}^{l} (−1)^{m+1} {s_w g_2(C, m) 1(m>0) − Σ_i s_i g_2(band_i, m)} e_m`
pub fn mean_total_throughput(
    cell: &CellModel,
    ov: &OverlapSummary,
    rho: Rho,
    aps: &[Measures],
    mode: Mode,
) -> f64 {
    let e = elementary_symmetric(&weights(ov, rho, aps, mode));
    let rho = effective_rho(rho, mode);
    let m_u32 = |m: usize| m as u32;
    let sum: f64 = (0..e.len())
        .map(|m| {
            let wlan = if m > 0 {
                cell.wlan_rate()
                    * g2(ov.cell.area, ov.cell_high(), ov.cell_low(), m_u32(m), rho)
            } else {
                0.0
            };
            let cellular: f64 = (0..ov.band_count())
                .map(|i| {
                    cell.rates()[i]
                        * g2(ov.band_area(i), ov.band_high(i), ov.band_low(i), m_u32(m), rho)
                })
                .sum();
            -sign(m) * (wlan - cellular) * e[m]
        })
        .sum();
    PI / ov.cell.perimeter * sum
}

/// `N_h` with each leave-one-out product `Π_{j≠i}(1 − v_j)` expanded as
/// `Σ_m (−1)^m e_m(v without i)`.
pub fn mean_handovers(ov: &OverlapSummary, rho: Rho, aps: &[Measures], mode: Mode) -> f64 {
    if mode == Mode::Baseline || aps.is_empty() {
        return 0.0;
    }
    let rho = effective_rho(rho, mode);
    let denominators: Vec<f64> = aps
        .iter()
        .map(|d| match mode {
            Mode::Homogeneous => kinematic_measure(ov.cell, *d),
            _ => g1(*d, ov, rho),
        })
        .collect();
    let scale = if mode == Mode::Homogeneous { 1.0 } else { g4(ov, rho) };
    let v: Vec<f64> = aps
        .iter()
        .zip(&denominators)
        .map(|(d, g)| TAU * d.area * scale / g)
        .collect();
    let mut sum = 0.0;
    for i in 0..aps.len() {
        let others: Vec<f64> = v
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, x)| *x)
            .collect();
        let e = elementary_symmetric(&others);
        let uncovered: f64 = e.iter().enumerate().map(|(m, em)| sign(m) * em).sum();
        sum += aps[i].perimeter / denominators[i] * uncovered;
    }
    let area = if mode == Mode::Homogeneous {
        ov.cell.area
    } else {
        ov.weighted_cell_area(rho)
    };
    2.0 * TAU * area / ov.cell.perimeter * sum
}
