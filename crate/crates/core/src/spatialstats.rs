//! Quadrat statistics for access-point locations: the index of dispersion,
//! cross-correlation between operators, and the sliding-window
//! classification of atoms into high, low and base density regions.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::geometry::{ConvexShape, Point};
use crate::pointprocess::M2_PER_KM2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("need at least 2 quadrats, got {0}")]
    TooFewQuadrats(usize),
    #[error("all counts are zero; the index of dispersion is undefined")]
    ZeroMean,
    #[error("series have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("a series has zero variance; the correlation is undefined")]
    ZeroVariance,
    #[error("window of {n0}x{n0} atoms does not fit a {nx}x{ny} grid")]
    WindowTooLarge { n0: usize, nx: usize, ny: usize },
    #[error("grid must have positive atom size and at least one atom")]
    EmptyGrid,
}

/// Result of the dispersion test on one set of quadrat counts.
#[derive(Clone, Debug, PartialEq)]
pub struct Dispersion {
    /// `(n−1)V/A`
    pub index: f64,
    /// Sample mean `A`.
    pub mean: f64,
    /// Sample variance `V` (divisor `n−1`).
    pub variance: f64,
    /// Two-sided 5% acceptance interval of `χ²(n−1)`.
    pub bounds: (f64, f64),
    /// The index falls outside `bounds`.
    pub reject: bool,
    /// The index as the exact fraction `numerator / denominator` of
    /// integers: `n Σx² − (Σx)²` over `Σx`.
    pub numerator: u128,
    pub denominator: u128,
}

/// Index of dispersion of quadrat counts, tested against `χ²(n−1)`.
pub fn index_of_dispersion(counts: &[u64]) -> Result<Dispersion, StatsError> {
    let n = counts.len();
    if n < 2 {
        return Err(StatsError::TooFewQuadrats(n));
    }
    let sum: u128 = counts.iter().map(|&c| c as u128).sum();
    if sum == 0 {
        return Err(StatsError::ZeroMean);
    }
    let sum_sq: u128 = counts.iter().map(|&c| (c as u128) * (c as u128)).sum();
    let numerator = n as u128 * sum_sq - sum * sum;
    let nf = n as f64;
    let mean = sum as f64 / nf;
    let variance = numerator as f64 / (nf * (nf - 1.0));
    let index = numerator as f64 / sum as f64;
    let chi = ChiSquared::new(nf - 1.0).expect("positive degrees of freedom");
    let bounds = (chi.inverse_cdf(0.025), chi.inverse_cdf(0.975));
    Ok(Dispersion {
        index,
        mean,
        variance,
        bounds,
        reject: index < bounds.0 || index > bounds.1,
        numerator,
        denominator: sum,
    })
}

/// `c(j,k) = Σ(a−Ā)(b−B̄) / ((n−1)√(V_a V_b))` with variances over `n−1`,
/// which is Pearson's correlation coefficient.
pub fn cross_correlation(a: &[u64], b: &[u64]) -> Result<f64, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(StatsError::TooFewQuadrats(n));
    }
    let nf = n as f64;
    let ma = a.iter().sum::<u64>() as f64 / nf;
    let mb = b.iter().sum::<u64>() as f64 / nf;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let dx = x as f64 - ma;
        let dy = y as f64 - mb;
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let va = saa / (nf - 1.0);
    let vb = sbb / (nf - 1.0);
    Ok((sab / ((nf - 1.0) * (va * vb).sqrt())).clamp(-1.0, 1.0))
}

/// Counts of points per square atom, row-major (`iy * nx + ix`).
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratGrid {
    pub origin: Point,
    pub atom_size: f64,
    pub nx: usize,
    pub ny: usize,
    pub counts: Vec<u64>,
}

impl QuadratGrid {
    pub fn new(
        origin: Point,
        atom_size: f64,
        nx: usize,
        ny: usize,
        counts: Vec<u64>,
    ) -> Result<Self, StatsError> {
        if !(atom_size > 0.0) || nx == 0 || ny == 0 || counts.len() != nx * ny {
            return Err(StatsError::EmptyGrid);
        }
        Ok(QuadratGrid {
            origin,
            atom_size,
            nx,
            ny,
            counts,
        })
    }

    /// Bins `points` into an `nx × ny` grid of atoms starting at `origin`.
    /// Points outside the grid are dropped.
    pub fn from_points(
        points: &[Point],
        origin: Point,
        atom_size: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self, StatsError> {
        let mut counts = vec![0u64; nx * ny];
        for p in points {
            let fx = ((p.x - origin.x) / atom_size).floor();
            let fy = ((p.y - origin.y) / atom_size).floor();
            if fx >= 0.0 && fy >= 0.0 && (fx as usize) < nx && (fy as usize) < ny {
                counts[fy as usize * nx + fx as usize] += 1;
            }
        }
        QuadratGrid::new(origin, atom_size, nx, ny, counts)
    }

    /// Smallest grid of whole atoms, anchored at the lower-left point,
    /// holding every point.
    pub fn covering(points: &[Point], atom_size: f64) -> Result<Self, StatsError> {
        if points.is_empty() || !(atom_size > 0.0) {
            return Err(StatsError::EmptyGrid);
        }
        let mut lo = points[0];
        let mut hi = points[0];
        for p in points {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let nx = ((hi.x - lo.x) / atom_size).floor() as usize + 1;
        let ny = ((hi.y - lo.y) / atom_size).floor() as usize + 1;
        QuadratGrid::from_points(points, lo, atom_size, nx, ny)
    }

    pub fn count(&self, ix: usize, iy: usize) -> u64 {
        self.counts[iy * self.nx + ix]
    }

    pub fn atom_area(&self) -> f64 {
        self.atom_size * self.atom_size
    }

    /// The square of atom `(ix, iy)`.
    pub fn atom_shape(&self, ix: usize, iy: usize) -> ConvexShape {
        let x0 = self.origin.x + ix as f64 * self.atom_size;
        let y0 = self.origin.y + iy as f64 * self.atom_size;
        ConvexShape::rectangle(x0, y0, x0 + self.atom_size, y0 + self.atom_size)
            .expect("positive atom size")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomClass {
    Base,
    High,
    Low,
}

impl AtomClass {
    pub fn label(self) -> &'static str {
        match self {
            AtomClass::Base => "0",
            AtomClass::High => "H",
            AtomClass::Low => "L",
        }
    }
}

/// Atom classes and the intensities fitted to them (points/km²).
#[derive(Clone, Debug, PartialEq)]
pub struct RegionPartition {
    pub nx: usize,
    pub ny: usize,
    pub classes: Vec<AtomClass>,
    pub lambda0: f64,
    pub lambda_high: f64,
    pub lambda_low: f64,
    /// Window-count thresholds `(a_L, a_U)`.
    pub thresholds: (f64, f64),
}

impl RegionPartition {
    pub fn class(&self, ix: usize, iy: usize) -> AtomClass {
        self.classes[iy * self.nx + ix]
    }

    pub fn atoms(&self, class: AtomClass) -> Vec<(usize, usize)> {
        (0..self.classes.len())
            .filter(|&i| self.classes[i] == class)
            .map(|i| (i % self.nx, i / self.nx))
            .collect()
    }
}

/// Slides an `n0 × n0` window one atom at a time over the grid. A window
/// whose count exceeds `a_U = a0 n0² + 3√a0 n0` flags all its atoms as high,
/// one below `a_L = a0 n0² − 3√a0 n0` flags them as low (`a0` is the mean
/// count per atom). Windows that do not fit are skipped. An atom is
/// assigned a class when flagged for it more than `n0²/2` times.
pub fn identify_regions(grid: &QuadratGrid, n0: usize) -> Result<RegionPartition, StatsError> {
    let (nx, ny) = (grid.nx, grid.ny);
    if n0 == 0 || n0 > nx || n0 > ny {
        return Err(StatsError::WindowTooLarge { n0, nx, ny });
    }
    let total: u64 = grid.counts.iter().sum();
    let a0 = total as f64 / (nx * ny) as f64;
    let n0f = n0 as f64;
    let upper = a0 * n0f * n0f + 3.0 * a0.sqrt() * n0f;
    let lower = a0 * n0f * n0f - 3.0 * a0.sqrt() * n0f;

    // summed-area table of counts
    let mut prefix = vec![0u64; (nx + 1) * (ny + 1)];
    for iy in 0..ny {
        for ix in 0..nx {
            prefix[(iy + 1) * (nx + 1) + ix + 1] = grid.count(ix, iy)
                + prefix[iy * (nx + 1) + ix + 1]
                + prefix[(iy + 1) * (nx + 1) + ix]
                - prefix[iy * (nx + 1) + ix];
        }
    }
    let window_sum = |x: usize, y: usize| -> u64 {
        let s = |ix: usize, iy: usize| prefix[iy * (nx + 1) + ix];
        s(x + n0, y + n0) + s(x, y) - s(x + n0, y) - s(x, y + n0)
    };

    // flag counts accumulated through 2-D difference arrays
    let mut high = vec![0i64; (nx + 1) * (ny + 1)];
    let mut low = vec![0i64; (nx + 1) * (ny + 1)];
    let mark = |d: &mut Vec<i64>, x: usize, y: usize| {
        d[y * (nx + 1) + x] += 1;
        d[y * (nx + 1) + x + n0] -= 1;
        d[(y + n0) * (nx + 1) + x] -= 1;
        d[(y + n0) * (nx + 1) + x + n0] += 1;
    };
    for y in 0..=ny - n0 {
        for x in 0..=nx - n0 {
            let c = window_sum(x, y) as f64;
            if c > upper {
                mark(&mut high, x, y);
            } else if c < lower {
                mark(&mut low, x, y);
            }
        }
    }
    let integrate = |d: &mut Vec<i64>| {
        for y in 0..=ny {
            for x in 0..=nx {
                let i = y * (nx + 1) + x;
                let left = if x > 0 { d[i - 1] } else { 0 };
                let up = if y > 0 { d[i - (nx + 1)] } else { 0 };
                let diag = if x > 0 && y > 0 { d[i - (nx + 1) - 1] } else { 0 };
                d[i] += left + up - diag;
            }
        }
    };
    integrate(&mut high);
    integrate(&mut low);

    let half = (n0 * n0) as i64;
    let mut classes = vec![AtomClass::Base; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let i = iy * (nx + 1) + ix;
            // strictly more than n0²/2 flags
            classes[iy * nx + ix] = if 2 * high[i] > half {
                AtomClass::High
            } else if 2 * low[i] > half {
                AtomClass::Low
            } else {
                AtomClass::Base
            };
        }
    }

    let per_km2 = M2_PER_KM2 / grid.atom_area();
    let density = |class: AtomClass| -> Option<f64> {
        let (n, c) = classes
            .iter()
            .zip(&grid.counts)
            .filter(|(k, _)| **k == class)
            .fold((0u64, 0u64), |(n, c), (_, &x)| (n + 1, c + x));
        (n > 0).then(|| c as f64 / n as f64 * per_km2)
    };
    let lambda0 = density(AtomClass::Base).unwrap_or(a0 * per_km2);
    Ok(RegionPartition {
        nx,
        ny,
        lambda_high: density(AtomClass::High).unwrap_or(lambda0),
        lambda_low: density(AtomClass::Low).unwrap_or(lambda0),
        lambda0,
        classes,
        thresholds: (lower, upper),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dispersion_examples() {
        let d = index_of_dispersion(&[1, 3]).unwrap();
        assert_eq!(d.mean, 2.0);
        assert_eq!(d.variance, 2.0);
        assert_eq!(d.index, 1.0);
        let flat = index_of_dispersion(&[4; 50]).unwrap();
        assert_eq!(flat.index, 0.0);
        assert!(flat.reject);
        assert_eq!(index_of_dispersion(&[0, 0, 0]), Err(StatsError::ZeroMean));
        assert!(index_of_dispersion(&[3]).is_err());
    }

    #[test]
    fn dispersion_bounds_for_one_degree_of_freedom() {
        let d = index_of_dispersion(&[1, 3]).unwrap();
        assert_relative_eq!(d.bounds.0, 0.000982069, max_relative = 1e-5);
        assert_relative_eq!(d.bounds.1, 5.023886, max_relative = 1e-6);
    }

    #[test]
    fn correlation_examples() {
        let a = [1, 5, 2, 8, 3, 0, 7];
        assert_relative_eq!(cross_correlation(&a, &a).unwrap(), 1.0, max_relative = 1e-15);
        let mirror: Vec<u64> = a.iter().map(|x| 10 - x).collect();
        assert_relative_eq!(cross_correlation(&a, &mirror).unwrap(), -1.0, max_relative = 1e-15);
        assert_eq!(cross_correlation(&a, &[2; 7]), Err(StatsError::ZeroVariance));
        assert!(cross_correlation(&a, &[1, 2]).is_err());
    }

    #[test]
    fn uniform_counts_leave_everything_base() {
        let grid = QuadratGrid::new(Point::ORIGIN, 100.0, 12, 9, vec![5; 108]).unwrap();
        let part = identify_regions(&grid, 3).unwrap();
        assert!(part.classes.iter().all(|c| *c == AtomClass::Base));
        assert_relative_eq!(part.lambda0, 500.0, max_relative = 1e-12);
    }

    #[test]
    fn dense_block_is_high() {
        let (nx, ny) = (20, 20);
        let mut counts = vec![1u64; nx * ny];
        for iy in 8..11 {
            for ix in 5..8 {
                counts[iy * nx + ix] = 100;
            }
        }
        let grid = QuadratGrid::new(Point::ORIGIN, 100.0, nx, ny, counts.clone()).unwrap();
        let part = identify_regions(&grid, 3).unwrap();
        // oracle: count, for each atom, the windows over the threshold directly
        let a0 = counts.iter().sum::<u64>() as f64 / 400.0;
        let upper = 9.0 * a0 + 9.0 * a0.sqrt();
        for iy in 0..ny {
            for ix in 0..nx {
                let mut flags = 0;
                for y in iy.saturating_sub(2)..=iy.min(ny - 3) {
                    for x in ix.saturating_sub(2)..=ix.min(nx - 3) {
                        let s: u64 = (y..y + 3)
                            .flat_map(|yy| (x..x + 3).map(move |xx| (xx, yy)))
                            .map(|(xx, yy)| counts[yy * nx + xx])
                            .sum();
                        if s as f64 > upper {
                            flags += 1;
                        }
                    }
                }
                let expect_high = 2 * flags > 9;
                assert_eq!(part.class(ix, iy) == AtomClass::High, expect_high, "atom {ix},{iy}");
            }
        }
        for iy in 8..11 {
            for ix in 5..8 {
                assert_eq!(part.class(ix, iy), AtomClass::High);
            }
        }
    }

    #[test]
    fn window_must_fit() {
        let grid = QuadratGrid::new(Point::ORIGIN, 100.0, 2, 5, vec![1; 10]).unwrap();
        assert!(matches!(
            identify_regions(&grid, 3),
            Err(StatsError::WindowTooLarge { .. })
        ));
    }

    #[test]
    fn binning() {
        let pts = [Point::new(5.0, 5.0), Point::new(150.0, 20.0), Point::new(199.9, 99.9), Point::new(-1.0, 0.0)];
        let g = QuadratGrid::from_points(&pts, Point::ORIGIN, 100.0, 2, 1).unwrap();
        assert_eq!(g.counts, vec![1, 2]);
        let c = QuadratGrid::covering(&pts, 100.0).unwrap();
        assert_eq!(c.counts.iter().sum::<u64>(), 4);
    }
}
