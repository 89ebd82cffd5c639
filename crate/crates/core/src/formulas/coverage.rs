use super::{OverlapSummary, Rho};

/// Above this many factors, products `Π(1 − c·u_i)` are accumulated as
/// sums of `log1p` terms.
pub const LOG_PRODUCT_THRESHOLD: usize = 50;

/// `Π(1 − c·u_i)`.
///
/// Uses a log-space sum for long products unless some factor is not
/// positive, in which case the plain product is exact enough and the
/// logarithm would be undefined.
pub fn product_one_minus(u: &[f64], c: f64) -> f64 {
    if u.len() > LOG_PRODUCT_THRESHOLD && u.iter().all(|&x| c * x < 1.0) {
        u.iter().map(|&x| (-(c * x)).ln_1p()).sum::<f64>().exp()
    } else {
        u.iter().fold(1.0, |acc, &x| acc * (1.0 - c * x))
    }
}

/// `Π_{j≠i}(1 − v_j)` for every `i`, via prefix and suffix products.
pub(crate) fn leave_one_out_products(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    if n > LOG_PRODUCT_THRESHOLD && v.iter().all(|&x| x < 1.0) {
        let logs: Vec<f64> = v.iter().map(|&x| (-x).ln_1p()).collect();
        let mut prefix = vec![0.0; n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] + logs[i];
        }
        let mut suffix = vec![0.0; n + 1];
        for i in (0..n).rev() {
            suffix[i] = suffix[i + 1] + logs[i];
        }
        (0..n).map(|i| (prefix[i] + suffix[i + 1]).exp()).collect()
    } else {
        let mut prefix = vec![1.0; n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] * (1.0 - v[i]);
        }
        let mut suffix = vec![1.0; n + 1];
        for i in (0..n).rev() {
            suffix[i] = suffix[i + 1] * (1.0 - v[i]);
        }
        (0..n).map(|i| prefix[i] * suffix[i + 1]).collect()
    }
}

/// Elementary symmetric polynomials `e_0 … e_l` of `u` by the usual
/// one-pass recurrence.
pub fn elementary_symmetric(u: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; u.len() + 1];
    e[0] = 1.0;
    for (k, &x) in u.iter().enumerate() {
        for m in (1..=k + 1).rev() {
            e[m] += x * e[m - 1];
        }
    }
    e
}

/// Per-AP coverage weights `u_i`, clamped to `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageTerms {
    pub u: Vec<f64>,
    /// Some weight fell outside `[0, 1]` before clamping.
    pub clamped: bool,
}

impl CoverageTerms {
    /// `Π(1 − c·u_i)`
    pub fn product(&self, c: f64) -> f64 {
        product_one_minus(&self.u, c)
    }

    pub fn elementary(&self) -> Vec<f64> {
        elementary_symmetric(&self.u)
    }

    /// `Σ_{m≥1} (−1)^{m−1} e_m(u) c^m`, evaluated term by term.
    pub fn alternating_sum(&self, c: f64) -> f64 {
        let e = self.elementary();
        let mut sum = 0.0;
        let mut cm = 1.0;
        for (m, em) in e.iter().enumerate().skip(1) {
            cm *= c;
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * em * cm;
        }
        sum
    }
}

pub fn coverage_terms(u: &[f64]) -> CoverageTerms {
    let mut clamped = false;
    let u = u
        .iter()
        .map(|&x| {
            let y = if x.is_nan() { 1.0 } else { x.clamp(0.0, 1.0) };
            clamped |= y != x;
            y
        })
        .collect();
    CoverageTerms { u, clamped }
}

/// Expected WLAN-covered area of each CQI band.
#[derive(Clone, Debug, PartialEq)]
pub struct BandCoverage {
    /// `|C_j| − |C_{j+1}|`
    pub band: Vec<f64>,
    /// Expected covered part of each band, within `[0, band]`.
    pub covered: Vec<f64>,
    pub cell_area: f64,
    /// An approximation left `[0, 1]` and was clamped.
    pub clamped: bool,
}

impl BandCoverage {
    pub fn none(ov: &OverlapSummary) -> Self {
        let band: Vec<f64> = (0..ov.band_count()).map(|j| ov.band_area(j)).collect();
        BandCoverage {
            covered: vec![0.0; band.len()],
            band,
            cell_area: ov.cell.area,
            clamped: false,
        }
    }

    /// Exact homogeneous coverage: `band_j(1 − Π(1 − u_i))`.
    pub fn homogeneous(ov: &OverlapSummary, terms: &CoverageTerms) -> Self {
        let p = terms.product(1.0);
        let mut out = BandCoverage::none(ov);
        out.clamped = terms.clamped;
        for j in 0..out.band.len() {
            out.covered[j] = out.band[j] * (1.0 - p);
        }
        out.clamp();
        out
    }

    /// Inhomogeneous coverage: the alternating sums over the number of
    /// overlapping APs collapse into three products,
    /// `band_j(1 − P_0) + |band_j∩Ω_H|(P_0 − P_H) + |band_j∩Ω_L|(P_0 − P_L)`
    /// with `P_c = Π(1 − c·u_i)` at `c = 1, 1+ρ_H, 1−ρ_L`.
    pub fn inhomogeneous(ov: &OverlapSummary, terms: &CoverageTerms, rho: Rho) -> Self {
        let p0 = terms.product(1.0);
        let ph = terms.product(1.0 + rho.high);
        let pl = terms.product(1.0 - rho.low);
        let mut out = BandCoverage::none(ov);
        out.clamped = terms.clamped;
        for j in 0..out.band.len() {
            out.covered[j] =
                out.band[j] * (1.0 - p0) + ov.band_high(j) * (p0 - ph) + ov.band_low(j) * (p0 - pl);
        }
        out.clamp();
        out
    }

    fn clamp(&mut self) {
        for (c, &b) in self.covered.iter_mut().zip(&self.band) {
            let y = if c.is_nan() { b } else { c.clamp(0.0, b.max(0.0)) };
            self.clamped |= y != *c;
            *c = y;
        }
    }

    /// `p_j`: probability a uniform point of C lies in band j and is covered.
    pub fn probabilities(&self) -> Vec<f64> {
        self.covered.iter().map(|c| c / self.cell_area).collect()
    }

    /// `(|C_j| − |C_{j+1}|) / |C|`
    pub fn weights(&self) -> Vec<f64> {
        self.band.iter().map(|b| b / self.cell_area).collect()
    }
}
