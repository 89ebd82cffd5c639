//! The work behind each subcommand, returning tables rather than printing.

use std::collections::BTreeMap;

use wlan_offload::exec::Exec;
use wlan_offload::formulas::{evaluate, CellModel, MetricsReport, Mode, OverlapSummary};
use wlan_offload::geometry::Point;
use wlan_offload::simulator::{run_replications, Estimate, SimResult};
use wlan_offload::spatialstats::{
    cross_correlation, identify_regions, index_of_dispersion, QuadratGrid, RegionPartition,
};

use crate::apfile;
use crate::error::CliError;
use crate::scenario::{Scenario, SWEEP_KEYS};
use crate::table::{cell, list, parse_list, parse_steps, steps, Table};

pub const METRICS_HEADER: &[&str] = &[
    "mode",
    "l",
    "b_s",
    "b_d",
    "t_d",
    "n_h",
    "p_wlan",
    "r_wlan",
    "p_bands",
    "q_s",
    "q_d",
    "clamped",
    "handover_warning",
];

pub const SIM_HEADER: &[&str] = &[
    "mode",
    "mean_l",
    "replications",
    "b_s",
    "b_s_se",
    "b_d",
    "b_d_se",
    "t_d",
    "t_d_se",
    "n_h",
    "n_h_se",
    "p_wlan",
    "p_wlan_se",
    "r_wlan",
    "r_wlan_se",
    "max_conservation_error",
];

pub const COMPARE_HEADER: &[&str] = &[
    "mode",
    "metric",
    "closed_form",
    "simulated",
    "stderr",
    "rel_diff",
    "z",
    "agree",
    "handover_warning",
];

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Homogeneous => "homo",
        Mode::Inhomogeneous => "inhomo",
        Mode::Baseline => "baseline",
    }
}

fn check_probability(what: &str, x: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(CliError::Internal(format!("{what} = {x} is outside [0, 1]")))
    }
}

fn check_report(r: &MetricsReport) -> Result<(), CliError> {
    for (name, x) in [("b_s", r.b_s), ("b_d", r.b_d), ("t_d", r.t_d), ("n_h", r.n_h)] {
        if !x.is_finite() {
            return Err(CliError::Internal(format!("{name} is not finite")));
        }
    }
    for p in r.p.iter().chain([&r.p_wlan, &r.r_wlan]) {
        check_probability("probability", *p)?;
    }
    for (_, q) in r.q_s.points.iter().chain(&r.q_d.points) {
        check_probability("tail probability", *q)?;
    }
    Ok(())
}

/// Closed-form metrics for one mode. `summary` supplies the Ω overlaps.
pub fn evaluate_with(
    s: &Scenario,
    cell: &CellModel,
    summary: &OverlapSummary,
    mode: Mode,
) -> Result<MetricsReport, CliError> {
    let aps = vec![s.template()?.measures(); s.l];
    let report = evaluate(cell, summary, s.rho()?, &aps, mode);
    check_report(&report)?;
    Ok(report)
}

/// Closed-form metrics with Ω given by fractions and arcs.
pub fn eval_report(s: &Scenario, mode: Mode) -> Result<MetricsReport, CliError> {
    let cell = s.cell()?;
    let summary = s.overlap_summary(&cell)?;
    evaluate_with(s, &cell, &summary, mode)
}

pub fn metrics_row(r: &MetricsReport) -> Vec<String> {
    vec![
        mode_name(r.mode).to_string(),
        cell(r.l),
        cell(r.b_s),
        cell(r.b_d),
        cell(r.t_d),
        cell(r.n_h),
        cell(r.p_wlan),
        cell(r.r_wlan),
        list(&r.p),
        steps(&r.q_s.points),
        steps(&r.q_d.points),
        cell(r.clamped),
        cell(r.handover_warning),
    ]
}

/// A metrics row read back from a table.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub mode: String,
    pub l: usize,
    pub b_s: f64,
    pub b_d: f64,
    pub t_d: f64,
    pub n_h: f64,
    pub p_wlan: f64,
    pub r_wlan: f64,
    pub p_bands: Vec<f64>,
    pub q_s: Vec<(f64, f64)>,
    pub q_d: Vec<(f64, f64)>,
    pub clamped: bool,
    pub handover_warning: bool,
}

impl MetricsRow {
    pub fn matches(&self, r: &MetricsReport) -> bool {
        let same = |a: f64, b: f64| a.to_bits() == b.to_bits();
        let same_steps = |a: &[(f64, f64)], b: &[(f64, f64)]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| same(x.0, y.0) && same(x.1, y.1))
        };
        self.mode == mode_name(r.mode)
            && self.l == r.l
            && same(self.b_s, r.b_s)
            && same(self.b_d, r.b_d)
            && same(self.t_d, r.t_d)
            && same(self.n_h, r.n_h)
            && same(self.p_wlan, r.p_wlan)
            && same(self.r_wlan, r.r_wlan)
            && self.p_bands.len() == r.p.len()
            && self.p_bands.iter().zip(&r.p).all(|(a, b)| same(*a, *b))
            && same_steps(&self.q_s, &r.q_s.points)
            && same_steps(&self.q_d, &r.q_d.points)
            && self.clamped == r.clamped
            && self.handover_warning == r.handover_warning
    }
}

pub fn parse_metrics(t: &Table) -> Result<Vec<MetricsRow>, CliError> {
    let missing = |c: &str| CliError::Data(format!("missing column '{c}'"));
    let num = |i: usize, c: &str| -> Result<f64, CliError> {
        t.get_f64(i, c).ok_or_else(|| missing(c))
    };
    let text = |i: usize, c: &str| -> Result<&str, CliError> { t.get(i, c).ok_or_else(|| missing(c)) };
    let flag = |i: usize, c: &str| -> Result<bool, CliError> {
        text(i, c)?.parse().map_err(|_| CliError::Data(format!("bad flag in '{c}'")))
    };
    (0..t.rows.len())
        .map(|i| {
            Ok(MetricsRow {
                mode: text(i, "mode")?.to_string(),
                l: text(i, "l")?
                    .parse()
                    .map_err(|_| CliError::Data("bad l".into()))?,
                b_s: num(i, "b_s")?,
                b_d: num(i, "b_d")?,
                t_d: num(i, "t_d")?,
                n_h: num(i, "n_h")?,
                p_wlan: num(i, "p_wlan")?,
                r_wlan: num(i, "r_wlan")?,
                p_bands: parse_list(text(i, "p_bands")?)?,
                q_s: parse_steps(text(i, "q_s")?)?,
                q_d: parse_steps(text(i, "q_d")?)?,
                clamped: flag(i, "clamped")?,
                handover_warning: flag(i, "handover_warning")?,
            })
        })
        .collect()
}

pub fn eval_table(s: &Scenario, modes: &[Mode]) -> Result<Table, CliError> {
    let mut t = Table::new(METRICS_HEADER);
    for &m in modes {
        t.push(metrics_row(&eval_report(s, m)?));
    }
    Ok(t)
}

pub fn simulate(s: &Scenario, mode: Mode, exec: Exec) -> Result<SimResult, CliError> {
    let result = run_replications(&s.sim_scenario(mode)?, &s.sim_config(mode, exec))?;
    for e in result.p.iter().chain([&result.p_wlan, &result.r_wlan]) {
        check_probability("estimated probability", e.mean)?;
    }
    Ok(result)
}

pub fn simulate_table(s: &Scenario, modes: &[Mode], exec: Exec) -> Result<Table, CliError> {
    let mut t = Table::new(SIM_HEADER);
    for &m in modes {
        let r = simulate(s, m, exec)?;
        let mut row = vec![mode_name(m).to_string(), cell(r.mean_l), cell(r.replications)];
        for e in [r.b_s, r.b_d, r.t_d, r.n_h, r.p_wlan, r.r_wlan] {
            row.push(cell(e.mean));
            row.push(cell(e.stderr));
        }
        row.push(cell(r.max_conservation_error));
        t.push(row);
    }
    Ok(t)
}

/// Closed form next to simulation. The closed form uses Ω overlaps
/// measured on the same edge disks the simulation draws from.
pub fn compare_table(s: &Scenario, modes: &[Mode], exec: Exec) -> Result<Table, CliError> {
    if s.poisson {
        return Err(CliError::Config(
            "compare needs sim.l_mode = fixed so both sides use the same l".into(),
        ));
    }
    let model = s.cell()?;
    let mut t = Table::new(COMPARE_HEADER);
    for &m in modes {
        let summary = match m {
            Mode::Inhomogeneous => s.geometric_summary(&model),
            _ => OverlapSummary::homogeneous(&model),
        };
        let closed = evaluate_with(s, &model, &summary, m)?;
        let sim = simulate(s, m, exec)?;
        let pairs: [(&str, f64, Estimate); 6] = [
            ("b_s", closed.b_s, sim.b_s),
            ("b_d", closed.b_d, sim.b_d),
            ("t_d", closed.t_d, sim.t_d),
            ("n_h", closed.n_h, sim.n_h),
            ("p_wlan", closed.p_wlan, sim.p_wlan),
            ("r_wlan", closed.r_wlan, sim.r_wlan),
        ];
        for (name, c, e) in pairs {
            let diff = (e.mean - c).abs();
            let rel = if c != 0.0 { diff / c.abs() } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
            let z = if e.stderr > 0.0 { diff / e.stderr } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
            t.push(vec![
                mode_name(m).to_string(),
                name.to_string(),
                cell(c),
                cell(e.mean),
                cell(e.stderr),
                cell(rel),
                cell(z),
                cell(rel <= 0.02 && z <= 3.0),
                cell(name == "n_h" && closed.handover_warning),
            ]);
        }
    }
    Ok(t)
}

/// `key=v1,v2,…` or `key=start:stop:step` (inclusive).
pub fn parse_sweep(spec: &str) -> Result<(String, Vec<String>), CliError> {
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("sweep '{spec}' is not key=values")))?;
    let key = key.trim();
    if !SWEEP_KEYS.iter().any(|(k, _)| *k == key) {
        let known: Vec<&str> = SWEEP_KEYS.iter().map(|(k, _)| *k).collect();
        return Err(CliError::Usage(format!(
            "unknown sweep key '{key}' (one of {})",
            known.join(", ")
        )));
    }
    let values = values.trim();
    let parts: Vec<&str> = values.split(':').collect();
    let list = if parts.len() == 3 {
        let num = |v: &str| -> Result<f64, CliError> {
            v.trim().parse().map_err(|_| CliError::Usage(format!("'{v}' is not a number")))
        };
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || stop < start {
            return Err(CliError::Usage(format!("bad range '{values}'")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=n).map(|k| (start + k as f64 * step).to_string()).collect()
    } else {
        values.split(',').map(|v| v.trim().to_string()).collect::<Vec<_>>()
    };
    if list.is_empty() || list.iter().any(String::is_empty) {
        return Err(CliError::Usage(format!("sweep '{spec}' has an empty value")));
    }
    Ok((key.to_string(), list))
}

/// Closed-form metrics at every sweep point, in input order.
pub fn sweep_table(
    s: &Scenario,
    key: &str,
    values: &[String],
    modes: &[Mode],
    exec: Exec,
) -> Result<Table, CliError> {
    let full_key = SWEEP_KEYS
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, f)| *f)
        .ok_or_else(|| CliError::Usage(format!("unknown sweep key '{key}'")))?;
    let mut header = vec!["key", "value"];
    header.extend_from_slice(METRICS_HEADER);
    let rows = exec.map_slice(values, |v| -> Result<Vec<Vec<String>>, CliError> {
        let mut point = s.clone();
        point
            .set(full_key, v)
            .map_err(|e| CliError::Config(format!("{key}={v}: {e}")))?;
        point.validate()?;
        modes
            .iter()
            .map(|&m| {
                let mut row = vec![key.to_string(), v.clone()];
                row.extend(metrics_row(&eval_report(&point, m)?));
                Ok(row)
            })
            .collect()
    });
    let mut t = Table::new(&header);
    for r in rows {
        for row in r? {
            t.push(row);
        }
    }
    Ok(t)
}

pub const DISPERSION_HEADER: &[&str] = &[
    "operator", "points", "quadrats", "mean", "variance", "index", "lower", "upper", "reject",
];

pub const CORRELATION_HEADER: &[&str] = &["operator_a", "operator_b", "correlation"];

/// Per-operator dispersion and pairwise correlations of quadrat counts on
/// one grid covering every file. Each input is `(name, contents)`; records
/// without an operator column take the file name.
pub fn stats_tables(inputs: &[(String, String)], atom: f64) -> Result<(Table, Table), CliError> {
    let mut operators: BTreeMap<String, Vec<Point>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for (name, text) in inputs {
        let records = apfile::parse(text, name)?;
        let mut label = name.clone();
        let mut k = 2;
        while order.contains(&label) {
            label = format!("{name}#{k}");
            k += 1;
        }
        for (op, pts) in apfile::by_operator(&records, &label) {
            if !order.contains(&op) {
                order.push(op.clone());
            }
            operators.entry(op).or_default().extend(pts);
        }
    }
    let all: Vec<Point> = operators.values().flatten().copied().collect();
    let frame = QuadratGrid::covering(&all, atom)?;
    let grids: Vec<(String, QuadratGrid)> = order
        .iter()
        .map(|op| {
            let g = QuadratGrid::from_points(&operators[op], frame.origin, atom, frame.nx, frame.ny)?;
            Ok((op.clone(), g))
        })
        .collect::<Result<_, CliError>>()?;

    let mut disp = Table::new(DISPERSION_HEADER);
    for (op, g) in &grids {
        let d = index_of_dispersion(&g.counts)?;
        disp.push(vec![
            op.clone(),
            cell(operators[op].len()),
            cell(g.counts.len()),
            cell(d.mean),
            cell(d.variance),
            cell(d.index),
            cell(d.bounds.0),
            cell(d.bounds.1),
            cell(d.reject),
        ]);
    }
    let mut corr = Table::new(CORRELATION_HEADER);
    for i in 0..grids.len() {
        for j in i + 1..grids.len() {
            let c = cross_correlation(&grids[i].1.counts, &grids[j].1.counts)
                .map(cell)
                .unwrap_or_else(|_| "undefined".to_string());
            corr.push(vec![grids[i].0.clone(), grids[j].0.clone(), c]);
        }
    }
    Ok((disp, corr))
}

/// Pools every record of the file onto a grid of `atom`-sized squares and
/// classifies the atoms.
pub fn identify(text: &str, source: &str, atom: f64, n0: usize) -> Result<(QuadratGrid, RegionPartition), CliError> {
    if !(atom > 0.0) {
        return Err(CliError::Usage("atom size must be positive".into()));
    }
    let records = apfile::parse(text, source)?;
    let points: Vec<Point> = records.iter().map(|r| r.position).collect();
    let grid = QuadratGrid::covering(&points, atom)?;
    let part = identify_regions(&grid, n0)?;
    Ok((grid, part))
}

/// Partition file: fitted intensities and thresholds as `#` lines, then one
/// `ix,iy,x,y,class` row per atom (`x,y` its lower-left corner, class
/// `H`, `L` or `0`).
pub fn partition_text(grid: &QuadratGrid, part: &RegionPartition) -> String {
    let mut t = Table::new(&["ix", "iy", "x", "y", "class"]);
    for iy in 0..part.ny {
        for ix in 0..part.nx {
            t.push(vec![
                cell(ix),
                cell(iy),
                cell(grid.origin.x + ix as f64 * grid.atom_size),
                cell(grid.origin.y + iy as f64 * grid.atom_size),
                part.class(ix, iy).label().to_string(),
            ]);
        }
    }
    format!(
        "# lambda0={}\n# lambda_h={}\n# lambda_l={}\n# a_l={}\n# a_u={}\n{}",
        part.lambda0,
        part.lambda_high,
        part.lambda_low,
        part.thresholds.0,
        part.thresholds.1,
        t.to_csv()
    )
}
