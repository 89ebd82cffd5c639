//! Scenario files: flat `key = value` lines with dotted keys, `#` comments.
//!
//! ```text
//! cell.radii = 1000, 500, 200, 100
//! cell.rates = 300, 750, 1500, 2000
//! wlan.rate = 10000
//! wlan.shape = pair_disk
//! wlan.a = 20
//! intensity.rho_h = 3
//! sim.seed = 7
//! ```
//!
//! Every key is optional and defaults to the reference setting. Unknown or
//! repeated keys are errors.

use std::f64::consts::PI;
use std::fmt::Write as _;

use wlan_offload::exec::Exec;
use wlan_offload::formulas::{CellModel, Mode, OverlapSummary, Rho};
use wlan_offload::geometry::{ConvexShape, Point};
use wlan_offload::pointprocess::{edge_disk, IntensityModel};
use wlan_offload::simulator::{LMode, OmegaPlacement, SimConfig, SimScenario};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeKind {
    Disk,
    Stadium,
    PairDisk,
}

impl ShapeKind {
    fn name(self) -> &'static str {
        match self {
            ShapeKind::Disk => "disk",
            ShapeKind::Stadium => "stadium",
            ShapeKind::PairDisk => "pair_disk",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub radii: Vec<f64>,
    pub rates: Vec<f64>,
    pub wlan_rate: f64,
    pub shape: ShapeKind,
    /// Coverage radius (m).
    pub r: f64,
    /// Elongation: half the straight length of a stadium, half the center
    /// separation of a pair-disk.
    pub a: f64,
    /// Rescale `r` so the coverage area stays that of a disk of radius `r`.
    pub fixed_area: bool,
    /// APs whose coverage meets the cell.
    pub l: usize,
    /// Base intensity (points/km²); only the Poisson simulation mode uses it.
    pub lambda0: f64,
    pub rho_h: f64,
    pub rho_l: f64,
    /// `|C∩Ω_H| / |C|`
    pub frac_h: f64,
    pub frac_l: f64,
    /// Arc of `∂C` inside `Ω_H`; `2√(2|C∩Ω_H|/π)` when unset.
    pub arc_h: Option<f64>,
    pub arc_l: Option<f64>,
    pub seed: u64,
    pub points: usize,
    pub lines: usize,
    pub replications: usize,
    pub poisson: bool,
    pub omega: OmegaPlacement,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            radii: vec![1000.0, 500.0, 200.0, 100.0],
            rates: vec![300.0, 750.0, 1500.0, 2000.0],
            wlan_rate: 10_000.0,
            shape: ShapeKind::Disk,
            r: 50.0,
            a: 0.0,
            fixed_area: false,
            l: 100,
            lambda0: 23.87,
            rho_h: 3.0,
            rho_l: 1.0,
            frac_h: 0.3,
            frac_l: 0.3,
            arc_h: None,
            arc_l: None,
            seed: 1,
            points: 100_000,
            lines: 10_000,
            replications: 10,
            poisson: false,
            omega: OmegaPlacement::Fixed,
        }
    }
}

pub const KEYS: &[&str] = &[
    "cell.radii",
    "cell.rates",
    "wlan.rate",
    "wlan.shape",
    "wlan.r",
    "wlan.a",
    "wlan.fixed_area",
    "wlan.l",
    "intensity.lambda0",
    "intensity.rho_h",
    "intensity.rho_l",
    "intensity.frac_h",
    "intensity.frac_l",
    "intensity.arc_h",
    "intensity.arc_l",
    "sim.seed",
    "sim.points",
    "sim.lines",
    "sim.replications",
    "sim.l_mode",
    "sim.omega",
];

/// Short sweep names and the scenario keys they drive.
pub const SWEEP_KEYS: &[(&str, &str)] = &[
    ("l", "wlan.l"),
    ("rho_h", "intensity.rho_h"),
    ("rho_l", "intensity.rho_l"),
    ("frac_h", "intensity.frac_h"),
    ("frac_l", "intensity.frac_l"),
    ("arc_h", "intensity.arc_h"),
    ("arc_l", "intensity.arc_l"),
    ("a", "wlan.a"),
];

fn number(v: &str) -> Result<f64, String> {
    let x: f64 = v.parse().map_err(|_| format!("'{v}' is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("'{v}' is not finite"))
    }
}

fn count(v: &str) -> Result<usize, String> {
    v.parse().map_err(|_| format!("'{v}' is not a non-negative integer"))
}

fn list(v: &str) -> Result<Vec<f64>, String> {
    v.split(',').map(|x| number(x.trim())).collect()
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut s = Scenario::default();
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected 'key = value'", i + 1))
            })?;
            let key = key.trim();
            if seen.contains(&key.to_string()) {
                return Err(CliError::Config(format!("line {}: '{key}' set twice", i + 1)));
            }
            s.set(key, value.trim())
                .map_err(|e| CliError::Config(format!("line {}: {e}", i + 1)))?;
            seen.push(key.to_string());
        }
        s.validate()?;
        Ok(s)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "cell.radii" => self.radii = list(v)?,
            "cell.rates" => self.rates = list(v)?,
            "wlan.rate" => self.wlan_rate = number(v)?,
            "wlan.shape" => {
                self.shape = match v {
                    "disk" => ShapeKind::Disk,
                    "stadium" => ShapeKind::Stadium,
                    "pair_disk" => ShapeKind::PairDisk,
                    _ => return Err(format!("unknown shape '{v}' (disk, stadium, pair_disk)")),
                }
            }
            "wlan.r" => self.r = number(v)?,
            "wlan.a" => self.a = number(v)?,
            "wlan.fixed_area" => {
                self.fixed_area = v.parse().map_err(|_| format!("'{v}' is not true or false"))?
            }
            "wlan.l" => self.l = count(v)?,
            "intensity.lambda0" => self.lambda0 = number(v)?,
            "intensity.rho_h" => self.rho_h = number(v)?,
            "intensity.rho_l" => self.rho_l = number(v)?,
            "intensity.frac_h" => self.frac_h = number(v)?,
            "intensity.frac_l" => self.frac_l = number(v)?,
            "intensity.arc_h" => self.arc_h = Some(number(v)?),
            "intensity.arc_l" => self.arc_l = Some(number(v)?),
            "sim.seed" => self.seed = v.parse().map_err(|_| format!("'{v}' is not a seed"))?,
            "sim.points" => self.points = count(v)?,
            "sim.lines" => self.lines = count(v)?,
            "sim.replications" => self.replications = count(v)?,
            "sim.l_mode" => {
                self.poisson = match v {
                    "fixed" => false,
                    "poisson" => true,
                    _ => return Err(format!("unknown l mode '{v}' (fixed, poisson)")),
                }
            }
            "sim.omega" => {
                self.omega = match v {
                    "fixed" => OmegaPlacement::Fixed,
                    "rotated" => OmegaPlacement::Rotated,
                    _ => return Err(format!("unknown omega placement '{v}' (fixed, rotated)")),
                }
            }
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    /// Checks everything that can be checked without building models.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.radii.len() != self.rates.len() {
            return bad(format!(
                "{} radii but {} rates",
                self.radii.len(),
                self.rates.len()
            ));
        }
        if self.radii.windows(2).any(|w| w[1] >= w[0]) {
            return bad("cell.radii must be strictly decreasing".into());
        }
        if !(self.r > 0.0) || self.a < 0.0 {
            return bad("wlan.r must be positive and wlan.a non-negative".into());
        }
        if self.lambda0 < 0.0 {
            return bad("intensity.lambda0 must be non-negative".into());
        }
        self.cell()?;
        self.rho()?;
        self.overlap_summary(&self.cell()?)?;
        Ok(())
    }

    /// Writes the scenario back as a scenario file.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "cell.radii = {}", join(&self.radii));
        let _ = writeln!(out, "cell.rates = {}", join(&self.rates));
        let _ = writeln!(out, "wlan.rate = {}", self.wlan_rate);
        let _ = writeln!(out, "wlan.shape = {}", self.shape.name());
        let _ = writeln!(out, "wlan.r = {}", self.r);
        let _ = writeln!(out, "wlan.a = {}", self.a);
        let _ = writeln!(out, "wlan.fixed_area = {}", self.fixed_area);
        let _ = writeln!(out, "wlan.l = {}", self.l);
        let _ = writeln!(out, "intensity.lambda0 = {}", self.lambda0);
        let _ = writeln!(out, "intensity.rho_h = {}", self.rho_h);
        let _ = writeln!(out, "intensity.rho_l = {}", self.rho_l);
        let _ = writeln!(out, "intensity.frac_h = {}", self.frac_h);
        let _ = writeln!(out, "intensity.frac_l = {}", self.frac_l);
        if let Some(a) = self.arc_h {
            let _ = writeln!(out, "intensity.arc_h = {a}");
        }
        if let Some(a) = self.arc_l {
            let _ = writeln!(out, "intensity.arc_l = {a}");
        }
        let _ = writeln!(out, "sim.seed = {}", self.seed);
        let _ = writeln!(out, "sim.points = {}", self.points);
        let _ = writeln!(out, "sim.lines = {}", self.lines);
        let _ = writeln!(out, "sim.replications = {}", self.replications);
        let mode = if self.poisson { "poisson" } else { "fixed" };
        let _ = writeln!(out, "sim.l_mode = {mode}");
        let omega = match self.omega {
            OmegaPlacement::Fixed => "fixed",
            OmegaPlacement::Rotated => "rotated",
        };
        let _ = writeln!(out, "sim.omega = {omega}");
        out
    }

    pub fn cell(&self) -> Result<CellModel, CliError> {
        Ok(CellModel::concentric_disks(&self.radii, &self.rates, self.wlan_rate)?)
    }

    fn shape_with_radius(&self, r: f64) -> Result<ConvexShape, CliError> {
        let c = Point::ORIGIN;
        Ok(match self.shape {
            ShapeKind::Disk => ConvexShape::disk(c, r)?,
            ShapeKind::Stadium => ConvexShape::stadium(c, r, self.a, 0.0)?,
            ShapeKind::PairDisk => ConvexShape::pair_disk(c, r, self.a, 0.0)?,
        })
    }

    /// Coverage shape of one AP, reference point at the origin.
    pub fn template(&self) -> Result<ConvexShape, CliError> {
        if !self.fixed_area || self.shape == ShapeKind::Disk {
            return self.shape_with_radius(self.r);
        }
        // area grows with the radius at fixed elongation
        let target = PI * self.r * self.r;
        let (mut lo, mut hi) = (0.0, self.r);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.shape_with_radius(mid)?.area() < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.shape_with_radius(0.5 * (lo + hi))
    }

    pub fn rho(&self) -> Result<Rho, CliError> {
        Ok(Rho::new(self.rho_h, self.rho_l)?)
    }

    pub fn arcs(&self, cell: &CellModel) -> (f64, f64) {
        let area = cell.outer().area();
        (
            self.arc_h
                .unwrap_or_else(|| OverlapSummary::reference_arc(self.frac_h * area)),
            self.arc_l
                .unwrap_or_else(|| OverlapSummary::reference_arc(self.frac_l * area)),
        )
    }

    /// Ω overlaps from the configured fractions and arcs.
    pub fn overlap_summary(&self, cell: &CellModel) -> Result<OverlapSummary, CliError> {
        let (ah, al) = self.arcs(cell);
        Ok(OverlapSummary::from_fractions(cell, self.frac_h, self.frac_l, ah, al)?)
    }

    /// Ω_H and Ω_L as disks on opposite sides of the cell edge, each
    /// covering its configured fraction of the cell.
    pub fn omega_shapes(&self, cell: &CellModel) -> (Vec<ConvexShape>, Vec<ConvexShape>) {
        let outer = cell.outer();
        (
            edge_disk(outer, 0.0, self.frac_h).into_iter().collect(),
            edge_disk(outer, PI, self.frac_l).into_iter().collect(),
        )
    }

    /// Ω overlaps measured on [`Scenario::omega_shapes`].
    pub fn geometric_summary(&self, cell: &CellModel) -> OverlapSummary {
        let (h, l) = self.omega_shapes(cell);
        OverlapSummary::from_geometry(cell, &h, &l)
    }

    pub fn intensity(&self, mode: Mode, cell: &CellModel) -> Result<IntensityModel, CliError> {
        Ok(match mode {
            Mode::Inhomogeneous => {
                let (h, l) = self.omega_shapes(cell);
                IntensityModel::from_rho(self.lambda0, self.rho()?, h, l)?
            }
            _ => IntensityModel::homogeneous(self.lambda0)?,
        })
    }

    pub fn sim_scenario(&self, mode: Mode) -> Result<SimScenario, CliError> {
        let cell = self.cell()?;
        Ok(SimScenario {
            intensity: self.intensity(mode, &cell)?,
            template: self.template()?,
            cell,
        })
    }

    pub fn sim_config(&self, mode: Mode, exec: Exec) -> SimConfig {
        let l_mode = match (mode, self.poisson) {
            (Mode::Baseline, _) => LMode::Fixed(0),
            (_, true) => LMode::Poisson,
            (_, false) => LMode::Fixed(self.l),
        };
        SimConfig {
            n_points: self.points,
            n_lines: self.lines,
            n_replications: self.replications,
            seed: self.seed,
            l_mode,
            omega: self.omega,
            exec,
        }
    }
}
