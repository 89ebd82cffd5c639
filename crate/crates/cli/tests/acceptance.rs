//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any asserted criterion fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use offload_cli::commands::{self, eval_report};
use offload_cli::scenario::Scenario;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wlan_offload::exec::Exec;
use wlan_offload::formulas::{self, explicit, CellModel, Mode, OverlapSummary, Rho};
use wlan_offload::geometry::{ConvexShape, Measures, Point};
use wlan_offload::pointprocess::{sample_deployment, IntensityModel};
use wlan_offload::simulator::{sample_chords, Estimate};
use wlan_offload::spatialstats::{identify_regions, index_of_dispersion, AtomClass, QuadratGrid};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn scenario(lines: &str) -> Scenario {
    Scenario::parse(lines).expect("valid scenario")
}

fn agrees(e: &Estimate, value: f64, rel: f64, sigmas: f64) -> bool {
    let diff = (e.mean - value).abs();
    diff <= rel * value.abs() && diff <= sigmas * e.stderr
}

fn homogeneous_oracle() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (l, reps) in [(1usize, 2500usize), (10, 400), (100, 200)] {
        let mut s = Scenario::default();
        s.l = l;
        s.replications = reps;
        s.points = 100_000;
        s.lines = 10_000;
        let start = Instant::now();
        let closed = eval_report(&s, Mode::Homogeneous).unwrap();
        let sim = commands::simulate(&s, Mode::Homogeneous, Exec::default()).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let ok_bs = agrees(&sim.b_s, closed.b_s, 0.02, 3.0);
        let ok_td = agrees(&sim.t_d, closed.t_d, 0.02, 3.0);
        let ok_p = agrees(&sim.p_wlan, closed.p_wlan, 0.02, 3.0);
        let ok_nh = (sim.n_h.mean - closed.n_h).abs() <= 0.05 * closed.n_h;
        let ok = ok_bs && ok_td && ok_p && ok_nh && secs < 60.0;
        pass &= ok;
        detail.push(format!(
            "l={l}: b_s {:.2}/{:.2} t_d {:.4e}/{:.4e} p_wlan {:.5}/{:.5} n_h {:.4}/{:.4} {:.1}s{}",
            closed.b_s,
            sim.b_s.mean,
            closed.t_d,
            sim.t_d.mean,
            closed.p_wlan,
            sim.p_wlan.mean,
            closed.n_h,
            sim.n_h.mean,
            secs,
            if ok { "" } else { " (off)" }
        ));
    }
    outcome(pass, detail.join("; "))
}

fn baseline_value() -> Outcome {
    let s = Scenario::default();
    let r = eval_report(&s, Mode::Baseline).unwrap();
    let rel = |x: f64| (x - 447.5).abs() / 447.5;
    outcome(
        rel(r.b_s) <= 1e-9 && rel(r.b_d) <= 1e-9,
        format!("b_s={} b_d={}", r.b_s, r.b_d),
    )
}

fn random_measures(rng: &mut ChaCha8Rng, scale: f64) -> Measures {
    let r = scale * rng.random_range(0.05..1.0);
    let a = scale * rng.random_range(0.0..1.0);
    let shape = match rng.random_range(0..3) {
        0 => ConvexShape::disk(Point::ORIGIN, r),
        1 => ConvexShape::stadium(Point::ORIGIN, r, a, 0.0),
        _ => ConvexShape::pair_disk(Point::ORIGIN, r, a, 0.0),
    };
    shape.unwrap().measures()
}

fn random_summary(rng: &mut ChaCha8Rng, cell: &CellModel) -> OverlapSummary {
    let fh = rng.random_range(0.0..0.5);
    let fl = rng.random_range(0.0..0.5);
    let per = cell.outer().perimeter();
    let ah = rng.random_range(0.0..0.5) * per;
    let al = rng.random_range(0.0..0.5) * per;
    OverlapSummary::from_fractions(cell, fh, fl, ah, al).unwrap()
}

fn same_numbers(a: &formulas::MetricsReport, b: &formulas::MetricsReport) -> bool {
    let bits = |x: f64| x.to_bits();
    a.l == b.l
        && bits(a.b_s) == bits(b.b_s)
        && bits(a.b_d) == bits(b.b_d)
        && bits(a.t_d) == bits(b.t_d)
        && bits(a.n_h) == bits(b.n_h)
        && bits(a.p_wlan) == bits(b.p_wlan)
        && bits(a.r_wlan) == bits(b.r_wlan)
        && a.p.iter().map(|x| x.to_bits()).eq(b.p.iter().map(|x| x.to_bits()))
        && a.q_s == b.q_s
        && a.q_d == b.q_d
        && a.clamped == b.clamped
}

fn reduction_identity() -> Outcome {
    let cell = CellModel::reference();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut failures = 0;
    let n = 1000;
    for _ in 0..n {
        let ov = random_summary(&mut rng, &cell);
        let l = rng.random_range(0..300);
        let aps: Vec<Measures> = (0..l).map(|_| random_measures(&mut rng, 120.0)).collect();
        let inh = formulas::evaluate(&cell, &ov, Rho::ZERO, &aps, Mode::Inhomogeneous);
        let hom = formulas::evaluate(&cell, &ov, Rho::ZERO, &aps, Mode::Homogeneous);
        if !same_numbers(&inh, &hom) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{} of {n} scenarios differ", failures))
}

fn static_equals_dynamic() -> Outcome {
    let shapes = [
        ("disk", "wlan.shape = disk\nwlan.r = 50\n"),
        ("stadium", "wlan.shape = stadium\nwlan.r = 50\nwlan.a = 50\n"),
        ("pair", "wlan.shape = pair_disk\nwlan.r = 50\nwlan.a = 50\n"),
    ];
    // (ρ_H, ρ_L, fraction of the cell in each of Ω_H and Ω_L)
    type Setting = Option<(f64, f64, f64)>;
    let settings: [(&str, Setting); 3] = [
        ("homo", None),
        ("3/1/0.3", Some((3.0, 1.0, 0.3))),
        ("1/0.5/0.15", Some((1.0, 0.5, 0.15))),
    ];
    let mut exact = true;
    let mut worst = (0.0f64, String::new());
    for l in [10usize, 100, 500] {
        for (shape_name, shape) in shapes {
            for (set_name, set) in settings {
                let mut s = scenario(shape);
                s.l = l;
                s.replications = 10;
                let mode = match set {
                    None => Mode::Homogeneous,
                    Some((rh, rl, f)) => {
                        s.rho_h = rh;
                        s.rho_l = rl;
                        s.frac_h = f;
                        s.frac_l = f;
                        Mode::Inhomogeneous
                    }
                };
                let homo = eval_report(&s, Mode::Homogeneous).unwrap();
                exact &= homo.b_s == homo.b_d && homo.q_s == homo.q_d;
                let sim = commands::simulate(&s, mode, Exec::default()).unwrap();
                let gap = (sim.b_d.mean - sim.b_s.mean).abs() / sim.b_d.mean;
                if gap >= worst.0 {
                    worst = (gap, format!("l={l} {shape_name} {set_name}"));
                }
            }
        }
    }
    // closed-form equality on random homogeneous inputs as well
    let cell = CellModel::reference();
    let ov = OverlapSummary::homogeneous(&cell);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let l = rng.random_range(0..500);
        let aps: Vec<Measures> = (0..l).map(|_| random_measures(&mut rng, 120.0)).collect();
        let r = formulas::evaluate(&cell, &ov, Rho::ZERO, &aps, Mode::Homogeneous);
        exact &= r.b_s == r.b_d && r.q_s == r.q_d;
    }
    outcome(
        exact && worst.0 < 0.05,
        format!(
            "closed form exact: {exact}; simulated max |B_d-B_s|/B_d = {:.2}% at {}",
            100.0 * worst.0,
            worst.1
        ),
    )
}

fn homo_inhomo_gap() -> Outcome {
    let start = Instant::now();
    let mut s = Scenario::default();
    s.l = 1000;
    let homo = eval_report(&s, Mode::Homogeneous).unwrap();
    let inhomo = eval_report(&s, Mode::Inhomogeneous).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let ratio = homo.b_s / inhomo.b_s;
    outcome(
        (1.3..=1.7).contains(&ratio) && secs < 1.0,
        format!("{:.2}/{:.2} = {ratio:.3} in {:.1} ms", homo.b_s, inhomo.b_s, secs * 1e3),
    )
}

fn non_monotone_handovers() -> Outcome {
    let values: Vec<f64> = (1..=20)
        .map(|k| {
            let mut s = Scenario::default();
            s.l = 50 * k;
            eval_report(&s, Mode::Inhomogeneous).unwrap().n_h
        })
        .collect();
    let rises = values.windows(2).any(|w| w[1] > w[0]);
    let falls = values.windows(2).any(|w| w[1] < w[0]);
    let peak = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    outcome(
        rises && falls,
        format!(
            "n_h {:.3} at l=50, peak {:.3} at l={}, {:.3} at l=1000",
            values[0],
            peak.1,
            50 * (peak.0 + 1),
            values[19]
        ),
    )
}

/// `e_m` by enumerating every subset.
fn subset_elementary(u: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; u.len() + 1];
    for mask in 0u32..(1 << u.len()) {
        let prod: f64 = (0..u.len()).filter(|i| mask >> i & 1 == 1).map(|i| u[i]).product();
        e[mask.count_ones() as usize] += prod;
    }
    e
}

fn product_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut worst_subset = 0.0f64;
    for case in 0..300 {
        // unit-scale cell so absolute errors are meaningful for every metric
        let r1 = rng.random_range(0.2..0.9);
        let r2 = r1 * rng.random_range(0.1..0.9);
        let cell = CellModel::concentric_disks(
            &[1.0, r1, r2],
            &[rng.random_range(0.1..0.5), rng.random_range(0.5..1.0), rng.random_range(1.0..1.5)],
            rng.random_range(1.5..3.0),
        )
        .unwrap();
        let ov = random_summary(&mut rng, &cell);
        let rho = Rho::new(rng.random_range(0.0..4.0), rng.random_range(0.0..1.0)).unwrap();
        let l = case % 13;
        let aps: Vec<Measures> = (0..l).map(|_| random_measures(&mut rng, 0.25)).collect();
        for mode in [Mode::Homogeneous, Mode::Inhomogeneous] {
            let a = formulas::p_j(&ov, rho, &aps, mode);
            let b = explicit::p_j(&ov, rho, &aps, mode);
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max((x - y).abs());
            }
            let t = (formulas::mean_total_throughput(&cell, &ov, rho, &aps, mode)
                - explicit::mean_total_throughput(&cell, &ov, rho, &aps, mode))
            .abs();
            let n = (formulas::mean_handovers(&ov, rho, &aps, mode)
                - explicit::mean_handovers(&ov, rho, &aps, mode))
            .abs();
            worst = worst.max(t).max(n);

            let u = explicit::weights(&ov, rho, &aps, mode);
            let dp = formulas::elementary_symmetric(&u);
            let brute = subset_elementary(&u);
            for (x, y) in dp.iter().zip(&brute) {
                worst_subset = worst_subset.max((x - y).abs());
            }
            // coverage probability of each band straight from the subsets
            let rho_eff = if mode == Mode::Homogeneous { Rho::ZERO } else { rho };
            for j in 0..ov.band_count() {
                let p: f64 = (1..brute.len())
                    .map(|m| {
                        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
                        sign * brute[m]
                            * formulas::g2(
                                ov.band_area(j),
                                ov.band_high(j),
                                ov.band_low(j),
                                m as u32,
                                rho_eff,
                            )
                    })
                    .sum::<f64>()
                    / ov.cell.area;
                worst_subset = worst_subset.max((p - a[j]).abs());
            }
        }
    }
    outcome(
        worst <= 1e-10 && worst_subset <= 1e-10,
        format!("max |product - explicit| = {worst:.2e}, vs subset enumeration {worst_subset:.2e}"),
    )
}

fn calibration() -> Outcome {
    let window = ConvexShape::rectangle(0.0, 0.0, 1000.0, 1000.0).unwrap();
    let template = ConvexShape::disk(Point::ORIGIN, 10.0).unwrap();
    let model = IntensityModel::homogeneous(500.0).unwrap();
    let grids = 1000;
    let mut rejected = 0;
    for seed in 0..grids {
        let dep = sample_deployment(&model, &window, &template, 1000 + seed);
        let points: Vec<Point> = dep.aps.iter().map(|a| a.position).collect();
        let grid = QuadratGrid::from_points(&points, Point::ORIGIN, 100.0, 10, 10).unwrap();
        if index_of_dispersion(&grid.counts).unwrap().reject {
            rejected += 1;
        }
    }
    let rate = rejected as f64 / grids as f64;
    let cell = ConvexShape::disk(Point::ORIGIN, 1000.0).unwrap();
    let chords = sample_chords(&cell, 100_000, 5);
    let mean = chords.iter().sum::<f64>() / chords.len() as f64;
    let cauchy = PI * cell.area() / cell.perimeter();
    let chord_rel = (mean - cauchy).abs() / cauchy;
    outcome(
        (0.03..=0.07).contains(&rate) && chord_rel < 0.01,
        format!(
            "rejection rate {:.1}% over {grids} grids; mean chord {mean:.2} vs {cauchy:.2} ({:.2}%)",
            100.0 * rate,
            100.0 * chord_rel
        ),
    )
}

fn jaccard(found: &[(usize, usize)], truth: &[(usize, usize)]) -> f64 {
    let inter = found.iter().filter(|a| truth.contains(a)).count() as f64;
    let union = found.len() as f64 + truth.len() as f64 - inter;
    if union == 0.0 {
        1.0
    } else {
        inter / union
    }
}

fn region_identification() -> Outcome {
    // 5 km square, 50 m atoms, one 1 km² block each of Ω_H and Ω_L
    let atom = 50.0;
    let n = 100;
    let window = ConvexShape::rectangle(0.0, 0.0, 5000.0, 5000.0).unwrap();
    let high = ConvexShape::rectangle(1000.0, 1000.0, 2000.0, 2000.0).unwrap();
    let low = ConvexShape::rectangle(3000.0, 2500.0, 4000.0, 3500.0).unwrap();
    let rho = Rho::new(3.0, 1.0).unwrap();
    let model = IntensityModel::from_rho(1600.0, rho, vec![high.clone()], vec![low.clone()]).unwrap();
    let template = ConvexShape::disk(Point::ORIGIN, 1.0).unwrap();
    let truth = |shape: &ConvexShape| -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for iy in 0..n {
            for ix in 0..n {
                let c = Point::new((ix as f64 + 0.5) * atom, (iy as f64 + 0.5) * atom);
                if shape.contains(c) {
                    v.push((ix, iy));
                }
            }
        }
        v
    };
    let (truth_h, truth_l) = (truth(&high), truth(&low));
    let mut worst = f64::INFINITY;
    let mut scores = Vec::new();
    for seed in 0..5 {
        let dep = sample_deployment(&model, &window, &template, 77 + seed);
        let points: Vec<Point> = dep.aps.iter().map(|a| a.position).collect();
        let grid = QuadratGrid::from_points(&points, Point::ORIGIN, atom, n, n).unwrap();
        let part = identify_regions(&grid, 3).unwrap();
        let jh = jaccard(&part.atoms(AtomClass::High), &truth_h);
        let jl = jaccard(&part.atoms(AtomClass::Low), &truth_l);
        worst = worst.min(jh).min(jl);
        scores.push(format!("{jh:.3}/{jl:.3}"));
    }
    outcome(
        worst >= 0.8,
        format!("Jaccard H/L per seed: {}", scores.join(" ")),
    )
}

fn handover_limitation() -> (Outcome, String) {
    let mut report = Vec::new();
    let mut flags = true;
    for l in [500usize, 1000] {
        let mut s = Scenario::default();
        s.l = l;
        s.replications = 10;
        let t = commands::compare_table(&s, &[Mode::Inhomogeneous], Exec::default()).unwrap();
        let row = (0..t.rows.len()).find(|&i| t.get(i, "metric") == Some("n_h")).unwrap();
        report.push(format!(
            "l={l}: closed {:.3} vs simulated {:.3} ± {:.3}",
            t.get_f64(row, "closed_form").unwrap(),
            t.get_f64(row, "simulated").unwrap(),
            t.get_f64(row, "stderr").unwrap()
        ));
        flags &= eval_report(&s, Mode::Inhomogeneous).unwrap().handover_warning;
        flags &= !eval_report(&s, Mode::Homogeneous).unwrap().handover_warning;
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.txt");
    std::fs::write(&path, "wlan.l = 500\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_offload"))
        .args(["eval", path.to_str().unwrap(), "--mode", "inhomo"])
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    let cli = out.status.success()
        && String::from_utf8_lossy(&out.stderr).contains("warning")
        && stdout.lines().nth(1).is_some_and(|l| l.ends_with(",true"));
    (
        outcome(flags && cli, format!("library flag: {flags}; CLI warning: {cli}")),
        report.join("; "),
    )
}

fn main() {
    type Check = fn() -> Outcome;
    let checks: Vec<(&str, Check)> = vec![
        ("1 homogeneous oracle", homogeneous_oracle),
        ("2 baseline value", baseline_value),
        ("3 reduction identity", reduction_identity),
        ("4 static equals dynamic", static_equals_dynamic),
        ("5 homo/inhomo gap", homo_inhomo_gap),
        ("6 non-monotone handovers", non_monotone_handovers),
        ("7 product/explicit identity", product_identity),
        ("8 statistical calibration", calibration),
        ("9 region identification", region_identification),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let o = check();
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    let (o, discrepancy) = handover_limitation();
    println!(
        "{} 10 handover limitation: {}; reported only: {discrepancy}",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail
    );
    failed += usize::from(!o.pass);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
