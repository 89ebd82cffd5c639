use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use offload_cli::commands::{self, parse_metrics};
use offload_cli::scenario::Scenario;
use offload_cli::table::Table;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wlan_offload::formulas::Mode;

fn offload(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_offload"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn table_of(o: &Output) -> Table {
    Table::from_csv(&stdout(o)).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn eval_table_round_trips_and_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let text = "wlan.l = 250\nwlan.shape = stadium\nwlan.a = 20\nintensity.rho_h = 2.5\n";
    let sc = write(dir.path(), "s.txt", text);
    let out = dir.path().join("m.csv");
    let o = offload(&["eval", path(&sc), "--out", path(&out), "--format", "csv"]);
    assert!(o.status.success());
    let t = Table::from_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let rows = parse_metrics(&t).unwrap();
    let s = Scenario::parse(text).unwrap();
    let modes = [Mode::Homogeneous, Mode::Inhomogeneous, Mode::Baseline];
    assert_eq!(rows.len(), modes.len());
    for (row, mode) in rows.iter().zip(modes) {
        let lib = commands::eval_report(&s, mode).unwrap();
        assert!(row.matches(&lib), "{mode:?}");
    }
    // re-writing the parsed table gives the same text
    assert_eq!(t.to_csv(), std::fs::read_to_string(&out).unwrap());
}

#[test]
fn zero_aps_inhomogeneous_row_is_the_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(dir.path(), "s.txt", "wlan.l = 0\n");
    let t = table_of(&offload(&["eval", path(&sc)]));
    let inhomo = &t.rows[1][1..];
    let baseline = &t.rows[2][1..];
    assert_eq!(inhomo, baseline);
    assert_eq!(t.get(2, "b_s"), Some("447.5"));
}

#[test]
fn congruent_coverage_gives_equal_static_and_dynamic_columns() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(dir.path(), "s.txt", "wlan.l = 400\nwlan.shape = pair_disk\nwlan.a = 30\n");
    let t = table_of(&offload(&["eval", path(&sc)]));
    for i in 0..t.rows.len() {
        assert_eq!(t.get(i, "b_s"), t.get(i, "b_d"));
    }
}

#[test]
fn probabilities_stay_in_range() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(dir.path(), "s.txt", "wlan.l = 5000\nintensity.rho_h = 8\n");
    let t = table_of(&offload(&["eval", path(&sc)]));
    for row in parse_metrics(&t).unwrap() {
        for p in row.p_bands.iter().chain([&row.p_wlan, &row.r_wlan]) {
            assert!((0.0..=1.0).contains(p));
        }
    }
}

#[test]
fn large_inhomogeneous_l_raises_the_warning() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(dir.path(), "s.txt", "wlan.l = 500\n");
    let o = offload(&["eval", path(&sc)]);
    let t = table_of(&o);
    assert_eq!(t.get(0, "handover_warning"), Some("false"));
    assert_eq!(t.get(1, "handover_warning"), Some("true"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));

    let small = write(dir.path(), "small.txt", "wlan.l = 100\n");
    let o = offload(&["eval", path(&small)]);
    assert!(table_of(&o).rows.iter().all(|r| r.last().unwrap() == "false"));
    assert!(o.stderr.is_empty());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = write(dir.path(), "bad.txt", "wlan.colour = red\n");
    let o = offload(&["eval", path(&bad_key)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key"));

    assert_eq!(offload(&["eval", "/definitely/missing"]).status.code(), Some(2));
    assert_eq!(offload(&["frobnicate"]).status.code(), Some(1));
    let ok = write(dir.path(), "ok.txt", "");
    assert_eq!(offload(&["eval", path(&ok), "--format", "json"]).status.code(), Some(1));
    assert_eq!(offload(&["sweep", path(&ok), "colour=1,2"]).status.code(), Some(1));

    let aps = write(dir.path(), "aps.txt", "# x,y\n1,2\n3,oops\n");
    let o = offload(&["stats", path(&aps)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":3:"));
    let empty = write(dir.path(), "empty.txt", "# nothing\n");
    assert_eq!(offload(&["stats", path(&empty)]).status.code(), Some(2));
    let tiny = write(dir.path(), "tiny.txt", "0,0\n150,0\n");
    assert_eq!(offload(&["identify", path(&tiny)]).status.code(), Some(2));
}

#[test]
fn thread_cap_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(dir.path(), "s.txt", "wlan.l = 10\nsim.points = 2000\nsim.lines = 200\nsim.replications = 3\n");
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_offload"))
            .args(["simulate", path(&sc), "--mode", "homo"])
            .env("OFFLOAD_GEOM_THREADS", v)
            .output()
            .unwrap()
    };
    assert_eq!(run("0").status.code(), Some(1));
    assert_eq!(run("many").status.code(), Some(1));
    let one = run("1");
    assert!(one.status.success());
    // results do not depend on the thread count
    assert_eq!(stdout(&one), stdout(&run("3")));
}

#[test]
fn simulate_is_reproducible_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(dir.path(), "s.txt", "wlan.l = 30\nsim.points = 5000\nsim.lines = 500\nsim.replications = 4\n");
    let a = stdout(&offload(&["simulate", path(&sc), "--seed", "5"]));
    let b = stdout(&offload(&["simulate", path(&sc), "--seed", "5"]));
    let c = stdout(&offload(&["simulate", path(&sc), "--seed", "6"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
    let t = Table::from_csv(&a).unwrap();
    assert_eq!(t.rows.len(), 3);
    assert_eq!(t.get_f64(2, "b_s"), Some(t.get_f64(2, "b_s").unwrap()));
    for i in 0..3 {
        let p = t.get_f64(i, "p_wlan").unwrap();
        assert!((0.0..=1.0).contains(&p));
    }
    assert_eq!(t.get_f64(2, "n_h"), Some(0.0));
}

#[test]
fn compare_reports_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(dir.path(), "s.txt", "wlan.l = 20\nsim.points = 20000\nsim.lines = 4000\nsim.replications = 40\n");
    let t = table_of(&offload(&["compare", path(&sc), "--mode", "homo"]));
    assert_eq!(t.rows.len(), 6);
    let agreeing = (0..6).filter(|&i| t.get(i, "agree") == Some("true")).count();
    assert!(agreeing >= 5, "{}", t.to_csv());
    let poisson = write(dir.path(), "p.txt", "sim.l_mode = poisson\n");
    assert_eq!(offload(&["compare", path(&poisson)]).status.code(), Some(1));
}

fn sweep(dir: &Path, scenario: &str, spec: &str, mode: &str) -> Table {
    let sc = write(dir, "sweep.txt", scenario);
    table_of(&offload(&["sweep", path(&sc), spec, "--mode", mode]))
}

fn column(t: &Table, name: &str) -> Vec<f64> {
    (0..t.rows.len()).map(|i| t.get_f64(i, name).unwrap()).collect()
}

#[test]
fn sweep_rows_follow_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let t = sweep(dir.path(), "", "l=30,10,20", "all");
    let values: Vec<&str> = (0..t.rows.len()).map(|i| t.get(i, "value").unwrap()).collect();
    assert_eq!(values, ["30", "30", "30", "10", "10", "10", "20", "20", "20"]);
    let range = sweep(dir.path(), "", "frac_h=0:0.4:0.1", "inhomo");
    assert_eq!(range.rows.len(), 5);
}

#[test]
fn static_bandwidth_gap_widens_with_l() {
    let dir = tempfile::tempdir().unwrap();
    let hom = column(&sweep(dir.path(), "", "l=100:1000:100", "homo"), "b_s");
    let inh = column(&sweep(dir.path(), "", "l=100:1000:100", "inhomo"), "b_s");
    let gaps: Vec<f64> = hom.iter().zip(&inh).map(|(h, i)| h - i).collect();
    assert!(gaps.windows(2).all(|w| w[1] > w[0]), "{gaps:?}");
}

#[test]
fn static_bandwidth_barely_depends_on_rho_h() {
    let dir = tempfile::tempdir().unwrap();
    let by_rho = column(&sweep(dir.path(), "", "rho_h=0:6:0.5", "inhomo"), "b_s");
    let by_l = column(&sweep(dir.path(), "", "l=50:1000:50", "inhomo"), "b_s");
    let spread = |xs: &[f64]| {
        let hi = xs.iter().cloned().fold(f64::MIN, f64::max);
        let lo = xs.iter().cloned().fold(f64::MAX, f64::min);
        hi / lo - 1.0
    };
    assert!(spread(&by_rho) < 0.1, "{by_rho:?}");
    assert!(spread(&by_rho) < spread(&by_l) / 10.0);
}

#[test]
fn pair_disk_handovers_are_smallest_without_separation() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = "wlan.shape = pair_disk\nwlan.fixed_area = true\n";
    for mode in ["homo", "inhomo"] {
        let n = column(&sweep(dir.path(), scenario, "a=0:100:5", mode), "n_h");
        let min = n.iter().cloned().fold(f64::MAX, f64::min);
        assert_eq!(n[0], min, "{mode}: {n:?}");
        assert!(n[1..].iter().all(|x| *x > n[0]));
    }
}

fn poisson_points(rng: &mut ChaCha8Rng, w: f64, h: f64, count: usize) -> Vec<(f64, f64)> {
    (0..count)
        .map(|_| (rng.random::<f64>() * w, rng.random::<f64>() * h))
        .collect()
}

fn ap_text(points: &[(f64, f64)], operator: Option<&str>) -> String {
    let mut s = String::from("# synthetic\n");
    for (x, y) in points {
        match operator {
            Some(op) => s.push_str(&format!("{x},{y},{op}\n")),
            None => s.push_str(&format!("{x},{y}\n")),
        }
    }
    s
}

#[test]
fn stats_on_synthetic_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // uniform points, fixed count: close to homogeneous Poisson
    let uniform = write(dir.path(), "u.txt", &ap_text(&poisson_points(&mut rng, 2000.0, 2000.0, 1600), None));
    let o = offload(&["stats", path(&uniform), path(&uniform)]);
    let text = stdout(&o);
    let (disp, corr) = text.split_once("\n\n").unwrap();
    let disp = Table::from_csv(disp).unwrap();
    let corr = Table::from_csv(corr).unwrap();
    assert_eq!(disp.rows.len(), 2);
    assert_eq!(corr.rows.len(), 1);
    assert!((corr.get_f64(0, "correlation").unwrap() - 1.0).abs() < 1e-12);

    // clustered: dense blocks on a sparse background
    let mut pts = poisson_points(&mut rng, 2000.0, 2000.0, 400);
    for _ in 0..4 {
        let (cx, cy) = (rng.random::<f64>() * 1800.0, rng.random::<f64>() * 1800.0);
        pts.extend(poisson_points(&mut rng, 200.0, 200.0, 300).into_iter().map(|(x, y)| (x + cx, y + cy)));
    }
    let clustered = write(dir.path(), "c.txt", &ap_text(&pts, Some("op")));
    let t = Table::from_csv(stdout(&offload(&["stats", path(&clustered)])).split_once("\n\n").unwrap().0).unwrap();
    assert_eq!(t.get(0, "operator"), Some("op"));
    assert_eq!(t.get(0, "reject"), Some("true"));
}

#[test]
fn homogeneous_files_are_mostly_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let runs = 60;
    let mut accepted = 0;
    for seed in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        // Poisson count, uniform positions on an exact 20 × 20 quadrat frame
        let n = rand_distr::Distribution::sample(&rand_distr::Poisson::new(2000.0).unwrap(), &mut rng) as usize;
        let mut pts = poisson_points(&mut rng, 2000.0, 2000.0, n);
        pts.push((0.0, 0.0));
        pts.push((1999.9, 1999.9));
        let f = write(dir.path(), "h.txt", &ap_text(&pts, None));
        let text = stdout(&offload(&["stats", path(&f)]));
        let t = Table::from_csv(text.split_once("\n\n").unwrap().0).unwrap();
        assert_eq!(t.get(0, "quadrats"), Some("400"));
        if t.get(0, "reject") == Some("false") {
            accepted += 1;
        }
    }
    // 95% expected; binomial 3σ band on 60 runs
    assert!(accepted >= 51, "{accepted}/{runs}");
}

#[test]
fn identify_writes_a_partition_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pts = poisson_points(&mut rng, 3000.0, 3000.0, 3600);
    pts.extend(poisson_points(&mut rng, 500.0, 500.0, 1500).into_iter().map(|(x, y)| (x + 1000.0, y + 1000.0)));
    let f = write(dir.path(), "aps.txt", &ap_text(&pts, None));
    let out = dir.path().join("part.csv");
    let o = offload(&["identify", path(&f), "--atom", "100", "--n0", "3", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let comments: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert_eq!(comments.len(), 5);
    let lambda = |key: &str| -> f64 {
        comments
            .iter()
            .find_map(|l| l.strip_prefix(&format!("# {key}=")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(lambda("lambda_h") > lambda("lambda0"));
    let body: String = text.lines().skip(5).map(|l| format!("{l}\n")).collect();
    let t = Table::from_csv(&body).unwrap();
    assert_eq!(t.header, ["ix", "iy", "x", "y", "class"]);
    assert_eq!(t.rows.len(), 30 * 30);
    let high: Vec<(f64, f64)> = (0..t.rows.len())
        .filter(|&i| t.get(i, "class") == Some("H"))
        .map(|i| (t.get_f64(i, "x").unwrap(), t.get_f64(i, "y").unwrap()))
        .collect();
    assert!(!high.is_empty());
    assert!(high.iter().all(|(x, y)| (800.0..1700.0).contains(x) && (800.0..1700.0).contains(y)));
}
