//! End-to-end runs of the `mgl` binary: exit codes, output formats,
//! determinism under fixed seeds, and the file contract of plot emission.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mgl_core::grid::{boundary_to_json, map_to_json, GridDomain, GridMap, MapData};
use mgl_core::manifold::ModelManifold;

fn mgl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout_of(out)).expect("json stdout")
}

fn work_dir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::create_dir_all(&dir).expect("tmp dir");
    dir
}

fn unit_grid(n: usize) -> GridDomain {
    let h = 1.0 / (n - 1) as f64;
    GridDomain::new(n, n, h, h).unwrap()
}

fn plane_map(n: usize, f: impl Fn(f64, f64) -> Vec<f64>) -> GridMap {
    GridMap::from_fn(unit_grid(n), ModelManifold::euclidean(2), f).unwrap()
}

fn gentle_pair(dir: &Path) -> (PathBuf, PathBuf) {
    let f0 = plane_map(9, |x, y| vec![0.7 * x - 0.2 * y + 0.1, 0.3 * x + 0.5 * y]);
    let f1 = plane_map(9, |x, y| {
        let bump = (std::f64::consts::PI * x).sin() * (std::f64::consts::PI * y).sin();
        vec![0.7 * x - 0.2 * y + 0.1 + 0.1 * bump, 0.3 * x + 0.5 * y - 0.05 * bump]
    });
    let p0 = dir.join("f0.json");
    let p1 = dir.join("f1.json");
    std::fs::write(&p0, map_to_json(&f0)).unwrap();
    std::fs::write(&p1, map_to_json(&f1)).unwrap();
    (p0, p1)
}

fn boundary_file(dir: &Path, name: &str, f: impl Fn(f64, f64) -> Vec<f64>) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, boundary_to_json(&plane_map(9, f))).unwrap();
    path
}

#[test]
fn inline_region_verdicts_cover_membership_and_boundary() {
    let out = mgl(&["region", "--input", "1,1", "--input", "2,0.4,0", "--input", "2,0.6,0"]);
    assert!(out.status.success());
    let rows = json_of(&out);
    assert_eq!(rows[0]["member"], true);
    assert_eq!(rows[0]["on_boundary"], true);
    assert_eq!(rows[1]["member"], true);
    assert_eq!(rows[1]["on_boundary"], false);
    assert_eq!(rows[2]["member"], false);
    let margin = rows[2]["margin"].as_f64().unwrap();
    assert!((margin + 0.2).abs() < 1e-12);
}

#[test]
fn slope_cap_below_three_dimensions_is_flagged_out_of_scope() {
    let out = mgl(&["region", "--input", "1,0.5", "--region", "slope-cap"]);
    assert!(out.status.success());
    let rows = json_of(&out);
    assert_eq!(rows[0]["member"], true);
    assert_eq!(rows[0]["out_of_theorem_scope"], true);
    assert!(stderr_of(&out).contains("m >= 3"));

    let out = mgl(&["region", "--input", "1,0.5,0.1", "--region", "slope-cap"]);
    assert_eq!(json_of(&out)[0]["out_of_theorem_scope"], false);
}

#[test]
fn malformed_inputs_exit_two_with_diagnostics() {
    let out = mgl(&["region", "--input", "1,oops"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("oops"));

    let out = mgl(&["region", "--input", "no_such_file.json"]);
    assert_eq!(out.status.code(), Some(2));

    let out = mgl(&["region", "--input", "1,2", "--input", "1,2,3", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("expected m = 2"));

    let out = mgl(&["region"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn map_region_field_csv_is_byte_identical_across_runs() {
    let dir = work_dir("region_map");
    let (p0, _) = gentle_pair(&dir);
    let args = ["region", "--input", p0.to_str().unwrap(), "--format", "csv"];
    let first = mgl(&args);
    let second = mgl(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = stdout_of(&first);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "node_i,node_j,lambda_sq_1,lambda_sq_2,member,on_boundary,margin"
    );
    assert_eq!(lines.count(), 81);
}

#[test]
fn majorize_csv_is_seed_deterministic_and_seed_sensitive() {
    fn args(seed: &str) -> [&str; 9] {
        [
            "majorize", "--input", "1.2,0.8,0.5", "--samples", "400", "--seed", seed,
            "--format", "csv",
        ]
    }
    let a = mgl(&args("7"));
    let b = mgl(&args("7"));
    let c = mgl(&args("8"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let text = stdout_of(&a);
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<_> = row.split(',').collect();
    assert_eq!(fields[4], "7");
    assert_eq!(fields[6], "0", "no samples may escape the stable region");
}

#[test]
fn majorize_rejects_sources_outside_the_stated_subset() {
    let out = mgl(&["majorize", "--input", "1.9,0.9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("outside the stated convex subset"));
}

#[test]
fn solve_writes_outcome_and_the_map_round_trips_exactly() {
    let dir = work_dir("solve");
    let boundary = boundary_file(&dir, "bnd.json", |x, y| {
        let bump = (std::f64::consts::PI * x).sin() * (std::f64::consts::PI * y).sin();
        vec![0.5 * x + 0.1 * bump, 0.6 * y - 0.1 * x]
    });
    let out_path = dir.join("outcome.json");
    let map_path = dir.join("solved.json");
    let out = mgl(&[
        "solve",
        "--boundary",
        boundary.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
        "--map-output",
        map_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let outcome: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(outcome["converged"], true);
    assert!(outcome["final_residual"].as_f64().unwrap() <= 1e-8);

    let text = std::fs::read_to_string(&map_path).unwrap();
    let reread = MapData::from_json(&text).unwrap().into_map().unwrap();
    assert_eq!(map_to_json(&reread), text, "map files reload to identical bytes");
}

#[test]
fn solve_csv_lists_the_volume_history() {
    let dir = work_dir("solve_csv");
    let boundary = boundary_file(&dir, "bnd.json", |x, y| vec![0.4 * x, 0.5 * y]);
    let out = mgl(&["solve", "--boundary", boundary.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.starts_with("iteration,graph_volume\n"));
    assert!(text.lines().count() >= 2);
}

#[test]
fn homotopy_reports_and_trace_csv_are_deterministic() {
    let dir = work_dir("homotopy");
    let (p0, p1) = gentle_pair(&dir);
    let json_out = mgl(&[
        "homotopy", "--input", p0.to_str().unwrap(), "--input", p1.to_str().unwrap(),
        "--t-samples", "5",
    ]);
    assert!(json_out.status.success());
    let report = json_of(&json_out);
    assert_eq!(report["confinement"]["status"], "confined");
    assert_eq!(report["confinement"]["violation_count"], 0);
    assert_eq!(report["chord_domination"].as_array().unwrap().len(), 2);
    assert!(report["chord_domination"][1]["worst_excess"].as_f64().unwrap() <= 1e-9);
    assert_eq!(report["energy_convexity"].as_array().unwrap().len(), 2);

    let csv_args = [
        "homotopy", "--input", p0.to_str().unwrap(), "--input", p1.to_str().unwrap(),
        "--t-samples", "5", "--format", "csv",
    ];
    let a = mgl(&csv_args);
    let b = mgl(&csv_args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout_of(&a).starts_with("node_i,node_j,t,lambda_sq_1"));
}

#[test]
fn homotopy_svg_mode_writes_node_plots_a_sidecar_csv_and_nothing_on_error() {
    let dir = work_dir("homotopy_svg");
    let (p0, p1) = gentle_pair(&dir);
    let out_base = dir.join("trace.svg");
    let ok = mgl(&[
        "homotopy", "--input", p0.to_str().unwrap(), "--input", p1.to_str().unwrap(),
        "--t-samples", "5", "--node", "4,4", "--node", "2,6",
        "--output", out_base.to_str().unwrap(),
    ]);
    assert!(ok.status.success(), "{}", stderr_of(&ok));
    for name in ["trace_node_4_4.svg", "trace_node_2_6.svg", "trace_area.svg"] {
        let text = std::fs::read_to_string(dir.join(name)).unwrap();
        assert!(text.starts_with("<svg "), "{name} is an svg document");
        assert!(text.contains("<polyline"));
    }
    assert!(std::fs::read_to_string(dir.join("trace.csv"))
        .unwrap()
        .starts_with("node_i,node_j,t"));

    let fresh = work_dir("homotopy_svg_bad");
    let bad = mgl(&[
        "homotopy", "--input", p0.to_str().unwrap(), "--input", p1.to_str().unwrap(),
        "--t-samples", "5", "--node", "99,99",
        "--output", fresh.join("trace.svg").to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(std::fs::read_dir(&fresh).unwrap().count(), 0, "no partial plot files");
}

#[test]
fn variation_svg_mode_is_deterministic_with_a_csv_sidecar() {
    let dir = work_dir("variation_svg");
    let (p0, p1) = gentle_pair(&dir);
    let out_base = dir.join("terms.svg");
    let args = [
        "variation", "--input", p0.to_str().unwrap(), "--input", p1.to_str().unwrap(),
        "--t-samples", "9", "--output", out_base.to_str().unwrap(),
    ];
    let first = mgl(&args);
    assert!(first.status.success(), "{}", stderr_of(&first));
    let svg_a = std::fs::read(&out_base).unwrap();
    let csv = std::fs::read_to_string(dir.join("terms.csv")).unwrap();
    assert!(csv.starts_with("t,area,dA,d2A_analytic,d2A_fd,term_i"));
    for label in ["term_i", "term_v", "total", "fd_total"] {
        assert!(String::from_utf8_lossy(&svg_a).contains(label));
    }

    let second = mgl(&args);
    assert!(second.status.success());
    assert_eq!(svg_a, std::fs::read(&out_base).unwrap());
}

#[test]
fn variation_json_pairs_samples_with_interior_reports() {
    let dir = work_dir("variation_json");
    let (p0, p1) = gentle_pair(&dir);
    let out = mgl(&[
        "variation", "--input", p0.to_str().unwrap(), "--input", p1.to_str().unwrap(),
        "--t-samples", "9",
    ]);
    assert!(out.status.success());
    let report = json_of(&out);
    assert_eq!(report["samples"].as_array().unwrap().len(), 9);
    assert_eq!(report["reports"].as_array().unwrap().len(), 7);
    for entry in report["reports"].as_array().unwrap() {
        assert!(entry["term_iii"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn uniqueness_concludes_unique_on_gentle_data_and_silent_on_steep_data() {
    let dir = work_dir("uniqueness");
    let gentle = boundary_file(&dir, "gentle.json", |x, y| {
        let bump = (std::f64::consts::PI * x).sin() * (std::f64::consts::PI * y).sin();
        vec![0.8 * x - 0.2 * y + 0.1 * bump, 0.3 * x + 0.7 * y]
    });
    let out = mgl(&[
        "uniqueness", "--boundary", gentle.to_str().unwrap(),
        "--region", "slope-sqrt3",
    ]);
    assert!(out.status.success());
    let report = json_of(&out);
    assert_eq!(report["conclusion"], "unique");
    assert_eq!(report["in_region"], serde_json::json!([true, true]));
    assert!(report["max_pair_distance"].as_f64().unwrap() < 1e-6);

    let steep = boundary_file(&dir, "steep.json", |x, y| vec![2.0 * x, 2.0 * y]);
    let out = mgl(&["uniqueness", "--boundary", steep.to_str().unwrap()]);
    assert!(out.status.success(), "out-of-region data is an outcome, not a failure");
    assert_eq!(json_of(&out)["conclusion"], "theorem_silent");
}

#[test]
fn uniqueness_json_is_byte_identical_for_a_fixed_seed() {
    let dir = work_dir("uniqueness_seeded");
    let boundary = boundary_file(&dir, "bnd.json", |x, y| vec![0.5 * x + 0.1 * y, 0.6 * y]);
    let args = [
        "uniqueness", "--boundary", boundary.to_str().unwrap(), "--seed", "11",
    ];
    let a = mgl(&args);
    let b = mgl(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
