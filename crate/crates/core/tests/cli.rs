mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use relsim::{ingest, synth};

fn relsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relsim"))
        .args(args)
        .env_remove("RELSIM_WORKERS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn inspect_tree_prints_figure_levels() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "fig.txt", common::FIGURE);
    let o = relsim(&["inspect-tree", s(&data), "--vertex", "A", "--depth", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "tree A depth 1\nlevel 1\nvertex B 1\nvertex C 1\nvertex D 2\nedge F,1 1\nedge R,1 2\n\
         attr object.Attr1 Y 1\nattr object.Attr2 4 1\n"
    );

    assert_eq!(
        relsim(&["inspect-tree", s(&data), "--vertex", "Z"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        relsim(&["inspect-tree", s(&data), "--vertex", "A", "--depth", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn distances_defaults_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "fig.txt", common::FIGURE);
    let out = dir.path().join("m.csv");
    let o = relsim(&["distances", s(&data), "--output", s(&out)]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let m = ingest::parse_matrix(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(m.ids, vec!["A", "B"]);
    // stdout when no --output
    let o = relsim(&["distances", s(&data)]);
    assert_eq!(stdout(&o), std::fs::read_to_string(&out).unwrap());

    let bad_sum = relsim(&[
        "distances",
        s(&data),
        "--weights",
        "0.5",
        "0",
        "0",
        "0",
        "0",
    ]);
    assert_eq!(bad_sum.status.code(), Some(2));
    assert_eq!(
        relsim(&["distances", s(&data), "--depth", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        relsim(&["distances", s(&data), "--emit-components"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        relsim(&["distances", "/no/such/file"]).status.code(),
        Some(1)
    );

    let broken = write(
        dir.path(),
        "broken.txt",
        "vertex_type T\ntarget T\ne Nope a b\n",
    );
    let o = relsim(&["distances", s(&broken)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn projection_weights_reproduce_component_file() {
    let dir = tempfile::tempdir().unwrap();
    let ds = synth::attribute_classes(20, 2);
    let data = write(dir.path(), "d.txt", &ingest::write_dataset(&ds));
    let out = dir.path().join("m.csv");
    let o = relsim(&[
        "distances",
        s(&data),
        "--weights",
        "1",
        "0",
        "0",
        "0",
        "0",
        "--emit-components",
        "--output",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let matrix = std::fs::read(&out).unwrap();
    let ad = std::fs::read(dir.path().join("m.ad.csv")).unwrap();
    assert_eq!(matrix, ad);
    for c in ["nad", "cd", "nd", "ed"] {
        assert!(dir.path().join(format!("m.{c}.csv")).exists());
    }
}

#[test]
fn worker_count_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let ds = synth::connectivity_blocks(20, 0.3, 6);
    let data = write(dir.path(), "d.txt", &ingest::write_dataset(&ds));
    let a = dir.path().join("w1.csv");
    let b = dir.path().join("w8.csv");
    assert!(relsim(&[
        "distances",
        s(&data),
        "--depth",
        "2",
        "--workers",
        "1",
        "--output",
        s(&a)
    ])
    .status
    .success());
    let o = Command::new(env!("CARGO_BIN_EXE_relsim"))
        .args(["distances", s(&data), "--depth", "2", "--output", s(&b)])
        .env("RELSIM_WORKERS", "8")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn cluster_with_labels_reports_ari() {
    let dir = tempfile::tempdir().unwrap();
    let ds = synth::attribute_classes(30, 3);
    let data = write(dir.path(), "d.txt", &ingest::write_dataset(&ds));
    let matrix = dir.path().join("m.csv");
    assert!(relsim(&[
        "distances",
        s(&data),
        "--weights",
        "1",
        "0",
        "0",
        "0",
        "0",
        "--output",
        s(&matrix)
    ])
    .status
    .success());
    let report = dir.path().join("r.json");
    let assign = dir.path().join("a.txt");
    let o = relsim(&[
        "cluster",
        s(&matrix),
        "--k",
        "2",
        "--labels",
        s(&data),
        "--ari",
        "--report",
        s(&report),
        "--assignments",
        s(&assign),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["task"], "clustering");
    assert_eq!(r["values"][0], 1.0);
    assert_eq!(r["config"]["linkage"], "average");
    assert_eq!(
        std::fs::read_to_string(&assign).unwrap().lines().count(),
        30
    );

    let o = relsim(&[
        "cluster",
        s(&matrix),
        "--k",
        "2",
        "--method",
        "spectral",
        "--labels",
        s(&data),
        "--report",
        s(&report),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["values"][0], 1.0);

    assert_eq!(
        relsim(&["cluster", s(&matrix), "--k", "2", "--ari"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        relsim(&["cluster", s(&matrix), "--k", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        relsim(&["cluster", s(&matrix), "--k", "31"]).status.code(),
        Some(2)
    );
    let o = relsim(&[
        "cluster",
        s(&matrix),
        "--k",
        "2",
        "--method",
        "spectral",
        "--affinity",
        "gaussian",
        "--sigma",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

fn knn_values(args: &[&str]) -> Vec<f64> {
    let o = relsim(args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    r["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect()
}

#[test]
fn knn_no_tune_matches_single_point_grid() {
    let dir = tempfile::tempdir().unwrap();
    let ds = synth::connectivity_blocks(15, 0.2, 9);
    let data = write(dir.path(), "d.txt", &ingest::write_dataset(&ds));
    let plain = knn_values(&["knn", s(&data), "--no-tune", "--folds", "5", "--seed", "3"]);
    let grid = knn_values(&[
        "knn",
        s(&data),
        "--tune",
        "--grid",
        "0.2,0.2,0.2,0.2,0.2",
        "--folds",
        "5",
        "--seed",
        "3",
    ]);
    assert_eq!(plain, grid);
    assert_eq!(plain.len(), 5);

    let again = knn_values(&[
        "knn",
        s(&data),
        "--folds",
        "5",
        "--seed",
        "3",
        "--grid-step",
        "0.5",
    ]);
    let twice = knn_values(&[
        "knn",
        s(&data),
        "--folds",
        "5",
        "--seed",
        "3",
        "--grid-step",
        "0.5",
        "--workers",
        "1",
    ]);
    assert_eq!(again, twice);

    assert_eq!(
        relsim(&["knn", s(&data), "--k", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        relsim(&["knn", s(&data), "--grid-step", "0.3"])
            .status
            .code(),
        Some(2)
    );
    let unlabeled = write(
        dir.path(),
        "u.txt",
        &ingest::write_dataset(&synth::constant_degree(12, 2, 1)),
    );
    assert_eq!(relsim(&["knn", s(&unlabeled)]).status.code(), Some(1));
}
