use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use crystile_core::io::{tiling_from_json, tiling_to_json};
use crystile_core::isometry::Frame;
use crystile_core::{ConvexPolytope, PeriodicTiling, QVector};
use serde_json::Value;
use tempfile::TempDir;

fn crystile(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crystile")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn golden(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn tiling(vertices: &[[i64; 2]]) -> PeriodicTiling {
    let tile = ConvexPolytope::from_vertices(vertices.iter().map(|v| QVector::from_ints(v)).collect()).unwrap();
    PeriodicTiling::new(Frame::standard(2), vec![tile]).unwrap()
}

fn write_fixtures(dir: &TempDir) -> (String, String) {
    let square = dir.path().join("square.json");
    let rhomb = dir.path().join("rhomb.json");
    fs::write(&square, tiling_to_json(&tiling(&[[0, 0], [1, 0], [0, 1], [1, 1]]))).unwrap();
    fs::write(&rhomb, tiling_to_json(&tiling(&[[0, 0], [1, 0], [2, 1], [1, 1]]))).unwrap();
    (square.display().to_string(), rhomb.display().to_string())
}

#[test]
fn construct_p1_has_trivial_point_group() {
    let dir = TempDir::new().unwrap();
    let t = dir.path().join("t.json");
    let svg = dir.path().join("t.svg");
    let out = crystile(&["construct", "--group", "p1", "--seed", "0", "--out", t.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let reloaded = tiling_from_json(&fs::read_to_string(&t).unwrap()).unwrap();
    reloaded.validate().unwrap();
    let picture = fs::read_to_string(&svg).unwrap();
    assert!(picture.contains("<path class=\"prototile-0\""));

    let aut = crystile(&["aut", t.to_str().unwrap()]);
    assert_eq!(aut.status.code(), Some(0));
    assert_eq!(json(&aut)["order"], 1);
}

#[test]
fn square_and_rhomb_are_only_translation_mld() {
    let dir = TempDir::new().unwrap();
    let (square, rhomb) = write_fixtures(&dir);
    let out = crystile(&["mld", &square, &rhomb]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out), serde_json::json!({ "gamma": null, "translation_mld": true }));

    let ld = crystile(&["ld", &rhomb, &square]);
    assert_eq!(json(&ld)["holds"], true);
    assert_eq!(json(&ld)["radius2"], "1/2");
}

#[test]
fn shear_group_is_rejected() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.json");
    fs::write(&g, r#"{"dim": 2, "gram": [[1, 0], [0, 1]], "reps": [{"linear": [[1, 0], [0, 1]], "translation": [0, 0]}, {"linear": [[1, 1], [0, 1]], "translation": [0, 0]}]}"#).unwrap();
    let out = crystile(&["validate-group", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let report = json(&out);
    assert_eq!(report["valid"], false);
    assert!(!report["violations"].as_array().unwrap().is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(crystile(&["aut", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(crystile(&["aut", dir.path().join("missing.json").to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(crystile(&["construct", "--group", "no-such-group"]).status.code(), Some(2));
    assert_eq!(crystile(&["orbit", "--group", "p4", "--point", "1/3"]).status.code(), Some(2));
    // The origin is fixed by the rotations of p4m, so its orbit is not a Delone set with one site per coset.
    assert_eq!(crystile(&["voronoi", "--group", "p4m", "--point", "0,0"]).status.code(), Some(1));
    assert_eq!(crystile(&["preset-list"]).status.code(), Some(0));
}

#[test]
fn output_is_byte_identical() {
    for args in [
        &["construct", "--group", "p4g", "--seed", "3"][..],
        &["voronoi", "--group", "p3m1", "--seed", "1"],
        &["orbit", "--group", "p6", "--point", "1/7,2/9", "--radius2", "3"],
    ] {
        let (a, b) = (crystile(args), crystile(args));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn golden_outputs() {
    let preset = crystile(&["preset-list", "--group", "p4"]);
    assert_eq!(String::from_utf8(preset.stdout).unwrap(), golden("preset_p4.json"));
    let construct = crystile(&["construct", "--group", "p2", "--seed", "0"]);
    assert_eq!(String::from_utf8(construct.stdout).unwrap(), golden("construct_p2_seed0.json"));
    let orbit = crystile(&["orbit", "--group", "p3", "--point", "1/5,1/7", "--radius2", "2"]);
    assert_eq!(String::from_utf8(orbit.stdout).unwrap(), golden("orbit_p3.json"));
}

#[test]
fn emitted_tilings_reload_and_validate() {
    let dir = TempDir::new().unwrap();
    for (verb, group) in [("voronoi", "cmm"), ("construct", "pg"), ("voronoi", "P-1"), ("construct", "P222")] {
        let path = dir.path().join(format!("{verb}-{group}.json"));
        let out = crystile(&[verb, "--group", group, "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{verb} {group}: {}", String::from_utf8_lossy(&out.stderr));
        let t = tiling_from_json(&fs::read_to_string(&path).unwrap()).unwrap();
        t.validate().unwrap();
        let aut = crystile(&["aut", path.to_str().unwrap()]);
        assert!(aut.status.success());
    }
}

#[test]
fn distance_of_a_shift() {
    let dir = TempDir::new().unwrap();
    let (square, _) = write_fixtures(&dir);
    let shifted = dir.path().join("shifted.json");
    let t = tiling_from_json(&fs::read_to_string(&square).unwrap()).unwrap();
    fs::write(&shifted, tiling_to_json(&t.translate(&QVector::from_fracs(&[(3, 50), (4, 50)])))).unwrap();
    let out = crystile(&["distance", &square, shifted.to_str().unwrap()]);
    assert!(out.status.success());
    let upper = json(&out)["upper"].as_f64().unwrap();
    assert!(upper <= 0.1f64.ln_1p() + 1e-9, "{upper}");
}

#[test]
fn render_writes_one_path_per_tile() {
    let dir = TempDir::new().unwrap();
    let (square, _) = write_fixtures(&dir);
    let out = crystile(&["render", &square, "--window", "0", "0", "2", "2"]);
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(svg.matches("<path ").count() >= 4);
}
