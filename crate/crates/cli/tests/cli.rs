use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use quasitile::document::TilingDocument;
use quasitile::tiling::MARGIN;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasitile")).args(args).env_remove("QUASITILE_THREADS").output().unwrap()
}

fn ok(args: &[&str]) -> Value {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn load(p: &str) -> TilingDocument {
    TilingDocument::decode(&std::fs::read(p).unwrap()).unwrap()
}

#[test]
fn generated_p4_census_has_the_p4_environments() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(dir.path(), "a.json"), path(dir.path(), "b.json"));
    ok(&["generate", "--family", "p4", "--radius", "50", "--out", &a]);
    let s = ok(&["classify", &a, "--out", &b]);
    let envs: Vec<String> = s["census"]["environments"].as_object().unwrap().keys().cloned().collect();
    assert_eq!(envs, ["D", "J", "K", "Q", "S1", "S2", "U", "W"]);
    let d = load(&b);
    assert!(d.annotations.is_some());
    assert_eq!(d.provenance.generator, "generate");
}

#[test]
fn tau_derivation_matches_direct_generation() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (path(dir.path(), "a.json"), path(dir.path(), "b.json"), path(dir.path(), "c.json"));
    ok(&["generate", "--family", "p4", "--radius", "30", "--out", &a]);
    let s = ok(&["derive", &a, "--to", "p3-tau", "--out", &b]);
    assert_eq!(s["matches_direct_generation"], true);
    let radius = s["radius"].as_f64().unwrap().to_string();
    ok(&["generate", "--family", "p3", "--windows", "p3-tau", "--radius", &radius, "--out", &c]);
    let (x, y) = (load(&b).to_tiling().unwrap(), load(&c).to_tiling().unwrap());
    assert_eq!(x.interior_vertices(MARGIN), y.interior_vertices(MARGIN));
    ok(&["derive", &a, "--to", "p1", "--out", &c]);
}

#[test]
fn transforms_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (path(dir.path(), "a.json"), path(dir.path(), "b.json"), path(dir.path(), "c.json"));
    ok(&["generate", "--family", "p4", "--radius", "25", "--scale-exp", "1", "--out", &a]);
    let s = ok(&["deflate", &a, "--out", &b]);
    assert_eq!(s["scale_exp"], 0);
    let s = ok(&["inflate", &b, "--out", &c]);
    assert_eq!(s["scale_exp"], 1);
    let (x, y) = (load(&a).to_tiling().unwrap(), load(&c).to_tiling().unwrap());
    let m = MARGIN + 2.0;
    let inner: Vec<_> = x.vertices.iter().filter(|v| y.is_interior(v, m)).copied().collect();
    assert_eq!(inner, y.interior_vertices(m));
}

#[test]
fn grid_and_render_layers() {
    let dir = tempfile::tempdir().unwrap();
    let (a, g, svg) = (path(dir.path(), "a.json"), path(dir.path(), "g.json"), path(dir.path(), "a.svg"));
    ok(&["generate", "--family", "p4", "--radius", "35", "--out", &a]);
    let o = run(&["render", &a, "--layers", "faces,dual", "--out", &svg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`grid`"));
    let s = ok(&["grid", &a, "--ammann", "--active", "--out", &g]);
    for f in s["dual"].as_array().unwrap() {
        assert_eq!(f["gaps"].as_array().unwrap().len(), 3, "{f}");
    }
    assert!(s["ammann"].as_array().unwrap().iter().all(|f| f["fibonacci"] == true));
    ok(&["render", &g, "--layers", "faces,p1,dual,ammann,folded", "--out", &svg]);
    let text = std::fs::read_to_string(&svg).unwrap();
    for id in ["faces", "p1", "dual", "active", "ammann", "folded"] {
        assert!(text.contains(&format!("<g id=\"{id}\"")), "{id}");
    }
    assert!(text.contains("stroke-dasharray"));
}

#[test]
fn style_files_are_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let (a, st, svg) = (path(dir.path(), "a.json"), path(dir.path(), "s.json"), path(dir.path(), "a.svg"));
    ok(&["generate", "--family", "p3", "--radius", "8", "--out", &a]);
    std::fs::write(&st, r##"{"thick_fill": "#123456", "overlays": {"faces": true}}"##).unwrap();
    ok(&["render", &a, "--style", &st, "--out", &svg]);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("#123456"));
}

#[test]
fn output_bytes_do_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let outs: Vec<PathBuf> = (1..=2)
        .map(|n| {
            let p = dir.path().join(format!("g{n}.json"));
            let a = path(dir.path(), &format!("a{n}.json"));
            let t = n.to_string();
            ok(&["--threads", &t, "generate", "--family", "p4", "--radius", "30", "--out", &a]);
            ok(&["--threads", &t, "grid", &a, "--active", "--ammann", "--out", p.to_str().unwrap()]);
            p
        })
        .collect();
    assert_eq!(std::fs::read(&outs[0]).unwrap(), std::fs::read(&outs[1]).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "a.json");
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["generate", "--family", "p5", "--radius", "3", "--out", &a]).status.code(), Some(1));
    let o = run(&["generate", "--family", "p3", "--radius", "10", "--offset", "0,0", "--out", &a]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("singular"));
    std::fs::write(&a, "{\"schema_version\": 2}").unwrap();
    let o = run(&["classify", &a, "--out", &a]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema_version 2"));
    ok(&["generate", "--family", "p3", "--radius", "20", "--offset", "-1/3,2/7", "--out", &a]);
    let o = run(&["grid", &a, "--out", &a]);
    assert_eq!(o.status.code(), Some(1), "dual grids are for P4 only");
}

#[test]
fn hyper_desk_preset_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (j, c, p) = (path(dir.path(), "h.json"), path(dir.path(), "h.csv"), path(dir.path(), "h.svg"));
    let s = ok(&["--seed", "3", "hyper", "--preset", "desk", "--family", "p4", "--check", "--out", &j, "--csv", &c, "--plot", &p]);
    assert_eq!(s["within_tolerance"], true, "{s}");
    let v: Value = serde_json::from_slice(&std::fs::read(&j).unwrap()).unwrap();
    for k in ["radii", "sigma2", "lambda", "gamma", "B", "C", "rho", "phi", "normalized_B"] {
        assert!(!v[k].is_null(), "{k}");
    }
    let csv = std::fs::read_to_string(&c).unwrap();
    assert_eq!(csv.lines().count(), v["radii"].as_array().unwrap().len() + 1);
    assert!(std::fs::read_to_string(&p).unwrap().contains("Γ(R)"));
}
