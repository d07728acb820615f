use std::f64::consts::PI;
use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use triangle_cover::closed_forms;

fn tricover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tricover"))
        .args(args)
        .output()
        .expect("run tricover")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--output", "json"]);
    let out = tricover(&all);
    assert!(out.status.success(), "{}", stderr(&out));
    serde_json::from_str(&stdout(&out)).unwrap()
}

fn text_field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
        .to_string()
}

#[test]
fn compute_limacon() {
    let out = tricover(&["compute", "--region", "limacon:a=2", "--anchor", "origin"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value: f64 = text_field(&text, "value").parse().unwrap();
    assert!((value - (0.25 - 272.0 / (243.0 * PI * PI))).abs() < 1e-8);
    assert_eq!(text_field(&text, "method"), "quadrature_eq15");
}

#[test]
fn compute_methods_agree() {
    let mut values = Vec::new();
    for method in ["eq15", "eq12", "eq14", "double-integral"] {
        let v = json(&["compute", "--region", "crescent", "--anchor", "origin", "--method", method, "--u", "1.3"]);
        values.push(v["result"]["value"].as_f64().unwrap());
    }
    let want = (4.0 * PI * PI - 5.0) / (18.0 * PI * PI);
    for v in values {
        assert!((v - want).abs() < 1e-6, "{v}");
    }
}

#[test]
fn closed_form_slice_disk() {
    let out = tricover(&["closed-form", "slice-disk", "--a", "0.25"]);
    assert!(out.status.success());
    let v: f64 = text_field(&stdout(&out), "value").parse().unwrap();
    assert!((v - 5.0 / 27.0).abs() < 1e-12);
    assert_eq!(text_field(&stdout(&out), "method"), "closed_form");
}

#[test]
fn closed_form_families() {
    for (args, want) in [
        (vec!["limacon", "--a", "1"], 0.25 - 20.0 / (9.0 * PI * PI)),
        (vec!["regular-polygon", "--m", "2"], 0.24982224),
        (vec!["triangle", "--alpha", "0.5", "--beta", "0.25", "--gamma", "0.25"], closed_forms::triangle_probability(
            closed_forms::BarycentricPoint::new(0.5, 0.25, 0.25).unwrap(),
        ).unwrap()),
        (vec!["square", "--u", "0.5", "--v", "0.25"], 5.0 / 48.0 + 9.0 * 3f64.ln() / 256.0),
        (vec!["square-diagonal", "--u", "0.5"], 0.25),
        (vec!["offset-disk", "--r", "0.5"], 0.1250),
    ] {
        let mut a = vec!["closed-form"];
        a.extend(args.iter().copied());
        let v = json(&a)["result"]["value"].as_f64().unwrap();
        assert!((v - want).abs() < 5e-4, "{args:?}: {v} vs {want}");
    }
    let missing = tricover(&["closed-form", "limacon"]);
    assert_eq!(missing.status.code(), Some(2));
    let unknown = tricover(&["closed-form", "heptagon"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn simulate_square_example() {
    let out = tricover(&["simulate", "--region", "square", "--anchor", "0.3333", "0.3333", "--n", "1000000", "--seed", "42"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let p: f64 = text_field(&text, "p_hat").parse().unwrap();
    let se: f64 = text_field(&text, "std_err").parse().unwrap();
    let exact = closed_forms::square_probability(0.3333, 0.3333).unwrap();
    assert!((p - exact).abs() < 4.0 * se, "{p} ± {se} vs {exact}");
    assert!((se - 0.00037).abs() < 0.00001);
    assert_eq!(text_field(&text, "seed"), "42");
}

#[test]
fn too_few_samples_is_a_domain_error() {
    let out = tricover(&["simulate", "--region", "disk", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

fn replay_matches(args: &[&str]) {
    let dir = tempfile::tempdir().unwrap();
    let mut all = args.to_vec();
    all.extend(["--output", "json"]);
    let first = tricover(&all);
    assert!(first.status.success(), "{}", stderr(&first));
    let path = dir.path().join("report.json");
    std::fs::write(&path, &first.stdout).unwrap();
    let second = tricover(&["replay", path.to_str().unwrap()]);
    assert!(second.status.success(), "{}", stderr(&second));
    assert_eq!(stdout(&first), stdout(&second), "replay of {args:?}");
}

#[test]
fn json_reports_replay_exactly() {
    replay_matches(&["compute", "--region", "limacon:a=3", "--anchor", "0.1", "-0.05"]);
    replay_matches(&["compute", "--region", "square", "--anchor", "0.2", "0.7", "--method", "eq12", "--u", "2.5"]);
    replay_matches(&["simulate", "--region", "crescent", "--anchor", "origin", "--n", "50000", "--seed", "9"]);
    replay_matches(&["closed-form", "triangle", "--alpha", "0.2", "--beta", "0.3", "--gamma", "0.5"]);
    replay_matches(&["sweep", "slice-disk", "--grid", "0,0.25", "--mc-samples", "20000", "--seed", "5"]);
    replay_matches(&["bounds", "--region", "triangle"]);
}

#[test]
fn region_file_is_embedded_for_replay() {
    let dir = tempfile::tempdir().unwrap();
    let region = dir.path().join("kite.toml");
    std::fs::write(&region, "kind = \"polygon\"\nvertices = [0, 0, 2, 1, 0, 3, -2, 1]\nanchor = [0, 1.2]\n").unwrap();
    let first = tricover(&["compute", "--region", region.to_str().unwrap(), "--output", "json"]);
    assert!(first.status.success(), "{}", stderr(&first));
    let report: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(report["result"]["anchor"]["y"].as_f64(), Some(1.2));
    assert!(report["config"]["region_source"].as_str().unwrap().contains("kind = \"polygon\""));
    let saved = dir.path().join("report.json");
    std::fs::write(&saved, &first.stdout).unwrap();
    std::fs::remove_file(&region).unwrap();
    let second = tricover(&["replay", saved.to_str().unwrap()]);
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn text_and_json_report_the_same_numbers() {
    let args = ["compute", "--region", "offset-disk:r=0.5"];
    let text = stdout(&tricover(&args));
    let j = json(&args);
    for key in ["value", "error_estimate"] {
        let t: f64 = text_field(&text, key).parse().unwrap();
        let v = j["result"][key].as_f64().unwrap();
        assert_eq!(format!("{:.11e}", t), format!("{:.11e}", v), "{key}");
    }
    let args = ["bounds", "--region", "triangle"];
    let text = stdout(&tricover(&args));
    let j = json(&args);
    for key in ["h", "lower", "p", "upper"] {
        let t: f64 = text_field(&text, key).parse().unwrap();
        let v = j["result"][key].as_f64().unwrap();
        assert!((t - v).abs() <= 1e-11 * v.abs(), "{key}: {t} vs {v}");
    }
}

#[test]
fn sweep_csv_layout() {
    let out = tricover(&["sweep", "limacon", "--grid", "1,1.5,2,3,10,0.5", "--output", "csv"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("warning: skipping limacon parameter 0.5"));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["family", "parameter", "p_closed_form", "p_quadrature", "p_mc", "mc_std_err", "n", "seed"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 5);
    let closed: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(closed.windows(2).all(|w| w[0] < w[1] && w[1] < 0.25));
    for r in &rows {
        let (c, q): (f64, f64) = (r[2].parse().unwrap(), r[3].parse().unwrap());
        assert!((c - q).abs() < 1e-7);
        assert!(r[4].is_empty() && r[5].is_empty() && r[6].is_empty() && r[7].is_empty());
    }
}

#[test]
fn sweep_with_monte_carlo_columns() {
    let out = tricover(&["sweep", "offset-disk", "--grid", "0,0.25,0.5,0.75", "--mc-samples", "200000", "--seed", "1", "--output", "csv"]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!((&rows[0][1], &rows[0][2], &rows[0][3]), ("0.0", "0.25", "0.25"));
    let half: f64 = rows[2][2].parse().unwrap();
    assert!((half - 0.1250).abs() < 5e-4);
    for r in &rows {
        let (q, mc, se): (f64, f64, f64) = (r[3].parse().unwrap(), r[4].parse().unwrap(), r[5].parse().unwrap());
        assert!((q - mc).abs() <= 4.0 * se, "{r:?}");
        assert_eq!(&r[6], "200000");
        assert_eq!(&r[7], "1");
    }
}

#[test]
fn sweep_regular_polygons() {
    let j = json(&["sweep", "regular-polygon", "--grid", "1,2,3"]);
    let rows = j["result"]["rows"].as_array().unwrap();
    let first = rows[0]["p_closed_form"].as_f64().unwrap();
    assert!((first - 0.2452215261).abs() < 1e-10);
    let second = rows[1]["p_quadrature"].as_f64().unwrap();
    assert!((second - 0.24982224).abs() < 1e-6);
    assert!(rows[0]["p_mc"].is_null());
}

#[test]
fn exit_codes() {
    // Domain problems: bad parameters, anchors outside, malformed files.
    assert_eq!(tricover(&["compute", "--region", "limacon:a=0.5"]).status.code(), Some(2));
    assert_eq!(tricover(&["compute", "--region", "square", "--anchor", "2", "2"]).status.code(), Some(2));
    assert_eq!(tricover(&["compute", "--region", "square", "--tolerance", "-1"]).status.code(), Some(2));
    assert_eq!(tricover(&["compute", "--region", "missing-file.toml"]).status.code(), Some(2));
    assert_eq!(tricover(&["maximize", "--region", "disk", "--grid", "4"]).status.code(), Some(2));
    assert_eq!(tricover(&["frobnicate"]).status.code(), Some(2));
    // Numerical failure: a tolerance no quadrature can reach.
    let out = tricover(&["compute", "--region", "limacon:a=2", "--tolerance", "1e-300"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn malformed_region_file_names_line_and_field() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "kind = \"offset_disk\"\nr = 0.5\nradius = 1\n").unwrap();
    let out = tricover(&["compute", "--region", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3, field `radius`"), "{}", stderr(&out));
}

#[test]
fn bounds_maximize_and_sylvester() {
    let j = json(&["bounds", "--region", "triangle"]);
    let r = &j["result"];
    assert!((r["lower"].as_f64().unwrap() - 176.0 / 729.0).abs() < 1e-9);
    assert!((r["upper"].as_f64().unwrap() - 182.0 / 729.0).abs() < 1e-9);

    let j = json(&["maximize", "--region", "square", "--grid", "8", "--refine", "100"]);
    let r = &j["result"];
    assert!((r["p_max"].as_f64().unwrap() - 0.25).abs() < 1e-6);
    assert!((r["argmax"]["x"].as_f64().unwrap() - 0.5).abs() < 1e-3);
    assert!(!r["trace"].as_array().unwrap().is_empty());

    let j = json(&["sylvester", "--region", "disk", "--n", "400000", "--seed", "3"]);
    let r = &j["result"];
    let (p, se) = (r["p_hat"].as_f64().unwrap(), r["std_err"].as_f64().unwrap());
    assert!((p - 35.0 / (48.0 * PI * PI)).abs() < 4.0 * se);
    assert_eq!(r["nonconvex"].as_f64().unwrap(), 4.0 * p);
}
