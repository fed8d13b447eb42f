use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fracreach(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracreach")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn parse_rows(csv: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = csv.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_writes_ordered_rows_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("tube.csv");
    let o = fracreach(&["simulate", "--scenario", "cubic_a", "--uniform-T", "0.25", "-o", path_str(&csv)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = parse_rows(&fs::read_to_string(&csv).unwrap());
    assert_eq!(header, ["t_lo", "t_hi", "x1_lo", "x1_hi"]);
    assert_eq!(rows.len(), 4 * 16);
    for w in rows.windows(2) {
        assert_eq!(w[0][1], w[1][0]);
    }
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows.last().unwrap()[1], 1.0);
    for r in &rows {
        assert!(r[0] < r[1] && r[2] <= r[3]);
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("tube.json")).unwrap()).unwrap();
    assert_eq!(manifest["scenario"], "cubic_a");
    assert_eq!(manifest["slices"].as_array().unwrap().len(), 4);
    assert_eq!(manifest["rows"], 64);
}

#[test]
fn battery_tube_has_voltage_columns() {
    let o = fracreach(&["simulate", "--scenario", "battery_small", "--multi-horizon", "1,2", "--t-end", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = parse_rows(&stdout(&o));
    assert_eq!(header.len(), 2 + 2 * 3 + 2);
    assert_eq!(&header[8..], ["v_lo", "v_hi"]);
    for r in &rows {
        assert!(r[8] <= r[9] && r[8] > 3.0 && r[9] < 4.5, "{r:?}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let p = dir.path().join(name);
        let o =
            fracreach(&["simulate", "--scenario", "cubic_b", "--uniform-T", "0.5", "--mc", "20", "-o", path_str(&p)]);
        assert!(o.status.success());
        outputs.push(fs::read(&p).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn mlf_prints_enclosures() {
    let o = fracreach(&["mlf", "--nu", "1", "--z", "1"]);
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("enclosure")).unwrap();
    let (lo, hi) = line["enclosure [".len()..line.len() - 1].split_once(", ").unwrap();
    let (lo, hi): (f64, f64) = (lo.parse().unwrap(), hi.parse().unwrap());
    assert!(lo <= std::f64::consts::E && std::f64::consts::E <= hi);

    let o = fracreach(&["mlf", "--nu", "0.5", "--z", "-1", "--digits", "20"]);
    let text = stdout(&o);
    assert!(text.contains("oracle 0.4275835761558070044"), "{text}");
}

#[test]
fn oustaloup_sweep_row_count() {
    let o = fracreach(&["oustaloup", "--nu", "0.5", "--wb", "0.01", "--wh", "100", "--N", "5", "--sweep", "400"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 401);
    let o = fracreach(&["oustaloup", "--printed", "--sweep", "50"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 51);
}

#[test]
fn verify_reports_full_containment() {
    let o = fracreach(&["verify", "--scenario", "cubic_b"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("containment 200/200"), "{text}");
    assert!(text.contains("PASS"));
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "scenario = \"cubic_a\"\nt_end = \"soon\"\n").unwrap();
    let o = fracreach(&["simulate", "--config", path_str(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    fs::write(&cfg, "scenario = \"cubic_a\"\nhorizon = 3\n").unwrap();
    let o = fracreach(&["simulate", "--config", path_str(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("horizon"));

    let o = fracreach(&["simulate", "--scenario", "cubic_a", "--uniform-T", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "scenario = \"cubic_a\"\nt_end = 1.0\nsamples_per_slice = 4\n[slicing]\nuniform = 0.5\n").unwrap();
    let o = fracreach(&["simulate", "--config", path_str(&cfg)]);
    assert_eq!(parse_rows(&stdout(&o)).1.len(), 2 * 4);
    let o = fracreach(&["simulate", "--config", path_str(&cfg), "--uniform-T", "0.25", "--samples-per-slice", "2"]);
    let (_, rows) = parse_rows(&stdout(&o));
    assert_eq!(rows.len(), 4 * 2);
    assert_eq!(rows[1][1], 0.25);
}

#[test]
fn custom_linear_system_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("custom.toml");
    fs::write(
        &cfg,
        "scenario = \"custom\"\nt_end = 0.5\n[slicing]\nuniform = 0.25\n[custom]\nnu = [0.9, 0.9]\na = [[[-1.0, -1.0], [0.0, 0.0]], [[0.0, 0.0], [-2.0, -2.0]]]\nx0 = [[1.0, 1.0], [0.5, 0.5]]\n",
    )
    .unwrap();
    let o = fracreach(&["simulate", "--config", path_str(&cfg)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = parse_rows(&stdout(&o));
    assert_eq!(header.len(), 6);
    let last = rows.last().unwrap();
    assert!(last[2] > 0.0 && last[3] < 1.0 && last[4] > 0.0 && last[5] < 0.5);
}
