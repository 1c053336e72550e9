use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_prc-bounds");

fn run(args: &[&str], cache: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .env("PRC_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn zero_rate_gives_single_epsilon_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["run", "--lambda", "0", "--spec", "4,10", "--no-cache"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let r = rows(&text);
    assert_eq!(r.len(), 2);
    assert_eq!(r[0][4], "upper9");
    assert_eq!(r[1][4], "envelope");
    let v: f64 = r[0][9].parse().unwrap();
    assert!((v - 0.005 / 4.0).abs() < 1e-15);
}

#[test]
fn row_cardinality_and_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["run", "--lambda", "0.5,1.0", "--spec", "3,2,8", "--bounds", "upper15,lower23"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(
        "lambda,L,Rbar,Rm,bound_kind,Ps,P_B1,f_lo,f_hi,value,value_clamped,H_S,H_V,converged,cached,wall_s\n"
    ));
    let r = rows(&text);
    let kinds: Vec<&str> = r.iter().map(|row| row[4].as_str()).collect();
    assert_eq!(
        kinds,
        ["upper15", "lower23", "envelope", "upper15", "lower23", "envelope"]
    );
    for row in &r {
        assert_eq!(row.len(), 16);
        assert_eq!(&row[1..4], ["3", "2", "8"]);
    }
    let lower: f64 = r[1][9].parse().unwrap();
    let clamped: f64 = r[1][10].parse().unwrap();
    assert_eq!(clamped, lower.max(0.0));
}

#[test]
fn warm_cache_reproduces_values() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let cache = dir.path().join("cache");
    let args = |out: &Path| {
        vec![
            "run".to_string(),
            "--lambda".into(),
            "0.6,1.2".into(),
            "--spec".into(),
            "4,3,10".into(),
            "--bounds".into(),
            "upper15,lower23".into(),
            "--cache-dir".into(),
            cache.display().to_string(),
            "--out".into(),
            out.display().to_string(),
        ]
    };
    for out in [&out_a, &out_b] {
        let status = Command::new(BIN).args(args(out)).status().unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = rows(&fs::read_to_string(&out_a).unwrap());
    let b = rows(&fs::read_to_string(&out_b).unwrap());
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x[..14], y[..14]);
        assert_eq!(x[14], "false");
        assert_eq!(y[14], "true");
    }

    let listing = run(&["cache-inspect", "--cache-dir", cache.to_str().unwrap()], &cache);
    assert_eq!(listing.status.code(), Some(0));
    let text = String::from_utf8(listing.stdout).unwrap();
    let entries: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(entries.len(), 2);
    assert!(entries.iter().all(|e| e.ends_with("\ttrue")));
}

#[test]
fn cache_inspect_empty_and_corrupt() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    fs::create_dir(&cache).unwrap();
    let listing = run(&["cache-inspect"], &cache);
    assert_eq!(listing.status.code(), Some(0));
    assert_eq!(String::from_utf8(listing.stdout).unwrap().lines().count(), 1);

    let out = run(&["run", "--lambda", "0.9", "--spec", "3,8"], &cache);
    assert_eq!(out.status.code(), Some(0));
    let file = fs::read_dir(&cache).unwrap().next().unwrap().unwrap().path();
    let mut bytes = fs::read(&file).unwrap();
    let last = bytes.len() - 3;
    bytes[last] ^= 0x40;
    fs::write(&file, &bytes).unwrap();

    let listing = run(&["cache-inspect"], &cache);
    let text = String::from_utf8(listing.stdout).unwrap();
    let entry = text.lines().nth(1).unwrap();
    assert!(entry.contains("\tfalse"), "{entry}");
    assert!(file.exists());

    // a corrupt entry is rebuilt rather than trusted
    let again = run(&["run", "--lambda", "0.9", "--spec", "3,8"], &cache);
    assert_eq!(again.status.code(), Some(0));
    let first = rows(&String::from_utf8(out.stdout).unwrap());
    let rebuilt = rows(&String::from_utf8(again.stdout).unwrap());
    for (x, y) in first.iter().zip(&rebuilt) {
        assert_eq!(x[..14], y[..14]);
        assert_eq!(y[14], "false");
    }
    let listing = run(&["cache-inspect"], &cache);
    assert!(String::from_utf8(listing.stdout).unwrap().lines().nth(1).unwrap().ends_with("\ttrue"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = run(&["run", "--lambda", "-1", "--spec", "2,4"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    let bad = run(&["run", "--lambda", "1", "--spec", "2,4", "--epsilon", "0"], dir.path());
    assert_eq!(bad.status.code(), Some(1));

    let partial = run(
        &["run", "--lambda", "1", "--spec", "2,4", "--spec", "6,24", "--mem-budget", "4096", "--no-cache"],
        dir.path(),
    );
    assert_eq!(partial.status.code(), Some(2));
    let r = rows(&String::from_utf8(partial.stdout).unwrap());
    let failed: Vec<_> = r.iter().filter(|row| row[13] == "error").collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0][9], "NaN");
    assert_eq!(r.iter().filter(|row| row[4] == "envelope").count(), 1);
}

#[test]
fn config_file_with_flag_override_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(
        &cfg,
        "lambda-range = 0.5:1.5:0.5\nspec = 2,6\nbounds = upper9\nformat = json\nno-cache = true\n",
    )
    .unwrap();
    let out = run(
        &["run", "--config", cfg.to_str().unwrap(), "--lambda", "0.7"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let records = doc["records"].as_array().unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0]["lambda"], 0.7);
    assert_eq!(records[0]["bound_kind"], "upper9");
    assert_eq!(records[0]["Rbar"], serde_json::Value::Null);
    assert_eq!(records[1]["bound_kind"], "envelope");
}

#[test]
fn reference_comparison_file() {
    let dir = tempfile::tempdir().unwrap();
    let reference = dir.path().join("ref.csv");
    fs::write(&reference, "lambda,value,source\n0.5,0.9,UB\n1.5,0.95,UB\n").unwrap();
    let out = dir.path().join("fig.csv");
    let status = Command::new(BIN)
        .args(["run", "--lambda", "1.0", "--spec", "3,9", "--no-cache", "--reference-csv"])
        .arg(&reference)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let cmp = fs::read_to_string(dir.path().join("fig.compare.csv")).unwrap();
    let mut lines = cmp.lines();
    assert_eq!(lines.next(), Some("lambda,source,computed,reference,improvement_pct"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[1], "UB");
    assert!((row[3].parse::<f64>().unwrap() - 0.925).abs() < 1e-12);
    assert!(row[4].parse::<f64>().unwrap() > 0.0);
}
