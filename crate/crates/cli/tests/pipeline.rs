use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_segforms");

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(rel)
}

fn segforms(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = segforms(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
}

fn snapshot(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    files
}

fn write_config(dir: &Path) {
    let corpus = fixture("extraction/corpus.csv");
    let text = format!(
        "[paths]\ncorpus = {:?}\nout = \"out\"\nvalidated_list = \"forms.txt\"\n\n[seeds]\nlouvain = 7\nslm = 7\n",
        corpus.display().to_string()
    );
    fs::write(dir.join("segforms.toml"), text).unwrap();
}

#[test]
fn extract_reproduces_the_golden_table() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path());
    ok(dir.path(), &["-c", "segforms.toml", "ingest"]);
    ok(dir.path(), &["-c", "segforms.toml", "extract"]);
    let got = fs::read(dir.path().join("out/candidates.csv")).unwrap();
    assert_eq!(got, fs::read(fixture("extraction/golden.csv")).unwrap());
}

#[test]
fn missing_upstream_names_the_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = segforms(dir.path(), &["metrics"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("segforms extract"), "{err}");

    let out = segforms(dir.path(), &["ingest"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("paths.corpus"));
}

#[test]
fn bad_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "[thresholds]\ntop_k = \"many\"\n").unwrap();
    let out = segforms(dir.path(), &["-c", "bad.toml", "extract"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("thresholds.top_k"));

    fs::write(dir.path().join("zero.toml"), "[thresholds]\nmin_cocitations = 0\n").unwrap();
    let out = segforms(dir.path(), &["-c", "zero.toml", "extract"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("thresholds.min_cocitations"));

    // flags win over the file
    let out = segforms(dir.path(), &["-c", "zero.toml", "--min-cocitations", "3", "extract"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("segforms ingest"));
}

#[test]
fn full_pipeline_is_idempotent_and_leaves_inputs_alone() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_config(d);
    let golden = fs::read_to_string(fixture("extraction/golden.csv")).unwrap();
    let terms: Vec<&str> = golden.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    fs::write(d.join("forms.txt"), terms.join("\n")).unwrap();
    let corpus_before = fs::read(fixture("extraction/corpus.csv")).unwrap();

    let steps: [&[&str]; 8] = [
        &["ingest"],
        &["extract"],
        &["code", "export"],
        &["metrics"],
        &["conet"],
        &["schol"],
        &["ontology", "--n-clusters", "4"],
        &["export"],
    ];
    let run_all = || {
        for step in steps {
            let mut args = vec!["-c", "segforms.toml"];
            args.extend_from_slice(step);
            ok(d, &args);
        }
    };
    ok(d, &["-c", "segforms.toml", "ingest"]);
    ok(d, &["-c", "segforms.toml", "extract"]);
    ok(d, &["-c", "segforms.toml", "code", "import-validated"]);
    run_all();
    let first = snapshot(&d.join("out"));
    run_all();
    let second = snapshot(&d.join("out"));
    assert_eq!(first.keys().collect::<Vec<_>>(), second.keys().collect::<Vec<_>>());
    for (path, bytes) in &first {
        assert!(second[path] == *bytes, "{} changed between runs", path.display());
    }
    assert_eq!(fs::read(fixture("extraction/corpus.csv")).unwrap(), corpus_before);

    let forms = String::from_utf8(first[Path::new("export/forms.csv")].clone()).unwrap();
    assert_eq!(forms.lines().count(), 21);
    assert!(forms.starts_with("form,first_year,first_countries,n_publications\n"));
    let manifest: serde_json::Value = serde_json::from_slice(&first[Path::new("runs/conet.json")]).unwrap();
    assert_eq!(manifest["config"]["seeds"]["louvain"], 7);
    assert!(manifest["inputs"].as_array().unwrap().iter().all(|i| i["sha256"].as_str().unwrap().len() == 64));
    let clusters = String::from_utf8(first[Path::new("ontology/clusters.csv")].clone()).unwrap();
    assert_eq!(clusters.lines().count(), 21);
}

#[test]
fn coding_through_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_config(d);
    ok(d, &["-c", "segforms.toml", "ingest"]);
    ok(d, &["-c", "segforms.toml", "extract"]);
    let cfg = ["-c", "segforms.toml", "code"];
    let decide = |term: &str, coder: &str, verdict: &str| {
        let mut a = cfg.to_vec();
        a.extend(["decide", "--term", term, "--coder", coder, "--verdict", verdict]);
        ok(d, &a);
    };
    decide("gender segregation", "ana", "valid");
    decide("gender segregation", "ben", "valid");
    decide("school segregation", "ana", "valid");
    decide("school segregation", "ben", "invalid");

    let mut a = cfg.to_vec();
    a.push("resolve");
    let out = segforms(d, &a);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("school segregation"));
    a.extend(["--invalid", "school segregation", "--note", "not a form"]);
    ok(d, &a);

    let mut a = cfg.to_vec();
    a.push("stats");
    let out = segforms(d, &a);
    let progress: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(progress["codebook_version"], 2);
    assert_eq!(progress["consensus"]["valid"], 1);
    assert_eq!(progress["consensus"]["invalid"], 1);

    let mut a = cfg.to_vec();
    a.push("export");
    ok(d, &a);
    let forms = fs::read_to_string(d.join("out/forms.csv")).unwrap();
    assert_eq!(forms.lines().collect::<Vec<_>>(), ["form,first_year,first_countries,n_publications", "gender segregation,1985,United Kingdom,3"]);
    assert_eq!(fs::read_to_string(d.join("out/journal.jsonl")).unwrap().lines().count(), 6);
}
