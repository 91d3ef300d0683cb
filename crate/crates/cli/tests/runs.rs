use dirode_cli::{dispatch, parse_config, RunConfig, RunError, RunManifest, MANIFEST_FILE};
use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

fn config(json: &str, out: &Path) -> RunConfig {
    let mut c = parse_config(json).unwrap();
    c.out = Some(out.to_string_lossy().into_owned());
    c
}

fn csvs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

const SMALL: &[&str] = &[
    r#"{"problem":"burgers","nx":21,"steps":5}"#,
    r#"{"problem":"diffuse1d","nx":41,"dt":0.001,"steps":20}"#,
    r#"{"problem":"particles2d","nx":70,"steps":6,"every":3,"noise":0.3,"seed":11}"#,
    r#"{"problem":"navier-stokes","nx":30,"ny":10,"max_steps":60}"#,
    r#"{"problem":"stochastic","nx":21,"samples":[100,1000,10000],"seed":5}"#,
    r#"{"problem":"stability-check","trials":20,"seed":9}"#,
    r#"{"problem":"split-order","nx":41,"ladder":"dt:0.1,0.05,0.025"}"#,
];

#[test]
fn identical_configs_write_identical_csvs() {
    let tmp = tempfile::tempdir().unwrap();
    for (i, json) in SMALL.iter().enumerate() {
        let (a, b) = (tmp.path().join(format!("{i}a")), tmp.path().join(format!("{i}b")));
        dispatch(&config(json, &a)).unwrap();
        dispatch(&config(json, &b)).unwrap();
        let (ca, cb) = (csvs(&a), csvs(&b));
        assert!(!ca.is_empty(), "{json}");
        assert_eq!(ca, cb, "{json}");
    }
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let tmp = tempfile::tempdir().unwrap();
    for json in [
        r#"{"problem":"particles2d","nx":80,"steps":4,"every":2,"noise":0.5,"seed":2}"#,
        r#"{"problem":"stochastic","nx":31,"samples":[1000,20000,100000],"seed":4}"#,
    ] {
        let mut outs = Vec::new();
        for threads in [1, 4] {
            let dir = tmp.path().join(format!("t{threads}"));
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| dispatch(&config(json, &dir))).unwrap();
            outs.push(csvs(&dir));
        }
        assert_eq!(outs[0], outs[1], "{json}");
    }
}

#[test]
fn manifest_reproduces_its_metrics() {
    let tmp = tempfile::tempdir().unwrap();
    for (i, json) in SMALL.iter().enumerate() {
        let first = tmp.path().join(format!("{i}"));
        let m = dispatch(&config(json, &first)).unwrap();
        let text = std::fs::read_to_string(first.join(MANIFEST_FILE)).unwrap();
        let parsed = RunManifest::parse(&text).unwrap();
        assert_eq!(parsed.metrics, m.metrics);
        assert_eq!(parsed.artifacts, m.artifacts);
        assert!(parsed.error.is_none());
        for a in &parsed.artifacts {
            assert!(first.join(a).is_file(), "{a}");
        }
        let again = dispatch(&config(&parsed.config, &tmp.path().join(format!("{i}r")))).unwrap();
        assert_eq!(again.metrics, parsed.metrics, "{json}");
        assert_eq!(csvs(&first), csvs(&tmp.path().join(format!("{i}r"))), "{json}");
    }
}

#[test]
fn seeds_change_random_outputs_only() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |seed: u64, json: &str, name: &str| {
        let dir = tmp.path().join(format!("{name}{seed}"));
        let mut c = config(json, &dir);
        c.seed = Some(seed);
        dispatch(&c).unwrap();
        csvs(&dir)
    };
    let noisy = r#"{"problem":"particles2d","nx":40,"steps":3,"noise":0.5}"#;
    assert_ne!(run(1, noisy, "p"), run(2, noisy, "p"));
    let plain = r#"{"problem":"burgers","nx":21,"steps":3}"#;
    assert_eq!(run(1, plain, "b"), run(2, plain, "b"));
}

#[test]
fn failed_runs_leave_an_error_record() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("blocked");
    std::fs::create_dir_all(dir.join("diffuse1d_ranges.csv")).unwrap();
    let err = dispatch(&config(r#"{"problem":"diffuse1d","nx":21}"#, &dir)).unwrap_err();
    assert!(matches!(err, RunError::Runtime(_)));
    assert_eq!(err.exit_code(), 2);
    let m = RunManifest::parse(&std::fs::read_to_string(dir.join(MANIFEST_FILE)).unwrap()).unwrap();
    assert!(m.error.is_some());
}

#[test]
fn ladders_report_orders() {
    let tmp = tempfile::tempdir().unwrap();
    let m = dispatch(&config(
        r#"{"problem":"diffuse1d","scheme":"classic-implicit","nx":41,"dt":0.004,"steps":25,"ladder":"dt:0.004,0.002,0.001"}"#,
        &tmp.path().join("l"),
    ))
    .unwrap();
    let order: f64 = m.metric("ladder.classic-implicit.order.2").unwrap().parse().unwrap();
    assert!((0.8..1.2).contains(&order), "{order}");
    assert_eq!(m.metric("ladder.classic-implicit.monotone"), Some("true"));
}

fn dirode(args: &[&str], cwd: &Path) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_dirode")).args(args).current_dir(cwd).output().unwrap();
    (
        o.status.code().unwrap(),
        String::from_utf8_lossy(&o.stdout).into_owned(),
        String::from_utf8_lossy(&o.stderr).into_owned(),
    )
}

#[test]
fn binary_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path();
    std::fs::write(p.join("ok.json"), r#"{"problem":"stability-check","trials":5}"#).unwrap();
    std::fs::write(p.join("typo.json"), r#"{"problem":"stability-check","trails":5}"#).unwrap();
    std::fs::write(p.join("empty.json"), "").unwrap();
    std::fs::write(p.join("blocker"), "").unwrap();

    let (code, out, _) = dirode(&["run", "ok.json", "--out", "a"], p);
    assert_eq!(code, 0);
    assert!(out.contains("pass = true"), "{out}");
    assert!(p.join("a").join(MANIFEST_FILE).is_file());

    let (code, out, _) = dirode(&["stability-check", "--out", "q", "--quiet", "--seed", "3"], p);
    assert_eq!((code, out.as_str()), (0, ""));

    let (code, _, err) = dirode(&["run", "typo.json"], p);
    assert_eq!(code, 1);
    assert!(err.contains("trails"), "{err}");

    let (code, _, err) = dirode(&["run", "empty.json"], p);
    assert_eq!(code, 1);
    assert!(err.contains("problem required"), "{err}");

    let (code, _, err) = dirode(&["burgers", "--config", "ok.json"], p);
    assert_eq!(code, 1, "{err}");

    let (code, _, _) = dirode(&["burgers", "--scheme", "rk4"], p);
    assert_eq!(code, 1);

    let (code, _, _) = dirode(&["burgers", "--no-such-flag"], p);
    assert_eq!(code, 1);

    let (code, _, err) = dirode(&["stability-check", "--out", "blocker/x"], p);
    assert_eq!(code, 2, "{err}");

    let (code, _, _) = dirode(&["--help"], p);
    assert_eq!(code, 0);
}
