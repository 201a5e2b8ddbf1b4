use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lslab(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lslab"))
        .args(args)
        .env("LSLAB_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn compute_examples() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 4] = [
        (&["compute", "--family", "legendre", "--n", "3", "--j", "2"], "8"),
        (&["compute", "--family", "jacobi", "--gamma", "1/2", "--n", "3", "--j", "2"], "5"),
        (&["compute", "--family", "legendre", "--n", "0", "--j", "0"], "1"),
        (&["compute", "--family", "jacobi", "--gamma", "1/3", "--n", "2", "--j", "1"], "2/3"),
    ];
    for (args, want) in cases {
        let o = lslab(args, dir.path());
        assert!(o.status.success(), "{args:?}");
        assert_eq!(stdout(&o).trim(), want, "{args:?}");
    }
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["compute", "--family", "jacobi", "--n", "3", "--j", "2"][..],
        &["compute", "--family", "legendre", "--gamma", "1", "--n", "3", "--j", "2"],
        &["compute", "--family", "jacobi", "--gamma", "-1", "--n", "3", "--j", "2"],
        &["verify", "nonsense"],
        &["--precision-bits", "32", "verify", "identities"],
        &["--threads", "0", "verify", "identities"],
    ] {
        assert_eq!(lslab(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn resource_limit_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = lslab(&["compute", "--family", "legendre", "--n", "5000", "--j", "3"], dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn table_csv_and_cache_hit() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["table", "--family", "legendre", "--n-max", "10", "--format", "csv"];
    let first = lslab(&args, dir.path());
    assert!(first.status.success());
    let text = stdout(&first);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,j,value"));
    assert_eq!(lines.count(), 66);
    assert!(dir.path().join("legendre_1.jsonl").exists());
    let second = lslab(&args, dir.path());
    assert_eq!(second.stdout, first.stdout);
    let header = fs::read_to_string(dir.path().join("legendre_1.jsonl")).unwrap();
    let header: serde_json::Value = serde_json::from_str(header.lines().next().unwrap()).unwrap();
    assert_eq!(header["schema"], 1);
    assert_eq!(header["family"], "legendre");
    assert_eq!(header["gamma"], "1");
}

#[test]
fn table_json_chebyshev() {
    let dir = tempfile::tempdir().unwrap();
    let o = lslab(&["table", "--family", "chebyshev", "--n-max", "5", "--format", "json"], dir.path());
    assert!(o.status.success());
    let hit = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .find(|v| v["n"] == 3 && v["j"] == 2)
        .unwrap();
    assert_eq!(hit["value"], "5");
}

#[test]
fn corrupted_cache_recomputes_and_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["table", "--family", "chebyshev", "--n-max", "6", "--format", "csv"];
    let clean = lslab(&args, dir.path());
    assert!(clean.status.success());
    let path = dir.path().join("chebyshev_1_2.jsonl");
    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, text.replacen("\"value\":\"5\"", "\"value\":\"7\"", 1)).unwrap();
    let o = lslab(&args, dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(o.stdout, clean.stdout);
    // the rewritten entry is healthy again
    let again = lslab(&args, dir.path());
    assert!(again.status.success());
}

#[test]
fn output_is_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let run = |t: &str| {
        lslab(&["--threads", t, "clt", "residual", "--n", "150"], dir.path()).stdout
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn verify_identities_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = lslab(&["verify", "identities"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
    assert!(text.contains("PASS cross-formula equality n<=30"));
}

#[test]
fn verify_roots_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = lslab(&["verify", "roots", "--n-max", "30"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("30 certificates"));
}

#[test]
fn roots_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = lslab(&["roots", "--n", "3", "--digits", "12"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["certificate"]["n"], 3);
    assert_eq!(v["roots"].as_array().unwrap().len(), 2);
}

#[test]
fn clt_ratio_report_shape() {
    let dir = tempfile::tempdir().unwrap();
    let o = lslab(&["clt", "ratio", "--n", "200", "--j", "186"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 200);
    assert_eq!(v["j"], 186);
    assert_eq!(v["precision_bits"], 256);
    assert!(v["ratio"].is_string());
}

#[test]
fn edgeworth_and_asymptotics_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = lslab(&["edgeworth", "--n", "40"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("j,x,exact_sigma_p,k2,k3,abs_err_k2,abs_err_k3\n"));
    assert_eq!(text.lines().count(), 42);

    let o = lslab(&["edgeworth", "--n", "40", "--variance-floor", "0.5"], dir.path());
    assert_eq!(o.status.code(), Some(1));

    let o = lslab(&["asymptotics", "saddle", "--nu", "1", "--z", "2", "--n-list", "50,100"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 3);

    let o = lslab(&["asymptotics", "fixed-j", "--family", "legendre", "--j", "1", "--n-list", "5,10"], dir.path());
    assert!(o.status.success());

    let o = lslab(&["asymptotics", "eisenstein", "--n", "10"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["tail_bound"].is_string());
}
