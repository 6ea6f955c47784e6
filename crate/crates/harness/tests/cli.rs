use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn harness(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aci-harness")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = harness(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    v.sort();
    v
}

#[test]
fn run_writes_the_contract_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("a");
    ok(&["run", "--preset", "interval-beta", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(files(&out), ["config.json", "metrics.json", "trace_0.csv"]);
    let csv = fs::read_to_string(out.join("trace_0.csv")).unwrap();
    assert!(csv.starts_with("t,action,reward,cost,state,K,coverage_cum,regret_cum,regret_pos_cum,"));
    assert_eq!(csv.lines().count(), 25_001);
    let cfg: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(cfg["seed"], 7);
}

#[test]
fn same_seed_gives_identical_bytes_and_config_reproduces() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    for d in [&a, &b] {
        ok(&["run", "--preset", "newsvendor-shift", "--seed", "3", "--replicas", "2", "--out", d.to_str().unwrap()]);
    }
    // re-run from the written effective config
    ok(&["run", "--config", a.join("config.json").to_str().unwrap(), "--out", c.to_str().unwrap()]);
    for f in ["trace_0.csv", "trace_1.csv"] {
        let x = fs::read(a.join(f)).unwrap();
        assert_eq!(x, fs::read(b.join(f)).unwrap());
        assert_eq!(x, fs::read(c.join(f)).unwrap());
    }
    assert_ne!(fs::read(a.join("trace_0.csv")).unwrap(), fs::read(a.join("trace_1.csv")).unwrap());
}

#[test]
fn plot_flag_adds_svgs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("adv");
    ok(&["run", "--preset", "adversarial-shift", "--plot", "--out", out.to_str().unwrap()]);
    let names = files(&out);
    for f in ["coverage.svg", "regret.svg", "trace_boundary_0.csv", "trace_projected_0.csv", "metrics.json"] {
        assert!(names.iter().any(|n| n == f), "missing {f}");
    }
    let svg = fs::read_to_string(out.join("coverage.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
fn job_count_does_not_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg: serde_json::Value = serde_json::from_str(&ok(&["oracle", "--preset", "combinatorial-or"])).unwrap();
    assert_eq!(cfg["preset"], "combinatorial-or");
    // shorter custom run from the preset's config
    let one = tmp.path().join("one");
    ok(&["run", "--preset", "combinatorial-or", "--replicas", "1", "--out", one.to_str().unwrap()]);
    cfg = serde_json::from_str(&fs::read_to_string(one.join("config.json")).unwrap()).unwrap();
    cfg["T"] = 3000.into();
    cfg["replicas"] = 5.into();
    let path = tmp.path().join("short.json");
    fs::write(&path, cfg.to_string()).unwrap();
    let j1 = tmp.path().join("j1");
    let j4 = tmp.path().join("j4");
    ok(&["run", "--config", path.to_str().unwrap(), "--jobs", "1", "--out", j1.to_str().unwrap()]);
    ok(&["run", "--config", path.to_str().unwrap(), "--jobs", "4", "--out", j4.to_str().unwrap()]);
    assert_eq!(files(&j1), files(&j4));
    // config.json differs only in output_dir
    for f in files(&j1).into_iter().filter(|f| f != "config.json") {
        assert_eq!(fs::read(j1.join(&f)).unwrap(), fs::read(j4.join(&f)).unwrap(), "{f} differs");
    }
}

#[test]
fn list_presets_names_all_eight() {
    let out = ok(&["list-presets"]);
    let names: Vec<&str> = out.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(
        names,
        [
            "interval-beta",
            "interval-eta-sweep",
            "adversarial-shift",
            "threshold-primal",
            "threshold-decay",
            "newsvendor-shift",
            "combinatorial-or",
            "regret-scaling"
        ]
    );
}

#[test]
fn oracle_prints_benchmarks() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("cfg.json");
    let cfg = aci_harness::preset("interval-beta").unwrap();
    fs::write(&path, cfg.to_json()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&ok(&["oracle", "--config", path.to_str().unwrap()])).unwrap();
    assert_eq!(v["variants"][0]["benchmark"]["c_star"]["value"], 0.4);
    assert_eq!(v["variants"][0]["benchmark"]["oracle"], "interval_benchmark");
}

#[test]
fn bad_inputs_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.json");
    fs::write(&path, "{\n  \"preset\": \"custom\",\n  \"T\": -1\n}\n").unwrap();
    let out = harness(&["run", "--config", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    assert!(!harness(&["run", "--preset", "no-such-preset"]).status.success());

    // an OR world that cannot reach the target
    let mut cfg = aci_harness::preset("combinatorial-or").unwrap();
    cfg.environment = aci_harness::EnvironmentSpec::OrWorld { n: 2, p_lo: 0.01, p_hi: 0.02 };
    cfg.output_dir = tmp.path().join("x");
    fs::write(&path, cfg.to_json()).unwrap();
    let out = harness(&["run", "--config", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("greedy_chain"));
}
