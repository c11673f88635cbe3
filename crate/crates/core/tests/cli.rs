use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const E1: &str = "num_interfaces = 2
num_services = 1
num_resources = 1
demand = [[5]]
capacity = [[3], [4]]
unit_cost = [[1], [2]]
activation_cost = [10, 10]
";

fn sia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sia")).args(args).output().expect("binary runs")
}

fn sia_path(args: &[&str], path: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sia")).args(args).arg(path).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn value<'a>(text: &'a str, key: &str) -> &'a str {
    let prefix = format!("{key}: ");
    text.lines().find_map(|l| l.strip_prefix(prefix.as_str())).unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn solve_prints_key_value_lines() {
    let dir = tempfile::tempdir().unwrap();
    let e1 = write(dir.path(), "e1.toml", E1);
    let out = sia_path(&["solve"], &e1);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(value(&text, "status"), "optimal");
    assert_eq!(value(&text, "objective"), "27/1");
    assert_eq!(value(&text, "objective_decimal"), "27.000000");
    assert_eq!(value(&text, "splits"), "1");
    assert_eq!(value(&text, "service_1"), "1=3 2=2");
    assert!(value(&text, "nodes").parse::<u64>().unwrap() >= 1);

    for flags in [
        &["--branch-rule", "x-most-fractional", "--search-order", "depth-first", "--pivot-rule", "dantzig"][..],
        &["--node-limit", "1000", "--time-limit", "5", "--seed", "7", "--pivot-rule", "bland"],
    ] {
        let mut args = vec!["solve"];
        args.extend_from_slice(flags);
        let out = Command::new(env!("CARGO_BIN_EXE_sia")).args(&args).arg(&e1).output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(value(&stdout(&out), "objective"), "27/1");
    }
}

#[test]
fn relaxation_reports_the_lp_bound() {
    let dir = tempfile::tempdir().unwrap();
    let e1 = write(dir.path(), "e1.toml", E1);
    let out = sia_path(&["solve", "--relax-integrality"], &e1);
    assert_eq!(out.status.code(), Some(0));
    // Relaxed optimum by hand: x = (3, 2) at unit cost 7, activations 3/3
    // and 2/4 at F = 10 each, so 7 + 10 + 5.
    assert_eq!(value(&stdout(&out), "lp_bound"), "22/1");
}

#[test]
fn solve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "num_interfaces = 2\nnum_services = oops\n");
    let out = sia_path(&["solve"], &bad);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let shape = write(dir.path(), "shape.toml", &E1.replace("capacity = [[3], [4]]", "capacity = [[3]]"));
    assert_eq!(sia_path(&["solve"], &shape).status.code(), Some(1));

    let missing = dir.path().join("missing.toml");
    assert_eq!(sia_path(&["solve"], &missing).status.code(), Some(1));

    let infeasible = write(dir.path(), "inf.toml", &E1.replace("[[5]]", "[[9]]"));
    let out = sia_path(&["solve"], &infeasible);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(value(&stdout(&out), "status"), "infeasible");

    // Partition instance {3, 5, 7, 9, 2}: no equal split exists, so the
    // root relaxation cannot already prove the optimum.
    let split = "num_interfaces = 2\nnum_services = 5\nnum_resources = 1\n\
                 demand = [[3], [5], [7], [9], [2]]\ncapacity = [[13], [13]]\n\
                 unit_cost = [[0], [0]]\nactivation_cost = [1, 1]\n";
    let limited = write(dir.path(), "limited.toml", split);
    let out = sia_path(&["solve", "--node-limit", "1"], &limited);
    assert_eq!(out.status.code(), Some(3), "{}", stdout(&out));

    let e1 = write(dir.path(), "e1.toml", E1);
    assert_eq!(sia_path(&["solve", "--time-limit", "0"], &e1).status.code(), Some(1));
}

#[test]
fn oracle_command() {
    let dir = tempfile::tempdir().unwrap();
    let e1 = write(dir.path(), "e1.toml", E1);
    let out = sia_path(&["oracle"], &e1);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(value(&stdout(&out), "objective"), "27/1");

    let zero = write(
        dir.path(),
        "zero.toml",
        "num_interfaces = 1\nnum_services = 1\nnum_resources = 1\ndemand = [[0]]\ncapacity = [[0]]\n\
         unit_cost = [[0]]\nactivation_cost = [0]\n",
    );
    let out = sia_path(&["oracle"], &zero);
    assert_eq!(value(&stdout(&out), "objective"), "0/1");

    let out = sia_path(&["oracle", "--max-allocations", "2"], &e1);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("exceeds"));
}

#[test]
fn reduce_command() {
    let out = sia(&["reduce", "1", "2", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(value(&text, "partition"), "yes");
    assert_eq!(value(&text, "services"), "3");
    assert_eq!(value(&text, "capacity"), "3");
    assert_eq!(value(&text, "objective"), "3/1");

    let out = sia(&["reduce", "3", "1"]);
    assert_eq!(value(&stdout(&out), "partition"), "no");
    assert_eq!(value(&stdout(&out), "objective"), "3/1");

    let out = sia(&["reduce", "1", "1", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(value(&stdout(&out), "partition"), "no");

    assert_eq!(sia(&["reduce", "2", "x"]).status.code(), Some(1));
    assert_eq!(sia(&["reduce", "0", "2"]).status.code(), Some(1));
}

fn small_config(dir: &Path, replications: u64) -> PathBuf {
    let shipped = include_str!("../config/default_scenarios.toml");
    let text = shipped
        .replace("replications = 1000", &format!("replications = {replications}"))
        .replace("services = { min = 3, max = 10 }", "services = { min = 3, max = 4 }");
    write(dir, "small.toml", &text)
}

#[test]
fn bench_writes_reports_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path(), 1);
    let run = |out: &str, jobs: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_sia"))
            .args(["bench", "--jobs", jobs])
            .arg(&config)
            .arg(dir.path().join(out))
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        o
    };
    let first = run("a", "1");
    run("b", "2");
    for name in ["report.csv", "records.csv", "cost_vs_services.svg", "splits_vs_services.svg"] {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
    let csv = std::fs::read_to_string(dir.path().join("a/report.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "num_services,scenario,mean_cost,mean_splits,replications,unsolved");
    assert_eq!(csv.lines().count(), 1 + 2 * 5);
    assert!(stdout(&first).contains("mixed-mixedf"));
}

#[test]
fn bench_rejects_zero_replications() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path(), 0);
    let out = Command::new(env!("CARGO_BIN_EXE_sia")).arg("bench").arg(&config).arg(dir.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("replications"));

    let ok = small_config(dir.path(), 1);
    let out = Command::new(env!("CARGO_BIN_EXE_sia"))
        .args(["bench", "--replications", "0"])
        .arg(&ok)
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn export_lp_command() {
    let dir = tempfile::tempdir().unwrap();
    let e1 = write(dir.path(), "e1.toml", E1);
    let lp = dir.path().join("e1.lp");
    let out = Command::new(env!("CARGO_BIN_EXE_sia")).arg("export-lp").arg(&e1).arg(&lp).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&lp).unwrap();
    assert!(text.contains("x_1_1_1 + x_2_1_1 = 5"));

    let half = write(dir.path(), "half.toml", &format!("{E1}overhead = [[[\"1/2\"]], [[0]]]\n"));
    let out = Command::new(env!("CARGO_BIN_EXE_sia")).arg("export-lp").arg(&half).arg(&lp).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&lp).unwrap().contains("1.5 x_1_1_1"));

    let third = write(dir.path(), "third.toml", &E1.replace("[[1], [2]]", "[[\"1/3\"], [2]]"));
    let out = Command::new(env!("CARGO_BIN_EXE_sia")).arg("export-lp").arg(&third).arg(&lp).output().unwrap();
    assert_eq!(out.status.code(), Some(5));
    assert!(stderr(&out).contains("x_1_1_1"), "{}", stderr(&out));
}

#[test]
fn help_documents_schemas_and_exit_codes() {
    let text = stdout(&sia(&["--help"]));
    for needle in ["activation_cost", "overhead", "mixed-random", "EXIT CODES", "search space too large"] {
        assert!(text.contains(needle), "help lacks {needle}");
    }
}
