use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use sumsetlab::verify::{run_sweep, strip_timing, Family, Mode, SweepSpec};
use sumsetlab::{CheckerRegistry, GroupSpec, Instance, IntSet, TheoremId};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumsetlab"))
        .args(args)
        .env_remove("SUMSETLAB_WORKERS")
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(run(args).stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).expect("json output")
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn sumset_examples() {
    let out = stdout(&["sumset", "--set", "0,1,3"]);
    assert!(out.contains("{0,1,2,3,4,6}"), "{out}");
    assert!(out.contains("k=3") && out.contains("b=1") && out.contains("R=3"), "{out}");

    let v = json(&["sumset", "--set", "0", "--format", "json"]);
    assert_eq!(v["sumset"], serde_json::json!([0]));

    let v = json(&["sumset", "--group", "heisenberg", "--set", "[[0,0,1],[1,0,1]]", "--square", "--format", "json"]);
    assert_eq!(v["size"], 3);

    let v = json(&["sumset", "--set", "0,2", "--with", "0,1", "--format", "json"]);
    assert_eq!(v["sumset"], serde_json::json!([0, 1, 2, 3]));
}

#[test]
fn parse_failures_exit_2() {
    assert_eq!(code(&["sumset", "--set", "0,x"]), 2);
    assert_eq!(code(&["sumset", "--set", ""]), 2);
    assert_eq!(code(&["verify", "--theorem", "thm_Z", "--set", "0,1"]), 2);
    assert_eq!(code(&["sumset", "--group", "nonsense", "--set", "[[0]]"]), 2);
    assert_eq!(code(&["detect", "--product", "--inner", "cyclic:5", "--points", "(0,2"]), 2);
    assert_eq!(code(&["nosuchcommand"]), 2);
}

#[test]
fn detect_exit_codes() {
    assert_eq!(code(&["detect", "--set", "0,1,3,4,6"]), 1);
    let out = stdout(&["detect", "--set", "0,1,2,4"]);
    assert!(out.contains("seed {0,1}"), "{out}");
    assert_eq!(code(&["detect", "--set", "0,1,2,4"]), 0);
    // singleton: degenerate input
    assert_eq!(code(&["detect", "--set", "5"]), 2);

    let v = json(&["detect", "--product", "--inner", "cyclic:5", "--points", "(0,2),(1,3),(2,4)", "--format", "json"]);
    assert_eq!(v["certificate"]["x"], serde_json::json!([1]));
    assert_eq!(v["certificate"]["y"], serde_json::json!([2]));
    // repeated first coordinate
    assert_eq!(code(&["detect", "--product", "--inner", "cyclic:5", "--points", "(0,2),(0,3),(2,4)"]), 2);
    // additive implication fails
    assert_eq!(code(&["detect", "--product", "--inner", "cyclic:5", "--points", "(0,0),(1,1),(2,3)"]), 1);

    let heis = "[[0,0,0],[1,0,0],[2,0,0]]";
    assert_eq!(code(&["detect", "--group", "heisenberg", "--set", heis]), 0);
    let v = json(&["detect", "--group", "heisenberg", "--set", heis, "--strategy", "euclid", "--format", "json"]);
    assert_eq!(v["strategy"], "euclid");
    assert_eq!(code(&["detect", "--group", "heisenberg", "--set", heis, "--strategy", "nope"]), 2);
    assert_eq!(code(&["detect", "--group", "heisenberg", "--set", "[[0,0,0],[1,0,0],[0,1,0]]"]), 1);
}

#[test]
fn verify_examples() {
    let v = json(&["verify", "--theorem", "thm_A", "--set", "0,1,2"]);
    assert_eq!((v["hypothesis_met"].as_bool(), v["conclusion_holds"].as_bool()), (Some(true), Some(true)));

    let v = json(&["verify", "--theorem", "lemma_2", "--set", "0,1,3"]);
    assert_eq!(v["conclusion_holds"], true);
    assert!(v["flags"].as_array().unwrap().contains(&Value::from("equality")));

    let v = json(&["verify", "--theorem", "thm_4", "--group", "heisenberg", "--set", "[[0,0,0],[1,0,0],[0,1,0]]"]);
    assert_eq!(v["hypothesis_met"], false);

    assert_eq!(code(&["verify", "--theorem", "cor_2", "--set", "0,1,2,3", "--n", "5"]), 0);
    assert_eq!(code(&["verify", "--theorem", "cauchy_davenport", "--p", "5", "--set", "0,1", "--set2", "0,2"]), 0);
    assert_eq!(code(&["verify", "--theorem", "cauchy_davenport", "--p", "6", "--set", "0", "--set2", "0"]), 2);
    assert_eq!(code(&["verify", "--theorem", "eq1", "--set", "0,1,2", "--set2", "0,2"]), 0);
    assert_eq!(code(&["verify", "--theorem", "thm_1", "--inner", "cyclic:2", "--points", "(0,0),(1,1),(2,0)"]), 0);
    // not normalized: malformed for thm_A
    assert_eq!(code(&["verify", "--theorem", "thm_A", "--set", "0,2,4"]), 2);
    // missing input
    assert_eq!(code(&["verify", "--theorem", "thm_1", "--inner", "cyclic:2"]), 2);
}

/// CLI output equals the library's verdict on the same instance.
#[test]
fn verify_replays_against_library() {
    let registry = CheckerRegistry::standard();
    let cases: Vec<(Vec<&str>, TheoremId, Instance)> = vec![
        (
            vec!["--theorem", "lemma_1", "--set", "0,1,2,5,6"],
            TheoremId::Lemma1,
            Instance::int(IntSet::new([0, 1, 2, 5, 6]).unwrap()),
        ),
        (
            vec!["--theorem", "cor_1", "--set", "0,1,3,4,6"],
            TheoremId::Cor1,
            Instance::int(IntSet::new([0, 1, 3, 4, 6]).unwrap()),
        ),
        (
            vec!["--theorem", "thm_2", "--inner", "cyclic:5", "--points", "(0,2),(1,3),(2,4)"],
            TheoremId::Thm2,
            Instance::Product { inner: GroupSpec::cyclic(5), points: vec![(0, vec![2]), (1, vec![3]), (2, vec![4])] },
        ),
        (
            vec!["--theorem", "thm_3", "--set", "[[0,0,0],[1,0,0],[2,0,0],[3,0,1]]"],
            TheoremId::Thm3,
            Instance::Group {
                spec: GroupSpec::Heisenberg,
                elements: vec![vec![0, 0, 0], vec![1, 0, 0], vec![2, 0, 0], vec![3, 0, 1]],
            },
        ),
    ];
    for (args, theorem, instance) in cases {
        let mut full = vec!["verify"];
        full.extend(args);
        let mut cli = json(&full);
        let mut lib = serde_json::to_value(registry.check(theorem, &instance).unwrap()).unwrap();
        strip_timing(&mut cli);
        strip_timing(&mut lib);
        assert_eq!(cli, lib, "{full:?}");

        // and the --instance path accepts the serialized form
        let raw = serde_json::to_string(&instance).unwrap();
        let mut again = json(&["verify", "--theorem", theorem.as_str(), "--instance", &raw]);
        strip_timing(&mut again);
        assert_eq!(again, lib);
    }
}

#[test]
fn sweep_examples() {
    let v = json(&["sweep", "--theorem", "cor_1", "--nmax", "12", "--kmin", "3", "--kmax", "7", "--format", "json"]);
    assert_eq!(v["counts"]["counterexamples"], 0);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["complete"], true);

    let args = [
        "sweep", "--theorem", "thm_2", "--inner", "cyclic:3", "--amax", "8", "--kmax", "5", "--mode", "random",
        "--count", "100000", "--seed", "42",
    ];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["counts"]["counterexamples"], 0);

    assert_eq!(code(&["sweep", "--theorem", "cauchy_davenport", "--p", "7"]), 0);
}

#[test]
fn sweep_exit_codes() {
    // seed is mandatory in random mode
    assert_eq!(code(&["sweep", "--theorem", "thm_2", "--mode", "random"]), 2);
    assert_eq!(code(&["sweep", "--theorem", "cor_1", "--mode", "random", "--seed", "1"]), 2);
    assert_eq!(code(&["sweep", "--theorem", "thm_4", "--max-instances", "10"]), 3);
    // raw mode feeds unnormalized sets to a checker that rejects them
    assert_eq!(code(&["sweep", "--theorem", "thm_A", "--nmax", "5", "--raw"]), 1);
    assert_eq!(code(&["sweep", "--theorem", "thm_4", "--strategy", "top_pair", "--lo", "-1", "--hi", "1"]), 0);
}

#[test]
fn sweep_matches_library_and_is_reproducible() {
    let args = [
        "sweep", "--theorem", "thm_4", "--lo", "-2", "--hi", "2", "--kmin", "3", "--kmax", "4", "--mode", "random",
        "--count", "3000", "--seed", "5",
    ];
    let strip = |mut v: Value| {
        strip_timing(&mut v);
        v
    };
    let a = strip(json(&args));
    let mut with_workers = args.to_vec();
    with_workers.extend(["--workers", "3"]);
    let b = strip(json(&with_workers));
    assert_eq!(a, b);

    let family = Family::HeisenbergSubsets { lo: -2, hi: 2, k_min: 3, k_max: 4, mode: Mode::Random { count: 3000, seed: 5 } };
    let lib = run_sweep(&SweepSpec::new(TheoremId::Thm4, family)).unwrap();
    assert_eq!(a, lib.to_json_without_timing());
}

#[test]
fn sweep_output_files() {
    let path = tmp("cd5.json");
    let p = path.to_str().unwrap();
    assert_eq!(code(&["sweep", "--theorem", "cauchy_davenport", "--p", "5", "--output", p]), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["counts"]["instances"], 31 * 31);
    let partial = std::fs::read_to_string(tmp("cd5.json.partial.jsonl")).unwrap();
    let last: Value = serde_json::from_str(partial.lines().last().unwrap()).unwrap();
    assert_eq!(last["counts"]["instances"], 31 * 31);

    let csv_path = tmp("cd5.csv");
    let c = csv_path.to_str().unwrap();
    assert_eq!(code(&["sweep", "--theorem", "cauchy_davenport", "--p", "5", "--format", "csv", "--output", c]), 0);
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut rows = text.lines();
    assert!(rows.next().unwrap().starts_with("schema_version,theorem,family"));
    assert!(rows.next().unwrap().starts_with("1,cauchy_davenport,"));

    let out = stdout(&["sweep", "--theorem", "cor_2", "--nmin", "2", "--nmax", "8", "--format", "pretty"]);
    assert!(out.contains("bounded_int_sets") && out.contains("counterexamples  0"), "{out}");
}
