use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_infnear"))
        .args(args)
        .env_remove("INFNEAR_HEIGHT")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

fn without_timings(s: &str) -> &str {
    &s[..s.find("\"timings\"").expect("reports carry timings")]
}

#[test]
fn unload_specialized_dk() {
    let (code, out) = run(&["unload", "--in", &fixture("d7.json")]);
    assert_eq!(code, 0);
    let v = json(&out);
    // (4, 2^{r-4}, 1, 0, 0) with r = 7
    assert_eq!(
        v["result"]["delta"],
        serde_json::json!([4, 2, 2, 2, 1, 0, 0])
    );
    assert_eq!(v["verdict"], "ok");
}

#[test]
fn five_doubles_fail_in_degree_four() {
    let (code, out) = run(&[
        "maxrank",
        "--in",
        &fixture("five_doubles.json"),
        "--seed",
        "3",
    ]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["result"]["report"]["failing"], serde_json::json!([4]));
    assert_eq!(v["verdict"], "fail");
}

#[test]
fn three_tacnodes_on_a_sextic() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.json");
    let union = dir.path().join("union.json");
    let (code, out) = run(&[
        "synthesize",
        "--tacnodes",
        "2,2,2",
        "--seed",
        "7",
        "--out",
        curve.to_str().unwrap(),
        "--union-out",
        union.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["result"]["degree"], 6);
    assert_eq!(v["verdict"], "ok");
    let (code, _) = run(&[
        "verify",
        "--curve",
        curve.to_str().unwrap(),
        "--union",
        union.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let (code, out) = run(&[
        "verify",
        "--curve",
        curve.to_str().unwrap(),
        "--union",
        &fixture("placed_union.json"),
    ]);
    assert_eq!(code, 1, "{out}");
    assert_eq!(json(&out)["result"]["locus_matches"], false);
}

#[test]
fn exit_status_contract() {
    let five = fixture("five_doubles.json");
    let six = fixture("six_doubles.json");
    let placed = fixture("placed_union.json");
    let zero = fixture("zero_denominator.json");
    let dup = fixture("duplicate_bases.json");
    let d7 = fixture("d7.json");
    let missing = fixture("no_such_file.json");
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["unload", "--in", &d7], 0),
        (vec!["unload", "--in", &zero], 2),
        (vec!["length", "--in", &placed], 0),
        (vec!["length", "--in", &dup], 2),
        (vec!["ell", "--in", &placed, "--degree", "4"], 0),
        (vec!["ell", "--in", &five, "--degree", "4"], 1),
        (vec!["ell", "--in", &missing, "--degree", "4"], 2),
        (vec!["maxrank", "--in", &six], 0),
        (vec!["maxrank", "--in", &five], 1),
        (vec!["maxrank", "--in", &dup], 2),
        (vec!["catalog"], 0),
        (vec!["catalog", "--height", "1"], 2),
        (vec!["synthesize", "--tacnodes", "1,1,1", "--seed", "1"], 0),
        (vec!["synthesize", "--tacnodes", "0"], 2),
        (vec!["experiment", "dk"], 0),
        (vec!["experiment", "one-more-point", "--mults", "1,3"], 2),
        (vec!["render", "--in", &d7], 0),
        (vec!["render", "--in", &zero], 2),
    ];
    for (args, want) in cases {
        let (code, out) = run(&args);
        assert_eq!(code, want, "{args:?}: {out}");
        let v = json(&out);
        let verdict = ["ok", "fail", "error"][want as usize];
        assert_eq!(v["verdict"], verdict, "{args:?}");
        if want == 2 {
            assert!(v["error"]["kind"].is_string() && v["error"]["message"].is_string());
        }
    }
}

#[test]
fn height_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_infnear"))
        .args(["catalog"])
        .env("INFNEAR_HEIGHT", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_infnear"))
        .args(["catalog", "--height", "40"])
        .env("INFNEAR_HEIGHT", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = json(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(v["config"]["height"], 40);
}

#[test]
fn text_format() {
    let (code, out) = run(&["unload", "--in", &fixture("d7.json"), "--format", "text"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("infnear unload: ok"));
    assert!(out.contains("delta = [4,2,2,2,1,0,0]"));
    let (_, out) = run(&[
        "render",
        "--in",
        &fixture("d7.json"),
        "--diagram",
        "dot",
        "--format",
        "text",
    ]);
    assert!(out.contains("digraph"));
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("c.json");
    let union = dir.path().join("u.json");
    let (c, u) = (curve.to_str().unwrap(), union.to_str().unwrap());
    let placed = fixture("placed_union.json");
    let five = fixture("five_doubles.json");
    let d7 = fixture("d7.json");
    let commands: Vec<Vec<&str>> = vec![
        vec!["unload", "--in", &d7, "--trace"],
        vec!["length", "--in", &placed],
        vec!["ell", "--in", &five, "--degree", "5", "--seed", "4"],
        vec!["maxrank", "--in", &five, "--seed", "4"],
        vec!["catalog", "--seed", "2"],
        vec![
            "synthesize",
            "--tacnodes",
            "2",
            "--cusps",
            "1",
            "--seed",
            "9",
            "--out",
            c,
            "--union-out",
            u,
        ],
        vec![
            "experiment",
            "semicontinuity",
            "--trials",
            "10",
            "--seed",
            "5",
        ],
        vec![
            "experiment",
            "limit-dimension",
            "--trials",
            "4",
            "--seed",
            "5",
        ],
        vec![
            "experiment",
            "limit-identities",
            "--max-s",
            "3",
            "--max-m",
            "5",
            "--max-i",
            "5",
            "--max-j",
            "5",
        ],
        vec!["render", "--in", &d7, "--diagram", "dot"],
    ];
    for args in &commands {
        let (_, a) = run(args);
        let (_, b) = run(args);
        assert_eq!(without_timings(&a), without_timings(&b), "{args:?}");
    }
    let (code, a) = run(&["verify", "--curve", c, "--union", u]);
    assert_eq!(code, 0);
    let (_, b) = run(&["verify", "--curve", c, "--union", u]);
    assert_eq!(without_timings(&a), without_timings(&b));
}
