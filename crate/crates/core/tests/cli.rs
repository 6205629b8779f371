use cremona::cli::run;
use cremona::cli::Execution;
use serde_json::Value;

fn cli(args: &[&str]) -> Execution {
    run(std::iter::once("cremona").chain(args.iter().copied()))
}

fn json(e: &Execution) -> Value {
    serde_json::from_str(&e.stdout).unwrap_or_else(|err| panic!("{err}: {}", e.stdout))
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("cremona-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn degree_of_a_quadratic_map() {
    let e = cli(&["deg", "(y, y^2 - x)"]);
    assert_eq!((e.code, e.stdout.trim()), (0, "2"));
}

#[test]
fn powers_table() {
    let e = cli(&["--nmax", "4", "powers", "(x, x*y)"]);
    assert_eq!(e.code, 0);
    assert_eq!(e.stdout, "1\t2\n2\t3\n3\t4\n4\t5\n");
}

#[test]
fn compose_then_reparse() {
    let e = cli(&["compose", "(x, x*y)", "(2*x, y)"]);
    assert_eq!(e.code, 0, "{}", e.stderr);
    let again = cli(&["deg", e.stdout.trim()]);
    assert_eq!((again.code, again.stdout.trim()), (0, "2"), "{}", again.stderr);
}

#[test]
fn identity_growth_is_bounded() {
    let e = cli(&["--nmax", "6", "growth", "(x, y)"]);
    assert_eq!(e.code, 0, "{}", e.stderr);
    let v = json(&e);
    assert_eq!(v["verdict"]["class"], "Bounded", "{v}");
}

#[test]
fn ball_rows() {
    let e = cli(&["--nmax", "2", "ball", "a=(x, x*y)"]);
    assert_eq!(e.code, 0, "{}", e.stderr);
    assert_eq!(e.stdout, "0\t1\t1\n1\t3\t2\n2\t5\t3\n");
}

#[test]
fn bounded_pair_has_a_fixed_vertex() {
    let e = cli(&["fixpoint", "(x, y + 1/x)", "(x, y + 1/(x - 1))"]);
    assert_eq!(e.code, 0, "{}", e.stderr);
    assert_eq!(json(&e)["outcome"], "FixedVertex");
}

#[test]
fn persistent_fibre_certificate() {
    let e = cli(&["fixpoint", "(2*x, y)", "(x, y + 1/(x - 1))"]);
    assert_eq!(e.code, 0, "{}", e.stderr);
    let v = json(&e);
    assert_eq!(v["outcome"], "NoFixedPoint");
    assert_eq!(v["certificate"]["kind"], "PersistentFibre");
}

#[test]
fn quadratic_field_search_is_inconclusive() {
    let e = cli(&["--field", "Q(sqrt(2))", "fixpoint", "(2*x, y)", "(x, y + 1/(x - 1))"]);
    assert_eq!(e.code, 2, "{}", e.stderr);
    assert_eq!(json(&e)["outcome"], "Inconclusive");
}

#[test]
fn classify_labels() {
    let e = cli(&["--nmax", "8", "classify", "(x, x*y)"]);
    assert_eq!(e.code, 0, "{}", e.stderr);
    assert_eq!(json(&e)["label"], "parabolic, rational fibration");
    let e = cli(&["--nmax", "8", "classify", "(y, y^2 - x)"]);
    assert_eq!(e.code, 0, "{}", e.stderr);
    assert_eq!(json(&e)["label"], "loxodromic");
}

#[test]
fn invalid_input_exits_one() {
    for args in [&["deg", "garbage(("][..], &["deg", "(x/0, y)"], &["--field", "F_6", "deg", "(x, y)"], &["nonsense"]] {
        let e = cli(args);
        assert_eq!(e.code, 1, "{args:?}: {}", e.stdout);
        assert!(!e.stderr.is_empty());
    }
}

#[test]
fn help_exits_zero() {
    let e = cli(&["--help"]);
    assert_eq!(e.code, 0);
    assert!(e.stdout.contains("fixpoint"));
}

#[test]
fn config_file_and_output_file() {
    let job = scratch("job.json");
    std::fs::write(
        &job,
        r#"{"field": "Q", "generators": {"s": "(x, y + 1/x)", "t": "(x, y + 1/(x - 1))"}, "n_max": 6}"#,
    )
    .unwrap();
    let out = scratch("table.tsv");
    let e = cli(&["--config", job.to_str().unwrap(), "--out", out.to_str().unwrap(), "ball"]);
    assert_eq!(e.code, 0, "{}", e.stderr);
    assert!(e.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let degs: Vec<&str> = text.lines().map(|l| l.rsplit('\t').next().unwrap()).collect();
    assert_eq!(degs, ["1", "2", "3", "3", "3", "3", "3"]);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let job = scratch("bad.json");
    std::fs::write(&job, r#"{"generators": ["(x, x*y)"], "radius": 3}"#).unwrap();
    let e = cli(&["--config", job.to_str().unwrap(), "ball"]);
    assert_eq!(e.code, 1);
}

#[test]
fn halphen_system_from_file() {
    let path = scratch("system.json");
    std::fs::write(
        &path,
        r#"{"gram": [[0,1,0],[1,0,0],[0,0,-1]], "d0": [1,0,0], "ample": [1,1,0],
            "autos": [[[1,2,2],[0,1,0],[0,2,1]]]}"#,
    )
    .unwrap();
    let e = cli(&["--nmax", "5", "halphen", path.to_str().unwrap()]);
    assert_eq!(e.code, 0, "{}", e.stderr);
    let v = json(&e);
    assert_eq!(v["rank"], 3);
    let degs: Vec<i64> = v["degrees"].as_array().unwrap().iter().map(|r| r["degree"].as_i64().unwrap()).collect();
    assert!(degs.contains(&52), "{v}");
}

#[test]
fn broken_halphen_system_exits_one() {
    let path = scratch("broken.json");
    std::fs::write(&path, r#"{"gram": [[0,1],[1,0]], "d0": [1,1], "ample": [1,1], "autos": []}"#).unwrap();
    let e = cli(&["halphen", path.to_str().unwrap()]);
    assert_eq!(e.code, 1);
    assert!(e.stderr.contains("D₀"), "{}", e.stderr);
}

#[test]
fn output_is_deterministic() {
    let args = ["--nmax", "4", "growth", "(x, y + 1/x)", "(x, y + 1/(x - 1))", "(2*x, y)"];
    assert_eq!(cli(&args), cli(&args));
}
