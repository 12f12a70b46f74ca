use std::io::Write;
use std::process::{Command as Process, Stdio};

use abmirror_cli::{run, AnalysisRequest, CliError, Command, Options, Status};
use abmirror_core::periods::NumericMode;
use abmirror_core::MirrorReport;
use serde_json::{json, Value};

fn request(command: Command, payload: Value) -> AnalysisRequest {
    AnalysisRequest { command, payload, options: Options::default() }
}

fn exec(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut child = Process::new(env!("CARGO_BIN_EXE_abmirror"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn analyze_simple_self_mirror_example() {
    let resp = run(&request(Command::Analyze, json!({ "gram": [[2, 3], [3, 2]] }))).unwrap();
    let d = &resp.document;
    assert_eq!(d["simple"], "yes");
    assert_eq!(d["self_mirror"], true);
    assert_eq!(d["disc_orders"], json!(["5"]));
    let back: MirrorReport = serde_json::from_value(d.clone()).unwrap();
    assert_eq!(serde_json::to_value(&back).unwrap(), *d);
}

#[test]
fn analyze_is_deterministic() {
    let req = request(Command::Analyze, json!({ "gram": [[0, 3], [3, 2]] }));
    assert_eq!(run(&req).unwrap().document, run(&req).unwrap().document);
}

#[test]
fn self_mirror_reports_the_obstruction() {
    let resp = run(&request(Command::SelfMirror, json!({ "gram": [[0, 3], [3, 2]] }))).unwrap();
    assert_eq!(resp.document["self_mirror"], false);
    assert!(resp.document["reason"].as_str().unwrap().contains("cyclic 3-group"));
    assert_eq!(resp.document["witness"], Value::Null);

    let resp = run(&request(Command::SelfMirror, json!({ "gram": [[0, 4], [4, 0]] }))).unwrap();
    assert_eq!(resp.document["self_mirror"], true);
    assert!(resp.document["witness"]["matrix"].is_array());
}

#[test]
fn dual_on_the_hyperbolic_plane() {
    let payload = json!({ "gram": [[0, 1], [1, 0]], "b": [0, 0], "kappa": [2, 1] });
    let d = run(&request(Command::Dual, payload)).unwrap().document;
    assert_eq!(d["dual"]["b"], json!(["0", "0"]));
    assert_eq!(d["dual"]["kappa"], json!(["1", "1/2"]));
    assert_eq!(d["volume"], json!({ "re": "2", "im": "0" }));
    assert_eq!(d["dual_volume"], json!({ "re": "1/2", "im": "0" }));
}

#[test]
fn period_fixtures_in_both_modes() {
    let rows = json!({ "rows": [[[1, 0], [0, 1], [0, 0], [0, 0]], [[0, 0], [0, 0], [1, 0], [0, 1]]] });
    let d = run(&request(Command::Period, rows.clone())).unwrap().document;
    assert_eq!(d["hermitian"], json!(["4", "0"]));
    assert_eq!(d["admissible"], true);

    let mut req = request(Command::Period, rows);
    req.options.numeric = NumericMode::Float;
    let d = run(&req).unwrap().document;
    assert_eq!(d["mode"], "float");
    assert_eq!(d["hermitian"][0], 4.0);

    let second = json!({ "rows": [[[1, 0], [0, 0], [0, 1], [0, 0]], [[0, 0], [1, 0], [0, 0], [0, 1]]] });
    let d = run(&request(Command::Period, second)).unwrap().document;
    assert_eq!(d["hermitian"], json!(["-4", "0"]));
    assert_eq!((d["torus"].clone(), d["admissible"].clone()), (json!(true), json!(false)));
}

#[test]
fn mirror_pair_with_witness() {
    let payload = json!({ "a": [[6]], "b": [[0, 1, 0], [1, 0, 0], [0, 0, -6]] });
    let d = run(&request(Command::MirrorPair, payload)).unwrap().document;
    assert_eq!(d["mirror_partners"], true);
    assert!(d["anti_isometry"].is_array());

    let payload = json!({ "a": [[6]], "b": [[2]] });
    let d = run(&request(Command::MirrorPair, payload)).unwrap().document;
    assert_eq!(d["mirror_partners"], false);
}

#[test]
fn oracle_agrees_on_a_small_box() {
    let resp = run(&request(Command::Oracle, json!({ "entry_bound": 4, "max_det": 40 }))).unwrap();
    assert_eq!(resp.status, Status::Ok);
    assert_eq!(resp.document["disagreements"], 0);
    assert!(resp.document["instances"].as_u64().unwrap() > 50);
}

#[test]
fn oracle_sampling_is_seeded() {
    let payload = json!({ "samples": 20 });
    let mut a = request(Command::Oracle, payload.clone());
    a.options.seed = 9;
    let b = a.clone();
    let mut c = request(Command::Oracle, payload);
    c.options.seed = 10;
    let rows = |r: &AnalysisRequest| run(r).unwrap().document["rows"].clone();
    assert_eq!(rows(&a), rows(&b));
    assert_ne!(rows(&a), rows(&c));
}

#[test]
fn sweep_keeps_input_order() {
    let payload = json!({ "family": "principally-polarized", "from": 1, "to": 40, "threads": 4 });
    let d = run(&request(Command::Sweep, payload)).unwrap().document;
    let items = d["items"].as_array().unwrap();
    assert_eq!(items.len(), 40);
    for (i, item) in items.iter().enumerate() {
        assert_eq!(item["n"], i as i64 + 1);
        for c in item["cases"].as_array().unwrap() {
            assert_eq!(c["agree"], true);
        }
    }
    let single = run(&request(
        Command::Sweep,
        json!({ "family": "principally-polarized", "from": 1, "to": 40, "threads": 1 }),
    ))
    .unwrap()
    .document;
    assert_eq!(single, d);
}

#[test]
fn schema_errors_carry_field_paths() {
    let err = run(&request(Command::Analyze, json!({ "gram": [[2, 3], [3, "x"]] }))).unwrap_err();
    assert!(matches!(err, CliError::Validation(_)));
    assert!(err.message().contains("gram[1][1]"), "{}", err.message());

    let err = run(&request(Command::Dual, json!({ "gram": [[0, 1], [1, 0]], "b": [0, 0] }))).unwrap_err();
    assert!(err.message().contains("kappa"), "{}", err.message());

    let err = run(&request(Command::Analyze, json!({ "gram": [[1, 0], [0, -2]] }))).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn binary_exit_codes() {
    let (code, out, _) = exec(&["analyze"], r#"{"gram": [[2, 3], [3, 2]]}"#);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["self_mirror"], true);

    let (code, out, err) = exec(&["analyze"], r#"{"gram": [[2, 3]]}"#);
    assert_eq!(code, 2, "{out}{err}");

    let (code, _, _) = exec(&["analyze"], "not json");
    assert_eq!(code, 2);

    let (code, out, _) = exec(&["--cap", "4", "mirror-pair"], r#"{"a": [[2, 0], [0, -12]], "b": [[2, 0], [0, -12]]}"#);
    assert_eq!(code, 3, "{out}");
}

#[test]
fn binary_text_format_and_file_inputs() {
    let dir = std::env::temp_dir().join(format!("abmirror-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    std::fs::write(&a, r#"{"gram": [[4]]}"#).unwrap();
    std::fs::write(&b, r#"{"gram": [[0, 1, 0], [1, 0, 0], [0, 0, -4]]}"#).unwrap();
    let (code, out, _) = exec(&["--format", "text", "mirror-pair", a.to_str().unwrap(), b.to_str().unwrap()], "");
    assert_eq!(code, 0);
    assert!(out.contains("mirror partners: true"), "{out}");

    let (code, out, _) = exec(&["--format", "text", "self-mirror", "-"], r#"{"gram": [[0, 3], [3, 2]]}"#);
    assert_eq!(code, 0);
    assert!(out.contains("cyclic 3-group"), "{out}");
    std::fs::remove_dir_all(dir).unwrap();
}
