use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projsqueeze")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(out: &str, key: &str) -> f64 {
    let line = out.lines().find(|l| l.starts_with(&format!("{key} = "))).unwrap();
    line.split(" = ").nth(1).unwrap().parse().unwrap()
}

#[test]
fn metric_on_the_disk() {
    let o = run(&["metric", "--body", "ball2", "--p", "0,0", "--q", "0.5,0", "--X", "1,0"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!((value(&out, "hilbert") - 3f64.ln()).abs() < 1e-12);
    assert!((value(&out, "integrated") - 3f64.ln()).abs() < 1e-9);
    assert_eq!(value(&out, "F"), 2.0);
    assert_eq!(value(&out, "C"), 2.0);
}

#[test]
fn exterior_point_is_a_precondition_error() {
    let o = run(&["metric", "--body", "square", "--p", "2,0", "--X", "1,0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not interior"));
}

#[test]
fn bad_spec_is_a_spec_error() {
    let o = run(&["squeeze", "--body", "no-such-body"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["squeeze", "--body", "ellipse(1)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn squeeze_reports() {
    let out = stdout(&run(&["squeeze", "--body", "square", "--budget", "400"]));
    assert!(value(&out, "lower") >= 0.5f64.sqrt() - 1e-12);
    assert!(out.contains("certificate: exact"));

    let out = stdout(&run(&["squeeze", "--body", "slab", "--budget", "400"]));
    assert_eq!(value(&out, "lower"), 0.0);
    assert!(out.contains("reason = not projectively bounded"));

    let out = stdout(&run(&["squeeze", "--body", "ball2", "--z", "-0.7,0.2", "--budget", "400"]));
    assert!(value(&out, "lower") > 0.9999);
}

#[test]
fn spec_file_body() {
    let dir = std::env::temp_dir().join(format!("projsqueeze-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tri.body");
    std::fs::write(&path, "type = polytope\nA = 1 0; 0 1; -1 -1\nb = 1, 1, 2\n").unwrap();
    let o = run(&["metric", "--body", path.to_str().unwrap(), "--p", "0,0", "--X", "1,0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(value(&stdout(&o), "F"), 1.5);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_replays_a_row() {
    let dir = std::env::temp_dir().join(format!("projsqueeze-verify-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("orbit.csv");
    let csv = csv.to_str().unwrap();
    let args = ["exp", "orbit", "--max-step", "4", "--budget", "200", "--out", csv];
    assert!(run(&args).status.success());
    let o = run(&[&args[..], &["--verify", "1"]].concat());
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "row 1: ok");

    let text = std::fs::read_to_string(csv).unwrap();
    std::fs::write(csv, text.replacen("orbit,", "orbit-x,", 3)).unwrap();
    let o = run(&[&args[..], &["--verify", "1"]].concat());
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}
