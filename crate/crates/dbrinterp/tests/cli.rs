//! End-to-end tests for the `dbrinterp` binary: exit codes, artifact shape,
//! and byte-for-byte determinism of `solve` on the bundled example specs.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dbrinterp"));
    c.env_remove("DBRINTERP_CONFIG");
    c
}

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn tmpdir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("dbrinterp-it-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn version_prints_and_exits_zero() {
    let out = bin().arg("version").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("dbrinterp "));
}

#[test]
fn check_accepts_bundled_specs() {
    for name in [
        "np_one_node.json",
        "cf_order_two.json",
        "h2_two_node.json",
        "boundary_one_node.json",
        "intersection_monomials.json",
    ] {
        let out = bin().arg("check").arg(spec(name)).output().unwrap();
        assert!(
            out.status.success(),
            "check {name} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = String::from_utf8(out.stdout).unwrap();
        let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(v["schema"], 1, "{name}");
        assert_eq!(v["solvable"], true, "{name}");
    }
}

#[test]
fn solve_is_byte_identical_across_runs() {
    let dir = tmpdir("determinism");
    for name in [
        "np_one_node.json",
        "cf_order_two.json",
        "h2_two_node.json",
        "boundary_one_node.json",
    ] {
        let mut artifacts = Vec::new();
        for run in 0..2 {
            let out_path = dir.join(format!("{name}.{run}.out.json"));
            let out = bin()
                .arg("solve")
                .arg(spec(name))
                .arg("--out")
                .arg(&out_path)
                .output()
                .unwrap();
            assert!(
                out.status.success(),
                "solve {name} run {run} failed: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            artifacts.push(std::fs::read(&out_path).unwrap());
        }
        assert_eq!(artifacts[0], artifacts[1], "{name}: runs differ");
    }
}

#[test]
fn solve_np_artifact_matches_closed_form() {
    // f(1/2) = 1 with the least H² norm: f(z) = (3/4)/(1 − z/2).
    let dir = tmpdir("np");
    let out_path = dir.join("np.out.json");
    let out = bin()
        .arg("solve")
        .arg(spec("np_one_node.json"))
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["kind"], "solution");
    let resid = v["verification"]["interp_residual"].as_f64().unwrap();
    assert!(resid < 1e-8, "interp residual {resid}");
    let norm = v["verification"]["h2_norm"].as_f64().unwrap();
    assert!((norm - 0.75f64.sqrt()).abs() < 1e-8, "h2 norm {norm}");
}

#[test]
fn eval_emits_csv_grid() {
    let dir = tmpdir("eval");
    let out_path = dir.join("cf.out.json");
    let status = bin()
        .arg("solve")
        .arg(spec("cf_order_two.json"))
        .arg("--out")
        .arg(&out_path)
        .status()
        .unwrap();
    assert!(status.success());
    let out = bin()
        .arg("eval")
        .arg(&out_path)
        .arg("--grid")
        .arg("2x4")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "z_re,z_im,f_re,f_im,f_abs");
    assert_eq!(lines.len(), 1 + 2 * 4);
    // First sample row: z = 0.45, f(z) = 0.3 + 0.4·0.45.
    let cells: Vec<f64> = lines[1].split(',').map(|s| s.parse().unwrap()).collect();
    assert!((cells[0] - 0.45).abs() < 1e-15);
    assert!((cells[2] - (0.3 + 0.4 * 0.45)).abs() < 1e-9);
}

#[test]
fn unsolvable_spec_exits_one() {
    let dir = tmpdir("unsolvable");
    let p = dir.join("bad.json");
    std::fs::write(
        &p,
        r#"{"schema":1,"kind":"np","nodes":[[0.5,0.0]],"targets":[[3.0,0.0]]}"#,
    )
    .unwrap();
    let out = bin().arg("solve").arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_spec_exits_two() {
    let dir = tmpdir("malformed");
    let p = dir.join("broken.json");
    std::fs::write(&p, r#"{"schema":1,"kind":"np","nodes":[[0.5,0.0]]}"#).unwrap();
    let out = bin().arg("solve").arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.join("does_not_exist.json");
    let out = bin().arg("check").arg(&missing).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_flags_and_config_are_honored() {
    let dir = tmpdir("config");
    // Tolerances must be strictly positive; a bad flag is an input error.
    let out = bin()
        .arg("check")
        .arg(spec("np_one_node.json"))
        .arg("--tol-residual")
        .arg("-1.0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    // Same bad value via config file rejects too; a good flag wins over it.
    let cfg = dir.join("cfg.toml");
    std::fs::write(&cfg, "[tolerances]\nresidual_tol = -1.0\n").unwrap();
    let out = bin()
        .arg("check")
        .arg(spec("np_one_node.json"))
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .arg("check")
        .arg(spec("np_one_node.json"))
        .arg("--config")
        .arg(&cfg)
        .arg("--tol-residual")
        .arg("1e-9")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    // And the config file is also picked up from the environment variable.
    let out = bin()
        .env("DBRINTERP_CONFIG", &cfg)
        .arg("check")
        .arg(spec("np_one_node.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn param_exceeding_budget_exits_one() {
    let dir = tmpdir("budget");
    // h2_two_node admits slack; a constant parameter of norm 10 cannot fit.
    let hp = dir.join("huge.json");
    std::fs::write(
        &hp,
        r#"{"schema":1,"realization":{"a":[[[0.0,0.0]]],"b":[[[0.0,0.0]]],"c":[[[0.0,0.0]]],"d":[[[10.0,0.0]]]}}"#,
    )
    .unwrap();
    let out = bin()
        .arg("solve")
        .arg(spec("h2_two_node.json"))
        .arg("--param")
        .arg(&hp)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("budget"), "stderr: {err}");
}
