use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const CUBIC: &str = "n = 1\norder = 6\nlambda 1 = 1\nterm x1^2 y1 = 1\nterm x1 y1^2 = 1/2\nterm x1^2 y1^2 = 1/3\n";
const TWO_DOF: &str = "n = 2\norder = 6\nradicals = 2\nlambda 1 = 1\nlambda 2 = sqrt(2)\n\
    term x1^2 y2 = 1/2\nterm x1 y1 y2 = -1\nterm x2^3 = 3\nterm y1^4 = 1\n";

fn birkhoff(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_birkhoff"))
        .current_dir(dir)
        .env_remove("BIRKHOFF_PRECISION")
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn normalize_writes_five_dumps_and_a_manifest() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "h.spec", CUBIC);
    let o = birkhoff(tmp.path(), &["-o", "run", "normalize", "h.spec", "--order", "8", "--mode", "phi"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let run = tmp.path().join("run");
    for f in ["K.dump", "v.dump", "phi.dump", "psi.dump", "log.txt", "manifest.json"] {
        assert!(run.join(f).is_file(), "{f} missing");
    }
    let k = fs::read_to_string(run.join("K.dump")).unwrap();
    assert!(k.starts_with("# n = 1\n# order = 8\n"));
    let m = manifest(&run);
    assert_eq!(m["command"], "normalize");
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 5);
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    // Writes are atomic: no temporaries are left behind.
    assert!(fs::read_dir(&run).unwrap().all(|e| !e.unwrap().file_name().to_string_lossy().ends_with(".tmp")));
    assert!(stdout(&o).contains("non-resonance through order 8: PASS"));
}

#[test]
fn exact_runs_are_reproducible_byte_for_byte() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "h.spec", TWO_DOF);
    for out in ["a", "b"] {
        assert_eq!(birkhoff(tmp.path(), &["-o", out, "normalize", "h.spec"]).status.code(), Some(0));
    }
    for f in ["K.dump", "v.dump", "phi.dump", "psi.dump"] {
        assert_eq!(
            fs::read(tmp.path().join("a").join(f)).unwrap(),
            fs::read(tmp.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn resonant_frequencies_exit_2_with_a_witness() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "h.spec", "n = 2\norder = 4\nlambda 1 = 1\nlambda 2 = 2\n");
    let o = birkhoff(tmp.path(), &["-o", "run", "normalize", "h.spec"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha=[0, 1]"), "{}", stderr(&o));
    assert_eq!(manifest(&tmp.path().join("run"))["exit_code"], 2);
}

#[test]
fn bad_specs_and_missing_files_exit_2() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "bad.spec", "n = 1\norder = 4\nlambda 1 = 1\nterm z1^3 = 1\n");
    assert_eq!(birkhoff(tmp.path(), &["normalize", "bad.spec"]).status.code(), Some(2));
    assert_eq!(birkhoff(tmp.path(), &["normalize", "nope.spec"]).status.code(), Some(2));
    assert_eq!(birkhoff(tmp.path(), &["--precision", "20", "normalize", "bad.spec"]).status.code(), Some(2));
}

#[test]
fn modes_share_k_but_not_v() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "h.spec", CUBIC);
    for mode in ["phi", "zero"] {
        let o = birkhoff(tmp.path(), &["-o", mode, "normalize", "h.spec", "--mode", mode]);
        assert_eq!(o.status.code(), Some(0));
    }
    let read = |mode: &str, f: &str| fs::read_to_string(tmp.path().join(mode).join(f)).unwrap();
    assert_eq!(read("phi", "K.dump"), read("zero", "K.dump"));
    assert_ne!(read("phi", "v.dump"), read("zero", "v.dump"));
}

#[test]
fn float_domain_uses_the_precision_variable() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "h.spec", &format!("{CUBIC}domain = float\n"));
    let o = Command::new(env!("CARGO_BIN_EXE_birkhoff"))
        .current_dir(tmp.path())
        .env("BIRKHOFF_PRECISION", "128")
        .args(["-o", "run", "normalize", "h.spec"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(manifest(&tmp.path().join("run"))["precision_bits"], 128);
    assert!(fs::read_to_string(tmp.path().join("run/log.txt")).unwrap().contains("# domain: float128"));
}

#[test]
fn audit_of_a_pencil_file() {
    let tmp = TempDir::new().unwrap();
    let direction = CUBIC.replace("1/2", "-3");
    write(tmp.path(), "pencil.txt", &format!("{CUBIC}---\n{direction}"));
    let o = birkhoff(tmp.path(), &["-o", "run", "audit", "pencil.txt", "--spot-check", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("run/audit.csv")).unwrap();
    assert!(csv.starts_with("cell,object,l,k,observed_deg,bound,verdict\n"));
    assert!(csv.lines().skip(1).all(|l| l.starts_with("pencil,") && l.ends_with(",PASS")));
    // K_3, K_4, K_5 are interpolated from five nodes.
    assert_eq!(csv.lines().filter(|l| l.contains(",interp_K,")).count(), 3);
    assert!(stdout(&o).contains("pencil: PASS"));
}

#[test]
fn audit_without_a_direction_exits_2() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "base.spec", CUBIC);
    let o = birkhoff(tmp.path(), &["audit", "base.spec"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing direction"), "{}", stderr(&o));
    let other = write(tmp.path(), "other.spec", "n = 1\norder = 7\nlambda 1 = 1\n");
    let o = birkhoff(tmp.path(), &["audit", "base.spec", other.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn growth_writes_the_coefficient_table() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "h.spec", CUBIC);
    let o = birkhoff(tmp.path(), &["-o", "run", "growth", "h.spec", "--order", "20", "--rho0", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("run/growth.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("l,r_l,log_r_l"));
    assert_eq!(csv.lines().count(), 1 + 18);
    assert!(stdout(&o).contains("from degrees 12..=20"));
    assert_eq!(birkhoff(tmp.path(), &["growth", "h.spec", "--order", "5"]).status.code(), Some(2));
    assert_eq!(birkhoff(tmp.path(), &["growth", "h.spec", "--rho0", "-1"]).status.code(), Some(2));
}

#[test]
fn scan_writes_rows_in_grid_order_and_extrapolates() {
    let tmp = TempDir::new().unwrap();
    let base = "n = 1\norder = 8\nlambda 1 = 1\n";
    write(tmp.path(), "base.spec", base);
    write(tmp.path(), "dir.spec", &format!("{base}term x1^2 y1 = 1\nterm x1 y1^2 = 1\n"));
    let o = birkhoff(
        tmp.path(),
        &["-o", "run", "scan", "base.spec", "dir.spec", "--grid", "disk:0:2:8", "--order", "8", "--probe", "1+2.5i"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("run/scan.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t_re,t_im,radius_est,fit_window,min_divisor,probe_tail,status");
    assert_eq!(lines.len(), 1 + 33);
    assert!(lines[1].starts_with("0,0,inf,"));
    assert!(lines.iter().skip(2).all(|l| l.ends_with(",ok") && !l.contains(",inf,")));
    let ex = fs::read_to_string(tmp.path().join("run/extrapolation.csv")).unwrap();
    assert_eq!(ex.lines().count(), 1 + 6);
    assert!(ex.lines().skip(1).all(|l| l.ends_with(",PASS")));
    let bad = birkhoff(tmp.path(), &["scan", "base.spec", "dir.spec", "--grid", "square:0:1:3"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn integrals_with_universal_polynomials() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "h.spec", TWO_DOF);
    let o = birkhoff(
        tmp.path(),
        &["-o", "run", "integrals", "h.spec", "--universal", "w1^2+w2", "--check-bracket"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let run = tmp.path().join("run");
    for f in ["xi.dump", "eta.dump", "integrals.dump", "universal_1.dump", "bracket.csv", "resonant_split.csv"] {
        assert!(run.join(f).is_file(), "{f} missing");
    }
    let out = stdout(&o);
    assert!(out.contains("{w2 + w1^2, H} degree 5: 0e0"), "{out}");
    assert!(out.contains("w2 + w1^2: J = 0"), "{out}");
    let o = birkhoff(tmp.path(), &["integrals", "h.spec", "--universal", "w3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = birkhoff(tmp.path(), &["integrals", "h.spec", "--universal", "w1^4"]);
    assert_eq!(o.status.code(), Some(2));
}
