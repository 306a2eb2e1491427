use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use crnf::io::{parse_report, parse_series, series_to_string, spec_to_string};
use crnf::probe::ProbeTable;
use crnf_core::conjugacy::ManifoldSpec;
use crnf_core::quadric::HermitianFamily;
use crnf_core::rat::gr_int;
use crnf_core::series::{BigradedSeries, Mono};
use tempfile::TempDir;

fn crnf(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_crnf"));
    c.args(args);
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_spec(dir: &Path, name: &str, spec: &ManifoldSpec) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, spec_to_string(spec)).unwrap();
    path
}

fn s1(terms: &[((u8, u8, u8), i64)]) -> BigradedSeries {
    BigradedSeries::from_terms(1, 1, 1, 6, terms.iter().map(|((a, b, g), c)| (0, Mono::new(&[*a], &[*b], &[*g]), gr_int(*c))).collect::<Vec<_>>())
}

fn sample_spec() -> ManifoldSpec {
    let phi = s1(&[((2, 1, 0), 1), ((1, 2, 0), 1), ((2, 2, 0), 3), ((2, 1, 1), 2), ((1, 2, 1), 2), ((3, 3, 0), -1)]);
    ManifoldSpec::new(HermitianFamily::sphere(), phi, 6).unwrap()
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let ok = write_spec(dir.path(), "ok.json", &sample_spec());
    assert_eq!(code(&crnf(&["validate", p(&ok)], &[])), 0);

    let dep = dir.path().join("dep.json");
    fs::write(
        &dep,
        r#"{"version":"crnf-spec/1","n":1,"d":2,"J":[[[{"re":"1","im":"0"}]],[[{"re":"-3","im":"0"}]]],"perturbation":[],"cap":4}"#,
    )
    .unwrap();
    let o = crnf(&["validate", p(&dep)], &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("linearly dependent"));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, fs::read_to_string(&ok).unwrap().replacen("\"1/1\"", "\"1/0\"", 1)).unwrap();
    assert_eq!(code(&crnf(&["validate", p(&bad)], &[])), 1);
    assert_eq!(code(&crnf(&["validate", "/nonexistent/spec.json"], &[])), 1);
    assert_eq!(code(&crnf(&["frobnicate"], &[])), 1);
}

#[test]
fn sphere_cm_is_identity() {
    let dir = TempDir::new().unwrap();
    let spec = ManifoldSpec::new(HermitianFamily::sphere(), BigradedSeries::zero(1, 1, 1, 6), 6).unwrap();
    let path = write_spec(dir.path(), "sphere.json", &spec);
    let out = dir.path().join("out");
    assert_eq!(code(&crnf(&["normalize", p(&path), "--mode", "cm", "--out", p(&out)], &[])), 0);
    assert!(parse_series(&fs::read_to_string(out.join("phi.series")).unwrap()).unwrap().is_zero());
    assert_eq!(fs::read_to_string(out.join("transform.series")).unwrap(), "# crnf-transform n=1 d=1 cap=6\n[f]\n[g]\n");
    assert_eq!(code(&crnf(&["diagnose", p(&path), "--crucial", p(&out.join("phi.series"))], &[])), 0);
}

#[test]
fn normalize_is_deterministic_and_verifiable() {
    let dir = TempDir::new().unwrap();
    let path = write_spec(dir.path(), "spec.json", &sample_spec());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&crnf(&["normalize", p(&path), "--degree", "6", "--out", p(&a)], &[])), 0);
    assert_eq!(code(&crnf(&["normalize", p(&path), "--degree", "6", "--out", p(&b)], &[("CRNF_THREADS", "2")])), 0);
    for f in ["phi.series", "transform.series", "report.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let report = parse_report(&fs::read_to_string(a.join("report.json")).unwrap()).unwrap();
    assert!(report.ok && report.conjugacy_residual_terms == 0);

    let phi = a.join("phi.series");
    let t = a.join("transform.series");
    assert_eq!(code(&crnf(&["verify", p(&path), "--phi", p(&phi), "--transform", p(&t)], &[])), 0);
    assert_eq!(code(&crnf(&["check-nf", p(&path), "--phi", p(&phi), "--space", "full"], &[])), 0);

    // The raw perturbation is not a normal form and does not conjugate with this transform.
    let raw = dir.path().join("raw.series");
    fs::write(&raw, series_to_string(sample_spec().perturbation())).unwrap();
    assert_eq!(code(&crnf(&["check-nf", p(&path), "--phi", p(&raw), "--space", "full"], &[])), 3);
    assert_eq!(code(&crnf(&["verify", p(&path), "--phi", p(&raw), "--transform", p(&t)], &[])), 3);
}

#[test]
fn weak_mode_depends_on_f0() {
    let dir = TempDir::new().unwrap();
    let path = write_spec(dir.path(), "spec.json", &sample_spec());
    let f0 = dir.path().join("f0.series");
    fs::write(&f0, "# crnf-series n=1 d=1 s=1 cap=6\n0 | 0 | 0 | 1 | 1/2 | 1/3\n").unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&crnf(&["normalize", p(&path), "--mode", "weak", "--out", p(&a)], &[])), 0);
    assert_eq!(code(&crnf(&["normalize", p(&path), "--mode", "weak", "--f0", p(&f0), "--out", p(&b)], &[])), 0);
    let pa = a.join("phi.series");
    let pb = b.join("phi.series");
    assert_ne!(fs::read(&pa).unwrap(), fs::read(&pb).unwrap());
    for phi in [&pa, &pb] {
        assert_eq!(code(&crnf(&["check-nf", p(&path), "--phi", p(phi), "--space", "weak"], &[])), 0);
    }
    // f0 with a constant term is rejected.
    fs::write(&f0, "# crnf-series n=1 d=1 s=1 cap=6\n0 | 0 | 0 | 0 | 1 | 0\n").unwrap();
    assert_eq!(code(&crnf(&["normalize", p(&path), "--mode", "weak", "--f0", p(&f0), "--out", p(&b)], &[])), 2);
}

#[test]
fn cm_needs_codimension_one() {
    let dir = TempDir::new().unwrap();
    let fam = HermitianFamily::diagonal(&[&[1, 1], &[1, -1]]);
    let spec = ManifoldSpec::new(fam, BigradedSeries::zero(2, 2, 2, 4), 4).unwrap();
    let path = write_spec(dir.path(), "d2.json", &spec);
    assert_eq!(code(&crnf(&["normalize", p(&path), "--mode", "cm", "--out", p(dir.path())], &[])), 2);
}

#[test]
fn crucial_fails_on_planted_u_dependence() {
    let dir = TempDir::new().unwrap();
    let fam = HermitianFamily::diagonal(&[&[1, 0], &[0, 1]]);
    let spec = ManifoldSpec::new(fam, BigradedSeries::zero(2, 2, 2, 8), 8).unwrap();
    let path = write_spec(dir.path(), "d2.json", &spec);
    // Φ₁₂ = u₁ (z₁ z̄₁ z̄₂ + z̄₁ z₁ z₂) in the first component.
    let phi = dir.path().join("phi.series");
    fs::write(&phi, "# crnf-series n=2 d=2 s=2 cap=8\n0 | 1 0 | 1 1 | 1 0 | 1/1 | 0/1\n").unwrap();
    let o = crnf(&["diagnose", p(&path), "--crucial", p(&phi), "--out", p(dir.path())], &[]);
    assert_eq!(code(&o), 4);
    assert!(dir.path().join("crucial.series").exists());
}

#[test]
fn bigdenom_delta_cubed_column_is_constant() {
    let dir = TempDir::new().unwrap();
    let spec = ManifoldSpec::new(HermitianFamily::sphere(), BigradedSeries::zero(1, 1, 1, 8), 8).unwrap();
    let path = write_spec(dir.path(), "sphere.json", &spec);
    let out = dir.path().join("probe");
    let o = crnf(&["diagnose", p(&path), "--bigdenom", "delta-cubed", "--out", p(&out)], &[("CRNF_THREADS", "3")]);
    assert_eq!(code(&o), 0);
    let table = ProbeTable::from_json(&fs::read_to_string(out.join("bigdenom.json")).unwrap()).unwrap();
    let vals = table.rescaled(0);
    assert_eq!(vals.len(), 12);
    assert!(vals.iter().all(|v| (v - vals[0]).abs() < 1e-9));
    assert_eq!(String::from_utf8_lossy(&o.stdout), fs::read_to_string(out.join("bigdenom.txt")).unwrap());
}

#[test]
fn growth_and_regularity_commands() {
    let dir = TempDir::new().unwrap();
    let path = write_spec(dir.path(), "spec.json", &sample_spec());
    let out = dir.path().join("n");
    assert_eq!(code(&crnf(&["normalize", p(&path), "--out", p(&out)], &[])), 0);
    let o = crnf(
        &["diagnose", p(&path), "--growth", p(&out.join("phi.series")), "--transform", p(&out.join("transform.series"))],
        &[],
    );
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("ratio"));

    let jets = dir.path().join("jets.json");
    fs::write(
        &jets,
        r#"{"version":"crnf-jets/1","nx":1,"orders":[2],"q":0,
            "w":[[{"exp":[0,0,1,1],"c":"1"}]],"jet":[[{"exp":[2],"c":"1"},{"exp":[3],"c":"2"}]]}"#,
    )
    .unwrap();
    let o = crnf(&["diagnose", p(&jets), "--regularity"], &[]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("overall: pass"));
}

#[test]
fn thread_variable_must_be_numeric() {
    let dir = TempDir::new().unwrap();
    let path = write_spec(dir.path(), "spec.json", &sample_spec());
    assert_eq!(code(&crnf(&["validate", p(&path)], &[("CRNF_THREADS", "many")])), 1);
}
