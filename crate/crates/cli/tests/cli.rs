use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::Path;
use std::process::{Command as Proc, Output};

use nsmx::dyadic::DyadicPartition;
use nsmx::periodic::resonance_constants;
use nsmx::spectral::snapshot::{read_snapshot, write_snapshot};
use nsmx::spectral::{random_field, Band, FrequencyLattice};
use nsmx_cli::commands::verify;
use nsmx_cli::config::VerifyConfig;
use nsmx_cli::{parse_config, Command, OutDir, RunConfig};
use serde_json::Value;
use tempfile::TempDir;

fn nsmx(args: &[&str], dir: &Path) -> Output {
    Proc::new(env!("CARGO_BIN_EXE_nsmx")).args(args).current_dir(dir).env_remove("NSMX_THREADS").output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn alpha_closed(t: f64) -> f64 {
    0.5 * (PI / (PI * t).tanh() - 1.0 / t)
}

#[test]
fn minimal_constants_config_fills_defaults() {
    let cfg = parse_config(r#"{"command":"constants","T":6.2831853}"#, None).unwrap();
    let RunConfig::Constants(c) = &cfg else { panic!() };
    assert_eq!(c.grid.n, 32);
    assert_eq!(c.k_max, 512);
    assert_eq!(c.period, 6.2831853);
}

#[test]
fn constants_run_matches_library_and_closed_form() {
    let d = TempDir::new().unwrap();
    let cfg = write(d.path(), "c.json", r#"{"command":"constants","T":6.283185307179586,"grid":{"n":16}}"#);
    let o = nsmx(&["constants", "--config", &cfg, "--out", "run"], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&d.path().join("run/constants.json"));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["passed"], true);
    let c = &v["constants"];
    let lat = FrequencyLattice::<f64>::new(16, TAU).unwrap();
    let want = resonance_constants(TAU, &lat, 512);
    assert_eq!(c["a_t"].as_f64().unwrap(), want.a_t);
    assert_eq!(c["beta0"].as_f64().unwrap(), want.beta0);
    // |ξ|² = 3·8² at the lattice corner
    let closed = alpha_closed(192.0) / PI;
    assert!((want.a_t - closed).abs() <= want.tails[0] + 1e-12);
    for k in ["a_t", "b_t", "c_t", "d_t", "alpha0", "beta0", "tails"] {
        assert!(!c[k].is_null(), "{k}");
    }
}

#[test]
fn unknown_key_is_named() {
    let d = TempDir::new().unwrap();
    let cfg = write(d.path(), "bad.json", r#"{"physics":{"visocity":1.0}}"#);
    let o = nsmx(&["periodic", "--config", &cfg, "--out", "run"], d.path());
    assert_eq!(code(&o), 1);
    let err = json(&d.path().join("run/error.json"));
    assert_eq!(err["kind"], "config");
    assert_eq!(err["path"], "physics.visocity");
    assert!(err["message"].as_str().unwrap().contains("visocity"));
}

#[test]
fn malformed_and_out_of_range_configs() {
    assert!(matches!(parse_config("{\"T\": ", Some(Command::Constants)), Err(nsmx_cli::CliError::Json(_))));
    let e = parse_config(r#"{"grid":{"L":100.0}}"#, Some(Command::SpectralReport)).unwrap_err();
    assert!(e.to_string().contains("grid.L"), "{e}");
    let e = parse_config(r#"{"grid":{"n":"big"}}"#, Some(Command::SpectralReport)).unwrap_err();
    assert!(e.to_string().contains("grid.n"), "{e}");
    let e = parse_config(r#"{"command":"evolve"}"#, Some(Command::Periodic)).unwrap_err();
    assert!(e.to_string().contains("command"), "{e}");
    let e = parse_config(r#"{"dt":0.3,"horizon":1.0}"#, Some(Command::Evolve)).unwrap_err();
    assert!(e.to_string().contains("`dt`"), "{e}");
    let e = parse_config(r#"{"dt":0.125,"cadence":0.3}"#, Some(Command::Evolve)).unwrap_err();
    assert!(e.to_string().contains("cadence"), "{e}");
    let e = parse_config(r#"{"laws":["no-such-law"]}"#, Some(Command::Verify)).unwrap_err();
    assert!(e.to_string().contains("laws"), "{e}");
    assert!(parse_config("{}", None).is_err());
}

#[test]
fn resolved_config_echo_reparses_identically() {
    let d = TempDir::new().unwrap();
    let texts = [
        (Command::Constants, r#"{"T":3.0,"K":64,"grid":{"n":8,"L":12.566370614359172}}"#),
        (Command::SpectralReport, r#"{"grid":{"n":12}}"#),
        (Command::Periodic, r#"{"grid":{"n":8},"K":4,"force":{"k_max":1,"target":null,"amplitude":0.001}}"#),
        (Command::Evolve, r#"{"grid":{"n":8},"horizon":0.5,"dt":0.125,"cadence":0.25,"force":{"k_max":1}}"#),
        (Command::Stability, r#"{"grid":{"n":8},"reference":"zero","horizon":8.0}"#),
        (Command::Verify, r#"{"laws":["besov-l2"],"trials":2,"grids":[16,24],"time":{"horizon":2.0,"per_unit":4}}"#),
    ];
    for (cmd, text) in texts {
        let name = write(d.path(), "c.json", text);
        let o = nsmx(&[cmd.as_str(), "--config", &name, "--out", "run", "--seed", "77"], d.path());
        assert!(code(&o) == 0 || code(&o) == 2, "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let echo = fs::read_to_string(d.path().join("run/resolved_config.json")).unwrap();
        let v: Value = serde_json::from_str(&echo).unwrap();
        assert_eq!(v["command"], cmd.as_str());
        assert_eq!(v["seed"], 77);
        let first = parse_config(&echo, None).unwrap();
        let again = serde_json::to_string_pretty(&first).unwrap();
        assert_eq!(parse_config(&again, Some(cmd)).unwrap(), first);
        assert_eq!(first.command(), cmd);
    }
}

#[test]
fn spectral_report_has_no_violations() {
    let d = TempDir::new().unwrap();
    for l in ["6.283185307179586", "12.566370614359172", "50.26548245743669"] {
        let cfg = write(d.path(), "s.json", &format!(r#"{{"grid":{{"n":16,"L":{l}}}}}"#));
        let o = nsmx(&["spectral-report", "--config", &cfg, "--out", "run"], d.path());
        assert_eq!(code(&o), 0);
        let csv = fs::read_to_string(d.path().join("run/spectrum.csv")).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "shell,xi_norm,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus,violation"
        );
        for line in lines {
            let v: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!(v <= 1e-12, "{line}");
        }
        assert_eq!(json(&d.path().join("run/summary.json"))["passed"], true);
    }
}

fn small_verify(out: &Path) -> VerifyConfig {
    VerifyConfig {
        laws: vec!["sobolev-sobolev".parse().unwrap(), "besov-l2".parse().unwrap()],
        trials: 6,
        grids: [16, 24],
        out: Some(out.to_path_buf()),
        ..Default::default()
    }
}

#[test]
fn verify_passes_with_true_partition() {
    let d = TempDir::new().unwrap();
    let out = OutDir::create(d.path().join("ok")).unwrap();
    assert!(verify::run(&small_verify(out.root()), &out).unwrap());
}

#[test]
fn verify_with_broken_partition_fails() {
    let d = TempDir::new().unwrap();
    let out = OutDir::create(d.path().join("broken")).unwrap();
    // a grid-dependent normalisation: weights shrink like n^{-3}
    let broken = |lat: &FrequencyLattice<f64>| {
        let c = (16.0 / lat.n() as f64).powi(3);
        Ok(DyadicPartition::build(lat)?.reweighted(move |_, w| w * c))
    };
    let passed = verify::run_with(&small_verify(out.root()), &out, &broken).unwrap();
    assert!(!passed);
    assert_eq!(json(&out.path("summary.json"))["passed"], false);
    let status = if passed { nsmx_cli::Status::Passed } else { nsmx_cli::Status::Failed };
    assert_eq!(status.exit_code(), 2);
}

#[test]
fn empty_table_is_header_only() {
    let d = TempDir::new().unwrap();
    let out = OutDir::create(d.path()).unwrap();
    out.write_csv("empty.csv", &["a", "b"], Vec::<[String; 2]>::new()).unwrap();
    assert_eq!(fs::read_to_string(out.path("empty.csv")).unwrap(), "a,b\n");
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let d = TempDir::new().unwrap();
    let cfg = write(d.path(), "e.json", r#"{"grid":{"n":12},"horizon":1.0,"dt":0.0625,"cadence":0.5,"force":{"k_max":1}}"#);
    let a = nsmx(&["evolve", "--config", &cfg, "--out", "a", "--threads", "1"], d.path());
    let b = nsmx(&["evolve", "--config", &cfg, "--out", "b", "--threads", "3"], d.path());
    assert_eq!((code(&a), code(&b)), (0, 0));
    for f in ["ledger.csv", "summary.json", "snapshot_0002.nsmx"] {
        let x = fs::read(d.path().join("a").join(f)).unwrap();
        let y = fs::read(d.path().join("b").join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn snapshot_roundtrip_is_exact() {
    let lat = FrequencyLattice::<f64>::new(12, 3.7).unwrap();
    let f = random_field(&lat, 2.0, 3, false, Band::Full).unwrap();
    let g = random_field(&lat, 1.5, 4, true, Band::Half).unwrap();
    let mut buf = Vec::new();
    write_snapshot(&mut buf, &[&f, &g]).unwrap();
    let (l2, fields) = read_snapshot::<f64, _>(buf.as_slice()).unwrap();
    assert_eq!((l2.n(), l2.length()), (12, 3.7));
    for (a, b) in [&f, &g].iter().zip(&fields) {
        for c in 0..3 {
            for (x, y) in a.comp(c).iter().zip(b.comp(c)) {
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }
}

#[test]
fn periodic_force_file_reproduces_seeded_run() {
    let d = TempDir::new().unwrap();
    let cfg = write(d.path(), "p.json", r#"{"grid":{"n":8},"K":4}"#);
    let o = nsmx(&["periodic", "--config", &cfg, "--out", "a"], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep = json(&d.path().join("a/picard_report.json"));
    assert_eq!(rep["report"]["converged"], true);
    assert!(rep["max_contraction"].as_f64().unwrap() < 0.5);
    let cfg = write(d.path(), "q.json", r#"{"grid":{"n":8},"K":4,"force_file":"a/forcing.nsmx"}"#);
    let o = nsmx(&["periodic", "--config", &cfg, "--out", "b"], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let sa = fs::read(d.path().join("a/solution.nsmx")).unwrap();
    let sb = fs::read(d.path().join("b/solution.nsmx")).unwrap();
    assert_eq!(sa, sb);
    let (_, fields) = read_snapshot::<f64, _>(sa.as_slice()).unwrap();
    assert_eq!(fields.len(), 3 * 9);
}

#[test]
fn evolve_and_stability_report_properties() {
    let d = TempDir::new().unwrap();
    let cfg = write(d.path(), "e.json", r#"{"grid":{"n":8},"horizon":1.0,"dt":0.03125}"#);
    let o = nsmx(&["evolve", "--config", &cfg, "--out", "e"], d.path());
    assert_eq!(code(&o), 0);
    let s = json(&d.path().join("e/summary.json"));
    assert_eq!(s["max_energy_increase"], 0.0);
    assert_eq!(s["snapshots"], 3);
    let ledger = fs::read_to_string(d.path().join("e/ledger.csv")).unwrap();
    assert_eq!(ledger.lines().count(), 1 + 33);

    let cfg = write(d.path(), "s.json", r#"{"grid":{"n":8},"horizon":16.0,"amplitude":0.05}"#);
    let o = nsmx(&["stability", "--config", &cfg, "--out", "s"], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&d.path().join("s/summary.json"));
    assert_eq!(s["windows"], 16);
    assert_eq!(s["properties"]["decayed"], true);
    let norms = fs::read_to_string(d.path().join("s/norms.csv")).unwrap();
    assert!(norms.starts_with("window,component,block,norm,weighted\n"));
}

#[test]
fn unwritable_output_is_an_error() {
    let d = TempDir::new().unwrap();
    fs::write(d.path().join("taken"), "x").unwrap();
    let o = nsmx(&["spectral-report", "--out", "taken/sub"], d.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn zero_threads_rejected() {
    let d = TempDir::new().unwrap();
    let o = Proc::new(env!("CARGO_BIN_EXE_nsmx"))
        .args(["spectral-report", "--out", "run"])
        .env("NSMX_THREADS", "0")
        .current_dir(d.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    assert_eq!(json(&d.path().join("run/error.json"))["kind"], "threads");
}
