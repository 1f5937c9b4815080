use std::path::PathBuf;
use std::process::{Command, Output};

use charp_cli::Problem;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn charp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charp")).args(args).env_remove("CHARP_MAX_LEVEL").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn pcurvature_of_rank_one_fixture() {
    let out = charp(&["pcurvature", &fixture("rank1_p2.charp")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("psi(D1) = x^2 + 1"), "{}", stdout(&out));
}

#[test]
fn theta_check_at_level_nine() {
    let out = charp(&["theta-check", &fixture("theta_p3.charp"), "--level", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    for d in ["PASS counit diagram", "PASS equalizer diagram", "PASS comultiplication diagram"] {
        assert!(s.contains(d), "{s}");
    }
}

#[test]
fn selftest_seed_one_passes() {
    let out = charp(&["selftest", "--seed", "1", "--instances", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("selftest: 8 of 8 checks pass"));
}

#[test]
fn fixture_corpus_round_trips() {
    let mut n = 0;
    for entry in std::fs::read_dir(fixtures()).unwrap() {
        let path = entry.unwrap().path();
        let src = std::fs::read_to_string(&path).unwrap();
        let p = Problem::parse(&src).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let text = p.serialize();
        assert_eq!(Problem::parse(&text).unwrap(), p, "{}", path.display());
        assert_eq!(Problem::parse(&text).unwrap().serialize(), text);
        n += 1;
    }
    assert!(n >= 5);
}

#[test]
fn json_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["stratify", "gauge_flat_p3.charp"],
        vec!["cartier", "gauge_flat_p3.charp"],
        vec!["rees", "griffiths_p3.charp"],
        vec!["deform", "deform_p3.charp"],
        vec!["selftest"],
    ];
    for (k, run) in runs.iter().enumerate() {
        let mut bytes = Vec::new();
        for rep in 0..2 {
            let path = dir.path().join(format!("{k}-{rep}.ndjson"));
            let mut args: Vec<String> = vec![run[0].to_string()];
            if let Some(f) = run.get(1) {
                args.push(fixture(f));
            } else {
                args.extend(["--seed".into(), "3".into(), "--instances".into(), "2".into()]);
            }
            args.extend(["--json".into(), path.to_string_lossy().into_owned(), "--quiet".into()]);
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            let out = charp(&refs);
            assert_eq!(out.status.code(), Some(0), "{run:?}");
            assert!(out.stdout.is_empty());
            bytes.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(bytes[0], bytes[1], "{run:?}");
        for line in String::from_utf8(bytes[0].clone()).unwrap().lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["command"], run[0]);
            assert_eq!(v["verdict"], "pass");
            assert_eq!(v["inputs"].as_str().unwrap().len(), 64);
        }
    }
}

#[test]
fn timing_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.ndjson");
    let p = path.to_string_lossy().into_owned();
    charp(&["pcurvature", &fixture("rank1_p2.charp"), "--json", &p, "--quiet", "--timing"]);
    let line = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
    assert!(v["micros"].is_u64());
}

#[test]
fn digest_tracks_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let digest = |args: &[&str]| {
        let path = dir.path().join("d.ndjson");
        let p = path.to_string_lossy().into_owned();
        let mut all = args.to_vec();
        all.extend(["--json", &p, "--quiet"]);
        charp(&all);
        let v: serde_json::Value = serde_json::from_str(std::fs::read_to_string(&path).unwrap().lines().next().unwrap()).unwrap();
        v["inputs"].as_str().unwrap().to_string()
    };
    let f = fixture("theta_p3.charp");
    assert_eq!(digest(&["theta-check", &f]), digest(&["theta-check", &f, "--level", "9"]));
    assert_ne!(digest(&["theta-check", &f]), digest(&["theta-check", &f, "--level", "6"]));
}

#[test]
fn exit_codes() {
    assert_eq!(charp(&["curvature", &fixture("nonflat_p3.charp")]).status.code(), Some(1));
    assert_eq!(charp(&["deform", &fixture("deform_p3.charp"), "--exponent", "1"]).status.code(), Some(1));
    assert_eq!(charp(&["stratify", &fixture("nonflat_p3.charp")]).status.code(), Some(3));
    assert_eq!(charp(&["deform", &fixture("rank1_p2.charp")]).status.code(), Some(3));
    assert_eq!(charp(&["theta-check", &fixture("theta_p3.charp"), "--level", "65"]).status.code(), Some(3));
    assert_eq!(charp(&["pcurvature", &fixture("rank1_p2.charp"), "--prime", "4"]).status.code(), Some(3));

    let capped = Command::new(env!("CARGO_BIN_EXE_charp"))
        .args(["stratify", &fixture("gauge_flat_p3.charp"), "--level", "5"])
        .env("CHARP_MAX_LEVEL", "4")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.charp");
    std::fs::write(&bad, "[problem]\nprime = 3\nvars = x\nrank = 1\n[connection]\nmatrix A1 = [[x +]]\n").unwrap();
    let out = charp(&["curvature", &bad.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 6, column"));
}

#[test]
fn prime_override_reinterprets_the_problem() {
    let out = charp(&["pcurvature", &fixture("rank1_p2.charp"), "--prime", "3"]);
    assert_eq!(out.status.code(), Some(0));
    // c = x over F_3: c^3 + c'' = x^3
    assert!(stdout(&out).contains("psi(D1) = x^3"), "{}", stdout(&out));
}

#[test]
fn random_problems_round_trip() {
    use charp_core::random::{ConnectionKind, Fixtures};
    let mut fx = Fixtures::new(9);
    for p in [2u64, 3, 5] {
        let r = charp_core::arith::ring(p, &["x", "y"], None).unwrap();
        for kind in [ConnectionKind::GaugeFlat, ConnectionKind::ClosedLog, ConnectionKind::Unstructured] {
            let c = fx.connection(&r, kind, 2, 2).unwrap();
            let problem = Problem {
                prime: p,
                vars: vec!["x".into(), "y".into()],
                param: None,
                rank: 2,
                mode: charp_cli::Mode::Dr,
                connection: c.matrices().to_vec(),
                higgs: Vec::new(),
                psi: Vec::new(),
                filtration: vec![vec![vec![1, 1]]],
                lift: vec![fx.poly(&r, 2, 2), fx.poly(&r, 2, 2)],
                level: Some(3),
                degree_bound: None,
            };
            let text = problem.serialize();
            assert_eq!(Problem::parse(&text).unwrap(), problem, "{text}");
        }
    }
}
