use std::path::{Path, PathBuf};

use lchpm_cli::generators::GENERATORS;
use lchpm_cli::run;
use lchpm_core::persistence::Barcode;

fn bundled(sub: &str, name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(sub).join(name).display().to_string()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    out.stdout
}

fn code(args: &[&str]) -> i32 {
    run(args).code
}

fn bars(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn two_fiber_barcode_text_and_svg() {
    let spec = bundled("specs", "two_fiber_L2.json");
    let text = ok(&["barcode", &spec, "--rmax", "11"]);
    assert_eq!(bars(&text), ["2 inf 1", "6 inf 1", "10 inf 1"]);
    let svg = ok(&["barcode", &spec, "--rmax", "11", "--format", "svg"]);
    assert_eq!(svg.matches("class=\"arrowhead\"").count(), 3);
    assert_eq!(svg.matches("class=\"bar ").count(), 3);
    assert!(svg.contains("# command barcode") || svg.contains("command barcode"));
}

#[test]
fn two_chord_case_two_has_one_finite_bar() {
    let text = ok(&["barcode", &bundled("specs", "two_chord_case2.json"), "rmax=5"]);
    assert_eq!(bars(&text), ["1 3/2 1"]);
    let case1 = ok(&["barcode", &bundled("specs", "two_chord_case1.json"), "rmax=5"]);
    assert_eq!(bars(&case1), ["1 inf 1", "3/2 inf 1"]);
}

#[test]
fn lmin_examples() {
    let last = |args: &[&str]| ok(args).lines().last().unwrap().to_string();
    assert_eq!(last(&["lmin", "two_fiber", "L=2", "rmax=11", "--s", "inf"]), "2");
    assert_eq!(last(&["lmin", "two_chord", "a=1", "A=3/2", "case=2", "rmax=4", "--s", "6/5"]), "1");
    assert_eq!(last(&["lmin", "two_chord", "a=1", "A=3/2", "case=2", "rmax=4", "--s", "inf"]), "inf");
    // Bars cut by the truncation leave the answer open.
    assert_eq!(last(&["lmin", "two_chord", "a=1", "A=3/2", "case=2", "rmax=5/4", "--s", "7/5"]), "inf uncertain");
}

#[test]
fn bonded_and_bounds() {
    let last = |args: &[&str]| ok(args).lines().last().unwrap().to_string();
    assert_eq!(last(&["bonded", "two_fiber", "L=2", "rmax=7"]), "yes");
    assert_eq!(last(&["bonded", "two_chord", "a=1", "A=3/2", "case=2", "rmax=4"]), "no");
    assert_eq!(last(&["bonded", "two_fiber", "L=2", "rmax=7", "--stable"]), "yes");
    let report = ok(&["bounds", "autonomous", "s_minus=1", "s_plus=3", "l=2", "delta=4"]);
    assert!(report.lines().any(|l| l.split_whitespace().eq(["value", "1"])), "{report}");
    assert_eq!(code(&["bounds", "autonomous", "s_minus=1", "s_plus=3", "l=2"]), 4);
    assert_eq!(code(&["bounds", "nonsense"]), 4);
}

#[test]
fn bounds_reads_l_min_from_a_barcode_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.txt");
    let path = path.to_str().unwrap();
    ok(&["barcode", "two_fiber", "L=2", "rmax=11", "-o", path]);
    let report = ok(&["bounds", "pb_plus", "s_minus=1", "s_plus=3", &format!("barcode={path}")]);
    // 1 / (l_min (s_plus - s_minus)) with l_min = 2
    assert!(report.lines().any(|l| l.split_whitespace().eq(["value", "1/4"])), "{report}");
}

#[test]
fn validate_exit_codes() {
    assert_eq!(code(&["validate", &bundled("specs", "two_fiber_L2.json")]), 0);
    let original = std::fs::read_to_string(bundled("specs", "two_chord_case2.json")).unwrap();
    let dir = tempfile::tempdir().unwrap();

    let zero = dir.path().join("zero.json");
    std::fs::write(&zero, original.replace("\"action\": \"1\"", "\"action\": \"0/1\"")).unwrap();
    let out = run(&["validate", zero.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.contains("NonPositiveAction"), "{}", out.stdout);

    let typo = dir.path().join("typo.json");
    std::fs::write(&typo, original.replace("\"note\"", "\"nmae\"")).unwrap();
    let out = run(&["validate", typo.to_str().unwrap()]);
    assert_eq!(out.code, 4);
    assert!(out.stderr.contains("line 3 column"), "{}", out.stderr);

    assert_eq!(code(&["validate", "no_such_generator"]), 4);
    assert_eq!(code(&["barcode"]), 4);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn budget_is_exit_three() {
    let out = run(&["barcode", "stabilized_two_fiber", "L=1", "rmax=20", "--budget", "100"]);
    assert_eq!(out.code, 3, "{}", out.stderr);
    assert!(out.stderr.contains("100"));
}

#[test]
fn every_generator_output_validates() {
    let cases: &[(&str, &[&str])] = &[
        ("two_fiber", &["L=2"]),
        ("stabilized_two_fiber", &["L=3/2"]),
        ("two_chord", &["a=1", "A=3/2", "case=1"]),
        ("stabilize", &["of=two_fiber", "L=1", "delta=1/3"]),
        ("morse_circle", &["values=1,4,2,3"]),
        ("random", &["max_generators=8"]),
    ];
    assert_eq!(cases.len(), GENERATORS.len());
    let dir = tempfile::tempdir().unwrap();
    for (name, params) in cases {
        for seed in ["1", "2", "3"] {
            let path = dir.path().join(format!("{name}_{seed}.json"));
            let path = path.to_str().unwrap();
            let mut args = vec!["generate", name];
            args.extend_from_slice(params);
            args.extend_from_slice(&["--seed", seed, "-o", path]);
            ok(&args);
            let report = ok(&["validate", path]);
            assert!(report.contains("valid"), "{name}: {report}");
        }
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let runs: &[&[&str]] = &[
        &["barcode", "stabilized_two_fiber", "L=2", "rmax=11"],
        &["barcode", "random", "max_generators=10", "rmax=20", "--format", "svg", "--seed", "9"],
        &["generate", "morse_circle", "points=10", "--seed", "4"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let files: Vec<PathBuf> = (0..2).map(|k| dir.path().join(format!("{i}_{k}"))).collect();
        for f in &files {
            let mut a = args.to_vec();
            a.extend_from_slice(&["-o", f.to_str().unwrap()]);
            ok(&a);
        }
        let first = std::fs::read(&files[0]).unwrap();
        assert_eq!(first, std::fs::read(&files[1]).unwrap(), "{args:?}");
        assert!(String::from_utf8_lossy(&first).contains("sha256:") || args[0] == "generate");
    }
    let one = ok(&["barcode", "random", "rmax=20", "--seed", "1"]);
    let other = ok(&["barcode", "random", "rmax=20", "--seed", "2"]);
    assert_ne!(one, other);
}

#[test]
fn barcode_text_round_trips() {
    for args in [
        &["barcode", "two_fiber", "L=2", "rmax=21"][..],
        &["barcode", "two_chord", "a=1", "A=3/2", "case=2", "rmax=5/4"],
        &["barcode", "random", "rmax=9", "--seed", "11"],
        &["barcode", "morse_circle", "points=10", "rmax=5", "--seed", "3"],
    ] {
        let text = ok(args);
        let parsed = Barcode::from_text(&text).unwrap();
        assert_eq!(Barcode::from_text(&parsed.to_text()).unwrap(), parsed);
        assert_eq!(bars(&parsed.to_text()), bars(&text));
        assert_eq!(parsed.truncation().is_some(), text.contains("# truncation"));
    }
}

#[test]
fn render_matches_barcode_svg_bars() {
    let dir = tempfile::tempdir().unwrap();
    let txt = dir.path().join("b.txt");
    ok(&["barcode", "two_chord", "a=1", "A=3/2", "case=1", "rmax=2", "-o", txt.to_str().unwrap()]);
    let svg = ok(&["render", txt.to_str().unwrap(), "--title", "case 1"]);
    assert_eq!(svg.matches("class=\"arrowhead\"").count(), 2);
    assert!(svg.contains("case 1"));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(code(&["verify", &bundled("scenarios", "free_fibers.json")]), 0);
    let out = run(&["verify", &bundled("scenarios", "not_separating.json")]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("NotSeparating") && out.stderr.contains("no search run"));
    assert_eq!(out.stdout, "");
    let reeb = ok(&["chord-search", &bundled("scenarios", "conformal_reeb.json")]);
    assert!(reeb.contains("max_ratio"));
}

#[test]
fn a_stated_delta_above_the_sampled_one_is_rejected() {
    let text = std::fs::read_to_string(bundled("scenarios", "free_fibers.json")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(&path, text.replace("\"delta\": \"4\"", "\"delta\": \"5\"")).unwrap();
    let out = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.code, 2, "{}", out.stderr);
}
