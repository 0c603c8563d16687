//! End-to-end runs of the command layer. Paths are relative to the crate
//! directory, which is the working directory of integration tests.
//!
//! Set `CRYSTOR_UPDATE_GOLDEN=1` to rewrite the golden reports.

use std::fs;
use std::path::Path;

use crystor_cli::{run, Outcome, Payload, Report, Settings};

fn settings() -> Settings {
    Settings { budget: 1 << 20 }
}

fn exec(args: &[&str], settings: Settings) -> Outcome {
    let argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    run(&argv, settings).expect("arguments parse")
}

fn corpus() -> Vec<String> {
    let mut files: Vec<String> = fs::read_dir("corpus")
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .map(|p| p.to_string_lossy().into_owned())
        .collect();
    files.sort();
    files
}

fn error_of(o: &Outcome) -> (String, Option<usize>, Option<usize>) {
    match &o.report.result {
        Payload::Error {
            id, line, column, ..
        } => (id.clone(), *line, *column),
        other => panic!("expected an error, got {other:?}"),
    }
}

#[test]
fn corpus_shape() {
    let files = corpus();
    assert!(files.len() >= 20);
    for p in [2, 3, 5] {
        for v in 1..=12 {
            assert!(
                files.contains(&format!("corpus/tate_p{p}_v{v:02}.toml")),
                "missing tate p={p} v={v}"
            );
        }
    }
    assert!(files.iter().any(|f| f.contains("rank2")));
    assert!(files.iter().any(|f| f.contains("rank3")));
}

#[test]
fn verify_whole_corpus() {
    for f in corpus() {
        let o = exec(&["verify", &f], settings());
        let Payload::Verify { failed, checks, .. } = &o.report.result else {
            panic!("{f}: {:?}", o.report.result);
        };
        let bad: Vec<_> = checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.clone())
            .collect();
        assert_eq!((*failed, o.exit_code), (0, 0), "{f}: {bad:?}");
    }
}

#[test]
fn tate_example() {
    let o = exec(&["tate", "--v", "5", "--p", "5", "--m", "2"], settings());
    assert_eq!(o.exit_code, 0);
    let Payload::Tate(c) = &o.report.result else {
        panic!()
    };
    assert_eq!(c.group.invariants, ["5", "25"]);
    assert_eq!(c.order, "125");
    assert!(o.report.to_human().contains("Z/5 ⊕ Z/25"));
}

#[test]
fn tate_closed_form_matches_file_route() {
    for p in [2, 3, 5] {
        for v in 1..=12 {
            for m in 1..=3 {
                let f = format!("corpus/tate_p{p}_v{v:02}.toml");
                let m = m.to_string();
                let file = exec(&["crys1", "--m", &m, &f], settings());
                let closed = exec(
                    &[
                        "tate",
                        "--v",
                        &v.to_string(),
                        "--p",
                        &p.to_string(),
                        "--m",
                        &m,
                    ],
                    settings(),
                );
                let (Payload::Crys1(a), Payload::Tate(b)) =
                    (&file.report.result, &closed.report.result)
                else {
                    panic!()
                };
                assert_eq!(a.group, b.group, "p={p} v={v} m={m}");
            }
        }
    }
}

#[test]
fn identity_component_group_is_trivial() {
    let o = exec(
        &["component-group", "corpus/rank2_identity_p5.toml"],
        settings(),
    );
    let Payload::ComponentGroup { group, .. } = &o.report.result else {
        panic!()
    };
    assert_eq!(group.display, "trivial");
    assert_eq!(group.order, "1");
}

#[test]
fn a2_oracle_agrees() {
    let o = exec(
        &["crys1", "--m", "1", "--oracle", "corpus/rank2_a2_p3.toml"],
        settings(),
    );
    let Payload::Crys1(c) = &o.report.result else {
        panic!()
    };
    assert_eq!(c.oracle_agrees, Some(true));
    assert_eq!(c.order, "27");
}

#[test]
fn input_errors_are_positioned() {
    let o = exec(
        &["component-group", "tests/inputs/not_prime.toml"],
        settings(),
    );
    assert_eq!(o.exit_code, 1);
    assert_eq!(error_of(&o), ("not-prime".into(), Some(1), Some(5)));

    let o = exec(
        &["component-group", "tests/inputs/missing_row.toml"],
        settings(),
    );
    assert_eq!(o.exit_code, 1);
    assert_eq!(error_of(&o), ("parse-error".into(), Some(3), Some(6)));

    let o = exec(
        &["component-group", "tests/inputs/indefinite.toml"],
        settings(),
    );
    assert_eq!(error_of(&o).0, "not-positive-definite");

    let o = exec(&["component-group", "tests/inputs/syntax.toml"], settings());
    let (id, line, _) = error_of(&o);
    assert_eq!((id.as_str(), o.exit_code), ("parse-error", 1));
    assert!(line.is_some());

    let o = exec(
        &["component-group", "tests/inputs/does_not_exist.toml"],
        settings(),
    );
    assert_eq!(o.exit_code, 1);
}

#[test]
fn bad_level_and_bad_tate_arguments() {
    let o = exec(
        &["crys1", "--m", "0", "corpus/tate_p2_v01.toml"],
        settings(),
    );
    assert_eq!(o.exit_code, 1);
    let o = exec(&["tate", "--v", "0", "--p", "5", "--m", "1"], settings());
    assert_eq!(o.exit_code, 1);
    let o = exec(&["tate", "--v", "3", "--p", "6", "--m", "1"], settings());
    assert_eq!(o.exit_code, 1);
}

#[test]
fn budget_exceeded_exit_code() {
    let o = exec(
        &["crys1", "--m", "2", "--oracle", "corpus/rank3_diag_p3.toml"],
        Settings { budget: 10 },
    );
    assert_eq!(o.exit_code, 3);
    assert_eq!(error_of(&o).0, "budget-exceeded");
}

#[test]
fn clap_rejects_unknown_commands() {
    let argv = vec!["frobnicate".to_string()];
    assert!(run(&argv, settings()).is_err());
}

#[test]
fn json_round_trip() {
    let cases: &[&[&str]] = &[
        &["--json", "les", "corpus/tate_p3_v09.toml"],
        &[
            "--json",
            "torsion",
            "--m",
            "2",
            "corpus/rank2_units_p5.toml",
        ],
        &["--json", "verify", "corpus/rank2_a2_p3.toml"],
        &["--json", "component-group", "tests/inputs/not_prime.toml"],
    ];
    for args in cases {
        let o = exec(args, settings());
        assert!(o.json);
        let text = o.report.to_json();
        let back = Report::from_json(&text).unwrap();
        assert_eq!(back, o.report);
        assert_eq!(back.to_json(), text);
    }
}

#[test]
fn reports_are_deterministic() {
    let args = ["--json", "verify", "--seed", "7", "corpus/rank3_a3_p2.toml"];
    assert_eq!(
        exec(&args, settings()).report.to_json(),
        exec(&args, settings()).report.to_json()
    );
}

const GOLDEN: &[(&str, &[&str])] = &[
    (
        "tate_v5_p5_m2",
        &["--json", "tate", "--v", "5", "--p", "5", "--m", "2"],
    ),
    (
        "component_group_identity",
        &["--json", "component-group", "corpus/rank2_identity_p5.toml"],
    ),
    (
        "component_group_a3",
        &[
            "--json",
            "component-group",
            "--p-part",
            "corpus/rank3_a3_p2.toml",
        ],
    ),
    (
        "crys1_a2_oracle",
        &[
            "--json",
            "crys1",
            "--m",
            "1",
            "--oracle",
            "corpus/rank2_a2_p3.toml",
        ],
    ),
    (
        "torsion_units",
        &[
            "--json",
            "torsion",
            "--m",
            "1",
            "corpus/rank2_units_p5.toml",
        ],
    ),
    (
        "phi_check_diag",
        &[
            "--json",
            "phi-check",
            "--m",
            "2",
            "corpus/rank2_diag24_p2.toml",
        ],
    ),
    ("r1_a3", &["--json", "r1", "corpus/rank3_a3_p2.toml"]),
    (
        "les_tate_p3_v9",
        &["--json", "les", "corpus/tate_p3_v09.toml"],
    ),
    (
        "verify_tate_p5_v5",
        &["--json", "verify", "corpus/tate_p5_v05.toml"],
    ),
    (
        "error_not_prime",
        &["--json", "component-group", "tests/inputs/not_prime.toml"],
    ),
    (
        "error_missing_row",
        &["--json", "component-group", "tests/inputs/missing_row.toml"],
    ),
];

#[test]
fn golden_reports() {
    let update = std::env::var_os("CRYSTOR_UPDATE_GOLDEN").is_some();
    for (name, args) in GOLDEN {
        let path = Path::new("tests/golden").join(format!("{name}.json"));
        let actual = exec(args, settings()).report.to_json();
        if update {
            fs::write(&path, &actual).unwrap();
            continue;
        }
        let expected =
            fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
        assert_eq!(actual, expected, "{name} differs from {}", path.display());
    }
}
