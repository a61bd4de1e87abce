use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use aggame::commands::Input;
use aggame::gamefile::{parse_game_file, write_game_file};
use proptest::prelude::*;

fn games_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("games")
}

fn game(name: &str) -> String {
    games_dir().join(name).display().to_string()
}

fn aggame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aggame")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn bundled_games_round_trip() {
    let mut seen = 0;
    for entry in std::fs::read_dir(games_dir()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed = parse_game_file(&text, 20).unwrap();
        let canonical = write_game_file(&parsed);
        assert_eq!(parse_game_file(&canonical, 20).unwrap(), parsed, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 6);
}

#[test]
fn dilemma_aggregates_to_weapons_only() {
    let out = aggame(&["aggregate", "--game", &game("discursive.game")]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().any(|l| l == "outcome 1 0 0"));
}

#[test]
fn unanimous_profile_is_echoed() {
    let out = aggame(&["aggregate", "--game", &game("discursive.game"), "--profile", "011 011 011"]);
    assert!(stdout(&out).lines().any(|l| l == "outcome 0 1 1"));
}

#[test]
fn malformed_profile_reports_its_position() {
    let out = aggame(&["aggregate", "--game", &game("discursive.game"), "--profile", "101 1x0 000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("column 6"), "{}", stderr(&out));
}

#[test]
fn malformed_game_file_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.game");
    std::fs::write(&path, "voters 3\nissues 1\ngoal 1 p1\ngoal 2 p1 | \ngoal 3 top\n").unwrap();
    let out = aggame(&["nash", "--game", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));
}

#[test]
fn own_issue_profile_is_flagged() {
    let out = aggame(&["nash", "--game", &game("own-issue.game"), "--machine"]);
    let text = stdout(&out);
    let row = text.lines().find(|l| l.starts_with("100 010 001\t")).unwrap();
    let cells: Vec<&str> = row.split('\t').collect();
    assert_eq!(cells[2], "NE truthful:N totally-inefficient:N");
}

#[test]
fn indifferent_voters_make_all_profiles_equilibria() {
    let out = aggame(&["nash", "--game", &game("indifferent.game"), "--machine"]);
    let records = stdout(&out).lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(records, 64);
}

#[test]
fn single_issue_equilibria_match_hand_enumeration() {
    // voters 1 and 2 want p; a profile fails only if one of them can flip
    // the outcome to accepted: exactly one of them votes 1 with voter 3 at 0,
    // or both vote 0 with voter 3 at 1
    let out = aggame(&["nash", "--game", &game("single-issue.game"), "--machine"]);
    let profiles: Vec<String> = stdout(&out)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').next().unwrap().to_string())
        .collect();
    assert_eq!(profiles, vec!["0 0 0", "0 1 1", "1 0 1", "1 1 0", "1 1 1"]);
}

#[test]
fn queried_coalitions_appear_in_the_flags() {
    let out = aggame(&[
        "nash",
        "--game",
        &game("own-issue.game"),
        "--coalition",
        "{1,2}",
        "--coalition",
        "N",
        "--machine",
    ]);
    let text = stdout(&out);
    let row = text.lines().find(|l| l.starts_with("110 110 001\t")).unwrap();
    assert!(row.contains("efficient:{1,2}"), "{row}");
}

#[test]
fn opposed_pair_has_no_surviving_equilibrium() {
    let out = aggame(&["survive", "--game", &game("opposed.game"), "--machine"]);
    let text = stdout(&out);
    let statuses: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').nth(2).unwrap())
        .collect();
    assert_eq!(statuses.len(), 640);
    assert!(statuses.iter().all(|&s| s == "REFUTED"));
}

#[test]
fn dilemma_statuses() {
    let out = aggame(&["survive", "--game", &game("discursive.game"), "--machine"]);
    let text = stdout(&out);
    let status = |p: &str| {
        text.lines()
            .find(|l| l.starts_with(&format!("{p}\t")))
            .map(|l| l.split('\t').nth(2).unwrap().to_string())
            .unwrap()
    };
    assert_eq!(status("101 110 000"), "REFUTED");
    assert_eq!(status("110 110 110"), "CERTIFIED");
}

#[test]
fn indifferent_voters_are_all_certified() {
    let out = aggame(&["survive", "--game", &game("indifferent.game")]);
    assert!(stdout(&out).starts_with("64 profiles: 64 CERTIFIED, 0 REFUTED, 0 UNKNOWN"));
}

#[test]
fn survival_needs_uniform_cube_games() {
    let out = aggame(&["survive", "--game", &game("parity.game")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cube goals"), "{}", stderr(&out));
}

#[test]
fn witnesses_are_serialized_on_request() {
    let out = aggame(&[
        "survive",
        "--game",
        &game("discursive.game"),
        "--profile",
        "101 110 000",
        "--witness",
        "--machine",
    ]);
    let text = stdout(&out);
    let headers: Vec<&str> = text.lines().filter(|l| l.starts_with("# ") && !l.contains("sha256")).collect();
    assert_eq!(headers[1], "# profile\tpayer\ttransfer-profile\tpayee\tamount");
    let witness_rows = text.lines().filter(|l| l.split('\t').count() == 5 && !l.starts_with('#')).count();
    assert_eq!(witness_rows, 1920 + 1);
}

#[test]
fn paradox_report() {
    let out = aggame(&["paradox", "--game", &game("discursive.game")]);
    let text = stdout(&out);
    assert!(text.contains("responsible voters {2}"));
    let row = text.lines().find(|l| l.starts_with("101 110 000")).unwrap();
    let cells: Vec<&str> = row.split_whitespace().collect();
    assert_eq!(&cells[3..], &["100", "no", "111", "yes", "REFUTED"]);
}

#[test]
fn paradox_needs_a_constraint() {
    let out = aggame(&["paradox", "--game", &game("own-issue.game")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("constraint"));
}

#[test]
fn trivial_constraint_has_no_paradox() {
    let text = std::fs::read_to_string(games_dir().join("discursive.game"))
        .unwrap()
        .replace("constraint W -> (F | P)", "constraint top");
    let report = aggame::commands::paradox(&Input::from_text(&text, 20).unwrap(), 20).unwrap();
    assert!(report.summary.iter().any(|l| l == "responsible voters {1,2,3}"));
    assert!(report.sections[0].records.iter().all(|r| r[2] == "yes" && r[4] == "no"));
}

#[test]
fn verify_passes_with_the_default_seed() {
    let out = aggame(&["verify", "--machine"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    for row in text.lines().filter(|l| !l.starts_with('#')) {
        assert_eq!(row.split('\t').nth(1), Some("pass"), "{row}");
    }
}

#[test]
fn verify_catches_the_inverted_dominance_mutant() {
    let out = aggame(&["verify", "--suite", "truthful-dominance", "--count", "20", "--mutant", "invert-dominance"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("truthful-dominance") && text.contains("fail"));
    assert!(text.contains("beats"), "{text}");
}

#[test]
fn verify_with_zero_count_is_skipped() {
    let out = aggame(&["verify", "--count", "0", "--machine"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for row in text.lines().filter(|l| !l.starts_with('#')) {
        assert_eq!(row.split('\t').nth(1), Some("skipped"), "{row}");
    }
}

#[test]
fn verify_checks_a_given_game() {
    let out = aggame(&["verify", "--count", "0", "--game", &game("own-issue.game"), "--machine"]);
    let text = stdout(&out);
    let row = text.lines().find(|l| l.starts_with("game-file")).unwrap();
    assert_eq!(row.split('\t').nth(1), Some("pass"));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        vec!["nash", "--game", "discursive.game", "--machine"],
        vec!["survive", "--game", "discursive.game"],
        vec!["verify", "--count", "5", "--machine"],
    ] {
        let args: Vec<String> = args
            .iter()
            .map(|a| if a.ends_with(".game") { game(a) } else { a.to_string() })
            .collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(aggame(&args).stdout, aggame(&args).stdout);
    }
}

#[test]
fn grid_cross_check_column() {
    let out = aggame(&[
        "survive",
        "--game",
        &game("single-issue.game"),
        "--grid",
        "default",
        "--selection",
        "punishing",
        "--machine",
    ]);
    let text = stdout(&out);
    for row in text.lines().filter(|l| !l.starts_with('#')) {
        let cells: Vec<&str> = row.split('\t').collect();
        match cells[2] {
            "CERTIFIED" => assert_eq!(cells[5], "yes", "{row}"),
            "REFUTED" => assert_eq!(cells[5], "no", "{row}"),
            other => panic!("{other}"),
        }
    }
}

#[test]
fn cap_is_enforced_with_the_bound_stated() {
    let out = aggame(&["nash", "--game", &game("opposed.game"), "--cap", "8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("needs 10 bits, cap is 8"), "{}", stderr(&out));
}

fn formula_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![Just("a".to_string()), Just("b".to_string()), Just("top".to_string())];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| format!("!({f})")),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("({x}) & ({y})")),
            (inner.clone(), inner).prop_map(|(x, y)| format!("({x}) -> ({y})")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn written_files_parse_back(
        goals in prop::collection::vec(formula_text(), 3),
        pay in prop::collection::vec((0usize..3, 0u64..4, -5i64..6, 1i64..4), 0..6),
        quota in prop::option::of((1usize..=3, 1usize..=3)),
    ) {
        let mut text = String::from("voters 3\nissues 2\nnames a b\n");
        if let Some((q1, q2)) = quota {
            text.push_str(&format!("aggregator quota {q1} {q2}\n"));
        }
        for (i, g) in goals.iter().enumerate() {
            text.push_str(&format!("goal {} {g}\n", i + 1));
        }
        text.push_str("payoffs uniform\n");
        for (i, outcome, num, den) in pay {
            text.push_str(&format!("payoff {} {:02b} {num}/{den}\n", i + 1, outcome));
        }
        let parsed = parse_game_file(&text, 20).unwrap();
        let written = write_game_file(&parsed);
        prop_assert_eq!(parse_game_file(&written, 20).unwrap(), parsed);
    }
}
