//! Drives the compiled binary end to end through temp files.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn omcts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omcts")).args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Unique temp path; the suite runs tests in parallel.
fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("omcts-cli-{}-{name}", std::process::id()))
}

/// Records modulo the wall-time column, which is allowed to vary.
fn strip_ms(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
}

#[test]
fn run_emits_csv_with_the_documented_header() {
    let out = stdout_of(&omcts(&[
        "run", "--game", "twoarm", "--agent", "o-mcts", "--budget", "250", "--seed", "9",
        "--reps", "3",
    ]));
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "game,agent,budget,C,RL,Q,seed,episode,win,score,decisions,fm_calls,ms"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    for (i, row) in rows.iter().enumerate() {
        assert!(row.starts_with("twoarm,o-mcts,250,"), "row: {row}");
        assert!(row.contains(&format!(",{i},")), "episode index present: {row}");
    }
}

#[test]
fn identical_seeds_reproduce_identical_records() {
    let args =
        ["run", "--game", "gapworld", "--agent", "mixmax", "--budget", "250", "--seed", "4",
         "--reps", "2"];
    let first = stdout_of(&omcts(&args));
    let second = stdout_of(&omcts(&args));
    assert_eq!(strip_ms(&first), strip_ms(&second));
}

#[test]
fn json_output_mirrors_the_csv_fields() {
    let out = stdout_of(&omcts(&[
        "run", "--game", "twoarm", "--agent", "mcts", "--reps", "2", "--format", "json",
    ]));
    assert!(out.trim_start().starts_with('['));
    assert!(out.contains("\"Q\": null"), "non-mixmax output leaves Q null:\n{out}");
    assert!(out.contains("\"agent\": \"mcts\""));
    assert_eq!(out.matches("\"episode\"").count(), 2);
}

#[test]
fn q_is_rejected_for_agents_without_a_blend() {
    let out = omcts(&["run", "--game", "twoarm", "--agent", "mcts", "--q", "0.5"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("mixmax"));
}

#[test]
fn unknown_agents_fail_with_a_readable_error() {
    let out = omcts(&["run", "--game", "twoarm", "--agent", "alphabeta"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("alphabeta"));
}

#[test]
fn sweep_then_analyze_round_trips_through_files() {
    let config = scratch("grid.toml");
    let records = scratch("records.csv");
    let ranks = scratch("ranks.csv");
    fs::write(
        &config,
        "games = [\"twoarm\"]\n\
         agents = [\"mcts\", \"o-mcts\"]\n\
         budgets = [100, 250]\n\
         explorations = [0.7071067811865476]\n\
         rollout_lens = [10]\n\
         episodes = 4\n\
         master_seed = 3\n",
    )
    .unwrap();

    let out = omcts(&["sweep", "--config", config.to_str().unwrap(), "--out",
                      records.to_str().unwrap()]);
    stdout_of(&out);
    let written = fs::read_to_string(&records).unwrap();
    assert_eq!(written.lines().count(), 1 + 2 * 2 * 4, "header + agents x budgets x episodes");

    let analysis = stdout_of(&omcts(&[
        "analyze", "--input", records.to_str().unwrap(), "--rank-csv", ranks.to_str().unwrap(),
    ]));
    assert!(analysis.contains("16 records"));
    assert!(analysis.contains("mcts") && analysis.contains("o-mcts"));
    assert!(analysis.contains("Friedman"));
    assert!(analysis.contains("mcts vs o-mcts"));
    let rank_csv = fs::read_to_string(&ranks).unwrap();
    assert!(rank_csv.starts_with("game,budget,mcts,o-mcts"), "{rank_csv}");

    for p in [config, records, ranks] {
        let _ = fs::remove_file(p);
    }
}

#[test]
fn analyze_rejects_missing_and_empty_inputs() {
    let out = omcts(&["analyze", "--input", "/nonexistent/records.csv"]);
    assert!(!out.status.success());

    let empty = scratch("empty.csv");
    fs::write(&empty, "game,agent,budget,C,RL,Q,seed,episode,win,score,decisions,fm_calls,ms\n")
        .unwrap();
    let out = omcts(&["analyze", "--input", empty.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no records"));
    let _ = fs::remove_file(empty);
}

#[test]
fn list_names_every_game_and_agent() {
    let out = stdout_of(&omcts(&["list"]));
    for name in ["gapworld", "twoarm", "chase", "surround"] {
        assert!(out.contains(name), "missing {name}:\n{out}");
    }
    for name in ["mcts", "mixmax", "n-mcts", "o-mcts", "pb-mcts"] {
        assert!(out.contains(name), "missing {name}:\n{out}");
    }
    assert!(out.contains("250"), "budgets listed");
}
