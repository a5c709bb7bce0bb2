//! Readers and writers for result rows and rank tables.
//!
//! The CSV column set is the stable interface other tooling scrapes:
//! `game,agent,budget,C,RL,Q,seed,episode,win,score,decisions,fm_calls,ms`
//! with `Q` left empty for agents without a blend weight. The JSON form
//! carries the identical rows (with `Q` as `null`).

use std::io::{Read, Write};

use thiserror::Error;

use super::{RankTable, RunRecord};

/// The CSV header every results file starts with.
pub const CSV_HEADER: &str = "game,agent,budget,C,RL,Q,seed,episode,win,score,decisions,fm_calls,ms";

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub fn write_records_csv<W: Write>(writer: W, records: &[RunRecord]) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv<R: Read>(reader: R) -> Result<Vec<RunRecord>, OutputError> {
    let mut r = csv::Reader::from_reader(reader);
    let mut records = Vec::new();
    for row in r.deserialize() {
        records.push(row?);
    }
    Ok(records)
}

pub fn write_records_json<W: Write>(writer: W, records: &[RunRecord]) -> Result<(), OutputError> {
    serde_json::to_writer_pretty(writer, records)?;
    Ok(())
}

pub fn read_records_json<R: Read>(reader: R) -> Result<Vec<RunRecord>, OutputError> {
    Ok(serde_json::from_reader(reader)?)
}

/// Rank table as CSV: one row per (game, budget) cell plus a final `mean`
/// row, one column per agent.
pub fn write_rank_table_csv<W: Write>(writer: W, table: &RankTable) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["game".to_string(), "budget".to_string()];
    header.extend(table.agents.iter().cloned());
    w.write_record(&header)?;
    for cell in &table.cells {
        let mut row = vec![cell.game.clone(), cell.budget.to_string()];
        row.extend(cell.ranks.iter().map(|r| r.to_string()));
        w.write_record(&row)?;
    }
    let mut mean = vec!["mean".to_string(), String::new()];
    mean.extend(table.mean_ranks.iter().map(|r| format!("{r:.3}")));
    w.write_record(&mean)?;
    w.flush()?;
    Ok(())
}

/// Fixed-width console rendering of a rank table.
pub fn format_rank_table(table: &RankTable) -> String {
    let label_width = table
        .cells
        .iter()
        .map(|c| c.game.len() + 1 + c.budget.to_string().len())
        .chain(["mean".len()])
        .max()
        .unwrap_or(4)
        .max(4);
    let col_width = table.agents.iter().map(|a| a.len()).max().unwrap_or(4).max(5);
    let mut out = String::new();
    out.push_str(&format!("{:label_width$}", "cell"));
    for agent in &table.agents {
        out.push_str(&format!("  {agent:>col_width$}"));
    }
    out.push('\n');
    for cell in &table.cells {
        let label = format!("{}@{}", cell.game, cell.budget);
        out.push_str(&format!("{label:label_width$}"));
        for r in &cell.ranks {
            out.push_str(&format!("  {r:>col_width$.1}"));
        }
        out.push('\n');
    }
    out.push_str(&format!("{:label_width$}", "mean"));
    for r in &table.mean_ranks {
        out.push_str(&format!("  {r:>col_width$.3}"));
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::super::RankCell;
    use super::*;

    fn sample_records() -> Vec<RunRecord> {
        vec![
            RunRecord {
                game: "gapworld".into(),
                agent: "mixmax".into(),
                budget: 250,
                c: 0.25,
                rl: 10,
                q: Some(0.25),
                seed: 42,
                episode: 0,
                win: 1,
                score: 12.0,
                decisions: 9,
                fm_calls: 2250,
                ms: 3,
            },
            RunRecord {
                game: "twoarm".into(),
                agent: "o-mcts".into(),
                budget: 500,
                c: std::f64::consts::FRAC_1_SQRT_2,
                rl: 25,
                q: None,
                seed: 43,
                episode: 1,
                win: 0,
                score: 0.1,
                decisions: 1,
                fm_calls: 500,
                ms: 0,
            },
        ]
    }

    #[test]
    fn csv_starts_with_the_documented_header() {
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &sample_records()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let first = lines.next().unwrap();
        assert!(first.starts_with("gapworld,mixmax,250,0.25,10,0.25,42,0,1,12"), "{first}");
    }

    #[test]
    fn absent_q_serialises_as_an_empty_field() {
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &sample_records()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row = text.lines().nth(2).unwrap();
        assert!(row.contains(",25,,"), "RL then empty Q: {row}");
    }

    #[test]
    fn csv_round_trips_exactly() {
        let records = sample_records();
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &records).unwrap();
        let back = read_records_csv(buf.as_slice()).unwrap();
        assert_eq!(back, records, "including the full-precision C column");
    }

    #[test]
    fn json_mirrors_the_same_rows() {
        let records = sample_records();
        let mut buf = Vec::new();
        write_records_json(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"Q\": null"), "absent Q is null in JSON");
        assert_eq!(read_records_json(buf.as_slice()).unwrap(), records);
    }

    fn sample_table() -> RankTable {
        RankTable {
            agents: vec!["mcts".into(), "o-mcts".into()],
            cells: vec![
                RankCell { game: "gapworld".into(), budget: 250, ranks: vec![2.0, 1.0] },
                RankCell { game: "twoarm".into(), budget: 250, ranks: vec![1.5, 1.5] },
            ],
            mean_ranks: vec![1.75, 1.25],
        }
    }

    #[test]
    fn rank_table_csv_lists_cells_then_means() {
        let mut buf = Vec::new();
        write_rank_table_csv(&mut buf, &sample_table()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "game,budget,mcts,o-mcts");
        assert_eq!(lines[1], "gapworld,250,2,1");
        assert_eq!(lines[2], "twoarm,250,1.5,1.5");
        assert_eq!(lines[3], "mean,,1.750,1.250");
    }

    #[test]
    fn formatted_table_keeps_columns_aligned() {
        let text = format_rank_table(&sample_table());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].contains("mcts") && lines[0].contains("o-mcts"));
        assert!(lines[1].starts_with("gapworld@250"));
        assert!(lines[3].starts_with("mean"));
        let widths: Vec<usize> = lines.iter().map(|l| l.len()).collect();
        assert!(widths.windows(2).all(|w| w[0] == w[1]), "ragged table: {widths:?}");
    }
}
