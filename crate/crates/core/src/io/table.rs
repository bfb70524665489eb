use std::collections::BTreeMap;
use std::path::Path;

use super::{read_file, IoError};
use crate::domain::{Criterion, Scenario};

/// Rows keyed by action id, in file order.
pub type PerformanceTable = Vec<(String, BTreeMap<String, f64>)>;

fn csv_error(e: csv::Error) -> IoError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    IoError::Csv {
        line,
        message: e.to_string(),
    }
}

/// Reads a performance table whose first column is `action` and whose other
/// columns are criterion ids. Cells may be numbers or qualitative labels.
pub fn read_performance_csv(text: &str, criteria: &[Criterion]) -> Result<PerformanceTable, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_error)?.clone();
    if headers.get(0) != Some("action") {
        return Err(IoError::Csv {
            line: 1,
            message: "first column must be \"action\"".into(),
        });
    }
    let columns = headers
        .iter()
        .skip(1)
        .map(|id| {
            criteria.iter().find(|c| c.id == id).ok_or_else(|| IoError::Csv {
                line: 1,
                message: format!("unknown criterion {id:?}"),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let action = record.get(0).unwrap_or_default().to_string();
        let mut perf = BTreeMap::new();
        for (c, cell) in columns.iter().zip(record.iter().skip(1)) {
            let v = c.scale.parse_cell(cell).map_err(|e| IoError::Csv {
                line,
                message: format!("action {action}, criterion {}: {e}", c.id),
            })?;
            perf.insert(c.id.clone(), v);
        }
        rows.push((action, perf));
    }
    Ok(rows)
}

/// Replaces the performances of the listed actions. Every row must name an
/// action of the scenario.
pub fn apply_performance_table(s: &mut Scenario, table: PerformanceTable) -> Result<(), IoError> {
    for (id, perf) in table {
        let i = s
            .action_index(&id)
            .ok_or_else(|| IoError::decode(format!("actions.{id}"), "unknown action id"))?;
        s.actions[i].performances = perf;
    }
    Ok(())
}

pub fn load_performance_csv(path: impl AsRef<Path>, criteria: &[Criterion]) -> Result<PerformanceTable, IoError> {
    read_performance_csv(&read_file(path.as_ref())?, criteria)
}

/// Writes the scenario's performance table with qualitative labels.
pub fn write_performance_csv(s: &Scenario) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = std::iter::once("action").chain(s.criteria.iter().map(|c| c.id.as_str()));
    w.write_record(header).expect("in-memory write");
    for a in &s.actions {
        let mut row = vec![a.id.clone()];
        for c in &s.criteria {
            row.push(
                a.performances
                    .get(&c.id)
                    .map(|&v| c.scale.format_value(v))
                    .unwrap_or_default(),
            );
        }
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
