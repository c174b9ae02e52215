//! Tabular view of a trace: one row per event, one column per tick.

use std::fmt::Write;

use crate::bundle::EventKind;
use crate::sim::trace::Trace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimelineRow {
    pub name: String,
    pub kind: EventKind,
    /// Actual (`true`) or potential, per tick.
    pub cells: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timeline {
    pub horizon: u32,
    pub rows: Vec<TimelineRow>,
}

pub fn timeline(trace: &Trace) -> Timeline {
    let rows = trace
        .events
        .iter()
        .map(|e| TimelineRow {
            name: e.name.clone(),
            kind: e.kind,
            cells: (0..trace.horizon).map(|t| e.actual_at(t)).collect(),
        })
        .collect();
    Timeline {
        horizon: trace.horizon,
        rows,
    }
}

impl Timeline {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Aligned text: `=` marks an extended event's actual ticks, `#` a
    /// terminating one's, `.` potential.
    pub fn to_text(&self) -> String {
        if self.rows.is_empty() {
            return String::new();
        }
        let name_width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max(5);
        let kind_width = "terminating".len();
        let cell_width = self.horizon.saturating_sub(1).to_string().len();
        let mut out = String::new();
        let mut header = format!("{:name_width$}  {:kind_width$} ", "event", "kind");
        for t in 0..self.horizon {
            let _ = write!(header, " {t:>cell_width$}");
        }
        out.push_str(header.trim_end());
        out.push('\n');
        for row in &self.rows {
            let mark = match row.kind {
                EventKind::Extended => '=',
                EventKind::Terminating => '#',
            };
            let mut line = format!("{:name_width$}  {:kind_width$} ", row.name, row.kind.keyword());
            for &actual in &row.cells {
                let c = if actual { mark } else { '.' };
                let _ = write!(line, " {c:>cell_width$}");
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        if self.rows.is_empty() {
            return String::new();
        }
        let mut out = String::from("event,kind");
        for t in 0..self.horizon {
            let _ = write!(out, ",{t}");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{},{}", row.name, row.kind.keyword());
            for &actual in &row.cells {
                out.push_str(if actual { ",actual" } else { ",potential" });
            }
            out.push('\n');
        }
        out
    }
}
