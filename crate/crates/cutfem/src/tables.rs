//! Convergence tables as CSV: time levels as rows, space levels as columns,
//! a trailing `eoc_t` column and `eoc_x`/`eoc_xt`/`eoc_xxt` footer rows.

use cutfem_core::analysis::ConvergenceTable;

use crate::error::{AppError, AppResult};

pub const CORNER: &str = "L_t\\L_x";
pub const MISSING: &str = "--";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    /// Errors with three significant digits, rates with two decimals.
    Short,
    /// Shortest representation that parses back to the same `f64`.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Footer {
    EocX,
    EocXt,
    EocXxt,
}

impl Footer {
    pub fn label(self) -> &'static str {
        match self {
            Footer::EocX => "eoc_x",
            Footer::EocXt => "eoc_xt",
            Footer::EocXxt => "eoc_xxt",
        }
    }

    fn values(self, table: &ConvergenceTable) -> Vec<Option<f64>> {
        match self {
            Footer::EocX => table.eoc_x(),
            Footer::EocXt => table.eoc_xt(),
            Footer::EocXxt => table.eoc_xxt(),
        }
    }
}

fn error_cell(v: Option<f64>, precision: Precision) -> String {
    match v {
        None => MISSING.into(),
        Some(v) => match precision {
            Precision::Short => format!("{v:.2e}"),
            Precision::Full => format!("{v:e}"),
        },
    }
}

fn rate_cell(v: Option<f64>, precision: Precision) -> String {
    match v {
        None => MISSING.into(),
        Some(v) => match precision {
            Precision::Short => format!("{v:.2}"),
            Precision::Full => format!("{v:e}"),
        },
    }
}

pub fn render(table: &ConvergenceTable, footers: &[Footer], precision: Precision) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![CORNER.to_string()];
    header.extend(table.lx_levels.iter().map(usize::to_string));
    header.push("eoc_t".into());
    w.write_record(&header).expect("in-memory write");
    let eoc_t = table.eoc_t();
    for (r, lt) in table.lt_levels.iter().enumerate() {
        let mut row = vec![lt.to_string()];
        row.extend(table.errors[r].iter().map(|&e| error_cell(e, precision)));
        row.push(rate_cell(eoc_t[r], precision));
        w.write_record(&row).expect("in-memory write");
    }
    for footer in footers {
        let mut row = vec![footer.label().to_string()];
        row.extend(footer.values(table).into_iter().map(|e| rate_cell(e, precision)));
        row.push(String::new());
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// Recovers the error grid from rendered CSV; footer rows are recomputed
/// from the errors and not read back.
pub fn parse(text: &str) -> AppResult<ConvergenceTable> {
    let bad = |message: String| AppError::Parse {
        path: "<table>".into(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = records
        .next()
        .ok_or_else(|| bad("empty table".into()))?
        .map_err(|e| bad(e.to_string()))?;
    if header.get(0) != Some(CORNER) || header.len() < 2 || header.get(header.len() - 1) != Some("eoc_t") {
        return Err(bad("unexpected header".into()));
    }
    let lx_levels = (1..header.len() - 1)
        .map(|i| header[i].parse::<usize>().map_err(|e| bad(e.to_string())))
        .collect::<AppResult<Vec<_>>>()?;
    let mut lt_levels = Vec::new();
    let mut errors = Vec::new();
    for record in records {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let label = &record[0];
        if label.starts_with("eoc_") {
            continue;
        }
        lt_levels.push(label.parse::<usize>().map_err(|e| bad(e.to_string()))?);
        let row = (1..=lx_levels.len())
            .map(|i| match &record[i] {
                MISSING => Ok(None),
                s => s.parse::<f64>().map(Some).map_err(|e| bad(format!("`{s}`: {e}"))),
            })
            .collect::<AppResult<Vec<_>>>()?;
        errors.push(row);
    }
    Ok(ConvergenceTable {
        lt_levels,
        lx_levels,
        errors,
    })
}
