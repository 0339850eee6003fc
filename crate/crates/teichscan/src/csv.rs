//! Scan rows as CSV. The first line is `# schema: teichscan-scan-csv/1`;
//! the class columns come from the classifier of one chosen kind.

use teichscan_core::estimators::{Direction, EssentialClass, Kind};
use teichscan_core::experiments::{RowFlag, ScanResult, ScanRow};

use crate::error::{CliError, CliResult};

pub const CSV_SCHEMA: &str = "teichscan-scan-csv/1";
pub const HEADER: &str = "t,flat_len,h,v,ext,hyp,ext_lb,hyp_lb,class,case,dominance,flags";

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Horizontal => "horizontal",
        Direction::Vertical => "vertical",
        Direction::Balanced => "balanced",
    }
}

fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:?}")
    }
}

pub fn row_line(r: &ScanRow, kind: Kind) -> String {
    let class: Option<&EssentialClass> = match kind {
        Kind::Ext => r.class_ext.as_ref(),
        Kind::Hyp => r.class_hyp.as_ref(),
    };
    let (dir, case, dom) = match class {
        Some(c) => (direction_name(c.direction).to_string(), c.case.number(kind).to_string(), num(c.dominance)),
        None => (String::new(), String::new(), "NaN".into()),
    };
    let flags: Vec<&str> = r.flags.iter().map(|f| f.name()).collect();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        num(r.t),
        num(r.flat_length),
        num(r.h),
        num(r.v),
        num(r.ext),
        num(r.hyp),
        num(r.ext_lower),
        num(r.hyp_lower),
        dir,
        case,
        dom,
        flags.join(";")
    )
}

pub fn to_csv(scan: &ScanResult, kind: Kind) -> String {
    let mut out = format!("# schema: {CSV_SCHEMA}\n{HEADER}\n");
    for r in &scan.rows {
        out.push_str(&row_line(r, kind));
        out.push('\n');
    }
    out
}

/// One parsed CSV line; classes are kept as text.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub t: f64,
    pub flat_length: f64,
    pub h: f64,
    pub v: f64,
    pub ext: f64,
    pub hyp: f64,
    pub ext_lower: f64,
    pub hyp_lower: f64,
    pub class: String,
    pub case: Option<u8>,
    pub dominance: f64,
    pub flags: Vec<String>,
}

pub fn from_csv(text: &str) -> CliResult<Vec<CsvRow>> {
    let mut lines = text.lines();
    let first = lines.next().unwrap_or_default();
    match first.strip_prefix("# schema:").map(str::trim) {
        Some(CSV_SCHEMA) => {}
        Some(other) => return Err(CliError::config(format!("unknown csv schema {other:?}, expected {CSV_SCHEMA}"))),
        None => return Err(CliError::config("csv scan has no schema line")),
    }
    if lines.next() != Some(HEADER) {
        return Err(CliError::config("csv scan header does not match"));
    }
    let mut out = Vec::new();
    for (k, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 12 {
            return Err(CliError::config(format!("csv row {} has {} fields", k + 1, f.len())));
        }
        let x = |i: usize| -> CliResult<f64> {
            f[i].parse::<f64>().map_err(|e| CliError::config(format!("csv row {}: {e}", k + 1)))
        };
        out.push(CsvRow {
            t: x(0)?,
            flat_length: x(1)?,
            h: x(2)?,
            v: x(3)?,
            ext: x(4)?,
            hyp: x(5)?,
            ext_lower: x(6)?,
            hyp_lower: x(7)?,
            class: f[8].to_string(),
            case: if f[9].is_empty() {
                None
            } else {
                Some(f[9].parse().map_err(|_| CliError::config(format!("csv row {}: bad case", k + 1)))?)
            },
            dominance: x(10)?,
            flags: f[11].split(';').filter(|s| !s.is_empty()).map(String::from).collect(),
        });
    }
    Ok(out)
}

/// Rows as scan rows: values and flags, without classes.
pub fn scan_from_csv(text: &str, m0: f64) -> CliResult<ScanResult> {
    let rows = from_csv(text)?
        .into_iter()
        .map(|r| {
            let flags = r
                .flags
                .iter()
                .map(|f| match f.as_str() {
                    "budget" => RowFlag::Budget,
                    "tighten" => RowFlag::Tighten,
                    _ => RowFlag::Failed,
                })
                .collect();
            ScanRow {
                t: r.t,
                flat_length: r.flat_length,
                h: r.h,
                v: r.v,
                ext: r.ext,
                hyp: r.hyp,
                ext_lower: r.ext_lower,
                hyp_lower: r.hyp_lower,
                class_ext: None,
                class_hyp: None,
                is_short: false,
                num_shorts: 0,
                num_pieces: 0,
                systole: f64::NAN,
                flags,
                message: None,
            }
        })
        .collect();
    Ok(ScanResult { surface: String::new(), curve: String::new(), seed: None, m0, rows })
}
