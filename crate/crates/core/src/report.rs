//! JSON / CSV / text serialization of congruence records.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::congruences::{BoundKind, CongruenceRecord};
use crate::error::{Error, Result};
use crate::padic::Valuation;

pub const CSV_HEADER: &str = "p,a,n,r,j,sum,valuation,bound,bound_kind,tight";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            _ => Err(Error::InvalidArgument(format!(
                "unknown output format {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    p: u64,
    a: u32,
    n: u64,
    r: i64,
    j: u64,
    sum: String,
    valuation: String,
    bound: u64,
    bound_kind: String,
    tight: bool,
}

fn ser_err(e: impl std::fmt::Display) -> Error {
    Error::Serialization(e.to_string())
}

pub fn to_json(records: &[CongruenceRecord]) -> Result<String> {
    let mut out = serde_json::to_string_pretty(records).map_err(ser_err)?;
    out.push('\n');
    Ok(out)
}

pub fn from_json(text: &str) -> Result<Vec<CongruenceRecord>> {
    serde_json::from_str(text).map_err(ser_err)
}

pub fn to_csv(records: &[CongruenceRecord]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    if records.is_empty() {
        writer
            .write_record(CSV_HEADER.split(','))
            .map_err(ser_err)?;
    }
    for r in records {
        writer
            .serialize(CsvRow {
                p: r.p,
                a: r.a,
                n: r.n,
                r: r.r,
                j: r.j,
                sum: r.sum.to_string(),
                valuation: r.valuation.to_string(),
                bound: r.bound,
                bound_kind: r.bound_kind.to_string(),
                tight: r.tight,
            })
            .map_err(ser_err)?;
    }
    let bytes = writer.into_inner().map_err(ser_err)?;
    String::from_utf8(bytes).map_err(ser_err)
}

pub fn from_csv(text: &str) -> Result<Vec<CongruenceRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in reader.deserialize::<CsvRow>() {
        let row = row.map_err(ser_err)?;
        out.push(CongruenceRecord {
            p: row.p,
            a: row.a,
            n: row.n,
            r: row.r,
            j: row.j,
            sum: row.sum.parse().map_err(ser_err)?,
            valuation: row.valuation.parse::<Valuation>()?,
            bound: row.bound,
            bound_kind: row.bound_kind.parse::<BoundKind>()?,
            tight: row.tight,
        });
    }
    Ok(out)
}

pub fn to_text(records: &[CongruenceRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(
            out,
            "p={} a={} n={} r={} j={} sum={} ord={} bound={} [{}]{}{}",
            r.p,
            r.a,
            r.n,
            r.r,
            r.j,
            r.sum,
            r.valuation,
            r.bound,
            r.bound_kind,
            if r.tight { " tight" } else { "" },
            if r.passes() { "" } else { " FAIL" },
        );
    }
    out
}

pub fn render(records: &[CongruenceRecord], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => to_json(records),
        OutputFormat::Csv => to_csv(records),
        OutputFormat::Text => Ok(to_text(records)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruences::{fleck_sum, verify_sweep, SumKind, SweepSpec};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn sample() -> Vec<CongruenceRecord> {
        let mut records = verify_sweep(&SweepSpec::standard(SumKind::Fleck, 2, 1, 6, 2))
            .unwrap()
            .records;
        records.push(CongruenceRecord::new(
            3,
            1,
            4,
            7,
            0,
            BigInt::from(0),
            BoundKind::Fleck,
        ));
        records
    }

    #[test]
    fn csv_header_and_row() {
        let rec = CongruenceRecord::new(3, 1, 5, 0, 0, fleck_sum(5, 0, 0, 3, 1), BoundKind::Fleck);
        let text = to_csv(&[rec]).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("3,1,5,0,0,9,2,2,fleck,true"));
        assert_eq!(to_csv(&[]).unwrap().trim(), CSV_HEADER);
    }

    #[test]
    fn json_shape() {
        let rec = CongruenceRecord::new(2, 1, 7, 0, 1, fleck_sum(7, 0, 1, 2, 1), BoundKind::Fleck);
        let value: serde_json::Value = serde_json::from_str(&to_json(&[rec]).unwrap()).unwrap();
        let obj = &value[0];
        assert_eq!(obj["sum"], "-112");
        assert_eq!(obj["valuation"], 4);
        assert_eq!(obj["bound_kind"], "fleck");
        assert_eq!(obj["tight"], true);
    }

    #[test]
    fn round_trips() {
        let records = sample();
        assert_eq!(from_json(&to_json(&records).unwrap()).unwrap(), records);
        assert_eq!(from_csv(&to_csv(&records).unwrap()).unwrap(), records);
    }

    proptest! {
        #[test]
        fn json_round_trip_arbitrary(
            n in 0u64..60, r in -10i64..10, j in 0u64..6,
            big in proptest::collection::vec(any::<u32>(), 0..5),
            negative in any::<bool>(),
        ) {
            let mut sum = BigInt::from_slice(num_bigint::Sign::Plus, &big);
            if negative { sum = -sum; }
            let rec = CongruenceRecord::new(5, 2, n, r, j, sum, BoundKind::SunDavis);
            let text = to_json(std::slice::from_ref(&rec)).unwrap();
            prop_assert_eq!(from_json(&text).unwrap(), vec![rec.clone()]);
            let text = to_csv(std::slice::from_ref(&rec)).unwrap();
            prop_assert_eq!(from_csv(&text).unwrap(), vec![rec]);
        }
    }
}
