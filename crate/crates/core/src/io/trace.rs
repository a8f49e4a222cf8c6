use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::tempering::TraceRecord;

pub const TRACE_HEADER: [&str; 5] = [
    "wall_seconds",
    "step",
    "incumbent_obj",
    "best_energy",
    "feasible_found",
];

/// `%.17g`-style rendering: 17 significant digits, trailing zeros trimmed,
/// scientific notation outside `1e-4 <= |x| < 1e17`. Parsing the result
/// recovers `x` exactly.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-4..17).contains(&exp) {
        trim(&format!("{:.*}", (16 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    }
}

/// Writes records as CSV (LF line endings) under [`TRACE_HEADER`].
pub fn write_trace<W: Write>(records: &[TraceRecord], sink: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(TRACE_HEADER)?;
    for r in records {
        w.write_record([
            format_g17(r.wall_seconds),
            r.step.to_string(),
            r.incumbent_obj.map(format_g17).unwrap_or_default(),
            format_g17(r.best_energy),
            r.feasible_found.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn trace_to_string(records: &[TraceRecord]) -> String {
    let mut buf = Vec::new();
    write_trace(records, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("trace is ASCII")
}

/// Parses a file produced by [`write_trace`].
pub fn read_trace<R: Read>(source: R) -> Result<Vec<TraceRecord>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = rd.headers()?.clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(Error::Parse {
            line: 1,
            field: 1,
            msg: format!("unexpected trace header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let field = |f: usize| -> Result<&str> {
            rec.get(f).ok_or_else(|| Error::Parse {
                line,
                field: f + 1,
                msg: "missing field".into(),
            })
        };
        let bad = |f: usize, what: &str| Error::Parse {
            line,
            field: f + 1,
            msg: format!("invalid {what}"),
        };
        let real = |f: usize| -> Result<f64> { field(f)?.parse().map_err(|_| bad(f, "number")) };
        out.push(TraceRecord {
            wall_seconds: real(0)?,
            step: field(1)?.parse().map_err(|_| bad(1, "step"))?,
            incumbent_obj: match field(2)? {
                "" => None,
                _ => Some(real(2)?),
            },
            best_energy: real(3)?,
            feasible_found: field(4)?.parse().map_err(|_| bad(4, "boolean"))?,
        });
    }
    Ok(out)
}
