//! Reader and writer for the binary subset of (free or fixed) MPS.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ilp::IlpInstance;

/// Magnitudes at or beyond this are read as infinite bounds.
const MPS_INFINITY: f64 = 1e30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Name,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Bounds,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sense {
    N,
    L,
    G,
    E,
}

#[derive(Debug)]
struct Row {
    sense: Sense,
    rhs: f64,
    entries: Vec<(usize, f64)>,
}

#[derive(Debug)]
struct Column {
    name: String,
    integer: bool,
    lo: f64,
    up: f64,
    /// any bound record seen
    bounded: bool,
}

#[derive(Default)]
struct Model {
    name: String,
    maximize: bool,
    objective: Option<usize>,
    rows: Vec<Row>,
    row_names: HashMap<String, usize>,
    cols: Vec<Column>,
    col_names: HashMap<String, usize>,
    obj_coeffs: HashMap<usize, f64>,
    obj_constant: f64,
    free_rows: usize,
}

fn parse_err(line: usize, field: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        field,
        msg: msg.into(),
    }
}

fn number(tok: &str, line: usize, field: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, field, format!("expected a number, found {tok:?}")))?;
    if v.is_nan() {
        return Err(parse_err(line, field, "NaN is not a valid coefficient"));
    }
    Ok(v)
}

fn header(tok: &str, line: usize) -> Result<Section> {
    Ok(match tok.to_ascii_uppercase().as_str() {
        "NAME" => Section::Name,
        "OBJSENSE" => Section::ObjSense,
        "ROWS" => Section::Rows,
        "COLUMNS" => Section::Columns,
        "RHS" => Section::Rhs,
        "BOUNDS" => Section::Bounds,
        "ENDATA" => Section::End,
        s @ ("RANGES" | "SOS" | "QUADOBJ" | "QMATRIX" | "QSECTION" | "QCMATRIX" | "INDICATORS") => {
            return Err(Error::UnsupportedSection {
                line,
                section: s.to_string(),
            })
        }
        other => return Err(parse_err(line, 1, format!("unknown section {other:?}"))),
    })
}

fn set_sense(model: &mut Model, tok: &str, line: usize, field: usize) -> Result<()> {
    model.maximize = match tok.to_ascii_uppercase().as_str() {
        "MAX" | "MAXIMIZE" => true,
        "MIN" | "MINIMIZE" => false,
        other => return Err(parse_err(line, field, format!("unknown objective sense {other:?}"))),
    };
    Ok(())
}

impl Model {
    fn row_index(&self, name: &str, line: usize, field: usize) -> Result<usize> {
        self.row_names
            .get(name)
            .copied()
            .ok_or_else(|| parse_err(line, field, format!("undeclared row {name:?}")))
    }

    fn col_index(&self, name: &str, line: usize, field: usize) -> Result<usize> {
        self.col_names
            .get(name)
            .copied()
            .ok_or_else(|| parse_err(line, field, format!("undeclared column {name:?}")))
    }

    fn add_row(&mut self, toks: &[&str], line: usize) -> Result<()> {
        if toks.len() != 2 {
            return Err(parse_err(line, 1, "ROWS entries need a sense and a name"));
        }
        let sense = match toks[0].to_ascii_uppercase().as_str() {
            "N" => Sense::N,
            "L" => Sense::L,
            "G" => Sense::G,
            "E" => Sense::E,
            other => return Err(parse_err(line, 1, format!("unknown row sense {other:?}"))),
        };
        let name = toks[1].to_string();
        if self.row_names.contains_key(&name) {
            return Err(parse_err(line, 2, format!("row {name:?} declared twice")));
        }
        if sense == Sense::N {
            if self.objective.is_some() {
                // extra free rows carry no constraint
                self.free_rows += 1;
            } else {
                self.objective = Some(self.rows.len());
            }
        }
        self.row_names.insert(name, self.rows.len());
        self.rows.push(Row {
            sense,
            rhs: 0.0,
            entries: Vec::new(),
        });
        Ok(())
    }

    fn add_column_entries(&mut self, toks: &[&str], integer: bool, line: usize) -> Result<()> {
        if toks.len() != 3 && toks.len() != 5 {
            return Err(parse_err(
                line,
                toks.len().min(5) + 1,
                "COLUMNS entries need a column and one or two (row, value) pairs",
            ));
        }
        let j = match self.col_names.get(toks[0]) {
            Some(&j) => {
                if self.cols[j].integer != integer {
                    return Err(parse_err(line, 1, "column split across integer markers"));
                }
                j
            }
            None => {
                let j = self.cols.len();
                self.col_names.insert(toks[0].to_string(), j);
                self.cols.push(Column {
                    name: toks[0].to_string(),
                    integer,
                    lo: 0.0,
                    up: f64::INFINITY,
                    bounded: false,
                });
                j
            }
        };
        for pair in 0..(toks.len() - 1) / 2 {
            let f = 2 + 2 * pair;
            let r = self.row_index(toks[f - 1], line, f)?;
            let v = number(toks[f], line, f + 1)?;
            if !v.is_finite() {
                return Err(parse_err(line, f + 1, "coefficient must be finite"));
            }
            if Some(r) == self.objective {
                if self.obj_coeffs.insert(j, v).is_some() {
                    return Err(parse_err(line, f, "duplicate objective entry"));
                }
            } else {
                let row = &mut self.rows[r];
                if row.entries.iter().any(|&(k, _)| k == j) {
                    return Err(parse_err(line, f, "duplicate matrix entry"));
                }
                row.entries.push((j, v));
            }
        }
        Ok(())
    }

    fn add_rhs(&mut self, toks: &[&str], line: usize) -> Result<()> {
        // an odd token count carries a leading set name
        let skip = toks.len() % 2;
        let pairs = &toks[skip..];
        if pairs.is_empty() || pairs.len() > 4 {
            return Err(parse_err(line, 1, "RHS entries need one or two (row, value) pairs"));
        }
        for (p, kv) in pairs.chunks(2).enumerate() {
            let f = skip + 2 * p + 1;
            let r = self.row_index(kv[0], line, f)?;
            let v = number(kv[1], line, f + 1)?;
            if !v.is_finite() {
                return Err(parse_err(line, f + 1, "right-hand side must be finite"));
            }
            if Some(r) == self.objective {
                self.obj_constant = -v;
            } else {
                self.rows[r].rhs = v;
            }
        }
        Ok(())
    }

    fn add_bound(&mut self, toks: &[&str], line: usize) -> Result<()> {
        if toks.is_empty() {
            return Err(parse_err(line, 1, "empty BOUNDS entry"));
        }
        let kind = toks[0].to_ascii_uppercase();
        let needs_value = matches!(kind.as_str(), "UP" | "LO" | "FX" | "LI" | "UI");
        let rest = &toks[1..];
        // set name is optional in free format
        let (col_f, value) = match (needs_value, rest.len()) {
            (true, 3) => (2, Some(3)),
            (true, 2) => (1, Some(2)),
            (false, 2) if self.col_names.contains_key(rest[0]) && rest[1].parse::<f64>().is_ok() => {
                (1, Some(2))
            }
            (false, 2) => (2, None),
            (false, 1) => (1, None),
            (false, 3) => (2, Some(3)),
            _ => return Err(parse_err(line, 1, "malformed BOUNDS entry")),
        };
        let j = self.col_index(toks[col_f], line, col_f + 1)?;
        let v = match value {
            Some(f) => Some(number(toks[f], line, f + 1)?),
            None => None,
        };
        let clamp = |v: f64| {
            if v >= MPS_INFINITY {
                f64::INFINITY
            } else if v <= -MPS_INFINITY {
                f64::NEG_INFINITY
            } else {
                v
            }
        };
        let col = &mut self.cols[j];
        col.bounded = true;
        match kind.as_str() {
            "UP" => {
                let v = clamp(v.unwrap());
                col.up = v;
                if v < 0.0 && col.lo == 0.0 {
                    col.lo = f64::NEG_INFINITY;
                }
            }
            "LO" => col.lo = clamp(v.unwrap()),
            "FX" => {
                col.lo = clamp(v.unwrap());
                col.up = col.lo;
            }
            "LI" => {
                col.integer = true;
                col.lo = clamp(v.unwrap());
            }
            "UI" => {
                col.integer = true;
                col.up = clamp(v.unwrap());
            }
            "BV" => {
                col.integer = true;
                col.lo = 0.0;
                col.up = 1.0;
            }
            "MI" => col.lo = f64::NEG_INFINITY,
            "PL" => col.up = f64::INFINITY,
            "FR" => {
                col.lo = f64::NEG_INFINITY;
                col.up = f64::INFINITY;
            }
            other => return Err(parse_err(line, 1, format!("unknown bound type {other:?}"))),
        }
        Ok(())
    }

    fn into_instance(self) -> Result<IlpInstance> {
        let obj_row = self.objective.ok_or(Error::MissingObjectiveRow)?;
        let n = self.cols.len();
        if n == 0 {
            return Err(Error::Validation("MPS model declares no columns".into()));
        }
        // integral domain of each column, which must lie inside {0, 1}
        let mut fixed_one = Vec::new();
        let mut fixed_zero = Vec::new();
        for (j, col) in self.cols.iter().enumerate() {
            let non_binary = |reason: String| Error::NonBinaryVariable {
                name: col.name.clone(),
                reason,
            };
            if !col.integer {
                return Err(non_binary("continuous variable".into()));
            }
            if !col.bounded || col.up.is_infinite() {
                return Err(non_binary("integer variable without a finite upper bound".into()));
            }
            let lo = col.lo.ceil();
            let up = col.up.floor();
            if lo < 0.0 || up > 1.0 || lo > up {
                return Err(non_binary(format!("bounds [{}, {}] not within [0, 1]", col.lo, col.up)));
            }
            if lo == 1.0 {
                fixed_one.push(j);
            }
            if up == 0.0 {
                fixed_zero.push(j);
            }
        }

        let sign = if self.maximize { -1.0 } else { 1.0 };
        let mut c = vec![0.0; n];
        for (&j, &v) in &self.obj_coeffs {
            c[j] = sign * v;
        }

        let mut trip = Vec::new();
        let mut b = Vec::new();
        let mut push = |entries: &[(usize, f64)], s: f64, rhs: f64| {
            let r = b.len();
            trip.extend(entries.iter().map(|&(j, v)| (r, j, s * v)));
            b.push(s * rhs);
        };
        for (k, row) in self.rows.iter().enumerate() {
            if k == obj_row {
                continue;
            }
            match row.sense {
                Sense::N => {}
                Sense::L => push(&row.entries, 1.0, row.rhs),
                Sense::G => push(&row.entries, -1.0, row.rhs),
                Sense::E => {
                    push(&row.entries, 1.0, row.rhs);
                    push(&row.entries, -1.0, row.rhs);
                }
            }
        }
        for &j in &fixed_one {
            push(&[(j, 1.0)], -1.0, 1.0);
        }
        for &j in &fixed_zero {
            push(&[(j, 1.0)], 1.0, 0.0);
        }
        let m = b.len();
        let mut inst = IlpInstance::new(self.name, n, m, c, &trip, b)?;
        let md = inst.metadata_mut();
        md.insert("source".into(), "mps".into());
        md.insert(
            "variables".into(),
            self.cols.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(","),
        );
        if self.maximize {
            md.insert("objective_sense".into(), "max".into());
        }
        if self.obj_constant != 0.0 {
            log::warn!(
                "objective constant {} dropped from {}",
                self.obj_constant,
                inst.name()
            );
            inst.metadata_mut()
                .insert("objective_constant_dropped".into(), self.obj_constant.to_string());
        }
        if self.free_rows > 0 {
            inst.metadata_mut()
                .insert("free_rows_dropped".into(), self.free_rows.to_string());
        }
        Ok(inst)
    }
}

/// Parses an MPS model whose variables are all binary into canonical form:
/// maximization negates `c`, `G` rows are negated, `E` rows become a `<=`
/// pair, and integer variables fixed at 1 (or 0) gain a row pinning them.
pub fn read_mps<R: BufRead>(reader: R) -> Result<IlpInstance> {
    let mut model = Model::default();
    let mut section: Option<Section> = None;
    let mut integer = false;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lno = i + 1;
        let text = line.trim_end();
        if text.trim_start().is_empty() || text.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = text.split_whitespace().collect();
        if !text.starts_with(char::is_whitespace) {
            let sec = header(toks[0], lno)?;
            match sec {
                Section::Name => model.name = toks.get(1).unwrap_or(&"").to_string(),
                Section::ObjSense => {
                    if let Some(s) = toks.get(1) {
                        set_sense(&mut model, s, lno, 2)?;
                    }
                }
                Section::Rhs | Section::Bounds if toks.len() > 1 => {
                    return Err(parse_err(lno, 2, "unexpected tokens after section header"))
                }
                Section::End => {
                    section = Some(sec);
                    break;
                }
                _ => {}
            }
            section = Some(sec);
            continue;
        }
        match section {
            None | Some(Section::Name) => {
                return Err(parse_err(lno, 1, "data line outside of a section"))
            }
            Some(Section::ObjSense) => set_sense(&mut model, toks[0], lno, 1)?,
            Some(Section::Rows) => model.add_row(&toks, lno)?,
            Some(Section::Columns) => {
                if toks.len() >= 3 && toks[1].trim_matches('\'') == "MARKER" {
                    match toks[2].trim_matches('\'') {
                        "INTORG" => integer = true,
                        "INTEND" => integer = false,
                        other => {
                            return Err(parse_err(lno, 3, format!("unknown marker {other:?}")))
                        }
                    }
                } else {
                    model.add_column_entries(&toks, integer, lno)?;
                }
            }
            Some(Section::Rhs) => model.add_rhs(&toks, lno)?,
            Some(Section::Bounds) => model.add_bound(&toks, lno)?,
            Some(Section::End) => unreachable!(),
        }
    }
    if section != Some(Section::End) {
        return Err(parse_err(0, 0, "missing ENDATA"));
    }
    model.into_instance()
}

pub fn read_mps_str(text: &str) -> Result<IlpInstance> {
    read_mps(text.as_bytes())
}

pub fn read_mps_file(path: &Path) -> Result<IlpInstance> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut inst = read_mps(std::io::BufReader::new(file))?;
    if inst.name().is_empty() {
        if let Some(stem) = path.file_stem() {
            inst.set_name(stem.to_string_lossy());
        }
    }
    Ok(inst)
}

/// Free-format MPS for a canonical instance: one `L` row per constraint and
/// every column declared binary.
pub fn write_mps(inst: &IlpInstance) -> String {
    let name = if inst.name().is_empty() {
        "ILP"
    } else {
        inst.name()
    };
    let mut out = String::new();
    let _ = writeln!(out, "NAME {}", name.replace(char::is_whitespace, "_"));
    out.push_str("ROWS\n N obj\n");
    for k in 0..inst.m() {
        let _ = writeln!(out, " L c{k}");
    }
    out.push_str("COLUMNS\n    MARKER 'MARKER' 'INTORG'\n");
    for j in 0..inst.n() {
        let cj = inst.objective_coeffs()[j];
        if cj != 0.0 || inst.cols().lane_len(j) == 0 {
            let _ = writeln!(out, "    x{j} obj {cj:?}");
        }
        for (k, v) in inst.col(j) {
            let _ = writeln!(out, "    x{j} c{k} {v:?}");
        }
    }
    out.push_str("    MARKER 'MARKER' 'INTEND'\nRHS\n");
    for (k, &bk) in inst.rhs().iter().enumerate() {
        if bk != 0.0 {
            let _ = writeln!(out, "    RHS c{k} {bk:?}");
        }
    }
    out.push_str("BOUNDS\n");
    for j in 0..inst.n() {
        let _ = writeln!(out, " BV BND x{j}");
    }
    out.push_str("ENDATA\n");
    out
}
