use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::lp::GeneralLp;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Name,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowKind {
    E,
    L,
    G,
}

/// Fixed-format field spans, 0-based half-open.
const FIELDS: [(usize, usize); 6] = [(1, 3), (4, 12), (14, 22), (24, 36), (39, 47), (49, 61)];
/// Columns that must be blank for a line to follow the fixed layout.
const GAPS: [usize; 8] = [0, 3, 12, 13, 22, 23, 36, 47];

/// Parses fixed- or free-format MPS into a [`GeneralLp`].
pub fn parse_mps<T: Scalar>(bytes: &[u8]) -> Result<GeneralLp<T>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse { line: 0, message: format!("not UTF-8: {e}") })?;
    parse_mps_str(text)
}

pub fn parse_mps_str<T: Scalar>(text: &str) -> Result<GeneralLp<T>> {
    Parser::default().run(text)
}

#[derive(Default)]
struct Parser {
    name: String,
    free: bool,
    objective: Option<String>,
    ignored_rows: Vec<String>,
    rows: Vec<(String, RowKind)>,
    row_index: HashMap<String, usize>,
    cols: Vec<String>,
    col_index: HashMap<String, usize>,
    triplets: Vec<(usize, usize, f64)>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    range: Vec<Option<f64>>,
    offset: f64,
    col_lower: Vec<f64>,
    col_upper: Vec<f64>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn number(line: usize, s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| err(line, format!("bad number {s:?}")))?;
    if v.is_nan() {
        return Err(err(line, "NaN value"));
    }
    Ok(v)
}

/// Splits a fixed-format data line into its six fields, or `None` when the
/// line does not respect the column layout.
fn fixed_fields(line: &str) -> Option<Vec<&str>> {
    if !line.is_ascii() {
        return None;
    }
    let bytes = line.as_bytes();
    if GAPS.iter().any(|&g| bytes.get(g).is_some_and(|&c| c != b' ')) || line.len() > 61 && !line[61..].trim().is_empty() {
        return None;
    }
    let fields: Vec<&str> = FIELDS.iter().map(|&(a, b)| if a >= line.len() { "" } else { line[a..b.min(line.len())].trim() }).collect();
    // a token spilling across a field boundary means the line is not fixed
    if fields.iter().any(|f| f.contains(char::is_whitespace)) {
        return None;
    }
    Some(fields)
}

impl Parser {
    fn run<T: Scalar>(mut self, text: &str) -> Result<GeneralLp<T>> {
        let mut section = Section::None;
        let mut ended = false;
        for (k, raw) in text.lines().enumerate() {
            let ln = k + 1;
            let line = raw.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() || line.starts_with('*') {
                continue;
            }
            let first_blank = line.starts_with(' ') || line.starts_with('\t');
            if !first_blank {
                let mut toks = line.split_whitespace();
                let head = toks.next().unwrap_or_default();
                let rest: Vec<&str> = toks.collect();
                let next = match head {
                    "NAME" => {
                        self.name = line[4..].trim().to_string();
                        Some(Section::Name)
                    }
                    "OBJSENSE" => {
                        if let Some(&s) = rest.first() {
                            self.sense(ln, s)?;
                        }
                        Some(Section::ObjSense)
                    }
                    "ROWS" => Some(Section::Rows),
                    "COLUMNS" => Some(Section::Columns),
                    "RHS" if rest.is_empty() => Some(Section::Rhs),
                    "RANGES" if rest.is_empty() => Some(Section::Ranges),
                    "BOUNDS" if rest.is_empty() => Some(Section::Bounds),
                    "ENDATA" => {
                        ended = true;
                        break;
                    }
                    _ => None,
                };
                match next {
                    Some(s) => {
                        section = s;
                        continue;
                    }
                    None if matches!(section, Section::None | Section::Name) => {
                        return Err(err(ln, format!("unknown section {head:?}")));
                    }
                    None if matches!(section, Section::Rows | Section::Columns | Section::Rhs | Section::Ranges | Section::Bounds) => {
                        // data starting in column one only happens in free format
                        self.free = true;
                    }
                    None => return Err(err(ln, format!("unknown section {head:?}"))),
                }
            }
            let fields: Vec<String> = match (self.free, fixed_fields(line)) {
                (false, Some(f)) => f.into_iter().map(str::to_string).collect(),
                _ => line.split_whitespace().map(str::to_string).collect(),
            };
            let from_fixed = !self.free && fixed_fields(line).is_some();
            match section {
                Section::None | Section::Name => return Err(err(ln, "data before ROWS")),
                Section::ObjSense => self.sense(ln, line.trim())?,
                Section::Rows => self.row(ln, &fields, from_fixed)?,
                Section::Columns => self.column(ln, &fields, from_fixed)?,
                Section::Rhs | Section::Ranges => self.rhs_or_range(ln, &fields, from_fixed, section == Section::Rhs)?,
                Section::Bounds => self.bound(ln, &fields, from_fixed)?,
            }
        }
        if !ended {
            return Err(err(text.lines().count(), "missing ENDATA"));
        }
        self.finish()
    }

    fn sense(&mut self, ln: usize, s: &str) -> Result<()> {
        match s {
            "MIN" | "MINIMIZE" => Ok(()),
            "MAX" | "MAXIMIZE" => Err(err(ln, "maximization objectives are not supported")),
            other => Err(err(ln, format!("unknown objective sense {other:?}"))),
        }
    }

    fn row(&mut self, ln: usize, f: &[String], fixed: bool) -> Result<()> {
        if f.len() != 2 && !(fixed && f.len() > 2) {
            return Err(err(ln, "ROWS line needs type and name"));
        }
        let (kind, name) = (f[0].as_str(), f[1].as_str());
        let kind = match kind {
            "N" => {
                if self.objective.is_none() {
                    self.objective = Some(name.to_string());
                } else {
                    self.ignored_rows.push(name.to_string());
                }
                return Ok(());
            }
            "E" => RowKind::E,
            "L" => RowKind::L,
            "G" => RowKind::G,
            other => return Err(err(ln, format!("unknown row type {other:?}"))),
        };
        if self.row_index.insert(name.to_string(), self.rows.len()).is_some() {
            return Err(err(ln, format!("duplicate row {name:?}")));
        }
        self.rows.push((name.to_string(), kind));
        self.rhs.push(0.0);
        self.range.push(None);
        Ok(())
    }

    /// `Some(Some(i))` for a constraint row, `Some(None)` for the objective,
    /// `None` for an ignored free row.
    fn lookup_row(&self, ln: usize, name: &str) -> Result<Option<Option<usize>>> {
        if self.objective.as_deref() == Some(name) {
            return Ok(Some(None));
        }
        if let Some(&i) = self.row_index.get(name) {
            return Ok(Some(Some(i)));
        }
        if self.ignored_rows.iter().any(|r| r == name) {
            return Ok(None);
        }
        Err(err(ln, format!("unknown row {name:?}")))
    }

    fn column(&mut self, ln: usize, f: &[String], fixed: bool) -> Result<()> {
        if f.iter().any(|s| s == "'MARKER'") {
            return Err(err(ln, "integer markers are not supported"));
        }
        let f: Vec<&str> = if fixed { f[1..].iter().map(String::as_str).filter(|s| !s.is_empty()).collect() } else { f.iter().map(String::as_str).collect() };
        if f.len() != 3 && f.len() != 5 {
            return Err(err(ln, "COLUMNS line needs a name and one or two (row, value) pairs"));
        }
        let name = f[0];
        let j = match self.col_index.get(name) {
            Some(&j) => j,
            None => {
                let j = self.cols.len();
                self.col_index.insert(name.to_string(), j);
                self.cols.push(name.to_string());
                self.cost.push(0.0);
                self.col_lower.push(0.0);
                self.col_upper.push(f64::INFINITY);
                j
            }
        };
        for pair in f[1..].chunks(2) {
            let v = number(ln, pair[1])?;
            match self.lookup_row(ln, pair[0])? {
                Some(Some(i)) => self.triplets.push((i, j, v)),
                Some(None) => self.cost[j] += v,
                None => {}
            }
        }
        Ok(())
    }

    fn rhs_or_range(&mut self, ln: usize, f: &[String], fixed: bool, is_rhs: bool) -> Result<()> {
        let f: Vec<&str> = if fixed {
            f[2..].iter().map(String::as_str).filter(|s| !s.is_empty()).collect()
        } else if f.len() % 2 == 1 {
            f[1..].iter().map(String::as_str).collect()
        } else {
            f.iter().map(String::as_str).collect()
        };
        if f.is_empty() || f.len() % 2 == 1 || f.len() > 4 {
            return Err(err(ln, "expected one or two (row, value) pairs"));
        }
        for pair in f.chunks(2) {
            let v = number(ln, pair[1])?;
            match (self.lookup_row(ln, pair[0])?, is_rhs) {
                (Some(Some(i)), true) => self.rhs[i] = v,
                (Some(Some(i)), false) => self.range[i] = Some(v),
                (Some(None), true) => self.offset = -v,
                (Some(None), false) => return Err(err(ln, "range on the objective row")),
                (None, _) => {}
            }
        }
        Ok(())
    }

    fn bound(&mut self, ln: usize, f: &[String], fixed: bool) -> Result<()> {
        let kind = f.first().map(String::as_str).unwrap_or_default();
        let needs_value = matches!(kind, "LO" | "UP" | "FX");
        let (col, val) = if fixed {
            (f[2].as_str(), if needs_value { Some(f[3].as_str()) } else { None })
        } else {
            let rest = &f[1..];
            match (needs_value, rest.len()) {
                (true, 3) => (rest[1].as_str(), Some(rest[2].as_str())),
                (true, 2) => (rest[0].as_str(), Some(rest[1].as_str())),
                (false, 2) | (false, 3) => (rest[1].as_str(), None),
                (false, 1) => (rest[0].as_str(), None),
                _ => return Err(err(ln, "malformed BOUNDS line")),
            }
        };
        let &j = self.col_index.get(col).ok_or_else(|| err(ln, format!("unknown column {col:?}")))?;
        let v = val.map(|s| number(ln, s)).transpose()?;
        match kind {
            "LO" => self.col_lower[j] = v.unwrap(),
            "UP" => {
                let u = v.unwrap();
                // conventional MPS reading: a negative upper bound on a
                // default-bounded column makes it unbounded below
                if u < 0.0 && self.col_lower[j] == 0.0 {
                    self.col_lower[j] = f64::NEG_INFINITY;
                }
                self.col_upper[j] = u;
            }
            "FX" => {
                self.col_lower[j] = v.unwrap();
                self.col_upper[j] = v.unwrap();
            }
            "FR" => {
                self.col_lower[j] = f64::NEG_INFINITY;
                self.col_upper[j] = f64::INFINITY;
            }
            "MI" => self.col_lower[j] = f64::NEG_INFINITY,
            "PL" => self.col_upper[j] = f64::INFINITY,
            "BV" | "LI" | "UI" | "SC" => return Err(err(ln, format!("integer bound type {kind} is not supported"))),
            other => return Err(err(ln, format!("unknown bound type {other:?}"))),
        }
        Ok(())
    }

    fn finish<T: Scalar>(self) -> Result<GeneralLp<T>> {
        if self.objective.is_none() {
            return Err(err(0, "no objective (N) row"));
        }
        let (m, n) = (self.rows.len(), self.cols.len());
        let mut row_lower = Vec::with_capacity(m);
        let mut row_upper = Vec::with_capacity(m);
        for (i, (_, kind)) in self.rows.iter().enumerate() {
            let b = self.rhs[i];
            let (lo, up) = match (kind, self.range[i]) {
                (RowKind::E, None) => (b, b),
                (RowKind::L, None) => (f64::NEG_INFINITY, b),
                (RowKind::G, None) => (b, f64::INFINITY),
                (RowKind::E, Some(r)) if r >= 0.0 => (b, b + r),
                (RowKind::E, Some(r)) => (b + r, b),
                (RowKind::L, Some(r)) => (b - r.abs(), b),
                (RowKind::G, Some(r)) => (b, b + r.abs()),
            };
            row_lower.push(T::of(lo));
            row_upper.push(T::of(up));
        }
        let trip: Vec<(usize, usize, T)> = self.triplets.iter().map(|&(i, j, v)| (i, j, T::of(v))).collect();
        let a = SparseMatrix::from_triplets(m, n, &trip)?;
        let conv = |v: &[f64]| v.iter().map(|&x| T::of(x)).collect::<Vec<T>>();
        let mut lp = GeneralLp::new(a, conv(&self.cost), row_lower, row_upper, conv(&self.col_lower), conv(&self.col_upper))?;
        lp.name = self.name;
        lp.objective_offset = T::of(self.offset);
        lp.row_names = self.rows.into_iter().map(|r| r.0).collect();
        lp.col_names = self.cols;
        Ok(lp)
    }
}
