//! Typed CSV tables with a `#`-prefixed metadata header.
//!
//! ```text
//! # tool: ptkr
//! # version: 0.1.0
//! # columns: t_n:int,c:real
//! t_n,c
//! 0,0.0000000000000000e0
//! ```
//!
//! Reals are written with 17 significant digits, so a write/read cycle
//! returns the same bits.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Int,
    Real,
    Text,
}

impl ColumnKind {
    fn as_str(&self) -> &'static str {
        match self {
            ColumnKind::Int => "int",
            ColumnKind::Real => "real",
            ColumnKind::Text => "text",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "int" => Some(ColumnKind::Int),
            "real" => Some(ColumnKind::Real),
            "text" => Some(ColumnKind::Text),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn int(name: &str) -> Self {
        Self { name: name.into(), kind: ColumnKind::Int }
    }

    pub fn real(name: &str) -> Self {
        Self { name: name.into(), kind: ColumnKind::Real }
    }

    pub fn text(name: &str) -> Self {
        Self { name: name.into(), kind: ColumnKind::Text }
    }

    /// `re_<name>` and `im_<name>`.
    pub fn complex(name: &str) -> [Self; 2] {
        [Self::real(&format!("re_{name}")), Self::real(&format!("im_{name}"))]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Value {
    pub fn complex(z: Complex64) -> [Value; 2] {
        [Value::Real(z.re), Value::Real(z.im)]
    }

    fn kind(&self) -> ColumnKind {
        match self {
            Value::Int(_) => ColumnKind::Int,
            Value::Real(_) => ColumnKind::Real,
            Value::Text(_) => ColumnKind::Text,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Real(x) => Some(*x),
            Value::Text(_) => None,
        }
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.into())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(x) => write!(f, "{x:.16e}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    columns: Vec<Column>,
    rows: Vec<Vec<Value>>,
    metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Sets a metadata entry, replacing any previous value.
    pub fn set_meta(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        match self.metadata.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.metadata.push((key.into(), value)),
        }
    }

    pub fn push_row(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Schema(format!(
                "row has {} values, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        for (v, c) in row.iter().zip(&self.columns) {
            if v.kind() != c.kind {
                return Err(Error::Schema(format!(
                    "column `{}` is {}, got {}",
                    c.name,
                    c.kind.as_str(),
                    v.kind().as_str()
                )));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::Schema(format!("no column `{name}`")))
    }

    /// A numeric column as `f64`.
    pub fn numeric(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.column_index(name)?;
        if self.columns[i].kind == ColumnKind::Text {
            return Err(Error::Schema(format!("column `{name}` is text")));
        }
        Ok(self.rows.iter().map(|r| r[i].as_f64().unwrap_or(f64::NAN)).collect())
    }

    pub fn text(&self, name: &str) -> Result<Vec<String>> {
        let i = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[i].to_string()).collect())
    }

    /// `(x, y)` pairs from two numeric columns.
    pub fn pairs(&self, x: &str, y: &str) -> Result<Vec<(f64, f64)>> {
        Ok(self.numeric(x)?.into_iter().zip(self.numeric(y)?).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let schema: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("{}:{}", c.name, c.kind.as_str()))
            .collect();
        out.push_str(&format!("# columns: {}\n", schema.join(",")));
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let schema_err = |e: csv::Error| Error::Schema(e.to_string());
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))
            .map_err(schema_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))
                .map_err(schema_err)?;
        }
        let body = w.into_inner().map_err(|e| Error::Schema(e.to_string()))?;
        out.push_str(&String::from_utf8_lossy(&body));
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut metadata = Vec::new();
        let mut schema = None;
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(comment) = line.strip_prefix('#') else { break };
            body_start += line.len();
            let Some((k, v)) = comment.trim().split_once(':') else { continue };
            let (k, v) = (k.trim(), v.trim());
            if k == "columns" {
                schema = Some(v.to_string());
            } else {
                metadata.push((k.to_string(), v.to_string()));
            }
        }
        let schema = schema.ok_or_else(|| Error::Schema("missing `# columns:` header".into()))?;
        let columns = schema
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|spec| {
                let (name, kind) = spec
                    .rsplit_once(':')
                    .ok_or_else(|| Error::Schema(format!("bad column spec `{spec}`")))?;
                let kind = ColumnKind::parse(kind)
                    .ok_or_else(|| Error::Schema(format!("unknown column kind `{kind}`")))?;
                Ok(Column { name: name.into(), kind })
            })
            .collect::<Result<Vec<_>>>()?;

        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text[body_start..].as_bytes());
        let header = reader
            .headers()
            .map_err(|e| Error::Schema(e.to_string()))?
            .clone();
        let names: Vec<&str> = header.iter().collect();
        let expected: Vec<&str> = columns.iter().map(|c| c.name.as_str()).collect();
        if names != expected && !(columns.is_empty() && names == [""]) {
            return Err(Error::Schema(format!(
                "header {names:?} does not match declared columns {expected:?}"
            )));
        }
        let mut table = ResultTable { columns, rows: Vec::new(), metadata };
        for record in reader.records() {
            let record = record.map_err(|e| Error::Schema(e.to_string()))?;
            let row = record
                .iter()
                .zip(&table.columns)
                .map(|(field, col)| parse_value(field, col))
                .collect::<Result<Vec<_>>>()?;
            table.push_row(row)?;
        }
        Ok(table)
    }
}

fn parse_value(field: &str, col: &Column) -> Result<Value> {
    let bad = |e: &dyn fmt::Display| {
        Error::Schema(format!("column `{}`: cannot parse `{field}`: {e}", col.name))
    };
    Ok(match col.kind {
        ColumnKind::Int => Value::Int(field.parse().map_err(|e| bad(&e))?),
        ColumnKind::Real => Value::Real(field.parse().map_err(|e| bad(&e))?),
        ColumnKind::Text => Value::Text(field.into()),
    })
}

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial table.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::io(path, "not a file path"))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

pub fn write_table(path: &Path, table: &ResultTable) -> Result<()> {
    write_atomic(path, table.to_csv()?.as_bytes())
}

pub fn read_table(path: &Path) -> Result<ResultTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ResultTable::from_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut cols = vec![Column::int("t_n"), Column::real("c")];
        cols.extend(Column::complex("c3"));
        cols.push(Column::text("label"));
        let mut t = ResultTable::new(cols);
        t.set_meta("task", "otoc");
        let z = Value::complex(Complex64::new(0.1, -1.0 / 3.0));
        t.push_row(vec![3.into(), 1e-300.into(), z[0].clone(), z[1].clone(), "a, b".into()])
            .unwrap();
        t.push_row(vec![4.into(), f64::NAN.into(), 0.0.into(), (-0.0).into(), "".into()])
            .unwrap();
        t
    }

    #[test]
    fn round_trip_preserves_bits() {
        let t = sample();
        let back = ResultTable::from_csv(&t.to_csv().unwrap()).unwrap();
        assert_eq!(back.columns(), t.columns());
        assert_eq!(back.meta("task"), Some("otoc"));
        for (a, b) in back.rows().iter().zip(t.rows()) {
            for (x, y) in a.iter().zip(b) {
                match (x, y) {
                    (Value::Real(x), Value::Real(y)) => assert_eq!(x.to_bits(), y.to_bits()),
                    _ => assert_eq!(x, y),
                }
            }
        }
    }

    #[test]
    fn empty_table_round_trips() {
        let t = ResultTable::new(vec![Column::real("x")]);
        assert_eq!(ResultTable::from_csv(&t.to_csv().unwrap()).unwrap(), t);
        let none = ResultTable::new(vec![]);
        assert_eq!(ResultTable::from_csv(&none.to_csv().unwrap()).unwrap(), none);
    }

    #[test]
    fn schema_mismatch() {
        let text = "# columns: a:int,b:real\na,b\n1,2.0,3\n";
        assert!(matches!(ResultTable::from_csv(text), Err(Error::Schema(_))));
        let text = "# columns: a:int,b:real\na,c\n";
        assert!(matches!(ResultTable::from_csv(text), Err(Error::Schema(_))));
        let text = "# columns: a:int\na\n1.5\n";
        assert!(matches!(ResultTable::from_csv(text), Err(Error::Schema(_))));
        let mut t = ResultTable::new(vec![Column::int("a")]);
        assert!(t.push_row(vec![1.0.into()]).is_err());
        assert!(t.push_row(vec![]).is_err());
    }

    #[test]
    fn reals_use_seventeen_digits() {
        assert_eq!(Value::Real(0.1).to_string(), "1.0000000000000001e-1");
    }
}
