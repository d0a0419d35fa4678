//! The dataset repository: a directory of CSV files, one dataset per file,
//! catalogued by file stem in byte-wise name order.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use crate::relation::{ColumnKind, Dataset, DatasetError, Row, Schema, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}{}: {kind}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
pub struct CsvError {
    /// 1-based line of the offending record.
    pub line: u64,
    /// 1-based field index, when one field is to blame.
    pub column: Option<usize>,
    pub kind: CsvErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CsvErrorKind {
    #[error("missing header row")]
    MissingHeader,
    #[error("empty attribute name in header")]
    EmptyHeader,
    #[error("duplicate attribute `{0}` in header")]
    DuplicateHeader(String),
    #[error("expected {expected} fields, found {found}")]
    Ragged { expected: usize, found: usize },
    #[error("empty cell in column `{0}`")]
    EmptyCell(String),
    #[error("non-finite number `{0}`")]
    NonFinite(String),
    #[error("{0}")]
    Malformed(String),
}

/// Parses CSV text into a dataset.
///
/// The first record is the header. A column is numeric when every cell in
/// it parses as a finite float and textual otherwise; a header-only file
/// yields numeric columns. Duplicate rows collapse.
pub fn parse_csv(text: &str) -> Result<Dataset, CsvError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        None => {
            return Err(CsvError {
                line: 1,
                column: None,
                kind: CsvErrorKind::MissingHeader,
            })
        }
        Some(r) => r.map_err(malformed)?,
    };
    let attrs: Vec<String> = header.iter().map(str::to_owned).collect();
    let schema = Schema::new(attrs.iter()).map_err(|e| {
        let (column, kind) = match e {
            DatasetError::DuplicateAttribute(a) => {
                let col = attrs.iter().rposition(|x| *x == a).map(|i| i + 1);
                (col, CsvErrorKind::DuplicateHeader(a))
            }
            _ => (
                attrs.iter().position(String::is_empty).map(|i| i + 1),
                CsvErrorKind::EmptyHeader,
            ),
        };
        CsvError {
            line: line_of(&header),
            column,
            kind,
        }
    })?;

    let mut cells: Vec<(u64, Vec<String>)> = Vec::new();
    for record in records {
        let record = record.map_err(malformed)?;
        let line = line_of(&record);
        if record.len() != attrs.len() {
            return Err(CsvError {
                line,
                column: None,
                kind: CsvErrorKind::Ragged {
                    expected: attrs.len(),
                    found: record.len(),
                },
            });
        }
        let mut row = Vec::with_capacity(attrs.len());
        for (i, cell) in record.iter().enumerate() {
            if cell.is_empty() {
                return Err(CsvError {
                    line,
                    column: Some(i + 1),
                    kind: CsvErrorKind::EmptyCell(attrs[i].clone()),
                });
            }
            if cell.parse::<f64>().is_ok_and(|n| !n.is_finite()) {
                return Err(CsvError {
                    line,
                    column: Some(i + 1),
                    kind: CsvErrorKind::NonFinite(cell.to_owned()),
                });
            }
            row.push(cell.to_owned());
        }
        cells.push((line, row));
    }

    let kinds: Vec<ColumnKind> = (0..attrs.len())
        .map(|i| {
            if cells.iter().all(|(_, r)| r[i].parse::<f64>().is_ok()) {
                ColumnKind::Number
            } else {
                ColumnKind::Text
            }
        })
        .collect();
    let rows: Vec<Row> = cells
        .into_iter()
        .map(|(_, r)| {
            r.into_iter()
                .zip(&kinds)
                .map(|(cell, kind)| match kind {
                    ColumnKind::Number => Value::num(cell.parse().expect("checked above")),
                    ColumnKind::Text => Value::Text(cell),
                })
                .collect()
        })
        .collect();
    Ok(Dataset::new(schema, kinds, rows).expect("rows are built to match the schema"))
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(1, |p| p.line())
}

fn malformed(e: csv::Error) -> CsvError {
    let line = e.position().map_or(1, |p| p.line());
    let message = match e.kind() {
        csv::ErrorKind::Utf8 { .. } => "invalid UTF-8".to_owned(),
        _ => e.to_string(),
    };
    CsvError {
        line,
        column: None,
        kind: CsvErrorKind::Malformed(message),
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read repository {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}", display_file_errors(.0))]
    Files(Vec<(PathBuf, CsvError)>),
}

fn display_file_errors(errors: &[(PathBuf, CsvError)]) -> String {
    errors
        .iter()
        .map(|(p, e)| format!("{}: {e}", p.display()))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct LookupError {
    pub name: String,
    /// Catalog names close to `name`, nearest first.
    pub suggestions: Vec<String>,
}

impl fmt::Display for LookupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown dataset \"{}\"", self.name)?;
        match self.suggestions.as_slice() {
            [] => Ok(()),
            [one] => write!(f, "; did you mean \"{one}\"?"),
            many => write!(
                f,
                "; did you mean one of {}?",
                many.iter()
                    .map(|s| format!("\"{s}\""))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        }
    }
}

/// An immutable, name-ordered catalog of datasets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Repository {
    catalog: BTreeMap<String, Arc<Dataset>>,
}

impl Repository {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a repository from named datasets. A later entry replaces an
    /// earlier one with the same name. Each dataset takes its entry's name.
    pub fn from_datasets<S: Into<String>>(entries: impl IntoIterator<Item = (S, Dataset)>) -> Self {
        let mut repo = Repository::new();
        for (name, d) in entries {
            repo.insert(name, d);
        }
        repo
    }

    pub fn insert(&mut self, name: impl Into<String>, d: Dataset) {
        let name = name.into();
        assert!(!name.is_empty(), "dataset names must be non-empty");
        self.catalog
            .insert(name.clone(), Arc::new(d.with_name(name)));
    }

    pub fn len(&self) -> usize {
        self.catalog.len()
    }

    pub fn is_empty(&self) -> bool {
        self.catalog.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Arc<Dataset>> {
        self.catalog.get(name)
    }

    /// Like [`get`](Self::get) but explains misses.
    pub fn lookup(&self, name: &str) -> Result<&Arc<Dataset>, LookupError> {
        self.get(name).ok_or_else(|| LookupError {
            name: name.to_owned(),
            suggestions: self.near_misses(name),
        })
    }

    fn near_misses(&self, name: &str) -> Vec<String> {
        let budget = (name.chars().count() / 3).max(1);
        let mut close: Vec<(usize, &String)> = self
            .catalog
            .keys()
            .map(|k| (strsim::damerau_levenshtein(name, k), k))
            .filter(|(d, _)| *d <= budget)
            .collect();
        close.sort();
        close.into_iter().map(|(_, k)| k.clone()).collect()
    }

    /// Names in catalog order.
    pub fn names(&self) -> impl ExactSizeIterator<Item = &str> {
        self.catalog.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&str, &Arc<Dataset>)> {
        self.catalog.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn datasets(&self) -> impl ExactSizeIterator<Item = &Arc<Dataset>> {
        self.catalog.values()
    }
}

/// [`Repository::lookup`] as a free function.
pub fn lookup<'r>(repo: &'r Repository, name: &str) -> Result<&'r Arc<Dataset>, LookupError> {
    repo.lookup(name)
}

/// Loads every `*.csv` file directly inside `dir`. Other entries are
/// ignored. All malformed files are reported together and nothing is
/// loaded if any fails.
pub fn load_repository(dir: impl AsRef<Path>) -> Result<Repository, LoadError> {
    let dir = dir.as_ref();
    let io_err = |source| LoadError::Io {
        path: dir.to_owned(),
        source,
    };
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        if path.extension().is_some_and(|e| e == "csv") && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();

    let mut repo = Repository::new();
    let mut errors = Vec::new();
    for path in paths {
        let Some(stem) = path
            .file_stem()
            .and_then(|s| s.to_str())
            .filter(|s| !s.is_empty())
        else {
            errors.push((
                path.clone(),
                CsvError {
                    line: 1,
                    column: None,
                    kind: CsvErrorKind::Malformed(
                        "file name is not a usable dataset name".to_owned(),
                    ),
                },
            ));
            continue;
        };
        let stem = stem.to_owned();
        let bytes = fs::read(&path).map_err(|source| LoadError::Io {
            path: path.clone(),
            source,
        })?;
        let parsed = match String::from_utf8(bytes) {
            Ok(text) => parse_csv(&text),
            Err(e) => Err(CsvError {
                line: 1 + e.as_bytes()[..e.utf8_error().valid_up_to()]
                    .iter()
                    .filter(|&&b| b == b'\n')
                    .count() as u64,
                column: None,
                kind: CsvErrorKind::Malformed("invalid UTF-8".to_owned()),
            }),
        };
        match parsed {
            Ok(d) => repo.insert(stem, d),
            Err(e) => errors.push((path, e)),
        }
    }
    if errors.is_empty() {
        Ok(repo)
    } else {
        Err(LoadError::Files(errors))
    }
}
