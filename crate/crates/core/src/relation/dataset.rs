use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use super::value::{ColumnKind, Value};

/// A row of cell values, one per schema attribute.
pub type Row = Vec<Value>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("duplicate attribute name `{0}`")]
    DuplicateAttribute(String),
    #[error("empty attribute name")]
    EmptyAttribute,
    #[error("row has {found} values but the schema has {expected} attributes")]
    Arity { expected: usize, found: usize },
    #[error("column `{attr}` is {expected} but a row holds a {found} value")]
    KindMismatch {
        attr: String,
        expected: ColumnKind,
        found: ColumnKind,
    },
    #[error("schema has {attrs} attributes but {kinds} column kinds were given")]
    KindCount { attrs: usize, kinds: usize },
}

/// Ordered, duplicate-free attribute names.
#[derive(Debug, Clone, Default)]
pub struct Schema {
    attrs: Vec<String>,
    index: HashMap<String, usize>,
}

impl Schema {
    pub fn new<I, S>(attrs: I) -> Result<Self, DatasetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let attrs: Vec<String> = attrs.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(attrs.len());
        for (i, a) in attrs.iter().enumerate() {
            if a.is_empty() {
                return Err(DatasetError::EmptyAttribute);
            }
            if index.insert(a.clone(), i).is_some() {
                return Err(DatasetError::DuplicateAttribute(a.clone()));
            }
        }
        Ok(Schema { attrs, index })
    }

    pub fn attrs(&self) -> &[String] {
        &self.attrs
    }

    pub fn arity(&self) -> usize {
        self.attrs.len()
    }

    pub fn index_of(&self, attr: &str) -> Option<usize> {
        self.index.get(attr).copied()
    }

    pub fn contains(&self, attr: &str) -> bool {
        self.index.contains_key(attr)
    }

    /// True when both schemas name the same attributes, in any order.
    pub fn same_attribute_set(&self, other: &Schema) -> bool {
        self.arity() == other.arity() && self.attrs.iter().all(|a| other.contains(a))
    }

    pub fn is_disjoint(&self, other: &Schema) -> bool {
        self.attrs.iter().all(|a| !other.contains(a))
    }
}

impl PartialEq for Schema {
    fn eq(&self, other: &Self) -> bool {
        self.attrs == other.attrs
    }
}

impl Eq for Schema {}

/// A named relation with set semantics.
///
/// Rows are kept in a `BTreeSet`, which gives duplicate elimination and a
/// canonical iteration order. Every column is homogeneous in kind.
#[derive(Debug, Clone)]
pub struct Dataset {
    name: Option<String>,
    schema: Schema,
    kinds: Vec<ColumnKind>,
    rows: BTreeSet<Row>,
}

impl Dataset {
    pub fn new<I>(schema: Schema, kinds: Vec<ColumnKind>, rows: I) -> Result<Self, DatasetError>
    where
        I: IntoIterator<Item = Row>,
    {
        if kinds.len() != schema.arity() {
            return Err(DatasetError::KindCount {
                attrs: schema.arity(),
                kinds: kinds.len(),
            });
        }
        let mut set = BTreeSet::new();
        for row in rows {
            if row.len() != schema.arity() {
                return Err(DatasetError::Arity {
                    expected: schema.arity(),
                    found: row.len(),
                });
            }
            for (i, v) in row.iter().enumerate() {
                if v.kind() != kinds[i] {
                    return Err(DatasetError::KindMismatch {
                        attr: schema.attrs()[i].clone(),
                        expected: kinds[i],
                        found: v.kind(),
                    });
                }
            }
            set.insert(row);
        }
        Ok(Dataset {
            name: None,
            schema,
            kinds,
            rows: set,
        })
    }

    /// Builds a dataset inferring column kinds from the first row. Columns
    /// of an empty dataset default to `Number`.
    pub fn from_rows<S: AsRef<str>>(attrs: &[S], rows: Vec<Row>) -> Result<Self, DatasetError> {
        let schema = Schema::new(attrs.iter().map(|a| a.as_ref().to_owned()))?;
        let kinds = match rows.first() {
            Some(first) if first.len() == schema.arity() => first.iter().map(Value::kind).collect(),
            Some(first) => {
                return Err(DatasetError::Arity {
                    expected: schema.arity(),
                    found: first.len(),
                })
            }
            None => vec![ColumnKind::Number; schema.arity()],
        };
        Dataset::new(schema, kinds, rows)
    }

    pub fn empty(schema: Schema, kinds: Vec<ColumnKind>) -> Result<Self, DatasetError> {
        Dataset::new(schema, kinds, std::iter::empty())
    }

    /// Internal constructor for operation results whose rows are already
    /// known to conform.
    pub(crate) fn from_parts(schema: Schema, kinds: Vec<ColumnKind>, rows: BTreeSet<Row>) -> Self {
        debug_assert_eq!(kinds.len(), schema.arity());
        debug_assert!(rows.iter().all(|r| r.len() == schema.arity()));
        Dataset {
            name: None,
            schema,
            kinds,
            rows,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn attrs(&self) -> &[String] {
        self.schema.attrs()
    }

    pub fn kinds(&self) -> &[ColumnKind] {
        &self.kinds
    }

    pub fn kind_of(&self, attr: &str) -> Option<ColumnKind> {
        self.schema.index_of(attr).map(|i| self.kinds[i])
    }

    pub fn rows(&self) -> &BTreeSet<Row> {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows of `self` with columns permuted into `target`'s order. The
    /// caller guarantees both schemas have the same attribute set.
    pub(crate) fn rows_in_order_of<'a>(
        &'a self,
        target: &'a Schema,
    ) -> impl Iterator<Item = Row> + 'a {
        let perm: Vec<usize> = target
            .attrs()
            .iter()
            .map(|a| self.schema.index_of(a).expect("attribute sets must match"))
            .collect();
        self.rows
            .iter()
            .map(move |r| perm.iter().map(|&i| r[i].clone()).collect())
    }

    /// Canonical form used for order-insensitive comparison: attributes
    /// sorted by name, rows permuted to match. Name and kinds are ignored.
    pub fn structural_key(&self) -> StructuralKey {
        let mut attrs: Vec<String> = self.schema.attrs().to_vec();
        attrs.sort();
        let sorted = Schema::new(attrs.clone()).expect("attributes were already distinct");
        let rows = self.rows_in_order_of(&sorted).collect();
        StructuralKey { attrs, rows }
    }

    pub fn structurally_eq(&self, other: &Dataset) -> bool {
        self.structural_key() == other.structural_key()
    }
}

/// Equality ignores the provenance name.
impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.schema.attrs() == other.schema.attrs()
            && self.kinds == other.kinds
            && self.rows == other.rows
    }
}

impl Eq for Dataset {}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StructuralKey {
    pub attrs: Vec<String>,
    pub rows: BTreeSet<Row>,
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            write!(f, "{name}")?;
        }
        write!(
            f,
            "[{}; {} rows]",
            self.schema.attrs().join(", "),
            self.rows.len()
        )
    }
}
