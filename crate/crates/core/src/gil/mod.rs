//! GIL feature structures: attribute-value DAGs with ordered lists and
//! coreference, plus the concrete text syntax used for input files.

mod atom;
mod parse;
mod serialize;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use atom::{Atom, Symbol};
pub use parse::{parse_gil, GilError};
pub use serialize::serialize_gil;

/// A value stored under an attribute.
#[derive(Clone, Debug)]
pub enum Value {
    Atom(Atom),
    List(Vec<Value>),
    Fs(FeatureStructure),
}

impl Value {
    pub fn as_fs(&self) -> Option<&FeatureStructure> {
        match self {
            Value::Fs(fs) => Some(fs),
            _ => None,
        }
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Value::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Value]> {
        match self {
            Value::List(l) => Some(l),
            _ => None,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Atom(a), Value::Atom(b)) => a == b,
            (Value::List(a), Value::List(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y)
            }
            (Value::Fs(a), Value::Fs(b)) => fs_equal(a, b),
            _ => false,
        }
    }
}

#[derive(Debug)]
struct FsNode {
    pairs: Vec<(Symbol, Value)>,
    tag: Option<u32>,
}

/// An immutable, cheaply clonable feature structure node. Clones share the
/// node, so coreference is observable through [`FeatureStructure::same_node`].
#[derive(Clone, Debug)]
pub struct FeatureStructure(Arc<FsNode>);

impl FeatureStructure {
    pub fn empty() -> Self {
        FeatureStructure(Arc::new(FsNode {
            pairs: Vec::new(),
            tag: None,
        }))
    }

    /// Builds a structure from pairs, rejecting duplicate attributes.
    pub fn from_pairs(pairs: Vec<(Symbol, Value)>) -> Result<Self, Symbol> {
        Self::with_tag(pairs, None)
    }

    pub(crate) fn with_tag(pairs: Vec<(Symbol, Value)>, tag: Option<u32>) -> Result<Self, Symbol> {
        for (i, (k, _)) in pairs.iter().enumerate() {
            if pairs[..i].iter().any(|(j, _)| j == k) {
                return Err(k.clone());
            }
        }
        Ok(FeatureStructure(Arc::new(FsNode { pairs, tag })))
    }

    pub fn pairs(&self) -> &[(Symbol, Value)] {
        &self.0.pairs
    }

    pub fn len(&self) -> usize {
        self.0.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.pairs.is_empty()
    }

    /// The `#n=` tag this node carried in its source document, if any.
    pub fn coref_tag(&self) -> Option<u32> {
        self.0.tag
    }

    pub fn get(&self, attr: &str) -> Option<&Value> {
        self.0.pairs.iter().find(|(k, _)| k.is(attr)).map(|(_, v)| v)
    }

    /// Identity test: true iff both handles refer to the same shared node.
    pub fn same_node(&self, other: &FeatureStructure) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn node_addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn get_path(&self, path: &Path) -> Option<&Value> {
        get_path(self, path)
    }

    /// Order-independent canonical text; two structures have equal keys iff
    /// they are `fs_equal`.
    pub fn canonical_key(&self) -> String {
        let mut out = String::new();
        canonical_into(&Value::Fs(self.clone()), &mut out);
        out
    }
}

fn canonical_into(v: &Value, out: &mut String) {
    match v {
        Value::Atom(Atom::Symbol(s)) => {
            out.push('s');
            out.push_str(&s.canonical());
            out.push(' ');
        }
        Value::Atom(a) => {
            out.push_str(&a.to_string());
            out.push(' ');
        }
        Value::List(items) => {
            out.push('<');
            for it in items {
                canonical_into(it, out);
            }
            out.push('>');
        }
        Value::Fs(fs) => {
            let mut pairs: Vec<_> = fs.pairs().iter().collect();
            pairs.sort_by(|a, b| a.0.cmp(&b.0));
            out.push('[');
            for (k, v) in pairs {
                out.push_str(&k.canonical());
                out.push('=');
                canonical_into(v, out);
            }
            out.push(']');
        }
    }
}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_gil(self))
    }
}

impl FromStr for FeatureStructure {
    type Err = GilError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_gil(s)
    }
}

impl PartialEq for FeatureStructure {
    fn eq(&self, other: &Self) -> bool {
        fs_equal(self, other)
    }
}

/// A dotted attribute path such as `THEME.TIME-ADJ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path(Vec<Symbol>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid path `{0}`")]
pub struct PathError(pub String);

impl Path {
    pub fn new(segments: Vec<Symbol>) -> Result<Self, PathError> {
        if segments.is_empty() || segments.iter().any(|s| s.as_str().is_empty()) {
            return Err(PathError(
                segments.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("."),
            ));
        }
        Ok(Path(segments))
    }

    pub fn segments(&self) -> &[Symbol] {
        &self.0
    }

    pub fn join(&self, other: &Path) -> Path {
        Path(self.0.iter().chain(other.0.iter()).cloned().collect())
    }
}

impl FromStr for Path {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() || s.split('.').any(str::is_empty) {
            return Err(PathError(s.to_string()));
        }
        Path::new(s.split('.').map(Symbol::new).collect())
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.0.iter().map(Symbol::as_str).collect();
        f.write_str(&parts.join("."))
    }
}

/// Walks `path` from `fs`. Absent if a segment is missing or an intermediate
/// value is not a structure.
pub fn get_path<'a>(fs: &'a FeatureStructure, path: &Path) -> Option<&'a Value> {
    let (first, rest) = path.0.split_first()?;
    let mut cur = fs.get(first.as_str())?;
    for seg in rest {
        cur = cur.as_fs()?.get(seg.as_str())?;
    }
    Some(cur)
}

/// Structural equality after coreference resolution. Attribute order and tag
/// numbering are irrelevant; list order is not.
pub fn fs_equal(a: &FeatureStructure, b: &FeatureStructure) -> bool {
    if a.same_node(b) {
        return true;
    }
    a.len() == b.len()
        && a.pairs()
            .iter()
            .all(|(k, v)| b.get(k.as_str()).is_some_and(|w| v == w))
}
