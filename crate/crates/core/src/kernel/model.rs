//! Concrete models: named atoms, an optional relational content layer, and
//! injective atom maps used as embeddings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

/// A named point of a model's carrier.
///
/// Instances choose canonical names so that two fragment members sharing an atom
/// name genuinely share that point; carrier intersection is then literal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Atom(String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Self {
        Atom(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Self {
        Atom::new(s)
    }
}

/// Relational content carried on top of the carrier set.
///
/// `None` is for purely carrier-determined instances; `Tags` marks a subset of the
/// carrier with one unary predicate. Restriction to a sub-carrier preserves the
/// variant, so models from one instance never mix the two.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Content {
    None,
    Tags(BTreeSet<Atom>),
}

impl Content {
    /// The content induced on a sub-carrier.
    pub fn restrict(&self, carrier: &BTreeSet<Atom>) -> Content {
        match self {
            Content::None => Content::None,
            Content::Tags(tags) => {
                Content::Tags(tags.iter().filter(|a| carrier.contains(*a)).cloned().collect())
            }
        }
    }
}

/// A finite concrete model: an id for reporting, a carrier of atoms, and content.
///
/// Equality, ordering, and hashing are structural — the id is ignored — so a model
/// constructed by a completion can be found in a fragment listing by value.
#[derive(Clone)]
pub struct Model {
    id: String,
    carrier: BTreeSet<Atom>,
    content: Content,
}

impl Model {
    pub fn new(id: impl Into<String>, carrier: BTreeSet<Atom>, content: Content) -> Self {
        Model { id: id.into(), carrier, content }
    }

    /// A model with no content layer.
    pub fn of_atoms<I, A>(id: impl Into<String>, atoms: I) -> Self
    where
        I: IntoIterator<Item = A>,
        A: Into<Atom>,
    {
        Model {
            id: id.into(),
            carrier: atoms.into_iter().map(Into::into).collect(),
            content: Content::None,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn carrier(&self) -> &BTreeSet<Atom> {
        &self.carrier
    }

    pub fn content(&self) -> &Content {
        &self.content
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn contains_atom(&self, a: &Atom) -> bool {
        self.carrier.contains(a)
    }

    pub fn is_carrier_subset(&self, other: &Model) -> bool {
        self.carrier.is_subset(&other.carrier)
    }

    pub fn carrier_intersection(&self, other: &Model) -> BTreeSet<Atom> {
        self.carrier.intersection(&other.carrier).cloned().collect()
    }

    pub fn carrier_union(&self, other: &Model) -> BTreeSet<Atom> {
        self.carrier.union(&other.carrier).cloned().collect()
    }

    /// The same structure under a different reporting id.
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// A human-readable rendering of the structure, for notes and synthesized ids.
    pub fn describe(&self) -> String {
        let atoms: Vec<&str> = self.carrier.iter().map(Atom::as_str).collect();
        match &self.content {
            Content::None => format!("{{{}}}", atoms.join(",")),
            Content::Tags(tags) => {
                let t: Vec<&str> = tags.iter().map(Atom::as_str).collect();
                format!("{{{}|Q={{{}}}}}", atoms.join(","), t.join(","))
            }
        }
    }
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.carrier == other.carrier && self.content == other.content
    }
}

impl Eq for Model {}

impl PartialOrd for Model {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Model {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.carrier, &self.content).cmp(&(&other.carrier, &other.content))
    }
}

impl Hash for Model {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.carrier.hash(state);
        self.content.hash(state);
    }
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.id, self.describe())
    }
}

/// An injective map between carriers, written atom by atom.
pub type AtomMap = BTreeMap<Atom, Atom>;

/// A recorded embedding between two named models.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Embedding {
    pub source: String,
    pub target: String,
    pub map: AtomMap,
}

impl Embedding {
    pub fn new(source: &Model, target: &Model, map: AtomMap) -> Self {
        Embedding { source: source.id().to_string(), target: target.id().to_string(), map }
    }
}
