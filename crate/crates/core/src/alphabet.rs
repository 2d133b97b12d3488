use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Index of an event within its [`Alphabet`]. Event order is significant:
/// searches and witness tie-breaking follow declaration order.
pub type EventId = usize;

/// Event universe with controllability and observability partitions and
/// per-subsystem ownership.
///
/// Only the controllable and observable subsets are stored; the
/// uncontrollable and unobservable sets are their complements and are never
/// materialised separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    events: Vec<String>,
    index: BTreeMap<String, EventId>,
    controllable: Vec<bool>,
    observable: Vec<bool>,
    owners: Vec<BTreeSet<usize>>,
}

/// One event declaration used when building an [`Alphabet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventDecl {
    pub name: String,
    pub controllable: bool,
    pub observable: bool,
    pub owners: BTreeSet<usize>,
}

impl EventDecl {
    pub fn new(name: &str, controllable: bool, observable: bool) -> Self {
        EventDecl {
            name: name.to_string(),
            controllable,
            observable,
            owners: BTreeSet::new(),
        }
    }

    pub fn owned_by(mut self, owners: &[usize]) -> Self {
        self.owners = owners.iter().copied().collect();
        self
    }
}

impl Alphabet {
    pub fn new(decls: Vec<EventDecl>) -> Result<Arc<Self>> {
        let mut events = Vec::with_capacity(decls.len());
        let mut index = BTreeMap::new();
        let mut controllable = Vec::with_capacity(decls.len());
        let mut observable = Vec::with_capacity(decls.len());
        let mut owners = Vec::with_capacity(decls.len());
        for d in decls {
            if d.name.is_empty() {
                return Err(Error::EmptyEventName);
            }
            if index.insert(d.name.clone(), events.len()).is_some() {
                return Err(Error::DuplicateEvent(d.name));
            }
            events.push(d.name);
            controllable.push(d.controllable);
            observable.push(d.observable);
            owners.push(d.owners);
        }
        Ok(Arc::new(Alphabet {
            events,
            index,
            controllable,
            observable,
            owners,
        }))
    }

    /// Convenience constructor: comma-free event list with explicit
    /// controllable/observable subsets.
    pub fn from_sets(
        events: &[&str],
        controllable: &[&str],
        observable: &[&str],
    ) -> Result<Arc<Self>> {
        let c: BTreeSet<&str> = controllable.iter().copied().collect();
        let o: BTreeSet<&str> = observable.iter().copied().collect();
        for e in c.iter().chain(o.iter()) {
            if !events.contains(e) {
                return Err(Error::UnknownEvent(e.to_string()));
            }
        }
        Alphabet::new(
            events
                .iter()
                .map(|e| EventDecl::new(e, c.contains(e), o.contains(e)))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<EventId> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<EventId> {
        self.id(name)
            .ok_or_else(|| Error::UnknownEvent(name.to_string()))
    }

    pub fn name(&self, id: EventId) -> &str {
        &self.events[id]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.events.iter().map(|s| s.as_str())
    }

    pub fn ids(&self) -> std::ops::Range<EventId> {
        0..self.events.len()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn is_controllable(&self, id: EventId) -> bool {
        self.controllable[id]
    }

    pub fn is_observable(&self, id: EventId) -> bool {
        self.observable[id]
    }

    pub fn owners(&self, id: EventId) -> &BTreeSet<usize> {
        &self.owners[id]
    }

    pub fn controllable_names(&self) -> BTreeSet<String> {
        self.ids()
            .filter(|&i| self.controllable[i])
            .map(|i| self.events[i].clone())
            .collect()
    }

    pub fn uncontrollable_names(&self) -> BTreeSet<String> {
        self.ids()
            .filter(|&i| !self.controllable[i])
            .map(|i| self.events[i].clone())
            .collect()
    }

    pub fn observable_names(&self) -> BTreeSet<String> {
        self.ids()
            .filter(|&i| self.observable[i])
            .map(|i| self.events[i].clone())
            .collect()
    }

    pub fn unobservable_names(&self) -> BTreeSet<String> {
        self.ids()
            .filter(|&i| !self.observable[i])
            .map(|i| self.events[i].clone())
            .collect()
    }

    pub fn decls(&self) -> Vec<EventDecl> {
        self.ids()
            .map(|i| EventDecl {
                name: self.events[i].clone(),
                controllable: self.controllable[i],
                observable: self.observable[i],
                owners: self.owners[i].clone(),
            })
            .collect()
    }

    /// True when every event of `self` is declared in `other`.
    pub fn subset_of(&self, other: &Alphabet) -> bool {
        self.events.iter().all(|e| other.contains(e))
    }

    /// True when both alphabets declare exactly the same event names.
    pub fn same_events(&self, other: &Alphabet) -> bool {
        self.len() == other.len() && self.subset_of(other)
    }

    /// Union of two alphabets. Shared events must agree on controllability;
    /// observability and ownership are unioned. Event order: all of `self`,
    /// then the events private to `other` in their declared order.
    pub fn union(&self, other: &Alphabet) -> Result<Arc<Self>> {
        let mut decls = self.decls();
        for d in decls.iter_mut() {
            if let Some(j) = other.id(&d.name) {
                if other.controllable[j] != d.controllable {
                    return Err(Error::ControllabilityConflict(d.name.clone()));
                }
                d.observable = d.observable || other.observable[j];
                d.owners.extend(other.owners[j].iter().copied());
            }
        }
        for d in other.decls() {
            if !self.contains(&d.name) {
                decls.push(d);
            }
        }
        Alphabet::new(decls)
    }

    /// Union that resolves controllability conflicts in favour of `other`
    /// (used when a staged model crosses a fault boundary and the post-fault
    /// partition takes over). Observability and ownership are unioned.
    pub fn overlay(&self, other: &Alphabet) -> Result<Arc<Self>> {
        let mut decls = self.decls();
        for d in decls.iter_mut() {
            if let Some(j) = other.id(&d.name) {
                d.controllable = other.controllable[j];
                d.observable = d.observable || other.observable[j];
                d.owners.extend(other.owners[j].iter().copied());
            }
        }
        for d in other.decls() {
            if !self.contains(&d.name) {
                decls.push(d);
            }
        }
        Alphabet::new(decls)
    }

    /// Sub-alphabet keeping only the named events, in the original order.
    pub fn restrict(&self, keep: &BTreeSet<String>) -> Result<Arc<Self>> {
        for k in keep {
            self.require(k)?;
        }
        Alphabet::new(
            self.decls()
                .into_iter()
                .filter(|d| keep.contains(&d.name))
                .collect(),
        )
    }

    /// Copy of the alphabet with controllability/observability overridden for
    /// the listed events.
    pub fn with_flags(
        &self,
        controllable_overrides: &BTreeMap<String, bool>,
        observable_overrides: &BTreeMap<String, bool>,
    ) -> Result<Arc<Self>> {
        for k in controllable_overrides.keys().chain(observable_overrides.keys()) {
            self.require(k)?;
        }
        let mut decls = self.decls();
        for d in decls.iter_mut() {
            if let Some(&c) = controllable_overrides.get(&d.name) {
                d.controllable = c;
            }
            if let Some(&o) = observable_overrides.get(&d.name) {
                d.observable = o;
            }
        }
        Alphabet::new(decls)
    }

    /// Copy of the alphabet with fresh events appended. Collisions with
    /// existing names are rejected.
    pub fn with_events(&self, added: Vec<EventDecl>) -> Result<Arc<Self>> {
        let mut decls = self.decls();
        for d in added {
            if self.contains(&d.name) {
                return Err(Error::NameCollision(d.name));
            }
            decls.push(d);
        }
        Alphabet::new(decls)
    }
}
