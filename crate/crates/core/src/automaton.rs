use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::alphabet::{Alphabet, EventId};
use crate::error::{Error, Result};

/// Index of a state within its automaton.
pub type StateId = usize;

/// A finite sequence of event names. The empty trace is the empty string.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trace(pub Vec<String>);

impl Trace {
    pub fn empty() -> Self {
        Trace(Vec::new())
    }

    pub fn from_names(names: &[&str]) -> Self {
        Trace(names.iter().map(|s| s.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn events(&self) -> &[String] {
        &self.0
    }

    pub fn push(&mut self, name: &str) {
        self.0.push(name.to_string());
    }

    /// Projection onto the events of `keep`, erasing everything else.
    pub fn project(&self, keep: &BTreeSet<String>) -> Trace {
        Trace(self.0.iter().filter(|e| keep.contains(*e)).cloned().collect())
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "ε")
        } else {
            write!(f, "{}", self.0.join(" "))
        }
    }
}

/// Outcome of a language-inclusion style check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated { witness: Trace },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

/// Satisfaction semantics: generated (prefix-closed) language by default,
/// marked language behind the explicit variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    Generated,
    Marked,
}

/// Deterministic finite automaton with partial transitions and optional
/// marking. `marked: None` means marking is not considered: the marked
/// language coincides with the generated language.
///
/// All operations are pure functions of their inputs; values are immutable
/// after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    alphabet: Arc<Alphabet>,
    states: Vec<String>,
    initial: StateId,
    marked: Option<BTreeSet<StateId>>,
    error_state: Option<StateId>,
    trans: Vec<BTreeMap<EventId, StateId>>,
}

impl Automaton {
    pub fn new(
        alphabet: Arc<Alphabet>,
        states: Vec<String>,
        initial: &str,
        marked: Option<Vec<String>>,
        transitions: &[(&str, &str, &str)],
    ) -> Result<Self> {
        let mut index: HashMap<String, StateId> = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::DuplicateState(s.clone()));
            }
        }
        let lookup = |name: &str| -> Result<StateId> {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownState(name.to_string()))
        };
        let initial = lookup(initial)?;
        let marked = match marked {
            None => None,
            Some(list) => {
                let mut set = BTreeSet::new();
                for m in list {
                    set.insert(lookup(&m)?);
                }
                Some(set)
            }
        };
        let mut trans = vec![BTreeMap::new(); states.len()];
        for (src, ev, dst) in transitions {
            let s = lookup(src)?;
            let e = alphabet.require(ev)?;
            let d = lookup(dst)?;
            if let Some(&prev) = trans[s].get(&e) {
                if prev != d {
                    return Err(Error::Nondeterministic {
                        state: src.to_string(),
                        event: ev.to_string(),
                    });
                }
            }
            trans[s].insert(e, d);
        }
        Ok(Automaton {
            alphabet,
            states,
            initial,
            marked,
            error_state: None,
            trans,
        })
    }

    /// One-state automaton generating `Σ*` (self-loops on every event).
    pub fn universal(alphabet: Arc<Alphabet>) -> Self {
        let trans = vec![alphabet.ids().map(|e| (e, 0)).collect()];
        Automaton {
            alphabet,
            states: vec!["u".to_string()],
            initial: 0,
            marked: None,
            error_state: None,
            trans,
        }
    }

    /// One-state automaton generating exactly `{ε}`.
    pub fn epsilon(alphabet: Arc<Alphabet>) -> Self {
        Automaton {
            alphabet,
            states: vec!["0".to_string()],
            initial: 0,
            marked: None,
            error_state: None,
            trans: vec![BTreeMap::new()],
        }
    }

    /// Chain automaton generating the prefix closure of a single trace.
    pub fn chain(alphabet: Arc<Alphabet>, trace: &Trace) -> Result<Self> {
        let mut states = vec!["0".to_string()];
        let mut trans: Vec<BTreeMap<EventId, StateId>> = vec![BTreeMap::new()];
        for (i, ev) in trace.events().iter().enumerate() {
            let e = alphabet.require(ev)?;
            states.push((i + 1).to_string());
            trans.push(BTreeMap::new());
            trans[i].insert(e, i + 1);
        }
        Ok(Automaton {
            alphabet,
            states,
            initial: 0,
            marked: None,
            error_state: None,
            trans: trans.into_iter().collect(),
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> impl Iterator<Item = &str> {
        self.states.iter().map(|s| s.as_str())
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn error_state(&self) -> Option<StateId> {
        self.error_state
    }

    pub fn has_marking(&self) -> bool {
        self.marked.is_some()
    }

    pub fn is_marked(&self, s: StateId) -> bool {
        match &self.marked {
            None => true,
            Some(set) => set.contains(&s),
        }
    }

    pub fn marked_states(&self) -> Option<&BTreeSet<StateId>> {
        self.marked.as_ref()
    }

    pub fn transitions_from(&self, s: StateId) -> impl Iterator<Item = (EventId, StateId)> + '_ {
        self.trans[s].iter().map(|(&e, &d)| (e, d))
    }

    pub fn step(&self, s: StateId, e: EventId) -> Option<StateId> {
        self.trans[s].get(&e).copied()
    }

    /// Events defined at `s` (`Act(s)`).
    pub fn active_events(&self, s: StateId) -> impl Iterator<Item = EventId> + '_ {
        self.trans[s].keys().copied()
    }

    pub fn transition_count(&self) -> usize {
        self.trans.iter().map(|m| m.len()).sum()
    }

    /// All transitions as (source, event, target) name triples.
    pub fn transition_triples(&self) -> Vec<(String, String, String)> {
        let mut out = Vec::new();
        for s in 0..self.states.len() {
            for (&e, &d) in &self.trans[s] {
                out.push((
                    self.states[s].clone(),
                    self.alphabet.name(e).to_string(),
                    self.states[d].clone(),
                ));
            }
        }
        out
    }

    /// Runs the automaton on a trace of event names from the initial state.
    pub fn state_after(&self, t: &Trace) -> Result<StateId> {
        let mut cur = self.initial;
        let mut seen = Vec::new();
        for ev in t.events() {
            let e = self.alphabet.require(ev)?;
            match self.step(cur, e) {
                Some(next) => {
                    cur = next;
                    seen.push(ev.clone());
                }
                None => {
                    return Err(Error::TraceNotGenerated(
                        ev.clone(),
                        Trace(seen).to_string(),
                    ))
                }
            }
        }
        Ok(cur)
    }

    pub fn generates(&self, t: &Trace) -> bool {
        self.state_after(t).is_ok()
    }

    pub fn marks(&self, t: &Trace) -> bool {
        match self.state_after(t) {
            Ok(s) => self.is_marked(s),
            Err(_) => false,
        }
    }

    /// Rebuilds the automaton keeping only states reachable from the initial
    /// state. State order is the breadth-first discovery order (stable:
    /// events are explored in alphabet order); names are preserved.
    pub fn accessible(&self) -> Automaton {
        let mut order = Vec::new();
        let mut map: Vec<Option<StateId>> = vec![None; self.states.len()];
        let mut queue = VecDeque::new();
        map[self.initial] = Some(0);
        order.push(self.initial);
        queue.push_back(self.initial);
        while let Some(s) = queue.pop_front() {
            for (_, d) in self.transitions_from(s) {
                if map[d].is_none() {
                    map[d] = Some(order.len());
                    order.push(d);
                    queue.push_back(d);
                }
            }
        }
        let states: Vec<String> = order.iter().map(|&s| self.states[s].clone()).collect();
        let trans: Vec<BTreeMap<EventId, StateId>> = order
            .iter()
            .map(|&s| {
                self.trans[s]
                    .iter()
                    .map(|(&e, &d)| (e, map[d].unwrap()))
                    .collect()
            })
            .collect();
        let marked = self.marked.as_ref().map(|set| {
            order
                .iter()
                .enumerate()
                .filter(|(_, &old)| set.contains(&old))
                .map(|(new, _)| new)
                .collect()
        });
        let error_state = self.error_state.and_then(|e| map[e]);
        Automaton {
            alphabet: self.alphabet.clone(),
            states,
            initial: 0,
            marked,
            error_state,
            trans,
        }
    }

    /// Synchronous product: shared events synchronise, private events
    /// interleave. The result alphabet is the union (controllability
    /// conflicts rejected), the result is accessible and a pair is marked
    /// iff both components mark it (an automaton without marking marks
    /// everything).
    pub fn compose(&self, other: &Automaton) -> Result<Automaton> {
        let (states, trans, marked_pairs, _) = self.product_pairs(other)?;
        let alphabet = self.alphabet.union(&other.alphabet)?;
        let names: Vec<String> = states
            .iter()
            .map(|&(a, b)| format!("({},{})", self.states[a], other.states[b]))
            .collect();
        let marked = if self.marked.is_none() && other.marked.is_none() {
            None
        } else {
            Some(marked_pairs)
        };
        Ok(Automaton {
            alphabet,
            states: names,
            initial: 0,
            marked,
            error_state: None,
            trans,
        })
    }

    /// Internal synchronous product keeping component state ids. Returns
    /// (pair list, transitions over the union alphabet, marked pair set,
    /// union alphabet). Pair 0 is the initial pair.
    #[allow(clippy::type_complexity)]
    pub(crate) fn product_pairs(
        &self,
        other: &Automaton,
    ) -> Result<(
        Vec<(StateId, StateId)>,
        Vec<BTreeMap<EventId, StateId>>,
        BTreeSet<StateId>,
        Arc<Alphabet>,
    )> {
        let alphabet = self.alphabet.union(&other.alphabet)?;
        let a_ev: Vec<Option<EventId>> = alphabet
            .ids()
            .map(|e| self.alphabet.id(alphabet.name(e)))
            .collect();
        let b_ev: Vec<Option<EventId>> = alphabet
            .ids()
            .map(|e| other.alphabet.id(alphabet.name(e)))
            .collect();
        let mut states: Vec<(StateId, StateId)> = vec![(self.initial, other.initial)];
        let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
        index.insert((self.initial, other.initial), 0);
        let mut trans: Vec<BTreeMap<EventId, StateId>> = vec![BTreeMap::new()];
        let mut queue = VecDeque::new();
        queue.push_back(0);
        while let Some(p) = queue.pop_front() {
            let (sa, sb) = states[p];
            for e in alphabet.ids() {
                let next = match (a_ev[e], b_ev[e]) {
                    (Some(ea), Some(eb)) => match (self.step(sa, ea), other.step(sb, eb)) {
                        (Some(na), Some(nb)) => Some((na, nb)),
                        _ => None,
                    },
                    (Some(ea), None) => self.step(sa, ea).map(|na| (na, sb)),
                    (None, Some(eb)) => other.step(sb, eb).map(|nb| (sa, nb)),
                    (None, None) => None,
                };
                if let Some(pair) = next {
                    let id = *index.entry(pair).or_insert_with(|| {
                        states.push(pair);
                        trans.push(BTreeMap::new());
                        queue.push_back(states.len() - 1);
                        states.len() - 1
                    });
                    trans[p].insert(e, id);
                }
            }
        }
        let marked = states
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| self.is_marked(a) && other.is_marked(b))
            .map(|(i, _)| i)
            .collect();
        Ok((states, trans, marked, alphabet))
    }

    /// Natural projection onto `keep`: erase all other events, then
    /// determinise by subset construction. Subset states carry canonical
    /// sorted names; a subset is marked iff it contains a marked member.
    pub fn project(&self, keep: &BTreeSet<String>) -> Result<Automaton> {
        let keep_ids: BTreeSet<EventId> = keep
            .iter()
            .map(|k| self.alphabet.require(k))
            .collect::<Result<_>>()?;
        let alphabet = self.alphabet.restrict(keep)?;
        let erased = |e: EventId| !keep_ids.contains(&e);
        let closure = |seed: BTreeSet<StateId>| -> BTreeSet<StateId> {
            let mut set = seed;
            let mut stack: Vec<StateId> = set.iter().copied().collect();
            while let Some(s) = stack.pop() {
                for (e, d) in self.transitions_from(s) {
                    if erased(e) && set.insert(d) {
                        stack.push(d);
                    }
                }
            }
            set
        };
        let initial = closure(BTreeSet::from([self.initial]));
        let mut subsets: Vec<BTreeSet<StateId>> = vec![initial.clone()];
        let mut index: HashMap<BTreeSet<StateId>, StateId> = HashMap::new();
        index.insert(initial, 0);
        let mut trans: Vec<BTreeMap<EventId, StateId>> = vec![BTreeMap::new()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(p) = queue.pop_front() {
            let current = subsets[p].clone();
            for e in alphabet.ids() {
                let src = self.alphabet.require(alphabet.name(e))?;
                let mut next = BTreeSet::new();
                for &s in &current {
                    if let Some(d) = self.step(s, src) {
                        next.insert(d);
                    }
                }
                if next.is_empty() {
                    continue;
                }
                let next = closure(next);
                let id = *index.entry(next.clone()).or_insert_with(|| {
                    subsets.push(next);
                    trans.push(BTreeMap::new());
                    queue.push_back(subsets.len() - 1);
                    subsets.len() - 1
                });
                trans[p].insert(e, id);
            }
        }
        let names: Vec<String> = subsets.iter().map(|set| self.subset_name(set)).collect();
        let marked = self.marked.as_ref().map(|set| {
            subsets
                .iter()
                .enumerate()
                .filter(|(_, members)| members.iter().any(|m| set.contains(m)))
                .map(|(i, _)| i)
                .collect()
        });
        Ok(Automaton {
            alphabet,
            states: names,
            initial: 0,
            marked,
            error_state: None,
            trans,
        })
    }

    fn subset_name(&self, set: &BTreeSet<StateId>) -> String {
        let mut names: Vec<&str> = set.iter().map(|&s| self.states[s].as_str()).collect();
        names.sort_unstable();
        format!("{{{}}}", names.join(","))
    }

    /// Renames transition labels according to `map` (source events not in the
    /// map are untouched). When the renaming keeps the automaton
    /// deterministic the state structure is preserved; otherwise the result
    /// is determinised by subset construction. Mapped source events are
    /// dropped from the result alphabet.
    pub fn relabel(&self, map: &BTreeMap<String, String>) -> Result<Automaton> {
        if map.is_empty() || map.iter().all(|(k, v)| k == v) {
            return Ok(self.clone());
        }
        let mut ev_map: BTreeMap<EventId, EventId> = BTreeMap::new();
        for (from, to) in map {
            let f = self.alphabet.require(from)?;
            let t = self.alphabet.require(to)?;
            ev_map.insert(f, t);
        }
        let dropped: BTreeSet<EventId> = ev_map
            .iter()
            .filter(|(f, t)| f != t)
            .map(|(&f, _)| f)
            .collect();
        let keep: BTreeSet<String> = self
            .alphabet
            .ids()
            .filter(|e| !dropped.contains(e))
            .map(|e| self.alphabet.name(e).to_string())
            .collect();
        let alphabet = self.alphabet.restrict(&keep)?;
        let rename = |e: EventId| -> EventId {
            let target = ev_map.get(&e).copied().unwrap_or(e);
            alphabet
                .id(self.alphabet.name(target))
                .expect("renamed event kept in alphabet")
        };
        // Fast path: no state merges two labels onto different targets.
        let mut deterministic = true;
        'outer: for s in 0..self.states.len() {
            let mut seen: BTreeMap<EventId, StateId> = BTreeMap::new();
            for (e, d) in self.transitions_from(s) {
                let r = rename(e);
                if let Some(&prev) = seen.get(&r) {
                    if prev != d {
                        deterministic = false;
                        break 'outer;
                    }
                }
                seen.insert(r, d);
            }
        }
        if deterministic {
            let trans = (0..self.states.len())
                .map(|s| {
                    self.trans[s]
                        .iter()
                        .map(|(&e, &d)| (rename(e), d))
                        .collect()
                })
                .collect();
            return Ok(Automaton {
                alphabet,
                states: self.states.clone(),
                initial: self.initial,
                marked: self.marked.clone(),
                error_state: self.error_state,
                trans,
            });
        }
        // Subset construction over the renamed transition relation.
        let mut subsets: Vec<BTreeSet<StateId>> = vec![BTreeSet::from([self.initial])];
        let mut index: HashMap<BTreeSet<StateId>, StateId> = HashMap::new();
        index.insert(subsets[0].clone(), 0);
        let mut trans: Vec<BTreeMap<EventId, StateId>> = vec![BTreeMap::new()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(p) = queue.pop_front() {
            let current = subsets[p].clone();
            for e in alphabet.ids() {
                let mut next = BTreeSet::new();
                for &s in &current {
                    for (f, d) in self.transitions_from(s) {
                        if rename(f) == e {
                            next.insert(d);
                        }
                    }
                }
                if next.is_empty() {
                    continue;
                }
                let id = *index.entry(next.clone()).or_insert_with(|| {
                    subsets.push(next);
                    trans.push(BTreeMap::new());
                    queue.push_back(subsets.len() - 1);
                    subsets.len() - 1
                });
                trans[p].insert(e, id);
            }
        }
        let names = subsets.iter().map(|set| self.subset_name(set)).collect();
        let marked = self.marked.as_ref().map(|set| {
            subsets
                .iter()
                .enumerate()
                .filter(|(_, members)| members.iter().any(|m| set.contains(m)))
                .map(|(i, _)| i)
                .collect()
        });
        Ok(Automaton {
            alphabet,
            states: names,
            initial: 0,
            marked,
            error_state: None,
            trans,
        })
    }

    /// Suffix automaton after `t`: initial state moves to `δ(q0, t)`, states
    /// are restricted to those reachable from there. Generates `L(self)/t`.
    pub fn suffix(&self, t: &Trace) -> Result<Automaton> {
        let start = self.state_after(t)?;
        let mut shifted = self.clone();
        shifted.initial = start;
        Ok(shifted.accessible())
    }

    /// Completion: adds the designated error state `q_e` and routes every
    /// undefined (state, event) pair to it; `q_e` self-loops on all events
    /// and is unmarked. Generates `Σ*` and marks exactly the marked language
    /// of the original.
    pub fn completion(&self) -> Automaton {
        let mut name = "q_e".to_string();
        while self.states.contains(&name) {
            name.push('\'');
        }
        let mut states = self.states.clone();
        states.push(name);
        let qe = states.len() - 1;
        let mut trans: Vec<BTreeMap<EventId, StateId>> = self.trans.clone();
        trans.push(BTreeMap::new());
        for (s, map) in trans.iter_mut().enumerate() {
            for e in self.alphabet.ids() {
                map.entry(e).or_insert(qe);
            }
            let _ = s;
        }
        // marking must be materialised: L_m of the completion is L_m(self),
        // not Σ*.
        let marked = match &self.marked {
            Some(set) => Some(set.clone()),
            None => Some((0..self.states.len()).collect()),
        };
        Automaton {
            alphabet: self.alphabet.clone(),
            states,
            initial: self.initial,
            marked,
            error_state: Some(qe),
            trans,
        }
    }

    /// Complement: completion with marked and unmarked states swapped.
    /// Generates `Σ*` and marks `Σ* − L_m(self)`.
    pub fn complement(&self) -> Automaton {
        let completed = self.completion();
        let old = completed.marked.clone().unwrap_or_default();
        let marked = (0..completed.states.len())
            .filter(|s| !old.contains(s))
            .collect();
        Automaton {
            marked: Some(marked),
            ..completed
        }
    }

    /// Satisfaction per the projection-based definition with generated
    /// (prefix-closed) language semantics: holds iff for every `t ∈ L(self)`
    /// the projection of `t` onto the property alphabet lies in `L(p)`.
    pub fn satisfies(&self, p: &Automaton) -> Result<Verdict> {
        self.satisfies_with(p, Semantics::Generated)
    }

    /// Satisfaction with explicit semantics. Under `Marked` semantics the
    /// check is `∀ t ∈ L_m(self): P(t) ∈ L_m(p)`.
    ///
    /// Decided by reachability of the property's error state in
    /// `self ∥ completion(p)`; the witness is a shortest violating trace of
    /// `self`, ties broken by alphabet order.
    pub fn satisfies_with(&self, p: &Automaton, semantics: Semantics) -> Result<Verdict> {
        for name in p.alphabet.names() {
            if !self.alphabet.contains(name) {
                return Err(Error::AlphabetNotContained(name.to_string()));
            }
        }
        // satisfaction is a pure language check: align the property's event
        // attributes with the system's so the internal product cannot
        // stumble over partition differences
        let keep: BTreeSet<String> = p.alphabet.names().map(|s| s.to_string()).collect();
        let p = p.with_alphabet(self.alphabet.restrict(&keep)?)?;
        let completed = p.completion();
        let qe = completed.error_state.unwrap();
        let (pairs, trans, _, alphabet) = self.product_pairs(&completed)?;
        let bad = |&(sa, sb): &(StateId, StateId)| -> bool {
            match semantics {
                Semantics::Generated => sb == qe,
                Semantics::Marked => self.is_marked(sa) && !completed.is_marked(sb),
            }
        };
        match shortest_to(&pairs, &trans, bad) {
            None => Ok(Verdict::Holds),
            Some(path) => Ok(Verdict::Violated {
                witness: self.trace_from_ids(&alphabet, &path),
            }),
        }
    }

    /// Marked-language inclusion `L_m(self) ⊆ L(b)` (the right side taken as
    /// a generated language). The witness is a shortest marked trace of
    /// `self` whose projection leaves `L(b)`.
    pub fn marked_inclusion(&self, b: &Automaton) -> Result<Verdict> {
        for name in b.alphabet.names() {
            if !self.alphabet.contains(name) {
                return Err(Error::AlphabetNotContained(name.to_string()));
            }
        }
        let keep: BTreeSet<String> = b.alphabet.names().map(|s| s.to_string()).collect();
        let b = b.with_alphabet(self.alphabet.restrict(&keep)?)?;
        let completed = b.completion();
        let qe = completed.error_state.unwrap();
        let (pairs, trans, _, alphabet) = self.product_pairs(&completed)?;
        let bad = |&(sa, sb): &(StateId, StateId)| -> bool { self.is_marked(sa) && sb == qe };
        match shortest_to(&pairs, &trans, bad) {
            None => Ok(Verdict::Holds),
            Some(path) => Ok(Verdict::Violated {
                witness: self.trace_from_ids(&alphabet, &path),
            }),
        }
    }

    fn trace_from_ids(&self, alphabet: &Alphabet, ids: &[EventId]) -> Trace {
        Trace(ids.iter().map(|&e| alphabet.name(e).to_string()).collect())
    }

    /// Exact generated-language equality. Requires identical event sets.
    pub fn language_equal(&self, other: &Automaton) -> Result<bool> {
        self.language_relation(other).map(|(eq, _)| eq)
    }

    /// Exact generated-language inclusion `L(self) ⊆ L(other)`. Requires
    /// identical event sets.
    pub fn language_subset(&self, other: &Automaton) -> Result<bool> {
        self.language_relation(other).map(|(_, sub)| sub)
    }

    fn language_relation(&self, other: &Automaton) -> Result<(bool, bool)> {
        if !self.alphabet.same_events(&other.alphabet) {
            let missing = self
                .alphabet
                .names()
                .find(|n| !other.alphabet.contains(n))
                .or_else(|| other.alphabet.names().find(|n| !self.alphabet.contains(n)))
                .unwrap_or("?");
            return Err(Error::AlphabetMismatch(missing.to_string()));
        }
        // Lockstep walk over completions; a defined/undefined mismatch
        // decides the relation.
        let mut equal = true;
        let mut subset = true;
        let mut seen: BTreeSet<(StateId, StateId)> = BTreeSet::new();
        let mut queue = VecDeque::from([(self.initial, other.initial)]);
        seen.insert((self.initial, other.initial));
        while let Some((sa, sb)) = queue.pop_front() {
            for e in self.alphabet.ids() {
                let eb = other.alphabet.require(self.alphabet.name(e))?;
                match (self.step(sa, e), other.step(sb, eb)) {
                    (Some(na), Some(nb)) => {
                        if seen.insert((na, nb)) {
                            queue.push_back((na, nb));
                        }
                    }
                    (Some(_), None) => {
                        equal = false;
                        subset = false;
                    }
                    (None, Some(_)) => {
                        equal = false;
                    }
                    (None, None) => {}
                }
            }
            if !equal && !subset {
                break;
            }
        }
        Ok((equal, subset))
    }

    /// Exact marked-language equality. Requires identical event sets.
    pub fn marked_language_equal(&self, other: &Automaton) -> Result<bool> {
        let a = self.completion();
        let b = other.completion();
        if !a.alphabet.same_events(&b.alphabet) {
            return Err(Error::AlphabetMismatch(String::new()));
        }
        let mut seen: BTreeSet<(StateId, StateId)> = BTreeSet::new();
        let mut queue = VecDeque::from([(a.initial, b.initial)]);
        seen.insert((a.initial, b.initial));
        while let Some((sa, sb)) = queue.pop_front() {
            if a.is_marked(sa) != b.is_marked(sb) {
                return Ok(false);
            }
            for e in a.alphabet.ids() {
                let eb = b.alphabet.require(a.alphabet.name(e))?;
                let (na, nb) = (a.step(sa, e).unwrap(), b.step(sb, eb).unwrap());
                if seen.insert((na, nb)) {
                    queue.push_back((na, nb));
                }
            }
        }
        Ok(true)
    }

    /// Structural isomorphism up to state renaming. Both automata must be
    /// accessible and deterministic, so a lockstep walk from the initial
    /// states decides the question.
    pub fn isomorphic(&self, other: &Automaton) -> Result<bool> {
        if !self.alphabet.same_events(&other.alphabet) {
            return Ok(false);
        }
        if self.state_count() != other.state_count() {
            return Ok(false);
        }
        let a = self.accessible();
        let b = other.accessible();
        if a.state_count() != self.state_count() || b.state_count() != other.state_count() {
            return Ok(false);
        }
        let mut map: Vec<Option<StateId>> = vec![None; a.state_count()];
        let mut rmap: Vec<Option<StateId>> = vec![None; b.state_count()];
        map[a.initial] = Some(b.initial);
        rmap[b.initial] = Some(a.initial);
        let mut queue = VecDeque::from([(a.initial, b.initial)]);
        while let Some((sa, sb)) = queue.pop_front() {
            if a.is_marked(sa) != b.is_marked(sb)
                || a.trans[sa].len() != b.trans[sb].len()
            {
                return Ok(false);
            }
            for e in a.alphabet.ids() {
                let eb = b.alphabet.require(a.alphabet.name(e))?;
                match (a.step(sa, e), b.step(sb, eb)) {
                    (None, None) => {}
                    (Some(na), Some(nb)) => match (map[na], rmap[nb]) {
                        (None, None) => {
                            map[na] = Some(nb);
                            rmap[nb] = Some(na);
                            queue.push_back((na, nb));
                        }
                        (Some(x), Some(y)) if x == nb && y == na => {}
                        _ => return Ok(false),
                    },
                    _ => return Ok(false),
                }
            }
        }
        Ok(true)
    }

    /// Enumerates all generated traces up to `max_len`, in length-then-
    /// alphabet order.
    pub fn traces_up_to(&self, max_len: usize) -> Vec<Trace> {
        let mut out = vec![Trace::empty()];
        let mut frontier: Vec<(StateId, Vec<EventId>)> = vec![(self.initial, Vec::new())];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (s, prefix) in &frontier {
                for (e, d) in self.transitions_from(*s) {
                    let mut ext = prefix.clone();
                    ext.push(e);
                    out.push(Trace(
                        ext.iter().map(|&x| self.alphabet.name(x).to_string()).collect(),
                    ));
                    next.push((d, ext));
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        out
    }

    /// Replaces marking wholesale (used by construction helpers).
    pub fn with_marking(&self, marked: Option<BTreeSet<StateId>>) -> Automaton {
        Automaton {
            marked,
            ..self.clone()
        }
    }

    /// Same transition structure over a replacement alphabet carrying the
    /// same event names (possibly with different flags or extra events).
    pub fn with_alphabet(&self, alphabet: Arc<Alphabet>) -> Result<Automaton> {
        let remap: Vec<EventId> = self
            .alphabet
            .ids()
            .map(|e| alphabet.require(self.alphabet.name(e)))
            .collect::<Result<_>>()?;
        let trans = self
            .trans
            .iter()
            .map(|m| m.iter().map(|(&e, &d)| (remap[e], d)).collect())
            .collect();
        Ok(Automaton {
            alphabet,
            states: self.states.clone(),
            initial: self.initial,
            marked: self.marked.clone(),
            error_state: self.error_state,
            trans,
        })
    }

    /// Raw constructor for internal builders that already guarantee the
    /// invariants (deterministic transitions, valid indices).
    pub(crate) fn from_parts(
        alphabet: Arc<Alphabet>,
        states: Vec<String>,
        initial: StateId,
        marked: Option<BTreeSet<StateId>>,
        error_state: Option<StateId>,
        trans: Vec<BTreeMap<EventId, StateId>>,
    ) -> Automaton {
        debug_assert_eq!(states.len(), trans.len());
        Automaton {
            alphabet,
            states,
            initial,
            marked,
            error_state,
            trans,
        }
    }
}

/// Breadth-first search for a shortest path (as an event id sequence) from
/// pair 0 to any state satisfying `bad`. Events are explored in alphabet
/// order, so ties break deterministically.
fn shortest_to<F>(
    pairs: &[(StateId, StateId)],
    trans: &[BTreeMap<EventId, StateId>],
    bad: F,
) -> Option<Vec<EventId>>
where
    F: Fn(&(StateId, StateId)) -> bool,
{
    let mut parent: Vec<Option<(StateId, EventId)>> = vec![None; pairs.len()];
    let mut seen = vec![false; pairs.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut target = if bad(&pairs[0]) { Some(0) } else { None };
    while target.is_none() {
        let Some(p) = queue.pop_front() else { break };
        for (&e, &d) in &trans[p] {
            if !seen[d] {
                seen[d] = true;
                parent[d] = Some((p, e));
                if bad(&pairs[d]) {
                    target = Some(d);
                    break;
                }
                queue.push_back(d);
            }
        }
    }
    let mut cur = target?;
    let mut path = Vec::new();
    while let Some((prev, e)) = parent[cur] {
        path.push(e);
        cur = prev;
    }
    path.reverse();
    Some(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;

    fn abc() -> Arc<Alphabet> {
        Alphabet::from_sets(&["a", "b", "c"], &["a", "c"], &["a", "b", "c"]).unwrap()
    }

    fn simple() -> Automaton {
        // 1 -a-> 2 -b-> 4 -c-> 5, 2 -c-> 3
        Automaton::new(
            abc(),
            vec!["1".into(), "2".into(), "3".into(), "4".into(), "5".into()],
            "1",
            None,
            &[("1", "a", "2"), ("2", "b", "4"), ("2", "c", "3"), ("4", "c", "5")],
        )
        .unwrap()
    }

    #[test]
    fn accessible_removes_isolated_state() {
        let a = Automaton::new(
            abc(),
            vec!["p".into(), "q".into(), "x".into()],
            "p",
            None,
            &[("p", "a", "q")],
        )
        .unwrap();
        let acc = a.accessible();
        assert_eq!(acc.state_count(), 2);
        assert!(acc.language_equal(&a).unwrap());
    }

    #[test]
    fn accessible_is_fixpoint_on_accessible_input() {
        let a = simple();
        let acc = a.accessible();
        assert!(acc.isomorphic(&a).unwrap());
    }

    #[test]
    fn compose_with_universal_is_identity() {
        let a = simple();
        let u = Automaton::universal(abc());
        let c = a.compose(&u).unwrap();
        assert!(c.language_equal(&a).unwrap());
    }

    #[test]
    fn project_onto_full_alphabet_keeps_language() {
        let a = simple();
        let keep: BTreeSet<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let p = a.project(&keep).unwrap();
        assert!(p.language_equal(&a).unwrap());
    }

    #[test]
    fn project_onto_empty_alphabet_is_epsilon() {
        let a = simple();
        let p = a.project(&BTreeSet::new()).unwrap();
        assert_eq!(p.state_count(), 1);
        assert_eq!(p.transition_count(), 0);
    }

    #[test]
    fn suffix_of_empty_trace_is_language_equal() {
        let a = simple();
        let s = a.suffix(&Trace::empty()).unwrap();
        assert!(s.language_equal(&a).unwrap());
    }

    #[test]
    fn suffix_walks_the_trace() {
        let a = simple();
        let s = a.suffix(&Trace::from_names(&["a"])).unwrap();
        assert!(s.generates(&Trace::from_names(&["b", "c"])));
        assert!(s.generates(&Trace::from_names(&["c"])));
        assert!(!s.generates(&Trace::from_names(&["a"])));
    }

    #[test]
    fn suffix_rejects_ungenerated_trace() {
        let a = simple();
        assert!(matches!(
            a.suffix(&Trace::from_names(&["b"])),
            Err(Error::TraceNotGenerated(..))
        ));
    }

    #[test]
    fn completion_generates_everything_and_keeps_marked_language() {
        let a = simple().with_marking(Some(BTreeSet::from([2])));
        let c = a.completion();
        assert!(c.generates(&Trace::from_names(&["b", "b", "a"])));
        assert!(c.marks(&Trace::from_names(&["a", "c"])));
        assert!(!c.marks(&Trace::from_names(&["a", "b"])));
        assert!(!c.marks(&Trace::from_names(&["b"])));
    }

    #[test]
    fn complement_is_involution_on_marked_language() {
        let a = simple().with_marking(Some(BTreeSet::from([1, 3])));
        let cc = a.complement().complement();
        for t in a.completion().traces_up_to(4) {
            assert_eq!(a.marks(&t), cc.marks(&t), "trace {t}");
        }
    }

    #[test]
    fn complement_of_epsilon_marks_nonempty_strings() {
        let x = Alphabet::from_sets(&["x"], &[], &["x"]).unwrap();
        let e = Automaton::epsilon(x);
        let co = e.complement();
        assert!(!co.marks(&Trace::empty()));
        assert!(co.marks(&Trace::from_names(&["x"])));
        assert!(co.marks(&Trace::from_names(&["x", "x"])));
    }

    #[test]
    fn satisfies_holds_on_language_equal_property() {
        let a = simple();
        assert!(a.satisfies(&simple()).unwrap().holds());
    }

    #[test]
    fn satisfies_reports_shortest_witness() {
        let a = simple();
        // property: closure of {a b} over {a, b}; "a c" projects to "a",
        // fine; "a b c"? projects to "ab" fine; extend property alphabet to
        // include c to see a violation at "a c".
        let p = Automaton::new(
            abc(),
            vec!["1".into(), "2".into(), "3".into()],
            "1",
            None,
            &[("1", "a", "2"), ("2", "b", "3")],
        )
        .unwrap();
        match a.satisfies(&p).unwrap() {
            Verdict::Violated { witness } => {
                assert_eq!(witness, Trace::from_names(&["a", "c"]));
            }
            Verdict::Holds => panic!("expected violation"),
        }
    }

    #[test]
    fn satisfies_rejects_larger_property_alphabet() {
        let a = simple();
        let bigger = Alphabet::from_sets(&["a", "b", "c", "d"], &[], &["a"]).unwrap();
        let p = Automaton::universal(bigger);
        assert!(matches!(
            a.satisfies(&p),
            Err(Error::AlphabetNotContained(_))
        ));
    }

    #[test]
    fn marked_inclusion_trivial_cases() {
        let x = Alphabet::from_sets(&["x", "y"], &[], &["x", "y"]).unwrap();
        // marks nothing
        let none = Automaton::new(
            x.clone(),
            vec!["0".into(), "1".into()],
            "0",
            Some(vec![]),
            &[("0", "x", "1")],
        )
        .unwrap();
        let any = Automaton::universal(x.clone());
        assert!(none.marked_inclusion(&any).unwrap().holds());

        // marks {x}, spec generates closure of {x}
        let marks_x = Automaton::new(
            x.clone(),
            vec!["0".into(), "1".into()],
            "0",
            Some(vec!["1".into()]),
            &[("0", "x", "1")],
        )
        .unwrap();
        let spec = Automaton::chain(x.clone(), &Trace::from_names(&["x"])).unwrap();
        assert!(marks_x.marked_inclusion(&spec).unwrap().holds());

        // marks {x y} against closure of {x}
        let marks_xy = Automaton::new(
            x.clone(),
            vec!["0".into(), "1".into(), "2".into()],
            "0",
            Some(vec!["2".into()]),
            &[("0", "x", "1"), ("1", "y", "2")],
        )
        .unwrap();
        match marks_xy.marked_inclusion(&spec).unwrap() {
            Verdict::Violated { witness } => assert_eq!(witness, Trace::from_names(&["x", "y"])),
            Verdict::Holds => panic!("expected violation"),
        }
    }

    #[test]
    fn marked_semantics_checks_marked_language_inclusion() {
        let alpha = abc();
        // m marks {a}, p marks {a b}: generated languages agree, marked do not
        let m = Automaton::new(
            alpha.clone(),
            vec!["0".into(), "1".into(), "2".into()],
            "0",
            Some(vec!["1".into()]),
            &[("0", "a", "1"), ("1", "b", "2")],
        )
        .unwrap();
        let p = Automaton::new(
            alpha,
            vec!["0".into(), "1".into(), "2".into()],
            "0",
            Some(vec!["2".into()]),
            &[("0", "a", "1"), ("1", "b", "2")],
        )
        .unwrap();
        assert!(m.satisfies(&p).unwrap().holds());
        match m.satisfies_with(&p, Semantics::Marked).unwrap() {
            Verdict::Violated { witness } => assert_eq!(witness, Trace::from_names(&["a"])),
            Verdict::Holds => panic!("expected a marked-language violation"),
        }
    }

    #[test]
    fn relabel_identity_is_identical() {
        let a = simple();
        let relabeled = a.relabel(&BTreeMap::new()).unwrap();
        assert_eq!(a, relabeled);
    }

    #[test]
    fn isomorphic_detects_renaming_only() {
        let a = simple();
        let renamed = Automaton::new(
            abc(),
            vec!["s1".into(), "s2".into(), "s3".into(), "s4".into(), "s5".into()],
            "s1",
            None,
            &[
                ("s1", "a", "s2"),
                ("s2", "b", "s4"),
                ("s2", "c", "s3"),
                ("s4", "c", "s5"),
            ],
        )
        .unwrap();
        assert!(a.isomorphic(&renamed).unwrap());
        let different = Automaton::new(
            abc(),
            vec!["s1".into(), "s2".into(), "s3".into(), "s4".into(), "s5".into()],
            "s1",
            None,
            &[
                ("s1", "a", "s2"),
                ("s2", "b", "s4"),
                ("s2", "c", "s3"),
                ("s4", "b", "s5"),
            ],
        )
        .unwrap();
        assert!(!a.isomorphic(&different).unwrap());
    }
}
