//! Controllability and observability checks, supervisor realization,
//! supremal-permissive synthesis and the infimal controllable language.
//!
//! Partial-observation synthesis computes the supremal controllable-and-
//! normal sublanguage and requires every controllable event to be
//! observable; under that restriction normality coincides with
//! observability at the supremum.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::alphabet::EventId;
use crate::automaton::{Automaton, StateId, Trace};
use crate::error::{Error, Result};

/// Supervisor realization: a DFA whose unobservable transitions are
/// self-loops and which never disables a feasible uncontrollable event of
/// the plant it was synthesised for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Supervisor {
    realization: Automaton,
}

impl Supervisor {
    /// Wraps an existing DFA as a supervisor without admissibility checks.
    /// Scenario files may supply hand-written supervisors that disable
    /// shared uncontrollable events; they are taken at face value.
    pub fn from_automaton(realization: Automaton) -> Supervisor {
        Supervisor { realization }
    }

    pub fn realization(&self) -> &Automaton {
        &self.realization
    }

    pub fn into_realization(self) -> Automaton {
        self.realization
    }

    /// Realization condition: every defined unobservable transition is a
    /// self-loop.
    pub fn unobservable_self_loops_only(&self) -> bool {
        let a = &self.realization;
        (0..a.state_count()).all(|s| {
            a.transitions_from(s)
                .all(|(e, d)| a.alphabet().is_observable(e) || d == s)
        })
    }

    /// True when the closed loop can generate nothing but the empty trace.
    pub fn is_trivial(&self) -> bool {
        self.realization.accessible().transition_count() == 0
    }
}

/// Controllability verdict with the violating (trace, event) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ControlVerdict {
    Controllable,
    Uncontrollable { prefix: Trace, event: String },
}

impl ControlVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, ControlVerdict::Controllable)
    }
}

/// Observability verdict with the violating (s, t, event) triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObserveVerdict {
    Observable,
    Unobservable { s: Trace, t: Trace, event: String },
}

impl ObserveVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, ObserveVerdict::Observable)
    }
}

/// Result of supremal synthesis: the supervisor plus the closed-loop
/// behaviour it enforces. `trivial` flags the distinguished `{ε}` outcome,
/// which must never pass as silent success.
#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub supervisor: Supervisor,
    pub closed_loop: Automaton,
    pub trivial: bool,
}

/// A sub-behaviour of a plant with explicit plant-state pairing. The
/// generated language is always a sublanguage of the plant's.
#[derive(Debug, Clone)]
struct SyncSub {
    /// plant state per sub-state
    plant: Vec<StateId>,
    trans: Vec<BTreeMap<EventId, usize>>,
}

impl SyncSub {
    /// Builds the synchronous product of a specification automaton with the
    /// plant (both over the same event set). Fails with the offending trace
    /// when the specification is not a sublanguage of the plant.
    fn from_spec(k: &Automaton, g: &Automaton) -> Result<SyncSub> {
        let remap: Vec<EventId> = k
            .alphabet()
            .ids()
            .map(|e| g.alphabet().require(k.alphabet().name(e)))
            .collect::<Result<_>>()?;
        if !k.alphabet().same_events(g.alphabet()) {
            let extra = g
                .alphabet()
                .names()
                .find(|n| !k.alphabet().contains(n))
                .unwrap_or("?");
            return Err(Error::AlphabetMismatch(extra.to_string()));
        }
        let mut pairs: Vec<(StateId, StateId)> = vec![(k.initial(), g.initial())];
        let mut index: HashMap<(StateId, StateId), usize> = HashMap::new();
        index.insert(pairs[0], 0);
        let mut trans: Vec<BTreeMap<EventId, usize>> = vec![BTreeMap::new()];
        let mut parent: Vec<Option<(usize, EventId)>> = vec![None];
        let mut queue = VecDeque::from([0usize]);
        while let Some(p) = queue.pop_front() {
            let (xk, xg) = pairs[p];
            for e in k.alphabet().ids() {
                let ge = remap[e];
                match (k.step(xk, e), g.step(xg, ge)) {
                    (Some(nk), Some(ng)) => {
                        let pair = (nk, ng);
                        let id = *index.entry(pair).or_insert_with(|| {
                            pairs.push(pair);
                            trans.push(BTreeMap::new());
                            parent.push(Some((p, ge)));
                            queue.push_back(pairs.len() - 1);
                            pairs.len() - 1
                        });
                        trans[p].insert(ge, id);
                    }
                    (Some(_), None) => {
                        let mut events = trace_to(&parent, p, g);
                        events.push(k.alphabet().name(e).to_string());
                        return Err(Error::NotSublanguage(Trace(events).to_string()));
                    }
                    _ => {}
                }
            }
        }
        Ok(SyncSub {
            plant: pairs.iter().map(|&(_, q)| q).collect(),
            trans,
        })
    }

    fn len(&self) -> usize {
        self.plant.len()
    }

    fn to_automaton(&self, g: &Automaton) -> Automaton {
        Automaton::from_parts(
            g.alphabet().clone(),
            (0..self.len()).map(|i| i.to_string()).collect(),
            0,
            None,
            None,
            self.trans.clone(),
        )
    }

    /// Keeps only the states reachable from 0, preserving relative order.
    fn accessible(&self) -> Option<SyncSub> {
        let mut map = vec![None; self.len()];
        let mut order = Vec::new();
        map[0] = Some(0);
        order.push(0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(s) = queue.pop_front() {
            for &d in self.trans[s].values() {
                if map[d].is_none() {
                    map[d] = Some(order.len());
                    order.push(d);
                    queue.push_back(d);
                }
            }
        }
        Some(SyncSub {
            plant: order.iter().map(|&s| self.plant[s]).collect(),
            trans: order
                .iter()
                .map(|&s| {
                    self.trans[s]
                        .iter()
                        .map(|(&e, &d)| (e, map[d].unwrap()))
                        .collect()
                })
                .collect(),
        })
    }

    /// Removes states kept in `dead`, then trims. Returns `None` when the
    /// initial state dies.
    fn without(&self, dead: &[bool]) -> Option<SyncSub> {
        if dead[0] {
            return None;
        }
        let trans: Vec<BTreeMap<EventId, usize>> = (0..self.len())
            .map(|s| {
                self.trans[s]
                    .iter()
                    .filter(|(_, &d)| !dead[d])
                    .map(|(&e, &d)| (e, d))
                    .collect()
            })
            .collect();
        SyncSub {
            plant: self.plant.clone(),
            trans,
        }
        .accessible()
    }
}

fn trace_to(parent: &[Option<(usize, EventId)>], mut s: usize, g: &Automaton) -> Vec<String> {
    let mut out = Vec::new();
    while let Some((p, e)) = parent[s] {
        out.push(g.alphabet().name(e).to_string());
        s = p;
    }
    out.reverse();
    out
}

fn resolve_events(g: &Automaton, names: &BTreeSet<String>) -> Result<BTreeSet<EventId>> {
    names.iter().map(|n| g.alphabet().require(n)).collect()
}

/// Controllability of `L(k)` with respect to `L(g)` and the uncontrollable
/// set: `L̄ Σ_uc ∩ L(G) ⊆ L̄`. Fails when `L(k) ⊄ L(g)`.
pub fn check_controllable(
    k: &Automaton,
    g: &Automaton,
    uncontrollable: &BTreeSet<String>,
) -> Result<ControlVerdict> {
    let uc = resolve_events(g, uncontrollable)?;
    let sub = SyncSub::from_spec(k, g)?;
    // BFS for the shortest state enabling an escaping uncontrollable event.
    let mut parent: Vec<Option<(usize, EventId)>> = vec![None; sub.len()];
    let mut seen = vec![false; sub.len()];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(p) = queue.pop_front() {
        for &e in &uc {
            if g.step(sub.plant[p], e).is_some() && !sub.trans[p].contains_key(&e) {
                let events = trace_to(&parent, p, g);
                return Ok(ControlVerdict::Uncontrollable {
                    prefix: Trace(events),
                    event: g.alphabet().name(e).to_string(),
                });
            }
        }
        for (&e, &d) in &sub.trans[p] {
            if !seen[d] {
                seen[d] = true;
                parent[d] = Some((p, e));
                queue.push_back(d);
            }
        }
    }
    Ok(ControlVerdict::Controllable)
}

/// Observability of `L(k)` with respect to `L(g)` and the observable set:
/// equal observations must lead to equal control decisions. Decided on the
/// product of two copies of the specification (the second paired with the
/// plant), synchronised on observable events.
pub fn check_observable(
    k: &Automaton,
    g: &Automaton,
    observable: &BTreeSet<String>,
) -> Result<ObserveVerdict> {
    let obs = resolve_events(g, observable)?;
    let sub = SyncSub::from_spec(k, g)?;
    // State: (position of s in k, position of t in k); plant states ride
    // along inside SyncSub. Moves: unobservable events advance one side,
    // observable events advance both.
    type Pair = (usize, usize);
    let mut states: Vec<Pair> = vec![(0, 0)];
    let mut index: HashMap<Pair, usize> = HashMap::new();
    index.insert((0, 0), 0);
    // parent edge: (origin, event, which side moved: 0 = s, 1 = t, 2 = both)
    let mut parent: Vec<Option<(usize, EventId, u8)>> = vec![None];
    let mut queue = VecDeque::from([0usize]);
    while let Some(p) = queue.pop_front() {
        let (ps, pt) = states[p];
        // violation: s σ ∈ L(k), t σ ∈ L(g), t σ ∉ L(k)
        for e in g.alphabet().ids() {
            if sub.trans[ps].contains_key(&e)
                && g.step(sub.plant[pt], e).is_some()
                && !sub.trans[pt].contains_key(&e)
            {
                let (s_tr, t_tr) = reconstruct_pair(&parent, p, g);
                return Ok(ObserveVerdict::Unobservable {
                    s: Trace(s_tr),
                    t: Trace(t_tr),
                    event: g.alphabet().name(e).to_string(),
                });
            }
        }
        let mut push = |pair: Pair,
                        e: EventId,
                        side: u8,
                        states: &mut Vec<Pair>,
                        parent: &mut Vec<Option<(usize, EventId, u8)>>,
                        queue: &mut VecDeque<usize>| {
            if let std::collections::hash_map::Entry::Vacant(slot) = index.entry(pair) {
                slot.insert(states.len());
                states.push(pair);
                parent.push(Some((p, e, side)));
                queue.push_back(states.len() - 1);
            }
        };
        for e in g.alphabet().ids() {
            if obs.contains(&e) {
                if let (Some(&ns), Some(&nt)) = (sub.trans[ps].get(&e), sub.trans[pt].get(&e)) {
                    push((ns, nt), e, 2, &mut states, &mut parent, &mut queue);
                }
            } else {
                if let Some(&ns) = sub.trans[ps].get(&e) {
                    push((ns, pt), e, 0, &mut states, &mut parent, &mut queue);
                }
                if let Some(&nt) = sub.trans[pt].get(&e) {
                    push((ps, nt), e, 1, &mut states, &mut parent, &mut queue);
                }
            }
        }
    }
    Ok(ObserveVerdict::Observable)
}

fn reconstruct_pair(
    parent: &[Option<(usize, EventId, u8)>],
    mut at: usize,
    g: &Automaton,
) -> (Vec<String>, Vec<String>) {
    let mut s = Vec::new();
    let mut t = Vec::new();
    while let Some((prev, e, side)) = parent[at] {
        let name = g.alphabet().name(e).to_string();
        match side {
            0 => s.push(name),
            1 => t.push(name),
            _ => {
                s.push(name.clone());
                t.push(name);
            }
        }
        at = prev;
    }
    s.reverse();
    t.reverse();
    (s, t)
}

/// Infimal prefix-closed controllable sublanguage containing ε: the plant
/// restricted to uncontrollable transitions, accessible part. Generates
/// `Σ_uc* ∩ L(g)`.
pub fn inf_c(g: &Automaton, uncontrollable: &BTreeSet<String>) -> Result<Automaton> {
    let uc = resolve_events(g, uncontrollable)?;
    let keep: Vec<(String, String, String)> = g
        .transition_triples()
        .into_iter()
        .filter(|(_, e, _)| uc.contains(&g.alphabet().require(e).unwrap()))
        .collect();
    let triples: Vec<(&str, &str, &str)> = keep
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    let restricted = Automaton::new(
        g.alphabet().clone(),
        g.state_names().map(|s| s.to_string()).collect(),
        g.state_name(g.initial()),
        None,
        &triples,
    )?;
    Ok(restricted.accessible())
}

/// Supremal controllable-and-normal sublanguage of `L(k)` with respect to
/// `L(g)`, realized as a supervisor. Controllable events must be observable.
/// Returns `None` when the supremal sublanguage is empty; the `{ε}` outcome
/// is returned as a supervisor flagged `trivial`.
pub fn supremal_supervisor(
    g: &Automaton,
    k: &Automaton,
    uncontrollable: &BTreeSet<String>,
    observable: &BTreeSet<String>,
) -> Result<Option<SynthesisResult>> {
    let uc = resolve_events(g, uncontrollable)?;
    let obs = resolve_events(g, observable)?;
    for e in g.alphabet().ids() {
        if !uc.contains(&e) && !obs.contains(&e) {
            return Err(Error::UnobservableControllable(
                g.alphabet().name(e).to_string(),
            ));
        }
    }
    let mut cur = match SyncSub::from_spec(k, g)?.accessible() {
        Some(s) => s,
        None => return Ok(None),
    };
    for _round in 0..64 {
        let after_c = match supc_step(&cur, g, &uc) {
            Some(s) => s,
            None => return Ok(None),
        };
        let after_n = match supn_step(&after_c, g, &obs) {
            Some(s) => s,
            None => return Ok(None),
        };
        let fixed = after_n
            .to_automaton(g)
            .language_equal(&cur.to_automaton(g))?;
        cur = after_n;
        if fixed {
            let supervisor = realize(&cur, g, &obs);
            let closed_loop = cur.to_automaton(g);
            let trivial = closed_loop.transition_count() == 0;
            return Ok(Some(SynthesisResult {
                supervisor,
                closed_loop,
                trivial,
            }));
        }
    }
    Err(Error::SynthesisDiverged)
}

/// Removes states from which an uncontrollable plant event escapes the
/// specification (directly or through uncontrollable continuations).
fn supc_step(sub: &SyncSub, g: &Automaton, uc: &BTreeSet<EventId>) -> Option<SyncSub> {
    let mut bad = vec![false; sub.len()];
    let mut changed = true;
    while changed {
        changed = false;
        for p in 0..sub.len() {
            if bad[p] {
                continue;
            }
            for &e in uc {
                if g.step(sub.plant[p], e).is_none() {
                    continue;
                }
                let doomed = match sub.trans[p].get(&e) {
                    None => true,
                    Some(&d) => bad[d],
                };
                if doomed {
                    bad[p] = true;
                    changed = true;
                    break;
                }
            }
        }
    }
    sub.without(&bad)
}

/// Removes strings whose observation coincides with the observation of some
/// plant string that already left the specification (supremal-normality
/// step), realized on the product with an observer of an escape tracker.
fn supn_step(sub: &SyncSub, g: &Automaton, obs: &BTreeSet<EventId>) -> Option<SyncSub> {
    // Tracker: plant state plus the sub-state the same string reaches, or
    // None once the string has escaped the specification.
    type TrackerState = (StateId, Option<usize>);
    type Subset = BTreeSet<TrackerState>;
    let closure = |seed: Subset| -> Subset {
        let mut set = seed;
        let mut stack: Vec<TrackerState> = set.iter().copied().collect();
        while let Some((q, po)) = stack.pop() {
            for (e, qn) in g.transitions_from(q) {
                if obs.contains(&e) {
                    continue;
                }
                let pn = po.and_then(|p| sub.trans[p].get(&e).copied());
                if set.insert((qn, pn)) {
                    stack.push((qn, pn));
                }
            }
        }
        set
    };
    let escaped = |s: &Subset| s.iter().any(|&(_, po)| po.is_none());

    let init_subset = closure(Subset::from([(g.initial(), Some(0))]));
    if escaped(&init_subset) {
        return None;
    }
    let mut subsets: Vec<Subset> = vec![init_subset.clone()];
    let mut subset_index: HashMap<Subset, usize> = HashMap::new();
    subset_index.insert(init_subset, 0);

    type Aug = (usize, usize);
    let mut states: Vec<Aug> = vec![(0, 0)];
    let mut index: HashMap<Aug, usize> = HashMap::new();
    index.insert((0, 0), 0);
    let mut trans: Vec<BTreeMap<EventId, usize>> = vec![BTreeMap::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        let (p, sid) = states[a];
        for (&e, &pn) in &sub.trans[p].clone() {
            let next_sid = if obs.contains(&e) {
                let stepped: Subset = subsets[sid]
                    .iter()
                    .filter_map(|&(q, po)| {
                        g.step(q, e).map(|qn| {
                            (qn, po.and_then(|x| sub.trans[x].get(&e).copied()))
                        })
                    })
                    .collect();
                let closed = closure(stepped);
                if escaped(&closed) {
                    continue; // string acquires a bad observation: removed
                }
                *subset_index.entry(closed.clone()).or_insert_with(|| {
                    subsets.push(closed);
                    subsets.len() - 1
                })
            } else {
                sid
            };
            let aug = (pn, next_sid);
            let id = *index.entry(aug).or_insert_with(|| {
                states.push(aug);
                trans.push(BTreeMap::new());
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            trans[a].insert(e, id);
        }
    }
    SyncSub {
        plant: states.iter().map(|&(p, _)| sub.plant[p]).collect(),
        trans,
    }
    .accessible()
}

/// Observer-based supervisor realization: states are observation classes of
/// the enforced behaviour; unobservable events self-loop wherever some class
/// member enables them, observable events follow the observer step.
fn realize(sub: &SyncSub, g: &Automaton, obs: &BTreeSet<EventId>) -> Supervisor {
    let closure = |seed: BTreeSet<usize>| -> BTreeSet<usize> {
        let mut set = seed;
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(p) = stack.pop() {
            for (&e, &d) in &sub.trans[p] {
                if !obs.contains(&e) && set.insert(d) {
                    stack.push(d);
                }
            }
        }
        set
    };
    let init = closure(BTreeSet::from([0]));
    let mut subsets: Vec<BTreeSet<usize>> = vec![init.clone()];
    let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    index.insert(init, 0);
    let mut trans: Vec<BTreeMap<EventId, StateId>> = vec![BTreeMap::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(z) = queue.pop_front() {
        let members = subsets[z].clone();
        for e in g.alphabet().ids() {
            if obs.contains(&e) {
                let stepped: BTreeSet<usize> = members
                    .iter()
                    .filter_map(|&p| sub.trans[p].get(&e).copied())
                    .collect();
                if stepped.is_empty() {
                    continue;
                }
                let closed = closure(stepped);
                let id = *index.entry(closed.clone()).or_insert_with(|| {
                    subsets.push(closed);
                    trans.push(BTreeMap::new());
                    queue.push_back(subsets.len() - 1);
                    subsets.len() - 1
                });
                trans[z].insert(e, id);
            } else if members.iter().any(|&p| sub.trans[p].contains_key(&e)) {
                trans[z].insert(e, z);
            }
        }
    }
    let names = subsets
        .iter()
        .map(|set| {
            let items: Vec<String> = set.iter().map(|p| p.to_string()).collect();
            format!("{{{}}}", items.join(","))
        })
        .collect();
    Supervisor {
        realization: Automaton::from_parts(g.alphabet().clone(), names, 0, None, None, trans),
    }
}

/// Closed-loop behaviour `L(S ∥ G)`. Requires identical event sets.
pub fn closed_loop(s: &Supervisor, g: &Automaton) -> Result<Automaton> {
    if !s.realization.alphabet().same_events(g.alphabet()) {
        let diff = s
            .realization
            .alphabet()
            .names()
            .find(|n| !g.alphabet().contains(n))
            .or_else(|| {
                g.alphabet()
                    .names()
                    .find(|n| !s.realization.alphabet().contains(n))
            })
            .unwrap_or("?");
        return Err(Error::AlphabetMismatch(diff.to_string()));
    }
    s.realization.compose(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use std::sync::Arc;

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    // Post-fault two-state plant: q2 -η4-> q3, η2 self-loop on q3.
    fn fig2() -> Automaton {
        let alpha = Alphabet::from_sets(
            &["eta1", "eta2", "eta3", "eta4"],
            &["eta1", "eta3", "eta4"],
            &["eta1", "eta2", "eta3", "eta4"],
        )
        .unwrap();
        Automaton::new(
            alpha,
            vec!["q2".into(), "q3".into()],
            "q2",
            None,
            &[("q2", "eta4", "q3"), ("q3", "eta2", "q3")],
        )
        .unwrap()
    }

    #[test]
    fn controllable_when_spec_equals_plant() {
        let g = fig2();
        assert!(check_controllable(&g, &g, &set(&["eta2"])).unwrap().holds());
    }

    #[test]
    fn uncontrollable_with_witness() {
        let g = fig2();
        let k = Automaton::chain(g.alphabet().clone(), &Trace::from_names(&["eta4"])).unwrap();
        match check_controllable(&k, &g, &set(&["eta2"])).unwrap() {
            ControlVerdict::Uncontrollable { prefix, event } => {
                assert_eq!(prefix, Trace::from_names(&["eta4"]));
                assert_eq!(event, "eta2");
            }
            ControlVerdict::Controllable => panic!("expected violation"),
        }
    }

    #[test]
    fn sublanguage_precondition_enforced() {
        let g = fig2();
        let k = Automaton::chain(g.alphabet().clone(), &Trace::from_names(&["eta2"])).unwrap();
        assert!(matches!(
            check_controllable(&k, &g, &set(&["eta2"])),
            Err(Error::NotSublanguage(_))
        ));
    }

    #[test]
    fn full_observation_is_always_observable() {
        let g = fig2();
        let k = Automaton::chain(g.alphabet().clone(), &Trace::from_names(&["eta4"])).unwrap();
        let obs = set(&["eta1", "eta2", "eta3", "eta4"]);
        assert!(check_observable(&k, &g, &obs).unwrap().holds());
    }

    #[test]
    fn classic_two_string_conflict_is_unobservable() {
        // u unobservable; after ε the spec allows c, after u it forbids c,
        // while the plant allows both.
        let alpha = Alphabet::from_sets(&["u", "c"], &["c"], &["c"]).unwrap();
        let g = Automaton::new(
            alpha.clone(),
            vec!["0".into(), "1".into(), "2".into(), "3".into()],
            "0",
            None,
            &[("0", "u", "1"), ("0", "c", "2"), ("1", "c", "3")],
        )
        .unwrap();
        let k = Automaton::new(
            alpha,
            vec!["0".into(), "1".into(), "2".into()],
            "0",
            None,
            &[("0", "u", "1"), ("0", "c", "2")],
        )
        .unwrap();
        match check_observable(&k, &g, &set(&["c"])).unwrap() {
            ObserveVerdict::Unobservable { s, t, event } => {
                assert_eq!(event, "c");
                assert_eq!(s, Trace::empty());
                assert_eq!(t, Trace::from_names(&["u"]));
            }
            ObserveVerdict::Observable => panic!("expected violation"),
        }
    }

    #[test]
    fn inf_c_edge_cases() {
        let g = fig2();
        // no uncontrollable events: {ε}
        let empty = inf_c(&g, &BTreeSet::new()).unwrap();
        assert_eq!(empty.transition_count(), 0);
        // eta2 uncontrollable but only enabled after controllable eta4: {ε}
        let restricted = inf_c(&g, &set(&["eta2"])).unwrap();
        assert_eq!(restricted.transition_count(), 0);
        // everything uncontrollable: the full language
        let full = inf_c(&g, &set(&["eta1", "eta2", "eta3", "eta4"])).unwrap();
        assert!(full.language_equal(&g).unwrap());
    }

    fn fig4_plant() -> (Automaton, Automaton) {
        let alpha =
            Alphabet::from_sets(&["a", "b", "c"], &["a", "c"], &["a", "b", "c"]).unwrap();
        let g = Automaton::new(
            alpha.clone(),
            vec!["1".into(), "2".into(), "3".into(), "4".into(), "5".into()],
            "1",
            None,
            &[("1", "a", "2"), ("2", "b", "4"), ("2", "c", "3"), ("4", "c", "5")],
        )
        .unwrap();
        let safe = Automaton::new(
            alpha,
            vec!["1".into(), "2".into(), "3".into(), "4".into()],
            "1",
            None,
            &[("1", "a", "2"), ("2", "b", "4"), ("2", "c", "3")],
        )
        .unwrap();
        (g, safe)
    }

    #[test]
    fn supremal_on_already_controllable_spec_is_fixpoint() {
        let (g, safe) = fig4_plant();
        let result = supremal_supervisor(&g, &safe, &set(&["b"]), &set(&["a", "b", "c"]))
            .unwrap()
            .unwrap();
        assert!(result.closed_loop.language_equal(&safe).unwrap());
        assert!(!result.trivial);
        // the realization has the same shape as the specification
        assert!(result.supervisor.realization().state_count() == 4);
        let loop_lang = closed_loop(&result.supervisor, &g).unwrap();
        assert!(loop_lang.language_equal(&safe).unwrap());
    }

    #[test]
    fn supremal_cuts_uncontrollable_escape() {
        // L(g) entire is reachable: supC of closure{eta4 eta2*} w.r.t. fig2
        // with eta2 uncontrollable is the full language.
        let g = fig2();
        let k = Automaton::new(
            g.alphabet().clone(),
            vec!["x".into(), "y".into()],
            "x",
            None,
            &[("x", "eta4", "y"), ("y", "eta2", "y")],
        )
        .unwrap();
        let obs = set(&["eta1", "eta2", "eta3", "eta4"]);
        let result = supremal_supervisor(&g, &k, &set(&["eta2"]), &obs)
            .unwrap()
            .unwrap();
        assert!(result.closed_loop.language_equal(&g).unwrap());
    }

    #[test]
    fn supremal_empty_when_uncontrollable_at_initial() {
        // plant does uncontrollable u at the initial state; spec forbids it
        let alpha = Alphabet::from_sets(&["u"], &[], &["u"]).unwrap();
        let g = Automaton::new(
            alpha.clone(),
            vec!["0".into(), "1".into()],
            "0",
            None,
            &[("0", "u", "1")],
        )
        .unwrap();
        let k = Automaton::epsilon(alpha);
        let outcome = supremal_supervisor(&g, &k, &set(&["u"]), &set(&["u"])).unwrap();
        assert!(outcome.is_none());
    }

    #[test]
    fn supremal_trivial_when_only_epsilon_survives() {
        // plant: controllable c then uncontrollable u; spec forbids c u
        let alpha = Alphabet::from_sets(&["c", "u"], &["c"], &["c", "u"]).unwrap();
        let g = Automaton::new(
            alpha.clone(),
            vec!["0".into(), "1".into(), "2".into()],
            "0",
            None,
            &[("0", "c", "1"), ("1", "u", "2")],
        )
        .unwrap();
        let k = Automaton::chain(alpha, &Trace::from_names(&["c"])).unwrap();
        let result = supremal_supervisor(&g, &k, &set(&["u"]), &set(&["c", "u"]))
            .unwrap()
            .unwrap();
        assert!(result.trivial);
        assert!(result.supervisor.is_trivial());
    }

    #[test]
    fn synthesis_requires_observable_controllables() {
        let (g, safe) = fig4_plant();
        let err = supremal_supervisor(&g, &safe, &set(&["b"]), &set(&["a", "b"])).unwrap_err();
        assert_eq!(err, Error::UnobservableControllable("c".into()));
    }

    #[test]
    fn supremal_under_partial_observation_cuts_by_normality() {
        // Plant: a (unobservable, uncontrollable) then c; also c directly.
        // Spec allows c only without the preceding a. Under normality the
        // supervisor cannot distinguish, so c must be disabled entirely.
        let alpha = Alphabet::from_sets(&["a", "c"], &["c"], &["c"]).unwrap();
        let g = Automaton::new(
            alpha.clone(),
            vec!["0".into(), "1".into(), "2".into(), "3".into()],
            "0",
            None,
            &[("0", "a", "1"), ("0", "c", "2"), ("1", "c", "3")],
        )
        .unwrap();
        let k = Automaton::new(
            alpha,
            vec!["0".into(), "1".into(), "2".into()],
            "0",
            None,
            &[("0", "a", "1"), ("0", "c", "2")],
        )
        .unwrap();
        let result = supremal_supervisor(&g, &k, &set(&["a"]), &set(&["c"]))
            .unwrap()
            .unwrap();
        // supremal normal sublanguage keeps only {ε, a}
        assert!(result.closed_loop.generates(&Trace::from_names(&["a"])));
        assert!(!result.closed_loop.generates(&Trace::from_names(&["c"])));
        assert!(!result
            .closed_loop
            .generates(&Trace::from_names(&["a", "c"])));
        // realization: unobservable self-loop on a at the initial class
        assert!(result.supervisor.unobservable_self_loops_only());
    }

    #[test]
    fn closed_loop_universal_supervisor_keeps_plant_language() {
        let (g, _) = fig4_plant();
        let s = Supervisor::from_automaton(Automaton::universal(g.alphabet().clone()));
        assert!(closed_loop(&s, &g).unwrap().language_equal(&g).unwrap());
    }

    #[test]
    fn closed_loop_rejects_alphabet_mismatch() {
        let (g, _) = fig4_plant();
        let other: Arc<Alphabet> = Alphabet::from_sets(&["a"], &[], &["a"]).unwrap();
        let s = Supervisor::from_automaton(Automaton::universal(other));
        assert!(matches!(
            closed_loop(&s, &g),
            Err(Error::AlphabetMismatch(_))
        ));
    }
}
