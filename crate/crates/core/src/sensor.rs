//! Sensor-fault models, safe diagnosers, SF-safe controllability, and
//! post-detection supervisor synthesis.
//!
//! Faulty readings carry occurrence semantics: a reading `σ^f` counts as a
//! physical occurrence of `σ` for every safety judgement, although the
//! supervisor cannot see it. Safety checks therefore relabel `σ^f ↦ σ` and
//! erase bookkeeping events (sensor-fault, detection and mode-switch
//! events) by projection.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use crate::alphabet::{Alphabet, EventDecl, EventId};
use crate::automaton::{Automaton, StateId, Trace, Verdict};
use crate::error::{Error, Result};
use crate::fault::FaultConfig;
use crate::synthesis::{self, Supervisor};

/// Splits a composed state name `"(left,right)"` at the top-level comma.
pub fn split_pair_name(name: &str) -> Option<(String, String)> {
    let inner = name.strip_prefix('(')?.strip_suffix(')')?;
    let mut depth = 0usize;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' | '{' | '[' => depth += 1,
            ')' | '}' | ']' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                return Some((inner[..i].to_string(), inner[i + 1..].to_string()));
            }
            _ => {}
        }
    }
    None
}

fn primed_names(base: &Automaton) -> Vec<String> {
    let existing: BTreeSet<&str> = base.state_names().collect();
    let mut suffix = "'".to_string();
    loop {
        if base
            .state_names()
            .all(|s| !existing.contains(format!("{s}{suffix}").as_str()))
        {
            return base
                .state_names()
                .map(|s| format!("{s}{suffix}"))
                .collect();
        }
        suffix.push('\'');
    }
}

fn faulty_alphabet(
    base: &Arc<Alphabet>,
    cfg: &FaultConfig,
    which: &[String],
) -> Result<Arc<Alphabet>> {
    let mut added = Vec::new();
    for s in which {
        added.push(EventDecl::new(cfg.sensor_fault_event(s)?, false, false));
        added.push(EventDecl::new(cfg.faulty_reading(s)?, false, false));
    }
    base.with_events(added)
}

/// Unified plant model under the suspicious readings in `which`: the
/// nominal copy plus one faulty copy in which every suspicious reading also
/// fires with its faulty label, connected by sensor-fault transitions from
/// each nominal state to its twin. Faulty readings and fault events are
/// uncontrollable and unobservable.
pub fn build_faulty_plant(
    g: &Automaton,
    cfg: &FaultConfig,
    which: &[String],
) -> Result<Automaton> {
    for s in which {
        if !cfg.has_sensor(s) {
            return Err(Error::Precondition(format!(
                "`{s}` is not a declared sensor reading"
            )));
        }
    }
    if which.is_empty() {
        return Ok(g.accessible());
    }
    let alphabet = faulty_alphabet(g.alphabet(), cfg, which)?;
    let primed = primed_names(g);
    let mut states: Vec<String> = g.state_names().map(|s| s.to_string()).collect();
    states.extend(primed.iter().cloned());
    let mut triples: Vec<(String, String, String)> = Vec::new();
    for (src, ev, dst) in g.transition_triples() {
        let si = g.state_id(&src).unwrap();
        let di = g.state_id(&dst).unwrap();
        triples.push((src, ev.clone(), dst));
        triples.push((primed[si].clone(), ev.clone(), primed[di].clone()));
        if which.contains(&ev) {
            triples.push((
                primed[si].clone(),
                cfg.faulty_reading(&ev)?.to_string(),
                primed[di].clone(),
            ));
        }
    }
    for s in which {
        let f = cfg.sensor_fault_event(s)?.to_string();
        for (i, name) in g.state_names().enumerate() {
            triples.push((name.to_string(), f.clone(), primed[i].clone()));
        }
    }
    let refs: Vec<(&str, &str, &str)> = triples
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    let built = Automaton::new(
        alphabet,
        states,
        g.state_name(g.initial()),
        None,
        &refs,
    )?;
    Ok(built.accessible())
}

/// Layered variant of the faulty plant: the synchronous product of the
/// single-sensor unified models, letting each sensor fault independently.
/// Kept for comparison against the single-copy construction.
pub fn build_faulty_plant_layered(
    g: &Automaton,
    cfg: &FaultConfig,
    which: &[String],
) -> Result<Automaton> {
    let mut acc = g.accessible();
    for s in which {
        let single = build_faulty_plant(g, cfg, std::slice::from_ref(s))?;
        acc = acc.compose(&single)?;
    }
    Ok(acc)
}

/// Unified supervisor model under the suspicious readings in `which`: the
/// faulty copy follows the nominal transition function and adds self-loops
/// on each faulty reading wherever the underlying reading was enabled, and
/// on uncontrollable events and faulty readings wherever undefined, so that
/// uncontrollable events are never disabled in a faulty mode.
pub fn build_faulty_supervisor(
    sup: &Supervisor,
    cfg: &FaultConfig,
    which: &[String],
) -> Result<Automaton> {
    for s in which {
        if !cfg.has_sensor(s) {
            return Err(Error::Precondition(format!(
                "`{s}` is not a declared sensor reading"
            )));
        }
    }
    let x = sup.realization();
    if which.is_empty() {
        return Ok(x.accessible());
    }
    let alphabet = faulty_alphabet(x.alphabet(), cfg, which)?;
    let primed = primed_names(x);
    let mut states: Vec<String> = x.state_names().map(|s| s.to_string()).collect();
    states.extend(primed.iter().cloned());
    let mut triples: Vec<(String, String, String)> = Vec::new();
    for (src, ev, dst) in x.transition_triples() {
        let si = x.state_id(&src).unwrap();
        let di = x.state_id(&dst).unwrap();
        triples.push((src, ev.clone(), dst));
        triples.push((primed[si].clone(), ev, primed[di].clone()));
    }
    for (i, _) in x.state_names().enumerate() {
        let sid = i;
        // faulty readings: self-loop everywhere in the faulty copy
        for s in which {
            triples.push((
                primed[sid].clone(),
                cfg.faulty_reading(s)?.to_string(),
                primed[sid].clone(),
            ));
        }
        // uncontrollable events undefined at the underlying state
        for e in x.alphabet().ids() {
            if !x.alphabet().is_controllable(e) && x.step(sid, e).is_none() {
                triples.push((
                    primed[sid].clone(),
                    x.alphabet().name(e).to_string(),
                    primed[sid].clone(),
                ));
            }
        }
        for s in which {
            let f = cfg.sensor_fault_event(s)?.to_string();
            triples.push((x.state_name(sid).to_string(), f, primed[sid].clone()));
        }
    }
    let refs: Vec<(&str, &str, &str)> = triples
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    let built = Automaton::new(
        alphabet,
        states,
        x.state_name(x.initial()),
        None,
        &refs,
    )?;
    Ok(built.accessible())
}

/// Closed-loop model of the controlled subsystem in the presence of the
/// faults: the synchronous product of the unified supervisor and plant
/// models.
pub fn closed_loop_fault_model(s_f: &Automaton, g_f: &Automaton) -> Result<Automaton> {
    s_f.compose(g_f)
}

/// The safety automaton with faulty readings synchronised as their
/// underlying readings. Bookkeeping events stay outside the alphabet and
/// interleave freely in products.
pub fn occurrence_safety(safe: &Automaton, cfg: &FaultConfig, target: &Alphabet) -> Result<Automaton> {
    let mut added = Vec::new();
    let mut duals: Vec<(String, String)> = Vec::new();
    for (reading, faulty) in cfg.reading_pairs() {
        if target.contains(&faulty) && safe.alphabet().contains(&reading) {
            let id = target.id(&faulty).unwrap();
            added.push(EventDecl {
                name: faulty.clone(),
                controllable: target.is_controllable(id),
                observable: target.is_observable(id),
                owners: target.owners(id).clone(),
            });
            duals.push((reading, faulty));
        }
    }
    let alphabet = safe.alphabet().with_events(added)?;
    let mut triples = safe.transition_triples();
    for (src, ev, dst) in safe.transition_triples() {
        for (reading, faulty) in &duals {
            if &ev == reading {
                triples.push((src.clone(), faulty.clone(), dst.clone()));
            }
        }
    }
    let refs: Vec<(&str, &str, &str)> = triples
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    Automaton::new(
        alphabet,
        safe.state_names().map(|s| s.to_string()).collect(),
        safe.state_name(safe.initial()),
        None,
        &refs,
    )
}

/// States of the closed-loop fault model reachable by a string whose
/// occurrence projection leaves the safety language.
pub fn unsafe_states(
    gks: &Automaton,
    safe: &Automaton,
    cfg: &FaultConfig,
) -> Result<BTreeSet<StateId>> {
    let lifted = occurrence_safety(safe, cfg, gks.alphabet())?;
    let completed = lifted.completion();
    let qe = completed.error_state().unwrap();
    let (pairs, _, _, _) = gks.product_pairs(&completed)?;
    Ok(pairs
        .iter()
        .filter(|&&(_, b)| b == qe)
        .map(|&(a, _)| a)
        .collect())
}

/// Shortest trace of the closed-loop fault model violating the safety
/// language under occurrence semantics, if any.
pub fn occurrence_violation_witness(
    gks: &Automaton,
    safe: &Automaton,
    cfg: &FaultConfig,
) -> Result<Option<Trace>> {
    let lifted = occurrence_safety(safe, cfg, gks.alphabet())?;
    match gks.satisfies(&lifted)? {
        Verdict::Holds => Ok(None),
        Verdict::Violated { witness } => Ok(Some(witness)),
    }
}

/// One member of a diagnoser state: a closed-loop state, one N/Y label per
/// tracked sensor-fault event, and the unsafe flag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DiagnoserMember {
    pub labels: Vec<bool>,
    pub is_unsafe: bool,
    pub state: String,
}

impl DiagnoserMember {
    fn render(&self) -> String {
        let mut label: String = self
            .labels
            .iter()
            .map(|&y| if y { 'Y' } else { 'N' })
            .collect();
        if self.labels.iter().any(|&y| y) {
            label.push('!');
        }
        if self.is_unsafe {
            label.push('U');
        }
        format!("{}:{}", self.state, label)
    }
}

/// A diagnoser state: a canonical, non-empty set of members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagnoserState {
    pub members: Vec<DiagnoserMember>,
}

impl DiagnoserState {
    /// Canonical, stable name of the state. Members are sorted by (label
    /// vector, unsafe flag, state name) and rendered as
    /// `state:LABELS[!][U]`: one `N`/`Y` per tracked fault event, `!`
    /// appended when any label is `Y`, `U` when the member is unsafe,
    /// joined with commas inside braces, e.g.
    /// `{(3,3):N,(3',3'):Y!,(3',5'):Y!U}`.
    pub fn render(&self) -> String {
        let items: Vec<String> = self.members.iter().map(|m| m.render()).collect();
        format!("{{{}}}", items.join(","))
    }

    /// All members carry the N label for every tracked fault.
    pub fn is_normal(&self) -> bool {
        self.members.iter().all(|m| m.labels.iter().all(|&y| !y))
    }

    /// Every member carries the Y label for fault `k`.
    pub fn certain_for(&self, k: usize) -> bool {
        self.members.iter().all(|m| m.labels[k])
    }

    pub fn certain_any(&self, tracked: usize) -> bool {
        let width = self
            .members
            .iter()
            .map(|m| m.labels.len())
            .min()
            .unwrap_or(0);
        (0..tracked.min(width)).any(|k| self.certain_for(k))
    }

    /// Some member carries Y and some carries N for fault `k`.
    pub fn uncertain_for(&self, k: usize) -> bool {
        let any = self.members.iter().any(|m| m.labels[k]);
        any && !self.certain_for(k)
    }
}

/// Safe diagnoser: the observer of the closed-loop fault model with
/// fault-label propagation and per-member unsafe flags.
#[derive(Debug, Clone)]
pub struct Diagnoser {
    pub automaton: Automaton,
    pub states: Vec<DiagnoserState>,
    /// sensor-fault event names, fixing the label vector order
    pub tracked: Vec<String>,
}

impl Diagnoser {
    pub fn state_by_observation(&self, obs: &Trace) -> Result<&DiagnoserState> {
        let id = self.automaton.state_after(obs)?;
        Ok(&self.states[id])
    }
}

/// Builds the safe diagnoser of a closed-loop fault model: a deterministic
/// observer over the observable events whose members carry one N/Y label
/// per sensor-fault event (flipped on crossing the fault transition) and
/// the unsafe flag derived from the safety language.
pub fn build_safe_diagnoser(
    gks: &Automaton,
    safe: &Automaton,
    cfg: &FaultConfig,
) -> Result<Diagnoser> {
    let alphabet = gks.alphabet();
    if alphabet.ids().all(|e| !alphabet.is_observable(e)) {
        return Err(Error::Precondition(
            "diagnoser needs at least one observable event".into(),
        ));
    }
    let tracked: Vec<String> = cfg
        .sensors()
        .iter()
        .filter_map(|s| cfg.sensor_fault_event(s).ok())
        .filter(|f| alphabet.contains(f))
        .map(|f| f.to_string())
        .collect();
    let fault_index: BTreeMap<EventId, usize> = tracked
        .iter()
        .enumerate()
        .map(|(k, f)| (alphabet.require(f).unwrap(), k))
        .collect();
    let unsafe_set = unsafe_states(gks, safe, cfg)?;

    type Member = (StateId, Vec<bool>);
    type Subset = BTreeSet<Member>;
    let closure = |seed: Subset| -> Subset {
        let mut set = seed;
        let mut stack: Vec<Member> = set.iter().cloned().collect();
        while let Some((s, labels)) = stack.pop() {
            for (e, d) in gks.transitions_from(s) {
                if alphabet.is_observable(e) {
                    continue;
                }
                let mut next = labels.clone();
                if let Some(&k) = fault_index.get(&e) {
                    next[k] = true;
                }
                let member = (d, next);
                if set.insert(member.clone()) {
                    stack.push(member);
                }
            }
        }
        set
    };

    let init = closure(Subset::from([(gks.initial(), vec![false; tracked.len()])]));
    let mut subsets: Vec<Subset> = vec![init.clone()];
    let mut index: BTreeMap<Subset, usize> = BTreeMap::new();
    index.insert(init, 0);
    let obs_names: BTreeSet<String> = alphabet.observable_names();
    let obs_alphabet = alphabet.restrict(&obs_names)?;
    let mut trans: Vec<BTreeMap<EventId, StateId>> = vec![BTreeMap::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(p) = queue.pop_front() {
        let current = subsets[p].clone();
        for e in obs_alphabet.ids() {
            let src = alphabet.require(obs_alphabet.name(e))?;
            let stepped: Subset = current
                .iter()
                .filter_map(|(s, labels)| gks.step(*s, src).map(|d| (d, labels.clone())))
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
            trans[p].insert(e, id);
        }
    }
    let states: Vec<DiagnoserState> = subsets
        .iter()
        .map(|set| {
            let mut members: Vec<DiagnoserMember> = set
                .iter()
                .map(|(s, labels)| DiagnoserMember {
                    labels: labels.clone(),
                    is_unsafe: unsafe_set.contains(s),
                    state: gks.state_name(*s).to_string(),
                })
                .collect();
            members.sort();
            DiagnoserState { members }
        })
        .collect();
    let names: Vec<String> = states.iter().map(|s| s.render()).collect();
    let automaton = Automaton::from_parts(obs_alphabet, names, 0, None, None, trans);
    Ok(Diagnoser {
        automaton,
        states,
        tracked,
    })
}

/// First-entered certain states: diagnoser states certain for some fault
/// with a predecessor that is not certain for that same fault.
pub fn first_entered_certain(diag: &Diagnoser) -> BTreeSet<usize> {
    let mut result = BTreeSet::new();
    let a = &diag.automaton;
    for src in 0..a.state_count() {
        for (_, dst) in a.transitions_from(src) {
            for k in 0..diag.tracked.len() {
                if diag.states[dst].certain_for(k) && !diag.states[src].certain_for(k) {
                    result.insert(dst);
                }
            }
        }
    }
    result
}

/// The three SF-safe controllability conditions, in the order they are
/// checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfCondition {
    /// an uncertain state has a fault-labelled unsafe member
    UncertainUnsafeMember,
    /// a first-entered certain state has an unsafe member
    CertainEntryUnsafeMember,
    /// an uncontrollable string leads from a certain-state member to an
    /// unsafe state
    UncontrollableEscape,
}

impl std::fmt::Display for SfCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SfCondition::UncertainUnsafeMember => write!(f, "i"),
            SfCondition::CertainEntryUnsafeMember => write!(f, "ii"),
            SfCondition::UncontrollableEscape => write!(f, "iii"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SfVerdict {
    SfSafe,
    NotSfSafe {
        condition: SfCondition,
        state: String,
        witness: Option<Trace>,
    },
}

impl SfVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SfVerdict::SfSafe)
    }
}

/// SF-safe controllability of the closed-loop fault model: faults must be
/// unambiguously detected before any unsafe behaviour, and a controllable
/// event must separate every detection point from unsafety.
pub fn check_sf_safe(gks: &Automaton, safe: &Automaton, cfg: &FaultConfig) -> Result<SfVerdict> {
    let diag = build_safe_diagnoser(gks, safe, cfg)?;
    let unsafe_set = unsafe_states(gks, safe, cfg)?;
    // (i) no uncertain state may contain a fault-labelled unsafe member
    for (i, st) in diag.states.iter().enumerate() {
        for k in 0..diag.tracked.len() {
            if st.uncertain_for(k)
                && st.members.iter().any(|m| m.labels[k] && m.is_unsafe)
            {
                return Ok(SfVerdict::NotSfSafe {
                    condition: SfCondition::UncertainUnsafeMember,
                    state: diag.automaton.state_name(i).to_string(),
                    witness: None,
                });
            }
        }
    }
    let fc = first_entered_certain(&diag);
    // (ii) no first-entered certain state may contain an unsafe member
    for &q in &fc {
        if diag.states[q].members.iter().any(|m| m.is_unsafe) {
            return Ok(SfVerdict::NotSfSafe {
                condition: SfCondition::CertainEntryUnsafeMember,
                state: diag.automaton.state_name(q).to_string(),
                witness: None,
            });
        }
    }
    // (iii) no uncontrollable path from a certain-state member to unsafety
    for &q in &fc {
        for m in &diag.states[q].members {
            let start = gks.state_id(&m.state).unwrap();
            if let Some(path) = uncontrollable_path(gks, start, &unsafe_set) {
                return Ok(SfVerdict::NotSfSafe {
                    condition: SfCondition::UncontrollableEscape,
                    state: diag.automaton.state_name(q).to_string(),
                    witness: Some(path),
                });
            }
        }
    }
    Ok(SfVerdict::SfSafe)
}

fn uncontrollable_path(
    gks: &Automaton,
    start: StateId,
    targets: &BTreeSet<StateId>,
) -> Option<Trace> {
    let mut parent: Vec<Option<(StateId, EventId)>> = vec![None; gks.state_count()];
    let mut seen = vec![false; gks.state_count()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut hit = targets.contains(&start).then_some(start);
    while hit.is_none() {
        let s = queue.pop_front()?;
        for (e, d) in gks.transitions_from(s) {
            if gks.alphabet().is_controllable(e) || seen[d] {
                continue;
            }
            seen[d] = true;
            parent[d] = Some((s, e));
            if targets.contains(&d) {
                hit = Some(d);
                break;
            }
            queue.push_back(d);
        }
    }
    let mut cur = hit?;
    let mut events = Vec::new();
    while let Some((p, e)) = parent[cur] {
        events.push(gks.alphabet().name(e).to_string());
        cur = p;
    }
    events.reverse();
    Some(Trace(events))
}

/// Post-detection uncontrolled plant: a fresh initial state connected by one
/// uncontrollable observable detection event per member of the triggering
/// certain state into the corresponding state of the uncontrolled faulty
/// plant.
#[derive(Debug, Clone)]
pub struct CertainEntryPlant {
    pub plant: Automaton,
    /// detection event names, aligned with the member order of the
    /// triggering state
    pub detects: Vec<String>,
    /// faulty-plant state per member
    pub member_states: Vec<String>,
}

fn fnv1a64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Builds the post-detection uncontrolled plant for a certain diagnoser
/// state. Members of the diagnoser refer to closed-loop states `(x,q)`; the
/// detection edges enter the plant components `q` of the uncontrolled
/// faulty model.
pub fn certain_entry_plant(
    g_f: &Automaton,
    q_y: &DiagnoserState,
    tracked: usize,
    cfg: &FaultConfig,
) -> Result<CertainEntryPlant> {
    if !q_y.certain_any(tracked) {
        return Err(Error::Precondition(format!(
            "diagnoser state {} is not fault-certain",
            q_y.render()
        )));
    }
    let tag = format!("{:08x}", fnv1a64(&q_y.render()) as u32);
    let mut detects = Vec::new();
    let mut member_states = Vec::new();
    let mut decls = Vec::new();
    for (j, m) in q_y.members.iter().enumerate() {
        let plant_state = split_pair_name(&m.state)
            .map(|(_, q)| q)
            .unwrap_or_else(|| m.state.clone());
        if g_f.state_id(&plant_state).is_none() {
            return Err(Error::UnknownState(plant_state));
        }
        let name = format!("detect({},{},{})", cfg.subsystem(), tag, j + 1);
        decls.push(EventDecl::new(&name, false, true));
        detects.push(name);
        member_states.push(plant_state);
    }
    let alphabet = g_f.alphabet().with_events(decls)?;
    let mut init = "q0^Y".to_string();
    while g_f.state_id(&init).is_some() {
        init.push('\'');
    }
    let mut states = vec![init.clone()];
    states.extend(g_f.state_names().map(|s| s.to_string()));
    let mut triples: Vec<(String, String, String)> = g_f.transition_triples();
    for (j, q) in member_states.iter().enumerate() {
        triples.push((init.clone(), detects[j].clone(), q.clone()));
    }
    let refs: Vec<(&str, &str, &str)> = triples
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    let plant = Automaton::new(alphabet, states, &init, None, &refs)?.accessible();
    Ok(CertainEntryPlant {
        plant,
        detects,
        member_states,
    })
}

/// Shortest trace of the closed-loop fault model reaching the given member
/// (state and label vector), consistent with the fault history.
pub fn member_witness_trace(
    gks: &Automaton,
    diag: &Diagnoser,
    member: &DiagnoserMember,
) -> Result<Trace> {
    let fault_ids: Vec<Option<EventId>> = diag
        .tracked
        .iter()
        .map(|f| gks.alphabet().id(f))
        .collect();
    let target_state = gks
        .state_id(&member.state)
        .ok_or_else(|| Error::UnknownState(member.state.clone()))?;
    type Node = (StateId, Vec<bool>);
    let start: Node = (gks.initial(), vec![false; diag.tracked.len()]);
    let mut parents: BTreeMap<Node, (Node, EventId)> = BTreeMap::new();
    let mut seen: BTreeSet<Node> = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    let goal: Node = (target_state, member.labels.clone());
    while let Some(node) = queue.pop_front() {
        if node == goal {
            let mut events = Vec::new();
            let mut cur = node;
            while let Some((prev, e)) = parents.get(&cur) {
                events.push(gks.alphabet().name(*e).to_string());
                cur = prev.clone();
            }
            events.reverse();
            return Ok(Trace(events));
        }
        let (s, labels) = node.clone();
        for (e, d) in gks.transitions_from(s) {
            let mut next = labels.clone();
            if let Some(k) = fault_ids.iter().position(|&f| f == Some(e)) {
                next[k] = true;
            }
            let nn: Node = (d, next);
            if seen.insert(nn.clone()) {
                parents.insert(nn.clone(), (node.clone(), e));
                queue.push_back(nn);
            }
        }
    }
    Err(Error::Validation(format!(
        "no trace reaches member {}",
        member.render()
    )))
}

/// Occurrence projection of a trace: faulty readings are relabelled to
/// their underlying readings, events outside `keep` are erased.
pub fn occurrence_trace(t: &Trace, cfg: &FaultConfig, keep: &BTreeSet<String>) -> Trace {
    let back: BTreeMap<String, String> = cfg
        .reading_pairs()
        .into_iter()
        .map(|(r, f)| (f, r))
        .collect();
    Trace(
        t.events()
            .iter()
            .filter_map(|e| {
                let mapped = back.get(e).cloned().unwrap_or_else(|| e.clone());
                keep.contains(&mapped).then_some(mapped)
            })
            .collect(),
    )
}

/// Post-detection specification: the union over members of the detection
/// event followed by the safety language quotient after a shortest trace
/// reaching that member.
pub fn sensor_post_fault_spec(
    safe: &Automaton,
    gks: &Automaton,
    diag: &Diagnoser,
    q_y: &DiagnoserState,
    entry: &CertainEntryPlant,
    cfg: &FaultConfig,
) -> Result<Automaton> {
    let keep: BTreeSet<String> = safe.alphabet().names().map(|s| s.to_string()).collect();
    let decls: Vec<EventDecl> = entry
        .detects
        .iter()
        .map(|d| EventDecl::new(d, false, true))
        .collect();
    let alphabet = safe.alphabet().with_events(decls)?;
    let init = "q0^post".to_string();
    let mut states = vec![init.clone()];
    let mut triples: Vec<(String, String, String)> = Vec::new();
    for (j, member) in q_y.members.iter().enumerate() {
        let t_j = member_witness_trace(gks, diag, member)?;
        let occ = occurrence_trace(&t_j, cfg, &keep);
        let quotient = safe.suffix(&occ).map_err(|e| match e {
            Error::TraceNotGenerated(ev, pre) => Error::Validation(format!(
                "pre-detection run leaves the safety language: `{ev}` after `{pre}`"
            )),
            other => other,
        })?;
        let prefix = format!("{}:", j + 1);
        for s in quotient.state_names() {
            states.push(format!("{prefix}{s}"));
        }
        for (src, ev, dst) in quotient.transition_triples() {
            triples.push((format!("{prefix}{src}"), ev, format!("{prefix}{dst}")));
        }
        triples.push((
            init.clone(),
            entry.detects[j].clone(),
            format!("{prefix}{}", quotient.state_name(quotient.initial())),
        ));
    }
    let refs: Vec<(&str, &str, &str)> = triples
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    Automaton::new(alphabet, states, &init, None, &refs)
}

/// Sensor fault-tolerance test: the infimal prefix-closed controllable
/// sublanguage of the post-detection plant (detection events included in
/// the uncontrollable set) must satisfy the post-detection specification;
/// satisfaction is used because detection events extend the alphabet, and
/// faulty readings count as occurrences of their underlying readings.
pub fn check_sensor_tolerance(
    entry: &CertainEntryPlant,
    post_spec: &Automaton,
    cfg: &FaultConfig,
) -> Result<crate::actuator::Tolerance> {
    let uc = entry.plant.alphabet().uncontrollable_names();
    let infc = synthesis::inf_c(&entry.plant, &uc)?;
    let relabel: BTreeMap<String, String> = cfg
        .reading_pairs()
        .into_iter()
        .filter(|(_, f)| infc.alphabet().contains(f))
        .map(|(r, f)| (f, r))
        .collect();
    let occurrence = infc.relabel(&relabel)?;
    match occurrence.satisfies(post_spec)? {
        Verdict::Holds => Ok(crate::actuator::Tolerance::Tolerant),
        Verdict::Violated { witness } => {
            Ok(crate::actuator::Tolerance::Intolerant { witness })
        }
    }
}

/// Supremal post-detection supervisor for a certain entry: synthesis on the
/// entry plant against the occurrence-lifted post-detection specification.
pub fn synth_sensor_post_supervisor(
    entry: &CertainEntryPlant,
    post_spec: &Automaton,
    cfg: &FaultConfig,
) -> Result<Supervisor> {
    match check_sensor_tolerance(entry, post_spec, cfg)? {
        crate::actuator::Tolerance::Tolerant => {}
        crate::actuator::Tolerance::Intolerant { witness } => {
            return Err(Error::Precondition(format!(
                "entry plant is not sensor fault tolerant (witness `{witness}`)"
            )));
        }
    }
    let lifted = occurrence_spec_lift(post_spec, entry.plant.alphabet(), cfg)?;
    let k = lifted.compose(&entry.plant)?;
    let uc = entry.plant.alphabet().uncontrollable_names();
    let obs = entry.plant.alphabet().observable_names();
    match synthesis::supremal_supervisor(&entry.plant, &k, &uc, &obs)? {
        Some(result) => Ok(result.supervisor),
        None => Err(Error::Precondition(
            "tolerance established but synthesis returned an empty language".into(),
        )),
    }
}

/// Lifts a specification over a plant alphabet that carries faulty readings
/// and bookkeeping events: faulty readings duplicate their underlying
/// reading's transitions, bookkeeping events (anything not in the
/// specification alphabet and not a faulty reading) self-loop everywhere.
pub fn occurrence_spec_lift(
    spec: &Automaton,
    target: &Arc<Alphabet>,
    cfg: &FaultConfig,
) -> Result<Automaton> {
    let duals: Vec<(String, String)> = cfg
        .reading_pairs()
        .into_iter()
        .filter(|(r, f)| target.contains(f) && spec.alphabet().contains(r))
        .collect();
    let dual_names: BTreeSet<&String> = duals.iter().map(|(_, f)| f).collect();
    let mut triples = spec.transition_triples();
    for (src, ev, dst) in spec.transition_triples() {
        for (reading, faulty) in &duals {
            if &ev == reading {
                triples.push((src.clone(), faulty.clone(), dst.clone()));
            }
        }
    }
    for name in target.names() {
        if spec.alphabet().contains(name) || dual_names.contains(&name.to_string()) {
            continue;
        }
        for s in spec.state_names() {
            triples.push((s.to_string(), name.to_string(), s.to_string()));
        }
    }
    let refs: Vec<(&str, &str, &str)> = triples
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    Automaton::new(
        target.clone(),
        spec.state_names().map(|s| s.to_string()).collect(),
        spec.state_name(spec.initial()),
        None,
        &refs,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actuator::Tolerance;
    use crate::alphabet::{Alphabet, EventDecl};
    use crate::fixtures::{sensor_demo, sensor_guard_demo};

    fn which_b() -> Vec<String> {
        vec!["b".to_string()]
    }

    fn demo_faulty_alphabet() -> Arc<Alphabet> {
        sensor_demo::alphabet()
            .with_events(vec![
                EventDecl::new("f_b", false, false),
                EventDecl::new("b^f", false, false),
            ])
            .unwrap()
    }

    fn expected_faulty_plant() -> Automaton {
        Automaton::new(
            demo_faulty_alphabet(),
            vec![
                "1".into(), "2".into(), "3".into(), "4".into(), "5".into(),
                "1'".into(), "2'".into(), "3'".into(), "4'".into(), "5'".into(),
            ],
            "1",
            None,
            &[
                ("1", "a", "2"), ("2", "b", "4"), ("2", "c", "3"), ("4", "c", "5"),
                ("1'", "a", "2'"), ("2'", "b", "4'"), ("2'", "c", "3'"), ("4'", "c", "5'"),
                ("2'", "b^f", "4'"),
                ("1", "f_b", "1'"), ("2", "f_b", "2'"), ("3", "f_b", "3'"),
                ("4", "f_b", "4'"), ("5", "f_b", "5'"),
            ],
        )
        .unwrap()
    }

    fn expected_faulty_supervisor() -> Automaton {
        Automaton::new(
            demo_faulty_alphabet(),
            vec![
                "1".into(), "2".into(), "3".into(), "4".into(),
                "1'".into(), "2'".into(), "3'".into(), "4'".into(),
            ],
            "1",
            None,
            &[
                ("1", "a", "2"), ("2", "b", "4"), ("2", "c", "3"),
                ("1'", "a", "2'"), ("2'", "b", "4'"), ("2'", "c", "3'"),
                ("1'", "b", "1'"), ("1'", "b^f", "1'"),
                ("2'", "b^f", "2'"),
                ("3'", "b", "3'"), ("3'", "b^f", "3'"),
                ("4'", "b", "4'"), ("4'", "b^f", "4'"),
                ("1", "f_b", "1'"), ("2", "f_b", "2'"), ("3", "f_b", "3'"), ("4", "f_b", "4'"),
            ],
        )
        .unwrap()
    }

    fn demo_closed_loop() -> Automaton {
        let cfg = sensor_demo::config();
        let g_f = build_faulty_plant(&sensor_demo::plant(), &cfg, &which_b()).unwrap();
        let s_f = build_faulty_supervisor(&sensor_demo::supervisor(), &cfg, &which_b()).unwrap();
        closed_loop_fault_model(&s_f, &g_f).unwrap()
    }

    #[test]
    fn faulty_plant_matches_unified_model() {
        let cfg = sensor_demo::config();
        let g_f = build_faulty_plant(&sensor_demo::plant(), &cfg, &which_b()).unwrap();
        assert_eq!(g_f.state_count(), 10);
        assert!(g_f.isomorphic(&expected_faulty_plant()).unwrap());
        let alpha = g_f.alphabet();
        for name in ["f_b", "b^f"] {
            let id = alpha.id(name).unwrap();
            assert!(!alpha.is_controllable(id));
            assert!(!alpha.is_observable(id));
        }
    }

    #[test]
    fn faulty_plant_empty_selection_is_nominal() {
        let cfg = sensor_demo::config();
        let g_f = build_faulty_plant(&sensor_demo::plant(), &cfg, &[]).unwrap();
        assert!(g_f.isomorphic(&sensor_demo::plant()).unwrap());
    }

    #[test]
    fn faulty_plant_rejects_undeclared_sensor() {
        let cfg = sensor_demo::config();
        assert!(build_faulty_plant(&sensor_demo::plant(), &cfg, &["a".into()]).is_err());
    }

    #[test]
    fn faulty_supervisor_matches_unified_model() {
        let cfg = sensor_demo::config();
        let s_f = build_faulty_supervisor(&sensor_demo::supervisor(), &cfg, &which_b()).unwrap();
        assert_eq!(s_f.state_count(), 8);
        assert!(s_f.isomorphic(&expected_faulty_supervisor()).unwrap());
    }

    #[test]
    fn layered_and_unified_agree_for_a_single_sensor() {
        let cfg = sensor_demo::config();
        let unified = build_faulty_plant(&sensor_demo::plant(), &cfg, &which_b()).unwrap();
        let layered = build_faulty_plant_layered(&sensor_demo::plant(), &cfg, &which_b()).unwrap();
        assert!(unified.language_equal(&layered).unwrap());
    }

    #[test]
    fn closed_loop_model_matches_expected_product() {
        let gks = demo_closed_loop();
        assert_eq!(gks.state_count(), 10);
        assert!(gks.generates(&Trace::from_names(&["a", "f_b", "b^f", "c"])));
        // the unsafe branch: supervisor stuck pre-reading while the plant
        // has already moved
        let expected = {
            let alpha = demo_faulty_alphabet();
            Automaton::new(
                alpha,
                vec![
                    "(1,1)".into(), "(2,2)".into(), "(3,3)".into(), "(4,4)".into(),
                    "(1',1')".into(), "(2',2')".into(), "(3',3')".into(), "(4',4')".into(),
                    "(2',4')".into(), "(3',5')".into(),
                ],
                "(1,1)",
                None,
                &[
                    ("(1,1)", "a", "(2,2)"),
                    ("(2,2)", "b", "(4,4)"),
                    ("(2,2)", "c", "(3,3)"),
                    ("(1,1)", "f_b", "(1',1')"),
                    ("(2,2)", "f_b", "(2',2')"),
                    ("(3,3)", "f_b", "(3',3')"),
                    ("(4,4)", "f_b", "(4',4')"),
                    ("(1',1')", "a", "(2',2')"),
                    ("(2',2')", "b", "(4',4')"),
                    ("(2',2')", "c", "(3',3')"),
                    ("(2',2')", "b^f", "(2',4')"),
                    ("(2',4')", "c", "(3',5')"),
                ],
            )
            .unwrap()
        };
        assert!(gks.isomorphic(&expected).unwrap());
    }

    #[test]
    fn unsafe_states_identify_the_slipped_branch() {
        let gks = demo_closed_loop();
        let cfg = sensor_demo::config();
        let unsafe_set = unsafe_states(&gks, &sensor_demo::safety(), &cfg).unwrap();
        let names: Vec<&str> = unsafe_set
            .iter()
            .map(|&s| gks.state_name(s))
            .collect();
        assert_eq!(names, vec!["(3',5')"]);
    }

    #[test]
    fn unsafe_states_trivial_cases() {
        let gks = demo_closed_loop();
        let cfg = sensor_demo::config();
        let universal = Automaton::universal(sensor_demo::alphabet());
        assert!(unsafe_states(&gks, &universal, &cfg).unwrap().is_empty());
        let epsilon = Automaton::epsilon(sensor_demo::alphabet());
        let all_bad = unsafe_states(&gks, &epsilon, &cfg).unwrap();
        // every state is unsafe except those reached by bookkeeping alone
        let safe_names: BTreeSet<&str> = (0..gks.state_count())
            .filter(|s| !all_bad.contains(s))
            .map(|s| gks.state_name(s))
            .collect();
        assert_eq!(safe_names, BTreeSet::from(["(1,1)", "(1',1')"]));
    }

    #[test]
    fn occurrence_witness_is_the_shortest_violation() {
        let gks = demo_closed_loop();
        let cfg = sensor_demo::config();
        let witness = occurrence_violation_witness(&gks, &sensor_demo::safety(), &cfg)
            .unwrap()
            .unwrap();
        assert_eq!(witness, Trace::from_names(&["a", "f_b", "b^f", "c"]));
    }

    #[test]
    fn relabelled_closed_loop_violates_safety_through_satisfaction() {
        // the same verdict through the plain kernel: relabel the faulty
        // reading and let projection erase the fault event
        let gks = demo_closed_loop();
        let map: BTreeMap<String, String> = [("b^f".to_string(), "b".to_string())].into();
        let relabelled = gks.relabel(&map).unwrap();
        match relabelled.satisfies(&sensor_demo::safety()).unwrap() {
            Verdict::Violated { witness } => {
                assert_eq!(witness, Trace::from_names(&["a", "f_b", "b", "c"]));
            }
            Verdict::Holds => panic!("expected violation"),
        }
    }

    #[test]
    fn relabel_merges_branches_by_subset_construction() {
        let cfg = sensor_demo::config();
        let g_f = build_faulty_plant(&sensor_demo::plant(), &cfg, &which_b()).unwrap();
        let s_f = build_faulty_supervisor(&sensor_demo::supervisor(), &cfg, &which_b()).unwrap();
        let gks = closed_loop_fault_model(&s_f, &g_f).unwrap();
        let map: BTreeMap<String, String> = [("b^f".to_string(), "b".to_string())].into();
        let relabelled = gks.relabel(&map).unwrap();
        // (2',2') now has a single b-successor: the subset of both targets
        let merged = relabelled
            .state_names()
            .find(|n| n.contains("(2',4')") && n.contains("(4',4')"))
            .expect("merged subset state");
        assert_eq!(merged, "{(2',4'),(4',4')}");
    }

    #[test]
    fn diagnoser_states_follow_observations() {
        let gks = demo_closed_loop();
        let cfg = sensor_demo::config();
        let diag = build_safe_diagnoser(&gks, &sensor_demo::safety(), &cfg).unwrap();
        assert_eq!(diag.tracked, vec!["f_b".to_string()]);
        let init = diag.state_by_observation(&Trace::empty()).unwrap();
        assert_eq!(init.render(), "{(1,1):N,(1',1'):Y!}");
        let after_a = diag.state_by_observation(&Trace::from_names(&["a"])).unwrap();
        assert_eq!(after_a.render(), "{(2,2):N,(2',2'):Y!,(2',4'):Y!}");
        let after_ac = diag
            .state_by_observation(&Trace::from_names(&["a", "c"]))
            .unwrap();
        assert_eq!(after_ac.render(), "{(3,3):N,(3',3'):Y!,(3',5'):Y!U}");
        let after_ab = diag
            .state_by_observation(&Trace::from_names(&["a", "b"]))
            .unwrap();
        assert_eq!(after_ab.render(), "{(4,4):N,(4',4'):Y!}");
    }

    #[test]
    fn diagnoser_without_fault_transitions_is_all_normal() {
        let cfg = sensor_demo::config();
        let gks = {
            let g_f = build_faulty_plant(&sensor_demo::plant(), &cfg, &[]).unwrap();
            let s_f =
                build_faulty_supervisor(&sensor_demo::supervisor(), &cfg, &[]).unwrap();
            closed_loop_fault_model(&s_f, &g_f).unwrap()
        };
        let diag = build_safe_diagnoser(&gks, &sensor_demo::safety(), &cfg).unwrap();
        assert!(diag.tracked.is_empty());
        assert!(diag.states.iter().all(|s| s.is_normal()));
    }

    #[test]
    fn no_certain_state_is_reachable_in_the_demo() {
        let gks = demo_closed_loop();
        let cfg = sensor_demo::config();
        let diag = build_safe_diagnoser(&gks, &sensor_demo::safety(), &cfg).unwrap();
        assert!(first_entered_certain(&diag).is_empty());
    }

    #[test]
    fn first_entry_requires_a_non_certain_predecessor() {
        // a diagnoser whose initial state is already certain: with no
        // non-certain predecessor, nothing qualifies as first-entered
        let alpha = Alphabet::from_sets(&["o"], &[], &["o"]).unwrap();
        let automaton = Automaton::universal(alpha);
        let certain = DiagnoserState {
            members: vec![DiagnoserMember {
                labels: vec![true],
                is_unsafe: false,
                state: "m".into(),
            }],
        };
        let diag = Diagnoser {
            automaton,
            states: vec![certain],
            tracked: vec!["f_b".into()],
        };
        assert!(diag.states[0].certain_for(0));
        assert!(first_entered_certain(&diag).is_empty());
    }

    #[test]
    fn sf_safe_fails_on_uncertain_unsafe_member() {
        let gks = demo_closed_loop();
        let cfg = sensor_demo::config();
        match check_sf_safe(&gks, &sensor_demo::safety(), &cfg).unwrap() {
            SfVerdict::NotSfSafe {
                condition, state, ..
            } => {
                assert_eq!(condition, SfCondition::UncertainUnsafeMember);
                assert_eq!(state, "{(3,3):N,(3',3'):Y!,(3',5'):Y!U}");
            }
            SfVerdict::SfSafe => panic!("expected an SF-safety violation"),
        }
    }

    #[test]
    fn sf_safe_holds_for_universal_safety() {
        let gks = demo_closed_loop();
        let cfg = sensor_demo::config();
        let universal = Automaton::universal(sensor_demo::alphabet());
        assert!(check_sf_safe(&gks, &universal, &cfg).unwrap().holds());
    }

    fn guard_closed_loop() -> (Automaton, Automaton, FaultConfig) {
        let cfg = sensor_guard_demo::config();
        let g_f =
            build_faulty_plant(&sensor_guard_demo::plant(), &cfg, &which_b()).unwrap();
        let s_f =
            build_faulty_supervisor(&sensor_guard_demo::supervisor(), &cfg, &which_b())
                .unwrap();
        let gks = closed_loop_fault_model(&s_f, &g_f).unwrap();
        (gks, g_f, cfg)
    }

    #[test]
    fn guarded_model_is_sf_safe_with_reachable_unsafety() {
        let (gks, _, cfg) = guard_closed_loop();
        let safety = sensor_guard_demo::safety();
        assert!(!unsafe_states(&gks, &safety, &cfg).unwrap().is_empty());
        assert!(check_sf_safe(&gks, &safety, &cfg).unwrap().holds());
    }

    #[test]
    fn guarded_model_detects_then_tolerates_and_cuts_the_escape() {
        let (gks, g_f, cfg) = guard_closed_loop();
        let safety = sensor_guard_demo::safety();
        let diag = build_safe_diagnoser(&gks, &safety, &cfg).unwrap();
        let fc = first_entered_certain(&diag);
        assert_eq!(fc.len(), 1);
        let q_y = &diag.states[*fc.iter().next().unwrap()];
        assert_eq!(q_y.members.len(), 1);
        let entry = certain_entry_plant(&g_f, q_y, diag.tracked.len(), &cfg).unwrap();
        assert_eq!(entry.detects.len(), 1);
        assert_eq!(entry.member_states, vec!["4'".to_string()]);
        let post_spec =
            sensor_post_fault_spec(&safety, &gks, &diag, q_y, &entry, &cfg).unwrap();
        assert!(check_sensor_tolerance(&entry, &post_spec, &cfg)
            .unwrap()
            .holds());
        let sup = synth_sensor_post_supervisor(&entry, &post_spec, &cfg).unwrap();
        let cl = synthesis::closed_loop(&sup, &entry.plant).unwrap();
        // the post-detection supervisor admits the detection and disables
        // the unsafe continuation
        let detect = entry.detects[0].clone();
        assert!(cl.generates(&Trace(vec![detect.clone()])));
        assert!(!cl.generates(&Trace(vec![detect, "c".into()])));
    }

    #[test]
    fn certain_entry_rejects_uncertain_states() {
        let (gks, g_f, cfg) = guard_closed_loop();
        let safety = sensor_guard_demo::safety();
        let diag = build_safe_diagnoser(&gks, &safety, &cfg).unwrap();
        let uncertain = &diag.states[0];
        assert!(certain_entry_plant(&g_f, uncertain, diag.tracked.len(), &cfg).is_err());
    }

    #[test]
    fn tolerance_fails_on_uncontrollable_escape_from_entry() {
        // post-detection plant that drifts uncontrollably past the
        // specification
        let base = Alphabet::from_sets(&["u", "b"], &[], &["u", "b"]).unwrap();
        let cfg = FaultConfig::derive(1, &base, &[], &["b".into()], &BTreeSet::new()).unwrap();
        let g_f = Automaton::new(
            base.clone(),
            vec!["m0".into(), "m1".into()],
            "m0",
            None,
            &[("m0", "u", "m1")],
        )
        .unwrap();
        let q_y = DiagnoserState {
            members: vec![DiagnoserMember {
                labels: vec![true],
                is_unsafe: false,
                state: "(x,m0)".into(),
            }],
        };
        let entry = certain_entry_plant(&g_f, &q_y, 1, &cfg).unwrap();
        let detect = entry.detects[0].clone();
        let spec_alpha = base.with_events(vec![EventDecl::new(&detect, false, true)]).unwrap();
        let post_spec = Automaton::chain(spec_alpha, &Trace(vec![detect.clone()])).unwrap();
        match check_sensor_tolerance(&entry, &post_spec, &cfg).unwrap() {
            Tolerance::Intolerant { witness } => {
                assert_eq!(witness, Trace(vec![detect, "u".into()]));
            }
            Tolerance::Tolerant => panic!("expected intolerance"),
        }
    }

    #[test]
    fn sf_safe_condition_three_catches_late_uncontrollable_escape() {
        // synthetic closed-loop model: detection becomes certain one step
        // after the fault, but an uncontrollable event then drifts into
        // unsafety beyond the first-entered certain state
        let base = Alphabet::from_sets(&["a", "b", "u"], &["a"], &["a", "b", "u"]).unwrap();
        let cfg = FaultConfig::derive(1, &base, &[], &["b".into()], &BTreeSet::new()).unwrap();
        let alpha = base
            .with_events(vec![
                EventDecl::new("f_b", false, false),
                EventDecl::new("b^f", false, false),
            ])
            .unwrap();
        let gks = Automaton::new(
            alpha,
            vec!["N0".into(), "N1".into(), "F0".into(), "F1".into(), "F2".into(), "F3".into()],
            "N0",
            None,
            &[
                ("N0", "a", "N1"),
                ("N0", "f_b", "F0"),
                ("F0", "b^f", "F1"),
                ("F1", "u", "F2"),
                ("F2", "u", "F3"),
            ],
        )
        .unwrap();
        // safety: closure{a, bu}; the occurrence string "buu" is unsafe
        let safety = Automaton::new(
            base,
            vec!["s0".into(), "sa".into(), "sb".into(), "su".into()],
            "s0",
            None,
            &[("s0", "a", "sa"), ("s0", "b", "sb"), ("sb", "u", "su")],
        )
        .unwrap();
        match check_sf_safe(&gks, &safety, &cfg).unwrap() {
            SfVerdict::NotSfSafe {
                condition, witness, ..
            } => {
                assert_eq!(condition, SfCondition::UncontrollableEscape);
                assert_eq!(witness, Some(Trace::from_names(&["u"])));
            }
            SfVerdict::SfSafe => panic!("expected condition (iii) to fail"),
        }
    }

    #[test]
    fn split_pair_name_handles_nesting() {
        assert_eq!(
            split_pair_name("(a,b)"),
            Some(("a".to_string(), "b".to_string()))
        );
        assert_eq!(
            split_pair_name("((x,y),z)"),
            Some(("(x,y)".to_string(), "z".to_string()))
        );
        assert_eq!(split_pair_name("plain"), None);
    }

    #[test]
    fn suffix_into_the_faulty_layer_keeps_only_primed_states() {
        let cfg = sensor_demo::config();
        let g_f = build_faulty_plant(&sensor_demo::plant(), &cfg, &which_b()).unwrap();
        let post_fault = g_f.suffix(&Trace::from_names(&["f_b"])).unwrap();
        assert_eq!(post_fault.state_count(), 5);
        assert!(post_fault.state_names().all(|s| s.ends_with('\'')));
    }

    #[test]
    fn two_sensor_unified_model_tracks_labels_separately() {
        let base = Alphabet::from_sets(&["a", "b", "d"], &["a"], &["a", "b", "d"]).unwrap();
        let cfg =
            FaultConfig::derive(1, &base, &[], &["b".into(), "d".into()], &BTreeSet::new())
                .unwrap();
        let g = Automaton::new(
            base.clone(),
            vec!["1".into(), "2".into(), "3".into(), "4".into()],
            "1",
            None,
            &[("1", "a", "2"), ("2", "b", "3"), ("3", "d", "4")],
        )
        .unwrap();
        let which = vec!["b".to_string(), "d".to_string()];
        let g_f = build_faulty_plant(&g, &cfg, &which).unwrap();
        // one faulty layer: both suspicious readings fire dually there, and
        // each fault event enters it from every nominal state
        assert_eq!(g_f.state_count(), 8);
        assert!(g_f.generates(&Trace::from_names(&["f_b", "a", "b^f", "d^f"])));
        assert!(g_f.generates(&Trace::from_names(&["f_d", "a", "b", "d^f"])));
        assert!(!g_f.generates(&Trace::from_names(&["f_b", "f_d"])));

        let sup = Supervisor::from_automaton(Automaton::universal(base.clone()));
        let s_f = build_faulty_supervisor(&sup, &cfg, &which).unwrap();
        let gks = closed_loop_fault_model(&s_f, &g_f).unwrap();
        let safety = Automaton::universal(base);
        let diag = build_safe_diagnoser(&gks, &safety, &cfg).unwrap();
        assert_eq!(diag.tracked, vec!["f_b".to_string(), "f_d".to_string()]);
        // the initial class holds the nominal member plus one per fault
        let init = diag.state_by_observation(&Trace::empty()).unwrap();
        let labels: BTreeSet<Vec<bool>> =
            init.members.iter().map(|m| m.labels.clone()).collect();
        assert!(labels.contains(&vec![false, false]));
        assert!(labels.contains(&vec![true, false]));
        assert!(labels.contains(&vec![false, true]));
        assert!(!labels.contains(&vec![true, true]));
        // rendered labels carry one letter per tracked fault
        assert!(init.render().contains(":YN!"));
        assert!(init.render().contains(":NY!"));
    }

    #[test]
    fn closed_loop_pairs_supervisor_and_plant_states() {
        let cfg = sensor_demo::config();
        let g = sensor_demo::plant();
        let s = sensor_demo::supervisor();
        let gks = closed_loop_fault_model(s.realization(), &g).unwrap();
        let names: BTreeSet<&str> = gks.state_names().collect();
        assert_eq!(
            names,
            BTreeSet::from(["(1,1)", "(2,2)", "(4,4)", "(3,3)"])
        );
        assert!(gks.language_equal(&sensor_demo::safety().with_alphabet(gks.alphabet().clone()).unwrap()).unwrap());
        let _ = cfg;
    }

    #[test]
    fn erasing_fault_bookkeeping_recovers_the_observable_language() {
        let gks = demo_closed_loop();
        let keep: BTreeSet<String> =
            ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let projected = gks.project(&keep).unwrap();
        // erasing f_b and b^f leaves exactly the safe-looking behaviour;
        // the slipped branch hides inside `ac`
        let expected = sensor_demo::safety()
            .with_alphabet(projected.alphabet().clone())
            .unwrap();
        assert!(projected.language_equal(&expected).unwrap());
    }
}

