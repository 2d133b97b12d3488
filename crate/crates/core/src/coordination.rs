//! Assume-guarantee coordination: weakest-assumption construction, the
//! symmetric n-module proof rule, coordination-existence tests and the
//! counterexample-guided refinement loop that synthesises coordination
//! supervisors.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use crate::alphabet::{Alphabet, EventId};
use crate::automaton::{Automaton, StateId, Trace, Verdict};
use crate::error::{Error, Result};
use crate::fault::FaultConfig;
use crate::sensor;
use crate::staging;
use crate::synthesis::{self, Supervisor};

/// A component module with its assumption interface.
#[derive(Debug, Clone)]
pub struct AgModule {
    pub automaton: Automaton,
    pub interface: Arc<Alphabet>,
}

/// An environment assumption: a deterministic, prefix-closed automaton over
/// the interface alphabet with every live state marked. The empty
/// assumption (no tolerable environment) is the one-state automaton marking
/// nothing.
#[derive(Debug, Clone)]
pub struct Assumption {
    pub automaton: Automaton,
}

impl Assumption {
    /// Membership in the assumption language.
    pub fn admits(&self, t: &Trace) -> bool {
        self.automaton.marks(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymnVerdict {
    Holds,
    Violated { counterexample: Trace },
}

impl SymnVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SymnVerdict::Holds)
    }
}

/// Interface alphabet of module `i`: the events shared with the rest of
/// the system plus the whole property alphabet. The environment of a module
/// consists of the other modules together with the property observer, so
/// the interface is `(Σ_i ∪ Σ_P) ∩ (Σ_{-i} ∪ Σ_P)`; dropping the property
/// events from the environment side loses the module's own property-
/// relevant moves and makes the combined premise needlessly conservative.
pub fn interface_events(
    locals: &BTreeMap<usize, BTreeSet<String>>,
    i: usize,
    spec: &Automaton,
) -> BTreeSet<String> {
    let mut others = BTreeSet::new();
    for (&j, events) in locals {
        if j != i {
            others.extend(events.iter().cloned());
        }
    }
    let mut interface: BTreeSet<String> =
        locals[&i].intersection(&others).cloned().collect();
    interface.extend(spec.alphabet().names().map(|s| s.to_string()));
    interface
}

/// Weakest assumption for `m` with respect to the property `p` over the
/// given interface: the largest environment language under which `m` still
/// guarantees `p`. Construction: compose `m` with the completion of `p`,
/// propagate the error state backwards along non-interface events, project
/// onto the interface by subset construction (error-containing subsets
/// collapse into the error state, which is then deleted; environment moves
/// blocked by `m` lead to a universally safe sink).
pub fn weakest_assumption(
    m: &Automaton,
    interface: &Arc<Alphabet>,
    p: &Automaton,
) -> Result<Assumption> {
    for name in p.alphabet().names() {
        if !m.alphabet().contains(name) && !interface.contains(name) {
            return Err(Error::AlphabetNotContained(name.to_string()));
        }
    }
    // align the property's shared-event flags with the module's; events
    // private to the property stay its own and interleave freely
    let aligned_decls = p
        .alphabet()
        .decls()
        .into_iter()
        .map(|mut d| {
            if let Some(id) = m.alphabet().id(&d.name) {
                d.controllable = m.alphabet().is_controllable(id);
                d.observable = m.alphabet().is_observable(id);
            }
            d
        })
        .collect();
    let completed = p
        .with_alphabet(Alphabet::new(aligned_decls)?)?
        .completion();
    let qe = completed.error_state().unwrap();
    let (pairs, trans, _, prod_alphabet) = m.product_pairs(&completed)?;

    // error states: property completion entered its sink
    let mut err: Vec<bool> = pairs.iter().map(|&(_, b)| b == qe).collect();
    // backward propagation along non-interface events: the environment
    // cannot prevent internal progress into the error region
    let interface_ids: BTreeSet<EventId> = prod_alphabet
        .ids()
        .filter(|&e| interface.contains(prod_alphabet.name(e)))
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for s in 0..pairs.len() {
            if err[s] {
                continue;
            }
            for (&e, &d) in &trans[s] {
                if !interface_ids.contains(&e) && err[d] {
                    err[s] = true;
                    changed = true;
                    break;
                }
            }
        }
    }

    // subset construction over the interface with closure along
    // non-interface events
    let closure = |seed: BTreeSet<usize>| -> BTreeSet<usize> {
        let mut set = seed;
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for (&e, &d) in &trans[s] {
                if !interface_ids.contains(&e) && set.insert(d) {
                    stack.push(d);
                }
            }
        }
        set
    };
    let escaped = |set: &BTreeSet<usize>| set.iter().any(|&s| err[s]);
    let init = closure(BTreeSet::from([0]));
    if escaped(&init) {
        // the module violates the property on its own: no environment helps
        let automaton = Automaton::new(
            interface.clone(),
            vec!["dead".into()],
            "dead",
            Some(vec![]),
            &[],
        )?;
        return Ok(Assumption { automaton });
    }
    let mut subsets: Vec<BTreeSet<usize>> = vec![init.clone()];
    let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    index.insert(init, 0);
    // state usize::MAX encodes the universally safe sink
    const SINK: usize = usize::MAX;
    let mut trans_out: Vec<BTreeMap<EventId, usize>> = vec![BTreeMap::new()];
    let mut queue = VecDeque::from([0usize]);
    let mut need_sink = false;
    while let Some(z) = queue.pop_front() {
        let members = subsets[z].clone();
        for a in interface.ids() {
            let name = interface.name(a);
            let target = match prod_alphabet.id(name) {
                None => {
                    // the environment's private event: unconstrained
                    Some(z)
                }
                Some(e) => {
                    let stepped: BTreeSet<usize> = members
                        .iter()
                        .filter_map(|&s| trans[s].get(&e).copied())
                        .collect();
                    if stepped.is_empty() {
                        // blocked by the module: every extension is jointly
                        // unrealisable, hence safe
                        need_sink = true;
                        Some(SINK)
                    } else {
                        let closed = closure(stepped);
                        if escaped(&closed) {
                            None // collapses into the deleted error state
                        } else {
                            Some(*index.entry(closed.clone()).or_insert_with(|| {
                                subsets.push(closed);
                                trans_out.push(BTreeMap::new());
                                queue.push_back(subsets.len() - 1);
                                subsets.len() - 1
                            }))
                        }
                    }
                }
            };
            if let Some(t) = target {
                trans_out[z].insert(a, t);
            }
        }
    }
    let mut names: Vec<String> = (0..subsets.len()).map(|i| format!("a{i}")).collect();
    let sink_id = subsets.len();
    if need_sink {
        names.push("safe".into());
        let loops: BTreeMap<EventId, StateId> = interface.ids().map(|a| (a, sink_id)).collect();
        trans_out.push(loops);
    }
    let trans_fixed: Vec<BTreeMap<EventId, StateId>> = trans_out
        .into_iter()
        .map(|m| {
            m.into_iter()
                .map(|(e, d)| (e, if d == SINK { sink_id } else { d }))
                .collect()
        })
        .collect();
    let automaton = Automaton::from_parts(
        interface.clone(),
        names,
        0,
        None, // all-marked
        None,
        trans_fixed,
    );
    Ok(Assumption {
        automaton: automaton.accessible(),
    })
}

/// The combined premise of the symmetric proof rule: the marked language of
/// the composed assumption complements must lie inside the property. The
/// counterexample is a shortest marked violating trace.
pub fn check_symn(assumptions: &[Assumption], p: &Automaton) -> Result<SymnVerdict> {
    let mut composed: Option<Automaton> = None;
    for a in assumptions {
        let co = a.automaton.complement();
        composed = Some(match composed {
            None => co,
            Some(acc) => acc.compose(&co)?,
        });
    }
    let composed = composed.ok_or_else(|| Error::Precondition("no assumptions given".into()))?;
    for name in p.alphabet().names() {
        if !composed.alphabet().contains(name) {
            return Err(Error::AlphabetNotContained(name.to_string()));
        }
    }
    match composed.marked_inclusion(p)? {
        Verdict::Holds => Ok(SymnVerdict::Holds),
        Verdict::Violated { witness } => Ok(SymnVerdict::Violated {
            counterexample: witness,
        }),
    }
}

/// Weakest assumptions for a family of modules, then the combined premise.
pub fn check_modules(modules: &[AgModule], p: &Automaton) -> Result<SymnVerdict> {
    let assumptions: Vec<Assumption> = modules
        .iter()
        .map(|m| weakest_assumption(&m.automaton, &m.interface, p))
        .collect::<Result<_>>()?;
    check_symn(&assumptions, p)
}

/// One subsystem entering the coordination layer.
#[derive(Debug, Clone)]
pub struct SubsystemModule {
    pub id: usize,
    /// local event universe with the nominal partition
    pub local_alphabet: Arc<Alphabet>,
    /// plant used for coordination synthesis: the bare plant for nominal
    /// subsystems, the staged closed-loop model for faulty ones
    pub plant: Automaton,
    /// initial component module: the nominal closed loop, or the
    /// occurrence projection of the staged model
    pub initial_module: Automaton,
    pub nominal_supervisor: Option<Supervisor>,
    /// present exactly for faulty subsystems
    pub fault_config: Option<FaultConfig>,
}

impl SubsystemModule {
    fn is_faulty(&self) -> bool {
        self.fault_config.is_some()
    }

    fn local_events(&self) -> BTreeSet<String> {
        self.local_alphabet.names().map(|s| s.to_string()).collect()
    }

    /// Normalises an automaton over the local events to the nominal flags.
    fn normalise(&self, a: &Automaton) -> Result<Automaton> {
        a.with_alphabet(self.local_alphabet.clone())
    }
}

#[derive(Debug, Clone)]
pub struct CoordinationInput {
    pub subsystems: Vec<SubsystemModule>,
    pub spec: Automaton,
}

impl CoordinationInput {
    fn locals(&self) -> BTreeMap<usize, BTreeSet<String>> {
        self.subsystems
            .iter()
            .map(|s| (s.id, s.local_events()))
            .collect()
    }

    fn global_alphabet(&self) -> Result<Arc<Alphabet>> {
        let mut acc: Option<Arc<Alphabet>> = None;
        for s in &self.subsystems {
            acc = Some(match acc {
                None => s.local_alphabet.clone(),
                Some(a) => a.union(&s.local_alphabet)?,
            });
        }
        let acc = acc.ok_or_else(|| Error::Precondition("no subsystems".into()))?;
        for name in self.spec.alphabet().names() {
            if !acc.contains(name) {
                return Err(Error::AlphabetNotContained(name.to_string()));
            }
        }
        Ok(acc)
    }

    fn interface_alphabet(&self, i: usize) -> Result<Arc<Alphabet>> {
        let events = interface_events(&self.locals(), i, &self.spec);
        self.global_alphabet()?.restrict(&events)
    }

    fn modules_from(&self, automata: &BTreeMap<usize, Automaton>) -> Result<Vec<AgModule>> {
        self.subsystems
            .iter()
            .map(|s| {
                Ok(AgModule {
                    automaton: automata[&s.id].clone(),
                    interface: self.interface_alphabet(s.id)?,
                })
            })
            .collect()
    }

    fn initial_modules(&self) -> Result<BTreeMap<usize, Automaton>> {
        self.subsystems
            .iter()
            .map(|s| Ok((s.id, s.normalise(&s.initial_module)?)))
            .collect()
    }
}

/// Direct composition of module automata.
pub fn compose_all(automata: &[&Automaton]) -> Result<Automaton> {
    let mut acc: Option<Automaton> = None;
    for a in automata {
        acc = Some(match acc {
            None => (*a).clone(),
            Some(x) => x.compose(a)?,
        });
    }
    acc.ok_or_else(|| Error::Precondition("nothing to compose".into()))
}

/// Post-fault coordination check: with the faulty subsystems replaced by
/// their staged modules and everything else nominal, does the composition
/// still satisfy the specification (via the symmetric rule with weakest
/// assumptions)?
pub fn check_post_fault_coordination(input: &CoordinationInput) -> Result<SymnVerdict> {
    let modules = input.modules_from(&input.initial_modules()?)?;
    check_modules(&modules, &input.spec)
}

/// Existence of coordination supervisors: the infimally permissive modules
/// (everything controllable disabled) must jointly satisfy the
/// specification.
pub fn check_coordination_existence(input: &CoordinationInput) -> Result<SymnVerdict> {
    let mut infimal = BTreeMap::new();
    for s in &input.subsystems {
        let uc = s.plant.alphabet().uncontrollable_names();
        let inf = synthesis::inf_c(&s.plant, &uc)?;
        let module = if let Some(cfg) = &s.fault_config {
            let occ = staging::occurrence_module(&inf, cfg, &s.local_events())?;
            s.normalise(&occ)?
        } else {
            s.normalise(&inf)?
        };
        infimal.insert(s.id, module);
    }
    let modules = input.modules_from(&infimal)?;
    check_modules(&modules, &input.spec)
}

/// How a subsystem ends up supervised after coordination.
#[derive(Debug, Clone)]
pub enum CoordinationSupervisor {
    /// the nominal supervisor needs no reconfiguration
    Nominal(Supervisor),
    /// the faulty subsystem keeps its post-fault supervisors unchanged
    PostFault,
    /// a freshly synthesised coordination supervisor
    Synthesized(Supervisor),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynCoStatus {
    /// the refined modules jointly satisfy the global specification
    Coordinated,
    /// only the trivial solution exists (or refinement got stuck): the
    /// pre-refinement supervisors are returned and local safety is all
    /// that is guaranteed
    TolerableOnly,
}

#[derive(Debug, Clone)]
pub struct SynCoIteration {
    pub counterexample: Trace,
    pub states_before: usize,
    pub states_after: usize,
    pub refined: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SynCoResult {
    pub status: SynCoStatus,
    pub supervisors: BTreeMap<usize, CoordinationSupervisor>,
    pub modules: BTreeMap<usize, Automaton>,
    pub iterations: Vec<SynCoIteration>,
}

/// Counterexample-guided synthesis of coordination supervisors.
///
/// Refuses to run unless a coordination exists. Starts from the supervised
/// modules, falls back to bare plants for the nominal subsystems, then
/// repeatedly: verifies the combined premise, extracts a shortest real
/// counterexample from the module composition, deletes its projection (and
/// all extensions) from every module that can realise the cut, and
/// resynthesises maximally permissive coordination supervisors. Modules
/// whose cut is unrealisable (nothing controllable left) are kept
/// unchanged; the counterexample is then eliminated through the others.
pub fn syn_co(input: &CoordinationInput) -> Result<SynCoResult> {
    match check_coordination_existence(input)? {
        SymnVerdict::Holds => {}
        SymnVerdict::Violated { counterexample } => {
            return Err(Error::Precondition(format!(
                "no coordination supervisors exist (witness `{counterexample}`)"
            )));
        }
    }
    let pre_supervisors: BTreeMap<usize, CoordinationSupervisor> = input
        .subsystems
        .iter()
        .map(|s| {
            let sup = if s.is_faulty() {
                CoordinationSupervisor::PostFault
            } else {
                CoordinationSupervisor::Nominal(
                    s.nominal_supervisor
                        .clone()
                        .unwrap_or_else(|| {
                            Supervisor::from_automaton(Automaton::universal(
                                s.local_alphabet.clone(),
                            ))
                        }),
                )
            };
            (s.id, sup)
        })
        .collect();

    // lines 1–4: first try the supervised modules as they stand
    let initial = input.initial_modules()?;
    if check_modules(&input.modules_from(&initial)?, &input.spec)?.holds() {
        return Ok(SynCoResult {
            status: SynCoStatus::Coordinated,
            supervisors: pre_supervisors,
            modules: initial,
            iterations: Vec::new(),
        });
    }

    // fallback: nominal subsystems open up to their bare plants
    let mut modules: BTreeMap<usize, Automaton> = BTreeMap::new();
    for s in &input.subsystems {
        let m = if s.is_faulty() {
            initial[&s.id].clone()
        } else {
            s.normalise(&s.plant)?
        };
        modules.insert(s.id, m);
    }
    let mut supervisors: BTreeMap<usize, CoordinationSupervisor> = input
        .subsystems
        .iter()
        .map(|s| {
            let sup = if s.is_faulty() {
                CoordinationSupervisor::PostFault
            } else {
                CoordinationSupervisor::Synthesized(Supervisor::from_automaton(
                    Automaton::universal(s.local_alphabet.clone()),
                ))
            };
            (s.id, sup)
        })
        .collect();
    let mut adopted_cuts: BTreeMap<usize, Vec<Trace>> = BTreeMap::new();
    let mut iterations = Vec::new();

    for _round in 0..256 {
        let module_refs: Vec<&Automaton> =
            input.subsystems.iter().map(|s| &modules[&s.id]).collect();
        let composition = compose_all(&module_refs)?;
        let direct = composition.satisfies(&input.spec)?;
        let counterexample = match direct {
            Verdict::Holds => {
                // converged: prefer nominal supervisors wherever the refined
                // bound does not constrain them
                return finish(input, modules, supervisors, adopted_cuts, iterations, pre_supervisors);
            }
            Verdict::Violated { witness } => witness,
        };
        let states_before: usize = modules.values().map(|m| m.state_count()).sum();
        let mut refined = Vec::new();
        for s in &input.subsystems {
            let local = s.local_events();
            let projected = counterexample.project(&local);
            let current = &modules[&s.id];
            if !current.generates(&projected) {
                continue;
            }
            let Some(cut) = delete_extensions(current, &projected)? else {
                continue;
            };
            match resynthesize(s, &cut)? {
                Some((sup, module)) => {
                    modules.insert(s.id, module);
                    supervisors.insert(s.id, CoordinationSupervisor::Synthesized(sup));
                    adopted_cuts.entry(s.id).or_default().push(projected);
                    refined.push(s.id);
                }
                None => {
                    // the cut is unrealisable for this subsystem; keep it
                }
            }
        }
        let states_after: usize = modules.values().map(|m| m.state_count()).sum();
        let stuck = refined.is_empty();
        iterations.push(SynCoIteration {
            counterexample,
            states_before,
            states_after,
            refined,
        });
        if stuck {
            // no module can realise its share of the cut: fall back to the
            // pre-refinement supervisors, keeping local safety only
            return Ok(SynCoResult {
                status: SynCoStatus::TolerableOnly,
                supervisors: pre_supervisors,
                modules: initial,
                iterations,
            });
        }
    }
    Err(Error::SynthesisDiverged)
}

fn finish(
    input: &CoordinationInput,
    mut modules: BTreeMap<usize, Automaton>,
    mut supervisors: BTreeMap<usize, CoordinationSupervisor>,
    adopted_cuts: BTreeMap<usize, Vec<Trace>>,
    iterations: Vec<SynCoIteration>,
    pre_supervisors: BTreeMap<usize, CoordinationSupervisor>,
) -> Result<SynCoResult> {
    for s in &input.subsystems {
        if s.is_faulty() {
            if !adopted_cuts.contains_key(&s.id) {
                supervisors.insert(s.id, CoordinationSupervisor::PostFault);
                modules.insert(s.id, s.normalise(&s.initial_module)?);
            }
            continue;
        }
        let Some(nominal) = &s.nominal_supervisor else {
            continue;
        };
        let nominal_loop = s.normalise(&synthesis::closed_loop(nominal, &s.plant)?)?;
        let cuts = adopted_cuts.get(&s.id).cloned().unwrap_or_default();
        let compatible = cuts.iter().all(|cut| !nominal_loop.generates(cut));
        if compatible {
            supervisors.insert(s.id, CoordinationSupervisor::Nominal(nominal.clone()));
            modules.insert(s.id, nominal_loop);
        }
    }
    // the preferred modules only shrink behaviour, but re-verify to be sure
    let module_refs: Vec<&Automaton> = input.subsystems.iter().map(|s| &modules[&s.id]).collect();
    let composition = compose_all(&module_refs)?;
    let degenerate = composition.accessible().transition_count() == 0;
    if degenerate || !composition.satisfies(&input.spec)?.holds() {
        return Ok(SynCoResult {
            status: SynCoStatus::TolerableOnly,
            supervisors: pre_supervisors,
            modules: input.initial_modules()?,
            iterations,
        });
    }
    Ok(SynCoResult {
        status: SynCoStatus::Coordinated,
        supervisors,
        modules,
        iterations,
    })
}

/// Exact `L(m) − sΣ*`. Removes the transition consuming the last event of
/// `s` when the prefix path is unique (the tree case); otherwise intersects
/// with a prefix-tracking automaton. Returns `None` for the empty trace,
/// whose deletion would leave no prefix-closed language.
pub fn delete_extensions(m: &Automaton, s: &Trace) -> Result<Option<Automaton>> {
    if s.is_empty() {
        return Ok(None);
    }
    let mut path = vec![m.initial()];
    for ev in s.events() {
        let e = m.alphabet().require(ev)?;
        match m.step(*path.last().unwrap(), e) {
            Some(next) => path.push(next),
            None => return Err(Error::TraceNotGenerated(ev.clone(), s.to_string())),
        }
    }
    // in-degrees over the accessible part decide whether the path is unique
    let mut indeg = vec![0usize; m.state_count()];
    for st in 0..m.state_count() {
        for (_, d) in m.transitions_from(st) {
            indeg[d] += 1;
        }
    }
    let mut unique = indeg[m.initial()] == 0;
    let mut seen = BTreeSet::new();
    for (k, &st) in path.iter().enumerate() {
        if !seen.insert(st) {
            unique = false;
        }
        if k > 0 && indeg[st] != 1 {
            unique = false;
        }
    }
    if unique {
        let last_src = path[path.len() - 2];
        let last_ev = s.events().last().unwrap().clone();
        let triples: Vec<(String, String, String)> = m
            .transition_triples()
            .into_iter()
            .filter(|(src, ev, _)| {
                !(src == m.state_name(last_src) && *ev == last_ev)
            })
            .collect();
        let refs: Vec<(&str, &str, &str)> = triples
            .iter()
            .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
            .collect();
        let cut = Automaton::new(
            m.alphabet().clone(),
            m.state_names().map(|x| x.to_string()).collect(),
            m.state_name(m.initial()),
            None,
            &refs,
        )?;
        return Ok(Some(cut.accessible()));
    }
    // prefix tracker: consumes s and dies; anything diverging runs free
    let mut states: Vec<String> = (0..s.len()).map(|i| format!("t{i}")).collect();
    states.push("free".into());
    let mut triples: Vec<(String, String, String)> = Vec::new();
    for (k, ev) in s.events().iter().enumerate() {
        if k + 1 < s.len() {
            triples.push((format!("t{k}"), ev.clone(), format!("t{}", k + 1)));
        }
        for other in m.alphabet().names() {
            if other != ev {
                triples.push((format!("t{k}"), other.to_string(), "free".into()));
            }
        }
    }
    for ev in m.alphabet().names() {
        triples.push(("free".into(), ev.to_string(), "free".into()));
    }
    let refs: Vec<(&str, &str, &str)> = triples
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    let tracker = Automaton::new(m.alphabet().clone(), states, "t0", None, &refs)?;
    Ok(Some(m.compose(&tracker)?))
}

/// Synthesises the maximally permissive coordination supervisor enforcing
/// `cut` on the subsystem, and rebuilds its component module. `None` when
/// no admissible supervisor can realise the cut.
fn resynthesize(
    s: &SubsystemModule,
    cut: &Automaton,
) -> Result<Option<(Supervisor, Automaton)>> {
    if let Some(cfg) = &s.fault_config {
        let lifted = sensor::occurrence_spec_lift(cut, s.plant.alphabet(), cfg)?;
        let k = lifted.compose(&s.plant)?;
        let uc = s.plant.alphabet().uncontrollable_names();
        let obs = s.plant.alphabet().observable_names();
        match synthesis::supremal_supervisor(&s.plant, &k, &uc, &obs)? {
            None => Ok(None),
            Some(result) => {
                let occ = staging::occurrence_module(&result.closed_loop, cfg, &s.local_events())?;
                Ok(Some((result.supervisor, s.normalise(&occ)?)))
            }
        }
    } else {
        let uc = s.plant.alphabet().uncontrollable_names();
        let obs = s.plant.alphabet().observable_names();
        let k = cut.with_alphabet(s.plant.alphabet().clone())?;
        match synthesis::supremal_supervisor(&s.plant, &k, &uc, &obs)? {
            None => Ok(None),
            Some(result) => Ok(Some((
                result.supervisor,
                s.normalise(&result.closed_loop)?,
            ))),
        }
    }
}
