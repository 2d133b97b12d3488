//! Fault-script interpretation: builds the staged closed-loop model of a
//! subsystem across its nominal mode, sensor-fault detection and actuator
//! faults, switching supervisors at each stage.
//!
//! Mode-switch events are generated here, lazily, when a script injects an
//! actuator fault; plant automata never carry fault transitions beyond the
//! suffix construction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use crate::actuator::{self, Tolerance, BANK_ALL};
use crate::alphabet::Alphabet;
use crate::automaton::{Automaton, StateId, Trace};
use crate::error::{Error, Result};
use crate::fault::FaultConfig;
use crate::sensor::{self, CertainEntryPlant, Diagnoser};
use crate::synthesis::{self, Supervisor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultKind {
    Actuator,
    Sensor,
}

/// One scripted fault of a subsystem: the failing actuator or sensor and
/// the local staged trace generated before the injection.
#[derive(Debug, Clone)]
pub struct LocalFault {
    pub kind: FaultKind,
    pub target: String,
    pub after: Trace,
}

/// Human-readable note about one interpreted stage, for reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageNote {
    pub stage: String,
    pub detail: String,
}

/// The staged subsystem after interpreting its fault script.
#[derive(Debug, Clone)]
pub struct StagedSubsystem {
    /// full bookkeeping model over the local events plus fault events,
    /// faulty readings, detection events and mode-switch events
    pub staged: Automaton,
    /// occurrence projection of the staged model onto the local events
    pub module: Automaton,
    /// post-fault supervisor of the first actuator stage, when one ran
    pub actuator_supervisor: Option<Supervisor>,
    /// post-detection supervisors per first-entered certain state
    pub sensor_supervisors: BTreeMap<String, Supervisor>,
    pub notes: Vec<StageNote>,
}

/// Why a fault script cannot be tolerated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageFailure {
    pub stage: String,
    pub state: Option<String>,
    pub witness: Option<Trace>,
}

#[derive(Debug, Clone)]
pub enum StagingVerdict {
    Staged(Box<StagedSubsystem>),
    Intolerant(StageFailure),
}

/// Interprets the fault script of one subsystem. Sensor faults must precede
/// actuator faults; the first sensor fault switches the subsystem into the
/// unified multi-sensor regime, the first actuator fault into the
/// all-actuators-uncontrollable regime.
pub fn interpret_faults(
    plant: &Automaton,
    safety: &Automaton,
    nominal: &Supervisor,
    cfg: &FaultConfig,
    faults: &[LocalFault],
) -> Result<StagingVerdict> {
    let mut sensor_faults = Vec::new();
    let mut actuator_faults = Vec::new();
    for f in faults {
        match f.kind {
            FaultKind::Sensor => {
                if !actuator_faults.is_empty() {
                    return Err(Error::Validation(
                        "sensor faults must precede actuator faults in a script".into(),
                    ));
                }
                if !cfg.has_sensor(&f.target) {
                    return Err(Error::Validation(format!(
                        "`{}` is not a declared sensor of subsystem {}",
                        f.target,
                        cfg.subsystem()
                    )));
                }
                sensor_faults.push(f.clone());
            }
            FaultKind::Actuator => {
                if !cfg.has_actuator(&f.target) {
                    return Err(Error::Validation(format!(
                        "`{}` is not a declared actuator of subsystem {}",
                        f.target,
                        cfg.subsystem()
                    )));
                }
                actuator_faults.push(f.clone());
            }
        }
    }

    let nominal_loop = synthesis::closed_loop(nominal, plant)?;
    let mut notes = vec![StageNote {
        stage: "nominal".into(),
        detail: format!("closed loop with {} states", nominal_loop.state_count()),
    }];
    let mut staged = nominal_loop;
    // the uncontrolled plant model matching the current staged regime
    let mut current_plant = plant.clone();
    let mut sensor_supervisors = BTreeMap::new();

    if let Some(first) = sensor_faults.first() {
        if !staged.generates(&first.after) {
            return Err(Error::Validation(format!(
                "sensor fault injection point `{}` is not generated by the nominal loop",
                first.after
            )));
        }
        let which: Vec<String> = cfg.sensors().to_vec();
        let g_f = sensor::build_faulty_plant(plant, cfg, &which)?;
        let s_f = sensor::build_faulty_supervisor(nominal, cfg, &which)?;
        let gks = sensor::closed_loop_fault_model(&s_f, &g_f)?;
        match sensor::check_sf_safe(&gks, safety, cfg)? {
            sensor::SfVerdict::SfSafe => {}
            sensor::SfVerdict::NotSfSafe {
                condition,
                state,
                witness,
            } => {
                return Ok(StagingVerdict::Intolerant(StageFailure {
                    stage: format!("sensor-safety condition ({condition})"),
                    state: Some(state),
                    witness,
                }));
            }
        }
        let diag = sensor::build_safe_diagnoser(&gks, safety, cfg)?;
        let fc = sensor::first_entered_certain(&diag);
        let mut per_qy: BTreeMap<usize, (CertainEntryPlant, Automaton)> = BTreeMap::new();
        for &d in &fc {
            let q_y = &diag.states[d];
            let entry = sensor::certain_entry_plant(&g_f, q_y, diag.tracked.len(), cfg)?;
            let post_spec =
                sensor::sensor_post_fault_spec(safety, &gks, &diag, q_y, &entry, cfg)?;
            match sensor::check_sensor_tolerance(&entry, &post_spec, cfg)? {
                Tolerance::Tolerant => {}
                Tolerance::Intolerant { witness } => {
                    return Ok(StagingVerdict::Intolerant(StageFailure {
                        stage: "sensor-tolerance".into(),
                        state: Some(diag.automaton.state_name(d).to_string()),
                        witness: Some(witness),
                    }));
                }
            }
            let sup = sensor::synth_sensor_post_supervisor(&entry, &post_spec, cfg)?;
            let closed = synthesis::closed_loop(&sup, &entry.plant)?;
            sensor_supervisors.insert(diag.automaton.state_name(d).to_string(), sup);
            per_qy.insert(d, (entry, closed));
        }
        staged = sensor_staged_model(&gks, &diag, &fc, &per_qy)?;
        current_plant = g_f;
        notes.push(StageNote {
            stage: "sensor".into(),
            detail: format!(
                "unified fault model with {} detection points, staged model {} states",
                fc.len(),
                staged.state_count()
            ),
        });
        for extra in &sensor_faults[1..] {
            if !staged.generates(&extra.after) {
                return Err(Error::Validation(format!(
                    "sensor fault injection point `{}` is not generated by the staged model",
                    extra.after
                )));
            }
            notes.push(StageNote {
                stage: "sensor".into(),
                detail: format!(
                    "further loss of `{}` absorbed by the unified model",
                    extra.target
                ),
            });
        }
    }

    let mut actuator_supervisor = None;
    let mut mode = "0".to_string();
    for (n, fault) in actuator_faults.iter().enumerate() {
        if !staged.generates(&fault.after) {
            return Err(Error::Validation(format!(
                "actuator fault injection point `{}` is not generated by the staged model",
                fault.after
            )));
        }
        let h = cfg.mode_switch_event(&mode, &fault.target)?.to_string();
        if n == 0 {
            // switch to the all-actuators-uncontrollable regime
            let plant_trace = project_trace(&fault.after, current_plant.alphabet());
            let plant_f = actuator::post_fault_plant_multi(&current_plant, &plant_trace, cfg)?;
            let occ = sensor::occurrence_trace(
                &fault.after,
                cfg,
                &safety.alphabet().names().map(|s| s.to_string()).collect(),
            );
            let post_spec = actuator::post_fault_spec(safety, &occ)?;
            match actuator_tolerance_occ(&plant_f, &post_spec, cfg)? {
                Tolerance::Tolerant => {}
                Tolerance::Intolerant { witness } => {
                    return Ok(StagingVerdict::Intolerant(StageFailure {
                        stage: "actuator-tolerance".into(),
                        state: None,
                        witness: Some(witness),
                    }));
                }
            }
            let sup = if sensor_faults.is_empty() {
                let bank = actuator::safety_bank(plant, safety, cfg)?;
                actuator::post_fault_supervisor(
                    &bank[BANK_ALL],
                    plant,
                    &plant_f,
                    &post_spec.with_alphabet(plant_f.alphabet().clone())?,
                    &plant_trace,
                )?
            } else {
                synth_occurrence_supervisor(&plant_f, &post_spec, cfg)?
            };
            let post_loop = synthesis::closed_loop(&sup, &plant_f)?;
            staged = pinned_extension(&staged, &fault.after, &h, &post_loop, post_loop.initial())?;
            actuator_supervisor = Some(sup);
            notes.push(StageNote {
                stage: "actuator".into(),
                detail: format!(
                    "loss of `{}` after `{}`; post-fault loop {} states",
                    fault.target,
                    fault.after,
                    post_loop.state_count()
                ),
            });
        } else {
            // supervision already tolerates arbitrary further losses; the
            // switch is recorded in the staged trace only
            let cont = staged.clone();
            let at = cont.state_after(&fault.after)?;
            staged = pinned_extension(&staged, &fault.after, &h, &cont, at)?;
            notes.push(StageNote {
                stage: "actuator".into(),
                detail: format!("further loss of `{}` after `{}`", fault.target, fault.after),
            });
        }
        mode = fault.target.clone();
    }

    let keep: BTreeSet<String> = plant.alphabet().names().map(|s| s.to_string()).collect();
    let module = occurrence_module(&staged, cfg, &keep)?;
    Ok(StagingVerdict::Staged(Box::new(StagedSubsystem {
        staged,
        module,
        actuator_supervisor,
        sensor_supervisors,
        notes,
    })))
}

/// Occurrence projection of a staged model: faulty readings relabelled to
/// their underlying readings, bookkeeping events erased.
pub fn occurrence_module(
    staged: &Automaton,
    cfg: &FaultConfig,
    keep: &BTreeSet<String>,
) -> Result<Automaton> {
    let map: BTreeMap<String, String> = cfg
        .reading_pairs()
        .into_iter()
        .filter(|(_, f)| staged.alphabet().contains(f))
        .map(|(r, f)| (f, r))
        .collect();
    let relabelled = staged.relabel(&map)?;
    relabelled.project(keep)
}

fn project_trace(t: &Trace, alphabet: &Alphabet) -> Trace {
    Trace(
        t.events()
            .iter()
            .filter(|e| alphabet.contains(e))
            .cloned()
            .collect(),
    )
}

/// Actuator tolerance with occurrence semantics: the infimal controllable
/// language is relabelled before the satisfaction check so faulty readings
/// count as their underlying readings.
fn actuator_tolerance_occ(
    plant_f: &Automaton,
    post_spec: &Automaton,
    cfg: &FaultConfig,
) -> Result<Tolerance> {
    let uc = plant_f.alphabet().uncontrollable_names();
    let infc = synthesis::inf_c(plant_f, &uc)?;
    let map: BTreeMap<String, String> = cfg
        .reading_pairs()
        .into_iter()
        .filter(|(_, f)| infc.alphabet().contains(f))
        .map(|(r, f)| (f, r))
        .collect();
    let occ = infc.relabel(&map)?;
    match occ.satisfies(post_spec)? {
        crate::automaton::Verdict::Holds => Ok(Tolerance::Tolerant),
        crate::automaton::Verdict::Violated { witness } => {
            Ok(Tolerance::Intolerant { witness })
        }
    }
}

fn synth_occurrence_supervisor(
    plant_f: &Automaton,
    post_spec: &Automaton,
    cfg: &FaultConfig,
) -> Result<Supervisor> {
    let lifted = sensor::occurrence_spec_lift(post_spec, plant_f.alphabet(), cfg)?;
    let k = lifted.compose(plant_f)?;
    let uc = plant_f.alphabet().uncontrollable_names();
    let obs = plant_f.alphabet().observable_names();
    match synthesis::supremal_supervisor(plant_f, &k, &uc, &obs)? {
        Some(result) => Ok(result.supervisor),
        None => Err(Error::Precondition(
            "tolerance established but synthesis returned an empty language".into(),
        )),
    }
}

/// Staged model of the sensor stage: the closed-loop fault model paired
/// with its diagnoser; on first entering a certain state the nominal
/// supervision is cut and the matching detection event hands over to the
/// post-detection closed loop.
fn sensor_staged_model(
    gks: &Automaton,
    diag: &Diagnoser,
    fc: &BTreeSet<usize>,
    per_qy: &BTreeMap<usize, (CertainEntryPlant, Automaton)>,
) -> Result<Automaton> {
    let mut alphabet: Arc<Alphabet> = gks.alphabet().clone();
    for (entry, _) in per_qy.values() {
        alphabet = alphabet.union(entry.plant.alphabet())?;
    }
    let diag_auto = &diag.automaton;
    let obs: Vec<Option<usize>> = gks
        .alphabet()
        .ids()
        .map(|e| diag_auto.alphabet().id(gks.alphabet().name(e)))
        .collect();

    type Node = (StateId, StateId);
    let mut states: Vec<Node> = vec![(gks.initial(), diag_auto.initial())];
    let mut index: BTreeMap<Node, usize> = BTreeMap::new();
    index.insert(states[0], 0);
    let mut names: Vec<String> = vec![format!(
        "({},{})",
        gks.state_name(gks.initial()),
        diag_auto.state_name(diag_auto.initial())
    )];
    let mut triples: Vec<(String, String, String)> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let mut glued: BTreeSet<(usize, usize)> = BTreeSet::new();
    while let Some(p) = queue.pop_front() {
        let (q, d) = states[p];
        if fc.contains(&d) {
            // detection point: nominal supervision is cut, the detection
            // event for the member the plant is actually in hands over
            let (entry, closed) = &per_qy[&d];
            let q_name = gks.state_name(q);
            let j = diag.states[d]
                .members
                .iter()
                .position(|m| m.state == q_name)
                .ok_or_else(|| Error::Validation(format!(
                    "state `{q_name}` is not a member of its certain diagnoser state"
                )))?;
            let detect = &entry.detects[j];
            let start = closed
                .step(closed.initial(), closed.alphabet().require(detect)?)
                .ok_or_else(|| Error::Validation(format!(
                    "post-detection loop rejects its own detection event `{detect}`"
                )))?;
            let prefix = format!("d{d}m{j}:");
            if glued.insert((d, j)) {
                let sub = glue_from(closed, start, &prefix);
                triples.extend(sub.1);
            }
            triples.push((
                names[p].clone(),
                detect.clone(),
                format!("{prefix}{}", closed.state_name(start)),
            ));
            continue;
        }
        for (e, qn) in gks.transitions_from(q) {
            let dn = match obs[e] {
                Some(de) => match diag_auto.step(d, de) {
                    Some(x) => x,
                    // the diagnoser tracks every observable closed-loop
                    // move, so this cannot happen on well-formed inputs
                    None => {
                        return Err(Error::Validation(
                            "diagnoser rejects an observable closed-loop move".into(),
                        ))
                    }
                },
                None => d,
            };
            let node = (qn, dn);
            let id = *index.entry(node).or_insert_with(|| {
                states.push(node);
                names.push(format!(
                    "({},{})",
                    gks.state_name(qn),
                    diag_auto.state_name(dn)
                ));
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            triples.push((
                names[p].clone(),
                gks.alphabet().name(e).to_string(),
                names[id].clone(),
            ));
        }
    }
    let mut all_states = names.clone();
    let mut seen: BTreeSet<String> = names.iter().cloned().collect();
    for (src, _, dst) in &triples {
        for s in [src, dst] {
            if seen.insert(s.clone()) {
                all_states.push(s.clone());
            }
        }
    }
    let refs: Vec<(&str, &str, &str)> = triples
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    Ok(Automaton::new(alphabet, all_states, &names[0], None, &refs)?.accessible())
}

/// Transition triples of the part of `a` reachable from `start`, with state
/// names prefixed.
fn glue_from(a: &Automaton, start: StateId, prefix: &str) -> (Vec<String>, Vec<(String, String, String)>) {
    let mut order = vec![start];
    let mut seen = BTreeSet::from([start]);
    let mut triples = Vec::new();
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for (e, d) in a.transitions_from(s) {
            triples.push((
                format!("{prefix}{}", a.state_name(s)),
                a.alphabet().name(e).to_string(),
                format!("{prefix}{}", a.state_name(d)),
            ));
            if seen.insert(d) {
                order.push(d);
                queue.push_back(d);
            }
        }
    }
    (
        order
            .into_iter()
            .map(|s| format!("{prefix}{}", a.state_name(s)))
            .collect(),
        triples,
    )
}

/// Pins the staged history to `after`, appends the mode-switch event, and
/// continues with the given closed loop from `cont_start`.
fn pinned_extension(
    base: &Automaton,
    after: &Trace,
    switch_event: &str,
    continuation: &Automaton,
    cont_start: StateId,
) -> Result<Automaton> {
    base.state_after(after)?;
    // past the fault boundary, the continuation's (post-fault) partition
    // governs the staged alphabet
    let mut alphabet = base.alphabet().overlay(continuation.alphabet())?;
    if !alphabet.contains(switch_event) {
        alphabet = alphabet.with_events(vec![crate::alphabet::EventDecl::new(
            switch_event,
            false,
            true,
        )])?;
    }
    let mut states: Vec<String> = (0..=after.len()).map(|i| format!("p{i}")).collect();
    let mut triples: Vec<(String, String, String)> = after
        .events()
        .iter()
        .enumerate()
        .map(|(i, e)| (format!("p{i}"), e.clone(), format!("p{}", i + 1)))
        .collect();
    let (glue_states, glue_triples) = glue_from(continuation, cont_start, "k:");
    states.extend(glue_states);
    triples.extend(glue_triples);
    triples.push((
        format!("p{}", after.len()),
        switch_event.to_string(),
        format!("k:{}", continuation.state_name(cont_start)),
    ));
    let refs: Vec<(&str, &str, &str)> = triples
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    Automaton::new(alphabet, states, "p0", None, &refs)
}
