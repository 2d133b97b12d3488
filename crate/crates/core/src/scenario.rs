//! Scenario files: the declarative description of a distributed system
//! (plants, safety languages, local specifications, nominal supervisors,
//! fault configurations, a global specification and a fault script), their
//! validation, and the end-to-end verification pipeline.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::automaton::{Automaton, Trace, Verdict};
use crate::coordination::{
    self, CoordinationInput, CoordinationSupervisor, SubsystemModule, SymnVerdict,
    SynCoStatus,
};
use crate::error::{Error, Result};
use crate::fault::FaultConfig;
use crate::json::{AutomatonDoc, FORMAT};
use crate::staging::{self, FaultKind, LocalFault, StagingVerdict};
use crate::synthesis::{self, Supervisor};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SubsystemDoc {
    pub id: usize,
    pub plant: AutomatonDoc,
    pub safety: AutomatonDoc,
    pub local_spec: AutomatonDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal_supervisor: Option<AutomatonDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub actuators: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sensors: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FaultEventDoc {
    pub kind: String,
    pub subsystem: usize,
    pub target: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub after: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub format: String,
    pub subsystems: Vec<SubsystemDoc>,
    pub global_spec: AutomatonDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fault_script: Vec<FaultEventDoc>,
}

/// A loaded subsystem with its derived fault configuration.
#[derive(Debug, Clone)]
pub struct Subsystem {
    pub id: usize,
    pub plant: Automaton,
    pub safety: Automaton,
    pub local_spec: Automaton,
    pub nominal: Supervisor,
    pub config: FaultConfig,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub subsystems: Vec<Subsystem>,
    pub global_spec: Automaton,
    pub script: Vec<(usize, LocalFault)>,
    pub warnings: Vec<String>,
}

pub fn parse_scenario(json: &str) -> Result<Scenario> {
    let doc: ScenarioDoc =
        serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))?;
    load_scenario(&doc)
}

/// Validates a scenario document: the shared-event controllability
/// discipline across subsystems, the actuator/sensor membership
/// constraints, the containment of each closed loop in its safety language,
/// and the fault script against the declared configurations. Missing
/// nominal supervisors are synthesised against the local specification
/// conjoined with the safety language.
pub fn load_scenario(doc: &ScenarioDoc) -> Result<Scenario> {
    if doc.format != FORMAT {
        return Err(Error::Schema(format!(
            "unsupported format `{}`, expected `{FORMAT}`",
            doc.format
        )));
    }
    if doc.subsystems.is_empty() {
        return Err(Error::Validation("scenario declares no subsystems".into()));
    }
    let mut ids = BTreeSet::new();
    for s in &doc.subsystems {
        if !ids.insert(s.id) {
            return Err(Error::Validation(format!("duplicate subsystem id {}", s.id)));
        }
    }

    let plants: BTreeMap<usize, Automaton> = doc
        .subsystems
        .iter()
        .map(|s| Ok((s.id, s.plant.to_automaton()?.accessible())))
        .collect::<Result<_>>()?;

    // shared-event discipline: an event may never be uncontrollable in one
    // subsystem and controllable in another
    let subs: Vec<&SubsystemDoc> = doc.subsystems.iter().collect();
    for (n, a) in subs.iter().enumerate() {
        for b in subs.iter().skip(n + 1) {
            let pa = &plants[&a.id];
            let pb = &plants[&b.id];
            for e in pa.alphabet().ids() {
                let name = pa.alphabet().name(e);
                if let Some(f) = pb.alphabet().id(name) {
                    if pa.alphabet().is_controllable(e) != pb.alphabet().is_controllable(f) {
                        return Err(Error::Validation(format!(
                            "shared event `{name}` is controllable in subsystem {} but \
                             uncontrollable in subsystem {}: the shared-event discipline \
                             forbids this",
                            if pa.alphabet().is_controllable(e) { a.id } else { b.id },
                            if pa.alphabet().is_controllable(e) { b.id } else { a.id },
                        )));
                    }
                }
            }
        }
    }

    // reserve every declared event name scenario-wide before minting
    // derived fault events
    let mut reserved: BTreeSet<String> = BTreeSet::new();
    for p in plants.values() {
        reserved.extend(p.alphabet().names().map(|s| s.to_string()));
    }

    let mut warnings = Vec::new();
    let mut subsystems = Vec::new();
    for s in &doc.subsystems {
        let plant = plants[&s.id].clone();
        let safety = align(&s.safety.to_automaton()?, &plant, "safety", s.id)?;
        let local_spec = align(&s.local_spec.to_automaton()?, &plant, "local_spec", s.id)?;
        if !sub_language(&safety, &plant)? {
            return Err(Error::Validation(format!(
                "subsystem {}: the safety language exceeds the plant language",
                s.id
            )));
        }
        let config = FaultConfig::derive(s.id, plant.alphabet(), &s.actuators, &s.sensors, &reserved)?;
        reserved.extend(config.derived_names());
        warnings.extend(config.warnings().iter().cloned());
        let nominal = match &s.nominal_supervisor {
            Some(d) => {
                let a = d.to_automaton()?;
                if !a.alphabet().same_events(plant.alphabet()) {
                    return Err(Error::Validation(format!(
                        "subsystem {}: the nominal supervisor must range over the plant events",
                        s.id
                    )));
                }
                Supervisor::from_automaton(a.with_alphabet(plant.alphabet().clone())?)
            }
            None => {
                let spec = local_spec.compose(&safety)?.compose(&plant)?;
                let uc = plant.alphabet().uncontrollable_names();
                let obs = plant.alphabet().observable_names();
                match synthesis::supremal_supervisor(&plant, &spec, &uc, &obs)? {
                    Some(result) => result.supervisor,
                    None => {
                        return Err(Error::Validation(format!(
                            "subsystem {}: no nominal supervisor exists for the local \
                             specification",
                            s.id
                        )))
                    }
                }
            }
        };
        // closed loop within the safety language
        let closed = synthesis::closed_loop(&nominal, &plant)?;
        if let Verdict::Violated { witness } = closed.satisfies(&safety)? {
            return Err(Error::Validation(format!(
                "subsystem {}: the nominal closed loop leaves the safety language \
                 (witness `{witness}`)",
                s.id
            )));
        }
        subsystems.push(Subsystem {
            id: s.id,
            plant,
            safety,
            local_spec,
            nominal,
            config,
        });
    }

    // the global specification must range over declared events
    let global_table = global_alphabet(&subsystems)?;
    let spec_raw = doc.global_spec.to_automaton()?;
    for name in spec_raw.alphabet().names() {
        if !global_table.contains(name) {
            return Err(Error::Validation(format!(
                "global specification event `{name}` is not declared by any subsystem"
            )));
        }
    }
    let keep: BTreeSet<String> = spec_raw.alphabet().names().map(|s| s.to_string()).collect();
    let global_spec = spec_raw.with_alphabet(global_table.restrict(&keep)?)?;

    let mut script = Vec::new();
    for f in &doc.fault_script {
        let kind = match f.kind.as_str() {
            "actuator" => FaultKind::Actuator,
            "sensor" => FaultKind::Sensor,
            other => {
                return Err(Error::Schema(format!(
                    "fault kind must be `actuator` or `sensor`, got `{other}`"
                )))
            }
        };
        let sub = subsystems
            .iter()
            .find(|s| s.id == f.subsystem)
            .ok_or_else(|| {
                Error::Validation(format!("fault script names unknown subsystem {}", f.subsystem))
            })?;
        let declared = match kind {
            FaultKind::Actuator => sub.config.has_actuator(&f.target),
            FaultKind::Sensor => sub.config.has_sensor(&f.target),
        };
        if !declared {
            return Err(Error::Validation(format!(
                "fault script targets `{}` which subsystem {} does not declare",
                f.target, f.subsystem
            )));
        }
        script.push((
            f.subsystem,
            LocalFault {
                kind,
                target: f.target.clone(),
                after: Trace(f.after.clone()),
            },
        ));
    }

    Ok(Scenario {
        subsystems,
        global_spec,
        script,
        warnings,
    })
}

fn align(a: &Automaton, plant: &Automaton, what: &str, id: usize) -> Result<Automaton> {
    for name in a.alphabet().names() {
        if !plant.alphabet().contains(name) {
            return Err(Error::Validation(format!(
                "subsystem {id}: {what} uses `{name}` which is not a plant event"
            )));
        }
    }
    let keep: BTreeSet<String> = a.alphabet().names().map(|s| s.to_string()).collect();
    a.with_alphabet(plant.alphabet().restrict(&keep)?)
}

/// `L(a) ⊆ L(b)` where `Σ_a ⊆ Σ_b`.
fn sub_language(a: &Automaton, b: &Automaton) -> Result<bool> {
    let mut seen = BTreeSet::new();
    let mut queue = std::collections::VecDeque::from([(a.initial(), b.initial())]);
    seen.insert((a.initial(), b.initial()));
    while let Some((sa, sb)) = queue.pop_front() {
        for (e, na) in a.transitions_from(sa) {
            let eb = b.alphabet().require(a.alphabet().name(e))?;
            match b.step(sb, eb) {
                Some(nb) => {
                    if seen.insert((na, nb)) {
                        queue.push_back((na, nb));
                    }
                }
                None => return Ok(false),
            }
        }
    }
    Ok(true)
}

fn global_alphabet(subsystems: &[Subsystem]) -> Result<Arc<Alphabet>> {
    let mut acc: Option<Arc<Alphabet>> = None;
    for s in subsystems {
        acc = Some(match acc {
            None => s.plant.alphabet().clone(),
            Some(a) => a.union(s.plant.alphabet())?,
        });
    }
    Ok(acc.unwrap())
}

/// Pipeline verdicts, ordered from best to worst.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineVerdict {
    NominalOk,
    Coordinated,
    TolerableOnly,
    Intolerant,
}

impl PipelineVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            PipelineVerdict::NominalOk => "nominal-ok",
            PipelineVerdict::Coordinated => "coordinated",
            PipelineVerdict::TolerableOnly => "tolerable-only",
            PipelineVerdict::Intolerant => "intolerant",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineVerdict::NominalOk | PipelineVerdict::Coordinated => 0,
            PipelineVerdict::TolerableOnly => 2,
            PipelineVerdict::Intolerant => 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SubsystemReport {
    pub role: String,
    pub supervisor: AutomatonDoc,
    pub module: AutomatonDoc,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub detection_supervisors: BTreeMap<String, AutomatonDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FailureReport {
    pub stage: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
}

/// The verification report emitted by the pipeline. Serialisation is
/// deterministic: identical inputs yield byte-identical reports.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Report {
    pub format: String,
    pub verdict: String,
    pub iterations: usize,
    pub counterexamples: Vec<Vec<String>>,
    pub per_subsystem: BTreeMap<String, SubsystemReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureReport>,
}

impl Report {
    pub fn verdict(&self) -> PipelineVerdict {
        match self.verdict.as_str() {
            "nominal-ok" => PipelineVerdict::NominalOk,
            "coordinated" => PipelineVerdict::Coordinated,
            "tolerable-only" => PipelineVerdict::TolerableOnly,
            _ => PipelineVerdict::Intolerant,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

fn failure_report(f: &staging::StageFailure) -> FailureReport {
    FailureReport {
        stage: f.stage.clone(),
        state: f.state.clone(),
        witness: f.witness.as_ref().map(|t| t.0.clone()),
    }
}

/// The staged subsystems and the coordination input they induce.
pub struct PreparedCoordination {
    pub input: CoordinationInput,
    pub staged: BTreeMap<usize, staging::StagedSubsystem>,
}

pub enum Prepared {
    Ready(PreparedCoordination),
    Intolerant {
        subsystem: usize,
        failure: staging::StageFailure,
    },
}

/// Interprets the fault script of every scripted subsystem and assembles
/// the coordination-layer input.
pub fn prepare_coordination(scenario: &Scenario) -> Result<Prepared> {
    let mut grouped: BTreeMap<usize, Vec<LocalFault>> = BTreeMap::new();
    for (id, fault) in &scenario.script {
        grouped.entry(*id).or_default().push(fault.clone());
    }
    let mut staged: BTreeMap<usize, staging::StagedSubsystem> = BTreeMap::new();
    for s in &scenario.subsystems {
        let Some(faults) = grouped.get(&s.id) else { continue };
        match staging::interpret_faults(&s.plant, &s.safety, &s.nominal, &s.config, faults)? {
            StagingVerdict::Staged(outcome) => {
                staged.insert(s.id, *outcome);
            }
            StagingVerdict::Intolerant(failure) => {
                return Ok(Prepared::Intolerant {
                    subsystem: s.id,
                    failure,
                });
            }
        }
    }
    let subsystems = scenario
        .subsystems
        .iter()
        .map(|s| {
            Ok(if let Some(st) = staged.get(&s.id) {
                SubsystemModule {
                    id: s.id,
                    local_alphabet: s.plant.alphabet().clone(),
                    plant: st.staged.clone(),
                    initial_module: st.module.clone(),
                    nominal_supervisor: Some(s.nominal.clone()),
                    fault_config: Some(s.config.clone()),
                }
            } else {
                SubsystemModule {
                    id: s.id,
                    local_alphabet: s.plant.alphabet().clone(),
                    plant: s.plant.clone(),
                    initial_module: synthesis::closed_loop(&s.nominal, &s.plant)?,
                    nominal_supervisor: Some(s.nominal.clone()),
                    fault_config: None,
                }
            })
        })
        .collect::<Result<_>>()?;
    Ok(Prepared::Ready(PreparedCoordination {
        input: CoordinationInput {
            subsystems,
            spec: scenario.global_spec.clone(),
        },
        staged,
    }))
}

/// Runs the full pipeline: nominal verification, stage-by-stage fault
/// interpretation with tolerance checks and post-fault synthesis, then
/// assume-guarantee coordination with counterexample-guided refinement when
/// needed.
pub fn run_pipeline(scenario: &Scenario) -> Result<Report> {
    let mut notes: Vec<String> = scenario.warnings.clone();
    let mut per_subsystem: BTreeMap<String, SubsystemReport> = BTreeMap::new();

    // nominal verification
    let nominal_loops: BTreeMap<usize, Automaton> = scenario
        .subsystems
        .iter()
        .map(|s| Ok((s.id, synthesis::closed_loop(&s.nominal, &s.plant)?)))
        .collect::<Result<_>>()?;
    let loops: Vec<&Automaton> = scenario
        .subsystems
        .iter()
        .map(|s| &nominal_loops[&s.id])
        .collect();
    let composition = coordination::compose_all(&loops)?;
    let direct = composition.satisfies(&scenario.global_spec)?;
    let nominal_input = CoordinationInput {
        subsystems: scenario
            .subsystems
            .iter()
            .map(|s| SubsystemModule {
                id: s.id,
                local_alphabet: s.plant.alphabet().clone(),
                plant: s.plant.clone(),
                initial_module: nominal_loops[&s.id].clone(),
                nominal_supervisor: Some(s.nominal.clone()),
                fault_config: None,
            })
            .collect(),
        spec: scenario.global_spec.clone(),
    };
    let symn = coordination::check_post_fault_coordination(&nominal_input)?;
    notes.push(format!(
        "nominal verification: direct={}, assume-guarantee={}",
        verdict_word(&direct),
        symn_word(&symn),
    ));

    if scenario.script.is_empty() {
        let verdict = if direct.holds() {
            PipelineVerdict::NominalOk
        } else {
            PipelineVerdict::Intolerant
        };
        for s in &scenario.subsystems {
            per_subsystem.insert(
                s.id.to_string(),
                SubsystemReport {
                    role: "nominal".into(),
                    supervisor: AutomatonDoc::from_automaton(s.nominal.realization()),
                    module: AutomatonDoc::from_automaton(&nominal_loops[&s.id]),
                    detection_supervisors: BTreeMap::new(),
                },
            );
        }
        let failure = match direct {
            Verdict::Holds => None,
            Verdict::Violated { witness } => Some(FailureReport {
                stage: "nominal-global".into(),
                state: None,
                witness: Some(witness.0),
            }),
        };
        return Ok(Report {
            format: FORMAT.into(),
            verdict: verdict.as_str().into(),
            iterations: 0,
            counterexamples: Vec::new(),
            per_subsystem,
            notes,
            failure,
        });
    }

    // fault-script interpretation per subsystem
    let prepared = match prepare_coordination(scenario)? {
        Prepared::Ready(p) => p,
        Prepared::Intolerant { subsystem, failure } => {
            for s2 in &scenario.subsystems {
                per_subsystem.insert(
                    s2.id.to_string(),
                    SubsystemReport {
                        role: "nominal".into(),
                        supervisor: AutomatonDoc::from_automaton(s2.nominal.realization()),
                        module: AutomatonDoc::from_automaton(&nominal_loops[&s2.id]),
                        detection_supervisors: BTreeMap::new(),
                    },
                );
            }
            notes.push(format!(
                "subsystem {subsystem}: fault script cannot be tolerated at stage `{}`",
                failure.stage
            ));
            return Ok(Report {
                format: FORMAT.into(),
                verdict: PipelineVerdict::Intolerant.as_str().into(),
                iterations: 0,
                counterexamples: Vec::new(),
                per_subsystem,
                notes,
                failure: Some(failure_report(&failure)),
            });
        }
    };
    let staged = prepared.staged;
    for (id, st) in &staged {
        for n in &st.notes {
            notes.push(format!("subsystem {id}: {} — {}", n.stage, n.detail));
        }
    }
    let input = prepared.input;

    let post_fault = coordination::check_post_fault_coordination(&input)?;
    let mut counterexamples: Vec<Vec<String>> = Vec::new();
    let (verdict, iterations, supervisors, modules) = match post_fault {
        SymnVerdict::Holds => {
            notes.push("post-fault coordination holds without refinement".into());
            let sups: BTreeMap<usize, CoordinationSupervisor> = input
                .subsystems
                .iter()
                .map(|s| {
                    let sup = if s.fault_config.is_some() {
                        CoordinationSupervisor::PostFault
                    } else {
                        CoordinationSupervisor::Nominal(s.nominal_supervisor.clone().unwrap())
                    };
                    (s.id, sup)
                })
                .collect();
            let mods: BTreeMap<usize, Automaton> = input
                .subsystems
                .iter()
                .map(|s| (s.id, s.initial_module.clone()))
                .collect();
            (PipelineVerdict::Coordinated, 0, sups, mods)
        }
        SymnVerdict::Violated { counterexample } => {
            notes.push(format!(
                "post-fault coordination violated (counterexample `{counterexample}`)"
            ));
            counterexamples.push(counterexample.0.clone());
            match coordination::check_coordination_existence(&input)? {
                SymnVerdict::Violated { counterexample } => {
                    notes.push(format!(
                        "no coordination supervisors can exist (witness `{counterexample}`)"
                    ));
                    counterexamples.push(counterexample.0.clone());
                    let sups: BTreeMap<usize, CoordinationSupervisor> = input
                        .subsystems
                        .iter()
                        .map(|s| {
                            let sup = if s.fault_config.is_some() {
                                CoordinationSupervisor::PostFault
                            } else {
                                CoordinationSupervisor::Nominal(
                                    s.nominal_supervisor.clone().unwrap(),
                                )
                            };
                            (s.id, sup)
                        })
                        .collect();
                    let mods: BTreeMap<usize, Automaton> = input
                        .subsystems
                        .iter()
                        .map(|s| (s.id, s.initial_module.clone()))
                        .collect();
                    (PipelineVerdict::TolerableOnly, 0, sups, mods)
                }
                SymnVerdict::Holds => {
                    let result = coordination::syn_co(&input)?;
                    for it in &result.iterations {
                        counterexamples.push(it.counterexample.0.clone());
                    }
                    let verdict = match result.status {
                        SynCoStatus::Coordinated => PipelineVerdict::Coordinated,
                        SynCoStatus::TolerableOnly => PipelineVerdict::TolerableOnly,
                    };
                    notes.push(format!(
                        "coordination refinement finished after {} counterexample(s): {}",
                        result.iterations.len(),
                        verdict.as_str()
                    ));
                    (
                        verdict,
                        result.iterations.len(),
                        result.supervisors,
                        result.modules,
                    )
                }
            }
        }
    };

    for s in &scenario.subsystems {
        let (role, supervisor_doc) = match &supervisors[&s.id] {
            CoordinationSupervisor::Nominal(sup) => {
                ("nominal".to_string(), AutomatonDoc::from_automaton(sup.realization()))
            }
            CoordinationSupervisor::PostFault => {
                let doc = staged
                    .get(&s.id)
                    .and_then(|st| st.actuator_supervisor.as_ref())
                    .map(|sup| AutomatonDoc::from_automaton(sup.realization()))
                    .unwrap_or_else(|| {
                        AutomatonDoc::from_automaton(s.nominal.realization())
                    });
                ("post-fault".to_string(), doc)
            }
            CoordinationSupervisor::Synthesized(sup) => (
                "coordination".to_string(),
                AutomatonDoc::from_automaton(sup.realization()),
            ),
        };
        let detection_supervisors = staged
            .get(&s.id)
            .map(|st| {
                st.sensor_supervisors
                    .iter()
                    .map(|(k, v)| (k.clone(), AutomatonDoc::from_automaton(v.realization())))
                    .collect()
            })
            .unwrap_or_default();
        per_subsystem.insert(
            s.id.to_string(),
            SubsystemReport {
                role,
                supervisor: supervisor_doc,
                module: AutomatonDoc::from_automaton(&modules[&s.id]),
                detection_supervisors,
            },
        );
    }

    Ok(Report {
        format: FORMAT.into(),
        verdict: verdict.as_str().into(),
        iterations,
        counterexamples,
        per_subsystem,
        notes,
        failure: None,
    })
}

fn verdict_word(v: &Verdict) -> &'static str {
    if v.holds() {
        "holds"
    } else {
        "violated"
    }
}

fn symn_word(v: &SymnVerdict) -> &'static str {
    if v.holds() {
        "holds"
    } else {
        "violated"
    }
}

/// The bundled multi-robot scenario file, shipped at
/// `crates/core/fixtures/multirobot.json`.
pub const MULTIROBOT_JSON: &str = include_str!("../fixtures/multirobot.json");
