//! Post-actuator-fault plant models, actuator fault-tolerance tests, the
//! offline safety-supervisor bank and post-fault supervisor extraction.

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::EventDecl;
use crate::automaton::{Automaton, Trace, Verdict};
use crate::error::{Error, Result};
use crate::fault::FaultConfig;
use crate::synthesis::{self, Supervisor};

/// Bank key for the supervisor synthesised with every actuator treated
/// uncontrollable.
pub const BANK_ALL: &str = "ALL";

/// Tolerance verdict: the witness is a shortest purely-uncontrollable
/// continuation escaping the post-fault specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tolerance {
    Tolerant,
    Intolerant { witness: Trace },
}

impl Tolerance {
    pub fn holds(&self) -> bool {
        matches!(self, Tolerance::Tolerant)
    }
}

/// Post-fault plant after losing a single actuator: the suffix of the plant
/// after `t0`, with the actuator moved to the uncontrollable set and the
/// fault event added uncontrollable and observable. Fault bookkeeping stays
/// out of the transition structure.
pub fn post_fault_plant_single(
    g: &Automaton,
    t0: &Trace,
    cfg: &FaultConfig,
    actuator: &str,
) -> Result<Automaton> {
    if !cfg.has_actuator(actuator) {
        return Err(Error::Precondition(format!(
            "`{actuator}` is not a declared actuator"
        )));
    }
    let h = cfg.actuator_fault_event(actuator)?.to_string();
    let suffix = g.suffix(t0)?;
    let flags: BTreeMap<String, bool> = [(actuator.to_string(), false)].into();
    let alphabet = g
        .alphabet()
        .with_flags(&flags, &BTreeMap::new())?
        .with_events(vec![EventDecl::new(&h, false, true)])?;
    suffix.with_alphabet(alphabet)
}

/// Post-fault plant under multiple potential actuator faults in arbitrary
/// order: every declared actuator becomes uncontrollable and the whole
/// mode-switch event set is added uncontrollable and observable.
pub fn post_fault_plant_multi(g: &Automaton, t0: &Trace, cfg: &FaultConfig) -> Result<Automaton> {
    if cfg.actuators().is_empty() {
        return Err(Error::Precondition(
            "multi-fault model needs a non-empty actuator set".into(),
        ));
    }
    let suffix = g.suffix(t0)?;
    let flags: BTreeMap<String, bool> = cfg
        .actuators()
        .iter()
        .map(|a| (a.clone(), false))
        .collect();
    let added: Vec<EventDecl> = cfg
        .mode_switch_events()
        .map(|h| EventDecl::new(h, false, true))
        .collect();
    let alphabet = g
        .alphabet()
        .with_flags(&flags, &BTreeMap::new())?
        .with_events(added)?;
    suffix.with_alphabet(alphabet)
}

/// Post-fault specification `L_safe / t0`.
pub fn post_fault_spec(safe: &Automaton, t0: &Trace) -> Result<Automaton> {
    safe.suffix(t0).map_err(|e| match e {
        Error::TraceNotGenerated(ev, pre) => Error::Precondition(format!(
            "nominal run already unsafe: `{ev}` after `{pre}` leaves the safety language"
        )),
        other => other,
    })
}

/// Necessary-and-sufficient actuator fault-tolerance test: the infimal
/// prefix-closed controllable language (all feasible purely-uncontrollable
/// continuations, per the post-fault partition carried by the plant
/// alphabet) must satisfy the post-fault specification.
pub fn check_actuator_tolerance(plant_f: &Automaton, post_spec: &Automaton) -> Result<Tolerance> {
    // precondition: the post-fault specification is a sublanguage of the
    // post-fault plant
    if !sub_behaviour(post_spec, plant_f)? {
        return Err(Error::NotSublanguage(
            "post-fault specification exceeds the post-fault plant".into(),
        ));
    }
    let uc = plant_f.alphabet().uncontrollable_names();
    let infc = synthesis::inf_c(plant_f, &uc)?;
    match infc.satisfies(post_spec)? {
        Verdict::Holds => Ok(Tolerance::Tolerant),
        Verdict::Violated { witness } => Ok(Tolerance::Intolerant { witness }),
    }
}

/// `L(small) ⊆ L(big)` where the small automaton's alphabet may be a subset
/// of the big one's.
fn sub_behaviour(small: &Automaton, big: &Automaton) -> Result<bool> {
    for n in small.alphabet().names() {
        if !big.alphabet().contains(n) {
            return Err(Error::AlphabetNotContained(n.to_string()));
        }
    }
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut queue = std::collections::VecDeque::from([(small.initial(), big.initial())]);
    seen.insert((small.initial(), big.initial()));
    while let Some((s, b)) = queue.pop_front() {
        for (e, sn) in small.transitions_from(s) {
            let be = big.alphabet().require(small.alphabet().name(e))?;
            match big.step(b, be) {
                Some(bn) => {
                    if seen.insert((sn, bn)) {
                        queue.push_back((sn, bn));
                    }
                }
                None => return Ok(false),
            }
        }
    }
    Ok(true)
}

/// Offline bank of safety supervisors: one supremal supervisor per actuator
/// (that actuator treated uncontrollable) plus the `ALL` entry with every
/// actuator uncontrollable. Degenerate syntheses map to the trivial `{ε}`
/// supervisor.
pub fn safety_bank(
    g: &Automaton,
    safe: &Automaton,
    cfg: &FaultConfig,
) -> Result<BTreeMap<String, Supervisor>> {
    if cfg.has_actuator(BANK_ALL) {
        return Err(Error::NameCollision(BANK_ALL.into()));
    }
    let obs = g.alphabet().observable_names();
    let base_uc = g.alphabet().uncontrollable_names();
    let mut bank = BTreeMap::new();
    let entry = |uc: BTreeSet<String>| -> Result<Supervisor> {
        match synthesis::supremal_supervisor(g, safe, &uc, &obs)? {
            Some(result) => Ok(result.supervisor),
            None => Ok(Supervisor::from_automaton(Automaton::epsilon(
                g.alphabet().clone(),
            ))),
        }
    };
    for m in cfg.actuators() {
        let mut uc = base_uc.clone();
        uc.insert(m.clone());
        bank.insert(m.clone(), entry(uc)?);
    }
    let mut uc_all = base_uc;
    uc_all.extend(cfg.actuators().iter().cloned());
    bank.insert(BANK_ALL.to_string(), entry(uc_all)?);
    Ok(bank)
}

/// Serialises a supervisor bank as a JSON object mapping each actuator
/// name (and `ALL`) to the automaton document of its realization.
pub fn bank_to_json(bank: &BTreeMap<String, Supervisor>) -> String {
    let docs: BTreeMap<&str, crate::json::AutomatonDoc> = bank
        .iter()
        .map(|(k, s)| (k.as_str(), crate::json::AutomatonDoc::from_automaton(s.realization())))
        .collect();
    serde_json::to_string_pretty(&docs).expect("bank serialises")
}

/// Post-fault supervisor: the suffix of the bank supervisor when the fault
/// was detected inside its closed loop, otherwise a fresh supremal
/// synthesis on the post-fault plant against the post-fault specification.
/// Requires tolerance to be established first.
pub fn post_fault_supervisor(
    bank_entry: &Supervisor,
    g: &Automaton,
    plant_f: &Automaton,
    post_spec: &Automaton,
    t0: &Trace,
) -> Result<Supervisor> {
    match check_actuator_tolerance(plant_f, post_spec)? {
        Tolerance::Tolerant => {}
        Tolerance::Intolerant { witness } => {
            return Err(Error::Precondition(format!(
                "post-fault plant is not actuator fault tolerant (witness `{witness}`)"
            )));
        }
    }
    let in_bank_loop = synthesis::closed_loop(bank_entry, g)?.generates(t0);
    if in_bank_loop {
        let suffixed = bank_entry.realization().suffix(t0)?;
        return Ok(Supervisor::from_automaton(
            suffixed.with_alphabet(plant_f.alphabet().clone())?,
        ));
    }
    // fault detected outside the bank supervisor's loop: synthesise offline
    // on the suffix plant instead
    let lifted = post_spec.with_alphabet(plant_f.alphabet().clone())?;
    let spec = lifted.compose(plant_f)?;
    let uc = plant_f.alphabet().uncontrollable_names();
    let obs = plant_f.alphabet().observable_names();
    match synthesis::supremal_supervisor(plant_f, &spec, &uc, &obs)? {
        Some(result) => Ok(result.supervisor),
        None => Err(Error::Precondition(
            "tolerance established but synthesis returned an empty language".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use std::sync::Arc;

    fn fig1() -> (Automaton, FaultConfig) {
        let alpha = Alphabet::from_sets(
            &["eta1", "eta2", "eta3", "eta4"],
            &["eta1", "eta2", "eta3", "eta4"],
            &["eta1", "eta2", "eta3", "eta4"],
        )
        .unwrap();
        let g = Automaton::new(
            alpha.clone(),
            vec!["q0".into(), "q1".into(), "q2".into(), "q3".into()],
            "q0",
            None,
            &[
                ("q0", "eta1", "q1"),
                ("q1", "eta2", "q0"),
                ("q1", "eta3", "q2"),
                ("q2", "eta4", "q3"),
                ("q3", "eta2", "q3"),
            ],
        )
        .unwrap();
        let cfg = FaultConfig::derive(
            1,
            &alpha,
            &["eta1".into(), "eta2".into(), "eta3".into(), "eta4".into()],
            &[],
            &BTreeSet::new(),
        )
        .unwrap();
        (g, cfg)
    }

    fn fig2_expected(alpha: Arc<Alphabet>) -> Automaton {
        Automaton::new(
            alpha,
            vec!["q2".into(), "q3".into()],
            "q2",
            None,
            &[("q2", "eta4", "q3"), ("q3", "eta2", "q3")],
        )
        .unwrap()
    }

    fn t0() -> Trace {
        Trace::from_names(&["eta1", "eta2", "eta1", "eta3"])
    }

    #[test]
    fn single_fault_plant_matches_suffix_with_repartition() {
        let (g, cfg) = fig1();
        let pf = post_fault_plant_single(&g, &t0(), &cfg, "eta2").unwrap();
        assert!(pf
            .isomorphic(&fig2_expected(g.alphabet().clone()).with_alphabet(pf.alphabet().clone()).unwrap())
            .unwrap());
        let alpha = pf.alphabet();
        assert!(!alpha.is_controllable(alpha.id("eta2").unwrap()));
        assert!(alpha.is_controllable(alpha.id("eta4").unwrap()));
        let h = alpha.id("h(1,eta2)").unwrap();
        assert!(!alpha.is_controllable(h));
        assert!(alpha.is_observable(h));
    }

    #[test]
    fn single_fault_with_empty_trace_is_repartitioned_copy() {
        let (g, cfg) = fig1();
        let pf = post_fault_plant_single(&g, &Trace::empty(), &cfg, "eta2").unwrap();
        assert!(pf.language_equal(&g.with_alphabet(pf.alphabet().clone()).unwrap()).unwrap());
    }

    #[test]
    fn multi_fault_plant_moves_all_actuators() {
        let (g, cfg) = fig1();
        let pf = post_fault_plant_multi(&g, &t0(), &cfg).unwrap();
        let alpha = pf.alphabet();
        for a in cfg.actuators() {
            assert!(!alpha.is_controllable(alpha.id(a).unwrap()));
        }
        assert!(alpha.contains("h(1,eta1,eta2)"));
        // language equals the single-fault construction
        let single = post_fault_plant_single(&g, &t0(), &cfg, "eta2").unwrap();
        assert!(pf
            .language_equal(&single.with_alphabet(pf.alphabet().clone()).unwrap())
            .unwrap_or(false)
            || {
                // alphabets differ in derived events; compare the transition
                // structure instead
                pf.isomorphic(&single.with_alphabet(pf.alphabet().clone()).unwrap())
                    .unwrap()
            });
    }

    #[test]
    fn multi_fault_rejects_empty_actuator_set() {
        let (g, _) = fig1();
        let cfg = FaultConfig::derive(1, g.alphabet(), &[], &[], &BTreeSet::new()).unwrap();
        assert!(post_fault_plant_multi(&g, &t0(), &cfg).is_err());
    }

    #[test]
    fn tolerance_holds_when_no_uncontrollable_escape() {
        let (g, cfg) = fig1();
        let pf = post_fault_plant_single(&g, &t0(), &cfg, "eta2").unwrap();
        let spec = post_fault_spec(&g, &t0()).unwrap();
        // safe = L(G): the suffix spec equals the suffix plant language
        let lifted = spec.with_alphabet(pf.alphabet().clone()).unwrap();
        assert!(check_actuator_tolerance(&pf, &lifted).unwrap().holds());
    }

    #[test]
    fn tolerance_fails_with_uncontrollable_escape_witness() {
        // plant: u1 u2 with both uncontrollable post-fault; spec stops at u1
        let alpha = Alphabet::from_sets(&["u1", "u2"], &[], &["u1", "u2"]).unwrap();
        let plant = Automaton::new(
            alpha.clone(),
            vec!["0".into(), "1".into(), "2".into()],
            "0",
            None,
            &[("0", "u1", "1"), ("1", "u2", "2")],
        )
        .unwrap();
        let spec = Automaton::chain(alpha, &Trace::from_names(&["u1"])).unwrap();
        match check_actuator_tolerance(&plant, &spec).unwrap() {
            Tolerance::Intolerant { witness } => {
                assert_eq!(witness, Trace::from_names(&["u1", "u2"]));
            }
            Tolerance::Tolerant => panic!("expected intolerance"),
        }
    }

    #[test]
    fn bank_contains_all_entry_and_preserves_plant_when_safe_is_plant() {
        let (g, cfg) = fig1();
        let bank = safety_bank(&g, &g, &cfg).unwrap();
        assert_eq!(bank.len(), cfg.actuators().len() + 1);
        let all = &bank[BANK_ALL];
        let loop_lang = synthesis::closed_loop(all, &g).unwrap();
        assert!(loop_lang.language_equal(&g).unwrap());
    }

    #[test]
    fn post_fault_supervisor_via_bank_suffix() {
        let (g, cfg) = fig1();
        let bank = safety_bank(&g, &g, &cfg).unwrap();
        let pf = post_fault_plant_multi(&g, &t0(), &cfg).unwrap();
        let spec = post_fault_spec(&g, &t0())
            .unwrap()
            .with_alphabet(pf.alphabet().clone())
            .unwrap();
        let sup = post_fault_supervisor(&bank[BANK_ALL], &g, &pf, &spec, &t0()).unwrap();
        let cl = synthesis::closed_loop(&sup, &pf).unwrap();
        assert!(cl.language_subset(&spec).unwrap());
        assert!(cl.language_equal(&spec).unwrap());
    }

    #[test]
    fn post_fault_supervisor_fresh_synthesis_path() {
        // bank supervisor disables eta3, so t0 ending in eta3 falls outside
        // its loop and the fresh synthesis path runs
        let (g, cfg) = fig1();
        let restrictive = Supervisor::from_automaton(
            Automaton::new(
                g.alphabet().clone(),
                vec!["x".into(), "y".into()],
                "x",
                None,
                &[("x", "eta1", "y"), ("y", "eta2", "x")],
            )
            .unwrap(),
        );
        let pf = post_fault_plant_multi(&g, &t0(), &cfg).unwrap();
        let spec = post_fault_spec(&g, &t0())
            .unwrap()
            .with_alphabet(pf.alphabet().clone())
            .unwrap();
        let sup = post_fault_supervisor(&restrictive, &g, &pf, &spec, &t0()).unwrap();
        let cl = synthesis::closed_loop(&sup, &pf).unwrap();
        assert!(cl.language_subset(&spec).unwrap());
    }

    #[test]
    fn post_fault_spec_rejects_unsafe_nominal_run() {
        let (g, _) = fig1();
        let safe = Automaton::chain(g.alphabet().clone(), &Trace::from_names(&["eta1"])).unwrap();
        assert!(matches!(
            post_fault_spec(&safe, &t0()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn bank_serialises_as_a_name_to_document_map() {
        let (g, cfg) = fig1();
        let bank = safety_bank(&g, &g, &cfg).unwrap();
        let json = bank_to_json(&bank);
        let parsed: std::collections::BTreeMap<String, crate::json::AutomatonDoc> =
            serde_json::from_str(&json).unwrap();
        assert!(parsed.contains_key("ALL"));
        assert!(parsed.contains_key("eta2"));
        assert!(parsed["eta2"].to_automaton().is_ok());
    }
}

