//! Bundled example systems: small demonstration machines used across the
//! test suites plus the multi-robot coordination scenario.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::alphabet::Alphabet;
use crate::automaton::Automaton;
use crate::fault::FaultConfig;
use crate::synthesis::Supervisor;

/// Four-state cyclic machine with four actuator events.
pub mod actuator_demo {
    use super::*;

    pub fn alphabet() -> Arc<Alphabet> {
        Alphabet::from_sets(
            &["eta1", "eta2", "eta3", "eta4"],
            &["eta1", "eta2", "eta3", "eta4"],
            &["eta1", "eta2", "eta3", "eta4"],
        )
        .unwrap()
    }

    pub fn plant() -> Automaton {
        Automaton::new(
            alphabet(),
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
        .unwrap()
    }

    /// Expected post-fault suffix after `eta1 eta2 eta1 eta3`.
    pub fn post_fault_suffix() -> Automaton {
        Automaton::new(
            alphabet(),
            vec!["q2".into(), "q3".into()],
            "q2",
            None,
            &[("q2", "eta4", "q3"), ("q3", "eta2", "q3")],
        )
        .unwrap()
    }

    pub fn config() -> FaultConfig {
        FaultConfig::derive(
            1,
            &alphabet(),
            &["eta1".into(), "eta2".into(), "eta3".into(), "eta4".into()],
            &[],
            &BTreeSet::new(),
        )
        .unwrap()
    }
}

/// Five-state machine over {a, b, c} with the suspicious reading `b` and
/// the safety language `closure{ab, ac}`; the classic case in which a lost
/// reading lets the closed loop slip into unsafety undetected.
pub mod sensor_demo {
    use super::*;

    pub fn alphabet() -> Arc<Alphabet> {
        Alphabet::from_sets(&["a", "b", "c"], &["a", "c"], &["a", "b", "c"]).unwrap()
    }

    pub fn plant() -> Automaton {
        Automaton::new(
            alphabet(),
            vec!["1".into(), "2".into(), "3".into(), "4".into(), "5".into()],
            "1",
            None,
            &[
                ("1", "a", "2"),
                ("2", "b", "4"),
                ("2", "c", "3"),
                ("4", "c", "5"),
            ],
        )
        .unwrap()
    }

    /// Safety automaton for `closure{ab, ac}`.
    pub fn safety() -> Automaton {
        Automaton::new(
            alphabet(),
            vec!["1".into(), "2".into(), "3".into(), "4".into()],
            "1",
            None,
            &[("1", "a", "2"), ("2", "b", "4"), ("2", "c", "3")],
        )
        .unwrap()
    }

    /// Nominal supervisor enforcing the safety language.
    pub fn supervisor() -> Supervisor {
        Supervisor::from_automaton(safety())
    }

    pub fn config() -> FaultConfig {
        FaultConfig::derive(1, &alphabet(), &[], &["b".into()], &BTreeSet::new()).unwrap()
    }
}

/// Variant of the sensor demo in which the fault is detected one observable
/// step before a controllable-only path to unsafety: SF-safe and sensor
/// fault tolerant.
pub mod sensor_guard_demo {
    use super::*;

    pub fn alphabet() -> Arc<Alphabet> {
        Alphabet::from_sets(
            &["a", "b", "c", "e"],
            &["a", "c"],
            &["a", "b", "c", "e"],
        )
        .unwrap()
    }

    pub fn plant() -> Automaton {
        Automaton::new(
            alphabet(),
            vec![
                "1".into(),
                "2".into(),
                "3".into(),
                "4".into(),
                "5".into(),
                "6".into(),
            ],
            "1",
            None,
            &[
                ("1", "a", "2"),
                ("2", "b", "3"),
                ("2", "c", "6"),
                ("3", "e", "4"),
                ("4", "c", "5"),
            ],
        )
        .unwrap()
    }

    /// Safety language `closure{abe, ac}`: the `c` after `abe` is unsafe.
    pub fn safety() -> Automaton {
        Automaton::new(
            alphabet(),
            vec!["1".into(), "2".into(), "3".into(), "4".into(), "6".into()],
            "1",
            None,
            &[
                ("1", "a", "2"),
                ("2", "b", "3"),
                ("2", "c", "6"),
                ("3", "e", "4"),
            ],
        )
        .unwrap()
    }

    pub fn supervisor() -> Supervisor {
        Supervisor::from_automaton(safety())
    }

    pub fn config() -> FaultConfig {
        FaultConfig::derive(1, &alphabet(), &[], &["b".into()], &BTreeSet::new()).unwrap()
    }
}

/// Three mobile robots sharing a heavy two-way door that must be opened by
/// one robot on each side. Robot 2 services a service request behind a
/// one-way door and returns through the heavy door. Plants are authored as
/// trees (routes do not re-join), which keeps refinement cuts structural.
pub mod multi_robot {
    use super::*;
    use crate::alphabet::EventDecl;

    /// Local event set of robot 1 or 3 with controllability per the
    /// actuator list; everything is observable in the nominal mode.
    pub fn door_robot_alphabet(i: usize) -> Arc<Alphabet> {
        assert!(i == 1 || i == 3);
        let decls = vec![
            EventDecl::new(&format!("h{i}"), false, true).owned_by(&[i]),
            EventDecl::new(&format!("G{i}toD1"), true, true).owned_by(&[i]),
            EventDecl::new(&format!("G{i}onD1"), true, true).owned_by(&[i]),
            EventDecl::new("OP", true, true).owned_by(&[1, 3]),
            EventDecl::new("CL", true, true).owned_by(&[1, 3]),
            EventDecl::new("G2in1", false, true).owned_by(&[1, 2, 3]),
            EventDecl::new(&format!("G{i}to3"), true, true).owned_by(&[i]),
            EventDecl::new(&format!("G{i}in3"), false, true).owned_by(&[i]),
            EventDecl::new("D1closed", false, true).owned_by(&[1, 3]),
            EventDecl::new("D1open", false, true).owned_by(&[1, 2, 3]),
            EventDecl::new(&format!("G{i}to1"), true, true).owned_by(&[i]),
            EventDecl::new(&format!("G{i}in1"), false, true).owned_by(&[i]),
            EventDecl::new("r", true, true).owned_by(&[1, 2, 3]),
        ];
        Alphabet::new(decls).unwrap()
    }

    pub fn service_robot_alphabet() -> Arc<Alphabet> {
        let decls = vec![
            EventDecl::new("h2", false, true).owned_by(&[2]),
            EventDecl::new("G2to2", true, true).owned_by(&[2]),
            EventDecl::new("G2in2", false, true).owned_by(&[2]),
            EventDecl::new("D1open", false, true).owned_by(&[1, 2, 3]),
            EventDecl::new("G2to1", true, true).owned_by(&[2]),
            EventDecl::new("G2in1", false, true).owned_by(&[1, 2, 3]),
            EventDecl::new("r", true, true).owned_by(&[1, 2, 3]),
        ];
        Alphabet::new(decls).unwrap()
    }

    /// Robot 1/3 plant: after the request the robot either approaches the
    /// door directly or enters Room 3 first and approaches it from the
    /// other side; either way it participates in the open/close protocol
    /// and returns.
    pub fn door_robot_plant(i: usize) -> Automaton {
        let a = door_robot_alphabet(i);
        let chain = |prefix: &str, from: &str| -> Vec<(String, String, String)> {
            let hops = [
                format!("G{i}onD1"),
                "OP".to_string(),
                "D1open".to_string(),
                "G2in1".to_string(),
                "CL".to_string(),
                "D1closed".to_string(),
                format!("G{i}to1"),
                format!("G{i}in1"),
                "r".to_string(),
            ];
            let mut out = Vec::new();
            let mut cur = from.to_string();
            for (n, ev) in hops.iter().enumerate() {
                let next = format!("{prefix}{}", n + 1);
                out.push((cur.clone(), ev.clone(), next.clone()));
                cur = next;
            }
            out
        };
        let mut triples: Vec<(String, String, String)> = vec![
            ("r0".into(), format!("h{i}"), "r1".into()),
            ("r1".into(), format!("G{i}toD1"), "d0".into()),
            ("r1".into(), format!("G{i}to3"), "v0".into()),
            ("v0".into(), format!("G{i}in3"), "v1".into()),
            ("v1".into(), format!("G{i}toD1"), "w0".into()),
        ];
        triples.extend(chain("d", "d0"));
        triples.extend(chain("w", "w0"));
        let mut states: Vec<String> = vec!["r0".into(), "r1".into(), "v0".into(), "v1".into()];
        states.push("d0".into());
        states.extend((1..=9).map(|n| format!("d{n}")));
        states.push("w0".into());
        states.extend((1..=9).map(|n| format!("w{n}")));
        let refs: Vec<(&str, &str, &str)> = triples
            .iter()
            .map(|(x, y, z)| (x.as_str(), y.as_str(), z.as_str()))
            .collect();
        Automaton::new(a, states, "r0", None, &refs).unwrap()
    }

    /// Robot 2 plant: both service routes (door opened after or before the
    /// excursion into Room 2).
    pub fn service_robot_plant() -> Automaton {
        let a = service_robot_alphabet();
        Automaton::new(
            a,
            vec![
                "s0".into(),
                "s1".into(),
                "a1".into(),
                "a2".into(),
                "a3".into(),
                "a4".into(),
                "a5".into(),
                "a6".into(),
                "b1".into(),
                "b2".into(),
                "b3".into(),
                "b4".into(),
                "b5".into(),
                "b6".into(),
            ],
            "s0",
            None,
            &[
                ("s0", "h2", "s1"),
                ("s1", "G2to2", "a1"),
                ("a1", "G2in2", "a2"),
                ("a2", "D1open", "a3"),
                ("a3", "G2to1", "a4"),
                ("a4", "G2in1", "a5"),
                ("a5", "r", "a6"),
                ("s1", "D1open", "b1"),
                ("b1", "G2to2", "b2"),
                ("b2", "G2in2", "b3"),
                ("b3", "G2to1", "b4"),
                ("b4", "G2in1", "b5"),
                ("b5", "r", "b6"),
            ],
        )
        .unwrap()
    }

    fn chain_automaton(alphabet: Arc<Alphabet>, events: &[String]) -> Automaton {
        let trace = crate::automaton::Trace(events.to_vec());
        Automaton::chain(alphabet, &trace).unwrap()
    }

    /// Nominal supervisor of robot 1: go straight to the door and hold it.
    pub fn supervisor1() -> Supervisor {
        let events: Vec<String> = [
            "h1", "G1toD1", "G1onD1", "OP", "D1open", "G2in1", "CL", "D1closed", "G1to1",
            "G1in1", "r",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        Supervisor::from_automaton(chain_automaton(door_robot_alphabet(1), &events))
    }

    /// Nominal supervisor of robot 2: service Room 2 first, return once the
    /// heavy door is open.
    pub fn supervisor2() -> Supervisor {
        let events: Vec<String> = ["h2", "G2to2", "G2in2", "D1open", "G2to1", "G2in1", "r"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        Supervisor::from_automaton(chain_automaton(service_robot_alphabet(), &events))
    }

    /// Nominal supervisor of robot 3: enter Room 3 and open the door from
    /// the far side.
    pub fn supervisor3() -> Supervisor {
        let events: Vec<String> = [
            "h3", "G3to3", "G3in3", "G3toD1", "G3onD1", "OP", "D1open", "G2in1", "CL",
            "D1closed", "G3to1", "G3in1", "r",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        Supervisor::from_automaton(chain_automaton(door_robot_alphabet(3), &events))
    }

    /// Global specification: the open command requires somebody in Room 3
    /// first (one robot on each side of the heavy door), the door then
    /// opens, robot 2 services Room 2 before coming back through, the door
    /// is commanded shut and closes after robot 2 is back, and the mission
    /// ends with the joint return.
    pub fn global_spec() -> Automaton {
        let decls = vec![
            EventDecl::new("G1in3", false, true).owned_by(&[1]),
            EventDecl::new("G3in3", false, true).owned_by(&[3]),
            EventDecl::new("OP", true, true).owned_by(&[1, 3]),
            EventDecl::new("CL", true, true).owned_by(&[1, 3]),
            EventDecl::new("D1open", false, true).owned_by(&[1, 2, 3]),
            EventDecl::new("G2in2", false, true).owned_by(&[2]),
            EventDecl::new("G2in1", false, true).owned_by(&[1, 2, 3]),
            EventDecl::new("D1closed", false, true).owned_by(&[1, 3]),
            EventDecl::new("r", true, true).owned_by(&[1, 2, 3]),
        ];
        let alphabet = Alphabet::new(decls).unwrap();
        let in3 = |s: &str, d: &str| -> Vec<(String, String, String)> {
            vec![
                (s.to_string(), "G1in3".to_string(), d.to_string()),
                (s.to_string(), "G3in3".to_string(), d.to_string()),
            ]
        };
        // phases: nothing → someone in Room 3 (required before OP) → open
        // command → door open → robot 2 back (serviced) → close command →
        // door closed → joint return; Room-2 service may happen any time
        // before robot 2 returns.
        let mut triples: Vec<(String, String, String)> = Vec::new();
        let service_free = |n: &str, tgt: &str| (n.to_string(), "G2in2".to_string(), tgt.to_string());
        // n0: nothing; n1: in3; n2: serviced; n3: in3+serviced
        triples.extend(in3("n0", "n1"));
        triples.push(service_free("n0", "n2"));
        triples.extend(in3("n1", "n1"));
        triples.push(service_free("n1", "n3"));
        triples.push(("n1".into(), "OP".into(), "n4".into()));
        triples.extend(in3("n2", "n3"));
        triples.push(service_free("n2", "n2"));
        triples.extend(in3("n3", "n3"));
        triples.push(service_free("n3", "n3"));
        triples.push(("n3".into(), "OP".into(), "n5".into()));
        // n4: commanded (unserviced); n5: commanded+serviced
        triples.extend(in3("n4", "n4"));
        triples.push(service_free("n4", "n5"));
        triples.push(("n4".into(), "D1open".into(), "n6".into()));
        triples.extend(in3("n5", "n5"));
        triples.push(service_free("n5", "n5"));
        triples.push(("n5".into(), "D1open".into(), "n7".into()));
        // n6: open (unserviced); n7: open+serviced
        triples.extend(in3("n6", "n6"));
        triples.push(service_free("n6", "n7"));
        triples.extend(in3("n7", "n7"));
        triples.push(service_free("n7", "n7"));
        triples.push(("n7".into(), "G2in1".into(), "n8".into()));
        // n8: robot 2 back; n9: close commanded; n10: closed; n11: done
        triples.extend(in3("n8", "n8"));
        triples.push(("n8".into(), "CL".into(), "n9".into()));
        triples.extend(in3("n9", "n9"));
        triples.push(("n9".into(), "D1closed".into(), "n10".into()));
        triples.extend(in3("n10", "n10"));
        triples.push(("n10".into(), "r".into(), "n11".into()));
        let refs: Vec<(&str, &str, &str)> = triples
            .iter()
            .map(|(x, y, z)| (x.as_str(), y.as_str(), z.as_str()))
            .collect();
        Automaton::new(
            alphabet,
            (0..=11).map(|n| format!("n{n}")).collect(),
            "n0",
            None,
            &refs,
        )
        .unwrap()
    }

    /// Actuator set of robots 1 and 3.
    pub fn door_robot_actuators(i: usize) -> Vec<String> {
        vec![
            format!("G{i}toD1"),
            format!("G{i}onD1"),
            "OP".into(),
            "CL".into(),
            format!("G{i}to3"),
            format!("G{i}to1"),
            "r".into(),
        ]
    }

    pub fn service_robot_actuators() -> Vec<String> {
        vec!["G2to2".into(), "G2to1".into(), "r".into()]
    }

    pub fn door_robot_sensors(i: usize) -> Vec<String> {
        vec![
            format!("h{i}"),
            "G2in1".into(),
            format!("G{i}in3"),
            format!("G{i}in1"),
        ]
    }

    pub fn service_robot_sensors() -> Vec<String> {
        vec!["h2".into(), "G2in2".into(), "D1open".into(), "G2in1".into()]
    }

    /// The bundled scenario document: three robots, safety equal to each
    /// plant language, the mission specification, and the headline fault
    /// script (robot 3 loses its door-approach actuator right after the
    /// request).
    pub fn scenario_doc() -> crate::scenario::ScenarioDoc {
        use crate::json::AutomatonDoc;
        use crate::scenario::{FaultEventDoc, ScenarioDoc, SubsystemDoc};
        let robot = |i: usize| -> SubsystemDoc {
            let (plant, supervisor, actuators, sensors) = if i == 2 {
                (
                    service_robot_plant(),
                    supervisor2(),
                    service_robot_actuators(),
                    service_robot_sensors(),
                )
            } else {
                let sup = if i == 1 { supervisor1() } else { supervisor3() };
                (
                    door_robot_plant(i),
                    sup,
                    door_robot_actuators(i),
                    door_robot_sensors(i),
                )
            };
            SubsystemDoc {
                id: i,
                plant: AutomatonDoc::from_automaton(&plant),
                safety: AutomatonDoc::from_automaton(&plant),
                local_spec: AutomatonDoc::from_automaton(supervisor.realization()),
                nominal_supervisor: Some(AutomatonDoc::from_automaton(supervisor.realization())),
                actuators,
                sensors,
            }
        };
        ScenarioDoc {
            format: crate::json::FORMAT.to_string(),
            subsystems: vec![robot(1), robot(2), robot(3)],
            global_spec: AutomatonDoc::from_automaton(&global_spec()),
            fault_script: vec![FaultEventDoc {
                kind: "actuator".into(),
                subsystem: 3,
                target: "G3toD1".into(),
                after: vec!["h3".into()],
            }],
        }
    }

    pub fn scenario_json() -> String {
        serde_json::to_string_pretty(&scenario_doc()).expect("scenario serialises")
    }

    /// The trace of the expected post-fault supervisor for robot 3 after
    /// losing controllability of its door-approach actuator.
    pub fn expected_post_fault_trace() -> crate::automaton::Trace {
        crate::automaton::Trace::from_names(&[
            "G3toD1", "G3onD1", "OP", "D1open", "G2in1", "CL", "D1closed", "G3to1", "G3in1",
            "r",
        ])
    }

    /// The trace of the expected coordination supervisor for robot 1: take
    /// the Room 3 side of the door instead of the direct approach.
    pub fn expected_coordination_trace() -> crate::automaton::Trace {
        crate::automaton::Trace::from_names(&[
            "h1", "G1to3", "G1in3", "G1toD1", "G1onD1", "OP", "D1open", "G2in1", "CL",
            "D1closed", "G1to1", "G1in1", "r",
        ])
    }
}
