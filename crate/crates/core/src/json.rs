//! The shared automaton JSON document. Unknown keys are rejected.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, EventDecl};
use crate::automaton::Automaton;
use crate::error::{Error, Result};

pub const FORMAT: &str = "descc/1";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct EventDoc {
    pub name: String,
    pub controllable: bool,
    pub observable: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub owners: Vec<usize>,
}

/// Wire format for a single automaton: `alphabet`, `states`, `initial`,
/// `marked` (optional; absent means marking is not considered) and
/// `transitions` as `[src, event, dst]` triples. A standalone file may carry
/// the `format` tag; embedded documents omit it.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct AutomatonDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    pub alphabet: Vec<EventDoc>,
    pub states: Vec<String>,
    pub initial: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marked: Option<Vec<String>>,
    pub transitions: Vec<(String, String, String)>,
}

impl AutomatonDoc {
    pub fn to_automaton(&self) -> Result<Automaton> {
        if let Some(f) = &self.format {
            if f != FORMAT {
                return Err(Error::Schema(format!(
                    "unsupported format `{f}`, expected `{FORMAT}`"
                )));
            }
        }
        let alphabet = Alphabet::new(
            self.alphabet
                .iter()
                .map(|e| EventDecl {
                    name: e.name.clone(),
                    controllable: e.controllable,
                    observable: e.observable,
                    owners: e.owners.iter().copied().collect(),
                })
                .collect(),
        )?;
        let triples: Vec<(&str, &str, &str)> = self
            .transitions
            .iter()
            .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
            .collect();
        Automaton::new(
            alphabet,
            self.states.clone(),
            &self.initial,
            self.marked.clone(),
            &triples,
        )
    }

    pub fn from_automaton(a: &Automaton) -> AutomatonDoc {
        let alphabet = a
            .alphabet()
            .decls()
            .into_iter()
            .map(|d| EventDoc {
                name: d.name,
                controllable: d.controllable,
                observable: d.observable,
                owners: d.owners.into_iter().collect(),
            })
            .collect();
        let marked = a.marked_states().map(|set: &BTreeSet<usize>| {
            set.iter().map(|&s| a.state_name(s).to_string()).collect()
        });
        AutomatonDoc {
            format: None,
            alphabet,
            states: a.state_names().map(|s| s.to_string()).collect(),
            initial: a.state_name(a.initial()).to_string(),
            marked,
            transitions: a.transition_triples(),
        }
    }

    pub fn tagged(mut self) -> AutomatonDoc {
        self.format = Some(FORMAT.to_string());
        self
    }
}

pub fn parse_automaton(json: &str) -> Result<Automaton> {
    let doc: AutomatonDoc =
        serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))?;
    doc.to_automaton()
}

pub fn automaton_to_json(a: &Automaton) -> String {
    serde_json::to_string_pretty(&AutomatonDoc::from_automaton(a).tagged())
        .expect("automaton doc serialises")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Trace;

    const DOC: &str = r#"{
        "alphabet": [
            {"name": "a", "controllable": true, "observable": true},
            {"name": "b", "controllable": false, "observable": true, "owners": [1]}
        ],
        "states": ["p", "q"],
        "initial": "p",
        "marked": ["q"],
        "transitions": [["p", "a", "q"], ["q", "b", "q"]]
    }"#;

    #[test]
    fn round_trip() {
        let a = parse_automaton(DOC).unwrap();
        assert!(a.generates(&Trace::from_names(&["a", "b", "b"])));
        assert!(a.marks(&Trace::from_names(&["a"])));
        assert!(!a.marks(&Trace::empty()));
        let json = automaton_to_json(&a);
        let b = parse_automaton(&json).unwrap();
        assert!(a.isomorphic(&b).unwrap());
        assert_eq!(a.alphabet().owners(a.alphabet().id("b").unwrap()).len(), 1);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = DOC.replace("\"initial\"", "\"extra\": 1, \"initial\"");
        assert!(matches!(parse_automaton(&bad), Err(Error::Schema(_))));
    }

    #[test]
    fn bad_format_tag_rejected() {
        let bad = DOC.replace("{\n", "{\"format\": \"descc/9\",\n");
        assert!(matches!(parse_automaton(&bad), Err(Error::Schema(_))));
    }

    #[test]
    fn undeclared_event_rejected() {
        let bad = DOC.replace("[\"q\", \"b\", \"q\"]", "[\"q\", \"z\", \"q\"]");
        assert!(matches!(parse_automaton(&bad), Err(Error::UnknownEvent(_))));
    }
}
