//! Actuator/sensor fault declarations and the derived fault-event universe.

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};

/// Per-subsystem fault configuration: the vulnerable actuator set, the
/// suspicious sensor-reading set, and the derived event names (actuator
/// fault events, mode-switch events, sensor fault events, faulty readings).
/// Derived names are minted at construction and guaranteed fresh.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultConfig {
    subsystem: usize,
    actuators: Vec<String>,
    sensors: Vec<String>,
    actuator_fault: BTreeMap<String, String>,
    mode_switch: BTreeMap<(String, String), String>,
    sensor_fault: BTreeMap<String, String>,
    faulty_reading: BTreeMap<String, String>,
    warnings: Vec<String>,
}

impl FaultConfig {
    /// Validates the actuator/sensor membership constraints against the
    /// subsystem alphabet and mints the derived event names. `reserved`
    /// holds every event name already in use scenario-wide; minted names
    /// must avoid it as well as the alphabet itself.
    pub fn derive(
        subsystem: usize,
        alphabet: &Alphabet,
        actuators: &[String],
        sensors: &[String],
        reserved: &BTreeSet<String>,
    ) -> Result<FaultConfig> {
        let mut warnings = Vec::new();
        for a in actuators {
            let id = alphabet
                .id(a)
                .ok_or_else(|| Error::Validation(format!("actuator `{a}` is not a local event")))?;
            if !alphabet.is_controllable(id) || !alphabet.is_observable(id) {
                return Err(Error::Validation(format!(
                    "actuator `{a}` must be locally controllable and observable"
                )));
            }
            let owners = alphabet.owners(id);
            if !owners.is_empty() && owners.iter().any(|&o| o != subsystem) {
                warnings.push(format!(
                    "actuator `{a}` of subsystem {subsystem} is shared with other subsystems"
                ));
            }
        }
        for s in sensors {
            let id = alphabet
                .id(s)
                .ok_or_else(|| Error::Validation(format!("sensor `{s}` is not a local event")))?;
            if alphabet.is_controllable(id) || !alphabet.is_observable(id) {
                return Err(Error::Validation(format!(
                    "sensor reading `{s}` must be locally observable and uncontrollable"
                )));
            }
        }
        let mut taken: BTreeSet<String> = reserved.clone();
        taken.extend(alphabet.names().map(|n| n.to_string()));
        let mut mint = |preferred: String, fallback: String| -> Result<String> {
            if taken.insert(preferred.clone()) {
                return Ok(preferred);
            }
            if taken.insert(fallback.clone()) {
                return Ok(fallback);
            }
            Err(Error::NameCollision(fallback))
        };
        let mut actuator_fault = BTreeMap::new();
        let mut mode_switch = BTreeMap::new();
        for a in actuators {
            let name = mint(
                format!("h({subsystem},{a})"),
                format!("h({subsystem},{a})'"),
            )?;
            actuator_fault.insert(a.clone(), name.clone());
            mode_switch.insert(("0".to_string(), a.clone()), name);
        }
        for m1 in actuators {
            for m2 in actuators {
                if m1 == m2 {
                    continue;
                }
                let name = mint(
                    format!("h({subsystem},{m1},{m2})"),
                    format!("h({subsystem},{m1},{m2})'"),
                )?;
                mode_switch.insert((m1.clone(), m2.clone()), name);
            }
        }
        let mut sensor_fault = BTreeMap::new();
        let mut faulty_reading = BTreeMap::new();
        for s in sensors {
            let f = mint(format!("f_{s}"), format!("f_{s}@{subsystem}"))?;
            let r = mint(format!("{s}^f"), format!("{s}^f@{subsystem}"))?;
            sensor_fault.insert(s.clone(), f);
            faulty_reading.insert(s.clone(), r);
        }
        Ok(FaultConfig {
            subsystem,
            actuators: actuators.to_vec(),
            sensors: sensors.to_vec(),
            actuator_fault,
            mode_switch,
            sensor_fault,
            faulty_reading,
            warnings,
        })
    }

    pub fn subsystem(&self) -> usize {
        self.subsystem
    }

    pub fn actuators(&self) -> &[String] {
        &self.actuators
    }

    pub fn sensors(&self) -> &[String] {
        &self.sensors
    }

    pub fn has_actuator(&self, name: &str) -> bool {
        self.actuators.iter().any(|a| a == name)
    }

    pub fn has_sensor(&self, name: &str) -> bool {
        self.sensors.iter().any(|s| s == name)
    }

    /// Fault event `h` announcing loss of the given actuator from the
    /// nominal mode.
    pub fn actuator_fault_event(&self, actuator: &str) -> Result<&str> {
        self.actuator_fault
            .get(actuator)
            .map(|s| s.as_str())
            .ok_or_else(|| Error::Validation(format!("`{actuator}` is not a declared actuator")))
    }

    /// Mode-switch event for losing `m2` while in mode `m1` (`"0"` is the
    /// nominal mode).
    pub fn mode_switch_event(&self, m1: &str, m2: &str) -> Result<&str> {
        self.mode_switch
            .get(&(m1.to_string(), m2.to_string()))
            .map(|s| s.as_str())
            .ok_or_else(|| {
                Error::Validation(format!("no mode switch from `{m1}` to `{m2}` declared"))
            })
    }

    pub fn mode_switch_events(&self) -> impl Iterator<Item = &str> {
        self.mode_switch.values().map(|s| s.as_str())
    }

    pub fn sensor_fault_event(&self, sensor: &str) -> Result<&str> {
        self.sensor_fault
            .get(sensor)
            .map(|s| s.as_str())
            .ok_or_else(|| Error::Validation(format!("`{sensor}` is not a declared sensor")))
    }

    pub fn faulty_reading(&self, sensor: &str) -> Result<&str> {
        self.faulty_reading
            .get(sensor)
            .map(|s| s.as_str())
            .ok_or_else(|| Error::Validation(format!("`{sensor}` is not a declared sensor")))
    }

    /// (reading, faulty reading) pairs for the declared sensors.
    pub fn reading_pairs(&self) -> Vec<(String, String)> {
        self.sensors
            .iter()
            .map(|s| (s.clone(), self.faulty_reading[s].clone()))
            .collect()
    }

    pub fn sensor_fault_events(&self) -> Vec<String> {
        self.sensors
            .iter()
            .map(|s| self.sensor_fault[s].clone())
            .collect()
    }

    /// Every derived event name minted by this configuration.
    pub fn derived_names(&self) -> BTreeSet<String> {
        self.actuator_fault
            .values()
            .chain(self.mode_switch.values())
            .chain(self.sensor_fault.values())
            .chain(self.faulty_reading.values())
            .cloned()
            .collect()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}
