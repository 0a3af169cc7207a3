use serde::{Deserialize, Serialize};

use super::{extract, Gazetteer, Mutant};

/// How a mutant behaves on the probe suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Some probe crashed or hit the step cap.
    Exception,
    /// Every probe output matches the reference recognizer.
    EqualOutput,
    Testable,
}

/// A fixed `(text, gazetteer)` triage case.
#[derive(Debug, Clone)]
pub struct Probe {
    pub text: String,
    pub gazetteer: Gazetteer,
}

#[derive(Deserialize)]
struct RawProbe {
    text: String,
    terms: Vec<String>,
}

const PROBES: &str = include_str!("../../fixtures/probes.json");

/// The eight shipped probes.
pub fn default_probes() -> Vec<Probe> {
    let raw: Vec<RawProbe> = serde_json::from_str(PROBES).expect("probe fixture is valid JSON");
    raw.into_iter()
        .map(|p| Probe {
            text: p.text,
            gazetteer: Gazetteer::new(p.terms).expect("probe gazetteers are non-empty"),
        })
        .collect()
}

pub fn classify_mutant(mutant: Mutant, probes: &[Probe]) -> Classification {
    assert!(!probes.is_empty(), "probe suite must be non-empty");
    let mut differs = false;
    for probe in probes {
        let reference = extract(&probe.text, &probe.gazetteer, None).expect("reference recognizer never faults");
        match extract(&probe.text, &probe.gazetteer, Some(mutant)) {
            Err(_) => return Classification::Exception,
            Ok(out) => differs |= out != reference,
        }
    }
    if differs {
        Classification::Testable
    } else {
        Classification::EqualOutput
    }
}
