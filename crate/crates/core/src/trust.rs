//! Trust levels and the four ways a consumer comes to trust a node:
//! establishment by probing, aggregation of opinions, transitive (indirect)
//! trust, and reputation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::NodeId;

/// Totally ordered: `Untrusted < Low < Medium < High`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TrustLevel {
    Untrusted,
    Low,
    Medium,
    High,
}

impl TrustLevel {
    pub const ALL: [TrustLevel; 4] = [
        TrustLevel::Untrusted,
        TrustLevel::Low,
        TrustLevel::Medium,
        TrustLevel::High,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrustBasis {
    Established,
    Aggregated,
    Indirect,
    Reputation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrustAssessment {
    pub level: TrustLevel,
    pub basis: TrustBasis,
}

impl TrustAssessment {
    pub fn new(level: TrustLevel, basis: TrustBasis) -> Self {
        Self { level, basis }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReputationRecord {
    pub node_id: NodeId,
    pub legal_registered: bool,
    pub years_active: u32,
    pub complaint_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrustError {
    #[error("no opinions to combine")]
    EmptyOpinions,
    #[error("indirect trust needs a chain of at least two links, got {0}")]
    ChainTooShort(usize),
    #[error("trust establishment needs at least one probe")]
    NoProbes,
}

/// Reputation alone never lifts a node above this level.
pub const UNCORROBORATED_REPUTATION_CAP: TrustLevel = TrustLevel::Medium;

/// Indirect trust never exceeds this level.
pub const INDIRECT_CAP: TrustLevel = TrustLevel::Low;

pub fn establish_trust(probe_passed: bool, probe_count: u32) -> Result<TrustAssessment, TrustError> {
    if probe_count == 0 {
        return Err(TrustError::NoProbes);
    }
    let level = match (probe_passed, probe_count >= 3) {
        (false, _) => TrustLevel::Untrusted,
        (true, true) => TrustLevel::High,
        (true, false) => TrustLevel::Medium,
    };
    Ok(TrustAssessment::new(level, TrustBasis::Established))
}

/// Lower median of the opinion levels.
pub fn aggregate_trust(opinions: &[TrustAssessment]) -> Result<TrustAssessment, TrustError> {
    if opinions.is_empty() {
        return Err(TrustError::EmptyOpinions);
    }
    let mut levels: Vec<TrustLevel> = opinions.iter().map(|o| o.level).collect();
    levels.sort_unstable();
    let median = levels[(levels.len() - 1) / 2];
    Ok(TrustAssessment::new(median, TrustBasis::Aggregated))
}

/// Weakest link of the chain, capped at [`INDIRECT_CAP`].
pub fn indirect_trust(chain: &[TrustAssessment]) -> Result<TrustAssessment, TrustError> {
    if chain.len() < 2 {
        return Err(TrustError::ChainTooShort(chain.len()));
    }
    let weakest = chain.iter().map(|a| a.level).min().expect("nonempty chain");
    Ok(TrustAssessment::new(
        weakest.min(INDIRECT_CAP),
        TrustBasis::Indirect,
    ))
}

pub fn reputation_trust(rec: &ReputationRecord) -> TrustAssessment {
    let level = if !rec.legal_registered {
        TrustLevel::Untrusted
    } else if rec.years_active >= 5 && rec.complaint_rate < 0.05 {
        TrustLevel::High
    } else if rec.complaint_rate < 0.2 {
        TrustLevel::Medium
    } else {
        TrustLevel::Low
    };
    TrustAssessment::new(level, TrustBasis::Reputation)
}

/// Strongest assessment in the list.
///
/// Reputation is vulnerable evidence: unless some non-reputation assessment
/// above `Untrusted` corroborates it, a reputation-based result is capped at
/// [`UNCORROBORATED_REPUTATION_CAP`]. Equal levels prefer non-reputation
/// bases, then list order.
pub fn effective_trust(assessments: &[TrustAssessment]) -> Result<TrustAssessment, TrustError> {
    let corroborated = assessments
        .iter()
        .any(|a| a.basis != TrustBasis::Reputation && a.level > TrustLevel::Untrusted);
    let capped = |a: &TrustAssessment| {
        if a.basis == TrustBasis::Reputation && !corroborated {
            TrustAssessment::new(a.level.min(UNCORROBORATED_REPUTATION_CAP), a.basis)
        } else {
            *a
        }
    };
    let mut best: Option<TrustAssessment> = None;
    for a in assessments.iter().map(capped) {
        best = match best {
            None => Some(a),
            Some(b) if a.level > b.level => Some(a),
            Some(b)
                if a.level == b.level
                    && b.basis == TrustBasis::Reputation
                    && a.basis != TrustBasis::Reputation =>
            {
                Some(a)
            }
            keep => keep,
        };
    }
    best.ok_or(TrustError::EmptyOpinions)
}

/// Trust evidence as declared in a scenario node block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrustEvidence {
    Probe {
        passed: bool,
        count: u32,
    },
    Aggregate {
        opinions: Vec<TrustLevel>,
    },
    Indirect {
        chain: Vec<TrustLevel>,
    },
    Reputation {
        legal_registered: bool,
        years_active: u32,
        complaint_rate: f64,
    },
}

impl TrustEvidence {
    pub fn assess(&self, node_id: &NodeId) -> Result<TrustAssessment, TrustError> {
        let as_opinions = |levels: &[TrustLevel]| -> Vec<TrustAssessment> {
            levels
                .iter()
                .map(|l| TrustAssessment::new(*l, TrustBasis::Aggregated))
                .collect()
        };
        match self {
            TrustEvidence::Probe { passed, count } => establish_trust(*passed, *count),
            TrustEvidence::Aggregate { opinions } => aggregate_trust(&as_opinions(opinions)),
            TrustEvidence::Indirect { chain } => indirect_trust(&as_opinions(chain)),
            TrustEvidence::Reputation {
                legal_registered,
                years_active,
                complaint_rate,
            } => Ok(reputation_trust(&ReputationRecord {
                node_id: node_id.clone(),
                legal_registered: *legal_registered,
                years_active: *years_active,
                complaint_rate: *complaint_rate,
            })),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use TrustBasis::*;
    use TrustLevel::*;

    fn a(level: TrustLevel, basis: TrustBasis) -> TrustAssessment {
        TrustAssessment::new(level, basis)
    }

    fn rep(legal: bool, years: u32, complaints: f64) -> ReputationRecord {
        ReputationRecord {
            node_id: NodeId::new("n"),
            legal_registered: legal,
            years_active: years,
            complaint_rate: complaints,
        }
    }

    #[test]
    fn establishment_table() {
        assert_eq!(establish_trust(true, 3).unwrap().level, High);
        assert_eq!(establish_trust(true, 1).unwrap().level, Medium);
        assert_eq!(establish_trust(false, 5).unwrap().level, Untrusted);
        assert_eq!(establish_trust(true, 3).unwrap().basis, Established);
        assert_eq!(establish_trust(true, 0), Err(TrustError::NoProbes));
    }

    #[test]
    fn aggregation_lower_median() {
        let got = aggregate_trust(&[a(High, Established), a(High, Indirect), a(Low, Reputation)]);
        assert_eq!(got.unwrap(), a(High, Aggregated));
        assert_eq!(aggregate_trust(&[a(Medium, Established)]).unwrap().level, Medium);
        assert_eq!(
            aggregate_trust(&[a(Low, Established), a(High, Established)]).unwrap().level,
            Low
        );
        assert_eq!(aggregate_trust(&[]), Err(TrustError::EmptyOpinions));
    }

    #[test]
    fn indirect_caps_at_low() {
        let got = indirect_trust(&[a(High, Established), a(High, Established)]).unwrap();
        assert_eq!(got, a(Low, Indirect));
        let got = indirect_trust(&[a(High, Established), a(Untrusted, Established)]).unwrap();
        assert_eq!(got.level, Untrusted);
        assert_eq!(
            indirect_trust(&[a(High, Established)]),
            Err(TrustError::ChainTooShort(1))
        );
    }

    #[test]
    fn reputation_table() {
        assert_eq!(reputation_trust(&rep(true, 6, 0.01)).level, High);
        assert_eq!(reputation_trust(&rep(false, 20, 0.0)).level, Untrusted);
        assert_eq!(reputation_trust(&rep(true, 6, 0.3)).level, Low);
        assert_eq!(reputation_trust(&rep(true, 2, 0.01)).level, Medium);
        assert_eq!(reputation_trust(&rep(true, 2, 0.01)).basis, Reputation);
    }

    #[test]
    fn effective_trust_rules() {
        assert_eq!(
            effective_trust(&[a(High, Established)]).unwrap(),
            a(High, Established)
        );
        assert_eq!(
            effective_trust(&[a(High, Reputation)]).unwrap(),
            a(Medium, Reputation)
        );
        assert_eq!(
            effective_trust(&[a(Low, Indirect), a(Medium, Established)]).unwrap(),
            a(Medium, Established)
        );
        // Corroborated reputation keeps its level.
        assert_eq!(
            effective_trust(&[a(High, Reputation), a(Low, Indirect)]).unwrap(),
            a(High, Reputation)
        );
        // An untrusted opinion corroborates nothing.
        assert_eq!(
            effective_trust(&[a(High, Reputation), a(Untrusted, Established)]).unwrap(),
            a(Medium, Reputation)
        );
        assert_eq!(
            effective_trust(&[a(Medium, Reputation), a(Medium, Aggregated)]).unwrap(),
            a(Medium, Aggregated)
        );
        assert_eq!(effective_trust(&[]), Err(TrustError::EmptyOpinions));
    }

    #[test]
    fn evidence_round_trip_through_json() {
        let ev: Vec<TrustEvidence> = serde_json::from_str(
            r#"[{"kind":"probe","passed":true,"count":3},
                {"kind":"indirect","chain":["High","Medium"]},
                {"kind":"reputation","legal_registered":true,"years_active":6,"complaint_rate":0.01}]"#,
        )
        .unwrap();
        let id = NodeId::new("n");
        let levels: Vec<_> = ev.iter().map(|e| e.assess(&id).unwrap().level).collect();
        assert_eq!(levels, vec![High, Low, High]);
    }
}
