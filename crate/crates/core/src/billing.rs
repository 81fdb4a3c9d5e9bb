//! Pay-per-use charging with an SLO rebate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::infra::{InvocationRecord, Outcome};
use crate::model::{Millis, QoSParameters, Tier};

/// Per-node price list. Currency units are abstract.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tariff {
    /// Per invocation.
    pub base_fee: f64,
    /// Per cpu-second of execution.
    pub cpu_rate: f64,
    /// Per MB moved (request plus response).
    pub data_rate: f64,
}

impl Tariff {
    /// Tier price lists; base fees increase Dealer < MNO < Cloud.
    pub fn default_for(tier: Tier) -> Self {
        match tier {
            Tier::Dealer => Tariff {
                base_fee: 0.01,
                cpu_rate: 0.02,
                data_rate: 0.001,
            },
            Tier::Mno => Tariff {
                base_fee: 0.02,
                cpu_rate: 0.03,
                data_rate: 0.002,
            },
            Tier::Cloud => Tariff {
                base_fee: 0.03,
                cpu_rate: 0.01,
                data_rate: 0.004,
            },
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.base_fee, self.cpu_rate, self.data_rate]
            .iter()
            .all(|r| r.is_finite() && *r >= 0.0)
    }

    /// Linear charge for the given usage.
    pub fn price(&self, exec_ms: Millis, data_mb: f64) -> f64 {
        self.base_fee + self.cpu_rate * exec_ms / 1000.0 + self.data_rate * data_mb
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BillingError {
    #[error("invocation {0} did not complete and is not billable")]
    NotBillable(u64),
}

pub fn compute_charge(inv: &InvocationRecord, tariff: &Tariff) -> Result<f64, BillingError> {
    if inv.outcome != Outcome::Completed {
        return Err(BillingError::NotBillable(inv.request_id));
    }
    Ok(tariff.price(inv.exec_ms, inv.data_mb))
}

/// Charge after billing, zero for anything that did not complete.
pub fn billable_charge(inv: &InvocationRecord, tariff: &Tariff) -> f64 {
    compute_charge(inv, tariff).unwrap_or(0.0)
}

/// Discounts `charge` by `rebate_frac` when the observed latency plus the
/// path's jitter and session re-establishment time exceeds the SLA.
pub fn apply_slo_rebate(
    charge: f64,
    qos: &QoSParameters,
    observed_latency_ms: Millis,
    sla_ms: Millis,
    rebate_frac: f64,
) -> f64 {
    debug_assert!((0.0..=1.0).contains(&rebate_frac));
    if observed_latency_ms + qos.jitter_ms + qos.session_reestablish_ms > sla_ms {
        charge * (1.0 - rebate_frac)
    } else {
        charge
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConsumerId, ServiceId};
    use proptest::prelude::*;

    fn inv(exec_ms: f64, data_mb: f64, outcome: Outcome) -> InvocationRecord {
        InvocationRecord {
            request_id: 7,
            service_id: ServiceId::new("s"),
            consumer_id: ConsumerId::new("c"),
            node_id: None,
            t_arrive: 0.0,
            t_start: 0.0,
            t_done: exec_ms,
            transfer_ms: 0.0,
            exec_ms,
            queue_ms: 0.0,
            data_mb,
            energy_j: 0.0,
            charge: 0.0,
            outcome,
        }
    }

    fn qos(jitter: f64, session: f64) -> QoSParameters {
        QoSParameters {
            wan_delay_ms: 10.0,
            jitter_ms: jitter,
            session_reestablish_ms: session,
            bandwidth_mbps: 10.0,
            security_degree: 0.5,
        }
    }

    #[test]
    fn charge_examples() {
        let t = Tariff {
            base_fee: 1.0,
            cpu_rate: 0.5,
            data_rate: 3.0,
        };
        assert_eq!(compute_charge(&inv(0.0, 0.0, Outcome::Completed), &t), Ok(1.0));
        assert_eq!(
            compute_charge(&inv(5.0, 1.0, Outcome::Rejected), &t),
            Err(BillingError::NotBillable(7))
        );
        assert_eq!(billable_charge(&inv(5.0, 1.0, Outcome::Dropped), &t), 0.0);
        let no_data = Tariff { data_rate: 0.0, ..t };
        assert_eq!(compute_charge(&inv(2000.0, 0.0, Outcome::Completed), &no_data), Ok(2.0));
    }

    #[test]
    fn rebate_examples() {
        let q = qos(0.0, 0.0);
        assert_eq!(apply_slo_rebate(10.0, &q, 100.0, 500.0, 0.1), 10.0);
        assert_eq!(apply_slo_rebate(10.0, &q, 500.0, 500.0, 0.1), 10.0);
        assert!((apply_slo_rebate(10.0, &q, 501.0, 500.0, 0.1) - 9.0).abs() < 1e-12);
        // Jitter and session setup count against the SLA.
        assert!(apply_slo_rebate(10.0, &qos(30.0, 20.0), 460.0, 500.0, 0.1) < 10.0);
    }

    #[test]
    fn tier_base_fees_increase_outward() {
        let fee = |t| Tariff::default_for(t).base_fee;
        assert!(fee(Tier::Dealer) < fee(Tier::Mno));
        assert!(fee(Tier::Mno) < fee(Tier::Cloud));
    }

    proptest! {
        #[test]
        fn rebate_never_increases(charge in 0.0f64..1e6, obs in 0.0f64..1e4, sla in 1.0f64..1e4,
                                  frac in 0.0f64..=1.0, jitter in 0.0f64..100.0) {
            let q = qos(jitter, 0.0);
            prop_assert!(apply_slo_rebate(charge, &q, obs, sla, frac) <= charge);
            prop_assert_eq!(apply_slo_rebate(charge, &q, obs, sla, 0.0), charge);
        }
    }
}
