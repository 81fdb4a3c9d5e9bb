//! Per-service and per-run metrics, serialized as CSV and JSON.
//!
//! Both formats share one fixed column set ([`COLUMNS`]). A `service` row
//! leaves the run-level columns empty and a `run` row leaves `service_id`
//! and `tier` empty. Floats carry six significant digits.

use serde_json::{json, Map, Value};

use crate::infra::{ArbitrationKind, Outcome, SimOutcome};
use crate::model::Millis;
use crate::stats::{mean, nearest_rank};

pub const COLUMNS: [&str; 18] = [
    "kind",
    "policy",
    "seed",
    "service_id",
    "tier",
    "invocations",
    "completed",
    "rejected",
    "dropped",
    "in_flight",
    "mean_latency_ms",
    "p95_latency_ms",
    "energy_j_total",
    "charge_total",
    "reschedules",
    "arbitration_events",
    "security_violations",
    "wall_ms",
];

/// Counters shared by service and run rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Tally {
    pub invocations: u64,
    pub completed: u64,
    pub rejected: u64,
    pub dropped: u64,
    pub in_flight: u64,
    /// `None` when nothing completed.
    pub mean_latency_ms: Option<Millis>,
    pub p95_latency_ms: Option<Millis>,
    pub energy_j_total: f64,
    pub charge_total: f64,
    pub reschedules: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceRow {
    pub service_id: String,
    /// Tier of the final placement, `None` if the service was never placed.
    pub tier: Option<String>,
    pub tally: Tally,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub tally: Tally,
    pub arbitration_events: u64,
    pub security_violations: u64,
    /// Simulated end time of the run.
    pub wall_ms: Millis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub policy: String,
    pub seed: u64,
    pub services: Vec<ServiceRow>,
    pub run: RunRow,
}

/// `printf("%g")` with six significant digits.
pub fn fmt_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_owned()
        } else {
            s.to_owned()
        }
    };
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

fn round6(x: f64) -> f64 {
    fmt_g6(x).parse().unwrap_or(x)
}

fn tally<'a>(records: impl Iterator<Item = &'a crate::infra::InvocationRecord>) -> Tally {
    let mut t = Tally::default();
    let mut latencies = Vec::new();
    for r in records {
        match r.outcome {
            Outcome::Completed => {
                t.completed += 1;
                latencies.push(r.latency_ms());
            }
            Outcome::Rejected => t.rejected += 1,
            Outcome::Dropped => t.dropped += 1,
        }
        t.energy_j_total += r.energy_j;
        t.charge_total += r.charge;
    }
    if !latencies.is_empty() {
        t.mean_latency_ms = Some(mean(latencies.iter().copied()));
        latencies.sort_by(f64::total_cmp);
        t.p95_latency_ms = Some(nearest_rank(&latencies, 95.0));
    }
    t
}

impl MetricsReport {
    pub fn from_outcome(out: &SimOutcome) -> Self {
        let services = out
            .arrivals
            .iter()
            .map(|(id, &arrivals)| {
                let mut t = tally(out.records.iter().filter(|r| &r.service_id == id));
                t.invocations = arrivals;
                t.in_flight = out.in_flight[id];
                t.reschedules = out.reschedules[id];
                ServiceRow {
                    service_id: id.to_string(),
                    tier: out.final_placement[id]
                        .as_ref()
                        .map(|p| p.tier.as_str().to_owned()),
                    tally: t,
                }
            })
            .collect();
        let mut t = tally(out.records.iter());
        t.invocations = out.total_arrivals();
        t.in_flight = out.total_in_flight();
        t.reschedules = out.reschedules.values().sum();
        Self {
            policy: out.policy.name().to_owned(),
            seed: out.seed,
            services,
            run: RunRow {
                tally: t,
                arbitration_events: out.log.len() as u64,
                security_violations: out.security_violations,
                wall_ms: out.end_ms,
            },
        }
    }

    /// Event-log recount by kind, in `ArbitrationKind` declaration order.
    pub fn recount_events(out: &SimOutcome) -> (u64, u64, u64) {
        let count = |k| out.log.iter().filter(|e| e.kind == k).count() as u64;
        (
            count(ArbitrationKind::Registration),
            count(ArbitrationKind::TickEvaluation),
            count(ArbitrationKind::Reschedule),
        )
    }

    fn tally_cells(t: &Tally) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(fmt_g6).unwrap_or_default();
        vec![
            t.invocations.to_string(),
            t.completed.to_string(),
            t.rejected.to_string(),
            t.dropped.to_string(),
            t.in_flight.to_string(),
            opt(t.mean_latency_ms),
            opt(t.p95_latency_ms),
            fmt_g6(t.energy_j_total),
            fmt_g6(t.charge_total),
            t.reschedules.to_string(),
        ]
    }

    /// Rows in [`COLUMNS`] order: one per service, then the run summary.
    pub fn rows(&self) -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = self
            .services
            .iter()
            .map(|s| {
                let mut row = vec![
                    "service".to_owned(),
                    self.policy.clone(),
                    self.seed.to_string(),
                    s.service_id.clone(),
                    s.tier.clone().unwrap_or_default(),
                ];
                row.extend(Self::tally_cells(&s.tally));
                row.extend([String::new(), String::new(), String::new()]);
                row
            })
            .collect();
        let mut run = vec![
            "run".to_owned(),
            self.policy.clone(),
            self.seed.to_string(),
            String::new(),
            String::new(),
        ];
        run.extend(Self::tally_cells(&self.run.tally));
        run.extend([
            self.run.arbitration_events.to_string(),
            self.run.security_violations.to_string(),
            fmt_g6(self.run.wall_ms),
        ]);
        rows.push(run);
        rows
    }

    pub fn to_csv(&self) -> String {
        rows_to_csv(std::iter::once(self))
    }

    pub fn to_json_value(&self) -> Value {
        fn tally_json(t: &Tally, m: &mut Map<String, Value>) {
            let opt = |x: Option<f64>| x.map_or(Value::Null, |v| json!(round6(v)));
            m.insert("invocations".into(), json!(t.invocations));
            m.insert("completed".into(), json!(t.completed));
            m.insert("rejected".into(), json!(t.rejected));
            m.insert("dropped".into(), json!(t.dropped));
            m.insert("in_flight".into(), json!(t.in_flight));
            m.insert("mean_latency_ms".into(), opt(t.mean_latency_ms));
            m.insert("p95_latency_ms".into(), opt(t.p95_latency_ms));
            m.insert("energy_j_total".into(), json!(round6(t.energy_j_total)));
            m.insert("charge_total".into(), json!(round6(t.charge_total)));
            m.insert("reschedules".into(), json!(t.reschedules));
        }
        let services: Vec<Value> = self
            .services
            .iter()
            .map(|s| {
                let mut m = Map::new();
                m.insert("service_id".into(), json!(s.service_id));
                m.insert("tier".into(), json!(s.tier));
                tally_json(&s.tally, &mut m);
                Value::Object(m)
            })
            .collect();
        let mut run = Map::new();
        tally_json(&self.run.tally, &mut run);
        run.insert("arbitration_events".into(), json!(self.run.arbitration_events));
        run.insert("security_violations".into(), json!(self.run.security_violations));
        run.insert("wall_ms".into(), json!(round6(self.run.wall_ms)));
        json!({
            "policy": self.policy,
            "seed": self.seed,
            "services": services,
            "run": Value::Object(run),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("json value serializes");
        s.push('\n');
        s
    }
}

/// One CSV document holding every row of every report, header first.
pub fn rows_to_csv<'a>(reports: impl IntoIterator<Item = &'a MetricsReport>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(COLUMNS).expect("in-memory write");
    for report in reports {
        for row in report.rows() {
            w.write_record(&row).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}
