//! Named Bell-pair operating points with their heralded count rates.

use std::fmt::Write as _;

use pqs_core::analytics::{self, Method};
use pqs_core::scissors::{self, Scissors};
use pqs_core::sources::{self, SourceParams};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpotPoint {
    pub name: &'static str,
    pub delta: f64,
    pub phi: f64,
    pub t0: f64,
    pub method: Method,
    /// Source repetition rate in Hz.
    pub repetition_rate: f64,
}

pub const POINTS: [SpotPoint; 2] = [
    SpotPoint {
        name: "pqs1",
        delta: 0.8,
        phi: 0.0,
        t0: 0.5,
        method: Method::Pqs1 { t: 0.98 },
        repetition_rate: 6.4e6,
    },
    SpotPoint {
        name: "pqs2",
        delta: 0.8,
        phi: 0.0,
        t0: 0.5,
        method: Method::Pqs2 { gamma_abs: 0.07 },
        repetition_rate: 80e6,
    },
];

pub fn point(name: &str) -> Result<SpotPoint> {
    let key = name.strip_prefix("bell-").unwrap_or(name);
    POINTS.iter().copied().find(|p| p.name == key).ok_or_else(|| {
        let names: Vec<_> = POINTS.iter().map(|p| p.name).collect();
        HarnessError::Config(format!("unknown point {:?}; known: {}", name, names.join(", ")))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub probability: f64,
    pub fidelity: f64,
    pub count_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpotReport {
    pub point: SpotPoint,
    /// Closed form that adds the vacuum branches incoherently.
    pub branch_sum: Estimate,
    /// Closed form with the vacuum-branch interference.
    pub interference: Estimate,
    pub numeric: Estimate,
}

fn estimate(rate: f64, p: f64, f: f64) -> Estimate {
    Estimate { probability: p, fidelity: f, count_rate: analytics::count_rate(rate, p) }
}

pub fn run_spot(point: &SpotPoint) -> Result<SpotReport> {
    let (d, phi, t0, rate) = (point.delta, point.phi, point.t0, point.repetition_rate);
    let a = analytics::pf_bell(point.method, d, phi, t0)?;
    let e = analytics::pf_bell_exact(point.method, d, phi, t0)?;
    let device = match point.method {
        Method::Pqs1 { t } => Scissors::Pqs1 { t },
        Method::Pqs2 { gamma_abs } => Scissors::pqs2(gamma_abs),
    };
    let params = SourceParams::new(d, phi, t0);
    let prep = scissors::prepare_bell(&params, device)?;
    let f = prep.fidelity(&sources::bell_target(phi, params.cutoff)?)?;
    Ok(SpotReport {
        point: *point,
        branch_sum: estimate(rate, a.probability, a.fidelity),
        interference: estimate(rate, e.probability, e.fidelity),
        numeric: estimate(rate, prep.probability, f),
    })
}

impl SpotReport {
    pub fn render(&self) -> String {
        let p = &self.point;
        let setting = match p.method {
            Method::Pqs1 { t } => format!("t={}", t),
            Method::Pqs2 { gamma_abs } => format!("gamma_abs={}", gamma_abs),
        };
        let mut out = format!(
            "# bell-{} delta={} phi={} t0={} {} repetition_rate={:e} Hz\n",
            p.name, p.delta, p.phi, p.t0, setting, p.repetition_rate
        );
        writeln!(out, "{:<13} {:>12} {:>10} {:>12}", "evaluation", "P", "F", "rate_hz").unwrap();
        for (label, e) in
            [("branch-sum", &self.branch_sum), ("interference", &self.interference), ("numeric", &self.numeric)]
        {
            writeln!(out, "{:<13} {:>12.4e} {:>10.6} {:>12.2}", label, e.probability, e.fidelity, e.count_rate)
                .unwrap();
        }
        out
    }
}
