//! Seeded cross-validation of the circuit simulation against the closed
//! forms.
//!
//! Each sample draws δ ∈ [0.2, 2], t ∈ [0.3, 0.98], |Γ| ∈ [0.01, 0.12],
//! φ ∈ [0, 2π) and t₀ ∈ [0.1, 0.9]. The single-mode scissors are checked on
//! random inputs Σ c_nm |n_H,m_V⟩|φ_nm⟩ with an entangled partner mode; the
//! hybrid and Bell preparations on the entangled coherent source.

use std::f64::consts::PI;
use std::fmt::Write as _;

use pqs_core::analytics::{self, AnalyticPf, Method};
use pqs_core::scissors::{self, pqs1, pqs2, quantum_scissors, Scissors, ScissorsResult};
use pqs_core::sources::{self, SourceParams};
use pqs_core::{Complex64, Occupation, OccupationKey, Polarization, PureState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;

/// Largest accepted |ΔP| and |ΔF|.
pub const TOLERANCE: f64 = 1e-8;

/// Cutoff of the random finite inputs; they hold at most 2 photons per
/// polarization, so nothing is truncated.
const FINITE_CUTOFF: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub delta: f64,
    pub t: f64,
    pub gamma_abs: f64,
    pub phi: f64,
    pub t0: f64,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    pub samples: usize,
    /// Pins δ for every sample instead of drawing it.
    pub delta: Option<f64>,
    /// Pins φ for every sample instead of drawing it.
    pub phi: Option<f64>,
}

impl VerifyOptions {
    pub fn new(seed: u64, samples: usize) -> Self {
        VerifyOptions { seed, samples, delta: None, phi: None }
    }
}

/// Maximum deviations of one closed form over all evaluated samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: &'static str,
    pub evaluated: usize,
    pub max_dp: f64,
    pub max_df: f64,
}

impl CheckRow {
    /// True when every evaluated sample is within [`TOLERANCE`]; vacuously
    /// true when all samples were skipped.
    pub fn passed(&self) -> bool {
        self.max_dp <= TOLERANCE && self.max_df <= TOLERANCE
    }

    fn verdict(&self) -> &'static str {
        match (self.evaluated, self.passed()) {
            (0, _) => "SKIP",
            (_, true) => "PASS",
            _ => "FAIL",
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub rows: Vec<CheckRow>,
    pub skipped: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(CheckRow::passed)
    }

    pub fn row(&self, name: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = format!("# verify seed={} samples={} tolerance={:.0e}\n", self.seed, self.samples, TOLERANCE);
        writeln!(out, "{:<26} {:>5} {:>12} {:>12}  result", "check", "n", "max|dP|", "max|dF|").unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:<26} {:>5} {:>12.3e} {:>12.3e}  {}",
                r.name,
                r.evaluated,
                r.max_dp,
                r.max_df,
                r.verdict()
            )
            .unwrap();
        }
        for s in &self.skipped {
            writeln!(out, "skipped: {}", s).unwrap();
        }
        writeln!(out, "overall: {}", if self.passed() { "PASS" } else { "FAIL" }).unwrap();
        out
    }
}

/// Check names in report order.
pub const CHECKS: [&str; 9] = [
    "qs",
    "pqs1",
    "pqs2",
    "hybrid-pqs1",
    "hybrid-pqs2",
    "bell-pqs1 (branch-sum)",
    "bell-pqs2 (branch-sum)",
    "bell-pqs1 (interference)",
    "bell-pqs2 (interference)",
];

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random normalized single-mode state with up to 2 photons per polarization.
fn random_partner(rng: &mut ChaCha8Rng) -> PureState {
    let entries: Vec<_> = (0..=2u32)
        .flat_map(|h| (0..=2u32).map(move |v| Occupation::new(h, v)))
        .map(|o| (OccupationKey::new([o]), random_complex(rng)))
        .collect();
    PureState::from_entries(1, FINITE_CUTOFF, entries).unwrap().normalize().unwrap()
}

/// Σ c_nm |n_H,m_V⟩|φ_nm⟩ over the given occupations, with Σ|c|² = 1,
/// kept together with its coefficients.
struct EntangledInput {
    state: PureState,
    coefficients: Vec<(Occupation, Complex64, PureState)>,
}

impl EntangledInput {
    fn random(rng: &mut ChaCha8Rng, occupations: &[Occupation]) -> Self {
        let raw: Vec<(Occupation, Complex64, PureState)> =
            occupations.iter().map(|o| (*o, random_complex(rng), random_partner(rng))).collect();
        let norm = raw.iter().map(|(_, c, _)| c.norm_sqr()).sum::<f64>().sqrt();
        let coefficients: Vec<_> = raw.into_iter().map(|(o, c, p)| (o, c / norm, p)).collect();
        let state = Self::combine(&coefficients, |_| true);
        EntangledInput { state, coefficients }
    }

    fn combine<F: Fn(Occupation) -> bool>(terms: &[(Occupation, Complex64, PureState)], keep: F) -> PureState {
        let mut acc = PureState::vacuum(2, FINITE_CUTOFF).unwrap().scale(Complex64::default());
        for (o, c, partner) in terms.iter().filter(|(o, _, _)| keep(*o)) {
            let target = PureState::basis(OccupationKey::new([*o]), FINITE_CUTOFF).unwrap();
            acc = acc.add(&target.tensor(partner).unwrap().scale(*c)).unwrap();
        }
        acc
    }

    fn weight(&self, occ: Occupation) -> f64 {
        self.coefficients.iter().filter(|(o, _, _)| *o == occ).map(|(_, c, _)| c.norm_sqr()).sum()
    }

    /// Normalized single-photon part: the ideal scissors output.
    fn target(&self) -> PureState {
        Self::combine(&self.coefficients, |o| o.total() == 1).normalize().unwrap()
    }
}

type Deviation = (usize, f64, f64);

fn deviation(p: f64, f: f64, a: &AnalyticPf) -> Deviation {
    (1, (p - a.probability).abs(), (f - a.fidelity).abs())
}

fn from_result(r: &ScissorsResult, target: &PureState, a: &AnalyticPf) -> pqs_core::Result<Deviation> {
    Ok(deviation(r.total_probability, r.fidelity(target)?, a))
}

fn from_prep(p: &scissors::Preparation, target: &PureState, a: &AnalyticPf) -> pqs_core::Result<Deviation> {
    Ok(deviation(p.probability, p.fidelity(target)?, a))
}

fn single_mode_checks(seed: u64, index: usize, s: &Sample) -> pqs_core::Result<[Deviation; 3]> {
    // each sample gets its own stream so results do not depend on scheduling
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    let h = |n| Occupation::new(n, 0);

    let qs_in = EntangledInput::random(&mut rng, &[h(0), h(1), h(2)]);
    let outcomes = quantum_scissors(&qs_in.state, 0, Polarization::H, s.t)?;
    let qs = from_result(
        &ScissorsResult::from_outcomes(outcomes)?,
        &qs_in.target(),
        &analytics::pf_qs(qs_in.weight(h(0)), qs_in.weight(h(1)), s.t)?,
    )?;

    let occs: Vec<Occupation> = (0..=2u32).flat_map(|a| (0..=2u32).map(move |b| Occupation::new(a, b))).collect();
    let pqs_in = EntangledInput::random(&mut rng, &occs);
    let w = |a, b| pqs_in.weight(Occupation::new(a, b));
    let target = pqs_in.target();
    let one = from_result(
        &pqs1(&pqs_in.state, 0, s.t)?,
        &target,
        &analytics::pf_pqs1(w(1, 0), w(0, 1), w(0, 0), w(1, 1), s.t)?,
    )?;
    let two = from_result(
        &pqs2(&pqs_in.state, 0, Complex64::new(s.gamma_abs, 0.0))?,
        &target,
        &analytics::pf_pqs2(w(1, 0), w(0, 1), w(0, 0), w(1, 1), s.gamma_abs)?,
    )?;
    Ok([qs, one, two])
}

fn source_checks(s: &Sample) -> pqs_core::Result<[Deviation; 6]> {
    let params = SourceParams::new(s.delta, s.phi, s.t0);
    let m1 = Method::Pqs1 { t: s.t };
    let m2 = Method::Pqs2 { gamma_abs: s.gamma_abs };
    let d1 = Scissors::Pqs1 { t: s.t };
    let d2 = Scissors::pqs2(s.gamma_abs);

    let hybrid_target = sources::hybrid_target(&params)?;
    let h1 = scissors::prepare_hybrid(&params, d1)?;
    let h2 = scissors::prepare_hybrid(&params, d2)?;
    let bell_target = sources::bell_target(s.phi, params.cutoff)?;
    let b1 = scissors::prepare_bell(&params, d1)?;
    let b2 = scissors::prepare_bell(&params, d2)?;
    Ok([
        from_prep(&h1, &hybrid_target, &analytics::pf_hybrid(m1, s.delta, s.phi, s.t0)?)?,
        from_prep(&h2, &hybrid_target, &analytics::pf_hybrid(m2, s.delta, s.phi, s.t0)?)?,
        from_prep(&b1, &bell_target, &analytics::pf_bell(m1, s.delta, s.phi, s.t0)?)?,
        from_prep(&b2, &bell_target, &analytics::pf_bell(m2, s.delta, s.phi, s.t0)?)?,
        from_prep(&b1, &bell_target, &analytics::pf_bell_exact(m1, s.delta, s.phi, s.t0)?)?,
        from_prep(&b2, &bell_target, &analytics::pf_bell_exact(m2, s.delta, s.phi, s.t0)?)?,
    ])
}

/// Seeded parameter tuples for `opts`.
pub fn draw_samples(opts: &VerifyOptions) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    (0..opts.samples)
        .map(|_| {
            let s = Sample {
                delta: rng.gen_range(0.2..=2.0),
                t: rng.gen_range(0.3..=0.98),
                gamma_abs: rng.gen_range(0.01..=0.12),
                phi: rng.gen_range(0.0..2.0 * PI),
                t0: rng.gen_range(0.1..=0.9),
            };
            Sample { delta: opts.delta.unwrap_or(s.delta), phi: opts.phi.unwrap_or(s.phi), ..s }
        })
        .collect()
}

struct Outcome {
    deviations: Vec<Option<Deviation>>,
    skipped: Option<String>,
}

fn run_sample(seed: u64, index: usize, s: &Sample) -> Result<Outcome> {
    let mut deviations: Vec<Option<Deviation>> = single_mode_checks(seed, index, s)?.into_iter().map(Some).collect();
    let skipped = match source_checks(s) {
        Ok(src) => {
            deviations.extend(src.into_iter().map(Some));
            None
        }
        Err(pqs_core::Error::DegenerateNormalization(m)) => {
            Some(format!("sample {} ({:?}): degenerate source, {}", index, s, m))
        }
        Err(pqs_core::Error::ZeroProbability) => Some(format!("sample {} ({:?}): no heralding possible", index, s)),
        Err(e) => return Err(e.into()),
    };
    deviations.resize(CHECKS.len(), None);
    Ok(Outcome { deviations, skipped })
}

pub fn run_verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    let samples = draw_samples(opts);
    let outcomes: Vec<Result<Outcome>> =
        samples.par_iter().enumerate().map(|(i, s)| run_sample(opts.seed, i, s)).collect();
    let mut rows: Vec<CheckRow> =
        CHECKS.iter().map(|name| CheckRow { name, evaluated: 0, max_dp: 0.0, max_df: 0.0 }).collect();
    let mut skipped = Vec::new();
    for outcome in outcomes {
        let outcome = outcome?;
        for (row, (n, dp, df)) in rows.iter_mut().zip(outcome.deviations).filter_map(|(r, d)| Some((r, d?))) {
            row.evaluated += n;
            row.max_dp = row.max_dp.max(dp);
            row.max_df = row.max_df.max(df);
        }
        skipped.extend(outcome.skipped);
    }
    Ok(VerifyReport { seed: opts.seed, samples: opts.samples, rows, skipped })
}
