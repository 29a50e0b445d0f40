//! Heralded quantum scissors.
//!
//! * QS: a single photon in ancilla mode x is split by BS(t) into x and y;
//!   y then meets the target mode on a balanced beam splitter and a single
//!   click in either output heralds the truncation of the target onto
//!   {|0⟩, |1⟩}, teleported into x.
//! * PQS1: a PBS splits the target into its H and V parts, each is cut by a
//!   QS with an ancilla of matching polarization, and a second PBS merges
//!   them again.
//! * PQS2: a type-II squeezer acts on the target (signal) and a vacuum idle
//!   mode; detecting one H and one V photon in the signal heralds the idle.
//!
//! In every case the output mode takes the place of the input mode.

use num_complex::Complex64;

use crate::elements::{apply_bs, apply_pbs, apply_squeezer_exact, BeamSplitter, Squeezer};
use crate::error::{Error, Result};
use crate::fock::{Occupation, OccupationKey, PureState};
use crate::sources::{self, SourceParams};
use crate::Polarization;

/// Outcome of one detector pair, or of the squeezer's signal measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Click {
    /// Click in the output port shared with the target's input.
    D1(Polarization),
    /// Click in the other output port.
    D2(Polarization),
    /// One H and one V photon in the squeezer signal mode.
    SignalPair,
}

/// One heralding pattern with its probability and its corrected,
/// unnormalized conditional state.
#[derive(Debug, Clone)]
pub struct HeraldedOutcome {
    pub clicks: Vec<Click>,
    pub probability: f64,
    pub state: PureState,
}

/// All heralding patterns of one scissors application.
#[derive(Debug, Clone)]
pub struct ScissorsResult {
    pub outcomes: Vec<HeraldedOutcome>,
    /// Sum of the pattern probabilities.
    pub total_probability: f64,
    /// Normalized output; `None` when no pattern can fire.
    pub state: Option<PureState>,
    /// Smallest fidelity between the corrected output of any firing pattern
    /// and `state`; 1 when the corrections are right.
    pub pattern_agreement: f64,
}

impl ScissorsResult {
    /// Sums the patterns and takes the first firing one as the output.
    pub fn from_outcomes(outcomes: Vec<HeraldedOutcome>) -> Result<Self> {
        let total_probability = outcomes.iter().map(|o| o.probability).sum();
        let firing: Vec<&HeraldedOutcome> = outcomes.iter().filter(|o| o.probability > 0.0).collect();
        let state = match firing.first() {
            Some(o) => Some(o.state.normalize()?),
            None => None,
        };
        let mut pattern_agreement = 1.0f64;
        if let Some(reference) = &state {
            for o in &firing[1..] {
                pattern_agreement = pattern_agreement.min(o.state.fidelity(reference)?);
            }
        }
        Ok(ScissorsResult { outcomes, total_probability, state, pattern_agreement })
    }

    /// Fidelity of the heralded state with `target`.
    pub fn fidelity(&self, target: &PureState) -> Result<f64> {
        match &self.state {
            Some(s) => s.fidelity(target),
            None => Err(Error::ZeroProbability),
        }
    }
}

/// Keeps only the basis terms for which `keep` holds.
fn restrict<F: Fn(&OccupationKey) -> bool>(state: &PureState, keep: F) -> PureState {
    state.map_amplitudes(|k| if keep(k) { Complex64::new(1.0, 0.0) } else { Complex64::default() })
}

/// QS of polarization `pol` with transmissivity `t` on `mode`. Both
/// patterns are returned; the D2 output is corrected by the phase
/// (−1)^{n_pol} on the output mode.
pub fn quantum_scissors(state: &PureState, mode: usize, pol: Polarization, t: f64) -> Result<Vec<HeraldedOutcome>> {
    state.check_mode(mode)?;
    let n = state.mode_count();
    let (x, y) = (n, n + 1);
    let split = BeamSplitter::new(t, x, y)?;
    let combine = BeamSplitter::balanced(mode, y)?;
    let other = pol.orthogonal();

    // The balanced BS conserves the photon number of (mode, y) in each
    // polarization, so only inputs with at most one `pol` photon and no
    // orthogonal photon in `mode` can herald.
    let input = restrict(state, |k| pol.count(k[mode]) <= 1 && other.count(k[mode]) == 0);
    let ancilla = PureState::basis(OccupationKey::new([pol.occupation(1), Occupation::VACUUM]), state.cutoff())?;
    let mixed = apply_bs(&apply_bs(&input.tensor(&ancilla)?, &split)?, &combine)?;

    let mut outcomes = Vec::with_capacity(2);
    for click in [Click::D1(pol), Click::D2(pol)] {
        let (at_mode, at_y) = match click {
            Click::D1(_) => (pol.occupation(1), Occupation::VACUUM),
            _ => (Occupation::VACUUM, pol.occupation(1)),
        };
        // x sits at n − 1 once `mode` and y are removed
        let kept = mixed.project_unnormalized(&[(mode, at_mode), (y, at_y)])?.move_mode(n - 1, mode)?;
        let corrected = match click {
            Click::D2(_) => kept.map_amplitudes(|k| {
                if pol.count(k[mode]) % 2 == 1 {
                    Complex64::new(-1.0, 0.0)
                } else {
                    Complex64::new(1.0, 0.0)
                }
            }),
            _ => kept,
        };
        outcomes.push(HeraldedOutcome { clicks: vec![click], probability: corrected.norm_sqr(), state: corrected });
    }
    Ok(outcomes)
}

/// PQS1 on `mode`: QS_H and QS_V of transmissivity `t` on the two
/// polarization components. Four patterns.
pub fn pqs1(state: &PureState, mode: usize, t: f64) -> Result<ScissorsResult> {
    state.check_mode(mode)?;
    let n = state.mode_count();
    let split = apply_pbs(&state.append_vacuum(1), mode, n)?;
    let mut outcomes = Vec::with_capacity(4);
    for h in quantum_scissors(&split, mode, Polarization::H, t)? {
        for v in quantum_scissors(&h.state, n, Polarization::V, t)? {
            let merged = apply_pbs(&v.state, mode, n)?;
            let out = merged.project_unnormalized(&[(n, Occupation::VACUUM)])?;
            let mut clicks = h.clicks.clone();
            clicks.extend(v.clicks);
            outcomes.push(HeraldedOutcome { clicks, probability: out.norm_sqr(), state: out });
        }
    }
    ScissorsResult::from_outcomes(outcomes)
}

/// PQS2 on `mode` with squeezing parameter `gamma`.
pub fn pqs2(state: &PureState, mode: usize, gamma: Complex64) -> Result<ScissorsResult> {
    state.check_mode(mode)?;
    let n = state.mode_count();
    // The squeezer only adds signal photons: inputs above (1, 1) never herald.
    let input = restrict(state, |k| k[mode].h <= 1 && k[mode].v <= 1).append_vacuum(1);
    let squeezed = apply_squeezer_exact(&input, &Squeezer::new(gamma, mode, n)?)?.state;
    let out = squeezed.project_unnormalized(&[(mode, Occupation::new(1, 1))])?.move_mode(n - 1, mode)?;
    ScissorsResult::from_outcomes(vec![HeraldedOutcome {
        clicks: vec![Click::SignalPair],
        probability: out.norm_sqr(),
        state: out,
    }])
}

/// A polarized scissors device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scissors {
    Pqs1 { t: f64 },
    Pqs2 { gamma: Complex64 },
}

impl Scissors {
    /// PQS2 with real squeezing parameter |Γ|.
    pub fn pqs2(gamma_abs: f64) -> Self {
        Scissors::Pqs2 { gamma: Complex64::new(gamma_abs, 0.0) }
    }

    pub fn apply(&self, state: &PureState, mode: usize) -> Result<ScissorsResult> {
        match *self {
            Scissors::Pqs1 { t } => pqs1(state, mode, t),
            Scissors::Pqs2 { gamma } => pqs2(state, mode, gamma),
        }
    }
}

/// Result of a sequence of heralded truncations.
#[derive(Debug, Clone)]
pub struct Preparation {
    /// Joint heralding probability of all stages.
    pub probability: f64,
    /// Normalized output; `None` if some stage cannot fire.
    pub state: Option<PureState>,
    pub stages: Vec<ScissorsResult>,
}

impl Preparation {
    pub fn fidelity(&self, target: &PureState) -> Result<f64> {
        match &self.state {
            Some(s) => s.fidelity(target),
            None => Err(Error::ZeroProbability),
        }
    }

    /// Smallest pattern agreement over the stages.
    pub fn pattern_agreement(&self) -> f64 {
        self.stages.iter().map(|s| s.pattern_agreement).fold(1.0, f64::min)
    }
}

/// Applies the scissors stages in order, renormalizing in between.
pub fn prepare(state: &PureState, stages: &[(usize, Scissors)]) -> Result<Preparation> {
    let mut current = state.normalize()?;
    let mut probability = 1.0;
    let mut results = Vec::with_capacity(stages.len());
    for (mode, scissors) in stages {
        let result = scissors.apply(&current, *mode)?;
        probability *= result.total_probability;
        let next = result.state.clone();
        results.push(result);
        match next {
            Some(s) => current = s,
            None => return Ok(Preparation { probability: 0.0, state: None, stages: results }),
        }
    }
    Ok(Preparation { probability, state: Some(current), stages: results })
}

/// Hybrid preparation: the second mode of the two-party entangled coherent
/// state is truncated, the first keeps amplitude α.
pub fn prepare_hybrid(params: &SourceParams, scissors: Scissors) -> Result<Preparation> {
    prepare(&sources::xi_direct(params)?, &[(1, scissors)])
}

/// Bell-pair preparation: the second mode is truncated, then the first.
pub fn prepare_bell(params: &SourceParams, scissors: Scissors) -> Result<Preparation> {
    prepare(&sources::xi_direct(params)?, &[(1, scissors), (0, scissors)])
}

/// n-party preparation truncating the first `scissors.len()` modes, last
/// of them first.
pub fn prepare_omega(params: &SourceParams, n: usize, scissors: &[Scissors]) -> Result<Preparation> {
    if scissors.is_empty() || scissors.len() > n {
        return Err(Error::InvalidArgument(format!("need 1 ≤ j ≤ {} scissors, got {}", n, scissors.len())));
    }
    let stages: Vec<(usize, Scissors)> = scissors.iter().copied().enumerate().rev().collect();
    prepare(&sources::lambda_state(params, n)?, &stages)
}
