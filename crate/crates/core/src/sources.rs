//! Input and target states: coherent and cat states, the entangled
//! coherent states built from them, and the ideal outputs of the
//! preparations.
//!
//! Mode indices are zero-based throughout: mode 0 is the first party.

use num_complex::Complex64;

use crate::elements::{apply_bs, apply_hwp, apply_pbs, BeamSplitter};
use crate::error::{Error, Result};
use crate::fock::{coherent_tail_weight, poisson_amplitude, required_cutoff, Occupation, OccupationKey, PureState};
use crate::{Polarization, MAX_TAIL_WEIGHT};

fn check_tail(amplitude: f64, cutoff: u32) -> Result<()> {
    let tail = coherent_tail_weight(amplitude, cutoff);
    if tail > MAX_TAIL_WEIGHT {
        return Err(Error::CutoffTooSmall {
            amplitude,
            cutoff,
            tail,
            required: required_cutoff(amplitude, MAX_TAIL_WEIGHT),
        });
    }
    Ok(())
}

fn inverse_sqrt_norm(overlap: f64, phi: f64) -> Result<f64> {
    let d = 2.0 * (1.0 + phi.cos() * overlap);
    if !(d > 1e-14) {
        return Err(Error::DegenerateNormalization(format!(
            "branches cancel (overlap {:.3e}, φ = {})",
            overlap, phi
        )));
    }
    Ok(d.powf(-0.5))
}

/// Single-mode coherent state |γ⟩ of real amplitude in one polarization.
pub fn coherent(gamma: f64, pol: Polarization, cutoff: u32) -> Result<PureState> {
    check_tail(gamma, cutoff)?;
    PureState::from_entries(
        1,
        cutoff,
        (0..=cutoff).map(|n| {
            (OccupationKey::new([pol.occupation(n)]), Complex64::new(poisson_amplitude(gamma, n), 0.0))
        }),
    )
}

/// Cat state N(|δ⟩ + e^{iφ}|−δ⟩) with N = [2(1 + cos φ e^{−2δ²})]^{−1/2}.
pub fn cat(delta: f64, phi: f64, pol: Polarization, cutoff: u32) -> Result<PureState> {
    check_tail(delta, cutoff)?;
    let norm = inverse_sqrt_norm((-2.0 * delta * delta).exp(), phi)?;
    let e = Complex64::from_polar(1.0, phi);
    PureState::from_entries(
        1,
        cutoff,
        (0..=cutoff).map(|n| {
            let parity = if n % 2 == 1 { -1.0 } else { 1.0 };
            let amp = norm * poisson_amplitude(delta, n) * (1.0 + e * parity);
            (OccupationKey::new([pol.occupation(n)]), amp)
        }),
    )
}

/// Product of coherent states ⊗_j |sign·a_j⟩ in one polarization.
fn coherent_product(amplitudes: &[f64], sign: f64, pol: Polarization, cutoff: u32) -> Result<PureState> {
    let mut iter = amplitudes.iter();
    let first = iter.next().ok_or_else(|| Error::InvalidArgument("no modes".into()))?;
    let mut state = coherent(sign * first, pol, cutoff)?;
    for a in iter {
        state = state.tensor(&coherent(sign * a, pol, cutoff)?)?;
    }
    Ok(state)
}

/// M(⊗_j |a_j,H⟩ + e^{iφ} ⊗_j |−a_j,V⟩) with
/// M = [2(1 + cos φ exp(−Σ a_j²))]^{−1/2}.
pub fn entangled_coherent(amplitudes: &[f64], phi: f64, cutoff: u32) -> Result<PureState> {
    let overlap = (-amplitudes.iter().map(|a| a * a).sum::<f64>()).exp();
    let m = inverse_sqrt_norm(overlap, phi)?;
    let h = coherent_product(amplitudes, 1.0, Polarization::H, cutoff)?;
    let v = coherent_product(amplitudes, -1.0, Polarization::V, cutoff)?;
    h.scale(Complex64::new(m, 0.0)).add(&v.scale(Complex64::from_polar(m, phi)))
}

/// Parameters of the entangled coherent sources.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceParams {
    /// Amplitude δ of the input cat and coherent states.
    pub delta: f64,
    /// Relative phase φ of the cat state, radians.
    pub phi: f64,
    /// Transmissivity of the beam splitter creating the second party.
    pub t0: f64,
    /// Transmissivities of the further splitting beam splitters; n − 2 of
    /// them for n parties.
    pub split_ts: Vec<f64>,
    pub cutoff: u32,
}

impl SourceParams {
    /// Parameters with the cutoff chosen for the largest amplitude δ√2 that
    /// appears in the source circuit.
    pub fn new(delta: f64, phi: f64, t0: f64) -> Self {
        let cutoff = required_cutoff(delta * 2f64.sqrt(), MAX_TAIL_WEIGHT).max(2);
        SourceParams { delta, phi, t0, split_ts: Vec::new(), cutoff }
    }

    pub fn with_splits(mut self, split_ts: Vec<f64>) -> Self {
        self.split_ts = split_ts;
        self
    }

    pub fn with_cutoff(mut self, cutoff: u32) -> Self {
        self.cutoff = cutoff;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0) {
            return Err(Error::InvalidArgument(format!("δ = {} must be non-negative", self.delta)));
        }
        for &t in std::iter::once(&self.t0).chain(&self.split_ts) {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::InvalidArgument(format!("transmissivity {} outside [0, 1]", t)));
            }
        }
        Ok(())
    }

    /// (α, β) = (δ√(2t₀), δ√(2(1−t₀))).
    pub fn alpha_beta(&self) -> (f64, f64) {
        (self.delta * (2.0 * self.t0).sqrt(), self.delta * (2.0 * (1.0 - self.t0)).sqrt())
    }

    /// Coherent amplitudes α^(1) … α^(n) of the n-party state: mode 2 of the
    /// two-party state is split successively by the `split_ts`.
    pub fn amplitudes(&self, n: usize) -> Result<Vec<f64>> {
        if n < 2 {
            return Err(Error::InvalidArgument("need at least two parties".into()));
        }
        if self.split_ts.len() < n - 2 {
            return Err(Error::InvalidArgument(format!(
                "{} parties need {} splitting transmissivities, got {}",
                n,
                n - 2,
                self.split_ts.len()
            )));
        }
        let (alpha, mut rest) = self.alpha_beta();
        let mut amps = vec![alpha];
        for &t in &self.split_ts[..n - 2] {
            amps.push(rest * t.sqrt());
            rest *= (1.0 - t).sqrt();
        }
        amps.push(rest);
        Ok(amps)
    }
}

/// Two-party entangled coherent state N₀(|α_H⟩|β_H⟩ + e^{iφ}|−α_V⟩|−β_V⟩),
/// built directly from its definition.
pub fn xi_direct(params: &SourceParams) -> Result<PureState> {
    lambda_state(params, 2)
}

/// n-party entangled coherent state with the amplitudes of
/// [`SourceParams::amplitudes`], built directly.
pub fn lambda_state(params: &SourceParams, n: usize) -> Result<PureState> {
    params.validate()?;
    if params.split_ts.len() != n.saturating_sub(2) {
        return Err(Error::InvalidArgument(format!(
            "{} parties need {} splitting transmissivities, got {}",
            n,
            n.saturating_sub(2),
            params.split_ts.len()
        )));
    }
    entangled_coherent(&params.amplitudes(n)?, params.phi, params.cutoff)
}

/// Two-party state produced by running the optical preparation circuit:
/// cat ⊗ coherent → balanced BS → HWP on the second mode → PBS merge into
/// the first mode → BS(t₀) onto a fresh vacuum mode.
pub fn xi_circuit(params: &SourceParams) -> Result<PureState> {
    params.validate()?;
    let cutoff = params.cutoff;
    check_tail(params.delta * 2f64.sqrt(), cutoff)?;
    let input = cat(params.delta, params.phi, Polarization::H, cutoff)?
        .tensor(&coherent(params.delta, Polarization::H, cutoff)?)?;
    let mixed = apply_bs(&input, &BeamSplitter::balanced(0, 1)?)?;
    let rotated = apply_hwp(&mixed, 1)?;
    let merged = apply_pbs(&rotated, 0, 1)?;
    // after the merge the second mode is empty
    let merged = merged.project_unnormalized(&[(1, Occupation::VACUUM)])?;
    apply_bs(&merged.append_vacuum(1), &BeamSplitter::new(params.t0, 0, 1)?)
}

/// n-party state from the circuit: [`xi_circuit`] followed by splitting the
/// last mode with BS(t₁), BS(t₂), …
pub fn lambda_circuit(params: &SourceParams, n: usize) -> Result<PureState> {
    if params.split_ts.len() != n.saturating_sub(2) {
        return Err(Error::InvalidArgument(format!(
            "{} parties need {} splitting transmissivities, got {}",
            n,
            n.saturating_sub(2),
            params.split_ts.len()
        )));
    }
    let mut state = xi_circuit(params)?;
    for &t in &params.split_ts {
        let last = state.mode_count() - 1;
        state = apply_bs(&state.append_vacuum(1), &BeamSplitter::new(t, last, last + 1)?)?;
    }
    Ok(state)
}

/// Ideal preparation output: the modes flagged in `truncated` carry single
/// photons, the others keep their coherent amplitudes,
///
/// (⊗ |1_H⟩ ⊗ |a_H⟩ + s e^{iφ} ⊗ |1_V⟩ ⊗ |−a_V⟩) / √2,  s = (−1)^{#truncated}.
///
/// The sign s is the local phase picked up from f₁(−a) = −f₁(a) in each
/// truncated mode; it is removable by a local V-parity phase.
pub fn truncated_target(amplitudes: &[f64], truncated: &[bool], phi: f64, cutoff: u32) -> Result<PureState> {
    if amplitudes.len() != truncated.len() {
        return Err(Error::InvalidArgument("one truncation flag per mode".into()));
    }
    let count = truncated.iter().filter(|t| **t).count();
    if count == 0 {
        return Err(Error::InvalidArgument("at least one mode must be truncated".into()));
    }
    let sign = if count % 2 == 1 { -1.0 } else { 1.0 };
    let branch = |sgn: f64, pol: Polarization| -> Result<PureState> {
        let mut state: Option<PureState> = None;
        for (a, t) in amplitudes.iter().zip(truncated) {
            let factor = if *t {
                PureState::basis(OccupationKey::new([pol.occupation(1)]), cutoff)?
            } else {
                coherent(sgn * a, pol, cutoff)?
            };
            state = Some(match state {
                None => factor,
                Some(s) => s.tensor(&factor)?,
            });
        }
        Ok(state.expect("non-empty"))
    };
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let h = branch(1.0, Polarization::H)?;
    let v = branch(-1.0, Polarization::V)?;
    h.scale(Complex64::new(r, 0.0)).add(&v.scale(Complex64::from_polar(r * sign, phi)))
}

/// n-party target with the first `j` parties truncated to single photons.
pub fn target_omega(n: usize, j: usize, params: &SourceParams) -> Result<PureState> {
    if j == 0 || j > n {
        return Err(Error::InvalidArgument(format!("need 1 ≤ j ≤ n, got j = {}, n = {}", j, n)));
    }
    let amps = params.amplitudes(n)?;
    let truncated: Vec<bool> = (0..n).map(|m| m < j).collect();
    truncated_target(&amps, &truncated, params.phi, params.cutoff)
}

/// Hybrid single-photon / coherent-state target with mode 1 truncated and
/// mode 0 keeping amplitude α.
pub fn hybrid_target(params: &SourceParams) -> Result<PureState> {
    let (alpha, beta) = params.alpha_beta();
    truncated_target(&[alpha, beta], &[false, true], params.phi, params.cutoff)
}

/// Polarization Bell pair (|1_H⟩|1_H⟩ + e^{iφ}|1_V⟩|1_V⟩)/√2.
pub fn bell_target(phi: f64, cutoff: u32) -> Result<PureState> {
    truncated_target(&[0.0, 0.0], &[true, true], phi, cutoff)
}
