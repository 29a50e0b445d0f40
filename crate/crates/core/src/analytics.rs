//! Closed-form success probabilities and fidelities of the scissors
//! circuits and of the hybrid and Bell-pair preparations.
//!
//! Nothing here touches the Fock-space simulator; these functions are the
//! oracle the simulator is checked against and the fast backend for sweeps.
//! Only coefficient magnitudes enter the general formulas.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Success probability and fidelity of one heralded preparation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticPf {
    pub probability: f64,
    pub fidelity: f64,
}

impl AnalyticPf {
    fn from_parts(wanted: f64, probability: f64) -> Result<Self> {
        if !(probability > 0.0) {
            return Err(Error::ZeroProbability);
        }
        Ok(AnalyticPf { probability, fidelity: (wanted / probability).min(1.0) })
    }
}

/// Which polarized scissors is used, with its tuning knob.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Linear-optics scissors with beam-splitter transmissivity `t`.
    Pqs1 { t: f64 },
    /// Squeezer-based scissors with squeezing magnitude |Γ|.
    Pqs2 { gamma_abs: f64 },
}

/// f_n(γ) = e^{−γ²/2} γⁿ / √n!.
pub fn f_n(gamma: f64, n: u32) -> f64 {
    let ln_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    let sign = if gamma < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    if gamma == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    sign * (-0.5 * gamma * gamma + n as f64 * gamma.abs().ln() - 0.5 * ln_fact).exp()
}

/// (α, β) = (δ√(2t₀), δ√(2(1−t₀))).
pub fn alpha_beta(delta: f64, t0: f64) -> (f64, f64) {
    (delta * (2.0 * t0).sqrt(), delta * (2.0 * (1.0 - t0)).sqrt())
}

fn inverse_sqrt_norm(overlap: f64, phi: f64, what: &str) -> Result<f64> {
    let d = 2.0 * (1.0 + phi.cos() * overlap);
    if !(d > 1e-14) {
        return Err(Error::DegenerateNormalization(format!(
            "{} with overlap {:.3e} at φ = {}",
            what, overlap, phi
        )));
    }
    Ok(d.powf(-0.5))
}

/// N₀ = [2(1 + cos φ e^{−(α²+β²)})]^{−1/2} with α² + β² = 2δ².
pub fn n0(delta: f64, phi: f64, t0: f64) -> Result<f64> {
    let (a, b) = alpha_beta(delta, t0);
    inverse_sqrt_norm((-(a * a + b * b)).exp(), phi, "N0")
}

/// L_α = [2(1 + cos φ e^{−α²})]^{−1/2}.
pub fn l_alpha(alpha: f64, phi: f64) -> Result<f64> {
    inverse_sqrt_norm((-alpha * alpha).exp(), phi, "L_alpha")
}

/// M_n = [2(1 + cos φ exp(−Σ_j α_j²))]^{−1/2} for an n-mode entangled
/// coherent state with amplitudes `amplitudes`.
pub fn m_n(amplitudes: &[f64], phi: f64) -> Result<f64> {
    let s: f64 = amplitudes.iter().map(|a| a * a).sum();
    inverse_sqrt_norm((-s).exp(), phi, "M_n")
}

/// K_n = (1 − |Γ|²)^{(n+2)/2}.
pub fn k_n(gamma_abs: f64, n: u32) -> f64 {
    (1.0 - gamma_abs * gamma_abs).powf((n as f64 + 2.0) / 2.0)
}

/// Original single-polarization scissors: P = (1−t)|c₀|² + t|c₁|²,
/// F = t|c₁|² / P.
pub fn pf_qs(c0_sq: f64, c1_sq: f64, t: f64) -> Result<AnalyticPf> {
    AnalyticPf::from_parts(t * c1_sq, (1.0 - t) * c0_sq + t * c1_sq)
}

/// Linear-optics polarized scissors on Σ c_nm |n_H,m_V⟩|φ_nm⟩.
pub fn pf_pqs1(c10_sq: f64, c01_sq: f64, c00_sq: f64, c11_sq: f64, t: f64) -> Result<AnalyticPf> {
    let wanted = (1.0 - t) * t * (c10_sq + c01_sq);
    AnalyticPf::from_parts(wanted, wanted + (1.0 - t).powi(2) * c00_sq + t * t * c11_sq)
}

/// Squeezer-based polarized scissors on Σ c_nm |n_H,m_V⟩|φ_nm⟩.
///
/// The |c₁₁|²K₂² term is the squared norm of the c₁₁ K₂ |0⟩ output branch.
pub fn pf_pqs2(
    c10_sq: f64,
    c01_sq: f64,
    c00_sq: f64,
    c11_sq: f64,
    gamma_abs: f64,
) -> Result<AnalyticPf> {
    if !(0.0..1.0).contains(&gamma_abs) {
        return Err(Error::InvalidArgument(format!("|Γ| = {} must lie in [0, 1)", gamma_abs)));
    }
    let g2 = gamma_abs * gamma_abs;
    let wanted = (c10_sq + c01_sq) * k_n(gamma_abs, 1).powi(2) * g2;
    let p = wanted + c11_sq * k_n(gamma_abs, 2).powi(2) + c00_sq * k_n(gamma_abs, 0).powi(2) * g2 * g2;
    AnalyticPf::from_parts(wanted, p)
}

/// General-formula dispatch on [`Method`].
pub fn pf_general(method: Method, c10_sq: f64, c01_sq: f64, c00_sq: f64, c11_sq: f64) -> Result<AnalyticPf> {
    match method {
        Method::Pqs1 { t } => pf_pqs1(c10_sq, c01_sq, c00_sq, c11_sq, t),
        Method::Pqs2 { gamma_abs } => pf_pqs2(c10_sq, c01_sq, c00_sq, c11_sq, gamma_abs),
    }
}

/// Expansion coefficients of the two-mode entangled coherent state in the
/// photon numbers of mode 2: c₁₀ (with branch |α_H⟩), c₀₁ (with |−α_V⟩) and
/// c₀₀ (with the normalized cat L_α(|α_H⟩ + e^{iφ}|−α_V⟩)). c₁₁ vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiCoefficients {
    pub c10: Complex64,
    pub c01: Complex64,
    pub c00: Complex64,
    pub c11: Complex64,
    pub l_alpha: f64,
}

pub fn xi_coefficients(delta: f64, phi: f64, t0: f64) -> Result<XiCoefficients> {
    let (alpha, beta) = alpha_beta(delta, t0);
    let n = n0(delta, phi, t0)?;
    let l = l_alpha(alpha, phi)?;
    let e = Complex64::from_polar(1.0, phi);
    Ok(XiCoefficients {
        c10: Complex64::new(n * f_n(beta, 1), 0.0),
        c01: e * n * f_n(-beta, 1),
        c00: Complex64::new(n * f_n(beta, 0) / l, 0.0),
        c11: Complex64::default(),
        l_alpha: l,
    })
}

/// Hybrid DV-CV preparation: one scissors on mode 2 of the two-mode input,
/// specialized formulas in N₀, L_α, f₀(β), f₁(β).
pub fn pf_hybrid(method: Method, delta: f64, phi: f64, t0: f64) -> Result<AnalyticPf> {
    let (alpha, beta) = alpha_beta(delta, t0);
    let n2 = n0(delta, phi, t0)?.powi(2);
    let l_inv2 = l_alpha(alpha, phi)?.powi(-2);
    let f1 = f_n(beta, 1).powi(2);
    let f0 = f_n(beta, 0).powi(2);
    let (p, f) = match method {
        Method::Pqs1 { t } => {
            let p = 2.0 * (1.0 - t) * t * n2 * f1 + (1.0 - t).powi(2) * n2 * l_inv2 * f0;
            let f = 2.0 * t * f1 / (2.0 * t * f1 + (1.0 - t) * l_inv2 * f0);
            (p, f)
        }
        Method::Pqs2 { gamma_abs: g } => {
            let (k0, k1) = (k_n(g, 0).powi(2), k_n(g, 1).powi(2));
            let p = 2.0 * k1 * g * g * n2 * f1 + k0 * g.powi(4) * n2 * l_inv2 * f0;
            let f = 2.0 * k1 * f1 / (2.0 * k1 * f1 + k0 * g * g * l_inv2 * f0);
            (p, f)
        }
    };
    if !(p > 0.0) || !f.is_finite() {
        return Err(Error::ZeroProbability);
    }
    Ok(AnalyticPf { probability: p, fidelity: f })
}

/// Coefficients of the hybrid output regrouped by the branch of mode 1:
/// |α_H⟩(c₁|1_H⟩ + c₀|·⟩) + |−α_V⟩(−c₁e^{iφ}|1_V⟩ + c₀e^{iφ}|·⟩), where |·⟩
/// is the vacuum (PQS1) or |1_H,1_V⟩ (PQS2). These are g₁, g₀ for PQS1 and
/// h₁, h₀ for PQS2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCoefficients {
    pub one: Complex64,
    pub rest: Complex64,
}

pub fn branch_coefficients(method: Method, delta: f64, phi: f64, t0: f64) -> Result<BranchCoefficients> {
    let (_, beta) = alpha_beta(delta, t0);
    let n = n0(delta, phi, t0)?;
    Ok(match method {
        Method::Pqs1 { t } => BranchCoefficients {
            one: Complex64::new(((1.0 - t) * t).sqrt() * n * f_n(beta, 1), 0.0),
            rest: Complex64::new((1.0 - t) * n * f_n(beta, 0), 0.0),
        },
        Method::Pqs2 { gamma_abs: g } => {
            // phase of Γ only rotates both branches; take Γ real
            let mig = Complex64::new(0.0, -g);
            BranchCoefficients {
                one: k_n(g, 1) * mig * n * f_n(beta, 1),
                rest: k_n(g, 0) * mig * mig * n * f_n(beta, 0),
            }
        }
    })
}

/// Bell-pair preparation (both modes truncated by the same scissors type)
/// in the branch-sum closed form:
/// P = [2w₁f₁²(α) + 2w₀f₀²(α)](|c₁|² + |c₀|²),
/// F = w₁f₁²(α)|c₁|² / ([w₁f₁²(α) + w₀f₀²(α)](|c₁|² + |c₀|²)),
/// with (w₁, w₀) = ((1−t)t, (1−t)²) for PQS1 and (K₁²|Γ|², K₀²|Γ|⁴) for PQS2.
///
/// These omit the (1 + cos φ) interference of the two vacuum-in-mode-1
/// branches; see [`pf_bell_exact`].
pub fn pf_bell(method: Method, delta: f64, phi: f64, t0: f64) -> Result<AnalyticPf> {
    let (alpha, _) = alpha_beta(delta, t0);
    let c = branch_coefficients(method, delta, phi, t0)?;
    let (w1, w0) = bell_weights(method);
    let (f1, f0) = (f_n(alpha, 1).powi(2), f_n(alpha, 0).powi(2));
    let s = c.one.norm_sqr() + c.rest.norm_sqr();
    let p = (2.0 * w1 * f1 + 2.0 * w0 * f0) * s;
    let f = w1 * f1 * c.one.norm_sqr() / ((w1 * f1 + w0 * f0) * s);
    if !(p > 0.0) || !f.is_finite() {
        return Err(Error::ZeroProbability);
    }
    Ok(AnalyticPf { probability: p, fidelity: f })
}

fn bell_weights(method: Method) -> (f64, f64) {
    match method {
        Method::Pqs1 { t } => ((1.0 - t) * t, (1.0 - t).powi(2)),
        Method::Pqs2 { gamma_abs: g } => (k_n(g, 1).powi(2) * g * g, k_n(g, 0).powi(2) * g.powi(4)),
    }
}

/// Bell-pair preparation from the general scissors formulas applied to the
/// hybrid output. Mode 1 carries c₁₀ = f₁(α)A, c₀₁ = f₁(−α)B and
/// c₀₀ = f₀(α)(A + B) with ‖A + B‖² = 2|c₁|² + 2(1 + cos φ)|c₀|².
pub fn pf_bell_exact(method: Method, delta: f64, phi: f64, t0: f64) -> Result<AnalyticPf> {
    let (alpha, _) = alpha_beta(delta, t0);
    let c = branch_coefficients(method, delta, phi, t0)?;
    let (one, rest) = (c.one.norm_sqr(), c.rest.norm_sqr());
    let branch = one + rest;
    let f1 = f_n(alpha, 1).powi(2);
    let f0 = f_n(alpha, 0).powi(2);
    let vac = f0 * (2.0 * one + 2.0 * (1.0 + phi.cos()) * rest);
    let p = pf_general(method, f1 * branch, f1 * branch, vac, 0.0)?.probability;
    let (w1, _) = bell_weights(method);
    AnalyticPf::from_parts(2.0 * w1 * f1 * one, p)
}

/// Heralded event rate for a source repetition rate.
pub fn count_rate(repetition_rate: f64, probability: f64) -> f64 {
    repetition_rate * probability
}
