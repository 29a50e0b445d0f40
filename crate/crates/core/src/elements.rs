//! Optical elements acting on [`PureState`]s in the Fock basis.
//!
//! Beam-splitter convention: with transmissivity `t`, creation operators map
//! as a† → √t a† + √(1−t) b† and b† → √(1−t) a† − √t b†, identically for
//! both polarizations. On coherent inputs this is
//! |μ⟩|ν⟩ → |μ√t + ν√(1−t)⟩|μ√(1−t) − ν√t⟩. The map is its own inverse.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{Accumulator, Occupation, OccupationKey, PureState};

/// Beam splitter of transmissivity `t` between two spatial modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    t: f64,
    mode_a: usize,
    mode_b: usize,
}

impl BeamSplitter {
    pub fn new(t: f64, mode_a: usize, mode_b: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("transmissivity {} outside [0, 1]", t)));
        }
        if mode_a == mode_b {
            return Err(Error::InvalidArgument("beam splitter needs two distinct modes".into()));
        }
        Ok(BeamSplitter { t, mode_a, mode_b })
    }

    /// 50:50 beam splitter.
    pub fn balanced(mode_a: usize, mode_b: usize) -> Result<Self> {
        Self::new(0.5, mode_a, mode_b)
    }

    pub fn transmissivity(&self) -> f64 {
        self.t
    }

    pub fn modes(&self) -> (usize, usize) {
        (self.mode_a, self.mode_b)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Output amplitudes of |n⟩_a|m⟩_b (one polarization) on |p⟩_a|n+m−p⟩_b,
/// indexed by p.
fn bs_amplitudes(n: u32, m: u32, t: f64) -> Vec<f64> {
    let st = t.sqrt();
    let sr = (1.0 - t).sqrt();
    let total = n + m;
    let mut out = vec![0.0; total as usize + 1];
    // a†^n → Σ_i C(n,i) (√t a†)^i (√(1−t) b†)^{n−i}
    // b†^m → Σ_j C(m,j) (√(1−t) a†)^j (−√t b†)^{m−j}
    for i in 0..=n {
        let ci = binomial(n, i) * st.powi(i as i32) * sr.powi((n - i) as i32);
        if ci == 0.0 {
            continue;
        }
        for j in 0..=m {
            let sign = if (m - j) % 2 == 1 { -1.0 } else { 1.0 };
            let cj = binomial(m, j) * sr.powi(j as i32) * st.powi((m - j) as i32) * sign;
            out[(i + j) as usize] += ci * cj;
        }
    }
    let norm_in = ln_factorial(n) + ln_factorial(m);
    for (p, amp) in out.iter_mut().enumerate() {
        let p = p as u32;
        *amp *= (0.5 * (ln_factorial(p) + ln_factorial(total - p) - norm_in)).exp();
    }
    out
}

/// Applies a beam splitter. Output components exceeding the cutoff are
/// dropped, so the map is exactly unitary only when every polarization pair
/// carries at most `cutoff` photons.
pub fn apply_bs(state: &PureState, bs: &BeamSplitter) -> Result<PureState> {
    state.check_mode(bs.mode_a)?;
    state.check_mode(bs.mode_b)?;
    let (a, b) = (bs.mode_a, bs.mode_b);
    let cutoff = state.cutoff();
    let mut tables: HashMap<(u32, u32), Vec<f64>> = HashMap::new();
    let mut acc = Accumulator::new(state.mode_count(), cutoff);
    for (key, amp) in state.iter() {
        let (oa, ob) = (key[a], key[b]);
        for pair in [(oa.h, ob.h), (oa.v, ob.v)] {
            tables.entry(pair).or_insert_with(|| bs_amplitudes(pair.0, pair.1, bs.t));
        }
        let th = &tables[&(oa.h, ob.h)];
        let tv = &tables[&(oa.v, ob.v)];
        let (nh, nv) = (oa.h + ob.h, oa.v + ob.v);
        for (ph, ch) in th.iter().enumerate() {
            let ph = ph as u32;
            if *ch == 0.0 || ph > cutoff || nh - ph > cutoff {
                continue;
            }
            for (pv, cv) in tv.iter().enumerate() {
                let pv = pv as u32;
                if *cv == 0.0 || pv > cutoff || nv - pv > cutoff {
                    continue;
                }
                let mut k = key.clone();
                k[a] = Occupation::new(ph, pv);
                k[b] = Occupation::new(nh - ph, nv - pv);
                acc.add(k, amp * (ch * cv));
            }
        }
    }
    Ok(acc.finish(state.tolerance()))
}

/// Polarizing beam splitter: H content stays in place, V content of the two
/// modes is exchanged.
pub fn apply_pbs(state: &PureState, mode_a: usize, mode_b: usize) -> Result<PureState> {
    state.check_mode(mode_a)?;
    state.check_mode(mode_b)?;
    if mode_a == mode_b {
        return Err(Error::InvalidArgument("PBS needs two distinct modes".into()));
    }
    Ok(state.map_keys(|k| {
        let va = k[mode_a].v;
        k[mode_a].v = k[mode_b].v;
        k[mode_b].v = va;
    }))
}

/// Half-wave plate at 45°: exchanges the H and V occupations of one mode.
pub fn apply_hwp(state: &PureState, mode: usize) -> Result<PureState> {
    state.check_mode(mode)?;
    Ok(state.map_keys(|k| {
        let o = k[mode];
        k[mode] = Occupation::new(o.v, o.h);
    }))
}

/// Type-II two-mode squeezer, S = exp(ξK† − ξ*K) with
/// K = a_{s,H} a_{i,V} + a_{s,V} a_{i,H}, parameterized by Γ = tanh(iξ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Squeezer {
    gamma: Complex64,
    mode_s: usize,
    mode_i: usize,
}

impl Squeezer {
    pub fn new(gamma: Complex64, mode_s: usize, mode_i: usize) -> Result<Self> {
        if gamma.norm() >= 1.0 {
            return Err(Error::InvalidArgument(format!("|Γ| = {} must be < 1", gamma.norm())));
        }
        if mode_s == mode_i {
            return Err(Error::InvalidArgument("squeezer needs distinct signal and idle modes".into()));
        }
        Ok(Squeezer { gamma, mode_s, mode_i })
    }

    /// Squeezer specified through ξ, with Γ = tanh(iξ).
    pub fn from_xi(xi: Complex64, mode_s: usize, mode_i: usize) -> Result<Self> {
        Self::new(squeezing_parameter(xi), mode_s, mode_i)
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    pub fn modes(&self) -> (usize, usize) {
        (self.mode_s, self.mode_i)
    }
}

/// Γ = tanh(iξ).
pub fn squeezing_parameter(xi: Complex64) -> Complex64 {
    (Complex64::i() * xi).tanh()
}

/// K_n = (1 − |Γ|²)^{(n+2)/2}.
pub fn k_factor(gamma_abs: f64, n: u32) -> f64 {
    (1.0 - gamma_abs * gamma_abs).powf((n as f64 + 2.0) / 2.0)
}

/// Output of [`apply_squeezer_exact`].
#[derive(Debug, Clone)]
pub struct SqueezedState {
    pub state: PureState,
    /// Squared-norm lost to the cutoff and to amplitudes below tolerance.
    pub dropped_weight: f64,
}

/// Exact squeezer kernel on inputs whose idle mode is vacuum:
///
/// S|n_H,m_V⟩_s|0⟩_i = K_{n+m} Σ_{k,l} (−iΓ)^{k+l} (C(n+k,n) C(m+l,m))^{1/2}
///                      |(n+k)_H,(m+l)_V⟩_s |l_H,k_V⟩_i
///
/// The k, l sums stop at the cutoff, or once the remaining terms fall below
/// the state tolerance.
pub fn apply_squeezer_exact(state: &PureState, sq: &Squeezer) -> Result<SqueezedState> {
    let (s, i) = (sq.mode_s, sq.mode_i);
    state.check_mode(s)?;
    state.check_mode(i)?;
    if state.iter().any(|(k, _)| !k[i].is_vacuum()) {
        return Err(Error::IdleNotVacuum { mode: i });
    }
    let cutoff = state.cutoff();
    let tol = state.tolerance();
    let g = sq.gamma.norm();
    let step = Complex64::new(0.0, -1.0) * sq.gamma;
    let mut acc = Accumulator::new(state.mode_count(), cutoff);
    for (key, amp) in state.iter() {
        let Occupation { h: n, v: m } = key[s];
        let base = amp * k_factor(g, n + m);
        let mut pk = Complex64::new(1.0, 0.0);
        for k in 0..=(cutoff - n) {
            let ck = binomial(n + k, n).sqrt();
            let mut pl = pk;
            let mut k_row_alive = false;
            for l in 0..=(cutoff - m) {
                let v = base * pl * (ck * binomial(m + l, m).sqrt());
                let mag = v.norm();
                if mag >= tol {
                    k_row_alive = true;
                    let mut out = key.clone();
                    out[s] = Occupation::new(n + k, m + l);
                    out[i] = Occupation::new(l, k);
                    acc.add(out, v);
                } else if (m + l + 1) as f64 * g * g < (l + 1) as f64 {
                    // successive l terms shrink from here on
                    break;
                }
                pl *= step;
            }
            if !k_row_alive && (n + k + 1) as f64 * g * g < (k + 1) as f64 {
                break;
            }
            pk *= step;
        }
    }
    let out = acc.finish(tol);
    let dropped_weight = (state.norm_sqr() - out.norm_sqr()).max(0.0);
    Ok(SqueezedState { state: out, dropped_weight })
}

/// Adds `d` photons to both members of one (signal, idle) pair of K.
fn shift_pair(key: &OccupationKey, s: usize, i: usize, signal_h: bool, d: i32) -> OccupationKey {
    let mut k = key.clone();
    let add = |n: u32| (n as i32 + d) as u32;
    if signal_h {
        k[s].h = add(k[s].h);
        k[i].v = add(k[i].v);
    } else {
        k[s].v = add(k[s].v);
        k[i].h = add(k[i].h);
    }
    k
}

/// Applies X = ξK† − ξ*K to a state. Raises [`Error::SeriesOverflow`] when a
/// creation operator would exceed the cutoff.
fn apply_generator(state: &PureState, xi: Complex64, s: usize, i: usize) -> Result<PureState> {
    let cutoff = state.cutoff();
    let mut acc = Accumulator::new(state.mode_count(), cutoff);
    for (key, amp) in state.iter() {
        let (os, oi) = (key[s], key[i]);
        // (signal H, idle V) and (signal V, idle H) pairs
        for signal_h in [true, false] {
            let (ns, ni) = if signal_h { (os.h, oi.v) } else { (os.v, oi.h) };
            let shifted = |d: i32| shift_pair(key, s, i, signal_h, d);
            // ξ a†_s a†_i
            let up = amp * xi * (((ns + 1) * (ni + 1)) as f64).sqrt();
            if up != Complex64::default() {
                if ns + 1 > cutoff || ni + 1 > cutoff {
                    return Err(Error::SeriesOverflow { cutoff });
                }
                acc.add(shifted(1), up);
            }
            // −ξ* a_s a_i
            if ns > 0 && ni > 0 {
                acc.add(shifted(-1), -amp * xi.conj() * ((ns * ni) as f64).sqrt());
            }
        }
    }
    Ok(acc.finish(0.0))
}

/// Taylor expansion of exp(ξK† − ξ*K) to `order`, applied term by term.
/// Intended as an independent check of [`apply_squeezer_exact`] at small ξ.
pub fn apply_squeezer_series(
    state: &PureState,
    xi: Complex64,
    mode_s: usize,
    mode_i: usize,
    order: u32,
) -> Result<PureState> {
    state.check_mode(mode_s)?;
    state.check_mode(mode_i)?;
    if mode_s == mode_i {
        return Err(Error::InvalidArgument("squeezer needs distinct signal and idle modes".into()));
    }
    if order == 0 || order > 4 {
        return Err(Error::InvalidArgument(format!("series order {} outside 1..=4", order)));
    }
    let mut sum = state.with_tolerance(0.0);
    let mut term = sum.clone();
    for k in 1..=order {
        term = apply_generator(&term, xi, mode_s, mode_i)?
            .scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term)?;
    }
    Ok(sum.with_tolerance(state.tolerance()))
}
