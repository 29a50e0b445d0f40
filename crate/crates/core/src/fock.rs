//! Pure states of several spatial modes, each carrying an H and a V
//! polarization sub-mode, stored sparsely in the photon-number basis.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Default magnitude below which amplitudes are discarded.
pub const DEFAULT_TOLERANCE: f64 = 1e-14;

/// Photon numbers of the two polarization sub-modes of one spatial mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Occupation {
    pub h: u32,
    pub v: u32,
}

impl Occupation {
    pub const VACUUM: Occupation = Occupation { h: 0, v: 0 };

    pub const fn new(h: u32, v: u32) -> Self {
        Occupation { h, v }
    }

    pub const fn total(self) -> u32 {
        self.h + self.v
    }

    pub fn is_vacuum(self) -> bool {
        self.h == 0 && self.v == 0
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.h, self.v)
    }
}

impl From<(u32, u32)> for Occupation {
    fn from((h, v): (u32, u32)) -> Self {
        Occupation { h, v }
    }
}

/// Basis label of a multimode ket: one [`Occupation`] per spatial mode.
///
/// Ordering is lexicographic over (mode index, n_h, n_v), which fixes the
/// order of serialized dumps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct OccupationKey(SmallVec<[Occupation; 6]>);

impl OccupationKey {
    pub fn new<I: IntoIterator<Item = Occupation>>(modes: I) -> Self {
        OccupationKey(modes.into_iter().collect())
    }

    pub fn vacuum(modes: usize) -> Self {
        OccupationKey(SmallVec::from_elem(Occupation::VACUUM, modes))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_photons(&self) -> u32 {
        self.0.iter().map(|o| o.total()).sum()
    }

    pub fn max_occupation(&self) -> u32 {
        self.0.iter().map(|o| o.h.max(o.v)).max().unwrap_or(0)
    }

    pub fn modes(&self) -> &[Occupation] {
        &self.0
    }

    pub fn modes_mut(&mut self) -> &mut [Occupation] {
        &mut self.0
    }

    pub fn push(&mut self, occ: Occupation) {
        self.0.push(occ);
    }

    pub fn remove(&mut self, index: usize) -> Occupation {
        self.0.remove(index)
    }

    pub fn insert(&mut self, index: usize, occ: Occupation) {
        self.0.insert(index, occ);
    }
}

impl std::ops::Index<usize> for OccupationKey {
    type Output = Occupation;

    fn index(&self, index: usize) -> &Occupation {
        &self.0[index]
    }
}

impl std::ops::IndexMut<usize> for OccupationKey {
    fn index_mut(&mut self, index: usize) -> &mut Occupation {
        &mut self.0[index]
    }
}

impl<const N: usize> From<[(u32, u32); N]> for OccupationKey {
    fn from(modes: [(u32, u32); N]) -> Self {
        OccupationKey::new(modes.into_iter().map(Occupation::from))
    }
}

impl fmt::Display for OccupationKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, occ) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "m{}:{}", i, occ)?;
        }
        Ok(())
    }
}

impl FromStr for OccupationKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed occupation key `{}`", s));
        let mut key = OccupationKey::default();
        for (i, field) in s.split(';').enumerate() {
            let (label, occ) = field.split_once(':').ok_or_else(bad)?;
            if label != format!("m{}", i) {
                return Err(bad());
            }
            let inner = occ
                .strip_prefix('(')
                .and_then(|o| o.strip_suffix(')'))
                .ok_or_else(bad)?;
            let (h, v) = inner.split_once(',').ok_or_else(bad)?;
            let h = h.trim().parse().map_err(|_| bad())?;
            let v = v.trim().parse().map_err(|_| bad())?;
            key.push(Occupation { h, v });
        }
        Ok(key)
    }
}

/// Sparse pure state over `mode_count` polarized spatial modes, truncated at
/// `cutoff` photons per polarization sub-mode.
///
/// Values are immutable once built; every operation returns a new state.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    mode_count: usize,
    cutoff: u32,
    tolerance: f64,
    amplitudes: BTreeMap<OccupationKey, Complex64>,
}

impl PureState {
    /// Builds a state from explicit basis amplitudes. Repeated keys add up.
    pub fn from_entries<I>(mode_count: usize, cutoff: u32, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationKey, Complex64)>,
    {
        if mode_count == 0 {
            return Err(Error::InvalidArgument("a state needs at least one mode".into()));
        }
        if cutoff == 0 {
            return Err(Error::InvalidArgument("cutoff must be positive".into()));
        }
        let mut acc = Accumulator::new(mode_count, cutoff);
        for (key, amp) in entries {
            if key.len() != mode_count {
                return Err(Error::KeyLength { expected: mode_count, found: key.len() });
            }
            if key.max_occupation() > cutoff {
                return Err(Error::CutoffExceeded { key: key.to_string(), cutoff });
            }
            acc.add(key, amp);
        }
        Ok(acc.finish(DEFAULT_TOLERANCE))
    }

    /// Vacuum over `mode_count` modes.
    pub fn vacuum(mode_count: usize, cutoff: u32) -> Result<Self> {
        Self::from_entries(
            mode_count,
            cutoff,
            [(OccupationKey::vacuum(mode_count), Complex64::new(1.0, 0.0))],
        )
    }

    /// Single basis ket with unit amplitude.
    pub fn basis(key: OccupationKey, cutoff: u32) -> Result<Self> {
        let n = key.len();
        Self::from_entries(n, cutoff, [(key, Complex64::new(1.0, 0.0))])
    }

    /// Same shape as `self` with no amplitudes.
    pub fn empty_like(&self) -> Self {
        PureState {
            mode_count: self.mode_count,
            cutoff: self.cutoff,
            tolerance: self.tolerance,
            amplitudes: BTreeMap::new(),
        }
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Returns a copy compacted against a different drop threshold.
    pub fn with_tolerance(&self, tolerance: f64) -> Self {
        let mut out = self.clone();
        out.tolerance = tolerance;
        out.amplitudes.retain(|_, a| a.norm() >= tolerance);
        out
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitude(&self, key: &OccupationKey) -> Complex64 {
        self.amplitudes.get(key).copied().unwrap_or_default()
    }

    /// Amplitudes in canonical key order.
    pub fn iter(&self) -> impl Iterator<Item = (&OccupationKey, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// True when the squared norm is within `10 * tolerance` of one.
    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 10.0 * self.tolerance
    }

    fn check_shape(&self, other: &PureState) -> Result<()> {
        if self.mode_count != other.mode_count || self.cutoff != other.cutoff {
            return Err(Error::ShapeMismatch {
                left: (self.mode_count, self.cutoff),
                right: (other.mode_count, other.cutoff),
            });
        }
        Ok(())
    }

    /// ⟨self|other⟩.
    pub fn inner_product(&self, other: &PureState) -> Result<Complex64> {
        self.check_shape(other)?;
        let (small, large, swap) = if self.len() <= other.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut sum = Complex64::default();
        for (key, a) in &small.amplitudes {
            if let Some(b) = large.amplitudes.get(key) {
                sum += if swap { b.conj() * a } else { a.conj() * b };
            }
        }
        Ok(sum)
    }

    /// |⟨a|b⟩|² / (‖a‖² ‖b‖²).
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        let na = self.norm_sqr();
        let nb = other.norm_sqr();
        if na == 0.0 || nb == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let overlap = self.inner_product(other)?;
        Ok((overlap.norm_sqr() / (na * nb)).min(1.0))
    }

    pub fn normalize(&self) -> Result<PureState> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> PureState {
        let mut out = self.empty_like();
        for (k, a) in &self.amplitudes {
            let v = a * factor;
            if v.norm() >= self.tolerance {
                out.amplitudes.insert(k.clone(), v);
            }
        }
        out
    }

    /// Sum of two states of equal shape.
    pub fn add(&self, other: &PureState) -> Result<PureState> {
        self.check_shape(other)?;
        let mut acc = Accumulator::new(self.mode_count, self.cutoff);
        for (k, a) in self.iter().chain(other.iter()) {
            acc.add(k.clone(), *a);
        }
        Ok(acc.finish(self.tolerance))
    }

    /// Tensor product; modes of `other` are appended after those of `self`.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        if self.cutoff != other.cutoff {
            return Err(Error::ShapeMismatch {
                left: (self.mode_count, self.cutoff),
                right: (other.mode_count, other.cutoff),
            });
        }
        let mut out = PureState {
            mode_count: self.mode_count + other.mode_count,
            cutoff: self.cutoff,
            tolerance: self.tolerance.min(other.tolerance),
            amplitudes: BTreeMap::new(),
        };
        for (ka, a) in &self.amplitudes {
            for (kb, b) in &other.amplitudes {
                let v = a * b;
                if v.norm() < out.tolerance {
                    continue;
                }
                let mut key = ka.clone();
                for occ in kb.modes() {
                    key.push(*occ);
                }
                out.amplitudes.insert(key, v);
            }
        }
        Ok(out)
    }

    /// Appends `count` vacuum modes.
    pub fn append_vacuum(&self, count: usize) -> PureState {
        let mut out = self.empty_like();
        out.mode_count += count;
        for (k, a) in &self.amplitudes {
            let mut key = k.clone();
            for _ in 0..count {
                key.push(Occupation::VACUUM);
            }
            out.amplitudes.insert(key, *a);
        }
        out
    }

    /// Moves mode `from` to position `to`, shifting the modes in between.
    pub fn move_mode(&self, from: usize, to: usize) -> Result<PureState> {
        self.check_mode(from)?;
        self.check_mode(to)?;
        if from == to {
            return Ok(self.clone());
        }
        Ok(self.map_keys(|key| {
            let occ = key.remove(from);
            key.insert(to, occ);
        }))
    }

    /// Applies a bijective relabelling of basis keys.
    pub(crate) fn map_keys<F: FnMut(&mut OccupationKey)>(&self, mut f: F) -> PureState {
        let mut out = self.empty_like();
        for (k, a) in &self.amplitudes {
            let mut key = k.clone();
            f(&mut key);
            out.amplitudes.insert(key, *a);
        }
        out
    }

    /// Multiplies every amplitude by a key-dependent phase or weight.
    pub fn map_amplitudes<F: Fn(&OccupationKey) -> Complex64>(&self, f: F) -> PureState {
        let mut out = self.empty_like();
        for (k, a) in &self.amplitudes {
            let v = a * f(k);
            if v.norm() >= self.tolerance {
                out.amplitudes.insert(k.clone(), v);
            }
        }
        out
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.mode_count {
            return Err(Error::ModeOutOfRange { mode, mode_count: self.mode_count });
        }
        Ok(())
    }

    /// Projects the listed modes onto definite photon numbers and removes
    /// them. The returned state is not renormalized; its squared norm is the
    /// outcome probability relative to a normalized input.
    pub fn project_unnormalized(&self, targets: &[(usize, Occupation)]) -> Result<PureState> {
        for (i, (m, _)) in targets.iter().enumerate() {
            self.check_mode(*m)?;
            if targets[..i].iter().any(|(o, _)| o == m) {
                return Err(Error::InvalidArgument(format!("mode {} measured twice", m)));
            }
        }
        if targets.len() >= self.mode_count {
            return Err(Error::InvalidArgument(
                "projection must leave at least one unmeasured mode".into(),
            ));
        }
        let mut removed: Vec<usize> = targets.iter().map(|(m, _)| *m).collect();
        removed.sort_unstable_by(|a, b| b.cmp(a));
        let mut out = self.empty_like();
        out.mode_count -= targets.len();
        for (k, a) in &self.amplitudes {
            if targets.iter().all(|(m, occ)| k[*m] == *occ) {
                let mut key = k.clone();
                for m in &removed {
                    key.remove(*m);
                }
                out.amplitudes.insert(key, *a);
            }
        }
        Ok(out)
    }

    /// Photon-number measurement of the listed modes.
    pub fn project_number(&self, targets: &[(usize, Occupation)]) -> Result<ProjectionOutcome> {
        let projected = self.project_unnormalized(targets)?;
        let probability = projected.norm_sqr();
        let conditional_state = if probability > 0.0 {
            projected.normalize()?
        } else {
            projected
        };
        Ok(ProjectionOutcome { probability, conditional_state })
    }

    /// Marginal photon-number distribution of one mode, in key order.
    pub fn marginal(&self, mode: usize) -> Result<BTreeMap<Occupation, f64>> {
        self.check_mode(mode)?;
        let mut dist = BTreeMap::new();
        for (k, a) in &self.amplitudes {
            *dist.entry(k[mode]).or_insert(0.0) += a.norm_sqr();
        }
        Ok(dist)
    }

    /// Canonical text dump: one `m0:(nH,nV);m1:(nH,nV) <re> <im>` line per
    /// key with magnitude at least `threshold`.
    pub fn dump(&self, threshold: f64) -> String {
        let mut s = String::new();
        for (k, a) in &self.amplitudes {
            if a.norm() >= threshold {
                s.push_str(&format!("{} {:.17e} {:.17e}\n", k, a.re, a.im));
            }
        }
        s
    }

    /// Parses [`PureState::dump`] output.
    pub fn parse_dump(text: &str, cutoff: u32) -> Result<PureState> {
        let mut entries = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let mut parts = line.split_whitespace();
            let bad = || Error::Parse(format!("malformed dump line `{}`", line));
            let key: OccupationKey = parts.next().ok_or_else(bad)?.parse()?;
            let re: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let im: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            entries.push((key, Complex64::new(re, im)));
        }
        let modes = entries
            .first()
            .map(|(k, _)| k.len())
            .ok_or_else(|| Error::Parse("empty dump".into()))?;
        PureState::from_entries(modes, cutoff, entries)
    }
}

/// Result of a photon-number projection.
#[derive(Debug, Clone)]
pub struct ProjectionOutcome {
    pub probability: f64,
    /// Normalized post-measurement state of the unmeasured modes; empty when
    /// the outcome has zero probability.
    pub conditional_state: PureState,
}

impl ProjectionOutcome {
    pub fn is_null(&self) -> bool {
        self.conditional_state.is_empty()
    }
}

/// Hash-map accumulator used by element applications before compaction into
/// the ordered representation.
pub(crate) struct Accumulator {
    mode_count: usize,
    cutoff: u32,
    map: HashMap<OccupationKey, Complex64>,
}

impl Accumulator {
    pub(crate) fn new(mode_count: usize, cutoff: u32) -> Self {
        Accumulator { mode_count, cutoff, map: HashMap::new() }
    }

    pub(crate) fn add(&mut self, key: OccupationKey, amp: Complex64) {
        *self.map.entry(key).or_default() += amp;
    }

    pub(crate) fn finish(self, tolerance: f64) -> PureState {
        PureState {
            mode_count: self.mode_count,
            cutoff: self.cutoff,
            tolerance,
            amplitudes: self.map.into_iter().filter(|(_, a)| a.norm() >= tolerance).collect(),
        }
    }
}

/// Coherent-state amplitude f_n(γ) = e^{−γ²/2} γⁿ / √n!.
pub fn poisson_amplitude(gamma: f64, n: u32) -> f64 {
    let mut v = (-0.5 * gamma * gamma).exp();
    for k in 1..=n {
        v *= gamma / (k as f64).sqrt();
    }
    v
}

/// Probability weight of a coherent state of amplitude `gamma` above `cutoff`
/// photons.
pub fn coherent_tail_weight(gamma: f64, cutoff: u32) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    // Summed from the tail side; 1 − Σ_{n≤cutoff} cancels catastrophically.
    let mean = gamma * gamma;
    let mut tail = 0.0;
    let mut term = poisson_amplitude(gamma, cutoff).powi(2);
    let mut n = cutoff;
    loop {
        n += 1;
        term *= mean / n as f64;
        tail += term;
        if (n as f64) > mean && term < tail * 1e-17 {
            break;
        }
        if term == 0.0 && (n as f64) > mean {
            break;
        }
    }
    tail
}

/// Smallest cutoff whose coherent tail for `gamma` is at most `max_tail`.
pub fn required_cutoff(gamma: f64, max_tail: f64) -> u32 {
    let mut c = 1;
    while coherent_tail_weight(gamma, c) > max_tail {
        c += 1;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn coherent_h(gamma: f64, cutoff: u32) -> PureState {
        PureState::from_entries(
            1,
            cutoff,
            (0..=cutoff).map(|n| (OccupationKey::from([(n, 0)]), c(poisson_amplitude(gamma, n)))),
        )
        .unwrap()
    }

    #[test]
    fn basis_ket_and_superposition() {
        let s = PureState::basis(OccupationKey::from([(1, 0)]), 4).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.is_normalized());

        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = PureState::from_entries(
            2,
            4,
            [
                (OccupationKey::from([(1, 0), (0, 0)]), c(r)),
                (OccupationKey::from([(0, 1), (0, 0)]), c(r)),
            ],
        )
        .unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cutoff_and_length_are_checked() {
        let e = PureState::basis(OccupationKey::from([(5, 0)]), 4).unwrap_err();
        assert!(matches!(e, Error::CutoffExceeded { .. }));
        let e = PureState::from_entries(2, 4, [(OccupationKey::from([(1, 0)]), c(1.0))]).unwrap_err();
        assert!(matches!(e, Error::KeyLength { expected: 2, found: 1 }));
    }

    #[test]
    fn inner_products_of_basis_kets() {
        let h = PureState::basis(OccupationKey::from([(1, 0)]), 4).unwrap();
        let v = PureState::basis(OccupationKey::from([(0, 1)]), 4).unwrap();
        assert_eq!(h.inner_product(&h).unwrap(), c(1.0));
        assert_eq!(h.inner_product(&v).unwrap(), c(0.0));
        assert_eq!(h.fidelity(&h).unwrap(), 1.0);
        assert_eq!(h.fidelity(&v).unwrap(), 0.0);
    }

    #[test]
    fn coherent_overlaps() {
        // ⟨1|−1⟩ = e^{−2}; |⟨1|0.9⟩|² = e^{−0.01}
        let a = coherent_h(1.0, 30);
        let b = coherent_h(-1.0, 30);
        let ip = a.inner_product(&b).unwrap();
        assert!((ip.re - 0.1353352832366127).abs() < 1e-12);
        let f = a.fidelity(&coherent_h(0.9, 30)).unwrap();
        assert!((f - 0.9900498337491681).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = PureState::vacuum(1, 4).unwrap();
        let b = PureState::vacuum(2, 4).unwrap();
        assert!(matches!(a.inner_product(&b), Err(Error::ShapeMismatch { .. })));
        let b = PureState::vacuum(1, 5).unwrap();
        assert!(a.tensor(&b).is_err());
    }

    #[test]
    fn zero_norm_fidelity_and_normalize() {
        let a = PureState::vacuum(1, 4).unwrap();
        let z = a.empty_like();
        assert!(matches!(a.fidelity(&z), Err(Error::ZeroNorm)));
        assert!(matches!(z.normalize(), Err(Error::ZeroNorm)));
    }

    #[test]
    fn normalize_rescales() {
        let s = PureState::from_entries(1, 4, [(OccupationKey::from([(1, 0)]), c(2.0))]).unwrap();
        let n = s.normalize().unwrap();
        assert_eq!(n.amplitude(&OccupationKey::from([(1, 0)])), c(1.0));
        let again = n.normalize().unwrap();
        assert_eq!(again, n);
    }

    #[test]
    fn tensor_and_vacuum_projection() {
        let h = PureState::basis(OccupationKey::from([(1, 0)]), 4).unwrap();
        let vac = PureState::vacuum(1, 4).unwrap();
        let t = h.tensor(&vac).unwrap();
        assert_eq!(t.mode_count(), 2);
        assert_eq!(t.amplitude(&OccupationKey::from([(1, 0), (0, 0)])), c(1.0));

        let a = coherent_h(1.0, 30);
        let pair = a.tensor(&a).unwrap().append_vacuum(1);
        let out = pair
            .project_number(&[(0, Occupation::VACUUM), (1, Occupation::VACUUM)])
            .unwrap();
        assert!((out.probability - (-2.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn projection_examples() {
        let a = coherent_h(1.0, 30).append_vacuum(1);
        let out = a.project_number(&[(0, Occupation::VACUUM)]).unwrap();
        assert!((out.probability - (-1.0f64).exp()).abs() < 1e-15);

        let h = PureState::basis(OccupationKey::from([(1, 0), (0, 0)]), 4).unwrap();
        let out = h.project_number(&[(0, Occupation::new(1, 1))]).unwrap();
        assert_eq!(out.probability, 0.0);
        assert!(out.is_null());

        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = PureState::from_entries(
            2,
            4,
            [
                (OccupationKey::from([(1, 0), (0, 0)]), c(r)),
                (OccupationKey::from([(0, 1), (0, 0)]), c(r)),
            ],
        )
        .unwrap();
        let out = s.project_number(&[(0, Occupation::new(1, 0))]).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-15);
        assert_eq!(out.conditional_state.mode_count(), 1);
        assert!((out.conditional_state.amplitude(&OccupationKey::vacuum(1)) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn projection_rejects_bad_targets() {
        let s = PureState::vacuum(2, 4).unwrap();
        assert!(s.project_number(&[(2, Occupation::VACUUM)]).is_err());
        assert!(s
            .project_number(&[(0, Occupation::VACUUM), (0, Occupation::VACUUM)])
            .is_err());
        assert!(s
            .project_number(&[(0, Occupation::VACUUM), (1, Occupation::VACUUM)])
            .is_err());
    }

    #[test]
    fn tail_weights() {
        assert_eq!(coherent_tail_weight(0.0, 5), 0.0);
        assert!(coherent_tail_weight(1.0, 10) < 1e-7);
        assert!(coherent_tail_weight(1.0, 10) > 0.0);
        // mpmath reference values of the Poisson tail at mean 8
        let g = 2.0 * 2f64.sqrt();
        assert!((coherent_tail_weight(g, 30) / 5.369732955108574e-10 - 1.0).abs() < 1e-9);
        assert!((coherent_tail_weight(g, 35) / 3.726574945580752e-13 - 1.0).abs() < 1e-9);
        assert_eq!(required_cutoff(g, 1e-12), 35);
        let mut prev = 1.0;
        for c in 0..40 {
            let w = coherent_tail_weight(1.5, c);
            assert!(w <= prev);
            prev = w;
        }
    }

    #[test]
    fn tail_weight_matches_direct_sum_at_low_cutoff() {
        for &g in &[0.3, 1.0, 2.2] {
            for cutoff in 0..6 {
                let kept: f64 = (0..=cutoff).map(|n| poisson_amplitude(g, n).powi(2)).sum();
                assert!((coherent_tail_weight(g, cutoff) - (1.0 - kept)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn dump_roundtrip() {
        let s = PureState::from_entries(
            2,
            3,
            [
                (OccupationKey::from([(0, 1), (2, 0)]), Complex64::new(0.25, -0.5)),
                (OccupationKey::from([(1, 0), (0, 0)]), Complex64::new(-0.125, 0.0)),
            ],
        )
        .unwrap();
        let text = s.dump(0.0);
        assert_eq!(text.lines().next().unwrap().split(' ').next().unwrap(), "m0:(0,1);m1:(2,0)");
        assert_eq!(PureState::parse_dump(&text, 3).unwrap(), s);
    }

    #[test]
    fn move_mode_reorders_keys() {
        let s = PureState::basis(OccupationKey::from([(1, 0), (0, 2), (3, 0)]), 4).unwrap();
        let m = s.move_mode(2, 0).unwrap();
        assert_eq!(m.amplitude(&OccupationKey::from([(3, 0), (1, 0), (0, 2)])), c(1.0));
    }
}
