use proptest::prelude::*;

use pqs_core::elements::{apply_bs, apply_hwp, apply_squeezer_exact, apply_squeezer_series, BeamSplitter, Squeezer};
use pqs_core::scissors::{pqs1, pqs2, quantum_scissors};
use pqs_core::sources::{self, SourceParams};
use pqs_core::{Complex64, Occupation, OccupationKey, Polarization, PureState};

const CUTOFF: u32 = 4;

fn occupation(max: u32) -> impl Strategy<Value = Occupation> {
    (0..=max, 0..=max).prop_map(|(h, v)| Occupation::new(h, v))
}

fn amplitude() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

/// Random normalized state on `modes` modes with occupations up to `max`.
fn state(modes: usize, max: u32) -> impl Strategy<Value = PureState> {
    prop::collection::vec((prop::collection::vec(occupation(max), modes), amplitude()), 1..8).prop_filter_map(
        "zero norm",
        move |entries| {
            let s = PureState::from_entries(
                modes,
                CUTOFF,
                entries.into_iter().map(|(k, a)| (OccupationKey::new(k), a)),
            )
            .ok()?;
            (s.norm() > 1e-3).then(|| s.normalize().unwrap())
        },
    )
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

fn all_occupations(cutoff: u32) -> Vec<Occupation> {
    (0..=cutoff).flat_map(|h| (0..=cutoff).map(move |v| Occupation::new(h, v))).collect()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn projection_is_complete(s in state(3, 2), mode in 0usize..3) {
        let total: f64 = all_occupations(CUTOFF)
            .into_iter()
            .map(|o| s.project_number(&[(mode, o)]).unwrap().probability)
            .sum();
        prop_assert!((total - s.norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn tensor_preserves_factor_statistics(a in state(1, 2), b in state(1, 2), o in occupation(2)) {
        let p = a.tensor(&b).unwrap().project_number(&[(1, o)]).unwrap().probability;
        let q = b.marginal(0).unwrap().get(&o).copied().unwrap_or(0.0);
        prop_assert!((p - q).abs() < 1e-14);
    }

    #[test]
    fn inner_product_is_sesquilinear(a in state(2, 2), b in state(2, 2), c in amplitude(), theta in 0.0f64..6.3) {
        let ab = a.inner_product(&b).unwrap();
        prop_assert!((a.inner_product(&b.scale(c)).unwrap() - c * ab).norm() < 1e-12);
        prop_assert!((a.scale(c).inner_product(&b).unwrap() - c.conj() * ab).norm() < 1e-12);
        prop_assert!((b.inner_product(&a).unwrap() - ab.conj()).norm() < 1e-14);
        let phase = Complex64::from_polar(1.0, theta);
        let f = a.fidelity(&b).unwrap();
        prop_assert!((a.scale(phase).fidelity(&b).unwrap() - f).abs() < 1e-12);
        prop_assert!((a.fidelity(&b.scale(phase)).unwrap() - f).abs() < 1e-12);
    }

    #[test]
    fn dump_round_trips(s in state(2, 2)) {
        let back = PureState::parse_dump(&s.dump(0.0), CUTOFF).unwrap();
        prop_assert!((back.fidelity(&s).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn beam_splitter_is_self_inverse(s in state(2, 2), t in 0.0f64..=1.0) {
        let bs = BeamSplitter::new(t, 0, 1).unwrap();
        let back = apply_bs(&apply_bs(&s, &bs).unwrap(), &bs).unwrap();
        prop_assert!(back.fidelity(&s).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn beam_splitter_commutes_with_polarization_swap(s in state(2, 2), t in 0.0f64..=1.0) {
        let bs = BeamSplitter::new(t, 0, 1).unwrap();
        let swap = |x: &PureState| apply_hwp(&apply_hwp(x, 0).unwrap(), 1).unwrap();
        let one = apply_bs(&swap(&s), &bs).unwrap();
        let two = swap(&apply_bs(&s, &bs).unwrap());
        prop_assert!(one.fidelity(&two).unwrap() >= 1.0 - 1e-12);
        prop_assert!((one.inner_product(&two).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn squeezer_conserves_pair_differences(h in 0u32..=2, v in 0u32..=2, g in 0.0f64..0.15) {
        let input = PureState::basis(OccupationKey::new([Occupation::new(h, v), Occupation::VACUUM]), 12).unwrap();
        let out = apply_squeezer_exact(&input, &Squeezer::new(Complex64::new(0.0, g), 0, 1).unwrap()).unwrap();
        for (k, _) in out.state.iter() {
            prop_assert_eq!(k[0].h as i64 - k[1].v as i64, h as i64);
            prop_assert_eq!(k[0].v as i64 - k[1].h as i64, v as i64);
        }
    }

    #[test]
    fn qs_patterns_agree(s in state(2, 2), t in 0.05f64..0.95, pol in prop_oneof![Just(Polarization::H), Just(Polarization::V)]) {
        let outcomes = quantum_scissors(&s, 1, pol, t).unwrap();
        let firing: Vec<_> = outcomes.iter().filter(|o| o.probability > 1e-12).collect();
        for pair in firing.windows(2) {
            prop_assert!(pair[0].state.fidelity(&pair[1].state).unwrap() >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn pqs_outputs_stay_in_the_truncated_sector(s in state(2, 3), t in 0.05f64..0.95, g in 0.01f64..0.15) {
        for result in [pqs1(&s, 0, t).unwrap(), pqs2(&s, 0, Complex64::new(g, 0.0)).unwrap()] {
            prop_assert!(result.pattern_agreement >= 1.0 - 1e-9);
            if let Some(out) = result.state {
                for (k, a) in out.iter() {
                    if k[0].h > 1 || k[0].v > 1 {
                        prop_assert!(a.norm() <= 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn lambda_is_permutation_covariant(delta in 0.3f64..1.5, t0 in 0.1f64..0.9, t1 in 0.1f64..0.9, phi in 0.0f64..3.0) {
        let p = SourceParams::new(delta, phi, t0).with_splits(vec![t1]);
        let amps = p.amplitudes(3).unwrap();
        let direct = sources::lambda_state(&p, 3).unwrap();
        let swapped = sources::entangled_coherent(&[amps[2], amps[1], amps[0]], phi, p.cutoff).unwrap();
        let relabelled = swapped.move_mode(2, 0).unwrap().move_mode(1, 2).unwrap();
        prop_assert!(relabelled.fidelity(&direct).unwrap() >= 1.0 - 1e-12);
    }
}

#[test]
fn squeezer_exact_matches_series_up_to_two_photons() {
    let mut inputs = Vec::new();
    for h in 0..=2u32 {
        for v in 0..=(2 - h) {
            inputs.push(Occupation::new(h, v));
        }
    }
    for &r in &[0.01, 0.03, 0.05] {
        for k in 0..8 {
            let xi = Complex64::from_polar(r, k as f64 * std::f64::consts::PI / 4.0);
            for occ in &inputs {
                let input = PureState::basis(OccupationKey::new([*occ, Occupation::VACUUM]), 12).unwrap();
                let exact = apply_squeezer_exact(&input, &Squeezer::from_xi(xi, 0, 1).unwrap()).unwrap().state;
                let series = apply_squeezer_series(&input, xi, 0, 1, 3).unwrap();
                let f = exact.fidelity(&series).unwrap();
                assert!(f >= 1.0 - 1e-6, "ξ = {}, input {}: F = {}", xi, occ, f);
            }
        }
    }
}

#[test]
fn squeezer_columns_are_orthogonal() {
    let squeezer = Squeezer::new(Complex64::new(0.0, 0.12), 0, 1).unwrap();
    let outputs: Vec<PureState> = (0..=2u32)
        .flat_map(|h| (0..=2u32).map(move |v| Occupation::new(h, v)))
        .map(|o| {
            let input = PureState::basis(OccupationKey::new([o, Occupation::VACUUM]), 16).unwrap();
            apply_squeezer_exact(&input, &squeezer).unwrap().state
        })
        .collect();
    for (i, a) in outputs.iter().enumerate() {
        for b in &outputs[i + 1..] {
            assert!(a.inner_product(b).unwrap().norm() <= 1e-10);
        }
    }
}

#[test]
fn sources_circuit_matches_direct_on_grid() {
    for i in 0..5 {
        let delta = 0.2 + 1.8 * i as f64 / 4.0;
        for j in 0..5 {
            let t0 = 0.1 + 0.8 * j as f64 / 4.0;
            for phi in [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
                let p = SourceParams::new(delta, phi, t0);
                let f = sources::xi_circuit(&p).unwrap().fidelity(&sources::xi_direct(&p).unwrap()).unwrap();
                assert!(f >= 1.0 - 1e-9, "δ={} t0={} φ={}: {}", delta, t0, phi, f);
            }
        }
    }
}
