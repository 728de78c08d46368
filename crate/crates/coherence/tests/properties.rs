//! Property-based invariants over randomized states and channels.

use coherence::freeze::{bistochastic_of, decompose_mixed_unitary, majorizes};
use coherence::json;
use coherence::linalg::{herm_eigenvalues, perm_matrix, CMatrix, Permutation};
use coherence::measures::{c_l1, c_re, dephase};
use coherence::sio::{random_channel, random_unitary_channel};
use coherence::states::{classify, mix, random_state, random_x_state, StateTag};
use coherence::xfreeze::decompose_x;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(d: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = CMatrix::zeros(d);
    for i in 0..d {
        m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in (i + 1)..d {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

fn random_perm(d: usize, seed: u64) -> Permutation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut map: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rng.gen_range(0..=i);
        map.swap(i, j);
    }
    Permutation::from_zero_based(map).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_sum_to_trace(d in 2usize..8, seed in any::<u64>()) {
        let m = random_hermitian(d, seed);
        let eigs = herm_eigenvalues(&m).unwrap();
        let sum: f64 = eigs.iter().sum();
        prop_assert!((sum - m.trace().re).abs() < 1e-9);
        // Sorted descending.
        prop_assert!(eigs.windows(2).all(|w| w[0] >= w[1] - 1e-12));
    }

    #[test]
    fn perm_matrix_is_multiplicative(d in 2usize..8, s1 in any::<u64>(), s2 in any::<u64>()) {
        let p = random_perm(d, s1);
        let q = random_perm(d, s2);
        let lhs = perm_matrix(&p).mul(&perm_matrix(&q));
        let rhs = perm_matrix(&p.compose(&q));
        prop_assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    #[test]
    fn conjugation_preserves_trace_and_hermiticity(d in 2usize..7, s1 in any::<u64>(), s2 in any::<u64>()) {
        let rho = random_state(d, s1);
        let u = perm_matrix(&random_perm(d, s2));
        let got = rho.mat().conjugate_by(&u).unwrap();
        prop_assert!((got.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(got.is_hermitian(1e-10));
    }

    #[test]
    fn state_json_round_trips(d in 2usize..8, seed in any::<u64>()) {
        let rho = random_state(d, seed);
        let back = json::state_from_str(&json::state_to_string(&rho)).unwrap();
        prop_assert!(rho.approx_eq(&back, 0.0));
    }

    #[test]
    fn channel_json_round_trips(d in 2usize..7, k in 1usize..4, seed in any::<u64>()) {
        let phi = random_channel(d, k, seed);
        let back = json::channel_from_str(&json::channel_to_string(&phi)).unwrap();
        prop_assert_eq!(phi, back);
    }

    #[test]
    fn apply_is_linear_and_trace_preserving(d in 2usize..6, seed in any::<u64>()) {
        let phi = random_channel(d, 2, seed);
        let rho = random_state(d, seed ^ 0x1111);
        let tau = random_state(d, seed ^ 0x2222);
        let mixed = mix(&[(0.4, rho.clone()), (0.6, tau.clone())]).unwrap();
        let lhs = phi.apply(&mixed).unwrap();
        let rhs = mix(&[
            (0.4, phi.apply(&rho).unwrap()),
            (0.6, phi.apply(&tau).unwrap()),
        ])
        .unwrap();
        prop_assert!(lhs.approx_eq(&rhs, 1e-10));
    }

    #[test]
    fn composition_closure(d in 2usize..6, seed in any::<u64>()) {
        let phi = random_channel(d, 2, seed);
        let psi = random_channel(d, 2, seed ^ 0xbeef);
        let comp = phi.compose(&psi).unwrap();
        prop_assert!(coherence::sio::validate_sio(&comp.dense_kraus()).is_ok());
    }

    #[test]
    fn random_x_states_classify_as_x(d in 2usize..9, seed in any::<u64>()) {
        let rho = random_x_state(d, seed).unwrap();
        prop_assert!(classify(&rho).in_omega_x);
    }

    #[test]
    fn measures_vanish_after_dephasing(d in 2usize..7, seed in any::<u64>()) {
        let rho = random_state(d, seed);
        let deph = dephase(&rho);
        prop_assert_eq!(classify(&deph).tag(), StateTag::Incoherent);
        prop_assert!(c_l1(&deph).value.abs() < 1e-12);
        prop_assert!(c_re(&deph).unwrap().value.abs() < 1e-9);
        prop_assert!(c_l1(&rho).value >= 0.0);
        prop_assert!(c_re(&rho).unwrap().value >= 0.0);
    }

    #[test]
    fn strictly_incoherent_unitaries_freeze_both_measures(d in 2usize..7, s1 in any::<u64>(), s2 in any::<u64>()) {
        let rho = random_state(d, s1);
        let phi = random_unitary_channel(d, s2);
        let sigma = phi.apply(&rho).unwrap();
        prop_assert!((c_l1(&rho).value - c_l1(&sigma).value).abs() < 1e-8);
        prop_assert!((c_re(&rho).unwrap().value - c_re(&sigma).unwrap().value).abs() < 1e-8);
    }

    #[test]
    fn mixed_unitary_channels_majorize_diagonals(d in 2usize..7, s1 in any::<u64>(), s2 in any::<u64>()) {
        let rho = random_state(d, s1);
        let phi = coherence::freeze::sample_two_perm_mixture(d, s2);
        let sigma = phi.apply(&rho).unwrap();
        let form = decompose_mixed_unitary(&phi).unwrap();
        let b = bistochastic_of(&form);
        let moved = b.apply(&rho.diagonal());
        for (a, e) in moved.iter().zip(sigma.diagonal()) {
            prop_assert!((a - e).abs() < 1e-10);
        }
        prop_assert!(majorizes(&rho.diagonal(), &sigma.diagonal()).unwrap());
    }

    #[test]
    fn x_decomposition_reassembles_and_adds_up(d in 2usize..9, seed in any::<u64>()) {
        let rho = random_x_state(d, seed).unwrap();
        let dec = decompose_x(&rho).unwrap();
        let back = dec.reassemble().unwrap();
        prop_assert!(rho.mat().max_abs_diff(back.mat()) <= 1e-10);

        let weight: f64 = dec.lambdas.iter().sum::<f64>() + dec.tail.unwrap_or(0.0);
        prop_assert!((weight - 1.0).abs() < 1e-10);

        let l1_blocks: f64 = dec
            .lambdas
            .iter()
            .zip(&dec.blocks)
            .map(|(l, b)| l * c_l1(b).value)
            .sum();
        prop_assert!((c_l1(&rho).value - l1_blocks).abs() < 1e-12);
        let re_blocks: f64 = dec
            .lambdas
            .iter()
            .zip(&dec.blocks)
            .map(|(l, b)| l * c_re(b).unwrap().value)
            .sum();
        prop_assert!((c_re(&rho).unwrap().value - re_blocks).abs() < 1e-7);
    }

    #[test]
    fn sio_channels_never_increase_coherence(d in 2usize..6, s1 in any::<u64>(), s2 in any::<u64>(), k in 1usize..4) {
        let rho = random_state(d, s1);
        let phi = random_channel(d, k, s2);
        let sigma = phi.apply(&rho).unwrap();
        prop_assert!(c_l1(&sigma).value <= c_l1(&rho).value + 1e-8);
        prop_assert!(c_re(&sigma).unwrap().value <= c_re(&rho).unwrap().value + 1e-8);
    }
}
