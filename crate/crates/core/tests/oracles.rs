//! Cross-checks of the library against independent brute-force oracles:
//! reduced densities by direct index contraction over raw amplitudes,
//! embedded operations by explicit amplitude permutation, and densities by
//! direct outer products. None of these share code paths with the library
//! routines they check.

use num_complex::Complex64;
use qcorr_core::entropy;
use qcorr_core::linalg::{embed_unitary, kron, ComplexMatrix, SubsystemLayout};
use qcorr_core::random;
use qcorr_core::state::{product, QuantumState};
use qcorr_core::swap::{self, SwapInput};

use std::f64::consts::LN_2;

/// Reduced density on `keep` from raw amplitudes, by direct contraction:
/// rho[i,j] = sum over environment digits of psi[i,env] conj(psi[j,env]).
#[allow(clippy::needless_range_loop)] // deliberately naive index loops
fn brute_reduced_density(
    amps: &[Complex64],
    dims: &[usize],
    keep: &[usize],
) -> Vec<Vec<Complex64>> {
    let n = dims.len();
    let env: Vec<usize> = (0..n).filter(|p| !keep.contains(p)).collect();
    let kept_dim: usize = keep.iter().map(|&p| dims[p]).product();
    let env_dim: usize = env.iter().map(|&p| dims[p]).product();

    let digits = |mut index: usize, slots: &[usize]| -> Vec<usize> {
        let mut out = vec![0; slots.len()];
        for (k, &p) in slots.iter().enumerate().rev() {
            out[k] = index % dims[p];
            index /= dims[p];
        }
        out
    };
    let full_index = |kd: &[usize], ed: &[usize]| -> usize {
        let mut all = vec![0usize; n];
        for (k, &p) in keep.iter().enumerate() {
            all[p] = kd[k];
        }
        for (k, &p) in env.iter().enumerate() {
            all[p] = ed[k];
        }
        let mut idx = 0;
        for (p, &d) in all.iter().enumerate() {
            idx = idx * dims[p] + d;
        }
        idx
    };

    let mut rho = vec![vec![Complex64::ZERO; kept_dim]; kept_dim];
    for i in 0..kept_dim {
        for j in 0..kept_dim {
            let di = digits(i, keep);
            let dj = digits(j, keep);
            for e in 0..env_dim {
                let de = digits(e, &env);
                rho[i][j] += amps[full_index(&di, &de)] * amps[full_index(&dj, &de)].conj();
            }
        }
    }
    rho
}

fn max_diff(rho: &[Vec<Complex64>], m: &ComplexMatrix) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in rho.iter().enumerate() {
        for (j, &z) in row.iter().enumerate() {
            worst = worst.max((z - m.get(i, j)).norm());
        }
    }
    worst
}

fn bell_product() -> QuantumState {
    product(&[
        QuantumState::bell_pair("1", "2").unwrap(),
        QuantumState::bell_pair("3", "4").unwrap(),
    ])
    .unwrap()
}

#[test]
fn bell_product_density_matches_outer_product_of_16_vector() {
    // Oracle: the 16-component vector built by hand, then its outer product.
    let h = 0.5; // (1/sqrt(2))^2
    let mut psi = vec![Complex64::ZERO; 16];
    for (q12, q34) in [(0usize, 0usize), (0, 3), (3, 0), (3, 3)] {
        // q12 spans qubits 1,2 (high bits); q34 spans qubits 3,4.
        psi[q12 * 4 + q34] = Complex64::new(h, 0.0);
    }
    let oracle = ComplexMatrix::from_fn(16, 16, |i, j| psi[i] * psi[j].conj());

    let bell = QuantumState::bell_pair("1", "2").unwrap().density();
    let other = QuantumState::bell_pair("3", "4").unwrap().density();
    assert!(kron(&bell, &other).max_abs_diff(&oracle) < 1e-15);
    assert!(bell_product().density().max_abs_diff(&oracle) < 1e-15);
}

#[test]
fn partial_trace_of_bell_product_keep_ends() {
    let state = bell_product();
    let amps = state.amplitudes().unwrap();
    let oracle = brute_reduced_density(amps, &[2, 2, 2, 2], &[0, 3]);
    let reduced = state.reduced_density(&["1", "4"]).unwrap();
    assert!(max_diff(&oracle, &reduced) < 1e-15);
    // And both equal (I/2) (x) (I/2).
    let expected = ComplexMatrix::identity(4).scale_re(0.25);
    assert!(reduced.max_abs_diff(&expected) < 1e-15);
}

#[test]
fn partial_trace_matches_brute_force_on_random_states() {
    let mut rng = random::seeded_rng(2024);
    let layout = SubsystemLayout::qubits(4);
    for _ in 0..25 {
        let state = random::random_pure_state(&layout, &mut rng);
        let amps = state.amplitudes().unwrap();
        for (keep_labels, keep_pos) in [
            (vec!["1"], vec![0usize]),
            (vec!["2", "4"], vec![1, 3]),
            (vec!["1", "2", "3"], vec![0, 1, 2]),
        ] {
            let oracle = brute_reduced_density(amps, &[2, 2, 2, 2], &keep_pos);
            let reduced = state.reduced_density(&keep_labels).unwrap();
            assert!(max_diff(&oracle, &reduced) < 1e-13);
        }
    }
}

#[test]
fn embedded_swap_permutes_amplitudes() {
    // Oracle: exchanging subsystems 2 and 3 maps amplitude index
    // (q1,q2,q3,q4) -> (q1,q3,q2,q4).
    let swap_gate = ComplexMatrix::from_fn(4, 4, |i, j| {
        let (r0, r1) = (i / 2, i % 2);
        let (c0, c1) = (j / 2, j % 2);
        if r0 == c1 && r1 == c0 {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    });
    let layout = SubsystemLayout::qubits(4);
    let mut rng = random::seeded_rng(31);
    for _ in 0..10 {
        let state = random::random_pure_state(&layout, &mut rng);
        let amps = state.amplitudes().unwrap();
        let mut expected = vec![Complex64::ZERO; 16];
        for (i, &z) in amps.iter().enumerate() {
            let d = layout.unravel(i);
            expected[layout.ravel(&[d[0], d[2], d[1], d[3]])] = z;
        }
        let swapped = state.apply_unitary(&swap_gate, &["2", "3"]).unwrap();
        for (a, b) in swapped.amplitudes().unwrap().iter().zip(&expected) {
            assert!((a - b).norm() < 1e-14);
        }
    }
    // |0110> is a fixed point of swapping the middle qubits.
    let basis = QuantumState::basis(layout.clone(), &[0, 1, 1, 0]).unwrap();
    let swapped = basis.apply_unitary(&swap_gate, &["2", "3"]).unwrap();
    let idx = layout.ravel(&[0, 1, 1, 0]);
    assert!((swapped.amplitudes().unwrap()[idx].norm() - 1.0).abs() < 1e-14);

    // The embedded matrix itself agrees with entrywise construction.
    let embedded = embed_unitary(&swap_gate, &layout, &["2", "3"]).unwrap();
    let oracle = ComplexMatrix::from_fn(16, 16, |i, j| {
        let di = layout.unravel(i);
        let dj = layout.unravel(j);
        if di[0] == dj[0] && di[3] == dj[3] && di[1] == dj[2] && di[2] == dj[1] {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    });
    assert!(embedded.max_abs_diff(&oracle) < 1e-15);
}

#[test]
fn partially_entangled_pair_density_diagonal() {
    // Oracle: outer product of the 4-amplitude product vector gives the
    // diagonal (21/32, 3/32, 7/32, 1/32) at indices 0, 3, 12, 15.
    let input = SwapInput::from_squares(0.75, 7.0 / 8.0).unwrap();
    let state = input.state().unwrap();
    let rho = state.density();
    let expected = [
        (0usize, 21.0 / 32.0),
        (3, 3.0 / 32.0),
        (12, 7.0 / 32.0),
        (15, 1.0 / 32.0),
    ];
    for (idx, value) in expected {
        assert!((rho.get(idx, idx).re - value).abs() < 1e-14);
    }
    let diag_sum: f64 = (0..16).map(|i| rho.get(i, i).re).sum();
    assert!((diag_sum - 1.0).abs() < 1e-13);
}

#[test]
fn bell_measurement_of_worked_example_via_generic_pipeline() {
    // The full-system measurement pipeline, checked against the frozen
    // worked-example values.
    let input = SwapInput::from_squares(0.75, 7.0 / 8.0).unwrap();
    let state = input.state().unwrap();
    let outcomes = state
        .projective_measure(&swap::bell_basis(), &["2", "3"])
        .unwrap();
    assert!((outcomes[0].probability - 11.0 / 32.0).abs() < 1e-13);
    let post = outcomes[0].state.as_ref().unwrap();
    let rho1 = post.reduced_density(&["1"]).unwrap();
    assert!((rho1.get(0, 0).re - 21.0 / 22.0).abs() < 1e-12);
    assert!((rho1.get(1, 1).re - 1.0 / 22.0).abs() < 1e-12);
    // Entanglement entropy of the post-measurement {1,4} cut, against the
    // frozen scalar value.
    let e = entropy::entropy_of_entanglement(post, &["1"]).unwrap();
    assert!((e - 0.18490739916777568).abs() < 1e-12);
}

#[test]
fn eq14_subset_entropies_from_reduced_spectra() {
    // Entropy values pinned by hand-computable spectra: every single-qubit
    // reduction of the Bell-pair product is I/2, the {2,3} reduction is
    // I/4, and the global state is pure.
    let state = bell_product();
    for label in ["1", "2", "3", "4"] {
        let s = entropy::subset_entropy(&state, &[label]).unwrap();
        assert!((s - LN_2).abs() < 1e-12);
    }
    let s23 = entropy::subset_entropy(&state, &["2", "3"]).unwrap();
    assert!((s23 - 2.0 * LN_2).abs() < 1e-12);
    let s_all = entropy::subset_entropy(&state, &["1", "2", "3", "4"]).unwrap();
    assert!(s_all.abs() < 1e-12);
}
