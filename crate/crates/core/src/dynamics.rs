//! Time evolution under embedded Hamiltonians and numerical checks of the
//! three- and four-system correlation theorems.
//!
//! Units are dimensionless: hbar = 1 and any coupling constant is folded
//! into the Hamiltonian, so only the product (energy x time) matters.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::entropy::CorrelationReport;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, SubsystemLayout};
use crate::partition;
use crate::random;
use crate::state::QuantumState;

/// Residual tolerance for the identity and monotonicity checks.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Threshold above which an "initially uncorrelated" precondition fails.
pub const UNCORRELATED_TOL: f64 = 1e-8;

/// Unitary `exp(-i H t)` of a Hermitian matrix, via eigendecomposition.
pub fn evolution_operator(hamiltonian: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let (values, vectors) = linalg::hermitian_eigen(hamiltonian)?;
    let n = values.len();
    let phases = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, -values[i] * t)
        } else {
            Complex64::ZERO
        }
    });
    Ok(&(&vectors * &phases) * &vectors.adjoint())
}

/// A time series of correlation reports along a unitary evolution.
#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    /// Report of the initial state (t = 0).
    pub initial: CorrelationReport,
    /// One report per entry of `times`.
    pub reports: Vec<CorrelationReport>,
    /// Max drift over the trace of each structurally invariant entropy
    /// subset and correlation.
    pub invariant_drift: BTreeMap<String, f64>,
    pub acts_on: Vec<String>,
}

impl EvolutionTrace {
    pub fn max_invariant_drift(&self) -> f64 {
        self.invariant_drift.values().copied().fold(0.0, f64::max)
    }
}

/// Evolve `state` under `exp(-i H t)` embedded on `acts_on`, recording the
/// full correlation census at every requested time.
pub fn evolve_trace<S: AsRef<str>>(
    state: &QuantumState,
    hamiltonian: &ComplexMatrix,
    acts_on: &[S],
    times: &[f64],
) -> Result<EvolutionTrace> {
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::PreconditionViolated(
            "times must be strictly increasing".into(),
        ));
    }
    let layout = state.layout();
    let acts_dim: usize = layout
        .positions(acts_on)?
        .iter()
        .map(|&p| layout.dims()[p])
        .product();
    if hamiltonian.rows() != acts_dim || hamiltonian.cols() != acts_dim {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian is {}x{} but acts_on has product dimension {acts_dim}",
            hamiltonian.rows(),
            hamiltonian.cols()
        )));
    }
    // Fails here with NotHermitian for bad input; the eigendecomposition it
    // produces also powers every U(t) below.
    let (values, vectors) = linalg::hermitian_eigen(hamiltonian)?;

    let initial = CorrelationReport::full(state, "t=0")?;
    let invariants = partition::invariant_entropies(layout, acts_on)?;
    let invariant_keys: Vec<String> = invariants
        .invariant_entropy_subsets
        .iter()
        .map(|s| crate::entropy::subset_key(layout, s))
        .collect::<Result<_>>()?;

    let mut drift: BTreeMap<String, f64> = invariant_keys
        .iter()
        .map(|k| (format!("S_{k}"), 0.0))
        .collect();
    for name in &invariants.invariant_correlations {
        drift.insert(name.clone(), 0.0);
    }

    let n = values.len();
    let mut reports = Vec::with_capacity(times.len());
    for &t in times {
        let phases = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, -values[i] * t)
            } else {
                Complex64::ZERO
            }
        });
        let u = &(&vectors * &phases) * &vectors.adjoint();
        let evolved = state.apply_unitary(&u, acts_on)?;
        let report = CorrelationReport::full(&evolved, format!("t={t}"))?;

        for key in &invariant_keys {
            let d = (report.subset_entropies[key] - initial.subset_entropies[key]).abs();
            let slot = drift.get_mut(&format!("S_{key}")).unwrap();
            *slot = slot.max(d);
        }
        for name in &invariants.invariant_correlations {
            let v0 = initial.correlation_named(name)?;
            let v1 = report.correlation_named(name)?;
            let slot = drift.get_mut(name).unwrap();
            *slot = slot.max((v1 - v0).abs());
        }
        reports.push(report);
    }

    Ok(EvolutionTrace {
        times: times.to_vec(),
        initial,
        reports,
        invariant_drift: drift,
        acts_on: acts_on.iter().map(|l| l.as_ref().to_string()).collect(),
    })
}

/// Per-time residuals of one identity along a trace.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub holds: bool,
}

fn labels_of(trace: &EvolutionTrace) -> Vec<String> {
    trace.initial.layout().labels().to_vec()
}

/// Check the three-system identity
/// `I_12(0) - I_12(t) = E_3{12}(t) - I_23(t)` along a trace whose layout is
/// three blocks with the interaction on the last two and the third system
/// initially uncorrelated.
pub fn check_three_system_identity(trace: &EvolutionTrace) -> Result<IdentityReport> {
    let labels = labels_of(trace);
    if labels.len() != 3 {
        return Err(Error::PreconditionViolated(format!(
            "expected a 3-block system, found {} blocks",
            labels.len()
        )));
    }
    let (l1, l2, l3) = (labels[0].as_str(), labels[1].as_str(), labels[2].as_str());
    let e3_initial = trace.initial.correlation(&[&[l3], &[l1, l2]])?;
    if e3_initial > UNCORRELATED_TOL {
        return Err(Error::PreconditionViolated(format!(
            "system {l3} initially correlated: E = {e3_initial:.3e}"
        )));
    }
    let i12_initial = trace.initial.correlation(&[&[l1], &[l2]])?;

    let mut residuals = Vec::with_capacity(trace.reports.len());
    for report in &trace.reports {
        let i12 = report.correlation(&[&[l1], &[l2]])?;
        let e3 = report.correlation(&[&[l3], &[l1, l2]])?;
        let i23 = report.correlation(&[&[l2], &[l3]])?;
        residuals.push(((i12_initial - i12) - (e3 - i23)).abs());
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(IdentityReport {
        residuals,
        max_residual,
        holds: max_residual <= RESIDUAL_TOL,
    })
}

/// Report of the four-system total-correlation additivity check.
#[derive(Debug, Clone)]
pub struct AdditivityReport {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Worst violation of `I_total(t) >= I_total(0)`.
    pub worst_decrease: f64,
    pub holds: bool,
}

/// Check `I_1234(t) = I_1234(0) + I_23(t)` and the total-correlation
/// monotonicity along a 4-block trace with interaction on the middle two
/// blocks and the {12}/{34} halves initially uncorrelated.
pub fn check_total_correlation_additivity(trace: &EvolutionTrace) -> Result<AdditivityReport> {
    let labels = labels_of(trace);
    if labels.len() != 4 {
        return Err(Error::PreconditionViolated(format!(
            "expected a 4-block system, found {} blocks",
            labels.len()
        )));
    }
    let (l1, l2, l3, l4) = (
        labels[0].as_str(),
        labels[1].as_str(),
        labels[2].as_str(),
        labels[3].as_str(),
    );
    let halves = trace.initial.correlation(&[&[l1, l2], &[l3, l4]])?;
    if halves > UNCORRELATED_TOL {
        return Err(Error::PreconditionViolated(format!(
            "halves initially correlated: E = {halves:.3e}"
        )));
    }
    let singles: [&[&str]; 4] = [&[l1], &[l2], &[l3], &[l4]];
    let total_initial = trace.initial.correlation(&singles)?;

    let mut residuals = Vec::with_capacity(trace.reports.len());
    let mut worst_decrease = 0.0f64;
    for report in &trace.reports {
        let total = report.correlation(&singles)?;
        let i23 = report.correlation(&[&[l2], &[l3]])?;
        residuals.push((total - total_initial - i23).abs());
        worst_decrease = worst_decrease.max(total_initial - total);
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(AdditivityReport {
        residuals,
        max_residual,
        worst_decrease,
        holds: max_residual <= RESIDUAL_TOL && worst_decrease <= RESIDUAL_TOL,
    })
}

/// Report of the extreme-initial-state sweeps.
#[derive(Debug, Clone)]
pub struct ExtremesReport {
    /// Largest `I_12(t)` seen from the maximally mixed uncorrelated start.
    pub max_correlation_from_mixed: f64,
    /// Initial correlation of the maximally correlated pure start.
    pub initial_correlation_pure: f64,
    /// Largest `I_12(t) - I_12(0)` from the maximally correlated start.
    pub worst_increase_from_correlated: f64,
    /// Largest `I_12(t)` from the pure uncorrelated start (negative
    /// control: this one is expected to grow).
    pub max_correlation_from_pure_product: f64,
    pub holds: bool,
}

/// Sweep random Hamiltonians over the extreme two-block initial states:
/// maximally mixed uncorrelated (no correlation can develop), maximally
/// correlated pure (correlation can only fall), and pure uncorrelated (a
/// negative control where correlation does develop).
pub fn check_initial_state_extremes(
    dims: (usize, usize),
    trials: usize,
    times_per_trial: usize,
    seed: u64,
) -> Result<ExtremesReport> {
    let (d1, d2) = dims;
    let layout = SubsystemLayout::new(vec![d1, d2], vec!["1".into(), "2".into()])?;
    let total = d1 * d2;
    let both = ["1".to_string(), "2".to_string()];
    let times: Vec<f64> = (1..=times_per_trial).map(|k| 0.35 * k as f64).collect();

    let mixed = QuantumState::mixed(
        ComplexMatrix::identity(total).scale_re(1.0 / total as f64),
        layout.clone(),
    )?;

    // Maximally correlated pure state: sum_k |kk> / sqrt(min(d1, d2)).
    let entangled_rank = d1.min(d2);
    let mut amplitudes = vec![Complex64::ZERO; total];
    for k in 0..entangled_rank {
        amplitudes[k * d2 + k] = Complex64::ONE;
    }
    let correlated = QuantumState::pure(amplitudes, layout.clone())?;
    let initial_correlation_pure =
        crate::entropy::index_of_correlation(&correlated, &[&["1"], &["2"]])?;

    let product = QuantumState::basis(layout, &[0, 0])?;

    let mut rng = random::seeded_rng(seed);
    let mut max_mixed = 0.0f64;
    let mut worst_increase = 0.0f64;
    let mut max_pure_product = 0.0f64;
    for _ in 0..trials {
        let h = random::random_hermitian(total, &mut rng);
        let trace_mixed = evolve_trace(&mixed, &h, &both, &times)?;
        let trace_corr = evolve_trace(&correlated, &h, &both, &times)?;
        let trace_prod = evolve_trace(&product, &h, &both, &times)?;
        for k in 0..times.len() {
            let i_mixed = trace_mixed.reports[k].correlation(&[&["1"], &["2"]])?;
            let i_corr = trace_corr.reports[k].correlation(&[&["1"], &["2"]])?;
            let i_prod = trace_prod.reports[k].correlation(&[&["1"], &["2"]])?;
            max_mixed = max_mixed.max(i_mixed);
            worst_increase = worst_increase.max(i_corr - initial_correlation_pure);
            max_pure_product = max_pure_product.max(i_prod);
        }
    }

    Ok(ExtremesReport {
        max_correlation_from_mixed: max_mixed,
        initial_correlation_pure,
        worst_increase_from_correlated: worst_increase,
        max_correlation_from_pure_product: max_pure_product,
        holds: max_mixed <= RESIDUAL_TOL && worst_increase <= RESIDUAL_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::product;
    use std::f64::consts::LN_2;

    fn bell_and_ground() -> QuantumState {
        let bell = QuantumState::bell_pair("1", "2").unwrap();
        let ground = QuantumState::basis(
            SubsystemLayout::new(vec![2], vec!["3".into()]).unwrap(),
            &[0],
        )
        .unwrap();
        product(&[bell, ground]).unwrap()
    }

    #[test]
    fn zero_hamiltonian_changes_nothing() {
        let state = bell_and_ground();
        let h = ComplexMatrix::zeros(4, 4);
        let trace = evolve_trace(&state, &h, &["2", "3"], &[0.5, 1.0, 2.0]).unwrap();
        for report in &trace.reports {
            for (k, v) in &trace.initial.subset_entropies {
                assert!((report.subset_entropies[k] - v).abs() < 1e-12);
            }
        }
        assert!(trace.max_invariant_drift() < 1e-12);
    }

    #[test]
    fn spectator_entropy_is_invariant() {
        let state = bell_and_ground();
        let mut rng = crate::random::seeded_rng(3);
        let h = crate::random::random_hermitian(4, &mut rng);
        let times: Vec<f64> = (1..=8).map(|k| 0.25 * k as f64).collect();
        let trace = evolve_trace(&state, &h, &["2", "3"], &times).unwrap();
        for report in &trace.reports {
            assert!((report.entropy(&["1"]).unwrap() - LN_2).abs() < 1e-10);
        }
        assert!(trace.max_invariant_drift() < 1e-9);
    }

    #[test]
    fn correlation_with_spectator_never_grows() {
        let state = bell_and_ground();
        let mut rng = crate::random::seeded_rng(4);
        let times: Vec<f64> = (1..=6).map(|k| 0.3 * k as f64).collect();
        for _ in 0..10 {
            let h = crate::random::random_hermitian(4, &mut rng);
            let trace = evolve_trace(&state, &h, &["2", "3"], &times).unwrap();
            let i12_initial = trace.initial.correlation(&[&["1"], &["2"]]).unwrap();
            for report in &trace.reports {
                let i12 = report.correlation(&[&["1"], &["2"]]).unwrap();
                assert!(i12 <= i12_initial + RESIDUAL_TOL);
            }
        }
    }

    #[test]
    fn three_system_identity_on_random_scenarios() {
        let mut rng = crate::random::seeded_rng(5);
        let times: Vec<f64> = (1..=5).map(|k| 0.4 * k as f64).collect();
        for trial in 0..20 {
            let pair_layout =
                SubsystemLayout::new(vec![2, 2], vec!["1".into(), "2".into()]).unwrap();
            let third_layout = SubsystemLayout::new(vec![2], vec!["3".into()]).unwrap();
            let pair = if trial % 2 == 0 {
                crate::random::random_pure_state(&pair_layout, &mut rng)
            } else {
                crate::random::random_mixed_state(&pair_layout, &mut rng)
            };
            let third = crate::random::random_mixed_state(&third_layout, &mut rng);
            let state = product(&[pair, third]).unwrap();
            let h = crate::random::random_hermitian(4, &mut rng);
            let trace = evolve_trace(&state, &h, &["2", "3"], &times).unwrap();
            let report = check_three_system_identity(&trace).unwrap();
            assert!(report.holds, "residual {}", report.max_residual);
        }
    }

    #[test]
    fn identity_evolution_has_zero_residual() {
        let state = bell_and_ground();
        let h = ComplexMatrix::zeros(4, 4);
        let trace = evolve_trace(&state, &h, &["2", "3"], &[0.7, 1.4]).unwrap();
        let report = check_three_system_identity(&trace).unwrap();
        assert!(report.holds);
        assert!(report.max_residual < 1e-12);
    }

    #[test]
    fn partially_entangled_pairs_develop_middle_correlation() {
        // (a|00> + b|11>) (x) (c|00> + d|11>) with a^2 = 3/4, c^2 = 7/8:
        // the additivity identity holds while I_23 genuinely grows.
        let pair = |x: f64, la: &str, lb: &str| {
            let layout = SubsystemLayout::new(vec![2, 2], vec![la.into(), lb.into()]).unwrap();
            let y = (1.0 - x).sqrt();
            QuantumState::pure(
                vec![
                    Complex64::new(x.sqrt(), 0.0),
                    Complex64::ZERO,
                    Complex64::ZERO,
                    Complex64::new(y, 0.0),
                ],
                layout,
            )
            .unwrap()
        };
        let state = product(&[pair(0.75, "1", "2"), pair(0.875, "3", "4")]).unwrap();
        let mut rng = crate::random::seeded_rng(9);
        let h = crate::random::random_hermitian(4, &mut rng);
        let times: Vec<f64> = (1..=5).map(|k| 0.45 * k as f64).collect();
        let trace = evolve_trace(&state, &h, &["2", "3"], &times).unwrap();
        let report = check_total_correlation_additivity(&trace).unwrap();
        assert!(report.holds, "residual {}", report.max_residual);
        let max_i23 = trace
            .reports
            .iter()
            .map(|r| r.correlation(&[&["2"], &["3"]]).unwrap())
            .fold(0.0f64, f64::max);
        assert!(max_i23 > 0.01, "I_23 stayed at {max_i23}");
    }

    #[test]
    fn identity_requires_uncorrelated_third_system() {
        // A GHZ state correlates 3 with {12}: precondition must fail.
        let layout = SubsystemLayout::qubits(3);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex64::ZERO; 8];
        amps[0] = Complex64::new(h, 0.0);
        amps[7] = Complex64::new(h, 0.0);
        let ghz = QuantumState::pure(amps, layout).unwrap();
        let hmat = ComplexMatrix::zeros(4, 4);
        let trace = evolve_trace(&ghz, &hmat, &["2", "3"], &[1.0]).unwrap();
        assert!(matches!(
            check_three_system_identity(&trace),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn additivity_with_maximally_entangled_pairs() {
        let state = product(&[
            QuantumState::bell_pair("1", "2").unwrap(),
            QuantumState::bell_pair("3", "4").unwrap(),
        ])
        .unwrap();
        let mut rng = crate::random::seeded_rng(6);
        let h = crate::random::random_hermitian(4, &mut rng);
        let times: Vec<f64> = (1..=5).map(|k| 0.5 * k as f64).collect();
        let trace = evolve_trace(&state, &h, &["2", "3"], &times).unwrap();
        let report = check_total_correlation_additivity(&trace).unwrap();
        assert!(report.holds);
        // Maximally entangled pairs leave 2 and 3 maximally mixed: no
        // correlation between them ever develops.
        for r in &trace.reports {
            assert!(r.correlation(&[&["2"], &["3"]]).unwrap() < 1e-9);
        }
    }

    #[test]
    fn extremes_sweep() {
        let report = check_initial_state_extremes((2, 2), 10, 5, 77).unwrap();
        assert!(report.holds, "{report:?}");
        assert!((report.initial_correlation_pure - 2.0 * LN_2).abs() < 1e-10);
        // Negative control: from a pure product start correlation develops.
        assert!(report.max_correlation_from_pure_product > 0.01);
    }

    #[test]
    fn times_must_increase() {
        let state = bell_and_ground();
        let h = ComplexMatrix::zeros(4, 4);
        assert!(matches!(
            evolve_trace(&state, &h, &["2", "3"], &[1.0, 1.0]),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
