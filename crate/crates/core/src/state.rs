//! Pure and mixed multipartite states with labelled subsystems.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, SubsystemLayout};

const DENSITY_TRACE_TOL: f64 = 1e-10;
const EIGENVALUE_FLOOR: f64 = -1e-10;
const PROJECTOR_TOL: f64 = 1e-10;
/// Measurement branches below this probability are reported without a state.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Pure amplitude vector or mixed density matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum StateForm {
    Pure(Vec<Complex64>),
    Mixed(ComplexMatrix),
}

/// A quantum state over an ordered list of labelled subsystems.
///
/// The leftmost subsystem label is the most significant digit of the basis
/// index (see [`SubsystemLayout`]).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    layout: SubsystemLayout,
    form: StateForm,
}

impl QuantumState {
    /// Normalized pure state from an amplitude vector.
    ///
    /// Any nonzero vector is accepted and renormalized exactly; only a
    /// (near-)zero vector is rejected.
    pub fn pure(amplitudes: Vec<Complex64>, layout: SubsystemLayout) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for total dimension {}",
                amplitudes.len(),
                layout.total_dim()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::ZeroVector);
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / norm).collect();
        Ok(Self {
            layout,
            form: StateForm::Pure(amplitudes),
        })
    }

    /// Mixed state from a density matrix (Hermitian, unit trace, positive).
    pub fn mixed(density: ComplexMatrix, layout: SubsystemLayout) -> Result<Self> {
        if !density.is_square() || density.rows() != layout.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "density is {}x{} but layout has total dimension {}",
                density.rows(),
                density.cols(),
                layout.total_dim()
            )));
        }
        let herm = density.hermiticity_error();
        if herm > linalg::HERMITICITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "Hermiticity deviation {herm:.3e}"
            )));
        }
        let trace = density.trace().re;
        if (trace - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace} != 1")));
        }
        let eigenvalues = linalg::hermitian_eigenvalues(&density)?;
        if let Some(&bad) = eigenvalues.iter().find(|&&v| v < EIGENVALUE_FLOOR) {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {bad:.3e}"
            )));
        }
        Ok(Self {
            layout,
            form: StateForm::Mixed(density),
        })
    }

    /// Computational basis state `|digits>`.
    pub fn basis(layout: SubsystemLayout, digits: &[usize]) -> Result<Self> {
        if digits.len() != layout.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} digits for {} subsystems",
                digits.len(),
                layout.len()
            )));
        }
        let mut amplitudes = vec![Complex64::ZERO; layout.total_dim()];
        amplitudes[layout.ravel(digits)] = Complex64::ONE;
        Self::pure(amplitudes, layout)
    }

    /// The Bell state `(|00> + |11>)/sqrt(2)` on two labelled qubits.
    pub fn bell_pair(label_a: &str, label_b: &str) -> Result<Self> {
        let layout = SubsystemLayout::new(vec![2, 2], vec![label_a.into(), label_b.into()])?;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::pure(
            vec![
                Complex64::new(h, 0.0),
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::new(h, 0.0),
            ],
            layout,
        )
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn form(&self) -> &StateForm {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn is_pure_form(&self) -> bool {
        matches!(self.form, StateForm::Pure(_))
    }

    /// Amplitudes, if this state is held in pure form.
    pub fn amplitudes(&self) -> Option<&[Complex64]> {
        match &self.form {
            StateForm::Pure(v) => Some(v),
            StateForm::Mixed(_) => None,
        }
    }

    /// Density matrix: `|psi><psi|` for pure states, pass-through for mixed.
    pub fn density(&self) -> ComplexMatrix {
        match &self.form {
            StateForm::Pure(v) => {
                ComplexMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
            }
            StateForm::Mixed(rho) => rho.clone(),
        }
    }

    /// `Tr rho^2`; 1 for pure states.
    pub fn purity(&self) -> f64 {
        match &self.form {
            StateForm::Pure(_) => 1.0,
            StateForm::Mixed(rho) => (rho * rho).trace().re,
        }
    }

    /// Reduced density matrix on `keep` (original layout order).
    pub fn reduced_density<S: AsRef<str>>(&self, keep: &[S]) -> Result<ComplexMatrix> {
        match &self.form {
            // For pure states, contract amplitudes directly instead of
            // building the full density matrix first.
            StateForm::Pure(v) => {
                let mut kept_pos = self.layout.positions(keep)?;
                kept_pos.sort_unstable();
                kept_pos.dedup();
                if kept_pos.is_empty() {
                    return Err(Error::DimensionMismatch(
                        "reduction must keep at least one subsystem".into(),
                    ));
                }
                let kept_dim: usize = kept_pos.iter().map(|&p| self.layout.dims()[p]).product();
                let kept_index = |digits: &[usize]| -> usize {
                    let mut idx = 0;
                    for &p in &kept_pos {
                        idx = idx * self.layout.dims()[p] + digits[p];
                    }
                    idx
                };
                let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
                for (i, &ai) in v.iter().enumerate() {
                    if ai == Complex64::ZERO {
                        continue;
                    }
                    let di = self.layout.unravel(i);
                    for (j, &aj) in v.iter().enumerate() {
                        if aj == Complex64::ZERO {
                            continue;
                        }
                        let dj = self.layout.unravel(j);
                        let env_match = (0..self.layout.len())
                            .filter(|p| !kept_pos.contains(p))
                            .all(|p| di[p] == dj[p]);
                        if env_match {
                            let r = kept_index(&di);
                            let c = kept_index(&dj);
                            let v0 = out.get(r, c) + ai * aj.conj();
                            out.set(r, c, v0);
                        }
                    }
                }
                Ok(out)
            }
            StateForm::Mixed(rho) => linalg::partial_trace(rho, &self.layout, keep),
        }
    }

    /// Discard every subsystem not in `keep`, returning the reduced state.
    pub fn restricted_to<S: AsRef<str>>(&self, keep: &[S]) -> Result<QuantumState> {
        let rho = self.reduced_density(keep)?;
        let layout = self.layout.sub_layout(keep)?;
        QuantumState::mixed(rho, layout)
    }

    /// Apply a unitary on the named subsystems (identity elsewhere).
    pub fn apply_unitary<S: AsRef<str>>(&self, u: &ComplexMatrix, acts_on: &[S]) -> Result<Self> {
        let big = linalg::embed_unitary(u, &self.layout, acts_on)?;
        Ok(match &self.form {
            StateForm::Pure(v) => Self {
                layout: self.layout.clone(),
                form: StateForm::Pure(big.matvec(v)),
            },
            StateForm::Mixed(rho) => Self {
                layout: self.layout.clone(),
                form: StateForm::Mixed(&(&big * rho) * &big.adjoint()),
            },
        })
    }

    /// Projective measurement on the named subsystems.
    ///
    /// `projectors` must be Hermitian, idempotent, and sum to the identity
    /// on the product dimension of `acts_on`. Returns one `(probability,
    /// post-measurement state)` pair per projector; the post-measurement
    /// state spans the full system with the measured subsystems collapsed.
    /// Branches with probability below [`ZERO_PROBABILITY`] carry no state.
    pub fn projective_measure<S: AsRef<str>>(
        &self,
        projectors: &[ComplexMatrix],
        acts_on: &[S],
    ) -> Result<Vec<MeasureOutcome>> {
        let positions = self.layout.positions(acts_on)?;
        let acts_dim: usize = positions.iter().map(|&p| self.layout.dims()[p]).product();
        if projectors.is_empty() {
            return Err(Error::IncompleteProjectorSet("no projectors given".into()));
        }
        let mut sum = ComplexMatrix::zeros(acts_dim, acts_dim);
        for (k, p) in projectors.iter().enumerate() {
            if p.rows() != acts_dim || p.cols() != acts_dim {
                return Err(Error::IncompleteProjectorSet(format!(
                    "projector {k} is {}x{}, expected {acts_dim}x{acts_dim}",
                    p.rows(),
                    p.cols()
                )));
            }
            let herm = p.hermiticity_error();
            if herm > PROJECTOR_TOL {
                return Err(Error::IncompleteProjectorSet(format!(
                    "projector {k} not Hermitian (deviation {herm:.3e})"
                )));
            }
            let idem = (p * p).max_abs_diff(p);
            if idem > PROJECTOR_TOL {
                return Err(Error::IncompleteProjectorSet(format!(
                    "projector {k} not idempotent (deviation {idem:.3e})"
                )));
            }
            sum = &sum + p;
        }
        let completeness = sum.max_abs_diff(&ComplexMatrix::identity(acts_dim));
        if completeness > PROJECTOR_TOL {
            return Err(Error::IncompleteProjectorSet(format!(
                "projectors sum to identity only within {completeness:.3e}"
            )));
        }

        let mut outcomes = Vec::with_capacity(projectors.len());
        for p in projectors {
            let embedded = projector_embed(p, &self.layout, &positions);
            let (probability, state) = match &self.form {
                StateForm::Pure(v) => {
                    let collapsed = embedded.matvec(v);
                    let p_out: f64 = collapsed.iter().map(|z| z.norm_sqr()).sum();
                    if p_out < ZERO_PROBABILITY {
                        (p_out, None)
                    } else {
                        let n = p_out.sqrt();
                        let renorm: Vec<Complex64> = collapsed.into_iter().map(|z| z / n).collect();
                        (
                            p_out,
                            Some(QuantumState {
                                layout: self.layout.clone(),
                                form: StateForm::Pure(renorm),
                            }),
                        )
                    }
                }
                StateForm::Mixed(rho) => {
                    let collapsed = &(&embedded * rho) * &embedded.adjoint();
                    let p_out = collapsed.trace().re;
                    if p_out < ZERO_PROBABILITY {
                        (p_out.max(0.0), None)
                    } else {
                        (
                            p_out,
                            Some(QuantumState {
                                layout: self.layout.clone(),
                                form: StateForm::Mixed(collapsed.scale_re(1.0 / p_out)),
                            }),
                        )
                    }
                }
            };
            outcomes.push(MeasureOutcome { probability, state });
        }
        Ok(outcomes)
    }
}

/// One branch of a projective measurement.
#[derive(Debug, Clone)]
pub struct MeasureOutcome {
    pub probability: f64,
    /// Post-measurement state of the full system; `None` for branches of
    /// probability below [`ZERO_PROBABILITY`].
    pub state: Option<QuantumState>,
}

// Like embed_unitary but without the unitarity gate (projectors are not
// unitary); positions are already resolved.
fn projector_embed(
    p: &ComplexMatrix,
    layout: &SubsystemLayout,
    positions: &[usize],
) -> ComplexMatrix {
    let total = layout.total_dim();
    let acted_index = |digits: &[usize]| -> usize {
        let mut idx = 0;
        for &pos in positions {
            idx = idx * layout.dims()[pos] + digits[pos];
        }
        idx
    };
    let mut out = ComplexMatrix::zeros(total, total);
    for row in 0..total {
        let rd = layout.unravel(row);
        for col in 0..total {
            let cd = layout.unravel(col);
            let spectator_match = (0..layout.len())
                .filter(|pos| !positions.contains(pos))
                .all(|pos| rd[pos] == cd[pos]);
            if spectator_match {
                out.set(row, col, p.get(acted_index(&rd), acted_index(&cd)));
            }
        }
    }
    out
}

/// Tensor product of states with disjoint labels; layouts concatenate in
/// order. The result is pure iff every input is pure.
pub fn product(states: &[QuantumState]) -> Result<QuantumState> {
    if states.is_empty() {
        return Err(Error::DimensionMismatch("empty product".into()));
    }
    let mut dims = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    for s in states {
        for (d, l) in s.layout().dims().iter().zip(s.layout().labels()) {
            if labels.contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
            dims.push(*d);
            labels.push(l.clone());
        }
    }
    let layout = SubsystemLayout::new(dims, labels)?;

    if states.iter().all(|s| s.is_pure_form()) {
        let mut amps = vec![Complex64::ONE];
        for s in states {
            amps = linalg::kron_vec(&amps, s.amplitudes().unwrap());
        }
        QuantumState::pure(amps, layout)
    } else {
        let mut rho = ComplexMatrix::identity(1);
        for s in states {
            rho = linalg::kron(&rho, &s.density());
        }
        QuantumState::mixed(rho, layout)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn bell_pair_amplitudes() {
        let bell = QuantumState::bell_pair("1", "2").unwrap();
        let a = bell.amplitudes().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a[0].re - h).abs() < 1e-15);
        assert!(a[1].norm() < 1e-15);
        assert!(a[2].norm() < 1e-15);
        assert!((a[3].re - h).abs() < 1e-15);
    }

    #[test]
    fn pure_state_renormalizes() {
        let layout = SubsystemLayout::qubits(2);
        let s = QuantumState::pure(vec![re(1.0); 4], layout).unwrap();
        for z in s.amplitudes().unwrap() {
            assert!((z.re - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_vector_rejected() {
        let layout = SubsystemLayout::qubits(1);
        assert!(matches!(
            QuantumState::pure(vec![Complex64::ZERO; 2], layout),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn density_of_basis_state() {
        let layout = SubsystemLayout::qubits(1);
        let zero = QuantumState::basis(layout, &[0]).unwrap();
        let rho = zero.density();
        assert!(rho.max_abs_diff(&ComplexMatrix::diagonal(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn density_of_bell_pair() {
        let rho = QuantumState::bell_pair("1", "2").unwrap().density();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((rho.get(i, j).re - 0.5).abs() < 1e-15);
        }
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        // Pure density is idempotent.
        assert!((&rho * &rho).max_abs_diff(&rho) < 1e-10);
    }

    #[test]
    fn product_of_ground_states() {
        let a = QuantumState::basis(
            SubsystemLayout::new(vec![2], vec!["1".into()]).unwrap(),
            &[0],
        )
        .unwrap();
        let b = QuantumState::basis(
            SubsystemLayout::new(vec![2], vec!["2".into()]).unwrap(),
            &[0],
        )
        .unwrap();
        let ab = product(&[a, b]).unwrap();
        assert_eq!(ab.layout().labels(), ["1", "2"]);
        assert!((ab.amplitudes().unwrap()[0] - Complex64::ONE).norm() < 1e-15);
    }

    #[test]
    fn product_rejects_duplicate_labels() {
        let a = QuantumState::bell_pair("1", "2").unwrap();
        let b = QuantumState::bell_pair("2", "3").unwrap();
        assert!(matches!(product(&[a, b]), Err(Error::DuplicateLabel(_))));
    }

    #[test]
    fn bell_reduction_is_maximally_mixed() {
        let bell = QuantumState::bell_pair("1", "2").unwrap();
        let rho1 = bell.reduced_density(&["1"]).unwrap();
        assert!(rho1.max_abs_diff(&ComplexMatrix::diagonal(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let bell = QuantumState::bell_pair("1", "2").unwrap();
        let same = bell
            .apply_unitary(&ComplexMatrix::identity(2), &["2"])
            .unwrap();
        assert_eq!(bell, same);
    }

    #[test]
    fn measure_ground_state_in_computational_basis() {
        let layout = SubsystemLayout::qubits(1);
        let zero = QuantumState::basis(layout, &[0]).unwrap();
        let p0 = ComplexMatrix::diagonal(&[1.0, 0.0]);
        let p1 = ComplexMatrix::diagonal(&[0.0, 1.0]);
        let outcomes = zero.projective_measure(&[p0, p1], &["1"]).unwrap();
        assert!((outcomes[0].probability - 1.0).abs() < 1e-15);
        assert!(outcomes[0].state.is_some());
        assert!(outcomes[1].probability < 1e-15);
        assert!(outcomes[1].state.is_none());
    }

    #[test]
    fn restricting_discards_measured_subsystems() {
        let bell = QuantumState::bell_pair("1", "2").unwrap();
        let ground = QuantumState::basis(
            SubsystemLayout::new(vec![2], vec!["3".into()]).unwrap(),
            &[0],
        )
        .unwrap();
        let joint = product(&[bell, ground]).unwrap();
        let rest = joint.restricted_to(&["1", "2"]).unwrap();
        assert_eq!(rest.layout().labels(), ["1", "2"]);
        let expected = QuantumState::bell_pair("1", "2").unwrap().density();
        assert!(rest.density().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn measure_rejects_incomplete_projectors() {
        let layout = SubsystemLayout::qubits(1);
        let zero = QuantumState::basis(layout, &[0]).unwrap();
        let p0 = ComplexMatrix::diagonal(&[1.0, 0.0]);
        assert!(matches!(
            zero.projective_measure(&[p0], &["1"]),
            Err(Error::IncompleteProjectorSet(_))
        ));
    }

    #[test]
    fn mixed_constructor_rejects_bad_densities() {
        let layout = SubsystemLayout::qubits(1);
        let not_unit_trace = ComplexMatrix::diagonal(&[0.9, 0.3]);
        assert!(matches!(
            QuantumState::mixed(not_unit_trace, layout.clone()),
            Err(Error::InvalidDensity(_))
        ));
        let negative = ComplexMatrix::diagonal(&[1.2, -0.2]);
        assert!(matches!(
            QuantumState::mixed(negative, layout),
            Err(Error::InvalidDensity(_))
        ));
    }

    proptest! {
        // Tensor product then reduction recovers each factor.
        #[test]
        fn product_then_reduce_recovers_factor(seed in 0u64..200) {
            let mut rng = crate::random::seeded_rng(seed);
            let la = SubsystemLayout::new(vec![2], vec!["a".into()]).unwrap();
            let lb = SubsystemLayout::new(vec![2, 2], vec!["b".into(), "c".into()]).unwrap();
            let sa = crate::random::random_mixed_state(&la, &mut rng);
            let sb = crate::random::random_pure_state(&lb, &mut rng);
            let joint = product(&[sa.clone(), sb.clone()]).unwrap();
            let back_a = joint.reduced_density(&["a"]).unwrap();
            prop_assert!(back_a.max_abs_diff(&sa.density()) < 1e-12);
            let back_b = joint.reduced_density(&["b", "c"]).unwrap();
            prop_assert!(back_b.max_abs_diff(&sb.density()) < 1e-12);
        }

        // Unitaries preserve purity and norm.
        #[test]
        fn unitary_preserves_norm_and_purity(seed in 0u64..200) {
            let mut rng = crate::random::seeded_rng(seed);
            let layout = SubsystemLayout::qubits(3);
            let state = crate::random::random_pure_state(&layout, &mut rng);
            let u = crate::random::random_unitary(4, &mut rng);
            let evolved = state.apply_unitary(&u, &["1", "3"]).unwrap();
            let norm: f64 = evolved.amplitudes().unwrap().iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((norm - 1.0).abs() < 1e-12);
            prop_assert!((evolved.purity() - 1.0).abs() < 1e-10);
        }

        // Complete projective measurements have probabilities summing to 1.
        #[test]
        fn measurement_probabilities_sum_to_one(seed in 0u64..200) {
            let mut rng = crate::random::seeded_rng(seed);
            let layout = SubsystemLayout::qubits(2);
            let state = crate::random::random_mixed_state(&layout, &mut rng);
            let p0 = ComplexMatrix::diagonal(&[1.0, 0.0]);
            let p1 = ComplexMatrix::diagonal(&[0.0, 1.0]);
            let outcomes = state.projective_measure(&[p0, p1], &["2"]).unwrap();
            let total: f64 = outcomes.iter().map(|o| o.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-10);
            prop_assert!(outcomes.iter().all(|o| o.probability > -1e-12));
        }
    }
}
