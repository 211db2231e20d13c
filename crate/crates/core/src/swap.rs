//! Four-qubit entanglement swapping: Bell decomposition of the input pairs,
//! measurement branches with their biases, the transfer bound, and iterated
//! swapping.
//!
//! The Bell basis follows the convention used in the analysis this module
//! implements: `Psi_pm = (|00> pm |11>)/sqrt(2)` and
//! `Phi_pm = (|01> pm |10>)/sqrt(2)`. Amplitudes are real and non-negative
//! (moduli); complex phases are out of scope.

use num_complex::Complex64;
use rand::Rng;

use crate::entropy::{self, MI_TOL};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, SubsystemLayout};
use crate::random;
use crate::state::{product, QuantumState};

/// Branch weights below this are flagged as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// The two entangled input pairs `(a|00> + b|11>) (x) (c|00> + d|11>)` on
/// qubits {1,2} and {3,4}. Each amplitude pair is renormalized on
/// construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapInput {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl SwapInput {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if [a, b, c, d].iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::PreconditionViolated(
                "swap amplitudes must be finite and non-negative".into(),
            ));
        }
        let nab = (a * a + b * b).sqrt();
        let ncd = (c * c + d * d).sqrt();
        if nab < 1e-12 || ncd < 1e-12 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            a: a / nab,
            b: b / nab,
            c: c / ncd,
            d: d / ncd,
        })
    }

    /// Construct from the populations `a^2` and `c^2`.
    pub fn from_squares(a_sq: f64, c_sq: f64) -> Result<Self> {
        for (name, v) in [("a^2", a_sq), ("c^2", c_sq)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::PreconditionViolated(format!(
                    "{name} = {v} outside [0, 1]"
                )));
            }
        }
        Self::new(
            a_sq.sqrt(),
            (1.0 - a_sq).sqrt(),
            c_sq.sqrt(),
            (1.0 - c_sq).sqrt(),
        )
    }

    /// The four-qubit product state on labels 1..4.
    pub fn state(&self) -> Result<QuantumState> {
        let pair = |x: f64, y: f64, la: &str, lb: &str| -> Result<QuantumState> {
            let layout = SubsystemLayout::new(vec![2, 2], vec![la.into(), lb.into()])?;
            QuantumState::pure(
                vec![
                    Complex64::new(x, 0.0),
                    Complex64::ZERO,
                    Complex64::ZERO,
                    Complex64::new(y, 0.0),
                ],
                layout,
            )
        };
        product(&[
            pair(self.a, self.b, "1", "2")?,
            pair(self.c, self.d, "3", "4")?,
        ])
    }

    /// Pre-measurement correlation of the {1,2} pair, `2 S(diag(a^2, b^2))`.
    pub fn i12(&self) -> f64 {
        2.0 * entropy::scalar_entropy(&[self.a * self.a, self.b * self.b])
    }

    /// Pre-measurement correlation of the {3,4} pair.
    pub fn i34(&self) -> f64 {
        2.0 * entropy::scalar_entropy(&[self.c * self.c, self.d * self.d])
    }
}

/// The four Bell-measurement outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellOutcome {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            BellOutcome::PsiPlus => "Psi+",
            BellOutcome::PsiMinus => "Psi-",
            BellOutcome::PhiPlus => "Phi+",
            BellOutcome::PhiMinus => "Phi-",
        }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|o| o.label() == label)
            .ok_or_else(|| Error::PreconditionViolated(format!("unknown Bell outcome `{label}`")))
    }
}

/// The four Bell kets on two qubits, in `BellOutcome::ALL` order.
pub fn bell_state_vectors() -> [Vec<Complex64>; 4] {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = Complex64::ZERO;
    [
        vec![h, z, z, h],  // Psi+ = (|00> + |11>)/sqrt(2)
        vec![h, z, z, -h], // Psi- = (|00> - |11>)/sqrt(2)
        vec![z, h, h, z],  // Phi+ = (|01> + |10>)/sqrt(2)
        vec![z, h, -h, z], // Phi- = (|01> - |10>)/sqrt(2)
    ]
}

/// Projectors onto the Bell basis, mutually orthogonal and complete.
pub fn bell_basis() -> [ComplexMatrix; 4] {
    bell_state_vectors().map(|v| ComplexMatrix::from_fn(4, 4, |i, j| v[i] * v[j].conj()))
}

/// The Bell-branch decomposition of the swap input on the {1,4} qubits.
#[derive(Debug, Clone)]
pub struct BellDecomposition {
    /// `n_psi = a^2 c^2 + b^2 d^2`.
    pub n_psi: f64,
    /// `n_phi = a^2 d^2 + b^2 c^2`.
    pub n_phi: f64,
    /// Normalized branch states on qubits {1,4}, in `BellOutcome::ALL`
    /// order; `None` for a degenerate (zero-weight) branch.
    pub branch_states: [Option<QuantumState>; 4],
    /// Set when `n_psi` or `n_phi` fell below the degeneracy threshold.
    pub degenerate: bool,
}

// |00>,|11> branch: (x|00> + y|11>)/sqrt(weight) on qubits {1,4}.
fn branch_state(x: f64, y: f64, weight: f64) -> Result<Option<QuantumState>> {
    if weight < DEGENERATE_TOL {
        return Ok(None);
    }
    let layout = SubsystemLayout::new(vec![2, 2], vec!["1".into(), "4".into()])?;
    let scale = weight.sqrt();
    let mut amps = vec![Complex64::ZERO; 4];
    amps[0] = Complex64::new(x / scale, 0.0);
    amps[3] = Complex64::new(y / scale, 0.0);
    Ok(Some(QuantumState::pure(amps, layout)?))
}

// |01>,|10> branch: (x|01> + y|10>)/sqrt(weight) on qubits {1,4}.
fn branch_state_offdiag(x: f64, y: f64, weight: f64) -> Result<Option<QuantumState>> {
    if weight < DEGENERATE_TOL {
        return Ok(None);
    }
    let layout = SubsystemLayout::new(vec![2, 2], vec!["1".into(), "4".into()])?;
    let scale = weight.sqrt();
    let mut amps = vec![Complex64::ZERO; 4];
    amps[1] = Complex64::new(x / scale, 0.0);
    amps[2] = Complex64::new(y / scale, 0.0);
    Ok(Some(QuantumState::pure(amps, layout)?))
}

/// Decompose the swap input over the Bell basis of qubits {2,3}:
/// branch norms `n_psi`, `n_phi` and the normalized {1,4} branch states.
pub fn decompose_swap_state(input: &SwapInput) -> Result<BellDecomposition> {
    let SwapInput { a, b, c, d } = *input;
    let n_psi = a * a * c * c + b * b * d * d;
    let n_phi = a * a * d * d + b * b * c * c;
    let branch_states = [
        branch_state(a * c, b * d, n_psi)?,    // psi+ ~ ac|00> + bd|11>
        branch_state(a * c, -(b * d), n_psi)?, // psi- ~ ac|00> - bd|11>
        branch_state_offdiag(a * d, b * c, n_phi)?, // phi+ ~ ad|01> + bc|10>
        branch_state_offdiag(a * d, -(b * c), n_phi)?, // phi- ~ ad|01> - bc|10>
    ];
    Ok(BellDecomposition {
        n_psi,
        n_phi,
        branch_states,
        degenerate: n_psi < DEGENERATE_TOL || n_phi < DEGENERATE_TOL,
    })
}

/// One Bell-measurement branch of the swap.
#[derive(Debug, Clone)]
pub struct SwapOutcome {
    pub outcome: BellOutcome,
    pub probability: f64,
    /// Post-measurement pure state of qubits {1,4}; `None` when the branch
    /// weight is degenerate.
    pub post_state_14: Option<QuantumState>,
    /// Post-measurement bias of qubit 1, `p(|0>) - 1/2`.
    pub bias: f64,
    /// Post-measurement correlation `I_14^M = 2 S(rho_1^M)` in nats.
    pub i14: f64,
    pub degenerate: bool,
}

/// Run the swap analytically: outcome probabilities `n/2`, the {1,4} branch
/// states, the qubit-1 bias, and `I_14^M` per outcome.
pub fn run_swap(input: &SwapInput) -> Result<Vec<SwapOutcome>> {
    let SwapInput { a, c, d, .. } = *input;
    let decomposition = decompose_swap_state(input)?;
    let mut outcomes = Vec::with_capacity(4);
    for (k, outcome) in BellOutcome::ALL.into_iter().enumerate() {
        let (weight, p0_num) = match outcome {
            BellOutcome::PsiPlus | BellOutcome::PsiMinus => (decomposition.n_psi, a * a * c * c),
            BellOutcome::PhiPlus | BellOutcome::PhiMinus => (decomposition.n_phi, a * a * d * d),
        };
        let degenerate = weight < DEGENERATE_TOL;
        let (bias, i14) = if degenerate {
            (0.0, 0.0)
        } else {
            let p0 = p0_num / weight;
            (p0 - 0.5, 2.0 * entropy::scalar_entropy(&[p0, 1.0 - p0]))
        };
        outcomes.push(SwapOutcome {
            outcome,
            probability: weight / 2.0,
            post_state_14: decomposition.branch_states[k].clone(),
            bias,
            i14,
            degenerate,
        });
    }
    Ok(outcomes)
}

/// Result of checking the transfer bound `I_14^M <= inf{I_12, I_34}`.
///
/// The per-outcome check (`holds`) is the claim as stated; in fact the Phi
/// branches violate it on most partially entangled inputs, because their
/// qubit-1 populations `(a^2 d^2, b^2 c^2)/n_phi` have the input biases
/// counteracting (entanglement concentration). The Psi branches
/// (`psi_branches_hold`) and the probability-weighted mean (`mean_holds`)
/// do satisfy the bound: the measurement leaves the qubit-1 marginal
/// unchanged, so entropy concavity caps the expected correlation.
#[derive(Debug, Clone)]
pub struct SwapBoundReport {
    pub i12: f64,
    pub i34: f64,
    pub outcomes: Vec<SwapOutcome>,
    /// Pre-measurement bias of qubit 1, `a^2 - 1/2`.
    pub eps1: f64,
    /// Pre-measurement bias of qubit 3, `c^2 - 1/2`.
    pub eps3: f64,
    /// Post-measurement bias of qubit 1 for the `Psi+` outcome.
    pub eps1_m: f64,
    /// Whether the input satisfies the ordering assumptions
    /// `c^2 >= a^2 > b^2 > d^2` of the bias argument.
    pub ordering_assumptions: bool,
    /// `eps1_m > eps3`; meaningful under the ordering assumptions.
    pub bias_increases: bool,
    /// Probability-weighted mean of `I_14^M` over the four outcomes.
    pub expected_i14: f64,
    /// The bound held for every outcome.
    pub holds: bool,
    /// The bound held for the Psi+ and Psi- outcomes.
    pub psi_branches_hold: bool,
    /// The bound held for the expected value.
    pub mean_holds: bool,
}

/// Verify the transfer bound for every measurement outcome of `input` (and
/// for the Psi branches and the outcome average separately), and report the
/// bias comparison of the post-measurement qubit 1 against the
/// pre-measurement qubit 3.
pub fn check_swap_bound(input: &SwapInput) -> Result<SwapBoundReport> {
    let i12 = input.i12();
    let i34 = input.i34();
    let bound = i12.min(i34);
    let outcomes = run_swap(input)?;
    let holds = outcomes.iter().all(|o| o.i14 <= bound + MI_TOL);
    let psi_branches_hold = outcomes[..2].iter().all(|o| o.i14 <= bound + MI_TOL);
    let expected_i14: f64 = outcomes.iter().map(|o| o.probability * o.i14).sum();
    let (a_sq, b_sq) = (input.a * input.a, input.b * input.b);
    let (c_sq, d_sq) = (input.c * input.c, input.d * input.d);
    let eps1_m = outcomes[0].bias;
    Ok(SwapBoundReport {
        i12,
        i34,
        eps1: a_sq - 0.5,
        eps3: c_sq - 0.5,
        eps1_m,
        ordering_assumptions: c_sq >= a_sq && a_sq > b_sq && b_sq > d_sq,
        bias_increases: eps1_m > c_sq - 0.5,
        expected_i14,
        holds,
        psi_branches_hold,
        mean_holds: expected_i14 <= bound + MI_TOL,
        outcomes,
    })
}

/// How iterated swapping picks a Bell outcome at each stage.
#[derive(Debug, Clone, Copy)]
pub enum OutcomePolicy {
    /// Always the same outcome.
    Fixed(BellOutcome),
    /// Sample from the branch probabilities with a seeded RNG.
    Sampled { seed: u64 },
}

/// One stage of an iterated swap.
#[derive(Debug, Clone)]
pub struct SwapStage {
    pub stage: usize,
    pub outcome: BellOutcome,
    pub probability: f64,
    /// Schmidt populations of the post-measurement {1,4} pair; these feed
    /// the next stage as `(a^2, b^2)`.
    pub a_sq_next: f64,
    /// Correlation of the {1,4} pair after this stage.
    pub i14: f64,
}

/// Report of an iterated swap chain.
#[derive(Debug, Clone)]
pub struct IterationReport {
    /// Correlation of the first input pair before any swapping.
    pub initial_i12: f64,
    pub stages: Vec<SwapStage>,
    /// Whether the per-stage correlation never increased (within slack).
    pub monotone: bool,
}

/// Iterate the swap along a chain of inputs. Stage 1 consumes `chain[0]`
/// whole; each later stage swaps the previous stage's post-measurement
/// Schmidt pair (as its `(a, b)`) against the fresh `(c, d)` pair of the
/// next chain element.
pub fn iterate_swap(chain: &[SwapInput], policy: OutcomePolicy) -> Result<IterationReport> {
    if chain.len() < 2 {
        return Err(Error::PreconditionViolated(
            "iterated swapping needs a chain of at least 2 inputs".into(),
        ));
    }
    let mut rng = match policy {
        OutcomePolicy::Sampled { seed } => Some(random::seeded_rng(seed)),
        OutcomePolicy::Fixed(_) => None,
    };

    let initial_i12 = chain[0].i12();
    let mut current = chain[0];
    let mut previous_i = initial_i12;
    let mut stages = Vec::with_capacity(chain.len());
    let mut monotone = true;

    for (index, next) in chain.iter().enumerate() {
        if index > 0 {
            // Feed the previous post-measurement Schmidt pair forward.
            let last: &SwapStage = stages.last().unwrap();
            let a_sq = last.a_sq_next;
            current = SwapInput::new(a_sq.sqrt(), (1.0 - a_sq).max(0.0).sqrt(), next.c, next.d)?;
        }
        let outcomes = run_swap(&current)?;
        let chosen = match policy {
            OutcomePolicy::Fixed(outcome) => outcomes
                .iter()
                .find(|o| o.outcome == outcome)
                .expect("all four outcomes are always present")
                .clone(),
            OutcomePolicy::Sampled { .. } => {
                let r: f64 = rng.as_mut().unwrap().random();
                let mut acc = 0.0;
                let mut pick = outcomes.last().unwrap().clone();
                for o in &outcomes {
                    acc += o.probability;
                    if r < acc {
                        pick = o.clone();
                        break;
                    }
                }
                pick
            }
        };
        if chosen.degenerate || chosen.post_state_14.is_none() {
            return Err(Error::DegenerateBranch(format!(
                "stage {} outcome {} has weight below {DEGENERATE_TOL:.0e}",
                index + 1,
                chosen.outcome.label()
            )));
        }
        // Schmidt populations of the chosen branch: qubit-1 reduced state.
        let a_sq_next = 0.5 + chosen.bias;
        if monotone && chosen.i14 > previous_i + MI_TOL {
            monotone = false;
        }
        previous_i = chosen.i14;
        stages.push(SwapStage {
            stage: index + 1,
            outcome: chosen.outcome,
            probability: chosen.probability,
            a_sq_next,
            i14: chosen.i14,
        });
    }

    Ok(IterationReport {
        initial_i12,
        stages,
        monotone,
    })
}
