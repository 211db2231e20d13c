//! Truncated-Fock-space Jaynes-Cummings simulator for the sequential
//! two-atom cavity protocol: atom 1 (excited) transits the vacuum cavity,
//! then atom 2 (ground) transits, transferring the atom-field entanglement
//! onto the atom pair.
//!
//! Conventions: hbar = 1, resonant rotating-wave coupling, atom basis
//! `|0> = ground`, `|1> = excited`, field Fock levels `0..cutoff-1` with the
//! top level a guard whose population must stay below 1e-8.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::dynamics;
use crate::entropy::CorrelationReport;
use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, SubsystemLayout};
use crate::state::{QuantumState, StateForm};

/// Population allowed in the top (guard) Fock level.
pub const CUTOFF_TOL: f64 = 1e-8;
const SECOND_TRANSIT_SAMPLES: usize = 9;

/// One atom-cavity-atom system: `atom1 (x) field (x) atom2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavitySystem {
    pub fock_cutoff: usize,
    /// Scale of the interaction; only `coupling x time` matters.
    pub coupling: f64,
}

impl Default for CavitySystem {
    fn default() -> Self {
        Self {
            fock_cutoff: 3,
            coupling: 1.0,
        }
    }
}

/// Which atom is inside the cavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atom {
    One,
    Two,
}

impl CavitySystem {
    pub fn new(fock_cutoff: usize, coupling: f64) -> Result<Self> {
        if fock_cutoff < 2 {
            return Err(Error::DimensionMismatch(format!(
                "Fock cutoff {fock_cutoff} < 2"
            )));
        }
        if !(coupling.is_finite() && coupling > 0.0) {
            return Err(Error::PreconditionViolated(format!(
                "coupling {coupling} must be finite and positive"
            )));
        }
        Ok(Self {
            fock_cutoff,
            coupling,
        })
    }

    pub fn layout(&self) -> SubsystemLayout {
        SubsystemLayout::new(
            vec![2, self.fock_cutoff, 2],
            vec!["A1".into(), "F".into(), "A2".into()],
        )
        .expect("fixed labels are unique")
    }

    /// `|excited, vacuum, ground>`: the protocol's initial state.
    pub fn initial_state(&self) -> QuantumState {
        QuantumState::basis(self.layout(), &[1, 0, 0]).expect("basis digits in range")
    }
}

fn annihilation(dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            Complex64::ZERO
        }
    })
}

fn sigma_plus() -> ComplexMatrix {
    // |1><0|: raises ground to excited.
    ComplexMatrix::from_fn(2, 2, |i, j| {
        if i == 1 && j == 0 {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
}

/// The resonant interaction `coupling (a sigma+ + a^dag sigma-)` between the
/// chosen atom and the field, identity on the other atom. Conserves the
/// total excitation number.
pub fn jc_hamiltonian(system: &CavitySystem, which_atom: Atom) -> ComplexMatrix {
    let a = annihilation(system.fock_cutoff);
    let sp = sigma_plus();
    let i2 = ComplexMatrix::identity(2);
    let raise_absorb = match which_atom {
        Atom::One => kron(&kron(&sp, &a), &i2),
        Atom::Two => kron(&kron(&i2, &a), &sp),
    };
    (&raise_absorb + &raise_absorb.adjoint()).scale_re(system.coupling)
}

/// Total excitation number `sigma+sigma-(A1) + n(F) + sigma+sigma-(A2)`.
pub fn excitation_number(system: &CavitySystem) -> ComplexMatrix {
    let dim_f = system.fock_cutoff;
    let i2 = ComplexMatrix::identity(2);
    let i_f = ComplexMatrix::identity(dim_f);
    let atom_excited = ComplexMatrix::diagonal(&[0.0, 1.0]);
    let number = ComplexMatrix::from_fn(dim_f, dim_f, |i, j| {
        if i == j {
            Complex64::new(i as f64, 0.0)
        } else {
            Complex64::ZERO
        }
    });
    let a1 = kron(&kron(&atom_excited, &i_f), &i2);
    let f = kron(&kron(&i2, &number), &i2);
    let a2 = kron(&kron(&i2, &i_f), &atom_excited);
    &(&a1 + &f) + &a2
}

/// Population of the top (guard) Fock level.
pub fn top_fock_population(state: &QuantumState, system: &CavitySystem) -> f64 {
    let layout = system.layout();
    let top = system.fock_cutoff - 1;
    match state.form() {
        StateForm::Pure(amps) => amps
            .iter()
            .enumerate()
            .filter(|(i, _)| layout.unravel(*i)[1] == top)
            .map(|(_, z)| z.norm_sqr())
            .sum(),
        StateForm::Mixed(rho) => (0..layout.total_dim())
            .filter(|&i| layout.unravel(i)[1] == top)
            .map(|i| rho.get(i, i).re)
            .sum(),
    }
}

/// Send the chosen atom through the cavity for `duration`.
pub fn transit(
    state: &QuantumState,
    system: &CavitySystem,
    which_atom: Atom,
    duration: f64,
) -> Result<QuantumState> {
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::PreconditionViolated(format!(
            "transit duration {duration} must be non-negative"
        )));
    }
    let before = top_fock_population(state, system);
    if before > CUTOFF_TOL {
        return Err(Error::CutoffExceeded(before));
    }
    let h = jc_hamiltonian(system, which_atom);
    let u = dynamics::evolution_operator(&h, duration)?;
    let labels = system.layout();
    let evolved = state.apply_unitary(&u, labels.labels())?;
    let after = top_fock_population(&evolved, system);
    if after > CUTOFF_TOL {
        return Err(Error::CutoffExceeded(after));
    }
    Ok(evolved)
}

/// Correlation snapshot at one point of the protocol.
#[derive(Debug, Clone)]
pub struct ExchangeStage {
    pub label: String,
    /// Protocol time: 0 initially, `t1` after the first transit, `t1 + tau`
    /// during the second.
    pub time: f64,
    pub s_a1: f64,
    pub s_f: f64,
    pub s_a2: f64,
    pub s_total: f64,
    pub i_a1_f: f64,
    pub i_f_a2: f64,
    pub i_a1_a2: f64,
    /// `E_{A2,{A1 F}}`: correlation of atom 2 with the rest.
    pub e_a2_rest: f64,
    /// `E_{A1,{F A2}}`: correlation of atom 1 with the rest.
    pub e_a1_rest: f64,
    pub excitation: f64,
    pub top_fock_population: f64,
}

/// Full report of the two-transit exchange protocol.
#[derive(Debug, Clone)]
pub struct ExchangeReport {
    pub t1: f64,
    pub t2: f64,
    pub stages: Vec<ExchangeStage>,
    /// Max residual of the three-system identity (with systems
    /// A1, F, A2) across the second transit.
    pub identity_max_residual: f64,
    /// Max residual of `I_total = I_{F,A2} + E_{A1{F A2}}` over all stages.
    pub decomposition_max_residual: f64,
    /// Max drift of `S_A1` during the second transit.
    pub s_a1_drift: f64,
    /// Worst increase of `I_{A1,F}` above its value entering transit 2.
    pub i_a1f_worst_increase: f64,
    /// Worst decrease of `I_{A1,A2}` below its value entering transit 2.
    pub i_a1a2_worst_decrease: f64,
    /// Max drift of the excitation expectation over the whole protocol.
    pub excitation_drift: f64,
    pub max_top_fock_population: f64,
    pub final_s_f: f64,
    pub final_i_a1_a2: f64,
}

fn stage_snapshot(
    state: &QuantumState,
    system: &CavitySystem,
    number_op: &ComplexMatrix,
    label: impl Into<String>,
    time: f64,
) -> Result<ExchangeStage> {
    let report = CorrelationReport::full(state, "stage")?;
    let excitation = {
        let rho = state.density();
        (number_op * &rho).trace().re
    };
    Ok(ExchangeStage {
        label: label.into(),
        time,
        s_a1: report.entropy(&["A1"])?,
        s_f: report.entropy(&["F"])?,
        s_a2: report.entropy(&["A2"])?,
        s_total: report.entropy(&["A1", "F", "A2"])?,
        i_a1_f: report.correlation(&[&["A1"], &["F"]])?,
        i_f_a2: report.correlation(&[&["F"], &["A2"]])?,
        i_a1_a2: report.correlation(&[&["A1"], &["A2"]])?,
        e_a2_rest: report.correlation(&[&["A2"], &["A1", "F"]])?,
        e_a1_rest: report.correlation(&[&["A1"], &["F", "A2"]])?,
        excitation,
        top_fock_population: top_fock_population(state, system),
    })
}

/// Run the exchange protocol: atom 1 through the vacuum cavity for `t1`,
/// then atom 2 for `t2`, sampling the correlations along the second
/// transit.
///
/// With coupling 1, `t1 = pi/4`, `t2 = pi/2` the field decouples completely
/// and the atoms come out maximally entangled.
pub fn exchange_protocol(system: &CavitySystem, t1: f64, t2: f64) -> Result<ExchangeReport> {
    let number_op = excitation_number(system);
    let initial = system.initial_state();
    let mut stages = Vec::new();
    stages.push(stage_snapshot(
        &initial, system, &number_op, "initial", 0.0,
    )?);

    let after_first = transit(&initial, system, Atom::One, t1)?;
    stages.push(stage_snapshot(
        &after_first,
        system,
        &number_op,
        "after_transit_1",
        t1,
    )?);
    let entering = stages.last().unwrap().clone();

    let sample_times: Vec<f64> = if t2 == 0.0 {
        vec![0.0]
    } else {
        (0..SECOND_TRANSIT_SAMPLES)
            .map(|j| t2 * j as f64 / (SECOND_TRANSIT_SAMPLES - 1) as f64)
            .collect()
    };

    let mut identity_max_residual = 0.0f64;
    let mut s_a1_drift = 0.0f64;
    let mut i_a1f_worst_increase = 0.0f64;
    let mut i_a1a2_worst_decrease = 0.0f64;
    for &tau in &sample_times {
        let evolved = transit(&after_first, system, Atom::Two, tau)?;
        let stage = stage_snapshot(
            &evolved,
            system,
            &number_op,
            format!("transit_2 tau={tau:.6}"),
            t1 + tau,
        )?;
        // Three-system identity with (1,2,3) = (A1, F, A2), time zero at
        // the start of the second transit.
        let residual = ((entering.i_a1_f - stage.i_a1_f) - (stage.e_a2_rest - stage.i_f_a2)).abs();
        identity_max_residual = identity_max_residual.max(residual);
        s_a1_drift = s_a1_drift.max((stage.s_a1 - entering.s_a1).abs());
        i_a1f_worst_increase = i_a1f_worst_increase.max(stage.i_a1_f - entering.i_a1_f);
        i_a1a2_worst_decrease = i_a1a2_worst_decrease.max(entering.i_a1_a2 - stage.i_a1_a2);
        stages.push(stage);
    }

    let mut decomposition_max_residual = 0.0f64;
    let mut excitation_drift = 0.0f64;
    let mut max_top = 0.0f64;
    let initial_excitation = stages[0].excitation;
    for stage in &stages {
        // I_{A1 F A2} = I_{F A2} + E_{A1{F A2}} with elementary blocks.
        let total = stage.s_a1 + stage.s_f + stage.s_a2 - stage.s_total;
        decomposition_max_residual =
            decomposition_max_residual.max((total - (stage.i_f_a2 + stage.e_a1_rest)).abs());
        excitation_drift = excitation_drift.max((stage.excitation - initial_excitation).abs());
        max_top = max_top.max(stage.top_fock_population);
    }

    let last = stages.last().unwrap();
    Ok(ExchangeReport {
        t1,
        t2,
        identity_max_residual,
        decomposition_max_residual,
        s_a1_drift,
        i_a1f_worst_increase,
        i_a1a2_worst_decrease,
        excitation_drift,
        max_top_fock_population: max_top,
        final_s_f: last.s_f,
        final_i_a1_a2: last.i_a1_a2,
        stages,
    })
}

/// Flat key/value view of a stage, for reporting.
pub fn stage_quantities(stage: &ExchangeStage) -> BTreeMap<String, f64> {
    BTreeMap::from([
        ("S_A1".into(), stage.s_a1),
        ("S_F".into(), stage.s_f),
        ("S_A2".into(), stage.s_a2),
        ("S_total".into(), stage.s_total),
        ("I_A1F".into(), stage.i_a1_f),
        ("I_FA2".into(), stage.i_f_a2),
        ("I_A1A2".into(), stage.i_a1_a2),
        ("E_A2rest".into(), stage.e_a2_rest),
        ("E_A1rest".into(), stage.e_a1_rest),
        ("excitation".into(), stage.excitation),
        ("top_fock".into(), stage.top_fock_population),
    ])
}
