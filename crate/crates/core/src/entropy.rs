//! Von Neumann entropy, the index of correlation (mutual information),
//! entanglement entropy, and the entropy inequalities used throughout.
//!
//! All entropies are in nats. Internal (I) and external (E) correlations
//! share one formula — the sum of block entropies minus the joint entropy —
//! and differ only in which partition the blocks come from, so a single
//! [`index_of_correlation`] serves both.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, SubsystemLayout};
use crate::state::QuantumState;

/// Slack allowed on mutual-information non-negativity and the inequality
/// checks; looser than construction tolerances because several eigensolves
/// aggregate.
pub const MI_TOL: f64 = 1e-9;
const PURITY_TOL: f64 = 1e-8;
const DENSITY_TRACE_TOL: f64 = 1e-8;
const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Von Neumann entropy `S = -sum lambda ln lambda` in nats, with
/// `0 ln 0 := 0`. Eigenvalues in `[-1e-10, 0)` are clamped to zero.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > DENSITY_TRACE_TOL {
        return Err(Error::InvalidDensity(format!("trace {trace} != 1")));
    }
    let eigenvalues = linalg::hermitian_eigenvalues(rho)?;
    let mut s = 0.0;
    for lambda in eigenvalues {
        if lambda < EIGENVALUE_FLOOR {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {lambda:.3e}"
            )));
        }
        if lambda > 0.0 {
            s -= lambda * lambda.ln();
        }
    }
    Ok(s.max(0.0))
}

/// Entropy of a classical probability vector; the diagonal-density case.
pub fn scalar_entropy(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Entropy of the reduced state on `subset`.
pub fn subset_entropy<S: AsRef<str>>(state: &QuantumState, subset: &[S]) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::DimensionMismatch("empty subset".into()));
    }
    von_neumann_entropy(&state.reduced_density(subset)?)
}

fn check_disjoint<S: AsRef<str>>(blocks: &[&[S]]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for block in blocks {
        for label in *block {
            let label = label.as_ref();
            if seen.contains(&label) {
                return Err(Error::OverlappingBlocks(label.to_string()));
            }
            seen.push(label);
        }
    }
    Ok(())
}

/// Index of correlation over disjoint blocks: `sum S(block) - S(union)`.
///
/// With two blocks this is the quantum mutual information; with the
/// singleton blocks of one named system it is that system's internal
/// correlation.
pub fn index_of_correlation<S: AsRef<str>>(state: &QuantumState, blocks: &[&[S]]) -> Result<f64> {
    if blocks.len() < 2 {
        return Err(Error::DimensionMismatch(
            "index of correlation needs at least two blocks".into(),
        ));
    }
    check_disjoint(blocks)?;
    let mut total = 0.0;
    let mut union: Vec<&str> = Vec::new();
    for block in blocks {
        total += subset_entropy(state, block)?;
        union.extend(block.iter().map(|l| l.as_ref()));
    }
    Ok(total - subset_entropy(state, &union)?)
}

/// Entropy of entanglement across `cut` for a globally pure state: the
/// entropy of either side, equal to half the cross-cut mutual information.
pub fn entropy_of_entanglement<S: AsRef<str>>(state: &QuantumState, cut: &[S]) -> Result<f64> {
    let impurity = (state.purity() - 1.0).abs();
    if impurity > PURITY_TOL {
        return Err(Error::MixedState(impurity));
    }
    subset_entropy(state, cut)
}

/// Result of checking `I_ab <= 2 inf{S_a, S_b}`.
#[derive(Debug, Clone, Copy)]
pub struct MiBoundCheck {
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Check the two-block correlation bound `I_ab <= 2 min(S_a, S_b)`.
pub fn check_mi_bound<S: AsRef<str>>(
    state: &QuantumState,
    block_a: &[S],
    block_b: &[S],
) -> Result<MiBoundCheck> {
    check_disjoint(&[block_a, block_b])?;
    let value = index_of_correlation(state, &[block_a, block_b])?;
    let s_a = subset_entropy(state, block_a)?;
    let s_b = subset_entropy(state, block_b)?;
    let bound = 2.0 * s_a.min(s_b);
    Ok(MiBoundCheck {
        value,
        bound,
        holds: value <= bound + MI_TOL,
    })
}

/// Result of a strong-subadditivity check in the `E >= I` form.
#[derive(Debug, Clone, Copy)]
pub struct SsaCheck {
    /// `E_{s3,{s1 s2}} = S(s3) + S(s1 s2) - S(s1 s2 s3)`.
    pub external: f64,
    /// `I_{s2 s3} = S(s2) + S(s3) - S(s2 s3)`.
    pub mutual: f64,
    pub holds: bool,
}

/// Strong subadditivity in correlation form: `E_{s3,{s1 s2}} >= I_{s2,s3}`.
pub fn check_ssa<S: AsRef<str>>(
    state: &QuantumState,
    s1: &[S],
    s2: &[S],
    s3: &[S],
) -> Result<SsaCheck> {
    if s1.is_empty() || s2.is_empty() || s3.is_empty() {
        return Err(Error::DimensionMismatch("empty subset".into()));
    }
    check_disjoint(&[s1, s2, s3])?;
    let mut s12: Vec<&str> = s1.iter().map(|l| l.as_ref()).collect();
    s12.extend(s2.iter().map(|l| l.as_ref()));
    let s3_refs: Vec<&str> = s3.iter().map(|l| l.as_ref()).collect();
    let external = index_of_correlation(state, &[&s12[..], &s3_refs[..]])?;
    let s2_refs: Vec<&str> = s2.iter().map(|l| l.as_ref()).collect();
    let mutual = index_of_correlation(state, &[&s2_refs[..], &s3_refs[..]])?;
    Ok(SsaCheck {
        external,
        mutual,
        holds: external - mutual >= -MI_TOL,
    })
}

/// Canonical map key for a label subset: layout-ordered, concatenated when
/// every label in the layout is one character, comma-joined otherwise.
pub fn subset_key<S: AsRef<str>>(layout: &SubsystemLayout, labels: &[S]) -> Result<String> {
    let mut positions = layout.positions(labels)?;
    positions.sort_unstable();
    positions.dedup();
    let sep = if layout.labels().iter().all(|l| l.chars().count() == 1) {
        ""
    } else {
        ","
    };
    Ok(positions
        .iter()
        .map(|&p| layout.labels()[p].as_str())
        .collect::<Vec<_>>()
        .join(sep))
}

/// Display name for a block inside a derived-quantity name: bare for a
/// single one-character label, braced otherwise (`E_1{234}`, `E_{23}4`).
pub fn block_group<S: AsRef<str>>(layout: &SubsystemLayout, block: &[S]) -> Result<String> {
    let key = subset_key(layout, block)?;
    if block.len() == 1 && key.chars().count() == 1 {
        Ok(key)
    } else {
        Ok(format!("{{{key}}}"))
    }
}

/// Name of a derived correlation quantity, e.g. `I_12` or `E_1{234}`.
pub fn correlation_name<S: AsRef<str>>(
    layout: &SubsystemLayout,
    prefix: &str,
    blocks: &[&[S]],
) -> Result<String> {
    let mut name = format!("{prefix}_");
    for block in blocks {
        name.push_str(&block_group(layout, block)?);
    }
    Ok(name)
}

/// Inverse of [`correlation_name`]: the block structure named by an `I_...`
/// or `E_...` quantity, for the given layout.
pub fn parse_correlation_name(
    layout: &SubsystemLayout,
    name: &str,
) -> Result<Vec<Vec<String>>> {
    let single_char = layout.labels().iter().all(|l| l.chars().count() == 1);
    let body = name
        .strip_prefix("I_")
        .or_else(|| name.strip_prefix("E_"))
        .ok_or_else(|| Error::UnknownLabel(name.to_string()))?;
    let mut groups: Vec<Vec<String>> = Vec::new();
    let mut chars = body.chars();
    while let Some(ch) = chars.next() {
        if ch == '{' {
            let mut inner = String::new();
            for c in chars.by_ref() {
                if c == '}' {
                    break;
                }
                inner.push(c);
            }
            let labels: Vec<String> = if single_char {
                inner.chars().map(|c| c.to_string()).collect()
            } else {
                inner.split(',').map(|s| s.to_string()).collect()
            };
            groups.push(labels);
        } else {
            groups.push(vec![ch.to_string()]);
        }
    }
    Ok(groups)
}

/// All subset entropies of a state plus a standard set of derived
/// correlation quantities, everything in nats.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub state_id: String,
    layout: SubsystemLayout,
    pub subset_entropies: BTreeMap<String, f64>,
    pub derived: BTreeMap<String, f64>,
}

impl CorrelationReport {
    /// Full census: the entropy of every non-empty label subset, the total
    /// correlation, every pairwise mutual information, and the external
    /// correlation across every bipartition of the system.
    #[allow(clippy::needless_range_loop)] // masks are bitsets, not positions
    pub fn full(state: &QuantumState, state_id: impl Into<String>) -> Result<Self> {
        let layout = state.layout().clone();
        let n = layout.len();
        let labels = layout.labels();

        let mut subset_entropies = BTreeMap::new();
        let mut entropy_by_mask: Vec<f64> = vec![0.0; 1 << n];
        for mask in 1usize..(1 << n) {
            let subset: Vec<&str> = (0..n)
                .filter(|p| mask & (1 << p) != 0)
                .map(|p| labels[p].as_str())
                .collect();
            let s = subset_entropy(state, &subset)?;
            entropy_by_mask[mask] = s;
            subset_entropies.insert(subset_key(&layout, &subset)?, s);
        }

        let mut derived = BTreeMap::new();
        let full_mask = (1usize << n) - 1;
        if n >= 2 {
            // Total correlation over the elementary subsystems.
            let singles_sum: f64 = (0..n).map(|p| entropy_by_mask[1 << p]).sum();
            let singleton_blocks: Vec<Vec<&str>> =
                (0..n).map(|p| vec![labels[p].as_str()]).collect();
            let block_refs: Vec<&[&str]> = singleton_blocks.iter().map(|b| b.as_slice()).collect();
            derived.insert(
                correlation_name(&layout, "I", &block_refs)?,
                singles_sum - entropy_by_mask[full_mask],
            );
            // Pairwise mutual informations.
            for p in 0..n {
                for q in (p + 1)..n {
                    let name = correlation_name(
                        &layout,
                        "I",
                        &[&[labels[p].as_str()], &[labels[q].as_str()]],
                    )?;
                    let value = entropy_by_mask[1 << p] + entropy_by_mask[1 << q]
                        - entropy_by_mask[(1 << p) | (1 << q)];
                    derived.insert(name, value);
                }
            }
            // External correlation across every bipartition; the block
            // holding the first subsystem is listed first.
            for mask in 1usize..full_mask {
                if mask & 1 == 0 {
                    continue;
                }
                let comp = full_mask & !mask;
                if comp == 0 {
                    continue;
                }
                let block_a: Vec<&str> = (0..n)
                    .filter(|p| mask & (1 << p) != 0)
                    .map(|p| labels[p].as_str())
                    .collect();
                let block_b: Vec<&str> = (0..n)
                    .filter(|p| comp & (1 << p) != 0)
                    .map(|p| labels[p].as_str())
                    .collect();
                let name = correlation_name(&layout, "E", &[&block_a[..], &block_b[..]])?;
                let value =
                    entropy_by_mask[mask] + entropy_by_mask[comp] - entropy_by_mask[full_mask];
                derived.insert(name, value);
            }
        }

        Ok(Self {
            state_id: state_id.into(),
            layout,
            subset_entropies,
            derived,
        })
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    /// Entropy of a recorded subset.
    pub fn entropy<S: AsRef<str>>(&self, subset: &[S]) -> Result<f64> {
        let key = subset_key(&self.layout, subset)?;
        self.subset_entropies
            .get(&key)
            .copied()
            .ok_or(Error::UnknownLabel(key))
    }

    /// Correlation over disjoint blocks, derived from the recorded subset
    /// entropies.
    pub fn correlation<S: AsRef<str>>(&self, blocks: &[&[S]]) -> Result<f64> {
        check_disjoint(blocks)?;
        let mut total = 0.0;
        let mut union: Vec<&str> = Vec::new();
        for block in blocks {
            total += self.entropy(block)?;
            union.extend(block.iter().map(|l| l.as_ref()));
        }
        Ok(total - self.entropy(&union)?)
    }

    /// Evaluate a named quantity (`I_...`/`E_...`) from the recorded subset
    /// entropies, whether or not it is in the `derived` map. The internal
    /// correlation of a single elementary subsystem is identically zero.
    pub fn correlation_named(&self, name: &str) -> Result<f64> {
        let groups = parse_correlation_name(&self.layout, name)?;
        if groups.len() == 1 {
            return Ok(0.0);
        }
        let blocks: Vec<&[String]> = groups.iter().map(|g| g.as_slice()).collect();
        self.correlation(&blocks)
    }
}
