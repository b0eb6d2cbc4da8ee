use serde::{Deserialize, Serialize};

use super::state::RotorState;
use crate::error::{Error, Result};

/// Lattice sizing and growth rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridPolicy {
    /// Initial half-width; `None` means four kernel half-widths of the
    /// strongest kick.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_half_width: Option<usize>,
    pub growth_chunk: usize,
    pub edge_threshold: f64,
    pub max_sites: usize,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self {
            initial_half_width: None,
            growth_chunk: 1024,
            edge_threshold: 1e-12,
            max_sites: 1 << 24,
        }
    }
}

/// Sites per side checked for edge mass: 5% of the lattice, at least
/// `min_band`, at most half of it.
pub fn edge_band(len: usize, min_band: usize) -> usize {
    let five_percent = (len as f64 * 0.05).ceil() as usize;
    five_percent.max(min_band).min(len / 2)
}

/// Pads the lattice by `growth_chunk` per side until the outer 5% on each side
/// holds less than `edge_threshold`. Returns whether the lattice grew.
pub fn maybe_expand_grid(state: &mut RotorState, policy: &GridPolicy) -> Result<bool> {
    expand_with_band(state, policy, 0)
}

pub(crate) fn expand_with_band(
    state: &mut RotorState,
    policy: &GridPolicy,
    min_band: usize,
) -> Result<bool> {
    let mut grew = false;
    while state.edge_mass(edge_band(state.len(), min_band)) >= policy.edge_threshold {
        grow(state, policy)?;
        grew = true;
    }
    Ok(grew)
}

pub(crate) fn grow(state: &mut RotorState, policy: &GridPolicy) -> Result<()> {
    let chunk = policy.growth_chunk.max(1);
    let requested = state.len() + 2 * chunk;
    if requested > policy.max_sites {
        return Err(Error::GridCapExceeded {
            requested,
            cap: policy.max_sites,
        });
    }
    state.pad(chunk);
    Ok(())
}
