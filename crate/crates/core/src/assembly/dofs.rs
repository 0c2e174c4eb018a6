use alloc::vec::Vec;

use crate::{Error, Result};

const NO_DOF: usize = usize::MAX;

/// Global vertex <-> local dof numbering of one active mesh. Local indices
/// follow increasing global vertex index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofMap {
    global: Vec<usize>,
    local: Vec<usize>,
}

impl DofMap {
    /// `active_vertices` must be sorted and unique.
    pub fn new(active_vertices: &[usize], num_vertices: usize) -> Result<Self> {
        let mut local = alloc::vec![NO_DOF; num_vertices];
        for (i, &g) in active_vertices.iter().enumerate() {
            if g >= num_vertices || (i > 0 && active_vertices[i - 1] >= g) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "active vertex list not sorted/unique or out of range at position {i}"
                )));
            }
            local[g] = i;
        }
        Ok(Self {
            global: active_vertices.to_vec(),
            local,
        })
    }

    pub fn len(&self) -> usize {
        self.global.len()
    }

    pub fn is_empty(&self) -> bool {
        self.global.is_empty()
    }

    pub fn num_vertices(&self) -> usize {
        self.local.len()
    }

    pub fn local(&self, vertex: usize) -> Option<usize> {
        match self.local[vertex] {
            NO_DOF => None,
            l => Some(l),
        }
    }

    pub fn global(&self, dof: usize) -> usize {
        self.global[dof]
    }

    pub fn globals(&self) -> &[usize] {
        &self.global
    }

    /// Background-vertex vector, zero outside the active set.
    pub fn scatter(&self, local_values: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.local.len()];
        for (&g, &v) in self.global.iter().zip(local_values) {
            out[g] = v;
        }
        out
    }

    pub fn gather(&self, global_values: &[f64]) -> Vec<f64> {
        self.global.iter().map(|&g| global_values[g]).collect()
    }
}
