//! Symmetric (Dicke) basis for `N` three-level atoms with a bounded number of
//! Rydberg excitations, and the collective ladder operators acting on it.
//!
//! A configuration is labelled `(n_a, n_r)`: `n_a` atoms in the ground state
//! `a`, `n_r` atoms in the Rydberg state `r`, and the remaining
//! `n_b = N - n_a - n_r` atoms in `b`. States are ordered `n_r`-major with
//! `n_a` ascending, so the `n_r = 0` block is contiguous at the front.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

/// Basis of permutation-symmetric configurations `(n_a, n_r)` with
/// `n_r <= max_rydberg`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DickeBasis {
    n_atoms: usize,
    max_rydberg: usize,
    /// flat index -> (n_a, n_r)
    configs: Vec<(usize, usize)>,
}

impl DickeBasis {
    /// Build the basis for `n_atoms` atoms keeping configurations with at
    /// most `max_rydberg` Rydberg excitations.
    ///
    /// The squeezing engines use `max_rydberg` of 0 (ground manifold only)
    /// or 1 (hard blockade truncation); the single-laser light-shift run
    /// extends to 2 so the doubly-excited intermediate state is available
    /// when the blockade is switched off.
    pub fn new(n_atoms: usize, max_rydberg: usize) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidArgument(
                "n_atoms must be at least 1".into(),
            ));
        }
        if max_rydberg > n_atoms {
            return Err(Error::InvalidArgument(format!(
                "max_rydberg {} exceeds n_atoms {}",
                max_rydberg, n_atoms
            )));
        }
        let mut configs = Vec::new();
        for n_r in 0..=max_rydberg {
            for n_a in 0..=(n_atoms - n_r) {
                configs.push((n_a, n_r));
            }
        }
        Ok(Self {
            n_atoms,
            max_rydberg,
            configs,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn max_rydberg(&self) -> usize {
        self.max_rydberg
    }

    /// Number of configurations; equals `(N+1) + N*max_rydberg` for
    /// `max_rydberg` in {0, 1}.
    pub fn dimension(&self) -> usize {
        self.configs.len()
    }

    /// Configuration at a flat index.
    pub fn config(&self, index: usize) -> (usize, usize) {
        self.configs[index]
    }

    /// Flat index of `(n_a, n_r)`, if the configuration is inside the basis.
    pub fn index_of(&self, n_a: usize, n_r: usize) -> Option<usize> {
        if n_r > self.max_rydberg || n_a + n_r > self.n_atoms {
            return None;
        }
        // n_r-major layout: blocks of length (N + 1 - k) for k = 0..n_r.
        let mut offset = 0;
        for k in 0..n_r {
            offset += self.n_atoms + 1 - k;
        }
        Some(offset + n_a)
    }

    /// Number of `b` atoms in the configuration at `index`.
    pub fn n_b(&self, index: usize) -> usize {
        let (n_a, n_r) = self.configs[index];
        self.n_atoms - n_a - n_r
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, (usize, usize))> + '_ {
        self.configs.iter().copied().enumerate()
    }

    /// Collective ladder operator as a sparse map on amplitude vectors.
    ///
    /// Matrix elements carry the bosonic factors of the Schwinger
    /// representation, e.g. `a†b` maps `(n_a, n_r) -> (n_a + 1, n_r)` with
    /// weight `sqrt((n_a + 1) * n_b)`. Transitions that would exceed
    /// `max_rydberg` or produce a negative occupation are dropped, which is
    /// what enforces the blockade truncation.
    pub fn ladder(&self, which: Ladder) -> SparseOp {
        let mut entries = Vec::new();
        for (i, (n_a, n_r)) in self.iter() {
            let n_b = self.n_atoms - n_a - n_r;
            let (target, weight) = match which {
                Ladder::AdagB => ((n_a as isize + 1, n_r as isize), ((n_a + 1) * n_b) as f64),
                Ladder::BdagA => ((n_a as isize - 1, n_r as isize), (n_a * (n_b + 1)) as f64),
                Ladder::RdagA => ((n_a as isize - 1, n_r as isize + 1), (n_a * (n_r + 1)) as f64),
                Ladder::AdagR => ((n_a as isize + 1, n_r as isize - 1), ((n_a + 1) * n_r) as f64),
                Ladder::RdagB => ((n_a as isize, n_r as isize + 1), (n_b * (n_r + 1)) as f64),
                Ladder::BdagR => ((n_a as isize, n_r as isize - 1), ((n_b + 1) * n_r) as f64),
            };
            if weight == 0.0 || target.0 < 0 || target.1 < 0 {
                continue;
            }
            if let Some(j) = self.index_of(target.0 as usize, target.1 as usize) {
                entries.push(SparseEntry {
                    row: j,
                    col: i,
                    weight: weight.sqrt(),
                });
            }
        }
        SparseOp {
            dim: self.dimension(),
            entries,
        }
    }
}

/// The six collective ladder operators between the three levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    /// `a†b`: move one atom b -> a.
    AdagB,
    /// `b†a`: move one atom a -> b.
    BdagA,
    /// `r†a`: move one atom a -> r.
    RdagA,
    /// `a†r`: move one atom r -> a.
    AdagR,
    /// `r†b`: move one atom b -> r.
    RdagB,
    /// `b†r`: move one atom r -> b.
    BdagR,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseEntry {
    pub row: usize,
    pub col: usize,
    pub weight: f64,
}

/// Real sparse operator in coordinate form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    entries: Vec<SparseEntry>,
}

impl SparseOp {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[SparseEntry] {
        &self.entries
    }

    /// `out += coeff * M * psi`
    pub fn accumulate(&self, coeff: C64, psi: &[C64], out: &mut [C64]) {
        for e in &self.entries {
            out[e.row] += coeff * e.weight * psi[e.col];
        }
    }

    /// `out += coeff * M^T * psi` (entries are real, so this is the adjoint).
    pub fn accumulate_adjoint(&self, coeff: C64, psi: &[C64], out: &mut [C64]) {
        for e in &self.entries {
            out[e.col] += coeff * e.weight * psi[e.row];
        }
    }

    /// `M * psi` as a fresh vector.
    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.accumulate(C64::new(1.0, 0.0), psi, &mut out);
        out
    }

    /// `M^T * psi` as a fresh vector.
    pub fn apply_adjoint(&self, psi: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.accumulate_adjoint(C64::new(1.0, 0.0), psi, &mut out);
        out
    }
}
