//! Quantum state of the symmetric ensemble: one complex amplitude per Dicke
//! configuration.

use crate::basis::DickeBasis;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

/// Default tolerance on the squared norm after construction and after every
/// evolution step.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Hard failure bound: beyond this deviation the state is rejected outright.
pub const NORM_HARD_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct DickeState {
    basis: DickeBasis,
    amplitudes: Vec<C64>,
}

impl DickeState {
    /// Wrap an amplitude vector; it must match the basis dimension and be
    /// normalized to within [`NORM_TOLERANCE`].
    pub fn new(basis: DickeBasis, amplitudes: Vec<C64>) -> Result<Self> {
        Self::with_tolerance(basis, amplitudes, NORM_TOLERANCE)
    }

    /// Same as [`DickeState::new`] with a caller-chosen norm tolerance.
    pub fn with_tolerance(
        basis: DickeBasis,
        amplitudes: Vec<C64>,
        tolerance: f64,
    ) -> Result<Self> {
        if amplitudes.len() != basis.dimension() {
            return Err(Error::InvalidState(format!(
                "amplitude vector length {} does not match basis dimension {}",
                amplitudes.len(),
                basis.dimension()
            )));
        }
        let state = Self { basis, amplitudes };
        let dev = state.norm_deviation();
        if dev > tolerance {
            return Err(Error::InvalidState(format!(
                "squared norm deviates from 1 by {dev:.3e} (tolerance {tolerance:.1e})"
            )));
        }
        Ok(state)
    }

    /// Product state with every atom in `a`: the coherent spin state pointing
    /// along +z.
    pub fn all_in_a(basis: DickeBasis) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); basis.dimension()];
        let idx = basis
            .index_of(basis.n_atoms(), 0)
            .expect("(N, 0) is always in the basis");
        amplitudes[idx] = C64::new(1.0, 0.0);
        Self { basis, amplitudes }
    }

    /// Product state with every atom in `b`.
    pub fn all_in_b(basis: DickeBasis) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); basis.dimension()];
        let idx = basis.index_of(0, 0).expect("(0, 0) is always in the basis");
        amplitudes[idx] = C64::new(1.0, 0.0);
        Self { basis, amplitudes }
    }

    /// Coherent spin state `[cos(x)|a> + e^{i phi} sin(x)|b>]^(x N)` in the
    /// ground manifold: binomial amplitudes over `n_a`.
    pub fn coherent(basis: DickeBasis, half_angle: f64, phase: f64) -> Self {
        let n = basis.n_atoms();
        let ca = half_angle.cos();
        let cb = half_angle.sin();
        let mut amplitudes = vec![C64::new(0.0, 0.0); basis.dimension()];
        for n_a in 0..=n {
            let n_b = n - n_a;
            let w = binomial(n, n_a).sqrt()
                * ca.powi(n_a as i32)
                * cb.powi(n_b as i32);
            let ph = C64::from_polar(1.0, phase * n_b as f64);
            amplitudes[basis.index_of(n_a, 0).unwrap()] = w * ph;
        }
        let mut s = Self { basis, amplitudes };
        s.renormalize();
        s
    }

    pub fn basis(&self) -> &DickeBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// |  <psi|psi> - 1 |
    pub fn norm_deviation(&self) -> f64 {
        (self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs()
    }

    pub fn renormalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for z in &mut self.amplitudes {
                *z /= n;
            }
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}
