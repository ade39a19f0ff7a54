//! Fixed-step fourth-order Runge-Kutta integration of the Schrödinger
//! equation `i d/dt psi = H(t) psi`, with a per-step norm check (no
//! renormalization), plus a dense matrix-exponential propagator used as a
//! cross-check for small static Hamiltonians.

use crate::error::{Error, Result};
use crate::state::{NORM_HARD_TOLERANCE, NORM_TOLERANCE};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Action of a (possibly time-dependent) Hamiltonian on a state vector.
pub trait HamiltonianAction {
    fn dim(&self) -> usize;
    /// `out = H(t) psi`
    fn apply(&self, t: f64, psi: &[C64], out: &mut [C64]);
}

/// Norm-drift policy for a run.
#[derive(Debug, Clone, Copy)]
pub struct NormPolicy {
    /// Allowed norm deviation increase per step.
    pub per_step: f64,
    /// Total deviation that aborts the run.
    pub hard: f64,
}

impl Default for NormPolicy {
    fn default() -> Self {
        Self {
            per_step: NORM_TOLERANCE,
            hard: NORM_HARD_TOLERANCE,
        }
    }
}

/// RK4 stepper with preallocated stage buffers.
pub struct Rk4 {
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); dim];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    /// Advance `psi` from `t` to `t + dt` under `-i H(t)`.
    pub fn step<H: HamiltonianAction>(&mut self, h: &H, t: f64, dt: f64, psi: &mut [C64]) {
        let n = psi.len();
        let mi = C64::new(0.0, -1.0);

        h.apply(t, psi, &mut self.k1);
        for k in 0..n {
            self.k1[k] *= mi;
            self.tmp[k] = psi[k] + 0.5 * dt * self.k1[k];
        }
        h.apply(t + 0.5 * dt, &self.tmp, &mut self.k2);
        for k in 0..n {
            self.k2[k] *= mi;
            self.tmp[k] = psi[k] + 0.5 * dt * self.k2[k];
        }
        h.apply(t + 0.5 * dt, &self.tmp, &mut self.k3);
        for k in 0..n {
            self.k3[k] *= mi;
            self.tmp[k] = psi[k] + dt * self.k3[k];
        }
        h.apply(t + dt, &self.tmp, &mut self.k4);
        for k in 0..n {
            self.k4[k] *= mi;
            psi[k] += dt / 6.0 * (self.k1[k] + 2.0 * self.k2[k] + 2.0 * self.k3[k] + self.k4[k]);
        }
    }
}

/// Check the running norm deviation; errors if a single step drifted more
/// than `policy.per_step` or the total exceeds `policy.hard`.
pub fn check_norm(
    t: f64,
    norm_sqr: f64,
    previous_deviation: f64,
    policy: NormPolicy,
) -> Result<f64> {
    let deviation = (norm_sqr - 1.0).abs();
    if deviation > policy.hard {
        return Err(Error::IntegrationFailure {
            t,
            deviation,
            tolerance: policy.hard,
        });
    }
    let step_increase = deviation - previous_deviation;
    if step_increase > policy.per_step {
        return Err(Error::IntegrationFailure {
            t,
            deviation: step_increase,
            tolerance: policy.per_step,
        });
    }
    Ok(deviation)
}

pub fn norm_sqr(psi: &[C64]) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum()
}

/// Eigendecomposition of a real symmetric matrix, kept for reuse across many
/// propagation times.
pub struct SymmetricPropagator {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SymmetricPropagator {
    /// Decompose a dense real symmetric `H`. Intended for dimensions up to a
    /// few hundred.
    pub fn new(h: DMatrix<f64>) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::InvalidArgument("matrix must be square".into()));
        }
        let sym = nalgebra::SymmetricEigen::new(h);
        Ok(Self {
            eigenvalues: sym.eigenvalues,
            eigenvectors: sym.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.eigenvalues.as_slice()
    }

    /// `exp(-i H t) psi` exactly (up to the decomposition accuracy).
    pub fn propagate(&self, t: f64, psi: &[C64]) -> Vec<C64> {
        let n = self.eigenvalues.len();
        // coeffs = V^T psi
        let mut coeffs = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += self.eigenvectors[(k, j)] * psi[k];
            }
            coeffs[j] = acc * C64::from_polar(1.0, -self.eigenvalues[j] * t);
        }
        let mut out = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += self.eigenvectors[(k, j)] * coeffs[j];
            }
            out[k] = acc;
        }
        out
    }

    /// Eigenvalue of the branch with maximal summed overlap against
    /// `reference`, clustering degenerate eigenvalues. Errors if the best
    /// cluster holds less than half the reference weight.
    pub fn branch_eigenvalue(&self, reference: &[f64], label: &str) -> Result<f64> {
        let n = self.eigenvalues.len();
        let mut overlaps = vec![0.0_f64; n];
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += self.eigenvectors[(k, j)] * reference[k];
            }
            overlaps[j] = acc * acc;
        }
        // cluster eigenvalues that agree to a relative tolerance
        let scale = self
            .eigenvalues
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
            .max(1.0);
        let tol = 1e-9 * scale;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.eigenvalues[a].total_cmp(&self.eigenvalues[b]));
        let mut best = (0.0_f64, 0.0_f64); // (overlap, eigenvalue)
        let mut i = 0;
        while i < n {
            let mut j = i;
            let mut cluster_overlap = 0.0;
            let anchor = self.eigenvalues[order[i]];
            while j < n && (self.eigenvalues[order[j]] - anchor).abs() <= tol {
                cluster_overlap += overlaps[order[j]];
                j += 1;
            }
            if cluster_overlap > best.0 {
                best = (cluster_overlap, anchor);
            }
            i = j;
        }
        if best.0 < 0.5 {
            return Err(Error::AmbiguousBranch {
                overlap: best.0,
                label: label.to_string(),
            });
        }
        Ok(best.1)
    }
}

/// Least-squares fit of `y(x) = c0 + c1 x + c2 x^2` through the sample points.
pub fn fit_quadratic(xs: &[f64], ys: &[f64]) -> Result<[f64; 3]> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::InvalidArgument(
            "quadratic fit needs at least three samples".into(),
        ));
    }
    let n = xs.len();
    let mut a = DMatrix::<f64>::zeros(n, 3);
    let mut b = DVector::<f64>::zeros(n);
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        a[(i, 0)] = 1.0;
        a[(i, 1)] = x;
        a[(i, 2)] = x * x;
        b[i] = y;
    }
    let at = a.transpose();
    let ata = &at * &a;
    let atb = at * b;
    let sol = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| Error::InvalidArgument("singular quadratic fit".into()))?;
    Ok([sol[0], sol[1], sol[2]])
}
