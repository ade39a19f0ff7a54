//! Collective spin operators on the (a, b) ground manifold and the squeezing
//! metrics derived from them.
//!
//! Conventions: `J_z = (n_a - n_b)/2`, and the in-plane component at angle
//! `theta` is `J_theta = (e^{i theta} a†b + e^{-i theta} b†a)/2`, so the
//! coherent state has variance `N/4` along every transverse axis and the
//! squeezing factor starts at 1. The squeezed axis of the pair Hamiltonian
//! sits at `theta = -pi/4` with this sign choice. Operators act within fixed
//! `n_r` sectors (on the ground atoms only).

use crate::basis::{DickeBasis, Ladder};
use crate::error::{Error, Result};
use crate::state::DickeState;
use num_complex::Complex64 as C64;

/// Tolerance on the norm before observables are evaluated.
const OBS_NORM_TOLERANCE: f64 = 1e-6;

/// Complex sparse Hermitian operator (coordinate form), used for the spin
/// components.
#[derive(Debug, Clone)]
pub struct SpinOperator {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SpinOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for &(r, c, w) in &self.entries {
            out[r] += w * psi[c];
        }
        out
    }

    /// Dense matrix, for the small brute-force checks.
    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let mut m = vec![vec![C64::new(0.0, 0.0); self.dim]; self.dim];
        for &(r, c, w) in &self.entries {
            m[r][c] += w;
        }
        m
    }

    pub fn expectation(&self, psi: &[C64]) -> f64 {
        let ap = self.apply(psi);
        psi.iter()
            .zip(&ap)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }
}

/// `J_theta = (e^{i theta} a†b + e^{-i theta} b†a)/2` as a sparse Hermitian
/// map. Commutes with total atom number and acts within fixed-`n_r` sectors.
pub fn spin_operator(basis: &DickeBasis, theta: f64) -> SpinOperator {
    let raise = basis.ladder(Ladder::AdagB);
    let lower = basis.ladder(Ladder::BdagA);
    let ph = C64::from_polar(0.5, theta);
    let mut entries = Vec::new();
    for e in raise.entries() {
        entries.push((e.row, e.col, ph * e.weight));
    }
    for e in lower.entries() {
        entries.push((e.row, e.col, ph.conj() * e.weight));
    }
    SpinOperator {
        dim: basis.dimension(),
        entries,
    }
}

/// Diagonal `J_z` (in the `J_z = (n_a - n_b)/2` convention).
pub fn jz_operator(basis: &DickeBasis) -> SpinOperator {
    let entries = basis
        .iter()
        .map(|(i, (n_a, n_r))| {
            let n_b = basis.n_atoms() - n_a - n_r;
            (i, i, C64::new((n_a as f64 - n_b as f64) / 2.0, 0.0))
        })
        .collect();
    SpinOperator {
        dim: basis.dimension(),
        entries,
    }
}

/// First and second moments of the collective spin, evaluated exactly in the
/// truncated basis.
#[derive(Debug, Clone, Copy)]
pub struct SpinObservables {
    n_atoms: usize,
    /// (<J_x>, <J_y>, <J_z>)
    pub mean_spin: [f64; 3],
    /// Rydberg occupation `sum n_r |c|^2`.
    pub rydberg_population: f64,
    /// Mean number of atoms in `b`.
    pub n_b_mean: f64,
    // Central second moments of the transverse components.
    m_xx: f64,
    m_yy: f64,
    m_xy: f64,
}

impl SpinObservables {
    /// Variance of `J_theta`; a closed quadratic form in `(cos 2theta,
    /// sin 2theta)`, pi-periodic in `theta`.
    pub fn variance_at(&self, theta: f64) -> f64 {
        let (s2, c2) = (2.0 * theta).sin_cos();
        0.5 * (self.m_xx + self.m_yy) + 0.5 * (self.m_xx - self.m_yy) * c2 - self.m_xy * s2
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Central second moments `(var Jx, var Jy, cov_sym(Jx, Jy))`.
    pub fn transverse_moments(&self) -> (f64, f64, f64) {
        (self.m_xx, self.m_yy, self.m_xy)
    }
}

/// Compute spin observables of a normalized state.
pub fn observables(state: &DickeState) -> Result<SpinObservables> {
    let dev = state.norm_deviation();
    if dev > OBS_NORM_TOLERANCE {
        return Err(Error::InvalidState(format!(
            "observables need a normalized state; norm deviation {dev:.3e}"
        )));
    }
    let basis = state.basis();
    let psi = state.amplitudes();

    let raise = basis.ladder(Ladder::AdagB);
    let jp = raise.apply(psi); // a†b |psi>
    let jm = raise.apply_adjoint(psi); // b†a |psi>

    // J_x = (J+ + J-)/2, J_y = (-i J+ + i J-)/2 in the halved convention.
    let dim = basis.dimension();
    let mut jx = vec![C64::new(0.0, 0.0); dim];
    let mut jy = vec![C64::new(0.0, 0.0); dim];
    let i = C64::new(0.0, 1.0);
    for k in 0..dim {
        jx[k] = 0.5 * (jp[k] + jm[k]);
        jy[k] = 0.5 * (-i * jp[k] + i * jm[k]);
    }

    let dot_re = |u: &[C64], v: &[C64]| -> f64 {
        u.iter().zip(v).map(|(a, b)| (a.conj() * b).re).sum()
    };
    let ex = dot_re(psi, &jx);
    let ey = dot_re(psi, &jy);
    let mut ez = 0.0;
    let mut nr_pop = 0.0;
    let mut nb_mean = 0.0;
    for (k, (n_a, n_r)) in basis.iter() {
        let p = psi[k].norm_sqr();
        let n_b = basis.n_atoms() - n_a - n_r;
        ez += p * (n_a as f64 - n_b as f64) / 2.0;
        nr_pop += p * n_r as f64;
        nb_mean += p * n_b as f64;
    }

    Ok(SpinObservables {
        n_atoms: basis.n_atoms(),
        mean_spin: [ex, ey, ez],
        rydberg_population: nr_pop,
        n_b_mean: nb_mean,
        m_xx: dot_re(&jx, &jx) - ex * ex,
        m_yy: dot_re(&jy, &jy) - ey * ey,
        m_xy: dot_re(&jx, &jy) - ex * ey,
    })
}

/// Squeezing factor and optimal-axis data for a state.
#[derive(Debug, Clone, Copy)]
pub struct SqueezingMetrics {
    /// `S = (N/4) / var(J_{-pi/4})`.
    pub s_factor: f64,
    /// Axis in `[0, pi)` minimizing the transverse variance.
    pub theta_min: f64,
    /// Variance along `theta_min`.
    pub variance_min: f64,
    /// Set when `var(J_{-pi/4})` vanished (degenerate small-N corners);
    /// `s_factor` is then infinite.
    pub infinite: bool,
}

/// Fixed measurement axis for the squeezing factor.
pub const SQUEEZING_AXIS: f64 = -std::f64::consts::FRAC_PI_4;

pub fn squeezing(state: &DickeState) -> Result<SqueezingMetrics> {
    let obs = observables(state)?;
    Ok(squeezing_from_observables(&obs))
}

/// Closed-form minimization of `variance_at` over `theta`: the variance is
/// `avg + R cos(2 theta - phi0)`, minimized at `2 theta = phi0 + pi`.
pub fn squeezing_from_observables(obs: &SpinObservables) -> SqueezingMetrics {
    let n = obs.n_atoms() as f64;
    let var_fixed = obs.variance_at(SQUEEZING_AXIS);
    let (m_xx, m_yy, m_xy) = obs.transverse_moments();
    let avg = 0.5 * (m_xx + m_yy);
    let r = (0.25 * (m_xx - m_yy).powi(2) + m_xy * m_xy).sqrt();
    let theta_min = if r == 0.0 {
        0.0
    } else {
        let phi0 = (-m_xy).atan2(0.5 * (m_xx - m_yy));
        let mut t = 0.5 * (phi0 + std::f64::consts::PI);
        t = t.rem_euclid(std::f64::consts::PI);
        if t >= std::f64::consts::PI {
            t = 0.0;
        }
        t
    };
    let infinite = var_fixed <= 0.0;
    SqueezingMetrics {
        s_factor: if infinite {
            f64::INFINITY
        } else {
            (n / 4.0) / var_fixed
        },
        theta_min,
        variance_min: avg - r,
        infinite,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::DickeBasis;
    use approx::assert_relative_eq;

    fn basis(n: usize) -> DickeBasis {
        DickeBasis::new(n, 0).unwrap()
    }

    #[test]
    fn all_a_observables() {
        let s = DickeState::all_in_a(DickeBasis::new(20, 1).unwrap());
        let obs = observables(&s).unwrap();
        assert_relative_eq!(obs.mean_spin[2], 10.0);
        assert_relative_eq!(obs.mean_spin[0], 0.0);
        assert_relative_eq!(obs.mean_spin[1], 0.0);
        assert_relative_eq!(obs.variance_at(SQUEEZING_AXIS), 5.0, epsilon = 1e-12);
        for k in 0..7 {
            let th = k as f64 * 0.41;
            assert_relative_eq!(obs.variance_at(th), 5.0, epsilon = 1e-12);
        }
        assert_relative_eq!(obs.rydberg_population, 0.0);
        assert_relative_eq!(obs.n_b_mean, 0.0);
    }

    #[test]
    fn all_b_mean_spin() {
        let s = DickeState::all_in_b(DickeBasis::new(20, 1).unwrap());
        let obs = observables(&s).unwrap();
        assert_relative_eq!(obs.mean_spin[2], -10.0);
    }

    #[test]
    fn single_atom_superposition_points_along_x() {
        // (|a> + |b>)/sqrt(2) -> mean spin (1/2, 0, 0)
        let s = DickeState::coherent(basis(1), std::f64::consts::FRAC_PI_4, 0.0);
        let obs = observables(&s).unwrap();
        assert_relative_eq!(obs.mean_spin[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(obs.mean_spin[1], 0.0, epsilon = 1e-12);
        assert_relative_eq!(obs.mean_spin[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_state_squeezing_is_one() {
        for n in [2usize, 5, 17] {
            let s = DickeState::all_in_a(basis(n));
            let m = squeezing(&s).unwrap();
            assert_relative_eq!(m.s_factor, 1.0, epsilon = 1e-10);
            assert!(!m.infinite);
        }
    }

    #[test]
    fn jz_expectation_all_a() {
        let b = basis(6);
        let jz = jz_operator(&b);
        let s = DickeState::all_in_a(b);
        assert_relative_eq!(jz.expectation(s.amplitudes()), 3.0);
    }

    #[test]
    fn j_theta_plus_pi_flips_sign() {
        let b = basis(4);
        for theta in [0.0, 0.63, -1.2] {
            let a = spin_operator(&b, theta).to_dense();
            let c = spin_operator(&b, theta + std::f64::consts::PI).to_dense();
            for (ra, rc) in a.iter().zip(&c) {
                for (za, zc) in ra.iter().zip(rc) {
                    assert_relative_eq!(za.re, -zc.re, epsilon = 1e-12);
                    assert_relative_eq!(za.im, -zc.im, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn spin_operator_single_atom_eigenvalues() {
        // theta = 0 on N=1 is J_x with eigenvalues +-1/2: check J_x^2 = 1/4.
        let b = basis(1);
        let jx = spin_operator(&b, 0.0);
        let m = jx.to_dense();
        // columns of J_x applied twice
        for col in 0..2 {
            let mut e = vec![C64::new(0.0, 0.0); 2];
            e[col] = C64::new(1.0, 0.0);
            let once = jx.apply(&e);
            let twice = jx.apply(&once);
            assert_relative_eq!(twice[col].re, 0.25, epsilon = 1e-12);
        }
        // Hermitian with zero diagonal
        assert_relative_eq!(m[0][0].norm(), 0.0);
        assert_relative_eq!(m[1][1].norm(), 0.0);
    }

    #[test]
    fn unnormalized_state_rejected_by_observables() {
        let b = basis(3);
        let mut s = DickeState::all_in_a(b);
        s.amplitudes_mut()[0] = C64::new(0.1, 0.0);
        assert!(observables(&s).is_err());
    }
}
