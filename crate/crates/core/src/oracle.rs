//! Independent brute-force checks of the perturbative formulas: exact
//! diagonalization of the full few-atom product space for the light shifts,
//! explicit fourth-order sums, and exact time evolution of two atoms for the
//! four-photon pair coupling and the six-laser phase bookkeeping.
//!
//! Nothing here reuses the symmetric-basis machinery: states are raw
//! three-level product configurations, so these results validate the Dicke
//! construction from outside.

use crate::error::{Error, Result};
use crate::integrate::{norm_sqr, HamiltonianAction, Rk4, SymmetricPropagator};
use crate::lasers::{
    pair_coupling_magnitude, standard_six_laser_set, standard_three_laser_set, LaserSet,
    PhaseConvention, Transition,
};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Relative-error floor used by [`PerturbationReport`].
pub const REPORT_FLOOR: f64 = 1e-12;

/// Side-by-side perturbative prediction vs brute-force value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationReport {
    pub predicted: f64,
    pub measured: f64,
    pub relative_error: f64,
    pub regime_ok: bool,
}

impl PerturbationReport {
    pub fn new(predicted: f64, measured: f64, regime_ok: bool) -> Self {
        Self {
            predicted,
            measured,
            relative_error: (measured - predicted).abs() / predicted.abs().max(REPORT_FLOOR),
            regime_ok,
        }
    }
}

// ---------------------------------------------------------------------------
// Exact light shift in the full 3^N product space
// ---------------------------------------------------------------------------

/// Dressed-state energy of every `|n_a, 0>` manifold under a single a<->r
/// laser, from exact diagonalization of the full `3^N` product space with a
/// pairwise Rydberg-Rydberg shift `u_int`.
///
/// Returns the shift for each `n_a` in `0..=N`. Preconditions: `N <= 6` and
/// `omega/delta <= 0.05`.
pub fn light_shift_exact(
    n_atoms: usize,
    omega: f64,
    delta: f64,
    u_int: f64,
) -> Result<Vec<f64>> {
    if n_atoms == 0 || n_atoms > 6 {
        return Err(Error::InvalidArgument(
            "light_shift_exact builds the full 3^N space; need 1 <= N <= 6".into(),
        ));
    }
    if omega / delta > 0.05 {
        return Err(Error::InvalidArgument(format!(
            "omega/delta = {:.3} outside the perturbative regime (<= 0.05)",
            omega / delta
        )));
    }
    let dim = 3usize.pow(n_atoms as u32);
    let levels = |s: usize| -> Vec<u8> {
        let mut s = s;
        (0..n_atoms)
            .map(|_| {
                let l = (s % 3) as u8;
                s /= 3;
                l
            })
            .collect()
    };

    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for s in 0..dim {
        let lv = levels(s);
        let n_r = lv.iter().filter(|&&l| l == 2).count();
        h[(s, s)] = delta * n_r as f64 + u_int * (n_r * n_r.saturating_sub(1) / 2) as f64;
        // single-atom a <-> r flips
        for (atom, &l) in lv.iter().enumerate() {
            if l == 0 {
                let flipped = s + 2 * 3usize.pow(atom as u32);
                h[(flipped, s)] = omega;
                h[(s, flipped)] = omega;
            }
        }
    }
    let prop = SymmetricPropagator::new(h)?;

    let mut shifts = Vec::with_capacity(n_atoms + 1);
    for n_a in 0..=n_atoms {
        // normalized symmetric reference: n_a atoms in a, rest in b, no r
        let mut reference = vec![0.0_f64; dim];
        let mut count = 0usize;
        for s in 0..dim {
            let lv = levels(s);
            let na = lv.iter().filter(|&&l| l == 0).count();
            let nr = lv.iter().filter(|&&l| l == 2).count();
            if na == n_a && nr == 0 {
                reference[s] = 1.0;
                count += 1;
            }
        }
        let norm = (count as f64).sqrt();
        for v in &mut reference {
            *v /= norm;
        }
        shifts.push(prop.branch_eigenvalue(&reference, &format!("n_a={n_a}"))?);
    }
    Ok(shifts)
}

// ---------------------------------------------------------------------------
// Explicit fourth-order perturbation sums
// ---------------------------------------------------------------------------

/// Light shift of `|n_a, 0>` to fourth order as explicit sums over the
/// intermediate states `|n_a-1, 1>` (energy `delta`) and `|n_a-2, 2>`
/// (energy `2 delta + u_int`):
///
/// * second order: `-v1^2 / delta`,
/// * fourth order: `+v1^4 / delta^3 - v1^2 v2^2 / (delta^2 (2 delta + u_int))`,
///
/// with the collective couplings `v1 = sqrt(n_a) omega` and
/// `v2 = sqrt(2 (n_a - 1)) omega`. At `u_int = 0` the quadratic terms
/// cancel and the shift is linear in `n_a`; as `u_int -> inf` the
/// two-photon term vanishes and the `n_a^2` piece survives.
pub fn fourth_order_sum(n_atoms: usize, omega: f64, delta: f64, u_int: f64) -> Vec<f64> {
    (0..=n_atoms)
        .map(|n_a| {
            let na = n_a as f64;
            let v1_sq = na * omega * omega;
            let v2_sq = if n_a >= 1 {
                2.0 * (na - 1.0) * omega * omega
            } else {
                0.0
            };
            let second = -v1_sq / delta;
            let fourth_backtrack = v1_sq * v1_sq / delta.powi(3);
            let fourth_two_photon = -v1_sq * v2_sq / (delta * delta * (2.0 * delta + u_int));
            second + fourth_backtrack + fourth_two_photon
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Two-atom exact evolution
// ---------------------------------------------------------------------------

/// Two atoms in the raw product space `{a, b, r} x {a, b, r}` driven by a
/// laser set, with the `|rr>` level shifted by `u_int`. `u_int =
/// f64::INFINITY` removes `|rr>` entirely (the hard blockade limit).
#[derive(Debug, Clone)]
pub struct TwoAtomModel {
    pub lasers: LaserSet,
    pub u_int: f64,
}

/// Product-space drive system for one or two atoms; the brute-force
/// counterpart of the Dicke-basis Hamiltonian.
struct ProductSystem {
    dim: usize,
    diagonal: Vec<f64>,
    terms: Vec<(Vec<(usize, usize)>, C64, f64)>,
    index: std::collections::HashMap<Vec<u8>, usize>,
}

impl ProductSystem {
    /// `n_atoms` in {1, 2}; applies `u_int` only for two atoms.
    fn new(n_atoms: usize, set: &LaserSet, u_int: f64) -> Self {
        assert!(n_atoms == 1 || n_atoms == 2);
        let mut states: Vec<Vec<u8>> = Vec::new();
        let total = 3usize.pow(n_atoms as u32);
        for s in 0..total {
            let mut digits = Vec::with_capacity(n_atoms);
            let mut v = s;
            for _ in 0..n_atoms {
                digits.push((v % 3) as u8);
                v /= 3;
            }
            if u_int.is_infinite() && digits.iter().all(|&l| l == 2) && n_atoms == 2 {
                continue; // hard blockade: drop |rr>
            }
            states.push(digits);
        }
        let index: std::collections::HashMap<Vec<u8>, usize> = states
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let diagonal = states
            .iter()
            .map(|lv| {
                let n_r = lv.iter().filter(|&&l| l == 2).count();
                let mut d = set.reference_detuning * n_r as f64;
                if n_atoms == 2 && n_r == 2 && u_int.is_finite() {
                    d += u_int;
                }
                d
            })
            .collect();
        let terms = set
            .lasers
            .iter()
            .map(|laser| {
                let ground = match laser.transition {
                    Transition::AR => 0u8,
                    Transition::BR => 1u8,
                };
                let mut entries = Vec::new();
                for (col, lv) in states.iter().enumerate() {
                    for atom in 0..n_atoms {
                        if lv[atom] == ground {
                            let mut target = lv.clone();
                            target[atom] = 2;
                            if let Some(&row) = index.get(&target) {
                                entries.push((row, col));
                            }
                        }
                    }
                }
                (
                    entries,
                    laser.rabi,
                    laser.detuning - set.reference_detuning,
                )
            })
            .collect();
        Self {
            dim: states.len(),
            diagonal,
            terms,
            index,
        }
    }

    fn index_of(&self, levels: &[u8]) -> usize {
        self.index[&levels.to_vec()]
    }

    fn frequency_scale(&self) -> f64 {
        let diag = self.diagonal.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
        let freq = self
            .terms
            .iter()
            .map(|t| t.2.abs())
            .fold(0.0_f64, f64::max);
        diag + freq
    }
}

impl HamiltonianAction for ProductSystem {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, t: f64, psi: &[C64], out: &mut [C64]) {
        for k in 0..self.dim {
            out[k] = self.diagonal[k] * psi[k];
        }
        for (entries, coeff, freq) in &self.terms {
            let ph = coeff * C64::from_polar(1.0, freq * t);
            let phc = ph.conj();
            for &(row, col) in entries {
                out[row] += ph * psi[col];
                out[col] += phc * psi[row];
            }
        }
    }
}

/// Result of the pair-coupling measurement.
#[derive(Debug, Clone, Copy)]
pub struct PairCouplingFit {
    /// Signed coupling `<bb|H_eff|aa>` in rad/us. Positive for a
    /// positive-amplitude triple in this crate's phase conventions.
    pub omega_c: f64,
    /// Fitted Rabi amplitude `A` of `p_bb = A sin^2(W t)`.
    pub amplitude: f64,
    /// Fitted `W` (rad/us).
    pub rabi_freq: f64,
    /// Symmetric Stokes detuning offset applied to put the pair transition
    /// on resonance against the known second-order light shifts.
    pub compensation: f64,
    /// Largest observed `|<bb|psi>|^2`.
    pub max_pbb: f64,
    /// RMS fit residual relative to the signal peak.
    pub residual: f64,
    /// Set when the transfer never rose above the micromotion floor; the
    /// reported magnitude is then an upper bound and the sign is meaningless.
    pub weak_signal: bool,
}

/// Options for the pair-coupling fit window.
#[derive(Debug, Clone, Copy)]
pub struct PairFitOptions {
    /// Fraction of a quarter Rabi flop to integrate over.
    pub window_fraction: f64,
    /// Residual (relative to peak) above which the fit is rejected.
    pub residual_limit: f64,
}

impl Default for PairFitOptions {
    fn default() -> Self {
        Self {
            window_fraction: 0.35,
            residual_limit: 0.05,
        }
    }
}

/// Evolve `|aa>` exactly under the two-atom Hamiltonian and fit the `|bb>`
/// population to `A sin^2(W t)`; returns the signed coupling
/// `omega_c = sqrt(A) W`, the sign read off the phase of `<bb|psi>`.
///
/// The laser set must be a pump + two-Stokes triple. The pair transition is
/// detuned by the light-shift difference between `|bb>` and `|aa>`, so the
/// two Stokes detunings are offset together until the transition is
/// resonant; the required shifts are measured exactly from the model itself
/// (pump-only diagonalization for `|aa>`, Stokes-only Floquet stepping for
/// `|bb>`), and the final offset is reported.
pub fn pair_coupling_measure(model: &TwoAtomModel) -> Result<PairCouplingFit> {
    pair_coupling_measure_with(model, PairFitOptions::default())
}

pub fn pair_coupling_measure_with(
    model: &TwoAtomModel,
    options: PairFitOptions,
) -> Result<PairCouplingFit> {
    let (pump, stokes): (Vec<&crate::lasers::Laser>, Vec<&crate::lasers::Laser>) = model
        .lasers
        .lasers
        .iter()
        .partition(|l| l.transition == Transition::AR);
    if pump.len() != 1 || stokes.len() != 2 {
        return Err(Error::InvalidArgument(
            "pair_coupling_measure needs one pump and two Stokes lasers".into(),
        ));
    }
    let (o0, d0) = (pump[0].rabi.norm(), pump[0].detuning);
    let (o1, d1) = (stokes[0].rabi.norm(), stokes[0].detuning);
    let (o2, d2) = (stokes[1].rabi.norm(), stokes[1].detuning);
    let delta_prime = 0.5 * (d2 - d1).abs();
    if delta_prime <= 0.0 {
        return Err(Error::InvalidArgument(
            "Stokes detunings must differ (symmetric +-delta')".into(),
        ));
    }

    // Resonance condition: shift both Stokes detunings by eps =
    // (E_bb - E_aa)/2 with the exact diagonal energies of the driven model.
    // E_bb depends weakly on eps, so iterate the fixed point.
    let e_aa = pump_dressed_energy(pump[0], model.u_int)?;
    let mut eps = 0.0;
    for _ in 0..3 {
        let e_bb = stokes_dressed_energy(&stokes, eps, model.u_int)?;
        eps = 0.5 * (e_bb - e_aa);
    }
    let mut compensated = model.lasers.clone();
    for laser in compensated.lasers.iter_mut() {
        if laser.transition == Transition::BR {
            laser.detuning += eps;
        }
    }

    let omega_c_ref = pair_coupling_magnitude(d0, delta_prime, o0, o1, o2);
    let fit = measure_pair_transfer(&compensated, model.u_int, omega_c_ref, options)?;
    Ok(PairCouplingFit {
        compensation: eps,
        ..fit
    })
}

/// Exact energy of the dressed `|aa>` state under the pump alone: the pump
/// frame is static, so this is a branch eigenvalue of a small real
/// symmetric matrix. The pump phase is a gauge on `|r>` and drops out.
fn pump_dressed_energy(pump: &crate::lasers::Laser, u_int: f64) -> Result<f64> {
    let set = LaserSet::new(
        vec![crate::lasers::Laser {
            transition: Transition::AR,
            rabi: C64::new(pump.rabi.norm(), 0.0),
            detuning: pump.detuning,
        }],
        pump.detuning,
    )?;
    let system = ProductSystem::new(2, &set, u_int);
    let mut h = DMatrix::<f64>::zeros(system.dim, system.dim);
    for (k, &d) in system.diagonal.iter().enumerate() {
        h[(k, k)] = d;
    }
    for (entries, coeff, freq) in &system.terms {
        debug_assert!(freq.abs() < 1e-12);
        for &(row, col) in entries {
            h[(row, col)] += coeff.re;
            h[(col, row)] += coeff.re;
        }
    }
    let prop = SymmetricPropagator::new(h)?;
    let mut reference = vec![0.0; system.dim];
    reference[system.index_of(&[0, 0])] = 1.0;
    prop.branch_eigenvalue(&reference, "aa")
}

/// Exact energy of the dressed `|bb>` state under the two Stokes lasers
/// (detunings offset by `eps`): the Stokes-only Hamiltonian is periodic at
/// the detuning difference, so build the one-period propagator once and
/// read the phase slope of `<bb|U^k|bb>` over many strobe periods.
fn stokes_dressed_energy(
    stokes: &[&crate::lasers::Laser],
    eps: f64,
    u_int: f64,
) -> Result<f64> {
    let shifted: Vec<crate::lasers::Laser> = stokes
        .iter()
        .map(|l| crate::lasers::Laser {
            transition: l.transition,
            rabi: l.rabi,
            detuning: l.detuning + eps,
        })
        .collect();
    let d_ref = shifted[0].detuning;
    let beat = (shifted[1].detuning - shifted[0].detuning).abs();
    if beat < 1e-9 {
        return Err(Error::InvalidArgument(
            "Stokes detunings must differ".into(),
        ));
    }
    let set = LaserSet::new(shifted, d_ref)?;
    let system = ProductSystem::new(2, &set, u_int);
    let period = std::f64::consts::TAU / beat;
    let steps = ((period * system.frequency_scale().max(1.0)
        / crate::blockade::STEP_TARGET_RAD)
        .ceil() as usize)
        .max(16);
    let dt = period / steps as f64;

    // one-period propagator, column by column
    let dim = system.dim;
    let mut u = vec![vec![C64::new(0.0, 0.0); dim]; dim];
    let mut rk = Rk4::new(dim);
    for (col, column) in u.iter_mut().enumerate() {
        let mut psi = vec![C64::new(0.0, 0.0); dim];
        psi[col] = C64::new(1.0, 0.0);
        for step in 0..steps {
            rk.step(&system, step as f64 * dt, dt, &mut psi);
        }
        *column = psi;
    }

    // strobe powers: track the phase of <bb|psi_k>
    let i_bb = system.index_of(&[1, 1]);
    let mut psi = vec![C64::new(0.0, 0.0); dim];
    psi[i_bb] = C64::new(1.0, 0.0);
    let strobes = 1024usize;
    let mut prev_arg = 0.0;
    let mut unwrapped = 0.0;
    let mut sums = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for k in 1..=strobes {
        let mut next = vec![C64::new(0.0, 0.0); dim];
        for col in 0..dim {
            let a = psi[col];
            if a.norm_sqr() < 1e-30 {
                continue;
            }
            for (row, item) in next.iter_mut().enumerate() {
                *item += u[col][row] * a;
            }
        }
        psi = next;
        let arg = psi[i_bb].arg();
        let mut d = arg - prev_arg;
        while d > std::f64::consts::PI {
            d -= std::f64::consts::TAU;
        }
        while d < -std::f64::consts::PI {
            d += std::f64::consts::TAU;
        }
        unwrapped += d;
        prev_arg = arg;
        let t = k as f64 * period;
        sums.0 += 1.0;
        sums.1 += t;
        sums.2 += unwrapped;
        sums.3 += t * t;
        sums.4 += t * unwrapped;
    }
    let slope = (sums.0 * sums.4 - sums.1 * sums.2) / (sums.0 * sums.3 - sums.1 * sums.1);
    Ok(-slope)
}

/// Shared transfer measurement: evolve `|aa>` under `set`, sample the
/// `|bb>` amplitude, fit `A sin^2(W t)`, and sign the coupling from the
/// transfer phase. `omega_ref` sets the expected coupling scale (fit window
/// and frequency grid).
pub(crate) fn measure_pair_transfer(
    set: &LaserSet,
    u_int: f64,
    omega_ref: f64,
    options: PairFitOptions,
) -> Result<PairCouplingFit> {
    let t_window = options.window_fraction * std::f64::consts::FRAC_PI_2 / omega_ref;
    let system = ProductSystem::new(2, set, u_int);
    let dt_scale = system.frequency_scale().max(1.0);
    let dt = crate::blockade::STEP_TARGET_RAD / dt_scale;
    let steps = (t_window / dt).ceil() as usize;
    let dt = t_window / steps as f64;

    let sample_target = 800usize.min(steps);
    let sample_every = (steps / sample_target).max(1);

    let i_aa = system.index_of(&[0, 0]);
    let i_bb = system.index_of(&[1, 1]);
    let mut psi = vec![C64::new(0.0, 0.0); system.dim];
    psi[i_aa] = C64::new(1.0, 0.0);
    let mut rk = Rk4::new(system.dim);
    let mut samples: Vec<(f64, C64)> = Vec::new();
    for step in 0..steps {
        rk.step(&system, step as f64 * dt, dt, &mut psi);
        if (step + 1) % sample_every == 0 {
            samples.push(((step + 1) as f64 * dt, psi[i_bb]));
        }
    }
    let drift = (norm_sqr(&psi) - 1.0).abs();
    if drift > 1e-6 {
        return Err(Error::IntegrationFailure {
            t: t_window,
            deviation: drift,
            tolerance: 1e-6,
        });
    }

    let max_pbb = samples
        .iter()
        .map(|(_, c)| c.norm_sqr())
        .fold(0.0_f64, f64::max);

    // No appreciable transfer: report an upper bound, skip the model fit.
    if max_pbb < 1e-4 * (omega_ref * t_window).powi(2).min(1.0) || max_pbb < 1e-12 {
        let half = samples.len() / 2;
        let bound = samples[half..]
            .iter()
            .map(|(t, c)| c.norm() / t)
            .fold(0.0_f64, f64::max);
        return Ok(PairCouplingFit {
            omega_c: bound,
            amplitude: max_pbb,
            rabi_freq: 0.0,
            compensation: 0.0,
            max_pbb,
            residual: 0.0,
            weak_signal: true,
        });
    }

    let (amp, w, residual) = fit_sin_squared(&samples, omega_ref)?;
    if residual > options.residual_limit {
        return Err(Error::UnreliableFit(format!(
            "sin^2 fit residual {residual:.3e} above {:.3e}",
            options.residual_limit
        )));
    }

    // Sign from the phase of <bb|psi>: the first-order amplitude is
    // -i omega_c t, so arg is -pi/2 for positive coupling.
    let mut acc = C64::new(0.0, 0.0);
    for (t, c) in &samples {
        let wt = w * t;
        if wt > 0.25 && wt < 1.3 {
            acc += c.norm() * C64::from_polar(1.0, c.arg());
        }
    }
    if acc.norm() == 0.0 {
        for (_, c) in &samples {
            acc += c.norm() * C64::from_polar(1.0, c.arg());
        }
    }
    let mean_arg = acc.arg();
    let sign = if mean_arg < 0.0 { 1.0 } else { -1.0 };
    let off_axis = (mean_arg.abs() - std::f64::consts::FRAC_PI_2).abs();
    if off_axis > 1.2 {
        return Err(Error::UnreliableFit(format!(
            "transfer phase {mean_arg:.3} rad is too far from +-pi/2 to sign the coupling"
        )));
    }

    Ok(PairCouplingFit {
        omega_c: sign * amp.sqrt() * w,
        amplitude: amp,
        rabi_freq: w,
        compensation: 0.0,
        max_pbb,
        residual,
        weak_signal: false,
    })
}

/// Least squares of `p = A sin^2(W t)` over a frequency grid around `w_ref`,
/// with one refinement pass.
fn fit_sin_squared(samples: &[(f64, C64)], w_ref: f64) -> Result<(f64, f64, f64)> {
    let ps: Vec<(f64, f64)> = samples.iter().map(|(t, c)| (*t, c.norm_sqr())).collect();
    let peak = ps.iter().map(|p| p.1).fold(0.0_f64, f64::max).max(1e-300);
    let eval = |w: f64| -> (f64, f64) {
        let mut su2 = 0.0;
        let mut sup = 0.0;
        for &(t, p) in &ps {
            let u = (w * t).sin().powi(2);
            su2 += u * u;
            sup += u * p;
        }
        if su2 == 0.0 {
            return (0.0, f64::INFINITY);
        }
        let a = sup / su2;
        let mut res = 0.0;
        for &(t, p) in &ps {
            let u = (w * t).sin().powi(2);
            res += (p - a * u).powi(2);
        }
        (a, (res / ps.len() as f64).sqrt() / peak)
    };
    let mut best = (f64::INFINITY, 0.0, 0.0); // (residual, w, a)
    let scan = |lo: f64, hi: f64, n: usize, best: &mut (f64, f64, f64)| {
        for k in 0..=n {
            let w = lo + (hi - lo) * k as f64 / n as f64;
            let (a, r) = eval(w);
            if r < best.0 {
                *best = (r, w, a);
            }
        }
    };
    scan(0.3 * w_ref, 1.7 * w_ref, 600, &mut best);
    let center = best.1;
    let half_step = 1.4 * w_ref / 600.0;
    scan(center - half_step, center + half_step, 200, &mut best);
    if !best.1.is_finite() || best.1 <= 0.0 {
        return Err(Error::UnreliableFit("frequency fit collapsed".into()));
    }
    Ok((best.2.max(0.0), best.1, best.0))
}

// ---------------------------------------------------------------------------
// Phase-convention audit
// ---------------------------------------------------------------------------

/// Scores for one sign assignment of the mirror Stokes phases.
#[derive(Debug, Clone, Copy)]
pub struct ConventionScore {
    pub convention: PhaseConvention,
    /// Residual differential single-atom light shift |shift_a - shift_b|,
    /// rad/us.
    pub shift_difference: f64,
    /// Signed pair coupling measured from two-atom evolution, rad/us.
    pub pair_coupling: f64,
    /// Transfer too weak to fit; `pair_coupling` is an upper bound.
    pub weak_signal: bool,
}

#[derive(Debug, Clone)]
pub struct AuditReport {
    pub scores: Vec<ConventionScore>,
    /// Differential single-atom shift of the bare three-laser triple, the
    /// suppression baseline.
    pub three_laser_shift_difference: f64,
    /// Pair-coupling magnitude of a single triple per the fourth-order
    /// formula.
    pub single_triple_magnitude: f64,
    /// Conventions with the shift suppressed at least 10x and the coupling
    /// preserved.
    pub selected: Vec<PhaseConvention>,
}

impl AuditReport {
    /// Deterministic best choice among the selected conventions (largest
    /// coupling magnitude, ties broken by enum order).
    pub fn best(&self) -> Result<PhaseConvention> {
        let mut best: Option<(f64, PhaseConvention)> = None;
        for s in &self.scores {
            if !self.selected.contains(&s.convention) {
                continue;
            }
            let mag = s.pair_coupling.abs();
            if best.map_or(true, |(m, _)| mag > m) {
                best = Some((mag, s.convention));
            }
        }
        best.map(|(_, c)| c).ok_or_else(|| {
            Error::UnreliableFit(
                "no phase convention passed the shift-suppressed + coupling-preserved audit"
                    .into(),
            )
        })
    }
}

/// Try all four mirror-Stokes sign assignments: measure the residual
/// single-atom light shift and the two-atom pair coupling for each, and
/// identify the assignments that cancel the shift while keeping the
/// coupling. Exact evolution is the arbiter; nothing is hard-coded.
pub fn phase_convention_audit(
    delta: f64,
    delta_prime: f64,
    omega0: f64,
    omega1: f64,
    omega2: f64,
) -> Result<AuditReport> {
    let three = standard_three_laser_set(delta, delta_prime, omega0, omega1, omega2)?;
    let base_a = single_atom_shift(&three, 0)?;
    let base_b = single_atom_shift(&three, 1)?;
    let baseline = (base_a - base_b).abs();
    let single_triple = pair_coupling_magnitude(delta, delta_prime, omega0, omega1, omega2);

    let mut scores = Vec::new();
    for convention in PhaseConvention::ALL {
        let set = standard_six_laser_set(delta, delta_prime, omega0, omega1, omega2, convention)?;
        let shift_a = single_atom_shift(&set, 0)?;
        let shift_b = single_atom_shift(&set, 1)?;
        let model = TwoAtomModel {
            lasers: set,
            u_int: f64::INFINITY,
        };
        let fit = pair_coupling_measure_with(
            &model,
            PairFitOptions {
                window_fraction: 0.35,
                residual_limit: 0.08,
            },
        )?;
        scores.push(ConventionScore {
            convention,
            shift_difference: (shift_a - shift_b).abs(),
            pair_coupling: fit.omega_c,
            weak_signal: fit.weak_signal,
        });
    }

    let selected = scores
        .iter()
        .filter(|s| {
            !s.weak_signal
                && s.shift_difference <= baseline / 10.0
                && s.pair_coupling.abs() >= single_triple
        })
        .map(|s| s.convention)
        .collect();

    Ok(AuditReport {
        scores,
        three_laser_shift_difference: baseline,
        single_triple_magnitude: single_triple,
        selected,
    })
}

/// Phase-drift rate (energy shift, rad/us) of a single atom prepared in
/// `level` (0 = a, 1 = b) under the set.
fn single_atom_shift(set: &LaserSet, level: u8) -> Result<f64> {
    let system = ProductSystem::new(1, set, 0.0);
    let idx = system.index_of(&[level]);
    let dt = crate::blockade::STEP_TARGET_RAD / system.frequency_scale().max(1.0);
    // long enough to average micromotion, short enough to stay cheap
    let t_final = 20.0 * std::f64::consts::TAU
        / set
            .lasers
            .iter()
            .map(|l| (l.detuning - set.reference_detuning).abs())
            .filter(|f| *f > 1e-9)
            .fold(f64::INFINITY, f64::min)
            .min(set.reference_detuning.abs());
    let steps = (t_final / dt).ceil() as usize;
    let dt = t_final / steps as f64;
    let sample_every = (steps / 400).max(1);

    let mut psi = vec![C64::new(0.0, 0.0); system.dim];
    psi[idx] = C64::new(1.0, 0.0);
    let mut rk = Rk4::new(system.dim);
    let mut prev_arg = 0.0;
    let mut unwrapped = 0.0;
    let mut sums = (0.0, 0.0, 0.0, 0.0, 0.0_f64); // n, st, sp, stt, stp
    for step in 0..steps {
        rk.step(&system, step as f64 * dt, dt, &mut psi);
        if (step + 1) % sample_every == 0 {
            let arg = psi[idx].arg();
            let mut d = arg - prev_arg;
            while d > std::f64::consts::PI {
                d -= std::f64::consts::TAU;
            }
            while d < -std::f64::consts::PI {
                d += std::f64::consts::TAU;
            }
            unwrapped += d;
            prev_arg = arg;
            let t = (step + 1) as f64 * dt;
            sums.0 += 1.0;
            sums.1 += t;
            sums.2 += unwrapped;
            sums.3 += t * t;
            sums.4 += t * unwrapped;
        }
    }
    let slope = (sums.0 * sums.4 - sums.1 * sums.2) / (sums.0 * sums.3 - sums.1 * sums.1);
    Ok(-slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lasers::mhz;
    use approx::assert_relative_eq;

    #[test]
    fn fourth_order_sum_limits() {
        let (omega, delta) = (mhz(1.0), mhz(50.0));
        // u = 0: quadratic terms cancel, shift linear in n_a
        let s0 = fourth_order_sum(5, omega, delta, 0.0);
        for (n_a, s) in s0.iter().enumerate() {
            let expected = n_a as f64 * (-omega * omega / delta + omega.powi(4) / delta.powi(3));
            assert_relative_eq!(*s, expected, max_relative = 1e-12);
        }
        // u -> inf: two-photon term gone
        let s_inf = fourth_order_sum(5, omega, delta, 1e18);
        for (n_a, s) in s_inf.iter().enumerate() {
            let na = n_a as f64;
            let expected = -na * omega * omega / delta + na * na * omega.powi(4) / delta.powi(3);
            assert_relative_eq!(*s, expected, max_relative = 1e-9);
        }
        // n_a = 0 has no coupled population
        assert_eq!(s0[0], 0.0);
    }

    #[test]
    fn exact_shift_matches_sum_small_system() {
        let delta = mhz(50.0);
        let omega = 0.02 * delta;
        let u = 1000.0 * delta;
        let exact = light_shift_exact(3, omega, delta, u).unwrap();
        let summed = fourth_order_sum(3, omega, delta, u);
        for (e, s) in exact.iter().zip(&summed).skip(1) {
            assert_relative_eq!(e, s, max_relative = 0.05);
        }
        assert_relative_eq!(exact[0], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn exact_shift_rejects_large_systems_and_strong_drive() {
        assert!(light_shift_exact(7, 1.0, 100.0, 0.0).is_err());
        assert!(light_shift_exact(3, 10.0, 100.0, 0.0).is_err());
    }

    #[test]
    fn synthetic_pair_fit_recovers_signed_coupling() {
        // Evolve under a hand-built static coupling H = g(|bb><aa| + h.c.)
        // hidden inside the two-atom machinery: a degenerate-frame set with
        // zero Rabi plus an explicit check of the fitter on synthetic data.
        for g in [2.0e-3_f64, -1.7e-3] {
            let samples: Vec<(f64, C64)> = (1..400)
                .map(|k| {
                    let t = k as f64 * 0.5;
                    let c = C64::new(0.0, -1.0) * g * C64::from_polar((g * t).sin() / g, 0.0);
                    (t, c)
                })
                .collect();
            let (a, w, res) = fit_sin_squared(&samples, g.abs()).unwrap();
            assert!(res < 1e-6);
            assert_relative_eq!(a.sqrt() * w, g.abs(), max_relative = 1e-3);
            // sign read-off mirrors the production path
            let mut acc = C64::new(0.0, 0.0);
            for (t, c) in &samples {
                let wt = w * t;
                if wt > 0.25 && wt < 1.3 {
                    acc += c.norm() * C64::from_polar(1.0, c.arg());
                }
            }
            let sign = if acc.arg() < 0.0 { 1.0 } else { -1.0 };
            assert_relative_eq!(sign * a.sqrt() * w, g, max_relative = 1e-3);
        }
    }
}
