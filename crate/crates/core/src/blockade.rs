//! Full multi-laser dynamics in the blockaded Dicke basis: the
//! time-dependent Hamiltonian in the rotating frame of the pump, the
//! squeezing evolution it generates, and the single-laser light-shift run.

use crate::basis::{DickeBasis, Ladder, SparseOp};
use crate::error::{Error, Result};
use crate::integrate::{
    check_norm, fit_quadratic, norm_sqr, HamiltonianAction, NormPolicy, Rk4,
};
use crate::lasers::{LaserSet, Transition};
use crate::spin::{observables, squeezing_from_observables};
use crate::state::DickeState;
use crate::trace::{SqueezingTrace, TraceMeta, TraceRow};
use num_complex::Complex64 as C64;

/// Hard bound on `dt * max|detuning - reference|`.
pub const STEP_LIMIT_RAD: f64 = 0.1;

/// Default step sizing targets this phase advance per step for the fastest
/// frequency in the problem (explicit phases and the static diagonal).
pub const STEP_TARGET_RAD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockadeConfig {
    pub n_atoms: usize,
    pub laser_set: LaserSet,
    /// us
    pub t_final: f64,
    /// us
    pub dt: f64,
    /// Record one trace row every this many steps.
    pub record_every: usize,
}

impl BlockadeConfig {
    /// Pick `dt` from the fastest frequency scale (explicit phases plus the
    /// rotating-frame diagonal).
    pub fn with_auto_step(
        n_atoms: usize,
        laser_set: LaserSet,
        t_final: f64,
        record_every: usize,
    ) -> Result<Self> {
        let scale = laser_set
            .max_relative_detuning()
            .max(laser_set.reference_detuning.abs())
            .max(1e-6);
        let dt = STEP_TARGET_RAD / scale;
        let cfg = Self {
            n_atoms,
            laser_set,
            t_final,
            dt,
            record_every,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_atoms == 0 {
            return Err(Error::InvalidArgument("n_atoms must be positive".into()));
        }
        if !(self.t_final > 0.0) || !(self.dt > 0.0) {
            return Err(Error::InvalidArgument(
                "t_final and dt must be positive".into(),
            ));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument(
                "record_every must be at least 1".into(),
            ));
        }
        let h_dt = self.dt * self.laser_set.max_relative_detuning();
        if h_dt > STEP_LIMIT_RAD {
            return Err(Error::StepTooCoarse {
                h_dt,
                limit: STEP_LIMIT_RAD,
            });
        }
        Ok(())
    }
}

/// `H(t)` in the rotating frame at the reference detuning: a static diagonal
/// `reference_detuning * n_r` plus, for each laser, `rabi * L† *
/// e^{i (detuning - reference) t} + h.c.` with `L†` the collective raising
/// operator of its transition. Hermitian at every `t`; the blockade is the
/// basis truncation itself.
pub struct BlockadeHamiltonian {
    dim: usize,
    diagonal: Vec<f64>,
    terms: Vec<DriveTerm>,
}

struct DriveTerm {
    raising: SparseOp,
    coeff: C64,
    rel_freq: f64,
}

/// Build the rotating-frame Hamiltonian on a blockaded (`max_rydberg = 1`)
/// basis. `single_laser_run` relaxes the truncation internally; everything
/// else requires `max_rydberg = 1`.
pub fn build_time_dependent_hamiltonian(
    basis: &DickeBasis,
    set: &LaserSet,
) -> Result<BlockadeHamiltonian> {
    if basis.max_rydberg() != 1 {
        return Err(Error::InvalidArgument(format!(
            "blockade Hamiltonian needs max_rydberg = 1, got {}",
            basis.max_rydberg()
        )));
    }
    Ok(build_unchecked(basis, set))
}

fn build_unchecked(basis: &DickeBasis, set: &LaserSet) -> BlockadeHamiltonian {
    let diagonal = basis
        .iter()
        .map(|(_, (_, n_r))| set.reference_detuning * n_r as f64)
        .collect();
    let terms = set
        .lasers
        .iter()
        .map(|laser| DriveTerm {
            raising: basis.ladder(match laser.transition {
                Transition::AR => Ladder::RdagA,
                Transition::BR => Ladder::RdagB,
            }),
            coeff: laser.rabi,
            rel_freq: laser.detuning - set.reference_detuning,
        })
        .collect();
    BlockadeHamiltonian {
        dim: basis.dimension(),
        diagonal,
        terms,
    }
}

impl BlockadeHamiltonian {
    /// Dense matrix at time `t`, for small-system checks.
    pub fn dense_at(&self, t: f64) -> Vec<Vec<C64>> {
        let mut m = vec![vec![C64::new(0.0, 0.0); self.dim]; self.dim];
        for (k, &d) in self.diagonal.iter().enumerate() {
            m[k][k] += C64::new(d, 0.0);
        }
        for term in &self.terms {
            let ph = term.coeff * C64::from_polar(1.0, term.rel_freq * t);
            for e in term.raising.entries() {
                m[e.row][e.col] += ph * e.weight;
                m[e.col][e.row] += (ph * e.weight).conj();
            }
        }
        m
    }
}

impl HamiltonianAction for BlockadeHamiltonian {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, t: f64, psi: &[C64], out: &mut [C64]) {
        for k in 0..self.dim {
            out[k] = self.diagonal[k] * psi[k];
        }
        for term in &self.terms {
            let ph = term.coeff * C64::from_polar(1.0, term.rel_freq * t);
            term.raising.accumulate(ph, psi, out);
            term.raising.accumulate_adjoint(ph.conj(), psi, out);
        }
    }
}

/// Integrate the blockaded ensemble and record `(t, S, n_b, n_r, norm)`.
pub fn evolve_blockade(config: &BlockadeConfig, initial: &DickeState) -> Result<SqueezingTrace> {
    config.validate()?;
    let basis = initial.basis().clone();
    if basis.n_atoms() != config.n_atoms {
        return Err(Error::InvalidState(format!(
            "initial state has N = {}, config has N = {}",
            basis.n_atoms(),
            config.n_atoms
        )));
    }
    if initial.norm_deviation() > 1e-9 {
        return Err(Error::InvalidState(
            "initial state must be normalized".into(),
        ));
    }
    let h = build_time_dependent_hamiltonian(&basis, &config.laser_set)?;

    let steps = (config.t_final / config.dt).ceil() as usize;
    let dt = config.t_final / steps as f64;
    let mut psi = initial.amplitudes().to_vec();
    let mut rk = Rk4::new(h.dim());
    let policy = NormPolicy::default();
    let mut deviation = 0.0;
    let mut rows = Vec::new();

    record(&basis, &psi, 0.0, &mut rows)?;
    for step in 0..steps {
        let t = step as f64 * dt;
        rk.step(&h, t, dt, &mut psi);
        let t_next = (step + 1) as f64 * dt;
        deviation = check_norm(t_next, norm_sqr(&psi), deviation, policy)?;
        if (step + 1) % config.record_every == 0 || step + 1 == steps {
            record(&basis, &psi, t_next, &mut rows)?;
        }
    }

    SqueezingTrace::new(
        TraceMeta {
            n_atoms: config.n_atoms,
            engine_version: crate::ENGINE_VERSION.to_string(),
            config_echo: vec![
                "mode=blockade".to_string(),
                format!("n_lasers={}", config.laser_set.lasers.len()),
                format!("dt_us={:.9e}", dt),
                format!("t_final_us={:.9e}", config.t_final),
            ],
        },
        rows,
    )
}

fn record(basis: &DickeBasis, psi: &[C64], t: f64, rows: &mut Vec<TraceRow>) -> Result<()> {
    let state = DickeState::with_tolerance(basis.clone(), psi.to_vec(), 1e-5)?;
    let obs = observables(&state)?;
    let metrics = squeezing_from_observables(&obs);
    rows.push(TraceRow {
        t,
        s: metrics.s_factor,
        nb_mean: obs.n_b_mean,
        nr_mean: obs.rydberg_population,
        norm: state.norm(),
        mean_spin: obs.mean_spin,
    });
    Ok(())
}

/// Result of the single-laser light-shift run.
#[derive(Debug, Clone)]
pub struct LightShiftRun {
    /// Energy shift (rad/us) of the dressed state connected to `(n_a, 0)`,
    /// one entry per `n_a` in `0..=N`.
    pub shifts: Vec<f64>,
    /// Quadratic fit `shift(n_a) = c0 + c1 n_a + c2 n_a^2`.
    pub fit: [f64; 3],
    /// Set when `omega / delta` exceeded the perturbative bound 0.1.
    pub perturbative_warning: bool,
}

/// Drive every `(n_a, 0)` state with a single a<->r laser and convert the
/// accumulated phase into an energy shift per `n_a`.
///
/// With `blockade = true` the basis stops at `n_r = 1`; with `blockade =
/// false` the doubly excited manifold (`n_r = 2`) is retained so the
/// destructive interference of the two-photon path is present and the
/// quadratic term cancels.
pub fn single_laser_run(
    n_atoms: usize,
    omega: f64,
    delta: f64,
    blockade: bool,
    t_final: f64,
) -> Result<LightShiftRun> {
    if !(delta > 0.0) || !(omega >= 0.0) || !(t_final > 0.0) {
        return Err(Error::InvalidArgument(
            "single_laser_run needs positive delta, t_final and nonnegative omega".into(),
        ));
    }
    let max_nr = if blockade { 1 } else { 2.min(n_atoms) };
    let basis = DickeBasis::new(n_atoms, max_nr)?;
    let set = LaserSet::new(
        vec![crate::lasers::Laser::new(
            Transition::AR,
            C64::new(omega, 0.0),
            delta,
        )?],
        delta,
    )?;
    let h = build_unchecked(&basis, &set);

    // In this frame the Hamiltonian is static; the dressed phase rate of
    // <n_a,0|psi(t)> is (minus) the shift of the connected branch, with
    // micromotion at the detuning scale averaged out by the slope fit.
    let coupling_scale = 2.0 * (n_atoms as f64).sqrt() * omega;
    let dt = STEP_TARGET_RAD / (delta.abs() + coupling_scale).max(1e-9);
    let steps = (t_final / dt).ceil() as usize;
    let dt = t_final / steps as f64;
    let n_samples = 400.min(steps);
    let sample_every = (steps / n_samples).max(1);

    let mut shifts = Vec::with_capacity(n_atoms + 1);
    let mut rk = Rk4::new(basis.dimension());
    for n_a in 0..=n_atoms {
        let idx = basis.index_of(n_a, 0).unwrap();
        let mut psi = vec![C64::new(0.0, 0.0); basis.dimension()];
        psi[idx] = C64::new(1.0, 0.0);
        let mut phases = vec![(0.0_f64, 0.0_f64)]; // (t, unwrapped phase)
        let mut prev_arg = 0.0_f64;
        let mut unwrapped = 0.0_f64;
        for step in 0..steps {
            rk.step(&h, step as f64 * dt, dt, &mut psi);
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
                phases.push(((step + 1) as f64 * dt, unwrapped));
            }
        }
        // least-squares slope of phase vs t; shift = -slope
        let n = phases.len() as f64;
        let st: f64 = phases.iter().map(|p| p.0).sum();
        let sp: f64 = phases.iter().map(|p| p.1).sum();
        let stt: f64 = phases.iter().map(|p| p.0 * p.0).sum();
        let stp: f64 = phases.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * stp - st * sp) / (n * stt - st * st);
        shifts.push(-slope);
    }

    let xs: Vec<f64> = (0..=n_atoms).map(|k| k as f64).collect();
    let fit = if n_atoms >= 2 {
        fit_quadratic(&xs, &shifts)?
    } else {
        // two points: linear through them, no quadratic part
        [shifts[0], shifts[1] - shifts[0], 0.0]
    };
    Ok(LightShiftRun {
        shifts,
        fit,
        perturbative_warning: omega / delta > 0.1,
    })
}
