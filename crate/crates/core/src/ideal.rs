//! Evolution under the effective pair-transfer Hamiltonian
//! `H = omega_eff (a†a†bb + b†b†aa)` on the ground manifold, plus the
//! analytic squeezing and population laws it is expected to follow while the
//! transferred fraction stays small.

use crate::basis::DickeBasis;
use crate::error::{Error, Result};
use crate::integrate::{check_norm, norm_sqr, HamiltonianAction, NormPolicy, Rk4};
use crate::spin::{observables, squeezing_from_observables};
use crate::state::DickeState;
use crate::trace::{SqueezingTrace, TraceMeta, TraceRow};
use num_complex::Complex64 as C64;

/// Hard refusal threshold on `|H| * dt`.
pub const STEP_LIMIT_RAD: f64 = 0.1;

/// Step sizing targets `|H| * dt` at this value, keeping per-step norm drift
/// well under the 1e-9 budget (RK4 drift scales as the sixth power).
pub const STEP_TARGET_RAD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealConfig {
    pub n_atoms: usize,
    /// Pair-transfer rate in rad/us (sign allowed; positive squeezes the
    /// -pi/4 axis).
    pub omega_eff: f64,
    /// Total evolution time in us.
    pub t_final: f64,
    pub n_steps: usize,
}

impl IdealConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_atoms == 0 {
            return Err(Error::InvalidArgument("n_atoms must be positive".into()));
        }
        if !(self.t_final > 0.0) {
            return Err(Error::InvalidArgument("t_final must be positive".into()));
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidArgument("n_steps must be at least 1".into()));
        }
        if !self.omega_eff.is_finite() {
            return Err(Error::InvalidArgument("omega_eff must be finite".into()));
        }
        Ok(())
    }

    /// Choose the step count from the operator norm so that
    /// `|H| * dt <= STEP_TARGET_RAD`.
    pub fn with_auto_steps(n_atoms: usize, omega_eff: f64, t_final: f64) -> Result<Self> {
        let basis = DickeBasis::new(n_atoms, 0)?;
        let h = IdealHamiltonian::new(&basis, omega_eff)?;
        let n_steps = ((h.norm_bound() * t_final / STEP_TARGET_RAD).ceil() as usize).max(64);
        let cfg = Self {
            n_atoms,
            omega_eff,
            t_final,
            n_steps,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// The static pair-transfer Hamiltonian on a `max_rydberg = 0` basis: couples
/// `n_a` to `n_a - 2` with element
/// `omega_eff * sqrt(n_a (n_a - 1) (n_b + 1) (n_b + 2))`.
#[derive(Debug, Clone)]
pub struct IdealHamiltonian {
    dim: usize,
    /// (row, col, weight) for the upper ladder only; applied symmetrically.
    couplings: Vec<(usize, usize, f64)>,
}

pub fn build_ideal_hamiltonian(basis: &DickeBasis, omega_eff: f64) -> Result<IdealHamiltonian> {
    IdealHamiltonian::new(basis, omega_eff)
}

impl IdealHamiltonian {
    pub fn new(basis: &DickeBasis, omega_eff: f64) -> Result<Self> {
        if basis.max_rydberg() != 0 {
            return Err(Error::InvalidArgument(
                "ideal Hamiltonian is defined on the ground manifold (max_rydberg = 0)".into(),
            ));
        }
        let n = basis.n_atoms();
        let mut couplings = Vec::new();
        for n_a in 2..=n {
            let n_b = n - n_a;
            let w = omega_eff
                * ((n_a * (n_a - 1) * (n_b + 1) * (n_b + 2)) as f64).sqrt();
            if w != 0.0 {
                let row = basis.index_of(n_a - 2, 0).unwrap();
                let col = basis.index_of(n_a, 0).unwrap();
                couplings.push((row, col, w));
            }
        }
        Ok(Self {
            dim: basis.dimension(),
            couplings,
        })
    }

    /// Upper bound on the spectral norm (max absolute row sum).
    pub fn norm_bound(&self) -> f64 {
        let mut row_sums = vec![0.0_f64; self.dim];
        for &(r, c, w) in &self.couplings {
            row_sums[r] += w.abs();
            row_sums[c] += w.abs();
        }
        row_sums.into_iter().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::<f64>::zeros(self.dim, self.dim);
        for &(r, c, w) in &self.couplings {
            m[(r, c)] += w;
            m[(c, r)] += w;
        }
        m
    }

    pub fn expectation(&self, psi: &[C64]) -> f64 {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.apply(0.0, psi, &mut out);
        psi.iter().zip(&out).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

impl HamiltonianAction for IdealHamiltonian {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, _t: f64, psi: &[C64], out: &mut [C64]) {
        out.fill(C64::new(0.0, 0.0));
        for &(r, c, w) in &self.couplings {
            out[r] += w * psi[c];
            out[c] += w * psi[r];
        }
    }
}

/// Closed-form expectations for the small-transfer window.
#[derive(Debug, Clone, Copy)]
pub struct IdealPrediction {
    pub n_atoms: usize,
    pub omega_eff: f64,
}

impl IdealPrediction {
    /// `S(t) = exp(4 N omega_eff t)`.
    pub fn s_analytic(&self, t: f64) -> f64 {
        (4.0 * self.n_atoms as f64 * self.omega_eff * t).exp()
    }

    /// `n_b(t) = sinh^2(2 N omega_eff t)`.
    pub fn nb_analytic(&self, t: f64) -> f64 {
        (2.0 * self.n_atoms as f64 * self.omega_eff * t).sinh().powi(2)
    }

    /// Intermediate-time relation `S ~= 4 n_b`, valid for `1 << n_b << N`.
    pub fn s_from_nb(nb: f64) -> f64 {
        4.0 * nb
    }
}

pub fn analytic_curves(config: &IdealConfig) -> Result<IdealPrediction> {
    config.validate()?;
    Ok(IdealPrediction {
        n_atoms: config.n_atoms,
        omega_eff: config.omega_eff,
    })
}

/// Integrate the Schrödinger equation under the ideal Hamiltonian and record
/// the squeezing trace at `n_steps + 1` uniformly spaced times.
pub fn evolve_ideal(config: &IdealConfig, initial: &DickeState) -> Result<SqueezingTrace> {
    config.validate()?;
    let basis = initial.basis().clone();
    if basis.n_atoms() != config.n_atoms {
        return Err(Error::InvalidState(format!(
            "initial state has N = {}, config has N = {}",
            basis.n_atoms(),
            config.n_atoms
        )));
    }
    let h = IdealHamiltonian::new(&basis, config.omega_eff)?;
    let dt = config.t_final / config.n_steps as f64;
    let h_dt = h.norm_bound() * dt;
    if h_dt > STEP_LIMIT_RAD {
        return Err(Error::StepTooCoarse {
            h_dt,
            limit: STEP_LIMIT_RAD,
        });
    }

    let mut psi = initial.amplitudes().to_vec();
    let mut rk = Rk4::new(h.dim());
    let mut rows = Vec::with_capacity(config.n_steps + 1);
    let mut deviation = 0.0;
    let policy = NormPolicy::default();

    record(&basis, &psi, 0.0, &mut rows)?;
    let mut t = 0.0;
    for step in 0..config.n_steps {
        rk.step(&h, t, dt, &mut psi);
        t = (step + 1) as f64 * dt;
        deviation = check_norm(t, norm_sqr(&psi), deviation, policy)?;
        record(&basis, &psi, t, &mut rows)?;
    }

    SqueezingTrace::new(
        TraceMeta {
            n_atoms: config.n_atoms,
            engine_version: crate::ENGINE_VERSION.to_string(),
            config_echo: vec![
                format!("mode=ideal"),
                format!("omega_eff_rad_per_us={:.9e}", config.omega_eff),
                format!("t_final_us={:.9e}", config.t_final),
                format!("n_steps={}", config.n_steps),
            ],
        },
        rows,
    )
}

fn record(basis: &DickeBasis, psi: &[C64], t: f64, rows: &mut Vec<TraceRow>) -> Result<()> {
    let state = DickeState::with_tolerance(basis.clone(), psi.to_vec(), 1e-6)?;
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
