//! Laser fields driving the ensemble and the six-laser configuration that
//! cancels the blockade-induced light shifts while keeping the pair coupling.
//!
//! Units: Rabi amplitudes and detunings are angular frequencies in rad/us.
//! The `rabi` amplitude is the coupling matrix element of a single atom, so
//! one laser contributes `rabi * (collective raising operator) * e^{i
//! detuning t} + h.c.` to the interaction-picture Hamiltonian; the light
//! shift of a driven ground state is `-|rabi|^2 / detuning`.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

pub const TAU: f64 = std::f64::consts::TAU;

/// Convert a linear frequency in MHz to the internal angular rad/us unit.
pub fn mhz(nu: f64) -> f64 {
    TAU * nu
}

/// Which ground state the field couples to the Rydberg state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    /// a <-> r (pump)
    AR,
    /// b <-> r (Stokes)
    BR,
}

/// One monochromatic field. `detuning > 0` means the laser sits below the
/// upper state; the rotating-frame phase on the raising operator is
/// `e^{i detuning t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Laser {
    pub transition: Transition,
    /// Complex coupling matrix element, rad/us.
    pub rabi: C64,
    /// Detuning, rad/us.
    pub detuning: f64,
}

impl Laser {
    pub fn new(transition: Transition, rabi: C64, detuning: f64) -> Result<Self> {
        if !rabi.re.is_finite() || !rabi.im.is_finite() || !detuning.is_finite() {
            return Err(Error::InvalidArgument("laser parameters must be finite".into()));
        }
        Ok(Self {
            transition,
            rabi,
            detuning,
        })
    }
}

/// A full drive configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct LaserSet {
    pub lasers: Vec<Laser>,
    /// Detuning defining the rotating frame (the pump detuning for the
    /// standard sets); also sets the static diagonal `reference_detuning *
    /// n_r`.
    pub reference_detuning: f64,
}

impl LaserSet {
    pub fn new(lasers: Vec<Laser>, reference_detuning: f64) -> Result<Self> {
        if lasers.is_empty() {
            return Err(Error::InvalidArgument("laser set must not be empty".into()));
        }
        Ok(Self {
            lasers,
            reference_detuning,
        })
    }

    /// Largest |detuning - reference| over the set; the fastest explicit
    /// phase the integrator has to resolve.
    pub fn max_relative_detuning(&self) -> f64 {
        self.lasers
            .iter()
            .map(|l| (l.detuning - self.reference_detuning).abs())
            .fold(0.0, f64::max)
    }

    /// Stroboscopic period removing all explicit drive phases: the phases
    /// run at the relative detunings, so sampling at multiples of
    /// `2 pi / gcd(relative detunings)` freezes them. Falls back to the
    /// smallest nonzero relative detuning when the set is incommensurate.
    pub fn strobe_period(&self) -> Option<f64> {
        let freqs: Vec<f64> = self
            .lasers
            .iter()
            .map(|l| (l.detuning - self.reference_detuning).abs())
            .filter(|f| *f > 1e-12)
            .collect();
        if freqs.is_empty() {
            return None;
        }
        let mut g = freqs[0];
        for &f in &freqs[1..] {
            g = float_gcd(g, f);
        }
        if g > 1e-9 {
            Some(TAU / g)
        } else {
            freqs
                .iter()
                .cloned()
                .fold(None, |m: Option<f64>, f| {
                    Some(m.map_or(f, |m| m.min(f)))
                })
                .map(|f| TAU / f)
        }
    }
}

fn float_gcd(a: f64, b: f64) -> f64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    let tol = 1e-9 * a.max(b).max(1.0);
    while b > tol {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Sign assignment of the +-90 degree phases on the two mirror Stokes
/// fields. The physically useful assignment is not derivable from first
/// principles here; `phase_convention_audit` selects it empirically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseConvention {
    PlusMinus,
    MinusPlus,
    PlusPlus,
    MinusMinus,
}

impl PhaseConvention {
    pub const ALL: [PhaseConvention; 4] = [
        PhaseConvention::PlusMinus,
        PhaseConvention::MinusPlus,
        PhaseConvention::PlusPlus,
        PhaseConvention::MinusMinus,
    ];

    /// Phases (radians) applied to the two mirror Stokes amplitudes.
    pub fn stokes_phases(&self) -> (f64, f64) {
        let q = std::f64::consts::FRAC_PI_2;
        match self {
            PhaseConvention::PlusMinus => (q, -q),
            PhaseConvention::MinusPlus => (-q, q),
            PhaseConvention::PlusPlus => (q, q),
            PhaseConvention::MinusMinus => (-q, -q),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PhaseConvention::PlusMinus => "+90/-90",
            PhaseConvention::MinusPlus => "-90/+90",
            PhaseConvention::PlusPlus => "+90/+90",
            PhaseConvention::MinusMinus => "-90/-90",
        }
    }
}

impl std::str::FromStr for PhaseConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+90/-90" | "plus-minus" => Ok(PhaseConvention::PlusMinus),
            "-90/+90" | "minus-plus" => Ok(PhaseConvention::MinusPlus),
            "+90/+90" | "plus-plus" => Ok(PhaseConvention::PlusPlus),
            "-90/-90" | "minus-minus" => Ok(PhaseConvention::MinusMinus),
            other => Err(Error::InvalidArgument(format!(
                "unknown phase convention '{other}'"
            ))),
        }
    }
}

/// The original pump + two-Stokes triple: a<->r at detuning `delta` with
/// `omega0`; b<->r at `delta - delta_prime` with `omega1` and at
/// `delta + delta_prime` with `omega2`. The two Stokes fields sit
/// symmetrically around the Raman resonance.
pub fn standard_three_laser_set(
    delta: f64,
    delta_prime: f64,
    omega0: f64,
    omega1: f64,
    omega2: f64,
) -> Result<LaserSet> {
    validate_detunings(delta, delta_prime)?;
    let lasers = vec![
        Laser::new(Transition::AR, C64::new(omega0, 0.0), delta)?,
        Laser::new(Transition::BR, C64::new(omega1, 0.0), delta - delta_prime)?,
        Laser::new(Transition::BR, C64::new(omega2, 0.0), delta + delta_prime)?,
    ];
    LaserSet::new(lasers, delta)
}

/// The six-laser configuration: the original triple plus its mirror at
/// opposite detunings with equal moduli, the mirror pump in phase with the
/// original and the two mirror Stokes fields dephased per `convention`.
pub fn standard_six_laser_set(
    delta: f64,
    delta_prime: f64,
    omega0: f64,
    omega1: f64,
    omega2: f64,
    convention: PhaseConvention,
) -> Result<LaserSet> {
    let mut set = standard_three_laser_set(delta, delta_prime, omega0, omega1, omega2)?;
    let (phi1, phi2) = convention.stokes_phases();
    set.lasers.push(Laser::new(
        Transition::AR,
        C64::new(omega0, 0.0),
        -delta,
    )?);
    set.lasers.push(Laser::new(
        Transition::BR,
        C64::from_polar(omega1, phi1),
        -(delta - delta_prime),
    )?);
    set.lasers.push(Laser::new(
        Transition::BR,
        C64::from_polar(omega2, phi2),
        -(delta + delta_prime),
    )?);
    Ok(set)
}

fn validate_detunings(delta: f64, delta_prime: f64) -> Result<()> {
    if !(delta > delta_prime && delta_prime > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need delta > delta_prime > 0, got delta = {delta}, delta_prime = {delta_prime}"
        )));
    }
    Ok(())
}

/// Magnitude structure of the four-photon pair coupling for one triple:
/// `4 omega0^2 omega1 omega2 / (delta (delta - delta') (delta + delta'))`.
/// The overall sign depends on the phase bookkeeping; in this crate's
/// conventions the measured coupling for a positive-amplitude triple is
/// positive (see the perturbation oracle).
pub fn pair_coupling_magnitude(
    delta: f64,
    delta_prime: f64,
    omega0: f64,
    omega1: f64,
    omega2: f64,
) -> f64 {
    (4.0 * omega0 * omega0 * omega1 * omega2
        / (delta * (delta - delta_prime) * (delta + delta_prime)))
        .abs()
}

/// Effective pair-transfer rate of the audited six-laser set: the two
/// triples add coherently, and `omega_eff = omega_c_total / 2`.
pub fn six_laser_omega_eff(
    delta: f64,
    delta_prime: f64,
    omega0: f64,
    omega1: f64,
    omega2: f64,
) -> f64 {
    pair_coupling_magnitude(delta, delta_prime, omega0, omega1, omega2)
}
