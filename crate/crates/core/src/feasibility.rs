//! Analytic loss model, adiabaticity and timing constraints, the
//! minimum-detuning criterion, and blockade-radius estimates.
//!
//! These are closed-form evaluations; the unit system follows the inputs
//! (ratios are unit-free, times come out in the unit reciprocal to the
//! frequency unit used).

use crate::error::{Error, Result};

/// Loss bookkeeping: `n_lost` atoms gone from an ensemble of `n_initial`
/// that carried squeezing `s_before`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossModel {
    pub n_initial: usize,
    pub n_lost: usize,
    pub s_before: f64,
}

impl LossModel {
    pub fn new(n_initial: usize, n_lost: usize, s_before: f64) -> Result<Self> {
        if n_lost >= n_initial {
            return Err(Error::InvalidArgument(format!(
                "n_lost = {n_lost} must be below n_initial = {n_initial}"
            )));
        }
        if s_before < 1.0 {
            return Err(Error::InvalidArgument(
                "s_before must be at least 1".into(),
            ));
        }
        Ok(Self {
            n_initial,
            n_lost,
            s_before,
        })
    }
}

/// Spin variance of the remaining atoms after losing one of `n`:
/// `var * (1 - 2/N) + 1/4`.
pub fn variance_after_single_loss(variance: f64, n_atoms: usize) -> Result<f64> {
    if n_atoms < 2 {
        return Err(Error::InvalidArgument(
            "losing an atom needs at least two".into(),
        ));
    }
    Ok(variance * (1.0 - 2.0 / n_atoms as f64) + 0.25)
}

/// Closed-form squeezing after losses: `S' = S / (1 + n_L S / N)`.
pub fn squeezing_after_losses(model: &LossModel) -> f64 {
    let n = model.n_initial as f64;
    let nl = model.n_lost as f64;
    model.s_before / (1.0 + nl * model.s_before / n)
}

/// The three adiabaticity ratios; each must stay at or below 1 for the
/// margin to hold:
/// `{sqrt(N) W0 m / D, sqrt(S/4) W1 m / (D + D'), sqrt(S/4) W2 m / (D - D')}`.
pub fn adiabaticity_check(
    n_atoms: usize,
    s_target: f64,
    omega0: f64,
    omega1: f64,
    omega2: f64,
    delta: f64,
    delta_prime: f64,
    margin: f64,
) -> Result<[f64; 3]> {
    if delta == delta_prime {
        return Err(Error::InvalidArgument(
            "delta must differ from delta_prime (degenerate denominator)".into(),
        ));
    }
    if n_atoms == 0
        || s_target <= 0.0
        || omega0 < 0.0
        || omega1 < 0.0
        || omega2 < 0.0
        || delta <= 0.0
        || delta_prime <= 0.0
        || margin < 1.0
    {
        return Err(Error::InvalidArgument(
            "adiabaticity_check needs positive inputs and margin >= 1".into(),
        ));
    }
    let root_n = (n_atoms as f64).sqrt();
    let root_s4 = (s_target / 4.0).sqrt();
    Ok([
        root_n * omega0 * margin / delta,
        root_s4 * omega1 * margin / (delta + delta_prime),
        root_s4 * omega2 * margin / (delta - delta_prime),
    ])
}

/// Time to reach squeezing `S` with the inequalities fulfilled by an order
/// of magnitude: `T = (10^4 / 16) S ln(S) / delta`, in the time unit
/// reciprocal to `delta`'s unit.
pub fn squeezing_time(s: f64, delta: f64) -> Result<f64> {
    if s <= 1.0 {
        return Err(Error::InvalidArgument(
            "squeezing_time needs S > 1 (ln S must be positive)".into(),
        ));
    }
    if delta <= 0.0 {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    Ok(1e4 / 16.0 * s * s.ln() / delta)
}

/// Detuning threshold from the loss-rate criterion: the detuning must
/// greatly exceed `Gamma * 10^2 S ln(S) / 4`. Returned as the threshold
/// value (the source treats the inequality at equality order).
pub fn min_detuning(s: f64, gamma: f64) -> Result<f64> {
    if s <= 1.0 {
        return Err(Error::InvalidArgument("min_detuning needs S > 1".into()));
    }
    if gamma <= 0.0 {
        return Err(Error::InvalidArgument("gamma must be positive".into()));
    }
    Ok(gamma * 100.0 * s * s.ln() / 4.0)
}

/// Blockade radius and interacting-neighbor count from a `1/r^3` interaction
/// coefficient: `d0 = (C3 / (margin delta))^(1/3)`,
/// `n = density (4/3) pi d0^3`.
pub fn blockade_neighbors(
    c3: f64,
    delta: f64,
    strength_margin: f64,
    density: f64,
) -> Result<(f64, f64)> {
    if c3 <= 0.0 || delta <= 0.0 || strength_margin <= 0.0 || density < 0.0 {
        return Err(Error::InvalidArgument(
            "blockade_neighbors needs positive c3, delta, margin".into(),
        ));
    }
    let d0 = (c3 / (strength_margin * delta)).cbrt();
    let n = density * 4.0 / 3.0 * std::f64::consts::PI * d0.powi(3);
    Ok((d0, n))
}

/// Default interaction calibration: chosen so that `d0 = 3 um` at
/// `delta = 50 MHz` for the given strength margin (the source quotes the
/// radius, not the coefficient). Units: MHz * um^3.
pub fn default_c3(strength_margin: f64) -> f64 {
    strength_margin * 50.0 * 27.0
}

/// Evaluated feasibility report for one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub adiabaticity_margins: [f64; 3],
    pub adiabaticity_ok: bool,
    /// Same unit system as the detuning input.
    pub squeezing_time: f64,
    /// Threshold the detuning must greatly exceed.
    pub min_detuning: f64,
    /// um
    pub blockade_radius: f64,
    pub neighbor_count: f64,
}

pub struct FeasibilityInputs {
    pub n_atoms: usize,
    pub s_target: f64,
    /// MHz (linear; all ratios are unit-free)
    pub omega0: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub delta: f64,
    pub delta_prime: f64,
    pub margin: f64,
    /// Same unit as delta.
    pub gamma: f64,
    /// MHz * um^3
    pub c3: f64,
    pub strength_margin: f64,
    /// atoms / um^3
    pub density: f64,
}

pub fn feasibility_report(inputs: &FeasibilityInputs) -> Result<FeasibilityReport> {
    let margins = adiabaticity_check(
        inputs.n_atoms,
        inputs.s_target,
        inputs.omega0,
        inputs.omega1,
        inputs.omega2,
        inputs.delta,
        inputs.delta_prime,
        inputs.margin,
    )?;
    let (d0, n) = blockade_neighbors(
        inputs.c3,
        inputs.delta,
        inputs.strength_margin,
        inputs.density,
    )?;
    Ok(FeasibilityReport {
        adiabaticity_margins: margins,
        adiabaticity_ok: margins.iter().all(|m| *m <= 1.0),
        squeezing_time: squeezing_time(inputs.s_target, inputs.delta)?,
        min_detuning: min_detuning(inputs.s_target, inputs.gamma)?,
        blockade_radius: d0,
        neighbor_count: n,
    })
}
