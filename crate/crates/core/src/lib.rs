//! Spin squeezing of a three-level atomic ensemble under a Rydberg blockade.
//!
//! The crate simulates the collective dynamics of `N` atoms with two ground
//! states coupled to a common Rydberg level, in the permutation-symmetric
//! (Dicke) basis truncated at one Rydberg excitation:
//!
//! * [`ideal`] evolves the effective pair-transfer Hamiltonian
//!   `omega_eff (a†a†bb + b†b†aa)` and carries the analytic squeezing and
//!   population laws of its small-transfer window;
//! * [`blockade`] integrates the full time-dependent multi-laser model
//!   (single-laser light shifts, the six-laser shift-cancelling drive);
//! * [`oracle`] verifies the perturbative formulas by brute force on one-
//!   and two-atom product spaces, including the phase-convention audit for
//!   the mirror Stokes fields;
//! * [`feasibility`] evaluates the analytic loss, timing, and
//!   blockade-radius estimates.
//!
//! Frequencies are angular (rad/us) throughout the physics layer; helpers
//! convert from linear MHz. Times are microseconds.

pub mod basis;
pub mod blockade;
pub mod error;
pub mod feasibility;
pub mod ideal;
pub mod integrate;
pub mod lasers;
pub mod oracle;
pub mod spin;
pub mod state;
pub mod trace;

pub use basis::{DickeBasis, Ladder, SparseOp};
pub use blockade::{
    build_time_dependent_hamiltonian, evolve_blockade, single_laser_run, BlockadeConfig,
    BlockadeHamiltonian, LightShiftRun,
};
pub use error::{Error, Result};
pub use feasibility::{
    adiabaticity_check, blockade_neighbors, default_c3, feasibility_report, min_detuning,
    squeezing_after_losses, squeezing_time, variance_after_single_loss, FeasibilityInputs,
    FeasibilityReport, LossModel,
};
pub use ideal::{
    analytic_curves, build_ideal_hamiltonian, evolve_ideal, IdealConfig, IdealHamiltonian,
    IdealPrediction,
};
pub use lasers::{
    mhz, pair_coupling_magnitude, six_laser_omega_eff, standard_six_laser_set,
    standard_three_laser_set, Laser, LaserSet, PhaseConvention, Transition,
};
pub use oracle::{
    fourth_order_sum, light_shift_exact, pair_coupling_measure, phase_convention_audit,
    AuditReport, ConventionScore, PairCouplingFit, PerturbationReport, TwoAtomModel,
};
pub use spin::{
    jz_operator, observables, spin_operator, squeezing, SpinObservables, SqueezingMetrics,
    SQUEEZING_AXIS,
};
pub use state::DickeState;
pub use trace::{compare_traces, DeviationReport, SqueezingTrace, TraceMeta, TraceRow};

/// Version string stamped into trace metadata.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
