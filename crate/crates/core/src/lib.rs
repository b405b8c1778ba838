//! Generalized Schrödinger dynamics for polynomial Hamiltonians: a
//! λ-deformed quantization map that interpolates between the classical wave
//! equation (λ = 0) and the Schrödinger equation (λ = 1), grid propagation
//! of the resulting nonlinear equation, the closed-form classical-limit
//! solution, its phase geometry, and chaos diagnostics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chaos;
pub mod classical;
pub mod closed_form;
pub mod coeff;
pub mod error;
mod fft;
pub mod grid;
pub mod hamiltonian;
pub mod operator;
pub mod phase_geometry;
pub mod poly;
pub mod propagator;
mod quad;
pub mod quantize;

pub use chaos::{divergence_rate_fit, first_crossing, ftle_benettin, gaussian_distance, wavefunction_divergence, DivergenceEngine, Envelope};
pub use classical::{integrate_classical, uniform_grid, ClassicalTrajectory, Integrator};
pub use closed_form::{closed_form_state, phase_integral, propagate_closed_form, verify_pde_residual, ClosedFormRun, PhaseRecord};
pub use coeff::Coeff;
pub use error::{Error, Result};
pub use grid::{apply_operator, expectation_operator, make_envelope, EnvelopeKind, GridSpec, GridState};
pub use hamiltonian::{models, DriveSpec, DrivenHamiltonian, ModelConstants, PhasePoint};
pub use operator::{normal_order_reduce, CanonicalOperatorPoly, HbarSeries, Letter, OperatorPoly, Word};
pub use phase_geometry::{bohr_sommerfeld_residual, check_loop_phases, detect_closure, geometric_phase_on_loop, loop_action, Loop, LoopPhaseCheck};
pub use poly::{Coordinate, Monomial, Poly, PolyObservable};
pub use propagator::{evolve, propagate, propagate_from, step, superposition_probe, PropagationConfig, Refresh, Scheme, SplitOrder, TrajectoryRecord};
pub use quantize::{deformed_generator, deformed_generator_poly, lambda_is_smooth_probe, taylor_layers, weyl_quantize, GeneratorMode};
