//! Numerics for bubble-tower concentration in the slightly supercritical
//! regime: the cylindrical phase-plane reduction and its heteroclinic, the
//! dimensional constants, Green/Robin interaction matrices, the reduced
//! energy with its critical-point scenarios, matched radial towers on the
//! unit ball, and multi-bubble profile synthesis with residual and
//! energy-concentration diagnostics.
//!
//! Everything is deterministic double-precision arithmetic; all types are
//! plain values, safe to share across threads.

// negated comparisons are deliberate NaN-rejecting guards; index loops are
// the clearest form for the small dense kernels
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]
#![allow(clippy::excessive_precision)]

pub mod constants;
pub mod error;
pub mod green;
pub mod linalg;
pub mod ode;
pub mod params;
pub mod phase;
pub mod quad;
pub mod radial;
pub mod reduced;
pub mod tower;

pub use constants::{bubble_energy, closed_form, constant, ConstantKind};
pub use error::{Error, Result};
pub use green::{
    grad_fields, green, harmonic_mode_dtn, interaction_matrix, least_eigenpair, robin,
    DomainGeometry, InteractionMatrix, Rho, SpectralData,
};
pub use params::{
    derive_params, hamiltonian, lambda_from_mu, profile_w0, profile_wp, sphere_mode, spiral_roots,
    Dimension, ExponentParams, SphereMode,
};
pub use phase::{
    beta_ell, bump_shape_check, extract_critical_sequence, first_return, integrate,
    lambda_response, linear_comparison, neighbor_gap, shoot_heteroclinic, CriticalSequence,
    HeteroclinicProfile, LambdaResponse, ReturnMapResult, Trajectory,
};
pub use quad::improper_quadrature;
pub use radial::{
    assemble_u, build_grid, expansion_check, match_all, shooting_oracle, solve_segment,
    ExpansionFit, MatchConfig, PiecewiseSolution, RadialProfile,
};
pub use reduced::{
    annulus_critical, annulus_expanded_f, ball_fold_threshold, evaluate_f, find_critical,
    gradient_f, hessian_f, scale_configuration, scenario_ball, scenario_exterior_pair,
    solve_a_star, AnnulusCritical, AnnulusValue, CriticalPoint, EnergyValue, ReducedConfiguration,
};
pub use tower::{
    d1_from_lambda, far_field, fit_bubble_scales, residual_and_energy, synthesize,
    tower_spec_from_config, tower_spec_from_critical, xi_from_lambda_i, ResidualReport,
    TowerProfile, TowerSpec,
};
