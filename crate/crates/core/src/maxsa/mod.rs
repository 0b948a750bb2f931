//! Maximisation: the Sherali-Adams relaxation, rounding via fractional modulators,
//! and contraction-based overcast witnesses.

pub mod contract;
pub mod fragile;
pub mod sa;

pub use contract::{contract, pliability_witness, Contraction, PliabilityWitness};
pub use fragile::{column_modulator, fragile_bound, fragile_solve, FractionalModulator, FragileOutcome};
pub use sa::{
    build_sa, build_sa_with, sa_variable_count, solve_sa, solve_sa_with, ComponentSolve, MarginalFamily, SALinearProgram,
    SaOptions, SaSolution, DEFAULT_SA_VARIABLES,
};
