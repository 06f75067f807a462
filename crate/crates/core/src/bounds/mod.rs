//! Rigorous bounds around the many-body ground state energy: a Dyson-type
//! upper bound built on the GP minimiser, the one-particle increment bound
//! from `E*`, the homogeneous lower bound and its assembly over a box.

mod dyson;
mod estar;
mod lower;
mod sandwich;

pub use dyson::{
    build_dyson_f, check_soft_core_condition, correlation_integrals, cut_radius, dyson_ingredients,
    dyson_upper_bound, soft_core_certified, upper_bound_formula, DysonF, DysonFSummary,
    Ingredients, UpperBound,
};
pub use estar::{
    chemical_potential_bound, estar_minimize, Estar, EstarLevel, IncrementBound, P_MAX, P_START,
    P_STOP,
};
pub use lower::{
    assemble_box_lower_bound, assemble_box_lower_bound_with, homogeneous_lower_bound,
    homogeneous_lower_bound_with, BoxLowerBound, HomogeneousLowerBound, DEFAULT_C,
    DEFAULT_EXPONENT, REGIME_FACTOR, Y_MAX,
};
pub use sandwich::{
    gaps_shrinking, sandwich_report, sweep, BoundReport, EstarSummary, SandwichOptions,
};
