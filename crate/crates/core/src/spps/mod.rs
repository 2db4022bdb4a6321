//! Formal powers, series solutions, particular solutions, tail bounds and
//! initial value problems.

pub mod ivp;
pub mod particular;
pub mod powers;
pub mod singular;
pub mod tail;

pub use ivp::{solve_ivp, Chunking};
pub use particular::{build_u0_regular, build_u0_regular_at, particular_for, particular_from_expressions, shift_base, ParticularSolution};
pub use powers::{
    build_formal_powers, evaluate_combinations, evaluate_solutions, node_powers, Combination, Families, FormalPowers, NodePowers,
    PowerPlan, PowerSource, SolutionPair,
};
pub use singular::{build_formal_powers_singular, SingularPowers};
pub use tail::{series_tail, tail_bound, TailBound};
