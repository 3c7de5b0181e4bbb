//! Single-machine scheduling with release times, minimising total waiting
//! time: a signed-waiting-time calculus, the Optimal Sort local search built
//! on it, exact oracles to check it against, and a benchmark harness.

mod clock;
pub mod driver;
pub mod harness;
pub mod instances;
pub mod move_calculus;
pub mod oracles;
pub mod propagation;
pub mod rules;
pub mod solution_sets;
pub mod timeline;

pub use driver::{optimal_sort, optimal_sort_from, SolveResult};
pub use instances::{generate_instance, initial_sequence, parse_instance, Instance, Sequence, Time};
pub use timeline::{compute_profile, WaitingProfile};
