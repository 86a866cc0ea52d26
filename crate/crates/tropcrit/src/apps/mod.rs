//! Applications of the critical-point solver: toric divisors, Delzant
//! moment polytopes, and invariance under positively birational exchanges.

mod delzant;
mod mutation;
mod toric;

pub use delzant::{delzant_analyze, polytope_potential, DelzantInstance, DelzantReport};
pub use mutation::{
    check_mutation_invariance, mutate_pullback, trop_transport, Mutation, MutationDirection,
    MutationReport,
};
pub use toric::{divisor_potential, toric_analyze, ToricInstance, ToricReport};

use num_integer::Integer;

/// Greatest common divisor of the absolute values; 0 for the zero vector.
pub(crate) fn gcd_all(entries: &[i64]) -> i64 {
    entries.iter().fold(0i64, |g, &x| g.gcd(&x.abs()))
}
