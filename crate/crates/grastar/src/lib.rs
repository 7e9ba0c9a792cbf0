//! Exact symbol calculus for the non-anticommutative Grassmann star product.
//!
//! The crate implements, over `n` fermionic sites:
//!
//! * exact arithmetic in the complex Grassmann algebra on `2n` generators,
//!   including Berezin differentiation and integration ([`grassmann`]);
//! * the coherent-state star product `⋆`, its symmetric cousin `⋆̂`, star
//!   exponentials and the equivalence map `T` between the two ([`star`]);
//! * a Fock-space matrix oracle fixing every sign convention through the
//!   normal-ordered symbol map ([`fock`]);
//! * Bogoliubov canonical transformations and the covariance criterion for
//!   unitary transformations at the symbol level ([`covariance`]);
//! * the fermionic-oscillator star calculus with its su(2) realization
//!   ([`oscillator`]);
//! * a bosonic Voros sector and the supersymmetric star product with the
//!   sl(1/1) supercharge algebra ([`boson`], [`susy`]);
//! * an expression parser and check-suite runner backing the `grastar` CLI
//!   ([`expr`], [`report`]).
//!
//! All symbolic operations are sign-exact; floating point enters only through
//! complex coefficients and the dense matrix paths used by the oracle.

pub mod boson;
pub mod covariance;
pub mod error;
pub mod expr;
pub mod fock;
pub mod grassmann;
pub mod linalg;
pub mod oscillator;
pub mod report;
pub mod star;
pub mod susy;

pub use error::{Error, Result};
pub use grassmann::{GeneratorIndex, GeneratorKind, GrassmannElement, Monomial, Parity};
pub use star::{StarKind, StarProduct};

use rand::SeedableRng;

/// Deterministic RNG used by the CLI trial runners and the test suites.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
