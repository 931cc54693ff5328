//! Low-degree testing of Boolean functions over F2.
//!
//! The crate evaluates the k-flat tester for Reed-Muller codes `RM(d, n)`
//! exactly and by sampling, computes distances to the code, Gowers
//! uniformity norms, and the hyperplane sewing construction that turns
//! locally close polynomials into one global polynomial.
//!
//! Truth tables use one global convention: bit `i` of a point index is
//! coordinate `x_i` (zero based), and every file format and ANF mask
//! follows it.

pub mod boolfn;
pub mod counterex;
mod error;
pub mod f2;
pub mod flattest;
pub mod gowers;
pub mod ratio;
pub mod rmcode;
pub mod sewing;

pub use crate::boolfn::{Anf, BooleanFunction};
pub use crate::error::{Error, Result};
pub use crate::f2::{AffineMap, Budget, F2Mat, F2Vec, Flat, Hyperplane};
pub use crate::flattest::{RejEstimate, TestOutcome, ThmConstants};
pub use crate::gowers::GowersValue;
pub use crate::rmcode::{Nearest, RmCode};
pub use crate::sewing::{HyperplaneWitness, SewReport};

/// Seeded generator used by every randomized routine in the crate.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Builds the crate's generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}
