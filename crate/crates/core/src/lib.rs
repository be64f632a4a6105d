//! Key pre-distribution from multiple block codes.
//!
//! Each node receives, from each of `M` authorities, a `k`-symbol ID that
//! is encoded into an `n`-symbol codeword. Symbol `α` at coordinate `i` of
//! the concatenated key-index ID selects key `α·M·n + i` from a shared
//! pool. Two nodes share the keys at the coordinates where their key-index
//! IDs agree.
//!
//! Modules, bottom up:
//! - [`field`]: GF(p) and GF(2^m) arithmetic.
//! - [`codes`]: Reed–Solomon, random linear and explicit block codes.
//! - [`kps`]: ID assignment, key references, key pools and discovery.
//! - [`resilience`]: exact and average counts of collusion-proof pairs.
//! - [`sim`]: seeded Monte Carlo estimates of the same quantities.

pub mod codes;
pub mod field;
pub mod kps;
pub mod resilience;
pub mod sim;

pub use codes::{BlockCode, CodeError, CodeKind, CodeSpec, Codeword, GeneratorMatrix};
pub use field::{Field, FieldElement, FieldError};
