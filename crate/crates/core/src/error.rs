use num_bigint::BigUint;
use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The claimed prime has a nontrivial divisor.
    #[error("{p} is not prime")]
    NonPrime { p: u64 },

    /// A signature normalized to zero blocks (the trivial group has no
    /// p-primary signature).
    #[error("signature is empty after normalization")]
    EmptySignature,

    /// A prime-power coordinate modulus does not fit in a machine word.
    #[error("p^{exponent} with p = {p} does not fit in 64 bits")]
    Overflow { p: u64, exponent: u32 },

    /// A residue, code entry, or index lies outside its admissible range.
    #[error("value out of range: {what}")]
    OutOfRange { what: String },

    /// An enumeration would exceed the configured cap.
    #[error("{what} requires {required} states, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        required: BigUint,
        cap: u64,
    },

    /// The all-zero profile has no orbit (it names the trivial subgroup).
    #[error("orbit size is undefined for the zero profile")]
    ZeroProfile,

    /// The input sequence is not a bijection on 1..=n.
    #[error("not a permutation: {what}")]
    NotAPermutation { what: String },

    /// Factorial-scale enumeration refused.
    #[error("n = {n} exceeds the brute-force bound {max}")]
    TooLarge { n: u32, max: u32 },

    /// The profile fails the membership predicate for Y of the staircase group.
    #[error("profile is not a member of Y for the staircase group")]
    NotInY,

    /// Group spec text could not be parsed.
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
