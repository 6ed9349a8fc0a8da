//! Permutation codes and the max-jump identity.
//!
//! For a permutation `sigma` of `{1..n}`, the code entry `tau_i` counts the
//! later positions holding smaller values: `tau_i = #{ j >= i : sigma(j) <
//! sigma(i) }`. The code map is a bijection onto `W_n = { tau : tau_i <=
//! n - i }`, and the code norm equals the max jump `max_i (sigma(i) - i)`.
//!
//! Summing max jumps over all of `S_n` gives the same number as the class
//! count of the staircase group `Z(p) + Z(p^2) + ... + Z(p^n)`; the bridge
//! is the map [`omega_of`] sending a staircase profile to a code in
//! `W'_n = { tau : tau_i <= i - 1 }` with fibers of size equal to the norm.
//! [`verify_triple_identity`] checks all four numbers against each other.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::{json, Map, Value};
use std::str::FromStr;

use crate::counting::{count_classes_closed_form, enumerate_Y};
use crate::error::{Error, Result};
use crate::group::{normalize_signature, DeltaProfile, PrimePowerSignature};

/// Largest `n` accepted by the factorial-scale brute force.
pub const MAX_BRUTE_N: u32 = 10;

/// A permutation of `{1..n}` with its code and max-jump statistic.
/// Permutations and codes are 1-indexed sequences stored contiguously.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermCode {
    n: u32,
    perm: Vec<u32>,
    code: Vec<u32>,
    max_jump: u32,
}

impl PermCode {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn perm(&self) -> &[u32] {
        &self.perm
    }

    pub fn code(&self) -> &[u32] {
        &self.code
    }

    pub fn max_jump(&self) -> u32 {
        self.max_jump
    }

    /// `||tau||`: the largest code entry.
    pub fn code_norm(&self) -> u32 {
        self.code.iter().copied().max().unwrap_or(0)
    }
}

/// Code and max jump of a permutation given as the sequence
/// `sigma(1), ..., sigma(n)` of values in `1..=n`.
pub fn code_of(perm: &[u32]) -> Result<PermCode> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &value in perm {
        let inside = (1..=n as u32).contains(&value);
        if !inside || std::mem::replace(&mut seen[(value - 1) as usize], true) {
            return Err(Error::NotAPermutation {
                what: format!("value {value} repeated or outside 1..={n}"),
            });
        }
    }
    let code: Vec<u32> = (0..n)
        .map(|i| (i..n).filter(|&j| perm[j] < perm[i]).count() as u32)
        .collect();
    let max_jump = perm
        .iter()
        .enumerate()
        .map(|(i, &value)| i64::from(value) - (i as i64 + 1))
        .max()
        .unwrap_or(0)
        .max(0) as u32;
    Ok(PermCode {
        n: n as u32,
        perm: perm.to_vec(),
        code,
        max_jump,
    })
}

/// Inverse of the code map: scanning left to right, position `i` takes the
/// value leaving exactly `tau_i` smaller values unused.
pub fn perm_of(code: &[u32]) -> Result<Vec<u32>> {
    let n = code.len();
    for (i, &tau) in code.iter().enumerate() {
        if tau as usize > n - i - 1 {
            return Err(Error::OutOfRange {
                what: format!(
                    "code entry {tau} at position {} exceeds {}",
                    i + 1,
                    n - i - 1
                ),
            });
        }
    }
    let mut unused: Vec<u32> = (1..=n as u32).collect();
    let mut perm = Vec::with_capacity(n);
    for &tau in code {
        perm.push(unused.remove(tau as usize));
    }
    Ok(perm)
}

fn heap_permutations<F: FnMut(&[u32])>(k: usize, values: &mut [u32], f: &mut F) {
    if k <= 1 {
        f(values);
        return;
    }
    for i in 0..k - 1 {
        heap_permutations(k - 1, values, f);
        if k % 2 == 0 {
            values.swap(i, k - 1);
        } else {
            values.swap(0, k - 1);
        }
    }
    heap_permutations(k - 1, values, f);
}

/// `sum over sigma in S_n of max_i (sigma(i) - i)` by full enumeration.
pub fn jump_sum_brute(n: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "n must be at least 1".into(),
        });
    }
    if n > MAX_BRUTE_N {
        return Err(Error::TooLarge {
            n,
            max: MAX_BRUTE_N,
        });
    }
    let mut values: Vec<u32> = (1..=n).collect();
    let mut sum = 0u64;
    heap_permutations(n as usize, &mut values, &mut |perm| {
        let jump = perm
            .iter()
            .enumerate()
            .map(|(i, &value)| i64::from(value) - (i as i64 + 1))
            .max()
            .unwrap_or(0)
            .max(0);
        sum += jump as u64;
    });
    Ok(sum)
}

/// The same sum in closed form: `sum_{k=1}^{n-1} k * k! * ((k+1)^{n-k} - k^{n-k})`.
pub fn jump_sum_closed(n: u32) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "n must be at least 1".into(),
        });
    }
    let mut sum = BigUint::zero();
    let mut factorial = BigUint::one();
    for k in 1..n {
        factorial *= BigUint::from(k);
        let upper = BigUint::from(k as u64 + 1).pow(n - k);
        let lower = BigUint::from(k as u64).pow(n - k);
        sum += BigUint::from(k) * &factorial * (upper - lower);
    }
    Ok(sum)
}

/// The staircase group `Z(p) + Z(p^2) + ... + Z(p^n)`. The prime does not
/// affect class counts; 2 keeps coordinates small.
pub fn staircase_signature(n: u32) -> Result<PrimePowerSignature> {
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "staircase needs n >= 1".into(),
        });
    }
    let raw: Vec<(u32, u32)> = (1..=n).map(|m| (m, 1)).collect();
    normalize_signature(2, &raw)
}

/// Maps a staircase profile in `Y` to a code in `W'_n`: drop the entry at
/// index `||delta||` and prepend 0. Errors with `NotInY` when the profile
/// is not a staircase member of `Y`.
pub fn omega_of(delta: &DeltaProfile) -> Result<Vec<u32>> {
    let n = delta.blocks().len() as u32;
    if n == 0 || delta.blocks().iter().any(|block| block.len() != 1) {
        return Err(Error::NotInY);
    }
    let entries: Vec<u32> = delta.expanded();
    if entries.iter().enumerate().any(|(i, &d)| d > i as u32 + 1) {
        return Err(Error::NotInY);
    }
    let sig = staircase_signature(n)?;
    if !crate::extension::condition3(delta, &sig) {
        return Err(Error::NotInY);
    }
    let norm = delta.norm() as usize; // >= 1 for members of Y
    let mut code = Vec::with_capacity(entries.len());
    code.push(0);
    for (i, &entry) in entries.iter().enumerate() {
        if i + 1 != norm {
            code.push(entry);
        }
    }
    debug_assert!(code.iter().enumerate().all(|(i, &t)| t <= i as u32));
    debug_assert!(code.iter().any(|&t| t > 0));
    Ok(code)
}

/// The four numbers of the max-jump identity for one `n`: brute-force jump
/// sum, closed-form jump sum, staircase class count, and the size of the
/// staircase `Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleIdentity {
    pub n: u32,
    pub brute: u64,
    pub closed: BigUint,
    pub classes: BigUint,
    pub y_size: u64,
    pub equal: bool,
}

impl TripleIdentity {
    pub fn to_json(&self) -> Value {
        let big = |v: &BigUint| {
            Value::Number(
                serde_json::Number::from_str(&v.to_string())
                    .expect("decimal digits parse as Number"),
            )
        };
        let mut object = Map::new();
        object.insert("n".into(), json!(self.n));
        object.insert("brute".into(), json!(self.brute));
        object.insert("closed".into(), big(&self.closed));
        object.insert("classes".into(), big(&self.classes));
        object.insert("y_size".into(), json!(self.y_size));
        object.insert("equal".into(), json!(self.equal));
        Value::Object(object)
    }
}

/// Computes and compares all four quantities; `enum_cap` bounds the
/// staircase profile enumeration, which needs `(n+1)!` candidates.
pub fn verify_triple_identity(n: u32, enum_cap: u64) -> Result<TripleIdentity> {
    let brute = jump_sum_brute(n)?;
    let closed = jump_sum_closed(n)?;
    let sig = staircase_signature(n)?;
    let classes = count_classes_closed_form(&sig).total;
    let y_size = enumerate_Y(&sig, enum_cap)?.len() as u64;
    let equal = BigUint::from(brute) == closed
        && closed == classes
        && classes == BigUint::from(y_size);
    Ok(TripleIdentity {
        n,
        brute,
        closed,
        classes,
        y_size,
        equal,
    })
}
