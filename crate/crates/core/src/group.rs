//! Finite abelian groups as direct sums of cyclic prime-power factors.
//!
//! A p-group is written as a [`PrimePowerSignature`]: a prime `p` together
//! with blocks `(m_i, lambda_i)` meaning `lambda_i` copies of `Z(p^{m_i})`,
//! exponents strictly increasing. "Expanded" coordinates flatten the blocks
//! into a list of exponents `M_1 <= ... <= M_N` with `N = sum(lambda_i)`.
//!
//! Composite groups arrive as a list of cyclic moduli ([`CompositeGroupSpec`])
//! and decompose into p-primary signatures by the Chinese remainder theorem
//! ([`crt_decompose`]).

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// Default cap on group order for element-level enumerations.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 20;

// ---------------------------------------------------------------------------
// modular arithmetic helpers
// ---------------------------------------------------------------------------

/// Trial-division primality test; group orders at desk scale are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// p^e as u64, requiring the result to fit a machine word with headroom
/// for modular addition (strictly below 2^63).
fn checked_prime_power(p: u64, e: u32) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc
            .checked_mul(p)
            .filter(|&v| v < (1u64 << 63))
            .ok_or(Error::Overflow { p, exponent: e })?;
    }
    Ok(acc)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    (a + b) % m
}

/// Inverse of `a` modulo `m` for `a` coprime to `m` (extended Euclid).
fn inv_mod(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "inputs must be coprime");
    old_s.rem_euclid(m as i128) as u64
}

/// Largest k with p^k dividing x, for x != 0.
fn raw_valuation(mut x: u64, p: u64) -> u32 {
    debug_assert!(x != 0);
    let mut k = 0;
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    k
}

/// p-adic valuation of a residue `x` in `Z(p^r)`, with `v_p(0) = r`.
pub fn valuation(x: u64, p: u64, r: u32) -> Result<u32> {
    let modulus = checked_prime_power(p, r)?;
    if x >= modulus {
        return Err(Error::OutOfRange {
            what: format!("residue {x} is not reduced modulo {p}^{r}"),
        });
    }
    if x == 0 {
        return Ok(r);
    }
    Ok(raw_valuation(x, p))
}

/// Euler's totient of p^k: 1 for k = 0, else p^{k-1}(p-1).
pub fn euler_phi_prime_power(p: u64, k: u32) -> BigUint {
    if k == 0 {
        BigUint::one()
    } else {
        BigUint::from(p).pow(k - 1) * BigUint::from(p - 1)
    }
}

// ---------------------------------------------------------------------------
// signatures
// ---------------------------------------------------------------------------

/// One block of a p-primary decomposition: `Z(p^exponent)^multiplicity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignaturePart {
    pub exponent: u32,
    pub multiplicity: u32,
}

/// A finite abelian p-group in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimePowerSignature {
    p: u64,
    parts: Vec<SignaturePart>,
    /// Exponent of each expanded coordinate, nondecreasing.
    expanded: Vec<u32>,
    /// p^{M_i} for each expanded coordinate.
    moduli: Vec<u64>,
}

/// Builds a signature from raw `(exponent, multiplicity)` pairs: sorts by
/// exponent, merges equal exponents, drops zero-exponent blocks, and rejects
/// non-prime `p` or an empty result.
pub fn normalize_signature(p: u64, raw: &[(u32, u32)]) -> Result<PrimePowerSignature> {
    if !is_prime(p) {
        return Err(Error::NonPrime { p });
    }
    let mut merged: BTreeMap<u32, u64> = BTreeMap::new();
    for &(exponent, multiplicity) in raw {
        if multiplicity == 0 {
            return Err(Error::OutOfRange {
                what: "zero multiplicity".into(),
            });
        }
        if exponent > 0 {
            *merged.entry(exponent).or_insert(0) += multiplicity as u64;
        }
    }
    let parts: Vec<SignaturePart> = merged
        .into_iter()
        .map(|(exponent, multiplicity)| {
            u32::try_from(multiplicity)
                .map(|multiplicity| SignaturePart {
                    exponent,
                    multiplicity,
                })
                .map_err(|_| Error::OutOfRange {
                    what: "multiplicity overflow".into(),
                })
        })
        .collect::<Result<_>>()?;
    if parts.is_empty() {
        return Err(Error::EmptySignature);
    }
    let mut expanded = Vec::new();
    for part in &parts {
        expanded.extend(std::iter::repeat(part.exponent).take(part.multiplicity as usize));
    }
    let moduli = expanded
        .iter()
        .map(|&m| checked_prime_power(p, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(PrimePowerSignature {
        p,
        parts,
        expanded,
        moduli,
    })
}

impl PrimePowerSignature {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn parts(&self) -> &[SignaturePart] {
        &self.parts
    }

    /// Number of blocks `n`.
    pub fn block_count(&self) -> usize {
        self.parts.len()
    }

    /// Exponents `M_i` of the expanded coordinates, nondecreasing.
    pub fn expanded_exponents(&self) -> &[u32] {
        &self.expanded
    }

    /// p^{M_i} for each expanded coordinate.
    pub fn coordinate_moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// Expanded length `N = sum(lambda_i)`.
    pub fn expanded_len(&self) -> usize {
        self.expanded.len()
    }

    /// Prefix sums of multiplicities: `|lambda|_j` for j = 1..=n (1-based).
    pub fn multiplicity_prefix(&self, j: usize) -> u32 {
        self.parts[..j].iter().map(|part| part.multiplicity).sum()
    }

    /// Largest block exponent `m_n`.
    pub fn max_exponent(&self) -> u32 {
        self.parts.last().map(|part| part.exponent).unwrap_or(0)
    }

    pub fn order(&self) -> BigUint {
        self.moduli.iter().map(|&m| BigUint::from(m)).product()
    }

    /// Group order as a machine word, if it fits.
    pub fn order_u64(&self) -> Option<u64> {
        self.moduli
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(m))
    }

    /// True when the group is homocyclic (a single block).
    pub fn is_homocyclic(&self) -> bool {
        self.parts.len() == 1
    }

    /// Block index (0-based) owning expanded coordinate `i`.
    pub fn block_of_coordinate(&self, i: usize) -> usize {
        let mut rest = i;
        for (b, part) in self.parts.iter().enumerate() {
            if rest < part.multiplicity as usize {
                return b;
            }
            rest -= part.multiplicity as usize;
        }
        unreachable!("coordinate index out of range")
    }

    /// Mixed-radix index of an element, lexicographic in the coordinates.
    pub fn element_index(&self, g: &GroupElement) -> u64 {
        self.moduli
            .iter()
            .zip(g.coords.iter())
            .fold(0u64, |acc, (&m, &c)| acc * m + c)
    }

    /// Inverse of [`element_index`](Self::element_index).
    pub fn element_at(&self, mut index: u64) -> GroupElement {
        let mut coords = vec![0u64; self.moduli.len()];
        for (slot, &m) in coords.iter_mut().zip(self.moduli.iter()).rev() {
            *slot = index % m;
            index /= m;
        }
        GroupElement { coords }
    }
}

impl fmt::Display for PrimePowerSignature {
    /// Renders the parseable p-primary form, e.g. `p=2: 4^1+32^1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={}: ", self.p)?;
        for (i, part) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            let q = self.p.pow(part.exponent);
            write!(f, "{}^{}", q, part.multiplicity)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// elements
// ---------------------------------------------------------------------------

/// An element of a p-group, one residue per expanded coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl GroupElement {
    pub fn new(coords: Vec<u64>, sig: &PrimePowerSignature) -> Result<Self> {
        if coords.len() != sig.expanded_len() {
            return Err(Error::OutOfRange {
                what: format!(
                    "element has {} coordinates, group has {}",
                    coords.len(),
                    sig.expanded_len()
                ),
            });
        }
        for (i, (&c, &m)) in coords.iter().zip(sig.coordinate_moduli()).enumerate() {
            if c >= m {
                return Err(Error::OutOfRange {
                    what: format!("coordinate {i} is {c}, modulus is {m}"),
                });
            }
        }
        Ok(GroupElement { coords })
    }

    pub fn zero(sig: &PrimePowerSignature) -> Self {
        GroupElement {
            coords: vec![0; sig.expanded_len()],
        }
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &GroupElement, sig: &PrimePowerSignature) -> GroupElement {
        let coords = self
            .coords
            .iter()
            .zip(other.coords.iter())
            .zip(sig.coordinate_moduli())
            .map(|((&a, &b), &m)| add_mod(a, b, m))
            .collect();
        GroupElement { coords }
    }

    pub fn scalar_mul(&self, k: u64, sig: &PrimePowerSignature) -> GroupElement {
        let coords = self
            .coords
            .iter()
            .zip(sig.coordinate_moduli())
            .map(|(&c, &m)| mul_mod(k % m, c, m))
            .collect();
        GroupElement { coords }
    }

    /// Per-coordinate valuations `v_p(g_i)`.
    pub fn valuations(&self, sig: &PrimePowerSignature) -> Vec<u32> {
        self.coords
            .iter()
            .zip(sig.expanded_exponents())
            .map(|(&c, &m)| {
                if c == 0 {
                    m
                } else {
                    raw_valuation(c, sig.p)
                }
            })
            .collect()
    }
}

/// Exponent `u` with `order(g) = p^u`, computed as `max_i (M_i - v_p(g_i))`.
pub fn element_order_exponent(g: &GroupElement, sig: &PrimePowerSignature) -> u32 {
    g.coords
        .iter()
        .zip(sig.expanded_exponents())
        .map(|(&c, &m)| {
            if c == 0 {
                0
            } else {
                m - raw_valuation(c, sig.p)
            }
        })
        .max()
        .unwrap_or(0)
}

/// Iterates every element of the group in index order.
pub(crate) fn elements(sig: &PrimePowerSignature) -> impl Iterator<Item = GroupElement> + '_ {
    let mut coords = vec![0u64; sig.expanded_len()];
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let current = GroupElement {
            coords: coords.clone(),
        };
        // odometer increment, least significant coordinate last
        done = true;
        for (slot, &m) in coords.iter_mut().zip(sig.coordinate_moduli()).rev() {
            *slot += 1;
            if *slot < m {
                done = false;
                break;
            }
            *slot = 0;
        }
        Some(current)
    })
}

// ---------------------------------------------------------------------------
// cyclic subgroups
// ---------------------------------------------------------------------------

/// A cyclic subgroup, keyed by its canonical (lexicographically smallest)
/// generator, together with the valuation vector `alpha_i = v_p(h_i)` and
/// the order exponent `u = max_i (M_i - alpha_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicSubgroupDescriptor {
    generator: GroupElement,
    alpha: Vec<u32>,
    order_exponent: u32,
}

impl CyclicSubgroupDescriptor {
    /// Descriptor of the subgroup generated by `g` (any generator).
    pub fn generated_by(g: &GroupElement, sig: &PrimePowerSignature) -> Self {
        let generator = canonical_generator(g, sig);
        let alpha = generator.valuations(sig);
        let order_exponent = element_order_exponent(&generator, sig);
        CyclicSubgroupDescriptor {
            generator,
            alpha,
            order_exponent,
        }
    }

    pub fn trivial(sig: &PrimePowerSignature) -> Self {
        Self::generated_by(&GroupElement::zero(sig), sig)
    }

    pub fn generator(&self) -> &GroupElement {
        &self.generator
    }

    pub fn alpha(&self) -> &[u32] {
        &self.alpha
    }

    pub fn order_exponent(&self) -> u32 {
        self.order_exponent
    }

    pub fn is_trivial(&self) -> bool {
        self.order_exponent == 0
    }
}

/// Lexicographically smallest generator of `<g>` among `k*g` for units `k`.
///
/// Minimizes coordinates left to right, maintaining the coset of multipliers
/// `k = k0 (mod p^c)` that attain the minimum so far; each coordinate either
/// pins more p-adic digits of `k` or leaves the coset unchanged.
pub fn canonical_generator(g: &GroupElement, sig: &PrimePowerSignature) -> GroupElement {
    let u = element_order_exponent(g, sig);
    if u == 0 {
        return GroupElement::zero(sig);
    }
    let p = sig.p();
    let mut k0: u64 = 1;
    let mut c: u32 = 0;
    let mut best = Vec::with_capacity(sig.expanded_len());
    for (i, &gi) in g.coords.iter().enumerate() {
        let mi = sig.expanded[i];
        let modulus = sig.moduli[i];
        if gi == 0 {
            best.push(0);
            continue;
        }
        let ai = raw_valuation(gi, p);
        let p_ai = modulus / checked_prime_power(p, mi - ai).expect("submodulus fits");
        let unit = gi / p_ai;
        if c == 0 {
            // any unit multiplier: k*g_i sweeps all residues of valuation a_i
            let e = mi - ai;
            let pe = checked_prime_power(p, e).expect("submodulus fits");
            k0 = inv_mod(unit % pe, pe);
            c = e;
            best.push(p_ai);
        } else {
            let cur = mul_mod(k0, gi, modulus);
            let reach = c.saturating_add(ai);
            if reach >= mi {
                best.push(cur);
            } else {
                let pe = checked_prime_power(p, reach).expect("submodulus fits");
                let min_value = cur % pe;
                best.push(min_value);
                // pin k so that k*g_i = min_value (mod p^{m_i})
                let tail_mod = modulus / pe; // p^{m_i - reach}
                let diff = (cur - min_value) / pe;
                let target = (tail_mod - diff % tail_mod) % tail_mod;
                let s0 = mul_mod(target, inv_mod(unit % tail_mod, tail_mod), tail_mod);
                let pc = checked_prime_power(p, c).expect("submodulus fits");
                k0 += pc * s0;
                c = mi - ai;
            }
        }
    }
    GroupElement { coords: best }
}

/// Every distinct cyclic subgroup of the group, trivial subgroup included,
/// sorted by canonical generator. Errors with `CapExceeded` when the group
/// order exceeds `cap`.
pub fn enumerate_cyclic_subgroups(
    sig: &PrimePowerSignature,
    cap: u64,
) -> Result<Vec<CyclicSubgroupDescriptor>> {
    if sig.order_u64().filter(|&o| o <= cap).is_none() {
        return Err(Error::CapExceeded {
            what: "cyclic subgroup enumeration",
            required: sig.order(),
            cap,
        });
    }
    let mut seen: HashSet<u64> = HashSet::new();
    let mut generators = Vec::new();
    for g in elements(sig) {
        let canonical = canonical_generator(&g, sig);
        if seen.insert(sig.element_index(&canonical)) {
            generators.push(canonical);
        }
    }
    generators.sort();
    Ok(generators
        .into_iter()
        .map(|generator| {
            let alpha = generator.valuations(sig);
            let order_exponent = element_order_exponent(&generator, sig);
            CyclicSubgroupDescriptor {
                generator,
                alpha,
                order_exponent,
            }
        })
        .collect())
}

/// Total number of cyclic subgroups (trivial included), by the order census:
/// elements of order dividing p^k number `prod_i p^{min(k, M_i)}`, and each
/// cyclic subgroup of order p^k owns exactly phi(p^k) elements of that order.
pub fn count_cyclic_subgroups(sig: &PrimePowerSignature) -> BigUint {
    let p = sig.p();
    let mut total = BigUint::one();
    let mut prev = BigUint::one();
    for k in 1..=sig.max_exponent() {
        let exponent: u32 = sig
            .expanded_exponents()
            .iter()
            .map(|&m| m.min(k))
            .sum();
        let dividing = BigUint::from(p).pow(exponent);
        let exact = &dividing - &prev;
        total += exact / euler_phi_prime_power(p, k);
        prev = dividing;
    }
    total
}

// ---------------------------------------------------------------------------
// valuation profiles
// ---------------------------------------------------------------------------

/// The profile `delta_{i,j} = m_i - alpha_{i,j}` of a cyclic subgroup,
/// grouped into blocks matching the signature. Entries satisfy
/// `0 <= delta_{i,j} <= m_i`; the norm is the maximum entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeltaProfile {
    blocks: Vec<Vec<u32>>,
}

impl DeltaProfile {
    pub fn from_blocks(blocks: Vec<Vec<u32>>, sig: &PrimePowerSignature) -> Result<Self> {
        if blocks.len() != sig.block_count() {
            return Err(Error::OutOfRange {
                what: format!(
                    "profile has {} blocks, signature has {}",
                    blocks.len(),
                    sig.block_count()
                ),
            });
        }
        for (block, part) in blocks.iter().zip(sig.parts()) {
            if block.len() != part.multiplicity as usize {
                return Err(Error::OutOfRange {
                    what: "block length does not match multiplicity".into(),
                });
            }
            if block.iter().any(|&d| d > part.exponent) {
                return Err(Error::OutOfRange {
                    what: format!("profile entry exceeds block exponent {}", part.exponent),
                });
            }
        }
        Ok(DeltaProfile { blocks })
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    /// `||delta||`: the largest entry.
    pub fn norm(&self) -> u32 {
        self.blocks
            .iter()
            .flat_map(|block| block.iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// `||delta_i||` for 0-based block `i`.
    pub fn block_norm(&self, i: usize) -> u32 {
        self.blocks[i].iter().copied().max().unwrap_or(0)
    }

    /// Entries flattened to expanded-coordinate order.
    pub fn expanded(&self) -> Vec<u32> {
        self.blocks
            .iter()
            .flat_map(|block| block.iter().copied())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|block| block.iter().all(|&d| d == 0))
    }
}

/// The profile of a cyclic subgroup: `M_i - alpha_i` per expanded coordinate,
/// regrouped into blocks.
pub fn valuation_profile(
    subgroup: &CyclicSubgroupDescriptor,
    sig: &PrimePowerSignature,
) -> DeltaProfile {
    let mut blocks = Vec::with_capacity(sig.block_count());
    let mut offset = 0usize;
    for part in sig.parts() {
        let width = part.multiplicity as usize;
        let block = subgroup.alpha()[offset..offset + width]
            .iter()
            .map(|&alpha| part.exponent - alpha)
            .collect();
        blocks.push(block);
        offset += width;
    }
    DeltaProfile { blocks }
}

// ---------------------------------------------------------------------------
// composite groups and CRT decomposition
// ---------------------------------------------------------------------------

/// A finite abelian group given as a direct sum of cyclic factors `Z(m_i)`.
/// Trivial factors `Z(1)` are permitted and ignored by the decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompositeGroupSpec {
    moduli: Vec<u64>,
}

impl CompositeGroupSpec {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        if moduli.iter().any(|&m| m == 0) {
            return Err(Error::OutOfRange {
                what: "modulus 0 is not a cyclic factor".into(),
            });
        }
        Ok(CompositeGroupSpec { moduli })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// Moduli with trivial factors dropped.
    pub fn normalized_moduli(&self) -> Vec<u64> {
        self.moduli.iter().copied().filter(|&m| m > 1).collect()
    }

    pub fn order(&self) -> BigUint {
        self.moduli.iter().map(|&m| BigUint::from(m)).product()
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.moduli
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(m))
    }
}

impl fmt::Display for CompositeGroupSpec {
    /// Renders the parseable composite form, e.g. `Z(6)+Z(12)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return write!(f, "Z(1)");
        }
        for (i, m) in self.moduli.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "Z({m})")?;
        }
        Ok(())
    }
}

/// A group spec as accepted by the parsers: either a p-primary signature or
/// a composite list of cyclic factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    PPrimary(PrimePowerSignature),
    Composite(CompositeGroupSpec),
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::PPrimary(sig) => sig.fmt(f),
            GroupSpec::Composite(spec) => spec.fmt(f),
        }
    }
}

/// Prime factorization by trial division.
pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        factors.push((n, 1));
    }
    factors
}

/// p-primary components of a composite group: for each prime dividing some
/// modulus, the normalized signature of `G_p = directsum Z(p^{v_p(m_i)})`.
pub fn crt_decompose(spec: &CompositeGroupSpec) -> BTreeMap<u64, PrimePowerSignature> {
    let mut per_prime: BTreeMap<u64, Vec<(u32, u32)>> = BTreeMap::new();
    for &modulus in &spec.normalized_moduli() {
        for (p, e) in factorize(modulus) {
            per_prime.entry(p).or_default().push((e, 1));
        }
    }
    per_prime
        .into_iter()
        .map(|(p, raw)| {
            let sig = normalize_signature(p, &raw)
                .expect("factor exponents are positive and p is prime");
            (p, sig)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// signature universes (for sweeps and test families)
// ---------------------------------------------------------------------------

/// All normalized signatures with group order `p^E <= max_order`, sorted by
/// order and then lexicographically by parts.
pub fn enumerate_signatures(p: u64, max_order: u64) -> Result<Vec<PrimePowerSignature>> {
    if !is_prime(p) {
        return Err(Error::NonPrime { p });
    }
    let mut max_exponent = 0u32;
    let mut power = 1u64;
    while power <= max_order / p {
        power *= p;
        max_exponent += 1;
    }
    let mut out = Vec::new();
    for total in 1..=max_exponent {
        let mut raw_partitions = Vec::new();
        ascending_partitions(total, 1, &mut Vec::new(), &mut raw_partitions);
        let mut sigs: Vec<PrimePowerSignature> = raw_partitions
            .into_iter()
            .map(|partition| {
                let raw: Vec<(u32, u32)> = partition.into_iter().map(|m| (m, 1)).collect();
                normalize_signature(p, &raw)
            })
            .collect::<Result<_>>()?;
        sigs.sort_by(|a, b| a.parts.cmp(&b.parts));
        out.extend(sigs);
    }
    Ok(out)
}

fn ascending_partitions(rest: u32, min: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if rest == 0 {
        out.push(prefix.clone());
        return;
    }
    for next in min..=rest {
        prefix.push(next);
        ascending_partitions(rest - next, next, prefix, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sig(p: u64, raw: &[(u32, u32)]) -> PrimePowerSignature {
        normalize_signature(p, raw).unwrap()
    }

    #[test]
    fn normalize_sorts_parts() {
        let s = sig(2, &[(5, 1), (2, 1)]);
        assert_eq!(
            s.parts(),
            &[
                SignaturePart { exponent: 2, multiplicity: 1 },
                SignaturePart { exponent: 5, multiplicity: 1 },
            ]
        );
    }

    #[test]
    fn normalize_merges_equal_exponents() {
        let s = sig(3, &[(2, 1), (2, 2)]);
        assert_eq!(
            s.parts(),
            &[SignaturePart { exponent: 2, multiplicity: 3 }]
        );
    }

    #[test]
    fn normalize_rejects_non_prime() {
        assert_eq!(
            normalize_signature(4, &[(1, 1)]),
            Err(Error::NonPrime { p: 4 })
        );
    }

    #[test]
    fn normalize_rejects_empty() {
        assert_eq!(normalize_signature(2, &[]), Err(Error::EmptySignature));
        assert_eq!(
            normalize_signature(2, &[(0, 3)]),
            Err(Error::EmptySignature)
        );
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(12, 2, 5).unwrap(), 2);
        assert_eq!(valuation(0, 3, 4).unwrap(), 4);
        assert!(matches!(
            valuation(9, 3, 2),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn order_exponent_examples() {
        let s = sig(2, &[(2, 1), (5, 1)]);
        let zero = GroupElement::zero(&s);
        assert_eq!(element_order_exponent(&zero, &s), 0);
        let g = GroupElement::new(vec![2, 2], &s).unwrap();
        assert_eq!(element_order_exponent(&g, &s), 4);
        let g = GroupElement::new(vec![1, 0], &s).unwrap();
        assert_eq!(element_order_exponent(&g, &s), 2);
    }

    /// Independent order check: repeated addition until the element vanishes.
    fn order_exponent_by_addition(g: &GroupElement, s: &PrimePowerSignature) -> u32 {
        let mut acc = g.clone();
        let mut k = 0;
        while !acc.is_zero() {
            acc = acc.scalar_mul(s.p(), s);
            k += 1;
        }
        k
    }

    #[test]
    fn crt_decompose_examples() {
        let spec = CompositeGroupSpec::new(vec![6, 12]).unwrap();
        let map = crt_decompose(&spec);
        assert_eq!(map.len(), 2);
        assert_eq!(map[&2], sig(2, &[(1, 1), (2, 1)]));
        assert_eq!(map[&3], sig(3, &[(1, 2)]));

        let spec = CompositeGroupSpec::new(vec![5]).unwrap();
        let map = crt_decompose(&spec);
        assert_eq!(map.len(), 1);
        assert_eq!(map[&5], sig(5, &[(1, 1)]));

        let spec = CompositeGroupSpec::new(vec![1, 1]).unwrap();
        assert!(crt_decompose(&spec).is_empty());
    }

    #[test]
    fn crt_orders_multiply_back() {
        for moduli in [vec![6, 12], vec![30], vec![8, 9, 5], vec![1, 14, 21]] {
            let spec = CompositeGroupSpec::new(moduli).unwrap();
            let product: BigUint = crt_decompose(&spec)
                .values()
                .map(|component| component.order())
                .product();
            let expected: BigUint = spec
                .normalized_moduli()
                .iter()
                .map(|&m| BigUint::from(m))
                .product();
            assert_eq!(product, expected);
        }
    }

    #[test]
    fn enumerate_subgroups_examples() {
        let s = sig(3, &[(1, 2)]);
        assert_eq!(enumerate_cyclic_subgroups(&s, 1 << 20).unwrap().len(), 5);

        let s = sig(2, &[(1, 1), (2, 1)]);
        let subs = enumerate_cyclic_subgroups(&s, 1 << 20).unwrap();
        assert_eq!(subs.len(), 6);
        let mut orders: Vec<u32> = subs.iter().map(|h| h.order_exponent()).collect();
        orders.sort();
        assert_eq!(orders, vec![0, 1, 1, 1, 2, 2]);

        for r in 1..=6u32 {
            let s = sig(2, &[(r, 1)]);
            assert_eq!(
                enumerate_cyclic_subgroups(&s, 1 << 20).unwrap().len(),
                r as usize + 1
            );
        }
    }

    #[test]
    fn enumerate_subgroups_respects_cap() {
        let s = sig(2, &[(5, 1)]);
        assert!(matches!(
            enumerate_cyclic_subgroups(&s, 16),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn subgroup_element_sets_are_distinct() {
        // exhaustive duplicate check at desk scale
        for s in [sig(2, &[(1, 2), (2, 1)]), sig(3, &[(1, 1), (2, 1)]), sig(2, &[(2, 2)])] {
            let subs = enumerate_cyclic_subgroups(&s, 1 << 20).unwrap();
            let mut element_sets: Vec<Vec<u64>> = Vec::new();
            for h in &subs {
                let mut members: Vec<u64> = Vec::new();
                let mut acc = GroupElement::zero(&s);
                loop {
                    members.push(s.element_index(&acc));
                    acc = acc.add(h.generator(), &s);
                    if acc.is_zero() {
                        members.push(s.element_index(&acc));
                        break;
                    }
                }
                members.sort();
                members.dedup();
                element_sets.push(members);
            }
            let before = element_sets.len();
            element_sets.sort();
            element_sets.dedup();
            assert_eq!(element_sets.len(), before);
        }
    }

    #[test]
    fn census_count_matches_enumeration() {
        for s in [
            sig(3, &[(1, 2)]),
            sig(2, &[(1, 1), (2, 1)]),
            sig(2, &[(2, 1), (5, 1)]),
            sig(2, &[(1, 3)]),
            sig(5, &[(1, 1), (2, 1)]),
        ] {
            let enumerated = enumerate_cyclic_subgroups(&s, 1 << 20).unwrap().len();
            assert_eq!(count_cyclic_subgroups(&s), BigUint::from(enumerated));
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi_prime_power(2, 0), BigUint::from(1u32));
        assert_eq!(euler_phi_prime_power(3, 2), BigUint::from(6u32));
        assert_eq!(euler_phi_prime_power(5, 1), BigUint::from(4u32));
    }

    #[test]
    fn profile_examples() {
        let s = sig(2, &[(2, 1), (5, 1)]);
        let h = CyclicSubgroupDescriptor::generated_by(
            &GroupElement::new(vec![2, 2], &s).unwrap(),
            &s,
        );
        let delta = valuation_profile(&h, &s);
        assert_eq!(delta.blocks(), &[vec![1], vec![4]]);
        assert_eq!(delta.norm(), 4);

        let trivial = CyclicSubgroupDescriptor::trivial(&s);
        assert!(valuation_profile(&trivial, &s).is_zero());

        let s = sig(2, &[(1, 1), (2, 1)]);
        let h = CyclicSubgroupDescriptor::generated_by(
            &GroupElement::new(vec![0, 2], &s).unwrap(),
            &s,
        );
        assert_eq!(valuation_profile(&h, &s).blocks(), &[vec![0], vec![1]]);
    }

    /// Reference canonicalizer: scan every unit multiplier.
    fn canonical_naive(g: &GroupElement, s: &PrimePowerSignature) -> GroupElement {
        let u = element_order_exponent(g, s);
        if u == 0 {
            return GroupElement::zero(s);
        }
        let pu = s.p().pow(u);
        (1..pu)
            .filter(|k| k % s.p() != 0)
            .map(|k| g.scalar_mul(k, s))
            .min()
            .unwrap()
    }

    #[test]
    fn canonical_generator_is_lex_min() {
        for s in [
            sig(2, &[(1, 1), (2, 1)]),
            sig(2, &[(2, 1), (3, 1)]),
            sig(3, &[(1, 1), (2, 1)]),
            sig(2, &[(1, 2), (3, 1)]),
            sig(5, &[(2, 1)]),
        ] {
            for g in elements(&s) {
                assert_eq!(
                    canonical_generator(&g, &s),
                    canonical_naive(&g, &s),
                    "element {:?} of {}",
                    g,
                    s
                );
            }
        }
    }

    #[test]
    fn signature_universe_is_sorted_and_complete() {
        let sigs = enumerate_signatures(2, 16).unwrap();
        let rendered: Vec<String> = sigs.iter().map(|s| s.to_string()).collect();
        assert_eq!(
            rendered,
            vec![
                "p=2: 2^1",
                "p=2: 2^2",
                "p=2: 4^1",
                "p=2: 2^1+4^1",
                "p=2: 2^3",
                "p=2: 8^1",
                "p=2: 2^1+8^1",
                "p=2: 2^2+4^1",
                "p=2: 2^4",
                "p=2: 4^2",
                "p=2: 16^1",
            ]
        );
    }

    proptest! {
        #[test]
        fn order_exponent_matches_addition(
            coords in proptest::collection::vec(0u64..64, 3),
        ) {
            let s = sig(2, &[(1, 1), (2, 1), (6, 1)]);
            let reduced: Vec<u64> = coords
                .iter()
                .zip(s.coordinate_moduli())
                .map(|(&c, &m)| c % m)
                .collect();
            let g = GroupElement::new(reduced, &s).unwrap();
            let u = element_order_exponent(&g, &s);
            prop_assert_eq!(u, order_exponent_by_addition(&g, &s));
            prop_assert!(g.scalar_mul(2u64.pow(u), &s).is_zero());
            if u > 0 {
                prop_assert!(!g.scalar_mul(2u64.pow(u - 1), &s).is_zero());
            }
        }

        #[test]
        fn canonical_generator_is_generator_invariant(
            coords in proptest::collection::vec(0u64..24, 2),
            k in 1u64..100,
        ) {
            let s = sig(3, &[(1, 1), (3, 1)]);
            let reduced: Vec<u64> = coords
                .iter()
                .zip(s.coordinate_moduli())
                .map(|(&c, &m)| c % m)
                .collect();
            let g = GroupElement::new(reduced, &s).unwrap();
            let k = if k % 3 == 0 { k + 1 } else { k };
            let same_subgroup = g.scalar_mul(k, &s);
            let u = element_order_exponent(&g, &s);
            // k coprime to p keeps the generated subgroup intact
            prop_assert_eq!(element_order_exponent(&same_subgroup, &s), u);
            prop_assert_eq!(
                canonical_generator(&g, &s),
                canonical_generator(&same_subgroup, &s)
            );
        }
    }
}
