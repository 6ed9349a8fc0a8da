//! Extendability of homomorphisms from cyclic subgroups.
//!
//! For a cyclic subgroup `H = <h>` of order `p^u` with coordinate valuations
//! `alpha_l = v_p(h_l)`, a homomorphism `f: H -> G` is determined by the
//! image `x = f(h)` with `p^u x = 0`, written `v_p(x_i) = beta_i +
//! max(0, M_i - u)`. The valuation criterion says `f` extends to an
//! endomorphism of `G` unless some coordinate `s` satisfies
//!
//! ```text
//! beta_s + max(0, M_s - u)  <  min_l ( alpha_l + max(0, M_s - M_l) )
//! ```
//!
//! and `H` carries some non-extendable homomorphism exactly when the same
//! inequality holds with `beta_s = 0`. Both predicates are implemented here
//! together with a brute-force oracle that searches the full endomorphism
//! ring, so each route can check the other.
//!
//! The same inequality, rewritten through `delta_l = M_l - alpha_l`, becomes
//! the membership conditions 1-3 on profiles used by the counting module.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::group::{
    CyclicSubgroupDescriptor, DeltaProfile, GroupElement, PrimePowerSignature,
};

/// Default cap on the number of endomorphism tables the oracle will scan.
pub const DEFAULT_ENDOMORPHISM_CAP: u64 = 1 << 24;

// ---------------------------------------------------------------------------
// homomorphisms from a cyclic subgroup
// ---------------------------------------------------------------------------

/// A homomorphism `f: H -> G`, stored as the image of the canonical
/// generator plus the derived slack exponents `beta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomomorphismDescriptor {
    source: CyclicSubgroupDescriptor,
    image: GroupElement,
    beta: Vec<u32>,
}

impl HomomorphismDescriptor {
    /// Requires `p^u * image = 0`; derives `beta_i = v_p(x_i) - max(0, M_i - u)`.
    pub fn new(
        source: CyclicSubgroupDescriptor,
        image: GroupElement,
        sig: &PrimePowerSignature,
    ) -> Result<Self> {
        let u = source.order_exponent();
        let image_valuations = image.valuations(sig);
        let beta = image_valuations
            .iter()
            .zip(sig.expanded_exponents())
            .enumerate()
            .map(|(i, (&v, &m))| {
                let floor = m.saturating_sub(u);
                v.checked_sub(floor).ok_or_else(|| Error::OutOfRange {
                    what: format!(
                        "image coordinate {i} has valuation {v}, below {floor}; \
                         the image order does not divide the generator order"
                    ),
                })
            })
            .collect::<Result<Vec<u32>>>()?;
        Ok(HomomorphismDescriptor {
            source,
            image,
            beta,
        })
    }

    pub fn source(&self) -> &CyclicSubgroupDescriptor {
        &self.source
    }

    pub fn image(&self) -> &GroupElement {
        &self.image
    }

    pub fn beta(&self) -> &[u32] {
        &self.beta
    }
}

/// Number of elements killed by `p^e`: `prod_i p^{min(e, M_i)}`.
pub fn kernel_size(sig: &PrimePowerSignature, e: u32) -> u64 {
    sig.expanded_exponents()
        .iter()
        .map(|&m| sig.p().pow(m.min(e)))
        .product()
}

/// Streams every homomorphism `H -> G`, one per admissible generator image;
/// their number is `prod_i p^{min(u, M_i)}`. Errors with `CapExceeded` when
/// the group order exceeds `cap`.
pub fn enumerate_homs<'a>(
    subgroup: &'a CyclicSubgroupDescriptor,
    sig: &'a PrimePowerSignature,
    cap: u64,
) -> Result<impl Iterator<Item = HomomorphismDescriptor> + 'a> {
    if sig.order_u64().filter(|&o| o <= cap).is_none() {
        return Err(Error::CapExceeded {
            what: "homomorphism enumeration",
            required: sig.order(),
            cap,
        });
    }
    let u = subgroup.order_exponent();
    Ok(kernel_elements(sig, u).map(move |image| {
        HomomorphismDescriptor::new(subgroup.clone(), image, sig)
            .expect("kernel elements are admissible images")
    }))
}

/// Elements `x` with `p^e x = 0`, in index order.
pub(crate) fn kernel_elements(
    sig: &PrimePowerSignature,
    e: u32,
) -> impl Iterator<Item = GroupElement> + '_ {
    let steps: Vec<u64> = sig
        .expanded_exponents()
        .iter()
        .map(|&m| sig.p().pow(m.saturating_sub(e)))
        .collect();
    let mut coords = vec![0u64; sig.expanded_len()];
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let current = GroupElement::new(coords.clone(), sig).expect("kernel coords reduced");
        done = true;
        for ((slot, &step), &m) in coords
            .iter_mut()
            .zip(steps.iter())
            .zip(sig.coordinate_moduli())
            .rev()
        {
            *slot += step;
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
// the endomorphism ring
// ---------------------------------------------------------------------------

/// An endomorphism of `G`, stored column-wise: `columns[l] = F(e_l)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndomorphismTable {
    columns: Vec<GroupElement>,
}

impl EndomorphismTable {
    pub fn columns(&self) -> &[GroupElement] {
        &self.columns
    }

    /// `F(g) = sum_l g_l F(e_l)`.
    pub fn apply(&self, g: &GroupElement, sig: &PrimePowerSignature) -> GroupElement {
        let mut acc = GroupElement::zero(sig);
        for (&gl, column) in g.coords().iter().zip(self.columns.iter()) {
            acc = acc.add(&column.scalar_mul(gl, sig), sig);
        }
        acc
    }
}

/// Number of endomorphism tables: `prod_l prod_i p^{min(M_l, M_i)}`.
pub fn endomorphism_space_size(sig: &PrimePowerSignature) -> BigUint {
    let exponent: u64 = sig
        .expanded_exponents()
        .iter()
        .map(|&ml| {
            sig.expanded_exponents()
                .iter()
                .map(|&mi| u64::from(mi.min(ml)))
                .sum::<u64>()
        })
        .sum();
    BigUint::from(sig.p()).pow(u32::try_from(exponent).expect("endomorphism exponent fits u32"))
}

fn endomorphism_count_checked(
    sig: &PrimePowerSignature,
    cap: u64,
    what: &'static str,
) -> Result<u64> {
    let size = endomorphism_space_size(sig);
    u64::try_from(&size)
        .ok()
        .filter(|&n| n <= cap)
        .ok_or(Error::CapExceeded {
            what,
            required: size,
            cap,
        })
}

/// Streams every endomorphism exactly once, as independent column choices:
/// column `l` ranges over the elements killed by `p^{M_l}`.
pub fn enumerate_endomorphisms(
    sig: &PrimePowerSignature,
    cap: u64,
) -> Result<impl Iterator<Item = EndomorphismTable> + '_> {
    let total = endomorphism_count_checked(sig, cap, "endomorphism enumeration")?;
    let n = sig.expanded_len();
    // digit (l, j): coordinate j of column l, stepping by p^{max(0, M_j - M_l)}
    let mut steps = Vec::with_capacity(n * n);
    for l in 0..n {
        let ml = sig.expanded_exponents()[l];
        for j in 0..n {
            let mj = sig.expanded_exponents()[j];
            steps.push((l, j, sig.p().pow(mj.saturating_sub(ml))));
        }
    }
    let mut columns = vec![GroupElement::zero(sig); n];
    let mut remaining = total;
    Ok(std::iter::from_fn(move || {
        if remaining == 0 {
            return None;
        }
        remaining -= 1;
        let current = EndomorphismTable {
            columns: columns.clone(),
        };
        for &(l, j, step) in &steps {
            let modulus = sig.coordinate_moduli()[j];
            let mut coords: Vec<u64> = columns[l].coords().to_vec();
            coords[j] = (coords[j] + step) % modulus;
            let wrapped = coords[j] == 0;
            columns[l] = GroupElement::new(coords, sig).expect("column coords reduced");
            if !wrapped {
                break;
            }
        }
        Some(current)
    }))
}

// ---------------------------------------------------------------------------
// brute-force oracle
// ---------------------------------------------------------------------------

/// Mixed-radix scan over the images `sum_l h_l F(e_l)` of all endomorphism
/// tables, maintaining the running image with one modular addition per digit
/// step; the visitor receives the packed element index of each image. Digits
/// whose contribution vanishes (coordinates of `h_l * F(e_l)` that are zero
/// for every column choice) are collapsed, which leaves the set of visited
/// images unchanged. Stops early when `visit` returns true.
fn scan_images<V>(
    subgroup: &CyclicSubgroupDescriptor,
    sig: &PrimePowerSignature,
    cap: u64,
    what: &'static str,
    mut visit: V,
) -> Result<bool>
where
    V: FnMut(u64) -> bool,
{
    endomorphism_count_checked(sig, cap, what)?;
    let n = sig.expanded_len();
    let h = subgroup.generator().coords();
    let moduli = sig.coordinate_moduli();
    // index weight of coordinate j in the mixed-radix element packing
    let mut weights = vec![1u64; n];
    for j in (0..n.saturating_sub(1)).rev() {
        weights[j] = weights[j + 1] * moduli[j + 1];
    }
    // digit (l, j) has radix p^{min(M_l, M_j)}; each increment adds
    // h_l * p^{max(0, M_j - M_l)} to image coordinate j, and a full cycle
    // adds a multiple of p^{M_j}, so the wrap step needs no correction.
    struct Digit {
        coord: usize,
        radix: u64,
        value: u64,
        add: u64,
        weight: u64,
    }
    let mut digits = Vec::new();
    for l in 0..n {
        let ml = sig.expanded_exponents()[l];
        for j in 0..n {
            let mj = sig.expanded_exponents()[j];
            let radix = sig.p().pow(mj.min(ml));
            let step = sig.p().pow(mj.saturating_sub(ml));
            let add = ((h[l] as u128 * step as u128) % moduli[j] as u128) as u64;
            if add != 0 {
                digits.push(Digit {
                    coord: j,
                    radix,
                    value: 0,
                    add,
                    weight: weights[j],
                });
            }
        }
    }
    let states: u64 = digits.iter().map(|d| d.radix).product();
    let mut sum = vec![0u64; n];
    let mut packed = 0u64;
    let mut remaining = states;
    loop {
        if visit(packed) {
            return Ok(true);
        }
        remaining -= 1;
        if remaining == 0 {
            return Ok(false);
        }
        for digit in digits.iter_mut() {
            digit.value += 1;
            let m = moduli[digit.coord];
            let old = sum[digit.coord];
            let new = (old + digit.add) % m;
            sum[digit.coord] = new;
            packed = packed.wrapping_add(new.wrapping_sub(old).wrapping_mul(digit.weight));
            if digit.value < digit.radix {
                break;
            }
            digit.value = 0; // contribution has cycled back to zero
        }
    }
}

/// Exhaustive-search extendability: true iff some endomorphism table `F`
/// satisfies `sum_l h_l F(e_l) = f(h)`.
pub fn is_extendable_oracle(
    f: &HomomorphismDescriptor,
    sig: &PrimePowerSignature,
    cap: u64,
) -> Result<bool> {
    let target = sig.element_index(f.image());
    scan_images(f.source(), sig, cap, "extendability oracle", |packed| {
        packed == target
    })
}

/// The set of generator images achieved by endomorphism tables, as a bitmap
/// over element indexes. One full oracle scan answers every homomorphism
/// from the subgroup at once.
#[derive(Debug, Clone)]
pub struct ImageSet {
    bits: Vec<u64>,
    achieved: u64,
}

impl ImageSet {
    pub fn contains_index(&self, index: u64) -> bool {
        let slot = (index / 64) as usize;
        let bit = index % 64;
        self.bits[slot] >> bit & 1 == 1
    }

    pub fn contains(&self, g: &GroupElement, sig: &PrimePowerSignature) -> bool {
        self.contains_index(sig.element_index(g))
    }

    /// Number of distinct achieved images.
    pub fn achieved_count(&self) -> u64 {
        self.achieved
    }
}

/// Runs the brute-force oracle once for a subgroup, recording every
/// achievable image of its canonical generator.
pub fn endomorphism_image_set(
    subgroup: &CyclicSubgroupDescriptor,
    sig: &PrimePowerSignature,
    cap: u64,
) -> Result<ImageSet> {
    let order = sig.order_u64().ok_or_else(|| Error::CapExceeded {
        what: "image bitmap",
        required: sig.order(),
        cap,
    })?;
    let mut bits = vec![0u64; (order as usize).div_ceil(64)];
    let mut achieved = 0u64;
    scan_images(subgroup, sig, cap, "extendability oracle", |index| {
        let slot = (index / 64) as usize;
        let mask = 1u64 << (index % 64);
        if bits[slot] & mask == 0 {
            bits[slot] |= mask;
            achieved += 1;
        }
        false
    })?;
    Ok(ImageSet { bits, achieved })
}

/// Oracle-route membership of `H` in `X(G)`: some homomorphism image is not
/// achieved by any endomorphism.
pub fn has_nonextendable_hom_oracle(
    subgroup: &CyclicSubgroupDescriptor,
    sig: &PrimePowerSignature,
    cap: u64,
) -> Result<bool> {
    let images = endomorphism_image_set(subgroup, sig, cap)?;
    Ok(images.achieved_count() < kernel_size(sig, subgroup.order_exponent()))
}

// ---------------------------------------------------------------------------
// valuation criterion
// ---------------------------------------------------------------------------

/// Extendability by the valuation criterion: `f` extends unless some
/// coordinate `s` has `beta_s + max(0, M_s - u) < min_l (alpha_l +
/// max(0, M_s - M_l))`.
pub fn is_extendable_formula(f: &HomomorphismDescriptor, sig: &PrimePowerSignature) -> bool {
    let u = f.source().order_exponent();
    let alpha = f.source().alpha();
    let beta = f.beta();
    let exponents = sig.expanded_exponents();
    !(0..exponents.len()).any(|s| {
        let lhs = beta[s] + exponents[s].saturating_sub(u);
        let rhs = alpha
            .iter()
            .zip(exponents)
            .map(|(&al, &ml)| al + exponents[s].saturating_sub(ml))
            .min()
            .expect("at least one coordinate");
        lhs < rhs
    })
}

/// Membership of `H` in `X(G)` by the valuation criterion: the inequality
/// above holds at `beta_s = 0` for some coordinate `s`.
pub fn has_nonextendable_hom(
    subgroup: &CyclicSubgroupDescriptor,
    sig: &PrimePowerSignature,
) -> bool {
    let u = subgroup.order_exponent();
    let alpha = subgroup.alpha();
    let exponents = sig.expanded_exponents();
    (0..exponents.len()).any(|s| {
        let lhs = exponents[s].saturating_sub(u);
        let rhs = alpha
            .iter()
            .zip(exponents)
            .map(|(&al, &ml)| al + exponents[s].saturating_sub(ml))
            .min()
            .expect("at least one coordinate");
        lhs < rhs
    })
}

// ---------------------------------------------------------------------------
// membership conditions on profiles
// ---------------------------------------------------------------------------

/// Condition 1, on a profile expanded to coordinates: there is some `s` with
/// `max(0, M_s - ||delta||) < min_l max(M_l - delta_l, M_s - delta_l)`.
pub fn condition1(delta: &[u32], sig: &PrimePowerSignature) -> bool {
    let exponents = sig.expanded_exponents();
    debug_assert_eq!(delta.len(), exponents.len());
    debug_assert!(delta.iter().zip(exponents).all(|(&d, &m)| d <= m));
    let norm = delta.iter().copied().max().unwrap_or(0);
    (0..exponents.len()).any(|s| {
        let lhs = (i64::from(exponents[s]) - i64::from(norm)).max(0);
        let rhs = delta
            .iter()
            .zip(exponents)
            .map(|(&dl, &ml)| {
                (i64::from(ml) - i64::from(dl)).max(i64::from(exponents[s]) - i64::from(dl))
            })
            .min()
            .expect("at least one coordinate");
        lhs < rhs
    })
}

/// Condition 2: the block-norm form of condition 1, quantified over blocks.
pub fn condition2(delta: &DeltaProfile, sig: &PrimePowerSignature) -> bool {
    let n = sig.block_count();
    debug_assert_eq!(delta.blocks().len(), n);
    let norm = delta.norm();
    (0..n).any(|s| {
        let ms = i64::from(sig.parts()[s].exponent);
        let lhs = (ms - i64::from(norm)).max(0);
        let rhs = (0..n)
            .map(|l| {
                let ml = i64::from(sig.parts()[l].exponent);
                let dl = i64::from(delta.block_norm(l));
                (ml - dl).max(ms - dl)
            })
            .min()
            .expect("at least one block");
        lhs < rhs
    })
}

/// The pivot block index of a profile (1-based): 1 when `||delta|| < m_1`,
/// otherwise the largest `s` with `m_s <= ||delta||`.
pub fn f_delta(delta: &DeltaProfile, sig: &PrimePowerSignature) -> usize {
    let norm = delta.norm();
    if norm < sig.parts()[0].exponent {
        return 1;
    }
    sig.parts()
        .iter()
        .rposition(|part| part.exponent <= norm)
        .expect("norm >= m_1")
        + 1
}

/// Condition 3, the case form used by the counting module:
/// - `||delta|| < m_1` requires `||delta_1|| < ||delta||`;
/// - `m_f = ||delta||` requires `||delta_f|| < m_f`;
/// - `m_f < ||delta||` requires `||delta_f|| < m_f` or `||delta_{f+1}|| < ||delta||`,
///
/// where `f = f_delta(delta)`.
pub fn condition3(delta: &DeltaProfile, sig: &PrimePowerSignature) -> bool {
    let block_norms: Vec<u32> = (0..sig.block_count())
        .map(|i| delta.block_norm(i))
        .collect();
    condition3_from_norms(delta.norm(), &block_norms, sig)
}

/// Condition 3 on precomputed block norms; lets bulk profile scans skip
/// materializing a profile per candidate.
pub(crate) fn condition3_from_norms(
    norm: u32,
    block_norms: &[u32],
    sig: &PrimePowerSignature,
) -> bool {
    let parts = sig.parts();
    let m1 = parts[0].exponent;
    if norm < m1 {
        return block_norms[0] < norm;
    }
    let f = parts
        .iter()
        .rposition(|part| part.exponent <= norm)
        .expect("norm >= m_1");
    let mf = parts[f].exponent;
    if mf == norm {
        block_norms[f] < mf
    } else {
        // m_f < ||delta|| forces f < n - 1 here, since entries are bounded
        // by block exponents
        block_norms[f] < mf || block_norms[f + 1] < norm
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{enumerate_cyclic_subgroups, normalize_signature};
    use proptest::prelude::*;

    fn sig(p: u64, raw: &[(u32, u32)]) -> PrimePowerSignature {
        normalize_signature(p, raw).unwrap()
    }

    fn subgroup(coords: Vec<u64>, s: &PrimePowerSignature) -> CyclicSubgroupDescriptor {
        CyclicSubgroupDescriptor::generated_by(&GroupElement::new(coords, s).unwrap(), s)
    }

    const CAP: u64 = 1 << 24;

    #[test]
    fn hom_counts() {
        let s = sig(2, &[(1, 1), (2, 1)]);
        let trivial = CyclicSubgroupDescriptor::trivial(&s);
        assert_eq!(enumerate_homs(&trivial, &s, CAP).unwrap().count(), 1);

        let h = subgroup(vec![0, 2], &s);
        assert_eq!(h.order_exponent(), 1);
        assert_eq!(enumerate_homs(&h, &s, CAP).unwrap().count(), 4);

        let h = subgroup(vec![1, 0], &s);
        assert_eq!(h.order_exponent(), 1);
        assert_eq!(enumerate_homs(&h, &s, CAP).unwrap().count(), 4);
    }

    #[test]
    fn endomorphism_counts() {
        let s = sig(2, &[(1, 1), (2, 1)]);
        assert_eq!(enumerate_endomorphisms(&s, CAP).unwrap().count(), 32);

        for p in [2u64, 3, 5] {
            let s = sig(p, &[(1, 1)]);
            assert_eq!(enumerate_endomorphisms(&s, CAP).unwrap().count() as u64, p);
        }

        let s = sig(2, &[(2, 1), (5, 1)]);
        assert_eq!(endomorphism_space_size(&s), BigUint::from(2048u32));
        assert_eq!(enumerate_endomorphisms(&s, CAP).unwrap().count(), 2048);
    }

    #[test]
    fn endomorphism_tables_are_distinct_and_valid() {
        let s = sig(2, &[(1, 1), (2, 1)]);
        let tables: Vec<EndomorphismTable> =
            enumerate_endomorphisms(&s, CAP).unwrap().collect();
        let mut keys: Vec<Vec<u64>> = tables
            .iter()
            .map(|t| {
                t.columns()
                    .iter()
                    .flat_map(|c| c.coords().iter().copied())
                    .collect()
            })
            .collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), 32);
        // every column is killed by the order of its basis vector
        for table in &tables {
            for (l, column) in table.columns().iter().enumerate() {
                let killer = 2u64.pow(s.expanded_exponents()[l]);
                assert!(column.scalar_mul(killer, &s).is_zero());
            }
        }
    }

    #[test]
    fn endomorphism_cap_respected() {
        let s = sig(2, &[(1, 1), (2, 1)]);
        assert!(matches!(
            enumerate_endomorphisms(&s, 31).map(|it| it.count()),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn oracle_examples() {
        let s = sig(2, &[(1, 1), (2, 1)]);
        let h = subgroup(vec![0, 2], &s);

        let zero = HomomorphismDescriptor::new(h.clone(), GroupElement::zero(&s), &s).unwrap();
        assert!(is_extendable_oracle(&zero, &s, CAP).unwrap());

        let bad =
            HomomorphismDescriptor::new(h.clone(), GroupElement::new(vec![1, 0], &s).unwrap(), &s)
                .unwrap();
        assert!(!is_extendable_oracle(&bad, &s, CAP).unwrap());

        let identity = HomomorphismDescriptor::new(h.clone(), h.generator().clone(), &s).unwrap();
        assert!(is_extendable_oracle(&identity, &s, CAP).unwrap());
    }

    #[test]
    fn formula_examples() {
        let s = sig(2, &[(1, 1), (2, 1)]);
        let h = subgroup(vec![0, 2], &s);

        let zero = HomomorphismDescriptor::new(h.clone(), GroupElement::zero(&s), &s).unwrap();
        assert!(is_extendable_formula(&zero, &s));

        let bad =
            HomomorphismDescriptor::new(h.clone(), GroupElement::new(vec![1, 0], &s).unwrap(), &s)
                .unwrap();
        assert!(!is_extendable_formula(&bad, &s));

        let identity = HomomorphismDescriptor::new(h.clone(), h.generator().clone(), &s).unwrap();
        assert!(is_extendable_formula(&identity, &s));
    }

    #[test]
    fn subgroup_membership_examples() {
        let s = sig(2, &[(1, 1), (2, 1)]);
        assert!(!has_nonextendable_hom(
            &CyclicSubgroupDescriptor::trivial(&s),
            &s
        ));
        assert!(has_nonextendable_hom(&subgroup(vec![0, 2], &s), &s));

        // diagonal embeddings in homocyclic groups always extend
        for (p, r, l) in [(2u64, 3u32, 2u32), (3, 2, 2), (5, 1, 3)] {
            let s = sig(p, &[(r, l)]);
            let diagonal = subgroup(vec![1; l as usize], &s);
            assert!(!has_nonextendable_hom(&diagonal, &s));
        }
    }

    #[test]
    fn formula_agrees_with_oracle_small() {
        for s in [
            sig(2, &[(1, 1), (2, 1)]),
            sig(2, &[(1, 2)]),
            sig(3, &[(1, 1), (2, 1)]),
            sig(2, &[(1, 1), (3, 1)]),
        ] {
            for h in enumerate_cyclic_subgroups(&s, 1 << 20).unwrap() {
                let images = endomorphism_image_set(&h, &s, CAP).unwrap();
                let mut any_nonextendable = false;
                for f in enumerate_homs(&h, &s, 1 << 20).unwrap() {
                    let by_oracle = images.contains(f.image(), &s);
                    assert_eq!(
                        is_extendable_oracle(&f, &s, CAP).unwrap(),
                        by_oracle,
                        "image-set scan disagrees with direct scan"
                    );
                    assert_eq!(
                        is_extendable_formula(&f, &s),
                        by_oracle,
                        "criterion disagrees with oracle on {:?} -> {:?} in {}",
                        h.generator(),
                        f.image(),
                        s
                    );
                    any_nonextendable |= !by_oracle;
                }
                assert_eq!(has_nonextendable_hom(&h, &s), any_nonextendable);
                assert_eq!(
                    has_nonextendable_hom_oracle(&h, &s, CAP).unwrap(),
                    any_nonextendable
                );
            }
        }
    }

    #[test]
    fn beta_zero_hom_detects_membership() {
        // the criterion at beta = 0 is exactly the subgroup-level predicate
        let s = sig(2, &[(2, 1), (5, 1)]);
        for h in enumerate_cyclic_subgroups(&s, 1 << 20).unwrap() {
            let u = h.order_exponent();
            let coords: Vec<u64> = s
                .expanded_exponents()
                .iter()
                .map(|&m| {
                    let v = m.saturating_sub(u);
                    if v == m {
                        0
                    } else {
                        2u64.pow(v)
                    }
                })
                .collect();
            let image = GroupElement::new(coords, &s).unwrap();
            let f = HomomorphismDescriptor::new(h.clone(), image, &s).unwrap();
            assert!(f.beta().iter().all(|&b| b == 0));
            assert_eq!(
                has_nonextendable_hom(&h, &s),
                !is_extendable_formula(&f, &s)
            );
        }
    }

    #[test]
    fn condition1_examples() {
        let s = sig(2, &[(1, 1), (2, 1)]);
        assert!(!condition1(&[0, 0], &s));
        assert!(condition1(&[0, 1], &s));
        assert!(!condition1(&[1, 2], &s));
    }

    #[test]
    fn condition2_collapses_to_condition1_for_singleton_blocks() {
        let s = sig(2, &[(1, 1), (2, 1)]);
        for (d1, d2) in [(0u32, 0u32), (0, 1), (1, 2), (1, 0), (0, 2), (1, 1)] {
            let profile = DeltaProfile::from_blocks(vec![vec![d1], vec![d2]], &s).unwrap();
            assert_eq!(condition1(&[d1, d2], &s), condition2(&profile, &s));
        }
    }

    #[test]
    fn f_delta_examples() {
        let s = sig(2, &[(2, 1), (5, 1)]);
        let d = DeltaProfile::from_blocks(vec![vec![1], vec![4]], &s).unwrap();
        assert_eq!(f_delta(&d, &s), 1);
        let d = DeltaProfile::from_blocks(vec![vec![0], vec![1]], &s).unwrap();
        assert_eq!(f_delta(&d, &s), 1);

        let s = sig(2, &[(1, 1), (2, 1), (3, 1)]);
        let d = DeltaProfile::from_blocks(vec![vec![1], vec![2], vec![2]], &s).unwrap();
        assert_eq!(f_delta(&d, &s), 2);
    }

    #[test]
    fn condition3_examples() {
        let s = sig(2, &[(2, 1), (5, 1)]);
        let d = DeltaProfile::from_blocks(vec![vec![0], vec![1]], &s).unwrap();
        assert!(condition3(&d, &s));
        let d = DeltaProfile::from_blocks(vec![vec![2], vec![2]], &s).unwrap();
        assert!(!condition3(&d, &s));
        let d = DeltaProfile::from_blocks(vec![vec![0], vec![0]], &s).unwrap();
        assert!(!condition3(&d, &s));
    }

    /// All profiles bounded by the block exponents.
    fn all_profiles(s: &PrimePowerSignature) -> Vec<DeltaProfile> {
        let mut flats = vec![vec![]];
        for part in s.parts() {
            for _ in 0..part.multiplicity {
                let mut next = Vec::new();
                for prefix in &flats {
                    for d in 0..=part.exponent {
                        let mut entry: Vec<u32> = prefix.clone();
                        entry.push(d);
                        next.push(entry);
                    }
                }
                flats = next;
            }
        }
        flats
            .into_iter()
            .map(|flat| {
                let mut blocks = Vec::new();
                let mut offset = 0;
                for part in s.parts() {
                    let width = part.multiplicity as usize;
                    blocks.push(flat[offset..offset + width].to_vec());
                    offset += width;
                }
                DeltaProfile::from_blocks(blocks, s).unwrap()
            })
            .collect()
    }

    #[test]
    fn conditions_agree_exhaustively_small() {
        for s in [
            sig(2, &[(1, 1), (2, 1)]),
            sig(2, &[(2, 1), (5, 1)]),
            sig(2, &[(1, 2), (2, 1)]),
            sig(3, &[(1, 1), (2, 2), (4, 1)]),
        ] {
            for delta in all_profiles(&s) {
                let c1 = condition1(&delta.expanded(), &s);
                let c2 = condition2(&delta, &s);
                let c3 = condition3(&delta, &s);
                assert!(
                    c1 == c2 && c2 == c3,
                    "conditions disagree on {:?} in {}",
                    delta,
                    s
                );
            }
        }
    }

    proptest! {
        #[test]
        fn conditions_agree_random(
            exponents in proptest::collection::btree_set(1u32..6, 1..=3),
            multiplicities in proptest::collection::vec(1u32..3, 3),
            seed in proptest::collection::vec(0u32..6, 12),
        ) {
            let raw: Vec<(u32, u32)> = exponents
                .iter()
                .zip(multiplicities.iter())
                .map(|(&m, &lam)| (m, lam))
                .collect();
            let s = sig(2, &raw);
            let mut blocks = Vec::new();
            let mut cursor = 0;
            for part in s.parts() {
                let mut block = Vec::new();
                for _ in 0..part.multiplicity {
                    block.push(seed[cursor % seed.len()] % (part.exponent + 1));
                    cursor += 1;
                }
                blocks.push(block);
            }
            let delta = DeltaProfile::from_blocks(blocks, &s).unwrap();
            let c1 = condition1(&delta.expanded(), &s);
            let c2 = condition2(&delta, &s);
            let c3 = condition3(&delta, &s);
            prop_assert!(c1 == c2 && c2 == c3);
        }
    }
}
