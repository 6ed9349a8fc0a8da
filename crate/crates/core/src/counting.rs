//! Counting the cyclic subgroups that carry non-extendable homomorphisms.
//!
//! `X(G)` is the set of cyclic subgroups of `G` admitting a homomorphism
//! into `G` that no endomorphism extends; `G` is cyclic-quasi-injective
//! exactly when `X(G)` is empty. For a p-group, profiles in `Y(G)` (the
//! image of `X(G)/~` under the profile map) are the `delta` satisfying
//! condition 3, each accounting for `O_p(delta)` subgroups. The closed-form
//! class count splits as `S1 + S2 + S3` over where the norm of `delta`
//! falls relative to the block exponents, and the subgroup count as
//! `T1 + T2 + T3` via orbit sums.
//!
//! For composite orders the group splits into p-components; a cyclic
//! subgroup decomposes across components and lies in `X(G)` exactly when
//! some component lies in `X(G_p)`, which inclusion-exclusion turns into
//! the alternating sum over nonempty prime subsets implemented by
//! [`count_X_composite`].

use std::collections::BTreeSet;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::extension::{has_nonextendable_hom, has_nonextendable_hom_oracle};
use crate::group::{
    count_cyclic_subgroups, crt_decompose, enumerate_cyclic_subgroups, euler_phi_prime_power,
    valuation_profile, CompositeGroupSpec, CyclicSubgroupDescriptor, DeltaProfile,
    PrimePowerSignature,
};

// ---------------------------------------------------------------------------
// profile enumeration
// ---------------------------------------------------------------------------

/// Number of candidate profiles: `prod_i (m_i + 1)^{lambda_i}`.
pub fn profile_space_size(sig: &PrimePowerSignature) -> BigUint {
    sig.parts()
        .iter()
        .map(|part| BigUint::from(part.exponent as u64 + 1).pow(part.multiplicity))
        .product()
}

/// All profiles bounded by the block exponents that satisfy condition 3,
/// in lexicographic order of their expanded entries. Errors with
/// `CapExceeded` when the candidate space exceeds `cap`.
#[allow(non_snake_case)]
pub fn enumerate_Y(sig: &PrimePowerSignature, cap: u64) -> Result<Vec<DeltaProfile>> {
    let space = profile_space_size(sig);
    if u64::try_from(&space).ok().filter(|&s| s <= cap).is_none() {
        return Err(Error::CapExceeded {
            what: "profile enumeration",
            required: space,
            cap,
        });
    }
    let bounds: Vec<u32> = sig
        .parts()
        .iter()
        .flat_map(|part| std::iter::repeat(part.exponent).take(part.multiplicity as usize))
        .collect();
    let widths: Vec<usize> = sig
        .parts()
        .iter()
        .map(|part| part.multiplicity as usize)
        .collect();
    let mut entries = vec![0u32; bounds.len()];
    let mut block_norms = vec![0u32; widths.len()];
    let mut out = Vec::new();
    loop {
        let mut offset = 0;
        let mut norm = 0;
        for (slot, &width) in block_norms.iter_mut().zip(widths.iter()) {
            *slot = entries[offset..offset + width].iter().copied().max().unwrap();
            norm = norm.max(*slot);
            offset += width;
        }
        if crate::extension::condition3_from_norms(norm, &block_norms, sig) {
            let mut blocks = Vec::with_capacity(widths.len());
            let mut offset = 0;
            for &width in &widths {
                blocks.push(entries[offset..offset + width].to_vec());
                offset += width;
            }
            out.push(DeltaProfile::from_blocks(blocks, sig).expect("entries within bounds"));
        }
        // odometer, last entry fastest
        let mut advanced = false;
        for (slot, &bound) in entries.iter_mut().zip(bounds.iter()).rev() {
            if *slot < bound {
                *slot += 1;
                advanced = true;
                break;
            }
            *slot = 0;
        }
        if !advanced {
            return Ok(out);
        }
    }
}

/// Number of cyclic subgroups sharing a nonzero profile:
/// `prod over entries phi(p^{delta_entry}) / phi(p^{||delta||})`.
pub fn orbit_size(delta: &DeltaProfile, p: u64) -> Result<BigUint> {
    if delta.is_zero() {
        return Err(Error::ZeroProfile);
    }
    let product: BigUint = delta
        .blocks()
        .iter()
        .flat_map(|block| block.iter())
        .map(|&d| euler_phi_prime_power(p, d))
        .product();
    Ok(product / euler_phi_prime_power(p, delta.norm()))
}

// ---------------------------------------------------------------------------
// closed forms
// ---------------------------------------------------------------------------

/// `#X(G)/~` with its three-term breakdown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCounts {
    pub total: BigUint,
    pub s1: BigUint,
    pub s2: BigUint,
    pub s3: BigUint,
}

/// `#X(G)` with its three-term breakdown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupCounts {
    pub total: BigUint,
    pub t1: BigUint,
    pub t2: BigUint,
    pub t3: BigUint,
}

fn big(base: u64, exponent: u32) -> BigUint {
    BigUint::from(base).pow(exponent)
}

/// Class count: exact evaluation of
///
/// ```text
/// S1 = sum_{1 <= k < m_1} k^{l_1} ((k+1)^{L - l_1} - k^{L - l_1})
/// S2 = sum_i sum_{m_i <= k < m_{i+1}} m_i^{l_i} prod_{j<i} (m_j+1)^{l_j}
///          ((k+1)^{L - L_i} - k^{L - L_i})
/// S3 = sum_i sum_{m_i < k < m_{i+1}} k^{l_{i+1}} ((m_i+1)^{l_i} - m_i^{l_i})
///          prod_{j<i} (m_j+1)^{l_j} ((k+1)^{L - L_{i+1}} - k^{L - L_{i+1}})
/// ```
///
/// with `L_i` the multiplicity prefix sums and `L = L_n`. The prime plays
/// no role here.
pub fn count_classes_closed_form(sig: &PrimePowerSignature) -> ClassCounts {
    let parts = sig.parts();
    let n = parts.len();
    let total_mult = sig.multiplicity_prefix(n);

    let mut s1 = BigUint::zero();
    let lambda1 = parts[0].multiplicity;
    let rest1 = total_mult - lambda1;
    for k in 1..parts[0].exponent {
        s1 += big(k as u64, lambda1) * (big(k as u64 + 1, rest1) - big(k as u64, rest1));
    }

    let mut s2 = BigUint::zero();
    let mut s3 = BigUint::zero();
    let mut lower_prefix = BigUint::one(); // prod_{j < i} (m_j + 1)^{lambda_j}
    for i in 0..n.saturating_sub(1) {
        let mi = parts[i].exponent;
        let next = parts[i + 1].exponent;
        let rest_i = total_mult - sig.multiplicity_prefix(i + 1);
        for k in mi..next {
            s2 += big(mi as u64, parts[i].multiplicity)
                * &lower_prefix
                * (big(k as u64 + 1, rest_i) - big(k as u64, rest_i));
        }
        let rest_next = total_mult - sig.multiplicity_prefix(i + 2);
        let block_gap =
            big(mi as u64 + 1, parts[i].multiplicity) - big(mi as u64, parts[i].multiplicity);
        for k in mi + 1..next {
            s3 += big(k as u64, parts[i + 1].multiplicity)
                * &block_gap
                * &lower_prefix
                * (big(k as u64 + 1, rest_next) - big(k as u64, rest_next));
        }
        lower_prefix *= big(mi as u64 + 1, parts[i].multiplicity);
    }

    ClassCounts {
        total: &s1 + &s2 + &s3,
        s1,
        s2,
        s3,
    }
}

/// Subgroup count: the orbit-weighted analogue of the class count, with
/// each term divided exactly by `phi(p^k) = p^{k-1}(p-1)`.
pub fn count_subgroups_closed_form(sig: &PrimePowerSignature) -> SubgroupCounts {
    let p = sig.p();
    let parts = sig.parts();
    let n = parts.len();
    let total_mult = sig.multiplicity_prefix(n);
    let phi_k = |k: u32| euler_phi_prime_power(p, k);

    let mut t1 = BigUint::zero();
    let lambda1 = parts[0].multiplicity;
    let rest1 = total_mult - lambda1;
    for k in 1..parts[0].exponent {
        let numerator = big(p, k * rest1) - big(p, (k - 1) * rest1);
        t1 += big(p, (k - 1) * lambda1) * numerator / phi_k(k);
    }

    let mut t2 = BigUint::zero();
    let mut t3 = BigUint::zero();
    let mut lower_prefix = BigUint::one(); // prod_{j < i} p^{m_j lambda_j}
    for i in 0..n.saturating_sub(1) {
        let mi = parts[i].exponent;
        let next = parts[i + 1].exponent;
        let rest_i = total_mult - sig.multiplicity_prefix(i + 1);
        for k in mi..next {
            let numerator = big(p, k * rest_i) - big(p, (k - 1) * rest_i);
            t2 += &lower_prefix * big(p, (mi - 1) * parts[i].multiplicity) * numerator / phi_k(k);
        }
        let rest_next = total_mult - sig.multiplicity_prefix(i + 2);
        let block_gap =
            big(p, mi * parts[i].multiplicity) - big(p, (mi - 1) * parts[i].multiplicity);
        for k in mi + 1..next {
            let numerator = big(p, k * rest_next) - big(p, (k - 1) * rest_next);
            t3 += &lower_prefix
                * &block_gap
                * big(p, (k - 1) * parts[i + 1].multiplicity)
                * numerator
                / phi_k(k);
        }
        lower_prefix *= big(p, mi * parts[i].multiplicity);
    }

    SubgroupCounts {
        total: &t1 + &t2 + &t3,
        t1,
        t2,
        t3,
    }
}

// ---------------------------------------------------------------------------
// the Y partition used in verification mode
// ---------------------------------------------------------------------------

/// Sizes of the subsets partitioning `Y(G)` by where the norm falls:
/// `Y = Y1 u (Y2 u Y3)` with `Y4 = Y2 n Y3`, so `#Y = #Y1 + #Y2 + #Y3 - #Y4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct YPartition {
    pub y: u64,
    pub y1: u64,
    pub y2: u64,
    pub y3: u64,
    pub y4: u64,
}

/// Classifies every member of `Y(G)` by the defining predicates of the four
/// subsets. Verification-mode companion of the closed forms.
pub fn y_partition_sizes(sig: &PrimePowerSignature, cap: u64) -> Result<YPartition> {
    let parts = sig.parts();
    let n = parts.len();
    let mut sizes = YPartition {
        y: 0,
        y1: 0,
        y2: 0,
        y3: 0,
        y4: 0,
    };
    for delta in enumerate_Y(sig, cap)? {
        sizes.y += 1;
        let norm = delta.norm();
        if norm >= 1 && norm < parts[0].exponent && delta.block_norm(0) < norm {
            sizes.y1 += 1;
        }
        let mut in_y2 = false;
        let mut in_y3 = false;
        for i in 0..n.saturating_sub(1) {
            let mi = parts[i].exponent;
            let next = parts[i + 1].exponent;
            if mi <= norm && norm < next && delta.block_norm(i) < mi {
                in_y2 = true;
            }
            if mi < norm && norm < next && delta.block_norm(i + 1) < norm {
                in_y3 = true;
            }
        }
        sizes.y2 += u64::from(in_y2);
        sizes.y3 += u64::from(in_y3);
        sizes.y4 += u64::from(in_y2 && in_y3);
    }
    Ok(sizes)
}

// ---------------------------------------------------------------------------
// enumeration routes
// ---------------------------------------------------------------------------

/// Outcome of filtering the enumerated cyclic subgroups for membership in
/// `X(G)`, with the distinct profiles for the class count.
#[derive(Debug, Clone)]
pub struct XEnumeration {
    pub total_cyclic: u64,
    pub members: Vec<CyclicSubgroupDescriptor>,
    pub profiles: BTreeSet<Vec<u32>>,
}

impl XEnumeration {
    pub fn subgroup_count(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn class_count(&self) -> u64 {
        self.profiles.len() as u64
    }
}

#[allow(non_snake_case)]
fn enumerate_X_by<F>(sig: &PrimePowerSignature, enum_cap: u64, mut in_x: F) -> Result<XEnumeration>
where
    F: FnMut(&CyclicSubgroupDescriptor) -> Result<bool>,
{
    let subgroups = enumerate_cyclic_subgroups(sig, enum_cap)?;
    let total_cyclic = subgroups.len() as u64;
    let mut members = Vec::new();
    let mut profiles = BTreeSet::new();
    for subgroup in subgroups {
        if in_x(&subgroup)? {
            profiles.insert(valuation_profile(&subgroup, sig).expanded());
            members.push(subgroup);
        }
    }
    Ok(XEnumeration {
        total_cyclic,
        members,
        profiles,
    })
}

/// Enumerates cyclic subgroups and filters by the valuation criterion.
#[allow(non_snake_case)]
pub fn count_X_enumeration(sig: &PrimePowerSignature, enum_cap: u64) -> Result<XEnumeration> {
    enumerate_X_by(sig, enum_cap, |subgroup| {
        Ok(has_nonextendable_hom(subgroup, sig))
    })
}

/// Verification mode: the same enumeration filtered by the brute-force
/// endomorphism oracle instead of the criterion.
#[allow(non_snake_case)]
pub fn count_X_enumeration_oracle(
    sig: &PrimePowerSignature,
    enum_cap: u64,
    endo_cap: u64,
) -> Result<XEnumeration> {
    enumerate_X_by(sig, enum_cap, |subgroup| {
        has_nonextendable_hom_oracle(subgroup, sig, endo_cap)
    })
}

// ---------------------------------------------------------------------------
// the cyclic-quasi-injectivity decision
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ComponentVerdict {
    pub p: u64,
    pub signature: PrimePowerSignature,
    pub homocyclic: bool,
}

#[derive(Debug, Clone)]
pub struct CqiReport {
    pub cqi: bool,
    pub components: Vec<ComponentVerdict>,
}

/// `G` is cyclic-quasi-injective iff every p-component is homocyclic
/// (a single block after normalization). The trivial group passes vacuously.
pub fn is_cyclic_quasi_injective(spec: &CompositeGroupSpec) -> CqiReport {
    let components: Vec<ComponentVerdict> = crt_decompose(spec)
        .into_iter()
        .map(|(p, signature)| {
            let homocyclic = signature.is_homocyclic();
            ComponentVerdict {
                p,
                signature,
                homocyclic,
            }
        })
        .collect();
    CqiReport {
        cqi: components.iter().all(|component| component.homocyclic),
        components,
    }
}

// ---------------------------------------------------------------------------
// composite orders
// ---------------------------------------------------------------------------

/// One inclusion-exclusion term: the subset `J` of primes forced into
/// `X(G_p)`, weighted `prod_{p in J} #X(G_p) * prod_{p notin J} c(p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetTerm {
    pub primes: Vec<u64>,
    pub sign: i8,
    pub value: BigUint,
}

#[derive(Debug, Clone)]
pub struct CompositeCount {
    pub total: BigUint,
    pub terms: Vec<SubsetTerm>,
}

/// `#X(G)` for a composite group by inclusion-exclusion over the primes
/// dividing the order; uses only closed forms and the cyclic-subgroup
/// census, no enumeration.
#[allow(non_snake_case)]
pub fn count_X_composite(spec: &CompositeGroupSpec) -> CompositeCount {
    let components = crt_decompose(spec);
    let primes: Vec<u64> = components.keys().copied().collect();
    let x_counts: Vec<BigUint> = components
        .values()
        .map(|sig| count_subgroups_closed_form(sig).total)
        .collect();
    let cyc_counts: Vec<BigUint> = components.values().map(count_cyclic_subgroups).collect();

    let mut terms = Vec::new();
    for mask in 1u32..(1u32 << primes.len()) {
        let chosen: Vec<usize> = (0..primes.len()).filter(|i| mask >> i & 1 == 1).collect();
        let value: BigUint = (0..primes.len())
            .map(|i| {
                if chosen.contains(&i) {
                    x_counts[i].clone()
                } else {
                    cyc_counts[i].clone()
                }
            })
            .product();
        let sign = if chosen.len() % 2 == 1 { 1 } else { -1 };
        terms.push(SubsetTerm {
            primes: chosen.iter().map(|&i| primes[i]).collect(),
            sign,
            value,
        });
    }
    terms.sort_by(|a, b| (a.primes.len(), &a.primes).cmp(&(b.primes.len(), &b.primes)));

    let mut total = BigInt::zero();
    for term in &terms {
        total += BigInt::from_biguint(
            if term.sign >= 0 { Sign::Plus } else { Sign::Minus },
            term.value.clone(),
        );
    }
    let total = total
        .to_biguint()
        .expect("inclusion-exclusion total is nonnegative");
    CompositeCount { total, terms }
}

/// Brute-force counts over a composite group by direct enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositeEnumeration {
    /// All distinct cyclic subgroups, trivial included.
    pub cyclic_subgroups: u64,
    /// Members of `X(G)`.
    pub x_members: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Independent brute-force route for composite groups, working directly on
/// the cyclic factors with no valuation machinery: endomorphism columns can
/// send `h` anywhere in the subgroup `sum_l h_l * ann(q_l)`, so `<h>` lies
/// in `X(G)` exactly when that subgroup is smaller than the kernel of
/// multiplication by `ord(h)`.
#[allow(non_snake_case)]
pub fn count_X_composite_enumeration(
    spec: &CompositeGroupSpec,
    cap: u64,
) -> Result<CompositeEnumeration> {
    let moduli = spec.normalized_moduli();
    let order = match spec.order_u64() {
        Some(order) if order <= cap => order,
        _ => {
            return Err(Error::CapExceeded {
                what: "composite brute force",
                required: spec.order(),
                cap,
            })
        }
    };
    if moduli.is_empty() {
        return Ok(CompositeEnumeration {
            cyclic_subgroups: 1,
            x_members: 0,
        });
    }
    let k = moduli.len();
    let pack = |coords: &[u64]| -> u64 {
        coords
            .iter()
            .zip(moduli.iter())
            .fold(0u64, |acc, (&c, &q)| acc * q + c)
    };
    let unpack = |mut index: u64| -> Vec<u64> {
        let mut coords = vec![0u64; k];
        for (slot, &q) in coords.iter_mut().zip(moduli.iter()).rev() {
            *slot = index % q;
            index /= q;
        }
        coords
    };
    let add = |a: &[u64], b: &[u64]| -> Vec<u64> {
        a.iter()
            .zip(b.iter())
            .zip(moduli.iter())
            .map(|((&x, &y), &q)| (x + y) % q)
            .collect()
    };

    // group elements by the cyclic subgroup they generate
    let mut seen_subgroups: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut representatives: Vec<(Vec<u64>, u64)> = Vec::new(); // (generator, subgroup order)
    for index in 0..order {
        let h = unpack(index);
        let mut membership = vec![0u64]; // the zero element
        let mut acc = h.clone();
        while !acc.iter().all(|&c| c == 0) {
            membership.push(pack(&acc));
            acc = add(&acc, &h);
        }
        membership.sort_unstable();
        membership.dedup();
        let subgroup_order = membership.len() as u64;
        if seen_subgroups.insert(membership) {
            representatives.push((h, subgroup_order));
        }
    }

    let mut x_members = 0u64;
    for (h, subgroup_order) in &representatives {
        // kernel of multiplication by ord(h): one gcd factor per coordinate
        let kernel: u64 = moduli.iter().map(|&q| gcd(*subgroup_order, q)).product();
        // closure of the achievable images of h under all endomorphisms
        let mut generators = Vec::new();
        for (l, &hl) in h.iter().enumerate() {
            for (j, &qj) in moduli.iter().enumerate() {
                let step = qj / gcd(qj, moduli[l]);
                let value = (hl as u128 * step as u128 % qj as u128) as u64;
                if value != 0 {
                    let mut coords = vec![0u64; k];
                    coords[j] = value;
                    generators.push(coords);
                }
            }
        }
        let mut achieved: BTreeSet<u64> = BTreeSet::new();
        achieved.insert(0);
        let mut frontier = vec![vec![0u64; k]];
        while let Some(current) = frontier.pop() {
            for generator in &generators {
                let next = add(&current, generator);
                if achieved.insert(pack(&next)) {
                    frontier.push(next);
                }
            }
        }
        if (achieved.len() as u64) < kernel {
            x_members += 1;
        }
    }
    Ok(CompositeEnumeration {
        cyclic_subgroups: representatives.len() as u64,
        x_members,
    })
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMethod {
    ClosedForm,
    Enumeration,
    InclusionExclusion,
}

impl CountMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CountMethod::ClosedForm => "closed_form",
            CountMethod::Enumeration => "enumeration",
            CountMethod::InclusionExclusion => "inclusion_exclusion",
        }
    }
}

#[derive(Debug, Clone)]
pub enum CountTerms {
    ClosedForm {
        classes: ClassCounts,
        subgroups: SubgroupCounts,
    },
    Subsets(Vec<SubsetTerm>),
}

/// The result of a counting run, serializable to JSON and CSV.
#[derive(Debug, Clone)]
pub struct CountReport {
    pub spec: String,
    pub p: Option<u64>,
    /// `#X(G)/~`; undefined (None) for composite, non-primary orders.
    pub classes: Option<BigUint>,
    /// `#X(G)`.
    pub subgroups: BigUint,
    pub cqi: bool,
    pub method: CountMethod,
    pub terms: Option<CountTerms>,
}

pub const CSV_HEADER: &str = "spec,p,classes,subgroups,cqi";

fn big_json(value: &BigUint) -> Value {
    Value::Number(
        serde_json::Number::from_str(&value.to_string()).expect("decimal digits parse as Number"),
    )
}

impl CountReport {
    /// Closed-form counts for a p-primary signature.
    pub fn closed_form(sig: &PrimePowerSignature) -> CountReport {
        let classes = count_classes_closed_form(sig);
        let subgroups = count_subgroups_closed_form(sig);
        let cqi = subgroups.total.is_zero();
        CountReport {
            spec: sig.to_string(),
            p: Some(sig.p()),
            classes: Some(classes.total.clone()),
            subgroups: subgroups.total.clone(),
            cqi,
            method: CountMethod::ClosedForm,
            terms: Some(CountTerms::ClosedForm { classes, subgroups }),
        }
    }

    /// Enumeration-route counts for a p-primary signature.
    pub fn enumeration(sig: &PrimePowerSignature, enum_cap: u64) -> Result<CountReport> {
        let enumeration = count_X_enumeration(sig, enum_cap)?;
        Ok(CountReport {
            spec: sig.to_string(),
            p: Some(sig.p()),
            classes: Some(BigUint::from(enumeration.class_count())),
            subgroups: BigUint::from(enumeration.subgroup_count()),
            cqi: enumeration.subgroup_count() == 0,
            method: CountMethod::Enumeration,
            terms: None,
        })
    }

    /// Inclusion-exclusion counts for a composite spec; the class count is
    /// not defined off the p-primary case and is reported as undefined.
    pub fn inclusion_exclusion(spec: &CompositeGroupSpec) -> CountReport {
        let count = count_X_composite(spec);
        CountReport {
            spec: spec.to_string(),
            p: None,
            classes: None,
            subgroups: count.total.clone(),
            cqi: count.total.is_zero(),
            method: CountMethod::InclusionExclusion,
            terms: Some(CountTerms::Subsets(count.terms)),
        }
    }

    /// JSON object with sorted keys; counts render as JSON numbers of any
    /// size.
    pub fn to_json(&self) -> Value {
        let mut object = Map::new();
        object.insert("spec".into(), json!(self.spec));
        if let Some(p) = self.p {
            object.insert("p".into(), json!(p));
        }
        object.insert(
            "classes".into(),
            match &self.classes {
                Some(classes) => big_json(classes),
                None => Value::Null,
            },
        );
        object.insert("subgroups".into(), big_json(&self.subgroups));
        object.insert("cqi".into(), json!(self.cqi));
        object.insert("method".into(), json!(self.method.as_str()));
        if let Some(terms) = &self.terms {
            let terms_value = match terms {
                CountTerms::ClosedForm { classes, subgroups } => {
                    let mut t = Map::new();
                    t.insert("S1".into(), big_json(&classes.s1));
                    t.insert("S2".into(), big_json(&classes.s2));
                    t.insert("S3".into(), big_json(&classes.s3));
                    t.insert("T1".into(), big_json(&subgroups.t1));
                    t.insert("T2".into(), big_json(&subgroups.t2));
                    t.insert("T3".into(), big_json(&subgroups.t3));
                    Value::Object(t)
                }
                CountTerms::Subsets(subsets) => {
                    let list: Vec<Value> = subsets
                        .iter()
                        .map(|term| {
                            let mut t = Map::new();
                            t.insert("primes".into(), json!(term.primes));
                            t.insert("sign".into(), json!(term.sign));
                            t.insert("value".into(), big_json(&term.value));
                            Value::Object(t)
                        })
                        .collect();
                    let mut wrapper = Map::new();
                    wrapper.insert("subsets".into(), Value::Array(list));
                    Value::Object(wrapper)
                }
            };
            object.insert("terms".into(), terms_value);
        }
        Value::Object(object)
    }

    /// One CSV row matching [`CSV_HEADER`]; undefined fields stay empty.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.spec,
            self.p.map(|p| p.to_string()).unwrap_or_default(),
            self.classes
                .as_ref()
                .map(|c| c.to_string())
                .unwrap_or_default(),
            self.subgroups,
            self.cqi
        )
    }
}
