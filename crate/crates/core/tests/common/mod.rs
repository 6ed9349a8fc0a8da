//! Shared fixtures for the integration suites: test families and a second,
//! fully literal composite oracle.
#![allow(dead_code)]

use cqi_core::extension::endomorphism_space_size;
use cqi_core::group::{enumerate_signatures, CompositeGroupSpec, PrimePowerSignature};
use num_bigint::BigUint;

/// Signatures whose brute-force oracle run is feasible: group order within
/// the enumeration cap and endomorphism space within `endo_cap`.
pub fn oracle_family(p: u64, enum_cap: u64, endo_cap: u64) -> Vec<PrimePowerSignature> {
    enumerate_signatures(p, enum_cap)
        .unwrap()
        .into_iter()
        .filter(|sig| endomorphism_space_size(sig) <= BigUint::from(endo_cap))
        .collect()
}

/// Signatures with total exponent at most `max_total` whose profile
/// candidate space is at most `space_cap`.
pub fn profile_family(p: u64, max_total: u32, space_cap: u64) -> Vec<PrimePowerSignature> {
    let max_order = p.checked_pow(max_total).expect("universe order fits u64");
    enumerate_signatures(p, max_order)
        .unwrap()
        .into_iter()
        .filter(|sig| cqi_core::counting::profile_space_size(sig) <= BigUint::from(space_cap))
        .collect()
}

fn multiplicative_partitions(n: u64, min: u64) -> Vec<Vec<u64>> {
    if n == 1 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut d = min;
    while d <= n {
        if n % d == 0 {
            for mut rest in multiplicative_partitions(n / d, d) {
                let mut moduli = vec![d];
                moduli.append(&mut rest);
                out.push(moduli);
            }
        }
        d += 1;
    }
    out
}

/// Every composite spec of order up to `max_order`, one per multiset of
/// cyclic factors (factors at least 2; order 1 is the empty spec).
pub fn composite_specs_up_to(max_order: u64) -> Vec<CompositeGroupSpec> {
    let mut out = Vec::new();
    for order in 1..=max_order {
        for moduli in multiplicative_partitions(order, 2) {
            out.push(CompositeGroupSpec::new(moduli).unwrap());
        }
    }
    out
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A second, fully literal composite oracle: enumerates every endomorphism
/// column tuple outright and records the images of each subgroup generator.
/// Only for tiny groups; returns None when the endomorphism space exceeds
/// `max_endos`.
pub fn literal_composite_x_count(spec: &CompositeGroupSpec, max_endos: u64) -> Option<u64> {
    let moduli = spec.normalized_moduli();
    let order = spec.order_u64()?;
    if moduli.is_empty() {
        return Some(0);
    }
    let endos: u64 = moduli
        .iter()
        .map(|&ql| moduli.iter().map(|&qj| gcd(ql, qj)).product::<u64>())
        .try_fold(1u64, |acc, columns: u64| acc.checked_mul(columns))?;
    if endos > max_endos {
        return None;
    }
    let k = moduli.len();
    let pack = |coords: &[u64]| -> u64 {
        coords
            .iter()
            .zip(moduli.iter())
            .fold(0, |acc, (&c, &q)| acc * q + c)
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
            .zip(b)
            .zip(moduli.iter())
            .map(|((&x, &y), &q)| (x + y) % q)
            .collect()
    };
    let scale = |c: u64, v: &[u64]| -> Vec<u64> {
        v.iter()
            .zip(moduli.iter())
            .map(|(&x, &q)| (c as u128 * x as u128 % q as u128) as u64)
            .collect()
    };

    // admissible columns for slot l: elements killed by q_l
    let columns: Vec<Vec<Vec<u64>>> = moduli
        .iter()
        .map(|&ql| {
            (0..order)
                .map(unpack)
                .filter(|v| scale(ql, v).iter().all(|&c| c == 0))
                .collect()
        })
        .collect();

    // distinct cyclic subgroups, keyed by their member sets
    let mut seen = std::collections::BTreeSet::new();
    let mut generators = Vec::new();
    for index in 0..order {
        let h = unpack(index);
        let mut members = vec![0u64];
        let mut acc = h.clone();
        while acc.iter().any(|&c| c != 0) {
            members.push(pack(&acc));
            acc = add(&acc, &h);
        }
        members.sort_unstable();
        members.dedup();
        let subgroup_order = members.len() as u64;
        if seen.insert(members) {
            generators.push((h, subgroup_order));
        }
    }

    let mut x_count = 0;
    for (h, subgroup_order) in &generators {
        let kernel: u64 = moduli.iter().map(|&q| gcd(*subgroup_order, q)).product();
        let mut achieved = std::collections::BTreeSet::new();
        let mut choice = vec![0usize; k];
        loop {
            let mut image = vec![0u64; k];
            for (l, &ci) in choice.iter().enumerate() {
                image = add(&image, &scale(h[l], &columns[l][ci]));
            }
            achieved.insert(pack(&image));
            let mut advanced = false;
            for (slot, column) in choice.iter_mut().zip(columns.iter()) {
                *slot += 1;
                if *slot < column.len() {
                    advanced = true;
                    break;
                }
                *slot = 0;
            }
            if !advanced {
                break;
            }
        }
        if (achieved.len() as u64) < kernel {
            x_count += 1;
        }
    }
    Some(x_count)
}
