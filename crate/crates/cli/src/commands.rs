//! The five subcommands. Every function returns the report text plus the
//! process exit code; errors bubble to main for uniform reporting.

use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use cqi_core::counting::{
    count_classes_closed_form, count_subgroups_closed_form, count_X_composite_enumeration,
    count_X_enumeration, count_X_enumeration_oracle, enumerate_Y, is_cyclic_quasi_injective,
    orbit_size, profile_space_size, y_partition_sizes, CountReport, CSV_HEADER,
};
use cqi_core::error::Error;
use cqi_core::extension::{
    condition1, condition2, condition3, endomorphism_image_set, endomorphism_space_size,
    enumerate_homs, has_nonextendable_hom, is_extendable_formula, kernel_size,
};
use cqi_core::group::{
    count_cyclic_subgroups, crt_decompose, enumerate_cyclic_subgroups, enumerate_signatures,
    is_prime, valuation_profile, CompositeGroupSpec, DeltaProfile, GroupSpec,
    PrimePowerSignature,
};
use cqi_core::parse::parse_group_spec;
use cqi_core::permstat::verify_triple_identity;

use crate::{Format, Mode};

pub type CmdResult = Result<(String, u8), Error>;

pub fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::CapExceeded { .. } => 3,
        _ => 2,
    }
}

fn stamp(value: &mut Value, timestamps: bool) {
    if timestamps {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .expect("clock after the epoch")
            .as_secs();
        if let Some(object) = value.as_object_mut() {
            object.insert("timestamp".into(), json!(now));
        }
    }
}

fn render(value: Value) -> String {
    let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

fn component_json(p: u64, sig: &PrimePowerSignature) -> Value {
    let mut object = Map::new();
    object.insert("p".into(), json!(p));
    object.insert("signature".into(), json!(sig.to_string()));
    object.insert(
        "parts".into(),
        json!(sig
            .parts()
            .iter()
            .map(|part| [part.exponent, part.multiplicity])
            .collect::<Vec<_>>()),
    );
    object.insert("homocyclic".into(), json!(sig.is_homocyclic()));
    Value::Object(object)
}

pub fn cmd_analyze(spec_text: &str, timestamps: bool) -> CmdResult {
    let spec = parse_group_spec(spec_text)?;
    let (cqi, components) = match &spec {
        GroupSpec::Composite(composite) => {
            let report = is_cyclic_quasi_injective(composite);
            let components = report
                .components
                .iter()
                .map(|component| component_json(component.p, &component.signature))
                .collect();
            (report.cqi, components)
        }
        GroupSpec::PPrimary(sig) => (sig.is_homocyclic(), vec![component_json(sig.p(), sig)]),
    };
    let mut object = Map::new();
    object.insert("spec".into(), json!(spec.to_string()));
    object.insert("cqi".into(), json!(cqi));
    object.insert("components".into(), Value::Array(components));
    let mut value = Value::Object(object);
    stamp(&mut value, timestamps);
    Ok((render(value), 0))
}

// ---------------------------------------------------------------------------
// count
// ---------------------------------------------------------------------------

fn cross_check_counts(
    spec: &GroupSpec,
    report: &CountReport,
    cap_enum: u64,
    cap_end: u64,
) -> Result<bool, Error> {
    match spec {
        GroupSpec::PPrimary(sig) => {
            let by_criterion = count_X_enumeration(sig, cap_enum)?;
            let by_oracle = count_X_enumeration_oracle(sig, cap_enum, cap_end)?;
            let ok = BigUint::from(by_criterion.subgroup_count()) == report.subgroups
                && BigUint::from(by_oracle.subgroup_count()) == report.subgroups
                && report.classes == Some(BigUint::from(by_criterion.class_count()))
                && report.classes == Some(BigUint::from(by_oracle.class_count()));
            if ok {
                eprintln!(
                    "cqi: oracle cross-check passed ({} subgroups, {} classes)",
                    by_oracle.subgroup_count(),
                    by_oracle.class_count()
                );
            } else {
                eprintln!(
                    "cqi: oracle cross-check FAILED: closed form {}, criterion route {}, oracle route {}",
                    report.subgroups,
                    by_criterion.subgroup_count(),
                    by_oracle.subgroup_count()
                );
            }
            Ok(ok)
        }
        GroupSpec::Composite(composite) => {
            let brute = count_X_composite_enumeration(composite, cap_enum)?;
            let ok = BigUint::from(brute.x_members) == report.subgroups;
            if ok {
                eprintln!(
                    "cqi: brute-force cross-check passed ({} subgroups)",
                    brute.x_members
                );
            } else {
                eprintln!(
                    "cqi: brute-force cross-check FAILED: inclusion-exclusion {}, enumeration {}",
                    report.subgroups, brute.x_members
                );
            }
            Ok(ok)
        }
    }
}

pub fn cmd_count(
    spec_text: &str,
    oracle: bool,
    cap_enum: u64,
    cap_end: u64,
    format: Format,
    timestamps: bool,
) -> CmdResult {
    let spec = parse_group_spec(spec_text)?;
    let report = match &spec {
        GroupSpec::PPrimary(sig) => CountReport::closed_form(sig),
        GroupSpec::Composite(composite) => CountReport::inclusion_exclusion(composite),
    };
    let mut exit = 0u8;
    if oracle && !cross_check_counts(&spec, &report, cap_enum, cap_end)? {
        exit = 1;
    }
    let text = match format {
        Format::Json => {
            let mut value = report.to_json();
            stamp(&mut value, timestamps);
            render(value)
        }
        Format::Csv => format!("{CSV_HEADER}\n{}\n", report.csv_row()),
    };
    Ok((text, exit))
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct Check {
    name: &'static str,
    status: &'static str,
    lhs: String,
    rhs: String,
}

impl Check {
    fn compare(name: &'static str, lhs: impl ToString, rhs: impl ToString) -> Check {
        let lhs = lhs.to_string();
        let rhs = rhs.to_string();
        let status = if lhs == rhs { "pass" } else { "fail" };
        Check {
            name,
            status,
            lhs,
            rhs,
        }
    }

    fn skipped(name: &'static str) -> Check {
        eprintln!("cqi: warning: check '{name}' skipped (cap exceeded)");
        Check {
            name,
            status: "skipped",
            lhs: String::new(),
            rhs: String::new(),
        }
    }

    fn to_json(&self) -> Value {
        let mut object = Map::new();
        object.insert("name".into(), json!(self.name));
        object.insert("status".into(), json!(self.status));
        object.insert("lhs".into(), json!(self.lhs));
        object.insert("rhs".into(), json!(self.rhs));
        Value::Object(object)
    }
}

fn verify_p_primary(sig: &PrimePowerSignature, cap_enum: u64, cap_end: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    let classes = count_classes_closed_form(sig);
    let subgroups = count_subgroups_closed_form(sig);
    let profile_space_ok = profile_space_size(sig) <= BigUint::from(cap_enum);
    let order_ok = sig.order_u64().map(|o| o <= cap_enum).unwrap_or(false);
    let endo_ok = endomorphism_space_size(sig) <= BigUint::from(cap_end);

    if profile_space_ok {
        let members = enumerate_Y(sig, cap_enum).expect("profile space under cap");
        checks.push(Check::compare(
            "classes_closed_vs_profiles",
            &classes.total,
            members.len(),
        ));
        let fiber_sum: BigUint = members
            .iter()
            .map(|delta| orbit_size(delta, sig.p()).expect("members of Y are nonzero"))
            .sum();
        checks.push(Check::compare("fiber_sum", &subgroups.total, fiber_sum));
        let partition = y_partition_sizes(sig, cap_enum).expect("profile space under cap");
        checks.push(Check::compare(
            "y_partition",
            partition.y,
            partition.y1 + partition.y2 + partition.y3 - partition.y4,
        ));
        checks.push(Check::compare(
            "y_partition_terms",
            format!("({},{},{})", classes.s1, classes.s2, classes.s3),
            format!(
                "({},{},{})",
                partition.y1,
                partition.y2,
                partition.y3 - partition.y4
            ),
        ));
        checks.push(verify_conditions(sig));
    } else {
        for name in [
            "classes_closed_vs_profiles",
            "fiber_sum",
            "y_partition",
            "y_partition_terms",
            "conditions_agree",
        ] {
            checks.push(Check::skipped(name));
        }
    }

    if order_ok {
        let enumeration = count_X_enumeration(sig, cap_enum).expect("order under cap");
        checks.push(Check::compare(
            "subgroups_closed_vs_enumeration",
            &subgroups.total,
            enumeration.subgroup_count(),
        ));
        checks.push(Check::compare(
            "classes_closed_vs_enumeration",
            &classes.total,
            enumeration.class_count(),
        ));
    } else {
        checks.push(Check::skipped("subgroups_closed_vs_enumeration"));
        checks.push(Check::skipped("classes_closed_vs_enumeration"));
    }

    if order_ok && endo_ok {
        checks.extend(verify_oracle(sig, cap_enum, cap_end, &subgroups.total));
    } else {
        checks.push(Check::skipped("oracle_agreement"));
        checks.push(Check::skipped("oracle_x_vs_closed"));
        checks.push(Check::skipped("profile_invariance"));
    }
    checks
}

/// Conditions 1, 2, 3 over every candidate profile.
fn verify_conditions(sig: &PrimePowerSignature) -> Check {
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
    let mut candidates = 0u64;
    let mut agreeing = 0u64;
    loop {
        let mut blocks = Vec::with_capacity(widths.len());
        let mut offset = 0;
        for &width in &widths {
            blocks.push(entries[offset..offset + width].to_vec());
            offset += width;
        }
        let delta = DeltaProfile::from_blocks(blocks, sig).expect("entries within bounds");
        let c1 = condition1(&entries, sig);
        if c1 == condition2(&delta, sig) && c1 == condition3(&delta, sig) {
            agreeing += 1;
        }
        candidates += 1;
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
            break;
        }
    }
    Check::compare("conditions_agree", candidates, agreeing)
}

/// Formula-vs-oracle over every (subgroup, homomorphism) pair, plus the
/// oracle-route subgroup count and profile invariance.
fn verify_oracle(
    sig: &PrimePowerSignature,
    cap_enum: u64,
    cap_end: u64,
    closed_subgroups: &BigUint,
) -> Vec<Check> {
    let subgroups = enumerate_cyclic_subgroups(sig, cap_enum).expect("order under cap");
    let mut pairs = 0u64;
    let mut agreeing = 0u64;
    let mut oracle_members = 0u64;
    let mut by_profile: std::collections::BTreeMap<Vec<u32>, bool> =
        std::collections::BTreeMap::new();
    let mut invariant_profiles = true;
    let mut memberships_agree = 0u64;
    for subgroup in &subgroups {
        let images = endomorphism_image_set(subgroup, sig, cap_end).expect("endos under cap");
        let in_x = images.achieved_count() < kernel_size(sig, subgroup.order_exponent());
        oracle_members += u64::from(in_x);
        memberships_agree += u64::from(has_nonextendable_hom(subgroup, sig) == in_x);
        let profile = valuation_profile(subgroup, sig).expanded();
        invariant_profiles &= *by_profile.entry(profile).or_insert(in_x) == in_x;
        for hom in enumerate_homs(subgroup, sig, cap_enum).expect("order under cap") {
            let by_oracle = images.contains(hom.image(), sig);
            agreeing += u64::from(is_extendable_formula(&hom, sig) == by_oracle);
            pairs += 1;
        }
    }
    vec![
        Check::compare("oracle_agreement", pairs, agreeing),
        Check::compare(
            "subgroup_membership_agreement",
            subgroups.len(),
            memberships_agree,
        ),
        Check::compare("oracle_x_vs_closed", closed_subgroups, oracle_members),
        Check::compare(
            "profile_invariance",
            by_profile.len(),
            if invariant_profiles {
                by_profile.len()
            } else {
                0
            },
        ),
    ]
}

fn verify_composite(spec: &CompositeGroupSpec, cap_enum: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    let closed = cqi_core::counting::count_X_composite(spec);
    let verdict = is_cyclic_quasi_injective(spec);
    let order_ok = spec.order_u64().map(|o| o <= cap_enum).unwrap_or(false);
    if order_ok {
        let brute = count_X_composite_enumeration(spec, cap_enum).expect("order under cap");
        checks.push(Check::compare(
            "inclusion_exclusion_vs_brute",
            &closed.total,
            brute.x_members,
        ));
        checks.push(Check::compare(
            "cqi_vs_brute",
            verdict.cqi,
            brute.x_members == 0,
        ));
        let census_product: BigUint = crt_decompose(spec)
            .values()
            .map(count_cyclic_subgroups)
            .product();
        checks.push(Check::compare(
            "cyclic_census_product",
            census_product,
            brute.cyclic_subgroups,
        ));
    } else {
        for name in [
            "inclusion_exclusion_vs_brute",
            "cqi_vs_brute",
            "cyclic_census_product",
        ] {
            checks.push(Check::skipped(name));
        }
    }
    checks
}

pub fn cmd_verify(
    spec_text: &str,
    oracle: bool,
    cap_enum: u64,
    cap_end: u64,
    timestamps: bool,
) -> CmdResult {
    let spec = parse_group_spec(spec_text)?;
    let checks = match &spec {
        GroupSpec::PPrimary(sig) => verify_p_primary(sig, cap_enum, cap_end),
        GroupSpec::Composite(composite) => verify_composite(composite, cap_enum),
    };
    let failed = checks.iter().any(|check| check.status == "fail");
    let skipped = checks.iter().any(|check| check.status == "skipped");
    let mut object = Map::new();
    object.insert("spec".into(), json!(spec.to_string()));
    object.insert("passed".into(), json!(!failed));
    object.insert(
        "checks".into(),
        Value::Array(checks.iter().map(Check::to_json).collect()),
    );
    let mut value = Value::Object(object);
    stamp(&mut value, timestamps);
    let exit = if failed {
        1
    } else if skipped && oracle {
        // cap exceeded in a required check
        3
    } else {
        0
    };
    Ok((render(value), exit))
}

// ---------------------------------------------------------------------------
// perm
// ---------------------------------------------------------------------------

pub fn cmd_perm(n: u32, cap_enum: u64, timestamps: bool) -> CmdResult {
    let report = verify_triple_identity(n, cap_enum)?;
    let mut value = report.to_json();
    stamp(&mut value, timestamps);
    Ok((render(value), if report.equal { 0 } else { 1 }))
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn masked_json(report: &CountReport, modes: &[Mode], timestamps_placeholder: bool) -> Value {
    let _ = timestamps_placeholder;
    let mut value = report.to_json();
    let object = value.as_object_mut().expect("report is an object");
    if !modes.contains(&Mode::Classes) {
        object.remove("classes");
    }
    if !modes.contains(&Mode::Subgroups) {
        object.remove("subgroups");
    }
    if !modes.contains(&Mode::Cqi) {
        object.remove("cqi");
    }
    if !modes.contains(&Mode::Classes) && !modes.contains(&Mode::Subgroups) {
        object.remove("terms");
    }
    value
}

fn masked_csv_row(report: &CountReport, modes: &[Mode]) -> String {
    let classes = if modes.contains(&Mode::Classes) {
        report
            .classes
            .as_ref()
            .map(|c| c.to_string())
            .unwrap_or_default()
    } else {
        String::new()
    };
    let subgroups = if modes.contains(&Mode::Subgroups) {
        report.subgroups.to_string()
    } else {
        String::new()
    };
    let cqi = if modes.contains(&Mode::Cqi) {
        report.cqi.to_string()
    } else {
        String::new()
    };
    format!(
        "{},{},{},{},{}",
        report.spec,
        report.p.map(|p| p.to_string()).unwrap_or_default(),
        classes,
        subgroups,
        cqi
    )
}

pub fn cmd_sweep(
    max_order: u64,
    primes: &[u64],
    modes: &[Mode],
    format: Format,
    cap_enum: u64,
    cap_end: u64,
    timestamps: bool,
) -> CmdResult {
    let _ = cap_end;
    let mut primes: Vec<u64> = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    for &p in &primes {
        if !is_prime(p) {
            return Err(Error::NonPrime { p });
        }
    }
    let verify = modes.contains(&Mode::Verify);
    let mut mismatch = false;
    let mut reports = Vec::new();
    for &p in &primes {
        for sig in enumerate_signatures(p, max_order)? {
            let report = CountReport::closed_form(&sig);
            if verify {
                match count_X_enumeration(&sig, cap_enum) {
                    Ok(enumeration) => {
                        let ok = BigUint::from(enumeration.subgroup_count()) == report.subgroups
                            && report.classes
                                == Some(BigUint::from(enumeration.class_count()));
                        if !ok {
                            eprintln!(
                                "cqi: sweep verification FAILED for {}: closed {} vs enumerated {}",
                                report.spec,
                                report.subgroups,
                                enumeration.subgroup_count()
                            );
                            mismatch = true;
                        }
                    }
                    Err(Error::CapExceeded { .. }) => {
                        eprintln!(
                            "cqi: warning: sweep verification skipped for {} (cap exceeded)",
                            report.spec
                        );
                    }
                    Err(other) => return Err(other),
                }
            }
            reports.push(report);
        }
    }
    let text = match format {
        Format::Json => {
            let rows: Vec<Value> = reports
                .iter()
                .map(|report| masked_json(report, modes, timestamps))
                .collect();
            if timestamps {
                let mut object = Map::new();
                object.insert("rows".into(), Value::Array(rows));
                let mut value = Value::Object(object);
                stamp(&mut value, true);
                render(value)
            } else {
                render(Value::Array(rows))
            }
        }
        Format::Csv => {
            let mut text = String::from(CSV_HEADER);
            text.push('\n');
            for report in &reports {
                text.push_str(&masked_csv_row(report, modes));
                text.push('\n');
            }
            text
        }
    };
    Ok((text, if mismatch { 1 } else { 0 }))
}
