use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::fp::{all_points, check_prime, enumerate_family_over_fp, CompiledSystem, EnumerateOptions, FpSolution};
use crate::algebra::{OperatorMatrix, TernaryStructure};
use crate::error::{ScalarError, SolverError};
use crate::operators::{ClassTag, Family, OperatorClass, WEIGHT_VAR};
use crate::scalar::modp::{reduce_mod_p, RootResidues};

/// Comparison of published families against the full F_p solution set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompletenessReport {
    pub p: u64,
    pub class: ClassTag,
    pub weights: Vec<u64>,
    /// Distinct family instances that satisfy the identity (|S_F|).
    pub family_instances: u64,
    /// Size of the full solution set (|S_all|).
    pub total: u64,
    pub containment: bool,
    pub missing_count: u64,
    /// First elements of `S_all \ S_F` in lexicographic order.
    pub missing: Vec<FpSolution>,
    pub extraneous_count: u64,
    pub extraneous: Vec<FpSolution>,
    /// Parameter points skipped because a denominator vanishes mod p.
    pub skipped_points: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompletenessOptions {
    pub witness_limit: usize,
    pub guard: u128,
}

impl Default for CompletenessOptions {
    fn default() -> Self {
        CompletenessOptions { witness_limit: 32, guard: super::fp::DEFAULT_GUARD }
    }
}

fn family_params(family: &[OperatorMatrix]) -> Vec<String> {
    let mut names: BTreeSet<String> = BTreeSet::new();
    for m in family {
        names.extend(m.variables().iter().map(|v| v.to_string()));
    }
    names.remove(WEIGHT_VAR);
    names.into_iter().collect()
}

fn uses_weight(family: &[OperatorMatrix]) -> bool {
    family.iter().any(|m| m.variables().iter().any(|v| &**v == WEIGHT_VAR))
}

/// Instantiates every family at every parameter point of F_p and compares with the
/// enumerated solution set.
pub fn completeness_report(
    t: &TernaryStructure,
    class: &OperatorClass,
    families: &[Vec<OperatorMatrix>],
    p: u64,
    weights: &[u64],
    opts: CompletenessOptions,
) -> Result<CompletenessReport, SolverError> {
    completeness_report_family(Family::Single(t), class, families, p, weights, opts)
}

/// [`completeness_report`] for a single bracket or a compatible pair.
pub fn completeness_report_family(
    target: Family<'_>,
    class: &OperatorClass,
    families: &[Vec<OperatorMatrix>],
    p: u64,
    weights: &[u64],
    opts: CompletenessOptions,
) -> Result<CompletenessReport, SolverError> {
    check_prime(p)?;
    let roots = RootResidues::new(p)?;
    let sys = CompiledSystem::family(target, class, &roots)?;
    let n = sys.dim;
    let needs_weight = sys.weighted || families.iter().any(|f| uses_weight(f));
    let sweep: Vec<u64> = if !needs_weight {
        Vec::new()
    } else if weights.is_empty() {
        (0..p).collect()
    } else {
        let mut w: Vec<u64> = weights.iter().map(|x| x % p).collect();
        w.sort_unstable();
        w.dedup();
        w
    };
    let all = enumerate_family_over_fp(
        target,
        class,
        p,
        &sweep,
        EnumerateOptions { count_only: false, guard: opts.guard },
    )?;
    let all_set: BTreeSet<&FpSolution> = all.solutions.iter().collect();
    let tag_weight = |w: Option<u64>| if sys.weighted { w } else { None };

    let mut found: BTreeSet<FpSolution> = BTreeSet::new();
    let mut extraneous: BTreeSet<FpSolution> = BTreeSet::new();
    let mut skipped = 0u64;
    let weight_points: Vec<Option<u64>> =
        if sweep.is_empty() { vec![None] } else { sweep.iter().map(|&w| Some(w)).collect() };
    for family in families {
        let params = family_params(family);
        let points = (p as u128).checked_pow(params.len() as u32).unwrap_or(u128::MAX);
        if points.saturating_mul(weight_points.len() as u128) > opts.guard {
            return Err(SolverError::SearchSpaceTooLarge { candidates: points, limit: opts.guard });
        }
        for w in &weight_points {
            for point in all_points(p, params.len()) {
                let mut assignment: BTreeMap<String, u64> =
                    params.iter().cloned().zip(point.iter().copied()).collect();
                if let Some(w) = w {
                    assignment.insert(WEIGHT_VAR.to_string(), *w);
                }
                let mut entries = Vec::with_capacity(family.len() * n * n);
                let mut vanished = false;
                'mats: for m in family {
                    for e in m.entries() {
                        match reduce_mod_p(e, &roots, &assignment) {
                            Ok(v) => entries.push(v),
                            Err(ScalarError::NonInvertibleDenominator(_)) => {
                                vanished = true;
                                break 'mats;
                            }
                            Err(err) => return Err(err.into()),
                        }
                    }
                }
                if vanished {
                    skipped += 1;
                    continue;
                }
                let sol = FpSolution { weight: tag_weight(*w), entries };
                if sys.satisfied(&sol.entries, *w) {
                    found.insert(sol);
                } else {
                    extraneous.insert(sol);
                }
            }
        }
    }
    let missing: Vec<FpSolution> = all.solutions.iter().filter(|s| !found.contains(*s)).cloned().collect();
    debug_assert!(found.iter().all(|s| all_set.contains(s)));
    Ok(CompletenessReport {
        p,
        class: class.tag,
        weights: sweep,
        family_instances: found.len() as u64,
        total: all.count,
        containment: extraneous.is_empty(),
        missing_count: missing.len() as u64,
        missing: missing.into_iter().take(opts.witness_limit).collect(),
        extraneous_count: extraneous.len() as u64,
        extraneous: extraneous.into_iter().take(opts.witness_limit).collect(),
        skipped_points: skipped,
    })
}
