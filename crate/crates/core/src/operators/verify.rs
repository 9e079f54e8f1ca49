use std::collections::BTreeMap;
use std::fmt;

use super::{binary_operator_residual, operator_residual, operator_residual_pair, OperatorClass, Variant, WEIGHT_VAR};
use crate::algebra::{BinaryStructure, OperatorMatrix, ResidualEntry, ResidualReport, TernaryStructure};
use crate::error::AlgebraError;
use crate::scalar::{FieldElement, Polynomial};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// First nonzero residual entry.
    Fail(ResidualEntry),
    Skipped(String),
}

impl Verdict {
    pub fn from_report(r: &ResidualReport) -> Self {
        match r.entries.first() {
            None => Verdict::Pass,
            Some(e) => Verdict::Fail(e.clone()),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail(_) => "FAIL",
            Verdict::Skipped(_) => "SKIPPED",
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("PASS"),
            Verdict::Fail(e) => {
                let idx: Vec<String> = e.indices.iter().map(ToString::to_string).collect();
                write!(f, "FAIL at ({}) coordinate {}", idx.join(","), e.coordinate)?;
                if !e.equation.is_empty() {
                    write!(f, " [{}]", e.equation)?;
                }
                write!(f, ": {}", e.residual)
            }
            Verdict::Skipped(reason) => write!(f, "SKIPPED ({reason})"),
        }
    }
}

/// Target of a family check: one ternary bracket or a compatible pair.
#[derive(Clone, Copy, Debug)]
pub enum Family<'a> {
    Single(&'a TernaryStructure),
    Pair(&'a TernaryStructure, &'a TernaryStructure),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyVerdict {
    pub verdict: Verdict,
    /// Verdict with the formal weight set to 0, for weighted classes with symbolic weight.
    pub lambda_zero: Option<Verdict>,
    pub weight: String,
    pub variant: Variant,
    pub side_conditions: Vec<Polynomial>,
    pub report: ResidualReport,
}

fn at_weight_zero(class: &OperatorClass) -> Option<OperatorClass> {
    if !class.tag.is_weighted() || !class.weight.variables().iter().any(|v| &**v == WEIGHT_VAR) {
        return None;
    }
    let zero = BTreeMap::from([(WEIGHT_VAR.to_string(), FieldElement::zero())]);
    let weight = class.weight.substitute_partial(&zero).ok()?;
    Some(OperatorClass { weight, ..class.clone() })
}

fn finish(class: &OperatorClass, report: ResidualReport, lambda_zero: Option<Verdict>) -> FamilyVerdict {
    FamilyVerdict {
        verdict: Verdict::from_report(&report),
        lambda_zero,
        weight: if class.tag.is_weighted() { class.weight.to_string() } else { String::new() },
        variant: class.variant,
        side_conditions: report.side_conditions.clone(),
        report,
    }
}

/// Containment check of an operator family, identically in every free parameter.
pub fn verify_family(
    target: Family<'_>,
    class: &OperatorClass,
    ops: &[OperatorMatrix],
) -> Result<FamilyVerdict, AlgebraError> {
    let run = |c: &OperatorClass| match target {
        Family::Single(t) => operator_residual(t, c, ops),
        Family::Pair(t1, t2) => operator_residual_pair(t1, t2, c, ops),
    };
    let report = run(class)?;
    let lambda_zero = match at_weight_zero(class) {
        Some(c) => Some(Verdict::from_report(&run(&c)?)),
        None => None,
    };
    Ok(finish(class, report, lambda_zero))
}

pub fn verify_family_binary(
    b: &BinaryStructure,
    class: &OperatorClass,
    ops: &[OperatorMatrix],
) -> Result<FamilyVerdict, AlgebraError> {
    let report = binary_operator_residual(b, class, ops)?;
    let lambda_zero = match at_weight_zero(class) {
        Some(c) => Some(Verdict::from_report(&binary_operator_residual(b, &c, ops)?)),
        None => None,
    };
    Ok(finish(class, report, lambda_zero))
}
