use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{BinaryStructure, OperatorMatrix, ResidualReport, TernaryStructure};
use crate::error::{ScalarError, SolverError};
use crate::operators::{
    binary_operator_residual, operator_residual, operator_residual_pair, ClassTag, Family, OperatorClass, WEIGHT_VAR,
};
use crate::scalar::modp::{pow_mod, reduce_field, RootResidues};
use crate::scalar::RatFunc;

/// Primes accepted by the enumerator.
pub const PRIME_ALLOWLIST: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Default bound on `p^(unknowns)` per weight value.
pub const DEFAULT_GUARD: u128 = 1_000_000_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FpSolution {
    /// Weight residue, for weighted classes.
    pub weight: Option<u64>,
    /// Operator entries in unknown order: matrix, then row, then column.
    pub entries: Vec<u64>,
}

impl FpSolution {
    /// Matrices of the tuple as rows of residues.
    pub fn matrices(&self, n: usize) -> Vec<Vec<Vec<u64>>> {
        self.entries.chunks(n * n).map(|m| m.chunks(n).map(<[u64]>::to_vec).collect()).collect()
    }

    pub fn to_operators(&self, n: usize) -> Vec<OperatorMatrix> {
        self.entries
            .chunks(n * n)
            .map(|m| {
                OperatorMatrix::from_rows(
                    m.chunks(n).map(|r| r.iter().map(|&x| RatFunc::from_i64(x as i64)).collect()).collect(),
                )
                .expect("square")
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FpSolutionSet {
    pub p: u64,
    pub class: ClassTag,
    pub weights: Vec<u64>,
    /// Empty in count-only mode.
    pub solutions: Vec<FpSolution>,
    pub count: u64,
}

#[derive(Clone, Debug)]
struct Term {
    coef: u64,
    factors: Vec<(usize, u32)>,
}

/// Residual system of a class compiled to polynomials over F_p in the operator entries.
#[derive(Clone, Debug)]
pub struct CompiledSystem {
    pub p: u64,
    pub dim: usize,
    pub tuple_len: usize,
    pub class: ClassTag,
    /// Whether the residual depends on the weight.
    pub weighted: bool,
    eqs: Vec<Vec<Term>>,
}

fn var_name(op: usize, r: usize, c: usize) -> String {
    format!("u{op}_{r}_{c}")
}

fn generic_tuple(n: usize, len: usize) -> Vec<OperatorMatrix> {
    (0..len)
        .map(|op| {
            let mut m = OperatorMatrix::zero(n);
            for r in 0..n {
                for c in 0..n {
                    m.set(r, c, RatFunc::var(&var_name(op, r, c)));
                }
            }
            m
        })
        .collect()
}

pub fn check_prime(p: u64) -> Result<(), SolverError> {
    if PRIME_ALLOWLIST.contains(&p) {
        Ok(())
    } else {
        Err(SolverError::UnsupportedPrime(p))
    }
}

impl CompiledSystem {
    fn from_report(
        report: &ResidualReport,
        class: ClassTag,
        dim: usize,
        tuple_len: usize,
        roots: &RootResidues,
    ) -> Result<Self, SolverError> {
        let p = roots.p;
        let unknowns = tuple_len * dim * dim;
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        for op in 0..tuple_len {
            for r in 0..dim {
                for c in 0..dim {
                    index.insert(var_name(op, r, c), op * dim * dim + r * dim + c);
                }
            }
        }
        index.insert(WEIGHT_VAR.to_string(), unknowns);
        let mut weighted = false;
        let mut eqs = Vec::new();
        for e in &report.entries {
            if !e.residual.den().is_one() {
                return Err(ScalarError::NonInvertibleDenominator(p).into());
            }
            let mut terms = Vec::new();
            for (m, c) in e.residual.num().terms() {
                let coef = reduce_field(c, roots)?;
                if coef == 0 {
                    continue;
                }
                let mut factors = Vec::new();
                for (v, k) in m.factors() {
                    let i = *index
                        .get(&**v)
                        .ok_or_else(|| ScalarError::MissingParameter(v.to_string()))?;
                    weighted |= i == unknowns;
                    factors.push((i, *k));
                }
                terms.push(Term { coef, factors });
            }
            if !terms.is_empty() {
                eqs.push(terms);
            }
        }
        Ok(CompiledSystem { p, dim, tuple_len, class, weighted, eqs })
    }

    /// Compiles the class residual on a constant ternary bracket.
    pub fn ternary(t: &TernaryStructure, class: &OperatorClass, roots: &RootResidues) -> Result<Self, SolverError> {
        check_prime(roots.p)?;
        t.require_constant()?;
        let len = class.tag.ternary_arity();
        let report = operator_residual(t, class, &generic_tuple(t.dim(), len))?;
        Self::from_report(&report, class.tag, t.dim(), len, roots)
    }

    /// Compiles on a single bracket or jointly on both brackets of a compatible pair.
    pub fn family(target: Family<'_>, class: &OperatorClass, roots: &RootResidues) -> Result<Self, SolverError> {
        match target {
            Family::Single(t) => Self::ternary(t, class, roots),
            Family::Pair(t1, t2) => {
                check_prime(roots.p)?;
                t1.require_constant()?;
                t2.require_constant()?;
                let len = class.tag.ternary_arity();
                let report = operator_residual_pair(t1, t2, class, &generic_tuple(t1.dim(), len))?;
                Self::from_report(&report, class.tag, t1.dim(), len, roots)
            }
        }
    }

    pub fn binary(b: &BinaryStructure, class: &OperatorClass, roots: &RootResidues) -> Result<Self, SolverError> {
        check_prime(roots.p)?;
        b.require_constant()?;
        let len = class.tag.binary_arity();
        let report = binary_operator_residual(b, class, &generic_tuple(b.dim(), len))?;
        Self::from_report(&report, class.tag, b.dim(), len, roots)
    }

    pub fn unknowns(&self) -> usize {
        self.tuple_len * self.dim * self.dim
    }

    pub fn num_equations(&self) -> usize {
        self.eqs.len()
    }

    fn eval(&self, eq: &[Term], vals: &[u64]) -> u64 {
        let p = self.p;
        let mut acc = 0;
        for t in eq {
            let mut x = t.coef;
            for &(i, k) in &t.factors {
                x = x * pow_mod(vals[i], k as u64, p) % p;
                if x == 0 {
                    break;
                }
            }
            acc += x;
        }
        acc % p
    }

    /// Whether `entries` (unknown order) satisfy every equation at weight `weight`.
    pub fn satisfied(&self, entries: &[u64], weight: Option<u64>) -> bool {
        let mut vals = entries.iter().map(|x| x % self.p).collect::<Vec<_>>();
        vals.push(weight.unwrap_or(0) % self.p);
        self.eqs.iter().all(|eq| self.eval(eq, &vals) == 0)
    }

    /// Greedy variable order: each step takes the unknown that completes the most
    /// equations, then the one occurring in the most open equations.
    fn order(&self) -> Vec<usize> {
        let u = self.unknowns();
        let vars: Vec<Vec<usize>> = self
            .eqs
            .iter()
            .map(|eq| {
                let mut v: Vec<usize> = eq.iter().flat_map(|t| t.factors.iter().map(|f| f.0)).filter(|&i| i < u).collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        let mut remaining: Vec<usize> = vars.iter().map(Vec::len).collect();
        let mut chosen = vec![false; u];
        let mut order = Vec::with_capacity(u);
        for _ in 0..u {
            let mut best: Option<(usize, usize, usize)> = None;
            for x in (0..u).filter(|&x| !chosen[x]) {
                let mut completes = 0;
                let mut occurs = 0;
                for (e, vs) in vars.iter().enumerate() {
                    if remaining[e] > 0 && vs.binary_search(&x).is_ok() {
                        occurs += 1;
                        if remaining[e] == 1 {
                            completes += 1;
                        }
                    }
                }
                let better = match best {
                    None => true,
                    Some((_, bc, bo)) => (completes, occurs) > (bc, bo),
                };
                if better {
                    best = Some((x, completes, occurs));
                }
            }
            let (x, _, _) = best.expect("unassigned variable");
            chosen[x] = true;
            order.push(x);
            for (e, vs) in vars.iter().enumerate() {
                if vs.binary_search(&x).is_ok() {
                    remaining[e] -= 1;
                }
            }
        }
        order
    }

    /// All solutions at a fixed weight, sorted; `count_only` skips collecting them.
    pub fn solve(&self, weight: Option<u64>, count_only: bool) -> (u64, Vec<FpSolution>) {
        let u = self.unknowns();
        let p = self.p;
        let order = self.order();
        let mut position = vec![0; u];
        for (d, &x) in order.iter().enumerate() {
            position[x] = d;
        }
        // Equations become checkable once the deepest unknown they use is assigned.
        let mut upfront = Vec::new();
        let mut at_depth: Vec<Vec<usize>> = vec![Vec::new(); u];
        let mut last_used = 0;
        for (e, eq) in self.eqs.iter().enumerate() {
            let deepest = eq.iter().flat_map(|t| t.factors.iter()).filter(|f| f.0 < u).map(|f| position[f.0]).max();
            match deepest {
                None => upfront.push(e),
                Some(d) => {
                    at_depth[d].push(e);
                    last_used = last_used.max(d + 1);
                }
            }
        }
        let mut vals = vec![0u64; u + 1];
        vals[u] = weight.unwrap_or(0) % p;
        if !upfront.iter().all(|&e| self.eval(&self.eqs[e], &vals) == 0) {
            return (0, Vec::new());
        }
        let search = Search { sys: self, order: &order, at_depth: &at_depth, free_from: last_used, count_only, weight };
        if u == 0 {
            let sols = if count_only { Vec::new() } else { vec![FpSolution { weight, entries: Vec::new() }] };
            return (1, sols);
        }
        let parts: Vec<(u64, Vec<FpSolution>)> = (0..p)
            .into_par_iter()
            .map(|v| {
                let mut vals = vals.clone();
                vals[order[0]] = v;
                let mut out = (0, Vec::new());
                if search.passes(0, &vals) {
                    search.descend(1, &mut vals, &mut out);
                }
                out
            })
            .collect();
        let mut count = 0;
        let mut sols = Vec::new();
        for (c, s) in parts {
            count += c;
            sols.extend(s);
        }
        sols.sort();
        (count, sols)
    }
}

struct Search<'a> {
    sys: &'a CompiledSystem,
    order: &'a [usize],
    at_depth: &'a [Vec<usize>],
    /// Depth from which no equation constrains the remaining unknowns.
    free_from: usize,
    count_only: bool,
    weight: Option<u64>,
}

impl Search<'_> {
    fn passes(&self, depth: usize, vals: &[u64]) -> bool {
        self.at_depth[depth].iter().all(|&e| self.sys.eval(&self.sys.eqs[e], vals) == 0)
    }

    fn descend(&self, depth: usize, vals: &mut Vec<u64>, out: &mut (u64, Vec<FpSolution>)) {
        let u = self.order.len();
        let p = self.sys.p;
        if depth == u {
            out.0 += 1;
            if !self.count_only {
                out.1.push(FpSolution { weight: self.weight, entries: vals[..u].to_vec() });
            }
            return;
        }
        if self.count_only && depth >= self.free_from {
            out.0 += p.pow((u - depth) as u32);
            return;
        }
        let x = self.order[depth];
        for v in 0..p {
            vals[x] = v;
            if self.passes(depth, vals) {
                self.descend(depth + 1, vals, out);
            }
        }
        vals[x] = 0;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub count_only: bool,
    pub guard: u128,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { count_only: false, guard: DEFAULT_GUARD }
    }
}

fn guard(p: u64, unknowns: usize, runs: usize, limit: u128) -> Result<(), SolverError> {
    let per_run = (p as u128).checked_pow(unknowns as u32).unwrap_or(u128::MAX);
    let candidates = per_run.saturating_mul(runs as u128);
    if per_run > limit {
        return Err(SolverError::SearchSpaceTooLarge { candidates, limit });
    }
    Ok(())
}

/// Rejects a single search over `p^unknowns` points above the default guard.
pub(crate) fn guard_single(p: u64, unknowns: usize) -> Result<(), SolverError> {
    guard(p, unknowns, 1, DEFAULT_GUARD)
}

fn run(sys: &CompiledSystem, weights: &[u64], opts: EnumerateOptions) -> Result<FpSolutionSet, SolverError> {
    let p = sys.p;
    let weights: Vec<u64> = if sys.weighted {
        let mut w: Vec<u64> = if weights.is_empty() { (0..p).collect() } else { weights.iter().map(|x| x % p).collect() };
        w.sort_unstable();
        w.dedup();
        w
    } else {
        Vec::new()
    };
    guard(p, sys.unknowns(), weights.len().max(1), opts.guard)?;
    let mut count = 0;
    let mut solutions = Vec::new();
    if weights.is_empty() {
        let (c, s) = sys.solve(None, opts.count_only);
        count = c;
        solutions = s;
    } else {
        for &w in &weights {
            let (c, s) = sys.solve(Some(w), opts.count_only);
            count += c;
            solutions.extend(s);
        }
    }
    Ok(FpSolutionSet { p, class: sys.class, weights, solutions, count })
}

/// Exhaustive search over all operator tuples over F_p on a constant ternary bracket.
///
/// A residual that depends on the weight is solved once per residue in `weights`
/// (all residues when empty); otherwise `weights` is ignored.
pub fn enumerate_over_fp(
    t: &TernaryStructure,
    class: &OperatorClass,
    p: u64,
    weights: &[u64],
    opts: EnumerateOptions,
) -> Result<FpSolutionSet, SolverError> {
    check_prime(p)?;
    guard(p, t.dim() * t.dim() * class.tag.ternary_arity(), 1, opts.guard)?;
    let roots = RootResidues::new(p)?;
    let sys = CompiledSystem::ternary(t, class, &roots)?;
    run(&sys, weights, opts)
}

/// [`enumerate_over_fp`] for a single bracket or a compatible pair.
pub fn enumerate_family_over_fp(
    target: Family<'_>,
    class: &OperatorClass,
    p: u64,
    weights: &[u64],
    opts: EnumerateOptions,
) -> Result<FpSolutionSet, SolverError> {
    check_prime(p)?;
    let n = match target {
        Family::Single(t) | Family::Pair(t, _) => t.dim(),
    };
    guard(p, n * n * class.tag.ternary_arity(), 1, opts.guard)?;
    let roots = RootResidues::new(p)?;
    let sys = CompiledSystem::family(target, class, &roots)?;
    run(&sys, weights, opts)
}

pub fn enumerate_binary_over_fp(
    b: &BinaryStructure,
    class: &OperatorClass,
    p: u64,
    weights: &[u64],
    opts: EnumerateOptions,
) -> Result<FpSolutionSet, SolverError> {
    check_prime(p)?;
    guard(p, b.dim() * b.dim() * class.tag.binary_arity(), 1, opts.guard)?;
    let roots = RootResidues::new(p)?;
    let sys = CompiledSystem::binary(b, class, &roots)?;
    run(&sys, weights, opts)
}

/// Every tuple in `F_p^unknowns`, in lexicographic order.
pub fn all_points(p: u64, unknowns: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = p.pow(unknowns as u32);
    (0..total).map(move |mut k| {
        let mut v = vec![0; unknowns];
        for slot in (0..unknowns).rev() {
            v[slot] = k % p;
            k /= p;
        }
        v
    })
}
