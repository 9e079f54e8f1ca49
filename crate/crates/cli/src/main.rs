//! `leibniz`: command-line front end for the structure-constant toolkit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use leibniz_core::algebra::{binary_compatibility_residual, OperatorMatrix, ResidualReport, Structure, TernaryStructure};
use leibniz_core::catalog::{
    catalog_check, catalog_invariants, dimension_corollary_audit, distinguishability_audit, invariants,
    invariants_pair, Catalog, CheckOptions, EntryKind, InvariantRecord, ListFilter, DEFAULT_ALPHA,
};
use leibniz_core::constructions::{
    averaging_induced_binary, averaging_induced_ternary, construct_tl, lift_check, nijenhuis_deformed_binary,
    LiftSource,
};
use leibniz_core::error::DocumentError;
use leibniz_core::io::{
    algebra_from_document, emit_algebra, from_json, operator_from_document, report_text, to_canonical_json, Algebra,
    AlgebraDocument, OperatorDocument, OperatorSpec,
};
use leibniz_core::operators::{
    binary_linear_system, linear_system, verify_family, verify_family_binary, ClassTag, Family, FamilyVerdict,
    OperatorClass, Variant, Verdict,
};
use leibniz_core::scalar::{make_field, parse_expr, FieldDescriptor, FieldElement, Polynomial, RatFunc};
use leibniz_core::solvers::{
    completeness_report_family, enumerate_binary_over_fp, enumerate_family_over_fp, solve_linear,
    CompletenessOptions, EnumerateOptions, DEFAULT_GUARD,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DEFAULT_SEED: u64 = 20240607;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "leibniz", version, about = "Exact checks for ternary and binary Leibniz algebras and their operators")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Extra square roots adjoined when reading documents, comma separated (e.g. -1,2).
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    field: Vec<i64>,
    /// Weight expression (operator checks) or weight residue (finite-field commands).
    #[arg(long, global = true, allow_hyphen_values = true)]
    weight: Option<String>,
    /// Last term of the Nijenhuis-deformed bracket.
    #[arg(long, global = true, value_parser = parse_variant)]
    variant: Option<Variant>,
    /// Prime for finite-field commands; enables the completeness step of `catalog check`.
    #[arg(long, global = true)]
    prime: Option<u64>,
    /// Parameter value substituted into algebra documents, e.g. alpha=2 (repeatable).
    #[arg(long = "set", global = true, value_name = "NAME=VALUE", allow_hyphen_values = true)]
    set: Vec<String>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse()
}

fn parse_class(s: &str) -> Result<ClassTag, String> {
    s.parse()
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Leibniz identity of an algebra document, or compatibility of a pair.
    Verify { algebra: PathBuf },
    /// Operator checks, exact solving and finite-field enumeration.
    #[command(subcommand)]
    Operator(OperatorCmd),
    /// Brackets built from a binary algebra or an operator.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Built-in classification tables and their audit.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Invariant record of an algebra document, or of the whole catalog with audits.
    Invariants {
        algebra: Option<PathBuf>,
        /// Compute for every catalog algebra and run the distinguishability and dimension audits.
        #[arg(long)]
        catalog: bool,
        /// Value substituted for `alpha`.
        #[arg(long, default_value_t = DEFAULT_ALPHA, allow_negative_numbers = true)]
        alpha: i64,
        /// Random invertible basis changes to test invariance on (uses --seed).
        #[arg(long, default_value_t = 0)]
        basis_trials: usize,
    },
}

#[derive(Subcommand, Debug)]
enum OperatorCmd {
    /// Containment check of an operator document on an algebra document.
    Verify { algebra: PathBuf, operator: PathBuf },
    /// Exact solution space of a linear class.
    Solve {
        algebra: PathBuf,
        #[arg(long, value_parser = parse_class)]
        class: ClassTag,
    },
    /// Every operator tuple over F_p satisfying the class identity.
    Enumerate {
        algebra: PathBuf,
        #[arg(long, value_parser = parse_class)]
        class: ClassTag,
        #[arg(long)]
        count_only: bool,
        #[command(flatten)]
        guard: Guard,
    },
    /// Compares operator families with the full F_p solution set.
    Complete {
        algebra: PathBuf,
        /// Operator documents, one family each; all must share a class.
        #[arg(required = true)]
        operators: Vec<PathBuf>,
        #[command(flatten)]
        guard: Guard,
    },
    /// Lifts a binary operator to the associated ternary algebra and checks it there.
    Lift { algebra: PathBuf, operator: PathBuf },
}

#[derive(Args, Debug)]
struct Guard {
    /// Largest search space allowed per weight value.
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    guard: u128,
}

#[derive(Subcommand, Debug)]
enum ConstructCmd {
    /// Ternary bracket [x,[y,z]] of a binary Leibniz algebra.
    Tl {
        algebra: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Ternary bracket [bx, by, z] from an averaging operator.
    AvgTernary {
        algebra: PathBuf,
        operator: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Binary bracket [bx, y] from an averaging operator.
    AvgBinary {
        algebra: PathBuf,
        operator: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Pair of a binary bracket and its Nijenhuis deformation.
    Nijenhuis {
        algebra: PathBuf,
        operator: PathBuf,
        #[arg(long)]
        force: bool,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCmd {
    /// Entry ids in canonical order.
    List {
        #[arg(long, value_parser = |s: &str| s.parse::<EntryKind>())]
        kind: Option<EntryKind>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, value_parser = parse_class)]
        class: Option<ClassTag>,
    },
    /// One entry in data-file form.
    Show { id: String },
    /// Conformance audit of the given entries, or of all entries.
    Check {
        ids: Vec<String>,
        #[arg(long)]
        all: bool,
        /// Also write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Value substituted for `alpha` in the completeness step.
        #[arg(long, default_value_t = DEFAULT_ALPHA, allow_negative_numbers = true)]
        alpha: i64,
    },
}

/// Errors from bad input: exit code 2.
#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = Result<(String, bool), InputError>;

struct Ctx {
    format: Format,
    field: Vec<i64>,
    weight: Option<String>,
    variant: Option<Variant>,
    prime: Option<u64>,
    seed: u64,
    values: BTreeMap<String, FieldElement>,
}

fn read(path: &PathBuf) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn with_extra_roots(roots: &mut Vec<i64>, extra: &[i64]) {
    for r in extra {
        if !roots.contains(r) {
            roots.push(*r);
        }
    }
}

fn in_file(path: &PathBuf, e: DocumentError) -> InputError {
    InputError(format!("{}: {e}", path.display()))
}

impl Ctx {
    fn algebra(&self, path: &PathBuf) -> Result<Algebra, InputError> {
        let mut doc: AlgebraDocument = from_json(&read(path)?).map_err(|e| in_file(path, e))?;
        with_extra_roots(&mut doc.roots, &self.field);
        let a = algebra_from_document(&doc).map_err(|e| in_file(path, e))?;
        if self.values.is_empty() {
            return Ok(a);
        }
        let v = &self.values;
        Ok(match a {
            Algebra::Ternary(t) => Algebra::Ternary(t.instantiate(v)?),
            Algebra::Binary(b) => Algebra::Binary(b.instantiate(v)?),
            Algebra::TernaryPair(t1, t2) => Algebra::TernaryPair(t1.instantiate(v)?, t2.instantiate(v)?),
            Algebra::BinaryPair(b1, b2) => Algebra::BinaryPair(b1.instantiate(v)?, b2.instantiate(v)?),
        })
    }

    fn operator(&self, path: &PathBuf, algebra: Option<&Algebra>) -> Result<OperatorSpec, InputError> {
        let mut doc: OperatorDocument = from_json(&read(path)?).map_err(|e| in_file(path, e))?;
        with_extra_roots(&mut doc.roots, &self.field);
        if let Some(a) = algebra {
            with_extra_roots(&mut doc.roots, algebra_roots(a));
        }
        let mut spec = operator_from_document(&doc).map_err(|e| in_file(path, e))?;
        if let Some(v) = self.variant {
            spec.class.variant = v;
        }
        if let Some(w) = &self.weight {
            let mut params = spec.params.clone();
            for v in parse_expr(w, &spec.field, None)?.variables() {
                if !params.iter().any(|p| **p == *v) {
                    params.push(v.to_string());
                }
            }
            spec.class.weight = parse_expr(w, &spec.field, Some(&params))?;
            spec.params = params;
        }
        if let Some(a) = algebra {
            if spec.matrices[0].dim() != a.dim() {
                return Err(InputError(format!(
                    "{}: operator size {} does not match algebra dimension {}",
                    path.display(),
                    spec.matrices[0].dim(),
                    a.dim()
                )));
            }
        }
        Ok(spec)
    }

    /// Weight residues for finite-field commands.
    fn weights(&self, p: u64) -> Result<Vec<u64>, InputError> {
        match &self.weight {
            None => Ok(Vec::new()),
            Some(w) => {
                let k: i64 = w.trim().parse().map_err(|_| InputError(format!("--weight `{w}` is not an integer residue")))?;
                Ok(vec![k.rem_euclid(p as i64) as u64])
            }
        }
    }

    fn emit<T: serde::Serialize>(&self, value: &T, text: impl FnOnce() -> String) -> String {
        match self.format {
            Format::Json => to_canonical_json(value),
            Format::Text => text(),
        }
    }
}

fn algebra_roots(a: &Algebra) -> &[i64] {
    match a {
        Algebra::Ternary(t) | Algebra::TernaryPair(t, _) => t.field().roots(),
        Algebra::Binary(b) | Algebra::BinaryPair(b, _) => b.field().roots(),
    }
}

fn residual_output(ctx: &Ctx, report: &ResidualReport) -> (String, bool) {
    let ok = report.identically_zero;
    (ctx.emit(report, || report_text(report)), ok)
}

fn cmd_verify(ctx: &Ctx, path: &PathBuf) -> Outcome {
    let report = ctx.algebra(path)?.residual()?;
    Ok(residual_output(ctx, &report))
}

fn family_text(v: &FamilyVerdict) -> String {
    let mut s = format!("verdict: {}\n", v.verdict);
    if let Some(z) = &v.lambda_zero {
        let _ = writeln!(s, "at lambda = 0: {z}");
    }
    if !v.weight.is_empty() {
        let _ = writeln!(s, "weight: {}", v.weight);
    }
    for c in &v.side_conditions {
        let _ = writeln!(s, "side condition: {c} != 0");
    }
    s.push_str(&report_text(&v.report));
    s
}

fn cmd_operator_verify(ctx: &Ctx, a_path: &PathBuf, o_path: &PathBuf) -> Outcome {
    let a = ctx.algebra(a_path)?;
    let spec = ctx.operator(o_path, Some(&a))?;
    let v = match &a {
        Algebra::Ternary(t) => verify_family(Family::Single(t), &spec.class, &spec.matrices)?,
        Algebra::TernaryPair(t1, t2) => verify_family(Family::Pair(t1, t2), &spec.class, &spec.matrices)?,
        Algebra::Binary(b) => verify_family_binary(b, &spec.class, &spec.matrices)?,
        Algebra::BinaryPair(..) => {
            return Err(InputError("operator checks on binary pairs are not supported; use `operator lift`".into()))
        }
    };
    let ok = v.verdict.is_pass();
    Ok((ctx.emit(&v, || family_text(&v)), ok))
}

#[derive(serde::Serialize)]
struct SolveOutput {
    class: ClassTag,
    unknowns: usize,
    rank: usize,
    dimension: usize,
    basis: Vec<Vec<Vec<Vec<String>>>>,
}

fn matrix_strings(m: &OperatorMatrix) -> Vec<Vec<String>> {
    m.rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

fn cmd_solve(ctx: &Ctx, path: &PathBuf, class: ClassTag) -> Outcome {
    let a = ctx.algebra(path)?;
    let c = weight_class(ctx, class)?;
    let sys = match &a {
        Algebra::Ternary(t) => linear_system(t, &c)?,
        Algebra::Binary(b) => binary_linear_system(b, &c)?,
        _ => return Err(InputError("solve takes a single bracket".into())),
    };
    let ns = solve_linear(&sys);
    let out = SolveOutput {
        class,
        unknowns: ns.unknowns,
        rank: ns.rank,
        dimension: ns.dimension,
        basis: ns.operator_basis(&sys).iter().map(|ops| ops.iter().map(matrix_strings).collect()).collect(),
    };
    Ok((
        ctx.emit(&out, || {
            let mut s = format!("{class}: dimension {} (rank {} of {} unknowns)\n", out.dimension, out.rank, out.unknowns);
            for (i, ops) in ns.operator_basis(&sys).iter().enumerate() {
                let _ = writeln!(s, "basis vector {}:", i + 1);
                for m in ops {
                    let _ = writeln!(s, "{m}");
                }
            }
            s
        }),
        true,
    ))
}

/// The class with `--weight` as its weight (default `0` for linear solving).
fn weight_class(ctx: &Ctx, class: ClassTag) -> Result<OperatorClass, InputError> {
    let w = match &ctx.weight {
        Some(w) => parse_expr(w, &FieldDescriptor::rationals(), None)?,
        None => RatFunc::zero(),
    };
    let mut c = OperatorClass::with_weight(class, w);
    if let Some(v) = ctx.variant {
        c.variant = v;
    }
    Ok(c)
}

fn constant_single(a: &Algebra) -> Result<Family<'_>, InputError> {
    match a {
        Algebra::Ternary(t) => Ok(Family::Single(t)),
        Algebra::TernaryPair(t1, t2) => Ok(Family::Pair(t1, t2)),
        _ => Err(InputError("expected a ternary algebra or pair".into())),
    }
}

fn cmd_enumerate(ctx: &Ctx, path: &PathBuf, class: ClassTag, count_only: bool, guard: u128) -> Outcome {
    let a = ctx.algebra(path)?;
    let p = ctx.prime.unwrap_or(3);
    let weights = ctx.weights(p)?;
    let mut c = OperatorClass::new(class);
    if let Some(v) = ctx.variant {
        c.variant = v;
    }
    let opts = EnumerateOptions { count_only, guard };
    let set = match &a {
        Algebra::Binary(b) => enumerate_binary_over_fp(b, &c, p, &weights, opts)?,
        other => enumerate_family_over_fp(constant_single(other)?, &c, p, &weights, opts)?,
    };
    Ok((
        ctx.emit(&set, || {
            let mut s = format!("{} solutions over F_{} for {}\n", set.count, set.p, set.class);
            for sol in &set.solutions {
                let entries: Vec<String> = sol.entries.iter().map(ToString::to_string).collect();
                match sol.weight {
                    Some(w) => {
                        let _ = writeln!(s, "  weight {w}: [{}]", entries.join(","));
                    }
                    None => {
                        let _ = writeln!(s, "  [{}]", entries.join(","));
                    }
                }
            }
            s
        }),
        true,
    ))
}

fn cmd_complete(ctx: &Ctx, path: &PathBuf, ops: &[PathBuf], guard: u128) -> Outcome {
    let a = ctx.algebra(path)?;
    let specs = ops.iter().map(|o| ctx.operator(o, Some(&a))).collect::<Result<Vec<_>, _>>()?;
    let class = specs[0].class.clone();
    if specs.iter().any(|s| s.class.tag != class.tag) {
        return Err(InputError("all operator documents must share a class".into()));
    }
    let p = ctx.prime.unwrap_or(3);
    let families: Vec<Vec<OperatorMatrix>> = specs.into_iter().map(|s| s.matrices).collect();
    let opts = CompletenessOptions { guard, ..Default::default() };
    let r = completeness_report_family(constant_single(&a)?, &class, &families, p, &ctx.weights(p)?, opts)?;
    let ok = r.containment && r.missing_count == 0;
    Ok((
        ctx.emit(&r, || {
            format!(
                "{} over F_{}: containment {}, family {} of {} solutions, missing {}, extraneous {}, skipped points {}\n",
                r.class, r.p, r.containment, r.family_instances, r.total, r.missing_count, r.extraneous_count, r.skipped_points
            )
        }),
        ok,
    ))
}

#[derive(serde::Serialize)]
struct LiftOutput {
    ternary_class: ClassTag,
    lifted: Vec<Vec<Vec<String>>>,
    verdict: Verdict,
}

fn cmd_lift(ctx: &Ctx, a_path: &PathBuf, o_path: &PathBuf) -> Outcome {
    let a = ctx.algebra(a_path)?;
    let spec = ctx.operator(o_path, Some(&a))?;
    let source = match &a {
        Algebra::Binary(b) => LiftSource::Single(b),
        Algebra::BinaryPair(b1, b2) => LiftSource::Pair(b1, b2),
        _ => return Err(InputError("lift takes a binary algebra or pair".into())),
    };
    match lift_check(source, &spec.class, &spec.matrices) {
        Ok(v) => {
            let out = LiftOutput {
                ternary_class: v.ternary_class,
                lifted: v.lifted.iter().map(matrix_strings).collect(),
                verdict: v.verdict.clone(),
            };
            let ok = v.verdict.is_pass();
            Ok((ctx.emit(&out, || format!("lift to {}: {}\n", out.ternary_class, out.verdict)), ok))
        }
        Err(e) => {
            let v = Verdict::Skipped(e.to_string());
            let out = serde_json::json!({ "verdict": v });
            Ok((ctx.emit(&out, || format!("lift: {v}\n")), false))
        }
    }
}

fn joined<const A: usize>(s: &mut Structure<A>, f: &FieldDescriptor) -> Result<(), InputError> {
    let field = s.field().join(f)?;
    s.set_field(field);
    Ok(())
}

fn construction_failure(ctx: &Ctx, e: impl std::fmt::Display) -> Outcome {
    let value = serde_json::json!({ "refused": e.to_string() });
    Ok((ctx.emit(&value, || format!("construction refused: {e}\n")), false))
}

fn cmd_construct(ctx: &Ctx, cmd: &ConstructCmd) -> Outcome {
    match cmd {
        ConstructCmd::Tl { algebra, force } => {
            let Algebra::Binary(b) = ctx.algebra(algebra)? else {
                return Err(InputError("tl takes a binary algebra".into()));
            };
            match construct_tl(&b, *force) {
                Ok(t) => Ok((emit_algebra(&Algebra::Ternary(t)), true)),
                Err(e) => construction_failure(ctx, e),
            }
        }
        ConstructCmd::AvgTernary { algebra, operator, force } => {
            let a = ctx.algebra(algebra)?;
            let Algebra::Ternary(t) = &a else {
                return Err(InputError("avg-ternary takes a ternary algebra".into()));
            };
            let spec = ctx.operator(operator, Some(&a))?;
            match averaging_induced_ternary(t, &spec.matrices[0], *force) {
                Ok(c) => {
                    let mut s = c.structure;
                    joined(&mut s, &spec.field)?;
                    note_side_conditions(&c.side_conditions);
                    Ok((emit_algebra(&Algebra::Ternary(s)), true))
                }
                Err(e) => construction_failure(ctx, e),
            }
        }
        ConstructCmd::AvgBinary { algebra, operator, force } => {
            let a = ctx.algebra(algebra)?;
            let Algebra::Binary(b) = &a else {
                return Err(InputError("avg-binary takes a binary algebra".into()));
            };
            let spec = ctx.operator(operator, Some(&a))?;
            match averaging_induced_binary(b, &spec.matrices[0], *force) {
                Ok(c) => {
                    let mut s = c.structure;
                    joined(&mut s, &spec.field)?;
                    note_side_conditions(&c.side_conditions);
                    Ok((emit_algebra(&Algebra::Binary(s)), true))
                }
                Err(e) => construction_failure(ctx, e),
            }
        }
        ConstructCmd::Nijenhuis { algebra, operator, force } => {
            let a = ctx.algebra(algebra)?;
            let Algebra::Binary(b) = &a else {
                return Err(InputError("nijenhuis takes a binary algebra".into()));
            };
            let spec = ctx.operator(operator, Some(&a))?;
            let variant = ctx.variant.unwrap_or(spec.class.variant);
            match nijenhuis_deformed_binary(b, &spec.matrices[0], variant, *force) {
                Ok(mut d) => {
                    let mut first = b.clone();
                    joined(&mut first, &spec.field)?;
                    joined(&mut d, &spec.field)?;
                    let mut params = first.params().to_vec();
                    for v in spec.matrices[0].variables() {
                        if !params.iter().any(|p| **p == *v) {
                            params.push(v.to_string());
                        }
                    }
                    first.set_params(params.clone());
                    d.set_params(params);
                    let compat = binary_compatibility_residual(&first, &d)?;
                    eprintln!("compatibility of the pair ({variant} variant): {}", Verdict::from_report(&compat));
                    Ok((emit_algebra(&Algebra::BinaryPair(first, d)), true))
                }
                Err(e) => construction_failure(ctx, e),
            }
        }
    }
}

fn note_side_conditions(side: &[Polynomial]) {
    for s in side {
        eprintln!("side condition: {s} != 0");
    }
}

fn cmd_catalog(ctx: &Ctx, cmd: &CatalogCmd) -> Outcome {
    let catalog = Catalog::builtin();
    match cmd {
        CatalogCmd::List { kind, dim, class } => {
            let ids = catalog.list(&ListFilter { kind: *kind, dim: *dim, class: *class });
            Ok((ctx.emit(&ids, || ids.iter().map(|i| format!("{i}\n")).collect()), true))
        }
        CatalogCmd::Show { id } => match catalog.show(id) {
            Some(s) => Ok((s, true)),
            None => Err(InputError(format!("no catalog entry `{id}`"))),
        },
        CatalogCmd::Check { ids, all, out, alpha } => {
            if ids.is_empty() && !all {
                return Err(InputError("give entry ids or --all".into()));
            }
            if *all && !ids.is_empty() {
                return Err(InputError("--all takes no ids".into()));
            }
            let mut opts = CheckOptions { prime: ctx.prime, alpha: *alpha, ..Default::default() };
            if let Some(p) = ctx.prime {
                opts.weights = ctx.weights(p)?;
            }
            let report = catalog_check(catalog, ids, &opts);
            let json = to_canonical_json(&report);
            if let Some(path) = out {
                std::fs::write(path, &json).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
            }
            let ok = !report.has_failures();
            let text = match ctx.format {
                Format::Json => json,
                Format::Text => report.text(),
            };
            Ok((text, ok))
        }
    }
}

fn random_invertible(n: usize, rng: &mut ChaCha8Rng) -> OperatorMatrix {
    loop {
        let rows = (0..n).map(|_| (0..n).map(|_| RatFunc::from_i64(rng.gen_range(-3..=3))).collect()).collect();
        let m = OperatorMatrix::from_rows(rows).expect("square");
        if !m.det().is_zero() {
            return m;
        }
    }
}

fn record_text(r: &InvariantRecord) -> String {
    format!(
        "centroid {}, derivations (weight 0) {}, central derivations {}, annihilators {}/{}/{}, image rank {}",
        r.centroid,
        r.derivations_weight_0,
        r.central_derivations,
        r.left_annihilator,
        r.middle_annihilator,
        r.right_annihilator,
        r.image_rank
    )
}

fn cmd_invariants(ctx: &Ctx, algebra: Option<&PathBuf>, catalog: bool, alpha: i64, trials: usize) -> Outcome {
    if catalog {
        let records = catalog_invariants(Catalog::builtin(), alpha)?;
        let corollary = dimension_corollary_audit(&records);
        let dist = distinguishability_audit(records);
        let ok = corollary.claims.iter().all(|c| c.holds);
        let value = serde_json::json!({ "corollary": corollary, "distinguishability": dist });
        return Ok((
            ctx.emit(&value, || {
                let mut s = String::new();
                for r in &dist.records {
                    let _ = writeln!(s, "{}: {}", r.id, record_text(&r.record));
                }
                for p in &dist.indistinguishable {
                    let _ = writeln!(s, "same invariants: {} and {}", p.0, p.1);
                }
                for c in &corollary.claims {
                    let _ = writeln!(
                        s,
                        "{} dim {}: claimed {}..={}, {}",
                        c.kind,
                        c.dim,
                        c.min,
                        c.max,
                        if c.holds { "holds".to_string() } else { format!("outside: {}", c.discrepancies.join(", ")) }
                    );
                }
                s
            }),
            ok,
        ));
    }
    let Some(path) = algebra else {
        return Err(InputError("give an algebra document or --catalog".into()));
    };
    let a = ctx.algebra(path)?;
    let mut values = BTreeMap::from([("alpha".to_string(), FieldElement::from_i64(alpha))]);
    values.extend(ctx.values.clone());
    let (t1, t2): (TernaryStructure, Option<TernaryStructure>) = match &a {
        Algebra::Ternary(t) => (t.instantiate(&values)?, None),
        Algebra::TernaryPair(t1, t2) => (t1.instantiate(&values)?, Some(t2.instantiate(&values)?)),
        _ => return Err(InputError("invariants take a ternary algebra or pair".into())),
    };
    let rec = match &t2 {
        None => invariants(&t1)?,
        Some(t2) => invariants_pair(&t1, t2)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut invariant = true;
    for _ in 0..trials {
        let p = random_invertible(t1.dim(), &mut rng);
        let moved = match &t2 {
            None => invariants(&t1.change_basis(&p)?)?,
            Some(t2) => invariants_pair(&t1.change_basis(&p)?, &t2.change_basis(&p)?)?,
        };
        invariant &= moved == rec;
    }
    let value = serde_json::json!({ "record": rec, "basis_trials": trials, "seed": ctx.seed, "invariant": invariant });
    Ok((ctx.emit(&value, || format!("{}\n", record_text(&rec))), invariant))
}

fn parse_assignments(items: &[String]) -> Result<BTreeMap<String, FieldElement>, InputError> {
    let mut out = BTreeMap::new();
    for item in items {
        let (name, value) =
            item.split_once('=').ok_or_else(|| InputError(format!("--set `{item}`: expected NAME=VALUE")))?;
        let v = parse_expr(value, &FieldDescriptor::rationals(), Some(&[]))
            .ok()
            .and_then(|r| r.as_constant())
            .ok_or_else(|| InputError(format!("--set `{item}`: value must be a rational constant")))?;
        out.insert(name.trim().to_string(), v);
    }
    Ok(out)
}

fn run(cli: &Cli) -> Outcome {
    let field = make_field(&cli.field).map_err(|e| InputError(format!("--field: {e}")))?;
    let ctx = Ctx {
        format: cli.format,
        field: field.roots().to_vec(),
        weight: cli.weight.clone(),
        variant: cli.variant,
        prime: cli.prime,
        seed: cli.seed,
        values: parse_assignments(&cli.set)?,
    };
    match &cli.command {
        Command::Verify { algebra } => cmd_verify(&ctx, algebra),
        Command::Operator(op) => match op {
            OperatorCmd::Verify { algebra, operator } => cmd_operator_verify(&ctx, algebra, operator),
            OperatorCmd::Solve { algebra, class } => cmd_solve(&ctx, algebra, *class),
            OperatorCmd::Enumerate { algebra, class, count_only, guard } => {
                cmd_enumerate(&ctx, algebra, *class, *count_only, guard.guard)
            }
            OperatorCmd::Complete { algebra, operators, guard } => cmd_complete(&ctx, algebra, operators, guard.guard),
            OperatorCmd::Lift { algebra, operator } => cmd_lift(&ctx, algebra, operator),
        },
        Command::Construct(c) => cmd_construct(&ctx, c),
        Command::Catalog(c) => cmd_catalog(&ctx, c),
        Command::Invariants { algebra, catalog, alpha, basis_trials } => {
            cmd_invariants(&ctx, algebra.as_ref(), *catalog, *alpha, *basis_trials)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
