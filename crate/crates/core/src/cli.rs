//! Command-line front end: `decompose`, `verify` and `bench`.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::Zero;
use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::class_functions::{
    cf_apply, chains, deflation_biset, identity_biset, mobius_lattice, res_def_injectivity,
    restriction_biset, vanishing_sum, zeta_apply, CfError, QuotientMap, SubgroupMap, UnitAction,
};
use crate::constructions::{build_with_cap, parse_spec, GroupSpec, SpecError};
use crate::corpus;
use crate::decomposition::{
    analyze, l_sequence_naive, l_value_direct, render_gap, render_json, Analysis,
    DecompositionError,
};
use crate::group::{center, omega1_center, GroupError, GroupTable, Subgroup, DEFAULT_ELEMENT_CAP};
use crate::oracles::{abelian_oracle, product_check, rank_consistency};

#[derive(Debug, Parser)]
#[command(
    name = "roquette",
    version,
    about = "Decompose odd p-groups into edges of cyclic groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the multiplicities of the cyclic edges of one group.
    Decompose {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Format::Gap)]
        format: Format,
    },
    /// Run the consistency checks on one group, or on the built-in corpus.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Also run the Möbius, vanishing-sum and injectivity checks.
        #[arg(long)]
        criterion: bool,
        /// Also run the biset composition and unit-action checks.
        #[arg(long)]
        bisets: bool,
        /// Print the l-sequence and timings for each group.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Time the per-class algorithm against a per-element scan.
    Bench {
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Gap,
    Json,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Group specification, e.g. "SD(3,3,1,10)" or "EA(3,4) x C(9)".
    #[arg(long, group = "source")]
    pub spec: Option<String>,
    /// File of generating permutations in cycle notation, one per line.
    #[arg(long, group = "source")]
    pub perm: Option<PathBuf>,
    /// Multiplication table file.
    #[arg(long, group = "source")]
    pub table: Option<PathBuf>,
    /// Largest group order that will be enumerated.
    #[arg(long, default_value_t = DEFAULT_ELEMENT_CAP as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap: u64,
}

impl Input {
    fn group_spec(&self) -> Result<Option<GroupSpec>, Failure> {
        Ok(match (&self.spec, &self.perm, &self.table) {
            (Some(text), _, _) => Some(parse_spec(text).map_err(Failure::from)?),
            (_, Some(path), _) => Some(GroupSpec::PermFile(path.clone())),
            (_, _, Some(path)) => Some(GroupSpec::TableFile(path.clone())),
            _ => None,
        })
    }
}

/// Exit status and message of a failed command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

const NOT_ODD: &str = "Error : the order must be odd";
const NOT_P_GROUP: &str = "Error : the group must be a p-group";

impl From<GroupError> for Failure {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::NotAPGroup { .. } | GroupError::PrimeMismatch(..) => Failure {
                code: 2,
                message: NOT_P_GROUP.into(),
            },
            other => Failure::usage(format!("Error : {other}")),
        }
    }
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        match e {
            SpecError::Group(g) => g.into(),
            other => Failure::usage(format!("Error : {other}")),
        }
    }
}

impl From<DecompositionError> for Failure {
    fn from(e: DecompositionError) -> Self {
        match e {
            DecompositionError::OddPrimeRequired => Failure {
                code: 2,
                message: NOT_ODD.into(),
            },
            DecompositionError::NotAPGroup { .. } => Failure {
                code: 2,
                message: NOT_P_GROUP.into(),
            },
            other => Failure::internal(format!("Error : {other}")),
        }
    }
}

impl From<CfError> for Failure {
    fn from(e: CfError) -> Self {
        match e {
            CfError::Group(g) => g.into(),
            other => Failure::internal(format!("Error : {other}")),
        }
    }
}

/// Parses `args` and runs the command, writing results to `out`. Returns the
/// process exit code; failure messages go to `err`.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}

/// Runs a parsed command. `Ok` carries the exit code of a completed run.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    match &cli.command {
        Command::Decompose { input, format } => {
            let spec = input.group_spec()?.ok_or_else(|| {
                Failure::usage("Error : one of --spec, --perm or --table is required")
            })?;
            let group = build_with_cap(&spec, input.cap as usize)?;
            let d = analyze(&group)?.decomposition;
            let text = match format {
                Format::Gap => render_gap(&d),
                Format::Json => render_json(&d),
            };
            writeln!(out, "{text}").map_err(io_failure)?;
            Ok(0)
        }
        Command::Verify {
            input,
            criterion,
            bisets,
            verbose,
        } => {
            let options = VerifyOptions {
                criterion: *criterion,
                bisets: *bisets,
                verbose: *verbose,
                cap: input.cap as usize,
            };
            let mut report = Report::new(out);
            match input.group_spec()? {
                Some(spec) => verify_group(&spec, &options, &mut report)?,
                None => verify_corpus(&options, &mut report)?,
            }
            report.summary()
        }
        Command::Bench { input } => {
            let specs = match input.group_spec()? {
                Some(spec) => vec![spec],
                None => (4..=8)
                    .map(|r| GroupSpec::ElemAbelian(3, r))
                    .chain((4..=8).map(|k| GroupSpec::Modular(3, k)))
                    .collect(),
            };
            bench(&specs, input.cap as usize, out)?;
            Ok(0)
        }
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::usage(format!("Error : {e}"))
}

struct VerifyOptions {
    criterion: bool,
    bisets: bool,
    verbose: bool,
    cap: usize,
}

struct Report<'w> {
    out: &'w mut dyn Write,
    passed: usize,
    failed: usize,
}

impl<'w> Report<'w> {
    fn new(out: &'w mut dyn Write) -> Self {
        Report {
            out,
            passed: 0,
            failed: 0,
        }
    }

    fn check(&mut self, subject: &str, name: &str, ok: bool, detail: &str) -> Result<(), Failure> {
        let tag = if ok { "PASS" } else { "FAIL" };
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        let line = if detail.is_empty() {
            format!("{tag} {subject}: {name}")
        } else {
            format!("{tag} {subject}: {name} ({detail})")
        };
        writeln!(self.out, "{line}").map_err(io_failure)
    }

    fn note(&mut self, text: &str) -> Result<(), Failure> {
        writeln!(self.out, "     {text}").map_err(io_failure)
    }

    fn summary(self) -> Result<i32, Failure> {
        writeln!(self.out, "{} passed, {} failed", self.passed, self.failed).map_err(io_failure)?;
        Ok(if self.failed == 0 { 0 } else { 3 })
    }
}

fn verify_corpus(options: &VerifyOptions, report: &mut Report<'_>) -> Result<(), Failure> {
    for spec in corpus::full() {
        let parsed = parse_spec(&spec)?;
        let small = |limit: usize| build_with_cap(&parsed, limit).is_ok();
        let sub_options = VerifyOptions {
            criterion: options.criterion && small(81),
            bisets: options.bisets && small(27),
            verbose: options.verbose,
            cap: options.cap,
        };
        verify_group(&parsed, &sub_options, report)?;
    }
    for (a, b) in corpus::PRODUCT_PAIRS {
        let g = build_with_cap(&parse_spec(a)?, options.cap)?;
        let h = build_with_cap(&parse_spec(b)?, options.cap)?;
        let r = product_check(&g, &h).map_err(|e| Failure::internal(format!("Error : {e}")))?;
        report.check(
            &format!("{a} x {b}"),
            "product multiplicativity",
            r.holds(),
            "",
        )?;
    }
    let mut outputs = Vec::new();
    for spec in corpus::ORDER_81 {
        let g = build_with_cap(&parse_spec(spec)?, options.cap)?;
        outputs.push(render_gap(&analyze(&g)?.decomposition));
    }
    let unmatched = unmatched_lines(&outputs);
    report.check(
        "order 81",
        "outputs match the reference table",
        unmatched.is_empty(),
        &unmatched.join("; "),
    )
}

/// Outputs that do not match a distinct line of the reference order-81 table.
pub fn unmatched_lines(outputs: &[String]) -> Vec<String> {
    let mut available: Vec<&str> = corpus::ORDER_81_LINES.to_vec();
    let mut missing = Vec::new();
    for line in outputs {
        match available.iter().position(|l| l == line) {
            Some(i) => {
                available.remove(i);
            }
            None => missing.push(line.clone()),
        }
    }
    missing
}

fn verify_group(
    spec: &GroupSpec,
    options: &VerifyOptions,
    report: &mut Report<'_>,
) -> Result<(), Failure> {
    let name = spec.to_string();
    let start = Instant::now();
    let group = Arc::new(build_with_cap(spec, options.cap)?);
    let analysis = match analyze(&group) {
        Ok(a) => a,
        Err(e @ (DecompositionError::OddPrimeRequired | DecompositionError::NotAPGroup { .. })) => {
            return Err(e.into())
        }
        Err(e) => return report.check(&name, "formula agreement", false, &e.to_string()),
    };
    report.check(&name, "formula agreement", true, "")?;
    let d = &analysis.decomposition;
    let k = group.class_count() as u64;
    report.check(
        &name,
        "class-count identity",
        d.class_count() == k,
        &format!("{} vs {k}", d.class_count()),
    )?;
    check_l_sequence(&name, &group, &analysis, report)?;

    if group.is_abelian() {
        let ok = match abelian_oracle(&group) {
            Ok(oracle) => oracle == *d,
            Err(_) => false,
        };
        report.check(&name, "abelian oracle", ok, "")?;
    }
    if let GroupSpec::Product(a, b) = spec {
        let g = build_with_cap(a, options.cap)?;
        let h = build_with_cap(b, options.cap)?;
        let ok = product_check(&g, &h).is_ok_and(|r| r.holds());
        report.check(&name, "product multiplicativity", ok, "")?;
    }
    match rank_consistency(&group, d) {
        Ok(r) => report.check(
            &name,
            "rank consistency",
            r.holds(),
            &format!("observed {:?}, predicted {:?}", r.observed, r.predicted),
        )?,
        Err(e) => report.check(&name, "rank consistency", false, &e.to_string())?,
    }
    if options.criterion {
        criterion_checks(&name, &group, report)?;
    }
    if options.bisets {
        biset_checks(&name, &group, report)?;
    }
    if options.verbose {
        report.note(&format!(
            "order {}, classes {k}, l = {:?}, {} in {:.1?}",
            group.order(),
            analysis.l_sequence.values,
            render_gap(d),
            start.elapsed()
        ))?;
    }
    Ok(())
}

fn check_l_sequence(
    name: &str,
    group: &GroupTable,
    analysis: &Analysis,
    report: &mut Report<'_>,
) -> Result<(), Failure> {
    let l = &analysis.l_sequence;
    let direct: Vec<u64> = (0..l.values.len() as u32)
        .map(|n| l_value_direct(group, n))
        .collect();
    report.check(
        name,
        "monotonicity",
        l.is_monotone() && direct == l.values,
        &format!("cumulative {:?}, direct {direct:?}", l.values),
    )?;
    let k = group.class_count() as u64;
    let r = l.values.len() as u32 - 1;
    let stable = *l.values.last().expect("l_0 present") == k && l_value_direct(group, r + 1) == k;
    report.check(name, "stabilization", stable, "")
}

fn criterion_checks(
    name: &str,
    group: &Arc<GroupTable>,
    report: &mut Report<'_>,
) -> Result<(), Failure> {
    if group.is_trivial() {
        return Ok(());
    }
    let omega = omega1_center(group);
    let rank = group
        .prime()
        .and_then(|p| crate::arith::log_exact(omega.order() as u64, p))
        .unwrap_or(0);
    if rank >= 2 {
        let lattice = mobius_lattice(&omega)?;
        report.check(
            name,
            "Möbius lemma sums",
            lattice.lemma_holds(),
            &format!("max |sum| = {}", lattice.max_abs_lemma_sum()),
        )?;
    }
    match vanishing_sum(group) {
        Ok(worst) => report.check(
            name,
            "vanishing sum",
            worst.is_zero(),
            &format!("max |S| = {worst}"),
        )?,
        Err(CfError::CyclicCenter) => {}
        Err(e) => return Err(e.into()),
    }
    if let Some((e, z)) = injectivity_configuration(group) {
        let r = res_def_injectivity(group, &e, &z)?;
        report.check(
            name,
            "Res + Def injectivity",
            r.is_injective(),
            &format!("rank {} of {}", r.rank, r.class_count),
        )?;
    }
    Ok(())
}

/// A normal elementary abelian `E` of rank 2 containing a central `Z` of
/// order `p`, if the group has one.
pub fn injectivity_configuration(group: &GroupTable) -> Option<(Subgroup<'_>, Subgroup<'_>)> {
    let p = group.prime()? as usize;
    let omega = omega1_center(group);
    let z_gen = *omega.members().get(1)?;
    let z = Subgroup::generated(group, &[z_gen]);
    (1..group.order())
        .filter(|&x| group.element_order(x) == p as u64 && !z.contains(x))
        .map(|x| Subgroup::generated(group, &[z_gen, x]))
        .find(|e| e.is_normal() && e.is_abelian())
        .map(|e| (e, z))
}

fn biset_checks(
    name: &str,
    group: &Arc<GroupTable>,
    report: &mut Report<'_>,
) -> Result<(), Failure> {
    let mut rng = StdRng::seed_from_u64(group.order() as u64);
    let f = chains::random_class_function(group, &mut rng);
    let id = identity_biset(group);
    report.check(name, "identity biset", cf_apply(&id, &f)? == f, "")?;

    let mut all = true;
    for len in [2, 3, 4, 2, 3] {
        let chain = chains::random_chain(group, len, &mut rng)?;
        let f = chains::random_class_function(group, &mut rng);
        all &= chain.composition_law_holds(&f)?;
    }
    report.check(name, "biset composition law", all, "")?;

    if let Some(p) = group.prime() {
        let r = crate::arith::log_exact(group.exponent(), p).unwrap_or(0);
        let gens = group.generator_indices();
        let sub = SubgroupMap::new(&Subgroup::generated(group, &gens[..1]))?;
        let quot = QuotientMap::new(&center(group))?;
        let elementary = [
            restriction_biset(group, &sub)?,
            deflation_biset(group, &quot)?,
        ];
        let mut square = true;
        let mut action = true;
        for zeta in [1, 2, 1 + p as i64, p as i64 - 1] {
            let u = UnitAction::new(zeta, p, r)?;
            let v = UnitAction::new(zeta + p as i64, p, r)?;
            action &= zeta_apply(u, &zeta_apply(v, &f)?)? == zeta_apply(u.compose(v), &f)?;
            for b in &elementary {
                square &= cf_apply(b, &zeta_apply(u, &f)?)? == zeta_apply(u, &cf_apply(b, &f)?)?;
            }
        }
        let one = UnitAction::new(1, p, r)?;
        action &= zeta_apply(one, &f)? == f;
        report.check(name, "unit action", action, "")?;
        report.check(name, "unit action commutes with Res and Def", square, "")?;
    }
    Ok(())
}

fn bench(specs: &[GroupSpec], cap: usize, out: &mut dyn Write) -> Result<(), Failure> {
    writeln!(
        out,
        "{:<24} {:>7} {:>7} {:>12} {:>12} {:>12} {:>8}",
        "group", "order", "classes", "classes ms", "per-class ms", "scan ms", "speedup"
    )
    .map_err(io_failure)?;
    for spec in specs {
        let group = build_with_cap(spec, cap)?;
        let (_, class_time) = timed(|| group.class_count());
        let (analysis, fast) = timed(|| analyze(&group));
        let analysis = analysis?;
        let (naive_l, naive) = timed(|| l_sequence_naive(&group));
        if naive_l != analysis.l_sequence {
            return Err(Failure::internal(format!(
                "Error : per-element scan gives {:?}, per-class algorithm gives {:?}",
                naive_l.values, analysis.l_sequence.values
            )));
        }
        writeln!(
            out,
            "{:<24} {:>7} {:>7} {:>12.3} {:>12.3} {:>12.3} {:>7.1}x",
            spec.to_string(),
            group.order(),
            group.class_count(),
            ms(class_time),
            ms(fast),
            ms(naive),
            naive.as_secs_f64() / fast.as_secs_f64().max(1e-9)
        )
        .map_err(io_failure)?;
    }
    Ok(())
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let value = f();
    (value, start.elapsed())
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with(
            std::iter::once("roquette").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn decompose_examples() {
        let (code, out, _) = run_args(&["decompose", "--spec", "SD(3,3,1,10)", "--format", "gap"]);
        assert_eq!(
            (code, out.as_str()),
            (0, "[ [ 1, 1 ], [ 3, 4 ], [ 9, 4 ] ]\n")
        );
        let (code, out, _) = run_args(&["decompose", "--spec", "C(1)"]);
        assert_eq!((code, out.as_str()), (0, "[ [ 1, 1 ] ]\n"));
        let (code, out, _) = run_args(&["decompose", "--spec", "C(81)", "--format", "json"]);
        assert_eq!(code, 0);
        assert!(out.starts_with(r#"{"p":3,"order":81,"summands":[{"q":1,"mult":1},"#));
    }

    #[test]
    fn exit_codes() {
        let (code, _, err) = run_args(&["decompose", "--spec", "C(4)"]);
        assert_eq!((code, err.as_str()), (2, "Error : the order must be odd\n"));
        let (code, _, err) = run_args(&["decompose", "--spec", "C(3) x C(5)"]);
        assert_eq!(
            (code, err.as_str()),
            (2, "Error : the group must be a p-group\n")
        );
        assert_eq!(run_args(&["decompose", "--spec", "C(3"]).0, 1);
        assert_eq!(run_args(&["decompose"]).0, 1);
        assert_eq!(
            run_args(&["decompose", "--spec", "C(3)", "--perm", "x"]).0,
            1
        );
        assert_eq!(
            run_args(&["decompose", "--spec", "EA(3,5)", "--cap", "100"]).0,
            1
        );
        assert_eq!(
            run_args(&["decompose", "--spec", "C(3)", "--cap", "0"]).0,
            1
        );
        assert_eq!(run_args(&["frobnicate"]).0, 1);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn verify_single_groups() {
        let (code, out, _) = run_args(&["verify", "--spec", "C(81)"]);
        assert_eq!(code, 0, "{out}");
        assert!(!out.contains("FAIL"));
        let (code, out, _) = run_args(&["verify", "--spec", "EA(3,2)", "--criterion"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("PASS EA(3,2): vanishing sum"));
        let (code, out, _) = run_args(&["verify", "--spec", "ES+(3)", "--criterion", "--bisets"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("PASS ES+(3): Res + Def injectivity"));
        assert!(out.contains("PASS ES+(3): biset composition law"));
    }

    #[test]
    fn order_81_table_matches() {
        let outputs: Vec<String> = corpus::ORDER_81
            .iter()
            .map(|s| {
                let g = build_with_cap(&parse_spec(s).unwrap(), DEFAULT_ELEMENT_CAP).unwrap();
                render_gap(&analyze(&g).unwrap().decomposition)
            })
            .collect();
        assert_eq!(
            unmatched_lines(&outputs),
            Vec::<String>::new(),
            "{outputs:?}"
        );
    }

    #[test]
    fn injectivity_configuration_found() {
        let g = build_with_cap(&parse_spec("M(3,3)").unwrap(), 100).unwrap();
        let (e, z) = injectivity_configuration(&g).unwrap();
        assert_eq!((e.order(), z.order()), (9, 3));
        let c = build_with_cap(&parse_spec("C(27)").unwrap(), 100).unwrap();
        assert!(injectivity_configuration(&c).is_none());
    }
}
