//! `sumsetlab` command-line tool.

mod parse;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sumsetlab::nonabelian::product_set;
use sumsetlab::sets::{normalize, stats, sumset};
use sumsetlab::structure::{detect_structure, first_projection, recover_affine_witness};
use sumsetlab::verify::sweep::run_sweep_with;
use sumsetlab::verify::{Family, Mode, SweepReport, SweepSpec, Thm3Checker, Thm4Checker};
use sumsetlab::{
    CheckerRegistry, Error, GroupSpec, GroupSubset, Instance, ProductPoint, Result, StrategyRegistry,
    StructureCertificate, TheoremId, VerificationReport,
};

#[derive(Parser)]
#[command(name = "sumsetlab", version, about = "Sumsets, structure detection and theorem sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sumset A+B (or product set ST) with scalar statistics.
    Sumset(SumsetArgs),
    /// Structure certificate for an integer set, product set or group subset.
    Detect(DetectArgs),
    /// Run one theorem checker on one instance.
    Verify(VerifyArgs),
    /// Run a theorem checker over a whole instance family.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
    Pretty,
}

#[derive(Args)]
struct SumsetArgs {
    /// `0,1,3`, or a JSON coordinate list with --group.
    #[arg(long, allow_hyphen_values = true)]
    set: String,
    /// Second summand; defaults to the set itself.
    #[arg(long, allow_hyphen_values = true)]
    with: Option<String>,
    #[arg(long)]
    group: Option<GroupSpec>,
    /// Square of the set (the default when --with is absent).
    #[arg(long, conflicts_with = "with")]
    square: bool,
    #[arg(long, value_enum, default_value = "pretty")]
    format: Format,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long, allow_hyphen_values = true)]
    set: Option<String>,
    /// Treat --points as a subset of Z x inner.
    #[arg(long, requires_all = ["inner", "points"])]
    product: bool,
    #[arg(long)]
    inner: Option<GroupSpec>,
    /// `(a,x),(a,x),...` or JSON.
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    #[arg(long, conflicts_with = "product")]
    group: Option<GroupSpec>,
    /// Weak-structure strategy name (default: try all registered).
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long, value_enum, default_value = "pretty")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Theorem id or alias, e.g. `thm_A` or `thm_A_3k4`.
    #[arg(long)]
    theorem: TheoremId,
    #[arg(long, allow_hyphen_values = true)]
    set: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    set2: Option<String>,
    /// Ambient bound for cor_2: the set lies in [0, n-1].
    #[arg(long)]
    n: Option<i64>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    group: Option<GroupSpec>,
    #[arg(long)]
    inner: Option<GroupSpec>,
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    /// Full instance as JSON, overriding the other inputs.
    #[arg(long)]
    instance: Option<String>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    #[value(name = "normalized_int_sets")]
    NormalizedIntSets,
    #[value(name = "bounded_int_sets")]
    BoundedIntSets,
    #[value(name = "int_pairs")]
    IntPairs,
    #[value(name = "modular_pairs")]
    ModularPairs,
    #[value(name = "product_sets")]
    ProductSets,
    #[value(name = "heisenberg_subsets")]
    HeisenbergSubsets,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Random,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    theorem: TheoremId,
    /// Instance family; inferred from the theorem when absent.
    #[arg(long, value_enum)]
    family: Option<FamilyKind>,
    #[arg(long)]
    nmax: Option<u32>,
    #[arg(long)]
    nmin: Option<u32>,
    #[arg(long)]
    kmin: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    amax: Option<u32>,
    #[arg(long)]
    inner: Option<GroupSpec>,
    #[arg(long, allow_negative_numbers = true)]
    lo: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    hi: Option<i64>,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: ModeArg,
    #[arg(long)]
    count: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    p: Option<u64>,
    /// Enumerate every subset instead of normalized representatives.
    #[arg(long)]
    raw: bool,
    #[arg(long, env = "SUMSETLAB_WORKERS")]
    workers: Option<usize>,
    #[arg(long)]
    max_instances: Option<u64>,
    /// Milliseconds.
    #[arg(long)]
    time_limit: Option<u64>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
    /// Report path; progress lines go to `<output>.partial.jsonl`.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

fn need<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| malformed(format!("{flag} is required here")))
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| malformed(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn coords(s: &GroupSubset) -> Vec<Vec<i64>> {
    s.elements.iter().map(|g| g.coords()).collect()
}

fn cmd_sumset(a: SumsetArgs) -> Result<u8> {
    if let Some(spec) = a.group {
        let s = GroupSubset::from_coords(spec.clone(), &parse::group_elements(&a.set)?)?;
        let t = match &a.with {
            Some(w) => GroupSubset::from_coords(spec.clone(), &parse::group_elements(w)?)?,
            None => s.clone(),
        };
        let st = product_set(&s, &t)?;
        match a.format {
            Format::Json => print_json(&json!({
                "group": spec,
                "set": coords(&s),
                "with": coords(&t),
                "product": coords(&st),
                "size": st.len(),
            }))?,
            Format::Pretty => {
                let shown: Vec<String> = st.elements.iter().map(ToString::to_string).collect();
                println!("ST = {{{}}}", shown.join(", "));
                println!("|S|={} |T|={} |ST|={}", s.len(), t.len(), st.len());
            }
        }
        return Ok(0);
    }
    let s = parse::int_set(&a.set)?;
    let t = match &a.with {
        Some(w) => parse::int_set(w)?,
        None => s.clone(),
    };
    let sum = sumset(&s, &t)?;
    // statistics are defined for A+A on the normalized image
    let st = if a.with.is_none() && s.len() >= 2 {
        let (norm, map) = normalize(&s)?;
        Some((stats(&norm)?, norm, map))
    } else {
        None
    };
    match a.format {
        Format::Json => print_json(&json!({
            "set": s,
            "with": t,
            "sumset": sum,
            "size": sum.len(),
            "stats": st.as_ref().map(|(x, _, _)| x),
            "normalized": st.as_ref().map(|(_, n, _)| n),
        }))?,
        Format::Pretty => {
            let label = if a.with.is_some() { "A+B" } else { "A+A" };
            println!("{label} = {sum}");
            if let Some((x, norm, _)) = &st {
                print!("k={} |A+A|={} b={} R={} doubling={}", x.k, x.sumset_size, x.b, x.r, x.doubling);
                if norm != &s {
                    print!(" (normalized image {norm})");
                }
                println!();
            }
        }
    }
    Ok(0)
}

fn strategies(name: &Option<String>) -> Result<StrategyRegistry> {
    match name {
        Some(n) => StrategyRegistry::only(n),
        None => Ok(StrategyRegistry::standard()),
    }
}

fn product_points(inner: &GroupSpec, raw: &str) -> Result<Vec<ProductPoint>> {
    parse::points(raw)?
        .into_iter()
        .map(|(a, x)| Ok(ProductPoint::new(a, inner.element(&x)?)))
        .collect()
}

fn cmd_detect(a: DetectArgs) -> Result<u8> {
    if a.product {
        let inner = need(&a.inner, "--inner")?;
        let pts = product_points(inner, need(&a.points, "--points")?)?;
        first_projection(&pts)?;
        let (cert, reason) = match recover_affine_witness(&pts) {
            Ok(c) => (Some(c), None),
            Err(Error::Precondition(m)) => (None, Some(m)),
            Err(e) => return Err(e),
        };
        match a.format {
            Format::Json => print_json(&json!({ "structured": cert.is_some(), "certificate": cert, "reason": reason }))?,
            Format::Pretty => match (&cert, &reason) {
                (Some(StructureCertificate::ProductStructured { x, y, normalization, trace }), _) => {
                    println!("structured: x_i = a'_i x + y with x={x} y={y}");
                    println!("a' = (a - {}) / {}; seed {}", normalization.shift, normalization.scale, trace.seed);
                }
                (_, Some(r)) => println!("not structured: {r}"),
                _ => unreachable!("witness recovery returns a product certificate"),
            },
        }
        return Ok(if cert.is_some() { 0 } else { 1 });
    }
    if let Some(spec) = a.group {
        let s = GroupSubset::from_coords(spec, &parse::group_elements(need(&a.set, "--set")?)?)?;
        let found = strategies(&a.strategy)?.search(&s)?;
        match a.format {
            Format::Json => print_json(&json!({
                "weakly_structured": found.is_some(),
                "strategy": found.as_ref().map(|f| f.0),
                "certificate": found.as_ref().map(|f| &f.1),
            }))?,
            Format::Pretty => match &found {
                Some((name, c)) => {
                    println!("weakly structured via {name}: x={} y={}", c.x, c.y);
                    for (g, t) in &c.exponents {
                        println!("  {g} = y x^{t}");
                    }
                }
                None => println!("no weak-structure certificate found"),
            },
        }
        return Ok(if found.is_some() { 0 } else { 1 });
    }
    let set = parse::int_set(need(&a.set, "--set")?)?;
    let (cert, map) = detect_structure(&set)?;
    match a.format {
        Format::Json => print_json(&json!({
            "structured": cert.is_structured(),
            "normalization": map,
            "certificate": cert,
        }))?,
        Format::Pretty => match &cert {
            StructureCertificate::IntStructured { trace } => {
                println!("structured via seed {} in {} steps", trace.seed, trace.steps());
                for it in &trace.iterates {
                    println!("  {it}");
                }
                if map.shift != 0 || map.scale != 1 {
                    println!("(normalized by a -> (a - {}) / {})", map.shift, map.scale);
                }
            }
            _ => println!("not structured"),
        },
    }
    Ok(if cert.is_structured() { 0 } else { 1 })
}

fn registry(strategy: &Option<String>) -> Result<CheckerRegistry> {
    let mut r = CheckerRegistry::standard();
    if strategy.is_some() {
        r.register(Box::new(Thm4Checker::with_strategies(strategies(strategy)?)));
        r.register(Box::new(Thm3Checker::with_strategies(strategies(strategy)?)));
    }
    Ok(r)
}

fn verify_instance(a: &VerifyArgs) -> Result<Instance> {
    if let Some(raw) = &a.instance {
        return serde_json::from_str(raw).map_err(|e| malformed(format!("instance: {e}")));
    }
    let set = || parse::int_set(need(&a.set, "--set")?);
    Ok(match a.theorem {
        TheoremId::Eq1LowerBound => Instance::IntPair { a: set()?, b: parse::int_set(need(&a.set2, "--set2")?)? },
        TheoremId::CauchyDavenport => Instance::Modular {
            p: *need(&a.p, "--p")?,
            a: parse::residues(need(&a.set, "--set")?)?,
            b: parse::residues(need(&a.set2, "--set2")?)?,
        },
        TheoremId::Cor2 => match a.n {
            Some(n) => Instance::Bounded { set: set()?, n },
            None => Instance::int(set()?),
        },
        TheoremId::Thm1 | TheoremId::Thm2 => {
            Instance::product(&product_points(need(&a.inner, "--inner")?, need(&a.points, "--points")?)?)?
        }
        TheoremId::Thm3 | TheoremId::Thm4 => Instance::Group {
            spec: a.group.clone().unwrap_or(GroupSpec::Heisenberg),
            elements: parse::group_elements(need(&a.set, "--set")?)?,
        },
        TheoremId::ThmA | TheoremId::Lemma1 | TheoremId::Lemma2 | TheoremId::Cor1 => Instance::int(set()?),
    })
}

fn verdict(r: &VerificationReport) -> &'static str {
    match (r.hypothesis_met, r.conclusion_holds) {
        (false, _) => "hypothesis not met",
        (true, true) => "holds",
        (true, false) => "COUNTEREXAMPLE",
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<u8> {
    let instance = verify_instance(&a)?;
    let report = registry(&a.strategy)?.check(a.theorem, &instance)?;
    match a.format {
        Format::Json => print_json(&report)?,
        Format::Pretty => {
            println!("{}: {}", report.theorem, verdict(&report));
            if !report.flags.is_empty() {
                println!("flags: {}", report.flags.join(", "));
            }
            if let Some(n) = &report.note {
                println!("note: {n}");
            }
            if let Some(e) = &report.evidence {
                println!("evidence: {e}");
            }
        }
    }
    Ok(if report.is_counterexample() { 1 } else { 0 })
}

fn default_family(theorem: TheoremId, nmin: Option<u32>) -> FamilyKind {
    match theorem {
        TheoremId::Eq1LowerBound => FamilyKind::IntPairs,
        TheoremId::CauchyDavenport => FamilyKind::ModularPairs,
        TheoremId::Thm1 | TheoremId::Thm2 => FamilyKind::ProductSets,
        TheoremId::Thm3 | TheoremId::Thm4 => FamilyKind::HeisenbergSubsets,
        TheoremId::Cor2 if nmin.is_some() => FamilyKind::BoundedIntSets,
        _ => FamilyKind::NormalizedIntSets,
    }
}

fn sweep_family(a: &SweepArgs) -> Result<Family> {
    let kind = a.family.unwrap_or_else(|| default_family(a.theorem, a.nmin));
    let mode = match a.mode {
        ModeArg::Exhaustive => Mode::Exhaustive,
        ModeArg::Random => Mode::Random {
            count: a.count.unwrap_or(100_000),
            seed: *need(&a.seed, "--seed (random mode)")?,
        },
    };
    let sampled = matches!(kind, FamilyKind::ProductSets | FamilyKind::HeisenbergSubsets);
    if !sampled && a.mode == ModeArg::Random {
        return Err(malformed("random mode applies to product_sets and heisenberg_subsets only"));
    }
    Ok(match kind {
        FamilyKind::NormalizedIntSets => Family::NormalizedIntSets {
            n_max: a.nmax.unwrap_or(12),
            k_min: a.kmin.unwrap_or(3),
            k_max: a.kmax.unwrap_or(7),
            raw: a.raw,
        },
        FamilyKind::BoundedIntSets => Family::BoundedIntSets { n_min: a.nmin.unwrap_or(2), n_max: a.nmax.unwrap_or(12) },
        FamilyKind::IntPairs => Family::IntPairs { n_max: a.nmax.unwrap_or(6) },
        FamilyKind::ModularPairs => Family::ModularPairs { p: *need(&a.p, "--p")? },
        FamilyKind::ProductSets => Family::ProductSets {
            inner: a.inner.clone().unwrap_or(GroupSpec::cyclic(2)),
            a_max: a.amax.unwrap_or(8),
            k_min: a.kmin.unwrap_or(3),
            k_max: a.kmax.unwrap_or(5),
            mode,
        },
        FamilyKind::HeisenbergSubsets => Family::HeisenbergSubsets {
            lo: a.lo.unwrap_or(-1),
            hi: a.hi.unwrap_or(1),
            k_min: a.kmin.unwrap_or(3),
            k_max: a.kmax.unwrap_or(3),
            mode,
        },
    })
}

fn partial_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".partial.jsonl");
    PathBuf::from(s)
}

fn progress_line(r: &SweepReport) -> Value {
    json!({
        "theorem": r.theorem,
        "total_instances": r.total_instances,
        "counts": r.counts,
        "flags": r.flags,
        "wall_time_ms": r.wall_time_ms,
    })
}

fn write_csv(r: &SweepReport, out: impl Write) -> Result<()> {
    let io = |e: csv::Error| malformed(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "schema_version",
        "theorem",
        "family",
        "seed",
        "total_instances",
        "instances",
        "hypothesis_met",
        "holds",
        "vacuous",
        "counterexamples",
        "errors",
        "complete",
        "flags",
        "wall_time_ms",
    ])
    .map_err(io)?;
    let c = &r.counts;
    let flags: Vec<String> = r.flags.iter().map(|(k, v)| format!("{k}={v}")).collect();
    w.write_record([
        r.schema_version.to_string(),
        r.theorem.to_string(),
        serde_json::to_string(&r.family).map_err(|e| malformed(e.to_string()))?,
        r.seed.map(|s| s.to_string()).unwrap_or_default(),
        r.total_instances.to_string(),
        c.instances.to_string(),
        c.hypothesis_met.to_string(),
        c.holds.to_string(),
        c.vacuous.to_string(),
        c.counterexamples.to_string(),
        c.errors.to_string(),
        r.complete.to_string(),
        flags.join(";"),
        r.wall_time_ms.to_string(),
    ])
    .map_err(io)?;
    w.flush().map_err(|e| malformed(e.to_string()))
}

fn write_pretty(r: &SweepReport, mut out: impl Write) -> io::Result<()> {
    let c = &r.counts;
    writeln!(out, "theorem          {}", r.theorem)?;
    writeln!(out, "family           {}", serde_json::to_string(&r.family).unwrap_or_default())?;
    if let Some(s) = r.seed {
        writeln!(out, "seed             {s}")?;
    }
    let state = if r.complete { "complete" } else { "INCOMPLETE" };
    writeln!(out, "instances        {}/{} ({state})", c.instances, r.total_instances)?;
    writeln!(out, "hypothesis met   {}  holds {}  vacuous {}", c.hypothesis_met, c.holds, c.vacuous)?;
    writeln!(out, "counterexamples  {}  errors {}", c.counterexamples, c.errors)?;
    for (k, v) in &r.flags {
        writeln!(out, "flag             {k} = {v}")?;
    }
    for e in &r.errors {
        writeln!(out, "error            {e}")?;
    }
    for x in &r.counterexamples {
        writeln!(out, "counterexample   {}", serde_json::to_string(&x.instance).unwrap_or_default())?;
    }
    writeln!(out, "wall time        {} ms", r.wall_time_ms)
}

fn cmd_sweep(a: SweepArgs) -> Result<u8> {
    let spec = SweepSpec {
        workers: a.workers,
        max_instances: a.max_instances,
        time_limit_ms: a.time_limit,
        ..SweepSpec::new(a.theorem, sweep_family(&a)?)
    };
    let io = |e: io::Error| malformed(format!("output: {e}"));
    let mut partial = match &a.output {
        Some(p) => Some(BufWriter::new(File::create(partial_path(p)).map_err(io)?)),
        None => None,
    };
    let report = run_sweep_with(&spec, &registry(&a.strategy)?, |r| {
        if let Some(w) = partial.as_mut() {
            // best effort: a failed progress write must not abort the sweep
            let _ = writeln!(w, "{}", progress_line(r)).and_then(|_| w.flush());
        }
    })?;
    let out: Box<dyn Write> = match &a.output {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(io)?)),
        None => Box::new(io::stdout().lock()),
    };
    match a.format {
        ReportFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &report).map_err(|e| malformed(e.to_string()))?;
            writeln!(out).and_then(|_| out.flush()).map_err(io)?;
        }
        ReportFormat::Csv => write_csv(&report, out)?,
        ReportFormat::Pretty => write_pretty(&report, out).map_err(io)?,
    }
    Ok(if report.counts.counterexamples > 0 || report.counts.errors > 0 {
        1
    } else if !report.complete {
        3
    } else {
        0
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sumset(a) => cmd_sumset(a),
        Command::Detect(a) => cmd_detect(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
