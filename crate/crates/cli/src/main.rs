use std::fs;
use std::io::{self, BufRead, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context};
use beauville_core::json::{search_to_json, structure_from_json, structure_to_json, tower_to_json};
use beauville_core::uniform::legal_filtration_pairs;
use beauville_core::{
    admits_beauville, admits_beauville_audited, build_tower_streaming, classify, construct,
    cover_data, filtration_iso_check, is_hyperbolic, isomorphism_witness, lift_structure,
    push_forward, search, verify, BeauvilleStructure, Budget, Group, GroupDescription, LambdaRule,
    SearchOptions, Surjection, TriangleSignature,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Beauville structures on finite p-groups.
///
/// Exit status: 0 for a definitive answer (including "no structure" after an exhaustive
/// scan), 1 for input errors, 2 when a budget ran out before the answer was certain.
#[derive(Parser)]
#[command(name = "beauville", version)]
struct Cli {
    #[command(flatten)]
    run: RunFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunFlags {
    /// Worker threads. 0 uses every available core; 1 forces the serial reference path.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Search budget in work units (pairs of elements examined).
    #[arg(long, global = true, default_value_t = 1_000_000_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    max_candidates: u64,
    /// Search budget in wall-clock seconds.
    #[arg(long, global = true, default_value_t = 600,
          value_parser = clap::value_parser!(u64).range(1..))]
    max_seconds: u64,
    /// Output format. TSV is available for `sweep` and `genus --batch`.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Check a structure document ({"group", "t1", "t2"}); `-` reads stdin.
    Verify { document: PathBuf },
    /// Search a group for structures.
    Search {
        spec: GroupDescription,
        /// Count every structure instead of stopping at the least one.
        #[arg(long)]
        exhaustive: bool,
        /// How many structures an exhaustive search lists.
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
    /// Decide existence on a metacyclic group by the p ≥ 5, n = m criterion.
    Admits {
        spec: GroupDescription,
        /// Cross-check the verdict by exhaustive search (orders up to 4096).
        #[arg(long)]
        audit: bool,
    },
    /// Build a structure by lifting the least structure on the Frattini quotient.
    Construct { spec: GroupDescription },
    /// Lift a structure on a quotient to `source`.
    Lift {
        source: GroupDescription,
        structure: PathBuf,
    },
    /// Build a compatible tower over Z/p^k ⋊ Z/p^k, printing each level as it verifies.
    Tower {
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long)]
        depth: u32,
        /// `1+p`, `constant:c` or `explicit:l1,l2,...`.
        #[arg(long, default_value = "1+p")]
        lambda_rule: LambdaRule,
    },
    /// Push a structure forward to a quotient `target`.
    PushForward {
        target: GroupDescription,
        structure: PathBuf,
    },
    /// Isomorphism invariant (p, n, r) of Z/p^n ⋊_λ Z/p^n.
    Classify { p: u64, n: u32, lambda: u64 },
    /// Explicit isomorphism between two members of the family, or a refutation.
    IsoWitness {
        p: u64,
        n: u32,
        lambda: u64,
        lambda_prime: u64,
    },
    /// Check that p^s-th powers induce G_r/G_{r+1} ≅ G_{r+s}/G_{r+s+1}.
    FiltrationCheck {
        spec: GroupDescription,
        /// Filtration level; with --s checks a single pair, otherwise every legal pair.
        #[arg(long, requires = "s")]
        r: Option<u32>,
        #[arg(long, requires = "r")]
        s: Option<u32>,
    },
    /// Riemann–Hurwitz genus of a G-cover branched over three points.
    Genus {
        /// ORDER L1 L2 L3
        #[arg(num_args = 0..=4)]
        values: Vec<u64>,
        /// Read lines `order l1 l2 l3` from a file (`-` for stdin).
        #[arg(long, conflicts_with = "values")]
        batch: Option<PathBuf>,
    },
    /// Search every group listed in a file, one spec or `p m n lambda` per line.
    Sweep {
        input: PathBuf,
        /// Print `-` instead of the seconds column so output is reproducible.
        #[arg(long)]
        no_timing: bool,
    },
}

/// Whether an answer is certain.
#[derive(PartialEq, Eq)]
enum Status {
    Definitive,
    Partial,
}

struct Ctx {
    options: SearchOptions,
    format: Format,
}

impl Ctx {
    fn search_options(&self) -> SearchOptions {
        self.options.clone()
    }
}

fn read_input(path: &PathBuf) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn read_structure(path: &PathBuf) -> anyhow::Result<BeauvilleStructure> {
    let doc: Value = serde_json::from_str(&read_input(path)?)
        .with_context(|| format!("parsing {}", path.display()))?;
    let (g, t1, t2) = structure_from_json(&doc)?;
    Ok(verify(&g, t1, t2)?)
}

fn realize(spec: &GroupDescription) -> anyhow::Result<Arc<Group>> {
    Ok(Arc::new(Group::new(spec.clone())?))
}

fn emit(v: &Value) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "{}", serde_json::to_string(v)?)?;
    out.flush()?;
    Ok(())
}

fn metacyclic_params(spec: &GroupDescription) -> anyhow::Result<(u64, u32, u32, u64)> {
    match spec {
        GroupDescription::Metacyclic { p, m, n, lambda } => Ok((*p, *m, *n, *lambda)),
        other => Err(anyhow!("{other} is not a metacyclic group")),
    }
}

fn run(cmd: Command, ctx: &Ctx) -> anyhow::Result<Status> {
    if ctx.format == Format::Tsv && !matches!(cmd, Command::Sweep { .. } | Command::Genus { .. }) {
        bail!("TSV output is only available for `sweep` and `genus`");
    }
    match cmd {
        Command::Verify { document } => {
            emit(&structure_to_json(&read_structure(&document)?))?;
            Ok(Status::Definitive)
        }
        Command::Search {
            spec,
            exhaustive,
            limit,
        } => {
            let g = realize(&spec)?;
            let options = if exhaustive {
                SearchOptions {
                    limit,
                    ..ctx.search_options()
                }
            } else {
                SearchOptions::first_found()
                    .with_budget(ctx.options.budget)
                    .with_threads(ctx.options.threads)
            };
            let out = search(&g, &options)?;
            emit(&search_to_json(&g, &out))?;
            let certain = if exhaustive {
                out.exhaustive
            } else {
                out.exists().is_some()
            };
            Ok(if certain {
                Status::Definitive
            } else {
                Status::Partial
            })
        }
        Command::Admits { spec, audit } => {
            let (p, m, n, lambda) = metacyclic_params(&spec)?;
            let verdict = if audit {
                admits_beauville_audited(p, m, n, lambda, &ctx.search_options())?
            } else {
                admits_beauville(p, m, n, lambda)?
            };
            let partial = verdict.audit.as_ref().is_some_and(|a| !a.exhaustive);
            emit(&serde_json::to_value(&verdict)?)?;
            Ok(if partial {
                Status::Partial
            } else {
                Status::Definitive
            })
        }
        Command::Construct { spec } => {
            emit(&structure_to_json(&construct(&realize(&spec)?)?))?;
            Ok(Status::Definitive)
        }
        Command::Lift { source, structure } => {
            let s = read_structure(&structure)?;
            if !s.verified {
                bail!("the structure to lift does not verify: {:?}", s.refutation);
            }
            let phi = Surjection::between(&realize(&source)?, &s.group)?;
            emit(&structure_to_json(&lift_structure(&phi, &s)?))?;
            Ok(Status::Definitive)
        }
        Command::Tower {
            p,
            depth,
            lambda_rule,
        } => {
            let mut failure = None;
            let tower = build_tower_streaming(p, depth, &lambda_rule, |_, s| {
                if let Err(e) = emit(&structure_to_json(s)) {
                    failure.get_or_insert(e);
                }
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
            emit(&tower_to_json(&tower))?;
            Ok(Status::Definitive)
        }
        Command::PushForward { target, structure } => {
            let s = read_structure(&structure)?;
            let phi = Surjection::between(&s.group, &realize(&target)?)?;
            emit(&structure_to_json(&push_forward(&phi, &s)?))?;
            Ok(Status::Definitive)
        }
        Command::Classify { p, n, lambda } => {
            let c = classify(p, n, lambda)?;
            let pn = p
                .checked_pow(n)
                .ok_or_else(|| anyhow!("{p}^{n} overflows"))?;
            emit(&json!({
                "p": c.p,
                "n": c.n,
                "lambda": lambda % pn,
                "r": c.r,
                "abelian": c.abelian,
            }))?;
            Ok(Status::Definitive)
        }
        Command::IsoWitness {
            p,
            n,
            lambda,
            lambda_prime,
        } => {
            emit(&serde_json::to_value(isomorphism_witness(
                p,
                n,
                lambda,
                lambda_prime,
            )?)?)?;
            Ok(Status::Definitive)
        }
        Command::FiltrationCheck { spec, r, s } => {
            let g = realize(&spec)?;
            let pairs = match (r, s) {
                (Some(r), Some(s)) => vec![(r, s)],
                _ => legal_filtration_pairs(&g)?,
            };
            let reports = pairs
                .into_iter()
                .map(|(r, s)| filtration_iso_check(&g, r, s))
                .collect::<Result<Vec<_>, _>>()?;
            let all = reports.iter().all(|r| r.is_isomorphism());
            emit(&json!({
                "group": g.spec(),
                "checks": reports,
                "all_isomorphisms": all,
            }))?;
            Ok(Status::Definitive)
        }
        Command::Genus { values, batch } => genus(values, batch, ctx),
        Command::Sweep { input, no_timing } => sweep(&input, no_timing, ctx),
    }
}

fn genus_row(order: u64, ls: [u64; 3]) -> anyhow::Result<(u64, bool)> {
    let sig = TriangleSignature::new(ls[0], ls[1], ls[2])?;
    let data = cover_data(order, &sig)?;
    Ok((data.genus, is_hyperbolic(&sig)))
}

fn genus(values: Vec<u64>, batch: Option<PathBuf>, ctx: &Ctx) -> anyhow::Result<Status> {
    let rows: Vec<(u64, [u64; 3])> = match batch {
        None => match values[..] {
            [order, a, b, c] => vec![(order, [a, b, c])],
            _ => bail!("genus takes ORDER L1 L2 L3, or --batch FILE"),
        },
        Some(path) => read_input(&path)?
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|(i, line)| {
                let nums = line
                    .split_whitespace()
                    .map(str::parse::<u64>)
                    .collect::<Result<Vec<_>, _>>()
                    .with_context(|| format!("line {}: {line:?}", i + 1))?;
                match nums[..] {
                    [order, a, b, c] => Ok((order, [a, b, c])),
                    _ => bail!("line {}: expected `order l1 l2 l3`", i + 1),
                }
            })
            .collect::<anyhow::Result<_>>()?,
    };
    let mut out = io::stdout().lock();
    if ctx.format == Format::Tsv {
        writeln!(out, "order\tl1\tl2\tl3\tgenus\thyperbolic")?;
    }
    for (order, ls) in rows {
        let (g, hyperbolic) =
            genus_row(order, ls).with_context(|| format!("order {order}, signature {ls:?}"))?;
        match ctx.format {
            Format::Json => writeln!(
                out,
                "{}",
                json!({"order": order, "signature": ls, "genus": g, "hyperbolic": hyperbolic})
            )?,
            Format::Tsv => writeln!(
                out,
                "{order}\t{}\t{}\t{}\t{g}\t{hyperbolic}",
                ls[0], ls[1], ls[2]
            )?,
        }
    }
    Ok(Status::Definitive)
}

fn sweep_spec(line: &str) -> anyhow::Result<GroupDescription> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if let [p, m, n, l] = fields[..] {
        if let (Ok(p), Ok(m), Ok(n), Ok(l)) = (p.parse(), m.parse(), n.parse(), l.parse()) {
            return Ok(GroupDescription::metacyclic(p, m, n, l));
        }
    }
    Ok(line.trim().parse()?)
}

fn sweep(input: &PathBuf, no_timing: bool, ctx: &Ctx) -> anyhow::Result<Status> {
    let text = read_input(input)?;
    let reader = io::BufReader::new(text.as_bytes());
    let mut out = io::stdout().lock();
    if ctx.format == Format::Tsv {
        writeln!(out, "spec\torder\texists\tcount\tseconds")?;
    }
    let mut status = Status::Definitive;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let spec = sweep_spec(&line).with_context(|| format!("line {}", i + 1))?;
        let g = realize(&spec).with_context(|| format!("line {}", i + 1))?;
        let start = Instant::now();
        let res = search(&g, &ctx.search_options().with_limit(0))?;
        let seconds = start.elapsed().as_secs_f64();
        let exists = match res.exists() {
            Some(true) => "yes",
            Some(false) => "no",
            None => {
                status = Status::Partial;
                "unknown"
            }
        };
        let count = res.exhaustive.then_some(res.count);
        match ctx.format {
            Format::Tsv => {
                let count = count.map(|c| c.to_string()).unwrap_or_default();
                let secs = if no_timing {
                    "-".to_string()
                } else {
                    format!("{seconds:.3}")
                };
                writeln!(
                    out,
                    "{}\t{}\t{exists}\t{count}\t{secs}",
                    g.spec(),
                    g.order()
                )?;
            }
            Format::Json => {
                let secs = (!no_timing).then_some(seconds);
                writeln!(
                    out,
                    "{}",
                    json!({"group": g.spec(), "order": g.order(), "exists": exists,
                           "count": count, "seconds": secs})
                )?;
            }
        }
        out.flush()?;
    }
    Ok(status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let budget = Budget {
        candidates: cli.run.max_candidates,
        wall_time: Duration::from_secs(cli.run.max_seconds),
    };
    let ctx = Ctx {
        options: SearchOptions::exhaustive()
            .with_budget(budget)
            .with_threads(cli.run.threads),
        format: cli.run.format,
    };
    let result = if cli.run.threads > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.run.threads)
            .build()
            .map_err(anyhow::Error::from)
            .and_then(|pool| pool.install(|| run(cli.command, &ctx)))
    } else {
        run(cli.command, &ctx)
    };
    match result {
        Ok(Status::Definitive) => ExitCode::SUCCESS,
        Ok(Status::Partial) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
