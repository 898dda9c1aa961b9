use std::io::{self, IsTerminal, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde_json::{json, Value};

use smseq::census::{self, CensusSpec, CensusTable, Family, RunOptions, Statistic};
use smseq::classify::ProfileStats;
use smseq::formulas::{self, Arity, DEFAULT_MAX_N};
use smseq::matching::{self, enumerate_stable, gale_shapley};
use smseq::registry::{self, Kind, TermStatus};
use smseq::{Error, PreferenceProfile, Side};

/// Stable marriage toolkit: solve profiles, classify them, evaluate counting
/// formulas and run brute-force censuses over all profiles.
#[derive(Parser, Debug)]
#[command(name = "smseq", version)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Profile file (`-` for stdin): 2n lines of n ranks, men's rows first.
    #[arg(long, global = true)]
    profile: Option<PathBuf>,

    /// Worker threads for censuses (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed for `--random` profiles.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Use a uniformly random profile of this size instead of `--profile`.
    #[arg(long, global = true, conflicts_with = "profile")]
    random: Option<usize>,

    /// Suppress progress output.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Men,
    Women,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run Gale-Shapley on a profile.
    Solve {
        #[arg(long, value_enum, default_value_t = SideArg::Men)]
        side: SideArg,
    },
    /// List every stable matching of a profile (n <= 6).
    Enumerate,
    /// Report which families a profile belongs to.
    Classify,
    /// Evaluate a counting formula.
    Formula(FormulaArgs),
    /// Brute-force census over a profile family.
    Census(CensusArgs),
    /// Compare every closed form against a census at size n.
    Verify {
        #[arg(long)]
        n: usize,
        /// Allow the full census for n >= 4.
        #[arg(long)]
        force: bool,
    },
    /// Registered integer sequences.
    Seq {
        #[command(subcommand)]
        command: SeqCommand,
    },
}

#[derive(Args, Debug)]
struct FormulaArgs {
    /// Formula name (see `--list`).
    #[arg(required_unless_present = "list")]
    name: Option<String>,
    #[arg(long, required_unless_present = "list")]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Largest n accepted.
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    max_n: usize,
    #[arg(long)]
    list: bool,
}

#[derive(Args, Debug)]
struct CensusArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "all")]
    family: String,
    /// Statistic to tally; repeat for several.
    #[arg(long = "stat", required = true)]
    stats: Vec<String>,
    /// Fix woman 1's ranking and scale by n!.
    #[arg(long)]
    symmetry: bool,
    /// Run even when the estimated cost exceeds the guard.
    #[arg(long)]
    force: bool,
    /// Indices per work unit.
    #[arg(long, default_value_t = census::DEFAULT_CHUNK)]
    chunk: u64,
}

#[derive(Subcommand, Debug)]
enum SeqCommand {
    /// List registered sequences.
    List,
    /// Recompute stored terms up to --max and compare.
    Check {
        id: String,
        #[arg(long)]
        max: usize,
        #[arg(long)]
        force: bool,
    },
    /// Print terms up to --max as a b-file.
    Export {
        id: String,
        #[arg(long)]
        max: usize,
        #[arg(long)]
        force: bool,
    },
}

/// Command result: JSON payload, text rendering and CSV rendering.
struct Output {
    json: Value,
    text: String,
    csv: Option<String>,
    /// Exit status 1: a verification found a mismatch.
    mismatch: bool,
}

impl Output {
    fn new(json: Value, text: String) -> Output {
        Output {
            json,
            text,
            csv: None,
            mismatch: false,
        }
    }

    fn csv(mut self, csv: String) -> Output {
        self.csv = Some(csv);
        self
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let started = Instant::now();
    match run(&cli) {
        Ok(out) => {
            let rendered = match cli.format {
                Format::Text => out.text,
                Format::Csv => out.csv.unwrap_or(out.text),
                Format::Json => {
                    let wrapped = json!({
                        "command": command_name(&cli.command),
                        "params": params(&cli),
                        "result": out.json,
                        "elapsed_ms": started.elapsed().as_millis() as u64,
                    });
                    serde_json::to_string_pretty(&wrapped).expect("JSON values serialize") + "\n"
                }
            };
            let mut stdout = io::stdout().lock();
            if stdout.write_all(rendered.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(if out.mismatch { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Solve { .. } => "solve",
        Command::Enumerate => "enumerate",
        Command::Classify => "classify",
        Command::Formula(_) => "formula",
        Command::Census(_) => "census",
        Command::Verify { .. } => "verify",
        Command::Seq { command } => match command {
            SeqCommand::List => "seq list",
            SeqCommand::Check { .. } => "seq check",
            SeqCommand::Export { .. } => "seq export",
        },
    }
}

fn params(cli: &Cli) -> Value {
    let mut p = json!({
        "profile": cli.profile.as_ref().map(|p| p.display().to_string()),
        "random": cli.random,
        "seed": cli.seed,
        "workers": cli.workers,
    });
    let extra = match &cli.command {
        Command::Solve { side } => json!({ "side": format!("{side:?}").to_lowercase() }),
        Command::Enumerate | Command::Classify | Command::Seq { command: SeqCommand::List } => json!({}),
        Command::Formula(f) => json!({ "name": f.name, "n": f.n, "k": f.k, "max_n": f.max_n, "list": f.list }),
        Command::Census(c) => json!({
            "n": c.n, "family": c.family, "stats": c.stats, "symmetry": c.symmetry, "force": c.force, "chunk": c.chunk,
        }),
        Command::Verify { n, force } => json!({ "n": n, "force": force }),
        Command::Seq { command: SeqCommand::Check { id, max, force } | SeqCommand::Export { id, max, force } } => {
            json!({ "id": id, "max": max, "force": force })
        }
    };
    if let (Value::Object(p), Value::Object(extra)) = (&mut p, extra) {
        p.extend(extra);
    }
    p
}

fn run(cli: &Cli) -> anyhow::Result<Output> {
    match &cli.command {
        Command::Solve { side } => solve(&load_profile(cli)?, *side),
        Command::Enumerate => enumerate(&load_profile(cli)?),
        Command::Classify => classify(&load_profile(cli)?),
        Command::Formula(args) => formula(args),
        Command::Census(args) => run_census(cli, args),
        Command::Verify { n, force } => verify(cli, *n, *force),
        Command::Seq { command } => seq(command),
    }
}

fn load_profile(cli: &Cli) -> anyhow::Result<PreferenceProfile> {
    if let Some(n) = cli.random {
        if n == 0 || n > 255 {
            bail!("--random needs 1 <= n <= 255");
        }
        let mut rng = StdRng::seed_from_u64(cli.seed);
        let mut side = || -> Vec<Vec<usize>> {
            (0..n)
                .map(|_| {
                    let mut r: Vec<usize> = (1..=n).collect();
                    r.shuffle(&mut rng);
                    r
                })
                .collect()
        };
        let men = side();
        let women = side();
        return Ok(PreferenceProfile::new(&men, &women)?);
    }
    let text = match cli.profile.as_deref() {
        Some(path) if path.as_os_str() != "-" => {
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
        }
        _ => {
            if cli.profile.is_none() && io::stdin().is_terminal() {
                bail!("no profile given: use --profile <path>, --profile - or --random <n>");
            }
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            s
        }
    };
    Ok(PreferenceProfile::parse(&text)?)
}

fn pair_json(p: &PreferenceProfile, m: &smseq::Matching) -> Value {
    let couples: Vec<Value> = matching::pair_costs(p, m)
        .expect("matching built for this profile")
        .iter()
        .map(|c| {
            json!({
                "man": c.man + 1,
                "woman": c.woman + 1,
                "man_rank": p.man_rank(c.man, c.woman),
                "woman_rank": p.woman_rank(c.woman, c.man),
                "cost": c.cost,
            })
        })
        .collect();
    Value::Array(couples)
}

fn solve(p: &PreferenceProfile, side: SideArg) -> anyhow::Result<Output> {
    let sides: &[Side] = match side {
        SideArg::Men => &[Side::Men],
        SideArg::Women => &[Side::Women],
        SideArg::Both => &[Side::Men, Side::Women],
    };
    let mut text = String::new();
    let mut csv = String::from("side,man,woman,man_rank,woman_rank,cost\n");
    let mut results = Vec::new();
    for &s in sides {
        let t = gale_shapley(p, s);
        let cost = matching::egalitarian_cost(p, &t.matching)?;
        if sides.len() > 1 {
            text.push_str(&format!("# {s}-proposing\n"));
        }
        for c in matching::pair_costs(p, &t.matching)? {
            text.push_str(&format!("m{} w{} cost {}\n", c.man + 1, c.woman + 1, c.cost));
            csv.push_str(&format!(
                "{s},{},{},{},{},{}\n",
                c.man + 1,
                c.woman + 1,
                p.man_rank(c.man, c.woman),
                p.woman_rank(c.woman, c.man),
                c.cost
            ));
        }
        text.push_str(&format!("total {cost} rounds {}\n", t.rounds));
        results.push(json!({
            "side": s,
            "matching": t.matching,
            "couples": pair_json(p, &t.matching),
            "egalitarian_cost": cost,
            "rounds": t.rounds,
        }));
    }
    let json = if results.len() == 1 { results.remove(0) } else { Value::Array(results) };
    Ok(Output::new(json, text).csv(csv))
}

fn enumerate(p: &PreferenceProfile) -> anyhow::Result<Output> {
    let all = enumerate_stable(p)?;
    let mut text = String::new();
    let mut csv = String::from("index,man,woman,cost\n");
    let mut list = Vec::new();
    for (i, m) in all.iter().enumerate() {
        let cost = matching::egalitarian_cost(p, m)?;
        text.push_str(&format!("{m} cost {cost}\n"));
        for c in matching::pair_costs(p, m)? {
            csv.push_str(&format!("{},{},{},{}\n", i + 1, c.man + 1, c.woman + 1, c.cost));
        }
        list.push(json!({ "matching": m, "couples": pair_json(p, m), "egalitarian_cost": cost }));
    }
    text.push_str(&format!("{} stable matching{}\n", all.len(), if all.len() == 1 { "" } else { "s" }));
    Ok(Output::new(json!({ "count": all.len(), "stable_matchings": list }), text).csv(csv))
}

fn classify(p: &PreferenceProfile) -> anyhow::Result<Output> {
    let s = ProfileStats::of(p);
    let outcasts: Vec<[usize; 2]> = s.outcast_pairs.iter().map(|&(m, w)| [m + 1, w + 1]).collect();
    let mut json = serde_json::to_value(&s)?;
    json["outcast_pairs"] = json!(outcasts);
    let mut rows: Vec<(String, String)> = Vec::new();
    if let Value::Object(map) = &json {
        for (k, v) in map {
            let v = match v {
                Value::Array(pairs) => pairs
                    .iter()
                    .map(|pair| format!("m{}-w{}", pair[0], pair[1]))
                    .collect::<Vec<_>>()
                    .join(" "),
                other => other.to_string(),
            };
            rows.push((k.clone(), v));
        }
    }
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let text: String = rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect();
    let csv = std::iter::once("property,value\n".to_string())
        .chain(rows.iter().map(|(k, v)| format!("{k},{v}\n")))
        .collect();
    Ok(Output::new(json, text).csv(csv))
}

fn formula(args: &FormulaArgs) -> anyhow::Result<Output> {
    if args.list {
        let width = formulas::FORMULAS.iter().map(|f| f.name.len()).max().unwrap_or(0);
        let mut text = String::new();
        let mut csv = String::from("name,arity,oeis,description\n");
        for f in formulas::FORMULAS {
            let arity = match f.arity {
                Arity::N => "n",
                Arity::NK => "n,k",
            };
            text.push_str(&format!("{:<width$}  {:<4} {:<8} {}\n", f.name, arity, f.oeis, f.description));
            csv.push_str(&format!("{},\"{}\",{},\"{}\"\n", f.name, arity, f.oeis, f.description));
        }
        return Ok(Output::new(serde_json::to_value(formulas::FORMULAS)?, text).csv(csv));
    }
    let name = args.name.as_deref().expect("clap requires a name");
    let n = args.n.expect("clap requires --n");
    let value = formulas::evaluate(name, n, args.k, args.max_n)?;
    let json = json!({ "name": name, "n": n, "k": args.k, "value": value.to_string() });
    Ok(Output::new(json, format!("{value}\n")).csv(format!("name,n,k,value\n{name},{n},{},{value}\n", args.k.map_or(String::new(), |k| k.to_string()))))
}

fn workers(cli: &Cli) -> anyhow::Result<usize> {
    match cli.workers {
        Some(0) => bail!("--workers must be positive"),
        Some(w) => Ok(w),
        None => Ok(census::default_workers()),
    }
}

/// Prints a line each time the completed percentage goes up.
fn progress_printer(quiet: bool) -> impl Fn(u64, u64) + Sync {
    let last = AtomicU64::new(0);
    move |done: u64, total: u64| {
        let pct = done * 100 / total.max(1);
        if !quiet && last.fetch_max(pct + 1, Ordering::Relaxed) < pct + 1 {
            eprintln!("progress {pct:>3}% ({done}/{total} units)");
        }
    }
}

fn run_census(cli: &Cli, args: &CensusArgs) -> anyhow::Result<Output> {
    let family: Family = args.family.parse()?;
    let stats = args
        .stats
        .iter()
        .map(|s| s.parse::<Statistic>())
        .collect::<Result<Vec<_>, _>>()?;
    let spec = CensusSpec::new(args.n, family, stats)
        .workers(workers(cli)?)
        .symmetry(args.symmetry)
        .force(args.force)
        .chunk(args.chunk);
    let est = census::estimate(&spec)?;
    if est.guarded {
        let msg = format!(
            "estimated {:.3e} profiles, about {:.0} s on one core",
            est.profiles_visited, est.seconds_single_core
        );
        if !args.force {
            bail!("refusing to run: {msg}; pass --force to run anyway");
        }
        eprintln!("{msg}");
    }
    let progress = progress_printer(cli.quiet);
    let opts = RunOptions {
        progress: Some(&progress),
        cancel: None,
    };
    let table = census::run_census_with(&spec, &opts)?;
    Ok(census_output(&table))
}

fn census_output(t: &CensusTable) -> Output {
    let json = serde_json::to_value(t).expect("census table serializes");
    let mut text = String::new();
    let single = t.histograms.len() == 1;
    let mut csv = String::from(if single { "value,count\n" } else { "statistic,value,count\n" });
    for (stat, h) in &t.histograms {
        let vw = h.rows.keys().map(|v| v.to_string().len()).max().unwrap_or(1).max(5);
        let total = h.total().to_string();
        let cw = h.rows.values().map(|c| c.to_string().len()).max().unwrap_or(1).max(total.len());
        text.push_str(&format!("# {stat} (n={}, family={})\n", t.spec.n, t.spec.family));
        text.push_str(&format!("{:>vw$}  {:>cw$}\n", "value", "count"));
        for (v, c) in &h.rows {
            text.push_str(&format!("{v:>vw$}  {:>cw$}\n", c.to_string()));
            if single {
                csv.push_str(&format!("{v},{c}\n"));
            } else {
                csv.push_str(&format!("{stat},{v},{c}\n"));
            }
        }
        text.push_str(&format!("{:>vw$}  {total:>cw$}\n", "total"));
    }
    text.push_str(&format!("profiles {}\n", t.profiles));
    Output::new(json, text).csv(csv)
}

fn verify(cli: &Cli, n: usize, force: bool) -> anyhow::Result<Output> {
    let progress = progress_printer(cli.quiet);
    let opts = RunOptions {
        progress: Some(&progress),
        cancel: None,
    };
    let report = census::verify_formulas_with(n, force, workers(cli)?, &opts)?;
    let nw = report.rows.iter().map(|r| r.name.len()).max().unwrap_or(4);
    let cw = report.rows.iter().map(|r| r.census.to_string().len()).max().unwrap_or(6).max(6);
    let mut text = format!("{:<nw$}  {:>cw$}  {:>cw$}  status\n", "check", "census", "formula");
    let mut csv = String::from("check,census,formula,matches\n");
    for r in &report.rows {
        let status = if r.matches { "ok" } else { "MISMATCH" };
        text.push_str(&format!(
            "{:<nw$}  {:>cw$}  {:>cw$}  {status}\n",
            r.name,
            r.census.to_string(),
            r.formula.to_string()
        ));
        csv.push_str(&format!("{},{},{},{}\n", r.name, r.census, r.formula, r.matches));
    }
    let bad = report.mismatches().count();
    text.push_str(&format!("{} checks, {bad} mismatches\n", report.rows.len()));
    let mut out = Output::new(serde_json::to_value(&report)?, text).csv(csv);
    out.json["all_match"] = json!(bad == 0);
    out.mismatch = bad > 0;
    Ok(out)
}

fn seq(cmd: &SeqCommand) -> anyhow::Result<Output> {
    match cmd {
        SeqCommand::List => {
            let reg = registry::registry();
            let mut text = String::new();
            let mut csv = String::from("id,offset,kind,producer,terms,description\n");
            let mut list = Vec::new();
            for e in reg.entries() {
                let kind = match e.kind {
                    Kind::Scalar => "scalar",
                    Kind::Table => "table",
                };
                text.push_str(&format!("{}  {:<40} {}\n", e.id, e.producer.to_string(), e.description));
                csv.push_str(&format!(
                    "{},{},{kind},\"{}\",{},\"{}\"\n",
                    e.id,
                    e.offset,
                    e.producer,
                    e.terms.len(),
                    e.description
                ));
                list.push(serde_json::to_value(e)?);
            }
            Ok(Output::new(Value::Array(list), text).csv(csv))
        }
        SeqCommand::Check { id, max, force } => {
            let report = registry::check_sequence(id, *max, *force)?;
            let mut text = String::new();
            let mut csv = String::from("index,expected,got,status\n");
            for t in &report.terms {
                let status = match (t.status, &t.got) {
                    (_, Some(g)) if *g == t.expected => "ok",
                    (_, Some(_)) => "MISMATCH",
                    (TermStatus::Gated, None) => "gated",
                    (_, None) => "stored-only",
                };
                let got = t.got.as_ref().map_or("-".to_string(), BigUint::to_string);
                text.push_str(&format!("{} {} {} {status}\n", t.index, t.expected, got));
                csv.push_str(&format!("{},{},{},{status}\n", t.index, t.expected, got));
            }
            let bad = report.mismatches().count();
            text.push_str(&format!(
                "{id}: {} terms, {} reproduced, {bad} mismatches\n",
                report.terms.len(),
                report.computed()
            ));
            let mut out = Output::new(serde_json::to_value(&report)?, text).csv(csv);
            out.json["all_match"] = json!(bad == 0);
            out.mismatch = bad > 0;
            Ok(out)
        }
        SeqCommand::Export { id, max, force } => {
            let bfile = registry::export_bfile(id, *max, *force).map_err(|e| match e {
                Error::Gated { .. } => anyhow!("{e}; pass --force to run it"),
                other => anyhow!(other),
            })?;
            let terms: Vec<Value> = registry::parse_bfile(&bfile)?
                .into_iter()
                .map(|(i, v)| json!([i, v.to_string()]))
                .collect();
            let csv = std::iter::once("index,value\n".to_string())
                .chain(bfile.lines().map(|l| l.replacen(' ', ",", 1) + "\n"))
                .collect();
            Ok(Output::new(json!({ "id": id, "terms": terms }), bfile).csv(csv))
        }
    }
}
