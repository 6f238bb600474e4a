use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dtperc::exact::exact_prob;
use dtperc::graph::{load_family, parse_graph};
use dtperc::mc::mc_prob;
use dtperc::suite::corpus::{self, Instance};
use dtperc::suite::{implied_lambda, run_check, scan_conjectures, CheckReport, Method, Params, Verdict, SCAN_IDS};
use dtperc::zipper::{
    check_gen_inequality, check_zipper_condition, preset_for_graph, ConditionReport, GenEvent, GenInequalityReport,
    GenStrategy,
};
use dtperc::{parse_event, parse_strategy, BoundEvent, Graph};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dtperc", version, about = "Checks percolation correlation inequalities on finite graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs one named check or conjecture scan.
    Check(CheckArgs),
    /// Prints the probability of one event.
    Estimate(EstimateArgs),
    /// Checks the per-edge coupling condition and the probability sandwich
    /// for a preset pair of sample spaces.
    Zipper(ZipperArgs),
    /// Runs the built-in corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    Run {
        /// Glob over check ids, e.g. `hk_*`.
        #[arg(long)]
        filter: Option<String>,
        /// Directory for one JSON report per instance plus summary.csv.
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct MethodArgs {
    #[arg(long, value_enum, default_value = "exact")]
    method: MethodArg,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Required for `--method mc`.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo verdicts need the slack this many standard errors from zero.
    #[arg(long, default_value_t = 3.0)]
    sigma: f64,
}

impl MethodArgs {
    fn method(&self) -> Result<Method> {
        Ok(match self.method {
            MethodArg::Exact => Method::Exact,
            MethodArg::Mc => {
                let seed = self.seed.ok_or_else(|| anyhow!(Usage("--method mc needs --seed".into())))?;
                Method::Mc {
                    samples: self.samples,
                    seed,
                    sigma: self.sigma,
                }
            }
        })
    }
}

#[derive(Args)]
struct CheckArgs {
    id: String,
    /// Graph file, or `family:<name>:<params>` such as `family:grid:5,5,p=0.5`.
    #[arg(long)]
    graph: String,
    #[arg(long)]
    strategy: Option<String>,
    /// First tree of the CS bound.
    #[arg(long)]
    prefix: Option<String>,
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    events: Vec<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_delimiter = ',', num_args = 4, value_names = ["N", "K", "L", "M"])]
    nklm: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', num_args = 2, value_names = ["N", "M"])]
    nm: Option<Vec<usize>>,
    #[arg(long)]
    max_n: Option<usize>,
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long, value_enum, default_value = "json")]
    out: Format,
    /// Leaves `runtime_ms` null so repeated runs print identical bytes.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    graph: String,
    /// Event expression; defaults to `npaths(a,b,k)` with `--lambda k`.
    #[arg(long)]
    event: Option<String>,
    /// Also reports the implied Poisson parameter at `k`.
    #[arg(long)]
    lambda: Option<u32>,
    #[command(flatten)]
    method: MethodArgs,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("mixed").args(["tree", "choices", "hashed"])))]
struct ZipperArgs {
    /// One of hk, vdbk, strongbk, colored, richards.
    preset: String,
    #[arg(long)]
    graph: String,
    /// Adds `A ⋈ B` to a union of bowtie events; repeatable.
    #[arg(long, num_args = 2, value_names = ["A", "B"], action = clap::ArgAction::Append)]
    bowtie: Vec<String>,
    /// Product event: digit `i` of every symbol lies in factor `i`.
    #[arg(long, num_args = 1..=3, conflicts_with = "bowtie")]
    product: Vec<String>,
    /// Mixed tree from a set-building strategy.
    #[arg(long)]
    tree: Option<String>,
    /// Space fed to edges the tree sends to S.
    #[arg(long, default_value_t = 2, requires = "tree", value_parser = clap::value_parser!(u8).range(1..=2))]
    on_s: u8,
    /// Mixed tree choosing space `choices[e]` for edge `e`.
    #[arg(long, value_delimiter = ',')]
    choices: Vec<u8>,
    /// Adaptive mixed tree keyed by this seed (the default, with seed 0).
    #[arg(long)]
    hashed: Option<u64>,
}

/// Usage errors that only show up after parsing.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn load_graph(desc: &str) -> Result<Graph> {
    if desc.starts_with("family:") {
        return Ok(load_family(desc)?);
    }
    let text = fs::read_to_string(desc).with_context(|| format!("reading graph file {desc}"))?;
    Ok(parse_graph(&text)?)
}

fn params(a: &CheckArgs) -> Params {
    Params {
        strategy: a.strategy.clone(),
        prefix: a.prefix.clone(),
        events: a.events.clone(),
        epsilon: a.epsilon,
        nklm: a.nklm.as_ref().map(|v| [v[0], v[1], v[2], v[3]]),
        nm: a.nm.as_ref().map(|v| [v[0], v[1]]),
        max_n: a.max_n,
    }
}

fn shell_quote(s: &str) -> String {
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "-_.,:=/".contains(c)) {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', r"'\''"))
    }
}

/// Command line that reruns one check.
fn reproduce(id: &str, graph: &str, p: &Params, method: Method) -> String {
    let mut args = vec!["dtperc".to_string(), "check".into(), id.into(), "--graph".into(), graph.into()];
    let mut flag = |name: &str, value: String| {
        args.push(format!("--{name}"));
        args.push(value);
    };
    if let Some(s) = &p.prefix {
        flag("prefix", s.clone());
    }
    if let Some(s) = &p.strategy {
        flag("strategy", s.clone());
    }
    if let Some(e) = p.epsilon {
        flag("epsilon", e.to_string());
    }
    if let Some([n, k, l, m]) = p.nklm {
        flag("nklm", format!("{n},{k},{l},{m}"));
    }
    if let Some([n, m]) = p.nm {
        flag("nm", format!("{n},{m}"));
    }
    if let Some(n) = p.max_n {
        flag("max-n", n.to_string());
    }
    match method {
        Method::Exact => flag("method", "exact".into()),
        Method::Mc { samples, seed, sigma } => {
            flag("method", "mc".into());
            flag("samples", samples.to_string());
            flag("seed", seed.to_string());
            flag("sigma", sigma.to_string());
        }
    }
    if !p.events.is_empty() {
        args.push("--events".into());
        args.extend(p.events.iter().cloned());
    }
    args.iter().map(|a| shell_quote(a)).collect::<Vec<_>>().join(" ")
}

fn report_failures(reports: &[CheckReport], repro: &str) -> bool {
    let mut failed = false;
    for r in reports.iter().filter(|r| r.is_failure()) {
        failed = true;
        let what = match r.kind {
            dtperc::suite::Kind::Conjecture => "conjecture violation (finding)",
            _ => "theorem-backed check violated",
        };
        eprintln!("{what}: {}", serde_json::to_string(r).unwrap_or_default());
        eprintln!("reproduce: {repro}");
    }
    failed
}

fn write_csv(reports: &[CheckReport], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in reports {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_check(a: &CheckArgs) -> Result<ExitCode> {
    let g = load_graph(&a.graph)?;
    let p = params(a);
    let method = a.method.method()?;
    let scan = SCAN_IDS.contains(&a.id.as_str());
    let mut reports = if scan {
        scan_conjectures(&a.id, &g, &a.graph, &p, method)?
    } else {
        vec![run_check(&a.id, &g, &a.graph, &p, method)?]
    };
    if a.no_timing {
        reports.iter_mut().for_each(|r| r.runtime_ms = None);
    }
    let stdout = std::io::stdout();
    match a.out {
        Format::Json => {
            let text = if scan {
                serde_json::to_string_pretty(&reports)?
            } else {
                serde_json::to_string_pretty(&reports[0])?
            };
            writeln!(stdout.lock(), "{text}")?;
        }
        Format::Csv => write_csv(&reports, stdout.lock())?,
    }
    let failed = report_failures(&reports, &reproduce(&a.id, &a.graph, &p, method));
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

#[derive(Serialize)]
struct EstimateOut {
    graph: String,
    event: String,
    method: &'static str,
    probability: f64,
    std_err: Option<f64>,
    ci_low: Option<f64>,
    ci_high: Option<f64>,
    samples: Option<u64>,
    seed: Option<u64>,
    lambda_k: Option<u32>,
    lambda: Option<f64>,
}

fn cmd_estimate(a: &EstimateArgs) -> Result<ExitCode> {
    let g = load_graph(&a.graph)?;
    let text = match (&a.event, a.lambda) {
        (Some(e), _) => e.clone(),
        (None, Some(k)) => {
            let m = g.mark_names();
            if m.len() < 2 {
                bail!(Usage("--lambda without --event needs two marked vertices".into()));
            }
            format!("npaths({},{},{k})", m[0], m[1])
        }
        (None, None) => bail!(Usage("estimate needs --event or --lambda".into())),
    };
    let e = parse_event(&text)?.bind(&g)?;
    let mut out = EstimateOut {
        graph: a.graph.clone(),
        event: text,
        method: "exact",
        probability: 0.0,
        std_err: None,
        ci_low: None,
        ci_high: None,
        samples: None,
        seed: None,
        lambda_k: a.lambda,
        lambda: None,
    };
    match a.method.method()? {
        Method::Exact => out.probability = exact_prob(&g, &e)?,
        Method::Mc { samples, seed, .. } => {
            let est = mc_prob(&g, &e, samples, seed)?;
            out.method = "mc";
            out.probability = est.mean;
            out.std_err = Some(est.std_err);
            out.ci_low = Some(est.ci_low);
            out.ci_high = Some(est.ci_high);
            out.samples = Some(samples);
            out.seed = Some(seed);
        }
    }
    if let Some(k) = a.lambda {
        out.lambda = Some(implied_lambda(k, out.probability)?);
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ZipperOut {
    preset: String,
    graph: String,
    event: String,
    tree: String,
    condition: ConditionReport,
    inequality: GenInequalityReport,
    note: Option<&'static str>,
}

fn cmd_zipper(a: &ZipperArgs) -> Result<ExitCode> {
    let g = load_graph(&a.graph)?;
    let spaces = preset_for_graph(&a.preset, &g)?;
    let bind = |s: &str| -> Result<BoundEvent> { Ok(parse_event(s)?.bind(&g)?) };
    let product_preset = matches!(a.preset.as_str(), "colored" | "richards");
    let (event, desc) = if !a.product.is_empty() || (product_preset && a.bowtie.is_empty()) {
        let factors = if a.product.is_empty() {
            let m = g.mark_names();
            vec![format!("{},{}", m[0], m[1]); 3]
        } else {
            a.product.clone()
        };
        let es = factors.iter().map(|f| bind(f)).collect::<Result<Vec<_>>>()?;
        (GenEvent::Product(es), factors.join(" x "))
    } else {
        let pairs = if a.bowtie.is_empty() {
            let m = g.mark_names();
            let ab = format!("{},{}", m[0], m[1]);
            vec![ab.clone(), ab]
        } else {
            a.bowtie.clone()
        };
        let bound = pairs
            .chunks(2)
            .map(|p| Ok((bind(&p[0])?, bind(&p[1])?)))
            .collect::<Result<Vec<_>>>()?;
        let desc = pairs.chunks(2).map(|p| format!("{} ⋈ {}", p[0], p[1])).collect::<Vec<_>>().join(" U ");
        (GenEvent::Bowtie(bound), desc)
    };
    let t = if let Some(spec) = &a.tree {
        GenStrategy::Tree {
            tree: parse_strategy(spec)?.bind(&g)?,
            on_s: a.on_s,
        }
    } else if !a.choices.is_empty() {
        if a.choices.len() != g.edge_count() || a.choices.iter().any(|c| !(1..=2).contains(c)) {
            bail!(Usage(format!("--choices needs {} values in {{1,2}}", g.edge_count())));
        }
        GenStrategy::PerEdge(a.choices.clone())
    } else {
        GenStrategy::Hashed(a.hashed.unwrap_or(0))
    };
    let condition = check_zipper_condition(&g, &spaces, &event)?;
    let inequality = check_gen_inequality(&g, &spaces, &t, &event)?;
    // a failed condition voids the sandwich, so only the other combination is a failure
    let failed = condition.holds && !inequality.holds;
    let note = match (condition.holds, inequality.holds) {
        (true, false) => Some("condition holds but the sandwich is violated"),
        (false, _) => Some("condition fails; sandwich reported without guarantee"),
        _ => None,
    };
    let out = ZipperOut {
        preset: a.preset.clone(),
        graph: a.graph.clone(),
        event: desc,
        tree: format!("{t:?}"),
        condition,
        inequality,
        note,
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

/// Writes through a temporary file so readers never see a partial report.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

#[derive(Default)]
struct Tally {
    reports: usize,
    holds: usize,
    violated: usize,
    inconclusive: usize,
}

fn cmd_corpus(filter: Option<&str>, out: Option<&str>, no_timing: bool) -> Result<ExitCode> {
    let mut instances = corpus::builtin();
    if let Some(pat) = filter {
        instances = corpus::filter(instances, pat)?;
    }
    if instances.is_empty() {
        bail!(Usage(format!("no corpus instance matches `{}`", filter.unwrap_or("*"))));
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {dir}"))?;
    }
    let results = corpus::run_all(&instances);
    let mut all: Vec<(&Instance, CheckReport)> = Vec::new();
    let mut first_error = None;
    for (inst, res) in instances.iter().zip(results) {
        match res {
            Ok(mut reports) => {
                if no_timing {
                    reports.iter_mut().for_each(|r| r.runtime_ms = None);
                }
                if let Some(dir) = out {
                    let body = if inst.is_scan() {
                        serde_json::to_string_pretty(&reports)?
                    } else {
                        serde_json::to_string_pretty(&reports[0])?
                    };
                    write_atomic(&Path::new(dir).join(format!("{}.json", inst.stem())), body.as_bytes())?;
                }
                all.extend(reports.into_iter().map(|r| (inst, r)));
            }
            Err(e) => {
                eprintln!("error: {} on {}: {e}", inst.check_id, inst.graph);
                first_error.get_or_insert(e);
            }
        }
    }
    let mut tally: BTreeMap<&str, Tally> = BTreeMap::new();
    let mut failed = false;
    for (inst, r) in &all {
        let t = tally.entry(r.check_id.as_str()).or_default();
        t.reports += 1;
        match r.verdict {
            Verdict::Holds => t.holds += 1,
            Verdict::Violated => t.violated += 1,
            Verdict::Inconclusive => t.inconclusive += 1,
        }
        failed |= report_failures(
            std::slice::from_ref(r),
            &reproduce(&inst.check_id, &inst.graph, &inst.params, inst.method),
        );
    }
    if let Some(dir) = out {
        let mut buf = Vec::new();
        write_csv(&all.iter().map(|(_, r)| r.clone()).collect::<Vec<_>>(), &mut buf)?;
        write_atomic(&Path::new(dir).join("summary.csv"), &buf)?;
    }
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{:<18} {:>7} {:>7} {:>9} {:>13}", "check", "reports", "holds", "violated", "inconclusive")?;
    for (id, t) in &tally {
        writeln!(
            stdout,
            "{:<18} {:>7} {:>7} {:>9} {:>13}",
            id, t.reports, t.holds, t.violated, t.inconclusive
        )?;
    }
    writeln!(stdout, "{} instances, {} reports", instances.len(), all.len())?;
    if let Some(e) = first_error {
        return Err(e.into());
    }
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<dtperc::Error>() {
        Some(e) if e.is_size_guard() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Zipper(a) => cmd_zipper(a),
        Command::Corpus {
            action: CorpusAction::Run { filter, out, no_timing },
        } => cmd_corpus(filter.as_deref(), out.as_deref(), *no_timing),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
