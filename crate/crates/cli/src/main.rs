//! `graphon-commons`: densities, certificates, witness search and
//! classification from the command line.
//!
//! Exit codes: 0 pass/holds, 1 claim fails or no witness, 2 input error,
//! 3 enumeration budget exceeded, 4 inconclusive.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use commons_core::commonality::{self, FamilyKind, WitnessVerdict};
use commons_core::correlation::{self, Status};
use commons_core::density::{self, DensityOptions, Mode};
use commons_core::k3tree::{k3_tree_correlation, CorrelationRecord, K3Tree};
use commons_core::rat;
use commons_core::reduction::{self, verify::DEFAULT_RESOLUTION, Certificate, Condition, ReductionProblem, Strategy, Verdict};
use commons_core::repro;
use commons_core::{Error, Graph, StepGraphon};

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser)]
#[command(name = "graphon-commons", version, about = "Ramsey multiplicity toolkit for step graphons")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Density arithmetic: auto, rational or float.
    #[arg(long, global = true, default_value = "auto")]
    mode: String,
    /// Witness tolerance on the margin.
    #[arg(long, global = true, default_value_t = commonality::DEFAULT_TOL)]
    tol: f64,
    /// Seed for randomized search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// t(H,W), t(H,1-W), their sum and the random-colouring threshold.
    Density {
        /// Graph: JSON file or expression such as "2*K3+3*K2".
        graph: String,
        /// Graphon: JSON file or zy:Z,Y | diag:P | turan:K | const:C.
        graphon: String,
    },
    /// Verify a reduction problem, or replay a certificate.
    Verify {
        /// Problem or certificate JSON file, or two_triangles:L | three_triangles:R.
        input: String,
        #[arg(long, default_value = "grid")]
        strategy: String,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: f64,
        /// Write the certificate JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write x,condition,margin samples as CSV here.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Recompute the reproduction manifest.
    Reproduce {
        #[arg(long, conflicts_with = "id")]
        all: bool,
        #[arg(long)]
        id: Option<String>,
        /// List the manifest without running it.
        #[arg(long)]
        list: bool,
    },
    /// Search a construction family for a witness graphon.
    Search {
        graph: String,
        #[arg(long, default_value = "three_block_zy")]
        family: String,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
    },
    /// Classify (k K3) + (l K2), or a correlation record from a file.
    Classify {
        #[arg(long, conflicts_with = "record")]
        k: Option<usize>,
        #[arg(long, requires = "k")]
        l: Option<usize>,
        #[arg(long)]
        record: Option<PathBuf>,
        /// Report the known range of l for the given k instead.
        #[arg(long, requires = "k")]
        range: bool,
    },
    /// Counts, correlation record and verdicts for a K3-tree.
    Tree {
        file: PathBuf,
        /// Edge count of a Sidorenko graph F to add disjointly.
        #[arg(long)]
        sidorenko_edges: Option<usize>,
    },
}

struct Outcome {
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => ExitCode::from(o.code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_for(&e))
        }
    }
}

fn exit_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. }) | Some(Error::SizeExceeded { .. }) => EXIT_BUDGET,
        Some(Error::Consistency(_)) => EXIT_FAIL,
        _ => EXIT_INPUT,
    }
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Density { graph, graphon } => cmd_density(g, graph, graphon),
        Cmd::Verify { input, strategy, resolution, out, curve } => cmd_verify(g, input, strategy, *resolution, out.as_deref(), curve.as_deref()),
        Cmd::Reproduce { all, id, list } => cmd_reproduce(g, *all, id.as_deref(), *list),
        Cmd::Search { graph, family, budget } => cmd_search(g, graph, family, *budget),
        Cmd::Classify { k, l, record, range } => cmd_classify(g, *k, *l, record.as_deref(), *range),
        Cmd::Tree { file, sidorenko_edges } => cmd_tree(g, file, *sidorenko_edges),
    }
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    if json {
        serde_json::to_writer_pretty(&mut out, value)?;
        writeln!(out)?;
    } else {
        write!(out, "{}", text())?;
    }
    Ok(())
}

fn read(path: &str) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

fn load_graph(arg: &str) -> anyhow::Result<Graph> {
    if Path::new(arg).is_file() {
        return Ok(serde_json::from_str(&read(arg)?).map_err(Error::from)?);
    }
    Ok(Graph::parse_expr(arg)?)
}

fn load_graphon(arg: &str) -> anyhow::Result<StepGraphon> {
    if Path::new(arg).is_file() {
        return Ok(serde_json::from_str(&read(arg)?).map_err(Error::from)?);
    }
    let (kind, params) = arg.split_once(':').ok_or_else(|| Error::Parse(format!("graphon {arg:?} is neither a file nor kind:params")))?;
    let nums: Vec<rat::Q> = params.split(',').map(|s| rat::parse_q(s.trim())).collect::<Result<_, _>>()?;
    let want = |n: usize| -> anyhow::Result<()> {
        if nums.len() != n {
            bail!(Error::Parse(format!("{kind} takes {n} parameter(s)")));
        }
        Ok(())
    };
    Ok(match kind {
        "zy" => {
            want(2)?;
            StepGraphon::three_block_zy(&nums[0], &nums[1])?
        }
        "diag" => {
            want(1)?;
            StepGraphon::two_block_diag_p(&nums[0])?
        }
        "turan" => {
            want(1)?;
            let k = params.trim().parse().map_err(|_| Error::Parse("turan takes an integer".into()))?;
            StepGraphon::turan(k)?
        }
        "const" => {
            want(1)?;
            StepGraphon::constant(nums[0].clone())?
        }
        other => bail!(Error::Parse(format!("unknown graphon kind {other:?}"))),
    })
}

fn parse_mode(s: &str) -> anyhow::Result<Mode> {
    Ok(match s {
        "auto" => Mode::Auto,
        "rational" => Mode::Rational,
        "float" => Mode::Float,
        other => bail!(Error::Parse(format!("unknown mode {other:?}"))),
    })
}

#[derive(Serialize)]
struct DensityReport {
    t: density::Density,
    t_complement: density::Density,
    mono: density::Density,
    #[serde(with = "rat::as_text")]
    threshold: rat::Q,
    below_threshold: bool,
}

fn show(d: &density::Density) -> String {
    match d.exact() {
        Some(r) => format!("{} (~{:.10})", rat::fmt_q(r), rat::to_f64(r)),
        None => format!("{:.15} (± {:.1e})", d.to_f64(), d.error_bound()),
    }
}

fn cmd_density(g: &Global, graph: &str, graphon: &str) -> anyhow::Result<Outcome> {
    let h = load_graph(graph)?;
    let w = load_graphon(graphon)?;
    let opts = DensityOptions { mode: parse_mode(&g.mode)?, ..Default::default() };
    let t = density::density_with(&h, &w, &opts)?;
    let tc = density::density_with(&h, &w.complement(), &opts)?;
    let mono = t.clone() + tc.clone();
    let threshold = density::threshold(&h);
    let below = (density::Density::Exact(threshold.clone()) - mono.clone()).certainly_above(0.0);
    let rep = DensityReport { t, t_complement: tc, mono, threshold, below_threshold: below };
    emit(g.json, &rep, || {
        format!(
            "t(H,W)        = {}\nt(H,1-W)      = {}\nmono          = {}\nthreshold     = {}\nbelow         = {}\n",
            show(&rep.t),
            show(&rep.t_complement),
            show(&rep.mono),
            rat::fmt_q(&rep.threshold),
            rep.below_threshold
        )
    })?;
    Ok(Outcome { code: 0 })
}

fn builtin_problem(s: &str) -> Option<anyhow::Result<ReductionProblem>> {
    let (name, v) = s.split_once(':')?;
    let n: Result<i64, _> = v.parse();
    Some(match (name, n) {
        ("two_triangles", Ok(n)) => Ok(ReductionProblem::two_triangles(n)),
        ("three_triangles", Ok(n)) => Ok(ReductionProblem::three_triangles(n)),
        _ => Err(anyhow!(Error::Parse(format!("unknown built-in problem {s:?}")))),
    })
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Holds => 0,
        Verdict::FailsAt { .. } => EXIT_FAIL,
        Verdict::Inconclusive { .. } => EXIT_INCONCLUSIVE,
    }
}

fn cmd_verify(g: &Global, input: &str, strategy: &str, resolution: f64, out: Option<&Path>, curve: Option<&Path>) -> anyhow::Result<Outcome> {
    let strategy = Strategy::parse(strategy)?;
    let problem = match builtin_problem(input) {
        Some(p) => p?,
        None => {
            let v: serde_json::Value = serde_json::from_str(&read(input)?).map_err(Error::from)?;
            if v.get("records").is_some() {
                let cert: Certificate = serde_json::from_value(v).map_err(Error::from)?;
                let rep = reduction::replay(&cert)?;
                emit(g.json, &rep, || {
                    let mut s = format!("replay: {} (verdict {})\n", if rep.ok { "ok" } else { "MISMATCH" }, rep.verdict);
                    for m in &rep.mismatches {
                        s += &format!("  {m}\n");
                    }
                    s
                })?;
                return Ok(Outcome { code: if rep.ok { verdict_code(&cert.verdict) } else { EXIT_FAIL } });
            }
            let p: ReductionProblem = serde_json::from_value(v).map_err(Error::from)?;
            p.validate()?;
            p
        }
    };
    let cert = reduction::verify_reduction(&problem, strategy, resolution)?;
    if let Some(path) = out {
        fs::write(path, serde_json::to_string_pretty(&cert)?).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = curve {
        write_curve(&problem, path)?;
    }
    emit(g.json, &cert, || {
        let mut s = format!("verdict: {:?}\n", cert.verdict);
        for r in &cert.records {
            s += &format!("  [{:.6}, {:.6}] {:<16} margin {:.3e}\n", r.x_lo, r.x_hi, r.condition, r.margin);
        }
        s
    })?;
    Ok(Outcome { code: verdict_code(&cert.verdict) })
}

fn write_curve(p: &ReductionProblem, path: &Path) -> anyhow::Result<()> {
    let conds: Vec<Condition> = p.condition_sets().into_iter().flatten().collect();
    let mut s = String::from("x,condition,margin\n");
    for i in 0..=1000 {
        let x = i as f64 / 1000.0;
        for c in &conds {
            let m = p.margin_f64(c, x);
            if m.is_finite() {
                s += &format!("{x},{},{m}\n", c.name());
            }
        }
    }
    fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

fn cmd_reproduce(g: &Global, all: bool, id: Option<&str>, list: bool) -> anyhow::Result<Outcome> {
    if list {
        let m = repro::manifest()?;
        emit(g.json, &m, || m.iter().map(|t| format!("{:<34} {}\n", t.id, t.description)).collect())?;
        return Ok(Outcome { code: 0 });
    }
    let outcomes = match (all, id) {
        (_, Some(id)) => vec![repro::run_id(id)?],
        (true, None) => repro::run_all()?,
        (false, None) => bail!(Error::Parse("pass --all or --id".into())),
    };
    let pass = outcomes.iter().all(|o| o.pass);
    emit(g.json, &outcomes, || {
        let mut s = String::new();
        for o in &outcomes {
            s += &format!("{} {:<34} computed {:<26} expected {:?} ({:.2}s)\n", if o.pass { "PASS" } else { "FAIL" }, o.id, o.computed, o.expected, o.seconds);
            for d in &o.detail {
                s += &format!("       {d}\n");
            }
        }
        s
    })?;
    Ok(Outcome { code: if pass { 0 } else { EXIT_FAIL } })
}

fn cmd_search(g: &Global, graph: &str, family: &str, budget: u64) -> anyhow::Result<Outcome> {
    let h = load_graph(graph)?;
    let s = commonality::search_witness(&h, FamilyKind::parse(family)?, budget, g.seed, g.tol)?;
    emit(g.json, &s, || {
        format!(
            "family   {}\nbest     {:?}\nvalue    {:.10}\nevals    {}\nverdict  {:?}\nmargin   {}\n",
            s.family.name(),
            s.best,
            s.best_value,
            s.evaluations,
            s.report.verdict,
            show(&s.report.margin)
        )
    })?;
    Ok(Outcome { code: if s.report.verdict == WitnessVerdict::NoConclusion { EXIT_FAIL } else { 0 } })
}

fn status_code(s: Status) -> u8 {
    match s {
        Status::Unknown => EXIT_INCONCLUSIVE,
        _ => 0,
    }
}

fn verdict_text(v: &correlation::Verdict) -> String {
    format!(
        "graph    {} vertices, {} edges\nstatus   {:?}\nrule     {}\nevidence {}\n",
        v.graph.vertex_count(),
        v.graph.edge_count(),
        v.status,
        v.rule,
        v.certificate_ref.as_deref().unwrap_or("-")
    )
}

fn cmd_classify(g: &Global, k: Option<usize>, l: Option<usize>, record: Option<&Path>, range: bool) -> anyhow::Result<Outcome> {
    if range {
        let k = k.expect("clap enforces --k");
        if l.is_some() {
            bail!(Error::Parse("--range takes --k only".into()));
        }
        let (common, uncommon) = correlation::known_edge_range(k);
        let v = serde_json::json!({ "k": k, "common_max": common, "uncommon_min": uncommon });
        emit(g.json, &v, || format!("k = {k}: common up to l = {common:?}, uncommon from l = {uncommon:?}\n"))?;
        return Ok(Outcome { code: 0 });
    }
    let v = match (k, l, record) {
        (Some(k), Some(l), _) => correlation::classify_k3_k2_union(k, l)?,
        (_, _, Some(path)) => {
            let rec: CorrelationRecord = serde_json::from_str(&read(&path.to_string_lossy())?).map_err(Error::from)?;
            let rec = CorrelationRecord::new(rec.base_graph, rec.power, rec.edge_exponent, rec.subject)?;
            correlation::check_correlated_common(&rec)?
        }
        _ => bail!(Error::Parse("pass --k and --l, or --record".into())),
    };
    emit(g.json, &v, || verdict_text(&v))?;
    Ok(Outcome { code: status_code(v.status) })
}

#[derive(Serialize)]
struct TreeReport {
    vertices: usize,
    edges: usize,
    v: [usize; 4],
    e: [usize; 3],
    gamma: i64,
    record: Option<CorrelationRecord>,
    correlated: Option<correlation::Verdict>,
    vertex_tree: Option<correlation::Verdict>,
    with_sidorenko: Option<correlation::Verdict>,
}

fn cmd_tree(g: &Global, file: &Path, sidorenko_edges: Option<usize>) -> anyhow::Result<Outcome> {
    let t: K3Tree = serde_json::from_str(&read(&file.to_string_lossy())?).map_err(Error::from)?;
    let h = t.realize()?;
    let c = t.counts();
    let record = k3_tree_correlation(&t).ok();
    let correlated = record.as_ref().map(correlation::check_correlated_common).transpose()?;
    let vertex_tree = if c.e[2] == 0 { Some(correlation::triangle_vertex_tree_uncommon(&t)?) } else { None };
    let with_sidorenko = sidorenko_edges.map(|f| correlation::check_union_with_sidorenko(&t, f)).transpose()?;
    let rep = TreeReport { vertices: h.vertex_count(), edges: h.edge_count(), v: c.v, e: c.e, gamma: c.gamma(), record, correlated, vertex_tree, with_sidorenko };
    let decided = [&rep.correlated, &rep.vertex_tree, &rep.with_sidorenko].iter().filter_map(|v| v.as_ref()).any(|v| v.status != Status::Unknown);
    emit(g.json, &rep, || {
        let mut s = format!("H: {} vertices, {} edges; v = {:?}, e = {:?}, gamma = {}\n", rep.vertices, rep.edges, rep.v, rep.e, rep.gamma);
        match &rep.record {
            Some(r) => s += &format!("record (K3, {}, {})\n", rat::fmt_q(&r.power), rat::fmt_q(&r.edge_exponent)),
            None => s += "record: none (gamma < 0 or no triangle node)\n",
        }
        for (name, v) in [("correlated", &rep.correlated), ("vertex tree", &rep.vertex_tree), ("with F", &rep.with_sidorenko)] {
            if let Some(v) = v {
                s += &format!("{name:<12} {:?} via {}\n", v.status, v.rule);
            }
        }
        s
    })?;
    Ok(Outcome { code: if decided { 0 } else { EXIT_INCONCLUSIVE } })
}
