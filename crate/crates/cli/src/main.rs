use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use strrep::analysis::{self, AreaClass, FragmentKind};
use strrep::extension;
use strrep::gadgets::{self, GadgetKind, GadgetSpec};
use strrep::geometry::Rational;
use strrep::noodleforce;
use strrep::representation::{self, Representation, RepresentationError};
use strrep::surgery::{self, SurgerySite};

mod render;

/// Build, check and transform string representations of graphs.
#[derive(Parser, Debug)]
#[command(name = "strrep", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check pair crossing counts; exits 1 when the check fails.
    Verify(VerifyArgs),
    /// Print the intersection graph.
    Graph {
        file: PathBuf,
    },
    /// Apply a surgery and print the result.
    Transform(TransformArgs),
    /// Print a built-in representation.
    Gadget {
        #[arg(value_enum)]
        kind: GadgetName,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Embed the representation in a mesh of forcing curves.
    NoodleForce {
        /// Make every intersecting pair cross exactly K times.
        #[arg(long = "precise-k")]
        precise_k: Option<usize>,
        /// Also write the intersection graph here.
        #[arg(long = "graph-out")]
        graph_out: Option<PathBuf>,
        file: PathBuf,
    },
    /// Look for a faithful extension with every pair crossing TARGET times.
    SearchExt {
        #[arg(long)]
        target: usize,
        /// Extensions of different curves must not overlap along a curve.
        #[arg(long)]
        disjoint: bool,
        file: PathBuf,
    },
    /// Report zones, fragments and crossing-area classes of a pair.
    Analyze {
        #[arg(long, value_parser = parse_pair)]
        pair: (String, String),
        #[arg(long)]
        epsilon: Rational,
        file: PathBuf,
        /// Curves confined to the noodles of FILE; defaults to FILE itself.
        #[arg(long)]
        confined: Option<PathBuf>,
    },
    /// Draw the representation as SVG.
    Render {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    mode: VerifyMode,
    file: PathBuf,
}

#[derive(Args, Debug)]
#[group(multiple = false)]
struct VerifyMode {
    /// Every intersecting pair crosses exactly K times.
    #[arg(long)]
    precise: bool,
    /// Every pair has at most K common points (the default).
    #[arg(long = "at-most")]
    at_most: bool,
    /// Every intersecting pair crosses an odd number of times.
    #[arg(long)]
    odd: bool,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long, value_enum)]
    op: Op,
    #[arg(long, value_parser = parse_pair)]
    pair: Option<(String, String)>,
    /// Which crossing of the pair, counted along its first curve.
    #[arg(long, default_value_t = 0)]
    index: usize,
    #[arg(long)]
    m: Option<usize>,
    /// Comma-separated curves to double.
    #[arg(long, value_delimiter = ',')]
    side: Vec<String>,
    #[arg(long)]
    k: Option<usize>,
    file: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Op {
    AddTwo,
    Quadruple,
    DoubleSide,
    MakeProper,
    Equalize,
    #[value(name = "pipeline-8k")]
    Pipeline8k,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GadgetName {
    Sausage,
    G1,
    Gk,
    K8,
    OddCx,
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    match s.split_once(',') {
        Some((u, v)) if !u.is_empty() && !v.is_empty() && !v.contains(',') => Ok((u.to_string(), v.to_string())),
        _ => Err(format!("expected `u,v`, got `{s}`")),
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn load(path: &Path) -> Result<Representation> {
    let text = read_input(path)?;
    representation::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Outcome of a subcommand: text for standard output and whether its check
/// passed.
struct Outcome {
    text: String,
    pass: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, pass: true }
    }
}

fn verify(args: &VerifyArgs) -> Result<Outcome> {
    let r = load(&args.file)?;
    let need_k = || args.k.ok_or_else(|| anyhow!("--k is required unless --odd is given"));
    let mut text = String::new();
    let counts = match representation::crossing_matrix(&r) {
        Ok(m) => m,
        Err(RepresentationError::Improper(n, first)) => {
            if args.mode.precise || args.mode.odd {
                text.push_str(&format!("not proper: {n} violation(s), first: {first}\nfail\n"));
                return Ok(Outcome { text, pass: false });
            }
            text.push_str("not proper; counting common points\n");
            representation::intersection_point_counts(&r)?
        }
        Err(e) => return Err(e.into()),
    };
    for (u, v, c) in counts.entries() {
        text.push_str(&format!("{u} {v} {c}\n"));
    }
    let (pass, what) = if args.mode.odd {
        (counts.values().all(|c| c % 2 == 1), "odd".to_string())
    } else if args.mode.precise {
        let k = need_k()?;
        (counts.values().all(|c| c == k), format!("precise {k}"))
    } else {
        let k = need_k()?;
        (counts.values().all(|c| c <= k), format!("at most {k}"))
    };
    text.push_str(&format!("{} pairs, {} crossings; {what}: {}\n", counts.len(), counts.values().sum::<usize>(), if pass { "pass" } else { "fail" }));
    Ok(Outcome { text, pass })
}

fn transform(args: &TransformArgs) -> Result<Outcome> {
    let r = load(&args.file)?;
    let out = match args.op {
        Op::AddTwo => {
            let (u, v) = args.pair.clone().ok_or_else(|| anyhow!("add-two needs --pair u,v"))?;
            surgery::add_two(&r, &SurgerySite::new(u, v, args.index))?
        }
        Op::Quadruple => surgery::quadruple(&r)?,
        Op::DoubleSide => {
            if args.side.is_empty() {
                bail!("double-side needs --side ids");
            }
            let side: BTreeSet<String> = args.side.iter().cloned().collect();
            surgery::double_side(&r, &side)?
        }
        Op::MakeProper => surgery::make_proper(&r)?,
        Op::Equalize => surgery::equalize_to(&r, args.m.ok_or_else(|| anyhow!("equalize needs --m"))?)?,
        Op::Pipeline8k => surgery::pipeline_8k(&r, args.k.ok_or_else(|| anyhow!("pipeline-8k needs --k"))?)?,
    };
    Ok(Outcome::ok(representation::serialize(&out)))
}

fn gadget(kind: GadgetName, k: Option<usize>) -> Result<Outcome> {
    let (kind, default) = match kind {
        GadgetName::Sausage => (GadgetKind::Sausage, 1),
        GadgetName::G1 => (GadgetKind::G1, 1),
        GadgetName::Gk => (GadgetKind::Gk, 2),
        GadgetName::K8 => (GadgetKind::K8, 1),
        GadgetName::OddCx => (GadgetKind::OddCounterexample, 2),
    };
    let r = gadgets::generate(GadgetSpec { kind, k: k.unwrap_or(default) })?;
    Ok(Outcome::ok(representation::serialize(&r)))
}

fn noodle_force(precise_k: Option<usize>, graph_out: Option<&Path>, file: &Path) -> Result<Outcome> {
    let r = load(file)?;
    let res = match precise_k {
        Some(k) => noodleforce::noodle_force_precise(&r, k)?,
        None => noodleforce::noodle_force(&r)?,
    };
    if let Some(path) = graph_out {
        std::fs::write(path, res.graph.to_text()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(Outcome::ok(representation::serialize(&res.representation)))
}

fn search_ext(target: usize, disjoint: bool, file: &Path) -> Result<Outcome> {
    let r = load(file)?;
    let mode = if disjoint { extension::ExtensionMode::Disjoint } else { extension::ExtensionMode::Permissive };
    let found = extension::search_extension_with(&r, target, mode, Default::default())?;
    Ok(Outcome::ok(match found {
        Some(p) if p.to_text().is_empty() => "# identity extension\n".to_string(),
        Some(p) => p.to_text(),
        None => "none\n".to_string(),
    }))
}

fn kind_name(k: FragmentKind) -> &'static str {
    match k {
        FragmentKind::Traversal => "traversal",
        FragmentKind::Reversal => "reversal",
        FragmentKind::Partial => "partial",
    }
}

fn area_name(c: AreaClass) -> &'static str {
    match c {
        AreaClass::Ambiguous => "ambiguous",
        AreaClass::Peripheral => "peripheral",
        AreaClass::Central => "central",
    }
}

fn analyze(pair: &(String, String), epsilon: &Rational, file: &Path, confined: Option<&Path>) -> Result<Outcome> {
    let r = load(file)?;
    let conf = match confined {
        Some(p) => load(p)?,
        None => r.clone(),
    };
    let sys = analysis::build_noodles(&r, epsilon)?;
    let (u, v) = (pair.0.as_str(), pair.1.as_str());
    let report = analysis::classify_fragments(&sys, &conf, u, v)?;
    let mut text = format!("pair {u} {v}\nepsilon {epsilon}\nzones {}\n", report.zones.len());
    for (i, z) in report.zones.iter().enumerate() {
        text.push_str(&format!("zone {i} at {}\n", z.zone.crossing));
        for f in &z.fragments {
            text.push_str(&format!("  {} {} {} points\n", f.curve, kind_name(f.kind), f.path.vertices().len()));
        }
    }
    if !report.zones.is_empty() {
        let c = analysis::classify_crossing_area(&sys, &conf, u, v)?;
        text.push_str(&format!("area {u} {}\narea {v} {}\n", area_name(c.u), area_name(c.v)));
        if report.zones.len() == 2 {
            let (cu, cv) = analysis::covers(&sys, &conf, u, v)?;
            text.push_str(&format!("covers {u} {cu}\ncovers {v} {cv}\n"));
        }
    }
    Ok(Outcome::ok(text))
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Graph { file } => Ok(Outcome::ok(representation::intersection_graph(&load(file)?)?.to_text())),
        Command::Transform(a) => transform(a),
        Command::Gadget { kind, k } => gadget(*kind, *k),
        Command::NoodleForce { precise_k, graph_out, file } => noodle_force(*precise_k, graph_out.as_deref(), file),
        Command::SearchExt { target, disjoint, file } => search_ext(*target, *disjoint, file),
        Command::Analyze { pair, epsilon, file, confined } => analyze(pair, epsilon, file, confined.as_deref()),
        Command::Render { file, output } => {
            let svg = render::svg(&load(file)?)?;
            std::fs::write(output, svg).with_context(|| format!("writing {}", output.display()))?;
            Ok(Outcome::ok(String::new()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
