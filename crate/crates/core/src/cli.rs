//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or input-format failure, 2 usage error,
//! 3 numerical non-convergence, 4 verification failure.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::export;
use crate::friends::{build_friend_network, FriendDirection, FriendOptions};
use crate::gmatrix::{self, Direction, GoogleOperator, IterOptions};
use crate::graph::{self, DirectedGraph, LabelMap, LoadOptions};
use crate::reduced::{self, ReducedOptions, SubsetSpec};
use crate::response::{self, PumpSpec, ResponseOptions, SensitivitySpec};
use crate::vecops;
use crate::verify::{self, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "lirgomax",
    version,
    about = "PageRank linear response and reduced Google matrix analysis"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Edge list ("src dst" per line, optional "# nodes: N" header).
    #[arg(long, global = true, value_name = "FILE")]
    pub graph: Option<PathBuf>,

    /// Node labels ("id<TAB>title" per line).
    #[arg(long, global = true, value_name = "FILE")]
    pub labels: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = gmatrix::DEFAULT_ALPHA)]
    pub alpha: f64,

    /// L1 convergence tolerance for all iterations.
    #[arg(long, global = true, default_value_t = gmatrix::DEFAULT_TOL)]
    pub tol: f64,

    #[arg(long, global = true, default_value_t = gmatrix::DEFAULT_MAX_ITER)]
    pub max_iter: usize,

    /// Serial reductions so repeated runs are bit-identical.
    #[arg(
        long,
        global = true,
        default_value_t = true,
        num_args = 0..=1,
        default_missing_value = "true",
        action = clap::ArgAction::Set
    )]
    pub deterministic: bool,

    /// Keep self-loops from the edge list.
    #[arg(long, global = true)]
    pub keep_self_loops: bool,

    /// Only report warnings and errors on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// PageRank ranking table.
    Pagerank(OutArg),
    /// CheiRank ranking table (PageRank of the reversed graph).
    Cheirank(OutArg),
    /// Linear response to injection at one node and absorption at another.
    LinresPump(LinresPumpArgs),
    /// Linear response and sensitivity of amplifying the transition source -> target.
    LinresSensitivity(LinresSensitivityArgs),
    /// Pathway subset from a response profile.
    Subset(SubsetArgs),
    /// Reduced Google matrix and its components over a subset.
    Regomax(RegomaxArgs),
    /// Friend or follower network from a reduced matrix component.
    FriendNet(FriendNetArgs),
    /// Compare the fast solvers against the dense oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Output file (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LinresPumpArgs {
    /// Injection node id.
    #[arg(long, requires = "absorb", conflicts_with = "pump_file")]
    pub inject: Option<usize>,
    /// Absorption node id.
    #[arg(long, requires = "inject")]
    pub absorb: Option<usize>,
    /// General pump diagonal ("node_id<TAB>D_value" lines).
    #[arg(long, value_name = "FILE")]
    pub pump_file: Option<PathBuf>,
    /// Also solve at this finite strength and report |dP(eps) - P1|.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Skip the per-step projection onto the sum-zero subspace.
    #[arg(long)]
    pub no_projection: bool,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct LinresSensitivityArgs {
    #[arg(long)]
    pub target: usize,
    #[arg(long)]
    pub source: usize,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct SubsetArgs {
    /// Response profile written by linres-pump or linres-sensitivity.
    #[arg(long, value_name = "FILE")]
    pub response: PathBuf,
    #[arg(long, default_value_t = response::DEFAULT_PATHWAY_M)]
    pub top_m: usize,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct RegomaxArgs {
    /// Pathway table or plain node-id list.
    #[arg(long, value_name = "FILE")]
    pub subset: PathBuf,
    /// Directory for matrix, plot-data and metadata files.
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    /// Largest N for which a whole-graph subset is allowed.
    #[arg(long, default_value_t = crate::oracle::DEFAULT_DENSE_GUARD)]
    pub dense_guard: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixChoice {
    Gr,
    Grr,
    Gpr,
    Gqr,
    #[value(name = "grr+qrnd")]
    GrrQrnd,
}

impl MatrixChoice {
    fn file_name(self) -> &'static str {
        match self {
            MatrixChoice::Gr => "GR.tsv",
            MatrixChoice::Grr => "Grr.tsv",
            MatrixChoice::Gpr => "Gpr.tsv",
            MatrixChoice::Gqr => "Gqr.tsv",
            MatrixChoice::GrrQrnd => "Grr+Gqr_nd.tsv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionChoice {
    Friends,
    Followers,
}

#[derive(Debug, Args)]
pub struct FriendNetArgs {
    /// Output directory of a regomax run.
    #[arg(long, value_name = "DIR")]
    pub matrix_dir: PathBuf,
    #[arg(long, value_enum, default_value = "grr+qrnd")]
    pub matrix: MatrixChoice,
    #[arg(long, value_enum, default_value = "friends")]
    pub direction: DirectionChoice,
    /// Pathway table giving the response sign of each subset node.
    #[arg(long, value_name = "FILE")]
    pub subset: Option<PathBuf>,
    /// Initial node ids (default: the five subset nodes with largest |P1|).
    #[arg(long, value_delimiter = ',')]
    pub initial: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    pub n_friends: usize,
    #[arg(long, default_value_t = 2)]
    pub levels: usize,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, requires = "absorb")]
    pub inject: Option<usize>,
    #[arg(long, requires = "inject")]
    pub absorb: Option<usize>,
    #[arg(long, default_value_t = 5)]
    pub subset_size: usize,
    #[arg(long, default_value_t = crate::oracle::DEFAULT_DENSE_GUARD)]
    pub dense_guard: usize,
}

/// Parses `args` (including the program name) and runs the command.
/// Table output without `--out` goes to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConverged { .. } | Error::NonPositiveNormalization { .. } => EXIT_NOT_CONVERGED,
        Error::InvalidArgument(_) | Error::NodeOutOfRange { .. } | Error::GuardExceeded { .. } => {
            EXIT_USAGE
        }
        _ => EXIT_FAILURE,
    }
}

struct Context {
    graph: DirectedGraph,
    labels: LabelMap,
    alpha: f64,
    iter: IterOptions,
    deterministic: bool,
}

impl Context {
    fn load(global: &GlobalArgs) -> Result<Self> {
        if !(global.alpha > 0.0 && global.alpha < 1.0) {
            return Err(Error::invalid(format!(
                "--alpha must lie in (0, 1), got {}",
                global.alpha
            )));
        }
        let iter = IterOptions::new(global.tol, global.max_iter)?;
        let path = global
            .graph
            .as_ref()
            .ok_or_else(|| Error::invalid("--graph FILE is required"))?;
        let graph = graph::load_edge_list(
            BufReader::new(open(path)?),
            LoadOptions {
                drop_self_loops: !global.keep_self_loops,
            },
        )?;
        log::info!(
            "loaded {} nodes and {} edges from {}",
            graph.n_nodes(),
            graph.n_edges(),
            path.display()
        );
        let labels = match &global.labels {
            Some(p) => graph::load_labels(BufReader::new(open(p)?))?,
            None => LabelMap::default(),
        };
        Ok(Context {
            graph,
            labels,
            alpha: global.alpha,
            iter,
            deterministic: global.deterministic,
        })
    }

    fn operator(&self, direction: Direction) -> Result<GoogleOperator<'_>> {
        Ok(GoogleOperator::new(&self.graph, self.alpha, direction)?
            .with_deterministic(self.deterministic))
    }

    fn pagerank(&self, op: &GoogleOperator<'_>) -> Result<gmatrix::RankVector> {
        let solved = gmatrix::pagerank(op, &self.iter)?;
        log::info!(
            "PageRank converged in {} iterations (residual {:e})",
            solved.iterations,
            solved.residual
        );
        Ok(solved.value)
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Ok(BufWriter::new(f))
}

/// Runs `f` against the `--out` file, or stdout.
fn with_output(
    out: &OutArg,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match &out.out {
        Some(path) => {
            let mut w = create(path)?;
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            f(stdout)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn init_logging(quiet: bool) {
    let level = if quiet {
        log::LevelFilter::Warn
    } else {
        log::LevelFilter::Info
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    init_logging(cli.global.quiet);
    let ctx = Context::load(&cli.global)?;
    match &cli.command {
        Command::Pagerank(out) | Command::Cheirank(out) => {
            let direction = match cli.command {
                Command::Pagerank(_) => Direction::Forward,
                _ => Direction::Transposed,
            };
            let rank = ctx.pagerank(&ctx.operator(direction)?)?;
            with_output(out, stdout, |w| {
                export::write_ranking(w, &rank, &ctx.labels)
            })?;
        }
        Command::LinresPump(args) => linres_pump(&ctx, args, stdout)?,
        Command::LinresSensitivity(args) => {
            let op = ctx.operator(Direction::Forward)?;
            let p0 = ctx.pagerank(&op)?;
            let spec = SensitivitySpec {
                target: args.target,
                source: args.source,
            };
            let v0 = response::sensitivity_v0(&op, &p0, spec)?;
            let p1 = solve_response(&ctx, &op, &p0, &v0, true)?;
            let sens = response::sensitivity_values(&p1, &p0)?;
            with_output(&args.out, stdout, |w| {
                export::write_sensitivity(w, &p0, &p1, &sens, &ctx.labels)
            })?;
        }
        Command::Subset(args) => {
            let n = ctx.graph.n_nodes();
            let values = export::read_response_profile(BufReader::new(open(&args.response)?), n)?;
            let p1 = response::ResponseVector::new(values, response::ResponseKind::LinearResponse);
            let p0 = ctx.pagerank(&ctx.operator(Direction::Forward)?)?;
            let subset = response::select_pathway_subset(&p1, p0.ranking(), args.top_m)?;
            with_output(&args.out, stdout, |w| {
                export::write_pathway_subset(w, &subset, &ctx.labels)
            })?;
        }
        Command::Regomax(args) => regomax(&ctx, args)?,
        Command::FriendNet(args) => friend_net(&ctx, args, stdout)?,
        Command::Verify(args) => {
            let opts = VerifyOptions {
                alpha: ctx.alpha,
                iter: ctx.iter,
                deterministic: ctx.deterministic,
                pair: args.inject.zip(args.absorb),
                subset_size: args.subset_size,
                dense_guard: args.dense_guard,
            };
            let report = verify::verify(&ctx.graph, &opts)?;
            for c in &report.checks {
                writeln!(
                    stdout,
                    "{}\t{:e}\t{:e}\t{}",
                    c.name,
                    c.deviation,
                    c.tolerance,
                    if c.passed() { "PASS" } else { "FAIL" }
                )?;
            }
            if !report.passed() {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
    }
    Ok(EXIT_OK)
}

fn solve_response(
    ctx: &Context,
    op: &GoogleOperator<'_>,
    p0: &gmatrix::RankVector,
    v0: &response::ResponseVector,
    project: bool,
) -> Result<response::ResponseVector> {
    let opts = ResponseOptions {
        iter: ctx.iter,
        project_each_step: project,
    };
    let solved = response::solve_linear_response(op, p0, v0, &opts)?;
    log::info!(
        "linear response converged in {} iterations (residual {:e})",
        solved.iterations,
        solved.residual
    );
    Ok(solved.value)
}

fn linres_pump(ctx: &Context, args: &LinresPumpArgs, stdout: &mut dyn Write) -> Result<()> {
    let op = ctx.operator(Direction::Forward)?;
    let p0 = ctx.pagerank(&op)?;
    let spec = match (&args.pump_file, args.inject.zip(args.absorb)) {
        (Some(path), _) => Some(export::read_pump_spec(BufReader::new(open(path)?))?),
        (None, Some((i, j))) if i == j => {
            log::warn!("injection and absorption node coincide: the response is zero");
            None
        }
        (None, Some((i, j))) => Some(PumpSpec::balanced_pair(&p0, i, j)?),
        (None, None) => {
            return Err(Error::invalid(
                "give --inject I --absorb J or --pump-file FILE",
            ))
        }
    };
    let v0 = match &spec {
        Some(spec) => response::pump_general_v0(&op, &p0, spec)?,
        None => {
            let i = args.inject.unwrap_or_default();
            response::pump_pair_v0(&op, &p0, i, i)?
        }
    };
    let p1 = solve_response(ctx, &op, &p0, &v0, !args.no_projection)?;
    if let (Some(eps), Some(spec)) = (args.epsilon, &spec) {
        let perturbed = response::solve_perturbed_pump(&op, spec, eps, &ctx.iter)?;
        let delta = response::finite_difference(&perturbed.value, &p0, eps)?;
        log::info!(
            "finite strength eps = {eps}: max |dP(eps) - P1| = {:e}",
            vecops::linf_dist(delta.values(), p1.values())
        );
    }
    with_output(&args.out, stdout, |w| {
        export::write_response_profile(w, &p1)
    })
}

fn regomax(ctx: &Context, args: &RegomaxArgs) -> Result<()> {
    let rows = export::read_subset_file(BufReader::new(open(&args.subset)?))?;
    let subset = SubsetSpec::new(rows.iter().map(|r| r.node).collect(), ctx.graph.n_nodes())?;
    let op = ctx.operator(Direction::Forward)?;
    let opts = ReducedOptions {
        iter: ctx.iter,
        dense_guard: args.dense_guard,
    };
    log::info!("computing reduced matrix over {} nodes", subset.len());
    let r = reduced::compute_reduced(&op, &subset, &opts)?;
    let nd = reduced::qr_nondiagonal(&r);
    fs::create_dir_all(&args.out_dir)?;
    let axis = subset.nodes();
    let components = [
        ("GR", &r.gr),
        ("Grr", &r.grr),
        ("Gpr", &r.gpr),
        ("Gqr", &r.gqr),
        ("Gqr_nd", &nd.gqr_nd),
        ("Grr+Gqr_nd", &nd.grr_plus_gqr_nd),
    ];
    for (name, m) in components {
        let mut w = create(&args.out_dir.join(format!("{name}.tsv")))?;
        export::write_matrix(&mut w, m, axis)?;
        w.flush()?;
        let mut w = create(&args.out_dir.join(format!("{name}.plot.tsv")))?;
        export::write_matrix_plot_data(&mut w, m)?;
        w.flush()?;
    }
    let mut w = create(&args.out_dir.join("meta.txt"))?;
    export::write_reduced_metadata(&mut w, &r)?;
    w.flush()?;
    let wts = r.weights();
    log::info!(
        "weights W_R = {:.6}, W_rr = {:.6}, W_pr = {:.6}, W_qr = {:.6}, W_rr+qrnd = {:.6}",
        wts.gr,
        wts.grr,
        wts.gpr,
        wts.gqr,
        nd.weight
    );
    Ok(())
}

fn friend_net(ctx: &Context, args: &FriendNetArgs, stdout: &mut dyn Write) -> Result<()> {
    let path = args.matrix_dir.join(args.matrix.file_name());
    let (axis, m) = export::read_matrix(BufReader::new(open(&path)?))?;
    let position = |id: usize| axis.iter().position(|&a| a == id);

    let mut signs: Option<Vec<f64>> = None;
    if let Some(p) = &args.subset {
        let rows = export::read_subset_file(BufReader::new(open(p)?))?;
        let mut s = vec![0.0; axis.len()];
        for row in rows {
            if let (Some(pos), Some(v)) = (position(row.node), row.p1) {
                s[pos] = v;
            }
        }
        signs = Some(s);
    }

    let initial: Vec<usize> = if args.initial.is_empty() {
        match &signs {
            Some(s) => gmatrix::rank_order(s, true).order().take(5).collect(),
            None => (0..axis.len().min(5)).collect(),
        }
    } else {
        args.initial
            .iter()
            .map(|&id| {
                position(id).ok_or_else(|| {
                    Error::invalid(format!("initial node {id} is not in the matrix subset"))
                })
            })
            .collect::<Result<_>>()?
    };
    let opts = FriendOptions {
        n_friends: args.n_friends,
        levels: args.levels,
        direction: match args.direction {
            DirectionChoice::Friends => FriendDirection::Friends,
            DirectionChoice::Followers => FriendDirection::Followers,
        },
    };
    let net = build_friend_network(&m, &initial, signs.as_deref(), &opts)?;
    log::info!(
        "friend network: {} nodes, {} edges",
        net.nodes.len(),
        net.edges.len()
    );
    with_output(&args.out, stdout, |w| {
        export::write_dot(w, &net, &axis, &ctx.labels)
    })
}
