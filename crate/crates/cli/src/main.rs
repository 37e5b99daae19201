use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use tri3::angles::{enumerate_taut, enumerate_vertex_angle_structures};
use tri3::census::{enumerate_census, CensusSpec};
use tri3::highlevel::{connected_sum_decomposition, is_ball, is_three_sphere};
use tri3::normal::{enumerate_vertex_surfaces, CoordSystem};
use tri3::simplify::{simplify_exhaustive, simplify_fast, ExhaustiveOptions};
use tri3::{first_homology, isosig, Triangulation};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Kernel(#[from] tri3::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use tri3::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Kernel(E::Internal(_)) => 3,
            CliError::Kernel(
                E::Precondition(_)
                | E::MoveRefused(_)
                | E::NotAdmissible(_)
                | E::CoordinateOverflow
                | E::DimensionMismatch { .. },
            ) => 2,
            // Anything else is a malformed triangulation or signature.
            CliError::Kernel(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Exact 3-manifold triangulation tools.
#[derive(Debug, Parser)]
#[command(name = "tri3", version)]
struct Cli {
    /// Worker threads for the parallel parts (default: all cores).
    #[arg(long, global = true, value_name = "K")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate triangulations up to isomorphism.
    Census(CensusArgs),
    /// Reduce the number of tetrahedra.
    Simplify(SimplifyArgs),
    /// Vertex normal surfaces.
    Surfaces(SurfacesArgs),
    /// Vertex or taut angle structures of an ideal triangulation.
    Angles(AnglesArgs),
    /// Recognise the 3-sphere, the 3-ball, or a connected sum decomposition.
    Recognize(Input),
    /// First homology group.
    Homology(Input),
    /// Convert between gluing tables and signatures.
    Isosig(IsosigArgs),
}

#[derive(Debug, Args)]
struct Input {
    /// A signature, or a file holding a gluing table (`tets N` header) or a
    /// signature.
    input: String,
}

#[derive(Debug, Args)]
struct CensusArgs {
    #[arg(long, value_name = "N")]
    tetrahedra: usize,
    /// No boundary faces.
    #[arg(long)]
    internal: bool,
    #[arg(long)]
    orientable: bool,
    /// No ideal vertices.
    #[arg(long)]
    finite: bool,
    /// Write signatures here instead of standard output.
    #[arg(long, value_name = "FILE")]
    sigs: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimplifyArgs {
    #[command(flatten)]
    input: Input,
    /// Breadth-first search over 2-3 and 3-2 moves.
    #[arg(long)]
    exhaustive: bool,
    /// Extra tetrahedra the exhaustive search may use.
    #[arg(long, default_value_t = 2, value_name = "H")]
    height: usize,
    #[arg(long, default_value_t = 0, value_name = "S")]
    seed: u64,
}

#[derive(Debug, Args)]
struct SurfacesArgs {
    #[command(flatten)]
    input: Input,
    /// standard, quad, standardan or quadoct.
    #[arg(long, default_value = "standard")]
    coords: String,
}

#[derive(Debug, Args)]
struct AnglesArgs {
    #[command(flatten)]
    input: Input,
    /// Only taut structures.
    #[arg(long, conflicts_with = "all")]
    taut: bool,
    /// All vertex angle structures (the default).
    #[arg(long)]
    all: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct IsosigArgs {
    /// Print the signature of the triangulation in FILE.
    #[arg(long, value_name = "FILE")]
    encode: Option<PathBuf>,
    /// Print the gluing table of SIG.
    #[arg(long, value_name = "SIG")]
    decode: Option<String>,
}

fn has_table_header(text: &str) -> bool {
    text.lines().any(|l| {
        let mut words = l.split_whitespace();
        words.next() == Some("tets") && words.next().is_some_and(|n| n.parse::<usize>().is_ok())
    })
}

fn read_input(arg: &str) -> CliResult<Triangulation> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path)?;
        if has_table_header(&text) {
            return Ok(Triangulation::from_gluing_text(&text)?);
        }
        return Ok(isosig::decode(text.trim())?);
    }
    Ok(isosig::decode(arg)?)
}

fn census(args: &CensusArgs, out: &mut dyn Write) -> CliResult<()> {
    let spec = CensusSpec {
        tetrahedra: args.tetrahedra,
        closed: args.internal,
        orientable: args.orientable,
        finite: args.finite,
    };
    let sigs = enumerate_census(&spec);
    let mut text = String::new();
    for s in &sigs {
        text.push_str(s);
        text.push('\n');
    }
    match &args.sigs {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    eprintln!("Total triangulations: {}", sigs.len());
    Ok(())
}

fn simplify(args: &SimplifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let tri = read_input(&args.input.input)?;
    let before = tri.size();
    let result = if args.exhaustive {
        let opts = ExhaustiveOptions {
            height: args.height,
            max_nodes: None,
            seed: args.seed,
        };
        let r = simplify_exhaustive(&tri, &opts)?;
        if !r.reduced {
            eprintln!(
                "no smaller triangulation within height {} ({} nodes)",
                args.height, r.nodes_visited
            );
        }
        r.report.result
    } else {
        simplify_fast(&tri, args.seed)?.result
    };
    writeln!(out, "{}", isosig::encode(&result))?;
    writeln!(out, "tetrahedra: {before} -> {}", result.size())?;
    Ok(())
}

fn surfaces(args: &SurfacesArgs, out: &mut dyn Write) -> CliResult<()> {
    let sys: CoordSystem = args
        .coords
        .parse()
        .map_err(|_| CliError::Usage(format!("unknown coordinate system {:?}", args.coords)))?;
    let tri = read_input(&args.input.input)?;
    let list = enumerate_vertex_surfaces(&tri, sys)?;
    writeln!(out, "{} vertex normal surfaces", list.len())?;
    for s in list {
        writeln!(out, "{s}")?;
    }
    Ok(())
}

fn angles(args: &AnglesArgs, out: &mut dyn Write) -> CliResult<()> {
    let tri = read_input(&args.input.input)?;
    let (list, what) = if args.taut {
        (enumerate_taut(&tri)?, "taut")
    } else {
        (enumerate_vertex_angle_structures(&tri)?, "vertex")
    };
    writeln!(out, "{} {what} angle structures", list.len())?;
    for a in list {
        writeln!(out, "{a}")?;
    }
    Ok(())
}

fn recognize(input: &Input, out: &mut dyn Write) -> CliResult<()> {
    let tri = read_input(&input.input)?;
    let c = tri.skeleton().classify();
    let verdict = if c.bounded {
        if is_ball(&tri)? { "B3".to_string() } else { "unrecognized".to_string() }
    } else if c.valid && c.closed && c.connected && c.orientable && !tri.is_empty() {
        if is_three_sphere(&tri)? {
            "S3".to_string()
        } else {
            connected_sum_decomposition(&tri)?.render()
        }
    } else {
        "unrecognized".to_string()
    };
    writeln!(out, "{verdict}")?;
    Ok(())
}

fn homology(input: &Input, out: &mut dyn Write) -> CliResult<()> {
    let tri = read_input(&input.input)?;
    writeln!(out, "{}", first_homology(&tri)?)?;
    Ok(())
}

fn isosig_cmd(args: &IsosigArgs, out: &mut dyn Write) -> CliResult<()> {
    if let Some(path) = &args.encode {
        let text = fs::read_to_string(path)?;
        let tri = Triangulation::from_gluing_text(&text)?;
        writeln!(out, "{}", isosig::encode(&tri))?;
    } else if let Some(sig) = &args.decode {
        write!(out, "{}", isosig::decode(sig)?.to_gluing_text())?;
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Census(a) => census(a, &mut out),
        Command::Simplify(a) => simplify(a, &mut out),
        Command::Surfaces(a) => surfaces(a, &mut out),
        Command::Angles(a) => angles(a, &mut out),
        Command::Recognize(a) => recognize(a, &mut out),
        Command::Homology(a) => homology(a, &mut out),
        Command::Isosig(a) => isosig_cmd(a, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cli.jobs {
        if k == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(1);
        }
        builder = builder.num_threads(k);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
