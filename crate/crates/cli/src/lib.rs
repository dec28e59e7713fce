//! `ttf` command-line front-end.
//!
//! Exit codes: `0` success, `1` oracle mismatch or output failure, `2`
//! malformed input, `3` invalid flags or infeasible request.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ttf_core::format::{encode_ttkz, encode_ttok, read_ttok, FormatError, StatsJson, TtkzFile};
use ttf_core::oracle::{brute_force_global, brute_force_window, compare};
use ttf_core::synth::{generate, Motion, SynthSpec};
use ttf_core::{
    compress_detailed, estimate_cost, select_anchor, AnchorStrategy, FusionConfig, GridShape,
    MatchResult, Scheme, TokenGrid,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_MALFORMED: u8 = 2;
pub const EXIT_INVALID: u8 = 3;

/// Similarity tolerance used by `ttf oracle`.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

/// Signature of the local matcher under test in `ttf oracle`.
pub type Matcher = fn(&TokenGrid, usize, usize) -> ttf_core::Result<MatchResult>;

#[derive(Debug, Parser)]
#[command(
    name = "ttf",
    version,
    about = "Temporal token fusion for video token grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compress a TTOK token dump into a TTKZ file.
    Compress(CompressArgs),
    /// Compare the local matcher against a brute-force reference.
    Oracle(OracleArgs),
    /// Print the matching cost model as JSON.
    Cost(CostArgs),
    /// Generate a synthetic clip and its ground truth.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct CompressArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(short, long, default_value_t = 0.8, allow_negative_numbers = true)]
    threshold: f32,
    /// auto | first | last | <frame index>
    #[arg(short, long, default_value = "auto")]
    anchor: AnchorStrategy,
    #[arg(short, long, default_value_t = 1)]
    radius: usize,
    /// Write a JSON run summary here.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Text tokens that follow the visual tokens in the prefill.
    #[arg(long = "text-tokens", default_value_t = 0)]
    text_tokens: usize,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleMode {
    Window,
    Global,
}

#[derive(Debug, Args)]
struct OracleArgs {
    input: PathBuf,
    #[arg(short, long, default_value = "auto")]
    anchor: AnchorStrategy,
    #[arg(short, long, default_value_t = 1)]
    radius: usize,
    #[arg(long, value_enum, default_value_t = OracleMode::Window)]
    mode: OracleMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Local,
    Global,
}

#[derive(Debug, Args)]
struct CostArgs {
    #[arg(long)]
    frames: usize,
    #[arg(long)]
    height: usize,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    channels: usize,
    #[arg(short, long, default_value_t = 1)]
    radius: usize,
    #[arg(long, value_enum, default_value_t = SchemeArg::Local)]
    scheme: SchemeArg,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// static | shift:<dy>,<dx> | walk:<max step>
    #[arg(long, default_value = "static", allow_hyphen_values = true)]
    motion: MotionArg,
    /// Fill cells uncovered by motion with new tokens.
    #[arg(long)]
    fresh: bool,
    #[arg(long, default_value_t = 1)]
    batch: usize,
    #[arg(long, default_value_t = 2)]
    frames: usize,
    /// <H>x<W>
    #[arg(long, default_value = "4x4")]
    grid: GridArg,
    #[arg(long, default_value_t = 16)]
    channels: usize,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the pairwise token separation constraint.
    #[arg(long = "no-separation")]
    no_separation: bool,
    #[arg(short, long)]
    output: PathBuf,
    /// Ground-truth JSON path; defaults to `<output>.truth.json`.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy)]
struct MotionArg(Motion);

impl FromStr for MotionArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad =
            || format!("invalid motion `{s}`: expected static, shift:<dy>,<dx> or walk:<step>");
        if s == "static" {
            return Ok(MotionArg(Motion::Static));
        }
        if let Some(rest) = s.strip_prefix("shift:") {
            let (dy, dx) = rest.split_once(',').ok_or_else(bad)?;
            let dy = dy.trim().parse().map_err(|_| bad())?;
            let dx = dx.trim().parse().map_err(|_| bad())?;
            return Ok(MotionArg(Motion::Shift { dy, dx }));
        }
        if let Some(rest) = s.strip_prefix("walk:") {
            let max_step = rest.trim().parse().map_err(|_| bad())?;
            return Ok(MotionArg(Motion::RandomWalk { max_step }));
        }
        Err(bad())
    }
}

#[derive(Debug, Clone, Copy)]
struct GridArg(usize, usize);

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("invalid grid `{s}`: expected <H>x<W>");
        let (h, w) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        Ok(GridArg(
            h.trim().parse().map_err(|_| bad())?,
            w.trim().parse().map_err(|_| bad())?,
        ))
    }
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl fmt::Display) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }

    fn input(path: &Path, err: FormatError) -> Self {
        Self::new(EXIT_MALFORMED, format!("{}: {err}", path.display()))
    }
}

/// Classifies a core error: user-supplied knobs are invalid flags, anything
/// else is a property of the input data.
fn core_failure(err: ttf_core::Error) -> Failure {
    use ttf_core::Error::*;
    let code = match err {
        InvalidThreshold(_) | InvalidAnchor { .. } | InfeasibleSpec(_) | ZeroDimension { .. } => {
            EXIT_INVALID
        }
        _ => EXIT_MALFORMED,
    };
    Failure::new(code, err)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_matcher(args, ttf_core::match_local)
}

/// [`run`] with the local matcher replaced, for exercising `ttf oracle`.
pub fn run_with_matcher<I, T>(args: I, matcher: Matcher) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    let outcome = match cli.command {
        Command::Compress(a) => cmd_compress(&a),
        Command::Oracle(a) => cmd_oracle(&a, matcher),
        Command::Cost(a) => cmd_cost(&a),
        Command::Synth(a) => cmd_synth(&a),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn cmd_compress(args: &CompressArgs) -> Result<(), Failure> {
    let config =
        FusionConfig::new(args.threshold, args.radius, args.anchor).map_err(core_failure)?;
    let grid = read_ttok(&args.input).map_err(|e| Failure::input(&args.input, e))?;
    config
        .check_for_frames(grid.shape().frames)
        .map_err(core_failure)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| Failure::new(EXIT_INVALID, e))?;
    let (result, matches) = pool
        .install(|| compress_detailed(&grid, &config))
        .map_err(core_failure)?;

    let stats = StatsJson::new(&result, &matches, &config, args.text_tokens);
    let summary = format!(
        "anchor={} kept={}/{} rho={:?}",
        result.anchor(),
        result.kept_len(),
        grid.shape().tokens_per_clip(),
        result.rho()
    );
    let bytes = encode_ttkz(&TtkzFile::new(result, &config));
    write_atomic(&args.output, &bytes)?;
    if let Some(path) = &args.stats {
        write_atomic(path, stats.to_json().as_bytes())?;
    }
    println!("{summary}");
    Ok(())
}

fn cmd_oracle(args: &OracleArgs, matcher: Matcher) -> Result<(), Failure> {
    let grid = read_ttok(&args.input).map_err(|e| Failure::input(&args.input, e))?;
    let anchor = select_anchor(&grid, args.anchor).map_err(core_failure)?;
    let engine = matcher(&grid, anchor, args.radius).map_err(core_failure)?;
    let (reference, ties) = match args.mode {
        OracleMode::Window => (brute_force_window(&grid, anchor, args.radius), None),
        OracleMode::Global => (brute_force_global(&grid, anchor), Some(ORACLE_TOLERANCE)),
    };
    let reference = reference.map_err(core_failure)?;
    let cmp = compare(&engine, &reference, ties);
    println!(
        "mode={} anchor={anchor} radius={} positions={} mismatches={} ties={} max_abs_sim_delta={:e}",
        match args.mode {
            OracleMode::Window => "window",
            OracleMode::Global => "global",
        },
        args.radius,
        cmp.positions,
        cmp.index_mismatches,
        cmp.tie_mismatches,
        cmp.max_sim_delta,
    );
    if cmp.passes(ORACLE_TOLERANCE) {
        return Ok(());
    }
    let detail = match cmp.first_mismatch {
        Some((k, i)) => format!(
            "first mismatch at (k={k}, i={i}): engine dst={} reference dst={}",
            engine.dst(k, i),
            reference.dst(k, i)
        ),
        None => format!(
            "similarity delta {:e} exceeds {ORACLE_TOLERANCE:e}",
            cmp.max_sim_delta
        ),
    };
    Err(Failure::new(EXIT_MISMATCH, detail))
}

fn cmd_cost(args: &CostArgs) -> Result<(), Failure> {
    let shape = GridShape::new(1, args.frames, args.height, args.width, args.channels)
        .map_err(|e| Failure::new(EXIT_INVALID, e))?;
    let scheme = match args.scheme {
        SchemeArg::Local => Scheme::LocalWindow {
            radius: args.radius,
        },
        SchemeArg::Global => Scheme::GlobalMatrix,
    };
    let report = estimate_cost(&shape, scheme);
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("cost report serializes")
    );
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<(), Failure> {
    let (h, w) = (args.grid.0, args.grid.1);
    let shape = GridShape::new(args.batch, args.frames, h, w, args.channels)
        .map_err(|e| Failure::new(EXIT_INVALID, e))?;
    let spec = SynthSpec {
        shape,
        motion: args.motion.0,
        fresh_content: args.fresh,
        noise_sigma: args.noise,
        seed: args.seed,
        separated: !args.no_separation,
    };
    let clip = generate(&spec).map_err(core_failure)?;
    let truth_path = args.truth.clone().unwrap_or_else(|| {
        let mut p = args.output.clone().into_os_string();
        p.push(".truth.json");
        PathBuf::from(p)
    });
    write_atomic(&args.output, &encode_ttok(&clip.grid))?;
    write_atomic(&truth_path, clip.truth.to_json().as_bytes())?;
    println!(
        "wrote {} ({} non-fusable source positions)",
        args.output.display(),
        clip.truth.non_fusable().len()
    );
    Ok(())
}

/// Writes through a temporary file in the destination directory and renames
/// it into place, so `path` is either absent or complete.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let fail =
        |e: &dyn fmt::Display| Failure::new(EXIT_MISMATCH, format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    tmp.write_all(bytes).map_err(|e| fail(&e))?;
    tmp.as_file().sync_all().map_err(|e| fail(&e))?;
    tmp.persist(path).map_err(|e| fail(&e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn motion_grammar() {
        assert!(matches!(
            "static".parse::<MotionArg>().unwrap().0,
            Motion::Static
        ));
        assert!(matches!(
            "shift:0,-1".parse::<MotionArg>().unwrap().0,
            Motion::Shift { dy: 0, dx: -1 }
        ));
        assert!(matches!(
            "walk:2".parse::<MotionArg>().unwrap().0,
            Motion::RandomWalk { max_step: 2 }
        ));
        assert!("shift:1".parse::<MotionArg>().is_err());
        assert!("spin".parse::<MotionArg>().is_err());
    }

    #[test]
    fn grid_grammar() {
        let g: GridArg = "4x6".parse().unwrap();
        assert_eq!((g.0, g.1), (4, 6));
        assert!("4".parse::<GridArg>().is_err());
    }

    #[test]
    fn bad_flags_exit_three() {
        assert_eq!(run(["ttf", "cost", "--frames", "x"]), EXIT_INVALID);
        assert_eq!(run(["ttf", "nope"]), EXIT_INVALID);
        assert_eq!(
            run([
                "ttf",
                "cost",
                "--frames",
                "0",
                "--height",
                "1",
                "--width",
                "1",
                "--channels",
                "1"
            ]),
            EXIT_INVALID
        );
    }
}
