use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hslcluster::pipeline::ConfigEcho;
use hslcluster::{
    label_agreement, load_image, reduce_image, rgb_to_hsl, Config, DistanceKind, Error,
    ImageFormat, Reduction, ReductionReport, Rgb,
};

const USAGE: u8 = 2;
const IO: u8 = 3;
const PROCESSING: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "hslreduce",
    version,
    about = "Fuzzy c-means color reduction in HSL"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reduce an image to at most k colors
    Reduce {
        input: PathBuf,
        #[command(flatten)]
        opts: ClusterOpts,
        /// Output image (.png or .ppm)
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Write a JSON report here
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print the HSL coordinates of an 8-bit RGB color
    Inspect {
        /// Color as r,g,b with 8-bit components
        #[arg(long, value_parser = parse_rgb)]
        rgb: [u8; 3],
    },
    /// Reduce with both distances and compare the label maps
    Compare {
        input: PathBuf,
        #[command(flatten)]
        opts: ClusterOpts,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Args)]
struct ClusterOpts {
    /// Number of clusters
    #[arg(short = 'k')]
    k: usize,
    /// hslp (saturation-weighted) or hsleuclid
    #[arg(long, default_value = "hslp", value_parser = parse_distance)]
    distance: DistanceKind,
    /// Fuzzifier, strictly between 1 and 1.5
    #[arg(long, default_value_t = Config::DEFAULT_OMEGA)]
    omega: f64,
    #[arg(long = "max-iters", default_value_t = Config::DEFAULT_MAX_ITERS)]
    max_iters: usize,
    #[arg(long, default_value_t = Config::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = Config::DEFAULT_SEED)]
    seed: u64,
}

impl ClusterOpts {
    fn config(&self) -> Result<Config, Failure> {
        let cfg = Config {
            k: self.k,
            omega: self.omega,
            max_iters: self.max_iters,
            tol: self.tol,
            seed: self.seed,
            distance: self.distance,
            eps_sing: Config::DEFAULT_EPS_SING,
        };
        cfg.validate().map_err(Failure::usage)?;
        Ok(cfg)
    }
}

fn parse_rgb(s: &str) -> Result<[u8; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected r,g,b but got {s:?}"));
    }
    let mut out = [0u8; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .parse::<u8>()
            .map_err(|_| format!("{part:?} is not an 8-bit channel value"))?;
    }
    Ok(out)
}

fn parse_distance(s: &str) -> Result<DistanceKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(e: impl fmt::Display) -> Self {
        Failure {
            code: USAGE,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidConfig(_) => USAGE,
            e if e.is_io() => IO,
            _ => PROCESSING,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn with_path(path: &Path) -> impl FnOnce(Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

fn output_format(path: &Path) -> Result<ImageFormat, Failure> {
    ImageFormat::from_path(path).map_err(Failure::usage)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| with_path(path)(e.into()))
}

fn report_json<T: Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::from(Error::from(e)))?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn cmd_reduce(
    input: &Path,
    opts: &ClusterOpts,
    output: &Path,
    report: Option<&Path>,
) -> Result<(), Failure> {
    let cfg = opts.config()?;
    let format = output_format(output)?;
    let img = load_image(input).map_err(with_path(input))?;
    let out = reduce_image(&img, &cfg)?;

    // encode everything before touching the filesystem
    let image_bytes = out.image.encode(format)?;
    let report_bytes = report.map(|_| report_json(&out.report)).transpose()?;
    write_file(output, &image_bytes)?;
    if let (Some(path), Some(bytes)) = (report, report_bytes) {
        write_file(path, &bytes)?;
    }
    Ok(())
}

fn cmd_inspect(rgb: [u8; 3]) {
    let q = rgb_to_hsl(Rgb::from_u8(rgb));
    println!("H={:.9}, S={:.9}, L={:.9}", q.h(), q.s(), q.l());
}

#[derive(Serialize)]
struct Runs<'a> {
    hslp: &'a ReductionReport,
    hsleuclid: &'a ReductionReport,
}

#[derive(Serialize)]
struct ComparisonReport<'a> {
    config: ConfigEcho,
    /// Fraction of pixel pairs grouped the same way by both runs.
    agreement: f64,
    runs: Runs<'a>,
}

fn cmd_compare(input: &Path, opts: &ClusterOpts, out_dir: &Path) -> Result<(), Failure> {
    let cfg = opts.config()?;
    let format = ImageFormat::from_path(input).unwrap_or(ImageFormat::Png);
    let img = load_image(input).map_err(with_path(input))?;

    let proposed: Reduction<f64> = reduce_image(&img, &cfg.with_distance(DistanceKind::Proposed))?;
    let euclid: Reduction<f64> = reduce_image(&img, &cfg.with_distance(DistanceKind::Euclid))?;
    let agreement = label_agreement(&proposed.labels, &euclid.labels);

    let summary = ComparisonReport {
        config: ConfigEcho::from_config(&cfg),
        agreement,
        runs: Runs {
            hslp: &proposed.report,
            hsleuclid: &euclid.report,
        },
    };
    let summary_bytes = report_json(&summary)?;
    let proposed_bytes = proposed.image.encode(format)?;
    let euclid_bytes = euclid.image.encode(format)?;

    fs::create_dir_all(out_dir).map_err(|e| with_path(out_dir)(e.into()))?;
    let ext = format.extension();
    write_file(&out_dir.join(format!("hslp.{ext}")), &proposed_bytes)?;
    write_file(&out_dir.join(format!("hsleuclid.{ext}")), &euclid_bytes)?;
    write_file(&out_dir.join("compare.json"), &summary_bytes)?;
    println!("agreement={agreement:.6}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Reduce {
            input,
            opts,
            output,
            report,
        } => cmd_reduce(input, opts, output, report.as_deref()),
        Command::Inspect { rgb } => {
            cmd_inspect(*rgb);
            Ok(())
        }
        Command::Compare {
            input,
            opts,
            out_dir,
        } => cmd_compare(input, opts, out_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hslreduce: error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
