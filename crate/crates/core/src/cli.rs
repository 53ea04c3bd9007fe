//! Batch command line: `generate`, `factorize`, `evaluate` and `image`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

use std::ffi::OsString;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{micro_f, relative_cost, MetricRow, METRIC_HEADER};
use crate::format::{load_sparse, save_signed, save_sparse};
use crate::imageio::{decode_matrix, encode_image, load_png, render_tiles, save_png};
use crate::manifest::{hash_file, RunManifest};
use crate::matrix::{valuable_rank, BinaryMatrix};
use crate::objectives::{DiscreteCost, ModelKind};
use crate::paltiling::{pal_tiling, PalConfig, Tiling};
use crate::synth::{generate_data, GenSpec, InstanceMeta};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "paltiling",
    version,
    about = "Boolean matrix factorization with PANPAL and PRIMP"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a planted tiling with noise.
    Generate(GenerateArgs),
    /// Factorize a sparse-row data file.
    Factorize(FactorizeArgs),
    /// Score a computed tiling against a planted one and append a CSV row.
    Evaluate(EvaluateArgs),
    /// Image patch experiments.
    #[command(subcommand)]
    Image(ImageCommand),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    rank: usize,
    #[arg(long, default_value_t = 0.1)]
    q: f64,
    #[arg(long, default_value_t = 0.0)]
    pplus: f64,
    #[arg(long, default_value_t = 0.0)]
    pminus: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args, Clone)]
struct PalArgs {
    /// key=value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long = "delta-r")]
    delta_r: Option<usize>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated threshold grid.
    #[arg(long)]
    thresholds: Option<String>,
    #[arg(long = "stop-slack")]
    stop_slack: Option<usize>,
    #[arg(long = "trace-stride")]
    trace_stride: Option<usize>,
    #[arg(long = "max-rounds")]
    max_rounds: Option<usize>,
}

#[derive(Debug, Args)]
struct FactorizeArgs {
    data: PathBuf,
    #[command(flatten)]
    pal: PalArgs,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Directory with the planted X.txt, Y.txt and optional meta.jsonl.
    #[arg(long)]
    planted: PathBuf,
    /// Directory written by `factorize`.
    #[arg(long)]
    computed: PathBuf,
    /// Data file; defaults to D.txt in the planted directory.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value = "metrics.csv")]
    csv: PathBuf,
    #[arg(long = "run-id")]
    run_id: Option<String>,
}

#[derive(Debug, Subcommand)]
enum ImageCommand {
    /// PNG to a sparse-row transaction matrix plus image.json.
    Encode {
        image: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Sparse-row transaction matrix back to PNG.
    Decode {
        data: PathBuf,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode a PNG and factorize it (Δr defaults to 1).
    Factorize {
        image: PathBuf,
        #[command(flatten)]
        pal: PalArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Write tile_<k>.png for the largest tiles and reconstruction.png.
    Render {
        /// Directory written by `image factorize`.
        #[arg(long)]
        tiling: PathBuf,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
        #[arg(long = "top-k", default_value_t = 4)]
        top_k: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

/// Everything `factorize` knows about its result, as `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub model: ModelKind,
    pub m: usize,
    pub n: usize,
    pub rank: usize,
    pub rank_offered: usize,
    pub rank_valuable: usize,
    pub t_x: f64,
    pub t_y: f64,
    pub stop: String,
    pub cost: Option<f64>,
    pub pct_f_rss: Option<f64>,
    pub pct_f_l1: Option<f64>,
    pub pct_f_ct: Option<f64>,
    pub config: PalConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct ImageDims {
    width: usize,
    height: usize,
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::Numerical(_) => EXIT_NUMERICAL,
        _ => EXIT_DATA,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let raw: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match dispatch(cli.command, raw) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command, raw: Vec<String>) -> Result<()> {
    match command {
        Command::Generate(a) => cmd_generate(a, raw),
        Command::Factorize(a) => cmd_factorize(a, raw),
        Command::Evaluate(a) => cmd_evaluate(a, raw),
        Command::Image(c) => cmd_image(c, raw),
    }
}

fn cmd_generate(a: GenerateArgs, raw: Vec<String>) -> Result<()> {
    let spec = GenSpec {
        n: a.n,
        m: a.m,
        r_star: a.rank,
        q: a.q,
        p_plus: a.pplus,
        p_minus: a.pminus,
        seed: a.seed,
    };
    let mut manifest = RunManifest::start("generate", raw, Some(a.seed));
    manifest.config = serde_json::to_value(spec).expect("spec serializes");
    let inst = generate_data(&spec)?;
    fs::create_dir_all(&a.out)?;
    save_sparse(a.out.join("D.txt"), &inst.d)?;
    save_sparse(a.out.join("X.txt"), &inst.x_star)?;
    save_sparse(a.out.join("Y.txt"), &inst.y_star)?;
    save_signed(a.out.join("N.txt"), &inst.n)?;
    let meta = InstanceMeta::of(&inst);
    fs::write(a.out.join("meta.jsonl"), meta.to_json_line())?;
    manifest.finish(a.out.join("manifest.jsonl"))?;
    println!(
        "generated {}x{} rank {} density {:.3}% overlap {:.3}%",
        spec.m, spec.n, spec.r_star, meta.data_density, meta.overlap
    );
    Ok(())
}

/// Defaults, then the config file, then explicit flags.
fn resolve_config(pal: &PalArgs, image_mode: bool) -> Result<PalConfig> {
    let mut cfg = PalConfig::default();
    if image_mode {
        cfg.delta_r = 1;
    }
    let mut seeded = false;
    if let Some(path) = &pal.config {
        let keys = cfg.apply_config_text(&fs::read_to_string(path)?)?;
        seeded = keys.iter().any(|k| k == "seed");
    }
    if let Some(v) = pal.model {
        cfg.model = v;
    }
    if let Some(v) = pal.delta_r {
        cfg.delta_r = v;
    }
    if let Some(v) = pal.iters {
        cfg.iterations = v;
    }
    if let Some(v) = pal.gamma {
        cfg.gamma = v;
    }
    if let Some(v) = pal.seed {
        cfg.seed = v;
        seeded = true;
    }
    if let Some(v) = &pal.thresholds {
        cfg.thresholds = v
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidArgument(format!("bad threshold list '{v}'")))?;
    }
    if let Some(v) = pal.stop_slack {
        cfg.stop_slack = v;
    }
    if let Some(v) = pal.trace_stride {
        cfg.trace_stride = v;
    }
    if let Some(v) = pal.max_rounds {
        cfg.max_rounds = v;
    }
    if !seeded {
        return Err(Error::InvalidArgument(
            "a seed is required (--seed or seed= in the config file)".into(),
        ));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn pct(cost: DiscreteCost, t: &Tiling, d: &BinaryMatrix) -> Option<f64> {
    relative_cost(cost, &t.x, &t.y, d).ok()
}

fn factorize_into(
    d: &BinaryMatrix,
    cfg: &PalConfig,
    out: &Path,
    manifest: &mut RunManifest,
) -> Result<RunSummary> {
    manifest.config = serde_json::to_value(cfg).expect("config serializes");
    let tiling = pal_tiling(d, cfg)?;
    fs::create_dir_all(out)?;
    save_sparse(out.join("X.txt"), &tiling.x)?;
    save_sparse(out.join("Y.txt"), &tiling.y)?;
    fs::write(out.join("rank_trace.csv"), tiling.rank_trace_csv())?;
    fs::write(out.join("trace.csv"), tiling.relaxed_trace_csv())?;
    let summary = RunSummary {
        model: cfg.model,
        m: d.rows(),
        n: d.cols(),
        rank: tiling.rank(),
        rank_offered: tiling.offered_rank(),
        rank_valuable: valuable_rank(&tiling.x, &tiling.y)?,
        t_x: tiling.thresholds.0,
        t_y: tiling.thresholds.1,
        stop: tiling.stop.to_string(),
        cost: tiling.rank_trace.last().map(|p| p.cost),
        pct_f_rss: pct(DiscreteCost::Rss, &tiling, d),
        pct_f_l1: pct(DiscreteCost::L1, &tiling, d),
        pct_f_ct: pct(DiscreteCost::Ct, &tiling, d),
        config: cfg.clone(),
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    fs::write(out.join("summary.json"), text)?;
    fs::write(out.join("config.txt"), cfg.to_config_text())?;
    println!(
        "{}: rank {} (offered {}), stop {}",
        cfg.model, summary.rank, summary.rank_offered, summary.stop
    );
    Ok(summary)
}

fn cmd_factorize(a: FactorizeArgs, raw: Vec<String>) -> Result<()> {
    let cfg = resolve_config(&a.pal, false)?;
    let mut manifest = RunManifest::start("factorize", raw, Some(cfg.seed));
    manifest.inputs.push(hash_file(&a.data)?);
    if let Some(c) = &a.pal.config {
        manifest.inputs.push(hash_file(c)?);
    }
    let d = load_sparse(&a.data)?;
    factorize_into(&d, &cfg, &a.out, &mut manifest)?;
    manifest.finish(a.out.join("manifest.jsonl"))?;
    Ok(())
}

fn read_meta(dir: &Path) -> Result<Option<InstanceMeta>> {
    let path = dir.join("meta.jsonl");
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path)?;
    let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    serde_json::from_str(line)
        .map(Some)
        .map_err(|e| Error::parse(1, format!("{}: {e}", path.display())))
}

fn cmd_evaluate(a: EvaluateArgs, raw: Vec<String>) -> Result<()> {
    let data_path = a.data.clone().unwrap_or_else(|| a.planted.join("D.txt"));
    let mut manifest = RunManifest::start("evaluate", raw, None);
    let inputs = [
        data_path.clone(),
        a.planted.join("X.txt"),
        a.planted.join("Y.txt"),
        a.computed.join("X.txt"),
        a.computed.join("Y.txt"),
    ];
    for p in &inputs {
        manifest.inputs.push(hash_file(p)?);
    }
    let d = load_sparse(&data_path)?;
    let (xs, ys) = (load_sparse(&inputs[1])?, load_sparse(&inputs[2])?);
    let (x, y) = (load_sparse(&inputs[3])?, load_sparse(&inputs[4])?);
    for (xm, ym) in [(&xs, &ys), (&x, &y)] {
        if xm.rows() != d.cols() || ym.rows() != d.rows() {
            return Err(Error::DimensionMismatch {
                op: "evaluate",
                left: (ym.rows(), xm.rows()),
                right: d.shape(),
            });
        }
    }
    let summary: Option<RunSummary> = fs::read_to_string(a.computed.join("summary.json"))
        .ok()
        .and_then(|t| serde_json::from_str(&t).ok());
    let wall_ms = RunManifest::read_last(a.computed.join("manifest.jsonl"))
        .ok()
        .flatten()
        .map_or(0, |m| m.wall_ms());
    let meta = read_meta(&a.planted)?;
    let scores = micro_f(&xs, &ys, &x, &y)?;
    let run_id = a.run_id.clone().unwrap_or_else(|| {
        a.computed
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".into())
    });
    let row = MetricRow {
        run_id,
        model: summary
            .as_ref()
            .map_or("unknown".into(), |s| s.model.to_string()),
        n: d.cols(),
        m: d.rows(),
        r_star: xs.cols(),
        q: meta.as_ref().map_or(f64::NAN, |m| m.spec.q),
        p_plus: meta.as_ref().map_or(f64::NAN, |m| m.spec.p_plus),
        p_minus: meta.as_ref().map_or(f64::NAN, |m| m.spec.p_minus),
        seed: summary.as_ref().map_or(0, |s| s.config.seed),
        rank_offered: summary.as_ref().map_or(x.cols(), |s| s.rank_offered),
        rank_valuable: valuable_rank(&x, &y)?,
        f_measure: scores.f_measure,
        precision: scores.precision,
        recall: scores.recall,
        pct_f_rss: relative_cost(DiscreteCost::Rss, &x, &y, &d)?,
        pct_f_l1: relative_cost(DiscreteCost::L1, &x, &y, &d)?,
        pct_f_ct: relative_cost(DiscreteCost::Ct, &x, &y, &d)?,
        wall_ms,
    };
    let fresh = fs::metadata(&a.csv).map(|m| m.len() == 0).unwrap_or(true);
    if let Some(parent) = a.csv.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut f = OpenOptions::new().create(true).append(true).open(&a.csv)?;
    if fresh {
        writeln!(f, "{METRIC_HEADER}")?;
    }
    f.write_all(row.to_csv_line().as_bytes())?;
    println!(
        "F={:.4} P={:.4} R={:.4}",
        row.f_measure, row.precision, row.recall
    );
    let log = a.csv.with_extension("manifest.jsonl");
    manifest.finish(log)?;
    Ok(())
}

fn write_dims(dir: &Path, width: usize, height: usize) -> Result<()> {
    let text = serde_json::to_string(&ImageDims { width, height }).expect("dims serialize");
    fs::write(dir.join("image.json"), text + "\n")?;
    Ok(())
}

fn cmd_image(c: ImageCommand, raw: Vec<String>) -> Result<()> {
    match c {
        ImageCommand::Encode { image, out } => {
            let mut manifest = RunManifest::start("image encode", raw, None);
            manifest.inputs.push(hash_file(&image)?);
            let img = load_png(&image)?;
            fs::create_dir_all(&out)?;
            let d = encode_image(&img);
            save_sparse(out.join("D.txt"), &d)?;
            write_dims(&out, img.width(), img.height())?;
            manifest.finish(out.join("manifest.jsonl"))?;
            println!("{} transactions x {} items", d.rows(), d.cols());
        }
        ImageCommand::Decode {
            data,
            width,
            height,
            out,
        } => {
            let img = decode_matrix(&load_sparse(&data)?, width, height)?;
            if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            save_png(&out, &img)?;
        }
        ImageCommand::Factorize { image, pal, out } => {
            let cfg = resolve_config(&pal, true)?;
            let mut manifest = RunManifest::start("image factorize", raw, Some(cfg.seed));
            manifest.inputs.push(hash_file(&image)?);
            let img = load_png(&image)?;
            let d = encode_image(&img);
            fs::create_dir_all(&out)?;
            save_sparse(out.join("D.txt"), &d)?;
            write_dims(&out, img.width(), img.height())?;
            factorize_into(&d, &cfg, &out, &mut manifest)?;
            manifest.finish(out.join("manifest.jsonl"))?;
        }
        ImageCommand::Render {
            tiling,
            width,
            height,
            top_k,
            out,
        } => {
            let dims: Option<ImageDims> = fs::read_to_string(tiling.join("image.json"))
                .ok()
                .and_then(|t| serde_json::from_str(&t).ok());
            let (w, h) = match (
                width.or(dims.map(|d| d.width)),
                height.or(dims.map(|d| d.height)),
            ) {
                (Some(w), Some(h)) => (w, h),
                _ => {
                    return Err(Error::InvalidArgument(
                        "image size unknown: pass --width and --height".into(),
                    ))
                }
            };
            let x = load_sparse(tiling.join("X.txt"))?;
            let y = load_sparse(tiling.join("Y.txt"))?;
            let r = render_tiles(&x, &y, w, h, top_k)?;
            fs::create_dir_all(&out)?;
            for (k, (_, img)) in r.tiles.iter().enumerate() {
                save_png(out.join(format!("tile_{}.png", k + 1)), img)?;
            }
            save_png(out.join("reconstruction.png"), &r.reconstruction)?;
            println!("wrote {} tiles and reconstruction.png", r.tiles.len());
        }
    }
    Ok(())
}
