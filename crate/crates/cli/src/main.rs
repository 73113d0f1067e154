use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use evtcodec::augment::AugSequenceDraw;
use evtcodec::io::{
    read_events, synth_events, write_coo, write_events, write_pgm, write_tensor, EventFileKind,
    Pattern, SynthConfig,
};
use evtcodec::metrics::{
    read_counts_csv, replay_counts, write_report_csv, write_rows_json, write_summary_json,
    ReplayConfig,
};
use evtcodec::parallel::{configure_threads, map_slice};
use evtcodec::{
    apply_sequence, bench_corpus, coo_encode, encode, AugConfig, BenchConfig, EventStream,
    FormatTag, RpsConfig, SensorGeometry,
};

const THREADS_ENV: &str = "EVTCODEC_THREADS";

#[derive(Parser)]
#[command(name = "evtcodec", version, about = "Event-stream tensor encodings, COO codec and size benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic event file (CSV or EVB1, chosen by extension)
    Gen(GenArgs),
    /// Chunk an event file, encode every chunk and write tensors / COO buffers
    Encode(EncodeArgs),
    /// Time every format on the average, busiest and quietest chunk of a corpus
    Bench(BenchArgs),
}

#[derive(Args)]
struct SensorArgs {
    /// Sensor width, used for CSV inputs and generation
    #[arg(long, default_value_t = SensorGeometry::GEN1.width)]
    width: u32,
    #[arg(long, default_value_t = SensorGeometry::GEN1.height)]
    height: u32,
}

impl SensorArgs {
    fn geometry(&self) -> Result<SensorGeometry> {
        Ok(SensorGeometry::new(self.width, self.height)?)
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "moving-bar")]
    pattern: Pattern,
    #[arg(long, default_value_t = 500)]
    duration_ms: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Log-intensity threshold; `inf` produces no events
    #[arg(long, default_value_t = 0.2)]
    contrast: f64,
    #[arg(long, default_value_t = 1_000)]
    tick_us: u64,
    /// Per-tick log-intensity noise (standard deviation)
    #[arg(long, default_value_t = 0.03)]
    noise: f64,
    #[command(flatten)]
    sensor: SensorArgs,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Tensor,
    Coo,
    Both,
}

#[derive(Args)]
struct EncodeArgs {
    input: PathBuf,
    #[arg(long, default_value = "vtei")]
    format: FormatTag,
    #[arg(long, default_value_t = 5)]
    bins: u32,
    #[arg(long, default_value_t = 50_000)]
    window_us: u64,
    #[arg(long, default_value_t = 0.05)]
    rps_s: f64,
    #[arg(long, default_value_t = 0.5)]
    rps_p: f64,
    #[arg(long, default_value_t = 0.0)]
    hflip_prob: f64,
    #[arg(long, default_value_t = 0.0)]
    zoom_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip augmentation entirely
    #[arg(long)]
    no_augment: bool,
    #[arg(long, value_enum, default_value_t = Emit::Both)]
    emit: Emit,
    /// Also write every channel of every chunk as a PGM image
    #[arg(long)]
    pgm: bool,
    #[command(flatten)]
    sensor: SensorArgs,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportKind {
    Csv,
    Json,
}

#[derive(Args)]
struct BenchArgs {
    /// Event files making up the corpus
    inputs: Vec<PathBuf>,
    /// Comma-separated formats
    #[arg(long, value_delimiter = ',', default_values_t = FormatTag::ALL.to_vec())]
    formats: Vec<FormatTag>,
    #[arg(long, default_value_t = 5)]
    bins: u32,
    #[arg(long, default_value_t = 50_000)]
    window_us: u64,
    #[arg(long, default_value_t = 11)]
    reps: usize,
    #[arg(long, default_value_t = 4)]
    raw_event_bytes: u64,
    #[arg(long, value_enum, default_value_t = ReportKind::Csv)]
    report: ReportKind,
    /// Derive the report from measured counts instead of timing encoders
    #[arg(long, conflicts_with = "inputs")]
    from_counts: Option<PathBuf>,
    #[command(flatten)]
    sensor: SensorArgs,
    /// Report path; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() {
    if let Err(e) = run() {
        let closed_pipe = e
            .chain()
            .filter_map(|c| c.downcast_ref::<io::Error>())
            .any(|io| io.kind() == io::ErrorKind::BrokenPipe);
        if closed_pipe {
            return;
        }
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("{THREADS_ENV}={v:?} is not a thread count"))?;
        configure_threads(n)?;
    }
    match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Encode(a) => cmd_encode(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    let kind = EventFileKind::from_extension(&a.output).unwrap_or(EventFileKind::Evb1);
    let config = SynthConfig {
        contrast: a.contrast,
        tick_us: a.tick_us,
        noise: a.noise,
        ..SynthConfig::new(a.sensor.geometry()?, a.duration_ms * 1_000, a.pattern, a.seed)
    };
    let stream = synth_events(&config)?;
    write_events(&a.output, &stream, kind)
        .with_context(|| format!("writing {}", a.output.display()))?;
    eprintln!("{}: {} events", a.output.display(), stream.len());
    Ok(())
}

fn load(path: &Path, sensor: &SensorArgs) -> Result<EventStream> {
    read_events(path, None, Some(sensor.geometry()?)).with_context(|| format!("reading {}", path.display()))
}

fn cmd_encode(a: &EncodeArgs) -> Result<()> {
    if a.bins < a.format.min_bins() {
        bail!("{} needs at least {} bins, got {}", a.format, a.format.min_bins(), a.bins);
    }
    let aug = AugConfig::new(RpsConfig::new(a.rps_s, a.rps_p)?, a.hflip_prob, a.zoom_prob)?;
    let stream = load(&a.input, &a.sensor)?;
    let chunks = stream.chunks(a.window_us, a.bins)?;

    let encoded: Vec<_> = map_slice(&chunks, |c| encode(a.format, c));
    let mut tensors = Vec::with_capacity(encoded.len());
    for (k, t) in encoded.into_iter().enumerate() {
        tensors.push(t.with_context(|| format!("chunk {k}"))?);
    }

    // the whole file is one sequence: one draw shared by all chunks
    let g = stream.geometry();
    let draw = if a.no_augment {
        AugSequenceDraw::identity()
    } else {
        AugSequenceDraw::draw(&aug, g.height as usize, g.width as usize, a.seed)
    };
    let tensors = apply_sequence(&tensors, &draw)?;

    fs::create_dir_all(&a.output).with_context(|| format!("creating {}", a.output.display()))?;
    let stem = a.format.name();
    let mut out = io::stdout().lock();
    writeln!(out, "chunk\tstart_us\tevents\tnon_zeros")?;
    for (k, (chunk, tensor)) in chunks.iter().zip(&tensors).enumerate() {
        let base = a.output.join(format!("{stem}_{k:05}"));
        if a.emit != Emit::Coo {
            write_tensor(&base.with_extension("etn"), tensor).with_context(|| format!("chunk {k}"))?;
        }
        if a.emit != Emit::Tensor {
            let buf = coo_encode(tensor).with_context(|| format!("chunk {k}"))?;
            write_coo(&base.with_extension("eco"), &buf).with_context(|| format!("chunk {k}"))?;
        }
        if a.pgm {
            for ch in 0..tensor.dims()[0] {
                let path = a.output.join(format!("{stem}_{k:05}_c{ch}.pgm"));
                write_pgm(&path, tensor, ch).with_context(|| format!("chunk {k}"))?;
            }
        }
        writeln!(out, "{k}\t{}\t{}\t{}", chunk.window().start(), chunk.len(), tensor.count_nonzeros())?;
    }
    eprintln!(
        "{} chunks; rps {:?}, hflip {}, zoom {}",
        chunks.len(),
        draw.rps_branch,
        draw.hflip,
        draw.zoom.map_or("none".into(), |z| format!("x{:.3} at {:?}", z.scale, z.offset))
    );
    Ok(())
}

fn report_sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let sink = report_sink(a.output.as_deref())?;
    if let Some(counts) = &a.from_counts {
        let file = File::open(counts).with_context(|| format!("opening {}", counts.display()))?;
        let rows = read_counts_csv(BufReader::new(file)).with_context(|| format!("reading {}", counts.display()))?;
        let config = ReplayConfig {
            geometry: a.sensor.geometry()?,
            bins: a.bins,
            window_us: a.window_us,
            raw_event_bytes: a.raw_event_bytes,
        };
        let rows = replay_counts(&rows, &config);
        match a.report {
            ReportKind::Csv => write_report_csv(sink, &rows)?,
            ReportKind::Json => write_rows_json(sink, &rows)?,
        }
        return Ok(());
    }

    if a.inputs.is_empty() {
        bail!("no input files (pass event files or --from-counts)");
    }
    let streams = a
        .inputs
        .iter()
        .map(|p| load(p, &a.sensor))
        .collect::<Result<Vec<_>>>()?;
    let config = BenchConfig {
        window_us: a.window_us,
        bins: a.bins,
        formats: a.formats.clone(),
        repetitions: a.reps,
        raw_event_bytes: a.raw_event_bytes,
    };
    let summary = bench_corpus(&streams, &config)?;
    match a.report {
        ReportKind::Csv => write_report_csv(sink, &summary.rows())?,
        ReportKind::Json => write_summary_json(sink, &summary)?,
    }
    Ok(())
}
