use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use polar64::analysis::{
    anisotropy_map, bin_miss_study, compand_study, error_study, idempotence_study,
    precision_comparison, split_sweep, Compander, DomainKind, ErrorStats, SampleDomain,
    DEFAULT_ULP_BUDGET,
};
use polar64::bench::{sweep, BenchConfig};
use polar64::stream::{read_stream, write_stream};
use polar64::{compress_tracked, decompress, BitLayout, MagnitudeClass, PrecisionPolicy, Vec3f};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "polar64",
    version,
    about = "Fixed-rate 64-bit compression of f32 3-vectors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress f32 triplets (raw little-endian or CSV) into a framed word stream.
    Compress(CompressArgs),
    /// Expand a framed word stream back into f32 triplets.
    Decompress(DecompressArgs),
    /// Run one of the error studies on sampled vectors.
    Analyze(AnalyzeArgs),
    /// Mean and standard deviation of the error for joint-index angle splits.
    Sweep(SweepArgs),
    /// Time vector addition on raw and compressed arrays.
    Bench(BenchArgs),
    /// Fraction of words changed by one more decompress/compress cycle.
    Idempotence(IdempotenceArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Bin,
    Csv,
}

#[derive(Args)]
struct CompressArgs {
    /// Input file, `-` for stdin.
    #[arg(default_value = "-")]
    input: PathBuf,
    /// Output file, `-` for stdout.
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
    #[arg(long, default_value_t = BitLayout::recommended())]
    layout: BitLayout,
    #[arg(long, default_value_t = PrecisionPolicy::default())]
    policy: PrecisionPolicy,
    #[arg(long, value_enum, default_value_t = Format::Bin)]
    format: Format,
}

#[derive(Args)]
struct DecompressArgs {
    #[arg(default_value = "-")]
    input: PathBuf,
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Bin)]
    format: Format,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// sphere, sphere-angles, cube or shell:MIN:MAX
    #[arg(long, default_value = "sphere")]
    domain: DomainKind,
    #[arg(long)]
    json: bool,
}

impl SampleArgs {
    fn domain(&self) -> SampleDomain {
        SampleDomain::new(self.domain, self.samples, self.seed)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Study {
    Error,
    Precision,
    BinMiss,
    Anisotropy,
    Compand,
    Radius,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, value_enum, default_value_t = Study::Error)]
    study: Study,
    #[arg(long, default_value_t = BitLayout::recommended())]
    layout: BitLayout,
    #[arg(long, default_value_t = PrecisionPolicy::default())]
    policy: PrecisionPolicy,
    /// Divide each error by the input magnitude.
    #[arg(long)]
    normalised: bool,
    /// Anisotropy grid as THETA_CELLSxPHI_CELLS.
    #[arg(long, default_value = "36x18")]
    grid: String,
    /// Emit per-cell CSV rows for the anisotropy study.
    #[arg(long)]
    csv: bool,
    #[arg(long, default_value = "uniform")]
    phi_compander: Compander,
    #[arg(long, default_value = "uniform")]
    theta_compander: Compander,
    #[command(flatten)]
    sampling: SampleArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Bits shared by the two angle indices.
    #[arg(long, default_value_t = 35)]
    bits: u32,
    /// Comma-separated φ bucket counts `n_φmax + 1`.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "65536,98304,131072,196608,262144"
    )]
    splits: Vec<u64>,
    #[command(flatten)]
    sampling: SampleArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated element counts.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "4096,65536,1048576,8388608"
    )]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = BitLayout::recommended())]
    layout: BitLayout,
    #[arg(long, default_value_t = PrecisionPolicy::default())]
    policy: PrecisionPolicy,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct IdempotenceArgs {
    #[arg(long, default_value_t = BitLayout::recommended())]
    layout: BitLayout,
    #[arg(long, default_value_t = PrecisionPolicy::default())]
    policy: PrecisionPolicy,
    #[arg(long, default_value_t = DEFAULT_ULP_BUDGET)]
    ulp_budget: u32,
    #[command(flatten)]
    sampling: SampleArgs,
}

/// Invalid flag values that clap cannot check on its own.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>()
            .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<polar64::Error>().is_some_and(
                |e| matches!(e, polar64::Error::Io(e) if e.kind() == io::ErrorKind::BrokenPipe),
            )
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Compress(a) => cmd_compress(a),
        Command::Decompress(a) => cmd_decompress(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Idempotence(a) => cmd_idempotence(a),
    }
}

fn open_input(path: &PathBuf) -> anyhow::Result<Box<dyn Read>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(io::stdin().lock()))
    } else {
        let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        Ok(Box::new(f))
    }
}

fn open_output(path: &PathBuf) -> anyhow::Result<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        Ok(Box::new(BufWriter::new(f)))
    }
}

fn read_raw_triplets(r: &mut dyn Read) -> anyhow::Result<Vec<Vec3f>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() % 12 != 0 {
        bail!(
            "raw input is {} bytes, not a whole number of f32 triplets",
            bytes.len()
        );
    }
    Ok(bytes
        .chunks_exact(12)
        .map(|c| {
            let f = |i: usize| f32::from_le_bytes(c[i..i + 4].try_into().unwrap());
            Vec3f::new(f(0), f(4), f(8))
        })
        .collect())
}

fn read_csv_triplets(r: &mut dyn Read) -> anyhow::Result<Vec<Vec3f>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.replace(' ', "") == "x,y,z")
        {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            bail!("line {}: expected 3 fields, found {}", i + 1, fields.len());
        }
        let mut c = [0f32; 3];
        for (slot, field) in c.iter_mut().zip(&fields) {
            *slot = field
                .parse()
                .with_context(|| format!("line {}: `{field}` is not a number", i + 1))?;
        }
        out.push(Vec3f::from(c));
    }
    Ok(out)
}

fn cmd_compress(a: CompressArgs) -> anyhow::Result<()> {
    let mut input = open_input(&a.input)?;
    let vectors = match a.format {
        Format::Bin => read_raw_triplets(&mut input)?,
        Format::Csv => read_csv_triplets(&mut input)?,
    };
    let (mut flushed, mut saturated) = (0u64, 0u64);
    let mut words = Vec::with_capacity(vectors.len());
    for (i, v) in vectors.iter().enumerate() {
        let (w, class) = compress_tracked(*v, &a.layout, &a.policy)
            .with_context(|| format!("vector {i}: {v:?}"))?;
        match class {
            MagnitudeClass::Flushed => flushed += 1,
            MagnitudeClass::Saturated => saturated += 1,
            _ => {}
        }
        words.push(w);
    }
    let mut out = open_output(&a.output)?;
    write_stream(&mut out, &a.layout, &words)?;
    out.flush()?;
    eprintln!(
        "compressed {} vectors with {}; flushed {flushed}, saturated {saturated}",
        words.len(),
        a.layout
    );
    Ok(())
}

fn cmd_decompress(a: DecompressArgs) -> anyhow::Result<()> {
    let mut input = open_input(&a.input)?;
    let (layout, words) = read_stream(&mut input)?;
    let mut out = open_output(&a.output)?;
    match a.format {
        Format::Bin => {
            for w in &words {
                let v = decompress(*w, &layout);
                for c in [v.x, v.y, v.z] {
                    out.write_all(&c.to_le_bytes())?;
                }
            }
        }
        Format::Csv => {
            writeln!(out, "x,y,z")?;
            for w in &words {
                let v = decompress(*w, &layout);
                writeln!(out, "{},{},{}", v.x, v.y, v.z)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn emit(report: Value, json_mode: bool) -> io::Result<()> {
    let mut out = io::stdout().lock();
    if json_mode {
        writeln!(out, "{}", serde_json::to_string_pretty(&report).unwrap())?;
        return out.flush();
    }
    if let Value::Object(map) = report {
        for (k, v) in map {
            match v {
                Value::String(s) => writeln!(out, "{k}: {s}")?,
                Value::Array(rows) => {
                    writeln!(out, "{k}:")?;
                    for row in rows {
                        writeln!(out, "  {row}")?;
                    }
                }
                other => writeln!(out, "{k}: {other}")?,
            }
        }
    }
    out.flush()
}

fn stats_fields(s: &ErrorStats) -> Value {
    json!({ "count": s.count, "mean": s.mean, "max": s.max, "stddev": s.stddev, "normalised": s.normalised })
}

fn header(
    layout: &BitLayout,
    policy: Option<&PrecisionPolicy>,
    s: &SampleArgs,
) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("layout".into(), json!(layout.to_string()));
    if let Some(p) = policy {
        m.insert("policy".into(), json!(p.to_string()));
    }
    m.insert("domain".into(), json!(s.domain.to_string()));
    m.insert("seed".into(), json!(s.seed));
    m.insert("count".into(), json!(s.samples));
    m
}

fn merge(mut base: serde_json::Map<String, Value>, extra: Value) -> Value {
    if let Value::Object(extra) = extra {
        base.extend(extra);
    }
    Value::Object(base)
}

fn parse_grid(s: &str) -> anyhow::Result<(usize, usize)> {
    let bad = || UsageError(format!("grid `{s}` is not of the form THETAxPHI"));
    let (t, p) = s.split_once('x').ok_or_else(bad)?;
    let t: usize = t.parse().map_err(|_| bad())?;
    let p: usize = p.parse().map_err(|_| bad())?;
    if t == 0 || p == 0 {
        return Err(bad().into());
    }
    Ok((t, p))
}

fn cmd_analyze(a: AnalyzeArgs) -> anyhow::Result<()> {
    let s = &a.sampling;
    if s.samples == 0 {
        return Err(UsageError("--samples must be positive".into()).into());
    }
    let domain = s.domain();
    let report = match a.study {
        Study::Error => {
            let stats = error_study(&domain, &a.layout, &a.policy, a.normalised)?;
            merge(header(&a.layout, Some(&a.policy), s), stats_fields(&stats))
        }
        Study::Precision => {
            let rows = precision_comparison(s.samples, s.seed, &a.layout)?;
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    merge(
                        serde_json::Map::from_iter([
                            ("policy".into(), json!(r.policy.to_string())),
                            ("domain".into(), json!(r.domain.to_string())),
                        ]),
                        stats_fields(&r.stats),
                    )
                })
                .collect();
            json!({ "layout": a.layout.to_string(), "seed": s.seed, "count": s.samples, "rows": rows })
        }
        Study::BinMiss => {
            let m = bin_miss_study(&domain, &a.layout)?;
            merge(
                header(&a.layout, None, s),
                json!({ "misses_theta": m.theta_fraction(), "misses_phi": m.phi_fraction() }),
            )
        }
        Study::Anisotropy => {
            let grid = parse_grid(&a.grid)?;
            let map = anisotropy_map(&domain, &a.layout, &a.policy, grid)?;
            if a.csv {
                let mut out = BufWriter::new(io::stdout().lock());
                writeln!(out, "theta_cell,phi_cell,mean_error")?;
                for (t, p, e) in map.rows() {
                    writeln!(out, "{t},{p},{e}")?;
                }
                out.flush()?;
                return Ok(());
            }
            merge(
                header(&a.layout, Some(&a.policy), s),
                json!({ "grid": a.grid, "max": map.global_max, "anisotropy": map.ratio() }),
            )
        }
        Study::Compand => {
            let stats = compand_study(&domain, &a.layout, a.phi_compander, a.theta_compander)?;
            merge(
                header(&a.layout, None, s),
                merge(
                    serde_json::Map::from_iter([
                        ("phi_compander".into(), json!(a.phi_compander.to_string())),
                        (
                            "theta_compander".into(),
                            json!(a.theta_compander.to_string()),
                        ),
                    ]),
                    stats_fields(&stats),
                ),
            )
        }
        Study::Radius => {
            let rows: Vec<Value> = [1e-8, 1e-4, 1.0, 1e4, 1e8]
                .into_iter()
                .map(|r| {
                    let d = SampleDomain::new(
                        DomainKind::Shell { r_min: r, r_max: r },
                        s.samples,
                        s.seed,
                    );
                    let stats = error_study(&d, &a.layout, &a.policy, true)?;
                    Ok(merge(
                        serde_json::Map::from_iter([("radius".into(), json!(r))]),
                        stats_fields(&stats),
                    ))
                })
                .collect::<polar64::Result<_>>()?;
            json!({ "layout": a.layout.to_string(), "policy": a.policy.to_string(), "seed": s.seed, "count": s.samples, "rows": rows })
        }
    };
    emit(report, s.json)?;
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> anyhow::Result<()> {
    let s = &a.sampling;
    if s.samples == 0 || a.splits.is_empty() {
        return Err(UsageError("--samples and --splits must be non-empty".into()).into());
    }
    let results =
        split_sweep(a.bits, &a.splits, &s.domain()).map_err(|e| UsageError(e.to_string()))?;
    let mut out = io::stdout().lock();
    if s.json {
        let rows: Vec<Value> = results
            .iter()
            .map(|(c, st)| json!({
                "phi_buckets": c.n_phi_max + 1, "n_phi_max": c.n_phi_max, "n_theta_max": c.n_theta_max,
                "mean": st.mean, "max": st.max, "stddev": st.stddev,
            }))
            .collect();
        let report = json!({ "bits": a.bits, "domain": s.domain.to_string(), "seed": s.seed, "count": s.samples, "rows": rows });
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        writeln!(out, "phi_buckets,n_phi_max,n_theta_max,mean,stddev,max")?;
        for (c, st) in &results {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                c.n_phi_max + 1,
                c.n_phi_max,
                c.n_theta_max,
                st.mean,
                st.stddev,
                st.max
            )?;
        }
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> anyhow::Result<()> {
    let mut config = BenchConfig::new(a.sizes, a.repeats).map_err(|e| UsageError(e.to_string()))?;
    config.layout = a.layout;
    config.policy = a.policy;
    let report = sweep(&config);
    let mut out = io::stdout().lock();
    if a.json {
        let rows: Vec<Value> = report
            .rows
            .iter()
            .map(|r| {
                json!({
                    "n": r.n, "time_raw_ns": r.time_raw_ns, "time_comp_ns": r.time_compressed_ns,
                    "speedup": r.speedup, "bytes_ratio": r.bytes_ratio,
                })
            })
            .collect();
        let doc = json!({
            "layout": a.layout.to_string(), "policy": a.policy.to_string(),
            "last_level_cache_bytes": report.last_level_cache_bytes, "rows": rows,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    } else {
        writeln!(out, "n,time_raw_ns,time_comp_ns,speedup,bytes_ratio")?;
        for r in &report.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.n, r.time_raw_ns, r.time_compressed_ns, r.speedup, r.bytes_ratio
            )?;
        }
    }
    Ok(())
}

fn cmd_idempotence(a: IdempotenceArgs) -> anyhow::Result<()> {
    let s = &a.sampling;
    if s.samples == 0 {
        return Err(UsageError("--samples must be positive".into()).into());
    }
    let r = idempotence_study(&s.domain(), &a.layout, &a.policy, a.ulp_budget)?;
    let report = merge(
        header(&a.layout, Some(&a.policy), s),
        json!({
            "word_miss_fraction": r.word_miss_fraction,
            "angle_miss_fraction": r.angle_miss_fraction,
            "third_cycle_stable_fraction": r.third_cycle_stable_fraction,
            "predicted_bound": r.predicted_bound,
            "ulp_budget": r.ulp_budget,
        }),
    );
    emit(report, s.json)?;
    Ok(())
}
