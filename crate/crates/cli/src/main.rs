mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use pro_f0::emd::{eemd_decompose, emd_decompose};
use pro_f0::estimators::EstimatorKind;
use pro_f0::eval::bench::{aggregate, run_benchmark, write_reports_csv, NoiseSource};
use pro_f0::eval::manifest::{load_corpus, write_manifest, ManifestEntry};
use pro_f0::eval::noise::{generate_noise, NoiseKind};
use pro_f0::eval::synth::{synthesize_utterance, synthetic_corpus};
use pro_f0::pro::analyze_utterance;
use pro_f0::signal::{load_wav, write_wav_pcm16};

use config::{Overrides, RunConfig};

/// Pitch tracking for noisy speech with EEMD-based low/high region
/// separation and octave correction.
#[derive(Debug, Parser)]
#[command(name = "prof0", version, about)]
struct Cli {
    /// TOML file with any of the sections emd, estimator, pro, vad, bench.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Print the resolved configuration as TOML and exit.
    #[arg(long, global = true)]
    print_config: bool,

    /// Seed for EEMD noise, benchmark mixing and corpus synthesis.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Directory that relative output paths resolve against.
    #[arg(
        long,
        global = true,
        env = "PROF0_OUT_DIR",
        default_value = ".",
        value_name = "DIR"
    )]
    out_dir: PathBuf,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decompose a WAV file into intrinsic mode functions.
    Decompose {
        input: PathBuf,
        /// Multi-channel WAV of the modes plus the residual.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Single plain EMD instead of the ensemble.
        #[arg(long)]
        plain: bool,
    },
    /// Per-frame F0 track of a WAV file as CSV.
    Track {
        input: PathBuf,
        /// pefac, shr, swipe or hht.
        #[arg(long, short, default_value = "hht")]
        estimator: EstimatorKind,
        /// Apply region separation and octave correction; adds region and
        /// candidate columns.
        #[arg(long)]
        pro: bool,
        /// CSV destination (default: stdout).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Per-frame low/high region labels of a WAV file as CSV.
    Separate {
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Score estimators on a corpus over a noise × SNR grid.
    Bench {
        /// Lines of "wav_path f0_path".
        #[arg(long, value_name = "FILE")]
        manifest: PathBuf,
        /// Read noise `<name>.wav` from this directory instead of generating it.
        #[arg(long, value_name = "DIR")]
        noise_dir: Option<PathBuf>,
        /// Comma-separated noise names.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "babble,ssn,cafeteria,train,helicopter,volvo"
        )]
        noises: Vec<NoiseKind>,
        /// CSV destination (default: stdout).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Write a synthetic corpus (WAV + reference F0 + manifest).
    Synth {
        /// Utterances with F0 at or below 185 Hz.
        #[arg(long, default_value_t = 10)]
        low: usize,
        /// Utterances with F0 above 215 Hz.
        #[arg(long, default_value_t = 10)]
        high: usize,
        #[arg(long, default_value_t = 8000, value_name = "HZ")]
        sample_rate: u32,
        /// Also write this many seconds of every noise type to `noise/`.
        #[arg(long, value_name = "SECONDS")]
        noise_seconds: Option<f64>,
    },
}

fn resolve(out_dir: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        out_dir.join(p)
    }
}

fn sink(out_dir: &Path, out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => {
            let path = resolve(out_dir, p);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            let f =
                File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_input(path: &Path) -> Result<pro_f0::signal::SampleBuffer> {
    if !path.exists() {
        bail!("input file not found: {}", path.display());
    }
    Ok(load_wav(path)?)
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.emd.rng_seed = seed;
        cfg.bench.seed = seed;
    }
    cli.overrides.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = resolve_config(&cli)?;
    if cli.print_config {
        print!("{}", cfg.to_toml()?);
        return Ok(());
    }
    let Some(command) = &cli.command else {
        bail!("no command given (try --help)");
    };
    if let Some(n) = cli.jobs {
        if n == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    let pipeline = cfg.pipeline();
    let out_dir = &cli.out_dir;
    match command {
        Command::Decompose { input, out, plain } => {
            let x = read_input(input)?;
            let set = if *plain {
                emd_decompose(&x, &pipeline.emd)?
            } else {
                eemd_decompose(&x, &pipeline.emd)?
            };
            let default_name = format!(
                "{}_imfs.wav",
                input
                    .file_stem()
                    .map(|s| s.to_string_lossy())
                    .unwrap_or_default()
            );
            let path = resolve(out_dir, out.as_deref().unwrap_or(Path::new(&default_name)));
            set.write_wav(&path)?;
            let mut w = io::stdout().lock();
            writeln!(w, "{} IMFs", set.num_imfs())?;
            writeln!(w, "mode,mean_power")?;
            for (k, e) in set.energies().iter().enumerate() {
                writeln!(w, "{},{e:.6e}", k + 1)?;
            }
            let residual =
                set.residual.iter().map(|v| v * v).sum::<f64>() / set.residual.len() as f64;
            writeln!(w, "residual,{residual:.6e}")?;
            writeln!(w, "wrote {}", path.display())?;
        }
        Command::Track {
            input,
            estimator,
            pro,
            out,
        } => {
            let x = read_input(input)?;
            let analysis = analyze_utterance(&x, &[*estimator], &pipeline)?;
            let mut w = sink(out_dir, out)?;
            if *pro {
                analysis.write_diagnostics_csv(*estimator, &mut w)?;
            } else {
                let track = analysis
                    .track(*estimator, false)
                    .expect("estimator was run");
                writeln!(w, "time_ms,voiced,f0_hz")?;
                for q in 0..track.len() {
                    writeln!(
                        w,
                        "{:.1},{},{:.2}",
                        track.frame_times_ms[q],
                        u8::from(track.voiced_mask[q]),
                        track.f0_hz[q].unwrap_or(0.0)
                    )?;
                }
            }
            w.flush()?;
        }
        Command::Separate { input, out } => {
            let x = read_input(input)?;
            let analysis = analyze_utterance(&x, &[], &pipeline)?;
            let Some(regions) = &analysis.regions else {
                bail!(
                    "the decomposition has fewer than {} modes; the signal is too short or too simple",
                    pipeline.pro.k_imfs
                );
            };
            let mut w = sink(out_dir, out)?;
            writeln!(w, "time_ms,voiced,region,mean_f0_hz,imf_pair")?;
            for (q, r) in regions.iter().enumerate() {
                writeln!(
                    w,
                    "{:.1},{},{},{},{}",
                    analysis.times_ms[q],
                    u8::from(analysis.voiced[q]),
                    r.region,
                    r.mean_f0.map(|m| format!("{m:.2}")).unwrap_or_default(),
                    r.selected_imfs
                        .map(|(a, b)| format!("{a}-{b}"))
                        .unwrap_or_default()
                )?;
            }
            w.flush()?;
        }
        Command::Bench {
            manifest,
            noise_dir,
            noises,
            out,
        } => {
            let corpus = load_corpus(manifest)?;
            if noises.is_empty() {
                bail!("no noise types given");
            }
            let sources = noises
                .iter()
                .map(|&kind| match noise_dir {
                    Some(dir) => {
                        let path = dir.join(format!("{}.wav", kind.name()));
                        Ok(NoiseSource::Recording {
                            name: kind.name().to_string(),
                            audio: load_wav(&path).with_context(|| format!("noise {kind}"))?,
                        })
                    }
                    None => Ok(NoiseSource::Synthetic(kind)),
                })
                .collect::<Result<Vec<_>>>()?;
            let outcome = run_benchmark(&corpus, &sources, &pipeline, &cfg.bench)?;
            let reports = aggregate(&outcome.rows, &sources, &cfg.bench);
            let mut w = sink(out_dir, out)?;
            write_reports_csv(&reports, &mut w)?;
            w.flush()?;
            if !outcome.failures.is_empty() {
                for f in &outcome.failures {
                    eprintln!(
                        "failed: {} {} dB {} {} {}: {}",
                        f.noise, f.snr_db, f.estimator, f.method, f.utterance, f.message
                    );
                }
                bail!("{} grid units could not be scored", outcome.failures.len());
            }
        }
        Command::Synth {
            low,
            high,
            sample_rate,
            noise_seconds,
        } => {
            let seed = cli.seed.unwrap_or(0);
            std::fs::create_dir_all(out_dir)?;
            let mut entries = Vec::new();
            for (i, spec) in synthetic_corpus(*low, *high, *sample_rate, seed)
                .iter()
                .enumerate()
            {
                let u = synthesize_utterance(spec)?;
                let kind = if i < *low { "low" } else { "high" };
                let wav = out_dir.join(format!("{kind}{i:03}.wav"));
                let f0 = out_dir.join(format!("{kind}{i:03}.f0"));
                write_wav_pcm16(&wav, &u.audio)?;
                u.truth.write_reference(&f0)?;
                entries.push(ManifestEntry { wav, f0 });
            }
            let manifest = out_dir.join("manifest.txt");
            write_manifest(&manifest, &entries)?;
            println!(
                "wrote {} utterances and {}",
                entries.len(),
                manifest.display()
            );
            if let Some(seconds) = noise_seconds {
                let dir = out_dir.join("noise");
                std::fs::create_dir_all(&dir)?;
                let len = (seconds * *sample_rate as f64).round() as usize;
                for kind in NoiseKind::ALL {
                    let mut n = generate_noise(kind, len, *sample_rate, seed)?;
                    n = n.scaled(0.25)?;
                    write_wav_pcm16(dir.join(format!("{}.wav", kind.name())), &n)?;
                }
                println!(
                    "wrote {} noise files to {}",
                    NoiseKind::ALL.len(),
                    dir.display()
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
