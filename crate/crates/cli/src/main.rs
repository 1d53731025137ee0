//! `recnn` command-line tool.
//!
//! Exit codes: 0 on success, 1 for usage and argument errors, 2 when an
//! input file is unreadable or invalid.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use recnn::dataio::{load_manifest, read_labelmap};
use recnn::metrics::{seg_metrics, MetricsReport, RetrievalWindow, DEFAULT_K_LIST};
use recnn::region::Connectivity;
use recnn::retrieval::{
    build_index, evaluate_scheme, query_ranked, EvalOptions, IndexConfig, QueryOptions,
    RetrievalIndex,
};
use recnn::synth::{generate_dataset, SynthConfig};
use recnn::Scheme;

#[derive(Parser)]
#[command(
    name = "recnn",
    version,
    about = "Region feature image retrieval and evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a deterministic synthetic archive and its manifest.
    GenSynthetic {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        images: usize,
        #[arg(long)]
        compositions: usize,
        /// Number of pixel classes (at most 17).
        #[arg(long)]
        classes: usize,
        /// Image size as HxW.
        #[arg(long, value_parser = parse_size)]
        size: (usize, usize),
        #[arg(long)]
        channels: usize,
        #[arg(long)]
        noise: f64,
        #[arg(long)]
        seed: u64,
        /// Downsampling factor of the emitted feature maps.
        #[arg(long, default_value_t = 1)]
        feature_stride: usize,
    },
    /// Extract region and baseline descriptors for every manifest image.
    BuildIndex {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "8", value_parser = parse_connectivity)]
        connectivity: Connectivity,
        #[arg(long, default_value_t = 1)]
        min_region_px: usize,
        /// Size of the label-map class vocabulary.
        #[arg(long, default_value_t = 17)]
        classes: usize,
    },
    /// Rank the index against one of its images.
    Query {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        id: String,
        #[arg(long, value_parser = parse_scheme)]
        scheme: Scheme,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
        /// Skip images sharing no pixel class with the query.
        #[arg(long)]
        label_filter: bool,
        /// Average both directions of the region-set distance.
        #[arg(long)]
        symmetric: bool,
    },
    /// Use every image as a query and write metric reports.
    Evaluate {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, value_parser = parse_scheme)]
        scheme: Scheme,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        pr: PathBuf,
        /// Precision cut-offs, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_K_LIST)]
        k: Vec<usize>,
        #[arg(long)]
        label_filter: bool,
        #[arg(long)]
        symmetric: bool,
        /// Use K = 2·NG instead of min(4·NG, 2·GTM) for ANMRR.
        #[arg(long)]
        twice_ng_window: bool,
    },
    /// Score a predicted label map against ground truth.
    SegMetrics {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        classes: usize,
    },
}

fn parse_size(s: &str) -> std::result::Result<(usize, usize), String> {
    let (h, w) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected HxW, got {s:?}"))?;
    let dim = |v: &str| v.parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((dim(h)?, dim(w)?))
}

fn parse_connectivity(s: &str) -> std::result::Result<Connectivity, String> {
    s.parse().map_err(|e: recnn::Error| e.to_string())
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    s.parse().map_err(|e: recnn::Error| e.to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn report_csv(report: &MetricsReport) -> String {
    let mut header = String::from("scheme,anmrr,map");
    let mut row = format!("{},{:.6},{:.6}", report.scheme, report.anmrr, report.map);
    for (k, p) in &report.p_at {
        header.push_str(&format!(",p{k}"));
        row.push_str(&format!(",{p:.6}"));
    }
    format!("{header}\n{row}\n")
}

fn pr_csv(report: &MetricsReport) -> String {
    let mut out = String::from("recall,precision\n");
    for (r, p) in &report.pr_curve {
        out.push_str(&format!("{r:.1},{p:.6}\n"));
    }
    out
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::GenSynthetic {
            out,
            images,
            compositions,
            classes,
            size: (height, width),
            channels,
            noise,
            seed,
            feature_stride,
        } => {
            let cfg = SynthConfig {
                num_images: images,
                num_compositions: compositions,
                num_pixel_classes: classes,
                height,
                width,
                channels,
                noise_sigma: noise,
                seed,
                feature_stride,
            };
            let manifest = generate_dataset(&cfg, &out)?;
            println!("{}", manifest.display());
        }
        Command::BuildIndex {
            manifest,
            out,
            connectivity,
            min_region_px,
            classes,
        } => {
            let records = load_manifest(&manifest)?;
            let cfg = IndexConfig {
                num_classes: classes,
                connectivity,
                min_region_px,
                ..Default::default()
            };
            let index = build_index(&records, &cfg)?;
            index.save(&out)?;
            eprintln!("indexed {} images into {}", index.len(), out.display());
        }
        Command::Query {
            index,
            id,
            scheme,
            top_k,
            label_filter,
            symmetric,
        } => {
            let index = RetrievalIndex::load(&index)?;
            let opts = QueryOptions {
                label_filter,
                symmetric_regions: symmetric,
            };
            let ranked = query_ranked(&index, &id, scheme, opts)?;
            let stdout = io::stdout();
            let mut out = stdout.lock();
            for (rank, (image_id, d)) in ranked.items().iter().take(top_k).enumerate() {
                writeln!(out, "{},{image_id},{d:.6}", rank + 1)?;
            }
        }
        Command::Evaluate {
            index,
            scheme,
            report,
            pr,
            k,
            label_filter,
            symmetric,
            twice_ng_window,
        } => {
            let index = RetrievalIndex::load(&index)?;
            let opts = EvalOptions {
                k_list: k,
                query: QueryOptions {
                    label_filter,
                    symmetric_regions: symmetric,
                },
                window: if twice_ng_window {
                    RetrievalWindow::TwiceGroundTruth
                } else {
                    RetrievalWindow::Mpeg7
                },
            };
            let metrics = evaluate_scheme(&index, scheme, &opts)?;
            write_file(&report, &report_csv(&metrics))?;
            write_file(&pr, &pr_csv(&metrics))?;
            print!("{}", report_csv(&metrics));
        }
        Command::SegMetrics { pred, gt, classes } => {
            let pred = read_labelmap(&pred, classes)?;
            let gt = read_labelmap(&gt, classes)?;
            let s = seg_metrics(&pred, &gt)?;
            println!("pixel_acc,mean_acc,mean_iu");
            println!("{:.6},{:.6},{:.6}", s.pixel_acc, s.mean_acc, s.mean_iu);
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<recnn::Error>() {
        Some(e) if e.is_argument() => 1,
        _ => 2,
    }
}

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
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
