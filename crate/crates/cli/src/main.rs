use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use combipyr::merge::{build_pyramid, region_stats};
use combipyr::raster::Image;
use combipyr::relations::SegmentSummary;
use combipyr::roadsign::{region_mask, roadsign_extract, roadsign_extract_all, RoadsignError};
use combipyr::{Dart, Level, Pyramid, PyramidRecord, VertexId};
use serde_json::json;

/// Build, query and check combinatorial pyramids of raster images.
#[derive(Parser)]
#[command(name = "combipyr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment an image by colour merging and save the pyramid.
    Build {
        #[arg(long)]
        input: PathBuf,
        /// Largest Euclidean RGB distance between merged region means.
        #[arg(long, default_value_t = 24.0)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer a relationship query on one level, as JSON.
    #[command(allow_negative_numbers = true)]
    Query {
        #[command(flatten)]
        at: LevelArgs,
        #[command(flatten)]
        what: QueryKind,
        /// Restrict --report to pairs involving this region.
        #[arg(long, requires = "report")]
        region: Option<i32>,
    },
    /// Write the map or adjacency graph as DOT, or a label image.
    Export {
        #[command(flatten)]
        at: LevelArgs,
        #[arg(long, value_enum)]
        format: ExportFormat,
        /// Output file; text formats go to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract the symbol of a road sign and write its mask.
    Roadsign {
        #[arg(long)]
        input: PathBuf,
        /// Reuse a saved pyramid instead of building one.
        #[arg(long)]
        pyr: Option<PathBuf>,
        #[arg(long, default_value_t = 24.0)]
        threshold: f64,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, value_parser = parse_color, default_value = "250,250,250")]
        background: [u8; 3],
        #[arg(long, value_parser = parse_color, default_value = "20,40,200")]
        symbol: [u8; 3],
        /// Report every innermost sign instead of the best one.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay and check a saved pyramid.
    Validate {
        #[arg(long)]
        pyr: PathBuf,
    },
}

#[derive(Args)]
struct LevelArgs {
    #[arg(long)]
    pyr: PathBuf,
    /// Level index or `top`.
    #[arg(long, default_value = "top")]
    level: String,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct QueryKind {
    /// Does region A contain region B?
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    contains: Option<Vec<i32>>,
    /// Is region A inside region B?
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    inside: Option<Vec<i32>>,
    /// Shared boundaries of A and B with their crack chains.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    meets: Option<Vec<i32>>,
    /// Regions of the level below merged into A.
    #[arg(long, value_name = "A")]
    composed_of: Option<i32>,
    /// Regions reachable inside A.
    #[arg(long, value_name = "A")]
    inside_all: Option<i32>,
    /// Every relationship of the level.
    #[arg(long)]
    report: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    /// The combinatorial map of the level.
    MapDot,
    /// The region adjacency graph.
    RagDot,
    /// A colour image with one colour per region.
    Labels,
}

fn parse_color(s: &str) -> Result<[u8; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected R,G,B, got {s:?}"));
    }
    let mut c = [0u8; 3];
    for (slot, p) in c.iter_mut().zip(parts) {
        *slot = p.trim().parse().map_err(|_| format!("bad channel {p:?}"))?;
    }
    Ok(c)
}

/// Failure classes with their own exit status.
#[derive(Debug)]
enum Failure {
    Invalid(Vec<String>),
    NoSign,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Invalid(p) => write!(f, "{} invariant violation(s)", p.len()),
            Failure::NoSign => write!(f, "no sign found"),
        }
    }
}

impl std::error::Error for Failure {}

fn load_image(path: &Path) -> Result<Image> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Image::parse(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn load_pyramid(path: &Path) -> Result<Pyramid> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let record: PyramidRecord = serde_json::from_str(&text).with_context(|| format!("decoding {}", path.display()))?;
    Pyramid::from_record(&record).with_context(|| format!("loading {}", path.display()))
}

fn level<'p>(pyr: &'p Pyramid, spec: &str) -> Result<Level<'p>> {
    let i = if spec == "top" {
        pyr.top_index()
    } else {
        spec.parse().map_err(|_| anyhow!("level must be a number or `top`, got {spec:?}"))?
    };
    Ok(pyr.level(i)?)
}

/// Any dart id of a region names it; answers use the smallest dart.
fn region(level: &Level, id: i32) -> Result<VertexId> {
    let d = Dart::new(id).ok_or_else(|| anyhow!("0 is not a dart"))?;
    Ok(level.vertex_of(d)?)
}

fn ids(set: impl IntoIterator<Item = VertexId>) -> Vec<i32> {
    set.into_iter().map(|v| v.id()).collect()
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Stable pseudo-random colour per region.
fn label_color(id: i32) -> [u8; 3] {
    let h = (id as u32).wrapping_mul(0x9e37_79b9);
    [(h >> 24) as u8, (h >> 16) as u8, (h >> 8) as u8]
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build { input, threshold, out } => {
            let img = load_image(&input)?;
            let pyr = build_pyramid(&img, threshold)?;
            write_out(&out, serde_json::to_string(&pyr.to_record())?.as_bytes())?;
            eprintln!("levels: {}, regions: {}", pyr.top_index() + 1, pyr.top().regions().len());
        }
        Command::Query { at, what, region: filter } => {
            let pyr = load_pyramid(&at.pyr)?;
            let lv = level(&pyr, &at.level)?;
            let pair = |v: &[i32]| -> Result<(VertexId, VertexId)> { Ok((region(&lv, v[0])?, region(&lv, v[1])?)) };
            let value = if let Some(v) = what.contains {
                let (a, b) = pair(&v)?;
                json!({"level": lv.index(), "a": a, "b": b, "contains": lv.contains_region(a, b)?})
            } else if let Some(v) = what.inside {
                let (a, b) = pair(&v)?;
                json!({"level": lv.index(), "a": a, "b": b, "inside": lv.inside_region(a, b)?})
            } else if let Some(v) = what.meets {
                let (a, b) = pair(&v)?;
                let segs: Vec<SegmentSummary> = lv.meets_each(a, b)?.iter().map(SegmentSummary::from).collect();
                json!({"level": lv.index(), "a": a, "b": b, "meets_exists": !segs.is_empty(), "meets_each": segs})
            } else if let Some(a) = what.composed_of {
                let a = region(&lv, a)?;
                let parts = if lv.index() == 0 { vec![a] } else { lv.composed_of(a)? };
                json!({"level": lv.index(), "a": a, "composed_of": ids(parts)})
            } else if let Some(a) = what.inside_all {
                let a = region(&lv, a)?;
                json!({"level": lv.index(), "a": a, "inside_all": ids(lv.inside_all(a)?)})
            } else {
                let filter = filter.map(|f| region(&lv, f)).transpose()?;
                let report = lv.relation_report(filter)?;
                for w in &report.warnings {
                    eprintln!("warning: {w}");
                }
                serde_json::to_value(report)?
            };
            print_json(&value)?;
        }
        Command::Export { at, format, out } => {
            let pyr = load_pyramid(&at.pyr)?;
            let lv = level(&pyr, &at.level)?;
            let bytes = match format {
                ExportFormat::MapDot => lv.map().to_dot(&format!("level{}", lv.index())).into_bytes(),
                ExportFormat::RagDot => lv.rag()?.to_dot().into_bytes(),
                ExportFormat::Labels => {
                    let grid = pyr.grid();
                    let pixels = lv.pixel_labels().iter().map(|v| label_color(v.id())).collect();
                    Image::new(grid.width() as usize, grid.height() as usize, pixels)?.to_pnm()
                }
            };
            match (out, format) {
                (Some(path), _) => write_out(&path, &bytes)?,
                (None, ExportFormat::Labels) => bail!("--out is required for label images"),
                (None, _) => std::io::stdout().lock().write_all(&bytes)?,
            }
        }
        Command::Roadsign { input, pyr, threshold, k, background, symbol, all, out } => {
            let img = load_image(&input)?;
            let pyr = match pyr {
                Some(p) => load_pyramid(&p)?,
                None => build_pyramid(&img, threshold)?,
            };
            let top = pyr.top();
            let found = if all {
                roadsign_extract_all(&top, &img, k, background, symbol)
            } else {
                roadsign_extract(&top, &img, k, background, symbol).map(|s| vec![s])
            };
            let signs = match found {
                Err(RoadsignError::NoSign) => return Err(Failure::NoSign.into()),
                other => other?,
            };
            let symbols: BTreeSet<VertexId> = signs.iter().flat_map(|s| s.symbol.iter().copied()).collect();
            write_out(&out, &region_mask(&top, &symbols).to_pnm())?;
            let stats = region_stats(&top, &img)?;
            let report: Vec<_> = signs
                .iter()
                .map(|s| {
                    json!({
                        "background": s.background,
                        "symbol": ids(s.symbol.iter().copied()),
                        "score": s.score,
                        "symbol_area": s.symbol_area,
                        "background_bbox": stats[&s.background].bbox,
                    })
                })
                .collect();
            print_json(&serde_json::Value::Array(report))?;
        }
        Command::Validate { pyr } => {
            let pyr = load_pyramid(&pyr)?;
            let problems = pyr.invariant_problems();
            if !problems.is_empty() {
                for p in &problems {
                    eprintln!("{p}");
                }
                return Err(Failure::Invalid(problems).into());
            }
            println!("ok: {} levels, {} darts at the top", pyr.top_index() + 1, pyr.top_map().dart_count());
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
            match e.downcast_ref::<Failure>() {
                Some(Failure::Invalid(_)) => ExitCode::from(3),
                Some(Failure::NoSign) => ExitCode::from(4),
                None => ExitCode::FAILURE,
            }
        }
    }
}
