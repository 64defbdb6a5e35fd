//! Command-line front end. `run_cli` maps every outcome to an exit code:
//! 0 for yes/valid, 1 for no/invalid, 2 for usage or I/O errors.

pub mod embedding;
pub mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use twopage::dp::{decide_subham_with, witness_to_embedding, DpOptions, DpStats};
use twopage::gen;
use twopage::graph::parse_graph;
use twopage::kernel::{kernelize_multi_page, kernelize_two_page, MultiPageOptions};
use twopage::oracle::{brute_force_book_thickness, verify_embedding, DEFAULT_SUBHAM_CAP, MULTI_PAGE_CAP};
use twopage::MultiGraph;

pub use embedding::{embedding_from_json, embedding_to_json};
pub use svg::render_svg;

#[derive(Parser, Debug)]
#[command(name = "twopage", version, about = "Decide and draw two-page book embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Number of pages.
    #[arg(long, default_value_t = 2)]
    pages: usize,
    /// Write a JSON run report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide two-page embeddability with the dynamic program.
    Decide {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Decide every block by the type tables, skipping the verified
        /// cycle search.
        #[arg(long)]
        exact: bool,
    },
    /// Decide and emit a two-page embedding as JSON and SVG.
    Embed {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        exact: bool,
        /// Embedding JSON output (stdout if absent).
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Reduce to a kernel and print it as an edge list.
    Kernelize {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Kernel trace JSON output.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Exhaustive search over spine orders.
    Oracle {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Largest vertex count the search accepts.
        #[arg(long)]
        cap: Option<usize>,
        /// Embedding JSON output on yes.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Check an embedding file against a graph.
    Verify {
        graph: PathBuf,
        embedding: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print a generated instance as an edge list.
    Gen {
        kind: Kind,
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Extra edges over a spanning tree for `random-fen`.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Also write the graph in JSON form here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Draw an embedding file as SVG.
    Render {
        graph: PathBuf,
        embedding: PathBuf,
        #[command(flatten)]
        common: Common,
        /// SVG output (stdout if absent).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Cycle,
    Theta,
    PlanarDeg4,
    RandomFen,
}

#[derive(Serialize, Default)]
struct Timings {
    parse_ms: f64,
    blocks_ms: f64,
    spqr_ms: f64,
    spherecut_ms: f64,
    dp_ms: f64,
    total_ms: f64,
}

#[derive(Serialize)]
struct KernelSizes {
    input_vertices: usize,
    input_edges: usize,
    vertices: usize,
    edges: usize,
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    pages: usize,
    verdict: String,
    timings: Timings,
    #[serde(skip_serializing_if = "Option::is_none")]
    tables: Option<DpStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kernel: Option<KernelSizes>,
    artifacts: Vec<PathBuf>,
}

impl RunReport {
    fn new(command: &'static str, pages: usize) -> Self {
        RunReport { command, pages, verdict: String::new(), timings: Timings::default(), tables: None, kernel: None, artifacts: Vec::new() }
    }

    fn with_stats(&mut self, s: DpStats) {
        self.timings.blocks_ms = s.blocks_ms;
        self.timings.spqr_ms = s.spqr_ms;
        self.timings.spherecut_ms = s.spherecut_ms;
        self.timings.dp_ms = s.dp_ms;
        self.tables = Some(s);
    }
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(yes) => {
            if yes {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_graph(path: &Path) -> Result<MultiGraph> {
    parse_graph(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn write_file(path: &Path, text: &str, report: &mut RunReport) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    report.artifacts.push(path.to_path_buf());
    Ok(())
}

fn print(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn finish(report: RunReport, path: Option<&PathBuf>, t0: Instant) -> Result<()> {
    let mut report = report;
    report.timings.total_ms = t0.elapsed().as_secs_f64() * 1e3;
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(&report)? + "\n";
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn two_pages_only(pages: usize, what: &str) -> Result<()> {
    if pages != 2 {
        bail!("`{what}` handles two pages only; use `oracle --pages {pages}` for other page counts");
    }
    Ok(())
}

fn verdict(yes: bool) -> &'static str {
    if yes {
        "yes"
    } else {
        "no"
    }
}

fn run(cmd: Command) -> Result<bool> {
    let t0 = Instant::now();
    match cmd {
        Command::Decide { graph, common, exact } => {
            two_pages_only(common.pages, "decide")?;
            let g = read_graph(&graph)?;
            let mut report = RunReport::new("decide", 2);
            report.timings.parse_ms = t0.elapsed().as_secs_f64() * 1e3;
            let opts = DpOptions { witness: false, ..if exact { DpOptions::exact() } else { DpOptions::default() } };
            let d = decide_subham_with(&g, &opts)?;
            println!("{}", verdict(d.subhamiltonian));
            report.verdict = verdict(d.subhamiltonian).into();
            report.with_stats(d.stats);
            finish(report, common.report.as_ref(), t0)?;
            Ok(d.subhamiltonian)
        }
        Command::Embed { graph, common, exact, json, svg } => {
            two_pages_only(common.pages, "embed")?;
            let g = read_graph(&graph)?;
            let mut report = RunReport::new("embed", 2);
            report.timings.parse_ms = t0.elapsed().as_secs_f64() * 1e3;
            let opts = if exact { DpOptions::exact() } else { DpOptions::default() };
            let d = decide_subham_with(&g, &opts)?;
            report.verdict = verdict(d.subhamiltonian).into();
            let yes = d.subhamiltonian;
            if let Some(w) = &d.witness {
                let emb = witness_to_embedding(&g, w)?;
                let text = embedding_to_json(&emb);
                match &json {
                    Some(p) => write_file(p, &text, &mut report)?,
                    None => print(&text)?,
                }
                if let Some(p) = &svg {
                    write_file(p, &render_svg(&g, &emb, 2)?, &mut report)?;
                }
            } else {
                println!("no");
            }
            report.with_stats(d.stats);
            finish(report, common.report.as_ref(), t0)?;
            Ok(yes)
        }
        Command::Kernelize { graph, common, json } => {
            let g = read_graph(&graph)?;
            let mut report = RunReport::new("kernelize", common.pages);
            let (k, trace) = match common.pages {
                2 => kernelize_two_page(&g)?,
                p if p >= 3 => kernelize_multi_page(&g, p, MultiPageOptions::default())?,
                p => bail!("kernels need at least two pages, got {p}"),
            };
            print(&k.to_edge_list())?;
            if let Some(p) = &json {
                write_file(p, &(trace.to_json() + "\n"), &mut report)?;
            }
            report.verdict = "reduced".into();
            report.kernel = Some(KernelSizes { input_vertices: g.n(), input_edges: g.m(), vertices: k.n(), edges: k.m() });
            finish(report, common.report.as_ref(), t0)?;
            Ok(true)
        }
        Command::Oracle { graph, common, cap, json, svg } => {
            let g = read_graph(&graph)?;
            let mut report = RunReport::new("oracle", common.pages);
            if common.pages == 0 {
                bail!("page count must be positive");
            }
            let cap = cap.unwrap_or(if common.pages == 2 { DEFAULT_SUBHAM_CAP } else { MULTI_PAGE_CAP });
            let found = brute_force_book_thickness(&g, common.pages, cap)?;
            println!("{}", verdict(found.is_some()));
            if let Some(emb) = &found {
                if let Some(p) = &json {
                    write_file(p, &embedding_to_json(emb), &mut report)?;
                }
                if let Some(p) = &svg {
                    write_file(p, &render_svg(&g, emb, common.pages)?, &mut report)?;
                }
            }
            report.verdict = verdict(found.is_some()).into();
            finish(report, common.report.as_ref(), t0)?;
            Ok(found.is_some())
        }
        Command::Verify { graph, embedding, common } => {
            let g = read_graph(&graph)?;
            let emb = embedding_from_json(&read_text(&embedding)?, g.m())?;
            let ok = verify_embedding(&g, &emb, common.pages);
            println!("{}", if ok { "valid" } else { "invalid" });
            let mut report = RunReport::new("verify", common.pages);
            report.verdict = if ok { "valid" } else { "invalid" }.into();
            finish(report, common.report.as_ref(), t0)?;
            Ok(ok)
        }
        Command::Gen { kind, n, seed, k, json } => {
            let g = match kind {
                Kind::Cycle => gen::cycle(n),
                Kind::Theta => gen::theta(n),
                Kind::PlanarDeg4 => gen::planar_deg4(n, seed)?,
                Kind::RandomFen => gen::random_fen(n, k, seed)?,
            };
            print(&g.to_edge_list())?;
            if let Some(p) = &json {
                fs::write(p, g.to_json() + "\n").with_context(|| format!("writing {}", p.display()))?;
            }
            Ok(true)
        }
        Command::Render { graph, embedding, common, svg } => {
            let g = read_graph(&graph)?;
            let emb = embedding_from_json(&read_text(&embedding)?, g.m())?;
            let text = render_svg(&g, &emb, common.pages)?;
            let mut report = RunReport::new("render", common.pages);
            match &svg {
                Some(p) => write_file(p, &text, &mut report)?,
                None => print(&text)?,
            }
            report.verdict = "rendered".into();
            finish(report, common.report.as_ref(), t0)?;
            Ok(true)
        }
    }
}
