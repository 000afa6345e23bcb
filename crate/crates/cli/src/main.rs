//! Batch command-line surface: graph generation, spectrum and basis
//! reports, forward/inverse transforms, band filtering, and the
//! self-verification suite.
//!
//! Exit codes: 0 success, 2 validation error, 3 shape/format error,
//! 4 verification failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mgfft::io;
use mgfft::transform::{build_basis, coefficients, fft_forward, fft_inverse, spectral_filter};
use mgfft::{
    eigensolve_delta1, families, primitive_spectrum, BlockOrigin, Branch, Graph, VertexSignal,
};

#[derive(Parser)]
#[command(
    name = "mgfft",
    version,
    about = "Fourier analysis on continuous graphs with equal edge lengths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a named graph family as Graph JSON
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Print the discrete eigenvalues and the primitive frequency table
    Spectrum {
        graph: PathBuf,
        /// Write the spectrum JSON here as well
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write the primitive eigenbasis (frequency blocks) as JSON
    Basis {
        graph: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Forward transform of a signal file (.json or .csv)
    Fft {
        graph: PathBuf,
        signal: PathBuf,
        /// Refinement level; inferred from the signal when omitted
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Inverse transform of a transform file
    Ifft {
        graph: PathBuf,
        dft: PathBuf,
        /// Refinement level; inferred from the block structure when omitted
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Keep only components with eigenvalue below the cutoff
    Filter {
        graph: PathBuf,
        signal: PathBuf,
        /// Keep blocks with lambda < this value
        #[arg(long = "keep-below")]
        keep_below: f64,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the invariant suite on a graph at one refinement level
    Verify {
        graph: PathBuf,
        #[arg(long = "N")]
        n: usize,
        /// Scale factor applied to every residual tolerance
        #[arg(long, default_value_t = 1.0)]
        tolerance: f64,
        /// Write a JSON report here as well
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Complete bipartite K(m,2); the second parameter must be 2
    #[command(name = "k-bipartite")]
    KBipartite {
        m: usize,
        sides: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Cycle graph on V vertices
    Cycle {
        v: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Two triangles joined by a bridge edge
    Bowtie {
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Failures carry the exit code class.
enum Failure {
    Validation(String),
    Format(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Format(_) => 3,
            Failure::Verification(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Format(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<io::IoError> for Failure {
    fn from(err: io::IoError) -> Self {
        match err {
            io::IoError::Graph(e) => Failure::Validation(e.to_string()),
            io::IoError::Format(m) => Failure::Format(m),
        }
    }
}

impl From<mgfft::TransformError> for Failure {
    fn from(err: mgfft::TransformError) -> Self {
        use mgfft::TransformError::*;
        match &err {
            BadLevel { .. } => Failure::Validation(err.to_string()),
            _ => Failure::Format(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Format(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Format(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    Ok(io::read_graph(&read_file(path)?)?)
}

/// Signals come as JSON (self-describing) or CSV (level recovered from the
/// graph shape); an explicit --N must agree.
fn load_signal(path: &Path, graph: &Graph, n: Option<usize>) -> Result<VertexSignal, Failure> {
    let text = read_file(path)?;
    let is_csv = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("csv"));
    let signal = if is_csv {
        let values = io::read_signal_csv(&text)?;
        let level = infer_level(graph, values.len()).ok_or_else(|| {
            Failure::Format(format!(
                "{} samples do not match any refinement of {}",
                values.len(),
                graph.name()
            ))
        })?;
        VertexSignal::new(level, values)
    } else {
        io::read_signal_json(&text)?
    };
    if let Some(n) = n {
        if n != signal.level() {
            return Err(Failure::Format(format!(
                "--N {} disagrees with the signal level {}",
                n,
                signal.level()
            )));
        }
    }
    signal
        .check_shape(graph)
        .map_err(|e| Failure::Format(e.to_string()))?;
    Ok(signal)
}

fn infer_level(graph: &Graph, samples: usize) -> Option<usize> {
    let nv = graph.vertex_count();
    let ne = graph.edge_count();
    if samples < nv || !(samples - nv).is_multiple_of(ne) {
        return None;
    }
    Some((samples - nv) / ne + 1)
}

fn write_signal(path: Option<&Path>, signal: &VertexSignal) -> Result<(), Failure> {
    let is_csv = path
        .and_then(Path::extension)
        .is_some_and(|ext| ext.eq_ignore_ascii_case("csv"));
    let text = if is_csv {
        io::write_signal_csv(signal)
    } else {
        io::write_signal_json(signal)
    };
    emit(path, &text)
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen { family } => {
            let (graph, output) = match family {
                Family::KBipartite { m, sides, output } => {
                    if sides != 2 {
                        return Err(Failure::Validation(format!(
                            "only K(m,2) is supported, got second side {sides}"
                        )));
                    }
                    let graph = families::complete_bipartite(m)
                        .map_err(|e| Failure::Validation(format!("m = {m}: {e}")))?;
                    (graph, output)
                }
                Family::Cycle { v, output } => {
                    let graph = families::cycle(v)
                        .map_err(|e| Failure::Validation(format!("V = {v}: {e}")))?;
                    (graph, output)
                }
                Family::Bowtie { output } => (families::bowtie(), output),
            };
            emit(output.as_deref(), &io::write_graph(&graph))
        }

        Command::Spectrum { graph, output } => {
            let graph = load_graph(&graph)?;
            let spectrum =
                eigensolve_delta1(&graph).map_err(|e| Failure::Validation(e.to_string()))?;
            let primitives =
                primitive_spectrum(&graph).map_err(|e| Failure::Validation(e.to_string()))?;

            let mut table = String::new();
            let _ = writeln!(
                table,
                "graph {}: {} vertices, {} edges",
                graph.name(),
                graph.vertex_count(),
                graph.edge_count()
            );
            let _ = writeln!(table, "mu                     multiplicity");
            for cluster in &spectrum.clusters {
                let _ = writeln!(table, "{:<22.16} {}", cluster.value, cluster.vectors.len());
            }
            let _ = writeln!(table, "primitive frequencies in (0, 2pi]:");
            let _ = writeln!(table, "k  omega                  dim  origin");
            for (k, block) in primitives.blocks.iter().enumerate() {
                let origin = match block.origin {
                    BlockOrigin::Lifted { mu, branch } => format!(
                        "lifted mu={mu:.12} {}",
                        match branch {
                            Branch::Low => "low",
                            Branch::High => "high",
                        }
                    ),
                    BlockOrigin::FlowAndCosine => "flow sines + cosine".into(),
                    BlockOrigin::CycleAndCosine => "cycle sines + cosine".into(),
                };
                let _ = writeln!(
                    table,
                    "{:<2} {:<22.16} {:<4} {origin}",
                    k + 1,
                    block.omega,
                    block.dim()
                );
            }
            print!("{table}");
            if let Some(path) = output {
                emit(Some(&path), &io::write_spectrum(&spectrum))?;
            }
            Ok(())
        }

        Command::Basis { graph, output } => {
            let graph = load_graph(&graph)?;
            let primitives =
                primitive_spectrum(&graph).map_err(|e| Failure::Validation(e.to_string()))?;
            emit(output.as_deref(), &io::write_basis(&primitives))
        }

        Command::Fft {
            graph,
            signal,
            n,
            output,
        } => {
            let graph = load_graph(&graph)?;
            let signal = load_signal(&signal, &graph, n)?;
            let basis = build_basis(&graph, signal.level())?;
            let dft = fft_forward(&signal, &basis)?;
            let coeffs = coefficients(&dft, &basis)?;
            emit(output.as_deref(), &io::write_dft(&dft, &coeffs))
        }

        Command::Ifft {
            graph,
            dft,
            n,
            output,
        } => {
            let graph = load_graph(&graph)?;
            let dft = io::read_dft(&read_file(&dft)?)?;
            let level = match n {
                Some(n) => n,
                None => {
                    let max_shift =
                        dft.blocks.iter().map(|b| b.shift).max().ok_or_else(|| {
                            Failure::Format("transform file has no blocks".into())
                        })?;
                    2 * (max_shift + 1)
                }
            };
            let basis = build_basis(&graph, level)?;
            let signal = fft_inverse(&dft, &basis)?;
            write_signal(output.as_deref(), &signal)
        }

        Command::Filter {
            graph,
            signal,
            keep_below,
            n,
            output,
        } => {
            let graph = load_graph(&graph)?;
            let signal = load_signal(&signal, &graph, n)?;
            let basis = build_basis(&graph, signal.level())?;
            let filtered = spectral_filter(&signal, &basis, |lambda| lambda < keep_below)?;
            write_signal(output.as_deref(), &filtered)
        }

        Command::Verify {
            graph,
            n,
            tolerance,
            output,
        } => {
            if !n.is_power_of_two() || n < 4 {
                return Err(Failure::Validation(format!(
                    "N must be a power of two >= 4, got {n}"
                )));
            }
            if tolerance.is_nan() || tolerance <= 0.0 {
                return Err(Failure::Validation(format!(
                    "tolerance scale must be positive, got {tolerance}"
                )));
            }
            let graph = load_graph(&graph)?;
            let report = mgfft::verify::run(&graph, n, tolerance);
            let mut lines = String::new();
            for check in &report.checks {
                let status = if check.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    lines,
                    "{status} {:<40} residual {:>12.3e} tolerance {:>12.3e}{}",
                    check.name,
                    check.residual,
                    check.tolerance,
                    check
                        .detail
                        .as_deref()
                        .map(|d| format!("  [{d}]"))
                        .unwrap_or_default()
                );
            }
            let summary = format!(
                "{}: {} checks, {} failed (graph {}, N = {})\n",
                if report.passed() { "ok" } else { "FAILED" },
                report.checks.len(),
                report.checks.iter().filter(|c| !c.passed).count(),
                report.graph,
                report.level
            );
            print!("{lines}{summary}");
            if let Some(path) = output {
                emit(Some(&path), &report_json(&report))?;
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "{} invariant(s) failed on {} at N = {}",
                    report.checks.iter().filter(|c| !c.passed).count(),
                    report.graph,
                    report.level
                )))
            }
        }
    }
}

fn report_json(report: &mgfft::verify::Report) -> String {
    let checks: Vec<String> = report
        .checks
        .iter()
        .map(|c| {
            format!(
                "{{\"name\":\"{}\",\"passed\":{},\"residual\":{},\"tolerance\":{}}}",
                c.name,
                c.passed,
                if c.residual.is_finite() {
                    io::format_f64(c.residual)
                } else {
                    "1e999".into()
                },
                io::format_f64(c.tolerance)
            )
        })
        .collect();
    format!(
        "{{\"graph\":\"{}\",\"N\":{},\"passed\":{},\"checks\":[{}]}}\n",
        report.graph,
        report.level,
        report.passed(),
        checks.join(",")
    )
}
