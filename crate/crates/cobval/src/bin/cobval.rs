//! cobval command-line interface.

use clap::{Parser, Subcommand};
use cobval::emitter::{emit_test_scaffold, parse_bundle};
use cobval::frontend::parse_program;
use cobval::harness::{pipeline, HarnessConfig, PipelineConfig, PipelineInputs};
use cobval::ir::{dump, lower, ExternalCall};
use cobval::mapper::{derive_var_arg_map, match_calls, CjResourceMap, MatchConfig, TargetManifest};
use cobval::runner::{execute_suite, RunConfig};
use cobval::solver::{export_smtlib, solve, ConstraintSet, SolveOutcome, SolverConfig};
use cobval::testgen::{generate_tests, GenConfig, TestSuite};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(
    name = "cobval",
    version,
    about = "Validate COBOL-to-X translations with generated, resource-mocked unit tests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a program and report diagnostics.
    Parse {
        #[arg(long)]
        program: PathBuf,
    },
    /// IR inspection.
    Ir {
        #[command(subcommand)]
        command: IrCommand,
    },
    /// Generate a test suite for one paragraph.
    Testgen {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        paragraph: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_unroll: u32,
        #[arg(long, default_value_t = 512)]
        max_paths: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide a constraint set from a JSON file.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        /// Also export the set as SMT-LIB 2 text.
        #[arg(long)]
        smtlib: Option<PathBuf>,
    },
    /// Execute a suite against the mocked in-process oracle.
    RunOracle {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        paragraph: String,
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Align classified resource calls with a target manifest.
    Map {
        /// JSON list of classified calls (`calls.json` from a pipeline run)
        /// or a `.cbl` source file to classify on the fly.
        #[arg(long)]
        calls: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        patterns: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render scaffold files from a bundle.
    Emit {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, default_value = "jvm-junit")]
        profile: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full pipeline: parse, generate, run the oracle, match, bundle,
    /// drive the adapter, and report.
    Validate {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        paragraph: String,
        #[arg(long)]
        cjmap: PathBuf,
        #[arg(long)]
        patterns: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// Adapter command line, e.g. "target/debug/fixture-adapter chann11 correct".
        #[arg(long)]
        adapter: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_unroll: u32,
        /// Adapter timeout in seconds.
        #[arg(long, default_value_t = 30)]
        timeout: u64,
        /// Worker pool size (defaults to the CPU count).
        #[arg(long)]
        workers: Option<usize>,
        /// Reuse one adapter process for the whole suite.
        #[arg(long)]
        batch: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum IrCommand {
    /// Emit the CFGs as JSON and Graphviz text.
    Dump {
        #[arg(long)]
        program: PathBuf,
        /// Write <out>.json and <out>.dot instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn load_program(path: &PathBuf) -> Result<cobval::frontend::ProgramAst, String> {
    let source = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_program(&source).map_err(|diags| {
        diags
            .iter()
            .map(|d| d.render(&name))
            .collect::<Vec<_>>()
            .join("\n")
    })
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Parse { program } => {
            let ast = load_program(&program)?;
            println!(
                "{}: {} data items, {} paragraphs",
                ast.program_id,
                ast.leaf_items().len(),
                ast.paragraphs.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Ir { command } => match command {
            IrCommand::Dump { program, out } => {
                let ast = load_program(&program)?;
                let ir = lower(&ast).map_err(|e| e.to_string())?;
                let json = dump::to_json(&ir);
                let dot = dump::to_dot(&ir);
                match out {
                    Some(base) => {
                        fs::write(base.with_extension("json"), json)
                            .map_err(|e| e.to_string())?;
                        fs::write(base.with_extension("dot"), dot).map_err(|e| e.to_string())?;
                    }
                    None => {
                        println!("{json}");
                        println!("{dot}");
                    }
                }
                for w in &ir.warnings {
                    eprintln!("warning: {w}");
                }
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Testgen {
            program,
            paragraph,
            seed,
            max_unroll,
            max_paths,
            out,
        } => {
            let ast = load_program(&program)?;
            let ir = lower(&ast).map_err(|e| e.to_string())?;
            let config = GenConfig {
                seed,
                max_unroll,
                max_paths,
                ..Default::default()
            };
            let (suite, report) =
                generate_tests(&ir, &paragraph, &config).map_err(|e| e.to_string())?;
            fs::write(
                &out,
                serde_json::to_string_pretty(&suite).map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            println!(
                "{} tests, {:.0}% branches, {:.0}% bounded paths",
                suite.tests.len(),
                report.branches_pct(),
                report.paths_pct()
            );
            if !report.uncovered_edges.is_empty() {
                eprintln!("coverage incomplete: {:?}", report.uncovered_edges);
                return Ok(ExitCode::FAILURE);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { input, smtlib } => {
            let text =
                fs::read_to_string(&input).map_err(|e| format!("{}: {e}", input.display()))?;
            let cs: ConstraintSet = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            if let Some(path) = smtlib {
                fs::write(&path, export_smtlib(&cs)).map_err(|e| e.to_string())?;
            }
            match solve(&cs, &SolverConfig::default()).map_err(|e| e.to_string())? {
                SolveOutcome::Sat(assignment) => {
                    for (sym, value) in &assignment {
                        let rendered = match value {
                            cobval::value::Value::Num(n) => n.to_string(),
                            cobval::value::Value::Str(s) => format!("'{s}'"),
                        };
                        println!("{sym} = {rendered}");
                    }
                    println!("sat");
                }
                SolveOutcome::Unsat => println!("unsat"),
                SolveOutcome::Unknown(steps) => println!("unknown after {steps} steps"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::RunOracle {
            program,
            paragraph,
            suite,
            out,
        } => {
            let ast = load_program(&program)?;
            let ir = lower(&ast).map_err(|e| e.to_string())?;
            let text =
                fs::read_to_string(&suite).map_err(|e| format!("{}: {e}", suite.display()))?;
            let suite: TestSuite = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            if suite.paragraph != paragraph {
                return Err(format!(
                    "suite was generated for paragraph {}, not {paragraph}",
                    suite.paragraph
                ));
            }
            let filled = execute_suite(&ir, &suite, &RunConfig::default());
            fs::write(
                &out,
                serde_json::to_string_pretty(&filled).map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            println!("filled {} tests", filled.tests.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Map {
            calls,
            manifest,
            patterns,
            out,
        } => {
            let calls: Vec<ExternalCall> =
                if calls.extension().and_then(|e| e.to_str()) == Some("cbl") {
                    let ast = load_program(&calls)?;
                    lower(&ast).map_err(|e| e.to_string())?.external_calls
                } else {
                    read_json(&calls)?
                };
            let manifest: TargetManifest = read_json(&manifest)?;
            let patterns: CjResourceMap = read_json(&patterns)?;
            let config = MatchConfig::default();
            let matching = match_calls(&calls, &manifest.sequences, &patterns, &config);
            let matching =
                derive_var_arg_map(matching, &calls, &manifest.sequences, &patterns, &config);
            fs::write(
                &out,
                serde_json::to_string_pretty(&matching).map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            println!(
                "{} pairs, {} unmatched source, {} unmatched target",
                matching.pairs.len(),
                matching.unmatched_source.len(),
                matching.unmatched_target.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Emit {
            bundle,
            profile,
            out,
        } => {
            let text =
                fs::read_to_string(&bundle).map_err(|e| format!("{}: {e}", bundle.display()))?;
            let bundle = parse_bundle(&text).map_err(|e| e.to_string())?;
            let files = emit_test_scaffold(&bundle, &profile).map_err(|e| e.to_string())?;
            fs::create_dir_all(&out).map_err(|e| e.to_string())?;
            for (name, content) in files {
                fs::write(out.join(&name), content).map_err(|e| e.to_string())?;
                println!("wrote {name}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate {
            program,
            paragraph,
            cjmap,
            patterns,
            manifest,
            adapter,
            seed,
            max_unroll,
            timeout,
            workers,
            batch,
            out,
        } => {
            let config = PipelineConfig {
                gen: GenConfig {
                    seed,
                    max_unroll,
                    ..Default::default()
                },
                harness: HarnessConfig {
                    timeout: Duration::from_secs(timeout),
                    workers: workers.unwrap_or_else(|| {
                        std::thread::available_parallelism()
                            .map(|n| n.get())
                            .unwrap_or(1)
                    }),
                    batch,
                },
                profile: Some("jvm-junit".to_string()),
                ..Default::default()
            };
            let inputs = PipelineInputs {
                program_path: program,
                paragraph,
                cjmap_path: cjmap,
                patterns_path: patterns,
                manifest_path: manifest,
                adapter_cmd: adapter,
                out_dir: out.clone(),
            };
            let report = pipeline(&inputs, &config).map_err(|e| e.to_string())?;
            print!("{}", cobval::harness::render_markdown(&report));
            let all_passed = report.tests.iter().all(|t| t.passed);
            if report.tests.is_empty() || all_passed {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}
