//! End-to-end orchestration with persisted intermediates.

use super::{render_json, render_markdown, validate, HarnessConfig, ValidationReport};
use crate::emitter::{build_bundle, emit_bundle, emit_test_scaffold, CjMap};
use crate::frontend::parse_program;
use crate::ir::{dump, lower};
use crate::mapper::{derive_var_arg_map, match_calls, CjResourceMap, MatchConfig, TargetManifest};
use crate::runner::{execute_suite, RunConfig};
use crate::testgen::{generate_tests, GenConfig};
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
#[error("stage {stage}: {detail}")]
pub struct StageError {
    pub stage: &'static str,
    pub detail: String,
}

fn stage_err<E: std::fmt::Display>(stage: &'static str) -> impl Fn(E) -> StageError {
    move |e| StageError {
        stage,
        detail: e.to_string(),
    }
}

#[derive(Clone, Debug, Default)]
pub struct PipelineConfig {
    pub gen: GenConfig,
    pub run: RunConfig,
    pub matching: MatchConfig,
    pub harness: HarnessConfig,
    /// Scaffold profile to render, e.g. `jvm-junit`; skipped when absent.
    pub profile: Option<String>,
}

#[derive(Clone, Debug)]
pub struct PipelineInputs {
    pub program_path: PathBuf,
    pub paragraph: String,
    pub cjmap_path: PathBuf,
    pub patterns_path: PathBuf,
    pub manifest_path: PathBuf,
    /// Adapter command line; no validation stage when absent.
    pub adapter_cmd: Option<String>,
    pub out_dir: PathBuf,
}

fn write_artifact(out_dir: &Path, name: &str, content: &str) -> Result<(), StageError> {
    fs::create_dir_all(out_dir).map_err(stage_err("persist"))?;
    fs::write(out_dir.join(name), content).map_err(stage_err("persist"))
}

/// parse → lower → testgen → oracle → match → plan → bundle → validate →
/// report. Every intermediate is persisted under `out_dir`; a failing stage
/// aborts with its name, leaving earlier artifacts on disk.
pub fn pipeline(
    inputs: &PipelineInputs,
    config: &PipelineConfig,
) -> Result<ValidationReport, StageError> {
    let out = &inputs.out_dir;
    let source = fs::read_to_string(&inputs.program_path).map_err(stage_err("parse"))?;
    let file_name = inputs
        .program_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "program.cbl".to_string());
    let ast = parse_program(&source).map_err(|diags| StageError {
        stage: "parse",
        detail: diags
            .iter()
            .map(|d| d.render(&file_name))
            .collect::<Vec<_>>()
            .join("\n"),
    })?;

    let ir = lower(&ast).map_err(stage_err("lower"))?;
    write_artifact(out, "ir.json", &dump::to_json(&ir))?;
    write_artifact(out, "ir.dot", &dump::to_dot(&ir))?;
    write_artifact(
        out,
        "calls.json",
        &serde_json::to_string_pretty(&ir.external_calls).map_err(stage_err("lower"))?,
    )?;

    let (suite, coverage) =
        generate_tests(&ir, &inputs.paragraph, &config.gen).map_err(stage_err("testgen"))?;
    write_artifact(
        out,
        "suite.json",
        &serde_json::to_string_pretty(&suite).map_err(stage_err("testgen"))?,
    )?;
    write_artifact(
        out,
        "coverage.json",
        &serde_json::to_string_pretty(&coverage).map_err(stage_err("testgen"))?,
    )?;

    let suite = execute_suite(&ir, &suite, &config.run);
    write_artifact(
        out,
        "suite.filled.json",
        &serde_json::to_string_pretty(&suite).map_err(stage_err("oracle"))?,
    )?;

    let cjmap: CjMap = read_json(&inputs.cjmap_path, "map")?;
    let patterns: CjResourceMap = read_json(&inputs.patterns_path, "map")?;
    let manifest: TargetManifest = read_json(&inputs.manifest_path, "map")?;
    let matching = match_calls(
        &ir.external_calls,
        &manifest.sequences,
        &patterns,
        &config.matching,
    );
    let matching = derive_var_arg_map(
        matching,
        &ir.external_calls,
        &manifest.sequences,
        &patterns,
        &config.matching,
    );
    write_artifact(
        out,
        "matching.json",
        &serde_json::to_string_pretty(&matching).map_err(stage_err("map"))?,
    )?;

    let bundle = build_bundle(&ir, &suite, &coverage, &cjmap, &matching, &config.gen)
        .map_err(stage_err("plan"))?;
    write_artifact(out, "bundle.json", &emit_bundle(&bundle).map_err(stage_err("plan"))?)?;

    if let Some(profile) = &config.profile {
        let files = emit_test_scaffold(&bundle, profile).map_err(stage_err("scaffold"))?;
        let dir = out.join("scaffold");
        fs::create_dir_all(&dir).map_err(stage_err("scaffold"))?;
        for (name, content) in files {
            fs::write(dir.join(name), content).map_err(stage_err("scaffold"))?;
        }
    }

    let report = match &inputs.adapter_cmd {
        Some(cmd) => {
            let argv = super::split_command(cmd);
            validate(&bundle, &argv, &config.harness).map_err(stage_err("validate"))?
        }
        None => {
            // no adapter: report carries generation-side columns only
            let row = super::summarize(&bundle, &[]);
            ValidationReport {
                rows: vec![row],
                tests: vec![],
            }
        }
    };
    write_artifact(out, "report.json", &render_json(&report))?;
    write_artifact(out, "report.md", &render_markdown(&report))?;
    Ok(report)
}

fn read_json<T: serde::de::DeserializeOwned>(
    path: &Path,
    stage: &'static str,
) -> Result<T, StageError> {
    let text = fs::read_to_string(path).map_err(|e| StageError {
        stage,
        detail: format!("{}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| StageError {
        stage,
        detail: format!("{}: {e}", path.display()),
    })
}
