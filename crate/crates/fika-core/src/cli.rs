//! Run configuration, the five pipeline commands, and their artifact files.
//!
//! Every command reads its inputs from a [`RunConfig`] and persists one JSON
//! artifact per stage into the output directory: `inventory.json`,
//! `coverage.json`, `outcomes.json`, `metrics.json` and `triage.json`.
//! Reports are rebuilt purely from those files.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coverage::{parse_lcov, CoverageMap};
use crate::graph::{build_cha, dump_graph, enumerate_paths, CallPath};
use crate::model::dsl::parse_fixture_dsl;
use crate::model::json::parse_model_json;
use crate::model::{MethodId, ProjectModel};
use crate::report::{
    compute_metrics_from_sets, metrics_csv, paths_csv, Fraction, MetricsReport, SiteKey,
};
use crate::scenario::adapter::{CommandAdapter, ExecutionAdapter};
use crate::scenario::engine::run_generation_queue;
use crate::scenario::fixture::FixtureAdapter;
use crate::scenario::provider::{provider_from_spec, ProviderSpec};
use crate::scenario::{OutcomeStatus, PromptConfig, PromptMode, ScenarioOutcome};
use crate::triage::{parse_rules, triage_csv, triage_rules, TriageRow};

pub const DEFAULT_OUT_DIR: &str = "fika-out";

/// Settings for one pipeline run, loadable from a JSON config file with
/// command-line overrides on top.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Code model path; `.fika` parses as the fixture DSL, anything else as JSON.
    pub model: Option<String>,
    /// LCOV files with developer-test coverage.
    pub coverage: Vec<String>,
    /// Artifact directory.
    pub out: String,
    pub mode: PromptMode,
    pub max_attempts: u32,
    pub workers: usize,
    pub prompt_char_cap: usize,
    /// `mock:<dir>` or `http`.
    pub provider: Option<String>,
    pub base_url: Option<String>,
    /// Model name sent to an HTTP provider.
    pub llm_model: Option<String>,
    pub api_key_env: Option<String>,
    /// Execution adapter command; empty runs the built-in fixture adapter
    /// in-process against the loaded model.
    pub adapter: Vec<String>,
    /// Project root handed to the adapter.
    pub project_root: Option<String>,
    /// Vulnerability rules file for `triage`.
    pub rules: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: None,
            coverage: Vec::new(),
            out: DEFAULT_OUT_DIR.to_string(),
            mode: PromptMode::Full,
            max_attempts: crate::scenario::DEFAULT_MAX_ATTEMPTS,
            workers: 1,
            prompt_char_cap: crate::scenario::DEFAULT_PROMPT_CHAR_CAP,
            provider: None,
            base_url: None,
            llm_model: None,
            api_key_env: None,
            adapter: Vec::new(),
            project_root: None,
            rules: None,
        }
    }
}

impl RunConfig {
    /// Reads a config file and checks the basic invariants.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::data(format!("cannot read config {}: {e}", path.display())))?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::data(format!("config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.max_attempts == 0 {
            return Err(CliError::data("max_attempts must be at least 1"));
        }
        if self.workers == 0 {
            return Err(CliError::data("workers must be at least 1"));
        }
        Ok(())
    }

    fn prompt_config(&self) -> PromptConfig {
        PromptConfig {
            mode: self.mode,
            max_attempts: self.max_attempts,
            prompt_char_cap: self.prompt_char_cap,
        }
    }

    fn out_dir(&self) -> &Path {
        Path::new(&self.out)
    }

    fn model_path(&self) -> Result<&str, CliError> {
        self.model
            .as_deref()
            .ok_or_else(|| CliError::data("no model configured (use --model or the config file)"))
    }
}

/// Command failure carrying the process exit code: 2 for input and format
/// problems, 1 for runtime failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    pub fn data(message: impl Into<String>) -> Self {
        CliError {
            exit_code: 2,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError {
            exit_code: 1,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Loads a model file, dispatching on the `.fika` extension.
pub fn load_model(path: &str) -> Result<ProjectModel, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read model {path}: {e}")))?;
    if Path::new(path).extension().is_some_and(|e| e == "fika") {
        parse_fixture_dsl(&text).map_err(|e| CliError::data(format!("{path}: {e}")))
    } else {
        parse_model_json(&text).map_err(|e| CliError::data(format!("{path}: {e}")))
    }
}

fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, content)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::runtime(format!("cannot serialize {name}: {e}")))?;
    text.push('\n');
    write_artifact(dir, name, &text)
}

fn read_artifact(dir: &Path, name: &str) -> Result<String, CliError> {
    fs::read_to_string(dir.join(name))
        .map_err(|e| CliError::data(format!("missing artifact {name} in {}: {e}", dir.display())))
}

/// One inventory row per (entry, m_dp, m_tpl) shortest path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRow {
    pub entry: MethodId,
    pub hops: Vec<MethodId>,
    pub m_dp: MethodId,
    pub m_tpl: MethodId,
    pub file: Option<String>,
    pub line: u32,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InventoryDoc {
    pub project: String,
    pub warnings: Vec<String>,
    pub paths: Vec<PathRow>,
}

fn path_row(model: &ProjectModel, path: &CallPath) -> PathRow {
    PathRow {
        entry: path.entry.clone(),
        hops: path.hops.clone(),
        m_dp: path.direct_caller.clone(),
        m_tpl: path.target.clone(),
        file: model.file_of_method(&path.direct_caller).map(str::to_string),
        line: path.line,
        length: path.length(),
    }
}

/// Assembles the inventory document from an analyzed model.
pub fn inventory_doc(
    model: &ProjectModel,
    graph: &crate::graph::CallGraph,
    paths: &[CallPath],
) -> InventoryDoc {
    InventoryDoc {
        project: model.project_id.clone(),
        warnings: graph
            .warnings
            .iter()
            .map(|w| format!("{} @{}: {}", w.site, w.line, w.reason))
            .collect(),
        paths: paths.iter().map(|p| path_row(model, p)).collect(),
    }
}

/// Builds the call graph and writes the path inventory; optionally dumps the
/// graph edges to `callgraph.txt`.
pub fn cmd_analyze(config: &RunConfig, dump: bool) -> Result<InventoryDoc, CliError> {
    let model = load_model(config.model_path()?)?;
    let graph = build_cha(&model);
    let paths = enumerate_paths(&model, &graph);

    let doc = inventory_doc(&model, &graph, &paths);
    write_json(config.out_dir(), "inventory.json", &doc)?;
    if dump {
        write_artifact(config.out_dir(), "callgraph.txt", &dump_graph(&graph))?;
    }
    Ok(doc)
}

/// One coverage verdict per physical tpl call site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteRow {
    pub caller: MethodId,
    pub ordinal: usize,
    pub file: Option<String>,
    pub line: u32,
    pub covered: bool,
    pub targets: Vec<MethodId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageDoc {
    pub provenance: Vec<String>,
    /// Covered (m_dp, m_tpl) pairs over all pairs.
    pub summary: String,
    pub sites: Vec<SiteRow>,
}

fn load_dev_coverage(config: &RunConfig) -> Result<CoverageMap, CliError> {
    let mut merged = CoverageMap::default();
    for path in &config.coverage {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::data(format!("cannot read coverage {path}: {e}")))?;
        let map = parse_lcov(&text).map_err(|e| CliError::data(format!("{path}: {e}")))?;
        merged.merge(&map.with_label(path));
    }
    Ok(merged)
}

/// Assembles the coverage document for a model and a merged coverage map.
pub fn coverage_doc(model: &ProjectModel, coverage: &CoverageMap) -> CoverageDoc {
    let mut sites = Vec::new();
    for site in model.tpl_call_sites() {
        let file = model.file_of_method(&site.site.caller).map(str::to_string);
        let covered = file
            .as_deref()
            .is_some_and(|f| coverage.is_covered(f, site.line));
        sites.push(SiteRow {
            caller: site.site.caller.clone(),
            ordinal: site.site.ordinal,
            file,
            line: site.line,
            covered,
            targets: site.tpl_targets.clone(),
        });
    }

    let pairs = crate::report::all_site_pairs(model);
    let covered_pairs = crate::report::pairs_covered_by(coverage, model);
    CoverageDoc {
        provenance: coverage.provenance.clone(),
        summary: Fraction::new(covered_pairs.len(), pairs.len()).label,
        sites,
    }
}

/// Checks developer coverage against every tpl call site.
pub fn cmd_coverage(config: &RunConfig) -> Result<CoverageDoc, CliError> {
    let model = load_model(config.model_path()?)?;
    let coverage = load_dev_coverage(config)?;
    let doc = coverage_doc(&model, &coverage);
    write_json(config.out_dir(), "coverage.json", &doc)?;
    Ok(doc)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomesDoc {
    pub max_attempts: u32,
    pub iteration_successes: Vec<usize>,
    pub outcomes: Vec<ScenarioOutcome>,
}

/// Runs scenario generation for every uncovered site and refreshes the
/// metrics artifact.
pub fn cmd_generate(config: &RunConfig) -> Result<OutcomesDoc, CliError> {
    config.validate()?;
    let model = load_model(config.model_path()?)?;
    let graph = build_cha(&model);
    let all_paths = enumerate_paths(&model, &graph);
    let dev_coverage = load_dev_coverage(config)?;

    // Skip every path whose (m_dp, m_tpl) pair developer tests already cover
    // at any physical call line.
    let covered_pairs = crate::report::pairs_covered_by(&dev_coverage, &model);
    let paths: Vec<CallPath> = all_paths
        .into_iter()
        .filter(|p| !covered_pairs.contains(&(p.direct_caller.clone(), p.target.clone())))
        .collect();

    let provider_name = config
        .provider
        .as_deref()
        .ok_or_else(|| CliError::data("no llm provider configured"))?;
    let spec = ProviderSpec {
        provider: provider_name.to_string(),
        base_url: config.base_url.clone(),
        model: config.llm_model.clone(),
        api_key_env: config.api_key_env.clone(),
    };
    let provider = provider_from_spec(&spec).map_err(|e| CliError::data(e.to_string()))?;

    let adapter: Box<dyn ExecutionAdapter> = if config.adapter.is_empty() {
        Box::new(FixtureAdapter::new(model.clone()))
    } else {
        Box::new(CommandAdapter::new(config.adapter.clone()))
    };

    let scenario_dir = config.out_dir().join("scenarios");
    let project_root = PathBuf::from(config.project_root.as_deref().unwrap_or("."));
    let result = run_generation_queue(
        &model,
        &paths,
        &dev_coverage,
        &config.prompt_config(),
        provider.as_ref(),
        adapter.as_ref(),
        &scenario_dir,
        &project_root,
        config.workers,
    );

    let doc = OutcomesDoc {
        max_attempts: config.max_attempts,
        iteration_successes: result.iteration_successes.clone(),
        outcomes: result.outcomes,
    };
    write_json(config.out_dir(), "outcomes.json", &doc)?;

    let metrics = crate::report::compute_metrics(
        &model,
        &dev_coverage,
        &doc.outcomes,
        config.max_attempts,
    );
    write_json(
        config.out_dir(),
        "metrics.json",
        &MetricsDoc {
            module: model.project_id.clone(),
            metrics,
        },
    )?;

    if !doc.outcomes.is_empty()
        && doc
            .outcomes
            .iter()
            .all(|o| o.status == OutcomeStatus::Aborted)
    {
        return Err(CliError::runtime("every generation target aborted"));
    }
    Ok(doc)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsDoc {
    pub module: String,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriageDoc {
    pub module: String,
    pub rows: Vec<TriageRow>,
}

/// Evaluates the vulnerability rules with coverage and scenario evidence.
pub fn cmd_triage(config: &RunConfig) -> Result<TriageDoc, CliError> {
    let rules_path = config
        .rules
        .as_deref()
        .ok_or_else(|| CliError::data("no rules file configured"))?;
    let rules_text = fs::read_to_string(rules_path)
        .map_err(|e| CliError::data(format!("cannot read rules {rules_path}: {e}")))?;
    let rules = parse_rules(&rules_text).map_err(|e| CliError::data(e.to_string()))?;

    let model = load_model(config.model_path()?)?;
    let dev_coverage = load_dev_coverage(config)?;
    let outcomes = match fs::read_to_string(config.out_dir().join("outcomes.json")) {
        Ok(text) => {
            let doc: OutcomesDoc = serde_json::from_str(&text)
                .map_err(|e| CliError::data(format!("outcomes.json: {e}")))?;
            doc.outcomes
        }
        Err(_) => Vec::new(),
    };

    let rows = triage_rules(&rules, &model, &dev_coverage, &outcomes)
        .map_err(|e| CliError::data(e.to_string()))?;
    let doc = TriageDoc {
        module: model.project_id.clone(),
        rows,
    };
    write_json(config.out_dir(), "triage.json", &doc)?;
    write_artifact(config.out_dir(), "triage.csv", &triage_csv(&doc.rows))?;
    Ok(doc)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub module: String,
    pub metrics: MetricsReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triage: Option<Vec<TriageRow>>,
}

/// Rebuilds the consolidated tables from the on-disk artifacts alone.
pub fn cmd_report(config: &RunConfig) -> Result<ReportDoc, CliError> {
    let dir = config.out_dir();
    let inventory: InventoryDoc = serde_json::from_str(&read_artifact(dir, "inventory.json")?)
        .map_err(|e| CliError::data(format!("inventory.json: {e}")))?;
    let coverage: CoverageDoc = serde_json::from_str(&read_artifact(dir, "coverage.json")?)
        .map_err(|e| CliError::data(format!("coverage.json: {e}")))?;

    let mut pairs: BTreeSet<SiteKey> = BTreeSet::new();
    let mut tests: BTreeSet<SiteKey> = BTreeSet::new();
    for site in &coverage.sites {
        for target in &site.targets {
            pairs.insert((site.caller.clone(), target.clone()));
            if site.covered {
                tests.insert((site.caller.clone(), target.clone()));
            }
        }
    }

    let (outcomes, max_attempts) = match fs::read_to_string(dir.join("outcomes.json")) {
        Ok(text) => {
            let doc: OutcomesDoc = serde_json::from_str(&text)
                .map_err(|e| CliError::data(format!("outcomes.json: {e}")))?;
            (doc.outcomes, doc.max_attempts)
        }
        Err(_) => (Vec::new(), config.max_attempts),
    };
    let triage = match fs::read_to_string(dir.join("triage.json")) {
        Ok(text) => {
            let doc: TriageDoc = serde_json::from_str(&text)
                .map_err(|e| CliError::data(format!("triage.json: {e}")))?;
            Some(doc.rows)
        }
        Err(_) => None,
    };

    let metrics = compute_metrics_from_sets(&pairs, &tests, &outcomes, max_attempts);
    let doc = ReportDoc {
        module: inventory.project.clone(),
        metrics,
        triage,
    };
    write_json(dir, "report.json", &doc)?;
    write_artifact(dir, "report_summary.csv", &metrics_csv(&doc.module, &doc.metrics))?;
    write_artifact(
        dir,
        "report_paths.csv",
        &paths_csv(&doc.module, &doc.metrics.path_length_histogram),
    )?;
    if let Some(rows) = &doc.triage {
        write_artifact(dir, "report_triage.csv", &triage_csv(rows))?;
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::short_hash;

    const GOLDEN: &str = include_str!("../fixtures/graphhopper.fika");

    fn config_in(dir: &Path) -> RunConfig {
        let model_path = dir.join("model.fika");
        fs::write(&model_path, GOLDEN).unwrap();
        RunConfig {
            model: Some(model_path.to_string_lossy().into_owned()),
            out: dir.join("out").to_string_lossy().into_owned(),
            ..RunConfig::default()
        }
    }

    fn mock_responses(dir: &Path, m_dp: &str, m_tpl: &str, responses: &[&str]) -> String {
        let key = format!("{}_{}", short_hash(m_dp), short_hash(m_tpl));
        let target = dir.join(&key);
        fs::create_dir_all(&target).unwrap();
        for (i, text) in responses.iter().enumerate() {
            fs::write(target.join(format!("{}.txt", i + 1)), text).unwrap();
        }
        dir.to_string_lossy().into_owned()
    }

    #[test]
    fn analyze_writes_the_inventory() {
        let tmp = tempfile::tempdir().unwrap();
        let config = config_in(tmp.path());
        let doc = cmd_analyze(&config, true).unwrap();
        assert_eq!(doc.project, "graphhopper-demo");
        assert_eq!(doc.paths.len(), 1);
        assert_eq!(doc.paths[0].length, 2);
        assert!(config.out_dir().join("inventory.json").exists());
        assert!(config.out_dir().join("callgraph.txt").exists());
    }

    #[test]
    fn coverage_summarizes_pairs() {
        let tmp = tempfile::tempdir().unwrap();
        let mut config = config_in(tmp.path());
        let doc = cmd_coverage(&config).unwrap();
        assert_eq!(doc.summary, "0/1 (0%)");
        assert_eq!(doc.sites.len(), 1);
        assert!(!doc.sites[0].covered);

        // Cover the site line and re-run.
        let lcov_path = tmp.path().join("dev.lcov");
        let site = &doc.sites[0];
        fs::write(
            &lcov_path,
            format!(
                "SF:{}\nDA:{},3\nend_of_record\n",
                site.file.as_deref().unwrap(),
                site.line
            ),
        )
        .unwrap();
        config.coverage = vec![lcov_path.to_string_lossy().into_owned()];
        let doc = cmd_coverage(&config).unwrap();
        assert_eq!(doc.summary, "1/1 (100%)");
        assert!(doc.sites[0].covered);
    }

    #[test]
    fn generate_runs_the_pipeline_end_to_end() {
        let tmp = tempfile::tempdir().unwrap();
        let mut config = config_in(tmp.path());
        let responses = tmp.path().join("responses");
        let dir = mock_responses(
            &responses,
            "com.graphhopper.routing.ch.CHPreparationGraph$OrigGraph$Builder#build()",
            "com.carrotsearch.hppc.sorting.IndirectSort#mergesort(int,int,IntBinaryOperator)",
            &["call com.graphhopper.routing.ch.CHPreparationGraph#prepareForContraction()\n"],
        );
        config.provider = Some(format!("mock:{dir}"));

        let doc = cmd_generate(&config).unwrap();
        assert_eq!(doc.outcomes.len(), 1);
        assert_eq!(doc.outcomes[0].status, OutcomeStatus::Reached);
        assert_eq!(doc.iteration_successes, vec![1, 1, 1, 1, 1]);
        assert!(config.out_dir().join("outcomes.json").exists());
        assert!(config.out_dir().join("metrics.json").exists());
        let file = doc.outcomes[0].scenario_file.as_deref().unwrap();
        assert!(config.out_dir().join("scenarios").join(file).exists());
    }

    #[test]
    fn generate_without_provider_is_a_usage_error() {
        let tmp = tempfile::tempdir().unwrap();
        let config = config_in(tmp.path());
        let err = cmd_generate(&config).unwrap_err();
        assert_eq!(err.exit_code, 2);
    }

    #[test]
    fn report_is_rebuilt_from_artifacts() {
        let tmp = tempfile::tempdir().unwrap();
        let mut config = config_in(tmp.path());
        let responses = tmp.path().join("responses");
        let dir = mock_responses(
            &responses,
            "com.graphhopper.routing.ch.CHPreparationGraph$OrigGraph$Builder#build()",
            "com.carrotsearch.hppc.sorting.IndirectSort#mergesort(int,int,IntBinaryOperator)",
            &["call com.graphhopper.routing.ch.CHPreparationGraph#prepareForContraction()\n"],
        );
        config.provider = Some(format!("mock:{dir}"));

        cmd_analyze(&config, false).unwrap();
        cmd_coverage(&config).unwrap();
        cmd_generate(&config).unwrap();
        let report = cmd_report(&config).unwrap();
        assert_eq!(report.module, "graphhopper-demo");
        assert_eq!(report.metrics.total_guarantees.label, "1/1 (100%)");
        assert_eq!(report.metrics.path_length_histogram.two, 1);
        assert!(config.out_dir().join("report_summary.csv").exists());
        assert!(config.out_dir().join("report_paths.csv").exists());
        assert!(report.triage.is_none());
    }

    #[test]
    fn report_without_artifacts_is_a_data_error() {
        let tmp = tempfile::tempdir().unwrap();
        let config = config_in(tmp.path());
        let err = cmd_report(&config).unwrap_err();
        assert_eq!(err.exit_code, 2);
        assert!(err.message.contains("inventory.json"));
    }

    #[test]
    fn triage_produces_artifacts_with_evidence() {
        let tmp = tempfile::tempdir().unwrap();
        let mut config = config_in(tmp.path());
        let rules_path = tmp.path().join("rules.json");
        fs::write(
            &rules_path,
            r#"[
  {
    "rule_id": "hppc-sort",
    "cve_id": "CVE-0000-0100",
    "coordinate": "com.carrotsearch:hppc",
    "pattern": {"method_glob": "*.IndirectSort.mergesort*"}
  }
]
"#,
        )
        .unwrap();
        config.rules = Some(rules_path.to_string_lossy().into_owned());

        let doc = cmd_triage(&config).unwrap();
        assert_eq!(doc.rows.len(), 1);
        assert_eq!(
            doc.rows[0].semgrep_class,
            crate::triage::SemgrepClass::StrongReachable
        );
        assert!(doc.rows[0].call_site_present);
        assert!(!doc.rows[0].executable, "no coverage evidence yet");
        assert!(config.out_dir().join("triage.csv").exists());
    }

    #[test]
    fn config_round_trips_and_rejects_unknown_keys() {
        let config = RunConfig::default();
        let text = serde_json::to_string(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, config);

        let bad: Result<RunConfig, _> = serde_json::from_str(r#"{"modle": "x"}"#);
        assert!(bad.is_err());

        let partial: RunConfig = serde_json::from_str(r#"{"workers": 3}"#).unwrap();
        assert_eq!(partial.workers, 3);
        assert_eq!(partial.max_attempts, 5);
    }

    #[test]
    fn invalid_bounds_are_rejected() {
        let no_attempts = RunConfig {
            max_attempts: 0,
            ..RunConfig::default()
        };
        assert!(no_attempts.validate().is_err());
        let no_workers = RunConfig {
            workers: 0,
            ..RunConfig::default()
        };
        assert!(no_workers.validate().is_err());
    }
}
