//! The iterative generate/validate/compile/run loop and the site queue.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;
use std::sync::Mutex;

use crate::context::build_bundle;
use crate::coverage::{divergence_report, parse_lcov, CoverageMap};
use crate::graph::CallPath;
use crate::model::{MethodId, ProjectModel};

use super::adapter::{AdapterResponse, AdapterStatus, ExecutionAdapter};
use super::prompt::build_prompt;
use super::provider::{LlmProvider, PromptRequest};
use super::validate::{default_rules, render_violations, static_validate};
use super::{AttemptRecord, OutcomeStatus, PromptConfig, PromptMode, ScenarioOutcome, SitePair};

/// Result of draining a generation queue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueueResult {
    /// One outcome per queued tuple, in queue order.
    pub outcomes: Vec<ScenarioOutcome>,
    /// `iteration_successes[k-1]` counts sites reached within k attempts.
    pub iteration_successes: Vec<usize>,
}

fn simple_names_for_path(path: &CallPath) -> Vec<String> {
    let mut names = BTreeSet::new();
    for method in path.hops.iter().chain(std::iter::once(&path.target)) {
        let simple = method.simple_owner();
        if let Some(inner) = simple.rsplit('$').next() {
            if inner != simple {
                names.insert(inner.to_string());
            }
        }
        names.insert(simple.to_string());
    }
    names.into_iter().collect()
}

fn site_of(path: &CallPath) -> SitePair {
    SitePair {
        m_dp: path.direct_caller.clone(),
        m_tpl: path.target.clone(),
    }
}

fn aborted(site: SitePair, path: &CallPath, attempts: Vec<AttemptRecord>, error: String) -> ScenarioOutcome {
    ScenarioOutcome {
        site,
        entry: path.entry.clone(),
        path_length: path.length(),
        status: OutcomeStatus::Aborted,
        attempts,
        scenario_file: None,
        lcov: None,
        error: Some(error),
    }
}

fn compile_feedback(response: &AdapterResponse) -> String {
    let messages = response.error_messages();
    if messages.is_empty() {
        "compilation failed".to_string()
    } else {
        messages.join("\n")
    }
}

/// Runs the attempt loop for one path: prompt, static checks, compile,
/// execute, coverage check, with feedback threaded into later FULL prompts.
pub fn generate_for_target(
    model: &ProjectModel,
    path: &CallPath,
    config: &PromptConfig,
    llm: &dyn LlmProvider,
    adapter: &dyn ExecutionAdapter,
    out_dir: &Path,
    project_root: &Path,
) -> ScenarioOutcome {
    let site = site_of(path);
    let bundle = build_bundle(model, path);
    let names = simple_names_for_path(path);
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let rules = default_rules(&name_refs);
    let target_file = model.file_of_method(&path.direct_caller).map(str::to_string);

    if let Err(e) = std::fs::create_dir_all(out_dir) {
        return aborted(site, path, Vec::new(), format!("cannot create scenario dir: {e}"));
    }

    let mut attempts: Vec<AttemptRecord> = Vec::new();
    let mut last_feedback: Option<String> = None;

    for attempt_index in 1..=config.max_attempts {
        let prompt = build_prompt(&bundle, config, last_feedback.as_deref());
        let scenario_text = match llm.generate(&PromptRequest { prompt }) {
            Ok(r) => r.scenario_text,
            Err(e) => return aborted(site, path, attempts, e.to_string()),
        };

        let file_name = format!("{}_attempt{attempt_index}", site.key());
        let scenario_path = out_dir.join(&file_name);
        if let Err(e) = std::fs::write(&scenario_path, &scenario_text) {
            return aborted(site, path, attempts, format!("cannot write scenario: {e}"));
        }

        let mut record = AttemptRecord {
            attempt_index,
            static_validation: false,
            compiled: false,
            executed: false,
            target_reached: false,
            feedback: None,
        };
        let another_follows = attempt_index < config.max_attempts;
        let fail = |mut record: AttemptRecord, feedback: String, attempts: &mut Vec<AttemptRecord>| {
            if another_follows {
                record.feedback = Some(feedback.clone());
            }
            attempts.push(record);
            Some(feedback)
        };

        let report = static_validate(&scenario_text, &rules);
        if !report.passed() {
            last_feedback = fail(record, render_violations(&report.violations), &mut attempts);
            continue;
        }
        record.static_validation = true;

        let compile = match adapter.compile(&scenario_path, project_root) {
            Ok(r) => r,
            Err(e) => return aborted(site, path, attempts, e.to_string()),
        };
        if compile.status != AdapterStatus::Ok {
            last_feedback = fail(record, compile_feedback(&compile), &mut attempts);
            continue;
        }
        record.compiled = true;

        let run = match adapter.run(&scenario_path, project_root) {
            Ok(r) => r,
            Err(e) => return aborted(site, path, attempts, e.to_string()),
        };
        match run.status {
            AdapterStatus::CompileError => {
                last_feedback = fail(record, compile_feedback(&run), &mut attempts);
                continue;
            }
            AdapterStatus::RuntimeError => {
                last_feedback = fail(record, compile_feedback(&run), &mut attempts);
                continue;
            }
            AdapterStatus::Ok => {}
        }
        record.executed = true;

        let lcov_text = run.lcov.unwrap_or_default();
        let scenario_map = match parse_lcov(&lcov_text) {
            Ok(m) => m,
            Err(e) => return aborted(site, path, attempts, format!("adapter lcov: {e}")),
        };
        let reached = target_file
            .as_deref()
            .is_some_and(|f| scenario_map.is_covered(f, path.line));
        if reached {
            record.target_reached = true;
            attempts.push(record);
            return ScenarioOutcome {
                site,
                entry: path.entry.clone(),
                path_length: path.length(),
                status: OutcomeStatus::Reached,
                attempts,
                scenario_file: Some(file_name),
                lcov: Some(lcov_text),
                error: None,
            };
        }
        let divergence = divergence_report(&scenario_map, path, model);
        last_feedback = fail(record, divergence.render(path), &mut attempts);
    }

    ScenarioOutcome {
        site,
        entry: path.entry.clone(),
        path_length: path.length(),
        status: OutcomeStatus::Exhausted,
        attempts,
        scenario_file: None,
        lcov: None,
        error: None,
    }
}

fn skipped(path: &CallPath) -> ScenarioOutcome {
    ScenarioOutcome {
        site: site_of(path),
        entry: path.entry.clone(),
        path_length: path.length(),
        status: OutcomeStatus::SkippedDuplicate,
        attempts: Vec::new(),
        scenario_file: None,
        lcov: None,
        error: None,
    }
}

fn queue_key(path: &CallPath) -> (usize, MethodId, MethodId, MethodId) {
    (
        path.length(),
        path.direct_caller.clone(),
        path.target.clone(),
        path.entry.clone(),
    )
}

/// Drains a queue of paths: drops sites already covered by developer tests,
/// sorts by (length, m_dp, m_tpl, entry), runs the attempt loop per tuple and
/// skips tuples whose site an earlier tuple already reached. `workers > 1`
/// processes distinct sites concurrently; tuples of one site stay ordered.
#[allow(clippy::too_many_arguments)]
pub fn run_generation_queue(
    model: &ProjectModel,
    paths: &[CallPath],
    dev_coverage: &CoverageMap,
    config: &PromptConfig,
    llm: &dyn LlmProvider,
    adapter: &dyn ExecutionAdapter,
    out_dir: &Path,
    project_root: &Path,
    workers: usize,
) -> QueueResult {
    let mut queue: Vec<&CallPath> = paths
        .iter()
        .filter(|p| {
            let file = model.file_of_method(&p.direct_caller);
            !file.is_some_and(|f| dev_coverage.is_covered(f, p.line))
        })
        .collect();
    queue.sort_by_key(|p| queue_key(p));

    let outcomes = if workers > 1 {
        drain_parallel(model, &queue, config, llm, adapter, out_dir, project_root, workers)
    } else {
        let mut reached: BTreeSet<SitePair> = BTreeSet::new();
        let mut out = Vec::with_capacity(queue.len());
        for path in &queue {
            let site = site_of(path);
            if reached.contains(&site) {
                out.push(skipped(path));
                continue;
            }
            let outcome =
                generate_for_target(model, path, config, llm, adapter, out_dir, project_root);
            if outcome.status == OutcomeStatus::Reached {
                reached.insert(site);
            }
            out.push(outcome);
        }
        out
    };

    let mut iteration_successes = vec![0usize; config.max_attempts as usize];
    for outcome in &outcomes {
        if outcome.status != OutcomeStatus::Reached {
            continue;
        }
        let k = outcome
            .attempts
            .last()
            .map(|a| a.attempt_index as usize)
            .unwrap_or(1);
        for slot in iteration_successes.iter_mut().skip(k - 1) {
            *slot += 1;
        }
    }

    QueueResult {
        outcomes,
        iteration_successes,
    }
}

/// Lanes (one per site) are handed to worker threads; outcome slots keep the
/// queue order so the result is identical to the sequential drain.
#[allow(clippy::too_many_arguments)]
fn drain_parallel(
    model: &ProjectModel,
    queue: &[&CallPath],
    config: &PromptConfig,
    llm: &dyn LlmProvider,
    adapter: &dyn ExecutionAdapter,
    out_dir: &Path,
    project_root: &Path,
    workers: usize,
) -> Vec<ScenarioOutcome> {
    let mut lanes: BTreeMap<SitePair, Vec<usize>> = BTreeMap::new();
    for (idx, path) in queue.iter().enumerate() {
        lanes.entry(site_of(path)).or_default().push(idx);
    }
    let work: Mutex<VecDeque<Vec<usize>>> = Mutex::new(lanes.into_values().collect());
    let slots: Mutex<Vec<Option<ScenarioOutcome>>> = Mutex::new(vec![None; queue.len()]);

    std::thread::scope(|scope| {
        for _ in 0..workers.min(queue.len()) {
            scope.spawn(|| loop {
                let lane = match work.lock().unwrap().pop_front() {
                    Some(l) => l,
                    None => break,
                };
                let mut lane_reached = false;
                for idx in lane {
                    let path = queue[idx];
                    let outcome = if lane_reached {
                        skipped(path)
                    } else {
                        generate_for_target(
                            model,
                            path,
                            config,
                            llm,
                            adapter,
                            out_dir,
                            project_root,
                        )
                    };
                    lane_reached |= outcome.status == OutcomeStatus::Reached;
                    slots.lock().unwrap()[idx] = Some(outcome);
                }
            });
        }
    });

    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|o| o.expect("every queue slot is filled"))
        .collect()
}

/// True when this mode ever embeds attempt feedback.
pub fn mode_uses_feedback(mode: PromptMode) -> bool {
    mode == PromptMode::Full
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_cha, enumerate_paths};
    use crate::model::dsl::parse_fixture_dsl;
    use crate::scenario::fixture::FixtureAdapter;
    use crate::scenario::prompt::parse_target_line;
    use crate::scenario::provider::{ProviderError, ScenarioResponse};
    use std::sync::atomic::{AtomicUsize, Ordering};

    /// Pops scripted responses per (m_dp, m_tpl) parsed from the prompt.
    struct ScriptedProvider {
        scripts: Mutex<BTreeMap<(String, String), VecDeque<String>>>,
        calls: AtomicUsize,
    }

    impl ScriptedProvider {
        fn new(entries: Vec<((&str, &str), Vec<&str>)>) -> Self {
            let mut scripts = BTreeMap::new();
            for ((dp, tpl), responses) in entries {
                scripts.insert(
                    (dp.to_string(), tpl.to_string()),
                    responses.into_iter().map(str::to_string).collect(),
                );
            }
            ScriptedProvider {
                scripts: Mutex::new(scripts),
                calls: AtomicUsize::new(0),
            }
        }
    }

    impl LlmProvider for ScriptedProvider {
        fn generate(&self, request: &PromptRequest) -> Result<ScenarioResponse, ProviderError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            let (dp, tpl) = parse_target_line(&request.prompt)
                .ok_or_else(|| ProviderError::new("prompt has no target line"))?;
            self.scripts
                .lock()
                .unwrap()
                .get_mut(&(dp.clone(), tpl.clone()))
                .and_then(VecDeque::pop_front)
                .map(|scenario_text| ScenarioResponse { scenario_text })
                .ok_or_else(|| ProviderError::new(format!("no scripted response for {dp} -> {tpl}")))
        }

        fn invocation_count(&self) -> usize {
            self.calls.load(Ordering::SeqCst)
        }
    }

    const GOLDEN: &str = include_str!("../../fixtures/graphhopper.fika");
    const GOLDEN_DP: &str =
        "com.graphhopper.routing.ch.CHPreparationGraph$OrigGraph$Builder#build()";
    const GOLDEN_TPL: &str =
        "com.carrotsearch.hppc.sorting.IndirectSort#mergesort(int,int,IntBinaryOperator)";
    const GOLDEN_CALL: &str =
        "call com.graphhopper.routing.ch.CHPreparationGraph#prepareForContraction()\n";

    fn golden_setup() -> (ProjectModel, Vec<CallPath>) {
        let model = parse_fixture_dsl(GOLDEN).unwrap();
        let graph = build_cha(&model);
        let paths = enumerate_paths(&model, &graph);
        (model, paths)
    }

    #[test]
    fn reaches_target_on_first_attempt() {
        let (model, paths) = golden_setup();
        assert_eq!(paths.len(), 1);
        let provider =
            ScriptedProvider::new(vec![((GOLDEN_DP, GOLDEN_TPL), vec![GOLDEN_CALL])]);
        let adapter = FixtureAdapter::new(model.clone());
        let dir = tempfile::tempdir().unwrap();

        let outcome = generate_for_target(
            &model,
            &paths[0],
            &PromptConfig::default(),
            &provider,
            &adapter,
            dir.path(),
            dir.path(),
        );
        assert_eq!(outcome.status, OutcomeStatus::Reached);
        assert_eq!(outcome.attempts.len(), 1);
        let attempt = &outcome.attempts[0];
        assert!(attempt.static_validation && attempt.compiled && attempt.executed);
        assert!(attempt.target_reached);
        assert_eq!(attempt.feedback, None);
        let file = outcome.scenario_file.as_deref().unwrap();
        assert_eq!(file, format!("{}_attempt1", outcome.site.key()));
        assert!(dir.path().join(file).exists());
        assert!(outcome.lcov.is_some());
    }

    #[test]
    fn static_violation_then_success_records_feedback() {
        let (model, paths) = golden_setup();
        let bad = "@Override\ncall whatever\n";
        let provider =
            ScriptedProvider::new(vec![((GOLDEN_DP, GOLDEN_TPL), vec![bad, GOLDEN_CALL])]);
        let adapter = FixtureAdapter::new(model.clone());
        let dir = tempfile::tempdir().unwrap();

        let outcome = generate_for_target(
            &model,
            &paths[0],
            &PromptConfig::default(),
            &provider,
            &adapter,
            dir.path(),
            dir.path(),
        );
        assert_eq!(outcome.status, OutcomeStatus::Reached);
        assert_eq!(outcome.attempts.len(), 2);
        let first = &outcome.attempts[0];
        assert!(!first.static_validation);
        let fb = first.feedback.as_deref().unwrap();
        assert!(fb.starts_with("static validation failed:"), "{fb}");
        assert!(fb.contains("override-annotation"));
        // Both attempt files are on disk; the outcome names the winner.
        assert!(dir
            .path()
            .join(format!("{}_attempt1", outcome.site.key()))
            .exists());
        assert_eq!(
            outcome.scenario_file.as_deref(),
            Some(format!("{}_attempt2", outcome.site.key()).as_str())
        );
    }

    #[test]
    fn compile_errors_come_back_verbatim() {
        let (model, paths) = golden_setup();
        let provider = ScriptedProvider::new(vec![(
            (GOLDEN_DP, GOLDEN_TPL),
            vec!["fail compile cannot find symbol: FooBar\n", GOLDEN_CALL],
        )]);
        let adapter = FixtureAdapter::new(model.clone());
        let dir = tempfile::tempdir().unwrap();

        let outcome = generate_for_target(
            &model,
            &paths[0],
            &PromptConfig::default(),
            &provider,
            &adapter,
            dir.path(),
            dir.path(),
        );
        assert_eq!(outcome.status, OutcomeStatus::Reached);
        let first = &outcome.attempts[0];
        assert!(first.static_validation);
        assert!(!first.compiled);
        assert_eq!(
            first.feedback.as_deref(),
            Some("cannot find symbol: FooBar")
        );
    }

    #[test]
    fn runtime_error_feedback_then_success() {
        let (model, paths) = golden_setup();
        let provider = ScriptedProvider::new(vec![(
            (GOLDEN_DP, GOLDEN_TPL),
            vec!["fail runtime NullPointerException at Foo.java:3\n", GOLDEN_CALL],
        )]);
        let adapter = FixtureAdapter::new(model.clone());
        let dir = tempfile::tempdir().unwrap();

        let outcome = generate_for_target(
            &model,
            &paths[0],
            &PromptConfig::default(),
            &provider,
            &adapter,
            dir.path(),
            dir.path(),
        );
        assert_eq!(outcome.status, OutcomeStatus::Reached);
        let first = &outcome.attempts[0];
        assert!(first.compiled && !first.executed);
        assert_eq!(
            first.feedback.as_deref(),
            Some("NullPointerException at Foo.java:3")
        );
    }

    #[test]
    fn executed_but_missed_reports_divergence() {
        let (model, paths) = golden_setup();
        // The factory runs but never descends toward the target method.
        let miss =
            "call com.graphhopper.routing.ch.CHPreparationGraph#edgeBased(int,int,TurnCostFunction)\n";
        let provider =
            ScriptedProvider::new(vec![((GOLDEN_DP, GOLDEN_TPL), vec![miss, GOLDEN_CALL])]);
        let adapter = FixtureAdapter::new(model.clone());
        let dir = tempfile::tempdir().unwrap();

        let outcome = generate_for_target(
            &model,
            &paths[0],
            &PromptConfig::default(),
            &provider,
            &adapter,
            dir.path(),
            dir.path(),
        );
        assert_eq!(outcome.status, OutcomeStatus::Reached);
        let first = &outcome.attempts[0];
        assert!(first.executed && !first.target_reached);
        assert!(first.feedback.as_deref().unwrap().contains("diverged at"), "{:?}", first.feedback);
    }

    #[test]
    fn exhausts_after_max_attempts_with_no_feedback_on_last() {
        let (model, paths) = golden_setup();
        let provider = ScriptedProvider::new(vec![(
            (GOLDEN_DP, GOLDEN_TPL),
            vec!["nonsense"; 5],
        )]);
        let adapter = FixtureAdapter::new(model.clone());
        let dir = tempfile::tempdir().unwrap();

        let outcome = generate_for_target(
            &model,
            &paths[0],
            &PromptConfig::default(),
            &provider,
            &adapter,
            dir.path(),
            dir.path(),
        );
        assert_eq!(outcome.status, OutcomeStatus::Exhausted);
        assert_eq!(outcome.attempts.len(), 5);
        assert_eq!(provider.invocation_count(), 5);
        for attempt in &outcome.attempts[..4] {
            assert!(attempt.feedback.is_some());
        }
        assert_eq!(outcome.attempts[4].feedback, None);
        assert_eq!(outcome.scenario_file, None);
    }

    #[test]
    fn provider_failure_aborts_the_target() {
        let (model, paths) = golden_setup();
        let provider = ScriptedProvider::new(vec![]);
        let adapter = FixtureAdapter::new(model.clone());
        let dir = tempfile::tempdir().unwrap();

        let outcome = generate_for_target(
            &model,
            &paths[0],
            &PromptConfig::default(),
            &provider,
            &adapter,
            dir.path(),
            dir.path(),
        );
        assert_eq!(outcome.status, OutcomeStatus::Aborted);
        assert!(outcome.error.as_deref().unwrap().contains("no scripted response"));
        assert!(outcome.attempts.is_empty());
    }

    const DEPTHS: &str = "\
project depths
dependency com.example:lib 1.0.0
class q.E1 file q.fika {
  public e1() {
    call lib.L.one()
  }
}
class q.A file q.fika {
  public a() {
    call q.B.b()
  }
}
class q.B file q.fika {
  b() {
    call lib.L.two()
  }
}
class q.C file q.fika {
  public c() {
    call q.D.d()
  }
}
class q.D file q.fika {
  d() {
    call q.F.f()
  }
}
class q.F file q.fika {
  f() {
    call lib.L.three()
  }
}
dep class lib.L {
  public static one()
  public static two()
  public static three()
}
";

    #[test]
    fn queue_is_processed_shortest_paths_first() {
        let model = parse_fixture_dsl(DEPTHS).unwrap();
        let graph = build_cha(&model);
        let mut paths = enumerate_paths(&model, &graph);
        assert_eq!(paths.len(), 3);
        paths.reverse(); // hand the queue the worst order

        let provider = ScriptedProvider::new(vec![
            (("q.E1#e1()", "lib.L#one()"), vec!["call q.E1#e1()\n"]),
            (("q.B#b()", "lib.L#two()"), vec!["call q.A#a()\n"]),
            (("q.F#f()", "lib.L#three()"), vec!["call q.C#c()\n"]),
        ]);
        let adapter = FixtureAdapter::new(model.clone());
        let dir = tempfile::tempdir().unwrap();

        let result = run_generation_queue(
            &model,
            &paths,
            &CoverageMap::default(),
            &PromptConfig::default(),
            &provider,
            &adapter,
            dir.path(),
            dir.path(),
            1,
        );
        let lengths: Vec<usize> = result.outcomes.iter().map(|o| o.path_length).collect();
        assert_eq!(lengths, vec![1, 2, 3]);
        assert!(result
            .outcomes
            .iter()
            .all(|o| o.status == OutcomeStatus::Reached));
        assert_eq!(result.iteration_successes, vec![3, 3, 3, 3, 3]);
    }

    const SHARED_SITE: &str = "\
project shared
dependency com.example:lib 1.0.0
class r.P1 file r.fika {
  public p1() {
    call r.Hidden.h()
  }
}
class r.P2 file r.fika {
  public p2() {
    call r.Hidden.h()
  }
}
class r.Hidden file r.fika {
  h() {
    call lib.L.work()
  }
}
dep class lib.L {
  public static work()
}
";

    #[test]
    fn later_tuples_for_a_reached_site_are_skipped_without_provider_calls() {
        let model = parse_fixture_dsl(SHARED_SITE).unwrap();
        let graph = build_cha(&model);
        let paths = enumerate_paths(&model, &graph);
        assert_eq!(paths.len(), 2);

        let provider = ScriptedProvider::new(vec![(
            ("r.Hidden#h()", "lib.L#work()"),
            vec!["call r.P1#p1()\n"],
        )]);
        let adapter = FixtureAdapter::new(model.clone());
        let dir = tempfile::tempdir().unwrap();

        let result = run_generation_queue(
            &model,
            &paths,
            &CoverageMap::default(),
            &PromptConfig::default(),
            &provider,
            &adapter,
            dir.path(),
            dir.path(),
            1,
        );
        assert_eq!(result.outcomes[0].status, OutcomeStatus::Reached);
        assert_eq!(result.outcomes[0].entry.as_str(), "r.P1#p1()");
        assert_eq!(result.outcomes[1].status, OutcomeStatus::SkippedDuplicate);
        assert!(result.outcomes[1].attempts.is_empty());
        assert_eq!(provider.invocation_count(), 1);
        // One scenario file, from the tuple that ran.
        let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(files.len(), 1);
    }

    #[test]
    fn dev_covered_sites_never_enter_the_queue() {
        let model = parse_fixture_dsl(SHARED_SITE).unwrap();
        let graph = build_cha(&model);
        let paths = enumerate_paths(&model, &graph);
        let site_line = paths[0].line;

        let lcov = format!("SF:r.fika\nDA:{site_line},4\nend_of_record\n");
        let dev = parse_lcov(&lcov).unwrap();

        let provider = ScriptedProvider::new(vec![]);
        let adapter = FixtureAdapter::new(model.clone());
        let dir = tempfile::tempdir().unwrap();

        let result = run_generation_queue(
            &model,
            &paths,
            &dev,
            &PromptConfig::default(),
            &provider,
            &adapter,
            dir.path(),
            dir.path(),
            1,
        );
        assert!(result.outcomes.is_empty());
        assert_eq!(provider.invocation_count(), 0);
    }

    const FIVE_SITES: &str = "\
project five
dependency com.example:lib 1.0.0
class s.E1 file s.fika {
  public e1() {
    call lib.L.f1()
  }
}
class s.E2 file s.fika {
  public e2() {
    call lib.L.f2()
  }
}
class s.E3 file s.fika {
  public e3() {
    call lib.L.f3()
  }
}
class s.E4 file s.fika {
  public e4() {
    call lib.L.f4()
  }
}
class s.E5 file s.fika {
  public e5() {
    call lib.L.f5()
  }
}
dep class lib.L {
  public static f1()
  public static f2()
  public static f3()
  public static f4()
  public static f5()
}
";

    fn script_success_at(call: &str, k: Option<u32>, max: u32) -> Vec<String> {
        let mut responses = Vec::new();
        match k {
            Some(k) => {
                for _ in 1..k {
                    responses.push("fail compile try again\n".to_string());
                }
                responses.push(call.to_string());
            }
            None => {
                for _ in 0..max {
                    responses.push("fail compile try again\n".to_string());
                }
            }
        }
        responses
    }

    #[test]
    fn cumulative_iteration_counters_match_the_oracle() {
        let model = parse_fixture_dsl(FIVE_SITES).unwrap();
        let graph = build_cha(&model);
        let paths = enumerate_paths(&model, &graph);
        assert_eq!(paths.len(), 5);

        // Per-site first-success attempts; the fifth site never lands.
        let success_at: [(usize, Option<u32>); 5] =
            [(1, Some(1)), (2, Some(2)), (3, Some(2)), (4, Some(5)), (5, None)];
        let mut entries = Vec::new();
        let calls: Vec<String> = (1..=5).map(|i| format!("call s.E{i}#e{i}()\n")).collect();
        let dps: Vec<String> = (1..=5).map(|i| format!("s.E{i}#e{i}()")).collect();
        let tpls: Vec<String> = (1..=5).map(|i| format!("lib.L#f{i}()")).collect();
        let mut scripts: Vec<Vec<String>> = Vec::new();
        for (i, k) in &success_at {
            scripts.push(script_success_at(&calls[i - 1], *k, 5));
        }
        for i in 0..5 {
            entries.push((
                (dps[i].as_str(), tpls[i].as_str()),
                scripts[i].iter().map(String::as_str).collect::<Vec<_>>(),
            ));
        }
        let provider = ScriptedProvider::new(entries);
        let adapter = FixtureAdapter::new(model.clone());
        let dir = tempfile::tempdir().unwrap();

        let result = run_generation_queue(
            &model,
            &paths,
            &CoverageMap::default(),
            &PromptConfig::default(),
            &provider,
            &adapter,
            dir.path(),
            dir.path(),
            1,
        );

        // Oracle: I_k counts the sites whose first success is at attempt <= k.
        let ks: Vec<Option<u32>> = success_at.iter().map(|(_, k)| *k).collect();
        let mut oracle = vec![0usize; 5];
        for (idx, slot) in oracle.iter_mut().enumerate() {
            let k = idx as u32 + 1;
            *slot = ks.iter().filter(|s| s.is_some_and(|v| v <= k)).count();
        }
        assert_eq!(oracle, vec![1, 3, 3, 3, 4]);
        assert_eq!(result.iteration_successes, oracle);
        let reached = result
            .outcomes
            .iter()
            .filter(|o| o.status == OutcomeStatus::Reached)
            .count();
        assert_eq!(reached, 4);
        let exhausted = result
            .outcomes
            .iter()
            .filter(|o| o.status == OutcomeStatus::Exhausted)
            .count();
        assert_eq!(exhausted, 1);
    }

    #[test]
    fn parallel_drain_matches_sequential() {
        let model = parse_fixture_dsl(DEPTHS).unwrap();
        let graph = build_cha(&model);
        let paths = enumerate_paths(&model, &graph);

        let scripts = || {
            ScriptedProvider::new(vec![
                (("q.E1#e1()", "lib.L#one()"), vec!["call q.E1#e1()\n"]),
                (("q.B#b()", "lib.L#two()"), vec!["nope", "call q.A#a()\n"]),
                (("q.F#f()", "lib.L#three()"), vec!["call q.C#c()\n"]),
            ])
        };
        let adapter = FixtureAdapter::new(model.clone());
        let seq_dir = tempfile::tempdir().unwrap();
        let par_dir = tempfile::tempdir().unwrap();

        let sequential = run_generation_queue(
            &model,
            &paths,
            &CoverageMap::default(),
            &PromptConfig::default(),
            &scripts(),
            &adapter,
            seq_dir.path(),
            seq_dir.path(),
            1,
        );
        let parallel = run_generation_queue(
            &model,
            &paths,
            &CoverageMap::default(),
            &PromptConfig::default(),
            &scripts(),
            &adapter,
            par_dir.path(),
            par_dir.path(),
            4,
        );
        assert_eq!(sequential, parallel);
    }

    #[test]
    fn feedback_is_only_threaded_into_full_mode() {
        assert!(mode_uses_feedback(PromptMode::Full));
        assert!(!mode_uses_feedback(PromptMode::Bl1));
        assert!(!mode_uses_feedback(PromptMode::Bl2));
    }
}
