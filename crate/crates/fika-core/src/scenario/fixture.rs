//! Reference execution adapter over the synthetic code model.
//!
//! Scenarios are line-oriented scripts:
//!
//! ```text
//! # drive the public surface
//! call com.example.App#start()
//! fail compile <message>   (forces a compile diagnostic)
//! fail runtime <message>   (forces a runtime error)
//! ```
//!
//! `call` invokes a public project method; execution covers the method's
//! line range and recurses through every resolved call-site target, cycles
//! broken on the call stack. The run response carries LCOV for all project
//! lines executed.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::model::hierarchy::Hierarchy;
use crate::model::{MethodId, ProjectModel, Visibility};

use super::adapter::{
    AdapterError, AdapterResponse, AdapterStatus, DiagLevel, Diagnostic, ExecutionAdapter,
};

pub struct FixtureAdapter {
    model: ProjectModel,
}

enum Statement {
    Call(MethodId),
    FailCompile,
    FailRuntime(String),
}

impl FixtureAdapter {
    pub fn new(model: ProjectModel) -> Self {
        FixtureAdapter { model }
    }

    fn parse(&self, text: &str) -> (Vec<(u32, Statement)>, Vec<Diagnostic>) {
        let mut statements = Vec::new();
        let mut diagnostics = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx as u32 + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("//") {
                continue;
            }
            if let Some(rest) = line.strip_prefix("call ") {
                let id = MethodId(rest.trim().to_string());
                match self.model.method(&id) {
                    None => diagnostics.push(Diagnostic {
                        level: DiagLevel::Error,
                        message: format!("cannot find symbol: {id}"),
                        line: Some(line_no),
                    }),
                    Some(m) => {
                        if !self.model.is_project_method(&id) {
                            diagnostics.push(Diagnostic {
                                level: DiagLevel::Error,
                                message: format!("not a project method: {id}"),
                                line: Some(line_no),
                            });
                        } else if m.visibility != Visibility::Public {
                            diagnostics.push(Diagnostic {
                                level: DiagLevel::Error,
                                message: format!("method not accessible: {id}"),
                                line: Some(line_no),
                            });
                        } else {
                            statements.push((line_no, Statement::Call(id)));
                        }
                    }
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix("fail compile ") {
                statements.push((line_no, Statement::FailCompile));
                diagnostics.push(Diagnostic {
                    level: DiagLevel::Error,
                    message: rest.to_string(),
                    line: Some(line_no),
                });
                continue;
            }
            if let Some(rest) = line.strip_prefix("fail runtime ") {
                statements.push((line_no, Statement::FailRuntime(rest.to_string())));
                continue;
            }
            diagnostics.push(Diagnostic {
                level: DiagLevel::Error,
                message: format!("syntax error: {line}"),
                line: Some(line_no),
            });
        }
        (statements, diagnostics)
    }

    /// Handles one protocol action against scenario text.
    pub fn handle(&self, action: &str, scenario_text: &str) -> Result<AdapterResponse, AdapterError> {
        let (statements, compile_diags) = self.parse(scenario_text);
        match action {
            "compile" => {
                if compile_diags.is_empty() {
                    Ok(AdapterResponse::ok())
                } else {
                    Ok(AdapterResponse {
                        status: AdapterStatus::CompileError,
                        diagnostics: compile_diags,
                        lcov: None,
                    })
                }
            }
            "run" => {
                if !compile_diags.is_empty() {
                    return Ok(AdapterResponse {
                        status: AdapterStatus::CompileError,
                        diagnostics: compile_diags,
                        lcov: None,
                    });
                }
                let mut coverage: BTreeMap<String, BTreeMap<u32, u64>> = BTreeMap::new();
                let hierarchy = Hierarchy::new(&self.model);
                for (line_no, statement) in &statements {
                    match statement {
                        Statement::Call(id) => {
                            let mut stack = BTreeSet::new();
                            self.execute(id, &hierarchy, &mut coverage, &mut stack);
                        }
                        Statement::FailRuntime(msg) => {
                            return Ok(AdapterResponse {
                                status: AdapterStatus::RuntimeError,
                                diagnostics: vec![Diagnostic {
                                    level: DiagLevel::Error,
                                    message: msg.clone(),
                                    line: Some(*line_no),
                                }],
                                lcov: None,
                            });
                        }
                        Statement::FailCompile => unreachable!("caught as compile diagnostics"),
                    }
                }
                Ok(AdapterResponse {
                    status: AdapterStatus::Ok,
                    diagnostics: Vec::new(),
                    lcov: Some(render_lcov(&coverage)),
                })
            }
            other => Err(AdapterError::new(format!("unknown action: {other}"))),
        }
    }

    fn execute(
        &self,
        id: &MethodId,
        hierarchy: &Hierarchy<'_>,
        coverage: &mut BTreeMap<String, BTreeMap<u32, u64>>,
        stack: &mut BTreeSet<MethodId>,
    ) {
        if !stack.insert(id.clone()) {
            return; // cycle
        }
        if let (Some(method), Some(file)) = (self.model.method(id), self.model.file_of_method(id)) {
            if self.model.is_project_method(id) {
                let lines = coverage.entry(file.to_string()).or_default();
                for line in method.line_start..=method.line_end {
                    *lines.entry(line).or_insert(0) += 1;
                }
            }
            for call in &method.calls {
                for target in hierarchy.resolve(call).targets {
                    self.execute(&target, hierarchy, coverage, stack);
                }
            }
        }
        stack.remove(id);
    }
}

fn render_lcov(coverage: &BTreeMap<String, BTreeMap<u32, u64>>) -> String {
    let mut out = String::new();
    for (file, lines) in coverage {
        out.push_str(&format!("SF:{file}\n"));
        for (line, hits) in lines {
            out.push_str(&format!("DA:{line},{hits}\n"));
        }
        out.push_str("end_of_record\n");
    }
    out
}

impl ExecutionAdapter for FixtureAdapter {
    fn compile(
        &self,
        scenario_path: &Path,
        _project_root: &Path,
    ) -> Result<AdapterResponse, AdapterError> {
        let text = std::fs::read_to_string(scenario_path)
            .map_err(|e| AdapterError::new(format!("cannot read scenario: {e}")))?;
        self.handle("compile", &text)
    }

    fn run(
        &self,
        scenario_path: &Path,
        _project_root: &Path,
    ) -> Result<AdapterResponse, AdapterError> {
        let text = std::fs::read_to_string(scenario_path)
            .map_err(|e| AdapterError::new(format!("cannot read scenario: {e}")))?;
        self.handle("run", &text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::parse_lcov;
    use crate::model::dsl::parse_fixture_dsl;

    fn golden() -> FixtureAdapter {
        FixtureAdapter::new(
            parse_fixture_dsl(include_str!("../../fixtures/graphhopper.fika")).unwrap(),
        )
    }

    #[test]
    fn clean_scenario_compiles() {
        let adapter = golden();
        let resp = adapter
            .handle(
                "compile",
                "call com.graphhopper.routing.ch.CHPreparationGraph#prepareForContraction()\n",
            )
            .unwrap();
        assert_eq!(resp.status, AdapterStatus::Ok);
    }

    #[test]
    fn unknown_symbol_fails_compilation_with_line() {
        let adapter = golden();
        let resp = adapter.handle("compile", "call com.nope.Missing#x()\n").unwrap();
        assert_eq!(resp.status, AdapterStatus::CompileError);
        assert_eq!(resp.diagnostics[0].line, Some(1));
        assert!(resp.diagnostics[0].message.contains("cannot find symbol"));
    }

    #[test]
    fn non_public_method_is_not_accessible() {
        let adapter = golden();
        let resp = adapter
            .handle(
                "compile",
                "call com.graphhopper.routing.ch.CHPreparationGraph$OrigGraph$Builder#build()\n",
            )
            .unwrap();
        assert_eq!(resp.status, AdapterStatus::CompileError);
        assert!(resp.diagnostics[0].message.contains("not accessible"));
    }

    #[test]
    fn run_covers_transitive_execution() {
        let adapter = golden();
        let resp = adapter
            .handle(
                "run",
                "call com.graphhopper.routing.ch.CHPreparationGraph#prepareForContraction()\n",
            )
            .unwrap();
        assert_eq!(resp.status, AdapterStatus::Ok);
        let map = parse_lcov(resp.lcov.as_deref().unwrap()).unwrap();
        // The virtual call into build() executes it; the mergesort site line
        // inside build() is covered.
        let model = parse_fixture_dsl(include_str!("../../fixtures/graphhopper.fika")).unwrap();
        let site = &model.tpl_call_sites()[0];
        let file = model.file_of_method(&site.site.caller).unwrap();
        assert!(map.is_covered(file, site.line));
    }

    #[test]
    fn partial_execution_misses_the_target_line() {
        let adapter = golden();
        let resp = adapter
            .handle(
                "run",
                "call com.graphhopper.routing.ch.CHPreparationGraph#edgeBased(int,int,TurnCostFunction)\n",
            )
            .unwrap();
        let map = parse_lcov(resp.lcov.as_deref().unwrap()).unwrap();
        let model = parse_fixture_dsl(include_str!("../../fixtures/graphhopper.fika")).unwrap();
        let site = &model.tpl_call_sites()[0];
        let file = model.file_of_method(&site.site.caller).unwrap();
        assert!(!map.is_covered(file, site.line));
        // But the factory itself ran.
        let factory = MethodId::new(
            "com.graphhopper.routing.ch.CHPreparationGraph",
            "edgeBased(int,int,TurnCostFunction)",
        );
        let m = model.method(&factory).unwrap();
        assert!(map.any_covered_in(file, (m.line_start, m.line_end)));
    }

    #[test]
    fn forced_failures_surface_as_statuses() {
        let adapter = golden();
        let compile = adapter.handle("compile", "fail compile boom\n").unwrap();
        assert_eq!(compile.status, AdapterStatus::CompileError);
        assert_eq!(compile.diagnostics[0].message, "boom");

        let run = adapter.handle("run", "fail runtime exploded\n").unwrap();
        assert_eq!(run.status, AdapterStatus::RuntimeError);
        assert_eq!(run.diagnostics[0].message, "exploded");
    }

    #[test]
    fn syntax_errors_fail_compilation() {
        let adapter = golden();
        let resp = adapter.handle("compile", "launch the missiles\n").unwrap();
        assert_eq!(resp.status, AdapterStatus::CompileError);
        assert!(resp.diagnostics[0].message.contains("syntax error"));
    }
}
