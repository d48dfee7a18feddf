//! Vulnerability-rule triage: Semgrep-style classification of rules against
//! the model, augmented with call-site presence and executability evidence.

use std::collections::BTreeSet;

use globset::Glob;
use serde::{Deserialize, Serialize};

use crate::coverage::CoverageMap;
use crate::model::{MethodId, ProjectModel};
use crate::scenario::{OutcomeStatus, ScenarioOutcome};

/// Pattern half of a rule: a glob over fully qualified dotted method names,
/// optionally gated on an import in the calling class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RulePattern {
    pub method_glob: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub required_import: Option<String>,
}

/// One vulnerability rule. Rules without a pattern are presence-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VulnRule {
    pub rule_id: String,
    pub cve_id: String,
    /// `group:artifact` coordinate of the vulnerable dependency.
    pub coordinate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<RulePattern>,
    /// Exact versions considered vulnerable.
    #[serde(default)]
    pub vulnerable_versions: Vec<String>,
    /// Whether a bare presence match counts as (loosely) reachable.
    #[serde(default)]
    pub presence_positive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemgrepClass {
    StrongReachable,
    LooseReachable,
    Undetermined,
    Unreachable,
}

/// One supporting observation: a matched call site plus what covered it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Evidence {
    /// Rendered `m_dp -> m_tpl @ line`.
    pub site: String,
    /// `developer-tests` or `scenario:<file>`.
    #[serde(rename = "ref")]
    pub reference: String,
}

/// Classification plus executability evidence for one rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriageRow {
    pub rule_id: String,
    pub cve_id: String,
    pub module: String,
    pub coordinate: String,
    pub semgrep_class: SemgrepClass,
    pub call_site_present: bool,
    pub executable: bool,
    pub evidence: Vec<Evidence>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TriageError {
    #[error("rule {rule_id}: invalid glob: {message}")]
    BadGlob { rule_id: String, message: String },
    #[error("rule file error at {pointer}: {message}")]
    RuleFile { pointer: String, message: String },
}

/// Parses a JSON array of rules, reporting failures with a JSON pointer.
pub fn parse_rules(text: &str) -> Result<Vec<VulnRule>, TriageError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let pointer = if path == "." {
            String::new()
        } else {
            format!("/{}", path.replace('.', "/"))
        };
        TriageError::RuleFile {
            pointer,
            message: e.inner().to_string(),
        }
    })
}

/// A call-site-and-target pair the rule's matcher selected.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MatchedSite {
    pub m_dp: MethodId,
    pub m_tpl: MethodId,
    pub line: u32,
}

impl MatchedSite {
    fn render(&self) -> String {
        format!("{} -> {} @ {}", self.m_dp, self.m_tpl, self.line)
    }
}

fn pattern_matches(
    pattern: &RulePattern,
    matcher: &globset::GlobMatcher,
    model: &ProjectModel,
    m_dp: &MethodId,
    m_tpl: &MethodId,
) -> bool {
    if !matcher.is_match(m_tpl.dotted()) {
        return false;
    }
    match &pattern.required_import {
        None => true,
        // Imports belong to the compilation unit, so a nested or sibling
        // class declared in the same source file sees them too.
        Some(import) => model.file_of_method(m_dp).is_some_and(|file| {
            model
                .classes
                .iter()
                .filter(|c| c.file.as_deref() == Some(file))
                .any(|c| c.imports.iter().any(|i| i == import))
        }),
    }
}

/// The call sites a rule selects: glob matches for pattern rules, every call
/// into the coordinate's group for presence rules.
pub fn matched_sites(rule: &VulnRule, model: &ProjectModel) -> Result<Vec<MatchedSite>, TriageError> {
    let matcher = match &rule.pattern {
        Some(p) => Some(
            Glob::new(&p.method_glob)
                .map_err(|e| TriageError::BadGlob {
                    rule_id: rule.rule_id.clone(),
                    message: e.to_string(),
                })?
                .compile_matcher(),
        ),
        None => None,
    };
    let group_prefix = {
        let group = rule.coordinate.split(':').next().unwrap_or(&rule.coordinate);
        format!("{group}.")
    };

    let mut out = BTreeSet::new();
    for site in model.tpl_call_sites() {
        for target in &site.tpl_targets {
            let selected = match (&rule.pattern, &matcher) {
                (Some(p), Some(m)) => pattern_matches(p, m, model, &site.site.caller, target),
                _ => target.owner().starts_with(&group_prefix),
            };
            if selected {
                out.insert(MatchedSite {
                    m_dp: site.site.caller.clone(),
                    m_tpl: target.clone(),
                    line: site.line,
                });
            }
        }
    }
    Ok(out.into_iter().collect())
}

fn vulnerable_dependency_present(rule: &VulnRule, model: &ProjectModel) -> bool {
    model
        .dependencies
        .iter()
        .any(|d| d.coordinate == rule.coordinate && rule.vulnerable_versions.contains(&d.version))
}

/// Classifies one rule the way Semgrep would: pattern rules are strongly
/// reachable on a match and unreachable otherwise; presence rules are loosely
/// reachable only when flagged presence-positive and the vulnerable version
/// is actually on the dependency list, undetermined otherwise.
pub fn classify_rule(rule: &VulnRule, model: &ProjectModel) -> Result<SemgrepClass, TriageError> {
    match &rule.pattern {
        Some(_) => {
            if matched_sites(rule, model)?.is_empty() {
                Ok(SemgrepClass::Unreachable)
            } else {
                Ok(SemgrepClass::StrongReachable)
            }
        }
        None => {
            if rule.presence_positive && vulnerable_dependency_present(rule, model) {
                Ok(SemgrepClass::LooseReachable)
            } else {
                Ok(SemgrepClass::Undetermined)
            }
        }
    }
}

/// Augments a classification with presence and executability evidence from
/// developer coverage and reached scenarios.
pub fn augment(
    rule: &VulnRule,
    classification: SemgrepClass,
    model: &ProjectModel,
    dev_coverage: &CoverageMap,
    outcomes: &[ScenarioOutcome],
) -> Result<TriageRow, TriageError> {
    let matched = matched_sites(rule, model)?;
    let mut evidence = BTreeSet::new();
    for site in &matched {
        let Some(file) = model.file_of_method(&site.m_dp) else {
            continue;
        };
        if dev_coverage.is_covered(file, site.line) {
            evidence.insert(Evidence {
                site: site.render(),
                reference: "developer-tests".to_string(),
            });
            continue;
        }
        let reached = outcomes.iter().find(|o| {
            o.status == OutcomeStatus::Reached
                && o.site.m_dp == site.m_dp
                && o.site.m_tpl == site.m_tpl
                && o.lcov
                    .as_deref()
                    .and_then(|t| crate::coverage::parse_lcov(t).ok())
                    .is_some_and(|m| m.is_covered(file, site.line))
        });
        if let Some(outcome) = reached {
            let name = outcome.scenario_file.clone().unwrap_or_default();
            evidence.insert(Evidence {
                site: site.render(),
                reference: format!("scenario:{name}"),
            });
        }
    }
    let evidence: Vec<Evidence> = evidence.into_iter().collect();
    Ok(TriageRow {
        rule_id: rule.rule_id.clone(),
        cve_id: rule.cve_id.clone(),
        module: model.project_id.clone(),
        coordinate: rule.coordinate.clone(),
        semgrep_class: classification,
        call_site_present: !matched.is_empty(),
        executable: !evidence.is_empty(),
        evidence,
    })
}

/// Classifies and augments every rule, preserving rule order.
pub fn triage_rules(
    rules: &[VulnRule],
    model: &ProjectModel,
    dev_coverage: &CoverageMap,
    outcomes: &[ScenarioOutcome],
) -> Result<Vec<TriageRow>, TriageError> {
    rules
        .iter()
        .map(|rule| {
            let class = classify_rule(rule, model)?;
            augment(rule, class, model, dev_coverage, outcomes)
        })
        .collect()
}

/// Per-module projection of the triage rows: for each reachability class,
/// rule count, rules with a present call site, and rules with executability
/// evidence. Unreachable rules stay in the JSON rows but not in this table.
pub fn triage_csv(rows: &[TriageRow]) -> String {
    let mut modules: Vec<&str> = rows.iter().map(|r| r.module.as_str()).collect();
    modules.sort_unstable();
    modules.dedup();

    let mut out = String::from(
        "module,strong_semgrep,strong_present,strong_exec,\
         loose_semgrep,loose_present,loose_exec,\
         undet_semgrep,undet_present,undet_exec\n",
    );
    for module in modules {
        let mut cells = vec![module.to_string()];
        for class in [
            SemgrepClass::StrongReachable,
            SemgrepClass::LooseReachable,
            SemgrepClass::Undetermined,
        ] {
            let group: Vec<&TriageRow> = rows
                .iter()
                .filter(|r| r.module == module && r.semgrep_class == class)
                .collect();
            cells.push(group.len().to_string());
            cells.push(group.iter().filter(|r| r.call_site_present).count().to_string());
            cells.push(group.iter().filter(|r| r.executable).count().to_string());
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
