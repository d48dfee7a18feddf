//! LCOV subset parser and coverage evidence over model call sites.
//!
//! Recognized records: `SF:<path>`, `DA:<line>,<hits>` and `end_of_record`.
//! Every other record kind is ignored. CRLF input is tolerated and repeated
//! lines merge by summing hits.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::graph::CallPath;
use crate::model::{MethodId, ProjectModel, SiteRef, TplCallSite};

/// Line hit counts per source file, plus where they came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CoverageMap {
    pub files: BTreeMap<String, BTreeMap<u32, u64>>,
    /// Labels of the inputs merged into this map, in merge order.
    pub provenance: Vec<String>,
}

/// Malformed LCOV record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcovError {
    pub line: u32,
    pub message: String,
}

impl fmt::Display for LcovError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lcov format error at line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for LcovError {}

/// Parses LCOV text into a coverage map. Empty input yields an empty map.
pub fn parse_lcov(text: &str) -> Result<CoverageMap, LcovError> {
    let mut map = CoverageMap::default();
    let mut current_file: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx as u32 + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        if let Some(path) = line.strip_prefix("SF:") {
            if path.is_empty() {
                return Err(LcovError {
                    line: line_no,
                    message: "SF record with empty path".into(),
                });
            }
            current_file = Some(path.to_string());
            map.files.entry(path.to_string()).or_default();
            continue;
        }
        if let Some(rest) = line.strip_prefix("DA:") {
            let Some(file) = current_file.as_ref() else {
                return Err(LcovError {
                    line: line_no,
                    message: "DA record outside an SF section".into(),
                });
            };
            let mut parts = rest.splitn(2, ',');
            let num = parts.next().unwrap_or("");
            let hits_text = parts.next().ok_or_else(|| LcovError {
                line: line_no,
                message: "DA record without a hit count".into(),
            })?;
            let lineno: u32 = num.trim().parse().map_err(|_| LcovError {
                line: line_no,
                message: format!("DA record with a malformed line number: {num}"),
            })?;
            let hits: u64 = hits_text.trim().parse().map_err(|_| LcovError {
                line: line_no,
                message: format!("DA record with a malformed hit count: {hits_text}"),
            })?;
            *map.files
                .get_mut(file)
                .expect("section entry created at SF")
                .entry(lineno)
                .or_insert(0) += hits;
            continue;
        }
        if line == "end_of_record" {
            current_file = None;
            continue;
        }
        // Other record kinds (TN, FN, FNDA, LF, LH, BRDA, ...) are ignored.
    }
    Ok(map)
}

impl CoverageMap {
    /// Tags this map with the label of its input.
    pub fn with_label(mut self, label: &str) -> Self {
        self.provenance.push(label.to_string());
        self
    }

    pub fn hits(&self, file: &str, line: u32) -> u64 {
        self.files
            .get(file)
            .and_then(|lines| lines.get(&line).copied())
            .unwrap_or(0)
    }

    pub fn is_covered(&self, file: &str, line: u32) -> bool {
        self.hits(file, line) > 0
    }

    /// Any covered line within `range` of `file`.
    pub fn any_covered_in(&self, file: &str, range: (u32, u32)) -> bool {
        self.files.get(file).is_some_and(|lines| {
            lines.range(range.0..=range.1).any(|(_, &hits)| hits > 0)
        })
    }

    /// Unions another map into this one, summing per-line hits.
    pub fn merge(&mut self, other: &CoverageMap) {
        for (file, lines) in &other.files {
            let entry = self.files.entry(file.clone()).or_default();
            for (&line, &hits) in lines {
                *entry.entry(line).or_insert(0) += hits;
            }
        }
        for label in &other.provenance {
            if !self.provenance.contains(label) {
                self.provenance.push(label.clone());
            }
        }
    }

    /// Merged copy of all maps, in order.
    pub fn union<'a>(maps: impl IntoIterator<Item = &'a CoverageMap>) -> CoverageMap {
        let mut out = CoverageMap::default();
        for map in maps {
            out.merge(map);
        }
        out
    }
}

/// Coverage verdict for one tpl call site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SiteVerdict {
    pub site: SiteRef,
    pub line: u32,
    /// Source file of the calling class; `None` when the model has no file.
    pub file: Option<String>,
    pub tpl_targets: Vec<MethodId>,
    pub covered: bool,
    pub hits: u64,
}

/// Verdict per site: covered when the site line has a positive hit count in
/// the calling class's file.
pub fn covered_sites(
    coverage: &CoverageMap,
    sites: &[TplCallSite],
    model: &ProjectModel,
) -> Vec<SiteVerdict> {
    sites
        .iter()
        .map(|s| {
            let file = model.file_of_method(&s.site.caller).map(str::to_string);
            let hits = file
                .as_deref()
                .map(|f| coverage.hits(f, s.line))
                .unwrap_or(0);
            SiteVerdict {
                site: s.site.clone(),
                line: s.line,
                file,
                tpl_targets: s.tpl_targets.clone(),
                covered: hits > 0,
                hits,
            }
        })
        .collect()
}

/// Where execution evidence stops along a path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Divergence {
    /// Every hop and the target site line are covered.
    None,
    /// First hop with no covered line in its range.
    AtHop { index: usize, method: MethodId },
    /// All hops covered but the target site line is not.
    TargetLine { file: String, line: u32 },
}

/// Walks the path hops in order against the coverage map.
pub fn divergence_report(
    coverage: &CoverageMap,
    path: &CallPath,
    model: &ProjectModel,
) -> Divergence {
    for (index, hop) in path.hops.iter().enumerate() {
        let reached = model.method(hop).is_some_and(|m| {
            model
                .file_of_method(hop)
                .is_some_and(|file| coverage.any_covered_in(file, (m.line_start, m.line_end)))
        });
        if !reached {
            return Divergence::AtHop {
                index,
                method: hop.clone(),
            };
        }
    }
    let file = model
        .file_of_method(&path.direct_caller)
        .unwrap_or("")
        .to_string();
    if !coverage.is_covered(&file, path.line) {
        return Divergence::TargetLine { file, line: path.line };
    }
    Divergence::None
}

impl Divergence {
    /// One-line rendering used in feedback text.
    pub fn render(&self, path: &CallPath) -> String {
        match self {
            Divergence::None => "target reached".to_string(),
            Divergence::AtHop { index, method } => {
                let covered: Vec<String> =
                    path.hops[..*index].iter().map(|h| h.to_string()).collect();
                if covered.is_empty() {
                    format!("execution never reached the path; diverged at: {method}")
                } else {
                    format!("covered hops: {}; diverged at: {method}", covered.join(", "))
                }
            }
            Divergence::TargetLine { file, line } => {
                format!("all hops executed; diverged at: target line {file}:{line}")
            }
        }
    }
}
