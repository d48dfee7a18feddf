//! Deterministic prompt assembly for the three ablation modes.
//!
//! BL1 carries only the direct caller's snippet, BL2 adds the path listing
//! and every hop snippet, FULL adds the instantiation context and the prior
//! attempt's feedback. Identical inputs render identical text; when the size
//! cap is exceeded the longest snippet is truncated first.

use crate::context::ContextBundle;
use crate::model::MethodId;

use super::{PromptConfig, PromptMode};

const INSTRUCTIONS: &str = "\
Write a unit test for the project below.
Requirements:
- Do not include any assertions.
- Do not modify any existing project method.
- Keep mocking to a minimum.";

const TRUNCATION_MARKER: &str = "\n// [snippet truncated]\n";
const TARGET_PREFIX: &str = "Target: reach the call to ";

/// The prompt line that names the goal; stable enough for replay providers
/// to key on.
pub fn target_line(m_dp: &MethodId, m_tpl: &MethodId) -> String {
    format!("{TARGET_PREFIX}{m_tpl} inside {m_dp}.")
}

/// Recovers (m_dp, m_tpl) from a prompt's target line.
pub fn parse_target_line(prompt: &str) -> Option<(String, String)> {
    let line = prompt
        .lines()
        .find_map(|l| l.strip_prefix(TARGET_PREFIX))?
        .strip_suffix('.')?;
    let (m_tpl, m_dp) = line.split_once(" inside ")?;
    Some((m_dp.to_string(), m_tpl.to_string()))
}

struct SnippetBlock {
    header: String,
    body: String,
}

impl SnippetBlock {
    fn new(label: &str, method: &MethodId, body: &str) -> Self {
        SnippetBlock {
            header: format!("### {label} {method}"),
            body: body.to_string(),
        }
    }

    fn render(&self) -> String {
        format!("{}\n{}", self.header, self.body)
    }
}

/// Builds the prompt for one target. `feedback` is embedded verbatim and only
/// in FULL mode.
pub fn build_prompt(
    bundle: &ContextBundle,
    config: &PromptConfig,
    feedback: Option<&str>,
) -> String {
    let m_dp = bundle
        .path
        .last()
        .expect("a path has at least the direct caller");
    let mut blocks: Vec<SnippetBlock> = Vec::new();
    match config.mode {
        PromptMode::Bl1 => {
            if let Some(last) = bundle.snippets.last() {
                blocks.push(SnippetBlock::new("Method", &last.method, &last.text));
            }
        }
        PromptMode::Bl2 | PromptMode::Full => {
            for s in &bundle.snippets {
                blocks.push(SnippetBlock::new("Method", &s.method, &s.text));
            }
        }
    }
    if config.mode == PromptMode::Full {
        for c in &bundle.constructors {
            blocks.push(SnippetBlock::new("Constructor", &c.method, &c.text));
        }
        for f in &bundle.factories {
            blocks.push(SnippetBlock::new("Factory", &f.method, &f.text));
        }
        for s in &bundle.setters {
            blocks.push(SnippetBlock::new("Setter", &s.method, &s.text));
        }
    }

    let render = |blocks: &[SnippetBlock]| -> String {
        let mut out = String::new();
        out.push_str(INSTRUCTIONS);
        out.push_str("\n\n");
        out.push_str(&target_line(m_dp, &bundle.target));
        out.push('\n');
        if matches!(config.mode, PromptMode::Bl2 | PromptMode::Full) {
            out.push_str("\nExecution path (entry first):\n");
            for (i, hop) in bundle.path.iter().enumerate() {
                out.push_str(&format!("{}. {hop}\n", i + 1));
            }
        }
        out.push_str("\nRelevant code:\n");
        for b in blocks {
            out.push('\n');
            out.push_str(&b.render());
        }
        if config.mode == PromptMode::Full {
            out.push_str("\nEntry instantiation context:\n");
            if bundle.fields.is_empty() {
                out.push_str("Fields: none\n");
            } else {
                out.push_str("Fields:\n");
                for f in &bundle.fields {
                    out.push_str(&format!("- {f}\n"));
                }
            }
            if bundle.imports.is_empty() {
                out.push_str("Imports: none\n");
            } else {
                out.push_str("Imports:\n");
                for imp in &bundle.imports {
                    out.push_str(&format!("- {imp}\n"));
                }
            }
            if bundle.hard_to_instantiate {
                out.push_str(
                    "Note: the entry class exposes no public constructor or factory; \
                     obtain an instance indirectly.\n",
                );
            }
            if let Some(fb) = feedback {
                out.push_str("\nPrevious attempt feedback:\n");
                out.push_str(fb);
                if !fb.ends_with('\n') {
                    out.push('\n');
                }
            }
        }
        out
    };

    loop {
        let rendered = render(&blocks);
        if rendered.len() <= config.prompt_char_cap {
            return rendered;
        }
        let overflow = rendered.len() - config.prompt_char_cap;
        // Longest body first; earliest block wins ties.
        let candidate = blocks
            .iter()
            .enumerate()
            .max_by_key(|(i, b)| (b.body.len(), std::cmp::Reverse(*i)))
            .map(|(i, b)| (i, b.body.len()));
        let Some((idx, len)) = candidate else {
            return rendered;
        };
        if len <= TRUNCATION_MARKER.len() {
            return rendered; // nothing left to shrink
        }
        let mut keep = len.saturating_sub(overflow + TRUNCATION_MARKER.len());
        while keep > 0 && !blocks[idx].body.is_char_boundary(keep) {
            keep -= 1;
        }
        let mut body = blocks[idx].body[..keep].to_string();
        body.push_str(TRUNCATION_MARKER);
        blocks[idx].body = body;
    }
}
