//! Context bundles for scenario prompts: annotated path snippets plus the
//! instantiation context of the entry class.
//!
//! Each snippet is the method's source slice with a PATH comment inserted
//! before every line that advances the path. The entry context collects
//! public constructors (or factories when no public constructor exists),
//! setters, fields and the imports referenced by the collected snippets.

use serde::Serialize;

use crate::graph::CallPath;
use crate::model::hierarchy::Hierarchy;
use crate::model::{MethodId, ProjectModel, Visibility};

/// Source slice of one method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Snippet {
    pub method: MethodId,
    pub text: String,
}

/// Path snippet; `degraded` marks a missing-source placeholder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnotatedSnippet {
    pub method: MethodId,
    pub text: String,
    #[serde(skip)]
    pub degraded: bool,
}

/// Everything a prompt needs to know about one enumerated path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextBundle {
    pub path: Vec<MethodId>,
    pub target: MethodId,
    pub snippets: Vec<AnnotatedSnippet>,
    pub constructors: Vec<Snippet>,
    pub factories: Vec<Snippet>,
    pub setters: Vec<Snippet>,
    /// Field declarations rendered as `type name`.
    pub fields: Vec<String>,
    pub imports: Vec<String>,
    /// No public constructor and no factory on the entry class.
    pub hard_to_instantiate: bool,
    /// Some snippet had no source text behind it.
    pub degraded: bool,
}

#[derive(Serialize)]
struct BundleDoc<'a> {
    path: &'a [MethodId],
    snippets: &'a [AnnotatedSnippet],
    constructors: &'a [Snippet],
    factories: &'a [Snippet],
    setters: &'a [Snippet],
    fields: &'a [String],
    imports: &'a [String],
}

impl ContextBundle {
    /// Canonical JSON form (stable key order).
    pub fn to_json(&self) -> String {
        let doc = BundleDoc {
            path: &self.path,
            snippets: &self.snippets,
            constructors: &self.constructors,
            factories: &self.factories,
            setters: &self.setters,
            fields: &self.fields,
            imports: &self.imports,
        };
        let mut text =
            serde_json::to_string_pretty(&doc).expect("bundle serialization cannot fail");
        text.push('\n');
        text
    }
}

/// PATH comment naming the callee the test must drive execution into next.
fn path_comment(next: &MethodId) -> String {
    format!(
        "// PATH: Test should invoke the next {}.{}(...) [step in execution path]",
        next.simple_owner(),
        next.name()
    )
}

fn method_source(model: &ProjectModel, id: &MethodId) -> Option<Vec<String>> {
    let method = model.method(id)?;
    let file = model.file_of_method(id)?;
    let lines = model.source_lines(file)?;
    let start = method.line_start as usize;
    let end = (method.line_end as usize).min(lines.len());
    if start == 0 || start > lines.len() {
        return None;
    }
    Some(lines[start - 1..end].iter().map(|l| l.to_string()).collect())
}

/// Extracts one annotated snippet per hop. A hop without source text yields a
/// placeholder marked degraded. Re-running on its own output inserts nothing
/// new: an already-present comment line is never duplicated.
pub fn extract_snippets(model: &ProjectModel, path: &CallPath) -> Vec<AnnotatedSnippet> {
    let hierarchy = Hierarchy::new(model);
    let mut out = Vec::new();
    for (i, hop) in path.hops.iter().enumerate() {
        let next = if i + 1 < path.hops.len() {
            path.hops[i + 1].clone()
        } else {
            path.target.clone()
        };
        let Some(method) = model.method(hop) else {
            out.push(AnnotatedSnippet {
                method: hop.clone(),
                text: format!("// source unavailable for {hop}\n"),
                degraded: true,
            });
            continue;
        };
        let Some(lines) = method_source(model, hop) else {
            out.push(AnnotatedSnippet {
                method: hop.clone(),
                text: format!("// source unavailable for {hop}\n"),
                degraded: true,
            });
            continue;
        };
        // Lines whose call sites resolve to the next hop (or the tpl target).
        let mut advancing: Vec<u32> = method
            .calls
            .iter()
            .filter(|c| hierarchy.resolve(c).targets.contains(&next))
            .map(|c| c.line)
            .collect();
        advancing.sort_unstable();
        advancing.dedup();

        let comment = path_comment(&next);
        let mut text = String::new();
        for (offset, line) in lines.iter().enumerate() {
            let line_no = method.line_start + offset as u32;
            if advancing.contains(&line_no) && line.trim() != comment {
                let prev_is_comment = text.lines().last().is_some_and(|l| l.trim() == comment);
                if !prev_is_comment {
                    let indent: String =
                        line.chars().take_while(|c| c.is_whitespace()).collect();
                    text.push_str(&indent);
                    text.push_str(&comment);
                    text.push('\n');
                }
            }
            text.push_str(line);
            text.push('\n');
        }
        out.push(AnnotatedSnippet {
            method: hop.clone(),
            text,
            degraded: false,
        });
    }
    out
}

/// Instantiation context of the entry method's class.
pub struct EntryContext {
    pub constructors: Vec<Snippet>,
    pub factories: Vec<Snippet>,
    pub setters: Vec<Snippet>,
    pub fields: Vec<String>,
    /// Unfiltered imports of the entry class; the bundle restricts them.
    pub imports: Vec<String>,
    pub hard_to_instantiate: bool,
}

pub fn extract_entry_context(model: &ProjectModel, entry: &MethodId) -> EntryContext {
    let Some(class) = model.class_of_method(entry) else {
        return EntryContext {
            constructors: Vec::new(),
            factories: Vec::new(),
            setters: Vec::new(),
            fields: Vec::new(),
            imports: Vec::new(),
            hard_to_instantiate: true,
        };
    };
    let snippet_of = |id: &MethodId| -> Snippet {
        Snippet {
            method: id.clone(),
            text: method_source(model, id)
                .map(|lines| {
                    let mut t = lines.join("\n");
                    t.push('\n');
                    t
                })
                .unwrap_or_else(|| format!("// source unavailable for {id}\n")),
        }
    };

    let constructors: Vec<Snippet> = class
        .constructors()
        .filter(|m| m.visibility == Visibility::Public)
        .map(|m| snippet_of(&m.id))
        .collect();
    let factories: Vec<Snippet> = if constructors.is_empty() {
        class
            .methods
            .iter()
            .filter(|m| m.is_factory && m.visibility == Visibility::Public)
            .map(|m| snippet_of(&m.id))
            .collect()
    } else {
        Vec::new()
    };
    let setters: Vec<Snippet> = class
        .methods
        .iter()
        .filter(|m| m.is_setter)
        .map(|m| snippet_of(&m.id))
        .collect();
    let fields: Vec<String> = class
        .fields
        .iter()
        .map(|f| format!("{} {}", f.type_name, f.name))
        .collect();
    let has_public_ctor = !constructors.is_empty();
    let has_factory = class
        .methods
        .iter()
        .any(|m| m.is_factory && m.visibility == Visibility::Public);

    EntryContext {
        constructors,
        factories,
        setters,
        fields,
        imports: class.imports.clone(),
        hard_to_instantiate: !has_public_ctor && !has_factory,
    }
}

/// Whole-word occurrence check over identifier characters.
fn contains_word(text: &str, word: &str) -> bool {
    if word.is_empty() {
        return false;
    }
    let is_ident = |c: char| c.is_alphanumeric() || c == '_' || c == '$';
    let mut start = 0;
    while let Some(pos) = text[start..].find(word) {
        let at = start + pos;
        let before_ok = at == 0 || !text[..at].chars().next_back().is_some_and(is_ident);
        let after = at + word.len();
        let after_ok = after >= text.len() || !text[after..].chars().next().is_some_and(is_ident);
        if before_ok && after_ok {
            return true;
        }
        start = at + word.len().max(1);
    }
    false
}

/// Builds the full bundle for one path: annotated snippets plus the entry
/// context, with imports restricted to types the snippets mention.
pub fn build_bundle(model: &ProjectModel, path: &CallPath) -> ContextBundle {
    let snippets = extract_snippets(model, path);
    let entry = extract_entry_context(model, &path.entry);
    let degraded = snippets.iter().any(|s| s.degraded);

    let mut referenced_text = String::new();
    for s in &snippets {
        referenced_text.push_str(&s.text);
    }
    for s in entry
        .constructors
        .iter()
        .chain(&entry.factories)
        .chain(&entry.setters)
    {
        referenced_text.push_str(&s.text);
    }
    for f in &entry.fields {
        referenced_text.push_str(f);
        referenced_text.push('\n');
    }
    let imports: Vec<String> = entry
        .imports
        .iter()
        .filter(|imp| {
            let simple = imp.rsplit('.').next().unwrap_or(imp);
            contains_word(&referenced_text, simple)
        })
        .cloned()
        .collect();

    ContextBundle {
        path: path.hops.clone(),
        target: path.target.clone(),
        snippets,
        constructors: entry.constructors,
        factories: entry.factories,
        setters: entry.setters,
        fields: entry.fields,
        imports,
        hard_to_instantiate: entry.hard_to_instantiate,
        degraded,
    }
}
