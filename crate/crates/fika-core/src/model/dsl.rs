//! Line-oriented fixture DSL for building models in tests and examples.
//!
//! ```text
//! project demo
//! dependency com.example:lib 1.0.0 direct compile
//! class p.A : p.Base file src/A.java {
//!   import com.example.lib.Util
//!   field counter int
//!   @factory
//!   public static create() {
//!   }
//!   public m() {
//!     call B.f@7
//!     call static Util.helper(int)
//!     call new p.A()
//!   }
//! }
//! dep class com.example.lib.Util {
//!   public static helper(int)
//! }
//! ```
//!
//! Method line ranges come from physical positions, widened to cover any
//! explicit `@LINE` on a call so the recorded site stays inside its owner.
//! The document text itself is registered as the source for project classes.

use std::collections::BTreeMap;
use std::fmt;

use super::{
    CallSite, ClassDecl, DependencyDecl, Dispatch, FieldDecl, MethodDecl, MethodId, ModelError,
    ProjectModel, Visibility,
};

/// Syntax failure with position and the token set that was expected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: expected {}, found {}",
            self.line,
            self.column,
            self.expected.join(" | "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

/// Fixture parsing failure: bad syntax, or a model-level violation in the
/// parsed result.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DslError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Model(#[from] ModelError),
}

struct RawCall {
    receiver_text: String,
    name_sig: String,
    explicit_line: Option<u32>,
    physical_line: u32,
    dispatch: Dispatch,
}

struct RawMethod {
    name_sig: String,
    visibility: Visibility,
    is_static: bool,
    is_constructor: bool,
    is_factory: bool,
    is_setter: bool,
    header_line: u32,
    end_line: u32,
    calls: Vec<RawCall>,
}

struct RawClass {
    fq_name: String,
    supertypes: Vec<String>,
    is_project: bool,
    file: Option<String>,
    imports: Vec<String>,
    fields: Vec<FieldDecl>,
    methods: Vec<RawMethod>,
}

fn err(line: u32, column: u32, expected: &[&str], found: &str) -> ParseError {
    ParseError {
        line,
        column,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found: found.to_string(),
    }
}

/// Parses the fixture DSL into the same validated model the JSON path builds.
pub fn parse_fixture_dsl(text: &str) -> Result<ProjectModel, DslError> {
    let mut project_id: Option<String> = None;
    let mut dependencies: Vec<DependencyDecl> = Vec::new();
    let mut classes: Vec<RawClass> = Vec::new();

    let mut current_class: Option<RawClass> = None;
    let mut current_method: Option<RawMethod> = None;
    let mut pending_factory = false;
    let mut pending_setter = false;
    let mut last_line_no = 0u32;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx as u32 + 1;
        last_line_no = line_no;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let column = (raw_line.len() - raw_line.trim_start().len()) as u32 + 1;

        if let Some(method) = current_method.as_mut() {
            if trimmed == "}" {
                method.end_line = line_no;
                let class = current_class.as_mut().expect("method implies class");
                class
                    .methods
                    .push(current_method.take().expect("checked above"));
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("call ") {
                let call = parse_call(rest.trim(), line_no, column)?;
                method.calls.push(call);
                continue;
            }
            return Err(err(line_no, column, &["call", "}"], trimmed).into());
        }

        if let Some(class) = current_class.as_mut() {
            if trimmed == "}" {
                if pending_factory || pending_setter {
                    return Err(err(line_no, column, &["method header"], "}").into());
                }
                classes.push(current_class.take().expect("checked above"));
                continue;
            }
            if trimmed == "@factory" {
                pending_factory = true;
                continue;
            }
            if trimmed == "@setter" {
                pending_setter = true;
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("import ") {
                class.imports.push(rest.trim().to_string());
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("field ") {
                let mut parts = rest.split_whitespace();
                let (Some(name), Some(ty)) = (parts.next(), parts.next()) else {
                    return Err(err(line_no, column, &["field <name> <type>"], rest).into());
                };
                if parts.next().is_some() {
                    return Err(err(line_no, column, &["field <name> <type>"], rest).into());
                }
                class.fields.push(FieldDecl {
                    name: name.to_string(),
                    type_name: ty.to_string(),
                });
                continue;
            }
            let mut method = parse_method_header(trimmed, line_no, column)?;
            method.is_factory = pending_factory;
            method.is_setter = pending_setter;
            pending_factory = false;
            pending_setter = false;
            if method.end_line == 0 {
                current_method = Some(method);
            } else {
                class.methods.push(method);
            }
            continue;
        }

        if let Some(rest) = trimmed.strip_prefix("project ") {
            if project_id.is_some() {
                return Err(err(line_no, column, &["dependency", "class", "dep class"], "project").into());
            }
            project_id = Some(rest.trim().to_string());
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("dependency ") {
            dependencies.push(parse_dependency(rest.trim(), line_no, column)?);
            continue;
        }
        let (is_project, header) = if let Some(rest) = trimmed.strip_prefix("dep class ") {
            (false, rest)
        } else if let Some(rest) = trimmed.strip_prefix("class ") {
            (true, rest)
        } else {
            return Err(err(
                line_no,
                column,
                &["project", "dependency", "class", "dep class"],
                trimmed,
            )
            .into());
        };
        if project_id.is_none() {
            return Err(err(line_no, column, &["project <id>"], trimmed).into());
        }
        current_class = Some(parse_class_header(header.trim(), is_project, line_no, column)?);
    }

    if current_method.is_some() || current_class.is_some() {
        return Err(err(last_line_no, 1, &["}"], "end of input").into());
    }
    let Some(project_id) = project_id else {
        return Err(err(1, 1, &["project <id>"], "end of input").into());
    };

    assemble(project_id, dependencies, classes, text)
}

fn parse_dependency(rest: &str, line: u32, column: u32) -> Result<DependencyDecl, ParseError> {
    let mut parts = rest.split_whitespace();
    let (Some(coordinate), Some(version)) = (parts.next(), parts.next()) else {
        return Err(err(line, column, &["dependency <group:artifact> <version>"], rest));
    };
    if !coordinate.contains(':') {
        return Err(err(line, column, &["<group:artifact>"], coordinate));
    }
    let mut direct = true;
    let mut scope = "compile".to_string();
    for tok in parts {
        match tok {
            "direct" => direct = true,
            "transitive" => direct = false,
            other => scope = other.to_string(),
        }
    }
    Ok(DependencyDecl {
        coordinate: coordinate.to_string(),
        version: version.to_string(),
        direct,
        scope,
    })
}

fn parse_class_header(
    header: &str,
    is_project: bool,
    line: u32,
    column: u32,
) -> Result<RawClass, ParseError> {
    let Some(body) = header.strip_suffix('{') else {
        return Err(err(line, column, &["{"], header));
    };
    let body = body.trim();
    let (rest, file) = match body.find(" file ") {
        Some(i) => {
            let file = body[i + 6..].trim().to_string();
            (body[..i].trim(), Some(file))
        }
        None => (body, None),
    };
    let (name, supertypes) = match rest.find(':') {
        Some(i) => {
            let supers = rest[i + 1..]
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            (rest[..i].trim(), supers)
        }
        None => (rest, Vec::new()),
    };
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(err(line, column, &["class name"], rest));
    }
    Ok(RawClass {
        fq_name: name.to_string(),
        supertypes,
        is_project,
        file,
        imports: Vec::new(),
        fields: Vec::new(),
        methods: Vec::new(),
    })
}

fn parse_method_header(text: &str, line: u32, column: u32) -> Result<RawMethod, ParseError> {
    // Forms: `...) {` opens a body, `...) {}` or `...)` declares an empty one.
    let (sig_text, closed) = if let Some(rest) = text.strip_suffix("{}") {
        (rest.trim(), true)
    } else if let Some(rest) = text.strip_suffix('{') {
        (rest.trim(), false)
    } else {
        (text, true)
    };
    let Some(open) = sig_text.find('(') else {
        return Err(err(line, column, &["<name>(<params>)"], text));
    };
    let Some(close) = sig_text.rfind(')') else {
        return Err(err(line, column, &[")"], text));
    };
    if close < open {
        return Err(err(line, column, &["<name>(<params>)"], text));
    }
    let params = normalize_params(&sig_text[open + 1..close]);
    let head = sig_text[..open].trim();
    let mut visibility = Visibility::Package;
    let mut is_static = false;
    let mut name: Option<&str> = None;
    for tok in head.split_whitespace() {
        match tok {
            "public" => visibility = Visibility::Public,
            "protected" => visibility = Visibility::Protected,
            "package" => visibility = Visibility::Package,
            "private" => visibility = Visibility::Private,
            "static" => is_static = true,
            other => {
                if name.is_some() {
                    return Err(err(line, column, &["(", "modifier"], other));
                }
                name = Some(other);
            }
        }
    }
    let Some(name) = name else {
        return Err(err(line, column, &["method name"], text));
    };
    let is_constructor = name == "ctor";
    let name = if is_constructor { "<init>" } else { name };
    Ok(RawMethod {
        name_sig: format!("{name}({params})"),
        visibility,
        is_static,
        is_constructor,
        is_factory: false,
        is_setter: false,
        header_line: line,
        end_line: if closed { line } else { 0 },
        calls: Vec::new(),
    })
}

fn parse_call(rest: &str, line: u32, column: u32) -> Result<RawCall, ParseError> {
    let (dispatch, rest) = if let Some(r) = rest.strip_prefix("static ") {
        (Dispatch::Static, r.trim())
    } else if let Some(r) = rest.strip_prefix("new ") {
        (Dispatch::Constructor, r.trim())
    } else {
        (Dispatch::Virtual, rest)
    };

    // A trailing `@<line>` marker: digits after the last `@`.
    let (ref_text, explicit_line) = match rest.rfind('@') {
        Some(i) => {
            let num = rest[i + 1..].trim();
            let parsed = num
                .parse::<u32>()
                .map_err(|_| err(line, column, &["line number"], num))?;
            (rest[..i].trim(), Some(parsed))
        }
        None => (rest, None),
    };

    let (path_text, params) = match ref_text.find('(') {
        Some(open) => {
            let Some(close) = ref_text.rfind(')') else {
                return Err(err(line, column, &[")"], ref_text));
            };
            (ref_text[..open].trim(), normalize_params(&ref_text[open + 1..close]))
        }
        None => (ref_text.trim(), String::new()),
    };

    let (receiver_text, name) = match dispatch {
        Dispatch::Constructor => (path_text.to_string(), "<init>".to_string()),
        _ => {
            let Some(dot) = path_text.rfind('.') else {
                return Err(err(line, column, &["<receiver>.<method>"], path_text));
            };
            (path_text[..dot].to_string(), path_text[dot + 1..].to_string())
        }
    };
    if receiver_text.is_empty() || name.is_empty() {
        return Err(err(line, column, &["<receiver>.<method>"], path_text));
    }

    Ok(RawCall {
        receiver_text,
        name_sig: format!("{name}({params})"),
        explicit_line,
        physical_line: line,
        dispatch,
    })
}

fn normalize_params(raw: &str) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in raw.chars() {
        match ch {
            '<' => {
                depth += 1;
                cur.push(ch);
            }
            '>' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        parts.push(cur.trim().to_string());
    }
    parts.join(",")
}

fn assemble(
    project_id: String,
    dependencies: Vec<DependencyDecl>,
    raw_classes: Vec<RawClass>,
    text: &str,
) -> Result<ProjectModel, DslError> {
    let default_file = format!("{project_id}.fika");

    // Simple-name table for receiver resolution; `$` nesting kept intact.
    let mut by_simple: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for class in &raw_classes {
        let simple = class.fq_name.rsplit('.').next().unwrap_or(&class.fq_name);
        by_simple.entry(simple).or_default().push(&class.fq_name);
    }
    let known: BTreeMap<&str, ()> = raw_classes
        .iter()
        .map(|c| (c.fq_name.as_str(), ()))
        .collect();

    let resolve_type = |name: &str, imports: &[String]| -> String {
        if known.contains_key(name) {
            return name.to_string();
        }
        if let Some(fqs) = by_simple.get(name) {
            if fqs.len() == 1 {
                return fqs[0].to_string();
            }
        }
        for imp in imports {
            if imp.ends_with(&format!(".{name}")) || imp == name {
                return imp.clone();
            }
        }
        name.to_string()
    };

    let mut classes = Vec::new();
    let mut sources = BTreeMap::new();
    for raw in &raw_classes {
        let file = match (&raw.file, raw.is_project) {
            (Some(f), _) => Some(f.clone()),
            (None, true) => Some(default_file.clone()),
            (None, false) => None,
        };
        if let Some(f) = &file {
            if raw.is_project {
                sources.insert(f.clone(), text.to_string());
            }
        }
        let mut methods = Vec::new();
        for m in &raw.methods {
            let mut calls = Vec::new();
            let mut line_start = m.header_line;
            let mut line_end = m.end_line.max(m.header_line);
            for c in &m.calls {
                let line = c.explicit_line.unwrap_or(c.physical_line);
                line_start = line_start.min(line);
                line_end = line_end.max(line);
                let receiver = resolve_type(&c.receiver_text, &raw.imports);
                calls.push(CallSite {
                    receiver_type: Some(receiver),
                    target: c.name_sig.clone(),
                    line,
                    dispatch: c.dispatch,
                });
            }
            methods.push(MethodDecl {
                id: MethodId::new(&raw.fq_name, &m.name_sig),
                visibility: m.visibility,
                is_static: m.is_static,
                is_constructor: m.is_constructor,
                is_factory: m.is_factory,
                is_setter: m.is_setter,
                line_start,
                line_end,
                calls,
            });
        }
        classes.push(ClassDecl {
            fq_name: raw.fq_name.clone(),
            supertypes: raw.supertypes.clone(),
            is_project_class: raw.is_project,
            file,
            imports: raw.imports.clone(),
            fields: raw.fields.clone(),
            methods,
        });
    }

    Ok(ProjectModel::build(project_id, dependencies, classes, sources)?)
}
