//! Portable code model: classes, methods, call sites, dependencies and
//! source text, loadable from canonical JSON or the fixture DSL.

pub mod dsl;
pub mod hierarchy;
pub mod json;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Unique method identifier: `owner_fq#name(params)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MethodId(pub String);

impl MethodId {
    pub fn new(owner: &str, name_sig: &str) -> Self {
        MethodId(format!("{owner}#{name_sig}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Owning class fq name (text before `#`).
    pub fn owner(&self) -> &str {
        self.0.split('#').next().unwrap_or(&self.0)
    }

    /// Name plus parameter list (text after `#`).
    pub fn name_sig(&self) -> &str {
        match self.0.find('#') {
            Some(i) => &self.0[i + 1..],
            None => &self.0,
        }
    }

    /// Bare method name without the parameter list.
    pub fn name(&self) -> &str {
        let ns = self.name_sig();
        ns.split('(').next().unwrap_or(ns)
    }

    /// Last dotted segment of the owner, e.g. `Outer$Inner` for nested classes.
    pub fn simple_owner(&self) -> &str {
        self.owner().rsplit('.').next().unwrap_or_else(|| self.owner())
    }

    /// Dotted rendering `owner.name(params)` used for pattern matching.
    pub fn dotted(&self) -> String {
        self.0.replacen('#', ".", 1)
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Visibility {
    Public,
    Protected,
    Package,
    Private,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dispatch {
    Virtual,
    Static,
    Constructor,
}

/// One invocation recorded inside a method body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CallSite {
    /// Declared receiver class fq name; absent for static calls with a qualified target.
    #[serde(default)]
    pub receiver_type: Option<String>,
    /// Invoked `name(params)`, or fully qualified `owner#name(params)`.
    pub target: String,
    pub line: u32,
    pub dispatch: Dispatch,
}

impl CallSite {
    /// Name-and-signature part of the target, stripped of any owner qualifier.
    pub fn target_name_sig(&self) -> &str {
        match self.target.find('#') {
            Some(i) => &self.target[i + 1..],
            None => &self.target,
        }
    }

    /// Owner qualifier embedded in the target, when present.
    pub fn target_owner(&self) -> Option<&str> {
        self.target.find('#').map(|i| &self.target[..i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodDecl {
    pub id: MethodId,
    pub visibility: Visibility,
    pub is_static: bool,
    pub is_constructor: bool,
    pub is_factory: bool,
    pub is_setter: bool,
    pub line_start: u32,
    pub line_end: u32,
    pub calls: Vec<CallSite>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDecl {
    pub name: String,
    #[serde(rename = "type")]
    pub type_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassDecl {
    pub fq_name: String,
    pub supertypes: Vec<String>,
    pub is_project_class: bool,
    #[serde(default)]
    pub file: Option<String>,
    pub imports: Vec<String>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
}

impl ClassDecl {
    /// Last dotted segment, keeping `$` nesting markers.
    pub fn simple_name(&self) -> &str {
        self.fq_name.rsplit('.').next().unwrap_or(&self.fq_name)
    }

    /// Declared constructors (methods flagged `is_constructor`).
    pub fn constructors(&self) -> impl Iterator<Item = &MethodDecl> {
        self.methods.iter().filter(|m| m.is_constructor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DependencyDecl {
    /// `group:artifact` coordinate.
    pub coordinate: String,
    pub version: String,
    pub direct: bool,
    pub scope: String,
}

impl DependencyDecl {
    /// Group id rendered as a dotted package prefix, e.g. `com.carrotsearch.`.
    pub fn group_prefix(&self) -> String {
        let group = self.coordinate.split(':').next().unwrap_or(&self.coordinate);
        format!("{group}.")
    }
}

/// Validated in-memory model with lookup indexes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectModel {
    pub project_id: String,
    pub dependencies: Vec<DependencyDecl>,
    pub classes: Vec<ClassDecl>,
    pub sources: BTreeMap<String, String>,
    class_index: BTreeMap<String, usize>,
    method_index: BTreeMap<MethodId, (usize, usize)>,
}

/// Reference to one call site: the calling method plus the call's ordinal
/// position inside its body.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SiteRef {
    pub caller: MethodId,
    pub ordinal: usize,
}

impl fmt::Display for SiteRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.caller, self.ordinal)
    }
}

/// A project call site whose resolved targets include dependency methods.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TplCallSite {
    pub site: SiteRef,
    pub line: u32,
    /// Resolved dependency-method targets, sorted.
    pub tpl_targets: Vec<MethodId>,
}

/// Model construction and validation failures.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    /// Structural violation: missing field, wrong kind, or a value constraint,
    /// located by a JSON pointer.
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    /// Dangling or duplicate class or method identifier.
    #[error("reference error for {id}: {message}")]
    Reference { id: String, message: String },
    /// Supertype cycle, listed in discovery order.
    #[error("supertype cycle: {}", cycle.join(" -> "))]
    Cycle { cycle: Vec<String> },
}

impl ProjectModel {
    /// Builds and validates a model from raw parts.
    pub fn build(
        project_id: String,
        dependencies: Vec<DependencyDecl>,
        classes: Vec<ClassDecl>,
        sources: BTreeMap<String, String>,
    ) -> Result<Self, ModelError> {
        let mut class_index = BTreeMap::new();
        for (ci, class) in classes.iter().enumerate() {
            if class_index.insert(class.fq_name.clone(), ci).is_some() {
                return Err(ModelError::Reference {
                    id: class.fq_name.clone(),
                    message: "duplicate class".into(),
                });
            }
        }

        let mut seen_coords = BTreeMap::new();
        for dep in &dependencies {
            if seen_coords.insert(dep.coordinate.clone(), ()).is_some() {
                return Err(ModelError::Reference {
                    id: dep.coordinate.clone(),
                    message: "duplicate dependency coordinate".into(),
                });
            }
        }

        let mut method_index = BTreeMap::new();
        for (ci, class) in classes.iter().enumerate() {
            if class.is_project_class && class.file.is_none() {
                return Err(ModelError::Schema {
                    pointer: format!("/classes/{ci}/file"),
                    message: format!("project class {} has no source file", class.fq_name),
                });
            }
            for (mi, method) in class.methods.iter().enumerate() {
                if method.id.owner() != class.fq_name {
                    return Err(ModelError::Reference {
                        id: method.id.to_string(),
                        message: format!("method id owner does not match class {}", class.fq_name),
                    });
                }
                if method_index.insert(method.id.clone(), (ci, mi)).is_some() {
                    return Err(ModelError::Reference {
                        id: method.id.to_string(),
                        message: "duplicate method id".into(),
                    });
                }
                if method.line_start == 0 || method.line_start > method.line_end {
                    return Err(ModelError::Schema {
                        pointer: format!("/classes/{ci}/methods/{mi}/line_start"),
                        message: format!("invalid line range for {}", method.id),
                    });
                }
                if !class.is_project_class && !method.calls.is_empty() {
                    return Err(ModelError::Schema {
                        pointer: format!("/classes/{ci}/methods/{mi}/calls"),
                        message: format!("dependency method {} must have an empty body", method.id),
                    });
                }
                for (si, call) in method.calls.iter().enumerate() {
                    if call.line < method.line_start || call.line > method.line_end {
                        return Err(ModelError::Schema {
                            pointer: format!("/classes/{ci}/methods/{mi}/calls/{si}/line"),
                            message: format!(
                                "call line {} outside {}..{} of {}",
                                call.line, method.line_start, method.line_end, method.id
                            ),
                        });
                    }
                }
            }
        }

        check_supertype_acyclicity(&classes, &class_index)?;

        Ok(ProjectModel {
            project_id,
            dependencies,
            classes,
            sources,
            class_index,
            method_index,
        })
    }

    pub fn class(&self, fq_name: &str) -> Option<&ClassDecl> {
        self.class_index.get(fq_name).map(|&i| &self.classes[i])
    }

    pub fn method(&self, id: &MethodId) -> Option<&MethodDecl> {
        self.method_index
            .get(id)
            .map(|&(ci, mi)| &self.classes[ci].methods[mi])
    }

    pub fn class_of_method(&self, id: &MethodId) -> Option<&ClassDecl> {
        self.method_index.get(id).map(|&(ci, _)| &self.classes[ci])
    }

    /// All methods with their owning class, in declaration order.
    pub fn methods(&self) -> impl Iterator<Item = (&ClassDecl, &MethodDecl)> {
        self.classes
            .iter()
            .flat_map(|c| c.methods.iter().map(move |m| (c, m)))
    }

    pub fn is_project_method(&self, id: &MethodId) -> bool {
        self.class_of_method(id).is_some_and(|c| c.is_project_class)
    }

    pub fn is_dependency_method(&self, id: &MethodId) -> bool {
        self.class_of_method(id).is_some_and(|c| !c.is_project_class)
    }

    /// Public methods of project classes, the entry-point set.
    pub fn public_project_methods(&self) -> impl Iterator<Item = &MethodDecl> {
        self.classes
            .iter()
            .filter(|c| c.is_project_class)
            .flat_map(|c| c.methods.iter())
            .filter(|m| m.visibility == Visibility::Public)
    }

    /// Source file of the class that declares `id`.
    pub fn file_of_method(&self, id: &MethodId) -> Option<&str> {
        self.class_of_method(id).and_then(|c| c.file.as_deref())
    }

    /// Source lines of `path` (1-based indexing happens at the caller).
    pub fn source_lines(&self, path: &str) -> Option<Vec<&str>> {
        self.sources.get(path).map(|text| text.lines().collect())
    }

    /// The call site behind a `SiteRef`.
    pub fn site(&self, site: &SiteRef) -> Option<&CallSite> {
        self.method(&site.caller)?.calls.get(site.ordinal)
    }

    /// Project call sites that can reach dependency methods, ordered by
    /// (caller id, site line, ordinal).
    pub fn tpl_call_sites(&self) -> Vec<TplCallSite> {
        let hierarchy = hierarchy::Hierarchy::new(self);
        let mut out = Vec::new();
        for class in self.classes.iter().filter(|c| c.is_project_class) {
            for method in &class.methods {
                for (ordinal, call) in method.calls.iter().enumerate() {
                    let resolved = hierarchy.resolve(call);
                    let mut tpl_targets: Vec<MethodId> = resolved
                        .targets
                        .into_iter()
                        .filter(|t| self.is_dependency_method(t))
                        .collect();
                    if tpl_targets.is_empty() {
                        continue;
                    }
                    tpl_targets.sort();
                    out.push(TplCallSite {
                        site: SiteRef {
                            caller: method.id.clone(),
                            ordinal,
                        },
                        line: call.line,
                        tpl_targets,
                    });
                }
            }
        }
        out.sort_by(|a, b| {
            (&a.site.caller, a.line, a.site.ordinal).cmp(&(&b.site.caller, b.line, b.site.ordinal))
        });
        out
    }
}

fn check_supertype_acyclicity(
    classes: &[ClassDecl],
    class_index: &BTreeMap<String, usize>,
) -> Result<(), ModelError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let mut marks = vec![Mark::White; classes.len()];

    fn visit(
        idx: usize,
        classes: &[ClassDecl],
        class_index: &BTreeMap<String, usize>,
        marks: &mut [Mark],
        stack: &mut Vec<String>,
    ) -> Result<(), ModelError> {
        marks[idx] = Mark::Grey;
        stack.push(classes[idx].fq_name.clone());
        for sup in &classes[idx].supertypes {
            let Some(&si) = class_index.get(sup) else {
                continue; // supertypes outside the model are tolerated
            };
            match marks[si] {
                Mark::Black => {}
                Mark::White => visit(si, classes, class_index, marks, stack)?,
                Mark::Grey => {
                    let start = stack.iter().position(|n| n == sup).unwrap_or(0);
                    let mut cycle: Vec<String> = stack[start..].to_vec();
                    cycle.push(sup.clone());
                    return Err(ModelError::Cycle { cycle });
                }
            }
        }
        stack.pop();
        marks[idx] = Mark::Black;
        Ok(())
    }

    for idx in 0..classes.len() {
        if marks[idx] == Mark::White {
            let mut stack = Vec::new();
            visit(idx, classes, class_index, &mut marks, &mut stack)?;
        }
    }
    Ok(())
}
