//! Canonical JSON form of the code model. Unknown fields are rejected and
//! schema violations carry a JSON-pointer path.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ClassDecl, DependencyDecl, ModelError, ProjectModel};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    project_id: String,
    dependencies: Vec<DependencyDecl>,
    classes: Vec<ClassDecl>,
    sources: BTreeMap<String, String>,
}

/// Parses and validates a model from canonical JSON text.
pub fn parse_model_json(text: &str) -> Result<ProjectModel, ModelError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ModelDoc = serde_path_to_error::deserialize(de).map_err(|err| {
        ModelError::Schema {
            pointer: pointer_of(err.path()),
            message: err.inner().to_string(),
        }
    })?;
    ProjectModel::build(doc.project_id, doc.dependencies, doc.classes, doc.sources)
}

/// Serializes a model back to canonical JSON (stable field and key order).
pub fn export_model_json(model: &ProjectModel) -> String {
    let doc = ModelDoc {
        project_id: model.project_id.clone(),
        dependencies: model.dependencies.clone(),
        classes: model.classes.clone(),
        sources: model.sources.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("model serialization cannot fail");
    text.push('\n');
    text
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for segment in path.iter() {
        match segment {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => {
                out.push('/');
                out.push_str(&key.replace('~', "~0").replace('/', "~1"));
            }
            Segment::Enum { variant } => {
                out.push('/');
                out.push_str(&variant.replace('~', "~0").replace('/', "~1"));
            }
            Segment::Unknown => {}
        }
    }
    out
}
