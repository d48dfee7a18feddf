//! Reference execution adapter speaking the subprocess protocol.
//!
//! Reads one JSON request from stdin, interprets the scenario against the
//! fixture model found in the project root (`model.fika` or `model.json`,
//! unless `--model` points elsewhere), and writes one JSON response to
//! stdout. Protocol or infrastructure failures exit nonzero with a message
//! on stderr; scenario-level failures are ordinary responses.

use std::fs;
use std::io::Read;
use std::path::Path;
use std::process;

use clap::Parser;

use fika_core::model::dsl::parse_fixture_dsl;
use fika_core::model::json::parse_model_json;
use fika_core::model::ProjectModel;
use fika_core::scenario::adapter::AdapterRequest;
use fika_core::scenario::fixture::FixtureAdapter;

#[derive(Parser)]
#[command(
    name = "fika-fixture-adapter",
    version,
    about = "Execution adapter that simulates scenarios against a fixture code model"
)]
struct Cli {
    /// Model file; defaults to model.fika or model.json in the project root.
    #[arg(long)]
    model: Option<String>,
}

fn load_model(path: &Path) -> Result<ProjectModel, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read model {}: {e}", path.display()))?;
    let parsed = if path.extension().is_some_and(|e| e == "fika") {
        parse_fixture_dsl(&text).map_err(|e| e.to_string())
    } else {
        parse_model_json(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| format!("{}: {e}", path.display()))
}

fn find_model(cli: &Cli, project_root: &str) -> Result<ProjectModel, String> {
    if let Some(path) = &cli.model {
        return load_model(Path::new(path));
    }
    let root = Path::new(project_root);
    for candidate in ["model.fika", "model.json"] {
        let path = root.join(candidate);
        if path.exists() {
            return load_model(&path);
        }
    }
    Err(format!(
        "no model.fika or model.json in {project_root} (pass --model)"
    ))
}

fn run(cli: Cli) -> Result<String, String> {
    let mut input = String::new();
    std::io::stdin()
        .read_to_string(&mut input)
        .map_err(|e| format!("cannot read request: {e}"))?;
    let request: AdapterRequest =
        serde_json::from_str(&input).map_err(|e| format!("bad request: {e}"))?;

    let model = find_model(&cli, &request.project_root)?;
    let scenario = fs::read_to_string(&request.scenario_path)
        .map_err(|e| format!("cannot read scenario {}: {e}", request.scenario_path))?;

    let adapter = FixtureAdapter::new(model);
    let response = adapter
        .handle(&request.action, &scenario)
        .map_err(|e| e.to_string())?;
    serde_json::to_string(&response).map_err(|e| format!("cannot serialize response: {e}"))
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(response) => println!("{response}"),
        Err(message) => {
            eprintln!("fika-fixture-adapter: {message}");
            process::exit(1);
        }
    }
}
