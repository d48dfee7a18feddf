//! Shared support for integration tests: a seeded random model generator and
//! independently written oracles for call-graph resolution and pathfinding.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fika_core::graph::CallGraph;
use fika_core::model::dsl::parse_fixture_dsl;
use fika_core::model::{
    CallSite, ClassDecl, DependencyDecl, Dispatch, MethodDecl, MethodId, ProjectModel, Visibility,
};

pub const GOLDEN_DSL: &str = include_str!("../../fixtures/graphhopper.fika");

pub fn golden_model() -> ProjectModel {
    parse_fixture_dsl(GOLDEN_DSL).expect("golden fixture parses")
}

const NAME_POOL: [&str; 4] = ["a()", "b()", "c()", "d()"];

/// Generates a small valid model: single-inheritance hierarchy over project
/// and dependency classes, with virtual, static and constructor call sites
/// (including occasional unresolvable receivers).
pub fn random_model(seed: u64, max_classes: usize, max_sites: usize) -> ProjectModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_classes = rng.gen_range(2..=max_classes.max(2));

    struct Plan {
        fq: String,
        is_project: bool,
        parent: Option<String>,
        names: Vec<String>,
    }

    let mut plans: Vec<Plan> = Vec::new();
    for i in 0..n_classes {
        // The first two classes pin one project and one dependency class.
        let is_project = match i {
            0 => true,
            1 => false,
            _ => rng.gen_bool(0.6),
        };
        let fq = if is_project {
            format!("p.C{i}")
        } else {
            format!("lib.D{i}")
        };
        let parent = if i > 0 && rng.gen_bool(0.5) {
            Some(plans[rng.gen_range(0..i)].fq.clone())
        } else {
            None
        };
        let mut names: Vec<String> = Vec::new();
        let n_methods = rng.gen_range(1..=3);
        while names.len() < n_methods {
            let pick = NAME_POOL[rng.gen_range(0..NAME_POOL.len())].to_string();
            if !names.contains(&pick) {
                names.push(pick);
            }
        }
        if rng.gen_bool(0.3) {
            names.push("<init>()".to_string());
        }
        plans.push(Plan {
            fq,
            is_project,
            parent,
            names,
        });
    }

    let class_names: Vec<String> = plans.iter().map(|p| p.fq.clone()).collect();
    let mut sites_left = max_sites;
    let mut classes = Vec::new();
    for plan in &plans {
        let mut methods = Vec::new();
        let mut cursor = 1u32;
        for name in &plan.names {
            let is_constructor = name.starts_with("<init>");
            let line_start = cursor;
            let line_end = cursor + 3;
            cursor = line_end + 2;

            let mut calls = Vec::new();
            if plan.is_project {
                let n_calls = rng.gen_range(0..=2usize).min(sites_left);
                sites_left -= n_calls;
                for _ in 0..n_calls {
                    calls.push(random_call(&mut rng, &class_names, line_start, line_end));
                }
            }

            let visibility = if plan.is_project {
                match rng.gen_range(0..4) {
                    0 | 1 => Visibility::Public,
                    2 => Visibility::Package,
                    _ => Visibility::Private,
                }
            } else {
                Visibility::Public
            };

            methods.push(MethodDecl {
                id: MethodId::new(&plan.fq, name),
                visibility,
                is_static: !is_constructor && rng.gen_bool(0.15),
                is_constructor,
                is_factory: false,
                is_setter: false,
                line_start,
                line_end,
                calls,
            });
        }
        classes.push(ClassDecl {
            fq_name: plan.fq.clone(),
            supertypes: plan.parent.clone().into_iter().collect(),
            is_project_class: plan.is_project,
            file: plan
                .is_project
                .then(|| format!("src/{}.java", plan.fq.replace('.', "_"))),
            imports: Vec::new(),
            fields: Vec::new(),
            methods,
        });
    }

    let dependencies = vec![DependencyDecl {
        coordinate: "lib:lib".to_string(),
        version: "1.0.0".to_string(),
        direct: true,
        scope: "compile".to_string(),
    }];
    ProjectModel::build(format!("rand-{seed}"), dependencies, classes, BTreeMap::new())
        .expect("generated model is valid")
}

fn random_call(rng: &mut ChaCha8Rng, class_names: &[String], lo: u32, hi: u32) -> CallSite {
    let line = rng.gen_range(lo..=hi);
    let any_class = |rng: &mut ChaCha8Rng| class_names[rng.gen_range(0..class_names.len())].clone();
    let any_name = |rng: &mut ChaCha8Rng| NAME_POOL[rng.gen_range(0..NAME_POOL.len())].to_string();
    match rng.gen_range(0..100) {
        // Virtual dispatch, sometimes on a receiver missing from the model.
        0..=54 => CallSite {
            receiver_type: Some(if rng.gen_bool(0.1) {
                "ghost.G".to_string()
            } else {
                any_class(rng)
            }),
            target: any_name(rng),
            line,
            dispatch: Dispatch::Virtual,
        },
        // Static with declared receiver.
        55..=69 => CallSite {
            receiver_type: Some(any_class(rng)),
            target: any_name(rng),
            line,
            dispatch: Dispatch::Static,
        },
        // Static with qualified target and no receiver.
        70..=79 => CallSite {
            receiver_type: None,
            target: format!("{}#{}", any_class(rng), any_name(rng)),
            line,
            dispatch: Dispatch::Static,
        },
        // Static with no receiver information at all: unresolved.
        80..=84 => CallSite {
            receiver_type: None,
            target: any_name(rng),
            line,
            dispatch: Dispatch::Static,
        },
        // Constructor.
        _ => CallSite {
            receiver_type: Some(any_class(rng)),
            target: "<init>()".to_string(),
            line,
            dispatch: Dispatch::Constructor,
        },
    }
}

/// Edge as (caller, callee, line, ordinal); warning as (caller, ordinal, line).
pub type EdgeKey = (MethodId, MethodId, u32, usize);
pub type WarningKey = (MethodId, usize, u32);

/// Brute-force class-hierarchy resolution, written against the dispatch
/// definitions rather than sharing code with the library.
pub fn oracle_cha(model: &ProjectModel) -> (BTreeSet<EdgeKey>, BTreeSet<WarningKey>) {
    let mut subtypes: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for class in &model.classes {
        subtypes.entry(&class.fq_name).or_default().insert(&class.fq_name);
    }
    // Fixpoint over the direct-supertype relation.
    loop {
        let mut changed = false;
        for class in &model.classes {
            for sup in &class.supertypes {
                if model.class(sup).is_none() {
                    continue;
                }
                let below: BTreeSet<&str> = subtypes[class.fq_name.as_str()].clone();
                let up = subtypes.get_mut(sup.as_str()).unwrap();
                for member in below {
                    changed |= up.insert(member);
                }
            }
        }
        if !changed {
            break;
        }
    }

    fn walk_up(model: &ProjectModel, ty: &str, name_sig: &str) -> Option<MethodId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![ty.to_string()];
        while let Some(cur) = stack.pop() {
            if !seen.insert(cur.clone()) {
                continue;
            }
            let Some(class) = model.class(&cur) else {
                continue;
            };
            let id = MethodId::new(&cur, name_sig);
            if class.methods.iter().any(|m| m.id == id) {
                return Some(id);
            }
            // Single inheritance in generated models, so order is immaterial.
            stack.extend(class.supertypes.iter().cloned());
        }
        None
    }

    let mut edges = BTreeSet::new();
    let mut warnings = BTreeSet::new();
    for class in model.classes.iter().filter(|c| c.is_project_class) {
        for method in &class.methods {
            for (ordinal, call) in method.calls.iter().enumerate() {
                let name_sig = call.target_name_sig().to_string();
                let receiver = call
                    .receiver_type
                    .clone()
                    .or_else(|| call.target_owner().map(str::to_string));
                let Some(receiver) = receiver else {
                    warnings.insert((method.id.clone(), ordinal, call.line));
                    continue;
                };
                if model.class(&receiver).is_none() {
                    warnings.insert((method.id.clone(), ordinal, call.line));
                    continue;
                }
                let mut targets: BTreeSet<MethodId> = BTreeSet::new();
                match call.dispatch {
                    Dispatch::Virtual => {
                        for ty in &subtypes[receiver.as_str()] {
                            if let Some(id) = walk_up(model, ty, &name_sig) {
                                targets.insert(id);
                            }
                        }
                    }
                    Dispatch::Static => {
                        if let Some(id) = walk_up(model, &receiver, &name_sig) {
                            targets.insert(id);
                        }
                    }
                    Dispatch::Constructor => {
                        let id = MethodId::new(&receiver, &name_sig);
                        if model.method(&id).is_some() {
                            targets.insert(id);
                        }
                    }
                }
                for t in targets {
                    edges.insert((method.id.clone(), t, call.line, ordinal));
                }
            }
        }
    }
    (edges, warnings)
}

/// Deduplicated forward adjacency of a call graph.
pub fn successor_sets(graph: &CallGraph) -> BTreeMap<MethodId, BTreeSet<MethodId>> {
    let mut map: BTreeMap<MethodId, BTreeSet<MethodId>> = BTreeMap::new();
    for e in &graph.edges {
        map.entry(e.caller.clone()).or_default().insert(e.callee.clone());
    }
    map
}

/// Forward BFS distances (in edges) from `start` over `adj`.
pub fn oracle_distances_from(
    adj: &BTreeMap<MethodId, BTreeSet<MethodId>>,
    start: &MethodId,
) -> BTreeMap<MethodId, u32> {
    let mut dist: BTreeMap<MethodId, u32> = BTreeMap::new();
    dist.insert(start.clone(), 0);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(cur) = queue.pop_front() {
        let d = dist[&cur];
        if let Some(nexts) = adj.get(&cur) {
            for n in nexts {
                if !dist.contains_key(n) {
                    dist.insert(n.clone(), d + 1);
                    queue.push_back(n.clone());
                }
            }
        }
    }
    dist
}
