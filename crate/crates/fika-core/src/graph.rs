//! Class-hierarchy-analysis call graph and entry-path search.
//!
//! Virtual sites fan out to every definition on the declared receiver or its
//! subtypes (inherited definitions resolve to their defining class); static
//! and constructor sites bind to a single method. Entry points are the public
//! project methods. Pathfinding runs breadth-first over the reversed graph
//! with lexicographic method-id tie-breaking at each frontier.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::model::hierarchy::Hierarchy;
use crate::model::{MethodId, ProjectModel, SiteRef};

/// One resolved call edge; `site` names the call site that produced it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub caller: MethodId,
    pub callee: MethodId,
    pub line: u32,
    pub site: SiteRef,
}

/// Call site skipped because its receiver could not be resolved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnresolvedReceiver {
    pub site: SiteRef,
    pub line: u32,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallGraph {
    pub nodes: BTreeSet<MethodId>,
    /// Sorted by (caller, line, ordinal, callee).
    pub edges: Vec<Edge>,
    pub entry_points: BTreeSet<MethodId>,
    pub warnings: Vec<UnresolvedReceiver>,
}

impl CallGraph {
    /// Successors (callees) per node, sorted and deduplicated.
    pub fn successors(&self) -> BTreeMap<&MethodId, Vec<&MethodId>> {
        let mut map: BTreeMap<&MethodId, Vec<&MethodId>> = BTreeMap::new();
        for e in &self.edges {
            map.entry(&e.caller).or_default().push(&e.callee);
        }
        for v in map.values_mut() {
            v.sort();
            v.dedup();
        }
        map
    }

    /// Predecessors (callers) per node, sorted and deduplicated.
    pub fn predecessors(&self) -> BTreeMap<&MethodId, Vec<&MethodId>> {
        let mut map: BTreeMap<&MethodId, Vec<&MethodId>> = BTreeMap::new();
        for e in &self.edges {
            map.entry(&e.callee).or_default().push(&e.caller);
        }
        for v in map.values_mut() {
            v.sort();
            v.dedup();
        }
        map
    }
}

/// Builds the CHA call graph over all model methods.
pub fn build_cha(model: &ProjectModel) -> CallGraph {
    let hierarchy = Hierarchy::new(model);
    let mut edges = Vec::new();
    let mut warnings = Vec::new();

    for class in model.classes.iter().filter(|c| c.is_project_class) {
        for method in &class.methods {
            for (ordinal, call) in method.calls.iter().enumerate() {
                let site = SiteRef {
                    caller: method.id.clone(),
                    ordinal,
                };
                let resolved = hierarchy.resolve(call);
                if let Some(reason) = resolved.unresolved {
                    warnings.push(UnresolvedReceiver {
                        site,
                        line: call.line,
                        reason,
                    });
                    continue;
                }
                for callee in resolved.targets {
                    edges.push(Edge {
                        caller: method.id.clone(),
                        callee,
                        line: call.line,
                        site: site.clone(),
                    });
                }
            }
        }
    }
    edges.sort_by(|a, b| {
        (&a.caller, a.line, a.site.ordinal, &a.callee)
            .cmp(&(&b.caller, b.line, b.site.ordinal, &b.callee))
    });

    let nodes = model.methods().map(|(_, m)| m.id.clone()).collect();
    let entry_points = model.public_project_methods().map(|m| m.id.clone()).collect();

    CallGraph {
        nodes,
        edges,
        entry_points,
        warnings,
    }
}

/// Transposes every edge; nodes, entries and warnings carry over.
pub fn reverse(graph: &CallGraph) -> CallGraph {
    let mut edges: Vec<Edge> = graph
        .edges
        .iter()
        .map(|e| Edge {
            caller: e.callee.clone(),
            callee: e.caller.clone(),
            line: e.line,
            site: e.site.clone(),
        })
        .collect();
    edges.sort_by(|a, b| {
        (&a.caller, a.line, a.site.ordinal, &a.callee)
            .cmp(&(&b.caller, b.line, b.site.ordinal, &b.callee))
    });
    CallGraph {
        nodes: graph.nodes.clone(),
        edges,
        entry_points: graph.entry_points.clone(),
        warnings: graph.warnings.clone(),
    }
}

/// Breadth-first tree over callers of `m_dp`: distance and the tie-broken
/// next hop toward `m_dp` for every reaching method.
struct ReverseBfs {
    dist: BTreeMap<MethodId, u32>,
    toward: BTreeMap<MethodId, MethodId>,
}

impl ReverseBfs {
    fn run(graph: &CallGraph, m_dp: &MethodId) -> Self {
        let pred = graph.predecessors();
        let mut dist = BTreeMap::new();
        let mut toward = BTreeMap::new();
        dist.insert(m_dp.clone(), 0u32);
        let mut level: BTreeSet<MethodId> = BTreeSet::from([m_dp.clone()]);
        let mut d = 0u32;
        while !level.is_empty() {
            d += 1;
            let mut next = BTreeSet::new();
            // Frontier scanned in lexicographic order, so the first caller to
            // discover a node is the smallest qualifying next hop.
            for v in &level {
                if let Some(callers) = pred.get(v) {
                    for &u in callers {
                        if !dist.contains_key(u) && !next.contains(u) {
                            next.insert(u.clone());
                            toward.insert(u.clone(), v.clone());
                        }
                    }
                }
            }
            for u in &next {
                dist.insert(u.clone(), d);
            }
            level = next;
        }
        ReverseBfs { dist, toward }
    }

    /// Hops from `entry` down to the BFS root, inclusive.
    fn path_from(&self, entry: &MethodId) -> Vec<MethodId> {
        let mut hops = vec![entry.clone()];
        let mut cur = entry;
        while let Some(next) = self.toward.get(cur) {
            hops.push(next.clone());
            cur = next;
        }
        hops
    }

    /// Reachable entry points at minimal distance, smallest id first.
    fn nearest_entry(&self, entries: &BTreeSet<MethodId>) -> Option<MethodId> {
        entries
            .iter()
            .filter_map(|e| self.dist.get(e).map(|&d| (d, e)))
            .min()
            .map(|(_, e)| e.clone())
    }
}

/// Shortest entry path to the method containing `site`, or `None` when no
/// public method reaches it.
pub fn find_entry_path(graph: &CallGraph, site: &SiteRef) -> Option<Vec<MethodId>> {
    let m_dp = &site.caller;
    if graph.entry_points.contains(m_dp) {
        return Some(vec![m_dp.clone()]);
    }
    let bfs = ReverseBfs::run(graph, m_dp);
    let entry = bfs.nearest_entry(&graph.entry_points)?;
    Some(bfs.path_from(&entry))
}

/// One enumerated path from a public entry to a tpl call site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CallPath {
    pub entry: MethodId,
    /// Entry through direct caller, inclusive.
    pub hops: Vec<MethodId>,
    pub direct_caller: MethodId,
    /// The dependency method invoked at the site.
    pub target: MethodId,
    pub site: SiteRef,
    pub line: u32,
}

impl CallPath {
    /// Number of methods on the path; 1 when the entry is the direct caller.
    pub fn length(&self) -> usize {
        self.hops.len()
    }
}

/// Enumerates exactly one shortest path per distinct (entry, direct caller,
/// tpl target) tuple, sorted by length then (m_dp, m_tpl, m_e).
pub fn enumerate_paths(model: &ProjectModel, graph: &CallGraph) -> Vec<CallPath> {
    // Representative site per (m_dp, m_tpl): smallest (line, ordinal).
    let mut rep_sites: BTreeMap<(MethodId, MethodId), (u32, SiteRef)> = BTreeMap::new();
    for tpl_site in model.tpl_call_sites() {
        for target in &tpl_site.tpl_targets {
            let key = (tpl_site.site.caller.clone(), target.clone());
            let candidate = (tpl_site.line, tpl_site.site.clone());
            match rep_sites.get(&key) {
                Some((line, site))
                    if (*line, &site.ordinal) <= (candidate.0, &candidate.1.ordinal) => {}
                _ => {
                    rep_sites.insert(key, candidate);
                }
            }
        }
    }

    let mut bfs_cache: BTreeMap<MethodId, ReverseBfs> = BTreeMap::new();
    let mut paths = Vec::new();
    for ((m_dp, m_tpl), (line, site)) in &rep_sites {
        let bfs = bfs_cache
            .entry(m_dp.clone())
            .or_insert_with(|| ReverseBfs::run(graph, m_dp));
        for entry in &graph.entry_points {
            if !bfs.dist.contains_key(entry) {
                continue;
            }
            let hops = bfs.path_from(entry);
            paths.push(CallPath {
                entry: entry.clone(),
                hops,
                direct_caller: m_dp.clone(),
                target: m_tpl.clone(),
                site: site.clone(),
                line: *line,
            });
        }
    }
    paths.sort_by(|a, b| {
        (a.length(), &a.direct_caller, &a.target, &a.entry).cmp(&(
            b.length(),
            &b.direct_caller,
            &b.target,
            &b.entry,
        ))
    });
    paths
}

/// Edge-list text dump: `caller -> callee @line`, sorted, one per line.
pub fn dump_graph(graph: &CallGraph) -> String {
    let mut lines: Vec<String> = graph
        .edges
        .iter()
        .map(|e| format!("{} -> {} @{}", e.caller, e.callee, e.line))
        .collect();
    lines.sort();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}
