//! Class hierarchy queries: subtype closure and call-site target resolution.

use std::collections::{BTreeMap, BTreeSet};

use super::{CallSite, Dispatch, MethodId, ProjectModel};

/// Outcome of resolving one call site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolved {
    /// Candidate target methods, sorted and deduplicated.
    pub targets: Vec<MethodId>,
    /// Set when the declared receiver is absent from the hierarchy.
    pub unresolved: Option<String>,
}

impl Resolved {
    fn empty() -> Self {
        Resolved {
            targets: Vec::new(),
            unresolved: None,
        }
    }

    fn unresolved(reason: String) -> Self {
        Resolved {
            targets: Vec::new(),
            unresolved: Some(reason),
        }
    }
}

/// Precomputed hierarchy over a model's classes.
pub struct Hierarchy<'m> {
    model: &'m ProjectModel,
    /// Direct subtypes per class fq name.
    children: BTreeMap<&'m str, Vec<&'m str>>,
}

impl<'m> Hierarchy<'m> {
    pub fn new(model: &'m ProjectModel) -> Self {
        let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for class in &model.classes {
            for sup in &class.supertypes {
                if model.class(sup).is_some() {
                    children
                        .entry(sup.as_str())
                        .or_default()
                        .push(class.fq_name.as_str());
                }
            }
        }
        for subs in children.values_mut() {
            subs.sort();
            subs.dedup();
        }
        Hierarchy { model, children }
    }

    /// `ty` plus every transitive subtype present in the model.
    pub fn cone(&self, ty: &str) -> Vec<&'m str> {
        let Some(class) = self.model.class(ty) else {
            return Vec::new();
        };
        let mut seen = BTreeSet::new();
        let mut queue = vec![class.fq_name.as_str()];
        while let Some(cur) = queue.pop() {
            if !seen.insert(cur) {
                continue;
            }
            if let Some(subs) = self.children.get(cur) {
                queue.extend(subs.iter().copied());
            }
        }
        seen.into_iter().collect()
    }

    /// First definition of `name_sig` on `ty` or its supertype chain, if any.
    /// Supertypes are searched depth-first in declaration order.
    pub fn lookup(&self, ty: &str, name_sig: &str) -> Option<MethodId> {
        let mut visited = BTreeSet::new();
        self.lookup_inner(ty, name_sig, &mut visited)
    }

    fn lookup_inner(
        &self,
        ty: &str,
        name_sig: &str,
        visited: &mut BTreeSet<String>,
    ) -> Option<MethodId> {
        if !visited.insert(ty.to_string()) {
            return None;
        }
        let class = self.model.class(ty)?;
        let id = MethodId::new(ty, name_sig);
        if class.methods.iter().any(|m| m.id == id) {
            return Some(id);
        }
        for sup in &class.supertypes {
            if let Some(found) = self.lookup_inner(sup, name_sig, visited) {
                return Some(found);
            }
        }
        None
    }

    /// CHA resolution of a call site to its candidate targets.
    pub fn resolve(&self, call: &CallSite) -> Resolved {
        let name_sig = call.target_name_sig().to_string();
        let receiver = call
            .receiver_type
            .as_deref()
            .or_else(|| call.target_owner());
        let Some(receiver) = receiver else {
            return Resolved::unresolved(format!("call to {} has no receiver type", call.target));
        };
        if self.model.class(receiver).is_none() {
            return Resolved::unresolved(format!("receiver type {receiver} is not in the model"));
        }
        match call.dispatch {
            Dispatch::Virtual => {
                let mut targets = BTreeSet::new();
                for ty in self.cone(receiver) {
                    if let Some(id) = self.lookup(ty, &name_sig) {
                        targets.insert(id);
                    }
                }
                Resolved {
                    targets: targets.into_iter().collect(),
                    unresolved: None,
                }
            }
            Dispatch::Static => match self.lookup(receiver, &name_sig) {
                Some(id) => Resolved {
                    targets: vec![id],
                    unresolved: None,
                },
                None => Resolved::empty(),
            },
            Dispatch::Constructor => {
                let id = MethodId::new(receiver, &name_sig);
                if self.model.method(&id).is_some() {
                    Resolved {
                        targets: vec![id],
                        unresolved: None,
                    }
                } else {
                    Resolved::empty()
                }
            }
        }
    }
}
