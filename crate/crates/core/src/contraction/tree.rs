use std::collections::HashMap;
use std::sync::Arc;

use crate::field_ring::RingElement;

use super::step::ContractionStep;
use super::ContractionError;

/// Where a variable of a derived form comes from.
#[derive(Clone, Debug)]
pub enum Origin {
    /// Variable `i` of the root form.
    Root(usize),
    Merged(Arc<MergeNode>),
}

#[derive(Debug)]
pub struct MergeNode {
    pub step: ContractionStep,
    /// Receives `b1 y`.
    pub left: Origin,
    /// Receives `b2 y`.
    pub right: Origin,
}

/// Maps each variable of a derived form back to the root form.
///
/// Nodes are shared between sibling search states, so the tree is a forest
/// of reference-counted merge nodes; it is acyclic by construction.
#[derive(Clone, Debug)]
pub struct SubstitutionTree {
    root_len: usize,
    origins: Vec<Origin>,
}

impl SubstitutionTree {
    pub fn identity(root_len: usize) -> Self {
        SubstitutionTree {
            root_len,
            origins: (0..root_len).map(Origin::Root).collect(),
        }
    }

    pub fn root_len(&self) -> usize {
        self.root_len
    }

    pub fn origins(&self) -> &[Origin] {
        &self.origins
    }

    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }

    /// Tree after `step`: the merged pair is removed and the new variable
    /// appended at the end, others keep their relative order.
    pub fn apply(&self, step: &ContractionStep) -> Result<Self, ContractionError> {
        let (i, j) = step.merged;
        if i >= self.origins.len() || j >= self.origins.len() || i == j {
            return Err(ContractionError::Interface(format!("step indices ({i}, {j}) do not fit the tree")));
        }
        let node = MergeNode {
            step: step.clone(),
            left: self.origins[i].clone(),
            right: self.origins[j].clone(),
        };
        let mut origins: Vec<Origin> = self
            .origins
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i && k != j)
            .map(|(_, o)| o.clone())
            .collect();
        origins.push(Origin::Merged(Arc::new(node)));
        Ok(SubstitutionTree {
            root_len: self.root_len,
            origins,
        })
    }

    /// Pull an assignment of the derived variables back to the root form.
    pub fn pullback(&self, assignment: &[RingElement]) -> Result<Vec<RingElement>, ContractionError> {
        if assignment.len() != self.origins.len() {
            return Err(ContractionError::Internal(format!(
                "witness has {} values but the contracted form has {} variables",
                assignment.len(),
                self.origins.len()
            )));
        }
        let first = assignment
            .first()
            .ok_or_else(|| ContractionError::Internal("empty witness".into()))?;
        let zero = RingElement::zero(first.field(), first.bits())?;
        let mut out = vec![zero; self.root_len];
        let mut stack: Vec<(&Origin, RingElement)> = self.origins.iter().zip(assignment.iter().copied()).collect();
        while let Some((origin, value)) = stack.pop() {
            match origin {
                Origin::Root(i) => {
                    let slot = out
                        .get_mut(*i)
                        .ok_or_else(|| ContractionError::Internal(format!("root index {i} out of range")))?;
                    *slot = value;
                }
                Origin::Merged(node) => {
                    stack.push((&node.left, value.checked_mul(&node.step.b1)?));
                    stack.push((&node.right, value.checked_mul(&node.step.b2)?));
                }
            }
        }
        Ok(out)
    }

    /// Trace lines for the merges feeding the selected derived variables,
    /// children before parents, e.g. `S2(x1,x3; c=0) gain=2 -> y1`.
    pub fn trace(&self, selected: &[usize]) -> Vec<String> {
        let mut labels: HashMap<*const MergeNode, String> = HashMap::new();
        let mut lines = Vec::new();
        for &k in selected {
            if let Some(origin) = self.origins.get(k) {
                label(origin, &mut labels, &mut lines);
            }
        }
        lines
    }
}

fn label(origin: &Origin, labels: &mut HashMap<*const MergeNode, String>, lines: &mut Vec<String>) -> String {
    match origin {
        Origin::Root(i) => format!("x{}", i + 1),
        Origin::Merged(node) => {
            let key = Arc::as_ptr(node);
            if let Some(l) = labels.get(&key) {
                return l.clone();
            }
            let left = label(&node.left, labels, lines);
            let right = label(&node.right, labels, lines);
            let name = format!("y{}", labels.len() + 1);
            lines.push(format!(
                "{}({},{}; c={}) gain={} -> {}",
                node.step.kind, left, right, node.step.c, node.step.level_gain, name
            ));
            labels.insert(key, name.clone());
            name
        }
    }
}
