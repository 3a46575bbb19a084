//! Deterministic random generation of loose-tree cases: every index shape up
//! to a node bound, fragment members sampled inside a random ambient, with a
//! fixed per-shape quota so no shape is underrepresented.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernel::{ClassInstance, Model};
use crate::tree::{canonical_trees, Limits, Tree, TreeIndex, TreeNode};

use super::witness::is_free;
use super::{LooseTree, LooseTreeError};

/// A loose-tree case by reference: index node paths, model ids per node, and
/// the ambient's id. Bound to an instance only when realized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoolCase {
    pub nodes: Vec<TreeNode>,
    pub assign: BTreeMap<TreeNode, String>,
    pub ambient: String,
}

impl PoolCase {
    /// Rebuilds the validated loose tree against an instance's fragment.
    pub fn realize<'a>(
        &self,
        inst: &'a dyn ClassInstance,
    ) -> Result<LooseTree<'a>, LooseTreeError> {
        let wide = Limits { max_height: 16, max_branching: u32::MAX, max_enum_nodes: 16 };
        let tree = Tree::new(self.nodes.iter().cloned(), &wide).map_err(|e| {
            LooseTreeError::PreconditionFailed(format!("case nodes are not a tree: {e}"))
        })?;
        let lookup = |id: &str| -> Result<Model, LooseTreeError> {
            inst.fragment()
                .iter()
                .find(|m| m.id() == id)
                .cloned()
                .ok_or_else(|| {
                    LooseTreeError::PreconditionFailed(format!("unknown model id {id}"))
                })
        };
        let mut assign = BTreeMap::new();
        for (t, id) in &self.assign {
            assign.insert(t.clone(), lookup(id)?);
        }
        LooseTree::new(tree, assign, lookup(&self.ambient)?, inst)
    }
}

/// Every index shape with at most `max_nodes` nodes (one representative per
/// isomorphism class), paired with enough random valid assignments to reach
/// `target` cases overall. Same seed, same output.
pub fn loose_tree_pool(
    inst: &dyn ClassInstance,
    max_nodes: usize,
    target: usize,
    seed: u64,
) -> Vec<PoolCase> {
    let shapes = canonical_trees(max_nodes, max_nodes.saturating_sub(1));
    let quota = target.div_ceil(shapes.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for shape in &shapes {
        sample_shape(inst, shape, quota, &mut rng, &mut out, |_| true);
    }
    out
}

/// Omission-ready cases: free under their first enumeration, together with a
/// non-root node whose model strongly extends its predecessor's model.
pub fn omission_pool(
    inst: &dyn ClassInstance,
    max_nodes: usize,
    target: usize,
    seed: u64,
) -> Vec<(PoolCase, TreeNode)> {
    let shapes: Vec<Tree> = canonical_trees(max_nodes, max_nodes.saturating_sub(1))
        .into_iter()
        .filter(|t| t.nodes().len() >= 2)
        .collect();
    let quota = target.div_ceil(shapes.len().max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = Vec::new();
    for shape in &shapes {
        let mut cases = Vec::new();
        sample_shape(inst, shape, quota, &mut rng, &mut cases, |lt| {
            omission_targets(lt).next().is_some() && is_free(lt, &lt.default_enumeration())
        });
        for case in cases {
            let lt = case.realize(inst).expect("sampled cases realize");
            let targets: Vec<TreeNode> = omission_targets(&lt).collect();
            let r = targets[rng.random_range(0..targets.len())].clone();
            picked.push((case, r));
        }
    }
    picked
}

/// Non-root nodes whose model strongly extends their predecessor's model.
fn omission_targets<'t>(lt: &'t LooseTree<'_>) -> impl Iterator<Item = TreeNode> + 't {
    lt.nodes().iter().filter_map(|r| {
        let s = lt.index().predecessor_of(r)?;
        lt.instance()
            .is_sub(lt.model_at(&s), lt.model_at(r))
            .then(|| r.clone())
    })
}

fn sample_shape(
    inst: &dyn ClassInstance,
    shape: &Tree,
    quota: usize,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<PoolCase>,
    keep: impl Fn(&LooseTree<'_>) -> bool,
) {
    let frag = inst.fragment();
    let mut made = 0usize;
    let mut attempts = 0usize;
    let cap = quota.saturating_mul(200).max(200);
    while made < quota && attempts < cap {
        attempts += 1;
        let ambient = &frag[rng.random_range(0..frag.len())];
        let inside: Vec<&Model> = frag.iter().filter(|m| inst.is_sub(m, ambient)).collect();
        if inside.is_empty() {
            continue;
        }
        let assign: BTreeMap<TreeNode, Model> = shape
            .nodes()
            .iter()
            .map(|t| (t.clone(), inside[rng.random_range(0..inside.len())].clone()))
            .collect();
        let Ok(lt) = LooseTree::new(shape.clone(), assign.clone(), ambient.clone(), inst) else {
            continue;
        };
        if !keep(&lt) {
            continue;
        }
        out.push(PoolCase {
            nodes: shape.nodes().to_vec(),
            assign: assign.into_iter().map(|(t, m)| (t, m.id().to_string())).collect(),
            ambient: ambient.id().to_string(),
        });
        made += 1;
    }
}
