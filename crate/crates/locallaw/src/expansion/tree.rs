//! The binary recursion tree driving tau and rho in tandem.

use super::eval::{GraphEvaluator, IndexAssignment, LeafSumReport, WhiteSummation};
use super::ops::{rho_expand, tau_split};
use super::ExpansionGraph;
use crate::error::{Error, Result};
use crate::laws::C64;
use crate::resolvent::MinorSystem;

/// Leaf classification: trivial leaves stopped on the d-count, nontrivial
/// leaves have every G-edge maximally expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafClass {
    Trivial,
    Nontrivial,
}

/// One node of the expansion tree.
#[derive(Debug, Clone)]
pub struct TreeNode {
    /// Binary string address; children prepend their bit on the left.
    pub sigma: String,
    pub graph: ExpansionGraph,
    pub children: Option<(usize, usize)>,
    pub leaf: Option<LeafClass>,
}

/// The finite binary tree produced by the coupled tau/rho recursion.
#[derive(Debug)]
pub struct ExpansionTree {
    pub nodes: Vec<TreeNode>,
    /// d of the root graph; the stopping rule fires once a node has
    /// accumulated `ell` off-diagonal objects beyond this baseline.
    pub root_d: usize,
    pub ell: usize,
}

impl ExpansionTree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].leaf.is_some()).collect()
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.sigma.len()).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Off-diagonal objects accumulated beyond the root baseline.
    pub fn excess_d(&self, node: usize) -> usize {
        self.nodes[node].graph.d().saturating_sub(self.root_d)
    }

    /// Number of ones in the node's address string.
    pub fn ones(&self, node: usize) -> usize {
        self.nodes[node].sigma.bytes().filter(|&b| b == b'1').count()
    }
}

/// Builds the expansion tree over `root` with cutoff `ell >= 1`.
///
/// Children are `rho(tau_0(.))` and `rho(tau_1(.))`. A node becomes a leaf
/// once it accumulates `ell` off-diagonal G-edges or R-groups beyond the
/// root's own count (trivial leaf), or once every G-edge is maximally
/// expanded (nontrivial leaf). Structural properties and the d-monotonicity
/// of the operations are verified at every step.
pub fn build_tree(root: &ExpansionGraph, ell: usize, node_cap: usize) -> Result<ExpansionTree> {
    if ell == 0 {
        return Err(Error::invalid("cutoff ell must be at least 1"));
    }
    root.assert_structural()?;
    let root_d = root.d();
    let stop_d = root_d + ell;
    let mut tree = ExpansionTree {
        nodes: vec![TreeNode { sigma: String::new(), graph: root.clone(), children: None, leaf: None }],
        root_d,
        ell,
    };
    let mut queue = vec![0usize];
    while let Some(idx) = queue.pop() {
        let (d_here, stopped) = {
            let g = &tree.nodes[idx].graph;
            let d = g.d();
            (d, d >= stop_d || g.all_g_edges_maximally_expanded())
        };
        if stopped {
            tree.nodes[idx].leaf = Some(if d_here >= stop_d {
                LeafClass::Trivial
            } else {
                LeafClass::Nontrivial
            });
            continue;
        }
        if tree.nodes.len() + 2 > node_cap {
            return Err(Error::Resource(format!(
                "expansion tree exceeded the node budget of {node_cap} (depth so far {})",
                tree.depth()
            )));
        }
        let (tau0, tau1) = tau_split(&tree.nodes[idx].graph)?;
        if tau0.d() != d_here {
            return Err(Error::Structure("tau_0 must leave d unchanged".into()));
        }
        if tau1.d() < d_here + 1 {
            return Err(Error::Structure("tau_1 must increase d".into()));
        }
        let child0 = rho_expand(&tau0);
        let child1 = rho_expand(&tau1);
        if child0.d() != tau0.d() || child1.d() != tau1.d() {
            return Err(Error::Structure("rho must leave d unchanged".into()));
        }
        for (bit, child) in [(0u8, child0), (1u8, child1)] {
            child.assert_structural()?;
            if child.n_black() != tree.nodes[idx].graph.n_black() {
                return Err(Error::Structure("black vertex set must stay fixed".into()));
            }
            let sigma = format!("{bit}{}", tree.nodes[idx].sigma);
            let node = TreeNode { sigma, graph: child, children: None, leaf: None };
            tree.nodes.push(node);
        }
        let c1 = tree.nodes.len() - 1;
        let c0 = c1 - 1;
        tree.nodes[idx].children = Some((c0, c1));
        queue.push(c0);
        queue.push(c1);
    }
    Ok(tree)
}

/// Verifies the leaf-sum identity: the directly evaluated root equals the
/// sum of the evaluated leaves, for one concrete (X, z, assignment).
pub fn verify_leaf_sum(
    root: &ExpansionGraph,
    sys: &MinorSystem,
    z: C64,
    assignment: &IndexAssignment,
    ell: usize,
) -> Result<LeafSumReport> {
    let tree = build_tree(root, ell, 100_000)?;
    let ev = GraphEvaluator::new(sys, z, WhiteSummation::Sandwich)?;
    let direct = ev.evaluate(root, assignment)?;
    let mut leaf_sum = C64::new(0.0, 0.0);
    for idx in tree.leaves() {
        leaf_sum += ev.evaluate(&tree.nodes[idx].graph, assignment)?;
    }
    let residual = (direct - leaf_sum).norm();
    Ok(LeafSumReport {
        direct,
        leaf_sum,
        residual,
        relative: residual / direct.norm().max(1e-300),
        n_leaves: tree.leaves().len(),
        n_nodes: tree.node_count(),
        depth: tree.depth(),
    })
}

/// Checks that every internal node's value equals the sum of its two
/// children's values; returns the worst relative residual.
pub fn verify_node_additivity(
    tree: &ExpansionTree,
    sys: &MinorSystem,
    z: C64,
    assignment: &IndexAssignment,
) -> Result<f64> {
    let ev = GraphEvaluator::new(sys, z, WhiteSummation::Sandwich)?;
    let mut worst = 0.0f64;
    for node in &tree.nodes {
        if let Some((c0, c1)) = node.children {
            let parent = ev.evaluate(&node.graph, assignment)?;
            let sum = ev.evaluate(&tree.nodes[c0].graph, assignment)?
                + ev.evaluate(&tree.nodes[c1].graph, assignment)?;
            worst = worst.max((parent - sum).norm() / parent.norm().max(1e-12));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_covariance, EnsembleSpec, EntryDistribution};
    use crate::expansion::{build_delta, enumerate_partitions};

    fn system(seed: u64) -> MinorSystem {
        let spec = EnsembleSpec::sample_covariance(8, 8, EntryDistribution::ComplexGaussian, seed);
        MinorSystem::new(sample_covariance(&spec).unwrap(), 16)
    }

    #[test]
    fn paired_partition_is_single_leaf() {
        let parts = enumerate_partitions(2).unwrap();
        let paired = parts.iter().find(|p| p.blocks().len() == 2).unwrap();
        let delta = build_delta(paired).unwrap();
        let tree = build_tree(&delta, 2, 1000).unwrap();
        assert_eq!(tree.node_count(), 1);
        assert_eq!(tree.leaves(), vec![0]);
        // all edges already maximally expanded, d did not grow
        assert_eq!(tree.nodes[0].leaf, Some(LeafClass::Nontrivial));
    }

    #[test]
    fn singleton_partition_tree_with_ell_one() {
        let parts = enumerate_partitions(2).unwrap();
        let singles = parts.iter().find(|p| p.blocks().len() == 4).unwrap();
        let delta = build_delta(singles).unwrap();
        let tree = build_tree(&delta, 1, 10_000).unwrap();
        assert!(tree.node_count() > 1);
        for idx in tree.leaves() {
            match tree.nodes[idx].leaf.unwrap() {
                LeafClass::Trivial => {
                    assert!(tree.excess_d(idx) >= 1, "trivial leaf without excess d");
                }
                LeafClass::Nontrivial => {
                    assert!(tree.nodes[idx].graph.all_g_edges_maximally_expanded());
                }
            }
        }
        // every address has at most ell ones
        for idx in 0..tree.node_count() {
            assert!(tree.ones(idx) <= 1);
        }
    }

    #[test]
    fn depth_bound_holds() {
        let parts = enumerate_partitions(2).unwrap();
        for part in &parts {
            let delta = build_delta(part).unwrap();
            for ell in [1usize, 2] {
                let tree = build_tree(&delta, ell, 100_000).unwrap();
                let p = delta.edges().len();
                assert!(
                    tree.depth() <= 2 * p * (p + 6 * ell),
                    "depth {} above bound for ell={ell}",
                    tree.depth()
                );
                for idx in 0..tree.node_count() {
                    assert!(tree.ones(idx) <= ell);
                }
            }
        }
    }

    #[test]
    fn leaf_sum_identity_small() {
        let sys = system(23);
        let z = C64::new(1.0, 1.0);
        let parts = enumerate_partitions(2).unwrap();
        let singles = parts.iter().find(|p| p.blocks().len() == 4).unwrap();
        let delta = build_delta(singles).unwrap();
        let a = IndexAssignment::new(vec![0, 2, 5, 7], 8).unwrap();
        let report = verify_leaf_sum(&delta, &sys, z, &a, 2).unwrap();
        assert!(
            report.relative < 1e-8,
            "leaf sum mismatch: {} vs {} ({} leaves)",
            report.direct,
            report.leaf_sum,
            report.n_leaves
        );
        // single-leaf tree: residual identically zero
        let paired = parts.iter().find(|p| p.blocks().len() == 2).unwrap();
        let delta = build_delta(paired).unwrap();
        let a = IndexAssignment::new(vec![1, 4], 8).unwrap();
        let report = verify_leaf_sum(&delta, &sys, z, &a, 2).unwrap();
        assert_eq!(report.residual, 0.0);
    }

    #[test]
    fn node_cap_respected() {
        let parts = enumerate_partitions(2).unwrap();
        let singles = parts.iter().find(|p| p.blocks().len() == 4).unwrap();
        let delta = build_delta(singles).unwrap();
        assert!(matches!(build_tree(&delta, 2, 4), Err(Error::Resource(_))));
    }
}
