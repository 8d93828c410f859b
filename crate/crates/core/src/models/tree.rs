use serde::{Deserialize, Serialize};

use super::Predictor;
use crate::error::{Error, Result};

/// Node of a binary decision tree with axis-aligned tests `x_j ≤ t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        value: f64,
    },
    Test {
        feature: usize,
        threshold: f64,
        /// Taken when `x[feature] <= threshold`.
        yes: Box<TreeNode>,
        no: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn leaf(value: f64) -> Self {
        TreeNode::Leaf { value }
    }

    pub fn test(feature: usize, threshold: f64, yes: TreeNode, no: TreeNode) -> Self {
        TreeNode::Test {
            feature,
            threshold,
            yes: Box::new(yes),
            no: Box::new(no),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Test { yes, no, .. } => 1 + yes.depth().max(no.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Test { yes, no, .. } => yes.leaf_count() + no.leaf_count(),
        }
    }

    fn max_feature(&self) -> Option<usize> {
        match self {
            TreeNode::Leaf { .. } => None,
            TreeNode::Test { feature, yes, no, .. } => [Some(*feature), yes.max_feature(), no.max_feature()]
                .into_iter()
                .flatten()
                .max(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: TreeNode,
    pub max_depth: usize,
}

impl DecisionTree {
    pub fn new(root: TreeNode, max_depth: usize) -> Result<Self> {
        if root.depth() > max_depth {
            return Err(Error::Shape(format!(
                "tree of depth {} exceeds max depth {max_depth}",
                root.depth()
            )));
        }
        Ok(Self { root, max_depth })
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Index (left-to-right, "yes" first) of the leaf whose region holds `x`.
    pub fn leaf_index(&self, x: &[f64]) -> Result<usize> {
        self.check_input(x)?;
        let mut node = &self.root;
        let mut offset = 0;
        loop {
            match node {
                TreeNode::Leaf { .. } => return Ok(offset),
                TreeNode::Test {
                    feature,
                    threshold,
                    yes,
                    no,
                } => {
                    if x[*feature] <= *threshold {
                        node = yes;
                    } else {
                        offset += yes.leaf_count();
                        node = no;
                    }
                }
            }
        }
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        match self.root.max_feature() {
            Some(j) if j >= x.len() => Err(Error::Shape(format!(
                "tree tests feature {j} but input has {} features",
                x.len()
            ))),
            _ => Ok(()),
        }
    }
}

impl Predictor for DecisionTree {
    fn predict(&self, x: &[f64]) -> Result<f64> {
        tree_predict(self, x)
    }
}

/// Value of the leaf whose region contains `x`.
pub fn tree_predict(tree: &DecisionTree, x: &[f64]) -> Result<f64> {
    tree.check_input(x)?;
    let mut node = &tree.root;
    loop {
        match node {
            TreeNode::Leaf { value } => return Ok(*value),
            TreeNode::Test {
                feature,
                threshold,
                yes,
                no,
            } => node = if x[*feature] <= *threshold { yes } else { no },
        }
    }
}
