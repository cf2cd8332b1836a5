//! Classifiers in expression, table and decision-tree form.
//!
//! Every form is total over the unconstrained space F, so the same classifier
//! can be inspected with and without constraints.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::BoolExpr;
use crate::model::{ConstrainedSpace, FeatureSpace, Instance, Limits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassLabel(pub u32);

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeNode {
    /// Goes to `if_true` when the feature takes the value at domain index `value`.
    Test {
        feature: usize,
        value: u8,
        if_true: usize,
        if_false: usize,
    },
    Leaf {
        label: u32,
    },
}

/// A binary decision tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTree {
    nodes: Vec<TreeNode>,
}

impl DecisionTree {
    pub fn new(nodes: Vec<TreeNode>) -> Self {
        DecisionTree { nodes }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    fn eval(&self, x: &[u8]) -> u32 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { label } => return label,
                TreeNode::Test {
                    feature,
                    value,
                    if_true,
                    if_false,
                } => at = if x[feature] == value { if_true } else { if_false },
            }
        }
    }

    fn validate(&self, space: &FeatureSpace, class_count: u32) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::semantic("decision tree has no nodes"));
        }
        // each (feature, value) test occurs at most once per path, which also
        // rules out cycles
        let mut stack = vec![(0usize, HashSet::<(usize, u8)>::new())];
        while let Some((at, path)) = stack.pop() {
            let node = self
                .nodes
                .get(at)
                .ok_or_else(|| Error::semantic(format!("tree references missing node {at}")))?;
            match *node {
                TreeNode::Leaf { label } => {
                    if label >= class_count {
                        return Err(Error::semantic(format!(
                            "leaf label {label} is not below the class count {class_count}"
                        )));
                    }
                }
                TreeNode::Test {
                    feature,
                    value,
                    if_true,
                    if_false,
                } => {
                    if feature >= space.len() || value as usize >= space.feature(feature).domain.len() {
                        return Err(Error::semantic(format!("tree node {at} tests an unknown feature value")));
                    }
                    let mut path = path;
                    if !path.insert((feature, value)) {
                        return Err(Error::semantic(format!(
                            "feature `{}` is tested twice for the same value on one path",
                            space.feature(feature).name
                        )));
                    }
                    stack.push((if_false, path.clone()));
                    stack.push((if_true, path));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassifierForm {
    /// Binary classifier: label 1 where the expression holds, 0 elsewhere.
    Expression(BoolExpr),
    /// One label per instance of F, indexed by canonical rank.
    Table(Vec<u32>),
    Tree(DecisionTree),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classifier {
    form: ClassifierForm,
    class_count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    /// Least instance (canonical order) where the two disagree.
    Differ(Instance),
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        matches!(self, Equivalence::Equivalent)
    }
}

impl Classifier {
    pub fn expression(expr: BoolExpr) -> Self {
        Classifier {
            form: ClassifierForm::Expression(expr),
            class_count: 2,
        }
    }

    /// `labels[rank(x)]` for every x in F.
    pub fn table(space: &FeatureSpace, labels: Vec<u32>, class_count: u32) -> Result<Self> {
        if class_count < 2 {
            return Err(Error::semantic("a classifier needs at least two classes"));
        }
        let full = space.full_size();
        if labels.len() as u128 != full {
            return Err(Error::semantic(format!(
                "table has {} rows, the feature space has {full} instances",
                labels.len()
            )));
        }
        if let Some(l) = labels.iter().find(|&&l| l >= class_count) {
            return Err(Error::semantic(format!("label {l} is not below the class count {class_count}")));
        }
        Ok(Classifier {
            form: ClassifierForm::Table(labels),
            class_count,
        })
    }

    pub fn tree(space: &FeatureSpace, tree: DecisionTree, class_count: u32) -> Result<Self> {
        if class_count < 2 {
            return Err(Error::semantic("a classifier needs at least two classes"));
        }
        tree.validate(space, class_count)?;
        Ok(Classifier {
            form: ClassifierForm::Tree(tree),
            class_count,
        })
    }

    pub fn form(&self) -> &ClassifierForm {
        &self.form
    }

    pub fn class_count(&self) -> u32 {
        self.class_count
    }

    /// Label of `x` without validating it against the space.
    pub fn label(&self, space: &FeatureSpace, x: &[u8]) -> ClassLabel {
        ClassLabel(match &self.form {
            ClassifierForm::Expression(e) => e.eval(space, x) as u32,
            ClassifierForm::Table(labels) => labels[space.rank(x)],
            ClassifierForm::Tree(t) => t.eval(x),
        })
    }

    pub fn evaluate(&self, space: &FeatureSpace, x: &[u8]) -> Result<ClassLabel> {
        space.check_instance(x)?;
        Ok(self.label(space, x))
    }

    /// Compares two classifiers on every instance of `cs`.
    pub fn equivalent_on(&self, other: &Classifier, cs: &ConstrainedSpace) -> Equivalence {
        let space = cs.space();
        cs.iter()
            .find(|x| self.label(space, x) != other.label(space, x))
            .map(|x| Equivalence::Differ(Instance(x.to_vec())))
            .unwrap_or(Equivalence::Equivalent)
    }

    /// Tabulates the classifier over all of F.
    pub fn compile_table(&self, space: &FeatureSpace, limits: &Limits) -> Result<Classifier> {
        let full = space.full_size();
        if full > limits.max_instances {
            return Err(Error::Capacity {
                what: "feature space size",
                actual: full,
                limit: limits.max_instances,
            });
        }
        let labels = space.iter_full().map(|x| self.label(space, &x).0).collect();
        Classifier::table(space, labels, self.class_count)
    }

    /// Builds an equivalent decision tree by splitting on features in index
    /// order, one `feature = value` test per value but the last.
    pub fn compile_tree(&self, space: &FeatureSpace, limits: &Limits) -> Result<Classifier> {
        let full = space.full_size();
        if full > limits.max_instances {
            return Err(Error::Capacity {
                what: "feature space size",
                actual: full,
                limit: limits.max_instances,
            });
        }
        let mut nodes = vec![TreeNode::Leaf { label: 0 }];
        let mut x = vec![0u8; space.len()];
        let root = self.split(space, 0, &mut x, &mut nodes);
        // node 0 is the root by convention; the original slot becomes unreachable
        nodes[0] = nodes[root].clone();
        Classifier::tree(space, DecisionTree::new(nodes), self.class_count)
    }

    fn split(&self, space: &FeatureSpace, depth: usize, x: &mut Vec<u8>, nodes: &mut Vec<TreeNode>) -> usize {
        if depth == space.len() {
            nodes.push(TreeNode::Leaf {
                label: self.label(space, x).0,
            });
            return nodes.len() - 1;
        }
        let size = space.feature(depth).domain.len();
        x[depth] = (size - 1) as u8;
        let mut else_branch = self.split(space, depth + 1, x, nodes);
        for v in (0..size - 1).rev() {
            x[depth] = v as u8;
            let then_branch = self.split(space, depth + 1, x, nodes);
            else_branch = match (&nodes[then_branch], &nodes[else_branch]) {
                (TreeNode::Leaf { label: a }, TreeNode::Leaf { label: b }) if a == b => then_branch,
                _ => {
                    nodes.push(TreeNode::Test {
                        feature: depth,
                        value: v as u8,
                        if_true: then_branch,
                        if_false: else_branch,
                    });
                    nodes.len() - 1
                }
            };
        }
        x[depth] = 0;
        else_branch
    }

    /// For each label that can occur, a formula that holds exactly on the
    /// instances of F mapped to that label.
    pub fn label_indicators(&self, space: &FeatureSpace, limits: &Limits) -> Result<Vec<(u32, BoolExpr)>> {
        match &self.form {
            ClassifierForm::Expression(e) => Ok(vec![(0, BoolExpr::not(e.clone())), (1, e.clone())]),
            ClassifierForm::Tree(t) => {
                let mut per_label: Vec<Vec<BoolExpr>> = vec![Vec::new(); self.class_count as usize];
                let mut stack = vec![(0usize, Vec::<BoolExpr>::new())];
                while let Some((at, path)) = stack.pop() {
                    match t.nodes[at] {
                        TreeNode::Leaf { label } => per_label[label as usize].push(conjunction(path)),
                        TreeNode::Test {
                            feature,
                            value,
                            if_true,
                            if_false,
                        } => {
                            let test = BoolExpr::Eq(feature, value);
                            let mut neg = path.clone();
                            neg.push(BoolExpr::not(test.clone()));
                            let mut pos = path;
                            pos.push(test);
                            stack.push((if_false, neg));
                            stack.push((if_true, pos));
                        }
                    }
                }
                Ok(collect_indicators(per_label))
            }
            ClassifierForm::Table(labels) => {
                if labels.len() > limits.max_cnf_table_rows {
                    return Err(Error::Unsupported(format!(
                        "table classifier with {} rows exceeds the clause expansion limit of {}",
                        labels.len(),
                        limits.max_cnf_table_rows
                    )));
                }
                let mut per_label: Vec<Vec<BoolExpr>> = vec![Vec::new(); self.class_count as usize];
                for (x, &l) in space.iter_full().zip(labels) {
                    let row = x.iter().enumerate().map(|(i, &v)| BoolExpr::Eq(i, v)).collect();
                    per_label[l as usize].push(conjunction(row));
                }
                Ok(collect_indicators(per_label))
            }
        }
    }
}

fn conjunction(mut parts: Vec<BoolExpr>) -> BoolExpr {
    match parts.len() {
        0 => BoolExpr::Const(true),
        1 => parts.pop().unwrap(),
        _ => BoolExpr::And(parts),
    }
}

fn disjunction(mut parts: Vec<BoolExpr>) -> BoolExpr {
    match parts.len() {
        0 => BoolExpr::Const(false),
        1 => parts.pop().unwrap(),
        _ => BoolExpr::Or(parts),
    }
}

fn collect_indicators(per_label: Vec<Vec<BoolExpr>>) -> Vec<(u32, BoolExpr)> {
    per_label
        .into_iter()
        .enumerate()
        .filter(|(_, terms)| !terms.is_empty())
        .map(|(l, terms)| (l as u32, disjunction(terms)))
        .collect()
}
