//! The JSON model document: features, constraints and a classifier.
//!
//! ```json
//! {
//!   "features": [{"name": "m", "domain": [false, true], "protected": true}],
//!   "constraints": ["(iff m (not f))"],
//!   "classifier": {"form": "expression", "expr": "(and m g)"}
//! }
//! ```
//!
//! `domain` defaults to `[false, true]` and `protected` to `false`. Table
//! classifiers list `[v1, ..., vn, label]` rows covering all of F. Tree
//! classifiers list nodes `{id, feature, value, if_true, if_false}` and
//! leaves `{id, label}`; the first listed node is the root.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::classifier::{Classifier, ClassifierForm, DecisionTree, TreeNode};
use crate::error::{Error, Result};
use crate::expr::{parse_expr, BoolExpr};
use crate::model::{ConstrainedSpace, ConstraintSet, Feature, FeatureSet, FeatureSpace, Limits, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub features: Vec<FeatureDoc>,
    #[serde(default)]
    pub constraints: Vec<String>,
    pub classifier: ClassifierDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureDoc {
    pub name: String,
    #[serde(default = "boolean_domain")]
    pub domain: Vec<Value>,
    #[serde(default)]
    pub protected: bool,
}

fn boolean_domain() -> Vec<Value> {
    vec![Value::Bool(false), Value::Bool(true)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase", deny_unknown_fields)]
pub enum ClassifierDoc {
    Expression {
        expr: String,
    },
    Table {
        rows: Vec<Vec<Value>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        classes: Option<u32>,
    },
    Tree {
        nodes: Vec<NodeDoc>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        classes: Option<u32>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum NodeDoc {
    Test {
        id: u64,
        feature: String,
        value: Value,
        if_true: u64,
        if_false: u64,
    },
    Leaf {
        id: u64,
        label: u32,
    },
}

/// A parsed and validated model.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub space: FeatureSpace,
    pub constraints: ConstraintSet,
    pub classifier: Classifier,
}

/// Parses a model document.
pub fn parse_model(text: &str) -> Result<Model> {
    let doc: ModelDocument = from_json(text)?;
    Model::from_document(&doc)
}

pub(crate) fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        if e.is_syntax() || e.is_eof() {
            Error::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            }
        } else {
            Error::Semantic(e.to_string())
        }
    })
}

fn in_constraint(i: usize, e: Error) -> Error {
    match e {
        Error::Syntax { line, column, message } => Error::Syntax {
            line,
            column,
            message: format!("constraint {}: {message}", i + 1),
        },
        Error::Semantic(m) => Error::Semantic(format!("constraint {}: {m}", i + 1)),
        other => other,
    }
}

fn in_classifier(e: Error) -> Error {
    match e {
        Error::Syntax { line, column, message } => Error::Syntax {
            line,
            column,
            message: format!("classifier: {message}"),
        },
        Error::Semantic(m) => Error::Semantic(format!("classifier: {m}")),
        other => other,
    }
}

impl Model {
    pub fn from_document(doc: &ModelDocument) -> Result<Model> {
        let space = FeatureSpace::new(
            doc.features
                .iter()
                .map(|f| Feature::new(f.name.clone(), f.domain.clone(), f.protected))
                .collect(),
        )?;
        let exprs = doc
            .constraints
            .iter()
            .enumerate()
            .map(|(i, text)| parse_expr(text, &space).map_err(|e| in_constraint(i, e)))
            .collect::<Result<Vec<_>>>()?;
        let constraints = ConstraintSet::new(exprs);
        let classifier = build_classifier(&space, &doc.classifier).map_err(in_classifier)?;
        Ok(Model {
            space,
            constraints,
            classifier,
        })
    }

    pub fn to_document(&self) -> ModelDocument {
        let space = &self.space;
        ModelDocument {
            features: space
                .features()
                .iter()
                .map(|f| FeatureDoc {
                    name: f.name.clone(),
                    domain: f.domain.clone(),
                    protected: f.protected,
                })
                .collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| c.expr.display(space).to_string())
                .collect(),
            classifier: classifier_doc(space, &self.classifier),
        }
    }

    /// Compact JSON of the document as re-printed from the parsed model.
    /// Two inputs that parse to the same model produce the same text.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("model documents always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("model documents always serialize")
    }

    pub fn constrained_space(&self, limits: Limits) -> Result<ConstrainedSpace> {
        ConstrainedSpace::enumerate_with(self.space.clone(), self.constraints.clone(), limits)
    }

    pub fn without_constraints(&self) -> Model {
        Model {
            constraints: ConstraintSet::empty(),
            ..self.clone()
        }
    }

    pub fn with_protected(&self, protected: FeatureSet) -> Model {
        Model {
            space: self.space.with_protected(protected),
            ..self.clone()
        }
    }
}

fn class_count(explicit: Option<u32>, max_label: Option<u32>) -> u32 {
    let needed = max_label.map_or(0, |m| m + 1);
    explicit.unwrap_or(0).max(needed).max(2)
}

fn build_classifier(space: &FeatureSpace, doc: &ClassifierDoc) -> Result<Classifier> {
    match doc {
        ClassifierDoc::Expression { expr } => Ok(Classifier::expression(parse_expr(expr, space)?)),
        ClassifierDoc::Table { rows, classes } => {
            let full = space.full_size();
            if rows.len() as u128 != full {
                return Err(Error::semantic(format!(
                    "table has {} rows but the feature space has {full} instances",
                    rows.len()
                )));
            }
            let mut labels: Vec<Option<u32>> = vec![None; rows.len()];
            for (r, row) in rows.iter().enumerate() {
                if row.len() != space.len() + 1 {
                    return Err(Error::semantic(format!(
                        "table row {} has {} entries, expected {}",
                        r + 1,
                        row.len(),
                        space.len() + 1
                    )));
                }
                let x = space.instance_from_values(&row[..space.len()])?;
                let label = match row[space.len()] {
                    Value::Int(l) if (0..=u32::MAX as i64).contains(&l) => l as u32,
                    other => return Err(Error::semantic(format!("table row {}: bad label {other}", r + 1))),
                };
                let slot = &mut labels[space.rank(&x)];
                if slot.is_some() {
                    return Err(Error::semantic(format!(
                        "table row {} repeats instance {}",
                        r + 1,
                        space.format_instance(&x)
                    )));
                }
                *slot = Some(label);
            }
            // rows.len() == |F| and no repeats, so every slot is filled
            let labels: Vec<u32> = labels.into_iter().map(Option::unwrap).collect();
            let k = class_count(*classes, labels.iter().copied().max());
            Classifier::table(space, labels, k)
        }
        ClassifierDoc::Tree { nodes, classes } => {
            let mut index = HashMap::new();
            for (i, n) in nodes.iter().enumerate() {
                let id = match n {
                    NodeDoc::Test { id, .. } | NodeDoc::Leaf { id, .. } => *id,
                };
                if index.insert(id, i).is_some() {
                    return Err(Error::semantic(format!("duplicate tree node id {id}")));
                }
            }
            let lookup = |id: &u64| {
                index
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::semantic(format!("tree references unknown node id {id}")))
            };
            let mut max_label = None;
            let tree_nodes = nodes
                .iter()
                .map(|n| match n {
                    NodeDoc::Leaf { label, .. } => {
                        max_label = max_label.max(Some(*label));
                        Ok(TreeNode::Leaf { label: *label })
                    }
                    NodeDoc::Test {
                        feature,
                        value,
                        if_true,
                        if_false,
                        ..
                    } => {
                        let f = space
                            .index_of(feature)
                            .ok_or_else(|| Error::semantic(format!("unknown feature `{feature}` in tree")))?;
                        let v = space.feature(f).value_index(value).ok_or_else(|| {
                            Error::semantic(format!("value {value} is outside the domain of `{feature}`"))
                        })?;
                        Ok(TreeNode::Test {
                            feature: f,
                            value: v,
                            if_true: lookup(if_true)?,
                            if_false: lookup(if_false)?,
                        })
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let k = class_count(*classes, max_label);
            Classifier::tree(space, DecisionTree::new(tree_nodes), k)
        }
    }
}

fn classifier_doc(space: &FeatureSpace, k: &Classifier) -> ClassifierDoc {
    let classes = (k.class_count() > 2).then_some(k.class_count());
    match k.form() {
        ClassifierForm::Expression(e) => ClassifierDoc::Expression {
            expr: e.display(space).to_string(),
        },
        ClassifierForm::Table(labels) => ClassifierDoc::Table {
            rows: space
                .iter_full()
                .zip(labels)
                .map(|(x, &l)| {
                    let mut row = space.values(&x);
                    row.push(Value::Int(l as i64));
                    row
                })
                .collect(),
            classes,
        },
        ClassifierForm::Tree(t) => ClassifierDoc::Tree {
            nodes: t
                .nodes()
                .iter()
                .enumerate()
                .map(|(i, n)| match *n {
                    TreeNode::Leaf { label } => NodeDoc::Leaf { id: i as u64, label },
                    TreeNode::Test {
                        feature,
                        value,
                        if_true,
                        if_false,
                    } => NodeDoc::Test {
                        id: i as u64,
                        feature: space.feature(feature).name.clone(),
                        value: space.feature(feature).domain[value as usize],
                        if_true: if_true as u64,
                        if_false: if_false as u64,
                    },
                })
                .collect(),
            classes,
        },
    }
}

/// Convenience for building a model from an expression classifier in code.
pub fn expression_model(space: FeatureSpace, constraints: Vec<BoolExpr>, classifier: BoolExpr) -> Model {
    Model {
        space,
        constraints: ConstraintSet::new(constraints),
        classifier: Classifier::expression(classifier),
    }
}
