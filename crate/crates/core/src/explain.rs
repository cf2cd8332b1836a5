//! Abductive explanations (AXps) and PI-explanations of single decisions.
//!
//! Two routes are provided. The direct route ([`is_weak_axp`], [`subsumes`],
//! [`one_axp`]) scans F[C] or compares coverage bitsets. Enumeration of all
//! AXps goes through a [`DecisionLattice`], which summarises every instance of
//! F[C] by the set of features on which it agrees with the explained instance:
//!
//! * `S` is a weak AXp iff no instance with a different label agrees with `x`
//!   on a superset of `S`;
//! * `|coverage(S)|` is the number of instances whose agreement set contains
//!   `S`;
//! * `A` subsumes `B` iff `coverage(B) ⊆ coverage(A)`, and since
//!   `coverage(A ∪ B) = coverage(A) ∩ coverage(B)` that holds iff
//!   `|coverage(B)| = |coverage(A ∪ B)|`.

use serde::{Deserialize, Serialize};

use crate::classifier::{ClassLabel, Classifier};
use crate::error::{Error, Result};
use crate::model::{ConstrainedSpace, FeatureSet, Instance, PartialAssignment};

/// A decision `κ(x) = c` for an instance of F[C].
#[derive(Debug, Clone)]
pub struct Decision<'a> {
    classifier: &'a Classifier,
    instance: Instance,
    label: ClassLabel,
}

impl<'a> Decision<'a> {
    /// Fails if `x` is malformed or outside F[C].
    pub fn new(cs: &ConstrainedSpace, classifier: &'a Classifier, x: &[u8]) -> Result<Self> {
        cs.space().check_instance(x)?;
        if !cs.contains(x) {
            let which = cs
                .constraints()
                .first_violated(cs.space(), x)
                .map(|c| c.expr.display(cs.space()).to_string())
                .unwrap_or_default();
            return Err(Error::contract(format!(
                "instance {} violates constraint {which}",
                cs.space().format_instance(x)
            )));
        }
        Ok(Decision {
            classifier,
            instance: Instance(x.to_vec()),
            label: classifier.label(cs.space(), x),
        })
    }

    /// For callers that already know `x ∈ F[C]` and its label.
    pub(crate) fn from_parts(classifier: &'a Classifier, x: &[u8], label: ClassLabel) -> Self {
        Decision {
            classifier,
            instance: Instance(x.to_vec()),
            label,
        }
    }

    pub fn classifier(&self) -> &'a Classifier {
        self.classifier
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn label(&self) -> ClassLabel {
        self.label
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExplanationKind {
    WeakAxp,
    Axp,
    Pi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Explanation {
    pub features: FeatureSet,
    pub kind: ExplanationKind,
    /// No protected feature in `features`.
    pub fair: bool,
    pub coverage_size: usize,
}

/// Every instance of F[C] that agrees with the decision on `s` has its label.
pub fn is_weak_axp(cs: &ConstrainedSpace, d: &Decision<'_>, s: FeatureSet) -> bool {
    let space = cs.space();
    let pa = PartialAssignment::restrict(&d.instance, s);
    cs.iter()
        .filter(|y| pa.matches(y))
        .all(|y| d.classifier.label(space, y) == d.label)
}

/// `coverage(x, b) ⊆ coverage(x, a)`.
pub fn subsumes(cs: &ConstrainedSpace, x: &[u8], a: FeatureSet, b: FeatureSet) -> bool {
    cs.coverage(x, b).is_subset(&cs.coverage(x, a))
}

/// `coverage(x, b) ⊊ coverage(x, a)`.
pub fn strictly_subsumes(cs: &ConstrainedSpace, x: &[u8], a: FeatureSet, b: FeatureSet) -> bool {
    let (ca, cb) = (cs.coverage(x, a), cs.coverage(x, b));
    cb.is_subset(&ca) && ca.count_ones(..) != cb.count_ones(..)
}

/// Deletion-based extraction of a single AXp: start from all features and
/// drop each feature of `order` whose removal keeps a weak AXp.
pub fn one_axp(cs: &ConstrainedSpace, d: &Decision<'_>, order: &[usize]) -> Explanation {
    let mut s = cs.space().all();
    for &i in order {
        let t = s.without(i);
        if is_weak_axp(cs, d, t) {
            s = t;
        }
    }
    explanation(cs, d, s, ExplanationKind::Axp)
}

/// [`one_axp`] with features removed in descending index order.
pub fn one_axp_default(cs: &ConstrainedSpace, d: &Decision<'_>) -> Explanation {
    let order: Vec<usize> = (0..cs.width()).rev().collect();
    one_axp(cs, d, &order)
}

fn explanation(cs: &ConstrainedSpace, d: &Decision<'_>, s: FeatureSet, kind: ExplanationKind) -> Explanation {
    Explanation {
        features: s,
        kind,
        fair: !s.intersects(cs.space().protected()),
        coverage_size: cs.coverage(&d.instance, s).count_ones(..),
    }
}

/// All subset-minimal weak AXps, ordered by size then lexicographically.
pub fn all_axps(cs: &ConstrainedSpace, d: &Decision<'_>) -> Result<Vec<Explanation>> {
    Ok(DecisionLattice::build(cs, d)?.axp_explanations())
}

/// AXps not strictly subsumed by another AXp.
pub fn pi_explanations(cs: &ConstrainedSpace, d: &Decision<'_>) -> Result<Vec<Explanation>> {
    Ok(DecisionLattice::build(cs, d)?.pi_explanations())
}

/// Labels of every instance of F[C] in canonical order.
pub fn labels_of(cs: &ConstrainedSpace, k: &Classifier) -> Vec<ClassLabel> {
    cs.iter().map(|y| k.label(cs.space(), y)).collect()
}

pub(crate) fn check_subset_cap(cs: &ConstrainedSpace) -> Result<()> {
    let limit = cs.limits().max_subset_features;
    if cs.width() > limit {
        return Err(Error::Capacity {
            what: "feature count for subset enumeration",
            actual: cs.width() as u128,
            limit: limit as u128,
        });
    }
    Ok(())
}

/// Weak-AXp status and coverage size of every feature subset for one decision.
#[derive(Debug, Clone)]
pub struct DecisionLattice {
    width: usize,
    protected: FeatureSet,
    weak: Vec<bool>,
    cover: Vec<u32>,
}

impl DecisionLattice {
    pub fn build(cs: &ConstrainedSpace, d: &Decision<'_>) -> Result<Self> {
        let labels = labels_of(cs, d.classifier);
        Self::with_labels(cs, &d.instance, d.label, &labels)
    }

    /// `labels` must be the classifier's labels on F[C] in canonical order.
    pub fn with_labels(cs: &ConstrainedSpace, x: &[u8], label: ClassLabel, labels: &[ClassLabel]) -> Result<Self> {
        check_subset_cap(cs)?;
        let n = cs.width();
        let size = 1usize << n;
        let mut cover = vec![0u32; size];
        let mut bad = vec![false; size];
        for (y, &ly) in cs.iter().zip(labels) {
            let agree = x
                .iter()
                .zip(y)
                .enumerate()
                .fold(0usize, |m, (i, (a, b))| if a == b { m | 1 << i } else { m });
            cover[agree] += 1;
            if ly != label {
                bad[agree] = true;
            }
        }
        for i in 0..n {
            let bit = 1 << i;
            for mask in 0..size {
                if mask & bit == 0 {
                    cover[mask] += cover[mask | bit];
                } else if bad[mask] {
                    bad[mask ^ bit] = true;
                }
            }
        }
        Ok(DecisionLattice {
            width: n,
            protected: cs.space().protected(),
            weak: bad.into_iter().map(|b| !b).collect(),
            cover,
        })
    }

    pub fn is_weak(&self, s: FeatureSet) -> bool {
        self.weak[s.bits() as usize]
    }

    pub fn coverage_size(&self, s: FeatureSet) -> usize {
        self.cover[s.bits() as usize] as usize
    }

    pub fn subsumes(&self, a: FeatureSet, b: FeatureSet) -> bool {
        self.cover[b.bits() as usize] == self.cover[a.union(b).bits() as usize]
    }

    pub fn strictly_subsumes(&self, a: FeatureSet, b: FeatureSet) -> bool {
        self.subsumes(a, b) && self.cover[a.bits() as usize] != self.cover[b.bits() as usize]
    }

    pub fn is_axp(&self, s: FeatureSet) -> bool {
        self.is_weak(s) && s.iter().all(|i| !self.is_weak(s.without(i)))
    }

    /// All AXps in canonical order.
    pub fn axps(&self) -> Vec<FeatureSet> {
        let mut out: Vec<FeatureSet> = (0..1u64 << self.width)
            .map(FeatureSet::from_bits)
            .filter(|&s| self.is_axp(s))
            .collect();
        out.sort();
        out
    }

    pub fn pis(&self) -> Vec<FeatureSet> {
        let axps = self.axps();
        axps.iter()
            .copied()
            .filter(|&a| !axps.iter().any(|&b| self.strictly_subsumes(b, a)))
            .collect()
    }

    fn describe(&self, s: FeatureSet, kind: ExplanationKind) -> Explanation {
        Explanation {
            features: s,
            kind,
            fair: !s.intersects(self.protected),
            coverage_size: self.coverage_size(s),
        }
    }

    pub fn axp_explanations(&self) -> Vec<Explanation> {
        self.axps().into_iter().map(|s| self.describe(s, ExplanationKind::Axp)).collect()
    }

    pub fn pi_explanations(&self) -> Vec<Explanation> {
        self.pis().into_iter().map(|s| self.describe(s, ExplanationKind::Pi)).collect()
    }

    /// Iterates every weak AXp (not necessarily minimal).
    pub fn weak_axps(&self) -> impl Iterator<Item = FeatureSet> + '_ {
        (0..1u64 << self.width)
            .map(FeatureSet::from_bits)
            .filter(|&s| self.is_weak(s))
    }
}
