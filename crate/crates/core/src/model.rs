//! Features, instances, constraints and the constrained feature space.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::ops::Deref;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::BoolExpr;

/// Hard limit on the number of features; feature sets are 64-bit masks.
pub const MAX_FEATURES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
}

impl Value {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            Value::Bool(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feature {
    pub name: String,
    pub domain: Vec<Value>,
    pub protected: bool,
}

impl Feature {
    pub fn new(name: impl Into<String>, domain: Vec<Value>, protected: bool) -> Self {
        Feature {
            name: name.into(),
            domain,
            protected,
        }
    }

    /// A feature with domain `[false, true]`.
    pub fn boolean(name: impl Into<String>, protected: bool) -> Self {
        Feature::new(name, vec![Value::Bool(false), Value::Bool(true)], protected)
    }

    pub fn is_boolean(&self) -> bool {
        matches!(self.domain[0], Value::Bool(_))
    }

    pub fn value_index(&self, v: &Value) -> Option<u8> {
        self.domain.iter().position(|d| d == v).map(|i| i as u8)
    }

    /// Parses a value as written on a command line (`1`, `0`, `true`, `-3`).
    pub fn parse_value(&self, text: &str) -> Option<u8> {
        let text = text.trim();
        let v = if self.is_boolean() {
            match text {
                "true" | "1" => Value::Bool(true),
                "false" | "0" => Value::Bool(false),
                _ => return None,
            }
        } else {
            Value::Int(text.parse().ok()?)
        };
        self.value_index(&v)
    }
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(name, "true" | "false" | "not" | "and" | "or" | "implies" | "iff" | "le" | "lt")
}

/// A set of feature indices.
///
/// Ordered by size first, then lexicographically by sorted indices, which is
/// the canonical order for reporting explanations.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureSet(u64);

impl FeatureSet {
    pub const fn empty() -> Self {
        FeatureSet(0)
    }

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_FEATURES);
        if n == 64 {
            FeatureSet(u64::MAX)
        } else {
            FeatureSet((1u64 << n) - 1)
        }
    }

    pub const fn from_bits(bits: u64) -> Self {
        FeatureSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        FeatureSet(1 << i)
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1 << i);
    }

    pub fn with(self, i: usize) -> Self {
        FeatureSet(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> Self {
        FeatureSet(self.0 & !(1 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn union(self, o: Self) -> Self {
        FeatureSet(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        FeatureSet(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        FeatureSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn intersects(self, o: Self) -> bool {
        self.0 & o.0 != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    pub fn names(self, space: &FeatureSpace) -> Vec<String> {
        self.iter().map(|i| space.feature(i).name.clone()).collect()
    }
}

impl FromIterator<usize> for FeatureSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = FeatureSet::empty();
        iter.into_iter().for_each(|i| s.insert(i));
        s
    }
}

impl Ord for FeatureSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for FeatureSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSpace {
    features: Vec<Feature>,
}

impl FeatureSpace {
    pub fn new(features: Vec<Feature>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::semantic("a feature space needs at least one feature"));
        }
        if features.len() > MAX_FEATURES {
            return Err(Error::Capacity {
                what: "feature count",
                actual: features.len() as u128,
                limit: MAX_FEATURES as u128,
            });
        }
        let mut names = HashSet::new();
        for f in &features {
            if !is_identifier(&f.name) {
                return Err(Error::semantic(format!("`{}` is not a valid feature name", f.name)));
            }
            if !names.insert(f.name.as_str()) {
                return Err(Error::semantic(format!("duplicate feature name `{}`", f.name)));
            }
            if f.domain.is_empty() {
                return Err(Error::semantic(format!("feature `{}` has an empty domain", f.name)));
            }
            if f.domain.len() > 256 {
                return Err(Error::Capacity {
                    what: "domain size",
                    actual: f.domain.len() as u128,
                    limit: 256,
                });
            }
            let boolean = f.is_boolean();
            if f.domain.iter().any(|v| matches!(v, Value::Bool(_)) != boolean) {
                return Err(Error::semantic(format!(
                    "feature `{}` mixes boolean and integer values",
                    f.name
                )));
            }
            let distinct: HashSet<_> = f.domain.iter().collect();
            if distinct.len() != f.domain.len() {
                return Err(Error::semantic(format!(
                    "feature `{}` has repeated domain values",
                    f.name
                )));
            }
        }
        Ok(FeatureSpace { features })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn feature(&self, i: usize) -> &Feature {
        &self.features[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn all(&self) -> FeatureSet {
        FeatureSet::full(self.len())
    }

    pub fn protected(&self) -> FeatureSet {
        (0..self.len()).filter(|&i| self.features[i].protected).collect()
    }

    pub fn unprotected(&self) -> FeatureSet {
        self.all().difference(self.protected())
    }

    /// |F|, the size of the unconstrained space.
    pub fn full_size(&self) -> u128 {
        self.features
            .iter()
            .map(|f| f.domain.len() as u128)
            .try_fold(1u128, |acc, d| acc.checked_mul(d))
            .unwrap_or(u128::MAX)
    }

    /// A copy with a different protected set.
    pub fn with_protected(&self, protected: FeatureSet) -> FeatureSpace {
        let mut features = self.features.clone();
        for (i, f) in features.iter_mut().enumerate() {
            f.protected = protected.contains(i);
        }
        FeatureSpace { features }
    }

    /// Checks arity and domain membership of an index vector.
    pub fn check_instance(&self, x: &[u8]) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::contract(format!(
                "instance has {} values, the space has {} features",
                x.len(),
                self.len()
            )));
        }
        for (i, &v) in x.iter().enumerate() {
            if v as usize >= self.features[i].domain.len() {
                return Err(Error::contract(format!(
                    "value index {v} out of domain for feature `{}`",
                    self.features[i].name
                )));
            }
        }
        Ok(())
    }

    pub fn instance_from_values(&self, values: &[Value]) -> Result<Instance> {
        if values.len() != self.len() {
            return Err(Error::contract(format!(
                "expected {} values, got {}",
                self.len(),
                values.len()
            )));
        }
        values
            .iter()
            .zip(&self.features)
            .map(|(v, f)| {
                f.value_index(v).ok_or_else(|| {
                    Error::contract(format!("value {v} is not in the domain of `{}`", f.name))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Instance)
    }

    /// Parses a comma separated value list such as `1,0,1`.
    pub fn parse_instance(&self, text: &str) -> Result<Instance> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != self.len() {
            return Err(Error::contract(format!(
                "expected {} comma separated values, got {}",
                self.len(),
                parts.len()
            )));
        }
        parts
            .iter()
            .zip(&self.features)
            .map(|(p, f)| {
                f.parse_value(p).ok_or_else(|| {
                    Error::contract(format!("`{}` is not in the domain of `{}`", p.trim(), f.name))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Instance)
    }

    pub fn values(&self, x: &[u8]) -> Vec<Value> {
        x.iter()
            .zip(&self.features)
            .map(|(&v, f)| f.domain[v as usize])
            .collect()
    }

    /// Formats an instance as `(v1,v2,...)` with booleans shown as 0/1.
    pub fn format_instance(&self, x: &[u8]) -> String {
        let vals: Vec<String> = self
            .values(x)
            .iter()
            .map(|v| match v {
                Value::Bool(b) => (*b as u8).to_string(),
                Value::Int(i) => i.to_string(),
            })
            .collect();
        format!("({})", vals.join(","))
    }

    /// Iterates all of F in canonical order (feature 0 most significant).
    pub fn iter_full(&self) -> impl Iterator<Item = Instance> + '_ {
        let sizes: Vec<usize> = self.features.iter().map(|f| f.domain.len()).collect();
        let mut cur = Some(vec![0u8; sizes.len()]);
        std::iter::from_fn(move || {
            let out = cur.clone()?;
            let next = cur.as_mut().unwrap();
            let mut i = sizes.len();
            loop {
                if i == 0 {
                    cur = None;
                    break;
                }
                i -= 1;
                next[i] += 1;
                if (next[i] as usize) < sizes[i] {
                    break;
                }
                next[i] = 0;
            }
            Some(Instance(out))
        })
    }

    /// Position of `x` in the canonical enumeration of F.
    pub fn rank(&self, x: &[u8]) -> usize {
        x.iter()
            .zip(&self.features)
            .fold(0usize, |acc, (&v, f)| acc * f.domain.len() + v as usize)
    }
}

/// An instance, stored as domain indices in feature order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instance(pub Vec<u8>);

impl Deref for Instance {
    type Target = [u8];
    fn deref(&self) -> &[u8] {
        &self.0
    }
}

impl From<Vec<u8>> for Instance {
    fn from(v: Vec<u8>) -> Self {
        Instance(v)
    }
}

/// The literals `{(i, x_i) : i ∈ S}` of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialAssignment {
    literals: Vec<(usize, u8)>,
}

impl PartialAssignment {
    pub fn restrict(x: &[u8], s: FeatureSet) -> Self {
        PartialAssignment {
            literals: s.iter().map(|i| (i, x[i])).collect(),
        }
    }

    pub fn literals(&self) -> &[(usize, u8)] {
        &self.literals
    }

    pub fn features(&self) -> FeatureSet {
        self.literals.iter().map(|&(i, _)| i).collect()
    }

    pub fn matches(&self, y: &[u8]) -> bool {
        self.literals.iter().all(|&(i, v)| y[i] == v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub expr: BoolExpr,
    pub scope: FeatureSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintSet {
    constraints: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn new(exprs: Vec<BoolExpr>) -> Self {
        ConstraintSet {
            constraints: exprs
                .into_iter()
                .map(|expr| Constraint {
                    scope: expr.scope(),
                    expr,
                })
                .collect(),
        }
    }

    pub fn empty() -> Self {
        ConstraintSet::default()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Constraint> {
        self.constraints.iter()
    }

    pub fn satisfied(&self, space: &FeatureSpace, x: &[u8]) -> bool {
        self.constraints.iter().all(|c| c.expr.eval(space, x))
    }

    pub fn first_violated(&self, space: &FeatureSpace, x: &[u8]) -> Option<&Constraint> {
        self.constraints.iter().find(|c| !c.expr.eval(space, x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum |F| that may be enumerated.
    pub max_instances: u128,
    /// Maximum feature count for exhaustive subset scans.
    pub max_subset_features: usize,
    /// Maximum table rows expanded into clauses by the CNF encoder.
    pub max_cnf_table_rows: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_instances: 1 << 24,
            max_subset_features: 20,
            max_cnf_table_rows: 4096,
        }
    }
}

/// A set of instances of F[C], indexed by canonical position.
pub type InstanceSet = FixedBitSet;

/// F[C]: all instances satisfying the constraints, in canonical order.
#[derive(Debug, Clone)]
pub struct ConstrainedSpace {
    space: FeatureSpace,
    constraints: ConstraintSet,
    limits: Limits,
    rows: Vec<u8>,
}

impl ConstrainedSpace {
    pub fn enumerate(space: FeatureSpace, constraints: ConstraintSet) -> Result<Self> {
        Self::enumerate_with(space, constraints, Limits::default())
    }

    pub fn enumerate_with(space: FeatureSpace, constraints: ConstraintSet, limits: Limits) -> Result<Self> {
        let full = space.full_size();
        if full > limits.max_instances {
            return Err(Error::Capacity {
                what: "feature space size",
                actual: full,
                limit: limits.max_instances,
            });
        }
        let mut rows = Vec::new();
        for x in space.iter_full() {
            if constraints.satisfied(&space, &x) {
                rows.extend_from_slice(&x);
            }
        }
        Ok(ConstrainedSpace {
            space,
            constraints,
            limits,
            rows,
        })
    }

    /// The same feature space with the constraints dropped (F itself).
    pub fn unconstrained(&self) -> Result<Self> {
        Self::enumerate_with(self.space.clone(), ConstraintSet::empty(), self.limits)
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn width(&self) -> usize {
        self.space.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len() / self.width()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn instance(&self, i: usize) -> &[u8] {
        let w = self.width();
        &self.rows[i * w..(i + 1) * w]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, u8> {
        self.rows.chunks_exact(self.width())
    }

    pub fn position(&self, x: &[u8]) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.instance(mid).cmp(x) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn contains(&self, x: &[u8]) -> bool {
        self.position(x).is_some()
    }

    /// `{ y ∈ F[C] : y_S = x_S }` as a bitset over canonical positions.
    pub fn coverage(&self, x: &[u8], s: FeatureSet) -> InstanceSet {
        let pa = PartialAssignment::restrict(x, s);
        let mut set = FixedBitSet::with_capacity(self.len());
        for (i, y) in self.iter().enumerate() {
            if pa.matches(y) {
                set.insert(i);
            }
        }
        set
    }

    /// Distinct projections of F[C] onto `s`.
    pub fn projection(&self, s: FeatureSet) -> BTreeSet<Vec<u8>> {
        self.iter()
            .map(|y| s.iter().map(|i| y[i]).collect())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScopeProfile {
    None,
    OnlyP,
    OnlyN,
    PAndNSeparate,
    Crossing,
}

impl ScopeProfile {
    pub fn has_crossing(self) -> bool {
        self == ScopeProfile::Crossing
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScopeProfile::None => "NONE",
            ScopeProfile::OnlyP => "ONLY_P",
            ScopeProfile::OnlyN => "ONLY_N",
            ScopeProfile::PAndNSeparate => "P_AND_N_SEPARATE",
            ScopeProfile::Crossing => "CROSSING",
        }
    }
}

impl fmt::Display for ScopeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies constraints by which side of the protected partition their
/// scopes touch. Constraints with an empty scope (`true`, `false`) are ignored.
pub fn constraint_scope_profile(space: &FeatureSpace, constraints: &ConstraintSet) -> ScopeProfile {
    let p = space.protected();
    let n = space.unprotected();
    let (mut in_p, mut in_n) = (false, false);
    for c in constraints.iter() {
        let (hits_p, hits_n) = (c.scope.intersects(p), c.scope.intersects(n));
        match (hits_p, hits_n) {
            (true, true) => return ScopeProfile::Crossing,
            (true, false) => in_p = true,
            (false, true) => in_n = true,
            (false, false) => {}
        }
    }
    match (in_p, in_n) {
        (false, false) => ScopeProfile::None,
        (true, false) => ScopeProfile::OnlyP,
        (false, true) => ScopeProfile::OnlyN,
        (true, true) => ScopeProfile::PAndNSeparate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn bools(names: &[(&str, bool)]) -> FeatureSpace {
        FeatureSpace::new(names.iter().map(|&(n, p)| Feature::boolean(n, p)).collect()).unwrap()
    }

    fn constrained(space: FeatureSpace, cs: &[&str]) -> ConstrainedSpace {
        let exprs = cs.iter().map(|c| parse_expr(c, &space).unwrap()).collect();
        ConstrainedSpace::enumerate(space, ConstraintSet::new(exprs)).unwrap()
    }

    #[test]
    fn feature_set_order_is_size_then_lex() {
        let mut v = vec![
            FeatureSet::from_iter([1, 2]),
            FeatureSet::from_iter([3]),
            FeatureSet::from_iter([0, 3]),
            FeatureSet::empty(),
        ];
        v.sort();
        let as_vecs: Vec<Vec<usize>> = v.iter().map(|s| s.iter().collect()).collect();
        assert_eq!(as_vecs, vec![vec![], vec![3], vec![0, 3], vec![1, 2]]);
    }

    #[test]
    fn space_validation() {
        assert!(FeatureSpace::new(vec![]).is_err());
        assert!(FeatureSpace::new(vec![Feature::boolean("a", false), Feature::boolean("a", true)]).is_err());
        assert!(FeatureSpace::new(vec![Feature::new("a", vec![], false)]).is_err());
        assert!(FeatureSpace::new(vec![Feature::new("a", vec![Value::Int(1), Value::Int(1)], false)]).is_err());
        assert!(FeatureSpace::new(vec![Feature::new("a", vec![Value::Int(1), Value::Bool(true)], false)]).is_err());
        assert!(FeatureSpace::new(vec![Feature::boolean("and", false)]).is_err());
        assert!(FeatureSpace::new(vec![Feature::boolean("9x", false)]).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        // m ≡ ¬f over (m, f, g): brute force keeps the vectors with m ≠ f
        let cs = constrained(bools(&[("m", true), ("f", true), ("g", false)]), &["(iff m (not f))"]);
        let brute: Vec<Vec<u8>> = (0..8u8)
            .map(|k| vec![k >> 2 & 1, k >> 1 & 1, k & 1])
            .filter(|v| v[0] != v[1])
            .collect();
        assert_eq!(cs.len(), 4);
        assert_eq!(cs.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), brute);
    }

    #[test]
    fn unconstrained_size_is_product() {
        let space = FeatureSpace::new(vec![
            Feature::boolean("a", false),
            Feature::new("b", vec![Value::Int(0), Value::Int(1), Value::Int(2)], true),
        ])
        .unwrap();
        let cs = ConstrainedSpace::enumerate(space, ConstraintSet::empty()).unwrap();
        assert_eq!(cs.len(), 6);
        for (i, x) in cs.iter().enumerate() {
            assert_eq!(cs.space().rank(x), i);
            assert_eq!(cs.position(x), Some(i));
        }
    }

    #[test]
    fn capacity_cap() {
        let space = FeatureSpace::new((0..5).map(|i| Feature::boolean(format!("x{i}"), false)).collect()).unwrap();
        let limits = Limits {
            max_instances: 16,
            ..Limits::default()
        };
        assert!(matches!(
            ConstrainedSpace::enumerate_with(space, ConstraintSet::empty(), limits),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn coverage_examples() {
        // (e, m) with m → e
        let cs = constrained(bools(&[("e", false), ("m", true)]), &["(implies m e)"]);
        let cov = cs.coverage(&[0, 0], FeatureSet::singleton(0));
        assert_eq!(cov.ones().collect::<Vec<_>>(), vec![cs.position(&[0, 0]).unwrap()]);
        assert_eq!(cs.coverage(&[0, 0], FeatureSet::empty()).count_ones(..), cs.len());
        assert_eq!(cs.coverage(&[1, 1], cs.space().all()).count_ones(..), 1);

        // a ≡ b: instances (0,0), (1,1); fixing a = 1 leaves only (1,1)
        let cs = constrained(bools(&[("a", true), ("b", false)]), &["(iff a b)"]);
        let cov = cs.coverage(&[1, 1], FeatureSet::singleton(0));
        assert_eq!(cov.ones().map(|i| cs.instance(i).to_vec()).collect::<Vec<_>>(), vec![vec![1, 1]]);
    }

    #[test]
    fn scope_profiles() {
        let s = bools(&[("f", true), ("p", true), ("g", false)]);
        let c = ConstraintSet::new(vec![parse_expr("(implies p f)", &s).unwrap()]);
        assert_eq!(constraint_scope_profile(&s, &c), ScopeProfile::OnlyP);

        let s = bools(&[("f", true), ("s", false), ("e", false)]);
        let c = ConstraintSet::new(vec![parse_expr("(or (not s) e)", &s).unwrap()]);
        assert_eq!(constraint_scope_profile(&s, &c), ScopeProfile::OnlyN);

        let s = bools(&[("a", true), ("b", false)]);
        let c = ConstraintSet::new(vec![parse_expr("(iff a b)", &s).unwrap()]);
        assert_eq!(constraint_scope_profile(&s, &c), ScopeProfile::Crossing);

        let c = ConstraintSet::new(vec![parse_expr("a", &s).unwrap(), parse_expr("(not b)", &s).unwrap()]);
        assert_eq!(constraint_scope_profile(&s, &c), ScopeProfile::PAndNSeparate);
        assert_eq!(constraint_scope_profile(&s, &ConstraintSet::empty()), ScopeProfile::None);
        let c = ConstraintSet::new(vec![parse_expr("true", &s).unwrap()]);
        assert_eq!(constraint_scope_profile(&s, &c), ScopeProfile::None);
    }

    #[test]
    fn parse_instance_values() {
        let space = FeatureSpace::new(vec![
            Feature::boolean("m", true),
            Feature::new("n", vec![Value::Int(0), Value::Int(1), Value::Int(2)], false),
        ])
        .unwrap();
        assert_eq!(space.parse_instance("1, 2").unwrap().0, vec![1, 2]);
        assert_eq!(space.parse_instance("true,0").unwrap().0, vec![1, 0]);
        assert!(space.parse_instance("1").is_err());
        assert!(space.parse_instance("1,3").is_err());
        assert_eq!(space.format_instance(&[1, 2]), "(1,2)");
    }
}
