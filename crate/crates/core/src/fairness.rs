//! Fairness verdicts for decisions and classifiers, and the structural
//! conditions on constraints that relate them.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::classifier::{ClassLabel, Classifier};
use crate::document::from_json;
use crate::error::{Error, Result};
use crate::explain::{check_subset_cap, labels_of, Decision, DecisionLattice, Explanation};
use crate::model::{constraint_scope_profile, ConstrainedSpace, FeatureSet, FeatureSpace, Instance, ScopeProfile};
use crate::satcheck::{decode_model, encode_ftu_counterexample, search};

/// Result of a check that either holds or fails with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome<W> {
    Holds,
    Fails(W),
}

impl<W> Outcome<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Outcome::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Outcome::Holds => None,
            Outcome::Fails(w) => Some(w),
        }
    }

    fn from_witness(w: Option<W>) -> Self {
        w.map_or(Outcome::Holds, Outcome::Fails)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DecisionStatus {
    UniversallyFair,
    ExistentiallyFairOnly,
    Unfair,
}

impl DecisionStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            DecisionStatus::UniversallyFair => "UNIVERSALLY_FAIR",
            DecisionStatus::ExistentiallyFairOnly => "EXISTENTIALLY_FAIR_ONLY",
            DecisionStatus::Unfair => "UNFAIR",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecisionVerdict<'a> {
    pub decision: Decision<'a>,
    pub status: DecisionStatus,
    /// Least fair PI-explanation.
    pub fair_pi: Option<Explanation>,
    /// Least unfair PI-explanation.
    pub unfair_pi: Option<Explanation>,
    pub pi_explanations: Vec<Explanation>,
}

impl<'a> DecisionVerdict<'a> {
    fn from_lattice(decision: Decision<'a>, lattice: &DecisionLattice) -> Self {
        let pis = lattice.pi_explanations();
        let fair_pi = pis.iter().find(|e| e.fair).copied();
        let unfair_pi = pis.iter().find(|e| !e.fair).copied();
        let status = match (fair_pi, unfair_pi) {
            (Some(_), None) => DecisionStatus::UniversallyFair,
            (Some(_), Some(_)) => DecisionStatus::ExistentiallyFairOnly,
            (None, Some(_)) => DecisionStatus::Unfair,
            (None, None) => unreachable!("every decision has a PI-explanation"),
        };
        DecisionVerdict {
            decision,
            status,
            fair_pi,
            unfair_pi,
            pi_explanations: pis,
        }
    }
}

pub fn decision_verdict<'a>(cs: &ConstrainedSpace, d: &Decision<'a>) -> Result<DecisionVerdict<'a>> {
    let lattice = DecisionLattice::build(cs, d)?;
    Ok(DecisionVerdict::from_lattice(d.clone(), &lattice))
}

/// Verdicts for every decision of `k` on F[C], in canonical order.
pub fn decision_verdicts<'a>(cs: &ConstrainedSpace, k: &'a Classifier) -> Result<Vec<DecisionVerdict<'a>>> {
    let labels = labels_of(cs, k);
    cs.iter()
        .zip(&labels)
        .map(|(x, &c)| {
            let lattice = DecisionLattice::with_labels(cs, x, c, &labels)?;
            Ok(DecisionVerdict::from_lattice(Decision::from_parts(k, x, c), &lattice))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Engine {
    #[default]
    Exhaustive,
    Search,
}

/// Constrained fairness through unawareness: no two instances of F[C] that
/// agree on every unprotected feature get different labels.
///
/// The exhaustive engine reports the least counterexample `(x, y)`: `x` is
/// the least instance having a partner, `y` its least partner. The search
/// engine reports whichever pair the solver finds.
pub fn check_ftu(cs: &ConstrainedSpace, k: &Classifier, engine: Engine) -> Result<Outcome<(Instance, Instance)>> {
    match engine {
        Engine::Exhaustive => Ok(ftu_exhaustive(cs, &labels_of(cs, k))),
        Engine::Search => {
            let f = encode_ftu_counterexample(cs.space(), cs.constraints(), k, cs.limits())?;
            let r = search(&f);
            if !r.is_sat() {
                return Ok(Outcome::Holds);
            }
            Ok(Outcome::Fails(decode_model(&f, &r.status, cs, k)?))
        }
    }
}

fn project(x: &[u8], s: FeatureSet) -> Vec<u8> {
    s.iter().map(|i| x[i]).collect()
}

fn ftu_exhaustive(cs: &ConstrainedSpace, labels: &[ClassLabel]) -> Outcome<(Instance, Instance)> {
    let n = cs.space().unprotected();
    let mut groups: HashMap<Vec<u8>, (usize, Option<usize>)> = HashMap::new();
    for (i, x) in cs.iter().enumerate() {
        let g = groups.entry(project(x, n)).or_insert((i, None));
        if g.1.is_none() && labels[i] != labels[g.0] {
            g.1 = Some(i);
        }
    }
    let least = groups
        .values()
        .filter_map(|&(first, other)| other.map(|o| (first, o)))
        .min();
    Outcome::from_witness(least.map(|(a, b)| (Instance(cs.instance(a).to_vec()), Instance(cs.instance(b).to_vec()))))
}

/// Every instance of F[C] sharing `x`'s unprotected values has `x`'s label.
pub fn ftu_at(cs: &ConstrainedSpace, k: &Classifier, x: &[u8]) -> bool {
    let n = cs.space().unprotected();
    let c = k.label(cs.space(), x);
    cs.iter()
        .filter(|y| n.iter().all(|i| x[i] == y[i]))
        .all(|y| k.label(cs.space(), y) == c)
}

#[derive(Debug, Clone)]
pub struct ClassifierVerdict {
    pub ftu: Outcome<(Instance, Instance)>,
    /// Fails with the least decision that has no fair PI-explanation.
    pub existential: Outcome<Instance>,
    /// Fails with the least decision that has an unfair PI-explanation.
    pub universal: Outcome<(Instance, Explanation)>,
    /// Fails with the least violating instance and protected feature.
    pub loose: Outcome<(Instance, usize)>,
    pub disentangled: Outcome<Instance>,
    pub scope_profile: ScopeProfile,
    pub warnings: Vec<String>,
}

pub fn classifier_verdict(cs: &ConstrainedSpace, k: &Classifier, engine: Engine) -> Result<ClassifierVerdict> {
    let space = cs.space();
    let (n, p) = (space.unprotected(), space.protected());
    let labels = labels_of(cs, k);
    let ftu = match engine {
        Engine::Exhaustive => ftu_exhaustive(cs, &labels),
        Engine::Search => check_ftu(cs, k, engine)?,
    };
    let mut existential = None;
    let mut universal = None;
    let mut disentangled = None;
    if !cs.is_empty() {
        check_subset_cap(cs)?;
    }
    for (x, &c) in cs.iter().zip(&labels) {
        if existential.is_some() && universal.is_some() && disentangled.is_some() {
            break;
        }
        let lattice = DecisionLattice::with_labels(cs, x, c, &labels)?;
        if existential.is_none() || universal.is_none() {
            let pis = lattice.pis();
            if existential.is_none() && pis.iter().all(|s| s.intersects(p)) {
                existential = Some(Instance(x.to_vec()));
            }
            if universal.is_none() {
                if let Some(u) = lattice.pi_explanations().into_iter().find(|e| !e.fair) {
                    universal = Some((Instance(x.to_vec()), u));
                }
            }
        }
        if disentangled.is_none() && !disentangled_at(&lattice, n, p) {
            disentangled = Some(Instance(x.to_vec()));
        }
    }
    let verdict = ClassifierVerdict {
        ftu,
        existential: Outcome::from_witness(existential),
        universal: Outcome::from_witness(universal),
        loose: check_loose(cs),
        disentangled: Outcome::from_witness(disentangled),
        scope_profile: constraint_scope_profile(space, cs.constraints()),
        warnings: warnings(cs),
    };
    let (u, e, f) = (verdict.universal.holds(), verdict.existential.holds(), verdict.ftu.holds());
    assert!(!u || e, "universal fairness without existential fairness");
    assert!(!e || f, "existential fairness without FTU");
    assert!(!(verdict.loose.holds() && f) || e, "loose FTU classifier is not existentially fair");
    assert!(!verdict.disentangled.holds() || e, "disentangled classifier is not existentially fair");
    Ok(verdict)
}

pub fn warnings(cs: &ConstrainedSpace) -> Vec<String> {
    let mut out = Vec::new();
    if cs.is_empty() {
        out.push("empty constrained space".to_string());
    }
    for i in cs.space().protected().iter() {
        let f = cs.space().feature(i);
        if f.domain.len() == 1 {
            out.push(format!("protected feature `{}` has a singleton domain", f.name));
        }
    }
    out
}

#[derive(Debug, thiserror::Error)]
pub enum CompletionError {
    #[error("classifier violates constrained fairness through unawareness")]
    NotFtu(Instance, Instance),
    #[error(transparent)]
    Failed(#[from] Error),
}

/// Extends `k` from F[C] to a table over F that depends only on unprotected
/// features. Instances whose unprotected values never occur in F[C] get
/// `default_label`.
pub fn build_completion(
    cs: &ConstrainedSpace,
    k: &Classifier,
    default_label: ClassLabel,
) -> std::result::Result<Classifier, CompletionError> {
    let labels = labels_of(cs, k);
    if let Outcome::Fails((x, y)) = ftu_exhaustive(cs, &labels) {
        return Err(CompletionError::NotFtu(x, y));
    }
    let space = cs.space();
    let limit = cs.limits().max_instances;
    if space.full_size() > limit {
        return Err(Error::Capacity {
            what: "unconstrained space size",
            actual: space.full_size(),
            limit,
        }
        .into());
    }
    let n = space.unprotected();
    let by_n: HashMap<Vec<u8>, u32> = cs.iter().zip(&labels).map(|(x, c)| (project(x, n), c.0)).collect();
    let table = space
        .iter_full()
        .map(|x| by_n.get(&project(&x, n)).copied().unwrap_or(default_label.0))
        .collect();
    let classes = k.class_count().max(default_label.0 + 1);
    Ok(Classifier::table(space, table, classes)?)
}

/// No protected literal strictly subsumes the full unprotected assignment at
/// any instance of F[C]. Reports the least violating `(x, p)`.
pub fn check_loose(cs: &ConstrainedSpace) -> Outcome<(Instance, usize)> {
    Outcome::from_witness(loose_violations(cs).into_iter().next())
}

/// Every `(x, p)` at which looseness fails, in canonical order.
pub fn loose_violations(cs: &ConstrainedSpace) -> Vec<(Instance, usize)> {
    let space = cs.space();
    let (n, p) = (space.unprotected(), space.protected());
    let protected: Vec<usize> = p.iter().collect();
    // per unprotected projection: group size and, per protected feature, the
    // common value if the group is uniform on it
    let mut groups: HashMap<Vec<u8>, (usize, Vec<Option<u8>>)> = HashMap::new();
    let mut counts: Vec<Vec<usize>> = protected.iter().map(|&i| vec![0; space.feature(i).domain.len()]).collect();
    for x in cs.iter() {
        let g = groups
            .entry(project(x, n))
            .or_insert_with(|| (0, protected.iter().map(|&i| Some(x[i])).collect()));
        g.0 += 1;
        for (j, &i) in protected.iter().enumerate() {
            counts[j][x[i] as usize] += 1;
            if g.1[j] != Some(x[i]) {
                g.1[j] = None;
            }
        }
    }
    let mut out = Vec::new();
    for x in cs.iter() {
        let (size, uniform) = &groups[&project(x, n)];
        for (j, &i) in protected.iter().enumerate() {
            if uniform[j].is_some() && counts[j][x[i] as usize] > *size {
                out.push((Instance(x.to_vec()), i));
            }
        }
    }
    out
}

/// Looseness at a single instance, by direct coverage comparison.
pub fn check_loose_at(cs: &ConstrainedSpace, x: &[u8]) -> bool {
    let space = cs.space();
    let n_cov = cs.coverage(x, space.unprotected());
    space.protected().iter().all(|p| {
        let p_cov = cs.coverage(x, FeatureSet::singleton(p));
        !(n_cov.is_subset(&p_cov) && n_cov.count_ones(..) < p_cov.count_ones(..))
    })
}

fn disentangled_at(lattice: &DecisionLattice, n: FeatureSet, p: FeatureSet) -> bool {
    lattice.is_weak(n)
        && !lattice
            .weak_axps()
            .any(|q| q.intersects(p) && lattice.strictly_subsumes(q, n))
}

/// Every decision has the unprotected features as a weak AXp that no weak
/// AXp mentioning a protected feature strictly subsumes. Reports the least
/// failing instance.
pub fn check_disentangled(cs: &ConstrainedSpace, k: &Classifier) -> Result<Outcome<Instance>> {
    let space = cs.space();
    let labels = labels_of(cs, k);
    for (x, &c) in cs.iter().zip(&labels) {
        let lattice = DecisionLattice::with_labels(cs, x, c, &labels)?;
        if !disentangled_at(&lattice, space.unprotected(), space.protected()) {
            return Ok(Outcome::Fails(Instance(x.to_vec())));
        }
    }
    Ok(Outcome::Holds)
}

/// F[C] is the product of its projections on protected and unprotected
/// features.
pub fn check_decomposable(cs: &ConstrainedSpace) -> bool {
    let space = cs.space();
    let pp = cs.projection(space.protected()).len();
    let pn = cs.projection(space.unprotected()).len();
    // F[C] is always contained in the product, so sizes decide equality
    pp * pn == cs.len()
}

/// Directed causal graph over feature names and possibly other variables.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CausalGraph {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    /// Additional protected vertices, typically variables that are not
    /// features (such as race when only "same race as X" is observed).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub protected: Vec<String>,
}

impl CausalGraph {
    pub fn from_json(text: &str) -> Result<Self> {
        let g: CausalGraph = from_json(text)?;
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for v in &self.vertices {
            if !seen.insert(v.as_str()) {
                return Err(Error::semantic(format!("duplicate vertex `{v}`")));
            }
        }
        for name in self.edges.iter().flat_map(|(a, b)| [a, b]).chain(&self.protected) {
            if !seen.contains(name.as_str()) {
                return Err(Error::semantic(format!("unknown vertex `{name}`")));
            }
        }
        Ok(())
    }
}

/// Protects every feature reachable from a protected feature (or a
/// protected vertex of the graph) by a directed path.
pub fn extend_protected_ftci(space: &FeatureSpace, g: &CausalGraph) -> Result<FeatureSpace> {
    g.validate()?;
    let index: HashMap<&str, usize> = g.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    for f in space.features() {
        if !index.contains_key(f.name.as_str()) {
            return Err(Error::semantic(format!("feature `{}` is not a vertex of the causal graph", f.name)));
        }
    }
    let mut succ = vec![Vec::new(); g.vertices.len()];
    for (a, b) in &g.edges {
        succ[index[a.as_str()]].push(index[b.as_str()]);
    }
    let mut reached = vec![false; g.vertices.len()];
    let mut queue: VecDeque<usize> = space
        .protected()
        .iter()
        .map(|i| space.feature(i).name.as_str())
        .chain(g.protected.iter().map(String::as_str))
        .map(|v| index[v])
        .collect();
    while let Some(v) = queue.pop_front() {
        if std::mem::replace(&mut reached[v], true) {
            continue;
        }
        queue.extend(succ[v].iter().copied().filter(|&w| !reached[w]));
    }
    let protected = (0..space.len())
        .filter(|&i| reached[index[space.feature(i).name.as_str()]])
        .collect();
    Ok(space.with_protected(protected))
}
