use std::fmt::Write;

use pifair::fairness::{loose_violations, Outcome};
use pifair::{
    check_decomposable, ClassifierVerdict, ConstrainedSpace, DecisionStatus, DecisionVerdict, Explanation, FeatureSpace, ScopeProfile, Value,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Notion {
    Ftu,
    Existential,
    Universal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceInfo {
    pub features: Vec<String>,
    pub protected: Vec<String>,
    pub full_size: u128,
    pub constrained_size: usize,
    pub constraints: usize,
}

impl SpaceInfo {
    pub fn of(cs: &ConstrainedSpace) -> Self {
        let space = cs.space();
        SpaceInfo {
            features: space.features().iter().map(|f| f.name.clone()).collect(),
            protected: space.protected().names(space),
            full_size: space.full_size(),
            constrained_size: cs.len(),
            constraints: cs.constraints().len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub ftu: bool,
    pub existential: bool,
    pub universal: bool,
    pub loose: bool,
    pub disentangled: bool,
    pub decomposable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub x: Vec<Value>,
    pub y: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceWitness {
    pub instance: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explanation: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Witnesses {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ftu: Option<PairWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub existential: Option<InstanceWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub universal: Option<InstanceWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loose: Option<InstanceWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disentangled: Option<InstanceWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationEntry {
    pub features: Vec<String>,
    pub fair: bool,
    pub coverage_size: usize,
}

impl ExplanationEntry {
    pub fn of(space: &FeatureSpace, e: &Explanation) -> Self {
        ExplanationEntry {
            features: e.features.names(space),
            fair: e.fair,
            coverage_size: e.coverage_size,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionEntry {
    pub instance: Vec<Value>,
    pub label: u32,
    pub status: DecisionStatus,
    pub pi_explanations: Vec<ExplanationEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fair_pi: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unfair_pi: Option<Vec<String>>,
}

impl DecisionEntry {
    pub fn of(space: &FeatureSpace, v: &DecisionVerdict<'_>) -> Self {
        DecisionEntry {
            instance: space.values(v.decision.instance()),
            label: v.decision.label().0,
            status: v.status,
            pi_explanations: v.pi_explanations.iter().map(|e| ExplanationEntry::of(space, e)).collect(),
            fair_pi: v.fair_pi.map(|e| e.features.names(space)),
            unfair_pi: v.unfair_pi.map(|e| e.features.names(space)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub model_digest: String,
    pub notion: Notion,
    pub fair: bool,
    pub space: SpaceInfo,
    pub scope_profile: ScopeProfile,
    pub verdicts: Verdicts,
    pub witnesses: Witnesses,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub newly_protected: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_decision: Option<Vec<DecisionEntry>>,
    pub warnings: Vec<String>,
    pub timing_ms: Option<f64>,
}

fn instance_witness(space: &FeatureSpace, x: &[u8]) -> InstanceWitness {
    InstanceWitness {
        instance: space.values(x),
        explanation: None,
        feature: None,
    }
}

impl AuditReport {
    pub fn new(model_digest: String, notion: Notion, cs: &ConstrainedSpace, v: &ClassifierVerdict) -> Self {
        let space = cs.space();
        let verdicts = Verdicts {
            ftu: v.ftu.holds(),
            existential: v.existential.holds(),
            universal: v.universal.holds(),
            loose: v.loose.holds(),
            disentangled: v.disentangled.holds(),
            decomposable: check_decomposable(cs),
        };
        let witnesses = Witnesses {
            ftu: v.ftu.witness().map(|(x, y)| PairWitness {
                x: space.values(x),
                y: space.values(y),
            }),
            existential: v.existential.witness().map(|x| instance_witness(space, x)),
            universal: v.universal.witness().map(|(x, e)| InstanceWitness {
                explanation: Some(e.features.names(space)),
                ..instance_witness(space, x)
            }),
            loose: v.loose.witness().map(|(x, p)| InstanceWitness {
                feature: Some(space.feature(*p).name.clone()),
                ..instance_witness(space, x)
            }),
            disentangled: v.disentangled.witness().map(|x| instance_witness(space, x)),
        };
        let fair = match notion {
            Notion::Ftu => verdicts.ftu,
            Notion::Existential => verdicts.existential,
            Notion::Universal => verdicts.universal,
        };
        AuditReport {
            model_digest,
            notion,
            fair,
            space: SpaceInfo::of(cs),
            scope_profile: v.scope_profile,
            verdicts,
            witnesses,
            newly_protected: Vec::new(),
            per_decision: None,
            warnings: v.warnings.clone(),
            timing_ms: None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let yes = |b: bool| if b { "yes" } else { "no" };
        let notion = match self.notion {
            Notion::Ftu => "ftu",
            Notion::Existential => "existential",
            Notion::Universal => "universal",
        };
        writeln!(out, "model {}", self.model_digest).unwrap();
        writeln!(
            out,
            "space: {} features ({} protected), |F| = {}, |F[C]| = {}",
            self.space.features.len(),
            self.space.protected.len(),
            self.space.full_size,
            self.space.constrained_size
        )
        .unwrap();
        writeln!(out, "protected: {}", braces(&self.space.protected)).unwrap();
        if !self.newly_protected.is_empty() {
            writeln!(out, "newly protected: {}", braces(&self.newly_protected)).unwrap();
        }
        writeln!(out, "scope profile: {}", self.scope_profile).unwrap();
        let w = &self.witnesses;
        let v = &self.verdicts;
        writeln!(out, "ftu:          {}", yes(v.ftu)).unwrap();
        if let Some(p) = &w.ftu {
            writeln!(out, "  counterexample {} vs {}", tuple(&p.x), tuple(&p.y)).unwrap();
        }
        writeln!(out, "existential:  {}", yes(v.existential)).unwrap();
        if let Some(x) = &w.existential {
            writeln!(out, "  no fair PI-explanation at {}", tuple(&x.instance)).unwrap();
        }
        writeln!(out, "universal:    {}", yes(v.universal)).unwrap();
        if let Some(x) = &w.universal {
            let e = x.explanation.as_deref().unwrap_or_default();
            writeln!(out, "  unfair PI-explanation {} at {}", braces(e), tuple(&x.instance)).unwrap();
        }
        writeln!(out, "loose:        {}", yes(v.loose)).unwrap();
        if let Some(x) = &w.loose {
            let f = x.feature.as_deref().unwrap_or_default();
            writeln!(out, "  violated at {}, {f}", tuple(&x.instance)).unwrap();
        }
        writeln!(out, "disentangled: {}", yes(v.disentangled)).unwrap();
        if let Some(x) = &w.disentangled {
            writeln!(out, "  fails at {}", tuple(&x.instance)).unwrap();
        }
        writeln!(out, "decomposable: {}", yes(v.decomposable)).unwrap();
        if let Some(ds) = &self.per_decision {
            writeln!(out, "decisions:").unwrap();
            for d in ds {
                let pis: Vec<String> = d.pi_explanations.iter().map(|e| braces(&e.features)).collect();
                writeln!(
                    out,
                    "  {} -> {}  {}  PI {}",
                    tuple(&d.instance),
                    d.label,
                    d.status.as_str(),
                    pis.join(" ")
                )
                .unwrap();
            }
        }
        for warning in &self.warnings {
            writeln!(out, "warning: {warning}").unwrap();
        }
        if let Some(t) = self.timing_ms {
            writeln!(out, "time: {t:.3} ms").unwrap();
        }
        writeln!(out, "{notion} fairness: {}", if self.fair { "HOLDS" } else { "VIOLATED" }).unwrap();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainReport {
    pub model_digest: String,
    pub constraints_ignored: bool,
    pub decision: DecisionEntry,
    pub axps: Vec<ExplanationEntry>,
    pub ftu_at_instance: bool,
    pub fair: bool,
    pub timing_ms: Option<f64>,
}

impl ExplainReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let d = &self.decision;
        let tag = |e: &ExplanationEntry| if e.fair { "fair" } else { "unfair" };
        writeln!(out, "decision: {} -> {}", tuple(&d.instance), d.label).unwrap();
        if self.constraints_ignored {
            writeln!(out, "constraints ignored").unwrap();
        }
        writeln!(out, "AXps:").unwrap();
        for e in &self.axps {
            writeln!(out, "  {}  {}  coverage {}", braces(&e.features), tag(e), e.coverage_size).unwrap();
        }
        writeln!(out, "PI-explanations:").unwrap();
        for e in &d.pi_explanations {
            writeln!(out, "  {}  {}  coverage {}", braces(&e.features), tag(e), e.coverage_size).unwrap();
        }
        writeln!(out, "status: {}", d.status.as_str()).unwrap();
        if let Some(t) = self.timing_ms {
            writeln!(out, "time: {t:.3} ms").unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Loose,
    Disentangled,
    Decomposable,
    Scope,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub model_digest: String,
    pub check: CheckKind,
    pub holds: bool,
    pub scope_profile: ScopeProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<InstanceWitness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<InstanceWitness>,
    pub warnings: Vec<String>,
}

impl CheckReport {
    pub fn loose(model_digest: String, cs: &ConstrainedSpace) -> Self {
        let space = cs.space();
        let violations: Vec<InstanceWitness> = loose_violations(cs)
            .iter()
            .map(|(x, p)| InstanceWitness {
                feature: Some(space.feature(*p).name.clone()),
                ..instance_witness(space, x)
            })
            .collect();
        CheckReport {
            holds: violations.is_empty(),
            witness: violations.first().cloned(),
            violations,
            ..Self::base(model_digest, CheckKind::Loose, cs)
        }
    }

    pub fn disentangled(model_digest: String, cs: &ConstrainedSpace, outcome: &Outcome<pifair::Instance>) -> Self {
        CheckReport {
            holds: outcome.holds(),
            witness: outcome.witness().map(|x| instance_witness(cs.space(), x)),
            ..Self::base(model_digest, CheckKind::Disentangled, cs)
        }
    }

    pub fn decomposable(model_digest: String, cs: &ConstrainedSpace) -> Self {
        CheckReport {
            holds: check_decomposable(cs),
            ..Self::base(model_digest, CheckKind::Decomposable, cs)
        }
    }

    /// Holds unless some constraint mixes protected and unprotected features.
    pub fn scope(model_digest: String, cs: &ConstrainedSpace) -> Self {
        let base = Self::base(model_digest, CheckKind::Scope, cs);
        CheckReport {
            holds: !base.scope_profile.has_crossing(),
            ..base
        }
    }

    fn base(model_digest: String, check: CheckKind, cs: &ConstrainedSpace) -> Self {
        CheckReport {
            model_digest,
            check,
            holds: true,
            scope_profile: pifair::constraint_scope_profile(cs.space(), cs.constraints()),
            witness: None,
            violations: Vec::new(),
            warnings: pifair::fairness::warnings(cs),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let name = match self.check {
            CheckKind::Loose => "loose",
            CheckKind::Disentangled => "disentangled",
            CheckKind::Decomposable => "decomposable",
            CheckKind::Scope => {
                writeln!(out, "{}", self.scope_profile).unwrap();
                return out;
            }
        };
        write!(out, "{name}: {}", if self.holds { "yes" } else { "no" }).unwrap();
        if let Some(w) = &self.witness {
            write!(out, " (at {}", tuple(&w.instance)).unwrap();
            if let Some(f) = &w.feature {
                write!(out, ", {f}").unwrap();
            }
            out.push(')');
        }
        out.push('\n');
        if self.violations.len() > 1 {
            for v in &self.violations {
                let f = v.feature.as_deref().unwrap_or_default();
                writeln!(out, "  violated at {}, {f}", tuple(&v.instance)).unwrap();
            }
        }
        for warning in &self.warnings {
            writeln!(out, "warning: {warning}").unwrap();
        }
        out
    }
}

pub fn tuple(values: &[Value]) -> String {
    let parts: Vec<String> = values
        .iter()
        .map(|v| match v {
            Value::Bool(b) => (*b as u8).to_string(),
            Value::Int(i) => i.to_string(),
        })
        .collect();
    format!("({})", parts.join(","))
}

pub fn braces(names: &[String]) -> String {
    format!("{{{}}}", names.join(","))
}
