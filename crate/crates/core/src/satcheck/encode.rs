use crate::classifier::Classifier;
use crate::error::{Error, Result};
use crate::expr::BoolExpr;
use crate::model::{ConstrainedSpace, ConstraintSet, FeatureSpace, Instance, Limits, Value};

use super::cnf::{CnfFormula, Lit};
use super::search::SearchStatus;

/// Propositional value of a subformula: folded to a constant or a literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Term {
    Const(bool),
    Lit(Lit),
}

impl Term {
    fn negate(self) -> Term {
        match self {
            Term::Const(b) => Term::Const(!b),
            Term::Lit(l) => Term::Lit(-l),
        }
    }
}

/// Variables of one feature on one side of the encoding.
#[derive(Debug, Clone)]
enum FeatureVars {
    /// Singleton domain.
    Fixed,
    /// Two values: the variable is true iff the domain index is 1.
    Binary(Lit),
    /// One variable per domain index, exactly one true.
    OneHot(Vec<Lit>),
}

impl FeatureVars {
    fn atom(&self, idx: u8) -> Term {
        match self {
            FeatureVars::Fixed => Term::Const(idx == 0),
            FeatureVars::Binary(v) => Term::Lit(if idx == 1 { *v } else { -*v }),
            FeatureVars::OneHot(vs) => Term::Lit(vs[idx as usize]),
        }
    }
}

struct Encoder<'a> {
    space: &'a FeatureSpace,
    f: CnfFormula,
    gates: usize,
}

impl Encoder<'_> {
    fn declare(&mut self, side: &str) -> Vec<FeatureVars> {
        let mut out = Vec::with_capacity(self.space.len());
        for feat in self.space.features() {
            let vars = match feat.domain.len() {
                1 => FeatureVars::Fixed,
                2 if feat.domain[1] == Value::Bool(true) => {
                    FeatureVars::Binary(self.f.new_var(format!("{side}.{}", feat.name)))
                }
                2 => FeatureVars::Binary(self.f.new_var(format!("{side}.{}={}", feat.name, feat.domain[1]))),
                _ => {
                    let vs: Vec<Lit> = feat
                        .domain
                        .iter()
                        .map(|v| self.f.new_var(format!("{side}.{}={v}", feat.name)))
                        .collect();
                    self.f.add_clause(vs.clone());
                    for i in 0..vs.len() {
                        for j in i + 1..vs.len() {
                            self.f.add_clause(vec![-vs[i], -vs[j]]);
                        }
                    }
                    FeatureVars::OneHot(vs)
                }
            };
            out.push(vars);
        }
        out
    }

    fn gate(&mut self) -> Lit {
        self.gates += 1;
        self.f.new_var(format!("t.{}", self.gates))
    }

    fn and(&mut self, parts: Vec<Term>) -> Term {
        let mut lits = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Term::Const(false) => return Term::Const(false),
                Term::Const(true) => {}
                Term::Lit(l) => lits.push(l),
            }
        }
        match lits.len() {
            0 => Term::Const(true),
            1 => Term::Lit(lits[0]),
            _ => {
                let g = self.gate();
                for &l in &lits {
                    self.f.add_clause(vec![-g, l]);
                }
                let mut back: Vec<Lit> = lits.iter().map(|&l| -l).collect();
                back.push(g);
                self.f.add_clause(back);
                Term::Lit(g)
            }
        }
    }

    fn or(&mut self, parts: Vec<Term>) -> Term {
        let negated = parts.into_iter().map(Term::negate).collect();
        self.and(negated).negate()
    }

    fn iff(&mut self, a: Term, b: Term) -> Term {
        match (a, b) {
            (Term::Const(p), t) | (t, Term::Const(p)) => {
                if p {
                    t
                } else {
                    t.negate()
                }
            }
            (Term::Lit(a), Term::Lit(b)) => {
                let g = self.gate();
                self.f.add_clause(vec![-g, -a, b]);
                self.f.add_clause(vec![-g, a, -b]);
                self.f.add_clause(vec![g, a, b]);
                self.f.add_clause(vec![g, -a, -b]);
                Term::Lit(g)
            }
        }
    }

    fn expr(&mut self, e: &BoolExpr, vars: &[FeatureVars]) -> Term {
        if let Some((feature, values)) = e.atom_values(self.space) {
            let atoms = values.iter().map(|&v| vars[feature].atom(v)).collect();
            return self.or(atoms);
        }
        match e {
            BoolExpr::Const(b) => Term::Const(*b),
            BoolExpr::Not(a) => self.expr(a, vars).negate(),
            BoolExpr::And(es) => {
                let parts = es.iter().map(|a| self.expr(a, vars)).collect();
                self.and(parts)
            }
            BoolExpr::Or(es) => {
                let parts = es.iter().map(|a| self.expr(a, vars)).collect();
                self.or(parts)
            }
            BoolExpr::Implies(a, b) => {
                let parts = vec![self.expr(a, vars).negate(), self.expr(b, vars)];
                self.or(parts)
            }
            BoolExpr::Iff(a, b) => {
                let (a, b) = (self.expr(a, vars), self.expr(b, vars));
                self.iff(a, b)
            }
            BoolExpr::Var(_) | BoolExpr::Eq(..) | BoolExpr::Le(..) | BoolExpr::Lt(..) => {
                unreachable!("atoms are handled above")
            }
        }
    }

    fn assert(&mut self, t: Term) {
        match t {
            Term::Const(true) => {}
            Term::Const(false) => {
                let v = self.gate();
                self.f.add_clause(vec![v]);
                self.f.add_clause(vec![-v]);
            }
            Term::Lit(l) => self.f.add_clause(vec![l]),
        }
    }
}

/// CNF that is satisfiable iff two instances of F[C] agree on every
/// unprotected feature and receive different labels.
///
/// Variables `x.*` and `y.*` describe the two instances. Two-valued features
/// get one variable (true for the second domain value), larger domains get
/// one variable per value named `x.name=value`. Auxiliary gate variables
/// are named `t.k`.
pub fn encode_ftu_counterexample(
    space: &FeatureSpace,
    constraints: &ConstraintSet,
    k: &Classifier,
    limits: &Limits,
) -> Result<CnfFormula> {
    let indicators = k.label_indicators(space, limits)?;
    let mut enc = Encoder {
        space,
        f: CnfFormula::new(),
        gates: 0,
    };
    let xs = enc.declare("x");
    let ys = enc.declare("y");
    for i in space.unprotected().iter() {
        match (&xs[i], &ys[i]) {
            (FeatureVars::Fixed, FeatureVars::Fixed) => {}
            (FeatureVars::Binary(a), FeatureVars::Binary(b)) => {
                enc.f.add_clause(vec![-a, *b]);
                enc.f.add_clause(vec![*a, -b]);
            }
            (FeatureVars::OneHot(a), FeatureVars::OneHot(b)) => {
                for (&a, &b) in a.iter().zip(b) {
                    enc.f.add_clause(vec![-a, b]);
                    enc.f.add_clause(vec![a, -b]);
                }
            }
            _ => unreachable!("both sides share a layout"),
        }
    }
    for c in constraints.iter() {
        for vars in [&xs, &ys] {
            let t = enc.expr(&c.expr, vars);
            enc.assert(t);
        }
    }
    let mut differs = Vec::with_capacity(indicators.len());
    for (_, ind) in &indicators {
        let in_x = enc.expr(ind, &xs);
        let in_y = enc.expr(ind, &ys);
        differs.push(enc.and(vec![in_x, in_y.negate()]));
    }
    let t = enc.or(differs);
    enc.assert(t);
    Ok(enc.f)
}

/// Reads the instance pair out of a satisfying assignment of a formula built
/// by [`encode_ftu_counterexample`] and checks that it is a counterexample.
pub fn decode_model(
    f: &CnfFormula,
    status: &SearchStatus,
    cs: &ConstrainedSpace,
    k: &Classifier,
) -> Result<(Instance, Instance)> {
    let SearchStatus::Sat(model) = status else {
        return Err(Error::contract("no model to decode: formula is unsatisfiable"));
    };
    if model.len() != f.variable_count as usize || !f.satisfied_by(model) {
        return Err(Error::contract("assignment does not satisfy the formula"));
    }
    let space = cs.space();
    let n = space.len();
    let mut x = vec![None; n];
    let mut y = vec![None; n];
    for (&v, name) in &f.comment_map {
        let Some((side, rest)) = name.split_once('.') else {
            continue;
        };
        let target = match side {
            "x" => &mut x,
            "y" => &mut y,
            _ => continue,
        };
        let value = model[v as usize - 1];
        let (fname, literal) = match rest.split_once('=') {
            Some((a, b)) => (a, Some(b)),
            None => (rest, None),
        };
        let i = space
            .index_of(fname)
            .ok_or_else(|| Error::Internal(format!("unknown feature in variable name `{name}`")))?;
        let feat = space.feature(i);
        let idx = match literal {
            Some(text) if feat.domain.len() > 2 => {
                if !value {
                    continue;
                }
                feat.parse_value(text)
                    .ok_or_else(|| Error::Internal(format!("bad value in variable name `{name}`")))?
            }
            _ => value as u8,
        };
        if target[i].replace(idx).is_some() {
            return Err(Error::Internal(format!("feature `{fname}` decoded twice")));
        }
    }
    let finish = |v: Vec<Option<u8>>| -> Result<Instance> {
        v.into_iter()
            .enumerate()
            .map(|(i, idx)| match idx {
                Some(idx) => Ok(idx),
                None if space.feature(i).domain.len() == 1 => Ok(0),
                None => Err(Error::Internal(format!(
                    "no value decoded for `{}`",
                    space.feature(i).name
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Instance)
    };
    let (x, y) = (finish(x)?, finish(y)?);
    let agree = space.unprotected().iter().all(|i| x[i] == y[i]);
    if !cs.contains(&x) || !cs.contains(&y) || !agree || k.label(space, &x) == k.label(space, &y) {
        return Err(Error::Internal(format!(
            "decoded pair {} {} is not a counterexample",
            space.format_instance(&x),
            space.format_instance(&y)
        )));
    }
    Ok((x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::parse_model;
    use crate::satcheck::{search, SearchStatus};

    fn load(text: &str) -> (ConstrainedSpace, Classifier) {
        let m = parse_model(text).unwrap();
        (m.constrained_space(Limits::default()).unwrap(), m.classifier)
    }

    fn encode(cs: &ConstrainedSpace, k: &Classifier) -> CnfFormula {
        encode_ftu_counterexample(cs.space(), cs.constraints(), k, cs.limits()).unwrap()
    }

    const EX0: &str = r#"{"features":[{"name":"m","protected":true},{"name":"f","protected":true},{"name":"g"}],
        "constraints":["(iff m (not f))"],
        "classifier":{"form":"expression","expr":"(or (and m g) (and f g))"}}"#;

    #[test]
    fn constrained_fair_model_is_unsat() {
        let (cs, k) = load(EX0);
        assert_eq!(search(&encode(&cs, &k)).status, SearchStatus::Unsat);
        let (cs, k) = load(
            r#"{"features":[{"name":"a","protected":true},{"name":"b"},{"name":"c"}],
            "constraints":["(iff a (or (and (not b) c) (and b (not c))))"],
            "classifier":{"form":"expression","expr":"a"}}"#,
        );
        assert_eq!(search(&encode(&cs, &k)).status, SearchStatus::Unsat);
    }

    #[test]
    fn unconstrained_counterexample_decodes() {
        let (cs, k) = load(EX0);
        let free = cs.unconstrained().unwrap();
        let f = encode(&free, &k);
        let r = search(&f);
        assert!(r.is_sat());
        let (x, y) = decode_model(&f, &r.status, &free, &k).unwrap();
        assert_eq!(x[2], 1);
        assert_eq!(y[2], 1);
        assert_ne!(k.label(free.space(), &x), k.label(free.space(), &y));
    }

    #[test]
    fn decoding_unsat_is_a_contract_error() {
        let (cs, k) = load(EX0);
        let f = encode(&cs, &k);
        assert!(matches!(decode_model(&f, &SearchStatus::Unsat, &cs, &k), Err(Error::Contract(_))));
    }

    #[test]
    fn one_hot_layout() {
        let (cs, k) = load(
            r#"{"features":[{"name":"m","protected":true},{"name":"n","domain":[0,1,2]}],
            "constraints":["(le n 1)"],
            "classifier":{"form":"expression","expr":"(or (= n 1) (and m (= n 0)))"}}"#,
        );
        let f = encode(&cs, &k);
        for side in ["x", "y"] {
            let vs: Vec<Lit> = (0..3).map(|v| f.var_named(&format!("{side}.n={v}")).unwrap()).collect();
            assert!(f.clauses.contains(&vs));
            assert!(f.clauses.contains(&vec![-vs[0], -vs[2]]));
        }
        assert!(f.var_named("x.m").is_some());
        let r = search(&f);
        let (x, y) = decode_model(&f, &r.status, &cs, &k).unwrap();
        assert_eq!((x[1], y[1]), (0, 0));
        assert_ne!(x[0], y[0]);
    }

    #[test]
    fn false_constraint_and_fixed_features() {
        let (cs, k) = load(
            r#"{"features":[{"name":"p","protected":true},{"name":"z","domain":[true]}],
            "constraints":["(and z (not z))"],
            "classifier":{"form":"expression","expr":"p"}}"#,
        );
        assert!(cs.is_empty());
        assert_eq!(search(&encode(&cs, &k)).status, SearchStatus::Unsat);
        let free = cs.unconstrained().unwrap();
        let f = encode(&free, &k);
        assert!(f.var_named("x.z").is_none());
        let r = search(&f);
        let (x, y) = decode_model(&f, &r.status, &free, &k).unwrap();
        assert_eq!((x[1], y[1]), (0, 0));
    }

    #[test]
    fn tree_and_table_forms() {
        let (cs, k) = load(EX0);
        let free = cs.unconstrained().unwrap();
        for compiled in [
            k.compile_tree(free.space(), free.limits()).unwrap(),
            k.compile_table(free.space(), free.limits()).unwrap(),
        ] {
            assert_eq!(search(&encode(&cs, &compiled)).status, SearchStatus::Unsat);
            let f = encode(&free, &compiled);
            let r = search(&f);
            decode_model(&f, &r.status, &free, &compiled).unwrap();
        }
    }

    #[test]
    fn oversized_table_is_unsupported() {
        let (cs, k) = load(EX0);
        let limits = Limits {
            max_cnf_table_rows: 4,
            ..Limits::default()
        };
        let table = k.compile_table(cs.space(), &limits).unwrap();
        assert!(matches!(
            encode_ftu_counterexample(cs.space(), cs.constraints(), &table, &limits),
            Err(Error::Unsupported(_))
        ));
    }
}
