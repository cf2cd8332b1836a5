//! Seeded random models for property and acceptance tests.
#![allow(dead_code)]

use std::path::PathBuf;

use pifair::document::expression_model;
use pifair::{BoolExpr, Feature, FeatureSpace, Model, ScopeProfile, Value};
use rand::seq::SliceRandom;
use rand::Rng;

pub const PROFILES: [ScopeProfile; 5] = [
    ScopeProfile::None,
    ScopeProfile::OnlyP,
    ScopeProfile::OnlyN,
    ScopeProfile::PAndNSeparate,
    ScopeProfile::Crossing,
];

/// Largest |F| a generated space may have.
pub const MAX_FULL_SIZE: u128 = 1500;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> Model {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    pifair::parse_model(&text).unwrap()
}

pub const FIXTURES: [&str; 16] = [
    "ex0",
    "ex0a",
    "ex1",
    "ex2",
    "ex3",
    "ex4",
    "ex5",
    "ex0bis",
    "ex_ftu_not_fair",
    "ex0ter",
    "adopt",
    "adopt2",
    "subsumption",
    "empty_space",
    "ex2_race",
    "maternity",
];

/// 2 to 8 features with domains of 2 or 3 values, at least one protected
/// and one unprotected feature.
pub fn random_space<R: Rng>(rng: &mut R) -> FeatureSpace {
    let n = rng.gen_range(2..=8);
    let protected_at = rng.gen_range(0..n);
    let unprotected_at = (protected_at + rng.gen_range(1..n)) % n;
    let mut size: u128 = 1;
    let features = (0..n)
        .map(|i| {
            let protected = i == protected_at || (i != unprotected_at && rng.gen_bool(0.3));
            let name = format!("f{i}");
            let three = rng.gen_bool(0.3) && size * 3 * (1 << (n - i - 1)) <= MAX_FULL_SIZE;
            if three {
                size *= 3;
                Feature::new(name, (0..3).map(Value::Int).collect(), protected)
            } else {
                size *= 2;
                if rng.gen_bool(0.8) {
                    Feature::boolean(name, protected)
                } else {
                    Feature::new(name, vec![Value::Int(0), Value::Int(1)], protected)
                }
            }
        })
        .collect();
    FeatureSpace::new(features).unwrap()
}

fn random_atom<R: Rng>(rng: &mut R, space: &FeatureSpace, over: &[usize]) -> BoolExpr {
    let i = *over.choose(rng).unwrap();
    let f = space.feature(i);
    let atom = if f.is_boolean() {
        if rng.gen_bool(0.7) {
            BoolExpr::Var(i)
        } else {
            BoolExpr::Eq(i, rng.gen_range(0..f.domain.len()) as u8)
        }
    } else {
        let c = f.domain[rng.gen_range(0..f.domain.len())].as_int().unwrap();
        match rng.gen_range(0..3) {
            0 => BoolExpr::Eq(i, f.value_index(&Value::Int(c)).unwrap()),
            1 => BoolExpr::Le(i, c),
            _ => BoolExpr::Lt(i, c),
        }
    };
    if rng.gen_bool(0.4) {
        BoolExpr::not(atom)
    } else {
        atom
    }
}

/// A random formula whose atoms all mention features of `over`.
pub fn random_expr<R: Rng>(rng: &mut R, space: &FeatureSpace, over: &[usize], depth: u32) -> BoolExpr {
    if depth == 0 || rng.gen_bool(0.25) {
        return random_atom(rng, space, over);
    }
    let sub = |rng: &mut R| random_expr(rng, space, over, depth - 1);
    match rng.gen_range(0..6) {
        0 | 1 => BoolExpr::And((0..rng.gen_range(2..=3)).map(|_| sub(rng)).collect()),
        2 | 3 => BoolExpr::Or((0..rng.gen_range(2..=3)).map(|_| sub(rng)).collect()),
        4 => BoolExpr::implies(sub(rng), sub(rng)),
        _ => BoolExpr::iff(sub(rng), sub(rng)),
    }
}

fn crossing<R: Rng>(rng: &mut R, space: &FeatureSpace, p: &[usize], n: &[usize]) -> BoolExpr {
    let a = random_expr(rng, space, p, 1);
    let b = random_expr(rng, space, n, 1);
    match rng.gen_range(0..3) {
        0 => BoolExpr::Or(vec![a, b]),
        1 => BoolExpr::implies(a, b),
        _ => BoolExpr::iff(a, b),
    }
}

/// Constraints whose syntactic scope profile is exactly `target`.
pub fn random_constraints<R: Rng>(rng: &mut R, space: &FeatureSpace, target: ScopeProfile) -> Vec<BoolExpr> {
    let p: Vec<usize> = space.protected().iter().collect();
    let n: Vec<usize> = space.unprotected().iter().collect();
    let some = |rng: &mut R, over: &[usize]| -> Vec<BoolExpr> {
        (0..rng.gen_range(1..=2)).map(|_| random_expr(rng, space, over, 2)).collect()
    };
    match target {
        ScopeProfile::None => Vec::new(),
        ScopeProfile::OnlyP => some(rng, &p),
        ScopeProfile::OnlyN => some(rng, &n),
        ScopeProfile::PAndNSeparate => {
            let mut cs = some(rng, &p);
            cs.extend(some(rng, &n));
            cs.shuffle(rng);
            cs
        }
        ScopeProfile::Crossing => {
            let mut cs = vec![crossing(rng, space, &p, &n)];
            if rng.gen_bool(0.5) {
                cs.push(crossing(rng, space, &p, &n));
            }
            cs
        }
    }
}

/// A random expression classifier with constraints of the given profile.
/// Retries a few times to avoid an empty constrained space.
pub fn random_model<R: Rng>(rng: &mut R, target: ScopeProfile) -> Model {
    let space = random_space(rng);
    let all: Vec<usize> = (0..space.len()).collect();
    let mut constraints = random_constraints(rng, &space, target);
    for _ in 0..8 {
        let probe = pifair::ConstraintSet::new(constraints.clone());
        if space.iter_full().any(|x| probe.satisfied(&space, &x)) {
            break;
        }
        constraints = random_constraints(rng, &space, target);
    }
    let classifier = random_expr(rng, &space, &all, 3);
    expression_model(space, constraints, classifier)
}

/// A random DNF over variables `1..=k` as a list of terms of signed
/// variable literals. Some draws are padded with every sign pattern over a
/// few variables, which makes them tautologies.
pub fn random_dnf<R: Rng>(rng: &mut R) -> (usize, Vec<Vec<i32>>) {
    let k = rng.gen_range(1..=6);
    let mut terms: Vec<Vec<i32>> = (0..rng.gen_range(1..=5))
        .map(|_| {
            let mut vars: Vec<i32> = (1..=k as i32).collect();
            vars.shuffle(rng);
            vars.truncate(rng.gen_range(1..=k.min(3)));
            vars.into_iter().map(|v| if rng.gen() { v } else { -v }).collect()
        })
        .collect();
    if rng.gen_bool(0.4) {
        let mut vars: Vec<i32> = (1..=k as i32).collect();
        vars.shuffle(rng);
        vars.truncate(rng.gen_range(1..=k.min(2)));
        for signs in 0..1u32 << vars.len() {
            let term = vars
                .iter()
                .enumerate()
                .map(|(j, &v)| if signs >> j & 1 == 1 { v } else { -v })
                .collect();
            terms.push(term);
        }
        terms.shuffle(rng);
    }
    (k, terms)
}

pub fn dnf_holds(terms: &[Vec<i32>], assignment: &[bool]) -> bool {
    terms
        .iter()
        .any(|t| t.iter().all(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
}

pub fn is_tautology(k: usize, terms: &[Vec<i32>]) -> bool {
    (0..1u32 << k).all(|bits| {
        let a: Vec<bool> = (0..k).map(|i| bits >> i & 1 == 1).collect();
        dnf_holds(terms, &a)
    })
}

/// The classifier `x0 ∨ Φ(x1..xk)` over boolean features with only `x0`
/// protected and no constraints. It satisfies FTU iff `Φ` is a tautology.
pub fn lifted_dnf_model(k: usize, terms: &[Vec<i32>]) -> Model {
    let features = (0..=k).map(|i| Feature::boolean(format!("x{i}"), i == 0)).collect();
    let space = FeatureSpace::new(features).unwrap();
    let lit = |l: i32| {
        let v = BoolExpr::Var(l.unsigned_abs() as usize);
        if l > 0 {
            v
        } else {
            BoolExpr::not(v)
        }
    };
    let phi = nary(
        BoolExpr::Or,
        terms.iter().map(|t| nary(BoolExpr::And, t.iter().map(|&l| lit(l)).collect())).collect(),
    );
    expression_model(space, Vec::new(), BoolExpr::Or(vec![BoolExpr::Var(0), phi]))
}

fn nary(op: fn(Vec<BoolExpr>) -> BoolExpr, mut parts: Vec<BoolExpr>) -> BoolExpr {
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        op(parts)
    }
}
