use std::time::{Duration, Instant};

use super::cnf::{CnfFormula, Lit};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchStatus {
    /// `model[v - 1]` is the value of variable `v`.
    Sat(Vec<bool>),
    Unsat,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchStats {
    /// Branching decisions, counting both polarities.
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn is_sat(&self) -> bool {
        matches!(self.status, SearchStatus::Sat(_))
    }
}

struct Frame {
    trail_len: usize,
    var: usize,
    flipped: bool,
}

struct Solver<'a> {
    clauses: &'a [Vec<Lit>],
    /// Clause indices per literal, at `index(l)`.
    occurs: Vec<Vec<usize>>,
    value: Vec<i8>,
    trail: Vec<Lit>,
    head: usize,
}

fn index(l: Lit) -> usize {
    2 * (l.unsigned_abs() as usize) + (l < 0) as usize
}

impl Solver<'_> {
    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[l.unsigned_abs() as usize];
        if l < 0 {
            -v
        } else {
            v
        }
    }

    /// Makes `l` true. Returns false if it is already false.
    fn enqueue(&mut self, l: Lit) -> bool {
        match self.lit_value(l) {
            1 => true,
            -1 => false,
            _ => {
                self.value[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
                self.trail.push(l);
                true
            }
        }
    }

    fn propagate(&mut self) -> bool {
        while self.head < self.trail.len() {
            let falsified = -self.trail[self.head];
            self.head += 1;
            for k in 0..self.occurs[index(falsified)].len() {
                let c = self.occurs[index(falsified)][k];
                let mut unassigned = None;
                let mut open = 0;
                let mut satisfied = false;
                for &l in &self.clauses[c] {
                    match self.lit_value(l) {
                        1 => {
                            satisfied = true;
                            break;
                        }
                        0 => {
                            open += 1;
                            unassigned = Some(l);
                        }
                        _ => {}
                    }
                }
                if satisfied || open > 1 {
                    continue;
                }
                match unassigned {
                    None => return false,
                    Some(l) => {
                        self.enqueue(l);
                    }
                }
            }
        }
        true
    }

    fn undo(&mut self, len: usize) {
        for l in self.trail.drain(len..) {
            self.value[l.unsigned_abs() as usize] = 0;
        }
        self.head = len;
    }
}

/// Chronological backtracking with unit propagation. Branches on the
/// lowest-index unassigned variable, trying false first.
pub fn search(f: &CnfFormula) -> SearchResult {
    let start = Instant::now();
    let n = f.variable_count as usize;
    let mut stats = SearchStats::default();
    let status = if f.clauses.iter().any(|c| c.is_empty()) {
        SearchStatus::Unsat
    } else {
        run(f, n, &mut stats)
    };
    if let SearchStatus::Sat(model) = &status {
        assert!(f.satisfied_by(model), "search returned a non-model");
    }
    stats.elapsed = start.elapsed();
    SearchResult { status, stats }
}

fn run(f: &CnfFormula, n: usize, stats: &mut SearchStats) -> SearchStatus {
    let mut occurs = vec![Vec::new(); 2 * n + 2];
    for (i, c) in f.clauses.iter().enumerate() {
        for &l in c {
            occurs[index(l)].push(i);
        }
    }
    let mut s = Solver {
        clauses: &f.clauses,
        occurs,
        value: vec![0; n + 1],
        trail: Vec::with_capacity(n),
        head: 0,
    };
    for c in &f.clauses {
        if c.len() == 1 && !s.enqueue(c[0]) {
            return SearchStatus::Unsat;
        }
    }
    if !s.propagate() {
        return SearchStatus::Unsat;
    }
    let mut stack: Vec<Frame> = Vec::new();
    loop {
        let Some(next) = (1..=n).find(|&v| s.value[v] == 0) else {
            return SearchStatus::Sat(s.value[1..].iter().map(|&v| v > 0).collect());
        };
        stats.nodes += 1;
        stack.push(Frame {
            trail_len: s.trail.len(),
            var: next,
            flipped: false,
        });
        s.enqueue(-(next as Lit));
        while !s.propagate() {
            loop {
                let Some(frame) = stack.pop() else {
                    return SearchStatus::Unsat;
                };
                s.undo(frame.trail_len);
                if !frame.flipped {
                    stats.nodes += 1;
                    stack.push(Frame {
                        flipped: true,
                        ..frame
                    });
                    s.enqueue(frame.var as Lit);
                    break;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn formula(n: u32, clauses: &[&[Lit]]) -> CnfFormula {
        CnfFormula {
            variable_count: n,
            clauses: clauses.iter().map(|c| c.to_vec()).collect(),
            ..Default::default()
        }
    }

    fn brute_force(f: &CnfFormula) -> bool {
        let n = f.variable_count as usize;
        (0..1u32 << n).any(|bits| {
            let model: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            f.satisfied_by(&model)
        })
    }

    #[test]
    fn empty_formula_is_sat() {
        let r = search(&CnfFormula::new());
        assert_eq!(r.status, SearchStatus::Sat(vec![]));
    }

    #[test]
    fn contradiction_is_unsat() {
        assert_eq!(search(&formula(1, &[&[1], &[-1]])).status, SearchStatus::Unsat);
    }

    #[test]
    fn false_first_on_lowest_variable() {
        let r = search(&formula(3, &[&[1, 2, 3]]));
        assert_eq!(r.status, SearchStatus::Sat(vec![false, false, true]));
    }

    #[test]
    fn pigeonhole_three_into_two_is_unsat() {
        // p(i,h) = 2*i + h + 1
        let p = |i: i32, h: i32| 2 * i + h + 1;
        let mut cs: Vec<Vec<Lit>> = (0..3).map(|i| vec![p(i, 0), p(i, 1)]).collect();
        for h in 0..2 {
            for i in 0..3 {
                for j in i + 1..3 {
                    cs.push(vec![-p(i, h), -p(j, h)]);
                }
            }
        }
        let f = CnfFormula {
            variable_count: 6,
            clauses: cs,
            ..Default::default()
        };
        let r = search(&f);
        assert_eq!(r.status, SearchStatus::Unsat);
        assert!(r.stats.nodes > 0);
    }

    #[test]
    fn agrees_with_truth_tables() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..400 {
            let n = rng.gen_range(1..=7u32);
            let m = rng.gen_range(0..=20);
            let clauses: Vec<Vec<Lit>> = (0..m)
                .map(|_| {
                    (0..rng.gen_range(1..=3))
                        .map(|_| {
                            let v = rng.gen_range(1..=n) as Lit;
                            if rng.gen() {
                                v
                            } else {
                                -v
                            }
                        })
                        .collect()
                })
                .collect();
            let f = CnfFormula {
                variable_count: n,
                clauses,
                ..Default::default()
            };
            assert_eq!(search(&f).is_sat(), brute_force(&f), "{f:?}");
        }
    }
}
