use std::collections::HashMap;

use super::ValidateError;
use crate::formula::{DnfClause, Formula, GxwSpec, OutLit, PatternId};

/// Largest `|V_in| + |V_out|` and Ω the oracle accepts.
pub const ORACLE_MAX_VARS: usize = 8;
pub const ORACLE_MAX_OMEGA: u32 = 8;

/// Cap on nodes materialized in a counter-strategy tree.
const TREE_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Realizability {
    Realizable,
    Unrealizable(CounterStrategy),
}

impl Realizability {
    pub fn is_realizable(&self) -> bool {
        matches!(self, Realizability::Realizable)
    }
}

/// Environment strategy that forces a violation within the horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterStrategy {
    pub root: StrategyNode,
    /// Set when the tree was cut off at the node budget.
    pub truncated: bool,
}

/// The environment's inputs for one cycle and the continuation for every
/// output reply the system may give. Past the horizon the system no longer
/// moves and `replies` has a single entry with no outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyNode {
    pub cycle: usize,
    pub inputs: Vec<bool>,
    pub replies: Vec<Reply>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub outputs: Vec<bool>,
    /// `None` once the reply already completes a violation.
    pub next: Option<Box<StrategyNode>>,
}

impl StrategyNode {
    /// Number of cycles on the longest path.
    pub fn depth(&self) -> usize {
        1 + self
            .replies
            .iter()
            .filter_map(|r| r.next.as_ref().map(|n| n.depth()))
            .max()
            .unwrap_or(0)
    }
}

/// `(offset, bit, polarity)`; bits index a packed row (inputs, then outputs).
type Clause = Vec<(usize, usize, bool)>;

enum Conj {
    P1 { event: Vec<Clause>, out: (usize, bool) },
    P2 { i: usize, trig: Vec<Clause>, rel: Vec<Clause>, out: (usize, bool) },
    P3 { i: usize, trig: Vec<Clause>, out: (usize, bool) },
    P4 { i: usize, trig: Vec<Clause>, out: (usize, bool) },
}

struct Game {
    nin: usize,
    nout: usize,
    omega: usize,
    window: usize,
    conj: Vec<Conj>,
    /// Assumption-respecting input rows.
    env_moves: Vec<u32>,
    /// For each input row, the output rows allowed by the invariants.
    sys_moves: HashMap<u32, Vec<u32>>,
    memo: HashMap<(usize, Vec<u32>, u64), bool>,
}

fn eval_clause(c: &Clause, rows: &[u32], t: usize) -> bool {
    c.iter()
        .all(|&(d, b, p)| (rows[t + d] >> b & 1 == 1) == p)
}

fn eval_dnf(cs: &[Clause], rows: &[u32], t: usize) -> bool {
    cs.iter().any(|c| eval_clause(c, rows, t))
}

fn lit(o: (usize, bool), rows: &[u32], t: usize) -> bool {
    (rows[t] >> o.0 & 1 == 1) == o.1
}

impl Game {
    fn new(spec: &GxwSpec, omega: u32) -> Game {
        let names: Vec<&String> = spec.inputs.iter().chain(&spec.outputs).collect();
        let bit = |v: &str| names.iter().position(|n| *n == v).expect("declared variable");
        let clauses = |cs: &[DnfClause]| -> Vec<Clause> {
            cs.iter()
                .map(|c| {
                    c.lits
                        .iter()
                        .map(|l| (l.depth as usize, bit(&l.var), l.positive))
                        .collect()
                })
                .collect()
        };
        let out = |o: &OutLit| (bit(&o.var), o.positive);
        let mut conj = Vec::new();
        let mut p5: Vec<&Formula> = Vec::new();
        for s in &spec.subspecs {
            let p = &s.parts;
            let i = p.depth as usize;
            match s.pattern() {
                PatternId::P1 => conj.push(Conj::P1 {
                    event: clauses(&p.trigger),
                    out: out(p.out()),
                }),
                PatternId::P2 => {
                    let rel: Vec<DnfClause> = p.release().cloned().collect();
                    conj.push(Conj::P2 {
                        i,
                        trig: clauses(&p.trigger),
                        rel: clauses(&rel),
                        out: out(p.out()),
                    })
                }
                PatternId::P3 => conj.push(Conj::P3 {
                    i,
                    trig: clauses(&p.trigger),
                    out: out(p.out()),
                }),
                PatternId::P4 => conj.push(Conj::P4 {
                    i,
                    trig: clauses(&p.trigger),
                    out: out(p.out()),
                }),
                PatternId::P5 => p5.extend(p.body.as_ref()),
                PatternId::P6 => {}
            }
        }
        let nin = spec.inputs.len();
        let nout = spec.outputs.len();
        let value = |row: u32, v: &str| row >> bit(v) & 1 == 1;
        let env_moves: Vec<u32> = (0..1u32 << nin)
            .filter(|&x| spec.assumption.eval_prop(&mut |_, v| value(x, v)))
            .collect();
        let sys_moves = env_moves
            .iter()
            .map(|&x| {
                let ys = (0..1u32 << nout)
                    .map(|y| x | y << nin)
                    .filter(|&row| p5.iter().all(|f| f.eval_prop(&mut |_, v| value(row, v))))
                    .collect();
                (x, ys)
            })
            .collect();
        Game {
            nin,
            nout,
            omega: omega as usize,
            window: spec.max_window() as usize,
            conj,
            env_moves,
            sys_moves,
            memo: HashMap::new(),
        }
    }

    /// Checks position `p` (all of its lookahead is in `rows`); `None` on a violation.
    fn digest(&self, rows: &[u32], p: usize, mut flags: u64) -> Option<u64> {
        let mut k = 0;
        for c in &self.conj {
            match c {
                Conj::P1 { event, out } => {
                    let pending = flags >> k & 1 == 1;
                    if pending {
                        let ev = eval_dnf(event, rows, p);
                        if !ev && !lit(*out, rows, p) {
                            return None;
                        }
                        if ev {
                            flags &= !(1 << k);
                        }
                    }
                    k += 1;
                }
                Conj::P2 { i, trig, rel, out } => {
                    let carry = flags >> k & 1 == 1;
                    let start = p >= *i && eval_dnf(trig, rows, p - i);
                    let active = carry || start;
                    let r = eval_dnf(rel, rows, p);
                    if active && !r && !lit(*out, rows, p) {
                        return None;
                    }
                    if active && !r {
                        flags |= 1 << k;
                    } else {
                        flags &= !(1 << k);
                    }
                    k += 1;
                }
                Conj::P3 { i, trig, out } => {
                    if p >= *i && eval_dnf(trig, rows, p - i) && !lit(*out, rows, p) {
                        return None;
                    }
                }
                Conj::P4 { i, trig, out } => {
                    if p >= *i && eval_dnf(trig, rows, p - i) != lit(*out, rows, p) {
                        return None;
                    }
                }
            }
        }
        Some(flags)
    }

    fn initial_flags(&self) -> u64 {
        let mut flags = 0;
        let mut k = 0;
        for c in &self.conj {
            match c {
                Conj::P1 { .. } => {
                    flags |= 1 << k;
                    k += 1;
                }
                Conj::P2 { .. } => k += 1,
                _ => {}
            }
        }
        flags
    }

    fn horizon(&self) -> usize {
        self.omega + self.window
    }

    /// After the row of cycle `t` is appended: digests the position that just
    /// became complete. `None` when it is violated.
    fn advance(&self, rows: &[u32], flags: u64) -> Option<u64> {
        let t = rows.len() - 1;
        match t.checked_sub(self.window) {
            Some(p) if p <= self.omega => self.digest(rows, p, flags),
            _ => Some(flags),
        }
    }

    fn key(&self, rows: &[u32], flags: u64) -> (usize, Vec<u32>, u64) {
        let keep = 2 * self.window + 1;
        let from = rows.len().saturating_sub(keep);
        (rows.len(), rows[from..].to_vec(), flags)
    }

    /// Whether the environment wins from here; `rows` holds cycles `0..t`.
    fn env_wins(&mut self, rows: &mut Vec<u32>, flags: u64) -> bool {
        let t = rows.len();
        if t > self.horizon() {
            return false;
        }
        let key = self.key(rows, flags);
        if let Some(&w) = self.memo.get(&key) {
            return w;
        }
        let mut win = false;
        for k in 0..self.env_moves.len() {
            let x = self.env_moves[k];
            if self.sys_loses(rows, flags, x) {
                win = true;
                break;
            }
        }
        self.memo.insert(key, win);
        win
    }

    fn sys_loses(&mut self, rows: &mut Vec<u32>, flags: u64, x: u32) -> bool {
        let t = rows.len();
        let replies: Vec<u32> = if t <= self.omega {
            self.sys_moves[&x].clone()
        } else {
            vec![x]
        };
        for row in replies {
            rows.push(row);
            let ok = match self.advance(rows, flags) {
                Some(f) => !self.env_wins(rows, f),
                None => false,
            };
            rows.pop();
            if ok {
                return false;
            }
        }
        true
    }

    fn bits(&self, row: u32, from: usize, n: usize) -> Vec<bool> {
        (from..from + n).map(|b| row >> b & 1 == 1).collect()
    }

    /// Rebuilds the winning environment strategy from the memo.
    fn extract(&mut self, rows: &mut Vec<u32>, flags: u64, budget: &mut usize) -> Option<StrategyNode> {
        let t = rows.len();
        let moves = self.env_moves.clone();
        let x = moves.into_iter().find(|&x| self.sys_loses(rows, flags, x))?;
        let mut node = StrategyNode {
            cycle: t,
            inputs: self.bits(x, 0, self.nin),
            replies: Vec::new(),
        };
        let replies: Vec<u32> = if t <= self.omega {
            self.sys_moves[&x].clone()
        } else {
            vec![x]
        };
        for row in replies {
            let outputs = if t <= self.omega {
                self.bits(row, self.nin, self.nout)
            } else {
                Vec::new()
            };
            rows.push(row);
            let next = match self.advance(rows, flags) {
                None => None,
                Some(_) if *budget == 0 => None,
                Some(f) => {
                    *budget -= 1;
                    self.extract(rows, f, budget).map(Box::new)
                }
            };
            rows.pop();
            node.replies.push(Reply { outputs, next });
        }
        Some(node)
    }
}

/// Solves the finite game up to cycle `omega`: the environment picks inputs
/// allowed by the assumption, the system then picks outputs allowed by the
/// invariants, and the environment wins if some conjunct is definitely
/// violated at a cycle `<= omega`. Inputs after `omega` are still chosen by
/// the environment so that lookahead windows of earlier cycles are complete.
pub fn brute_force_realizability(spec: &GxwSpec, omega: u32) -> Result<Realizability, ValidateError> {
    let vars = spec.inputs.len() + spec.outputs.len();
    if vars > ORACLE_MAX_VARS || omega > ORACLE_MAX_OMEGA {
        return Err(ValidateError::InstanceTooLarge { vars, omega });
    }
    let mut g = Game::new(spec, omega);
    let flags = g.initial_flags();
    let mut rows = Vec::new();
    if !g.env_wins(&mut rows, flags) {
        return Ok(Realizability::Realizable);
    }
    let mut budget = TREE_BUDGET;
    let root = g
        .extract(&mut rows, flags, &mut budget)
        .expect("winning root has a winning move");
    Ok(Realizability::Unrealizable(CounterStrategy {
        root,
        truncated: budget == 0,
    }))
}
