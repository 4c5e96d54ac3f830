//! A small CDCL solver: two watched literals, first-UIP learning, VSIDS with
//! phase saving, Luby restarts and solving under assumptions.
//!
//! Literals use the DIMACS convention: variable `v >= 1`, `-v` its negation.

pub type Lit = i32;

const UNDEF: i8 = -1;

#[inline]
fn ilit(l: Lit) -> u32 {
    debug_assert!(l != 0);
    let v = l.unsigned_abs() - 1;
    2 * v + (l < 0) as u32
}

#[inline]
fn ivar(l: u32) -> usize {
    (l >> 1) as usize
}

#[derive(Debug, Clone, Default)]
struct Heap {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl Heap {
    fn grow(&mut self, n: usize) {
        self.pos.resize(n, None);
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if act[self.heap[p]] >= act[v] {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i]] = Some(i);
            i = p;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.heap[r]] > act[self.heap[l]] {
                r
            } else {
                l
            };
            if act[self.heap[c]] <= act[v] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i]] = Some(i);
            i = c;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v] = Some(i);
        self.up(i, act);
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if let Some(i) = self.pos[v] {
            self.up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Solver {
    clauses: Vec<Vec<u32>>,
    watches: Vec<Vec<usize>>,
    assign: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<u32>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    heap: Heap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    model: Vec<bool>,
    ok: bool,
    pub conflicts: u64,
}

/// Luby sequence value for index `i` (0-based).
fn luby(mut i: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1u64 << seq
}

impl Solver {
    pub fn new() -> Solver {
        Solver {
            var_inc: 1.0,
            ok: true,
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.assign.len()
    }

    /// Makes variables `1..=n` available.
    pub fn ensure_vars(&mut self, n: usize) {
        while self.assign.len() < n {
            let v = self.assign.len();
            self.assign.push(UNDEF);
            self.level.push(0);
            self.reason.push(None);
            self.activity.push(0.0);
            self.phase.push(false);
            self.seen.push(false);
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
            self.heap.grow(v + 1);
            self.heap.insert(v, &self.activity);
        }
    }

    pub fn new_var(&mut self) -> Lit {
        self.ensure_vars(self.num_vars() + 1);
        self.num_vars() as Lit
    }

    #[inline]
    fn value(&self, l: u32) -> i8 {
        let a = self.assign[ivar(l)];
        if a == UNDEF {
            UNDEF
        } else {
            a ^ (l & 1) as i8
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: u32, reason: Option<usize>) {
        let v = ivar(l);
        self.assign[v] = (l & 1 == 0) as i8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Adds a clause; returns false once the clause set is known unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        self.backtrack(0);
        let max = lits.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
        self.ensure_vars(max);
        let mut c: Vec<u32> = lits.iter().map(|&l| ilit(l)).collect();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return true;
        }
        if c.iter().any(|&l| self.value(l) == 1) {
            return true;
        }
        c.retain(|&l| self.value(l) != 0);
        match c.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(c[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(c);
                true
            }
        }
    }

    fn attach(&mut self, c: Vec<u32>) -> usize {
        let ci = self.clauses.len();
        self.watches[c[0] as usize].push(ci);
        self.watches[c[1] as usize].push(ci);
        self.clauses.push(c);
        ci
    }

    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let fl = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[fl as usize]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                i += 1;
                {
                    let c = &mut self.clauses[ci];
                    if c[0] == fl {
                        c.swap(0, 1);
                    }
                }
                let first = self.clauses[ci][0];
                if self.value(first) == 1 {
                    ws[j] = ci;
                    j += 1;
                    continue;
                }
                let len = self.clauses[ci].len();
                let mut moved = false;
                for k in 2..len {
                    let lk = self.clauses[ci][k];
                    if self.value(lk) != 0 {
                        self.clauses[ci].swap(1, k);
                        self.watches[lk as usize].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = ci;
                j += 1;
                if self.value(first) == 0 {
                    conflict = Some(ci);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(ci));
                }
            }
            ws.truncate(j);
            self.watches[fl as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn analyze(&mut self, mut confl: usize) -> (Vec<u32>, u32) {
        let mut learnt = vec![0u32];
        let mut path = 0;
        let mut p: Option<u32> = None;
        let mut idx = self.trail.len();
        let cur = self.decision_level();
        loop {
            let start = if p.is_some() { 1 } else { 0 };
            let len = self.clauses[confl].len();
            for k in start..len {
                let q = self.clauses[confl][k];
                let v = ivar(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump(v);
                    self.seen[v] = true;
                    if self.level[v] >= cur {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[ivar(self.trail[idx])] {
                    break;
                }
            }
            let pl = self.trail[idx];
            p = Some(pl);
            self.seen[ivar(pl)] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[ivar(pl)].expect("implied literal has a reason");
        }
        learnt[0] = p.expect("conflict above level 0") ^ 1;
        for &l in &learnt[1..] {
            self.seen[ivar(l)] = false;
        }
        let mut bt = 0;
        if learnt.len() > 1 {
            let mut mi = 1;
            for k in 2..learnt.len() {
                if self.level[ivar(learnt[k])] > self.level[ivar(learnt[mi])] {
                    mi = k;
                }
            }
            learnt.swap(1, mi);
            bt = self.level[ivar(learnt[1])];
        }
        self.var_inc /= 0.95;
        (learnt, bt)
    }

    fn backtrack(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = ivar(l);
            self.phase[v] = l & 1 == 0;
            self.assign[v] = UNDEF;
            self.reason[v] = None;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = self.trail.len();
    }

    pub fn solve(&mut self) -> bool {
        self.solve_with(&[])
    }

    /// Decides satisfiability under the given assumption literals. The clause set
    /// is unchanged afterwards (learnt clauses aside).
    pub fn solve_with(&mut self, assumptions: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        let max = assumptions
            .iter()
            .map(|l| l.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        self.ensure_vars(max);
        let assumps: Vec<u32> = assumptions.iter().map(|&l| ilit(l)).collect();
        self.backtrack(0);
        if self.propagate().is_some() {
            self.ok = false;
            return false;
        }
        let mut restart = 0u64;
        let mut budget = 100 * luby(restart);
        loop {
            if let Some(confl) = self.propagate() {
                self.conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return false;
                }
                let (learnt, bt) = self.analyze(confl);
                self.backtrack(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let first = learnt[0];
                    let ci = self.attach(learnt);
                    self.enqueue(first, Some(ci));
                }
                budget = budget.saturating_sub(1);
                continue;
            }
            if budget == 0 {
                restart += 1;
                budget = 100 * luby(restart);
                self.backtrack(0);
                continue;
            }
            let dl = self.decision_level() as usize;
            let next = if dl < assumps.len() {
                let a = assumps[dl];
                match self.value(a) {
                    1 => {
                        self.trail_lim.push(self.trail.len());
                        continue;
                    }
                    0 => {
                        self.backtrack(0);
                        return false;
                    }
                    _ => a,
                }
            } else {
                let mut pick = None;
                while let Some(v) = self.heap.pop(&self.activity) {
                    if self.assign[v] == UNDEF {
                        pick = Some(v);
                        break;
                    }
                }
                match pick {
                    None => {
                        self.model = self.assign.iter().map(|&a| a == 1).collect();
                        self.backtrack(0);
                        return true;
                    }
                    Some(v) => 2 * v as u32 + (!self.phase[v]) as u32,
                }
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(next, None);
        }
    }

    /// Value of `l` in the last model.
    pub fn model_value(&self, l: Lit) -> bool {
        let v = l.unsigned_abs() as usize - 1;
        let b = self.model.get(v).copied().unwrap_or(false);
        if l < 0 {
            !b
        } else {
            b
        }
    }
}
