use std::collections::HashMap;

use super::sat::Lit;
use crate::logic::Logic;

/// Clause generator for circuits: constant folding, structural hashing and
/// Tseitin definitions. Variable 1 is the constant true.
#[derive(Debug, Clone)]
pub struct Circuit {
    pub num_vars: u32,
    pub clauses: Vec<Vec<Lit>>,
    /// Variables introduced by gate definitions.
    pub gates: Vec<u32>,
    ands: HashMap<(Lit, Lit), Lit>,
}

pub const TRUE: Lit = 1;
pub const FALSE: Lit = -1;

impl Default for Circuit {
    fn default() -> Self {
        Circuit::new()
    }
}

impl Circuit {
    pub fn new() -> Circuit {
        Circuit {
            num_vars: 1,
            clauses: vec![vec![TRUE]],
            gates: Vec::new(),
            ands: HashMap::new(),
        }
    }

    /// A fresh unconstrained variable.
    pub fn fresh(&mut self) -> Lit {
        self.num_vars += 1;
        self.num_vars as Lit
    }

    fn gate(&mut self) -> Lit {
        let v = self.fresh();
        self.gates.push(v as u32);
        v
    }

    pub fn is_const(l: Lit) -> Option<bool> {
        match l {
            TRUE => Some(true),
            FALSE => Some(false),
            _ => None,
        }
    }
}

impl Logic for Circuit {
    type B = Lit;

    fn constant(&mut self, v: bool) -> Lit {
        if v {
            TRUE
        } else {
            FALSE
        }
    }

    fn not(&mut self, a: Lit) -> Lit {
        -a
    }

    fn and(&mut self, a: Lit, b: Lit) -> Lit {
        match (Circuit::is_const(a), Circuit::is_const(b)) {
            (Some(false), _) | (_, Some(false)) => return FALSE,
            (Some(true), _) => return b,
            (_, Some(true)) => return a,
            _ => {}
        }
        if a == b {
            return a;
        }
        if a == -b {
            return FALSE;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&g) = self.ands.get(&key) {
            return g;
        }
        let g = self.gate();
        self.clauses.push(vec![-g, a]);
        self.clauses.push(vec![-g, b]);
        self.clauses.push(vec![g, -a, -b]);
        self.ands.insert(key, g);
        g
    }

    fn or(&mut self, a: Lit, b: Lit) -> Lit {
        let x = self.and(-a, -b);
        -x
    }

    fn and_all(&mut self, xs: &[Lit]) -> Lit {
        let mut lits: Vec<Lit> = Vec::with_capacity(xs.len());
        for &x in xs {
            match Circuit::is_const(x) {
                Some(false) => return FALSE,
                Some(true) => {}
                None => lits.push(x),
            }
        }
        lits.sort_unstable();
        lits.dedup();
        if lits.iter().any(|l| lits.binary_search(&-l).is_ok()) {
            return FALSE;
        }
        match lits.len() {
            0 => TRUE,
            1 => lits[0],
            2 => self.and(lits[0], lits[1]),
            _ => {
                let g = self.gate();
                let mut big = vec![g];
                for &l in &lits {
                    self.clauses.push(vec![-g, l]);
                    big.push(-l);
                }
                self.clauses.push(big);
                g
            }
        }
    }

    fn or_all(&mut self, xs: &[Lit]) -> Lit {
        let neg: Vec<Lit> = xs.iter().map(|&x| -x).collect();
        let a = self.and_all(&neg);
        -a
    }
}
