use serde::Serialize;

use super::{Trace, ValidateError};
use crate::formula::{eval3_dnf, DnfClause, GxwSpec, OutLit, PatternId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub label: String,
    pub cycle: usize,
    pub reason: String,
}

/// Column lookup over a total trace; cycles past the end are unknown.
pub(crate) struct View<'a> {
    rows: &'a [Vec<bool>],
    cols: Vec<usize>,
    names: Vec<&'a str>,
}

impl<'a> View<'a> {
    pub(crate) fn new(spec: &'a GxwSpec, tr: &'a Trace) -> Result<View<'a>, ValidateError> {
        let names: Vec<&str> = spec
            .inputs
            .iter()
            .chain(&spec.outputs)
            .map(String::as_str)
            .collect();
        let cols = names
            .iter()
            .map(|n| {
                tr.column(n)
                    .ok_or_else(|| ValidateError::MissingColumn(n.to_string()))
            })
            .collect::<Result<_, _>>()?;
        Ok(View {
            rows: &tr.rows,
            cols,
            names,
        })
    }

    fn at(&self, t: usize, name: &str) -> Option<bool> {
        let row = self.rows.get(t)?;
        let k = self.names.iter().position(|n| *n == name)?;
        Some(row[self.cols[k]])
    }

    fn dnf(&self, cls: &[DnfClause], t: usize) -> Option<bool> {
        eval3_dnf(cls, &mut |d, v| self.at(t + d as usize, v))
    }

    fn lit(&self, o: &OutLit, t: usize) -> bool {
        self.at(t, &o.var).expect("cycle inside trace") == o.positive
    }

    fn prop(&self, f: &crate::formula::Formula, t: usize) -> bool {
        f.eval_prop(&mut |d, v| self.at(t + d as usize, v).expect("depth-0 body"))
    }
}

/// Finite-trace violations of every conjunct and of the assumption.
///
/// Values past the end of the trace are unknown, so only definite violations
/// are reported; weak-until obligations still open at the end are fine.
pub fn check_trace(spec: &GxwSpec, tr: &Trace) -> Result<Vec<Violation>, ValidateError> {
    let v = View::new(spec, tr)?;
    let n = tr.len();
    let mut out = Vec::new();
    let mut push = |label: &str, cycle: usize, reason: &str| {
        out.push(Violation {
            label: label.to_string(),
            cycle,
            reason: reason.to_string(),
        })
    };
    if spec.has_assumption() {
        for t in 0..n {
            if !v.prop(&spec.assumption, t) {
                push("assume", t, "assumption false");
            }
        }
    }
    for s in &spec.subspecs {
        let p = &s.parts;
        let i = p.depth as usize;
        match s.pattern() {
            PatternId::P1 => {
                for t in 0..n {
                    let ev = v.dnf(&p.trigger, t);
                    if ev != Some(false) {
                        break;
                    }
                    if !v.lit(p.out(), t) {
                        push(&s.label, t, "output deviated before the releasing event");
                        break;
                    }
                }
            }
            PatternId::P2 => {
                let rel: Vec<DnfClause> = p.release().cloned().collect();
                let mut carry = false;
                for t in 0..n {
                    let start = t >= i && v.dnf(&p.trigger, t - i) == Some(true);
                    let active = carry || start;
                    let r = v.dnf(&rel, t);
                    if active && r == Some(false) && !v.lit(p.out(), t) {
                        push(&s.label, t, "output deviated while locked");
                        carry = false;
                    } else {
                        carry = active && r == Some(false);
                    }
                }
            }
            PatternId::P3 => {
                for t in i..n {
                    if v.dnf(&p.trigger, t - i) == Some(true) && !v.lit(p.out(), t) {
                        push(&s.label, t, "triggered output not set");
                    }
                }
            }
            PatternId::P4 => {
                for t in i..n {
                    let trig = v.dnf(&p.trigger, t - i) == Some(true);
                    if trig != v.lit(p.out(), t) {
                        push(&s.label, t, "output differs from the trigger");
                    }
                }
            }
            PatternId::P5 => {
                let body = p.body.as_ref().expect("P5 body");
                for t in 0..n {
                    if !v.prop(body, t) {
                        push(&s.label, t, "P5 invariant false");
                    }
                }
            }
            PatternId::P6 => {}
        }
    }
    out.sort_by(|a, b| (a.cycle, &a.label).cmp(&(b.cycle, &b.label)));
    Ok(out)
}
