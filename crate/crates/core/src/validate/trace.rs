use std::fmt::Write as _;

use super::ValidateError;

/// A finite trace: one Boolean per variable per cycle.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub vars: Vec<String>,
    pub rows: Vec<Vec<bool>>,
}

impl Trace {
    pub fn new(vars: Vec<String>) -> Trace {
        Trace {
            vars,
            rows: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn get(&self, t: usize, name: &str) -> Option<bool> {
        let c = self.column(name)?;
        self.rows.get(t).map(|r| r[c])
    }

    /// Columns `names` of every row, in that order.
    pub fn project(&self, names: &[String]) -> Result<Vec<Vec<bool>>, ValidateError> {
        let cols: Vec<usize> = names
            .iter()
            .map(|n| {
                self.column(n)
                    .ok_or_else(|| ValidateError::MissingColumn(n.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(self
            .rows
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect())
    }

    /// Appends the columns of `other`, which must have the same length.
    pub fn join(&self, other: &Trace) -> Trace {
        let mut vars = self.vars.clone();
        vars.extend(other.vars.iter().cloned());
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        Trace { vars, rows }
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.vars.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<&str> = r.iter().map(|&b| if b { "1" } else { "0" }).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn from_csv(src: &str) -> Result<Trace, ValidateError> {
        let mut lines = src
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let Some((_, header)) = lines.next() else {
            return Ok(Trace::default());
        };
        let vars: Vec<String> = header.split(',').map(|v| v.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (n, line) in lines {
            let row: Vec<bool> = line
                .split(',')
                .map(|c| match c.trim() {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    _ => Err(ValidateError::Csv {
                        line: n + 1,
                        message: format!("cell `{}` is not 0 or 1", c.trim()),
                    }),
                })
                .collect::<Result<_, _>>()?;
            if row.len() != vars.len() {
                return Err(ValidateError::Csv {
                    line: n + 1,
                    message: format!("{} cells, header has {}", row.len(), vars.len()),
                });
            }
            rows.push(row);
        }
        Ok(Trace { vars, rows })
    }
}
