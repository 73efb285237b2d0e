//! DIMACS CNF and plain edge-list formats.

use std::fmt::Write as _;

use super::{Clause, Literal, MaxCutGraph, ProblemError, SatInstance};

/// Parses a DIMACS CNF document with exactly three literals per clause.
///
/// Comment lines start with `c`; the problem line is `p cnf <vars> <clauses>`.
/// Literals are 1-indexed, a negative sign marks negation, and each clause is
/// terminated by `0` (clauses may span lines).
pub fn parse_dimacs(text: &str) -> Result<SatInstance, ProblemError> {
    let mut n: Option<usize> = None;
    let mut declared_clauses = 0usize;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut clause_start_line = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            if n.is_some() {
                return Err(ProblemError::Parse {
                    line: line_no,
                    msg: "duplicate problem line".into(),
                });
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() != 3 || fields[0] != "cnf" {
                return Err(ProblemError::Parse {
                    line: line_no,
                    msg: format!("expected 'p cnf <vars> <clauses>', got '{line}'"),
                });
            }
            let vars = fields[1].parse::<usize>().map_err(|_| ProblemError::Parse {
                line: line_no,
                msg: format!("bad variable count '{}'", fields[1]),
            })?;
            declared_clauses = fields[2].parse::<usize>().map_err(|_| ProblemError::Parse {
                line: line_no,
                msg: format!("bad clause count '{}'", fields[2]),
            })?;
            n = Some(vars);
            continue;
        }
        let n = n.ok_or(ProblemError::Parse {
            line: line_no,
            msg: "clause data before the problem line".into(),
        })?;
        for token in line.split_whitespace() {
            let lit = token.parse::<i64>().map_err(|_| ProblemError::Parse {
                line: line_no,
                msg: format!("bad literal '{token}'"),
            })?;
            if lit == 0 {
                if current.len() != 3 {
                    return Err(ProblemError::Parse {
                        line: line_no,
                        msg: format!("clause has {} literals, expected 3", current.len()),
                    });
                }
                clauses.push([current[0], current[1], current[2]]);
                current.clear();
            } else {
                let var = lit.unsigned_abs() as usize - 1;
                if var >= n {
                    return Err(ProblemError::Parse {
                        line: line_no,
                        msg: format!("literal {lit} exceeds declared variable count {n}"),
                    });
                }
                if current.is_empty() {
                    clause_start_line = line_no;
                }
                current.push(Literal { var, negated: lit < 0 });
            }
        }
    }

    if !current.is_empty() {
        return Err(ProblemError::Parse {
            line: clause_start_line,
            msg: "unterminated clause at end of input".into(),
        });
    }
    let n = n.ok_or(ProblemError::Parse { line: 1, msg: "missing problem line".into() })?;
    if clauses.len() != declared_clauses {
        return Err(ProblemError::Parse {
            line: 1,
            msg: format!("declared {declared_clauses} clauses, found {}", clauses.len()),
        });
    }
    SatInstance::new(n, clauses)
}

pub fn write_dimacs(inst: &SatInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", inst.num_vars(), inst.num_clauses());
    for clause in inst.clauses() {
        for lit in clause {
            let signed = (lit.var as i64 + 1) * if lit.negated { -1 } else { 1 };
            let _ = write!(out, "{signed} ");
        }
        let _ = writeln!(out, "0");
    }
    out
}

/// Parses the plain edge-list format: a header line `n <vertex count>`
/// followed by one `i j` pair per line. Blank lines and `#` comments are
/// skipped.
pub fn parse_edgelist(text: &str) -> Result<MaxCutGraph, ProblemError> {
    let mut n: Option<usize> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match n {
            None => {
                if fields.len() != 2 || fields[0] != "n" {
                    return Err(ProblemError::Parse {
                        line: line_no,
                        msg: format!("expected header 'n <count>', got '{line}'"),
                    });
                }
                n = Some(fields[1].parse::<usize>().map_err(|_| ProblemError::Parse {
                    line: line_no,
                    msg: format!("bad vertex count '{}'", fields[1]),
                })?);
            }
            Some(count) => {
                if fields.len() != 2 {
                    return Err(ProblemError::Parse {
                        line: line_no,
                        msg: format!("expected 'i j', got '{line}'"),
                    });
                }
                let parse = |s: &str| {
                    s.parse::<usize>().map_err(|_| ProblemError::Parse {
                        line: line_no,
                        msg: format!("bad vertex index '{s}'"),
                    })
                };
                let (a, b) = (parse(fields[0])?, parse(fields[1])?);
                if a >= count || b >= count {
                    return Err(ProblemError::Parse {
                        line: line_no,
                        msg: format!("edge ({a}, {b}) exceeds vertex count {count}"),
                    });
                }
                if a == b {
                    return Err(ProblemError::Parse {
                        line: line_no,
                        msg: format!("self-loop at vertex {a}"),
                    });
                }
                edges.push((a, b));
            }
        }
    }

    let n = n.ok_or(ProblemError::Parse { line: 1, msg: "missing 'n <count>' header".into() })?;
    MaxCutGraph::new(n, edges)
}

pub fn write_edgelist(graph: &MaxCutGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n {}", graph.num_vertices());
    for &(a, b) in graph.edges() {
        let _ = writeln!(out, "{a} {b}");
    }
    out
}
