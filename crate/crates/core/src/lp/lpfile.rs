//! CPLEX LP text format for models, and a plain-text solution format in the
//! layout HiGHS writes with its raw solution style:
//!
//! ```text
//! Model status
//! Optimal
//!
//! # Primal solution values
//! Feasible
//! Objective 3
//! # Columns 1
//! x 3
//! # Rows 1
//! cap 3
//!
//! # Dual solution values
//! Feasible
//! # Columns 1
//! x 0
//! # Rows 1
//! cap 1
//! ```
//!
//! Dual values in solution files use the shadow-price convention of
//! [`Solution`]. Names in written models are sanitized and made unique, so a
//! model read back has the same rows and columns in the same order.

use std::collections::HashMap;
use std::fmt::Write;

use super::{LinearModel, LpError, Relation, Sense, Solution, Status};

fn sanitize(name: &str, fallback: String, taken: &mut HashMap<String, usize>) -> String {
    let mut s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "_.[]".contains(c) { c } else { '_' })
        .collect();
    if s.is_empty() || !s.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') || is_keyword(&s) {
        s = fallback;
    }
    let mut out = s.clone();
    let mut k = 1;
    while taken.contains_key(&out) {
        out = format!("{s}_{k}");
        k += 1;
    }
    taken.insert(out.clone(), 0);
    out
}

fn is_keyword(s: &str) -> bool {
    matches!(
        s.to_ascii_lowercase().as_str(),
        "free" | "inf" | "infinity" | "end" | "st" | "bounds" | "binary" | "binaries" | "bin" | "general" | "generals"
    )
}

/// Column and row names used in the written file.
pub fn model_names(model: &LinearModel) -> (Vec<String>, Vec<String>) {
    let mut taken = HashMap::new();
    let cols = model.vars.iter().enumerate().map(|(j, v)| sanitize(&v.name, format!("x{j}"), &mut taken)).collect();
    let rows = model.rows.iter().enumerate().map(|(i, r)| sanitize(&r.name, format!("r{i}"), &mut taken)).collect();
    (cols, rows)
}

fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:?}")
    }
}

fn write_terms(out: &mut String, terms: &[(usize, f64)], names: &[String]) {
    for (k, &(j, a)) in terms.iter().enumerate() {
        if k > 0 && k % 8 == 0 {
            out.push_str("\n   ");
        }
        let sign = if a < 0.0 || (a == 0.0 && a.is_sign_negative()) { '-' } else { '+' };
        write!(out, " {sign} {} {}", fmt_num(a.abs()), names[j]).unwrap();
    }
}

pub fn write_model(model: &LinearModel) -> Result<Vec<u8>, LpError> {
    model.check()?;
    let (cols, rows) = model_names(model);
    let mut out = String::new();
    out.push_str(match model.sense {
        Sense::Max => "Maximize\n",
        Sense::Min => "Minimize\n",
    });
    out.push_str(" obj:");
    write_terms(&mut out, &model.objective, &cols);
    out.push_str("\nSubject To\n");
    for (r, name) in model.rows.iter().zip(&rows) {
        write!(out, " {name}:").unwrap();
        if r.coeffs.is_empty() {
            if cols.is_empty() {
                return Err(LpError::InvalidModel("row without variables in an empty model".into()));
            }
            write_terms(&mut out, &[(0, 0.0)], &cols);
        } else {
            write_terms(&mut out, &r.coeffs, &cols);
        }
        let rel = match r.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        writeln!(out, " {rel} {}", fmt_num(r.rhs)).unwrap();
    }
    out.push_str("Bounds\n");
    for (v, name) in model.vars.iter().zip(&cols) {
        if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
            writeln!(out, " {name} free").unwrap();
        } else {
            writeln!(out, " {} <= {name} <= {}", fmt_num(v.lower), fmt_num(v.upper)).unwrap();
        }
    }
    if model.has_binaries() {
        out.push_str("Binaries\n");
        for (v, name) in model.vars.iter().zip(&cols) {
            if v.binary {
                writeln!(out, " {name}").unwrap();
            }
        }
    }
    out.push_str("End\n");
    Ok(out.into_bytes())
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Op(char),
    Rel(Relation),
    Colon,
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<Tok>, LpError> {
    let err = |m: String| LpError::Parse { line: lineno, message: m };
    let b = line.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c == '\\' {
            break;
        } else if c == ':' {
            out.push(Tok::Colon);
            i += 1;
        } else if c == '<' || c == '>' || c == '=' {
            let mut j = i + 1;
            while j < b.len() && "<>=".contains(b[j] as char) {
                j += 1;
            }
            let rel = match &line[i..j] {
                "<=" | "=<" | "<" => Relation::Le,
                ">=" | "=>" | ">" => Relation::Ge,
                "=" => Relation::Eq,
                other => return Err(err(format!("bad relation {other:?}"))),
            };
            out.push(Tok::Rel(rel));
            i = j;
        } else if c == '+' || c == '-' {
            out.push(Tok::Op(c));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let mut j = i;
            while j < b.len() {
                let d = b[j] as char;
                let exp_sign = (d == '+' || d == '-') && j > i && matches!(b[j - 1], b'e' | b'E');
                if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                    j += 1;
                } else {
                    break;
                }
            }
            let v = line[i..j].parse::<f64>().map_err(|_| err(format!("bad number {:?}", &line[i..j])))?;
            out.push(Tok::Num(v));
            i = j;
        } else {
            let mut j = i;
            while j < b.len() && !(b[j] as char).is_whitespace() && !":<>=+-\\".contains(b[j] as char) {
                j += 1;
            }
            let word = &line[i..j];
            match word.to_ascii_lowercase().as_str() {
                "inf" | "infinity" => out.push(Tok::Num(f64::INFINITY)),
                _ => out.push(Tok::Name(word.to_string())),
            }
            i = j;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    Binaries,
}

fn section_of(line: &str) -> Option<(Section, Option<Sense>)> {
    let l = line.trim().to_ascii_lowercase();
    Some(match l.as_str() {
        "maximize" | "maximise" | "maximum" | "max" => (Section::Objective, Some(Sense::Max)),
        "minimize" | "minimise" | "minimum" | "min" => (Section::Objective, Some(Sense::Min)),
        "subject to" | "such that" | "st" | "s.t." => (Section::Constraints, None),
        "bounds" | "bound" => (Section::Bounds, None),
        "binaries" | "binary" | "bin" => (Section::Binaries, None),
        "end" => (Section::None, None),
        _ => return None,
    })
}

/// Linear expression followed optionally by a relation and right-hand side.
struct Expr {
    label: Option<String>,
    terms: Vec<(String, f64)>,
    rel: Option<(Relation, f64)>,
}

fn parse_expr(toks: &[Tok], line: usize) -> Result<Expr, LpError> {
    let err = |m: &str| LpError::Parse { line, message: m.to_string() };
    let mut k = 0;
    let mut label = None;
    if let (Some(Tok::Name(n)), Some(Tok::Colon)) = (toks.first(), toks.get(1)) {
        label = Some(n.clone());
        k = 2;
    }
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    let mut rel = None;
    while k < toks.len() {
        match &toks[k] {
            Tok::Op(c) => sign *= if *c == '-' { -1.0 } else { 1.0 },
            Tok::Num(v) => {
                if coef.is_some() {
                    return Err(err("two numbers in a row"));
                }
                coef = Some(*v);
            }
            Tok::Name(n) => {
                terms.push((n.clone(), sign * coef.unwrap_or(1.0)));
                sign = 1.0;
                coef = None;
            }
            Tok::Rel(r) => {
                if coef.is_some() {
                    return Err(err("dangling constant on the left-hand side"));
                }
                let mut s = 1.0;
                let mut j = k + 1;
                while let Some(Tok::Op(c)) = toks.get(j) {
                    if *c == '-' {
                        s = -s;
                    }
                    j += 1;
                }
                match toks.get(j) {
                    Some(Tok::Num(v)) if j + 1 == toks.len() => rel = Some((*r, s * v)),
                    _ => return Err(err("expected a number after the relation")),
                }
                break;
            }
            Tok::Colon => return Err(err("unexpected ':'")),
        }
        k += 1;
    }
    if rel.is_none() && coef.is_some_and(|c| c != 0.0) {
        return Err(err("constant terms are not supported"));
    }
    Ok(Expr { label, terms, rel })
}

/// Parse a CPLEX LP file in the subset produced by [`write_model`], also
/// accepting multi-line rows, implicit unit coefficients and one-sided bounds.
pub fn read_model(bytes: &[u8]) -> Result<LinearModel, LpError> {
    let text = std::str::from_utf8(bytes).map_err(|_| LpError::Parse { line: 0, message: "not UTF-8".into() })?;
    let mut model = LinearModel::new(Sense::Min);
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut section = Section::None;
    let mut pending: Vec<Tok> = Vec::new();
    let mut pending_line = 0;
    let mut objective: Vec<(String, f64)> = Vec::new();
    let mut rows: Vec<(String, Vec<(String, f64)>, Relation, f64)> = Vec::new();
    let mut bounds: Vec<(String, Option<f64>, Option<f64>, bool)> = Vec::new();
    let mut binaries: Vec<String> = Vec::new();

    let mut var = |name: &str, model: &mut LinearModel| -> usize {
        *index.entry(name.to_string()).or_insert_with(|| model.add_var(name, 0.0, f64::INFINITY))
    };

    let lines: Vec<&str> = text.lines().collect();
    let flush = |section: Section, pending: &mut Vec<Tok>, line: usize, rows: &mut Vec<_>, objective: &mut Vec<_>| {
        if pending.is_empty() {
            return Ok::<(), LpError>(());
        }
        let e = parse_expr(pending, line)?;
        pending.clear();
        match section {
            Section::Objective => {
                if e.rel.is_some() {
                    return Err(LpError::Parse { line, message: "relation in the objective".into() });
                }
                objective.extend(e.terms);
            }
            Section::Constraints => {
                let (rel, rhs) =
                    e.rel.ok_or(LpError::Parse { line, message: "constraint without relation".into() })?;
                let name = e.label.unwrap_or_else(|| format!("r{}", rows.len()));
                rows.push((name, e.terms, rel, rhs));
            }
            _ => {}
        }
        Ok(())
    };

    for (n, raw) in lines.iter().enumerate() {
        let lineno = n + 1;
        if let Some((s, sense)) = section_of(raw) {
            flush(section, &mut pending, pending_line, &mut rows, &mut objective)?;
            section = s;
            if let Some(sense) = sense {
                model.sense = sense;
            }
            continue;
        }
        let toks = tokenize(raw, lineno)?;
        if toks.is_empty() {
            continue;
        }
        match section {
            Section::None => {
                return Err(LpError::Parse { line: lineno, message: "text outside any section".into() });
            }
            Section::Objective => {
                if pending.is_empty() {
                    pending_line = lineno;
                }
                pending.extend(toks);
            }
            Section::Constraints => {
                // A new labelled row starts a new constraint.
                if matches!((toks.first(), toks.get(1)), (Some(Tok::Name(_)), Some(Tok::Colon)))
                    && pending.iter().any(|t| matches!(t, Tok::Rel(_)))
                {
                    flush(section, &mut pending, pending_line, &mut rows, &mut objective)?;
                }
                if pending.is_empty() {
                    pending_line = lineno;
                }
                let done = toks.iter().any(|t| matches!(t, Tok::Rel(_)))
                    && matches!(toks.last(), Some(Tok::Num(_)));
                pending.extend(toks);
                if done {
                    flush(section, &mut pending, pending_line, &mut rows, &mut objective)?;
                }
            }
            Section::Bounds => bounds.push(parse_bound(&toks, lineno)?),
            Section::Binaries => {
                for t in toks {
                    match t {
                        Tok::Name(s) => binaries.push(s),
                        _ => return Err(LpError::Parse { line: lineno, message: "expected names".into() }),
                    }
                }
            }
        }
    }
    flush(section, &mut pending, pending_line, &mut rows, &mut objective)?;

    // Columns in order of first appearance in the bounds section (the writer
    // lists every column there), then objective and rows.
    for (name, ..) in &bounds {
        var(name, &mut model);
    }
    for (name, a) in &objective {
        let j = var(name, &mut model);
        model.objective.push((j, *a));
    }
    for (name, terms, rel, rhs) in rows {
        let coeffs = terms.iter().map(|(v, a)| (var(v, &mut model), *a)).collect();
        model.add_row(name, coeffs, rel, rhs);
    }
    for (name, lo, hi, free) in bounds {
        let j = var(&name, &mut model);
        let v = &mut model.vars[j];
        if free {
            v.lower = f64::NEG_INFINITY;
            v.upper = f64::INFINITY;
        }
        if let Some(l) = lo {
            v.lower = l;
        }
        if let Some(u) = hi {
            v.upper = u;
        }
    }
    for name in binaries {
        let j = var(&name, &mut model);
        let v = &mut model.vars[j];
        v.binary = true;
        v.lower = v.lower.max(0.0);
        v.upper = v.upper.min(1.0);
    }
    // Zero placeholder terms keep empty rows writable; drop them again.
    for r in model.rows.iter_mut() {
        r.coeffs.retain(|&(_, a)| a != 0.0);
    }
    model.objective.retain(|&(_, a)| a != 0.0);
    Ok(model)
}

fn parse_bound(toks: &[Tok], line: usize) -> Result<(String, Option<f64>, Option<f64>, bool), LpError> {
    let err = || LpError::Parse { line, message: "malformed bound".into() };
    // Fold signs into numbers.
    let mut t: Vec<Tok> = Vec::new();
    let mut neg = false;
    for x in toks {
        match x {
            Tok::Op(c) => neg ^= *c == '-',
            Tok::Num(v) => {
                t.push(Tok::Num(if neg { -v } else { *v }));
                neg = false;
            }
            other => t.push(other.clone()),
        }
    }
    match t.as_slice() {
        [Tok::Name(n), Tok::Name(f)] if f.eq_ignore_ascii_case("free") => Ok((n.clone(), None, None, true)),
        [Tok::Num(l), Tok::Rel(Relation::Le), Tok::Name(n), Tok::Rel(Relation::Le), Tok::Num(u)] => {
            Ok((n.clone(), Some(*l), Some(*u), false))
        }
        [Tok::Name(n), Tok::Rel(r), Tok::Num(v)] | [Tok::Num(v), Tok::Rel(r), Tok::Name(n)] => {
            let name_first = matches!(t[0], Tok::Name(_));
            let (lo, hi) = match (r, name_first) {
                (Relation::Eq, _) => (Some(*v), Some(*v)),
                (Relation::Le, true) | (Relation::Ge, false) => (None, Some(*v)),
                (Relation::Ge, true) | (Relation::Le, false) => (Some(*v), None),
            };
            Ok((n.clone(), lo, hi, false))
        }
        _ => Err(err()),
    }
}

fn status_text(s: Status) -> &'static str {
    match s {
        Status::Optimal => "Optimal",
        Status::Infeasible => "Infeasible",
        Status::Unbounded => "Unbounded",
        Status::Limit => "Iteration limit reached",
    }
}

pub fn write_solution(model: &LinearModel, sol: &Solution) -> Vec<u8> {
    let (cols, rows) = model_names(model);
    let mut out = String::new();
    writeln!(out, "Model status\n{}\n", status_text(sol.status)).unwrap();
    if sol.primal.len() == cols.len() {
        out.push_str("# Primal solution values\nFeasible\n");
        writeln!(out, "Objective {}", fmt_num(sol.objective)).unwrap();
        writeln!(out, "# Columns {}", cols.len()).unwrap();
        for (name, v) in cols.iter().zip(&sol.primal) {
            writeln!(out, "{name} {}", fmt_num(*v)).unwrap();
        }
        writeln!(out, "# Rows {}", rows.len()).unwrap();
        for (name, r) in rows.iter().zip(&model.rows) {
            let ax: f64 = r.coeffs.iter().map(|&(j, a)| a * sol.primal[j]).sum();
            writeln!(out, "{name} {}", fmt_num(ax)).unwrap();
        }
        out.push('\n');
    } else {
        out.push_str("# Primal solution values\nNone\n\n");
    }
    if sol.dual.len() == rows.len() && !model.has_binaries() && sol.primal.len() == cols.len() {
        out.push_str("# Dual solution values\nFeasible\n");
        let mut reduced = model.dense_objective();
        for (i, r) in model.rows.iter().enumerate() {
            for &(j, a) in &r.coeffs {
                reduced[j] -= a * sol.dual[i];
            }
        }
        writeln!(out, "# Columns {}", cols.len()).unwrap();
        for (name, d) in cols.iter().zip(&reduced) {
            writeln!(out, "{name} {}", fmt_num(*d)).unwrap();
        }
        writeln!(out, "# Rows {}", rows.len()).unwrap();
        for (name, y) in rows.iter().zip(&sol.dual) {
            writeln!(out, "{name} {}", fmt_num(*y)).unwrap();
        }
    } else {
        out.push_str("# Dual solution values\nNone\n");
    }
    out.into_bytes()
}

fn parse_status(s: &str) -> Option<Status> {
    let l = s.trim().to_ascii_lowercase();
    Some(if l == "optimal" {
        Status::Optimal
    } else if l.contains("infeasible") && !l.contains("unbounded") {
        Status::Infeasible
    } else if l.contains("unbounded") {
        Status::Unbounded
    } else if l.contains("limit") {
        Status::Limit
    } else {
        return None;
    })
}

/// Read a solution file for `model`. Every column and row named in the file
/// must exist in the model.
pub fn read_solution(model: &LinearModel, bytes: &[u8]) -> Result<Solution, LpError> {
    let text = std::str::from_utf8(bytes).map_err(|_| LpError::Parse { line: 0, message: "not UTF-8".into() })?;
    let (cols, rows) = model_names(model);
    let col_of: HashMap<&str, usize> = cols.iter().enumerate().map(|(j, n)| (n.as_str(), j)).collect();
    let row_of: HashMap<&str, usize> = rows.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let lines: Vec<&str> = text.lines().collect();
    let err = |line: usize, m: String| LpError::Parse { line: line + 1, message: m };

    let mut k = 0;
    let next_nonempty = |k: &mut usize| {
        while *k < lines.len() && lines[*k].trim().is_empty() {
            *k += 1;
        }
    };
    next_nonempty(&mut k);
    if lines.get(k).map(|l| l.trim()) != Some("Model status") {
        return Err(err(k, "expected 'Model status'".into()));
    }
    k += 1;
    let status_line = lines.get(k).ok_or_else(|| err(k, "missing status".into()))?;
    let status = parse_status(status_line).ok_or_else(|| err(k, format!("unknown status {status_line:?}")))?;
    k += 1;

    let mut primal = vec![f64::NAN; cols.len()];
    let mut dual = vec![f64::NAN; rows.len()];
    let mut have_primal = false;
    let mut have_dual = false;
    let mut objective = f64::NAN;
    // Which block we are in: 0 none, 1 primal, 2 dual.
    let mut block = 0;
    let mut list: Option<(bool, usize)> = None;
    while k < lines.len() {
        let line = lines[k].trim();
        k += 1;
        if line.is_empty() {
            continue;
        }
        if line == "# Primal solution values" {
            block = 1;
            list = None;
            continue;
        }
        if line == "# Dual solution values" {
            block = 2;
            list = None;
            continue;
        }
        if line == "# Basis" || line.starts_with("# Basis") {
            break;
        }
        if let Some(rest) = line.strip_prefix("# Columns ").or_else(|| line.strip_prefix("# Rows ")) {
            let n: usize = rest.trim().parse().map_err(|_| err(k - 1, "bad count".into()))?;
            list = Some((line.starts_with("# Columns"), n));
            continue;
        }
        if block == 0 {
            return Err(err(k - 1, format!("unexpected line {line:?}")));
        }
        if list.is_none() {
            if let Some(v) = line.strip_prefix("Objective ") {
                objective = parse_value(v).ok_or_else(|| err(k - 1, format!("bad objective {v:?}")))?;
            } else if line != "Feasible" && line != "Infeasible" && line != "None" {
                return Err(err(k - 1, format!("unexpected line {line:?}")));
            }
            if block == 1 && line == "Feasible" {
                have_primal = true;
            }
            if block == 2 && line == "Feasible" {
                have_dual = true;
            }
            continue;
        }
        let (is_col, _) = list.unwrap();
        let mut parts = line.split_whitespace();
        let (Some(name), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(k - 1, format!("expected 'name value', got {line:?}")));
        };
        let v = parse_value(v).ok_or_else(|| err(k - 1, format!("bad value {v:?}")))?;
        match (is_col, block) {
            (true, b) => {
                let j = *col_of.get(name).ok_or_else(|| err(k - 1, format!("unknown column {name:?}")))?;
                if b == 1 {
                    primal[j] = v;
                }
            }
            (false, b) => {
                let i = *row_of.get(name).ok_or_else(|| err(k - 1, format!("unknown row {name:?}")))?;
                if b == 2 {
                    dual[i] = v;
                }
            }
        }
    }
    let mut sol = Solution::without_point(status);
    if have_primal && status != Status::Infeasible {
        if primal.iter().any(|v| v.is_nan()) {
            return Err(err(k, "primal values missing for some columns".into()));
        }
        sol.objective = model.objective_value(&primal);
        if objective.is_finite() && (objective - sol.objective).abs() > 1e-6 * (1.0 + objective.abs()) {
            return Err(err(k, format!("objective {objective} disagrees with the primal point ({})", sol.objective)));
        }
        sol.primal = primal;
    }
    if have_dual && !dual.iter().any(|v| v.is_nan()) {
        sol.dual = dual;
    }
    Ok(sol)
}

fn parse_value(s: &str) -> Option<f64> {
    match s.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}
