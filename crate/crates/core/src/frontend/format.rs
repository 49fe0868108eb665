//! Problem files.
//!
//! ```text
//! # y' = y, y(0) = 1
//! [field]
//! p:2013265921
//! [problem]
//! kind = II
//! coeffs = constant
//! r = 1
//! N = 8
//! [matrix A]
//! 1
//! [init]
//! 1
//! ```
//!
//! `[matrix A]` holds `r²` coefficient lists in row-major order, `[vector b]`
//! and `[init]` one line per entry (`[init]` of problem I holds the rows of
//! the initial matrix). `[equation]` holds `aK: ...` lines and an optional
//! `rhs: ...` for scalar equations, or `dyK = ...` lines for non-linear
//! systems.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::BigRational;

use super::{CoeffClass, ProblemKind, ProblemSpec};
use crate::error::{Error, Result};
use crate::field::{format_rational, parse_rational, FieldDescriptor, Rationals};
use crate::nonlinear::SparsePolySystem;

const SECTIONS: [&str; 6] = ["field", "problem", "matrix A", "vector b", "init", "equation"];

struct Section<'a> {
    header_line: usize,
    /// (line number, text without comment) of every line after the header
    lines: Vec<(usize, &'a str)>,
}

impl Section<'_> {
    fn content(&self) -> impl Iterator<Item = (usize, &str)> {
        self.lines.iter().copied().filter(|(_, l)| !l.trim().is_empty())
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(self.header_line, |l| l.0)
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

/// Reads a problem file. The result is validated.
pub fn parse_problem(text: &str) -> Result<ProblemSpec> {
    let mut sections: BTreeMap<&str, Section> = BTreeMap::new();
    let mut current: Option<&str> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim();
        if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = SECTIONS
                .iter()
                .find(|s| **s == name.trim())
                .ok_or_else(|| Error::parse(lineno, 1, format!("unknown section `[{name}]`")))?;
            if sections.contains_key(name) {
                return Err(Error::parse(lineno, 1, format!("section `[{name}]` repeated")));
            }
            sections.insert(name, Section { header_line: lineno, lines: Vec::new() });
            current = Some(name);
            continue;
        }
        match current {
            Some(name) => sections.get_mut(name).expect("section exists").lines.push((lineno, line)),
            None if trimmed.is_empty() => {}
            None => return Err(Error::parse(lineno, 1, "content before the first section")),
        }
    }
    let end = text.lines().count() + 1;
    let require = |name: &str| sections.get(name).ok_or_else(|| Error::parse(end, 1, format!("missing section `[{name}]`")));

    let field_section = require("field")?;
    let mut field_lines = field_section.content();
    let (fl, ftext) = field_lines
        .next()
        .ok_or_else(|| Error::parse(field_section.last_line() + 1, 1, "missing field descriptor"))?;
    let field: FieldDescriptor = ftext.parse().map_err(|e| relocate(e, fl))?;
    if let Some((l, _)) = field_lines.next() {
        return Err(Error::parse(l, 1, "extra content in `[field]`"));
    }

    let problem = require("problem")?;
    let mut keys: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (l, line) in problem.content() {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(l, 1, "expected `key = value`"))?;
        let key = key.trim();
        if !["kind", "coeffs", "degree", "r", "N"].contains(&key) {
            return Err(Error::parse(l, 1, format!("unknown key `{key}`")));
        }
        if keys.insert(key, (l, value.trim())).is_some() {
            return Err(Error::parse(l, 1, format!("key `{key}` repeated")));
        }
    }
    let key = |name: &str| {
        keys.get(name)
            .copied()
            .ok_or_else(|| Error::parse(problem.last_line() + 1, 1, format!("missing key `{name}`")))
    };
    let number = |name: &str| -> Result<usize> {
        let (l, v) = key(name)?;
        v.parse::<usize>().map_err(|_| Error::parse(l, 1, format!("`{name}` must be a non-negative integer")))
    };
    let (kl, kv) = key("kind")?;
    let kind: ProblemKind = kv.parse().map_err(|e| relocate(e, kl))?;
    let coeffs = match keys.get("coeffs") {
        Some(&(l, v)) => v.parse::<CoeffClass>().map_err(|e| relocate(e, l))?,
        None => CoeffClass::Series,
    };
    let degree = if keys.contains_key("degree") { Some(number("degree")?) } else { None };
    let r = number("r")?;
    let n = number("N")?;
    if r == 0 || n == 0 {
        return Err(Error::parse(problem.header_line, 1, "r and N must be positive"));
    }

    let lists = |name: &str, count: usize| -> Result<Vec<Vec<BigRational>>> {
        let section = require(name)?;
        let out = section
            .content()
            .map(|(l, line)| parse_scalars(line, l, 1))
            .collect::<Result<Vec<_>>>()?;
        if out.len() != count {
            return Err(Error::parse(
                section.last_line() + 1,
                1,
                format!("`[{name}]` needs {count} lines, found {}", out.len()),
            ));
        }
        Ok(out)
    };
    let forbid = |name: &str| -> Result<()> {
        match sections.get(name) {
            Some(s) if s.content().next().is_some() => Err(Error::parse(s.header_line, 1, format!("section `[{name}]` does not apply to problem {kind}"))),
            _ => Ok(()),
        }
    };

    let mut spec = ProblemSpec {
        kind,
        coeffs,
        degree,
        field,
        r,
        n,
        matrix_a: Vec::new(),
        vector_b: None,
        equation: Vec::new(),
        rhs: None,
        system: None,
        init: Vec::new(),
    };
    if kind.is_system() {
        spec.matrix_a = lists("matrix A", r * r)?;
        if sections.contains_key("vector b") {
            if kind == ProblemKind::SystemBasis {
                forbid("vector b")?;
            } else {
                spec.vector_b = Some(lists("vector b", r)?);
            }
        }
        forbid("equation")?;
    } else {
        forbid("matrix A")?;
        forbid("vector b")?;
        let eq = require("equation")?;
        if kind == ProblemKind::Nonlinear {
            let text: Vec<&str> = eq.lines.iter().map(|(_, l)| *l).collect();
            spec.system = Some(SparsePolySystem::parse(&Rationals, &text.join("\n"), eq.header_line)?);
        } else {
            let (coeffs, rhs) = parse_equation(eq, r)?;
            if rhs.is_some() && kind == ProblemKind::ScalarBasis {
                return Err(Error::parse(eq.header_line, 1, "problem i takes no right-hand side"));
            }
            spec.equation = coeffs;
            spec.rhs = rhs;
        }
    }
    match kind {
        ProblemKind::ScalarBasis => forbid("init")?,
        ProblemKind::SystemBasis => {
            if sections.get("init").is_some_and(|s| s.content().next().is_some()) {
                spec.init = lists("init", r)?;
            }
        }
        _ => spec.init = lists("init", 1)?,
    }
    spec.validate().map_err(|e| match e {
        Error::DimensionMismatch(_) | Error::Parse { .. } => e,
        other => Error::parse(end, 1, other.to_string()),
    })
}

fn relocate(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { column, message, .. } => Error::Parse { line, column, message },
        other => Error::parse(line, 1, other.to_string()),
    }
}

fn parse_scalars(text: &str, line: usize, col0: usize) -> Result<Vec<BigRational>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for token in text.split_whitespace() {
        let at = text[offset..].find(token).map_or(offset, |i| offset + i);
        offset = at + token.len();
        out.push(parse_rational(token).ok_or_else(|| Error::parse(line, col0 + at, format!("bad scalar `{token}`")))?);
    }
    if out.is_empty() {
        return Err(Error::parse(line, col0, "empty coefficient list"));
    }
    Ok(out)
}

type EquationData = (Vec<Vec<BigRational>>, Option<Vec<BigRational>>);

fn parse_equation(section: &Section, r: usize) -> Result<EquationData> {
    let mut coeffs: Vec<Option<Vec<BigRational>>> = vec![None; r + 1];
    let mut rhs = None;
    for (l, line) in section.content() {
        let (label, values) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(l, 1, "expected `aK: ...` or `rhs: ...`"))?;
        let col = label.len() + 2;
        let label = label.trim();
        let values = parse_scalars(values, l, col)?;
        if label == "rhs" {
            if rhs.replace(values).is_some() {
                return Err(Error::parse(l, 1, "right-hand side repeated"));
            }
            continue;
        }
        let idx = label
            .strip_prefix('a')
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&i| i <= r)
            .ok_or_else(|| Error::parse(l, 1, format!("unknown coefficient `{label}` for order {r}")))?;
        if coeffs[idx].replace(values).is_some() {
            return Err(Error::parse(l, 1, format!("coefficient a{idx} repeated")));
        }
    }
    let coeffs = coeffs
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| Error::parse(section.last_line() + 1, 1, format!("missing coefficient a{i}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((coeffs, rhs))
}

fn write_list(out: &mut String, list: &[BigRational]) {
    let items: Vec<String> = list.iter().map(format_rational).collect();
    out.push_str(&items.join(" "));
    out.push('\n');
}

/// Text form accepted by [`parse_problem`].
pub fn render_problem(spec: &ProblemSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[field]\n{}", spec.field);
    let _ = writeln!(out, "[problem]\nkind = {}\ncoeffs = {}", spec.kind, spec.coeffs);
    if let Some(d) = spec.degree {
        let _ = writeln!(out, "degree = {d}");
    }
    let _ = writeln!(out, "r = {}\nN = {}", spec.r, spec.n);
    if spec.kind.is_system() {
        out.push_str("[matrix A]\n");
        for e in &spec.matrix_a {
            write_list(&mut out, e);
        }
        if let Some(b) = &spec.vector_b {
            out.push_str("[vector b]\n");
            for e in b {
                write_list(&mut out, e);
            }
        }
    }
    if spec.kind.is_scalar() {
        out.push_str("[equation]\n");
        for (i, a) in spec.equation.iter().enumerate() {
            let _ = write!(out, "a{i}: ");
            write_list(&mut out, a);
        }
        if let Some(rhs) = &spec.rhs {
            out.push_str("rhs: ");
            write_list(&mut out, rhs);
        }
    }
    if let Some(sys) = &spec.system {
        out.push_str("[equation]\n");
        out.push_str(&sys.render(&Rationals));
    }
    if !spec.init.is_empty() {
        out.push_str("[init]\n");
        for row in &spec.init {
            write_list(&mut out, row);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "# exponential\n[field]\np:2013265921\n[problem]\nkind = II\ncoeffs = constant\nr = 1\nN = 8\n[matrix A]\n1\n[init]\n1\n";

    #[test]
    fn minimal_file() {
        let spec = parse_problem(MINIMAL).unwrap();
        assert_eq!(spec.kind, ProblemKind::SystemSingle);
        assert_eq!(spec.n, 8);
        assert_eq!(parse_problem(&render_problem(&spec)).unwrap(), spec);
    }

    #[test]
    fn truncated_file() {
        let cut = &MINIMAL[..MINIMAL.find("[init]").unwrap()];
        assert!(matches!(parse_problem(cut), Err(Error::Parse { .. })));
        let cut = &MINIMAL[..MINIMAL.find("1\n[init]").unwrap()];
        assert!(matches!(parse_problem(cut), Err(Error::Parse { .. })));
        assert!(matches!(parse_problem("[field]\np:2013265921\n[problem]\nkind = I"), Err(Error::Parse { .. })));
    }

    #[test]
    fn error_positions() {
        let bad = MINIMAL.replace("[matrix A]\n1", "[matrix A]\n1 2/x");
        assert_eq!(
            parse_problem(&bad),
            Err(Error::Parse { line: 10, column: 3, message: "bad scalar `2/x`".into() })
        );
        let bad = MINIMAL.replace("p:2013265921", "p:15");
        assert!(matches!(parse_problem(&bad), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn scalar_and_nonlinear_files() {
        let text = "[field]\nq\n[problem]\nkind = ii\ncoeffs = polynomial\ndegree = 1\nr = 2\nN = 10\n[equation]\na0: 0 -1\na1: 0\na2: 1\nrhs: 1/2\n[init]\n1 0\n";
        let spec = parse_problem(text).unwrap();
        assert_eq!(spec.equation.len(), 3);
        assert_eq!(parse_problem(&render_problem(&spec)).unwrap(), spec);

        let text = "[field]\np:101\n[problem]\nkind = nonlinear\nr = 2\nN = 10\n[equation]\ndy1 = t + y1^2*y2 - 3*y2\ndy2 = 1/2*y1\n[init]\n0 1\n";
        let spec = parse_problem(text).unwrap();
        assert_eq!(parse_problem(&render_problem(&spec)).unwrap(), spec);
        // 1/2 and −3 reduced mod 101
        assert!(render_problem(&spec).contains("51*y1"));
        assert!(render_problem(&spec).contains("98*y2"));
    }
}
