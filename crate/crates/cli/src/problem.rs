//! The line-oriented problem file format.
//!
//! ```text
//! [problem]
//! prime = 3
//! vars = x, y
//! rank = 2
//! mode = dr
//!
//! [connection]
//! matrix A1 = [[0, x], [0, 0]]
//! matrix A2 = [[0, 0], [0, 0]]
//! ```
//!
//! Optional sections: `[higgs]` (`matrix B<i>` over the primed variables),
//! `[psi]` (`matrix P<i>`), `[filtration]` (`step F<n> = [[..], ..]`, one
//! vector per inner list), `[lift]` (`poly h<i> = ...`) and `[bounds]`
//! (`level`, `degree`).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use charp_core::arith::{ring, ModPoly, PolyMatrix, Ring};
use charp_core::frobenius::twisted_ring;
use charp_core::{Error as CoreError, WeightMode};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Dr,
    Dol,
    Hod,
    /// A conjugate triple (∇, ψ) over a ring with parameter.
    Conj,
}

impl Mode {
    pub fn weight_mode(self) -> WeightMode {
        match self {
            Mode::Dr | Mode::Conj => WeightMode::Dr,
            Mode::Dol => WeightMode::Dol,
            Mode::Hod => WeightMode::Hod,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Dr => "dr",
            Mode::Dol => "dol",
            Mode::Hod => "hod",
            Mode::Conj => "conj",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dr" => Ok(Mode::Dr),
            "dol" => Ok(Mode::Dol),
            "hod" => Ok(Mode::Hod),
            "conj" => Ok(Mode::Conj),
            other => Err(format!("unknown mode `{other}` (expected dr, dol, hod or conj)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub prime: u64,
    pub vars: Vec<String>,
    pub param: Option<String>,
    pub rank: usize,
    pub mode: Mode,
    /// A_1..A_m over [`Problem::ring`].
    pub connection: Vec<PolyMatrix>,
    /// B'_1..B'_m over the Frobenius twist; empty when absent.
    pub higgs: Vec<PolyMatrix>,
    /// ψ_1..ψ_m over [`Problem::ring`]; empty when absent.
    pub psi: Vec<PolyMatrix>,
    /// `filtration[n-1]` spans F^n.
    pub filtration: Vec<Vec<Vec<u64>>>,
    /// h_1..h_m over the coordinates only; empty when absent.
    pub lift: Vec<ModPoly>,
    pub level: Option<u32>,
    pub degree_bound: Option<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Problem,
    Connection,
    Higgs,
    Psi,
    Filtration,
    Lift,
    Bounds,
}

struct Line<'a> {
    number: usize,
    text: &'a str,
}

impl<'a> Line<'a> {
    fn err(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError { line: self.number, column, message: message.into() }
    }

    /// Splits `key = value`, returning the value's 1-based column.
    fn key_value(&self) -> Result<(&'a str, &'a str, usize), ParseError> {
        let text = self.text;
        let eq = text.find('=').ok_or_else(|| self.err(1, "expected `key = value`"))?;
        let key = text[..eq].trim();
        let rest = &text[eq + 1..];
        let lead = rest.len() - rest.trim_start().len();
        Ok((key, rest.trim(), eq + 2 + lead))
    }

    fn lift_core(&self, column: usize, e: CoreError) -> ParseError {
        match e {
            CoreError::Parse { column: c, message } => self.err(column + c - 1, message),
            other => self.err(column, other.to_string()),
        }
    }
}

fn indexed(key: &str, prefix: &str, word: &str, line: &Line<'_>) -> Result<usize, ParseError> {
    let name = key
        .strip_prefix(word)
        .map(str::trim)
        .ok_or_else(|| line.err(1, format!("expected `{word} {prefix}<i> = ...`")))?;
    let idx = name
        .strip_prefix(prefix)
        .and_then(|n| n.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| line.err(1, format!("expected a name {prefix}1, {prefix}2, ...; got `{name}`")))?;
    Ok(idx)
}

fn place<T>(slots: &mut Vec<Option<T>>, idx: usize, value: T, line: &Line<'_>, what: &str) -> Result<(), ParseError> {
    if slots.len() < idx {
        slots.resize_with(idx, || None);
    }
    if slots[idx - 1].is_some() {
        return Err(line.err(1, format!("{what}{idx} given twice")));
    }
    slots[idx - 1] = Some(value);
    Ok(())
}

fn collect<T>(slots: Vec<Option<T>>, expected: usize, what: &str, section_line: usize) -> Result<Vec<T>, ParseError> {
    if slots.is_empty() {
        return Ok(Vec::new());
    }
    if slots.len() != expected || slots.iter().any(Option::is_none) {
        return Err(ParseError {
            line: section_line,
            column: 1,
            message: format!("expected {what}1..{what}{expected}, one per variable"),
        });
    }
    Ok(slots.into_iter().map(Option::unwrap).collect())
}

impl Problem {
    pub fn ring(&self) -> Arc<Ring> {
        let names: Vec<&str> = self.vars.iter().map(String::as_str).collect();
        ring(self.prime, &names, self.param.as_deref()).expect("validated when parsed")
    }

    pub fn twisted(&self) -> Arc<Ring> {
        twisted_ring(&self.ring().without_param())
    }

    pub fn parse(src: &str) -> Result<Problem, ParseError> {
        let mut section: Option<Section> = None;
        let mut header: Vec<(usize, &str, &str, usize)> = Vec::new();
        let mut seen_sections: Vec<(Section, usize)> = Vec::new();
        let mut bodies: Vec<(Section, Line<'_>)> = Vec::new();
        for (n, raw) in src.lines().enumerate() {
            let text = raw.split('#').next().unwrap_or("").trim_end();
            let line = Line { number: n + 1, text };
            if text.trim().is_empty() {
                continue;
            }
            if let Some(name) = text.trim().strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let s = match name.trim() {
                    "problem" => Section::Problem,
                    "connection" => Section::Connection,
                    "higgs" => Section::Higgs,
                    "psi" => Section::Psi,
                    "filtration" => Section::Filtration,
                    "lift" => Section::Lift,
                    "bounds" => Section::Bounds,
                    other => return Err(line.err(2, format!("unknown section `{other}`"))),
                };
                if seen_sections.iter().any(|(t, _)| *t == s) {
                    return Err(line.err(1, "section given twice"));
                }
                seen_sections.push((s, line.number));
                section = Some(s);
                continue;
            }
            match section {
                None => return Err(line.err(1, "content before the first section header")),
                Some(Section::Problem) => {
                    let (k, v, col) = line.key_value()?;
                    if header.iter().any(|(_, hk, _, _)| *hk == k) {
                        return Err(line.err(1, format!("`{k}` given twice")));
                    }
                    header.push((line.number, k, v, col));
                }
                Some(s) => bodies.push((s, line)),
            }
        }

        let field = |key: &str| header.iter().find(|(_, k, _, _)| *k == key);
        for (ln, k, _, _) in &header {
            if !["prime", "vars", "param", "rank", "mode"].contains(k) {
                return Err(ParseError { line: *ln, column: 1, message: format!("unknown key `{k}`") });
            }
        }
        let missing = |key: &str| ParseError { line: 1, column: 1, message: format!("[problem] needs `{key}`") };
        let num = |key: &str| -> Result<u64, ParseError> {
            let (ln, _, v, col) = field(key).ok_or_else(|| missing(key))?;
            v.parse::<u64>().map_err(|_| ParseError { line: *ln, column: *col, message: format!("`{key}` must be a nonnegative integer") })
        };
        let prime = num("prime")?;
        let rank = num("rank")? as usize;
        let (vars_line, _, vars_src, vars_col) = field("vars").ok_or_else(|| missing("vars"))?;
        let vars: Vec<String> = vars_src.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        if vars.is_empty() {
            return Err(ParseError { line: *vars_line, column: *vars_col, message: "at least one variable is required".into() });
        }
        if rank == 0 {
            let (ln, _, _, col) = field("rank").expect("parsed above");
            return Err(ParseError { line: *ln, column: *col, message: "rank must be positive".into() });
        }
        let mode = match field("mode") {
            Some((ln, _, v, col)) => v.parse::<Mode>().map_err(|m| ParseError { line: *ln, column: *col, message: m })?,
            None => Mode::Dr,
        };
        let param = match field("param") {
            Some((_, _, v, _)) => Some(v.to_string()),
            None if matches!(mode, Mode::Hod | Mode::Conj) => Some("t".to_string()),
            None => None,
        };
        let names: Vec<&str> = vars.iter().map(String::as_str).collect();
        let base = ring(prime, &names, param.as_deref())
            .map_err(|e| ParseError { line: *vars_line, column: *vars_col, message: e.to_string() })?;
        let plain = base.without_param();
        let twisted = twisted_ring(&plain);
        let m = vars.len();
        let section_line = |s: Section| seen_sections.iter().find(|(t, _)| *t == s).map_or(1, |(_, l)| *l);

        let mut connection = Vec::new();
        let mut higgs = Vec::new();
        let mut psi = Vec::new();
        let mut steps = Vec::new();
        let mut lift = Vec::new();
        let mut level = None;
        let mut degree_bound = None;
        for (s, line) in &bodies {
            let (k, v, col) = line.key_value()?;
            match s {
                Section::Connection | Section::Higgs | Section::Psi => {
                    let (prefix, target, slots) = match s {
                        Section::Connection => ("A", &base, &mut connection),
                        Section::Higgs => ("B", &twisted, &mut higgs),
                        _ => ("P", &base, &mut psi),
                    };
                    let idx = indexed(k, prefix, "matrix", line)?;
                    let mat = PolyMatrix::parse(target, v).map_err(|e| line.lift_core(col, e))?;
                    if mat.rows() != rank || mat.cols() != rank {
                        return Err(line.err(col, format!("matrix must be {rank}x{rank}")));
                    }
                    place(slots, idx, mat, line, prefix)?;
                }
                Section::Filtration => {
                    let idx = indexed(k, "F", "step", line)?;
                    let mat = PolyMatrix::parse(&base, v).map_err(|e| line.lift_core(col, e))?;
                    if mat.cols() != rank {
                        return Err(line.err(col, format!("filtration vectors must have {rank} entries")));
                    }
                    let mut vectors = Vec::new();
                    for i in 0..mat.rows() {
                        let mut vecv = Vec::new();
                        for j in 0..rank {
                            let c = mat.get(i, j);
                            match (c.constant_value(), c.is_zero() || c.total_degree() == Some(0)) {
                                (Some(x), true) => vecv.push(x),
                                _ => return Err(line.err(col, "filtration vectors must be constant")),
                            }
                        }
                        vectors.push(vecv);
                    }
                    place(&mut steps, idx, vectors, line, "F")?;
                }
                Section::Lift => {
                    let idx = indexed(k, "h", "poly", line)?;
                    let f = ModPoly::parse(&plain, v).map_err(|e| line.lift_core(col, e))?;
                    place(&mut lift, idx, f, line, "h")?;
                }
                Section::Bounds => {
                    let n = v.parse::<u32>().map_err(|_| line.err(col, "expected a nonnegative integer"))?;
                    let slot = match k {
                        "level" => &mut level,
                        "degree" => &mut degree_bound,
                        other => return Err(line.err(1, format!("unknown bound `{other}`"))),
                    };
                    if slot.replace(n).is_some() {
                        return Err(line.err(1, format!("`{k}` given twice")));
                    }
                }
                Section::Problem => unreachable!(),
            }
        }
        let mut connection = collect(connection, m, "A", section_line(Section::Connection))?;
        if connection.is_empty() {
            connection = (0..m).map(|_| PolyMatrix::zero(&base, rank, rank)).collect();
        }
        let filtration = {
            let n = steps.len();
            if steps.iter().any(Option::is_none) {
                return Err(ParseError {
                    line: section_line(Section::Filtration),
                    column: 1,
                    message: format!("expected F1..F{n} without gaps"),
                });
            }
            steps.into_iter().map(Option::unwrap).collect()
        };
        Ok(Problem {
            prime,
            vars,
            param,
            rank,
            mode,
            connection,
            higgs: collect(higgs, m, "B", section_line(Section::Higgs))?,
            psi: collect(psi, m, "P", section_line(Section::Psi))?,
            filtration,
            lift: collect(lift, m, "h", section_line(Section::Lift))?,
            level,
            degree_bound,
        })
    }

    /// Canonical text; `parse` of it returns an equal problem.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str("[problem]\n");
        out.push_str(&format!("prime = {}\n", self.prime));
        out.push_str(&format!("vars = {}\n", self.vars.join(", ")));
        if let Some(t) = &self.param {
            out.push_str(&format!("param = {t}\n"));
        }
        out.push_str(&format!("rank = {}\n", self.rank));
        out.push_str(&format!("mode = {}\n", self.mode));
        let matrices = |out: &mut String, header: &str, prefix: &str, ms: &[PolyMatrix]| {
            if ms.is_empty() {
                return;
            }
            out.push_str(&format!("\n[{header}]\n"));
            for (i, m) in ms.iter().enumerate() {
                out.push_str(&format!("matrix {prefix}{} = {m}\n", i + 1));
            }
        };
        matrices(&mut out, "connection", "A", &self.connection);
        matrices(&mut out, "higgs", "B", &self.higgs);
        matrices(&mut out, "psi", "P", &self.psi);
        if !self.filtration.is_empty() {
            out.push_str("\n[filtration]\n");
            for (n, step) in self.filtration.iter().enumerate() {
                let vs: Vec<String> = step
                    .iter()
                    .map(|v| format!("[{}]", v.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")))
                    .collect();
                out.push_str(&format!("step F{} = [{}]\n", n + 1, vs.join(", ")));
            }
        }
        if !self.lift.is_empty() {
            out.push_str("\n[lift]\n");
            for (i, h) in self.lift.iter().enumerate() {
                out.push_str(&format!("poly h{} = {h}\n", i + 1));
            }
        }
        if self.level.is_some() || self.degree_bound.is_some() {
            out.push_str("\n[bounds]\n");
            if let Some(n) = self.level {
                out.push_str(&format!("level = {n}\n"));
            }
            if let Some(n) = self.degree_bound {
                out.push_str(&format!("degree = {n}\n"));
            }
        }
        out
    }

    /// Re-reads the problem over another prime.
    pub fn with_prime(&self, prime: u64) -> Result<Problem, ParseError> {
        let mut text = self.serialize();
        text = text.replacen(&format!("prime = {}\n", self.prime), &format!("prime = {prime}\n"), 1);
        Problem::parse(&text)
    }
}
