use std::fmt::Write as _;

use crate::dependency::{DepSet, DependencyError, TripleSystem};
use crate::rational::{format_rational, parse_rational};

fn perr(line: usize, msg: impl Into<String>) -> DependencyError {
    DependencyError::Parse { line, msg: msg.into() }
}

/// `system v1`, `n <n> alpha <a> delta <d>`, then `3 i j k` / `2 i j` lines.
pub fn write_system(sys: &TripleSystem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "system v1");
    let _ = writeln!(out, "n {} alpha {} delta {}", sys.n(), sys.alpha(), format_rational(&sys.delta()));
    for s in sys.sets() {
        let ix: Vec<String> = s.indices().iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "{} {}", s.len(), ix.join(" "));
    }
    out
}

pub fn parse_system(text: &str) -> Result<TripleSystem, DependencyError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, head) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    if head.split_whitespace().collect::<Vec<_>>() != ["system", "v1"] {
        return Err(perr(ln, format!("expected `system v1`, found `{head}`")));
    }
    let (ln, params) = lines.next().ok_or_else(|| perr(ln + 1, "missing parameter line"))?;
    let toks: Vec<&str> = params.split_whitespace().collect();
    let (n, alpha, delta) = match toks.as_slice() {
        ["n", n, "alpha", a, "delta", d] => (
            n.parse::<usize>().map_err(|_| perr(ln, format!("invalid n `{n}`")))?,
            a.parse::<u64>().map_err(|_| perr(ln, format!("invalid alpha `{a}`")))?,
            parse_rational(d).ok_or_else(|| perr(ln, format!("invalid delta `{d}`")))?,
        ),
        _ => return Err(perr(ln, format!("expected `n <n> alpha <a> delta <d>`, found `{params}`"))),
    };
    let mut sets = Vec::new();
    for (ln, line) in lines {
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| perr(ln, format!("invalid integer `{t}`"))))
            .collect::<Result<_, _>>()?;
        let set = match nums.as_slice() {
            [3, i, j, k] => DepSet::Triple([*i, *j, *k]),
            [2, i, j] => DepSet::Pair([*i, *j]),
            _ => return Err(perr(ln, format!("expected `3 i j k` or `2 i j`, found `{line}`"))),
        };
        if let Some(&bad) = set.indices().iter().find(|&&i| i >= n) {
            return Err(perr(ln, format!("index {bad} out of range for n = {n}")));
        }
        let ix = set.indices();
        if (1..ix.len()).any(|a| ix[..a].contains(&ix[a])) {
            return Err(perr(ln, "repeated index within a set"));
        }
        sets.push(set);
    }
    TripleSystem::new(n, sets, alpha, delta)
}
