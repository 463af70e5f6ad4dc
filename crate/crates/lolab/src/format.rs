//! Text formats: tables, hypergraph instances, assignments, minor chains and
//! relations. All use `\n` line endings and 1-based vertices and variables.

use std::fmt::Write as _;

use lolab_core::hypergraph::{Assignment, Hypergraph3};
use lolab_core::minors::{MinorChain, MinorMap};
use lolab_core::sets::PolyTable;
use lolab_core::templates::Relation3;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: expected `{expected}`, found {found:?}")]
    Header { line: usize, expected: &'static str, found: String },
    #[error("table needs {expected} digits, found {found}")]
    Length { expected: usize, found: usize },
    #[error("digit {digit:?} at index {index} is not below {levels}")]
    Digit { index: usize, digit: char, levels: u8 },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Core(#[from] lolab_core::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

/// Non-empty lines with their 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r'))).filter(|(_, l)| !l.trim().is_empty())
}

/// Whitespace-separated numbers after a fixed keyword.
fn numbers(line: usize, text: &str, keyword: &'static str, expected: &'static str) -> Result<Vec<usize>> {
    let mut words = text.split_whitespace();
    if words.next() != Some(keyword) {
        return Err(FormatError::Header { line, expected, found: text.to_string() });
    }
    words
        .map(|w| w.parse().map_err(|_| FormatError::Syntax { line, message: format!("not a number: {w:?}") }))
        .collect()
}

fn too_few(line: usize, what: &str) -> FormatError {
    FormatError::Syntax { line, message: format!("missing {what}") }
}

fn trailing(line: usize) -> FormatError {
    FormatError::Syntax { line, message: "unexpected trailing content".into() }
}

pub fn encode_table(f: &PolyTable) -> String {
    format!("poly {} {}\n{}\n", f.arity(), f.levels(), f.digits())
}

fn table_from_lines(header: (usize, &str), digits: Option<(usize, &str)>) -> Result<PolyTable> {
    const EXPECTED: &str = "poly <n> <levels>";
    let (line, text) = header;
    let nums = numbers(line, text, "poly", EXPECTED)?;
    let [n, levels] = nums[..] else {
        return Err(FormatError::Header { line, expected: EXPECTED, found: text.to_string() });
    };
    lolab_core::sets::check_arity(n)?;
    if !(2..=16).contains(&levels) {
        return Err(lolab_core::Error::LevelsOutOfRange(levels).into());
    }
    let digits = digits.map(|(_, d)| d.trim()).unwrap_or("");
    if digits.chars().count() != 1 << n {
        return Err(FormatError::Length { expected: 1 << n, found: digits.chars().count() });
    }
    let mut values = Vec::with_capacity(1 << n);
    for (index, digit) in digits.chars().enumerate() {
        match digit.to_digit(16) {
            Some(v) if (v as usize) < levels => values.push(v as u8),
            _ => return Err(FormatError::Digit { index, digit, levels: levels as u8 }),
        }
    }
    Ok(PolyTable::new(n, levels, values)?)
}

pub fn decode_table(text: &str) -> Result<PolyTable> {
    let mut it = lines(text);
    let header = it.next().ok_or(FormatError::Header { line: 1, expected: "poly <n> <levels>", found: String::new() })?;
    let table = table_from_lines(header, it.next())?;
    match it.next() {
        Some((line, _)) => Err(trailing(line)),
        None => Ok(table),
    }
}

pub fn encode_instance(h: &Hypergraph3) -> String {
    let mut out = format!("p hlo {} {}\n", h.vertices(), h.edges().len());
    for [u, v, w] in h.edges() {
        let _ = writeln!(out, "e {} {} {}", u + 1, v + 1, w + 1);
    }
    out
}

pub fn decode_instance(text: &str) -> Result<Hypergraph3> {
    const EXPECTED: &str = "p hlo <V> <m>";
    let mut it = lines(text);
    let (line, header) = it.next().ok_or(FormatError::Header { line: 1, expected: EXPECTED, found: String::new() })?;
    let words: Vec<&str> = header.split_whitespace().collect();
    let bad_header = || FormatError::Header { line, expected: EXPECTED, found: header.to_string() };
    let [p, hlo, v, m] = words[..] else { return Err(bad_header()) };
    if p != "p" || hlo != "hlo" {
        return Err(bad_header());
    }
    let (vertices, count): (usize, usize) = match (v.parse(), m.parse()) {
        (Ok(v), Ok(m)) => (v, m),
        _ => return Err(bad_header()),
    };
    let mut edges = Vec::with_capacity(count);
    for (line, text) in it {
        let nums = numbers(line, text, "e", "e <u> <v> <w>")?;
        let [a, b, c] = nums[..] else {
            return Err(FormatError::Syntax { line, message: "an edge has exactly three vertices".into() });
        };
        if let Some(&bad) = [a, b, c].iter().find(|&&x| x == 0 || x > vertices) {
            return Err(lolab_core::Error::VertexOutOfRange { vertex: bad, count: vertices }.into());
        }
        edges.push([a - 1, b - 1, c - 1]);
    }
    if edges.len() != count {
        return Err(FormatError::Syntax { line, message: format!("header announces {count} edges, found {}", edges.len()) });
    }
    Ok(Hypergraph3::new(vertices, edges)?)
}

pub fn encode_assignment(a: &Assignment) -> String {
    let mut out = String::from("a");
    for c in a.colours() {
        let _ = write!(out, " {c}");
    }
    out.push('\n');
    out
}

pub fn decode_assignment(text: &str) -> Result<Assignment> {
    let mut it = lines(text);
    let (line, body) = it.next().ok_or(FormatError::Header { line: 1, expected: "a <c1> ... <cV>", found: String::new() })?;
    let colours = numbers(line, body, "a", "a <c1> ... <cV>")?;
    if let Some((line, _)) = it.next() {
        return Err(trailing(line));
    }
    let colours = colours
        .into_iter()
        .map(|c| u8::try_from(c).map_err(|_| FormatError::Syntax { line, message: format!("colour {c} too large") }))
        .collect::<Result<Vec<u8>>>()?;
    Ok(Assignment(colours))
}

/// `chain <n_1> ... <n_l>`, then the `l` tables, then `l - 1` lines
/// `map <image of 1> ... <image of n_i>`.
pub fn encode_chain(chain: &MinorChain) -> String {
    let mut out = String::from("chain");
    for f in chain.tables() {
        let _ = write!(out, " {}", f.arity());
    }
    out.push('\n');
    for f in chain.tables() {
        out.push_str(&encode_table(f));
    }
    for pi in chain.maps() {
        out.push_str("map");
        for i in pi.image() {
            let _ = write!(out, " {i}");
        }
        out.push('\n');
    }
    out
}

pub fn decode_chain(text: &str) -> Result<MinorChain> {
    let mut it = lines(text);
    let (line, header) = it.next().ok_or(FormatError::Header { line: 1, expected: "chain <n_1> ...", found: String::new() })?;
    let arities = numbers(line, header, "chain", "chain <n_1> ...")?;
    if arities.is_empty() {
        return Err(lolab_core::Error::EmptyChain.into());
    }
    let mut tables = Vec::with_capacity(arities.len());
    for &n in &arities {
        let head = it.next().ok_or(too_few(line, "table"))?;
        let t = table_from_lines(head, it.next())?;
        if t.arity() != n {
            return Err(lolab_core::Error::ArityMismatch { expected: n, found: t.arity() }.into());
        }
        tables.push(t);
    }
    let mut maps = Vec::with_capacity(arities.len() - 1);
    for w in arities.windows(2) {
        let (line, text) = it.next().ok_or(too_few(line, "map"))?;
        let image = numbers(line, text, "map", "map <image> ...")?;
        if image.len() != w[0] {
            return Err(lolab_core::Error::ArityMismatch { expected: w[0], found: image.len() }.into());
        }
        maps.push(MinorMap::new(w[1], image)?);
    }
    if let Some((line, _)) = it.next() {
        return Err(trailing(line));
    }
    Ok(MinorChain::new(tables, maps)?)
}

/// `rel <k>` then one line `t a b c` per triple, colours in `0..k`.
pub fn encode_relation(rel: &Relation3) -> String {
    let mut out = format!("rel {}\n", rel.domain());
    for [a, b, c] in rel.triples() {
        let _ = writeln!(out, "t {a} {b} {c}");
    }
    out
}

pub fn decode_relation(text: &str) -> Result<Relation3> {
    let mut it = lines(text);
    let (line, header) = it.next().ok_or(FormatError::Header { line: 1, expected: "rel <k>", found: String::new() })?;
    let nums = numbers(line, header, "rel", "rel <k>")?;
    let [k] = nums[..] else {
        return Err(FormatError::Header { line, expected: "rel <k>", found: header.to_string() });
    };
    let mut triples = Vec::new();
    for (line, text) in it {
        let nums = numbers(line, text, "t", "t <a> <b> <c>")?;
        let [a, b, c] = nums[..] else {
            return Err(FormatError::Syntax { line, message: "a triple has exactly three colours".into() });
        };
        let colour = |x: usize| {
            u8::try_from(x).map_err(|_| FormatError::Syntax { line, message: format!("colour {x} too large") })
        };
        triples.push([colour(a)?, colour(b)?, colour(c)?]);
    }
    Ok(Relation3::from_triples(k, triples)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lolab_core::polymorph::projection;

    #[test]
    fn table_examples() {
        let p = projection(1, 1).unwrap();
        assert_eq!(encode_table(&p), "poly 1 3\n01\n");
        assert_eq!(decode_table("poly 1 3\n01\n").unwrap(), p);
        assert_eq!(decode_table("poly 1 3\n03"), Err(FormatError::Digit { index: 1, digit: '3', levels: 3 }));
        assert_eq!(decode_table("poly 2 3\n012"), Err(FormatError::Length { expected: 4, found: 3 }));
        assert!(matches!(decode_table("pol 2 3\n0120"), Err(FormatError::Header { .. })));
        assert!(matches!(decode_table("poly 2\n0120"), Err(FormatError::Header { .. })));
        assert!(matches!(decode_table("poly 1 3\n01\n01"), Err(FormatError::Syntax { line: 3, .. })));
    }

    #[test]
    fn instance_examples() {
        let text = "p hlo 3 2\ne 1 2 3\ne 1 1 2\n";
        let h = decode_instance(text).unwrap();
        assert_eq!(h.edges(), &[[0, 1, 2], [0, 0, 1]]);
        assert_eq!(encode_instance(&h), text);
        assert!(decode_instance("p hlo 3 2\ne 1 2 3\n").is_err());
        assert!(decode_instance("p hlo 2 1\ne 1 2 3\n").is_err());
        assert!(decode_instance("p hlo 2 1\ne 0 1 2\n").is_err());
        assert!(decode_instance("p cnf 2 1\ne 1 1 2\n").is_err());
        let a = Assignment(vec![0, 2, 1]);
        assert_eq!(encode_assignment(&a), "a 0 2 1\n");
        assert_eq!(decode_assignment("a 0 2 1\n").unwrap(), a);
    }
}
