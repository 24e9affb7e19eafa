//! Edge-list and graph6 text formats.
//!
//! Edge list: a header line `n m`, then `m` lines `u v p` where `p` is a
//! fraction (`1/2`) or a decimal (`0.0349`). Emission writes edges in
//! canonical order with probabilities as reduced fractions.

use std::fmt::Write;

use super::WeightedGraph;
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, in_unit_interval, parse_rational, rat, Rational};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (header_no, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [n, m] = fields.as_slice() else {
        return Err(parse_err(header_no, "header must be `n m`"));
    };
    let n: usize = n.parse().map_err(|_| parse_err(header_no, "bad vertex count"))?;
    let m: usize = m.parse().map_err(|_| parse_err(header_no, "bad edge count"))?;

    let mut g = WeightedGraph::new(n);
    for (line_no, line) in lines {
        if g.edge_count() == m {
            return Err(parse_err(line_no, "more edge lines than declared"));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [u, v, p] = fields.as_slice() else {
            return Err(parse_err(line_no, "edge line must be `u v p`"));
        };
        let u: usize = u.parse().map_err(|_| parse_err(line_no, "bad endpoint"))?;
        let v: usize = v.parse().map_err(|_| parse_err(line_no, "bad endpoint"))?;
        let p = parse_rational(p).ok_or_else(|| parse_err(line_no, format!("bad probability `{p}`")))?;
        if u >= n || v >= n {
            return Err(parse_err(line_no, format!("vertex index out of range (n = {n})")));
        }
        if u == v {
            return Err(parse_err(line_no, "self-loop"));
        }
        if !in_unit_interval(&p) {
            return Err(parse_err(line_no, "probability outside [0, 1]"));
        }
        g.add_edge(u, v, p).map_err(|e| parse_err(line_no, e.to_string()))?;
    }
    if g.edge_count() != m {
        return Err(parse_err(
            text.lines().count().max(1),
            format!("expected {m} edges, found {}", g.edge_count()),
        ));
    }
    Ok(g)
}

pub fn emit_edge_list(g: &WeightedGraph) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for i in g.canonical_edge_order() {
        let e = &g.edges()[i];
        let _ = writeln!(out, "{} {} {}", e.u.min(e.v), e.u.max(e.v), fmt_rational(&e.p));
    }
    out
}

/// Decodes a graph6 line with every edge open with probability 1/2.
pub fn parse_graph6(line: &str) -> Result<WeightedGraph> {
    parse_graph6_with(line, &rat(1, 2))
}

/// Decodes a graph6 line; edges appear in graph6 bit order
/// `(0,1), (0,2), (1,2), (0,3), ...`, each with probability `p`.
pub fn parse_graph6_with(line: &str, p: &Rational) -> Result<WeightedGraph> {
    let line = line.trim_end_matches(['\n', '\r']);
    let line = line.strip_prefix(">>graph6<<").unwrap_or(line);
    let bytes = line.as_bytes();
    if let Some(&bad) = bytes.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(Error::Graph6(format!("invalid character {:?}", bad as char)));
    }
    let (n, rest) = match bytes {
        [] => return Err(Error::Graph6("empty string".into())),
        [126, 126, ..] => return Err(Error::Graph6("8-byte size form is not supported".into())),
        [126, a, b, c, rest @ ..] => {
            let n = ((*a as usize - 63) << 12) | ((*b as usize - 63) << 6) | (*c as usize - 63);
            (n, rest)
        }
        [126, ..] => return Err(Error::Graph6("truncated size header".into())),
        [a, rest @ ..] => (*a as usize - 63, rest),
    };
    let bit_count = n * n.saturating_sub(1) / 2;
    let byte_count = bit_count.div_ceil(6);
    if rest.len() < byte_count {
        return Err(Error::Graph6(format!(
            "truncated bit vector: need {byte_count} bytes, found {}",
            rest.len()
        )));
    }
    if rest.len() > byte_count {
        return Err(Error::Graph6("trailing bytes after bit vector".into()));
    }
    let mut g = WeightedGraph::new(n);
    let mut k = 0usize;
    for v in 1..n {
        for u in 0..v {
            let byte = rest[k / 6] - 63;
            if (byte >> (5 - k % 6)) & 1 == 1 {
                g.add_edge(u, v, p.clone())?;
            }
            k += 1;
        }
    }
    Ok(g)
}

/// Encodes the simple graph underlying `g` (probabilities are dropped).
/// Parallel edges are rejected since graph6 cannot carry them.
pub fn emit_graph6(g: &WeightedGraph) -> Result<String> {
    let n = g.vertex_count();
    if n > 258_047 {
        return Err(Error::Graph6("too many vertices".into()));
    }
    let bit_index = |u: usize, v: usize| v * (v - 1) / 2 + u;
    let bit_count = n * n.saturating_sub(1) / 2;
    let mut bits = vec![false; bit_count];
    for e in g.edges() {
        let (u, v) = (e.u.min(e.v), e.u.max(e.v));
        let slot = &mut bits[bit_index(u, v)];
        if *slot {
            return Err(Error::Graph6(format!("parallel edge ({u}, {v})")));
        }
        *slot = true;
    }
    let mut out = Vec::with_capacity(4 + bit_count / 6 + 1);
    if n <= 62 {
        out.push(n as u8 + 63);
    } else {
        out.extend([126, (n >> 12) as u8 + 63, ((n >> 6) & 63) as u8 + 63, (n & 63) as u8 + 63]);
    }
    for chunk in bits.chunks(6) {
        let mut byte = 0u8;
        for (i, &bit) in chunk.iter().enumerate() {
            if bit {
                byte |= 1 << (5 - i);
            }
        }
        out.push(byte + 63);
    }
    Ok(String::from_utf8(out).expect("graph6 is printable ASCII"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn pairs(g: &WeightedGraph) -> Vec<(usize, usize)> {
        g.edges().iter().map(|e| (e.u, e.v)).collect()
    }

    #[test]
    fn edge_list_examples() {
        let g = parse_edge_list("2 1\n0 1 1/2").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edges()[0].p, rat(1, 2));

        let g = parse_edge_list("3 3\n0 1 1/2\n1 2 1/2\n0 2 1/2\n").unwrap();
        assert_eq!(pairs(&g), vec![(0, 1), (1, 2), (0, 2)]);

        let g = parse_edge_list("2 1\n0 1 0.0349").unwrap();
        assert_eq!(g.edges()[0].p, rat(349, 10000));
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        let line_of = |text: &str| match parse_edge_list(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line_of("2 1\n0 5 1/2"), 2);
        assert_eq!(line_of("2 2\n0 1 1/2\n0 1 3/2"), 3);
        assert_eq!(line_of("2 1\n0 1"), 2);
        assert_eq!(line_of("x 1\n0 1 1/2"), 1);
        assert_eq!(line_of("2 1\n1 1 1/2"), 2);
        assert_eq!(line_of("2 1\n0 1 -0.5"), 2);
        assert!(parse_edge_list("3 2\n0 1 1/2\n").is_err());
    }

    #[test]
    fn edge_list_emission_is_canonical() {
        let g = parse_edge_list("3 3\n2 1 0.5\n0 2 1\n1 0 1/3\n").unwrap();
        let text = emit_edge_list(&g);
        assert_eq!(text, "3 3\n0 1 1/3\n0 2 1/1\n1 2 1/2\n");
        let again = parse_edge_list(&text).unwrap();
        assert_eq!(emit_edge_list(&again), text);
    }

    #[test]
    fn graph6_examples() {
        let g = parse_graph6("A_").unwrap();
        assert_eq!((g.vertex_count(), pairs(&g)), (2, vec![(0, 1)]));
        let g = parse_graph6("C~").unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(pairs(&g), vec![(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]);
        let g = parse_graph6("?").unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (0, 0));
        let mut sorted = pairs(&parse_graph6("DQc").unwrap());
        sorted.sort();
        assert_eq!(sorted, vec![(0, 2), (0, 4), (1, 3), (3, 4)]);
        assert!(parse_graph6("C~").unwrap().edges().iter().all(|e| e.p == rat(1, 2)));
    }

    #[test]
    fn graph6_errors() {
        assert!(matches!(parse_graph6("C"), Err(Error::Graph6(_))));
        assert!(matches!(parse_graph6("C~~"), Err(Error::Graph6(_))));
        assert!(matches!(parse_graph6("A\u{1}"), Err(Error::Graph6(_))));
        assert!(matches!(parse_graph6(""), Err(Error::Graph6(_))));
        assert!(matches!(parse_graph6("~?"), Err(Error::Graph6(_))));
    }

    #[test]
    fn graph6_long_header() {
        let g = WeightedGraph::path(70, &rat(1, 2));
        let text = emit_graph6(&g).unwrap();
        assert!(text.starts_with('~'));
        let back = parse_graph6(&text).unwrap();
        assert_eq!(back.vertex_count(), 70);
        assert_eq!(back.edge_count(), 69);
    }

    #[test]
    fn graph6_rejects_multigraphs() {
        let g = WeightedGraph::from_edges(2, [(0, 1, rat(1, 2)), (1, 0, rat(1, 2))]).unwrap();
        assert!(emit_graph6(&g).is_err());
    }
}
