//! Parsing of the outmap text format written by the `Display` impls in [`crate::cube`].
//!
//! ```text
//! 2
//! 00 01
//! 01 *
//! 10 10
//! 11 11
//! ```
//!
//! Line 1 is the dimension. Each following line holds a vertex and its outmap
//! as bitstrings, dimension `n` leftmost, in increasing vertex order. `*` marks
//! an unknown outmap (partial tables only). Blank lines and lines starting with
//! `#` are ignored.

use std::str::FromStr;

use crate::cube::{check_dim, OutmapTable, OutmapValue, PartialOutmapTable};
use crate::error::{parse_err, Error, Result};

fn parse_bits(tok: &str, n: usize, line: usize) -> Result<u32> {
    if tok.len() != n || !tok.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(parse_err(line, format!("expected {n} bits, got {tok:?}")));
    }
    Ok(tok
        .bytes()
        .fold(0, |acc, b| acc << 1 | u32::from(b == b'1')))
}

fn parse_lines(text: &str) -> Result<(usize, Vec<Option<OutmapValue>>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.starts_with('#'));
    let (lno, header) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| parse_err(1, "missing dimension line"))?;
    let n: usize = header
        .parse()
        .map_err(|_| parse_err(lno, format!("bad dimension {header:?}")))?;
    check_dim(n).map_err(|e| parse_err(lno, e.to_string()))?;
    let size = 1usize << n;
    let mut values = Vec::with_capacity(size);
    for (lno, l) in lines {
        if l.is_empty() && n > 0 {
            continue;
        }
        if values.len() == size {
            return Err(parse_err(lno, "too many vertex lines"));
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        // at n = 0 the bitstrings are empty and only a `*` may remain
        let (vtok, stok) = match (n, toks.as_slice()) {
            (0, []) => ("", ""),
            (0, ["*"]) => ("", "*"),
            (_, [a, b]) => (*a, *b),
            _ => return Err(parse_err(lno, format!("expected two fields, got {l:?}"))),
        };
        let v = parse_bits(vtok, n, lno)?;
        if v as usize != values.len() {
            return Err(parse_err(
                lno,
                format!("expected vertex {}, got {v}", values.len()),
            ));
        }
        if stok == "*" {
            values.push(None);
        } else {
            values.push(Some(parse_bits(stok, n, lno)?));
        }
    }
    if values.len() != size {
        return Err(parse_err(
            text.lines().count(),
            format!("expected {size} vertex lines, got {}", values.len()),
        ));
    }
    Ok((n, values))
}

impl FromStr for PartialOutmapTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, values) = parse_lines(s)?;
        PartialOutmapTable::new(n, values)
    }
}

impl FromStr for OutmapTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, values) = parse_lines(s)?;
        let mut out = Vec::with_capacity(values.len());
        for (v, x) in values.into_iter().enumerate() {
            out.push(x.ok_or_else(|| {
                parse_err(v + 2, format!("vertex {v} is unknown in a total table"))
            })?);
        }
        OutmapTable::new(n, out)
    }
}
