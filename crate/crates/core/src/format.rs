//! Text formats for graphs and partitions.
//!
//! Graph file:
//!
//! ```text
//! # format v1
//! # genspec kind=random n=4 p=0.5 seed=7      (optional)
//! p 4 2
//! geom                                        (optional, then n `c` lines)
//! c 0.25 0.5
//! ...
//! e 0 1
//! e 2 3
//! ```
//!
//! Partition file: one `0` (LEFT) or `1` (RIGHT) per vertex, in order.
//! Lines starting with `#` and blank lines are ignored by both readers.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::gen::GenSpec;
use crate::graph::Graph;
use crate::partition::{Partitioning, Side};

pub const FORMAT_LINE: &str = "# format v1";

pub fn write_graph<W: Write>(w: &mut W, g: &Graph, spec: Option<&GenSpec>) -> Result<()> {
    writeln!(w, "{FORMAT_LINE}")?;
    if let Some(spec) = spec {
        writeln!(w, "# genspec {spec}")?;
    }
    writeln!(w, "p {} {}", g.n(), g.m())?;
    if let Some(coords) = g.coords() {
        writeln!(w, "geom")?;
        for (x, y) in coords {
            writeln!(w, "c {x} {y}")?;
        }
    }
    for (u, v) in g.edges() {
        writeln!(w, "e {u} {v}")?;
    }
    Ok(())
}

/// Content lines with their 1-based line numbers.
fn content_lines<R: BufRead>(r: R) -> impl Iterator<Item = Result<(usize, String)>> {
    r.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(e.into())),
        Ok(l) => {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, t.to_string())))
            }
        }
    })
}

fn field<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("bad {what} `{tok}`")))
}

pub fn read_graph<R: BufRead>(r: R) -> Result<Graph> {
    let mut lines = content_lines(r);
    let (line, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::parse(1, "empty graph file"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("p") {
        return Err(Error::parse(line, "expected `p <n> <m>` header"));
    }
    let n: usize = field(line, toks.next(), "vertex count")?;
    let m: usize = field(line, toks.next(), "edge count")?;

    let mut g = Graph::empty(n);
    let mut coords: Option<Vec<(f64, f64)>> = None;
    let mut last_line = line;
    for item in lines {
        let (line, text) = item?;
        last_line = line;
        let mut toks = text.split_whitespace();
        match toks.next() {
            Some("geom") => {
                if coords.is_some() || g.m() > 0 {
                    return Err(Error::parse(
                        line,
                        "`geom` must precede coordinates and edges",
                    ));
                }
                coords = Some(Vec::with_capacity(n));
            }
            Some("c") => {
                let list = coords
                    .as_mut()
                    .ok_or_else(|| Error::parse(line, "coordinate without `geom`"))?;
                if g.m() > 0 {
                    return Err(Error::parse(line, "coordinates must precede edges"));
                }
                let x: f64 = field(line, toks.next(), "x coordinate")?;
                let y: f64 = field(line, toks.next(), "y coordinate")?;
                list.push((x, y));
            }
            Some("e") => {
                if let Some(c) = &coords {
                    if c.len() != n {
                        return Err(Error::parse(
                            line,
                            format!("{} coordinates for {n} vertices", c.len()),
                        ));
                    }
                }
                let u: usize = field(line, toks.next(), "edge endpoint")?;
                let v: usize = field(line, toks.next(), "edge endpoint")?;
                if u >= v {
                    return Err(Error::parse(
                        line,
                        format!("edge ({u},{v}) must have u < v"),
                    ));
                }
                g.add_edge(u, v)
                    .map_err(|e| Error::parse(line, e.to_string()))?;
            }
            Some(other) => return Err(Error::parse(line, format!("unknown record `{other}`"))),
            None => unreachable!("blank lines are filtered"),
        }
        if toks.next().is_some() {
            return Err(Error::parse(line, "trailing tokens"));
        }
    }
    if g.m() != m {
        return Err(Error::parse(
            last_line,
            format!("header declares {m} edges, found {}", g.m()),
        ));
    }
    match coords {
        Some(c) if c.len() != n => Err(Error::parse(
            last_line,
            format!("{} coordinates for {n} vertices", c.len()),
        )),
        Some(c) => g.with_coords(c),
        None => Ok(g),
    }
}

pub fn write_partition<W: Write>(w: &mut W, p: &Partitioning) -> Result<()> {
    writeln!(w, "{FORMAT_LINE}")?;
    for &s in p.sides() {
        writeln!(w, "{}", s.index())?;
    }
    Ok(())
}

pub fn read_partition<R: BufRead>(r: R, g: &Graph) -> Result<Partitioning> {
    let mut side = Vec::with_capacity(g.n());
    let mut last = 0;
    for item in content_lines(r) {
        let (line, text) = item?;
        last = line;
        side.push(match text.as_str() {
            "0" => Side::Left,
            "1" => Side::Right,
            other => {
                return Err(Error::parse(
                    line,
                    format!("expected 0 or 1, got `{other}`"),
                ))
            }
        });
    }
    if side.len() != g.n() {
        return Err(Error::parse(
            last.max(1),
            format!("{} labels for {} vertices", side.len(), g.n()),
        ));
    }
    Partitioning::new(g, side)
}
