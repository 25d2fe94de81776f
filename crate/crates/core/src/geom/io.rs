//! Plain-text polytope files.
//!
//! ```text
//! dim 2
//! 0 0
//! 1 0
//! 0 1
//! ```
//!
//! Union files use the same header followed by `part` lines, each starting a
//! new vertex block. Blank lines and `#` comments are ignored.

use std::path::Path;

use super::{Polytope, Vec3};
use crate::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Meaningful lines with their 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn header<'a, I: Iterator<Item = (usize, &'a str)>>(it: &mut I) -> Result<usize> {
    let (n, l) = it.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut words = l.split_whitespace();
    if words.next() != Some("dim") {
        return Err(parse_err(n, "expected `dim d`"));
    }
    let d: usize = words
        .next()
        .and_then(|w| w.parse().ok())
        .ok_or_else(|| parse_err(n, "expected an integer dimension"))?;
    if d != 2 && d != 3 {
        return Err(parse_err(n, format!("unsupported dimension {d}")));
    }
    Ok(d)
}

fn vertex(n: usize, l: &str, d: usize) -> Result<Vec3> {
    let xs: Vec<f64> = l
        .split_whitespace()
        .map(|w| w.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(n, format!("bad number: {e}")))?;
    if xs.len() != d {
        return Err(parse_err(
            n,
            format!("expected {d} coordinates, found {}", xs.len()),
        ));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(parse_err(n, "non-finite coordinate"));
    }
    let mut p = Vec3::zeros();
    for (i, x) in xs.into_iter().enumerate() {
        p[i] = x;
    }
    Ok(p)
}

pub fn parse_polytope(text: &str) -> Result<Polytope> {
    let mut it = lines(text);
    let d = header(&mut it)?;
    let mut pts = Vec::new();
    let mut last = 1;
    for (n, l) in it {
        pts.push(vertex(n, l, d)?);
        last = n;
    }
    if pts.is_empty() {
        return Err(parse_err(last, "no vertices"));
    }
    Polytope::from_points(&pts, d)
}

/// Parts of a union file. A file without `part` lines is a single part.
pub fn parse_parts(text: &str) -> Result<Vec<Polytope>> {
    let mut it = lines(text);
    let d = header(&mut it)?;
    let mut blocks: Vec<(usize, Vec<Vec3>)> = Vec::new();
    for (n, l) in it {
        if l == "part" {
            blocks.push((n, Vec::new()));
            continue;
        }
        if blocks.is_empty() {
            blocks.push((n, Vec::new()));
        }
        let v = vertex(n, l, d)?;
        blocks.last_mut().unwrap().1.push(v);
    }
    if blocks.is_empty() {
        return Err(parse_err(1, "no parts"));
    }
    blocks
        .into_iter()
        .map(|(n, pts)| {
            if pts.is_empty() {
                Err(parse_err(n, "empty part"))
            } else {
                Polytope::from_points(&pts, d)
            }
        })
        .collect()
}

pub fn read_polytope(path: &Path) -> Result<Polytope> {
    parse_polytope(&std::fs::read_to_string(path)?)
}

pub fn read_parts(path: &Path) -> Result<Vec<Polytope>> {
    parse_parts(&std::fs::read_to_string(path)?)
}

pub fn format_polytope(p: &Polytope) -> String {
    let mut s = format!("dim {}\n", p.dim());
    for v in p.vertices() {
        let coords: Vec<String> = (0..p.dim()).map(|i| format!("{}", v[i])).collect();
        s.push_str(&coords.join(" "));
        s.push('\n');
    }
    s
}
