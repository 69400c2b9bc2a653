//! Plain-text point set files.
//!
//! ```text
//! apset v1 dim=2 signed=0 window=-10,-10;10,10
//! 0.0000000000000000e0 1.0000000000000000e0 1
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Point, PointMultiSet, Window};

pub const MAGIC: &str = "apset v1";

fn num(x: f64) -> String {
    // 17 significant digits round-trip every f64
    format!("{x:.16e}")
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| num(*x)).collect::<Vec<_>>().join(",")
}

pub fn to_string(a: &PointMultiSet) -> String {
    let w = a.window();
    let mut out = format!(
        "{MAGIC} dim={} signed={} window={};{}\n",
        a.dim(),
        u8::from(a.is_signed()),
        join(w.lower().coords()),
        join(w.upper().coords())
    );
    for item in a.items() {
        for c in item.point.coords() {
            out.push_str(&num(*c));
            out.push(' ');
        }
        writeln!(out, "{}", item.multiplicity).expect("write to string");
    }
    out
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::InvalidParameter(format!("line {line}: {msg}"))
}

fn parse_coords(s: &str, line: usize) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| bad(line, format!("{t:?}: {e}"))))
        .collect()
}

fn field<'a>(token: Option<&'a str>, key: &str) -> Result<&'a str> {
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| bad(1, format!("expected {key}=...")))
}

pub fn parse(text: &str) -> Result<PointMultiSet> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let rest = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| bad(1, format!("header must start with {MAGIC:?}")))?;
    let mut tokens = rest.split_whitespace();
    let dim: usize = field(tokens.next(), "dim")?
        .parse()
        .map_err(|e| bad(1, format!("dim: {e}")))?;
    let signed = match field(tokens.next(), "signed")? {
        "0" => false,
        "1" => true,
        other => return Err(bad(1, format!("signed must be 0 or 1, got {other:?}"))),
    };
    let (lo, hi) = field(tokens.next(), "window")?
        .split_once(';')
        .ok_or_else(|| bad(1, "window must be lo;hi"))?;
    if tokens.next().is_some() {
        return Err(bad(1, "trailing header fields"));
    }
    let window = Window::new(Point::new(parse_coords(lo, 1)?)?, Point::new(parse_coords(hi, 1)?)?)?;
    if window.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: window.dim(),
        });
    }
    let mut items = Vec::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.is_empty() {
            continue;
        }
        if parts.len() != dim + 1 {
            return Err(bad(n, format!("expected {} fields, got {}", dim + 1, parts.len())));
        }
        let coords = parts[..dim]
            .iter()
            .map(|t| t.parse::<f64>().map_err(|e| bad(n, format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let m: i64 = parts[dim].parse().map_err(|e| bad(n, format!("multiplicity: {e}")))?;
        if m == 0 {
            return Err(bad(n, "multiplicity must be nonzero"));
        }
        items.push((Point::new(coords)?, m));
    }
    PointMultiSet::new(window, items, signed)
}

pub fn read(path: &Path) -> Result<PointMultiSet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn write(path: &Path, a: &PointMultiSet) -> Result<()> {
    std::fs::write(path, to_string(a))
        .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
}
