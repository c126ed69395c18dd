//! Plain-text generation format.
//!
//! ```text
//! #balls <level> <radius>
//! <cx> <cy>
//! #squares <level> <side>
//! <cx> <cy>
//! #arcs <level>
//! <ex> <ey> <length> [<p> <q>]
//! ```
//! Coordinates are exact rationals `a` or `a/b`; arc data are floats with an
//! optional rational tag.

use std::io::{BufRead, Write};
use std::str::FromStr;

use super::{GenSet, Generation};
use crate::error::{Error, Result};
use crate::exact::Rat;
use crate::geometry::{rational_direction, Arc, BallUnion, Direction, RatPoint, SquareUnion};

pub fn write_generations<W: Write>(mut w: W, gens: &[Generation]) -> Result<()> {
    for g in gens {
        match &g.set {
            Some(GenSet::Balls(b)) => {
                writeln!(w, "#balls {} {}", g.level, b.radius)?;
                for c in &b.centers {
                    writeln!(w, "{} {}", c.x, c.y)?;
                }
            }
            Some(GenSet::Squares(s)) => {
                writeln!(w, "#squares {} {}", g.level, s.side)?;
                for c in &s.centers {
                    writeln!(w, "{} {}", c.x, c.y)?;
                }
            }
            None => {}
        }
        if !g.arcs.is_empty() {
            writeln!(w, "#arcs {}", g.level)?;
            for a in &g.arcs {
                match a.mid.tag {
                    Some(t) => writeln!(w, "{:e} {:e} {:e} {} {}", a.mid.x, a.mid.y, a.length, t.p, t.q)?,
                    None => writeln!(w, "{:e} {:e} {:e}", a.mid.x, a.mid.y, a.length)?,
                }
            }
        }
    }
    Ok(())
}

enum Section {
    Balls(usize, Rat, Vec<RatPoint>),
    Squares(usize, Rat, Vec<RatPoint>),
    Arcs(usize, Vec<Arc>),
}

fn parse_rat(s: &str, line: usize) -> Result<Rat> {
    Rat::from_str(s).map_err(|_| Error::Invalid(format!("line {line}: bad rational '{s}'")))
}

fn parse_num<T: FromStr>(s: Option<&str>, line: usize) -> Result<T> {
    s.and_then(|v| v.parse().ok()).ok_or_else(|| Error::Invalid(format!("line {line}: bad or missing number")))
}

pub fn read_generations<R: BufRead>(r: R) -> Result<Vec<Generation>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let ln = i + 1;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let mut it = t.split_whitespace();
        if let Some(head) = t.strip_prefix('#') {
            let mut h = head.split_whitespace();
            let kind = h.next().unwrap_or("");
            let level: usize = parse_num(h.next(), ln)?;
            match kind {
                "balls" => sections.push(Section::Balls(level, parse_rat(h.next().unwrap_or(""), ln)?, Vec::new())),
                "squares" => sections.push(Section::Squares(level, parse_rat(h.next().unwrap_or(""), ln)?, Vec::new())),
                "arcs" => sections.push(Section::Arcs(level, Vec::new())),
                _ => return Err(Error::Invalid(format!("line {ln}: unknown section '{kind}'"))),
            }
            continue;
        }
        match sections.last_mut() {
            Some(Section::Balls(_, _, v)) | Some(Section::Squares(_, _, v)) => {
                let x = parse_rat(it.next().unwrap_or(""), ln)?;
                let y = parse_rat(it.next().unwrap_or(""), ln)?;
                v.push(RatPoint::new(x, y));
            }
            Some(Section::Arcs(_, v)) => {
                let ex: f64 = parse_num(it.next(), ln)?;
                let ey: f64 = parse_num(it.next(), ln)?;
                let len: f64 = parse_num(it.next(), ln)?;
                let mid = match (it.next(), it.next()) {
                    (Some(p), Some(q)) => rational_direction(parse_num(Some(p), ln)?, parse_num(Some(q), ln)?)?,
                    _ => Direction::from_vector(ex, ey)?,
                };
                v.push(Arc::new(mid, len)?);
            }
            None => return Err(Error::Invalid(format!("line {ln}: data before any section header"))),
        }
    }
    let mut gens: Vec<Generation> = Vec::new();
    for s in sections {
        let (level, set, arcs) = match s {
            Section::Balls(l, r, c) => (l, Some(GenSet::Balls(BallUnion::new(c, r)?)), Vec::new()),
            Section::Squares(l, side, centers) => (l, Some(GenSet::Squares(SquareUnion { centers, side })), Vec::new()),
            Section::Arcs(l, a) => (l, None, a),
        };
        match gens.iter_mut().find(|g| g.level == level) {
            Some(g) => {
                if set.is_some() {
                    g.set = set;
                }
                g.arcs.extend(arcs);
            }
            None => gens.push(Generation { level, set, arcs }),
        }
    }
    Ok(gens)
}
