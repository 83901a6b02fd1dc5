//! The strip `Z x {0..width-1}` with rungs. It is quasi-isometric to a line,
//! and its translations have one parallel axis per row.

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::isometry::Isometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LadderGraph {
    width: i32,
}

pub fn build_ladder(width: usize) -> Result<LadderGraph> {
    if width < 2 {
        return Err(Error::InvariantViolation(format!(
            "ladder width must be at least 2, got {width}"
        )));
    }
    Ok(LadderGraph {
        width: width as i32,
    })
}

impl LadderGraph {
    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn vertex(i: i32, s: i32) -> Vertex {
        Vertex::new(vec![i, s])
    }
}

impl Graph for LadderGraph {
    fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        let (i, s) = (v.code()[0], v.code()[1]);
        let mut out = vec![LadderGraph::vertex(i - 1, s)];
        if s > 0 {
            out.push(LadderGraph::vertex(i, s - 1));
        }
        if s + 1 < self.width {
            out.push(LadderGraph::vertex(i, s + 1));
        }
        out.push(LadderGraph::vertex(i + 1, s));
        out
    }

    fn basepoint(&self) -> Vertex {
        LadderGraph::vertex(0, 0)
    }

    fn contains(&self, v: &Vertex) -> bool {
        matches!(v.code(), [_, s] if (0..self.width).contains(s))
    }

    fn exact_distance(&self, u: &Vertex, v: &Vertex) -> Option<usize> {
        let (a, b) = (u.code(), v.code());
        Some(((a[0] - b[0]).abs() + (a[1] - b[1]).abs()) as usize)
    }

    fn has_exact_distance(&self) -> bool {
        true
    }

    fn format_vertex(&self, v: &Vertex) -> String {
        format!("{}.{}", v.code()[0], v.code()[1])
    }

    fn parse_vertex(&self, s: &str) -> Result<Vertex> {
        let bad = || Error::ParseError {
            line: 0,
            reason: format!("ladder vertex {s:?} is not of the form i.s"),
        };
        let (i, r) = s.split_once('.').ok_or_else(bad)?;
        let v = LadderGraph::vertex(
            i.trim().parse().map_err(|_| bad())?,
            r.trim().parse().map_err(|_| bad())?,
        );
        if self.contains(&v) {
            Ok(v)
        } else {
            Err(bad())
        }
    }

    fn name(&self) -> String {
        format!("ladder:{}", self.width)
    }
}

/// `(i, s) -> (i + step, s)`, or with the rows reflected when `flip` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LadderMove {
    pub width: i32,
    pub step: i32,
    pub flip: bool,
}

impl LadderMove {
    pub fn shift(ladder: &LadderGraph, step: i32) -> Self {
        LadderMove {
            width: ladder.width,
            step,
            flip: false,
        }
    }

    pub fn glide(ladder: &LadderGraph, step: i32) -> Self {
        LadderMove {
            width: ladder.width,
            step,
            flip: true,
        }
    }
}

impl Isometry for LadderMove {
    fn forward(&self, v: &Vertex) -> Vertex {
        let (i, s) = (v.code()[0], v.code()[1]);
        LadderGraph::vertex(
            i + self.step,
            if self.flip { self.width - 1 - s } else { s },
        )
    }
    fn backward(&self, v: &Vertex) -> Vertex {
        let (i, s) = (v.code()[0], v.code()[1]);
        LadderGraph::vertex(
            i - self.step,
            if self.flip { self.width - 1 - s } else { s },
        )
    }
    fn label(&self) -> String {
        format!(
            "{}:{}",
            if self.flip { "glide" } else { "shift" },
            self.step
        )
    }
}
