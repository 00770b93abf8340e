use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{CallbackError, Error, Result};
use crate::fitness::{BlackBoxFunction, GrayBoxFunction};

/// Unweighted MaxCut on a square `m x m` grid; maximization of the number of
/// cut edges. One subfunction per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxCut {
    side: usize,
    edges: Vec<(usize, usize)>,
}

impl MaxCut {
    /// Torus (grid with wrap-around): each cell `(r, c)` is joined to
    /// `((r + 1) mod m, c)` and `(r, (c + 1) mod m)`. Requires `m >= 3`.
    pub fn torus(side: usize) -> Result<Self> {
        if side < 3 {
            return Err(Error::config("torus MaxCut needs a grid side of at least 3"));
        }
        let id = |r: usize, c: usize| r * side + c;
        let mut edges = Vec::with_capacity(2 * side * side);
        for r in 0..side {
            for c in 0..side {
                edges.push((id(r, c), id((r + 1) % side, c)));
                edges.push((id(r, c), id(r, (c + 1) % side)));
            }
        }
        Ok(Self { side, edges })
    }

    pub fn from_edges(side: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = side * side;
        if n == 0 {
            return Err(Error::config("MaxCut instance has no vertices"));
        }
        if edges.is_empty() {
            return Err(Error::config("MaxCut instance has no edges"));
        }
        for &(u, v) in &edges {
            if u >= n || v >= n || u == v {
                return Err(Error::config(alloc::format!("invalid edge ({u}, {v}) for {n} vertices")));
            }
        }
        Ok(Self { side, edges })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn vertices(&self) -> usize {
        self.side * self.side
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Known optimum: for an even-sided torus every edge is cut by the
    /// checkerboard assignment.
    pub fn known_optimum(&self) -> Option<f64> {
        (self.side.is_multiple_of(2) && *self == Self::torus(self.side).ok()?).then_some(self.edges.len() as f64)
    }

    /// Instance text: the grid side `m` on the first line, then one
    /// zero-based `u v` edge per line.
    pub fn to_instance_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.side);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn parse_instance(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| Error::parse(1, "empty MaxCut instance"))?;
        let side: usize = first
            .trim()
            .parse()
            .map_err(|_| Error::parse(1, alloc::format!("expected grid side, found {first:?}")))?;
        let mut edges = Vec::new();
        for (no, line) in lines {
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => return Err(Error::parse(no + 1, alloc::format!("expected \"u v\", found {line:?}"))),
            }
        }
        Self::from_edges(side, edges).map_err(|e| match e {
            Error::Config(m) => Error::parse(0, m),
            other => other,
        })
    }
}

impl GrayBoxFunction<u8> for MaxCut {
    fn number_of_variables(&self) -> usize {
        self.vertices()
    }

    fn number_of_subfunctions(&self) -> usize {
        self.edges.len()
    }

    fn inputs_to_subfunction(&self, subfunction_index: usize) -> Vec<usize> {
        let (u, v) = self.edges[subfunction_index];
        vec![u, v]
    }

    fn subfunction(&self, subfunction_index: usize, x: &[u8]) -> Result<f64, CallbackError> {
        let (u, v) = self.edges[subfunction_index];
        Ok(if x[u] != x[v] { 1.0 } else { 0.0 })
    }
}

impl BlackBoxFunction<u8> for MaxCut {
    fn number_of_variables(&self) -> usize {
        self.vertices()
    }

    fn objective_function(&self, _objective_index: usize, x: &[u8]) -> Result<f64, CallbackError> {
        Ok(self.edges.iter().filter(|&&(u, v)| x[u] != x[v]).count() as f64)
    }
}
