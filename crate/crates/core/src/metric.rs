//! Metric ribbon graphs, perimeters, curve lengths and the combinatorial systole.

use crate::error::{Result, RibbonError};
use crate::ribbon::RibbonGraph;
use crate::scalar::ExactField;

/// A ribbon graph with a positive length on every edge.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricRibbonGraph<T> {
    graph: RibbonGraph,
    lengths: Vec<T>,
}

/// Result of a bounded systole search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Systole<T> {
    Finite(T),
    /// No non-peripheral closed path within the bound.
    Unbounded,
}

impl<T: ExactField> MetricRibbonGraph<T> {
    pub fn new(graph: RibbonGraph, lengths: Vec<T>) -> Result<Self> {
        if lengths.len() != graph.num_edges() {
            return Err(RibbonError::LengthMismatch { expected: graph.num_edges(), got: lengths.len() });
        }
        if lengths.iter().any(|l| !l.is_positive()) {
            return Err(RibbonError::NonPositiveLength);
        }
        Ok(MetricRibbonGraph { graph, lengths })
    }

    /// Every edge of length one.
    pub fn unit(graph: RibbonGraph) -> Self {
        let lengths = vec![T::one(); graph.num_edges()];
        MetricRibbonGraph { graph, lengths }
    }

    pub fn graph(&self) -> &RibbonGraph {
        &self.graph
    }

    pub fn lengths(&self) -> &[T] {
        &self.lengths
    }

    pub fn length(&self, edge: usize) -> &T {
        &self.lengths[edge]
    }

    /// Perimeter of every hole, in the order of [`RibbonGraph::holes`].
    pub fn perimeters(&self) -> Vec<T> {
        self.hole_perimeters(&self.graph.holes())
    }

    /// Perimeters in the order of [`RibbonGraph::ordered_holes`].
    pub fn ordered_perimeters(&self) -> Vec<T> {
        self.hole_perimeters(&self.graph.ordered_holes())
    }

    fn hole_perimeters(&self, holes: &[Vec<usize>]) -> Vec<T> {
        holes
            .iter()
            .map(|h| h.iter().fold(T::zero(), |acc, &d| acc + self.lengths[d / 2].clone()))
            .collect()
    }

    pub fn total_length(&self) -> T {
        self.lengths.iter().fold(T::zero(), |a, l| a + l.clone())
    }

    pub fn scaled(&self, c: &T) -> Result<Self> {
        MetricRibbonGraph::new(self.graph.clone(), self.lengths.iter().map(|l| l.clone() * c.clone()).collect())
    }

    /// Length of a closed, cyclically reduced dart path.
    pub fn curve_length(&self, path: &[usize]) -> Result<T> {
        let g = &self.graph;
        if let Some(&d) = path.iter().find(|&&d| d >= g.num_darts()) {
            return Err(RibbonError::NoSuchDart(d));
        }
        if path.is_empty() {
            return Err(RibbonError::NotClosed);
        }
        let v = g.vertex_orbits();
        for (j, &d) in path.iter().enumerate() {
            let next = path[(j + 1) % path.len()];
            if v.id[d ^ 1] != v.id[next] {
                return Err(RibbonError::NotClosed);
            }
        }
        for (j, &d) in path.iter().enumerate() {
            if path[(j + 1) % path.len()] == d ^ 1 {
                return Err(RibbonError::NotReduced);
            }
        }
        Ok(path.iter().fold(T::zero(), |acc, &d| acc + self.lengths[d / 2].clone()))
    }

    /// Shortest non-peripheral cyclically reduced closed path with at most
    /// `edge_bound` edges.
    pub fn systole_bounded(&self, edge_bound: usize) -> Systole<T> {
        let g = &self.graph;
        let orbits = g.vertex_orbits();
        let boundaries: Vec<Vec<usize>> = g
            .holes()
            .iter()
            .map(|h| cyclic_reduce(&h.iter().rev().copied().collect::<Vec<_>>()))
            .filter(|w| !w.is_empty())
            .collect();
        let mut search = SystoleSearch {
            metric: self,
            orbits: &orbits,
            boundaries: &boundaries,
            bound: edge_bound,
            best: None,
            path: Vec::new(),
        };
        for s in 0..g.num_darts() {
            search.path.clear();
            search.path.push(s);
            let len = self.lengths[s / 2].clone();
            search.extend(len);
        }
        match search.best {
            Some(b) => Systole::Finite(b),
            None => Systole::Unbounded,
        }
    }

    /// Systole with the default bound of twice the edge count.
    pub fn systole(&self) -> Systole<T> {
        self.systole_bounded(2 * self.graph.num_edges())
    }
}

struct SystoleSearch<'a, T> {
    metric: &'a MetricRibbonGraph<T>,
    orbits: &'a crate::ribbon::Orbits,
    boundaries: &'a [Vec<usize>],
    bound: usize,
    best: Option<T>,
    path: Vec<usize>,
}

impl<T: ExactField> SystoleSearch<'_, T> {
    fn extend(&mut self, len: T) {
        if let Some(b) = &self.best {
            if len >= *b {
                return;
            }
        }
        let first = self.path[0];
        let last = *self.path.last().unwrap();
        let head = self.orbits.id[last ^ 1];
        if head == self.orbits.id[first] && first != last ^ 1 && !self.is_peripheral() {
            self.best = Some(len.clone());
            return;
        }
        if self.path.len() == self.bound {
            return;
        }
        let vertex = self.orbits.cycles[head].clone();
        for d in vertex {
            if d == last ^ 1 {
                continue;
            }
            self.path.push(d);
            let next = len.clone() + self.metric.lengths[d / 2].clone();
            self.extend(next);
            self.path.pop();
        }
    }

    fn is_peripheral(&self) -> bool {
        let c = &self.path;
        self.boundaries.iter().any(|w| is_rotation_of_power(c, w) || is_rotation_of_power(c, &inverse_word(w)))
    }
}

fn inverse_word(w: &[usize]) -> Vec<usize> {
    w.iter().rev().map(|d| d ^ 1).collect()
}

/// Removes backtracks `d, d^1`, including across the cyclic seam.
pub fn cyclic_reduce(w: &[usize]) -> Vec<usize> {
    let mut stack: Vec<usize> = Vec::with_capacity(w.len());
    for &d in w {
        if stack.last() == Some(&(d ^ 1)) {
            stack.pop();
        } else {
            stack.push(d);
        }
    }
    let mut lo = 0;
    let mut hi = stack.len();
    while hi - lo >= 2 && stack[hi - 1] == stack[lo] ^ 1 {
        lo += 1;
        hi -= 1;
    }
    stack[lo..hi].to_vec()
}

fn is_rotation_of_power(c: &[usize], w: &[usize]) -> bool {
    if w.is_empty() || c.len() % w.len() != 0 {
        return false;
    }
    let n = c.len();
    (0..w.len()).any(|shift| (0..n).all(|i| c[(i + shift) % n] == w[i % w.len()]))
}
