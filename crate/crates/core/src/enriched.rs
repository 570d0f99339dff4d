//! Enriched ribbon graphs: visible components glued along a bicolored graph
//! whose other colour class consists of invisible genus-labeled vertices.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Result, RibbonError};
use crate::ops::contract_darts;
use crate::ribbon::{Markings, RibbonGraph};

/// One end of an edge of the bicolored graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeEnd {
    /// A special vertex of the visible graph, named by its smallest dart.
    Visible(usize),
    /// An invisible vertex, by index.
    Invisible(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvisibleVertex {
    pub genus: u32,
    pub labels: BTreeSet<String>,
}

/// Visible part, invisible vertices and the edges of the bicolored graph.
///
/// The visible part is one ribbon graph whose connected components are the
/// visible vertices of the bicolored graph. Vertex markings of the visible
/// graph are marked points on special vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EnrichedRibbonGraph {
    visible: RibbonGraph,
    invisible: Vec<InvisibleVertex>,
    zeta: Vec<(NodeEnd, NodeEnd)>,
}

impl EnrichedRibbonGraph {
    /// Validated constructor.
    pub fn new(visible: RibbonGraph, invisible: Vec<InvisibleVertex>, zeta: Vec<(NodeEnd, NodeEnd)>) -> Result<Self> {
        let g = Self::assemble(visible, invisible, zeta)?;
        g.validate()?;
        Ok(g)
    }

    /// A nonsingular cell: one visible component and nothing else.
    pub fn from_nonsingular(g: RibbonGraph) -> Result<Self> {
        if !g.is_connected() || g.num_darts() == 0 {
            return Err(RibbonError::Disconnected);
        }
        Self::new(g, Vec::new(), Vec::new())
    }

    fn assemble(visible: RibbonGraph, invisible: Vec<InvisibleVertex>, zeta: Vec<(NodeEnd, NodeEnd)>) -> Result<Self> {
        let visible = if visible.allow_tails() { visible } else { visible.with_allow_tails(true)? };
        let orbits = visible.vertex_orbits();
        let norm = |e: NodeEnd| -> Result<NodeEnd> {
            match e {
                NodeEnd::Visible(d) if d < visible.num_darts() => Ok(NodeEnd::Visible(orbits.rep(d))),
                NodeEnd::Visible(d) => Err(RibbonError::NoSuchDart(d)),
                NodeEnd::Invisible(i) if i < invisible.len() => Ok(e),
                NodeEnd::Invisible(i) => Err(RibbonError::InvalidEnriched(format!("no invisible vertex {i}"))),
            }
        };
        let mut z = Vec::with_capacity(zeta.len());
        for (a, b) in zeta {
            let (a, b) = (norm(a)?, norm(b)?);
            z.push(if a <= b { (a, b) } else { (b, a) });
        }
        z.sort();
        Ok(EnrichedRibbonGraph { visible, invisible, zeta: z })
    }

    pub fn visible(&self) -> &RibbonGraph {
        &self.visible
    }

    pub fn invisible(&self) -> &[InvisibleVertex] {
        &self.invisible
    }

    pub fn zeta(&self) -> &[(NodeEnd, NodeEnd)] {
        &self.zeta
    }

    pub fn is_nonsingular(&self) -> bool {
        self.invisible.is_empty() && self.zeta.is_empty() && self.visible.is_connected()
    }

    /// Number of bicolored-graph edge ends at each visible vertex, keyed by smallest dart.
    pub fn node_ends(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for (a, b) in &self.zeta {
            for e in [a, b] {
                if let NodeEnd::Visible(d) = e {
                    *m.entry(*d).or_insert(0) += 1;
                }
            }
        }
        m
    }

    /// Visible vertices (by smallest dart) carrying a node or a marked point.
    pub fn special_vertices(&self) -> BTreeSet<usize> {
        let mut s: BTreeSet<usize> = self.node_ends().into_keys().collect();
        s.extend(self.visible.vertex_marking().values().copied());
        s
    }

    /// Every label: hole labels, marked points and invisible labels.
    pub fn labels(&self) -> BTreeSet<String> {
        let mut s: BTreeSet<String> = self.visible.hole_marking().keys().cloned().collect();
        s.extend(self.visible.vertex_marking().keys().cloned());
        for w in &self.invisible {
            s.extend(w.labels.iter().cloned());
        }
        s
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(RibbonError::InvalidEnriched(m.to_string()));
        let g = &self.visible;
        let orbits = g.vertex_orbits();
        let ends = self.node_ends();
        let marked: BTreeSet<usize> = g.vertex_marking().values().copied().collect();
        for (rep, &k) in &ends {
            if k > 1 || marked.contains(rep) {
                return bad("more than one decoration at a vertex");
            }
        }
        for cyc in &orbits.cycles {
            let special = ends.contains_key(&cyc[0]) || marked.contains(&cyc[0]);
            if !special && cyc.len() < 3 {
                return Err(RibbonError::ValenceTooLow { dart: cyc[0] });
            }
        }
        let mut seen = BTreeSet::new();
        for w in &self.invisible {
            for l in &w.labels {
                if !seen.insert(l.clone()) {
                    return Err(RibbonError::MarkingCollision { label: l.clone() });
                }
            }
        }
        for l in g.hole_marking().keys().chain(g.vertex_marking().keys()) {
            if !seen.insert(l.clone()) {
                return Err(RibbonError::MarkingCollision { label: l.clone() });
            }
        }
        let comps = g.component_darts();
        if comps.is_empty() {
            return bad("no visible component");
        }
        let comp_of = component_index(g.num_darts(), &comps);
        let nv = comps.len() + self.invisible.len();
        let node = |e: &NodeEnd| match e {
            NodeEnd::Visible(d) => comp_of[*d],
            NodeEnd::Invisible(i) => comps.len() + i,
        };
        let mut degree = vec![0usize; nv];
        let mut uf = UnionFind::new(nv);
        for (a, b) in &self.zeta {
            degree[node(a)] += 1;
            degree[node(b)] += 1;
            uf.union(node(a), node(b));
        }
        if (0..nv).any(|v| uf.find(v) != uf.find(0)) {
            return Err(RibbonError::Disconnected);
        }
        for (c, darts) in comps.iter().enumerate() {
            let (sub, _) = g.restrict(darts);
            let points = sub.num_holes() + sub.vertex_marking().len() + degree[c];
            if 2 * sub.genus_unchecked() as usize + points <= 2 {
                return bad("unstable visible component");
            }
        }
        for (i, w) in self.invisible.iter().enumerate() {
            if 2 * w.genus as usize + w.labels.len() + degree[comps.len() + i] <= 2 {
                return bad("unstable invisible vertex");
            }
        }
        Ok(())
    }

    /// `1 - χ(ζ) + Σ g(G_v) + Σ g(w)`.
    pub fn total_genus(&self) -> Result<u32> {
        let comps = self.visible.component_darts();
        let nodes = (comps.len() + self.invisible.len()) as i64;
        let chi = nodes - self.zeta.len() as i64;
        let mut g: i64 = 1 - chi;
        for c in &comps {
            g += self.visible.restrict(c).0.genus_unchecked() as i64;
        }
        g += self.invisible.iter().map(|w| w.genus as i64).sum::<i64>();
        if g < 0 {
            return Err(RibbonError::Disconnected);
        }
        Ok(g as u32)
    }

    /// Merges adjacent invisible vertices and absorbs invisible loops.
    pub fn reduce_bicolored(&self) -> EnrichedRibbonGraph {
        let k = self.invisible.len();
        let mut uf = UnionFind::new(k);
        for (a, b) in &self.zeta {
            if let (NodeEnd::Invisible(i), NodeEnd::Invisible(j)) = (a, b) {
                uf.union(*i, *j);
            }
        }
        let mut class_index = BTreeMap::new();
        for i in 0..k {
            let n = class_index.len();
            class_index.entry(uf.find(i)).or_insert(n);
        }
        let cls: Vec<usize> = (0..k).map(|i| class_index[&uf.find(i)]).collect();
        let mut merged = vec![InvisibleVertex { genus: 0, labels: BTreeSet::new() }; class_index.len()];
        let mut members = vec![0i64; merged.len()];
        let mut internal = vec![0i64; merged.len()];
        for (i, w) in self.invisible.iter().enumerate() {
            let c = cls[i];
            merged[c].genus += w.genus;
            merged[c].labels.extend(w.labels.iter().cloned());
            members[c] += 1;
        }
        let mut zeta = Vec::new();
        for &(a, b) in &self.zeta {
            let remap = |e: NodeEnd| match e {
                NodeEnd::Invisible(i) => NodeEnd::Invisible(cls[i]),
                v => v,
            };
            match (remap(a), remap(b)) {
                (NodeEnd::Invisible(i), NodeEnd::Invisible(j)) => {
                    debug_assert_eq!(i, j);
                    internal[i] += 1;
                }
                (x, y) => zeta.push((x, y)),
            }
        }
        for c in 0..merged.len() {
            merged[c].genus = (merged[c].genus as i64 + internal[c] - members[c] + 1) as u32;
        }
        Self::assemble(self.visible.clone(), merged, zeta).expect("reduction keeps the graph well formed")
    }

    /// True when no invisible vertices are adjacent and none carries a loop.
    pub fn is_reduced(&self) -> bool {
        !self.zeta.iter().any(|e| matches!(e, (NodeEnd::Invisible(_), NodeEnd::Invisible(_))))
    }

    /// Elementary contraction of a visible edge followed by reduction.
    /// Returns the new graph and the old-to-new map of visible edges.
    pub fn contract(&self, edge: usize) -> Result<(EnrichedRibbonGraph, Vec<Option<usize>>)> {
        let g = &self.visible;
        if edge >= g.num_edges() {
            return Err(RibbonError::NoSuchEdge(edge));
        }
        let (x, y) = (2 * edge, 2 * edge + 1);
        let vorb = g.vertex_orbits();
        let comps = g.component_darts();
        let comp = comps.iter().position(|c| c.contains(&x)).unwrap();
        let ends = self.node_ends();
        let vlabel: BTreeMap<usize, String> = g.vertex_marking().iter().map(|(l, &d)| (d, l.clone())).collect();
        let decorated = |d: usize| {
            let r = vorb.rep(d);
            ends.contains_key(&r) || vlabel.contains_key(&r)
        };

        if comps[comp].len() == 2 {
            if comps.len() == 1 {
                return Err(RibbonError::LastEdgeOfLastComponent);
            }
            let (sub, _) = g.restrict(&comps[comp]);
            let mut labels: BTreeSet<String> = sub.hole_marking().keys().cloned().collect();
            labels.extend(sub.vertex_marking().keys().cloned());
            let w = self.invisible.len();
            let rest: Vec<usize> = comps.iter().enumerate().filter(|&(i, _)| i != comp).flat_map(|(_, c)| c.clone()).collect();
            let (vis, map) = g.restrict(&rest);
            let mut invisible = self.invisible.clone();
            invisible.push(InvisibleVertex { genus: sub.genus_unchecked(), labels });
            let zeta = self
                .zeta
                .iter()
                .map(|&(a, b)| {
                    let f = |e: NodeEnd| match e {
                        NodeEnd::Visible(d) => map[d].map_or(NodeEnd::Invisible(w), NodeEnd::Visible),
                        v => v,
                    };
                    (f(a), f(b))
                })
                .collect();
            let out = Self::assemble(vis, invisible, zeta)?.reduce_bicolored();
            return Ok((out, edge_map(&map)));
        }

        let mut removed = vec![false; g.num_edges()];
        removed[edge] = true;
        let (sigma0, map) = contract_darts(g, &removed);
        let nd = sigma0.len();
        let old_holes = g.hole_orbits();
        let mut markings = Markings::default();
        let mut lost_holes = Vec::new();
        for (l, &rep) in g.hole_marking() {
            let cyc = &old_holes.cycles[old_holes.id[rep]];
            match cyc.iter().find_map(|&d| map[d]) {
                Some(nd) => {
                    markings.holes.insert(l.clone(), nd);
                }
                None => lost_holes.push(l.clone()),
            }
        }
        let u = vorb.id[x];
        let v = vorb.id[y];
        for (&rep, l) in &vlabel {
            if vorb.id[rep] != u && vorb.id[rep] != v {
                markings.vertices.insert(l.clone(), map[rep].unwrap());
            }
        }
        let survivor = |vid: usize| vorb.cycles[vid].iter().find_map(|&d| map[d]);
        let mut invisible = self.invisible.clone();
        let mut new_edges = Vec::new();
        let moved_to: NodeEnd;

        if u != v {
            let m = survivor(u).or_else(|| survivor(v)).expect("non-loop edge in a larger component");
            if decorated(x) && decorated(y) {
                let w = invisible.len();
                let labels = [u, v].iter().filter_map(|&k| vlabel.get(&vorb.cycles[k][0]).cloned()).collect();
                invisible.push(InvisibleVertex { genus: 0, labels });
                new_edges.push((NodeEnd::Visible(m), NodeEnd::Invisible(w)));
                moved_to = NodeEnd::Invisible(w);
            } else {
                for k in [u, v] {
                    if let Some(l) = vlabel.get(&vorb.cycles[k][0]) {
                        markings.vertices.insert(l.clone(), m);
                    }
                }
                moved_to = NodeEnd::Visible(m);
            }
        } else {
            let side = |start: usize, stop: usize| {
                let mut out = Vec::new();
                let mut d = g.sigma0(start);
                while d != stop {
                    out.push(map[d].unwrap());
                    d = g.sigma0(d);
                }
                out
            };
            let a_side = side(x, y);
            let b_side = side(y, x);
            let sides: Vec<usize> = [a_side.first(), b_side.first()].into_iter().flatten().copied().collect();
            if !decorated(x) {
                if sides.len() == 2 {
                    new_edges.push((NodeEnd::Visible(sides[0]), NodeEnd::Visible(sides[1])));
                } else if let Some(l) = lost_holes.pop() {
                    markings.vertices.insert(l, sides[0]);
                }
                moved_to = NodeEnd::Visible(sides[0]);
            } else {
                let w = invisible.len();
                let mut labels: BTreeSet<String> = lost_holes.drain(..).collect();
                if let Some(l) = vlabel.get(&vorb.cycles[u][0]) {
                    labels.insert(l.clone());
                }
                invisible.push(InvisibleVertex { genus: 0, labels });
                for &s in &sides {
                    new_edges.push((NodeEnd::Visible(s), NodeEnd::Invisible(w)));
                }
                moved_to = NodeEnd::Invisible(w);
            }
        }
        if let Some(l) = lost_holes.first() {
            return Err(RibbonError::MarkingLost(l.clone()));
        }

        let mut zeta: Vec<(NodeEnd, NodeEnd)> = self
            .zeta
            .iter()
            .map(|&(a, b)| {
                let f = |e: NodeEnd| match e {
                    NodeEnd::Visible(d) if vorb.id[d] == u || vorb.id[d] == v => moved_to,
                    NodeEnd::Visible(d) => NodeEnd::Visible(map[d].unwrap()),
                    w => w,
                };
                (f(a), f(b))
            })
            .collect();
        zeta.extend(new_edges);
        let vis = RibbonGraph::new(nd, sigma0, markings, true)?;
        let out = Self::assemble(vis, invisible, zeta)?.reduce_bicolored();
        Ok((out, edge_map(&map)))
    }

    pub(crate) fn from_parts_unchecked(
        visible: RibbonGraph,
        invisible: Vec<InvisibleVertex>,
        zeta: Vec<(NodeEnd, NodeEnd)>,
    ) -> Result<Self> {
        Self::assemble(visible, invisible, zeta)
    }

    /// Checks the structural invariants without constructing a new value.
    pub fn check(&self) -> Result<()> {
        self.validate()
    }
}

fn edge_map(dart_map: &[Option<usize>]) -> Vec<Option<usize>> {
    dart_map.chunks(2).map(|p| p[0].map(|d| d / 2)).collect()
}

pub(crate) fn component_index(n: usize, comps: &[Vec<usize>]) -> Vec<usize> {
    let mut idx = vec![0; n];
    for (c, darts) in comps.iter().enumerate() {
        for &d in darts {
            idx[d] = c;
        }
    }
    idx
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    /// Returns false when the two were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}
