//! Structural operations: subgraphs, quotients, tail gluing, stabilization,
//! forgetting a marked vertex and opening it into a hole.

use std::collections::BTreeMap;

use crate::enriched::UnionFind;
use crate::error::{Result, RibbonError};
use crate::metric::MetricRibbonGraph;
use crate::ribbon::{permutation_from_cycles, Markings, RibbonGraph};
use crate::scalar::ExactField;

/// Removes the edges flagged in `removed` and returns the induced vertex
/// permutation on the kept darts (renumbered in order) with the dart map.
///
/// The new face permutation is the first return of `sigma_inf` to the kept
/// darts, and the vertex permutation is recovered as `sigma_inf⁻¹ ∘ sigma1`.
pub(crate) fn contract_darts(g: &RibbonGraph, removed: &[bool]) -> (Vec<usize>, Vec<Option<usize>>) {
    let n = g.num_darts();
    let mut map = vec![None; n];
    let mut next = 0;
    for d in 0..n {
        if !removed[d / 2] {
            map[d] = Some(next);
            next += 1;
        }
    }
    let mut inf_inv = vec![0; next];
    for d in 0..n {
        let Some(nd) = map[d] else { continue };
        let mut x = g.sigma_inf(d);
        while removed[x / 2] {
            x = g.sigma_inf(x);
        }
        inf_inv[map[x].unwrap()] = nd;
    }
    let sigma0 = (0..next).map(|nd| inf_inv[nd ^ 1]).collect();
    (sigma0, map)
}

fn edge_flags(g: &RibbonGraph, edges: &[usize]) -> Result<Vec<bool>> {
    if edges.is_empty() {
        return Err(RibbonError::EmptySubset);
    }
    let mut flags = vec![false; g.num_edges()];
    for &e in edges {
        if e >= g.num_edges() {
            return Err(RibbonError::NoSuchEdge(e));
        }
        flags[e] = true;
    }
    Ok(flags)
}

/// The edges in `edges` with the first-return vertex order. Markings are
/// dropped and tails are allowed.
pub fn subgraph(g: &RibbonGraph, edges: &[usize]) -> Result<RibbonGraph> {
    let flags = edge_flags(g, edges)?;
    let mut map = vec![None; g.num_darts()];
    let mut next = 0;
    for d in 0..g.num_darts() {
        if flags[d / 2] {
            map[d] = Some(next);
            next += 1;
        }
    }
    let mut sigma0 = vec![0; next];
    for d in 0..g.num_darts() {
        let Some(nd) = map[d] else { continue };
        let mut x = g.sigma0(d);
        while !flags[x / 2] {
            x = g.sigma0(x);
        }
        sigma0[nd] = map[x].unwrap();
    }
    RibbonGraph::new(next, sigma0, Markings::default(), true)
}

/// True when the edges form no cycle in the underlying graph.
pub fn is_forest(g: &RibbonGraph, edges: &[usize]) -> bool {
    let v = g.vertex_orbits();
    let mut uf = UnionFind::new(v.len());
    edges.iter().all(|&e| uf.union(v.id[2 * e], v.id[2 * e + 1]))
}

/// Collapses the edges in `edges`. With `require_forest`, they must span a forest.
pub fn quotient(g: &RibbonGraph, edges: &[usize], require_forest: bool) -> Result<RibbonGraph> {
    quotient_with_map(g, edges, require_forest).map(|(q, _)| q)
}

/// Like [`quotient`], also returning the old-to-new dart map.
pub fn quotient_with_map(
    g: &RibbonGraph,
    edges: &[usize],
    require_forest: bool,
) -> Result<(RibbonGraph, Vec<Option<usize>>)> {
    let flags = edge_flags(g, edges)?;
    if flags.iter().all(|&f| f) {
        return Err(RibbonError::FullSubset);
    }
    if require_forest && !is_forest(g, edges) {
        return Err(RibbonError::NotAForest);
    }
    let (sigma0, map) = contract_darts(g, &flags);
    let holes = g.hole_orbits();
    let vertices = g.vertex_orbits();
    let mut uf = UnionFind::new(vertices.len());
    for (e, &f) in flags.iter().enumerate() {
        if f {
            uf.union(vertices.id[2 * e], vertices.id[2 * e + 1]);
        }
    }
    let mut markings = Markings::default();
    for (l, &rep) in g.hole_marking() {
        let d = holes.cycles[holes.id[rep]].iter().find_map(|&d| map[d]).ok_or_else(|| RibbonError::MarkingLost(l.clone()))?;
        markings.holes.insert(l.clone(), d);
    }
    for (l, &rep) in g.vertex_marking() {
        let root = uf.find(vertices.id[rep]);
        let d = (0..g.num_darts())
            .find(|&d| map[d].is_some() && uf.find(vertices.id[d]) == root)
            .and_then(|d| map[d])
            .ok_or_else(|| RibbonError::MarkingLost(l.clone()))?;
        markings.vertices.insert(l.clone(), d);
    }
    let q = RibbonGraph::new(sigma0.len(), sigma0, markings, g.allow_tails())?;
    Ok((q, map))
}

fn kept_lengths<T: ExactField>(lengths: &[T], map: &[Option<usize>]) -> Vec<T> {
    lengths.iter().enumerate().filter(|&(e, _)| map[2 * e].is_some()).map(|(_, l)| l.clone()).collect()
}

/// Contracts a non-loop edge, keeping the other lengths.
pub fn contract_edge<T: ExactField>(g: &MetricRibbonGraph<T>, edge: usize) -> Result<MetricRibbonGraph<T>> {
    let graph = g.graph();
    if edge >= graph.num_edges() {
        return Err(RibbonError::NoSuchEdge(edge));
    }
    if graph.is_loop(edge) {
        return Err(RibbonError::LoopEdge(edge));
    }
    let (q, map) = quotient_with_map(graph, &[edge], true)?;
    MetricRibbonGraph::new(q, kept_lengths(g.lengths(), &map))
}

/// Moves markings through a dart map, picking a surviving dart of each orbit.
fn transport_markings(g: &RibbonGraph, map: &[Option<usize>], skip: &[&str]) -> Result<Markings> {
    let holes = g.hole_orbits();
    let vertices = g.vertex_orbits();
    let mut out = Markings::default();
    for (l, &rep) in g.hole_marking() {
        if skip.contains(&l.as_str()) {
            continue;
        }
        let d = holes.cycles[holes.id[rep]].iter().find_map(|&d| map[d]).ok_or_else(|| RibbonError::MarkingLost(l.clone()))?;
        out.holes.insert(l.clone(), d);
    }
    for (l, &rep) in g.vertex_marking() {
        if skip.contains(&l.as_str()) {
            continue;
        }
        let d = vertices.cycles[vertices.id[rep]].iter().find_map(|&d| map[d]).ok_or_else(|| RibbonError::MarkingLost(l.clone()))?;
        out.vertices.insert(l.clone(), d);
    }
    Ok(out)
}

/// Glues two graphs along tails: the tips vanish and the two base darts form
/// one new edge, placed last, whose length is the sum of the tail lengths.
/// The holes around the tails merge; the merged hole takes `merged_label`,
/// or else the first existing label of the two.
pub fn glue_at_tails<T: ExactField>(
    g1: &MetricRibbonGraph<T>,
    tip1: usize,
    g2: &MetricRibbonGraph<T>,
    tip2: usize,
    merged_label: Option<&str>,
) -> Result<MetricRibbonGraph<T>> {
    let (a, b) = (g1.graph(), g2.graph());
    for (g, tip) in [(a, tip1), (b, tip2)] {
        if tip >= g.num_darts() {
            return Err(RibbonError::NoSuchDart(tip));
        }
        if g.sigma0(tip) != tip {
            return Err(RibbonError::NotATail(tip));
        }
    }
    let n = a.num_darts() + b.num_darts() - 2;
    let mut map1 = vec![None; a.num_darts()];
    let mut map2 = vec![None; b.num_darts()];
    let mut next = 0;
    for d in 0..a.num_darts() {
        if d / 2 != tip1 / 2 {
            map1[d] = Some(next);
            next += 1;
        }
    }
    for d in 0..b.num_darts() {
        if d / 2 != tip2 / 2 {
            map2[d] = Some(next);
            next += 1;
        }
    }
    map1[tip1 ^ 1] = Some(n - 2);
    map2[tip2 ^ 1] = Some(n - 1);
    let mut sigma0 = vec![0; n];
    for (g, map, tip) in [(a, &map1, tip1), (b, &map2, tip2)] {
        for d in 0..g.num_darts() {
            if d != tip {
                sigma0[map[d].unwrap()] = map[g.sigma0(d)].unwrap();
            }
        }
    }
    let h1 = a.hole_label_of(tip1).map(str::to_string);
    let h2 = b.hole_label_of(tip2).map(str::to_string);
    let merged = merged_label.map(str::to_string).or_else(|| h1.clone()).or_else(|| h2.clone());
    let mut markings = Markings::default();
    for (g, map, tip, h) in [(a, &map1, tip1, &h1), (b, &map2, tip2, &h2)] {
        let vlabel = g.vertex_label_of(tip).map(str::to_string);
        let skip: Vec<&str> = [h.as_deref(), vlabel.as_deref()].into_iter().flatten().collect();
        let part = transport_markings(g, map, &skip)?;
        for (l, d) in part.holes {
            if markings.holes.insert(l.clone(), d).is_some() {
                return Err(RibbonError::MarkingCollision { label: l });
            }
        }
        for (l, d) in part.vertices {
            if markings.vertices.insert(l.clone(), d).is_some() {
                return Err(RibbonError::MarkingCollision { label: l });
            }
        }
    }
    if let Some(l) = merged {
        if markings.holes.contains_key(&l) || markings.vertices.contains_key(&l) {
            return Err(RibbonError::MarkingCollision { label: l });
        }
        markings.holes.insert(l, n - 2);
    }
    let graph = RibbonGraph::new(n, sigma0, markings, a.allow_tails() || b.allow_tails())?;
    let mut ordered = vec![T::zero(); n / 2];
    for (g, map, lens, tip) in [(a, &map1, g1.lengths(), tip1), (b, &map2, g2.lengths(), tip2)] {
        for e in 0..g.num_edges() {
            if e != tip / 2 {
                ordered[map[2 * e].unwrap() / 2] = lens[e].clone();
            }
        }
    }
    ordered[n / 2 - 1] = g1.length(tip1 / 2).clone() + g2.length(tip2 / 2).clone();
    MetricRibbonGraph::new(graph, ordered)
}

/// The two fixed genus-one, one-hole, trivalent graphs used for stabilization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stabilizer {
    /// One tail, three trivalent vertices.
    S1,
    /// Two tails, four trivalent vertices.
    S2,
}

impl Stabilizer {
    /// The fixed graph with unit lengths and the tip that gets glued.
    pub fn graph<T: ExactField>(self) -> (MetricRibbonGraph<T>, usize) {
        let (n, cycles): (usize, &[&[usize]]) = match self {
            Stabilizer::S1 => (10, &[&[0, 2, 4], &[7, 3, 5], &[1, 6, 8]]),
            Stabilizer::S2 => (14, &[&[0, 2, 4], &[7, 11, 5], &[1, 6, 8], &[3, 10, 12]]),
        };
        let sigma0 = permutation_from_cycles(n, cycles).expect("fixed table");
        let g = RibbonGraph::new(n, sigma0, Markings::default(), true).expect("fixed table");
        (MetricRibbonGraph::unit(g), 9)
    }
}

/// Glues the fixed graph of `generator` onto the unique tail of `g`.
/// The merged hole keeps the label of the tail's hole, or is labeled `t`.
pub fn stabilize<T: ExactField>(g: &MetricRibbonGraph<T>, generator: Stabilizer) -> Result<MetricRibbonGraph<T>> {
    let tips = g.graph().tail_tips();
    let tip = match tips.as_slice() {
        [] => return Err(RibbonError::NoTail),
        [t] => *t,
        _ => return Err(RibbonError::MultipleTails),
    };
    let (fixed, v_tip) = generator.graph::<T>();
    let label = g.graph().hole_label_of(tip).unwrap_or("t").to_string();
    glue_at_tails(g, tip, &fixed, v_tip, Some(&label))
}

/// Forgets the vertex label `t`: dropped at valence three or more, two edges
/// merged at valence two, the supporting edge contracted at valence one.
pub fn forget_univalent<T: ExactField>(g: &MetricRibbonGraph<T>, t: &str) -> Result<MetricRibbonGraph<T>> {
    let graph = g.graph();
    let &rep = graph.vertex_marking().get(t).ok_or_else(|| RibbonError::LabelNotOnVertex(t.to_string()))?;
    let orbits = graph.vertex_orbits();
    let cyc = orbits.cycles[orbits.id[rep]].clone();
    let mut markings = graph.markings();
    markings.vertices.remove(t);
    match cyc.len() {
        1 => {
            let (q, map) = quotient_with_map(graph, &[rep / 2], true)?;
            let mut marks = q.markings();
            marks.vertices.remove(t);
            MetricRibbonGraph::new(q.with_markings(marks)?, kept_lengths(g.lengths(), &map))
        }
        2 => {
            let (a, b) = (cyc[0], cyc[1]);
            if b == a ^ 1 {
                return Err(RibbonError::LoopEdge(a / 2));
            }
            let (ea, eb) = (a / 2, b / 2);
            let n = graph.num_darts() - 2;
            let mut map = vec![None; graph.num_darts()];
            let mut next = 0;
            for d in 0..graph.num_darts() {
                if d / 2 != ea && d / 2 != eb {
                    map[d] = Some(next);
                    next += 1;
                }
            }
            map[a ^ 1] = Some(n - 2);
            map[b ^ 1] = Some(n - 1);
            let mut sigma0 = vec![0; n];
            for d in 0..graph.num_darts() {
                if d != a && d != b {
                    sigma0[map[d].unwrap()] = map[graph.sigma0(d)].unwrap();
                }
            }
            let marks = transport_markings(graph, &map, &[t])?;
            let q = RibbonGraph::new(n, sigma0, marks, graph.allow_tails())?;
            let mut lengths: Vec<T> = Vec::with_capacity(n / 2);
            for e in 0..graph.num_edges() {
                if e != ea && e != eb {
                    lengths.push(g.length(e).clone());
                }
            }
            lengths.push(g.length(ea).clone() + g.length(eb).clone());
            MetricRibbonGraph::new(q, lengths)
        }
        _ => MetricRibbonGraph::new(graph.with_markings(markings)?, g.lengths().to_vec()),
    }
}

/// Replaces the univalent vertex labeled `t` by a loop of length `eps`
/// bounding a new one-sided hole labeled `t`.
pub fn open_univalent_vertex<T: ExactField>(g: &MetricRibbonGraph<T>, t: &str, eps: &T) -> Result<MetricRibbonGraph<T>> {
    if !eps.is_positive() {
        return Err(RibbonError::NonPositiveLength);
    }
    let graph = g.graph();
    let &tip = graph.vertex_marking().get(t).ok_or_else(|| RibbonError::LabelNotOnVertex(t.to_string()))?;
    if graph.sigma0(tip) != tip {
        return Err(RibbonError::NotUnivalent(t.to_string()));
    }
    let n = graph.num_darts();
    let mut sigma0 = graph.sigma0_array().to_vec();
    sigma0.extend([n + 1, tip]);
    sigma0[tip] = n;
    let mut markings = graph.markings();
    markings.vertices.remove(t);
    markings.holes.insert(t.to_string(), n + 1);
    let q = RibbonGraph::new(n + 2, sigma0, markings, graph.allow_tails())?;
    let mut lengths = g.lengths().to_vec();
    lengths.push(eps.clone());
    MetricRibbonGraph::new(q, lengths)
}

/// Inverse of [`open_univalent_vertex`]: collapses the loop bounding the
/// one-sided hole `t` and marks the resulting vertex with `t`.
pub fn close_hole<T: ExactField>(g: &MetricRibbonGraph<T>, t: &str) -> Result<MetricRibbonGraph<T>> {
    let graph = g.graph();
    let &h = graph.hole_marking().get(t).ok_or_else(|| RibbonError::LabelNotOnHole(t.to_string()))?;
    let x = h ^ 1;
    if graph.sigma_inf(h) != h || graph.sigma0(x) != h || graph.sigma0(h) == x {
        return Err(RibbonError::NotAMonogon(t.to_string()));
    }
    let e = h / 2;
    let mut map = vec![None; graph.num_darts()];
    let mut next = 0;
    for d in 0..graph.num_darts() {
        if d / 2 != e {
            map[d] = Some(next);
            next += 1;
        }
    }
    let mut sigma0 = vec![0; next];
    for d in 0..graph.num_darts() {
        let Some(nd) = map[d] else { continue };
        let mut y = graph.sigma0(d);
        while y / 2 == e {
            y = graph.sigma0(y);
        }
        sigma0[nd] = map[y].unwrap();
    }
    let mut markings = graph.markings();
    markings.holes.remove(t);
    let mut marks = transport_markings(&graph.with_markings(markings)?, &map, &[])?;
    marks.vertices.insert(t.to_string(), map[graph.sigma0(h)].unwrap());
    let q = RibbonGraph::new(next, sigma0, marks, graph.allow_tails())?;
    MetricRibbonGraph::new(q, kept_lengths(g.lengths(), &map))
}

/// Number of vertices of each valence, for bookkeeping comparisons.
pub fn valence_histogram(g: &RibbonGraph) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for c in g.vertices() {
        *m.entry(c.len()).or_insert(0) += 1;
    }
    m
}
