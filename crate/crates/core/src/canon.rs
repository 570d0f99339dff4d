//! Canonical codes, isomorphism tests and automorphism counts.
//!
//! A rooted code is produced by a breadth-first traversal from a root dart:
//! the root gets label 0, its partner label 1, and each dart reached through
//! `sigma0` for the first time gets the next even label with its partner
//! next to it. The code lists the `sigma0` images in label order followed by
//! a vertex colour and a hole colour per dart. The canonical code is the
//! lexicographic minimum over roots, and the number of roots achieving it is
//! the order of the automorphism group.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::enriched::{EnrichedRibbonGraph, InvisibleVertex, NodeEnd};
use crate::error::{Result, RibbonError};
use crate::linalg::permutation_sign;
use crate::ribbon::RibbonGraph;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalCode {
    pub code: Vec<u32>,
    /// Sorted labels; colours in `code` index into this list.
    pub labels: Vec<String>,
    pub aut_order: usize,
}

impl CanonicalCode {
    /// Compact text form used in reports.
    pub fn to_key(&self) -> String {
        let nums: Vec<String> = self.code.iter().map(|c| c.to_string()).collect();
        format!("{}|{}", nums.join("."), self.labels.join(","))
    }
}

/// Canonical relabeling of a connected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub code: CanonicalCode,
    pub graph: RibbonGraph,
    /// `dart_map[old] = new`.
    pub dart_map: Vec<usize>,
}

pub(crate) struct DartColours {
    vertex: Vec<u32>,
    hole: Vec<u32>,
}

impl DartColours {
    pub(crate) fn of(g: &RibbonGraph, labels: &[String], special: &[usize]) -> Self {
        let index = |l: &String| labels.binary_search(l).expect("label listed") as u32;
        let vorb = g.vertex_orbits();
        let horb = g.hole_orbits();
        let mut vcol = vec![0u32; vorb.len()];
        for &d in special {
            vcol[vorb.id[d]] = 1;
        }
        for (l, &d) in g.vertex_marking() {
            vcol[vorb.id[d]] = 2 + index(l);
        }
        let mut hcol = vec![0u32; horb.len()];
        for (l, &d) in g.hole_marking() {
            hcol[horb.id[d]] = 1 + index(l);
        }
        let n = g.num_darts();
        DartColours {
            vertex: (0..n).map(|d| vcol[vorb.id[d]]).collect(),
            hole: (0..n).map(|d| hcol[horb.id[d]]).collect(),
        }
    }
}

/// Rooted code of the component containing `root`, with the labeling
/// (`label[old] = new`, unset darts of other components left at `u32::MAX`).
pub(crate) fn rooted_code(g: &RibbonGraph, colours: &DartColours, root: usize) -> (Vec<u32>, Vec<u32>) {
    let n = g.num_darts();
    let mut label = vec![u32::MAX; n];
    let mut order = Vec::new();
    label[root] = 0;
    label[root ^ 1] = 1;
    order.push(root);
    order.push(root ^ 1);
    let mut i = 0;
    while i < order.len() {
        let s = g.sigma0(order[i]);
        if label[s] == u32::MAX {
            let k = order.len() as u32;
            label[s] = k;
            label[s ^ 1] = k + 1;
            order.push(s);
            order.push(s ^ 1);
        }
        i += 1;
    }
    let mut code = Vec::with_capacity(3 * order.len());
    code.extend(order.iter().map(|&d| label[g.sigma0(d)]));
    for &d in &order {
        code.push(colours.vertex[d]);
        code.push(colours.hole[d]);
    }
    (code, label)
}

/// Minimal rooted code over roots in `darts` and the roots achieving it.
pub(crate) fn min_rooted(g: &RibbonGraph, colours: &DartColours, darts: &[usize]) -> (Vec<u32>, Vec<usize>) {
    let mut best: Option<Vec<u32>> = None;
    let mut roots = Vec::new();
    for &r in darts {
        let (code, _) = rooted_code(g, colours, r);
        match &best {
            Some(b) if code > *b => {}
            Some(b) if code == *b => roots.push(r),
            _ => {
                best = Some(code);
                roots = vec![r];
            }
        }
    }
    (best.unwrap_or_default(), roots)
}

fn sorted_labels(g: &RibbonGraph) -> Vec<String> {
    let mut v: Vec<String> = g.hole_marking().keys().chain(g.vertex_marking().keys()).cloned().collect();
    v.sort();
    v
}

/// Canonical code of a connected graph, respecting markings.
pub fn canonical_code(g: &RibbonGraph) -> Result<CanonicalCode> {
    canonical_form(g).map(|f| f.code)
}

/// Canonical code together with the canonically relabeled graph.
pub fn canonical_form(g: &RibbonGraph) -> Result<CanonicalForm> {
    if !g.is_connected() {
        return Err(RibbonError::Disconnected);
    }
    let labels = sorted_labels(g);
    let colours = DartColours::of(g, &labels, &[]);
    let darts: Vec<usize> = (0..g.num_darts()).collect();
    let (code, roots) = min_rooted(g, &colours, &darts);
    let dart_map: Vec<usize> = if roots.is_empty() {
        Vec::new()
    } else {
        rooted_code(g, &colours, roots[0]).1.iter().map(|&l| l as usize).collect()
    };
    let graph = g.relabel(&dart_map).expect("canonical labeling preserves edges");
    let mut full = vec![g.num_darts() as u32];
    full.extend(code);
    Ok(CanonicalForm {
        code: CanonicalCode { code: full, labels, aut_order: roots.len().max(1) },
        graph,
        dart_map,
    })
}

/// Isomorphism respecting markings, componentwise for disconnected graphs.
pub fn isomorphic(a: &RibbonGraph, b: &RibbonGraph) -> bool {
    if a.num_darts() != b.num_darts() {
        return false;
    }
    let ea = EnrichedRibbonGraph::from_parts_unchecked(a.clone(), Vec::new(), Vec::new());
    let eb = EnrichedRibbonGraph::from_parts_unchecked(b.clone(), Vec::new(), Vec::new());
    match (ea, eb) {
        (Ok(x), Ok(y)) => canonical_enriched(&x).code == canonical_enriched(&y).code,
        _ => false,
    }
}

/// Canonical relabeling of an enriched graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnrichedCanonicalForm {
    pub code: CanonicalCode,
    pub graph: EnrichedRibbonGraph,
    /// `dart_map[old] = new` for visible darts.
    pub dart_map: Vec<usize>,
    /// Some automorphism permutes the edges oddly.
    pub orientation_reversing: bool,
    /// `aut_order` times a factor two for every invisible vertex of genus one
    /// with a single special point.
    pub orbifold_aut_order: usize,
}

impl EnrichedCanonicalForm {
    /// `edge_map[old] = new`.
    pub fn edge_map(&self) -> Vec<usize> {
        self.dart_map.chunks(2).map(|p| p[0] / 2).collect()
    }
}

struct Choice {
    tail: Vec<u32>,
    dart_map: Vec<usize>,
    inv_order: Vec<usize>,
}

/// Canonical form of an enriched graph. Components of the visible graph are
/// ordered by their minimal rooted codes; ties, the root choices inside each
/// component and permutations of indistinguishable invisible vertices are
/// resolved by minimizing the encoding of the bicolored graph.
pub fn canonical_enriched(g: &EnrichedRibbonGraph) -> EnrichedCanonicalForm {
    let vis = g.visible();
    let labels: Vec<String> = g.labels().into_iter().collect();
    let index = |l: &String| labels.binary_search(l).unwrap() as u32;
    let special: Vec<usize> = g.node_ends().into_keys().collect();
    let colours = DartColours::of(vis, &labels, &special);
    let comps = vis.component_darts();
    let mut comp_info: Vec<(Vec<u32>, Vec<usize>, usize)> = comps
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (code, roots) = min_rooted(vis, &colours, c);
            (code, roots, i)
        })
        .collect();
    comp_info.sort();

    let inv_keys: Vec<(u32, Vec<u32>)> =
        g.invisible().iter().map(|w| (w.genus, w.labels.iter().map(index).collect())).collect();
    let mut inv_sorted: Vec<usize> = (0..inv_keys.len()).collect();
    inv_sorted.sort_by(|&a, &b| inv_keys[a].cmp(&inv_keys[b]));

    let mut header = vec![comps.len() as u32];
    for (code, _, i) in &comp_info {
        header.push(comps[*i].len() as u32);
        header.extend(code);
    }
    header.push(inv_keys.len() as u32);
    for &i in &inv_sorted {
        let (genus, ls) = &inv_keys[i];
        header.push(*genus);
        header.push(ls.len() as u32);
        header.extend(ls);
    }

    let comp_groups = tie_groups(&comp_info.iter().map(|c| c.0.clone()).collect::<Vec<_>>());
    let inv_groups = tie_groups(&inv_sorted.iter().map(|&i| inv_keys[i].clone()).collect::<Vec<_>>());
    let vorb = vis.vertex_orbits();

    let mut best: Option<Choice> = None;
    let mut parities = Vec::new();
    let mut count = 0usize;
    for comp_order in group_permutations(&comp_groups) {
        let root_lists: Vec<&Vec<usize>> = comp_order.iter().map(|&k| &comp_info[k].1).collect();
        for roots in cartesian(&root_lists) {
            let mut dart_map = vec![0usize; vis.num_darts()];
            let mut offset = 0;
            for (&k, &root) in comp_order.iter().zip(&roots) {
                let (_, label) = rooted_code(vis, &colours, root);
                for &d in &comps[comp_info[k].2] {
                    dart_map[d] = offset + label[d] as usize;
                }
                offset += comps[comp_info[k].2].len();
            }
            let vmin: Vec<usize> = vorb.cycles.iter().map(|c| c.iter().map(|&d| dart_map[d]).min().unwrap()).collect();
            for inv_perm in group_permutations(&inv_groups) {
                let mut inv_pos = vec![0usize; inv_keys.len()];
                for (pos, &k) in inv_perm.iter().enumerate() {
                    inv_pos[inv_sorted[k]] = pos;
                }
                let enc = |e: &NodeEnd| match e {
                    NodeEnd::Visible(d) => (0u32, vmin[vorb.id[*d]] as u32),
                    NodeEnd::Invisible(i) => (1u32, inv_pos[*i] as u32),
                };
                let mut edges: Vec<[u32; 4]> = g
                    .zeta()
                    .iter()
                    .map(|(a, b)| {
                        let (x, y) = (enc(a), enc(b));
                        let (x, y) = if x <= y { (x, y) } else { (y, x) };
                        [x.0, x.1, y.0, y.1]
                    })
                    .collect();
                edges.sort();
                let mut tail = vec![edges.len() as u32];
                tail.extend(edges.iter().flatten());
                let edge_perm: Vec<usize> = (0..vis.num_edges()).map(|e| dart_map[2 * e] / 2).collect();
                let parity = permutation_sign(&edge_perm);
                match &best {
                    Some(b) if tail > b.tail => {}
                    Some(b) if tail == b.tail => {
                        count += 1;
                        parities.push(parity);
                    }
                    _ => {
                        let inv_order = inv_perm.iter().map(|&k| inv_sorted[k]).collect();
                        best = Some(Choice { tail, dart_map: dart_map.clone(), inv_order });
                        count = 1;
                        parities = vec![parity];
                    }
                }
            }
        }
    }
    let choice = best.expect("at least one labeling");
    let mut code = header;
    code.extend(&choice.tail);

    let visible = vis.relabel(&choice.dart_map).expect("canonical labeling preserves edges");
    let mut inv_pos = vec![0usize; inv_keys.len()];
    for (pos, &i) in choice.inv_order.iter().enumerate() {
        inv_pos[i] = pos;
    }
    let invisible: Vec<InvisibleVertex> = choice.inv_order.iter().map(|&i| g.invisible()[i].clone()).collect();
    let zeta = g
        .zeta()
        .iter()
        .map(|&(a, b)| {
            let f = |e: NodeEnd| match e {
                NodeEnd::Visible(d) => NodeEnd::Visible(choice.dart_map[d]),
                NodeEnd::Invisible(i) => NodeEnd::Invisible(inv_pos[i]),
            };
            (f(a), f(b))
        })
        .collect();
    let graph = EnrichedRibbonGraph::from_parts_unchecked(visible, invisible, zeta).expect("relabeling is valid");

    let mut degree = vec![0usize; g.invisible().len()];
    for (a, b) in g.zeta() {
        for e in [a, b] {
            if let NodeEnd::Invisible(i) = e {
                degree[*i] += 1;
            }
        }
    }
    let extra = g.invisible().iter().enumerate().filter(|(i, w)| w.genus == 1 && degree[*i] + w.labels.len() == 1).count();
    EnrichedCanonicalForm {
        code: CanonicalCode { code, labels, aut_order: count },
        graph,
        dart_map: choice.dart_map,
        orientation_reversing: parities.iter().any(|&p| p != parities[0]),
        orbifold_aut_order: count << extra,
    }
}

/// Runs of equal consecutive keys, as index ranges.
fn tie_groups<K: PartialEq>(keys: &[K]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, k) in keys.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if keys[g[0]] == *k => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// All orderings obtained by permuting within each group.
fn group_permutations(groups: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for g in groups {
        let perms = permutations(g);
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for prefix in &out {
            for p in &perms {
                let mut v = prefix.clone();
                v.extend(p);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn cartesian(lists: &[&Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for l in lists {
        let mut next = Vec::with_capacity(out.len() * l.len());
        for prefix in &out {
            for &x in l.iter() {
                let mut v = prefix.clone();
                v.push(x);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Counts of labeled roots per canonical code, for diagnostics.
pub fn rooted_code_multiplicities(g: &RibbonGraph) -> BTreeMap<Vec<u32>, usize> {
    let labels = sorted_labels(g);
    let colours = DartColours::of(g, &labels, &[]);
    let mut m = BTreeMap::new();
    for r in 0..g.num_darts() {
        *m.entry(rooted_code(g, &colours, r).0).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ribbon::Markings;

    fn theta_a() -> RibbonGraph {
        RibbonGraph::from_cycles(6, &[&[0, 2, 4], &[1, 3, 5]]).unwrap()
    }

    #[test]
    fn automorphism_orders() {
        assert_eq!(canonical_code(&theta_a()).unwrap().aut_order, 6);
        let f8a = RibbonGraph::from_cycles(4, &[&[0, 2, 1, 3]]).unwrap();
        assert_eq!(canonical_code(&f8a).unwrap().aut_order, 4);
        let f8b = RibbonGraph::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        assert_eq!(canonical_code(&f8b).unwrap().aut_order, 2);
    }

    #[test]
    fn relabeling_invariance() {
        let g = theta_a();
        let h = g.relabel(&[4, 5, 0, 1, 2, 3]).unwrap();
        assert_eq!(canonical_code(&g).unwrap(), canonical_code(&h).unwrap());
        assert!(isomorphic(&g, &h));
        let tb = RibbonGraph::from_cycles(6, &[&[0, 2, 4], &[1, 5, 3]]).unwrap();
        assert!(!isomorphic(&g, &tb));
    }

    #[test]
    fn hole_labels_related_by_automorphism() {
        let tb = RibbonGraph::from_cycles(6, &[&[0, 2, 4], &[1, 5, 3]]).unwrap();
        let a = tb.with_markings(Markings::holes([("x1", 0), ("x2", 1), ("x3", 3)])).unwrap();
        let b = tb.with_markings(Markings::holes([("x1", 1), ("x2", 3), ("x3", 0)])).unwrap();
        assert!(isomorphic(&a, &b));
        assert_eq!(canonical_code(&a).unwrap().aut_order, 1);
    }

    #[test]
    fn canonical_graph_has_canonical_code() {
        let f = canonical_form(&theta_a()).unwrap();
        assert_eq!(canonical_form(&f.graph).unwrap().graph, f.graph);
    }

    #[test]
    fn disconnected_rejected() {
        let u = theta_a().disjoint_union(&theta_a()).unwrap();
        assert_eq!(canonical_code(&u), Err(RibbonError::Disconnected));
    }
}
