//! Isomorph-free generation of ribbon graphs, orbifold Euler characteristics
//! and the top cells of Witten subcomplexes.
//!
//! Every connected graph contracts along a spanning tree to a graph with one
//! vertex and the same genus and holes. Generation therefore starts from all
//! one-vertex graphs (perfect matchings on a standard cycle, filtered by face
//! count) and splits vertices one level at a time, deduplicating each level
//! by canonical code.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::canon::{canonical_form, CanonicalCode};
use crate::error::{Result, RibbonError};
use crate::ribbon::{Markings, RibbonGraph, ValenceProfile};
use crate::scalar::ExactField;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationParams {
    pub genus: u32,
    pub holes: usize,
    pub min_valence: usize,
    pub labeled_holes: bool,
    pub profile: Option<ValenceProfile>,
    pub allow_tails: bool,
    /// Defaults to `6g - 6 + 3n`.
    pub max_edges: Option<usize>,
}

impl EnumerationParams {
    /// At least trivalent, unlabeled, no profile, no tails.
    pub fn new(genus: u32, holes: usize) -> Self {
        EnumerationParams {
            genus,
            holes,
            min_valence: 3,
            labeled_holes: false,
            profile: None,
            allow_tails: false,
            max_edges: None,
        }
    }

    pub fn labeled(mut self, labeled: bool) -> Self {
        self.labeled_holes = labeled;
        self
    }

    pub fn min_valence(mut self, m: usize) -> Self {
        self.min_valence = m;
        self
    }

    pub fn profile(mut self, p: ValenceProfile) -> Self {
        self.profile = Some(p);
        self
    }

    pub fn allow_tails(mut self, allow: bool) -> Self {
        self.allow_tails = allow;
        self
    }

    pub fn max_edges(mut self, e: usize) -> Self {
        self.max_edges = Some(e);
        self
    }

    fn edge_cap(&self) -> usize {
        self.max_edges.unwrap_or((6 * self.genus as usize + 3 * self.holes).saturating_sub(6))
    }

    fn valence_ok(&self, k: usize) -> bool {
        k >= self.min_valence.max(1) || (k == 1 && self.allow_tails)
    }

    fn tails_possible(&self) -> bool {
        self.allow_tails || self.min_valence <= 2
    }
}

/// A representative in canonical labeling with its code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumeratedGraph {
    pub graph: RibbonGraph,
    pub code: CanonicalCode,
}

/// Hole labels `x1, ..., xn`.
pub fn hole_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn check_stable(genus: u32, holes: usize) -> Result<()> {
    if 2 * genus as usize + holes <= 2 {
        return Err(RibbonError::UnstableParameters { genus, holes });
    }
    Ok(())
}

/// One representative per isomorphism class, sorted by edge count and code.
pub fn enumerate_graphs(params: &EnumerationParams) -> Result<Vec<EnumeratedGraph>> {
    check_stable(params.genus, params.holes)?;
    let cap = params.edge_cap();
    let seed_edges = 2 * params.genus as usize + params.holes - 1;
    if seed_edges > cap {
        return Ok(Vec::new());
    }
    let split_min = if params.tails_possible() { 1 } else { params.min_valence.max(1) };
    let max_vertices = match &params.profile {
        Some(p) => p.num_vertices(),
        None => cap + 1 - seed_edges,
    };

    let mut levels = vec![one_vertex_graphs(seed_edges, params.holes)];
    while levels.len() < max_vertices && !levels.last().unwrap().is_empty() {
        let next = split_level(levels.last().unwrap(), split_min);
        levels.push(next);
    }

    let keep = |g: &RibbonGraph| -> bool {
        if !g.vertices().iter().all(|c| params.valence_ok(c.len())) {
            return false;
        }
        match &params.profile {
            Some(p) => {
                let r = g.valence_profile();
                r.is_odd_only() && r.profile == *p
            }
            None => true,
        }
    };
    let classes: Vec<RibbonGraph> =
        levels.into_iter().flat_map(|l| l.into_values()).filter(|g| keep(g)).collect();
    let allow = params.tails_possible() || params.min_valence < 3;

    let mut out: Vec<EnumeratedGraph> = if params.labeled_holes {
        let labels = hole_labels(params.holes);
        let labeled: Vec<Vec<EnumeratedGraph>> = classes.par_iter().map(|g| label_holes(g, &labels, allow)).collect();
        labeled.into_iter().flatten().collect()
    } else {
        classes
            .into_iter()
            .map(|g| {
                let g = g.with_allow_tails(allow).expect("valences checked");
                let f = canonical_form(&g).expect("connected");
                EnumeratedGraph { graph: f.graph, code: f.code }
            })
            .collect()
    };
    out.sort_by(|a, b| (a.graph.num_edges(), &a.code).cmp(&(b.graph.num_edges(), &b.code)));
    Ok(out)
}

/// Distinct hole labelings of `g` up to isomorphism.
pub fn label_holes(g: &RibbonGraph, labels: &[String], allow_tails: bool) -> Vec<EnumeratedGraph> {
    let holes = g.holes();
    let mut seen = BTreeMap::new();
    for perm in index_permutations(holes.len()) {
        let markings = Markings::holes(perm.iter().enumerate().map(|(i, &h)| (labels[i].clone(), holes[h][0])));
        let lg = RibbonGraph::new(g.num_darts(), g.sigma0_array().to_vec(), markings, allow_tails).expect("valid labeling");
        let f = canonical_form(&lg).expect("connected");
        seen.entry(f.code.clone()).or_insert(EnumeratedGraph { graph: f.graph, code: f.code });
    }
    seen.into_values().collect()
}

pub(crate) fn index_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut cur, &mut out);
    out
}

fn heap_permute(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..k - 1 {
        heap_permute(k - 1, a, out);
        if k % 2 == 0 {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
    heap_permute(k - 1, a, out);
}

/// One-vertex graphs with `edges` edges and `holes` holes, up to isomorphism.
fn one_vertex_graphs(edges: usize, holes: usize) -> BTreeMap<CanonicalCode, RibbonGraph> {
    let d = 2 * edges;
    let mut found = BTreeMap::new();
    let mut partner = vec![usize::MAX; d];
    let mut matchings = Vec::new();
    all_matchings(&mut partner, &mut matchings);
    for m in matchings {
        // Position i holds dart pos_dart[i]; sigma0 advances one position.
        let mut pos_dart = vec![0; d];
        let mut next = 0;
        for i in 0..d {
            if m[i] > i {
                pos_dart[i] = next;
                pos_dart[m[i]] = next + 1;
                next += 2;
            }
        }
        let mut sigma0 = vec![0; d];
        for i in 0..d {
            sigma0[pos_dart[i]] = pos_dart[(i + 1) % d];
        }
        let g = RibbonGraph::new(d, sigma0, Markings::default(), true).expect("one-vertex graph");
        if g.num_holes() == holes {
            let f = canonical_form(&g).expect("connected");
            found.entry(f.code).or_insert(f.graph);
        }
    }
    found
}

fn all_matchings(partner: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let Some(i) = partner.iter().position(|&p| p == usize::MAX) else {
        out.push(partner.clone());
        return;
    };
    for j in i + 1..partner.len() {
        if partner[j] == usize::MAX {
            partner[i] = j;
            partner[j] = i;
            all_matchings(partner, out);
            partner[i] = usize::MAX;
            partner[j] = usize::MAX;
        }
    }
}

/// All graphs obtained by splitting one vertex of a graph in `level` into two
/// joined by a new edge, with both parts of valence at least `split_min`.
fn split_level(level: &BTreeMap<CanonicalCode, RibbonGraph>, split_min: usize) -> BTreeMap<CanonicalCode, RibbonGraph> {
    let graphs: Vec<&RibbonGraph> = level.values().collect();
    let found: Vec<Vec<(CanonicalCode, RibbonGraph)>> = graphs
        .par_iter()
        .map(|g| {
            let mut local = BTreeMap::new();
            for g2 in vertex_splits(g, split_min) {
                let f = canonical_form(&g2).expect("connected");
                local.entry(f.code).or_insert(f.graph);
            }
            local.into_iter().collect()
        })
        .collect();
    let mut out = BTreeMap::new();
    for (code, g) in found.into_iter().flatten() {
        out.entry(code).or_insert(g);
    }
    out
}

/// Every split of every vertex of `g`. The new edge is the last one; its
/// even dart starts the first part and its odd dart the second.
pub fn vertex_splits(g: &RibbonGraph, split_min: usize) -> Vec<RibbonGraph> {
    let n = g.num_darts();
    let (x, y) = (n, n + 1);
    let mut out = Vec::new();
    for cyc in g.vertices() {
        let k = cyc.len();
        for s in 0..k {
            for j in 0..=k {
                if (j == 0 || j == k) && s != 0 {
                    continue;
                }
                if j + 1 < split_min || k - j + 1 < split_min {
                    continue;
                }
                let mut sigma0 = g.sigma0_array().to_vec();
                sigma0.extend([0, 0]);
                let a: Vec<usize> = (0..j).map(|t| cyc[(s + t) % k]).collect();
                let b: Vec<usize> = (j..k).map(|t| cyc[(s + t) % k]).collect();
                for (head, part) in [(x, &a), (y, &b)] {
                    let mut ring = vec![head];
                    ring.extend(part.iter().copied());
                    for t in 0..ring.len() {
                        sigma0[ring[t]] = ring[(t + 1) % ring.len()];
                    }
                }
                out.push(RibbonGraph::new(n + 2, sigma0, Markings::default(), true).expect("split is a permutation"));
            }
        }
    }
    out
}

/// `Σ (-1)^V / |Aut|` over hole-labeled classes with all valences at least three.
pub fn orbifold_euler_characteristic<T: ExactField>(genus: u32, holes: usize) -> Result<T> {
    let cells = enumerate_graphs(&EnumerationParams::new(genus, holes).labeled(true))?;
    Ok(cells.iter().fold(T::zero(), |acc, c| {
        let sign = if c.graph.num_vertices() % 2 == 0 { T::one() } else { -T::one() };
        acc + sign / T::from_int(c.code.aut_order as i64)
    }))
}

/// Hole-labeled top cells of the Witten subcomplex with valence profile `profile`.
pub fn witten_cells(genus: u32, holes: usize, profile: &ValenceProfile) -> Result<Vec<EnumeratedGraph>> {
    check_stable(genus, holes)?;
    if !profile.satisfies_witten(genus, holes) {
        return Err(RibbonError::ProfileMismatch);
    }
    enumerate_graphs(&EnumerationParams::new(genus, holes).labeled(true).profile(profile.clone()))
}

/// Unlabeled classes for quick checks and reports.
pub fn class_count(genus: u32, holes: usize) -> Result<usize> {
    Ok(enumerate_graphs(&EnumerationParams::new(genus, holes))?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_code;
    use crate::Rational;

    #[test]
    fn genus_one_one_hole_classes() {
        let classes = enumerate_graphs(&EnumerationParams::new(1, 1)).unwrap();
        assert_eq!(classes.len(), 2);
        let theta = RibbonGraph::from_cycles(6, &[&[0, 2, 4], &[1, 3, 5]]).unwrap();
        let fig8 = RibbonGraph::from_cycles(4, &[&[0, 2, 1, 3]]).unwrap();
        let codes: Vec<_> = classes.iter().map(|c| c.code.clone()).collect();
        assert!(codes.contains(&canonical_code(&theta).unwrap()));
        assert!(codes.contains(&canonical_code(&fig8).unwrap()));
    }

    #[test]
    fn trivalent_filter() {
        let p = ValenceProfile::new(vec![2]);
        let classes = enumerate_graphs(&EnumerationParams::new(1, 1).profile(p)).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].graph.num_edges(), 3);
    }

    #[test]
    fn three_holed_sphere_classes() {
        assert_eq!(class_count(0, 3).unwrap(), 3);
    }

    #[test]
    fn unstable_rejected() {
        assert_eq!(class_count(0, 2), Err(RibbonError::UnstableParameters { genus: 0, holes: 2 }));
    }

    #[test]
    fn euler_characteristics_small() {
        assert_eq!(orbifold_euler_characteristic::<Rational>(0, 3).unwrap(), Rational::from_int(1));
        assert_eq!(orbifold_euler_characteristic::<Rational>(1, 1).unwrap(), Rational::from_frac(-1, 12));
    }

    #[test]
    fn witten_profile_checked() {
        assert_eq!(witten_cells(1, 1, &ValenceProfile::new(vec![0, 1])), Err(RibbonError::ProfileMismatch));
        let cells = witten_cells(1, 2, &ValenceProfile::new(vec![1, 1])).unwrap();
        assert!(!cells.is_empty());
        for c in &cells {
            assert_eq!(c.graph.num_edges(), 4);
        }
    }

    #[test]
    fn heap_permutations_complete() {
        let mut p = index_permutations(4);
        assert_eq!(p.len(), 24);
        p.sort();
        p.dedup();
        assert_eq!(p.len(), 24);
    }
}
