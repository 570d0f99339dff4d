//! Ribbon graphs encoded by the vertex permutation `sigma0`.
//!
//! Darts are `0..num_darts`; darts `2k` and `2k + 1` form edge `k`, so the
//! edge involution is `d ^ 1`. Holes are the cycles of
//! `sigma_inf = sigma1 ∘ sigma0⁻¹`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Result, RibbonError};

/// Labels attached to holes and to vertices, keyed by label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Markings {
    pub holes: BTreeMap<String, usize>,
    pub vertices: BTreeMap<String, usize>,
}

impl Markings {
    pub fn holes<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        Markings { holes: pairs.into_iter().map(|(l, d)| (l.into(), d)).collect(), vertices: BTreeMap::new() }
    }
}

/// Cycles of a permutation, each starting at its smallest element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbits {
    pub cycles: Vec<Vec<usize>>,
    /// `id[d]` is the index of the cycle containing `d`.
    pub id: Vec<usize>,
}

impl Orbits {
    pub fn of(n: usize, f: impl Fn(usize) -> usize) -> Self {
        let mut id = vec![usize::MAX; n];
        let mut cycles = Vec::new();
        for s in 0..n {
            if id[s] != usize::MAX {
                continue;
            }
            let k = cycles.len();
            let mut cyc = Vec::new();
            let mut d = s;
            while id[d] == usize::MAX {
                id[d] = k;
                cyc.push(d);
                d = f(d);
            }
            cycles.push(cyc);
        }
        Orbits { cycles, id }
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Smallest dart of the cycle containing `d`.
    pub fn rep(&self, d: usize) -> usize {
        self.cycles[self.id[d]][0]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RibbonGraph {
    sigma0: Vec<usize>,
    sigma0_inv: Vec<usize>,
    allow_tails: bool,
    hole_marking: BTreeMap<String, usize>,
    vertex_marking: BTreeMap<String, usize>,
}

impl RibbonGraph {
    /// Validates and builds a graph. Markings may name any dart of the orbit;
    /// they are stored on the smallest dart.
    pub fn new(num_darts: usize, sigma0: Vec<usize>, markings: Markings, allow_tails: bool) -> Result<Self> {
        if num_darts % 2 == 1 {
            return Err(RibbonError::OddDartCount(num_darts));
        }
        if sigma0.len() != num_darts {
            return Err(RibbonError::LengthMismatch { expected: num_darts, got: sigma0.len() });
        }
        let mut sigma0_inv = vec![usize::MAX; num_darts];
        for (d, &e) in sigma0.iter().enumerate() {
            if e >= num_darts || sigma0_inv[e] != usize::MAX {
                return Err(RibbonError::NotAPermutation);
            }
            sigma0_inv[e] = d;
        }
        let mut g = RibbonGraph {
            sigma0,
            sigma0_inv,
            allow_tails,
            hole_marking: BTreeMap::new(),
            vertex_marking: BTreeMap::new(),
        };
        let vertices = g.vertex_orbits();
        let holes = g.hole_orbits();
        let mut used_holes = vec![false; holes.len()];
        for (label, &d) in &markings.holes {
            if d >= num_darts {
                return Err(RibbonError::NoSuchDart(d));
            }
            if std::mem::replace(&mut used_holes[holes.id[d]], true) {
                return Err(RibbonError::MarkingCollision { label: label.clone() });
            }
            g.hole_marking.insert(label.clone(), holes.rep(d));
        }
        let mut used_vertices = vec![false; vertices.len()];
        for (label, &d) in &markings.vertices {
            if d >= num_darts {
                return Err(RibbonError::NoSuchDart(d));
            }
            if g.hole_marking.contains_key(label) || std::mem::replace(&mut used_vertices[vertices.id[d]], true) {
                return Err(RibbonError::MarkingCollision { label: label.clone() });
            }
            g.vertex_marking.insert(label.clone(), vertices.rep(d));
        }
        if !allow_tails {
            for (k, cyc) in vertices.cycles.iter().enumerate() {
                if used_vertices[k] {
                    continue;
                }
                match cyc.len() {
                    1 => return Err(RibbonError::ForbiddenFixedPoint { dart: cyc[0] }),
                    2 => return Err(RibbonError::ValenceTooLow { dart: cyc[0] }),
                    _ => {}
                }
            }
        }
        Ok(g)
    }

    /// Unmarked graph without tails, from explicit vertex cycles.
    pub fn from_cycles(num_darts: usize, cycles: &[&[usize]]) -> Result<Self> {
        Self::new(num_darts, permutation_from_cycles(num_darts, cycles)?, Markings::default(), false)
    }

    pub fn empty() -> Self {
        RibbonGraph {
            sigma0: Vec::new(),
            sigma0_inv: Vec::new(),
            allow_tails: false,
            hole_marking: BTreeMap::new(),
            vertex_marking: BTreeMap::new(),
        }
    }

    pub fn num_darts(&self) -> usize {
        self.sigma0.len()
    }

    pub fn num_edges(&self) -> usize {
        self.sigma0.len() / 2
    }

    pub fn sigma0(&self, d: usize) -> usize {
        self.sigma0[d]
    }

    pub fn sigma0_inv(&self, d: usize) -> usize {
        self.sigma0_inv[d]
    }

    pub fn sigma1(&self, d: usize) -> usize {
        d ^ 1
    }

    pub fn sigma_inf(&self, d: usize) -> usize {
        self.sigma0_inv[d] ^ 1
    }

    pub fn sigma0_array(&self) -> &[usize] {
        &self.sigma0
    }

    pub fn allow_tails(&self) -> bool {
        self.allow_tails
    }

    pub fn hole_marking(&self) -> &BTreeMap<String, usize> {
        &self.hole_marking
    }

    pub fn vertex_marking(&self) -> &BTreeMap<String, usize> {
        &self.vertex_marking
    }

    pub fn markings(&self) -> Markings {
        Markings { holes: self.hole_marking.clone(), vertices: self.vertex_marking.clone() }
    }

    pub fn vertex_orbits(&self) -> Orbits {
        Orbits::of(self.num_darts(), |d| self.sigma0[d])
    }

    pub fn hole_orbits(&self) -> Orbits {
        Orbits::of(self.num_darts(), |d| self.sigma_inf(d))
    }

    pub fn vertices(&self) -> Vec<Vec<usize>> {
        self.vertex_orbits().cycles
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.num_edges()).map(|k| (2 * k, 2 * k + 1)).collect()
    }

    pub fn holes(&self) -> Vec<Vec<usize>> {
        self.hole_orbits().cycles
    }

    /// Vertices, edges and holes at once.
    pub fn orbit_sets(&self) -> (Vec<Vec<usize>>, Vec<(usize, usize)>, Vec<Vec<usize>>) {
        (self.vertices(), self.edges(), self.holes())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_orbits().len()
    }

    pub fn num_holes(&self) -> usize {
        self.hole_orbits().len()
    }

    /// `V - E`.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64
    }

    /// `1 + (E - V - F) / 2` for a connected graph.
    pub fn genus(&self) -> Result<u32> {
        if !self.is_connected() {
            return Err(RibbonError::Disconnected);
        }
        Ok(self.genus_unchecked())
    }

    pub(crate) fn genus_unchecked(&self) -> u32 {
        if self.num_darts() == 0 {
            return 0;
        }
        let twice = 2 + self.num_edges() as i64 - self.num_vertices() as i64 - self.num_holes() as i64;
        debug_assert!(twice >= 0 && twice % 2 == 0);
        (twice / 2) as u32
    }

    /// Darts of each connected component, ordered by smallest dart.
    pub fn component_darts(&self) -> Vec<Vec<usize>> {
        let n = self.num_darts();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(d) = stack.pop() {
                comp.push(d);
                for e in [self.sigma0[d], d ^ 1] {
                    if !seen[e] {
                        seen[e] = true;
                        stack.push(e);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.component_darts().len() <= 1
    }

    pub fn connected_components(&self) -> Vec<RibbonGraph> {
        self.component_darts().iter().map(|c| self.restrict(c).0).collect()
    }

    /// Restricts to a union of components, renumbering edges in increasing
    /// order. Returns the graph and the old-to-new dart map.
    pub fn restrict(&self, darts: &[usize]) -> (RibbonGraph, Vec<Option<usize>>) {
        let mut map = vec![None; self.num_darts()];
        let mut edges: Vec<usize> = darts.iter().map(|d| d / 2).collect();
        edges.sort_unstable();
        edges.dedup();
        for (new, &old) in edges.iter().enumerate() {
            map[2 * old] = Some(2 * new);
            map[2 * old + 1] = Some(2 * new + 1);
        }
        let m = 2 * edges.len();
        let mut sigma0 = vec![0; m];
        for &old in &edges {
            for d in [2 * old, 2 * old + 1] {
                sigma0[map[d].unwrap()] = map[self.sigma0[d]].expect("dart set is not closed under sigma0");
            }
        }
        let keep = |marks: &BTreeMap<String, usize>| -> BTreeMap<String, usize> {
            marks.iter().filter_map(|(l, &d)| map[d].map(|nd| (l.clone(), nd))).collect()
        };
        let markings = Markings { holes: keep(&self.hole_marking), vertices: keep(&self.vertex_marking) };
        let g = RibbonGraph::new(m, sigma0, markings, self.allow_tails).expect("restriction of a valid graph");
        (g, map)
    }

    /// Applies a dart bijection that maps edges to edges.
    pub fn relabel(&self, perm: &[usize]) -> Result<RibbonGraph> {
        let n = self.num_darts();
        if perm.len() != n {
            return Err(RibbonError::LengthMismatch { expected: n, got: perm.len() });
        }
        let mut seen = vec![false; n];
        for d in 0..n {
            if perm[d] >= n || std::mem::replace(&mut seen[perm[d]], true) || perm[d ^ 1] != perm[d] ^ 1 {
                return Err(RibbonError::NotAPermutation);
            }
        }
        let mut sigma0 = vec![0; n];
        for d in 0..n {
            sigma0[perm[d]] = perm[self.sigma0[d]];
        }
        let mv = |marks: &BTreeMap<String, usize>| marks.iter().map(|(l, &d)| (l.clone(), perm[d])).collect();
        let markings = Markings { holes: mv(&self.hole_marking), vertices: mv(&self.vertex_marking) };
        RibbonGraph::new(n, sigma0, markings, self.allow_tails)
    }

    /// Places `other` after `self`, shifting its darts.
    pub fn disjoint_union(&self, other: &RibbonGraph) -> Result<RibbonGraph> {
        let off = self.num_darts();
        let mut sigma0 = self.sigma0.clone();
        sigma0.extend(other.sigma0.iter().map(|d| d + off));
        let mut markings = self.markings();
        for (l, &d) in &other.hole_marking {
            if markings.holes.insert(l.clone(), d + off).is_some() || markings.vertices.contains_key(l) {
                return Err(RibbonError::MarkingCollision { label: l.clone() });
            }
        }
        for (l, &d) in &other.vertex_marking {
            if markings.vertices.insert(l.clone(), d + off).is_some() || markings.holes.contains_key(l) {
                return Err(RibbonError::MarkingCollision { label: l.clone() });
            }
        }
        RibbonGraph::new(off + other.num_darts(), sigma0, markings, self.allow_tails || other.allow_tails)
    }

    pub fn with_markings(&self, markings: Markings) -> Result<RibbonGraph> {
        RibbonGraph::new(self.num_darts(), self.sigma0.clone(), markings, self.allow_tails)
    }

    pub fn with_allow_tails(&self, allow_tails: bool) -> Result<RibbonGraph> {
        RibbonGraph::new(self.num_darts(), self.sigma0.clone(), self.markings(), allow_tails)
    }

    /// Label of the hole containing `d`, if any.
    pub fn hole_label_of(&self, d: usize) -> Option<&str> {
        let rep = self.hole_orbits().rep(d);
        self.hole_marking.iter().find(|(_, &r)| r == rep).map(|(l, _)| l.as_str())
    }

    /// Label of the vertex containing `d`, if any.
    pub fn vertex_label_of(&self, d: usize) -> Option<&str> {
        let rep = self.vertex_orbits().rep(d);
        self.vertex_marking.iter().find(|(_, &r)| r == rep).map(|(l, _)| l.as_str())
    }

    /// Darts fixed by `sigma0`, i.e. tips of tails.
    pub fn tail_tips(&self) -> Vec<usize> {
        (0..self.num_darts()).filter(|&d| self.sigma0[d] == d).collect()
    }

    pub fn is_loop(&self, edge: usize) -> bool {
        let v = self.vertex_orbits();
        v.id[2 * edge] == v.id[2 * edge + 1]
    }

    /// Holes in reference order: labeled holes sorted by label, then the
    /// unlabeled ones by smallest dart.
    pub fn ordered_holes(&self) -> Vec<Vec<usize>> {
        let orbits = self.hole_orbits();
        let mut out: Vec<Vec<usize>> =
            self.hole_marking.values().map(|&d| orbits.cycles[orbits.id[d]].clone()).collect();
        let labeled: Vec<usize> = self.hole_marking.values().map(|&d| orbits.id[d]).collect();
        for (k, cyc) in orbits.cycles.iter().enumerate() {
            if !labeled.contains(&k) {
                out.push(cyc.clone());
            }
        }
        out
    }

    pub fn valence_profile(&self) -> ValenceReport {
        let mut counts = Vec::new();
        let mut even = 0;
        let mut tails = 0;
        for cyc in self.vertices() {
            let k = cyc.len();
            if k == 1 {
                tails += 1;
            } else if k % 2 == 0 {
                even += 1;
            } else {
                let i = (k - 3) / 2;
                if counts.len() <= i {
                    counts.resize(i + 1, 0);
                }
                counts[i] += 1;
            }
        }
        ValenceReport { profile: ValenceProfile::new(counts), even, tails }
    }
}

/// Builds a permutation array from disjoint cycles; unlisted darts are fixed.
pub fn permutation_from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut seen = vec![false; n];
    for cyc in cycles {
        for (i, &d) in cyc.iter().enumerate() {
            if d >= n || std::mem::replace(&mut seen[d], true) {
                return Err(RibbonError::NotAPermutation);
            }
            p[d] = cyc[(i + 1) % cyc.len()];
        }
    }
    Ok(p)
}

/// Counts `m_i` of vertices of valence `2i + 3`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ValenceProfile {
    counts: Vec<usize>,
}

impl ValenceProfile {
    pub fn new(mut counts: Vec<usize>) -> Self {
        while counts.last() == Some(&0) {
            counts.pop();
        }
        ValenceProfile { counts }
    }

    /// The trivalent profile `m = (4g - 4 + 2n)`.
    pub fn trivalent(genus: u32, holes: usize) -> Self {
        ValenceProfile::new(vec![(4 * genus as usize + 2 * holes).saturating_sub(4)])
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn m(&self, i: usize) -> usize {
        self.counts.get(i).copied().unwrap_or(0)
    }

    /// `Σ (2i + 1) m_i`.
    pub fn witten_sum(&self) -> usize {
        self.counts.iter().enumerate().map(|(i, m)| (2 * i + 1) * m).sum()
    }

    pub fn satisfies_witten(&self, genus: u32, holes: usize) -> bool {
        self.witten_sum() + 4 == 4 * genus as usize + 2 * holes
    }

    /// `r = Σ i m_i`.
    pub fn r(&self) -> usize {
        self.counts.iter().enumerate().map(|(i, m)| i * m).sum()
    }

    /// `Π m_i!`.
    pub fn factorial(&self) -> u128 {
        self.counts.iter().map(|&m| (1..=m as u128).product::<u128>()).product()
    }

    pub fn num_vertices(&self) -> usize {
        self.counts.iter().sum()
    }

    /// `Σ (2i + 3) m_i`, twice the edge count of a graph with this profile.
    pub fn num_darts(&self) -> usize {
        self.counts.iter().enumerate().map(|(i, m)| (2 * i + 3) * m).sum()
    }

    /// Valences of the vertices, ascending.
    pub fn valences(&self) -> Vec<usize> {
        let mut v = Vec::new();
        for (i, &m) in self.counts.iter().enumerate() {
            v.extend(std::iter::repeat(2 * i + 3).take(m));
        }
        v
    }
}

impl fmt::Display for ValenceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Output of [`RibbonGraph::valence_profile`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValenceReport {
    /// Odd valences at least three.
    pub profile: ValenceProfile,
    /// Vertices of even valence.
    pub even: usize,
    /// Univalent vertices.
    pub tails: usize,
}

impl ValenceReport {
    pub fn is_odd_only(&self) -> bool {
        self.even == 0 && self.tails == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn theta_a() -> RibbonGraph {
        RibbonGraph::from_cycles(6, &[&[0, 2, 4], &[1, 3, 5]]).unwrap()
    }

    #[test]
    fn theta_a_orbits() {
        let g = theta_a();
        let (v, e, h) = g.orbit_sets();
        assert_eq!(v.len(), 2);
        assert_eq!(e.len(), 3);
        assert_eq!(h, vec![vec![0, 5, 2, 1, 4, 3]]);
        assert_eq!(g.genus().unwrap(), 1);
        assert_eq!(g.euler_characteristic(), -1);
    }

    #[test]
    fn theta_b_and_fig8_b_holes() {
        let tb = RibbonGraph::from_cycles(6, &[&[0, 2, 4], &[1, 5, 3]]).unwrap();
        assert_eq!(tb.holes(), vec![vec![0, 5], vec![1, 2], vec![3, 4]]);
        assert_eq!(tb.genus().unwrap(), 0);
        let f8b = RibbonGraph::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        assert_eq!(f8b.holes(), vec![vec![0, 2], vec![1], vec![3]]);
    }

    #[test]
    fn fixed_point_rejected_without_tails() {
        let err = RibbonGraph::new(4, vec![0, 1, 2, 3], Markings::default(), false).unwrap_err();
        assert_eq!(err, RibbonError::ForbiddenFixedPoint { dart: 0 });
        let tree = RibbonGraph::new(2, vec![0, 1], Markings::default(), true).unwrap();
        assert_eq!(tree.euler_characteristic(), 1);
        assert_eq!(tree.valence_profile().tails, 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(RibbonGraph::new(3, vec![0, 1, 2], Markings::default(), true), Err(RibbonError::OddDartCount(3)));
        assert_eq!(RibbonGraph::new(2, vec![0, 0], Markings::default(), true), Err(RibbonError::NotAPermutation));
        let m = Markings::holes([("a", 0), ("b", 5)]);
        let err = RibbonGraph::new(6, theta_a().sigma0_array().to_vec(), m, false).unwrap_err();
        assert!(matches!(err, RibbonError::MarkingCollision { .. }));
    }

    #[test]
    fn markings_move_to_orbit_minimum() {
        let g = theta_a().with_markings(Markings::holes([("x1", 4)])).unwrap();
        assert_eq!(g.hole_marking()["x1"], 0);
        assert_eq!(g.hole_label_of(3), Some("x1"));
    }

    #[test]
    fn components_of_disjoint_union() {
        let f8a = RibbonGraph::from_cycles(4, &[&[0, 2, 1, 3]]).unwrap();
        let u = theta_a().disjoint_union(&f8a).unwrap();
        let comps = u.connected_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0], theta_a());
        assert_eq!(comps[1], f8a);
        assert!(RibbonGraph::empty().connected_components().is_empty());
        assert_eq!(u.genus(), Err(RibbonError::Disconnected));
    }

    #[test]
    fn valence_profiles() {
        let r = theta_a().valence_profile();
        assert_eq!(r.profile.counts(), &[2]);
        assert_eq!(r.even, 0);
        let f8a = RibbonGraph::from_cycles(4, &[&[0, 2, 1, 3]]).unwrap();
        let r = f8a.valence_profile();
        assert!(r.profile.counts().is_empty());
        assert_eq!(r.even, 1);
        assert!(ValenceProfile::new(vec![2]).satisfies_witten(1, 1));
        assert!(!ValenceProfile::new(vec![0, 1]).satisfies_witten(1, 1));
        let p = ValenceProfile::new(vec![3, 1, 0]);
        assert_eq!(p.counts(), &[3, 1]);
        assert_eq!(p.r(), 1);
        assert_eq!(p.factorial(), 6);
        assert_eq!(p.to_string(), "3,1");
    }
}
