#![allow(dead_code)]

pub mod ops_checks;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use ribbonlab::{canonical_code, CanonicalCode, ExactField, Markings, Rational, RibbonGraph};

pub fn q(a: i64, b: i64) -> Rational {
    Rational::from_frac(a, b)
}

pub fn graph(darts: usize, cycles: &[&[usize]]) -> RibbonGraph {
    RibbonGraph::from_cycles(darts, cycles).unwrap()
}

pub fn theta_a() -> RibbonGraph {
    graph(6, &[&[0, 2, 4], &[1, 3, 5]])
}

pub fn theta_b() -> RibbonGraph {
    graph(6, &[&[0, 2, 4], &[1, 5, 3]])
}

pub fn fig8_a() -> RibbonGraph {
    graph(4, &[&[0, 2, 1, 3]])
}

pub fn fig8_b() -> RibbonGraph {
    graph(4, &[&[0, 1, 2, 3]])
}

/// Small graphs used across tests, including a few larger trivalent ones.
pub fn catalog() -> Vec<RibbonGraph> {
    vec![
        theta_a(),
        theta_b(),
        fig8_a(),
        fig8_b(),
        // K4 drawn in the plane
        graph(12, &[&[0, 2, 4], &[1, 6, 8], &[3, 10, 7], &[5, 9, 11]]),
        // the same abstract graph with one twisted vertex
        graph(12, &[&[0, 2, 4], &[1, 8, 6], &[3, 10, 7], &[5, 9, 11]]),
        // one vertex of valence six
        graph(6, &[&[0, 2, 4, 1, 3, 5]]),
        graph(6, &[&[0, 1, 2, 3, 4, 5]]),
        // valence 5 and 3
        graph(8, &[&[0, 2, 4, 1, 6], &[3, 5, 7]]),
    ]
}

/// Cycles of a permutation given as an array, computed without the library.
pub fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut d = s;
        while !seen[d] {
            seen[d] = true;
            c.push(d);
            d = perm[d];
        }
        out.push(c);
    }
    out
}

pub fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// `σ∞ = σ₁ ∘ σ₀⁻¹` for an arbitrary involution `σ₁`.
pub fn face_permutation(sigma0: &[usize], sigma1: &[usize]) -> Vec<usize> {
    let inv = inverse(sigma0);
    (0..sigma0.len()).map(|d| sigma1[inv[d]]).collect()
}

pub fn standard_pairing(n: usize) -> Vec<usize> {
    (0..n).map(|d| d ^ 1).collect()
}

/// Connected components of the group generated by two permutations.
pub fn component_count(a: &[usize], b: &[usize]) -> usize {
    let n = a.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut count = n;
    for d in 0..n {
        for e in [a[d], b[d]] {
            let (x, y) = (find(&mut parent, d), find(&mut parent, e));
            if x != y {
                parent[x] = y;
                count -= 1;
            }
        }
    }
    count
}

/// Visits every permutation of `0..n` in lexicographic order.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        f(&p);
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Partitions of `total` into exactly `parts` parts, each at least `min`, non-increasing.
pub fn partitions(total: usize, parts: usize, min: usize) -> Vec<Vec<usize>> {
    fn go(total: usize, parts: usize, min: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for k in (min..=max.min(total)).rev() {
            if total - k < (parts - 1) * min {
                continue;
            }
            prefix.push(k);
            go(total - k, parts - 1, min, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(total, parts, min, total, &mut Vec::new(), &mut out);
    out
}

/// The permutation whose cycles are consecutive runs of the given lengths.
pub fn block_permutation(lengths: &[usize]) -> Vec<usize> {
    let mut p = Vec::new();
    let mut start = 0;
    for &l in lengths {
        for k in 0..l {
            p.push(start + (k + 1) % l);
        }
        start += l;
    }
    p
}

/// Connected graphs with vertex cycle type `valences`, from perfect matchings
/// of the darts, bucketed by hole count. Each matching is renumbered so that
/// partners become `2k, 2k+1` before its canonical code is taken.
///
/// Conjugating a matching by a permutation that commutes with `σ₀` and fixes
/// dart 0 gives an isomorphic graph, so the partner of dart 0 only needs to
/// range over one dart of each orbit of that group: every other dart of
/// vertex 0, and the first dart of the first vertex of each other valence.
pub fn sweep_matchings(valences: &[usize], wanted_holes: &[usize]) -> BTreeMap<usize, HashSet<CanonicalCode>> {
    let sigma0 = block_permutation(valences);
    let n = sigma0.len();
    let mut firsts: Vec<usize> = (1..valences[0]).collect();
    let mut start = valences[0];
    let mut seen_valences = BTreeSet::new();
    for &v in &valences[1..] {
        if seen_valences.insert(v) {
            firsts.push(start);
        }
        start += v;
    }
    let parts: Vec<BTreeMap<usize, HashSet<CanonicalCode>>> = firsts
        .par_iter()
        .map(|&b| {
            let mut out: BTreeMap<usize, HashSet<CanonicalCode>> = BTreeMap::new();
            let mut sigma1 = vec![usize::MAX; n];
            sigma1[0] = b;
            sigma1[b] = 0;
            matchings(&mut sigma1, &mut |s1| {
                if component_count(&sigma0, s1) != 1 {
                    return;
                }
                let holes = cycles(&face_permutation(&sigma0, s1)).len();
                if !wanted_holes.contains(&holes) {
                    return;
                }
                let g = renumber(&sigma0, s1);
                out.entry(holes).or_default().insert(canonical_code(&g).unwrap());
            });
            out
        })
        .collect();
    let mut merged: BTreeMap<usize, HashSet<CanonicalCode>> = BTreeMap::new();
    for p in parts {
        for (k, v) in p {
            merged.entry(k).or_default().extend(v);
        }
    }
    merged
}

fn matchings(sigma1: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    let Some(a) = sigma1.iter().position(|&x| x == usize::MAX) else {
        f(sigma1);
        return;
    };
    for b in a + 1..sigma1.len() {
        if sigma1[b] == usize::MAX {
            sigma1[a] = b;
            sigma1[b] = a;
            matchings(sigma1, f);
            sigma1[a] = usize::MAX;
            sigma1[b] = usize::MAX;
        }
    }
}

fn renumber(sigma0: &[usize], sigma1: &[usize]) -> RibbonGraph {
    let n = sigma0.len();
    let mut new = vec![usize::MAX; n];
    let mut k = 0;
    for d in 0..n {
        if new[d] == usize::MAX {
            new[d] = k;
            new[sigma1[d]] = k + 1;
            k += 2;
        }
    }
    let mut s = vec![0; n];
    for d in 0..n {
        s[new[d]] = new[sigma0[d]];
    }
    RibbonGraph::new(n, s, Markings::default(), true).unwrap()
}

/// A random relabeling that keeps the pairing `2k ↔ 2k+1`: edges are shuffled
/// and each edge is flipped with probability one half.
pub fn random_pairing_preserving(num_edges: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut edges: Vec<usize> = (0..num_edges).collect();
    edges.shuffle(rng);
    let mut perm = vec![0; 2 * num_edges];
    for (old, &new) in edges.iter().enumerate() {
        let flip = rng.gen_bool(0.5) as usize;
        perm[2 * old] = 2 * new + flip;
        perm[2 * old + 1] = 2 * new + 1 - flip;
    }
    perm
}

pub fn rationals<T: ExactField>(xs: &[i64]) -> Vec<T> {
    xs.iter().map(|&x| T::from_int(x)).collect()
}

/// Number of dart bijections commuting with `σ₀` and `σ₁`, found by trying
/// every image of dart 0 and propagating. Markings must be preserved.
pub fn automorphism_count(g: &RibbonGraph) -> usize {
    let n = g.num_darts();
    let s0 = g.sigma0_array();
    let s1 = standard_pairing(n);
    let hole_id = |x: usize| cycles(&face_permutation(s0, &s1)).iter().position(|c| c.contains(&x)).unwrap();
    let vertex_id = |x: usize| cycles(s0).iter().position(|c| c.contains(&x)).unwrap();
    let mut count = 0;
    'target: for t in 0..n {
        let mut phi = vec![usize::MAX; n];
        phi[0] = t;
        let mut stack = vec![0];
        while let Some(d) = stack.pop() {
            for (a, b) in [(s0[d], s0[phi[d]]), (s1[d], s1[phi[d]])] {
                if phi[a] == usize::MAX {
                    phi[a] = b;
                    stack.push(a);
                } else if phi[a] != b {
                    continue 'target;
                }
            }
        }
        if phi.iter().any(|&x| x == usize::MAX) || inverse_exists(&phi).is_none() {
            continue;
        }
        let holes_ok = g.hole_marking().values().all(|&d| hole_id(phi[d]) == hole_id(d));
        let vertices_ok = g.vertex_marking().values().all(|&d| vertex_id(phi[d]) == vertex_id(d));
        if holes_ok && vertices_ok {
            count += 1;
        }
    }
    count
}

fn inverse_exists(phi: &[usize]) -> Option<()> {
    let mut seen = vec![false; phi.len()];
    for &x in phi {
        if std::mem::replace(&mut seen[x], true) {
            return None;
        }
    }
    Some(())
}

/// Every cell of the `(g, n)` complex: the hole-labeled nonsingular cells and
/// everything reachable from them by elementary contractions, one
/// representative per canonical code.
pub fn complex_cells(genus: u32, holes: usize) -> Vec<ribbonlab::EnrichedRibbonGraph> {
    use ribbonlab::enumerate::{enumerate_graphs, EnumerationParams};
    use ribbonlab::{canonical_enriched, EnrichedRibbonGraph, RibbonError};
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut queue: Vec<EnrichedRibbonGraph> = enumerate_graphs(&EnumerationParams::new(genus, holes).labeled(true))
        .unwrap()
        .into_iter()
        .map(|c| EnrichedRibbonGraph::from_nonsingular(c.graph).unwrap())
        .collect();
    while let Some(g) = queue.pop() {
        if !seen.insert(canonical_enriched(&g).code) {
            continue;
        }
        for e in 0..g.visible().num_edges() {
            match g.contract(e) {
                Ok((h, _)) => queue.push(h),
                Err(RibbonError::LastEdgeOfLastComponent) => {}
                Err(err) => panic!("contraction failed: {err}"),
            }
        }
        out.push(g);
    }
    out
}
