use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use ribbonlab::ops::{close_hole, contract_edge, forget_univalent, open_univalent_vertex, quotient, stabilize, valence_histogram, Stabilizer};
use ribbonlab::{isomorphic, Markings, MetricGraph, Rational, RibbonGraph};

use super::*;

pub fn trivalent_count(g: &RibbonGraph) -> usize {
    valence_histogram(g).get(&3).copied().unwrap_or(0)
}

pub fn genus_sum(g: &RibbonGraph) -> u32 {
    g.connected_components().iter().map(|c| c.genus().unwrap()).sum()
}

pub fn random_tailed(rng: &mut impl Rng) -> MetricGraph {
    loop {
        let edges = rng.gen_range(2..=6);
        let n = 2 * edges;
        let tip = rng.gen_range(0..n);
        let mut rest: Vec<usize> = (0..n).filter(|&d| d != tip).collect();
        rest.shuffle(rng);
        let mut sizes = Vec::new();
        let mut left = rest.len();
        while left > 0 {
            let k = if left <= 5 { left } else { rng.gen_range(3..=left - 3) };
            sizes.push(k);
            left -= k;
        }
        let mut sigma0 = vec![0; n];
        sigma0[tip] = tip;
        let mut at = 0;
        for k in sizes {
            let cyc = &rest[at..at + k];
            for j in 0..k {
                sigma0[cyc[j]] = cyc[(j + 1) % k];
            }
            at += k;
        }
        if component_count(&sigma0, &standard_pairing(n)) != 1 {
            continue;
        }
        let plain = RibbonGraph::new(n, sigma0.clone(), Markings::default(), true).unwrap();
        let mut markings = Markings::default();
        for (i, h) in plain.holes().iter().enumerate() {
            markings.holes.insert(format!("x{}", i + 1), h[0]);
        }
        markings.vertices.insert("t".into(), tip);
        let g = RibbonGraph::new(n, sigma0, markings, true).unwrap();
        let lengths = (0..edges).map(|_| q(rng.gen_range(1..=9), rng.gen_range(1..=4))).collect();
        return MetricGraph::new(g, lengths).unwrap();
    }
}

/// Inserts a bivalent vertex labeled `u` in the middle of edge `k`.
pub fn subdivide(g: &MetricGraph, k: usize) -> MetricGraph {
    let gr = g.graph();
    let n = gr.num_darts();
    let b = 2 * k + 1;
    let mut sigma0 = gr.sigma0_array().to_vec();
    sigma0.extend([0, 0]);
    let pred = gr.sigma0_inv(b);
    let succ = gr.sigma0(b);
    sigma0[pred] = n + 1;
    sigma0[n + 1] = succ;
    sigma0[b] = n;
    sigma0[n] = b;
    let mut markings = gr.markings();
    markings.vertices.insert("u".into(), b);
    let graph = RibbonGraph::new(n + 2, sigma0, markings, true).unwrap();
    let mut lengths = g.lengths().to_vec();
    let half = lengths[k].clone() / q(2, 1);
    lengths[k] = half.clone();
    lengths.push(half);
    MetricGraph::new(graph, lengths).unwrap()
}

pub fn without_label(g: &RibbonGraph, label: &str) -> RibbonGraph {
    let mut m = g.markings();
    m.vertices.remove(label);
    m.holes.remove(label);
    g.with_markings(m).unwrap()
}

/// Stabilization, forgetful and vertex-opening bookkeeping on one random
/// graph with a single tail whose tip is vertex-marked `t`.
pub fn check_stabilization(g: &MetricGraph) {
    let gr = g.graph();
    let genus = gr.genus().unwrap();
    let tip = gr.tail_tips()[0];

    for (generator, added, tails) in [(Stabilizer::S1, 3, 0), (Stabilizer::S2, 4, 1)] {
        let s = stabilize(&g, generator).unwrap();
        let (fixed, _) = generator.graph::<Rational>();
        assert_eq!(s.graph().genus().unwrap(), genus + 1);
        assert_eq!(trivalent_count(s.graph()), trivalent_count(gr) + added);
        assert_eq!(s.graph().tail_tips().len(), tails);
        assert_eq!(s.graph().num_holes(), gr.num_holes());
        assert_eq!(
            s.graph().euler_characteristic(),
            gr.euler_characteristic() + fixed.graph().euler_characteristic() - 1
        );
        let labels: BTreeSet<_> = s.graph().hole_marking().keys().cloned().collect();
        let before: BTreeSet<_> = gr.hole_marking().keys().cloned().collect();
        assert_eq!(labels, before);
    }

    // valence one: label dropped and the tail contracted
    let f = forget_univalent(&g, "t").unwrap();
    let expected = quotient(&without_label(gr, "t"), &[tip / 2], true).unwrap();
    assert_eq!(f.graph(), &expected);
    assert_eq!(f.total_length(), g.total_length() - g.length(tip / 2).clone());
    assert_eq!(f.graph().genus().unwrap(), genus);

    // opening and closing again
    let eps = q(1, 1000);
    let opened = open_univalent_vertex(&g, "t", &eps).unwrap();
    assert_eq!(opened.graph().num_holes(), gr.num_holes() + 1);
    assert_eq!(opened.graph().genus().unwrap(), genus);
    assert_eq!(trivalent_count(opened.graph()), trivalent_count(gr) + 1);
    assert!(opened.graph().tail_tips().is_empty());
    let closed = close_hole(&opened, "t").unwrap();
    assert_eq!(&closed, g);
    assert_eq!(forget_univalent(&closed, "t").unwrap(), f.clone());

    // valence two: the two edges merge
    let k = (0..gr.num_edges()).find(|&e| e != tip / 2).unwrap();
    let sub = subdivide(&f, k.min(f.graph().num_edges() - 1));
    let merged = forget_univalent(&sub, "u").unwrap();
    assert!(isomorphic(merged.graph(), f.graph()));
    assert_eq!(merged.total_length(), f.total_length());

    // valence three or more: only the label goes
    let v = gr.vertices().into_iter().find(|c| c.len() >= 3).unwrap();
    let mut m = without_label(gr, "t").markings();
    m.vertices.insert("w".into(), v[0]);
    let marked = MetricGraph::new(gr.with_markings(m).unwrap(), g.lengths().to_vec()).unwrap();
    let dropped = forget_univalent(&marked, "w").unwrap();
    assert_eq!(dropped.graph(), &without_label(gr, "t"));
}

/// Contraction invariants over every visible edge of every cell of the
/// `(g, n)` complex. Returns the number of cells visited.
pub fn check_contractions(genus: u32, holes: usize) -> usize {
    let cells = complex_cells(genus, holes);
    assert!(cells.iter().any(|c| !c.is_nonsingular()), "degenerate cells at ({genus},{holes})");
    for cell in &cells {
        assert_eq!(cell.total_genus().unwrap(), genus);
        let vis = cell.visible();
        for e in 0..vis.num_edges() {
            let lone = vis.component_darts().iter().any(|c| c.len() == 2 && c.contains(&(2 * e)));
            if !vis.is_loop(e) && !lone {
                let bare = vis.with_markings(Markings::default()).unwrap();
                let c = contract_edge(&MetricGraph::unit(bare.clone()), e).unwrap();
                let c = c.graph();
                assert_eq!(genus_sum(c), genus_sum(&bare));
                assert_eq!(c.num_holes(), bare.num_holes());
                assert_eq!(c.num_vertices() + 1, bare.num_vertices());
                assert_eq!(c.num_edges() + 1, bare.num_edges());
            }
            let Ok((h, _)) = cell.contract(e) else { continue };
            h.check().unwrap();
            assert_eq!(h.total_genus().unwrap(), genus);
            assert_eq!(h.labels(), cell.labels());
        }
    }
    cells.len()
}
