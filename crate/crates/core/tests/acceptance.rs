//! One PASS/FAIL line per acceptance criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::ops_checks::{check_contractions, check_stabilization, random_tailed};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ribbonlab::chain::{boundary_squared, FaceKind};
use ribbonlab::enumerate::{enumerate_graphs, orbifold_euler_characteristic, EnumerationParams};
use ribbonlab::forms::{omega_b_constant, perimeter_matrix, restricted_pfaffian};
use ribbonlab::scalar::sign_of;
use ribbonlab::{
    canonical_code, check_omega_b, kontsevich_volume, verify_witten_cycle, EtaNormalization, Markings,
    OrientedCellChain, Rational, RibbonGraph, ValenceProfile,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t <= limit, || format!("{what} took {t:?}, limit {limit:?}"))?;
    Ok(t)
}

fn odd_cells(genus: u32, holes: usize) -> Vec<RibbonGraph> {
    enumerate_graphs(&EnumerationParams::new(genus, holes).labeled(true))
        .unwrap()
        .into_iter()
        .map(|c| c.graph)
        .filter(|g| g.valence_profile().is_odd_only())
        .collect()
}

fn random_p(n: usize, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    (0..n).map(|_| q(rng.gen_range(1..=40), rng.gen_range(1..=6))).collect()
}

const FORM_CASES: [(u32, usize); 4] = [(1, 1), (0, 3), (0, 4), (1, 2)];

fn orbits_and_euler() -> Outcome {
    let start = Instant::now();
    let mut graphs = 0usize;
    for n in [2, 4, 6, 8] {
        let s1 = standard_pairing(n);
        let mut failure = None;
        for_each_permutation(n, |s0| {
            if failure.is_some() {
                return;
            }
            graphs += 1;
            let g = RibbonGraph::new(n, s0.to_vec(), Markings::default(), true).unwrap();
            let (v, e, f) = (cycles(s0).len(), n / 2, cycles(&face_permutation(s0, &s1)).len());
            let comps = component_count(s0, &s1) as i64;
            let chi = v as i64 - e as i64;
            let genus_total: i64 = g.connected_components().iter().map(|c| c.genus().unwrap() as i64).sum();
            let ok = g.num_vertices() == v
                && g.num_holes() == f
                && g.euler_characteristic() == chi
                && chi + f as i64 == 2 * comps - 2 * genus_total;
            if !ok {
                failure = Some(format!("sigma0 {s0:?}"));
            }
        });
        if let Some(f) = failure {
            return Err(f);
        }
    }
    let t = within(start, Duration::from_secs(60), "sweep")?;
    Ok(format!("{graphs} permutations on ≤ 8 darts in {:.1}s", t.as_secs_f64()))
}

fn euler_characteristics() -> Outcome {
    let chi = |g, n| orbifold_euler_characteristic::<Rational>(g, n).unwrap();
    for (g, n, want) in [(0u32, 3usize, q(1, 1)), (0, 4, q(-1, 1)), (0, 5, q(2, 1)), (1, 1, q(-1, 12)), (1, 2, q(1, 12))] {
        let got = chi(g, n);
        ensure(got == want, || format!("χ({g},{n}) = {got}, want {want}"))?;
    }
    for (g, n) in [(0u32, 3usize), (0, 4), (1, 1)] {
        let factor = q(2 - 2 * g as i64 - n as i64, 1);
        ensure(chi(g, n + 1) == factor * chi(g, n), || format!("recursion fails at ({g},{n})"))?;
    }
    let start = Instant::now();
    let zeta = q(1, 30) / q(4, 1);
    let got = chi(2, 1);
    ensure(got == zeta, || format!("χ(2,1) = {got}, want {zeta}"))?;
    let t = within(start, Duration::from_secs(600), "χ(2,1)")?;
    Ok(format!("χ(2,1) = {got} = ζ(-3) in {:.1}s", t.as_secs_f64()))
}

fn omega_b() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cells = 0;
    for (genus, holes) in FORM_CASES {
        for g in odd_cells(genus, holes) {
            cells += 1;
            let p = random_p(holes, &mut rng);
            for norm in [EtaNormalization::HalfPerimeter, EtaNormalization::Perimeter] {
                ensure(check_omega_b(&g, &p, norm).unwrap(), || format!("ΩB ≠ κ Id on a cell of ({genus},{holes})"))?;
            }
            // on a zero-dimensional slice both sides vanish
            if g.num_edges() == perimeter_matrix::<Rational>(&g).rank() {
                continue;
            }
            let half = omega_b_constant(&g, &p, EtaNormalization::HalfPerimeter).unwrap();
            ensure(half == Some(q(1, 1)), || format!("c = {half:?} under ℓ/(2p)"))?;
            let full = omega_b_constant(&g, &p, EtaNormalization::Perimeter).unwrap();
            ensure(full == Some(q(4, 1)), || format!("c = {full:?} under ℓ/p"))?;
        }
    }
    Ok(format!("{cells} odd cells; ΩB = 1·Id with ẽ = ℓ/(2p), ΩB = 4·Id with ẽ = ℓ/p"))
}

fn pfaffians() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cells = 0;
    for (genus, holes) in FORM_CASES {
        for g in odd_cells(genus, holes).into_iter().filter(|g| g.vertices().iter().all(|v| v.len() == 3)) {
            cells += 1;
            let order: Vec<usize> = (0..g.num_edges()).collect();
            let mut signs = Vec::new();
            for _ in 0..5 {
                let p = random_p(holes, &mut rng);
                let (pf, chart) = restricted_pfaffian(&g, &p, &order, EtaNormalization::default()).unwrap();
                ensure(pf != q(0, 1), || format!("zero Pfaffian on a cell of ({genus},{holes})"))?;
                signs.push(sign_of(&pf) * chart);
            }
            ensure(signs.windows(2).all(|w| w[0] == w[1]), || format!("sign flip on a cell of ({genus},{holes})"))?;
        }
    }
    Ok(format!("{cells} trivalent cells, 5 perimeter vectors each"))
}

fn witten_cycles() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for (genus, holes, counts, p) in [
        (1u32, 2usize, vec![1, 1], vec![q(1, 1), q(2, 1)]),
        (0, 5, vec![3, 1], vec![q(1, 1), q(2, 1), q(3, 1), q(5, 2), q(4, 1)]),
    ] {
        let profile = ValenceProfile::new(counts.clone());
        let cert = verify_witten_cycle(genus, holes, &profile, &p).unwrap();
        ensure(cert.is_cycle, || format!("({genus},{holes}) m={counts:?} has nonzero boundary"))?;
        ensure(cert.coface_counts_match(), || format!("coface counts differ at ({genus},{holes})"))?;
        let merges = cert.faces.iter().filter(|f| matches!(f.kind, FaceKind::Merge { .. })).count();
        let nodes = cert.faces.iter().filter(|f| matches!(f.kind, FaceKind::Node { .. })).count();
        notes.push(format!("({genus},{holes}) m={counts:?}: {} cells, {merges} merge + {nodes} node faces", cert.num_cells));
    }
    let t = within(start, Duration::from_secs(60), "cycle checks")?;
    Ok(format!("{} in {:.1}s", notes.join("; "), t.as_secs_f64()))
}

fn boundary_squared_vanishes() -> Outcome {
    let mut notes = Vec::new();
    for (genus, holes) in [(1u32, 1usize), (1, 2)] {
        let cells = complex_cells(genus, holes);
        let mut all = OrientedCellChain::<Rational>::new();
        for (i, cell) in cells.iter().enumerate() {
            let mut c = OrientedCellChain::<Rational>::new();
            c.add_cell(cell, 1, q(1, 1));
            ensure(boundary_squared(&c).unwrap().is_zero(), || format!("∂∂ ≠ 0 on a cell of ({genus},{holes})"))?;
            all.add_cell(cell, 1, q(i as i64 + 1, 1));
        }
        ensure(boundary_squared(&all).unwrap().is_zero(), || format!("∂∂ ≠ 0 on the ({genus},{holes}) sum"))?;
        notes.push(format!("({genus},{holes}): {} cells", cells.len()));
    }
    Ok(notes.join("; "))
}

fn volumes() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let p = random_p(3, &mut rng);
        let v = kontsevich_volume(0, 3, &p, 0, EtaNormalization::default()).unwrap().normalized;
        ensure(v == q(1, 1), || format!("(0,3) volume {v}"))?;
    }
    let mut ratios = Vec::new();
    let mut report = None;
    for _ in 0..5 {
        let p = random_p(1, &mut rng);
        let r = kontsevich_volume(1, 1, &p, 1, EtaNormalization::default()).unwrap();
        let sq = p[0].clone() * p[0].clone();
        ratios.push((r.raw.clone() / sq.clone(), r.normalized.clone() / sq));
        report = Some(r);
    }
    ensure(ratios.windows(2).all(|w| w[0] == w[1]), || "not homogeneous of degree 2".into())?;
    let (raw, normalized) = ratios[0].clone();
    ensure(normalized == q(1, 24), || format!("normalized constant {normalized}, want 1/24"))?;
    let r = report.unwrap();
    Ok(format!(
        "(0,3) = 1; (1,1)/p² = {raw} with ẽ = ℓ/(2p) (κ = {}), × (4/κ)^d = {} gives {normalized} = ⟨τ₁⟩",
        r.omega_b_constant, r.normalization_factor
    ))
}

fn canonicalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let graphs = catalog();
    for g in &graphs {
        let code = canonical_code(g).unwrap();
        for _ in 0..100 {
            let h = g.relabel(&random_pairing_preserving(g.num_edges(), &mut rng)).unwrap();
            ensure(canonical_code(&h).unwrap() == code, || "relabeling changed the code".into())?;
        }
        ensure((2 * g.num_edges()) % code.aut_order == 0, || format!("aut {} ∤ 2E", code.aut_order))?;
        let brute = automorphism_count(g);
        ensure(brute == code.aut_order, || format!("aut {} vs search {brute}", code.aut_order))?;
    }
    let (a, b) = (canonical_code(&theta_a()).unwrap().aut_order, canonical_code(&fig8_a()).unwrap().aut_order);
    ensure(a == 6 && b == 4, || format!("theta-A {a}, fig8-A {b}"))?;
    Ok(format!("{} catalog graphs × 100 relabelings; theta-A 6, fig8-A 4", graphs.len()))
}

fn stabilization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        check_stabilization(&random_tailed(&mut rng));
    }
    Ok("200 random tailed graphs".into())
}

fn contractions() -> Outcome {
    let counts: Vec<String> = [(1u32, 1usize), (1, 2), (0, 4)]
        .into_iter()
        .map(|(g, n)| format!("({g},{n}): {} cells", check_contractions(g, n)))
        .collect();
    Ok(counts.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("orbit and Euler relations", orbits_and_euler),
        ("orbifold Euler characteristics", euler_characteristics),
        ("ΩB identity", omega_b),
        ("Pfaffian nondegeneracy and orientation", pfaffians),
        ("Witten cycles close", witten_cycles),
        ("∂∂ = 0", boundary_squared_vanishes),
        ("volumes", volumes),
        ("canonicalization", canonicalization),
        ("stabilization bookkeeping", stabilization),
        ("contraction invariants", contractions),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
