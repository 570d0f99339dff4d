//! Oriented cellular chains, the boundary operator and Witten cycles.
//!
//! A cell is stored in canonical form. Its orientation is a sign `s`
//! relative to the canonical edge order: the orientation form `μ` of the
//! fixed-perimeter slice satisfies `μ ∧ dp_1 ∧ … ∧ dp_n = s · de_0 ∧ … ∧ de_{E-1}`.
//! The boundary orientation of the facet `ℓ_e = 0` is `ι_n μ` for an outward
//! tangent vector `n` (so `n_e < 0`). Since `ι_n dp_i = 0`, restricting
//! `ι_n(s · vol)` to `de_e = 0` leaves `s (-1)^{pos(e)+1} vol_{E∖e}`, and the
//! face sign is this read off in the face's own canonical edge order.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::canon::{canonical_enriched, CanonicalCode, EnrichedCanonicalForm};
use crate::enriched::EnrichedRibbonGraph;
use crate::enumerate::witten_cells;
use crate::error::Result;
use crate::forms::{cell_orientation, perimeter_matrix};
use crate::linalg::permutation_sign;
use crate::ribbon::{RibbonGraph, ValenceProfile};
use crate::scalar::{sign_of, ExactField};

/// One cell of a chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainTerm<T> {
    pub cell: EnrichedRibbonGraph,
    pub orientation: i32,
    pub coefficient: T,
}

impl<T: ExactField> ChainTerm<T> {
    pub fn value(&self) -> T {
        if self.orientation < 0 {
            -self.coefficient.clone()
        } else {
            self.coefficient.clone()
        }
    }
}

/// Formal combination of canonical cells. Coefficients are kept positive and
/// the sign lives in the orientation; zero terms are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedCellChain<T> {
    terms: BTreeMap<CanonicalCode, ChainTerm<T>>,
}

impl<T: ExactField> Default for OrientedCellChain<T> {
    fn default() -> Self {
        OrientedCellChain { terms: BTreeMap::new() }
    }
}

impl<T: ExactField> OrientedCellChain<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `value` times the cell with the reference orientation of `form`.
    pub fn add(&mut self, form: &EnrichedCanonicalForm, value: T) {
        let entry = self.terms.entry(form.code.clone()).or_insert_with(|| ChainTerm {
            cell: form.graph.clone(),
            orientation: 1,
            coefficient: T::zero(),
        });
        let total = entry.value() + value;
        if total.is_zero() {
            self.terms.remove(&form.code);
        } else {
            entry.orientation = sign_of(&total);
            entry.coefficient = total.abs();
        }
    }

    /// Adds a cell given in any labeling; its orientation is relative to that
    /// labeling's edge order. Cells with an orientation-reversing automorphism
    /// are zero and are skipped.
    pub fn add_cell(&mut self, cell: &EnrichedRibbonGraph, orientation: i32, coefficient: T) {
        let form = canonical_enriched(cell);
        if form.orientation_reversing {
            return;
        }
        let sign = orientation * permutation_sign(&form.edge_map());
        let value = if sign < 0 { -coefficient } else { coefficient };
        self.add(&form, value);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CanonicalCode, &ChainTerm<T>)> {
        self.terms.iter()
    }

    pub fn get(&self, code: &CanonicalCode) -> Option<&ChainTerm<T>> {
        self.terms.get(code)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::new();
        for (code, t) in &self.terms {
            if !c.is_zero() {
                let v = t.value() * c.clone();
                out.terms.insert(
                    code.clone(),
                    ChainTerm { cell: t.cell.clone(), orientation: sign_of(&v), coefficient: v.abs() },
                );
            }
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (code, t) in &other.terms {
            let form = EnrichedCanonicalForm {
                code: code.clone(),
                graph: t.cell.clone(),
                dart_map: Vec::new(),
                orientation_reversing: false,
                orbifold_aut_order: code.aut_order,
            };
            out.add(&form, t.value());
        }
        out
    }

    /// Flips the orientation of one cell.
    pub fn flip(&mut self, code: &CanonicalCode) -> bool {
        match self.terms.get_mut(code) {
            Some(t) => {
                t.orientation = -t.orientation;
                true
            }
            None => false,
        }
    }
}

/// A codimension-one face of a cell reached by contracting one edge.
#[derive(Clone, Debug)]
pub struct Incidence {
    pub edge: usize,
    pub face: EnrichedCanonicalForm,
    /// Sign of the induced orientation relative to the face's canonical edge order.
    pub sign: i32,
}

/// The rank of the perimeter matrix restricted to `columns`.
fn perimeter_rank(p: &crate::linalg::Matrix<crate::Rational>, skip: Option<usize>) -> usize {
    match skip {
        None => p.rank(),
        Some(e) => {
            let cols: Vec<usize> = (0..p.cols()).filter(|&c| c != e).collect();
            p.select_columns(&cols).rank()
        }
    }
}

/// Facets of the cell with its reference orientation (sign `+1` in the
/// graph's own edge order). A facet `ℓ_e = 0` exists when the perimeter
/// differentials stay independent after dropping `e`. Cells whose perimeter
/// differentials are dependent have no facets.
pub fn facets(cell: &EnrichedRibbonGraph) -> Result<Vec<Incidence>> {
    let g = cell.visible();
    let p = perimeter_matrix::<crate::Rational>(g);
    let n = g.num_holes();
    if perimeter_rank(&p, None) < n {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for e in 0..g.num_edges() {
        if perimeter_rank(&p, Some(e)) < n {
            continue;
        }
        let (face, edge_map) = cell.contract(e)?;
        let form = canonical_enriched(&face);
        let fmap = form.edge_map();
        let order: Vec<usize> =
            (0..g.num_edges()).filter(|&f| f != e).map(|f| fmap[edge_map[f].expect("surviving edge")]).collect();
        let sign = if e % 2 == 0 { -1 } else { 1 } * permutation_sign(&order);
        out.push(Incidence { edge: e, face: form, sign });
    }
    Ok(out)
}

/// The boundary of a chain. It does not depend on the perimeters: facets are
/// kept combinatorially, without testing whether they meet a given slice.
pub fn boundary_chain<T: ExactField>(chain: &OrientedCellChain<T>) -> Result<OrientedCellChain<T>> {
    let parts: Vec<Result<Vec<(EnrichedCanonicalForm, T)>>> = chain
        .terms
        .par_iter()
        .map(|(_, t)| {
            let v = t.value();
            Ok(facets(&t.cell)?
                .into_iter()
                .filter(|inc| !inc.face.orientation_reversing)
                .map(|inc| {
                    let w = if inc.sign < 0 { -v.clone() } else { v.clone() };
                    (inc.face, w)
                })
                .collect())
        })
        .collect();
    let mut out = OrientedCellChain::new();
    for part in parts {
        for (form, w) in part? {
            out.add(&form, w);
        }
    }
    Ok(out)
}

/// The chain `Σ ±[G] / |Aut G|` over the top cells of a Witten subcomplex,
/// oriented by `Ω^d ∧ dp` at perimeters `p`.
pub fn witten_chain<T: ExactField>(genus: u32, holes: usize, profile: &ValenceProfile, p: &[T]) -> Result<OrientedCellChain<T>> {
    let cells = witten_cells(genus, holes, profile)?;
    let signed: Vec<Result<(EnrichedCanonicalForm, T)>> = cells
        .par_iter()
        .map(|c| {
            let form = canonical_enriched(&EnrichedRibbonGraph::from_nonsingular(c.graph.clone())?);
            let s = cell_orientation(form.graph.visible(), p)?;
            let w = T::one() / T::from_int(form.code.aut_order as i64);
            Ok((form, if s < 0 { -w } else { w }))
        })
        .collect();
    let mut chain = OrientedCellChain::new();
    for r in signed {
        let (form, w) = r?;
        chain.add(&form, w);
    }
    Ok(chain)
}

/// How a facet of a Witten cell arises.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FaceKind {
    /// Two vertices of valences `2t₁+3` and `2t₂+3` merged, `t₁ ≤ t₂`.
    Merge { t1: usize, t2: usize },
    /// A loop contracted to a node with `even` edges on one side and `odd`
    /// edges on the other.
    Node { even: usize, odd: usize },
    Other,
}

impl FaceKind {
    /// The number of top cells meeting such a face, counted with the
    /// automorphism weights `|Aut F| / |Aut G|`.
    pub fn expected_cofaces(&self) -> Option<u64> {
        match *self {
            FaceKind::Merge { t1, t2 } if t1 == t2 => Some((t1 + t2 + 2) as u64),
            FaceKind::Merge { t1, t2 } => Some(2 * (t1 + t2) as u64 + 4),
            FaceKind::Node { even, odd } => Some((even * odd) as u64),
            FaceKind::Other => None,
        }
    }
}

fn classify(face: &EnrichedRibbonGraph, profile: &ValenceProfile) -> FaceKind {
    let g = face.visible();
    if face.is_nonsingular() {
        let valences: Vec<usize> = g.vertices().iter().map(|c| c.len()).collect();
        let even: Vec<usize> = valences.iter().copied().filter(|v| v % 2 == 0).collect();
        if even.len() != 1 {
            return FaceKind::Other;
        }
        let mut missing: Vec<usize> = Vec::new();
        let mut counts = profile.counts().to_vec();
        for v in valences.iter().filter(|v| *v % 2 == 1) {
            let i = (v - 3) / 2;
            if i >= counts.len() || counts[i] == 0 {
                return FaceKind::Other;
            }
            counts[i] -= 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            missing.extend(std::iter::repeat(i).take(c));
        }
        return match missing[..] {
            [t1, t2] if 2 * (t1 + t2) + 4 == even[0] => FaceKind::Merge { t1, t2 },
            _ => FaceKind::Other,
        };
    }
    let orbits = g.vertex_orbits();
    let special: Vec<usize> = face.special_vertices().iter().map(|&d| orbits.cycles[orbits.id[d]].len()).collect();
    match special[..] {
        [x, y] if x % 2 != y % 2 => {
            let (even, odd) = if x % 2 == 0 { (x, y) } else { (y, x) };
            FaceKind::Node { even, odd }
        }
        _ => FaceKind::Other,
    }
}

/// One top cell's contribution to a face.
#[derive(Clone, Debug)]
pub struct Contribution<T> {
    pub cell: String,
    pub edge: usize,
    pub sign: i32,
    pub weight: T,
}

#[derive(Clone, Debug)]
pub struct FaceCertificate<T> {
    pub face: String,
    pub kind: FaceKind,
    pub aut_order: usize,
    pub orientation_reversing: bool,
    pub contributions: Vec<Contribution<T>>,
    /// Signed sum of the contributions; zero for orientation-reversing faces,
    /// which carry no orientation.
    pub net: T,
    /// `Σ_G |Aut F| / |Aut G| · #{e : G/e ≅ F}`.
    pub cofaces: T,
    pub expected_cofaces: Option<u64>,
}

impl<T: ExactField> FaceCertificate<T> {
    pub fn coface_count_matches(&self) -> Option<bool> {
        self.expected_cofaces.map(|x| self.cofaces == T::from_int(x as i64))
    }
}

#[derive(Clone, Debug)]
pub struct WittenCertificate<T> {
    pub genus: u32,
    pub holes: usize,
    pub profile: ValenceProfile,
    pub perimeters: Vec<T>,
    pub num_cells: usize,
    pub is_cycle: bool,
    pub faces: Vec<FaceCertificate<T>>,
}

impl<T: ExactField> WittenCertificate<T> {
    /// Faces whose contributions do not cancel.
    pub fn nonzero_faces(&self) -> Vec<&FaceCertificate<T>> {
        self.faces.iter().filter(|f| !f.net.is_zero()).collect()
    }

    pub fn coface_counts_match(&self) -> bool {
        self.faces.iter().all(|f| f.coface_count_matches() != Some(false))
    }
}

/// Builds the Witten chain, takes its boundary and records every face with
/// the contributions of its cofaces.
pub fn verify_witten_cycle<T: ExactField>(
    genus: u32,
    holes: usize,
    profile: &ValenceProfile,
    p: &[T],
) -> Result<WittenCertificate<T>> {
    let chain = witten_chain(genus, holes, profile, p)?;
    certify_chain(&chain, genus, holes, profile, p)
}

/// Certificate for an arbitrary chain of top cells of a Witten subcomplex.
pub fn certify_chain<T: ExactField>(
    chain: &OrientedCellChain<T>,
    genus: u32,
    holes: usize,
    profile: &ValenceProfile,
    p: &[T],
) -> Result<WittenCertificate<T>> {
    let per_cell: Vec<Result<(String, usize, T, Vec<Incidence>)>> = chain
        .terms
        .par_iter()
        .map(|(code, t)| Ok((code.to_key(), code.aut_order, t.value(), facets(&t.cell)?)))
        .collect();
    let mut faces: BTreeMap<CanonicalCode, FaceCertificate<T>> = BTreeMap::new();
    for r in per_cell {
        let (key, aut, value, incs) = r?;
        for inc in incs {
            let cert = faces.entry(inc.face.code.clone()).or_insert_with(|| {
                let kind = classify(&inc.face.graph, profile);
                FaceCertificate {
                    face: inc.face.code.to_key(),
                    expected_cofaces: kind.expected_cofaces(),
                    kind,
                    aut_order: inc.face.code.aut_order,
                    orientation_reversing: inc.face.orientation_reversing,
                    contributions: Vec::new(),
                    net: T::zero(),
                    cofaces: T::zero(),
                }
            });
            let w = if inc.sign < 0 { -value.clone() } else { value.clone() };
            if !cert.orientation_reversing {
                cert.net = cert.net.clone() + w.clone();
            }
            cert.cofaces = cert.cofaces.clone() + T::from_int(cert.aut_order as i64) / T::from_int(aut as i64);
            cert.contributions.push(Contribution { cell: key.clone(), edge: inc.edge, sign: sign_of(&w), weight: w.abs() });
        }
    }
    let boundary = boundary_chain(chain)?;
    let faces: Vec<FaceCertificate<T>> = faces.into_values().collect();
    debug_assert_eq!(
        boundary.len(),
        faces.iter().filter(|f| !f.net.is_zero()).count()
    );
    Ok(WittenCertificate {
        genus,
        holes,
        profile: profile.clone(),
        perimeters: p.to_vec(),
        num_cells: chain.len(),
        is_cycle: boundary.is_zero(),
        faces,
    })
}

/// The chain of one cell with its reference orientation and coefficient one.
pub fn cell_chain<T: ExactField>(cell: &RibbonGraph) -> Result<OrientedCellChain<T>> {
    let mut c = OrientedCellChain::new();
    c.add_cell(&EnrichedRibbonGraph::from_nonsingular(cell.clone())?, 1, T::one());
    Ok(c)
}

/// Applies the boundary twice.
pub fn boundary_squared<T: ExactField>(chain: &OrientedCellChain<T>) -> Result<OrientedCellChain<T>> {
    boundary_chain(&boundary_chain(chain)?)
}

/// True when the boundary of the chain vanishes.
pub fn verify_chain_is_cycle<T: ExactField>(chain: &OrientedCellChain<T>) -> Result<bool> {
    Ok(boundary_chain(chain)?.is_zero())
}
