//! Exact polytope volumes and integrals of `Ω^d / d!` over moduli slices.

use rayon::prelude::*;

use crate::canon::CanonicalCode;
use crate::enumerate::{enumerate_graphs, witten_cells, EnumerationParams};
use crate::error::{Result, RibbonError};
use crate::forms::{perimeter_matrix, restricted_pfaffian, EtaNormalization};
use crate::ribbon::ValenceProfile;
use crate::scalar::ExactField;

/// A half-space `a · x ≤ b`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace<T> {
    pub a: Vec<T>,
    pub b: T,
}

/// Scales a constraint so that its first nonzero coefficient is ±1.
fn normalized<T: ExactField>(h: &HalfSpace<T>) -> Option<HalfSpace<T>> {
    let lead = h.a.iter().find(|x| !x.is_zero())?.abs();
    Some(HalfSpace { a: h.a.iter().map(|x| x.clone() / lead.clone()).collect(), b: h.b.clone() / lead })
}

/// Volume of `{x ∈ ℝ^D : a_i · x ≤ b_i}` by Lasserre's recursion. The
/// polytope must be bounded. A facet `a · x = b` is projected along a
/// coordinate `j` with `a_j ≠ 0`, which turns its `(D-1)`-volume divided by
/// `|a|` into the projected volume divided by `|a_j|`.
pub fn polytope_volume<T: ExactField>(dim: usize, constraints: &[HalfSpace<T>]) -> T {
    let mut hs: Vec<HalfSpace<T>> = Vec::new();
    for h in constraints {
        match normalized(h) {
            None if h.b.is_negative() => return T::zero(),
            None => {}
            Some(n) if !hs.contains(&n) => hs.push(n),
            Some(_) => {}
        }
    }
    if dim == 0 {
        return T::one();
    }
    if dim == 1 {
        let mut lo: Option<T> = None;
        let mut hi: Option<T> = None;
        for h in &hs {
            let bound = h.b.clone() / h.a[0].clone();
            if h.a[0].is_positive() {
                hi = Some(match hi {
                    Some(x) if x < bound => x,
                    _ => bound,
                });
            } else {
                lo = Some(match lo {
                    Some(x) if x > bound => x,
                    _ => bound,
                });
            }
        }
        let (lo, hi) = (lo.expect("bounded polytope"), hi.expect("bounded polytope"));
        return if hi > lo { hi - lo } else { T::zero() };
    }
    let mut total = T::zero();
    for (i, h) in hs.iter().enumerate() {
        if h.b.is_zero() {
            continue;
        }
        let j = h.a.iter().position(|x| !x.is_zero()).unwrap();
        let aj = h.a[j].clone();
        let project = |g: &HalfSpace<T>| {
            let f = g.a[j].clone() / aj.clone();
            let a: Vec<T> = (0..dim).filter(|&k| k != j).map(|k| g.a[k].clone() - f.clone() * h.a[k].clone()).collect();
            HalfSpace { a, b: g.b.clone() - f * h.b.clone() }
        };
        let facet: Vec<HalfSpace<T>> = hs.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, g)| project(g)).collect();
        total = total + h.b.clone() / aj.abs() * polytope_volume(dim - 1, &facet);
    }
    total / T::from_int(dim as i64)
}

/// Contribution of one cell to a volume.
#[derive(Clone, Debug)]
pub struct CellVolume<T> {
    pub code: CanonicalCode,
    pub pfaffian: T,
    pub polytope_volume: T,
    /// `|Pf| · vol / |Aut|`.
    pub contribution: T,
}

/// Result of [`kontsevich_volume`].
#[derive(Clone, Debug)]
pub struct VolumeReport<T> {
    pub genus: u32,
    pub holes: usize,
    pub degree: usize,
    pub perimeters: Vec<T>,
    /// The side-length normalization used for `Ω`.
    pub eta_normalization: EtaNormalization,
    /// `κ` in `Ω B = κ Id` for that normalization.
    pub omega_b_constant: i64,
    /// `Σ |Pf| · vol / |Aut|` with `Ω` as normalized above.
    pub raw: T,
    /// `(4/κ)^d`, which rescales `Ω` to the form with `Ω B = 4 Id`.
    pub normalization_factor: T,
    pub normalized: T,
    pub cells: Vec<CellVolume<T>>,
}

fn check_inputs<T: ExactField>(genus: u32, holes: usize, p: &[T], degree: usize) -> Result<()> {
    let top = 3 * genus as i64 - 3 + holes as i64;
    if top < 0 || degree as i64 != top {
        return Err(RibbonError::WrongDegree { expected: top.max(0) as usize, got: degree });
    }
    if p.len() != holes {
        return Err(RibbonError::LengthMismatch { expected: holes, got: p.len() });
    }
    if p.iter().any(|x| !x.is_positive()) {
        return Err(RibbonError::NonPositivePerimeter);
    }
    Ok(())
}

/// `∫ Ω^d / d!` over the slice of hole-labeled metric graphs with perimeters
/// `p`, summed over trivalent cells with weight `1 / |Aut|`. In degree zero
/// every cell is counted once if `p` lies in it, so that perimeters on a wall
/// between cells still give one point.
pub fn kontsevich_volume<T: ExactField>(
    genus: u32,
    holes: usize,
    p: &[T],
    degree: usize,
    norm: EtaNormalization,
) -> Result<VolumeReport<T>> {
    check_inputs(genus, holes, p, degree)?;
    let cells = if degree == 0 {
        enumerate_graphs(&EnumerationParams::new(genus, holes).labeled(true))?
    } else {
        witten_cells(genus, holes, &ValenceProfile::trivalent(genus, holes))?
    };
    let parts: Vec<Result<Option<CellVolume<T>>>> =
        cells.par_iter().map(|c| cell_volume(&c.graph, &c.code, p, norm)).collect();
    let mut out = Vec::new();
    for part in parts {
        if let Some(cv) = part? {
            out.push(cv);
        }
    }
    let raw = out.iter().fold(T::zero(), |acc, c| acc + c.contribution.clone());
    let kappa = norm.omega_b_constant();
    let ratio = T::from_int(4) / T::from_int(kappa);
    let factor = (0..degree).fold(T::one(), |acc, _| acc * ratio.clone());
    Ok(VolumeReport {
        genus,
        holes,
        degree,
        perimeters: p.to_vec(),
        eta_normalization: norm,
        omega_b_constant: kappa,
        normalized: raw.clone() * factor.clone(),
        raw,
        normalization_factor: factor,
        cells: out,
    })
}

/// The integral over one cell, or `None` when the slice misses it.
pub fn cell_volume<T: ExactField>(
    cell: &crate::ribbon::RibbonGraph,
    code: &CanonicalCode,
    p: &[T],
    norm: EtaNormalization,
) -> Result<Option<CellVolume<T>>> {
    let pm = perimeter_matrix::<T>(cell);
    let e = cell.num_edges();
    let (r, pivots) = pm.rref();
    if pivots.len() < pm.rows() {
        return zero_dimensional(cell, code, p);
    }
    let rhs = pm.select_columns(&pivots).solve(p).ok_or(RibbonError::Degenerate)?;
    let free: Vec<usize> = (0..e).filter(|c| !pivots.contains(c)).collect();
    let aut = T::from_int(code.aut_order as i64);
    if free.is_empty() {
        if rhs.iter().all(|x| x.is_positive()) {
            return Ok(Some(CellVolume {
                code: code.clone(),
                pfaffian: T::one(),
                polytope_volume: T::one(),
                contribution: T::one() / aut,
            }));
        }
        return Ok(None);
    }
    let d = free.len();
    let mut hs = Vec::new();
    for k in 0..d {
        let mut a = vec![T::zero(); d];
        a[k] = -T::one();
        hs.push(HalfSpace { a, b: T::zero() });
    }
    for (i, _) in pivots.iter().enumerate() {
        let a: Vec<T> = free.iter().map(|&f| r[(i, f)].clone()).collect();
        hs.push(HalfSpace { a, b: rhs[i].clone() });
    }
    let vol = polytope_volume(d, &hs);
    if vol.is_zero() {
        return Ok(None);
    }
    let order: Vec<usize> = (0..e).collect();
    let (pf, _) = restricted_pfaffian(cell, p, &order, norm)?;
    let contribution = pf.abs() * vol.clone() / aut;
    Ok(Some(CellVolume { code: code.clone(), pfaffian: pf, polytope_volume: vol, contribution }))
}

/// Cells whose perimeter map is not onto: counted only in degree zero, when
/// the metric is unique and strictly positive.
fn zero_dimensional<T: ExactField>(
    cell: &crate::ribbon::RibbonGraph,
    code: &CanonicalCode,
    p: &[T],
) -> Result<Option<CellVolume<T>>> {
    let pm = perimeter_matrix::<T>(cell);
    if !pm.nullspace().is_empty() {
        return Ok(None);
    }
    match pm.solve(p) {
        Some(l) if l.iter().all(|x| x.is_positive()) => Ok(Some(CellVolume {
            code: code.clone(),
            pfaffian: T::one(),
            polytope_volume: T::one(),
            contribution: T::one() / T::from_int(code.aut_order as i64),
        })),
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(a: i64, b: i64) -> Rational {
        Rational::from_frac(a, b)
    }

    fn half(a: Vec<i64>, b: i64) -> HalfSpace<Rational> {
        HalfSpace { a: a.into_iter().map(|x| q(x, 1)).collect(), b: q(b, 1) }
    }

    #[test]
    fn simplex_and_box() {
        let simplex = vec![half(vec![-1, 0], 0), half(vec![0, -1], 0), half(vec![1, 1], 2)];
        assert_eq!(polytope_volume(2, &simplex), q(2, 1));
        let cube = vec![
            half(vec![-1, 0, 0], 0),
            half(vec![0, -1, 0], 0),
            half(vec![0, 0, -1], 0),
            half(vec![1, 0, 0], 1),
            half(vec![0, 2, 0], 4),
            half(vec![0, 0, 1], 3),
        ];
        assert_eq!(polytope_volume(3, &cube), q(6, 1));
    }

    #[test]
    fn redundant_constraints_do_not_count() {
        let square = vec![
            half(vec![-1, 0], 0),
            half(vec![0, -1], 0),
            half(vec![1, 0], 1),
            half(vec![2, 0], 2),
            half(vec![0, 1], 1),
            half(vec![1, 1], 5),
        ];
        assert_eq!(polytope_volume(2, &square), q(1, 1));
    }

    #[test]
    fn pair_of_pants_is_a_point() {
        for p in [[1, 1, 1], [1, 2, 9], [3, 4, 7]] {
            let p: Vec<Rational> = p.iter().map(|&x| q(x, 1)).collect();
            let r = kontsevich_volume(0, 3, &p, 0, EtaNormalization::default()).unwrap();
            assert_eq!(r.normalized, q(1, 1));
        }
    }

    #[test]
    fn once_punctured_torus() {
        let r = kontsevich_volume(1, 1, &[q(6, 1)], 1, EtaNormalization::HalfPerimeter).unwrap();
        assert_eq!(r.raw, q(36, 96));
        assert_eq!(r.normalized, q(36, 24));
        let s = kontsevich_volume(1, 1, &[q(6, 1)], 1, EtaNormalization::Perimeter).unwrap();
        assert_eq!(s.raw, r.normalized);
        assert!(matches!(
            kontsevich_volume(1, 1, &[q(6, 1)], 2, EtaNormalization::default()),
            Err(RibbonError::WrongDegree { expected: 1, got: 2 })
        ));
    }
}
