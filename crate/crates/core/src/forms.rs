//! Constant-coefficient forms on a cell in edge-length coordinates.
//!
//! A 2-form is stored as the antisymmetric matrix `W` with
//! `ω = Σ_{a<b} W[a][b] de_a ∧ de_b`, so `ω(u, v) = uᵀ W v`. A bivector is
//! stored the same way in the basis `∂_a ∧ ∂_b`. Contractions use the last
//! slot: `ω♭(v) = ω(·, v)` has components `W v`, and `β♯(ξ) = β(·, ξ)` has
//! components `M ξ`. With these conventions `Ω B = κ Id` modulo the
//! perimeter differentials, where `κ` depends on how the side lengths are
//! normalized (see [`EtaNormalization`]).


use crate::error::{Result, RibbonError};
use crate::linalg::{permutation_sign, Matrix};
use crate::ribbon::RibbonGraph;
use crate::scalar::{sign_of, ExactField};

/// Normalization of the side coordinates `ẽ_j` entering `η_i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EtaNormalization {
    /// `ẽ_j = ℓ(e_j) / (2 p_i)`.
    #[default]
    HalfPerimeter,
    /// `ẽ_j = ℓ(e_j) / p_i`.
    Perimeter,
}

impl EtaNormalization {
    /// The constant `κ` in `Ω B = κ Id`.
    pub fn omega_b_constant(self) -> i64 {
        match self {
            EtaNormalization::HalfPerimeter => 1,
            EtaNormalization::Perimeter => 4,
        }
    }

    fn side_scale<T: ExactField>(self, p: &T) -> T {
        match self {
            EtaNormalization::HalfPerimeter => T::one() / (T::from_int(2) * p.clone()),
            EtaNormalization::Perimeter => T::one() / p.clone(),
        }
    }
}

/// An antisymmetric matrix on edges together with the perimeter differentials.
#[derive(Clone, Debug, PartialEq)]
pub struct CellForm<T> {
    pub matrix: Matrix<T>,
    /// Row `i` is `dp_i` for the `i`-th hole of [`RibbonGraph::ordered_holes`].
    pub constraint_rows: Matrix<T>,
}

/// Which hole to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HoleRef<'a> {
    Label(&'a str),
    /// Position in [`RibbonGraph::ordered_holes`].
    Index(usize),
}

/// `P[i][e]` is the number of sides of hole `i` on edge `e`.
pub fn perimeter_matrix<T: ExactField>(cell: &RibbonGraph) -> Matrix<T> {
    let holes = cell.ordered_holes();
    let mut p = Matrix::<T>::zeros(holes.len(), cell.num_edges());
    for (i, h) in holes.iter().enumerate() {
        for &d in h {
            p[(i, d / 2)] = p[(i, d / 2)].clone() + T::one();
        }
    }
    p
}

fn resolve_hole(cell: &RibbonGraph, hole: HoleRef) -> Result<Vec<usize>> {
    let holes = cell.ordered_holes();
    match hole {
        HoleRef::Index(i) => holes.get(i).cloned().ok_or_else(|| RibbonError::NoSuchHole(i.to_string())),
        HoleRef::Label(l) => {
            let &d = cell.hole_marking().get(l).ok_or_else(|| RibbonError::NoSuchHole(l.to_string()))?;
            Ok(holes.into_iter().find(|h| h.contains(&d)).unwrap())
        }
    }
}

/// `η = Σ_{1≤s<t≤k-1} dẽ_s ∧ dẽ_t` over the sides of one hole, read in
/// `sigma_inf` order from its smallest dart.
pub fn eta_form<T: ExactField>(
    cell: &RibbonGraph,
    hole: HoleRef,
    perimeter: &T,
    norm: EtaNormalization,
) -> Result<CellForm<T>> {
    if !perimeter.is_positive() {
        return Err(RibbonError::NonPositivePerimeter);
    }
    let sides = resolve_hole(cell, hole)?;
    let c = norm.side_scale(perimeter);
    let coeff = c.clone() * c;
    let e = cell.num_edges();
    let mut w = Matrix::<T>::zeros(e, e);
    let k = sides.len();
    for s in 0..k.saturating_sub(1) {
        for t in s + 1..k - 1 {
            let (a, b) = (sides[s] / 2, sides[t] / 2);
            if a != b {
                w[(a, b)] = w[(a, b)].clone() + coeff.clone();
                w[(b, a)] = w[(b, a)].clone() - coeff.clone();
            }
        }
    }
    Ok(CellForm { matrix: w, constraint_rows: perimeter_matrix(cell) })
}

fn check_perimeters<T: ExactField>(cell: &RibbonGraph, p: &[T]) -> Result<()> {
    let n = cell.num_holes();
    if p.len() != n {
        return Err(RibbonError::LengthMismatch { expected: n, got: p.len() });
    }
    if p.iter().any(|x| !x.is_positive()) {
        return Err(RibbonError::NonPositivePerimeter);
    }
    Ok(())
}

/// `Ω = Σ p_i² η_i`, with `p` in the order of [`RibbonGraph::ordered_holes`].
pub fn omega_form<T: ExactField>(cell: &RibbonGraph, p: &[T], norm: EtaNormalization) -> Result<CellForm<T>> {
    check_perimeters(cell, p)?;
    let e = cell.num_edges();
    let mut w = Matrix::<T>::zeros(e, e);
    for (i, pi) in p.iter().enumerate() {
        let eta = eta_form(cell, HoleRef::Index(i), pi, norm)?;
        w = w.add(&eta.matrix.scale(&(pi.clone() * pi.clone())));
    }
    let constraint_rows = perimeter_matrix(cell);
    let dim = e - constraint_rows.rank();
    if dim % 2 == 1 {
        return Err(RibbonError::DimensionParity(dim));
    }
    Ok(CellForm { matrix: w, constraint_rows })
}

/// `B(de) = Σ_{i=1}^{2s} (-1)^i ∂[σ₀^i(→e)] + Σ_{j=1}^{2t} (-1)^j ∂[σ₀^j(←e)]`,
/// stored with `B(de_c)` as column `c`.
pub fn bivector_b<T: ExactField>(cell: &RibbonGraph) -> Result<CellForm<T>> {
    let vorb = cell.vertex_orbits();
    if vorb.cycles.iter().any(|c| c.len() % 2 == 0 || c.len() < 3) {
        return Err(RibbonError::EvenValence);
    }
    let e = cell.num_edges();
    let mut m = Matrix::<T>::zeros(e, e);
    for c in 0..e {
        for start in [2 * c, 2 * c + 1] {
            let valence = vorb.cycles[vorb.id[start]].len();
            let mut d = start;
            for i in 1..valence {
                d = cell.sigma0(d);
                let f = d / 2;
                if i % 2 == 0 {
                    m[(f, c)] = m[(f, c)].clone() + T::one();
                } else {
                    m[(f, c)] = m[(f, c)].clone() - T::one();
                }
            }
        }
    }
    Ok(CellForm { matrix: m, constraint_rows: perimeter_matrix(cell) })
}

/// True when every column of `M` lies in the row space of `constraints`.
fn columns_in_row_space<T: ExactField>(m: &Matrix<T>, constraints: &Matrix<T>) -> bool {
    (0..m.cols()).all(|c| constraints.row_space_contains(&m.column(c)))
}

/// Checks `Ω B = κ Id` modulo the perimeter differentials, with `κ` fixed by `norm`.
pub fn check_omega_b<T: ExactField>(cell: &RibbonGraph, p: &[T], norm: EtaNormalization) -> Result<bool> {
    let b = bivector_b::<T>(cell)?;
    let omega = omega_form(cell, p, norm)?;
    Ok(check_product(&omega.matrix, &b.matrix, &omega.constraint_rows, &T::from_int(norm.omega_b_constant())))
}

/// `W M - κ Id ≡ 0` modulo the rows of `constraints`.
pub fn check_product<T: ExactField>(w: &Matrix<T>, m: &Matrix<T>, constraints: &Matrix<T>, kappa: &T) -> bool {
    let n = w.rows();
    let residual = w.mul(m).sub(&Matrix::identity(n).scale(kappa));
    columns_in_row_space(&residual, constraints)
}

/// The scalar `λ` with `Ω B ≡ λ Id` modulo the perimeter differentials, if any.
pub fn omega_b_constant<T: ExactField>(cell: &RibbonGraph, p: &[T], norm: EtaNormalization) -> Result<Option<T>> {
    let b = bivector_b::<T>(cell)?;
    let omega = omega_form(cell, p, norm)?;
    let prod = omega.matrix.mul(&b.matrix);
    let tangent = omega.constraint_rows.nullspace();
    let Some(t) = tangent.first() else {
        return Ok(Some(T::zero()));
    };
    let row = prod.transpose().mul_vec(t);
    let j = t.iter().position(|x| !x.is_zero()).expect("nonzero basis vector");
    let lambda = row[j].clone() / t[j].clone();
    Ok(check_product(&omega.matrix, &b.matrix, &omega.constraint_rows, &lambda).then_some(lambda))
}

/// A parametrization of the fixed-perimeter slice: the pivot edges `J` are
/// solved for in terms of the free edges `K`.
#[derive(Clone, Debug)]
pub struct SliceChart<T> {
    pub pivots: Vec<usize>,
    pub free: Vec<usize>,
    /// `basis[k]` is the tangent vector moving free coordinate `k`.
    pub basis: Vec<Vec<T>>,
    /// Reduced row echelon form of the constraint rows.
    pub rref: Matrix<T>,
}

impl<T: ExactField> SliceChart<T> {
    pub fn new(constraints: &Matrix<T>) -> Self {
        let (r, pivots) = constraints.rref();
        let e = constraints.cols();
        let free: Vec<usize> = (0..e).filter(|c| !pivots.contains(c)).collect();
        let basis = free
            .iter()
            .map(|&f| {
                let mut v = vec![T::zero(); e];
                v[f] = T::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(i, f)].clone();
                }
                v
            })
            .collect();
        SliceChart { pivots, free, basis, rref: r }
    }

    /// Gram matrix `A[a][b] = ω(v_a, v_b)` of a 2-form on the slice basis.
    pub fn restrict(&self, w: &Matrix<T>) -> Matrix<T> {
        let d = self.basis.len();
        let mut a = Matrix::zeros(d, d);
        for i in 0..d {
            let wi = w.transpose().mul_vec(&self.basis[i]);
            for j in 0..d {
                a[(i, j)] = wi.iter().zip(&self.basis[j]).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
            }
        }
        a
    }
}

/// Pfaffian of `Ω` restricted to the slice, in the chart of the given edge order.
pub fn restricted_pfaffian<T: ExactField>(
    cell: &RibbonGraph,
    p: &[T],
    edge_order: &[usize],
    norm: EtaNormalization,
) -> Result<(T, i32)> {
    let omega = omega_form(cell, p, norm)?;
    let e = cell.num_edges();
    let mut seen = vec![false; e];
    if edge_order.len() != e {
        return Err(RibbonError::LengthMismatch { expected: e, got: edge_order.len() });
    }
    for &x in edge_order {
        if x >= e || std::mem::replace(&mut seen[x], true) {
            return Err(RibbonError::NotAPermutation);
        }
    }
    let rows: Vec<usize> = (0..e).collect();
    let w = omega.matrix.select(&rows, edge_order).transpose().select(&rows, edge_order).transpose();
    let pm = omega.constraint_rows.select_columns(edge_order);
    let chart = SliceChart::new(&pm);
    if chart.pivots.len() != pm.rows() {
        return Err(RibbonError::Degenerate);
    }
    let pf = chart.restrict(&w).pfaffian();
    let det_sign = sign_of(&pm.select_columns(&chart.pivots).determinant());
    let order: Vec<usize> = chart.free.iter().chain(&chart.pivots).copied().collect();
    Ok((pf, det_sign * permutation_sign(&order)))
}

/// Sign of `Ω^d ∧ dp_1 ∧ … ∧ dp_n` against `de_{o_1} ∧ … ∧ de_{o_E}` for the
/// edge order `o`.
pub fn orientation_sign<T: ExactField>(
    cell: &RibbonGraph,
    p: &[T],
    edge_order: &[usize],
    norm: EtaNormalization,
) -> Result<i32> {
    let (pf, chart_sign) = restricted_pfaffian(cell, p, edge_order, norm)?;
    if pf.is_zero() {
        return Err(RibbonError::Degenerate);
    }
    Ok(sign_of(&pf) * chart_sign)
}

/// Orientation sign in the graph's own edge order.
pub fn cell_orientation<T: ExactField>(cell: &RibbonGraph, p: &[T]) -> Result<i32> {
    let order: Vec<usize> = (0..cell.num_edges()).collect();
    orientation_sign(cell, p, &order, EtaNormalization::default())
}
