//! Complexes of projective left modules over a [`TruncatedAlgebra`].
//!
//! Each summand of `P_i` is `Aχ_p` for a point `p`, spanned by the arrows
//! leaving `p`. A differential entry `b` from summand `g` of `P_i` (at `p_g`) to
//! summand `h` of `P_{i-1}` (at `p_h`) is an element of `χ_{p_g} A χ_{p_h}` and
//! acts by right multiplication: `x·gen_g ↦ Σ_h (x·b_{gh})·gen_h`. Everything is
//! checked one point slice `χ_t P_i` at a time.

use std::collections::HashMap;

use serde::Serialize;

use crate::combinatorics::LatticePoint;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{kernel, rank, Echelon, Pivoting};
use crate::skew_category::{Element, Quotient, TruncatedAlgebra};

/// One differential entry: `(source summand, target summand, element)`.
pub type Entry<F> = (usize, usize, Element<F>);

#[derive(Clone, Debug)]
pub struct ProjectiveComplex<F: Field> {
    /// Summand points of `P_0, P_1, …`.
    pub modules: Vec<Vec<LatticePoint>>,
    /// `differentials[i - 1]` holds the entries of `d_i: P_i → P_{i-1}`.
    pub differentials: Vec<Vec<Entry<F>>>,
}

/// Verdicts of [`ProjectiveComplex::verify`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexReport {
    pub d_squared_zero: bool,
    pub exact: bool,
    /// Homological spots at which exactness was checked.
    pub exact_spots: Vec<usize>,
    pub h0_is_simple: bool,
    pub minimal: bool,
}

impl ComplexReport {
    pub fn passed(&self) -> bool {
        self.d_squared_zero && self.exact && self.h0_is_simple && self.minimal
    }
}

/// The basis `(summand, arrow)` of a slice `χ_t P_i` and its inverse.
struct Slice {
    basis: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl<F: Field> ProjectiveComplex<F> {
    pub fn length(&self) -> usize {
        self.modules.len().saturating_sub(1)
    }

    pub fn module(&self, i: usize) -> &[LatticePoint] {
        self.modules.get(i).map_or(&[], |v| v.as_slice())
    }

    fn slice(&self, alg: &TruncatedAlgebra<F>, i: usize, t: usize) -> Slice {
        let mut basis = Vec::new();
        for (g, p) in self.module(i).iter().enumerate() {
            if let Some(p) = alg.point_index(p) {
                for &x in alg.block(p, t) {
                    basis.push((g, x));
                }
            }
        }
        let index = basis.iter().enumerate().map(|(k, &gx)| (gx, k)).collect();
        Slice { basis, index }
    }

    pub fn slice_dim(&self, alg: &TruncatedAlgebra<F>, i: usize, t: usize) -> usize {
        self.slice(alg, i, t).basis.len()
    }

    fn entries_by_source(&self, i: usize) -> HashMap<usize, Vec<(usize, &Element<F>)>> {
        let mut out: HashMap<usize, Vec<(usize, &Element<F>)>> = HashMap::new();
        if i >= 1 {
            if let Some(d) = self.differentials.get(i - 1) {
                for (g, h, b) in d {
                    out.entry(*g).or_default().push((*h, b));
                }
            }
        }
        out
    }

    /// Matrix of `d_i` on the slice at `t`, as images of the domain basis.
    fn slice_matrix(&self, alg: &TruncatedAlgebra<F>, i: usize, t: usize) -> (usize, Vec<Vec<F::Elem>>) {
        let f = alg.field();
        let dom = self.slice(alg, i, t);
        let cod = self.slice(alg, i - 1, t);
        let entries = self.entries_by_source(i);
        let images = dom
            .basis
            .iter()
            .map(|&(g, x)| {
                let mut v = vec![f.zero(); cod.basis.len()];
                for (h, b) in entries.get(&g).into_iter().flatten() {
                    for (y, c) in b.terms() {
                        for (z, c2) in alg.mul_basis(x, y) {
                            f.add_mul_assign(&mut v[cod.index[&(*h, *z)]], c, c2);
                        }
                    }
                }
                v
            })
            .collect();
        (cod.basis.len(), images)
    }

    /// Rank of `d_i` on the slice at `t` (zero outside `1..=length`).
    pub fn rank_at(&self, alg: &TruncatedAlgebra<F>, i: usize, t: usize) -> usize {
        if i == 0 || i > self.length() {
            return 0;
        }
        let (dim, images) = self.slice_matrix(alg, i, t);
        rank(alg.field(), dim, &images)
    }

    /// `dim χ_t H_i`, treating the complex as zero beyond its length.
    pub fn homology_at(&self, alg: &TruncatedAlgebra<F>, i: usize, t: usize) -> usize {
        self.slice_dim(alg, i, t) - self.rank_at(alg, i, t) - self.rank_at(alg, i + 1, t)
    }

    pub fn homology_dim(&self, alg: &TruncatedAlgebra<F>, i: usize) -> usize {
        (0..alg.points().len()).map(|t| self.homology_at(alg, i, t)).sum()
    }

    /// `d_{i-1} ∘ d_i = 0`, checked on the entries.
    pub fn d_squared_zero(&self, alg: &TruncatedAlgebra<F>) -> bool {
        let f = alg.field();
        for i in 2..=self.length() {
            let lower = self.entries_by_source(i - 1);
            let mut composite: HashMap<(usize, usize), Element<F>> = HashMap::new();
            for (g, h, b) in &self.differentials[i - 1] {
                for (k, c) in lower.get(h).into_iter().flatten() {
                    let bc = alg.multiply(b, c);
                    composite.entry((*g, *k)).or_default().add_scaled(f, &bc, &f.one());
                }
            }
            if composite.values().any(|e| !e.is_zero()) {
                return false;
            }
        }
        true
    }

    /// No entry between summands at the same point has a nonzero unit component.
    pub fn is_minimal(&self, alg: &TruncatedAlgebra<F>) -> bool {
        let f = alg.field();
        for (i, d) in self.differentials.iter().enumerate() {
            for (g, h, b) in d {
                let (p, q) = (&self.modules[i + 1][*g], &self.modules[i][*h]);
                if p != q {
                    continue;
                }
                if let Some(u) = alg.point_index(p).and_then(|p| alg.unit_at(p)) {
                    if !f.is_zero(&b.coefficient(u, f)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Checks `d² = 0`, minimality, `H_0 ≅ 𝕂_λ`, and `H_i = 0` for `i` in `spots`.
    pub fn verify(&self, alg: &TruncatedAlgebra<F>, lambda: &LatticePoint, spots: &[usize]) -> ComplexReport {
        let all: Vec<usize> = (0..alg.points().len()).collect();
        self.verify_on(alg, lambda, spots, &all)
    }

    /// As [`verify`](Self::verify), with the homology checks restricted to the
    /// point slices in `slices`.
    pub fn verify_on(
        &self,
        alg: &TruncatedAlgebra<F>,
        lambda: &LatticePoint,
        spots: &[usize],
        slices: &[usize],
    ) -> ComplexReport {
        let lam = alg.point_index(lambda);
        let h0_is_simple = slices.iter().all(|&t| self.homology_at(alg, 0, t) == usize::from(Some(t) == lam));
        let exact = spots.iter().all(|&i| slices.iter().all(|&t| self.homology_at(alg, i, t) == 0));
        ComplexReport {
            d_squared_zero: self.d_squared_zero(alg),
            exact,
            exact_spots: spots.to_vec(),
            h0_is_simple,
            minimal: self.is_minimal(alg),
        }
    }

    /// Applies `B ⊗_A -` for a quotient `B` of `A`: summands at points killed
    /// in `B` disappear and entries are projected.
    pub fn push_forward(&self, q: &Quotient<F>) -> ProjectiveComplex<F> {
        let alg = &q.algebra;
        let renumber: Vec<Vec<Option<usize>>> = self
            .modules
            .iter()
            .map(|m| {
                let mut next = 0;
                m.iter()
                    .map(|p| {
                        alg.point_index(p).map(|_| {
                            next += 1;
                            next - 1
                        })
                    })
                    .collect()
            })
            .collect();
        let modules = self
            .modules
            .iter()
            .map(|m| m.iter().filter(|p| alg.point_index(p).is_some()).cloned().collect())
            .collect();
        let differentials = self
            .differentials
            .iter()
            .enumerate()
            .map(|(i, d)| {
                d.iter()
                    .filter_map(|(g, h, b)| {
                        let g2 = renumber[i + 1][*g]?;
                        let h2 = renumber[i][*h]?;
                        let b2 = q.project(b);
                        (!b2.is_zero()).then_some((g2, h2, b2))
                    })
                    .collect()
            })
            .collect();
        ProjectiveComplex { modules, differentials }
    }
}

/// Point indices in an order extending dominance (lexicographic in prefix sums).
pub(crate) fn dominance_order(points: &[LatticePoint]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by_key(|&i| points[i].prefix_sums());
    idx
}

/// The first `length + 1` terms of the minimal projective resolution of the
/// simple module at `λ`.
pub fn minimal_resolution_of_simple<F: Field>(
    alg: &TruncatedAlgebra<F>,
    lambda: &LatticePoint,
    length: usize,
    pivoting: Pivoting,
) -> Result<ProjectiveComplex<F>> {
    let f = alg.field();
    let lam = alg.point_index(lambda).ok_or(Error::NotSubset)?;
    let order = dominance_order(alg.points());
    let mut complex = ProjectiveComplex { modules: vec![vec![lambda.clone()]], differentials: Vec::new() };
    // Kernel of the current last map, per slice, in slice coordinates.
    let mut kernels: HashMap<usize, Vec<Vec<F::Elem>>> = HashMap::new();
    for &t in &order {
        if t != lam {
            let d = complex.slice_dim(alg, 0, t);
            let unit_vectors = (0..d)
                .map(|k| {
                    let mut v = vec![f.zero(); d];
                    v[k] = f.one();
                    v
                })
                .collect();
            kernels.insert(t, unit_vectors);
        }
    }
    for i in 0..length {
        let slices: HashMap<usize, Slice> = order.iter().map(|&t| (t, complex.slice(alg, i, t))).collect();
        let mut gens: Vec<(usize, Vec<F::Elem>)> = Vec::new();
        for &t in &order {
            let target = &slices[&t];
            let mut rad = Echelon::new(f.clone(), target.basis.len(), pivoting);
            for &s in &order {
                if s == t {
                    continue;
                }
                let Some(ks) = kernels.get(&s) else { continue };
                let source = &slices[&s];
                for &a in alg.block(s, t) {
                    for k in ks {
                        let mut v = vec![f.zero(); target.basis.len()];
                        for (pos, c) in k.iter().enumerate() {
                            if f.is_zero(c) {
                                continue;
                            }
                            let (g, x) = source.basis[pos];
                            for (y, c2) in alg.mul_basis(a, x) {
                                f.add_mul_assign(&mut v[target.index[&(g, *y)]], c, c2);
                            }
                        }
                        rad.insert(v);
                    }
                }
            }
            if let Some(kt) = kernels.get(&t) {
                for j in pivoting.input_order(kt.len()) {
                    if rad.insert(kt[j].clone()) {
                        gens.push((t, kt[j].clone()));
                    }
                }
            }
        }
        let mut module = Vec::with_capacity(gens.len());
        let mut entries = Vec::new();
        for (g, (t, v)) in gens.iter().enumerate() {
            module.push(alg.points()[*t].clone());
            let basis = &slices[t].basis;
            let mut by_target: HashMap<usize, Element<F>> = HashMap::new();
            for (pos, c) in v.iter().enumerate() {
                let (h, x) = basis[pos];
                by_target.entry(h).or_default().add_term(f, x, c.clone());
            }
            let mut row: Vec<(usize, Element<F>)> = by_target.into_iter().filter(|(_, b)| !b.is_zero()).collect();
            row.sort_by_key(|(h, _)| *h);
            entries.extend(row.into_iter().map(|(h, b)| (g, h, b)));
        }
        complex.modules.push(module);
        complex.differentials.push(entries);
        if i + 1 < length {
            kernels.clear();
            for &t in &order {
                let (dim, images) = complex.slice_matrix(alg, i + 1, t);
                let k = kernel(f, dim, &images, pivoting);
                if !k.is_empty() {
                    kernels.insert(t, k);
                }
            }
        }
    }
    Ok(complex)
}
