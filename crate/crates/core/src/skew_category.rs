//! Finite point algebras cut out of the skew product of the Kostant form with
//! the functions on `Z^n`.
//!
//! A basis element is a [`BasedArrow`]: a PBW monomial `a` together with a base
//! point `y`, read as an arrow `y → y + deg(a)`. Two arrows compose when the
//! source of the left one is the target of the right one:
//!
//! ```text
//! (a₁ at y₁) · (a₂ at y₂) = (a₁a₂ at y₂)   if y₁ = y₂ + deg(a₂), else 0.
//! ```
//!
//! [`TruncatedAlgebra`] stores such an algebra on a finite point set together
//! with its full structure constants. Convex point sets are truncated directly;
//! everything else is obtained by quotienting by ideals generated by point
//! idempotents.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    column_monoid_generators, enumerate_compositions, enumerate_lambda1, enumerate_m_k, enumerate_t_all,
    convex_hull, is_convex, monoid_leq, order_k_compare, psi_membership, LatticePoint, TriMatrix,
};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::kostant::{graded_component_basis, monomial_of_trimatrix, Kostant, PBWMonomial};
use crate::linalg::{Echelon, Pivoting};

/// The basis element `a χ_y`, an arrow from `y` to `y + deg(a)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasedArrow {
    #[serde(rename = "exponents")]
    pub monomial: PBWMonomial,
    pub base: LatticePoint,
}

impl BasedArrow {
    pub fn new(monomial: PBWMonomial, base: LatticePoint) -> Self {
        BasedArrow { monomial, base }
    }

    /// The point idempotent `χ_y`.
    pub fn unit(base: LatticePoint) -> Self {
        BasedArrow { monomial: PBWMonomial::one(base.n()), base }
    }

    pub fn source(&self) -> &LatticePoint {
        &self.base
    }

    pub fn target(&self) -> LatticePoint {
        &self.base + &self.monomial.degree()
    }

    pub fn is_unit(&self) -> bool {
        self.monomial.is_one()
    }
}

/// Product of two based arrows, as a list of arrows (all at the base of `a2`).
pub fn arrow_multiply<F: Field>(
    kostant: &Kostant,
    a1: &BasedArrow,
    a2: &BasedArrow,
    field: &F,
) -> Result<Vec<(BasedArrow, F::Elem)>> {
    if a1.base != a2.target() {
        return Ok(Vec::new());
    }
    let prod = kostant.multiply_monomials(&a1.monomial, &a2.monomial, field)?;
    Ok(prod
        .terms()
        .map(|(m, c)| (BasedArrow::new(m.clone(), a2.base.clone()), c.clone()))
        .collect())
}

/// The T-completion test: the upper-triangular matrix with off-diagonal part
/// taken from `m` and diagonal `k_jj = μ_j - Σ_{i<j} k_ij`, if all entries are
/// non-negative and `μ` is a composition.
pub fn t_completion(m: &PBWMonomial, mu: &LatticePoint) -> Option<TriMatrix> {
    let n = m.n();
    if mu.n() != n || mu.0.iter().any(|&x| x < 0) {
        return None;
    }
    let mut k = TriMatrix::zeros(n);
    for j in 1..=n {
        let mut diag = mu.0[j - 1];
        for i in 1..j {
            let e = m.exponent(i, j) as u64;
            k.0[i - 1][j - 1] = e;
            diag -= e as i64;
        }
        if diag < 0 {
            return None;
        }
        k.0[j - 1][j - 1] = diag as u64;
    }
    Some(k)
}

/// A sparse element of a [`TruncatedAlgebra`], keyed by basis index.
#[derive(Clone, Debug)]
pub struct Element<F: Field> {
    terms: BTreeMap<usize, F::Elem>,
}

impl<F: Field> PartialEq for Element<F> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<F: Field> Eq for Element<F> {}

impl<F: Field> Default for Element<F> {
    fn default() -> Self {
        Element { terms: BTreeMap::new() }
    }
}

impl<F: Field> Element<F> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(i: usize, field: &F) -> Self {
        let mut e = Self::zero();
        e.add_term(field, i, field.one());
        e
    }

    pub fn from_terms(field: &F, terms: impl IntoIterator<Item = (usize, F::Elem)>) -> Self {
        let mut e = Self::zero();
        for (i, c) in terms {
            e.add_term(field, i, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &F::Elem)> {
        self.terms.iter().map(|(&i, c)| (i, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, i: usize, field: &F) -> F::Elem {
        self.terms.get(&i).cloned().unwrap_or_else(|| field.zero())
    }

    pub fn add_term(&mut self, field: &F, i: usize, c: F::Elem) {
        if field.is_zero(&c) {
            return;
        }
        let slot = self.terms.entry(i).or_insert_with(|| field.zero());
        *slot = field.add(slot, &c);
        if field.is_zero(slot) {
            self.terms.remove(&i);
        }
    }

    pub fn add_scaled(&mut self, field: &F, other: &Self, c: &F::Elem) {
        for (&i, x) in &other.terms {
            self.add_term(field, i, field.mul(c, x));
        }
    }

    pub fn sub(&self, other: &Self, field: &F) -> Self {
        let mut out = self.clone();
        out.add_scaled(field, other, &field.neg(&field.one()));
        out
    }
}

type Product<E> = Vec<(usize, E)>;

/// A finite-dimensional algebra spanned by based arrows between a finite set
/// of points, with its structure constants.
#[derive(Clone, Debug)]
pub struct TruncatedAlgebra<F: Field> {
    field: F,
    n: usize,
    r: i64,
    points: Vec<LatticePoint>,
    point_index: HashMap<LatticePoint, usize>,
    basis: Vec<BasedArrow>,
    arrow_index: HashMap<BasedArrow, usize>,
    /// `(source, target)` point indices of each basis arrow.
    ends: Vec<(usize, usize)>,
    /// Basis indices of each nonempty block `Hom(source, target)`.
    blocks: HashMap<(usize, usize), Vec<usize>>,
    /// Position of each basis arrow inside its block.
    block_pos: Vec<usize>,
    by_source: Vec<Vec<usize>>,
    by_target: Vec<Vec<usize>>,
    products: HashMap<(usize, usize), Product<F::Elem>>,
}

/// A quotient algebra together with the images of the parent basis arrows.
#[derive(Clone, Debug)]
pub struct Quotient<F: Field> {
    pub algebra: TruncatedAlgebra<F>,
    pub projection: Vec<Element<F>>,
}

impl<F: Field> Quotient<F> {
    pub fn project(&self, x: &Element<F>) -> Element<F> {
        let field = self.algebra.field();
        let mut out = Element::zero();
        for (i, c) in x.terms() {
            out.add_scaled(field, &self.projection[i], c);
        }
        out
    }
}

/// Dimensions compared by the two-sided idempotent ideal test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdealCheck {
    pub label: String,
    pub dim_aea: usize,
    pub dim_tensor: usize,
    pub holds: bool,
}

impl<F: Field> TruncatedAlgebra<F> {
    fn assemble(
        field: F,
        n: usize,
        r: i64,
        points: Vec<LatticePoint>,
        basis: Vec<BasedArrow>,
        mut product: impl FnMut(&[BasedArrow], &HashMap<BasedArrow, usize>, usize, usize) -> Result<Product<F::Elem>>,
    ) -> Result<Self> {
        let point_index: HashMap<LatticePoint, usize> =
            points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let arrow_index: HashMap<BasedArrow, usize> = basis.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let mut ends = Vec::with_capacity(basis.len());
        let mut blocks: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut block_pos = Vec::with_capacity(basis.len());
        let mut by_source = vec![Vec::new(); points.len()];
        let mut by_target = vec![Vec::new(); points.len()];
        for (i, a) in basis.iter().enumerate() {
            let s = *point_index.get(a.source()).ok_or(Error::NotSubset)?;
            let t = *point_index.get(&a.target()).ok_or(Error::NotSubset)?;
            ends.push((s, t));
            let block = blocks.entry((s, t)).or_default();
            block_pos.push(block.len());
            block.push(i);
            by_source[s].push(i);
            by_target[t].push(i);
        }
        let mut products = HashMap::new();
        for i in 0..basis.len() {
            let s = ends[i].0;
            for &j in &by_target[s] {
                let p = product(&basis, &arrow_index, i, j)?;
                if !p.is_empty() {
                    products.insert((i, j), p);
                }
            }
        }
        Ok(TruncatedAlgebra {
            field,
            n,
            r,
            points,
            point_index,
            basis,
            arrow_index,
            ends,
            blocks,
            block_pos,
            by_source,
            by_target,
            products,
        })
    }

    /// `C(Y)` for a convex point set `Y`: every arrow with both ends in `Y`.
    pub fn truncate_convex(kostant: &Kostant, y: &[LatticePoint], field: F) -> Result<Self> {
        let n = kostant.n();
        if let Some(p) = y.iter().find(|p| p.n() != n) {
            return Err(Error::RankMismatch(p.n(), n));
        }
        if !is_convex(y) {
            return Err(Error::NotConvex);
        }
        let points: Vec<LatticePoint> = y.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let mut basis = Vec::new();
        for s in &points {
            for t in &points {
                let d = t - s;
                if psi_membership(&d).is_some() {
                    for m in graded_component_basis(&d, n) {
                        basis.push(BasedArrow::new(m, s.clone()));
                    }
                }
            }
        }
        let r = points.first().map_or(0, |p| p.total());
        let f = field.clone();
        Self::assemble(field, n, r, points, basis, |basis, index, i, j| {
            let terms = arrow_multiply(kostant, &basis[i], &basis[j], &f)?;
            Ok(terms.into_iter().map(|(a, c)| (index[&a], c)).collect())
        })
    }

    /// `C(Λ(n,r))` on the basis of arrows passing the T-completion test,
    /// ordered like [`enumerate_t_all`]. Products are Kostant products with
    /// every failing arrow dropped.
    pub fn composition_algebra(kostant: &Kostant, r: u64, field: F) -> Result<Self> {
        let n = kostant.n();
        let points = enumerate_compositions(n, r as i64);
        let basis: Vec<BasedArrow> = enumerate_t_all(n, r)
            .iter()
            .map(|k| BasedArrow::new(monomial_of_trimatrix(k), k.column_marginal()))
            .collect();
        let f = field.clone();
        Self::assemble(field, n, r as i64, points, basis, |basis, index, i, j| {
            let terms = arrow_multiply(kostant, &basis[i], &basis[j], &f)?;
            Ok(terms.into_iter().filter_map(|(a, c)| index.get(&a).map(|&k| (k, c))).collect())
        })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn point_index(&self, p: &LatticePoint) -> Option<usize> {
        self.point_index.get(p).copied()
    }

    pub fn basis(&self) -> &[BasedArrow] {
        &self.basis
    }

    pub fn index_of(&self, a: &BasedArrow) -> Option<usize> {
        self.arrow_index.get(a).copied()
    }

    /// `(source, target)` point indices of a basis arrow.
    pub fn ends(&self, i: usize) -> (usize, usize) {
        self.ends[i]
    }

    /// Basis arrows from point `s` to point `t`.
    pub fn block(&self, s: usize, t: usize) -> &[usize] {
        self.blocks.get(&(s, t)).map_or(&[], |v| v.as_slice())
    }

    pub fn block_position(&self, i: usize) -> usize {
        self.block_pos[i]
    }

    pub fn arrows_from(&self, s: usize) -> &[usize] {
        &self.by_source[s]
    }

    pub fn arrows_into(&self, t: usize) -> &[usize] {
        &self.by_target[t]
    }

    /// Structure constants of `b_i · b_j`.
    pub fn mul_basis(&self, i: usize, j: usize) -> &[(usize, F::Elem)] {
        self.products.get(&(i, j)).map_or(&[], |v| v.as_slice())
    }

    pub fn multiply(&self, x: &Element<F>, y: &Element<F>) -> Element<F> {
        let f = &self.field;
        let mut out = Element::zero();
        for (i, a) in x.terms() {
            for (j, b) in y.terms() {
                let ab = f.mul(a, b);
                for (k, c) in self.mul_basis(i, j) {
                    out.add_term(f, *k, f.mul(&ab, c));
                }
            }
        }
        out
    }

    /// Basis index of `χ_p`, if it survives in this algebra.
    pub fn unit_at(&self, p: usize) -> Option<usize> {
        self.index_of(&BasedArrow::unit(self.points[p].clone()))
    }

    pub fn unit(&self) -> Element<F> {
        Element::from_terms(&self.field, (0..self.points.len()).filter_map(|p| self.unit_at(p)).map(|i| (i, self.field.one())))
    }

    /// `Σ χ_p` over the given points (ignoring points not in the algebra).
    pub fn point_idempotent(&self, points: &[LatticePoint]) -> Element<F> {
        Element::from_terms(
            &self.field,
            points
                .iter()
                .filter_map(|p| self.point_index(p))
                .filter_map(|p| self.unit_at(p))
                .map(|i| (i, self.field.one())),
        )
    }

    /// Coordinates of an element supported in block `(s, t)`.
    fn block_vector(&self, s: usize, t: usize, x: &[(usize, F::Elem)]) -> Vec<F::Elem> {
        let mut v = vec![self.field.zero(); self.block(s, t).len()];
        for (k, c) in x {
            debug_assert_eq!(self.ends[*k], (s, t));
            let pos = self.block_pos[*k];
            v[pos] = self.field.add(&v[pos], c);
        }
        v
    }

    /// `a · v` for a basis arrow `a` and a vector `v` in block `(s, t)`;
    /// the result lies in block `(s, target(a))`.
    fn left_act(&self, a: usize, s: usize, t: usize, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.field;
        let u = self.ends[a].1;
        let mut out = vec![f.zero(); self.block(s, u).len()];
        for (pos, &k) in self.block(s, t).iter().enumerate() {
            if f.is_zero(&v[pos]) {
                continue;
            }
            for (m, c) in self.mul_basis(a, k) {
                f.add_mul_assign(&mut out[self.block_pos[*m]], &v[pos], c);
            }
        }
        out
    }

    /// `v · b` for a vector `v` in block `(s, t)` and a basis arrow `b` into `s`.
    fn right_act(&self, s: usize, t: usize, v: &[F::Elem], b: usize) -> Vec<F::Elem> {
        let f = &self.field;
        let u = self.ends[b].0;
        let mut out = vec![f.zero(); self.block(u, t).len()];
        for (pos, &k) in self.block(s, t).iter().enumerate() {
            if f.is_zero(&v[pos]) {
                continue;
            }
            for (m, c) in self.mul_basis(k, b) {
                f.add_mul_assign(&mut out[self.block_pos[*m]], &v[pos], c);
            }
        }
        out
    }

    /// Per-block span of `AeA` for `e = Σ_{p∈E} χ_p`, spanned by the products
    /// `x · w` with `x` leaving and `w` entering a point of `E`.
    fn idempotent_ideal(&self, e_points: &BTreeSet<usize>) -> HashMap<(usize, usize), Echelon<F>> {
        let mut out: HashMap<(usize, usize), Echelon<F>> = HashMap::new();
        for &p in e_points {
            for &x in self.arrows_from(p) {
                for &w in self.arrows_into(p) {
                    let (s, _) = self.ends[w];
                    let (_, t) = self.ends[x];
                    let v = self.block_vector(s, t, self.mul_basis(x, w));
                    let dim = v.len();
                    out.entry((s, t))
                        .or_insert_with(|| Echelon::new(self.field.clone(), dim, Pivoting::FirstNonzero))
                        .insert(v);
                }
            }
        }
        out
    }

    /// Closure of the point idempotents of `z` under left and right
    /// multiplication by basis arrows, iterated to a fixed point.
    fn ideal_closure(&self, z: &BTreeSet<usize>) -> HashMap<(usize, usize), Echelon<F>> {
        let f = &self.field;
        let mut out: HashMap<(usize, usize), Echelon<F>> = HashMap::new();
        let mut work: VecDeque<(usize, usize, Vec<F::Elem>)> = VecDeque::new();
        let offer = |out: &mut HashMap<(usize, usize), Echelon<F>>,
                         work: &mut VecDeque<(usize, usize, Vec<F::Elem>)>,
                         s: usize,
                         t: usize,
                         v: Vec<F::Elem>| {
            if v.iter().all(|c| f.is_zero(c)) {
                return;
            }
            let e = out.entry((s, t)).or_insert_with(|| Echelon::new(f.clone(), v.len(), Pivoting::FirstNonzero));
            if e.insert(v.clone()) {
                work.push_back((s, t, v));
            }
        };
        for &p in z {
            if let Some(u) = self.unit_at(p) {
                let v = self.block_vector(p, p, &[(u, f.one())]);
                offer(&mut out, &mut work, p, p, v);
            }
        }
        while let Some((s, t, v)) = work.pop_front() {
            for &a in self.arrows_from(t) {
                let w = self.left_act(a, s, t, &v);
                offer(&mut out, &mut work, s, self.ends[a].1, w);
            }
            for &b in self.arrows_into(s) {
                let w = self.right_act(s, t, &v, b);
                offer(&mut out, &mut work, self.ends[b].0, t, w);
            }
        }
        out
    }

    /// Quotient by a block-homogeneous ideal given per block in echelon form.
    /// Coset representatives are the arrows on non-pivot columns.
    fn quotient_by_ideal(&self, ideal: &HashMap<(usize, usize), Echelon<F>>) -> Result<Quotient<F>> {
        let f = &self.field;
        let mut keep: Vec<Option<usize>> = vec![None; self.dim()];
        let mut basis = Vec::new();
        for i in 0..self.dim() {
            let free = ideal.get(&self.ends[i]).is_none_or(|e| !e.is_pivot(self.block_pos[i]));
            if free {
                keep[i] = Some(basis.len());
                basis.push(self.basis[i].clone());
            }
        }
        let reduce = |s: usize, t: usize, v: &mut Vec<F::Elem>| -> Element<F> {
            if let Some(e) = ideal.get(&(s, t)) {
                e.reduce(v);
            }
            let block = self.block(s, t);
            Element::from_terms(
                f,
                v.iter().enumerate().filter(|(_, c)| !f.is_zero(c)).map(|(pos, c)| {
                    (keep[block[pos]].expect("residue lies on free columns"), c.clone())
                }),
            )
        };
        let projection: Vec<Element<F>> = (0..self.dim())
            .map(|i| match keep[i] {
                Some(k) => Element::basis(k, f),
                None => {
                    let (s, t) = self.ends[i];
                    let mut v = self.block_vector(s, t, &[(i, f.one())]);
                    reduce(s, t, &mut v)
                }
            })
            .collect();
        let points: Vec<LatticePoint> = self
            .points
            .iter()
            .enumerate()
            .filter(|(p, _)| self.unit_at(*p).is_some_and(|u| keep[u].is_some()))
            .map(|(_, x)| x.clone())
            .collect();
        let kept: Vec<usize> = (0..self.dim()).filter(|&i| keep[i].is_some()).collect();
        let algebra = TruncatedAlgebra::assemble(f.clone(), self.n, self.r, points, basis, |_, _, i, j| {
            let (pi, pj) = (kept[i], kept[j]);
            let (_, t) = self.ends[pi];
            let (s, _) = self.ends[pj];
            let prod = self.mul_basis(pi, pj);
            if prod.is_empty() {
                return Ok(Vec::new());
            }
            let mut v = self.block_vector(s, t, prod);
            Ok(reduce(s, t, &mut v).terms().map(|(k, c)| (k, c.clone())).collect())
        })?;
        Ok(Quotient { algebra, projection })
    }

    fn point_set(&self, z: &[LatticePoint]) -> Result<BTreeSet<usize>> {
        z.iter().map(|p| self.point_index(p).ok_or(Error::NotSubset)).collect()
    }

    /// Quotient by the ideal generated by `χ_z`, `z ∈ Z`, computed as `AeA`.
    pub fn quotient_by_points(&self, z: &[LatticePoint]) -> Result<Quotient<F>> {
        let zs = self.point_set(z)?;
        self.quotient_by_ideal(&self.idempotent_ideal(&zs))
    }

    /// Compares `dim AeA` with `dim Ae ⊗_{eAe} eA` for an idempotent `e` that is
    /// a sum of point idempotents. The two agree exactly when the ideal is
    /// 2-idempotent.
    pub fn check_two_idempotent(&self, e: &Element<F>) -> Result<IdealCheck> {
        let f = &self.field;
        if self.multiply(e, e) != *e {
            return Err(Error::NotIdempotent);
        }
        let mut e_points = BTreeSet::new();
        for (i, c) in e.terms() {
            if !self.basis[i].is_unit() || !f.is_one(c) {
                return Err(Error::NotPointIdempotent);
            }
            e_points.insert(self.ends[i].0);
        }
        let aea = self.idempotent_ideal(&e_points);
        let dim_aea = aea.values().map(|e| e.rank()).sum();

        let mut dim_tensor = 0;
        let np = self.points.len();
        for s in 0..np {
            for t in 0..np {
                dim_tensor += self.balanced_tensor_block(&e_points, s, t);
            }
        }
        Ok(IdealCheck { label: String::new(), dim_aea, dim_tensor, holds: dim_aea == dim_tensor })
    }

    /// Dimension of the `(s, t)` block of `Ae ⊗_{eAe} eA`.
    fn balanced_tensor_block(&self, e_points: &BTreeSet<usize>, s: usize, t: usize) -> usize {
        let f = &self.field;
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        for &p in e_points {
            for &x in self.block(p, t) {
                for &w in self.block(s, p) {
                    let len = index.len();
                    index.insert((x, w), len);
                }
            }
        }
        if index.is_empty() {
            return 0;
        }
        let dim = index.len();
        let mut rel = Echelon::new(f.clone(), dim, Pivoting::FirstNonzero);
        let minus_one = f.neg(&f.one());
        for &p in e_points {
            for &q in e_points {
                if p == q {
                    continue;
                }
                let us = self.block(q, p);
                if us.is_empty() {
                    continue;
                }
                for &u in us {
                    for &x in self.block(p, t) {
                        for &w in self.block(s, q) {
                            // (x·u) ⊗ w - x ⊗ (u·w)
                            let mut v = vec![f.zero(); dim];
                            for (k, c) in self.mul_basis(x, u) {
                                let pos = index[&(*k, w)];
                                v[pos] = f.add(&v[pos], c);
                            }
                            for (k, c) in self.mul_basis(u, w) {
                                let pos = index[&(x, *k)];
                                f.add_mul_assign(&mut v[pos], &minus_one, c);
                            }
                            rel.insert(v);
                        }
                    }
                }
            }
        }
        dim - rel.rank()
    }

    /// Keeps the arrows of an element of `C(Λ^1(n,r))` that pass the
    /// T-completion test and re-indexes them in `target`, a composition algebra.
    pub fn reduce_to_composition_algebra(&self, x: &Element<F>, target: &TruncatedAlgebra<F>) -> Element<F> {
        Element::from_terms(
            &self.field,
            x.terms().filter_map(|(i, c)| {
                let a = &self.basis[i];
                t_completion(&a.monomial, &a.base)?;
                target.index_of(a).map(|k| (k, c.clone()))
            }),
        )
    }

    pub fn to_json(&self) -> AlgebraJson {
        let f = &self.field;
        let mut products: Vec<(usize, usize, usize, String)> = self
            .products
            .iter()
            .flat_map(|(&(i, j), terms)| terms.iter().map(move |(k, c)| (i, j, *k, f.format(c))))
            .collect();
        products.sort();
        AlgebraJson {
            n: self.n,
            r: self.r,
            char: f.characteristic(),
            dim: self.dim(),
            basis: self.basis.clone(),
            products,
        }
    }
}

/// Serialised form of a [`TruncatedAlgebra`]: products are `(left, right,
/// result, coefficient)` with indices into `basis`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub n: usize,
    pub r: i64,
    pub char: u64,
    pub dim: usize,
    pub basis: Vec<BasedArrow>,
    pub products: Vec<(usize, usize, usize, String)>,
}

/// The quotient of `C(Y)` by the ideal generated by `χ_z`, `z ∈ Z`, by
/// fixed-point closure. A non-convex `Y` is realised inside its convex hull,
/// so the returned projection starts from the hull's algebra.
pub fn quotient_oracle<F: Field>(
    kostant: &Kostant,
    y: &[LatticePoint],
    z: &[LatticePoint],
    field: F,
) -> Result<Quotient<F>> {
    let yset: BTreeSet<&LatticePoint> = y.iter().collect();
    if z.iter().any(|p| !yset.contains(p)) {
        return Err(Error::NotSubset);
    }
    let mut kill: Vec<LatticePoint> = z.to_vec();
    let ambient = if is_convex(y) {
        TruncatedAlgebra::truncate_convex(kostant, y, field)?
    } else {
        let hull = convex_hull(y);
        kill.extend(hull.iter().filter(|p| !yset.contains(p)).cloned());
        TruncatedAlgebra::truncate_convex(kostant, &hull, field)?
    };
    let zs = ambient.point_set(&kill)?;
    ambient.quotient_by_ideal(&ambient.ideal_closure(&zs))
}

/// One combinatorial hypothesis of the chain, with a verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisCheck {
    pub description: String,
    pub holds: bool,
}

/// `Tor_1` and `Tor_2` of the quotient against a simple module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorCheck {
    pub lambda: LatticePoint,
    pub tor1: usize,
    pub tor2: usize,
}

/// Outcome of [`check_strong_idempotent_chain`].
#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub n: usize,
    pub r: u64,
    pub characteristic: u64,
    pub hypotheses: Vec<HypothesisCheck>,
    pub steps: Vec<IdealCheck>,
    pub start_dim: usize,
    pub final_dim: usize,
    pub direct_quotient_dim: usize,
    pub expected_dim: usize,
    pub tor: Vec<TorCheck>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.hypotheses.iter().all(|h| h.holds)
            && self.steps.iter().all(|s| s.holds)
            && self.final_dim == self.expected_dim
            && self.direct_quotient_dim == self.expected_dim
            && self.tor.iter().all(|t| t.tor1 == 0 && t.tor2 == 0)
    }
}

/// Points reachable from `start` inside `y` by adding generators.
fn reach_within(start: &[LatticePoint], gens: &[LatticePoint], y: &HashSet<LatticePoint>) -> BTreeSet<LatticePoint> {
    let mut seen: BTreeSet<LatticePoint> = start.iter().cloned().collect();
    let mut stack: Vec<LatticePoint> = start.to_vec();
    while let Some(p) = stack.pop() {
        for g in gens {
            let q = &p + g;
            if y.contains(&q) && seen.insert(q.clone()) {
                stack.push(q);
            }
        }
    }
    seen
}

/// Walks the filtration `Λ^1(n,r) = Z_1 ⊔ … ⊔ Z_{n-1}` with `Z_1 = Λ(n,r)` and
/// `Z_j = M^{n+1-j}(n,r)`: checks its combinatorial hypotheses, then removes
/// the points of `Z_{n-1}, …, Z_2` one at a time (each `Z_j` in decreasing
/// `≤_{n+1-j}` order), testing 2-idempotency of every ideal along the way, and
/// finally checks `Tor_1 = Tor_2 = 0` for the quotient against each simple.
pub fn check_strong_idempotent_chain<F: Field>(kostant: &Kostant, r: u64, field: F) -> Result<ChainReport> {
    let n = kostant.n();
    let ri = r as i64;
    let y = enumerate_lambda1(n, ri);
    let yset: HashSet<LatticePoint> = y.iter().cloned().collect();
    let m = n.saturating_sub(1).max(1);
    let mut zs: Vec<Vec<LatticePoint>> = vec![enumerate_compositions(n, ri)];
    for j in 2..=m {
        zs.push(enumerate_m_k(n, ri, n + 1 - j));
    }
    // Γ_j is the column monoid of column n + 1 - j.
    let gamma = |j: usize| column_monoid_generators(n, n + 1 - j);

    let mut hypotheses = Vec::new();
    let cover: usize = zs.iter().map(|z| z.len()).sum();
    hypotheses.push(HypothesisCheck {
        description: format!("Z_1 ⊔ … ⊔ Z_{m} = Λ¹ ({cover} of {} points)", y.len()),
        holds: cover == y.len() && zs.iter().flatten().collect::<HashSet<_>>().len() == y.len(),
    });
    for i in 1..=m {
        for j in i..=m {
            let allowed: HashSet<&LatticePoint> = zs[i - 1..j].iter().flatten().collect();
            let reach = reach_within(&zs[i - 1], &gamma(j), &yset);
            hypotheses.push(HypothesisCheck {
                description: format!("Γ_{j} Z_{i} ∩ Y ⊆ Z_{i} ⊔ … ⊔ Z_{j}"),
                holds: reach.iter().all(|p| allowed.contains(p)),
            });
        }
    }
    for j in 1..=m {
        let yj: Vec<LatticePoint> = zs[..j].iter().flatten().cloned().collect();
        let yjset: HashSet<&LatticePoint> = yj.iter().collect();
        for i in 1..j {
            let reach = reach_within(&yj, &gamma(i), &yset);
            hypotheses.push(HypothesisCheck {
                description: format!("Γ_{i} Y_{j} ∩ Y = Y_{j}"),
                holds: reach.iter().all(|p| yjset.contains(p)),
            });
        }
    }
    for j in 2..=m {
        let k = n + 1 - j;
        let mut holds = true;
        for a in &zs[j - 1] {
            for b in &zs[j - 1] {
                for i in 1..=m {
                    if a != b && monoid_leq(a, b, &gamma(i)) {
                        let ord = order_k_compare(a, b, k);
                        holds &= if i >= j { ord.is_le() } else { ord.is_ge() };
                    }
                }
            }
        }
        hypotheses.push(HypothesisCheck { description: format!("≤_{k} is compatible with Γ on Z_{j}"), holds });
    }

    let start = TruncatedAlgebra::truncate_convex(kostant, &y, field.clone())?;
    let mut alg = start.clone();
    let mut steps = Vec::new();
    for j in (2..=m).rev() {
        let k = n + 1 - j;
        let mut z = zs[j - 1].clone();
        z.sort_by(|a, b| order_k_compare(a, b, k));
        let mut whole = alg.check_two_idempotent(&alg.point_idempotent(&z))?;
        whole.label = format!("Z_{j} = M^{k}, {} points", z.len());
        steps.push(whole);
        for p in z.iter().rev() {
            let mut step = alg.check_two_idempotent(&alg.point_idempotent(std::slice::from_ref(p)))?;
            step.label = format!("χ_{p}");
            steps.push(step);
            alg = alg.quotient_by_points(std::slice::from_ref(p))?.algebra;
        }
    }

    let outside: Vec<LatticePoint> = y.iter().filter(|p| p.0.iter().any(|&x| x < 0)).cloned().collect();
    let direct = start.quotient_by_points(&outside)?;
    let mut tor = Vec::new();
    for lambda in &zs[0] {
        let res = crate::projective::minimal_resolution_of_simple(&start, lambda, 3, Pivoting::FirstNonzero)?;
        let pushed = res.push_forward(&direct);
        tor.push(TorCheck {
            lambda: lambda.clone(),
            tor1: pushed.homology_dim(&direct.algebra, 1),
            tor2: pushed.homology_dim(&direct.algebra, 2),
        });
    }
    Ok(ChainReport {
        n,
        r,
        characteristic: field.characteristic(),
        hypotheses,
        steps,
        start_dim: start.dim(),
        final_dim: alg.dim(),
        direct_quotient_dim: direct.algebra.dim(),
        expected_dim: enumerate_t_all(n, r).len(),
        tor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn lp(v: &[i64]) -> LatticePoint {
        LatticePoint(v.to_vec())
    }

    #[test]
    fn arrow_multiply_examples() {
        let k = Kostant::new(2);
        let e12 = PBWMonomial::generator(2, 1, 2, 1);
        let chi20 = BasedArrow::unit(lp(&[2, 0]));
        let a = BasedArrow::new(e12.clone(), lp(&[1, 1]));
        assert_eq!(arrow_multiply(&k, &chi20, &a, &Rationals).unwrap(), vec![(a.clone(), Rationals.one())]);
        let chi11 = BasedArrow::unit(lp(&[1, 1]));
        assert!(arrow_multiply(&k, &chi11, &a, &Rationals).unwrap().is_empty());
        let y = lp(&[0, 2]);
        let upper = BasedArrow::new(e12.clone(), lp(&[1, 1]));
        let lower = BasedArrow::new(e12, y.clone());
        let p = arrow_multiply(&k, &upper, &lower, &Rationals).unwrap();
        assert_eq!(p, vec![(BasedArrow::new(PBWMonomial::generator(2, 1, 2, 2), y), Rationals.from_i64(2))]);
    }

    #[test]
    fn t_completion_examples() {
        let e23e12 = PBWMonomial::from_matrix(&[vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]]).unwrap();
        assert!(t_completion(&e23e12, &lp(&[1, 0, 1])).is_none());
        let e13 = PBWMonomial::generator(3, 1, 3, 1);
        let k = t_completion(&e13, &lp(&[1, 0, 1])).unwrap();
        assert_eq!(k.0, vec![vec![1, 0, 1], vec![0, 0, 0], vec![0, 0, 0]]);
        assert!(t_completion(&PBWMonomial::one(3), &lp(&[2, -1, 1])).is_none());
    }

    #[test]
    fn convex_truncation_dimensions() {
        let k2 = Kostant::new(2);
        let c = TruncatedAlgebra::truncate_convex(&k2, &enumerate_lambda1(2, 2), Rationals).unwrap();
        assert_eq!(c.dim(), 6);
        let k3 = Kostant::new(3);
        let y = enumerate_lambda1(3, 2);
        let c = TruncatedAlgebra::truncate_convex(&k3, &y, Rationals).unwrap();
        // For n = 3, c₁α₁ + c₂α₂ has min(c₁, c₂) + 1 Kostant partitions.
        let mut count = 0;
        for s in &y {
            for t in &y {
                if let Some(c) = psi_membership(&(t - s)) {
                    count += c.0[0].min(c.0[1]) as usize + 1;
                }
            }
        }
        assert_eq!(c.dim(), count);
        assert_eq!(count, 46);
        let single = TruncatedAlgebra::truncate_convex(&k3, &[lp(&[2, -1, 1])], Rationals).unwrap();
        assert_eq!(single.dim(), 1);
        assert!(matches!(
            TruncatedAlgebra::truncate_convex(&k3, &enumerate_compositions(3, 2), Rationals),
            Err(Error::NotConvex)
        ));
    }

    #[test]
    fn unit_acts_as_identity() {
        let k = Kostant::new(3);
        let c = TruncatedAlgebra::truncate_convex(&k, &enumerate_lambda1(3, 2), Rationals).unwrap();
        let one = c.unit();
        for i in 0..c.dim() {
            let b = Element::basis(i, &Rationals);
            assert_eq!(c.multiply(&one, &b), b);
            assert_eq!(c.multiply(&b, &one), b);
        }
    }

    #[test]
    fn quotient_oracle_trivial_cases() {
        let k = Kostant::new(2);
        let y = enumerate_lambda1(2, 2);
        let q = quotient_oracle(&k, &y, &[], Rationals).unwrap();
        assert_eq!(q.algebra.dim(), 6);
        let q = quotient_oracle(&k, &y, &y, Rationals).unwrap();
        assert_eq!(q.algebra.dim(), 0);
        assert!(matches!(quotient_oracle(&k, &y, &[lp(&[3, -1])], Rationals), Err(Error::NotSubset)));
    }

    #[test]
    fn quotient_matches_drop_rule_n3_r2() {
        let k = Kostant::new(3);
        let y = enumerate_lambda1(3, 2);
        let outside: Vec<LatticePoint> = y.iter().filter(|p| p.0.iter().any(|&x| x < 0)).cloned().collect();
        let q = quotient_oracle(&k, &y, &outside, Rationals).unwrap();
        assert_eq!(q.algebra.dim(), 21);
        let comp = TruncatedAlgebra::composition_algebra(&k, 2, Rationals).unwrap();
        let kept: BTreeSet<&BasedArrow> = q.algebra.basis().iter().collect();
        let dropped: BTreeSet<&BasedArrow> = comp.basis().iter().collect();
        assert_eq!(kept, dropped);
        for i in 0..comp.dim() {
            for j in 0..comp.dim() {
                let qi = q.algebra.index_of(&comp.basis()[i]).unwrap();
                let qj = q.algebra.index_of(&comp.basis()[j]).unwrap();
                let lhs: Vec<(BasedArrow, _)> =
                    comp.mul_basis(i, j).iter().map(|(m, c)| (comp.basis()[*m].clone(), c.clone())).collect();
                let mut rhs: Vec<(BasedArrow, _)> = q
                    .algebra
                    .mul_basis(qi, qj)
                    .iter()
                    .map(|(m, c)| (q.algebra.basis()[*m].clone(), c.clone()))
                    .collect();
                let mut lhs = lhs;
                lhs.sort();
                rhs.sort();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn two_idempotent_trivial_cases() {
        let k = Kostant::new(3);
        let c = TruncatedAlgebra::truncate_convex(&k, &enumerate_lambda1(3, 2), Rationals).unwrap();
        let full = c.check_two_idempotent(&c.unit()).unwrap();
        assert_eq!((full.dim_aea, full.dim_tensor), (c.dim(), c.dim()));
        let zero = c.check_two_idempotent(&Element::zero()).unwrap();
        assert_eq!((zero.dim_aea, zero.dim_tensor), (0, 0));
        let twice = c.unit().sub(&Element::zero(), &Rationals);
        let mut not_idem = twice.clone();
        not_idem.add_scaled(&Rationals, &twice, &Rationals.one());
        assert!(matches!(c.check_two_idempotent(&not_idem), Err(Error::NotIdempotent)));
    }

    #[test]
    fn chain_n2_is_vacuous() {
        let k = Kostant::new(2);
        let report = check_strong_idempotent_chain(&k, 2, Rationals).unwrap();
        assert!(report.passed(), "{report:#?}");
        assert_eq!(report.final_dim, 6);
    }

    #[test]
    fn chain_n3_r2() {
        let k = Kostant::new(3);
        for report in [
            check_strong_idempotent_chain(&k, 2, Rationals).unwrap(),
            check_strong_idempotent_chain(&k, 2, PrimeField::new(2).unwrap()).unwrap(),
        ] {
            assert!(report.passed(), "{report:#?}");
            assert_eq!(report.final_dim, 21);
            assert_eq!(report.steps.len(), 4);
        }
    }
}
