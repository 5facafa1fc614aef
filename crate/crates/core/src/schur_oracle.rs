//! The Schur algebra on tensor space, used as an independent oracle.
//!
//! Operators on `V^{⊗r}` (`V = 𝕂^n`) are sparse matrices indexed by
//! [`MultiIndex::to_linear`]. The basis element `ξ_{i,j}` is the sum of the
//! matrix units `E_{iπ,jπ}` over the distinct pairs in the `Σ_r`-orbit of
//! `(i,j)`; an orbit is keyed by its sorted list of pairs `(i_τ, j_τ)`.
//! Divided powers act through `ρ(e_ij^{(k)})`, the sum over `k`-subsets of
//! tensor positions holding `j` of the operator replacing those entries by `i`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::combinatorics::{enumerate_t_all, pair_of_t, LatticePoint, MultiIndex};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::kostant::{generators, Kostant, PBWMonomial};
use crate::linalg::{Echelon, Pivoting};
use crate::skew_category::TruncatedAlgebra;

/// Largest tensor space handled, `n^r ≤ 2^16`.
pub const TENSOR_DIM_CAP: usize = 1 << 16;

fn tensor_dim(n: usize, r: usize) -> Result<usize> {
    let dim = (n as u128).checked_pow(r as u32).unwrap_or(u128::MAX);
    if dim > TENSOR_DIM_CAP as u128 {
        return Err(Error::TensorSpaceTooLarge(dim.min(usize::MAX as u128) as usize, TENSOR_DIM_CAP));
    }
    Ok(dim as usize)
}

/// A sparse operator on `V^{⊗r}`, stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorOperator<E> {
    pub n: usize,
    pub r: usize,
    rows: BTreeMap<usize, BTreeMap<usize, E>>,
}

impl<E: Clone + PartialEq> TensorOperator<E> {
    pub fn zero(n: usize, r: usize) -> Result<Self> {
        tensor_dim(n, r)?;
        Ok(TensorOperator { n, r, rows: BTreeMap::new() })
    }

    pub fn dim(&self) -> usize {
        self.n.pow(self.r as u32)
    }

    pub fn entry<F: Field<Elem = E>>(&self, row: usize, col: usize, field: &F) -> E {
        self.rows.get(&row).and_then(|r| r.get(&col)).cloned().unwrap_or_else(|| field.zero())
    }

    pub fn add_entry<F: Field<Elem = E>>(&mut self, row: usize, col: usize, c: E, field: &F) {
        if field.is_zero(&c) {
            return;
        }
        let r = self.rows.entry(row).or_default();
        let slot = r.entry(col).or_insert_with(|| field.zero());
        *slot = field.add(slot, &c);
        if field.is_zero(slot) {
            r.remove(&col);
            if r.is_empty() {
                self.rows.remove(&row);
            }
        }
    }

    /// Nonzero entries `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &E)> {
        self.rows.iter().flat_map(|(&i, r)| r.iter().map(move |(&j, c)| (i, j, c)))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose<F: Field<Elem = E>>(&self, other: &Self, field: &F) -> Self {
        let mut out = TensorOperator { n: self.n, r: self.r, rows: BTreeMap::new() };
        for (&i, row) in &self.rows {
            for (&j, a) in row {
                if let Some(orow) = other.rows.get(&j) {
                    for (&k, b) in orow {
                        out.add_entry(i, k, field.mul(a, b), field);
                    }
                }
            }
        }
        out
    }

    pub fn add_scaled<F: Field<Elem = E>>(&mut self, other: &Self, c: &E, field: &F) {
        for (i, j, x) in other.entries() {
            self.add_entry(i, j, field.mul(c, x), field);
        }
    }

    /// Image of the basis vector `v_col`, as `(row, coefficient)` pairs.
    pub fn apply_basis(&self, col: usize) -> Vec<(usize, E)> {
        self.rows
            .iter()
            .filter_map(|(&i, r)| r.get(&col).map(|c| (i, c.clone())))
            .collect()
    }
}

/// Canonical key of the orbit of `(i, j)`: the sorted list of pairs.
pub type OrbitKey = Vec<(usize, usize)>;

pub fn orbit_key(i: &MultiIndex, j: &MultiIndex) -> OrbitKey {
    let mut key: OrbitKey = i.entries.iter().copied().zip(j.entries.iter().copied()).collect();
    key.sort_unstable();
    key
}

/// The canonical representative of an orbit.
pub fn orbit_representative(n: usize, key: &OrbitKey) -> (MultiIndex, MultiIndex) {
    let (i, j): (Vec<usize>, Vec<usize>) = key.iter().copied().unzip();
    (MultiIndex { n, entries: i }, MultiIndex { n, entries: j })
}

/// Every orbit key of `I(n,r) × I(n,r)`, optionally only those with `i ≤ j`.
pub fn orbit_keys(n: usize, r: usize, upper_only: bool) -> Vec<OrbitKey> {
    let pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|a| (1..=n).map(move |b| (a, b)))
        .filter(|(a, b)| !upper_only || a <= b)
        .collect();
    // Sorted keys are multisets of pairs: non-decreasing sequences of pair indices.
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn go(pairs: &[(usize, usize)], from: usize, r: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<OrbitKey>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for p in from..pairs.len() {
            cur.push(pairs[p]);
            go(pairs, p, r, cur, out);
            cur.pop();
        }
    }
    go(&pairs, 0, r, &mut cur, &mut out);
    out
}

/// An element of the Schur algebra in the `ξ` basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiElement<E> {
    pub n: usize,
    pub r: usize,
    pub coeffs: BTreeMap<OrbitKey, E>,
}

impl<E: Clone> XiElement<E> {
    pub fn zero(n: usize, r: usize) -> Self {
        XiElement { n, r, coeffs: BTreeMap::new() }
    }

    pub fn basis<F: Field<Elem = E>>(n: usize, r: usize, key: OrbitKey, field: &F) -> Self {
        let mut x = Self::zero(n, r);
        x.coeffs.insert(key, field.one());
        x
    }

    pub fn add_scaled<F: Field<Elem = E>>(&mut self, other: &Self, c: &E, field: &F) {
        for (k, x) in &other.coeffs {
            let v = field.mul(c, x);
            let slot = self.coeffs.entry(k.clone()).or_insert_with(|| field.zero());
            *slot = field.add(slot, &v);
            if field.is_zero(slot) {
                self.coeffs.remove(k);
            }
        }
    }

    /// Does every orbit in the support satisfy `i ≤ j`?
    pub fn is_upper(&self) -> bool {
        self.coeffs.keys().all(|k| k.iter().all(|(a, b)| a <= b))
    }
}

/// `ξ_{i,j}`: the sum of the distinct matrix units in the orbit.
pub fn xi_matrix<F: Field>(key: &OrbitKey, n: usize, field: &F) -> Result<TensorOperator<F::Elem>> {
    let r = key.len();
    let mut op = TensorOperator::zero(n, r)?;
    let mut seen = BTreeSet::new();
    let (i, j) = orbit_representative(n, key);
    for perm in permutations(r) {
        let a = i.permuted(&perm).to_linear();
        let b = j.permuted(&perm).to_linear();
        if seen.insert((a, b)) {
            op.add_entry(a, b, field.one(), field);
        }
    }
    Ok(op)
}

fn permutations(r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..r).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            if k % 2 == 0 {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
        }
    }
    heap(r, &mut cur, &mut out);
    out
}

/// Operator of an element given in the `ξ` basis.
pub fn xi_operator<F: Field>(x: &XiElement<F::Elem>, field: &F) -> Result<TensorOperator<F::Elem>> {
    let mut op = TensorOperator::zero(x.n, x.r)?;
    for (key, c) in &x.coeffs {
        op.add_scaled(&xi_matrix(key, x.n, field)?, c, field);
    }
    Ok(op)
}

/// Re-expresses an operator in the `ξ` basis by reading the entry at each
/// orbit's canonical position; fails if the operator is not in the span.
pub fn express_in_xi<F: Field>(op: &TensorOperator<F::Elem>, field: &F) -> Result<XiElement<F::Elem>> {
    let (n, r) = (op.n, op.r);
    let mut x = XiElement::zero(n, r);
    let mut keys = BTreeSet::new();
    for (a, b, _) in op.entries() {
        keys.insert(orbit_key(&MultiIndex::from_linear(n, r, a), &MultiIndex::from_linear(n, r, b)));
    }
    for key in keys {
        let (i, j) = orbit_representative(n, &key);
        let c = op.entry(i.to_linear(), j.to_linear(), field);
        if !field.is_zero(&c) {
            x.coeffs.insert(key, c);
        }
    }
    let mut residue = op.clone();
    residue.add_scaled(&xi_operator(&x, field)?, &field.neg(&field.one()), field);
    if let Some((a, b, c)) = residue.entries().next() {
        return Err(Error::NotInXiSpan(format!(
            "residue {} at ({:?}, {:?})",
            field.format(c),
            MultiIndex::from_linear(n, r, a).entries,
            MultiIndex::from_linear(n, r, b).entries
        )));
    }
    Ok(x)
}

/// Product in the Schur algebra via operator composition.
pub fn schur_multiply<F: Field>(
    x: &XiElement<F::Elem>,
    y: &XiElement<F::Elem>,
    field: &F,
) -> Result<XiElement<F::Elem>> {
    if (x.n, x.r) != (y.n, y.r) {
        return Err(Error::InvalidParameter("ξ elements of different (n, r)".into()));
    }
    let op = xi_operator(x, field)?.compose(&xi_operator(y, field)?, field);
    express_in_xi(&op, field)
}

/// `ξ_λ`, the projection onto the weight-`λ` subspace (zero if `λ` is not a
/// composition of `r`).
pub fn xi_weight<F: Field>(lambda: &LatticePoint, r: usize, field: &F) -> Result<TensorOperator<F::Elem>> {
    let n = lambda.n();
    let mut op = TensorOperator::zero(n, r)?;
    for i in MultiIndex::all(n, r) {
        if i.weight() == *lambda {
            let a = i.to_linear();
            op.add_entry(a, a, field.one(), field);
        }
    }
    Ok(op)
}

/// `ρ(e_ij^{(k)})`.
pub fn rho_generator<F: Field>(n: usize, r: usize, i: usize, j: usize, k: u32, field: &F) -> Result<TensorOperator<F::Elem>> {
    let mut op = TensorOperator::zero(n, r)?;
    let k = k as usize;
    for col in MultiIndex::all(n, r) {
        let spots: Vec<usize> = (0..r).filter(|&p| col.entries[p] == j).collect();
        if spots.len() < k {
            continue;
        }
        for subset in subsets(&spots, k) {
            let mut row = col.clone();
            for p in subset {
                row.entries[p] = i;
            }
            op.add_entry(row.to_linear(), col.to_linear(), field.one(), field);
        }
    }
    Ok(op)
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = subsets(&items[1..], k);
    for mut rest in subsets(&items[1..], k - 1) {
        rest.insert(0, items[0]);
        out.push(rest);
    }
    out
}

/// `ρ(m)`: the factors applied in canonical order, the leftmost last.
pub fn rho<F: Field>(m: &PBWMonomial, r: usize, field: &F) -> Result<TensorOperator<F::Elem>> {
    let n = m.n();
    let mut op = identity(n, r, field)?;
    for (g, (i, j)) in generators(n).into_iter().enumerate() {
        let k = m.exponents()[g];
        if k > 0 {
            op = op.compose(&rho_generator(n, r, i, j, k, field)?, field);
        }
    }
    Ok(op)
}

pub fn identity<F: Field>(n: usize, r: usize, field: &F) -> Result<TensorOperator<F::Elem>> {
    let mut op = TensorOperator::zero(n, r)?;
    for a in 0..op.dim() {
        op.add_entry(a, a, field.one(), field);
    }
    Ok(op)
}

/// `ρ(m) ξ_μ`.
pub fn rho_based<F: Field>(m: &PBWMonomial, mu: &LatticePoint, r: usize, field: &F) -> Result<TensorOperator<F::Elem>> {
    Ok(rho(m, r, field)?.compose(&xi_weight(mu, r, field)?, field))
}

/// `(1 + c·E_ij)^{⊗r}` computed directly on tensors.
pub fn tau_elementary<F: Field>(n: usize, r: usize, i: usize, j: usize, c: &F::Elem, field: &F) -> Result<TensorOperator<F::Elem>> {
    let mut op = TensorOperator::zero(n, r)?;
    for col in MultiIndex::all(n, r) {
        // Each factor v_{col_p} ↦ v_{col_p} + [col_p = j] c v_i; expand the product.
        let mut terms: Vec<(Vec<usize>, F::Elem)> = vec![(Vec::new(), field.one())];
        for &e in &col.entries {
            let mut next = Vec::with_capacity(terms.len() * 2);
            for (word, coeff) in terms {
                if e == j && i != j {
                    let mut w2 = word.clone();
                    w2.push(i);
                    next.push((w2, field.mul(&coeff, c)));
                }
                let mut w1 = word;
                w1.push(e);
                let coeff = if e == j && i == j { field.add(&coeff, &field.mul(&coeff, c)) } else { coeff };
                next.push((w1, coeff));
            }
            terms = next;
        }
        for (word, coeff) in terms {
            op.add_entry(MultiIndex { n, entries: word }.to_linear(), col.to_linear(), coeff, field);
        }
    }
    Ok(op)
}

/// Outcome of [`verify_isomorphism`].
#[derive(Clone, Debug, Serialize)]
pub struct IsoReport {
    pub n: usize,
    pub r: usize,
    pub characteristic: u64,
    pub basis_size: usize,
    pub expected_dim: usize,
    pub image_rank: usize,
    pub images_upper: bool,
    pub pairs_checked: usize,
    pub structure_mismatches: usize,
    pub first_mismatch: Option<String>,
}

impl IsoReport {
    pub fn passed(&self) -> bool {
        self.basis_size == self.expected_dim
            && self.image_rank == self.expected_dim
            && self.images_upper
            && self.structure_mismatches == 0
    }
}

/// Maps the T-indexed basis of `C(Λ(n,r))` to `ρ(m)ξ_μ` and checks that the
/// images are independent, span a space of dimension `|T(n,r)|`, lie in the
/// Borel part, and multiply like the basis under [`schur_multiply`].
pub fn verify_isomorphism<F: Field>(kostant: &Kostant, r: usize, field: F) -> Result<IsoReport> {
    let n = kostant.n();
    tensor_dim(n, r)?;
    let alg = TruncatedAlgebra::composition_algebra(kostant, r as u64, field.clone())?;
    let keys = orbit_keys(n, r, true);
    let key_pos: HashMap<&OrbitKey, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut images = Vec::with_capacity(alg.dim());
    for a in alg.basis() {
        images.push(express_in_xi(&rho_based(&a.monomial, &a.base, r, &field)?, &field)?);
    }
    let images_upper = images.iter().all(|x| x.is_upper());
    let mut ech = Echelon::new(field.clone(), keys.len(), Pivoting::FirstNonzero);
    for x in &images {
        let mut v = vec![field.zero(); keys.len()];
        for (k, c) in &x.coeffs {
            if let Some(&p) = key_pos.get(k) {
                v[p] = c.clone();
            }
        }
        ech.insert(v);
    }
    let ops: Vec<TensorOperator<F::Elem>> =
        images.iter().map(|x| xi_operator(x, &field)).collect::<Result<_>>()?;
    let mut pairs_checked = 0;
    let mut structure_mismatches = 0;
    let mut first_mismatch = None;
    for a in 0..alg.dim() {
        for b in 0..alg.dim() {
            pairs_checked += 1;
            let lhs = express_in_xi(&ops[a].compose(&ops[b], &field), &field)?;
            let mut rhs = XiElement::zero(n, r);
            for (k, c) in alg.mul_basis(a, b) {
                rhs.add_scaled(&images[*k], c, &field);
            }
            if lhs != rhs {
                structure_mismatches += 1;
                first_mismatch.get_or_insert_with(|| format!("{:?} · {:?}", alg.basis()[a], alg.basis()[b]));
            }
        }
    }
    Ok(IsoReport {
        n,
        r,
        characteristic: field.characteristic(),
        basis_size: alg.dim(),
        expected_dim: enumerate_t_all(n, r as u64).len(),
        image_rank: ech.rank(),
        images_upper,
        pairs_checked,
        structure_mismatches,
        first_mismatch,
    })
}

/// The T-indexed basis element `ξ_{pair_of_t(K)}` in orbit-key form.
pub fn xi_of_t(k: &crate::combinatorics::TriMatrix) -> OrbitKey {
    let (i, j) = pair_of_t(k);
    orbit_key(&i, &j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn mi(n: usize, v: &[usize]) -> MultiIndex {
        MultiIndex::new(n, v.to_vec()).unwrap()
    }

    #[test]
    fn xi_matrix_orbit_expansion() {
        let key = orbit_key(&mi(2, &[1, 1]), &mi(2, &[1, 2]));
        let op = xi_matrix(&key, 2, &Rationals).unwrap();
        let entries: Vec<(usize, usize)> = op.entries().map(|(a, b, _)| (a, b)).collect();
        let a = mi(2, &[1, 1]).to_linear();
        assert_eq!(entries, vec![(a, mi(2, &[1, 2]).to_linear()), (a, mi(2, &[2, 1]).to_linear())]);
        // Diagonal orbits are weight projections.
        let diag = orbit_key(&mi(2, &[1, 2]), &mi(2, &[1, 2]));
        assert_eq!(xi_matrix(&diag, 2, &Rationals).unwrap(), xi_weight(&LatticePoint(vec![1, 1]), 2, &Rationals).unwrap());
    }

    #[test]
    fn weight_idempotents_sum_to_identity() {
        let f = Rationals;
        let mut sum = TensorOperator::zero(3, 2).unwrap();
        for lam in crate::combinatorics::enumerate_compositions(3, 2) {
            sum.add_scaled(&xi_weight(&lam, 2, &f).unwrap(), &f.one(), &f);
        }
        assert_eq!(sum, identity(3, 2, &f).unwrap());
    }

    #[test]
    fn rho_examples() {
        let f = Rationals;
        let v22 = mi(2, &[2, 2]).to_linear();
        let e12 = rho(&PBWMonomial::generator(2, 1, 2, 1), 2, &f).unwrap();
        let mut img = e12.apply_basis(v22);
        img.sort();
        let one = f.one();
        assert_eq!(img, vec![(mi(2, &[1, 2]).to_linear(), one.clone()), (mi(2, &[2, 1]).to_linear(), one.clone())]);
        let e12_2 = rho(&PBWMonomial::generator(2, 1, 2, 2), 2, &f).unwrap();
        assert_eq!(e12_2.apply_basis(v22), vec![(mi(2, &[1, 1]).to_linear(), one)]);
        assert!(rho(&PBWMonomial::generator(2, 1, 2, 3), 2, &f).unwrap().is_zero());
    }

    #[test]
    fn schur_multiply_weight_bookkeeping() {
        let f = Rationals;
        let lam = orbit_key(&mi(2, &[1, 1]), &mi(2, &[1, 1]));
        let mu = orbit_key(&mi(2, &[1, 2]), &mi(2, &[1, 2]));
        let xl = XiElement::basis(2, 2, lam.clone(), &f);
        let xm = XiElement::basis(2, 2, mu.clone(), &f);
        assert_eq!(schur_multiply(&xl, &xl, &f).unwrap(), xl);
        assert_eq!(schur_multiply(&xl, &xm, &f).unwrap(), XiElement::zero(2, 2));
        let ij = XiElement::basis(2, 2, orbit_key(&mi(2, &[1, 1]), &mi(2, &[1, 2])), &f);
        assert_eq!(schur_multiply(&ij, &xm, &f).unwrap(), ij);
        assert_eq!(schur_multiply(&ij, &xl, &f).unwrap(), XiElement::zero(2, 2));
    }

    #[test]
    fn upper_orbits_are_t_indexed() {
        for (n, r) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let keys: BTreeSet<OrbitKey> = orbit_keys(n, r, true).into_iter().collect();
            let from_t: BTreeSet<OrbitKey> = enumerate_t_all(n, r as u64).iter().map(xi_of_t).collect();
            assert_eq!(keys, from_t);
        }
    }

    #[test]
    fn non_span_operator_is_rejected() {
        let f = Rationals;
        let mut op = TensorOperator::zero(2, 2).unwrap();
        op.add_entry(mi(2, &[1, 1]).to_linear(), mi(2, &[1, 2]).to_linear(), f.one(), &f);
        assert!(matches!(express_in_xi(&op, &f), Err(Error::NotInXiSpan(_))));
    }

    #[test]
    fn tensor_cap() {
        assert!(matches!(TensorOperator::<u64>::zero(5, 7), Err(Error::TensorSpaceTooLarge(..))));
    }

    #[test]
    fn isomorphism_small_cases() {
        for (n, r, p) in [(2usize, 2usize, 0u64), (2, 3, 3), (2, 1, 5), (3, 2, 2)] {
            let k = Kostant::new(n);
            let report = if p == 0 {
                verify_isomorphism(&k, r, Rationals).unwrap()
            } else {
                verify_isomorphism(&k, r, PrimeField::new(p).unwrap()).unwrap()
            };
            assert!(report.passed(), "{report:#?}");
            let stars_and_bars = crate::field::binomial((n * (n + 1) / 2 + r - 1) as u64, r as u64);
            assert_eq!(num_bigint::BigInt::from(report.basis_size), stars_and_bars);
        }
    }
}
