//! Dense exact row reduction over a [`Field`].
//!
//! Every linear problem in this crate is sliced (by degree, or by pair of
//! points) into blocks of modest size, so dense vectors are used throughout.
//! The pivot rule is explicit: [`Pivoting::FirstNonzero`] is the deterministic
//! default, [`Pivoting::Shuffled`] permutes column priorities and input order
//! with a seeded generator. Results that are basis-independent (ranks,
//! dimensions, Betti data) must agree under both.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::Field;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Pivoting {
    /// Pivot on the lowest-index nonzero column, process inputs in order.
    #[default]
    FirstNonzero,
    /// Column priorities and input order drawn from a seeded permutation.
    Shuffled(u64),
}

impl Pivoting {
    /// Column priority ranks for a space of dimension `dim` (lower = preferred).
    fn column_ranks(&self, dim: usize) -> Vec<usize> {
        match self {
            Pivoting::FirstNonzero => (0..dim).collect(),
            Pivoting::Shuffled(seed) => {
                let mut perm: Vec<usize> = (0..dim).collect();
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(dim as u64));
                perm.shuffle(&mut rng);
                let mut ranks = vec![0; dim];
                for (rank, &col) in perm.iter().enumerate() {
                    ranks[col] = rank;
                }
                ranks
            }
        }
    }

    /// Order in which `len` inputs are fed to an elimination.
    pub fn input_order(&self, len: usize) -> Vec<usize> {
        match self {
            Pivoting::FirstNonzero => (0..len).collect(),
            Pivoting::Shuffled(seed) => {
                let mut perm: Vec<usize> = (0..len).collect();
                let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(17) ^ len as u64);
                perm.shuffle(&mut rng);
                perm
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Row<E> {
    pivot: usize,
    vec: Vec<E>,
    tag: Vec<E>,
}

/// An incrementally built subspace of `F^dim` kept in echelon form.
///
/// Each stored row is normalised to 1 at its pivot and vanishes at the pivots
/// of all earlier rows, so reducing against the rows in insertion order yields
/// a residue that vanishes on every pivot column. Optionally every row carries
/// a tag vector recording how it was formed from the inserted inputs.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    field: F,
    dim: usize,
    tag_dim: usize,
    ranks: Vec<usize>,
    rows: Vec<Row<F::Elem>>,
    pivot_row: Vec<Option<usize>>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: F, dim: usize, pivoting: Pivoting) -> Self {
        Self::with_tags(field, dim, 0, pivoting)
    }

    pub fn with_tags(field: F, dim: usize, tag_dim: usize, pivoting: Pivoting) -> Self {
        Echelon {
            ranks: pivoting.column_ranks(dim),
            field,
            dim,
            tag_dim,
            rows: Vec::new(),
            pivot_row: vec![None; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row[col].is_some()
    }

    /// Columns that carry no pivot, in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.dim).filter(|&c| self.pivot_row[c].is_none()).collect()
    }

    fn reduce_tagged(&self, v: &mut [F::Elem], tag: &mut [F::Elem]) {
        let f = &self.field;
        for row in &self.rows {
            if f.is_zero(&v[row.pivot]) {
                continue;
            }
            let c = v[row.pivot].clone();
            for (x, y) in v.iter_mut().zip(&row.vec) {
                if !f.is_zero(y) {
                    *x = f.sub(x, &f.mul(&c, y));
                }
            }
            for (x, y) in tag.iter_mut().zip(&row.tag) {
                if !f.is_zero(y) {
                    *x = f.sub(x, &f.mul(&c, y));
                }
            }
        }
    }

    /// Reduces `v` in place; afterwards `v` vanishes on every pivot column.
    pub fn reduce(&self, v: &mut [F::Elem]) {
        debug_assert_eq!(v.len(), self.dim);
        self.reduce_tagged(v, &mut []);
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| self.field.is_zero(x))
    }

    /// Inserts `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: Vec<F::Elem>) -> bool {
        let tag = vec![self.field.zero(); self.tag_dim];
        self.insert_tagged(v, tag).is_none()
    }

    /// Inserts `v` with its tag. If `v` already lies in the span, returns the
    /// reduced tag, i.e. a relation among the inserted inputs.
    pub fn insert_tagged(&mut self, mut v: Vec<F::Elem>, mut tag: Vec<F::Elem>) -> Option<Vec<F::Elem>> {
        debug_assert_eq!(v.len(), self.dim);
        debug_assert_eq!(tag.len(), self.tag_dim);
        self.reduce_tagged(&mut v, &mut tag);
        let f = &self.field;
        let pivot = (0..self.dim)
            .filter(|&c| !f.is_zero(&v[c]))
            .min_by_key(|&c| self.ranks[c]);
        let Some(pivot) = pivot else {
            return Some(tag);
        };
        let inv = f.inv(&v[pivot]).expect("pivot is nonzero");
        for x in v.iter_mut().chain(tag.iter_mut()) {
            *x = f.mul(x, &inv);
        }
        self.pivot_row[pivot] = Some(self.rows.len());
        self.rows.push(Row { pivot, vec: v, tag });
        None
    }

    /// Stored rows (each normalised at its pivot).
    pub fn basis(&self) -> impl Iterator<Item = &[F::Elem]> {
        self.rows.iter().map(|r| r.vec.as_slice())
    }
}

/// Rank of a list of vectors in `F^dim`.
pub fn rank<F: Field>(field: &F, dim: usize, vectors: &[Vec<F::Elem>]) -> usize {
    let mut e = Echelon::new(field.clone(), dim, Pivoting::FirstNonzero);
    for v in vectors {
        e.insert(v.clone());
    }
    e.rank()
}

/// Kernel of the linear map `F^n -> F^dim` sending the `i`-th basis vector
/// to `images[i]`. Returns a basis of the kernel as coordinate vectors in `F^n`.
pub fn kernel<F: Field>(field: &F, dim: usize, images: &[Vec<F::Elem>], pivoting: Pivoting) -> Vec<Vec<F::Elem>> {
    let n = images.len();
    let mut e = Echelon::with_tags(field.clone(), dim, n, pivoting);
    let mut out = Vec::new();
    for i in pivoting.input_order(n) {
        let mut tag = vec![field.zero(); n];
        tag[i] = field.one();
        if let Some(rel) = e.insert_tagged(images[i].clone(), tag) {
            out.push(rel);
        }
    }
    out
}

/// Matrix-vector style helper: `sum_i coeffs[i] * vectors[i]`.
pub fn combine<F: Field>(field: &F, dim: usize, coeffs: &[F::Elem], vectors: &[Vec<F::Elem>]) -> Vec<F::Elem> {
    let mut out = vec![field.zero(); dim];
    for (c, v) in coeffs.iter().zip(vectors) {
        if field.is_zero(c) {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            if !field.is_zero(x) {
                field.add_mul_assign(o, c, x);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn q(v: &[i64]) -> Vec<num_rational::BigRational> {
        v.iter().map(|&x| Rationals.from_i64(x)).collect()
    }

    #[test]
    fn rank_and_kernel_over_q() {
        let imgs = vec![q(&[1, 2, 3]), q(&[2, 4, 6]), q(&[0, 1, 1]), q(&[1, 3, 4])];
        assert_eq!(rank(&Rationals, 3, &imgs), 2);
        let k = kernel(&Rationals, 3, &imgs, Pivoting::FirstNonzero);
        assert_eq!(k.len(), 2);
        for c in &k {
            let v = combine(&Rationals, 3, c, &imgs);
            assert!(v.iter().all(|x| Rationals.is_zero(x)));
        }
    }

    #[test]
    fn characteristic_changes_rank() {
        let f = PrimeField::new(2).unwrap();
        let imgs: Vec<Vec<u64>> = vec![vec![1, 1], vec![1, 1 + 2]];
        let imgs: Vec<Vec<u64>> = imgs.into_iter().map(|v| v.into_iter().map(|x| x % 2).collect()).collect();
        assert_eq!(rank(&f, 2, &imgs), 1);
    }

    #[test]
    fn residue_vanishes_on_pivots() {
        for piv in [Pivoting::FirstNonzero, Pivoting::Shuffled(3), Pivoting::Shuffled(99)] {
            let mut e = Echelon::new(Rationals, 4, piv);
            e.insert(q(&[1, 1, 0, 0]));
            e.insert(q(&[0, 1, 1, 0]));
            e.insert(q(&[1, 0, 0, 1]));
            let mut v = q(&[3, -1, 2, 5]);
            e.reduce(&mut v);
            for c in 0..4 {
                if e.is_pivot(c) {
                    assert!(Rationals.is_zero(&v[c]));
                }
            }
            assert_eq!(e.free_columns().len(), 1);
        }
    }

    #[test]
    fn shuffled_kernel_has_same_dimension() {
        let imgs = vec![q(&[1, 0, 1]), q(&[0, 1, 1]), q(&[1, 1, 2]), q(&[2, 2, 4]), q(&[0, 0, 0])];
        let a = kernel(&Rationals, 3, &imgs, Pivoting::FirstNonzero).len();
        let b = kernel(&Rationals, 3, &imgs, Pivoting::Shuffled(7)).len();
        assert_eq!(a, 3);
        assert_eq!(a, b);
    }
}
