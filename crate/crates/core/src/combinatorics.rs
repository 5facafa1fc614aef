//! Index sets and orders: compositions, the dominance order on `Z^n`, the
//! root monoid generated by `v_i - v_{i+1}`, the weight sets `Λ^k(n,r)` and
//! `M^k(n,r)`, the orders `≤_k`, multi-indices and upper-triangular
//! matrices with prescribed marginals.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `Z^n`: a weight, a composition, a degree, or a base point.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        assert!(!coords.is_empty(), "lattice points have n >= 1 coordinates");
        LatticePoint(coords)
    }

    pub fn zero(n: usize) -> Self {
        LatticePoint(vec![0; n])
    }

    /// The basis vector `v_i` (1-based).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut c = vec![0; n];
        c[i - 1] = 1;
        LatticePoint(c)
    }

    /// `v_i - v_j` (1-based).
    pub fn root(n: usize, i: usize, j: usize) -> Self {
        let mut c = vec![0; n];
        c[i - 1] += 1;
        c[j - 1] -= 1;
        LatticePoint(c)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Prefix sums `z_1, z_1 + z_2, ..., z_1 + ... + z_n`.
    pub fn prefix_sums(&self) -> Vec<i64> {
        self.0
            .iter()
            .scan(0, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn scaled(&self, k: i64) -> Self {
        LatticePoint(self.0.iter().map(|x| x * k).collect())
    }

    /// Is this a composition of `r` (non-negative entries summing to `r`)?
    pub fn is_composition(&self, r: i64) -> bool {
        self.total() == r && self.0.iter().all(|&x| x >= 0)
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for &LatticePoint {
    type Output = LatticePoint;
    fn add(self, rhs: &LatticePoint) -> LatticePoint {
        assert_eq!(self.n(), rhs.n());
        LatticePoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticePoint {
    type Output = LatticePoint;
    fn sub(self, rhs: &LatticePoint) -> LatticePoint {
        assert_eq!(self.n(), rhs.n());
        LatticePoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl std::str::FromStr for LatticePoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let coords = t
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Parse(format!("not a lattice point: {s:?}")))?;
        if coords.is_empty() {
            return Err(Error::Parse(format!("empty lattice point: {s:?}")));
        }
        Ok(LatticePoint(coords))
    }
}

/// Coefficients `c` of `Σ c_i (v_i - v_{i+1})`, an element of the root monoid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RootCoefficients(pub Vec<u64>);

impl RootCoefficients {
    /// Sum of the coefficients; the slicing measure for truncated computations.
    pub fn height(&self) -> u64 {
        self.0.iter().sum()
    }

    /// The represented vector in `Z^n`, `n = len + 1`.
    pub fn to_point(&self) -> LatticePoint {
        let n = self.0.len() + 1;
        let mut c = vec![0i64; n];
        for (i, &k) in self.0.iter().enumerate() {
            c[i] += k as i64;
            c[i + 1] -= k as i64;
        }
        LatticePoint(c)
    }

    /// All coefficient vectors of length `n - 1` with height at most `h`,
    /// ordered by height, then lexicographically.
    pub fn up_to_height(n: usize, h: u64) -> Vec<RootCoefficients> {
        let mut out = Vec::new();
        for target in 0..=h {
            let mut cur = vec![0u64; n.saturating_sub(1)];
            compositions_into(&mut cur, 0, target, &mut out);
        }
        out
    }
}

fn compositions_into(cur: &mut Vec<u64>, pos: usize, rest: u64, out: &mut Vec<RootCoefficients>) {
    if pos == cur.len() {
        if rest == 0 {
            out.push(RootCoefficients(cur.clone()));
        }
        return;
    }
    for v in (0..=rest).rev() {
        cur[pos] = v;
        compositions_into(cur, pos + 1, rest - v, out);
    }
    cur[pos] = 0;
}

/// `z ⊴ z'`: every prefix sum of `z' - z` is non-negative and the totals agree.
pub fn dominance_leq(z: &LatticePoint, z2: &LatticePoint) -> Result<bool> {
    if z.n() != z2.n() {
        return Err(Error::LengthMismatch(z.n(), z2.n()));
    }
    Ok(psi_membership(&(z2 - z)).is_some())
}

/// Writes `d` in the root monoid if possible: `c_j = d_1 + ... + d_j`.
pub fn psi_membership(d: &LatticePoint) -> Option<RootCoefficients> {
    let prefix = d.prefix_sums();
    let (last, init) = prefix.split_last().expect("n >= 1");
    if *last != 0 || init.iter().any(|&p| p < 0) {
        return None;
    }
    Some(RootCoefficients(init.iter().map(|&p| p as u64).collect()))
}

/// Height of `d` as an element of the root monoid, if it is one.
pub fn height(d: &LatticePoint) -> Option<u64> {
    psi_membership(d).map(|c| c.height())
}

/// Membership in `Λ^k(n,r)`: the dominance interval between `(0,…,0,r)` and
/// `(r,0,…,0)`, intersected with `z_1,…,z_k ≥ 0`. `k = n` gives `Λ(n,r)`.
pub fn in_lambda_k(z: &LatticePoint, n: usize, r: i64, k: usize) -> bool {
    if z.n() != n || z.total() != r {
        return false;
    }
    let prefix = z.prefix_sums();
    prefix[..n - 1].iter().all(|&p| (0..=r).contains(&p)) && z.0[..k.min(n)].iter().all(|&x| x >= 0)
}

/// `M^k(n,r) = Λ^{k-1}(n,r) \ Λ^k(n,r)`.
pub fn in_m_k(z: &LatticePoint, n: usize, r: i64, k: usize) -> bool {
    k >= 1 && in_lambda_k(z, n, r, k - 1) && !in_lambda_k(z, n, r, k)
}

/// All points of `Λ^1(n,r)`, lexicographically ordered.
pub fn enumerate_lambda1(n: usize, r: i64) -> Vec<LatticePoint> {
    let mut out = BTreeSet::new();
    let mut prefix = vec![0i64; n];
    prefix[n - 1] = r;
    enumerate_prefixes(&mut prefix, 0, r, &mut out);
    out.into_iter().collect()
}

fn enumerate_prefixes(prefix: &mut Vec<i64>, pos: usize, r: i64, out: &mut BTreeSet<LatticePoint>) {
    let n = prefix.len();
    if pos + 1 >= n {
        let mut z = Vec::with_capacity(n);
        let mut prev = 0;
        for &p in prefix.iter() {
            z.push(p - prev);
            prev = p;
        }
        out.insert(LatticePoint(z));
        return;
    }
    for p in 0..=r {
        prefix[pos] = p;
        enumerate_prefixes(prefix, pos + 1, r, out);
    }
}

/// `Λ^k(n,r)`, lexicographically ordered.
pub fn enumerate_lambda_k(n: usize, r: i64, k: usize) -> Vec<LatticePoint> {
    enumerate_lambda1(n, r).into_iter().filter(|z| in_lambda_k(z, n, r, k)).collect()
}

/// `Λ(n,r)`, lexicographically ordered.
pub fn enumerate_compositions(n: usize, r: i64) -> Vec<LatticePoint> {
    enumerate_lambda_k(n, r, n)
}

/// `M^k(n,r)`, lexicographically ordered.
pub fn enumerate_m_k(n: usize, r: i64, k: usize) -> Vec<LatticePoint> {
    enumerate_lambda1(n, r).into_iter().filter(|z| in_m_k(z, n, r, k)).collect()
}

/// Generators `v_i - v_k` (`i < k`) of the column monoid `Ψ_{n,k}`.
pub fn column_monoid_generators(n: usize, k: usize) -> Vec<LatticePoint> {
    (1..k).map(|i| LatticePoint::root(n, i, k)).collect()
}

/// Generators of `Φ_{n,k} = Ψ_{n,2} + … + Ψ_{n,k}`.
pub fn phi_generators(n: usize, k: usize) -> Vec<LatticePoint> {
    (2..=k).flat_map(|j| column_monoid_generators(n, j)).collect()
}

/// Generators of `Θ_{n,k} = Ψ_{n,k+1} + … + Ψ_{n,n}`.
pub fn theta_generators(n: usize, k: usize) -> Vec<LatticePoint> {
    (k + 1..=n).flat_map(|j| column_monoid_generators(n, j)).collect()
}

/// The linear map `φ^k: Z^n → Z^{n+1}` defining `≤_k`.
pub fn phi_k(z: &LatticePoint, k: usize) -> Vec<i64> {
    let c = &z.0;
    let n = c.len();
    let mut out = Vec::with_capacity(n + 1);
    out.push(c.iter().enumerate().filter(|&(i, _)| i + 1 != k).map(|(_, x)| x).sum());
    out.push(c[k..].iter().sum());
    out.extend_from_slice(&c[..k - 1]);
    out.extend(c[k..].iter().rev());
    out
}

/// Compares `z` and `z'` in the order `≤_k`.
pub fn order_k_compare(z: &LatticePoint, z2: &LatticePoint, k: usize) -> Ordering {
    phi_k(z, k).cmp(&phi_k(z2, k))
}

/// Is `x` in the (finite) submonoid generated by `gens`, shifted: `y - x ∈ ⟨gens⟩`?
/// Brute force over the generators; all generators are roots so the search is finite.
pub fn monoid_leq(x: &LatticePoint, y: &LatticePoint, gens: &[LatticePoint]) -> bool {
    fn go(d: &LatticePoint, gens: &[LatticePoint]) -> bool {
        if d.is_zero() {
            return true;
        }
        let Some(h) = height(d) else { return false };
        if h == 0 {
            return false;
        }
        gens.iter().any(|g| {
            let rest = d - g;
            height(&rest).is_some_and(|hr| hr < h) && go(&rest, gens)
        })
    }
    go(&(y - x), gens)
}

/// Every `z` with `x ⊴ z ⊴ y`.
pub fn dominance_interval(x: &LatticePoint, y: &LatticePoint) -> Vec<LatticePoint> {
    let n = x.n();
    let px = x.prefix_sums();
    let py = y.prefix_sums();
    if px[n - 1] != py[n - 1] || (0..n).any(|i| px[i] > py[i]) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut prefix = vec![0i64; n];
    prefix[n - 1] = px[n - 1];
    fn go(pos: usize, prefix: &mut Vec<i64>, px: &[i64], py: &[i64], out: &mut Vec<LatticePoint>) {
        let n = prefix.len();
        if pos + 1 >= n {
            let mut prev = 0;
            out.push(LatticePoint(
                prefix
                    .iter()
                    .map(|&p| {
                        let v = p - prev;
                        prev = p;
                        v
                    })
                    .collect(),
            ));
            return;
        }
        for p in px[pos]..=py[pos] {
            prefix[pos] = p;
            go(pos + 1, prefix, px, py, out);
        }
    }
    go(0, &mut prefix, &px, &py, &mut out);
    out
}

/// Convexity with respect to the dominance order, by brute force over intervals.
pub fn is_convex(xs: &[LatticePoint]) -> bool {
    let set: BTreeSet<&LatticePoint> = xs.iter().collect();
    for x in xs {
        for y in xs {
            if x == y || !dominance_leq(x, y).unwrap_or(false) {
                continue;
            }
            if dominance_interval(x, y).iter().any(|z| !set.contains(z)) {
                return false;
            }
        }
    }
    true
}

/// The smallest convex set containing `xs`: the union of all intervals between its points.
pub fn convex_hull(xs: &[LatticePoint]) -> Vec<LatticePoint> {
    let mut out: BTreeSet<LatticePoint> = xs.iter().cloned().collect();
    for x in xs {
        for y in xs {
            if dominance_leq(x, y).unwrap_or(false) {
                out.extend(dominance_interval(x, y));
            }
        }
    }
    out.into_iter().collect()
}

/// An element of `I(n,r)`: `r` entries in `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex {
    pub n: usize,
    pub entries: Vec<usize>,
}

impl MultiIndex {
    pub fn new(n: usize, entries: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = entries.iter().find(|&&e| e == 0 || e > n) {
            return Err(Error::InvalidParameter(format!("multi-index entry {bad} outside 1..={n}")));
        }
        Ok(MultiIndex { n, entries })
    }

    pub fn r(&self) -> usize {
        self.entries.len()
    }

    /// `wt(i)_ν = #{ρ : i_ρ = ν}`.
    pub fn weight(&self) -> LatticePoint {
        let mut w = vec![0i64; self.n];
        for &e in &self.entries {
            w[e - 1] += 1;
        }
        LatticePoint(w)
    }

    /// `i ≤ j` componentwise.
    pub fn leq(&self, other: &MultiIndex) -> bool {
        self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b)
    }

    /// `iπ = (i_{π(1)}, …, i_{π(r)})`, `perm` 0-based.
    pub fn permuted(&self, perm: &[usize]) -> MultiIndex {
        MultiIndex {
            n: self.n,
            entries: perm.iter().map(|&p| self.entries[p]).collect(),
        }
    }

    /// Position in `0..n^r` (base-`n` digits, first entry most significant).
    pub fn to_linear(&self) -> usize {
        self.entries.iter().fold(0, |acc, &e| acc * self.n + (e - 1))
    }

    pub fn from_linear(n: usize, r: usize, mut idx: usize) -> MultiIndex {
        let mut entries = vec![0; r];
        for slot in entries.iter_mut().rev() {
            *slot = idx % n + 1;
            idx /= n;
        }
        MultiIndex { n, entries }
    }

    /// All of `I(n,r)` in linear order.
    pub fn all(n: usize, r: usize) -> impl Iterator<Item = MultiIndex> {
        let total = n.pow(r as u32);
        (0..total).map(move |i| MultiIndex::from_linear(n, r, i))
    }
}

pub fn weight(i: &MultiIndex) -> LatticePoint {
    i.weight()
}

/// An upper-triangular `n×n` matrix over `N`; element of `T(λ,μ)` where
/// `λ` are its row sums and `μ` its column sums.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TriMatrix(pub Vec<Vec<u64>>);

impl TriMatrix {
    pub fn zeros(n: usize) -> Self {
        TriMatrix(vec![vec![0; n]; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, s: usize, p: usize) -> u64 {
        self.0[s][p]
    }

    pub fn row_marginal(&self) -> LatticePoint {
        LatticePoint(self.0.iter().map(|row| row.iter().sum::<u64>() as i64).collect())
    }

    pub fn column_marginal(&self) -> LatticePoint {
        let n = self.n();
        LatticePoint((0..n).map(|p| (0..n).map(|s| self.0[s][p]).sum::<u64>() as i64).collect())
    }

    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    pub fn is_upper_triangular(&self) -> bool {
        let n = self.n();
        self.0.iter().all(|row| row.len() == n) && (0..n).all(|s| (0..s).all(|p| self.0[s][p] == 0))
    }

    /// Row-major list of the upper-triangular entries (the enumeration key).
    pub fn upper_entries(&self) -> Vec<u64> {
        let n = self.n();
        (0..n).flat_map(|s| (s..n).map(move |p| (s, p))).map(|(s, p)| self.0[s][p]).collect()
    }
}

/// `t(i,j)_{σρ} = #{τ : i_τ = σ, j_τ = ρ}` for `i ≤ j`.
pub fn t_of_pair(i: &MultiIndex, j: &MultiIndex) -> Result<TriMatrix> {
    if i.r() != j.r() {
        return Err(Error::LengthMismatch(i.r(), j.r()));
    }
    if i.n != j.n {
        return Err(Error::RankMismatch(i.n, j.n));
    }
    if let Some(pos) = i.entries.iter().zip(&j.entries).position(|(a, b)| a > b) {
        return Err(Error::UnorderedPair(pos));
    }
    let mut t = TriMatrix::zeros(i.n);
    for (&a, &b) in i.entries.iter().zip(&j.entries) {
        t.0[a - 1][b - 1] += 1;
    }
    Ok(t)
}

/// The canonical pair `i = (1^{λ_1},…,n^{λ_n})`,
/// `j = (1^{k_11},…,n^{k_1n},2^{k_22},…,n^{k_nn})`.
pub fn pair_of_t(k: &TriMatrix) -> (MultiIndex, MultiIndex) {
    let n = k.n();
    let mut i = Vec::new();
    let mut j = Vec::new();
    for s in 0..n {
        for p in s..n {
            for _ in 0..k.0[s][p] {
                i.push(s + 1);
                j.push(p + 1);
            }
        }
    }
    (MultiIndex { n, entries: i }, MultiIndex { n, entries: j })
}

/// `T(λ,μ)` in row-major lexicographic order.
pub fn enumerate_t(lambda: &LatticePoint, mu: &LatticePoint) -> Vec<TriMatrix> {
    let n = lambda.n();
    assert_eq!(n, mu.n());
    if lambda.total() != mu.total() || lambda.0.iter().chain(&mu.0).any(|&x| x < 0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut m = TriMatrix::zeros(n);
    let mut col_left: Vec<i64> = mu.0.clone();
    fill_t(&mut m, 0, 0, lambda.0[0], lambda, &mut col_left, &mut out);
    out
}

fn fill_t(
    m: &mut TriMatrix,
    s: usize,
    p: usize,
    row_left: i64,
    lambda: &LatticePoint,
    col_left: &mut Vec<i64>,
    out: &mut Vec<TriMatrix>,
) {
    let n = m.n();
    if s == n {
        if col_left.iter().all(|&c| c == 0) {
            out.push(m.clone());
        }
        return;
    }
    if p == n {
        if row_left == 0 {
            // Column s is closed once row s is done: no later row reaches it.
            if col_left[s] != 0 {
                return;
            }
            let next = if s + 1 < n { lambda.0[s + 1] } else { 0 };
            fill_t(m, s + 1, s + 1, next, lambda, col_left, out);
        }
        return;
    }
    let hi = row_left.min(col_left[p]);
    for v in 0..=hi {
        m.0[s][p] = v as u64;
        col_left[p] -= v;
        fill_t(m, s, p + 1, row_left - v, lambda, col_left, out);
        col_left[p] += v;
    }
    m.0[s][p] = 0;
}

/// `T(n,r)`: all upper-triangular matrices over `N` with entry sum `r`, in
/// row-major lexicographic order of their upper-triangular entries.
pub fn enumerate_t_all(n: usize, r: u64) -> Vec<TriMatrix> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|s| (s..n).map(move |p| (s, p))).collect();
    let mut out = Vec::new();
    let mut m = TriMatrix::zeros(n);
    fn go(slots: &[(usize, usize)], pos: usize, rest: u64, m: &mut TriMatrix, out: &mut Vec<TriMatrix>) {
        if pos + 1 == slots.len() {
            let (s, p) = slots[pos];
            m.0[s][p] = rest;
            out.push(m.clone());
            m.0[s][p] = 0;
            return;
        }
        let (s, p) = slots[pos];
        for v in 0..=rest {
            m.0[s][p] = v;
            go(slots, pos + 1, rest - v, m, out);
        }
        m.0[s][p] = 0;
    }
    go(&slots, 0, r, &mut m, &mut out);
    out
}
