//! The Kostant form of `U(sl_n^+)`: divided-power PBW monomials, their grading
//! by the root monoid, and exact multiplication by straightening.
//!
//! Products are computed once over the integers and reduced into the target
//! field at read time. The integral product of two divided-power monomials is
//! obtained by straightening the plain (non-divided) words with the commutator
//! `[e_ij, e_kl] = δ_jk e_il - δ_li e_kj`, then rescaling by factorials. The
//! rescaled coefficients must be integers; a non-integral coefficient is
//! reported as [`Error::Integrality`] and never expected.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{psi_membership, LatticePoint, RootCoefficients};
use crate::error::{Error, Result};
use crate::field::{exact_div, factorial, Field};

/// Canonical position of the generator `e_ij` (`1 ≤ i < j ≤ n`).
///
/// Generators are listed smallest first: column `n` (rows `n-1, …, 1`), then
/// column `n-1`, …, finally `e_12`. For `n = 3` this is `e_23, e_13, e_12`.
pub fn generator_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= i && i < j && j <= n);
    // Columns n, n-1, ..., j+1 hold (n-1) + ... + j generators.
    let before: usize = (j + 1..=n).map(|c| c - 1).sum();
    before + (j - 1 - i)
}

/// Generators `(i, j)` in canonical order.
pub fn generators(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in (2..=n).rev() {
        for i in (1..j).rev() {
            out.push((i, j));
        }
    }
    out
}

/// A divided-power PBW monomial `∏ e_ij^{(k_ij)}` written in canonical order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PBWMonomial {
    n: usize,
    exps: Vec<u32>,
}

impl PBWMonomial {
    /// The empty monomial (the unit).
    pub fn one(n: usize) -> Self {
        PBWMonomial { n, exps: vec![0; n * n.saturating_sub(1) / 2] }
    }

    /// `e_ij^{(k)}`.
    pub fn generator(n: usize, i: usize, j: usize, k: u32) -> Self {
        let mut m = Self::one(n);
        m.exps[generator_index(n, i, j)] = k;
        m
    }

    /// From an `n×n` exponent matrix; only strictly upper entries may be nonzero.
    pub fn from_matrix(k: &[Vec<u64>]) -> Result<Self> {
        let n = k.len();
        let mut m = Self::one(n);
        for (s, row) in k.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidParameter("exponent matrix is not square".into()));
            }
            for (p, &v) in row.iter().enumerate() {
                if p <= s {
                    if v != 0 {
                        return Err(Error::InvalidParameter(format!(
                            "exponent matrix entry ({},{}) must vanish",
                            s + 1,
                            p + 1
                        )));
                    }
                } else {
                    m.exps[generator_index(n, s + 1, p + 1)] = v as u32;
                }
            }
        }
        Ok(m)
    }

    pub fn to_matrix(&self) -> Vec<Vec<u64>> {
        let mut k = vec![vec![0u64; self.n]; self.n];
        for (g, (i, j)) in generators(self.n).into_iter().enumerate() {
            k[i - 1][j - 1] = self.exps[g] as u64;
        }
        k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Exponents in canonical generator order.
    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn exponent(&self, i: usize, j: usize) -> u32 {
        self.exps[generator_index(self.n, i, j)]
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&k| k == 0)
    }

    /// `Σ k_ij (v_i - v_j)`.
    pub fn degree(&self) -> LatticePoint {
        let mut d = vec![0i64; self.n.max(1)];
        for (g, (i, j)) in generators(self.n).into_iter().enumerate() {
            d[i - 1] += self.exps[g] as i64;
            d[j - 1] -= self.exps[g] as i64;
        }
        LatticePoint(d)
    }

    /// Height of the degree: `Σ k_ij (j - i)`.
    pub fn height(&self) -> u64 {
        generators(self.n)
            .into_iter()
            .zip(&self.exps)
            .map(|((i, j), &k)| (j - i) as u64 * k as u64)
            .sum()
    }

    /// Splits into column factors for columns `n, n-1, …, 2`; their product in
    /// this order is the monomial itself.
    pub fn column_factorize(&self) -> Vec<PBWMonomial> {
        (2..=self.n)
            .rev()
            .map(|j| {
                let mut f = Self::one(self.n);
                for i in 1..j {
                    let g = generator_index(self.n, i, j);
                    f.exps[g] = self.exps[g];
                }
                f
            })
            .collect()
    }

    /// Columns `j` with some nonzero `k_ij`.
    pub fn support_columns(&self) -> Vec<usize> {
        (2..=self.n).filter(|&j| (1..j).any(|i| self.exponent(i, j) > 0)).collect()
    }

    fn factorial_weight(&self) -> BigInt {
        self.exps.iter().fold(BigInt::one(), |acc, &k| acc * factorial(k))
    }
}

impl fmt::Debug for PBWMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (g, (i, j)) in generators(self.n).into_iter().enumerate() {
            let k = self.exps[g];
            if k == 0 {
                continue;
            }
            if !first {
                write!(f, "·")?;
            }
            first = false;
            if k == 1 {
                write!(f, "e{i}{j}")?;
            } else {
                write!(f, "e{i}{j}^({k})")?;
            }
        }
        Ok(())
    }
}

impl Serialize for PBWMonomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_matrix().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PBWMonomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let k = Vec::<Vec<u64>>::deserialize(d)?;
        PBWMonomial::from_matrix(&k).map_err(serde::de::Error::custom)
    }
}

/// `∏ e_ij^{(k_ij)}` with exponents read off an upper-triangular matrix
/// (diagonal ignored). Used for the basis indexed by `T(n,r)`.
pub fn monomial_of_trimatrix(k: &crate::combinatorics::TriMatrix) -> PBWMonomial {
    let n = k.n();
    let mut m = PBWMonomial::one(n);
    for (g, (i, j)) in generators(n).into_iter().enumerate() {
        m.exps[g] = k.get(i - 1, j - 1) as u32;
    }
    m
}

/// All monomials of degree exactly `gamma` (Kostant partitions), sorted.
pub fn graded_component_basis(gamma: &LatticePoint, n: usize) -> Vec<PBWMonomial> {
    let Some(coeffs) = psi_membership(gamma) else {
        return Vec::new();
    };
    if gamma.n() != n {
        return Vec::new();
    }
    let gens = generators(n);
    let mut out = Vec::new();
    let mut cur = PBWMonomial::one(n);
    let mut rest: Vec<i64> = coeffs.0.iter().map(|&c| c as i64).collect();
    fill_partition(&gens, 0, &mut rest, &mut cur, &mut out);
    out.sort();
    out
}

fn fill_partition(
    gens: &[(usize, usize)],
    g: usize,
    rest: &mut Vec<i64>,
    cur: &mut PBWMonomial,
    out: &mut Vec<PBWMonomial>,
) {
    if g == gens.len() {
        if rest.iter().all(|&c| c == 0) {
            out.push(cur.clone());
        }
        return;
    }
    let (i, j) = gens[g];
    // e_ij spans the simple roots α_i, …, α_{j-1}.
    let max = (i - 1..j - 1).map(|a| rest[a]).min().unwrap_or(0).max(0);
    for k in 0..=max {
        for a in i - 1..j - 1 {
            rest[a] -= k;
        }
        cur.exps[g] = k as u32;
        fill_partition(gens, g + 1, rest, cur, out);
        for a in i - 1..j - 1 {
            rest[a] += k;
        }
    }
    cur.exps[g] = 0;
}

/// Every monomial of height at most `h`, ordered by height then exponents.
pub fn monomials_up_to_height(n: usize, h: u64) -> Vec<PBWMonomial> {
    RootCoefficients::up_to_height(n, h)
        .into_iter()
        .flat_map(|c| graded_component_basis(&c.to_point(), n))
        .collect()
}

/// `[e_a, e_b]` for generator indices, as `(sign, generator index)`.
fn bracket(n: usize, gens: &[(usize, usize)], a: usize, b: usize) -> Option<(i32, usize)> {
    let (i, j) = gens[a];
    let (k, l) = gens[b];
    if j == k {
        Some((1, generator_index(n, i, l)))
    } else if l == i {
        Some((-1, generator_index(n, k, j)))
    } else {
        None
    }
}

type Word = Vec<u32>;
type PlainComb = Vec<(Word, BigInt)>;

/// Straightening of plain (non-divided) PBW words over `Z`, memoised on
/// `(monomial, generator)` right multiplications.
struct Straightener {
    brackets: Vec<Vec<Option<(i32, usize)>>>,
    memo: HashMap<(Word, usize), Arc<PlainComb>>,
}

impl Straightener {
    fn new(n: usize) -> Self {
        let gens = generators(n);
        let brackets = (0..gens.len())
            .map(|a| (0..gens.len()).map(|b| bracket(n, &gens, a, b)).collect())
            .collect();
        Straightener { brackets, memo: HashMap::new() }
    }

    /// `m · e_g` in the plain PBW basis.
    fn mul_gen(&mut self, m: &[u32], g: usize) -> Arc<PlainComb> {
        if let Some(r) = self.memo.get(&(m.to_vec(), g)) {
            return Arc::clone(r);
        }
        let last = m.iter().rposition(|&k| k > 0);
        let result: PlainComb = match last {
            Some(x) if x > g => {
                // m = m' x^k with every generator of m' below x. Since [x, [x, g]] = 0,
                // x^k g = g x^k + k [x, g] x^{k-1}.
                let k = m[x];
                let mut head = m.to_vec();
                head[x] = 0;
                let mut acc: HashMap<Word, BigInt> = HashMap::new();
                let first = self.mul_gen(&head, g);
                for (w, c) in first.iter() {
                    for (w2, c2) in self.mul_pow(w, x, k) {
                        *acc.entry(w2).or_insert_with(BigInt::zero) += c * c2;
                    }
                }
                if let Some((sign, h)) = self.brackets[x][g] {
                    let scale = BigInt::from(sign) * BigInt::from(k);
                    let second = self.mul_gen(&head, h);
                    for (w, c) in second.iter() {
                        for (w2, c2) in self.mul_pow(w, x, k - 1) {
                            *acc.entry(w2).or_insert_with(BigInt::zero) += &scale * c * c2;
                        }
                    }
                }
                let mut v: PlainComb = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                v.sort();
                v
            }
            _ => {
                let mut w = m.to_vec();
                w[g] += 1;
                vec![(w, BigInt::one())]
            }
        };
        let result = Arc::new(result);
        self.memo.insert((m.to_vec(), g), Arc::clone(&result));
        result
    }

    /// `m · e_x^k`.
    fn mul_pow(&mut self, m: &[u32], x: usize, k: u32) -> PlainComb {
        let mut comb: PlainComb = vec![(m.to_vec(), BigInt::one())];
        for _ in 0..k {
            let mut acc: HashMap<Word, BigInt> = HashMap::new();
            for (w, c) in &comb {
                for (w2, c2) in self.mul_gen(w, x).iter() {
                    *acc.entry(w2.clone()).or_insert_with(BigInt::zero) += c * c2;
                }
            }
            comb = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        }
        comb
    }

    /// Plain product `a · b` of two plain words.
    fn plain_product(&mut self, a: &[u32], b: &[u32]) -> PlainComb {
        let mut comb: PlainComb = vec![(a.to_vec(), BigInt::one())];
        for (g, &k) in b.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let mut acc: HashMap<Word, BigInt> = HashMap::new();
            for (w, c) in &comb {
                for (w2, c2) in self.mul_pow(w, g, k) {
                    *acc.entry(w2).or_insert_with(BigInt::zero) += c * c2;
                }
            }
            comb = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        }
        comb.sort();
        comb
    }
}

/// Integral structure constants of a product of two monomials.
pub type IntegralProduct = Arc<Vec<(PBWMonomial, BigInt)>>;

/// Statistics of a structure-constant cache fill.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FillReport {
    pub monomials: usize,
    pub pairs: usize,
    pub integrality_failures: usize,
}

/// The Kostant form in rank `n` with its shared structure-constant cache.
///
/// The cache is compute-once, read-many: lookups take a shared lock, a miss is
/// straightened under the straightener's exclusive lock and then published.
pub struct Kostant {
    n: usize,
    straightener: Mutex<Straightener>,
    table: RwLock<HashMap<(PBWMonomial, PBWMonomial), IntegralProduct>>,
}

impl fmt::Debug for Kostant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kostant").field("n", &self.n).field("cached", &self.cached_pairs()).finish()
    }
}

impl Kostant {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        Kostant {
            n,
            straightener: Mutex::new(Straightener::new(n)),
            table: RwLock::new(HashMap::new()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cached_pairs(&self) -> usize {
        self.table.read().unwrap().len()
    }

    /// `a · b` for divided-power monomials, with integer coefficients.
    pub fn product_integral(&self, a: &PBWMonomial, b: &PBWMonomial) -> Result<IntegralProduct> {
        if a.n != self.n || b.n != self.n {
            return Err(Error::RankMismatch(a.n.max(b.n), self.n));
        }
        let key = (a.clone(), b.clone());
        if let Some(v) = self.table.read().unwrap().get(&key) {
            return Ok(Arc::clone(v));
        }
        let v = Arc::new(self.straighten(a, b)?);
        self.table.write().unwrap().entry(key).or_insert_with(|| Arc::clone(&v));
        Ok(v)
    }

    fn straighten(&self, a: &PBWMonomial, b: &PBWMonomial) -> Result<Vec<(PBWMonomial, BigInt)>> {
        if a.is_one() {
            return Ok(vec![(b.clone(), BigInt::one())]);
        }
        if b.is_one() {
            return Ok(vec![(a.clone(), BigInt::one())]);
        }
        let plain = self.straightener.lock().unwrap().plain_product(&a.exps, &b.exps);
        let denom = a.factorial_weight() * b.factorial_weight();
        let mut out = Vec::with_capacity(plain.len());
        for (w, c) in plain {
            let m = PBWMonomial { n: self.n, exps: w };
            let num = c * m.factorial_weight();
            let coeff = exact_div(&num, &denom).ok_or_else(|| {
                Error::Integrality(format!("{a:?} · {b:?}: coefficient {num}/{denom} of {m:?}"))
            })?;
            if !coeff.is_zero() {
                out.push((m, coeff));
            }
        }
        out.sort_by(|x, y| x.0.cmp(&y.0));
        Ok(out)
    }

    /// Computes every product of two monomials whose heights add up to at most `h`.
    pub fn fill_up_to_height(&self, h: u64) -> FillReport {
        let monos = monomials_up_to_height(self.n, h);
        let mut report = FillReport { monomials: monos.len(), ..Default::default() };
        for a in &monos {
            for b in &monos {
                if a.height() + b.height() > h {
                    continue;
                }
                report.pairs += 1;
                if self.product_integral(a, b).is_err() {
                    report.integrality_failures += 1;
                }
            }
        }
        report
    }

    /// Product of two monomials reduced into `field`.
    pub fn multiply_monomials<F: Field>(&self, a: &PBWMonomial, b: &PBWMonomial, field: &F) -> Result<AlgebraElement<F>> {
        let prod = self.product_integral(a, b)?;
        let mut out = AlgebraElement::zero(self.n);
        for (m, c) in prod.iter() {
            out.add_term(field, m.clone(), field.from_bigint(c));
        }
        Ok(out)
    }

    /// Bilinear extension of the monomial product.
    pub fn multiply<F: Field>(&self, x: &AlgebraElement<F>, y: &AlgebraElement<F>, field: &F) -> Result<AlgebraElement<F>> {
        if x.n != self.n || y.n != self.n {
            return Err(Error::RankMismatch(x.n.max(y.n), self.n));
        }
        let mut out = AlgebraElement::zero(self.n);
        for (a, ca) in &x.terms {
            for (b, cb) in &y.terms {
                let cab = field.mul(ca, cb);
                for (m, c) in self.product_integral(a, b)?.iter() {
                    out.add_term(field, m.clone(), field.mul(&cab, &field.from_bigint(c)));
                }
            }
        }
        Ok(out)
    }

    /// Serialisable snapshot of all cached products among monomials of height ≤ `h`.
    pub fn export_cache(&self, h: u64) -> Result<CacheFile> {
        let report = self.fill_up_to_height(h);
        if report.integrality_failures > 0 {
            return Err(Error::Integrality(format!("{} failing products", report.integrality_failures)));
        }
        let monos = monomials_up_to_height(self.n, h);
        let index: HashMap<&PBWMonomial, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut constants = Vec::new();
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                if a.height() + b.height() > h {
                    continue;
                }
                let prod = self.product_integral(a, b)?;
                let terms = prod
                    .iter()
                    .map(|(m, c)| (index[m], c.to_string()))
                    .collect();
                constants.push((i, j, terms));
            }
        }
        Ok(CacheFile {
            schema_version: CACHE_SCHEMA_VERSION,
            n: self.n,
            height: h,
            monomials: monos.iter().map(|m| m.exps.clone()).collect(),
            constants,
        })
    }

    /// Loads a snapshot into the cache. Values are re-checked for shape only.
    pub fn import_cache(&self, file: &CacheFile) -> Result<usize> {
        if file.schema_version != CACHE_SCHEMA_VERSION {
            return Err(Error::Cache(format!("schema version {} (expected {})", file.schema_version, CACHE_SCHEMA_VERSION)));
        }
        if file.n != self.n {
            return Err(Error::Cache(format!("cache is for n = {}, not {}", file.n, self.n)));
        }
        let len = self.n * self.n.saturating_sub(1) / 2;
        let monos: Vec<PBWMonomial> = file
            .monomials
            .iter()
            .map(|e| {
                if e.len() != len {
                    return Err(Error::Cache("monomial has wrong number of exponents".into()));
                }
                Ok(PBWMonomial { n: self.n, exps: e.clone() })
            })
            .collect::<Result<_>>()?;
        let get = |i: usize| monos.get(i).cloned().ok_or_else(|| Error::Cache(format!("monomial index {i} out of range")));
        let mut table = self.table.write().unwrap();
        for (i, j, terms) in &file.constants {
            let a = get(*i)?;
            let b = get(*j)?;
            let mut prod = Vec::with_capacity(terms.len());
            for (k, c) in terms {
                let c: BigInt = c.parse().map_err(|_| Error::Cache(format!("bad coefficient {c:?}")))?;
                prod.push((get(*k)?, c));
            }
            table.insert((a, b), Arc::new(prod));
        }
        Ok(file.constants.len())
    }
}

pub const CACHE_SCHEMA_VERSION: u32 = 1;

/// On-disk form of the integral structure constants: monomials indexed by
/// position in `monomials` (height, then exponent order), products as
/// `(left, right, [(result, integer coefficient)])`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheFile {
    pub schema_version: u32,
    pub n: usize,
    pub height: u64,
    pub monomials: Vec<Vec<u32>>,
    pub constants: Vec<(usize, usize, Vec<(usize, String)>)>,
}

/// A finite linear combination of PBW monomials over `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement<F: Field> {
    n: usize,
    terms: BTreeMap<PBWMonomial, F::Elem>,
}

impl<F: Field> AlgebraElement<F> {
    pub fn zero(n: usize) -> Self {
        AlgebraElement { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize, field: &F) -> Self {
        Self::monomial(PBWMonomial::one(n), field)
    }

    pub fn monomial(m: PBWMonomial, field: &F) -> Self {
        let mut e = Self::zero(m.n);
        e.add_term(field, m, field.one());
        e
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PBWMonomial, &F::Elem)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &PBWMonomial, field: &F) -> F::Elem {
        self.terms.get(m).cloned().unwrap_or_else(|| field.zero())
    }

    pub fn add_term(&mut self, field: &F, m: PBWMonomial, c: F::Elem) {
        if field.is_zero(&c) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = field.add(o.get(), &c);
                if field.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self, field: &F) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(field, m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &F::Elem, field: &F) -> Self {
        let mut out = Self::zero(self.n);
        for (m, x) in &self.terms {
            out.add_term(field, m.clone(), field.mul(c, x));
        }
        out
    }

    /// Degree shared by all terms, if the element is homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<LatticePoint> {
        let mut it = self.terms.keys().map(|m| m.degree());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Coefficient of the empty monomial.
    pub fn unit_component(&self, field: &F) -> F::Elem {
        self.coefficient(&PBWMonomial::one(self.n), field)
    }
}
