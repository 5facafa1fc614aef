//! Acceptance checks. Each criterion prints one `PASS`/`FAIL` line; the
//! process exits nonzero if any fails.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use borel_schur::combinatorics::{
    dominance_leq, enumerate_compositions, enumerate_lambda1, enumerate_t_all, pair_of_t, psi_membership, t_of_pair,
    LatticePoint, MultiIndex,
};
use borel_schur::field::{Field, PrimeField, Rationals};
use borel_schur::kostant::Kostant;
use borel_schur::linalg::Pivoting;
use borel_schur::resolution::minimal_resolution;
use borel_schur::schur_oracle::{orbit_key, verify_isomorphism};
use borel_schur::skew_category::{check_strong_idempotent_chain, quotient_oracle, TruncatedAlgebra};
use borel_schur::transport::{resolve_simple, verify_complex};

const DIM_LIMIT: Duration = Duration::from_secs(10);
const ISO_LIMIT: Duration = Duration::from_secs(60);

type Check = Result<String, String>;

/// Pascal's triangle, independent of the library.
fn choose(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row[k as usize]
}

fn dims(n: usize, r: u64) -> Check {
    let start = Instant::now();
    let k = Kostant::new(n);
    let drop_rule = TruncatedAlgebra::composition_algebra(&k, r, Rationals).map_err(|e| e.to_string())?.dim();
    let y = enumerate_lambda1(n, r as i64);
    let z: Vec<LatticePoint> = y.iter().filter(|p| !p.is_composition(r as i64)).cloned().collect();
    let quotient = quotient_oracle(&k, &y, &z, Rationals).map_err(|e| e.to_string())?.algebra.dim();
    let t = enumerate_t_all(n, r).len();
    let stars = choose((n * (n + 1) / 2) as u64 + r - 1, r);
    let elapsed = start.elapsed();
    let msg = format!("({n},{r}): drop rule {drop_rule}, quotient {quotient}, |T| {t}, binomial {stars}, {elapsed:.2?}");
    if drop_rule == quotient && quotient == t && t as u128 == stars && elapsed < DIM_LIMIT {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_1() -> Check {
    let mut parts = Vec::new();
    for (n, r) in [(2, 2), (2, 4), (3, 2), (3, 3), (4, 2)] {
        parts.push(dims(n, r)?);
    }
    Ok(parts.join("; "))
}

fn criterion_2() -> Check {
    let mut parts = Vec::new();
    for (n, r, p) in [(2, 2, 0), (2, 3, 0), (2, 3, 2), (3, 2, 0), (3, 2, 2), (3, 2, 3), (3, 3, 2)] {
        let start = Instant::now();
        let k = Kostant::new(n);
        let report = match p {
            0 => verify_isomorphism(&k, r, Rationals),
            p => verify_isomorphism(&k, r, PrimeField::new(p).unwrap()),
        }
        .map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let msg = format!("({n},{r},{p}) dim {} in {elapsed:.2?}", report.basis_size);
        if !report.passed() || elapsed >= ISO_LIMIT {
            return Err(format!("{msg}: {report:?}"));
        }
        parts.push(msg);
    }
    Ok(parts.join("; "))
}

/// `d` is a nonnegative combination of `v_i - v_j`, `i < j`, by search.
fn in_root_monoid(d: &[i64], memo: &mut HashMap<Vec<i64>, bool>) -> bool {
    if d.iter().all(|&x| x == 0) {
        return true;
    }
    if d.iter().sum::<i64>() != 0 {
        return false;
    }
    // Σ k d_k rises by j - i ≥ 1 for every root removed and is ≤ 0 on the monoid.
    if d.iter().enumerate().map(|(k, &x)| k as i64 * x).sum::<i64>() > 0 {
        return false;
    }
    if let Some(&v) = memo.get(d) {
        return v;
    }
    let n = d.len();
    let mut found = false;
    'outer: for i in 0..n {
        for j in i + 1..n {
            let mut e = d.to_vec();
            e[i] -= 1;
            e[j] += 1;
            if in_root_monoid(&e, memo) {
                found = true;
                break 'outer;
            }
        }
    }
    memo.insert(d.to_vec(), found);
    found
}

fn boxed(n: usize, r: i64) -> Vec<LatticePoint> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (-r..=r).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out.into_iter().map(LatticePoint).collect()
}

fn criterion_3() -> Check {
    let mut pairs = 0usize;
    for n in 1..=3 {
        let mut memo = HashMap::new();
        let pts = boxed(n, 3);
        for x in &pts {
            for y in &pts {
                let d: Vec<i64> = y.0.iter().zip(&x.0).map(|(a, b)| a - b).collect();
                let oracle = in_root_monoid(&d, &mut memo);
                let dom = dominance_leq(x, y).map_err(|e| e.to_string())?;
                let psi = psi_membership(&LatticePoint(d)).is_some();
                if dom != oracle || psi != oracle {
                    return Err(format!("{x:?} vs {y:?}: dominance {dom}, Ψ {psi}, search {oracle}"));
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs on [-3,3]^n, n ≤ 3"))
}

fn criterion_4() -> Check {
    let mut checked = 0usize;
    for n in 1..=3 {
        for r in 0..=4 {
            let all: Vec<MultiIndex> = MultiIndex::all(n, r).collect();
            let mut orbits = BTreeSet::new();
            for i in &all {
                for j in &all {
                    if !i.leq(j) {
                        if t_of_pair(i, j).is_ok() {
                            return Err(format!("unordered pair {i:?}, {j:?} accepted"));
                        }
                        continue;
                    }
                    let t = t_of_pair(i, j).map_err(|e| e.to_string())?;
                    let (i2, j2) = pair_of_t(&t);
                    if orbit_key(i, j) != orbit_key(&i2, &j2) || t_of_pair(&i2, &j2).ok() != Some(t.clone()) {
                        return Err(format!("({i:?}, {j:?}) does not round-trip"));
                    }
                    orbits.insert(orbit_key(i, j));
                    checked += 1;
                }
            }
            let ts = enumerate_t_all(n, r as u64);
            for t in &ts {
                let (i, j) = pair_of_t(t);
                if t_of_pair(&i, &j).ok().as_ref() != Some(t) {
                    return Err(format!("{t:?} does not round-trip"));
                }
            }
            if orbits.len() != ts.len() {
                return Err(format!("n {n} r {r}: {} orbits vs {} matrices", orbits.len(), ts.len()));
            }
        }
    }
    Ok(format!("{checked} ordered pairs, n ≤ 3, r ≤ 4"))
}

fn criterion_5() -> Check {
    let mut parts = Vec::new();
    for (n, r) in [(3, 2), (3, 3), (4, 2)] {
        let k = Kostant::new(n);
        for p in [0u64, 2] {
            let report = match p {
                0 => check_strong_idempotent_chain(&k, r, Rationals),
                p => check_strong_idempotent_chain(&k, r, PrimeField::new(p).unwrap()),
            }
            .map_err(|e| e.to_string())?;
            let agree = report.steps.iter().all(|s| s.dim_aea == s.dim_tensor);
            let msg = format!("({n},{r},{p}) {} steps {}→{}", report.steps.len(), report.start_dim, report.final_dim);
            if !report.passed() || !agree {
                return Err(format!("{msg}: {report:?}"));
            }
            parts.push(msg);
        }
    }
    Ok(parts.join("; "))
}

fn criterion_6() -> Check {
    let k = Kostant::new(2);
    let alpha = |m: i64| LatticePoint(vec![m, -m]);
    let c0 = minimal_resolution(&k, Rationals, 3, 8, Pivoting::FirstNonzero).map_err(|e| e.to_string())?;
    let b0 = c0.betti_data();
    if b0[&1] != vec![alpha(1)] || !b0[&2].is_empty() || !b0[&3].is_empty() {
        return Err(format!("char 0 betti data {b0:?}"));
    }
    let c2 = minimal_resolution(&k, PrimeField::new(2).unwrap(), 1, 8, Pivoting::FirstNonzero).map_err(|e| e.to_string())?;
    // Slice kα of the divided-power algebra is spanned by e^(k), and the
    // decomposable part is spanned by binom(k, j) e^(k) for 0 < j < k.
    let oracle: Vec<LatticePoint> =
        (1..=8u64).filter(|&m| (1..m).all(|j| choose(m, j) % 2 == 0)).map(|m| alpha(m as i64)).collect();
    let found = c2.betti_data()[&1].clone();
    let exact = c2.verify_exactness(&k).map_err(|e| e.to_string())?;
    if found != oracle || oracle != vec![alpha(1), alpha(2), alpha(4), alpha(8)] || !exact {
        return Err(format!("char 2 P_1 {found:?}, oracle {oracle:?}, exact {exact}"));
    }
    Ok(format!("char 0 length 1; char 2 P_1 at {found:?}"))
}

fn transport_all<F: Field>(k: &Kostant, r: u64, f: F) -> Result<usize, String> {
    let alg = TruncatedAlgebra::composition_algebra(k, r, f).map_err(|e| e.to_string())?;
    for lam in enumerate_compositions(k.n(), r as i64) {
        let b = resolve_simple(k, &alg, &lam, Pivoting::FirstNonzero).map_err(|e| e.to_string())?;
        let report = verify_complex(&b, &alg);
        if !report.passed() || !report.complete {
            return Err(format!("n {} r {r} char {} λ {lam:?}: {report:?}", k.n(), alg.field().characteristic()));
        }
    }
    Ok(alg.points().len())
}

fn criterion_7() -> Check {
    let mut simples = 0;
    let k2 = Kostant::new(2);
    for r in 1..=4 {
        simples += transport_all(&k2, r, Rationals)?;
        simples += transport_all(&k2, r, PrimeField::new(2).unwrap())?;
        simples += transport_all(&k2, r, PrimeField::new(3).unwrap())?;
    }
    let k3 = Kostant::new(3);
    simples += transport_all(&k3, 2, Rationals)?;
    simples += transport_all(&k3, 2, PrimeField::new(2).unwrap())?;
    Ok(format!("{simples} transported resolutions verified"))
}

fn criterion_8() -> Check {
    let mut parts = Vec::new();
    for n in 1..=4 {
        let report = Kostant::new(n).fill_up_to_height(8);
        if report.integrality_failures != 0 {
            return Err(format!("n {n}: {report:?}"));
        }
        parts.push(format!("n {n}: {} products", report.pairs));
    }
    Ok(parts.join(", "))
}

fn criterion_9() -> Check {
    let mut cases = 0;
    for (n, p, l, h) in [(2, 0, 3, 8), (2, 2, 3, 8), (2, 3, 3, 9), (3, 0, 4, 4), (3, 2, 4, 4), (3, 3, 3, 4)] {
        let k = Kostant::new(n);
        for seed in [1u64, 7, 2024] {
            let same = if p == 0 {
                let a = minimal_resolution(&k, Rationals, l, h, Pivoting::FirstNonzero).map_err(|e| e.to_string())?;
                let b = minimal_resolution(&k, Rationals, l, h, Pivoting::Shuffled(seed)).map_err(|e| e.to_string())?;
                a.betti_data() == b.betti_data()
            } else {
                let f = PrimeField::new(p).unwrap();
                let a = minimal_resolution(&k, f, l, h, Pivoting::FirstNonzero).map_err(|e| e.to_string())?;
                let b = minimal_resolution(&k, f, l, h, Pivoting::Shuffled(seed)).map_err(|e| e.to_string())?;
                a.betti_data() == b.betti_data()
            };
            if !same {
                return Err(format!("n {n} char {p} seed {seed}: betti data differ"));
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} comparisons"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("1 algebra dimensions by three routes", criterion_1),
        ("2 isomorphism with the tensor-space algebra", criterion_2),
        ("3 dominance order equals root-monoid order", criterion_3),
        ("4 matrix/orbit bijection", criterion_4),
        ("5 strong idempotent chain", criterion_5),
        ("6 rank-two resolutions", criterion_6),
        ("7 transported resolutions of simples", criterion_7),
        ("8 integral structure constants", criterion_8),
        ("9 betti data independent of pivoting", criterion_9),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        match check() {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{:.2?}]", start.elapsed()),
            Err(msg) => {
                failures += 1;
                println!("FAIL criterion {name}: {msg} [{:.2?}]", start.elapsed());
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
