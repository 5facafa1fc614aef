//! Transport of graded Kostant resolutions to projective resolutions of simple
//! modules over point algebras.
//!
//! A generator of degree `γ` in `P_i` becomes the summand `Aχ_{λ+γ}`, or is
//! dropped if `λ+γ` is not a point of the algebra. An entry `Σ c_m m` from
//! generator `s` to generator `t` becomes `Σ c_m (m at λ+γ_t)`, keeping only
//! the arrows that are basis elements of the algebra.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{enumerate_compositions, enumerate_lambda1, height, LatticePoint};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::kostant::Kostant;
use crate::linalg::Pivoting;
use crate::projective::{ComplexReport, ProjectiveComplex};
use crate::resolution::{minimal_resolution, GradedComplex};
use crate::skew_category::{BasedArrow, Element, TruncatedAlgebra};

/// Basis indices of the projective `Aχ_μ`: the arrows leaving `μ`.
pub fn projective_module<F: Field>(alg: &TruncatedAlgebra<F>, mu: &LatticePoint) -> Result<Vec<usize>> {
    let p = alg.point_index(mu).ok_or(Error::NotSubset)?;
    Ok(alg.arrows_from(p).to_vec())
}

/// Largest height of `μ - λ` over points `μ ⊵ λ` of the algebra.
pub fn max_height_above<F: Field>(alg: &TruncatedAlgebra<F>, lambda: &LatticePoint) -> u64 {
    alg.points().iter().filter_map(|mu| height(&(mu - lambda))).max().unwrap_or(0)
}

#[derive(Clone, Debug)]
pub struct BorelComplex<F: Field> {
    pub lambda: LatticePoint,
    pub complex: ProjectiveComplex<F>,
    /// Degree `γ` of the Kostant generator behind each summand.
    pub degrees: Vec<Vec<LatticePoint>>,
    pub source_length: usize,
    pub source_height: u64,
    pub h_max: u64,
    /// The source resolution reached every relevant slice and some stage
    /// transported to zero, so the result is the whole resolution.
    pub complete: bool,
}

/// Moves `c` along `λ` into `alg`.
pub fn transport_resolution<F: Field>(
    c: &GradedComplex<F>,
    lambda: &LatticePoint,
    alg: &TruncatedAlgebra<F>,
) -> Result<BorelComplex<F>> {
    let f = alg.field();
    if c.field.characteristic() != f.characteristic() {
        return Err(Error::InvalidParameter(format!(
            "resolution is over characteristic {}, algebra over {}",
            c.field.characteristic(),
            f.characteristic()
        )));
    }
    if c.n != alg.n() || lambda.n() != alg.n() {
        return Err(Error::RankMismatch(alg.n(), c.n));
    }
    alg.point_index(lambda).ok_or(Error::NotSubset)?;
    let mut renumber = Vec::with_capacity(c.modules.len());
    let mut modules = Vec::with_capacity(c.modules.len());
    let mut degrees = Vec::with_capacity(c.modules.len());
    for m in &c.modules {
        let mut map = Vec::with_capacity(m.len());
        let (mut pts, mut degs) = (Vec::new(), Vec::new());
        for gamma in m {
            let p = lambda + gamma;
            if alg.point_index(&p).is_some() {
                map.push(Some(pts.len()));
                pts.push(p);
                degs.push(gamma.clone());
            } else {
                map.push(None);
            }
        }
        renumber.push(map);
        modules.push(pts);
        degrees.push(degs);
    }
    let mut differentials = Vec::with_capacity(c.differentials.len());
    for (i, d) in c.differentials.iter().enumerate() {
        let mut entries = Vec::new();
        for (s, t, a) in d {
            let (Some(s2), Some(t2)) = (renumber[i + 1][*s], renumber[i][*t]) else { continue };
            let base = &modules[i][t2];
            let mut b = Element::zero();
            for (m, coeff) in a.terms() {
                if let Some(idx) = alg.index_of(&BasedArrow::new(m.clone(), base.clone())) {
                    b.add_term(f, idx, coeff.clone());
                }
            }
            if !b.is_zero() {
                entries.push((s2, t2, b));
            }
        }
        differentials.push(entries);
    }
    let h_max = max_height_above(alg, lambda);
    let stage_vanishes = c
        .modules
        .iter()
        .any(|m| m.iter().all(|g| height(g).is_some_and(|h| h > h_max)));
    let complete = c.height >= h_max && stage_vanishes;
    while modules.len() > 1 && modules.last().is_some_and(|m| m.is_empty()) {
        modules.pop();
        degrees.pop();
        differentials.pop();
    }
    Ok(BorelComplex {
        lambda: lambda.clone(),
        complex: ProjectiveComplex { modules, differentials },
        degrees,
        source_length: c.length,
        source_height: c.height,
        h_max,
        complete,
    })
}

/// Resolves the trivial module with cutoffs large enough for `λ` and
/// transports it into `alg`.
pub fn resolve_simple<F: Field>(
    kostant: &Kostant,
    alg: &TruncatedAlgebra<F>,
    lambda: &LatticePoint,
    pivoting: Pivoting,
) -> Result<BorelComplex<F>> {
    let h = max_height_above(alg, lambda);
    let c = minimal_resolution(kostant, alg.field().clone(), h as usize + 1, h, pivoting)?;
    transport_resolution(&c, lambda, alg)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransportReport {
    pub complete: bool,
    pub h_max: u64,
    /// Points at which homology was checked.
    pub covered_points: usize,
    pub complex: ComplexReport,
    /// Alternating sum of slice dimensions equals the simple; checked only
    /// for complete complexes.
    pub euler_characteristic: Option<bool>,
}

impl TransportReport {
    pub fn passed(&self) -> bool {
        self.complex.passed() && self.euler_characteristic != Some(false)
    }
}

/// Checks a transported complex. Incomplete complexes are checked only at
/// interior spots and on points within the height cutoff of the source.
pub fn verify_complex<F: Field>(b: &BorelComplex<F>, alg: &TruncatedAlgebra<F>) -> TransportReport {
    let c = &b.complex;
    let (spots, slices): (Vec<usize>, Vec<usize>) = if b.complete {
        ((1..=c.length()).collect(), (0..alg.points().len()).collect())
    } else {
        let top = b.source_length.saturating_sub(1).min(c.length());
        let covered = alg
            .points()
            .iter()
            .enumerate()
            .filter(|(_, p)| height(&(*p - &b.lambda)).is_some_and(|h| h <= b.source_height))
            .map(|(t, _)| t)
            .collect();
        ((1..=top).collect(), covered)
    };
    let euler_characteristic = b.complete.then(|| {
        let lam = alg.point_index(&b.lambda);
        (0..alg.points().len()).all(|t| {
            let chi: i64 = (0..=c.length())
                .map(|i| {
                    let d = c.slice_dim(alg, i, t) as i64;
                    if i % 2 == 0 { d } else { -d }
                })
                .sum();
            chi == i64::from(Some(t) == lam)
        })
    });
    TransportReport {
        complete: b.complete,
        h_max: b.h_max,
        covered_points: slices.len(),
        complex: c.verify_on(alg, &b.lambda, &spots, &slices),
        euler_characteristic,
    }
}

impl<F: Field> BorelComplex<F> {
    /// Multiplicity of `P(μ)` in `P_i`, which for a minimal resolution is
    /// `dim Ext^i(K_λ, K_μ)`.
    pub fn ext_dimensions(&self) -> BTreeMap<usize, BTreeMap<LatticePoint, usize>> {
        self.complex
            .modules
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let mut counts = BTreeMap::new();
                for p in m {
                    *counts.entry(p.clone()).or_insert(0) += 1;
                }
                (i, counts)
            })
            .collect()
    }

    /// `(i, μ, dim)` rows of [`ext_dimensions`](Self::ext_dimensions).
    pub fn ext_rows(&self) -> Vec<(usize, LatticePoint, usize)> {
        self.ext_dimensions()
            .into_iter()
            .flat_map(|(i, m)| m.into_iter().map(move |(mu, d)| (i, mu, d)))
            .collect()
    }

    /// Serialised form; term indices refer to the basis of `alg`.
    pub fn to_json(&self, alg: &TruncatedAlgebra<F>) -> BorelComplexJson {
        let f = alg.field();
        BorelComplexJson {
            n: alg.n(),
            r: alg.r(),
            char: f.characteristic(),
            lambda: self.lambda.clone(),
            complete: self.complete,
            h_max: self.h_max,
            source_length: self.source_length,
            source_height: self.source_height,
            modules: self.complex.modules.clone(),
            degrees: self.degrees.clone(),
            differentials: self
                .complex
                .differentials
                .iter()
                .map(|d| {
                    d.iter()
                        .map(|(s, t, e)| BorelEntryJson {
                            row: *t,
                            col: *s,
                            terms: e.terms().map(|(k, c)| (k, f.format(c))).collect(),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// Serialised differential entry: `row` indexes the target summand, `col` the
/// source summand, and `terms` pairs basis indices with coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BorelEntryJson {
    pub row: usize,
    pub col: usize,
    pub terms: Vec<(usize, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BorelComplexJson {
    pub n: usize,
    pub r: i64,
    pub char: u64,
    pub lambda: LatticePoint,
    pub complete: bool,
    pub h_max: u64,
    pub source_length: usize,
    pub source_height: u64,
    pub modules: Vec<Vec<LatticePoint>>,
    pub degrees: Vec<Vec<LatticePoint>>,
    pub differentials: Vec<Vec<BorelEntryJson>>,
}

/// Transporting into the convex algebra on the dominance interval and then
/// pushing forward to the composition algebra agrees with transporting
/// directly.
pub fn check_functoriality<F: Field>(
    kostant: &Kostant,
    c: &GradedComplex<F>,
    lambda: &LatticePoint,
    target: &TruncatedAlgebra<F>,
) -> Result<bool> {
    let n = target.n();
    let r = target.r();
    let f = target.field().clone();
    let y = enumerate_lambda1(n, r);
    let big = TruncatedAlgebra::truncate_convex(kostant, &y, f)?;
    let killed: Vec<LatticePoint> = y.iter().filter(|p| !p.is_composition(r)).cloned().collect();
    let q = big.quotient_by_points(&killed)?;
    let via = transport_resolution(c, lambda, &big)?.complex.push_forward(&q);
    let direct = transport_resolution(c, lambda, target)?.complex;
    let mut via_modules = via.modules.clone();
    while via_modules.len() > 1 && via_modules.last().is_some_and(|m| m.is_empty()) {
        via_modules.pop();
    }
    if via_modules != direct.modules {
        return Ok(false);
    }
    let relabel = |e: &Element<F>| -> Option<Element<F>> {
        let mut out = Element::zero();
        for (k, coeff) in e.terms() {
            out.add_term(target.field(), target.index_of(&q.algebra.basis()[k])?, coeff.clone());
        }
        Some(out)
    };
    for (i, d) in direct.differentials.iter().enumerate() {
        let mut lhs: Vec<_> = Vec::new();
        for (s, t, e) in via.differentials.get(i).into_iter().flatten() {
            match relabel(e) {
                Some(e2) => lhs.push((*s, *t, e2)),
                None => return Ok(false),
            }
        }
        let mut rhs = d.clone();
        lhs.sort_by_key(|x| (x.0, x.1));
        rhs.sort_by_key(|x| (x.0, x.1));
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(enumerate_compositions(n, r).iter().all(|p| target.point_index(p).is_some()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::projective::minimal_resolution_of_simple;

    fn p(v: &[i64]) -> LatticePoint {
        LatticePoint(v.to_vec())
    }

    #[test]
    fn n2_r2_bottom_weight() {
        let k = Kostant::new(2);
        let alg = TruncatedAlgebra::composition_algebra(&k, 2, Rationals).unwrap();
        let b = resolve_simple(&k, &alg, &p(&[0, 2]), Pivoting::FirstNonzero).unwrap();
        assert!(b.complete);
        assert_eq!(b.complex.modules, vec![vec![p(&[0, 2])], vec![p(&[1, 1])]]);
        assert!(verify_complex(&b, &alg).passed());
    }

    fn check_all_simples<F: Field>(k: &Kostant, alg: &TruncatedAlgebra<F>) {
        let sorted = |m: &[Vec<LatticePoint>]| -> Vec<Vec<LatticePoint>> {
            m.iter()
                .map(|x| {
                    let mut x = x.clone();
                    x.sort();
                    x
                })
                .collect()
        };
        for lam in alg.points().to_vec() {
            let b = resolve_simple(k, alg, &lam, Pivoting::FirstNonzero).unwrap();
            let report = verify_complex(&b, alg);
            assert!(report.passed(), "λ {lam:?}: {report:?}");
            let direct = minimal_resolution_of_simple(alg, &lam, b.complex.length() + 1, Pivoting::FirstNonzero).unwrap();
            let mut ours = b.complex.modules.clone();
            ours.resize(direct.modules.len(), Vec::new());
            assert_eq!(sorted(&ours), sorted(&direct.modules), "λ {lam:?}");
        }
    }

    #[test]
    fn matches_direct_resolution_of_simples() {
        let k = Kostant::new(2);
        for r in 1..=4u64 {
            check_all_simples(&k, &TruncatedAlgebra::composition_algebra(&k, r, Rationals).unwrap());
            for ch in [2, 3] {
                check_all_simples(&k, &TruncatedAlgebra::composition_algebra(&k, r, PrimeField::new(ch).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn truncated_source_is_incomplete() {
        let k = Kostant::new(2);
        let f = PrimeField::new(2).unwrap();
        let alg = TruncatedAlgebra::composition_algebra(&k, 4, f).unwrap();
        let lam = p(&[0, 4]);
        let c = minimal_resolution(&k, f, 1, 4, Pivoting::FirstNonzero).unwrap();
        let b = transport_resolution(&c, &lam, &alg).unwrap();
        assert!(!b.complete);
        let report = verify_complex(&b, &alg);
        assert!(report.passed());
        assert_eq!(report.euler_characteristic, None);
    }

    #[test]
    fn mismatched_characteristic_rejected() {
        let k = Kostant::new(2);
        let alg = TruncatedAlgebra::composition_algebra(&k, 2, Rationals).unwrap();
        let c = minimal_resolution(&k, PrimeField::new(2).unwrap(), 2, 2, Pivoting::FirstNonzero).unwrap();
        let alg2 = TruncatedAlgebra::composition_algebra(&k, 2, PrimeField::new(3).unwrap()).unwrap();
        assert!(transport_resolution(&c, &p(&[0, 2]), &alg2).is_err());
        let c0 = minimal_resolution(&k, Rationals, 2, 2, Pivoting::FirstNonzero).unwrap();
        assert!(transport_resolution(&c0, &p(&[3, -1]), &alg).is_err());
    }

    #[test]
    fn functorial_through_dominance_interval() {
        let k = Kostant::new(3);
        let f = PrimeField::new(2).unwrap();
        let alg = TruncatedAlgebra::composition_algebra(&k, 2, f).unwrap();
        let c = minimal_resolution(&k, f, 5, 4, Pivoting::FirstNonzero).unwrap();
        for lam in alg.points().to_vec() {
            assert!(check_functoriality(&k, &c, &lam, &alg).unwrap(), "{lam:?}");
        }
    }

    #[test]
    fn ext_rows_and_json() {
        let k = Kostant::new(2);
        let alg = TruncatedAlgebra::composition_algebra(&k, 2, Rationals).unwrap();
        let b = resolve_simple(&k, &alg, &p(&[0, 2]), Pivoting::FirstNonzero).unwrap();
        assert_eq!(b.ext_rows(), vec![(0, p(&[0, 2]), 1), (1, p(&[1, 1]), 1)]);
        let json = b.to_json(&alg);
        assert_eq!(json.differentials[0].len(), 1);
        let s = serde_json::to_string(&json).unwrap();
        let back: BorelComplexJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back, json);
    }
}
