//! Minimal graded free resolutions of the trivial module over the Kostant form.
//!
//! A free module is a list of generator degrees in `Z^n`. Its slice at a degree
//! `δ` has basis `(g, m)` with `m` a PBW monomial of degree `δ - deg(g)`. The
//! resolution is built one height slice at a time up to a height cutoff `H`
//! and a homological cutoff `L`. Differentials act by right multiplication:
//! an entry `a` from generator `s` of `P_i` to generator `t` of `P_{i-1}` has
//! degree `deg(s) - deg(t)` and sends `x·s` to `(x a)·t`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::combinatorics::{height, LatticePoint, RootCoefficients};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::kostant::{graded_component_basis, AlgebraElement, Kostant, PBWMonomial};
use crate::linalg::{kernel, rank, Echelon, Pivoting};

/// A differential entry `(source generator, target generator, element)`.
pub type GradedEntry<F> = (usize, usize, AlgebraElement<F>);

#[derive(Clone, Debug)]
pub struct GradedComplex<F: Field> {
    pub n: usize,
    pub field: F,
    pub length: usize,
    pub height: u64,
    /// Generator degrees of `P_0, …, P_L`.
    pub modules: Vec<Vec<LatticePoint>>,
    /// `differentials[i - 1]` holds the entries of `d_i: P_i → P_{i-1}`.
    pub differentials: Vec<Vec<GradedEntry<F>>>,
    pub diagnostics: Vec<String>,
}

struct SliceBasis {
    basis: Vec<(usize, PBWMonomial)>,
    index: HashMap<(usize, PBWMonomial), usize>,
}

fn slice_basis(gens: &[LatticePoint], delta: &LatticePoint, n: usize) -> SliceBasis {
    let mut basis = Vec::new();
    for (g, d) in gens.iter().enumerate() {
        for m in graded_component_basis(&(delta - d), n) {
            basis.push((g, m));
        }
    }
    let index = basis.iter().cloned().enumerate().map(|(k, gm)| (gm, k)).collect();
    SliceBasis { basis, index }
}

/// All degrees in the root monoid of height at most `h`, lowest first.
fn slices(n: usize, h: u64) -> Vec<LatticePoint> {
    RootCoefficients::up_to_height(n, h).into_iter().map(|c| c.to_point()).collect()
}

impl<F: Field> GradedComplex<F> {
    pub fn module(&self, i: usize) -> &[LatticePoint] {
        self.modules.get(i).map_or(&[], |v| v.as_slice())
    }

    fn entries_by_source(&self, i: usize) -> HashMap<usize, Vec<(usize, &AlgebraElement<F>)>> {
        let mut out: HashMap<usize, Vec<(usize, &AlgebraElement<F>)>> = HashMap::new();
        if i >= 1 {
            if let Some(d) = self.differentials.get(i - 1) {
                for (s, t, a) in d {
                    out.entry(*s).or_default().push((*t, a));
                }
            }
        }
        out
    }

    /// Images of the slice basis of `P_i` at `δ` in the slice of `P_{i-1}`.
    fn slice_matrix(&self, kostant: &Kostant, i: usize, delta: &LatticePoint) -> Result<(usize, Vec<Vec<F::Elem>>)> {
        let f = &self.field;
        let dom = slice_basis(self.module(i), delta, self.n);
        let cod = slice_basis(self.module(i - 1), delta, self.n);
        let entries = self.entries_by_source(i);
        let mut images = Vec::with_capacity(dom.basis.len());
        for (g, m) in &dom.basis {
            let mut v = vec![f.zero(); cod.basis.len()];
            for (t, a) in entries.get(g).into_iter().flatten() {
                for (am, ac) in a.terms() {
                    for (pm, pc) in kostant.multiply_monomials(m, am, f)?.terms() {
                        let k = cod.index[&(*t, pm.clone())];
                        f.add_mul_assign(&mut v[k], ac, pc);
                    }
                }
            }
            images.push(v);
        }
        Ok((cod.basis.len(), images))
    }

    pub fn slice_dim(&self, i: usize, delta: &LatticePoint) -> usize {
        slice_basis(self.module(i), delta, self.n).basis.len()
    }

    fn rank_at(&self, kostant: &Kostant, i: usize, delta: &LatticePoint) -> Result<usize> {
        if i == 0 || i > self.length || i > self.differentials.len() {
            return Ok(0);
        }
        let (dim, images) = self.slice_matrix(kostant, i, delta)?;
        Ok(rank(&self.field, dim, &images))
    }

    /// Exactness on every slice of height `≤ H`: `ker ε = im d_1` and
    /// `ker d_i = im d_{i+1}` for `1 ≤ i < L`.
    pub fn verify_exactness(&self, kostant: &Kostant) -> Result<bool> {
        for delta in slices(self.n, self.height) {
            let mut ranks = Vec::with_capacity(self.length + 2);
            for i in 0..=self.length + 1 {
                ranks.push(self.rank_at(kostant, i, &delta)?);
            }
            let augmentation = usize::from(delta.is_zero());
            if self.slice_dim(0, &delta) != augmentation + ranks[1] {
                return Ok(false);
            }
            for i in 1..self.length {
                if self.slice_dim(i, &delta) != ranks[i] + ranks[i + 1] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `d_{i-1} ∘ d_i = 0` on the entries.
    pub fn verify_d_squared(&self, kostant: &Kostant) -> Result<bool> {
        let f = &self.field;
        for i in 2..=self.differentials.len() {
            let lower = self.entries_by_source(i - 1);
            let mut composite: HashMap<(usize, usize), AlgebraElement<F>> = HashMap::new();
            for (s, t, a) in &self.differentials[i - 1] {
                for (u, b) in lower.get(t).into_iter().flatten() {
                    let ab = kostant.multiply(a, b, f)?;
                    let slot = composite.entry((*s, *u)).or_insert_with(|| AlgebraElement::zero(self.n));
                    *slot = slot.add(&ab, f);
                }
            }
            if composite.values().any(|e| !e.is_zero()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every entry is homogeneous of degree `deg(source) - deg(target)`.
    pub fn verify_homogeneity(&self) -> bool {
        self.differentials.iter().enumerate().all(|(i, d)| {
            d.iter().all(|(s, t, a)| {
                let expected = &self.modules[i + 1][*s] - &self.modules[i][*t];
                a.terms().all(|(m, _)| m.degree() == expected)
            })
        })
    }

    /// No entry has a nonzero degree-zero component.
    pub fn verify_minimality(&self) -> bool {
        let f = &self.field;
        self.differentials
            .iter()
            .flatten()
            .all(|(_, _, a)| f.is_zero(&a.unit_component(f)))
    }

    /// Generator degrees per homological index, sorted.
    pub fn betti_data(&self) -> BTreeMap<usize, Vec<LatticePoint>> {
        self.modules
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let mut d = m.clone();
                d.sort_by_key(|p| (height(p), p.clone()));
                (i, d)
            })
            .collect()
    }

    pub fn to_json(&self) -> GradedComplexJson {
        let f = &self.field;
        GradedComplexJson {
            n: self.n,
            char: f.characteristic(),
            length: self.length,
            height: self.height,
            modules: self.modules.clone(),
            differentials: self
                .differentials
                .iter()
                .map(|d| {
                    d.iter()
                        .map(|(s, t, a)| GradedEntryJson {
                            row: *t,
                            col: *s,
                            terms: a.terms().map(|(m, c)| (m.clone(), f.format(c))).collect(),
                        })
                        .collect()
                })
                .collect(),
            diagnostics: self.diagnostics.clone(),
        }
    }

    pub fn from_json(json: &GradedComplexJson, field: F) -> Result<Self> {
        if json.char != field.characteristic() {
            return Err(Error::InvalidParameter(format!(
                "complex is over characteristic {}, field has {}",
                json.char,
                field.characteristic()
            )));
        }
        let mut differentials = Vec::with_capacity(json.differentials.len());
        for (i, d) in json.differentials.iter().enumerate() {
            let mut entries = Vec::with_capacity(d.len());
            for e in d {
                if e.col >= json.modules.get(i + 1).map_or(0, |m| m.len()) || e.row >= json.modules[i].len() {
                    return Err(Error::Parse(format!("entry ({}, {}) of d_{} out of range", e.row, e.col, i + 1)));
                }
                let mut a = AlgebraElement::zero(json.n);
                for (m, c) in &e.terms {
                    a.add_term(&field, m.clone(), field.parse(c)?);
                }
                entries.push((e.col, e.row, a));
            }
            differentials.push(entries);
        }
        Ok(GradedComplex {
            n: json.n,
            field,
            length: json.length,
            height: json.height,
            modules: json.modules.clone(),
            differentials,
            diagnostics: json.diagnostics.clone(),
        })
    }
}

/// Serialised differential entry: `row` indexes the target generator in
/// `P_{i-1}`, `col` the source generator in `P_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedEntryJson {
    pub row: usize,
    pub col: usize,
    pub terms: Vec<(PBWMonomial, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedComplexJson {
    pub n: usize,
    pub char: u64,
    pub length: usize,
    pub height: u64,
    pub modules: Vec<Vec<LatticePoint>>,
    pub differentials: Vec<Vec<GradedEntryJson>>,
    pub diagnostics: Vec<String>,
}

/// The minimal graded free resolution `P_L → … → P_0 → 𝕂` up to height `H`.
///
/// At each step the kernel of the last map is computed slice by slice; its
/// minimal generators at `δ` are kernel vectors not in the span of `m·v_g`
/// for generators `g` already placed at lower degrees.
pub fn minimal_resolution<F: Field>(
    kostant: &Kostant,
    field: F,
    length: usize,
    height_cutoff: u64,
    pivoting: Pivoting,
) -> Result<GradedComplex<F>> {
    let n = kostant.n();
    let f = field.clone();
    let degrees = slices(n, height_cutoff);
    let mut c = GradedComplex {
        n,
        field,
        length,
        height: height_cutoff,
        modules: vec![vec![LatticePoint::zero(n)]],
        differentials: Vec::new(),
        diagnostics: Vec::new(),
    };
    // Kernel of the augmentation: everything except the degree-zero slice.
    let mut kernels: HashMap<LatticePoint, Vec<Vec<F::Elem>>> = HashMap::new();
    for delta in degrees.iter().filter(|d| !d.is_zero()) {
        let dim = c.slice_dim(0, delta);
        let unit = (0..dim)
            .map(|k| {
                let mut v = vec![f.zero(); dim];
                v[k] = f.one();
                v
            })
            .collect();
        kernels.insert(delta.clone(), unit);
    }
    for i in 0..length {
        let mut gens: Vec<(LatticePoint, Vec<F::Elem>)> = Vec::new();
        for delta in &degrees {
            let Some(kd) = kernels.get(delta) else { continue };
            let target = slice_basis(c.module(i), delta, n);
            let mut rad = Echelon::new(f.clone(), target.basis.len(), pivoting);
            for (gdeg, v) in &gens {
                let Some(h) = height(&(delta - gdeg)) else { continue };
                if h == 0 {
                    continue;
                }
                let source = slice_basis(c.module(i), gdeg, n);
                for m in graded_component_basis(&(delta - gdeg), n) {
                    let mut w = vec![f.zero(); target.basis.len()];
                    for (pos, coeff) in v.iter().enumerate() {
                        if f.is_zero(coeff) {
                            continue;
                        }
                        let (g, ref mm) = source.basis[pos];
                        for (pm, pc) in kostant.multiply_monomials(&m, mm, &f)?.terms() {
                            f.add_mul_assign(&mut w[target.index[&(g, pm.clone())]], coeff, pc);
                        }
                    }
                    rad.insert(w);
                }
            }
            for j in pivoting.input_order(kd.len()) {
                if rad.insert(kd[j].clone()) {
                    gens.push((delta.clone(), kd[j].clone()));
                }
            }
        }
        let mut module = Vec::with_capacity(gens.len());
        let mut entries = Vec::new();
        for (g, (delta, v)) in gens.iter().enumerate() {
            module.push(delta.clone());
            let basis = slice_basis(c.module(i), delta, n).basis;
            let mut by_target: BTreeMap<usize, AlgebraElement<F>> = BTreeMap::new();
            for (pos, coeff) in v.iter().enumerate() {
                let (t, m) = &basis[pos];
                by_target.entry(*t).or_insert_with(|| AlgebraElement::zero(n)).add_term(&f, m.clone(), coeff.clone());
            }
            entries.extend(by_target.into_iter().filter(|(_, a)| !a.is_zero()).map(|(t, a)| (g, t, a)));
        }
        if module.is_empty() {
            c.diagnostics.push(format!("P_{} has no generators of height ≤ {}", i + 1, height_cutoff));
        }
        c.modules.push(module);
        c.differentials.push(entries);
        if i + 1 < length {
            kernels.clear();
            for delta in &degrees {
                let (dim, images) = c.slice_matrix(kostant, i + 1, delta)?;
                let k = kernel(&f, dim, &images, pivoting);
                if !k.is_empty() {
                    kernels.insert(delta.clone(), k);
                }
            }
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn alpha(k: i64) -> LatticePoint {
        LatticePoint(vec![k, -k])
    }

    #[test]
    fn n2_char0_has_length_one() {
        let k = Kostant::new(2);
        let c = minimal_resolution(&k, Rationals, 3, 6, Pivoting::FirstNonzero).unwrap();
        let b = c.betti_data();
        assert_eq!(b[&0], vec![alpha(0)]);
        assert_eq!(b[&1], vec![alpha(1)]);
        assert!(b[&2].is_empty() && b[&3].is_empty());
        assert!(c.verify_exactness(&k).unwrap());
        assert!(c.verify_minimality());
        assert!(c.verify_homogeneity());
    }

    #[test]
    fn n2_char2_divided_power_generators() {
        let k = Kostant::new(2);
        let c = minimal_resolution(&k, PrimeField::new(2).unwrap(), 2, 4, Pivoting::FirstNonzero).unwrap();
        assert_eq!(c.betti_data()[&1], vec![alpha(1), alpha(2), alpha(4)]);
        assert!(c.verify_exactness(&k).unwrap());
        assert!(c.verify_d_squared(&k).unwrap());
    }

    #[test]
    fn length_zero_is_p0_only() {
        let k = Kostant::new(3);
        let c = minimal_resolution(&k, Rationals, 0, 3, Pivoting::FirstNonzero).unwrap();
        assert_eq!(c.betti_data().len(), 1);
        assert_eq!(c.betti_data()[&0], vec![LatticePoint::zero(3)]);
    }

    #[test]
    fn injected_faults_are_caught() {
        let k = Kostant::new(2);
        let f = PrimeField::new(3).unwrap();
        let c = minimal_resolution(&k, f, 3, 6, Pivoting::FirstNonzero).unwrap();
        assert!(c.verify_exactness(&k).unwrap() && c.verify_minimality());
        let mut zeroed = c.clone();
        zeroed.differentials[0][0].2 = AlgebraElement::zero(2);
        assert!(!zeroed.verify_exactness(&k).unwrap());
        let mut unit = c.clone();
        unit.differentials[0][0].2 = AlgebraElement::one(2, &f);
        assert!(!unit.verify_minimality());
    }

    #[test]
    fn json_round_trip() {
        let k = Kostant::new(3);
        let c = minimal_resolution(&k, Rationals, 2, 3, Pivoting::FirstNonzero).unwrap();
        let json = serde_json::to_string(&c.to_json()).unwrap();
        let back: GradedComplexJson = serde_json::from_str(&json).unwrap();
        let c2 = GradedComplex::from_json(&back, Rationals).unwrap();
        assert_eq!(c2.to_json(), c.to_json());
        assert!(GradedComplex::from_json(&back, PrimeField::new(2).unwrap()).is_err());
    }
}
