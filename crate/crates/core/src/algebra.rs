//! Graded algebras behind one interface: a finite structure-constant table, or
//! the twisted lattice algebra of a noncommutative torus tensored with an
//! exterior algebra of constant forms.

use crate::error::{Error, Result};
use crate::linalg::{solve_linear, SparseMatrix};
use crate::scalar::Scalar;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeMap;

/// A basis element. Table kernels use `form` as the basis index and an empty
/// weight; the torus kernel uses a lattice weight and a bitmask of forms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisKey {
    pub weight: Vec<i64>,
    pub form: u32,
}

impl BasisKey {
    pub fn table(i: usize) -> BasisKey {
        BasisKey { weight: Vec::new(), form: i as u32 }
    }

    pub fn nc(weight: Vec<i64>, form: u32) -> BasisKey {
        BasisKey { weight, form }
    }

    pub fn index(&self) -> usize {
        self.form as usize
    }
}

/// A finite linear combination of basis elements with exact coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AElement {
    terms: BTreeMap<BasisKey, Scalar>,
}

impl AElement {
    pub fn zero() -> AElement {
        AElement::default()
    }

    pub fn term(key: BasisKey, c: Scalar) -> AElement {
        let mut a = AElement::zero();
        a.add_term(key, &c);
        a
    }

    pub fn basis(key: BasisKey) -> AElement {
        AElement::term(key, Scalar::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisKey, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &BasisKey) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, key: BasisKey, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                let s = &*v + c;
                if s.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &AElement, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), &(v * c));
        }
    }

    pub fn add_assign(&mut self, other: &AElement) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v);
        }
    }

    pub fn sub_assign(&mut self, other: &AElement) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), &-v);
        }
    }

    pub fn plus(&self, other: &AElement) -> AElement {
        let mut a = self.clone();
        a.add_assign(other);
        a
    }

    pub fn minus(&self, other: &AElement) -> AElement {
        let mut a = self.clone();
        a.sub_assign(other);
        a
    }

    pub fn scale(&self, c: &Scalar) -> AElement {
        let mut a = AElement::zero();
        a.add_scaled(self, c);
        a
    }

    pub fn neg(&self) -> AElement {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn signed(&self, negate: bool) -> AElement {
        if negate {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Keeps the terms whose key satisfies `pred`.
    pub fn filter(&self, mut pred: impl FnMut(&BasisKey) -> bool) -> AElement {
        AElement {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| pred(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> AElement {
        let mut a = AElement::zero();
        for (k, v) in &self.terms {
            a.add_term(k.clone(), &f(v));
        }
        a
    }
}

/// Sign of v_I ∧ v_J as `Some(negative)`, or `None` when I and J overlap.
pub fn wedge_sign(i: u32, j: u32) -> Option<bool> {
    if i & j != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut jj = j;
    while jj != 0 {
        let b = jj.trailing_zeros();
        inversions += (i >> (b + 1)).count_ones();
        jj &= jj - 1;
    }
    Some(inversions % 2 == 1)
}

/// A finite-dimensional graded algebra given by structure constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableAlgebra {
    pub names: Vec<String>,
    pub degrees: Vec<u32>,
    pub unit: usize,
    /// `mult[i][j]` is the product of basis elements i and j.
    pub mult: Vec<Vec<AElement>>,
}

impl TableAlgebra {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn top_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The ground field in degree 0.
    pub fn field() -> TableAlgebra {
        TableAlgebra {
            names: vec!["1".into()],
            degrees: vec![0],
            unit: 0,
            mult: vec![vec![AElement::basis(BasisKey::table(0))]],
        }
    }

    /// Exterior algebra on degree-1 generators; basis ordered by degree, then
    /// lexicographically by index set. Returns the algebra and the bitmask of
    /// each basis element.
    pub fn exterior(gens: &[String]) -> (TableAlgebra, Vec<u32>) {
        let n = gens.len();
        let mut masks: Vec<u32> = (0..(1u32 << n)).collect();
        masks.sort_by_key(|&m| {
            let bits: Vec<u32> = (0..n as u32).filter(|b| m >> b & 1 == 1).collect();
            (m.count_ones(), bits)
        });
        let pos: BTreeMap<u32, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let names = masks
            .iter()
            .map(|&m| {
                if m == 0 {
                    "1".to_string()
                } else {
                    (0..n).filter(|b| m >> b & 1 == 1).map(|b| gens[b].as_str()).collect::<Vec<_>>().join("^")
                }
            })
            .collect();
        let degrees = masks.iter().map(|m| m.count_ones()).collect();
        let mult = masks
            .iter()
            .map(|&a| {
                masks
                    .iter()
                    .map(|&b| match wedge_sign(a, b) {
                        None => AElement::zero(),
                        Some(neg) => AElement::term(
                            BasisKey::table(pos[&(a | b)]),
                            Scalar::from_int(if neg { -1 } else { 1 }),
                        ),
                    })
                    .collect()
            })
            .collect();
        (TableAlgebra { names, degrees, unit: 0, mult }, masks)
    }

    /// k[x]/(x^n) with |x| = `deg`; no Koszul signs (x² may be nonzero for odd x).
    pub fn truncated_polynomial(var: &str, deg: u32, n: usize) -> TableAlgebra {
        let names = (0..n)
            .map(|p| match p {
                0 => "1".to_string(),
                1 => var.to_string(),
                _ => format!("{var}{p}"),
            })
            .collect();
        let degrees = (0..n as u32).map(|p| p * deg).collect();
        let mult = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        if a + b < n {
                            AElement::basis(BasisKey::table(a + b))
                        } else {
                            AElement::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        TableAlgebra { names, degrees, unit: 0, mult }
    }

    /// A degree-0 algebra spanned by the given square matrices, the first of
    /// which must be the identity. Products are re-expanded in that basis.
    pub fn from_matrices(names: &[&str], mats: &[SparseMatrix]) -> Result<TableAlgebra> {
        let size = mats[0].rows();
        let flat = |m: &SparseMatrix| -> Vec<Scalar> {
            (0..size * size).map(|t| m.get(t / size, t % size)).collect()
        };
        let cols: Vec<Vec<Scalar>> = mats.iter().map(flat).collect();
        let span = SparseMatrix::from_columns(size * size, &cols);
        let mut mult = Vec::new();
        for a in mats {
            let mut row = Vec::new();
            for b in mats {
                let p = a.mul(b)?;
                let coords = solve_linear(&span, &flat(&p))?
                    .ok_or_else(|| Error::DimensionMismatch("matrices do not span a subalgebra".into()))?;
                let mut e = AElement::zero();
                for (k, c) in coords.iter().enumerate() {
                    e.add_term(BasisKey::table(k), c);
                }
                row.push(e);
            }
            mult.push(row);
        }
        Ok(TableAlgebra {
            names: names.iter().map(|s| s.to_string()).collect(),
            degrees: vec![0; mats.len()],
            unit: 0,
            mult,
        })
    }

    /// Graded tensor product with (a⊗b)(a'⊗b') = (−1)^{|b||a'|} aa'⊗bb'.
    /// Basis element (i, j) has index i·dim(other) + j.
    pub fn tensor(&self, other: &TableAlgebra) -> TableAlgebra {
        let (n, m) = (self.dim(), other.dim());
        let mut names = Vec::new();
        let mut degrees = Vec::new();
        for i in 0..n {
            for j in 0..m {
                let name = match (i == self.unit, j == other.unit) {
                    (true, true) => "1".to_string(),
                    (true, false) => other.names[j].clone(),
                    (false, true) => self.names[i].clone(),
                    (false, false) => format!("{}.{}", self.names[i], other.names[j]),
                };
                names.push(name);
                degrees.push(self.degrees[i] + other.degrees[j]);
            }
        }
        let mut mult = vec![vec![AElement::zero(); n * m]; n * m];
        for i in 0..n {
            for j in 0..m {
                for i2 in 0..n {
                    for j2 in 0..m {
                        let neg = (other.degrees[j] * self.degrees[i2]) % 2 == 1;
                        let mut e = AElement::zero();
                        for (ka, va) in self.mult[i][i2].terms() {
                            for (kb, vb) in other.mult[j][j2].terms() {
                                e.add_term(
                                    BasisKey::table(ka.index() * m + kb.index()),
                                    &(va * vb).signed(neg),
                                );
                            }
                        }
                        mult[i * m + j][i2 * m + j2] = e;
                    }
                }
            }
        }
        TableAlgebra { names, degrees, unit: self.unit * m + other.unit, mult }
    }
}

/// Which exterior algebra of constant forms the torus kernel carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    DeRham,
    Dolbeault,
}

/// The twisted group algebra of ℤ^r with cocycle σ = exp(2πi B), tensored
/// with constant forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NcTorus {
    pub rank: usize,
    pub b: Vec<Vec<BigRational>>,
    /// σ takes values in the N-th roots of unity, N = lcm of the denominators of B.
    pub conductor: u32,
    pub flavor: Flavor,
    pub complex_structure: Option<Vec<Vec<BigRational>>>,
    pub form_names: Vec<String>,
    /// Row i: coordinates, in the form basis, of the derivative direction of
    /// the i-th lattice generator.
    pub dvec: Vec<Vec<Scalar>>,
}

impl NcTorus {
    pub fn forms(&self) -> usize {
        self.form_names.len()
    }

    /// B(λ, μ) = Σ λ_i B_ij μ_j.
    pub fn pairing(&self, l: &[i64], m: &[i64]) -> BigRational {
        let mut s = BigRational::zero();
        for i in 0..self.rank {
            for j in 0..self.rank {
                if l[i] != 0 && m[j] != 0 && !self.b[i][j].is_zero() {
                    s += &self.b[i][j] * BigRational::from_integer((l[i] * m[j]).into());
                }
            }
        }
        s
    }

    /// σ(λ, μ) = ζ_N^{N·B(λ,μ)}.
    pub fn sigma(&self, l: &[i64], m: &[i64]) -> Scalar {
        let v = self.pairing(l, m) * BigRational::from_integer(self.conductor.into());
        debug_assert!(v.is_integer());
        let k = v.to_integer().mod_floor(&(self.conductor as i64).into());
        Scalar::zeta(self.conductor, k.to_i64().expect("small exponent"))
    }

    /// The form part D(λ) of d[λ] = [λ] ⊗ D(λ).
    pub fn derivative_direction(&self, l: &[i64]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.forms()];
        for (i, &li) in l.iter().enumerate() {
            if li == 0 {
                continue;
            }
            let c = Scalar::from_int(li);
            for (a, v) in self.dvec[i].iter().enumerate() {
                out[a] = &out[a] + &(&c * v);
            }
        }
        out
    }

    pub fn form_name(&self, mask: u32) -> String {
        if mask == 0 {
            return "1".into();
        }
        (0..self.forms())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| self.form_names[b].as_str())
            .collect::<Vec<_>>()
            .join("^")
    }

    pub fn form_mask(&self, name: &str) -> Option<u32> {
        if name == "1" {
            return Some(0);
        }
        let mut mask = 0u32;
        let mut last: Option<usize> = None;
        for part in name.split('^') {
            let b = self.form_names.iter().position(|n| n == part)?;
            if last.is_some_and(|l| l >= b) {
                return None;
            }
            last = Some(b);
            mask |= 1 << b;
        }
        Some(mask)
    }

    /// The lcm of the denominators of B, at least 1.
    pub fn conductor_of(b: &[Vec<BigRational>]) -> u32 {
        let mut n: u64 = 1;
        for row in b {
            for x in row {
                let d = x.denom().to_u64().expect("denominator fits in u64");
                n = n.lcm(&d);
            }
        }
        n as u32
    }
}

/// The algebra kernel of a curved dga.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kernel {
    Table(TableAlgebra),
    NcTorus(NcTorus),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_signs() {
        assert_eq!(wedge_sign(0b01, 0b10), Some(false));
        assert_eq!(wedge_sign(0b10, 0b01), Some(true));
        assert_eq!(wedge_sign(0b01, 0b01), None);
        // v2 ∧ (v1 ∧ v3): one inversion
        assert_eq!(wedge_sign(0b010, 0b101), Some(true));
    }

    #[test]
    fn exterior_basis_order() {
        let (a, masks) = TableAlgebra::exterior(&["x".into(), "y".into(), "z".into()]);
        assert_eq!(a.names, ["1", "x", "y", "z", "x^y", "x^z", "y^z", "x^y^z"]);
        assert_eq!(masks[4], 0b011);
        // y·x = −x^y
        assert_eq!(a.mult[2][1], AElement::term(BasisKey::table(4), Scalar::from_int(-1)));
    }

    #[test]
    fn tensor_sign_rule() {
        let (lx, _) = TableAlgebra::exterior(&["x".into()]);
        let (ly, _) = TableAlgebra::exterior(&["y".into()]);
        let t = lx.tensor(&ly);
        // (1⊗y)(x⊗1) = −x⊗y
        let y = 1;
        let x = 2;
        assert_eq!(t.mult[y][x], AElement::term(BasisKey::table(3), Scalar::from_int(-1)));
        assert_eq!(t.names[3], "x.y");
    }
}
