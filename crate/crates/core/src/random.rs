//! Seeded generators of curved dgas, cohesive modules and elements for the
//! randomized axiom checks. Everything is built from constructions that are
//! valid by construction, so a failing check points at the engine.

use crate::algebra::{AElement, TableAlgebra};
use crate::amatrix::AMatrix;
use crate::cohesive::CohesiveModule;
use crate::dga::{gauge_shift, CurvedDga, DgaHom};
use crate::error::Result;
use crate::functors::pushforward_hom;
use crate::hom::{cone, hom_complex, HomMorphism};
use crate::linalg::{rank_kernel_image, SparseMatrix};
use crate::models::{chevalley_eilenberg, generalized_higgs_algebroid, q, LieAlgebraData};
use crate::scalar::Scalar;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

pub use rand::SeedableRng;
pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small rational, zero about a third of the time.
pub fn scalar(rng: &mut Rng64) -> Scalar {
    if rng.gen_range(0..3) == 0 {
        return Scalar::zero();
    }
    Scalar::from_ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3))
}

pub fn nonzero_scalar(rng: &mut Rng64) -> Scalar {
    let n = *[-3, -2, -1, 1, 2, 3].choose(rng).expect("nonempty");
    Scalar::from_ratio(n, rng.gen_range(1..=3))
}

/// A random combination of the degree-k basis (table kernels).
pub fn element_of_degree(rng: &mut Rng64, a: &CurvedDga, k: u32) -> AElement {
    let mut x = AElement::zero();
    for key in a.basis_of_degree(k) {
        x.add_term(key, &scalar(rng));
    }
    x
}

/// A random inhomogeneous element.
pub fn element(rng: &mut Rng64, a: &CurvedDga) -> AElement {
    (0..=a.top_degree()).fold(AElement::zero(), |x, k| x.plus(&element_of_degree(rng, a, k)))
}

/// A random vector in E ⊗ A whose entries make it homogeneous of `degree`.
pub fn module_vector(rng: &mut Rng64, e: &CohesiveModule, degree: i32) -> Vec<AElement> {
    e.degrees
        .iter()
        .map(|&d| match u32::try_from(degree - d) {
            Ok(k) => element_of_degree(rng, &e.algebra, k),
            Err(_) => AElement::zero(),
        })
        .collect()
}

/// d: A^k → A^{k+1} in the `basis_of_degree` bases.
fn d_matrix(a: &CurvedDga, k: u32) -> SparseMatrix {
    let src = a.basis_of_degree(k);
    let tgt = a.basis_of_degree(k + 1);
    let mut m = SparseMatrix::zeros(tgt.len(), src.len());
    for (j, key) in src.iter().enumerate() {
        let dx = a.apply_d(&AElement::basis(key.clone()));
        for (i, t) in tgt.iter().enumerate() {
            let c = dx.coeff(t);
            if !c.is_zero() {
                m.set(i, j, c);
            }
        }
    }
    m
}

/// A random closed degree-one element θ with θ² = 0, or zero.
pub fn flat_form(rng: &mut Rng64, a: &CurvedDga) -> AElement {
    let keys = a.basis_of_degree(1);
    let kernel = rank_kernel_image(&d_matrix(a, 1)).kernel;
    let mut x = AElement::zero();
    for v in &kernel {
        let c = scalar(rng);
        for (key, y) in keys.iter().zip(v) {
            x.add_term(key.clone(), &(&c * y));
        }
    }
    if a.multiply(&x, &x).is_zero() {
        x
    } else {
        AElement::zero()
    }
}

fn rescaled(rng: &mut Rng64, l: &LieAlgebraData) -> LieAlgebraData {
    // e_i ↦ λ_i e_i rescales c^k_ij by λ_iλ_j/λ_k.
    let n = l.dim();
    let lambda: Vec<BigRational> = (0..n).map(|_| q(*[-2, -1, 1, 2, 3].choose(rng).expect("nonempty"))).collect();
    let mut c = l.constants.clone();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if !c[i][j][k].is_zero() {
                    c[i][j][k] = &c[i][j][k] * &lambda[i] * &lambda[j] / &lambda[k];
                }
            }
        }
    }
    LieAlgebraData::new(&l.name, l.basis.clone(), c, false).expect("rescaling preserves the Jacobi identity")
}

/// The Heisenberg algebra [e1, e2] = e3.
pub fn heisenberg() -> LieAlgebraData {
    let mut c = vec![vec![vec![BigRational::zero(); 3]; 3]; 3];
    c[0][1][2] = q(1);
    c[1][0][2] = q(-1);
    LieAlgebraData::new("heisenberg", vec!["e1".into(), "e2".into(), "e3".into()], c, false).expect("valid")
}

/// Lie algebras of dimension ≤ 3, so CE models have dimension ≤ 8.
pub fn lie_algebra(rng: &mut Rng64) -> LieAlgebraData {
    let base = match rng.gen_range(0..7) {
        0 => LieAlgebraData::abelian(rng.gen_range(1..=3)),
        1 | 2 => LieAlgebraData::aff1(),
        3 => LieAlgebraData::sl2(),
        4 => heisenberg(),
        5 => {
            let act = vec![vec![vec![q(rng.gen_range(1..=2))]], vec![vec![q(0)]]];
            generalized_higgs_algebroid(&LieAlgebraData::aff1(), &act).expect("a one-dimensional module")
        }
        _ => generalized_higgs_algebroid(&LieAlgebraData::abelian(2), &vec![vec![vec![q(0)]]; 2]).expect("trivial"),
    };
    rescaled(rng, &base)
}

/// Upper triangular 2×2 matrices tensored with Λ(x): a noncommutative flat
/// dga of dimension 6 with zero differential.
pub fn triangular_exterior() -> CurvedDga {
    let mats = [
        SparseMatrix::identity(2),
        SparseMatrix::from_ints(&[&[0, 1], &[0, 0]]),
        SparseMatrix::from_ints(&[&[0, 0], &[0, 1]]),
    ];
    let t = TableAlgebra::from_matrices(&["1", "n", "p"], &mats).expect("a subalgebra");
    let (x, _) = TableAlgebra::exterior(&["x".to_string()]);
    let table = t.tensor(&x);
    let n = table.dim();
    CurvedDga::from_table("T2⊗Λ(x)", table, vec![AElement::zero(); n], AElement::zero()).expect("consistent")
}

/// A flat base together with a homomorphism into the dga under test; the
/// homomorphism is the identity unless the dga is a gauge shift.
#[derive(Clone, Debug)]
pub struct RandomDga {
    pub flat: Arc<CurvedDga>,
    pub shift: Option<DgaHom>,
}

impl RandomDga {
    pub fn algebra(&self) -> Arc<CurvedDga> {
        self.shift.as_ref().map_or_else(|| self.flat.clone(), |h| h.target.clone())
    }

    /// Moves a module over the flat base to the dga under test.
    pub fn transport(&self, e: &CohesiveModule) -> Result<CohesiveModule> {
        match &self.shift {
            None => Ok(e.clone()),
            Some(h) => pushforward_hom(h, e),
        }
    }
}

/// A CE model, a gauge shift of one (curved), or the triangular dga with an
/// inner differential.
pub fn curved_dga(rng: &mut Rng64) -> RandomDga {
    let kind = rng.gen_range(0..4);
    let flat = Arc::new(if kind == 3 { triangular_exterior() } else { chevalley_eilenberg(&lie_algebra(rng)) });
    let shift = match kind {
        0 => None,
        _ => {
            let omega = element_of_degree(rng, &flat, 1);
            Some(gauge_shift(&flat, &omega).expect("flat table dga"))
        }
    };
    RandomDga { flat, shift }
}

pub fn rank_one(rng: &mut Rng64, a: &Arc<CurvedDga>, name: &str) -> CohesiveModule {
    let mut c = AMatrix::zeros(1, 1);
    c.set(0, 0, flat_form(rng, a));
    CohesiveModule::new(name, a.clone(), vec![format!("{name}0")], vec![rng.gen_range(-1..=1)], c)
        .expect("degree one entry")
}

/// A random closed degree-0 morphism E → F.
pub fn closed_morphism(rng: &mut Rng64, e: &Arc<CohesiveModule>, f: &Arc<CohesiveModule>) -> Result<HomMorphism> {
    let hc = hom_complex(e, f)?;
    let n = hc.dim(0);
    let kernel = rank_kernel_image(&hc.complex.diff(0)).kernel;
    let mut v = vec![Scalar::zero(); n];
    for z in &kernel {
        let c = scalar(rng);
        for (x, y) in v.iter_mut().zip(z) {
            *x = &*x + &(&c * y);
        }
    }
    Ok(hc.morphism(0, &v))
}

/// A unipotent upper-triangular degree-0 change of basis.
pub fn unipotent(rng: &mut Rng64, e: &CohesiveModule) -> AMatrix {
    let a = &e.algebra;
    let n = e.rank();
    let mut g = AMatrix::identity(a, n);
    for i in 0..n {
        for l in 0..i {
            if let Ok(k) = u32::try_from(e.degrees[i] - e.degrees[l]) {
                g.set(l, i, element_of_degree(rng, a, k));
            }
        }
    }
    g
}

/// Modules of rank ≤ 4 over the flat base: rank-one twists, a gauged sum
/// and the cone of a random closed morphism.
pub fn flat_modules(rng: &mut Rng64, a: &Arc<CurvedDga>) -> Result<Vec<CohesiveModule>> {
    let p = rank_one(rng, a, "P");
    let r = rank_one(rng, a, "R");
    let sum = p.direct_sum(&r)?;
    let g = unipotent(rng, &sum);
    let (mut gauged, _) = sum.gauge(&g)?;
    gauged.name = "G".into();
    let (ga, pa) = (Arc::new(gauged.clone()), Arc::new(p.clone()));
    let phi = closed_morphism(rng, &pa, &ga)?;
    let mut c = (*cone(&phi)?.cone).clone();
    c.name = "C".into();
    Ok(vec![p, r, gauged, c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohesive::check_cohesive;

    #[test]
    fn generated_dgas_and_modules_validate() {
        let mut r = rng(7);
        for _ in 0..12 {
            let d = curved_dga(&mut r);
            let a = d.algebra();
            assert!(a.validate().passed(), "{}: {}", a.name, a.validate());
            assert!(a.table().unwrap().dim() <= 8);
            for m in flat_modules(&mut r, &d.flat).unwrap() {
                let m = d.transport(&m).unwrap();
                assert!(m.rank() <= 4);
                assert!(check_cohesive(&m).passed(), "{}: {}", m.name, check_cohesive(&m));
            }
        }
    }

    #[test]
    fn same_seed_same_output() {
        let (mut r1, mut r2) = (rng(3), rng(3));
        let (a, b) = (curved_dga(&mut r1), curved_dga(&mut r2));
        assert_eq!(a.algebra(), b.algebra());
        assert_eq!(element(&mut r1, &a.algebra()), element(&mut r2, &b.algebra()));
    }
}
