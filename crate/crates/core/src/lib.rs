//! Lie-Poisson spheres of the classical compact Lie algebras.
//!
//! The crate builds matrix realizations of `su(n+1)`, `so(2n+1)`, `sp(n)` and
//! `so(2n)`, their root systems, Weyl groups and diagram automorphisms, the
//! invariant polynomials that chart the orbit space, and the conformal
//! Casimir deformations `f·π` of the sphere Poisson structure together with
//! their classification up to outer automorphisms.
//!
//! ```
//! use casimir_moduli::{Family, LieSystem};
//!
//! let su3 = LieSystem::new(Family::A, 2).unwrap();
//! assert_eq!(su3.weyl.order(), 6);
//! assert_eq!(su3.outer.order(), 2);
//! ```

pub mod algebra;
pub mod cartan;
pub mod error;
pub mod expr;
pub mod invariants;
pub mod linalg;
pub mod moduli;
pub mod poisson;
pub mod polynomial;
pub mod report;
pub mod sampling;

use std::sync::Arc;

pub use algebra::{build_algebra, AlgebraElement, Covector, Family, LieAlgebraData, LieAlgebraSpec, WordFactor};
pub use cartan::{CartanData, OuterGroupData, RootSystemData, WeylGroupData};
pub use error::{Error, Result};
pub use invariants::InvariantSet;
pub use report::VerificationReport;

/// Everything derived from one algebra: roots, Weyl group, invariants and
/// the outer automorphism group.
#[derive(Clone, Debug)]
pub struct LieSystem {
    pub alg: Arc<LieAlgebraData>,
    pub cartan: CartanData,
    pub roots: RootSystemData,
    pub weyl: WeylGroupData,
    pub invariants: InvariantSet,
    pub outer: OuterGroupData,
}

impl LieSystem {
    pub fn build(spec: &LieAlgebraSpec) -> Result<Self> {
        let alg = Arc::new(build_algebra(spec)?);
        let (cartan, roots) = cartan::compute_roots(&alg)?;
        let weyl = cartan::weyl_group(&roots)?;
        let invariants = invariants::invariant_generators(alg.clone(), &cartan)?;
        let outer = cartan::outer_group(&roots, &invariants)?;
        Ok(Self {
            alg,
            cartan,
            roots,
            weyl,
            invariants,
            outer,
        })
    }

    pub fn new(family: Family, rank: usize) -> Result<Self> {
        Self::build(&LieAlgebraSpec::new(family, rank)?)
    }

    pub fn rank(&self) -> usize {
        self.alg.rank
    }

    pub fn dim(&self) -> usize {
        self.alg.dim
    }

    pub fn name(&self) -> String {
        self.alg.spec.name()
    }

    /// Rank-2 chamber frame: the unit bisector of the two walls and its
    /// rotation by +90°. For `su(3)` this is the frame of `A(θ)`.
    pub fn chamber_frame(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.rank() != 2 {
            return None;
        }
        let w = self.roots.fundamental_weights();
        let mut b = vec![0.0; 2];
        for v in &w {
            linalg::axpy(1.0 / linalg::norm(v), v, &mut b);
        }
        let n = linalg::norm(&b);
        let b = linalg::scaled(&b, 1.0 / n);
        let e = vec![-b[1], b[0]];
        Some((b, e))
    }

    /// Conjugates `xi` into the closed chamber.
    pub fn to_chamber(&self, xi: &Covector) -> Result<cartan::ChamberPoint> {
        cartan::to_chamber(&self.alg, &self.cartan, &self.roots, &self.weyl, xi)
    }
}
