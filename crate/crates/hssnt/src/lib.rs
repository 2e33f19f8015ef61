//! Numerical models of irreducible Hermitian symmetric spaces of noncompact
//! type: restricted-root and Kähler data, K-equivariant strongly diagonal
//! realizations and their compact duals, plus verification suites for the
//! structural identities these constructions satisfy.

pub mod algebra;
pub mod cli;
pub mod dual;
pub mod error;
pub mod geomverify;
pub mod kahler;
pub mod linalg;
pub mod oddmap;
pub mod realize;
pub mod report;
pub mod roots;
pub mod sample;
pub mod space;
pub mod tgeo;
pub mod tol;

pub use algebra::{build_model, AlgVec, Family, Home, ModelData, SpaceSpec};
pub use error::{HssntError, Result};
pub use space::HermitianSpace;
pub use tol::ToleranceConfig;
