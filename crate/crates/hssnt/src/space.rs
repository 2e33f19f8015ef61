//! Bundles a model with its root and Kähler data.

use crate::algebra::{build_model_with, ModelData, SpaceSpec};
use crate::error::Result;
use crate::kahler::KahlerData;
use crate::roots::{restricted_roots, RootDatum};
use crate::tol::ToleranceConfig;

/// A fully constructed Hermitian symmetric space model.
#[derive(Debug, Clone)]
pub struct HermitianSpace {
    pub model: ModelData,
    pub roots: RootDatum,
    pub kahler: KahlerData,
}

impl HermitianSpace {
    pub fn build(spec: SpaceSpec) -> Result<Self> {
        Self::build_with(spec, ToleranceConfig::default())
    }

    pub fn build_with(spec: SpaceSpec, tol: ToleranceConfig) -> Result<Self> {
        let model = build_model_with(spec, tol)?;
        let roots = restricted_roots(&model)?;
        let kahler = KahlerData::compute(&model, &roots)?;
        Ok(HermitianSpace {
            model,
            roots,
            kahler,
        })
    }

    pub fn rank(&self) -> usize {
        self.roots.rank
    }

    pub fn c_const(&self) -> f64 {
        self.roots.c_const
    }
}
