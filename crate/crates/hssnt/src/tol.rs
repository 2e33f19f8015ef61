/// Numerical tolerances used throughout the crate.
///
/// Structural identities (structure constants, Jacobi, signed permutations)
/// are checked near machine precision; anything that composes an
/// eigendecomposition or an exponential gets the looser orthogonality
/// budget; finite differences get their own budget since two numerical
/// layers stack there.
#[derive(Debug, Clone, Copy)]
pub struct ToleranceConfig {
    /// Exact algebraic identities evaluated in one or two arithmetic steps.
    pub structural: f64,
    /// Orthogonality, isometry and reconstruction checks.
    pub orthogonality: f64,
    /// Analytic identities of the realization maps (G/F functions, duality).
    pub analytic: f64,
    /// Relative gap for grouping restricted-root eigenvalues.
    pub root_cluster_rel: f64,
    /// Relative gap for merging spectral values in the Jordan decomposition.
    pub spectral_merge_rel: f64,
    /// Floor below which an eigenvalue is treated as zero in fractional powers.
    pub eig_floor: f64,
    /// Agreement budget between finite differences and exact axis formulas.
    pub finite_diff: f64,
    /// Rejection threshold for principal-point sampling, relative to the norm.
    pub principal_rel: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            structural: 1e-12,
            orthogonality: 1e-10,
            analytic: 1e-9,
            root_cluster_rel: 1e-7,
            spectral_merge_rel: 1e-8,
            eig_floor: 1e-12,
            finite_diff: 1e-5,
            principal_rel: 1e-3,
        }
    }
}
