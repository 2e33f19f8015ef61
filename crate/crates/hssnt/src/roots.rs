//! Restricted root decomposition, C_r/BC_r classification, the strongly
//! orthogonal set and the Weyl group action.
//!
//! Roots are extracted by simultaneously diagonalizing the commuting
//! self-adjoint squares ad(a_k)^2 on k and on p, together with ad(H0)^2 for
//! a fixed generic H0 in a (the squares alone cannot separate p_{e_i+e_j}
//! from p_{e_i-e_j}). Signs are then fixed by ad(H0) itself through the
//! pairing p_alpha -> k_alpha, which orients every root to the positive
//! side of H0.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{add, retag, scale, AlgVec, Home, ModelData};
use crate::error::{HssntError, Result};
use crate::linalg;

/// Restricted root system type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SysType {
    C(usize),
    BC(usize),
}

impl std::fmt::Display for SysType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SysType::C(r) => write!(f, "C{r}"),
            SysType::BC(r) => write!(f, "BC{r}"),
        }
    }
}

/// Positive-root classes in the e_i frame fixed by Gamma.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootClass {
    /// gamma_i = 2 e_i
    Gamma(usize),
    /// lambda = e_i + e_j, i < j
    Lambda(usize, usize),
    /// lambda-bar = e_i - e_j, i < j
    LambdaBar(usize, usize),
    /// epsilon = e_i
    Epsilon(usize),
}

impl RootClass {
    pub fn label(&self) -> String {
        match self {
            RootClass::Gamma(i) => format!("2e{}", i + 1),
            RootClass::Lambda(i, j) => format!("e{}+e{}", i + 1, j + 1),
            RootClass::LambdaBar(i, j) => format!("e{}-e{}", i + 1, j + 1),
            RootClass::Epsilon(i) => format!("e{}", i + 1),
        }
    }

    /// Coefficients of the root in the e_i frame.
    pub fn e_coeffs(&self, rank: usize) -> Vec<f64> {
        let mut c = vec![0.0; rank];
        match *self {
            RootClass::Gamma(i) => c[i] = 2.0,
            RootClass::Lambda(i, j) => {
                c[i] = 1.0;
                c[j] = 1.0;
            }
            RootClass::LambdaBar(i, j) => {
                c[i] = 1.0;
                c[j] = -1.0;
            }
            RootClass::Epsilon(i) => c[i] = 1.0,
        }
        c
    }
}

/// One positive restricted root with its root spaces.
#[derive(Debug, Clone)]
pub struct RootSpace {
    pub class: RootClass,
    /// alpha(a_k) on the model's standard a-basis.
    pub alpha_on_a: DVector<f64>,
    pub mult: usize,
    /// Orthonormal basis of k_alpha (full g-coordinates, columns).
    pub k_basis: DMatrix<f64>,
    /// Orthonormal basis of p_alpha, paired column-by-column with k_basis
    /// via [H, X^p] = alpha(H) X^k.
    pub p_basis: DMatrix<f64>,
    /// Root vector H_alpha in a.
    pub h_vec: AlgVec,
}

/// The restricted root datum of a model.
#[derive(Debug, Clone)]
pub struct RootDatum {
    pub rank: usize,
    pub sys_type: SysType,
    /// The model-standard basis of a (unit inner norm).
    pub a_basis: Vec<AlgVec>,
    /// All positive roots.
    pub roots: Vec<RootSpace>,
    /// Indices into `roots` of gamma_1..gamma_r (in e-frame order).
    pub gamma_idx: Vec<usize>,
    /// (lambda, lambda-bar) index pairs, lambda = e_i+e_j.
    pub lambda_pairs: Vec<(usize, usize)>,
    pub epsilon_idx: Vec<usize>,
    /// Orthonormal basis of k_0 (centralizer of a in k).
    pub k0_basis: DMatrix<f64>,
    /// Root vectors H_i of gamma_i.
    pub h: Vec<AlgVec>,
    /// Normalized root vectors H~_i = (2/C) H_i.
    pub h_tilde: Vec<AlgVec>,
    /// C = ||H_i||^2, the common squared norm.
    pub c_const: f64,
}

/// Generic element of a used to separate and orient the roots: 3-adic
/// weights keep all +-combinations of template roots at distinct values.
fn generic_h(m: &ModelData) -> AlgVec {
    let a = m.standard_a();
    let r = a.len();
    let mut h = m.zero(Home::P);
    for (k, ak) in a.iter().enumerate() {
        h = add(&h, &scale(ak, 3f64.powi((r - 1 - k) as i32)));
    }
    h
}

/// Computes the full restricted root decomposition for the model's
/// standard maximal abelian subspace.
pub fn restricted_roots(m: &ModelData) -> Result<RootDatum> {
    let tol = m.tol;
    let a_basis = m.standard_a();
    let r = a_basis.len();
    let h0 = generic_h(m);

    // commuting symmetric squares, restricted to k and to p
    let ad_a: Vec<DMatrix<f64>> = a_basis.iter().map(|a| m.ad_operator(a)).collect();
    let ad_h0 = m.ad_operator(&h0);
    let mut sq_ops: Vec<DMatrix<f64>> = ad_a.iter().map(|a| a * a).collect();
    sq_ops.push(&ad_h0 * &ad_h0);
    let on_k: Vec<DMatrix<f64>> = sq_ops
        .iter()
        .map(|op| op.view((0, 0), (m.dim_k, m.dim_k)).into_owned())
        .collect();
    let on_p: Vec<DMatrix<f64>> = sq_ops.iter().map(|op| m.restrict_p(op)).collect();

    let k_blocks = linalg::joint_eigenspaces(&on_k, tol.root_cluster_rel);
    let p_blocks = linalg::joint_eigenspaces(&on_p, tol.root_cluster_rel);

    // verify each block really is a joint eigenspace
    for (ops, blocks, name) in [(&on_k, &k_blocks, "k"), (&on_p, &p_blocks, "p")] {
        for (vals, basis) in blocks.iter() {
            for (op, &lam) in ops.iter().zip(vals.iter()) {
                let res = linalg::eigen_residual(op, lam, basis);
                if res > 1e-8 {
                    return Err(HssntError::ClusteringAmbiguity(format!(
                        "{name}-block residual {res:.3e} at eigenvalue {lam:.6}"
                    )));
                }
            }
        }
    }

    let is_zero = |vals: &[f64]| vals.iter().all(|v| v.abs() < 1e-8);

    // centralizer of a in p must be a itself
    let zero_p: Vec<&(Vec<f64>, DMatrix<f64>)> =
        p_blocks.iter().filter(|(v, _)| is_zero(v)).collect();
    let cent_dim: usize = zero_p.iter().map(|(_, b)| b.ncols()).sum();
    if cent_dim != r {
        return Err(HssntError::DegenerateAbelian {
            got: cent_dim,
            expected: r,
        });
    }
    let k0_cols: Vec<DVector<f64>> = k_blocks
        .iter()
        .filter(|(v, _)| is_zero(v))
        .flat_map(|(_, b)| b.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>())
        .map(|c| {
            let mut full = DVector::zeros(m.dim_g);
            full.rows_mut(0, m.dim_k).copy_from(&c);
            full
        })
        .collect();
    let k0_basis = linalg::orthonormalize_in(m.dim_g, &k0_cols, 1e-9);

    // pair nonzero p-blocks with k-blocks of equal signature and recover
    // the signed root values through ad(H0)
    struct RawRoot {
        alpha_on_a: DVector<f64>,
        alpha_h0: f64,
        k_basis: DMatrix<f64>,
        p_basis: DMatrix<f64>,
    }
    let mut raw: Vec<RawRoot> = Vec::new();
    for (vals, pb) in p_blocks.iter().filter(|(v, _)| !is_zero(v)) {
        let mate = k_blocks
            .iter()
            .filter(|(kv, _)| !is_zero(kv))
            .find(|(kv, _)| {
                kv.iter()
                    .zip(vals.iter())
                    .all(|(x, y)| (x - y).abs() < 1e-6 * (1.0 + x.abs()))
            })
            .ok_or_else(|| {
                HssntError::ClusteringAmbiguity(format!(
                    "no k-block matches p-block signature {vals:?}"
                ))
            })?;
        if mate.1.ncols() != pb.ncols() {
            return Err(HssntError::ClusteringAmbiguity(format!(
                "dim k_alpha = {} but dim p_alpha = {}",
                mate.1.ncols(),
                pb.ncols()
            )));
        }
        let alpha_h0 = vals[r].max(0.0).sqrt(); // positive by convention
        // lift p-columns to full coordinates, derive the paired k-columns
        let mult = pb.ncols();
        let mut p_full = DMatrix::zeros(m.dim_g, mult);
        let mut k_full = DMatrix::zeros(m.dim_g, mult);
        for c in 0..mult {
            let mut pv = DVector::zeros(m.dim_g);
            pv.rows_mut(m.dim_k, m.dim_p).copy_from(&pb.column(c));
            let kv = &ad_h0 * &pv / alpha_h0;
            p_full.set_column(c, &pv);
            k_full.set_column(c, &kv);
        }
        // k-columns must be orthonormal and lie in the mate block
        let gram = k_full.transpose() * &k_full;
        let dev = linalg::max_abs(&(gram - DMatrix::identity(mult, mult)));
        if dev > 1e-8 {
            return Err(HssntError::ClusteringAmbiguity(format!(
                "paired k-basis not orthonormal (deviation {dev:.3e})"
            )));
        }
        // signed values alpha(a_k) via <[a_k, P], K>
        let mut alpha_on_a = DVector::zeros(r);
        for k in 0..r {
            let image = &ad_a[k] * p_full.column(0);
            let val = k_full.column(0).dot(&image);
            // consistency across columns and against the squares
            for c in 1..mult {
                let v2 = k_full.column(c).dot(&(&ad_a[k] * p_full.column(c)));
                if (v2 - val).abs() > 1e-7 * (1.0 + val.abs()) {
                    return Err(HssntError::ClusteringAmbiguity(format!(
                        "inconsistent root value across a block: {val:.6} vs {v2:.6}"
                    )));
                }
            }
            if (val * val - vals[k]).abs() > 1e-6 * (1.0 + vals[k]) {
                return Err(HssntError::ClusteringAmbiguity(format!(
                    "signed value {val:.6} disagrees with square {:.6}",
                    vals[k]
                )));
            }
            alpha_on_a[k] = val;
        }
        raw.push(RawRoot {
            alpha_on_a,
            alpha_h0,
            k_basis: k_full,
            p_basis: p_full,
        });
    }

    // Gamma = the roots of maximal covector norm; fix the e_i frame from them
    let norms: Vec<f64> = raw.iter().map(|rr| rr.alpha_on_a.norm()).collect();
    let max_norm = norms.iter().cloned().fold(0.0, f64::max);
    let mut gamma_raw: Vec<usize> = (0..raw.len())
        .filter(|&i| norms[i] > max_norm * (1.0 - 1e-6))
        .collect();
    if gamma_raw.len() != r {
        return Err(HssntError::NotHermitianType(format!(
            "found {} long roots, expected rank {r}",
            gamma_raw.len()
        )));
    }
    // order e_1 > e_2 > ... by value on H0
    gamma_raw.sort_by(|&a, &b| raw[b].alpha_h0.partial_cmp(&raw[a].alpha_h0).unwrap());

    // e_i(a_k) table: e_i = gamma_i / 2
    let mut e_frame = DMatrix::zeros(r, r);
    for (i, &gi) in gamma_raw.iter().enumerate() {
        for k in 0..r {
            e_frame[(i, k)] = raw[gi].alpha_on_a[k] / 2.0;
        }
    }
    let e_frame_inv = e_frame
        .clone()
        .try_inverse()
        .ok_or_else(|| HssntError::NotHermitianType("e-frame is singular".into()))?;

    // classify every root against the template
    let mut roots = Vec::new();
    let mut gamma_idx = vec![usize::MAX; r];
    let mut lambda_at = vec![vec![usize::MAX; r]; r];
    let mut lambdabar_at = vec![vec![usize::MAX; r]; r];
    let mut epsilon_idx_at = vec![usize::MAX; r];
    for rr in raw.into_iter() {
        // solve alpha = sum n_i e_i
        let n = rr.alpha_on_a.transpose() * &e_frame_inv;
        let mut coeffs = vec![0i32; r];
        for i in 0..r {
            let rounded = n[(0, i)].round();
            if (n[(0, i)] - rounded).abs() > 1e-6 || rounded.abs() > 2.0 {
                return Err(HssntError::NotHermitianType(format!(
                    "root has non-integral e-frame coefficient {:.6}",
                    n[(0, i)]
                )));
            }
            coeffs[i] = rounded as i32;
        }
        let support: Vec<(usize, i32)> = coeffs
            .iter()
            .cloned()
            .enumerate()
            .filter(|&(_, c)| c != 0)
            .collect();
        let class = match support.as_slice() {
            [(i, 2)] => RootClass::Gamma(*i),
            [(i, 1)] => RootClass::Epsilon(*i),
            [(i, 1), (j, 1)] => RootClass::Lambda(*i, *j),
            [(i, 1), (j, -1)] => RootClass::LambdaBar(*i, *j),
            other => {
                return Err(HssntError::NotHermitianType(format!(
                    "positive root with e-frame support {other:?} is outside the C/BC template"
                )))
            }
        };
        let idx = roots.len();
        match class {
            RootClass::Gamma(i) => gamma_idx[i] = idx,
            RootClass::Lambda(i, j) => lambda_at[i][j] = idx,
            RootClass::LambdaBar(i, j) => lambdabar_at[i][j] = idx,
            RootClass::Epsilon(i) => epsilon_idx_at[i] = idx,
        }
        // H_alpha from eq. feq3 with the unit pair (K, P):
        // X_alpha = K + P, X_{-alpha} = theta X_alpha = K - P, giving
        // H_alpha = [K, P] for unit columns.
        let kv = AlgVec {
            home: Home::G,
            coeffs: rr.k_basis.column(0).into_owned(),
            model: m.basis_vec(0).model_token(),
        };
        let pv = AlgVec {
            home: Home::G,
            coeffs: rr.p_basis.column(0).into_owned(),
            model: kv.model_token(),
        };
        let mut h_vec = m.bracket(&kv, &pv)?;
        h_vec.home = Home::P;
        // cross-check against the metric dual of alpha on the a-basis
        let mut dual = m.zero(Home::P);
        let gram_a = {
            let mut g = DMatrix::zeros(r, r);
            for (x, ax) in a_basis.iter().enumerate() {
                for (y, ay) in a_basis.iter().enumerate() {
                    g[(x, y)] = m.killing(ax, ay);
                }
            }
            g
        };
        let coef = gram_a
            .lu()
            .solve(&rr.alpha_on_a)
            .ok_or_else(|| HssntError::NotHermitianType("degenerate Killing form on a".into()))?;
        for (k, ak) in a_basis.iter().enumerate() {
            dual = add(&dual, &scale(ak, coef[k]));
        }
        let dev = crate::algebra::sub(&h_vec, &dual).norm_inf();
        if dev > 1e-9 {
            return Err(HssntError::ClusteringAmbiguity(format!(
                "H_alpha from feq3 disagrees with the metric dual by {dev:.3e}"
            )));
        }
        roots.push(RootSpace {
            class,
            alpha_on_a: rr.alpha_on_a,
            mult: rr.p_basis.ncols(),
            k_basis: rr.k_basis,
            p_basis: rr.p_basis,
            h_vec,
        });
    }

    // template completeness
    if gamma_idx.contains(&usize::MAX) {
        return Err(HssntError::NotHermitianType("missing long roots".into()));
    }
    for i in 0..r {
        for j in (i + 1)..r {
            if lambda_at[i][j] == usize::MAX || lambdabar_at[i][j] == usize::MAX {
                return Err(HssntError::NotHermitianType(format!(
                    "missing e{}±e{} pair",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let eps_present = epsilon_idx_at.iter().filter(|&&i| i != usize::MAX).count();
    let sys_type = if eps_present == 0 {
        SysType::C(r)
    } else if eps_present == r {
        SysType::BC(r)
    } else {
        return Err(HssntError::NotHermitianType(format!(
            "only {eps_present} of {r} short roots e_i present"
        )));
    };
    // highest-root multiplicity must be 1
    for &gi in &gamma_idx {
        if roots[gi].mult != 1 {
            return Err(HssntError::NotHermitianType(format!(
                "long root has multiplicity {}",
                roots[gi].mult
            )));
        }
    }

    let mut lambda_pairs = Vec::new();
    for i in 0..r {
        for j in (i + 1)..r {
            if lambda_at[i][j] != usize::MAX {
                lambda_pairs.push((lambda_at[i][j], lambdabar_at[i][j]));
            }
        }
    }
    let epsilon_idx: Vec<usize> = epsilon_idx_at
        .into_iter()
        .filter(|&i| i != usize::MAX)
        .collect();

    let h: Vec<AlgVec> = gamma_idx.iter().map(|&i| roots[i].h_vec.clone()).collect();
    let c_const = m.inner(&h[0], &h[0]);
    for (i, hi) in h.iter().enumerate() {
        for (j, hj) in h.iter().enumerate() {
            let ip = m.inner(hi, hj);
            let target = if i == j { c_const } else { 0.0 };
            if (ip - target).abs() > m.tol.orthogonality {
                return Err(HssntError::NotHermitianType(format!(
                    "H_i not orthogonal with equal norms: <H_{i},H_{j}> = {ip:.3e}"
                )));
            }
        }
    }
    let h_tilde: Vec<AlgVec> = h.iter().map(|hi| scale(hi, 2.0 / c_const)).collect();

    let datum = RootDatum {
        rank: r,
        sys_type,
        a_basis,
        roots,
        gamma_idx,
        lambda_pairs,
        epsilon_idx,
        k0_basis,
        h,
        h_tilde,
        c_const,
    };
    datum.check_reconstruction(m)?;
    Ok(datum)
}

impl AlgVec {
    pub(crate) fn model_token(&self) -> u64 {
        self.model
    }
}

impl RootDatum {
    /// Re-verifies the C_r/BC_r template from the stored root set: every
    /// sum/difference pair must be present, the long roots must have
    /// multiplicity 1, and the short roots are either all present (BC) or
    /// all absent (C). Returns the confirmed type.
    pub fn classify_type(&self) -> Result<SysType> {
        let r = self.rank;
        if self.gamma_idx.len() != r {
            return Err(HssntError::NotHermitianType(format!(
                "{} long roots for rank {r}",
                self.gamma_idx.len()
            )));
        }
        for &gi in &self.gamma_idx {
            if self.roots[gi].mult != 1 {
                return Err(HssntError::NotHermitianType(format!(
                    "highest-root class has multiplicity {}",
                    self.roots[gi].mult
                )));
            }
        }
        let mut lambda_seen = vec![vec![false; r]; r];
        let mut lambdabar_seen = vec![vec![false; r]; r];
        let mut eps_seen = vec![false; r];
        for rt in &self.roots {
            match rt.class {
                RootClass::Gamma(_) => {}
                RootClass::Lambda(i, j) => lambda_seen[i][j] = true,
                RootClass::LambdaBar(i, j) => lambdabar_seen[i][j] = true,
                RootClass::Epsilon(i) => eps_seen[i] = true,
            }
        }
        for i in 0..r {
            for j in (i + 1)..r {
                if !lambda_seen[i][j] || !lambdabar_seen[i][j] {
                    return Err(HssntError::NotHermitianType(format!(
                        "missing e{}±e{} pair",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let eps = eps_seen.iter().filter(|&&b| b).count();
        let confirmed = if eps == 0 {
            SysType::C(r)
        } else if eps == r {
            SysType::BC(r)
        } else {
            return Err(HssntError::NotHermitianType(format!(
                "{eps} of {r} short roots present"
            )));
        };
        if confirmed != self.sys_type {
            return Err(HssntError::NotHermitianType(format!(
                "stored type {} disagrees with template match {confirmed}",
                self.sys_type
            )));
        }
        Ok(confirmed)
    }

    /// The strongly orthogonal data: root vectors H_i, their normalized
    /// companions H~_i = (2/C) H_i, and the common squared norm C.
    pub fn gamma_data(&self) -> (&[AlgVec], &[AlgVec], f64) {
        (&self.h, &self.h_tilde, self.c_const)
    }

    /// p must decompose orthogonally as a + sum of the p_alpha.
    fn check_reconstruction(&self, m: &ModelData) -> Result<()> {
        let mut cols: Vec<DVector<f64>> = self.a_basis.iter().map(|a| a.coeffs.clone()).collect();
        for rt in &self.roots {
            for c in rt.p_basis.column_iter() {
                cols.push(c.into_owned());
            }
        }
        if cols.len() != m.dim_p {
            return Err(HssntError::ClusteringAmbiguity(format!(
                "p decomposes into {} directions, expected {}",
                cols.len(),
                m.dim_p
            )));
        }
        let q = linalg::orthonormalize_in(m.dim_g, &cols, 1e-9);
        if q.ncols() != m.dim_p {
            return Err(HssntError::ClusteringAmbiguity(
                "root spaces do not span p orthogonally".into(),
            ));
        }
        Ok(())
    }

    /// Value of a positive root on an a-vector.
    pub fn root_value(&self, m: &ModelData, root: usize, h: &AlgVec) -> f64 {
        // alpha(H) = B(H_alpha, H) on a
        m.killing(&self.roots[root].h_vec, h)
    }

    /// Coefficients of an a-vector in the H~ basis.
    pub fn a_coeffs(&self, m: &ModelData, v: &AlgVec) -> Vec<f64> {
        self.h_tilde
            .iter()
            .map(|ht| m.inner(ht, v) / m.inner(ht, ht))
            .collect()
    }

    /// Builds sum x_i H~_i.
    pub fn from_a_coeffs(&self, m: &ModelData, x: &[f64]) -> AlgVec {
        let mut v = m.zero(Home::P);
        for (xi, ht) in x.iter().zip(self.h_tilde.iter()) {
            v = add(&v, &scale(ht, *xi));
        }
        v
    }

    /// Same, tagged into p* (the dual chart).
    pub fn from_a_coeffs_star(&self, m: &ModelData, x: &[f64]) -> AlgVec {
        retag(&self.from_a_coeffs(m, x), Home::PStar)
    }

    /// The reflection rho_alpha(H) = H - 2 alpha(H)/alpha(H_alpha) H_alpha.
    pub fn weyl_reflect(&self, m: &ModelData, root: usize, h: &AlgVec) -> AlgVec {
        let ha = &self.roots[root].h_vec;
        let num = self.root_value(m, root, h);
        let den = self.root_value(m, root, ha);
        add(h, &scale(ha, -2.0 * num / den))
    }

    fn signed_permutation_of(
        &self,
        m: &ModelData,
        word: &[usize],
    ) -> (Vec<usize>, Vec<f64>, f64) {
        let r = self.rank;
        // dense composition on the H~ frame
        let mut mat = DMatrix::<f64>::identity(r, r);
        for &root in word {
            let mut step = DMatrix::zeros(r, r);
            for j in 0..r {
                let img = self.weyl_reflect(m, root, &self.h_tilde[j]);
                let coeffs = self.a_coeffs(m, &img);
                for i in 0..r {
                    step[(i, j)] = coeffs[i];
                }
            }
            mat = step * mat;
        }
        let mut perm = vec![0usize; r];
        let mut signs = vec![0.0f64; r];
        let mut residual: f64 = 0.0;
        for j in 0..r {
            let col = mat.column(j);
            let mut best = 0;
            for i in 1..r {
                if col[i].abs() > col[best].abs() {
                    best = i;
                }
            }
            let s = col[best].signum();
            perm[j] = best;
            signs[j] = s;
            for i in 0..r {
                let target = if i == best { s } else { 0.0 };
                residual = residual.max((col[i] - target).abs());
            }
        }
        (perm, signs, residual)
    }

    /// Residual of the dense composition of a Weyl word against its best
    /// signed-permutation approximation.
    pub fn weyl_word_residual(&self, m: &ModelData, word: &[usize]) -> f64 {
        self.signed_permutation_of(m, word).2
    }

    /// Composes a word of reflections and expresses it as a signed
    /// permutation of the H~ basis.
    pub fn weyl_signed_permutation(
        &self,
        m: &ModelData,
        word: &[usize],
    ) -> Result<(Vec<usize>, Vec<f64>)> {
        let (perm, signs, residual) = self.signed_permutation_of(m, word);
        if residual > m.tol.structural.max(1e-12) {
            return Err(HssntError::NotSignedPermutation(residual));
        }
        Ok((perm, signs))
    }

    /// Finds the index of a root by class.
    pub fn find(&self, class: RootClass) -> Option<usize> {
        self.roots.iter().position(|r| r.class == class)
    }

    /// Multiplicity summary: (m_gamma, m_lambda, m_epsilon).
    pub fn multiplicities(&self) -> (usize, Option<usize>, Option<usize>) {
        let mg = self.roots[self.gamma_idx[0]].mult;
        let ml = self.lambda_pairs.first().map(|&(l, _)| self.roots[l].mult);
        let me = self.epsilon_idx.first().map(|&e| self.roots[e].mult);
        (mg, ml, me)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_model, sub, SpaceSpec};

    fn datum(spec: SpaceSpec) -> (crate::algebra::ModelData, RootDatum) {
        let m = build_model(spec).unwrap();
        let d = restricted_roots(&m).unwrap();
        (m, d)
    }

    #[test]
    fn su11_is_c1() {
        let (_, d) = datum(SpaceSpec::SuPq { p: 1, q: 1 });
        assert_eq!(d.rank, 1);
        assert_eq!(d.sys_type, SysType::C(1));
        assert_eq!(d.roots.len(), 1);
        assert_eq!(d.roots[d.gamma_idx[0]].mult, 1);
    }

    #[test]
    fn su12_is_bc1() {
        let (_, d) = datum(SpaceSpec::SuPq { p: 1, q: 2 });
        assert_eq!(d.rank, 1);
        assert_eq!(d.sys_type, SysType::BC(1));
        let (mg, _, me) = d.multiplicities();
        assert_eq!(mg, 1);
        assert_eq!(me, Some(2));
    }

    #[test]
    fn su22_is_c2() {
        let (_, d) = datum(SpaceSpec::SuPq { p: 2, q: 2 });
        assert_eq!(d.sys_type, SysType::C(2));
        let (mg, ml, me) = d.multiplicities();
        assert_eq!(mg, 1);
        assert_eq!(ml, Some(2));
        assert_eq!(me, None);
    }

    #[test]
    fn sp2_is_c2_sp3_is_c3() {
        let (_, d) = datum(SpaceSpec::SpnR { n: 2 });
        assert_eq!(d.sys_type, SysType::C(2));
        let (mg, ml, _) = d.multiplicities();
        assert_eq!((mg, ml), (1, Some(1)));
        let (_, d3) = datum(SpaceSpec::SpnR { n: 3 });
        assert_eq!(d3.sys_type, SysType::C(3));
    }

    #[test]
    fn su23_multiplicities() {
        let (_, d) = datum(SpaceSpec::SuPq { p: 2, q: 3 });
        assert_eq!(d.sys_type, SysType::BC(2));
        let (mg, ml, me) = d.multiplicities();
        assert_eq!(mg, 1);
        assert_eq!(ml, Some(2));
        assert_eq!(me, Some(2));
    }

    #[test]
    fn gamma_vectors_orthogonal_equal_norm() {
        let (m, d) = datum(SpaceSpec::SuPq { p: 2, q: 2 });
        assert!(m.inner(&d.h[0], &d.h[1]).abs() < 1e-10);
        let n0 = m.inner(&d.h[0], &d.h[0]);
        let n1 = m.inner(&d.h[1], &d.h[1]);
        assert!((n0 - n1).abs() < 1e-10);
        assert!((n0 - d.c_const).abs() < 1e-12);
        // ||H~_i||^2 = 4/C
        let nt = m.inner(&d.h_tilde[0], &d.h_tilde[0]);
        assert!((nt - 4.0 / d.c_const).abs() < 1e-10);
    }

    #[test]
    fn su11_killing_constant() {
        let (m, d) = datum(SpaceSpec::SuPq { p: 1, q: 1 });
        assert!((d.c_const - 0.5).abs() < 1e-12, "C = {}", d.c_const);
        let nt = m.inner(&d.h_tilde[0], &d.h_tilde[0]);
        assert!((nt - 8.0).abs() < 1e-10);
    }

    #[test]
    fn root_space_norm_split() {
        // ||X^k|| = ||X^p|| for the constructed bases
        let (m, d) = datum(SpaceSpec::SuPq { p: 2, q: 3 });
        for rt in &d.roots {
            for c in 0..rt.mult {
                let k = rt.k_basis.column(c).norm();
                let p = rt.p_basis.column(c).norm();
                assert!((k - 1.0).abs() < 1e-10 && (p - 1.0).abs() < 1e-10);
            }
        }
        let _ = m;
    }

    #[test]
    fn bracket_grading() {
        // [k_alpha, p_beta] lands in p_{alpha+beta} + p_{alpha-beta}
        let (m, d) = datum(SpaceSpec::SuPq { p: 2, q: 2 });
        let la = d.lambda_pairs[0].0;
        let ga = d.gamma_idx[0];
        let x = AlgVec {
            home: Home::K,
            coeffs: d.roots[la].k_basis.column(0).into_owned(),
            model: m.basis_vec(0).model_token(),
        };
        let y = AlgVec {
            home: Home::P,
            coeffs: d.roots[ga].p_basis.column(0).into_owned(),
            model: x.model_token(),
        };
        let br = m.bracket(&x, &y).unwrap();
        // lambda = e1+e2, gamma = 2e1: sums/differences are e1-e2 and 3e1+e2;
        // only e1-e2 is a root, so the bracket lies in p_{e1-e2} + a
        let lb = d.lambda_pairs[0].1;
        let mut proj = nalgebra::DVector::zeros(m.dim_g);
        for c in d.roots[lb].p_basis.column_iter() {
            proj += c * (c.dot(&br.coeffs));
        }
        let offspace = (&br.coeffs - proj).norm();
        assert!(offspace < 1e-10, "grading residual {offspace:.3e}");
    }

    #[test]
    fn weyl_reflections_on_h() {
        let (m, d) = datum(SpaceSpec::SuPq { p: 2, q: 2 });
        // rho_{2e1}(H_1) = -H_1
        let g1 = d.gamma_idx[0];
        let img = d.weyl_reflect(&m, g1, &d.h[0]);
        assert!(add(&img, &d.h[0]).norm_inf() < 1e-12);
        // rho_{e1-e2}(H_1) = H_2
        let (_, lbar) = d.lambda_pairs[0];
        let img = d.weyl_reflect(&m, lbar, &d.h[0]);
        assert!(sub(&img, &d.h[1]).norm_inf() < 1e-10);
        // fixed hyperplane: rho_alpha(H) = H when alpha(H) = 0
        let h_sum = add(&d.h[0], &d.h[1]);
        let img = d.weyl_reflect(&m, lbar, &h_sum);
        assert!(sub(&img, &h_sum).norm_inf() < 1e-10);
    }

    #[test]
    fn weyl_signed_permutations() {
        let (m, d) = datum(SpaceSpec::SuPq { p: 2, q: 2 });
        let (perm, signs) = d.weyl_signed_permutation(&m, &[]).unwrap();
        assert_eq!(perm, vec![0, 1]);
        assert_eq!(signs, vec![1.0, 1.0]);
        let (l, lbar) = d.lambda_pairs[0];
        let (perm, signs) = d.weyl_signed_permutation(&m, &[lbar]).unwrap();
        assert_eq!(perm, vec![1, 0]);
        assert_eq!(signs, vec![1.0, 1.0]);
        let (perm, signs) = d.weyl_signed_permutation(&m, &[l]).unwrap();
        assert_eq!(perm, vec![1, 0]);
        assert_eq!(signs, vec![-1.0, -1.0]);
        // a longer word still lands on a signed permutation
        let g1 = d.gamma_idx[0];
        let (.., signs) = d.weyl_signed_permutation(&m, &[l, g1, lbar, g1]).unwrap();
        assert_eq!(signs.len(), 2);
    }

    #[test]
    fn classify_type_reverifies() {
        for (spec, ty) in [
            (SpaceSpec::SpnR { n: 2 }, SysType::C(2)),
            (SpaceSpec::SuPq { p: 2, q: 2 }, SysType::C(2)),
            (SpaceSpec::SuPq { p: 1, q: 2 }, SysType::BC(1)),
        ] {
            let (_, d) = datum(spec);
            assert_eq!(d.classify_type().unwrap(), ty);
        }
        // tampering with the stored type is caught
        let (_, mut d) = datum(SpaceSpec::SuPq { p: 2, q: 2 });
        d.sys_type = SysType::BC(2);
        assert!(matches!(
            d.classify_type(),
            Err(HssntError::NotHermitianType(_))
        ));
    }

    #[test]
    fn gamma_data_accessor() {
        let (m, d) = datum(SpaceSpec::SuPq { p: 1, q: 1 });
        let (h, ht, c) = d.gamma_data();
        assert_eq!(h.len(), 1);
        assert!((c - 0.5).abs() < 1e-12);
        assert!((m.inner(&ht[0], &ht[0]) - 4.0 / c).abs() < 1e-10);
    }

    #[test]
    fn h_tilde_is_raw_a_basis() {
        // the normalized root vectors coincide with the unnormalized model
        // a-matrices; their coefficients sit on the a-basis slots
        let (m, d) = datum(SpaceSpec::SpnR { n: 2 });
        for ht in &d.h_tilde {
            let mut on_a = 0.0;
            for &i in &m.a_idx {
                on_a += ht.coeffs[i] * ht.coeffs[i];
            }
            let total = ht.coeffs.norm_squared();
            assert!((on_a - total).abs() < 1e-12);
        }
    }
}
