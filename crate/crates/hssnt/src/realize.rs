//! The strongly diagonal realization machinery in the Log_o chart: Jordan
//! triple product, spectral decomposition with its certificate, odd
//! functional calculus, the named realizations and the Bergman operator.
//!
//! Points of the space are identified with their Log_o coordinates in p;
//! a realization acts by applying an odd function to the spectral values.

use std::sync::Arc;

/// Symbol type for multi-variable realization maps.
pub type HSymbol = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

use nalgebra::{Complex, DMatrix, DVector};

use crate::algebra::{add, retag, scale, sub, AlgVec, Family, Home};
use crate::error::{HssntError, Result};
use crate::linalg;
use crate::oddmap::OddMap;
use crate::space::HermitianSpace;

type C64 = Complex<f64>;

/// Spectral decomposition of a p-element over mutually orthogonal tripotents,
/// values strictly decreasing and positive.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub values: Vec<f64>,
    pub tripotents: Vec<AlgVec>,
}

/// Jordan triple product {u, v, w} = -1/2 (R(u,v)w + J R(u, Jv) w) with
/// R(u,v)w = -[[u,v],w].
pub fn triple_product(sp: &HermitianSpace, u: &AlgVec, v: &AlgVec, w: &AlgVec) -> Result<AlgVec> {
    let m = &sp.model;
    let kd = &sp.kahler;
    let t1 = m.bracket(&m.bracket(u, v)?, w)?;
    let jv = kd.apply_j0(m, v);
    let t2 = kd.apply_j0(m, &m.bracket(&m.bracket(u, &jv)?, w)?);
    Ok(scale(&add(&t1, &t2), 0.5))
}

/// D(u,v)w = {u,v,w} as a p-coordinate operator.
pub fn d_operator(sp: &HermitianSpace, u: &AlgVec, v: &AlgVec) -> Result<DMatrix<f64>> {
    let m = &sp.model;
    let mut op = DMatrix::zeros(m.dim_p, m.dim_p);
    for j in 0..m.dim_p {
        let e = m.basis_vec(m.dim_k + j);
        let col = triple_product(sp, u, v, &e)?;
        op.set_column(j, &col.coeffs.rows(m.dim_k, m.dim_p));
    }
    Ok(op)
}

fn cluster_descending(vals: &[f64], rel: f64) -> Vec<(f64, Vec<usize>)> {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    for idx in order {
        let v = vals[idx];
        match out.last_mut() {
            Some((rep, members)) if (*rep - v).abs() <= rel * rep.max(1.0) => {
                members.push(idx);
            }
            _ => out.push((v, vec![idx])),
        }
    }
    // representative = mean of the cluster
    for (rep, members) in out.iter_mut() {
        *rep = members.iter().map(|&i| vals[i]).sum::<f64>() / members.len() as f64;
    }
    out
}

/// Model-specific closed-form orbit decomposition: complex SVD of the
/// off-diagonal block for su(p,q), Takagi factorization (via the symmetric
/// eigenproblem of the p-matrix itself) for sp(n,R). The output is always
/// re-certified against the Jordan triple axioms.
pub fn spectral_decompose(sp: &HermitianSpace, x: &AlgVec) -> Result<SpectralDecomp> {
    let m = &sp.model;
    m.same_model(x)?;
    if !matches!(x.home, Home::P) {
        return Err(HssntError::BadInput(
            "spectral decomposition expects a p-tagged vector".into(),
        ));
    }
    let rel = m.tol.spectral_merge_rel;
    let scale_x = x.norm_inf().max(1.0);
    let zero_cut = 1e-12 * scale_x;

    let (values, tripotents) = match m.spec.family() {
        Family::SuPq => {
            let (p, q) = match m.spec.canonical() {
                crate::algebra::SpaceSpec::SuPq { p, q } => (p, q),
                _ => unreachable!(),
            };
            let mat = m.to_matrix(x);
            let block = mat.view((0, p), (p, q)).into_owned();
            let (u, sv, v) = linalg::complex_svd_jacobi(&block);
            let mut values = Vec::new();
            let mut tripotents = Vec::new();
            for (rep, members) in cluster_descending(&sv, rel) {
                if rep <= zero_cut {
                    continue;
                }
                let mut piece = DMatrix::<C64>::zeros(p + q, p + q);
                for &i in &members {
                    let ui = u.column(i);
                    let vi = v.column(i);
                    // B-block u v^dagger, mirrored Hermitianly
                    for a in 0..p {
                        for b in 0..q {
                            let val = ui[a] * vi[b].conj();
                            piece[(a, p + b)] += val;
                            piece[(p + b, a)] += val.conj();
                        }
                    }
                }
                values.push(rep);
                tripotents.push(m.from_matrix(&piece, Home::P)?);
            }
            (values, tripotents)
        }
        Family::SpnR => {
            let n = match m.spec.canonical() {
                crate::algebra::SpaceSpec::SpnR { n } => n,
                _ => unreachable!(),
            };
            let mat = m.to_matrix(x);
            let real = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| mat[(i, j)].re);
            let (evals, evecs) = linalg::sym_eigen(&real);
            let positive: Vec<f64> = evals.iter().cloned().filter(|&v| v > zero_cut).collect();
            let mut values = Vec::new();
            let mut tripotents = Vec::new();
            for (rep, members) in cluster_descending(&positive, rel) {
                // Takagi piece sum w w^T over the cluster's eigenvectors
                let mut s = DMatrix::<C64>::zeros(n, n);
                for &i in &members {
                    let col = evecs.column(i);
                    let w: DVector<C64> =
                        DVector::from_fn(n, |r, _| Complex::new(col[r], col[n + r]));
                    for a in 0..n {
                        for b in 0..n {
                            s[(a, b)] += w[a] * w[b];
                        }
                    }
                }
                let mut piece = DMatrix::<C64>::zeros(2 * n, 2 * n);
                for a in 0..n {
                    for b in 0..n {
                        piece[(a, b)] = Complex::new(s[(a, b)].re, 0.0);
                        piece[(n + a, n + b)] = Complex::new(-s[(a, b)].re, 0.0);
                        piece[(a, n + b)] = Complex::new(s[(a, b)].im, 0.0);
                        piece[(n + a, b)] = Complex::new(s[(a, b)].im, 0.0);
                    }
                }
                values.push(rep);
                tripotents.push(m.from_matrix(&piece, Home::P)?);
            }
            (values, tripotents)
        }
    };
    let decomp = SpectralDecomp { values, tripotents };
    certify(sp, x, &decomp)?;
    Ok(decomp)
}

/// The spectral certificate: reconstruction, tripotency and mutual
/// orthogonality. Never trusted from the factorization alone.
fn certify(sp: &HermitianSpace, x: &AlgVec, d: &SpectralDecomp) -> Result<()> {
    let m = &sp.model;
    let mut recon = m.zero(Home::P);
    for (l, c) in d.values.iter().zip(d.tripotents.iter()) {
        recon = add(&recon, &scale(c, *l));
    }
    let r = sub(&recon, x).norm_inf();
    if r > 1e-9 * x.norm_inf().max(1.0) {
        return Err(HssntError::CertificateFailure(format!(
            "reconstruction residual {r:.3e}"
        )));
    }
    for (i, c) in d.tripotents.iter().enumerate() {
        let t = triple_product(sp, c, c, c)?;
        let dev = sub(&t, &scale(c, 2.0)).norm_inf();
        if dev > 1e-8 {
            return Err(HssntError::CertificateFailure(format!(
                "tripotent {i} fails {{c,c,c}} = 2c by {dev:.3e}"
            )));
        }
        for (j, c2) in d.tripotents.iter().enumerate() {
            if i < j {
                let op = d_operator(sp, c, c2)?;
                let dev = linalg::max_abs(&op);
                if dev > 1e-8 {
                    return Err(HssntError::CertificateFailure(format!(
                        "D(c_{i}, c_{j}) = {dev:.3e} != 0"
                    )));
                }
            }
        }
    }
    for w in d.values.windows(2) {
        if w[0] <= w[1] {
            return Err(HssntError::CertificateFailure(
                "spectral values not strictly decreasing".into(),
            ));
        }
    }
    Ok(())
}

/// Odd functional calculus: sum eta(lambda_i) c_i.
pub fn odd_calculus(sp: &HermitianSpace, x: &AlgVec, eta: &OddMap) -> Result<AlgVec> {
    let d = spectral_decompose(sp, x)?;
    let radius = eta.radius();
    let mut out = sp.model.zero(Home::P);
    for (l, c) in d.values.iter().zip(d.tripotents.iter()) {
        if *l >= radius {
            return Err(HssntError::DomainExceeded {
                eta: eta.name.clone(),
                value: *l,
                radius,
            });
        }
        out = add(&out, &scale(c, eta.eval(*l)));
    }
    Ok(out)
}

/// The Harish-Chandra realization in the chart: eta = tanh.
pub fn harish_chandra(sp: &HermitianSpace, x: &AlgVec) -> Result<AlgVec> {
    odd_calculus(sp, x, &crate::oddmap::builtin_odd("tanh")?)
}

/// The canonical symplectomorphism in the chart: eta = sinh.
pub fn symplecto(sp: &HermitianSpace, x: &AlgVec) -> Result<AlgVec> {
    odd_calculus(sp, x, &crate::oddmap::builtin_odd("sinh")?)
}

/// Loi-Mossa diastatic logarithm on the bounded domain: spectral values
/// must be < 1.
pub fn diastatic_log(sp: &HermitianSpace, z: &AlgVec) -> Result<AlgVec> {
    odd_calculus(sp, z, &OddMap::diastatic_log_eta())
}

/// Its inverse, defined on all of p.
pub fn diastatic_exp(sp: &HermitianSpace, x: &AlgVec) -> Result<AlgVec> {
    odd_calculus(sp, x, &OddMap::diastatic_exp_eta())
}

/// Dual-side diastatic pair (used through the cut-cube chart).
pub fn diastatic_log_dual_eta() -> OddMap {
    OddMap::diastatic_log_dual_eta()
}
pub fn diastatic_exp_dual_eta() -> OddMap {
    OddMap::diastatic_exp_dual_eta()
}

/// The Bergman operator B(z,z) = Id - D(z,z) + Q(z)^2 on p-coordinates.
pub fn bergman_operator(sp: &HermitianSpace, z: &AlgVec) -> Result<DMatrix<f64>> {
    let m = &sp.model;
    let d = d_operator(sp, z, z)?;
    let mut q = DMatrix::zeros(m.dim_p, m.dim_p);
    for j in 0..m.dim_p {
        let e = m.basis_vec(m.dim_k + j);
        let col = triple_product(sp, z, &e, z)?;
        q.set_column(j, &(col.coeffs.rows(m.dim_k, m.dim_p) * 0.5));
    }
    Ok(DMatrix::identity(m.dim_p, m.dim_p) - d + &q * &q)
}

/// The Di Scala-Loi-Roos realization B(z,z)^{-1/4} z, valid on the bounded
/// domain (spectral values < 1).
pub fn dsl_roos_map(sp: &HermitianSpace, z: &AlgVec) -> Result<AlgVec> {
    let m = &sp.model;
    let b = bergman_operator(sp, z)?;
    let floor = m.tol.eig_floor;
    let pow = linalg::spectral_map(&b, |t| t.powf(-0.25), |t| t > floor)
        .map_err(HssntError::NotPositiveDefinite)?;
    let img = pow * z.coeffs.rows(m.dim_k, m.dim_p).into_owned();
    let mut out = m.zero(Home::P);
    out.coeffs.rows_mut(m.dim_k, m.dim_p).copy_from(&img);
    Ok(out)
}

/// The Borel-type chart composite: odd calculus with the Gudermannian,
/// landing in p* via the sqrt(-1) identification. The image always has
/// spectral values < pi/2.
pub fn gudermann_composite(sp: &HermitianSpace, x: &AlgVec) -> Result<AlgVec> {
    let img = odd_calculus(sp, x, &crate::oddmap::builtin_odd("gd")?)?;
    Ok(retag(&img, Home::PStar))
}

/// A multi-variable symbol h: R^r -> R for the general equivariant map.
#[derive(Clone)]
pub struct GeneralHMap {
    pub name: String,
    pub rank: usize,
    h: HSymbol,
}

impl std::fmt::Debug for GeneralHMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GeneralHMap({}, rank {})", self.name, self.rank)
    }
}

impl GeneralHMap {
    pub fn new(
        name: &str,
        rank: usize,
        h: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        GeneralHMap {
            name: name.into(),
            rank,
            h: Arc::new(h),
        }
    }

    /// A strongly diagonal symbol h(x) = eta(x_1).
    pub fn from_odd(eta: &OddMap, rank: usize) -> Self {
        let eta = eta.clone();
        GeneralHMap {
            name: format!("diag[{}]", eta.name),
            rank,
            h: Arc::new(move |x: &[f64]| eta.eval(x[0])),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.h)(x)
    }
}

/// Evaluates sum_i h(p_{1i} x) H~_i on a-coefficients.
pub fn general_h_map(sp: &HermitianSpace, h: &GeneralHMap, coeffs: &[f64]) -> Result<AlgVec> {
    let r = sp.rank();
    if h.rank != r || coeffs.len() != r {
        return Err(HssntError::RankMismatch {
            h_rank: h.rank,
            rank: r,
        });
    }
    let mut out_coeffs = vec![0.0; r];
    let mut x = coeffs.to_vec();
    for (i, oc) in out_coeffs.iter_mut().enumerate() {
        x.copy_from_slice(coeffs);
        x.swap(0, i);
        *oc = h.eval(&x);
    }
    Ok(sp.roots.from_a_coeffs(&sp.model, &out_coeffs))
}

/// Max violations of the equivariance conditions for h: oddness in x_1,
/// evenness in each later variable, and symmetry among them.
#[derive(Debug, Clone)]
pub struct HConditionReport {
    pub max_odd_violation: f64,
    pub max_even_violation: f64,
    pub max_symmetry_violation: f64,
}

impl HConditionReport {
    pub fn max(&self) -> f64 {
        self.max_odd_violation
            .max(self.max_even_violation)
            .max(self.max_symmetry_violation)
    }

    pub fn pass(&self, tol: f64) -> bool {
        self.max() < tol
    }
}

pub fn check_h_conditions(h: &GeneralHMap, samples: usize, seed: u64) -> HConditionReport {
    use rand::RngExt;
    let mut rng = crate::sample::sample_rng(seed, 0);
    let r = h.rank;
    let mut odd: f64 = 0.0;
    let mut even: f64 = 0.0;
    let mut sym: f64 = 0.0;
    for _ in 0..samples {
        let x: Vec<f64> = (0..r).map(|_| rng.random::<f64>() * 3.0 - 1.5).collect();
        let base = h.eval(&x);
        let mut y = x.clone();
        y[0] = -y[0];
        odd = odd.max((h.eval(&y) + base).abs());
        for i in 1..r {
            let mut y = x.clone();
            y[i] = -y[i];
            even = even.max((h.eval(&y) - base).abs());
            for j in (i + 1)..r {
                let mut y = x.clone();
                y.swap(i, j);
                sym = sym.max((h.eval(&y) - base).abs());
            }
        }
    }
    HConditionReport {
        max_odd_violation: odd,
        max_even_violation: even,
        max_symmetry_violation: sym,
    }
}

/// True iff all spectral values of w lie strictly below the saturation of
/// eta, i.e. w lies in the K-invariant domain D_eta.
pub fn domain_membership(sp: &HermitianSpace, w: &AlgVec, eta: &OddMap) -> Result<bool> {
    let s = eta.saturation();
    if s.is_infinite() {
        return Ok(true);
    }
    let d = spectral_decompose(sp, w)?;
    Ok(d.values.iter().all(|&l| l < s))
}
