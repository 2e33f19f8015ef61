//! Concrete matrix models of the real Lie algebras g = k + p.
//!
//! A model is flattened onto an explicit real basis adapted to the Cartan
//! decomposition (k first, then p), with structure constants stored as the
//! family of adjoint matrices. The Killing form is always computed as
//! tr(ad X ad Y) from those tables, never from a per-family constant.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{HssntError, Result};
use crate::linalg;
use crate::tol::ToleranceConfig;

type CMat = DMatrix<Complex<f64>>;

/// Which bounded-symmetric-domain family a model belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    SuPq,
    SpnR,
}

/// A parsed space specification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceSpec {
    /// su(p,q) with 1 <= p <= q.
    SuPq { p: usize, q: usize },
    /// sp(n,R) with n >= 1.
    SpnR { n: usize },
    /// The (1,1) case of SU_PQ kept as a named special case.
    Su11,
}

impl SpaceSpec {
    pub fn family(&self) -> Family {
        match self {
            SpaceSpec::SuPq { .. } | SpaceSpec::Su11 => Family::SuPq,
            SpaceSpec::SpnR { .. } => Family::SpnR,
        }
    }

    /// Parses strings of the form "su:2,2", "sp:3" or "su11".
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("su11") {
            return Ok(SpaceSpec::Su11);
        }
        let (head, tail) = s
            .split_once(':')
            .ok_or_else(|| HssntError::InvalidSpec(format!("expected 'su:p,q' or 'sp:n', got '{s}'")))?;
        match head.to_ascii_lowercase().as_str() {
            "su" => {
                let (ps, qs) = tail.split_once(',').ok_or_else(|| {
                    HssntError::InvalidSpec(format!("su spec needs two parameters, got '{tail}'"))
                })?;
                let p: usize = ps
                    .trim()
                    .parse()
                    .map_err(|_| HssntError::InvalidSpec(format!("bad integer '{ps}'")))?;
                let q: usize = qs
                    .trim()
                    .parse()
                    .map_err(|_| HssntError::InvalidSpec(format!("bad integer '{qs}'")))?;
                SpaceSpec::SuPq { p, q }.validated()
            }
            "sp" => {
                let n: usize = tail
                    .trim()
                    .parse()
                    .map_err(|_| HssntError::InvalidSpec(format!("bad integer '{tail}'")))?;
                SpaceSpec::SpnR { n }.validated()
            }
            other => Err(HssntError::InvalidSpec(format!("unknown family '{other}'"))),
        }
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            SpaceSpec::SuPq { p, q } => {
                if p < 1 || q < p {
                    Err(HssntError::InvalidSpec(format!(
                        "su(p,q) needs 1 <= p <= q, got p={p}, q={q}"
                    )))
                } else {
                    Ok(self)
                }
            }
            SpaceSpec::SpnR { n } => {
                if n < 1 {
                    Err(HssntError::InvalidSpec("sp(n,R) needs n >= 1".into()))
                } else {
                    Ok(self)
                }
            }
            SpaceSpec::Su11 => Ok(self),
        }
    }

    /// Canonical form: SU_11 becomes SuPq{1,1}.
    pub fn canonical(self) -> Self {
        match self {
            SpaceSpec::Su11 => SpaceSpec::SuPq { p: 1, q: 1 },
            other => other,
        }
    }

    pub fn name(&self) -> String {
        match self.canonical() {
            SpaceSpec::SuPq { p, q } => format!("su:{p},{q}"),
            SpaceSpec::SpnR { n } => format!("sp:{n}"),
            SpaceSpec::Su11 => unreachable!(),
        }
    }
}

/// Home space of an algebra element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Home {
    G,
    K,
    P,
    /// p* of the compact dual; same coordinates as p, different bracket.
    PStar,
}

/// An element of g (or g*) in basis coordinates.
#[derive(Debug, Clone)]
pub struct AlgVec {
    pub home: Home,
    pub coeffs: DVector<f64>,
    pub(crate) model: u64,
}

impl AlgVec {
    pub fn norm_inf(&self) -> f64 {
        linalg::max_abs_vec(&self.coeffs)
    }
}

/// A built model: basis, structure constants, Killing form and metric.
#[derive(Debug, Clone)]
pub struct ModelData {
    pub spec: SpaceSpec,
    pub dim_g: usize,
    pub dim_k: usize,
    pub dim_p: usize,
    /// Basis labels, k-part first then p-part.
    pub labels: Vec<String>,
    /// Cartan involution signature: +1 on k, -1 on p.
    pub theta: Vec<f64>,
    /// ad(e_i) matrices; (ad_i)[k,j] = c_{ij}^k.
    ad: Vec<DMatrix<f64>>,
    /// Killing table B(e_i, e_j) = tr(ad e_i ad e_j).
    pub killing: DMatrix<f64>,
    /// Inner table <e_i, e_j> = -B(e_i, theta e_j); unit diagonal by construction.
    pub inner: DMatrix<f64>,
    /// Matrix realizations of the (normalized) basis vectors.
    pub(crate) basis_mats: Vec<CMat>,
    /// Frobenius norms squared of the basis matrices, for re-expansion.
    frob: Vec<f64>,
    /// Indices of the standard maximal abelian subspace inside the basis.
    pub a_idx: Vec<usize>,
    pub tol: ToleranceConfig,
    pub(crate) token: u64,
}

fn frob_inner(a: &CMat, b: &CMat) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        s += x.re * y.re + x.im * y.im;
    }
    s
}

fn comm(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

struct RawBasis {
    mats: Vec<CMat>,
    labels: Vec<String>,
    dim_k: usize,
    a_idx: Vec<usize>,
}

fn cplx(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn su_pq_basis(p: usize, q: usize) -> RawBasis {
    let n = p + q;
    let zero = || CMat::zeros(n, n);
    let mut mats = Vec::new();
    let mut labels = Vec::new();

    let block_skew = |lo: usize, hi: usize, mats: &mut Vec<CMat>, labels: &mut Vec<String>| {
        for a in lo..hi {
            for b in (a + 1)..hi {
                let mut m = zero();
                m[(a, b)] = cplx(1.0, 0.0);
                m[(b, a)] = cplx(-1.0, 0.0);
                mats.push(m);
                labels.push(format!("K^re[{},{}]", a + 1, b + 1));
                let mut m = zero();
                m[(a, b)] = cplx(0.0, 1.0);
                m[(b, a)] = cplx(0.0, 1.0);
                mats.push(m);
                labels.push(format!("K^im[{},{}]", a + 1, b + 1));
            }
        }
    };
    block_skew(0, p, &mut mats, &mut labels);
    block_skew(p, n, &mut mats, &mut labels);
    // traceless imaginary diagonals i*diag(1,...,1,-j,0,...,0)
    for j in 1..n {
        let mut m = zero();
        for l in 0..j {
            m[(l, l)] = cplx(0.0, 1.0);
        }
        m[(j, j)] = cplx(0.0, -(j as f64));
        mats.push(m);
        labels.push(format!("D[{j}]"));
    }
    let dim_k = mats.len();
    let mut a_idx = Vec::new();
    for a in 0..p {
        for b in 0..q {
            let (r, c) = (a, p + b);
            let mut m = zero();
            m[(r, c)] = cplx(1.0, 0.0);
            m[(c, r)] = cplx(1.0, 0.0);
            if a == b {
                a_idx.push(mats.len());
            }
            mats.push(m);
            labels.push(format!("P^re[{},{}]", a + 1, b + 1));
            let mut m = zero();
            m[(r, c)] = cplx(0.0, 1.0);
            m[(c, r)] = cplx(0.0, -1.0);
            mats.push(m);
            labels.push(format!("P^im[{},{}]", a + 1, b + 1));
        }
    }
    RawBasis {
        mats,
        labels,
        dim_k,
        a_idx,
    }
}

fn sp_n_basis(n: usize) -> RawBasis {
    let d = 2 * n;
    let zero = || CMat::zeros(d, d);
    let sym = |a: usize, b: usize| -> Vec<(usize, usize, f64)> {
        if a == b {
            vec![(a, a, 1.0)]
        } else {
            vec![(a, b, 1.0), (b, a, 1.0)]
        }
    };
    let mut mats = Vec::new();
    let mut labels = Vec::new();
    // k = u(n): A skew on both diagonal blocks
    for a in 0..n {
        for b in (a + 1)..n {
            let mut m = zero();
            m[(a, b)] = cplx(1.0, 0.0);
            m[(b, a)] = cplx(-1.0, 0.0);
            m[(n + a, n + b)] = cplx(1.0, 0.0);
            m[(n + b, n + a)] = cplx(-1.0, 0.0);
            mats.push(m);
            labels.push(format!("K^skew[{},{}]", a + 1, b + 1));
        }
    }
    // k: B symmetric, off-diagonal blocks (B, -B)
    for a in 0..n {
        for b in a..n {
            let mut m = zero();
            for &(r, c, v) in &sym(a, b) {
                m[(r, n + c)] = cplx(v, 0.0);
                m[(n + r, c)] = cplx(-v, 0.0);
            }
            mats.push(m);
            labels.push(format!("K^sym[{},{}]", a + 1, b + 1));
        }
    }
    let dim_k = mats.len();
    let mut a_idx = Vec::new();
    // p: A symmetric on (A, -A)
    for a in 0..n {
        for b in a..n {
            let mut m = zero();
            for &(r, c, v) in &sym(a, b) {
                m[(r, c)] = cplx(v, 0.0);
                m[(n + r, n + c)] = cplx(-v, 0.0);
            }
            if a == b {
                a_idx.push(mats.len());
            }
            mats.push(m);
            labels.push(format!("P^diag[{},{}]", a + 1, b + 1));
        }
    }
    // p: B symmetric on the off-diagonal blocks (B, B)
    for a in 0..n {
        for b in a..n {
            let mut m = zero();
            for &(r, c, v) in &sym(a, b) {
                m[(r, n + c)] = cplx(v, 0.0);
                m[(n + r, c)] = cplx(v, 0.0);
            }
            mats.push(m);
            labels.push(format!("P^off[{},{}]", a + 1, b + 1));
        }
    }
    RawBasis {
        mats,
        labels,
        dim_k,
        a_idx,
    }
}

struct Tables {
    ad: Vec<DMatrix<f64>>,
    killing: DMatrix<f64>,
    inner: DMatrix<f64>,
    frob: Vec<f64>,
}

/// Expands commutators of the basis matrices over the basis and derives
/// the adjoint, Killing and inner tables.
fn assemble_tables(mats: &[CMat], theta: &[f64], tol: &ToleranceConfig) -> Result<Tables> {
    let dim = mats.len();
    let frob: Vec<f64> = mats.iter().map(|m| frob_inner(m, m)).collect();
    let mut ad = vec![DMatrix::<f64>::zeros(dim, dim); dim];
    for i in 0..dim {
        for j in (i + 1)..dim {
            let m = comm(&mats[i], &mats[j]);
            let mut resid = m.clone();
            for k in 0..dim {
                let c = frob_inner(&m, &mats[k]) / frob[k];
                if c.abs() > 1e-14 {
                    ad[i][(k, j)] = c;
                    ad[j][(k, i)] = -c;
                    resid -= mats[k].map(|x| x * cplx(c, 0.0));
                }
            }
            let r = resid.iter().map(|x| x.norm()).fold(0.0, f64::max);
            if r > tol.structural {
                return Err(HssntError::ModelConstruction(format!(
                    "bracket of basis elements {i},{j} does not close over the basis (residual {r:.3e})"
                )));
            }
        }
    }
    let mut killing = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let b = (&ad[i] * &ad[j]).trace();
            killing[(i, j)] = b;
            killing[(j, i)] = b;
        }
    }
    let mut inner = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            inner[(i, j)] = -killing[(i, j)] * theta[j];
        }
    }
    Ok(Tables {
        ad,
        killing,
        inner,
        frob,
    })
}

/// Builds the concrete model for `spec`, checking every structural invariant.
pub fn build_model(spec: SpaceSpec) -> Result<ModelData> {
    build_model_with(spec, ToleranceConfig::default())
}

pub fn build_model_with(spec: SpaceSpec, tol: ToleranceConfig) -> Result<ModelData> {
    let spec = spec.validated()?;
    let raw = match spec.canonical() {
        SpaceSpec::SuPq { p, q } => su_pq_basis(p, q),
        SpaceSpec::SpnR { n } => sp_n_basis(n),
        SpaceSpec::Su11 => unreachable!(),
    };
    let dim_g = raw.mats.len();
    let dim_k = raw.dim_k;
    let dim_p = dim_g - dim_k;
    let mut theta = vec![1.0; dim_k];
    theta.extend(std::iter::repeat_n(-1.0, dim_p));

    // first pass on the raw basis, then rescale to unit inner norm
    let first = assemble_tables(&raw.mats, &theta, &tol)?;
    let mut mats = raw.mats;
    for (i, m) in mats.iter_mut().enumerate() {
        let w = first.inner[(i, i)];
        if w <= 0.0 {
            return Err(HssntError::ModelConstruction(format!(
                "inner product not positive on basis element {i}"
            )));
        }
        *m /= cplx(w.sqrt(), 0.0);
    }
    let tables = assemble_tables(&mats, &theta, &tol)?;

    let model = ModelData {
        spec,
        dim_g,
        dim_k,
        dim_p,
        labels: raw.labels,
        theta,
        ad: tables.ad,
        killing: tables.killing,
        inner: tables.inner,
        basis_mats: mats,
        frob: tables.frob,
        a_idx: raw.a_idx,
        tol,
        token: fnv1a(&spec.name()),
    };
    model.check_invariants()?;
    Ok(model)
}

impl ModelData {
    fn check_invariants(&self) -> Result<()> {
        let t = &self.tol;
        // Jacobi: ad is a Lie algebra homomorphism
        let mut jac: f64 = 0.0;
        for i in 0..self.dim_g {
            for j in (i + 1)..self.dim_g {
                let lhs = &self.ad[i] * &self.ad[j] - &self.ad[j] * &self.ad[i];
                let mut rhs = DMatrix::zeros(self.dim_g, self.dim_g);
                for k in 0..self.dim_g {
                    let c = self.ad[i][(k, j)];
                    if c != 0.0 {
                        rhs += &self.ad[k] * c;
                    }
                }
                jac = jac.max(linalg::max_abs(&(lhs - rhs)));
            }
        }
        if jac > t.structural {
            return Err(HssntError::ModelConstruction(format!(
                "Jacobi residual {jac:.3e} exceeds {:.1e}",
                t.structural
            )));
        }
        // theta is an automorphism: c_{ij}^k = 0 unless theta_k = theta_i theta_j
        let mut th: f64 = 0.0;
        for i in 0..self.dim_g {
            for j in 0..self.dim_g {
                for k in 0..self.dim_g {
                    if self.theta[k] != self.theta[i] * self.theta[j] {
                        th = th.max(self.ad[i][(k, j)].abs());
                    }
                }
            }
        }
        if th > t.structural {
            return Err(HssntError::ModelConstruction(format!(
                "theta-automorphism residual {th:.3e}"
            )));
        }
        // inner positive definite and, after normalization, essentially the identity
        let (vals, _) = linalg::sym_eigen(&self.inner);
        let min = vals.last().copied().unwrap_or(0.0);
        if min <= 0.0 {
            return Err(HssntError::ModelConstruction(format!(
                "inner product not positive definite (min eigenvalue {min:.3e})"
            )));
        }
        let dev = linalg::max_abs(&(&self.inner - DMatrix::identity(self.dim_g, self.dim_g)));
        if dev > 1e-9 {
            return Err(HssntError::ModelConstruction(format!(
                "normalized basis is not inner-orthonormal (deviation {dev:.3e})"
            )));
        }
        Ok(())
    }

    pub fn p_range(&self) -> std::ops::Range<usize> {
        self.dim_k..self.dim_g
    }

    pub fn zero(&self, home: Home) -> AlgVec {
        AlgVec {
            home,
            coeffs: DVector::zeros(self.dim_g),
            model: self.token,
        }
    }

    pub fn basis_vec(&self, i: usize) -> AlgVec {
        let home = if i < self.dim_k { Home::K } else { Home::P };
        let mut v = self.zero(home);
        v.coeffs[i] = 1.0;
        v
    }

    /// Builds a p-tagged vector from dim_p coefficients.
    pub fn vec_from_p_coeffs(&self, coeffs: &[f64]) -> Result<AlgVec> {
        if coeffs.len() != self.dim_p {
            return Err(HssntError::BadInput(format!(
                "expected {} p-coefficients, got {}",
                self.dim_p,
                coeffs.len()
            )));
        }
        let mut v = self.zero(Home::P);
        for (i, &c) in coeffs.iter().enumerate() {
            v.coeffs[self.dim_k + i] = c;
        }
        Ok(v)
    }

    pub fn vec_from_full(&self, coeffs: &[f64], home: Home) -> Result<AlgVec> {
        if coeffs.len() != self.dim_g {
            return Err(HssntError::BadInput(format!(
                "expected {} coefficients, got {}",
                self.dim_g,
                coeffs.len()
            )));
        }
        let v = AlgVec {
            home,
            coeffs: DVector::from_column_slice(coeffs),
            model: self.token,
        };
        self.check_home(&v)?;
        Ok(v)
    }

    fn check_home(&self, v: &AlgVec) -> Result<()> {
        let bad = match v.home {
            Home::G => 0.0,
            Home::K => v.coeffs.rows(self.dim_k, self.dim_p).amax(),
            Home::P | Home::PStar => v.coeffs.rows(0, self.dim_k).amax(),
        };
        if bad > 1e-9 {
            return Err(HssntError::BadInput(format!(
                "coefficients inconsistent with {:?}-tag (off-space component {bad:.3e})",
                v.home
            )));
        }
        Ok(())
    }

    pub fn same_model(&self, v: &AlgVec) -> Result<()> {
        if v.coeffs.len() != self.dim_g || v.model != self.token {
            Err(HssntError::ModelMismatch)
        } else {
            Ok(())
        }
    }

    fn bracket_home(a: Home, b: Home) -> Result<Home> {
        use Home::*;
        Ok(match (a, b) {
            (K, K) => K,
            (K, P) | (P, K) => P,
            (P, P) => K,
            (K, PStar) | (PStar, K) => PStar,
            (G, G) | (G, K) | (K, G) | (G, P) | (P, G) => G,
            (PStar, _) | (_, PStar) => {
                return Err(HssntError::BadInput(
                    "p*-vectors only bracket with k under the primal model; use the dual model"
                        .into(),
                ))
            }
        })
    }

    /// Lie bracket by structure-constant contraction.
    pub fn bracket(&self, x: &AlgVec, y: &AlgVec) -> Result<AlgVec> {
        self.same_model(x)?;
        self.same_model(y)?;
        let home = Self::bracket_home(x.home, y.home)?;
        let mut out = DVector::zeros(self.dim_g);
        for (i, &xi) in x.coeffs.iter().enumerate() {
            if xi != 0.0 {
                out += &self.ad[i] * &y.coeffs * xi;
            }
        }
        Ok(AlgVec {
            home,
            coeffs: out,
            model: self.token,
        })
    }

    pub fn inner(&self, x: &AlgVec, y: &AlgVec) -> f64 {
        (x.coeffs.transpose() * &self.inner * &y.coeffs)[(0, 0)]
    }

    pub fn killing(&self, x: &AlgVec, y: &AlgVec) -> f64 {
        (x.coeffs.transpose() * &self.killing * &y.coeffs)[(0, 0)]
    }

    pub fn norm(&self, x: &AlgVec) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    pub fn theta_apply(&self, x: &AlgVec) -> AlgVec {
        let mut out = x.clone();
        for i in 0..self.dim_g {
            out.coeffs[i] *= self.theta[i];
        }
        out.home = match x.home {
            Home::P => Home::P, // sign-flipped p-vector stays in p
            h => h,
        };
        out
    }

    /// The operator ad(X) on g-coordinates.
    pub fn ad_operator(&self, x: &AlgVec) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim_g, self.dim_g);
        for (i, &xi) in x.coeffs.iter().enumerate() {
            if xi != 0.0 {
                m += &self.ad[i] * xi;
            }
        }
        m
    }

    /// Restriction of a g-operator to the p-block.
    pub fn restrict_p(&self, op: &DMatrix<f64>) -> DMatrix<f64> {
        op.view((self.dim_k, self.dim_k), (self.dim_p, self.dim_p))
            .into_owned()
    }

    /// Ad(exp Z) applied to X, for Z in k.
    pub fn adjoint_action(&self, z: &AlgVec, x: &AlgVec) -> Result<AlgVec> {
        self.same_model(z)?;
        self.same_model(x)?;
        if z.home != Home::K {
            return Err(HssntError::BadInput("adjoint_action requires Z in k".into()));
        }
        let e = linalg::mat_exp(&self.ad_operator(z));
        Ok(AlgVec {
            home: x.home,
            coeffs: e * &x.coeffs,
            model: self.token,
        })
    }

    /// Ad(exp Z) as a matrix on g-coordinates.
    pub fn adjoint_operator(&self, z: &AlgVec) -> DMatrix<f64> {
        linalg::mat_exp(&self.ad_operator(z))
    }

    /// Matrix realization of a vector in the underlying family model.
    pub fn to_matrix(&self, x: &AlgVec) -> CMat {
        let n = self.basis_mats[0].nrows();
        let mut m = CMat::zeros(n, n);
        for (i, &c) in x.coeffs.iter().enumerate() {
            if c != 0.0 {
                m += self.basis_mats[i].map(|z| z * cplx(c, 0.0));
            }
        }
        m
    }

    /// Expands a family matrix over the basis; errors if it does not lie in g.
    pub fn from_matrix(&self, m: &CMat, home: Home) -> Result<AlgVec> {
        let mut coeffs = DVector::zeros(self.dim_g);
        let mut resid = m.clone();
        for i in 0..self.dim_g {
            let c = frob_inner(m, &self.basis_mats[i]) / self.frob[i];
            coeffs[i] = c;
            resid -= self.basis_mats[i].map(|z| z * cplx(c, 0.0));
        }
        let r = resid.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if r > 1e-9 {
            return Err(HssntError::BadInput(format!(
                "matrix does not lie in the model algebra (residual {r:.3e})"
            )));
        }
        let v = AlgVec {
            home,
            coeffs,
            model: self.token,
        };
        self.check_home(&v)?;
        Ok(v)
    }

    /// The standard maximal abelian subspace, as basis vectors.
    pub fn standard_a(&self) -> Vec<AlgVec> {
        self.a_idx.iter().map(|&i| self.basis_vec(i)).collect()
    }

    pub fn rank(&self) -> usize {
        self.a_idx.len()
    }
}

pub fn scale(x: &AlgVec, c: f64) -> AlgVec {
    AlgVec {
        home: x.home,
        coeffs: &x.coeffs * c,
        model: x.model,
    }
}

pub fn add(x: &AlgVec, y: &AlgVec) -> AlgVec {
    debug_assert_eq!(x.model, y.model);
    let home = if x.home == y.home { x.home } else { Home::G };
    AlgVec {
        home,
        coeffs: &x.coeffs + &y.coeffs,
        model: x.model,
    }
}

pub fn sub(x: &AlgVec, y: &AlgVec) -> AlgVec {
    add(x, &scale(y, -1.0))
}

/// Re-tags a p-vector as p* (the sqrt(-1) identification) or back.
pub fn retag(x: &AlgVec, home: Home) -> AlgVec {
    AlgVec {
        home,
        coeffs: x.coeffs.clone(),
        model: x.model,
    }
}
