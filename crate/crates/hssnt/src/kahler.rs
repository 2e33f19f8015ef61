//! The canonical complex structure J_o = ad(zeta)|_p, the symplectic form
//! omega_o = <J_o., .>, the Z_i basis of the long root spaces, and the
//! polydisk splitting with its su(1,1) triples.

use nalgebra::{Complex, DMatrix, DVector, Matrix2};

use crate::algebra::{add, scale, sub, AlgVec, Home, ModelData, SpaceSpec};
use crate::error::{HssntError, Result};
use crate::linalg;
use crate::roots::RootDatum;

type C64 = Complex<f64>;

/// Canonical Kähler data at the origin.
#[derive(Debug, Clone)]
pub struct KahlerData {
    /// Generator of the center of k, normalized so ad(zeta)^2 = -Id on p.
    pub zeta: AlgVec,
    /// J_o = ad(zeta)|_p on p-coordinates.
    pub j0: DMatrix<f64>,
    /// omega_o(u, w) = <J_o u, w> as a p-coordinate table.
    pub omega0: DMatrix<f64>,
    /// Z_i^k components, one per long root.
    pub z_k: Vec<AlgVec>,
    /// Z_i^p components.
    pub z_p: Vec<AlgVec>,
    /// Z_0 = zeta + sum Z_i^k, verified to lie in k_0.
    pub z0: AlgVec,
}

/// The su(1,1) triples spanning the polydisk directions.
#[derive(Debug, Clone)]
pub struct PolydiskData {
    /// (H~_i, J_o H~_i, [H~_i, J_o H~_i]) for each i.
    pub triples: Vec<(AlgVec, AlgVec, AlgVec)>,
}

/// Reference center direction for each family; this pins the orientation
/// of zeta so the rank-1 restriction matches the su(1,1) reference model.
fn reference_center(m: &ModelData) -> Result<AlgVec> {
    let mat = match m.spec.canonical() {
        SpaceSpec::SuPq { p, q } => {
            let n = p + q;
            let mut z = DMatrix::<C64>::zeros(n, n);
            for i in 0..p {
                z[(i, i)] = Complex::new(0.0, -(q as f64) / n as f64);
            }
            for i in p..n {
                z[(i, i)] = Complex::new(0.0, p as f64 / n as f64);
            }
            z
        }
        SpaceSpec::SpnR { n } => {
            let mut z = DMatrix::<C64>::zeros(2 * n, 2 * n);
            for i in 0..n {
                z[(i, n + i)] = Complex::new(-0.5, 0.0);
                z[(n + i, i)] = Complex::new(0.5, 0.0);
            }
            z
        }
        SpaceSpec::Su11 => unreachable!(),
    };
    m.from_matrix(&mat, Home::K)
}

/// Solves [Z, k_j] = 0 over Z in k, scales so ad(zeta)^2 = -Id on p, and
/// orients along the family reference.
pub fn central_element(m: &ModelData) -> Result<AlgVec> {
    let dim_k = m.dim_k;
    // stack the maps z -> [z, e_j] for every k-basis element e_j
    let mut sys = DMatrix::<f64>::zeros(dim_k * m.dim_g, dim_k);
    for i in 0..dim_k {
        let col = m.ad_operator(&m.basis_vec(i));
        for j in 0..dim_k {
            let img = col.column(j);
            for l in 0..m.dim_g {
                sys[(j * m.dim_g + l, i)] = img[l];
            }
        }
    }
    let null = linalg::nullspace(&sys, 1e-10);
    if null.len() != 1 {
        return Err(HssntError::CenterDimensionError(null.len()));
    }
    let mut z = m.zero(Home::K);
    z.coeffs.rows_mut(0, dim_k).copy_from(&null[0]);
    // normalize: ad(z)^2 on p must be a negative scalar
    let sq = {
        let a = m.ad_operator(&z);
        m.restrict_p(&(&a * &a))
    };
    let c2 = -sq.trace() / m.dim_p as f64;
    if c2 <= 0.0 {
        return Err(HssntError::CenterDimensionError(1));
    }
    let dev = linalg::max_abs(&(&sq + DMatrix::identity(m.dim_p, m.dim_p) * c2));
    if dev > 1e-9 * c2.max(1.0) {
        return Err(HssntError::DecompositionFailure(format!(
            "ad(zeta)^2 is not scalar on p (residual {dev:.3e})"
        )));
    }
    let mut zeta = scale(&z, 1.0 / c2.sqrt());
    let zref = reference_center(m)?;
    let cosine = m.inner(&zeta, &zref) / (m.norm(&zeta) * m.norm(&zref));
    if cosine.abs() < 1.0 - 1e-8 {
        return Err(HssntError::DecompositionFailure(format!(
            "computed center is not parallel to the family reference (cos = {cosine:.6})"
        )));
    }
    if cosine < 0.0 {
        zeta = scale(&zeta, -1.0);
    }
    Ok(zeta)
}

/// J_o = ad(zeta)|_p and omega_o = <J_o., .>.
pub fn complex_structure(m: &ModelData, zeta: &AlgVec) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let j0 = m.restrict_p(&m.ad_operator(zeta));
    let id = DMatrix::identity(m.dim_p, m.dim_p);
    let dev_sq = linalg::max_abs(&(&j0 * &j0 + &id));
    let dev_orth = linalg::max_abs(&(j0.transpose() * &j0 - &id));
    if dev_sq > m.tol.orthogonality || dev_orth > m.tol.orthogonality {
        return Err(HssntError::DecompositionFailure(format!(
            "J_o fails J^2 = -Id ({dev_sq:.3e}) or orthogonality ({dev_orth:.3e})"
        )));
    }
    // omega(u, w) = <J_o u, w>; coordinates are inner-orthonormal
    let omega0 = j0.transpose();
    Ok((j0, omega0))
}

impl KahlerData {
    pub fn compute(m: &ModelData, datum: &RootDatum) -> Result<Self> {
        let zeta = central_element(m)?;
        let (j0, omega0) = complex_structure(m, &zeta)?;
        let (z_k, z_p) = z_basis(m, datum, &j0)?;

        // the center decomposes over the long-root frame with a k_0 remainder
        let mut z0 = zeta.clone();
        for zk in &z_k {
            z0 = add(&z0, zk);
        }
        for a in &datum.a_basis {
            let r = m.bracket(&z0, a)?.norm_inf();
            if r > m.tol.orthogonality {
                return Err(HssntError::DecompositionFailure(format!(
                    "zeta + sum Z_i^k does not centralize a (residual {r:.3e})"
                )));
            }
        }
        let proj = linalg::project_onto(&datum.k0_basis, &z0.coeffs);
        let off = (&z0.coeffs - proj).norm();
        if off > m.tol.orthogonality {
            return Err(HssntError::DecompositionFailure(format!(
                "Z_0 component off k_0 by {off:.3e}"
            )));
        }
        Ok(KahlerData {
            zeta,
            j0,
            omega0,
            z_k,
            z_p,
            z0,
        })
    }

    /// Applies J_o to a p- or p*-tagged vector.
    pub fn apply_j0(&self, m: &ModelData, v: &AlgVec) -> AlgVec {
        let sub = v.coeffs.rows(m.dim_k, m.dim_p).into_owned();
        let img = &self.j0 * sub;
        let mut out = m.zero(v.home);
        out.coeffs.rows_mut(m.dim_k, m.dim_p).copy_from(&img);
        out
    }

    pub fn omega(&self, m: &ModelData, u: &AlgVec, w: &AlgVec) -> f64 {
        let us = u.coeffs.rows(m.dim_k, m.dim_p).into_owned();
        let ws = w.coeffs.rows(m.dim_k, m.dim_p).into_owned();
        (us.transpose() * &self.omega0 * ws)[(0, 0)]
    }
}

/// Z_i^p := J_o H_i / C and Z_i^k recovered through the bracket, with the
/// norm and bracket identities verified.
pub fn z_basis(
    m: &ModelData,
    datum: &RootDatum,
    j0: &DMatrix<f64>,
) -> Result<(Vec<AlgVec>, Vec<AlgVec>)> {
    let c = datum.c_const;
    let mut z_k = Vec::new();
    let mut z_p = Vec::new();
    for h in &datum.h {
        let sub = h.coeffs.rows(m.dim_k, m.dim_p).into_owned();
        let img = j0 * sub / c;
        let mut zp = m.zero(Home::P);
        zp.coeffs.rows_mut(m.dim_k, m.dim_p).copy_from(&img);
        let zk = scale(&m.bracket(h, &zp)?, 1.0 / c);
        z_p.push(zp);
        z_k.push(zk);
    }
    let tol = m.tol.orthogonality;
    for (i, (zk, zp)) in z_k.iter().zip(z_p.iter()).enumerate() {
        let nk = m.inner(zk, zk);
        let np = m.inner(zp, zp);
        if (nk - 1.0 / c).abs() > tol || (np - 1.0 / c).abs() > tol {
            return Err(HssntError::DecompositionFailure(format!(
                "||Z_{i}^k||^2 = {nk:.6}, ||Z_{i}^p||^2 = {np:.6}, expected {:.6}",
                1.0 / c
            )));
        }
        let br = m.bracket(zk, zp)?;
        let target = scale(&datum.h[i], 1.0 / c);
        if sub(&br, &target).norm_inf() > tol {
            return Err(HssntError::DecompositionFailure(format!(
                "[Z_{i}^k, Z_{i}^p] != H_{i}/C"
            )));
        }
        for (j, zpj) in z_p.iter().enumerate() {
            if i != j && m.bracket(zk, zpj)?.norm_inf() > tol {
                return Err(HssntError::DecompositionFailure(format!(
                    "[Z_{i}^k, Z_{j}^p] != 0"
                )));
            }
        }
    }
    Ok((z_k, z_p))
}

/// Residual report for how J_o permutes the root spaces:
/// J_o p_gamma = a_i, J_o p_lambda = p_lambdabar, J_o p_epsilon = p_epsilon.
#[derive(Debug, Clone)]
pub struct JMappingReport {
    pub per_root: Vec<(String, f64)>,
    pub max_residual: f64,
}

pub fn verify_j_mapping(m: &ModelData, datum: &RootDatum, kd: &KahlerData) -> JMappingReport {
    let mut per_root = Vec::new();
    let push = |label: String, res: f64, per_root: &mut Vec<(String, f64)>| {
        per_root.push((label, res));
    };
    let off_span = |target: &DMatrix<f64>, v: &DVector<f64>| -> f64 {
        (v - linalg::project_onto(target, v)).norm()
    };
    for (i, &gi) in datum.gamma_idx.iter().enumerate() {
        let rt = &datum.roots[gi];
        let mut a_span = DMatrix::zeros(m.dim_g, 1);
        a_span.set_column(0, &(&datum.h[i].coeffs / datum.h[i].coeffs.norm()));
        let mut worst: f64 = 0.0;
        for col in rt.p_basis.column_iter() {
            let v = AlgVec {
                home: Home::P,
                coeffs: col.into_owned(),
                model: kd.zeta.model_token(),
            };
            let img = kd.apply_j0(m, &v);
            worst = worst.max(off_span(&a_span, &img.coeffs));
        }
        push(rt.class.label(), worst, &mut per_root);
    }
    for &(l, lbar) in &datum.lambda_pairs {
        for (src, dst) in [(l, lbar), (lbar, l)] {
            let rt = &datum.roots[src];
            let target = &datum.roots[dst].p_basis;
            let mut worst: f64 = 0.0;
            for col in rt.p_basis.column_iter() {
                let v = AlgVec {
                    home: Home::P,
                    coeffs: col.into_owned(),
                    model: kd.zeta.model_token(),
                };
                let img = kd.apply_j0(m, &v);
                worst = worst.max(off_span(target, &img.coeffs));
            }
            push(rt.class.label(), worst, &mut per_root);
        }
    }
    for &e in &datum.epsilon_idx {
        let rt = &datum.roots[e];
        let mut worst: f64 = 0.0;
        for col in rt.p_basis.column_iter() {
            let v = AlgVec {
                home: Home::P,
                coeffs: col.into_owned(),
                model: kd.zeta.model_token(),
            };
            let img = kd.apply_j0(m, &v);
            worst = worst.max(off_span(&rt.p_basis, &img.coeffs));
        }
        push(rt.class.label(), worst, &mut per_root);
    }
    let max_residual = per_root.iter().map(|&(_, r)| r).fold(0.0, f64::max);
    JMappingReport {
        per_root,
        max_residual,
    }
}

/// Builds the polydisk triples and verifies all their bracket relations.
pub fn polydisk(m: &ModelData, datum: &RootDatum, kd: &KahlerData) -> Result<PolydiskData> {
    let tol = m.tol.orthogonality;
    let mut triples = Vec::new();
    for (i, ht) in datum.h_tilde.iter().enumerate() {
        let jht = kd.apply_j0(m, ht);
        // J_o H~_i = 2 Z_i^p
        if sub(&jht, &scale(&kd.z_p[i], 2.0)).norm_inf() > tol {
            return Err(HssntError::DecompositionFailure(format!(
                "J_o H~_{i} != 2 Z_{i}^p"
            )));
        }
        let w = m.bracket(ht, &jht)?;
        // brah relations
        let r1 = sub(&m.bracket(&w, &jht)?, &scale(ht, 4.0)).norm_inf();
        let r2 = add(&m.bracket(&w, ht)?, &scale(&jht, 4.0)).norm_inf();
        if r1 > tol || r2 > tol {
            return Err(HssntError::DecompositionFailure(format!(
                "su(1,1) bracket relations fail on triple {i}: {r1:.3e}, {r2:.3e}"
            )));
        }
        // brawh relations through the Z basis
        let r3 = sub(&m.bracket(ht, &kd.z_k[i])?, &scale(&kd.z_p[i], 2.0)).norm_inf();
        let r4 = sub(&m.bracket(ht, &kd.z_p[i])?, &scale(&kd.z_k[i], 2.0)).norm_inf();
        let r5 = sub(&m.bracket(&kd.z_k[i], &kd.z_p[i])?, &scale(ht, 0.5)).norm_inf();
        if r3 > tol || r4 > tol || r5 > tol {
            return Err(HssntError::DecompositionFailure(format!(
                "brawh relations fail on triple {i}: {r3:.3e}, {r4:.3e}, {r5:.3e}"
            )));
        }
        triples.push((ht.clone(), jht, w));
    }
    // [u_i, u_j] = 0 for i != j
    for i in 0..triples.len() {
        for j in 0..triples.len() {
            if i == j {
                continue;
            }
            let (a1, a2, a3) = &triples[i];
            let (b1, b2, b3) = &triples[j];
            for x in [a1, a2, a3] {
                for y in [b1, b2, b3] {
                    if m.bracket(x, y)?.norm_inf() > tol {
                        return Err(HssntError::DecompositionFailure(format!(
                            "[u_{i}, u_{j}] != 0"
                        )));
                    }
                }
            }
        }
    }
    Ok(PolydiskData { triples })
}

impl PolydiskData {
    /// The su(1,1) coordinate map f_i on the triple span: H~_i maps to the
    /// symmetric flip, J_o H~_i to its i-rotation, and the k-bracket to
    /// twice the diagonal generator.
    pub fn f_apply(&self, m: &ModelData, i: usize, v: &AlgVec) -> Result<Matrix2<C64>> {
        let (u, ju, w) = &self.triples[i];
        let cu = m.inner(v, u) / m.inner(u, u);
        let cj = m.inner(v, ju) / m.inner(ju, ju);
        let cw = m.inner(v, w) / m.inner(w, w);
        let recon = add(&add(&scale(u, cu), &scale(ju, cj)), &scale(w, cw));
        if sub(&recon, v).norm_inf() > 1e-9 {
            return Err(HssntError::BadInput(
                "vector is not in the span of the su(1,1) triple".into(),
            ));
        }
        let iu = Matrix2::new(
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
        );
        let ij = Matrix2::new(
            Complex::new(0.0, 0.0),
            Complex::new(0.0, -1.0),
            Complex::new(0.0, 1.0),
            Complex::new(0.0, 0.0),
        );
        let iw = Matrix2::new(
            Complex::new(0.0, 2.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, -2.0),
        );
        Ok(iu * Complex::new(cu, 0.0) + ij * Complex::new(cj, 0.0) + iw * Complex::new(cw, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_model;
    use crate::roots::restricted_roots;

    fn setup(spec: SpaceSpec) -> (ModelData, RootDatum, KahlerData) {
        let m = build_model(spec).unwrap();
        let d = restricted_roots(&m).unwrap();
        let k = KahlerData::compute(&m, &d).unwrap();
        (m, d, k)
    }

    #[test]
    fn su11_center_matches_reference_matrix() {
        let (m, _, k) = setup(SpaceSpec::SuPq { p: 1, q: 1 });
        let mut zhat = DMatrix::<C64>::zeros(2, 2);
        zhat[(0, 0)] = Complex::new(0.0, -0.5);
        zhat[(1, 1)] = Complex::new(0.0, 0.5);
        let zref = m.from_matrix(&zhat, Home::K).unwrap();
        assert!(sub(&k.zeta, &zref).norm_inf() < 1e-12);
    }

    #[test]
    fn zeta_is_central_and_squares_to_minus_id() {
        let (m, _, k) = setup(SpaceSpec::SuPq { p: 2, q: 2 });
        for i in 0..m.dim_k {
            let r = m.bracket(&k.zeta, &m.basis_vec(i)).unwrap().norm_inf();
            assert!(r < 1e-12, "centrality residual {r:.3e}");
        }
        let id = DMatrix::identity(m.dim_p, m.dim_p);
        assert!(linalg::max_abs(&(&k.j0 * &k.j0 + id)) < 1e-10);
    }

    #[test]
    fn omega_antisymmetric_and_pins_sign() {
        let (m, d, k) = setup(SpaceSpec::SpnR { n: 2 });
        let u = &d.h_tilde[0];
        let ju = k.apply_j0(&m, u);
        assert!(k.omega(&m, u, u).abs() < 1e-12);
        // omega(u, J u) = ||u||^2 and omega(J u, u) = -||u||^2 = -4/C
        let n2 = 4.0 / d.c_const;
        assert!((k.omega(&m, u, &ju) - n2).abs() < 1e-10);
        assert!((k.omega(&m, &ju, u) + n2).abs() < 1e-10);
        // nondegeneracy
        let (vals, _) = linalg::sym_eigen(&(&k.omega0 * k.omega0.transpose()));
        assert!(vals.last().unwrap() > &1e-10);
    }

    #[test]
    fn z_basis_identities() {
        let (m, d, k) = setup(SpaceSpec::SuPq { p: 2, q: 2 });
        let c = d.c_const;
        for i in 0..d.rank {
            assert!((m.inner(&k.z_p[i], &k.z_p[i]) - 1.0 / c).abs() < 1e-10);
            assert!((m.inner(&k.z_k[i], &k.z_k[i]) - 1.0 / c).abs() < 1e-10);
            // [Z^k, Z^p] = H/C = H~/2
            let br = m.bracket(&k.z_k[i], &k.z_p[i]).unwrap();
            assert!(sub(&br, &scale(&d.h_tilde[i], 0.5)).norm_inf() < 1e-10);
        }
        let cross = m.bracket(&k.z_k[0], &k.z_p[1]).unwrap();
        assert!(cross.norm_inf() < 1e-10);
    }

    #[test]
    fn j_mapping_report_su22_and_su12() {
        let (m, d, k) = setup(SpaceSpec::SuPq { p: 2, q: 2 });
        let rep = verify_j_mapping(&m, &d, &k);
        assert!(rep.max_residual < 1e-10, "max {:.3e}", rep.max_residual);
        let (m, d, k) = setup(SpaceSpec::SuPq { p: 1, q: 2 });
        let rep = verify_j_mapping(&m, &d, &k);
        assert!(rep.max_residual < 1e-10);
        // epsilon entry present for BC type
        assert!(rep.per_root.iter().any(|(l, _)| l == "e1"));
    }

    #[test]
    fn polydisk_triples_and_f_map() {
        let (m, d, k) = setup(SpaceSpec::SuPq { p: 2, q: 2 });
        let pd = polydisk(&m, &d, &k).unwrap();
        // f_i is a Lie algebra homomorphism onto su(1,1): check on the triple
        for i in 0..d.rank {
            let (u, ju, w) = &pd.triples[i];
            let fu = pd.f_apply(&m, i, u).unwrap();
            let fj = pd.f_apply(&m, i, ju).unwrap();
            let fw = pd.f_apply(&m, i, w).unwrap();
            let comm = fu * fj - fj * fu;
            let dev = (comm - fw).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(dev < 1e-10, "f_i not a homomorphism on [u, Ju]: {dev:.3e}");
            let c2 = fw * fj - fj * fw;
            let dev2 = (c2 - fu * Complex::new(4.0, 0.0))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(dev2 < 1e-10);
            // norm preservation: (2/C) tr(f(H~)^2) = 4/C = ||H~||^2
            let sq = fu * fu;
            let tr = (sq[(0, 0)] + sq[(1, 1)]).re;
            let lhs = 2.0 / d.c_const * tr;
            assert!((lhs - 4.0 / d.c_const).abs() < 1e-10);
            assert!((lhs - m.inner(u, u)).abs() < 1e-10);
        }
    }

    #[test]
    fn j0_acts_as_ad_zk_on_complex_lines() {
        // J_o on the i-th complex line agrees with ad(-Z_i^k)
        let (m, d, k) = setup(SpaceSpec::SpnR { n: 2 });
        for i in 0..d.rank {
            let ad = m.ad_operator(&scale(&k.z_k[i], -1.0));
            for v in [&d.h_tilde[i], &k.apply_j0(&m, &d.h_tilde[i])] {
                let lhs = k.apply_j0(&m, v);
                let rhs = AlgVec {
                    home: Home::P,
                    coeffs: &ad * &v.coeffs,
                    model: v.model_token(),
                };
                assert!(sub(&lhs, &rhs).norm_inf() < 1e-10);
            }
        }
    }

    #[test]
    fn torus_action_rotates_complex_lines() {
        let (m, d, k) = setup(SpaceSpec::SuPq { p: 2, q: 2 });
        for theta in [std::f64::consts::PI / 7.0, std::f64::consts::PI / 3.0] {
            for i in 0..d.rank {
                let gen = scale(&k.z_k[i], -theta);
                let u = &d.h_tilde[i];
                let ju = k.apply_j0(&m, u);
                let img = m.adjoint_action(&gen, u).unwrap();
                let expect = add(&scale(u, theta.cos()), &scale(&ju, theta.sin()));
                assert!(sub(&img, &expect).norm_inf() < 1e-10);
                // identity on the other lines
                for j in 0..d.rank {
                    if j != i {
                        let v = &d.h_tilde[j];
                        let img = m.adjoint_action(&gen, v).unwrap();
                        assert!(sub(&img, v).norm_inf() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn adjoint_action_commutes_with_j0() {
        // zeta is central in k, so Ad(exp Z) and J_o commute on p
        use rand::{RngExt, SeedableRng};
        for spec in [SpaceSpec::SuPq { p: 1, q: 1 }, SpaceSpec::SuPq { p: 2, q: 2 }] {
            let (m, _, k) = setup(spec);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
            for _ in 0..10 {
                let mut z = m.zero(Home::K);
                for i in 0..m.dim_k {
                    z.coeffs[i] = rng.random::<f64>() - 0.5;
                }
                let mut x = m.zero(Home::P);
                for i in 0..m.dim_p {
                    x.coeffs[m.dim_k + i] = rng.random::<f64>() - 0.5;
                }
                let lhs = m.adjoint_action(&z, &k.apply_j0(&m, &x)).unwrap();
                let rhs = k.apply_j0(&m, &m.adjoint_action(&z, &x).unwrap());
                assert!(sub(&lhs, &rhs).norm_inf() < 1e-10);
            }
        }
    }

    #[test]
    fn family_dispatch() {
        use crate::algebra::Family;
        assert_eq!(SpaceSpec::SpnR { n: 2 }.family(), Family::SpnR);
        assert_eq!(SpaceSpec::Su11.family(), Family::SuPq);
    }
}
