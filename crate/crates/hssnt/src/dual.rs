//! The compact dual g* = k + p*: flipped bracket on p* x p*, dual root
//! data, the cut-locus cube and the dual strongly diagonal maps.
//!
//! p* is represented by re-tagged p-coordinates; the sqrt(-1)
//! identification is the identity on coefficients, only the bracket table
//! changes sign on the p* x p* block.

use nalgebra::DMatrix;

use crate::algebra::{retag, scale, AlgVec, Home};
use crate::error::{HssntError, Result};
use crate::linalg;
use crate::oddmap::OddMap;
use crate::realize;
use crate::space::HermitianSpace;

/// The dual algebra's tables next to the primal space it was built from.
#[derive(Debug, Clone)]
pub struct DualModel {
    /// ad*(e_i) with the p x p block of every bracket negated.
    ad_star: Vec<DMatrix<f64>>,
    /// Killing table of g*, recomputed as tr(ad* ad*).
    pub killing_star: DMatrix<f64>,
    /// <.,.>* = -B*, positive definite on the compact form.
    pub inner_star: DMatrix<f64>,
}

/// Builds g* from the primal model and verifies its structure.
pub fn build_dual(sp: &HermitianSpace) -> Result<DualModel> {
    let m = &sp.model;
    let dim = m.dim_g;
    let mut ad_star = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut a = m.ad_operator(&m.basis_vec(i));
        if i >= m.dim_k {
            // [p*, p*] = -[p, p]; the k x p* block keeps its sign
            for j in m.dim_k..dim {
                for k in 0..dim {
                    a[(k, j)] = -a[(k, j)];
                }
            }
        }
        ad_star.push(a);
    }
    // Jacobi on the dual tables
    let mut jac: f64 = 0.0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let lhs = &ad_star[i] * &ad_star[j] - &ad_star[j] * &ad_star[i];
            let mut rhs = DMatrix::zeros(dim, dim);
            for k in 0..dim {
                let c = ad_star[i][(k, j)];
                if c != 0.0 {
                    rhs += &ad_star[k] * c;
                }
            }
            jac = jac.max(linalg::max_abs(&(lhs - rhs)));
        }
    }
    if jac > m.tol.structural {
        return Err(HssntError::ModelConstruction(format!(
            "dual Jacobi residual {jac:.3e}"
        )));
    }
    let mut killing_star = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let b = (&ad_star[i] * &ad_star[j]).trace();
            killing_star[(i, j)] = b;
            killing_star[(j, i)] = b;
        }
    }
    let inner_star = -&killing_star;
    let (vals, _) = linalg::sym_eigen(&inner_star);
    if vals.last().copied().unwrap_or(0.0) <= 0.0 {
        return Err(HssntError::ModelConstruction(
            "dual inner product not positive definite".into(),
        ));
    }
    let dm = DualModel {
        ad_star,
        killing_star,
        inner_star,
    };
    // the dual bracket must flip exactly one sign class:
    // [H*, X^k] = alpha(H) X^p* and [H*, X^p*] = -alpha(H) X^k
    for (ri, rt) in sp.roots.roots.iter().enumerate() {
        for (k, a) in sp.roots.a_basis.iter().enumerate() {
            let _ = k;
            let alpha = sp.roots.root_value(m, ri, a);
            let xk = AlgVec {
                home: Home::K,
                coeffs: rt.k_basis.column(0).into_owned(),
                model: a.model_token(),
            };
            let xp_star = AlgVec {
                home: Home::PStar,
                coeffs: rt.p_basis.column(0).into_owned(),
                model: a.model_token(),
            };
            let h_star = retag(a, Home::PStar);
            let b1 = dm.bracket_star(sp, &h_star, &xk)?;
            let r1 = crate::algebra::sub(&b1, &scale(&xp_star, alpha)).norm_inf();
            let b2 = dm.bracket_star(sp, &h_star, &xp_star)?;
            let r2 = crate::algebra::add(&b2, &scale(&xk, alpha)).norm_inf();
            if r1 > m.tol.orthogonality || r2 > m.tol.orthogonality {
                return Err(HssntError::ModelConstruction(format!(
                    "dual bracket signs wrong on {}: {r1:.3e}, {r2:.3e}",
                    rt.class.label()
                )));
            }
        }
    }
    Ok(dm)
}

impl DualModel {
    /// Max Jacobi residual of the dual structure tables.
    pub fn jacobi_residual(&self) -> f64 {
        let dim = self.ad_star.len();
        let mut jac: f64 = 0.0;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let lhs = &self.ad_star[i] * &self.ad_star[j] - &self.ad_star[j] * &self.ad_star[i];
                let mut rhs = DMatrix::zeros(dim, dim);
                for k in 0..dim {
                    let c = self.ad_star[i][(k, j)];
                    if c != 0.0 {
                        rhs += &self.ad_star[k] * c;
                    }
                }
                jac = jac.max(linalg::max_abs(&(lhs - rhs)));
            }
        }
        jac
    }

    /// Bracket of g*; k x k and k x p* agree with the primal, p* x p* flips.
    pub fn bracket_star(&self, sp: &HermitianSpace, x: &AlgVec, y: &AlgVec) -> Result<AlgVec> {
        let m = &sp.model;
        m.same_model(x)?;
        m.same_model(y)?;
        let home = match (x.home, y.home) {
            (Home::K, Home::K) => Home::K,
            (Home::K, Home::PStar) | (Home::PStar, Home::K) => Home::PStar,
            (Home::PStar, Home::PStar) => Home::K,
            _ => {
                return Err(HssntError::BadInput(
                    "dual bracket expects k- or p*-tagged vectors".into(),
                ))
            }
        };
        let mut out = nalgebra::DVector::zeros(m.dim_g);
        for (i, &xi) in x.coeffs.iter().enumerate() {
            if xi != 0.0 {
                out += &self.ad_star[i] * &y.coeffs * xi;
            }
        }
        let mut v = m.zero(home);
        v.coeffs = out;
        Ok(v)
    }

    pub fn inner_star(&self, x: &AlgVec, y: &AlgVec) -> f64 {
        (x.coeffs.transpose() * &self.inner_star * &y.coeffs)[(0, 0)]
    }

    /// ad*(v) as a matrix on g-coordinates.
    pub fn ad_star_operator(&self, sp: &HermitianSpace, v: &AlgVec) -> DMatrix<f64> {
        let m = &sp.model;
        let mut a = DMatrix::zeros(m.dim_g, m.dim_g);
        for (i, &xi) in v.coeffs.iter().enumerate() {
            if xi != 0.0 {
                a += &self.ad_star[i] * xi;
            }
        }
        a
    }
}

/// True iff all |x_i| < pi/2 in the H~* frame (the chart of M* minus the
/// cut locus).
pub fn cut_cube_membership(coeffs: &[f64]) -> bool {
    coeffs
        .iter()
        .all(|x| x.abs() < std::f64::consts::FRAC_PI_2)
}

/// The dual strongly diagonal map: transport through the identification,
/// apply eta* spectrally, re-tag into p*.
pub fn omega_eta_star(sp: &HermitianSpace, x_star: &AlgVec, eta_star: &OddMap) -> Result<AlgVec> {
    if x_star.home != Home::PStar {
        return Err(HssntError::BadInput(
            "omega_eta_star expects a p*-tagged vector".into(),
        ));
    }
    let x = retag(x_star, Home::P);
    let d = realize::spectral_decompose(sp, &x)?;
    let r_star = eta_star.radius().min(std::f64::consts::FRAC_PI_2);
    for &l in &d.values {
        if l >= std::f64::consts::FRAC_PI_2 {
            return Err(HssntError::OutsideCutLocus(l));
        }
        if l >= r_star {
            return Err(HssntError::DomainExceeded {
                eta: eta_star.name.clone(),
                value: l,
                radius: r_star,
            });
        }
    }
    let mut out = sp.model.zero(Home::PStar);
    for (l, c) in d.values.iter().zip(d.tripotents.iter()) {
        out = crate::algebra::add(&out, &scale(&retag(c, Home::PStar), eta_star.eval(*l)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{add, sub, SpaceSpec};
    use crate::oddmap::builtin_odd;
    use crate::sample;

    fn setup(spec: SpaceSpec) -> (HermitianSpace, DualModel) {
        let sp = HermitianSpace::build(spec).unwrap();
        let dm = build_dual(&sp).unwrap();
        (sp, dm)
    }

    #[test]
    fn feq2dual_brackets() {
        let (sp, dm) = setup(SpaceSpec::SuPq { p: 2, q: 2 });
        let ht_star = retag(&sp.roots.h_tilde[0], Home::PStar);
        let zk = &sp.kahler.z_k[0];
        let zp_star = retag(&sp.kahler.z_p[0], Home::PStar);
        // [H~*, Z^k] = 2 Z^p* (unchanged direction)
        let b1 = dm.bracket_star(&sp, &ht_star, zk).unwrap();
        assert!(sub(&b1, &scale(&zp_star, 2.0)).norm_inf() < 1e-10);
        // [H~*, Z^p*] = -2 Z^k (sign-flipped)
        let b2 = dm.bracket_star(&sp, &ht_star, &zp_star).unwrap();
        assert!(add(&b2, &scale(zk, 2.0)).norm_inf() < 1e-10);
    }

    #[test]
    fn dual_metric_is_isometric_to_primal() {
        let (sp, dm) = setup(SpaceSpec::SpnR { n: 2 });
        let mut rng = sample::sample_rng(41, 0);
        for _ in 0..10 {
            let x = sample::chart_point(&sp, &mut rng, 0.1, 1.0);
            let y = sample::chart_point(&sp, &mut rng, 0.1, 1.0);
            let primal = sp.model.inner(&x, &y);
            let dual = dm.inner_star(&retag(&x, Home::PStar), &retag(&y, Home::PStar));
            assert!((primal - dual).abs() < 1e-9);
            let zk = sample::k_element(&sp, &mut rng, 0.8);
            assert!((sp.model.inner(&zk, &zk) - dm.inner_star(&zk, &zk)).abs() < 1e-9);
        }
    }

    #[test]
    fn dual_root_squares_flip_sign() {
        // (ad* H*)^2 on p* has eigenvalues -alpha(H)^2
        let (sp, dm) = setup(SpaceSpec::SuPq { p: 1, q: 2 });
        let h_star = retag(&sp.roots.h_tilde[0], Home::PStar);
        let a = dm.ad_star_operator(&sp, &h_star);
        let sq = sp.model.restrict_p(&(&a * &a));
        let (vals, _) = linalg::sym_eigen(&sq);
        assert!(vals.iter().all(|&v| v < 1e-10));
        // gamma eigenvalue -4 present (gamma(H~) = 2)
        assert!(vals.iter().any(|&v| (v + 4.0).abs() < 1e-8));
    }

    #[test]
    fn cut_cube() {
        assert!(cut_cube_membership(&[0.0, 0.0]));
        assert!(!cut_cube_membership(&[std::f64::consts::FRAC_PI_2, 0.0]));
        assert!(cut_cube_membership(&[1.5, -1.5]));
    }

    #[test]
    fn omega_eta_star_axis_values() {
        let (sp, _) = setup(SpaceSpec::SuPq { p: 2, q: 2 });
        let tan = builtin_odd("tan").unwrap();
        let id = builtin_odd("id").unwrap();
        let x = 0.9;
        let v_star = sp.roots.from_a_coeffs_star(&sp.model, &[x, 0.0]);
        let img = omega_eta_star(&sp, &v_star, &tan).unwrap();
        let expect = sp.roots.from_a_coeffs_star(&sp.model, &[x.tan(), 0.0]);
        assert!(sub(&img, &expect).norm_inf() < 1e-10);
        assert_eq!(img.home, Home::PStar);
        // identity map and zero
        let img = omega_eta_star(&sp, &v_star, &id).unwrap();
        assert!(sub(&img, &v_star).norm_inf() < 1e-9);
        let z = sp.model.zero(Home::PStar);
        assert!(omega_eta_star(&sp, &z, &tan).unwrap().norm_inf() < 1e-15);
    }

    #[test]
    fn omega_eta_star_rejects_cut_locus() {
        let (sp, _) = setup(SpaceSpec::SuPq { p: 2, q: 2 });
        let tan = builtin_odd("tan").unwrap();
        let v_star = sp.roots.from_a_coeffs_star(&sp.model, &[1.8, 0.0]);
        assert!(matches!(
            omega_eta_star(&sp, &v_star, &tan),
            Err(HssntError::OutsideCutLocus(_))
        ));
    }

    #[test]
    fn omega_eta_star_equivariance() {
        let (sp, _) = setup(SpaceSpec::SpnR { n: 2 });
        let sin = builtin_odd("sin").unwrap();
        let mut rng = sample::sample_rng(43, 0);
        for _ in 0..10 {
            let coeffs = sample::abelian_coeffs(&sp, &mut rng, 0.1, 1.4);
            let v = sp.roots.from_a_coeffs(&sp.model, &coeffs);
            let z = sample::k_element(&sp, &mut rng, 0.6);
            let moved = retag(&sp.model.adjoint_action(&z, &v).unwrap(), Home::PStar);
            let lhs = omega_eta_star(&sp, &moved, &sin).unwrap();
            let img = omega_eta_star(&sp, &retag(&v, Home::PStar), &sin).unwrap();
            let rhs = retag(
                &sp.model
                    .adjoint_action(&z, &retag(&img, Home::P))
                    .unwrap(),
                Home::PStar,
            );
            assert!(sub(&lhs, &rhs).norm_inf() < 1e-9);
        }
    }

    #[test]
    fn gudermann_duality_round_trips() {
        // the dual holomorphic map recovers the symplectomorphism through
        // the Borel-type composite (tan∘gd = sinh), and the dual
        // symplectomorphism recovers the Harish-Chandra map (sin∘gd = tanh)
        let (sp, _) = setup(SpaceSpec::SuPq { p: 2, q: 2 });
        let tan = builtin_odd("tan").unwrap();
        let sin = builtin_odd("sin").unwrap();
        let mut rng = sample::sample_rng(47, 0);
        for _ in 0..20 {
            let x = sample::chart_point(&sp, &mut rng, 0.05, 2.0);
            let g = realize::gudermann_composite(&sp, &x).unwrap();
            let lhs_tan = omega_eta_star(&sp, &g, &tan).unwrap();
            let phi = retag(&realize::symplecto(&sp, &x).unwrap(), Home::PStar);
            assert!(sub(&lhs_tan, &phi).norm_inf() < 1e-9);
            let lhs_sin = omega_eta_star(&sp, &g, &sin).unwrap();
            let psi = retag(&realize::harish_chandra(&sp, &x).unwrap(), Home::PStar);
            assert!(sub(&lhs_sin, &psi).norm_inf() < 1e-9);
        }
    }

    #[test]
    fn dual_diastatic_pair_round_trip() {
        let (sp, _) = setup(SpaceSpec::SuPq { p: 2, q: 2 });
        let dl = realize::diastatic_log_dual_eta();
        let de = realize::diastatic_exp_dual_eta();
        let mut rng = sample::sample_rng(53, 0);
        for _ in 0..10 {
            let coeffs = sample::abelian_coeffs(&sp, &mut rng, 0.05, 1.4);
            let v = sp.roots.from_a_coeffs_star(&sp.model, &coeffs);
            let img = omega_eta_star(&sp, &v, &dl).unwrap();
            // DE* is entire; apply through the spectral calculus on p
            let back = retag(
                &realize::odd_calculus(&sp, &retag(&img, Home::P), &de).unwrap(),
                Home::PStar,
            );
            assert!(sub(&back, &v).norm_inf() < 1e-9);
        }
    }
}
