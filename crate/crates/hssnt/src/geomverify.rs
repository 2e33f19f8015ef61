//! Numerical verification engine: chart Kähler structures via Jacobi
//! operators, exact and finite-difference differentials, the G/F block
//! scalars of the induced structures, and holomorphy / symplecticity /
//! equivariance certification of realization maps.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::algebra::{retag, sub, AlgVec, Home};
use crate::error::{HssntError, Result};
use crate::linalg;
use crate::oddmap::OddMap;
use crate::realize;
use crate::roots::RootClass;
use crate::sample;
use crate::space::HermitianSpace;

/// Outcome of one sampled check.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub seed: u64,
}

impl VerifyReport {
    fn from_residuals(name: &str, residuals: &[f64], tol: f64, seed: u64) -> Self {
        let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
        VerifyReport {
            name: name.into(),
            samples: residuals.len(),
            max_residual,
            tol,
            pass: max_residual <= tol,
            seed,
        }
    }
}

/// phi(t) = sum t^k/(2k+1)!: sinh(s)/s on the positive axis, sin(s)/s on
/// the negative one.
fn phi(t: f64) -> f64 {
    if t.abs() < 1e-6 {
        1.0 + t / 6.0 + t * t / 120.0
    } else if t > 0.0 {
        let s = t.sqrt();
        s.sinh() / s
    } else {
        let s = (-t).sqrt();
        s.sin() / s
    }
}

/// The differential of Exp at v, as the operator E_v = phi(ad(v)^2) on the
/// tangent coordinates. For p*-tagged v the square has nonpositive
/// spectrum and E_v degenerates at the cut locus.
pub fn jacobi_operator(sp: &HermitianSpace, v: &AlgVec) -> Result<DMatrix<f64>> {
    let m = &sp.model;
    m.same_model(v)?;
    let vp = retag(v, Home::P);
    let a = m.ad_operator(&vp);
    let mut sq = m.restrict_p(&(&a * &a));
    if v.home == Home::PStar {
        sq = -sq;
    } else if v.home != Home::P {
        return Err(HssntError::BadInput(
            "jacobi_operator expects a p- or p*-tagged vector".into(),
        ));
    }
    let e = linalg::spectral_map(&sq, phi, |_| true).expect("no guard");
    // invertibility: on p always; on p* only strictly inside the cut cube
    let (vals, _) = linalg::sym_eigen(&e);
    let min = vals.iter().cloned().fold(f64::INFINITY, |a, b| a.min(b.abs()));
    if min < m.tol.eig_floor.max(1e-9) {
        return Err(HssntError::SingularJacobi(min));
    }
    Ok(e)
}

/// The Kähler pair pulled back to the chart at base point v.
#[derive(Debug, Clone)]
pub struct ChartKahler {
    pub e_op: DMatrix<f64>,
    pub j_chart: DMatrix<f64>,
    pub omega_chart: DMatrix<f64>,
}

impl ChartKahler {
    pub fn at(sp: &HermitianSpace, v: &AlgVec) -> Result<Self> {
        let e_op = jacobi_operator(sp, v)?;
        let e_inv = e_op
            .clone()
            .try_inverse()
            .ok_or(HssntError::SingularJacobi(0.0))?;
        let j_chart = &e_inv * &sp.kahler.j0 * &e_op;
        // omega_chart(u, w) = omega_o(E u, E w)
        let omega_chart = e_op.transpose() * &sp.kahler.omega0 * &e_op;
        let dev = linalg::max_abs(
            &(&j_chart * &j_chart + DMatrix::identity(j_chart.nrows(), j_chart.ncols())),
        );
        if dev > 1e-9 {
            return Err(HssntError::SingularJacobi(dev));
        }
        Ok(ChartKahler {
            e_op,
            j_chart,
            omega_chart,
        })
    }
}

/// Fourth-order central difference of `map` at x along u, with Richardson
/// extrapolation over steps h and h/2.
pub fn differential_fd<F>(sp: &HermitianSpace, map: F, x: &AlgVec, u: &AlgVec) -> Result<AlgVec>
where
    F: Fn(&AlgVec) -> Result<AlgVec>,
{
    let m = &sp.model;
    let h0 = 1e-4 * m.norm(x).max(1.0);
    let stencil = |h: f64| -> Result<AlgVec> {
        let shift = |c: f64| -> Result<AlgVec> {
            let pt = crate::algebra::add(x, &crate::algebra::scale(u, c * h));
            map(&pt)
        };
        let f2 = shift(2.0)?;
        let f1 = shift(1.0)?;
        let fm1 = shift(-1.0)?;
        let fm2 = shift(-2.0)?;
        let mut out = m.zero(f1.home);
        out.coeffs = (-&f2.coeffs + &f1.coeffs * 8.0 - &fm1.coeffs * 8.0 + &fm2.coeffs)
            / (12.0 * h);
        Ok(out)
    };
    let d1 = stencil(h0)?;
    let d2 = stencil(h0 / 2.0)?;
    let mut out = m.zero(d2.home);
    out.coeffs = (&d2.coeffs * 16.0 - &d1.coeffs) / 15.0;
    Ok(out)
}

/// How to differentiate a realization map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffMode {
    FiniteDiff,
    ExactAxis,
}

/// Chart differential of the strongly diagonal map for `eta` at the
/// abelian point with the given H~ coefficients, along `u`. The two modes
/// measure the same object and agree within the finite-difference budget.
pub fn differential(
    sp: &HermitianSpace,
    eta: &OddMap,
    v_coeffs: &[f64],
    u: &AlgVec,
    mode: DiffMode,
) -> Result<AlgVec> {
    match mode {
        DiffMode::FiniteDiff => {
            let v = sp.roots.from_a_coeffs(&sp.model, v_coeffs);
            differential_fd(sp, |x| realize::odd_calculus(sp, x, eta), &v, u)
        }
        DiffMode::ExactAxis => differential_exact_axis(sp, eta, v_coeffs, u),
    }
}

fn principal_guard(sp: &HermitianSpace, v: &AlgVec) -> Result<()> {
    let cut = sp.model.tol.principal_rel * sp.model.norm(v);
    for (i, rt) in sp.roots.roots.iter().enumerate() {
        let val = sp.roots.root_value(&sp.model, i, v).abs();
        if val <= cut {
            return Err(HssntError::NonPrincipalPoint(rt.class.label(), val));
        }
    }
    Ok(())
}

/// Exact chart differential of the strongly diagonal map at a principal
/// point v in a, along a direction u lying in a or in a single p_alpha.
/// Composes the exact push formulas for exp_* and (Omega_eta)_* with the
/// Jacobi factor, so it measures the same object as `differential_fd`.
pub fn differential_exact_axis(
    sp: &HermitianSpace,
    eta: &OddMap,
    v_coeffs: &[f64],
    u: &AlgVec,
) -> Result<AlgVec> {
    let m = &sp.model;
    let v = sp.roots.from_a_coeffs(m, v_coeffs);
    principal_guard(sp, &v)?;
    let w_coeffs: Vec<f64> = v_coeffs.iter().map(|&x| eta.eval(x)).collect();
    let w = sp.roots.from_a_coeffs(m, &w_coeffs);

    // direction inside a: diagonal derivative factors eta'(x_i)
    let a_proj: f64 = sp
        .roots
        .a_basis
        .iter()
        .map(|a| m.inner(a, u).powi(2))
        .sum::<f64>()
        .sqrt();
    let u_norm = m.norm(u);
    if (a_proj - u_norm).abs() < 1e-9 * u_norm.max(1.0) {
        let cs = sp.roots.a_coeffs(m, u);
        let out: Vec<f64> = cs
            .iter()
            .zip(v_coeffs.iter())
            .map(|(&c, &x)| c * eta.deriv(x))
            .collect();
        return Ok(sp.roots.from_a_coeffs(m, &out));
    }
    // direction inside a single root space
    for (i, rt) in sp.roots.roots.iter().enumerate() {
        let proj = linalg::project_onto(&rt.p_basis, &u.coeffs);
        if (proj.norm() - u_norm).abs() < 1e-9 * u_norm.max(1.0) {
            let av = sp.roots.root_value(m, i, &v);
            let aw = sp.roots.root_value(m, i, &w);
            // (Omega_eta)_* (exp v)_* = alpha(w)/sinh(alpha(v)) on p_alpha,
            // and dExp contributes sinh(alpha(v))/alpha(v)
            let push = aw / av.sinh();
            let jacobi = av.sinh() / av;
            return Ok(crate::algebra::scale(u, push * jacobi));
        }
    }
    Err(HssntError::BadInput(
        "direction must lie in a or in a single restricted root space".into(),
    ))
}

/// The block scalar G of the induced complex structure at w = Omega_eta(v).
pub fn evaluate_g(
    sp: &HermitianSpace,
    eta: &OddMap,
    class: RootClass,
    v_coeffs: &[f64],
) -> Result<f64> {
    let v = sp.roots.from_a_coeffs(&sp.model, v_coeffs);
    principal_guard(sp, &v)?;
    Ok(match class {
        RootClass::Gamma(i) => {
            let x = v_coeffs[i];
            eta.deriv(x) / eta.eval(x) * (2.0 * x).sinh() / 2.0
        }
        RootClass::Lambda(i, j) => {
            let (xi, xj) = (v_coeffs[i], v_coeffs[j]);
            let (wi, wj) = (eta.eval(xi), eta.eval(xj));
            (wi - wj) / (wi + wj) * (xi + xj).sinh() / (xi - xj).sinh()
        }
        RootClass::Epsilon(_) => 1.0,
        RootClass::LambdaBar(..) => {
            return Err(HssntError::BadInput(
                "evaluate G on the Lambda member of the pair".into(),
            ))
        }
    })
}

/// The block scalar F of the induced symplectic form at w = Omega_eta(v).
pub fn evaluate_f(
    sp: &HermitianSpace,
    eta: &OddMap,
    class: RootClass,
    v_coeffs: &[f64],
) -> Result<f64> {
    let v = sp.roots.from_a_coeffs(&sp.model, v_coeffs);
    principal_guard(sp, &v)?;
    Ok(match class {
        RootClass::Gamma(i) => {
            let x = v_coeffs[i];
            1.0 / (eta.deriv(x) * eta.eval(x)) * (2.0 * x).sinh() / 2.0
        }
        RootClass::Lambda(i, j) => {
            let (xi, xj) = (v_coeffs[i], v_coeffs[j]);
            let (wi, wj) = (eta.eval(xi), eta.eval(xj));
            (xi + xj).sinh() * (xi - xj).sinh() / ((wi + wj) * (wi - wj))
        }
        RootClass::Epsilon(i) => {
            let x = v_coeffs[i];
            x.sinh() * x.sinh() / (eta.eval(x) * eta.eval(x))
        }
        RootClass::LambdaBar(..) => {
            return Err(HssntError::BadInput(
                "evaluate F on the Lambda member of the pair".into(),
            ))
        }
    })
}

fn cut_cube_guard(v_coeffs: &[f64]) -> Result<()> {
    for &x in v_coeffs {
        if x.abs() >= std::f64::consts::FRAC_PI_2 {
            return Err(HssntError::OutsideCutLocus(x.abs()));
        }
    }
    Ok(())
}

/// Dual-side block scalar G*: the sine replaces the hyperbolic sine.
pub fn evaluate_g_star(
    sp: &HermitianSpace,
    eta_star: &OddMap,
    class: RootClass,
    v_coeffs: &[f64],
) -> Result<f64> {
    cut_cube_guard(v_coeffs)?;
    let v = sp.roots.from_a_coeffs(&sp.model, v_coeffs);
    principal_guard(sp, &v)?;
    Ok(match class {
        RootClass::Gamma(i) => {
            let x = v_coeffs[i];
            eta_star.deriv(x) / eta_star.eval(x) * (2.0 * x).sin() / 2.0
        }
        RootClass::Lambda(i, j) => {
            let (xi, xj) = (v_coeffs[i], v_coeffs[j]);
            let (wi, wj) = (eta_star.eval(xi), eta_star.eval(xj));
            (wi - wj) / (wi + wj) * (xi + xj).sin() / (xi - xj).sin()
        }
        RootClass::Epsilon(_) => 1.0,
        RootClass::LambdaBar(..) => {
            return Err(HssntError::BadInput(
                "evaluate G* on the Lambda member of the pair".into(),
            ))
        }
    })
}

pub fn evaluate_f_star(
    sp: &HermitianSpace,
    eta_star: &OddMap,
    class: RootClass,
    v_coeffs: &[f64],
) -> Result<f64> {
    cut_cube_guard(v_coeffs)?;
    let v = sp.roots.from_a_coeffs(&sp.model, v_coeffs);
    principal_guard(sp, &v)?;
    Ok(match class {
        RootClass::Gamma(i) => {
            let x = v_coeffs[i];
            1.0 / (eta_star.deriv(x) * eta_star.eval(x)) * (2.0 * x).sin() / 2.0
        }
        RootClass::Lambda(i, j) => {
            let (xi, xj) = (v_coeffs[i], v_coeffs[j]);
            let (wi, wj) = (eta_star.eval(xi), eta_star.eval(xj));
            (xi + xj).sin() * (xi - xj).sin() / ((wi + wj) * (wi - wj))
        }
        RootClass::Epsilon(i) => {
            let x = v_coeffs[i];
            x.sin() * x.sin() / (eta_star.eval(x) * eta_star.eval(x))
        }
        RootClass::LambdaBar(..) => {
            return Err(HssntError::BadInput(
                "evaluate F* on the Lambda member of the pair".into(),
            ))
        }
    })
}

/// Closure type for maps handed to the certification loops.
pub type DynMap<'a> = Box<dyn Fn(&AlgVec) -> Result<AlgVec> + Sync + 'a>;

/// A named map under verification.
pub struct MapUnderTest<'a> {
    pub name: String,
    pub apply: DynMap<'a>,
}

impl<'a> MapUnderTest<'a> {
    pub fn odd(sp: &'a HermitianSpace, eta: &'a OddMap) -> Self {
        MapUnderTest {
            name: format!("omega[{}]", eta.name),
            apply: Box::new(move |x| realize::odd_calculus(sp, x, eta)),
        }
    }

    pub fn identity() -> Self {
        MapUnderTest {
            name: "identity".into(),
            apply: Box::new(|x| Ok(x.clone())),
        }
    }
}

fn run_samples<F>(n: usize, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> f64 + Sync,
{
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample::sample_rng(seed, i);
            f(&mut rng)
        })
        .collect()
}

/// Checks dmap ∘ J_chart = target_J ∘ dmap on random principal chart
/// points with random tangent directions.
pub fn check_holomorphic(
    sp: &HermitianSpace,
    map: &MapUnderTest,
    target_j: &DMatrix<f64>,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> VerifyReport {
    let m = &sp.model;
    let residuals = run_samples(n_samples, seed, |rng| {
        let x = sample::principal_chart_point(sp, rng, 1e-3, 2.0, m.tol.principal_rel);
        let chart = match ChartKahler::at(sp, &x) {
            Ok(c) => c,
            Err(_) => return f64::INFINITY,
        };
        let mut u = m.zero(Home::P);
        for i in 0..m.dim_p {
            use rand::RngExt;
            u.coeffs[m.dim_k + i] = rng.random::<f64>() * 2.0 - 1.0;
        }
        let un = m.norm(&u);
        u = crate::algebra::scale(&u, 1.0 / un);
        let ju = {
            let mut v = m.zero(Home::P);
            let img = &chart.j_chart * u.coeffs.rows(m.dim_k, m.dim_p);
            v.coeffs.rows_mut(m.dim_k, m.dim_p).copy_from(&img);
            v
        };
        let d_ju = match differential_fd(sp, &map.apply, &x, &ju) {
            Ok(v) => v,
            Err(_) => return f64::INFINITY,
        };
        let d_u = match differential_fd(sp, &map.apply, &x, &u) {
            Ok(v) => v,
            Err(_) => return f64::INFINITY,
        };
        let mut tj_du = m.zero(Home::P);
        let img = target_j * d_u.coeffs.rows(m.dim_k, m.dim_p);
        tj_du.coeffs.rows_mut(m.dim_k, m.dim_p).copy_from(&img);
        m.norm(&sub(&d_ju, &tj_du))
    });
    VerifyReport::from_residuals(
        &format!("holomorphic[{}]", map.name),
        &residuals,
        tol,
        seed,
    )
}

/// Checks target_omega(dmap u, dmap w) = omega_chart(u, w) on random
/// principal chart points.
pub fn check_symplectic(
    sp: &HermitianSpace,
    map: &MapUnderTest,
    target_omega: &DMatrix<f64>,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> VerifyReport {
    let m = &sp.model;
    let residuals = run_samples(n_samples, seed, |rng| {
        let x = sample::principal_chart_point(sp, rng, 1e-3, 2.0, m.tol.principal_rel);
        let chart = match ChartKahler::at(sp, &x) {
            Ok(c) => c,
            Err(_) => return f64::INFINITY,
        };
        use rand::RngExt;
        let mut dirs = Vec::new();
        for _ in 0..2 {
            let mut u = m.zero(Home::P);
            for i in 0..m.dim_p {
                u.coeffs[m.dim_k + i] = rng.random::<f64>() * 2.0 - 1.0;
            }
            let n = m.norm(&u);
            dirs.push(crate::algebra::scale(&u, 1.0 / n));
        }
        let (u, w) = (&dirs[0], &dirs[1]);
        let d_u = match differential_fd(sp, &map.apply, &x, u) {
            Ok(v) => v,
            Err(_) => return f64::INFINITY,
        };
        let d_w = match differential_fd(sp, &map.apply, &x, w) {
            Ok(v) => v,
            Err(_) => return f64::INFINITY,
        };
        let us = u.coeffs.rows(m.dim_k, m.dim_p).into_owned();
        let ws = w.coeffs.rows(m.dim_k, m.dim_p).into_owned();
        let dus = d_u.coeffs.rows(m.dim_k, m.dim_p).into_owned();
        let dws = d_w.coeffs.rows(m.dim_k, m.dim_p).into_owned();
        let lhs = (dus.transpose() * target_omega * dws)[(0, 0)];
        let rhs = (us.transpose() * &chart.omega_chart * ws)[(0, 0)];
        (lhs - rhs).abs()
    });
    VerifyReport::from_residuals(
        &format!("symplectic[{}]", map.name),
        &residuals,
        tol,
        seed,
    )
}

/// Checks map(Ad(exp Z) x) = Ad(exp Z) map(x) on random points.
pub fn check_equivariance(
    sp: &HermitianSpace,
    map: &MapUnderTest,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> VerifyReport {
    check_equivariance_in(sp, map, 0.05, 1.8, n_samples, seed, tol)
}

/// Equivariance check with an explicit spectral-value sampling range, for
/// maps restricted to a bounded domain.
pub fn check_equivariance_in(
    sp: &HermitianSpace,
    map: &MapUnderTest,
    lo: f64,
    hi: f64,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> VerifyReport {
    let m = &sp.model;
    let residuals = run_samples(n_samples, seed, |rng| {
        use rand::RngExt;
        let x = sample::chart_point(sp, rng, lo, hi);
        let znorm = 0.2 + rng.random::<f64>();
        let z = sample::k_element(sp, rng, znorm);
        let moved = m.adjoint_action(&z, &x).expect("Z in k");
        let lhs = match (map.apply)(&moved) {
            Ok(v) => v,
            Err(_) => return f64::INFINITY,
        };
        let img = match (map.apply)(&x) {
            Ok(v) => v,
            Err(_) => return f64::INFINITY,
        };
        let rhs = m.adjoint_action(&z, &img).expect("Z in k");
        m.norm(&sub(&lhs, &rhs)) / m.norm(&img).max(1.0)
    });
    VerifyReport::from_residuals(
        &format!("equivariance[{}]", map.name),
        &residuals,
        tol,
        seed,
    )
}

/// Weyl-equivariance of a general h-map over the signed-permutation action
/// on a: detects symbols violating the parity conditions (an ill-defined
/// global map).
pub fn check_weyl_equivariance(
    sp: &HermitianSpace,
    h: &realize::GeneralHMap,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> VerifyReport {
    let m = &sp.model;
    let r = sp.rank();
    // generator words: one reflection per positive root
    let gens: Vec<usize> = (0..sp.roots.roots.len()).collect();
    let residuals = run_samples(n_samples, seed, |rng| {
        let x = sample::abelian_coeffs(sp, rng, 0.05, 1.2);
        let mut worst: f64 = 0.0;
        for &g in &gens {
            let (perm, signs) = match sp.roots.weyl_signed_permutation(m, &[g]) {
                Ok(ps) => ps,
                Err(_) => return f64::INFINITY,
            };
            // rho x in coefficients: (rho x)_{perm[j]} = signs[j] x_j
            let mut rx = vec![0.0; r];
            for j in 0..r {
                rx[perm[j]] = signs[j] * x[j];
            }
            let lhs = match realize::general_h_map(sp, h, &rx) {
                Ok(v) => v,
                Err(_) => return f64::INFINITY,
            };
            let hx = match realize::general_h_map(sp, h, &x) {
                Ok(v) => v,
                Err(_) => return f64::INFINITY,
            };
            let hx_c = sp.roots.a_coeffs(m, &hx);
            let mut rhx = vec![0.0; r];
            for j in 0..r {
                rhx[perm[j]] = signs[j] * hx_c[j];
            }
            let rhs = sp.roots.from_a_coeffs(m, &rhx);
            worst = worst.max(m.norm(&sub(&lhs, &rhs)));
        }
        worst
    });
    VerifyReport::from_residuals(
        &format!("weyl-equivariance[{}]", h.name),
        &residuals,
        tol,
        seed,
    )
}

/// Cross-validation of the G/F block scalars against finite-difference
/// pullbacks of Omega_eta at principal abelian points: the module's core
/// self-check.
pub fn cross_validate_gf(
    sp: &HermitianSpace,
    eta: &OddMap,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> (VerifyReport, VerifyReport) {
    let m = &sp.model;
    let lo = 0.15;
    let hi = eta.radius().min(2.0) * 0.6;
    let results: Vec<(f64, f64)> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample::sample_rng(seed, i);
            let v_coeffs = sample::principal_coeffs(sp, &mut rng, lo, hi, m.tol.principal_rel);
            gf_residual_at(sp, eta, &v_coeffs).unwrap_or((f64::INFINITY, f64::INFINITY))
        })
        .collect();
    let g_res: Vec<f64> = results.iter().map(|r| r.0).collect();
    let f_res: Vec<f64> = results.iter().map(|r| r.1).collect();
    (
        VerifyReport::from_residuals(&format!("G-blocks[{}]", eta.name), &g_res, tol, seed),
        VerifyReport::from_residuals(&format!("F-blocks[{}]", eta.name), &f_res, tol, seed),
    )
}

fn gf_residual_at(sp: &HermitianSpace, eta: &OddMap, v_coeffs: &[f64]) -> Result<(f64, f64)> {
    let m = &sp.model;
    let v = sp.roots.from_a_coeffs(m, v_coeffs);
    let chart = ChartKahler::at(sp, &v)?;
    // dense chart differential of the realization at v
    let map = |x: &AlgVec| realize::odd_calculus(sp, x, eta);
    let mut d = DMatrix::zeros(m.dim_p, m.dim_p);
    for j in 0..m.dim_p {
        let e = m.basis_vec(m.dim_k + j);
        let col = differential_fd(sp, map, &v, &e)?;
        d.set_column(j, &col.coeffs.rows(m.dim_k, m.dim_p));
    }
    let d_inv = d
        .clone()
        .try_inverse()
        .ok_or_else(|| HssntError::BadInput("singular realization differential".into()))?;
    // induced structures at w: J_w = D J_chart D^{-1},
    // omega_w(u1,u2) = omega_chart(D^{-1} u1, D^{-1} u2)
    let j_w = &d * &chart.j_chart * &d_inv;
    let omega_w = d_inv.transpose() * &chart.omega_chart * &d_inv;

    let mut g_dev: f64 = 0.0;
    let mut f_dev: f64 = 0.0;
    let mut check_class = |class: RootClass, basis: &DMatrix<f64>| -> Result<()> {
        let g = evaluate_g(sp, eta, class, v_coeffs)?;
        let f = evaluate_f(sp, eta, class, v_coeffs)?;
        for col in basis.column_iter() {
            let x = col.rows(m.dim_k, m.dim_p).into_owned();
            let j0x = &sp.kahler.j0 * &x;
            // J_w X = G J_o X on p_alpha
            let jx = &j_w * &x;
            g_dev = g_dev.max((&jx - &j0x * g).norm());
            // omega_w(X, J_o X) = F omega_o(X, J_o X)
            let lhs = (x.transpose() * &omega_w * &j0x)[(0, 0)];
            let rhs = f * (x.transpose() * &sp.kahler.omega0 * &j0x)[(0, 0)];
            f_dev = f_dev.max((lhs - rhs).abs());
        }
        Ok(())
    };
    for (i, &gi) in sp.roots.gamma_idx.iter().enumerate() {
        let _ = i;
        let rt = &sp.roots.roots[gi];
        check_class(rt.class, &rt.p_basis)?;
    }
    for &(l, _) in &sp.roots.lambda_pairs {
        let rt = &sp.roots.roots[l];
        check_class(rt.class, &rt.p_basis)?;
    }
    for &e in &sp.roots.epsilon_idx {
        let rt = &sp.roots.roots[e];
        check_class(rt.class, &rt.p_basis)?;
    }
    Ok((g_dev, f_dev))
}

/// Grid residuals of the uniqueness ODEs on [0.1, 2] (clipped to the
/// domain): the first vanishes iff eta is a multiple of tanh, the second
/// iff eta = ±sinh.
pub fn uniqueness_residuals(eta: &OddMap) -> (f64, f64) {
    let hi = (eta.radius() * 0.95).min(2.0);
    let mut r1: f64 = 0.0;
    let mut r2: f64 = 0.0;
    let n = 191;
    for k in 0..n {
        let x = 0.1 + (hi - 0.1) * k as f64 / (n - 1) as f64;
        if x >= hi {
            break;
        }
        let s = (2.0 * x).sinh() / 2.0;
        let e = eta.eval(x);
        let de = eta.deriv(x);
        r1 = r1.max((de / e * s - 1.0).abs());
        r2 = r2.max((s / (de * e) - 1.0).abs());
    }
    (r1, r2)
}
