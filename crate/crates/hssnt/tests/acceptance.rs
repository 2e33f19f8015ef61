//! Acceptance suite: every release gate runs here at its stated tolerance
//! and prints one pass/fail line (visible with `cargo test -- --nocapture`).

use std::time::Instant;

use hssnt::algebra::{retag, scale, sub, Home, SpaceSpec};
use hssnt::geomverify::{self, MapUnderTest};
use hssnt::oddmap::{builtin_odd, OddMap, BUILTIN_NAMES};
use hssnt::roots::RootClass;
use hssnt::{cli, dual, realize, sample, tgeo, HermitianSpace};

fn space(s: &str) -> HermitianSpace {
    HermitianSpace::build(SpaceSpec::parse(s).unwrap()).unwrap()
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "{} criterion {criterion}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_01_classification() {
    let t0 = Instant::now();
    let expected = [
        ("su:1,1", 1, "C1"),
        ("su:2,2", 2, "C2"),
        ("su:1,2", 1, "BC1"),
        ("su:2,3", 2, "BC2"),
        ("sp:2", 2, "C2"),
        ("sp:3", 3, "C3"),
    ];
    let mut ok = true;
    for (spec, rank, ty) in expected {
        let rep = cli::cmd_describe(spec).unwrap();
        ok &= rep.rank == rank && rep.sys_type == ty;
    }
    let secs = t0.elapsed().as_secs_f64();
    report(
        "1 (classification)",
        ok && secs < 5.0,
        &format!("6 spaces classified in {secs:.2}s"),
    );
}

#[test]
fn criterion_02_root_kahler_structure() {
    let mut worst: f64 = 0.0;
    for name in ["su:2,2", "sp:2"] {
        let sp = space(name);
        let m = &sp.model;
        let c = sp.c_const();
        // <H_i, H_j> = C delta_ij
        for (i, hi) in sp.roots.h.iter().enumerate() {
            for (j, hj) in sp.roots.h.iter().enumerate() {
                let target = if i == j { c } else { 0.0 };
                worst = worst.max((m.inner(hi, hj) - target).abs());
            }
        }
        for i in 0..sp.rank() {
            // ||Z_i^k||^2 = 1/C
            worst = worst.max((m.inner(&sp.kahler.z_k[i], &sp.kahler.z_k[i]) - 1.0 / c).abs());
            let ht = &sp.roots.h_tilde[i];
            let jht = sp.kahler.apply_j0(m, ht);
            // J H~ = 2 Z^p, [Z^k, Z^p] = H~/2, [H~, Z^k] = 2 Z^p, [H~, Z^p] = 2 Z^k
            worst = worst.max(sub(&jht, &scale(&sp.kahler.z_p[i], 2.0)).norm_inf());
            worst = worst.max(
                sub(
                    &m.bracket(&sp.kahler.z_k[i], &sp.kahler.z_p[i]).unwrap(),
                    &scale(ht, 0.5),
                )
                .norm_inf(),
            );
            worst = worst.max(
                sub(
                    &m.bracket(ht, &sp.kahler.z_k[i]).unwrap(),
                    &scale(&sp.kahler.z_p[i], 2.0),
                )
                .norm_inf(),
            );
            worst = worst.max(
                sub(
                    &m.bracket(ht, &sp.kahler.z_p[i]).unwrap(),
                    &scale(&sp.kahler.z_k[i], 2.0),
                )
                .norm_inf(),
            );
            // [[H~, J H~], J H~] = 4 H~ and [[H~, J H~], H~] = -4 J H~
            let w = m.bracket(ht, &jht).unwrap();
            worst = worst.max(sub(&m.bracket(&w, &jht).unwrap(), &scale(ht, 4.0)).norm_inf());
            worst = worst.max(
                hssnt::algebra::add(&m.bracket(&w, ht).unwrap(), &scale(&jht, 4.0)).norm_inf(),
            );
        }
        let jrep = hssnt::kahler::verify_j_mapping(m, &sp.roots, &sp.kahler);
        worst = worst.max(jrep.max_residual);
    }
    report(
        "2 (root/Kahler structure)",
        worst < 1e-10,
        &format!("max residual {worst:.3e} on su(2,2) and sp(2,R), tol 1e-10"),
    );
}

#[test]
fn criterion_03_analytic_holo_symp() {
    let tanh = builtin_odd("tanh").unwrap();
    let sinh = builtin_odd("sinh").unwrap();
    let mut worst: f64 = 0.0;
    let mut count = 0usize;
    for name in ["su:2,2", "su:2,3", "sp:2"] {
        let sp = space(name);
        let mut classes: Vec<RootClass> = sp
            .roots
            .gamma_idx
            .iter()
            .map(|&i| sp.roots.roots[i].class)
            .collect();
        classes.extend(
            sp.roots
                .lambda_pairs
                .iter()
                .map(|&(l, _)| sp.roots.roots[l].class),
        );
        classes.extend(sp.roots.epsilon_idx.iter().map(|&e| sp.roots.roots[e].class));
        let mut rng = sample::sample_rng(301, 0);
        for _ in 0..100 {
            let v = sample::principal_coeffs(&sp, &mut rng, 0.05, 1.5, 1e-3);
            for &class in &classes {
                let g = geomverify::evaluate_g(&sp, &tanh, class, &v).unwrap();
                let f = geomverify::evaluate_f(&sp, &sinh, class, &v).unwrap();
                worst = worst.max((g - 1.0).abs()).max((f - 1.0).abs());
                count += 2;
            }
        }
    }
    report(
        "3 (analytic G/F identities)",
        worst < 1e-9,
        &format!("{count} evaluations across 3 spaces, max |G-1|,|F-1| = {worst:.3e}, tol 1e-9"),
    );
}

#[test]
fn criterion_04_numerical_holo_symp() {
    let sp = space("su:2,2");
    let tanh = builtin_odd("tanh").unwrap();
    let sinh = builtin_odd("sinh").unwrap();
    let psi = MapUnderTest::odd(&sp, &tanh);
    let phi = MapUnderTest::odd(&sp, &sinh);
    let holo = geomverify::check_holomorphic(&sp, &psi, &sp.kahler.j0, 20, 401, 1e-5);
    let symp = geomverify::check_symplectic(&sp, &phi, &sp.kahler.omega0, 20, 403, 1e-5);
    let neg_symp = geomverify::check_symplectic(&sp, &psi, &sp.kahler.omega0, 20, 405, 1e-5);
    let neg_holo = geomverify::check_holomorphic(&sp, &phi, &sp.kahler.j0, 20, 407, 1e-5);
    let ok = holo.pass && symp.pass && !neg_symp.pass && !neg_holo.pass;
    report(
        "4 (numerical holo/symp with negative controls)",
        ok,
        &format!(
            "holo {:.3e}, symp {:.3e}; controls fail as required ({:.3e}, {:.3e}), tol 1e-5",
            holo.max_residual, symp.max_residual, neg_symp.max_residual, neg_holo.max_residual
        ),
    );
}

#[test]
fn criterion_05_dual_analytic() {
    let sp = space("su:2,2");
    let tan = builtin_odd("tan").unwrap();
    let sin = builtin_odd("sin").unwrap();
    let hi = std::f64::consts::FRAC_PI_2 - 0.1;
    let mut worst: f64 = 0.0;
    let mut rng = sample::sample_rng(501, 0);
    for _ in 0..100 {
        let v = sample::principal_coeffs(&sp, &mut rng, 0.05, hi, 1e-3);
        for class in [
            RootClass::Gamma(0),
            RootClass::Gamma(1),
            RootClass::Lambda(0, 1),
        ] {
            let g = geomverify::evaluate_g_star(&sp, &tan, class, &v).unwrap();
            let f = geomverify::evaluate_f_star(&sp, &sin, class, &v).unwrap();
            worst = worst.max((g - 1.0).abs()).max((f - 1.0).abs());
        }
    }
    report(
        "5 (dual analytic G*/F* identities)",
        worst < 1e-9,
        &format!("100 principal points inside the cut cube, max deviation {worst:.3e}, tol 1e-9"),
    );
}

#[test]
fn criterion_06_dsl_roos_agreement() {
    let sp = space("su:2,2");
    let eta = builtin_odd("sinh_artanh").unwrap();
    let mut rng = sample::sample_rng(601, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let z = sample::chart_point(&sp, &mut rng, 0.02, 0.95);
        let a = realize::dsl_roos_map(&sp, &z).unwrap();
        let b = realize::odd_calculus(&sp, &z, &eta).unwrap();
        worst = worst.max(sp.model.norm(&sub(&a, &b)));
    }
    report(
        "6 (Bergman-operator realization agreement)",
        worst <= 1e-8,
        &format!("50 random bounded-domain points, max gap {worst:.3e}, tol 1e-8"),
    );
}

#[test]
fn criterion_07_gudermann_duality() {
    let sp = space("su:2,2");
    let tan = builtin_odd("tan").unwrap();
    let sin = builtin_odd("sin").unwrap();
    let tanh = builtin_odd("tanh").unwrap();
    let sinh = builtin_odd("sinh").unwrap();
    let mut rng = sample::sample_rng(701, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let x = sample::chart_point(&sp, &mut rng, 0.05, 2.0);
        let g = realize::gudermann_composite(&sp, &x).unwrap();
        // dual holomorphic map recovers the sinh-path, dual symplectic the tanh-path
        let lhs = dual::omega_eta_star(&sp, &g, &tan).unwrap();
        let phi = retag(&realize::odd_calculus(&sp, &x, &sinh).unwrap(), Home::PStar);
        worst = worst.max(sub(&lhs, &phi).norm_inf());
        let lhs = dual::omega_eta_star(&sp, &g, &sin).unwrap();
        let psi = retag(&realize::odd_calculus(&sp, &x, &tanh).unwrap(), Home::PStar);
        worst = worst.max(sub(&lhs, &psi).norm_inf());
    }
    report(
        "7 (Gudermannian duality round trips)",
        worst < 1e-9,
        &format!("both composite identities on 50 points, max residual {worst:.3e}, tol 1e-9"),
    );
}

#[test]
fn criterion_08_diastatic_round_trips() {
    let sp = space("su:2,2");
    let mut rng = sample::sample_rng(801, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let z = sample::chart_point(&sp, &mut rng, 0.02, 0.9);
        let back = realize::diastatic_exp(&sp, &realize::diastatic_log(&sp, &z).unwrap()).unwrap();
        worst = worst.max(sub(&back, &z).norm_inf());
        // dual pair inside the cut cube
        let coeffs = sample::abelian_coeffs(&sp, &mut rng, 0.02, 1.4);
        let v = sp.roots.from_a_coeffs(&sp.model, &coeffs);
        let vs = retag(&v, Home::PStar);
        let img = dual::omega_eta_star(&sp, &vs, &realize::diastatic_log_dual_eta()).unwrap();
        let back = realize::odd_calculus(
            &sp,
            &retag(&img, Home::P),
            &realize::diastatic_exp_dual_eta(),
        )
        .unwrap();
        worst = worst.max(sub(&back, &v).norm_inf());
    }
    report(
        "8 (diastatic exp/log inverses, primal and dual)",
        worst < 1e-9,
        &format!("50 round trips each side, max residual {worst:.3e}, tol 1e-9"),
    );
}

#[test]
fn criterion_09_clts_grid_equivalences() {
    let grid = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let etas = [
        builtin_odd("sinh").unwrap(),
        builtin_odd("tanh").unwrap(),
        builtin_odd("loi_mossa").unwrap(),
    ];
    let mut cells_total = 0usize;
    let mut disagreements = 0usize;
    for name in ["su:2,2", "sp:2", "su:2,3"] {
        let sp = space(name);
        let cells = tgeo::grid_equivalence(&sp, &grid, &etas, 4, 901).unwrap();
        cells_total += cells.len();
        for cell in &cells {
            if cell.clts != cell.lts || cell.clts != cell.abra {
                disagreements += 1;
            }
            for &p in &cell.restriction_pass {
                if p != cell.clts {
                    disagreements += 1;
                }
            }
        }
    }
    report(
        "9 (CLTS/LTS/bracket/restriction equivalences)",
        disagreements == 0,
        &format!("{cells_total} grid subspaces across 3 rank-2 spaces, {disagreements} disagreements"),
    );
}

#[test]
fn criterion_10_equivariance() {
    let sp = space("su:2,2");
    let tanh = builtin_odd("tanh").unwrap();
    let sinh = builtin_odd("sinh").unwrap();
    let lm = builtin_odd("loi_mossa").unwrap();
    let gd = builtin_odd("gd").unwrap();
    let mut reports = Vec::new();
    for eta in [&tanh, &sinh, &lm, &gd] {
        let map = MapUnderTest::odd(&sp, eta);
        reports.push(geomverify::check_equivariance(&sp, &map, 100, 1001, 1e-9));
    }
    // bounded-domain maps sampled inside the unit spectral ball
    let dl = MapUnderTest {
        name: "diastatic_log".into(),
        apply: Box::new(|x| realize::diastatic_log(&sp, x)),
    };
    reports.push(geomverify::check_equivariance_in(
        &sp, &dl, 0.02, 0.9, 100, 1003, 1e-9,
    ));
    let dsl = MapUnderTest {
        name: "dsl_roos".into(),
        apply: Box::new(|x| realize::dsl_roos_map(&sp, x)),
    };
    reports.push(geomverify::check_equivariance_in(
        &sp, &dsl, 0.02, 0.9, 100, 1005, 1e-9,
    ));
    let all_pass = reports.iter().all(|r| r.pass);
    let worst = reports
        .iter()
        .map(|r| r.max_residual)
        .fold(0.0f64, f64::max);
    // a symbol violating the parity conditions must be flagged
    let bad = realize::GeneralHMap::new("x1+x2", 2, |x: &[f64]| x[0] + x[1]);
    let flagged = !geomverify::check_weyl_equivariance(&sp, &bad, 20, 1007, 1e-9).pass;
    report(
        "10 (equivariance of named maps + ill-defined symbol detection)",
        all_pass && flagged,
        &format!(
            "6 maps x 100 conjugations, max residual {worst:.3e}, tol 1e-9; bad symbol flagged: {flagged}"
        ),
    );
}

#[test]
fn criterion_11_uniqueness_ode() {
    let mut ok = true;
    let mut lines = Vec::new();
    for name in BUILTIN_NAMES {
        let eta: OddMap = builtin_odd(name).unwrap();
        let (r1, r2) = geomverify::uniqueness_residuals(&eta);
        let good = match name {
            "tanh" => r1 < 1e-12 && r2 >= 1e-3,
            "sinh" => r2 < 1e-12 && r1 >= 1e-3,
            _ => r1 >= 1e-3 && r2 >= 1e-3,
        };
        if !good {
            lines.push(format!("{name}: r1={r1:.3e} r2={r2:.3e}"));
        }
        ok &= good;
    }
    report(
        "11 (uniqueness ODE isolates tanh and sinh)",
        ok,
        &if lines.is_empty() {
            "grid residuals vanish only for tanh (holomorphic) and sinh (symplectic)".to_string()
        } else {
            lines.join("; ")
        },
    );
}
