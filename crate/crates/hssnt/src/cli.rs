//! Command-line front end: model description, realization evaluation,
//! verification suites and grid export.
//!
//! Exit codes: 0 success (all checks pass), 1 a verification check failed,
//! 2 bad input, 3 model construction failure, 4 point outside the domain
//! of the requested map. Machine output goes to stdout, human summaries to
//! stderr.

use std::io::Write;

use clap::{Args, Parser, Subcommand};

use crate::algebra::{retag, AlgVec, Home, SpaceSpec};
use crate::dual;
use crate::error::{HssntError, Result};
use crate::geomverify::{self, MapUnderTest};
use crate::linalg;
use crate::oddmap::{builtin_odd, OddMap};
use crate::realize;
use crate::report::*;
use crate::roots::RootClass;
use crate::sample;
use crate::space::HermitianSpace;
use crate::tgeo;

#[derive(Debug, Parser)]
#[command(
    name = "hssnt",
    about = "Hermitian symmetric spaces of noncompact type: models, realizations, verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print rank, root-system type, multiplicities, C and dimensions.
    Describe(DescribeArgs),
    /// Evaluate a strongly diagonal realization at a point.
    Realize(RealizeArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Export a coordinate grid of the section map as CSV.
    Grid(GridArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Space spec, e.g. "su:2,2" or "sp:3".
    #[arg(long)]
    pub space: String,
    /// Write machine output to this path instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// Output format (json or csv where applicable).
    #[arg(long, default_value = "json")]
    pub format: String,
}

#[derive(Debug, Args)]
pub struct DescribeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct RealizeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Builtin odd function name.
    #[arg(long, default_value = "tanh")]
    pub eta: String,
    /// File with power-series coefficients (one a_k per line) and a
    /// "radius <r>" line; overrides --eta.
    #[arg(long)]
    pub eta_file: Option<std::path::PathBuf>,
    /// Comma-separated point: rank many a-coefficients in the H~ frame,
    /// or dim_p many full p-coefficients.
    #[arg(long)]
    pub point: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Suite: roots | kahler | polydisk | holo | symp | dual | bergman |
    /// duality | tgeo | all.
    #[arg(long)]
    pub suite: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Overrides every check tolerance in the suite.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Overrides the map under test in the holo/symp suites.
    #[arg(long)]
    pub eta: Option<String>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "tanh")]
    pub eta: String,
    #[arg(long)]
    pub eta_file: Option<std::path::PathBuf>,
    /// Two 1-based axis indices for rank >= 2 spaces, e.g. "1,2".
    #[arg(long, default_value = "1,2")]
    pub plane: String,
    /// Points per axis; 1 gives the single origin row.
    #[arg(long, default_value_t = 50)]
    pub resolution: usize,
    /// Half-width of the sampled square.
    #[arg(long, default_value_t = 3.0)]
    pub extent: f64,
}

/// Maps library errors onto the exit-code contract.
pub fn exit_code_for(err: &HssntError) -> i32 {
    match err {
        HssntError::InvalidSpec(_)
        | HssntError::BadInput(_)
        | HssntError::UnknownName(_)
        | HssntError::RankMismatch { .. }
        | HssntError::DependentInput => 2,
        HssntError::DomainExceeded { .. } | HssntError::OutsideCutLocus(_) => 4,
        _ => 3,
    }
}

fn write_output(common: &CommonArgs, text: &str, stdout: &mut impl Write) -> std::io::Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text),
        None => writeln!(stdout, "{text}").map(|_| ()),
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| HssntError::BadInput(format!("bad number '{t}'")))
        })
        .collect()
}

/// Loads an odd map from a series file: coefficient lines plus one
/// "radius <r>" line ("inf" allowed); '#' starts a comment.
pub fn load_eta_file(path: &std::path::Path) -> Result<OddMap> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HssntError::BadInput(format!("cannot read {}: {e}", path.display())))?;
    let mut coeffs = Vec::new();
    let mut radius = None;
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("radius") {
            let rest = rest.trim_start_matches(['=', ' ']).trim();
            radius = Some(if rest == "inf" {
                f64::INFINITY
            } else {
                rest.parse::<f64>()
                    .map_err(|_| HssntError::BadInput(format!("bad radius '{rest}'")))?
            });
        } else {
            coeffs.push(
                line.parse::<f64>()
                    .map_err(|_| HssntError::BadInput(format!("bad coefficient '{line}'")))?,
            );
        }
    }
    let radius =
        radius.ok_or_else(|| HssntError::BadInput("eta file is missing a radius line".into()))?;
    if coeffs.is_empty() {
        return Err(HssntError::BadInput("eta file has no coefficients".into()));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "user".into());
    Ok(OddMap::from_series(&name, coeffs, radius))
}

fn resolve_eta(name: &str, file: &Option<std::path::PathBuf>) -> Result<OddMap> {
    match file {
        Some(p) => load_eta_file(p),
        None => builtin_odd(name),
    }
}

pub fn cmd_describe(space: &str) -> Result<DescribeReport> {
    let spec = SpaceSpec::parse(space)?;
    let sp = HermitianSpace::build(spec)?;
    Ok(describe_space(&sp))
}

/// Report for an already-built space.
pub fn describe_space(sp: &HermitianSpace) -> DescribeReport {
    let spec = sp.model.spec;
    let (mg, ml, me) = sp.roots.multiplicities();
    let positive_roots = sp
        .roots
        .roots
        .iter()
        .map(|r| RootLine {
            label: r.class.label(),
            mult: r.mult,
        })
        .collect();
    DescribeReport {
        schema: SCHEMA,
        space: spec.name(),
        family: match spec.family() {
            crate::algebra::Family::SuPq => "su".into(),
            crate::algebra::Family::SpnR => "sp".into(),
        },
        rank: sp.rank(),
        sys_type: sp.roots.sys_type.to_string(),
        dim_g: sp.model.dim_g,
        dim_k: sp.model.dim_k,
        dim_p: sp.model.dim_p,
        c_const: Sig17(sp.c_const()),
        multiplicities: Multiplicities {
            long: mg,
            medium: ml,
            short: me,
        },
        gamma_labels: sp
            .roots
            .gamma_idx
            .iter()
            .map(|&i| sp.roots.roots[i].class.label())
            .collect(),
        positive_roots,
    }
}

pub fn cmd_realize(space: &str, eta: &OddMap, point: &[f64]) -> Result<RealizeReport> {
    let spec = SpaceSpec::parse(space)?;
    let sp = HermitianSpace::build(spec)?;
    realize_on(&sp, eta, point)
}

/// Realization report for an already-built space.
pub fn realize_on(sp: &HermitianSpace, eta: &OddMap, point: &[f64]) -> Result<RealizeReport> {
    let spec = sp.model.spec;
    let m = &sp.model;
    let (x, input_a) = if point.len() == sp.rank() {
        (
            sp.roots.from_a_coeffs(m, point),
            Some(point.to_vec()),
        )
    } else if point.len() == m.dim_p {
        (m.vec_from_p_coeffs(point)?, None)
    } else {
        return Err(HssntError::BadInput(format!(
            "point must have {} (a-coefficients) or {} (p-coefficients) entries, got {}",
            sp.rank(),
            m.dim_p,
            point.len()
        )));
    };
    let decomp = realize::spectral_decompose(sp, &x)?;
    let out = realize::odd_calculus(sp, &x, eta)?;
    let in_domain = realize::domain_membership(sp, &out, eta)?;
    let p_of = |v: &AlgVec| -> Vec<Sig17> {
        (0..m.dim_p)
            .map(|i| Sig17(v.coeffs[m.dim_k + i]))
            .collect()
    };
    let out_a = input_a
        .as_ref()
        .map(|_| sp.roots.a_coeffs(m, &out).iter().map(|&c| Sig17(c)).collect());
    Ok(RealizeReport {
        schema: SCHEMA,
        space: spec.name(),
        eta: eta.name.clone(),
        input: PointRepr {
            a_coeffs: input_a.map(|v| v.iter().map(|&c| Sig17(c)).collect()),
            p_coeffs: p_of(&x),
        },
        spectral: SpectralRepr {
            values: decomp.values.iter().map(|&v| Sig17(v)).collect(),
            tripotents: decomp.tripotents.iter().map(&p_of).collect(),
        },
        output: PointRepr {
            a_coeffs: out_a,
            p_coeffs: p_of(&out),
        },
        in_domain,
    })
}

pub const SUITES: [&str; 10] = [
    "roots", "kahler", "polydisk", "holo", "symp", "dual", "bergman", "duality", "tgeo", "all",
];

struct SuiteCtx<'a> {
    sp: &'a HermitianSpace,
    seed: u64,
    samples: usize,
    tol_override: Option<f64>,
}

impl SuiteCtx<'_> {
    fn line(&self, name: &str, residual: f64, default_tol: f64) -> CheckLine {
        let tol = self.tol_override.unwrap_or(default_tol);
        CheckLine {
            name: name.into(),
            max_residual: Sig17(residual),
            tol: Sig17(tol),
            pass: residual <= tol,
        }
    }

    fn check_of(&self, rep: &geomverify::VerifyReport) -> CheckLine {
        match self.tol_override {
            Some(t) => CheckLine {
                name: rep.name.clone(),
                max_residual: Sig17(rep.max_residual),
                tol: Sig17(t),
                pass: rep.max_residual <= t,
            },
            None => rep.into(),
        }
    }
}

fn suite_roots(ctx: &SuiteCtx) -> Result<Vec<CheckLine>> {
    let sp = ctx.sp;
    let m = &sp.model;
    let d = &sp.roots;
    let mut checks = Vec::new();
    let c = d.c_const;
    let mut orth: f64 = 0.0;
    for (i, hi) in d.h.iter().enumerate() {
        for (j, hj) in d.h.iter().enumerate() {
            let target = if i == j { c } else { 0.0 };
            orth = orth.max((m.inner(hi, hj) - target).abs());
        }
    }
    checks.push(ctx.line("gamma-orthogonality", orth, 1e-10));
    let worst_mult = d
        .gamma_idx
        .iter()
        .map(|&i| d.roots[i].mult as f64 - 1.0)
        .fold(0.0, f64::max);
    checks.push(ctx.line("long-root-multiplicity-one", worst_mult, 0.0));
    // orthogonal reconstruction of p from a + root spaces
    let mut cols: Vec<nalgebra::DVector<f64>> =
        d.a_basis.iter().map(|a| a.coeffs.clone()).collect();
    for rt in &d.roots {
        for col in rt.p_basis.column_iter() {
            cols.push(col.into_owned());
        }
    }
    let mut gram = nalgebra::DMatrix::zeros(cols.len(), cols.len());
    for (i, a) in cols.iter().enumerate() {
        for (j, b) in cols.iter().enumerate() {
            gram[(i, j)] = a.dot(b);
        }
    }
    let recon = if cols.len() == m.dim_p {
        linalg::max_abs(&(gram - nalgebra::DMatrix::identity(cols.len(), cols.len())))
    } else {
        f64::INFINITY
    };
    checks.push(ctx.line("p-reconstruction", recon, 1e-10));
    let mut split: f64 = 0.0;
    for rt in &d.roots {
        for ci in 0..rt.mult {
            split = split
                .max((rt.k_basis.column(ci).norm() - rt.p_basis.column(ci).norm()).abs());
        }
    }
    checks.push(ctx.line("root-space-norm-split", split, 1e-10));
    let mut weyl: f64 = 0.0;
    for g in 0..d.roots.len() {
        weyl = weyl.max(d.weyl_word_residual(m, &[g]));
    }
    if d.roots.len() >= 2 {
        weyl = weyl.max(d.weyl_word_residual(m, &[0, 1, 0]));
    }
    checks.push(ctx.line("weyl-signed-permutation", weyl, 1e-12));
    // bracket grading: [k_alpha, p_beta] lands in p_{alpha+beta} + p_{alpha-beta}
    let sum_coeffs = |a: &[f64], b: &[f64], sign: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + sign * y).collect()
    };
    let find_span = |coeffs: &[f64]| -> Option<&nalgebra::DMatrix<f64>> {
        if coeffs.iter().all(|c| c.abs() < 1e-9) {
            return None; // handled through a
        }
        for rt in &d.roots {
            let e = rt.class.e_coeffs(d.rank);
            let plus = e.iter().zip(coeffs).all(|(x, y)| (x - y).abs() < 1e-9);
            let minus = e.iter().zip(coeffs).all(|(x, y)| (x + y).abs() < 1e-9);
            if plus || minus {
                return Some(&rt.p_basis);
            }
        }
        None
    };
    let mut grading: f64 = 0.0;
    for ra in &d.roots {
        for rb in &d.roots {
            let ea = ra.class.e_coeffs(d.rank);
            let eb = rb.class.e_coeffs(d.rank);
            let mut span_cols: Vec<nalgebra::DVector<f64>> = Vec::new();
            for sign in [1.0, -1.0] {
                let target = sum_coeffs(&ea, &eb, sign);
                if target.iter().all(|c| c.abs() < 1e-9) {
                    for a in &d.a_basis {
                        span_cols.push(a.coeffs.clone());
                    }
                } else if let Some(basis) = find_span(&target) {
                    for col in basis.column_iter() {
                        span_cols.push(col.into_owned());
                    }
                }
            }
            let q = linalg::orthonormalize_in(m.dim_g, &span_cols, 1e-10);
            for ka in ra.k_basis.column_iter() {
                for pb in rb.p_basis.column_iter() {
                    let x = AlgVec {
                        home: Home::K,
                        coeffs: ka.into_owned(),
                        model: d.h[0].model_token(),
                    };
                    let y = AlgVec {
                        home: Home::P,
                        coeffs: pb.into_owned(),
                        model: d.h[0].model_token(),
                    };
                    let br = m.bracket(&x, &y)?;
                    let off = (&br.coeffs - linalg::project_onto(&q, &br.coeffs)).norm();
                    grading = grading.max(off);
                }
            }
        }
    }
    checks.push(ctx.line("bracket-grading", grading, 1e-10));
    Ok(checks)
}

fn suite_kahler(ctx: &SuiteCtx) -> Result<Vec<CheckLine>> {
    let sp = ctx.sp;
    let m = &sp.model;
    let kd = &sp.kahler;
    let mut checks = Vec::new();
    let central = (0..m.dim_k)
        .map(|i| m.bracket(&kd.zeta, &m.basis_vec(i)).map(|b| b.norm_inf()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(ctx.line("zeta-centrality", central, 1e-12));
    let id = nalgebra::DMatrix::identity(m.dim_p, m.dim_p);
    checks.push(ctx.line(
        "J-squares-to-minus-id",
        linalg::max_abs(&(&kd.j0 * &kd.j0 + &id)),
        1e-10,
    ));
    checks.push(ctx.line(
        "omega-antisymmetry",
        linalg::max_abs(&(&kd.omega0 + kd.omega0.transpose())),
        1e-10,
    ));
    let c = sp.c_const();
    let mut znorm: f64 = 0.0;
    let mut brawh: f64 = 0.0;
    for i in 0..sp.rank() {
        znorm = znorm.max((m.inner(&kd.z_k[i], &kd.z_k[i]) - 1.0 / c).abs());
        znorm = znorm.max((m.inner(&kd.z_p[i], &kd.z_p[i]) - 1.0 / c).abs());
        let ht = &sp.roots.h_tilde[i];
        brawh = brawh.max(
            crate::algebra::sub(&kd.apply_j0(m, ht), &crate::algebra::scale(&kd.z_p[i], 2.0))
                .norm_inf(),
        );
        brawh = brawh.max(
            crate::algebra::sub(
                &m.bracket(&kd.z_k[i], &kd.z_p[i])?,
                &crate::algebra::scale(ht, 0.5),
            )
            .norm_inf(),
        );
    }
    checks.push(ctx.line("z-basis-norms", znorm, 1e-10));
    checks.push(ctx.line("brawh-relations", brawh, 1e-10));
    let rep = crate::kahler::verify_j_mapping(m, &sp.roots, kd);
    checks.push(ctx.line("J-root-space-mapping", rep.max_residual, 1e-10));
    // J restricted to each complex line equals ad(-Z_i^k)
    let mut jp: f64 = 0.0;
    for i in 0..sp.rank() {
        let ad = m.ad_operator(&crate::algebra::scale(&kd.z_k[i], -1.0));
        for v in [&sp.roots.h_tilde[i], &kd.apply_j0(m, &sp.roots.h_tilde[i])] {
            let lhs = kd.apply_j0(m, v);
            let rhs = &ad * &v.coeffs;
            jp = jp.max(linalg::max_abs_vec(&(&lhs.coeffs - rhs)));
        }
    }
    checks.push(ctx.line("J-complex-line-restriction", jp, 1e-10));
    let mut torus: f64 = 0.0;
    for theta in [std::f64::consts::PI / 7.0, std::f64::consts::PI / 3.0] {
        for i in 0..sp.rank() {
            let gen = crate::algebra::scale(&kd.z_k[i], -theta);
            let u = &sp.roots.h_tilde[i];
            let ju = kd.apply_j0(m, u);
            let img = m.adjoint_action(&gen, u)?;
            let expect = crate::algebra::add(
                &crate::algebra::scale(u, theta.cos()),
                &crate::algebra::scale(&ju, theta.sin()),
            );
            torus = torus.max(crate::algebra::sub(&img, &expect).norm_inf());
            for j in 0..sp.rank() {
                if j != i {
                    let w = &sp.roots.h_tilde[j];
                    torus = torus
                        .max(crate::algebra::sub(&m.adjoint_action(&gen, w)?, w).norm_inf());
                }
            }
        }
    }
    checks.push(ctx.line("torus-rotation", torus, 1e-10));
    Ok(checks)
}

fn suite_polydisk(ctx: &SuiteCtx) -> Result<Vec<CheckLine>> {
    let sp = ctx.sp;
    let m = &sp.model;
    let pd = crate::kahler::polydisk(m, &sp.roots, &sp.kahler)?;
    let mut checks = Vec::new();
    let mut brah: f64 = 0.0;
    let mut cross: f64 = 0.0;
    let mut fhom: f64 = 0.0;
    let mut fiso: f64 = 0.0;
    for (i, (u, ju, w)) in pd.triples.iter().enumerate() {
        brah = brah.max(
            crate::algebra::sub(&m.bracket(w, ju)?, &crate::algebra::scale(u, 4.0)).norm_inf(),
        );
        brah = brah.max(
            crate::algebra::add(&m.bracket(w, u)?, &crate::algebra::scale(ju, 4.0)).norm_inf(),
        );
        for (j, (u2, ju2, w2)) in pd.triples.iter().enumerate() {
            if i != j {
                for x in [u, ju, w] {
                    for y in [u2, ju2, w2] {
                        cross = cross.max(m.bracket(x, y)?.norm_inf());
                    }
                }
            }
        }
        let fu = pd.f_apply(m, i, u)?;
        let fj = pd.f_apply(m, i, ju)?;
        let fw = pd.f_apply(m, i, w)?;
        let comm = fu * fj - fj * fu;
        fhom = fhom.max((comm - fw).iter().map(|z| z.norm()).fold(0.0, f64::max));
        let sq = fu * fu;
        let tr = (sq[(0, 0)] + sq[(1, 1)]).re;
        fiso = fiso.max((2.0 / sp.c_const() * tr - m.inner(u, u)).abs());
    }
    checks.push(ctx.line("brah-relations", brah, 1e-10));
    checks.push(ctx.line("u-factors-commute", cross, 1e-10));
    checks.push(ctx.line("f-homomorphism", fhom, 1e-10));
    checks.push(ctx.line("f-isometry", fiso, 1e-10));
    Ok(checks)
}

fn gf_identity_lines(
    ctx: &SuiteCtx,
    eta: &OddMap,
    star: bool,
    use_f: bool,
) -> Result<Vec<CheckLine>> {
    let sp = ctx.sp;
    let hi = if star {
        std::f64::consts::FRAC_PI_2 - 0.1
    } else {
        (eta.radius() * 0.9).min(1.5)
    };
    let mut classes: Vec<RootClass> = sp
        .roots
        .gamma_idx
        .iter()
        .map(|&i| sp.roots.roots[i].class)
        .collect();
    for &(l, _) in &sp.roots.lambda_pairs {
        classes.push(sp.roots.roots[l].class);
    }
    for &e in &sp.roots.epsilon_idx {
        classes.push(sp.roots.roots[e].class);
    }
    let mut worst: f64 = 0.0;
    let mut rng = sample::sample_rng(ctx.seed, 0);
    for _ in 0..ctx.samples {
        let v = sample::principal_coeffs(sp, &mut rng, 0.05, hi, sp.model.tol.principal_rel);
        for &class in &classes {
            let val = match (star, use_f) {
                (false, false) => geomverify::evaluate_g(sp, eta, class, &v)?,
                (false, true) => geomverify::evaluate_f(sp, eta, class, &v)?,
                (true, false) => geomverify::evaluate_g_star(sp, eta, class, &v)?,
                (true, true) => geomverify::evaluate_f_star(sp, eta, class, &v)?,
            };
            worst = worst.max((val - 1.0).abs());
        }
    }
    let name = match (star, use_f) {
        (false, false) => format!("G[{}]=1", eta.name),
        (false, true) => format!("F[{}]=1", eta.name),
        (true, false) => format!("G*[{}]=1", eta.name),
        (true, true) => format!("F*[{}]=1", eta.name),
    };
    Ok(vec![ctx.line(&name, worst, 1e-9)])
}

fn suite_holo(ctx: &SuiteCtx, eta: &OddMap) -> Result<Vec<CheckLine>> {
    let sp = ctx.sp;
    let mut checks = gf_identity_lines(ctx, eta, false, false)?;
    let map = MapUnderTest::odd(sp, eta);
    let rep = geomverify::check_holomorphic(
        sp,
        &map,
        &sp.kahler.j0,
        ctx.samples,
        ctx.seed,
        ctx.tol_override.unwrap_or(1e-5),
    );
    checks.push(ctx.check_of(&rep));
    // block scalars against finite-difference pullbacks, valid for any eta
    let (g_rep, _) = geomverify::cross_validate_gf(sp, eta, ctx.samples.min(5), ctx.seed, 1e-5);
    checks.push(ctx.check_of(&g_rep));
    let rep = geomverify::check_equivariance(sp, &map, ctx.samples, ctx.seed, 1e-9);
    checks.push(ctx.check_of(&rep));
    Ok(checks)
}

fn suite_symp(ctx: &SuiteCtx, eta: &OddMap) -> Result<Vec<CheckLine>> {
    let sp = ctx.sp;
    let mut checks = gf_identity_lines(ctx, eta, false, true)?;
    let map = MapUnderTest::odd(sp, eta);
    let rep = geomverify::check_symplectic(
        sp,
        &map,
        &sp.kahler.omega0,
        ctx.samples,
        ctx.seed,
        ctx.tol_override.unwrap_or(1e-5),
    );
    checks.push(ctx.check_of(&rep));
    let (_, f_rep) = geomverify::cross_validate_gf(sp, eta, ctx.samples.min(5), ctx.seed, 1e-5);
    checks.push(ctx.check_of(&f_rep));
    let rep = geomverify::check_equivariance(sp, &map, ctx.samples, ctx.seed, 1e-9);
    checks.push(ctx.check_of(&rep));
    Ok(checks)
}

fn suite_dual(ctx: &SuiteCtx) -> Result<Vec<CheckLine>> {
    let sp = ctx.sp;
    let m = &sp.model;
    let dm = dual::build_dual(sp)?;
    let mut checks = Vec::new();
    checks.push(ctx.line("dual-jacobi", dm.jacobi_residual(), 1e-12));
    let mut feq: f64 = 0.0;
    for i in 0..sp.rank() {
        let ht_star = retag(&sp.roots.h_tilde[i], Home::PStar);
        let zp_star = retag(&sp.kahler.z_p[i], Home::PStar);
        let b1 = dm.bracket_star(sp, &ht_star, &sp.kahler.z_k[i])?;
        feq = feq.max(
            crate::algebra::sub(&b1, &crate::algebra::scale(&zp_star, 2.0)).norm_inf(),
        );
        let b2 = dm.bracket_star(sp, &ht_star, &zp_star)?;
        feq = feq.max(
            crate::algebra::add(&b2, &crate::algebra::scale(&sp.kahler.z_k[i], 2.0)).norm_inf(),
        );
    }
    checks.push(ctx.line("feq2dual-brackets", feq, 1e-10));
    let tan = builtin_odd("tan")?;
    let sin = builtin_odd("sin")?;
    checks.extend(gf_identity_lines(ctx, &tan, true, false)?);
    checks.extend(gf_identity_lines(ctx, &sin, true, true)?);
    // equivariance of the dual symplectic map
    let mut rng = sample::sample_rng(ctx.seed, 1);
    let mut equiv: f64 = 0.0;
    for _ in 0..ctx.samples {
        use rand::RngExt;
        let coeffs = sample::abelian_coeffs(sp, &mut rng, 0.05, 1.4);
        let v = sp.roots.from_a_coeffs(m, &coeffs);
        let norm = 0.2 + rng.random::<f64>();
        let z = sample::k_element(sp, &mut rng, norm);
        let moved = retag(&m.adjoint_action(&z, &v)?, Home::PStar);
        let lhs = dual::omega_eta_star(sp, &moved, &sin)?;
        let img = dual::omega_eta_star(sp, &retag(&v, Home::PStar), &sin)?;
        let rhs = retag(&m.adjoint_action(&z, &retag(&img, Home::P))?, Home::PStar);
        equiv = equiv.max(crate::algebra::sub(&lhs, &rhs).norm_inf());
    }
    checks.push(ctx.line("omega-star-equivariance", equiv, 1e-9));
    Ok(checks)
}

fn suite_bergman(ctx: &SuiteCtx) -> Result<Vec<CheckLine>> {
    let sp = ctx.sp;
    let m = &sp.model;
    let mut checks = Vec::new();
    let b0 = realize::bergman_operator(sp, &m.zero(Home::P))?;
    let id = nalgebra::DMatrix::identity(m.dim_p, m.dim_p);
    checks.push(ctx.line("bergman-at-zero", linalg::max_abs(&(b0 - id)), 1e-12));
    let lam = 0.6;
    let z = crate::algebra::scale(&sp.roots.h_tilde[0], lam);
    let b = realize::bergman_operator(sp, &z)?;
    checks.push(ctx.line(
        "bergman-symmetry",
        linalg::max_abs(&(&b - b.transpose())),
        1e-10,
    ));
    let (vals, _) = linalg::sym_eigen(&b);
    let target = (1.0 - lam * lam) * (1.0 - lam * lam);
    let gap = vals
        .iter()
        .map(|v| (v - target).abs())
        .fold(f64::INFINITY, f64::min);
    checks.push(ctx.line("bergman-axis-eigenvalue", gap, 1e-9));
    let eta = builtin_odd("sinh_artanh")?;
    let mut rng = sample::sample_rng(ctx.seed, 2);
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.samples.max(50) {
        let z = sample::chart_point(sp, &mut rng, 0.02, 0.95);
        let a = realize::dsl_roos_map(sp, &z)?;
        let b = realize::odd_calculus(sp, &z, &eta)?;
        worst = worst.max(crate::algebra::sub(&a, &b).norm_inf());
    }
    checks.push(ctx.line("dsl-roos-vs-odd-calculus", worst, 1e-8));
    Ok(checks)
}

fn suite_duality(ctx: &SuiteCtx) -> Result<Vec<CheckLine>> {
    let sp = ctx.sp;
    let tan = builtin_odd("tan")?;
    let sin = builtin_odd("sin")?;
    let tanh = builtin_odd("tanh")?;
    let sinh = builtin_odd("sinh")?;
    let arcsin = builtin_odd("arcsin")?;
    let arctan = builtin_odd("arctan")?;
    let mut rng = sample::sample_rng(ctx.seed, 3);
    let n = ctx.samples.max(50);
    let mut tan_path: f64 = 0.0;
    let mut sin_path: f64 = 0.0;
    let mut two_paths: f64 = 0.0;
    let mut diast: f64 = 0.0;
    let mut diast_dual: f64 = 0.0;
    for _ in 0..n {
        let x = sample::chart_point(sp, &mut rng, 0.05, 2.0);
        let g = realize::gudermann_composite(sp, &x)?;
        let lhs = dual::omega_eta_star(sp, &g, &tan)?;
        let phi = retag(&realize::odd_calculus(sp, &x, &sinh)?, Home::PStar);
        tan_path = tan_path.max(crate::algebra::sub(&lhs, &phi).norm_inf());
        let lhs = dual::omega_eta_star(sp, &g, &sin)?;
        let psi = retag(&realize::odd_calculus(sp, &x, &tanh)?, Home::PStar);
        sin_path = sin_path.max(crate::algebra::sub(&lhs, &psi).norm_inf());
        let p1 = realize::odd_calculus(sp, &realize::odd_calculus(sp, &x, &tanh)?, &arcsin)?;
        let p2 = realize::odd_calculus(sp, &realize::odd_calculus(sp, &x, &sinh)?, &arctan)?;
        two_paths = two_paths.max(crate::algebra::sub(&p1, &p2).norm_inf());
        // diastatic round trips, primal and dual
        let z = sample::chart_point(sp, &mut rng, 0.02, 0.9);
        let back = realize::diastatic_exp(sp, &realize::diastatic_log(sp, &z)?)?;
        diast = diast.max(crate::algebra::sub(&back, &z).norm_inf());
        let coeffs = sample::abelian_coeffs(sp, &mut rng, 0.02, 1.4);
        let v = sp.roots.from_a_coeffs(&sp.model, &coeffs);
        let vs = retag(&v, Home::PStar);
        let img = dual::omega_eta_star(sp, &vs, &realize::diastatic_log_dual_eta())?;
        let back = realize::odd_calculus(
            sp,
            &retag(&img, Home::P),
            &realize::diastatic_exp_dual_eta(),
        )?;
        diast_dual = diast_dual.max(crate::algebra::sub(&back, &v).norm_inf());
    }
    Ok(vec![
        ctx.line("gudermann-tan-path", tan_path, 1e-9),
        ctx.line("gudermann-sin-path", sin_path, 1e-9),
        ctx.line("gudermann-two-paths", two_paths, 1e-10),
        ctx.line("diastatic-round-trip", diast, 1e-9),
        ctx.line("diastatic-dual-round-trip", diast_dual, 1e-9),
    ])
}

fn suite_tgeo(ctx: &SuiteCtx) -> Result<Vec<CheckLine>> {
    let sp = ctx.sp;
    let mut checks = Vec::new();
    let h_vecs: Vec<AlgVec> = sp.roots.h_tilde.clone();
    let abra = tgeo::abra_check(sp, &h_vecs)?;
    checks.push(ctx.line("abra-on-h-tilde", if abra { 0.0 } else { 1.0 }, 0.0));
    // restriction along the main diagonal of the cube
    let diag = vec![vec![1.0; sp.rank()]];
    let diag_sub = tgeo::canonical_basis(&diag, sp.rank())?;
    let rep = tgeo::restriction_check(sp, &diag_sub, &builtin_odd("sinh")?, ctx.samples, ctx.seed)?;
    checks.push(ctx.line("restriction-diagonal[sinh]", rep.max_residual, 1e-9));
    if sp.rank() == 2 {
        let grid = [-1.0, -0.5, 0.0, 0.5, 1.0];
        let etas = [
            builtin_odd("sinh")?,
            builtin_odd("tanh")?,
            builtin_odd("loi_mossa")?,
        ];
        let cells = tgeo::grid_equivalence(sp, &grid, &etas, 4, ctx.seed)?;
        let mut disagreements = 0usize;
        let mut clts_lines: Vec<(i32, i32)> = Vec::new();
        for cell in &cells {
            if cell.clts != cell.lts || cell.clts != cell.abra {
                disagreements += 1;
            }
            for &p in &cell.restriction_pass {
                if p != cell.clts {
                    disagreements += 1;
                }
            }
            if cell.clts && cell.coeffs.len() == 1 {
                let (mut a, mut b) = (cell.coeffs[0][0], cell.coeffs[0][1]);
                let s = a.abs().max(b.abs());
                a /= s;
                b /= s;
                if a < 0.0 || (a == 0.0 && b < 0.0) {
                    a = -a;
                    b = -b;
                }
                clts_lines.push((a.round() as i32, b.round() as i32));
            }
        }
        clts_lines.sort();
        clts_lines.dedup();
        checks.push(ctx.line("grid-equivalences", disagreements as f64, 0.0));
        let finiteness = if clts_lines == vec![(0, 1), (1, -1), (1, 0), (1, 1)] {
            0.0
        } else {
            1.0
        };
        checks.push(ctx.line("clts-vertex-finiteness", finiteness, 0.0));
    }
    Ok(checks)
}

/// Runs a named verification suite and assembles the JSON report.
pub fn cmd_verify(
    space: &str,
    suite: &str,
    seed: u64,
    tol: Option<f64>,
    samples: usize,
    eta_override: Option<&str>,
) -> Result<SuiteReport> {
    let spec = SpaceSpec::parse(space)?;
    let sp = HermitianSpace::build(spec)?;
    verify_on(&sp, suite, seed, tol, samples, eta_override)
}

/// Verification suite for an already-built space.
pub fn verify_on(
    sp: &HermitianSpace,
    suite: &str,
    seed: u64,
    tol: Option<f64>,
    samples: usize,
    eta_override: Option<&str>,
) -> Result<SuiteReport> {
    let ctx = SuiteCtx {
        sp,
        seed,
        samples,
        tol_override: tol,
    };
    let holo_eta = match eta_override {
        Some(name) => builtin_odd(name)?,
        None => builtin_odd("tanh")?,
    };
    let symp_eta = match eta_override {
        Some(name) => builtin_odd(name)?,
        None => builtin_odd("sinh")?,
    };
    let checks = match suite {
        "roots" => suite_roots(&ctx)?,
        "kahler" => suite_kahler(&ctx)?,
        "polydisk" => suite_polydisk(&ctx)?,
        "holo" => suite_holo(&ctx, &holo_eta)?,
        "symp" => suite_symp(&ctx, &symp_eta)?,
        "dual" => suite_dual(&ctx)?,
        "bergman" => suite_bergman(&ctx)?,
        "duality" => suite_duality(&ctx)?,
        "tgeo" => suite_tgeo(&ctx)?,
        "all" => {
            let mut all = Vec::new();
            all.extend(suite_roots(&ctx)?);
            all.extend(suite_kahler(&ctx)?);
            all.extend(suite_polydisk(&ctx)?);
            all.extend(suite_holo(&ctx, &holo_eta)?);
            all.extend(suite_symp(&ctx, &symp_eta)?);
            all.extend(suite_dual(&ctx)?);
            all.extend(suite_bergman(&ctx)?);
            all.extend(suite_duality(&ctx)?);
            all.extend(suite_tgeo(&ctx)?);
            all
        }
        other => {
            return Err(HssntError::BadInput(format!(
                "unknown suite '{other}'; expected one of {SUITES:?}"
            )))
        }
    };
    Ok(SuiteReport::new(suite, &sp.model.spec.name(), seed, checks))
}

/// Renders the section-map grid as CSV text.
pub fn cmd_grid(
    space: &str,
    eta: &OddMap,
    plane: (usize, usize),
    resolution: usize,
    extent: f64,
) -> Result<String> {
    let spec = SpaceSpec::parse(space)?;
    let sp = HermitianSpace::build(spec)?;
    let r = sp.rank();
    let radius = eta.radius();
    let sat = eta.saturation();
    let linspace = |n: usize| -> Vec<f64> {
        if n <= 1 {
            vec![0.0]
        } else {
            (0..n)
                .map(|i| -extent + 2.0 * extent * i as f64 / (n - 1) as f64)
                .collect()
        }
    };
    let eval = |x: f64| -> (f64, bool) {
        if x.abs() >= radius {
            (f64::NAN, false)
        } else {
            let y = eta.eval(x);
            (y, y.abs() < sat)
        }
    };
    let fmt = |v: f64| -> String {
        if v.is_nan() {
            "nan".into()
        } else {
            format!("{v:.17e}")
        }
    };
    let mut out = String::new();
    if r == 1 {
        out.push_str("x1,y1,in_domain\n");
        for x in linspace(resolution) {
            let (y, ok) = eval(x);
            out.push_str(&format!("{},{},{}\n", fmt(x), fmt(y), ok));
        }
        return Ok(out);
    }
    let (i, j) = plane;
    if i == j || i == 0 || j == 0 || i > r || j > r {
        return Err(HssntError::BadInput(format!(
            "plane axes must be distinct indices in 1..={r}"
        )));
    }
    out.push_str("x1,x2,y1,y2,in_domain\n");
    for x1 in linspace(resolution) {
        for x2 in linspace(resolution) {
            let (y1, ok1) = eval(x1);
            let (y2, ok2) = eval(x2);
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt(x1),
                fmt(x2),
                fmt(y1),
                fmt(y2),
                ok1 && ok2
            ));
        }
    }
    Ok(out)
}

fn require_json(common: &CommonArgs) -> Result<()> {
    if common.format != "json" {
        return Err(HssntError::BadInput(format!(
            "this command only emits json, got format '{}'",
            common.format
        )));
    }
    Ok(())
}

/// Executes a parsed command, writing machine output to `stdout` and the
/// human summary to `stderr`; returns the process exit code.
pub fn run<W: Write, E: Write>(cli: Cli, stdout: &mut W, stderr: &mut E) -> i32 {
    let outcome: Result<(String, CommonArgs, i32)> = match cli.cmd {
        Command::Describe(args) => (|| {
            require_json(&args.common)?;
            let rep = cmd_describe(&args.common.space)?;
            let _ = writeln!(
                stderr,
                "{}: rank {}, type {}, C = {:.6}",
                rep.space, rep.rank, rep.sys_type, rep.c_const.0
            );
            Ok((to_json(&rep), args.common, 0))
        })(),
        Command::Realize(args) => (|| {
            require_json(&args.common)?;
            let eta = resolve_eta(&args.eta, &args.eta_file)?;
            let point = parse_floats(&args.point)?;
            let rep = cmd_realize(&args.common.space, &eta, &point)?;
            let _ = writeln!(
                stderr,
                "{}: eta = {}, {} spectral value(s), in_domain = {}",
                rep.space,
                rep.eta,
                rep.spectral.values.len(),
                rep.in_domain
            );
            Ok((to_json(&rep), args.common, 0))
        })(),
        Command::Verify(args) => (|| {
            require_json(&args.common)?;
            let rep = cmd_verify(
                &args.common.space,
                &args.suite,
                args.seed,
                args.tol,
                args.samples,
                args.eta.as_deref(),
            )?;
            for c in &rep.checks {
                let _ = writeln!(
                    stderr,
                    "{} {}: max residual {:.3e} (tol {:.1e})",
                    if c.pass { "pass" } else { "FAIL" },
                    c.name,
                    c.max_residual.0,
                    c.tol.0
                );
            }
            let code = if rep.pass { 0 } else { 1 };
            Ok((to_json(&rep), args.common, code))
        })(),
        Command::Grid(args) => (|| {
            let eta = resolve_eta(&args.eta, &args.eta_file)?;
            let plane = {
                let idx = parse_floats(&args.plane)?;
                if idx.len() != 2 {
                    return Err(HssntError::BadInput("plane needs two indices".into()));
                }
                (idx[0] as usize, idx[1] as usize)
            };
            if args.common.format != "csv" && args.common.format != "json" {
                return Err(HssntError::BadInput(format!(
                    "unknown format '{}'",
                    args.common.format
                )));
            }
            let csv = cmd_grid(
                &args.common.space,
                &eta,
                plane,
                args.resolution,
                args.extent,
            )?;
            let _ = writeln!(
                stderr,
                "grid: {} rows",
                csv.lines().count().saturating_sub(1)
            );
            Ok((csv, args.common, 0))
        })(),
    };
    match outcome {
        Ok((text, common, code)) => {
            if let Err(e) = write_output(&common, &text, stdout) {
                let _ = writeln!(stderr, "error writing output: {e}");
                return 3;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code_for(&e)
        }
    }
}
