//! Canonical bases of abelian subspaces, the complexification-as-LTS test,
//! brute-force Lie-triple verification, and the restriction property of
//! strongly diagonal realizations on totally geodesic submanifolds.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{add, scale, sub, AlgVec, Home};
use crate::error::{HssntError, Result};
use crate::linalg;
use crate::oddmap::OddMap;
use crate::realize;
use crate::space::HermitianSpace;

/// An abelian subspace of a in canonical (reduced echelon) form over the
/// H~ basis: row m reads H~_{i_m} + sum of off-pivot coefficients.
#[derive(Debug, Clone)]
pub struct AbelianSubspace {
    pub dim: usize,
    pub rank: usize,
    /// Pivot indices I', strictly increasing.
    pub i_prime: Vec<usize>,
    /// dim x rank coefficient matrix in the H~ frame, canonical rows.
    pub basis: DMatrix<f64>,
}

/// Reduced row-echelon elimination producing the unique canonical basis.
pub fn canonical_basis(vectors: &[Vec<f64>], rank: usize) -> Result<AbelianSubspace> {
    if vectors.is_empty() {
        return Err(HssntError::DependentInput);
    }
    let rows = vectors.len();
    let mut m = DMatrix::zeros(rows, rank);
    for (i, v) in vectors.iter().enumerate() {
        if v.len() != rank {
            return Err(HssntError::BadInput(format!(
                "coefficient vector has length {}, expected {rank}",
                v.len()
            )));
        }
        for (j, &c) in v.iter().enumerate() {
            m[(i, j)] = c;
        }
    }
    let tol = 1e-10 * linalg::max_abs(&m).max(1.0);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..rank {
        // partial pivot
        let mut best = row;
        for r in row..rows {
            if m[(r, col)].abs() > m[(best, col)].abs() {
                best = r;
            }
        }
        if row >= rows || m[(best, col)].abs() <= tol {
            continue;
        }
        m.swap_rows(row, best);
        let piv = m[(row, col)];
        for c in 0..rank {
            m[(row, c)] /= piv;
        }
        for r in 0..rows {
            if r != row {
                let f = m[(r, col)];
                if f.abs() > 0.0 {
                    for c in 0..rank {
                        m[(r, c)] -= f * m[(row, c)];
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if row != rows {
        return Err(HssntError::DependentInput);
    }
    // clean tiny entries left by elimination
    for x in m.iter_mut() {
        if x.abs() < tol {
            *x = 0.0;
        }
    }
    Ok(AbelianSubspace {
        dim: rows,
        rank,
        i_prime: pivots,
        basis: m,
    })
}

impl AbelianSubspace {
    /// Canonical-basis vectors as p-elements.
    pub fn vectors(&self, sp: &HermitianSpace) -> Vec<AlgVec> {
        (0..self.dim)
            .map(|r| {
                let coeffs: Vec<f64> = (0..self.rank).map(|c| self.basis[(r, c)]).collect();
                sp.roots.from_a_coeffs(&sp.model, &coeffs)
            })
            .collect()
    }
}

/// True iff each off-pivot column carries at most one nonzero entry and
/// every coefficient is 0 or ±1: the canonical-basis criterion for the
/// complexification to be a Lie triple system.
pub fn has_clts(sub: &AbelianSubspace) -> bool {
    let tol = 1e-10;
    for col in 0..sub.rank {
        if sub.i_prime.contains(&col) {
            continue;
        }
        let mut nonzero = 0;
        for row in 0..sub.dim {
            let a = sub.basis[(row, col)];
            if a.abs() > tol {
                nonzero += 1;
                if (a.abs() - 1.0).abs() > tol {
                    return false;
                }
            }
        }
        if nonzero > 1 {
            return false;
        }
    }
    true
}

/// Brute-force triple-bracket closure [[u,v],w] ⊂ span over all basis
/// triples of the given p-vectors.
pub fn verify_lts(sp: &HermitianSpace, vectors: &[AlgVec]) -> Result<bool> {
    let m = &sp.model;
    let cols: Vec<DVector<f64>> = vectors.iter().map(|v| v.coeffs.clone()).collect();
    let q = linalg::orthonormalize_in(m.dim_g, &cols, 1e-10);
    let mut worst: f64 = 0.0;
    for u in vectors {
        for v in vectors {
            for w in vectors {
                let t = m.bracket(&m.bracket(u, v)?, w)?;
                let off = (&t.coeffs - linalg::project_onto(&q, &t.coeffs)).norm();
                worst = worst.max(off);
            }
        }
    }
    Ok(worst < 1e-9)
}

/// The su(1,1)-type bracket relations for a candidate canonical basis
/// {V_m} inside a: the diagonal triples close with factor 4 and every
/// mixed triple vanishes.
pub fn abra_check(sp: &HermitianSpace, vectors: &[AlgVec]) -> Result<bool> {
    let m = &sp.model;
    let tol = 1e-9;
    let jv: Vec<AlgVec> = vectors.iter().map(|v| sp.kahler.apply_j0(m, v)).collect();
    for (i, vi) in vectors.iter().enumerate() {
        for (j, _) in vectors.iter().enumerate() {
            for (l, vl) in vectors.iter().enumerate() {
                let base = m.bracket(vi, &jv[j])?;
                let t1 = m.bracket(&base, &jv[l])?;
                let t2 = m.bracket(&base, vl)?;
                if i == j && j == l {
                    if sub(&t1, &scale(vi, 4.0)).norm_inf() > tol {
                        return Ok(false);
                    }
                    if add(&t2, &scale(&jv[i], 4.0)).norm_inf() > tol {
                        return Ok(false);
                    }
                } else {
                    if t1.norm_inf() > tol || t2.norm_inf() > tol {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Verifies the restriction property: the realization applied to points of
/// the subspace acts coordinate-wise on the canonical basis.
#[derive(Debug, Clone)]
pub struct RestrictionReport {
    pub samples: usize,
    pub max_residual: f64,
    pub pass: bool,
}

pub fn restriction_check(
    sp: &HermitianSpace,
    sub_space: &AbelianSubspace,
    eta: &OddMap,
    samples: usize,
    seed: u64,
) -> Result<RestrictionReport> {
    use rand::RngExt;
    let m = &sp.model;
    let vecs = sub_space.vectors(sp);
    // keep every H~ component of the sampled points inside the domain
    let mut row_reach = 0.0f64;
    for col in 0..sub_space.rank {
        let mut s = 0.0;
        for row in 0..sub_space.dim {
            s += sub_space.basis[(row, col)].abs();
        }
        row_reach = row_reach.max(s);
    }
    let radius = eta.radius();
    let span = if radius.is_infinite() {
        1.0
    } else {
        0.8 * radius / row_reach.max(1.0)
    };
    let mut rng = crate::sample::sample_rng(seed, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let xs: Vec<f64> = (0..sub_space.dim)
            .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * span)
            .collect();
        let mut point = m.zero(Home::P);
        let mut expect = m.zero(Home::P);
        for (x, v) in xs.iter().zip(vecs.iter()) {
            point = add(&point, &scale(v, *x));
            expect = add(&expect, &scale(v, eta.eval(*x)));
        }
        let img = realize::odd_calculus(sp, &point, eta)?;
        worst = worst.max(sub(&img, &expect).norm_inf());
    }
    Ok(RestrictionReport {
        samples,
        max_residual: worst,
        pass: worst < 1e-9,
    })
}

/// One cell of the exhaustive rank-2 grid equivalence check.
#[derive(Debug, Clone)]
pub struct GridCell {
    pub coeffs: Vec<Vec<f64>>,
    pub clts: bool,
    pub lts: bool,
    pub abra: bool,
    pub restriction_pass: Vec<bool>,
}

/// Enumerates every subspace spanned by one or two grid vectors and runs
/// the three equivalence routes and the restriction check for each
/// supplied eta.
pub fn grid_equivalence(
    sp: &HermitianSpace,
    grid: &[f64],
    etas: &[OddMap],
    samples: usize,
    seed: u64,
) -> Result<Vec<GridCell>> {
    let r = sp.rank();
    if r != 2 {
        return Err(HssntError::BadInput(format!(
            "grid enumeration is a rank-2 check, space has rank {r}"
        )));
    }
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    for &a in grid {
        for &b in grid {
            if a != 0.0 || b != 0.0 {
                vectors.push(vec![a, b]);
            }
        }
    }
    let mut coeff_sets: Vec<Vec<Vec<f64>>> = vectors.iter().cloned().map(|v| vec![v]).collect();
    for i in 0..vectors.len() {
        for j in (i + 1)..vectors.len() {
            let det = vectors[i][0] * vectors[j][1] - vectors[i][1] * vectors[j][0];
            if det.abs() > 1e-12 {
                coeff_sets.push(vec![vectors[i].clone(), vectors[j].clone()]);
            }
        }
    }

    let mut cells = Vec::new();
    for coeffs in coeff_sets {
        let sub_space = canonical_basis(&coeffs, r)?;
        let clts = has_clts(&sub_space);
        let vecs = sub_space.vectors(sp);
        let mut complexified = vecs.clone();
        for v in &vecs {
            complexified.push(sp.kahler.apply_j0(&sp.model, v));
        }
        let lts = verify_lts(sp, &complexified)?;
        let abra = abra_check(sp, &vecs)?;
        let mut restriction_pass = Vec::new();
        for eta in etas {
            let rep = restriction_check(sp, &sub_space, eta, samples, seed)?;
            restriction_pass.push(rep.pass);
        }
        cells.push(GridCell {
            coeffs,
            clts,
            lts,
            abra,
            restriction_pass,
        });
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::SpaceSpec;
    use crate::oddmap::builtin_odd;

    fn su22() -> HermitianSpace {
        HermitianSpace::build(SpaceSpec::SuPq { p: 2, q: 2 }).unwrap()
    }

    #[test]
    fn canonical_basis_examples() {
        // {H1+H2, 2H1} reduces to {H1, H2}
        let sub = canonical_basis(&[vec![1.0, 1.0], vec![2.0, 0.0]], 2).unwrap();
        assert_eq!(sub.i_prime, vec![0, 1]);
        let id = DMatrix::identity(2, 2);
        assert!(linalg::max_abs(&(&sub.basis - id)) < 1e-12);
        // already canonical stays fixed
        let sub = canonical_basis(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, -1.0]], 3).unwrap();
        assert_eq!(sub.i_prime, vec![0, 1]);
        assert_eq!(sub.basis[(0, 2)], 1.0);
        assert_eq!(sub.basis[(1, 2)], -1.0);
        // idempotent
        let rows: Vec<Vec<f64>> = (0..sub.dim)
            .map(|r| (0..3).map(|c| sub.basis[(r, c)]).collect())
            .collect();
        let again = canonical_basis(&rows, 3).unwrap();
        assert!(linalg::max_abs(&(&again.basis - &sub.basis)) < 1e-12);
        // single vector
        let sub = canonical_basis(&[vec![1.0, 0.0]], 2).unwrap();
        assert_eq!(sub.i_prime, vec![0]);
        // dependent input rejected
        assert!(matches!(
            canonical_basis(&[vec![1.0, 1.0], vec![2.0, 2.0]], 2),
            Err(HssntError::DependentInput)
        ));
    }

    #[test]
    fn clts_criterion() {
        let yes = canonical_basis(&[vec![1.0, 1.0]], 2).unwrap();
        assert!(has_clts(&yes));
        let no = canonical_basis(&[vec![1.0, 2.0]], 2).unwrap();
        assert!(!has_clts(&no));
        // column with two nonzero entries
        let no2 = canonical_basis(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]], 3).unwrap();
        assert!(!has_clts(&no2));
    }

    #[test]
    fn lts_routes_agree_on_examples() {
        let sp = su22();
        // a + J a (the polydisk tangent) is an LTS
        let mut vecs = vec![sp.roots.h_tilde[0].clone(), sp.roots.h_tilde[1].clone()];
        for i in 0..2 {
            vecs.push(sp.kahler.apply_j0(&sp.model, &sp.roots.h_tilde[i]));
        }
        assert!(verify_lts(&sp, &vecs).unwrap());
        // p itself is an LTS
        let all_p: Vec<AlgVec> = (0..sp.model.dim_p)
            .map(|i| sp.model.basis_vec(sp.model.dim_k + i))
            .collect();
        assert!(verify_lts(&sp, &all_p).unwrap());
        // the skew line H1 + 2 H2: complexification is not an LTS
        let v = sp
            .roots
            .from_a_coeffs(&sp.model, &[1.0, 2.0]);
        let jv = sp.kahler.apply_j0(&sp.model, &v);
        assert!(!verify_lts(&sp, &[v, jv]).unwrap());
    }

    #[test]
    fn abra_examples() {
        let sp = su22();
        let h = |c: &[f64]| sp.roots.from_a_coeffs(&sp.model, c);
        assert!(abra_check(&sp, &[h(&[1.0, 0.0]), h(&[0.0, 1.0])]).unwrap());
        assert!(abra_check(&sp, &[h(&[1.0, 1.0])]).unwrap());
        assert!(!abra_check(&sp, &[h(&[1.0, 2.0])]).unwrap());
        // coefficients cube: [[V, J V], J V] carries 4 a^3 on each axis,
        // so the skew line H1 + 2 H2 produces 32 on the second slot
        let v = h(&[1.0, 2.0]);
        let jv = sp.kahler.apply_j0(&sp.model, &v);
        let t = sp
            .model
            .bracket(&sp.model.bracket(&v, &jv).unwrap(), &jv)
            .unwrap();
        let coeffs = sp.roots.a_coeffs(&sp.model, &t);
        assert!((coeffs[0] - 4.0).abs() < 1e-9);
        assert!((coeffs[1] - 32.0).abs() < 1e-9);
    }

    #[test]
    fn restriction_on_diagonal_line() {
        let sp = su22();
        let diag = canonical_basis(&[vec![1.0, 1.0]], 2).unwrap();
        let tanh = builtin_odd("tanh").unwrap();
        let rep = restriction_check(&sp, &diag, &tanh, 10, 7).unwrap();
        assert!(rep.pass, "max {:.3e}", rep.max_residual);
        // explicit value: tanh(0.8) (H1 + H2)
        let v = sp.roots.from_a_coeffs(&sp.model, &[0.8, 0.8]);
        let img = realize::odd_calculus(&sp, &v, &tanh).unwrap();
        let t = 0.8f64.tanh();
        let expect = sp.roots.from_a_coeffs(&sp.model, &[t, t]);
        assert!(sub(&img, &expect).norm_inf() < 1e-10);
        // id passes on any subspace
        let id = builtin_odd("id").unwrap();
        let skew = canonical_basis(&[vec![1.0, 2.0]], 2).unwrap();
        assert!(restriction_check(&sp, &skew, &id, 10, 7).unwrap().pass);
        // sinh fails on the non-CLTS line
        let sinh = builtin_odd("sinh").unwrap();
        let rep = restriction_check(&sp, &skew, &sinh, 10, 7).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn mixed_rank_subspace_on_sp3() {
        // a 2-dimensional subspace of the rank-3 flat: {H1 + H2, H3}
        let sp = HermitianSpace::build(SpaceSpec::SpnR { n: 3 }).unwrap();
        let sub3 = canonical_basis(&[vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]], 3).unwrap();
        assert_eq!(sub3.i_prime, vec![0, 2]);
        assert!(has_clts(&sub3));
        assert!(abra_check(&sp, &sub3.vectors(&sp)).unwrap());
        let mut cpx = sub3.vectors(&sp);
        for v in sub3.vectors(&sp) {
            cpx.push(sp.kahler.apply_j0(&sp.model, &v));
        }
        assert!(verify_lts(&sp, &cpx).unwrap());
        for name in ["sinh", "tanh", "loi_mossa"] {
            let rep =
                restriction_check(&sp, &sub3, &builtin_odd(name).unwrap(), 8, 5).unwrap();
            assert!(rep.pass, "{name}: {:.3e}", rep.max_residual);
        }
        // same but skewed: {H1 + H2, H3 + 0.5 H2} is not a CLTS
        let skew = canonical_basis(&[vec![1.0, 1.0, 0.0], vec![0.0, 0.5, 1.0]], 3).unwrap();
        assert!(!has_clts(&skew));
        assert!(!abra_check(&sp, &skew.vectors(&sp)).unwrap());
        let rep = restriction_check(&sp, &skew, &builtin_odd("sinh").unwrap(), 8, 5).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn grid_equivalences_su22() {
        let sp = su22();
        let grid = [-1.0, -0.5, 0.0, 0.5, 1.0];
        let etas = [
            builtin_odd("sinh").unwrap(),
            builtin_odd("tanh").unwrap(),
            builtin_odd("loi_mossa").unwrap(),
        ];
        let cells = grid_equivalence(&sp, &grid, &etas, 4, 11).unwrap();
        // 24 lines plus every independent pair
        assert!(cells.len() > 250, "{} cells", cells.len());
        let mut clts_lines: Vec<Vec<f64>> = Vec::new();
        for cell in &cells {
            assert_eq!(cell.clts, cell.lts, "clts vs lts at {:?}", cell.coeffs);
            assert_eq!(cell.clts, cell.abra, "clts vs abra at {:?}", cell.coeffs);
            for (k, &p) in cell.restriction_pass.iter().enumerate() {
                assert_eq!(
                    cell.clts, p,
                    "restriction[{k}] disagrees at {:?}",
                    cell.coeffs
                );
            }
            if cell.clts && cell.coeffs.len() == 1 {
                clts_lines.push(cell.coeffs[0].clone());
            }
        }
        // finiteness: exactly the vertex directions survive, up to sign
        // and scale: H1, H2, H1+H2, H1-H2
        let mut dirs: Vec<(i32, i32)> = clts_lines
            .iter()
            .map(|v| {
                let mut a = v[0];
                let mut b = v[1];
                let s = a.abs().max(b.abs());
                a /= s;
                b /= s;
                if a < 0.0 || (a == 0.0 && b < 0.0) {
                    a = -a;
                    b = -b;
                }
                (a.round() as i32, b.round() as i32)
            })
            .collect();
        dirs.sort();
        dirs.dedup();
        assert_eq!(dirs, vec![(0, 1), (1, -1), (1, 0), (1, 1)]);
    }
}
