//! Dense linear-algebra helpers shared by the root and realization machinery.

use nalgebra::{Complex, DMatrix, DVector};

type CMat = DMatrix<Complex<f64>>;

/// Eigendecomposition of a symmetric matrix, eigenvalues descending.
pub fn sym_eigen(mat: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = mat.nrows();
    let sym = 0.5 * (mat + mat.transpose());
    let se = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].partial_cmp(&se.eigenvalues[a]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Applies a scalar function to a symmetric operator through its spectrum.
/// Returns `Err(min_eig)` when `guard` rejects some eigenvalue.
pub fn spectral_map<F, G>(mat: &DMatrix<f64>, f: F, guard: G) -> Result<DMatrix<f64>, f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> bool,
{
    let (vals, vecs) = sym_eigen(mat);
    for &v in &vals {
        if !guard(v) {
            return Err(v);
        }
    }
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| f(v)),
    ));
    Ok(&vecs * d * vecs.transpose())
}

/// Matrix exponential by scaling-and-squaring with a Taylor kernel.
pub fn mat_exp(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.iter().map(|x| x.abs()).fold(0.0, f64::max) * n as f64;
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let b = a / 2f64.powi(s as i32);
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..30 {
        term = (&term * &b) / k as f64;
        sum += &term;
        if term.iter().map(|x| x.abs()).fold(0.0, f64::max) < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Orthonormal basis of the nullspace of `mat`, detected at `tol` relative
/// to the largest singular value. Wide matrices are padded with zero rows
/// so the SVD exposes the full kernel.
pub fn nullspace(mat: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let (m, n) = mat.shape();
    let work = if m >= n {
        mat.clone()
    } else {
        let mut padded = DMatrix::zeros(n, n);
        padded.view_mut((0, 0), (m, n)).copy_from(mat);
        padded
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("svd requested v_t");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = tol * smax.max(1.0);
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= cut {
            out.push(v_t.row(i).transpose());
        }
    }
    out
}

/// Simultaneous eigenspaces of a family of commuting symmetric operators.
///
/// Returns `(values, basis)` pairs where `values[k]` is the eigenvalue of
/// `ops[k]` on the block and the columns of `basis` are orthonormal.
/// Splitting uses a relative gap of `rel_gap` on each operator in turn.
pub fn joint_eigenspaces(
    ops: &[DMatrix<f64>],
    rel_gap: f64,
) -> Vec<(Vec<f64>, DMatrix<f64>)> {
    let n = ops.first().map(|m| m.nrows()).unwrap_or(0);
    let mut blocks: Vec<(Vec<f64>, DMatrix<f64>)> = vec![(Vec::new(), DMatrix::identity(n, n))];
    for op in ops {
        let scale = op.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
        let mut next = Vec::new();
        for (vals, basis) in blocks {
            let sub = basis.transpose() * op * &basis;
            let (evals, evecs) = sym_eigen(&sub);
            let carried = &basis * evecs;
            // group adjacent eigenvalues closer than the relative gap
            let mut start = 0;
            while start < evals.len() {
                let mut end = start + 1;
                while end < evals.len() && (evals[end - 1] - evals[end]).abs() <= rel_gap * scale {
                    end += 1;
                }
                let mean = evals[start..end].iter().sum::<f64>() / (end - start) as f64;
                let mut vals2 = vals.clone();
                vals2.push(mean);
                next.push((vals2, carried.columns(start, end - start).into_owned()));
                start = end;
            }
        }
        blocks = next;
    }
    blocks
}

/// Thin complex SVD by one-sided Jacobi: returns (U, sigma, V) with
/// B = U diag(sigma) V^dagger and sigma descending. Chosen over the
/// library SVD because clustered singular values need the high relative
/// accuracy of Jacobi at these small sizes.
pub fn complex_svd_jacobi(b: &CMat) -> (CMat, Vec<f64>, CMat) {
    let (p, q) = b.shape();
    if p < q {
        let (u, s, v) = complex_svd_jacobi(&b.adjoint());
        return (v, s, u);
    }
    // orthogonalize the columns of a working copy of B (p >= q)
    let mut a = b.clone();
    let mut v = CMat::identity(q, q);
    let eps = 1e-15;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..q {
            for j in (i + 1)..q {
                let ai = a.column(i).into_owned();
                let aj = a.column(j).into_owned();
                let na = ai.iter().map(|z| z.norm_sqr()).sum::<f64>();
                let nb = aj.iter().map(|z| z.norm_sqr()).sum::<f64>();
                let c: Complex<f64> = ai
                    .iter()
                    .zip(aj.iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let gate = eps * (na * nb).sqrt();
                if c.norm() <= gate || na * nb == 0.0 {
                    continue;
                }
                off = off.max(c.norm() / (na * nb).sqrt());
                let phase = c / c.norm();
                let g = c.norm();
                let tau = (nb - na) / (2.0 * g);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                // new_i = cs a_i - sn phase^* a_j ; new_j = sn phase a_i + cs a_j
                for r in 0..p {
                    let x = a[(r, i)];
                    let y = a[(r, j)];
                    a[(r, i)] = x * cs - y * phase.conj() * sn;
                    a[(r, j)] = x * phase * sn + y * cs;
                }
                for r in 0..q {
                    let x = v[(r, i)];
                    let y = v[(r, j)];
                    v[(r, i)] = x * cs - y * phase.conj() * sn;
                    v[(r, j)] = x * phase * sn + y * cs;
                }
            }
        }
        if off <= eps {
            break;
        }
    }
    let mut sigma: Vec<f64> = (0..q)
        .map(|j| a.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&x, &y| sigma[y].partial_cmp(&sigma[x]).unwrap());
    let mut u = CMat::zeros(p, q);
    let mut v_sorted = CMat::zeros(q, q);
    let mut s_sorted = vec![0.0; q];
    for (k, &j) in order.iter().enumerate() {
        s_sorted[k] = sigma[j];
        if sigma[j] > 0.0 {
            let col = a.column(j) / Complex::new(sigma[j], 0.0);
            u.set_column(k, &col);
        }
        v_sorted.set_column(k, &v.column(j));
    }
    sigma = s_sorted;
    (u, sigma, v_sorted)
}

/// Max-abs residual of `op*x - lambda*x` over the columns of `basis`.
pub fn eigen_residual(op: &DMatrix<f64>, lambda: f64, basis: &DMatrix<f64>) -> f64 {
    let r = op * basis - basis * lambda;
    r.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Projects `v` onto the column span of `q` (columns assumed orthonormal).
pub fn project_onto(q: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    q * (q.transpose() * v)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

pub fn max_abs_vec(v: &DVector<f64>) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Modified Gram-Schmidt in the Euclidean metric; drops dependent columns.
pub fn orthonormalize_in(n: usize, cols: &[DVector<f64>], tol: f64) -> DMatrix<f64> {
    let mut kept: Vec<DVector<f64>> = Vec::new();
    for c in cols {
        let mut v = c.clone();
        for u in &kept {
            let d = u.dot(&v);
            v -= u * d;
        }
        // second pass for numerical stability
        for u in &kept {
            let d = u.dot(&v);
            v -= u * d;
        }
        let norm = v.norm();
        if norm > tol {
            kept.push(v / norm);
        }
    }
    let mut q = DMatrix::zeros(n, kept.len());
    for (i, u) in kept.iter().enumerate() {
        q.set_column(i, u);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joint_eigenspaces_splits_commuting_pair() {
        // diag(1,1,2) and diag(3,4,5) commute; joint spaces are all 1-dim
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 2.0]));
        let b = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 4.0, 5.0]));
        let blocks = joint_eigenspaces(&[a, b], 1e-9);
        assert_eq!(blocks.len(), 3);
        for (vals, basis) in &blocks {
            assert_eq!(vals.len(), 2);
            assert_eq!(basis.ncols(), 1);
        }
    }

    #[test]
    fn mat_exp_matches_rotation() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.3, 1.3, 0.0]);
        let e = mat_exp(&a);
        assert!((e[(0, 0)] - 1.3f64.cos()).abs() < 1e-14);
        assert!((e[(1, 0)] - 1.3f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn jacobi_svd_reconstructs_clustered_spectra() {
        use nalgebra::Complex;
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for (p, q) in [(3, 3), (2, 4), (4, 2), (1, 3)] {
            for trial in 0..20 {
                let mut b = CMat::zeros(p, q);
                for z in b.iter_mut() {
                    *z = Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                }
                // squeeze two singular values together on some trials
                if trial % 3 == 0 && p.min(q) >= 2 {
                    let (u0, s, v0) = complex_svd_jacobi(&b);
                    let mut s2 = s.clone();
                    s2[1] = s2[0] - 1e-7;
                    let d = CMat::from_fn(p.min(q), p.min(q), |i, j| {
                        if i == j {
                            Complex::new(s2[i], 0.0)
                        } else {
                            Complex::new(0.0, 0.0)
                        }
                    });
                    b = &u0 * d * v0.adjoint();
                }
                let (u, s, v) = complex_svd_jacobi(&b);
                let d = CMat::from_fn(p.min(q), p.min(q), |i, j| {
                    if i == j {
                        Complex::new(s[i], 0.0)
                    } else {
                        Complex::new(0.0, 0.0)
                    }
                });
                let err = (&b - &u * d * v.adjoint())
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                assert!(err < 1e-13, "({p},{q}) trial {trial}: residual {err:.3e}");
                for w in s.windows(2) {
                    assert!(w[0] >= w[1]);
                }
            }
        }
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let ns = nullspace(&m, 1e-12);
        assert_eq!(ns.len(), 1);
        assert!((ns[0][2].abs() - 1.0).abs() < 1e-12);
    }
}
