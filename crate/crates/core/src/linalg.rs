//! Dense linear algebra helpers shared by the solvers and norm oracles.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Smallest eigenvalue of a symmetric matrix (the upper triangle is trusted).
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn max_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Square root of a symmetric positive semidefinite matrix; negative
/// eigenvalues from round-off are clipped to zero.
pub fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    spectral_map(m, |l| l.max(0.0).sqrt())
}

/// Moore-Penrose inverse of the PSD square root, discarding eigenvalues below
/// `tol * largest`.
pub fn psd_pinv_sqrt(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let top = max_eigenvalue(m).max(0.0);
    let cut = tol * top.max(f64::MIN_POSITIVE);
    spectral_map(m, |l| if l > cut { 1.0 / l.sqrt() } else { 0.0 })
}

/// Moore-Penrose inverse of a symmetric PSD matrix.
pub fn psd_pinv(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let top = max_eigenvalue(m).max(0.0);
    let cut = tol * top.max(f64::MIN_POSITIVE);
    spectral_map(m, |l| if l > cut { 1.0 / l } else { 0.0 })
}

fn spectral_map(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let n = m.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    let d = DVector::from_iterator(n, eig.eigenvalues.iter().map(|&l| f(l)));
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&d) * v.transpose()
}

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    m.clone().svd(false, false).singular_values.iter().cloned().collect()
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

pub fn nuclear_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).into_iter().sum()
}

/// Top singular triple `(sigma, u, v)` with `m v = sigma u`.
pub fn top_singular_pair(m: &DMatrix<f64>) -> (f64, DVector<f64>, DVector<f64>) {
    let svd = m.clone().svd(true, true);
    let (mut best, mut idx) = (f64::NEG_INFINITY, 0);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > best {
            best = s;
            idx = i;
        }
    }
    let u = svd.u.as_ref().expect("u requested").column(idx).into_owned();
    let v = svd.v_t.as_ref().expect("v_t requested").row(idx).transpose();
    (best, u, v)
}

pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// Largest `alpha <= cap` with `x + alpha * dx` positive semidefinite, given
/// the Cholesky factor `l` of `x`.
pub fn max_psd_step(l: &DMatrix<f64>, dx: &DMatrix<f64>, cap: f64) -> f64 {
    let n = l.nrows();
    if n == 0 {
        return cap;
    }
    let w = l
        .solve_lower_triangular(dx)
        .expect("cholesky factor is nonsingular");
    let w2 = l
        .solve_lower_triangular(&w.transpose())
        .expect("cholesky factor is nonsingular");
    let lam = min_eigenvalue(&w2);
    if lam >= 0.0 {
        cap
    } else {
        (-1.0 / lam).min(cap)
    }
}

pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
