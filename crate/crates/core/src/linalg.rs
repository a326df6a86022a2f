//! Dense linear-algebra and sampling helpers shared by the numeric modules.

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Deterministic generator for a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for item `index` of a batch, so items can run in any order.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard complex Gaussian: real and imaginary parts iid N(0, 1/2).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    // column-major fill keeps the draw order fixed
    let data: Vec<C64> = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    CMatrix::from_vec(rows, cols, data)
}

/// Haar-random isometry (`rows ≥ cols`) from the QR factor of a Gaussian
/// matrix, with the phases of the triangular diagonal moved into `Q`.
pub fn haar_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = gaussian_matrix(rng, rows, cols);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    haar_isometry(rng, d, d)
}

/// `(H + H†) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = hermitian_part(m);
    let n = h.nrows();
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Orthonormal basis (as columns) of the top-`k` eigenspace.
pub fn top_eigenvectors(m: &CMatrix, k: usize) -> CMatrix {
    let (_, vecs) = hermitian_eigen(m);
    vecs.columns(0, k).into_owned()
}

pub fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Applies the `d_out × d_in` matrix `m` to tensor leg `party` of a
/// row-major tensor with shape `dims`. Returns the new amplitudes.
pub fn apply_local(amps: &[C64], dims: &[usize], party: usize, m: &CMatrix) -> Vec<C64> {
    let d_in = dims[party];
    let d_out = m.nrows();
    assert_eq!(m.ncols(), d_in, "operator width must match the party dimension");
    let outer: usize = dims[..party].iter().product();
    let inner: usize = dims[party + 1..].iter().product();
    let mut out = vec![C64::new(0.0, 0.0); outer * d_out * inner];
    for o in 0..outer {
        for j in 0..d_in {
            let src = &amps[(o * d_in + j) * inner..(o * d_in + j + 1) * inner];
            for i in 0..d_out {
                let c = m[(i, j)];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let dst = &mut out[(o * d_out + i) * inner..(o * d_out + i + 1) * inner];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += c * s;
                }
            }
        }
    }
    out
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn to_vector(v: &[C64]) -> DVector<C64> {
    DVector::from_column_slice(v)
}

/// Multiplies every column of `q` by the phase that makes its first
/// nonzero entry real and positive.
pub fn fix_column_phases(q: &mut CMatrix) {
    for mut col in q.column_iter_mut() {
        if let Some(z) = col.iter().copied().find(|z| z.norm() > 1e-12) {
            let phase = z.conj() / z.norm();
            col *= phase;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_isometry_is_isometric() {
        let mut r = rng(3);
        let v = haar_isometry(&mut r, 6, 2);
        let gram = v.adjoint() * &v;
        assert!(frobenius(&(gram - CMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn eigen_order_is_descending() {
        let m = CMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::new(0.2, 0.0),
            C64::new(0.7, 0.0),
            C64::new(0.1, 0.0),
        ]));
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] - 0.7).abs() < 1e-14 && (vals[2] - 0.1).abs() < 1e-14);
        assert!((vecs[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn apply_local_matches_kron() {
        let mut r = rng(5);
        let dims = [2, 3];
        let amps: Vec<C64> = (0..6).map(|_| complex_gaussian(&mut r)).collect();
        let m = gaussian_matrix(&mut r, 3, 3);
        let got = apply_local(&amps, &dims, 1, &m);
        let full = kron(&CMatrix::identity(2, 2), &m) * to_vector(&amps);
        for (a, b) in got.iter().zip(full.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(0, 0), derive_seed(0, 1));
        assert_ne!(derive_seed(0, 0), derive_seed(1, 0));
    }
}
