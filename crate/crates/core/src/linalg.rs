//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `max |U^dag U - I|` over all entries.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let n = u.ncols();
    let g = u.adjoint() * u;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn hermitian_min_eigenvalue(h: CMatrix) -> f64 {
    if h.nrows() == 0 {
        return 0.0;
    }
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Singular values, sorted in decreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Left singular vectors whose singular value exceeds `threshold`, ordered by
/// decreasing singular value, each with its largest component made real and
/// positive.
pub fn dominant_left_singular_vectors(m: &CMatrix, threshold: f64) -> Vec<CVector> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested left singular vectors");
    let mut picked: Vec<(f64, CVector)> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > threshold)
        .map(|(k, &s)| (s, fix_phase(u.column(k).into_owned())))
        .collect();
    picked.sort_by(|a, b| b.0.total_cmp(&a.0));
    picked.into_iter().map(|(_, v)| v).collect()
}

/// Rotates the global phase so the largest-magnitude entry is real positive.
pub fn fix_phase(v: CVector) -> CVector {
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(c(0.0, 0.0));
    if pivot.norm() == 0.0 {
        return v;
    }
    let phase = pivot.conj() / pivot.norm();
    v * phase
}

/// Extends orthonormal `seed` vectors in `C^n` to a full orthonormal basis,
/// drawing candidates from the standard basis in order.
pub fn complete_orthonormal(seed: Vec<CVector>, n: usize) -> Vec<CVector> {
    let mut out = seed;
    for k in 0..n {
        if out.len() >= n {
            break;
        }
        let mut v = CVector::from_fn(n, |i, _| if i == k { c(1.0, 0.0) } else { c(0.0, 0.0) });
        for _pass in 0..2 {
            for q in &out {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            out.push(v / c(norm, 0.0));
        }
    }
    out
}

/// Haar-random `n x n` unitary (QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal divided out).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) / c(std::f64::consts::SQRT_2, 0.0)
    });
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Real `2n x 2n` image of a passive mode transformation `a -> U a` acting on
/// interleaved quadratures `(X_1, Y_1, ..., X_n, Y_n)`.
pub fn quadrature_rotation(u: &CMatrix) -> RMatrix {
    let n = u.nrows();
    let mut o = RMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for k in 0..n {
            let z = u[(i, k)];
            o[(2 * i, 2 * k)] = z.re;
            o[(2 * i, 2 * k + 1)] = -z.im;
            o[(2 * i + 1, 2 * k)] = z.im;
            o[(2 * i + 1, 2 * k + 1)] = z.re;
        }
    }
    o
}

/// Standard symplectic form `Omega = diag([[0, 1], [-1, 0]], ...)`.
pub fn symplectic_form(n: usize) -> RMatrix {
    let mut w = RMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        w[(2 * i, 2 * i + 1)] = 1.0;
        w[(2 * i + 1, 2 * i)] = -1.0;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..7 {
            let u = random_unitary(n, &mut rng);
            assert!(unitarity_deviation(&u) < 1e-12);
        }
    }

    #[test]
    fn quadrature_image_is_orthogonal_and_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(4, &mut rng);
        let o = quadrature_rotation(&u);
        let id = RMatrix::identity(8, 8);
        assert!((o.transpose() * &o - &id).amax() < 1e-12);
        let w = symplectic_form(4);
        assert!((&o * &w * o.transpose() - w).amax() < 1e-12);
    }

    #[test]
    fn completion_is_orthonormal() {
        let v = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)]);
        let all = complete_orthonormal(vec![v.clone()], 3);
        assert_eq!(all.len(), 3);
        assert_eq!(all[0], v);
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let t = if i == j { 1.0 } else { 0.0 };
                assert!((a.dotc(b) - c(t, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_values_sorted() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 3.0), c(2.0, 0.0)]));
        let s = singular_values(&m);
        assert!((s[0] - 3.0).abs() < 1e-12 && (s[2] - 1.0).abs() < 1e-12);
    }
}
