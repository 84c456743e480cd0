//! Small dense complex linear algebra.
//!
//! Everything here works on tiny matrices (dimension at most 16): Hermitian
//! eigendecomposition by cyclic Jacobi rotations, Gram-Schmidt rank revelation,
//! principal angles through a one-sided Jacobi SVD, and the embeddings of real
//! and holomorphic tangent vectors into the complexified tangent space.
//!
//! Complexified vectors in `C^{2n}` use the frame
//! `(d/dz_1, ..., d/dz_n, d/dzbar_1, ..., d/dzbar_n)` and real vectors in
//! `R^{2n}` use the coordinate order `(x_1, y_1, ..., x_n, y_n)`.

use num::complex::Complex64;
use num::Zero;

use crate::error::{LeviError, Result};

pub type C64 = Complex64;

/// Default principal-angle cosine deficit for [`subspace_intersect`].
pub const DEFAULT_INTERSECT_TOL: f64 = 1e-8;

const HERMITIAN_TOL: f64 = 1e-12;
const MAX_JACOBI_SWEEPS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    // row-major
    data: Vec<C64>,
}

impl HermitianMatrix {
    /// Builds a Hermitian matrix from row-major entries. The mirror condition is
    /// checked to 1e-12 absolute and the stored matrix is exactly Hermitian.
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(LeviError::DimensionMismatch(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LeviError::NonFinite("Hermitian matrix entries"));
        }
        for row in 0..dim {
            for col in row..dim {
                let a = data[row * dim + col];
                let b = data[col * dim + row].conj();
                let defect = (a - b).norm();
                if defect > HERMITIAN_TOL {
                    return Err(LeviError::NotHermitian { row, col, defect });
                }
            }
        }
        let mut m = HermitianMatrix { dim, data };
        for row in 0..dim {
            let d = m.data[row * dim + row].re;
            m.data[row * dim + row] = C64::new(d, 0.0);
            for col in row + 1..dim {
                let avg = (m.data[row * dim + col] + m.data[col * dim + row].conj()) * 0.5;
                m.data[row * dim + col] = avg;
                m.data[col * dim + row] = avg.conj();
            }
        }
        Ok(m)
    }

    pub fn from_real_symmetric(dim: usize, data: &[f64]) -> Result<Self> {
        Self::new(dim, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        let mut data = vec![C64::zero(); dim * dim];
        for (k, &v) in values.iter().enumerate() {
            data[k * dim + k] = C64::new(v, 0.0);
        }
        Self::new(dim, data)
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim]).expect("identity is Hermitian")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    /// Congruence `B* A B` for a column frame `B` (each inner vec is a column).
    pub fn congruence(&self, frame: &[Vec<C64>]) -> Result<HermitianMatrix> {
        let k = frame.len();
        let mut data = vec![C64::zero(); k * k];
        for (a, col_a) in frame.iter().enumerate() {
            for (b, col_b) in frame.iter().enumerate() {
                data[a * k + b] = inner(col_a, &self.mul_vec(col_b));
            }
        }
        HermitianMatrix::new(k, data)
    }

    pub fn transpose(&self) -> HermitianMatrix {
        let n = self.dim;
        let mut data = vec![C64::zero(); n * n];
        for r in 0..n {
            for c in 0..n {
                data[r * n + c] = self.get(c, r);
            }
        }
        HermitianMatrix { dim: n, data }
    }

    pub fn scaled(&self, factor: f64) -> HermitianMatrix {
        HermitianMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

impl Eigen {
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot with a diagonal unitary,
/// then applies the real Jacobi rotation that annihilates it.
pub fn hermitian_eigen(h: &HermitianMatrix) -> Eigen {
    let n = h.dim();
    let mut a: Vec<C64> = h.entries().to_vec();
    let mut v = vec![C64::zero(); n * n];
    for k in 0..n {
        v[k * n + k] = C64::new(1.0, 0.0);
    }
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let floor = (f64::EPSILON * f64::EPSILON) * total.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off <= floor {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag == 0.0 || mag * mag <= floor * 1e-4 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U = D P with D = diag(1, conj(phase)) on (p, q)
                let upp = C64::new(c, 0.0);
                let upq = C64::new(s, 0.0);
                let uqp = phase.conj() * (-s);
                let uqq = phase.conj() * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * upp + akq * uqp;
                    a[k * n + q] = akp * upq + akq * uqq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = upp.conj() * apk + uqp.conj() * aqk;
                    a[q * n + k] = upq.conj() * apk + uqq.conj() * aqk;
                }
                a[p * n + q] = C64::zero();
                a[q * n + p] = C64::zero();
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * upp + vkq * uqp;
                    v[k * n + q] = vkp * upq + vkq * uqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    Eigen {
        values: order.iter().map(|&k| a[k * n + k].re).collect(),
        vectors: order
            .iter()
            .map(|&k| (0..n).map(|r| v[r * n + k]).collect())
            .collect(),
    }
}

/// Hermitian inner product `<a, b> = sum conj(a_k) b_k`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal basis of a complex subspace. The zero subspace has no columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    vectors: Vec<Vec<C64>>,
    tol: f64,
}

impl SubspaceBasis {
    pub fn zero(ambient_dim: usize) -> Self {
        SubspaceBasis {
            ambient_dim,
            vectors: Vec::new(),
            tol: DEFAULT_INTERSECT_TOL,
        }
    }

    /// Wraps columns that are already orthonormal. Callers inside the crate
    /// use this after their own orthonormalization.
    pub(crate) fn from_orthonormal(ambient_dim: usize, vectors: Vec<Vec<C64>>, tol: f64) -> Self {
        debug_assert!(vectors.iter().all(|v| v.len() == ambient_dim));
        SubspaceBasis {
            ambient_dim,
            vectors,
            tol,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_zero(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::zero(); self.ambient_dim];
        for b in &self.vectors {
            let c = inner(b, v);
            for (o, x) in out.iter_mut().zip(b) {
                *o += c * x;
            }
        }
        out
    }

    /// Applies a linear map to every column and re-orthonormalizes.
    pub fn map<F>(&self, f: F) -> SubspaceBasis
    where
        F: Fn(&[C64]) -> Vec<C64>,
    {
        let mapped: Vec<Vec<C64>> = self.vectors.iter().map(|v| f(v)).collect();
        let ambient = mapped.first().map_or(self.ambient_dim, |v| v.len());
        let mut b = orthonormalize(ambient, &mapped, 1e-12);
        b.tol = self.tol;
        b
    }

    /// Spans agree: same dimension and every principal cosine at least `1 - tol`.
    pub fn same_span(&self, other: &SubspaceBasis, tol: f64) -> bool {
        if self.dim() != other.dim() || self.ambient_dim != other.ambient_dim {
            return false;
        }
        principal_angles(self, other)
            .map(|c| c.iter().all(|&x| x >= 1.0 - tol))
            .unwrap_or(false)
    }
}

/// Modified Gram-Schmidt with one reorthogonalization pass. Vectors whose
/// residual norm is at most `tol` are dropped.
pub fn orthonormalize(ambient_dim: usize, vectors: &[Vec<C64>], tol: f64) -> SubspaceBasis {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        assert_eq!(v.len(), ambient_dim, "vector length differs from ambient dimension");
        if basis.len() == ambient_dim {
            break;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &r);
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let nr = norm(&r);
        if nr > tol {
            for x in r.iter_mut() {
                *x /= nr;
            }
            basis.push(r);
        }
    }
    SubspaceBasis {
        ambient_dim,
        vectors: basis,
        tol,
    }
}

/// Thin SVD of a small complex matrix given as columns, by one-sided Jacobi.
pub(crate) struct SmallSvd {
    /// Singular values, descending.
    pub sigma: Vec<f64>,
    /// Left singular vectors (length = rows).
    pub left: Vec<Vec<C64>>,
    /// Right singular vectors (length = cols).
    pub right: Vec<Vec<C64>>,
}

pub(crate) fn small_svd(rows: usize, columns: &[Vec<C64>]) -> SmallSvd {
    let cols = columns.len();
    if cols > rows {
        // work on the conjugate transpose so that the column count is minimal
        let adj: Vec<Vec<C64>> = (0..rows)
            .map(|r| columns.iter().map(|c| c[r].conj()).collect())
            .collect();
        let s = small_svd(cols, &adj);
        return SmallSvd {
            sigma: s.sigma,
            left: s.right,
            right: s.left,
        };
    }
    let mut w: Vec<Vec<C64>> = columns.to_vec();
    let mut v: Vec<Vec<C64>> = (0..cols)
        .map(|k| {
            let mut e = vec![C64::zero(); cols];
            e[k] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    for _ in 0..60 {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let alpha: f64 = w[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&w[i], &w[j]);
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..rows {
                    let wi = w[i][k];
                    let wj = w[j][k] * phase.conj();
                    w[i][k] = wi * c - wj * s;
                    w[j][k] = wi * s + wj * c;
                }
                for k in 0..cols {
                    let vi = v[i][k];
                    let vj = v[j][k] * phase.conj();
                    v[i][k] = vi * c - vj * s;
                    v[j][k] = vi * s + vj * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut triples: Vec<(f64, Vec<C64>, Vec<C64>)> = w
        .into_iter()
        .zip(v)
        .map(|(wc, vc)| {
            let s = norm(&wc);
            let u = if s > 0.0 {
                wc.iter().map(|z| z / s).collect()
            } else {
                vec![C64::zero(); rows]
            };
            (s, u, vc)
        })
        .collect();
    triples.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut out = SmallSvd {
        sigma: Vec::with_capacity(cols),
        left: Vec::with_capacity(cols),
        right: Vec::with_capacity(cols),
    };
    for (s, u, vc) in triples {
        out.sigma.push(s);
        out.left.push(u);
        out.right.push(vc);
    }
    out
}

fn cross_gram(a: &SubspaceBasis, b: &SubspaceBasis) -> Vec<Vec<C64>> {
    // columns of A* B
    b.vectors
        .iter()
        .map(|bv| a.vectors.iter().map(|av| inner(av, bv)).collect())
        .collect()
}

fn check_ambient(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<()> {
    if a.ambient_dim != b.ambient_dim {
        return Err(LeviError::DimensionMismatch(format!(
            "subspaces live in C^{} and C^{}",
            a.ambient_dim, b.ambient_dim
        )));
    }
    Ok(())
}

/// Cosines of the principal angles between two subspaces, descending, clamped
/// to `[0, 1]`. Empty when either side is the zero subspace.
pub fn principal_angles(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<Vec<f64>> {
    check_ambient(a, b)?;
    if a.is_zero() || b.is_zero() {
        return Ok(Vec::new());
    }
    let svd = small_svd(a.dim(), &cross_gram(a, b));
    let k = a.dim().min(b.dim());
    Ok(svd.sigma.iter().take(k).map(|s| s.clamp(0.0, 1.0)).collect())
}

/// Intersection of two subspaces: the span of principal-vector pairs whose
/// cosine deficit is at most `tol`. Each returned direction is the normalized
/// mean of the paired principal vectors, which makes the result symmetric in
/// the arguments.
pub fn subspace_intersect(a: &SubspaceBasis, b: &SubspaceBasis, tol: f64) -> Result<SubspaceBasis> {
    check_ambient(a, b)?;
    let n = a.ambient_dim;
    if a.is_zero() || b.is_zero() {
        return Ok(SubspaceBasis {
            ambient_dim: n,
            vectors: Vec::new(),
            tol,
        });
    }
    let svd = small_svd(a.dim(), &cross_gram(a, b));
    let k = a.dim().min(b.dim());
    let mut dirs = Vec::new();
    for idx in 0..k {
        if svd.sigma[idx] < 1.0 - tol {
            break;
        }
        let mut in_a = vec![C64::zero(); n];
        for (coef, av) in svd.left[idx].iter().zip(&a.vectors) {
            for (o, x) in in_a.iter_mut().zip(av) {
                *o += coef * x;
            }
        }
        let mut in_b = vec![C64::zero(); n];
        for (coef, bv) in svd.right[idx].iter().zip(&b.vectors) {
            for (o, x) in in_b.iter_mut().zip(bv) {
                *o += coef * x;
            }
        }
        // A u and B v are aligned up to a unit phase: A u = sigma^{-1} A A* B v
        let phase = inner(&in_a, &in_b);
        let ph = if phase.norm() > 0.0 { phase / phase.norm() } else { C64::new(1.0, 0.0) };
        dirs.push(
            in_a.iter()
                .zip(&in_b)
                .map(|(x, y)| (x * ph + y) * 0.5)
                .collect::<Vec<_>>(),
        );
    }
    let mut out = orthonormalize(n, &dirs, 1e-12);
    out.tol = tol;
    Ok(out)
}

/// Complexification of a real tangent vector given in `(x_1, y_1, ..., x_n, y_n)`
/// coordinates: the coefficient on `d/dz_j` is `v_{x_j} + i v_{y_j}` and the
/// coefficient on `d/dzbar_j` is its conjugate.
pub fn embed_real_tangent(v: &[f64]) -> Vec<C64> {
    assert!(v.len() % 2 == 0, "real tangent vectors have even length");
    let n = v.len() / 2;
    let mut out = vec![C64::zero(); 2 * n];
    for j in 0..n {
        let c = C64::new(v[2 * j], v[2 * j + 1]);
        out[j] = c;
        out[n + j] = c.conj();
    }
    out
}

/// Type (1,0) vector into the complexified tangent space: `(X, 0)`.
pub fn embed_holomorphic(x: &[C64]) -> Vec<C64> {
    let mut out = x.to_vec();
    out.extend(std::iter::repeat(C64::zero()).take(x.len()));
    out
}

/// Complex span of a family of real tangent vectors.
pub fn complexify_real_span(vectors: &[Vec<f64>], tol: f64) -> SubspaceBasis {
    let n2 = vectors.first().map_or(0, |v| v.len());
    let embedded: Vec<Vec<C64>> = vectors.iter().map(|v| embed_real_tangent(v)).collect();
    orthonormalize(n2, &embedded, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn e(n: usize, k: usize) -> Vec<C64> {
        let mut v = vec![C64::zero(); n];
        v[k] = c(1.0, 0.0);
        v
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn rejects_non_hermitian() {
        let err = HermitianMatrix::new(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(err, Err(LeviError::NotHermitian { .. })));
        let err = HermitianMatrix::new(1, vec![c(f64::NAN, 0.0)]);
        assert!(matches!(err, Err(LeviError::NonFinite(_))));
    }

    #[test]
    fn identity_eigenvalues() {
        let eig = hermitian_eigen(&HermitianMatrix::identity(3));
        assert_eq!(eig.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_eigenpairs() {
        let eig = hermitian_eigen(&HermitianMatrix::diagonal(&[2.0, 0.0]).unwrap());
        assert_eq!(eig.values, vec![0.0, 2.0]);
        assert!((eig.vectors[0][1].norm() - 1.0).abs() < 1e-15);
        assert!((eig.vectors[1][0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_matches_quadratic_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let a: f64 = rng.gen_range(-5.0..5.0);
            let d: f64 = rng.gen_range(-5.0..5.0);
            let b = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let h = HermitianMatrix::new(2, vec![c(a, 0.0), b, b.conj(), c(d, 0.0)]).unwrap();
            let eig = hermitian_eigen(&h);
            // roots of t^2 - (a+d) t + (ad - |b|^2)
            let mean = 0.5 * (a + d);
            let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            let expected = [mean - rad, mean + rad];
            let scale = expected[0].abs().max(expected[1].abs()).max(1e-300);
            for (got, want) in eig.values.iter().zip(expected) {
                assert!((got - want).abs() <= 1e-10 * scale, "{got} vs {want}");
            }
        }
    }

    #[test]
    fn eigen_residual_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 3, 5, 8, 16] {
            let mut data = vec![C64::zero(); n * n];
            for r in 0..n {
                data[r * n + r] = c(rng.gen_range(-3.0..3.0), 0.0);
                for s in r + 1..n {
                    let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    data[r * n + s] = z;
                    data[s * n + r] = z.conj();
                }
            }
            let h = HermitianMatrix::new(n, data).unwrap();
            let eig = hermitian_eigen(&h);
            let scale = 1.0 + h.frobenius_norm();
            for w in eig.values.windows(2) {
                assert!(w[0] <= w[1]);
            }
            for (lam, v) in eig.values.iter().zip(&eig.vectors) {
                let hv = h.mul_vec(v);
                let res: f64 = hv.iter().zip(v).map(|(x, y)| (x - y * lam).norm_sqr()).sum::<f64>().sqrt();
                assert!(res <= 1e-10 * scale);
            }
            for i in 0..n {
                for j in 0..n {
                    let ip = inner(&eig.vectors[i], &eig.vectors[j]);
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - c(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn orthonormalize_collapses_duplicates() {
        let b = orthonormalize(3, &[e(3, 0), e(3, 0)], 1e-10);
        assert_eq!(b.dim(), 1);
        let b = orthonormalize(3, &[e(3, 0), e(3, 1)], 1e-10);
        assert_eq!(b.dim(), 2);
        assert!(orthonormalize(4, &[], 1e-10).is_zero());
    }

    #[test]
    fn orthonormalize_reveals_rank_of_constructed_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let gens: Vec<Vec<C64>> = (0..3).map(|_| random_vec(&mut rng, 8)).collect();
            let vectors: Vec<Vec<C64>> = (0..50)
                .map(|_| {
                    let coeffs = random_vec(&mut rng, 3);
                    (0..8)
                        .map(|k| (0..3).map(|g| coeffs[g] * gens[g][k]).sum())
                        .collect()
                })
                .collect();
            assert_eq!(orthonormalize(8, &vectors, 1e-9).dim(), 3);
        }
    }

    #[test]
    fn principal_angle_examples() {
        let a = orthonormalize(3, &[e(3, 0), e(3, 1)], 1e-12);
        let cos = principal_angles(&a, &a).unwrap();
        assert!(cos.iter().all(|&x| (x - 1.0).abs() < 1e-14));

        let x = orthonormalize(3, &[e(3, 0)], 1e-12);
        let y = orthonormalize(3, &[e(3, 1)], 1e-12);
        assert_eq!(principal_angles(&x, &y).unwrap(), vec![0.0]);

        let diag = orthonormalize(3, &[vec![c(1.0, 0.0), c(1.0, 0.0), C64::zero()]], 1e-12);
        let cos = principal_angles(&x, &diag).unwrap();
        assert!((cos[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);

        assert!(principal_angles(&x, &SubspaceBasis::zero(3)).unwrap().is_empty());
        assert!(principal_angles(&x, &SubspaceBasis::zero(2)).is_err());
    }

    #[test]
    fn intersect_examples() {
        let a = orthonormalize(4, &[e(4, 0), e(4, 2)], 1e-12);
        let aa = subspace_intersect(&a, &a, DEFAULT_INTERSECT_TOL).unwrap();
        assert!(aa.same_span(&a, 1e-12));
        let x = orthonormalize(2, &[e(2, 0)], 1e-12);
        let y = orthonormalize(2, &[e(2, 1)], 1e-12);
        assert!(subspace_intersect(&x, &y, DEFAULT_INTERSECT_TOL).unwrap().is_zero());
    }

    #[test]
    fn embeddings() {
        assert_eq!(embed_real_tangent(&[1.0, 0.0]), vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(embed_real_tangent(&[0.0, 1.0]), vec![c(0.0, 1.0), c(0.0, -1.0)]);
        assert_eq!(embed_holomorphic(&e(2, 0)), vec![c(1.0, 0.0), C64::zero(), C64::zero(), C64::zero()]);
        assert_eq!(embed_holomorphic(&[C64::zero()]), vec![C64::zero(); 2]);
        let full: Vec<Vec<f64>> = (0..4)
            .map(|k| {
                let mut v = vec![0.0; 4];
                v[k] = 1.0;
                v
            })
            .collect();
        assert_eq!(complexify_real_span(&full, 1e-12).dim(), 4);
    }
}
