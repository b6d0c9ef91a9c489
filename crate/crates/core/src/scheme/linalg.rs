//! Dense complex Householder QR with column pivoting.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::SimFloat;

/// Plain (non-conjugating) product `aᵀ b`.
pub fn dot_t<T: SimFloat>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::<T>::zero(), |acc, (x, y)| acc + x * y)
}

pub fn norm<T: SimFloat>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr()).sqrt()
}

/// `A P = Q R` for an `m × n` matrix `A` with `n <= m`, stored column-major.
pub struct PivotedQr<T> {
    m: usize,
    n: usize,
    /// `m × m`, column-major.
    q: Vec<Complex<T>>,
    /// `m × n`, column-major; upper triangular.
    r: Vec<Complex<T>>,
    /// `perm[k]` is the original column now at position `k`.
    perm: Vec<usize>,
}

impl<T: SimFloat> PivotedQr<T> {
    pub fn new(columns: &[&[Complex<T>]]) -> Self {
        let n = columns.len();
        let m = columns.first().map_or(0, |c| c.len());
        assert!(n <= m, "QR expects at least as many rows as columns");
        let mut r: Vec<Complex<T>> = columns.iter().flat_map(|c| c.iter().copied()).collect();
        let mut q = vec![Complex::<T>::zero(); m * m];
        for i in 0..m {
            q[i * m + i] = Complex::<T>::one();
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let two = T::lit(2.0);

        for j in 0..n {
            // pivot: largest remaining column norm below row j
            let tail_norm = |r: &[Complex<T>], c: usize| {
                (j..m).fold(T::zero(), |acc, i| acc + r[c * m + i].norm_sqr())
            };
            let best = (j..n)
                .max_by(|&a, &b| tail_norm(&r, a).partial_cmp(&tail_norm(&r, b)).unwrap())
                .unwrap();
            if best != j {
                for i in 0..m {
                    r.swap(j * m + i, best * m + i);
                }
                perm.swap(j, best);
            }

            let alpha = tail_norm(&r, j).sqrt();
            if alpha == T::zero() {
                continue;
            }
            let x0 = r[j * m + j];
            let phase = if x0.norm() == T::zero() {
                Complex::<T>::one()
            } else {
                x0 / x0.norm()
            };
            let mut v: Vec<Complex<T>> = (j..m).map(|i| r[j * m + i]).collect();
            v[0] = v[0] + phase * alpha;
            let vn = norm(&v);
            if vn == T::zero() {
                continue;
            }
            for x in &mut v {
                *x = *x / vn;
            }
            // R ← (I - 2 v vᴴ) R on the trailing block
            for c in j..n {
                let col = &mut r[c * m..(c + 1) * m];
                let proj = v
                    .iter()
                    .zip(&col[j..])
                    .fold(Complex::<T>::zero(), |acc, (vi, xi)| acc + vi.conj() * xi);
                for (vi, xi) in v.iter().zip(&mut col[j..]) {
                    *xi = *xi - *vi * proj * two;
                }
            }
            // Q ← Q (I - 2 v vᴴ)
            for row in 0..m {
                let proj = v
                    .iter()
                    .enumerate()
                    .fold(Complex::<T>::zero(), |acc, (k, vk)| acc + q[(j + k) * m + row] * *vk);
                for (k, vk) in v.iter().enumerate() {
                    let e = &mut q[(j + k) * m + row];
                    *e = *e - proj * vk.conj() * two;
                }
            }
        }
        Self { m, n, q, r, perm }
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn r_diag(&self, k: usize) -> T {
        self.r[k * self.m + k].norm()
    }

    /// Numerical rank: diagonal entries above `rtol * |R_00|`.
    pub fn rank(&self, rtol: T) -> usize {
        if self.n == 0 {
            return 0;
        }
        let top = self.r_diag(0);
        (0..self.n).take_while(|&k| self.r_diag(k) > rtol * top && self.r_diag(k) > T::zero()).count()
    }

    /// Column of `A (Aᴴ A)⁻¹` for original column `col`: the vector `w`
    /// in the span of `A` with `a_colᴴ w = 1` and `a_kᴴ w = 0` for every
    /// other column. Requires full column rank.
    pub fn dual_column(&self, col: usize) -> Vec<Complex<T>> {
        let (m, n) = (self.m, self.n);
        let pos = self.perm.iter().position(|&p| p == col).expect("column in range");
        // Rᴴ y = e_pos, forward substitution on the top n × n block
        let mut y = vec![Complex::<T>::zero(); n];
        for i in 0..n {
            let mut acc = if i == pos { Complex::<T>::one() } else { Complex::<T>::zero() };
            for k in 0..i {
                acc = acc - self.r[i * m + k].conj() * y[k];
            }
            y[i] = acc / self.r[i * m + i].conj();
        }
        (0..m)
            .map(|row| (0..n).fold(Complex::<T>::zero(), |acc, k| acc + self.q[k * m + row] * y[k]))
            .collect()
    }

    /// Orthonormal basis of the complement of `range(A)`: columns
    /// `rank..m` of `Q`.
    pub fn null_basis(&self, rank: usize) -> Vec<Vec<Complex<T>>> {
        (rank..self.m)
            .map(|k| self.q[k * self.m..(k + 1) * self.m].to_vec())
            .collect()
    }
}
