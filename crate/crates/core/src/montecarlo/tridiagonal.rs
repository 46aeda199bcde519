//! Householder reduction of a Hermitian matrix to real symmetric tridiagonal
//! form and Sturm-sequence bisection for its extreme eigenvalues.

use num_complex::Complex64;

/// Dense Hermitian matrix, row-major; only consistency of the full storage
/// is assumed (`a[j][i] = conj(a[i][j])`).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds the matrix from its lower triangle `f(i, j)`, `j <= i`. The
    /// imaginary part of the diagonal is dropped.
    pub fn from_lower(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                if i == j {
                    data[i * n + i] = Complex64::new(v.re, 0.0);
                } else {
                    data[i * n + j] = v;
                    data[j * n + i] = v.conj();
                }
            }
        }
        HermitianMatrix { n, data }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_lower(n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i].re).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        HermitianMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }
}

/// Real symmetric tridiagonal matrix: diagonal `d`, off-diagonal `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

/// Unitary similarity `Q* A Q` to tridiagonal form. Each Householder step
/// leaves a complex subdiagonal entry whose phase is removed by a diagonal
/// unitary, so only its modulus is kept.
///
/// Real and imaginary parts are stored apart so the inner loops vectorize.
pub fn tridiagonalize(a: &HermitianMatrix) -> SymTridiagonal {
    let n = a.n;
    let mut re: Vec<f64> = a.data.iter().map(|z| z.re).collect();
    let mut im: Vec<f64> = a.data.iter().map(|z| z.im).collect();
    let mut d = Vec::with_capacity(n);
    let mut e = Vec::with_capacity(n.saturating_sub(1));
    let (mut vr, mut vi) = (vec![0.0; n], vec![0.0; n]);
    let (mut pr, mut pi) = (vec![0.0; n], vec![0.0; n]);
    for k in 0..n.saturating_sub(1) {
        d.push(re[k * n + k]);
        let len = n - k - 1;
        let base = k + 1;
        let mut alpha2 = 0.0;
        for i in 0..len {
            let idx = (base + i) * n + k;
            vr[i] = re[idx];
            vi[i] = im[idx];
            alpha2 += vr[i] * vr[i] + vi[i] * vi[i];
        }
        let alpha = alpha2.sqrt();
        e.push(alpha);
        if alpha == 0.0 || len == 1 {
            continue;
        }
        let x0 = vr[0].hypot(vi[0]);
        let (cr, ci) = if x0 > 0.0 {
            (vr[0] / x0, vi[0] / x0)
        } else {
            (1.0, 0.0)
        };
        vr[0] += cr * alpha;
        vi[0] += ci * alpha;
        let vnorm2: f64 = (0..len).map(|i| vr[i] * vr[i] + vi[i] * vi[i]).sum();
        let tau = 2.0 / vnorm2;

        // p = A22 v = A22^H v, accumulated row by row so the inner loop
        // has no reduction.
        pr[..len].fill(0.0);
        pi[..len].fill(0.0);
        for i in 0..len {
            let row = (base + i) * n + base;
            let (ar, ai) = (&re[row..row + len], &im[row..row + len]);
            let (vri, vii) = (vr[i], vi[i]);
            for (((&a_r, &a_i), p_r), p_i) in ar
                .iter()
                .zip(ai)
                .zip(pr[..len].iter_mut())
                .zip(pi[..len].iter_mut())
            {
                *p_r += a_r * vri + a_i * vii;
                *p_i += a_r * vii - a_i * vri;
            }
        }
        for i in 0..len {
            pr[i] *= tau;
            pi[i] *= tau;
        }
        // w = p - (tau/2) Re(v* p) v
        let vp: f64 = (0..len).map(|i| vr[i] * pr[i] + vi[i] * pi[i]).sum();
        let kk = 0.5 * tau * vp;
        for i in 0..len {
            pr[i] -= kk * vr[i];
            pi[i] -= kk * vi[i];
        }
        // A22 -= v w* + w v*
        for i in 0..len {
            let row = (base + i) * n + base;
            let (vri, vii, wri, wii) = (vr[i], vi[i], pr[i], pi[i]);
            let (ar, ai) = (&mut re[row..row + len], &mut im[row..row + len]);
            for (((a_r, a_i), (&w_r, &w_i)), (&v_r, &v_i)) in ar
                .iter_mut()
                .zip(ai.iter_mut())
                .zip(pr[..len].iter().zip(&pi[..len]))
                .zip(vr[..len].iter().zip(&vi[..len]))
            {
                *a_r -= vri * w_r + vii * w_i + wri * v_r + wii * v_i;
                *a_i -= vii * w_r - vri * w_i + wii * v_r - wri * v_i;
            }
        }
    }
    if n > 0 {
        d.push(re[(n - 1) * n + n - 1]);
    }
    SymTridiagonal { d, e }
}

impl SymTridiagonal {
    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0f64;
        for i in 0..self.d.len() {
            let off = if i == 0 {
                0.0
            } else {
                self.e[i - 1] * self.e[i - 1]
            };
            q = self.d[i] - x - if i == 0 { 0.0 } else { off / q };
            if q == 0.0 {
                q = -f64::EPSILON * (x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.d.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.e[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.e[i].abs() } else { 0.0 };
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection to absolute
    /// width `tol`.
    pub fn eigenvalue(&self, k: usize, tol: f64) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        lo -= tol;
        hi += tol;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}
