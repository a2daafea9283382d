//! Shared numeric kernels: power sums, Newton–Girard conversion, monic
//! polynomial root finding and minimum-cost assignment.

pub mod assignment;
pub mod roots;

use num_complex::Complex64;

pub use assignment::{assignment_min_cost, CostMatrix};
pub use roots::{monic_roots, RootSolver, DEFAULT_MAX_ITER, DEFAULT_TOL};

/// Power sums `E_n = sum_r r^n` for `n = 1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSums(pub Vec<Complex64>);

impl PowerSums {
    pub fn from_real(values: &[f64]) -> Self {
        Self(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Monic polynomial `t^N + sum_n (-1)^n a_n t^(N-n)` stored through its
/// elementary symmetric coefficients `a_1..a_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonicPoly {
    pub coeffs: Vec<Complex64>,
}

impl MonicPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// The monic polynomial whose roots are `roots`, expanded by repeated
    /// multiplication with `(t - r)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let desc = expand_roots(roots);
        let coeffs = desc
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &c)| if n % 2 == 0 { c } else { -c })
            .collect();
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficients in descending powers of `t`, leading `1` included.
    pub fn descending(&self) -> Vec<Complex64> {
        std::iter::once(Complex64::new(1.0, 0.0))
            .chain(
                self.coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| if (i + 1) % 2 == 0 { a } else { -a }),
            )
            .collect()
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        horner(&self.descending(), t)
    }
}

/// Descending coefficients of `prod (t - r)`.
pub(crate) fn expand_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        out.push(Complex64::new(0.0, 0.0));
        for k in (1..out.len()).rev() {
            let prev = out[k - 1];
            out[k] -= r * prev;
        }
    }
    out
}

pub(crate) fn horner(desc: &[Complex64], t: Complex64) -> Complex64 {
    desc.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
}

/// Elementary symmetric coefficients from power sums via the Newton–Girard
/// recurrence `n a_n = sum_{i=1..n} (-1)^(i-1) a_(n-i) E_i`, `a_0 = 1`.
///
/// This is the cofactor expansion of the band determinant form, evaluated
/// in `O(N^2)`.
pub fn newton_girard(sums: &PowerSums) -> MonicPoly {
    let e = &sums.0;
    let mut a = Vec::with_capacity(e.len() + 1);
    a.push(Complex64::new(1.0, 0.0));
    for n in 1..=e.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..=n {
            let term = a[n - i] * e[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        a.push(acc / n as f64);
    }
    a.remove(0);
    MonicPoly::new(a)
}

/// `E_n = sum_r r^n` for `n = 1..=roots.len()`.
pub fn power_sums_from_roots(roots: &[Complex64]) -> PowerSums {
    let n = roots.len();
    let mut sums = vec![Complex64::new(0.0, 0.0); n];
    for &r in roots {
        let mut p = Complex64::new(1.0, 0.0);
        for s in sums.iter_mut() {
            p *= r;
            *s += p;
        }
    }
    PowerSums(sums)
}
