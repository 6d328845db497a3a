use std::ops::{Add, Mul, Sub};

use crate::scalar::{creal, Cx, Scalar};

/// Dense univariate complex polynomial, coefficients in ascending degree.
///
/// The leading coefficient is nonzero unless the polynomial is identically zero,
/// in which case `coeffs` is empty.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T: Scalar> {
    coeffs: Vec<Cx<T>>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(mut coeffs: Vec<Cx<T>>) -> Self {
        while coeffs.last().is_some_and(|c| c.norm_sqr() == T::zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| creal(T::lit(c))).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Cx<T>) -> Self {
        Self::new(vec![c])
    }

    /// `(z - r_1)(z - r_2)...` with multiplicities.
    pub fn from_roots(roots: &[(Cx<T>, usize)]) -> Self {
        let mut p = Self::constant(creal(T::one()));
        for &(r, m) in roots {
            let lin = Self::new(vec![-r, creal(T::one())]);
            for _ in 0..m {
                p = &p * &lin;
            }
        }
        p
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Cx<T> {
        self.coeffs.last().copied().unwrap_or_else(|| creal(T::zero()))
    }

    /// Coefficient of `z^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> Cx<T> {
        self.coeffs.get(i).copied().unwrap_or_else(|| creal(T::zero()))
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    /// Drop leading coefficients below `rel_tol * max|coeff|`.
    pub fn trimmed(&self, rel_tol: T) -> Self {
        let thresh = rel_tol * self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= thresh) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    /// Drop the top `k` coefficients.
    pub fn truncated_to_degree(&self, deg: usize) -> Self {
        Self::new(self.coeffs.iter().take(deg + 1).copied().collect())
    }

    pub fn eval(&self, z: Cx<T>) -> Cx<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(creal(T::zero()), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_with_derivative(&self, z: Cx<T>) -> (Cx<T>, Cx<T>) {
        let zero = creal(T::zero());
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `sum |a_i| |z|^i`, the natural scale for residuals at `z`.
    pub fn abs_scale(&self, z: Cx<T>) -> T {
        let r = z.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * T::from_usize_lossy(i))
                .collect(),
        )
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Coefficients of `z^n p(1/z)`, padded so the result has `n + 1` slots.
    pub fn reversed(&self, n: usize) -> Self {
        debug_assert!(self.is_zero() || self.degree() <= n);
        Self::new((0..=n).map(|i| self.coeff(n - i)).collect())
    }

    /// Taylor coefficients `p^(j)(c) / j!` for `j = 0..=deg`.
    pub fn taylor_at(&self, c: Cx<T>) -> Vec<Cx<T>> {
        let mut work = self.coeffs.clone();
        let n = work.len();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            // synthetic division of work[k..] by (z - c)
            for i in (k..n - 1).rev() {
                let carry = work[i + 1];
                work[i] += carry * c;
            }
            out.push(work[k]);
        }
        out
    }

    /// Quotient of division by `(z - r)`, remainder discarded.
    pub fn deflate(&self, r: Cx<T>) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let n = self.coeffs.len() - 1;
        let mut q = vec![creal(T::zero()); n];
        let mut carry = creal(T::zero());
        for i in (0..n).rev() {
            carry = carry * r + self.coeffs[i + 1];
            q[i] = carry;
        }
        Self::new(q)
    }

    pub fn to_f64(&self) -> Polynomial<f64> {
        Polynomial::new(
            self.coeffs
                .iter()
                .map(|c| Cx::new(c.re.as_f64(), c.im.as_f64()))
                .collect(),
        )
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: Self) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: Self) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: Self) -> Polynomial<T> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![creal(T::zero()); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

/// `p' q - p q'`, computed term-by-term as `sum (i - j) a_i b_j z^(i+j-1)` so that
/// leading cancellations between equal-degree terms are exact.
pub fn wronskian<T: Scalar>(p: &Polynomial<T>, q: &Polynomial<T>) -> Polynomial<T> {
    if p.is_zero() || q.is_zero() {
        return if p.is_zero() { Polynomial::zero() } else { &p.derivative() * q };
    }
    let len = p.coeffs.len() + q.coeffs.len();
    let mut out = vec![creal(T::zero()); len];
    for (i, &a) in p.coeffs.iter().enumerate() {
        for (j, &b) in q.coeffs.iter().enumerate() {
            if i == j || i + j == 0 {
                continue;
            }
            let w = T::lit(i as f64 - j as f64);
            out[i + j - 1] += a * b * w;
        }
    }
    Polynomial::new(out)
}
