//! Truncated Taylor arithmetic in three variables.
//!
//! [`Jet`] carries a value, gradient and Hessian and propagates all three
//! exactly through arithmetic and univariate composition (forward mode, second
//! order). [`Dual`] is the first-order counterpart used for quantities that
//! are themselves built from first derivatives of a defining function, such as
//! the normalized horizontal normal.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Value, gradient and symmetric Hessian of a scalar at a point.
///
/// Variables are indexed `0, 1, 2`; for fields on the group they are
/// `(x, y, t)`, for planar fields `(u, v)` with index 2 unused.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; 3],
    pub hess: [[f64; 3]; 3],
}

impl Jet {
    pub const fn constant(value: f64) -> Self {
        Self {
            value,
            grad: [0.0; 3],
            hess: [[0.0; 3]; 3],
        }
    }

    /// Seed variable `index` at `value`.
    pub fn variable(index: usize, value: f64) -> Self {
        let mut grad = [0.0; 3];
        grad[index] = 1.0;
        Self {
            value,
            grad,
            hess: [[0.0; 3]; 3],
        }
    }

    /// Chain rule for `g(self)` given `g`, `g'` and `g''` at `self.value`.
    pub fn compose(self, g: f64, dg: f64, d2g: f64) -> Self {
        let mut out = Self::constant(g);
        for i in 0..3 {
            out.grad[i] = dg * self.grad[i];
            for j in 0..3 {
                out.hess[i][j] = d2g * self.grad[i] * self.grad[j] + dg * self.hess[i][j];
            }
        }
        out
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.value;
        self.compose(r, -r * r, 2.0 * r * r * r)
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.compose(s, 0.5 / s, -0.25 / (s * self.value))
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    pub fn ln(self) -> Self {
        let r = 1.0 / self.value;
        self.compose(self.value.ln(), r, -r * r)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(c, -s, -c)
    }

    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::constant(1.0),
            1 => self,
            _ => {
                let v = self.value;
                let nf = f64::from(n);
                self.compose(
                    v.powi(n),
                    nf * v.powi(n - 1),
                    nf * (nf - 1.0) * v.powi(n - 2),
                )
            }
        }
    }

    pub fn powf(self, r: f64) -> Self {
        let v = self.value;
        self.compose(v.powf(r), r * v.powf(r - 1.0), r * (r - 1.0) * v.powf(r - 2.0))
    }

    pub fn scale(self, c: f64) -> Self {
        let mut out = self;
        out.value *= c;
        for i in 0..3 {
            out.grad[i] *= c;
            for j in 0..3 {
                out.hess[i][j] *= c;
            }
        }
        out
    }

    /// Drop the second-order part.
    pub fn first_order(self) -> Dual {
        Dual {
            value: self.value,
            grad: self.grad,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.iter().flatten().all(|h| h.is_finite())
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut out = self;
        out.value += rhs.value;
        for i in 0..3 {
            out.grad[i] += rhs.grad[i];
            for j in 0..3 {
                out.hess[i][j] += rhs.hess[i][j];
            }
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = Jet::constant(self.value * rhs.value);
        for i in 0..3 {
            out.grad[i] = self.grad[i] * rhs.value + self.value * rhs.grad[i];
            for j in 0..3 {
                out.hess[i][j] = self.hess[i][j] * rhs.value
                    + self.grad[i] * rhs.grad[j]
                    + rhs.grad[i] * self.grad[j]
                    + self.value * rhs.hess[i][j];
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self.scale(1.0 / rhs)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        rhs.recip().scale(self)
    }
}

/// Value and gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub value: f64,
    pub grad: [f64; 3],
}

impl Dual {
    pub const fn new(value: f64, grad: [f64; 3]) -> Self {
        Self { value, grad }
    }

    pub const fn constant(value: f64) -> Self {
        Self {
            value,
            grad: [0.0; 3],
        }
    }

    fn map(self, g: f64, dg: f64) -> Self {
        Self {
            value: g,
            grad: self.grad.map(|d| dg * d),
        }
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.value;
        self.map(r, -r * r)
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.map(s, 0.5 / s)
    }

    pub fn square(self) -> Self {
        self * self
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value + rhs.value,
            grad: [
                self.grad[0] + rhs.grad[0],
                self.grad[1] + rhs.grad[1],
                self.grad[2] + rhs.grad[2],
            ],
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        self + (-rhs)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        self * -1.0
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value * rhs.value,
            grad: [
                self.grad[0] * rhs.value + self.value * rhs.grad[0],
                self.grad[1] * rhs.value + self.value * rhs.grad[1],
                self.grad[2] * rhs.value + self.value * rhs.grad[2],
            ],
        }
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(self, rhs: f64) -> Dual {
        Dual {
            value: self.value * rhs,
            grad: self.grad.map(|d| d * rhs),
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Dual) -> Dual {
        self * rhs.recip()
    }
}
