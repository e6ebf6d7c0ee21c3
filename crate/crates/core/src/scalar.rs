//! Scalar types for forward-mode differentiation.
//!
//! Fields are written once against [`Scalar`] and evaluated with `f64`,
//! [`Dual`] (first derivatives) or [`HyperDual`] (mixed second derivatives).
//! Branching functions (`clamp`, `max`) compare real parts only.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    /// Real (value) part.
    fn re(&self) -> f64;
    /// Applies a scalar function given its value and first two derivatives at `re()`.
    fn chain(self, f: f64, df: f64, d2f: f64) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }
    fn one() -> Self {
        Self::cst(1.0)
    }
    fn sqrt(self) -> Self {
        let v = self.re().sqrt();
        self.chain(v, 0.5 / v, -0.25 / (v * v * v))
    }
    fn powf(self, e: f64) -> Self {
        let x = self.re();
        if e == 0.0 {
            return Self::one();
        }
        if e == 1.0 {
            return self;
        }
        if e == 2.0 {
            return self * self;
        }
        let v = x.powf(e);
        self.chain(v, e * x.powf(e - 1.0), e * (e - 1.0) * x.powf(e - 2.0))
    }
    fn powi(self, e: i32) -> Self {
        match e {
            0 => Self::one(),
            1 => self,
            2 => self * self,
            _ => {
                let x = self.re();
                let ef = e as f64;
                self.chain(x.powi(e), ef * x.powi(e - 1), ef * (ef - 1.0) * x.powi(e - 2))
            }
        }
    }
    fn exp(self) -> Self {
        let v = self.re().exp();
        self.chain(v, v, v)
    }
    fn ln(self) -> Self {
        let x = self.re();
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }
    fn ln_1p(self) -> Self {
        let x = self.re();
        let u = 1.0 + x;
        self.chain(x.ln_1p(), 1.0 / u, -1.0 / (u * u))
    }
    fn recip(self) -> Self {
        let x = self.re();
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }
    fn sin(self) -> Self {
        let x = self.re();
        self.chain(x.sin(), x.cos(), -x.sin())
    }
    fn cos(self) -> Self {
        let x = self.re();
        self.chain(x.cos(), -x.sin(), -x.cos())
    }
    fn sinh(self) -> Self {
        let x = self.re();
        self.chain(x.sinh(), x.cosh(), x.sinh())
    }
    fn cosh(self) -> Self {
        let x = self.re();
        self.chain(x.cosh(), x.sinh(), x.cosh())
    }
    fn abs(self) -> Self {
        if self.re() < 0.0 {
            -self
        } else {
            self
        }
    }
    /// Clamp on the real part; derivative parts vanish outside `[lo, hi]`.
    fn clamp_re(self, lo: f64, hi: f64) -> Self {
        let x = self.re();
        if x <= lo {
            Self::cst(lo)
        } else if x >= hi {
            Self::cst(hi)
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    #[inline]
    fn cst(v: f64) -> Self {
        v
    }
    #[inline]
    fn re(&self) -> f64 {
        *self
    }
    #[inline]
    fn chain(self, f: f64, _df: f64, _d2f: f64) -> Self {
        f
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powf(self, e: f64) -> Self {
        f64::powf(self, e)
    }
    fn powi(self, e: i32) -> Self {
        f64::powi(self, e)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn ln_1p(self) -> Self {
        f64::ln_1p(self)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
}

/// First-order dual number `re + du·ε`, `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual {
    pub re: f64,
    pub du: f64,
}

impl Dual {
    pub fn new(re: f64, du: f64) -> Self {
        Dual { re, du }
    }
    pub fn var(re: f64) -> Self {
        Dual { re, du: 1.0 }
    }
}

/// Hyper-dual number `re + e1·ε₁ + e2·ε₂ + e12·ε₁ε₂` with `ε₁² = ε₂² = 0`.
///
/// Seeding two directions and reading `e12` gives the exact mixed second
/// derivative along them.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HyperDual {
    pub re: f64,
    pub e1: f64,
    pub e2: f64,
    pub e12: f64,
}

impl HyperDual {
    pub fn new(re: f64, e1: f64, e2: f64, e12: f64) -> Self {
        HyperDual { re, e1, e2, e12 }
    }
}

macro_rules! impl_mixed_ops {
    ($t:ty) => {
        impl Add<f64> for $t {
            type Output = $t;
            #[inline]
            fn add(self, rhs: f64) -> $t {
                self + <$t>::cst(rhs)
            }
        }
        impl Sub<f64> for $t {
            type Output = $t;
            #[inline]
            fn sub(self, rhs: f64) -> $t {
                self - <$t>::cst(rhs)
            }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            #[inline]
            fn mul(self, rhs: f64) -> $t {
                self * <$t>::cst(rhs)
            }
        }
        impl Div<f64> for $t {
            type Output = $t;
            #[inline]
            fn div(self, rhs: f64) -> $t {
                self * <$t>::cst(1.0 / rhs)
            }
        }
        impl AddAssign for $t {
            #[inline]
            fn add_assign(&mut self, rhs: $t) {
                *self = *self + rhs;
            }
        }
        impl SubAssign for $t {
            #[inline]
            fn sub_assign(&mut self, rhs: $t) {
                *self = *self - rhs;
            }
        }
        impl MulAssign for $t {
            #[inline]
            fn mul_assign(&mut self, rhs: $t) {
                *self = *self * rhs;
            }
        }
        impl Div for $t {
            type Output = $t;
            #[inline]
            fn div(self, rhs: $t) -> $t {
                self * rhs.recip()
            }
        }
    };
}

impl Add for Dual {
    type Output = Dual;
    #[inline]
    fn add(self, rhs: Dual) -> Dual {
        Dual::new(self.re + rhs.re, self.du + rhs.du)
    }
}
impl Sub for Dual {
    type Output = Dual;
    #[inline]
    fn sub(self, rhs: Dual) -> Dual {
        Dual::new(self.re - rhs.re, self.du - rhs.du)
    }
}
impl Mul for Dual {
    type Output = Dual;
    #[inline]
    fn mul(self, rhs: Dual) -> Dual {
        Dual::new(self.re * rhs.re, self.re * rhs.du + self.du * rhs.re)
    }
}
impl Neg for Dual {
    type Output = Dual;
    #[inline]
    fn neg(self) -> Dual {
        Dual::new(-self.re, -self.du)
    }
}
impl_mixed_ops!(Dual);

impl Scalar for Dual {
    #[inline]
    fn cst(v: f64) -> Self {
        Dual::new(v, 0.0)
    }
    #[inline]
    fn re(&self) -> f64 {
        self.re
    }
    #[inline]
    fn chain(self, f: f64, df: f64, _d2f: f64) -> Self {
        Dual::new(f, df * self.du)
    }
}

impl Add for HyperDual {
    type Output = HyperDual;
    #[inline]
    fn add(self, r: HyperDual) -> HyperDual {
        HyperDual::new(self.re + r.re, self.e1 + r.e1, self.e2 + r.e2, self.e12 + r.e12)
    }
}
impl Sub for HyperDual {
    type Output = HyperDual;
    #[inline]
    fn sub(self, r: HyperDual) -> HyperDual {
        HyperDual::new(self.re - r.re, self.e1 - r.e1, self.e2 - r.e2, self.e12 - r.e12)
    }
}
impl Mul for HyperDual {
    type Output = HyperDual;
    #[inline]
    fn mul(self, r: HyperDual) -> HyperDual {
        HyperDual::new(
            self.re * r.re,
            self.re * r.e1 + self.e1 * r.re,
            self.re * r.e2 + self.e2 * r.re,
            self.re * r.e12 + self.e1 * r.e2 + self.e2 * r.e1 + self.e12 * r.re,
        )
    }
}
impl Neg for HyperDual {
    type Output = HyperDual;
    #[inline]
    fn neg(self) -> HyperDual {
        HyperDual::new(-self.re, -self.e1, -self.e2, -self.e12)
    }
}
impl_mixed_ops!(HyperDual);

impl Scalar for HyperDual {
    #[inline]
    fn cst(v: f64) -> Self {
        HyperDual::new(v, 0.0, 0.0, 0.0)
    }
    #[inline]
    fn re(&self) -> f64 {
        self.re
    }
    #[inline]
    fn chain(self, f: f64, df: f64, d2f: f64) -> Self {
        HyperDual::new(
            f,
            df * self.e1,
            df * self.e2,
            df * self.e12 + d2f * self.e1 * self.e2,
        )
    }
}
