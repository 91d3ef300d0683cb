//! Diffusion laws `D(u)` with the derivatives needed by the nonlinear schemes.

use crate::scalar::{lit, Real};

/// Scalar diffusion law and its first three derivatives in `u`.
pub trait DiffusionLaw<T: Real>: Sync {
    fn value(&self, u: T) -> T;
    fn d1(&self, u: T) -> T;
    fn d2(&self, u: T) -> T;
    fn d3(&self, u: T) -> T;
}

/// `D(u) = d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantDiffusion<T>(pub T);

impl<T: Real> DiffusionLaw<T> for ConstantDiffusion<T> {
    fn value(&self, _u: T) -> T {
        self.0
    }
    fn d1(&self, _u: T) -> T {
        T::zero()
    }
    fn d2(&self, _u: T) -> T {
        T::zero()
    }
    fn d3(&self, _u: T) -> T {
        T::zero()
    }
}

/// `D(u) = d0 / (1 + beta u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalDiffusion<T> {
    pub d0: T,
    pub beta: T,
}

impl<T: Real> DiffusionLaw<T> for RationalDiffusion<T> {
    fn value(&self, u: T) -> T {
        self.d0 / (T::one() + self.beta * u)
    }
    fn d1(&self, u: T) -> T {
        let h = T::one() + self.beta * u;
        -self.beta * self.d0 / (h * h)
    }
    fn d2(&self, u: T) -> T {
        let h = T::one() + self.beta * u;
        lit::<T>(2.0) * self.beta * self.beta * self.d0 / (h * h * h)
    }
    fn d3(&self, u: T) -> T {
        let h = T::one() + self.beta * u;
        let h2 = h * h;
        -lit::<T>(6.0) * self.beta * self.beta * self.beta * self.d0 / (h2 * h2)
    }
}

/// `D(u) = a + b u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearDiffusion<T> {
    pub a: T,
    pub b: T,
}

impl<T: Real> DiffusionLaw<T> for LinearDiffusion<T> {
    fn value(&self, u: T) -> T {
        self.a + self.b * u
    }
    fn d1(&self, _u: T) -> T {
        self.b
    }
    fn d2(&self, _u: T) -> T {
        T::zero()
    }
    fn d3(&self, _u: T) -> T {
        T::zero()
    }
}

/// `D(u) = d0 exp(k u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialDiffusion<T> {
    pub d0: T,
    pub k: T,
}

impl<T: Real> DiffusionLaw<T> for ExponentialDiffusion<T> {
    fn value(&self, u: T) -> T {
        self.d0 * (self.k * u).exp()
    }
    fn d1(&self, u: T) -> T {
        self.k * self.value(u)
    }
    fn d2(&self, u: T) -> T {
        self.k * self.k * self.value(u)
    }
    fn d3(&self, u: T) -> T {
        self.k * self.k * self.k * self.value(u)
    }
}
