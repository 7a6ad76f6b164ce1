use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::real::Real;

/// A Cartesian 3-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[repr(C)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }
}

impl<T: Real> Vec3<T> {
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn norm(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn cast<U: Real>(self) -> Vec3<U> {
        Vec3::new(
            U::of_f64(self.x.as_f64()),
            U::of_f64(self.y.as_f64()),
            U::of_f64(self.z.as_f64()),
        )
    }

    /// Euclidean distance evaluated in double precision.
    pub fn distance(&self, other: &Self) -> f64 {
        let dx = self.x.as_f64() - other.x.as_f64();
        let dy = self.y.as_f64() - other.y.as_f64();
        let dz = self.z.as_f64() - other.z.as_f64();
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

impl<T: Add<Output = T>> Add for Vec3<T> {
    type Output = Self;
    #[inline(always)]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl<T: Sub<Output = T>> Sub for Vec3<T> {
    type Output = Self;
    #[inline(always)]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl<T: Copy> From<[T; 3]> for Vec3<T> {
    fn from(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl<T> From<Vec3<T>> for [T; 3] {
    fn from(v: Vec3<T>) -> Self {
        [v.x, v.y, v.z]
    }
}
