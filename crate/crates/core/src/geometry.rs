//! Pseudohyperbolic geometry of the unit disk.
//!
//! Points are `Complex64` values with modulus strictly below one. The
//! pseudohyperbolic distance is `rho(z, w) = |z - w| / |1 - conj(w) z|`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) fn check_in_disk(z: Complex64) -> Result<()> {
    if z.norm() < 1.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::OutsideDisk { z })
    }
}

/// Pseudohyperbolic distance, checked.
pub fn pseudo_distance(z: Complex64, w: Complex64) -> Result<f64> {
    check_in_disk(z)?;
    check_in_disk(w)?;
    Ok(rho(z, w))
}

/// Unchecked pseudohyperbolic distance for hot loops.
#[inline]
pub fn rho(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm();
    if num == 0.0 {
        return 0.0;
    }
    num / (Complex64::new(1.0, 0.0) - w.conj() * z).norm()
}

/// The involutive automorphism `phi_a(z) = (a - z) / (1 - conj(a) z)`.
#[inline]
pub fn mobius(a: Complex64, z: Complex64) -> Complex64 {
    (a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

/// `|phi_a'(z)|^2 = (1 - |a|^2)^2 / |1 - conj(a) z|^4`.
#[inline]
pub fn mobius_jacobian(a: Complex64, z: Complex64) -> f64 {
    let d = (Complex64::new(1.0, 0.0) - a.conj() * z).norm_sqr();
    let s = 1.0 - a.norm_sqr();
    s * s / (d * d)
}

/// Euclidean disk `{ |z - center| < radius }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanDisk {
    pub center: Complex64,
    pub radius: f64,
}

impl EuclideanDisk {
    #[inline]
    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// True when the closed disk sits inside the open unit disk.
    pub fn inside_unit_disk(&self) -> bool {
        self.center.norm() + self.radius < 1.0
    }
}

/// Pseudohyperbolic disk `D(a, r)` with its Euclidean description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoDisk {
    pub center_hyp: Complex64,
    pub radius_hyp: f64,
    pub center_euc: Complex64,
    pub radius_euc: f64,
}

impl PseudoDisk {
    pub fn new(a: Complex64, r: f64) -> Result<Self> {
        check_in_disk(a)?;
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Parameter(format!(
                "pseudo-disk radius must lie in (0,1), got {r}"
            )));
        }
        Ok(Self::new_unchecked(a, r))
    }

    pub(crate) fn new_unchecked(a: Complex64, r: f64) -> Self {
        let a2 = a.norm_sqr();
        let r2 = r * r;
        let denom = 1.0 - r2 * a2;
        Self {
            center_hyp: a,
            radius_hyp: r,
            center_euc: a * ((1.0 - r2) / denom),
            radius_euc: r * (1.0 - a2) / denom,
        }
    }

    #[inline]
    pub fn contains(&self, z: Complex64) -> bool {
        z.norm() < 1.0 && rho(z, self.center_hyp) < self.radius_hyp
    }

    pub fn euclidean(&self) -> EuclideanDisk {
        EuclideanDisk {
            center: self.center_euc,
            radius: self.radius_euc,
        }
    }

    /// Normalized area (the disk lies inside the unit disk).
    pub fn area(&self) -> f64 {
        self.radius_euc * self.radius_euc
    }
}

/// Carleson box `S(a, r) = { z : |z - a| < r (1 - |a|) }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonBox {
    pub center: Complex64,
    pub ratio: f64,
}

impl CarlesonBox {
    pub fn new(a: Complex64, r: f64) -> Result<Self> {
        check_in_disk(a)?;
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Parameter(format!(
                "Carleson box ratio must lie in (0,1), got {r}"
            )));
        }
        Ok(Self { center: a, ratio: r })
    }

    pub fn euclidean(&self) -> EuclideanDisk {
        EuclideanDisk {
            center: self.center,
            radius: self.ratio * (1.0 - self.center.norm()),
        }
    }

    #[inline]
    pub fn contains(&self, z: Complex64) -> bool {
        self.euclidean().contains(z)
    }

    pub fn area(&self) -> f64 {
        let r = self.euclidean().radius;
        r * r
    }
}

/// The lens `K ∩ 𝔻` where `K = { |z - u| < t }` and `|u| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryBall {
    pub boundary_point: Complex64,
    pub radius: f64,
}

impl BoundaryBall {
    pub fn new(u: Complex64, t: f64) -> Result<Self> {
        if (u.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!(
                "boundary ball center must be unimodular, got |u| = {}",
                u.norm()
            )));
        }
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Parameter(format!(
                "boundary ball radius must lie in (0,1], got {t}"
            )));
        }
        Ok(Self {
            boundary_point: u / u.norm(),
            radius: t,
        })
    }

    #[inline]
    pub fn contains(&self, z: Complex64) -> bool {
        z.norm() < 1.0 && (z - self.boundary_point).norm() < self.radius
    }

    /// Exact normalized area of the lens.
    pub fn area(&self) -> f64 {
        lens_area(1.0, self.radius)
    }
}

/// Metric ball `B(a, r) = { z ∈ 𝔻 : |z - a| < r }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricBall {
    pub center: Complex64,
    pub radius: f64,
}

impl MetricBall {
    pub fn new(a: Complex64, r: f64) -> Result<Self> {
        check_in_disk(a)?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Parameter(format!("ball radius must be positive, got {r}")));
        }
        Ok(Self { center: a, radius: r })
    }

    #[inline]
    pub fn contains(&self, z: Complex64) -> bool {
        z.norm() < 1.0 && (z - self.center).norm() < self.radius
    }

    /// Exact normalized area of `B(a, r) ∩ 𝔻`.
    pub fn area(&self) -> f64 {
        lens_area(self.center.norm(), self.radius)
    }
}

/// Normalized area of `{|z - c| < t} ∩ 𝔻` with `|c| = d`.
pub fn lens_area(d: f64, t: f64) -> f64 {
    if d + t <= 1.0 {
        return t * t;
    }
    if t >= d + 1.0 {
        return 1.0;
    }
    // circle-circle intersection area, radii 1 and t, center distance d
    let a1 = ((d * d + 1.0 - t * t) / (2.0 * d)).clamp(-1.0, 1.0).acos();
    let a2 = ((d * d + t * t - 1.0) / (2.0 * d * t)).clamp(-1.0, 1.0).acos();
    let k = (-d + 1.0 + t) * (d + 1.0 - t) * (d - 1.0 + t) * (d + 1.0 + t);
    let area = a1 + t * t * a2 - 0.5 * k.max(0.0).sqrt();
    area / std::f64::consts::PI
}
