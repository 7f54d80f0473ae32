//! Quadrature for the normalized area measure `dA = dx dy / pi` on the disk
//! and on its sub-regions.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{
    mobius, mobius_jacobian, BoundaryBall, CarlesonBox, EuclideanDisk, MetricBall, PseudoDisk,
};
use crate::numeric::{gauss_legendre_on, graded_gauss_legendre, ComplexSum, KahanSum};

const TAU: f64 = std::f64::consts::TAU;

/// A list of nodes and weights. Weights already carry the `1/pi`
/// normalization, so the base rule on the whole disk has total mass one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskQuadrature {
    pub radial_order: usize,
    pub angular_count: usize,
    /// Radii with their radial weights (summing to one) for product rules.
    pub radial_nodes: Vec<(f64, f64)>,
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl DiskQuadrature {
    /// Product rule: Gauss-Legendre in `t` with `|z|^2 = 1 - (1 - t)^2`,
    /// uniform trapezoid in angle.
    ///
    /// Exact for `z^n conj(z)^m` whenever `n, m <= radial_order - 1` and
    /// `|n - m| < angular_count`, and for `(1 - |z|^2)^a` at half-integer `a`.
    pub fn build(radial_order: usize, angular_count: usize) -> Result<Self> {
        if radial_order < 2 || angular_count < 4 {
            return Err(Error::Parameter(format!(
                "quadrature needs radial_order >= 2 and angular_count >= 4, got ({radial_order}, {angular_count})"
            )));
        }
        let radial_nodes: Vec<(f64, f64)> = gauss_legendre_on(radial_order, 0.0, 1.0)
            .into_iter()
            .map(|(t, w)| {
                let s = 1.0 - t;
                ((1.0 - s * s).sqrt(), 2.0 * s * w)
            })
            .collect();
        let mut nodes = Vec::with_capacity(radial_order * angular_count);
        let mut weights = Vec::with_capacity(radial_order * angular_count);
        let dn = angular_count as f64;
        for &(r, w) in &radial_nodes {
            for j in 0..angular_count {
                nodes.push(Complex64::from_polar(r, TAU * j as f64 / dn));
                weights.push(w / dn);
            }
        }
        Ok(Self {
            radial_order,
            angular_count,
            radial_nodes,
            nodes,
            weights,
        })
    }

    /// Rule resolving harmonic polynomials of degree `n` against each other
    /// and against a moderate symbol.
    pub fn for_degree(n: usize) -> Self {
        Self::build((2 * n + 8).max(32), (4 * n + 16).max(64)).expect("valid orders")
    }

    pub(crate) fn from_parts(
        radial_order: usize,
        angular_count: usize,
        nodes: Vec<Complex64>,
        weights: Vec<f64>,
    ) -> Self {
        Self {
            radial_order,
            angular_count,
            radial_nodes: Vec::new(),
            nodes,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().copied().collect::<KahanSum>().value()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Compensated sum of `w_k f(z_k)` for a real integrand.
    pub fn sum_real<F: Fn(Complex64) -> f64>(&self, f: F) -> f64 {
        let mut acc = KahanSum::new();
        for (z, w) in self.iter() {
            acc.add(w * f(z));
        }
        acc.value()
    }

    /// Checked real integral; errors on the first non-finite node value.
    pub fn try_sum_real<F: Fn(Complex64) -> Result<f64>>(&self, f: F) -> Result<f64> {
        let mut acc = KahanSum::new();
        for (z, w) in self.iter() {
            let v = f(z)?;
            if !v.is_finite() {
                return Err(Error::NonFinite { z, value: v });
            }
            acc.add(w * v);
        }
        Ok(acc.value())
    }

    /// Keep only the nodes satisfying `keep`.
    pub fn filter<P: Fn(Complex64) -> bool>(&self, keep: P) -> Self {
        let (nodes, weights) = self.iter().filter(|(z, _)| keep(*z)).unzip();
        Self::from_parts(self.radial_order, self.angular_count, nodes, weights)
    }

    /// Affine image of the rule onto a Euclidean disk inside the unit disk.
    pub fn onto_disk(&self, disk: &EuclideanDisk) -> Self {
        let r = disk.radius;
        let nodes = self.nodes.iter().map(|z| disk.center + z * r).collect();
        let weights = self.weights.iter().map(|w| w * r * r).collect();
        Self::from_parts(self.radial_order, self.angular_count, nodes, weights)
    }

    /// Change of variables through the automorphism `phi_a`: nodes
    /// `phi_a(z_k)`, weights `w_k |phi_a'(z_k)|^2`. Concentrates nodes near
    /// `a`, which is where kernel-peaked integrands live.
    pub fn pullback(&self, a: Complex64) -> Self {
        if a == Complex64::new(0.0, 0.0) {
            return self.clone();
        }
        let nodes = self.nodes.iter().map(|&z| mobius(a, z)).collect();
        let weights = self
            .iter()
            .map(|(z, w)| w * mobius_jacobian(a, z))
            .collect();
        Self::from_parts(self.radial_order, self.angular_count, nodes, weights)
    }

    /// Polar rule about `c` for `{|z - c| < t} ∩ 𝔻`, clipped to the unit
    /// disk arc by arc. `|c|` may equal one.
    pub fn clipped_ball(&self, c: Complex64, t: f64) -> Self {
        let d = c.norm();
        let m = self.radial_order.max(4);
        let n_full = self.angular_count;
        let n_arc = (self.angular_count / 2).max(8);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let full_end = if d < 1.0 { t.min(1.0 - d) } else { 0.0 };
        if full_end > 0.0 {
            let radial = if full_end < t {
                graded_gauss_legendre(m, 0.0, full_end)
            } else {
                gauss_legendre_on(m, 0.0, full_end)
            };
            for (rho, w) in radial {
                for j in 0..n_full {
                    let psi = TAU * j as f64 / n_full as f64;
                    nodes.push(c + Complex64::from_polar(rho, psi));
                    weights.push(w * rho * TAU / (n_full as f64 * std::f64::consts::PI));
                }
            }
        }
        let arc_end = t.min(1.0 + d);
        if arc_end > full_end && d > 0.0 {
            let axis = if d > 0.0 { c.arg() + std::f64::consts::PI } else { 0.0 };
            for (rho, w) in graded_gauss_legendre(m, full_end, arc_end) {
                let kappa = (1.0 - d * d - rho * rho) / (2.0 * d * rho);
                let half = if kappa >= 1.0 {
                    std::f64::consts::PI
                } else if kappa <= -1.0 {
                    0.0
                } else {
                    std::f64::consts::PI - kappa.acos()
                };
                if half <= 0.0 {
                    continue;
                }
                for (psi, v) in graded_gauss_legendre(n_arc, -half, half) {
                    let z = c + Complex64::from_polar(rho, axis + psi);
                    if z.norm() < 1.0 {
                        nodes.push(z);
                        weights.push(w * v * rho / std::f64::consts::PI);
                    }
                }
            }
        }
        Self::from_parts(self.radial_order, self.angular_count, nodes, weights)
    }
}

/// Membership predicate used by indicator regions.
pub type Predicate = Arc<dyn Fn(Complex64) -> bool + Send + Sync>;

/// A measurable subset of the disk.
#[derive(Clone)]
pub enum Region {
    Disk,
    Pseudo(PseudoDisk),
    Box(CarlesonBox),
    Boundary(BoundaryBall),
    Ball(MetricBall),
    Indicator { label: String, pred: Predicate },
    Union(Vec<Region>),
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Disk => write!(f, "Disk"),
            Region::Pseudo(p) => write!(f, "Pseudo({:?}, {})", p.center_hyp, p.radius_hyp),
            Region::Box(b) => write!(f, "Box({:?}, {})", b.center, b.ratio),
            Region::Boundary(b) => write!(f, "Boundary({:?}, {})", b.boundary_point, b.radius),
            Region::Ball(b) => write!(f, "Ball({:?}, {})", b.center, b.radius),
            Region::Indicator { label, .. } => write!(f, "Indicator({label})"),
            Region::Union(parts) => f.debug_tuple("Union").field(parts).finish(),
        }
    }
}

impl Region {
    pub fn indicator<P>(label: impl Into<String>, pred: P) -> Self
    where
        P: Fn(Complex64) -> bool + Send + Sync + 'static,
    {
        Region::Indicator {
            label: label.into(),
            pred: Arc::new(pred),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        if z.norm() >= 1.0 {
            return false;
        }
        match self {
            Region::Disk => true,
            Region::Pseudo(p) => p.contains(z),
            Region::Box(b) => b.contains(z),
            Region::Boundary(b) => b.contains(z),
            Region::Ball(b) => b.contains(z),
            Region::Indicator { pred, .. } => pred(z),
            Region::Union(parts) => parts.iter().any(|p| p.contains(z)),
        }
    }

    /// Exact normalized area where a closed form exists.
    pub fn exact_area(&self) -> Option<f64> {
        match self {
            Region::Disk => Some(1.0),
            Region::Pseudo(p) => Some(p.area()),
            Region::Box(b) => Some(b.area()),
            Region::Boundary(b) => Some(b.area()),
            Region::Ball(b) => Some(b.area()),
            _ => None,
        }
    }

    fn is_filtered(&self) -> bool {
        matches!(self, Region::Indicator { .. } | Region::Union(_))
    }
}

/// A rule adapted to `region`: affine disk rules for Euclidean disks,
/// clipped polar rules for lenses, node filtering for indicator sets.
pub fn region_refine(region: &Region, quad: &DiskQuadrature) -> Result<DiskQuadrature> {
    let rule = match region {
        Region::Disk => return Ok(quad.clone()),
        Region::Pseudo(p) => quad.onto_disk(&p.euclidean()),
        Region::Box(b) => quad.onto_disk(&b.euclidean()),
        Region::Boundary(b) => quad.clipped_ball(b.boundary_point, b.radius),
        Region::Ball(b) => {
            let e = EuclideanDisk {
                center: b.center,
                radius: b.radius,
            };
            if e.inside_unit_disk() {
                quad.onto_disk(&e)
            } else {
                quad.clipped_ball(b.center, b.radius)
            }
        }
        Region::Indicator { .. } | Region::Union(_) => quad.filter(|z| region.contains(z)),
    };
    let area = region.exact_area().unwrap_or_else(|| rule.mass());
    if !region.is_filtered() && area < 1e-14 {
        return Err(Error::DegenerateRegion { area });
    }
    Ok(rule)
}

/// `∫_region f dA`, complex-valued.
pub fn integrate<F>(f: F, region: &Region, quad: &DiskQuadrature) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let rule = region_refine(region, quad)?;
    let mut acc = ComplexSum::new();
    for (z, w) in rule.iter() {
        let v = f(z);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite {
                z,
                value: if v.re.is_finite() { v.im } else { v.re },
            });
        }
        acc.add(v * w);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn build_rule_examples() {
        let q = DiskQuadrature::build(32, 64).unwrap();
        assert!((q.mass() - 1.0).abs() < 1e-14);
        let m2 = q.sum_real(|z| z.norm_sqr());
        assert!((m2 - 0.5).abs() < 1e-14);
        for n in 1..=8 {
            let v = integrate(|z| z.powi(n), &Region::Disk, &q).unwrap();
            assert!(v.norm() < 1e-14, "n={n} {v}");
        }
        assert!(q.nodes.iter().all(|z| z.norm() < 1.0));
        assert!(DiskQuadrature::build(1, 64).is_err());
        assert!(DiskQuadrature::build(8, 3).is_err());
    }

    #[test]
    fn polynomial_exactness() {
        let q = DiskQuadrature::build(12, 32).unwrap();
        for n in 0..12 {
            for m in 0..12 {
                let v = integrate(|z| z.powu(n) * z.conj().powu(m), &Region::Disk, &q).unwrap();
                let want = if n == m { 1.0 / (n as f64 + 1.0) } else { 0.0 };
                assert!((v - want).norm() < 1e-13, "n={n} m={m} {v}");
            }
        }
    }

    #[test]
    fn half_integer_weights_are_exact() {
        let q = DiskQuadrature::build(16, 16).unwrap();
        let v = q.sum_real(|z| 1.5 * (1.0 - z.norm_sqr()).sqrt());
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn integrate_examples() {
        let q = DiskQuadrature::build(32, 64).unwrap();
        let ball = Region::Ball(MetricBall::new(c(0.0, 0.0), 0.4).unwrap());
        assert!((integrate(|_| c(1.0, 0.0), &ball, &q).unwrap().re - 0.16).abs() < 1e-6);
        assert!((integrate(|_| c(1.0, 0.0), &Region::Disk, &q).unwrap().re - 1.0).abs() < 1e-14);
        let pd = Region::Pseudo(PseudoDisk::new(c(0.5, 0.0), 0.5).unwrap());
        assert!((integrate(|_| c(1.0, 0.0), &pd, &q).unwrap().re - 0.16).abs() < 1e-4);
    }

    #[test]
    fn non_finite_values_name_the_node() {
        let q = DiskQuadrature::build(4, 8).unwrap();
        let e = integrate(|_| c(f64::NAN, 0.0), &Region::Disk, &q).unwrap_err();
        assert!(matches!(e, Error::NonFinite { .. }));
    }

    #[test]
    fn refined_mass_equals_area() {
        let q = DiskQuadrature::build(32, 64).unwrap();
        let pd = Region::Pseudo(PseudoDisk::new(c(0.9, 0.0), 0.125).unwrap());
        let rule = region_refine(&pd, &q).unwrap();
        assert!((rule.mass() - pd.exact_area().unwrap()).abs() < 1e-10);
        assert_eq!(region_refine(&Region::Disk, &q).unwrap(), q);

        let regions = [
            Region::Boundary(BoundaryBall::new(c(1.0, 0.0), 0.2).unwrap()),
            Region::Boundary(BoundaryBall::new(Complex64::from_polar(1.0, 2.0), 1.0).unwrap()),
            Region::Boundary(BoundaryBall::new(c(0.0, -1.0), 0.01).unwrap()),
            Region::Ball(MetricBall::new(c(0.7, 0.2), 0.5).unwrap()),
            Region::Ball(MetricBall::new(c(-0.3, 0.0), 0.6).unwrap()),
            Region::Ball(MetricBall::new(c(0.0, 0.99), 0.001).unwrap()),
            Region::Box(CarlesonBox::new(c(0.0, 0.95), 0.5).unwrap()),
        ];
        for region in &regions {
            let rule = region_refine(region, &q).unwrap();
            let area = region.exact_area().unwrap();
            assert!(
                (rule.mass() - area).abs() < 1e-8 * area.max(1e-6),
                "{region:?}: {} vs {area}",
                rule.mass()
            );
            assert!(rule.nodes.iter().all(|&z| region.contains(z)), "{region:?}");
        }
    }

    #[test]
    fn lens_area_against_monte_carlo() {
        let q = DiskQuadrature::build(32, 64).unwrap();
        let region = Region::Boundary(BoundaryBall::new(c(1.0, 0.0), 0.2).unwrap());
        let mass = region_refine(&region, &q).unwrap().mass();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 1_000_000;
        let mut hits = 0usize;
        for _ in 0..n {
            // uniform on the square [0.8, 1] x [-0.2, 0.2]
            let z = c(rng.gen_range(0.8..1.0), rng.gen_range(-0.2..0.2));
            if region.contains(z) {
                hits += 1;
            }
        }
        let mc = hits as f64 / n as f64 * 0.08 / std::f64::consts::PI;
        assert!(((mass - mc) / mc).abs() < 1e-3 * 3.0, "{mass} vs {mc}");
    }

    #[test]
    fn pullback_preserves_integrals() {
        let q = DiskQuadrature::build(32, 64).unwrap();
        let a = c(0.6, -0.3);
        let p = q.pullback(a);
        assert!((p.mass() - 1.0).abs() < 1e-10);
        let v = p.sum_real(|z| z.norm_sqr());
        assert!((v - 0.5).abs() < 1e-10);
    }

    #[test]
    fn monotone_under_inclusion() {
        let q = DiskQuadrature::build(32, 64).unwrap();
        let f = |z: Complex64| c(1.0 + z.re * z.re, 0.0);
        let mut last = 0.0;
        for t in [0.1, 0.2, 0.4, 0.8, 1.0] {
            let r = Region::Boundary(BoundaryBall::new(c(0.0, 1.0), t).unwrap());
            let v = integrate(f, &r, &q).unwrap().re;
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn indicator_filters_nodes() {
        let q = DiskQuadrature::build(32, 64).unwrap();
        let upper = Region::indicator("upper", |z| z.im > 0.0);
        let rule = region_refine(&upper, &q).unwrap();
        assert!((rule.mass() - 0.5).abs() < 0.02);
        let both = Region::Union(vec![upper.clone(), Region::indicator("lower", |z| z.im <= 0.0)]);
        assert!((region_refine(&both, &q).unwrap().mass() - 1.0).abs() < 1e-14);
    }
}
