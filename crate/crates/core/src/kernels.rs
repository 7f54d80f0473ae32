//! Closed-form reproducing kernels for the standard weights
//! `ω_α = (1 + α)(1 - |z|^2)^α`, their norms, pointwise bounds and the
//! normalized kernel bumps used as extremal test functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_in_disk, mobius, PseudoDisk};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelFamily {
    HarmonicUnweighted,
    AnalyticUnweighted,
    HarmonicAlpha(f64),
    AnalyticAlpha(f64),
}

impl KernelFamily {
    pub fn alpha(self) -> f64 {
        match self {
            KernelFamily::HarmonicUnweighted | KernelFamily::AnalyticUnweighted => 0.0,
            KernelFamily::HarmonicAlpha(a) | KernelFamily::AnalyticAlpha(a) => a,
        }
    }

    pub fn is_harmonic(self) -> bool {
        matches!(
            self,
            KernelFamily::HarmonicUnweighted | KernelFamily::HarmonicAlpha(_)
        )
    }
}

/// `K^α_z(λ) = 1 / (1 - conj(z) λ)^(2 + α)`, unchecked.
#[inline]
pub fn k_alpha(alpha: f64, z: Complex64, lambda: Complex64) -> Complex64 {
    let base = Complex64::new(1.0, 0.0) - z.conj() * lambda;
    if alpha == 0.0 {
        let b2 = base * base;
        b2.inv()
    } else {
        base.powf(-(2.0 + alpha))
    }
}

/// `R^α_z(λ) = 2 Re K^α_z(λ) - 1`, unchecked.
#[inline]
pub fn r_alpha(alpha: f64, z: Complex64, lambda: Complex64) -> f64 {
    2.0 * k_alpha(alpha, z, lambda).re - 1.0
}

pub fn eval_kernel(fam: KernelFamily, z: Complex64, lambda: Complex64) -> Result<Complex64> {
    check_in_disk(z)?;
    check_in_disk(lambda)?;
    let k = k_alpha(fam.alpha(), z, lambda);
    Ok(if fam.is_harmonic() {
        Complex64::new(2.0 * k.re - 1.0, 0.0)
    } else {
        k
    })
}

/// `‖R^α_z‖² = 2 / (1 - |z|^2)^(2 + α) - 1` in `L²(ω_α)`.
pub fn kernel_norm_alpha(alpha: f64, z: Complex64) -> Result<f64> {
    check_in_disk(z)?;
    check_alpha(alpha)?;
    Ok(2.0 / (1.0 - z.norm_sqr()).powf(2.0 + alpha) - 1.0)
}

/// `‖K^α_z‖² = 1 / (1 - |z|^2)^(2 + α)` in `L²(ω_α)`.
pub fn analytic_kernel_norm_alpha(alpha: f64, z: Complex64) -> Result<f64> {
    check_in_disk(z)?;
    check_alpha(alpha)?;
    Ok((1.0 - z.norm_sqr()).powf(-(2.0 + alpha)))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > -1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("alpha must exceed -1, got {alpha}")))
    }
}

/// Deterministic points filling `D(λ, r)`: a sunflower in the disk of
/// radius `r` pushed forward by the automorphism `phi_λ`.
pub fn pseudo_disk_samples(lambda: Complex64, r: f64, count: usize) -> Vec<Complex64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let s = r * ((k as f64 + 0.5) / count as f64).sqrt();
            mobius(lambda, Complex64::from_polar(s, golden * k as f64))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelBoundsReport {
    pub lambda: Complex64,
    pub r: f64,
    /// `min |R_λ(z)| (1 - |λ|)^2 - 1/2`; negative means the lower bound failed.
    pub lower_margin: f64,
    /// `3 - max |R_λ(z)| (1 - |λ|)^2`; negative means the upper bound failed.
    pub upper_margin: f64,
    pub holds: bool,
    /// Largest radius in `r, r/2, .., r/2^10` at which both bounds held, or 0.
    pub empirical_r0: f64,
}

fn margins(lambda: Complex64, r: f64, samples: usize) -> (f64, f64) {
    let s = (1.0 - lambda.norm()).powi(2);
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for z in pseudo_disk_samples(lambda, r, samples) {
        let v = r_alpha(0.0, lambda, z).abs() * s;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo - 0.5, 3.0 - hi)
}

/// Checks `1/2 (1-|λ|)^-2 <= |R_λ(z)| <= 3 (1-|λ|)^-2` on samples of
/// `D(λ, r)`. Violations are reported, not raised.
pub fn kernel_bounds_check(lambda: Complex64, r: f64, samples: usize) -> Result<KernelBoundsReport> {
    check_in_disk(lambda)?;
    if !(r > 0.0 && r <= 0.25) || samples == 0 {
        return Err(Error::Parameter(format!(
            "kernel bounds need 0 < r <= 1/4 and samples > 0, got r = {r}"
        )));
    }
    PseudoDisk::new(lambda, r)?;
    let (lower_margin, upper_margin) = margins(lambda, r, samples);
    let holds = lower_margin >= 0.0 && upper_margin >= 0.0;
    let mut empirical_r0 = 0.0;
    let mut rr = r;
    for _ in 0..=10 {
        let (lo, hi) = margins(lambda, rr, samples);
        if lo >= 0.0 && hi >= 0.0 {
            empirical_r0 = rr;
            break;
        }
        rr *= 0.5;
    }
    Ok(KernelBoundsReport {
        lambda,
        r,
        lower_margin,
        upper_margin,
        holds,
        empirical_r0,
    })
}

/// The normalized bump `f(λ) = sqrt(1+α) R^α_{z0}(λ) (1 - |z0|^2)^((2+α)/2)`
/// with `z0 = (1 - s t) u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DkBump {
    pub alpha: f64,
    pub z0: Complex64,
}

impl DkBump {
    pub fn at(alpha: f64, z0: Complex64) -> Result<Self> {
        check_alpha(alpha)?;
        check_in_disk(z0)?;
        Ok(Self { alpha, z0 })
    }

    #[inline]
    pub fn eval(&self, lambda: Complex64) -> f64 {
        let a = self.alpha;
        (1.0 + a).sqrt()
            * r_alpha(a, self.z0, lambda)
            * (1.0 - self.z0.norm_sqr()).powf(0.5 * (2.0 + a))
    }

    /// `‖f‖² = 2(1+α) - (1+α)(1 - |z0|^2)^(2+α)` in `L²(ω_α)`.
    pub fn norm_sq(&self) -> f64 {
        let a = self.alpha;
        2.0 * (1.0 + a) - (1.0 + a) * (1.0 - self.z0.norm_sqr()).powf(2.0 + a)
    }
}

pub fn dk_test_function(alpha: f64, t: f64, s: f64, u: Complex64) -> Result<DkBump> {
    if !(t > 0.0 && t < 1.0 && s > 0.0 && s < 1.0) {
        return Err(Error::Parameter(format!("dk bump needs t, s in (0,1), got t={t}, s={s}")));
    }
    if (u.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Parameter("dk bump direction must be unimodular".into()));
    }
    DkBump::at(alpha, u * (1.0 - s * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::DiskQuadrature;
    use crate::weights::standard_alpha;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let zero = c(0.0, 0.0);
        for z in [c(0.3, 0.2), c(-0.9, 0.0)] {
            let v = eval_kernel(KernelFamily::HarmonicUnweighted, zero, z).unwrap();
            assert!((v.re - 1.0).abs() < 1e-15);
        }
        let l = Complex64::from_polar(0.5f64.sqrt(), 0.7);
        let v = eval_kernel(KernelFamily::HarmonicUnweighted, l, l).unwrap();
        assert!((v.re - 7.0).abs() < 1e-12);
        let k = eval_kernel(KernelFamily::AnalyticAlpha(1.0), c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        assert!((k.re - 2.370_370_370_370_37).abs() < 1e-12);
        assert!(eval_kernel(KernelFamily::AnalyticUnweighted, c(1.0, 0.0), zero).is_err());
    }

    #[test]
    fn norm_examples() {
        assert_eq!(kernel_norm_alpha(0.3, c(0.0, 0.0)).unwrap(), 1.0);
        let z = Complex64::from_polar(0.5f64.sqrt(), 1.0);
        assert!((kernel_norm_alpha(0.0, z).unwrap() - 7.0).abs() < 1e-12);
        let q = DiskQuadrature::build(48, 96).unwrap();
        let z = c(0.8, 0.0);
        let rule = q.pullback(z);
        let got = rule.sum_real(|l| r_alpha(0.5, z, l).powi(2) * standard_alpha(0.5, l));
        let want = kernel_norm_alpha(0.5, z).unwrap();
        assert!(((got - want) / want).abs() < 1e-6, "{got} vs {want}");
    }

    #[test]
    fn reproducing_property() {
        // <f, R^α_z> = f(z) for a harmonic polynomial f
        let q = DiskQuadrature::build(40, 80).unwrap();
        let f = |l: Complex64| 0.3 + l * l * c(0.5, -1.0) + l.conj().powi(3) * 2.0;
        for alpha in [0.0, 1.0] {
            for z in [c(0.2, 0.1), c(-0.5, 0.4)] {
                let rule = q.pullback(z);
                let mut acc = c(0.0, 0.0);
                for (l, w) in rule.iter() {
                    acc += f(l) * r_alpha(alpha, z, l) * standard_alpha(alpha, l) * w;
                }
                assert!((acc - f(z)).norm() < 1e-8, "alpha={alpha} z={z}: {acc}");
            }
        }
    }

    #[test]
    fn bounds_examples() {
        let rep = kernel_bounds_check(c(0.0, 0.0), 0.125, 100).unwrap();
        assert!(rep.holds);
        assert!((rep.lower_margin - 0.5).abs() < 1e-12 && (rep.upper_margin - 2.0).abs() < 1e-12);
        let rep = kernel_bounds_check(c(0.9, 0.0), 0.125, 1000).unwrap();
        assert!(rep.upper_margin >= 0.0);
        assert!(kernel_bounds_check(c(0.1, 0.0), 0.3, 10).is_err());
    }

    #[test]
    fn dk_norm_identity() {
        let f = DkBump::at(0.0, c(0.0, 0.0)).unwrap();
        assert!((f.eval(c(0.4, 0.1)) - 1.0).abs() < 1e-15);
        assert!((f.norm_sq() - 1.0).abs() < 1e-15);
        let f = dk_test_function(0.0, 0.5, 0.2, c(1.0, 0.0)).unwrap();
        assert!((f.norm_sq() - 1.9639).abs() < 1e-12);
        let q = DiskQuadrature::build(48, 96).unwrap().pullback(f.z0);
        let got = q.sum_real(|l| f.eval(l).powi(2));
        assert!((got - 1.9639).abs() < 1e-6, "{got}");
    }

    #[test]
    fn dk_mass_concentrates_in_boundary_ball() {
        let u = c(0.0, 1.0);
        let q = DiskQuadrature::build(48, 96).unwrap();
        let t = 0.3;
        let mut outside = Vec::new();
        for s in [0.5, 0.1, 0.02] {
            let f = dk_test_function(0.0, t, s, u).unwrap();
            let rule = q.pullback(f.z0);
            outside.push(rule.sum_real(|l| {
                if (l - u).norm() < t {
                    0.0
                } else {
                    f.eval(l).powi(2)
                }
            }));
        }
        assert!(outside.windows(2).all(|p| p[1] < p[0]), "{outside:?}");
        assert!(*outside.last().unwrap() < 0.1, "{outside:?}");
    }

    proptest! {
        #[test]
        fn symmetric_and_real(a in 0.0..0.97f64, b in -3.2..3.2f64, c2 in 0.0..0.97f64, d in -3.2..3.2f64, alpha in -0.9..3.0f64) {
            let z = Complex64::from_polar(a, b);
            let l = Complex64::from_polar(c2, d);
            let r1 = r_alpha(alpha, z, l);
            let r2 = r_alpha(alpha, l, z);
            prop_assert!((r1 - r2).abs() <= 1e-12 * r1.abs().max(1.0));
            let k = eval_kernel(KernelFamily::HarmonicAlpha(alpha), z, l).unwrap();
            prop_assert_eq!(k.im, 0.0);
            let kk = eval_kernel(KernelFamily::AnalyticAlpha(alpha), z, l).unwrap();
            prop_assert!((k.re - (2.0 * kk.re - 1.0)).abs() <= 1e-12 * k.re.abs().max(1.0));
        }
    }
}
