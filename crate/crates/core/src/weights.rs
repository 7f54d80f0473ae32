//! Weights on the disk, weighted region masses, A₂ estimates and the
//! doubling inequality for pseudohyperbolic disks.

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dsl::{self, Expr};
use crate::error::{Error, Result};
use crate::geometry::{check_in_disk, mobius, MetricBall, PseudoDisk};
use crate::numeric::KahanSum;
use crate::quadrature::{region_refine, DiskQuadrature, Region};
use crate::symbol::horner;

/// Tabulated weight on a tensor grid in polar coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWeight {
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
    /// `values[i * angles.len() + j]` at `(radii[i], angles[j])`.
    pub values: Vec<f64>,
}

impl GridWeight {
    /// Reads `r,theta,value` lines; `#` starts a comment. The rows must
    /// cover a full tensor grid.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: std::result::Result<Vec<f64>, _> =
                fields.iter().map(|s| s.parse::<f64>()).collect();
            match parsed {
                Ok(v) if v.len() == 3 => rows.push((v[0], v[1], v[2])),
                // a header row is tolerated
                _ if rows.is_empty() && lineno == 0 => continue,
                _ => {
                    return Err(Error::Spec(format!(
                        "grid weight line {}: expected `r,theta,value`",
                        lineno + 1
                    )))
                }
            }
        }
        let mut radii: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut angles: Vec<f64> = rows.iter().map(|r| r.1).collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        angles.sort_by(f64::total_cmp);
        angles.dedup();
        if radii.len() < 2 || angles.is_empty() || radii.len() * angles.len() != rows.len() {
            return Err(Error::Spec(
                "grid weight must tabulate a full tensor grid with at least two radii".into(),
            ));
        }
        let mut values = vec![f64::NAN; rows.len()];
        for (r, t, v) in rows {
            let i = radii.iter().position(|&x| x == r).unwrap_or(0);
            let j = angles.iter().position(|&x| x == t).unwrap_or(0);
            values[i * angles.len() + j] = v;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Spec("grid weight has duplicate nodes".into()));
        }
        Ok(Self {
            radii,
            angles,
            values,
        })
    }

    /// Bilinear in `(r, theta)`, periodic in angle, clamped in radius.
    pub fn interpolate(&self, z: Complex64) -> f64 {
        let r = z.norm().clamp(self.radii[0], *self.radii.last().unwrap());
        let i = match self.radii.partition_point(|&x| x <= r) {
            0 => 0,
            k => (k - 1).min(self.radii.len() - 2),
        };
        let s = (r - self.radii[i]) / (self.radii[i + 1] - self.radii[i]);
        let na = self.angles.len();
        if na == 1 {
            return (1.0 - s) * self.values[i] + s * self.values[i + 1];
        }
        let tau = std::f64::consts::TAU;
        let theta = z.im.atan2(z.re);
        let base = self.angles[0];
        let th = base + (theta - base).rem_euclid(tau);
        let j = match self.angles.partition_point(|&x| x <= th) {
            0 => na - 1,
            k => k - 1,
        };
        let (a0, a1) = if j + 1 < na {
            (self.angles[j], self.angles[j + 1])
        } else {
            (self.angles[j], self.angles[0] + tau)
        };
        let u = (th - a0) / (a1 - a0);
        let j1 = (j + 1) % na;
        let v = |ii: usize, jj: usize| self.values[ii * na + jj];
        (1.0 - s) * ((1.0 - u) * v(i, j) + u * v(i, j1))
            + s * ((1.0 - u) * v(i + 1, j) + u * v(i + 1, j1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// `(1 + alpha)(1 - |z|^2)^alpha`
    StandardAlpha(f64),
    /// `|p(z)|^2`, coefficients from low to high degree.
    PolyModulus(Vec<Complex64>),
    Dsl(Expr),
    Grid(GridWeight),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    pub kind: WeightKind,
    /// Evaluations at or below this value are rejected.
    pub floor: f64,
    spec: String,
}

impl Weight {
    pub fn unweighted() -> Self {
        Self::alpha(0.0).expect("alpha = 0 is valid")
    }

    pub fn alpha(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0 && alpha.is_finite()) {
            return Err(Error::Parameter(format!(
                "standard weight needs alpha > -1, got {alpha}"
            )));
        }
        Ok(Self {
            kind: WeightKind::StandardAlpha(alpha),
            floor: 0.0,
            spec: format!("alpha:{alpha}"),
        })
    }

    pub fn poly(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
            return Err(Error::Parameter("polynomial weight needs a nonzero coefficient".into()));
        }
        let spec = format!(
            "poly:{}",
            coeffs
                .iter()
                .map(|c| if c.im == 0.0 { format!("{}", c.re) } else { format!("{c}") })
                .collect::<Vec<_>>()
                .join(",")
        );
        Self::checked(WeightKind::PolyModulus(coeffs), spec)
    }

    pub fn dsl(src: &str) -> Result<Self> {
        let expr = dsl::parse(src)?;
        Self::checked(WeightKind::Dsl(expr), format!("dsl:{src}"))
    }

    pub fn grid(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let g = GridWeight::from_csv(&text)?;
        Self::checked(WeightKind::Grid(g), format!("grid:{}", path.display()))
    }

    fn checked(kind: WeightKind, spec: String) -> Result<Self> {
        let w = Self {
            kind,
            floor: 0.0,
            spec,
        };
        let quad = DiskQuadrature::build(32, 64)?;
        let total = quad.try_sum_real(|z| w.eval(z))?;
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::Parameter(format!(
                "weight `{}` has non-finite or zero total mass {total}",
                w.spec
            )));
        }
        Ok(w)
    }

    /// Parses `alpha:<a>`, `poly:<c0>,<c1>,..`, `dsl:<expr>` or `grid:<path>`.
    pub fn parse_spec(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Spec(format!("weight spec `{s}` lacks a `kind:` prefix")))?;
        match kind.trim() {
            "alpha" => Self::alpha(parse_f64(rest)?),
            "poly" => Self::poly(
                rest.split(',')
                    .map(|c| parse_f64(c).map(|v| Complex64::new(v, 0.0)))
                    .collect::<Result<Vec<_>>>()?,
            ),
            "dsl" => Self::dsl(rest),
            "grid" => Self::grid(Path::new(rest.trim())),
            other => Err(Error::Spec(format!("unknown weight kind `{other}`"))),
        }
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn standard_alpha(&self) -> Option<f64> {
        match self.kind {
            WeightKind::StandardAlpha(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.kind, WeightKind::StandardAlpha(_))
    }

    pub fn eval(&self, z: Complex64) -> Result<f64> {
        check_in_disk(z)?;
        let value = match &self.kind {
            WeightKind::StandardAlpha(a) => standard_alpha(*a, z),
            WeightKind::PolyModulus(c) => {
                let p = horner(c, z);
                if p.norm() <= 1e-12 {
                    return Err(Error::NonPositiveWeight {
                        z,
                        value: p.norm_sqr(),
                    });
                }
                p.norm_sqr()
            }
            WeightKind::Dsl(e) => e.eval(z)?,
            WeightKind::Grid(g) => g.interpolate(z),
        };
        if !value.is_finite() {
            return Err(Error::NonFinite { z, value });
        }
        if value <= self.floor {
            return Err(Error::NonPositiveWeight { z, value });
        }
        Ok(value)
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Spec(format!("`{}` is not a number", s.trim())))
}

#[inline]
pub fn standard_alpha(alpha: f64, z: Complex64) -> f64 {
    let s = 1.0 - z.norm_sqr();
    if alpha == 0.0 {
        1.0
    } else {
        (1.0 + alpha) * s.powf(alpha)
    }
}

/// `|E|_ω = ∫_E ω dA`.
pub fn region_mass(w: &Weight, region: &Region, quad: &DiskQuadrature) -> Result<f64> {
    let rule = region_refine(region, quad)?;
    rule.try_sum_real(|z| w.eval(z))
}

/// `|B|_ω |B|_{1/ω} / |B|^2` on one ball, with the discrete area standing
/// in for `|B|` so the ratio is at least one exactly.
pub fn a2_ratio(w: &Weight, ball: &MetricBall, quad: &DiskQuadrature) -> Result<f64> {
    let rule = region_refine(&Region::Ball(*ball), quad)?;
    let mut s0 = KahanSum::new();
    let mut s1 = KahanSum::new();
    let mut s2 = KahanSum::new();
    for (z, lam) in rule.iter() {
        let v = match w.eval(z) {
            Ok(v) => v,
            Err(Error::NonPositiveWeight { .. }) => return Ok(f64::INFINITY),
            Err(e) => return Err(e),
        };
        s0.add(lam);
        s1.add(lam * v);
        s2.add(lam / v);
    }
    let r = s1.value() * s2.value() / (s0.value() * s0.value());
    Ok(if r.is_finite() { r } else { f64::INFINITY })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct A2Report {
    pub family_size: usize,
    pub estimate: f64,
    /// `(radius, max ratio over balls of that radius)`.
    pub per_radius_max: Vec<(f64, f64)>,
    pub worst_center: Complex64,
    pub worst_radius: f64,
    /// Estimates at successive refinement levels (one entry per level).
    pub refinement_trend: Vec<f64>,
    pub verdict: String,
}

/// Sup of the A₂ ratio over the given family of metric balls.
pub fn a2_constant_estimate(
    w: &Weight,
    family: &[(Complex64, f64)],
    quad: &DiskQuadrature,
) -> Result<A2Report> {
    if family.is_empty() {
        return Err(Error::Parameter("empty ball family".into()));
    }
    let ratios: Vec<f64> = family
        .par_iter()
        .map(|&(a, r)| a2_ratio(w, &MetricBall::new(a, r)?, quad))
        .collect::<Result<_>>()?;
    let mut per_radius: Vec<(f64, f64)> = Vec::new();
    let mut worst = 0;
    for (k, (&(_, r), &v)) in family.iter().zip(&ratios).enumerate() {
        if v > ratios[worst] {
            worst = k;
        }
        match per_radius.iter_mut().find(|(rr, _)| *rr == r) {
            Some(slot) => slot.1 = slot.1.max(v),
            None => per_radius.push((r, v)),
        }
    }
    Ok(A2Report {
        family_size: family.len(),
        estimate: ratios[worst],
        per_radius_max: per_radius,
        worst_center: family[worst].0,
        worst_radius: family[worst].1,
        refinement_trend: vec![ratios[worst]],
        verdict: "single level".into(),
    })
}

/// Ball family at refinement `level >= 1`: radii `2^-1 .. 2^-(5 + 2 level)`,
/// centers on eight rays at moduli `{0, .25, .5, .75, .9}` plus moduli
/// `1 - c r` that put the ball across or against the boundary.
pub fn a2_family(level: usize) -> Vec<(Complex64, f64)> {
    let mut out = Vec::new();
    let kmax = 5 + 2 * level;
    for k in 1..=kmax {
        let r = 0.5f64.powi(k as i32);
        let mut moduli = vec![0.0, 0.25, 0.5, 0.75, 0.9];
        for c in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
            let m = 1.0 - c * r;
            if m >= 0.0 {
                moduli.push(m);
            }
        }
        for m in moduli {
            let rays = if m == 0.0 { 1 } else { 8 };
            for j in 0..rays {
                let theta = std::f64::consts::TAU * (j as f64 + 0.125) / 8.0;
                out.push((Complex64::from_polar(m, theta), r));
            }
        }
    }
    out
}

/// Rule used for the balls of refinement `level`.
pub fn a2_level_quadrature(level: usize) -> DiskQuadrature {
    let s = 1usize << (level.max(1) - 1);
    DiskQuadrature::build(12 * s, 16 * s).expect("valid orders")
}

/// Runs levels `1..=refinements` and classifies the trend.
pub fn a2_refinement(w: &Weight, refinements: usize) -> Result<A2Report> {
    if refinements == 0 {
        return Err(Error::Parameter("refinements must be at least 1".into()));
    }
    let mut trend = Vec::new();
    let mut last = None;
    for level in 1..=refinements {
        let rep = a2_constant_estimate(w, &a2_family(level), &a2_level_quadrature(level))?;
        trend.push(rep.estimate);
        last = Some(rep);
    }
    let mut rep = last.expect("at least one level");
    rep.verdict = classify_trend(&trend).into();
    rep.refinement_trend = trend;
    Ok(rep)
}

fn classify_trend(trend: &[f64]) -> &'static str {
    if trend.len() < 2 {
        return "single level";
    }
    let n = trend.len();
    let growing = trend.windows(2).all(|p| p[1] > 1.05 * p[0]);
    if growing || trend[n - 1].is_infinite() {
        return "not A2 at tested scales";
    }
    if (trend[n - 1] / trend[n - 2] - 1.0).abs() <= 0.05 {
        "stable"
    } else {
        "inconclusive"
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoublingReport {
    pub radius: f64,
    pub pairs: usize,
    pub worst_ratio: f64,
    pub worst_pair: (Complex64, Complex64),
    pub a2_estimate: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Seeded pairs `(z, xi)` with `|z| <= max_modulus` and `xi ∈ D(z, r)`.
pub fn doubling_pairs(count: usize, max_modulus: f64, r: f64, seed: u64) -> Vec<(Complex64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let z = Complex64::from_polar(
                max_modulus * rng.gen::<f64>().sqrt(),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            let w = Complex64::from_polar(
                r * rng.gen::<f64>().sqrt() * 0.999,
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            (z, mobius(z, w))
        })
        .collect()
}

/// Checks `|D(z,r)|_ω < 8 [ω]_A₂ |D(xi,r)|_ω` on every pair.
pub fn doubling_check(
    w: &Weight,
    r: f64,
    pairs: &[(Complex64, Complex64)],
    a2_estimate: f64,
    quad: &DiskQuadrature,
) -> Result<DoublingReport> {
    if !(r > 0.0 && r <= 0.25) {
        return Err(Error::Parameter(format!("doubling radius must lie in (0, 1/4], got {r}")));
    }
    if pairs.is_empty() {
        return Err(Error::Parameter("no pairs to check".into()));
    }
    let ratios: Vec<f64> = pairs
        .par_iter()
        .map(|&(z, xi)| {
            let a = region_mass(w, &Region::Pseudo(PseudoDisk::new(z, r)?), quad)?;
            let b = region_mass(w, &Region::Pseudo(PseudoDisk::new(xi, r)?), quad)?;
            Ok(a / b)
        })
        .collect::<Result<_>>()?;
    let (k, worst) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
    let bound = 8.0 * a2_estimate;
    Ok(DoublingReport {
        radius: r,
        pairs: pairs.len(),
        worst_ratio: worst,
        worst_pair: pairs[k],
        a2_estimate,
        bound,
        holds: ratios.iter().all(|&v| v < bound),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let w0 = Weight::alpha(0.0).unwrap();
        assert_eq!(w0.eval(c(0.3, 0.7)).unwrap(), 1.0);
        assert_eq!(Weight::alpha(1.0).unwrap().eval(c(0.0, 0.0)).unwrap(), 2.0);
        let p = Weight::poly(vec![c(-0.9, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((p.eval(c(0.0, 0.0)).unwrap() - 0.81).abs() < 1e-15);
        assert!(matches!(
            p.eval(c(0.9, 0.0)).unwrap_err(),
            Error::NonPositiveWeight { .. }
        ));
        assert!(matches!(w0.eval(c(1.0, 0.0)).unwrap_err(), Error::OutsideDisk { .. }));
        assert!(Weight::alpha(-1.0).is_err());
    }

    #[test]
    fn spec_strings() {
        let w = Weight::parse_spec("alpha:0.5").unwrap();
        assert_eq!(w.standard_alpha(), Some(0.5));
        let p = Weight::parse_spec("poly:1,-0.9").unwrap();
        assert!((p.eval(c(0.5, 0.0)).unwrap() - 0.55 * 0.55).abs() < 1e-15);
        let d = Weight::parse_spec("dsl:(1-r^2)^0.5").unwrap();
        assert!((d.eval(c(0.6, 0.0)).unwrap() - 0.8).abs() < 1e-15);
        assert!(Weight::parse_spec("beta:1").is_err());
        assert!(Weight::parse_spec("alpha").is_err());
        assert!(Weight::parse_spec("dsl:1-").unwrap_err().is_config_error());
        assert!(Weight::parse_spec("grid:/nonexistent/file.csv").unwrap_err().is_config_error());
    }

    #[test]
    fn grid_weight_interpolates() {
        let mut text = String::from("r,theta,value\n");
        for r in [0.0, 0.5, 1.0] {
            for k in 0..4 {
                let t = k as f64 * std::f64::consts::FRAC_PI_2;
                text.push_str(&format!("{r},{t},{}\n", 1.0 + r));
            }
        }
        let g = GridWeight::from_csv(&text).unwrap();
        assert!((g.interpolate(c(0.25, 0.0)) - 1.25).abs() < 1e-14);
        assert!((g.interpolate(Complex64::from_polar(0.75, -0.3)) - 1.75).abs() < 1e-14);
        assert!(GridWeight::from_csv("0,0,1\n").is_err());
    }

    #[test]
    fn region_mass_examples() {
        let q = DiskQuadrature::build(32, 64).unwrap();
        let ball = |s: f64| Region::Ball(MetricBall::new(c(0.0, 0.0), s).unwrap());
        let one = Weight::unweighted();
        assert!((region_mass(&one, &ball(0.4), &q).unwrap() - 0.16).abs() < 1e-12);
        let w1 = Weight::alpha(1.0).unwrap();
        assert!((region_mass(&w1, &ball(0.5), &q).unwrap() - 0.4375).abs() < 1e-12);
        for a in [0.0, 0.5, 2.0] {
            let w = Weight::alpha(a).unwrap();
            assert!((region_mass(&w, &Region::Disk, &q).unwrap() - 1.0).abs() < 1e-8, "{a}");
        }
    }

    #[test]
    fn centered_ball_closed_form() {
        // |B(0,s)|_{ω_α} = 1 - (1 - s^2)^(1 + α)
        let q = DiskQuadrature::build(32, 64).unwrap();
        for a in [0.5, 1.0, 2.0] {
            let w = Weight::alpha(a).unwrap();
            for s in [0.25, 0.5, 0.75] {
                let got = region_mass(&w, &Region::Ball(MetricBall::new(c(0.0, 0.0), s).unwrap()), &q)
                    .unwrap();
                let want = 1.0 - (1.0 - s * s).powf(1.0 + a);
                assert!((got - want).abs() < 1e-10, "a={a} s={s}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn additive_over_disjoint_pieces() {
        let q = DiskQuadrature::build(32, 64).unwrap();
        let w = Weight::alpha(0.5).unwrap();
        let left = Region::indicator("left", |z| z.re < 0.0);
        let right = Region::indicator("right", |z| z.re >= 0.0);
        let total = region_mass(&w, &Region::Disk, &q).unwrap();
        let parts = region_mass(&w, &left, &q).unwrap() + region_mass(&w, &right, &q).unwrap();
        assert!((total - parts).abs() < 1e-14);
    }

    #[test]
    fn a2_of_constant_weight_is_one() {
        let w = Weight::unweighted();
        let rep = a2_constant_estimate(&w, &a2_family(1), &a2_level_quadrature(1)).unwrap();
        assert!((rep.estimate - 1.0).abs() < 1e-10);
    }

    #[test]
    fn a2_ratio_at_least_one() {
        let w = Weight::poly(vec![c(-0.5, 0.3), c(1.0, 0.0)]).unwrap();
        let q = a2_level_quadrature(1);
        for (a, r) in a2_family(1).into_iter().step_by(7) {
            let v = a2_ratio(&w, &MetricBall::new(a, r).unwrap(), &q).unwrap();
            assert!(v >= 1.0 - 1e-12, "{a} {r} {v}");
        }
    }

    #[test]
    fn doubling_examples() {
        let q = DiskQuadrature::build(16, 32).unwrap();
        let w = Weight::unweighted();
        let pairs = doubling_pairs(100, 0.95, 0.125, 17);
        let rep = doubling_check(&w, 0.125, &pairs, 1.0, &q).unwrap();
        assert!(rep.holds && rep.worst_ratio < 2.0, "{rep:?}");
        let same = doubling_check(&w, 0.125, &[(c(0.3, 0.2), c(0.3, 0.2))], 1.0, &q).unwrap();
        assert!((same.worst_ratio - 1.0).abs() < 1e-14);
        assert!(doubling_check(&w, 0.3, &pairs, 1.0, &q).is_err());
    }
}
