//! Finite ε-lattices in the pseudohyperbolic metric.
//!
//! Points sit on concentric rings at pseudohyperbolic spacing `ε/2`; each
//! ring carries the fewest equally spaced points whose neighbours are within
//! `ε` of each other. Odd rings are rotated by half a step.

use num_complex::Complex64;
use rayon::prelude::*;
use rstar::primitives::GeomWithData;
use rstar::RTree;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{rho, PseudoDisk};
use crate::quadrature::{region_refine, DiskQuadrature, Region};
use crate::weights::Weight;

type Indexed = GeomWithData<[f64; 2], usize>;

pub const DEFAULT_CUTOFF: f64 = 0.02;
pub const DEFAULT_PROBE: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "LatticeRecord", into = "LatticeRecord")]
pub struct Lattice {
    pub epsilon: f64,
    pub cutoff: f64,
    pub points: Vec<Complex64>,
    pub separation: f64,
    pub cover_defect: f64,
}

/// On-disk form with points as `[x, y]` pairs.
#[derive(Serialize, Deserialize)]
struct LatticeRecord {
    epsilon: f64,
    cutoff: f64,
    points: Vec<[f64; 2]>,
    separation: f64,
    cover_defect: f64,
}

impl From<LatticeRecord> for Lattice {
    fn from(r: LatticeRecord) -> Self {
        Self {
            epsilon: r.epsilon,
            cutoff: r.cutoff,
            points: r.points.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
            separation: r.separation,
            cover_defect: r.cover_defect,
        }
    }
}

impl From<Lattice> for LatticeRecord {
    fn from(l: Lattice) -> Self {
        Self {
            epsilon: l.epsilon,
            cutoff: l.cutoff,
            points: l.points.iter().map(|z| [z.re, z.im]).collect(),
            separation: l.separation,
            cover_defect: l.cover_defect,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub separation: f64,
    pub cover_defect: f64,
    pub worst_probe: Complex64,
    pub probes: usize,
    /// `separation >= ε/2`
    pub separated: bool,
    /// `cover_defect <= ε`
    pub covered: bool,
}

impl Lattice {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// A lattice from explicit points; certificates are computed on a probe
    /// grid of the given size.
    pub fn from_points(epsilon: f64, cutoff: f64, points: Vec<Complex64>, probe: usize) -> Result<Self> {
        let mut l = Self {
            epsilon,
            cutoff,
            points,
            separation: 0.0,
            cover_defect: 0.0,
        };
        let cert = verify_lattice(&l, probe)?;
        l.separation = cert.separation;
        l.cover_defect = cert.cover_defect;
        Ok(l)
    }

    /// `|D(a_n, r)|_ω` for every point.
    pub fn disk_masses(&self, w: &Weight, r: f64, quad: &DiskQuadrature) -> Result<Vec<f64>> {
        self.points
            .par_iter()
            .map(|&a| {
                let rule = region_refine(&Region::Pseudo(PseudoDisk::new(a, r)?), quad)?;
                rule.try_sum_real(|z| w.eval(z))
            })
            .collect()
    }
}

/// Ring radii and per-ring counts of the deterministic construction.
fn rings(epsilon: f64, cutoff: f64) -> Vec<(f64, usize)> {
    let gap = 0.5 * epsilon * (1.0 + 1e-9);
    let g = gap.atanh();
    let mut out = vec![(0.0, 1)];
    let mut k = 1;
    loop {
        let r = (k as f64 * g).tanh();
        if r > 1.0 - cutoff {
            break;
        }
        let mut n = 3usize;
        while rho(Complex64::new(r, 0.0), Complex64::from_polar(r, std::f64::consts::TAU / n as f64))
            > epsilon * (1.0 - 1e-9)
        {
            n = (n as f64 * 1.05).ceil() as usize;
        }
        // walk back to the smallest admissible count
        while n > 3
            && rho(
                Complex64::new(r, 0.0),
                Complex64::from_polar(r, std::f64::consts::TAU / (n - 1) as f64),
            ) <= epsilon * (1.0 - 1e-9)
        {
            n -= 1;
        }
        out.push((r, n));
        k += 1;
    }
    out
}

pub fn generate_lattice(epsilon: f64, cutoff: f64, probe: usize) -> Result<Lattice> {
    if !(epsilon > 0.0 && epsilon < 1.0 / 16.0) {
        return Err(Error::Parameter(format!(
            "lattice epsilon must lie in (0, 1/16), got {epsilon}"
        )));
    }
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(Error::Parameter(format!("cutoff must lie in (0,1), got {cutoff}")));
    }
    let mut points = Vec::new();
    for (k, (r, n)) in rings(epsilon, cutoff).into_iter().enumerate() {
        let step = std::f64::consts::TAU / n as f64;
        let offset = if k % 2 == 1 { 0.5 * step } else { 0.0 };
        for j in 0..n {
            points.push(if r == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(r, offset + step * j as f64)
            });
        }
    }
    let lattice = Lattice::from_points(epsilon, cutoff, points, probe)?;
    if lattice.cover_defect > epsilon {
        let cert = verify_lattice(&lattice, probe)?;
        return Err(Error::LatticeCover {
            defect: cert.cover_defect,
            epsilon,
            worst: cert.worst_probe,
        });
    }
    Ok(lattice)
}

/// Euclidean radius of a ball around `z` containing `D(z, q)`.
fn search_radius(z: Complex64, q: f64) -> f64 {
    q * (1.0 - z.norm_sqr()) / (1.0 - q)
}

/// Smallest pseudohyperbolic distance from `z` to an indexed point other
/// than `skip`, or `None` when none lies within `q`.
fn nearest_within(tree: &RTree<Indexed>, z: Complex64, q: f64, skip: Option<usize>) -> Option<f64> {
    let er = search_radius(z, q);
    tree.locate_within_distance([z.re, z.im], er * er)
        .filter(|p| Some(p.data) != skip)
        .map(|p| rho(z, Complex64::new(p.geom()[0], p.geom()[1])))
        .filter(|&d| d < q)
        .min_by(f64::total_cmp)
}

fn nearest(tree: &RTree<Indexed>, z: Complex64, q0: f64, skip: Option<usize>) -> Option<f64> {
    let mut q = q0;
    loop {
        if let Some(d) = nearest_within(tree, z, q, skip) {
            return Some(d);
        }
        if q >= 0.999 {
            return None;
        }
        q = (2.0 * q).min(0.999);
    }
}

/// Recomputes separation and cover defect from scratch. The probe grid is
/// polar, `probe x probe`, over `|z| <= max |a_n|`, or over `|z| <= 1 - cutoff`
/// when every point sits at the origin.
pub fn verify_lattice(lattice: &Lattice, probe: usize) -> Result<Certificate> {
    if lattice.points.is_empty() {
        return Err(Error::Parameter("cannot verify an empty lattice".into()));
    }
    let eps = lattice.epsilon;
    let tree = RTree::bulk_load(
        lattice
            .points
            .iter()
            .enumerate()
            .map(|(i, z)| Indexed::new([z.re, z.im], i))
            .collect(),
    );
    let separation = if lattice.points.len() == 1 {
        1.0
    } else {
        lattice
            .points
            .par_iter()
            .enumerate()
            .filter_map(|(i, &z)| nearest(&tree, z, eps.max(1e-6), Some(i)))
            .min_by(f64::total_cmp)
            .unwrap_or(1.0)
    };
    let rmax = lattice
        .points
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let rmax = if rmax > 0.0 { rmax } else { 1.0 - lattice.cutoff };
    let m = probe.max(2);
    let probes: Vec<Complex64> = (0..m)
        .flat_map(|i| {
            (0..m).map(move |j| {
                Complex64::from_polar(
                    rmax * (i as f64 + 0.5) / m as f64,
                    std::f64::consts::TAU * j as f64 / m as f64,
                )
            })
        })
        .collect();
    let (cover_defect, worst_probe) = probes
        .par_iter()
        .map(|&z| (nearest(&tree, z, (2.0 * eps).min(0.5), None).unwrap_or(1.0), z))
        .reduce(
            || (0.0, Complex64::new(0.0, 0.0)),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && (b.1.re, b.1.im) < (a.1.re, a.1.im)) { b } else { a },
        );
    Ok(Certificate {
        separation,
        cover_defect,
        worst_probe,
        probes: probes.len(),
        separated: separation >= 0.5 * eps,
        covered: cover_defect <= eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_lattice_certificates() {
        let l = generate_lattice(1.0 / 32.0, 0.02, 100).unwrap();
        assert!(l.separation >= 1.0 / 64.0, "{}", l.separation);
        assert!(l.cover_defect <= 1.0 / 32.0, "{}", l.cover_defect);
        assert_eq!(l.points[0], Complex64::new(0.0, 0.0));
        assert!(l.points.iter().all(|z| z.norm() <= 0.98));
        let again = generate_lattice(1.0 / 32.0, 0.02, 100).unwrap();
        assert_eq!(l, again);
        let cert = verify_lattice(&l, 100).unwrap();
        assert!((cert.separation - l.separation).abs() < 1e-12);
        assert!((cert.cover_defect - l.cover_defect).abs() < 1e-12);
        assert!(cert.separated && cert.covered);
    }

    #[test]
    fn single_point_convention() {
        let l = Lattice {
            epsilon: 0.5,
            cutoff: 0.02,
            points: vec![Complex64::new(0.0, 0.0)],
            separation: 0.0,
            cover_defect: 0.0,
        };
        let cert = verify_lattice(&l, 50).unwrap();
        assert_eq!(cert.separation, 1.0);
        // the largest probe modulus on a grid over |z| <= 0.98
        let expected = 0.98 * 49.5 / 50.0;
        assert!((cert.cover_defect - expected).abs() < 1e-12, "{}", cert.cover_defect);
    }

    #[test]
    fn close_pair_is_flagged() {
        let l = Lattice {
            epsilon: 1.0 / 32.0,
            cutoff: 0.02,
            points: vec![Complex64::new(0.0, 0.0), Complex64::new(0.001, 0.0)],
            separation: 0.0,
            cover_defect: 0.0,
        };
        let cert = verify_lattice(&l, 20).unwrap();
        assert!((cert.separation - 0.001).abs() < 1e-15);
        assert!(!cert.separated);
    }

    #[test]
    fn parameters_are_validated() {
        assert!(generate_lattice(0.1, 0.02, 10).is_err());
        assert!(generate_lattice(0.03, 0.0, 10).is_err());
    }
}
