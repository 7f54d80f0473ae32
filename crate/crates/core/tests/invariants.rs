//! Property tests for invariants that span several modules.

use bergman_lab::basis::{orthonormal_system, GramSystem};
use bergman_lab::carleson::{frame_bounds, random_harmonic_family};
use bergman_lab::dsl::{parse, BinOp, Expr, Func, Var};
use bergman_lab::geometry::{rho, MetricBall, PseudoDisk};
use bergman_lab::invertibility::{block_decomposition, block_identity_check, harmonic_matrix_w_order};
use bergman_lab::kernels::{k_alpha, r_alpha};
use bergman_lab::lattice::{generate_lattice, Lattice};
use bergman_lab::quadrature::{DiskQuadrature, Region};
use bergman_lab::symbol::Symbol;
use bergman_lab::toeplitz::{
    assemble, berezin_alpha, singular_values, trace_identity_check, BerezinFlavor, SymbolMeasure, ToeplitzMatrix,
};
use bergman_lab::weights::{a2_ratio, region_mass, Weight};
use bergman_lab::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn point(max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..max, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn unweighted(n: usize) -> &'static (GramSystem, DiskQuadrature) {
    static CACHE: OnceLock<(GramSystem, DiskQuadrature)> = OnceLock::new();
    assert_eq!(n, 6);
    CACHE.get_or_init(|| {
        let q = DiskQuadrature::for_degree(n);
        (orthonormal_system(n, &Weight::unweighted(), &q).unwrap(), q)
    })
}

fn min_eig(m: &bergman_lab::basis::CMatrix) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.min()
}

/// A real trigonometric symbol `c + a x + b y + d r^2 + e cos(3 theta)` with
/// `c` large enough to keep it at least `floor`.
fn trig_symbol() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.0..1.0f64)
}

fn build_trig((a, b, d, e, floor): (f64, f64, f64, f64, f64)) -> (Symbol, f64, f64) {
    let c = a.abs() + b.abs() + d.abs() + e.abs() + floor;
    let f = move |z: Complex64| c + a * z.re + b * z.im + d * z.norm_sqr() + e * (3.0 * z.arg()).cos();
    (Symbol::real("trig", f), floor, c + a.abs() + b.abs() + d.abs() + e.abs())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn pseudo_disk_membership_matches_metric(a in point(0.95), r in 0.05..0.9f64, z in point(0.999)) {
        let d = PseudoDisk::new(a, r).unwrap();
        let inside = rho(z, a) < r;
        // points on the boundary circle can go either way
        if (rho(z, a) - r).abs() > 1e-9 {
            prop_assert_eq!(d.contains(z), inside);
        }
    }

    #[test]
    fn harmonic_kernel_is_twice_real_part_minus_one(
        alpha in 0.0..3.0f64, z in point(0.95), l in point(0.95)
    ) {
        let r = r_alpha(alpha, z, l);
        let k = k_alpha(alpha, z, l);
        prop_assert!((r - (2.0 * k.re - 1.0)).abs() <= 1e-12 * r.abs().max(1.0));
        prop_assert!((r - r_alpha(alpha, l, z)).abs() <= 1e-12 * r.abs().max(1.0));
    }

    #[test]
    fn a2_ratio_is_at_least_one(alpha in 0.0..2.0f64, a in point(0.9), r in 0.1..0.8f64) {
        let w = Weight::alpha(alpha).unwrap();
        let q = DiskQuadrature::build(16, 32).unwrap();
        let ratio = a2_ratio(&w, &MetricBall::new(a, r).unwrap(), &q).unwrap();
        prop_assert!(ratio >= 1.0 - 1e-9, "{}", ratio);
    }

    #[test]
    fn region_mass_is_monotone(alpha in 0.0..2.0f64, a in point(0.8), r1 in 0.05..0.5f64, grow in 0.0..0.4f64) {
        let w = Weight::alpha(alpha).unwrap();
        let q = DiskQuadrature::build(16, 32).unwrap();
        let small = Region::Pseudo(PseudoDisk::new(a, r1).unwrap());
        let big = Region::Pseudo(PseudoDisk::new(a, r1 + grow).unwrap());
        let m1 = region_mass(&w, &small, &q).unwrap();
        let m2 = region_mass(&w, &big, &q).unwrap();
        prop_assert!(m2 >= m1 * (1.0 - 1e-9), "{} {}", m1, m2);
    }

    #[test]
    fn reproducing_identity_in_truncation(z in point(0.9), seed in 0u64..1000) {
        let (gs, q) = unweighted(6);
        let f = random_harmonic_family(6, 1, seed).remove(0);
        // <f, K_z> = f(z) with K_z(l) = sum e_k(l) conj(e_k(z))
        let approx: Complex64 = q
            .iter()
            .map(|(l, w)| f.eval(l) * gs.kernel(z, l) * w)
            .sum();
        let exact = f.eval(z);
        prop_assert!((approx - exact).norm() <= 1e-8 * exact.norm().max(1.0), "{} vs {}", approx, exact);
    }

    #[test]
    fn atomic_measures_give_psd_monotone_matrices(
        pts in prop::collection::vec((point(0.9), 0.0..2.0f64), 1..6),
        extra in prop::collection::vec((point(0.9), 0.0..2.0f64), 1..4),
    ) {
        let (gs, q) = unweighted(6);
        let small = SymbolMeasure::atomic(pts.clone()).unwrap();
        let mut all = pts;
        all.extend(extra);
        let big = SymbolMeasure::atomic(all).unwrap();
        let m1 = assemble(&small, gs, q).unwrap();
        let m2 = assemble(&big, gs, q).unwrap();
        prop_assert!(min_eig(&m1.matrix) >= -1e-10);
        prop_assert!(min_eig(&(&m2.matrix - &m1.matrix)) >= -1e-10);
        let tr = trace_identity_check(&big, gs, q, &m2).unwrap();
        prop_assert!(tr.holds, "{:?}", tr);
    }

    #[test]
    fn berezin_transforms_average_the_symbol(s in trig_symbol(), z in point(0.9), alpha in 0.0..2.0f64) {
        let (phi, lo, hi) = build_trig(s);
        let q = DiskQuadrature::build(48, 96).unwrap();
        for flavor in [BerezinFlavor::Harmonic, BerezinFlavor::Analytic] {
            let b = berezin_alpha(&phi, z, alpha, flavor, &q).unwrap();
            prop_assert!(b >= lo - 1e-8 && b <= hi + 1e-8, "{:?}: {} not in [{}, {}]", flavor, b, lo, hi);
        }
    }

    #[test]
    fn frame_ratio_is_scale_invariant(seed in 0u64..1000, c in 0.01..100.0f64) {
        let (gs, _) = unweighted(6);
        let lat = lattice();
        let masses = vec![0.01; lat.len()];
        let f = random_harmonic_family(6, 1, seed);
        let g = vec![f[0].scale(c)];
        let a = frame_bounds(lat, &masses, &f, gs).unwrap();
        let b = frame_bounds(lat, &masses, &g, gs).unwrap();
        prop_assert!((a.c1 - b.c1).abs() <= 1e-12 * a.c1);
    }

    #[test]
    fn dsl_print_parse_round_trip(e in expr()) {
        let printed = e.to_string();
        let back = parse(&printed);
        prop_assert!(back.is_ok(), "{} failed to parse: {:?}", printed, back);
        prop_assert_eq!(back.unwrap(), e, "{}", printed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn sigma_min_is_nonincreasing_in_n(s in trig_symbol(), alpha in 0.0..1.5f64) {
        let (phi, _, _) = build_trig(s);
        let q = DiskQuadrature::for_degree(10);
        let mut prev = f64::INFINITY;
        for n in [2, 4, 6, 8, 10] {
            let m = harmonic_matrix_w_order(&phi, alpha, n, &q).unwrap();
            let sigma = singular_values(&ToeplitzMatrix::new(m, true)).unwrap();
            let smin = *sigma.last().unwrap();
            prop_assert!(smin <= prev + 1e-10, "N={}: {} > {}", n, smin, prev);
            prev = smin;
        }
    }

    #[test]
    fn block_identity_holds_for_trig_symbols(s in trig_symbol(), alpha in 0.0..2.0f64, n in 2usize..7) {
        let (phi, _, _) = build_trig(s);
        let q = DiskQuadrature::for_degree(n + 4);
        let r = block_identity_check(&phi, alpha, n, &q).unwrap();
        prop_assert!(r.deviation <= 1e-8, "{:?}", r);
    }

    #[test]
    fn analytic_symbols_have_no_c_block(
        coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..4),
        alpha in 0.0..2.0f64,
    ) {
        let c: Vec<Complex64> = coeffs.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let phi = Symbol::analytic_poly(c);
        let q = DiskQuadrature::for_degree(10);
        let b = block_decomposition(&phi, alpha, 5, &q).unwrap();
        let cmax = b.c.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let rmax = b.rank_one_a.iter().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!(cmax <= 1e-10 && rmax <= 1e-10, "C {} rank-one {}", cmax, rmax);
    }
}

fn lattice() -> &'static Lattice {
    static L: OnceLock<Lattice> = OnceLock::new();
    L.get_or_init(|| generate_lattice(0.05, 0.3, 50).unwrap())
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..1000, 0u32..4).prop_map(|(m, e)| Expr::Num(m as f64 / 10f64.powi(e as i32))),
        Just(Expr::Pi),
        prop_oneof![Just(Var::X), Just(Var::Y), Just(Var::R), Just(Var::Theta)].prop_map(Expr::Var),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let op = prop_oneof![
            Just(BinOp::Add),
            Just(BinOp::Sub),
            Just(BinOp::Mul),
            Just(BinOp::Div),
            Just(BinOp::Pow)
        ];
        let func = prop_oneof![
            Just(Func::Abs),
            Just(Func::Exp),
            Just(Func::Log),
            Just(Func::Sin),
            Just(Func::Cos),
            Just(Func::Sqrt),
            Just(Func::Re),
            Just(Func::Im),
            Just(Func::ChiPos)
        ];
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Expr::Bin(o, Box::new(a), Box::new(b))),
            (func, inner).prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
        ]
    })
}
