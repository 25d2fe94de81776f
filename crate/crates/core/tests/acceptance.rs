//! Acceptance criteria. Runs every check, prints one PASS/FAIL line per
//! check, and exits nonzero if any check failed.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use common::{random_polytope, rng};
use rand::RngExt;
use translative::config::SimulationConfig;
use translative::functionals::montecarlo::{iterated_lhs_mc, rotation_average_determinant, z_score};
use translative::functionals::{
    extension_measure, extension_total, phi_homogeneous, phi_total, translative_lhs_mc, translative_rhs,
    Family,
};
use translative::geom::{AaBox, Polytope, Region, Vec3};
use translative::gp_union::{
    classify_boundary_features, gp_extension_measure, gp_phi, gp_phi_degree, GpUnion,
};
use translative::stochastic::{
    boolean_density_formula, sample_poisson, simulate, GrainDistribution, Intensity, RotationAverage,
    RotationMode, Shape, Simulation,
};

const SIGMA: f64 = 3.0;

type Criterion = (&'static str, fn(&mut Suite));
const EPS: f64 = 1e-9;

struct Check {
    id: &'static str,
    name: String,
    pass: bool,
    detail: String,
}

#[derive(Default)]
struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn check(&mut self, id: &'static str, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        let c = Check {
            id,
            name: name.into(),
            pass,
            detail: detail.into(),
        };
        println!(
            "{} [{:>2}] {}: {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.detail
        );
        self.checks.push(c);
    }

    fn z(&mut self, id: &'static str, name: &str, mean: f64, se: f64, target: f64) {
        let z = z_score(mean, se, target);
        self.check(
            id,
            name,
            z.abs() < SIGMA,
            format!("estimate {mean:.6} ± {se:.2e}, target {target:.6}, z = {z:.3}"),
        );
    }

    fn close(&mut self, id: &'static str, name: &str, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs();
        self.check(
            id,
            name,
            err <= tol,
            format!("{got} vs {want} (|err| = {err:.2e}, tol {tol:.0e})"),
        );
    }

    fn runtime(&mut self, id: &'static str, took: Duration, limit: Duration) {
        self.check(
            id,
            "runtime",
            took < limit,
            format!("{:.1} s (limit {} s)", took.as_secs_f64(), limit.as_secs()),
        );
    }

    /// Runs a criterion, turning a panic into a failed check.
    fn run(&mut self, id: &'static str, f: fn(&mut Suite)) {
        if let Err(p) = catch_unwind(AssertUnwindSafe(|| f(self))) {
            let m = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_default();
            self.check(id, "completed", false, format!("panicked: {m}"));
        }
    }
}

fn square() -> Polytope {
    Polytope::unit_cube(2).unwrap()
}

fn covering(p: &Polytope) -> Region {
    Region::covering(&[p])
}

/// Vertex count: two unit squares.
fn c01(s: &mut Suite) {
    let t = Instant::now();
    let f = Family::skeleton(2).unwrap();
    let p = square();
    let a = covering(&p);
    let rhs = translative_rhs(&f, 0, &[&p, &p], &[&a, &a]).unwrap();
    s.close("1", "rhs of the vertex-count formula", rhs, 16.0, EPS);
    let lhs = translative_lhs_mc(&f, 0, &p, &p, &a, &a, 1_000_000, 1).unwrap();
    s.z("1", "mc lhs, 10^6 samples", lhs.mean, lhs.stderr, rhs);
    s.runtime("1", t.elapsed(), Duration::from_secs(10));
}

/// Degree d - 1: squares and random polygon pairs.
fn c02(s: &mut Suite) {
    let f = Family::skeleton(2).unwrap();
    let p = square();
    let a = covering(&p);
    let rhs = translative_rhs(&f, 1, &[&p, &p], &[&a, &a]).unwrap();
    s.close("2", "rhs for unit squares", rhs, 8.0, EPS);
    let lhs = translative_lhs_mc(&f, 1, &p, &p, &a, &a, 1_000_000, 2).unwrap();
    s.z("2", "mc lhs for unit squares", lhs.mean, lhs.stderr, rhs);
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    let mut formula_err: f64 = 0.0;
    for i in 0..20 {
        let p = random_polytope(2, 7, Vec3::zeros(), &mut r);
        let q = random_polytope(2, 6, Vec3::new(0.3, -0.2, 0.0), &mut r);
        let (a, b) = (covering(&p), covering(&q));
        let rhs = translative_rhs(&f, 1, &[&p, &q], &[&a, &b]).unwrap();
        // φ^(d-1)(P) V_d(Q) + φ^(d-1)(Q) V_d(P)
        let direct = phi_homogeneous(&f, 1, &p).unwrap() * q.volume()
            + phi_homogeneous(&f, 1, &q).unwrap() * p.volume();
        formula_err = formula_err.max((rhs - direct).abs());
        let lhs = translative_lhs_mc(&f, 1, &p, &q, &a, &b, 100_000, 200 + i).unwrap();
        let z = lhs.z_score(rhs);
        worst = worst.max(z.abs());
        s.check(
            "2",
            format!("random pair {i}"),
            z.abs() < SIGMA,
            format!(
                "rhs {rhs:.6}, lhs {:.6} ± {:.2e}, z = {z:.3}",
                lhs.mean, lhs.stderr
            ),
        );
    }
    s.close(
        "2",
        "rhs equals the two-term product formula (max over pairs)",
        formula_err,
        0.0,
        EPS,
    );
    println!("      [ 2] largest |z| over random pairs: {worst:.3}");
}

/// Iterated formula, three squares.
fn c03(s: &mut Suite) {
    let t = Instant::now();
    let f = Family::skeleton(2).unwrap();
    let p = square();
    let a = covering(&p);
    let rhs = translative_rhs(&f, 0, &[&p, &p, &p], &[&a, &a, &a]).unwrap();
    let lhs = iterated_lhs_mc(&f, 0, &[&p, &p, &p], &[&a, &a, &a], 1_000_000, 3).unwrap();
    s.z(
        "3",
        "k = 3 mc lhs vs mixed-functional rhs",
        lhs.mean,
        lhs.stderr,
        rhs,
    );
    s.runtime("3", t.elapsed(), Duration::from_secs(60));
}

/// Homogeneous decomposition under dilation.
fn c04(s: &mut Suite) {
    let mut r = rng(4);
    for d in [2, 3] {
        let families = [
            Family::skeleton(d).unwrap(),
            Family::intrinsic_volumes(d).unwrap(),
            Family::parse(
                d,
                if d == 2 {
                    "angle:2,const:0.5;cd=3"
                } else {
                    "angle:2,const:0.5,angle:1;cd=3"
                },
            )
            .unwrap(),
        ];
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let p = random_polytope(d, 9, Vec3::zeros(), &mut r);
            for f in &families {
                let degrees: Vec<f64> = (0..=d).map(|j| phi_homogeneous(f, j, &p).unwrap()).collect();
                for alpha in [0.5, 1.0, 2.0, 3.0] {
                    let lhs = phi_total(f, &p.scale(alpha).unwrap()).unwrap();
                    let rhs: f64 = degrees
                        .iter()
                        .enumerate()
                        .map(|(j, v)| alpha.powi(j as i32) * v)
                        .sum();
                    worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1e-300));
                }
            }
        }
        s.check(
            "4",
            format!("φ(αP) = Σ α^j φ^(j)(P), 50 random polytopes, d = {d}"),
            worst < EPS,
            format!("max relative error {worst:.2e}"),
        );
    }
}

/// Global values of perturbed extensions, and the square example.
fn c05(s: &mut Suite) {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let d = 2 + i % 2;
        let p = random_polytope(d, 8, Vec3::zeros(), &mut r);
        let mut x0 = Vec3::zeros();
        for k in 0..d {
            x0[k] = r.random_range(-0.5..0.5);
        }
        let a = covering(&p);
        for f in [
            Family::skeleton(d).unwrap(),
            Family::intrinsic_volumes(d).unwrap(),
        ] {
            let g = f.perturbed(&x0);
            worst = worst
                .max((extension_total(&g, &p, &a).unwrap() - extension_total(&f, &p, &a).unwrap()).abs());
        }
    }
    s.check(
        "5",
        "|Φ̃(P, R^d) - Φ(P, R^d)|, 50 random polytopes",
        worst < EPS,
        format!("max {worst:.2e}"),
    );
    let f = Family::skeleton(2).unwrap();
    let g = f.perturbed(&Vec3::new(0.1, 0.0, 0.0));
    let p = square();
    let half = Region::halfspace(2, Vec3::new(1.0, 0.0, 0.0), 0.5);
    s.close(
        "5",
        "Φ̃^(1)(square, {x1 <= 1/2})",
        extension_measure(&g, 1, &p, &half).unwrap(),
        1.9,
        EPS,
    );
    s.close(
        "5",
        "Φ^(1)(square, {x1 <= 1/2})",
        extension_measure(&f, 1, &p, &half).unwrap(),
        2.0,
        EPS,
    );
}

/// Redundant parts and boundary concentration.
fn c06(s: &mut Suite) {
    let a = square();
    let b = Polytope::cuboid(&[0.5, 0.5], &[1.5, 1.5]).unwrap();
    let inner = Polytope::cuboid(&[0.2, 0.2], &[0.8, 0.8]).unwrap();
    let (u2, c2) = GpUnion::new(vec![a.clone(), b.clone()]).unwrap();
    let (u3, c3) = GpUnion::new(vec![a, b, inner]).unwrap();
    s.check(
        "6",
        "both representations certified",
        c2.passed && c3.passed,
        format!("{} / {}", c2.passed, c3.passed),
    );
    let region = Region::halfspace(2, Vec3::new(0.8, 0.6, 0.0), 0.9);
    let mut worst: f64 = 0.0;
    for f in [
        Family::skeleton(2).unwrap(),
        Family::intrinsic_volumes(2).unwrap(),
    ] {
        worst = worst.max((gp_phi(&f, &u2).unwrap() - gp_phi(&f, &u3).unwrap()).abs());
        for j in 0..=2 {
            let m2 = gp_extension_measure(&f, j, &u2, &region).unwrap();
            let m3 = gp_extension_measure(&f, j, &u3, &region).unwrap();
            worst = worst.max((m2 - m3).abs());
        }
    }
    s.check(
        "6",
        "redundant interior part leaves gp_phi and gp_extension_measure unchanged",
        worst < EPS,
        format!("max difference {worst:.2e}"),
    );
    let boundary = Family::parse(2, "const:1,angle:1;cd=0").unwrap();
    let mut worst: f64 = 0.0;
    for bx in [
        AaBox::new(&[0.1, 0.1], &[0.9, 0.9]),
        AaBox::new(&[0.55, 0.3], &[0.95, 1.4]),
    ] {
        let r = bx.to_region();
        for u in [&u2, &u3] {
            for j in 0..=2 {
                worst = worst.max(gp_extension_measure(&boundary, j, u, &r).unwrap().abs());
            }
        }
    }
    s.check(
        "6",
        "boundary functional gives interior boxes measure 0",
        worst < EPS,
        format!("max {worst:.2e}"),
    );
}

/// Signed boundary features against inclusion-exclusion.
fn c07(s: &mut Suite) {
    let f = Family::skeleton(2).unwrap();
    let (u, _) = GpUnion::new(vec![
        square(),
        Polytope::cuboid(&[0.5, 0.5], &[1.5, 1.5]).unwrap(),
    ])
    .unwrap();
    let r = classify_boundary_features(&u).unwrap();
    let ie = gp_phi_degree(&f, 0, &u).unwrap();
    s.check(
        "7",
        "two overlapping squares",
        r.convex_vertices == 6 && r.concave_vertices == 2 && r.signed_vertices() == 4.0 && ie == 4.0,
        format!(
            "{} convex - {} concave = {}, inclusion-exclusion {ie}",
            r.convex_vertices,
            r.concave_vertices,
            r.signed_vertices()
        ),
    );
    let mut rg = rng(7);
    let (mut worst_v, mut worst_l): (f64, f64) = (0.0, 0.0);
    let mut n = 0;
    while n < 100 {
        let p = random_polytope(2, 7, Vec3::zeros(), &mut rg);
        let c = Vec3::new(rg.random_range(-0.8..0.8), rg.random_range(-0.8..0.8), 0.0);
        let q = random_polytope(2, 7, c, &mut rg);
        let (u, cert) = GpUnion::new(vec![p, q]).unwrap();
        if !cert.passed {
            continue;
        }
        n += 1;
        let r = classify_boundary_features(&u).unwrap();
        worst_v = worst_v.max((r.signed_vertices() - gp_phi_degree(&f, 0, &u).unwrap()).abs());
        worst_l = worst_l.max((r.signed_edge_length() - gp_phi_degree(&f, 1, &u).unwrap()).abs());
    }
    s.check(
        "7",
        "100 random 2-part unions, signed vertices",
        worst_v < EPS,
        format!("max difference {worst_v:.2e}"),
    );
    s.check(
        "7",
        "100 random 2-part unions, boundary length",
        worst_l < EPS,
        format!("max difference {worst_l:.2e}"),
    );
}

/// Rotation mean of two unit segments, intrinsic volumes of the cube.
fn c08(s: &mut Suite) {
    let seg = Polytope::from_points(&[Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0)], 2).unwrap();
    let e = rotation_average_determinant(&seg.whole(), &seg.whole(), 1_000_000, 8).unwrap();
    s.z(
        "8",
        "mean of [F, ϑG] for unit segments vs 2/π",
        e.mean,
        e.stderr,
        2.0 / PI,
    );
    let f = Family::intrinsic_volumes(3).unwrap();
    let c = Polytope::unit_cube(3).unwrap();
    for (j, want) in [1.0, 3.0, 3.0, 1.0].into_iter().enumerate() {
        s.close(
            "8",
            &format!("V_{j}(unit cube)"),
            phi_homogeneous(&f, j, &c).unwrap(),
            want,
            EPS,
        );
    }
}

fn simulate_cubes(d: usize, gamma: f64, side: f64, reps: usize) -> (GrainDistribution, Simulation) {
    let q = GrainDistribution::single(
        Shape::Convex(Polytope::unit_cube(d).unwrap()),
        RotationMode::Isotropic,
    )
    .unwrap();
    let f = Family::skeleton(d).unwrap();
    let sim = simulate(&f, &q, gamma, &AaBox::centered_cube(d, side), reps, 2009).unwrap();
    (q, sim)
}

fn general_formula(
    id: &'static str,
    name: &str,
    q: &GrainDistribution,
    gamma: f64,
    sim: &Simulation,
    j: usize,
) {
    let f = Family::skeleton(q.d).unwrap();
    let a = boolean_density_formula(&f, j, q, gamma, &RotationAverage::default()).unwrap();
    let e = sim.z[j];
    let z = z_score(e.mean, (e.stderr.powi(2) + a.stderr.powi(2)).sqrt(), a.value);
    println!(
        "      [{id:>2}] {name}(Z) by the general series with rotation-averaged mixed terms: {:.6} ± {:.1e}, z = {z:.3}",
        a.value, a.stderr
    );
}

/// Planar Boolean model of isotropic unit squares.
fn c09(s: &mut Suite) {
    let t = Instant::now();
    let gamma = 0.3;
    let (q, sim) = simulate_cubes(2, gamma, 50.0, 200);
    let e = (-gamma).exp();
    let (l, n0) = (4.0 * gamma, 4.0 * gamma);
    s.z(
        "9",
        "A(Z) vs 1 - e^{-0.3}",
        sim.z[2].mean,
        sim.z[2].stderr,
        1.0 - e,
    );
    s.z("9", "L(Z) vs e^{-0.3} 1.2", sim.z[1].mean, sim.z[1].stderr, e * l);
    s.z(
        "9",
        "N0(Z) vs e^{-0.3} (1.2 - 1.44/(4π))",
        sim.z[0].mean,
        sim.z[0].stderr,
        e * (n0 - l * l / (4.0 * PI)),
    );
    general_formula("9", "N0", &q, gamma, &sim, 0);
    s.runtime("9", t.elapsed(), Duration::from_secs(300));
}

/// Spatial Boolean model of isotropic unit cubes.
fn c10(s: &mut Suite) {
    let t = Instant::now();
    let gamma = 0.2;
    let (q, sim) = simulate_cubes(3, gamma, 12.0, 100);
    let (v, sx, l1, n0) = (gamma, 6.0 * gamma, 12.0 * gamma, 8.0 * gamma);
    let e = (-v).exp();
    let targets = [
        (
            "N0(Z) vs e^{-V}(N0 - L1 S/(4π) + π S^3/384)",
            e * (n0 - l1 * sx / (4.0 * PI) + PI / 384.0 * sx.powi(3)),
        ),
        (
            "L1(Z) vs e^{-V}(L1 - π^2 S^2/32)",
            e * (l1 - PI * PI / 32.0 * sx * sx),
        ),
        ("S(Z) vs e^{-V} S", e * sx),
        ("V(Z) vs 1 - e^{-V}", 1.0 - e),
    ];
    for j in (0..=3).rev() {
        s.z("10", targets[j].0, sim.z[j].mean, sim.z[j].stderr, targets[j].1);
    }
    general_formula("10", "L1", &q, gamma, &sim, 1);
    general_formula("10", "N0", &q, gamma, &sim, 0);
    // The vertex estimates count saddle vertices negatively; compare with the
    // explicit feature classification on one realization.
    let f = Family::skeleton(3).unwrap();
    let grains = sample_poisson(&q, &Intensity::Constant(gamma), &AaBox::centered_cube(3, 4.0), 10).unwrap();
    let parts: Vec<Polytope> = grains.iter().flat_map(|g| g.body.parts().to_vec()).collect();
    let (u, cert) = GpUnion::new(parts).unwrap();
    if cert.passed {
        let r = classify_boundary_features(&u).unwrap();
        let ie = gp_phi_degree(&f, 0, &u).unwrap();
        s.check(
            "10",
            "signed vertex count of a realization",
            (r.signed_vertices() - ie).abs() < EPS,
            format!(
                "{} convex + {} concave - {} saddle = {}, inclusion-exclusion {ie} ({} grains)",
                r.convex_vertices,
                r.concave_vertices,
                r.saddle_vertices,
                r.signed_vertices(),
                grains.len()
            ),
        );
    } else {
        s.check(
            "10",
            "signed vertex count of a realization",
            false,
            "realization not in general position",
        );
    }
    s.runtime("10", t.elapsed(), Duration::from_secs(900));
}

/// L-shaped two-part grains.
fn c11(s: &mut Suite) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/l_shape.toml");
    let cfg = SimulationConfig::load(&path).unwrap();
    let q = cfg.grains(path.parent().unwrap()).unwrap();
    let f = Family::skeleton(2).unwrap();
    let u = match &q.shapes[0].0 {
        Shape::Union(u) => u.clone(),
        Shape::Convex(_) => panic!("expected a union grain"),
    };
    let gamma = cfg.gamma;
    let ax = gamma * gp_phi_degree(&f, 2, &u).unwrap();
    let lx = gamma * gp_phi_degree(&f, 1, &u).unwrap();
    let sim = simulate(
        &f,
        &q,
        gamma,
        &AaBox::centered_cube(2, cfg.window_size),
        cfg.replications,
        cfg.seed.unwrap(),
    )
    .unwrap();
    let e = (-ax).exp();
    s.z(
        "11",
        "A(Z) vs 1 - e^{-A(X)}",
        sim.z[2].mean,
        sim.z[2].stderr,
        1.0 - e,
    );
    s.z(
        "11",
        "L(Z) vs e^{-A(X)} L(X)",
        sim.z[1].mean,
        sim.z[1].stderr,
        e * lx,
    );
}

fn main() {
    let t = Instant::now();
    let mut s = Suite::default();
    let criteria: [Criterion; 11] = [
        ("1", c01),
        ("2", c02),
        ("3", c03),
        ("4", c04),
        ("5", c05),
        ("6", c06),
        ("7", c07),
        ("8", c08),
        ("9", c09),
        ("10", c10),
        ("11", c11),
    ];
    for (id, f) in criteria {
        s.run(id, f);
    }
    let failed: Vec<&Check> = s.checks.iter().filter(|c| !c.pass).collect();
    println!(
        "\nacceptance: {} checks, {} passed, {} failed ({:.1} s)",
        s.checks.len(),
        s.checks.len() - failed.len(),
        failed.len(),
        t.elapsed().as_secs_f64()
    );
    for c in &failed {
        println!("  failed [{}] {}", c.id, c.name);
    }
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
