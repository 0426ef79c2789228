//! Acceptance suite: runs every shipped verification criterion at its
//! stated tolerance and prints one pass/fail line per criterion
//! (`cargo test --test acceptance -- --nocapture` to see them).

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hypdyn_core::backward::{
    backward_orbit_via_inverse, backward_orbit_via_solver, classify_backward_limit,
    equivalence_battery, step_profile, step_profile_of_points, synthesize_backward_orbit,
    BackwardLimitClass, BackwardOrbit, BatteryParams, Construction, SynthesizerConfig, EPS_B,
};
use hypdyn_core::dilation::{brfp_record, dilation_along_ray, dilation_iterates, DilationTable};
use hypdyn_core::forward::{classify, divergence_rate, EllipticStrength, MapClass};
use hypdyn_core::horo::{verify_julia, JuliaMode};
use hypdyn_core::metric::estimate_delta;
use hypdyn_core::{BoundaryLabel, MapHandle, MapKind, ModelSpace, Point};

struct Checker {
    id: usize,
    name: &'static str,
    checks: usize,
    failures: Vec<String>,
}

impl Checker {
    fn new(id: usize, name: &'static str) -> Checker {
        Checker {
            id,
            name,
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn close(&mut self, what: &str, expected: f64, computed: f64, tol: f64) {
        self.checks += 1;
        let ok = (expected - computed).abs() <= tol;
        if !ok {
            self.failures.push(format!(
                "{what}: expected {expected}, computed {computed}, |Δ| = {:.3e} > tol {tol:.1e}",
                (expected - computed).abs()
            ));
        }
    }

    fn le(&mut self, what: &str, value: f64, bound: f64) {
        self.checks += 1;
        let ok = value <= bound;
        if !ok {
            self.failures
                .push(format!("{what}: {value} exceeds bound {bound}"));
        }
    }

    fn holds(&mut self, what: &str, cond: bool) {
        self.checks += 1;
        if !cond {
            self.failures.push(format!("{what}: condition failed"));
        }
    }

    fn finish(self) {
        let verdict = if self.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!(
            "[acceptance] criterion {:>2} ({}): {verdict} ({} checks)",
            self.id, self.name, self.checks
        );
        for f in &self.failures {
            println!("    - {f}");
        }
        assert!(
            self.failures.is_empty(),
            "criterion {} failed:\n{}",
            self.id,
            self.failures.join("\n")
        );
    }
}

fn disc() -> ModelSpace {
    ModelSpace::PoincareDisc
}

fn disc_auto() -> (MapHandle, Point) {
    let map = MapHandle::new(disc(), MapKind::DiscAutomorphism { a: 0.5 }).unwrap();
    let p = disc().point(0.0, 0.0).unwrap();
    (map, p)
}

fn l1_map(theta: f64) -> (MapHandle, Point) {
    (
        MapHandle::new(
            ModelSpace::L1Cylinder,
            MapKind::CylinderIsometry { step: 1.0, theta },
        )
        .unwrap(),
        Point::new(0.0, 0.5),
    )
}

fn pc_map() -> (MapHandle, Point) {
    (
        MapHandle::new(ModelSpace::UpperHalfPlane, MapKind::SqrtShift).unwrap(),
        Point::new(0.0, 1.0),
    )
}

fn clamp_map() -> (MapHandle, Point) {
    (
        MapHandle::new(ModelSpace::UpperHalfPlane, MapKind::HalfPlaneClamp).unwrap(),
        Point::new(0.0, 1.0),
    )
}

fn slit_map() -> (MapHandle, Point) {
    (
        MapHandle::new(ModelSpace::SlitPlane, MapKind::Translate { c: 1.0 }).unwrap(),
        Point::new(1.0, 0.0),
    )
}

fn pc_orbit() -> &'static BackwardOrbit {
    static ORBIT: OnceLock<BackwardOrbit> = OnceLock::new();
    ORBIT.get_or_init(|| {
        let (map, _) = pc_map();
        let x0 = Complex64::new(0.0, 1.0).sqrt();
        backward_orbit_via_solver(&map, Point::new(x0.re, x0.im), 1010, 6).unwrap()
    })
}

fn disc_orbit() -> &'static BackwardOrbit {
    static ORBIT: OnceLock<BackwardOrbit> = OnceLock::new();
    ORBIT.get_or_init(|| {
        let (map, p) = disc_auto();
        backward_orbit_via_inverse(&map, p, 240).unwrap()
    })
}

fn clamp_orbit() -> &'static BackwardOrbit {
    static ORBIT: OnceLock<BackwardOrbit> = OnceLock::new();
    ORBIT.get_or_init(|| {
        let (map, _) = clamp_map();
        let points: Vec<Point> = (0..=1010)
            .map(|n| Point::new(n as f64 + 1.0, 1.0))
            .collect();
        BackwardOrbit::from_points(&map, points, Construction::Inverse, None, Vec::new()).unwrap()
    })
}

fn slit_orbit() -> &'static BackwardOrbit {
    static ORBIT: OnceLock<BackwardOrbit> = OnceLock::new();
    ORBIT.get_or_init(|| {
        let (map, _) = slit_map();
        backward_orbit_via_inverse(&map, Point::new(0.0, 1.0), 1000).unwrap()
    })
}

#[test]
fn criterion_01_l1_cylinder_dilations() {
    let mut c = Checker::new(1, "ℓ¹ cylinder one-step and stable dilations");
    for theta in [0.0, 1.0, PI / 2.0, 3.0] {
        let (map, p) = l1_map(theta);
        let minus = map
            .space
            .ray_toward(p, BoundaryLabel::MinusInfinity)
            .unwrap();
        let one = dilation_along_ray(&map, &minus, 1, 40.0, 1e-6).unwrap();
        c.close(
            &format!("one-step dilation at -∞, θ = {theta}"),
            1.0 - theta,
            one.value,
            1e-6,
        );
        let rec = brfp_record(&map, &minus, 64, 40.0, None).unwrap();
        c.close(
            &format!("stable dilation at -∞, θ = {theta}, n_max = 64"),
            1.0,
            rec.stable().unwrap(),
            1e-3,
        );
        let plus = map
            .space
            .ray_toward(p, BoundaryLabel::PlusInfinity)
            .unwrap();
        let rec = brfp_record(&map, &plus, 64, 40.0, None).unwrap();
        c.close(
            &format!("stable dilation at +∞, θ = {theta}, n_max = 64"),
            -1.0,
            rec.stable().unwrap(),
            1e-3,
        );
    }
    c.finish();
}

#[test]
fn criterion_02_flat_cylinder_displacement_vs_dilation() {
    let mut c = Checker::new(2, "flat cylinder: √(1+π²) displacement, dilation -1");
    let map = MapHandle::new(
        ModelSpace::FlatCylinder,
        MapKind::CylinderIsometry {
            step: 1.0,
            theta: PI,
        },
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let window = map.space.default_window();
    let hyp = (1.0 + PI * PI).sqrt();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let q = map.space.sample_point(&mut rng, &window);
        let d = map.space.distance(q, map.apply(q).unwrap()).unwrap();
        worst = worst.max((d - hyp).abs());
    }
    c.le("per-point displacement deviation from √(1+π²)", worst, 1e-9);
    let p = Point::new(0.0, 1.0);
    let plus = map
        .space
        .ray_toward(p, BoundaryLabel::PlusInfinity)
        .unwrap();
    let dil = dilation_along_ray(&map, &plus, 1, 2e7, 1e-6).unwrap();
    c.close("dilation at +∞", -1.0, dil.value, 1e-6);
    c.holds(
        "displacement strictly exceeds |log λ|",
        hyp > dil.value.abs() + 1.0,
    );
    c.finish();
}

#[test]
fn criterion_03_disc_automorphism_dilations_rate_power_rule() {
    let mut c = Checker::new(3, "disc automorphism a = 1/2");
    let (map, p) = disc_auto();
    let log3 = 3.0f64.ln();
    let dw = disc()
        .ray_toward(p, BoundaryLabel::Circle { angle: 0.0 })
        .unwrap();
    let rep = disc()
        .ray_toward(p, BoundaryLabel::Circle { angle: PI })
        .unwrap();
    let rec_dw = brfp_record(&map, &dw, 16, 40.0, None).unwrap();
    let rec_rep = brfp_record(&map, &rep, 16, 40.0, None).unwrap();
    c.close("dilation at 1", -log3, rec_dw.log_dilation, 1e-4);
    c.close("dilation at -1", log3, rec_rep.log_dilation, 1e-4);
    let rate = divergence_rate(&map, p, 400).unwrap();
    c.close("c(f)", log3, rate, 1e-4);
    c.close(
        "log Λ at -1 equals c(f)",
        rate,
        rec_rep.stable().unwrap(),
        1e-4,
    );
    c.close(
        "log Λ at 1 equals -log Λ at -1",
        -rec_rep.stable().unwrap(),
        rec_dw.stable().unwrap(),
        1e-4,
    );
    c.le(
        "power rule |entries[n] - n·entries[1]| for n ≤ 16",
        rec_rep.dilation_table.as_ref().unwrap().power_rule_defect(),
        1e-4,
    );
    c.le(
        "power rule at the attracting end",
        rec_dw.dilation_table.as_ref().unwrap().power_rule_defect(),
        1e-4,
    );
    c.finish();
}

fn shipped_tables() -> &'static Vec<(String, DilationTable)> {
    static TABLES: OnceLock<Vec<(String, DilationTable)>> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut tables = Vec::new();
        let mut push = |name: String, map: &MapHandle, p: Point, label: BoundaryLabel, n: usize, t: f64| {
            let anchor = map.space.ray_toward(p, label).unwrap();
            let table = dilation_iterates(map, &anchor, n, t, 1e-6, None).unwrap();
            tables.push((name, table));
        };
        let (auto, p) = disc_auto();
        push("disc-auto @ 1".into(), &auto, p, BoundaryLabel::Circle { angle: 0.0 }, 16, 40.0);
        push("disc-auto @ -1".into(), &auto, p, BoundaryLabel::Circle { angle: PI }, 16, 40.0);
        for theta in [0.0, 1.0, PI / 2.0, 3.0] {
            let (map, p) = l1_map(theta);
            push(format!("l1(θ={theta}) @ -∞"), &map, p, BoundaryLabel::MinusInfinity, 64, 40.0);
            push(format!("l1(θ={theta}) @ +∞"), &map, p, BoundaryLabel::PlusInfinity, 64, 40.0);
        }
        let flat = MapHandle::new(
            ModelSpace::FlatCylinder,
            MapKind::CylinderIsometry { step: 1.0, theta: PI },
        )
        .unwrap();
        let pf = Point::new(0.0, 1.0);
        push("flat @ +∞".into(), &flat, pf, BoundaryLabel::PlusInfinity, 12, 2e7);
        push("flat @ -∞".into(), &flat, pf, BoundaryLabel::MinusInfinity, 12, 2e7);
        let ident = MapHandle::new(disc(), MapKind::Identity).unwrap();
        push("identity @ 1".into(), &ident, p, BoundaryLabel::Circle { angle: 0.0 }, 8, 40.0);
        let (clamp, pc) = clamp_map();
        push("clamp @ ∞".into(), &clamp, pc, BoundaryLabel::PlusInfinity, 8, 40.0);
        push("clamp @ 0".into(), &clamp, pc, BoundaryLabel::Real { x: 0.0 }, 8, 40.0);
        let (pcm, pp) = pc_map();
        push("sqrt-shift @ ∞".into(), &pcm, pp, BoundaryLabel::PlusInfinity, 8, 40.0);
        let (slit, ps) = slit_map();
        push("slit-shift @ ∞".into(), &slit, ps, BoundaryLabel::PlusInfinity, 8, 40.0);
        let logline = MapHandle::new(ModelSpace::LogLine, MapKind::Translate { c: 1.0 }).unwrap();
        push("log-line shift @ +∞".into(), &logline, Point::real(1.0), BoundaryLabel::PlusInfinity, 8, 40.0);
        let line = MapHandle::new(ModelSpace::RealLine, MapKind::Translate { c: 1.0 }).unwrap();
        push("line shift @ +∞".into(), &line, Point::real(0.0), BoundaryLabel::PlusInfinity, 8, 40.0);
        push("line shift @ -∞".into(), &line, Point::real(0.0), BoundaryLabel::MinusInfinity, 8, 40.0);
        let punct = MapHandle::new(
            ModelSpace::HyperbolicPuncturedCylinder { deck_truncation: 8 },
            MapKind::PuncturedDoubling { theta: 1.0 },
        )
        .unwrap();
        push("punctured doubling @ cusp".into(), &punct, Point::new(0.3, 1.0), BoundaryLabel::PlusInfinity, 8, 40.0);
        tables
    })
}

#[test]
fn criterion_04_superadditivity_across_shipped_tables() {
    let mut c = Checker::new(4, "iterate-dilation superadditivity");
    for (name, table) in shipped_tables() {
        c.le(
            &format!("superadditivity defect of {name}"),
            table.max_super_defect,
            1e-6,
        );
    }
    c.finish();
}

#[test]
fn criterion_05_julia_verification() {
    let mut c = Checker::new(5, "Julia inequality, exact and delta budgets");
    let (auto, p) = disc_auto();
    let anchor = disc()
        .ray_toward(p, BoundaryLabel::Circle { angle: 0.0 })
        .unwrap();
    let exact = verify_julia(
        &disc(),
        &auto,
        &anchor,
        -(3.0f64.ln()),
        p,
        &disc().default_window(),
        1000,
        JuliaMode::Exact,
        None,
        3,
    )
    .unwrap();
    c.le(
        "disc automorphism at its Denjoy–Wolff point: max violation",
        exact.max_violation,
        1e-6,
    );
    let delta = estimate_delta(&disc(), &disc().default_window(), 20000, 3).unwrap();
    let del = verify_julia(
        &disc(),
        &auto,
        &anchor,
        -(3.0f64.ln()),
        p,
        &disc().default_window(),
        1000,
        JuliaMode::Delta,
        Some(&delta),
        3,
    )
    .unwrap();
    c.holds(
        "disc: delta-mode budget never tighter than exact",
        del.error_budget >= exact.error_budget && del.pass,
    );

    let (l1, pv) = l1_map(PI / 2.0);
    let anchor = l1
        .space
        .ray_toward(pv, BoundaryLabel::MinusInfinity)
        .unwrap();
    let exact_l1 = verify_julia(
        &l1.space.clone(),
        &l1,
        &anchor,
        1.0 - PI / 2.0,
        pv,
        &l1.space.default_window(),
        1000,
        JuliaMode::Exact,
        None,
        4,
    )
    .unwrap();
    c.le(
        "ℓ¹ cylinder isometry at -∞: max violation",
        exact_l1.max_violation,
        1e-6,
    );
    let delta_l1 = estimate_delta(&l1.space, &l1.space.default_window(), 20000, 4).unwrap();
    let del_l1 = verify_julia(
        &l1.space.clone(),
        &l1,
        &anchor,
        1.0 - PI / 2.0,
        pv,
        &l1.space.default_window(),
        1000,
        JuliaMode::Delta,
        Some(&delta_l1),
        4,
    )
    .unwrap();
    c.holds(
        "ℓ¹ cylinder: delta-mode budget never tighter than exact",
        del_l1.error_budget >= exact_l1.error_budget && del_l1.pass,
    );
    c.finish();
}

#[test]
fn criterion_06_parabolic_backward_orbit() {
    let mut c = Checker::new(6, "square-root map backward orbit √(n+i)");
    let (map, p) = pc_map();
    let orbit = pc_orbit();
    let mut worst = 0.0f64;
    for (n, &pt) in orbit.points().iter().enumerate().take(401) {
        let z = Complex64::new(n as f64, 1.0).sqrt();
        worst = worst.max(map.space.distance(pt, Point::new(z.re, z.im)).unwrap());
    }
    c.le("solver deviation from √(n+i), n ≤ 400", worst, 1e-8);
    let profile = step_profile(&map, orbit, 250).unwrap();
    c.le("backward step rate b", profile.b_estimate, 0.05);
    let heights: Vec<f64> = orbit.points().iter().map(|q| q.c1).collect();
    c.holds(
        "Im z_n decreasing",
        heights.windows(2).skip(1).all(|w| w[1] < w[0]),
    );
    c.holds(
        "Im z_n drops below 0.02 (exits every horoball at ∞)",
        heights[1000] < 0.02 && heights[1000] < heights[100],
    );
    let class = classify(&map, &[p], 500, &map.space.default_window()).unwrap();
    let limit = classify_backward_limit(&map, orbit, &profile, &class, None).unwrap();
    c.holds(
        "classified as the parabolic Denjoy–Wolff point ∞",
        limit.class
            == BackwardLimitClass::ParabolicDw {
                label: BoundaryLabel::PlusInfinity,
            },
    );
    c.finish();
}

#[test]
fn criterion_07_equivalence_battery() {
    let mut c = Checker::new(7, "seven-condition battery");
    let (auto, p) = disc_auto();
    let report = equivalence_battery(&auto, disc_orbit(), &BatteryParams::new(p)).unwrap();
    c.holds("disc orbit: unanimous TRUE", report.unanimous == Some(true));
    c.close(
        "disc orbit: b = log 3",
        3.0f64.ln(),
        report.b_estimate,
        1e-3,
    );
    c.holds(
        "disc orbit: certified discrete quasi-geodesic",
        report.quasi_geodesic.as_ref().map(|q| q.valid()) == Some(true),
    );

    let (pcm, pp) = pc_map();
    let mut params = BatteryParams::new(pp);
    params.m_max = 250;
    let report = equivalence_battery(&pcm, pc_orbit(), &params).unwrap();
    c.holds(
        "√(n+i) orbit: unanimous FALSE",
        report.unanimous == Some(false),
    );

    let (clamp, cp) = clamp_map();
    let mut params = BatteryParams::new(cp);
    params.m_max = 250;
    let report = equivalence_battery(&clamp, clamp_orbit(), &params).unwrap();
    c.holds(
        "clamp orbit n+i: unanimous FALSE",
        report.unanimous == Some(false),
    );
    c.finish();
}

#[test]
fn criterion_08_backward_divergence_rate() {
    let mut c = Checker::new(8, "backward divergence rate equals b at n = 200");
    let (auto, _) = disc_auto();
    let orbit = disc_orbit();
    let profile = step_profile(&auto, orbit, 40).unwrap();
    c.close(
        "log-3 orbit: |d(x_0, x_200)/200 - b|",
        profile.b_estimate,
        orbit.trace.displacement[200] / 200.0,
        1e-2,
    );
    let (pcm, _) = pc_map();
    let orbit = pc_orbit();
    let profile = step_profile(&pcm, orbit, 250).unwrap();
    c.close(
        "parabolic orbit: |d(x_0, x_200)/200 - b|",
        profile.b_estimate,
        orbit.trace.displacement[200] / 200.0,
        1e-2,
    );
    c.finish();
}

#[test]
fn criterion_09_synthesizer() {
    let mut c = Checker::new(9, "horosphere-stopping synthesizer");
    let (auto, p) = disc_auto();
    let rep = disc()
        .ray_toward(p, BoundaryLabel::Circle { angle: PI })
        .unwrap();
    let record = brfp_record(&auto, &rep, 16, 40.0, None).unwrap();
    let out = synthesize_backward_orbit(&auto, p, &record, &SynthesizerConfig::default()).unwrap();
    c.le(
        "disc: synthesized orbit within 0.5 of the exact inverse orbit, n ≤ 50",
        out.state.hausdorff_to_exact_inverse.unwrap(),
        0.5,
    );
    c.close(
        "disc: synthesized b = log 3",
        3.0f64.ln(),
        out.state.b_estimate,
        1e-2,
    );
    c.holds(
        "disc: same-index sup distance finite",
        out.state
            .sup_distance_to_exact_inverse
            .map(|s| s.is_finite())
            == Some(true),
    );

    let (l1, pv) = l1_map(PI / 2.0);
    let minus = l1
        .space
        .ray_toward(pv, BoundaryLabel::MinusInfinity)
        .unwrap();
    let record = brfp_record(&l1, &minus, 16, 40.0, None).unwrap();
    let out = synthesize_backward_orbit(&l1, pv, &record, &SynthesizerConfig::default()).unwrap();
    c.close("ℓ¹ cylinder: synthesized b = 1", 1.0, out.state.b_estimate, 1e-2);
    c.holds(
        "ℓ¹ cylinder: σ₁ ≥ 1 + π/2 - 1e-3 (rate attained, step not)",
        out.state.sigma_1 >= 1.0 + PI / 2.0 - 1e-3,
    );
    c.finish();
}

#[test]
fn criterion_10_negative_results() {
    let mut c = Checker::new(10, "negative results honored");
    let logline = MapHandle::new(ModelSpace::LogLine, MapKind::Translate { c: 1.0 }).unwrap();
    let orbit = backward_orbit_via_inverse(&logline, Point::real(10.0), 50).unwrap();
    c.holds(
        "log-line backward run terminates at n = 9 (no orbit toward +∞)",
        orbit.trace.stopped_early.as_ref().map(|s| s.last_valid) == Some(9),
    );

    let (slit, _) = slit_map();
    let x = slit_orbit();
    let y = backward_orbit_via_inverse(&slit, Point::new(0.0, -1.0), 100).unwrap();
    let d50 = slit
        .space
        .distance(x.points()[50], y.points()[50])
        .unwrap();
    let d100 = slit
        .space
        .distance(x.points()[100], y.points()[100])
        .unwrap();
    c.holds(
        "slit-plane companion separation passes 10 by n = 100 and grows",
        d100 > 10.0 && d100 > d50,
    );

    let punct = MapHandle::new(
        ModelSpace::HyperbolicPuncturedCylinder { deck_truncation: 8 },
        MapKind::PuncturedDoubling { theta: 1.0 },
    )
    .unwrap();
    let probe =
        hypdyn_core::backward::unbounded_step_probe(&punct, Point::new(0.3, 1.0), 40, 2000, 16)
            .unwrap();
    c.holds("punctured cylinder: step exceeds 20 by n = 20", probe.step_at.1 > 20.0);
    c.holds(
        "punctured cylinder: all 16 angular cells occupied by n = 2000",
        probe.cells_hit == 16,
    );
    c.finish();
}

#[test]
fn criterion_11_dichotomy_sanity() {
    let mut c = Checker::new(11, "small backward rates only on parabolic/weakly-elliptic maps");
    // (name, map, forward classification, orbit b)
    let mut cases: Vec<(&str, MapClass, f64)> = Vec::new();

    let (pcm, pp) = pc_map();
    let profile = step_profile(&pcm, pc_orbit(), 250).unwrap();
    let class = classify(&pcm, &[pp], 500, &pcm.space.default_window()).unwrap();
    cases.push(("sqrt-shift √(n+i)", class.class, profile.b_estimate));

    let (clamp, _) = clamp_map();
    let profile = step_profile(&clamp, clamp_orbit(), 250).unwrap();
    let window = hypdyn_core::SampleWindow::new([-20.0, 0.5], [20.0, 10f64.exp()]);
    let mut seeds = Vec::new();
    for k in 0..6 {
        seeds.push(Point::new(5.0 + k as f64, (2.0 * k as f64).exp()));
    }
    let class = classify(&clamp, &seeds, 200, &window).unwrap();
    cases.push(("clamp n+i", class.class, profile.b_estimate));

    let (slit, sp) = slit_map();
    let profile = step_profile(&slit, slit_orbit(), 250).unwrap();
    let class = classify(&slit, &[sp], 500, &slit.space.default_window()).unwrap();
    cases.push(("slit-plane -n+i", class.class, profile.b_estimate));

    let (auto, ap) = disc_auto();
    let profile = step_profile(&auto, disc_orbit(), 40).unwrap();
    let class = classify(&auto, &[ap], 400, &auto.space.default_window()).unwrap();
    cases.push(("disc log-3 orbit", class.class, profile.b_estimate));

    for (name, class, b) in cases {
        if b <= EPS_B {
            c.holds(
                &format!("{name}: b = {b:.4} ≤ {EPS_B} on a parabolic or weakly elliptic map ({class})"),
                matches!(
                    class,
                    MapClass::Parabolic
                        | MapClass::Elliptic {
                            strength: EllipticStrength::Weak
                        }
                ),
            );
        } else {
            c.holds(
                &format!("{name}: b = {b:.4} > {EPS_B} permitted on {class}"),
                !matches!(
                    class,
                    MapClass::Elliptic {
                        strength: EllipticStrength::Strong
                    }
                ),
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_12_property_suites() {
    let mut c = Checker::new(12, "cross-cutting property suites");

    // metric axioms, 1e4 samples per space at 1e-9
    for space in [
        ModelSpace::RealLine,
        ModelSpace::LogLine,
        ModelSpace::PoincareDisc,
        ModelSpace::UpperHalfPlane,
        ModelSpace::SlitPlane,
        ModelSpace::L1Cylinder,
        ModelSpace::FlatCylinder,
        ModelSpace::HyperbolicPuncturedCylinder { deck_truncation: 8 },
    ] {
        let window = space.default_window();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let p = space.sample_point(&mut rng, &window);
            let q = space.sample_point(&mut rng, &window);
            let r = space.sample_point(&mut rng, &window);
            let dpq = space.distance(p, q).unwrap();
            worst = worst.max(dpq - space.distance(p, r).unwrap() - space.distance(r, q).unwrap());
            worst = worst.max((dpq - space.distance(q, p).unwrap()).abs());
            worst = worst.max(-dpq);
        }
        c.le(&format!("metric axioms on {}", space.name()), worst, 1e-9);

        // unit-speed rays
        let p = space.sample_point(&mut rng, &window);
        let mut ray_worst = 0.0f64;
        for label in space.canonical_labels() {
            let anchor = space.ray_toward(p, label).unwrap();
            for i in 0..30 {
                let s = i as f64;
                let t = s + 1.0;
                let d = space
                    .distance(anchor.point_at(s), anchor.point_at(t))
                    .unwrap();
                ray_worst = ray_worst.max((d - 1.0).abs());
            }
        }
        c.le(&format!("ray unit speed on {}", space.name()), ray_worst, 1e-9);
    }

    // monotone dilation traces across the shipped tables
    for (name, table) in shipped_tables() {
        let mut monotone = true;
        for e in &table.entries {
            // entries were accepted by the ray evaluator, which rejects any
            // decreasing trace; the recorded tail gap must also be certified
            monotone &= e.tail_gap <= 1e-6;
        }
        c.holds(&format!("certified monotone/tail for {name}"), monotone);
    }

    // σ subadditivity on every shipped backward orbit
    let (auto, _) = disc_auto();
    let (pcm, _) = pc_map();
    let (clamp, _) = clamp_map();
    let (slit, _) = slit_map();
    let profiles = vec![
        ("disc log-3", step_profile(&auto, disc_orbit(), 40).unwrap()),
        ("sqrt-shift", step_profile(&pcm, pc_orbit(), 250).unwrap()),
        ("clamp", step_profile(&clamp, clamp_orbit(), 250).unwrap()),
        ("slit", step_profile(&slit, slit_orbit(), 250).unwrap()),
    ];
    for (name, profile) in &profiles {
        c.le(
            &format!("σ subadditivity defect for {name}"),
            profile.max_subadditivity_defect,
            1e-6,
        );
    }

    // b ≥ c(f) − 1e-3 on escaping bounded-step orbits
    let rates = vec![
        ("disc log-3", divergence_rate(&auto, disc().point(0.0, 0.0).unwrap(), 400).unwrap(), profiles[0].1.b_estimate),
        ("sqrt-shift", divergence_rate(&pcm, Point::new(0.0, 1.0), 500).unwrap(), profiles[1].1.b_estimate),
        ("clamp", 0.0, profiles[2].1.b_estimate),
        ("slit", divergence_rate(&slit, Point::new(1.0, 0.0), 500).unwrap(), profiles[3].1.b_estimate),
    ];
    for (name, cf, b) in &rates {
        c.holds(
            &format!("{name}: b = {b:.4} ≥ c(f) = {cf:.4} - 1e-3"),
            *b >= *cf - 1e-3,
        );
    }

    // 0 ≤ stable(limit anchor) ≤ b + 1e-3 on the same orbits
    let limit_stables = vec![
        ("disc log-3", &auto, disc().point(0.0, 0.0).unwrap(), BoundaryLabel::Circle { angle: PI }, profiles[0].1.b_estimate),
        ("sqrt-shift", &pcm, Point::new(0.0, 1.0), BoundaryLabel::PlusInfinity, profiles[1].1.b_estimate),
        ("clamp", &clamp, Point::new(0.0, 1.0), BoundaryLabel::PlusInfinity, profiles[2].1.b_estimate),
        ("slit", &slit, Point::new(1.0, 0.0), BoundaryLabel::PlusInfinity, profiles[3].1.b_estimate),
    ];
    for (name, map, p, label, b) in limit_stables {
        let anchor = map.space.ray_toward(p, label).unwrap();
        let rec = brfp_record(map, &anchor, 8, 40.0, None).unwrap();
        let stable = rec.stable().unwrap();
        c.holds(
            &format!("{name}: 0 ≤ log Λ(limit) = {stable:.4} ≤ b + 1e-3 = {:.4}", b + 1e-3),
            stable >= -1e-3 && stable <= b + 1e-3,
        );
    }

    // the synthesized ℓ¹ orbit obeys both global inequalities as well
    let (l1, pv) = l1_map(PI / 2.0);
    let minus = l1.space.ray_toward(pv, BoundaryLabel::MinusInfinity).unwrap();
    let rec = brfp_record(&l1, &minus, 16, 40.0, None).unwrap();
    let out = synthesize_backward_orbit(&l1, pv, &rec, &SynthesizerConfig::default()).unwrap();
    let c_l1 = divergence_rate(&l1, pv, 500).unwrap();
    c.holds(
        "ℓ¹ synthesized orbit: b ≥ c(f) - 1e-3 and log Λ ≤ b + 1e-3",
        out.state.b_estimate >= c_l1 - 1e-3
            && rec.stable().unwrap() <= out.state.b_estimate + 1e-3
            && rec.stable().unwrap() >= -1e-3,
    );
    c.finish();
}

#[test]
fn backward_profile_of_synthesized_orbits_certified() {
    // residuals of synthesized and solver orbits stay within the accepted
    // tolerance (the invariant behind every backward consumer)
    let (auto, p) = disc_auto();
    let rep = disc()
        .ray_toward(p, BoundaryLabel::Circle { angle: PI })
        .unwrap();
    let record = brfp_record(&auto, &rep, 16, 40.0, None).unwrap();
    let out = synthesize_backward_orbit(&auto, p, &record, &SynthesizerConfig::default()).unwrap();
    assert!(out.orbit.max_residual() <= 1e-8);
    assert!(pc_orbit().max_residual() <= 1e-8);
    assert!(disc_orbit().max_residual() <= 1e-8);
    let profile = step_profile_of_points(&auto, disc_orbit().points(), 40).unwrap();
    assert!(profile.monotone_ok);
}
