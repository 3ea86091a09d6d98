//! Acceptance criteria, one printed line each.

use std::process::Command;
use std::time::{Duration, Instant};

use conformal_core::atlas::{lambda_of_sq, point_of_lambda, Region};
use conformal_core::models::{HiggsParams, SigmaParams};
use conformal_core::verify::{run_suite, CheckResult, Suite, SuiteReport};
use conformal_core::{apply, Branch, ConformalElement, FourMomentum, ScaleM};

const SEED: u64 = 20260;

struct Outcome {
    id: u32,
    title: &'static str,
    parts: Vec<(String, bool)>,
}

impl Outcome {
    fn new(id: u32, title: &'static str) -> Self {
        Outcome { id, title, parts: Vec::new() }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.parts.push((label.into(), ok));
    }

    fn suite_checks(&mut self, report: &SuiteReport, names: &[&str]) {
        for n in names {
            match report.details.iter().find(|c| c.name == *n) {
                Some(c) => self.check(describe(c), c.passed),
                None => self.check(format!("{n} missing"), false),
            }
        }
    }

    fn passed(&self) -> bool {
        !self.parts.is_empty() && self.parts.iter().all(|(_, ok)| *ok)
    }

    fn line(&self) -> String {
        let failed: Vec<&str> = self.parts.iter().filter(|(_, ok)| !ok).map(|(l, _)| l.as_str()).collect();
        let summary = if failed.is_empty() {
            self.parts.iter().map(|(l, _)| l.as_str()).collect::<Vec<_>>().join("; ")
        } else {
            format!("failed: {}", failed.join("; "))
        };
        format!(
            "criterion {:>2} [{}] {}: {}",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            summary
        )
    }
}

fn describe(c: &CheckResult) -> String {
    format!("{} {}/{} max {:.2e} tol {:.0e}", c.name, c.samples - c.failures, c.samples, c.max_residual, c.tolerance)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn m1() -> ScaleM {
    ScaleM::new(1.0).unwrap()
}

fn equivariance() -> Outcome {
    let mut o = Outcome::new(1, "cone equivariance per element kind");
    let t = Instant::now();
    let r = run_suite(Suite::Cone, SEED);
    let dt = t.elapsed();
    o.suite_checks(
        &r,
        &[
            "equivariance_translation",
            "equivariance_lorentz",
            "equivariance_dilatation",
            "equivariance_inversion",
            "equivariance_special_conformal",
        ],
    );
    o.check(format!("runtime {:.3}s", dt.as_secs_f64()), dt < Duration::from_secs(1));
    o
}

fn special_conformal(group: &SuiteReport) -> Outcome {
    let mut o = Outcome::new(2, "special conformal closed form against I T I");
    o.suite_checks(group, &["special_conformal_closed_form"]);
    // q = (1,0,0,0), b = (0.5,0,0,0), M = 1: q' = (1 - 0.5) / (1 - 1 + 0.25) = 2.
    let e = ConformalElement::SpecialConformal { b: FourMomentum([0.5, 0.0, 0.0, 0.0]) };
    let q = apply(&e, &FourMomentum([1.0, 0.0, 0.0, 0.0]), m1()).unwrap();
    o.check(format!("hand value q0' = {}", q[0]), (q[0] - 2.0).abs() < 1e-12);
    o
}

fn conjugation(group: &SuiteReport) -> Outcome {
    let mut o = Outcome::new(3, "inversion conjugation");
    o.suite_checks(group, &["inversion_conjugation"]);
    o
}

fn atlas(r: &SuiteReport) -> Outcome {
    let mut o = Outcome::new(4, "atlas regions, inversion duality, lambda rows");
    o.suite_checks(r, &["region_table", "inversion_product_and_swap", "lambda_rows"]);
    let row = point_of_lambda(std::f64::consts::LN_2, Region::I, m1()).unwrap();
    o.check(
        format!("region I lambda ln2 gives q^2 {} q5^2 {}", row.q_sq, row.q5_sq),
        row.q_sq == 0.25 && row.q5_sq == 0.75,
    );
    let l = lambda_of_sq(2.0, m1()).unwrap();
    o.check(format!("region II q^2 = 2 gives lambda {l:.6}"), (l + 0.5 * std::f64::consts::LN_2).abs() < 1e-15);
    o
}

fn shells(r: &SuiteReport) -> Outcome {
    let mut o = Outcome::new(5, "shell preservation under translation and gauge shift");
    o.suite_checks(r, &["translation_shell", "gauge_shift_shell"]);
    o
}

fn constraint() -> Outcome {
    let mut o = Outcome::new(6, "fifth-coordinate constraint dynamics");
    let r = run_suite(Suite::Fifthdim, SEED);
    o.suite_checks(&r, &["free_solution", "phi4_chain", "plane_wave_round_trip", "sourced_plane_wave_kg"]);
    o
}

fn series() -> Outcome {
    let mut o = Outcome::new(7, "sigma-model series and pion mass");
    let r = run_suite(Suite::SigmaSeries, SEED);
    o.suite_checks(
        &r,
        &["series_c_const", "series_c_inv", "series_c_2", "series_c_4", "pion_mass_round_trip", "pion_mass_branch_sign"],
    );
    let f = 93.0;
    let s = SigmaParams::new(f, m1(), Branch::External).unwrap();
    let c = s.series_coefficients().unwrap();
    o.check(format!("c_2 abs error {:.1e}", (c.c_2 + 1.0).abs()), (c.c_2 + 1.0).abs() <= 1e-4);
    o.check(format!("c_const rel {:.1e}", rel(c.c_const, -4.5 * f * f)), rel(c.c_const, -4.5 * f * f) <= 1e-4);
    o.check(format!("c_inv rel {:.1e}", rel(c.c_inv, 8.0 * f.powi(4))), rel(c.c_inv, 8.0 * f.powi(4)) <= 1e-4);
    let c4 = -1.0 / (4.0 * f * f);
    o.check(format!("c_4 rel {:.1e}", rel(c.c_4, c4)), rel(c.c_4, c4) <= 1e-3);
    let m = ScaleM::new(138.0 / 2f64.sqrt()).unwrap();
    let m2 = SigmaParams::new(f, m, Branch::External).unwrap().pion_mass_sq().unwrap();
    o.check(format!("m_pi^2 at M = 138/sqrt2 rel {:.1e}", rel(m2, 138.0 * 138.0)), rel(m2, 138.0 * 138.0) <= 1e-3);
    o
}

fn higgs() -> Outcome {
    let mut o = Outcome::new(8, "Higgs stationary points, zeros and mass");
    let r = run_suite(Suite::Higgs, SEED);
    o.suite_checks(&r, &["unshifted_stationary", "unshifted_zeros", "shifted_stationary", "mass_unit", "mass_scaling"]);
    let h = HiggsParams::new(1.0, m1(), Branch::Internal).unwrap();
    let hm = h.mass_sq().unwrap();
    o.check(format!("u* = {:.10}", hm.u_star), (hm.u_star - 3.0).abs() < 1e-10);
    o.check(format!("mass^2 = {:.9}", hm.mass_sq), (hm.mass_sq - 1.125).abs() <= 1e-6);
    o.check(
        format!("raw curvature {:.9} with normalization {}", hm.raw_curvature, hm.normalization),
        (hm.raw_curvature - 2.25).abs() <= 1e-6,
    );
    o
}

fn gradients(r: &SuiteReport) -> Outcome {
    let mut o = Outcome::new(9, "gradient against source formulas");
    o.suite_checks(r, &["phi4_gradient", "sigma_gradient", "higgs_gradient"]);
    let h = HiggsParams::new(1.0, m1(), Branch::Internal).unwrap();
    let ok = (0..100).all(|i| {
        let phi = -2.0 + 4.0 * (i as f64 + 0.5) / 100.0;
        let (a, b) = (h.source_printed(phi), h.source(phi));
        (a - b).abs() <= 1e-12 * (1.0 + b.abs())
    });
    o.check("printed Higgs source at M = 1", ok);
    o
}

fn modes() -> Outcome {
    let mut o = Outcome::new(10, "mode normalization, pairings, coefficient invariance");
    let r = run_suite(Suite::Modes, SEED);
    o.suite_checks(
        &r,
        &["shifted_mode_norm", "unconjugated_pairings_vanish", "charged_coefficient_invariance", "neutral_coefficient_invariance"],
    );
    o
}

fn full_verify() -> Outcome {
    let mut o = Outcome::new(11, "verify --suite all runtime and determinism");
    let run = || {
        let t = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_conformal"))
            .args(["verify", "--suite", "all", "--seed", "11"])
            .output()
            .expect("binary runs");
        (out, t.elapsed())
    };
    let (a, ta) = run();
    let (b, tb) = run();
    o.check(format!("exit {:?}", a.status.code()), a.status.success() && b.status.success());
    o.check(format!("runtimes {:.2}s {:.2}s", ta.as_secs_f64(), tb.as_secs_f64()), ta.max(tb) < Duration::from_secs(60));
    o.check(format!("{} output bytes identical", a.stdout.len()), !a.stdout.is_empty() && a.stdout == b.stdout);
    o
}

fn main() {
    let group = run_suite(Suite::Group, SEED);
    let atlas_report = run_suite(Suite::Atlas, SEED);
    let models = run_suite(Suite::Models, SEED);
    let outcomes = vec![
        equivariance(),
        special_conformal(&group),
        conjugation(&group),
        atlas(&atlas_report),
        shells(&atlas_report),
        constraint(),
        series(),
        higgs(),
        gradients(&models),
        modes(),
        full_verify(),
    ];
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.id).collect();
    println!("acceptance: {}/{} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
