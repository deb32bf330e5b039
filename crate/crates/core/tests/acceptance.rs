//! End-to-end acceptance criteria. Runs as a plain binary so that every
//! criterion prints one PASS/FAIL line.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{Matrix6, Vector6};
use nsmx::dyadic::{bony_split, DyadicPartition};
use nsmx::evolution::{evolve, EnergyLedger, Forcing, IntegratorConfig};
use nsmx::harness::{evaluate_law, law_inputs, product_law_ratio, LawId, LawParams, LawSpec};
use nsmx::maxwell::mode::{generator, C64, Vec3};
use nsmx::maxwell::{semigroup_apply, verify_lambda_bounds};
use nsmx::periodic::{
    alpha_beta_sup, beta0_bound, calibrate_forcing, default_t_grid, linear_periodic_solve, periodic_residual,
    picard_fixed_point, random_profile, resonance_constants, PeriodicTriple, PicardConfig, ALPHA0_BOUND, SOLVER_BAND,
};
use nsmx::physics::{EMState, Physics};
use nsmx::spectral::{random_field, Band, FrequencyLattice, ProductKind};
use nsmx::stability::{contraction_threshold, perturb_and_run, seeded_probe, PeriodicOrbit, ProbeConfig, StabilityConfig};
use nsmx::Lattice;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn lat(n: usize, l: f64) -> Lattice {
    FrequencyLattice::new(n, l).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn vnorm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dist(a: Vec3, b: Vec3) -> f64 {
    vnorm(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

fn transverse(rng: &mut ChaCha8Rng, xi: [f64; 3]) -> Vec3 {
    let v: Vec3 = [0; 3].map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let r2 = xi.iter().map(|x| x * x).sum::<f64>();
    let d = (v[0] * xi[0] + v[1] * xi[1] + v[2] * xi[2]) / r2;
    [v[0] - d * xi[0], v[1] - d * xi[1], v[2] - d * xi[2]]
}

fn oracle_exp(e: Vec3, b: Vec3, xi: [f64; 3], t: f64) -> (Vec3, Vec3) {
    let g = generator(xi, 1.0);
    let m = Matrix6::from_fn(|i, j| g[i][j] * t);
    let y = m.exp() * Vector6::new(e[0], e[1], e[2], b[0], b[1], b[2]);
    ([y[0], y[1], y[2]], [y[3], y[4], y[5]])
}

fn semigroup_error(rng: &mut ChaCha8Rng, xi: [f64; 3]) -> f64 {
    let e = [0; 3].map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let b = transverse(rng, xi);
    let scale = vnorm(&[e, b].concat());
    [0.1, 1.0, 10.0]
        .iter()
        .map(|&t| {
            let (e1, b1) = semigroup_apply(e, b, xi, t);
            let (e2, b2) = oracle_exp(e, b, xi, t);
            (dist(e1, e2) + dist(b1, b2)) / scale
        })
        .fold(0.0, f64::max)
}

fn semigroup_vs_dense() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let l = lat(32, TAU);
    let lattice_err = (1..l.len()).map(|i| semigroup_error(&mut rng, l.wavevector(i))).fold(0.0, f64::max);
    let band_err = (0..200)
        .map(|k| {
            let r = 0.45 + 0.1 * k as f64 / 199.0;
            let v = [0; 3].map(|_| rng.gen_range(-1.0..1.0f64));
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            semigroup_error(&mut rng, v.map(|x| x * r / n))
        })
        .fold(0.0, f64::max);
    check(
        lattice_err < 1e-10 && band_err < 1e-8,
        format!("32^3 lattice max rel err {lattice_err:.2e}; 200 modes near |xi| = 1/2 max rel err {band_err:.2e}"),
    )
}

fn lambda_bounds() -> Outcome {
    let mut worst = 0.0f64;
    let mut shells = 0;
    for l in [2.0 * PI, 4.0 * PI, 16.0 * PI] {
        let rep = verify_lambda_bounds(&lat(32, l));
        worst = worst.max(rep.max_violation);
        shells += rep.shells.len();
    }
    check(worst <= 1e-12, format!("{shells} shells over three box sizes, max violation {worst:.2e}"))
}

fn forces(l: &Lattice, k: usize, seed: u64) -> PeriodicTriple<f64> {
    let f = random_profile(l, TAU, k, 2.5, seed, false, SOLVER_BAND, 1.0).unwrap();
    let g = random_profile(l, TAU, k, 2.5, seed + 1000, false, SOLVER_BAND, 1.0).unwrap();
    let h = random_profile(l, TAU, k, 2.5, seed + 2000, true, SOLVER_BAND, 1.0).unwrap();
    PeriodicTriple::new(f, g, h).unwrap()
}

fn periodic_linear() -> Outcome {
    let l = lat(16, TAU);
    let ph = Physics::default();
    let (mut res, mut div) = (0.0f64, 0.0f64);
    for seed in 0..20 {
        let fr = forces(&l, 4, seed);
        let sol = linear_periodic_solve(&fr.u, &fr.e, &fr.b, ph).unwrap();
        res = res.max(periodic_residual(&sol, &fr, ph).unwrap().max());
        div = div.max(sol.b.divergence_defect());
    }
    check(res < 1e-10 && div < 1e-13, format!("20 seeds, K = 4: max residual {res:.2e}, max div B {div:.2e}"))
}

fn picard() -> Outcome {
    let l = lat(16, TAU);
    let part = DyadicPartition::build(&l).unwrap();
    let ph = Physics::default();
    let (mut contraction, mut iters, mut res, mut all) = (0.0f64, 0, 0.0f64, true);
    for seed in 0..10 {
        let (ext, _) = calibrate_forcing(&forces(&l, 4, 30 + seed), ph, &part, 1e-2).unwrap();
        let (_, rep) = picard_fixed_point(&ext, ph, PicardConfig::default(), &part).unwrap();
        all &= rep.converged;
        contraction = contraction.max(rep.max_contraction());
        iters = iters.max(rep.iterations);
        res = res.max(rep.residual);
    }
    check(
        all && contraction < 0.5 && iters <= 25 && res < 1e-9,
        format!("10 seeds: converged {all}, max contraction {contraction:.3}, max iterations {iters}, max residual {res:.2e}"),
    )
}

fn orbit(l: &Lattice, ph: Physics, seed: u64, target: f64) -> PeriodicOrbit<f64> {
    let part = DyadicPartition::build(l).unwrap();
    let f = random_profile(l, TAU, 2, 2.5, seed, false, SOLVER_BAND, 1.0).unwrap().resized(8);
    let g = random_profile(l, TAU, 2, 2.5, seed + 1000, false, SOLVER_BAND, 1.0).unwrap().resized(8);
    let h = random_profile(l, TAU, 2, 2.5, seed + 2000, true, SOLVER_BAND, 1.0).unwrap().resized(8);
    let (ext, _) = calibrate_forcing(&PeriodicTriple::new(f, g, h).unwrap(), ph, &part, target).unwrap();
    PeriodicOrbit::solve(ext, ph, PicardConfig::default()).unwrap().0
}

fn rel(a: &EMState<f64>, b: &EMState<f64>) -> f64 {
    a.sub(b).unwrap().norm() / b.norm()
}

fn cross_solver() -> Outcome {
    let l = lat(16, TAU);
    let ph = Physics::default();
    let orb = orbit(&l, ph, 3, 1e-2);
    let start = orb.state_at(0.0);
    let forcing = Forcing::Periodic(orb.forcing.clone());
    let run = |steps: usize| {
        let dt = TAU / steps as f64;
        evolve(&start, &forcing, &IntegratorConfig { dt, horizon: TAU, cadence: TAU, ..Default::default() }, 0.1).unwrap().last
    };
    let ys: Vec<EMState<f64>> = [32, 64, 128].iter().map(|&s| run(s)).collect();
    let e: Vec<f64> = ys.iter().map(|y| rel(y, &start)).collect();
    let halving = rel(&ys[0], &ys[1]);
    let ratio = e[0] / e[1];
    check(
        e[0] < 4.0 * halving && (ratio - 4.0).abs() <= 1.2,
        format!("return errors {:.2e} {:.2e} {:.2e}, step-halving error {halving:.2e}, ratio {ratio:.2}", e[0], e[1], e[2]),
    )
}

fn late_residual(l: &EnergyLedger, t0: f64) -> f64 {
    l.rows.iter().filter(|r| r.t >= t0).filter_map(|r| r.residual).map(f64::abs).fold(0.0, f64::max)
}

fn energy() -> Outcome {
    let l = lat(16, TAU);
    let ph = Physics::default();
    let (mut increase, mut lo, mut hi) = (0.0f64, f64::INFINITY, 0.0f64);
    for seed in 0..10 {
        let amp = 0.3;
        let s0 = EMState::new(
            random_field(&l, 3.0, 3 * seed, true, Band::Half).unwrap().scaled(amp),
            random_field(&l, 3.0, 3 * seed + 1, false, Band::Half).unwrap().scaled(amp),
            random_field(&l, 3.0, 3 * seed + 2, true, Band::Half).unwrap().scaled(amp),
            ph,
        )
        .unwrap();
        let mut res = Vec::new();
        for dt in [1.0 / 16.0, 1.0 / 32.0] {
            let cfg = IntegratorConfig { dt, horizon: 2.0, cadence: 2.0, ..Default::default() };
            let run = evolve(&s0, &Forcing::None, &cfg, 0.1).unwrap();
            increase = increase.max(run.ledger.max_increase());
            res.push(late_residual(&run.ledger, 0.5));
        }
        let r = res[0] / res[1];
        lo = lo.min(r);
        hi = hi.max(r);
    }
    check(
        increase <= 0.0 && lo >= 2.8 && hi <= 5.2,
        format!("10 seeds: max energy increase {increase:.2e}, residual ratio range [{lo:.2}, {hi:.2}]"),
    )
}

fn alpha_closed(t: f64) -> f64 {
    0.5 * (PI / (PI * t).tanh() - 1.0 / t)
}

fn resonance() -> Outcome {
    let ab = alpha_beta_sup(&default_t_grid(1e4), 100_000);
    let l = lat(16, TAU);
    let rc = resonance_constants(TAU, &l, 1_000_000);
    let want = alpha_closed(rc.grid.xi_max * rc.grid.xi_max) / PI;
    let a_err = (rc.a_t - want).abs();
    check(
        ab.alpha0 <= ALPHA0_BOUND && (ab.alpha0 - PI / 2.0).abs() <= 1e-3 && ab.beta0 <= beta0_bound() && a_err <= 1e-3,
        format!(
            "alpha0 {:.6} (pi/2 {:.6}), beta0 {:.4} <= {:.4}, A_T {:.6} vs closed form {want:.6}",
            ab.alpha0,
            PI / 2.0,
            ab.beta0,
            beta0_bound(),
            rc.a_t
        ),
    )
}

fn bony() -> Outcome {
    let l = lat(32, TAU);
    let part = DyadicPartition::build(&l).unwrap();
    let kinds = [ProductKind::Dot, ProductKind::Cross, ProductKind::TensorDivergence];
    let worst = (0..100u64)
        .map(|k| {
            let u = random_field(&l, 2.0, 2 * k + 100, false, Band::Half).unwrap();
            let v = random_field(&l, 2.5, 2 * k + 101, false, Band::Half).unwrap();
            bony_split(&part, &u, &v, kinds[k as usize % 3]).unwrap().residual()
        })
        .fold(0.0, f64::max);
    check(worst < 1e-12, format!("100 pairs on 32^3, max relative residual {worst:.2e}"))
}

fn product_laws() -> Outcome {
    let mut failed = Vec::new();
    let mut worst = (0.0f64, 0.0f64);
    for law in LawId::products() {
        let rep = product_law_ratio(&LawSpec::new(law)).unwrap();
        println!(
            "    {law}: max ratio {:.4} / {:.4}, refinement {:.3}, skipped {}",
            rep.coarse.max_ratio,
            rep.fine.max_ratio,
            rep.refinement_factor(),
            rep.skipped()
        );
        worst = (worst.0.max(rep.max_ratio()), worst.1.max(rep.refinement_factor()));
        if !rep.passed() {
            failed.push(law.to_string());
        }
    }
    let l = lat(16, TAU);
    let part = DyadicPartition::build(&l).unwrap();
    let params = LawParams { delta: 0.25, epsilon: 0.1, time: nsmx::harness::TimeGrid { horizon: 8.0, per_unit: 8 } };
    let mut scaling = 0.0f64;
    for law in LawId::products() {
        let (inputs, profiles) = law_inputs(law, &l, 11, 0, &[2.5]).unwrap();
        let (a, b) = evaluate_law(law, &part, &inputs, &profiles, &params).unwrap();
        for k in 0..inputs.len() {
            let mut scaled = inputs.clone();
            scaled[k].scale(-2.5);
            let (a2, b2) = evaluate_law(law, &part, &scaled, &profiles, &params).unwrap();
            scaling = scaling.max(((a2 / b2) / (a / b) - 1.0).abs());
        }
    }
    check(
        failed.is_empty() && scaling < 1e-12,
        format!(
            "17 laws x 100 trials on 32^3/48^3: failures {failed:?}, max ratio {:.4}, worst refinement {:.3}, scaling defect {scaling:.1e}",
            worst.0, worst.1
        ),
    )
}

fn stability_run() -> Outcome {
    let l = lat(32, TAU);
    let ph = Physics::default();
    let orb = orbit(&l, ph, 1, 1e-2);
    let pc = ProbeConfig { horizon: 4.0, dt: 1.0 / 16.0, epsilon: 0.1 };
    let scan = contraction_threshold(&l, ph, Some(&orb), &[0, 1, 2], 64.0, 10, &pc).unwrap();
    let Some(threshold) = scan.threshold else {
        return Err(format!("no contracting amplitude found: {:?}", scan.points));
    };
    let cfg = StabilityConfig { amplitude: threshold / 4.0, horizon: 64.0, dt: 1.0 / 16.0, epsilon: 0.1, seed: 5, ..Default::default() };
    let run = perturb_and_run(Some(&orb), &l, ph, &cfg).unwrap();
    if let Some(t) = run.blow_up {
        return Err(format!("blow-up at t = {t}"));
    }
    let comps = run.components().unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for cd in &comps {
        let decay = cd.terminal() / cd.initial();
        ok &= cd.weighted_sup.is_finite() && cd.argmax_window < 32 && decay < 0.1;
        parts.push(format!("{} sup {:.3e} argmax {} decay {decay:.1e}", cd.component, cd.weighted_sup, cd.argmax_window));
    }
    check(ok, format!("threshold {threshold}, amplitude {}: {}", cfg.amplitude, parts.join("; ")))
}

fn contraction() -> Outcome {
    let l = lat(16, TAU);
    let ph = Physics::default();
    let orb = orbit(&l, ph, 2, 1e-2);
    let pc = ProbeConfig { horizon: 4.0, dt: 1.0 / 16.0, epsilon: 0.1 };
    let mut worst = 0.0f64;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for seed in 0..20 {
        worst = worst.max(seeded_probe(&l, ph, Some(&orb), seed, 1e-2, 1e-2, &pc).unwrap().ratio);
        let r1 = seeded_probe(&l, ph, None, seed, 0.0, 0.2, &pc).unwrap().ratio;
        let r2 = seeded_probe(&l, ph, None, seed, 0.0, 0.1, &pc).unwrap().ratio;
        let q = r2 / r1;
        lo = lo.min(q);
        hi = hi.max(q);
    }
    check(
        worst < 0.5 && lo >= 0.375 && hi <= 0.625,
        format!("20 pairs: max ratio {worst:.3e}; halving ratio range [{lo:.3}, {hi:.3}]"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Maxwell semigroup vs dense exponential", semigroup_vs_dense),
        ("eigenvalue bounds on lattices", lambda_bounds),
        ("periodic linear solve", periodic_linear),
        ("Picard fixed point", picard),
        ("periodic solution vs time integrator", cross_solver),
        ("energy identity", energy),
        ("resonance constants", resonance),
        ("Bony decomposition", bony),
        ("product and trajectory laws", product_laws),
        ("perturbed orbit decay", stability_run),
        ("Duhamel map contraction", contraction),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag}: {name}: {detail} [{:.1}s]", i + 1, t0.elapsed().as_secs_f64());
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
