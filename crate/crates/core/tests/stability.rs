use std::collections::HashMap;
use std::f64::consts::TAU;

use nsmx::dyadic::{DecayTrace, DyadicPartition};
use nsmx::evolution::IntegratorConfig;
use nsmx::periodic::{calibrate_forcing, random_profile, PeriodicTriple, PicardConfig, SOLVER_BAND};
use nsmx::physics::{nonlinear_terms, EMState, Physics};
use nsmx::scalar::Cplx;
use nsmx::spectral::{leray_project, random_field, Band, FrequencyLattice};
use nsmx::stability::*;
use nsmx::{Field, Lattice};

type C = Cplx<f64>;

fn lat(n: usize) -> Lattice {
    FrequencyLattice::new(n, TAU).unwrap()
}

fn state(l: &Lattice, seed: u64, amp: f64, ph: Physics) -> EMState<f64> {
    let u = random_field(l, 3.0, seed, true, Band::Half).unwrap().scaled(amp);
    let e = random_field(l, 3.0, seed + 1, false, Band::Half).unwrap().scaled(amp);
    let b = random_field(l, 3.0, seed + 2, true, Band::Half).unwrap().scaled(amp);
    EMState::new(u, e, b, ph).unwrap()
}

fn orbit(l: &Lattice, ph: Physics, seed: u64, target: f64) -> PeriodicOrbit<f64> {
    let part = DyadicPartition::build(l).unwrap();
    let f = random_profile(l, TAU, 2, 2.5, seed, false, SOLVER_BAND, 1.0).unwrap().resized(8);
    let g = random_profile(l, TAU, 2, 2.5, seed + 1000, false, SOLVER_BAND, 1.0).unwrap().resized(8);
    let h = random_profile(l, TAU, 2, 2.5, seed + 2000, true, SOLVER_BAND, 1.0).unwrap().resized(8);
    let (ext, _) = calibrate_forcing(&PeriodicTriple::new(f, g, h).unwrap(), ph, &part, target).unwrap();
    PeriodicOrbit::solve(ext, ph, PicardConfig::default()).unwrap().0
}

fn rel(a: &Field, b: &Field) -> f64 {
    a.sub(b).unwrap().norm_l2() / b.norm_l2().max(1e-300)
}

#[test]
fn zero_reference_reduces_to_self_interaction() {
    let l = lat(16);
    let ph = Physics { nu: 1.0, sigma: 0.8 };
    let err = state(&l, 1, 0.5, ph);
    let z = EMState::zeros(&l, ph);
    let n = error_nonlinearity(&err, &z, Band::Half).unwrap();
    let want = nonlinear_terms(&err.u, &err.e, &err.b, ph.sigma, Band::Half).unwrap();
    assert!(rel(&n.n1, &want.n_u) < 1e-13);
    assert!(rel(&n.n2, &want.n_e) < 1e-13);
    assert_eq!(n.n3.max_abs(), 0.0);
    for t in n.terms.iter().filter(|t| t.name.contains("per")) {
        assert_eq!(t.field.max_abs(), 0.0, "{}", t.name);
    }
}

#[test]
fn zero_error_gives_zero() {
    let l = lat(16);
    let ph = Physics::default();
    let per = state(&l, 2, 1.0, ph);
    let n = error_nonlinearity(&EMState::zeros(&l, ph), &per, Band::Half).unwrap();
    assert_eq!(n.terms.len(), 16);
    for f in [&n.n1, &n.n2, &n.n3] {
        assert_eq!(f.max_abs(), 0.0);
    }
}

fn real_mode(l: &Lattice, m: [i64; 3], a: [C; 3]) -> Field {
    let mut f = Field::zeros(l);
    let idx = l.index_of(m).unwrap();
    f.set(idx, a);
    f.set(l.mirror(idx), a.map(|z| z.conj()));
    f
}

fn cross(a: [C; 3], b: [C; 3]) -> [C; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[test]
fn worst_term_matches_triple_convolution() {
    let l = lat(8);
    let ph = Physics { nu: 1.0, sigma: 1.7 };
    let up = real_mode(&l, [1, 0, 0], [C::new(0.0, 0.0), C::new(0.4, 0.1), C::new(-0.2, 0.3)]);
    let bp = real_mode(&l, [0, 1, 0], [C::new(0.3, -0.2), C::new(0.0, 0.0), C::new(0.5, 0.1)]);
    let b = real_mode(&l, [0, 0, 1], [C::new(0.1, 0.6), C::new(-0.3, 0.2), C::new(0.0, 0.0)]);
    let z = Field::zeros(&l);
    let per = EMState::new(up.clone(), z.clone(), bp.clone(), ph).unwrap();
    let err = EMState::new(z.clone(), z, b.clone(), ph).unwrap();
    let n = error_nonlinearity(&err, &per, Band::Half).unwrap();
    let support = |f: &Field| (0..l.len()).filter(|&i| f.at(i).iter().any(|c| c.norm() > 0.0)).collect::<Vec<_>>();
    let mut acc: HashMap<usize, [C; 3]> = HashMap::new();
    for &i in &support(&up) {
        for &j in &support(&bp) {
            for &k in &support(&b) {
                let (mi, mj, mk) = (l.mode(i), l.mode(j), l.mode(k));
                let m = [mi[0] + mj[0] + mk[0], mi[1] + mj[1] + mk[1], mi[2] + mj[2] + mk[2]];
                let Some(idx) = l.index_of(m) else { continue };
                if idx == 0 || !l.in_band(idx, Band::Half) {
                    continue;
                }
                let v = cross(cross(up.at(i), bp.at(j)), b.at(k));
                let e = acc.entry(idx).or_insert([C::default(); 3]);
                for c in 0..3 {
                    e[c] += v[c] * ph.sigma;
                }
            }
        }
    }
    let mut want = Field::zeros(&l);
    for (idx, v) in acc {
        want.set(idx, v);
    }
    let want = leray_project(&want).unwrap().solenoidal;
    let got = &n.term("(uper^Bper)^B").unwrap().field;
    assert!(want.max_abs() > 1e-3);
    assert!(got.max_diff(&want) < 1e-15);
}

#[test]
fn terms_scale_with_their_degree() {
    let l = lat(16);
    let ph = Physics::default();
    let per = state(&l, 3, 0.7, ph);
    let err = state(&l, 4, 0.3, ph);
    let c = 0.37;
    let err_c = EMState::new(err.u.scaled(c), err.e.scaled(c), err.b.scaled(c), ph).unwrap();
    let a = error_nonlinearity(&err, &per, Band::Half).unwrap();
    let b = error_nonlinearity(&err_c, &per, Band::Half).unwrap();
    for (ta, tb) in a.terms.iter().zip(&b.terms) {
        let want = ta.field.scaled(c.powi(ta.degree as i32));
        assert!(rel(&tb.field, &want) < 1e-13, "{}", ta.name);
    }
}

#[test]
fn factored_form_matches_breakdown() {
    let l = lat(16);
    let ph = Physics { nu: 1.0, sigma: 1.3 };
    let per = state(&l, 5, 0.7, ph);
    let err = state(&l, 6, 0.3, ph);
    let n = error_nonlinearity(&err, &per, Band::Half).unwrap();
    let [n1, n2, n3] = error_rhs(&err.u, &err.e, &err.b, Some(&per), ph.sigma, Band::Half).unwrap();
    assert!(rel(&n1, &n.n1) < 1e-13);
    assert!(rel(&n2, &n.n2) < 1e-13);
    assert_eq!(n3.max_abs(), 0.0);
    // the exact difference of the full nonlinearity
    let bar = per.add(&err).unwrap();
    let full = nonlinear_terms(&bar.u, &bar.e, &bar.b, ph.sigma, Band::Half).unwrap();
    let base = nonlinear_terms(&per.u, &per.e, &per.b, ph.sigma, Band::Half).unwrap();
    assert!(rel(&full.n_u.sub(&base.n_u).unwrap(), &n.n1) < 1e-12);
    assert!(rel(&full.n_e.sub(&base.n_e).unwrap(), &n.n2) < 1e-12);
}

#[test]
fn perturbation_has_requested_size_and_constraints() {
    let l = lat(16);
    let part = DyadicPartition::build(&l).unwrap();
    let p = perturbation(&l, Physics::default(), 9, 3.0, 0.25).unwrap();
    assert!((data_norm(&part, &p) - 0.25).abs() < 1e-14);
    assert!(p.u.divergence_defect() < 1e-14 && p.b.divergence_defect() < 1e-14);
    assert!(p.hermitian_defect() < 1e-15);
}

#[test]
fn error_equation_matches_full_evolution() {
    let l = lat(16);
    let ph = Physics::default();
    let orb = orbit(&l, ph, 3, 1e-2);
    let err0 = perturbation(&l, ph, 4, 3.0, 0.2).unwrap();
    let mut d = Vec::new();
    let mut direct = Vec::new();
    for dt in [1.0 / 16.0, 1.0 / 32.0] {
        let cfg = StabilityConfig { amplitude: 0.2, seed: 4, horizon: 2.0, dt, ..Default::default() };
        let ic = IntegratorConfig { cadence: 2.0, ..cfg.integrator() };
        let e = integrate_error(Some(&orb), &err0, &ic).unwrap();
        let mut start = orb.state_at(0.0).add(&err0).unwrap();
        start.physics = ph;
        let run = nsmx::evolution::evolve(&start, &nsmx::evolution::Forcing::Periodic(orb.forcing.clone()), &ic, 0.1).unwrap();
        let via_full = run.last.sub(&orb.state_at(2.0)).unwrap();
        d.push(via_full.sub(&e).unwrap().norm());
        direct.push(e);
    }
    let integ_err = direct[0].sub(&direct[1]).unwrap().norm();
    assert!(d[1] < 10.0 * integ_err, "{d:?} vs {integ_err:e}");
}

#[test]
fn zero_amplitude_stays_at_integrator_level() {
    let l = lat(16);
    let ph = Physics::default();
    let orb = orbit(&l, ph, 5, 1e-2);
    let floor: Vec<f64> = [1.0 / 16.0, 1.0 / 32.0]
        .iter()
        .map(|&dt| {
            let cfg = StabilityConfig { amplitude: 0.0, horizon: 4.0, dt, ..Default::default() };
            let run = perturb_and_run(Some(&orb), &l, ph, &cfg).unwrap();
            run.total_window_norms().into_iter().fold(0.0, f64::max)
        })
        .collect();
    assert!(floor[0] < 1e-3 * orb.solution.norm_l2(), "{floor:?}");
    assert!(floor[0] / floor[1] > 3.0, "{floor:?}");
}

#[test]
fn unforced_small_data_decays() {
    let l = lat(16);
    let ph = Physics::default();
    let cfg = StabilityConfig { amplitude: 0.05, horizon: 16.0, dt: 1.0 / 16.0, ..Default::default() };
    let run = perturb_and_run(None, &l, ph, &cfg).unwrap();
    assert!(run.blow_up.is_none());
    let w = run.total_window_norms();
    assert_eq!(w.len(), 16);
    assert!(w.windows(2).all(|p| p[1] < p[0]), "{w:?}");
    for c in run.components().unwrap() {
        assert!(c.weighted_sup.is_finite() && c.x_norm.is_finite());
        assert!(c.argmax_window < 4, "{} at {}", c.component, c.argmax_window);
    }
}

#[test]
fn weighted_sup_is_stable_under_step_halving() {
    let l = lat(16);
    let ph = Physics::default();
    let runs: Vec<Vec<ComponentDecay>> = [1.0 / 16.0, 1.0 / 32.0]
        .iter()
        .map(|&dt| {
            let cfg = StabilityConfig { amplitude: 0.05, horizon: 8.0, dt, seed: 3, ..Default::default() };
            perturb_and_run(None, &l, ph, &cfg).unwrap().components().unwrap()
        })
        .collect();
    for (a, b) in runs[0].iter().zip(&runs[1]) {
        assert!((a.weighted_sup / b.weighted_sup - 1.0).abs() < 0.05, "{}", a.component);
    }
}

#[test]
fn blow_up_keeps_partial_trace() {
    let l = lat(16);
    let ph = Physics::default();
    let cfg = StabilityConfig { amplitude: 1e120, horizon: 8.0, dt: 0.5, ..Default::default() };
    let run = perturb_and_run(None, &l, ph, &cfg).unwrap();
    assert!(run.blow_up.is_some());
    assert!(!run.traces[0].is_empty());
}

fn synthetic(values: impl Fn(f64) -> f64) -> DecayTrace {
    let mut t = DecayTrace::with_blocks(0, 1, 1e-9).unwrap();
    for j in 0..=16 * 32 {
        let s = j as f64 / 32.0;
        let v = values(s);
        t.push(s, vec![v], v).unwrap();
    }
    t
}

#[test]
fn decay_fit_on_synthetic_traces() {
    let w: Vec<f64> = (0..16).map(|n| 3.0 * (n as f64 + 1.0).powf(-0.5)).collect();
    let f = decay_fit(&w, 1e-9).unwrap();
    assert!((f.rate.unwrap() + 0.5).abs() < 0.02, "{f:?}");
    assert!((f.weighted_sup - 3.0).abs() < 1e-6);
    let f = fit_trace(&synthetic(|_| 2.0)).unwrap();
    assert!(f.rate.unwrap().abs() < 1e-12);
    let f = fit_trace(&synthetic(|_| 0.0)).unwrap();
    assert!(f.rate.is_none() && f.weighted_sup == 0.0);
}

#[test]
fn maxwell_high_frequency_decay_fit() {
    let l = lat(16);
    let ph = Physics::default();
    let part = DyadicPartition::build(&l).unwrap();
    let mut b = random_field(&l, 1.0, 70, true, Band::Half).unwrap();
    for idx in 0..l.len() {
        if l.xi_norm(idx) < 2.0 {
            b.set(idx, [C::default(); 3]);
        }
    }
    let s0 = EMState::new(Field::zeros(&l), Field::zeros(&l), b, ph).unwrap();
    let cfg = IntegratorConfig { dt: 1.0 / 16.0, horizon: 9.0, cadence: 1.0 / 16.0, nonlinear: false, ..Default::default() };
    let mut tr = DecayTrace::new(&part, 0.1).unwrap();
    nsmx::evolution::evolve_observed(&s0, &nsmx::evolution::Forcing::None, &cfg, 0.1, |s| tr.record(&part, s.time, &s.b))
        .unwrap();
    let fit = fit_trace(&tr).unwrap();
    assert!(fit.rate.unwrap() < -1.5, "{fit:?}");
}

#[test]
fn contraction_probe_conventions_and_scaling() {
    let l = lat(16);
    let ph = Physics::default();
    let pc = ProbeConfig { horizon: 4.0, dt: 1.0 / 16.0, epsilon: 0.1 };
    let z = EMState::zeros(&l, ph);
    let g = Candidate::seeded(&l, 1).unwrap().with_radius(1e-2, &pc).unwrap();
    assert_eq!(contraction_probe(&g, &g, None, &z, &pc).unwrap().ratio, 0.0);
    let r1 = seeded_probe(&l, ph, None, 2, 0.0, 0.2, &pc).unwrap();
    let r2 = seeded_probe(&l, ph, None, 2, 0.0, 0.1, &pc).unwrap();
    assert!((r1.radius[0] - 0.2).abs() < 1e-12);
    let q = r2.ratio / r1.ratio;
    assert!((q - 0.5).abs() < 0.125, "{q}");
}

#[test]
fn small_ball_contracts_around_orbit() {
    let l = lat(16);
    let ph = Physics::default();
    let orb = orbit(&l, ph, 7, 1e-2);
    let pc = ProbeConfig { horizon: 4.0, dt: 1.0 / 16.0, epsilon: 0.1 };
    for seed in 0..3 {
        let r = seeded_probe(&l, ph, Some(&orb), seed, 1e-2, 1e-2, &pc).unwrap();
        assert!(r.ratio < 0.5, "{r:?}");
        assert!(r.image_norm.iter().all(|&n| n < 1e-2));
    }
}
