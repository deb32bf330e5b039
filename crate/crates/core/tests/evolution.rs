use std::collections::HashMap;
use std::f64::consts::TAU;

use nsmx::evolution::*;
use nsmx::maxwell::semigroup_apply;
use nsmx::maxwell::mode::C64;
use nsmx::periodic::{random_profile, PeriodicProfile, PeriodicTriple};
use nsmx::physics::{ohm_current, EMState, Physics};
use nsmx::scalar::Cplx;
use nsmx::spectral::{
    from_physical, leray_project, random_field, to_physical, Band, FrequencyLattice, PhysicalField,
};
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

fn cfg(dt: f64, horizon: f64) -> IntegratorConfig {
    IntegratorConfig { dt, horizon, cadence: dt, ..Default::default() }
}

fn rel(a: &EMState<f64>, b: &EMState<f64>) -> f64 {
    a.sub(b).unwrap().norm() / b.norm()
}

#[test]
fn ohm_current_special_cases() {
    let l = lat(16);
    let ph = Physics { nu: 1.0, sigma: 2.0 };
    let mut s = state(&l, 1, 1.0, ph);
    s.u = Field::zeros(&l);
    let j = ohm_current(&s).unwrap();
    assert!(j.max_diff(&s.e.scaled(2.0)) < 1e-15);
    let mut s = state(&l, 2, 1.0, ph);
    s.e = Field::zeros(&l);
    s.b = s.u.scaled(3.0);
    assert!(ohm_current(&s).unwrap().max_abs() < 1e-15);
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[test]
fn ohm_current_matches_pointwise_evaluation() {
    let l = lat(8);
    let ph = Physics { nu: 1.0, sigma: 0.7 };
    let s = state(&l, 3, 1.0, ph);
    let (pu, pe, pb) = (to_physical(&s.u), to_physical(&s.e), to_physical(&s.b));
    let mut comps = [vec![0.0; l.len()], vec![0.0; l.len()], vec![0.0; l.len()]];
    for i in 0..l.len() {
        let x = cross(pu.at(i), pb.at(i));
        let e = pe.at(i);
        for c in 0..3 {
            comps[c][i] = ph.sigma * (e[c] + x[c]);
        }
    }
    let mut want = from_physical(&PhysicalField::from_components(&l, comps).unwrap());
    want.truncate(Band::Half);
    want.clear_zero_mode();
    assert!(ohm_current(&s).unwrap().max_diff(&want) < 1e-12);
}

#[test]
fn rhs_zero_and_divergence_free() {
    let l = lat(16);
    let ph = Physics::default();
    let z = EMState::zeros(&l, ph);
    for f in rhs_nonlinear(&z, None).unwrap() {
        assert_eq!(f.max_abs(), 0.0);
    }
    let s = state(&l, 4, 1.0, ph);
    let fr = ForceFields {
        f: random_field(&l, 2.0, 9, false, Band::Full).unwrap(),
        g: random_field(&l, 2.0, 10, false, Band::Full).unwrap(),
        h: random_field(&l, 2.0, 11, true, Band::Full).unwrap(),
    };
    let [nu, _, nb] = rhs_nonlinear(&s, Some(&fr)).unwrap();
    assert!(nu.divergence_defect() < 1e-13);
    assert!(nb.divergence_defect() < 1e-13);
}

#[test]
fn advection_matches_brute_force_convolution() {
    let l = lat(8);
    let ph = Physics::default();
    let mut u = Field::zeros(&l);
    for (m, a) in [([1i64, 0, 0], [C::new(0.0, 0.0), C::new(0.3, 0.2), C::new(0.1, -0.4)]), ([0, 1, 0], [C::new(0.5, 0.1), C::new(0.0, 0.0), C::new(-0.2, 0.2)])] {
        let idx = l.index_of(m).unwrap();
        u.set(idx, a);
        u.set(l.mirror(idx), a.map(|z| z.conj()));
    }
    let s = EMState::new(u.clone(), Field::zeros(&l), Field::zeros(&l), ph).unwrap();
    let [nu, ne, _] = rhs_nonlinear(&s, None).unwrap();
    assert_eq!(ne.max_abs(), 0.0);
    let mut want: HashMap<usize, [C; 3]> = HashMap::new();
    for i in 1..l.len() {
        for j in 1..l.len() {
            let (a, b) = (u.at(i), u.at(j));
            if a.iter().all(|z| z.norm() == 0.0) || b.iter().all(|z| z.norm() == 0.0) {
                continue;
            }
            let (mi, mj) = (l.mode(i), l.mode(j));
            let Some(k) = l.index_of([mi[0] + mj[0], mi[1] + mj[1], mi[2] + mj[2]]) else { continue };
            if k == 0 || !l.in_band(k, Band::Half) {
                continue;
            }
            let xi = l.wavevector(k);
            let d = C::new(0.0, 1.0) * (b[0] * xi[0] + b[1] * xi[1] + b[2] * xi[2]);
            let e = want.entry(k).or_insert([C::default(); 3]);
            for c in 0..3 {
                e[c] -= a[c] * d;
            }
        }
    }
    let mut wf = Field::zeros(&l);
    for (k, v) in want {
        wf.set(k, v);
    }
    let wf = leray_project(&wf).unwrap().solenoidal;
    assert!(nu.max_diff(&wf) < 1e-15);
    assert!(wf.max_abs() > 1e-3);
}

#[test]
fn heat_mode_with_constant_force_is_exact() {
    let l = lat(16);
    let ph = Physics::default();
    let idx = l.index_of([2, 0, 0]).unwrap();
    let u0 = Field::single_mode(&l, [2, 0, 0], [C::new(0.0, 0.0), C::new(0.3, 0.1), C::new(0.0, -0.2)]).unwrap();
    let f = Field::single_mode(&l, [2, 0, 0], [C::new(0.0, 0.0), C::new(-0.5, 0.0), C::new(0.25, 0.4)]).unwrap();
    let forcing = Forcing::Steady(ForceFields { f: f.clone(), g: Field::zeros(&l), h: Field::zeros(&l) });
    let s0 = EMState::new(u0.clone(), Field::zeros(&l), Field::zeros(&l), ph).unwrap();
    for scheme in [Scheme::Etd1, Scheme::Etd2rk] {
        let dt = 0.1;
        let c = IntegratorConfig { scheme, ..cfg(dt, dt) };
        let s1 = etd_step(&s0, &c, &forcing).unwrap();
        let decay = (-4.0 * dt).exp();
        for comp in 0..3 {
            let want = u0.at(idx)[comp] * decay + f.at(idx)[comp] * ((1.0 - decay) / 4.0);
            assert!((s1.u.at(idx)[comp] - want).norm() < 1e-15);
        }
    }
}

#[test]
fn linear_run_matches_exact_semigroups() {
    let l = lat(16);
    let ph = Physics { nu: 0.5, sigma: 1.0 };
    let s0 = state(&l, 5, 1.0, ph);
    let horizon = 10.0;
    let c = IntegratorConfig { nonlinear: false, cadence: 1.0, ..cfg(1.0 / 16.0, horizon) };
    let run = evolve(&s0, &Forcing::None, &c, 0.1).unwrap();
    let mut worst = 0.0f64;
    for snap in &run.snapshots {
        let t = snap.time;
        for idx in 1..l.len() {
            let xi = l.wavevector(idx);
            let (e, b) = semigroup_apply(
                s0.e.at(idx).map(|z| C64::new(z.re, z.im)),
                s0.b.at(idx).map(|z| C64::new(z.re, z.im)),
                xi,
                t,
            );
            let decay = (-ph.nu * l.xi2(idx) * t).exp();
            for c in 0..3 {
                worst = worst.max((snap.e.at(idx)[c] - e[c]).norm());
                worst = worst.max((snap.b.at(idx)[c] - b[c]).norm());
                worst = worst.max((snap.u.at(idx)[c] - s0.u.at(idx)[c] * decay).norm());
            }
        }
    }
    assert!(worst < 1e-11, "{worst:e}");
    let exact: Vec<f64> = run.snapshots.iter().map(|s| s.energy()).collect();
    let ledger = run.ledger.totals();
    for (i, e) in exact.iter().enumerate() {
        assert!((ledger[16 * i] - e).abs() < 1e-10);
    }
}

fn late_residual(l: &EnergyLedger, t0: f64) -> f64 {
    l.rows.iter().filter(|r| r.t >= t0).filter_map(|r| r.residual).map(f64::abs).fold(0.0, f64::max)
}

fn run_to(s0: &EMState<f64>, forcing: &Forcing<f64>, dt: f64, horizon: f64) -> EvolutionRun<f64> {
    evolve(s0, forcing, &IntegratorConfig { cadence: horizon, ..cfg(dt, horizon) }, 0.1).unwrap()
}

#[test]
fn etd2rk_is_second_order() {
    let l = lat(16);
    let ph = Physics::default();
    let s0 = state(&l, 6, 0.5, ph);
    let forcing = Forcing::Periodic(PeriodicTriple::new(
        random_profile(&l, TAU, 2, 2.0, 40, false, Band::Half, 0.5).unwrap(),
        random_profile(&l, TAU, 2, 2.0, 41, false, Band::Half, 0.5).unwrap(),
        random_profile(&l, TAU, 2, 2.0, 42, true, Band::Half, 0.5).unwrap(),
    ).unwrap());
    let ys: Vec<EMState<f64>> = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0].iter().map(|&dt| run_to(&s0, &forcing, dt, 1.0).last).collect();
    let d1 = ys[0].sub(&ys[1]).unwrap().norm();
    let d2 = ys[1].sub(&ys[2]).unwrap().norm();
    let r = d1 / d2;
    assert!((r - 4.0).abs() < 0.8, "ratio {r}");
    let ys1: Vec<EMState<f64>> = [1.0 / 32.0, 1.0 / 64.0]
        .iter()
        .map(|&dt| evolve(&s0, &forcing, &IntegratorConfig { scheme: Scheme::Etd1, cadence: 1.0, ..cfg(dt, 1.0) }, 0.1).unwrap().last)
        .collect();
    let e1 = rel(&ys1[0], &ys[2]);
    let e2 = rel(&ys1[1], &ys[2]);
    assert!(e1 / e2 > 1.6 && e1 / e2 < 2.6, "first order ratio {}", e1 / e2);
}

#[test]
fn unforced_energy_decays_with_second_order_residual() {
    let l = lat(16);
    let ph = Physics::default();
    let s0 = state(&l, 7, 0.3, ph);
    let mut res = Vec::new();
    for dt in [1.0 / 16.0, 1.0 / 32.0] {
        let run = run_to(&s0, &Forcing::None, dt, 2.0);
        assert_eq!(run.ledger.max_increase(), 0.0);
        assert!(run.last.divergence_defect() < 1e-12);
        assert!(run.last.hermitian_defect() < 1e-12);
        res.push(late_residual(&run.ledger, 0.5));
    }
    let r = res[0] / res[1];
    assert!((r - 4.0).abs() < 1.2, "residual ratio {r} ({res:?})");
}

#[test]
fn forced_energy_balance_and_constraints() {
    let l = lat(16);
    let ph = Physics { nu: 0.7, sigma: 1.5 };
    let s0 = state(&l, 8, 0.3, ph);
    let f = ForceFields {
        f: random_field(&l, 2.0, 50, false, Band::Half).unwrap(),
        g: random_field(&l, 2.0, 51, false, Band::Half).unwrap(),
        h: random_field(&l, 2.0, 52, true, Band::Half).unwrap(),
    };
    let forcing = Forcing::Steady(f);
    let mut res = Vec::new();
    for dt in [1.0 / 16.0, 1.0 / 32.0] {
        let run = evolve(&s0, &forcing, &IntegratorConfig { cadence: 0.5, ..cfg(dt, 2.0) }, 0.1).unwrap();
        for s in &run.snapshots {
            assert!(s.divergence_defect() < 1e-12 && s.hermitian_defect() < 1e-12);
        }
        res.push(late_residual(&run.ledger, 0.5));
    }
    assert!((res[0] / res[1] - 4.0).abs() < 1.2, "{res:?}");
}

#[test]
fn zero_data_stays_zero() {
    let l = lat(8);
    let run = run_to(&EMState::zeros(&l, Physics::default()), &Forcing::None, 0.25, 2.0);
    assert_eq!(run.last.norm(), 0.0);
    assert!(run.ledger.rows.iter().all(|r| r.total() == 0.0 && r.residual.unwrap_or(0.0) == 0.0));
}

#[test]
fn gradient_part_of_electric_field() {
    let l = lat(16);
    let ph = Physics { nu: 1.0, sigma: 1.0 };
    let g = random_profile(&l, TAU, 2, 2.0, 60, false, Band::Half, 1.0).unwrap();
    let mut gg = g.clone();
    for f in gg.modes_mut() {
        let p = leray_project(f).unwrap();
        *f = p.gradient;
    }
    let z = PeriodicProfile::zeros(&l, TAU, 2).unwrap();
    let forcing = Forcing::Periodic(PeriodicTriple::new(z.clone(), g.clone(), z).unwrap());
    let s0 = state(&l, 9, 0.3, ph);
    let mut res = Vec::new();
    for dt in [1.0 / 16.0, 1.0 / 32.0] {
        let c = IntegratorConfig { nonlinear: false, ..cfg(dt, 1.0) };
        let run = evolve(&s0, &forcing, &c, 0.1).unwrap();
        let grad: Vec<Field> = run.snapshots.iter().map(|s| leray_project(&s.e).unwrap().gradient).collect();
        let mut worst = 0.0f64;
        for i in 1..grad.len() - 1 {
            let t = run.snapshots[i].time;
            let mut r = grad[i + 1].sub(&grad[i - 1]).unwrap().scaled(1.0 / (2.0 * dt));
            r.axpy(ph.sigma, &grad[i]);
            r.axpy(-1.0, &gg.sample(t));
            worst = worst.max(r.norm_l2());
        }
        res.push(worst);
    }
    assert!((res[0] / res[1] - 4.0).abs() < 1.2, "{res:?}");
}

#[test]
fn blow_up_is_reported() {
    let l = lat(16);
    let ph = Physics::default();
    let s0 = state(&l, 10, 1e140, ph);
    let run = run_to(&s0, &Forcing::None, 0.5, 4.0);
    assert!(run.blow_up.is_some());
    assert!(run.last.is_finite());
}
