use num_complex::Complex64;
use proptest::prelude::*;
use ptkr::propagator::floquet_step;
use ptkr::{BasisSpec, Direction, ModelParams, Propagator, WaveState};

fn random_state(basis: BasisSpec, parts: &[(f64, f64)]) -> WaveState {
    let amps = parts.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
    WaveState::from_momentum(basis, amps).unwrap()
}

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (0.1f64..4.0, 0.0f64..0.4, 0.3f64..2.0)
        .prop_map(|(k, l, h)| ModelParams::new(k, l, h).unwrap())
}

fn amps(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // <u|U v> = <U^dagger u|v> for the non-unitary Floquet operator.
    #[test]
    fn adjoint_is_the_hermitian_conjugate(params in params_strategy(), u in amps(32), v in amps(32)) {
        let basis = BasisSpec::new(32, params.hbar_eff).unwrap();
        let prop = Propagator::new(params, basis).unwrap().with_tail_limit(None);
        let u = random_state(basis, &u);
        let v = random_state(basis, &v);
        let mut uv = v.clone();
        prop.step(&mut uv, Direction::Forward, 1).unwrap();
        let mut adj_u = u.clone();
        prop.step(&mut adj_u, Direction::Adjoint, 1).unwrap();
        let lhs = u.inner(&uv);
        let rhs = adj_u.inner(&v);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn step_is_linear_in_scale(params in params_strategy(), v in amps(16), c in 0.1f64..10.0) {
        let basis = BasisSpec::new(16, params.hbar_eff).unwrap();
        let prop = Propagator::new(params, basis).unwrap().with_tail_limit(None);
        let v = random_state(basis, &v);
        let mut a = v.clone();
        a.scale(c);
        prop.step(&mut a, Direction::Forward, 1).unwrap();
        let mut b = v.clone();
        prop.step(&mut b, Direction::Forward, 1).unwrap();
        b.scale(c);
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            prop_assert!((x - y).norm() <= 1e-12 * (1.0 + y.norm()));
        }
    }

    #[test]
    fn hermitian_step_preserves_norm(k in 0.1f64..8.0, h in 0.2f64..2.0, v in amps(64)) {
        let params = ModelParams::new(k, 0.0, h).unwrap();
        let basis = BasisSpec::new(64, h).unwrap();
        let prop = Propagator::new(params, basis).unwrap().with_tail_limit(None);
        let mut s = random_state(basis, &v);
        let before = s.norm_sqr();
        prop.evolve(&mut s, Direction::Forward, 5).unwrap();
        prop_assert!((s.norm_sqr() / before - 1.0).abs() < 1e-12);
    }
}

#[test]
fn short_hermitian_round_trip() {
    let params = ModelParams::new(6.0, 0.0, 0.3).unwrap();
    let basis = BasisSpec::new(8192, 0.3).unwrap();
    let prop = Propagator::new(params, basis).unwrap();
    let psi0 = WaveState::gaussian(basis, 10.0).unwrap();
    let mut psi = psi0.clone();
    prop.evolve(&mut psi, Direction::Forward, 50).unwrap();
    prop.evolve(&mut psi, Direction::Adjoint, 50).unwrap();
    assert!((psi.inner(&psi0).norm() - 1.0).abs() < 1e-9);
}

#[test]
fn free_function_step_matches_propagator() {
    let params = ModelParams::new(5.0, 0.15, 1.0).unwrap();
    let basis = BasisSpec::new(1024, 1.0).unwrap();
    let psi = WaveState::gaussian(basis, 10.0).unwrap();
    let via_fn = floquet_step(&psi, &params, Direction::Forward).unwrap();
    let mut via_prop = psi.clone();
    Propagator::new(params, basis)
        .unwrap()
        .step(&mut via_prop, Direction::Forward, 1)
        .unwrap();
    assert_eq!(via_fn.in_momentum().amplitudes(), via_prop.amplitudes());
}

#[test]
fn gain_breaks_norm_conservation() {
    let params = ModelParams::new(5.0, 0.3, 1.0).unwrap();
    let basis = BasisSpec::new(4096, 1.0).unwrap();
    let prop = Propagator::new(params, basis).unwrap();
    let mut psi = WaveState::gaussian(basis, 10.0).unwrap();
    prop.step(&mut psi, Direction::Forward, 1).unwrap();
    let grown = psi.norm_sqr();
    assert!(grown > 1.0);
    // The gain factor is bounded by exp(2 K lambda / hbar) per kick.
    assert!(grown <= (2.0 * 5.0 * 0.3f64).exp());
}

#[test]
fn remote_modes_stay_empty_with_gain() {
    let params = ModelParams::new(6.0, 0.022, 0.3).unwrap();
    let basis = BasisSpec::new(1 << 16, 0.3).unwrap();
    let far = |s: &WaveState| {
        s.momentum_profile()
            .iter()
            .filter(|(p, _)| p.abs() > 3000.0)
            .map(|q| q.1)
            .sum::<f64>()
    };
    let mut phi = WaveState::gaussian(basis, 10.0).unwrap().apply_p().unwrap();
    assert_eq!(far(&phi), 0.0);
    let prop = Propagator::new(params, basis).unwrap();
    let mut raw = phi.clone();
    let unfloored = Propagator::new(params, basis).unwrap().with_roundoff_floor(None);
    for k in 1..=200 {
        prop.step(&mut phi, Direction::Forward, k).unwrap();
        unfloored.step(&mut raw, Direction::Forward, k).unwrap();
        phi.scale(phi.norm_sqr().sqrt().recip());
        raw.scale(raw.norm_sqr().sqrt().recip());
    }
    assert_eq!(far(&phi), 0.0);
    assert!(far(&raw) > 0.0);
    assert!((phi.moments().mean_p2 / raw.moments().mean_p2 - 1.0).abs() < 1e-12);
}
