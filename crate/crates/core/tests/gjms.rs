use std::time::Instant;

use ambient_exact::{rat, rat_int, RatFn, RhoJet};
use ambient_gjms::ambient_geometry::{
    lichnerowicz, mul_r, random_ambient, restrict_g, AmbientTensor, NormalFormAmbient,
};
use ambient_gjms::chart_geometry::{flat_tt, laplacian, space_form_metric, trace_free, ChartMetric, SpaceForm};
use ambient_gjms::gjms_core::*;
use ambient_gjms::{GeometryError, Symmetry, TensorField};
use rand::{Rng, SeedableRng};

fn sphere(n: usize) -> SpaceForm {
    space_form_metric(n, &rat_int(1)).unwrap()
}

fn random_trace_free(n: usize, seed: u64, degree: u32) -> TensorField {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let raw = TensorField::from_fn(n, 0, 2, Symmetry::pair(0, 1), |_| {
        let mut acc = RatFn::from_int(rng.gen_range(-2..=2));
        for _ in 0..2 {
            let mut m = RatFn::from_int(rng.gen_range(-2..=2));
            for _ in 0..rng.gen_range(1..=degree) {
                m = m.mul(&RatFn::x(rng.gen_range(1..=n)));
            }
            acc = acc.add(&m);
        }
        acc
    });
    trace_free(&ChartMetric::flat(n), &raw).unwrap()
}

#[test]
fn h_eigenvalue_example() {
    assert_eq!(h_eigenvalue(4, &rat_int(2)), rat_int(3));
    let amb = NormalFormAmbient::flat(4, 3).unwrap();
    let zero = AmbientTensor::zeros(4, 0, 2, rat_int(1), Symmetry::pair(0, 1));
    let s = SL2State::new(&amb, zero).unwrap();
    let x = s.apply(Sl2Op::X).unwrap();
    assert!(x.tensor.is_zero());
    assert_eq!(*x.weight(), rat_int(3));
}

#[test]
fn sl2_relations_flat_and_einstein() {
    let start = Instant::now();
    for amb in [NormalFormAmbient::flat(3, 10).unwrap(), NormalFormAmbient::from_space_form(&sphere(3), 10).unwrap()] {
        let cfg = Sl2CheckConfig { weights: vec![rat(-1, 2), rat_int(2)], trials: 2, max_m: 3, order: 8, seed: 3 };
        for c in sl2_commutator_check(&amb, &cfg).unwrap() {
            assert!(c.holds, "{}: {:?}", c.name, c.witness);
        }
    }
    eprintln!("sl2 checks: {:?}", start.elapsed());
}

#[test]
fn lift_of_constant_tt_on_flat_space_adds_nothing() {
    let phi = TensorField::from_fn(4, 0, 2, Symmetry::pair(0, 1), |i| match (i[0], i[1]) {
        (0, 1) | (1, 0) => RatFn::one(),
        (2, 2) => RatFn::from_int(3),
        (3, 3) => RatFn::from_int(-3),
        _ => RatFn::zero(),
    });
    let amb = NormalFormAmbient::flat(4, 6).unwrap();
    let lift = ambient_lift(&amb, &phi, 2, LiftOptions::default()).unwrap();
    assert!(lift.is_certified());
    assert_eq!(lift.orders.divergence, RhoJet::EXACT);
    assert_eq!(lift.orders.trace, RhoJet::EXACT);
    for i in 1..=4 {
        for j in 1..=4 {
            assert!(lift.sigma.get(&[i, j]).equals_through(&RhoJet::constant(phi.get(&[i - 1, j - 1]).clone())));
        }
    }
}

#[test]
fn lift_of_einstein_tt_is_already_tt() {
    let s = sphere(3);
    let chi = flat_tt(3, 1, 4).unwrap();
    let phi = s.transplant_tt(&chi).unwrap();
    let k = 1;
    let amb = NormalFormAmbient::from_space_form(&s, 6).unwrap();
    // sigma_(0) = (1 + lambda rho)^w phi with w = -n/2 + 2 + k is TT already.
    let w = lift_weight(3, k);
    let factor = RhoJet::binomial(&s.lambda, &w, 6);
    let seed = AmbientTensor::from_fn(3, 0, 2, w, Symmetry::pair(0, 1), |i| {
        if i[0] >= 1 && i[0] <= 3 && i[1] >= 1 && i[1] <= 3 {
            factor.scale(phi.get(&[i[0] - 1, i[1] - 1]))
        } else {
            RhoJet::zero(RhoJet::EXACT)
        }
    });
    let lift = lift_from_seed(&amb, &phi, k, seed.clone(), LiftChoice::Canonical).unwrap();
    assert!(lift.is_certified());
    assert!(lift.sigma.equals_through(&seed), "{:?}", lift.sigma.first_difference(&seed));
    let canonical = ambient_lift(&amb, &phi, k, LiftOptions::default()).unwrap();
    assert!(canonical.phi_tilde.equals_through(&lift.phi_tilde));
    assert!(lift.sigma.get(&[1, 4]).is_zero());
}

#[test]
fn lift_is_unique_on_g() {
    let start = Instant::now();
    for (n, k) in [(3usize, 1usize), (4, 1), (4, 2)] {
        let phi = random_trace_free(n, 10 + n as u64, 2);
        let amb = NormalFormAmbient::flat(n, 8).unwrap();
        let reference = ambient_lift(&amb, &phi, k, LiftOptions::default()).unwrap();
        assert!(reference.is_certified(), "{:?}", reference.certificates);
        assert!(reference.orders.divergence >= lift_target(n, k));
        assert!(reference.steps >= 1);
        for seed in [LiftChoice::Canonical, LiftChoice::Perturbed(1), LiftChoice::Perturbed(2)] {
            for completion in [LiftChoice::Canonical, LiftChoice::Perturbed(7)] {
                let l = ambient_lift(&amb, &phi, k, LiftOptions { seed, completion }).unwrap();
                assert!(l.is_certified(), "{seed:?} {completion:?}: {:?}", l.certificates);
                assert!(l.phi_tilde.equals_through(&reference.phi_tilde), "n = {n}, k = {k}, {seed:?}, {completion:?}");
            }
        }
        let perturbed = ambient_lift(&amb, &phi, k, LiftOptions { seed: LiftChoice::Perturbed(1), completion: LiftChoice::Canonical }).unwrap();
        assert!(!perturbed.sigma.equals_through(&reference.sigma));
    }
    eprintln!("lift uniqueness: {:?}", start.elapsed());
}

#[test]
fn lift_rejects_trace() {
    let amb = NormalFormAmbient::flat(3, 4).unwrap();
    let phi = TensorField::from_fn(3, 0, 2, Symmetry::pair(0, 1), |i| if i[0] == i[1] { RatFn::one() } else { RatFn::zero() });
    assert!(matches!(ambient_lift(&amb, &phi, 1, LiftOptions::default()), Err(GeometryError::NotTraceFree { .. })));
    assert!(matches!(ambient_lift(&NormalFormAmbient::flat(4, 4).unwrap(), &random_trace_free(4, 1, 1), 3, LiftOptions::default()), Err(GeometryError::Range(_))));
}

#[test]
fn coefficient_identity_for_powers_of_r() {
    let amb = NormalFormAmbient::from_space_form(&sphere(3), 8).unwrap();
    for (m, k) in [(1usize, 2usize), (2, 3), (1, 1)] {
        let w = lift_weight(3, k) - rat_int(2 * m as i64);
        let s1 = random_ambient(3, 2, w, 7, true, m as u64 + 10 * k as u64);
        let lhs = lichnerowicz(&amb, &mul_r(&s1, m)).unwrap();
        let c = rat_int(4 * m as i64 * (m as i64 - k as i64));
        let rhs = mul_r(&s1, m - 1).with_weight(lhs.weight().clone()).scale_rat(&c).add(&mul_r(&lichnerowicz(&amb, &s1).unwrap(), m)).unwrap();
        assert!(lhs.equals_through(&rhs), "m = {m}, k = {k}: {:?}", lhs.first_difference(&rhs));
    }
}

fn base_laplacian_power(phi: &TensorField, k: usize) -> TensorField {
    let g = ChartMetric::flat(phi.dim());
    (0..k).fold(phi.clone(), |acc, _| laplacian(&g, &acc).unwrap())
}

#[test]
fn flat_critical_operator_is_laplacian_squared() {
    let start = Instant::now();
    let phi = flat_tt(4, 2, 5).unwrap();
    let amb = NormalFormAmbient::flat(4, required_order(4, 2)).unwrap();
    let p = gjms_pk(&amb, &phi, 2).unwrap();
    assert!(p.routes_agree);
    assert!(p.lift.is_certified());
    assert!(p.trace_free_applied);
    assert_eq!(p.value.weight, rat_int(-2));
    assert!(p.value.tensor.equals(&base_laplacian_power(&phi, 2)));
    assert!(p.output_certificates.iter().all(|c| c.holds));
    let constant = TensorField::from_fn(4, 0, 2, Symmetry::pair(0, 1), |i| if i == [0, 1] || i == [1, 0] { RatFn::one() } else { RatFn::zero() });
    assert!(gjms_pk(&amb, &constant, 2).unwrap().value.tensor.is_zero());
    eprintln!("flat P_2: {:?}", start.elapsed());
}

#[test]
fn p1_on_flat_space_is_laplacian() {
    for n in [3usize, 4] {
        let phi = flat_tt(n, 3, 2).unwrap();
        let amb = NormalFormAmbient::flat(n, required_order(n, 1)).unwrap();
        let p = gjms_pk(&amb, &phi, 1).unwrap();
        assert!(p.routes_agree);
        assert!(p.value.tensor.equals(&base_laplacian_power(&phi, 1)));
    }
}

#[test]
fn obstruction_constant_identity() {
    for k in [1usize, 2] {
        for amb in [NormalFormAmbient::flat(4, required_order(4, k)).unwrap(), NormalFormAmbient::from_space_form(&sphere(4), required_order(4, k)).unwrap()] {
            let phi = random_trace_free(4, 3 + k as u64, 2);
            let lift = ambient_lift(&amb, &phi, k, LiftOptions::default()).unwrap();
            let ext = harmonic_extend(&amb, &lift, k).unwrap();
            let direct = restrict_g(&lichnerowicz_power(&amb, &ext.sigma, k).unwrap());
            let scaled = ext.obstruction.scale_rat(&obstruction_constant(k));
            assert!(direct.order() >= 1);
            assert!(direct.equals_through(&scaled), "k = {k}");
        }
    }
}

#[test]
fn extension_independence() {
    let n = 4;
    let k = 2;
    let amb = NormalFormAmbient::flat(n, required_order(n, k)).unwrap();
    let phi = random_trace_free(n, 21, 2);
    let lift = ambient_lift(&amb, &phi, k, LiftOptions::default()).unwrap();
    let base = restrict_g(&lichnerowicz_power(&amb, &lift.sigma, k).unwrap());
    for s in 0..2 {
        let tau = random_ambient(n, 2, lift_weight(n, k) - rat_int(2), 6, true, 100 + s);
        let other = lift.sigma.add(&mul_r(&tau, 1)).unwrap();
        let top = restrict_g(&lichnerowicz_power(&amb, &other, k).unwrap());
        assert!(top.equals_through(&base));
        assert!(restrict_g(&lichnerowicz_power(&amb, &mul_r(&tau, 1), k).unwrap()).is_zero());
    }
}
