use std::time::Instant;

use ambient_exact::{rat, rat_int, RatFn};
use ambient_gjms::ambient_geometry::NormalFormAmbient;
use ambient_gjms::chart_geometry::{flat_tt, laplacian, linearized_bach_flat, ChartMetric};
use ambient_gjms::gjms_core::*;
use ambient_gjms::{GeometryError, Symmetry, TensorField};

fn laplacian_squared(phi: &TensorField) -> TensorField {
    let g = ChartMetric::flat(phi.dim());
    laplacian(&g, &laplacian(&g, phi).unwrap()).unwrap()
}

#[test]
fn normalization_constants() {
    assert_eq!(obstruction_normalization(4), rat_int(-2));
    assert_eq!(obstruction_normalization(6), rat_int(16));
    assert_eq!(obstruction_gjms_factor(4), rat(-1, 4));
    assert_eq!(obstruction_gjms_factor(6), rat(1, 8));
}

#[test]
fn constant_tt_has_no_obstruction_variation() {
    let phi = TensorField::from_fn(4, 0, 2, Symmetry::pair(0, 1), |i| match (i[0], i[1]) {
        (0, 2) | (2, 0) => RatFn::one(),
        (1, 1) => RatFn::from_int(2),
        (3, 3) => RatFn::from_int(-2),
        _ => RatFn::zero(),
    });
    let amb = NormalFormAmbient::flat(4, 8).unwrap();
    let o = obstruction_linearization_flat(&amb, &phi).unwrap();
    assert!(o.is_certified());
    assert!(o.value.tensor.is_zero());
}

#[test]
fn quartic_tt_gives_minus_quarter_laplacian_squared() {
    let start = Instant::now();
    let amb = NormalFormAmbient::flat(4, 8).unwrap();
    for seed in [1u64, 2] {
        let phi = flat_tt(4, 4, seed).unwrap();
        let o = obstruction_linearization_flat(&amb, &phi).unwrap();
        for c in &o.certificates {
            assert!(c.verdict.holds, "{}: {:?}", c.name, c.verdict.witness);
        }
        let expected = laplacian_squared(&phi).map(|c| c.scale(&rat(-1, 4)).reduce());
        assert!(o.value.tensor.equals(&expected), "seed {seed}");
        assert!(o.p_phi.equals(&laplacian_squared(&phi)));
        let p = gjms_pk(&NormalFormAmbient::flat(4, required_order(4, 2)).unwrap(), &phi, 2).unwrap();
        assert!(o.matches_gjms(&p.value.tensor));
    }
    eprintln!("obstruction linearisation: {:?}", start.elapsed());
}

#[test]
fn bach_oracle_agrees() {
    let amb = NormalFormAmbient::flat(4, 8).unwrap();
    for seed in [3u64, 4] {
        let phi = flat_tt(4, 4, seed).unwrap();
        let o = obstruction_linearization_flat(&amb, &phi).unwrap();
        let b = linearized_bach_flat(&phi).unwrap();
        // in dimension four the obstruction tensor is the Bach tensor itself
        assert!(b.first_nonzero().is_some());
        assert!(o.value.tensor.equals(&b));
    }
}

#[test]
fn rejects_non_tt_and_curved_backgrounds() {
    let amb = NormalFormAmbient::flat(4, 8).unwrap();
    let phi = TensorField::from_fn(4, 0, 2, Symmetry::pair(0, 1), |i| if i == [0, 1] || i == [1, 0] { RatFn::x(1) } else { RatFn::zero() });
    assert!(matches!(obstruction_linearization_flat(&amb, &phi), Err(GeometryError::NotTT { .. })));
    let odd = NormalFormAmbient::flat(3, 8).unwrap();
    assert!(matches!(obstruction_linearization_flat(&odd, &flat_tt(3, 1, 1).unwrap()), Err(GeometryError::Range(_))));
}
