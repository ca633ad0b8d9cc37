use ambient_exact::{rat, rat_int, Rat, RatFn, NUM_SLOTS};
use ambient_gjms::chart_geometry::*;
use ambient_gjms::{Symmetry, TensorField};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};

fn sphere(n: usize) -> SpaceForm {
    space_form_metric(n, &rat_int(1)).unwrap()
}

fn random_poly(rng: &mut impl Rng, n: usize, degree: u32) -> RatFn {
    let mut acc = RatFn::zero();
    for _ in 0..4 {
        let mut m = RatFn::from_int(rng.gen_range(-3..=3));
        for _ in 0..rng.gen_range(0..=degree) {
            m = m.mul(&RatFn::x(rng.gen_range(1..=n)));
        }
        acc = acc.add(&m);
    }
    acc
}

fn random_sym(rng: &mut impl Rng, n: usize, degree: u32) -> TensorField {
    TensorField::from_fn(n, 0, 2, Symmetry::pair(0, 1), |_| random_poly(rng, n, degree))
}

fn random_form(rng: &mut impl Rng, n: usize, degree: u32) -> TensorField {
    TensorField::from_fn(n, 0, 1, Symmetry::none(), |_| random_poly(rng, n, degree))
}

#[test]
fn flat_metric_has_no_connection_or_curvature() {
    let g = ChartMetric::flat(4);
    assert!(g.christoffel().is_zero());
    let c = g.curvature();
    assert!(c.riemann.is_zero() && c.ricci.is_zero() && c.scalar.is_zero());
    assert!(weyl(&g).unwrap().is_zero());
}

#[test]
fn polar_type_metric_christoffels() {
    let x1 = RatFn::x(1);
    let m = vec![vec![RatFn::one(), RatFn::zero()], vec![RatFn::zero(), x1.mul(&x1)]];
    let g = ChartMetric::new(m, vec![rat_int(1), rat_int(0)]).unwrap();
    let gam = g.christoffel();
    assert_eq!(gam.at(&[0, 1, 1]), x1.neg());
    assert_eq!(gam.at(&[1, 0, 1]), x1.inv().unwrap());
    assert_eq!(gam.at(&[1, 1, 0]), x1.inv().unwrap());
    assert!(metric_is_parallel(&g));
    assert!(g.curvature().riemann.is_zero());
    assert!(schouten(&g).is_err());
}

#[test]
fn unit_sphere_sign_convention() {
    for n in [3, 4] {
        let s = sphere(n);
        let g = &s.metric;
        let c = g.curvature();
        // R_abcd = g_ac g_bd - g_ad g_bc
        let expected = TensorField::from_fn(n, 0, 4, Symmetry::none(), |i| {
            g.g(i[0], i[2]).mul(g.g(i[1], i[3])).sub(&g.g(i[0], i[3]).mul(g.g(i[1], i[2])))
        });
        assert!(c.riemann.equals(&expected));
        assert!(c.ricci.equals(&g.metric().scale(&RatFn::from_int(n as i64 - 1))));
        let p = schouten(g).unwrap();
        assert!(p.equals(&g.metric().scale(&RatFn::from_rat(rat(1, 2)))));
        assert!(weyl(g).unwrap().is_zero());
        assert!(riemann_symmetries_hold(g));
        assert!(metric_is_parallel(g));
    }
}

#[test]
fn space_form_certificates() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for n in [3usize, 4, 5] {
        for _ in 0..5 {
            let c = rat(rng.gen_range(-5..=5), rng.gen_range(1..=4));
            let s = space_form_metric(n, &c).unwrap();
            let cert = einstein_certificate(&s.metric).unwrap();
            assert!(cert.is_valid(), "n={n} c={c}");
            assert_eq!(cert.lambda, RatFn::from_rat(&c / rat_int(2)));
            assert_eq!(cert.lambda, s.lambda);
        }
    }
    let s = space_form_metric(3, &rat_int(-2)).unwrap();
    assert_eq!(einstein_certificate(&s.metric).unwrap().lambda, RatFn::from_int(-1));
    let s = space_form_metric(4, &rat_int(1)).unwrap();
    assert_eq!(s.lambda, RatFn::from_rat(rat(1, 2)));
}

#[test]
fn symbolic_space_form_is_einstein_and_conformally_flat() {
    for n in [3, 4] {
        let s = space_form_symbolic(n).unwrap();
        let cert = einstein_certificate(&s.metric).unwrap();
        assert!(cert.is_valid());
        assert_eq!(cert.lambda, RatFn::lambda());
        assert!(weyl(&s.metric).unwrap().is_zero());
    }
}

#[test]
fn weyl_is_totally_trace_free_and_riemann_symmetric() {
    let x = |i| RatFn::x(i);
    // A non-conformally-flat diagonal metric.
    let a = RatFn::one().add(&x(1).mul(&x(2)));
    let b = RatFn::from_int(2).add(&x(3).mul(&x(3)));
    let m = vec![
        vec![a.clone(), RatFn::zero(), RatFn::zero(), RatFn::zero()],
        vec![RatFn::zero(), b.clone(), RatFn::zero(), RatFn::zero()],
        vec![RatFn::zero(), RatFn::zero(), RatFn::one(), x(1).scale_int(1).mul(&RatFn::from_rat(rat(1, 3)))],
        vec![RatFn::zero(), RatFn::zero(), x(1).mul(&RatFn::from_rat(rat(1, 3))), RatFn::one()],
    ];
    let g = ChartMetric::new(m, vec![Rat::zero(); 4]).unwrap();
    assert!(riemann_symmetries_hold(&g));
    assert!(metric_is_parallel(&g));
    let w = weyl(&g).unwrap();
    assert!(!w.is_zero());
    for (_, tr) in all_traces(&g, w).unwrap() {
        assert!(tr.is_zero());
    }
}

fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap()
}

#[test]
fn christoffel_matches_central_differences() {
    let s = sphere(3);
    let g = &s.metric;
    let n = 3;
    let points = [[rat(1, 3), rat(-1, 2), rat(1, 5)], [rat(0, 1), rat(2, 3), rat(-1, 7)], [rat(3, 4), rat(1, 4), rat(1, 2)]];
    let eval = |f: &RatFn, p: &[f64]| -> f64 {
        let mut v: [Rat; NUM_SLOTS] = Default::default();
        for (i, x) in p.iter().enumerate() {
            v[i] = Rat::from_float(*x).unwrap();
        }
        to_f64(&f.eval(&v).unwrap())
    };
    let h = 1e-5;
    for p in &points {
        let pf: Vec<f64> = p.iter().map(to_f64).collect();
        let dg = |l: usize, i: usize, j: usize| {
            let mut a = pf.clone();
            let mut b = pf.clone();
            a[l] += h;
            b[l] -= h;
            (eval(g.g(i, j), &a) - eval(g.g(i, j), &b)) / (2.0 * h)
        };
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut num = 0.0;
                    for l in 0..n {
                        num += 0.5 * eval(g.ginv(k, l), &pf) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                    }
                    let exact = eval(g.christoffel().get(&[k, i, j]), &pf);
                    assert!((num - exact).abs() < 1e-8, "Gamma^{k}_{i}{j} at {pf:?}: {num} vs {exact}");
                }
            }
        }
    }
}

#[test]
fn lichnerowicz_on_space_forms() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let s = sphere(3);
    let g = &s.metric;
    let sigma = random_sym(&mut rng, 3, 2);
    let direct = lichnerowicz(g, &sigma).unwrap();
    let einstein = lichnerowicz_einstein(g, &s.lambda, &sigma).unwrap();
    assert!(direct.equals(&einstein));
    // On trace-free input the curvature terms reduce to 12 lambda = 6.
    let tf = trace_free(g, &sigma).unwrap();
    let lhs = lichnerowicz(g, &tf).unwrap();
    let rhs = laplacian(g, &tf).unwrap().add(&tf.scale(&RatFn::from_int(6))).unwrap();
    assert!(lhs.equals(&rhs));
}

#[test]
fn lichnerowicz_is_plain_laplacian_when_flat() {
    let g = ChartMetric::flat(3);
    let x1 = RatFn::x(1);
    let sigma = trace_free(&g, &g.metric().scale(&x1.mul(&x1))).unwrap();
    let lhs = lichnerowicz(&g, &sigma).unwrap();
    // -sum_k d_k d_k sigma
    let expected = sigma.map(|c| (0..3).fold(RatFn::zero(), |acc, k| acc.sub(&c.derivative(k).derivative(k))));
    assert!(lhs.equals(&expected));
}

#[test]
fn lichnerowicz_rejects_non_symmetric_input() {
    let g = ChartMetric::flat(3);
    let mut t = TensorField::zeros(3, 0, 2, Symmetry::none());
    t.set(&[0, 1], RatFn::one());
    assert!(lichnerowicz(&g, &t).is_err());
    assert!(lichnerowicz(&g, &TensorField::zeros(3, 0, 1, Symmetry::none())).is_err());
}

#[test]
fn first_order_operators() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let flat = ChartMetric::flat(3);
    let constant = TensorField::from_fn(3, 0, 1, Symmetry::none(), |i| RatFn::from_int(i[0] as i64 + 1));
    assert!(killing(&flat, &constant).unwrap().is_zero());
    for g in [flat.clone(), sphere(3).metric] {
        assert!(divergence(&g, g.metric()).unwrap().is_zero());
        let sigma = random_sym(&mut rng, 3, 2);
        assert!(trace(&g, &trace_free(&g, &sigma).unwrap()).unwrap().is_zero());
        // delta K xi = Delta xi + d delta xi - Ric xi
        let xi = random_form(&mut rng, 3, 2);
        let lhs = divergence(&g, &killing(&g, &xi).unwrap()).unwrap();
        let dx = divergence(&g, &xi).unwrap().at(&[]);
        let ddx = TensorField::from_fn(3, 0, 1, Symmetry::none(), |i| dx.derivative(i[0]));
        let rhs = laplacian(&g, &xi).unwrap().add(&ddx).unwrap().sub(&ricci_action_form(&g, &xi).unwrap()).unwrap();
        assert!(lhs.equals(&rhs));
        // Bochner: Delta_H = Delta + Ric
        let bochner = laplacian(&g, &xi).unwrap().add(&ricci_action_form(&g, &xi).unwrap()).unwrap();
        assert!(hodge_laplacian(&g, &xi).unwrap().equals(&bochner));
    }
}

#[test]
fn tt_checks() {
    let g = ChartMetric::flat(3);
    let c = TensorField::sym2(
        3,
        &[
            vec![RatFn::from_int(1), RatFn::from_int(2), RatFn::zero()],
            vec![RatFn::from_int(2), RatFn::from_int(-3), RatFn::from_int(1)],
            vec![RatFn::zero(), RatFn::from_int(1), RatFn::from_int(2)],
        ],
    );
    assert!(is_tt(&g, &c).unwrap().is_yes());
    match is_tt(&g, g.metric()).unwrap() {
        TtVerdict::No { trace, .. } => assert_eq!(trace, RatFn::from_int(3)),
        TtVerdict::Yes => panic!("g is not trace-free"),
    }
    let x = |i| RatFn::x(i);
    let xi = TensorField::from_fn(3, 0, 1, Symmetry::none(), |i| x(i[0] + 1).mul(&x(i[0] + 1)));
    match is_tt(&g, &killing(&g, &xi).unwrap()).unwrap() {
        TtVerdict::No { divergence, .. } => assert!(divergence.is_some()),
        TtVerdict::Yes => panic!("non-Killing field gives a non-TT tensor"),
    }
}

#[test]
fn tt_jet_construction() {
    let flat = ChartMetric::flat(3);
    let jet = tt_jet_construct(&flat, 0, 1).unwrap();
    assert!(is_tt(&flat, &jet.phi).unwrap().is_yes());
    let jet = tt_jet_construct(&flat, 2, 1).unwrap();
    assert!(is_tt(&flat, &jet.phi).unwrap().is_yes());
    assert!(!jet.phi.is_zero());
    let again = tt_jet_construct(&flat, 2, 1).unwrap();
    assert!(again.phi.equals(&jet.phi));

    let s = sphere(3);
    let jet = tt_jet_construct(&s.metric, 4, 2).unwrap();
    assert!(trace(&s.metric, &jet.phi).unwrap().is_zero());
    let order = jet.divergence_order.unwrap_or(u32::MAX);
    assert!(order >= 3, "divergence order {order}");
}

#[test]
fn transplanted_flat_tt_is_tt_on_space_forms() {
    for n in [3, 4] {
        let chi = flat_tt(n, 2, 9).unwrap();
        for s in [sphere(n), space_form_metric(n, &rat(-2, 3)).unwrap(), space_form_symbolic(n).unwrap()] {
            let psi = s.transplant_tt(&chi).unwrap();
            assert!(is_tt(&s.metric, &psi).unwrap().is_yes());
        }
    }
}

#[test]
fn metric_document_round_trip() {
    let s = sphere(3);
    let doc = s.metric.to_document();
    let back = TensorField::from_document(&doc).unwrap();
    assert!(back.equals(s.metric.metric()));
    assert_eq!(doc.signature, Some((3, 0)));
}

#[test]
fn degenerate_metrics_are_rejected() {
    let m = vec![vec![RatFn::x(1), RatFn::zero()], vec![RatFn::zero(), RatFn::one()]];
    assert!(ChartMetric::new(m.clone(), vec![rat_int(0), rat_int(0)]).is_err());
    let ok = ChartMetric::new(m, vec![rat_int(1), rat_int(0)]).unwrap();
    assert_eq!(ok.signature(), (2, 0));
    let lorentz = vec![vec![RatFn::zero(), RatFn::one()], vec![RatFn::one(), RatFn::zero()]];
    assert_eq!(ChartMetric::new(lorentz, vec![rat_int(0), rat_int(0)]).unwrap().signature(), (1, 1));
}
