use monolab_core::pl1d::Ray;
use monolab_core::*;
use proptest::prelude::*;

fn point(d: usize) -> impl Strategy<Value = Point> {
    prop::collection::vec(-10.0..10.0f64, d).prop_map(Point::new).prop_map(Result::unwrap)
}

/// `B Bᵀ + (C - Cᵀ)`, monotone by construction.
fn monotone_matrix(d: usize) -> impl Strategy<Value = Matrix> {
    (prop::collection::vec(-2.0..2.0f64, d * d), prop::collection::vec(-2.0..2.0f64, d * d)).prop_map(
        move |(b, c)| {
            let b = Matrix::from_vec(d, d, b);
            let c = Matrix::from_vec(d, d, c);
            &b * b.transpose() + &c - c.transpose()
        },
    )
}

fn ray() -> impl Strategy<Value = Ray> {
    prop_oneof![
        3 => (0.0..3.0f64).prop_map(Ray::Slope),
        1 => Just(Ray::Slope(0.0)),
        1 => Just(Ray::Vertical),
    ]
}

fn finite_ray() -> impl Strategy<Value = Ray> {
    prop_oneof![3 => (0.0..3.0f64).prop_map(Ray::Slope), 1 => Just(Ray::Slope(0.0))]
}

fn graph_with<S: Strategy<Value = Ray>>(rays: fn() -> S) -> impl Strategy<Value = Pl1dGraph> {
    (
        -3.0..3.0f64,
        -3.0..3.0f64,
        prop::collection::vec((0u8..3, 0.05..2.0f64, 0.05..2.0f64), 0..5),
        rays(),
        rays(),
    )
        .prop_map(|(x0, y0, steps, left, right)| {
            let mut v = vec![(x0, y0)];
            for (kind, dx, dy) in steps {
                let (x, y) = *v.last().unwrap();
                v.push(match kind {
                    0 => (x + dx, y),
                    1 => (x, y + dy),
                    _ => (x + dx, y + dy),
                });
            }
            Pl1dGraph::new(v, left, right).unwrap()
        })
}

fn graph() -> impl Strategy<Value = Pl1dGraph> {
    graph_with(ray)
}

fn full_domain_graph() -> impl Strategy<Value = Pl1dGraph> {
    graph_with(finite_ray)
}

/// Affine, separable, shifted and scaled handles of dimension `d`.
fn handle(d: usize) -> impl Strategy<Value = OperatorHandle> {
    let affine = (monotone_matrix(d), point(d)).prop_map(|(m, b)| OperatorHandle::affine(m, b).unwrap());
    let separable = prop::collection::vec(graph(), d).prop_map(|g| OperatorHandle::separable(g).unwrap());
    let base = prop_oneof![affine, separable];
    (base, point(d), 0.1..5.0f64, 0u8..3).prop_map(|(op, z, f, wrap)| match wrap {
        0 => op,
        1 => op.shift(&z).unwrap(),
        _ => op.scale(f).unwrap(),
    })
}

fn gamma() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.1), Just(1.0), Just(10.0), 0.05..20.0f64]
}

fn case() -> impl Strategy<Value = (OperatorHandle, Point, Point, f64)> {
    (1usize..4).prop_flat_map(|d| (handle(d), point(d), point(d), gamma()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn resolvent_is_nonexpansive((op, y, y2, g) in case()) {
        let a = op.resolvent(g, &y).unwrap();
        let b = op.resolvent(g, &y2).unwrap();
        prop_assert!(a.distance(&b) <= y.distance(&y2) + 1e-8);
    }

    #[test]
    fn yosida_is_lipschitz((op, x, x2, g) in case()) {
        let a = op.yosida(g, &x).unwrap();
        let b = op.yosida(g, &x2).unwrap();
        prop_assert!(a.distance(&b) <= x.distance(&x2) / g + 1e-8);
    }

    #[test]
    fn yosida_below_least_norm((op, y, _y2, g) in case()) {
        // J(y) always lies in the domain
        let x = op.resolvent(1.0, &y).unwrap();
        let least = op.least_norm_element(&x).unwrap();
        for gamma in [0.1, 1.0, 10.0, g] {
            let yos = op.yosida(gamma, &x).unwrap();
            prop_assert!(yos.norm() <= least.norm() + 1e-10 * (1.0 + least.norm()),
                "γ={gamma}: {} > {}", yos.norm(), least.norm());
        }
    }

    #[test]
    fn shift_identity((op, y, z, g) in case()) {
        let shifted = op.shift(&z).unwrap();
        let lhs = shifted.resolvent(g, &y).unwrap();
        let rhs = op.resolvent(g, &y.axpy(g, &z)).unwrap();
        prop_assert!(lhs.distance(&rhs) <= 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn zero_shift_changes_nothing((op, y, _z, g) in case()) {
        let shifted = op.shift(&Point::zeros(y.dim())).unwrap();
        prop_assert_eq!(shifted.resolvent(g, &y).unwrap(), op.resolvent(g, &y).unwrap());
    }

    #[test]
    fn sampled_graph_is_monotone((op, y, y2, g) in case()) {
        let mut pairs = Vec::new();
        for t in [-1.0, -0.3, 0.0, 0.5, 1.0, 2.0] {
            let probe = y.axpy(t, &y2.sub(&y));
            pairs.push(op.graph_pair(g, &probe).unwrap());
        }
        prop_assert!(monotonicity_check(&pairs).unwrap());
    }

    #[test]
    fn resolvent_residual_is_small((op, y, _y2, g) in case()) {
        let x = op.resolvent(g, &y).unwrap();
        prop_assert!(op.resolvent_residual(g, &y, &x).unwrap() <= 1e-8 * (1.0 + y.norm()));
    }

    #[test]
    fn pl1d_resolvent_nonexpansive(g in graph(), y in -20.0..20.0f64, y2 in -20.0..20.0f64, gamma in gamma()) {
        let a = g.resolvent(gamma, y).unwrap();
        let b = g.resolvent(gamma, y2).unwrap();
        prop_assert!((a - b).abs() <= (y - y2).abs() + 1e-12);
    }

    #[test]
    fn minkowski_mean_ignores_order(gs in prop::collection::vec(graph(), 1..5), rot in 0usize..5) {
        let w = vec![1.0 / gs.len() as f64; gs.len()];
        let Ok(mean) = minkowski_mean(&gs, &w) else { return Ok(()); };
        let mut perm = gs.clone();
        perm.rotate_left(rot % gs.len());
        perm.reverse();
        prop_assert_eq!(minkowski_mean(&perm, &w).unwrap(), mean);
    }

    #[test]
    fn dirac_mixture_is_its_graph(g in graph()) {
        let mean = aumann_mean_finite(&[(g.clone(), 1.0)]).unwrap();
        prop_assert!(mean.maximal);
        for x in [-4.0, -1.5, -0.2, 0.0, 0.7, 2.0, 5.0] {
            prop_assert_eq!(mean.graph.value_at(x), g.value_at(x));
        }
        for y in [-6.0, -1.0, 0.0, 2.5, 7.0] {
            prop_assert_eq!(mean.graph.resolvent(1.0, y).unwrap(), g.resolvent(1.0, y).unwrap());
        }
    }

    #[test]
    fn minkowski_mean_is_monotone(gs in prop::collection::vec(graph(), 1..4)) {
        let w = vec![1.0 / gs.len() as f64; gs.len()];
        let Ok(mean) = minkowski_mean(&gs, &w) else { return Ok(()); };
        let pairs: Vec<GraphPair> = (-40..=40)
            .filter_map(|i| {
                let y = i as f64 * 0.25;
                mean.graph.resolvent(1.0, y).ok().map(|x| (Point::from(x), Point::from(y - x)))
            })
            .collect();
        prop_assert!(monotonicity_check(&pairs).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn splitting_matches_exact_mean(
        gs in prop::collection::vec(full_domain_graph(), 1..=5),
        raw in prop::collection::vec(0.1..1.0f64, 5),
        y in -10.0..10.0f64,
    ) {
        let total: f64 = raw[..gs.len()].iter().sum();
        let w: Vec<f64> = raw[..gs.len()].iter().map(|r| r / total).collect();
        let exact = minkowski_mean(&gs, &w).unwrap().graph.resolvent(1.0, y).unwrap();
        let ops: Vec<_> = gs.iter().map(|g| OperatorHandle::separable(vec![g.clone()]).unwrap()).collect();
        let report = resolvent_of_mean(&ops, &w, &Point::from(y), 1.0, &SolverSettings::default(), None).unwrap();
        prop_assert!(report.converged);
        prop_assert!((report.solution[0] - exact).abs() <= 1e-7, "{} vs {}", report.solution[0], exact);
        prop_assert!(report.block_spread <= 10.0 * 1e-9 * (1.0 + y.abs()) + 1e-7);
    }

    #[test]
    fn splitting_of_identical_components((op, y, _z, g) in case(), n in 1usize..5) {
        let settings = SolverSettings::default();
        let ops = vec![op.clone(); n];
        let w = vec![1.0 / n as f64; n];
        let report = resolvent_of_mean(&ops, &w, &y, g, &settings, None).unwrap();
        let direct = op.resolvent(g, &y).unwrap();
        prop_assert!(report.solution.distance(&direct) <= 1e-7 * (1.0 + y.norm()));
    }

    #[test]
    fn lifted_shift_compatibility((op, y, z, g) in case(), (op2, _y, _z, _g) in case()) {
        prop_assume!(op.dim() == op2.dim());
        let settings = SolverSettings::default();
        let w = [0.3, 0.7];
        let ops = [op.clone(), op2.clone()];
        let shifted = [op.shift(&z).unwrap(), op2.shift(&z).unwrap()];
        let a = resolvent_of_mean(&shifted, &w, &y, g, &settings, None).unwrap();
        let b = resolvent_of_mean(&ops, &w, &y.axpy(g, &z), g, &settings, None).unwrap();
        prop_assume!(a.converged && b.converged);
        prop_assert!(a.solution.distance(&b.solution) <= 1e-6 * (1.0 + y.norm() + g * z.norm()));
    }

    #[test]
    fn proximal_point_reaches_a_fixed_point((op, x0, _z, _g) in case()) {
        let report = proximal_point_zero(|x| op.resolvent(1.0, x), &x0, 1e-9, 20_000).unwrap();
        if report.converged {
            let l = &report.solution;
            prop_assert!(op.resolvent(1.0, l).unwrap().distance(l) <= 1e-9);
        }
    }
}

#[test]
fn proximal_point_examples() {
    let abs3 = OperatorHandle::separable(vec![Pl1dGraph::scaled_abs(1.0, 3.0).unwrap()]).unwrap();
    let r = proximal_point_zero(|x| abs3.resolvent(1.0, x), &Point::from(0.0), 1e-9, 1000).unwrap();
    assert!(r.converged);
    assert!((r.solution[0] - 3.0).abs() <= 1e-9);

    let cone = OperatorHandle::separable(vec![Pl1dGraph::normal_cone(0.0, 1.0).unwrap()]).unwrap();
    let r = proximal_point_zero(|x| cone.resolvent(1.0, x), &Point::from(5.0), 1e-9, 1000).unwrap();
    assert!(r.converged);
    assert!(Pl1dGraph::normal_cone(0.0, 1.0).unwrap().zero_set().distance(r.solution[0]) <= 1e-9);
}
