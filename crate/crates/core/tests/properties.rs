//! Invariants that cut across modules.

use monopole_yamabe::conformal::Gauge;
use monopole_yamabe::degeneration::{self, Q};
use monopole_yamabe::hgeom::{Generator, HPoint, Isometry, MonopoleConfig};
use monopole_yamabe::yamabe::{self, QuadratureSpec};
use proptest::prelude::*;

fn arb_isometry() -> impl Strategy<Value = Isometry> {
    let gen = prop_oneof![
        (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(dx, dy)| Generator::Translate { dx, dy }),
        (0.2..5.0f64).prop_map(|factor| Generator::Dilate { factor }),
        Just(Generator::InvertUnitSphere),
    ];
    proptest::collection::vec(gen, 1..4).prop_map(|steps| Isometry { steps })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bubble_tree_is_isometry_invariant(iso in arb_isometry()) {
        let js = degeneration::default_parameters();
        for scenario in [degeneration::nested_collision(&js).unwrap(), degeneration::boundary_pair(&js).unwrap()] {
            let base = degeneration::predict_tree(&scenario).unwrap();
            let moved = degeneration::predict_tree(&scenario.map_points(&iso)).unwrap();
            prop_assert_eq!(base.shape(), moved.shape());
        }
    }

    #[test]
    fn tree_budgets_always_sum_to_12n(n in 1u32..6) {
        // n points collapsing to one: a single GH bubble under LeBrun(n)
        let js = degeneration::default_parameters();
        let scenario = degeneration::DegenerationScenario::from_family(&js, |j| {
            let pts: Vec<HPoint> = (0..n).map(|i| HPoint::new(f64::from(i) / j, 0.0, 1.0)).collect::<Result<_, _>>()?;
            MonopoleConfig::from_points(&pts)
        }).unwrap();
        let tree = degeneration::predict_tree(&scenario).unwrap();
        let check = degeneration::tree_energy_check(&tree, n);
        prop_assert!(check.holds);
        prop_assert_eq!(check.total, Q::from_integer(12 * i64::from(n)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn pair_energy_is_isometry_invariant(d in 0.3..4.0f64, iso in arb_isometry()) {
        let spec = QuadratureSpec { tol: 1e-6, ..QuadratureSpec::default() };
        let pair = MonopoleConfig::symmetric_pair(d).unwrap();
        let a = yamabe::energy(&pair, Gauge::Hyperbolic, &spec).unwrap();
        let b = yamabe::energy(&pair.map_points(&iso), Gauge::Hyperbolic, &spec).unwrap();
        prop_assert!((a.energy - b.energy).abs() < 1e-5, "{} vs {}", a.energy, b.energy);
    }

    #[test]
    fn hyperbolic_pair_energy_stays_below_cp2(d in 0.05..10.0f64) {
        let pair = MonopoleConfig::symmetric_pair(d).unwrap();
        let r = yamabe::energy(&pair, Gauge::Hyperbolic, &QuadratureSpec::default()).unwrap();
        prop_assert!(r.energy < yamabe::cp2_yamabe());
        prop_assert!(r.energy > yamabe::bound_orbifold(2).unwrap());
    }
}
