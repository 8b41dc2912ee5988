use pcpot::step::StepSolver;
use pcpot::{InitialCondition, Numerics, C64};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 12, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn step_solution_is_continuous_at_the_jump(
        a1 in -3.0f64..3.0,
        a2 in -3.0f64..3.0,
        c in -1.5f64..1.5,
        t in 0.1f64..1.0,
    ) {
        let ic = InitialCondition::gaussian(1.0, c, 1.0).unwrap();
        let s = StepSolver::new(a1, a2, ic, Numerics::default(), "quadrant").unwrap();
        let (l, r) = (s.region_field(1, 0.0, t).unwrap(), s.region_field(2, 0.0, t).unwrap());
        prop_assert!((l.psi - r.psi).norm() < 1e-7, "{} vs {}", l.psi, r.psi);
        prop_assert!((l.dpsi - r.dpsi).norm() < 1e-7, "{} vs {}", l.dpsi, r.dpsi);
    }

    #[test]
    fn step_solution_is_linear_in_the_data(
        a2 in 0.5f64..3.0,
        p in -2.0f64..2.0,
        x in -2.0f64..2.0,
        t in 0.1f64..1.0,
    ) {
        let a = InitialCondition::gaussian(1.0, -0.5, 1.0).unwrap();
        let b = InitialCondition::modulated(0.5, 0.7, 0.8, p).unwrap();
        let at = |ic: InitialCondition| StepSolver::new(0.0, a2, ic, Numerics::default(), "d4").unwrap().field(x, t).unwrap().psi;
        let sum: C64 = at(a.clone()) + at(b.clone());
        prop_assert!((sum - at(a.plus(&b).unwrap())).norm() < 1e-9);
    }

    #[test]
    fn mirroring_the_problem_mirrors_the_solution(
        a1 in -2.0f64..2.0,
        a2 in -2.0f64..2.0,
        x in 0.2f64..2.0,
        t in 0.1f64..1.0,
    ) {
        let ic = InitialCondition::gaussian(1.0, 0.4, 1.0).unwrap();
        let s = StepSolver::new(a1, a2, ic.clone(), Numerics::default(), "quadrant").unwrap();
        let m = StepSolver::new(a2, a1, ic.mirrored(), Numerics::default(), "quadrant").unwrap();
        let (u, v) = (s.field(x, t).unwrap().psi, m.field(-x, t).unwrap().psi);
        prop_assert!((u - v).norm() < 1e-8, "{u} vs {v}");
    }
}
