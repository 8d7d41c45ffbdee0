mod common;

use common::oracles::{cut_conclusions_hold, random_grid};
use common::*;
use currentlab::current::mesh;
use currentlab::goodcuts::good_cuts;
use currentlab::poincare::poincare_ratio;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn good_cuts_satisfy_their_conclusions(seed in any::<u64>(), n in 2usize..=3, di in 0usize..4) {
        let delta = [0.3, 0.5, 0.7, 0.9][di];
        let mut r = rng(seed);
        let m = if n == 2 { r.gen_range(4..20) } else { r.gen_range(3..9) };
        let k_set = random_grid(&mut r, n, m, delta);
        let gc = good_cuts(&k_set, delta).unwrap();
        prop_assert!(cut_conclusions_hold(&k_set, &gc.sets, delta).is_ok(), "{:?}", cut_conclusions_hold(&k_set, &gc.sets, delta));
        prop_assert!(gc.checks.all());
        prop_assert!(gc.warnings.is_empty(), "{:?}", gc.warnings);
    }
}

fn patch_function(r: &mut impl Rng, t: &currentlab::SimplicialCurrent) -> Vec<f64> {
    let (a, b, c) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0), r.gen_range(0.5..3.0));
    t.vertices()
        .points()
        .map(|p| a * p[0] + b * (c * p[1]).sin() + r.gen_range(-0.1..0.1))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn poincare_ratio_is_scale_invariant(seed in any::<u64>(), s in 0.25f64..4.0) {
        let mut r = rng(seed);
        let t = mesh::square_patch([-5.0, -5.0], [5.0, 5.0], 24);
        let f = patch_function(&mut r, &t);
        let x = [r.gen_range(-0.3..0.3), r.gen_range(-0.3..0.3)];
        let rad = r.gen_range(0.5..1.0);
        let a = poincare_ratio(&t, &f, &x, rad, None).unwrap();
        let ts = t.scaled(s).unwrap();
        let b = poincare_ratio(&ts, &f, &[s * x[0], s * x[1]], s * rad, None).unwrap();
        prop_assert!(rel_close(a.ratio, b.ratio, 1e-6), "{} vs {}", a.ratio, b.ratio);
        prop_assert_eq!(a.good_cells, b.good_cells);
    }

    #[test]
    fn nonconstant_functions_have_finite_ratio(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = mesh::square_patch([-5.0, -5.0], [5.0, 5.0], 24);
        let f = patch_function(&mut r, &t);
        let rec = poincare_ratio(&t, &f, &[0.0, 0.0], 1.0, None).unwrap();
        prop_assert!(rec.rhs_core > 0.0);
        prop_assert!(rec.ratio.is_finite());
    }
}
