mod common;

use std::sync::Arc;

use common::*;
use currentlab::current::mesh;
use currentlab::energy::{
    assemble_pencil, cheeger_upper_bound, dirichlet_energy, minmax_spectrum, quadratic_energy, Cut, EigenMethod, SpectrumOptions,
};
use currentlab::john::{NormBall, NormRegistry};
use currentlab::{SimplicialCurrent, VertexSet};
use nalgebra::{DMatrix, DVector, Rotation3, Vector3};
use proptest::prelude::*;
use rand::Rng;

fn dense() -> SpectrumOptions {
    SpectrumOptions {
        method: EigenMethod::Dense,
        ..SpectrumOptions::default()
    }
}

fn lambdas(t: &SimplicialCurrent, k: usize) -> Vec<f64> {
    minmax_spectrum(t, k, None, &dense()).unwrap().eigenvalues
}

fn close(a: &[f64], b: &[f64], rel: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= rel * x.abs().max(y.abs()).max(1.0))
}

/// Connected components of the active cells, joined through shared vertices.
fn components(t: &SimplicialCurrent) -> usize {
    let n = t.vertices().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for c in t.cells() {
        for w in c.vertices.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut roots: Vec<usize> = t.active_vertices().into_iter().map(|v| find(&mut parent, v)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

/// Largest Rayleigh quotient over the span of `basis` (columns), from the projected pencil.
fn sup_over_span(k: &DMatrix<f64>, m: &DMatrix<f64>, basis: &DMatrix<f64>) -> f64 {
    let kb = basis.transpose() * k * basis;
    let mb = basis.transpose() * m * basis;
    let l = mb.cholesky().unwrap();
    let linv = l.l().try_inverse().unwrap();
    let c = &linv * kb * linv.transpose();
    c.symmetric_eigenvalues().max()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn eigenvalues_scale_inversely_with_area_scale(seed in any::<u64>(), si in 0usize..3) {
        let s = [0.5, 2.0, 3.0][si];
        let mut r = rng(seed);
        let t = weighted_patch(&mut r, 3);
        let a = lambdas(&t, 4);
        let b = lambdas(&t.scaled(s).unwrap(), 4);
        let expect: Vec<f64> = a.iter().map(|l| l / (s * s)).collect();
        prop_assert!(close(&b, &expect, 1e-6), "{b:?} vs {expect:?}");
    }

    #[test]
    fn rigid_motions_preserve_the_spectrum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = weighted_patch(&mut r, 3);
        let embed = [1.0, 0.0, 0.0, 1.0, 0.0, 0.0];
        let (flat3, _) = t.push_forward_affine(&embed, 3, &[0.0; 3]).unwrap();
        let axis = Vector3::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        prop_assume!(axis.norm() > 1e-3);
        let rot = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), r.gen_range(0.0..6.0));
        let a: Vec<f64> = rot.matrix().transpose().iter().copied().collect();
        let shift = [r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0)];
        let (moved, dropped) = flat3.push_forward_affine(&a, 3, &shift).unwrap();
        prop_assert_eq!(dropped, 0);
        let l0 = lambdas(&t, 4);
        let l1 = lambdas(&moved, 4);
        prop_assert!(close(&l0, &l1, 1e-9), "{l0:?} vs {l1:?}");
    }

    #[test]
    fn uniform_multiplicity_leaves_the_spectrum_unchanged(seed in any::<u64>(), c in 2i64..=7) {
        let mut r = rng(seed);
        let t = weighted_patch(&mut r, 3);
        let a = lambdas(&t, 4);
        let b = lambdas(&t.map_mults(|m| c * m), 4);
        prop_assert!(close(&a, &b, 1e-10), "{a:?} vs {b:?}");
    }

    #[test]
    fn enlarging_the_trial_space_never_lowers_the_sup(seed in any::<u64>(), dim in 1usize..6) {
        let mut r = rng(seed);
        let t = weighted_patch(&mut r, 3);
        let p = assemble_pencil(&t, None).unwrap();
        let (k, m) = (p.stiffness.to_dense(), p.mass.to_dense());
        let n = k.nrows();
        let ones = DVector::from_element(n, 1.0);
        let mut cols: Vec<DVector<f64>> = Vec::new();
        while cols.len() <= dim {
            let mut v = DVector::from_fn(n, |_, _| r.gen_range(-1.0..1.0));
            // mass-orthonormalize against constants and the earlier columns
            for u in std::iter::once(&ones).chain(&cols) {
                let c = (u.transpose() * &m * &v)[(0, 0)] / (u.transpose() * &m * u)[(0, 0)];
                v -= c * u;
            }
            let nv = (v.transpose() * &m * &v)[(0, 0)].sqrt();
            prop_assume!(nv > 1e-8);
            cols.push(v / nv);
        }
        let small = DMatrix::from_columns(&cols[..dim]);
        let big = DMatrix::from_columns(&cols);
        let (s0, s1) = (sup_over_span(&k, &m, &small), sup_over_span(&k, &m, &big));
        prop_assert!(s1 >= s0 - 1e-10 * s0.abs().max(1.0), "{s1} < {s0}");
    }

    #[test]
    fn zero_modes_detect_disconnection(seed in any::<u64>(), density in 0.1f64..0.6) {
        let mut r = rng(seed);
        let t = random_chain(&mut r, 2, 4, 2, density, 3);
        prop_assume!(t.active_vertices().len() >= 3);
        let l1 = lambdas(&t, 1)[0];
        prop_assert_eq!(l1 < 1e-8, components(&t) > 1, "lambda1 = {}", l1);
    }

    #[test]
    fn linf_tags_are_sandwiched_by_the_john_energy(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = grid(2, 3).current();
        let tagged = SimplicialCurrent::with_norms(
            t.vertex_arc().clone(),
            2,
            t.cells().iter().map(|c| (c.vertices.clone(), c.mult, Some("linf".to_string()))),
        ).unwrap();
        let mut reg = NormRegistry::new();
        reg.insert("linf", NormBall::linf(2));
        let n = 2.0;
        for _ in 0..100 {
            let f: Vec<f64> = (0..t.vertices().len()).map(|_| r.gen_range(-1.0..1.0)).collect();
            let e = dirichlet_energy(&tagged, &f, Some(&reg)).unwrap();
            let ej = quadratic_energy(&tagged, &f, Some(&reg)).unwrap();
            prop_assert!(ej / n <= e * (1.0 + 1e-9) + 1e-12, "{ej} / n > {e}");
            prop_assert!(e <= ej * (1.0 + 1e-9) + 1e-12, "{e} > {ej}");
        }
    }
}

#[test]
fn circle_satisfies_the_cheeger_inequality() {
    let t = mesh::circle_polygon(256, 1.0);
    let l1 = lambdas(&t, 1)[0];
    let h = 2.0 / std::f64::consts::PI;
    assert!(l1 >= h * h / 4.0);
    // two antipodal cut points halve the circle: interface 2, sides pi
    let values: Vec<f64> = t.vertices().points().map(|p| p[1] + 1e-3 * p[0]).collect();
    let upper = cheeger_upper_bound(&t, &[Cut::Level { values, level: 0.0 }]).unwrap();
    assert!((upper - h).abs() < 1e-3, "{upper}");
    assert!(l1 >= upper * upper / 4.0);
}

#[test]
fn disjoint_union_has_a_zero_mode() {
    let a = mesh::square_patch([0.0, 0.0], [1.0, 1.0], 3);
    let b = mesh::square_patch([2.0, 0.0], [3.0, 1.0], 3);
    let u = a.add(&b).unwrap();
    assert_eq!(components(&u), 2);
    assert!(lambdas(&u, 1)[0] < 1e-8);
    let v = Arc::new(VertexSet::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap());
    let single = SimplicialCurrent::new(v, 2, vec![(vec![0, 1, 2], 1)]).unwrap();
    assert!(lambdas(&single, 1)[0] > 1.0);
}
