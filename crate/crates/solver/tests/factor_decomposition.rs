//! The dense joint-value table and its unit-by-unit factorization: the
//! factored policy must reproduce the joint softmax exactly, conditional
//! values must telescope, and the single-tuple shortcut must lower-bound
//! every exact conditional value.

use entente_solver::{factor_policy, JointQTable, QMode, SolverError};
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;

/// A random table with a product anchor: each unit draws a positive
/// distribution over its alphabet, and each tuple's log-probability is the
/// sum of its units' logs.
fn random_table(beta: f64, sizes: &[usize], rng: &mut ChaCha8Rng) -> JointQTable {
    let unit_logs: Vec<Vec<f64>> = sizes
        .iter()
        .map(|&n| {
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
            let z: f64 = raw.iter().sum();
            raw.iter().map(|w| (w / z).ln()).collect()
        })
        .collect();
    JointQTable::from_fn(beta, sizes.to_vec(), |tuple| {
        let q = rng.gen_range(-2.0..2.0);
        let lp: f64 = tuple.iter().zip(&unit_logs).map(|(&a, logs)| logs[a]).sum();
        (q, lp)
    })
    .unwrap()
}

const SHAPES: [&[usize]; 12] = [
    &[2],
    &[3],
    &[4],
    &[2, 2],
    &[2, 3],
    &[3, 3],
    &[4, 2],
    &[2, 2, 2],
    &[3, 2, 4],
    &[4, 4, 4],
    &[2, 3, 4],
    &[3, 4, 2],
];

#[test]
fn frozen_two_by_two_decomposition() {
    // Two units, two orders each, q rewarding agreement, uniform anchor,
    // β = 0. Joint softmax of (1, 0, 0, 1) puts e/(2e+2) on each agreeing
    // tuple; the first unit's exact value is logsumexp(1, 0) = ln(e+1)
    // either way, and the second unit's conditionals are plain two-point
    // softmaxes.
    let lp = vec![0.25f64.ln(); 4];
    let table = JointQTable::new(0.0, vec![2, 2], vec![1.0, 0.0, 0.0, 1.0], lp).unwrap();

    let joint = table.joint_policy();
    assert!((joint[0] - 0.36552928931500245).abs() <= 1e-12, "{joint:?}");
    assert!((joint[1] - 0.13447071068499755).abs() <= 1e-12, "{joint:?}");
    assert_eq!(joint[0], joint[3]);
    assert_eq!(joint[1], joint[2]);

    let first = table.exact_unit_q(&[]).unwrap();
    assert_eq!(first.unit, 0);
    assert_eq!(first.mode, QMode::Exact);
    assert!((first.values[0] - 1.3132616875182228).abs() <= 1e-12, "{:?}", first.values);
    assert_eq!(first.values[0], first.values[1]);

    let second = table.exact_unit_q(&[0]).unwrap();
    assert_eq!(second.values, vec![1.0, 0.0], "β = 0 leaves raw q values");
    let pi = factor_policy(&second);
    assert!((pi[0] - 0.7310585786300049).abs() <= 1e-12, "{pi:?}");

    assert!(table.factored_joint_gap().unwrap() <= 1e-12);
}

#[test]
fn factored_policy_always_matches_the_joint_softmax() {
    // The per-unit logsumexp values exist precisely so that sampling unit
    // by unit reproduces the joint distribution; the gap must be rounding
    // noise across shapes, betas and anchors.
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut instances = 0;
    for beta in [0.0, 0.1, 1.0] {
        for shape in SHAPES {
            for _ in 0..3 {
                let table = random_table(beta, shape, &mut rng);
                let gap = table.factored_joint_gap().unwrap();
                assert!(gap <= 1e-9, "shape {shape:?}, β {beta}: gap {gap:e}");
                instances += 1;
            }
        }
    }
    assert!(instances >= 100, "the sweep should cover at least 100 tables");
}

#[test]
fn conditional_values_telescope() {
    // For units before the last, the exact value of a choice equals the
    // logsumexp of the next unit's conditional values after making it; at
    // the last unit it is the shaped tuple score itself.
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for shape in [&[2usize, 3, 4][..], &[3, 3][..], &[4, 2, 2][..]] {
        let table = random_table(0.3, shape, &mut rng);
        check_telescope(&table, &mut Vec::new());
    }
}

fn check_telescope(table: &JointQTable, prefix: &mut Vec<usize>) {
    let d = prefix.len();
    if d == table.dims() {
        return;
    }
    let here = table.exact_unit_q(prefix).unwrap();
    for a in 0..table.sizes()[d] {
        prefix.push(a);
        if d + 1 == table.dims() {
            assert!(
                (here.values[a] - table.shaped(prefix)).abs() <= 1e-9,
                "last unit value should be the tuple's shaped score"
            );
        } else {
            let next = table.exact_unit_q(prefix).unwrap();
            let rollup = entente_solver::math::logsumexp(&next.values);
            assert!(
                (here.values[a] - rollup).abs() <= 1e-9,
                "unit {d} choice {a}: {} vs rolled-up {rollup}",
                here.values[a]
            );
        }
        check_telescope(table, prefix);
        prefix.pop();
    }
}

#[test]
fn single_tuple_bound_never_exceeds_exact_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut checks = 0usize;
    for i in 0..300 {
        let beta = [0.0, 0.1, 1.0][i % 3];
        let shape = SHAPES[i % SHAPES.len()];
        let table = random_table(beta, shape, &mut rng);
        let mut tuple = vec![0usize; table.dims()];
        for _ in 0..table.len() {
            let bound = table.lb_unit_q(&tuple);
            for d in 0..table.dims() {
                let exact = table.exact_unit_q(&tuple[..d]).unwrap();
                assert!(
                    bound[d] <= exact.values[tuple[d]] + 1e-12,
                    "shape {shape:?} tuple {tuple:?} unit {d}: {} > {}",
                    bound[d],
                    exact.values[tuple[d]]
                );
                checks += 1;
            }
            // Row-major walk over every tuple.
            let mut k = table.dims();
            while k > 0 {
                k -= 1;
                tuple[k] += 1;
                if tuple[k] < table.sizes()[k] {
                    break;
                }
                tuple[k] = 0;
            }
        }
    }
    assert!(checks >= 10_000, "covered {checks} bound checks");
}

#[test]
fn the_bound_is_tight_when_one_tuple_dominates() {
    // If a single tuple holds virtually all the mass, skipping the
    // logsumexp costs nothing: with a 50-point margin the gap is far below
    // the 1e-8 tolerance.
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for case in 0..25 {
        let shape = SHAPES[3 + (case % 9)];
        let len: usize = shape.iter().product();
        let star = rng.gen_range(0..len);
        let q: Vec<f64> = (0..len).map(|i| if i == star { 25.0 } else { -25.0 }).collect();
        let lp = vec![(1.0 / len as f64).ln(); len];
        let table = JointQTable::new(0.1, shape.to_vec(), q, lp).unwrap();

        // Decode the flat index back into a tuple.
        let mut tuple = vec![0usize; shape.len()];
        let mut rest = star;
        for d in (0..shape.len()).rev() {
            tuple[d] = rest % shape[d];
            rest /= shape[d];
        }
        let bound = table.lb_unit_q(&tuple);
        for d in 0..table.dims() {
            let exact = table.exact_unit_q(&tuple[..d]).unwrap().values[tuple[d]];
            let gap = exact - bound[d];
            assert!((-1e-12..=1e-8).contains(&gap), "case {case} unit {d}: gap {gap:e}");
        }
    }
}

#[test]
fn shifting_q_shifts_values_but_not_policies() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let base = random_table(0.2, &[3, 2, 2], &mut rng);
    let shift = 3.75;
    let shifted = JointQTable::from_fn(0.2, vec![3, 2, 2], |tuple| {
        (base.q(tuple) + shift, base.anchor_logprob(tuple))
    })
    .unwrap();

    let a = base.exact_unit_q(&[]).unwrap();
    let b = shifted.exact_unit_q(&[]).unwrap();
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((y - x - shift).abs() <= 1e-9);
    }
    let (pa, pb) = (base.joint_policy(), shifted.joint_policy());
    let drift =
        pa.iter().zip(&pb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(drift <= 1e-12);
}

#[test]
fn one_unit_tables_factor_trivially() {
    let table = JointQTable::new(
        0.5,
        vec![4],
        vec![0.3, -1.0, 2.5, 0.0],
        vec![-1.0, -2.0, -1.5, -0.5],
    )
    .unwrap();
    let unit = table.exact_unit_q(&[]).unwrap();
    for (a, v) in unit.values.iter().enumerate() {
        assert_eq!(*v, table.shaped(&[a]), "singleton logsumexp is the identity");
    }
    assert_eq!(factor_policy(&unit), table.joint_policy());
    assert!(table.factored_joint_gap().unwrap() <= 1e-15);
}

#[test]
fn shape_errors_are_reported_not_panicked() {
    let empty = JointQTable::new(0.0, vec![], vec![], vec![]);
    assert!(matches!(empty, Err(SolverError::Shape(_))));
    let zero = JointQTable::new(0.0, vec![2, 0], vec![], vec![]);
    assert!(matches!(zero, Err(SolverError::Shape(_))));
    let short = JointQTable::new(0.0, vec![2, 2], vec![1.0; 3], vec![0.0; 4]);
    assert!(matches!(short, Err(SolverError::Shape(_))));

    let table = JointQTable::new(0.0, vec![2, 2], vec![0.0; 4], vec![0.0; 4]).unwrap();
    assert!(matches!(table.exact_unit_q(&[0, 1]), Err(SolverError::Shape(_))));
    assert!(matches!(table.exact_unit_q(&[5]), Err(SolverError::Shape(_))));
}

#[test]
fn from_fn_agrees_with_flat_construction() {
    let sizes = vec![2, 3];
    let q = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
    let lp = vec![-0.1, -0.2, -0.3, -0.4, -0.5, -0.6];
    let flat = JointQTable::new(0.7, sizes.clone(), q.clone(), lp.clone()).unwrap();
    let built = JointQTable::from_fn(0.7, sizes.clone(), |tuple| {
        let idx = tuple[0] * 3 + tuple[1];
        (q[idx], lp[idx])
    })
    .unwrap();
    assert_eq!(flat.len(), built.len());
    assert_eq!(flat.dims(), 2);
    assert!(!flat.is_empty());
    assert_eq!(flat.beta(), 0.7);
    assert_eq!(flat.sizes(), &[2, 3]);
    for i in 0..2 {
        for j in 0..3 {
            assert_eq!(flat.q(&[i, j]), built.q(&[i, j]));
            assert_eq!(flat.anchor_logprob(&[i, j]), built.anchor_logprob(&[i, j]));
            assert_eq!(flat.shaped(&[i, j]), flat.q(&[i, j]) + 0.7 * flat.anchor_logprob(&[i, j]));
        }
    }
}
