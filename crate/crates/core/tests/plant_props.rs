mod common;

use common::*;
use ieobs_core::numerics::{min_eig_symmetric, EIG_TOL};
use ieobs_core::plant::excitation_check;
use ieobs_core::{
    DenseMatrix, Envelope, ExcitationMode, InputProgram, ObserverState, PlantDefinition,
};
use proptest::prelude::*;

#[test]
fn reference_plant_is_observable() {
    let cfg = reference();
    let o = cfg.plant.observability_matrix();
    assert_eq!(o.shape(), (3, 3));
    assert!(min_eig_symmetric(&o.gram(), EIG_TOL).unwrap() > 1e-3);
}

#[test]
fn reference_regressor_is_strongly_excited_at_twelve() {
    let cfg = reference_with_steps(13);
    let mut obs = ObserverState::new(cfg.observer.clone(), cfg.dims()).unwrap();
    let mut phis = Vec::new();
    drive(&cfg.plant, &cfg.input, &mut obs, cfg.steps, |_, o| {
        phis.push(o.w_stack().transpose());
    });
    let zeta = cfg.observer.zeta;
    let at_12 = excitation_check(&phis, ExcitationMode::Sie, 12, zeta).unwrap();
    assert!(at_12.satisfied, "{at_12:?}");
    let at_13 = excitation_check(&phis, ExcitationMode::Sie, 13, zeta).unwrap();
    assert!(at_13.zeta_achieved >= at_12.zeta_achieved);
    let mut ie = phis.clone();
    ie.truncate(12);
    assert!(matches!(
        excitation_check(&ie, ExcitationMode::Sie, 13, zeta),
        Err(ieobs_core::Error::InsufficientSamples {
            needed: 13,
            available: 12
        })
    ));
}

fn canonical_plant() -> impl Strategy<Value = (PlantDefinition, usize)> {
    (1usize..3, 1usize..4, 1usize..3).prop_flat_map(|(q, r, m)| {
        let n = q * r;
        (
            prop::collection::vec(prop::collection::vec(-0.9f64..0.9, q * q), r),
            prop::collection::vec(-1.0f64..1.0, n * m),
            prop::collection::vec(-1.0f64..1.0, n),
        )
            .prop_map(move |(blocks, b, x0)| {
                let blocks = blocks
                    .into_iter()
                    .map(|v| DenseMatrix::new(q, q, v).unwrap())
                    .collect();
                let b = DenseMatrix::new(n, m, b).unwrap();
                (PlantDefinition::new(blocks, b, x0).unwrap(), m)
            })
    })
}

proptest! {
    #[test]
    fn plant_step_is_linear(
        (plant, m) in canonical_plant(),
        k in -3.0f64..3.0,
        seed in prop::collection::vec(-1.0f64..1.0, 16),
    ) {
        let n = plant.n();
        let x1: Vec<f64> = seed.iter().cycle().take(n).copied().collect();
        let x2: Vec<f64> = seed.iter().rev().cycle().take(n).copied().collect();
        let u1: Vec<f64> = seed.iter().skip(3).cycle().take(m).copied().collect();
        let u2: Vec<f64> = seed.iter().skip(7).cycle().take(m).copied().collect();
        let comb = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| k * x + y).collect() };

        let (n1, y1) = plant.step(&x1, &u1).unwrap();
        let (n2, y2) = plant.step(&x2, &u2).unwrap();
        let (nc, yc) = plant.step(&comb(&x1, &x2), &comb(&u1, &u2)).unwrap();
        for (a, b) in nc.iter().zip(comb(&n1, &n2)) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
        for (a, b) in yc.iter().zip(comb(&y1, &y2)) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn gram_grows_with_horizon(
        (h, signals) in (1usize..5).prop_flat_map(|h| {
            (Just(h), prop::collection::vec(prop::collection::vec(-2.0f64..2.0, h * 2), h..h + 10))
        }),
        extra in 0usize..5,
    ) {
        let signals: Vec<DenseMatrix> =
            signals.into_iter().map(|v| DenseMatrix::new(h, 2, v).unwrap()).collect();
        let short = h;
        let long = (h + extra).min(signals.len());
        for mode in [ExcitationMode::Ie, ExcitationMode::Sie] {
            let a = excitation_check(&signals, mode, short, 0.0).unwrap();
            let b = excitation_check(&signals, mode, long, 0.0).unwrap();
            prop_assert!(b.zeta_achieved >= a.zeta_achieved - 1e-9);
        }
    }

    #[test]
    fn gated_input_is_zero_after_cutoff(until in 0u64..500, exc in 0.0f64..2.0) {
        let prog = InputProgram::reference_multisine(Envelope::Gate { until }, exc);
        for t in until..until + 100 {
            prop_assert!(prog.eval(t).iter().all(|&v| v == 0.0));
        }
        if until > 0 {
            prop_assert!(prog.eval(until - 1).len() == 2);
        }
    }
}
