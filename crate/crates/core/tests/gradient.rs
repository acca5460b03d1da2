//! Analytic gradients against central finite differences.

mod oracles;

use oracles::{gradient_instance, max_gradient_error};
use senti_shape::qagent::{loss_and_grad, ReplayEntry};

#[test]
fn gradients_match_finite_differences() {
    for seed in 0..20 {
        let (rel, group) = max_gradient_error(seed, 1e-4);
        assert!(rel < 1e-4, "seed {seed}: relative error {rel:e} in {group}");
    }
}

#[test]
fn target_network_receives_no_gradient() {
    let (params, target, entries) = gradient_instance(99);
    let batch: Vec<&ReplayEntry> = entries.iter().collect();
    let (base, _) = loss_and_grad(&params, &target, &batch, 0.9).unwrap();
    // loss depends on the target only through the bootstrapped value
    let mut poisoned = target.clone();
    poisoned.head_b2.iter_mut().for_each(|b| *b += 1.0);
    let (shifted, _) = loss_and_grad(&params, &poisoned, &batch, 0.9).unwrap();
    assert_ne!(base, shifted);
    let terminal: Vec<&ReplayEntry> = entries.iter().filter(|e| e.done).collect();
    let a = loss_and_grad(&params, &target, &terminal, 0.9).unwrap().0;
    let b = loss_and_grad(&params, &poisoned, &terminal, 0.9).unwrap().0;
    assert_eq!(a, b);
}
