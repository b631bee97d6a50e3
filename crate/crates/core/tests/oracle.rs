use oscmodes::projected::residual_norms;
use oscmodes::{dense_spectrum, gen_problem, gen_random_spd, LinearOperator};

#[test]
fn dense_modes_have_small_residuals_at_two_thousand() {
    let (k, t) = gen_problem(1000, 40, 12).unwrap();
    let spec = dense_spectrum(&k, &t, true).unwrap();
    assert!(spec.omegas.iter().all(|&w| w > 0.0));
    assert!(spec.omegas.windows(2).all(|w| w[0] <= w[1]));
    let (k_op, t_op) = (LinearOperator::explicit(k), LinearOperator::explicit(t));
    let mut worst = 0.0_f64;
    for (omega, (xi, eta)) in spec.omegas.iter().zip(spec.modes.as_ref().unwrap()) {
        let r = residual_norms(&k_op, &t_op, *omega, xi, eta).unwrap();
        worst = worst.max(r.rho_k).max(r.rho_t);
    }
    assert!(worst <= 1e-9, "{worst:e}");
}

#[test]
fn large_generator_density() {
    let n = 100_000;
    let a = gen_random_spd(n, 40, 1).unwrap();
    let off_per_row = (a.nnz() - n) as f64 / n as f64;
    assert!((36.0..=44.0).contains(&off_per_row), "{off_per_row}");
    assert!(a.diagonal().iter().all(|&d| d > 0.0));
}
