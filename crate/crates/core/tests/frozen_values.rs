//! Values evaluated independently at 40 significant digits and frozen here.

use epps_lab::analysis::{fisher_ci, pearson};
use epps_lab::gaussian::{rho_closed_form, GaussianModelParams};
use epps_lab::stochastic::{bm_increment_cov, ou_increment_cov, OuParams};

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b}");
}

#[test]
fn rho_on_fitted_parameters() {
    let p = GaussianModelParams::fitted();
    let table = [
        (1.0, 0.101199499139),
        (5.0, 0.102063073537),
        (10.0, 0.103306521988),
        (33.0, 0.112361561018),
        (66.0, 0.144327678877),
        (99.0, 0.105680680045),
        (132.0, 0.0931463845127),
        (264.0, 0.0842372863519),
        (1320.0, 0.0660883390537),
    ];
    for (h, expected) in table {
        close(rho_closed_form(h, &p).unwrap(), expected, 1e-11);
    }
    assert!(rho_closed_form(1320.0, &p).unwrap() < 0.5 * rho_closed_form(66.0, &p).unwrap());
}

#[test]
fn kink_second_differences() {
    let p = GaussianModelParams::fitted();
    let rho = |h: f64| rho_closed_form(h, &p).unwrap();
    let d2 = |h: f64| rho(h + 1.0) - 2.0 * rho(h) + rho(h - 1.0);
    close(d2(66.0), -0.003537851801, 1e-11);
    close(d2(33.0), 1.732e-5, 1e-8);
}

#[test]
fn ou_increment_covariances() {
    let p = OuParams::new(0.03162, 1.0).unwrap();
    let table = [
        (10.0, 0, 8.57325576035),
        (10.0, 1, -0.197792356565),
        (66.0, 0, 27.7018127934),
        (66.0, 1, -12.1324427306),
        (200.0, 0, 31.5688564797),
        (200.0, 1, 3.69173324348),
    ];
    for (h, m, expected) in table {
        close(ou_increment_cov(h, m, 66.0, &p).unwrap(), expected, 1e-9);
    }
    close((-0.03162f64 * 66.0).exp(), 0.12407, 1e-5);
}

#[test]
fn brownian_increment_covariances() {
    assert_eq!(bm_increment_cov(10.0, 1, 66.0).unwrap(), 0.0);
    assert_eq!(bm_increment_cov(200.0, 1, 66.0).unwrap(), 134.0);
    assert_eq!(bm_increment_cov(66.0, 0, 66.0).unwrap(), 66.0);
}

#[test]
fn fisher_intervals() {
    let (lo, hi) = fisher_ci(0.0, 403, 0.95).unwrap();
    close(hi, 0.09768568631, 1e-10);
    close(lo, -hi, 1e-15);
    let (lo, hi) = fisher_ci(0.15, 10_000, 0.95).unwrap();
    close(lo, 0.1307844376, 1e-9);
    close(hi, 0.1691029057, 1e-9);
}

#[test]
fn small_pearson() {
    let c = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 5.0]).unwrap();
    close(c.rho, 0.982707629823991, 1e-14);
    assert_eq!(c.n, 4);
}
