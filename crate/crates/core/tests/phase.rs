use ptkr::phase::{
    classify_adaptive, classify_point, find_lambda_c, fit_growth_rate, norm_series, scan_diagram,
    ClassifierConfig, PhaseLabel,
};
use ptkr::{BasisSpec, Error, ModelParams};

fn quick() -> ClassifierConfig {
    ClassifierConfig {
        t_max: 200,
        max_t_max: 400,
        n_modes: 4096,
        max_modes: 8192,
        ..ClassifierConfig::default()
    }
}

#[test]
fn hermitian_norm_is_flat() {
    let params = ModelParams::new(6.0, 0.0, 0.3).unwrap();
    let basis = BasisSpec::new(8192, 0.3).unwrap();
    let series = norm_series(params, basis, 10.0, 200).unwrap();
    assert!(series.log_norm.iter().all(|v| v.abs() < 1e-10));
}

#[test]
fn strong_gain_is_broken() {
    let params = ModelParams::new(5.0, 0.2, 1.0).unwrap();
    let c = classify_adaptive(params, &quick()).unwrap();
    assert_eq!(c.label, PhaseLabel::Broken);
    assert!(c.mu > 0.1 && c.r_squared > 0.9);
}

#[test]
fn growth_fit_recovers_a_line() {
    let params = ModelParams::new(5.0, 0.25, 1.0).unwrap();
    let basis = BasisSpec::new(8192, 1.0).unwrap();
    let series = norm_series(params, basis, 10.0, 300).unwrap();
    let fit = fit_growth_rate(&series, None).unwrap();
    assert_eq!(fit.window, (150, 300));
    let direct = (series.log_norm[300] - series.log_norm[150]) / 150.0;
    assert!((fit.mu - direct).abs() < 0.05 * direct);
}

#[test]
fn tiny_grid_reports_inconclusive() {
    let params = ModelParams::new(5.0, 0.2, 1.0).unwrap();
    let basis = BasisSpec::new(64, 1.0).unwrap();
    let c = classify_point(params, basis, 10.0, 200, 1e-4).unwrap();
    assert_eq!(c.label, PhaseLabel::Inconclusive);
    assert!(c.reason.is_some() && c.mu.is_nan());
}

#[test]
fn bisection_rejects_bad_bracket() {
    let err = find_lambda_c(5.0, 1.0, 0.3, 0.1, 1e-3, &quick()).unwrap_err();
    assert!(matches!(err, Error::InvalidBracket(_)));
}

#[test]
fn lambda_c_lies_in_bracket() {
    let found = find_lambda_c(6.0, 0.3, 0.0, 0.02, 1e-3, &quick()).unwrap();
    assert!(found.lambda_c > 0.0 && found.lambda_c < 0.02);
    assert!(found.bracket.1 - found.bracket.0 <= 1e-3);
    assert!(!found.evaluations.is_empty());
}

#[test]
fn diagram_cells_are_row_major() {
    let ks = [4.0, 6.0];
    let ls = [0.0, 0.2];
    let d = scan_diagram(&ks, &ls, 1.0, &quick()).unwrap();
    assert_eq!(d.cells.len(), 4);
    for (i, k) in ks.iter().enumerate() {
        for (j, l) in ls.iter().enumerate() {
            let cell = d.cell(i, j);
            assert_eq!((cell.kick_strength, cell.non_hermiticity), (*k, *l));
        }
    }
    assert_eq!(d.cell(0, 0).classification.label, PhaseLabel::Unbroken);
    assert_eq!(d.boundary(), vec![Some(0.2), Some(0.2)]);
}
