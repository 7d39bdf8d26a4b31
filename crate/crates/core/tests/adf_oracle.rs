mod common;

use vecon::stationarity::adf_test;

#[test]
fn matches_reference_values() {
    let cases = common::adf_cases();
    assert_eq!(cases.len(), 6);
    for case in cases {
        let e = &case.expected;
        let r = adf_test(&case.series, None).unwrap();
        let t = e["t_stat"].as_f64().unwrap();
        let p = e["p_value"].as_f64().unwrap();
        assert!(
            (r.t_stat - t).abs() <= 1e-4,
            "{}: t {} vs {t}",
            case.name,
            r.t_stat
        );
        assert!(
            (r.p_value - p).abs() <= 1e-3,
            "{}: p {} vs {p}",
            case.name,
            r.p_value
        );
        assert_eq!(
            r.lags_used as u64,
            e["lags_used"].as_u64().unwrap(),
            "{}",
            case.name
        );
        assert_eq!(
            r.n_obs as u64,
            e["n_obs"].as_u64().unwrap(),
            "{}",
            case.name
        );
        assert_eq!(
            r.max_lag as u64,
            e["max_lag"].as_u64().unwrap(),
            "{}",
            case.name
        );
        let cv = &e["critical_values"];
        for (got, key) in [
            (r.critical_values.pct1, "1%"),
            (r.critical_values.pct5, "5%"),
            (r.critical_values.pct10, "10%"),
        ] {
            assert!(
                (got - cv[key].as_f64().unwrap()).abs() < 1e-9,
                "{} {key}",
                case.name
            );
        }
    }
}

#[test]
fn tighter_than_required_on_statistic() {
    // the regression itself should agree far beyond the acceptance bound
    for case in common::adf_cases() {
        let r = adf_test(&case.series, None).unwrap();
        let t = case.expected["t_stat"].as_f64().unwrap();
        assert!(
            (r.t_stat - t).abs() < 1e-9,
            "{}: {} vs {t}",
            case.name,
            r.t_stat
        );
    }
}

#[test]
fn random_walk_not_rejected_stationary_rejected() {
    for case in common::adf_cases() {
        let r = adf_test(&case.series, None).unwrap();
        match case.name.as_str() {
            "rw_seed42" | "near_unit_phi099_seed19" => {
                assert!(!r.rejects_at(0.05), "{}", case.name)
            }
            _ => assert!(r.rejects_at(0.01), "{}", case.name),
        }
    }
}
