use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sensbounds::envelope::{
    delta_bound, envelope_crossings, hyperbolic_envelope, linear_envelope, min_admissible_deviation,
    sensitivity_value_bound, Envelope,
};
use sensbounds::inference::{marginal, marginal_ve, Query};
use sensbounds::network::{load_network, EvidenceProfile};
use sensbounds::sensfun::{derive_family, FunctionKind};
use sensbounds::sweep::{random_network, RandomNetworkConfig};

fn unit() -> impl Strategy<Value = f64> {
    0.01f64..0.99
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hyperbolic_envelope_passes_anchor_and_corners(x0 in unit(), p0 in unit()) {
        let env = hyperbolic_envelope(x0, p0).unwrap();
        prop_assert!((env.increasing_at(x0) - p0).abs() < 1e-12);
        prop_assert!((env.decreasing_at(x0) - p0).abs() < 1e-12);
        prop_assert!(env.increasing_at(0.0).abs() < 1e-12);
        prop_assert!((env.increasing_at(1.0) - 1.0).abs() < 1e-12);
        prop_assert!((env.decreasing_at(0.0) - 1.0).abs() < 1e-12);
        prop_assert!(env.decreasing_at(1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_envelope_lies_inside_hyperbolic(x0 in unit(), p0 in unit(), x in 0.0f64..=1.0) {
        let (hl, hh) = hyperbolic_envelope(x0, p0).unwrap().bounds_at(x);
        let (ll, lh) = linear_envelope(x0, p0).unwrap().bounds_at(x);
        prop_assert!(ll >= hl - 1e-12 && lh <= hh + 1e-12);
        prop_assert!((0.0..=1.0).contains(&ll) && (0.0..=1.0).contains(&lh));
    }

    #[test]
    fn delta_bounds_match_envelope(x0 in unit(), p0 in unit(), x in 0.0f64..=1.0) {
        let (lo, hi) = hyperbolic_envelope(x0, p0).unwrap().bounds_at(x);
        let d = delta_bound(x0, p0, x).unwrap();
        prop_assert!((lo - d.lower).abs() < 1e-12 && (hi - d.upper).abs() < 1e-12);
    }

    #[test]
    fn sensitivity_bound_is_symmetric(x0 in unit(), p0 in unit()) {
        let a = sensitivity_value_bound(x0, p0).unwrap();
        let b = sensitivity_value_bound(1.0 - x0, 1.0 - p0).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn deviation_matches_oracle(x0 in unit(), p1 in 0.02f64..0.99, frac in 0.0f64..1.0, linear in any::<bool>()) {
        let p2 = frac * p1.min(1.0 - p1);
        let kind = if linear { FunctionKind::Linear } else { FunctionKind::Hyperbolic };
        let d = min_admissible_deviation(x0, p1, p2, kind).unwrap();
        let (xa, xb) = envelope_crossings(x0, p1, p2, kind).unwrap();
        prop_assert!((d.x_alpha - xa).abs() < 1e-9 && (d.x_beta - xb).abs() < 1e-9);
        prop_assert!(d.alpha >= 0.0 && d.beta >= 0.0);
        prop_assert!(d.x_alpha <= x0 && x0 <= d.x_beta);
    }

    #[test]
    fn covariation_keeps_rows_normalized(seed in any::<u64>(), x in 0.0f64..=1.0) {
        let net = random_network(&mut ChaCha8Rng::seed_from_u64(seed), &RandomNetworkConfig::default());
        let params = net.parameters();
        let pref = params[(seed % params.len() as u64) as usize];
        let moved = net.apply_parameter(&pref, x).unwrap();
        let row = &moved.cpt(pref.node)[pref.row];
        prop_assert_eq!(row[pref.state], x);
        prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let back = moved.apply_parameter(&pref, net.parameter_value(&pref).unwrap());
        if x > 0.0 && x < 1.0 {
            let back = back.unwrap();
            for (a, b) in back.cpt(pref.node)[pref.row].iter().zip(&net.cpt(pref.node)[pref.row]) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn elimination_matches_enumeration(seed in any::<u64>()) {
        let net = random_network(&mut ChaCha8Rng::seed_from_u64(seed), &RandomNetworkConfig::default());
        let n = net.len();
        let target = (seed as usize) % n;
        let observed = (target + 1) % n;
        let e = EvidenceProfile::parse(&net, &[format!("{}=s1", net.variable(observed).name)]).unwrap();
        let q = Query::new(Some((target, 0)), e);
        let a = marginal(&net, &q).unwrap();
        let b = marginal_ve(&net, &q).unwrap();
        prop_assert!((a.joint - b.joint).abs() < 1e-12);
        prop_assert!((a.evidence - b.evidence).abs() < 1e-12);
    }

    #[test]
    fn sensitivity_function_matches_propagation(seed in any::<u64>(), x in 0.0f64..=1.0) {
        let net = random_network(&mut ChaCha8Rng::seed_from_u64(seed), &RandomNetworkConfig::default());
        let params = net.parameters();
        let pref = params[(seed % params.len() as u64) as usize];
        let n = net.len();
        let target = (seed as usize / 7) % n;
        let observed = (target + 1 + seed as usize % (n - 1)) % n;
        let e = EvidenceProfile::parse(&net, &[format!("{}=s0", net.variable(observed).name)]).unwrap();
        let family = derive_family(&net, target, &e, &pref).unwrap();
        let f = family.function(0).unwrap();
        let direct = marginal(&net.apply_parameter(&pref, x).unwrap(), &Query::new(Some((target, 0)), e)).unwrap();
        if let (Ok(value), Some(want)) = (f.evaluate(x), direct.conditional) {
            prop_assert!((value - want).abs() < 1e-9);
        }
    }

    #[test]
    fn midpoint_evaluation_matches_coefficients(seed in any::<u64>()) {
        let net = random_network(&mut ChaCha8Rng::seed_from_u64(seed), &RandomNetworkConfig::default());
        let params = net.parameters();
        let pref = params[(seed % params.len() as u64) as usize];
        let n = net.len();
        let target = (seed as usize / 3) % n;
        let observed = (target + 1) % n;
        let e = EvidenceProfile::parse(&net, &[format!("{}=s1", net.variable(observed).name)]).unwrap();
        let family = derive_family(&net, target, &e, &pref).unwrap();
        let c = family.coefficients(0);
        let mid = marginal(&net.apply_parameter(&pref, 0.5).unwrap(), &Query::new(Some((target, 0)), e)).unwrap();
        prop_assert!((c.numerator(0.5) - mid.joint).abs() < 1e-9);
        prop_assert!((c.denominator(0.5) - mid.evidence).abs() < 1e-9);
    }
}

#[test]
fn network_json_round_trips() {
    let text = include_str!("../fixtures/diagnosis.json");
    let net = load_network(text).unwrap();
    let again = load_network(&net.to_json()).unwrap();
    assert_eq!(net, again);
}
