use crnf::io::{
    parse_conditions, parse_report, parse_series, parse_spec, parse_spec_file, parse_transform, report_to_string,
    series_to_string, spec_to_string, transform_to_string, ConditionSummary, ReportFile, DEFAULT_CAP,
};
use crnf::probe::{bigdenom_probe, norm_growth, GrowthProfile, ProbeOp, ProbeTable};
use crnf::regularity::{JetFile, RegularityTable};
use crnf::CliError;
use crnf_core::conjugacy::ManifoldSpec;
use crnf_core::diagnostics::{crucial_residual, ProbeConfig};
use crnf_core::engine::normalize_formal;
use crnf_core::quadric::HermitianFamily;
use crnf_core::rat::{gr, gr_int, rat};
use crnf_core::series::{BigradedSeries, Mono};
use crnf_core::testing::{random_family, random_real_series, random_spec, random_transform};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SPHERE: &str = r#"{
  "version": "crnf-spec/1",
  "n": 1,
  "d": 1,
  "J": [[[{"re": "1", "im": "0"}]]],
  "perturbation": [
    {"j": 0, "alpha": [2], "beta": [2], "gamma": [0], "re": "2/4", "im": "0"}
  ]
}"#;

#[test]
fn spec_defaults_and_canonical_form() {
    let spec = parse_spec(SPHERE).unwrap();
    assert_eq!(spec.cap(), DEFAULT_CAP);
    assert_eq!(spec.family(), &HermitianFamily::sphere());
    assert_eq!(spec.perturbation().coeff(0, &Mono::new(&[2], &[2], &[0])), gr(rat(1, 2), rat(0, 1)));
    let text = spec_to_string(&spec);
    assert!(text.contains("\"re\": \"1/2\""));
    assert!(text.contains("\"cap\": 8"));
    assert_eq!(spec_to_string(&parse_spec(&text).unwrap()), text);
}

#[test]
fn spec_errors_are_classified() {
    let zero_den = SPHERE.replace("\"2/4\"", "\"1/0\"");
    assert!(matches!(parse_spec(&zero_den), Err(CliError::Parse(_))));
    assert!(matches!(parse_spec("{"), Err(CliError::Parse(_))));
    let bad_version = SPHERE.replace("crnf-spec/1", "crnf-spec/9");
    assert!(matches!(parse_spec(&bad_version), Err(CliError::Parse(_))));
    // Not real-valued: i·z²z̄² alone.
    let complex = SPHERE.replace("\"re\": \"2/4\", \"im\": \"0\"", "\"re\": \"0\", \"im\": \"1\"");
    assert!(matches!(parse_spec(&complex), Err(CliError::Validation(_))));
    let low = SPHERE.replace("\"alpha\": [2], \"beta\": [2]", "\"alpha\": [1], \"beta\": [1]");
    assert!(matches!(parse_spec(&low), Err(CliError::Validation(_))));
    let wrong_len = SPHERE.replace("\"alpha\": [2]", "\"alpha\": [2, 0]");
    assert!(matches!(parse_spec(&wrong_len), Err(CliError::Parse(_))));
}

#[test]
fn dependent_family_names_the_clause() {
    let text = r#"{
      "version": "crnf-spec/1", "n": 1, "d": 2,
      "J": [[[{"re": "1", "im": "0"}]], [[{"re": "2", "im": "0"}]]],
      "perturbation": [], "cap": 4
    }"#;
    match parse_spec(text) {
        Err(CliError::Validation(msg)) => assert!(msg.contains("linearly dependent"), "{msg}"),
        other => panic!("expected a validation error, got {other:?}"),
    }
    assert!(parse_spec_file(text).is_ok());
}

#[test]
fn series_text_layout() {
    let x = BigradedSeries::from_terms(
        2,
        1,
        1,
        6,
        [
            (0, Mono::new(&[1, 0], &[0, 1], &[1]), gr(rat(-3, 2), rat(1, 7))),
            (0, Mono::new(&[2, 0], &[1, 0], &[0]), gr_int(1)),
        ],
    );
    let text = series_to_string(&x);
    assert_eq!(text, "# crnf-series n=2 d=1 s=1 cap=6\n0 | 2 0 | 1 0 | 0 | 1/1 | 0/1\n0 | 1 0 | 0 1 | 1 | -3/2 | 1/7\n");
    assert_eq!(parse_series(&text).unwrap(), x);
    assert!(parse_series("# crnf-series n=1 d=1 s=1 cap=6\n0 | 1 | 1 | 0 | 1/0 | 0\n").is_err());
    assert!(parse_series("# crnf-series n=1 d=1 s=1 cap=2\n0 | 2 | 1 | 0 | 1 | 0\n").is_err());
    assert!(parse_series("# crnf-series n=1 d=1 s=1 cap=6\n0 | 2 | 1 | 0 | 1 | 0\n0 | 2 | 1 | 0 | 1 | 0\n").is_err());
    assert!(parse_series("0 | 2 | 1 | 0 | 1 | 0\n").is_err());
}

#[test]
fn transform_rejects_antiholomorphic_terms() {
    let bad = "# crnf-transform n=1 d=1 cap=6\n[f]\n0 | 1 | 1 | 0 | 1/1 | 0/1\n[g]\n";
    assert!(parse_transform(bad).is_err());
    let ok = "# crnf-transform n=1 d=1 cap=6\n[f]\n0 | 2 | 0 | 0 | 1/1 | 0/1\n[g]\n0 | 1 | 0 | 1 | 0/1 | 1/1\n";
    assert_eq!(transform_to_string(&parse_transform(ok).unwrap()), ok);
}

#[test]
fn report_and_conditions_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let fam = HermitianFamily::sphere();
    let spec = random_spec(&mut rng, &fam, 6, 6, 3);
    let rep = normalize_formal(&spec).unwrap();
    let crucial = crucial_residual(&fam, &rep.phi).unwrap();
    let file = ReportFile::new(&rep, &crucial);
    assert!(file.ok && file.conditions.pass);
    let text = report_to_string(&file);
    assert_eq!(report_to_string(&parse_report(&text).unwrap()), text);
    let c = ConditionSummary::from_report(&rep.conditions);
    let ctext = crnf::io::conditions_to_string(&c);
    assert_eq!(crnf::io::conditions_to_string(&parse_conditions(&ctext).unwrap()), ctext);
}

#[test]
fn probe_tables_round_trip() {
    let fam = HermitianFamily::sphere();
    let cfg = ProbeConfig { m: vec![3], q: 0, i_min: 1, i_max: 4 };
    let t = bigdenom_probe(&fam, ProbeOp::DeltaCubed, &cfg).unwrap();
    let json = t.to_json();
    let back = ProbeTable::from_json(&json).unwrap();
    assert_eq!(back, t);
    assert_eq!(back.to_json(), json);
    assert_eq!(back.to_text(), t.to_text());

    let phi = BigradedSeries::from_terms(1, 1, 1, 6, [(0, Mono::new(&[2], &[2], &[1]), gr(rat(1, 3), rat(0, 1)))]);
    let g = norm_growth(&phi, &crnf_core::conjugacy::Transform::identity(1, 1, 6));
    let json = g.to_json();
    assert_eq!(GrowthProfile::from_json(&json).unwrap().to_json(), json);

    let jets = r#"{"version": "crnf-jets/1", "nx": 1, "orders": [2], "q": 0,
        "w": [[{"exp": [0, 1, 0, 1], "c": "1"}]],
        "jet": [[{"exp": [2], "c": "1"}, {"exp": [4], "c": "1"}]],
        "other": [[{"exp": [2], "c": "1"}]]}"#;
    let jf = JetFile::parse(jets).unwrap();
    assert_eq!(JetFile::parse(&jf.to_json()).unwrap(), jf);
    let table = RegularityTable::new(jf.q, &jf.run().unwrap());
    let json = table.to_json();
    assert_eq!(RegularityTable::from_json(&json).unwrap().to_json(), json);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn series_round_trip_is_byte_identical(seed in any::<u64>(), n in 1usize..3, d in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_real_series(&mut rng, n, d, d, 8, 0, 8, 10);
        let text = series_to_string(&x);
        let back = parse_series(&text).unwrap();
        prop_assert_eq!(&back, &x);
        prop_assert_eq!(series_to_string(&back), text);
    }

    #[test]
    fn spec_and_transform_round_trip(seed in any::<u64>(), (n, d) in prop_oneof![Just((1usize, 1usize)), Just((2, 1)), Just((2, 2))]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, n, d);
        let spec = random_spec(&mut rng, &fam, 7, 7, 5);
        let text = spec_to_string(&spec);
        let back: ManifoldSpec = parse_spec(&text).unwrap();
        prop_assert_eq!(&back, &spec);
        prop_assert_eq!(spec_to_string(&back), text);
        let t = random_transform(&mut rng, fam.n(), d, 7, 7, 5);
        let ttext = transform_to_string(&t);
        let tback = parse_transform(&ttext).unwrap();
        prop_assert_eq!(&tback, &t);
        prop_assert_eq!(transform_to_string(&tback), ttext);
    }
}
