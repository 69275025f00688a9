use beta4_ucs::data::{parse_csv, CsvOptions};
use beta4_ucs::{ExperimentConfig, ModelSnapshot, ProblemSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn csv_parser_never_panics(text in "\\PC*", header in any::<bool>(), col in prop::option::of(0usize..4)) {
        let opts = CsvOptions { has_header: header, label_col: col };
        if let Ok(d) = parse_csv(&text, &opts) {
            prop_assert_eq!(d.features.len(), d.labels.len());
            prop_assert!(d.features.iter().all(|r| r.len() == d.dims()));
        }
    }

    #[test]
    fn csv_like_input_never_panics(
        rows in prop::collection::vec(prop::collection::vec("(-?[0-9]{1,3}(\\.[0-9]{1,3})?|\\?|nan|inf|[a-z]{1,2}|)", 1..5), 0..8),
    ) {
        let text: String = rows.iter().map(|r| r.join(",") + "\n").collect();
        let _ = parse_csv(&text, &CsvOptions::default());
    }

    #[test]
    fn problem_parser_never_panics(text in "\\PC*") {
        if let Ok(spec) = text.parse::<ProblemSpec>() {
            prop_assert_eq!(spec.to_string().parse::<ProblemSpec>().unwrap(), spec);
        }
    }

    #[test]
    fn problem_shorthand_never_panics(head in "(mux|chk|cmx|maj|car|rcb)", tail in "(:[0-9x.]{0,8})?") {
        let _ = format!("{head}{tail}").parse::<ProblemSpec>();
    }

    #[test]
    fn json_loaders_never_panic(text in "\\PC*") {
        let _ = ExperimentConfig::from_json(&text);
        let _ = ModelSnapshot::from_json(&text);
    }
}
