#![no_main]

use beta4_ucs::data::{parse_csv, CsvOptions, Normalizer};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // first byte picks the reader options
    let flags = data.first().copied().unwrap_or(0);
    let opts = CsvOptions {
        has_header: flags & 1 == 1,
        label_col: (flags & 2 == 2).then_some(0),
    };
    if let Ok(d) = parse_csv(text, &opts) {
        assert_eq!(d.features.len(), d.labels.len());
        let n = Normalizer::fit(&d);
        let t = n.transform(&d);
        assert!(t.features.iter().flatten().flatten().all(|v| (0.0..=1.0).contains(v)));
    }
});
