#![no_main]

use beta4_ucs::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = ExperimentConfig::from_json(text) {
            let again = serde_json::to_string(&cfg).unwrap();
            ExperimentConfig::from_json(&again).expect("re-serialized config parses");
        }
    }
});
