#![no_main]

use beta4_ucs::ModelSnapshot;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(model) = ModelSnapshot::from_json(text) else {
        return;
    };
    // a model that loads must classify without panicking
    let d = model.dims();
    let c = model.predict(&vec![Some(0.5); d]);
    assert!(c < model.class_names.len());
    let _ = model.predict(&vec![None; d]);
    let _ = beta4_ucs::experiment::export_rules(&model, true);
});
