#![no_main]

use beta4_ucs::ProblemSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = text.parse::<ProblemSpec>() {
        assert_eq!(spec.to_string().parse::<ProblemSpec>().unwrap(), spec);
        if spec.dims() <= 64 {
            let c = spec.label(&vec![0.5; spec.dims()]);
            assert!(c < spec.num_classes());
        }
    }
});
