#![no_main]

use hypermetzler::io::{model_to_json, parse_model};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_model(text) {
        let again = parse_model(&model_to_json(&spec)).expect("serialized model re-parses");
        assert_eq!(spec, again);
    }
});
