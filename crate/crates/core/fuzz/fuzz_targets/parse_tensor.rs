#![no_main]

use hypermetzler::io::{parse_tensor, tensor_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_tensor(text) {
        let again = parse_tensor(&tensor_to_json(&t)).expect("serialized tensor re-parses");
        assert_eq!(t, again);
    }
});
