#![no_main]

use hypermetzler::control::Mask;
use hypermetzler::tensor::uniform_tensor;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(mask) = serde_json::from_slice::<Mask>(data) else {
        return;
    };
    let b = uniform_tensor(3, 3, 1.0, 0.0).unwrap();
    if let Ok(r) = mask.restrict(&b) {
        assert!(r.entries().all(|(idx, v)| v == b.get(idx)));
    }
});
