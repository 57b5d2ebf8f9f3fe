use std::fs;
use std::path::PathBuf;

use hypermetzler::control::Mask;
use hypermetzler::io::{model_to_json, parse_model, parse_tensor, tensor_to_json};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fuzz/corpus")
        .join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn tensor_seeds() {
    let mut accepted = 0;
    for (name, text) in seeds("parse_tensor") {
        if let Ok(t) = parse_tensor(&text) {
            accepted += 1;
            assert_eq!(parse_tensor(&tensor_to_json(&t)).unwrap(), t, "{name}");
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn model_seeds() {
    for (name, text) in seeds("parse_model") {
        let spec = parse_model(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_model(&model_to_json(&spec)).unwrap(), spec, "{name}");
    }
}

#[test]
fn mask_seeds() {
    let b = hypermetzler::tensor::uniform_tensor(3, 3, 1.0, 0.0).unwrap();
    for (name, text) in seeds("parse_mask") {
        let mask: Mask = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let _ = mask.restrict(&b);
    }
}
