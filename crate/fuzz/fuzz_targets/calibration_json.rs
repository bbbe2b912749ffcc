//! Fuzz target: calibration JSON parsing and validation.
//!
//! Any byte sequence either fails to parse, fails validation, or yields
//! a config that survives an exact serialize/deserialize round trip and
//! can draw a firm without panicking.
//!
//! cargo fuzz run calibration_json

#![no_main]

use greengap::engine::CalibrationConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(mut config) = serde_json::from_slice::<CalibrationConfig>(data) else {
        return;
    };
    if config.validate().is_err() {
        return;
    }

    let json = serde_json::to_string(&config).expect("valid configs serialize");
    let back: CalibrationConfig = serde_json::from_str(&json).expect("round trip parses");
    assert_eq!(back, config, "round trip must be exact");

    // sampling a single firm must not panic for any valid config
    config.trials = 1;
    let _ = greengap::engine::draw_population(&config);
});
