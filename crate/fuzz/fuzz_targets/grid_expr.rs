//! Fuzz target: grid-expression parsing (`a,b,c` or `start:stop:step`).
//!
//! cargo fuzz run grid_expr

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(expr) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(grid) = greengap::grid::parse_grid(expr) else {
        return;
    };
    assert!(!grid.is_empty(), "accepted grids are never empty");
    assert!(
        grid.iter().all(|v| v.is_finite()),
        "accepted grids are finite"
    );
    // range grids are bounded; comma lists are bounded by input length
    assert!(grid.len() <= 10_000_001);
});
