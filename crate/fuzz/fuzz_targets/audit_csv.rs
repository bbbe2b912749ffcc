//! Fuzz target: the audit CSV parser.
//!
//! Feeds arbitrary bytes into `parse_reader` and asserts that it never
//! panics and that every record it accepts satisfies the documented
//! field invariants (positive price and savings, nonnegative cost).
//!
//! cargo fuzz run audit_csv

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(report) = greengap::audit::parse_reader(data) else {
        return;
    };
    for record in &report.records {
        assert!(record.cost.is_finite() && record.cost >= 0.0);
        assert!(record.annual_kwh_saved.is_finite() && record.annual_kwh_saved > 0.0);
        assert!(record.price.is_finite() && record.price > 0.0);
    }
    // the error report must render for any mix of malformed rows
    let _ = report.error_report();
});
