//! Golden-file check of the schedule JSON layout.
//!
//! Run with `UPDATE_GOLDEN=1` to regenerate after an intentional change.

use std::fs;
use std::path::Path;

use zeno_core::schedule::{build_schedule, LogicBit, ProtocolParams};

fn check(name: &str, value: &impl serde::Serialize) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let mut rendered = serde_json::to_string_pretty(value).unwrap();
    rendered.push('\n');
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, &rendered).unwrap();
        return;
    }
    let pinned = fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(rendered, pinned, "schedule JSON drifted from {}", path.display());
}

#[test]
fn schedule_json_is_stable() {
    let blocked = build_schedule(&ProtocolParams::new(2, 2, LogicBit::One)).unwrap();
    check("schedule_m2_n2_bit1.json", &blocked);
    let unblocked = build_schedule(&ProtocolParams::new(2, 2, LogicBit::Zero)).unwrap();
    check("schedule_m2_n2_bit0.json", &unblocked);
}
