// Load an instance from JSON and print the full text report.

use crossed_commutant::instance::InstanceFile;
use crossed_commutant::report::build_report;

const INSTANCE: &str = r#"{
  "type": "real_line",
  "jump_points": ["0", "10"],
  "additions": {"1": ["3", "7"]},
  "base_perm": [2, 1, 0, 4, 3],
  "refined_perm": [4, 2, 3, 1, 0, 8, 7, 6, 5],
  "window": 6
}"#;

fn main() {
    let loaded = InstanceFile::from_json(INSTANCE).unwrap().load().unwrap();
    let instance = loaded.instance().unwrap();
    assert!(instance.validate().is_ok());
    print!("{}", build_report(&instance, loaded.window).unwrap().to_text());
}
