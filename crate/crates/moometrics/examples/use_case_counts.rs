//! Size up a use-case model: actors, messages, and system classes per
//! use case. Messages keep duplicates (each exchange counts); the class
//! list is a set.
//!
//! Run with: cargo run --example use_case_counts

use moometrics::ingest::parse_usecases;
use moometrics::requirements::{nau, nmu, nscu};

const USE_CASE_MODEL: &str = r#"
actor guest
actor staff

usecase Reserve
uses Reserve guest
uses Reserve staff
message Reserve pickDates
message Reserve confirm
message Reserve confirm
class Reserve Booking
class Reserve Calendar

usecase CheckIn
uses CheckIn staff
message CheckIn assignRoom
class CheckIn Booking
class CheckIn Booking
class CheckIn Room
"#;

fn main() {
    let model = parse_usecases(USE_CASE_MODEL, "example.ucm").expect("model parses");

    println!("{:<10} {:>6} {:>8} {:>7}", "use case", "actors", "messages", "classes");
    for use_case in &model.use_cases {
        let name = use_case.name.as_str();
        println!(
            "{:<10} {:>6} {:>8} {:>7}",
            name,
            nau(&model, name).unwrap(),
            nmu(&model, name).unwrap(),
            nscu(&model, name).unwrap(),
        );
    }
    // Reserve repeats `confirm`, so it reports three messages; CheckIn
    // lists Booking twice, but the class count collapses it to two.
}
