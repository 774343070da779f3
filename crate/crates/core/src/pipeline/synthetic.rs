//! Seeded generator for churn-schema CSV text.
//!
//! The rows follow the public file's column set and category vocabularies;
//! churn depends on contract type, tenure, fiber service and payment
//! method so that classifiers have signal to find. Used for demos and for
//! exercising the pipeline without the real dataset.

use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dataset::TELCO_COLUMNS;

fn yes_no(rng: &mut ChaCha8Rng, p_yes: f64) -> &'static str {
    if rng.gen_bool(p_yes) {
        "Yes"
    } else {
        "No"
    }
}

/// `rows` data rows with a header. Rows with zero tenure get a blank
/// `TotalCharges`, as in the public file.
pub fn telco_like_csv(rows: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TELCO_COLUMNS.join(",");
    out.push('\n');
    for i in 0..rows {
        let gender = if rng.gen_bool(0.5) { "Female" } else { "Male" };
        let senior = rng.gen_bool(0.16);
        let partner = yes_no(&mut rng, 0.48);
        let dependents = yes_no(&mut rng, 0.3);
        let contract = match rng.gen_range(0..100) {
            0..=54 => "Month-to-month",
            55..=75 => "One year",
            _ => "Two year",
        };
        let tenure: u32 = match contract {
            "Month-to-month" => rng.gen_range(0..=40),
            "One year" => rng.gen_range(6..=65),
            _ => rng.gen_range(12..=72),
        };
        let phone = rng.gen_bool(0.9);
        let multiple = if phone {
            yes_no(&mut rng, 0.45)
        } else {
            "No phone service"
        };
        let internet = match rng.gen_range(0..100) {
            0..=33 => "DSL",
            34..=77 => "Fiber optic",
            _ => "No",
        };
        let mut services = [""; 6];
        let mut streaming = 0.0;
        for (k, s) in services.iter_mut().enumerate() {
            *s = if internet == "No" {
                "No internet service"
            } else {
                let v = yes_no(&mut rng, 0.4);
                if k >= 4 && v == "Yes" {
                    streaming += 1.0;
                }
                v
            };
        }
        let paperless = yes_no(&mut rng, 0.6);
        let payment = match rng.gen_range(0..4) {
            0 => "Electronic check",
            1 => "Mailed check",
            2 => "Bank transfer (automatic)",
            _ => "Credit card (automatic)",
        };
        let mut monthly = 18.0 + rng.gen_range(0.0..4.0);
        if phone {
            monthly += if multiple == "Yes" { 25.0 } else { 10.0 };
        }
        monthly += match internet {
            "DSL" => 25.0 + rng.gen_range(0.0..10.0),
            "Fiber optic" => 50.0 + rng.gen_range(0.0..15.0),
            _ => 0.0,
        };
        monthly += 9.0 * streaming;
        let total = if tenure == 0 {
            " ".to_string()
        } else {
            format!("{:.2}", monthly * tenure as f64 * rng.gen_range(0.95..1.05))
        };

        let mut logit = -1.4 - 0.045 * tenure as f64;
        logit += match contract {
            "Month-to-month" => 1.6,
            "One year" => 0.2,
            _ => -0.9,
        };
        if internet == "Fiber optic" {
            logit += 0.9;
        }
        if payment == "Electronic check" {
            logit += 0.6;
        }
        if senior {
            logit += 0.4;
        }
        if services[0] == "Yes" {
            logit -= 0.5;
        }
        let p = 1.0 / (1.0 + (-logit).exp());
        let churn = yes_no(&mut rng, p);

        let _ = write!(
            out,
            "{:04}-SYN{i},{gender},{},{partner},{dependents},{tenure},{},{multiple},{internet},",
            i,
            u8::from(senior),
            if phone { "Yes" } else { "No" },
        );
        let _ = writeln!(
            out,
            "{},{contract},{paperless},{payment},{monthly:.2},{total},{churn}",
            services.join(","),
        );
    }
    out
}
