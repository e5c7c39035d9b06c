//! Brute-force checks of the partial-sum closed form and stage sharing, as JSON.

use polar_sched::dependency::{
    verify_closed_form, verify_h_constancy, verify_sharing_law, verify_stage_sharing,
    DEFAULT_VERIFY_SEED, STAGE_SHARING_TRIALS,
};

fn main() -> polar_sched::Result<()> {
    let n_max = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(4);
    let seed = DEFAULT_VERIFY_SEED;
    let report = serde_json::json!({
        "closed_form": verify_closed_form(n_max, seed)?,
        "stage_sharing": verify_stage_sharing(n_max, STAGE_SHARING_TRIALS, seed)?,
        "sharing_law": verify_sharing_law(n_max, seed)?,
        "h_constancy": verify_h_constancy(n_max, seed)?,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
