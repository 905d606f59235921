use std::process::ExitCode;

use cavlab::battery::{run_criterion, ACCEPTANCE_SEED, CRITERIA};

/// Prints one line per criterion. A failing criterion whose only failing part
/// is below the resolution of its sample size is reported but does not fail
/// the run; the `cavlab acceptance` command stays strict.
fn main() -> ExitCode {
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (mut failed, mut unresolved) = (0, 0);
    for &(id, name) in &CRITERIA {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        match run_criterion(id, ACCEPTANCE_SEED) {
            Ok(r) => {
                println!("{}", r.line());
                match (r.pass, r.unresolvable) {
                    (true, _) => {}
                    (false, Some(_)) => unresolved += 1,
                    (false, None) => failed += 1,
                }
            }
            Err(e) => {
                println!("[FAIL] {id:>2} {name}: error: {e}");
                failed += 1;
            }
        }
    }
    println!("acceptance: {failed} failed, {unresolved} below sampling resolution");
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
