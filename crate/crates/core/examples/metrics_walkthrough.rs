//! CI, MSE and r_m² on small hand-made vectors.

use resdta::metrics::{aggregate, concordance_index, mse, r_squared_pair, rm2, FoldMetrics, RM2_ACCEPTABLE};

fn run() -> resdta::Result<()> {
    let actual = [1.0, 2.0, 3.0];
    println!("CI perfect  {}", concordance_index(&actual, &[0.1, 0.5, 0.9])?);
    println!("CI reversed {}", concordance_index(&actual, &[3.0, 2.0, 1.0])?);
    println!("CI constant {}", concordance_index(&actual, &[5.0, 5.0, 5.0])?);
    println!("MSE         {}", mse(&[1.0, 2.0], &[1.0, 4.0])?);
    if let Err(e) = concordance_index(&[2.0, 2.0], &[1.0, 3.0]) {
        println!("all-tied actual: {e}");
    }

    let y = [11.2, 11.9, 12.4, 13.1, 12.0, 11.5, 14.2, 12.8];
    let p = [11.5, 11.7, 12.9, 12.8, 12.2, 11.3, 13.6, 12.5];
    let (r2, r0) = r_squared_pair(&y, &p)?;
    let m = rm2(&y, &p)?;
    println!("r2 {r2:.4}  r0^2 {r0:.4}  rm2 {m:.4}  acceptable: {}", m > RM2_ACCEPTABLE);

    let folds = [
        FoldMetrics::evaluate(&y, &p)?,
        FoldMetrics::evaluate(&y[..6], &p[..6])?,
    ];
    let report = aggregate(&folds)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(3);
    }
}
