//! Affinity dimension of three systems: a conformal pair with a closed-form
//! answer, diagonal families that cross the s = 1 branch of the singular
//! value function, and a genuinely affine pair where only the numeric root
//! is available.

use affine_dim::pressure::{affinity_dimension, finite_pressure, singular_value_function};
use affine_dim::Mat2;

fn main() -> affine_dim::Result<()> {
    // Two copies of a third of the identity. Every length-n product has both singular
    // values 3^-n, so P_n(s) = log 2 - s log 3 at every depth and the root
    // sits at log 2 / log 3 from depth 1 on.
    let conformal = vec![Mat2::diagonal(1.0 / 3.0, 1.0 / 3.0); 2];
    let result = affinity_dimension(&conformal, 6, 1e-10)?;
    println!(
        "conformal pair        s0 = {:.12}   (log2/log3 = {:.12})",
        result.s0,
        2f64.ln() / 3f64.ln()
    );

    // Two, then three, copies of diag(1/2, 1/4). With two maps the root is
    // exactly 1; with three maps it moves into the 1 < s <= 2 branch where
    // the second singular value starts to matter.
    let two = vec![Mat2::diagonal(0.5, 0.25); 2];
    let three = vec![Mat2::diagonal(0.5, 0.25); 3];
    println!(
        "diagonal pair         s0 = {:.12}   (exact 1)",
        affinity_dimension(&two, 8, 1e-10)?.s0
    );
    println!(
        "diagonal triple       s0 = {:.12}   (1 + ln(3/2)/ln4 = {:.12})",
        affinity_dimension(&three, 8, 1e-10)?.s0,
        1.0 + (1.5f64).ln() / (4f64).ln()
    );

    // A positive pair without a closed form. The per-depth roots decrease
    // towards the true value; the report carries the last movement as a
    // heuristic error bound.
    let positive = vec![Mat2::new(0.5, 0.4, 0.1, 0.1), Mat2::new(0.4, 0.1, 0.2, 0.3)];
    let result = affinity_dimension(&positive, 12, 1e-9)?;
    println!(
        "positive pair         s0 = {:.12} +- {:.1e} (depth {})",
        result.s0, result.error_bound, result.depth_used
    );
    for (n, root) in result.per_depth.iter().filter(|(n, _)| n % 3 == 0) {
        println!("    depth {n:2}: root of P_n at {root:.12}");
    }

    // The pressure itself: decreasing in s, with the singular value function
    // switching formula at s = 1 and s = 2.
    let a = Mat2::new(0.5, 0.4, 0.1, 0.1);
    println!("\nsingular value function of one matrix:");
    for s in [0.5, 1.0, 1.5, 2.0, 2.5] {
        println!("    phi^{s:.1} = {:.9}", singular_value_function(&a, s)?);
    }
    println!("finite pressure of the positive pair at depth 8:");
    for s in [0.8, 1.0, 1.2] {
        println!(
            "    P_8({s:.1}) = {:+.9}",
            finite_pressure(&positive, s, 8)?
        );
    }
    Ok(())
}
