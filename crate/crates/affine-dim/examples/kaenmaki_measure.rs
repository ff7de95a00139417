//! The Gibbs measure of the singular-value potential at the affinity
//! dimension: build it from the transfer operator, then check the identities
//! that make it the dimension-maximizing candidate (zero pressure, the
//! entropy identity, and the Lyapunov dimension matching s0).

use affine_dim::dimension::lyapunov_dimension;
use affine_dim::pressure::affinity_dimension;
use affine_dim::splitting::find_backward_invariant_multicone;
use affine_dim::thermo::{
    entropy, entropy_shannon_gap, gibbs_constant_check, gibbs_measure, lyapunov_exponents,
    plus_side_measure, quasi_bernoulli_check, TransferOperator,
};
use affine_dim::{Mat2, Potential, Word};

fn main() -> affine_dim::Result<()> {
    let mats = vec![Mat2::new(0.5, 0.4, 0.1, 0.1), Mat2::new(0.4, 0.1, 0.2, 0.3)];
    let cert = find_backward_invariant_multicone(&mats)?;
    let affinity = affinity_dimension(&mats, 10, 1e-9)?;
    let s0 = affinity.s0;
    println!("affinity dimension s0 = {s0:.9}");

    let potential = Potential::kaenmaki(&mats, &cert, s0)?;
    let depth = 6;
    let op = TransferOperator::build(mats.len(), &potential, depth)?;
    let (measure, pressure) = gibbs_measure(&op, 1e-12, 100_000)?;
    println!("cylinder depth {depth}: pressure at s0 = {pressure:+.3e} (0 at the root)");

    let h = entropy(&measure);
    let (shannon, gap) = entropy_shannon_gap(&measure);
    println!("entropy h = {h:.9} (depth-{depth} Shannon rate {shannon:.9}, gap {gap:.1e})");

    let lyap = lyapunov_exponents(&mats, &measure, &cert)?;
    println!(
        "Lyapunov exponents chi_s = {:.9}, chi_ss = {:.9}",
        lyap.chi_s, lyap.chi_ss
    );
    println!(
        "    singular-value crosschecks: {:.1e} / {:.1e}",
        lyap.crosscheck_gap_s, lyap.crosscheck_gap_ss
    );

    // At the root, entropy balances the exponents weighted by the branch of
    // the singular value function that is active at s0.
    let identity_gap = if s0 <= 1.0 {
        h - s0 * lyap.chi_s
    } else {
        h - (lyap.chi_s + (s0 - 1.0) * lyap.chi_ss)
    };
    println!("entropy identity defect: {identity_gap:+.3e}");

    let dim = lyapunov_dimension(h, lyap.chi_s, lyap.chi_ss)?;
    println!(
        "Lyapunov dimension {dim:.9} vs s0 {s0:.9} (gap {:.1e})",
        (dim - s0).abs()
    );

    // Gibbs property: cylinder masses against exp(-nP + Birkhoff sum),
    // and the quasi-Bernoulli two-sided splitting constant.
    let gibbs = gibbs_constant_check(&measure, &potential, depth + 2, 1)?;
    println!(
        "Gibbs constant {:.6} over {} words at depth {}",
        gibbs.c, gibbs.words_checked, gibbs.test_depth
    );
    let plus = plus_side_measure(&measure);
    let qb = quasi_bernoulli_check(&plus, 2 * depth, 1)?;
    println!(
        "quasi-Bernoulli constant {:.6} over {} splits up to length {}",
        qb.c, qb.splits_checked, qb.max_word_len
    );

    // A few cylinder masses, including one longer than the stored depth
    // (extended through the Markov structure of the operator).
    println!("sample cylinder masses:");
    for symbols in [vec![1], vec![2], vec![1, 2], vec![2, 1, 1, 2, 1, 2, 2, 1]] {
        let word = Word::new(symbols)?;
        println!("    mu[{word}] = {:.9}", measure.mass(&word)?);
    }
    Ok(())
}
