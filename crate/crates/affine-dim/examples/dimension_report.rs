//! The full pipeline on one spec: affinity dimension, splitting
//! certificate, thermodynamics, dimension formulas, class conditions, and
//! separation, assembled into the same JSON report the `affine-dim
//! dimension` subcommand prints.

use affine_dim::{build_full_report, ReportOptions, SystemSpecFile};

fn main() -> affine_dim::Result<()> {
    let spec = SystemSpecFile::from_json(
        r#"{
            "version": 1,
            "matrices": [[0.5, 0.0, 0.0, 0.25], [0.5, 0.0, 0.0, 0.25]],
            "translations": [[0.0, 0.0], [0.5, 0.75]],
            "budgets": {"pressure_depth": 8, "cylinder_depth": 5, "cloud_depth": 10}
        }"#,
    )?;
    let report = build_full_report(&spec, &ReportOptions::default())?;

    println!("s0                     {:.9}", report.affinity.s0);
    println!("splitting certified    {}", report.splitting.certified);
    if let Some(thermo) = &report.thermo {
        println!("pressure at s0         {:+.2e}", thermo.pressure);
        println!("entropy                {:.9}", thermo.entropy);
        println!(
            "chi_s / chi_ss         {:.6} / {:.6}",
            thermo.chi_s, thermo.chi_ss
        );
    }
    if let Some(dims) = &report.dimensions {
        println!("lyapunov dimension     {:.9}", dims.lyapunov_dim);
        if let Some(gap) = dims.kaenmaki_gap {
            println!("gap to s0              {:.2e}", gap);
        }
    }
    if let Some(geometry) = &report.geometry {
        println!("separation             {:?}", geometry.ssc.verdict);
        if let Some(boxes) = &geometry.box_count {
            println!("box-count slope        {:.4}", boxes.slope);
        }
    }
    println!(
        "chain applicable       {}",
        report.dimension_chain_applicable
    );

    println!("\nfull JSON report:");
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    Ok(())
}
