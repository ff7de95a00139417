//! Attractor geometry: sample the point cloud of a separated system, write
//! it out as CSV and SVG, verify separation, and estimate the box-counting
//! dimension from grid counts.

use std::path::PathBuf;

use affine_dim::geometry::{
    box_dimension_estimate, check_ssc, cloud_to_csv, cloud_to_svg, dyadic_scales, generate_cloud,
};
use affine_dim::AffineIfs;
use affine_dim::Mat2;

fn main() -> affine_dim::Result<()> {
    let ifs = AffineIfs::new(
        vec![Mat2::diagonal(0.5, 0.25); 2],
        vec![[0.0, 0.0], [0.5, 0.75]],
    )?;
    let (center, radius) = ifs.bounding_disk()?;
    println!(
        "bounding disk: center ({:.4}, {:.4}), radius {:.4}",
        center[0], center[1], radius
    );

    let depth = 12;
    let cloud = generate_cloud(&ifs, depth)?;
    println!(
        "depth-{depth} cloud: {} points, max error radius {:.2e}",
        cloud.points.len(),
        cloud.max_error_radius()
    );

    let ssc = check_ssc(&ifs, 10)?;
    println!(
        "separation: {:?} (margin {:.4})",
        ssc.verdict, ssc.separation_margin
    );

    let scales = dyadic_scales(cloud.radius, 2, 7);
    let estimate = box_dimension_estimate(&cloud, &scales)?;
    println!(
        "box-count slope {:.4} (fit residual {:.3})",
        estimate.slope, estimate.max_residual
    );
    for (scale, count) in &estimate.counts {
        println!("    scale {scale:.5}: {count} boxes");
    }

    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/attractor-example"));
    std::fs::create_dir_all(&dir)?;
    let csv_path = dir.join("attractor.csv");
    let svg_path = dir.join("attractor.svg");
    std::fs::write(&csv_path, cloud_to_csv(&cloud))?;
    std::fs::write(&svg_path, cloud_to_svg(&cloud))?;
    println!("wrote {} and {}", csv_path.display(), svg_path.display());
    Ok(())
}
