//! Scalar product, angle, two-vector tensor and geodesic in the original coordinates.

use finsleroid::finslerops::{axis_angles, finsler_product, FinslerGeodesic};
use finsleroid::geodesics::scalar_product;
use finsleroid::quasimap::sigma_map;
use finsleroid::{FinslerVector, GParameter, MetricContext};

fn main() -> finsleroid::Result<()> {
    let p = GParameter::new(-0.8)?;
    let ctx = MetricContext::identity(3)?;
    let r = FinslerVector::new(vec![0.7, 0.2, 0.5])?;
    let s = FinslerVector::new(vec![-0.1, 0.9, 0.3])?;
    let fp = finsler_product(&p, &ctx, &r, &s)?;
    let quasi = scalar_product(&p, &ctx, &sigma_map(&p, &ctx, &r)?, &sigma_map(&p, &ctx, &s)?)?;
    println!("<R,S> = {:.15}, via the quasi-euclidean images = {:.15}", fp.product, quasi);
    println!("alpha = {:.12}", fp.alpha);
    if let Some(g) = &fp.g_lower {
        println!("G_pq(R,S) =\n{:.9}", g);
    }
    let angles = axis_angles(&p, &ctx, &r)?;
    println!("angle to the axis {:.12}, to the base plane {:.12}", angles.axis, angles.plane);

    let geo = FinslerGeodesic::new(&p, &ctx, &r, &s)?;
    println!("length {:.12}, integrated {:.12}", geo.length(), geo.arc_length(400)?);
    for i in 0..=4 {
        let x = geo.length() * i as f64 / 4.0;
        println!("  R({x:.4}) = {:?}", geo.point(x)?.as_vector().as_slice());
    }
    Ok(())
}
