//! Bundled data files and the synthetic scene they were generated from.

use std::path::{Path, PathBuf};

use firesat_core::firedetect::{PixelClass, PixelSpec, SceneSpec};

pub const REGION: &str = "australia_mainland.json";
pub const REFERENCE_CHROMOSOME: &str = "reference_chromosome.json";
pub const BUDGET: &str = "budget.json";
pub const SCENE: &str = "synthetic_scene.fsc";
pub const SCENE_TRUTH: &str = "synthetic_scene_truth.json";

/// The `data/` directory shipped with this crate.
pub fn default_data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

/// A 64×64 daytime scene near the New South Wales coast: ten fires, a water
/// strip along the left edge and a small cloud bank.
pub fn bundled_scene_spec() -> SceneSpec {
    let mut planted = Vec::new();
    for r in 0..64 {
        for c in 0..3 {
            planted.push((r, c, PixelSpec::water()));
        }
    }
    let cloud =
        PixelSpec { class: PixelClass::Cloud, t12: 262.0, rho065: 0.6, rho086: 0.5, ..PixelSpec::background(270.0) };
    for r in 40..46 {
        for c in 44..52 {
            planted.push((r, c, cloud));
        }
    }
    let fires = [(5, 10), (9, 33), (14, 60), (20, 7), (27, 41), (33, 18), (38, 55), (47, 29), (55, 12), (61, 48)];
    for (k, &(r, c)) in fires.iter().enumerate() {
        let hot = PixelSpec { t4: 330.0 + 5.0 * k as f64, ..PixelSpec::fire_day() };
        planted.push((r, c, hot));
    }
    SceneSpec {
        id: "synthetic-nsw-64".into(),
        width: 64,
        height: 64,
        background: PixelSpec::background(296.0),
        planted,
        geotransform: [150.60, 0.0005, 0.0, -33.70, 0.0, -0.0005],
    }
}
