//! Rayon-backed versions of the heavy library loops. Results are identical to
//! the sequential ones: coverage reductions are order independent and scene
//! bands are joined in row order.

use firesat_core::constellation::{Constellation, WalkerChromosome};
use firesat_core::coverage::{CoverageError, CoverageEvaluator, CoverageReport};
use firesat_core::edgesim::{count_visible, EdgeError, GeoSatellite, VisibilitySample};
use firesat_core::firedetect::{assemble_report, classify_rows, FireError, FireReport, SceneRaster};
use firesat_core::kepler::EarthModel;
use firesat_core::optimizer::{CoverageFitness, Evaluator, Fitness, FitnessError};
use rayon::prelude::*;

pub fn evaluate_coverage(ev: &CoverageEvaluator, c: &Constellation) -> Result<CoverageReport, CoverageError> {
    if c.is_empty() {
        return Err(CoverageError::EmptyConstellation);
    }
    let acc = c
        .sats
        .par_iter()
        .try_fold(
            || ev.accumulator(),
            |mut acc, sat| {
                acc.add(&ev.trace(sat)?);
                Ok::<_, CoverageError>(acc)
            },
        )
        .try_reduce(
            || ev.accumulator(),
            |mut a, b| {
                a.merge(&b);
                Ok(a)
            },
        )?;
    Ok(acc.finish(ev))
}

/// Coverage fitness that spreads satellites and batch members across threads.
pub struct ParallelCoverageFitness(pub CoverageFitness);

impl Evaluator for ParallelCoverageFitness {
    type Error = FitnessError;

    fn evaluate(&self, genes: &WalkerChromosome) -> Result<Fitness, FitnessError> {
        let c = firesat_core::constellation::expand_with(genes, &self.0.bounds)?;
        let r = evaluate_coverage(&self.0.evaluator, &c)?;
        Ok(Fitness { scalar: r.fitness, objectives: r.objectives().to_vec() })
    }

    fn evaluate_batch(&self, batch: &[WalkerChromosome]) -> Vec<Result<Fitness, FitnessError>> {
        batch.par_iter().map(|g| self.evaluate(g)).collect()
    }
}

const BAND_ROWS: usize = 8;

pub fn classify_scene(scene: &SceneRaster) -> Result<FireReport, FireError> {
    scene.validate()?;
    let starts: Vec<usize> = (0..scene.height).step_by(BAND_ROWS).collect();
    let bands = starts
        .par_iter()
        .map(|&r| classify_rows(scene, r..(r + BAND_ROWS).min(scene.height)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble_report(&scene.id, bands))
}

/// Visible counts at `t = 0, step, …, duration`, one thread per sample time.
pub fn visibility_over_time(
    c: &Constellation,
    geo: &GeoSatellite,
    earth: &EarthModel,
    step_s: f64,
    duration_s: f64,
) -> Result<Vec<VisibilitySample>, EdgeError> {
    if !(step_s > 0.0) || !(duration_s >= 0.0) {
        return Err(EdgeError::Geometry("sampling step must be positive"));
    }
    let n = c.len().max(1) as f64;
    let steps = (duration_s / step_s + 1e-9) as usize;
    (0..=steps)
        .into_par_iter()
        .map(|k| {
            let t_s = k as f64 * step_s;
            let visible = count_visible(c, geo, t_s, earth)?;
            Ok(VisibilitySample { t_s, visible, fraction: visible as f64 / n })
        })
        .collect()
}
